//! Error bounds for CRC-aided convolutional codes on the BI-AWGN channel.
//!
//! Amplitudes follow the unit-noise convention: A = √γ_s. Exponents are in
//! nats with R = k·ln 2 / n.

use crate::dso::DistanceSpectrum;
use crate::numeric::{self, q_func};
use crate::{Error, Result};
use libm::erfc;
use serde::{Deserialize, Serialize};

/// Which estimate a [`BoundCurve`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Union,
    Tub,
    NnPe1,
    Nack1,
    Rcu,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub snr_db: Vec<f64>,
    pub values: Vec<f64>,
}

fn terms(c: &DistanceSpectrum, a: f64, upto: u32) -> f64 {
    c.nonzero()
        .filter(|&(d, _)| d <= upto)
        .map(|(d, cnt)| cnt as f64 * q_func(a * (d as f64).sqrt()))
        .sum()
}

/// Σ_d C_d·Q(A√d) without clamping. Used to locate crossovers.
pub fn union_sum(c: &DistanceSpectrum, a: f64) -> f64 {
    terms(c, a, u32::MAX)
}

/// Union bound min{1, Σ_d C_d·Q(A√d)}.
pub fn union_bound(c: &DistanceSpectrum, a: f64) -> f64 {
    union_sum(c, a).min(1.0)
}

/// Truncated union bound over d ≤ d̃.
pub fn tub(c: &DistanceSpectrum, a: f64, dtilde: u32) -> f64 {
    terms(c, a, dtilde).min(1.0)
}

/// Nearest-neighbor estimate of P_{e,1}: min{2^{−m}, C_dmin·Q(A√dmin)}.
pub fn nn_pe1(c: &DistanceSpectrum, a: f64, m: usize) -> f64 {
    let cap = 0.5f64.powi(m as i32);
    match c.dmin() {
        Some(d) => (c.count(d) as f64 * q_func(a * (d as f64).sqrt())).min(cap),
        None => 0.0,
    }
}

/// NACK estimate at Ψ = 1: min{1 − 2^{−m}, Σ_{d≤d̃} B_d·Q(A√d) − C_dmin·Q(A√dmin)}.
pub fn nack1(b: &DistanceSpectrum, c: &DistanceSpectrum, a: f64, m: usize, dtilde: u32) -> f64 {
    let head = match c.dmin() {
        Some(d) => c.count(d) as f64 * q_func(a * (d as f64).sqrt()),
        None => 0.0,
    };
    (terms(b, a, dtilde) - head).clamp(0.0, 1.0 - 0.5f64.powi(m as i32))
}

/// SNR in dB where the union sums of two spectra are equal, searched on [lo, hi].
pub fn crossover_db(c1: &DistanceSpectrum, c2: &DistanceSpectrum, lo: f64, hi: f64) -> Result<f64> {
    let diff = |db: f64| {
        let a = 10f64.powf(db / 20.0);
        (union_sum(c1, a) / union_sum(c2, a)).ln()
    };
    numeric::bisect(diff, lo, hi, 1e-10)
}

/// ψ(x) = ½·erfc(|x|/√2)·e^{x²/2}·sign(x), with ψ(0) = ½.
pub fn psi(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let ax = x.abs();
    let v = if ax < 8.0 {
        0.5 * erfc(ax / std::f64::consts::SQRT_2) * (0.5 * ax * ax).exp()
    } else {
        // Mills ratio by continued fraction; erfc underflows against the exponential.
        let mut cf = ax;
        for k in (1..=40).rev() {
            cf = ax + k as f64 / cf;
        }
        1.0 / (cf * (2.0 * std::f64::consts::PI).sqrt())
    };
    v * x.signum()
}

/// E₀ and its first two ρ-derivatives for the BI-AWGN channel with uniform input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct E0Family {
    pub e0: f64,
    pub d1: f64,
    pub d2: f64,
}

const QUAD_TOL: f64 = 1e-12;

/// Natural log of the unit-variance Gaussian density at y − x.
fn ln_w(y: f64, x: f64) -> f64 {
    -0.5 * (y - x) * (y - x) - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Tilted weights over the two inputs: (ln Σ ½W^s, mean and variance of ln W).
fn tilt(y: f64, a: f64, s: f64) -> (f64, f64, f64) {
    let (l1, l2) = (ln_w(y, a), ln_w(y, -a));
    let (t1, t2) = (s * l1, s * l2);
    let mx = t1.max(t2);
    let (e1, e2) = ((t1 - mx).exp(), (t2 - mx).exp());
    let z = e1 + e2;
    let ln_g = mx + z.ln() + 0.5f64.ln();
    let (p1, p2) = (e1 / z, e2 / z);
    let mean = p1 * l1 + p2 * l2;
    let var = p1 * p2 * (l1 - l2) * (l1 - l2);
    (ln_g, mean, var)
}

fn breaks(a: f64) -> [f64; 5] {
    [-a - 12.0, -a, 0.0, a, a + 12.0]
}

/// E₀(ρ), E₀′(ρ) and E₀″(ρ) at amplitude A, by quadrature with derivatives taken under the integral.
pub fn e0_family(rho: f64, a: f64) -> Result<E0Family> {
    if rho.is_nan() || rho < 0.0 || a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "e0_family needs rho >= 0 and A > 0 (rho={rho}, A={a})"
        )));
    }
    let s = 1.0 / (1.0 + rho);
    let parts = |y: f64| {
        let (ln_g, mean, var) = tilt(y, a, s);
        let f = ((1.0 + rho) * ln_g).exp();
        let h1 = ln_g - s * mean;
        let h2 = s * s * s * var;
        (f, h1, h2)
    };
    let br = breaks(a);
    let i0 = numeric::integrate_pieces(|y| parts(y).0, &br, QUAD_TOL);
    let i1 = numeric::integrate_pieces(
        |y| {
            let (f, h1, _) = parts(y);
            f * h1
        },
        &br,
        QUAD_TOL,
    );
    let i2 = numeric::integrate_pieces(
        |y| {
            let (f, h1, h2) = parts(y);
            f * (h1 * h1 + h2)
        },
        &br,
        QUAD_TOL,
    );
    if i0.is_nan() || i0 <= 0.0 || !i1.is_finite() || !i2.is_finite() {
        return Err(Error::Numeric(format!(
            "E0 quadrature failed at rho={rho}, A={a}"
        )));
    }
    let r1 = i1 / i0;
    Ok(E0Family {
        e0: -i0.ln(),
        d1: -r1,
        d2: -i2 / i0 + r1 * r1,
    })
}

/// BI-AWGN mutual information in nats under uniform input, by direct quadrature.
pub fn mutual_information(a: f64) -> f64 {
    let f = |y: f64| {
        let (l1, l2) = (ln_w(y, a), ln_w(y, -a));
        let ln_py = numeric::log_add_exp(l1, l2) + 0.5f64.ln();
        0.5 * (l1.exp() * (l1 - ln_py) + l2.exp() * (l2 - ln_py))
    };
    numeric::integrate_pieces(f, &breaks(a), QUAD_TOL)
}

/// ω̄″(ρ): Q_ρ-average of the τ-curvature of ln Σ P(x)W^τ at τ = 1/(1+ρ).
fn omega2(rho: f64, a: f64, e0: f64) -> f64 {
    let s = 1.0 / (1.0 + rho);
    let f = |y: f64| {
        let (ln_g, _, var) = tilt(y, a, s);
        ((1.0 + rho) * ln_g + e0).exp() * var
    };
    numeric::integrate_pieces(f, &breaks(a), QUAD_TOL)
}

fn rate_nats(n: usize, k: usize) -> f64 {
    k as f64 * std::f64::consts::LN_2 / n as f64
}

fn mc_objective(rho: f64, n: f64, r: f64, a: f64) -> Result<f64> {
    let e = e0_family(rho, a)?;
    let u = (-(1.0 + rho) * e.d2).max(0.0);
    let lead = -n * (e.e0 - rho * e.d1);
    let third = lead - n * (r - e.d1);
    let x = (n * u).sqrt();
    Ok(lead.exp() * (psi(x) + psi(rho * x)) - third.exp())
}

/// Saddlepoint approximation of the meta-converse bound.
pub fn mc_bound(n: usize, k: usize, a: f64) -> Result<f64> {
    let (nf, r) = (n as f64, rate_nats(n, k));
    let obj = |rho: f64| mc_objective(rho, nf, r, a);
    let step = 0.05;
    let mut best = (0.0, obj(0.0)?);
    for i in 1..=160 {
        let rho = i as f64 * step;
        let v = obj(rho)?;
        if v > best.1 {
            best = (rho, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (obj(x1)?, obj(x2)?);
    while hi - lo > 1e-6 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = obj(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = obj(x1)?;
        }
    }
    let v = best.1.max(f1).max(f2);
    if v.is_nan() {
        return Err(Error::Numeric("MC objective is NaN".into()));
    }
    Ok(v.clamp(0.0, 1.0))
}

fn theta(n: f64, rho: f64, w2: f64) -> f64 {
    (1.0 / (1.0 + rho).sqrt())
        * ((1.0 + rho) / (2.0 * std::f64::consts::PI * n * w2).sqrt()).powf(rho)
}

/// Saddlepoint approximation of the random-coding union bound.
///
/// Returns 1 when R ≥ E₀′(0), where the tilt ρ̂ would be negative.
pub fn rcu_bound(n: usize, k: usize, a: f64) -> Result<f64> {
    let (nf, r) = (n as f64, rate_nats(n, k));
    let d1 = |rho: f64| e0_family(rho, a).map(|e| e.d1 - r).unwrap_or(f64::NAN);
    if d1(0.0) <= 0.0 {
        log::warn!("rate {r:.4} nats is not below E0'(0); RCU approximation set to 1");
        return Ok(1.0);
    }
    let mut hi = 8.0;
    while d1(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1024.0 {
            return Err(Error::Numeric("E0'(rho) = R has no root below 1024".into()));
        }
    }
    let rho = numeric::bisect(d1, 0.0, hi, 1e-9)?;
    let e = e0_family(rho, a)?;
    let v = (-e.d2).max(0.0);
    let th = theta(nf, rho, omega2(rho, a, e.e0));
    let xi = if rho > 1.0 {
        let e1 = e0_family(1.0, a)?;
        (-nf * (e1.e0 - r)).exp() * theta(nf, 1.0, omega2(1.0, a, e1.e0))
    } else {
        0.0
    };
    let x = (nf * v).sqrt();
    let phi = th * (psi(rho * x) + psi((1.0 - rho) * x));
    let val = xi + phi * (-nf * (e.e0 - rho * r)).exp();
    if !val.is_finite() {
        return Err(Error::Numeric(format!(
            "RCU approximation not finite at A={a}"
        )));
    }
    Ok(val.clamp(0.0, 1.0))
}
