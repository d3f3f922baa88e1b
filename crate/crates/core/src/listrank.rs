//! Expected list rank models.
//!
//! Conditional ranks are indexed by the normalized norm η = w/A, the noise
//! norm measured in units of the BPSK amplitude. Under that normalization
//! the codewords lie on the sphere of radius √n.

use crate::numeric;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{FRAC_PI_2, PI};

/// Chi density with n degrees of freedom: the law of ‖z‖ for z ~ N(0, I_n).
pub fn noise_norm_density(w: f64, n: usize) -> f64 {
    if w < 0.0 {
        return 0.0;
    }
    if w == 0.0 {
        return match n {
            1 => (2.0 / PI).sqrt(),
            _ => 0.0,
        };
    }
    let nf = n as f64;
    let ln = (nf - 1.0) * w.ln() - 0.5 * w * w - (nf / 2.0 - 1.0) * 2f64.ln() - ln_gamma(nf / 2.0);
    ln.exp()
}

/// Surface area of the radius-r sphere in ℝⁿ.
pub fn sphere_area(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    (2f64.ln() + (nf / 2.0) * PI.ln() - ln_gamma(nf / 2.0) + (nf - 1.0) * r.ln()).exp()
}

/// 1 − p + p·L̄ for a conditional UE probability p.
pub fn parametric_cond(p: f64, lbar: f64) -> f64 {
    1.0 - p + p * lbar
}

/// 1 − P + P·L̄ for the overall UE probability P.
pub fn parametric_overall(pe: f64, lbar: f64) -> f64 {
    parametric_cond(pe, lbar)
}

/// Ω(α)/Ω₀: the fraction of the unit sphere in ℝⁿ inside a cone of half-angle α.
pub fn solid_angle_fraction(alpha: f64, n: usize) -> f64 {
    assert!(n >= 2, "solid angle needs n >= 2");
    if alpha <= 0.0 {
        return 0.0;
    }
    if alpha >= PI {
        return 1.0;
    }
    if alpha > FRAC_PI_2 {
        return 1.0 - solid_angle_fraction(PI - alpha, n);
    }
    let s = alpha.sin();
    0.5 * beta_reg((n as f64 - 1.0) / 2.0, 0.5, s * s)
}

/// Signed version: ∫₀^β with β < 0 contributes negatively.
fn signed_fraction(beta: f64, n: usize) -> f64 {
    if beta < 0.0 {
        -solid_angle_fraction(-beta, n)
    } else {
        solid_angle_fraction(beta, n)
    }
}

/// Half-angle α_s with Ω(α_s)/Ω₀ = s/2^{k+m}.
pub fn solve_alpha(s: u64, k: usize, m: usize, n: usize) -> Result<f64> {
    let target = s as f64 * 0.5f64.powi((k + m) as i32);
    if s == 0 || target > 0.5 {
        return Err(Error::InvalidArgument(format!(
            "cone fraction s/2^(k+m) = {target} must lie in (0, 1/2]"
        )));
    }
    // Bisect in log space: targets reach 2^-74 and below.
    let lt = target.ln();
    let f = |a: f64| solid_angle_fraction(a, n).ln() - lt;
    numeric::bisect(f, 1e-300f64.max(f64::MIN_POSITIVE), FRAC_PI_2, 1e-13)
}

/// Cone half-angles α₁ < … < α_μ of the onion model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnionGeometry {
    pub mu: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub alphas: Vec<f64>,
}

impl OnionGeometry {
    pub fn new(mu: usize, k: usize, m: usize, n: usize) -> Result<Self> {
        if mu == 0 {
            return Err(Error::InvalidArgument("onion order mu must be >= 1".into()));
        }
        let alphas = (1..=mu as u64)
            .map(|s| solve_alpha(s, k, m, n))
            .collect::<Result<_>>()?;
        Ok(OnionGeometry {
            mu,
            n,
            k,
            m,
            alphas,
        })
    }

    /// F(s): fraction of the noise sphere of radius η about the codeword inside cone s.
    pub fn cdf(&self, s: usize, eta: f64) -> f64 {
        let alpha = self.alphas[s - 1];
        let n = self.n;
        let rn = (n as f64).sqrt();
        if eta <= rn * alpha.sin() {
            return 1.0;
        }
        let ratio = (eta * eta - n as f64 * alpha.sin().powi(2)).max(0.0).sqrt() / eta;
        let a = ratio.clamp(-1.0, 1.0).asin();
        let b1 = FRAC_PI_2 + alpha - a;
        let b2 = if eta <= rn {
            FRAC_PI_2 - alpha - a
        } else {
            0.0
        };
        (signed_fraction(b1, n) + signed_fraction(b2, n)).clamp(0.0, 1.0)
    }
}

/// Onion-model conditional expected rank E[L | W = η].
pub fn onion_cond_rank(eta: f64, geo: &OnionGeometry, lbar: f64) -> f64 {
    let rn = (geo.n as f64).sqrt();
    let band = geo.alphas.iter().position(|&a| eta < rn * a.sin());
    match band {
        Some(s0) => {
            let s = s0 + 1;
            s as f64 - (1..s).map(|i| geo.cdf(i, eta)).sum::<f64>()
        }
        None => {
            let mu = geo.mu;
            lbar - (lbar - mu as f64) * geo.cdf(mu, eta)
                - (1..mu).map(|i| geo.cdf(i, eta)).sum::<f64>()
        }
    }
}

/// Density induced on the codeword sphere by projecting a uniform point of the
/// radius-w noise sphere around the transmitted point, as a function of the
/// first coordinate along the transmitted direction.
pub fn induced_density(y1: f64, w: f64, a: f64, n: usize) -> Result<f64> {
    let r = a * (n as f64).sqrt();
    if w < r {
        return Err(Error::InvalidArgument(format!(
            "noise radius {w} below codeword radius {r}"
        )));
    }
    if y1.abs() > r * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "y1 = {y1} outside [-{r}, {r}]"
        )));
    }
    let root = (y1 * y1 + w * w - r * r).max(0.0).sqrt();
    let rho = y1 + root;
    let jac = if root > 0.0 { 1.0 + y1 / root } else { 0.0 };
    let nf = n as f64;
    let core = if rho <= 0.0 {
        if n == 2 {
            jac
        } else {
            0.0
        }
    } else {
        ((nf - 2.0) * (rho / w).ln()).exp() * jac
    };
    Ok(core / sphere_area(n, r))
}

/// (|C_h| + 1)/(|C'| + 1): expected rank of the first lower-rate codeword in a
/// uniformly random order.
pub fn random_coding_rank(size_h: f64, size_l: f64) -> f64 {
    (size_h + 1.0) / (size_l + 1.0)
}

/// E[L] = ∫ f_W(w)·rank(w/A) dw for a conditional-rank table over η.
///
/// The table is linearly interpolated and extended with its end values.
pub fn integrate_rank_over_noise(table: &[(f64, f64)], n: usize, a: f64) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("empty rank table".into()));
    }
    if table.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument(
            "rank table must be strictly increasing in eta".into(),
        ));
    }
    let (e0, e1) = (table[0].0, table[table.len() - 1].0);
    let cov = numeric::integrate_pieces(|w| noise_norm_density(w, n), &[e0 * a, e1 * a], 1e-12);
    if cov < 0.9999 {
        log::warn!("rank table covers only {:.6} of the noise-norm mass", cov);
    }
    let interp = |eta: f64| -> f64 {
        if eta <= e0 {
            return table[0].1;
        }
        if eta >= e1 {
            return table[table.len() - 1].1;
        }
        let i = table.partition_point(|p| p.0 <= eta);
        let (x0, y0) = table[i - 1];
        let (x1, y1) = table[i];
        y0 + (y1 - y0) * (eta - x0) / (x1 - x0)
    };
    let nf = n as f64;
    let sd = 12.0;
    let (lo, hi) = (((nf - 1.0).max(0.0).sqrt() - sd).max(0.0), (nf.sqrt() + sd));
    let mut pts = vec![lo];
    pts.extend(table.iter().map(|p| p.0 * a).filter(|&w| w > lo && w < hi));
    pts.push(hi);
    Ok(numeric::integrate_pieces(
        |w| noise_norm_density(w, n) * interp(w / a),
        &pts,
        1e-12,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_half_normal() {
        for &w in &[0.1, 1.0, 2.5] {
            let hn = 2.0 * (-w * w / 2.0f64).exp() / (2.0 * PI).sqrt();
            assert!((noise_norm_density(w, 1) - hn).abs() < 1e-14);
        }
    }

    #[test]
    fn fraction_landmarks() {
        for n in [2, 3, 10, 134] {
            assert!((solid_angle_fraction(PI, n) - 1.0).abs() < 1e-15);
            assert!((solid_angle_fraction(FRAC_PI_2, n) - 0.5).abs() < 1e-12);
        }
        // n = 3: cap area fraction (1 − cos α)/2.
        let a = 0.7;
        assert!((solid_angle_fraction(a, 3) - (1.0 - a.cos()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn parametric_ends() {
        assert_eq!(parametric_cond(0.0, 64.0), 1.0);
        assert_eq!(parametric_cond(1.0, 64.0), 64.0);
        assert!((parametric_overall(1e-6, 64.0) - 1.000063).abs() < 1e-12);
    }

    #[test]
    fn rank_urn_formula() {
        assert!((random_coding_rank(8.0, 4.0) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn alpha_hits_target() {
        let a = solve_alpha(3, 10, 2, 40).unwrap();
        assert!((solid_angle_fraction(a, 40) - 3.0 / 4096.0).abs() < 1e-12);
        assert!(solve_alpha(3, 0, 1, 4).is_err());
    }
}
