//! Seeded Monte Carlo over the BI-AWGN channel.
//!
//! Each (point, trial) pair owns a ChaCha8 stream: the seed and point index
//! fix the key, the trial index selects the stream. Trials run in fixed-size
//! batches and the stop rule is only checked between batches, so results do
//! not depend on the thread count.

use crate::convcode::{self, CodeConfig, CodeSpec, Trellis};
use crate::gf2poly::{crc_encode, CrcScheme};
use crate::numeric::{wilson, Z95};
use crate::slvd::{slvd_decode, DecodeResult};
use crate::{complexity, Error, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// What is transmitted and how the noise is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    /// x = ±A with A = 10^{γ_s/20}, unit-variance Gaussian noise.
    Channel,
    /// x = ±1, noise uniform on the sphere of radius η.
    FixedNorm,
    /// y = z: decoding pure noise.
    Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_ue: u64,
    pub max_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_ue: 100,
            max_trials: 100_000_000,
        }
    }
}

/// A simulation request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub code: CodeConfig,
    pub mode: SimMode,
    /// SNR grid in dB (channel mode).
    #[serde(default)]
    pub snr_db: Vec<f64>,
    /// Normalized noise norms (fixed-norm mode).
    #[serde(default)]
    pub eta: Vec<f64>,
    /// Maximum list size Ψ.
    pub psi: usize,
    #[serde(default)]
    pub stop: StopRule,
    pub seed: u64,
    /// Trials per batch.
    #[serde(default = "default_batch")]
    pub batch: u64,
    /// Draw a fresh message per trial instead of the all-zero one.
    #[serde(default)]
    pub random_message: bool,
}

fn default_batch() -> u64 {
    4096
}

/// Default Ψ for origin runs at full scale.
pub const ORIGIN_PSI_CAP: usize = 1_000_000;

/// Exact outcome counts at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub trials: u64,
    pub correct: u64,
    pub ue: u64,
    pub nack: u64,
    /// Σ L over trials, L = list rank at termination.
    pub sum_rank: u64,
    pub sum_rank_sq: u128,
    /// Σ L over correctly decoded trials.
    pub sum_rank_correct: u64,
    /// Σ L over undetected errors.
    pub sum_rank_ue: u64,
    pub sum_insertions: u64,
    pub max_insertions: u64,
    pub sum_tracebacks: u64,
    /// Decoded trials whose insertions exceeded (k+m)·L (+2^ν−1 for TB).
    pub insertion_bound_violations: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.trials += o.trials;
        self.correct += o.correct;
        self.ue += o.ue;
        self.nack += o.nack;
        self.sum_rank += o.sum_rank;
        self.sum_rank_sq += o.sum_rank_sq;
        self.sum_rank_correct += o.sum_rank_correct;
        self.sum_rank_ue += o.sum_rank_ue;
        self.sum_insertions += o.sum_insertions;
        self.max_insertions = self.max_insertions.max(o.max_insertions);
        self.sum_tracebacks += o.sum_tracebacks;
        self.insertion_bound_violations += o.insertion_bound_violations;
    }
}

/// Probability estimate with a 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    fn prob(k: u64, n: u64) -> Self {
        let (lo, hi) = wilson(k, n);
        Estimate {
            value: if n == 0 { 0.0 } else { k as f64 / n as f64 },
            lo,
            hi,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    /// SNR in dB (channel) or η (fixed norm); 0 for origin runs.
    pub x: f64,
    pub counts: Counts,
    pub p_correct: Estimate,
    pub p_ue: Estimate,
    pub p_nack: Estimate,
    /// E[L] with a normal 95% interval.
    pub mean_rank: Estimate,
    pub mean_insertions: f64,
    pub mean_tracebacks: f64,
}

impl PointReport {
    fn new(x: f64, c: Counts) -> Self {
        let n = c.trials.max(1) as f64;
        let mean = c.sum_rank as f64 / n;
        let var = (c.sum_rank_sq as f64 / n - mean * mean).max(0.0);
        let hw = Z95 * (var / n).sqrt();
        PointReport {
            x,
            counts: c,
            p_correct: Estimate::prob(c.correct, c.trials),
            p_ue: Estimate::prob(c.ue, c.trials),
            p_nack: Estimate::prob(c.nack, c.trials),
            mean_rank: Estimate {
                value: mean,
                lo: mean - hw,
                hi: mean + hw,
            },
            mean_insertions: c.sum_insertions as f64 / n,
            mean_tracebacks: c.sum_tracebacks as f64 / n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub plan: TrialPlan,
    pub points: Vec<PointReport>,
}

/// Shared decoder state for one plan.
struct Context {
    spec: CodeSpec,
    scheme: CrcScheme,
    trellis: Trellis,
    psi: usize,
    random_message: bool,
}

impl Context {
    fn new(plan: &TrialPlan) -> Result<Self> {
        if plan.psi == 0 {
            return Err(Error::InvalidArgument("psi must be >= 1".into()));
        }
        if plan.batch == 0 || plan.stop.max_trials == 0 {
            return Err(Error::InvalidArgument(
                "batch and max_trials must be positive".into(),
            ));
        }
        let (spec, scheme) = plan.code.resolve()?;
        let trellis = Trellis::for_code(&spec)?;
        Ok(Context {
            spec,
            scheme,
            trellis,
            psi: plan.psi,
            random_message: plan.random_message,
        })
    }

    fn trial(&self, mode: SimMode, x: f64, rng: &mut ChaCha8Rng) -> Result<Counts> {
        let n = self.spec.n();
        let k = self.spec.k;
        let msg: Vec<u8> = if self.random_message {
            (0..k).map(|_| rng.random::<bool>() as u8).collect()
        } else {
            vec![0; k]
        };
        let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let (y, amp) = match mode {
            SimMode::Channel => {
                let a = convcode::amplitude_from_db(x);
                (self.transmit(&msg, a, &noise)?, a)
            }
            SimMode::FixedNorm => {
                let norm = noise.iter().map(|z| z * z).sum::<f64>().sqrt();
                let z: Vec<f64> = noise.iter().map(|v| v * x / norm).collect();
                (self.transmit(&msg, 1.0, &z)?, 1.0)
            }
            SimMode::Origin => (noise, 1.0),
        };
        let res = slvd_decode(&self.trellis, &self.scheme, &y, amp, self.psi)?;
        Ok(self.classify(mode, &msg, &res))
    }

    fn transmit(&self, msg: &[u8], a: f64, z: &[f64]) -> Result<Vec<f64>> {
        let v = crc_encode(msg, &self.scheme);
        let c = convcode::encode(&self.spec, &v)?;
        Ok(convcode::modulate(&c, a)
            .iter()
            .zip(z)
            .map(|(x, z)| x + z)
            .collect())
    }

    fn classify(&self, mode: SimMode, msg: &[u8], res: &DecodeResult) -> Counts {
        let l = res.list_rank as u64;
        let mut c = Counts {
            trials: 1,
            sum_rank: l,
            sum_rank_sq: (l as u128) * (l as u128),
            sum_insertions: res.insertions,
            max_insertions: res.insertions,
            sum_tracebacks: res.tracebacks,
            ..Counts::default()
        };
        match res.message() {
            None => c.nack = 1,
            // Pure noise has no transmitted message; any decoded word counts as correct.
            Some(_) if mode == SimMode::Origin => c.correct = 1,
            Some(m) if m == msg => c.correct = 1,
            Some(_) => c.ue = 1,
        }
        c.sum_rank_correct = c.correct * l;
        c.sum_rank_ue = c.ue * l;
        if !res.is_nack() {
            let s = &self.spec;
            let bound = complexity::ei_bound(s.mode, s.k, s.m, s.nu, l as f64);
            if res.insertions as f64 > bound {
                c.insertion_bound_violations = 1;
            }
        }
        c
    }
}

/// 64-bit key for point `idx` of a run seeded with `seed`.
fn point_key(seed: u64, idx: usize) -> u64 {
    let mut z = seed ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_point(
    ctx: &Context,
    plan: &TrialPlan,
    mode: SimMode,
    x: f64,
    idx: usize,
) -> Result<PointReport> {
    let key = point_key(plan.seed, idx);
    let mut total = Counts::default();
    while total.trials < plan.stop.max_trials && total.ue < plan.stop.min_ue {
        let start = total.trials;
        let end = (start + plan.batch).min(plan.stop.max_trials);
        let batch = (start..end)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                rng.set_stream(t);
                ctx.trial(mode, x, &mut rng)
            })
            .try_reduce(Counts::default, |mut a, b| {
                a.add(&b);
                Ok(a)
            })?;
        total.add(&batch);
    }
    Ok(PointReport::new(x, total))
}

/// Channel simulation over the plan's SNR grid.
pub fn run_channel(plan: &TrialPlan) -> Result<SimReport> {
    let ctx = Context::new(plan)?;
    let points = plan
        .snr_db
        .iter()
        .enumerate()
        .map(|(i, &db)| run_point(&ctx, plan, SimMode::Channel, db, i))
        .collect::<Result<_>>()?;
    Ok(SimReport {
        plan: plan.clone(),
        points,
    })
}

/// Conditional statistics at fixed normalized noise norms.
pub fn run_fixed_norm(plan: &TrialPlan) -> Result<SimReport> {
    if plan.eta.iter().any(|&e| e.is_nan() || e <= 0.0) {
        return Err(Error::InvalidArgument("eta values must be positive".into()));
    }
    let ctx = Context::new(plan)?;
    let points = plan
        .eta
        .iter()
        .enumerate()
        .map(|(i, &eta)| run_point(&ctx, plan, SimMode::FixedNorm, eta, i))
        .collect::<Result<_>>()?;
    Ok(SimReport {
        plan: plan.clone(),
        points,
    })
}

/// L̄ = E[L | X = O] from pure-noise decoding.
///
/// Every trial must terminate before Ψ; a NACK means the cap was too small
/// and is reported as an error.
pub fn run_origin(plan: &TrialPlan) -> Result<SimReport> {
    let ctx = Context::new(plan)?;
    let p = run_point(&ctx, plan, SimMode::Origin, 0.0, 0)?;
    if p.counts.nack > 0 {
        log::warn!(
            "{} of {} origin trials hit the list cap {}",
            p.counts.nack,
            p.counts.trials,
            plan.psi
        );
        return Err(Error::Numeric(format!(
            "list cap {} reached in {} origin trials; raise psi",
            plan.psi, p.counts.nack
        )));
    }
    Ok(SimReport {
        plan: plan.clone(),
        points: vec![p],
    })
}

/// Dispatch on `plan.mode`.
pub fn run(plan: &TrialPlan) -> Result<SimReport> {
    match plan.mode {
        SimMode::Channel => run_channel(plan),
        SimMode::FixedNorm => run_fixed_norm(plan),
        SimMode::Origin => run_origin(plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(mode: SimMode) -> TrialPlan {
        TrialPlan {
            code: CodeConfig {
                k: 8,
                m: 3,
                nu: 3,
                omega: 2,
                gens_octal: vec!["13".into(), "17".into()],
                crc_hex: "0x9".into(),
                mode: convcode::Termination::ZeroTail,
                gen_order: Default::default(),
            },
            mode,
            snr_db: vec![30.0],
            eta: vec![0.01],
            psi: 1 << 11,
            stop: StopRule {
                min_ue: 100,
                max_trials: 500,
            },
            seed: 7,
            batch: 128,
            random_message: false,
        }
    }

    #[test]
    fn noiseless_is_correct() {
        let r = run_channel(&plan(SimMode::Channel)).unwrap();
        assert_eq!(r.points[0].counts.correct, 500);
        let r = run_fixed_norm(&plan(SimMode::FixedNorm)).unwrap();
        assert_eq!(r.points[0].mean_rank.value, 1.0);
    }

    #[test]
    fn partition_and_reproducibility() {
        let mut p = plan(SimMode::Channel);
        p.snr_db = vec![-3.0, 1.0];
        p.psi = 4;
        let a = run_channel(&p).unwrap();
        for pt in &a.points {
            let c = pt.counts;
            assert_eq!(c.correct + c.ue + c.nack, c.trials);
        }
        assert_eq!(a, run_channel(&p).unwrap());
    }

    #[test]
    fn trivial_crc_origin_rank_one() {
        let mut p = plan(SimMode::Origin);
        p.code.m = 0;
        p.code.crc_hex = "0x1".into();
        let r = run_origin(&p).unwrap();
        assert_eq!(r.points[0].mean_rank.value, 1.0);
    }
}
