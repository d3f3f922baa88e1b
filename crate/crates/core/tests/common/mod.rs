//! Brute-force oracles shared by the integration tests.
//!
//! Nothing here touches the trellis tables or the decoder: codewords come from
//! direct convolution with the generator polynomials and CRC checks from
//! polynomial long division.
#![allow(dead_code)]

use crcconv::convcode::{CodeSpec, Termination};
use crcconv::gf2poly::{poly_mod, CrcScheme, Gf2Poly};

/// One trellis path: initial state, inputs, codeword bits.
#[derive(Clone, Debug)]
pub struct OraclePath {
    pub start: u32,
    pub inputs: Vec<u8>,
    pub bits: Vec<u8>,
}

impl OraclePath {
    /// TB condition: the state after the last input equals the start state.
    pub fn closes(&self, nu: usize) -> bool {
        let n = self.inputs.len();
        let end = (0..nu).fold(0u32, |s, i| s | (self.inputs[n - 1 - i] as u32) << i);
        end == self.start
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// c_{i,t} = Σ_j g_{i,j}·u_{t−j}, with u_{−1−j} read from bit j of `start`.
pub fn convolve(spec: &CodeSpec, start: u32, inputs: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(inputs.len() * spec.omega());
    for t in 0..inputs.len() {
        for g in &spec.generators {
            let mut b = 0u8;
            for j in 0..=spec.nu {
                if g.coeff(j) == 0 {
                    continue;
                }
                let u = if t >= j {
                    inputs[t - j]
                } else {
                    ((start >> (j - t - 1)) & 1) as u8
                };
                b ^= u;
            }
            out.push(b);
        }
    }
    out
}

fn bits_of(x: u64, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((x >> i) & 1) as u8).collect()
}

/// All ZT paths: 2^{k+m} inputs followed by ν zeros from state 0.
pub fn zt_paths(spec: &CodeSpec) -> Vec<OraclePath> {
    let info = spec.info_len();
    (0..1u64 << info)
        .map(|x| {
            let mut inputs = bits_of(x, info);
            inputs.extend(std::iter::repeat_n(0, spec.nu));
            let bits = convolve(spec, 0, &inputs);
            OraclePath {
                start: 0,
                inputs,
                bits,
            }
        })
        .collect()
}

/// All trellis paths of the TB trellis: every start state with every input word.
pub fn tb_trellis_paths(spec: &CodeSpec) -> Vec<OraclePath> {
    let n = spec.trellis_len();
    let mut out = Vec::with_capacity(1 << (n + spec.nu));
    for s in 0..1u32 << spec.nu {
        for x in 0..1u64 << n {
            let inputs = bits_of(x, n);
            let bits = convolve(spec, s, &inputs);
            out.push(OraclePath {
                start: s,
                inputs,
                bits,
            });
        }
    }
    out
}

/// The TB codewords only: start state = last ν inputs.
pub fn tb_paths(spec: &CodeSpec) -> Vec<OraclePath> {
    let n = spec.trellis_len();
    (0..1u64 << n)
        .map(|x| {
            let inputs = bits_of(x, n);
            let start = (0..spec.nu).fold(0u32, |s, i| s | (inputs[n - 1 - i] as u32) << i);
            let bits = convolve(spec, start, &inputs);
            OraclePath {
                start,
                inputs,
                bits,
            }
        })
        .collect()
}

/// Codewords of the terminated higher-rate code.
pub fn codewords(spec: &CodeSpec) -> Vec<OraclePath> {
    match spec.mode {
        Termination::ZeroTail => zt_paths(spec),
        Termination::TailBiting => tb_paths(spec),
    }
}

/// p(x) | v*(x), with v* the reversal of the first k+m inputs, by long division.
pub fn crc_divides(inputs: &[u8], info_len: usize, scheme: &CrcScheme) -> bool {
    let vstar: Vec<u8> = inputs[..info_len].iter().rev().copied().collect();
    poly_mod(&Gf2Poly::from_bits(&vstar), scheme.poly())
        .unwrap()
        .is_zero()
}

/// Message carried by a valid path: the top k coefficients of v*.
pub fn message(inputs: &[u8], info_len: usize, m: usize) -> Vec<u8> {
    let vstar: Vec<u8> = inputs[..info_len].iter().rev().copied().collect();
    vstar[m..].to_vec()
}

pub fn sq_dist(y: &[f64], bits: &[u8], a: f64) -> f64 {
    y.iter()
        .zip(bits)
        .map(|(&yi, &b)| {
            let x = if b == 0 { a } else { -a };
            (yi - x) * (yi - x)
        })
        .sum()
}

/// Weight histogram of a path set, indexed by weight.
pub fn weight_hist(paths: &[OraclePath], filter: impl Fn(&OraclePath) -> bool) -> Vec<u128> {
    let max = paths.iter().map(|p| p.bits.len()).max().unwrap_or(0);
    let mut h = vec![0u128; max + 1];
    for p in paths.iter().filter(|p| filter(p)) {
        h[p.weight()] += 1;
    }
    h
}

/// Result of scanning the sorted path list for the first valid candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleDecode {
    pub message: Option<Vec<u8>>,
    pub rank: usize,
    /// Metrics of the first `rank` sorted paths.
    pub metrics: Vec<f64>,
    /// Smallest gap between consecutive metrics among the first rank+1 paths.
    pub min_gap: f64,
}

/// Sorts every trellis path by ‖y − x‖² and returns the first one passing the
/// CRC (and, for TB, closing on itself), within Ψ.
pub fn oracle_decode(
    spec: &CodeSpec,
    scheme: &CrcScheme,
    paths: &[OraclePath],
    y: &[f64],
    a: f64,
    psi: usize,
) -> OracleDecode {
    let mut scored: Vec<(f64, usize)> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| (sq_dist(y, &p.bits, a), i))
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let info = spec.info_len();
    let tb = spec.mode == Termination::TailBiting;
    let mut message = None;
    let mut rank = 0;
    for (metric_rank, &(_, i)) in scored.iter().enumerate().take(psi) {
        rank = metric_rank + 1;
        let p = &paths[i];
        if tb && !p.closes(spec.nu) {
            continue;
        }
        if crc_divides(&p.inputs, info, scheme) {
            message = Some(message_of(p, info, scheme.degree()));
            break;
        }
    }
    let span = (rank + 1).min(scored.len());
    let min_gap = scored[..span]
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    OracleDecode {
        message,
        rank,
        metrics: scored[..rank].iter().map(|s| s.0).collect(),
        min_gap,
    }
}

fn message_of(p: &OraclePath, info: usize, m: usize) -> Vec<u8> {
    message(&p.inputs, info, m)
}
