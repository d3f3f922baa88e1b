//! Closed-form complexity of serial list Viterbi decoding, in additions.
//!
//! The list term uses log₂.

use crate::convcode::Termination;
use serde::{Deserialize, Serialize};

pub const C1_DEFAULT: f64 = 1.5;
pub const C2_DEFAULT: f64 = 2.2;

fn p2(e: usize) -> f64 {
    2f64.powi(e as i32)
}

/// Cost of the forward pass plus one traceback.
pub fn c_ssv(mode: Termination, k: usize, m: usize, nu: usize, c1: f64) -> f64 {
    let km = (k + m) as f64;
    match mode {
        Termination::ZeroTail => {
            let head = p2(nu + 1) - 2.0;
            head + 1.5 * head
                + 1.5 * (km - nu as f64) * p2(nu + 1)
                + c1 * (2.0 * (km + nu as f64) + 1.5 * km)
        }
        Termination::TailBiting => 1.5 * km * p2(nu + 1) + p2(nu) + 3.5 * c1 * km,
    }
}

/// Cost of the E[L] − 1 additional tracebacks.
pub fn c_trace(mode: Termination, k: usize, m: usize, nu: usize, el: f64, c1: f64) -> f64 {
    let km = (k + m) as f64;
    let per = match mode {
        Termination::ZeroTail => 2.0 * (km + nu as f64) + 1.5 * km,
        Termination::TailBiting => 3.5 * km,
    };
    c1 * (el - 1.0) * per
}

/// Cost of maintaining the ordered list of path metric differences.
pub fn c_list(ei: f64, c2: f64) -> f64 {
    if ei <= 1.0 {
        return 0.0;
    }
    c2 * ei * ei.log2()
}

/// Expected-insertion bound (k+m)·E[L], plus 2^ν − 1 for TB.
pub fn ei_bound(mode: Termination, k: usize, m: usize, nu: usize, el: f64) -> f64 {
    let base = (k + m) as f64 * el;
    match mode {
        Termination::ZeroTail => base,
        Termination::TailBiting => base + p2(nu) - 1.0,
    }
}

/// Wrap-around Viterbi cost k·I·(2^ν/2 + 2^{ν+1}).
pub fn c_wava(nu: usize, k: usize, iterations: u32) -> f64 {
    k as f64 * iterations as f64 * (0.5 * p2(nu) + p2(nu + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBreakdown {
    pub mode: Termination,
    pub k: usize,
    pub m: usize,
    pub nu: usize,
    pub el: f64,
    pub ei: f64,
    pub c1: f64,
    pub c2: f64,
    pub c_ssv: f64,
    pub c_trace: f64,
    pub c_list: f64,
    pub c_total: f64,
    /// c_total / c_ssv.
    pub normalized: f64,
}

/// Full breakdown. `ei = None` uses [`ei_bound`].
#[allow(clippy::too_many_arguments)]
pub fn breakdown(
    mode: Termination,
    k: usize,
    m: usize,
    nu: usize,
    el: f64,
    ei: Option<f64>,
    c1: f64,
    c2: f64,
) -> ComplexityBreakdown {
    let ei = ei.unwrap_or_else(|| ei_bound(mode, k, m, nu, el));
    let ssv = c_ssv(mode, k, m, nu, c1);
    let tr = c_trace(mode, k, m, nu, el, c1);
    let li = c_list(ei, c2);
    let total = ssv + tr + li;
    ComplexityBreakdown {
        mode,
        k,
        m,
        nu,
        el,
        ei,
        c1,
        c2,
        c_ssv: ssv,
        c_trace: tr,
        c_list: li,
        c_total: total,
        normalized: total / ssv,
    }
}
