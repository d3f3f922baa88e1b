//! Distance-spectrum-optimal (DSO) CRC search.
//!
//! The search has two phases. The first collects the irreducible error events
//! (IEEs) of the convolutional code. An IEE at state σ is a trellis path that
//! starts and ends at σ and whose interior states all exceed σ. The zero-state
//! self-loop is excluded. The second phase rebuilds every low-weight
//! codeword of the terminated code from IEEs and sieves the degree-m CRC
//! candidates by how many of those codewords they accept, distance by
//! distance.
//!
//! # Reconstruction
//!
//! Let σ be the smallest state visited by a closed (tail-biting) path. Cutting
//! the path at its visits to σ splits it into IEEs at σ, where for σ = 0 the
//! zero self-loop counts as a weight-0 element of length 1. Conversely, let
//! P = e₁e₂…e_j be a concatenation of IEEs at σ of total length N. Then each
//! rotation Qₜ = P₍ₜ₊ᵣ₎ mod N with 0 ≤ r < len(e₁) is a distinct TB path with
//! minimum state σ. Every such path arises exactly once. When r = 0, Q₀ = σ.
//! When r > 0, Q₀ lies strictly inside e₁, the last visit of Q to σ is at
//! time N − r, and rotating Q to start there recovers P. So TB paths are
//! enumerated without duplicates and without a hash set. Counting only needs
//! the number of concatenations by (weight, length). The TB count at weight d
//! is Σ_σ Σ_{e₁} len(e₁)·cnt_σ(d − w(e₁), N − len(e₁)).
//!
//! ZT codewords are the concatenations at σ = 0 of total length k+m+ν,
//! without rotation. Their first k+m inputs form v.
//!
//! Input words are packed in a `u128`, bit t being the t-th encoder input, so
//! trellis lengths are limited to 128.

use crate::convcode::{CodeSpec, Termination, Trellis};
use crate::gf2poly::{self, CrcScheme, CrcTable, GenOrder};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Longest trellis the word-packed reconstruction handles.
pub const MAX_WORD_LEN: usize = 128;

/// An irreducible error event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Iee {
    /// Start and end state σ.
    pub sigma: u32,
    /// Input bits, bit i entering at step i.
    pub inputs: u128,
    /// Trellis steps.
    pub len: u32,
    /// Hamming weight of the output labels.
    pub weight: u32,
}

impl Iee {
    /// State sequence s₀ = σ, …, s_len = σ.
    pub fn states(&self, trellis: &Trellis) -> Vec<u32> {
        let mut s = self.sigma;
        let mut out = vec![s];
        for i in 0..self.len {
            s = trellis.next_state(s, ((self.inputs >> i) & 1) as u8);
            out.push(s);
        }
        out
    }

    /// Output labels along the event, one per step.
    pub fn labels(&self, trellis: &Trellis) -> Vec<u16> {
        let mut s = self.sigma;
        (0..self.len)
            .map(|i| {
                let u = ((self.inputs >> i) & 1) as u8;
                let l = trellis.label(s, u);
                s = trellis.next_state(s, u);
                l
            })
            .collect()
    }
}

/// IEEs of weight below d̃, grouped by start state.
#[derive(Clone, Debug, PartialEq)]
pub struct IeeSet {
    pub nu: usize,
    pub dtilde: u32,
    /// `per_sigma[σ]` holds the IEEs at σ, sorted by (weight, length, inputs).
    pub per_sigma: Vec<Vec<Iee>>,
}

impl IeeSet {
    pub fn total(&self) -> usize {
        self.per_sigma.iter().map(Vec::len).sum()
    }
}

fn stationary_trellis(spec: &CodeSpec) -> Result<Trellis> {
    let tb = CodeSpec {
        mode: Termination::TailBiting,
        ..spec.clone()
    };
    crate::convcode::build_trellis(&tb, 1)
}

fn collect_at(trellis: &Trellis, sigma: u32, dtilde: u32, max_len: usize) -> Vec<Iee> {
    let mut out = Vec::new();
    // Explicit stack of (state, length, weight, inputs).
    let mut stack = vec![(sigma, 0u32, 0u32, 0u128)];
    while let Some((s, len, w, inputs)) = stack.pop() {
        if len as usize >= max_len {
            continue;
        }
        for u in 0..2u8 {
            let next = trellis.next_state(s, u);
            let nw = w + trellis.label(s, u).count_ones();
            if nw >= dtilde {
                continue;
            }
            let nin = inputs | ((u as u128) << len);
            if next == sigma {
                if !(sigma == 0 && len == 0 && u == 0) {
                    out.push(Iee {
                        sigma,
                        inputs: nin,
                        len: len + 1,
                        weight: nw,
                    });
                }
            } else if next > sigma {
                stack.push((next, len + 1, nw, nin));
            }
        }
    }
    out.sort_by_key(|e| (e.weight, e.len, e.inputs));
    out
}

/// Collects all IEEs of weight < d̃ and length ≤ `max_len`.
///
/// TB codes need every σ; ZT codes only use σ = 0, so only that class is
/// collected for them. The search is a weight-pruned depth-first traversal.
pub fn collect_iees(spec: &CodeSpec, dtilde: u32, max_len: usize) -> Result<IeeSet> {
    let trellis = stationary_trellis(spec)?;
    let max_len = max_len.min(MAX_WORD_LEN);
    let sigmas = match spec.mode {
        Termination::TailBiting => trellis.num_states(),
        Termination::ZeroTail => 1,
    };
    let per_sigma = (0..sigmas as u32)
        .into_par_iter()
        .map(|s| collect_at(&trellis, s, dtilde, max_len))
        .collect();
    Ok(IeeSet {
        nu: spec.nu,
        dtilde,
        per_sigma,
    })
}

/// One element of a concatenation: an IEE or the zero self-loop.
#[derive(Clone, Copy, Debug)]
struct Piece {
    inputs: u128,
    len: usize,
    weight: usize,
}

/// Concatenation counts for one start state.
#[derive(Clone, Debug)]
struct SigmaClass {
    pieces: Vec<Piece>,
    /// cnt[w][l]: ordered concatenations with total weight w and length l.
    cnt: Vec<Vec<u128>>,
}

impl SigmaClass {
    fn new(iees: &[Iee], with_zero_loop: bool, wmax: usize, lmax: usize) -> Self {
        let mut pieces: Vec<Piece> = Vec::new();
        if with_zero_loop {
            pieces.push(Piece {
                inputs: 0,
                len: 1,
                weight: 0,
            });
        }
        pieces.extend(
            iees.iter()
                .filter(|e| (e.weight as usize) <= wmax && (e.len as usize) <= lmax)
                .map(|e| Piece {
                    inputs: e.inputs,
                    len: e.len as usize,
                    weight: e.weight as usize,
                }),
        );
        let mut cnt = vec![vec![0u128; lmax + 1]; wmax + 1];
        cnt[0][0] = 1;
        for l in 1..=lmax {
            for w in 0..=wmax {
                let mut c = 0u128;
                for p in &pieces {
                    if p.len <= l && p.weight <= w {
                        c = c.saturating_add(cnt[w - p.weight][l - p.len]);
                    }
                }
                cnt[w][l] = c;
            }
        }
        SigmaClass { pieces, cnt }
    }

    fn count(&self, w: usize, l: usize) -> u128 {
        self.cnt[w][l]
    }

    /// Enumerates concatenations of weight `w` and length `l`, reporting
    /// (word, length of the first piece).
    fn enumerate(&self, w: usize, l: usize, f: &mut dyn FnMut(u128, usize)) {
        if self.count(w, l) == 0 {
            return;
        }
        self.rec(w, l, 0, 0, 0, f);
    }

    fn rec(
        &self,
        w: usize,
        l: usize,
        pos: usize,
        word: u128,
        first: usize,
        f: &mut dyn FnMut(u128, usize),
    ) {
        if l == 0 {
            f(word, first);
            return;
        }
        for p in &self.pieces {
            if p.weight > w || p.len > l || self.cnt[w - p.weight][l - p.len] == 0 {
                continue;
            }
            let first = if pos == 0 { p.len } else { first };
            self.rec(
                w - p.weight,
                l - p.len,
                pos + p.len,
                word | (p.inputs << pos),
                first,
                f,
            );
        }
    }
}

/// Low-weight codewords of a terminated code, rebuilt from its IEEs.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    mode: Termination,
    /// Trellis length N (k+m+ν for ZT, k+m for TB).
    trellis_len: usize,
    /// Bits of v, k+m.
    info_len: usize,
    dtilde: u32,
    classes: Vec<SigmaClass>,
}

impl Reconstruction {
    /// Prepares the reconstruction of `spec` from IEEs.
    ///
    /// The IEE set must be complete to weight d̃−1; the result covers weights
    /// below `dtilde.min(iees.dtilde)`.
    pub fn new(spec: &CodeSpec, iees: &IeeSet, dtilde: u32) -> Result<Self> {
        let trellis_len = spec.trellis_len();
        if trellis_len > MAX_WORD_LEN {
            return Err(Error::InvalidCode(format!(
                "trellis length {trellis_len} exceeds {MAX_WORD_LEN}"
            )));
        }
        if iees.nu != spec.nu {
            return Err(Error::InvalidArgument(
                "IEE set belongs to a different code".into(),
            ));
        }
        let dtilde = dtilde.min(iees.dtilde).max(1);
        let wmax = dtilde as usize - 1;
        let sigmas = match spec.mode {
            Termination::TailBiting => iees.per_sigma.len(),
            Termination::ZeroTail => 1,
        };
        if iees.per_sigma.len() < sigmas {
            return Err(Error::InvalidArgument(
                "IEE set lacks nonzero start states".into(),
            ));
        }
        let classes = (0..sigmas)
            .into_par_iter()
            .map(|s| SigmaClass::new(&iees.per_sigma[s], s == 0, wmax, trellis_len))
            .collect();
        Ok(Reconstruction {
            mode: spec.mode,
            trellis_len,
            info_len: spec.info_len(),
            dtilde,
            classes,
        })
    }

    pub fn dtilde(&self) -> u32 {
        self.dtilde
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    /// Number of codewords of weight d (0 < d < d̃).
    pub fn count(&self, d: u32) -> u128 {
        let d = d as usize;
        if d == 0 || d >= self.dtilde as usize {
            return 0;
        }
        let n = self.trellis_len;
        match self.mode {
            Termination::ZeroTail => self.classes[0].count(d, n),
            Termination::TailBiting => self
                .classes
                .iter()
                .map(|c| {
                    c.pieces
                        .iter()
                        .filter(|p| p.weight <= d && p.len <= n)
                        .map(|p| (p.len as u128) * c.count(d - p.weight, n - p.len))
                        .sum::<u128>()
                })
                .sum(),
        }
    }

    /// Calls `f` with the encoder-order input word v (k+m bits) of every
    /// codeword of weight d.
    pub fn for_each(&self, d: u32, f: &mut dyn FnMut(u128)) {
        let du = d as usize;
        if d == 0 || d >= self.dtilde {
            return;
        }
        let n = self.trellis_len;
        match self.mode {
            Termination::ZeroTail => {
                let mask = low_mask(self.info_len);
                self.classes[0].enumerate(du, n, &mut |w, _| f(w & mask));
            }
            Termination::TailBiting => {
                let mask = low_mask(n);
                for c in &self.classes {
                    c.enumerate(du, n, &mut |w, first| {
                        for r in 0..first {
                            let q = if r == 0 {
                                w
                            } else {
                                ((w >> r) | (w << (n - r))) & mask
                            };
                            f(q);
                        }
                    });
                }
            }
        }
    }

    /// Input words of weight d, in enumeration order.
    pub fn words(&self, d: u32) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.count(d).min(1 << 26) as usize);
        self.for_each(d, &mut |w| out.push(w));
        out
    }

    /// Higher-rate spectrum B_d for d < d̃.
    pub fn higher_spectrum(&self) -> DistanceSpectrum {
        let counts = (0..self.dtilde).map(|d| self.count(d)).collect();
        DistanceSpectrum::new(counts, Flavor::Higher)
    }

    /// Lower-rate spectrum C_d for d < d̃ under `scheme`.
    pub fn lower_spectrum(&self, scheme: &CrcScheme) -> DistanceSpectrum {
        let table = CrcTable::new(scheme);
        let n = self.info_len;
        let counts = (0..self.dtilde)
            .into_par_iter()
            .map(|d| {
                let mut c = 0u128;
                self.for_each(d, &mut |w| {
                    if table.divides_reversed(w, n) {
                        c += 1;
                    }
                });
                c
            })
            .collect();
        DistanceSpectrum::new(counts, Flavor::Lower)
    }
}

fn low_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Materialized TB (or ZT) path lists per distance.
#[derive(Clone, Debug, PartialEq)]
pub struct TbpSet {
    /// Trellis length N.
    pub len: usize,
    /// Bits of v carried by each word.
    pub info_len: usize,
    /// `per_distance[d]` holds the input words of weight-d paths.
    pub per_distance: Vec<Vec<u128>>,
}

impl TbpSet {
    /// State sequence of a TB path given by its input word.
    pub fn tb_states(&self, trellis: &Trellis, word: u128) -> Vec<u32> {
        let nu = trellis.nu();
        let n = self.len;
        let mut s = (0..nu).fold(0u32, |s, i| s | (((word >> (n - 1 - i)) & 1) as u32) << i);
        let mut out = vec![s];
        for t in 0..n {
            s = trellis.next_state(s, ((word >> t) & 1) as u8);
            out.push(s);
        }
        out
    }
}

fn materialize(rec: &Reconstruction) -> TbpSet {
    TbpSet {
        len: rec.trellis_len,
        info_len: rec.info_len,
        per_distance: (0..rec.dtilde).map(|d| rec.words(d)).collect(),
    }
}

/// All TB paths of length N and weight < d̃ rebuilt by concatenation and rotation.
pub fn reconstruct_tbps(spec: &CodeSpec, iees: &IeeSet, dtilde: u32) -> Result<TbpSet> {
    if spec.mode != Termination::TailBiting {
        return Err(Error::InvalidArgument(
            "reconstruct_tbps needs a TB code".into(),
        ));
    }
    Ok(materialize(&Reconstruction::new(spec, iees, dtilde)?))
}

/// All ZT codewords of weight < d̃ rebuilt by concatenation at the zero state.
pub fn reconstruct_ztps(spec: &CodeSpec, iees: &IeeSet, dtilde: u32) -> Result<TbpSet> {
    if spec.mode != Termination::ZeroTail {
        return Err(Error::InvalidArgument(
            "reconstruct_ztps needs a ZT code".into(),
        ));
    }
    Ok(materialize(&Reconstruction::new(spec, iees, dtilde)?))
}

/// Higher-rate (B_d) or lower-rate (C_d) spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Higher,
    Lower,
}

/// Codeword counts by Hamming weight, valid for d < d̃.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    /// `counts[d]` for 0 ≤ d < d̃; `counts[0]` is always 0 (the zero word is excluded).
    pub counts: Vec<u128>,
    pub flavor: Flavor,
}

impl DistanceSpectrum {
    pub fn new(mut counts: Vec<u128>, flavor: Flavor) -> Self {
        if let Some(c) = counts.first_mut() {
            *c = 0;
        }
        DistanceSpectrum { counts, flavor }
    }

    /// Truncation distance d̃.
    pub fn dtilde(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn count(&self, d: u32) -> u128 {
        self.counts.get(d as usize).copied().unwrap_or(0)
    }

    /// First nonzero weight, if any below d̃.
    pub fn dmin(&self) -> Option<u32> {
        self.counts.iter().position(|&c| c > 0).map(|d| d as u32)
    }

    /// (d, count) pairs with nonzero count.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u128)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(d, &c)| (d as u32, c))
    }
}

/// Spectrum through IEE reconstruction: B_d with no CRC, C_d with one.
pub fn distance_spectrum(
    spec: &CodeSpec,
    scheme: Option<&CrcScheme>,
    dtilde: u32,
) -> Result<DistanceSpectrum> {
    let iees = collect_iees(spec, dtilde, spec.trellis_len())?;
    let rec = Reconstruction::new(spec, &iees, dtilde)?;
    Ok(match scheme {
        None => rec.higher_spectrum(),
        Some(s) => rec.lower_spectrum(s),
    })
}

/// Spectrum by dynamic programming over (encoder state, CRC remainder).
///
/// Counts only; independent of the IEE machinery and cheap enough for large
/// d̃ on small ν and m. With `scheme = None` it returns B_d.
pub fn spectrum_dp(
    spec: &CodeSpec,
    scheme: Option<&CrcScheme>,
    dtilde: u32,
) -> Result<DistanceSpectrum> {
    let trellis = stationary_trellis(spec)?;
    let trivial = CrcScheme::trivial();
    let scheme = scheme.unwrap_or(&trivial);
    let m = scheme.degree();
    if m > 20 {
        return Err(Error::InvalidArgument(
            "spectrum_dp supports m <= 20".into(),
        ));
    }
    let p = scheme.value();
    let (ns, nr, nw) = (trellis.num_states(), 1usize << m, dtilde as usize);
    let info = spec.info_len();
    let idx = |s: usize, r: usize, w: usize| (s * nr + r) * nw + w;
    let run = |start: usize| -> Vec<u128> {
        let mut cur = vec![0u128; ns * nr * nw];
        cur[idx(start, 0, 0)] = 1;
        for t in 0..spec.trellis_len() {
            let mut nxt = vec![0u128; ns * nr * nw];
            let inputs: &[u8] = if t < info { &[0, 1] } else { &[0] };
            for s in 0..ns {
                for r in 0..nr {
                    let base = idx(s, r, 0);
                    if cur[base..base + nw].iter().all(|&c| c == 0) {
                        continue;
                    }
                    for &u in inputs {
                        let s2 = trellis.next_state(s as u32, u) as usize;
                        let dw = trellis.label(s as u32, u).count_ones() as usize;
                        let r2 = if t < info && m > 0 {
                            let mut r2 = ((r as u64) << 1) | u as u64;
                            if r2 & (1 << m) != 0 {
                                r2 ^= p;
                            }
                            r2 as usize
                        } else {
                            r
                        };
                        for w in 0..nw.saturating_sub(dw) {
                            let c = cur[base + w];
                            if c != 0 {
                                nxt[idx(s2, r2, w + dw)] += c;
                            }
                        }
                    }
                }
            }
            cur = nxt;
        }
        (0..nw).map(|w| cur[idx(start, 0, w)]).collect()
    };
    let counts = match spec.mode {
        Termination::ZeroTail => run(0),
        Termination::TailBiting => {
            let per: Vec<Vec<u128>> = (0..ns).into_par_iter().map(run).collect();
            (0..nw).map(|w| per.iter().map(|v| v[w]).sum()).collect()
        }
    };
    let flavor = if m == 0 {
        Flavor::Higher
    } else {
        Flavor::Lower
    };
    Ok(DistanceSpectrum::new(counts, flavor))
}

/// Upper bound 2w* on d_min^l over all degree-m CRCs, w* = min{w : Σ_{d≤w} B_d ≥ 2^m}.
pub fn wstar_bound(b: &DistanceSpectrum, m: usize) -> Result<u32> {
    let target = 1u128 << m;
    let mut acc = 0u128;
    for (d, &c) in b.counts.iter().enumerate() {
        acc = acc.saturating_add(c);
        if acc >= target {
            return Ok(2 * d as u32);
        }
    }
    Err(Error::Truncated(format!(
        "cumulative B_d reaches {acc} < 2^{m} below d = {}",
        b.dtilde()
    )))
}

/// B_d grown until the w* weight threshold is reached, and 2w*.
pub fn wstar_for(spec: &CodeSpec, m: usize) -> Result<(u32, DistanceSpectrum)> {
    let code = spec.with_m(m);
    let mut dt = 8;
    loop {
        let b = distance_spectrum(&code, None, dt)?;
        match wstar_bound(&b, m) {
            Ok(w) => return Ok((w, b)),
            Err(e) if dt >= 64 => return Err(e),
            Err(_) => dt *= 2,
        }
    }
}

/// All degree-m candidates with p₀ = p_m = 1, ascending.
pub fn crc_candidates(m: usize) -> Vec<u64> {
    if m == 0 {
        return vec![1];
    }
    (0..1u64 << (m - 1))
        .map(|i| (1 << m) | (i << 1) | 1)
        .collect()
}

/// One sieve step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditStep {
    pub d: u32,
    /// Codewords of the higher-rate code at this weight.
    pub paths: u128,
    /// Smallest number of divisible inputs among the candidates.
    pub min_count: u128,
    /// Candidates still standing after this distance.
    pub survivors: usize,
    /// Their hex values when there are at most 16.
    pub survivor_hex: Vec<String>,
}

/// Outcome of the sieve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveResult {
    pub crc_hex: String,
    pub m: usize,
    /// d_min of the winner's lower-rate code, if below d̃.
    pub dmin_l: Option<u32>,
    /// Winner's C_d at d_min^l.
    pub c_dmin: Option<u128>,
    pub dtilde: u32,
    /// Candidates at the start (2^{m−1}).
    pub candidates: usize,
    pub audit: Vec<AuditStep>,
    /// Ties persisted up to d̃−1; the smallest survivor was returned.
    pub inconclusive: bool,
}

impl SieveResult {
    pub fn scheme(&self) -> CrcScheme {
        gf2poly::parse_hex_crc(&self.crc_hex).expect("sieve returns a valid CRC")
    }
}

/// Sieve over all degree-m candidates, keeping those with the fewest divisible
/// inputs at each distance in turn.
pub fn sieve_dso(m: usize, rec: &Reconstruction) -> Result<SieveResult> {
    let cands = crc_candidates(m);
    let tables: Vec<CrcTable> = cands
        .iter()
        .map(|&p| CrcScheme::from_value(p).map(|s| CrcTable::new(&s)))
        .collect::<Result<_>>()?;
    let n = rec.info_len();
    let mut alive: Vec<usize> = (0..cands.len()).collect();
    let mut first_hit: Vec<Option<(u32, u128)>> = vec![None; cands.len()];
    let mut audit = Vec::new();
    let dtilde = rec.dtilde();
    let mut d = 1;
    while d < dtilde {
        let total = rec.count(d);
        if total > 0 {
            let words = rec.words(d);
            let counts: Vec<u128> = alive
                .par_iter()
                .map(|&c| {
                    let t = &tables[c];
                    words.iter().filter(|&&w| t.divides_reversed(w, n)).count() as u128
                })
                .collect();
            for (&c, &cnt) in alive.iter().zip(&counts) {
                if cnt > 0 && first_hit[c].is_none() {
                    first_hit[c] = Some((d, cnt));
                }
            }
            if alive.len() > 1 {
                let min = *counts.iter().min().unwrap();
                alive = alive
                    .iter()
                    .zip(&counts)
                    .filter(|(_, &cnt)| cnt == min)
                    .map(|(&c, _)| c)
                    .collect();
                audit.push(AuditStep {
                    d,
                    paths: total,
                    min_count: min,
                    survivors: alive.len(),
                    survivor_hex: if alive.len() <= 16 {
                        alive.iter().map(|&c| format!("0x{:X}", cands[c])).collect()
                    } else {
                        Vec::new()
                    },
                });
            }
        }
        if alive.len() == 1 && first_hit[alive[0]].is_some() {
            break;
        }
        d += 1;
    }
    let winner = alive[0];
    Ok(SieveResult {
        crc_hex: format!("0x{:X}", cands[winner]),
        m,
        dmin_l: first_hit[winner].map(|(d, _)| d),
        c_dmin: first_hit[winner].map(|(_, c)| c),
        dtilde,
        candidates: cands.len(),
        audit,
        inconclusive: alive.len() > 1,
    })
}

/// Sieve outcome plus the search parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsoResult {
    pub sieve: SieveResult,
    pub wstar2: u32,
    pub iee_count: usize,
}

/// Full DSO search for `spec` with CRC degree `spec.m`.
///
/// `dtilde = None` uses 2w*+1. A supplied IEE set is reused when it reaches
/// d̃; it must come from the same generators and mode.
pub fn dso_search(
    spec: &CodeSpec,
    dtilde: Option<u32>,
    cache: Option<&IeeSet>,
) -> Result<DsoResult> {
    let (wstar2, _) = wstar_for(spec, spec.m)?;
    let dt = dtilde.unwrap_or(wstar2 + 1);
    let owned;
    let iees = match cache {
        Some(c) if c.dtilde >= dt && c.nu == spec.nu => c,
        _ => {
            owned = collect_iees(spec, dt, MAX_WORD_LEN)?;
            &owned
        }
    };
    let rec = Reconstruction::new(spec, iees, dt)?;
    let sieve = sieve_dso(spec.m, &rec)?;
    Ok(DsoResult {
        sieve,
        wstar2,
        iee_count: iees.total(),
    })
}

/// Serializable IEE cache keyed by (generators, ν, mode, d̃).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IeeCache {
    pub version: u32,
    pub generators: Vec<String>,
    pub nu: usize,
    pub mode: Termination,
    pub dtilde: u32,
    /// Per σ: (inputs as hex, length, weight).
    pub iees: Vec<Vec<(String, u32, u32)>>,
}

pub const CACHE_VERSION: u32 = 1;

impl IeeCache {
    pub fn from_set(spec: &CodeSpec, set: &IeeSet) -> Self {
        IeeCache {
            version: CACHE_VERSION,
            generators: spec
                .generators
                .iter()
                .map(|g| gf2poly::to_octal_gen(g, GenOrder::LowFirst))
                .collect(),
            nu: set.nu,
            mode: spec.mode,
            dtilde: set.dtilde,
            iees: set
                .per_sigma
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|e| (format!("{:x}", e.inputs), e.len, e.weight))
                        .collect()
                })
                .collect(),
        }
    }

    /// Whether this cache serves `spec` at truncation `dtilde`.
    pub fn matches(&self, spec: &CodeSpec, dtilde: u32) -> bool {
        let gens: Vec<String> = spec
            .generators
            .iter()
            .map(|g| gf2poly::to_octal_gen(g, GenOrder::LowFirst))
            .collect();
        self.version == CACHE_VERSION
            && self.generators == gens
            && self.nu == spec.nu
            && self.mode == spec.mode
            && self.dtilde >= dtilde
    }

    pub fn to_set(&self) -> Result<IeeSet> {
        let per_sigma = self
            .iees
            .iter()
            .enumerate()
            .map(|(s, v)| {
                v.iter()
                    .map(|(h, len, w)| {
                        let inputs = u128::from_str_radix(h, 16).map_err(|e| {
                            Error::InvalidArgument(format!("bad cache word {h:?}: {e}"))
                        })?;
                        Ok(Iee {
                            sigma: s as u32,
                            inputs,
                            len: *len,
                            weight: *w,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IeeSet {
            nu: self.nu,
            dtilde: self.dtilde,
            per_sigma,
        })
    }
}
