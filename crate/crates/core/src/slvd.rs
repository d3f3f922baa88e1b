//! Serial list Viterbi decoding (SLVD) over ZT and TB trellises.
//!
//! The path metric is the squared Euclidean distance ‖y − x‖², minimized.
//!
//! A forward add-compare-select pass stores, for every time t and state s, the
//! survivor metric, which predecessor survived, and the metric difference Δ
//! between the discarded and the surviving predecessor. Every trellis path is
//! then a terminal state plus a set of detours: going backward from the end,
//! the path follows survivors except at its detour times, where it takes the
//! discarded predecessor. A path whose latest-in-traceback-order detour is at
//! time τ spawns children with one more detour at each t < τ, each costing
//! its parent's metric plus Δ(t, sₜ). Extracting from a priority queue keyed on
//! that cost yields paths in nondecreasing metric order.
//!
//! For TB codes one superimposed pass starts every state at metric 0. The
//! best terminal state seeds the list and the other 2^ν − 1 terminal states
//! enter the queue as alternatives. Extracted paths that are not tail-biting
//! still consume list rank.
//!
//! Ties: an ACS tie keeps the lower-index predecessor, equal terminal metrics
//! prefer the lower state, and queue entries with equal cost leave in
//! insertion order.

use crate::convcode::{Termination, Trellis};
use crate::gf2poly::{crc_check, reverse_bits, CrcScheme};
use crate::{Error, Result};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Survivor structure of the forward pass.
#[derive(Clone, Debug)]
pub struct ForwardPass {
    sections: usize,
    states: usize,
    metrics: Vec<f64>,
    survivor: Vec<u8>,
    delta: Vec<f64>,
}

impl ForwardPass {
    /// Survivor metric of state s at time t (0 ≤ t ≤ T).
    pub fn metric(&self, t: usize, s: u32) -> f64 {
        self.metrics[t * self.states + s as usize]
    }

    pub fn terminal_metrics(&self) -> &[f64] {
        &self.metrics[self.sections * self.states..]
    }

    /// Lowest terminal metric and its state (lowest index on ties).
    pub fn best_terminal(&self) -> (u32, f64) {
        let mut best = (0u32, f64::INFINITY);
        for (s, &m) in self.terminal_metrics().iter().enumerate() {
            if m < best.1 {
                best = (s as u32, m);
            }
        }
        best
    }

    /// Metric penalty of entering (t, s) through the discarded predecessor.
    pub fn delta(&self, t: usize, s: u32) -> f64 {
        self.delta[(t - 1) * self.states + s as usize]
    }
}

/// Per-section branch metrics for every output label.
fn branch_metrics(y: &[f64], omega: usize, amplitude: f64) -> Vec<f64> {
    let labels = 1usize << omega;
    let sections = y.len() / omega;
    let mut out = vec![0.0; sections * labels];
    for t in 0..sections {
        let ys = &y[t * omega..(t + 1) * omega];
        for l in 0..labels {
            out[t * labels + l] = ys
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let x = if (l >> j) & 1 == 0 {
                        amplitude
                    } else {
                        -amplitude
                    };
                    (v - x) * (v - x)
                })
                .sum();
        }
    }
    out
}

/// Forward ACS pass. ZT starts from state 0 only; TB starts every state at 0.
pub fn viterbi_forward(trellis: &Trellis, y: &[f64], amplitude: f64) -> Result<ForwardPass> {
    let sections = trellis.sections();
    let omega = trellis.omega();
    if y.len() != sections * omega {
        return Err(Error::LengthMismatch {
            expected: sections * omega,
            got: y.len(),
        });
    }
    let states = trellis.num_states();
    let labels = 1usize << omega;
    let bm = branch_metrics(y, omega, amplitude);
    let mut metrics = vec![f64::INFINITY; (sections + 1) * states];
    match trellis.mode() {
        Termination::ZeroTail => metrics[0] = 0.0,
        Termination::TailBiting => metrics[..states].fill(0.0),
    }
    let mut survivor = vec![0u8; sections * states];
    let mut delta = vec![f64::INFINITY; sections * states];
    for t in 0..sections {
        let (prev, next) = metrics[t * states..(t + 2) * states].split_at_mut(states);
        let bmt = &bm[t * labels..(t + 1) * labels];
        for s in 0..states as u32 {
            let u = (s & 1) as u8;
            let idx = t * states + s as usize;
            if !trellis.input_allowed(t, u) {
                continue;
            }
            let [p0, p1] = trellis.predecessors(s);
            let c0 = prev[p0 as usize] + bmt[trellis.label(p0, u) as usize];
            let c1 = prev[p1 as usize] + bmt[trellis.label(p1, u) as usize];
            let (best, alt, which) = if c1 < c0 { (c1, c0, 1) } else { (c0, c1, 0) };
            next[s as usize] = best;
            survivor[idx] = which;
            delta[idx] = if alt.is_finite() {
                alt - best
            } else {
                f64::INFINITY
            };
        }
    }
    Ok(ForwardPass {
        sections,
        states,
        metrics,
        survivor,
        delta,
    })
}

/// One extracted trellis path.
#[derive(Clone, Debug, PartialEq)]
pub struct ListPath {
    pub start_state: u32,
    pub end_state: u32,
    /// Input bit of every section, including a ZT tail.
    pub inputs: Vec<u8>,
    pub metric: f64,
}

impl ListPath {
    pub fn is_tail_biting(&self) -> bool {
        self.start_state == self.end_state
    }
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: u32,
    /// Detour time in 1..=T, or T+1 for a terminal-state entry.
    time: u32,
    state: u32,
    cost: f64,
}

#[derive(Clone, Copy, Debug)]
struct Key {
    cost: f64,
    seq: u64,
    node: u32,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Stream of trellis paths in nondecreasing metric order.
pub struct ListDecoder<'a> {
    trellis: &'a Trellis,
    fp: ForwardPass,
    nodes: Vec<Node>,
    heap: BinaryHeap<Reverse<Key>>,
    seq: u64,
    pending: Option<(u32, Vec<u32>)>,
    insertions: u64,
    tracebacks: u64,
}

impl<'a> ListDecoder<'a> {
    pub fn new(trellis: &'a Trellis, y: &[f64], amplitude: f64) -> Result<Self> {
        let fp = viterbi_forward(trellis, y, amplitude)?;
        let mut dec = ListDecoder {
            trellis,
            fp,
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            pending: None,
            insertions: 0,
            tracebacks: 0,
        };
        let t_end = trellis.sections() as u32 + 1;
        match trellis.mode() {
            Termination::ZeroTail => {
                let m = dec.fp.metric(trellis.sections(), 0);
                if m.is_finite() {
                    dec.push(NO_PARENT, t_end, 0, m);
                }
            }
            Termination::TailBiting => {
                let (best, m) = dec.fp.best_terminal();
                dec.push(NO_PARENT, t_end, best, m);
                for s in 0..trellis.num_states() as u32 {
                    let ms = dec.fp.metric(trellis.sections(), s);
                    if s != best && ms.is_finite() {
                        dec.push(NO_PARENT, t_end, s, ms);
                        dec.insertions += 1;
                    }
                }
            }
        }
        Ok(dec)
    }

    pub fn forward(&self) -> &ForwardPass {
        &self.fp
    }

    /// Entries inserted into the detour queue so far.
    pub fn insertions(&self) -> u64 {
        self.insertions
    }

    /// Paths traced back so far.
    pub fn tracebacks(&self) -> u64 {
        self.tracebacks
    }

    fn push(&mut self, parent: u32, time: u32, state: u32, cost: f64) {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            parent,
            time,
            state,
            cost,
        });
        self.heap.push(Reverse(Key {
            cost,
            seq: self.seq,
            node: id,
        }));
        self.seq += 1;
    }

    fn expand(&mut self, id: u32, states: &[u32]) {
        let node = self.nodes[id as usize];
        let last = (node.time as usize).min(self.trellis.sections() + 1);
        for t in (1..last).rev() {
            let s = states[t];
            let d = self.fp.delta(t, s);
            if d.is_finite() {
                self.push(id, t as u32, s, node.cost + d);
                self.insertions += 1;
            }
        }
    }

    /// States s₀…s_T and inputs of the path described by node `id`.
    fn traceback(&mut self, id: u32) -> (Vec<u32>, Vec<u8>) {
        self.tracebacks += 1;
        let mut chain = Vec::new();
        let mut cur = id;
        while cur != NO_PARENT {
            let n = self.nodes[cur as usize];
            chain.push(n);
            cur = n.parent;
        }
        let root = chain.pop().expect("chain holds at least the node itself");
        let t_end = self.trellis.sections();
        let mut states = vec![0u32; t_end + 1];
        let mut inputs = vec![0u8; t_end];
        states[t_end] = root.state;
        for t in (1..=t_end).rev() {
            let s = states[t];
            let mut which = self.fp.survivor[(t - 1) * self.fp.states + s as usize];
            if chain.last().is_some_and(|n| n.time as usize == t) {
                which ^= 1;
                chain.pop();
            }
            states[t - 1] = self.trellis.predecessors(s)[which as usize];
            inputs[t - 1] = (s & 1) as u8;
        }
        (states, inputs)
    }
}

impl Iterator for ListDecoder<'_> {
    type Item = ListPath;

    fn next(&mut self) -> Option<ListPath> {
        if let Some((id, states)) = self.pending.take() {
            self.expand(id, &states);
        }
        let Reverse(key) = self.heap.pop()?;
        let (states, inputs) = self.traceback(key.node);
        let path = ListPath {
            start_state: states[0],
            end_state: *states.last().unwrap(),
            inputs,
            metric: key.cost,
        };
        self.pending = Some((key.node, states));
        Some(path)
    }
}

/// Ordered list of all trellis paths for a received word.
pub fn list_iterator<'a>(
    trellis: &'a Trellis,
    y: &[f64],
    amplitude: f64,
) -> Result<ListDecoder<'a>> {
    ListDecoder::new(trellis, y, amplitude)
}

/// Decoder outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// A candidate passed the CRC (and, for TB, is tail-biting).
    Decoded { message: Vec<u8>, metric: f64 },
    /// Ψ candidates were exhausted without a valid one.
    Nack,
}

/// Result of one SLVD run.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Terminating list rank L, or the number of candidates examined on NACK.
    pub list_rank: usize,
    /// Detour-queue insertions I.
    pub insertions: u64,
    pub tracebacks: u64,
}

impl DecodeResult {
    pub fn message(&self) -> Option<&[u8]> {
        match &self.outcome {
            Outcome::Decoded { message, .. } => Some(message),
            Outcome::Nack => None,
        }
    }

    pub fn is_nack(&self) -> bool {
        matches!(self.outcome, Outcome::Nack)
    }
}

/// Extracts the message from the encoder-order inputs of a path, if the CRC passes.
pub fn check_candidate(inputs: &[u8], info_len: usize, scheme: &CrcScheme) -> Option<Vec<u8>> {
    let vstar = reverse_bits(&inputs[..info_len]);
    crc_check(&vstar, scheme).then(|| vstar[scheme.degree()..].to_vec())
}

/// SLVD with maximum list size Ψ.
pub fn slvd_decode(
    trellis: &Trellis,
    scheme: &CrcScheme,
    y: &[f64],
    amplitude: f64,
    psi: usize,
) -> Result<DecodeResult> {
    if psi == 0 {
        return Err(Error::InvalidArgument(
            "list size must be at least 1".into(),
        ));
    }
    let info_len = trellis.info_sections();
    if info_len < scheme.degree() {
        return Err(Error::InvalidCode("trellis shorter than the CRC".into()));
    }
    let tb = trellis.mode() == Termination::TailBiting;
    let mut dec = ListDecoder::new(trellis, y, amplitude)?;
    let mut rank = 0;
    let mut outcome = Outcome::Nack;
    while rank < psi {
        let Some(path) = dec.next() else { break };
        rank += 1;
        if tb && !path.is_tail_biting() {
            continue;
        }
        if let Some(message) = check_candidate(&path.inputs, info_len, scheme) {
            outcome = Outcome::Decoded {
                message,
                metric: path.metric,
            };
            break;
        }
    }
    Ok(DecodeResult {
        outcome,
        list_rank: rank,
        insertions: dec.insertions(),
        tracebacks: dec.tracebacks(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convcode::{encode, modulate, CodeSpec};
    use crate::gf2poly::{crc_encode, parse_hex_crc};

    fn setup(mode: Termination) -> (CodeSpec, Trellis, CrcScheme) {
        let spec = CodeSpec::from_octal(6, 3, 3, &["13", "17"], mode).unwrap();
        let t = Trellis::for_code(&spec).unwrap();
        (spec, t, parse_hex_crc("0xB").unwrap())
    }

    #[test]
    fn noiseless_rank_one() {
        for mode in [Termination::ZeroTail, Termination::TailBiting] {
            let (spec, t, crc) = setup(mode);
            let u = [1, 0, 1, 1, 0, 1];
            let v = crc_encode(&u, &crc);
            let y = modulate(&encode(&spec, &v).unwrap(), 1.3);
            let r = slvd_decode(&t, &crc, &y, 1.3, 4).unwrap();
            assert_eq!(r.list_rank, 1);
            assert_eq!(r.message(), Some(&u[..]));
            match r.outcome {
                Outcome::Decoded { metric, .. } => assert!(metric.abs() < 1e-12),
                Outcome::Nack => panic!("unexpected NACK"),
            }
            let first = list_iterator(&t, &y, 1.3).unwrap().next().unwrap();
            assert_eq!(&first.inputs[..9], &v[..]);
        }
    }

    #[test]
    fn origin_metric_is_constant() {
        let (spec, t, _) = setup(Termination::ZeroTail);
        let y = vec![0.0; spec.n()];
        let fp = viterbi_forward(&t, &y, 2.0).unwrap();
        assert!((fp.metric(t.sections(), 0) - 4.0 * spec.n() as f64).abs() < 1e-9);
    }

    #[test]
    fn metrics_nondecreasing_and_exhaustive() {
        let (_, t, _) = setup(Termination::ZeroTail);
        let y: Vec<f64> = (0..t.sections() * 2)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let paths: Vec<_> = list_iterator(&t, &y, 1.0).unwrap().collect();
        assert_eq!(paths.len(), 1 << 9);
        assert!(paths.windows(2).all(|w| w[0].metric <= w[1].metric + 1e-12));
        let mut seen: Vec<_> = paths.iter().map(|p| p.inputs.clone()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 1 << 9);
    }

    #[test]
    fn psi_zero_rejected() {
        let (spec, t, crc) = setup(Termination::ZeroTail);
        assert!(slvd_decode(&t, &crc, &vec![0.0; spec.n()], 1.0, 0).is_err());
    }
}
