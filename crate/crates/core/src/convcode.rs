//! Rate-1/ω feedforward convolutional codes, ZT/TB termination, trellis and BPSK.
//!
//! The encoder state is the last ν input bits with the most recent one in the
//! least-significant position. Feeding input u from state s forms the register
//! r = (s << 1) | u, whose bit j is the input j steps back; output i is the
//! parity of r AND gᵢ, and the next state is r masked to ν bits. The input
//! that led into a state is therefore its least-significant bit.

use crate::gf2poly::{self, CrcScheme, GenOrder, Gf2Poly};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest memory supported by the trellis code.
pub const MAX_NU: usize = 16;
/// Largest number of outputs per input bit.
pub const MAX_OMEGA: usize = 8;

/// Termination of the convolutional code into a block code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    /// Zero-terminated: ν zero inputs return the encoder to state 0.
    #[serde(rename = "ZT")]
    ZeroTail,
    /// Tail-biting: the encoder starts in the state it ends in.
    #[serde(rename = "TB")]
    TailBiting,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::ZeroTail => "ZT",
            Termination::TailBiting => "TB",
        }
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ZT" | "ZTCC" => Ok(Termination::ZeroTail),
            "TB" | "TBCC" => Ok(Termination::TailBiting),
            _ => Err(Error::InvalidCode(format!(
                "unknown termination {s:?} (want ZT or TB)"
            ))),
        }
    }
}

/// Parameters fully determining the CRC-aided convolutional code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    /// Message bits.
    pub k: usize,
    /// CRC degree.
    pub m: usize,
    /// Memory elements.
    pub nu: usize,
    /// Generators g₁…g_ω, each of degree ≤ ν.
    pub generators: Vec<Gf2Poly>,
    pub mode: Termination,
}

impl CodeSpec {
    pub fn new(
        k: usize,
        m: usize,
        nu: usize,
        generators: Vec<Gf2Poly>,
        mode: Termination,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCode("k must be at least 1".into()));
        }
        if nu == 0 || nu > MAX_NU {
            return Err(Error::InvalidCode(format!(
                "nu = {nu} outside 1..={MAX_NU}"
            )));
        }
        if generators.is_empty() || generators.len() > MAX_OMEGA {
            return Err(Error::InvalidCode(format!(
                "{} generators, want 1..={MAX_OMEGA}",
                generators.len()
            )));
        }
        for g in &generators {
            match g.degree() {
                None => return Err(Error::InvalidCode("zero generator".into())),
                Some(d) if d > nu => {
                    return Err(Error::InvalidCode(format!(
                        "generator {g} has degree {d} > nu = {nu}"
                    )))
                }
                _ => {}
            }
        }
        if !generators
            .iter()
            .any(|g| g.degree() == Some(nu) && g.coeff(0) == 1)
        {
            return Err(Error::InvalidCode(
                "no generator has degree nu and a nonzero constant term".into(),
            ));
        }
        if mode == Termination::TailBiting && k + m < nu {
            return Err(Error::InvalidCode("tail-biting needs k+m >= nu".into()));
        }
        Ok(CodeSpec {
            k,
            m,
            nu,
            generators,
            mode,
        })
    }

    /// Convenience constructor from octal strings in the default digit order.
    pub fn from_octal(
        k: usize,
        m: usize,
        nu: usize,
        gens: &[&str],
        mode: Termination,
    ) -> Result<Self> {
        let g = gens
            .iter()
            .map(|s| gf2poly::parse_octal_gen(s))
            .collect::<Result<Vec<_>>>()?;
        CodeSpec::new(k, m, nu, g, mode)
    }

    pub fn omega(&self) -> usize {
        self.generators.len()
    }

    /// Number of CRC-coded bits entering the encoder, k+m.
    pub fn info_len(&self) -> usize {
        self.k + self.m
    }

    /// Trellis sections: k+m+ν for ZT, k+m for TB.
    pub fn trellis_len(&self) -> usize {
        match self.mode {
            Termination::ZeroTail => self.k + self.m + self.nu,
            Termination::TailBiting => self.k + self.m,
        }
    }

    /// Blocklength n.
    pub fn n(&self) -> usize {
        self.omega() * self.trellis_len()
    }

    /// Same code with a different CRC degree.
    pub fn with_m(&self, m: usize) -> CodeSpec {
        CodeSpec { m, ..self.clone() }
    }

    /// Same code with a different message length.
    pub fn with_k(&self, k: usize) -> CodeSpec {
        CodeSpec { k, ..self.clone() }
    }

    pub fn generator_masks(&self) -> Vec<u32> {
        self.generators
            .iter()
            .map(|g| g.low_word() as u32)
            .collect()
    }
}

/// JSON form of a code: `{k, m, nu, omega, gens_octal, crc_hex, mode}`.
///
/// `gen_order` is optional and defaults to the lowest-first octal reading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeConfig {
    pub k: usize,
    pub m: usize,
    pub nu: usize,
    pub omega: usize,
    pub gens_octal: Vec<String>,
    pub crc_hex: String,
    pub mode: Termination,
    #[serde(default, skip_serializing_if = "is_default_order")]
    pub gen_order: GenOrder,
}

fn is_default_order(o: &GenOrder) -> bool {
    *o == GenOrder::LowFirst
}

impl CodeConfig {
    /// Validates the configuration and builds the code and its CRC.
    pub fn resolve(&self) -> Result<(CodeSpec, CrcScheme)> {
        if self.gens_octal.len() != self.omega {
            return Err(Error::InvalidCode(format!(
                "omega = {} but {} generators given",
                self.omega,
                self.gens_octal.len()
            )));
        }
        let gens = self
            .gens_octal
            .iter()
            .map(|s| gf2poly::parse_octal_gen_with(s, self.gen_order))
            .collect::<Result<Vec<_>>>()?;
        let crc = gf2poly::parse_hex_crc(&self.crc_hex)?;
        if crc.degree() != self.m {
            return Err(Error::InvalidCode(format!(
                "CRC {} has degree {} but m = {}",
                self.crc_hex,
                crc.degree(),
                self.m
            )));
        }
        let spec = CodeSpec::new(self.k, self.m, self.nu, gens, self.mode)?;
        Ok((spec, crc))
    }
}

/// One trellis edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: u32,
    pub input: u8,
    pub to: u32,
    /// Output bits packed LSB-first: bit i is the output of generator i.
    pub label: u16,
}

/// Stationary trellis section shared by every time step, plus the ZT tail rule.
#[derive(Clone, Debug)]
pub struct Trellis {
    nu: usize,
    omega: usize,
    sections: usize,
    /// Sections at and beyond this index only admit input 0.
    tail_start: usize,
    mode: Termination,
    /// Output label for register value r = (s << 1) | u.
    labels: Vec<u16>,
}

/// Builds the trellis of `spec` with `len` sections.
pub fn build_trellis(spec: &CodeSpec, len: usize) -> Result<Trellis> {
    if len == 0 {
        return Err(Error::InvalidCode(
            "trellis needs at least one section".into(),
        ));
    }
    if spec.nu > MAX_NU || spec.omega() > MAX_OMEGA {
        return Err(Error::InvalidCode("nu or omega out of range".into()));
    }
    let masks = spec.generator_masks();
    let regs = 1usize << (spec.nu + 1);
    let labels = (0..regs)
        .map(|r| {
            masks.iter().enumerate().fold(0u16, |acc, (i, &g)| {
                acc | ((((r as u32) & g).count_ones() & 1) as u16) << i
            })
        })
        .collect();
    let tail_start = match spec.mode {
        Termination::ZeroTail => len.saturating_sub(spec.nu),
        Termination::TailBiting => len,
    };
    Ok(Trellis {
        nu: spec.nu,
        omega: spec.omega(),
        sections: len,
        tail_start,
        mode: spec.mode,
        labels,
    })
}

impl Trellis {
    /// Trellis for the code's own block length.
    pub fn for_code(spec: &CodeSpec) -> Result<Trellis> {
        build_trellis(spec, spec.trellis_len())
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn num_states(&self) -> usize {
        1 << self.nu
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    pub fn mode(&self) -> Termination {
        self.mode
    }

    /// Number of sections whose input is free (k+m for a code-length trellis).
    pub fn info_sections(&self) -> usize {
        self.tail_start
    }

    #[inline]
    pub fn next_state(&self, s: u32, u: u8) -> u32 {
        ((s << 1) | u as u32) & ((1 << self.nu) - 1)
    }

    #[inline]
    pub fn label(&self, s: u32, u: u8) -> u16 {
        self.labels[((s << 1) | u as u32) as usize]
    }

    /// Whether input u is allowed in section t.
    #[inline]
    pub fn input_allowed(&self, t: usize, u: u8) -> bool {
        u == 0 || t < self.tail_start
    }

    /// The two predecessors of state s, lower index first. Both carry input s & 1.
    #[inline]
    pub fn predecessors(&self, s: u32) -> [u32; 2] {
        let p0 = s >> 1;
        [p0, p0 | (1 << (self.nu - 1))]
    }

    /// Edges of section t.
    pub fn edges(&self, t: usize) -> Vec<Edge> {
        let mut out = Vec::with_capacity(2 * self.num_states());
        for s in 0..self.num_states() as u32 {
            for u in 0..2u8 {
                if self.input_allowed(t, u) {
                    out.push(Edge {
                        from: s,
                        input: u,
                        to: self.next_state(s, u),
                        label: self.label(s, u),
                    });
                }
            }
        }
        out
    }
}

/// Convolutional encoding of the (k+m)-bit sequence v.
pub fn encode(spec: &CodeSpec, v: &[u8]) -> Result<Vec<u8>> {
    if v.len() != spec.info_len() {
        return Err(Error::LengthMismatch {
            expected: spec.info_len(),
            got: v.len(),
        });
    }
    let trellis = Trellis::for_code(spec)?;
    let mut inputs = v.to_vec();
    let start = match spec.mode {
        Termination::ZeroTail => {
            inputs.extend(std::iter::repeat_n(0, spec.nu));
            0
        }
        Termination::TailBiting => tb_start_state(v, spec.nu),
    };
    Ok(encode_path(&trellis, start, &inputs).0)
}

/// Initial TB state: the last ν bits of v, the final bit in the LSB.
pub fn tb_start_state(v: &[u8], nu: usize) -> u32 {
    let n = v.len();
    (0..nu.min(n)).fold(0u32, |s, i| s | ((v[n - 1 - i] & 1) as u32) << i)
}

/// Runs the trellis from `start` on `inputs`; returns (codeword bits, end state).
pub fn encode_path(trellis: &Trellis, start: u32, inputs: &[u8]) -> (Vec<u8>, u32) {
    let w = trellis.omega();
    let mut c = Vec::with_capacity(inputs.len() * w);
    let mut s = start;
    for &u in inputs {
        let l = trellis.label(s, u & 1);
        c.extend((0..w).map(|i| ((l >> i) & 1) as u8));
        s = trellis.next_state(s, u & 1);
    }
    (c, s)
}

/// BPSK mapping xᵢ = (1 − 2cᵢ)A.
pub fn modulate(c: &[u8], amplitude: f64) -> Vec<f64> {
    c.iter()
        .map(|&b| if b & 1 == 0 { amplitude } else { -amplitude })
        .collect()
}

/// Amplitude A = √γ_s for an SNR in dB.
pub fn amplitude_from_db(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 20.0)
}
