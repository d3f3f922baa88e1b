//! Polynomials over GF(2), CRC encoding and the hex/octal string formats.
//!
//! A CRC polynomial is written in hexadecimal with coefficients from the
//! highest to the lowest order, so `0xD` is x³+x²+1. A convolutional generator
//! is written in octal with coefficients from the lowest to the highest order,
//! so `13` is 1+x²+x³.
//!
//! Message and codeword bit sequences are `&[u8]` slices holding 0/1 values,
//! index i being the coefficient of xⁱ.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A binary polynomial. Bit i of the word vector is the coefficient of xⁱ.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly::from_u64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        let mut p = Gf2Poly { words: vec![v] };
        p.normalize();
        p
    }

    pub fn from_u128(v: u128) -> Self {
        let mut p = Gf2Poly {
            words: vec![v as u64, (v >> 64) as u64],
        };
        p.normalize();
        p
    }

    /// Builds a polynomial from 0/1 coefficients, lowest degree first.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut p = Gf2Poly { words };
        p.normalize();
        p
    }

    /// Monomial xⁱ.
    pub fn monomial(i: usize) -> Self {
        let mut words = vec![0u64; i / 64 + 1];
        words[i / 64] = 1 << (i % 64);
        Gf2Poly { words }
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.words
            .get(i / 64)
            .map_or(0, |w| ((w >> (i % 64)) & 1) as u8)
    }

    /// Coefficients lowest degree first; the zero polynomial yields an empty vector.
    pub fn coeffs(&self) -> Vec<u8> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i)).collect(),
        }
    }

    /// Low 64 coefficients as a machine word.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let len = self.words.len().max(other.words.len());
        let mut words = vec![0u64; len];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        let mut p = Gf2Poly { words };
        p.normalize();
        p
    }

    /// Multiplication by xᵏ.
    pub fn shl(&self, k: usize) -> Gf2Poly {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] |= w << bs;
            if bs > 0 {
                words[i + ws + 1] |= w >> (64 - bs);
            }
        }
        let mut p = Gf2Poly { words };
        p.normalize();
        p
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        let mut acc = Gf2Poly::zero();
        if let Some(d) = other.degree() {
            for i in 0..=d {
                if other.coeff(i) == 1 {
                    acc = acc.add(&self.shl(i));
                }
            }
        }
        acc
    }

    /// Reversal at a fixed length: xˡ⁻¹·a(x⁻¹) for a polynomial of degree < l.
    pub fn reverse(&self, len: usize) -> Gf2Poly {
        let bits: Vec<u8> = (0..len).map(|i| self.coeff(len - 1 - i)).collect();
        Gf2Poly::from_bits(&bits)
    }

    /// Hex string with coefficients written from the highest order down.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0".into();
        }
        let mut s = String::new();
        for (i, w) in self.words.iter().rev().enumerate() {
            if i == 0 {
                s.push_str(&format!("{w:X}"));
            } else {
                s.push_str(&format!("{w:016X}"));
            }
        }
        format!("0x{s}")
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({})", self.to_hex())
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let mut terms = Vec::new();
        for i in (0..=d).rev() {
            if self.coeff(i) == 1 {
                terms.push(match i {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{i}"),
                });
            }
        }
        write!(f, "{}", terms.join("+"))
    }
}

/// a mod b over GF(2).
pub fn poly_mod(a: &Gf2Poly, b: &Gf2Poly) -> Result<Gf2Poly> {
    let db = b.degree().ok_or(Error::DivisionByZero)?;
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        r = r.add(&b.shl(dr - db));
    }
    Ok(r)
}

/// A CRC generator p(x) = 1 + p₁x + … + xᵐ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrcScheme {
    poly: Gf2Poly,
    m: usize,
}

/// Largest CRC degree supported by the word-level checks.
pub const MAX_CRC_DEGREE: usize = 63;

impl CrcScheme {
    pub fn new(poly: Gf2Poly) -> Result<Self> {
        let m = poly
            .degree()
            .ok_or_else(|| Error::InvalidPolynomial("zero CRC polynomial".into()))?;
        if poly.coeff(0) != 1 {
            return Err(Error::InvalidPolynomial(format!(
                "CRC polynomial {} has zero constant term",
                poly.to_hex()
            )));
        }
        if m > MAX_CRC_DEGREE {
            return Err(Error::InvalidPolynomial(format!(
                "CRC degree {m} exceeds {MAX_CRC_DEGREE}"
            )));
        }
        Ok(CrcScheme { poly, m })
    }

    /// The trivial CRC p(x) = 1 (m = 0).
    pub fn trivial() -> Self {
        CrcScheme {
            poly: Gf2Poly::one(),
            m: 0,
        }
    }

    pub fn from_value(v: u64) -> Result<Self> {
        CrcScheme::new(Gf2Poly::from_u64(v))
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Coefficient vector as an integer, bit i = pᵢ.
    pub fn value(&self) -> u64 {
        self.poly.low_word()
    }

    pub fn to_hex(&self) -> String {
        self.poly.to_hex()
    }

    /// Remainder of a polynomial given as 0/1 coefficients (lowest first).
    fn remainder_bits(&self, bits: &[u8]) -> u64 {
        if self.m == 0 {
            return 0;
        }
        let p = self.value();
        let top = 1u64 << self.m;
        let mut r = 0u64;
        for &b in bits.iter().rev() {
            r = (r << 1) | (b & 1) as u64;
            if r & top != 0 {
                r ^= p;
            }
        }
        r
    }
}

/// Word-level divisibility test for sequences packed in a `u128`.
///
/// Holds xʲ mod p(x) for j < 128, so the remainder of any polynomial is the
/// XOR of the entries at its set bits.
#[derive(Clone, Debug)]
pub struct CrcTable {
    pow: Vec<u64>,
}

impl CrcTable {
    pub fn new(scheme: &CrcScheme) -> Self {
        let m = scheme.degree();
        let p = scheme.value();
        let mut pow = Vec::with_capacity(128);
        let mut r: u64 = if m == 0 { 0 } else { 1 };
        for _ in 0..128 {
            pow.push(r);
            if m > 0 {
                r <<= 1;
                if r & (1 << m) != 0 {
                    r ^= p;
                }
            }
        }
        CrcTable { pow }
    }

    /// Remainder of the polynomial whose coefficient of xʲ is bit j of `word`.
    #[inline]
    pub fn remainder(&self, mut word: u128) -> u64 {
        let mut r = 0;
        while word != 0 {
            let j = word.trailing_zeros() as usize;
            r ^= self.pow[j];
            word &= word - 1;
        }
        r
    }

    /// Divisibility of v*(x) for an encoder-order input word of length `len`:
    /// bit t of `v` is vₜ, the t-th bit entering the encoder, and v*(x) is its
    /// reversal.
    #[inline]
    pub fn divides_reversed(&self, mut v: u128, len: usize) -> bool {
        let mut r = 0;
        while v != 0 {
            let t = v.trailing_zeros() as usize;
            r ^= self.pow[len - 1 - t];
            v &= v - 1;
        }
        r == 0
    }
}

/// Parses a CRC polynomial in the hex format (`0x` prefix optional).
pub fn parse_hex_crc(hex: &str) -> Result<CrcScheme> {
    let s = hex.trim();
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    if digits.is_empty() {
        return Err(Error::InvalidPolynomial(format!(
            "empty hex string {hex:?}"
        )));
    }
    let v = u64::from_str_radix(digits, 16)
        .map_err(|e| Error::InvalidPolynomial(format!("bad hex {hex:?}: {e}")))?;
    if v == 0 {
        return Err(Error::InvalidPolynomial("zero CRC polynomial".into()));
    }
    CrcScheme::new(Gf2Poly::from_u64(v))
}

/// How octal generator digits map onto polynomial coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenOrder {
    /// The leftmost nonzero bit is the coefficient of x⁰: `13` is 1+x²+x³.
    #[default]
    LowFirst,
    /// The leftmost nonzero bit is the highest-order coefficient: `13` is x³+x+1.
    HighFirst,
}

/// Parses an octal generator with the default lowest-to-highest order.
pub fn parse_octal_gen(octal: &str) -> Result<Gf2Poly> {
    parse_octal_gen_with(octal, GenOrder::LowFirst)
}

pub fn parse_octal_gen_with(octal: &str, order: GenOrder) -> Result<Gf2Poly> {
    let s = octal.trim();
    if s.is_empty() {
        return Err(Error::InvalidPolynomial("empty octal string".into()));
    }
    let mut bits: Vec<u8> = Vec::with_capacity(3 * s.len());
    for ch in s.chars() {
        let d = ch.to_digit(8).ok_or_else(|| {
            Error::InvalidPolynomial(format!("non-octal digit {ch:?} in {octal:?}"))
        })?;
        bits.extend([(d >> 2) & 1, (d >> 1) & 1, d & 1].map(|b| b as u8));
    }
    let first = bits
        .iter()
        .position(|&b| b == 1)
        .ok_or_else(|| Error::InvalidPolynomial(format!("zero generator {octal:?}")))?;
    let mut bits = bits.split_off(first);
    if order == GenOrder::HighFirst {
        bits.reverse();
    }
    Ok(Gf2Poly::from_bits(&bits))
}

/// Octal string of a generator, inverse of [`parse_octal_gen_with`].
pub fn to_octal_gen(g: &Gf2Poly, order: GenOrder) -> String {
    let mut bits = g.coeffs();
    if order == GenOrder::HighFirst {
        bits.reverse();
    }
    let pad = (3 - bits.len() % 3) % 3;
    let mut padded = vec![0u8; pad];
    padded.extend(bits);
    padded
        .chunks(3)
        .map(|c| char::from(b'0' + (c[0] << 2 | c[1] << 1 | c[2])))
        .collect()
}

/// Reversal of a bit sequence at its own length.
pub fn reverse_bits(bits: &[u8]) -> Vec<u8> {
    bits.iter().rev().copied().collect()
}

/// CRC encoding of a k-bit message u (uᵢ = coefficient of xⁱ).
///
/// Returns the (k+m)-bit sequence v in encoder order: v(x) = x^{k+m−1}v*(x⁻¹)
/// where v*(x) = xᵐu(x) + (xᵐu(x) mod p(x)). The first bit v₀ is u_{k−1}.
pub fn crc_encode(u: &[u8], scheme: &CrcScheme) -> Vec<u8> {
    let m = scheme.degree();
    let mut vstar = vec![0u8; m];
    vstar.extend(u.iter().map(|b| b & 1));
    let r = scheme.remainder_bits(&vstar);
    for (i, b) in vstar.iter_mut().enumerate().take(m) {
        *b = ((r >> i) & 1) as u8;
    }
    reverse_bits(&vstar)
}

/// True iff p(x) divides v*(x), given as 0/1 coefficients lowest first.
pub fn crc_check(vstar: &[u8], scheme: &CrcScheme) -> bool {
    scheme.remainder_bits(vstar) == 0
}

/// Recovers the message from a v*(x) that passed the check: uᵢ = v*_{m+i}.
pub fn message_from_vstar(vstar: &[u8], scheme: &CrcScheme) -> Vec<u8> {
    vstar[scheme.degree()..].to_vec()
}
