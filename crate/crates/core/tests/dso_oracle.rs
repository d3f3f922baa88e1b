mod common;

use common::{codewords, crc_divides, weight_hist, OraclePath};
use crcconv::convcode::{CodeSpec, Termination};
use crcconv::dso::{
    collect_iees, crc_candidates, distance_spectrum, sieve_dso, spectrum_dp, wstar_bound,
    Reconstruction,
};
use crcconv::gf2poly::{poly_mod, CrcScheme, Gf2Poly};
use proptest::prelude::*;

fn code(k: usize, m: usize, nu: usize, gens: &[&str], mode: Termination) -> CodeSpec {
    CodeSpec::from_octal(k, m, nu, gens, mode).unwrap()
}

fn word(p: &OraclePath, len: usize) -> u128 {
    p.inputs[..len]
        .iter()
        .enumerate()
        .fold(0u128, |w, (i, &b)| w | (b as u128) << i)
}

/// Brute-force weight-d input words, restricted to the v part for ZT.
fn brute_words(spec: &CodeSpec, d: usize) -> Vec<u128> {
    let len = match spec.mode {
        Termination::ZeroTail => spec.info_len(),
        Termination::TailBiting => spec.trellis_len(),
    };
    let mut w: Vec<u128> = codewords(spec)
        .iter()
        .filter(|p| p.weight() == d)
        .map(|p| word(p, len))
        .collect();
    w.sort();
    w
}

fn gcd(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = poly_mod(&a, &b).unwrap();
        a = b;
        b = r;
    }
    a
}

fn brute_lower(spec: &CodeSpec, scheme: &CrcScheme) -> Vec<u128> {
    let info = spec.info_len();
    weight_hist(&codewords(spec), |p| crc_divides(&p.inputs, info, scheme))
}

#[test]
fn reconstructed_words_match_enumeration() {
    let cases = [
        code(7, 3, 3, &["13", "17"], Termination::TailBiting),
        code(9, 3, 3, &["13", "17"], Termination::TailBiting),
        code(12, 0, 3, &["13", "17"], Termination::TailBiting),
        code(8, 2, 4, &["23", "35"], Termination::TailBiting),
        code(6, 2, 2, &["5", "7", "7"], Termination::TailBiting),
        code(8, 3, 3, &["13", "17"], Termination::ZeroTail),
        code(10, 2, 4, &["23", "35"], Termination::ZeroTail),
    ];
    for spec in &cases {
        let dt = 14;
        let iees = collect_iees(spec, dt, spec.trellis_len()).unwrap();
        let rec = Reconstruction::new(spec, &iees, dt).unwrap();
        for d in 1..dt {
            let mut got = rec.words(d);
            got.sort();
            let want = brute_words(spec, d as usize);
            assert_eq!(got, want, "{:?} k={} m={} d={d}", spec.mode, spec.k, spec.m);
            assert_eq!(rec.count(d), want.len() as u128);
        }
    }
}

#[test]
fn lower_spectrum_matches_crc_filter() {
    for mode in [Termination::ZeroTail, Termination::TailBiting] {
        let spec = code(8, 4, 3, &["13", "17"], mode);
        for &p in &crc_candidates(4) {
            let scheme = CrcScheme::from_value(p).unwrap();
            let want = brute_lower(&spec, &scheme);
            let iee = distance_spectrum(&spec, Some(&scheme), 16).unwrap();
            let dp = spectrum_dp(&spec, Some(&scheme), 16).unwrap();
            for d in 1..16 {
                let w = want.get(d as usize).copied().unwrap_or(0);
                assert_eq!(iee.count(d), w, "{mode:?} 0x{p:X} d={d}");
                assert_eq!(dp.count(d), w, "{mode:?} 0x{p:X} d={d} (dp)");
            }
        }
    }
}

#[test]
fn dp_and_reconstruction_agree_at_full_length() {
    for mode in [Termination::ZeroTail, Termination::TailBiting] {
        let spec = code(64, 6, 3, &["13", "17"], mode);
        let scheme = CrcScheme::from_value(0x43).unwrap();
        for s in [None, Some(&scheme)] {
            let a = distance_spectrum(&spec, s, 15).unwrap();
            let b = spectrum_dp(&spec, s, 15).unwrap();
            assert_eq!(a, b, "{mode:?} crc={}", s.is_some());
        }
    }
}

/// The sieve winner is the lexicographic minimum of (C_1, C_2, …) over all candidates.
#[test]
fn sieve_picks_lexicographic_minimum() {
    for (mode, k, m) in [
        (Termination::ZeroTail, 8, 3),
        (Termination::ZeroTail, 7, 4),
        (Termination::TailBiting, 8, 3),
        (Termination::TailBiting, 8, 4),
        (Termination::TailBiting, 6, 5),
    ] {
        let spec = code(k, m, 3, &["13", "17"], mode);
        let dt = 14;
        let iees = collect_iees(&spec, dt, spec.trellis_len()).unwrap();
        let rec = Reconstruction::new(&spec, &iees, dt).unwrap();
        let res = sieve_dso(m, &rec).unwrap();
        let mut table: Vec<(Vec<u128>, u64)> = crc_candidates(m)
            .into_iter()
            .map(|p| {
                let mut h = brute_lower(&spec, &CrcScheme::from_value(p).unwrap());
                h.resize(dt as usize, 0);
                h.truncate(dt as usize);
                h[0] = 0;
                (h, p)
            })
            .collect();
        table.sort();
        let (best, p) = &table[0];
        let tied = table.iter().filter(|(h, _)| h == best).count();
        assert_eq!(res.inconclusive, tied > 1, "{mode:?} k={k} m={m}");
        assert_eq!(res.crc_hex, format!("0x{p:X}"), "{mode:?} k={k} m={m}");
        let dmin = best.iter().position(|&c| c > 0);
        assert_eq!(res.dmin_l, dmin.map(|d| d as u32));
        assert_eq!(res.c_dmin, dmin.map(|d| best[d]));
    }
}

/// No degree-m CRC pushes d_min^l past 2w*.
#[test]
fn wstar_bounds_every_candidate() {
    for mode in [Termination::ZeroTail, Termination::TailBiting] {
        for m in 2..=5 {
            let spec = code(7, m, 3, &["13", "17"], mode);
            let b = spectrum_dp(&spec, None, 30).unwrap();
            let w2 = wstar_bound(&b, m).unwrap();
            for p in crc_candidates(m) {
                let h = brute_lower(&spec, &CrcScheme::from_value(p).unwrap());
                let dmin = h
                    .iter()
                    .skip(1)
                    .position(|&c| c > 0)
                    .map(|d| d + 1)
                    .unwrap();
                assert!(dmin as u32 <= w2, "{mode:?} m={m} 0x{p:X}: {dmin} > {w2}");
            }
        }
    }
}

#[test]
fn candidate_set_shape() {
    for m in 1..=12 {
        let c = crc_candidates(m);
        assert_eq!(c.len(), 1 << (m - 1));
        assert!(c.iter().all(|&p| p & 1 == 1 && p >> m == 1));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_codes_reconstruct(
        nu in 2usize..=4,
        g1 in 0u64..16,
        g2 in 1u64..32,
        len in 6usize..=11,
        tb in any::<bool>(),
    ) {
        let top = 1u64 << nu;
        let a = Gf2Poly::from_u64(top | 1 | ((g1 << 1) & (top - 1)));
        let b = Gf2Poly::from_u64(g2 & ((top << 1) - 1));
        prop_assume!(!b.is_zero());
        prop_assume!(gcd(&a, &b).degree() == Some(0));
        let mode = if tb { Termination::TailBiting } else { Termination::ZeroTail };
        let spec = CodeSpec::new(len, 0, nu, vec![a, b], mode).unwrap();
        let dt = 10;
        let iees = collect_iees(&spec, dt, spec.trellis_len()).unwrap();
        let t = crcconv::convcode::Trellis::for_code(&spec).unwrap();
        for (s, v) in iees.per_sigma.iter().enumerate() {
            for e in v {
                let st = e.states(&t);
                prop_assert_eq!(st[0], s as u32);
                prop_assert_eq!(*st.last().unwrap(), s as u32);
                prop_assert!(st[1..st.len() - 1].iter().all(|&x| x > s as u32));
                prop_assert!(e.weight < dt);
            }
        }
        let rec = Reconstruction::new(&spec, &iees, dt).unwrap();
        let h = weight_hist(&codewords(&spec), |_| true);
        for d in 1..dt {
            prop_assert_eq!(rec.count(d), h.get(d as usize).copied().unwrap_or(0));
        }
    }
}
