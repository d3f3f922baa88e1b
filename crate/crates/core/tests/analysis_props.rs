use crcconv::bounds::{
    crossover_db, e0_family, mc_bound, mutual_information, nack1, nn_pe1, psi, rcu_bound, tub,
    union_bound, union_sum,
};
use crcconv::complexity::{
    breakdown, c_list, c_ssv, c_trace, c_wava, ei_bound, C1_DEFAULT, C2_DEFAULT,
};
use crcconv::convcode::Termination;
use crcconv::dso::{DistanceSpectrum, Flavor};
use crcconv::listrank::{
    induced_density, integrate_rank_over_noise, noise_norm_density, onion_cond_rank,
    random_coding_rank, solid_angle_fraction, solve_alpha, sphere_area, OnionGeometry,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn gauss(y: f64, x: f64) -> f64 {
    (-(y - x) * (y - x) / 2.0).exp() / (2.0 * PI).sqrt()
}

/// Gallager's E₀ for BPSK, straight from its definition.
fn e0_direct(rho: f64, a: f64) -> f64 {
    let s = 1.0 / (1.0 + rho);
    let f = |y: f64| (0.5 * gauss(y, a).powf(s) + 0.5 * gauss(y, -a).powf(s)).powf(1.0 + rho);
    -simpson(f, -a - 14.0, a + 14.0, 40_000).ln()
}

fn spectrum(pairs: &[(usize, u128)], len: usize, flavor: Flavor) -> DistanceSpectrum {
    let mut c = vec![0u128; len];
    for &(d, n) in pairs {
        c[d] = n;
    }
    DistanceSpectrum::new(c, flavor)
}

fn amp(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[test]
fn psi_matches_integral_form() {
    // ψ(x) = e^{x²/2}·Q(x) = ∫₀^∞ e^{−xt − t²/2} dt / √(2π) for x ≥ 0.
    for x in [0.0, 0.3, 1.0, 2.5, 7.9, 8.0, 8.1, 15.0, 40.0] {
        let want =
            simpson(|t| (-x * t - t * t / 2.0).exp(), 0.0, 40.0, 400_000) / (2.0 * PI).sqrt();
        assert!(
            (psi(x) - want).abs() < 1e-10 * want.max(1e-3),
            "x={x}: {} vs {want}",
            psi(x)
        );
        assert_eq!(psi(-x), -psi(x) + if x == 0.0 { 1.0 } else { 0.0 });
    }
}

#[test]
fn e0_family_matches_definition() {
    for a in [0.3, 1.0, 2.0] {
        for rho in [0.0, 0.25, 1.0, 2.5] {
            let e = e0_family(rho, a).unwrap();
            let want = e0_direct(rho, a);
            assert!(
                (e.e0 - want).abs() < 1e-9,
                "A={a} rho={rho}: {} vs {want}",
                e.e0
            );
            let h = 1e-4;
            let (lo, hi) = (e0_direct((rho - h).max(0.0), a), e0_direct(rho + h, a));
            if rho > 0.0 {
                assert!((e.d1 - (hi - lo) / (2.0 * h)).abs() < 1e-6);
                assert!((e.d2 - (hi - 2.0 * want + lo) / (h * h)).abs() < 1e-3);
            }
            assert!(e.d2 < 0.0);
        }
        assert!(e0_family(0.0, a).unwrap().e0.abs() < 1e-12);
        let mi = mutual_information(a);
        assert!((e0_family(0.0, a).unwrap().d1 - mi).abs() < 1e-9);
        let direct = simpson(
            |y| {
                let (p, q) = (gauss(y, a), gauss(y, -a));
                let py = 0.5 * (p + q);
                0.5 * (p * (p / py).ln() + q * (q / py).ln())
            },
            -a - 14.0,
            a + 14.0,
            40_000,
        );
        assert!((mi - direct).abs() < 1e-10);
        assert!(mi > 0.0 && mi < std::f64::consts::LN_2);
    }
}

#[test]
fn saddlepoint_bounds_are_ordered_and_monotone() {
    let mut prev = (1.0, 1.0);
    for i in 0..=12 {
        let a = amp(i as f64 * 0.5);
        let mc = mc_bound(134, 64, a).unwrap();
        let rcu = rcu_bound(134, 64, a).unwrap();
        assert!(mc <= rcu, "{} dB", i as f64 * 0.5);
        assert!(mc <= prev.0 && rcu <= prev.1);
        prev = (mc, rcu);
    }
    // Above capacity the RCU approximation saturates.
    assert_eq!(rcu_bound(20, 19, amp(-5.0)).unwrap(), 1.0);
}

#[test]
fn union_family_relations() {
    let b = spectrum(
        &[(6, 36), (8, 211), (10, 1404), (12, 11633)],
        13,
        Flavor::Higher,
    );
    let c = spectrum(&[(10, 9), (12, 240)], 13, Flavor::Lower);
    let mut prev = f64::INFINITY;
    for i in 0..40 {
        let a = amp(-4.0 + 0.3 * i as f64);
        let u = union_bound(&c, a);
        assert!(u <= prev);
        prev = u;
        assert!(tub(&c, a, 10) <= u);
        assert!(nn_pe1(&c, a, 6) <= 1.0 / 64.0);
        assert!(nn_pe1(&c, a, 6) <= u + 1e-300);
        let n = nack1(&b, &c, a, 6, 12);
        assert!((0.0..=1.0 - 1.0 / 64.0).contains(&n));
    }
}

#[test]
fn crossover_equalizes_union_sums() {
    let c1 = spectrum(&[(11, 17), (12, 30)], 14, Flavor::Lower);
    let c2 = spectrum(&[(12, 76)], 14, Flavor::Lower);
    let db = crossover_db(&c1, &c2, -10.0, 10.0).unwrap();
    let a = amp(db);
    assert!((union_sum(&c1, a) / union_sum(&c2, a) - 1.0).abs() < 1e-8);
    // Above the crossover the smaller d_min dominates.
    assert!(union_sum(&c1, amp(db + 1.0)) > union_sum(&c2, amp(db + 1.0)));
    assert!(union_sum(&c1, amp(db - 1.0)) < union_sum(&c2, amp(db - 1.0)));
}

#[test]
fn chi_density_normalizes_with_mode_at_root_n_minus_one() {
    for n in [2usize, 16, 134] {
        let hi = (n as f64).sqrt() + 15.0;
        let total = simpson(|w| noise_norm_density(w, n), 0.0, hi, 200_000);
        assert!((total - 1.0).abs() < 1e-9, "n={n}: {total}");
        let mode = ((n - 1) as f64).sqrt();
        let f0 = noise_norm_density(mode, n);
        for d in [-1e-3, 1e-3] {
            assert!(noise_norm_density(mode + d, n) < f0);
        }
        let mean = simpson(|w| w * noise_norm_density(w, n), 0.0, hi, 200_000);
        let want = 2f64.sqrt()
            * (statrs::function::gamma::ln_gamma((n as f64 + 1.0) / 2.0)
                - statrs::function::gamma::ln_gamma(n as f64 / 2.0))
            .exp();
        assert!((mean - want).abs() < 1e-9);
    }
    assert!((sphere_area(3, 2.0) - 16.0 * PI).abs() < 1e-12);
    assert!((sphere_area(2, 1.5) - 3.0 * PI).abs() < 1e-12);
}

#[test]
fn solid_angle_closed_forms() {
    for i in 0..=40 {
        let a = PI * i as f64 / 40.0;
        assert!((solid_angle_fraction(a, 2) - a / PI).abs() < 1e-12);
        assert!((solid_angle_fraction(a, 3) - (1.0 - a.cos()) / 2.0).abs() < 1e-12);
    }
    for n in [4, 20, 134] {
        let a = solve_alpha(3, 8, 2, n).unwrap();
        assert!((solid_angle_fraction(a, n) / (3.0 / 1024.0) - 1.0).abs() < 1e-9);
    }
    let tiny = solve_alpha(1, 64, 10, 148).unwrap();
    assert!((solid_angle_fraction(tiny, 148).ln() - (-74.0 * std::f64::consts::LN_2)).abs() < 1e-8);
    assert!(solve_alpha(3, 1, 0, 4).is_err());
}

#[test]
fn induced_density_normalizes() {
    for (w, a) in [(1.5, 1.0), (3.0, 1.0), (2.0, 0.9)] {
        let r2 = a * 2f64.sqrt();
        // Circle: arc length r·dθ.
        let circ = simpson(
            |t| induced_density(r2 * t.cos(), w, a, 2).unwrap() * r2,
            0.0,
            2.0 * PI,
            20_000,
        );
        assert!((circ - 1.0).abs() < 1e-6, "n=2 w={w}: {circ}");
        let r3 = a * 3f64.sqrt();
        if w >= r3 {
            // Sphere in ℝ³: the band at height y₁ has area 2πr·dy₁.
            let sph = simpson(
                |y| induced_density(y, w, a, 3).unwrap() * 2.0 * PI * r3,
                -r3,
                r3,
                20_000,
            );
            assert!((sph - 1.0).abs() < 1e-6, "n=3 w={w}: {sph}");
        }
    }
    assert!(induced_density(0.0, 0.5, 1.0, 4).is_err());
}

#[test]
fn induced_density_pointwise_envelope() {
    for n in [2usize, 3, 10, 134] {
        let a = 0.7;
        let r = a * (n as f64).sqrt();
        for w in [r, 1.2 * r, 3.0 * r, 20.0 * r] {
            let (lo, hi) = (
                (1.0 - r / w).powi(n as i32 - 1),
                (1.0 + r / w).powi(n as i32 - 1),
            );
            for i in 0..=200 {
                let y = -r + 2.0 * r * i as f64 / 200.0;
                let g = induced_density(y, w, a, n).unwrap() * sphere_area(n, r);
                assert!(
                    g >= lo * (1.0 - 1e-9) - 1e-12 && g <= hi * (1.0 + 1e-9),
                    "n={n} w={w} y={y}: {g} not in [{lo}, {hi}]"
                );
            }
        }
    }
}

#[test]
fn onion_model_shape() {
    let n = 40;
    let geo = OnionGeometry::new(4, 10, 2, n).unwrap();
    let lbar = 4.5;
    let rn = (n as f64).sqrt();
    let mut prev = 0.0;
    for i in 1..=400 {
        let eta = 0.02 * i as f64;
        for s in 1..=4 {
            let f = geo.cdf(s, eta);
            assert!((0.0..=1.0).contains(&f));
            if s > 1 {
                assert!(f >= geo.cdf(s - 1, eta) - 1e-12);
            }
        }
        let r = onion_cond_rank(eta, &geo, lbar);
        assert!(r >= 1.0 - 1e-12 && r <= lbar + 1e-12);
        assert!(r >= prev - 1e-9, "eta={eta}");
        prev = r;
    }
    assert_eq!(onion_cond_rank(1e-3, &geo, lbar), 1.0);
    for &a in &geo.alphas {
        let e = rn * a.sin();
        let (l, r) = (
            onion_cond_rank(e * (1.0 - 1e-9), &geo, lbar),
            onion_cond_rank(e * (1.0 + 1e-9), &geo, lbar),
        );
        assert!((l - r).abs() < 1e-6, "jump at {e}: {l} vs {r}");
    }
}

#[test]
fn random_coding_rank_matches_urn() {
    assert!((random_coding_rank(8.0, 4.0) - 1.8).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut urn: Vec<bool> = (0..8).map(|i| i < 4).collect();
    let trials = 400_000;
    let mut sum = 0usize;
    for _ in 0..trials {
        urn.shuffle(&mut rng);
        sum += urn.iter().position(|&b| b).unwrap() + 1;
    }
    let mc = sum as f64 / trials as f64;
    assert!((mc - 1.8).abs() < 0.01, "{mc}");
}

#[test]
fn rank_integration_cases() {
    let n = 16;
    let a = 0.8;
    let flat = [(0.0, 3.0), (100.0, 3.0)];
    assert!((integrate_rank_over_noise(&flat, n, a).unwrap() - 3.0).abs() < 1e-10);
    // rank(η) = η, so E[L] = E[W]/A.
    let lin: Vec<(f64, f64)> = (0..=300)
        .map(|i| (i as f64 * 0.1, i as f64 * 0.1))
        .collect();
    let got = integrate_rank_over_noise(&lin, n, a).unwrap();
    let ew = simpson(|w| w * noise_norm_density(w, n), 0.0, 30.0, 100_000);
    assert!((got - ew / a).abs() < 1e-8, "{got} vs {}", ew / a);
    let step = [(1.0, 1.0), (2.0, 5.0)];
    let got = integrate_rank_over_noise(&step, 2, 1.0).unwrap();
    let want = simpson(
        |w| {
            noise_norm_density(w, 2)
                * if w <= 1.0 {
                    1.0
                } else if w >= 2.0 {
                    5.0
                } else {
                    1.0 + 4.0 * (w - 1.0)
                }
        },
        0.0,
        20.0,
        200_000,
    );
    assert!((got - want).abs() < 1e-7);
    assert!(integrate_rank_over_noise(&[], n, a).is_err());
    assert!(integrate_rank_over_noise(&[(1.0, 1.0), (1.0, 2.0)], n, a).is_err());
}

#[test]
fn complexity_anchors() {
    assert_eq!(c_ssv(Termination::TailBiting, 64, 10, 8, 1.5), 57_476.5);
    let zt = c_ssv(Termination::ZeroTail, 64, 6, 3, 1.5);
    let direct = 14.0 + 1.5 * 14.0 + 1.5 * 67.0 * 16.0 + 1.5 * (2.0 * 73.0 + 1.5 * 70.0);
    assert_eq!(zt, direct);
    assert_eq!(c_wava(8, 64, 2), 64.0 * 2.0 * (128.0 + 512.0));
    assert!((c_list(8.0, 2.0) - 48.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn complexity_grows_with_list_rank(
        tb in any::<bool>(),
        k in 8usize..128,
        m in 0usize..16,
        nu in 1usize..10,
        el in 1.0f64..1e4,
        extra in 0.0f64..1e4,
    ) {
        let mode = if tb { Termination::TailBiting } else { Termination::ZeroTail };
        let lo = breakdown(mode, k, m, nu, el, None, C1_DEFAULT, C2_DEFAULT);
        let hi = breakdown(mode, k, m, nu, el + extra, None, C1_DEFAULT, C2_DEFAULT);
        prop_assert!(hi.c_total >= lo.c_total);
        prop_assert!(lo.normalized >= 1.0);
        prop_assert!(c_trace(mode, k, m, nu, el, C1_DEFAULT) >= 0.0);
        prop_assert!(ei_bound(mode, k, m, nu, el) >= (k + m) as f64);
        prop_assert!(c_ssv(mode, k, m, nu + 1, C1_DEFAULT) > c_ssv(mode, k, m, nu, C1_DEFAULT));
        prop_assert!(c_ssv(mode, k + 1, m, nu, C1_DEFAULT) > c_ssv(mode, k, m, nu, C1_DEFAULT));
    }

    #[test]
    fn solid_angle_monotone(n in 2usize..300, a in 0.0f64..3.1, b in 0.0f64..3.1) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(solid_angle_fraction(lo, n) <= solid_angle_fraction(hi, n) + 1e-15);
        prop_assert!((solid_angle_fraction(a, n) + solid_angle_fraction(PI - a, n) - 1.0).abs() < 1e-12);
    }
}
