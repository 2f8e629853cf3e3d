use std::f64::consts::PI;

use proptest::prelude::*;
use sphere_ineq::em_certifier::{em_upper_bound, m0, phi};
use sphere_ineq::inequality_lab::*;
use sphere_ineq::spectral_series::{eval_i, eval_j, Params};
use sphere_ineq::sphere_basis::*;

fn brute_i(p: f64, m: f64, n_max: u64) -> (f64, f64, f64) {
    let s: f64 = (1..=n_max).rev().map(|n| (2 * n + 1) as f64 * (m * m + (n * n + n) as f64).powf(-p)).sum();
    let pre = (p - 1.0) * m.powf(2.0 * (p - 1.0));
    let tail = |x: f64| (m * m + x * x + x).powf(1.0 - p) / (p - 1.0);
    (pre * s, pre * (s + tail(n_max as f64 + 1.0)), pre * (s + tail(n_max as f64)))
}

fn point() -> impl Strategy<Value = SpherePoint> {
    (-0.999f64..0.999, 0.0f64..2.0 * PI).prop_map(|(z, phi)| SpherePoint::new(z.acos(), phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enclosure_is_sound(p in 1.2f64..6.0, m in 0.05f64..30.0, extra in 1u64..5000) {
        let v = eval_i(Params::new(p, m).unwrap(), 1e-9).unwrap();
        let (partial, lo, hi) = brute_i(p, m, v.terms_used + extra);
        prop_assert!(partial <= v.hi);
        prop_assert!(v.lo <= hi && lo <= v.hi, "{v:?} vs [{lo}, {hi}]");
    }

    #[test]
    fn series_stay_below_one(p in 1.1f64..10.0, m in 0.0f64..100.0) {
        let params = Params::new(p, m).unwrap();
        prop_assert!(eval_i(params, 1e-9).unwrap().hi < 1.0);
        prop_assert!(eval_j(params, 1e-8).unwrap().hi < 1.0);
    }

    #[test]
    fn em_bound_dominates(p in 1.05f64..10.0, m in 0.05f64..20.0) {
        let params = Params::new(p, m).unwrap();
        prop_assert!(eval_i(params, 1e-10).unwrap().hi <= em_upper_bound(params).unwrap() + 1e-9);
    }

    #[test]
    fn em_bound_is_below_one_past_m0(p in 1.05f64..10.0, excess in 1e-3f64..10.0) {
        let m = m0(p).unwrap() + excess;
        prop_assert!(em_upper_bound(Params::new(p, m).unwrap()).unwrap() < 1.0);
    }

    #[test]
    fn phi_increases(p in prop::sample::select(vec![1.5, 2.0, 2.1, 3.0]), a in 1e-3f64..1.0, b in 1e-3f64..1.0) {
        prop_assume!((a - b).abs() > 1e-9);
        let (z1, z2) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi(z1, p).unwrap() < phi(z2, p).unwrap());
    }

    #[test]
    fn addition_theorem_at_random_points(n in 0usize..=32, s in point()) {
        let scalar = (2 * n + 1) as f64 / (4.0 * PI);
        let sum: f64 = (1..=2 * n + 1).map(|k| sph_harmonic(HarmonicIndex::new(n, k).unwrap(), s).powi(2)).sum();
        prop_assert!((sum / scalar - 1.0).abs() <= 1e-10);
        if n > 0 {
            let vec: f64 = (1..=2 * n + 1)
                .map(|k| vector_eigenfunction(HarmonicIndex::new(n, k).unwrap(), s).unwrap().norm_sq())
                .sum();
            prop_assert!((vec / scalar - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn positions_round_trip(pos in 0usize..70_000) {
        let idx = HarmonicIndex::from_position(pos);
        prop_assert_eq!(idx.position(), pos);
        prop_assert!(idx.k >= 1 && idx.k <= 2 * idx.n + 1);
    }

    #[test]
    fn coefficient_text_round_trips(seed in any::<u64>(), d in 0usize..8) {
        let c = random_field(seed, d, false);
        let back: SpectralCoeffs = c.to_text().parse().unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn families_are_orthonormal(
        seed in any::<u64>(),
        size in 1usize..40,
        m in 0.1f64..5.0,
        vector in any::<bool>(),
    ) {
        let flavor = if vector { Flavor::VectorDivFree } else { Flavor::Scalar };
        let f = build_family(m, size, flavor, Mixing::Seeded(seed), minimal_degree(size)).unwrap();
        prop_assert!(f.gram_residual() <= 1e-10);
        prop_assert_eq!(Family::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn density_mass_matches(seed in any::<u64>(), size in 1usize..20, m in 0.1f64..5.0) {
        let f = build_family(m, size, Flavor::Scalar, Mixing::Seeded(seed), minimal_degree(size)).unwrap();
        let rule = build_rule(2 * f.max_degree).unwrap();
        let rho = density(&f, &rule).unwrap();
        prop_assert!(rho.values.iter().all(|v| *v >= 0.0));
        prop_assert!((rho.integral(&rule) / f.spectral_mass() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn theorem1_bound_holds(
        seed in any::<u64>(),
        size in 1usize..20,
        m in 0.3f64..5.0,
        p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 4.0]),
    ) {
        let cache = SampleCache::new();
        let f = build_family(m, size, Flavor::Scalar, Mixing::Seeded(seed), minimal_degree(size)).unwrap();
        let r = theorem1_check(&f, p, &cache).unwrap();
        prop_assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn gn_ratio_at_most_one(seed in any::<u64>(), d in 1usize..10, q in prop::sample::select(vec![2.0, 3.0, 4.0, 6.0, 10.0])) {
        let cache = SampleCache::new();
        let c = random_field(seed, d, true);
        let r = gn_check(&c, q, &cache).unwrap();
        if q == 2.0 {
            prop_assert!((r.value - 1.0).abs() <= 1e-12);
        } else {
            prop_assert!(r.holds(), "{r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trace_inequality_holds(
        seed in any::<u64>(),
        vdeg in 1usize..3,
        d in 2usize..8,
        m in 0.3f64..3.0,
        r in prop::sample::select(vec![1.5, 2.0, 3.0]),
    ) {
        let v = nonnegative_potential(seed, vdeg).unwrap();
        let rule = galerkin_rule(d, v.max_degree).unwrap();
        let t = alt_trace_check_r(m, r, &v, d, &rule, Flavor::Scalar).unwrap();
        prop_assert!(t.lhs <= t.rhs * (1.0 + 1e-8), "{t:?}");
        if let Some(c) = t.rhs_continuum {
            prop_assert!(t.lhs <= c * (1.0 + 1e-8));
        }
    }

    #[test]
    fn variational_step_holds(seed in any::<u64>(), size in 1usize..15, m in 0.3f64..3.0) {
        let v = nonnegative_potential(seed, 2).unwrap();
        let d = minimal_degree(size);
        let rule = galerkin_rule(d, v.max_degree).unwrap();
        let f = build_family(m, size, Flavor::Scalar, Mixing::Seeded(seed ^ 1), d).unwrap();
        let (sum, eig) = variational_step_check(&f, &v, &rule, d).unwrap();
        prop_assert!(sum <= eig * (1.0 + 1e-8) + 1e-14);
    }
}
