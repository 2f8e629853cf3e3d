use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_ineq::sphere_basis::*;

fn random_points(seed: u64, count: usize) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.random_range(-0.999..0.999);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            SpherePoint::new(z.acos(), phi).unwrap()
        })
        .collect()
}

fn idx(n: usize, k: usize) -> HarmonicIndex {
    HarmonicIndex::new(n, k).unwrap()
}

/// `P̄_n^k(x)` from the explicit Legendre polynomial, differentiated `k`
/// times term by term. Independent of the three-term recurrence.
fn legendre_series(n: usize, k: usize, x: f64) -> f64 {
    let binom = |a: usize, b: usize| -> f64 { (0..b).map(|i| (a - i) as f64 / (i + 1) as f64).product() };
    // P_n(x) = 2^-n Σ_j (-1)^j C(n,j) C(2n-2j, n) x^(n-2j)
    let mut dk = 0.0;
    for j in 0..=n / 2 {
        let power = n - 2 * j;
        if power < k {
            continue;
        }
        let falling: f64 = (0..k).map(|i| (power - i) as f64).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        dk += sign * binom(n, j) * binom(2 * n - 2 * j, n) * falling * x.powi((power - k) as i32);
    }
    dk /= 2f64.powi(n as i32);
    let ratio: f64 = (n - k + 1..=n + k).map(|i| 1.0 / i as f64).product();
    ((2 * n + 1) as f64 / (4.0 * PI) * ratio).sqrt() * (1.0 - x * x).powf(k as f64 / 2.0) * dk
}

#[test]
fn legendre_against_series_oracle() {
    let v = assoc_legendre(10, 10, 0.3).unwrap();
    let o = legendre_series(10, 10, 0.3);
    assert!((v / o - 1.0).abs() < 1e-12, "{v} vs {o}");
    for n in 0..=12 {
        for k in 0..=n {
            for x in [-0.9, -0.31, 0.0, 0.47, 0.999] {
                let v = assoc_legendre(n, k, x).unwrap();
                let o = legendre_series(n, k, x);
                assert!((v - o).abs() <= 1e-12 * o.abs().max(1.0), "n={n} k={k} x={x}: {v} vs {o}");
            }
        }
    }
}

#[test]
fn recurrence_stable_at_cap() {
    // the addition theorem at degree 256 exercises every order of the recurrence
    let n = MAX_DEGREE;
    for s in random_points(11, 5) {
        let sum: f64 = (1..=2 * n + 1).map(|k| sph_harmonic(idx(n, k), s).powi(2)).sum();
        let exact = (2 * n + 1) as f64 / (4.0 * PI);
        assert!((sum / exact - 1.0).abs() < 1e-10, "{sum} vs {exact}");
    }
}

#[test]
fn constants_and_degree_one() {
    for s in random_points(1, 20) {
        assert!((sph_harmonic(idx(0, 1), s) - 0.5 / PI.sqrt()).abs() < 1e-16);
        let g = sph_harmonic_gradient(idx(0, 1), s).unwrap();
        assert_eq!(g.norm_sq(), 0.0);
    }
    let pole = SpherePoint::new(0.0, 0.0).unwrap();
    assert!((sph_harmonic(idx(1, 1), pole) - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
}

#[test]
fn addition_theorems() {
    let pts = random_points(7, 100);
    for n in 1..=32 {
        let nf = n as f64;
        let scalar = (2.0 * nf + 1.0) / (4.0 * PI);
        for s in &pts {
            let mut sum = 0.0;
            let mut grad = 0.0;
            let mut vec = 0.0;
            for k in 1..=2 * n + 1 {
                let i = idx(n, k);
                sum += sph_harmonic(i, *s).powi(2);
                let g = sph_harmonic_gradient(i, *s).unwrap();
                grad += g.norm_sq();
                let w = vector_eigenfunction(i, *s).unwrap();
                assert!((w.norm_sq() - g.norm_sq() / (nf * (nf + 1.0))).abs() <= 1e-14 * g.norm_sq().max(1e-300));
                vec += w.norm_sq();
            }
            assert!((sum / scalar - 1.0).abs() <= 1e-10, "n={n}");
            assert!((grad / (nf * (nf + 1.0) * scalar) - 1.0).abs() <= 1e-8, "n={n}");
            assert!((vec / scalar - 1.0).abs() <= 1e-8, "n={n}");
        }
    }
}

#[test]
fn addition_sum_is_constant_across_pairs() {
    let pts = random_points(3, 20);
    for n in [1, 5, 17, 32] {
        let f = |s: &SpherePoint| (1..=2 * n + 1).map(|k| sph_harmonic(idx(n, k), *s).powi(2)).sum::<f64>();
        for pair in pts.chunks(2) {
            let (a, b) = (f(&pair[0]), f(&pair[1]));
            assert!((a / b - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn gram_matrix_under_rule_45() {
    let rule = build_rule(45).unwrap();
    let b = BasisSamples::new(&rule, 20, false).unwrap();
    let len = b.len;
    let mut worst: f64 = 0.0;
    for a in 0..len {
        for c in a..len {
            let s: f64 = (0..rule.len()).map(|i| rule.weights[i] * b.values[i * len + a] * b.values[i * len + c]).sum();
            worst = worst.max((s - if a == c { 1.0 } else { 0.0 }).abs());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn gradient_rayleigh_quotients() {
    let rule = build_rule(30).unwrap();
    let b = BasisSamples::new(&rule, 12, true).unwrap();
    let (gt, gp) = (b.grad_theta.as_ref().unwrap(), b.grad_phi.as_ref().unwrap());
    for pos in 0..b.len {
        let lam = HarmonicIndex::from_position(pos).eigenvalue();
        let s: f64 = (0..rule.len())
            .map(|i| rule.weights[i] * (gt[i * b.len + pos].powi(2) + gp[i * b.len + pos].powi(2)))
            .sum();
        assert!((s - lam).abs() < 1e-11 * lam.max(1.0), "pos={pos}: {s} vs {lam}");
    }
}

#[test]
fn vector_eigenfunctions_orthonormal() {
    let rule = build_rule(8).unwrap();
    let idxs: Vec<HarmonicIndex> = (1..=2).flat_map(|n| (1..=2 * n + 1).map(move |k| idx(n, k))).collect();
    for a in &idxs {
        for b in &idxs {
            let s: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * vector_eigenfunction(*a, *x).unwrap().dot(&vector_eigenfunction(*b, *x).unwrap()))
                .sum();
            assert!((s - if a == b { 1.0 } else { 0.0 }).abs() < 1e-13, "{a:?} {b:?}: {s}");
        }
    }
}

#[test]
fn rule_exactness_examples() {
    assert!((build_rule(0).unwrap().weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    let prod = |a: HarmonicIndex, b: HarmonicIndex, d: usize| {
        let r = build_rule(d).unwrap();
        r.nodes.iter().zip(&r.weights).map(|(s, w)| w * sph_harmonic(a, *s) * sph_harmonic(b, *s)).sum::<f64>()
    };
    assert!((prod(idx(5, 3), idx(5, 3), 12) - 1.0).abs() < 1e-13);
    assert!(prod(idx(5, 3), idx(7, 1), 14).abs() < 1e-13);
    // one degree short of exact: the same product is no longer integrated exactly
    assert!((prod(idx(5, 3), idx(5, 3), 9) - 1.0).abs() > 1e-8);
}

#[test]
fn synthesis_and_norms() {
    let rule = build_rule(12).unwrap();
    let c = SpectralCoeffs::single(idx(0, 1), (4.0 * PI).sqrt());
    let f = synthesize(&c, &rule).unwrap();
    assert!(f.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    assert!(f.warning.is_none());
    for p in [1.0, 2.5, 7.0] {
        assert!((lp_norm(&f.values, p, &rule) - (4.0 * PI).powf(1.0 / p)).abs() < 1e-12);
    }
    for k in 1..=3 {
        let y = synthesize(&SpectralCoeffs::single(idx(1, k), 1.0), &rule).unwrap();
        assert!((lp_norm(&y.values, 2.0, &rule) - 1.0).abs() < 1e-13);
    }
    // zonal degree one: Y = √(3/4π) cos θ, ∫Y⁴ = (3/4π)² · 4π/5
    let y = synthesize(&SpectralCoeffs::single(idx(1, 1), 1.0), &rule).unwrap();
    let exact = ((3.0 / (4.0 * PI)).powi(2) * 4.0 * PI / 5.0).powf(0.25);
    assert!((lp_norm(&y.values, 4.0, &rule) - exact).abs() < 1e-12);
    let coarse = build_rule(3).unwrap();
    assert!(synthesize(&SpectralCoeffs::single(idx(3, 1), 1.0), &coarse).unwrap().warning.is_some());
}

#[test]
fn synthesis_is_linear() {
    let rule = build_rule(10).unwrap();
    let mut c1 = SpectralCoeffs::new();
    let mut c2 = SpectralCoeffs::new();
    c1.set(idx(2, 4), 0.7);
    c1.set(idx(4, 9), -1.1);
    c2.set(idx(2, 4), 0.2);
    c2.set(idx(5, 1), 3.0);
    let (a, b) = (1.5, -0.25);
    let lhs = synthesize(&c1.combine(a, &c2, b), &rule).unwrap().values;
    let f1 = synthesize(&c1, &rule).unwrap().values;
    let f2 = synthesize(&c2, &rule).unwrap().values;
    for i in 0..lhs.len() {
        assert!((lhs[i] - (a * f1[i] + b * f2[i])).abs() < 1e-13);
    }
}

#[test]
fn frame_and_validation_errors() {
    assert!(SpherePoint::new(-0.1, 0.0).is_err());
    assert!(SpherePoint::new(0.5, 2.0 * PI).is_err());
    let south = SpherePoint::new(PI, 1.0).unwrap();
    assert!(south.is_pole());
    assert!(sph_harmonic_gradient(idx(2, 2), south).is_err());
    assert!(vector_eigenfunction(idx(2, 2), south).is_err());
    let p = SpherePoint::from_cartesian(0.0, -1.0, 0.0).unwrap();
    assert!((p.theta - PI / 2.0).abs() < 1e-15 && (p.phi - 1.5 * PI).abs() < 1e-15);
}
