use std::f64::consts::PI;

use sphere_ineq::spectral_series::{
    asymptotic_defect, eval_i, eval_j, eval_r, r2_integral_check, scan_monotonicity, Params, TailMethod,
};
use sphere_ineq::Error;
use statrs::function::gamma::gamma;

fn params(p: f64, m: f64) -> Params {
    Params::new(p, m).unwrap()
}

/// Partial sum to `n_max` plus the integral-test bracket of the remainder.
fn brute_i(p: f64, m: f64, n_max: u64) -> (f64, f64) {
    let mut s = 0.0;
    let mut c = 0.0;
    for n in (1..=n_max).rev() {
        let x = n as f64;
        let t = (2.0 * x + 1.0) * (m * m + x * x + x).powf(-p);
        let y = t - c;
        let z = s + y;
        c = (z - s) - y;
        s = z;
    }
    let pre = (p - 1.0) * m.powf(2.0 * (p - 1.0));
    let tail = |x: f64| (m * m + x * x + x).powf(1.0 - p) / (p - 1.0);
    (pre * (s + tail(n_max as f64 + 1.0)), pre * (s + tail(n_max as f64)))
}

fn brute_r(p: f64, n_max: u64) -> (f64, f64) {
    let s: f64 = (2..=n_max).rev().map(|n| (2 * n + 1) as f64 * ((n * n + n) as f64).powf(-p)).sum();
    let tail = |x: f64| (x * x + x).powf(1.0 - p) / (p - 1.0);
    (s + tail(n_max as f64 + 1.0), s + tail(n_max as f64))
}

/// `K_ν(x) = ∫_0^∞ e^(-x cosh t) cosh(νt) dt` by the trapezoid rule, which
/// converges geometrically for this analytic, rapidly decaying integrand.
fn bessel_k(nu: f64, x: f64) -> f64 {
    let h = 1e-3;
    let mut s = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        s += v;
        if v < 1e-300 || t > 40.0 {
            break;
        }
        t += h;
    }
    s * h
}

/// Poisson-summed lattice sum: the zero mode gives exactly 1, the origin is
/// removed by hand, and the remaining Fourier modes are Bessel-K terms.
fn j_poisson(p: f64, m: f64) -> f64 {
    let pre = (p - 1.0) * m.powf(2.0 * p - 2.0) / PI;
    let mut modes = 0.0;
    for a in -12i32..=12 {
        for b in -12i32..=12 {
            if a == 0 && b == 0 {
                continue;
            }
            let k = ((a * a + b * b) as f64).sqrt();
            modes += k.powf(p - 1.0) * bessel_k(p - 1.0, 2.0 * PI * m * k);
        }
    }
    1.0 - (p - 1.0) / (PI * m * m) + pre * 2.0 * PI.powf(p) / gamma(p) * m.powf(1.0 - p) * modes
}

#[test]
fn i_unit_mass_against_brute_force() {
    let (lo, hi) = brute_i(2.0, 1.0, 1_000_000);
    let v = eval_i(params(2.0, 1.0), 1e-12).unwrap();
    assert!(v.lo <= hi && lo <= v.hi, "{v:?} vs [{lo}, {hi}]");
    assert!((v.mid() - 0.5357).abs() < 1e-4);
}

#[test]
fn i_zero_mass_is_zero() {
    let v = eval_i(params(2.0, 0.0), 1e-9).unwrap();
    assert_eq!((v.lo, v.hi, v.tail_method), (0.0, 0.0, TailMethod::ClosedForm));
}

#[test]
fn i_large_mass() {
    let v = eval_i(params(2.0, 100.0), 1e-12).unwrap();
    assert!(v.lo > 0.999 && v.hi < 1.0);
    let (lo, hi) = brute_i(2.0, 100.0, 2_000_000);
    assert!(v.lo <= hi && lo <= v.hi);
    assert!(((1.0 - v.mid()) - 2.0 / 3.0e4).abs() < 1e-7);
}

#[test]
fn enclosure_contains_longer_partial_sums() {
    for (p, m) in [(1.1, 3.0), (1.5, 0.3), (4.0, 12.0)] {
        let v = eval_i(params(p, m), 1e-9).unwrap();
        let (lo, hi) = brute_i(p, m, 5 * v.terms_used.max(1000));
        assert!(v.lo <= hi && lo <= v.hi, "p={p} m={m}: {v:?} vs [{lo}, {hi}]");
    }
}

#[test]
fn j_against_poisson_oracle() {
    for (p, m) in [(2.0, 1.0), (1.5, 0.7), (3.0, 2.0), (1.1, 1.3)] {
        let v = eval_j(params(p, m), 1e-10).unwrap();
        let o = j_poisson(p, m);
        assert!(v.lo - 1e-12 <= o && o <= v.hi + 1e-12, "p={p} m={m}: {v:?} vs {o}");
    }
    let v = eval_j(params(2.0, 1.0), 1e-9).unwrap();
    assert!((v.mid() - 0.72).abs() < 0.02 && v.hi < 1.0);
}

#[test]
fn j_large_mass_against_radial_bracket() {
    // For radially decreasing f and a unit cell C around n, f(|x|+d) ≤ f(|n|) ≤ f(|x|-d)
    // on C with d = √2/2. Summing over |n| ≥ R and passing to polar coordinates:
    //   (1 - d/s1) F(s1) ≤ Σ_{|n|≥R} f ≤ (1 + d/s0) F(s0),  s0 = R - √2, s1 = R + √2,
    // where F(s) = ∫_{|x|≥s} f = π (m² + s²)^(1-p) / (p-1).
    let (p, m) = (2.0, 100.0);
    let r_cut = 400.0;
    let mut near = 0.0;
    let n = r_cut as i64 + 2;
    for a in -n..=n {
        for b in -n..=n {
            let r2 = (a * a + b * b) as f64;
            if (a, b) != (0, 0) && r2 < r_cut * r_cut {
                near += (m * m + r2).powf(-p);
            }
        }
    }
    let big_f = |s: f64| PI * (m * m + s * s).powf(1.0 - p) / (p - 1.0);
    let d = 0.5 * 2f64.sqrt();
    let (s0, s1) = (r_cut - 2f64.sqrt(), r_cut + 2f64.sqrt());
    let pre = (p - 1.0) * m.powf(2.0 * p - 2.0) / PI;
    let (lo, hi) = (pre * (near + (1.0 - d / s1) * big_f(s1)), pre * (near + (1.0 + d / s0) * big_f(s0)));
    let v = eval_j(params(p, m), 1e-9).unwrap();
    assert!(v.lo <= hi && lo <= v.hi, "{v:?} vs [{lo}, {hi}]");
    assert!(v.lo > 0.99 && v.hi < 1.0);
}

#[test]
fn j_zero_mass_is_zero() {
    let v = eval_j(params(2.0, 0.0), 1e-9).unwrap();
    assert_eq!((v.lo, v.hi), (0.0, 0.0));
}

#[test]
fn r_values() {
    assert!(eval_r(2.0, 1e-12).unwrap().contains(0.25));
    let v = eval_r(3.0, 1e-12).unwrap();
    let (lo, hi) = brute_r(3.0, 1_000_000);
    assert!(v.lo <= hi && lo <= v.hi);
    assert!((v.mid() - 0.029_113_8).abs() < 1e-7);
    let v = eval_r(1.5, 1e-9).unwrap();
    assert!(v.width() <= 1e-9);
    let (lo, hi) = brute_r(1.5, 4_000_000);
    assert!(v.lo <= hi && lo <= v.hi);
}

#[test]
fn tolerance_and_domain_errors() {
    assert!(matches!(eval_i(Params { p: 1.0, m: 1.0 }, 1e-9), Err(Error::Domain(_))));
    assert!(matches!(eval_j(Params { p: 0.9, m: 1.0 }, 1e-9), Err(Error::Domain(_))));
    assert!(matches!(eval_r(1.0, 1e-9), Err(Error::Domain(_))));
    assert!(eval_i(params(2.0, 1.0), -1.0).is_err());
    assert!(matches!(eval_i(params(1.001, 1.0), 1e-30), Err(Error::NonConvergent { .. })));
}

#[test]
fn plane_identity() {
    for p in [1.5, 2.0, 3.0, 5.0] {
        for m in [0.5, 1.0, 2.0, 10.0] {
            let d = r2_integral_check(params(p, m)).unwrap();
            assert!(d <= 1e-10, "p={p} m={m}: {d}");
        }
    }
    assert!(r2_integral_check(params(1.1, 10.0)).unwrap() <= 1e-8);
    assert!(r2_integral_check(params(2.0, 0.0)).is_err());
}

#[test]
fn asymptotic_defect_values() {
    assert!((asymptotic_defect(params(2.0, 100.0), 1e-12).unwrap() - 1.0).abs() < 0.01);
    assert!((asymptotic_defect(params(3.0, 50.0), 1e-12).unwrap() - 1.0).abs() < 0.02);
    assert!((asymptotic_defect(params(1.5, 200.0), 1e-13).unwrap() - 1.0).abs() < 0.005);
    assert!(asymptotic_defect(params(2.0, 5.0), 1e-12).is_err());
}

#[test]
fn asymptotic_defect_is_second_order() {
    for p in [1.5, 2.0, 3.0] {
        let a = (asymptotic_defect(params(p, 50.0), 1e-13).unwrap() - 1.0).abs();
        let b = (asymptotic_defect(params(p, 100.0), 1e-13).unwrap() - 1.0).abs();
        let ratio = a / b;
        assert!((3.0..=5.0).contains(&ratio), "p={p}: {a} / {b} = {ratio}");
    }
}

#[test]
fn monotonicity_scans() {
    let grid: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
    let r = scan_monotonicity(2.0, &grid, 1e-8).unwrap();
    assert_eq!(r.violations(), 0);
    assert_eq!(r.pairs_checked, 20);
    let grid: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    assert_eq!(scan_monotonicity(4.0, &grid, 1e-8).unwrap().violations(), 0);
    let r = scan_monotonicity(2.0, &[1.0], 1e-8).unwrap();
    assert_eq!((r.pairs_checked, r.findings.len()), (0, 0));
    assert!(scan_monotonicity(2.0, &[1.0, 1.0], 1e-8).is_err());
    assert!(scan_monotonicity(2.0, &[-1.0, 1.0], 1e-8).is_err());
}
