//! Real spherical harmonics on the unit sphere, orthonormal under surface
//! measure `dσ` (total mass 4π), their tangential gradients, divergence-free
//! vector eigenfunctions and tensor-product quadrature.
//!
//! Real basis convention: `k = 1` is the zonal harmonic, `k = 2j` carries
//! `√2 cos(jφ)` and `k = 2j + 1` carries `√2 sin(jφ)` for `j = 1..n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::gauss_legendre;

/// Highest degree for which the Legendre recurrence is supported.
pub const MAX_DEGREE: usize = 256;
/// Largest exact degree accepted by [`build_rule`].
pub const MAX_RULE_DEGREE: usize = 600;
/// Frames closer than this to a pole (in `sin θ`) are rejected.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return domain(format!("colatitude {theta} outside [0, π]"));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return domain(format!("longitude {phi} outside [0, 2π)"));
        }
        Ok(SpherePoint { theta, phi })
    }

    /// Builds a point from a unit-sphere position `(x, y, z)` (normalised internally).
    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return domain("cannot project the origin onto the sphere");
        }
        let theta = (z / r).clamp(-1.0, 1.0).acos();
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        SpherePoint::new(theta, phi)
    }

    pub fn is_pole(&self) -> bool {
        self.theta.sin() < POLE_GUARD
    }

    fn require_frame(&self) -> Result<f64> {
        let s = self.theta.sin();
        if s < POLE_GUARD {
            return Err(Error::Pole { sin_theta: s });
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub n: usize,
    pub k: usize,
}

impl HarmonicIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > 2 * n + 1 {
            return domain(format!("order index {k} outside 1..={} for degree {n}", 2 * n + 1));
        }
        if n > MAX_DEGREE {
            return Err(Error::DegreeCap { degree: n, cap: MAX_DEGREE });
        }
        Ok(HarmonicIndex { n, k })
    }

    /// `Λ_n = n(n+1)`.
    pub fn eigenvalue(&self) -> f64 {
        (self.n * (self.n + 1)) as f64
    }

    /// Position in the canonical ordering `(0,1), (1,1), (1,2), (1,3), (2,1), …`.
    pub fn position(&self) -> usize {
        self.n * self.n + self.k - 1
    }

    pub fn from_position(pos: usize) -> Self {
        let n = (pos as f64).sqrt() as usize;
        // guard against sqrt rounding for large squares
        let n = if (n + 1) * (n + 1) <= pos { n + 1 } else if n * n > pos { n - 1 } else { n };
        HarmonicIndex { n, k: pos - n * n + 1 }
    }

    /// Longitudinal order `j` and whether the factor is a sine.
    fn order(&self) -> (usize, bool) {
        (self.k / 2, self.k > 1 && self.k % 2 == 1)
    }
}

/// Number of harmonics of degree at most `max_degree`.
pub fn basis_len(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TangentVector {
    pub v_theta: f64,
    pub v_phi: f64,
}

impl TangentVector {
    pub fn norm_sq(&self) -> f64 {
        self.v_theta * self.v_theta + self.v_phi * self.v_phi
    }

    /// `u⊥ = (u₂, −u₁)`: rotation by π/2 clockwise in the tangent plane.
    pub fn perp(&self) -> Self {
        TangentVector { v_theta: self.v_phi, v_phi: -self.v_theta }
    }

    pub fn scale(&self, a: f64) -> Self {
        TangentVector { v_theta: a * self.v_theta, v_phi: a * self.v_phi }
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.v_theta * o.v_theta + self.v_phi * o.v_phi
    }
}

#[inline]
fn tri(n: usize, k: usize) -> usize {
    n * (n + 1) / 2 + k
}

/// Normalised associated Legendre values `P̄_n^k(cos θ)` for all `k ≤ n ≤ nmax`,
/// laid out by [`tri`]. `sin_theta` is passed separately so that it keeps
/// full relative accuracy near the poles.
fn legendre_table(nmax: usize, x: f64, sin_theta: f64) -> Vec<f64> {
    let mut t = vec![0.0; tri(nmax, nmax) + 1];
    t[0] = 0.5 / PI.sqrt();
    for k in 0..=nmax {
        if k > 0 {
            let kf = k as f64;
            t[tri(k, k)] = ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sin_theta * t[tri(k - 1, k - 1)];
        }
        if k < nmax {
            t[tri(k + 1, k)] = (2.0 * k as f64 + 3.0).sqrt() * x * t[tri(k, k)];
        }
        for n in k + 2..=nmax {
            let (nf, kf) = (n as f64, k as f64);
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - kf * kf)).sqrt();
            let b = (((nf - 1.0) * (nf - 1.0) - kf * kf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
            t[tri(n, k)] = a * (x * t[tri(n - 1, k)] - b * t[tri(n - 2, k)]);
        }
    }
    t
}

/// `dP̄_n^k(cos θ)/dθ` from the same table.
fn legendre_dtheta(t: &[f64], n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let up = if k < n { ((nf - kf) * (nf + kf + 1.0)).sqrt() * t[tri(n, k + 1)] } else { 0.0 };
    if k == 0 {
        return -up;
    }
    let down = ((nf + kf) * (nf - kf + 1.0)).sqrt() * t[tri(n, k - 1)];
    0.5 * (down - up)
}

/// Normalised associated Legendre function `P̄_n^k(x)`, scaled so that the
/// zonal harmonic `P̄_n^0(cos θ)` has unit `L²(dσ)` norm.
pub fn assoc_legendre(n: usize, k_abs: usize, x: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeCap { degree: n, cap: MAX_DEGREE });
    }
    if k_abs > n {
        return domain(format!("order {k_abs} exceeds degree {n}"));
    }
    if !(-1.0..=1.0).contains(&x) {
        return domain(format!("argument {x} outside [-1, 1]"));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    Ok(legendre_table(n, x, s)[tri(n, k_abs)])
}

#[inline]
fn trig(j: usize, sine: bool, phi: f64) -> (f64, f64) {
    // returns (factor, d factor / dφ), √2 included for j > 0
    if j == 0 {
        return (1.0, 0.0);
    }
    let (s, c) = (j as f64 * phi).sin_cos();
    let r2 = std::f64::consts::SQRT_2;
    let jf = j as f64;
    if sine {
        (r2 * s, r2 * jf * c)
    } else {
        (r2 * c, -r2 * jf * s)
    }
}

pub fn sph_harmonic(idx: HarmonicIndex, s: SpherePoint) -> f64 {
    let (j, sine) = idx.order();
    let (st, ct) = s.theta.sin_cos();
    let t = legendre_table(idx.n, ct, st);
    t[tri(idx.n, j)] * trig(j, sine, s.phi).0
}

/// `(∂_θ Y, (1/sin θ) ∂_φ Y)` in the local orthonormal frame.
pub fn sph_harmonic_gradient(idx: HarmonicIndex, s: SpherePoint) -> Result<TangentVector> {
    let st = s.require_frame()?;
    let ct = s.theta.cos();
    let (j, sine) = idx.order();
    let t = legendre_table(idx.n, ct, st);
    let (f, df) = trig(j, sine, s.phi);
    Ok(TangentVector { v_theta: legendre_dtheta(&t, idx.n, j) * f, v_phi: t[tri(idx.n, j)] * df / st })
}

/// `w_n^k = (n(n+1))^(-1/2) ∇⊥ Y_n^k`.
pub fn vector_eigenfunction(idx: HarmonicIndex, s: SpherePoint) -> Result<TangentVector> {
    if idx.n == 0 {
        return domain("vector eigenfunctions start at degree 1");
    }
    let g = sph_harmonic_gradient(idx, s)?;
    Ok(g.perp().scale(1.0 / idx.eigenvalue().sqrt()))
}

/// Band-limited field coefficients over the real harmonic basis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub entries: BTreeMap<HarmonicIndex, f64>,
    pub max_degree: usize,
}

impl SpectralCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(idx: HarmonicIndex, value: f64) -> Self {
        let mut c = Self::new();
        c.set(idx, value);
        c
    }

    pub fn set(&mut self, idx: HarmonicIndex, value: f64) {
        self.max_degree = self.max_degree.max(idx.n);
        self.entries.insert(idx, value);
    }

    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.entries.get(&idx).copied().unwrap_or(0.0)
    }

    /// Coefficients in canonical order, padded to degree `max_degree`.
    pub fn from_dense(values: &[f64]) -> Self {
        let mut c = Self::new();
        for (pos, &v) in values.iter().enumerate() {
            if v != 0.0 {
                c.set(HarmonicIndex::from_position(pos), v);
            }
        }
        c
    }

    pub fn to_dense(&self, max_degree: usize) -> Vec<f64> {
        let mut out = vec![0.0; basis_len(max_degree)];
        for (idx, &v) in &self.entries {
            if idx.n <= max_degree {
                out[idx.position()] = v;
            }
        }
        out
    }

    pub fn is_zero_mean(&self) -> bool {
        self.entries.iter().all(|(i, v)| i.n > 0 || *v == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| *v == 0.0)
    }

    /// `‖φ‖²` in `L²(dσ)`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum()
    }

    /// `‖∇φ‖² = Σ Λ_n c²`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.entries.iter().map(|(i, v)| i.eigenvalue() * v * v).sum()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let mut out = Self::new();
        for (&i, &v) in &self.entries {
            out.set(i, a * v);
        }
        for (&i, &v) in &other.entries {
            let cur = out.get(i);
            out.set(i, cur + b * v);
        }
        out
    }

    /// Lines of `n k value`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, v) in &self.entries {
            s.push_str(&format!("{} {} {}\n", i.n, i.k, v));
        }
        s
    }

    /// Parses `n k value` lines; blank lines and `#` comments are skipped.
    pub fn parse_lines<'a, I: IntoIterator<Item = (usize, &'a str)>>(lines: I) -> Result<Self> {
        let mut c = Self::new();
        for (no, raw) in lines {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: no, msg: msg.to_string() };
            let mut it = line.split_whitespace();
            let n: usize = it.next().ok_or_else(|| bad("missing degree"))?.parse().map_err(|_| bad("bad degree"))?;
            let k: usize = it.next().ok_or_else(|| bad("missing order"))?.parse().map_err(|_| bad("bad order"))?;
            let v: f64 = it.next().ok_or_else(|| bad("missing value"))?.parse().map_err(|_| bad("bad value"))?;
            if it.next().is_some() {
                return Err(bad("trailing fields"));
            }
            let idx = HarmonicIndex::new(n, k).map_err(|e| bad(&e.to_string()))?;
            c.set(idx, v);
        }
        Ok(c)
    }
}

impl fmt::Display for SpectralCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for SpectralCoeffs {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_lines(s.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }
}

/// Tensor Gauss × trapezoid rule on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
    /// Gauss abscissae in `cos θ`, one per latitude ring.
    rings: Vec<f64>,
    n_phi: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Rule exact for spherical polynomials of degree `exact_degree`: `⌈(d+1)/2⌉`
/// Gauss nodes in `cos θ` times `d+1` equally spaced longitudes.
pub fn build_rule(exact_degree: usize) -> Result<QuadratureRule> {
    if exact_degree > MAX_RULE_DEGREE {
        return Err(Error::DegreeCap { degree: exact_degree, cap: MAX_RULE_DEGREE });
    }
    let n_theta = exact_degree / 2 + 1;
    let n_phi = exact_degree + 1;
    let (x, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            nodes.push(SpherePoint { theta, phi: j as f64 * dphi });
            weights.push(wi * dphi);
        }
    }
    Ok(QuadratureRule { nodes, weights, exact_degree, rings: x, n_phi })
}

/// Raised when a rule is too coarse for the requested use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeWarning {
    pub needed: usize,
    pub rule_degree: usize,
}

impl fmt::Display for DegreeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule exact to degree {} but {} needed", self.rule_degree, self.needed)
    }
}

pub fn check_degree(needed: usize, rule: &QuadratureRule) -> Option<DegreeWarning> {
    (rule.exact_degree < needed).then_some(DegreeWarning { needed, rule_degree: rule.exact_degree })
}

/// Field values at the nodes of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub values: Vec<f64>,
    pub warning: Option<DegreeWarning>,
}

/// All basis harmonics up to `max_degree` sampled at the nodes of a rule,
/// with optional gradient components. Row-major: one row per node.
#[derive(Debug, Clone)]
pub struct BasisSamples {
    pub max_degree: usize,
    pub len: usize,
    pub values: Vec<f64>,
    pub grad_theta: Option<Vec<f64>>,
    pub grad_phi: Option<Vec<f64>>,
}

impl BasisSamples {
    pub fn new(rule: &QuadratureRule, max_degree: usize, gradients: bool) -> Result<Self> {
        if max_degree > MAX_DEGREE {
            return Err(Error::DegreeCap { degree: max_degree, cap: MAX_DEGREE });
        }
        let len = basis_len(max_degree);
        let nn = rule.len();
        let mut values = vec![0.0; nn * len];
        let mut gt = if gradients { vec![0.0; nn * len] } else { Vec::new() };
        let mut gp = if gradients { vec![0.0; nn * len] } else { Vec::new() };
        for (r, &x) in rule.rings.iter().enumerate() {
            let st = ((1.0 - x) * (1.0 + x)).sqrt();
            if gradients && st < POLE_GUARD {
                return Err(Error::Pole { sin_theta: st });
            }
            let t = legendre_table(max_degree, x, st);
            let dt: Vec<f64> = if gradients {
                (0..=max_degree).flat_map(|n| (0..=n).map(move |k| (n, k))).map(|(n, k)| legendre_dtheta(&t, n, k)).collect()
            } else {
                Vec::new()
            };
            for c in 0..rule.n_phi {
                let node = r * rule.n_phi + c;
                let phi = rule.nodes[node].phi;
                let row = node * len;
                for n in 0..=max_degree {
                    for k in 1..=2 * n + 1 {
                        let idx = HarmonicIndex { n, k };
                        let (j, sine) = idx.order();
                        let (f, df) = trig(j, sine, phi);
                        let pos = row + idx.position();
                        values[pos] = t[tri(n, j)] * f;
                        if gradients {
                            gt[pos] = dt[tri(n, j)] * f;
                            gp[pos] = t[tri(n, j)] * df / st;
                        }
                    }
                }
            }
        }
        Ok(BasisSamples {
            max_degree,
            len,
            values,
            grad_theta: gradients.then_some(gt),
            grad_phi: gradients.then_some(gp),
        })
    }

    pub fn nodes(&self) -> usize {
        self.values.len() / self.len
    }

    fn apply(&self, table: &[f64], c: &[f64]) -> Vec<f64> {
        table.chunks_exact(self.len).map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }

    /// `Σ c_a Y_a` at every node.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        self.apply(&self.values, c)
    }

    /// `Σ c_a w_a` at every node, as `(v_θ, v_φ)` columns.
    pub fn synthesize_vector(&self, c: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (gt, gp) = match (&self.grad_theta, &self.grad_phi) {
            (Some(a), Some(b)) => (a, b),
            _ => return domain("basis samples were built without gradients"),
        };
        let scaled: Vec<f64> = c
            .iter()
            .enumerate()
            .map(|(pos, v)| {
                let lam = HarmonicIndex::from_position(pos).eigenvalue();
                if lam == 0.0 { 0.0 } else { v / lam.sqrt() }
            })
            .collect();
        // w = ∇⊥Y/√Λ = (∂_φY/sinθ, −∂_θY)/√Λ
        let vt = self.apply(gp, &scaled);
        let vp = self.apply(gt, &scaled).into_iter().map(|v| -v).collect();
        Ok((vt, vp))
    }
}

/// Point values `Σ c_{nk} Y_n^k` at the nodes of `rule`. A warning is attached
/// when the rule cannot integrate the square of the field exactly.
pub fn synthesize(c: &SpectralCoeffs, rule: &QuadratureRule) -> Result<NodalField> {
    let samples = BasisSamples::new(rule, c.max_degree, false)?;
    Ok(NodalField { values: samples.synthesize(&c.to_dense(c.max_degree)), warning: check_degree(2 * c.max_degree, rule) })
}

/// `(Σ w_i |v_i|^p)^(1/p)` with respect to `dσ`.
pub fn lp_norm(values: &[f64], p_exp: f64, rule: &QuadratureRule) -> f64 {
    let s: f64 = rule.weights.iter().zip(values).map(|(w, v)| w * v.abs().powf(p_exp)).sum();
    s.powf(1.0 / p_exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for pos in 0..basis_len(40) {
            let i = HarmonicIndex::from_position(pos);
            assert_eq!(i.position(), pos);
            assert!(HarmonicIndex::new(i.n, i.k).is_ok());
        }
        assert!(HarmonicIndex::new(2, 0).is_err());
        assert!(HarmonicIndex::new(2, 6).is_err());
    }

    #[test]
    fn low_degree_values() {
        assert!((assoc_legendre(0, 0, 0.3).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-16);
        assert!((assoc_legendre(1, 0, 1.0).unwrap() - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(assoc_legendre(257, 0, 0.0).is_err());
        assert!(assoc_legendre(3, 4, 0.0).is_err());
        assert!(assoc_legendre(3, 1, 1.5).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = SpherePoint::new(1.1, 2.3).unwrap();
        let h = 1e-6;
        for n in 0..6 {
            for k in 1..=2 * n + 1 {
                let i = HarmonicIndex::new(n, k).unwrap();
                let g = sph_harmonic_gradient(i, s).unwrap();
                let dth = (sph_harmonic(i, SpherePoint { theta: s.theta + h, ..s })
                    - sph_harmonic(i, SpherePoint { theta: s.theta - h, ..s }))
                    / (2.0 * h);
                let dph = (sph_harmonic(i, SpherePoint { phi: s.phi + h, ..s })
                    - sph_harmonic(i, SpherePoint { phi: s.phi - h, ..s }))
                    / (2.0 * h * s.theta.sin());
                assert!((g.v_theta - dth).abs() < 1e-8 && (g.v_phi - dph).abs() < 1e-8, "{i:?}");
            }
        }
    }

    #[test]
    fn poles_are_rejected_for_frames() {
        let p = SpherePoint::new(0.0, 0.0).unwrap();
        assert!(p.is_pole());
        let i = HarmonicIndex::new(1, 1).unwrap();
        assert!(matches!(sph_harmonic_gradient(i, p), Err(Error::Pole { .. })));
        assert!((sph_harmonic(i, p) - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(vector_eigenfunction(HarmonicIndex::new(0, 1).unwrap(), SpherePoint::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn rule_mass_and_cap() {
        for d in [0, 1, 7, 45] {
            let r = build_rule(d).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
            assert!(r.nodes.iter().all(|p| !p.is_pole()));
        }
        assert!(build_rule(601).is_err());
    }

    #[test]
    fn coeff_text_roundtrip() {
        let mut c = SpectralCoeffs::new();
        c.set(HarmonicIndex::new(3, 2).unwrap(), -0.125);
        c.set(HarmonicIndex::new(0, 1).unwrap(), 1.0 / 3.0);
        let back: SpectralCoeffs = format!("# header\n{}\n", c.to_text()).parse().unwrap();
        assert_eq!(back, c);
        assert!("1 5 0.3".parse::<SpectralCoeffs>().is_err());
        assert!("1 1".parse::<SpectralCoeffs>().is_err());
        assert!("1 1 x".parse::<SpectralCoeffs>().is_err());
    }

    #[test]
    fn basis_samples_agree_with_pointwise() {
        let rule = build_rule(9).unwrap();
        let b = BasisSamples::new(&rule, 4, true).unwrap();
        for (node, s) in rule.nodes.iter().enumerate().step_by(7) {
            for pos in 0..b.len {
                let i = HarmonicIndex::from_position(pos);
                assert!((b.values[node * b.len + pos] - sph_harmonic(i, *s)).abs() < 1e-14);
                let g = sph_harmonic_gradient(i, *s).unwrap();
                assert!((b.grad_theta.as_ref().unwrap()[node * b.len + pos] - g.v_theta).abs() < 1e-13);
                assert!((b.grad_phi.as_ref().unwrap()[node * b.len + pos] - g.v_phi).abs() < 1e-13);
            }
        }
    }
}
