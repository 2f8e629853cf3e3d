//! Numerical experiments on the sphere: H¹(m)-orthonormal families and their
//! densities, the Lieb–Thirring type bound for `‖ρ‖_p`, the one-function
//! Gagliardo–Nirenberg inequality, and the finite-rank trace chain.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sphere_basis::{
    basis_len, build_rule, check_degree, BasisSamples, DegreeWarning, HarmonicIndex, QuadratureRule, SpectralCoeffs,
};
use crate::spectral_series::{eval_i, Params};

/// Largest Galerkin dimension accepted by [`GalerkinOperator::new`].
pub const MAX_GALERKIN_DIM: usize = 400;
/// Floor added to squared random fields so potentials stay strictly positive.
pub const POTENTIAL_FLOOR: f64 = 1e-6;

/// `((p-1)/4π)^((p-1)/p)`, equal to 1 at `p = 1`.
pub fn b_p(p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("B_p needs p ≥ 1, got {p}"));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(((p - 1.0) / (4.0 * PI)).powf((p - 1.0) / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    Scalar,
    VectorDivFree,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Scalar => "scalar",
            Flavor::VectorDivFree => "vector",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Flavor::Scalar),
            "vector" => Ok(Flavor::VectorDivFree),
            other => domain(format!("unknown flavor {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mixing {
    /// `ψ_j` is the `j`-th non-constant basis harmonic.
    Identity,
    /// `ψ_j` are rows of a Haar-random orthogonal matrix drawn from the seed.
    Seeded(u64),
}

/// Zero-mean family with `m²(φ_i,φ_j) + (∇φ_i,∇φ_j) = δ_ij`.
///
/// Members are coefficient vectors over the harmonic basis. For the vector
/// flavor they are stream coefficients: `u_j = Σ c w_n^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub m: f64,
    pub flavor: Flavor,
    pub max_degree: usize,
    pub members: Vec<SpectralCoeffs>,
}

/// Smallest degree whose zero-mean space has room for `size` members.
pub fn minimal_degree(size: usize) -> usize {
    (1..).find(|&d| basis_len(d) > size).expect("unbounded search")
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        domain(format!("m must be positive, got {m}"))
    }
}

fn haar_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn build_family(m: f64, size: usize, flavor: Flavor, mixing: Mixing, max_degree: usize) -> Result<Family> {
    check_mass(m)?;
    let dim = basis_len(max_degree) - 1;
    if size > dim {
        return Err(Error::SizeOverflow { size, dim });
    }
    let weight = |pos: usize| 1.0 / (m * m + HarmonicIndex::from_position(pos).eigenvalue()).sqrt();
    let members = match mixing {
        Mixing::Identity => (0..size).map(|j| SpectralCoeffs::single(HarmonicIndex::from_position(j + 1), weight(j + 1))).collect(),
        Mixing::Seeded(seed) => {
            let q = haar_orthogonal(dim, seed);
            (0..size)
                .map(|j| {
                    let mut c = SpectralCoeffs::new();
                    for a in 0..dim {
                        c.set(HarmonicIndex::from_position(a + 1), q[(j, a)] * weight(a + 1));
                    }
                    c
                })
                .collect()
        }
    };
    Ok(Family { m, flavor, max_degree, members })
}

impl Family {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Largest entry of `|G - I|` for the spectral Gram matrix `G_ij = Σ (m²+Λ) c_i c_j`.
    pub fn gram_residual(&self) -> f64 {
        let dense: Vec<Vec<f64>> = self.members.iter().map(|c| c.to_dense(self.max_degree)).collect();
        let w: Vec<f64> =
            (0..basis_len(self.max_degree)).map(|p| self.m * self.m + HarmonicIndex::from_position(p).eigenvalue()).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in dense.iter().enumerate() {
            for (j, b) in dense.iter().enumerate().skip(i) {
                let g: f64 = a.iter().zip(b).zip(&w).map(|((x, y), w)| w * x * y).sum();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// `Σ_j ‖φ_j‖²` (or `Σ_j ‖u_j‖²`), the exact value of `∫ρ dσ`.
    pub fn spectral_mass(&self) -> f64 {
        self.members.iter().map(SpectralCoeffs::l2_norm_sq).sum()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.members.iter().all(SpectralCoeffs::is_zero_mean)
    }

    fn coefficient_matrix(&self, len: usize) -> DMatrix<f64> {
        let mut c = DMatrix::zeros(len, self.size());
        for (j, mem) in self.members.iter().enumerate() {
            for (idx, v) in &mem.entries {
                c[(idx.position(), j)] = *v;
            }
        }
        c
    }

    /// Header line, then `member <j>` before each block of `n k value` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("m={} flavor={} n={}\n", self.m, self.flavor, self.size());
        for (j, c) in self.members.iter().enumerate() {
            s.push_str(&format!("member {}\n", j + 1));
            s.push_str(&c.to_text());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (hno, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing family header".into() })?;
        let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut m = None;
        let mut flavor = None;
        let mut size = None;
        for field in header.split_whitespace() {
            let (key, val) = field.split_once('=').ok_or_else(|| bad(hno, "header field without '='"))?;
            match key {
                "m" => m = Some(val.parse::<f64>().map_err(|_| bad(hno, "bad m"))?),
                "flavor" => flavor = Some(val.parse::<Flavor>().map_err(|_| bad(hno, "bad flavor"))?),
                "n" => size = Some(val.parse::<usize>().map_err(|_| bad(hno, "bad n"))?),
                _ => return Err(bad(hno, "unknown header field")),
            }
        }
        let (m, flavor, size) = match (m, flavor, size) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(bad(hno, "header needs m, flavor and n")),
        };
        let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
        for (no, l) in lines {
            if let Some(rest) = l.trim().strip_prefix("member") {
                if rest.trim().parse::<usize>().ok() != Some(blocks.len() + 1) {
                    return Err(bad(no, "members must be numbered consecutively from 1"));
                }
                blocks.push(Vec::new());
            } else {
                blocks.last_mut().ok_or_else(|| bad(no, "coefficient line before first member"))?.push((no, l));
            }
        }
        if blocks.len() != size {
            return Err(bad(hno, "member count does not match header"));
        }
        let members = blocks.into_iter().map(SpectralCoeffs::parse_lines).collect::<Result<Vec<_>>>()?;
        let max_degree = members.iter().map(|c| c.max_degree).max().unwrap_or(0);
        check_mass(m)?;
        Ok(Family { m, flavor, max_degree, members })
    }
}

/// A rule together with its basis samples, shared between checks.
#[derive(Debug)]
pub struct RuleSamples {
    pub rule: QuadratureRule,
    pub samples: BasisSamples,
}

/// Memoises [`RuleSamples`] by `(rule degree, basis degree, gradients)`.
#[derive(Debug, Default)]
pub struct SampleCache {
    map: Mutex<HashMap<(usize, usize, bool), Arc<RuleSamples>>>,
}

impl SampleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, rule_degree: usize, max_degree: usize, gradients: bool) -> Result<Arc<RuleSamples>> {
        let key = (rule_degree, max_degree, gradients);
        if let Some(hit) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let rule = build_rule(rule_degree)?;
        let samples = BasisSamples::new(&rule, max_degree, gradients)?;
        let entry = Arc::new(RuleSamples { rule, samples });
        Ok(self.map.lock().expect("cache lock").entry(key).or_insert(entry).clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub values: Vec<f64>,
    pub n_members: usize,
    pub warning: Option<DegreeWarning>,
}

impl DensityField {
    pub fn integral(&self, rule: &QuadratureRule) -> f64 {
        rule.integrate(&self.values)
    }
}

fn node_matrix(table: &[f64], len: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(table.len() / len, len, table)
}

fn density_from_samples(fam: &Family, samples: &BasisSamples) -> Result<Vec<f64>> {
    if fam.max_degree > samples.max_degree {
        return domain("basis samples do not cover the family degree");
    }
    let c = fam.coefficient_matrix(samples.len);
    let sum_sq = |vals: &DMatrix<f64>| -> Vec<f64> { vals.row_iter().map(|r| r.norm_squared()).collect() };
    match fam.flavor {
        Flavor::Scalar => Ok(sum_sq(&(node_matrix(&samples.values, samples.len) * c))),
        Flavor::VectorDivFree => {
            let (gt, gp) = match (&samples.grad_theta, &samples.grad_phi) {
                (Some(a), Some(b)) => (a, b),
                _ => return domain("vector densities need gradient samples"),
            };
            let mut scaled = c;
            for (pos, mut row) in scaled.row_iter_mut().enumerate() {
                let lam = HarmonicIndex::from_position(pos).eigenvalue();
                row *= if lam == 0.0 { 0.0 } else { 1.0 / lam.sqrt() };
            }
            let a = sum_sq(&(node_matrix(gt, samples.len) * &scaled));
            let b = sum_sq(&(node_matrix(gp, samples.len) * &scaled));
            Ok(a.into_iter().zip(b).map(|(x, y)| x + y).collect())
        }
    }
}

/// `ρ = Σ_j |φ_j|²` (or `Σ_j |u_j|²`) at the nodes of `rule`.
pub fn density(fam: &Family, rule: &QuadratureRule) -> Result<DensityField> {
    let samples = BasisSamples::new(rule, fam.max_degree, fam.flavor == Flavor::VectorDivFree)?;
    Ok(DensityField {
        values: density_from_samples(fam, &samples)?,
        n_members: fam.size(),
        warning: check_degree(2 * fam.max_degree, rule),
    })
}

/// A ratio together with the difference against a rule twice as fine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub value: f64,
    pub error: f64,
}

impl RatioReport {
    pub fn holds(&self) -> bool {
        self.value <= 1.0 + self.error
    }
}

fn lp_of(values: &[f64], p: f64, rule: &QuadratureRule) -> f64 {
    crate::sphere_basis::lp_norm(values, p, rule)
}

fn theorem1_denominator(fam: &Family, p: f64) -> Result<f64> {
    if fam.members.is_empty() {
        return domain("family is empty");
    }
    Ok(b_p(p)? * fam.m.powf(-2.0 / p) * (fam.size() as f64).powf(1.0 / p))
}

/// `‖ρ‖_{L^p} / (B_p m^(-2/p) n^(1/p))`, at most 1 for admissible families.
pub fn theorem1_ratio(fam: &Family, p: f64, rule: &QuadratureRule) -> Result<f64> {
    let den = theorem1_denominator(fam, p)?;
    let rho = density(fam, rule)?;
    Ok(lp_of(&rho.values, p, rule) / den)
}

/// Rule degree `2·D·⌈p⌉·2` used for `L^p` norms of degree-`2D` densities.
pub fn lp_rule_degree(max_degree: usize, p: f64) -> usize {
    (4 * max_degree * p.ceil().max(1.0) as usize).max(1)
}

/// [`theorem1_ratio`] on the oversampled rule, with the error bar against a
/// rule of twice the degree.
pub fn theorem1_check(fam: &Family, p: f64, cache: &SampleCache) -> Result<RatioReport> {
    let den = theorem1_denominator(fam, p)?;
    let d = lp_rule_degree(fam.max_degree, p);
    let grads = fam.flavor == Flavor::VectorDivFree;
    let coarse = cache.get(d, fam.max_degree, grads)?;
    let fine = cache.get(2 * d, fam.max_degree, grads)?;
    let a = lp_of(&density_from_samples(fam, &coarse.samples)?, p, &coarse.rule) / den;
    let b = lp_of(&density_from_samples(fam, &fine.samples)?, p, &fine.rule) / den;
    Ok(RatioReport { value: a, error: (a - b).abs() })
}

/// `(1/4π)^((q-2)/2q) (q/2)^(1/2)`.
pub fn gn_constant(q: f64) -> f64 {
    (4.0 * PI).powf(-(q - 2.0) / (2.0 * q)) * (q / 2.0).sqrt()
}

fn gn_denominator(c: &SpectralCoeffs, q: f64) -> Result<f64> {
    if !(q >= 2.0 && q.is_finite()) {
        return domain(format!("q must be at least 2, got {q}"));
    }
    if c.is_zero() {
        return Err(Error::ZeroField);
    }
    if !c.is_zero_mean() {
        return domain("field must have zero mean");
    }
    let l2 = c.l2_norm_sq().sqrt();
    let gr = c.grad_norm_sq().sqrt();
    Ok(gn_constant(q) * l2.powf(2.0 / q) * gr.powf(1.0 - 2.0 / q))
}

/// `‖φ‖_{L^q} / (C_q ‖φ‖^(2/q) ‖∇φ‖^(1-2/q))` with spectral norms on the right.
pub fn gn_ratio(c: &SpectralCoeffs, q: f64, rule: &QuadratureRule) -> Result<f64> {
    let den = gn_denominator(c, q)?;
    let f = crate::sphere_basis::synthesize(c, rule)?;
    Ok(lp_of(&f.values, q, rule) / den)
}

/// [`gn_ratio`] on a rule of degree `2·D·⌈q/2⌉·2` with a finer-rule error bar.
pub fn gn_check(c: &SpectralCoeffs, q: f64, cache: &SampleCache) -> Result<RatioReport> {
    let den = gn_denominator(c, q)?;
    let d = lp_rule_degree(c.max_degree, q / 2.0);
    let dense = c.to_dense(c.max_degree);
    let eval = |deg: usize| -> Result<f64> {
        let rs = cache.get(deg, c.max_degree, false)?;
        Ok(lp_of(&rs.samples.synthesize(&dense), q, &rs.rule) / den)
    };
    let a = eval(d)?;
    let b = eval(2 * d)?;
    Ok(RatioReport { value: a, error: (a - b).abs() })
}

/// Finite-rank matrix of `K = Π(m²-Δ)^(-1/2) V (m²-Δ)^(-1/2) Π` on the zero-mean
/// harmonics (or vector eigenfunctions) of degree at most `max_degree`.
#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    pub dimension: usize,
    pub m: f64,
    pub flavor: Flavor,
    /// `∫ V b_a b_b dσ` before the resolvent scaling.
    pub potential: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
    /// Eigenvalues of `matrix`, ascending, clamped at 0.
    pub spectrum: Vec<f64>,
    pub warning: Option<DegreeWarning>,
}

fn clamped_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000).ok_or_else(|| Error::Eigen("no convergence".into()))?;
    Ok((eig.eigenvalues.iter().map(|v| v.max(0.0)).collect(), eig.eigenvectors))
}

impl GalerkinOperator {
    pub fn new(m: f64, v: &SpectralCoeffs, max_degree: usize, rule: &QuadratureRule, flavor: Flavor) -> Result<Self> {
        check_mass(m)?;
        let dimension = basis_len(max_degree) - 1;
        if dimension > MAX_GALERKIN_DIM {
            return Err(Error::SizeOverflow { size: dimension, dim: MAX_GALERKIN_DIM });
        }
        let len = basis_len(max_degree.max(v.max_degree));
        let samples = BasisSamples::new(rule, max_degree.max(v.max_degree), flavor == Flavor::VectorDivFree)?;
        let vals = samples.synthesize(&v.to_dense(samples.max_degree));
        if let Some(bad) = vals.iter().copied().find(|x| *x < 0.0) {
            return Err(Error::NegativePotential { value: bad });
        }
        let wv: Vec<f64> = rule.weights.iter().zip(&vals).map(|(w, v)| w * v).collect();
        let cols: Vec<usize> = (1..=dimension).collect();
        let pick = |table: &[f64], scale: &dyn Fn(usize) -> f64| {
            DMatrix::from_fn(rule.len(), dimension, |i, j| table[i * len + cols[j]] * scale(cols[j]))
        };
        let one = |_: usize| 1.0;
        let inv_sqrt_lam = |pos: usize| 1.0 / HarmonicIndex::from_position(pos).eigenvalue().sqrt();
        let gram = |b: &DMatrix<f64>| {
            let mut wb = b.clone();
            for (i, mut row) in wb.row_iter_mut().enumerate() {
                row *= wv[i];
            }
            b.transpose() * wb
        };
        let potential = match flavor {
            Flavor::Scalar => gram(&pick(&samples.values, &one)),
            Flavor::VectorDivFree => {
                let gt = samples.grad_theta.as_ref().expect("gradients requested");
                let gp = samples.grad_phi.as_ref().expect("gradients requested");
                gram(&pick(gt, &inv_sqrt_lam)) + gram(&pick(gp, &inv_sqrt_lam))
            }
        };
        let potential = (&potential + potential.transpose()) * 0.5;
        let s: Vec<f64> = cols.iter().map(|&p| 1.0 / (m * m + HarmonicIndex::from_position(p).eigenvalue()).sqrt()).collect();
        let matrix = DMatrix::from_fn(dimension, dimension, |i, j| s[i] * potential[(i, j)] * s[j]);
        let (spectrum, _) = clamped_eigen(&matrix)?;
        let mut spectrum = spectrum;
        spectrum.sort_by(f64::total_cmp);
        let warning = check_degree(2 * max_degree + v.max_degree, rule);
        Ok(GalerkinOperator { dimension, m, flavor, potential, matrix, spectrum, warning })
    }

    /// Largest entry of `|K - Kᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// `Tr K^r`.
    pub fn trace_power(&self, r: f64) -> f64 {
        self.spectrum.iter().map(|l| l.powf(r)).sum()
    }

    /// Sum of the `n` largest eigenvalues.
    pub fn top_sum(&self, n: usize) -> f64 {
        self.spectrum.iter().rev().take(n).sum()
    }

    /// `Tr (m²-Δ)^(-r/2) (ΠVΠ)^r (m²-Δ)^(-r/2)` at finite rank.
    pub fn commuted_trace(&self, r: f64) -> Result<f64> {
        let (vals, vecs) = clamped_eigen(&self.potential)?;
        let mut total = 0.0;
        for a in 0..self.dimension {
            let lam = HarmonicIndex::from_position(a + 1).eigenvalue();
            let diag: f64 = vals.iter().enumerate().map(|(i, l)| l.powf(r) * vecs[(a, i)] * vecs[(a, i)]).sum();
            total += (self.m * self.m + lam).powf(-r) * diag;
        }
        Ok(total)
    }
}

/// Both sides of the trace inequality `Tr K^r ≤ Tr V^r (m²-Δ)^(-r) Π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub r: f64,
    pub lhs: f64,
    /// Same trace with `V` and the resolvent commuted, at the same finite rank.
    pub rhs: f64,
    /// Infinite-rank right side `∫V^r dσ · Σ_{n≥1} (2n+1)/(4π) (m²+Λ_n)^(-r)`, for `r > 1`.
    pub rhs_continuum: Option<f64>,
}

impl TraceCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-8) && self.rhs_continuum.is_none_or(|c| self.lhs <= c * (1.0 + 1e-8))
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// [`alt_trace_check_r`] with `r = p/(p-1)`; `p = ∞` gives `r = 1`.
pub fn alt_trace_check(m: f64, p: f64, v: &SpectralCoeffs, max_degree: usize, rule: &QuadratureRule) -> Result<TraceCheck> {
    if !(p > 1.0) {
        return domain(format!("trace check needs p > 1, got {p}"));
    }
    let r = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    alt_trace_check_r(m, r, v, max_degree, rule, Flavor::Scalar)
}

pub fn alt_trace_check_r(
    m: f64,
    r: f64,
    v: &SpectralCoeffs,
    max_degree: usize,
    rule: &QuadratureRule,
    flavor: Flavor,
) -> Result<TraceCheck> {
    if !(r >= 1.0 && r.is_finite()) {
        return domain(format!("trace exponent must be at least 1, got {r}"));
    }
    let op = GalerkinOperator::new(m, v, max_degree, rule, flavor)?;
    let lhs = op.trace_power(r);
    let rhs = op.commuted_trace(r)?;
    let rhs_continuum = if r > 1.0 {
        let vals = crate::sphere_basis::synthesize(v, rule)?.values;
        let v_r: f64 = rule.weights.iter().zip(&vals).map(|(w, x)| w * x.max(0.0).powf(r)).sum();
        // Σ (2n+1)(m²+Λ_n)^(-r) = I_r(m) / ((r-1) m^(2r-2))
        let i = eval_i(Params::new(r, m)?, 1e-12)?;
        Some(v_r * i.hi / ((r - 1.0) * m.powf(2.0 * r - 2.0)) / (4.0 * PI))
    } else {
        None
    };
    Ok(TraceCheck { r, lhs, rhs, rhs_continuum })
}

/// `(∫ρV dσ, Σ_{i≤n} λ_i(K))`: the variational principle gives the first ≤ the second.
pub fn variational_step_check(fam: &Family, v: &SpectralCoeffs, rule: &QuadratureRule, max_degree: usize) -> Result<(f64, f64)> {
    if fam.max_degree > max_degree {
        return domain("family is not contained in the Galerkin space");
    }
    if v.is_zero() {
        return Ok((0.0, 0.0));
    }
    let op = GalerkinOperator::new(fam.m, v, max_degree, rule, fam.flavor)?;
    let samples = BasisSamples::new(rule, max_degree.max(v.max_degree), fam.flavor == Flavor::VectorDivFree)?;
    let rho = density_from_samples(fam, &samples)?;
    let vals = samples.synthesize(&v.to_dense(samples.max_degree));
    let sum_quad: f64 = rule.weights.iter().zip(rho.iter().zip(&vals)).map(|(w, (r, v))| w * r * v).sum();
    Ok((sum_quad, op.top_sum(fam.size())))
}

/// Rule exact for `V·b_a·b_b` with `deg V = v_degree` and basis degree `max_degree`.
pub fn galerkin_rule(max_degree: usize, v_degree: usize) -> Result<QuadratureRule> {
    build_rule(2 * max_degree + v_degree)
}

/// Gaussian coefficients on all harmonics of degree ≤ `max_degree`.
pub fn random_field(seed: u64, max_degree: usize, zero_mean: bool) -> SpectralCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = SpectralCoeffs::new();
    for pos in usize::from(zero_mean)..basis_len(max_degree) {
        c.set(HarmonicIndex::from_position(pos), StandardNormal.sample(&mut rng));
    }
    c
}

/// `f² + 10⁻⁶` for a random field `f` of degree `degree`, projected exactly
/// onto harmonics of degree ≤ `2·degree`.
pub fn nonnegative_potential(seed: u64, degree: usize) -> Result<SpectralCoeffs> {
    let f = random_field(seed, degree, false);
    let rule = build_rule(4 * degree)?;
    let samples = BasisSamples::new(&rule, 2 * degree, false)?;
    let fv = samples.synthesize(&f.to_dense(2 * degree));
    let wsq: Vec<f64> = rule.weights.iter().zip(&fv).map(|(w, x)| w * x * x).collect();
    let mut coeffs: Vec<f64> = vec![0.0; samples.len];
    for (row, w) in samples.values.chunks_exact(samples.len).zip(&wsq) {
        for (c, y) in coeffs.iter_mut().zip(row) {
            *c += w * y;
        }
    }
    coeffs[0] += POTENTIAL_FLOOR * (4.0 * PI).sqrt();
    let mut v = SpectralCoeffs::from_dense(&coeffs);
    v.max_degree = 2 * degree;
    Ok(v)
}

/// Interpolation constants compared at one exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub q: f64,
    /// Zero-mean sphere constant `(1/4π)^((q-2)/2q) (q/2)^(1/2)`.
    pub gn_sphere: f64,
    /// `(1/4π)^((q-2)/2q) ((q-1)/2)^(1/2)`.
    pub beckner_route: f64,
    /// `(1/4π)^((q-2)/2q) (q/2)^(1/2) 2^(-1/q)`.
    pub zero_mean_route: f64,
    /// Plane constant `(1/4π)^((q-2)/2q) q^((q-2)/q) (q-1)^(-(q-1)/q) (q/2)^(1/2)`.
    pub plane: f64,
    /// Conjectured sharp asymptote `√(q/8π)`.
    pub asymptote: f64,
    /// `‖φ‖⁴_{L⁴} ≤ c ‖φ‖²‖∇φ‖²` constant from the sphere inequality at `q = 4`.
    pub ladyzhenskaya: f64,
    pub two_pow: f64,
    pub one_minus_inv_q: f64,
    pub comparison_holds: bool,
}

pub fn compare_constants(q: f64) -> Result<ConstantsTable> {
    if !(q >= 2.0 && q.is_finite()) {
        return domain(format!("q must be at least 2, got {q}"));
    }
    let base = (4.0 * PI).powf(-(q - 2.0) / (2.0 * q));
    let two_pow = 2f64.powf(-2.0 / q);
    let one_minus_inv_q = 1.0 - 1.0 / q;
    Ok(ConstantsTable {
        q,
        gn_sphere: gn_constant(q),
        beckner_route: base * ((q - 1.0) / 2.0).sqrt(),
        zero_mean_route: base * (q / 2.0).sqrt() * 2f64.powf(-1.0 / q),
        plane: base * q.powf((q - 2.0) / q) * (q - 1.0).powf(-(q - 1.0) / q) * (q / 2.0).sqrt(),
        asymptote: (q / (8.0 * PI)).sqrt(),
        ladyzhenskaya: gn_constant(4.0).powi(4),
        two_pow,
        one_minus_inv_q,
        comparison_holds: two_pow <= one_minus_inv_q,
    })
}
