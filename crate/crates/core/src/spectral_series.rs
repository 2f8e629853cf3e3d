//! Certified evaluation of the spectral series
//!
//! ```text
//! I_p(m) = (p-1) m^(2(p-1)) Σ_{n≥1} (2n+1) / (m² + n² + n)^p
//! J_p(m) = (p-1) m^(2(p-1)) / π · Σ_{n ∈ Z² \ 0} (m² + |n|²)^(-p)
//! R(p)   = Σ_{n≥2} (2n+1) / (n² + n)^p
//! ```
//!
//! Each value comes back as a [`CertifiedValue`]: an explicit compensated
//! partial sum plus a rigorous tail bracket, inflated for rounding. The
//! enclosures are sound up to the binary64 rounding model described in
//! [`crate::summation`]; this is not interval arithmetic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::em_tail::{euler_maclaurin_tail, integral_test_tail, power_tail, QuadraticPower, TailBracket};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, integrate_tail};
use crate::summation::{CompensatedSum, EPS};

/// Cap on explicitly summed terms for the one-dimensional series.
pub const SCALAR_TERM_CAP: u64 = 100_000_000;
/// Cap on explicitly summed lattice points for `J`.
pub const LATTICE_POINT_CAP: u64 = 40_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub m: f64,
}

impl Params {
    /// Accepts `p ≥ 1`, `m ≥ 0`. Certified evaluations additionally need `p > 1`.
    pub fn new(p: f64, m: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return domain(format!("p must be a finite number ≥ 1, got {p}"));
        }
        if !(m.is_finite() && m >= 0.0) {
            return domain(format!("m must be a finite number ≥ 0, got {m}"));
        }
        Ok(Params { p, m })
    }

    fn require_p_gt_1(&self) -> Result<()> {
        if self.p > 1.0 {
            Ok(())
        } else {
            domain(format!("series needs p > 1, got {}", self.p))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailMethod {
    IntegralTest,
    EulerMaclaurinTail,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub lo: f64,
    pub hi: f64,
    pub tail_method: TailMethod,
    pub terms_used: u64,
}

impl CertifiedValue {
    pub fn exact(v: f64) -> Self {
        CertifiedValue { lo: v, hi: v, tail_method: TailMethod::ClosedForm, terms_used: 0 }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        domain(format!("tolerance must be positive, got {tol}"))
    }
}

/// Summand `f(x) = scale · (2x+1) w(x)^(-p)` written as `-scale/(p-1) · D[w^(1-p)]`,
/// `w = αx² + αx + γ`. `term` evaluates the same function in the hot loop.
struct OddSeries {
    f: QuadraticPower,
    p: f64,
    alpha: f64,
    gamma: f64,
    scale: f64,
}

impl OddSeries {
    fn new(p: f64, alpha: f64, gamma: f64, scale: f64) -> Self {
        let f = QuadraticPower { alpha, beta: alpha, gamma, exponent: 1.0 - p, scale: scale / ((1.0 - p) * alpha), shift: 1 };
        OddSeries { f, p, alpha, gamma, scale }
    }

    #[inline]
    fn term(&self, n: u64) -> f64 {
        let x = n as f64;
        let w = self.alpha * (x * x + x) + self.gamma;
        self.scale * (2.0 * x + 1.0) * w.powf(-self.p)
    }

    /// Sums `n ≥ first` to width `tol`, doubling the cutoff as needed.
    fn enclose(&self, first: u64, start: u64, tol: f64) -> Result<CertifiedValue> {
        let mut acc = CompensatedSum::new();
        let mut next = first;
        let mut cut = start.max(first);
        let mut last_width = f64::INFINITY;
        loop {
            while next <= cut {
                acc.add(self.term(next));
                next += 1;
            }
            let s = acc.value();
            let round = acc.error_bound();
            if round > tol {
                return Err(Error::NonConvergent { tol, cap: SCALAR_TERM_CAP, width: round });
            }
            let nf = cut as f64;
            let mut best: Option<(TailBracket, TailMethod)> = None;
            if let Some(b) = integral_test_tail(&self.f, nf)? {
                best = Some((b, TailMethod::IntegralTest));
            }
            if best.is_none_or(|(b, _)| b.width() + round > tol) {
                let b = euler_maclaurin_tail(&self.f, nf)?;
                if best.is_none_or(|(old, _)| b.width() < old.width()) {
                    best = Some((b, TailMethod::EulerMaclaurinTail));
                }
            }
            let (tail, method) = best.expect("at least one tail bracket");
            let lo = (s - round + tail.lo).max(0.0);
            let hi = s + round + tail.hi;
            last_width = last_width.min(hi - lo);
            if hi - lo <= tol {
                return Ok(CertifiedValue { lo, hi, tail_method: method, terms_used: acc.count() });
            }
            if cut.saturating_mul(2) > SCALAR_TERM_CAP {
                return Err(Error::NonConvergent { tol, cap: SCALAR_TERM_CAP, width: last_width });
            }
            cut *= 2;
        }
    }
}

fn initial_cutoff(p: f64, m: f64) -> u64 {
    10u64.max(m.ceil() as u64).max(p.ceil() as u64)
}

/// Enclosure of `I_p(m)` of width at most `tol`.
pub fn eval_i(params: Params, tol: f64) -> Result<CertifiedValue> {
    params.require_p_gt_1()?;
    check_tol(tol)?;
    let Params { p, m } = params;
    if m == 0.0 {
        return Ok(CertifiedValue::exact(0.0));
    }
    // (p-1) m^(2(p-1)) (2n+1)(m²+n²+n)^(-p) = (p-1)/m² (2n+1) (1 + (n²+n)/m²)^(-p)
    let m2 = m * m;
    let series = OddSeries::new(p, 1.0 / m2, 1.0, (p - 1.0) / m2);
    series.enclose(1, initial_cutoff(p, m), tol)
}

/// Enclosure of `R(p) = Σ_{n≥2} (2n+1)/(n²+n)^p`.
pub fn eval_r(p: f64, tol: f64) -> Result<CertifiedValue> {
    Params::new(p, 0.0)?.require_p_gt_1()?;
    check_tol(tol)?;
    let series = OddSeries::new(p, 1.0, 0.0, 1.0);
    series.enclose(2, initial_cutoff(p, 0.0), tol)
}

/// `∫_R (1 + y²)^(-q) dy`.
fn full_line_integral(q: f64) -> Result<(f64, f64)> {
    let (v, e) = power_tail(q, 0.0)?;
    Ok((2.0 * v, 2.0 * e))
}

/// Enclosure of the lattice sum `J_p(m)`.
///
/// Rows `|j| ≤ N` are summed explicitly for `|i| ≤ N` with an
/// Euler–Maclaurin tail in `i`. Rows `|j| > N` are replaced by their full-line
/// integral (Euler–Maclaurin over all of `Z` with the `f'`, `f'''` terms
/// cancelling by symmetry) and the resulting sum over `j` gets its own
/// Euler–Maclaurin tail.
pub fn eval_j(params: Params, tol: f64) -> Result<CertifiedValue> {
    params.require_p_gt_1()?;
    check_tol(tol)?;
    let Params { p, m } = params;
    if m == 0.0 {
        return Ok(CertifiedValue::exact(0.0));
    }
    let m2 = m * m;
    let alpha = 1.0 / m2;
    let prefactor = (p - 1.0) / (PI * m2);

    // Σ_Z (a + αx²)^(-p) = m β_p a^(1/2-p) ± (2/720) κ_p m^-3 a^(-p-3/2)
    let (beta_p, beta_err) = full_line_integral(p)?;
    let kappa = QuadraticPower { alpha: 1.0, beta: 0.0, gamma: 1.0, exponent: -p, scale: 1.0, shift: 0 }.d3_variation(0.0);

    let mut cut: u64 = 8;
    let mut last_width = f64::INFINITY;
    loop {
        let nf = cut as f64;
        let mut explicit = CompensatedSum::new();
        let mut tails_lo = CompensatedSum::new();
        let mut tails_hi = CompensatedSum::new();
        for j in 0..=cut {
            let jf = j as f64;
            let a = 1.0 + jf * jf * alpha;
            let weight = if j == 0 { 1.0 } else { 2.0 };
            // i = 0 column, excluding the origin
            if j > 0 {
                explicit.add(weight * a.powf(-p));
            }
            for i in 1..=cut {
                let x = i as f64;
                explicit.add(2.0 * weight * (a + alpha * x * x).powf(-p));
            }
            let row = QuadraticPower { alpha, beta: 0.0, gamma: a, exponent: -p, scale: 2.0 * weight, shift: 0 };
            let t = euler_maclaurin_tail(&row, nf)?;
            tails_lo.add(t.lo);
            tails_hi.add(t.hi);
        }
        // rows j > N, counted twice for ±j
        let far = QuadraticPower { alpha, beta: 0.0, gamma: 1.0, exponent: 0.5 - p, scale: 2.0 * m * beta_p, shift: 0 };
        let far_t = euler_maclaurin_tail(&far, nf)?;
        let far_rel = beta_err / beta_p;
        let far_lo = far_t.lo - far_rel * far_t.hi.abs();
        let far_hi = far_t.hi + far_rel * far_t.hi.abs();
        let err_weight = QuadraticPower { alpha, beta: 0.0, gamma: 1.0, exponent: -p - 1.5, scale: 1.0, shift: 0 };
        let (err_int, err_int_err) = err_weight.tail_integral(nf)?;
        let row_err = 2.0 * (2.0 / 720.0) * kappa * m.powi(-3) * (err_int + err_int_err) * (1.0 + 1e-12);

        let s = explicit.value();
        let round = explicit.error_bound() + tails_lo.error_bound() + tails_hi.error_bound();
        let lo = prefactor * (s + tails_lo.value() + far_lo - row_err - round);
        let hi = prefactor * (s + tails_hi.value() + far_hi + row_err + round);
        let infl = 8.0 * EPS * hi.abs();
        let lo = (lo - infl).max(0.0);
        let hi = hi + infl;
        last_width = last_width.min(hi - lo);
        let points = (2 * cut + 1) * (2 * cut + 1);
        if hi - lo <= tol {
            return Ok(CertifiedValue { lo, hi, tail_method: TailMethod::EulerMaclaurinTail, terms_used: points });
        }
        let next_points = (4 * cut + 1) * (4 * cut + 1);
        if next_points > LATTICE_POINT_CAP {
            return Err(Error::NonConvergent { tol, cap: LATTICE_POINT_CAP, width: last_width });
        }
        cut *= 2;
    }
}

/// Relative defect `|Q / (π m^(2-2p)/(p-1)) - 1|` of an adaptive radial
/// quadrature `Q` of `∫_{R²} (m² + |x|²)^(-p) dx`.
pub fn r2_integral_check(params: Params) -> Result<f64> {
    params.require_p_gt_1()?;
    let Params { p, m } = params;
    if !(m > 0.0) {
        return domain("plane integral check needs m > 0");
    }
    let f = |r: f64| 2.0 * PI * r * (m * m + r * r).powf(-p);
    let head = integrate(f, 0.0, m, 1e-14, 0.0)?;
    let tail = integrate_tail(f, m, 2.0 * p - 1.0, 1e-14, 0.0)?;
    let q = head.value + tail.value;
    let closed = PI * m.powf(2.0 - 2.0 * p) / (p - 1.0);
    Ok((q / closed - 1.0).abs())
}

/// `(1 - I_p(m)) m² · 3 / (2(p-1))`, which tends to 1 as `m → ∞`.
pub fn asymptotic_defect(params: Params, tol: f64) -> Result<f64> {
    params.require_p_gt_1()?;
    if params.m < 10.0 {
        return domain(format!("asymptotic regime needs m ≥ 10, got {}", params.m));
    }
    let v = eval_i(params, tol)?;
    let Params { p, m } = params;
    Ok((1.0 - v.mid()) * m * m * 3.0 / (2.0 * (p - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairStatus {
    /// Enclosures overlap; neither increase nor decrease is certified.
    Inconclusive,
    /// The right enclosure lies strictly below the left one.
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFinding {
    pub m_left: f64,
    pub m_right: f64,
    pub left: CertifiedValue,
    pub right: CertifiedValue,
    pub status: PairStatus,
}

/// Evidence about monotonicity of `m ↦ I_p(m)` on a grid. Pairs where the
/// increase is certified are counted but not listed. This is numerical
/// evidence, never a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub p: f64,
    pub pairs_checked: usize,
    pub certified_increasing: usize,
    pub findings: Vec<PairFinding>,
}

impl MonotonicityReport {
    pub fn violations(&self) -> usize {
        self.findings.iter().filter(|f| f.status == PairStatus::Violation).count()
    }

    pub fn inconclusive(&self) -> usize {
        self.findings.iter().filter(|f| f.status == PairStatus::Inconclusive).count()
    }
}

pub fn scan_monotonicity(p: f64, m_grid: &[f64], tol: f64) -> Result<MonotonicityReport> {
    if m_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("m grid must be strictly ascending");
    }
    if m_grid.iter().any(|m| !(*m >= 0.0)) {
        return domain("m grid values must be ≥ 0");
    }
    let values = crate::par::map(m_grid, |&m| eval_i(Params::new(p, m)?, tol));
    let values: Vec<CertifiedValue> = values.into_iter().collect::<Result<_>>()?;
    let mut report = MonotonicityReport { p, pairs_checked: 0, certified_increasing: 0, findings: Vec::new() };
    for (i, w) in values.windows(2).enumerate() {
        report.pairs_checked += 1;
        let (l, r) = (w[0], w[1]);
        if r.lo > l.hi {
            report.certified_increasing += 1;
            continue;
        }
        let status = if r.hi < l.lo { PairStatus::Violation } else { PairStatus::Inconclusive };
        report.findings.push(PairFinding { m_left: m_grid[i], m_right: m_grid[i + 1], left: l, right: r, status });
    }
    Ok(report)
}
