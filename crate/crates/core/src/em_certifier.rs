//! Machine re-execution of the case analysis proving `I_p(m) < 1`.
//!
//! The argument splits the `(p, m)` half-plane into four regions:
//!
//! * `m > m0(p)`: the Euler–Maclaurin majorant [`em_upper_bound`] is below 1;
//! * `m ≤ m0(p)`, `p ≤ 2`: first term split off, `G(m,p) - 1 < A(z,p) φ(z,p)`
//!   with `z = m²/2`, and `φ < 0`;
//! * `2 < p ≤ p*`: same chain, with `φ` monotone in `z` so `φ(z*, p) < 0`
//!   suffices;
//! * `p > p*`: monotonicity of every term in `p` below `m1(p)`, from a base
//!   exponent where one of the first two branches applies.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::par::{self, Execution};
use crate::spectral_series::{eval_i, eval_r, Params};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmClosedForms {
    /// `f_m(0)`
    pub f0: f64,
    /// `f_m'(0)`
    pub f1: f64,
    /// `f_m'''(0)`
    pub f3: f64,
    /// `∫_0^∞ g`, the majorant of `|f_m''''|`
    pub g_integral: f64,
}

/// Remainder constant `2ζ(4)/(2π)⁴` of the fourth-order Euler–Maclaurin formula.
pub const EM_REMAINDER_CONSTANT: f64 = 1.0 / 720.0;

fn require_positive_mass(params: Params) -> Result<()> {
    if !(params.p > 1.0) {
        return domain(format!("needs p > 1, got {}", params.p));
    }
    if !(params.m > 0.0) {
        return domain(format!("needs m > 0, got {}", params.m));
    }
    Ok(())
}

/// `f_m(x) = (p-1) m^(2(p-1)) (2x+1) / (m² + x² + x)^p`.
pub fn summand(params: Params, x: f64) -> f64 {
    let Params { p, m } = params;
    let m2 = m * m;
    (p - 1.0) / m2 * (2.0 * x + 1.0) * (1.0 + (x * x + x) / m2).powf(-p)
}

/// `|f_m''''| ≤ g` with `g` the sign-flipped fourth derivative.
pub fn g_majorant(params: Params, x: f64) -> f64 {
    let Params { p, m } = params;
    let t = x + 0.5;
    let m2 = m * m;
    let w = 1.0 + (x * x + x) / m2;
    // m^(2p-2) u^(-p-k) = m^(-2-2k) w^(-p-k)
    32.0 * p * (p * p - 1.0)
        * (t.powi(5) * (p + 2.0) * (p + 3.0) * m2.powi(-5) * w.powf(-p - 4.0)
            + 5.0 * t.powi(3) * (p + 2.0) * m2.powi(-4) * w.powf(-p - 3.0)
            + 3.75 * t * m2.powi(-3) * w.powf(-p - 2.0))
}

pub fn closed_forms(params: Params) -> Result<EmClosedForms> {
    require_positive_mass(params)?;
    let Params { p, m } = params;
    let m2 = m * m;
    let m4 = m2 * m2;
    let m8 = m4 * m4;
    Ok(EmClosedForms {
        f0: (p - 1.0) / m2,
        f1: (p - 1.0) * (2.0 * m2 - p) / m4,
        f3: -(p - 1.0) * p * (12.0 * m4 - 12.0 * m2 * p - 12.0 * m2 + p * p + 3.0 * p + 2.0) / m8,
        g_integral: p * (p - 1.0) * (172.0 * m4 + 28.0 * (p + 1.0) * m2 + p * p + 3.0 * p + 2.0) / m8,
    })
}

/// Largest relative error between the closed-form `f'(0)`, `f'''(0)` and
/// fourth-order central differences with step `h`.
///
/// Errors are relative to `max(|closed form|, f(0))`, so a derivative that
/// vanishes exactly (e.g. `f'(0)` at `2m² = p`) is still measured sensibly.
pub fn finite_difference_check(params: Params, h: f64) -> Result<f64> {
    require_positive_mass(params)?;
    if !(h > 0.0 && h <= 0.1) {
        return domain(format!("step must lie in (0, 0.1], got {h}"));
    }
    let cf = closed_forms(params)?;
    let f = |x: f64| summand(params, x);
    let d1 = (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
    let d3 = (13.0 * (f(-h) - f(h)) + 8.0 * (f(2.0 * h) - f(-2.0 * h)) + f(-3.0 * h) - f(3.0 * h)) / (8.0 * h * h * h);
    let e1 = (d1 - cf.f1).abs() / cf.f1.abs().max(cf.f0);
    let e3 = (d3 - cf.f3).abs() / cf.f3.abs().max(cf.f0);
    Ok(e1.max(e3))
}

/// `1 - (p-1) m^-6 (24m⁴ - 11pm² - 2p(p+1)) / 36`, a majorant of `I_p(m)`.
pub fn em_upper_bound(params: Params) -> Result<f64> {
    require_positive_mass(params)?;
    let Params { p, m } = params;
    let m2 = m * m;
    Ok(1.0 - (p - 1.0) * (24.0 * m2 * m2 - 11.0 * p * m2 - 2.0 * p * (p + 1.0)) / (36.0 * m2 * m2 * m2))
}

/// Positive root of `24m⁴ - 11pm² - 2p(p+1)`.
pub fn m0(p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("m0 needs p ≥ 1, got {p}"));
    }
    Ok((3.0 * (313.0 * p * p + 192.0 * p).sqrt() + 33.0 * p).sqrt() / 12.0)
}

/// Below `m1(p) = √2 / √(e^(1/(p-1)) - 1)` every term of `I_p(m)` decreases in `p`.
pub fn m1(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return domain(format!("m1 needs p > 1, got {p}"));
    }
    Ok(2f64.sqrt() / (1.0 / (p - 1.0)).exp_m1().sqrt())
}

/// Inverse of [`m1`]: the exponent at which `m1(p) = m`.
pub fn m1_inverse(m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return domain(format!("m1 inverse needs m > 0, got {m}"));
    }
    Ok(1.0 + 1.0 / (2.0 / (m * m)).ln_1p())
}

/// Bracket used for the crossing `m1(p) = m0(p)`.
pub const P_STAR_BRACKET: (f64, f64) = (2.0, 2.5);

fn crossing(p: f64) -> f64 {
    m1(p).expect("p > 1 in bracket") - m0(p).expect("p ≥ 1 in bracket")
}

/// Number of sign changes of `m1 - m0` on a uniform `samples`-point scan of the bracket.
pub fn crossing_sign_changes(samples: usize) -> usize {
    let (a, b) = P_STAR_BRACKET;
    let vals: Vec<f64> = (0..samples).map(|i| crossing(a + (b - a) * i as f64 / (samples - 1) as f64)).collect();
    vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
}

/// Bisection root of `m1(p) - m0(p)` on `[2, 2.5]`.
pub fn find_p_star(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let (mut lo, mut hi) = P_STAR_BRACKET;
    let (flo, fhi) = (crossing(lo), crossing(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    if crossing_sign_changes(100) != 1 {
        return domain("crossing of m1 and m0 is not unique on the bracket");
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if crossing(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_z(z: f64) -> Result<()> {
    if z > 0.0 && z <= 1.0 {
        Ok(())
    } else {
        domain(format!("z must lie in (0, 1], got {z}"))
    }
}

/// `φ(z,p) = 9zp² + (48 z ln z - 40z + 9)p + 48 ln z + 32`.
pub fn phi(z: f64, p: f64) -> Result<f64> {
    let [a, b, c] = phi_coefficients(z)?;
    Ok((a * p + b) * p + c)
}

/// Coefficients of `φ(z, ·)` as a quadratic in `p`, leading first.
pub fn phi_coefficients(z: f64) -> Result<[f64; 3]> {
    check_z(z)?;
    let l = z.ln();
    Ok([9.0 * z, 48.0 * z * l - 40.0 * z + 9.0, 48.0 * l + 32.0])
}

/// `A(z,p) = (p-1) / (48 (pz+1) (1 - (p-1) ln z))`, positive for `z ≤ 1`, `p > 1`.
#[allow(non_snake_case)]
pub fn A(z: f64, p: f64) -> Result<f64> {
    check_z(z)?;
    if !(p > 1.0) {
        return domain(format!("A needs p > 1, got {p}"));
    }
    Ok((p - 1.0) / (48.0 * (p * z + 1.0) * (1.0 - (p - 1.0) * z.ln())))
}

/// `G(m,p) = m^(2(p-1)) (p-1) (3/(m²+2)^p + R(p))`, with `R` from a certified
/// enclosure (upper end, so `G` stays a majorant).
pub fn g_bound(params: Params) -> Result<f64> {
    let Params { p, m } = params;
    if !(p > 1.0) {
        return domain(format!("G needs p > 1, got {p}"));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let r = eval_r(p, 1e-12)?.hi;
    let m2 = m * m;
    Ok(m2.powf(p - 1.0) * (p - 1.0) * (3.0 * (m2 + 2.0).powf(-p) + r))
}

/// Euler–Maclaurin upper bound `(9p² - 49p + 88) / (24 · 2^p (p-1))` for `R(p)`.
pub fn r_em_bound(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return domain(format!("needs p > 1, got {p}"));
    }
    Ok((9.0 * p * p - 49.0 * p + 88.0) / (24.0 * 2f64.powf(p) * (p - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    EMBound,
    PhiNegative,
    MonotoneInP,
    DirectSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub p: f64,
    pub m: f64,
    pub branch: Branch,
    /// Em bound, φ value, or `I` upper end, depending on the branch.
    pub bound_value: f64,
    /// Exponent of the base certificate for [`Branch::MonotoneInP`].
    pub base_p: Option<f64>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub cells: Vec<Cell>,
    pub p_star: f64,
    pub m_star: f64,
    pub summary: bool,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.verdict)
    }
}

/// Default number of `m` samples per exponent in [`certify`].
pub const DEFAULT_M_STEPS: usize = 200;

/// Certificate of `I_p(m) < 1` on the grid `p_grid × {m_cap·i/M : i = 1..M}`.
///
/// `m = 0` is omitted: `I_p(0) = 0` identically.
pub fn certify(p_grid: &[f64], m_cap: f64, tol: f64) -> Result<CertificateReport> {
    certify_with(p_grid, m_cap, DEFAULT_M_STEPS, tol, Execution::default())
}

pub fn certify_with(p_grid: &[f64], m_cap: f64, m_steps: usize, tol: f64, exec: Execution) -> Result<CertificateReport> {
    if let Some(p) = p_grid.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
        return domain(format!("certificate needs p > 1, got {p}"));
    }
    if !(m_cap > 0.0 && m_cap.is_finite()) {
        return domain(format!("m cap must be positive, got {m_cap}"));
    }
    if m_steps == 0 {
        return domain("need at least one m sample");
    }
    let p_star = find_p_star(1e-12)?;
    let m_star = m0(p_star)?;
    let mut coords = Vec::with_capacity(p_grid.len() * m_steps);
    for &p in p_grid {
        for i in 1..=m_steps {
            coords.push((p, m_cap * (i as f64 / m_steps as f64)));
        }
    }
    let cells = par::map_with(exec, &coords, |&(p, m)| certify_cell(p, m, p_star, m_star, tol));
    let mut cells: Vec<Cell> = cells.into_iter().collect::<Result<_>>()?;
    cells.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.m.total_cmp(&b.m)));
    let summary = cells.iter().all(|c| c.verdict);
    Ok(CertificateReport { cells, p_star, m_star, summary })
}

/// Analytic certificate at `(p, m)` for `p ≤ p*` (or any `p` with `m > m0(p)`).
fn analytic_cell(p: f64, m: f64, m_star: f64) -> Result<(Branch, f64, bool)> {
    let params = Params::new(p, m)?;
    if m > m0(p)? {
        let b = em_upper_bound(params)?;
        return Ok((Branch::EMBound, b, b < 1.0));
    }
    let z = m * m / 2.0;
    if p <= 2.0 {
        let v = phi(z, p)?;
        let a = A(z, p)?;
        return Ok((Branch::PhiNegative, v, v < 0.0 && a > 0.0));
    }
    // 2 < p ≤ p*: z ≤ m0(p)²/2 ≤ z*, φ increasing in z
    let z_star = m_star * m_star / 2.0;
    let v = phi(z_star, p)?;
    let a = A(z, p)?;
    Ok((Branch::PhiNegative, v, v < 0.0 && a > 0.0 && z <= z_star))
}

fn certify_cell(p: f64, m: f64, p_star: f64, m_star: f64, tol: f64) -> Result<Cell> {
    let mut cell = Cell { p, m, branch: Branch::DirectSeries, bound_value: f64::NAN, base_p: None, verdict: false };
    let analytic = if m > m0(p)? || p <= p_star {
        Some(analytic_cell(p, m, m_star)?)
    } else {
        // p > p*, m ≤ m0(p) < m1(p): I is non-increasing in p on [base, p]
        // whenever m ≤ m1(base); pick the smallest admissible base ≥ 2.
        let base = m1_inverse(m)?.max(2.0);
        if base <= p && m <= m1(base)? * (1.0 + 1e-12) {
            let (_, v, ok) = analytic_cell(base, m, m_star)?;
            cell.base_p = Some(base);
            Some((Branch::MonotoneInP, v, ok))
        } else {
            None
        }
    };
    if let Some((branch, v, ok)) = analytic {
        if ok {
            cell.branch = branch;
            cell.bound_value = v;
            cell.verdict = true;
            return Ok(cell);
        }
    }
    cell.base_p = None;
    match eval_i(Params::new(p, m)?, tol) {
        Ok(v) => {
            cell.bound_value = v.hi;
            cell.verdict = v.hi < 1.0;
        }
        Err(Error::NonConvergent { .. }) => {
            cell.bound_value = f64::NAN;
            cell.verdict = false;
        }
        Err(e) => return Err(e),
    }
    Ok(cell)
}
