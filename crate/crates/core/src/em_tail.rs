//! Tail enclosures for series whose summand is a power of a quadratic.
//!
//! Every series in this crate has a summand of the form
//!
//! ```text
//! f(x) = scale · dᵘ/dxᵘ [ w(x)^s ],   w(x) = αx² + βx + γ,   u ∈ {0, 1}
//! ```
//!
//! For such functions all derivatives are available in closed form (w'' is
//! constant), and every derivative is `w^(s-n)` times a polynomial whose
//! sign changes are roots of a quadratic in `t²`, `t = x + β/2α`. That lets
//! the Euler–Maclaurin remainder `(1/720) ∫|f''''|` be evaluated exactly as
//! the total variation of `f'''`.

use crate::error::{domain, Result};
use crate::quadrature::integrate;
use crate::summation::EPS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPower {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub exponent: f64,
    pub scale: f64,
    pub shift: u32,
}

/// Enclosure `[lo, hi]` of `Σ_{k > N} f(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBracket {
    pub lo: f64,
    pub hi: f64,
}

impl TailBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn falling(s: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (s - i as f64))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Coefficient of `w^(s-n+j) (w')^(n-2j) (w'')^j` in `Dⁿ w^s`.
fn fdb_coef(n: u32, j: u32, s: f64) -> f64 {
    factorial(n) / (factorial(j) * factorial(n - 2 * j) * 2f64.powi(j as i32)) * falling(s, n - j)
}

impl QuadraticPower {
    pub fn w(&self, x: f64) -> f64 {
        (self.alpha * x + self.beta) * x + self.gamma
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `f^(k)(x)`.
    pub fn derivative(&self, k: u32, x: f64) -> f64 {
        let n = k + self.shift;
        let w = self.w(x);
        let wp = 2.0 * self.alpha * x + self.beta;
        let wpp = 2.0 * self.alpha;
        let ws = w.powf(self.exponent);
        let mut acc = 0.0;
        for j in 0..=n / 2 {
            acc += fdb_coef(n, j, self.exponent)
                * w.powi(j as i32 - n as i32)
                * wp.powi((n - 2 * j) as i32)
                * wpp.powi(j as i32);
        }
        self.scale * ws * acc
    }

    /// Points `x > from` where `f^(k)` changes sign. Supports `k + shift ≤ 5`.
    pub fn sign_changes(&self, k: u32, from: f64) -> Vec<f64> {
        let n = k + self.shift;
        assert!(n <= 5, "sign analysis implemented for derivative order ≤ 5");
        let a = self.alpha;
        let t0 = self.beta / (2.0 * a);
        let g = self.gamma - self.beta * self.beta / (4.0 * a);
        let r = n % 2;
        // Q(T) with Dⁿ w^s = w^(s-n) t^r Q(t²)
        let mut q = [0.0f64; 3];
        for j in 0..=n / 2 {
            let c = fdb_coef(n, j, self.exponent) * (2.0 * a).powi((n - j) as i32);
            let e = ((n - 2 * j - r) / 2) as usize;
            for i in 0..=j {
                let binom = factorial(j) / (factorial(i) * factorial(j - i));
                q[e + i as usize] += c * binom * a.powi(i as i32) * g.powi((j - i) as i32);
            }
        }
        let scale = q.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut roots_t2 = Vec::new();
        if scale > 0.0 {
            let (c0, c1, c2) = (q[0], q[1], q[2]);
            if c2.abs() > 1e-14 * scale {
                let disc = c1 * c1 - 4.0 * c2 * c0;
                if disc > 0.0 {
                    let sq = disc.sqrt();
                    let qq = -0.5 * (c1 + c1.signum() * sq);
                    if qq != 0.0 {
                        roots_t2.push(qq / c2);
                        roots_t2.push(c0 / qq);
                    } else {
                        roots_t2.push(0.0);
                    }
                }
            } else if c1.abs() > 1e-14 * scale {
                roots_t2.push(-c0 / c1);
            }
        }
        let mut xs: Vec<f64> = roots_t2
            .into_iter()
            .filter(|t2| *t2 > 0.0)
            .map(|t2| t2.sqrt() - t0)
            .filter(|x| *x > from)
            .collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        xs
    }

    /// `∫_from^∞ |f''''| dx`, i.e. the total variation of `f'''` on `[from, ∞)`.
    pub fn d3_variation(&self, from: f64) -> f64 {
        let mut prev = self.derivative(3, from);
        let mut total = 0.0;
        for x in self.sign_changes(4, from) {
            let cur = self.derivative(3, x);
            total += (cur - prev).abs();
            prev = cur;
        }
        total += prev.abs();
        // extrema located in floating point: allow a relative slack
        total * (1.0 + 1e-10) + 64.0 * EPS * total
    }

    /// True when `f` is non-increasing on `[from, ∞)`.
    pub fn decreasing_from(&self, from: f64) -> bool {
        self.sign_changes(1, from).is_empty() && self.derivative(1, from) < 0.0
    }

    /// `∫_from^∞ f dx` with an absolute error bound.
    pub fn tail_integral(&self, from: f64) -> Result<(f64, f64)> {
        match self.shift {
            1 => {
                if !(self.exponent < 0.0 && self.alpha > 0.0) {
                    return domain("closed-form tail integral needs a negative exponent and α > 0");
                }
                let v = -self.scale * self.w(from).powf(self.exponent);
                Ok((v, 8.0 * EPS * v.abs()))
            }
            0 => {
                if self.beta != 0.0 || !(self.alpha > 0.0) || !(self.gamma > 0.0) {
                    return domain("even-power tail integral needs β = 0, α > 0, γ > 0");
                }
                let q = -self.exponent;
                if !(q > 0.5) {
                    return domain(format!("∫(γ+αx²)^(-q) diverges for q = {q}"));
                }
                let ratio = (self.alpha / self.gamma).sqrt();
                let pre = self.scale * self.gamma.powf(self.exponent) / ratio;
                let (t, e) = power_tail(q, from * ratio)?;
                let v = pre * t;
                Ok((v, pre.abs() * e + 8.0 * EPS * v.abs()))
            }
            _ => domain("shift must be 0 or 1"),
        }
    }
}

/// `∫_y^∞ (1 + x²)^(-q) dx` for `q > 1/2`, with an absolute error estimate.
pub fn power_tail(q: f64, y: f64) -> Result<(f64, f64)> {
    let y1 = y.max(2.0).max((4.0 * (q + 1.0)).sqrt());
    let mut sum = 0.0;
    let mut b = 1.0;
    let mut k = 0u32;
    let mut last;
    loop {
        let kf = k as f64;
        let term = b * y1.powf(1.0 - 2.0 * q - 2.0 * kf) / (2.0 * q + 2.0 * kf - 1.0);
        sum += term;
        last = term.abs();
        if last <= 1e-18 * sum.abs() || k > 400 {
            break;
        }
        b *= -(q + kf) / (kf + 1.0);
        k += 1;
    }
    let mut err = 2.0 * last + 8.0 * EPS * sum.abs();
    if y < y1 {
        let fin = integrate(|x| (1.0 + x * x).powf(-q), y, y1, 1e-15, 0.0)?;
        sum += fin.value;
        err += fin.error + 8.0 * EPS * fin.value.abs();
    }
    Ok((sum, err))
}

/// Euler–Maclaurin enclosure of `Σ_{k > n} f(k)`:
/// `∫_n^∞ f − f(n)/2 − f'(n)/12 + f'''(n)/720 ± (1/720)∫_n^∞|f''''|`.
pub fn euler_maclaurin_tail(f: &QuadraticPower, n: f64) -> Result<TailBracket> {
    let (int, int_err) = f.tail_integral(n)?;
    let a = 0.5 * f.eval(n);
    let b = f.derivative(1, n) / 12.0;
    let c = f.derivative(3, n) / 720.0;
    let center = int - a - b + c;
    let rem = f.d3_variation(n) / 720.0;
    let round = 16.0 * EPS * (int.abs() + a.abs() + b.abs() + c.abs()) + int_err;
    Ok(TailBracket { lo: center - rem - round, hi: center + rem + round })
}

/// Integral-test enclosure `[∫_{n+1}^∞ f, ∫_n^∞ f]`, available when `f` is
/// non-increasing on `[n, ∞)`.
pub fn integral_test_tail(f: &QuadraticPower, n: f64) -> Result<Option<TailBracket>> {
    if !f.decreasing_from(n) {
        return Ok(None);
    }
    let (hi, ehi) = f.tail_integral(n)?;
    let (lo, elo) = f.tail_integral(n + 1.0)?;
    Ok(Some(TailBracket { lo: lo - elo, hi: hi + ehi }))
}
