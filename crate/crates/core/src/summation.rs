//! Compensated summation with a running rounding-error bound.

pub const EPS: f64 = f64::EPSILON;

/// Per-term rounding allowance, in units of machine epsilon.
const TERM_ULPS: f64 = 4.0;
const TINY: f64 = 1e-300;

/// Neumaier (improved Kahan–Babuška) accumulator.
///
/// Besides the compensated value it tracks an a-priori bound on the total
/// rounding error, charging `max(4 eps |t|, 1e-300)` for every term `t`
/// (which covers evaluating the term itself) plus `2 eps |S|` for the final
/// compensated result.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    charge: f64,
    count: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.charge += (TERM_ULPS * EPS * x.abs()).max(TINY);
        self.count += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn error_bound(&self) -> f64 {
        self.charge + 2.0 * EPS * self.value().abs()
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        s.extend(iter);
        s
    }
}
