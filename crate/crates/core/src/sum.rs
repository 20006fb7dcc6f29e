//! Order-independent floating point reduction.
//!
//! Reductions over grid cells go through [`ExactSum`], which keeps a list of
//! non-overlapping partial sums (Shewchuk's algorithm) and rounds once at the
//! end. The result is the correctly rounded value of the exact sum, so it does
//! not depend on the order in which terms arrive or on how work was split
//! across threads.

/// Accumulator whose result is the exact sum of its inputs rounded once.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for idx in 0..self.partials.len() {
            let mut y = self.partials[idx];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Correctly rounded total.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            n -= 1;
            let x = hi;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way case: the remaining partials decide the rounding direction.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &v in &other.partials {
            self.add(v);
        }
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = ExactSum::new();
        acc.extend(iter);
        acc
    }
}

/// Exact-then-rounded sum of a sequence.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<ExactSum>().value()
}
