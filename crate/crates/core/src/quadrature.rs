//! Composite Gauss–Legendre quadrature on a globally aligned panel mesh.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial
    /// guesses; nodes come out in ascending order and are mirrored so that
    /// `x[k] == -x[n-1-k]` bitwise.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("quadrature order must be >= 1"));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - k] = x;
            nodes[k] = -x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b g` with this rule on the single interval.
    pub fn integrate(&self, a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(mid + half * x);
        }
        half * acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel layout for line and face integrals.
///
/// Panel boundaries sit at the integer multiples of `panel_width`, measured
/// from the origin on every axis, so the nodes used on a segment depend only
/// on the segment's absolute coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    rule: GaussLegendre,
    panel_width: f64,
}

impl QuadratureSpec {
    pub const DEFAULT_ORDER: usize = 8;

    pub fn new(order: usize, panel_width: f64) -> Result<Self> {
        if !(panel_width > 0.0 && panel_width.is_finite()) {
            return Err(Error::domain(format!(
                "panel width must be finite and > 0, got {panel_width}"
            )));
        }
        Ok(QuadratureSpec {
            rule: GaussLegendre::new(order)?,
            panel_width,
        })
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn panel_width(&self) -> f64 {
        self.panel_width
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Sub-intervals of `[a, b]` cut at the absolute panel lines.
    pub fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if !(a < b) {
            return out;
        }
        let h = self.panel_width;
        let mut k = (a / h).floor() as i64 + 1;
        let mut lo = a;
        loop {
            let cut = k as f64 * h;
            if cut >= b {
                break;
            }
            if cut > lo {
                out.push((lo, cut));
                lo = cut;
            }
            k += 1;
        }
        out.push((lo, b));
        out
    }

    /// `∫_a^b g` by the composite rule over [`pieces`](Self::pieces).
    pub fn integrate(&self, a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.pieces(a, b)
            .into_iter()
            .map(|(lo, hi)| self.rule.integrate(lo, hi, &mut g))
            .sum()
    }

    /// `∬ g` over `[x0, x1] × [y0, y1]` by the tensor-product composite rule.
    pub fn integrate_2d(
        &self,
        (x0, x1): (f64, f64),
        (y0, y1): (f64, f64),
        g: impl Fn(f64, f64) -> f64,
    ) -> f64 {
        self.integrate(y0, y1, |y| self.integrate(x0, x1, |x| g(x, y)))
    }
}
