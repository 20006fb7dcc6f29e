//! Additive functions of axis-parallel rectangles.
//!
//! A [`RectangleFunction`] assigns a real number to every closed
//! axis-parallel rectangle and is finitely additive: splitting a rectangle
//! into two non-overlapping pieces splits the value. Additivity makes the
//! value on a figure (a finite union of non-overlapping rectangles) the sum
//! over its pieces, whatever the decomposition.
//!
//! Three families live here:
//!
//! * [`AreaFunction`], the base measure.
//! * [`RiemannFunction`], the double integral of a bounded scalar field.
//! * [`CirculationFunction`], the counterclockwise line integral
//!   `∮ P dx + Q dy` around the rectangle's boundary. Its edge quadrature
//!   places nodes on an absolute panel mesh, so a side shared by two cells
//!   is integrated with identical nodes by both and cancels in a figure sum.

use rayon::prelude::*;

use crate::error::Result;
use crate::fields::{ScalarField2, VectorField2};
use crate::geom2d::{rect_edges, Axis, Figure, OrientedEdge, Rect};
use crate::quadrature::QuadratureSpec;
use crate::sum::exact_sum;

/// Whether `|F(r)| → 0` is known to follow from `area(r) → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsoluteContinuity {
    /// `|F(r)| ≤ bound · area(r)` for every rectangle.
    Yes { bound: f64 },
    Unknown,
}

pub trait RectangleFunction: Sync {
    fn eval(&self, r: &Rect) -> f64;

    fn name(&self) -> String;

    fn continuity(&self) -> AbsoluteContinuity {
        AbsoluteContinuity::Unknown
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AreaFunction;

impl RectangleFunction for AreaFunction {
    fn eval(&self, r: &Rect) -> f64 {
        r.area()
    }

    fn name(&self) -> String {
        "area".into()
    }

    fn continuity(&self) -> AbsoluteContinuity {
        AbsoluteContinuity::Yes { bound: 1.0 }
    }
}

pub fn area_function() -> AreaFunction {
    AreaFunction
}

/// `r ↦ ∬_r f` by tensor-product panel quadrature.
#[derive(Debug, Clone)]
pub struct RiemannFunction {
    integrand: ScalarField2,
    quadrature: QuadratureSpec,
    bound: Option<f64>,
}

impl RiemannFunction {
    /// Declare `|f| ≤ bound` on the domain of use to tag the function as
    /// absolutely continuous.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound.abs());
        self
    }
}

impl RectangleFunction for RiemannFunction {
    fn eval(&self, r: &Rect) -> f64 {
        if r.is_degenerate() {
            return 0.0;
        }
        self.quadrature
            .integrate_2d((r.x0, r.x1), (r.y0, r.y1), |x, y| self.integrand.eval(x, y))
    }

    fn name(&self) -> String {
        format!("riemann({})", self.integrand.name())
    }

    fn continuity(&self) -> AbsoluteContinuity {
        match self.bound {
            Some(bound) => AbsoluteContinuity::Yes { bound },
            None => AbsoluteContinuity::Unknown,
        }
    }
}

pub fn riemann_function(f: ScalarField2, q: QuadratureSpec) -> RiemannFunction {
    RiemannFunction {
        integrand: f,
        quadrature: q,
        bound: None,
    }
}

/// `r ↦ ∮_{∂r} P dx + Q dy`, counterclockwise.
#[derive(Debug, Clone)]
pub struct CirculationFunction {
    field: VectorField2,
    quadrature: QuadratureSpec,
}

impl CirculationFunction {
    pub fn field(&self) -> &VectorField2 {
        &self.field
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    /// Signed line integral along one directed axis-parallel edge.
    pub fn edge_integral(&self, e: &OrientedEdge) -> f64 {
        let q = &self.quadrature;
        let v = match e.axis {
            Axis::Horizontal => q.integrate(e.a, e.b, |x| self.field.p.eval(x, e.fixed)),
            Axis::Vertical => q.integrate(e.a, e.b, |y| self.field.q.eval(e.fixed, y)),
        };
        if e.direction < 0 {
            -v
        } else {
            v
        }
    }

    /// Smallest and largest field components sampled at the edge nodes.
    pub fn oscillation_on_boundary(&self, r: &Rect) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let rule = self.quadrature.rule();
        for e in rect_edges(r) {
            for (a, b) in self.quadrature.pieces(e.a, e.b) {
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                for t in rule.nodes() {
                    let s = mid + half * t;
                    let (p, q) = match e.axis {
                        Axis::Horizontal => self.field.eval(s, e.fixed),
                        Axis::Vertical => self.field.eval(e.fixed, s),
                    };
                    for (k, val) in [p, q].into_iter().enumerate() {
                        lo[k] = lo[k].min(val);
                        hi[k] = hi[k].max(val);
                    }
                }
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }
}

impl RectangleFunction for CirculationFunction {
    fn eval(&self, r: &Rect) -> f64 {
        if r.is_degenerate() {
            return 0.0;
        }
        let [bottom, right, top, left] = rect_edges(r).map(|e| self.edge_integral(&e));
        (bottom + top) + (right + left)
    }

    fn name(&self) -> String {
        format!("circulation({})", self.field.name())
    }
}

pub fn circulation_function(v: VectorField2, q: QuadratureSpec) -> CirculationFunction {
    CirculationFunction {
        field: v,
        quadrature: q,
    }
}

/// Per-rectangle values of `f` on a figure, in figure order.
pub fn values_on_figure<F: RectangleFunction + ?Sized>(f: &F, fig: &Figure) -> Vec<f64> {
    (0..fig.len())
        .into_par_iter()
        .map(|k| f.eval(&fig.rect(k)))
        .collect()
}

/// Sum of `f` over the rectangles of `fig`.
///
/// Rectangles are evaluated in parallel and reduced exactly, so the result
/// does not depend on the thread count.
pub fn evaluate_on_figure<F: RectangleFunction + ?Sized>(f: &F, fig: &Figure) -> f64 {
    exact_sum(values_on_figure(f, fig))
}

/// `|F(r) − F(r₁) − F(r₂)|` for the split of `r` at `c`.
pub fn additivity_defect<F: RectangleFunction + ?Sized>(
    f: &F,
    r: &Rect,
    axis: Axis,
    c: f64,
) -> Result<f64> {
    let (a, b) = r.split(axis, c)?;
    Ok((f.eval(r) - exact_sum([f.eval(&a), f.eval(&b)])).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{const2, grad, rot, weier, Smoothness, Weierstrass};
    use crate::geom2d::{figure_boundary_edges, figure_from_cells, DyadicGrid};
    use proptest::prelude::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::new(8, 1.0 / 64.0).unwrap()
    }

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
        Rect::new(x0, x1, y0, y1).unwrap()
    }

    #[test]
    fn area_function_examples() {
        let f = area_function();
        assert_eq!(f.eval(&rect(0.0, 1.0, 0.0, 1.0)), 1.0);
        assert_eq!(f.eval(&rect(0.0, 1.0, 0.3, 0.3)), 0.0);
        assert_eq!(
            additivity_defect(&f, &rect(0.0, 1.0, 0.0, 1.0), Axis::Vertical, 0.3).unwrap(),
            0.0
        );
        assert_eq!(f.continuity(), AbsoluteContinuity::Yes { bound: 1.0 });
    }

    #[test]
    fn riemann_function_examples() {
        let one = riemann_function(ScalarField2::constant(1.0), q());
        let r = rect(-0.3, 0.77, 0.1, 1.9);
        assert!((one.eval(&r) - r.area()).abs() < 1e-12);
        let fx = riemann_function(ScalarField2::new("x", Smoothness::Smooth, |x, _| x), q());
        assert!((fx.eval(&rect(0.0, 1.0, 0.0, 1.0)) - 0.5).abs() < 1e-12);
        let curl = rot().curlz().unwrap().clone();
        let f = riemann_function(curl, q()).with_bound(1.0);
        assert!((f.eval(&rect(0.0, 2.0, 0.0, 1.0)) - 2.0).abs() < 1e-12);
        assert_eq!(f.continuity(), AbsoluteContinuity::Yes { bound: 1.0 });
        assert_eq!(one.continuity(), AbsoluteContinuity::Unknown);
    }

    #[test]
    fn circulation_examples() {
        let c = circulation_function(const2(1.0, -2.0), q());
        assert!(c.eval(&rect(0.13, 0.9, -0.4, 0.01)).abs() < 1e-15);
        let c = circulation_function(rot(), q());
        let (a, b, cc, d) = (-0.3, 1.1, 0.25, 0.9);
        assert!((c.eval(&rect(a, b, cc, d)) - (b - a) * (d - cc)).abs() < 1e-14);
        let c = circulation_function(grad(), q());
        assert!(c.eval(&rect(-1.7, 0.6, 0.2, 1.3)).abs() < 1e-10);
        assert_eq!(c.eval(&rect(0.0, 1.0, 0.5, 0.5)), 0.0);
        assert_eq!(c.continuity(), AbsoluteContinuity::Unknown);
    }

    #[test]
    fn evaluate_on_figure_examples() {
        let grid = DyadicGrid::new(rect(0.0, 1.0, 0.0, 1.0), 1).unwrap();
        let two = figure_from_cells(&grid, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(evaluate_on_figure(&area_function(), &two), 0.5);
        let block = figure_from_cells(&grid, [(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let c = circulation_function(rot(), q());
        assert!((evaluate_on_figure(&c, &block) - 1.0).abs() < 1e-15);
        assert_eq!(evaluate_on_figure(&c, &Figure::empty()), 0.0);
    }

    #[test]
    fn additivity_on_panel_cuts() {
        let r = rect(-0.61, 0.83, -0.2, 0.47);
        let c = circulation_function(rot(), q());
        let d = additivity_defect(&c, &r, Axis::Vertical, 0.25).unwrap();
        assert!(d < 1e-15, "{d}");
        let w = circulation_function(weier(Weierstrass::DEFAULT), q());
        let d = additivity_defect(&w, &r, Axis::Horizontal, 0.125).unwrap();
        assert!(d <= 1e-10, "{d}");
    }

    #[test]
    fn figure_sum_equals_boundary_edge_sum() {
        let grid = DyadicGrid::new(rect(-1.0, 1.0, -1.0, 1.0), 4).unwrap();
        let cells = (0..16).flat_map(|i| (0..16).map(move |j| (i, j)))
            .filter(|&(i, j)| (i * 7 + j * 3) % 5 != 0 && i > 2 && j < 13);
        let fig = figure_from_cells(&grid, cells).unwrap();
        for v in [rot(), grad(), weier(Weierstrass::DEFAULT)] {
            let c = circulation_function(v, q());
            let by_cells = evaluate_on_figure(&c, &fig);
            let edges = figure_boundary_edges(&fig).unwrap();
            let by_edges = exact_sum(edges.iter().map(|e| c.edge_integral(e)));
            let scale = by_cells.abs().max(1.0);
            assert!((by_cells - by_edges).abs() <= 1e-12 * scale, "{by_cells} {by_edges}");
        }
    }

    #[test]
    fn oscillation_bounds_circulation() {
        let w = circulation_function(weier(Weierstrass::DEFAULT), q());
        for r in [rect(0.0, 0.1, 0.0, 0.1), rect(-0.4, 0.3, 0.2, 0.23), rect(0.5, 1.5, -1.0, 0.0)] {
            let osc = w.oscillation_on_boundary(&r);
            assert!(w.eval(&r).abs() <= osc * r.perimeter() + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn riemann_absolute_continuity(x in -1.0f64..1.0, y in -1.0f64..1.0, w in 0.0f64..0.5, h in 0.0f64..0.5) {
            let f = ScalarField2::new("sin", Smoothness::Smooth, |x, y| (3.0 * x + y).sin());
            let rf = riemann_function(f, q()).with_bound(1.0);
            let r = rect(x, x + w, y, y + h);
            prop_assert!(rf.eval(&r).abs() <= r.area() * (1.0 + 1e-12));
        }

        #[test]
        fn circulation_under_quadrature_refinement(x in -1.0f64..1.0, y in -1.0f64..1.0, w in 0.01f64..0.7, h in 0.01f64..0.7) {
            let r = rect(x, x + w, y, y + h);
            for v in [rot(), grad()] {
                let coarse = circulation_function(v.clone(), QuadratureSpec::new(8, 1.0 / 16.0).unwrap()).eval(&r);
                let fine = circulation_function(v, QuadratureSpec::new(8, 1.0 / 32.0).unwrap()).eval(&r);
                prop_assert!((coarse - fine).abs() < 1e-12);
            }
        }
    }
}
