//! Inner/outer figure integrals over Jordan regions, and line integrals.
//!
//! For each dyadic level the region is classified; the rectangle function is
//! summed over the Interior cells (a figure inside the region) and over the
//! Interior and Boundary cells (a figure covering it). The integral is the
//! common limit of the two sums as the level grows.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::VectorField2;
use crate::geom2d::{DyadicGrid, Rect, MAX_LEVEL};
use crate::rectfn::{values_on_figure, AreaFunction, RectangleFunction};
use crate::region2d::{classify_cells, default_bounds, CellLabel, Curve};
use crate::sum::{exact_sum, ExactSum};

/// Inclusive range of dyadic refinement levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub min: u32,
    pub max: u32,
}

impl Levels {
    pub fn new(min: u32, max: u32) -> Result<Self> {
        if min < 1 {
            return Err(Error::domain("the first level must be >= 1"));
        }
        if max > MAX_LEVEL {
            return Err(Error::domain(format!("the last level must be <= {MAX_LEVEL}")));
        }
        if min > max {
            return Err(Error::domain(format!("empty level range {min}..{max}")));
        }
        Ok(Levels { min, max })
    }

    pub fn iter(&self) -> RangeInclusive<u32> {
        self.min..=self.max
    }
}

/// Figure values at one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRow {
    pub level: u32,
    pub h: f64,
    pub inner: f64,
    pub outer: f64,
    /// `|outer − inner|`.
    pub gap: f64,
    pub inner_area: f64,
    pub outer_area: f64,
    pub boundary_cells: usize,
    /// Summed perimeter (surface area in 3D) of the Boundary cells.
    pub boundary_perimeter: f64,
}

impl LevelRow {
    pub fn new(
        level: u32,
        h: f64,
        (inner, outer): (f64, f64),
        (inner_area, outer_area): (f64, f64),
        boundary_cells: usize,
        boundary_perimeter: f64,
    ) -> Self {
        LevelRow {
            level,
            h,
            inner,
            outer,
            gap: (outer - inner).abs(),
            inner_area,
            outer_area,
            boundary_cells,
            boundary_perimeter,
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }

    /// `[min(inner, outer), max(inner, outer)]`.
    pub fn bracket(&self) -> (f64, f64) {
        (self.inner.min(self.outer), self.inner.max(self.outer))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub name: String,
    pub rows: Vec<LevelRow>,
    /// Midpoint of inner and outer at the last level.
    pub estimate: f64,
    pub converged: bool,
    pub tolerance: f64,
}

pub const CSV_SCHEMA: &str = "# schema=1";
pub const LEVEL_COLUMNS: &str =
    "level,h,inner,outer,gap,inner_area,outer_area,boundary_cells,boundary_perimeter";

impl ConvergenceReport {
    pub fn last(&self) -> &LevelRow {
        self.rows.last().expect("a report has at least one level")
    }

    pub fn gap(&self) -> f64 {
        self.last().gap
    }

    /// Inner values never decrease and outer values never increase.
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].inner <= w[1].inner && w[0].outer >= w[1].outer)
    }

    /// Per-level rows without the schema line.
    pub fn level_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{LEVEL_COLUMNS}").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e}",
                r.level,
                r.h,
                r.inner,
                r.outer,
                r.gap,
                r.inner_area,
                r.outer_area,
                r.boundary_cells,
                r.boundary_perimeter
            )
            .unwrap();
        }
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_SCHEMA}\n{}", self.level_csv())
    }
}

/// Run `level` for every level and assemble the report.
///
/// With `tol = None` the tolerance is the gap reached at the last level.
pub(crate) fn run_levels(
    name: String,
    levels: Levels,
    tol: Option<f64>,
    mut level: impl FnMut(u32) -> Result<LevelRow>,
) -> Result<ConvergenceReport> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::domain(format!("tolerance must be > 0, got {t}")));
        }
    }
    let rows = levels.iter().map(&mut level).collect::<Result<Vec<_>>>()?;
    let last = *rows.last().expect("levels are non-empty");
    let tolerance = tol.unwrap_or(last.gap);
    Ok(ConvergenceReport {
        name,
        estimate: last.midpoint(),
        converged: last.gap <= tolerance,
        tolerance,
        rows,
    })
}

/// `F` on the inner and outer figures of `c` at one grid level.
pub fn figure_level<F: RectangleFunction + ?Sized>(
    f: &F,
    c: &Curve,
    grid: &DyadicGrid,
) -> Result<LevelRow> {
    let cls = classify_cells(c, grid)?;
    let inner_fig = cls.inner_figure();
    let boundary_fig = cls.boundary_figure();
    // Cell values are computed once; the outer sum reuses the inner terms.
    let mut inner_sum: ExactSum = values_on_figure(f, &inner_fig).into_iter().collect();
    let inner = inner_sum.value();
    inner_sum.extend(values_on_figure(f, &boundary_fig));
    let outer = inner_sum.value();
    let mut area_sum: ExactSum = inner_fig.rects().map(|r| r.area()).collect();
    let inner_area = area_sum.value();
    area_sum.extend(boundary_fig.rects().map(|r| r.area()));
    let outer_area = area_sum.value();
    let boundary_perimeter = exact_sum(boundary_fig.rects().map(|r| r.perimeter()));
    debug_assert_eq!(cls.count(CellLabel::Boundary), boundary_fig.len());
    Ok(LevelRow::new(
        grid.level(),
        grid.h(),
        (inner, outer),
        (inner_area, outer_area),
        boundary_fig.len(),
        boundary_perimeter,
    ))
}

/// Integral of `f` over the region bounded by `c` as the common limit of its
/// values on inner and outer grid figures.
///
/// `bounds` defaults to [`default_bounds`]. The run is `converged` when the
/// last level's gap is within `tol` (always, when `tol` is `None`).
pub fn figure_integral<F: RectangleFunction + ?Sized>(
    f: &F,
    c: &Curve,
    levels: Levels,
    bounds: Option<Rect>,
    tol: Option<f64>,
) -> Result<ConvergenceReport> {
    let bounds = match bounds {
        Some(b) => b,
        None => default_bounds(c, levels.min)?,
    };
    run_levels(f.name(), levels, tol, |n| {
        figure_level(f, c, &DyadicGrid::new(bounds, n)?)
    })
}

/// Inner and outer Jordan content of the region bounded by `c`.
pub fn jordan_content(c: &Curve, levels: Levels, bounds: Option<Rect>) -> Result<ConvergenceReport> {
    figure_integral(&AreaFunction, c, levels, bounds, None)
}

/// `∮_c P dx + Q dy` in the curve's vertex order, by the midpoint rule on
/// `c` refined to segments of at most `max_seg`.
pub fn line_integral(v: &VectorField2, c: &Curve, max_seg: f64) -> Result<f64> {
    let fine = c.refine(max_seg)?;
    Ok(polyline_midpoint_sum(v, &fine))
}

fn polyline_midpoint_sum(v: &VectorField2, c: &Curve) -> f64 {
    let terms: Vec<f64> = (0..c.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let (a, b) = c.segment(k);
            let (mx, my) = (0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            let (p, q) = v.eval(mx, my);
            [p * (b.x - a.x), q * (b.y - a.y)]
        })
        .collect();
    exact_sum(terms)
}

/// Line integral with a refinement check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    pub value: f64,
    /// The same integral with `max_seg` halved.
    pub halved: f64,
}

impl LineIntegral {
    pub fn change(&self) -> f64 {
        (self.value - self.halved).abs()
    }

    /// Whether halving the segment length moved the value by at most `tol`.
    pub fn is_stable(&self, tol: f64) -> bool {
        self.change() <= tol
    }
}

pub fn line_integral_checked(v: &VectorField2, c: &Curve, max_seg: f64) -> Result<LineIntegral> {
    Ok(LineIntegral {
        value: line_integral(v, c, max_seg)?,
        halved: line_integral(v, c, max_seg / 2.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{const2, rot, weier, Weierstrass};
    use crate::quadrature::QuadratureSpec;
    use crate::rectfn::{circulation_function, riemann_function};
    use crate::region2d::{disk, lshape, square};
    use std::f64::consts::PI;

    fn box4() -> Option<Rect> {
        Some(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap())
    }

    #[test]
    fn levels_validation() {
        assert!(Levels::new(0, 3).is_err());
        assert!(Levels::new(9, 4).is_err());
        assert!(Levels::new(2, 15).is_err());
        assert_eq!(Levels::new(4, 9).unwrap().iter().count(), 6);
    }

    #[test]
    fn jordan_square_gap_shrinks() {
        let s = square(0.0, 0.0, 1.0);
        let rep = jordan_content(&s, Levels::new(3, 8).unwrap(), box4()).unwrap();
        assert!(rep.is_monotone());
        for r in &rep.rows {
            assert!(r.inner <= 1.0 && 1.0 <= r.outer);
        }
        // Aligned sides with m = 1/h cells per side: 4m − 4 touching cells
        // inside and 4m + 4 outside, so the gap is 8h; inner is (1 − 2h)² and
        // outer (1 + 2h)².
        let last = rep.last();
        let h = last.h;
        assert_eq!(last.gap, 8.0 * h);
        assert_eq!(last.inner, (1.0 - 2.0 * h).powi(2));
        assert_eq!(last.outer, (1.0 + 2.0 * h).powi(2));
        assert_eq!(rep.estimate, 1.0 + 4.0 * h * h);
        let gaps: Vec<f64> = rep.rows.iter().map(|r| r.gap).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn jordan_disk_brackets_pi() {
        let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
        let rep = jordan_content(&d, Levels::new(4, 8).unwrap(), box4()).unwrap();
        assert!(rep.is_monotone());
        for r in &rep.rows {
            assert!(r.inner < PI && PI < r.outer);
            assert_eq!(r.inner, r.inner_area);
        }
    }

    #[test]
    fn figure_integral_of_area_matches_jordan_content() {
        let c = lshape();
        let lv = Levels::new(3, 7).unwrap();
        let a = jordan_content(&c, lv, None).unwrap();
        let b = figure_integral(&AreaFunction, &c, lv, None, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn riemann_of_unit_curl_is_area() {
        let d = disk(0.0, 0.0, 1.0, 1024).unwrap();
        let q = QuadratureSpec::new(8, 4.0 / 256.0).unwrap();
        let f = riemann_function(rot().curlz().unwrap().clone(), q).with_bound(1.0);
        let lv = Levels::new(4, 8).unwrap();
        let rep = figure_integral(&f, &d, lv, box4(), None).unwrap();
        let area = jordan_content(&d, lv, box4()).unwrap();
        for (r, a) in rep.rows.iter().zip(&area.rows) {
            assert!((r.inner - a.inner).abs() < 1e-12);
            assert!((r.outer - a.outer).abs() < 1e-12);
            // |outer − inner| ≤ M (outer area − inner area).
            assert!(r.gap <= 1.0 * (r.outer_area - r.inner_area) + 1e-12);
        }
    }

    #[test]
    fn constant_circulation_vanishes_on_every_level() {
        let q = QuadratureSpec::new(8, 1.0 / 64.0).unwrap();
        let f = circulation_function(const2(1.0, -2.0), q);
        let rep = figure_integral(&f, &lshape(), Levels::new(3, 6).unwrap(), box4(), None).unwrap();
        for r in &rep.rows {
            assert!(r.inner.abs() < 1e-12 && r.outer.abs() < 1e-12);
        }
    }

    #[test]
    fn tolerance_controls_convergence_flag() {
        let s = square(0.0, 0.0, 1.0);
        let lv = Levels::new(3, 5).unwrap();
        let loose = figure_integral(&AreaFunction, &s, lv, box4(), Some(1.0)).unwrap();
        assert!(loose.converged);
        let tight = figure_integral(&AreaFunction, &s, lv, box4(), Some(1e-6)).unwrap();
        assert!(!tight.converged);
        assert!(figure_integral(&AreaFunction, &s, lv, box4(), Some(0.0)).is_err());
    }

    #[test]
    fn line_integral_examples() {
        let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
        for c in [square(0.1, -0.2, 0.7), lshape(), d.clone()] {
            assert!(line_integral(&const2(1.0, -2.0), &c, 0.01).unwrap().abs() < 1e-12);
        }
        let v = line_integral(&rot(), &d, 1e-3).unwrap();
        assert!((v - PI).abs() < 1e-4);
        let back = line_integral(&rot(), &d.reversed(), 1e-3).unwrap();
        assert!((v + back).abs() < 1e-12);
        assert!(line_integral(&rot(), &d, 0.0).is_err());
    }

    #[test]
    fn line_integral_invariant_under_midpoint_insertion() {
        let d = disk(0.3, 0.1, 0.8, 256).unwrap();
        let w = weier(Weierstrass::DEFAULT);
        // Splitting every segment in two at the same target resolution
        // leaves the refined polyline unchanged.
        let split = d.refine(d.length() / 256.0 / 2.0 * 1.000001).unwrap();
        let a = line_integral(&w, &d, 1e-4).unwrap();
        let b = line_integral(&w, &split, 1e-4).unwrap();
        assert!((a - b).abs() <= 1e-10, "{a} {b}");
        let checked = line_integral_checked(&rot(), &d, 1e-3).unwrap();
        assert!(checked.is_stable(1e-12));
    }

    #[test]
    fn csv_layout() {
        let rep = jordan_content(&square(0.0, 0.0, 1.0), Levels::new(3, 4).unwrap(), box4()).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# schema=1"));
        assert_eq!(lines.next(), Some(LEVEL_COLUMNS));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 9);
        assert_eq!(row[0], "3");
        assert_eq!(lines.count(), 1);
    }
}
