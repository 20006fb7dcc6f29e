//! Green's theorem checks.
//!
//! The left side is the line integral along the curve. The right side is the
//! figure integral of the circulation rectangle function: its values on the
//! inner and outer grid figures at each level. For merely continuous fields
//! there is no independent closed form, so a pass needs the line integral to
//! sit inside the finest inner/outer bracket as well as within tolerance of
//! the midpoint estimate.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{CatalogField, VectorField2};
use crate::gauss3d::{flux_function, Box3, BoxFunction};
use crate::geom2d::{Axis, DyadicGrid, Rect};
use crate::integral::{figure_integral, line_integral_checked, ConvergenceReport, Levels, CSV_SCHEMA};
use crate::quadrature::QuadratureSpec;
use crate::rectfn::{
    additivity_defect, circulation_function, riemann_function, AreaFunction, CirculationFunction, RectangleFunction,
};
use crate::region2d::{classify_cells, default_bounds, CellLabel, Curve};
use crate::sum::exact_sum;

/// Knobs shared by the 2D and 3D checks.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyParams {
    pub levels: Levels,
    /// Grid bounds; `None` picks the default box around the region.
    pub bounds: Option<Rect>,
    pub quadrature_order: usize,
    /// Panel width; `None` uses the cell side at the last level.
    pub panel_width: Option<f64>,
    /// Longest polyline segment for the line integral.
    pub max_seg: f64,
    pub tol_line: f64,
    /// Required inner/outer gap; `None` accepts the gap reached.
    pub tol_figure: Option<f64>,
}

impl VerifyParams {
    pub fn new(levels: Levels) -> Self {
        VerifyParams {
            levels,
            bounds: None,
            quadrature_order: QuadratureSpec::DEFAULT_ORDER,
            panel_width: None,
            max_seg: 1e-4,
            tol_line: 1e-4,
            tol_figure: None,
        }
    }

    pub fn with_bounds(mut self, bounds: Rect) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub(crate) fn quadrature(&self, finest_h: f64) -> Result<QuadratureSpec> {
        QuadratureSpec::new(self.quadrature_order, self.panel_width.unwrap_or(finest_h))
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol_line > 0.0) {
            return Err(Error::domain("tol_line must be > 0"));
        }
        if !(self.max_seg > 0.0) {
            return Err(Error::domain("max_seg must be > 0"));
        }
        Ok(())
    }
}

/// Outcome of one Green or Gauss check.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenReport {
    pub theorem: &'static str,
    pub field: String,
    pub region: String,
    /// Boundary integral at the requested resolution.
    pub lhs: f64,
    /// Boundary integral at twice the resolution.
    pub lhs_refined: f64,
    /// Figure integral of the circulation (or flux) function. Its values are
    /// for the counterclockwise (outward) orientation.
    pub rhs: ConvergenceReport,
    /// `+1` when the boundary is positively oriented, `−1` otherwise; the
    /// comparison is made against `orientation · rhs`.
    pub orientation: f64,
    pub discrepancy: f64,
    pub bracket: bool,
    pub tol_line: f64,
    pub tol_figure: f64,
    /// `Σ osc · perimeter` over the finest Boundary cells, which bounds the
    /// inner/outer gap.
    pub oscillation_bound: Option<f64>,
    pub pass: bool,
}

pub const SUMMARY_COLUMNS: &str = "theorem,field,region,lhs,lhs_refined,estimate,inner,outer,gap,discrepancy,tol_line,tol_figure,bracket,converged,pass";

impl GreenReport {
    pub(crate) fn assemble(
        theorem: &'static str,
        field: String,
        region: String,
        (lhs, lhs_refined): (f64, f64),
        rhs: ConvergenceReport,
        orientation: f64,
        tol_line: f64,
        oscillation_bound: Option<f64>,
    ) -> Self {
        let last = *rhs.last();
        let tol_figure = rhs.tolerance;
        let discrepancy = (lhs - orientation * rhs.estimate).abs();
        let (lo, hi) = last.bracket();
        let (lo, hi) = if orientation > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let bracket = lo - tol_line <= lhs && lhs <= hi + tol_line;
        let stable = (lhs - lhs_refined).abs() <= tol_line;
        let pass = rhs.converged && stable && bracket && discrepancy <= tol_figure + tol_line;
        GreenReport {
            theorem,
            field,
            region,
            lhs,
            lhs_refined,
            rhs,
            orientation,
            discrepancy,
            bracket,
            tol_line,
            tol_figure,
            oscillation_bound,
            pass,
        }
    }

    pub fn tol_total(&self) -> f64 {
        self.tol_figure + self.tol_line
    }

    pub fn summary_row(&self) -> String {
        let last = self.rhs.last();
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            self.theorem,
            self.field,
            self.region,
            self.lhs,
            self.lhs_refined,
            self.rhs.estimate,
            last.inner,
            last.outer,
            last.gap,
            self.discrepancy,
            self.tol_line,
            self.tol_figure,
            self.bracket,
            self.rhs.converged,
            self.pass
        )
    }

    /// Summary row followed by the per-level rows of the right side.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{CSV_SCHEMA}").unwrap();
        writeln!(s, "{SUMMARY_COLUMNS}").unwrap();
        writeln!(s, "{}", self.summary_row()).unwrap();
        writeln!(s, "# levels").unwrap();
        s.push_str(&self.rhs.level_csv());
        s
    }

    /// One-line verdict for terminals.
    pub fn verdict(&self) -> String {
        let last = self.rhs.last();
        format!(
            "{} {} {} on {}: lhs={:e} estimate={:e} discrepancy={:e} gap={:e} level={} bracket={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.theorem,
            self.field,
            self.region,
            self.lhs,
            self.orientation * self.rhs.estimate,
            self.discrepancy,
            last.gap,
            last.level,
            self.bracket
        )
    }
}

/// Compare `∮_c P dx + Q dy` with the figure integral of the circulation of
/// `v` over the region bounded by `c`.
pub fn green_verify(v: &VectorField2, c: &Curve, region: &str, params: &VerifyParams) -> Result<GreenReport> {
    params.validate()?;
    let bounds = match params.bounds {
        Some(b) => b,
        None => default_bounds(c, params.levels.min)?,
    };
    let finest = DyadicGrid::new(bounds, params.levels.max)?;
    let q = params.quadrature(finest.h())?;
    let line = line_integral_checked(v, c, params.max_seg)?;
    let circulation = circulation_function(v.clone(), q);
    let rhs = figure_integral(&circulation, c, params.levels, Some(bounds), params.tol_figure)?;
    let osc = oscillation_bound(&circulation, c, &finest)?;
    Ok(GreenReport::assemble(
        "green",
        v.name().to_string(),
        region.to_string(),
        (line.value, line.halved),
        rhs,
        c.orientation().sign(),
        params.tol_line,
        Some(osc),
    ))
}

/// `Σ osc(v on ∂cell) · perimeter(cell)` over the Boundary cells of `grid`.
pub fn oscillation_bound(f: &CirculationFunction, c: &Curve, grid: &DyadicGrid) -> Result<f64> {
    let cls = classify_cells(c, grid)?;
    let cells: Vec<_> = cls.cells_with(&[CellLabel::Boundary]).collect();
    let terms: Vec<f64> = cells
        .par_iter()
        .map(|&cell| {
            let r = grid.cell_rect(cell);
            f.oscillation_on_boundary(&r) * r.perimeter()
        })
        .collect();
    Ok(exact_sum(terms))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterAudit {
    pub boundary_cells: usize,
    pub total_perimeter: f64,
    pub curve_length: f64,
    pub h: f64,
    /// `16 L + 16 h`.
    pub bound: f64,
    pub ratio: f64,
}

impl PerimeterAudit {
    pub fn holds(&self) -> bool {
        self.total_perimeter <= self.bound
    }
}

/// Total perimeter of the Boundary cells of `grid` against `16 L + 16 h`.
pub fn perimeter_bound_audit(c: &Curve, grid: &DyadicGrid) -> Result<PerimeterAudit> {
    let cls = classify_cells(c, grid)?;
    let fig = cls.boundary_figure();
    if fig.is_empty() {
        return Err(Error::validation("classification produced no boundary cells"));
    }
    let total_perimeter = exact_sum(fig.rects().map(|r| r.perimeter()));
    let curve_length = c.length();
    let h = grid.h();
    let bound = 16.0 * curve_length + 16.0 * h;
    Ok(PerimeterAudit {
        boundary_cells: fig.len(),
        total_perimeter,
        curve_length,
        h,
        bound,
        ratio: total_perimeter / bound,
    })
}

/// Classical cross-check: the figure integral of the declared curl.
pub fn divergence_oracle(v: &VectorField2, c: &Curve, params: &VerifyParams) -> Result<ConvergenceReport> {
    let curl = v
        .curlz()
        .ok_or_else(|| Error::MissingDerivative(v.name().to_string()))?;
    let bounds = match params.bounds {
        Some(b) => b,
        None => default_bounds(c, params.levels.min)?,
    };
    let finest = DyadicGrid::new(bounds, params.levels.max)?;
    let f = riemann_function(curl.clone(), params.quadrature(finest.h())?);
    debug_assert!(f.name().starts_with("riemann"));
    figure_integral(&f, c, params.levels, Some(bounds), params.tol_figure)
}

/// Worst additivity defect of one function over a batch of random splits.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityRow {
    pub function: String,
    pub samples: usize,
    pub max_defect: f64,
}

pub const ADDITIVITY_COLUMNS: &str = "function,samples,max_defect";

/// Random rectangles (boxes for space fields) split at panel lines.
///
/// Corners lie on the `2^-10` lattice inside `[-1.5, 1.5]^d`. Sides run
/// from `1/16` to `1` for rectangles and to `1/2` for boxes. Each sample is cut along a random axis at a
/// random multiple of the panel width strictly inside the rectangle. The
/// first row is the area function; then one row per field.
pub fn additivity_study(
    fields: &[CatalogField],
    samples: usize,
    seed: u64,
    q: &QuadratureSpec,
) -> Result<Vec<AdditivityRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = q.panel_width();
    let mut draw = |dim: usize| -> Vec<(f64, f64, usize, f64)> {
        let mut out = Vec::with_capacity(samples);
        while out.len() < samples {
            let sides: Vec<(f64, f64)> = (0..dim)
                .map(|_| {
                    let lo = rng.gen_range(-1536i32..1472);
                    let w = rng.gen_range(64i32..=if dim == 2 { 1024 } else { 512 }).min(1536 - lo);
                    (lo as f64 / 1024.0, (lo + w) as f64 / 1024.0)
                })
                .collect();
            let axis = rng.gen_range(0..dim);
            let (lo, hi) = sides[axis];
            let first = (lo / h).floor() as i64 + 1;
            let last = (hi / h).ceil() as i64 - 1;
            if first > last {
                continue;
            }
            let cut = rng.gen_range(first..=last) as f64 * h;
            if !(lo < cut && cut < hi) {
                continue;
            }
            for (k, &(a, b)) in sides.iter().enumerate() {
                out.push((a, b, if k == 0 { axis } else { usize::MAX }, cut));
            }
        }
        out
    };
    let planar: Vec<(Rect, Axis, f64)> = draw(2)
        .chunks(2)
        .map(|c| {
            let axis = if c[0].2 == 0 { Axis::Vertical } else { Axis::Horizontal };
            Ok((Rect::new(c[0].0, c[0].1, c[1].0, c[1].1)?, axis, c[0].3))
        })
        .collect::<Result<_>>()?;
    let spatial: Vec<(Box3, usize, f64)> = draw(3)
        .chunks(3)
        .map(|c| Ok((Box3::new([c[0].0, c[1].0, c[2].0], [c[0].1, c[1].1, c[2].1])?, c[0].2, c[0].3)))
        .collect::<Result<_>>()?;
    let worst2 = |f: &dyn RectangleFunction| -> Result<f64> {
        let d = planar
            .par_iter()
            .map(|(r, axis, c)| additivity_defect(f, r, *axis, *c))
            .collect::<Result<Vec<f64>>>()?;
        Ok(d.into_iter().fold(0.0, f64::max))
    };
    let mut rows = vec![AdditivityRow {
        function: AreaFunction.name(),
        samples,
        max_defect: worst2(&AreaFunction)?,
    }];
    for field in fields {
        let (function, max_defect) = match field {
            CatalogField::Plane(v) => {
                let f = circulation_function(v.clone(), q.clone());
                (f.name(), worst2(&f)?)
            }
            CatalogField::Space(v) => {
                let f = flux_function(v.clone(), q.clone());
                let d = spatial
                    .par_iter()
                    .map(|(b, axis, c)| {
                        let (l, r) = b.split(*axis, *c)?;
                        Ok((f.eval(b) - exact_sum([f.eval(&l), f.eval(&r)])).abs())
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (f.name(), d.into_iter().fold(0.0, f64::max))
            }
        };
        rows.push(AdditivityRow {
            function,
            samples,
            max_defect,
        });
    }
    Ok(rows)
}
