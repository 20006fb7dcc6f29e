//! Axis-parallel rectangles, figures and dyadic grids in the plane.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sum::exact_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Cut or edge along x (horizontal line / horizontal edge).
    Horizontal,
    /// Cut or edge along y (vertical line / vertical edge).
    Vertical,
}

/// Closed axis-parallel rectangle `[x0, x1] × [y0, y1]`.
///
/// Zero width or height is allowed; such a rectangle has area 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(Error::domain("rectangle coordinates must be finite"));
        }
        if x0 > x1 || y0 > y1 {
            return Err(Error::domain(format!(
                "rectangle [{x0}, {x1}] x [{y0}, {y1}] has reversed sides"
            )));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * self.width() + 2.0 * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        self.x0 == self.x1 || self.y0 == self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Whether the interiors of `self` and `other` intersect.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    /// Cut along `axis` at coordinate `c`.
    ///
    /// `Axis::Vertical` cuts with the vertical line `x = c` (left, right);
    /// `Axis::Horizontal` cuts with the horizontal line `y = c` (bottom, top).
    pub fn split(&self, axis: Axis, c: f64) -> Result<(Rect, Rect)> {
        match axis {
            Axis::Vertical => {
                if !(self.x0 < c && c < self.x1) {
                    return Err(Error::domain(format!(
                        "cut x = {c} not strictly inside [{}, {}]",
                        self.x0, self.x1
                    )));
                }
                Ok((Rect { x1: c, ..*self }, Rect { x0: c, ..*self }))
            }
            Axis::Horizontal => {
                if !(self.y0 < c && c < self.y1) {
                    return Err(Error::domain(format!(
                        "cut y = {c} not strictly inside [{}, {}]",
                        self.y0, self.y1
                    )));
                }
                Ok((Rect { y1: c, ..*self }, Rect { y0: c, ..*self }))
            }
        }
    }
}

pub fn rect_area(r: &Rect) -> f64 {
    r.area()
}

pub fn rect_perimeter(r: &Rect) -> f64 {
    r.perimeter()
}

pub fn split_rect(r: &Rect, axis: Axis, c: f64) -> Result<(Rect, Rect)> {
    r.split(axis, c)
}

/// Column/row index of a grid cell.
pub type CellIndex = (usize, usize);

/// Uniform partition of a bounding rectangle into `2^level` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicGrid {
    bounds: Rect,
    level: u32,
}

/// Deepest level accepted by [`DyadicGrid::new`].
pub const MAX_LEVEL: u32 = 14;

impl DyadicGrid {
    pub fn new(bounds: Rect, level: u32) -> Result<Self> {
        if bounds.is_degenerate() {
            return Err(Error::domain("grid bounds must have positive area"));
        }
        if level > MAX_LEVEL {
            return Err(Error::domain(format!(
                "grid level {level} exceeds the maximum {MAX_LEVEL}"
            )));
        }
        Ok(DyadicGrid { bounds, level })
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per axis.
    pub fn cells_per_axis(&self) -> usize {
        1usize << self.level
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis() * self.cells_per_axis()
    }

    /// Cell side along x.
    pub fn hx(&self) -> f64 {
        self.bounds.width() / self.cells_per_axis() as f64
    }

    /// Cell side along y.
    pub fn hy(&self) -> f64 {
        self.bounds.height() / self.cells_per_axis() as f64
    }

    /// The larger of the two cell sides.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn refined(&self) -> Result<Self> {
        DyadicGrid::new(self.bounds, self.level + 1)
    }

    /// x coordinate of the vertical grid line `i`.
    ///
    /// Computed from the dyadic fraction `i / 2^level`, so the same line has
    /// bit-identical coordinates on every level where it exists.
    pub fn x_at(&self, i: usize) -> f64 {
        let t = i as f64 / self.cells_per_axis() as f64;
        self.bounds.x0 + self.bounds.width() * t
    }

    pub fn y_at(&self, j: usize) -> f64 {
        let t = j as f64 / self.cells_per_axis() as f64;
        self.bounds.y0 + self.bounds.height() * t
    }

    pub fn cell_rect(&self, (i, j): CellIndex) -> Rect {
        Rect {
            x0: self.x_at(i),
            x1: self.x_at(i + 1),
            y0: self.y_at(j),
            y1: self.y_at(j + 1),
        }
    }

    /// Row-major position of a cell in per-cell arrays.
    pub fn linear_index(&self, (i, j): CellIndex) -> usize {
        j * self.cells_per_axis() + i
    }

    pub fn cell_at(&self, linear: usize) -> CellIndex {
        let n = self.cells_per_axis();
        (linear % n, linear / n)
    }

    pub fn check_index(&self, (i, j): CellIndex) -> Result<()> {
        let n = self.cells_per_axis();
        if i >= n || j >= n {
            return Err(Error::CellOutOfRange { i, j, n });
        }
        Ok(())
    }

    /// Range of cell columns whose closed extent meets `[lo, hi]` on x.
    pub(crate) fn column_span(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        axis_span(self.bounds.x0, self.hx(), self.cells_per_axis(), lo, hi)
    }

    pub(crate) fn row_span(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        axis_span(self.bounds.y0, self.hy(), self.cells_per_axis(), lo, hi)
    }

    /// The four children of a cell on the next level.
    pub fn children((i, j): CellIndex) -> [CellIndex; 4] {
        [
            (2 * i, 2 * j),
            (2 * i + 1, 2 * j),
            (2 * i, 2 * j + 1),
            (2 * i + 1, 2 * j + 1),
        ]
    }
}

/// Conservative index range `[first, last]` of cells meeting `[lo, hi]`.
///
/// Widened by one cell on each side; callers run an exact test per cell.
pub(crate) fn axis_span(
    origin: f64,
    h: f64,
    n: usize,
    lo: f64,
    hi: f64,
) -> Option<(usize, usize)> {
    let a = ((lo - origin) / h).floor() - 1.0;
    let b = ((hi - origin) / h).floor() + 1.0;
    if b < 0.0 || a > (n - 1) as f64 {
        return None;
    }
    let first = a.max(0.0) as usize;
    let last = (b as usize).min(n - 1);
    Some((first, last))
}

/// Finite union of axis-parallel rectangles with pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq)]
pub enum Figure {
    /// Cells of one dyadic grid, sorted by row-major index.
    Cells {
        grid: DyadicGrid,
        cells: Vec<CellIndex>,
    },
    /// Explicit non-degenerate rectangles.
    Rects(Vec<Rect>),
}

impl Figure {
    pub fn empty() -> Self {
        Figure::Rects(Vec::new())
    }

    /// Build from explicit rectangles, dropping degenerate ones.
    ///
    /// Rejects pairs whose interiors overlap.
    pub fn from_rects(rects: impl IntoIterator<Item = Rect>) -> Result<Self> {
        let rects: Vec<Rect> = rects.into_iter().filter(|r| !r.is_degenerate()).collect();
        for (k, a) in rects.iter().enumerate() {
            if let Some(b) = rects[k + 1..].iter().find(|b| a.overlaps(b)) {
                return Err(Error::validation(format!(
                    "figure rectangles overlap: {a:?} and {b:?}"
                )));
            }
        }
        Ok(Figure::Rects(rects))
    }

    pub fn len(&self) -> usize {
        match self {
            Figure::Cells { cells, .. } => cells.len(),
            Figure::Rects(rects) => rects.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rect(&self, k: usize) -> Rect {
        match self {
            Figure::Cells { grid, cells } => grid.cell_rect(cells[k]),
            Figure::Rects(rects) => rects[k],
        }
    }

    pub fn rects(&self) -> impl Iterator<Item = Rect> + '_ {
        (0..self.len()).map(move |k| self.rect(k))
    }

    pub fn area(&self) -> f64 {
        exact_sum(self.rects().map(|r| r.area()))
    }

    /// Same point set expressed on the next grid level.
    pub fn refined(&self) -> Result<Figure> {
        match self {
            Figure::Cells { grid, cells } => {
                let fine = grid.refined()?;
                figure_from_cells(&fine, cells.iter().flat_map(|&c| DyadicGrid::children(c)))
            }
            Figure::Rects(_) => Err(Error::validation(
                "only grid figures can be refined",
            )),
        }
    }
}

pub fn figure_area(f: &Figure) -> f64 {
    f.area()
}

/// Figure made of the given cells of `grid`. Duplicates collapse.
pub fn figure_from_cells(
    grid: &DyadicGrid,
    cells: impl IntoIterator<Item = CellIndex>,
) -> Result<Figure> {
    let mut set = BTreeSet::new();
    for c in cells {
        grid.check_index(c)?;
        set.insert((c.1, c.0));
    }
    Ok(Figure::Cells {
        grid: *grid,
        cells: set.into_iter().map(|(j, i)| (i, j)).collect(),
    })
}

/// Directed axis-parallel segment.
///
/// A horizontal edge runs along `y = fixed` over `x ∈ [a, b]`; a vertical
/// edge along `x = fixed` over `y ∈ [a, b]`. `direction` is `+1` when the
/// edge is traversed towards increasing coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedEdge {
    pub axis: Axis,
    pub fixed: f64,
    pub a: f64,
    pub b: f64,
    pub direction: i8,
}

impl OrientedEdge {
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Counterclockwise sides of a rectangle: bottom, right, top, left.
pub fn rect_edges(r: &Rect) -> [OrientedEdge; 4] {
    [
        OrientedEdge { axis: Axis::Horizontal, fixed: r.y0, a: r.x0, b: r.x1, direction: 1 },
        OrientedEdge { axis: Axis::Vertical, fixed: r.x1, a: r.y0, b: r.y1, direction: 1 },
        OrientedEdge { axis: Axis::Horizontal, fixed: r.y1, a: r.x0, b: r.x1, direction: -1 },
        OrientedEdge { axis: Axis::Vertical, fixed: r.x0, a: r.y0, b: r.y1, direction: -1 },
    ]
}

/// Boundary of a grid figure as counterclockwise cell sides.
///
/// A side shared by two member cells is traversed once in each direction by
/// their counterclockwise boundaries and so cancels; only sides with a
/// non-member neighbour remain. Sides are reported per cell, not merged.
pub fn figure_boundary_edges(f: &Figure) -> Result<Vec<OrientedEdge>> {
    let Figure::Cells { grid, cells } = f else {
        return Err(Error::validation(
            "boundary edges are defined for grid figures only",
        ));
    };
    let n = grid.cells_per_axis();
    let mut member = vec![false; grid.cell_count()];
    for &c in cells {
        member[grid.linear_index(c)] = true;
    }
    let has = |i: isize, j: isize| {
        i >= 0
            && j >= 0
            && (i as usize) < n
            && (j as usize) < n
            && member[grid.linear_index((i as usize, j as usize))]
    };
    let mut edges = Vec::new();
    for &(i, j) in cells {
        let [bottom, right, top, left] = rect_edges(&grid.cell_rect((i, j)));
        let (ii, jj) = (i as isize, j as isize);
        if !has(ii, jj - 1) {
            edges.push(bottom);
        }
        if !has(ii + 1, jj) {
            edges.push(right);
        }
        if !has(ii, jj + 1) {
            edges.push(top);
        }
        if !has(ii - 1, jj) {
            edges.push(left);
        }
    }
    Ok(edges)
}
