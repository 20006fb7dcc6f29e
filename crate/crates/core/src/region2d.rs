//! Closed polyline curves and the Jordan regions they bound.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom2d::{figure_from_cells, CellIndex, DyadicGrid, Figure, Rect};
use crate::sum::exact_sum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    fn dist(self, o: Point2) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

/// Simple closed polyline standing in for a rectifiable Jordan curve.
///
/// The last vertex joins the first. `epsilon` bounds the distance between the
/// polyline and the ideal curve it samples; classification dilates the
/// polyline by it.
#[derive(Debug, Clone)]
pub struct Curve {
    vertices: Vec<Point2>,
    arc: Vec<f64>,
    epsilon: f64,
}

impl Curve {
    /// Validated curve: at least 3 distinct consecutive vertices, no
    /// self-intersection, non-zero enclosed area.
    pub fn new(mut vertices: Vec<Point2>, epsilon: f64) -> Result<Self> {
        if vertices.len() > 3 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::validation(format!(
                "a closed curve needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::validation("epsilon must be finite and >= 0"));
        }
        if vertices.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::validation("vertex coordinates must be finite"));
        }
        let curve = Curve::from_parts(vertices, epsilon);
        if let Some(k) = (1..curve.arc.len()).find(|&k| curve.arc[k] <= curve.arc[k - 1]) {
            return Err(Error::validation(format!(
                "segment {} has zero length (repeated vertex)",
                k - 1
            )));
        }
        if curve.signed_area() == 0.0 {
            return Err(Error::validation("curve encloses zero area"));
        }
        if let Some((a, b)) = curve.find_self_intersection() {
            return Err(Error::validation(format!(
                "curve is not simple: segments {a} and {b} intersect"
            )));
        }
        Ok(curve)
    }

    fn from_parts(vertices: Vec<Point2>, epsilon: f64) -> Self {
        let n = vertices.len();
        let mut arc = Vec::with_capacity(n + 1);
        arc.push(0.0);
        let mut acc = 0.0;
        for k in 0..n {
            acc += vertices[k].dist(vertices[(k + 1) % n]);
            arc.push(acc);
        }
        Curve { vertices, arc, epsilon }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Cumulative arc length at each vertex, closing back to the first
    /// (`len() + 1` entries).
    pub fn arc_lengths(&self) -> &[f64] {
        &self.arc
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segment `k` from vertex `k` to vertex `k+1` (wrapping).
    pub fn segment(&self, k: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        (0..self.len()).map(move |k| self.segment(k))
    }

    pub fn length(&self) -> f64 {
        exact_sum(self.segments().map(|(a, b)| a.dist(b)))
    }

    /// Shoelace area; positive for counterclockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        0.5 * exact_sum(self.segments().flat_map(|(a, b)| [a.x * b.y, -(b.x * a.y)]))
    }

    pub fn orientation(&self) -> Orientation {
        if self.signed_area() > 0.0 {
            Orientation::CounterClockwise
        } else {
            Orientation::Clockwise
        }
    }

    pub fn reversed(&self) -> Curve {
        let mut v = self.vertices.clone();
        v.reverse();
        Curve::from_parts(v, self.epsilon)
    }

    pub fn bounding_rect(&self) -> Rect {
        let mut r = Rect {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for p in &self.vertices {
            r.x0 = r.x0.min(p.x);
            r.x1 = r.x1.max(p.x);
            r.y0 = r.y0.min(p.y);
            r.y1 = r.y1.max(p.y);
        }
        r
    }

    /// Midpoint insertion until every segment is at most `max_seg` long.
    ///
    /// A segment of length `l` is cut into `2^k` equal pieces with the
    /// smallest `k` satisfying the bound; curves already fine enough come
    /// back unchanged.
    pub fn refine(&self, max_seg: f64) -> Result<Curve> {
        if !(max_seg > 0.0) {
            return Err(Error::domain(format!("max_seg must be > 0, got {max_seg}")));
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.segments() {
            let len = a.dist(b);
            let mut pieces = 1usize;
            while len / pieces as f64 > max_seg {
                pieces *= 2;
            }
            out.push(a);
            for m in 1..pieces {
                let t = m as f64 / pieces as f64;
                out.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
        }
        Ok(Curve::from_parts(out, self.epsilon))
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: Point2) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the polyline around `p` (assumed off the curve).
    pub fn winding_number(&self, p: Point2) -> i32 {
        let mut w = 0;
        for (a, b) in self.segments() {
            let cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
            if a.y <= p.y {
                if b.y > p.y && cross > 0.0 {
                    w += 1;
                }
            } else if b.y <= p.y && cross < 0.0 {
                w -= 1;
            }
        }
        w
    }

    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.len();
        // Sort segments by their lower x extent and sweep.
        let mut order: Vec<usize> = (0..n).collect();
        let lo = |k: usize| {
            let (a, b) = self.segment(k);
            a.x.min(b.x)
        };
        let hi = |k: usize| {
            let (a, b) = self.segment(k);
            a.x.max(b.x)
        };
        order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)));
        for (pos, &s) in order.iter().enumerate() {
            let s_hi = hi(s);
            for &t in &order[pos + 1..] {
                if lo(t) > s_hi {
                    break;
                }
                let adjacent = (s + 1) % n == t || (t + 1) % n == s;
                let (p1, p2) = self.segment(s);
                let (q1, q2) = self.segment(t);
                if adjacent {
                    // Neighbours share one vertex; they must not fold back.
                    if collinear_overlap(p1, p2, q1, q2) {
                        return Some((s.min(t), s.max(t)));
                    }
                } else if segments_intersect(p1, p2, q1, q2) {
                    return Some((s.min(t), s.max(t)));
                }
            }
        }
        None
    }
}

pub fn curve_length(c: &Curve) -> f64 {
    c.length()
}

pub fn curve_signed_area(c: &Curve) -> f64 {
    c.signed_area()
}

pub fn refine_curve(c: &Curve, max_seg: f64) -> Result<Curve> {
    c.refine(max_seg)
}

/// Whether `p` lies in the region bounded by `c`.
///
/// Points within `epsilon` of the polyline (or on it) are indeterminate.
pub fn point_in_region(c: &Curve, p: Point2) -> Result<bool> {
    if c.distance_to(p) <= c.epsilon {
        return Err(Error::Indeterminate { x: p.x, y: p.y });
    }
    Ok(c.winding_number(p) % 2 != 0)
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Two segments sharing an endpoint that also overlap along a line.
fn collinear_overlap(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    if orient(p1, p2, q1) != 0.0 || orient(p1, p2, q2) != 0.0 {
        return false;
    }
    let dir = (p2.x - p1.x, p2.y - p1.y);
    let proj = |p: Point2| (p.x - p1.x) * dir.0 + (p.y - p1.y) * dir.1;
    let l2 = dir.0 * dir.0 + dir.1 * dir.1;
    let (a, b) = (proj(q1), proj(q2));
    let (lo, hi) = (a.min(b), a.max(b));
    // Overlap of more than a single shared point.
    hi.min(l2) - lo.max(0.0) > 0.0
}

pub(crate) fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = Point2::new(a.x + t * dx, a.y + t * dy);
    p.dist(q)
}

/// Euclidean distance between a segment and a closed rectangle.
pub(crate) fn segment_rect_distance(a: Point2, b: Point2, r: &Rect) -> f64 {
    if segment_meets_rect(a, b, r) {
        return 0.0;
    }
    let to_rect = |p: Point2| {
        let dx = (r.x0 - p.x).max(0.0).max(p.x - r.x1);
        let dy = (r.y0 - p.y).max(0.0).max(p.y - r.y1);
        dx.hypot(dy)
    };
    let corners = [
        Point2::new(r.x0, r.y0),
        Point2::new(r.x1, r.y0),
        Point2::new(r.x1, r.y1),
        Point2::new(r.x0, r.y1),
    ];
    corners
        .iter()
        .map(|&c| point_segment_distance(c, a, b))
        .chain([to_rect(a), to_rect(b)])
        .fold(f64::INFINITY, f64::min)
}

/// Liang–Barsky clip of a segment against a closed rectangle.
fn segment_meets_rect(a: Point2, b: Point2, r: &Rect) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dx, a.x - r.x0),
        (dx, r.x1 - a.x),
        (-dy, a.y - r.y0),
        (dy, r.y1 - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellLabel {
    Interior,
    Boundary,
    Exterior,
}

/// Labels of every cell of a grid relative to a curve.
#[derive(Debug, Clone)]
pub struct CellClassification {
    grid: DyadicGrid,
    labels: Vec<CellLabel>,
}

impl CellClassification {
    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn label(&self, cell: CellIndex) -> CellLabel {
        self.labels[self.grid.linear_index(cell)]
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }

    pub fn cells_with(&self, wanted: &[CellLabel]) -> impl Iterator<Item = CellIndex> + '_ {
        let wanted = wanted.to_vec();
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, l)| wanted.contains(l))
            .map(|(k, _)| self.grid.cell_at(k))
    }

    pub fn count(&self, label: CellLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Interior cells: a figure inside the region.
    pub fn inner_figure(&self) -> Figure {
        figure_from_cells(&self.grid, self.cells_with(&[CellLabel::Interior]))
            .expect("classification cells are in range")
    }

    /// Interior and Boundary cells: a figure covering the closed region.
    pub fn outer_figure(&self) -> Figure {
        figure_from_cells(
            &self.grid,
            self.cells_with(&[CellLabel::Interior, CellLabel::Boundary]),
        )
        .expect("classification cells are in range")
    }

    pub fn boundary_figure(&self) -> Figure {
        figure_from_cells(&self.grid, self.cells_with(&[CellLabel::Boundary]))
            .expect("classification cells are in range")
    }
}

/// Label the cells of `grid` as Interior, Boundary or Exterior of `c`.
///
/// A cell is Boundary when its closed extent lies within `epsilon` of the
/// polyline, ties included. The remaining cells split into 4-connected
/// components that each lie entirely on one side of the curve: the component
/// reached from the grid rim is Exterior, and any other component is decided
/// by the winding number at one of its cell centres.
pub fn classify_cells(c: &Curve, grid: &DyadicGrid) -> Result<CellClassification> {
    let bounds = grid.bounds();
    let bb = c.bounding_rect();
    let eps = c.epsilon();
    if !(bounds.x0 < bb.x0 - eps
        && bb.x1 + eps < bounds.x1
        && bounds.y0 < bb.y0 - eps
        && bb.y1 + eps < bounds.y1)
    {
        return Err(Error::BoundingBox(format!(
            "grid {bounds:?} does not strictly contain the curve extent {bb:?} dilated by {eps}"
        )));
    }
    let n = grid.cells_per_axis();

    let hits: Vec<Vec<usize>> = (0..c.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = c.segment(k);
            let mut out = Vec::new();
            let Some((i0, i1)) = grid.column_span(a.x.min(b.x) - eps, a.x.max(b.x) + eps) else {
                return out;
            };
            let Some((j0, j1)) = grid.row_span(a.y.min(b.y) - eps, a.y.max(b.y) + eps) else {
                return out;
            };
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if segment_rect_distance(a, b, &grid.cell_rect((i, j))) <= eps {
                        out.push(grid.linear_index((i, j)));
                    }
                }
            }
            out
        })
        .collect();

    let mut labels: Vec<Option<CellLabel>> = vec![None; n * n];
    for k in hits.into_iter().flatten() {
        labels[k] = Some(CellLabel::Boundary);
    }
    // A rim cell clear of the curve reaches the outside of the bounds, which
    // strictly contain the curve, so it is Exterior.
    let rim = (0..n).flat_map(|t| [(t, 0), (t, n - 1), (0, t), (n - 1, t)]);
    flood(grid, &mut labels, rim, CellLabel::Exterior);

    for k in 0..n * n {
        if labels[k].is_none() {
            let cell = grid.cell_at(k);
            let (x, y) = grid.cell_rect(cell).center();
            let label = match point_in_region(c, Point2::new(x, y)) {
                Ok(true) => CellLabel::Interior,
                Ok(false) => CellLabel::Exterior,
                // A non-boundary cell is farther than epsilon from the curve.
                Err(_) => unreachable!("cell centre of a non-boundary cell is off the curve"),
            };
            flood(grid, &mut labels, std::iter::once(cell), label);
        }
    }
    Ok(CellClassification {
        grid: *grid,
        labels: labels.into_iter().map(|l| l.expect("every cell labelled")).collect(),
    })
}

fn flood(
    grid: &DyadicGrid,
    labels: &mut [Option<CellLabel>],
    seeds: impl IntoIterator<Item = CellIndex>,
    label: CellLabel,
) {
    let n = grid.cells_per_axis();
    let mut queue = VecDeque::new();
    for cell in seeds {
        let k = grid.linear_index(cell);
        if labels[k].is_none() {
            labels[k] = Some(label);
            queue.push_back(cell);
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        let neighbours = [
            (i.wrapping_sub(1), j),
            (i + 1, j),
            (i, j.wrapping_sub(1)),
            (i, j + 1),
        ];
        for (a, b) in neighbours {
            if a < n && b < n {
                let k = grid.linear_index((a, b));
                if labels[k].is_none() {
                    labels[k] = Some(label);
                    queue.push_back((a, b));
                }
            }
        }
    }
}

/// Default grid bounds for a curve when none are given.
///
/// A square centred on the curve's bounding box, 25% larger than its longest
/// side, and wide enough that the margin is at least two cells at `min_level`.
pub fn default_bounds(c: &Curve, min_level: u32) -> Result<Rect> {
    let bb = c.bounding_rect();
    let extent = bb.width().max(bb.height()) + 2.0 * c.epsilon();
    let mut side = 1.25 * extent;
    if min_level >= 3 {
        let frac = 4.0 / (1u64 << min_level) as f64;
        side = side.max(extent / (1.0 - frac));
    }
    let (cx, cy) = bb.center();
    Rect::new(cx - side / 2.0, cx + side / 2.0, cy - side / 2.0, cy + side / 2.0)
}

/// Axis-aligned square `[x0, x0 + side]²`, counterclockwise.
pub fn square(x0: f64, y0: f64, side: f64) -> Curve {
    Curve::new(
        vec![
            Point2::new(x0, y0),
            Point2::new(x0 + side, y0),
            Point2::new(x0 + side, y0 + side),
            Point2::new(x0, y0 + side),
        ],
        0.0,
    )
    .expect("square is a valid curve")
}

/// Regular `n`-gon inscribed in the circle of radius `r` about `(cx, cy)`,
/// counterclockwise from angle 0.
///
/// `epsilon` is the chord sagitta `r (1 - cos(π/n))`, the farthest the circle
/// strays from the polygon. When `n` is divisible by 4 the quadrant vertices
/// are mirrored so the polygon is exactly symmetric about both axes through
/// its centre.
pub fn disk(cx: f64, cy: f64, r: f64, n: usize) -> Result<Curve> {
    if n < 3 {
        return Err(Error::validation(format!("disk needs at least 3 vertices, got {n}")));
    }
    if !(r > 0.0) {
        return Err(Error::domain("disk radius must be > 0"));
    }
    let unit: Vec<(f64, f64)> = if n % 4 == 0 {
        let q = n / 4;
        // First octant computed, the rest of the quadrant mirrored across
        // the diagonal.
        let angle = |k: usize| {
            let t = 2.0 * PI * k as f64 / n as f64;
            if k == 0 {
                (1.0, 0.0)
            } else {
                (t.cos(), t.sin())
            }
        };
        let first: Vec<(f64, f64)> = (0..q)
            .map(|k| {
                if 2 * k == q {
                    (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
                } else if 2 * k < q {
                    angle(k)
                } else {
                    let (x, y) = angle(q - k);
                    (y, x)
                }
            })
            .collect();
        let mut pts = Vec::with_capacity(n);
        pts.extend(first.iter().copied());
        pts.extend(first.iter().map(|&(x, y)| (-y, x)));
        pts.extend(first.iter().map(|&(x, y)| (-x, -y)));
        pts.extend(first.iter().map(|&(x, y)| (y, -x)));
        pts
    } else {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect()
    };
    let eps = r * (1.0 - (PI / n as f64).cos());
    Curve::new(
        unit.into_iter()
            .map(|(x, y)| Point2::new(cx + r * x, cy + r * y))
            .collect(),
        eps,
    )
}

/// L-shaped hexagon `[-1,1]² \ (0,1]²`, counterclockwise, area 3.
pub fn lshape() -> Curve {
    Curve::new(
        vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, 1.0),
        ],
        0.0,
    )
    .expect("lshape is a valid curve")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclaredOrientation {
    Auto,
    Ccw,
    Cw,
}

/// Parse a curve file.
///
/// ```text
/// # comment
/// closed = true
/// epsilon = 0.001
/// orientation = ccw      # auto | ccw | cw
/// 0.0 0.0
/// 1.0, 0.0
/// 1.0 1.0
/// ```
///
/// Vertex rows hold two numbers separated by whitespace or a comma.
/// `closed = true` is required. A declared orientation must match the vertex
/// order.
pub fn parse_curve(text: &str, source_name: &str) -> Result<Curve> {
    let mut closed = None;
    let mut epsilon = 0.0;
    let mut orientation = DeclaredOrientation::Auto;
    let mut vertices = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let (key, value) = (key.trim(), value.trim());
            match key {
                "closed" => {
                    closed = Some(value.parse::<bool>().map_err(|_| {
                        Error::parse(source_name, lineno, format!("closed expects true/false, got `{value}`"))
                    })?)
                }
                "epsilon" => {
                    epsilon = value.parse::<f64>().map_err(|_| {
                        Error::parse(source_name, lineno, format!("epsilon expects a number, got `{value}`"))
                    })?;
                    if !(epsilon >= 0.0) {
                        return Err(Error::parse(source_name, lineno, "epsilon must be >= 0"));
                    }
                }
                "orientation" => {
                    orientation = match value {
                        "auto" => DeclaredOrientation::Auto,
                        "ccw" => DeclaredOrientation::Ccw,
                        "cw" => DeclaredOrientation::Cw,
                        other => {
                            return Err(Error::parse(
                                source_name,
                                lineno,
                                format!("orientation expects auto|ccw|cw, got `{other}`"),
                            ))
                        }
                    }
                }
                other => {
                    return Err(Error::parse(source_name, lineno, format!("unknown key `{other}`")))
                }
            }
            continue;
        }
        let nums: Vec<&str> = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let [xs, ys] = nums.as_slice() else {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("expected a vertex row `x y`, got `{line}`"),
            ));
        };
        let x = xs.parse::<f64>();
        let y = ys.parse::<f64>();
        match (x, y) {
            (Ok(x), Ok(y)) => vertices.push(Point2::new(x, y)),
            _ => {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("vertex row has a non-numeric entry: `{line}`"),
                ))
            }
        }
    }
    match closed {
        Some(true) => {}
        Some(false) => return Err(Error::validation(format!("{source_name}: curve is declared open (closed = false)"))),
        None => return Err(Error::validation(format!("{source_name}: missing `closed = true`"))),
    }
    let curve = Curve::new(vertices, epsilon)?;
    let actual = curve.orientation();
    let mismatch = matches!(
        (orientation, actual),
        (DeclaredOrientation::Ccw, Orientation::Clockwise)
            | (DeclaredOrientation::Cw, Orientation::CounterClockwise)
    );
    if mismatch {
        return Err(Error::validation(format!(
            "{source_name}: declared orientation {orientation:?} but vertices run {actual:?}"
        )));
    }
    Ok(curve)
}

pub fn read_curve(path: &Path) -> Result<Curve> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_curve(&text, &path.display().to_string())
}

/// Render a curve in the format read by [`parse_curve`].
pub fn write_curve(c: &Curve) -> String {
    let mut s = String::from("closed = true\n");
    s.push_str(&format!("epsilon = {}\n", c.epsilon()));
    let o = match c.orientation() {
        Orientation::CounterClockwise => "ccw",
        Orientation::Clockwise => "cw",
    };
    s.push_str(&format!("orientation = {o}\n"));
    for p in c.vertices() {
        s.push_str(&format!("{} {}\n", p.x, p.y));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_square() -> Curve {
        square(0.0, 0.0, 1.0)
    }

    #[test]
    fn length_examples() {
        assert_eq!(curve_length(&unit_square()), 4.0);
        let n = 4096;
        let d = disk(0.0, 0.0, 1.0, n).unwrap();
        let exact = 2.0 * n as f64 * (PI / n as f64).sin();
        assert!((curve_length(&d) - exact).abs() < 1e-12);
        assert!((curve_length(&d) - 2.0 * PI).abs() < 1e-5);
        let two = Curve::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], 0.0);
        assert!(matches!(two, Err(Error::Validation(_))));
    }

    #[test]
    fn signed_area_examples() {
        assert_eq!(curve_signed_area(&unit_square()), 1.0);
        assert_eq!(curve_signed_area(&unit_square().reversed()), -1.0);
        let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
        let n = 4096.0;
        let exact = 0.5 * n * (2.0 * PI / n).sin();
        assert!((curve_signed_area(&d) - exact).abs() < 1e-12);
        assert!((curve_signed_area(&d) - PI).abs() < 1e-5);
        assert_eq!(d.orientation(), Orientation::CounterClockwise);
    }

    #[test]
    fn refine_examples() {
        let r = refine_curve(&unit_square(), 0.5).unwrap();
        assert_eq!(r.len(), 8);
        assert_eq!(r.length(), 4.0);
        let again = refine_curve(&r, 0.5).unwrap();
        assert_eq!(again.vertices(), r.vertices());
        assert!(matches!(refine_curve(&unit_square(), 0.0), Err(Error::Domain(_))));
        assert!(refine_curve(&unit_square(), -1.0).is_err());
    }

    #[test]
    fn point_in_region_examples() {
        let s = unit_square();
        assert!(point_in_region(&s, Point2::new(0.5, 0.5)).unwrap());
        assert!(!point_in_region(&s, Point2::new(10.0, 10.0)).unwrap());
        assert!(matches!(
            point_in_region(&s, Point2::new(0.5, 1.0)),
            Err(Error::Indeterminate { .. })
        ));
        assert!(point_in_region(&s.reversed(), Point2::new(0.5, 0.5)).unwrap());
    }

    #[test]
    fn rejects_self_intersection_and_repeats() {
        let bowtie = Curve::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
            ],
            0.0,
        );
        assert!(matches!(bowtie, Err(Error::Validation(_))));
        let repeat = Curve::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
            ],
            0.0,
        );
        assert!(repeat.is_err());
        let flat = Curve::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)],
            0.0,
        );
        assert!(flat.is_err());
        let spike = Curve::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(2.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
            ],
            0.0,
        );
        assert!(spike.is_err());
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let c = Curve::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 0.0),
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn disk_is_mirror_symmetric() {
        let d = disk(0.0, 0.0, 1.0, 64).unwrap();
        let v = d.vertices();
        for k in 0..64 {
            let m = v[(32 + 64 - k) % 64];
            assert_eq!(m.x, -v[k].x);
            assert_eq!(m.y, v[k].y);
        }
    }

    #[test]
    fn classify_square_against_point_oracle() {
        let s = unit_square();
        let grid = DyadicGrid::new(Rect::new(-1.0, 2.0, -1.0, 2.0).unwrap(), 2).unwrap();
        let cls = classify_cells(&s, &grid).unwrap();
        let n = grid.cells_per_axis();
        for j in 0..n {
            for i in 0..n {
                let r = grid.cell_rect((i, j));
                let touches = segment_rect_distance_to_curve(&s, &r) == 0.0;
                let (x, y) = r.center();
                match cls.label((i, j)) {
                    CellLabel::Boundary => assert!(touches),
                    CellLabel::Interior => {
                        assert!(!touches);
                        assert!(point_in_region(&s, Point2::new(x, y)).unwrap());
                    }
                    CellLabel::Exterior => {
                        assert!(!touches);
                        assert!(!point_in_region(&s, Point2::new(x, y)).unwrap());
                    }
                }
            }
        }
        // Cells are 0.75 wide starting at -1: lines at -0.25, 0.5, 1.25.
        // Every cell with x or y range meeting [0, 1] on the square's sides is
        // Boundary; no cell fits strictly inside.
        assert_eq!(cls.count(CellLabel::Interior), 0);
        assert_eq!(cls.count(CellLabel::Boundary), 4);

        // An aligned grid over [-1, 3]² at level 3 (h = 0.5) has 4 interior
        // cells and a ring of 12 + 20 touching cells.
        let grid = DyadicGrid::new(Rect::new(-1.0, 3.0, -1.0, 3.0).unwrap(), 3).unwrap();
        let cls = classify_cells(&s, &grid).unwrap();
        assert_eq!(cls.count(CellLabel::Interior), 0);
        let grid = grid.refined().unwrap();
        let cls = classify_cells(&s, &grid).unwrap();
        // h = 0.25: 4x4 cells inside the square, the 12 along its inner rim
        // touch the sides, as do the 20 just outside.
        assert_eq!(cls.count(CellLabel::Interior), 4);
        assert_eq!(cls.count(CellLabel::Boundary), 12 + 20);
    }

    fn segment_rect_distance_to_curve(c: &Curve, r: &Rect) -> f64 {
        c.segments()
            .map(|(a, b)| segment_rect_distance(a, b, r))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn classify_disk_brackets_area() {
        let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
        let grid = DyadicGrid::new(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), 6).unwrap();
        let cls = classify_cells(&d, &grid).unwrap();
        let inner = cls.inner_figure().area();
        let outer = cls.outer_figure().area();
        assert!(inner < PI && PI < outer, "{inner} {outer}");
    }

    #[test]
    fn touching_grid_line_is_boundary() {
        // The square's left side lies on the grid line x = 0.
        let s = square(0.0, 0.25, 0.5);
        let grid = DyadicGrid::new(Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 3).unwrap();
        let cls = classify_cells(&s, &grid).unwrap();
        // Column 3 is [-0.25, 0], column 4 is [0, 0.25]; rows 5 covers [0.25, 0.5].
        assert_eq!(cls.label((3, 5)), CellLabel::Boundary);
        assert_eq!(cls.label((4, 5)), CellLabel::Boundary);
        assert_eq!(cls.label((2, 5)), CellLabel::Exterior);
    }

    #[test]
    fn bounding_box_must_contain_curve() {
        let s = unit_square();
        let grid = DyadicGrid::new(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap(), 3).unwrap();
        assert!(matches!(classify_cells(&s, &grid), Err(Error::BoundingBox(_))));
        let grid = DyadicGrid::new(Rect::new(-0.1, 1.1, -0.1, 1.1).unwrap(), 1).unwrap();
        let cls = classify_cells(&s, &grid).unwrap();
        assert_eq!(cls.count(CellLabel::Boundary), 4);
    }

    #[test]
    fn walled_in_pocket_is_exterior() {
        // A square with a square cavity joined to the outside by a channel
        // far narrower than a cell: the cavity cells cannot be reached from
        // the rim but lie outside the region.
        let c = Curve::new(
            vec![
                Point2::new(-1.0, -1.0),
                Point2::new(1.0, -1.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.01, 1.0),
                Point2::new(0.01, 0.6),
                Point2::new(0.6, 0.6),
                Point2::new(0.6, -0.6),
                Point2::new(-0.6, -0.6),
                Point2::new(-0.6, 0.6),
                Point2::new(-0.01, 0.6),
                Point2::new(-0.01, 1.0),
                Point2::new(-1.0, 1.0),
            ],
            0.0,
        )
        .unwrap();
        let area = 4.0 - 1.44 - 0.02 * 0.4;
        assert!((c.signed_area() - area).abs() < 1e-12);
        for level in 4..8 {
            let grid = DyadicGrid::new(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), level).unwrap();
            let cls = classify_cells(&c, &grid).unwrap();
            let n = grid.cells_per_axis();
            assert_eq!(cls.label((n / 2, n / 2)), CellLabel::Exterior);
            for cell in cls.cells_with(&[CellLabel::Interior]) {
                let (x, y) = grid.cell_rect(cell).center();
                assert!(point_in_region(&c, Point2::new(x, y)).unwrap());
            }
            assert!(cls.inner_figure().area() <= area);
            assert!(cls.outer_figure().area() >= area);
        }
    }

    #[test]
    fn curve_file_round_trip_and_errors() {
        let d = disk(0.2, -0.1, 0.7, 12).unwrap();
        let back = parse_curve(&write_curve(&d), "mem").unwrap();
        assert_eq!(back.vertices(), d.vertices());
        assert_eq!(back.epsilon(), d.epsilon());

        let open = "closed = false\n0 0\n1 0\n1 1\n";
        assert!(matches!(parse_curve(open, "f"), Err(Error::Validation(_))));
        let missing = "0 0\n1 0\n1 1\n";
        assert!(parse_curve(missing, "f").is_err());
        let bad = "closed = true\n0 0\n1 zero\n1 1\n";
        match parse_curve(bad, "f") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let wrong = "closed = true\norientation = cw\n0 0\n1 0\n1 1\n";
        assert!(parse_curve(wrong, "f").is_err());
        let commas = "closed=true # trailing comment\n0,0\n1, 0\n1 1\n";
        assert_eq!(parse_curve(commas, "f").unwrap().len(), 3);
    }

    proptest! {
        #[test]
        fn classification_matches_winding_oracle(
            cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.3f64..1.2,
            n in 3usize..40, level in 2u32..7,
        ) {
            let c = disk(cx, cy, r, n).unwrap();
            let grid = DyadicGrid::new(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), level).unwrap();
            let cls = classify_cells(&c, &grid).unwrap();
            for k in 0..grid.cell_count() {
                let cell = grid.cell_at(k);
                let (x, y) = grid.cell_rect(cell).center();
                match cls.label(cell) {
                    CellLabel::Interior => prop_assert!(point_in_region(&c, Point2::new(x, y)).unwrap()),
                    CellLabel::Exterior => prop_assert!(!point_in_region(&c, Point2::new(x, y)).unwrap()),
                    CellLabel::Boundary => {}
                }
            }
        }

        #[test]
        fn refinement_is_monotone(n in 3usize..30, level in 2u32..7, cx in -0.5f64..0.5) {
            let c = disk(cx, 0.1, 1.0, n).unwrap();
            let g = DyadicGrid::new(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), level).unwrap();
            let coarse = classify_cells(&c, &g).unwrap();
            let fine = classify_cells(&c, &g.refined().unwrap()).unwrap();
            for k in 0..g.cell_count() {
                let cell = g.cell_at(k);
                for child in DyadicGrid::children(cell) {
                    match coarse.label(cell) {
                        CellLabel::Interior => prop_assert_eq!(fine.label(child), CellLabel::Interior),
                        CellLabel::Exterior => prop_assert_eq!(fine.label(child), CellLabel::Exterior),
                        CellLabel::Boundary => {}
                    }
                }
            }
        }

        #[test]
        fn reversal_negates_area(n in 3usize..50, r in 0.1f64..3.0) {
            let c = disk(0.0, 0.0, r, n).unwrap();
            prop_assert_eq!(c.signed_area(), -c.reversed().signed_area());
        }
    }
}
