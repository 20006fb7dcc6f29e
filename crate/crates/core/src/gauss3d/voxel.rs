use std::collections::VecDeque;

use rayon::prelude::*;

use super::mesh::{cross, dot, sub, Point3, TriMesh};
use crate::error::{Error, Result};
use crate::geom2d::axis_span;
use crate::region2d::CellLabel;

/// Closed axis-parallel box `[lo[0], hi[0]] × [lo[1], hi[1]] × [lo[2], hi[2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: Point3,
    pub hi: Point3,
}

impl Box3 {
    pub fn new(lo: Point3, hi: Point3) -> Result<Self> {
        for k in 0..3 {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] <= hi[k]) {
                return Err(Error::validation(format!(
                    "box needs finite lo <= hi on every axis, got {lo:?}..{hi:?}"
                )));
            }
        }
        Ok(Box3 { lo, hi })
    }

    pub fn cube(center: Point3, half: f64) -> Result<Self> {
        Box3::new(center.map(|c| c - half), center.map(|c| c + half))
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        self.side(0) * self.side(1) * self.side(2)
    }

    pub fn surface_area(&self) -> f64 {
        let (a, b, c) = (self.side(0), self.side(1), self.side(2));
        2.0 * (a * b + b * c + a * c)
    }

    pub fn is_degenerate(&self) -> bool {
        (0..3).any(|k| self.side(k) == 0.0)
    }

    pub fn center(&self) -> Point3 {
        [0, 1, 2].map(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    /// The two halves of a cut by the plane `x_axis = at`.
    pub fn split(&self, axis: usize, at: f64) -> Result<(Box3, Box3)> {
        if axis > 2 || !(self.lo[axis] <= at && at <= self.hi[axis]) {
            return Err(Error::domain(format!("cut {at} on axis {axis} lies outside the box")));
        }
        let mut left = *self;
        let mut right = *self;
        left.hi[axis] = at;
        right.lo[axis] = at;
        Ok((left, right))
    }
}

pub type VoxelIndex = [usize; 3];

/// Uniform dyadic grid of `2^level` voxels per axis over `bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelGrid {
    bounds: Box3,
    level: u32,
}

impl VoxelGrid {
    pub const MAX_LEVEL: u32 = 9;

    pub fn new(bounds: Box3, level: u32) -> Result<Self> {
        if level > Self::MAX_LEVEL {
            return Err(Error::domain(format!(
                "voxel level {level} exceeds the maximum {}",
                Self::MAX_LEVEL
            )));
        }
        if bounds.is_degenerate() {
            return Err(Error::validation("voxel grid bounds must have positive volume"));
        }
        Ok(VoxelGrid { bounds, level })
    }

    pub fn bounds(&self) -> Box3 {
        self.bounds
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells_per_axis(&self) -> usize {
        1 << self.level
    }

    pub fn voxel_count(&self) -> usize {
        self.cells_per_axis().pow(3)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.bounds.side(axis) / self.cells_per_axis() as f64
    }

    /// Largest voxel side.
    pub fn h(&self) -> f64 {
        (0..3).map(|k| self.spacing(k)).fold(0.0, f64::max)
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.cells_per_axis() as f64;
        self.bounds.lo[axis] + self.bounds.side(axis) * (i as f64 / n)
    }

    pub fn voxel_box(&self, v: VoxelIndex) -> Box3 {
        Box3 {
            lo: [0, 1, 2].map(|k| self.coord(k, v[k])),
            hi: [0, 1, 2].map(|k| self.coord(k, v[k] + 1)),
        }
    }

    pub fn linear_index(&self, v: VoxelIndex) -> usize {
        let n = self.cells_per_axis();
        (v[2] * n + v[1]) * n + v[0]
    }

    pub fn voxel_at(&self, k: usize) -> VoxelIndex {
        let n = self.cells_per_axis();
        [k % n, (k / n) % n, k / (n * n)]
    }

    fn span(&self, axis: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
        axis_span(self.bounds.lo[axis], self.spacing(axis), self.cells_per_axis(), lo, hi)
    }

    fn on_rim(&self, v: VoxelIndex) -> bool {
        let last = self.cells_per_axis() - 1;
        v.iter().any(|&i| i == 0 || i == last)
    }
}

/// Default cube around a mesh: the same side rule as the planar default box.
pub fn default_box(m: &TriMesh, min_level: u32) -> Result<Box3> {
    let (lo, hi) = m.bounding_box();
    if m.vertices().is_empty() {
        return Err(Error::validation("mesh has no vertices"));
    }
    let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max) + 2.0 * m.epsilon();
    let mut side = 1.25 * extent;
    if min_level >= 3 {
        let frac = 4.0 / (1u64 << min_level) as f64;
        side = side.max(extent / (1.0 - frac));
    }
    Box3::cube([0, 1, 2].map(|k| 0.5 * (lo[k] + hi[k])), side / 2.0)
}

#[derive(Debug, Clone)]
pub struct VoxelClassification {
    grid: VoxelGrid,
    labels: Vec<CellLabel>,
}

impl VoxelClassification {
    pub fn grid(&self) -> &VoxelGrid {
        &self.grid
    }

    pub fn label(&self, v: VoxelIndex) -> CellLabel {
        self.labels[self.grid.linear_index(v)]
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }

    pub fn count(&self, label: CellLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Boxes with the given label in linear-index order.
    pub fn boxes(&self, label: CellLabel) -> Vec<Box3> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(k, _)| self.grid.voxel_box(self.grid.voxel_at(k)))
            .collect()
    }

    pub fn inner_volume(&self) -> f64 {
        self.count(CellLabel::Interior) as f64 * self.grid.voxel_box([0; 3]).volume()
    }

    pub fn outer_volume(&self) -> f64 {
        (self.count(CellLabel::Interior) + self.count(CellLabel::Boundary)) as f64
            * self.grid.voxel_box([0; 3]).volume()
    }
}

/// Separating-axis test between a triangle and a closed box with half sizes
/// `half` centred at `center`. Touching counts as overlap.
pub fn triangle_box_overlap(tri: [Point3; 3], center: Point3, half: Point3) -> bool {
    let v = tri.map(|p| sub(p, center));
    let e = [sub(v[1], v[0]), sub(v[2], v[1]), sub(v[0], v[2])];
    let separated = |axis: Point3| {
        let p = v.map(|q| dot(q, axis));
        let r = half[0] * axis[0].abs() + half[1] * axis[1].abs() + half[2] * axis[2].abs();
        let lo = p[0].min(p[1]).min(p[2]);
        let hi = p[0].max(p[1]).max(p[2]);
        lo > r || hi < -r
    };
    let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    if unit.iter().any(|&a| separated(a)) {
        return false;
    }
    if separated(cross(e[0], e[1])) {
        return false;
    }
    for u in unit {
        for edge in e {
            if separated(cross(u, edge)) {
                return false;
            }
        }
    }
    true
}

/// Label every voxel as Interior, Boundary or Exterior relative to `m`.
///
/// A voxel is Boundary when it meets the mesh grown by `ε` on every axis.
/// Exterior is everything 6-connected to the grid rim without crossing a
/// Boundary voxel. Any other component is sent to the winding number at one
/// voxel centre, so sealed pockets of outside space are not counted inside.
pub fn classify_voxels(m: &TriMesh, grid: &VoxelGrid) -> Result<VoxelClassification> {
    if m.is_empty() {
        return Err(Error::validation("mesh has no triangles"));
    }
    let eps = m.epsilon();
    let b = grid.bounds();
    let (lo, hi) = m.bounding_box();
    for k in 0..3 {
        if !(b.lo[k] < lo[k] - eps && hi[k] + eps < b.hi[k]) {
            return Err(Error::BoundingBox(format!(
                "mesh extent {lo:?}..{hi:?} (epsilon {eps}) does not fit strictly inside {:?}..{:?}",
                b.lo, b.hi
            )));
        }
    }
    let half = [0, 1, 2].map(|k| 0.5 * grid.spacing(k) + eps);
    let hits: Vec<usize> = (0..m.len())
        .into_par_iter()
        .flat_map_iter(|t| {
            let tri = m.triangle(t);
            let mut out = Vec::new();
            let span = |k: usize| {
                let a = tri.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let z = tri.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                grid.span(k, a - eps, z + eps)
            };
            if let (Some(sx), Some(sy), Some(sz)) = (span(0), span(1), span(2)) {
                for kz in sz.0..=sz.1 {
                    for ky in sy.0..=sy.1 {
                        for kx in sx.0..=sx.1 {
                            let v = [kx, ky, kz];
                            if triangle_box_overlap(tri, grid.voxel_box(v).center(), half) {
                                out.push(grid.linear_index(v));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    const UNSEEN: u8 = 0;
    const BOUNDARY: u8 = 1;
    const OUTSIDE: u8 = 2;
    const INSIDE: u8 = 3;
    let total = grid.voxel_count();
    let mut state = vec![UNSEEN; total];
    for k in hits {
        state[k] = BOUNDARY;
    }
    let n = grid.cells_per_axis();
    let neighbours = |v: VoxelIndex| {
        let mut out = [None; 6];
        for axis in 0..3 {
            if v[axis] > 0 {
                let mut w = v;
                w[axis] -= 1;
                out[2 * axis] = Some(w);
            }
            if v[axis] + 1 < n {
                let mut w = v;
                w[axis] += 1;
                out[2 * axis + 1] = Some(w);
            }
        }
        out
    };
    let fill = |state: &mut Vec<u8>, seed: usize, mark: u8| -> Vec<usize> {
        let mut members = vec![seed];
        state[seed] = mark;
        let mut queue = VecDeque::from([seed]);
        while let Some(k) = queue.pop_front() {
            for w in neighbours(grid.voxel_at(k)).into_iter().flatten() {
                let j = grid.linear_index(w);
                if state[j] == UNSEEN {
                    state[j] = mark;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members
    };
    for k in 0..total {
        if state[k] == UNSEEN && grid.on_rim(grid.voxel_at(k)) {
            fill(&mut state, k, OUTSIDE);
        }
    }
    for k in 0..total {
        if state[k] == UNSEEN {
            let members = fill(&mut state, k, INSIDE);
            if !m.contains(grid.voxel_box(grid.voxel_at(k)).center()) {
                for j in members {
                    state[j] = OUTSIDE;
                }
            }
        }
    }
    let labels = state
        .into_iter()
        .map(|s| match s {
            BOUNDARY => CellLabel::Boundary,
            INSIDE => CellLabel::Interior,
            _ => CellLabel::Exterior,
        })
        .collect();
    Ok(VoxelClassification { grid: *grid, labels })
}
