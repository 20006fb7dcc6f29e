use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sum::exact_sum;

pub type Point3 = [f64; 3];

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

/// Triangulated surface with outward (counterclockwise seen from outside)
/// winding.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    epsilon: f64,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::validation("epsilon must be finite and >= 0"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::validation("vertex coordinates must be finite"));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::validation(format!(
                    "triangle {t} references vertex {bad} of {}",
                    vertices.len()
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::validation(format!("triangle {t} repeats a vertex")));
            }
        }
        Ok(TriMesh {
            vertices,
            triangles,
            epsilon,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::validation("epsilon must be finite and >= 0"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn triangle(&self, t: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Every directed edge appears once and its reverse once.
    pub fn is_closed(&self) -> bool {
        if self.triangles.is_empty() {
            return false;
        }
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for &[a, b, c] in &self.triangles {
            for e in [(a, b), (b, c), (c, a)] {
                *count.entry(e).or_default() += 1;
            }
        }
        count
            .iter()
            .all(|(&(a, b), &n)| n == 1 && count.get(&(b, a)) == Some(&1))
    }

    pub fn area(&self) -> f64 {
        exact_sum((0..self.len()).map(|t| {
            let [a, b, c] = self.triangle(t);
            0.5 * norm(cross(sub(b, a), sub(c, a)))
        }))
    }

    /// `Σ a · (b × c) / 6`; positive for outward winding.
    pub fn signed_volume(&self) -> f64 {
        exact_sum((0..self.len()).map(|t| {
            let [a, b, c] = self.triangle(t);
            dot(a, cross(b, c)) / 6.0
        }))
    }

    /// Total length of the undirected edges.
    pub fn edge_length(&self) -> f64 {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        exact_sum(
            edges
                .into_iter()
                .map(|(a, b)| norm(sub(self.vertices[a], self.vertices[b]))),
        )
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Generalized winding number of the surface around `p`: the summed
    /// signed solid angle of the triangles over `4π`.
    pub fn winding_number(&self, p: Point3) -> f64 {
        let total = exact_sum((0..self.len()).map(|t| {
            let [a, b, c] = self.triangle(t).map(|v| sub(v, p));
            let (la, lb, lc) = (norm(a), norm(b), norm(c));
            let num = dot(a, cross(b, c));
            let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
            2.0 * num.atan2(den)
        }));
        total / (4.0 * std::f64::consts::PI)
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.winding_number(p).abs() > 0.5
    }

    pub fn flipped(&self) -> TriMesh {
        TriMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshChecks {
    pub area: f64,
    pub signed_volume: f64,
    pub closed: bool,
}

pub fn mesh_checks(m: &TriMesh) -> MeshChecks {
    MeshChecks {
        area: m.area(),
        signed_volume: m.signed_volume(),
        closed: m.is_closed(),
    }
}

/// Axis-aligned box `[x0, x0+s] × [y0, y0+s] × [z0, z0+s]` as 12 triangles.
pub fn cube(origin: Point3, side: f64) -> TriMesh {
    let [x, y, z] = origin;
    let s = side;
    let v = vec![
        [x, y, z],
        [x + s, y, z],
        [x + s, y + s, z],
        [x, y + s, z],
        [x, y, z + s],
        [x + s, y, z + s],
        [x + s, y + s, z + s],
        [x, y + s, z + s],
    ];
    let t = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(v, t, 0.0).expect("cube indices are valid")
}

/// Unit icosahedron subdivided `depth` times, new vertices pushed out to
/// the unit sphere. `20 · 4^depth` triangles.
pub fn icosphere(depth: u32) -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .into_iter()
    .map(unit)
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point3>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    TriMesh::new(vertices, triangles, 0.0).expect("icosphere indices are valid")
}

fn unit(p: Point3) -> Point3 {
    let n = norm(p);
    [p[0] / n, p[1] / n, p[2] / n]
}

/// Parse either the triangle-soup format
///
/// ```text
/// vertices 4 triangles 4
/// 0 0 0
/// ...
/// 0 2 1
/// ...
/// ```
///
/// (0-based indices) or a text polygon file with `v x y z` and `f a b c`
/// rows (1-based, `a/t/n` forms accepted, triangles only).
pub fn parse_mesh(text: &str, source_name: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((first_no, first)) = lines.next() else {
        return Err(Error::parse(source_name, 1, "empty mesh file"));
    };
    let rest: Vec<(usize, &str)> = lines.collect();
    if first.starts_with("vertices") {
        parse_soup(first_no, first, &rest, source_name)
    } else {
        let mut all = vec![(first_no, first)];
        all.extend(rest);
        parse_obj(&all, source_name)
    }
}

fn parse_soup(header_no: usize, header: &str, rest: &[(usize, &str)], src: &str) -> Result<TriMesh> {
    let tok: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match tok.as_slice() {
        ["vertices", n, "triangles", m] => (
            n.parse::<usize>()
                .map_err(|_| Error::parse(src, header_no, "vertex count is not an integer"))?,
            m.parse::<usize>()
                .map_err(|_| Error::parse(src, header_no, "triangle count is not an integer"))?,
        ),
        _ => {
            return Err(Error::parse(
                src,
                header_no,
                "header must read `vertices N triangles M`",
            ))
        }
    };
    if rest.len() != n + m {
        let at = rest.last().map_or(header_no, |r| r.0);
        return Err(Error::parse(
            src,
            at,
            format!("expected {} data rows, found {}", n + m, rest.len()),
        ));
    }
    let mut vertices = Vec::with_capacity(n);
    for &(no, line) in &rest[..n] {
        vertices.push(numbers::<f64, 3>(line, no, src)?);
    }
    let mut triangles = Vec::with_capacity(m);
    for &(no, line) in &rest[n..] {
        triangles.push(numbers::<usize, 3>(line, no, src)?);
    }
    TriMesh::new(vertices, triangles, 0.0)
}

fn parse_obj(lines: &[(usize, &str)], src: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for &(no, line) in lines {
        let (tag, body) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match tag {
            "v" => {
                let mut it = body.split_whitespace();
                let mut p = [0.0; 3];
                for c in &mut p {
                    *c = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::parse(src, no, "vertex row needs three numbers"))?;
                }
                vertices.push(p);
            }
            "f" => {
                let idx: Vec<&str> = body.split_whitespace().collect();
                if idx.len() != 3 {
                    return Err(Error::parse(
                        src,
                        no,
                        format!("only triangles are supported, face has {} corners", idx.len()),
                    ));
                }
                let mut tri = [0usize; 3];
                for (slot, s) in tri.iter_mut().zip(idx) {
                    let head = s.split('/').next().unwrap_or("");
                    let k: usize = head
                        .parse()
                        .map_err(|_| Error::parse(src, no, format!("bad face index `{s}`")))?;
                    if k == 0 {
                        return Err(Error::parse(src, no, "face indices are 1-based"));
                    }
                    *slot = k - 1;
                }
                triangles.push(tri);
            }
            "vn" | "vt" | "o" | "g" | "s" | "usemtl" | "mtllib" => {}
            other => return Err(Error::parse(src, no, format!("unknown row type `{other}`"))),
        }
    }
    TriMesh::new(vertices, triangles, 0.0)
}

fn numbers<T: std::str::FromStr, const N: usize>(line: &str, no: usize, src: &str) -> Result<[T; N]> {
    let parsed: Vec<T> = line
        .split_whitespace()
        .map(|s| s.parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(src, no, format!("non-numeric entry in `{line}`")))?;
    parsed
        .try_into()
        .map_err(|_| Error::parse(src, no, format!("expected {N} entries in `{line}`")))
}

pub fn read_mesh(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mesh(&text, &path.display().to_string())
}

/// Render in the triangle-soup format.
pub fn write_mesh(m: &TriMesh) -> String {
    let mut s = format!("vertices {} triangles {}\n", m.vertices.len(), m.triangles.len());
    for v in &m.vertices {
        s.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
    }
    for t in &m.triangles {
        s.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
    }
    s
}
