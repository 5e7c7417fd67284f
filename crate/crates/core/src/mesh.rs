//! Conforming triangulations and newest-vertex bisection (NVB).
//!
//! Every triangle stores its vertices as an ordered triple `(v0, v1, v2)`,
//! counterclockwise. The edge `(v0, v1)` is the *reference edge*. Bisecting a
//! triangle inserts the midpoint `m` of the reference edge and produces the
//! children `(v2, v0, m)` and `(v1, v2, m)`, so the reference edge of each child
//! is an edge of the parent opposite the new vertex.
//!
//! Refinement of a set of marked elements works on edges: all three edges of a
//! marked element are marked, then the reference edge of every element owning a
//! marked edge is marked until nothing changes (the closure). Each element is
//! then bisected recursively along marked edges, which gives 1, 2 or 3
//! bisections for unmarked elements and exactly 3 (`Bisec3`, four sons) for
//! marked ones. `Bisec5` additionally bisects the two grandsons whose reference
//! edge is the interior segment from the reference-edge midpoint to `v2`,
//! creating one vertex strictly inside the marked element (six sons).
//!
//! Meshes are immutable. `refine` returns a new generation that records its
//! parent triangle ids, so several generations can be alive at once and
//! [`Mesh::child_map`] can relate any two of them.
//!
//! Only two dimensions are implemented. The 3D variant of the same idea assigns
//! each tetrahedron a vertex permutation and a type in {0, 1, 2}, and needs 18
//! or 20 sons per marked element to obtain interior nodes on every face; it is
//! not provided here.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

const NONE: usize = usize::MAX;

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

/// How marked elements are split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefineMode {
    /// Three bisections: every edge of a marked element is halved (4 sons).
    Bisec3,
    /// Five bisections: as `Bisec3` plus one interior vertex (6 sons).
    Bisec5,
}

impl RefineMode {
    /// Number of sons of a marked element.
    pub fn sons(self) -> usize {
        match self {
            RefineMode::Bisec3 => 4,
            RefineMode::Bisec5 => 6,
        }
    }
}

#[derive(Debug)]
struct Lineage {
    parent_mesh: u64,
    parent_of: Vec<u32>,
    up: Option<Arc<Lineage>>,
}

/// An immutable conforming triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    id: u64,
    generation: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    origin: Vec<u32>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_tris: Vec<[usize; 2]>,
    vertex_boundary: Vec<bool>,
    lineage: Option<Arc<Lineage>>,
}

impl PartialEq for Mesh {
    /// Structural equality: same coordinates, same triangles, same lineage maps.
    fn eq(&self, other: &Self) -> bool {
        let parents = |m: &Mesh| m.lineage.as_ref().map(|l| l.parent_of.clone());
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.origin == other.origin
            && parents(self) == parents(other)
    }
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn sorted(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl Mesh {
    /// Builds an initial (generation 0) mesh. The first two vertices of each
    /// triangle span its reference edge.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        let nv = vertices.len();
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Input("non-finite vertex coordinate".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Input(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Input(format!("triangle {t} has repeated vertices")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area <= 0.0 {
                return Err(Error::Input(format!(
                    "triangle {t} is not counterclockwise (signed area {area:e})"
                )));
            }
        }
        let origin = (0..triangles.len() as u32).collect();
        Self::assemble(0, vertices, triangles, origin, None)
    }

    fn assemble(
        generation: usize,
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        origin: Vec<u32>,
        lineage: Option<Arc<Lineage>>,
    ) -> Result<Mesh> {
        let nt = triangles.len();
        let mut half: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * nt);
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let [a, b] = sorted(tri[k], tri[(k + 1) % 3]);
                half.push((a, b, t, k));
            }
        }
        half.sort_unstable();

        let mut edges = Vec::with_capacity(3 * nt / 2 + 2);
        let mut edge_tris = Vec::with_capacity(3 * nt / 2 + 2);
        let mut tri_edges = vec![[NONE; 3]; nt];
        let mut i = 0;
        while i < half.len() {
            let (a, b, t, k) = half[i];
            let e = edges.len();
            edges.push([a, b]);
            tri_edges[t][k] = e;
            let mut incident = [t, NONE];
            let mut j = i + 1;
            while j < half.len() && half[j].0 == a && half[j].1 == b {
                if j - i >= 2 {
                    return Err(Error::Input(format!(
                        "edge ({a}, {b}) is shared by more than two triangles"
                    )));
                }
                incident[1] = half[j].2;
                tri_edges[half[j].2][half[j].3] = e;
                j += 1;
            }
            edge_tris.push(incident);
            i = j;
        }

        let mut vertex_boundary = vec![false; vertices.len()];
        for (e, inc) in edge_tris.iter().enumerate() {
            if inc[1] == NONE {
                vertex_boundary[edges[e][0]] = true;
                vertex_boundary[edges[e][1]] = true;
            }
        }

        Ok(Mesh {
            id: NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed),
            generation,
            vertices,
            triangles,
            origin,
            edges,
            tri_edges,
            edge_tris,
            vertex_boundary,
            lineage,
        })
    }

    /// Unique identity of this generation (not part of structural equality).
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Edge endpoints as a sorted vertex pair.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Edge ids of triangle `t`; local edge `k` joins `v_k` and `v_{k+1}`.
    /// Local edge 0 is the reference edge.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    /// Triangles incident to edge `e` (one for boundary edges).
    pub fn edge_triangles(&self, e: usize) -> (usize, Option<usize>) {
        let [a, b] = self.edge_tris[e];
        (a, (b != NONE).then_some(b))
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e][1] == NONE
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_boundary[v]
    }

    /// Index of the generation-0 triangle containing `t`.
    pub fn origin(&self, t: usize) -> usize {
        self.origin[t] as usize
    }

    /// Triangle of the previous generation that `t` was cut from (or `t`
    /// itself, if it was not refined). `None` for generation 0.
    pub fn parent(&self, t: usize) -> Option<usize> {
        self.lineage.as_ref().map(|l| l.parent_of[t] as usize)
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        dist(self.vertices[a], self.vertices[b])
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    /// Local mesh width `|T|^{1/2}`.
    pub fn h(&self, t: usize) -> f64 {
        self.area(t).sqrt()
    }

    /// `max_T diam(T) / |T|^{1/2}`.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameter(t) / self.h(t))
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.corners(t);
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let w = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * w[0] + u[1] * w[1]) / (u[0].hypot(u[1]) * w[0].hypot(w[1]));
                min = min.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        min
    }

    /// Refines every element once.
    pub fn uniform_refine(&self, mode: RefineMode) -> Mesh {
        let all: Vec<usize> = (0..self.num_triangles()).collect();
        self.refine(&all, mode).expect("all ids are valid")
    }

    /// Coarsest conforming NVB refinement in which every marked element has
    /// been split according to `mode`.
    pub fn refine(&self, marked: &[usize], mode: RefineMode) -> Result<Mesh> {
        let nt = self.num_triangles();
        let ne = self.num_edges();
        let mut is_marked = vec![false; nt];
        for &t in marked {
            if t >= nt {
                return Err(Error::Input(format!("marked triangle {t} out of range (mesh has {nt})")));
            }
            is_marked[t] = true;
        }

        // Closure: an element owning a marked edge must have its reference edge marked.
        let mut edge_marked = vec![false; ne];
        let mut queue = VecDeque::new();
        for t in (0..nt).filter(|&t| is_marked[t]) {
            for e in self.tri_edges[t] {
                if !edge_marked[e] {
                    edge_marked[e] = true;
                    queue.extend(self.edge_tris[e].iter().copied().filter(|&s| s != NONE));
                }
            }
        }
        while let Some(t) = queue.pop_front() {
            let ref_edge = self.tri_edges[t][0];
            if !edge_marked[ref_edge] {
                edge_marked[ref_edge] = true;
                queue.extend(self.edge_tris[ref_edge].iter().copied().filter(|&s| s != NONE));
            }
        }

        let mut vertices = self.vertices.clone();
        let mut edge_mid = vec![NONE; ne];
        for e in (0..ne).filter(|&e| edge_marked[e]) {
            let [a, b] = self.edges[e];
            edge_mid[e] = vertices.len();
            vertices.push(midpoint(vertices[a], vertices[b]));
        }
        let mut interior = vec![NONE; nt];
        if mode == RefineMode::Bisec5 {
            for t in (0..nt).filter(|&t| is_marked[t]) {
                let m0 = edge_mid[self.tri_edges[t][0]];
                let v2 = self.triangles[t][2];
                interior[t] = vertices.len();
                vertices.push(midpoint(vertices[m0], vertices[v2]));
            }
        }

        let mut triangles = Vec::with_capacity(nt + 3 * marked.len());
        let mut parent_of = Vec::with_capacity(triangles.capacity());
        let mut origin = Vec::with_capacity(triangles.capacity());
        for (t, &c) in interior.iter().enumerate() {
            let tri = self.triangles[t];
            let tri_edges = self.tri_edges[t];
            let m0 = edge_mid[tri_edges[0]];
            let lookup = |a: usize, b: usize| -> Option<usize> {
                for k in 0..3 {
                    let (p, q) = (tri[k], tri[(k + 1) % 3]);
                    if (p == a && q == b) || (p == b && q == a) {
                        let m = edge_mid[tri_edges[k]];
                        return (m != NONE).then_some(m);
                    }
                }
                if c != NONE && ((a == m0 && b == tri[2]) || (a == tri[2] && b == m0)) {
                    return Some(c);
                }
                None
            };
            let before = triangles.len();
            bisect(tri, &lookup, &mut triangles);
            for _ in before..triangles.len() {
                parent_of.push(t as u32);
                origin.push(self.origin[t]);
            }
        }

        let lineage = Lineage {
            parent_mesh: self.id,
            parent_of,
            up: self.lineage.clone(),
        };
        Self::assemble(self.generation + 1, vertices, triangles, origin, Some(Arc::new(lineage)))
    }

    /// For each triangle of `coarse` (an ancestor generation of `self`, or
    /// `self`), the ascending list of triangles of `self` that tile it.
    pub fn child_map(&self, coarse: &Mesh) -> Result<Vec<Vec<usize>>> {
        let ancestors = self.ancestors_in(coarse)?;
        let mut map = vec![Vec::new(); coarse.num_triangles()];
        for (t, &a) in ancestors.iter().enumerate() {
            map[a].push(t);
        }
        Ok(map)
    }

    /// For each triangle of `self`, the triangle of `coarse` containing it.
    pub fn ancestors_in(&self, coarse: &Mesh) -> Result<Vec<usize>> {
        let mut anc: Vec<usize> = (0..self.num_triangles()).collect();
        if coarse.id == self.id {
            return Ok(anc);
        }
        let mut link = self.lineage.as_ref();
        while let Some(l) = link {
            for a in anc.iter_mut() {
                *a = l.parent_of[*a] as usize;
            }
            if l.parent_mesh == coarse.id {
                return Ok(anc);
            }
            link = l.up.as_ref();
        }
        Err(Error::Lineage(format!(
            "mesh {} (generation {}) does not descend from mesh {} (generation {})",
            self.id, self.generation, coarse.id, coarse.generation
        )))
    }

    /// Serialises to the plain text format: `V E`, then `x y` per vertex, then
    /// `v0 v1 v2` per triangle (0-based, reference edge first).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.num_vertices(), self.num_triangles()).unwrap();
        for p in &self.vertices {
            writeln!(s, "{} {}", p[0], p[1]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        let counts: Vec<usize> = parse_fields(header, 2)?;
        let (nv, nt) = (counts[0], counts[1]);
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing vertex {i}")))?;
            let xy: Vec<f64> = parse_fields(line, 2)?;
            vertices.push([xy[0], xy[1]]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing triangle {i}")))?;
            let v: Vec<usize> = parse_fields(line, 3)?;
            triangles.push([v[0], v[1], v[2]]);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after last triangle".into()));
        }
        Mesh::new(vertices, triangles)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Mesh> {
        Mesh::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_fields<T: std::str::FromStr>(line: &str, n: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != n {
        return Err(Error::Parse(format!("expected {n} fields in line {line:?}")));
    }
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad number {f:?} in line {line:?}"))))
        .collect()
}

/// Recursive bisection along every edge for which `mid` returns a vertex.
fn bisect(tri: [usize; 3], mid: &impl Fn(usize, usize) -> Option<usize>, out: &mut Vec<[usize; 3]>) {
    let [v0, v1, v2] = tri;
    match mid(v0, v1) {
        Some(m) => {
            bisect([v2, v0, m], mid, out);
            bisect([v1, v2, m], mid, out);
        }
        None => out.push(tri),
    }
}

/// Rotates each triangle so that its longest edge comes first, keeping the
/// orientation. Ties go to the edge with the lexicographically smallest sorted
/// vertex pair.
pub fn longest_edge_reference(vertices: &[Point], triangles: &mut [[usize; 3]]) {
    for tri in triangles.iter_mut() {
        let key = |k: usize| {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            (dist(vertices[a], vertices[b]), sorted(a, b))
        };
        let mut best = 0;
        for k in 1..3 {
            let (lk, pk) = key(k);
            let (lb, pb) = key(best);
            if lk > lb || (lk == lb && pk < pb) {
                best = k;
            }
        }
        tri.rotate_left(best);
    }
}

/// The 12-triangle mesh of the L-shaped domain `(-1,1)^2 \ [0,1]x[-1,0]`:
/// three unit squares, each cut into four triangles through its centre.
pub fn initial_lshape() -> Mesh {
    let vertices = vec![
        [-1.0, -1.0],
        [0.0, -1.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
        [-1.0, 1.0],
        [-1.0, 0.0],
        [-0.5, -0.5],
        [-0.5, 0.5],
        [0.5, 0.5],
    ];
    let squares: [([usize; 4], usize); 3] = [([0, 1, 2, 7], 8), ([7, 2, 5, 6], 9), ([2, 3, 4, 5], 10)];
    let mut triangles = Vec::with_capacity(12);
    for (corners, centre) in squares {
        for k in 0..4 {
            triangles.push([corners[k], corners[(k + 1) % 4], centre]);
        }
    }
    longest_edge_reference(&vertices, &mut triangles);
    Mesh::new(vertices, triangles).expect("L-shape mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn unit_triangle() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[1, 2, 0]]).unwrap()
    }

    fn assert_conforming(m: &Mesh) {
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for t in m.triangles() {
            for k in 0..3 {
                *count.entry(sorted(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        assert!(count.values().all(|&c| c == 1 || c == 2));
        // no vertex lies in the interior of an edge (hanging node)
        for &[a, b] in count.keys() {
            let (pa, pb) = (m.vertex(a), m.vertex(b));
            for (v, p) in m.vertices().iter().enumerate() {
                if v == a || v == b {
                    continue;
                }
                let cross = signed_area(pa, pb, *p).abs();
                let t = ((p[0] - pa[0]) * (pb[0] - pa[0]) + (p[1] - pa[1]) * (pb[1] - pa[1]))
                    / (dist(pa, pb) * dist(pa, pb));
                assert!(!(cross < 1e-14 && t > 1e-12 && t < 1.0 - 1e-12), "hanging node {v} on ({a},{b})");
            }
        }
    }

    #[test]
    fn lshape_counts_and_area() {
        let m = initial_lshape();
        assert_eq!(m.num_triangles(), 12);
        assert_eq!(m.num_vertices(), 11);
        assert!((m.total_area() - 3.0).abs() < 1e-14);
        assert_conforming(&m);
        let corner = m.vertices().iter().position(|p| *p == [0.0, 0.0]).unwrap();
        assert!(m.is_boundary_vertex(corner));
        // the reference edge of each initial triangle is a square side
        for t in 0..12 {
            let e = m.triangle_edges(t)[0];
            assert_eq!(m.edge_length(e), 1.0);
        }
    }

    #[test]
    fn empty_marking_keeps_mesh() {
        let m = initial_lshape();
        let r = m.refine(&[], RefineMode::Bisec3).unwrap();
        assert_eq!(r.triangles(), m.triangles());
        assert_eq!(r.vertices(), m.vertices());
    }

    #[test]
    fn uniform_counts() {
        let m = initial_lshape();
        let r3 = m.uniform_refine(RefineMode::Bisec3);
        assert_eq!(r3.num_triangles(), 48);
        assert_conforming(&r3);
        let r5 = m.uniform_refine(RefineMode::Bisec5);
        assert_eq!(r5.num_triangles(), 72);
        assert_conforming(&r5);
        for kids in r5.child_map(&m).unwrap() {
            assert_eq!(kids.len(), 6);
        }
    }

    #[test]
    fn out_of_range_mark_is_rejected() {
        let m = initial_lshape();
        assert!(matches!(m.refine(&[12], RefineMode::Bisec3), Err(Error::Input(_))));
    }

    #[test]
    fn child_map_identity_and_lineage_errors() {
        let m = initial_lshape();
        let map = m.child_map(&m).unwrap();
        assert!(map.iter().enumerate().all(|(i, c)| c == &vec![i]));
        let other = initial_lshape();
        let fine = m.uniform_refine(RefineMode::Bisec3);
        assert!(matches!(fine.child_map(&other), Err(Error::Lineage(_))));
        assert!(matches!(m.child_map(&fine), Err(Error::Lineage(_))));
    }

    #[test]
    fn child_map_across_generations_tiles_parents() {
        let m = initial_lshape();
        let a = m.refine(&[0, 5], RefineMode::Bisec5).unwrap();
        let b = a.refine(&[1, 2, 3], RefineMode::Bisec3).unwrap();
        let map = b.child_map(&m).unwrap();
        for (t, kids) in map.iter().enumerate() {
            let s: f64 = kids.iter().map(|&k| b.area(k)).sum();
            assert!((s - m.area(t)).abs() <= 1e-12 * m.area(t));
        }
    }

    #[test]
    fn shape_regularity_examples() {
        let m = unit_triangle();
        assert!((m.shape_regularity() - 2.0).abs() < 1e-14);
        let s3 = 3f64.sqrt();
        let eq = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]], vec![[0, 1, 2]]).unwrap();
        let expected = 1.0 / (s3 / 4.0).sqrt();
        assert!((eq.shape_regularity() - expected).abs() < 1e-12);
        assert!((expected - 1.5197).abs() < 1e-4);
    }

    #[test]
    fn text_roundtrip() {
        let m = initial_lshape().refine(&[3], RefineMode::Bisec5).unwrap();
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(Mesh::from_text("").is_err());
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n0 1\n").is_err());
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n0 2 1\n").is_err()); // clockwise
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n0 1 5\n").is_err());
    }
}
