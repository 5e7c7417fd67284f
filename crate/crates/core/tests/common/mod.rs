//! Geometric mesh checks shared by the integration tests. They recompute
//! everything from raw coordinates and triangle lists instead of trusting the
//! mesh's own edge tables.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use afem::mesh::{Mesh, Point, RefineMode};

pub fn l_shape_boundary(p: Point) -> bool {
    let (x, y) = (p[0], p[1]);
    let on = |v: f64, c: f64| (v - c).abs() < 1e-14;
    ((on(x, -1.0) || on(x, 1.0)) && (-1.0..=1.0).contains(&y) && (x < 0.0 || y >= 0.0))
        || (on(y, 1.0) && (-1.0..=1.0).contains(&x))
        || (on(y, -1.0) && (-1.0..=0.0).contains(&x))
        || (on(x, 0.0) && (-1.0..=0.0).contains(&y))
        || (on(y, 0.0) && (0.0..=1.0).contains(&x))
}

pub fn signed_area(c: [Point; 3]) -> f64 {
    0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[1][1] - c[0][1]) * (c[2][0] - c[0][0]))
}

/// Every edge is shared by one or two triangles, edges with one triangle lie
/// on `boundary`, all triangles are counterclockwise.
pub fn check_conformity(mesh: &Mesh, boundary: impl Fn(Point) -> bool) -> Result<(), String> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if signed_area(mesh.corners(t)) <= 0.0 {
            return Err(format!("triangle {t} is not counterclockwise"));
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    for (&(a, b), &c) in &count {
        let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        match c {
            2 => {}
            1 if boundary(mid) && boundary(pa) && boundary(pb) => {}
            1 => return Err(format!("edge ({a},{b}) has one triangle but is not on the boundary (hanging node)")),
            _ => return Err(format!("edge ({a},{b}) shared by {c} triangles")),
        }
    }
    Ok(())
}

fn key(p: Point) -> (u64, u64) {
    (p[0].to_bits(), p[1].to_bits())
}

fn tri_key(c: [Point; 3]) -> Vec<(u64, u64)> {
    let mut k: Vec<_> = c.iter().map(|&p| key(p)).collect();
    k.sort_unstable();
    k
}

fn barycentric(c: [Point; 3], p: Point) -> [f64; 3] {
    let area = signed_area(c);
    let l1 = signed_area([c[0], p, c[2]]) / area;
    let l2 = signed_area([c[0], c[1], p]) / area;
    [1.0 - l1 - l2, l1, l2]
}

#[derive(Default, Debug, Clone)]
pub struct RefinementStats {
    pub marked: usize,
    pub max_sons_marked: usize,
    pub max_sons_unmarked: usize,
}

/// Checks one refinement step `coarse -> fine` in which `marked` were the
/// marked elements:
///
/// * nestedness: children tile their parent (areas, vertex containment),
/// * every marked element has exactly `mode.sons()` children whose geometry
///   equals the refinement of that element alone (neighbour independence),
/// * the midpoint of every edge of a marked element is a vertex of the fine
///   mesh, and with five bisections some new vertex lies strictly inside it.
pub fn check_refinement_step(coarse: &Mesh, fine: &Mesh, marked: &[usize], mode: RefineMode) -> Result<RefinementStats, String> {
    let children = fine.child_map(coarse).map_err(|e| e.to_string())?;
    let marked_set: HashSet<usize> = marked.iter().copied().collect();
    let mut stats = RefinementStats { marked: marked.len(), ..Default::default() };
    for (t, kids) in children.iter().enumerate() {
        let c = coarse.corners(t);
        let area = coarse.area(t);
        let sum: f64 = kids.iter().map(|&k| fine.area(k)).sum();
        if (sum - area).abs() > 1e-12 * area {
            return Err(format!("children of {t} cover area {sum}, parent has {area}"));
        }
        for &k in kids {
            for p in fine.corners(k) {
                if barycentric(c, p).iter().any(|&l| l < -1e-12) {
                    return Err(format!("child {k} of {t} leaves its parent"));
                }
            }
        }
        if marked_set.contains(&t) {
            stats.max_sons_marked = stats.max_sons_marked.max(kids.len());
            if kids.len() != mode.sons() {
                return Err(format!("marked element {t} has {} sons", kids.len()));
            }
            let alone = Mesh::new(c.to_vec(), vec![[0, 1, 2]]).map_err(|e| e.to_string())?.uniform_refine(mode);
            let mut expect: Vec<_> = (0..alone.num_triangles()).map(|k| tri_key(alone.corners(k))).collect();
            let mut got: Vec<_> = kids.iter().map(|&k| tri_key(fine.corners(k))).collect();
            expect.sort();
            got.sort();
            if expect != got {
                return Err(format!("refinement of marked element {t} depends on its neighbours"));
            }
            let fine_vertices: HashSet<(u64, u64)> =
                kids.iter().flat_map(|&k| fine.corners(k)).map(key).collect();
            for e in 0..3 {
                let (a, b) = (c[e], c[(e + 1) % 3]);
                let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                if !fine_vertices.contains(&key(mid)) {
                    return Err(format!("edge {e} of marked element {t} has no interior node"));
                }
            }
            if mode == RefineMode::Bisec5 {
                let inside = kids
                    .iter()
                    .flat_map(|&k| fine.corners(k))
                    .any(|p| barycentric(c, p).iter().all(|&l| l > 1e-12));
                if !inside {
                    return Err(format!("marked element {t} has no interior node"));
                }
            }
        } else {
            stats.max_sons_unmarked = stats.max_sons_unmarked.max(kids.len());
            if kids.len() > 4 {
                return Err(format!("closure split element {t} into {} sons", kids.len()));
            }
        }
    }
    Ok(stats)
}
