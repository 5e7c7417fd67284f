//! Lagrange finite element spaces of degree 1 and 2 on a [`Mesh`].
//!
//! P1 degrees of freedom are the mesh vertices. P2 adds one per edge, numbered
//! `num_vertices + edge_id`. A dof is a boundary dof when its Lagrange node lies
//! on the domain boundary.

pub mod basis;
pub mod projection;
pub mod quadrature;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use basis::{local_dofs, TriangleGeometry};
pub use projection::{ElementPoly, L2Projector};
pub use quadrature::{quadrature, QuadratureRule};

/// Tolerance for deciding that a point lies in a triangle (barycentric units).
const INSIDE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    degree: usize,
    ndofs: usize,
    elem_dofs: Vec<[usize; 6]>,
    boundary: Vec<bool>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<FeSpace> {
        if !(1..=2).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let nv = mesh.num_vertices();
        let nt = mesh.num_triangles();
        let mut elem_dofs = Vec::with_capacity(nt);
        for t in 0..nt {
            let v = mesh.triangle(t);
            let mut d = [0usize; 6];
            d[..3].copy_from_slice(&v);
            if degree == 2 {
                for (k, e) in mesh.triangle_edges(t).iter().enumerate() {
                    d[3 + k] = nv + e;
                }
            }
            elem_dofs.push(d);
        }
        let ndofs = if degree == 1 { nv } else { nv + mesh.num_edges() };
        let mut boundary: Vec<bool> = (0..nv).map(|v| mesh.is_boundary_vertex(v)).collect();
        if degree == 2 {
            boundary.extend((0..mesh.num_edges()).map(|e| mesh.is_boundary_edge(e)));
        }
        Ok(FeSpace { mesh, degree, ndofs, elem_dofs, boundary })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ndofs(&self) -> usize {
        self.ndofs
    }

    pub fn local_dofs(&self) -> usize {
        local_dofs(self.degree)
    }

    /// Global dof ids of element `t` in local shape-function order.
    pub fn element_dofs(&self, t: usize) -> &[usize] {
        &self.elem_dofs[t][..self.local_dofs()]
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ndofs).filter(|&d| self.boundary[d])
    }

    /// Coordinates of the Lagrange node of `dof`.
    pub fn node(&self, dof: usize) -> Point {
        let nv = self.mesh.num_vertices();
        if dof < nv {
            self.mesh.vertex(dof)
        } else {
            let [a, b] = self.mesh.edge(dof - nv);
            let (pa, pb) = (self.mesh.vertex(a), self.mesh.vertex(b));
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
        }
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        TriangleGeometry::new(self.mesh.corners(t))
    }

    /// Local coefficient vector of a global function on element `t`.
    pub fn gather(&self, t: usize, coeffs: &[f64]) -> [f64; 6] {
        let mut c = [0.0; 6];
        for (k, &d) in self.element_dofs(t).iter().enumerate() {
            c[k] = coeffs[d];
        }
        c
    }

    /// Nodal interpolant of a pointwise function.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        (0..self.ndofs).map(|d| f(self.node(d))).collect()
    }

    /// Evaluates a discrete function at point `x` known to lie in one of the
    /// `candidates` elements.
    pub fn eval_in(&self, candidates: &[usize], coeffs: &[f64], x: Point) -> Option<f64> {
        let (t, l) = self.locate(candidates, x)?;
        Some(basis::eval(self.degree, &self.gather(t, coeffs), &l))
    }

    /// The candidate element containing `x` (the one with the largest minimal
    /// barycentric coordinate), with the barycentric coordinates of `x` in it.
    pub fn locate(&self, candidates: &[usize], x: Point) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in candidates {
            let l = self.geometry(t).barycentric(x);
            let m = l[0].min(l[1]).min(l[2]);
            if best.is_none_or(|b| m > b.2) {
                best = Some((t, l, m));
            }
        }
        best.filter(|b| b.2 >= -INSIDE_TOL).map(|(t, l, _)| (t, l))
    }
}

/// Nodal interpolation `I` onto `coarse` of a function of `fine`, where the
/// mesh of `fine` is a refinement of the mesh of `coarse`.
pub fn nodal_interpolate(coarse: &FeSpace, fine: &FeSpace, fine_coeffs: &[f64]) -> Result<Vec<f64>> {
    check_len(fine, fine_coeffs)?;
    let children = fine.mesh().child_map(coarse.mesh())?;
    let mut out = vec![f64::NAN; coarse.ndofs()];
    for (t, kids) in children.iter().enumerate() {
        for &d in coarse.element_dofs(t) {
            if out[d].is_nan() {
                out[d] = fine
                    .eval_in(kids, fine_coeffs, coarse.node(d))
                    .ok_or_else(|| Error::Lineage("coarse node not covered by its descendants".into()))?;
            }
        }
    }
    Ok(out)
}

/// Exact representation of a coarse function in the finer space
/// (`fine` must refine `coarse` and have the same degree).
pub fn prolongate(coarse: &FeSpace, fine: &FeSpace, coarse_coeffs: &[f64]) -> Result<Vec<f64>> {
    check_len(coarse, coarse_coeffs)?;
    if coarse.degree() != fine.degree() {
        return Err(Error::Input("prolongation between spaces of different degree".into()));
    }
    let ancestors = fine.mesh().ancestors_in(coarse.mesh())?;
    let mut out = vec![0.0; fine.ndofs()];
    let mut done = vec![false; fine.ndofs()];
    for (t, &parent) in ancestors.iter().enumerate() {
        let g = coarse.geometry(parent);
        let c = coarse.gather(parent, coarse_coeffs);
        for &d in fine.element_dofs(t) {
            if !done[d] {
                out[d] = basis::eval(coarse.degree(), &c, &g.barycentric(fine.node(d)));
                done[d] = true;
            }
        }
    }
    Ok(out)
}

fn check_len(space: &FeSpace, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != space.ndofs() {
        return Err(Error::Input(format!(
            "coefficient vector has length {} but the space has {} dofs",
            coeffs.len(),
            space.ndofs()
        )));
    }
    Ok(())
}

/// Componentwise L2 projection of the gradient of a fine function onto
/// `P^degree(T)` for coarse element `T`, given the fine children of `T`.
pub fn project_gradient(
    coarse_element: &TriangleGeometry,
    fine: &FeSpace,
    children: &[usize],
    fine_coeffs: &[f64],
    degree: usize,
) -> [ElementPoly; 2] {
    let projector = L2Projector::new(coarse_element, degree);
    let rule = quadrature((fine.degree() - 1 + degree).max(1));
    let pieces: Vec<TriangleGeometry> = children.iter().map(|&t| fine.geometry(t)).collect();
    let locals: Vec<[f64; 6]> = children.iter().map(|&t| fine.gather(t, fine_coeffs)).collect();
    let grad = |k: usize, q: usize| basis::eval_grad(fine.degree(), &pieces[k], &locals[k], &rule.points[q]);
    let gx = projector.project_pieces(&pieces, &rule, |k, q, _| grad(k, q)[0]);
    let gy = projector.project_pieces(&pieces, &rule, |k, q, _| grad(k, q)[1]);
    [gx, gy]
}

/// L2 projection of a pointwise scalar function onto `P^degree(T)`, integrated
/// with a rule of order `order`.
pub fn project_scalar(element: &TriangleGeometry, f: impl Fn(Point) -> f64, degree: usize, order: usize) -> ElementPoly {
    L2Projector::new(element, degree).project(element, &quadrature(order), f)
}
