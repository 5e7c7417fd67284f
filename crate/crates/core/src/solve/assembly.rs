//! Stiffness/load assembly, Dirichlet elimination, solution and energy norms.

use std::sync::Arc;

use super::coefficient::{CoefficientField, Sym2};
use super::sparse::{dense_solve, pcg, CsrMatrix};
use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::space::basis::{local_dofs, shape_gradients, shape_values, TriangleGeometry};
use crate::space::{quadrature, FeSpace};

/// Relative residual at which CG stops.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
/// Systems up to this size fall back to a dense factorisation if CG fails.
pub const DENSE_FALLBACK_LIMIT: usize = 2000;

/// A linear system `K x = b` on a finite element space.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub space: Arc<FeSpace>,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Constrained dofs with their prescribed values. Their rows and columns
    /// in `matrix` have been replaced by unit vectors.
    pub constraints: Vec<(usize, f64)>,
}

/// Coefficients of a discrete function together with its space.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    pub space: Arc<FeSpace>,
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Element stiffness matrix `int_T A grad phi_j . grad phi_i`.
pub fn element_stiffness(p: usize, g: &TriangleGeometry, a: &Sym2) -> [[f64; 6]; 6] {
    let n = local_dofs(p);
    let mut k = [[0.0; 6]; 6];
    let rule = quadrature(2 * (p - 1));
    for (l, w) in rule.iter() {
        let d = shape_gradients(p, g, l);
        let wa = w * g.area;
        for i in 0..n {
            let ad = a.apply(d[i]);
            for j in 0..n {
                k[i][j] += wa * (ad[0] * d[j][0] + ad[1] * d[j][1]);
            }
        }
    }
    k
}

/// Quadrature order used for every integral involving the source term.
pub fn source_order(p: usize) -> usize {
    2 * p + 4
}

fn sparsity(space: &FeSpace) -> CsrMatrix {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); space.ndofs()];
    for t in 0..space.mesh().num_triangles() {
        let dofs = space.element_dofs(t);
        for &i in dofs {
            rows[i].extend_from_slice(dofs);
        }
    }
    CsrMatrix::from_pattern(rows)
}

/// Stiffness matrix and load vector without boundary conditions.
pub fn assemble(space: &Arc<FeSpace>, a: &CoefficientField, f: &dyn Fn(Point) -> f64) -> Result<SparseSystem> {
    let mesh = space.mesh();
    a.check(mesh)?;
    let p = space.degree();
    let n = local_dofs(p);
    let mut matrix = sparsity(space);
    let mut rhs = vec![0.0; space.ndofs()];
    let rule = quadrature(source_order(p));
    let shapes: Vec<[f64; 6]> = rule.points.iter().map(|l| shape_values(p, l)).collect();
    for t in 0..mesh.num_triangles() {
        let g = space.geometry(t);
        let k = element_stiffness(p, &g, &a.on(mesh, t));
        let dofs = space.element_dofs(t);
        for i in 0..n {
            for j in 0..n {
                matrix.add(dofs[i], dofs[j], k[i][j]);
            }
        }
        for ((l, w), phi) in rule.iter().zip(&shapes) {
            let fw = f(g.point(l)) * w * g.area;
            if fw != 0.0 {
                for i in 0..n {
                    rhs[dofs[i]] += fw * phi[i];
                }
            }
        }
    }
    Ok(SparseSystem { space: space.clone(), matrix, rhs, constraints: Vec::new() })
}

/// Fixes every boundary dof to `g` at its Lagrange node (nodal interpolation of
/// the Dirichlet data) and eliminates it symmetrically.
pub fn apply_dirichlet(mut system: SparseSystem, g: &dyn Fn(Point) -> f64) -> SparseSystem {
    let space = system.space.clone();
    let n = space.ndofs();
    let mut value = vec![None; n];
    for d in space.boundary_dofs() {
        value[d] = Some(g(space.node(d)));
    }
    for i in 0..n {
        if value[i].is_some() {
            continue;
        }
        let (cols, vals) = system.matrix.row(i);
        let shift: f64 = cols.iter().zip(vals).filter_map(|(&j, &v)| value[j as usize].map(|gj| v * gj)).sum();
        system.rhs[i] -= shift;
    }
    let constrained: Vec<(usize, f64)> = value.iter().enumerate().filter_map(|(d, v)| v.map(|v| (d, v))).collect();
    let is_constrained: Vec<bool> = value.iter().map(Option::is_some).collect();
    for &(d, v) in &constrained {
        system.matrix.set_identity_row(d);
        system.rhs[d] = v;
    }
    // zero the constrained columns of free rows
    for i in 0..n {
        if is_constrained[i] {
            continue;
        }
        let cols: Vec<usize> =
            system.matrix.row(i).0.iter().map(|&j| j as usize).filter(|&j| is_constrained[j]).collect();
        for j in cols {
            let v = system.matrix.get(i, j);
            system.matrix.add(i, j, -v);
        }
    }
    system.constraints = constrained;
    system
}

/// Solves the system by Jacobi-preconditioned CG (relative residual
/// [`SOLVER_TOLERANCE`], at most `20 sqrt(n)` iterations), falling back to a
/// dense Cholesky factorisation for small systems.
pub fn solve_system(system: &SparseSystem) -> Result<DiscreteSolution> {
    solve_system_from(system, None)
}

/// As [`solve_system`], starting CG from `initial` (constrained entries are
/// overwritten with their prescribed values).
pub fn solve_system_from(system: &SparseSystem, initial: Option<&[f64]>) -> Result<DiscreteSolution> {
    let n = system.matrix.dim();
    if system.rhs.len() != n {
        return Err(Error::Input("right-hand side length does not match the matrix".into()));
    }
    let mut x0 = initial.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if x0.len() != n {
        return Err(Error::Input("initial guess length does not match the matrix".into()));
    }
    for &(d, v) in &system.constraints {
        x0[d] = v;
    }
    let max_iter = (20.0 * (n as f64).sqrt()).ceil() as usize;
    match pcg(&system.matrix, &system.rhs, Some(&x0), SOLVER_TOLERANCE, max_iter) {
        Ok(r) => Ok(DiscreteSolution {
            space: system.space.clone(),
            coeffs: r.x,
            iterations: r.iterations,
            relative_residual: r.relative_residual,
        }),
        Err(e) if n <= DENSE_FALLBACK_LIMIT => {
            let x = dense_solve(&system.matrix, &system.rhs).map_err(|_| e)?;
            Ok(DiscreteSolution { space: system.space.clone(), coeffs: x, iterations: 0, relative_residual: 0.0 })
        }
        Err(e) => Err(e),
    }
}

/// Assembles and solves `-div(A grad u) = f`, `u = g` on the boundary.
pub fn solve_problem(
    space: &Arc<FeSpace>,
    a: &CoefficientField,
    f: &dyn Fn(Point) -> f64,
    g: &dyn Fn(Point) -> f64,
    initial: Option<&[f64]>,
) -> Result<DiscreteSolution> {
    let system = apply_dirichlet(assemble(space, a, f)?, g);
    solve_system_from(&system, initial)
}

/// `a(u, v) = int A grad u . grad v`, integrated elementwise.
pub fn energy_inner(space: &FeSpace, a: &CoefficientField, u: &[f64], v: &[f64]) -> f64 {
    let mesh = space.mesh();
    let p = space.degree();
    let rule = quadrature(2 * (p - 1));
    let mut sum = 0.0;
    for t in 0..mesh.num_triangles() {
        let g = space.geometry(t);
        let at = a.on(mesh, t);
        let (cu, cv) = (space.gather(t, u), space.gather(t, v));
        for (l, w) in rule.iter() {
            let d = shape_gradients(p, &g, l);
            let mut gu = [0.0; 2];
            let mut gv = [0.0; 2];
            for k in 0..local_dofs(p) {
                gu = [gu[0] + cu[k] * d[k][0], gu[1] + cu[k] * d[k][1]];
                gv = [gv[0] + cv[k] * d[k][0], gv[1] + cv[k] * d[k][1]];
            }
            sum += w * g.area * at.inner(gu, gv);
        }
    }
    sum
}

/// `||A^{1/2} grad v||` over the whole domain.
pub fn energy_norm(space: &FeSpace, coeffs: &[f64], a: &CoefficientField) -> f64 {
    energy_inner(space, a, coeffs, coeffs).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_lshape, Mesh, RefineMode};

    fn space(p: usize, refinements: usize) -> Arc<FeSpace> {
        let mut m = initial_lshape();
        for _ in 0..refinements {
            m = m.uniform_refine(RefineMode::Bisec3);
        }
        Arc::new(FeSpace::new(Arc::new(m), p).unwrap())
    }

    #[test]
    fn unit_triangle_stiffness() {
        let g = TriangleGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let k = element_stiffness(1, &g, &Sym2::IDENTITY);
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn row_sums_vanish_and_zero_load() {
        for p in 1..=2 {
            let s = space(p, 1);
            let sys = assemble(&s, &CoefficientField::Identity, &|_| 0.0).unwrap();
            assert!(sys.rhs.iter().all(|&v| v == 0.0));
            for i in 0..s.ndofs() {
                let sum: f64 = sys.matrix.row(i).1.iter().sum();
                assert!(sum.abs() < 1e-12);
            }
            assert!(sys.matrix.asymmetry() < 1e-12);
        }
    }

    #[test]
    fn affine_solution_is_reproduced() {
        let s = space(1, 2);
        let u = |x: Point| 0.3 + 2.0 * x[0] - x[1];
        let sol = solve_problem(&s, &CoefficientField::Identity, &|_| 0.0, &u, None).unwrap();
        for d in 0..s.ndofs() {
            assert!((sol.coeffs[d] - u(s.node(d))).abs() < 1e-9);
        }
    }

    #[test]
    fn quadratic_solution_is_reproduced_in_p2() {
        let s = space(2, 1);
        let u = |x: Point| x[0] * x[0] + 0.5 * x[0] * x[1] - 2.0 * x[1] * x[1] + x[1];
        // -Laplace u = -(2 - 4) = 2
        let sol = solve_problem(&s, &CoefficientField::Identity, &|_| 2.0, &u, None).unwrap();
        for d in 0..s.ndofs() {
            assert!((sol.coeffs[d] - u(s.node(d))).abs() < 1e-8);
        }
    }

    #[test]
    fn constrained_values_hold_and_solver_is_deterministic() {
        let s = space(2, 1);
        let g = |x: Point| x[0].sin() + x[1];
        let sys = apply_dirichlet(assemble(&s, &CoefficientField::Identity, &|_| 1.0).unwrap(), &g);
        let a = solve_system(&sys).unwrap();
        let b = solve_system(&sys).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        for &(d, v) in &sys.constraints {
            assert_eq!(a.coeffs[d], v);
            assert_eq!(v, g(s.node(d)));
        }
        assert!(sys.matrix.asymmetry() < 1e-14);
    }

    #[test]
    fn energy_norm_matches_quadratic_form() {
        let coef = CoefficientField::piecewise(&[[[2.0, 0.3], [0.3, 1.0]]; 12]).unwrap();
        for p in 1..=2 {
            let s = space(p, 1);
            let raw = assemble(&s, &coef, &|_| 0.0).unwrap();
            let v: Vec<f64> = (0..s.ndofs()).map(|i| ((i * 7) % 11) as f64 / 11.0 - 0.4).collect();
            let e = energy_norm(&s, &v, &coef);
            let q = raw.matrix.quadratic_form(&v, &v).sqrt();
            assert!((e - q).abs() < 1e-10 * q);
            assert_eq!(energy_norm(&s, &vec![0.0; s.ndofs()], &coef), 0.0);
            assert!(energy_norm(&s, &vec![3.0; s.ndofs()], &coef) < 1e-12);
        }
    }

    #[test]
    fn hat_function_energy() {
        // unit square split by its diagonals: the centre hat has |grad|^2 = 4
        // on each of the four triangles of area 1/4
        let m = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
            vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
        )
        .unwrap();
        let s = FeSpace::new(Arc::new(m), 1).unwrap();
        let mut hat = vec![0.0; 5];
        hat[4] = 1.0;
        let e = energy_norm(&s, &hat, &CoefficientField::Identity);
        assert!((e - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dense_and_iterative_agree() {
        let s = space(1, 1);
        let sys = apply_dirichlet(assemble(&s, &CoefficientField::Identity, &|_| 1.0).unwrap(), &|_| 0.0);
        let it = solve_system(&sys).unwrap();
        let d = dense_solve(&sys.matrix, &sys.rhs).unwrap();
        for (a, b) in it.coeffs.iter().zip(&d) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn coefficient_must_cover_mesh() {
        let s = space(1, 0);
        let short = CoefficientField::piecewise(&[[[1.0, 0.0], [0.0, 1.0]]; 3]).unwrap();
        assert!(assemble(&s, &short, &|_| 0.0).is_err());
    }
}
