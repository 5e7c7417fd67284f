//! Elementwise L2-orthogonal projections onto polynomials of degree <= 2.
//!
//! Polynomials on an element `T` are written in scaled monomials
//! `xi^a eta^b` with `xi = (x - x_c)/h`, `eta = (y - y_c)/h`, where `x_c` is the
//! centroid and `h` the diameter of `T`.

use super::basis::TriangleGeometry;
use super::quadrature::{quadrature, QuadratureRule};
use crate::mesh::Point;

const EXPONENTS: [(i32, i32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Number of monomials of total degree <= `d`.
pub fn poly_dim(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// A polynomial on one element.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementPoly {
    pub center: Point,
    pub scale: f64,
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl ElementPoly {
    fn monomials(center: Point, scale: f64, degree: usize, x: Point) -> [f64; 6] {
        let xi = (x[0] - center[0]) / scale;
        let eta = (x[1] - center[1]) / scale;
        let mut m = [0.0; 6];
        for (k, &(a, b)) in EXPONENTS.iter().enumerate().take(poly_dim(degree)) {
            m[k] = xi.powi(a) * eta.powi(b);
        }
        m
    }

    pub fn eval(&self, x: Point) -> f64 {
        let m = Self::monomials(self.center, self.scale, self.degree, x);
        self.coeffs.iter().zip(m.iter()).map(|(c, m)| c * m).sum()
    }
}

/// L2 projection onto `P^degree(T)` for one element `T`, with the Gram matrix
/// factorised once.
#[derive(Clone, Debug)]
pub struct L2Projector {
    center: Point,
    scale: f64,
    degree: usize,
    /// Lower Cholesky factor of the Gram matrix, row-major `n x n`.
    chol: [f64; 36],
}

impl L2Projector {
    pub fn new(element: &TriangleGeometry, degree: usize) -> Self {
        assert!(degree <= 2, "projection degree {degree} not supported");
        let center = element.centroid();
        let scale = element.diameter();
        let n = poly_dim(degree);
        let rule = quadrature(2 * degree);
        let mut gram = [0.0; 36];
        for (l, w) in rule.iter() {
            let m = ElementPoly::monomials(center, scale, degree, element.point(l));
            for i in 0..n {
                for j in 0..n {
                    gram[i * 6 + j] += w * element.area * m[i] * m[j];
                }
            }
        }
        // Cholesky in place (n <= 6)
        let mut chol = [0.0; 36];
        for i in 0..n {
            for j in 0..=i {
                let mut s = gram[i * 6 + j];
                for k in 0..j {
                    s -= chol[i * 6 + k] * chol[j * 6 + k];
                }
                chol[i * 6 + j] = if i == j { s.sqrt() } else { s / chol[j * 6 + j] };
            }
        }
        L2Projector { center, scale, degree, chol }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Projects a function given piecewise on sub-triangles that tile `T`.
    /// `f(piece, q, x)` is evaluated at quadrature point `q` of `pieces[piece]`
    /// (global coordinates `x`); `rule` must integrate `f * q` exactly enough.
    pub fn project_pieces<F>(&self, pieces: &[TriangleGeometry], rule: &QuadratureRule, mut f: F) -> ElementPoly
    where
        F: FnMut(usize, usize, Point) -> f64,
    {
        let n = poly_dim(self.degree);
        let mut rhs = [0.0; 6];
        for (k, piece) in pieces.iter().enumerate() {
            for (q, (l, w)) in rule.iter().enumerate() {
                let x = piece.point(l);
                let v = f(k, q, x) * w * piece.area;
                let m = ElementPoly::monomials(self.center, self.scale, self.degree, x);
                for i in 0..n {
                    rhs[i] += v * m[i];
                }
            }
        }
        let coeffs = self.solve(&rhs[..n]);
        ElementPoly { center: self.center, scale: self.scale, degree: self.degree, coeffs }
    }

    /// Projects a pointwise function over `T` itself.
    pub fn project(&self, element: &TriangleGeometry, rule: &QuadratureRule, f: impl Fn(Point) -> f64) -> ElementPoly {
        self.project_pieces(std::slice::from_ref(element), rule, |_, _, x| f(x))
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let c = &self.chol;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= c[i * 6 + k] * y[k];
            }
            y[i] = s / c[i * 6 + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= c[k * 6 + i] * y[k];
            }
            y[i] = s / c[i * 6 + i];
        }
        y
    }
}

/// `||(1 - pi) f||_T^2` for the projection onto `P^degree(T)`, both the
/// projection and the residual integrated with `rule`.
pub fn projection_residual_sq(
    element: &TriangleGeometry,
    degree: usize,
    rule: &QuadratureRule,
    f: impl Fn(Point) -> f64,
) -> f64 {
    let proj = L2Projector::new(element, degree);
    let values: Vec<(Point, f64)> = rule
        .points
        .iter()
        .map(|l| {
            let x = element.point(l);
            (x, f(x))
        })
        .collect();
    let poly = proj.project_pieces(std::slice::from_ref(element), rule, |_, q, _| values[q].1);
    values
        .iter()
        .zip(rule.weights.iter())
        .map(|((x, v), w)| {
            let r = v - poly.eval(*x);
            w * r * r
        })
        .sum::<f64>()
        * element.area
}
