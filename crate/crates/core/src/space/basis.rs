//! Affine triangle geometry and the P1/P2 Lagrange shape functions.
//!
//! Local numbering: vertex functions 0..3, then (P2) edge functions 3..6 where
//! local edge `k` joins vertices `k` and `k+1 mod 3`.

use crate::mesh::Point;

pub type Vec2 = [f64; 2];

/// Geometry of one (affine) triangle.
#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub corners: [Point; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_bary: [Vec2; 3],
}

impl TriangleGeometry {
    pub fn new(corners: [Point; 3]) -> Self {
        let [a, b, c] = corners;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let grad = |p: Point, q: Point| [(p[1] - q[1]) / det, (q[0] - p[0]) / det];
        TriangleGeometry {
            corners,
            area: 0.5 * det,
            grad_bary: [grad(b, c), grad(c, a), grad(a, b)],
        }
    }

    pub fn point(&self, l: &[f64; 3]) -> Point {
        let [a, b, c] = self.corners;
        [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ]
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let a = self.corners[0];
        let d = [p[0] - a[0], p[1] - a[1]];
        let l1 = self.grad_bary[1][0] * d[0] + self.grad_bary[1][1] * d[1];
        let l2 = self.grad_bary[2][0] * d[0] + self.grad_bary[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn centroid(&self) -> Point {
        self.point(&[1.0 / 3.0; 3])
    }

    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.corners;
        let d = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
        d(a, b).max(d(b, c)).max(d(c, a))
    }
}

/// Number of local shape functions for degree `p`.
pub fn local_dofs(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

/// Barycentric coordinates of the local Lagrange nodes.
pub fn lagrange_nodes(p: usize) -> &'static [[f64; 3]] {
    const P1: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    const P2: [[f64; 3]; 6] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ];
    if p == 1 {
        &P1
    } else {
        &P2
    }
}

/// Shape function values at barycentric point `l` (first `local_dofs(p)` entries).
pub fn shape_values(p: usize, l: &[f64; 3]) -> [f64; 6] {
    let mut v = [0.0; 6];
    if p == 1 {
        v[..3].copy_from_slice(l);
    } else {
        for i in 0..3 {
            v[i] = l[i] * (2.0 * l[i] - 1.0);
            v[3 + i] = 4.0 * l[i] * l[(i + 1) % 3];
        }
    }
    v
}

/// Shape function gradients at barycentric point `l`.
pub fn shape_gradients(p: usize, g: &TriangleGeometry, l: &[f64; 3]) -> [Vec2; 6] {
    let gb = &g.grad_bary;
    let mut d = [[0.0; 2]; 6];
    if p == 1 {
        d[..3].copy_from_slice(gb);
    } else {
        for i in 0..3 {
            let j = (i + 1) % 3;
            let s = 4.0 * l[i] - 1.0;
            d[i] = [s * gb[i][0], s * gb[i][1]];
            d[3 + i] = [
                4.0 * (l[i] * gb[j][0] + l[j] * gb[i][0]),
                4.0 * (l[i] * gb[j][1] + l[j] * gb[i][1]),
            ];
        }
    }
    d
}

/// Constant Hessians of the shape functions, as `[dxx, dxy, dyy]`
/// (zero for P1).
pub fn shape_hessians(p: usize, g: &TriangleGeometry) -> [[f64; 3]; 6] {
    let mut h = [[0.0; 3]; 6];
    if p == 2 {
        let gb = &g.grad_bary;
        let sym = |a: Vec2, b: Vec2| [a[0] * b[0], 0.5 * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1]];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let s = sym(gb[i], gb[i]);
            h[i] = [4.0 * s[0], 4.0 * s[1], 4.0 * s[2]];
            let m = sym(gb[i], gb[j]);
            h[3 + i] = [8.0 * m[0], 8.0 * m[1], 8.0 * m[2]];
        }
    }
    h
}

/// Value of `sum_i c_i phi_i` at `l`.
pub fn eval(p: usize, coeffs: &[f64], l: &[f64; 3]) -> f64 {
    let v = shape_values(p, l);
    coeffs.iter().zip(v.iter()).map(|(c, v)| c * v).sum()
}

/// Gradient of `sum_i c_i phi_i` at `l`.
pub fn eval_grad(p: usize, g: &TriangleGeometry, coeffs: &[f64], l: &[f64; 3]) -> Vec2 {
    let d = shape_gradients(p, g, l);
    let mut r = [0.0; 2];
    for (c, d) in coeffs.iter().zip(d.iter()) {
        r[0] += c * d[0];
        r[1] += c * d[1];
    }
    r
}
