//! Quadrature on triangles in barycentric coordinates.
//!
//! Weights are normalised to sum to one, so `sum w_q g(x_q) * |T|` approximates
//! `int_T g`. Orders 1 and 2 use the centroid and the classical 3-point rule,
//! orders 3 to 5 the 7-point degree-5 rule, and anything higher a collapsed
//! (Duffy) tensor product of Gauss-Legendre rules.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(l0, l1, l2)` of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights, summing to one.
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    /// Same rule with the barycentric roles permuted so that vertex 0 of the
    /// rule maps to local vertex `k`. Used to put the collapsed vertex of a
    /// Duffy rule on a singular corner.
    pub fn rotated(&self, k: usize) -> QuadratureRule {
        let points = self
            .points
            .iter()
            .map(|l| {
                let mut r = [0.0; 3];
                for j in 0..3 {
                    r[(j + k) % 3] = l[j];
                }
                r
            })
            .collect();
        QuadratureRule { points, weights: self.weights.clone(), degree: self.degree }
    }
}

/// Rule exact for polynomials of total degree `order`.
pub fn quadrature(order: usize) -> QuadratureRule {
    match order {
        0 | 1 => QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            degree: 1,
        },
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            QuadratureRule {
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 3.0; 3],
                degree: 2,
            }
        }
        3..=5 => seven_point(),
        _ => collapsed_gauss(order),
    }
}

fn seven_point() -> QuadratureRule {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    // normalised weights: 9/40 at the centroid, (155 -/+ sqrt 15)/1200 on the two orbits
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let mut points = vec![[1.0 / 3.0; 3]];
    let mut weights = vec![9.0 / 40.0];
    for (a, w) in [(a1, w1), (a2, w2)] {
        let b = 1.0 - 2.0 * a;
        points.extend([[b, a, a], [a, b, a], [a, a, b]]);
        weights.extend([w; 3]);
    }
    QuadratureRule { points, weights, degree: 5 }
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn collapsed_gauss(order: usize) -> QuadratureRule {
    // (s, t) in [0,1]^2 -> l1 = s (1 - t), l2 = s t, Jacobian 2 s after normalisation
    let ns = (order + 2).div_ceil(2);
    let nt = (order + 1).div_ceil(2);
    let (xs, ws) = gauss_legendre(ns);
    let (xt, wt) = gauss_legendre(nt);
    let mut points = Vec::with_capacity(ns * nt);
    let mut weights = Vec::with_capacity(ns * nt);
    for (s, ws) in xs.iter().zip(&ws) {
        for (t, wt) in xt.iter().zip(&wt) {
            let l1 = s * (1.0 - t);
            let l2 = s * t;
            points.push([1.0 - l1 - l2, l1, l2]);
            weights.push(2.0 * s * ws * wt);
        }
    }
    QuadratureRule { points, weights, degree: order }
}
