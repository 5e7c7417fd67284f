//! Piecewise constant symmetric positive definite diffusion coefficients.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::space::basis::Vec2;

/// A symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, xy: 0.0, yy: 1.0 };

    /// Checks symmetry and positive definiteness of a full matrix.
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Result<Sym2> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NotSpd(format!("non-finite entry in {m:?}")));
        }
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if (m[0][1] - m[1][0]).abs() > 1e-12 * scale {
            return Err(Error::NotSpd(format!("{m:?} is not symmetric")));
        }
        let s = Sym2 { xx: m[0][0], xy: 0.5 * (m[0][1] + m[1][0]), yy: m[1][1] };
        if s.xx <= 0.0 || s.det() <= 0.0 {
            return Err(Error::NotSpd(format!("{m:?} is not positive definite")));
        }
        Ok(s)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// `u^T A v`.
    pub fn inner(&self, u: Vec2, v: Vec2) -> f64 {
        let av = self.apply(v);
        u[0] * av[0] + u[1] * av[1]
    }

    /// The SPD square root, `(A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))`.
    pub fn sqrt(&self) -> Sym2 {
        let s = self.det().sqrt();
        let t = (self.trace() + 2.0 * s).sqrt();
        Sym2 { xx: (self.xx + s) / t, xy: self.xy / t, yy: (self.yy + s) / t }
    }

    /// `tr(A H)` for a symmetric Hessian `H` given as `[dxx, dxy, dyy]`,
    /// i.e. `div(A grad v)` for a function with that Hessian.
    pub fn contract(&self, h: [f64; 3]) -> f64 {
        self.xx * h[0] + 2.0 * self.xy * h[1] + self.yy * h[2]
    }
}

/// Diffusion coefficient `A`, constant on each element of the initial mesh and
/// inherited by all descendants through [`Mesh::origin`].
#[derive(Clone, Debug, PartialEq, Default)]
pub enum CoefficientField {
    #[default]
    Identity,
    PerInitialElement(Vec<Sym2>),
}

impl CoefficientField {
    /// One matrix per initial element; each must be SPD.
    pub fn piecewise(matrices: &[[[f64; 2]; 2]]) -> Result<CoefficientField> {
        let m = matrices.iter().map(|m| Sym2::from_matrix(*m)).collect::<Result<Vec<_>>>()?;
        Ok(CoefficientField::PerInitialElement(m))
    }

    /// Checks that the field covers every initial element of `mesh`.
    pub fn check(&self, mesh: &Mesh) -> Result<()> {
        if let CoefficientField::PerInitialElement(m) = self {
            let need = (0..mesh.num_triangles()).map(|t| mesh.origin(t) + 1).max().unwrap_or(0);
            if m.len() < need {
                return Err(Error::Input(format!(
                    "coefficient field has {} matrices but the mesh descends from {} initial elements",
                    m.len(),
                    need
                )));
            }
        }
        Ok(())
    }

    /// `A` on triangle `t` of `mesh`.
    pub fn on(&self, mesh: &Mesh, t: usize) -> Sym2 {
        match self {
            CoefficientField::Identity => Sym2::IDENTITY,
            CoefficientField::PerInitialElement(m) => m[mesh.origin(t)],
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CoefficientField::Identity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let a = Sym2::from_matrix([[2.0, 0.7], [0.7, 1.3]]).unwrap();
        let r = a.sqrt();
        let r2 = [r.apply([r.xx, r.xy]), r.apply([r.xy, r.yy])];
        assert!((r2[0][0] - a.xx).abs() < 1e-14);
        assert!((r2[0][1] - a.xy).abs() < 1e-14);
        assert!((r2[1][1] - a.yy).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_spd() {
        assert!(Sym2::from_matrix([[1.0, 2.0], [2.0, 1.0]]).is_err());
        assert!(Sym2::from_matrix([[1.0, 0.5], [0.4, 1.0]]).is_err());
        assert!(Sym2::from_matrix([[-1.0, 0.0], [0.0, -1.0]]).is_err());
        assert!(CoefficientField::piecewise(&[[[1.0, 0.0], [0.0, 0.0]]]).is_err());
    }
}
