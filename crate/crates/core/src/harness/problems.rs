//! Benchmark problems on the L-shaped domain `(-1,1)^2 \ [0,1]x[-1,0]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::solve::CoefficientField;

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `u = (1 - 10 r^2) exp(-5 r^2)`.
    Smooth,
    /// `u = r^{2/3} sin(2 phi / 3)`, `f = 0`.
    SingularKnown,
    /// `f = 1`, `u = 0` on the boundary; no closed form.
    SingularUnknown,
}

impl ProblemId {
    pub const ALL: [ProblemId; 3] = [ProblemId::Smooth, ProblemId::SingularKnown, ProblemId::SingularUnknown];
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemId::Smooth => "smooth",
            ProblemId::SingularKnown => "singular-known",
            ProblemId::SingularUnknown => "singular-unknown",
        })
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(ProblemId::Smooth),
            "singular-known" | "singular_known" => Ok(ProblemId::SingularKnown),
            "singular-unknown" | "singular_unknown" => Ok(ProblemId::SingularUnknown),
            _ => Err(Error::Config(format!("unknown problem '{s}'"))),
        }
    }
}

/// A problem `-div(A grad u) = f` in the domain, `u = g` on the boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub source: ScalarFn,
    pub dirichlet: ScalarFn,
    pub exact_solution: Option<ScalarFn>,
    pub exact_gradient: Option<VectorFn>,
    /// A point where the exact gradient is singular; error integrals on
    /// elements touching it use a corner-adapted rule.
    pub singular_point: Option<Point>,
    pub coefficient: CoefficientField,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("has_exact_gradient", &self.exact_gradient.is_some())
            .field("singular_point", &self.singular_point)
            .finish()
    }
}

impl ProblemSpec {
    /// A problem without known solution.
    pub fn new(
        name: impl Into<String>,
        source: impl Fn(Point) -> f64 + Send + Sync + 'static,
        dirichlet: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec {
            name: name.into(),
            source: Arc::new(source),
            dirichlet: Arc::new(dirichlet),
            exact_solution: None,
            exact_gradient: None,
            singular_point: None,
            coefficient: CoefficientField::Identity,
        }
    }

    /// Attaches the exact solution; it also becomes the Dirichlet data.
    pub fn with_exact(
        mut self,
        u: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        let u: ScalarFn = Arc::new(u);
        self.dirichlet = u.clone();
        self.exact_solution = Some(u);
        self.exact_gradient = Some(Arc::new(grad));
        self
    }

    pub fn with_coefficient(mut self, a: CoefficientField) -> Self {
        self.coefficient = a;
        self
    }
}

pub fn problem(id: ProblemId) -> ProblemSpec {
    match id {
        ProblemId::Smooth => problem_smooth(),
        ProblemId::SingularKnown => problem_singular_known(),
        ProblemId::SingularUnknown => problem_singular_unknown(),
    }
}

pub fn smooth_u(x: Point) -> f64 {
    let s = x[0] * x[0] + x[1] * x[1];
    (1.0 - 10.0 * s) * (-5.0 * s).exp()
}

pub fn problem_smooth() -> ProblemSpec {
    let f = |x: Point| {
        let s = x[0] * x[0] + x[1] * x[1];
        (-5.0 * s).exp() * (1000.0 * s * s - 700.0 * s + 60.0)
    };
    let grad = |x: Point| {
        let s = x[0] * x[0] + x[1] * x[1];
        let g = (-5.0 * s).exp() * (100.0 * s - 30.0);
        [g * x[0], g * x[1]]
    };
    ProblemSpec::new("smooth", f, smooth_u).with_exact(smooth_u, grad)
}

/// Polar angle in `[0, 2 pi)`.
pub fn angle(x: Point) -> f64 {
    let phi = x[1].atan2(x[0]);
    if phi < 0.0 {
        phi + 2.0 * PI
    } else {
        phi
    }
}

pub fn singular_u(x: Point) -> f64 {
    let r = x[0].hypot(x[1]);
    r.powf(2.0 / 3.0) * (2.0 * angle(x) / 3.0).sin()
}

pub fn problem_singular_known() -> ProblemSpec {
    let grad = |x: Point| {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let phi = angle(x);
        let c = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
        [-c * (phi / 3.0).sin(), c * (phi / 3.0).cos()]
    };
    let mut p = ProblemSpec::new("singular-known", |_| 0.0, singular_u).with_exact(singular_u, grad);
    p.singular_point = Some([0.0, 0.0]);
    p
}

pub fn problem_singular_unknown() -> ProblemSpec {
    ProblemSpec::new("singular-unknown", |_| 1.0, |_| 0.0)
}
