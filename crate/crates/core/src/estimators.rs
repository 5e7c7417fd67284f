//! Two-level (h-h/2) error indicators and the classical residual estimator.
//!
//! Given a coarse mesh `T`, its uniform refinement `T^` and a function `v^` on
//! the fine space, the indicators on a coarse element `T` are
//!
//! * `lambda(T)^2 = int_T |A^{1/2} (1 - pi) grad v^|^2`, with `pi` the L2
//!   projection onto vector polynomials of degree `p - 1` on `T`,
//! * `mu(T)^2 = int_T |A^{1/2} grad (v^ - I v^)|^2`, with `I` the nodal
//!   interpolation onto the coarse space,
//! * `res(T)^2 = |T| sum_{T' in T^, T' in T} ||f + div(A grad v^)||_{T'}^2`,
//! * `osc(T)^2 = |T| ||(1 - pi) f||_T^2` and `apx(T)^2 = |T| ||(1 - Pi) f||_T^2`
//!   with projections of degree `p - 1` and `max(p - 2, 0)`.
//!
//! An estimator variant combines one base term (`lambda` or `mu`) with one
//! data term; its element indicator is the square root of the sum of squares.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point, RefineMode};
use crate::solve::{source_order, CoefficientField, DiscreteSolution};
use crate::space::basis::{self, local_dofs, lagrange_nodes, shape_gradients, shape_hessians, TriangleGeometry};
use crate::space::projection::projection_residual_sq;
use crate::space::{nodal_interpolate, project_gradient, quadrature, FeSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseTerm {
    Lambda,
    Mu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DataTerm {
    Res,
    Osc,
    Apx,
}

/// One of the six estimators `base^2 + data^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EstimatorVariant {
    pub base: BaseTerm,
    pub data: DataTerm,
}

impl EstimatorVariant {
    pub const ALL: [EstimatorVariant; 6] = [
        EstimatorVariant { base: BaseTerm::Lambda, data: DataTerm::Res },
        EstimatorVariant { base: BaseTerm::Lambda, data: DataTerm::Osc },
        EstimatorVariant { base: BaseTerm::Lambda, data: DataTerm::Apx },
        EstimatorVariant { base: BaseTerm::Mu, data: DataTerm::Res },
        EstimatorVariant { base: BaseTerm::Mu, data: DataTerm::Osc },
        EstimatorVariant { base: BaseTerm::Mu, data: DataTerm::Apx },
    ];

    pub fn new(base: BaseTerm, data: DataTerm) -> Self {
        EstimatorVariant { base, data }
    }

    /// The default indicator for a degree and refinement mode: `res` for P1
    /// with three bisections, `apx` for P2 with three bisections, `osc` with
    /// five bisections.
    pub fn default_for(p: usize, mode: RefineMode) -> Self {
        let data = match (mode, p) {
            (RefineMode::Bisec5, _) => DataTerm::Osc,
            (RefineMode::Bisec3, 1) => DataTerm::Res,
            (RefineMode::Bisec3, _) => DataTerm::Apx,
        };
        EstimatorVariant { base: BaseTerm::Lambda, data }
    }

    /// Rejects combinations without convergence guarantees: `apx` needs
    /// `p >= 2`, `osc` needs five bisections per marked element.
    pub fn validate(&self, p: usize, mode: RefineMode) -> Result<()> {
        if !(1..=2).contains(&p) {
            return Err(Error::UnsupportedDegree(p));
        }
        if self.data == DataTerm::Apx && p < 2 {
            return Err(Error::Config(format!("{self} requires polynomial degree p >= 2")));
        }
        if self.data == DataTerm::Osc && mode != RefineMode::Bisec5 {
            return Err(Error::Config(format!("{self} requires refinement mode m3p (five bisections)")));
        }
        Ok(())
    }
}

impl fmt::Display for EstimatorVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            BaseTerm::Lambda => "lambda",
            BaseTerm::Mu => "mu",
        };
        let data = match self.data {
            DataTerm::Res => "res",
            DataTerm::Osc => "osc",
            DataTerm::Apx => "apx",
        };
        write!(f, "{base}-{data}")
    }
}

impl FromStr for EstimatorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (b, d) = s
            .split_once('-')
            .ok_or_else(|| Error::Config(format!("unknown estimator variant '{s}'")))?;
        let base = match b {
            "lambda" => BaseTerm::Lambda,
            "mu" => BaseTerm::Mu,
            _ => return Err(Error::Config(format!("unknown estimator variant '{s}'"))),
        };
        let data = match d {
            "res" => DataTerm::Res,
            "osc" => DataTerm::Osc,
            "apx" => DataTerm::Apx,
            _ => return Err(Error::Config(format!("unknown estimator variant '{s}'"))),
        };
        Ok(EstimatorVariant { base, data })
    }
}

/// Per coarse element indicators `eta(T) = (base(T)^2 + data(T)^2)^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorVector {
    pub variant: EstimatorVariant,
    pub values: Vec<f64>,
    pub base: Vec<f64>,
    pub data: Vec<f64>,
}

impl IndicatorVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * v).collect()
    }

    /// `(sum_T eta(T)^2)^{1/2}`.
    pub fn total(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// All squared element contributions on one coarse mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorTerms {
    pub lambda_sq: Vec<f64>,
    pub mu_sq: Vec<f64>,
    pub res_sq: Vec<f64>,
    pub osc_sq: Vec<f64>,
    pub apx_sq: Vec<f64>,
}

fn total(v: &[f64]) -> f64 {
    v.iter().sum::<f64>().sqrt()
}

impl EstimatorTerms {
    pub fn num_elements(&self) -> usize {
        self.lambda_sq.len()
    }

    pub fn base_sq(&self, b: BaseTerm) -> &[f64] {
        match b {
            BaseTerm::Lambda => &self.lambda_sq,
            BaseTerm::Mu => &self.mu_sq,
        }
    }

    pub fn data_sq(&self, d: DataTerm) -> &[f64] {
        match d {
            DataTerm::Res => &self.res_sq,
            DataTerm::Osc => &self.osc_sq,
            DataTerm::Apx => &self.apx_sq,
        }
    }

    pub fn indicators(&self, variant: EstimatorVariant) -> IndicatorVector {
        let b = self.base_sq(variant.base);
        let d = self.data_sq(variant.data);
        IndicatorVector {
            variant,
            values: b.iter().zip(d).map(|(b, d)| (b + d).sqrt()).collect(),
            base: b.iter().map(|v| v.sqrt()).collect(),
            data: d.iter().map(|v| v.sqrt()).collect(),
        }
    }

    /// Global value of a variant.
    pub fn total(&self, variant: EstimatorVariant) -> f64 {
        let b = self.base_sq(variant.base);
        let d = self.data_sq(variant.data);
        b.iter().zip(d).map(|(b, d)| b + d).sum::<f64>().sqrt()
    }

    pub fn lambda(&self) -> f64 {
        total(&self.lambda_sq)
    }

    pub fn mu(&self) -> f64 {
        total(&self.mu_sq)
    }

    pub fn res(&self) -> f64 {
        total(&self.res_sq)
    }

    pub fn osc(&self) -> f64 {
        total(&self.osc_sq)
    }

    pub fn apx(&self) -> f64 {
        total(&self.apx_sq)
    }

    pub fn report(&self, mu_tilde: Option<f64>) -> EstimatorReport {
        let t = |b, d| self.total(EstimatorVariant::new(b, d));
        use BaseTerm::*;
        use DataTerm::*;
        EstimatorReport {
            lambda_res: t(Lambda, Res),
            lambda_osc: t(Lambda, Osc),
            lambda_apx: t(Lambda, Apx),
            mu_res: t(Mu, Res),
            mu_osc: t(Mu, Osc),
            mu_apx: t(Mu, Apx),
            lambda: self.lambda(),
            mu: self.mu(),
            osc: self.osc(),
            mu_tilde,
        }
    }
}

/// Global estimator values on one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorReport {
    pub lambda_res: f64,
    pub lambda_osc: f64,
    pub lambda_apx: f64,
    pub mu_res: f64,
    pub mu_osc: f64,
    pub mu_apx: f64,
    pub lambda: f64,
    pub mu: f64,
    pub osc: f64,
    /// `||A^{1/2} grad(u^ - u)||` with `u` the coarse Galerkin solution.
    pub mu_tilde: Option<f64>,
}

/// Coarse/fine pair with the data needed for the element-local terms.
pub struct TwoLevel<'a> {
    coarse: &'a FeSpace,
    fine: &'a FeSpace,
    coeffs: &'a [f64],
    a: &'a CoefficientField,
    children: Vec<Vec<usize>>,
    interpolant: Vec<f64>,
}

impl<'a> TwoLevel<'a> {
    /// `fine` must live on a refinement of the mesh of `coarse`, with the same degree.
    pub fn new(coarse: &'a FeSpace, fine: &'a DiscreteSolution, a: &'a CoefficientField) -> Result<Self> {
        if coarse.degree() != fine.space.degree() {
            return Err(Error::Input("coarse and fine spaces differ in degree".into()));
        }
        let children = fine.space.mesh().child_map(coarse.mesh())?;
        let interpolant = nodal_interpolate(coarse, &fine.space, &fine.coeffs)?;
        Ok(TwoLevel { coarse, fine: &fine.space, coeffs: &fine.coeffs, a, children, interpolant })
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    /// Coefficients of the coarse nodal interpolant of the fine function.
    pub fn interpolant(&self) -> &[f64] {
        &self.interpolant
    }

    fn coarse_geometry(&self, t: usize) -> TriangleGeometry {
        self.coarse.geometry(t)
    }

    /// `lambda(T)^2`.
    pub fn lambda_sq(&self, t: usize) -> f64 {
        let p = self.coarse.degree();
        let at = self.a.on(self.coarse.mesh(), t);
        let tg = self.coarse_geometry(t);
        let [px, py] = project_gradient(&tg, self.fine, &self.children[t], self.coeffs, p - 1);
        let rule = quadrature(2 * (p - 1));
        let mut sum = 0.0;
        for &c in &self.children[t] {
            let g = self.fine.geometry(c);
            let local = self.fine.gather(c, self.coeffs);
            for (l, w) in rule.iter() {
                let x = g.point(l);
                let grad = basis::eval_grad(p, &g, &local, l);
                let d = [grad[0] - px.eval(x), grad[1] - py.eval(x)];
                sum += w * g.area * at.inner(d, d);
            }
        }
        sum
    }

    /// `mu(T)^2`.
    pub fn mu_sq(&self, t: usize) -> f64 {
        let p = self.coarse.degree();
        let n = local_dofs(p);
        let at = self.a.on(self.coarse.mesh(), t);
        let tg = self.coarse_geometry(t);
        let coarse_local = self.coarse.gather(t, &self.interpolant);
        let rule = quadrature(2 * (p - 1));
        let mut sum = 0.0;
        for &c in &self.children[t] {
            let g = self.fine.geometry(c);
            let mut d = self.fine.gather(c, self.coeffs);
            for (k, node) in lagrange_nodes(p).iter().enumerate().take(n) {
                d[k] -= basis::eval(p, &coarse_local, &tg.barycentric(g.point(node)));
            }
            for (l, w) in rule.iter() {
                let grad = basis::eval_grad(p, &g, &d, l);
                sum += w * g.area * at.inner(grad, grad);
            }
        }
        sum
    }

    /// `res(T)^2`.
    pub fn res_sq(&self, t: usize, f: &dyn Fn(Point) -> f64) -> f64 {
        let p = self.coarse.degree();
        let at = self.a.on(self.coarse.mesh(), t);
        let rule = quadrature(source_order(p));
        let mut sum = 0.0;
        for &c in &self.children[t] {
            let g = self.fine.geometry(c);
            let div = element_divergence(p, &g, &self.fine.gather(c, self.coeffs), &at);
            for (l, w) in rule.iter() {
                let r = f(g.point(l)) + div;
                sum += w * g.area * r * r;
            }
        }
        self.coarse.mesh().area(t) * sum
    }
}

/// `div(A grad v)` on one element, constant for `p <= 2`.
fn element_divergence(p: usize, g: &TriangleGeometry, local: &[f64; 6], a: &crate::solve::Sym2) -> f64 {
    if p == 1 {
        return 0.0;
    }
    let h = shape_hessians(p, g);
    let mut hv = [0.0; 3];
    for k in 0..local_dofs(p) {
        for (i, hv) in hv.iter_mut().enumerate() {
            *hv += local[k] * h[k][i];
        }
    }
    a.contract(hv)
}

/// `osc(T)^2 = |T| ||(1 - pi_{p-1}) f||_T^2`.
pub fn osc_sq(mesh: &Mesh, t: usize, p: usize, f: &dyn Fn(Point) -> f64) -> f64 {
    data_sq(mesh, t, p - 1, source_order(p), f)
}

/// `apx(T)^2 = |T| ||(1 - Pi_{max(p-2,0)}) f||_T^2`.
pub fn apx_sq(mesh: &Mesh, t: usize, p: usize, f: &dyn Fn(Point) -> f64) -> f64 {
    data_sq(mesh, t, p.saturating_sub(2), source_order(p), f)
}

fn data_sq(mesh: &Mesh, t: usize, degree: usize, order: usize, f: &dyn Fn(Point) -> f64) -> f64 {
    let g = TriangleGeometry::new(mesh.corners(t));
    mesh.area(t) * projection_residual_sq(&g, degree, &quadrature(order), f)
}

/// Computes every squared element contribution for the fine function `fine`
/// on the uniform refinement of the mesh of `coarse`.
pub fn estimate(
    coarse: &FeSpace,
    fine: &DiscreteSolution,
    a: &CoefficientField,
    f: &dyn Fn(Point) -> f64,
) -> Result<EstimatorTerms> {
    let two = TwoLevel::new(coarse, fine, a)?;
    let mesh = coarse.mesh();
    let p = coarse.degree();
    let n = mesh.num_triangles();
    let mut terms = EstimatorTerms {
        lambda_sq: Vec::with_capacity(n),
        mu_sq: Vec::with_capacity(n),
        res_sq: Vec::with_capacity(n),
        osc_sq: Vec::with_capacity(n),
        apx_sq: Vec::with_capacity(n),
    };
    for t in 0..n {
        terms.lambda_sq.push(two.lambda_sq(t));
        terms.mu_sq.push(two.mu_sq(t));
        terms.res_sq.push(two.res_sq(t, f));
        let osc = osc_sq(mesh, t, p, f);
        terms.osc_sq.push(osc);
        // for p = 1 both projections have degree 0
        terms.apx_sq.push(if p == 1 { osc } else { apx_sq(mesh, t, p, f) });
    }
    Ok(terms)
}

/// Indicators of one variant; see [`estimate`].
pub fn eta_indicators(
    variant: EstimatorVariant,
    coarse: &FeSpace,
    fine: &DiscreteSolution,
    a: &CoefficientField,
    f: &dyn Fn(Point) -> f64,
) -> Result<IndicatorVector> {
    Ok(estimate(coarse, fine, a, f)?.indicators(variant))
}

/// Classical residual estimator of a discrete function on its own mesh,
/// indexed by elements and interior edges.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualEstimate {
    /// `|T| ||f + div(A grad v)||_T^2` per element.
    pub element_sq: Vec<f64>,
    /// `|E| ||[A grad v . n]||_E^2` per edge (zero on boundary edges).
    pub edge_sq: Vec<f64>,
}

impl ResidualEstimate {
    pub fn total(&self) -> f64 {
        (self.element_sq.iter().sum::<f64>() + self.edge_sq.iter().sum::<f64>()).sqrt()
    }

    /// Contribution of element `t` and of its interior edges, each edge
    /// counted once per adjacent element with half its weight.
    pub fn local_sq(&self, mesh: &Mesh, t: usize) -> f64 {
        self.element_sq[t] + mesh.triangle_edges(t).iter().map(|&e| 0.5 * self.edge_sq[e]).sum::<f64>()
    }
}

pub fn residual_estimator(
    space: &FeSpace,
    coeffs: &[f64],
    a: &CoefficientField,
    f: &dyn Fn(Point) -> f64,
) -> ResidualEstimate {
    let mesh = space.mesh();
    let p = space.degree();
    let rule = quadrature(source_order(p));
    let mut element_sq = Vec::with_capacity(mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let g = space.geometry(t);
        let div = element_divergence(p, &g, &space.gather(t, coeffs), &a.on(mesh, t));
        let sum: f64 = rule
            .iter()
            .map(|(l, w)| {
                let r = f(g.point(l)) + div;
                w * r * r
            })
            .sum();
        element_sq.push(g.area * g.area * sum);
    }
    // two-point Gauss on [0, 1] integrates the squared (at most linear) jump exactly
    let s = 0.5 / 3f64.sqrt();
    let gauss = [0.5 - s, 0.5 + s];
    let mut edge_sq = vec![0.0; mesh.num_edges()];
    for (e, value) in edge_sq.iter_mut().enumerate() {
        let (t0, Some(t1)) = mesh.edge_triangles(e) else { continue };
        let [va, vb] = mesh.edge(e);
        let (pa, pb) = (mesh.vertex(va), mesh.vertex(vb));
        let len = mesh.edge_length(e);
        let normal = [(pb[1] - pa[1]) / len, (pa[0] - pb[0]) / len];
        let flux = |t: usize, x: Point| {
            let g = space.geometry(t);
            let grad = basis::eval_grad(p, &g, &space.gather(t, coeffs), &g.barycentric(x));
            let ag = a.on(mesh, t).apply(grad);
            ag[0] * normal[0] + ag[1] * normal[1]
        };
        let mut sum = 0.0;
        for s in gauss {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let j = flux(t0, x) - flux(t1, x);
            sum += 0.5 * j * j;
        }
        *value = len * len * sum;
    }
    ResidualEstimate { element_sq, edge_sq }
}

/// Shape-function gradient helper re-exported for tests of custom integrands.
pub fn gradient_at(p: usize, g: &TriangleGeometry, local: &[f64; 6], l: &[f64; 3]) -> [f64; 2] {
    let d = shape_gradients(p, g, l);
    let mut r = [0.0; 2];
    for k in 0..local_dofs(p) {
        r[0] += local[k] * d[k][0];
        r[1] += local[k] * d[k][1];
    }
    r
}
