//! Benchmark problems, exact errors, per-level records, rate fits and CSV output.

mod problems;
mod rates;

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub use problems::{
    angle, problem, problem_singular_known, problem_singular_unknown, problem_smooth, singular_u, smooth_u,
    ProblemId, ProblemSpec, ScalarFn, VectorFn,
};
pub use rates::{estimate_rate, fit_slope, RateEstimate, RateWindow, MIN_FIT_POINTS};

use crate::adaptive::{run_loop, LevelState, LoopConfig};
use crate::error::Result;
use crate::estimators::residual_estimator;
use crate::mesh::{initial_lshape, Mesh, Point};
use crate::solve::{energy_inner, solve_problem, source_order, CoefficientField};
use crate::space::basis::{eval_grad, local_dofs};
use crate::space::{prolongate, quadrature, FeSpace};

/// Quadrature order on elements touching a singular point.
pub const CORNER_ORDER: usize = 19;

/// `||A^{1/2} grad(u - v)||` for a discrete `v` and an exact gradient.
///
/// Elements with a vertex at `singular` use an order-19 Duffy rule collapsed at
/// that vertex, all others a rule of order `2p + 4`.
pub fn true_error(
    space: &FeSpace,
    coeffs: &[f64],
    exact_grad: &dyn Fn(Point) -> [f64; 2],
    a: &CoefficientField,
    singular: Option<Point>,
) -> f64 {
    true_error_with(space, coeffs, exact_grad, a, singular, source_order(space.degree()), CORNER_ORDER)
}

/// [`true_error`] with explicit quadrature orders.
pub fn true_error_with(
    space: &FeSpace,
    coeffs: &[f64],
    exact_grad: &dyn Fn(Point) -> [f64; 2],
    a: &CoefficientField,
    singular: Option<Point>,
    order: usize,
    corner_order: usize,
) -> f64 {
    let mesh = space.mesh();
    let p = space.degree();
    let regular = quadrature(order);
    let corner = quadrature(corner_order);
    let corner_rules: Vec<_> = (0..3).map(|k| corner.rotated(k)).collect();
    let mut sum = 0.0;
    for t in 0..mesh.num_triangles() {
        let g = space.geometry(t);
        let at = a.on(mesh, t);
        let local = space.gather(t, coeffs);
        let rule = singular
            .and_then(|s| g.corners.iter().position(|c| *c == s))
            .map_or(&regular, |k| &corner_rules[k]);
        for (l, w) in rule.iter() {
            let gu = exact_grad(g.point(l));
            let gv = eval_grad(p, &g, &local[..local_dofs(p)], l);
            let d = [gu[0] - gv[0], gu[1] - gv[1]];
            sum += w * g.area * at.inner(d, d);
        }
    }
    sum.sqrt()
}

/// Everything reported for one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub nrelements: usize,
    pub fine_dofs: usize,
    /// `lambda + res`, `lambda + osc`, `lambda + apx`, `mu + res`, `mu + osc`,
    /// `mu + apx` (the `apx` entries only for `p = 2`).
    pub eta: [Option<f64>; 6],
    pub lambda: f64,
    pub mu: f64,
    pub osc: f64,
    /// Total of the estimator driving the marking.
    pub driving_total: f64,
    pub marked: usize,
    /// `||A^{1/2} grad(u - u_coarse)||` when the exact solution is known.
    pub error: Option<f64>,
    /// `||A^{1/2} grad(u - u_fine)||` when the exact solution is known.
    pub fine_error: Option<f64>,
    /// `(error^2 + osc^2)^{1/2}`.
    pub error_osc: Option<f64>,
    /// `||A^{1/2} grad(u_fine - u_coarse)||`.
    pub mu_tilde: f64,
    /// `||A^{1/2} grad u_fine||^2` and `||A^{1/2} grad u_coarse||^2`.
    pub fine_energy_sq: f64,
    pub coarse_energy_sq: f64,
    /// Residual estimator of the coarse solution.
    pub residual_total: f64,
    /// `max_T (lambda(T) - mu(T)) / mu(T)`, at most 0 when `lambda <= mu` elementwise.
    pub max_local_excess: f64,
    pub solver_iterations: usize,
}

impl LevelRecord {
    /// Efficiency index `(lambda + osc) / (error^2 + osc^2)^{1/2}`.
    pub fn efficiency(&self) -> Option<f64> {
        Some(self.eta[1]? / self.error_osc?)
    }

    /// Reliability index `(error^2 + osc^2)^{1/2} / (mu + osc)`.
    pub fn reliability(&self) -> Option<f64> {
        Some(self.error_osc? / self.eta[4]?)
    }

    /// `lambda / error` and `error / mu` without data terms.
    pub fn plain_indices(&self) -> Option<(f64, f64)> {
        let e = self.error?;
        Some((self.lambda / e, e / self.mu))
    }

    /// Relative defect of the Pythagoras identity
    /// `||grad u_fine||^2 = ||grad u_coarse||^2 + ||grad(u_fine - u_coarse)||^2`.
    pub fn pythagoras_defect(&self) -> f64 {
        (self.fine_energy_sq - self.coarse_energy_sq - self.mu_tilde * self.mu_tilde).abs() / self.fine_energy_sq
    }

    /// Saturation ratio `||grad(u - u_fine)|| / ||grad(u - u_coarse)||`.
    pub fn saturation(&self) -> Option<f64> {
        Some(self.fine_error? / self.error?)
    }
}

/// Efficiency and reliability index of a record.
pub fn indices(record: &LevelRecord) -> (Option<f64>, Option<f64>) {
    (record.efficiency(), record.reliability())
}

fn record_level(state: &LevelState, config: &LoopConfig, spec: &ProblemSpec) -> Result<LevelRecord> {
    let a = &spec.coefficient;
    let coarse = &state.coarse;
    let fine = &state.fine_solution;
    let coarse_sol = solve_problem(coarse, a, &*spec.source, &*spec.dirichlet, None)?;
    let lifted = prolongate(coarse, &fine.space, &coarse_sol.coeffs)?;
    let diff: Vec<f64> = fine.coeffs.iter().zip(&lifted).map(|(a, b)| a - b).collect();
    let mu_tilde = energy_inner(&fine.space, a, &diff, &diff).max(0.0).sqrt();
    let fine_energy_sq = energy_inner(&fine.space, a, &fine.coeffs, &fine.coeffs);
    let coarse_energy_sq = energy_inner(coarse, a, &coarse_sol.coeffs, &coarse_sol.coeffs);
    let (error, fine_error) = match &spec.exact_gradient {
        Some(g) => (
            Some(true_error(coarse, &coarse_sol.coeffs, &**g, a, spec.singular_point)),
            Some(true_error(&fine.space, &fine.coeffs, &**g, a, spec.singular_point)),
        ),
        None => (None, None),
    };
    let terms = &state.terms;
    let report = terms.report(Some(mu_tilde));
    let p2 = config.p == 2;
    let eta = [
        Some(report.lambda_res),
        Some(report.lambda_osc),
        p2.then_some(report.lambda_apx),
        Some(report.mu_res),
        Some(report.mu_osc),
        p2.then_some(report.mu_apx),
    ];
    let max_local_excess = terms
        .lambda_sq
        .iter()
        .zip(&terms.mu_sq)
        .map(|(l, m)| {
            let (l, m) = (l.sqrt(), m.sqrt());
            if m > 0.0 {
                (l - m) / m
            } else if l > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let rho = residual_estimator(coarse, &coarse_sol.coeffs, a, &*spec.source);
    Ok(LevelRecord {
        level: state.level,
        nrelements: coarse.mesh().num_triangles(),
        fine_dofs: fine.space.ndofs(),
        eta,
        lambda: report.lambda,
        mu: report.mu,
        osc: report.osc,
        driving_total: state.indicators.total(),
        marked: state.marked.len(),
        error,
        fine_error,
        error_osc: error.map(|e| (e * e + report.osc * report.osc).sqrt()),
        mu_tilde,
        fine_energy_sq,
        coarse_energy_sq,
        residual_total: rho.total(),
        max_local_excess,
        solver_iterations: fine.iterations,
    })
}

/// Runs the adaptive loop for `config.problem` from the 12-element L-shape.
pub fn run_experiment(config: &LoopConfig) -> Result<Vec<LevelRecord>> {
    run_experiment_with(config, &problem(config.problem), initial_lshape(), |_, _| Ok(()))
}

/// Runs the adaptive loop for an arbitrary problem and initial mesh; `visit`
/// sees every level state together with its record.
pub fn run_experiment_with(
    config: &LoopConfig,
    spec: &ProblemSpec,
    initial: Mesh,
    mut visit: impl FnMut(&LevelState, &LevelRecord) -> Result<()>,
) -> Result<Vec<LevelRecord>> {
    let mut records = Vec::new();
    run_loop(config, spec, initial, |state| {
        let record = record_level(state, config, spec)?;
        visit(state, &record)?;
        records.push(record);
        Ok(())
    })?;
    Ok(records)
}

/// The coarse mesh of the last level of a run (the mesh `--dump-mesh` writes).
pub fn final_mesh(config: &LoopConfig) -> Result<Arc<Mesh>> {
    let mut last = None;
    run_loop(config, &problem(config.problem), initial_lshape(), |s| {
        last = Some(s.coarse.mesh().clone());
        Ok(())
    })?;
    last.ok_or_else(|| crate::error::Error::Config("no level was computed".into()))
}

pub const CSV_HEADER: [&str; 14] = [
    "level",
    "nrelements",
    "eta1",
    "eta2",
    "eta3",
    "eta4",
    "eta5",
    "eta6",
    "errorH1semi",
    "osc",
    "errorH1semiosc",
    "effectivityindex",
    "reliabilityindex",
    "mutilde",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one header line and one row per level.
pub fn write_csv_to<W: Write>(records: &[LevelRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let mut row = vec![r.level.to_string(), r.nrelements.to_string()];
        row.extend(r.eta.iter().map(|&e| opt(e)));
        row.push(opt(r.error));
        row.push(r.osc.to_string());
        row.push(opt(r.error_osc));
        row.push(opt(r.efficiency()));
        row.push(opt(r.reliability()));
        row.push(r.mu_tilde.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[LevelRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv_to(records, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::RefineMode;
    use crate::space::FeSpace;

    #[test]
    fn interpolant_of_affine_has_zero_error() {
        let m = Arc::new(initial_lshape().uniform_refine(RefineMode::Bisec3));
        let s = FeSpace::new(m, 1).unwrap();
        let u = s.interpolate(|x| 1.0 + 2.0 * x[0] - 3.0 * x[1]);
        let e = true_error(&s, &u, &|_| [2.0, -3.0], &CoefficientField::Identity, None);
        assert!(e < 1e-10);
    }

    #[test]
    fn corner_error_is_quadrature_stable() {
        // the interpolant of the singular solution on the initial mesh, integrated
        // with the default rules and with a much finer subdivision
        let spec = problem_singular_known();
        let g = spec.exact_gradient.clone().unwrap();
        let m = Arc::new(initial_lshape());
        let s = FeSpace::new(m.clone(), 1).unwrap();
        let u = s.interpolate(singular_u);
        let e = true_error(&s, &u, &*g, &CoefficientField::Identity, Some([0.0, 0.0]));
        // reference: six uniform refinements, every piece integrated with high order
        let mut fine = (*m).clone();
        for _ in 0..6 {
            fine = fine.uniform_refine(RefineMode::Bisec3);
        }
        let fine = Arc::new(fine);
        let fs = FeSpace::new(fine.clone(), 1).unwrap();
        let uf = prolongate(&s, &fs, &u).unwrap();
        let reference = true_error_with(&fs, &uf, &*g, &CoefficientField::Identity, Some([0.0, 0.0]), 12, 40);
        assert!((e - reference).abs() <= 1e-3 * reference, "{e} vs {reference}");
    }

    #[test]
    fn csv_shape() {
        let cfg = LoopConfig::new(ProblemId::SingularKnown, 1, RefineMode::Bisec3, 0.5).with_max_levels(3);
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 3);
        let mut buf = Vec::new();
        write_csv_to(&recs, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
        for (row, rec) in rd.records().zip(&recs) {
            let row = row.unwrap();
            assert_eq!(row.len(), 14);
            assert_eq!(&row[4], "");
            assert_eq!(&row[7], "");
            assert_eq!(row[1].parse::<usize>().unwrap(), rec.nrelements);
            assert_eq!(row[3].parse::<f64>().unwrap(), rec.eta[1].unwrap());
        }
        let mut again = Vec::new();
        write_csv_to(&run_experiment(&cfg).unwrap(), &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn singular_p1_has_no_data_terms() {
        let cfg = LoopConfig::new(ProblemId::SingularKnown, 1, RefineMode::Bisec3, 0.5).with_max_levels(4);
        for r in run_experiment(&cfg).unwrap() {
            assert_eq!(r.eta[0], r.eta[1]);
            assert_eq!(r.eta[3], r.eta[4]);
            assert_eq!(r.osc, 0.0);
            let eo = r.error_osc.unwrap();
            assert!((eo * eo - r.error.unwrap().powi(2)).abs() <= 1e-12 * eo * eo);
        }
    }
}
