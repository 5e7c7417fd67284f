//! Dörfler marking and the solve / estimate / mark / refine loop.
//!
//! Each level works on a coarse mesh and its uniform refinement. The Galerkin
//! solution is computed on the fine mesh only; the indicators compare it with
//! the coarse mesh, and the marked coarse elements are refined.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorTerms, EstimatorVariant, IndicatorVector};
use crate::harness::{ProblemId, ProblemSpec};
use crate::mesh::{Mesh, RefineMode};
use crate::solve::{solve_problem, DiscreteSolution};
use crate::space::FeSpace;

/// Smallest set of elements carrying a `theta` fraction of the squared total.
///
/// `squared` holds `eta(T)^2`. Elements are taken in order of decreasing value,
/// ties by increasing id, until the inequality
/// `theta * sum_all <= sum_marked` holds. `theta = 1` marks every element. The
/// result is sorted by id.
pub fn doerfler_mark(squared: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Config(format!("marking parameter theta must lie in (0, 1], got {theta}")));
    }
    if let Some(bad) = squared.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Input(format!("indicator {bad} is not a finite non-negative number")));
    }
    if theta == 1.0 {
        return Ok((0..squared.len()).collect());
    }
    let mut order: Vec<usize> = (0..squared.len()).collect();
    order.sort_by(|&a, &b| squared[b].total_cmp(&squared[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&i| squared[i]).sum();
    let goal = theta * total;
    let mut marked = Vec::new();
    let mut acc = 0.0;
    for &i in &order {
        if acc >= goal {
            break;
        }
        acc += squared[i];
        marked.push(i);
    }
    marked.sort_unstable();
    Ok(marked)
}

/// When the loop stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    /// Levels whose coarse mesh has more elements than this are not computed.
    pub max_elements: usize,
    /// Upper bound on the number of levels.
    pub max_levels: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { max_elements: 200_000, max_levels: usize::MAX }
    }
}

/// Parameters of one adaptive run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopConfig {
    pub theta: f64,
    pub p: usize,
    pub mode: RefineMode,
    pub variant: EstimatorVariant,
    pub stop: StopRule,
    pub problem: ProblemId,
}

impl LoopConfig {
    /// Adaptive run with the default estimator for `p` and `mode`.
    pub fn new(problem: ProblemId, p: usize, mode: RefineMode, theta: f64) -> Self {
        LoopConfig {
            theta,
            p,
            mode,
            variant: EstimatorVariant::default_for(p, mode),
            stop: StopRule::default(),
            problem,
        }
    }

    pub fn with_variant(mut self, variant: EstimatorVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_max_elements(mut self, n: usize) -> Self {
        self.stop.max_elements = n;
        self
    }

    pub fn with_max_levels(mut self, n: usize) -> Self {
        self.stop.max_levels = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(1..=2).contains(&self.p) {
            return Err(Error::Config(format!("unsupported polynomial degree {}", self.p)));
        }
        self.variant.validate(self.p, self.mode)?;
        if self.stop.max_levels == 0 {
            return Err(Error::Config("max_levels must be positive".into()));
        }
        Ok(())
    }
}

/// Everything computed on one level.
#[derive(Clone, Debug)]
pub struct LevelState {
    pub level: usize,
    pub coarse: Arc<FeSpace>,
    pub fine_solution: DiscreteSolution,
    pub terms: EstimatorTerms,
    pub indicators: IndicatorVector,
    pub marked: Vec<usize>,
    /// The refined coarse mesh of the next level.
    pub next: Arc<Mesh>,
}

/// Solve on the uniform refinement of `mesh`, estimate, mark and refine.
pub fn adaptive_step(level: usize, mesh: Arc<Mesh>, config: &LoopConfig, problem: &ProblemSpec) -> Result<LevelState> {
    let coarse = Arc::new(FeSpace::new(mesh.clone(), config.p)?);
    let fine_mesh = Arc::new(mesh.uniform_refine(config.mode));
    let fine = Arc::new(FeSpace::new(fine_mesh, config.p)?);
    let fine_solution = solve_problem(&fine, &problem.coefficient, &*problem.source, &*problem.dirichlet, None)?;
    let terms = estimate(&coarse, &fine_solution, &problem.coefficient, &*problem.source)?;
    let indicators = terms.indicators(config.variant);
    let marked = doerfler_mark(&indicators.squared(), config.theta)?;
    let next = Arc::new(mesh.refine(&marked, config.mode)?);
    Ok(LevelState { level, coarse, fine_solution, terms, indicators, marked, next })
}

/// Runs the loop from `initial`, handing each level to `visit`.
pub fn run_loop(
    config: &LoopConfig,
    problem: &ProblemSpec,
    initial: Mesh,
    mut visit: impl FnMut(&LevelState) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    let mut mesh = Arc::new(initial);
    for level in 0..config.stop.max_levels {
        if mesh.num_triangles() > config.stop.max_elements {
            break;
        }
        let state = adaptive_step(level, mesh, config, problem)?;
        visit(&state)?;
        mesh = state.next;
    }
    Ok(())
}
