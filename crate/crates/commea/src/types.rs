//! Domain types shared across the crate: solutions, archives, the problem
//! contract, run configuration and the evaluation budget.

use serde::{Deserialize, Serialize};

/// A decision vector paired with its cached objective vector.
///
/// The objective cache is written exactly once, when the solution is
/// evaluated; re-evaluating the same decision vector reproduces it
/// bit-identically because problem evaluators are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// A bounded, ordered multiset of solutions with per-member fitness.
///
/// Two live instances exist during a run: the convergence archive (SPEA2
/// fitness, smaller is better) and the diversity archive (crowding
/// pseudo-distance, larger is better).
#[derive(Debug, Clone)]
pub struct Archive {
    pub members: Vec<Solution>,
    pub capacity: usize,
    pub fitness: Vec<f64>,
}

impl Archive {
    pub fn new(members: Vec<Solution>, capacity: usize, fitness: Vec<f64>) -> Self {
        assert_eq!(members.len(), fitness.len(), "fitness must align with members");
        Archive { members, capacity, fitness }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Which reference Pareto-set branches a sampler should cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefSelect {
    Global,
    GlobalAndLocal,
}

/// One analytically known Pareto-optimal point: decision vector, objective
/// image, and whether it belongs to a global branch (vs an accepted local
/// one).
#[derive(Debug, Clone)]
pub struct RefPoint {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub global: bool,
}

/// An evaluatable box-bounded minimization problem with analytic reference
/// samplers for its Pareto set(s).
///
/// `eval` is the raw objective map and must be pure; budget accounting is
/// the [`Evaluator`]'s job. Implementations treat out-of-bounds or
/// wrong-length input as a caller bug and panic rather than clamp silently.
pub trait Problem: Send + Sync {
    /// Canonical string id, e.g. `polygon-k4-m3-d10`.
    fn id(&self) -> String;
    fn dims(&self) -> usize;
    fn objectives(&self) -> usize;
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    /// Whether the problem has accepted local Pareto sets in addition to
    /// the global ones.
    fn has_local_ps(&self) -> bool {
        false
    }
    /// `k` reference points spread evenly across the requested branches
    /// (equal count per branch, uniform in each branch parameter). Families
    /// without local branches return global points for either selector.
    fn sample_ps(&self, k: usize, which: RefSelect) -> Vec<RefPoint>;
}

/// Panics unless `x` has the problem's dimension and sits inside its box.
pub fn check_in_bounds(problem: &dyn Problem, x: &[f64]) {
    assert_eq!(x.len(), problem.dims(), "decision vector has wrong length");
    let (lo, hi) = (problem.lower(), problem.upper());
    for k in 0..x.len() {
        assert!(
            x[k] >= lo[k] && x[k] <= hi[k],
            "x[{}] = {} outside [{}, {}]",
            k,
            x[k],
            lo[k],
            hi[k]
        );
    }
}

/// Projects each coordinate into the problem's box. Feasible input comes
/// back unchanged.
pub fn clamp_to_bounds(problem: &dyn Problem, mut x: Vec<f64>) -> Vec<f64> {
    assert_eq!(x.len(), problem.dims(), "decision vector has wrong length");
    let (lo, hi) = (problem.lower(), problem.upper());
    for k in 0..x.len() {
        x[k] = x[k].clamp(lo[k], hi[k]);
    }
    x
}

/// Maps a decision vector to `[0,1]^D` using the problem's box bounds.
pub fn normalize_decision(lower: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), lower.len());
    (0..x.len())
        .map(|k| {
            let span = upper[k] - lower[k];
            (x[k] - lower[k]) / span
        })
        .collect()
}

/// Run mode: the full two-archive algorithm, or the convergence-archive-only
/// ablation baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Full,
    CaOnly,
}

/// Everything a run needs besides the problem instance. Two runs with equal
/// configs produce bit-identical records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Canonical problem id.
    pub problem: String,
    /// Population / archive capacity N (even, >= 4).
    pub pop: usize,
    /// Function-evaluation budget.
    pub max_fe: u64,
    /// User epsilon for the acceptance band (>= 0).
    pub epsilon: f64,
    pub seed: u64,
    pub mode: RunMode,
    /// SBX distribution index.
    pub sbx_eta: f64,
    /// Polynomial-mutation distribution index.
    pub pm_eta: f64,
    /// Per-variable mutation probability.
    pub pm_rate: f64,
    /// Reference sample size used for the run's IGD/IGDX readouts.
    pub ref_points: usize,
    /// Keep per-generation snapshots in the record.
    pub trace: bool,
}

impl RunConfig {
    /// Paper-protocol defaults for a problem: N = 100·D, budget = 5000·D,
    /// pm_rate = 1/D, both distribution indices 20.
    pub fn defaults_for(problem: &dyn Problem) -> Self {
        let d = problem.dims();
        RunConfig {
            problem: problem.id(),
            pop: 100 * d,
            max_fe: 5000 * d as u64,
            epsilon: 0.1,
            seed: 0,
            mode: RunMode::Full,
            sbx_eta: 20.0,
            pm_eta: 20.0,
            pm_rate: 1.0 / d as f64,
            ref_points: 500,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop < 4 || !self.pop.is_multiple_of(2) {
            return Err(ConfigError::BadPopulation(self.pop));
        }
        if self.max_fe < 2 * self.pop as u64 {
            return Err(ConfigError::BudgetTooSmall {
                max_fe: self.max_fe,
                needed: 2 * self.pop as u64,
            });
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(ConfigError::BadEpsilon(self.epsilon));
        }
        if !self.sbx_eta.is_finite()
            || self.sbx_eta <= 0.0
            || !self.pm_eta.is_finite()
            || self.pm_eta <= 0.0
        {
            return Err(ConfigError::BadEta);
        }
        if !(0.0..=1.0).contains(&self.pm_rate) {
            return Err(ConfigError::BadRate(self.pm_rate));
        }
        if self.ref_points < 2 {
            return Err(ConfigError::BadRefPoints(self.ref_points));
        }
        Ok(())
    }

    /// Offspring evaluated per generation: N/2 from the convergence parents
    /// plus N from the diversity parents.
    pub fn per_generation_fe(&self) -> u64 {
        3 * (self.pop as u64 / 2)
    }

    /// Generation count implied by the budget: initialization costs 2N and
    /// each generation 3N/2; termination is by budget, so the schedule
    /// length is derived once up front.
    pub fn generations(&self) -> u64 {
        (self.max_fe - 2 * self.pop as u64) / self.per_generation_fe()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    BadPopulation(usize),
    BudgetTooSmall { max_fe: u64, needed: u64 },
    BadEpsilon(f64),
    BadEta,
    BadRate(f64),
    BadRefPoints(usize),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::BadPopulation(n) => {
                write!(f, "population size {n} must be even and >= 4")
            }
            ConfigError::BudgetTooSmall { max_fe, needed } => {
                write!(f, "budget {max_fe} below the 2N = {needed} needed for initialization")
            }
            ConfigError::BadEpsilon(e) => write!(f, "epsilon {e} must be >= 0"),
            ConfigError::BadEta => write!(f, "distribution indices must be > 0"),
            ConfigError::BadRate(r) => write!(f, "pm_rate {r} must lie in [0, 1]"),
            ConfigError::BadRefPoints(k) => write!(f, "ref_points {k} must be >= 2"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Budgeted evaluation front-end. All objective evaluations of a run flow
/// through one `Evaluator`, so the count it holds is the run's true cost.
pub struct Evaluator<'a> {
    problem: &'a dyn Problem,
    used: u64,
    max_fe: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a dyn Problem, max_fe: u64) -> Self {
        Evaluator { problem, used: 0, max_fe }
    }

    pub fn problem(&self) -> &'a dyn Problem {
        self.problem
    }

    /// Evaluates `x`, consuming one unit of budget, or returns `None` with
    /// the budget untouched when it is exhausted.
    pub fn try_evaluate(&mut self, x: Vec<f64>) -> Option<Solution> {
        if self.used >= self.max_fe {
            return None;
        }
        check_in_bounds(self.problem, &x);
        let f = self.problem.eval(&x);
        debug_assert_eq!(f.len(), self.problem.objectives());
        self.used += 1;
        Some(Solution { x, f })
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_fe - self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct UnitBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
    }

    impl UnitBox {
        fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
            UnitBox { lo, hi }
        }
    }

    impl Problem for UnitBox {
        fn id(&self) -> String {
            "unitbox".into()
        }
        fn dims(&self) -> usize {
            self.lo.len()
        }
        fn objectives(&self) -> usize {
            1
        }
        fn lower(&self) -> &[f64] {
            &self.lo
        }
        fn upper(&self) -> &[f64] {
            &self.hi
        }
        fn eval(&self, x: &[f64]) -> Vec<f64> {
            vec![x.iter().sum()]
        }
        fn sample_ps(&self, _k: usize, _which: RefSelect) -> Vec<RefPoint> {
            Vec::new()
        }
    }

    #[test]
    fn clamp_identity_on_feasible() {
        let p = UnitBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert_eq!(clamp_to_bounds(&p, vec![0.5, 0.5]), vec![0.5, 0.5]);
    }

    #[test]
    fn clamp_projects_out_of_box() {
        let p = UnitBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert_eq!(clamp_to_bounds(&p, vec![-0.2, 1.3]), vec![0.0, 1.0]);
    }

    #[test]
    fn clamp_boundary_fixed_point() {
        let p = UnitBox::new(vec![-1.0], vec![1.0]);
        assert_eq!(clamp_to_bounds(&p, vec![-1.0]), vec![-1.0]);
    }

    #[test]
    fn evaluator_counts_and_stops() {
        let p = UnitBox::new(vec![0.0], vec![1.0]);
        let mut ev = Evaluator::new(&p, 3);
        assert!(ev.try_evaluate(vec![0.1]).is_some());
        assert!(ev.try_evaluate(vec![0.2]).is_some());
        assert!(ev.try_evaluate(vec![0.3]).is_some());
        assert_eq!(ev.used(), 3);
        assert!(ev.try_evaluate(vec![0.4]).is_none());
        assert_eq!(ev.used(), 3);
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn evaluator_rejects_out_of_bounds() {
        let p = UnitBox::new(vec![0.0], vec![1.0]);
        let mut ev = Evaluator::new(&p, 10);
        let _ = ev.try_evaluate(vec![1.5]);
    }

    #[test]
    #[should_panic(expected = "wrong length")]
    fn evaluator_rejects_wrong_length() {
        let p = UnitBox::new(vec![0.0], vec![1.0]);
        let mut ev = Evaluator::new(&p, 10);
        let _ = ev.try_evaluate(vec![0.5, 0.5]);
    }

    #[test]
    fn config_validation() {
        let p = UnitBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut c = RunConfig::defaults_for(&p);
        assert_eq!(c.pop, 200);
        assert_eq!(c.max_fe, 10_000);
        assert!(c.validate().is_ok());
        c.pop = 5;
        assert!(matches!(c.validate(), Err(ConfigError::BadPopulation(5))));
        c.pop = 100;
        c.max_fe = 150;
        assert!(matches!(c.validate(), Err(ConfigError::BudgetTooSmall { .. })));
    }

    #[test]
    fn generation_count_matches_budget_split() {
        let p = UnitBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut c = RunConfig::defaults_for(&p);
        c.pop = 100;
        c.max_fe = 20_000;
        // 2N = 200 init, 150 per generation.
        assert_eq!(c.generations(), 132);
        assert_eq!(200 + 132 * 150, 20_000);
    }
}
