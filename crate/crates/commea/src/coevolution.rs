//! The two-archive coevolution engine.
//!
//! A convergence archive (CA) under SPEA2-style convergence-first selection
//! pulls the population toward the true front; a diversity archive (DA)
//! keeps every solution inside a shrinking epsilon band of the current
//! front, prunes locally dominated ones with the local convergence
//! indicator, and spreads the rest by crowding. The archives coevolve by
//! sharing offspring: both environmental selections see the children of
//! both parent pools every generation.

use crate::dominance::{eps_band_retain_indices, nd_sort, spea2_fitness};
use crate::metrics::{igd, igdx, ReferenceSet};
use crate::niching::{
    build_neighbor_graph, crowd_dis, crowd_dis_from_kappa, crowding,
    local_convergence_indicator, truncate_by_crowding, CrowdSpace,
};
use crate::problems::{normalized_reference, sample_reference};
use crate::record::{RunRecord, SetMatrices, TraceFrame, SCHEMA_VERSION};
use crate::rng::RandomStream;
use crate::types::{
    normalize_decision, Archive, Evaluator, Problem, RefSelect, RunConfig, RunMode, Solution,
};
use crate::variation::{make_offspring, tournament_select, Better, VariationParams};

/// Space for the diversity archive's final crowding truncation.
const DA_TRUNCATION_SPACE: CrowdSpace = CrowdSpace::Combined;

/// Generation-indexed epsilon controller: wide early, narrowing to the
/// user's epsilon by halfway through the run and constant afterwards.
#[derive(Debug, Clone, Copy)]
pub struct EpsSchedule {
    pub user_eps: f64,
    pub max_gen: u64,
}

impl EpsSchedule {
    pub fn new(user_eps: f64, max_gen: u64) -> Self {
        assert!(user_eps >= 0.0, "epsilon must be >= 0");
        EpsSchedule { user_eps, max_gen }
    }

    /// `eps_i = max(log2(G/i), eps)`: non-increasing in `i`, equal to the
    /// user epsilon from generation `G * 2^-eps` onwards and exactly at the
    /// final generation.
    pub fn eps_at(&self, gen: u64) -> f64 {
        assert!(gen >= 1, "generations are 1-indexed");
        assert!(gen <= self.max_gen, "generation {gen} beyond schedule end {}", self.max_gen);
        let decay = (self.max_gen as f64 / gen as f64).log2();
        decay.max(self.user_eps)
    }
}

/// Environmental selection for the convergence archive: SPEA2 fitness on
/// the joint set, then either the best `n` by (fitness, crowding
/// pseudo-distance) when the non-dominated set is small, or crowding
/// truncation of the non-dominated set in the given space.
///
/// The full algorithm truncates over normalized decision vectors, which is
/// what lets this archive hold several equivalent Pareto sets at once; the
/// ablation baseline truncates in objective space like a plain
/// convergence-first optimizer. Returns the refilled archive (fitness
/// recomputed on it) plus a flag set when the joint set could not fill the
/// archive.
pub fn env_select_ca(
    ca: &Archive,
    off_c: &[Solution],
    off_d: &[Solution],
    n: usize,
    lower: &[f64],
    upper: &[f64],
    space: CrowdSpace,
) -> (Archive, bool) {
    let mut joint: Vec<Solution> = Vec::with_capacity(ca.len() + off_c.len() + off_d.len());
    joint.extend(ca.members.iter().cloned());
    joint.extend(off_c.iter().cloned());
    joint.extend(off_d.iter().cloned());
    assert!(!joint.is_empty(), "joint archive is empty");

    let selected: Vec<Solution> = if joint.len() <= n {
        joint
    } else {
        let fitness = spea2_fitness(&joint);
        let nd_count = fitness.iter().filter(|&&v| v < 1.0).count();
        if nd_count < n {
            let kappa = crowding(&joint, lower, upper, space);
            let dis = crowd_dis_from_kappa(&kappa);
            let mut order: Vec<usize> = (0..joint.len()).collect();
            order.sort_by(|&a, &b| {
                fitness[a]
                    .total_cmp(&fitness[b])
                    .then(dis[b].total_cmp(&dis[a]))
                    .then(a.cmp(&b))
            });
            order[..n].iter().map(|&i| joint[i].clone()).collect()
        } else {
            let nd: Vec<Solution> = joint
                .iter()
                .zip(&fitness)
                .filter(|(_, &fit)| fit < 1.0)
                .map(|(s, _)| s.clone())
                .collect();
            let kept = truncate_by_crowding(&nd, n, lower, upper, space);
            kept.into_iter().map(|i| nd[i].clone()).collect()
        }
    };
    let undersized = selected.len() < n;
    let fitness = spea2_fitness(&selected);
    (Archive::new(selected, n, fitness), undersized)
}

fn diversity_fitness(members: &[Solution], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    if members.len() < 2 {
        return vec![f64::INFINITY; members.len()];
    }
    crowd_dis(members, lower, upper, CrowdSpace::Decision)
}

/// Environmental selection for the diversity archive.
///
/// Step 1: keep the epsilon band of the joint set around its global front.
/// Step 2: build the niche graph over the band and keep the locally
/// non-dominated solutions (zero local convergence indicator).
/// Step 3: fill by ascending indicator when short of `n`, otherwise
/// truncate by combined decision/objective crowding. Fitness is the
/// decision-space crowding pseudo-distance of the final archive.
pub fn env_select_da(
    da: &Archive,
    off_c: &[Solution],
    off_d: &[Solution],
    n: usize,
    eps_i: f64,
    lower: &[f64],
    upper: &[f64],
) -> (Archive, bool) {
    let mut joint: Vec<Solution> = Vec::with_capacity(da.len() + off_c.len() + off_d.len());
    joint.extend(da.members.iter().cloned());
    joint.extend(off_c.iter().cloned());
    joint.extend(off_d.iter().cloned());
    assert!(!joint.is_empty(), "joint archive is empty");

    let fronts = nd_sort(&joint);
    let front_idx: Vec<usize> =
        (0..joint.len()).filter(|&i| fronts[i] == 1).collect();
    let band_idx = eps_band_retain_indices(&joint, &front_idx, eps_i);

    let selected: Vec<Solution> = if band_idx.len() < n {
        // Degenerate band: keep all of it, then fill with the best joint
        // members by local convergence computed over the whole joint set.
        let norm: Vec<Vec<f64>> = joint
            .iter()
            .map(|s| normalize_decision(lower, upper, &s.x))
            .collect();
        let graph = build_neighbor_graph(&norm);
        let ilc = local_convergence_indicator(&joint, &graph);
        let in_band = |i: usize| band_idx.binary_search(&i).is_ok();
        let mut rest: Vec<usize> = (0..joint.len()).filter(|&i| !in_band(i)).collect();
        rest.sort_by(|&a, &b| ilc[a].total_cmp(&ilc[b]).then(a.cmp(&b)));
        let mut out: Vec<Solution> = band_idx.iter().map(|&i| joint[i].clone()).collect();
        for &i in rest.iter().take(n - out.len()) {
            out.push(joint[i].clone());
        }
        out
    } else {
        let band: Vec<Solution> = band_idx.iter().map(|&i| joint[i].clone()).collect();
        let norm: Vec<Vec<f64>> = band
            .iter()
            .map(|s| normalize_decision(lower, upper, &s.x))
            .collect();
        let graph = build_neighbor_graph(&norm);
        let ilc = local_convergence_indicator(&band, &graph);
        let local_nd: Vec<usize> = (0..band.len()).filter(|&i| ilc[i] == 0.0).collect();
        if local_nd.len() < n {
            let mut order: Vec<usize> = (0..band.len()).collect();
            order.sort_by(|&a, &b| ilc[a].total_cmp(&ilc[b]).then(a.cmp(&b)));
            order[..n].iter().map(|&i| band[i].clone()).collect()
        } else {
            let pool: Vec<Solution> = local_nd.iter().map(|&i| band[i].clone()).collect();
            let kept = truncate_by_crowding(&pool, n, lower, upper, DA_TRUNCATION_SPACE);
            kept.into_iter().map(|i| pool[i].clone()).collect()
        }
    };
    let undersized = selected.len() < n;
    let fitness = diversity_fitness(&selected, lower, upper);
    (Archive::new(selected, n, fitness), undersized)
}

/// One run's live state: both archives, the schedule, the budgeted
/// evaluator and the random stream. Stepping is strictly single-threaded
/// and deterministic; the whole state can move between threads between
/// generations.
pub struct Engine<'a> {
    problem: &'a dyn Problem,
    config: RunConfig,
    params: VariationParams,
    schedule: EpsSchedule,
    evaluator: Evaluator<'a>,
    rng: RandomStream,
    ca: Archive,
    da: Option<Archive>,
    gen: u64,
    undersized: bool,
    reference: ReferenceSet,
    reference_norm: ReferenceSet,
    trace: Option<Vec<TraceFrame>>,
}

impl<'a> Engine<'a> {
    pub fn new(config: RunConfig, problem: &'a dyn Problem) -> Self {
        config.validate().expect("invalid run configuration");
        let n = config.pop;
        let params =
            VariationParams::new(config.sbx_eta, config.pm_eta, 1.0, config.pm_rate);
        let schedule = EpsSchedule::new(config.epsilon, config.generations());
        let mut rng = RandomStream::seed_from_u64(config.seed);
        let mut evaluator = Evaluator::new(problem, config.max_fe);

        let draw_pool = |rng: &mut RandomStream, ev: &mut Evaluator<'a>| -> Vec<Solution> {
            (0..n)
                .map(|_| {
                    let x: Vec<f64> = (0..problem.dims())
                        .map(|k| rng.uniform(problem.lower()[k], problem.upper()[k]))
                        .collect();
                    ev.try_evaluate(x).expect("initialization exceeds budget")
                })
                .collect()
        };
        // Both archives are seeded the same way: n uniform samples each,
        // drawn independently (2n evaluations).
        let pool_a = draw_pool(&mut rng, &mut evaluator);
        let pool_b = draw_pool(&mut rng, &mut evaluator);

        let (lower, upper) = (problem.lower(), problem.upper());
        let (ca, da) = match config.mode {
            RunMode::Full => {
                let fit_c = spea2_fitness(&pool_a);
                let fit_d = diversity_fitness(&pool_b, lower, upper);
                (
                    Archive::new(pool_a, n, fit_c),
                    Some(Archive::new(pool_b, n, fit_d)),
                )
            }
            RunMode::CaOnly => {
                // The ablation spends the same initialization budget; the
                // second pool merges into the archive through one
                // environmental selection.
                let fit_c = spea2_fitness(&pool_a);
                let seed = Archive::new(pool_a, n, fit_c);
                let (ca, _) =
                    env_select_ca(&seed, &pool_b, &[], n, lower, upper, CrowdSpace::Objective);
                (ca, None)
            }
        };

        let which = if config.epsilon > 0.0 && problem.has_local_ps() {
            RefSelect::GlobalAndLocal
        } else {
            RefSelect::Global
        };
        let reference = sample_reference(problem, config.ref_points, which);
        let reference_norm = normalized_reference(problem, &reference);
        let trace = config.trace.then(Vec::new);

        Engine {
            problem,
            config,
            params,
            schedule,
            evaluator,
            rng,
            ca,
            da,
            gen: 0,
            undersized: false,
            reference,
            reference_norm,
            trace,
        }
    }

    pub fn planned_generations(&self) -> u64 {
        self.schedule.max_gen
    }

    pub fn completed_generations(&self) -> u64 {
        self.gen
    }

    pub fn fe_used(&self) -> u64 {
        self.evaluator.used()
    }

    pub fn ca(&self) -> &Archive {
        &self.ca
    }

    pub fn da(&self) -> Option<&Archive> {
        self.da.as_ref()
    }

    /// The set reported as the run's answer: DA, or CA in the ablation.
    pub fn answer_members(&self) -> &[Solution] {
        match &self.da {
            Some(da) => &da.members,
            None => &self.ca.members,
        }
    }

    /// Runs one generation. Returns `false` once the budget allows no more.
    pub fn step(&mut self) -> bool {
        if self.gen >= self.schedule.max_gen {
            return false;
        }
        let n = self.config.pop;
        let (lower, upper) = (self.problem.lower(), self.problem.upper());
        let i = self.gen + 1;
        let eps_i = self.schedule.eps_at(i);

        let parents_c = tournament_select(
            &self.ca.members,
            &self.ca.fitness,
            n / 2,
            Better::Smaller,
            &mut self.rng,
        );
        let parents_d = match &self.da {
            Some(da) => {
                tournament_select(&da.members, &da.fitness, n, Better::Larger, &mut self.rng)
            }
            None => {
                // Ablation: a plain convergence-first optimizer. The second
                // parent pool is drawn from CA by the same fitness as the
                // first, just keeping the offspring count per generation
                // identical to the full algorithm.
                tournament_select(
                    &self.ca.members,
                    &self.ca.fitness,
                    n,
                    Better::Smaller,
                    &mut self.rng,
                )
            }
        };

        let (off_c, short_c) =
            make_offspring(&parents_c, &self.params, &mut self.evaluator, &mut self.rng);
        let (off_d, short_d) =
            make_offspring(&parents_d, &self.params, &mut self.evaluator, &mut self.rng);
        assert!(
            !short_c && !short_d,
            "budget cannot run out inside a scheduled generation"
        );

        let ca_space = match self.config.mode {
            RunMode::Full => CrowdSpace::Decision,
            RunMode::CaOnly => CrowdSpace::Objective,
        };
        let (ca, under_c) =
            env_select_ca(&self.ca, &off_c, &off_d, n, lower, upper, ca_space);
        self.ca = ca;
        self.undersized |= under_c;
        if self.da.is_some() {
            let (da, under_d) = env_select_da(
                self.da.as_ref().unwrap(),
                &off_c,
                &off_d,
                n,
                eps_i,
                lower,
                upper,
            );
            self.da = Some(da);
            self.undersized |= under_d;
        }
        self.gen = i;

        if self.trace.is_some() {
            let (igd_now, igdx_now) = self.answer_metrics();
            let frame = TraceFrame {
                gen: i,
                eps: eps_i,
                ca: SetMatrices::from_solutions(&self.ca.members),
                da: self
                    .da
                    .as_ref()
                    .map(|da| SetMatrices::from_solutions(&da.members)),
                igd: igd_now,
                igdx: igdx_now,
            };
            if let Some(trace) = self.trace.as_mut() {
                trace.push(frame);
            }
        }
        self.gen < self.schedule.max_gen
    }

    fn answer_metrics(&self) -> (f64, f64) {
        let members = self.answer_members();
        let objs: Vec<Vec<f64>> = members.iter().map(|s| s.f.clone()).collect();
        let decs: Vec<Vec<f64>> = members
            .iter()
            .map(|s| normalize_decision(self.problem.lower(), self.problem.upper(), &s.x))
            .collect();
        (igd(&objs, &self.reference), igdx(&decs, &self.reference_norm))
    }

    pub fn run_to_end(&mut self) {
        while self.step() {}
    }

    pub fn into_record(self) -> RunRecord {
        let expected = 2 * self.config.pop as u64 + self.gen * self.config.per_generation_fe();
        assert_eq!(
            self.evaluator.used(),
            expected,
            "evaluation accounting drifted"
        );
        assert!(self.evaluator.used() <= self.config.max_fe);
        let (final_igd, final_igdx) = self.answer_metrics();
        RunRecord {
            schema_version: SCHEMA_VERSION.into(),
            problem: self.problem.id(),
            fe_used: self.evaluator.used(),
            generations: self.gen,
            ablation: self.config.mode == RunMode::CaOnly,
            undersized: self.undersized,
            init_only: self.schedule.max_gen == 0,
            final_ca: SetMatrices::from_solutions(&self.ca.members),
            final_da: self
                .da
                .as_ref()
                .map(|da| SetMatrices::from_solutions(&da.members)),
            final_igd,
            final_igdx,
            trace: self.trace,
            config: self.config,
        }
    }
}

/// Executes one seeded run to its budget and returns the record.
pub fn run(config: &RunConfig, problem: &dyn Problem) -> RunRecord {
    let mut engine = Engine::new(config.clone(), problem);
    engine.run_to_end();
    engine.into_record()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{DualDepth, SineMirror};

    #[test]
    fn schedule_examples() {
        let s = EpsSchedule::new(1.0, 100);
        assert_eq!(s.eps_at(50), 1.0);
        for i in 50..=100 {
            assert_eq!(s.eps_at(i), 1.0);
        }
        assert_eq!(s.eps_at(100), 1.0);
        let s = EpsSchedule::new(0.1, 64);
        // i/G = 0.25 -> log2(4) = 2
        assert_eq!(s.eps_at(16), 2.0);
        assert_eq!(s.eps_at(64), 0.1);
        // non-increasing
        let mut last = f64::INFINITY;
        for i in 1..=64 {
            let e = s.eps_at(i);
            assert!(e <= last);
            last = e;
        }
    }

    #[test]
    #[should_panic(expected = "1-indexed")]
    fn schedule_rejects_generation_zero() {
        EpsSchedule::new(0.1, 10).eps_at(0);
    }

    fn sol(x: &[f64], f: &[f64]) -> Solution {
        Solution { x: x.to_vec(), f: f.to_vec() }
    }

    #[test]
    fn ca_selection_keeps_nondominated_over_dominated() {
        // n non-dominated + n dominated: the dominated ones all go.
        let n = 4;
        let nd: Vec<Solution> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                sol(&[t, 0.0], &[t, 1.0 - t])
            })
            .collect();
        let dominated: Vec<Solution> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                sol(&[t, 0.5], &[t + 1.0, 2.0 - t])
            })
            .collect();
        let archive = Archive::new(nd.clone(), n, spea2_fitness(&nd));
        let (out, undersized) =
            env_select_ca(&archive, &dominated, &[], n, &[0.0, 0.0], &[1.0, 1.0], CrowdSpace::Decision);
        assert!(!undersized);
        assert_eq!(out.len(), n);
        for s in &out.members {
            assert!(nd.contains(s));
        }
        // identity when the joint set is exactly n mutually non-dominated
        let (out, _) = env_select_ca(&archive, &[], &[], n, &[0.0, 0.0], &[1.0, 1.0], CrowdSpace::Decision);
        assert_eq!(out.members, nd);
    }

    #[test]
    fn ca_truncation_keeps_isolated_points() {
        // 8 mutually non-dominated members: a tight cluster plus isolated
        // outliers. Truncating to 4 must retain every isolated point; an
        // exhaustive scan confirms the kept subset is the best-spread one.
        let mut pop = Vec::new();
        for i in 0..6 {
            let t = 0.40 + 0.004 * i as f64; // cluster
            pop.push(sol(&[t, 0.5], &[t, 1.0 - t]));
        }
        pop.push(sol(&[0.05, 0.5], &[0.05, 0.95])); // isolated
        pop.push(sol(&[0.95, 0.5], &[0.95, 0.05])); // isolated
        let n = 4;
        let archive = Archive::new(pop.clone(), n, spea2_fitness(&pop));
        let (out, _) = env_select_ca(
            &archive,
            &[],
            &[],
            n,
            &[0.0, 0.0],
            &[1.0, 1.0],
            CrowdSpace::Decision,
        );
        assert!(out.members.contains(&pop[6]));
        assert!(out.members.contains(&pop[7]));

        let min_pairwise = |idx: &[usize]| -> f64 {
            let mut best = f64::INFINITY;
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    let d = (pop[i].x[0] - pop[j].x[0]).abs();
                    best = best.min(d);
                }
            }
            best
        };
        // exhaustive best-spread 4-subset
        let mut best_spread = 0.0f64;
        for a in 0..8 {
            for b in a + 1..8 {
                for c in b + 1..8 {
                    for d in c + 1..8 {
                        best_spread = best_spread.max(min_pairwise(&[a, b, c, d]));
                    }
                }
            }
        }
        let kept: Vec<usize> = (0..8)
            .filter(|&i| out.members.contains(&pop[i]))
            .collect();
        assert_eq!(min_pairwise(&kept), best_spread);
    }

    #[test]
    fn da_degenerate_band_fills_by_local_convergence() {
        // One member sits at the ideal in both objectives, so it
        // eps-dominates every strictly worse member at any eps: the band
        // collapses below n and the archive refills by ascending local
        // convergence over the whole joint set.
        let mut joint = vec![sol(&[0.5, 0.5], &[0.0, 0.0])];
        for i in 1..6 {
            let t = i as f64 / 10.0;
            joint.push(sol(&[t, t], &[t, t]));
        }
        let n = 3;
        let archive = Archive::new(joint.clone(), n, vec![0.0; joint.len()]);
        let (out, undersized) =
            env_select_da(&archive, &[], &[], n, 0.5, &[0.0, 0.0], &[1.0, 1.0]);
        assert!(!undersized);
        assert_eq!(out.len(), n);
        // the ideal member survives, and the fill prefers the least
        // locally-dominated members (the chain makes later members worse)
        assert!(out.members.contains(&joint[0]));
        assert!(out.members.contains(&joint[1]));
    }

    #[test]
    fn ca_selection_flags_undersized_joint() {
        let members = vec![sol(&[0.2, 0.2], &[0.2, 0.8])];
        let archive = Archive::new(members.clone(), 1, vec![0.5]);
        let (out, undersized) =
            env_select_ca(&archive, &[], &[], 8, &[0.0, 0.0], &[1.0, 1.0], CrowdSpace::Decision);
        assert!(undersized);
        assert_eq!(out.members, members);
    }

    #[test]
    fn da_selection_reduces_to_crowding_when_all_nondominated() {
        // Mutually non-dominated points on a line, all inside any band.
        let pop: Vec<Solution> = (0..8)
            .map(|i| {
                let t = i as f64 / 7.0;
                sol(&[t, t], &[t, 1.0 - t])
            })
            .collect();
        let n = 5;
        let archive = Archive::new(pop.clone(), n, vec![0.0; pop.len()]);
        let (out, _) = env_select_da(&archive, &[], &[], n, 0.3, &[0.0, 0.0], &[1.0, 1.0]);
        let kept = truncate_by_crowding(&pop, n, &[0.0, 0.0], &[1.0, 1.0], DA_TRUNCATION_SPACE);
        let expect: Vec<Solution> = kept.into_iter().map(|i| pop[i].clone()).collect();
        assert_eq!(out.members, expect);
    }

    /// Brute-force restatement of the diversity selection used as an
    /// independent oracle on constructed populations.
    fn naive_da_pipeline(
        joint: &[Solution],
        n: usize,
        eps: f64,
        lower: &[f64],
        upper: &[f64],
    ) -> Vec<Solution> {
        use crate::dominance::{eps_dominates, pareto_dominates, EpsContext};
        let ctx = EpsContext::from_solutions(joint);
        let front: Vec<usize> = (0..joint.len())
            .filter(|&i| {
                !(0..joint.len()).any(|j| pareto_dominates(&joint[j].f, &joint[i].f))
            })
            .collect();
        let band: Vec<usize> = (0..joint.len())
            .filter(|&q| {
                !front
                    .iter()
                    .any(|&p| eps_dominates(&joint[p].f, &joint[q].f, eps, &ctx))
            })
            .collect();
        let pts: Vec<Vec<f64>> = band
            .iter()
            .map(|&i| normalize_decision(lower, upper, &joint[i].x))
            .collect();
        let radius = crate::niching::niche_radius(&pts);
        let graph = crate::niching::build_neighbor_graph_with_radius(&pts, radius);
        let band_sols: Vec<Solution> = band.iter().map(|&i| joint[i].clone()).collect();
        let ilc = local_convergence_indicator(&band_sols, &graph);
        let local_nd: Vec<usize> = (0..band.len()).filter(|&i| ilc[i] == 0.0).collect();
        if local_nd.len() < n {
            let mut order: Vec<usize> = (0..band.len()).collect();
            order.sort_by(|&a, &b| ilc[a].total_cmp(&ilc[b]).then(a.cmp(&b)));
            order[..n.min(band.len())]
                .iter()
                .map(|&i| band_sols[i].clone())
                .collect()
        } else {
            let pool: Vec<Solution> = local_nd.iter().map(|&i| band_sols[i].clone()).collect();
            let kept = truncate_by_crowding(&pool, n, lower, upper, DA_TRUNCATION_SPACE);
            kept.into_iter().map(|i| pool[i].clone()).collect()
        }
    }

    /// 200-point constructed population on the dual-depth landscape: both
    /// optimum lines plus basin interior points.
    fn dual_depth_population(problem: &DualDepth) -> Vec<Solution> {
        let mut pop = Vec::new();
        for i in 0..100 {
            let t = i as f64 / 99.0;
            let x = vec![t, 0.25];
            let f = problem.eval(&x);
            pop.push(Solution { x, f });
        }
        for i in 0..60 {
            let t = i as f64 / 59.0;
            let x = vec![t, 0.75];
            let f = problem.eval(&x);
            pop.push(Solution { x, f });
        }
        for i in 0..40 {
            let t = i as f64 / 39.0;
            let x = vec![t, 0.40 + 0.2 * t];
            let f = problem.eval(&x);
            pop.push(Solution { x, f });
        }
        pop
    }

    #[test]
    fn da_selection_keeps_or_drops_local_branch_by_eps() {
        let problem = DualDepth::new(0.1);
        let joint = dual_depth_population(&problem);
        let n = 100;
        let archive = Archive::new(joint.clone(), n, vec![0.0; joint.len()]);
        let (lower, upper) = (problem.lower(), problem.upper());

        let local_members = |sols: &[Solution]| {
            sols.iter().filter(|s| (s.x[1] - 0.75).abs() <= 0.05).count()
        };

        let (wide, _) = env_select_da(&archive, &[], &[], n, 0.3, lower, upper);
        assert!(local_members(&wide.members) >= 10, "wide band should keep the local line");
        assert_eq!(wide.members, naive_da_pipeline(&joint, n, 0.3, lower, upper));

        let (tight, _) = env_select_da(&archive, &[], &[], n, 0.02, lower, upper);
        assert_eq!(local_members(&tight.members), 0, "tight band should drop the local line");
        assert_eq!(tight.members, naive_da_pipeline(&joint, n, 0.02, lower, upper));
    }

    #[test]
    fn engine_invariants_on_a_short_run() {
        let problem = SineMirror::new();
        let mut config = RunConfig::defaults_for(&problem);
        config.pop = 20;
        config.max_fe = 1000;
        config.seed = 5;
        let mut engine = Engine::new(config.clone(), &problem);
        assert_eq!(engine.planned_generations(), (1000 - 40) / 30);
        while engine.step() {
            assert_eq!(engine.ca().len(), 20);
            assert_eq!(engine.da().unwrap().len(), 20);
        }
        let record = engine.into_record();
        assert_eq!(record.fe_used, 40 + record.generations * 30);
        assert!(record.fe_used <= 1000);
        assert!(!record.ablation);
        assert_eq!(record.final_da.as_ref().unwrap().len(), 20);
    }

    #[test]
    fn identical_configs_reproduce_records_exactly() {
        let problem = SineMirror::new();
        let mut config = RunConfig::defaults_for(&problem);
        config.pop = 16;
        config.max_fe = 600;
        config.seed = 11;
        config.trace = true;
        let a = run(&config, &problem);
        let b = run(&config, &problem);
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn ablation_mode_has_no_diversity_archive() {
        let problem = SineMirror::new();
        let mut config = RunConfig::defaults_for(&problem);
        config.pop = 16;
        config.max_fe = 600;
        config.mode = RunMode::CaOnly;
        let record = run(&config, &problem);
        assert!(record.ablation);
        assert!(record.final_da.is_none());
        assert_eq!(record.final_ca.len(), 16);
        assert_eq!(record.fe_used, 32 + record.generations * 24);
    }

    #[test]
    fn budget_too_small_for_a_generation_returns_initialized_archives() {
        let problem = SineMirror::new();
        let mut config = RunConfig::defaults_for(&problem);
        config.pop = 20;
        config.max_fe = 41; // below 2N + 3N/2
        let record = run(&config, &problem);
        assert!(record.init_only);
        assert_eq!(record.generations, 0);
        assert_eq!(record.fe_used, 40);
        assert_eq!(record.final_ca.len(), 20);
    }

    #[test]
    fn ca_front_never_regresses_between_consecutive_generations() {
        // Selection admits a member only if it is non-dominated within the
        // previous joint set (or behind such members in the undersized
        // fill), so no archive member may dominate any front member of the
        // next generation. Capacity truncation can still drop regions, so
        // the guarantee is per step, not against arbitrarily old fronts.
        use crate::dominance::pareto_dominates;
        for (problem, eps) in [
            (Box::new(SineMirror::new()) as Box<dyn crate::types::Problem>, 0.1),
            (Box::new(DualDepth::new(0.1)), 0.3),
        ] {
            let mut config = RunConfig::defaults_for(problem.as_ref());
            config.pop = 20;
            config.max_fe = 2000;
            config.epsilon = eps;
            config.trace = true;
            config.seed = 3;
            let record = run(&config, problem.as_ref());
            let trace = record.trace.as_ref().unwrap();
            for pair in trace.windows(2) {
                let (prev, next) = (&pair[0].ca.f, &pair[1].ca.f);
                let next_front: Vec<&Vec<f64>> = next
                    .iter()
                    .filter(|f| !next.iter().any(|g| pareto_dominates(g, f)))
                    .collect();
                for earlier in prev {
                    for q in &next_front {
                        assert!(
                            !pareto_dominates(earlier, q),
                            "{}: gen {} member {earlier:?} dominates a front member \
                             {q:?} of gen {}",
                            problem.id(),
                            pair[0].gen,
                            pair[1].gen
                        );
                    }
                }
            }
            assert_eq!(
                &trace.last().unwrap().ca,
                &record.final_ca,
                "final CA is the last traced frame"
            );
        }
    }

    #[test]
    fn trace_epsilon_is_non_increasing_and_archives_full() {
        let problem = DualDepth::new(0.1);
        let mut config = RunConfig::defaults_for(&problem);
        config.pop = 16;
        config.max_fe = 1000;
        config.trace = true;
        config.epsilon = 0.3;
        let record = run(&config, &problem);
        let trace = record.trace.as_ref().unwrap();
        assert_eq!(trace.len() as u64, record.generations);
        let mut last = f64::INFINITY;
        for frame in trace {
            assert!(frame.eps <= last);
            last = frame.eps;
            assert_eq!(frame.ca.len(), 16);
            assert_eq!(frame.da.as_ref().unwrap().len(), 16);
            assert!(frame.igd.is_finite() && frame.igd >= 0.0);
            assert!(frame.igdx.is_finite() && frame.igdx >= 0.0);
        }
        assert_eq!(last, 0.3);
    }
}
