//! Parent selection and offspring generation: binary tournaments, simulated
//! binary crossover and polynomial mutation.

use crate::rng::RandomStream;
use crate::types::{Evaluator, Solution};

/// Operator parameters. Defaults follow the operators' usual settings:
/// eta_c = eta_m = 20, crossover always applied, mutation rate 1/D.
#[derive(Debug, Clone, Copy)]
pub struct VariationParams {
    pub sbx_eta: f64,
    pub pm_eta: f64,
    pub sbx_rate: f64,
    pub pm_rate: f64,
}

impl VariationParams {
    pub fn new(sbx_eta: f64, pm_eta: f64, sbx_rate: f64, pm_rate: f64) -> Self {
        assert!(sbx_eta > 0.0 && pm_eta > 0.0, "distribution indices must be > 0");
        assert!((0.0..=1.0).contains(&sbx_rate), "sbx_rate must lie in [0,1]");
        assert!((0.0..=1.0).contains(&pm_rate), "pm_rate must lie in [0,1]");
        VariationParams { sbx_eta, pm_eta, sbx_rate, pm_rate }
    }

    pub fn default_for_dims(d: usize) -> Self {
        Self::new(20.0, 20.0, 1.0, 1.0 / d as f64)
    }
}

/// Which end of the fitness scale wins a tournament.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Better {
    Smaller,
    Larger,
}

/// `k` draws by size-2 tournaments with replacement. Per draw the stream is
/// consumed as: first index, second index, then one coin iff the fitnesses
/// tie exactly.
pub fn tournament_select(
    members: &[Solution],
    fitness: &[f64],
    k: usize,
    better: Better,
    rng: &mut RandomStream,
) -> Vec<Solution> {
    assert!(!members.is_empty(), "tournament over an empty pool");
    assert_eq!(members.len(), fitness.len(), "fitness must align with members");
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let a = rng.index(members.len());
        let b = rng.index(members.len());
        let win = if fitness[a] == fitness[b] {
            if rng.coin() {
                a
            } else {
                b
            }
        } else {
            let a_wins = match better {
                Better::Smaller => fitness[a] < fitness[b],
                Better::Larger => fitness[a] > fitness[b],
            };
            if a_wins {
                a
            } else {
                b
            }
        };
        out.push(members[win].clone());
    }
    out
}

fn sbx_beta(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// Simulated binary crossover. One whole-pair coin against `sbx_rate`, then
/// per variable a 0.5 coin decides whether that variable crosses. Children
/// are symmetric around the parents' mean before clamping; equal parents
/// always reproduce themselves exactly.
pub fn sbx_crossover(
    pa: &[f64],
    pb: &[f64],
    params: &VariationParams,
    lower: &[f64],
    upper: &[f64],
    rng: &mut RandomStream,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(pa.len(), pb.len(), "parents differ in length");
    let d = pa.len();
    let mut c1 = pa.to_vec();
    let mut c2 = pb.to_vec();
    if rng.next_f64() <= params.sbx_rate {
        for k in 0..d {
            if rng.next_f64() <= 0.5 {
                let beta = sbx_beta(rng.next_f64(), params.sbx_eta);
                let sum = pa[k] + pb[k];
                let diff = pb[k] - pa[k];
                c1[k] = 0.5 * (sum - beta * diff);
                c2[k] = 0.5 * (sum + beta * diff);
            }
        }
    }
    for k in 0..d {
        c1[k] = c1[k].clamp(lower[k], upper[k]);
        c2[k] = c2[k].clamp(lower[k], upper[k]);
    }
    (c1, c2)
}

/// Bounded polynomial mutation: each variable perturbed with probability
/// `pm_rate`, the perturbation scaled by the variable's range and shaped so
/// its support stays inside the box.
pub fn polynomial_mutation(
    p: &[f64],
    params: &VariationParams,
    lower: &[f64],
    upper: &[f64],
    rng: &mut RandomStream,
) -> Vec<f64> {
    let mut out = p.to_vec();
    for k in 0..out.len() {
        if rng.next_f64() >= params.pm_rate {
            continue;
        }
        let (lo, hi) = (lower[k], upper[k]);
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        let u = rng.next_f64();
        let x = out[k];
        let d1 = (x - lo) / span;
        let d2 = (hi - x) / span;
        let pow = 1.0 / (params.pm_eta + 1.0);
        let dq = if u <= 0.5 {
            let b = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(params.pm_eta + 1.0);
            b.powf(pow) - 1.0
        } else {
            let b = 2.0 * (1.0 - u) + (2.0 * u - 1.0) * (1.0 - d2).powf(params.pm_eta + 1.0);
            1.0 - b.powf(pow)
        };
        out[k] = (x + dq * span).clamp(lo, hi);
    }
    out
}

/// Pairs consecutive parents, applies SBX then mutation to both children,
/// and evaluates them; an odd leftover parent is mutated only. Returns the
/// offspring plus a flag set when the budget ran out mid-batch, in which
/// case the batch is truncated at the budget.
pub fn make_offspring(
    parents: &[Solution],
    params: &VariationParams,
    evaluator: &mut Evaluator<'_>,
    rng: &mut RandomStream,
) -> (Vec<Solution>, bool) {
    let lower = evaluator.problem().lower().to_vec();
    let upper = evaluator.problem().upper().to_vec();
    let mut out = Vec::with_capacity(parents.len());
    let mut chunks = parents.chunks_exact(2);
    for pair in &mut chunks {
        let (c1, c2) = sbx_crossover(&pair[0].x, &pair[1].x, params, &lower, &upper, rng);
        for child in [c1, c2] {
            let mutated = polynomial_mutation(&child, params, &lower, &upper, rng);
            match evaluator.try_evaluate(mutated) {
                Some(s) => out.push(s),
                None => return (out, true),
            }
        }
    }
    if let [leftover] = chunks.remainder() {
        let mutated = polynomial_mutation(&leftover.x, params, &lower, &upper, rng);
        match evaluator.try_evaluate(mutated) {
            Some(s) => out.push(s),
            None => return (out, true),
        }
    }
    (out, false)
}
