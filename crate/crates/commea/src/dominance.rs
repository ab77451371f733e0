//! Dominance kernels: Pareto dominance, the multiplicative epsilon band,
//! fast non-dominated sorting and SPEA2 fitness.
//!
//! The epsilon relation is evaluated on shifted objectives. Multiplicative
//! bands are scale- and sign-sensitive and need the positive orthant, so
//! each filter call translates the compared set so its ideal point maps to
//! the origin; the band around a front point then spans a true `(1+eps)`
//! factor of its shifted objectives.

use crate::types::Solution;

/// True iff `fa` is no worse than `fb` everywhere and strictly better
/// somewhere (minimization).
pub fn pareto_dominates(fa: &[f64], fb: &[f64]) -> bool {
    assert_eq!(fa.len(), fb.len(), "objective vectors differ in length");
    let mut strict = false;
    for (a, b) in fa.iter().zip(fb) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// Translation context making every compared objective non-negative: the
/// componentwise ideal of the set the context was built from maps to 0.
#[derive(Debug, Clone)]
pub struct EpsContext {
    pub ideal: Vec<f64>,
}

impl EpsContext {
    pub fn from_objectives<'a, I>(objectives: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = objectives.into_iter();
        let first = iter.next().expect("cannot build a context from an empty set");
        let mut ideal = first.to_vec();
        for f in iter {
            assert_eq!(f.len(), ideal.len());
            for (z, v) in ideal.iter_mut().zip(f) {
                if v < z {
                    *z = *v;
                }
            }
        }
        EpsContext { ideal }
    }

    pub fn from_solutions(pop: &[Solution]) -> Self {
        Self::from_objectives(pop.iter().map(|s| s.f.as_slice()))
    }

    /// Shifted objective: `f - ideal`, >= 0 for every member of the
    /// originating set.
    pub fn shift(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.ideal.len());
        f.iter().zip(&self.ideal).map(|(v, z)| v - z).collect()
    }
}

/// True iff `fq` lies beyond the `(1+eps)`-inflated image of `fp` in every
/// shifted coordinate, strictly in at least one. Strictness means a point
/// never eps-dominates itself, at any eps.
pub fn eps_dominates(fp: &[f64], fq: &[f64], eps: f64, ctx: &EpsContext) -> bool {
    assert!(eps >= 0.0, "eps must be non-negative");
    assert_eq!(fp.len(), fq.len());
    let sp = ctx.shift(fp);
    let sq = ctx.shift(fq);
    let mut strict = false;
    for (p, q) in sp.iter().zip(&sq) {
        let lhs = (1.0 + eps) * p;
        if lhs > *q {
            return false;
        }
        if lhs < *q {
            strict = true;
        }
    }
    strict
}

/// Members of `joint` (by index) not eps-dominated by any member of the
/// global front. The context is built from `joint`, so the result is the
/// strip between the front and its inflated image; front members are always
/// retained.
pub fn eps_band_retain_indices(joint: &[Solution], front: &[usize], eps: f64) -> Vec<usize> {
    if joint.is_empty() {
        return Vec::new();
    }
    let ctx = EpsContext::from_solutions(joint);
    (0..joint.len())
        .filter(|&q| {
            !front
                .iter()
                .any(|&p| eps_dominates(&joint[p].f, &joint[q].f, eps, &ctx))
        })
        .collect()
}

/// As [`eps_band_retain_indices`], taking the front as solutions and
/// returning retained solutions.
pub fn eps_band_filter(joint: &[Solution], global_front: &[Solution], eps: f64) -> Vec<Solution> {
    if joint.is_empty() {
        return Vec::new();
    }
    let ctx = EpsContext::from_solutions(joint);
    joint
        .iter()
        .filter(|q| {
            !global_front
                .iter()
                .any(|p| eps_dominates(&p.f, &q.f, eps, &ctx))
        })
        .cloned()
        .collect()
}

/// Fast non-dominated sorting. Returns the 1-based front index of every
/// solution: front 1 is the non-dominated set, front k the non-dominated
/// set once fronts < k are removed. Ties keep input order downstream
/// because indices within a front are emitted in input order.
pub fn nd_sort(pop: &[Solution]) -> Vec<usize> {
    assert!(!pop.is_empty(), "nd_sort over an empty population");
    let n = pop.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if pareto_dominates(&pop[i].f, &pop[j].f) {
                dominated_by[i].push(j);
                count[j] += 1;
            } else if pareto_dominates(&pop[j].f, &pop[i].f) {
                dominated_by[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut front = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    let mut level = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            front[i] = level;
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        level += 1;
    }
    front
}

/// SPEA2 fitness: raw fitness (sum of the strengths of all dominators)
/// plus the density term `1/(sigma_k + 2)` with `k = floor(sqrt(|pop|))`.
/// Fitness below 1 characterizes exactly the non-dominated members.
pub fn spea2_fitness(pop: &[Solution]) -> Vec<f64> {
    assert!(!pop.is_empty(), "spea2_fitness over an empty population");
    let n = pop.len();
    if n == 1 {
        return vec![0.5];
    }
    let mut strength = vec![0u32; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if pareto_dominates(&pop[i].f, &pop[j].f) {
                strength[i] += 1;
                dominators[j].push(i);
            } else if pareto_dominates(&pop[j].f, &pop[i].f) {
                strength[j] += 1;
                dominators[i].push(j);
            }
        }
    }
    let k = (n as f64).sqrt().floor() as usize;
    let k = k.clamp(1, n - 1);
    let mut fitness = Vec::with_capacity(n);
    let mut dist = vec![0.0f64; n - 1];
    for i in 0..n {
        let raw: f64 = dominators[i].iter().map(|&j| strength[j] as f64).sum();
        let mut idx = 0;
        for j in 0..n {
            if j != i {
                dist[idx] = euclidean(&pop[i].f, &pop[j].f);
                idx += 1;
            }
        }
        // k-th nearest neighbour distance, 1-indexed.
        let (_, kth, _) = dist.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        let density = 1.0 / (*kth + 2.0);
        fitness.push(raw + density);
    }
    fitness
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
