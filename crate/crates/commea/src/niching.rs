//! Decision-space niching: neighborhood graphs under the adaptive radius R,
//! the local convergence indicator, the legacy local convergence quality,
//! and crowding-based truncation.
//!
//! All distances here are taken over vectors normalized to `[0,1]` per
//! coordinate: decision vectors by the problem's box bounds, objective
//! vectors by the min/max of the population being scored.

use crate::dominance::{euclidean, pareto_dominates};
use crate::types::{normalize_decision, Solution};

/// Radius-R adjacency over a point set. A solution is never its own
/// neighbor; membership uses strict `d < R`, so the graph is symmetric.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    pub radius: f64,
    pub neighbors: Vec<Vec<usize>>,
}

/// Half the average pairwise distance, summing over all ordered pairs
/// (including i = j, which contribute zero): `R = sum d_ij / (2 N^2)`.
pub fn niche_radius(points: &[Vec<f64>]) -> f64 {
    assert!(!points.is_empty(), "niche_radius over an empty set");
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += euclidean(&points[i], &points[j]);
        }
    }
    // Ordered pairs double the i < j sum.
    (2.0 * total) / (2.0 * (n * n) as f64)
}

pub fn build_neighbor_graph(points: &[Vec<f64>]) -> NeighborGraph {
    build_neighbor_graph_with_radius(points, niche_radius(points))
}

pub fn build_neighbor_graph_with_radius(points: &[Vec<f64>], radius: f64) -> NeighborGraph {
    let n = points.len();
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if euclidean(&points[i], &points[j]) < radius {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    NeighborGraph { radius, neighbors }
}

/// Strength-weighted dominated-by count inside each neighborhood:
/// `S_i = |{j in N_i : i dominates j}|` and
/// `I_LC(i) = sum over dominating neighbors j of S_j`.
/// Zero iff no neighbor dominates the solution.
pub fn local_convergence_indicator(pop: &[Solution], graph: &NeighborGraph) -> Vec<f64> {
    let n = pop.len();
    assert_eq!(graph.neighbors.len(), n, "graph built over a different set");
    let mut strength = vec![0.0f64; n];
    for i in 0..n {
        strength[i] = graph.neighbors[i]
            .iter()
            .filter(|&&j| pareto_dominates(&pop[i].f, &pop[j].f))
            .count() as f64;
    }
    (0..n)
        .map(|i| {
            graph.neighbors[i]
                .iter()
                .filter(|&&j| pareto_dominates(&pop[j].f, &pop[i].f))
                .map(|&j| strength[j])
                .sum()
        })
        .collect()
}

/// Fraction of neighbors dominating each solution; zero for isolated
/// solutions. Zero exactly where [`local_convergence_indicator`] is zero.
pub fn local_convergence_quality(pop: &[Solution], graph: &NeighborGraph) -> Vec<f64> {
    let n = pop.len();
    assert_eq!(graph.neighbors.len(), n, "graph built over a different set");
    (0..n)
        .map(|i| {
            let ni = graph.neighbors[i].len();
            if ni == 0 {
                return 0.0;
            }
            let dominated_by = graph.neighbors[i]
                .iter()
                .filter(|&&j| pareto_dominates(&pop[j].f, &pop[i].f))
                .count();
            dominated_by as f64 / ni as f64
        })
        .collect()
}

/// Space in which crowdedness is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrowdSpace {
    Decision,
    Objective,
    /// Mean of the decision- and objective-space crowdedness after each is
    /// rescaled by its population mean.
    Combined,
}

/// Crowdedness `kappa_i = sum over j != i of 1 / ||v_j - v_i||` on an
/// already-normalized point set. Exact duplicates produce the +inf
/// sentinel: most crowded.
pub fn crowding_kappa(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut kappa = vec![0.0f64; n];
    let mut dup = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&points[i], &points[j]);
            if d == 0.0 {
                dup[i] = true;
                dup[j] = true;
            } else {
                kappa[i] += 1.0 / d;
                kappa[j] += 1.0 / d;
            }
        }
    }
    for i in 0..n {
        if dup[i] {
            kappa[i] = f64::INFINITY;
        }
    }
    kappa
}

/// Crowding pseudo-distance `(N-1)/kappa`; larger means more isolated.
/// Duplicates (kappa = inf) get 0, a lone member gets +inf.
pub fn crowd_dis_from_kappa(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    kappa
        .iter()
        .map(|&k| {
            if k.is_infinite() {
                0.0
            } else if k == 0.0 {
                f64::INFINITY
            } else {
                (n as f64 - 1.0) / k
            }
        })
        .collect()
}

fn normalized_decisions(pop: &[Solution], lower: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    pop.iter()
        .map(|s| normalize_decision(lower, upper, &s.x))
        .collect()
}

/// Min/max normalization of the population's own objective vectors; a
/// degenerate coordinate (zero span) collapses to 0 for every member.
fn normalized_objectives(pop: &[Solution]) -> Vec<Vec<f64>> {
    let m = pop[0].f.len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for s in pop {
        for (k, &v) in s.f.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    pop.iter()
        .map(|s| {
            (0..m)
                .map(|k| {
                    let span = hi[k] - lo[k];
                    if span > 0.0 {
                        (s.f[k] - lo[k]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn combine_kappa(dec: &[f64], obj: &[f64]) -> Vec<f64> {
    let mean = |v: &[f64]| {
        let finite: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
        if finite.is_empty() {
            1.0
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        }
    };
    let (md, mo) = (mean(dec), mean(obj));
    dec.iter()
        .zip(obj)
        .map(|(&d, &o)| {
            let rd = if md > 0.0 { d / md } else { d };
            let ro = if mo > 0.0 { o / mo } else { o };
            0.5 * (rd + ro)
        })
        .collect()
}

/// Crowdedness of every member in the chosen space. Bounds are only used
/// for decision-space normalization.
pub fn crowding(pop: &[Solution], lower: &[f64], upper: &[f64], space: CrowdSpace) -> Vec<f64> {
    assert!(pop.len() >= 2, "crowding needs at least two members");
    match space {
        CrowdSpace::Decision => crowding_kappa(&normalized_decisions(pop, lower, upper)),
        CrowdSpace::Objective => crowding_kappa(&normalized_objectives(pop)),
        CrowdSpace::Combined => {
            let kd = crowding_kappa(&normalized_decisions(pop, lower, upper));
            let ko = crowding_kappa(&normalized_objectives(pop));
            combine_kappa(&kd, &ko)
        }
    }
}

/// Crowding pseudo-distance in the chosen space; larger = more isolated.
pub fn crowd_dis(pop: &[Solution], lower: &[f64], upper: &[f64], space: CrowdSpace) -> Vec<f64> {
    crowd_dis_from_kappa(&crowding(pop, lower, upper, space))
}

/// Incremental pair bookkeeping for one space: inverse distances with the
/// duplicate count tracked separately so removals stay exact.
struct PairSums {
    n: usize,
    inv: Vec<f64>,
    finite_sum: Vec<f64>,
    zero_cnt: Vec<u32>,
}

impl PairSums {
    fn new(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let mut inv = vec![0.0f64; n * n];
        let mut finite_sum = vec![0.0f64; n];
        let mut zero_cnt = vec![0u32; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&points[i], &points[j]);
                let v = if d == 0.0 { f64::INFINITY } else { 1.0 / d };
                inv[i * n + j] = v;
                inv[j * n + i] = v;
                if v.is_finite() {
                    finite_sum[i] += v;
                    finite_sum[j] += v;
                } else {
                    zero_cnt[i] += 1;
                    zero_cnt[j] += 1;
                }
            }
        }
        PairSums { n, inv, finite_sum, zero_cnt }
    }

    fn kappa(&self, i: usize) -> f64 {
        if self.zero_cnt[i] > 0 {
            f64::INFINITY
        } else {
            self.finite_sum[i]
        }
    }

    fn remove(&mut self, rm: usize, alive: &[bool]) {
        for (j, &live) in alive.iter().enumerate() {
            if j == rm || !live {
                continue;
            }
            let v = self.inv[j * self.n + rm];
            if v.is_finite() {
                self.finite_sum[j] -= v;
            } else {
                self.zero_cnt[j] -= 1;
            }
        }
    }
}

/// Iteratively discards the most crowded member (maximum kappa, ties broken
/// by input order) with kappa recomputed after every removal, until `target`
/// members remain. Normalization spans are fixed at entry. Returns the kept
/// indices in input order.
pub fn truncate_by_crowding(
    pop: &[Solution],
    target: usize,
    lower: &[f64],
    upper: &[f64],
    space: CrowdSpace,
) -> Vec<usize> {
    let n = pop.len();
    assert!(n >= target, "cannot truncate {n} members to {target}");
    if target == 0 {
        return Vec::new();
    }
    let mut dec = match space {
        CrowdSpace::Decision | CrowdSpace::Combined => {
            Some(PairSums::new(&normalized_decisions(pop, lower, upper)))
        }
        CrowdSpace::Objective => None,
    };
    let mut obj = match space {
        CrowdSpace::Objective | CrowdSpace::Combined => {
            Some(PairSums::new(&normalized_objectives(pop)))
        }
        CrowdSpace::Decision => None,
    };
    let mut alive = vec![true; n];
    let mut alive_count = n;
    while alive_count > target {
        let score_of = |i: usize| -> f64 {
            match space {
                CrowdSpace::Decision => dec.as_ref().unwrap().kappa(i),
                CrowdSpace::Objective => obj.as_ref().unwrap().kappa(i),
                CrowdSpace::Combined => f64::NAN, // filled below
            }
        };
        let scores: Vec<(usize, f64)> = if space == CrowdSpace::Combined {
            let d = dec.as_ref().unwrap();
            let o = obj.as_ref().unwrap();
            let kd: Vec<f64> = (0..n).map(|i| d.kappa(i)).collect();
            let ko: Vec<f64> = (0..n).map(|i| o.kappa(i)).collect();
            let live_d: Vec<f64> = (0..n).filter(|&i| alive[i]).map(|i| kd[i]).collect();
            let live_o: Vec<f64> = (0..n).filter(|&i| alive[i]).map(|i| ko[i]).collect();
            let combined_live = combine_kappa(&live_d, &live_o);
            (0..n)
                .filter(|&i| alive[i])
                .zip(combined_live)
                .collect()
        } else {
            (0..n)
                .filter(|&i| alive[i])
                .map(|i| (i, score_of(i)))
                .collect()
        };
        // First index among the maxima.
        let (&(mut rm), mut best) = (&scores[0].0, scores[0].1);
        for &(i, s) in &scores[1..] {
            if s > best {
                best = s;
                rm = i;
            }
        }
        alive[rm] = false;
        alive_count -= 1;
        if let Some(d) = dec.as_mut() {
            d.remove(rm, &alive);
        }
        if let Some(o) = obj.as_mut() {
            o.remove(rm, &alive);
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}
