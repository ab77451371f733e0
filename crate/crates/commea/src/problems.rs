//! Analytic multimodal benchmark problems with closed-form Pareto-set and
//! Pareto-front samplers.
//!
//! Four families cover the structural features a multimodal optimizer must
//! handle:
//!
//! * [`SineMirror`] — two equivalent global PS branches, mirror images in
//!   the first variable, mapping onto one front `f2 = 1 - sqrt(f1)`.
//! * [`SineMirrorD`] — the same geometry with a scalable number of tail
//!   variables that must all track `sin(pi*|x1|)`.
//! * [`Polygon`] — `k` congruent regular polygons in the plane; every
//!   decision vector encodes `D/2` points whose mean vertex distances form
//!   the objectives, giving one equivalent global PS per polygon and a
//!   scalable dimension and objective count.
//! * [`DualDepth`] — one global PS and one accepted local PS whose front
//!   sits exactly `delta` worse per objective, for epsilon-band studies.
//!
//! Problems are addressed by canonical string ids such as
//! `polygon-k4-m3-d10` or `dualdepth-d0.10`.

use std::f64::consts::PI;

use crate::metrics::ReferenceSet;
use crate::types::{check_in_bounds, normalize_decision, Problem, RefPoint, RefSelect};

/// Splits `k` reference points as evenly as possible over `branches`,
/// leading branches absorbing the remainder.
fn branch_counts(k: usize, branches: usize) -> Vec<usize> {
    let base = k / branches;
    let extra = k % branches;
    (0..branches).map(|b| base + usize::from(b < extra)).collect()
}

/// `count` parameter values spread uniformly over `[0, 1]`, endpoints
/// included; a single point sits at the midpoint.
fn linspace01(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..count).map(|j| j as f64 / (count - 1) as f64).collect(),
    }
}

// ---------------------------------------------------------------------------
// SineMirror / SineMirrorD
// ---------------------------------------------------------------------------

/// Two mirror-image global PS branches `x2 = sin(pi*|x1|)`, `x1 < 0` and
/// `x1 > 0`, on the box `[-1,1]^2`.
#[derive(Debug, Clone)]
pub struct SineMirror {
    bounds_lo: Vec<f64>,
    bounds_hi: Vec<f64>,
}

impl SineMirror {
    pub fn new() -> Self {
        SineMirror { bounds_lo: vec![-1.0; 2], bounds_hi: vec![1.0; 2] }
    }
}

impl Default for SineMirror {
    fn default() -> Self {
        Self::new()
    }
}

impl Problem for SineMirror {
    fn id(&self) -> String {
        "sinemirror".into()
    }
    fn dims(&self) -> usize {
        2
    }
    fn objectives(&self) -> usize {
        2
    }
    fn lower(&self) -> &[f64] {
        &self.bounds_lo
    }
    fn upper(&self) -> &[f64] {
        &self.bounds_hi
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        check_in_bounds(self, x);
        let ax = x[0].abs();
        let r = x[1] - (PI * ax).sin();
        vec![ax, 1.0 - ax.sqrt() + 2.0 * r * r]
    }
    fn sample_ps(&self, k: usize, _which: RefSelect) -> Vec<RefPoint> {
        sine_mirror_samples(k, 2)
    }
}

/// SineMirror geometry with `d - 1` tail variables, all of which must equal
/// `sin(pi*|x1|)` on the Pareto set. The residual is averaged over the tail
/// so the front is identical for every dimension.
#[derive(Debug, Clone)]
pub struct SineMirrorD {
    d: usize,
    bounds_lo: Vec<f64>,
    bounds_hi: Vec<f64>,
}

impl SineMirrorD {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "sinemirrord needs at least 2 variables");
        SineMirrorD { d, bounds_lo: vec![-1.0; d], bounds_hi: vec![1.0; d] }
    }
}

impl Problem for SineMirrorD {
    fn id(&self) -> String {
        format!("sinemirrord-d{}", self.d)
    }
    fn dims(&self) -> usize {
        self.d
    }
    fn objectives(&self) -> usize {
        2
    }
    fn lower(&self) -> &[f64] {
        &self.bounds_lo
    }
    fn upper(&self) -> &[f64] {
        &self.bounds_hi
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        check_in_bounds(self, x);
        let ax = x[0].abs();
        let s = (PI * ax).sin();
        let mut tail = 0.0;
        for &v in &x[1..] {
            let r = v - s;
            tail += r * r;
        }
        vec![ax, 1.0 - ax.sqrt() + 2.0 / (self.d - 1) as f64 * tail]
    }
    fn sample_ps(&self, k: usize, _which: RefSelect) -> Vec<RefPoint> {
        sine_mirror_samples(k, self.d)
    }
}

fn sine_mirror_samples(k: usize, d: usize) -> Vec<RefPoint> {
    let counts = branch_counts(k, 2);
    let mut out = Vec::with_capacity(k);
    for (branch, &count) in counts.iter().enumerate() {
        let sign = if branch == 0 { -1.0 } else { 1.0 };
        // Midpoint spacing keeps every sample strictly inside its half-open
        // branch; the two branches share no point at x1 = 0.
        for j in 0..count {
            let t = (j as f64 + 0.5) / count as f64;
            let s = (PI * t).sin();
            let mut x = vec![sign * t];
            x.extend(std::iter::repeat_n(s, d - 1));
            out.push(RefPoint { x, f: vec![t, 1.0 - t.sqrt()], global: true });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Polygon
// ---------------------------------------------------------------------------

/// `k` congruent regular `m`-gons with unit circumradius, centered on a
/// grid with spacing 4. A decision vector encodes `D/2` planar points; the
/// i-th objective is the mean distance from each point to the i-th vertex
/// of its nearest polygon. All points coinciding anywhere inside a
/// polygon's vertex hull is Pareto optimal, one equivalent PS per polygon.
#[derive(Debug, Clone)]
pub struct Polygon {
    k: usize,
    m: usize,
    d: usize,
    grid: usize,
    bounds_lo: Vec<f64>,
    bounds_hi: Vec<f64>,
    /// vertices[j][i] is the i-th vertex of polygon j.
    vertices: Vec<Vec<(f64, f64)>>,
}

impl Polygon {
    pub fn new(k: usize, m: usize, d: usize) -> Self {
        assert!(k >= 1, "polygon needs at least one polygon");
        assert!(m >= 2, "polygon needs at least two objectives");
        assert!(d >= 2 && d.is_multiple_of(2), "polygon needs an even number of variables");
        let grid = (k as f64).sqrt().ceil() as usize;
        let vertices = (0..k)
            .map(|j| {
                let c = Self::center_of(j, grid);
                (1..=m)
                    .map(|i| {
                        let theta = 2.0 * PI * i as f64 / m as f64 + PI / 2.0;
                        (c.0 + theta.cos(), c.1 + theta.sin())
                    })
                    .collect()
            })
            .collect();
        let hi = 4.0 * grid as f64;
        Polygon {
            k,
            m,
            d,
            grid,
            bounds_lo: vec![0.0; d],
            bounds_hi: vec![hi; d],
            vertices,
        }
    }

    fn center_of(j: usize, grid: usize) -> (f64, f64) {
        let col = j % grid;
        let row = j / grid;
        (2.0 + 4.0 * col as f64, 2.0 + 4.0 * row as f64)
    }

    pub fn polygon_count(&self) -> usize {
        self.k
    }

    pub fn centers(&self) -> Vec<(f64, f64)> {
        (0..self.k).map(|j| Self::center_of(j, self.grid)).collect()
    }

    pub fn vertices(&self) -> &[Vec<(f64, f64)>] {
        &self.vertices
    }

    fn points_of(x: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
        x.chunks_exact(2).map(|p| (p[0], p[1]))
    }

    fn objective_at(&self, q: (f64, f64), i: usize) -> f64 {
        self.vertices
            .iter()
            .map(|vs| {
                let v = vs[i];
                ((q.0 - v.0).powi(2) + (q.1 - v.1).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of polygons a result set covers. Optimal solutions may
    /// legitimately distribute their encoded points over several congruent
    /// polygons, so coverage is measured per point: polygon j counts as
    /// covered when at least 2% of all encoded points lie within its
    /// inscribed circle — the region its reference sample occupies. The
    /// floor keeps lone stragglers from counting as a niche.
    pub fn polygons_covered(&self, xs: &[Vec<f64>]) -> usize {
        let total: usize = xs.len() * (self.d / 2);
        if total == 0 {
            return 0;
        }
        let threshold = ((total as f64) * 0.02).ceil() as usize;
        let threshold = threshold.max(1);
        let r_in = (PI / self.m as f64).cos();
        let centers = self.centers();
        centers
            .iter()
            .filter(|c| {
                let near = xs
                    .iter()
                    .flat_map(|x| Self::points_of(x))
                    .filter(|p| {
                        let dx = p.0 - c.0;
                        let dy = p.1 - c.1;
                        dx * dx + dy * dy <= r_in * r_in
                    })
                    .count();
                near >= threshold
            })
            .count()
    }
}

impl Problem for Polygon {
    fn id(&self) -> String {
        format!("polygon-k{}-m{}-d{}", self.k, self.m, self.d)
    }
    fn dims(&self) -> usize {
        self.d
    }
    fn objectives(&self) -> usize {
        self.m
    }
    fn lower(&self) -> &[f64] {
        &self.bounds_lo
    }
    fn upper(&self) -> &[f64] {
        &self.bounds_hi
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        check_in_bounds(self, x);
        let l = (self.d / 2) as f64;
        (0..self.m)
            .map(|i| Self::points_of(x).map(|p| self.objective_at(p, i)).sum::<f64>() / l)
            .collect()
    }
    fn sample_ps(&self, k: usize, _which: RefSelect) -> Vec<RefPoint> {
        // Reference configurations put every encoded point at one common
        // location q inside a single polygon, spread over the polygon's
        // inscribed disk by a Fibonacci spiral. Mixed-polygon optima exist
        // but are deliberately not sampled.
        let counts = branch_counts(k, self.k);
        let golden_angle = PI * (3.0 - 5.0f64.sqrt());
        let r_in = (PI / self.m as f64).cos();
        let mut out = Vec::with_capacity(k);
        for (j, &count) in counts.iter().enumerate() {
            let c = Self::center_of(j, self.grid);
            for t in 0..count {
                let radius = r_in * (((t as f64) + 0.5) / count as f64).sqrt();
                let angle = golden_angle * t as f64;
                let q = (c.0 + radius * angle.cos(), c.1 + radius * angle.sin());
                let mut x = Vec::with_capacity(self.d);
                for _ in 0..self.d / 2 {
                    x.push(q.0);
                    x.push(q.1);
                }
                let f = (0..self.m).map(|i| self.objective_at(q, i)).collect();
                out.push(RefPoint { x, f, global: true });
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// DualDepth
// ---------------------------------------------------------------------------

/// One global PS (`x2 = 0.25`) and one accepted local PS (`x2 = 0.75`)
/// whose front is offset by exactly `delta` in each objective. The basin
/// walls are steep (slope factor 20) so crossing between branches by
/// mutation alone is rare.
#[derive(Debug, Clone)]
pub struct DualDepth {
    delta: f64,
    bounds_lo: Vec<f64>,
    bounds_hi: Vec<f64>,
}

impl DualDepth {
    pub fn new(delta: f64) -> Self {
        assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
        DualDepth { delta, bounds_lo: vec![0.0; 2], bounds_hi: vec![1.0; 2] }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn depth(&self, x2: f64) -> f64 {
        let g = 20.0 * (x2 - 0.25) * (x2 - 0.25);
        let l = self.delta + 20.0 * (x2 - 0.75) * (x2 - 0.75);
        g.min(l)
    }
}

impl Problem for DualDepth {
    fn id(&self) -> String {
        format!("dualdepth-d{:.2}", self.delta)
    }
    fn dims(&self) -> usize {
        2
    }
    fn objectives(&self) -> usize {
        2
    }
    fn lower(&self) -> &[f64] {
        &self.bounds_lo
    }
    fn upper(&self) -> &[f64] {
        &self.bounds_hi
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        check_in_bounds(self, x);
        let h = self.depth(x[1]);
        vec![x[0] + h, 1.0 - x[0] + h]
    }
    fn has_local_ps(&self) -> bool {
        true
    }
    fn sample_ps(&self, k: usize, which: RefSelect) -> Vec<RefPoint> {
        let branches = if which == RefSelect::GlobalAndLocal { 2 } else { 1 };
        let counts = branch_counts(k, branches);
        let mut out = Vec::with_capacity(k);
        for t in linspace01(counts[0]) {
            out.push(RefPoint { x: vec![t, 0.25], f: vec![t, 1.0 - t], global: true });
        }
        if branches == 2 {
            for t in linspace01(counts[1]) {
                out.push(RefPoint {
                    x: vec![t, 0.75],
                    f: vec![t + self.delta, 1.0 - t + self.delta],
                    global: false,
                });
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Id parsing and reference assembly
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemIdError {
    UnknownFamily(String),
    BadParameters(String),
}

impl std::fmt::Display for ProblemIdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProblemIdError::UnknownFamily(id) => write!(f, "unknown problem id '{id}'"),
            ProblemIdError::BadParameters(msg) => write!(f, "bad problem parameters: {msg}"),
        }
    }
}

impl std::error::Error for ProblemIdError {}

/// Builds a problem from its canonical id: `sinemirror`,
/// `sinemirrord-d<D>`, `polygon-k<k>-m<m>-d<D>`, `dualdepth-d<delta>`.
pub fn parse_problem_id(id: &str) -> Result<Box<dyn Problem>, ProblemIdError> {
    let bad = |msg: String| ProblemIdError::BadParameters(msg);
    if id == "sinemirror" {
        return Ok(Box::new(SineMirror::new()));
    }
    if let Some(rest) = id.strip_prefix("sinemirrord-d") {
        let d: usize = rest.parse().map_err(|_| bad(format!("'{rest}' is not a dimension")))?;
        if d < 2 {
            return Err(bad(format!("sinemirrord dimension {d} must be >= 2")));
        }
        return Ok(Box::new(SineMirrorD::new(d)));
    }
    if let Some(rest) = id.strip_prefix("polygon-") {
        let mut k = None;
        let mut m = None;
        let mut d = None;
        for part in rest.split('-') {
            let (key, value) = part.split_at(1);
            let value: usize =
                value.parse().map_err(|_| bad(format!("'{part}' is not an integer parameter")))?;
            match key {
                "k" => k = Some(value),
                "m" => m = Some(value),
                "d" => d = Some(value),
                _ => return Err(bad(format!("unknown polygon parameter '{key}'"))),
            }
        }
        let (k, m, d) = match (k, m, d) {
            (Some(k), Some(m), Some(d)) => (k, m, d),
            _ => return Err(bad("polygon needs k, m and d, e.g. polygon-k4-m3-d10".into())),
        };
        if k < 1 || m < 2 || d < 2 || !d.is_multiple_of(2) {
            return Err(bad(format!("polygon-k{k}-m{m}-d{d}: need k >= 1, m >= 2, even d >= 2")));
        }
        return Ok(Box::new(Polygon::new(k, m, d)));
    }
    if let Some(rest) = id.strip_prefix("dualdepth-d") {
        let delta: f64 = rest.parse().map_err(|_| bad(format!("'{rest}' is not a delta")))?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(bad(format!("dualdepth delta {delta} must lie in (0,1)")));
        }
        return Ok(Box::new(DualDepth::new(delta)));
    }
    Err(ProblemIdError::UnknownFamily(id.to_string()))
}

/// Ids of the stock problem instances the harness advertises.
pub fn builtin_problem_ids() -> Vec<String> {
    vec![
        "sinemirror".into(),
        "sinemirrord-d10".into(),
        "polygon-k4-m3-d10".into(),
        "dualdepth-d0.10".into(),
    ]
}

/// Samples `k` reference points and packages them for the metrics. Asking
/// for local branches on a family without any yields a global-only set with
/// `includes_local = false`.
pub fn sample_reference(problem: &dyn Problem, k: usize, which: RefSelect) -> ReferenceSet {
    assert!(k >= 2, "reference sets need at least 2 points");
    let points = problem.sample_ps(k, which);
    let includes_local = which == RefSelect::GlobalAndLocal
        && problem.has_local_ps()
        && points.iter().any(|p| !p.global);
    ReferenceSet {
        decisions: points.iter().map(|p| p.x.clone()).collect(),
        objectives: points.iter().map(|p| p.f.clone()).collect(),
        includes_local,
    }
}

/// Normalizes a reference set's decision rows to `[0,1]^D` by the problem's
/// bounds, for decision-space metrics reported in normalized units.
pub fn normalized_reference(problem: &dyn Problem, reference: &ReferenceSet) -> ReferenceSet {
    ReferenceSet {
        decisions: reference
            .decisions
            .iter()
            .map(|x| normalize_decision(problem.lower(), problem.upper(), x))
            .collect(),
        objectives: reference.objectives.clone(),
        includes_local: reference.includes_local,
    }
}
