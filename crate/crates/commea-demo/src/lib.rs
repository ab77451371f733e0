//! Browser bindings for the optimizer demo page.
//!
//! Three operations back the static page in `index.html`: a problem
//! catalog for the controls and reference overlays, a full seeded run
//! returning plot-ready scatter data, and the epsilon schedule curve.
//! Everything returns JSON strings; the page parses and draws onto two
//! canvases.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use commea::coevolution::EpsSchedule;
use commea::problems::{parse_problem_id, sample_reference, Polygon};
use commea::record::SetMatrices;
use commea::types::{Problem, RefSelect, RunConfig, RunMode};

/// Caps keeping a single-threaded browser run responsive.
const MAX_POP: u32 = 600;
const MAX_EVALS: u32 = 200_000;

#[derive(Serialize)]
struct ScatterSet {
    /// 2-D decision-space projection, one pair per plotted point.
    decision: Vec<[f64; 2]>,
    /// First two objectives per archive member.
    objective: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct DemoResult {
    problem: String,
    dims: usize,
    objectives: usize,
    generations: u64,
    fe_used: u64,
    igd: f64,
    igdx: f64,
    /// Plot window for the decision projection: [[x_lo, x_hi], [y_lo, y_hi]].
    decision_bounds: [[f64; 2]; 2],
    da: Option<ScatterSet>,
    ca: ScatterSet,
    reference: ScatterSet,
    /// Polygon outlines to draw under the decision scatter (empty for the
    /// other families).
    polygons: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct CatalogEntry {
    id: String,
    dims: usize,
    objectives: usize,
    has_local_ps: bool,
    label: String,
}

/// Decision-space projection used by the page: the encoded planar points
/// for the polygon family, the first two coordinates otherwise.
fn project_decisions(problem: &dyn Problem, rows: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let polygonal = problem.id().starts_with("polygon");
    let mut out = Vec::new();
    for row in rows {
        if polygonal {
            for pair in row.chunks_exact(2) {
                out.push([pair[0], pair[1]]);
            }
        } else {
            out.push([row[0], row[1]]);
        }
    }
    out
}

fn project_objectives(rows: &[Vec<f64>]) -> Vec<[f64; 2]> {
    rows.iter().map(|f| [f[0], f[1]]).collect()
}

fn scatter_of(problem: &dyn Problem, set: &SetMatrices) -> ScatterSet {
    ScatterSet {
        decision: project_decisions(problem, &set.x),
        objective: project_objectives(&set.f),
    }
}

fn polygon_outlines(problem_id: &str) -> Vec<Vec<[f64; 2]>> {
    let Ok(parsed) = parse_problem_id(problem_id) else {
        return Vec::new();
    };
    let canonical = parsed.id();
    let Some(params) = canonical.strip_prefix("polygon-") else {
        return Vec::new();
    };
    // the canonical id is k<k>-m<m>-d<d>; rebuild to read the geometry
    let parts: Vec<usize> = params
        .split('-')
        .map(|p| p[1..].parse().expect("canonical id parses"))
        .collect();
    let polygon = Polygon::new(parts[0], parts[1], parts[2]);
    polygon
        .vertices()
        .iter()
        .map(|vs| vs.iter().map(|&(x, y)| [x, y]).collect())
        .collect()
}

fn demo_run(
    problem_id: &str,
    pop: u32,
    evals: u32,
    eps: f64,
    seed: u32,
    ca_only: bool,
) -> Result<String, String> {
    if pop > MAX_POP {
        return Err(format!("population capped at {MAX_POP} for the demo"));
    }
    if evals > MAX_EVALS {
        return Err(format!("budget capped at {MAX_EVALS} evaluations for the demo"));
    }
    let problem = parse_problem_id(problem_id).map_err(|e| e.to_string())?;
    let mut config = RunConfig::defaults_for(problem.as_ref());
    config.pop = pop as usize;
    config.max_fe = evals as u64;
    config.epsilon = eps;
    config.seed = seed as u64;
    config.mode = if ca_only { RunMode::CaOnly } else { RunMode::Full };
    config.ref_points = 300;
    config.validate().map_err(|e| e.to_string())?;
    let record = commea::run(&config, problem.as_ref());

    let which = if config.epsilon > 0.0 && problem.has_local_ps() {
        RefSelect::GlobalAndLocal
    } else {
        RefSelect::Global
    };
    let reference = sample_reference(problem.as_ref(), 300, which);
    let reference_set = SetMatrices {
        x: reference.decisions.clone(),
        f: reference.objectives.clone(),
    };

    let (lo, hi) = (problem.lower(), problem.upper());
    let result = DemoResult {
        problem: problem.id(),
        dims: problem.dims(),
        objectives: problem.objectives(),
        generations: record.generations,
        fe_used: record.fe_used,
        igd: record.final_igd,
        igdx: record.final_igdx,
        decision_bounds: [[lo[0], hi[0]], [lo[1], hi[1]]],
        da: record.final_da.as_ref().map(|da| scatter_of(problem.as_ref(), da)),
        ca: scatter_of(problem.as_ref(), &record.final_ca),
        reference: scatter_of(problem.as_ref(), &reference_set),
        polygons: polygon_outlines(problem_id),
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

fn catalog_json() -> String {
    let entries: Vec<CatalogEntry> = [
        ("sinemirror", "two mirror Pareto sets, one front"),
        ("sinemirrord-d10", "mirror sets with a 10-D tail"),
        ("polygon-k4-m3-d10", "four equivalent polygons, 3 objectives"),
        ("dualdepth-d0.10", "global set plus an accepted local set"),
    ]
    .iter()
    .map(|(id, label)| {
        let problem = parse_problem_id(id).expect("catalog ids parse");
        CatalogEntry {
            id: problem.id(),
            dims: problem.dims(),
            objectives: problem.objectives(),
            has_local_ps: problem.has_local_ps(),
            label: (*label).to_string(),
        }
    })
    .collect();
    serde_json::to_string(&entries).expect("catalog serializes")
}

fn eps_curve_points(eps: f64, generations: u32) -> Vec<f64> {
    let generations = generations.clamp(1, 100_000) as u64;
    let schedule = EpsSchedule::new(eps.max(0.0), generations);
    let mut out = Vec::with_capacity(2 * generations as usize);
    for i in 1..=generations {
        out.push(i as f64 / generations as f64);
        out.push(schedule.eps_at(i));
    }
    out
}

/// Runs the optimizer and returns plot-ready JSON.
#[wasm_bindgen]
pub fn run_optimizer(
    problem_id: &str,
    pop: u32,
    evals: u32,
    eps: f64,
    seed: u32,
    ca_only: bool,
) -> Result<String, JsValue> {
    demo_run(problem_id, pop, evals, eps, seed, ca_only).map_err(|e| JsValue::from_str(&e))
}

/// The built-in problems with their plotting metadata.
#[wasm_bindgen]
pub fn problem_catalog() -> String {
    catalog_json()
}

/// Flattened (stage, eps_i) pairs of the schedule for a given user epsilon.
#[wasm_bindgen]
pub fn eps_curve(eps: f64, generations: u32) -> Vec<f64> {
    eps_curve_points(eps, generations)
}
