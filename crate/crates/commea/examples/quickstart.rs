//! Minimal end-to-end usage: run the optimizer on the dual-depth benchmark
//! at two epsilon settings and watch the accepted local set appear.
//!
//! `cargo run -p commea --example quickstart --release`

use commea::metrics::igdx;
use commea::problems::{normalized_reference, sample_reference, DualDepth};
use commea::types::{normalize_decision, Problem, RefSelect, RunConfig};

fn main() {
    let problem = DualDepth::new(0.1);
    let reference = sample_reference(&problem, 500, RefSelect::GlobalAndLocal);
    let reference_norm = normalized_reference(&problem, &reference);

    for eps in [0.02, 0.3] {
        let mut config = RunConfig::defaults_for(&problem);
        config.epsilon = eps;
        config.seed = 7;
        let record = commea::run(&config, &problem);

        let answer = record.answer_set();
        let near_local = answer
            .x
            .iter()
            .filter(|x| (x[1] - 0.75).abs() <= 0.05)
            .count();
        let decisions: Vec<Vec<f64>> = answer
            .x
            .iter()
            .map(|x| normalize_decision(problem.lower(), problem.upper(), x))
            .collect();
        println!(
            "eps = {eps:<4}  members on the local set: {near_local:>3} of {}   \
             IGD = {:.4}  IGDX(global+local refs) = {:.4}",
            answer.len(),
            record.final_igd,
            igdx(&decisions, &reference_norm),
        );
    }
}
