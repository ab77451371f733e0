//! Two-archive coevolutionary optimization for multimodal multi-objective
//! problems.
//!
//! The engine evolves a convergence archive and a diversity archive on a
//! shared offspring stream. The convergence archive drives toward the true
//! Pareto front; the diversity archive keeps an epsilon-acceptance band
//! around the current front, prunes locally dominated solutions inside
//! adaptive decision-space niches, and spreads the survivors by crowding.
//! The result set covers every equivalent global Pareto set and, when the
//! user epsilon allows, the acceptable local ones too.
//!
//! The crate also ships four analytic benchmark families with closed-form
//! Pareto-set samplers ([`problems`]), the IGD/IGDX/mean-rank evaluation
//! pipeline ([`metrics`]), and a deterministic, fully replayable run record
//! ([`record`]).
//!
//! ```
//! use commea::problems::DualDepth;
//! use commea::types::{Problem, RunConfig};
//!
//! let problem = DualDepth::new(0.1);
//! let mut config = RunConfig::defaults_for(&problem);
//! config.pop = 20;
//! config.max_fe = 1200;
//! config.epsilon = 0.3;
//! let record = commea::coevolution::run(&config, &problem);
//! assert_eq!(record.final_da.unwrap().len(), 20);
//! ```

pub mod coevolution;
pub mod dominance;
pub mod metrics;
pub mod niching;
pub mod problems;
pub mod record;
pub mod rng;
pub mod types;
pub mod variation;

pub use coevolution::{run, Engine, EpsSchedule};
pub use record::{RunRecord, SCHEMA_VERSION};
pub use types::{Problem, RunConfig, RunMode, Solution};
