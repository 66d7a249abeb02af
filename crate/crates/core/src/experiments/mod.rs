//! Scenario files, the runner that turns them into time series, and the
//! built-in scenario catalogue.

mod builtin;
mod checks;
mod config;
mod runner;
mod scenario;

pub use builtin::{builtin_scenario, list_builtin_scenarios, resolve_scenario, BUILTIN_SCENARIOS};
pub use checks::{cat_state, run_checks, CheckResult};
pub use config::{ConfigDoc, ConfigEntry, ConfigSection};
pub use runner::{
    execute, format_meta, run_scenario, well_ground_width, ScenarioOutput, TruncationReport,
};
pub use scenario::{CavityParams, InitialState, Model, Scenario, Solver};
