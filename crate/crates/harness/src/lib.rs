//! Config-driven experiment runner: TOML configs in, CSV / JSON traces out.

pub mod builtins;
pub mod config;
pub mod run;

pub use config::{ConfigError, Experiment, Format};
pub use run::{run_certificate, run_convergence, run_identities, run_union, Outcome, RunError};
