//! Seeded verification campaigns and their reports.

pub mod cache;
pub mod checks;
pub mod config;
pub mod exponents;
pub mod report;
pub mod sampling;
pub mod theorems;

pub use config::{CampaignConfig, Target, WeightKind};
pub use report::{emit_csv, emit_report, Record, VerificationReport};

use crate::error::{Error, Result};

/// Runs the campaign named by `cfg.target`. With `cfg.threads` set the
/// work runs on a dedicated pool of that size; the report does not depend
/// on it.
pub fn verify(cfg: &CampaignConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &CampaignConfig) -> Result<VerificationReport> {
    match cfg.target {
        t if t.is_theorem() => theorems::verify_theorem(cfg),
        Target::Lemma1 | Target::Smoothing => checks::verify_smoothing(cfg),
        Target::Lemma2 | Target::Weil => checks::verify_weil(cfg),
        Target::Lemma3 | Target::Lemma4 | Target::Lemma5 | Target::Lemma6 => checks::verify_mean_value(cfg),
        Target::Lemma7 | Target::Lemma8 | Target::Lemma9 => checks::verify_energy(cfg),
        Target::Phi => checks::verify_phi(cfg),
        Target::Compare => checks::verify_compare(cfg),
        _ => unreachable!("theorem targets handled above"),
    }
}
