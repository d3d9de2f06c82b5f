use serde::{Deserialize, Serialize};

use super::{ame_for_probe, ams_optimize, lemma2_feasible};
use crate::error::Result;
use crate::families::{family_for_state, FamilyChoice, FamilyKind};
use crate::qcore::{BipartiteState, Tolerances};

/// Margin below 1 the numeric AMS search must respect.
pub const AMS_MARGIN: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremTag {
    T1,
    T2,
    T3,
}

impl From<FamilyKind> for TheoremTag {
    fn from(k: FamilyKind) -> Self {
        match k {
            FamilyKind::R => TheoremTag::T1,
            FamilyKind::S => TheoremTag::T2,
            FamilyKind::Q => TheoremTag::T3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub outcome: usize,
    pub as_value: f64,
    pub total_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremTag,
    pub parameter_used: f64,
    pub bound: f64,
    pub ame: f64,
    pub per_outcome_as: Vec<OutcomeSummary>,
    /// Whether a probe could zero one effect of every outcome.
    pub ams_structural: bool,
    pub ams_numeric_best: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub tolerances: Tolerances,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { tolerances: Tolerances::default(), restarts: 32, seed: 0 }
    }
}

/// Builds the default family for `state` and checks AME = 1 at `state`
/// together with AMS < 1.
pub fn verify_theorem(state: &BipartiteState, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let choice = family_for_state(state)?;
    verify_choice(state, &choice, cfg)
}

pub fn verify_choice(state: &BipartiteState, choice: &FamilyChoice, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let ev = ame_for_probe(&choice.ensemble, state, &cfg.tolerances)?;
    let (structural, _) = lemma2_feasible(&choice.ensemble)?;
    let (best, _) = ams_optimize(&choice.ensemble, cfg.restarts, cfg.seed);
    let passed = ev.ame >= 1.0 - cfg.tolerances.theorem && !structural && best <= 1.0 - AMS_MARGIN;
    Ok(VerificationReport {
        theorem: choice.kind.into(),
        parameter_used: choice.parameter,
        bound: choice.bound,
        ame: ev.ame,
        per_outcome_as: ev
            .per_outcome
            .iter()
            .map(|o| OutcomeSummary { outcome: o.outcome, as_value: o.as_value, total_weight: o.total_weight })
            .collect(),
        ams_structural: structural,
        ams_numeric_best: best,
        passed,
    })
}
