//! Antidistinguishability of measurement ensembles.
//!
//! * AMS (single-system probe σ): `1 − Σ_a min_x p_x Tr(σ M_{a|x})`.
//! * AME (entangled probe ρ^{AB}, evaluated at the given probe):
//!   `Σ_a AS[{ρ^B_{a|x}}_x, {p_x p(a|x)}_x]` where `ρ^B_{a|x}` is Bob's state
//!   after Alice obtains `a` from measurement `x`.
//!
//! AMS is maximized over pure probes only: `σ ↦ Σ_a min_x p_x Tr(σ M_{a|x})`
//! is a sum of minima of linear functions, hence concave, so its minimum over
//! density operators sits at an extreme point.

mod ams;
mod lemma2;
mod verify;

pub use ams::{ams_evaluate, ams_optimize};
pub use lemma2::{lemma2_feasible, MAX_SELECTIONS};
pub use verify::{verify_choice, verify_theorem, OutcomeSummary, TheoremTag, VerificationReport, VerifyConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exclusion::{as_value, ExclusionInstance, ExclusionResult};
use crate::qcore::matrix::{inner, norm, C64};
use crate::qcore::{BipartiteState, DensityOperator, MeasurementEnsemble, PureState, Tolerances};

/// Conditional probabilities at or below this are treated as zero.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Single-system probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbeState {
    pub state: PureState,
}

impl ProbeState {
    pub fn new(state: PureState) -> Self {
        ProbeState { state }
    }
}

/// Bob's conditional states for one outcome `a`, indexed by measurement `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEnsemble {
    pub outcome: usize,
    /// `None` where `p(a|x) ≤ ZERO_WEIGHT`.
    pub reduced_states: Vec<Option<DensityOperator>>,
    /// `p_x p(a|x)`; exactly 0 for dropped entries.
    pub weights: Vec<f64>,
}

impl OutcomeEnsemble {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn has_dropped(&self) -> bool {
        self.reduced_states.iter().any(Option::is_none)
    }

    /// AS instance over the retained entries.
    pub fn instance(&self) -> Option<ExclusionInstance> {
        let (states, weights): (Vec<_>, Vec<_>) = self
            .reduced_states
            .iter()
            .zip(&self.weights)
            .filter_map(|(s, w)| s.clone().map(|s| (s, *w)))
            .unzip();
        if states.is_empty() {
            return None;
        }
        ExclusionInstance::new(states, weights).ok()
    }
}

/// Bob's conditional states `ρ^B_{a|x}` and weights `p_x p(a|x)` for a pure probe.
pub fn reduced_ensembles(ensemble: &MeasurementEnsemble, probe: &BipartiteState) -> Result<Vec<OutcomeEnsemble>> {
    let d = ensemble.dim();
    if probe.dim() != d {
        return Err(Error::DimensionMismatch(format!("probe is {}⊗{} but measurements act on C^{d}", probe.dim(), probe.dim())));
    }
    let coeffs = probe.coeffs();
    let (ba, bb) = (probe.basis_a(), probe.basis_b());
    let mut out: Vec<OutcomeEnsemble> = (0..ensemble.outcomes())
        .map(|a| OutcomeEnsemble { outcome: a, reduced_states: Vec::new(), weights: Vec::new() })
        .collect();
    for (m, &px) in ensemble.measurements().iter().zip(ensemble.priors()) {
        for (a, slot) in out.iter_mut().enumerate() {
            let v = m.effect_vector(a);
            // (⟨v| ⊗ 1)|φ⟩ = Σ_b c_b ⟨v|A_b⟩ |B_b⟩
            let mut w = vec![C64::new(0.0, 0.0); d];
            for ((c, a_b), b_b) in coeffs.iter().zip(ba).zip(bb) {
                let amp = c * inner(v, a_b.amplitudes());
                if amp.norm() == 0.0 {
                    continue;
                }
                w.iter_mut().zip(b_b.amplitudes()).for_each(|(x, y)| *x += amp * y);
            }
            let prob = norm(&w).powi(2);
            if prob <= ZERO_WEIGHT {
                slot.reduced_states.push(None);
                slot.weights.push(0.0);
            } else {
                slot.reduced_states.push(Some(PureState::normalized(w)?.density()));
                slot.weights.push(px * prob);
            }
        }
    }
    Ok(out)
}

/// AS of one outcome ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeAs {
    pub outcome: usize,
    pub as_value: f64,
    pub total_weight: f64,
    /// Solver output; absent when a dropped entry makes the outcome trivially
    /// excludable (output the label of the zero-weight measurement).
    pub result: Option<ExclusionResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmeEvaluation {
    pub ame: f64,
    pub per_outcome: Vec<OutcomeAs>,
}

/// AME of the ensemble at the given probe.
pub fn ame_for_probe(ensemble: &MeasurementEnsemble, probe: &BipartiteState, tol: &Tolerances) -> Result<AmeEvaluation> {
    let outcomes = reduced_ensembles(ensemble, probe)?;
    let mut per_outcome = Vec::with_capacity(outcomes.len());
    for oe in &outcomes {
        let total = oe.total_weight();
        let entry = match oe.instance() {
            Some(inst) if !oe.has_dropped() => {
                let r = as_value(&inst, tol)?;
                OutcomeAs { outcome: oe.outcome, as_value: r.as_value, total_weight: total, result: Some(r) }
            }
            _ => OutcomeAs { outcome: oe.outcome, as_value: total, total_weight: total, result: None },
        };
        per_outcome.push(entry);
    }
    let ame = per_outcome.iter().map(|o| o.as_value).sum();
    Ok(AmeEvaluation { ame, per_outcome })
}

/// True iff every pair of retained reduced states within each outcome has
/// `Tr(ρ_i ρ_j) > 1e−9`.
pub fn reduced_pairwise_overlap_check(ensembles: &[OutcomeEnsemble]) -> bool {
    ensembles.iter().all(|oe| {
        let kept: Vec<&DensityOperator> = oe.reduced_states.iter().flatten().collect();
        kept.iter().enumerate().all(|(i, r)| kept[i + 1..].iter().all(|s| r.overlap(s) > 1e-9))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family_r, family_for_state, FamilyRParams};
    use crate::qcore::ProjectiveMeasurement;
    use std::f64::consts::FRAC_PI_3;

    fn z_basis() -> ProjectiveMeasurement {
        ProjectiveMeasurement::from_basis(&[PureState::basis(2, 0).into_amplitudes(), PureState::basis(2, 1).into_amplitudes()], 1e-9)
            .unwrap()
    }

    fn family_r(lambda: f64, x: f64) -> MeasurementEnsemble {
        let b = [PureState::basis(2, 0), PureState::basis(2, 1)];
        build_family_r(&FamilyRParams::new(lambda, x, 0.0, b).unwrap()).unwrap()
    }

    fn two_qubit(lambda: f64) -> BipartiteState {
        BipartiteState::from_coefficients(vec![C64::new(lambda.sqrt(), 0.0), C64::new((1.0 - lambda).sqrt(), 0.0)]).unwrap()
    }

    #[test]
    fn bell_steering() {
        let e = MeasurementEnsemble::uniform(vec![z_basis()]).unwrap();
        let r = reduced_ensembles(&e, &BipartiteState::maximally_entangled(2)).unwrap();
        assert!((r[0].weights[0] - 0.5).abs() < 1e-15);
        let rho = r[0].reduced_states[0].as_ref().unwrap();
        assert!(rho.matrix().max_abs_diff(&PureState::basis(2, 0).projector()) < 1e-15);
    }

    #[test]
    fn product_probe_carries_no_x_information() {
        let chi = PureState::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.5, 0.8)]).unwrap();
        let psi = PureState::normalized(vec![C64::new(0.6, 0.0), C64::new(0.2, -0.7)]).unwrap();
        let probe = BipartiteState::product(&psi, &chi).unwrap();
        for oe in reduced_ensembles(&family_r(0.5, 1.0), &probe).unwrap() {
            for s in oe.reduced_states.iter().flatten() {
                assert!((s.matrix() - &chi.projector()).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_r_outcome_one_matches_closed_form() {
        let (l, x) = (0.5, FRAC_PI_3);
        let r = reduced_ensembles(&family_r(l, x), &two_qubit(l)).unwrap();
        let n = l * x.cos().powi(2) + (1.0 - l) * x.sin().powi(2);
        let expected: [Vec<C64>; 3] = [
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(l.sqrt() * x.cos(), 0.0), C64::new((1.0 - l).sqrt() * x.sin(), 0.0)],
            vec![C64::new(l.sqrt() * x.cos(), 0.0), C64::new(-(1.0 - l).sqrt() * x.sin(), 0.0)],
        ];
        let weights = [l / 3.0, n / 3.0, n / 3.0];
        for k in 0..3 {
            let want = PureState::normalized(expected[k].clone()).unwrap().projector();
            assert!(r[0].reduced_states[k].as_ref().unwrap().matrix().max_abs_diff(&want) < 1e-9);
            assert!((r[0].weights[k] - weights[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn ame_examples() {
        let tol = Tolerances::default();
        let (l, x) = (0.5, FRAC_PI_3);
        let ev = ame_for_probe(&family_r(l, x), &two_qubit(l), &tol).unwrap();
        assert!((ev.ame - 1.0).abs() < 1e-6);

        let s = BipartiteState::maximally_entangled(4);
        let f = family_for_state(&s).unwrap();
        assert!((f.parameter - 0.5).abs() < 1e-15);
        let ev = ame_for_probe(&f.ensemble, &s, &tol).unwrap();
        assert!((ev.ame - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weight_bookkeeping() {
        let s = BipartiteState::maximally_entangled(6);
        let f = family_for_state(&s).unwrap();
        let r = reduced_ensembles(&f.ensemble, &s).unwrap();
        let total: f64 = r.iter().map(OutcomeEnsemble::total_weight).sum();
        assert!((total - 1.0).abs() < 1e-9);
        for x in 0..3 {
            let px: f64 = r.iter().map(|o| o.weights[x]).sum();
            assert!((px - 1.0 / 3.0).abs() < 1e-9);
        }
        assert!(reduced_pairwise_overlap_check(&r));
    }

    #[test]
    fn orthogonal_reduced_states_fail_overlap_check() {
        let oe = OutcomeEnsemble {
            outcome: 0,
            reduced_states: vec![Some(PureState::basis(2, 0).density()), Some(PureState::basis(2, 1).density())],
            weights: vec![0.25, 0.25],
        };
        assert!(!reduced_pairwise_overlap_check(&[oe]));
    }

    #[test]
    fn dimension_mismatch() {
        let e = MeasurementEnsemble::uniform(vec![z_basis()]).unwrap();
        assert!(reduced_ensembles(&e, &BipartiteState::maximally_entangled(3)).is_err());
    }
}
