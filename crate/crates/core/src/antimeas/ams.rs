use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ProbeState;
use crate::error::{Error, Result};
use crate::qcore::eig::hermitian_eig;
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::{MeasurementEnsemble, PureState};

const SOFTMIN_TAU: f64 = 1e-6;
const MAX_DESCENT_STEPS: usize = 200;
const POLISH_SWEEPS: usize = 4;
const GOLDEN_STEPS: usize = 30;

/// `Σ_a min_x p_x |⟨v_{a|x}|ψ⟩|²`.
fn inner_sum(ensemble: &MeasurementEnsemble, psi: &[C64]) -> f64 {
    let ms = ensemble.measurements();
    let pr = ensemble.priors();
    (0..ensemble.outcomes())
        .map(|a| ms.iter().zip(pr).map(|(m, p)| p * m.probability(a, psi)).fold(f64::INFINITY, f64::min))
        .sum()
}

fn smoothed_inner_sum(ensemble: &MeasurementEnsemble, psi: &[C64]) -> f64 {
    let ms = ensemble.measurements();
    let pr = ensemble.priors();
    (0..ensemble.outcomes())
        .map(|a| {
            let vals: Vec<f64> = ms.iter().zip(pr).map(|(m, p)| p * m.probability(a, psi)).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            lo - SOFTMIN_TAU * vals.iter().map(|v| (-(v - lo) / SOFTMIN_TAU).exp()).sum::<f64>().ln()
        })
        .sum()
}

/// `1 − Σ_a min_x p_x Tr(σ M_{a|x})` at `σ = |probe⟩⟨probe|`.
pub fn ams_evaluate(ensemble: &MeasurementEnsemble, probe: &ProbeState) -> Result<f64> {
    if probe.state.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch(format!(
            "probe in C^{} but measurements act on C^{}",
            probe.state.dim(),
            ensemble.dim()
        )));
    }
    Ok(1.0 - inner_sum(ensemble, probe.state.amplitudes()))
}

/// Fix the minimizing `x` per outcome, move to the ground state of the induced
/// operator, repeat until the objective stops decreasing.
fn descend(ensemble: &MeasurementEnsemble, start: Vec<C64>) -> Vec<C64> {
    let d = ensemble.dim();
    let ms = ensemble.measurements();
    let pr = ensemble.priors();
    let mut psi = start;
    let mut value = inner_sum(ensemble, &psi);
    for _ in 0..MAX_DESCENT_STEPS {
        let mut h = ComplexMatrix::zeros(d, d);
        for a in 0..ensemble.outcomes() {
            let x = (0..ms.len())
                .min_by(|&i, &j| (pr[i] * ms[i].probability(a, &psi)).total_cmp(&(pr[j] * ms[j].probability(a, &psi))))
                .unwrap_or(0);
            h += &ms[x].effect(a).scaled(pr[x]);
        }
        let Ok(eig) = hermitian_eig(&h, 1e-9) else { break };
        let cand = eig.vector(d - 1);
        let v = inner_sum(ensemble, &cand);
        if v < value - 1e-15 {
            psi = cand;
            value = v;
        } else {
            break;
        }
    }
    psi
}

/// `2d − 2` angles: `d − 1` hyperspherical magnitude angles, then `d − 1` relative phases.
fn to_angles(psi: &[C64]) -> Vec<f64> {
    let d = psi.len();
    let mut out = Vec::with_capacity(2 * d - 2);
    let mut tail: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    for k in (0..d.saturating_sub(1)).rev() {
        tail[k] += tail[k + 1];
    }
    for k in 0..d - 1 {
        out.push(tail[k + 1].max(0.0).sqrt().atan2(psi[k].norm()));
    }
    let p0 = psi[0].arg();
    for z in &psi[1..] {
        out.push(z.arg() - p0);
    }
    out
}

fn from_angles(angles: &[f64], d: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(d);
    let mut s = 1.0;
    for k in 0..d {
        let mag = if k + 1 < d { s * angles[k].cos() } else { s };
        if k + 1 < d {
            s *= angles[k].sin();
        }
        let phase = if k == 0 { 0.0 } else { angles[d - 1 + k - 1] };
        out.push(C64::from_polar(mag, phase));
    }
    out
}

fn golden_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn polish(ensemble: &MeasurementEnsemble, psi: Vec<C64>) -> Vec<C64> {
    let d = psi.len();
    if d < 2 {
        return psi;
    }
    let mut angles = to_angles(&psi);
    let mut current = smoothed_inner_sum(ensemble, &psi);
    let mut width = 0.25;
    for _ in 0..POLISH_SWEEPS {
        for i in 0..angles.len() {
            let centre = angles[i];
            let mut trial = angles.clone();
            let (t, v) = golden_min(
                |t| {
                    trial[i] = t;
                    smoothed_inner_sum(ensemble, &from_angles(&trial, d))
                },
                centre - width,
                centre + width,
            );
            if v < current {
                angles[i] = t;
                current = v;
            }
        }
        width *= 0.5;
    }
    let polished = from_angles(&angles, d);
    if inner_sum(ensemble, &polished) <= inner_sum(ensemble, &psi) {
        polished
    } else {
        psi
    }
}

fn random_vector(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if let Ok(p) = PureState::normalized(v) {
            return p.into_amplitudes();
        }
    }
}

/// Best AMS value found over pure probes by multi-start local search, with the
/// probe attaining it. A lower bound on AMS; deterministic in `seed`.
pub fn ams_optimize(ensemble: &MeasurementEnsemble, restarts: usize, seed: u64) -> (f64, ProbeState) {
    let d = ensemble.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_val = f64::INFINITY;
    let mut best = PureState::basis(d, 0).into_amplitudes();
    for _ in 0..restarts.max(1) {
        let start = random_vector(d, &mut rng);
        let psi = polish(ensemble, descend(ensemble, start));
        let v = inner_sum(ensemble, &psi);
        if v < best_val {
            best_val = v;
            best = psi;
        }
    }
    let probe = ProbeState::new(PureState::normalized(best).expect("search stays on the unit sphere"));
    (1.0 - best_val, probe)
}
