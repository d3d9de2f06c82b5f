//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use antidist::antimeas::{ame_for_probe, ams_evaluate, ams_optimize, lemma2_feasible, reduced_ensembles, ProbeState};
use antidist::exclusion::{as_value, heinosaari_certificate, heinosaari_solve, theorem1_mu_closed_form, ExclusionInstance};
use antidist::families::{family_for_state, family_with_parameter, theorem1_x_bound, FamilyKind};
use antidist::qcore::{BipartiteState, ComplexMatrix, MeasurementEnsemble, ProjectiveMeasurement, PureState, C64};
use antidist::Tolerances;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn two_qubit_state(lambda: f64, theta: f64, rng: &mut ChaCha8Rng) -> BipartiteState {
    let c = vec![C64::new(lambda.sqrt(), 0.0), C64::from_polar((1.0 - lambda).sqrt(), theta)];
    BipartiteState::new(c, random_basis(2, rng), random_basis(2, rng)).unwrap()
}

fn theorem1_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let tol = Tolerances::default();
    let start = Instant::now();
    let (mut worst_ame, mut worst_ams) = (0.0f64, 0.0f64);
    let mut feasible = 0;
    for _ in 0..200 {
        let lambda = rng.gen_range(0.05..0.95);
        let theta = rng.gen_range(0.0..TAU);
        let s = two_qubit_state(lambda, theta, &mut rng);
        let f = family_for_state(&s).unwrap();
        let bound = theorem1_x_bound(lambda).unwrap();
        assert!((f.parameter.tan().powi(2) - 2.0 * bound).abs() < 1e-9 * bound);
        let ame = ame_for_probe(&f.ensemble, &s, &tol).unwrap().ame;
        worst_ame = worst_ame.max((ame - 1.0).abs());
        if lemma2_feasible(&f.ensemble).unwrap().0 {
            feasible += 1;
        }
        worst_ams = worst_ams.max(ams_optimize(&f.ensemble, 32, rng.gen()).0);
    }
    let elapsed = start.elapsed();
    check(
        worst_ame <= 1e-6 && feasible == 0 && worst_ams <= 1.0 - 1e-3 && elapsed <= Duration::from_secs(30),
        format!(
            "200 states: max |ame-1| = {worst_ame:.2e}, lemma2 feasible = {feasible}, max ams = {worst_ams:.6}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn bound_suite(dims: &[usize], want: FamilyKind, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut feasible = 0;
    let mut count = 0;
    for &d in dims {
        for _ in 0..50 {
            let s = random_state(d, &mut rng);
            let bound = family_for_state(&s).unwrap().bound;
            for factor in [1.0, 0.5] {
                let f = family_with_parameter(&s, (factor * bound).sqrt()).unwrap();
                assert_eq!(f.kind, want);
                let ame = ame_for_probe(&f.ensemble, &s, &tol).unwrap().ame;
                worst = worst.max((ame - 1.0).abs());
                if lemma2_feasible(&f.ensemble).unwrap().0 {
                    feasible += 1;
                }
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-6 && feasible == 0 && elapsed <= Duration::from_secs(120),
        format!(
            "{count} instances at d = {dims:?}: max |ame-1| = {worst:.2e}, lemma2 feasible = {feasible}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0f64;
    let mut missing = 0;
    for _ in 0..100 {
        let lambda = rng.gen_range(0.05..0.95);
        let tan2 = theorem1_x_bound(lambda).unwrap() * rng.gen_range(1.05..4.0);
        let x = tan2.sqrt().atan();
        let s = two_qubit_state(lambda, rng.gen_range(0.0..TAU), &mut rng);
        let f = family_with_parameter(&s, x).unwrap();
        let (mu, nu) = theorem1_mu_closed_form(lambda, x).unwrap();
        let r = reduced_ensembles(&f.ensemble, &s).unwrap();
        for (oe, want) in r.iter().zip([mu, nu]) {
            let states: Vec<_> = oe.reduced_states.iter().map(|s| s.clone().unwrap()).collect();
            match heinosaari_certificate(&states).unwrap() {
                Some(c) => {
                    for (a, b) in c.mu.iter().zip(want) {
                        worst = worst.max((a - b).abs());
                    }
                }
                None => missing += 1,
            }
        }
    }
    let mut boundary = 0.0f64;
    for _ in 0..20 {
        let lambda = rng.gen_range(0.05..0.95);
        let x = theorem1_x_bound(lambda).unwrap().sqrt().atan();
        let s = two_qubit_state(lambda, rng.gen_range(0.0..TAU), &mut rng);
        let f = family_with_parameter(&s, x).unwrap();
        let r = reduced_ensembles(&f.ensemble, &s).unwrap();
        let first: Vec<f64> = r
            .iter()
            .map(|oe| {
                let states: Vec<_> = oe.reduced_states.iter().map(|s| s.clone().unwrap()).collect();
                heinosaari_solve(&states).unwrap().0[0]
            })
            .collect();
        // the binding triple is outcome 1 for λ ≥ 1/2 and outcome 2 otherwise
        let binding = if lambda >= 0.5 { first[0] } else { first[1] };
        boundary = boundary.max(binding.abs());
    }
    check(
        worst <= 1e-8 && missing == 0 && boundary <= 1e-8,
        format!("100 (λ, x): max |μ - closed form| = {worst:.2e}, uncertified = {missing}; boundary max |μ₁| = {boundary:.2e}"),
    )
}

fn as_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let tol = Tolerances::default();
    let (mut worst, mut worst_gap) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let d = 2 + i % 2;
        let (r1, r2) = (random_density(d, &mut rng), random_density(d, &mut rng));
        let (q1, q2) = (rng.gen_range(0.01..2.0), rng.gen_range(0.01..2.0));
        let inst = ExclusionInstance::new(vec![r1.clone(), r2.clone()], vec![q1, q2]).unwrap();
        let r = as_value(&inst, &tol).unwrap();
        let oracle = 0.5 * (q1 + q2) - 0.5 * trace_norm(&(&r1.matrix().scaled(q1) - &r2.matrix().scaled(q2)));
        worst = worst.max((r.primal_value - oracle).abs());
        worst_gap = worst_gap.max(r.duality_gap);
    }
    check(
        worst <= 1e-6 && worst_gap <= 1e-7,
        format!("1000 instances: max |min - oracle| = {worst:.2e}, max gap = {worst_gap:.2e}"),
    )
}

/// Random real qubit states in a random plane of the Bloch sphere.
fn planar_triple(rng: &mut ChaCha8Rng) -> Vec<PureState> {
    let u = random_basis(2, rng);
    (0..3)
        .map(|_| {
            let t: f64 = rng.gen_range(0.0..TAU);
            let v: Vec<C64> = (0..2).map(|i| u[0].amplitudes()[i] * t.cos() + u[1].amplitudes()[i] * t.sin()).collect();
            PureState::normalized(v).unwrap()
        })
        .collect()
}

fn barrett_lemma1() -> Outcome {
    let tol = Tolerances::default();
    let trine: Vec<PureState> = (0..3)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            PureState::new(vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]).unwrap()
        })
        .collect();
    let trine_as = as_value(&ExclusionInstance::uniform_pure(&trine).unwrap(), &tol).unwrap().as_value;

    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let (mut found, mut worst, mut draws) = (0, 0.0f64, 0);
    while found < 100 && draws < 100_000 {
        draws += 1;
        let psi = planar_triple(&mut rng);
        let rhos: Vec<_> = psi.iter().map(PureState::density).collect();
        if heinosaari_certificate(&rhos).unwrap().is_none() {
            continue;
        }
        found += 1;
        let q: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..1.0)).collect();
        let inst = ExclusionInstance::new(rhos, q).unwrap();
        let r = as_value(&inst, &tol).unwrap();
        worst = worst.max((r.as_value - inst.total_weight()).abs());
    }
    check(
        (trine_as - 1.0).abs() <= 1e-6 && found == 100 && worst <= 1e-6,
        format!("trine AS = {trine_as:.9}; {found} certified triples, max |AS - Σq| = {worst:.2e}"),
    )
}

fn structural_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let dims = [2usize, 4, 6, 8, 10, 12, 16];
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = dims[i % dims.len()];
        let s = random_state(d, &mut rng);
        let f = if d == 2 {
            family_with_parameter(&s, rng.gen_range(0.01..FRAC_PI_2 - 0.01)).unwrap()
        } else {
            family_with_parameter(&s, rng.gen_range(0.01..0.99)).unwrap()
        };
        for m in f.ensemble.measurements() {
            let mut total = ComplexMatrix::zeros(d, d);
            for e in m.effects() {
                worst = worst.max((e * e).max_abs_diff(e)).max(e.hermiticity_defect()).max((e.trace().re - 1.0).abs());
                total += e;
            }
            worst = worst.max(total.max_abs_diff(&ComplexMatrix::identity(d)));
        }
    }
    check(worst <= 1e-9, format!("1000 families over d = {dims:?}: max defect = {worst:.2e}"))
}

fn random_ensemble(d: usize, l: usize, rng: &mut ChaCha8Rng) -> MeasurementEnsemble {
    let ms = (0..l)
        .map(|_| {
            let b: Vec<Vec<C64>> = random_basis(d, rng).into_iter().map(PureState::into_amplitudes).collect();
            ProjectiveMeasurement::from_basis(&b, 1e-9).unwrap()
        })
        .collect();
    let raw: Vec<f64> = (0..l).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut priors: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let rest: f64 = priors[..l - 1].iter().sum();
    priors[l - 1] = 1.0 - rest;
    MeasurementEnsemble::new(ms, priors).unwrap()
}

fn observation1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 3;
        let l = 2 + i % 2;
        let e = random_ensemble(d, l, &mut rng);
        let (psi, chi) = (random_pure(d, &mut rng), random_pure(d, &mut rng));
        let probe = BipartiteState::product(&psi, &chi).unwrap();
        let ame = ame_for_probe(&e, &probe, &tol).unwrap().ame;
        let ams = ams_evaluate(&e, &ProbeState::new(psi)).unwrap();
        worst = worst.max((ame - ams).abs());
    }
    check(worst <= 1e-6, format!("100 product probes: max |ame - ams| = {worst:.2e}"))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_antidist");
    let fx = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let bell = format!("{fx}/bell.json");
    let a = run(&["verify", "--state", &bell, "--out", p1.to_str().unwrap()]);
    let b = run(&["verify", "--state", &bell, "--out", p2.to_str().unwrap()]);
    let identical = std::fs::read(&p1).unwrap() == std::fs::read(&p2).unwrap();
    let codes = [
        a.status.code(),
        b.status.code(),
        run(&["verify", "--state", &format!("{fx}/product.json")]).status.code(),
        run(&["verify", "--state", &format!("{fx}/near_product.json")]).status.code(),
        run(&["solve", "--kind", "as", "--instance", &format!("{fx}/trine_as.json"), "--max-iter", "2"]).status.code(),
    ];
    let want = [Some(0), Some(0), Some(2), Some(3), Some(4)];
    check(identical && codes == want, format!("byte-identical = {identical}; exit codes {codes:?} (want {want:?})"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Theorem-1 suite", theorem1_suite),
        ("Theorem-2 suite", || bound_suite(&[4, 8, 12], FamilyKind::S, 102)),
        ("Theorem-3 suite", || bound_suite(&[6, 10], FamilyKind::Q, 105)),
        ("Closed-form mu oracle", closed_form_oracle),
        ("AS solver oracle", as_oracle),
        ("Barrett/Lemma-1 consistency", barrett_lemma1),
        ("Structural completeness", structural_completeness),
        ("Observation-1 equivalence", observation1),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.ok {
            failures += 1;
        }
        println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
