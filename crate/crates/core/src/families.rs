//! The three-measurement families adapted to an entangled probe.
//!
//! * Family R (qubits): bases `{ψ, ψ⊥}`, `{ψ', ψ'⊥}`, `{ψ̄, ψ̄⊥}` with
//!   `ψ' = cos x ψ + e^{iθ} sin x ψ⊥` and `ψ̄ = cos x ψ − e^{iθ} sin x ψ⊥`.
//! * Family S (`m ≡ 0 mod 4`) and family Q (`n ≡ 2 mod 4`, `n ≥ 6`): the first
//!   measurement is the probe's Schmidt basis `{η_a}`; the other two rotate
//!   disjoint pairs `(a, partner(a))` of basis vectors by the family parameter.
//!
//! For S, the third measurement pairs `a` with `m + 1 − a` for every `a`
//! (written `d + 1 − a` in some presentations of the construction; the
//! `m`-dimensional reading is the only consistent one).
//!
//! Outcome indices are 0-based in code; the pairing rules below are stated
//! 1-based to match the usual presentation.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::bipartite::COEFF_ZERO_TOL;
use crate::qcore::matrix::{inner, C64};
use crate::qcore::{BipartiteState, MeasurementEnsemble, ProjectiveMeasurement, PureState};

const BUILD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    R,
    S,
    Q,
}

#[derive(Clone, Debug)]
pub struct FamilyRParams {
    pub lambda: f64,
    pub x_angle: f64,
    pub phase: f64,
    pub basis: [PureState; 2],
}

impl FamilyRParams {
    pub fn new(lambda: f64, x_angle: f64, phase: f64, basis: [PureState; 2]) -> Result<Self> {
        let p = FamilyRParams { lambda, x_angle, phase, basis };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidParameter(format!("lambda {} must lie in (0, 1)", self.lambda)));
        }
        if !(self.x_angle > 0.0 && self.x_angle < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!("x {} must lie in (0, pi/2)", self.x_angle)));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidParameter("phase must be finite".into()));
        }
        check_basis(&self.basis, 2)
    }
}

#[derive(Clone, Debug)]
pub struct FamilySParams {
    pub omega: f64,
    pub coeffs: Vec<C64>,
    pub basis: Vec<PureState>,
}

impl FamilySParams {
    pub fn new(omega: f64, coeffs: Vec<C64>, basis: Vec<PureState>) -> Result<Self> {
        let p = FamilySParams { omega, coeffs, basis };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let m = self.coeffs.len();
        if m < 4 || !m.is_multiple_of(4) {
            return Err(Error::InvalidParameter(format!("family S needs m ≡ 0 mod 4, m ≥ 4; got {m}")));
        }
        check_fraction("omega", self.omega)?;
        check_nonzero(&self.coeffs)?;
        check_basis(&self.basis, m)
    }
}

#[derive(Clone, Debug)]
pub struct FamilyQParams {
    pub epsilon: f64,
    pub coeffs: Vec<C64>,
    pub basis: Vec<PureState>,
}

impl FamilyQParams {
    pub fn new(epsilon: f64, coeffs: Vec<C64>, basis: Vec<PureState>) -> Result<Self> {
        let p = FamilyQParams { epsilon, coeffs, basis };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.coeffs.len();
        if n < 6 || n % 4 != 2 {
            return Err(Error::InvalidParameter(format!("family Q needs n ≡ 2 mod 4, n ≥ 6; got {n}")));
        }
        check_fraction("epsilon", self.epsilon)?;
        check_nonzero(&self.coeffs)?;
        check_basis(&self.basis, n)
    }
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} {v} must lie in (0, 1)")))
    }
}

fn check_nonzero(coeffs: &[C64]) -> Result<()> {
    match coeffs.iter().position(|c| c.norm() <= COEFF_ZERO_TOL) {
        Some(i) => Err(Error::ZeroCoefficient(i)),
        None => Ok(()),
    }
}

fn check_basis(basis: &[PureState], dim: usize) -> Result<()> {
    if basis.len() != dim || basis.iter().any(|b| b.dim() != dim) {
        return Err(Error::DimensionMismatch(format!("need {dim} basis vectors in C^{dim}")));
    }
    let mut worst: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((u.inner(v) - C64::new(want, 0.0)).norm());
        }
    }
    if worst > BUILD_TOL {
        return Err(Error::NotOrthonormal(worst));
    }
    Ok(())
}

/// Pairing of outcome indices used by a rotated measurement.
///
/// Outcome `a` gets the vector `w η_a + √(1−w²) η_p` when it leads its pair
/// and `√(1−w²) η_p − w η_a` otherwise, with `p = partner[a]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub partner: Vec<usize>,
    pub leading: Vec<bool>,
}

impl Pairing {
    fn from_rule(n: usize, rule: impl Fn(usize) -> (usize, bool)) -> Self {
        let (partner, leading) = (1..=n)
            .map(|a| {
                let (p, lead) = rule(a);
                (p - 1, lead)
            })
            .unzip();
        let p = Pairing { partner, leading };
        debug_assert!(p.is_involution());
        p
    }

    fn is_involution(&self) -> bool {
        self.partner.iter().enumerate().all(|(a, &p)| {
            p != a && self.partner[p] == a && self.leading[p] != self.leading[a]
        })
    }

    /// Odd/even neighbour pairing `(1,2), (3,4), …` of the second measurement.
    pub fn neighbours(n: usize) -> Self {
        Self::from_rule(n, |a| if a % 2 == 1 { (a + 1, true) } else { (a - 1, false) })
    }

    /// Mirror pairing `(a, m+1−a)` of family S's third measurement.
    pub fn mirror(m: usize) -> Self {
        Self::from_rule(m, |a| (m + 1 - a, a <= m / 2))
    }

    /// Third measurement of family Q: mirror pairing outside the middle block,
    /// shift-by-two pairing on the four middle indices.
    pub fn mirror_with_shifted_middle(n: usize) -> Self {
        Self::from_rule(n, |a| {
            if a <= (n - 4) / 2 {
                (n + 1 - a, true)
            } else if a >= (n + 6) / 2 {
                (n + 1 - a, false)
            } else if a == (n - 2) / 2 || a == n / 2 {
                (a + 2, true)
            } else {
                (a - 2, false)
            }
        })
    }

    fn vectors(&self, basis: &[PureState], w: f64) -> Vec<Vec<C64>> {
        let s = (1.0 - w * w).sqrt();
        (0..self.partner.len())
            .map(|a| {
                let (ea, ep) = (basis[a].amplitudes(), basis[self.partner[a]].amplitudes());
                let (ca, cp) = if self.leading[a] { (w, s) } else { (-w, s) };
                ea.iter().zip(ep).map(|(x, y)| x * ca + y * cp).collect()
            })
            .collect()
    }
}

fn uniform_three(bases: [Vec<Vec<C64>>; 3]) -> Result<MeasurementEnsemble> {
    let ms = bases
        .iter()
        .map(|b| ProjectiveMeasurement::from_basis(b, BUILD_TOL))
        .collect::<Result<Vec<_>>>()?;
    MeasurementEnsemble::uniform(ms)
}

fn basis_vectors(basis: &[PureState]) -> Vec<Vec<C64>> {
    basis.iter().map(|b| b.amplitudes().to_vec()).collect()
}

pub fn build_family_r(params: &FamilyRParams) -> Result<MeasurementEnsemble> {
    params.validate()?;
    let (c, s) = (params.x_angle.cos(), params.x_angle.sin());
    let e = C64::from_polar(1.0, params.phase);
    let psi = params.basis[0].amplitudes();
    let perp = params.basis[1].amplitudes();
    let combo = |a: C64, b: C64| -> Vec<C64> { psi.iter().zip(perp).map(|(x, y)| x * a + y * b).collect() };
    let one = C64::new(1.0, 0.0);
    let (c, s) = (one * c, one * s);
    uniform_three([
        basis_vectors(&params.basis),
        vec![combo(c, e * s), combo(s, -e * c)],
        vec![combo(c, -e * s), combo(s, e * c)],
    ])
}

pub fn build_family_s(params: &FamilySParams) -> Result<MeasurementEnsemble> {
    params.validate()?;
    let m = params.basis.len();
    uniform_three([
        basis_vectors(&params.basis),
        Pairing::neighbours(m).vectors(&params.basis, params.omega),
        Pairing::mirror(m).vectors(&params.basis, params.omega),
    ])
}

pub fn build_family_q(params: &FamilyQParams) -> Result<MeasurementEnsemble> {
    params.validate()?;
    let n = params.basis.len();
    uniform_three([
        basis_vectors(&params.basis),
        Pairing::neighbours(n).vectors(&params.basis, params.epsilon),
        Pairing::mirror_with_shifted_middle(n).vectors(&params.basis, params.epsilon),
    ])
}

/// Infimum of admissible `tan² x` for family R: `max{λ/(1−λ), (1−λ)/λ}`.
pub fn theorem1_x_bound(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must lie in (0, 1)")));
    }
    Ok((lambda / (1.0 - lambda)).max((1.0 - lambda) / lambda))
}

/// `min_a min_{pairings} r_p / (3 r_a + r_p)` over the partners each outcome
/// is rotated with. Each term is the largest squared parameter for which the
/// squared overlap between Bob's state `|a⟩` and the rotated conditional state
/// stays at most 1/4.
fn pairing_bound(weights: &[f64], pairings: &[Pairing]) -> f64 {
    pairings
        .iter()
        .flat_map(|pg| {
            pg.partner.iter().enumerate().map(move |(a, &p)| weights[p] / (3.0 * weights[a] + weights[p]))
        })
        .fold(f64::INFINITY, f64::min)
}

fn moduli_squared(coeffs: &[C64]) -> Result<Vec<f64>> {
    check_nonzero(coeffs)?;
    Ok(coeffs.iter().map(|c| c.norm_sqr()).collect())
}

/// Largest admissible `ω²` for family S given the probe's Schmidt coefficients.
pub fn theorem2_omega_bound(coeffs: &[C64]) -> Result<f64> {
    let m = coeffs.len();
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("coefficient count {m} must be even")));
    }
    let w = moduli_squared(coeffs)?;
    Ok(pairing_bound(&w, &[Pairing::neighbours(m), Pairing::mirror(m)]))
}

/// Largest admissible `ε²` for family Q given the probe's Schmidt coefficients.
///
/// Every ratio `r_p / (3 r_a + r_p)` is taken exactly at the `(a, p)` pairs the
/// second and third measurements rotate, which covers the shifts ±1, ±2 and the
/// mirror `n + 1 − a` wherever the construction uses them.
pub fn theorem3_epsilon_bound(coeffs: &[C64]) -> Result<f64> {
    let n = coeffs.len();
    if n < 6 || n % 4 != 2 {
        return Err(Error::InvalidParameter(format!("family Q needs n ≡ 2 mod 4, n ≥ 6; got {n}")));
    }
    let w = moduli_squared(coeffs)?;
    Ok(pairing_bound(&w, &[Pairing::neighbours(n), Pairing::mirror_with_shifted_middle(n)]))
}

/// A family built for a specific probe.
#[derive(Clone, Debug)]
pub struct FamilyChoice {
    pub kind: FamilyKind,
    pub ensemble: MeasurementEnsemble,
    /// `x` (radians) for R, `ω` for S, `ε` for Q.
    pub parameter: f64,
    /// Infimum of `tan² x` for R; maximum of `ω²` / `ε²` for S / Q.
    pub bound: f64,
}

fn check_probe(state: &BipartiteState) -> Result<FamilyKind> {
    let d = state.dim();
    if !d.is_multiple_of(2) {
        return Err(Error::OddDimension(d));
    }
    if !state.is_entangled() {
        return Err(Error::NotEntangled);
    }
    if d == 2 {
        return Ok(FamilyKind::R);
    }
    check_nonzero(state.coeffs())?;
    Ok(if d.is_multiple_of(4) { FamilyKind::S } else { FamilyKind::Q })
}

/// Bound associated with the family for this probe (see [`FamilyChoice::bound`]).
pub fn bound_for_state(state: &BipartiteState) -> Result<(FamilyKind, f64)> {
    let kind = check_probe(state)?;
    let bound = match kind {
        FamilyKind::R => theorem1_x_bound(state.coeffs()[0].norm_sqr())?,
        FamilyKind::S => theorem2_omega_bound(state.coeffs())?,
        FamilyKind::Q => theorem3_epsilon_bound(state.coeffs())?,
    };
    Ok((kind, bound))
}

/// Default parameter: `tan² x = 2 ×` bound for R (the condition is strict),
/// `ω² = ` bound for S and `ε² = ` bound for Q.
pub fn family_for_state(state: &BipartiteState) -> Result<FamilyChoice> {
    let (kind, bound) = bound_for_state(state)?;
    let parameter = match kind {
        FamilyKind::R => (2.0 * bound).sqrt().atan(),
        FamilyKind::S | FamilyKind::Q => bound.sqrt(),
    };
    family_with_parameter(state, parameter)
}

/// Family for `state` with an explicit parameter (`x`, `ω` or `ε`).
pub fn family_with_parameter(state: &BipartiteState, parameter: f64) -> Result<FamilyChoice> {
    let (kind, bound) = bound_for_state(state)?;
    let basis = state.basis_a().to_vec();
    let coeffs = state.coeffs().to_vec();
    let ensemble = match kind {
        FamilyKind::R => {
            let phase = coeffs[1].arg() - coeffs[0].arg();
            let basis = [basis[0].clone(), basis[1].clone()];
            build_family_r(&FamilyRParams::new(coeffs[0].norm_sqr(), parameter, phase, basis)?)?
        }
        FamilyKind::S => build_family_s(&FamilySParams::new(parameter, coeffs, basis)?)?,
        FamilyKind::Q => build_family_q(&FamilyQParams::new(parameter, coeffs, basis)?)?,
    };
    Ok(FamilyChoice { kind, ensemble, parameter, bound })
}

/// Largest distance between an effect of measurement 1 and any effect of
/// measurements 2 or 3, and between effects of measurements 2 and 3; returns
/// the minimum over all such cross-measurement pairs.
pub fn min_cross_effect_distance(ensemble: &MeasurementEnsemble) -> f64 {
    let ms = ensemble.measurements();
    let mut best = f64::INFINITY;
    for x in 0..ms.len() {
        for y in (x + 1)..ms.len() {
            for e in ms[x].effects() {
                for g in ms[y].effects() {
                    best = best.min(e.max_abs_diff(g));
                }
            }
        }
    }
    best
}

#[allow(dead_code)]
fn overlap(u: &[C64], v: &[C64]) -> f64 {
    inner(u, v).norm_sqr()
}
