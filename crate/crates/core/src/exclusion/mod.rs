//! Antidistinguishability of weighted state sets.
//!
//! `AS[{ρ_k}, {q_k}] = Σ_k q_k − min_{POVM} Σ_k q_k Tr(ρ_k M_k)`, with the
//! weights left unnormalized. The minimum is certified by a dual matrix `Z`
//! with `Z ⪯ q_k ρ_k` for every `k`, so `Tr Z` bounds it from below.

mod solver;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::{DensityOperator, PureState, Tolerances};

/// Pairwise squared overlap threshold for three pure states.
pub const BARRETT_THRESHOLD: f64 = 0.25;

/// Trace below which a POVM element counts as the null operator.
pub const NULL_EFFECT_TRACE: f64 = 1e-8;

const NULL_MIX: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct ExclusionInstance {
    states: Vec<DensityOperator>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    states: Vec<DensityOperator>,
    weights: Vec<f64>,
}

impl TryFrom<InstanceRepr> for ExclusionInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        ExclusionInstance::new(r.states, r.weights)
    }
}

impl From<ExclusionInstance> for InstanceRepr {
    fn from(i: ExclusionInstance) -> Self {
        InstanceRepr { states: i.states, weights: i.weights }
    }
}

impl ExclusionInstance {
    pub fn new(states: Vec<DensityOperator>, weights: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("instance needs at least one state".into()));
        }
        if states.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!("{} states but {} weights", states.len(), weights.len())));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch("states differ in dimension".into()));
        }
        if weights.iter().any(|&q| !(q > 0.0) || !q.is_finite()) {
            return Err(Error::InvalidParameter("weights must be positive and finite".into()));
        }
        Ok(ExclusionInstance { states, weights })
    }

    /// Equal weights `1/n` on pure states.
    pub fn uniform_pure(states: &[PureState]) -> Result<Self> {
        let n = states.len() as f64;
        Self::new(states.iter().map(PureState::density).collect(), vec![1.0 / n; states.len()])
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same states, weights multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Self::new(self.states.clone(), self.weights.iter().map(|q| q * c).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExclusionResult {
    pub as_value: f64,
    /// `Σ_k q_k Tr(ρ_k M_k)` at the returned POVM.
    pub primal_value: f64,
    /// `Tr Z`.
    pub dual_value: f64,
    pub povm: Vec<ComplexMatrix>,
    pub dual_certificate: ComplexMatrix,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Set when null POVM elements were mixed with `1/K` to keep every element nonzero.
    pub adjusted: bool,
}

/// Computes `AS` with a primal POVM and a dual certificate whose gap is at most
/// `tol.solver_gap`.
pub fn as_value(instance: &ExclusionInstance, tol: &Tolerances) -> Result<ExclusionResult> {
    let a: Vec<ComplexMatrix> =
        instance.states.iter().zip(&instance.weights).map(|(s, q)| s.matrix().scaled(*q)).collect();
    let sol = solver::minimize(&a, tol)?;
    let total = instance.total_weight();
    let mut povm = sol.povm;
    let mut primal = sol.primal;
    let mut adjusted = false;

    let perfect = primal <= tol.theorem;
    if perfect && a.len() > 1 && povm.iter().any(|m| m.trace().re < NULL_EFFECT_TRACE) {
        let k = povm.len() as f64;
        let d = instance.dim();
        let mix = ComplexMatrix::identity(d).scaled(1.0 / k);
        povm = povm.iter().map(|m| &m.scaled(1.0 - NULL_MIX) + &mix.scaled(NULL_MIX)).collect();
        primal = a.iter().zip(&povm).map(|(ak, mk)| ak.inner_re(mk)).sum();
        adjusted = true;
    }

    Ok(ExclusionResult {
        as_value: total - primal,
        primal_value: primal,
        dual_value: sol.dual,
        povm,
        dual_certificate: sol.z,
        duality_gap: (primal - sol.dual).abs(),
        iterations: sol.iterations,
        adjusted,
    })
}

/// True iff all three pairwise squared overlaps are at most 1/4 (up to 1e−12).
pub fn barrett_sufficient(psi1: &PureState, psi2: &PureState, psi3: &PureState) -> bool {
    let limit = BARRETT_THRESHOLD + 1e-12;
    psi1.overlap(psi2) <= limit && psi1.overlap(psi3) <= limit && psi2.overlap(psi3) <= limit
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeinosaariCertificate {
    pub mu: Vec<f64>,
}

/// Least-squares solution of `Σ_i μ_i ρ_i = 1` for qubit states and its residual
/// (Frobenius norm of `Σ_i μ_i ρ_i − 1`).
pub fn heinosaari_solve(states: &[DensityOperator]) -> Result<(Vec<f64>, f64)> {
    if states.is_empty() || states.iter().any(|s| s.dim() != 2) {
        return Err(Error::DimensionMismatch("qubit states required".into()));
    }
    let n = states.len();
    let a = DMatrix::<f64>::from_fn(4, n, |row, i| {
        let m = states[i].matrix();
        match row {
            0 => m[(0, 0)].re,
            1 => m[(1, 1)].re,
            2 => m[(0, 1)].re,
            _ => m[(0, 1)].im,
        }
    });
    let b = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
    let mu = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("least squares failed: {e}")))?;
    let mut sum = ComplexMatrix::zeros(2, 2);
    for (s, m) in states.iter().zip(mu.iter()) {
        sum += &s.matrix().scaled(*m);
    }
    let residual = (&sum - &ComplexMatrix::identity(2)).frobenius_norm();
    Ok((mu.iter().copied().collect(), residual))
}

/// Positive `μ` with `Σ_i μ_i ρ_i = 1`, when the least-squares solution is exact
/// and strictly positive. Absence proves nothing.
pub fn heinosaari_certificate(states: &[DensityOperator]) -> Result<Option<HeinosaariCertificate>> {
    let (mu, residual) = heinosaari_solve(states)?;
    Ok((residual <= 1e-8 && mu.iter().all(|&m| m > 1e-10)).then_some(HeinosaariCertificate { mu }))
}

/// Closed-form `μ` for the two reduced qubit triples of family R (outcomes 1 and 2).
pub fn theorem1_mu_closed_form(lambda: f64, x: f64) -> Result<([f64; 3], [f64; 3])> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must lie in (0, 1)")));
    }
    if !(x > 0.0 && x < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("x {x} must lie in (0, pi/2)")));
    }
    let (c2, s2) = (x.cos().powi(2), x.sin().powi(2));
    let l = lambda;
    let mu23 = (l * c2 + (1.0 - l) * s2) / (2.0 * (1.0 - l) * s2);
    let mu1 = 1.0 - l * c2 / ((1.0 - l) * s2);
    let nu23 = (l * s2 + (1.0 - l) * c2) / (2.0 * l * s2);
    let nu1 = 1.0 - (1.0 - l) * c2 / (l * s2);
    Ok(([mu1, mu23, mu23], [nu1, nu23, nu23]))
}
