use serde::{Deserialize, Serialize};

use super::matrix::{norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

const CHECK_TOL: f64 = 1e-9;

/// Rank-1 projective measurement `{M_a}` with `Σ_a M_a = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementRepr", into = "MeasurementRepr")]
pub struct ProjectiveMeasurement {
    effects: Vec<ComplexMatrix>,
    /// Unit vectors `v_a` with `M_a = |v_a⟩⟨v_a|`, one per effect.
    vectors: Vec<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementRepr {
    effects: Vec<ComplexMatrix>,
}

impl TryFrom<MeasurementRepr> for ProjectiveMeasurement {
    type Error = Error;

    fn try_from(r: MeasurementRepr) -> Result<Self> {
        ProjectiveMeasurement::new(r.effects, CHECK_TOL)
    }
}

impl From<ProjectiveMeasurement> for MeasurementRepr {
    fn from(m: ProjectiveMeasurement) -> Self {
        MeasurementRepr { effects: m.effects }
    }
}

/// Unit vector spanning the range of the rank-1 projector `p` (up to phase).
fn range_vector(p: &ComplexMatrix) -> Vec<C64> {
    let n = p.rows();
    let j = (0..n).max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re)).unwrap_or(0);
    let mut v = p.column(j);
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    v
}

impl ProjectiveMeasurement {
    pub fn new(effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let dim = effects.first().map(|e| e.rows()).ok_or_else(|| {
            Error::DimensionMismatch("measurement needs at least one effect".into())
        })?;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (a, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::DimensionMismatch(format!("effect {a} is not {dim}x{dim}")));
            }
            if !e.is_projector(tol) || (e.trace().re - 1.0).abs() > tol {
                return Err(Error::NotRankOneProjector(a));
            }
            total += e;
        }
        let defect = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > tol {
            return Err(Error::Incomplete(defect));
        }
        let vectors = effects.iter().map(range_vector).collect();
        Ok(ProjectiveMeasurement { effects, vectors })
    }

    /// Measurement in the orthonormal basis `vectors` (normalized here).
    pub fn from_basis(vectors: &[Vec<C64>], tol: f64) -> Result<Self> {
        let effects = vectors.iter().map(|v| ComplexMatrix::projector(v)).collect();
        Self::new(effects, tol)
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &ComplexMatrix {
        &self.effects[a]
    }

    /// Range vector of effect `a`.
    pub fn effect_vector(&self, a: usize) -> &[C64] {
        &self.vectors[a]
    }

    /// Born probability `⟨ψ|M_a|ψ⟩` for a pure state.
    pub fn probability(&self, a: usize, psi: &[C64]) -> f64 {
        super::matrix::inner(&self.vectors[a], psi).norm_sqr()
    }
}

/// Measurements `{M_{a|x}}` sampled with priors `p_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleRepr", into = "EnsembleRepr")]
pub struct MeasurementEnsemble {
    measurements: Vec<ProjectiveMeasurement>,
    priors: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleRepr {
    priors: Vec<f64>,
    measurements: Vec<ProjectiveMeasurement>,
}

impl TryFrom<EnsembleRepr> for MeasurementEnsemble {
    type Error = Error;

    fn try_from(r: EnsembleRepr) -> Result<Self> {
        MeasurementEnsemble::new(r.measurements, r.priors)
    }
}

impl From<MeasurementEnsemble> for EnsembleRepr {
    fn from(e: MeasurementEnsemble) -> Self {
        EnsembleRepr { priors: e.priors, measurements: e.measurements }
    }
}

impl MeasurementEnsemble {
    pub fn new(measurements: Vec<ProjectiveMeasurement>, priors: Vec<f64>) -> Result<Self> {
        if measurements.is_empty() {
            return Err(Error::InvalidPriors("ensemble needs at least one measurement".into()));
        }
        if priors.len() != measurements.len() {
            return Err(Error::InvalidPriors(format!(
                "{} priors for {} measurements",
                priors.len(),
                measurements.len()
            )));
        }
        if priors.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidPriors("every prior must be positive".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPriors(format!("priors sum to {total}")));
        }
        let (dim, f) = (measurements[0].dim(), measurements[0].outcomes());
        if measurements.iter().any(|m| m.dim() != dim || m.outcomes() != f) {
            return Err(Error::DimensionMismatch("measurements differ in dimension or outcome count".into()));
        }
        Ok(MeasurementEnsemble { measurements, priors })
    }

    pub fn uniform(measurements: Vec<ProjectiveMeasurement>) -> Result<Self> {
        let l = measurements.len();
        Self::new(measurements, vec![1.0 / l as f64; l])
    }

    pub fn measurements(&self) -> &[ProjectiveMeasurement] {
        &self.measurements
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.measurements[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.measurements[0].outcomes()
    }
}
