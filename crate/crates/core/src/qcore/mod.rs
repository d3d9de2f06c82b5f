//! Dense complex linear algebra and the state/measurement data model.
//!
//! JSON encoding shared by every file the crate reads or writes:
//! complex scalars are `[re, im]` pairs, matrices are
//! `{"rows", "cols", "data"}` with row-major `data`, pure states are bare
//! amplitude arrays. All deserializers re-check the type invariants.

pub mod bipartite;
pub mod eig;
pub mod matrix;
pub mod measurement;
pub mod states;

use serde::{Deserialize, Serialize};

pub use bipartite::{schmidt_decompose, BipartiteState};
pub use eig::{hermitian_eig, HermitianEigen};
pub use matrix::{tensor, ComplexMatrix, C64};
pub use measurement::{MeasurementEnsemble, ProjectiveMeasurement};
pub use states::{partial_trace_a, partial_trace_b, DensityOperator, PureState};

/// Numerical tolerances, threaded explicitly through every computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact algebraic identities (completeness, Hermiticity, normalization).
    pub algebraic: f64,
    /// Quantities produced by iterative procedures (eigenvectors, solver output).
    pub iterative: f64,
    /// Certified primal-dual gap required from the exclusion solver.
    pub solver_gap: f64,
    /// Slack allowed when checking that an antidistinguishability value equals 1.
    pub theorem: f64,
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { algebraic: 1e-9, iterative: 1e-8, solver_gap: 1e-7, theorem: 1e-6, max_iterations: 100_000 }
    }
}
