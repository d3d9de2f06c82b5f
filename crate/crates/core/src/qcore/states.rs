use serde::{Deserialize, Serialize};

use super::eig::hermitian_eig;
use super::matrix::{inner, kron_vec, norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-9;

/// Unit vector in `C^dim`. Serialized as a bare amplitude array `[[re, im], ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl TryFrom<Vec<[f64; 2]>> for PureState {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        PureState::new(v.into_iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}

impl From<PureState> for Vec<[f64; 2]> {
    fn from(s: PureState) -> Self {
        s.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if amplitudes.is_empty() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(PureState { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[k] = C64::new(1.0, 0.0);
        PureState { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { matrix: self.projector() }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityOperator {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityOperator::new(m, NORM_TOL)
    }
}

impl From<DensityOperator> for ComplexMatrix {
    fn from(d: DensityOperator) -> Self {
        d.matrix
    }
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density operator must be square".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::BadTrace(tr.re));
        }
        let matrix = matrix.hermitian_part();
        let min = hermitian_eig(&matrix, tol)?.min();
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityOperator { matrix })
    }

    /// Normalizes a nonzero PSD operator by its trace.
    pub fn from_unnormalized(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::BadTrace(tr));
        }
        Self::new(matrix.scaled(1.0 / tr), tol)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { matrix: ComplexMatrix::identity(dim).scaled(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr(ρ σ)`.
    pub fn overlap(&self, other: &DensityOperator) -> f64 {
        self.matrix.trace_of_product(&other.matrix).re
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { matrix: self.matrix.kron(&other.matrix) }
    }
}

fn split_dims(total: usize, d_a: usize) -> Result<usize> {
    if d_a == 0 || !total.is_multiple_of(d_a) {
        return Err(Error::DimensionMismatch(format!("{d_a} does not divide {total}")));
    }
    Ok(total / d_a)
}

/// Traces out the first factor of an operator on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace_a_matrix(m: &ComplexMatrix, d_a: usize) -> Result<ComplexMatrix> {
    let d_b = split_dims(m.rows(), d_a)?;
    Ok(ComplexMatrix::from_fn(d_b, d_b, |j, l| (0..d_a).map(|i| m[(i * d_b + j, i * d_b + l)]).sum()))
}

/// Traces out the second factor of an operator on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace_b_matrix(m: &ComplexMatrix, d_a: usize) -> Result<ComplexMatrix> {
    let d_b = split_dims(m.rows(), d_a)?;
    Ok(ComplexMatrix::from_fn(d_a, d_a, |i, k| (0..d_b).map(|j| m[(i * d_b + j, k * d_b + j)]).sum()))
}

/// `Tr_A ρ` for a state on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace_a(rho: &DensityOperator, d_a: usize) -> Result<DensityOperator> {
    let m = partial_trace_a_matrix(rho.matrix(), d_a)?;
    Ok(DensityOperator { matrix: m.hermitian_part() })
}

/// `Tr_B ρ` for a state on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace_b(rho: &DensityOperator, d_a: usize) -> Result<DensityOperator> {
    let m = partial_trace_b_matrix(rho.matrix(), d_a)?;
    Ok(DensityOperator { matrix: m.hermitian_part() })
}

/// Bob's unnormalized conditional state `Tr_A |χ⟩⟨χ|` for a vector on `C^{dA} ⊗ C^{dB}`,
/// computed without forming the full outer product.
pub fn reduced_b_of_vector(chi: &[C64], d_a: usize) -> Result<ComplexMatrix> {
    let d_b = split_dims(chi.len(), d_a)?;
    Ok(ComplexMatrix::from_fn(d_b, d_b, |j, l| {
        (0..d_a).map(|i| chi[i * d_b + j] * chi[i * d_b + l].conj()).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(n: usize, rng: &mut impl Rng) -> DensityOperator {
        let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        DensityOperator::from_unnormalized(&g * &g.adjoint(), 1e-9).unwrap()
    }

    /// Independent brute-force contraction over explicit index tuples.
    fn brute_trace_a(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(db, db);
        for i in 0..da {
            for ip in 0..da {
                if i != ip {
                    continue;
                }
                for j in 0..db {
                    for l in 0..db {
                        out[(j, l)] += m[(i * db + j, ip * db + l)];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn product_basis_state() {
        let s = PureState::basis(2, 0).tensor(&PureState::basis(2, 0));
        let r = partial_trace_a(&s.density(), 2).unwrap();
        assert!(r.matrix().max_abs_diff(&PureState::basis(2, 0).projector()) < 1e-15);
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = PureState::new(vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]).unwrap();
        let r = partial_trace_a(&phi.density(), 2).unwrap();
        assert!(r.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_density(2, &mut rng);
            let b = random_density(2, &mut rng);
            let r = partial_trace_a(&a.tensor(&b), 2).unwrap();
            assert!(r.matrix().max_abs_diff(b.matrix()) < 1e-12);
            let r = partial_trace_b(&a.tensor(&b), 2).unwrap();
            assert!(r.matrix().max_abs_diff(a.matrix()) < 1e-12);
        }
    }

    #[test]
    fn agrees_with_brute_force_and_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let da = rng.gen_range(1..4);
            let db = rng.gen_range(1..4);
            let rho = random_density(da * db, &mut rng);
            let r = partial_trace_a(&rho, da).unwrap();
            let want = brute_trace_a(rho.matrix(), da, db);
            assert!(r.matrix().max_abs_diff(&want) < 1e-14);
            assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(r.matrix().is_psd(1e-9));
        }
    }

    #[test]
    fn vector_route_matches_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v: Vec<C64> = (0..6).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let a = reduced_b_of_vector(&v, 2).unwrap();
        let b = partial_trace_a_matrix(&ComplexMatrix::outer(&v, &v), 2).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityOperator::maximally_mixed(6);
        assert!(matches!(partial_trace_a(&rho, 4), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn constructors_validate() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.6]), 1e-9).is_err());
        assert!(DensityOperator::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5]), 1e-9).is_err());
        assert!(DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.25, 0.75]), 1e-9).is_ok());
    }
}
