use serde::{Deserialize, Serialize};

use super::eig::hermitian_eig;
use super::matrix::{complete_orthonormal, inner, norm, ComplexMatrix, C64, ZERO};
use super::states::PureState;
use crate::error::{Error, Result};

/// Coefficients below this modulus count as zero for entanglement predicates.
pub const COEFF_ZERO_TOL: f64 = 1e-12;

/// A `d ⊗ d` pure state in Schmidt form `Σ_a c_a |A_a⟩|B_a⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteRepr", into = "BipartiteRepr")]
pub struct BipartiteState {
    coeffs: Vec<C64>,
    basis_a: Vec<PureState>,
    basis_b: Vec<PureState>,
}

#[derive(Serialize, Deserialize)]
struct BipartiteRepr {
    schmidt_coeffs: Vec<[f64; 2]>,
    basis_a: Vec<PureState>,
    basis_b: Vec<PureState>,
}

impl TryFrom<BipartiteRepr> for BipartiteState {
    type Error = Error;

    fn try_from(r: BipartiteRepr) -> Result<Self> {
        let coeffs = r.schmidt_coeffs.iter().map(|p| C64::new(p[0], p[1])).collect();
        BipartiteState::new(coeffs, r.basis_a, r.basis_b)
    }
}

impl From<BipartiteState> for BipartiteRepr {
    fn from(s: BipartiteState) -> Self {
        BipartiteRepr {
            schmidt_coeffs: s.coeffs.iter().map(|z| [z.re, z.im]).collect(),
            basis_a: s.basis_a,
            basis_b: s.basis_b,
        }
    }
}

fn orthonormality_defect(basis: &[PureState]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((u.inner(v) - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

impl BipartiteState {
    pub fn new(coeffs: Vec<C64>, basis_a: Vec<PureState>, basis_b: Vec<PureState>) -> Result<Self> {
        let d = coeffs.len();
        if d == 0 || basis_a.len() != d || basis_b.len() != d {
            return Err(Error::DimensionMismatch("need d coefficients and two bases of d vectors".into()));
        }
        if basis_a.iter().chain(&basis_b).any(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch("basis vectors must live in C^d".into()));
        }
        let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total.sqrt()));
        }
        let defect = orthonormality_defect(&basis_a).max(orthonormality_defect(&basis_b));
        if defect > 1e-9 {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(BipartiteState { coeffs, basis_a, basis_b })
    }

    /// `Σ_a c_a |a⟩|a⟩` in the computational bases.
    pub fn from_coefficients(coeffs: Vec<C64>) -> Result<Self> {
        let d = coeffs.len();
        let basis: Vec<PureState> = (0..d).map(|k| PureState::basis(d, k)).collect();
        Self::new(coeffs, basis.clone(), basis)
    }

    pub fn maximally_entangled(d: usize) -> Self {
        let c = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self::from_coefficients(vec![c; d]).expect("uniform coefficients are normalized")
    }

    /// `|ψ⟩ ⊗ |χ⟩`, with both local bases completed around the factors.
    pub fn product(psi: &PureState, chi: &PureState) -> Result<Self> {
        let d = psi.dim();
        if chi.dim() != d {
            return Err(Error::DimensionMismatch("product factors must share a dimension".into()));
        }
        let complete = |v: &PureState| -> Result<Vec<PureState>> {
            complete_orthonormal(&[v.amplitudes().to_vec()], d).into_iter().map(PureState::normalized).collect()
        };
        let mut coeffs = vec![ZERO; d];
        coeffs[0] = C64::new(1.0, 0.0);
        Self::new(coeffs, complete(psi)?, complete(chi)?)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `|c_a|²`.
    pub fn weights(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn basis_a(&self) -> &[PureState] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[PureState] {
        &self.basis_b
    }

    pub fn schmidt_rank(&self) -> usize {
        self.coeffs.iter().filter(|z| z.norm() > COEFF_ZERO_TOL).count()
    }

    pub fn is_entangled(&self) -> bool {
        self.schmidt_rank() >= 2
    }

    pub fn is_full_schmidt_rank(&self) -> bool {
        self.schmidt_rank() == self.dim()
    }

    /// The state vector on `C^d ⊗ C^d` (A-index major).
    pub fn to_vector(&self) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![ZERO; d * d];
        for (c, (a, b)) in self.coeffs.iter().zip(self.basis_a.iter().zip(&self.basis_b)) {
            for (i, ai) in a.amplitudes().iter().enumerate() {
                let s = c * ai;
                for (j, bj) in b.amplitudes().iter().enumerate() {
                    out[i * d + j] += s * bj;
                }
            }
        }
        out
    }

    pub fn to_pure_state(&self) -> PureState {
        PureState::normalized(self.to_vector()).expect("Schmidt form is normalized")
    }
}

/// Schmidt decomposition of a pure state on `C^d ⊗ C^d`.
///
/// Diagonalizes `Tr_B |ψ⟩⟨ψ| = C C†` for the coefficient matrix `C[i][j] = ψ[i d + j]`.
/// Coefficients come out real, non-negative and descending; phases live in `basis_b`.
/// Directions with vanishing coefficient get an arbitrary orthonormal completion on B.
pub fn schmidt_decompose(psi: &PureState) -> Result<BipartiteState> {
    let n = psi.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionMismatch(format!("{n} is not a square dimension")));
    }
    let amp = psi.amplitudes();
    let c = ComplexMatrix::from_vec(d, d, amp.to_vec())?;
    let rho_a = &c * &c.adjoint();
    let eig = hermitian_eig(&rho_a, 1e-9)?;

    let mut coeffs = Vec::with_capacity(d);
    let mut basis_a = Vec::with_capacity(d);
    let mut partial_b: Vec<Vec<C64>> = Vec::new();
    for k in 0..d {
        let u = eig.vector(k);
        // (⟨u_k| ⊗ 1)|ψ⟩ = c_k |B_k⟩
        let mut b: Vec<C64> = (0..d).map(|j| (0..d).map(|i| u[i].conj() * amp[i * d + j]).sum()).collect();
        let bn = norm(&b);
        if bn > 1e-13 {
            // re-orthonormalize against previous B vectors
            for prev in &partial_b {
                let ov = inner(prev, &b);
                b.iter_mut().zip(prev).for_each(|(x, p)| *x -= ov * p);
            }
            let bn2 = norm(&b);
            b.iter_mut().for_each(|z| *z /= bn2);
            partial_b.push(b);
            coeffs.push(C64::new(bn, 0.0));
        } else {
            coeffs.push(ZERO);
        }
        basis_a.push(PureState::normalized(u)?);
    }
    let rank = partial_b.len();
    let full_b = complete_orthonormal(&partial_b, d);
    // coefficients whose B vector was built sit first; zero ones were appended in order
    let basis_b = full_b.into_iter().map(PureState::normalized).collect::<Result<Vec<_>>>()?;
    debug_assert!(coeffs[rank..].iter().all(|z| *z == ZERO));
    BipartiteState::new(coeffs, basis_a, basis_b)
}
