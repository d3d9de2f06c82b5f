#![allow(dead_code)]

use antidist::qcore::matrix::{complete_orthonormal, C64};
use antidist::qcore::{BipartiteState, ComplexMatrix, DensityOperator, PureState};
use rand::Rng;

pub fn random_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn random_pure(d: usize, rng: &mut impl Rng) -> PureState {
    PureState::normalized(random_vector(d, rng)).unwrap()
}

/// Orthonormal basis from Gram-Schmidt on random vectors.
pub fn random_basis(d: usize, rng: &mut impl Rng) -> Vec<PureState> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    while basis.len() < d {
        let mut v = random_vector(d, rng);
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            basis.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let basis = complete_orthonormal(&basis, d);
    basis.into_iter().map(|v| PureState::normalized(v).unwrap()).collect()
}

/// Normalized coefficients with moduli drawn from `[lo, 1]` and random phases.
pub fn random_coeffs(d: usize, lo: f64, rng: &mut impl Rng) -> Vec<C64> {
    let raw: Vec<C64> = (0..d)
        .map(|_| C64::from_polar(rng.gen_range(lo..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|z| z / n).collect()
}

/// Full-Schmidt-rank state in random local bases.
pub fn random_state(d: usize, rng: &mut impl Rng) -> BipartiteState {
    let c = random_coeffs(d, 0.1, rng);
    BipartiteState::new(c, random_basis(d, rng), random_basis(d, rng)).unwrap()
}

pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    DensityOperator::from_unnormalized(&g * &g.adjoint(), 1e-9).unwrap()
}

/// `‖A‖₁` of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    antidist::qcore::hermitian_eig(m, 1e-9).unwrap().values.iter().map(|l| l.abs()).sum()
}
