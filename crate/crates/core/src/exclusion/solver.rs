//! Primal-dual interior-point method for
//!
//! ```text
//! min Σ_k ⟨C_k, M_k⟩   s.t.  Σ_k M_k = 1,  M_k ⪰ 0
//! max Tr Y             s.t.  C_k − Y ⪰ 0
//! ```
//!
//! using the HKM search direction. Every iterate is rounded to an exactly
//! feasible primal/dual pair, and the best certified pair is kept.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::eig::{hermitian_eig, inv_sqrt, support_basis};
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::Tolerances;

const SIGMA: f64 = 0.1;
const STEP_FRACTION: f64 = 0.95;
const STALL_LIMIT: usize = 25;
const SUPPORT_CUT: f64 = 1e-12;

pub(crate) struct Certified {
    pub povm: Vec<ComplexMatrix>,
    pub z: ComplexMatrix,
    pub primal: f64,
    pub dual: f64,
    pub iterations: usize,
}

struct Rounded {
    gap: f64,
    m: Vec<ComplexMatrix>,
    y: ComplexMatrix,
    primal: f64,
    dual: f64,
}

fn eig_tol() -> f64 {
    1e-7
}

/// Feasible primal/dual pair nearest to the current iterate.
fn round(c: &[ComplexMatrix], m: &[ComplexMatrix], y: &ComplexMatrix) -> Result<Rounded> {
    let r = y.rows();
    let clamped = m
        .iter()
        .map(|mk| Ok(hermitian_eig(&mk.hermitian_part(), eig_tol())?.map(|l| l.max(0.0))))
        .collect::<Result<Vec<_>>>()?;
    let mut total = ComplexMatrix::zeros(r, r);
    clamped.iter().for_each(|mk| total += mk);
    let t = inv_sqrt(&total, eig_tol())?;
    let m: Vec<ComplexMatrix> = clamped.iter().map(|mk| (&(&t * mk) * &t).hermitian_part()).collect();
    let primal: f64 = c.iter().zip(&m).map(|(ck, mk)| ck.inner_re(mk)).sum();

    let mut shift = f64::INFINITY;
    for ck in c {
        shift = shift.min(hermitian_eig(&(ck - y).hermitian_part(), eig_tol())?.min());
    }
    let y = y + &ComplexMatrix::identity(r).scaled(shift);
    let dual = y.trace().re;
    Ok(Rounded { gap: (primal - dual).abs(), m, y, primal, dual })
}

/// Largest `α` keeping `X + α D ⪰ 0` for positive definite `X`.
fn max_step(x: &ComplexMatrix, d: &ComplexMatrix) -> Result<f64> {
    let w = inv_sqrt(x, eig_tol())?;
    let lmin = hermitian_eig(&(&(&w * d) * &w).hermitian_part(), eig_tol())?.min();
    Ok(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

/// Solves `Σ_k Hsym(M_k ΔY S_k⁻¹) = rhs` for Hermitian `ΔY`.
fn newton_solve(m: &[ComplexMatrix], s_inv: &[ComplexMatrix], rhs: &ComplexMatrix) -> Option<ComplexMatrix> {
    let r = rhs.rows();
    let n = r * r;
    // column-major vec: vec(A X B) = (Bᵀ ⊗ A) vec(X)
    let l = DMatrix::<C64>::from_fn(n, n, |row, col| {
        let (i, j) = (row % r, row / r);
        let (p, q) = (col % r, col / r);
        let mut acc = C64::new(0.0, 0.0);
        for (mk, sk) in m.iter().zip(s_inv) {
            acc += mk[(i, p)] * sk[(q, j)] + sk[(i, p)] * mk[(q, j)];
        }
        acc * 0.5
    });
    let b = DMatrix::<C64>::from_fn(n, 1, |row, _| rhs[(row % r, row / r)]);
    let x = match l.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => l.lu().solve(&b)?,
    };
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(ComplexMatrix::from_fn(r, r, |i, j| x[(i + r * j, 0)]).hermitian_part())
}

fn interior_point(c: &[ComplexMatrix], target: f64, max_iter: usize) -> Result<(Rounded, usize)> {
    let r = c[0].rows();
    let kf = c.len() as f64;
    let id = ComplexMatrix::identity(r);
    let mut m = vec![id.scaled(1.0 / kf); c.len()];
    let mut y = id.scaled(-1.0);
    let mut s: Vec<ComplexMatrix> = c.iter().map(|ck| ck - &y).collect();

    let mut best = round(c, &m, &y)?;
    let mut stalled = 0;
    let mut iterations = 0;
    while iterations < max_iter && best.gap > target && stalled < STALL_LIMIT {
        iterations += 1;
        let mu: f64 = m.iter().zip(&s).map(|(mk, sk)| mk.inner_re(sk)).sum::<f64>() / (kf * r as f64);
        let s_inv = match s.iter().map(|sk| inv_sqrt(sk, eig_tol()).map(|h| &h * &h)).collect::<Result<Vec<_>>>() {
            Ok(v) => v,
            Err(_) => break,
        };
        let mut rp = id.clone();
        m.iter().for_each(|mk| rp -= mk);
        let rd: Vec<ComplexMatrix> = c.iter().zip(&s).map(|(ck, sk)| &(ck - &y) - sk).collect();

        let mut rhs = rp;
        for k in 0..c.len() {
            let term = &(&s_inv[k].scaled(SIGMA * mu) - &m[k]) - &(&(&m[k] * &rd[k]) * &s_inv[k]).hermitian_part();
            rhs -= &term;
        }
        let Some(dy) = newton_solve(&m, &s_inv, &rhs.hermitian_part()) else { break };
        let ds: Vec<ComplexMatrix> = rd.iter().map(|rk| rk - &dy).collect();
        let dm: Vec<ComplexMatrix> = (0..c.len())
            .map(|k| {
                let corr = &(&m[k] * &ds[k]) * &s_inv[k];
                (&(&s_inv[k].scaled(SIGMA * mu) - &m[k]) - &corr).hermitian_part()
            })
            .collect();

        let steps = (0..c.len())
            .map(|k| Ok((max_step(&m[k], &dm[k])?, max_step(&s[k], &ds[k])?)))
            .collect::<Result<Vec<_>>>();
        let Ok(steps) = steps else { break };
        let ap = steps.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let ad = steps.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        for k in 0..c.len() {
            m[k] += &dm[k].scaled(ap);
            s[k] += &ds[k].scaled(ad);
        }
        y += &dy.scaled(ad);

        // a numerically singular iterate counts as a stalled step
        let Ok(cand) = round(c, &m, &y) else {
            stalled += 1;
            continue;
        };
        if cand.gap < best.gap {
            if cand.gap < 0.5 * best.gap {
                stalled = 0;
            } else {
                stalled += 1;
            }
            best = cand;
        } else {
            stalled += 1;
        }
    }
    Ok((best, iterations))
}

/// Certified minimum of `Σ_k Tr(A_k M_k)` over POVMs, for PSD `A_k`.
pub(crate) fn minimize(a: &[ComplexMatrix], tol: &Tolerances) -> Result<Certified> {
    let n = a[0].rows();
    if a.len() == 1 {
        let primal = a[0].trace().re;
        return Ok(Certified { povm: vec![ComplexMatrix::identity(n)], z: a[0].clone(), primal, dual: primal, iterations: 0 });
    }
    let scale = a.iter().map(|ak| ak.trace().re).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter("instance operators must have positive trace".into()));
    }
    let c: Vec<ComplexMatrix> = a.iter().map(|ak| ak.scaled(1.0 / scale)).collect();
    let mut total = ComplexMatrix::zeros(n, n);
    c.iter().for_each(|ck| total += ck);
    let basis = support_basis(&total, SUPPORT_CUT, eig_tol())?;
    let r = basis.len();
    let v = ComplexMatrix::from_fn(n, r, |i, j| basis[j][i]);
    let vh = v.adjoint();
    let reduced: Vec<ComplexMatrix> = c.iter().map(|ck| (&(&vh * ck) * &v).hermitian_part()).collect();

    let target = (0.01 * tol.solver_gap / scale).min(1e-11);
    let (best, iterations) = interior_point(&reduced, target, tol.max_iterations)?;
    if best.gap * scale > tol.solver_gap {
        return Err(Error::NonConvergence { iterations, best_gap: best.gap * scale });
    }

    let kf = a.len() as f64;
    let complement = (&ComplexMatrix::identity(n) - &(&v * &vh)).scaled(1.0 / kf);
    let povm: Vec<ComplexMatrix> =
        best.m.iter().map(|mk| (&(&(&v * mk) * &vh) + &complement).hermitian_part()).collect();
    let z = (&(&v * &best.y) * &vh).scaled(scale).hermitian_part();
    let primal: f64 = a.iter().zip(&povm).map(|(ak, mk)| ak.inner_re(mk)).sum();
    let dual = z.trace().re;
    debug_assert!((primal - best.primal * scale).abs() < 1e-9 * scale.max(1.0));
    debug_assert!((dual - best.dual * scale).abs() < 1e-9 * scale.max(1.0));
    Ok(Certified { povm, z, primal, dual, iterations })
}
