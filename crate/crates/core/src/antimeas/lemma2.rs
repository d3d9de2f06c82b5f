use super::ProbeState;
use crate::error::{Error, Result};
use crate::qcore::matrix::{complete_orthonormal, inner, norm, C64};
use crate::qcore::{MeasurementEnsemble, PureState};

/// Largest number of selections `l^f` the checker will enumerate.
pub const MAX_SELECTIONS: u64 = 10_000_000;

const RANK_TOL: f64 = 1e-9;

struct Search<'a> {
    vectors: Vec<Vec<&'a [C64]>>,
    d: usize,
    /// Orthonormal basis of the selected span; rows `0..rank` are live.
    basis: Vec<Vec<C64>>,
    rank: usize,
}

impl Search<'_> {
    /// Writes the normalized component of `v` orthogonal to the span into the
    /// next basis row; false if it is negligible.
    fn push(&mut self, v: &[C64]) -> bool {
        let (head, tail) = self.basis.split_at_mut(self.rank);
        let r = &mut tail[0];
        r.copy_from_slice(v);
        let mut passes = 0;
        loop {
            let before: f64 = r.iter().map(|z| z.norm_sqr()).sum();
            for b in head.iter() {
                let c = inner(b, r);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let after: f64 = r.iter().map(|z| z.norm_sqr()).sum();
            passes += 1;
            // reorthogonalize once if cancellation was severe
            if passes == 2 || after > 0.25 * before {
                break;
            }
        }
        let n = norm(r);
        if n <= RANK_TOL {
            return false;
        }
        r.iter_mut().for_each(|z| *z /= n);
        self.rank += 1;
        true
    }

    fn witness(&self) -> Vec<C64> {
        complete_orthonormal(&self.basis[..self.rank], self.d).swap_remove(self.rank)
    }

    /// Depth-first over outcomes; succeeds once the span can no longer reach `C^d`.
    fn run(&mut self, a: usize) -> Option<Vec<C64>> {
        let remaining = self.vectors.len() - a;
        if self.rank + remaining < self.d {
            return Some(self.witness());
        }
        if self.rank == self.d {
            return None;
        }
        for x in 0..self.vectors[a].len() {
            let v = self.vectors[a][x];
            let grew = self.push(v);
            let found = self.run(a + 1);
            if grew {
                self.rank -= 1;
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Decides whether some pure probe is orthogonal, for every outcome `a`, to at
/// least one effect vector `v_{a|x}`. Infeasibility certifies AMS < 1.
///
/// Enumerates the `l^f` choices of one effect vector per outcome and looks for
/// a choice spanning a proper subspace; its orthogonal complement holds the witness.
pub fn lemma2_feasible(ensemble: &MeasurementEnsemble) -> Result<(bool, Option<ProbeState>)> {
    let (l, f, d) = (ensemble.len() as u64, ensemble.outcomes(), ensemble.dim());
    let count = (0..f).try_fold(1u64, |acc, _| acc.checked_mul(l).filter(|&c| c <= MAX_SELECTIONS));
    if count.is_none() {
        return Err(Error::Capability(format!("{l}^{f} selections exceed the limit of {MAX_SELECTIONS}")));
    }
    let vectors = (0..f).map(|a| ensemble.measurements().iter().map(|m| m.effect_vector(a)).collect()).collect();
    let mut search = Search { vectors, d, basis: vec![vec![C64::new(0.0, 0.0); d]; d + 1], rank: 0 };
    match search.run(0) {
        Some(w) => Ok((true, Some(ProbeState::new(PureState::normalized(w)?)))),
        None => Ok((false, None)),
    }
}
