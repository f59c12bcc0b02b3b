//! Symmetric Lanczos iteration with full reorthogonalization.
//!
//! Used in shift-invert mode: the operator handed in is x -> (S - sigma)^(-1) x
//! for a symmetric S, so extremal Ritz values of the iteration map back
//! to the eigenvalues of S nearest the shift. Full reorthogonalization
//! is affordable at the step counts used here and suppresses ghost
//! copies of converged eigenvalues.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

use crate::error::Result;
use crate::scalar::{r, LinalgReal, Real};

pub(crate) struct LanczosDecomposition<T> {
    /// Diagonal of the projected tridiagonal matrix.
    pub alphas: Vec<T>,
    /// Off-diagonal; betas[j] couples steps j and j+1.
    pub betas: Vec<T>,
    /// Orthonormal basis vectors, one per step.
    pub basis: Vec<Vec<T>>,
}

/// splitmix64; a fixed-seed stream makes the start vector, and with it
/// the whole iteration, reproducible.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn deterministic_unit_vector<T: Real>(n: usize) -> Vec<T> {
    let mut state = 0x726f62696e6873u64;
    let mut v: Vec<T> = (0..n)
        .map(|_| {
            let u = (splitmix(&mut state) >> 11) as f64 / (1u64 << 53) as f64;
            r::<T>(u - 0.5)
        })
        .collect();
    let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Runs up to `steps` Lanczos steps of `apply` (must be symmetric).
/// Stops early on breakdown, which signals an exhausted invariant
/// subspace rather than an error.
pub(crate) fn symmetric_lanczos<T: Real>(
    n: usize,
    mut apply: impl FnMut(&[T], &mut [T]) -> Result<()>,
    steps: usize,
) -> Result<LanczosDecomposition<T>> {
    let steps = steps.min(n);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps.saturating_sub(1));
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(steps);
    basis.push(deterministic_unit_vector(n));

    let mut w = vec![T::zero(); n];
    let mut op_scale = T::zero();
    for j in 0..steps {
        apply(&basis[j], &mut w)?;
        let a_j = dot(&w, &basis[j]);
        alphas.push(a_j);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a_j * *vi;
        }
        if j > 0 {
            let b_prev = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b_prev * *vi;
            }
        }
        // Two classical Gram-Schmidt sweeps against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                if c != T::zero() {
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= c * *vi;
                    }
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        op_scale = op_scale.max(a_j.abs()).max(beta);
        if j + 1 == steps {
            break;
        }
        if beta <= r::<T>(1e-13).max(T::epsilon() * r::<T>(10.0)) * op_scale.max(T::one()) {
            break;
        }
        betas.push(beta);
        let next: Vec<T> = w.iter().map(|x| *x / beta).collect();
        basis.push(next);
    }
    Ok(LanczosDecomposition { alphas, betas, basis })
}

/// Eigendecomposition of the projected tridiagonal matrix; returns
/// ascending eigenvalues and the matrix of eigenvectors in columns.
pub(crate) fn tridiagonal_eigh<T: LinalgReal>(
    alphas: &[T],
    betas: &[T],
) -> Result<(Vec<T>, Array2<T>)> {
    let k = alphas.len();
    let mut tri = Array2::<T>::zeros((k, k));
    for (i, a) in alphas.iter().enumerate() {
        tri[[i, i]] = *a;
    }
    for (i, b) in betas.iter().enumerate() {
        tri[[i, i + 1]] = *b;
        tri[[i + 1, i]] = *b;
    }
    let (vals, vecs) = tri.eigh(UPLO::Lower)?;
    Ok((vals.to_vec(), vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_diagonal_spectrum() {
        // Diagonal operator: every eigenvalue reachable, exact after n steps.
        let d: Vec<f64> = (0..12).map(|k| (k as f64) - 3.5).collect();
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] = d[i] * x[i];
            }
            Ok(())
        };
        let dec = symmetric_lanczos(12, apply, 12).unwrap();
        let (vals, _) = tridiagonal_eigh(&dec.alphas, &dec.betas).unwrap();
        assert_eq!(vals.len(), 12);
        for (v, expect) in vals.iter().zip(&d) {
            assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
        }
    }

    #[test]
    fn basis_stays_orthonormal() {
        let d: Vec<f64> = (0..30).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] = d[i] * x[i];
            }
            Ok(())
        };
        let dec = symmetric_lanczos(30, apply, 20).unwrap();
        for (i, u) in dec.basis.iter().enumerate() {
            for (j, v) in dec.basis.iter().enumerate() {
                let g = dot(u, v);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g - target).abs() < 1e-10, "gram[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn breakdown_stops_cleanly() {
        // Rank-one projector direction: the Krylov space exhausts fast.
        let apply = |x: &[f64], y: &mut [f64]| {
            let s: f64 = x.iter().sum();
            for yi in y.iter_mut() {
                *yi = s;
            }
            Ok(())
        };
        let dec = symmetric_lanczos(8, apply, 8).unwrap();
        assert!(dec.alphas.len() < 8);
    }
}
