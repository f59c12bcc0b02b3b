//! Banded LU factorization with partial pivoting.
//!
//! The strip matrices couple each unknown to its four grid neighbors;
//! ordering the unknowns depth-major keeps every coupling, including
//! the periodic wrap inside one depth slice, within half-bandwidth
//! equal to the number of boundary points. Row pivoting widens the
//! upper band by the lower half-bandwidth, the classic 2*kl + ku + 1
//! storage.

use ndarray_linalg::Scalar;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Band storage before factorization. Entry (i, j) lives at offset
/// i - j + kl + ku within column j; the extra kl rows on top absorb
/// pivoting fill.
pub(crate) struct BandedMatrix<E> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<E>,
}

impl<E: Scalar> BandedMatrix<E> {
    pub(crate) fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix { n, kl, ku, ldab, ab: vec![E::zero(); ldab * n] }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i, "entry outside band");
        j * self.ldab + (i + self.kl + self.ku - j)
    }

    /// Adds v to entry (i, j); the entry must lie within the band.
    pub(crate) fn add(&mut self, i: usize, j: usize, v: E) {
        let s = self.slot(i, j);
        self.ab[s] = self.ab[s] + v;
    }

    /// In-place LU with partial pivoting. Fails on an exactly zero
    /// pivot; near-singularity is the caller's residual check.
    pub(crate) fn factor(mut self) -> Result<BandedLu<E>> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let i_end = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.ab[self.slot(j, j)].square();
            for i in j + 1..=i_end {
                let m = self.ab[self.slot(i, j)].square();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == E::Real::zero() {
                return Err(Error::singular(format!("zero pivot at column {j} of {n}")));
            }
            piv[j] = p;
            let c_end = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=c_end {
                    let sp = self.slot(p, c);
                    let sj = self.slot(j, c);
                    self.ab.swap(sp, sj);
                }
            }
            let d = self.ab[self.slot(j, j)];
            for i in j + 1..=i_end {
                let s_ij = self.slot(i, j);
                let m = self.ab[s_ij] / d;
                self.ab[s_ij] = m;
                if m != E::zero() {
                    for c in j + 1..=c_end {
                        let s_ic = self.slot(i, c);
                        let s_jc = self.slot(j, c);
                        self.ab[s_ic] = self.ab[s_ic] - m * self.ab[s_jc];
                    }
                }
            }
        }
        Ok(BandedLu { n, kl, ku, ldab, ab: self.ab, piv })
    }
}

/// Factored form; solves by permuted forward elimination and banded
/// back substitution.
pub(crate) struct BandedLu<E> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<E>,
    piv: Vec<usize>,
}

impl<E: Scalar> BandedLu<E> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> E {
        self.ab[j * self.ldab + (i + self.kl + self.ku - j)]
    }

    pub(crate) fn solve_in_place(&self, x: &mut [E]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        debug_assert_eq!(x.len(), n);
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            if xj != E::zero() {
                for i in j + 1..=(j + kl).min(n - 1) {
                    x[i] = x[i] - self.at(i, j) * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let xj = x[j] / self.at(j, j);
            x[j] = xj;
            if xj != E::zero() {
                let lo = j.saturating_sub(kl + ku);
                for i in lo..j {
                    x[i] = x[i] - self.at(i, j) * xj;
                }
            }
        }
    }
}
