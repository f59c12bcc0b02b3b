//! Boundary operators of the half-space Robin problem.
//!
//! For the Neumann reference operator on the half-space, the
//! Neumann-to-Dirichlet map at spectral parameter lambda is the Fourier
//! multiplier M(lambda) with symbol (|xi|^2 - lambda)^(-1/2). The
//! resolvent difference of two Robin operators with coefficients
//! alpha_1, alpha_2 factors through the boundary as
//!
//! ```text
//! gamma (I - alpha_1 M)^(-1) (alpha_2 - alpha_1) (I - M alpha_2)^(-1) gamma*
//! ```
//!
//! where gamma is the Poisson solution operator. Since gamma = V G^(1/2)
//! with V an isometry and G = gamma* gamma the Gram multiplier, the
//! singular values of that difference equal those of the purely
//! boundary-side operator
//!
//! ```text
//! T(lambda) = G^(1/2) (I - alpha_1 M)^(-1) (alpha_2 - alpha_1) (I - M alpha_2)^(-1) G^(1/2),
//! ```
//!
//! which is what [`boundary_reduced_difference`] materializes. The same
//! multiplier calculus provides the Birman-Schwinger operator
//! alpha M(lambda), whose characteristic (smallest singular value of
//! I - alpha M) vanishes exactly at discrete eigenvalues, and the Cwikel
//! factor alpha (1 - Delta)^(-3/4) behind the weak-class bounds.

mod search;

pub use search::{find_eigenvalues, EigenvalueRecord, RefineStatus, SearchRegion};

use ndarray::Array2;
use ndarray_linalg::{Inverse, Lapack, Scalar};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, BoundaryOperator, FourierMultiplier, GridFunction};
use crate::scalar::{r, LinalgReal, Real};
use crate::schatten::dense_singular_values;

/// Condition-estimate threshold above which inversions raise the
/// warning flag on the produced operator.
const CONDITION_LIMIT: f64 = 1e12;

/// Spectral parameter, validated away from [0, inf) at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParameter<T: Real> {
    lambda: Complex<T>,
}

impl<T: Real> SpectralParameter<T> {
    /// Accepts any finite lambda off the half-line [0, inf).
    pub fn new(lambda: Complex<T>) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::spectral("lambda must be finite"));
        }
        if lambda.im == T::zero() && lambda.re >= T::zero() {
            return Err(Error::spectral(format!(
                "lambda = {} lies on [0, inf), the essential spectrum of the reference operator",
                lambda.re
            )));
        }
        Ok(SpectralParameter { lambda })
    }

    /// Real lambda; must be negative.
    pub fn real(x: T) -> Result<Self> {
        Self::new(Complex::new(x, T::zero()))
    }

    pub fn value(&self) -> Complex<T> {
        self.lambda
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == T::zero()
    }

    /// Enforces the threshold for Schatten-type reductions: lambda real
    /// and strictly below -bound_sq. Returns the real value.
    pub(crate) fn require_real_below(&self, bound_sq: T, what: &str) -> Result<T> {
        if !self.is_real() {
            return Err(Error::spectral(format!("{what} requires real lambda, got {}", self.lambda)));
        }
        if !(self.lambda.re < -bound_sq) {
            return Err(Error::spectral(format!(
                "{what} requires lambda < {}, got {}",
                -bound_sq,
                self.lambda.re
            )));
        }
        Ok(self.lambda.re)
    }
}

/// Neumann-to-Dirichlet multiplier with symbol (|xi|^2 - lambda)^(-1/2),
/// principal branch. For real negative lambda the symbol is positive
/// with maximum (-lambda)^(-1/2) at xi = 0.
pub fn weyl_multiplier<T: Real>(
    lambda: SpectralParameter<T>,
    grid: &BoundaryGrid<T>,
) -> Result<FourierMultiplier<T>> {
    let lam = lambda.value();
    // |xi|^2 - lambda avoids (-inf, 0] for every lambda off [0, inf),
    // so the principal square root is unambiguous.
    FourierMultiplier::from_radial_fn(grid.clone(), |n2| {
        let z = Complex::new(n2 - lam.re, -lam.im);
        z.sqrt().inv()
    })
}

/// Square root of the Gram multiplier of the Poisson operator.
///
/// The fiber of gamma(lambda) over xi maps phi to t -> e^(-omega t) phi / omega
/// with omega = (|xi|^2 - lambda)^(1/2); integrating |.|^2 over t > 0
/// gives the Gram symbol (1/2)(|xi|^2 - lambda)^(-3/2), so the square
/// root has symbol 2^(-1/2) (|xi|^2 - lambda)^(-3/4). Real lambda < 0
/// only.
pub fn gram_sqrt_multiplier<T: Real>(
    lambda: SpectralParameter<T>,
    grid: &BoundaryGrid<T>,
) -> Result<FourierMultiplier<T>> {
    let lam = lambda.require_real_below(T::zero(), "Gram factor")?;
    let half_sqrt = r::<T>(0.5).sqrt();
    FourierMultiplier::from_radial_fn(grid.clone(), |n2| {
        Complex::new(half_sqrt * (n2 - lam).powf(r::<T>(-0.75)), T::zero())
    })
}

/// Boundary reduction of the resolvent difference between the Robin
/// operators with coefficients alpha_1 and alpha_2.
///
/// Requires real lambda < -max(sup|alpha_1|, sup|alpha_2|)^2, which
/// keeps both inverted factors away from singularity. The singular
/// values of the returned dense operator equal those of the half-space
/// resolvent difference. Inversions that look ill-conditioned (estimate
/// above 1e12) set the condition flag on the result.
pub fn boundary_reduced_difference<T>(
    alpha1: &GridFunction<T>,
    alpha2: &GridFunction<T>,
    lambda: SpectralParameter<T>,
) -> Result<BoundaryOperator<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    let grid = alpha1.grid();
    grid.check_same(alpha2.grid(), "Robin coefficients on different grids")?;
    let bound = alpha1.linf_norm().max(alpha2.linf_norm());
    lambda.require_real_below(bound * bound, "boundary reduction")?;

    let weyl = weyl_multiplier(lambda, grid)?;
    let gram = gram_sqrt_multiplier(lambda, grid)?;

    if alpha1.is_real() && alpha2.is_real() {
        let a1: Vec<T> = alpha1.values().iter().map(|v| v.re).collect();
        let a2: Vec<T> = alpha2.values().iter().map(|v| v.re).collect();
        let m = weyl.real_matrix()?;
        let g = gram.real_matrix()?;
        let (t, flag) = reduced_chain_real(&a1, &a2, &m, &g, alpha1.is_zero())?;
        let entries = t.mapv(|v| Complex::new(v, T::zero()));
        Ok(BoundaryOperator::from_parts(grid.clone(), entries, flag))
    } else {
        let a1 = alpha1.values();
        let a2 = alpha2.values();
        let m = weyl.matrix().into_entries();
        let g = gram.matrix().into_entries();
        let (t, flag) =
            reduced_chain_complex(a1.as_slice().unwrap(), a2.as_slice().unwrap(), &m, &g, alpha1.is_zero())?;
        Ok(BoundaryOperator::from_parts(grid.clone(), t, flag))
    }
}

/// G^(1/2) X^(-1) D Y^(-1) G^(1/2) in real arithmetic.
fn reduced_chain_real<T: LinalgReal>(
    a1: &[T],
    a2: &[T],
    m: &Array2<T>,
    g: &Array2<T>,
    a1_is_zero: bool,
) -> Result<(Array2<T>, bool)> {
    let n = a1.len();
    let mut flag = false;

    // Y = I - M diag(a2)
    let mut y = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let v = -m[[i, j]] * a2[j];
            y[[i, j]] = if i == j { T::one() + v } else { v };
        }
    }
    let y_norm = one_norm_real(&y);
    let yi = y.inv()?;
    if one_norm_real(&yi) * y_norm > r::<T>(CONDITION_LIMIT) {
        flag = true;
    }

    // P = diag(a2 - a1) Y^(-1)
    let mut p = yi;
    for i in 0..n {
        let d = a2[i] - a1[i];
        p.row_mut(i).mapv_inplace(|v| v * d);
    }

    // Q = (I - diag(a1) M)^(-1) P; the inverse is skipped when alpha_1
    // vanishes identically.
    let q = if a1_is_zero {
        p
    } else {
        let mut x = Array2::<T>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let v = -a1[i] * m[[i, j]];
                x[[i, j]] = if i == j { T::one() + v } else { v };
            }
        }
        let x_norm = one_norm_real(&x);
        let xi = x.inv()?;
        if one_norm_real(&xi) * x_norm > r::<T>(CONDITION_LIMIT) {
            flag = true;
        }
        xi.dot(&p)
    };

    Ok((g.dot(&q).dot(g), flag))
}

fn reduced_chain_complex<T>(
    a1: &[Complex<T>],
    a2: &[Complex<T>],
    m: &Array2<Complex<T>>,
    g: &Array2<Complex<T>>,
    a1_is_zero: bool,
) -> Result<(Array2<Complex<T>>, bool)>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    let n = a1.len();
    let one = Complex::new(T::one(), T::zero());
    let mut flag = false;

    let mut y = Array2::<Complex<T>>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let v = -m[[i, j]] * a2[j];
            y[[i, j]] = if i == j { one + v } else { v };
        }
    }
    let y_norm = one_norm_complex(&y);
    let yi = y.inv()?;
    if one_norm_complex(&yi) * y_norm > r::<T>(CONDITION_LIMIT) {
        flag = true;
    }

    let mut p = yi;
    for i in 0..n {
        let d = a2[i] - a1[i];
        p.row_mut(i).mapv_inplace(|v| v * d);
    }

    let q = if a1_is_zero {
        p
    } else {
        let mut x = Array2::<Complex<T>>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let v = -a1[i] * m[[i, j]];
                x[[i, j]] = if i == j { one + v } else { v };
            }
        }
        let x_norm = one_norm_complex(&x);
        let xi = x.inv()?;
        if one_norm_complex(&xi) * x_norm > r::<T>(CONDITION_LIMIT) {
            flag = true;
        }
        xi.dot(&p)
    };

    Ok((g.dot(&q).dot(g), flag))
}

fn one_norm_real<T: Real>(a: &Array2<T>) -> T {
    let mut best = T::zero();
    for col in a.columns() {
        let s = col.iter().map(|v| v.abs()).sum::<T>();
        best = best.max(s);
    }
    best
}

fn one_norm_complex<T: Real>(a: &Array2<Complex<T>>) -> T {
    let mut best = T::zero();
    for col in a.columns() {
        let s = col.iter().map(|v| v.norm()).sum::<T>();
        best = best.max(s);
    }
    best
}

/// Which pointwise factor multiplies the Cwikel symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CwikelMode {
    /// diag(alpha) (1 - Delta)^(-3/4).
    Raw,
    /// diag(sqrt|alpha|) (1 - Delta)^(-3/4), the factor appearing in
    /// symmetrized products.
    SqrtAbs,
}

/// Dense matrix of the Cwikel-type operator beta(x) g(-i grad) with
/// g(xi) = (1 + |xi|^2)^(-3/4).
pub fn cwikel_matrix<T: Real>(
    alpha: &GridFunction<T>,
    mode: CwikelMode,
) -> Result<BoundaryOperator<T>> {
    let grid = alpha.grid();
    let mult = FourierMultiplier::from_radial_fn(grid.clone(), |n2| {
        Complex::new((T::one() + n2).powf(r::<T>(-0.75)), T::zero())
    })?;
    let beta: Vec<Complex<T>> = match mode {
        CwikelMode::Raw => alpha.values().to_vec(),
        CwikelMode::SqrtAbs => alpha
            .values()
            .iter()
            .map(|v| Complex::new(v.norm().sqrt(), T::zero()))
            .collect(),
    };
    let real = beta.iter().all(|v| v.im == T::zero());
    let entries = if real {
        let mut f = mult.real_matrix()?;
        for i in 0..f.nrows() {
            let b = beta[i].re;
            f.row_mut(i).mapv_inplace(|v| v * b);
        }
        f.mapv(|v| Complex::new(v, T::zero()))
    } else {
        let mut f = mult.matrix().into_entries();
        for i in 0..f.nrows() {
            let b = beta[i];
            f.row_mut(i).mapv_inplace(|v| v * b);
        }
        f
    };
    Ok(BoundaryOperator::from_parts(grid.clone(), entries, false))
}

/// Dense matrix of the Birman-Schwinger operator diag(alpha) M(lambda).
pub fn birman_schwinger_matrix<T: Real>(
    alpha: &GridFunction<T>,
    lambda: SpectralParameter<T>,
) -> Result<BoundaryOperator<T>> {
    let grid = alpha.grid();
    let weyl = weyl_multiplier(lambda, grid)?;
    let entries = if alpha.is_real() && lambda.is_real() {
        let mut m = weyl.real_matrix()?;
        for i in 0..m.nrows() {
            let a = alpha.values()[i].re;
            m.row_mut(i).mapv_inplace(|v| v * a);
        }
        m.mapv(|v| Complex::new(v, T::zero()))
    } else {
        let mut m = weyl.matrix().into_entries();
        for i in 0..m.nrows() {
            let a = alpha.values()[i];
            m.row_mut(i).mapv_inplace(|v| v * a);
        }
        m
    };
    Ok(BoundaryOperator::from_parts(grid.clone(), entries, false))
}

/// Smallest singular value of I - alpha M(lambda).
///
/// Vanishes (numerically) exactly when lambda is a discrete eigenvalue
/// of the Robin operator with coefficient alpha.
pub fn bs_characteristic<T>(alpha: &GridFunction<T>, lambda: SpectralParameter<T>) -> Result<T>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    let bs = birman_schwinger_matrix(alpha, lambda)?;
    let mut entries = bs.into_entries();
    entries.mapv_inplace(|v| -v);
    let one = Complex::new(T::one(), T::zero());
    for i in 0..entries.nrows() {
        entries[[i, i]] += one;
    }
    let values = dense_singular_values(&entries)?;
    Ok(values.last().copied().unwrap_or_else(T::zero))
}

/// Spectral enclosure sum: for each eigenvalue, the distance from
/// (lambda + a)^(-1) to the segment [0, 1/a], raised to the p-th power
/// and summed. Finiteness quantifies how the discrete spectrum
/// accumulates at the essential spectrum.
pub fn hansmann_sum<T: Real>(eigs: &[EigenvalueRecord<T>], a: T, p: T) -> Result<T> {
    if !(a > T::zero()) {
        return Err(Error::invalid(format!("shift a = {a}, expected a > 0")));
    }
    if !(p > T::zero()) {
        return Err(Error::invalid(format!("power p = {p}, expected p > 0")));
    }
    let seg_end = T::one() / a;
    let mut total = T::zero();
    for rec in eigs {
        let shifted = rec.lambda + Complex::new(a, T::zero());
        if shifted.norm_sqr() == T::zero() {
            return Err(Error::invalid("eigenvalue coincides with -a"));
        }
        let z = shifted.inv();
        let x = z.re.max(T::zero()).min(seg_end);
        let d = Complex::new(z.re - x, z.im).norm();
        total += d.powf(p);
    }
    Ok(total)
}

/// Infimum of the essential spectrum for a constant Robin coefficient:
/// -c^2 when c > 0 (the boundary fiber binds a state), 0 otherwise (the
/// operator is nonnegative).
pub fn essential_bottom<T: Real>(c: T) -> T {
    if c > T::zero() {
        -(c * c)
    } else {
        T::zero()
    }
}
