//! Brute-force finite-difference model on a truncated strip.
//!
//! The half-space is cut off at depth T and discretized with the
//! classic 5-point stencil: periodic in x, a ghost-node Robin row at
//! t = 0 and a ghost-node Neumann row at the top. Everything the
//! boundary-reduction modules claim can be checked here the expensive
//! way: direct resolvents, dense resolvent-difference singular values,
//! the Krein correction formula, the Green identity behind the
//! quasi-boundary-triple calculus, and the half-line fiber bound state
//! that pins the essential-spectrum bottom.
//!
//! Frames: with the trapezoid weight w (one half on the two depth
//! boundary rows) the physical matrix A becomes exactly symmetric
//! under S = W^(1/2) A W^(-1/2) for real coefficients, and the map
//! u -> sqrt(w h_x h_t) u is an isometry from the discrete L2 inner
//! product onto plain l2. The stored sparse matrix is S; solves and
//! matvecs wrap it with the weights to act on physical fields. The
//! cell measures h_x h_t cancel in the similarity, which is why the
//! dense resolvent-difference singular values below approximate the
//! continuum ones with no explicit scaling.

mod banded;
mod lanczos;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Lapack, Scalar, Solve, UPLO};
use num_complex::Complex;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, Dft, GridFunction};
use crate::halfspace::{weyl_multiplier, SpectralParameter};
use crate::scalar::{fabs, fexp, fsqrt, r, LinalgReal, Real};
use crate::schatten::{real_singular_values, SingularSpectrum, SpectrumMeta};

use banded::{BandedLu, BandedMatrix};
use lanczos::{symmetric_lanczos, tridiagonal_eigh};

/// Truncation rule: the strip depth should be at least this many
/// Poisson decay lengths 1/sqrt(-lambda).
const DEPTH_FACTOR: f64 = 8.0;

/// Hard cap on unknowns for dense resolvent-difference work.
const DENSE_LIMIT: usize = 4096;

/// Relative residual demanded of direct resolvent solves. At reduced
/// precision the floor moves up with the machine epsilon.
const SOLVE_RTOL: f64 = 1e-10;

fn solve_rtol<T: Real>() -> T {
    r::<T>(SOLVE_RTOL).max(T::epsilon() * r::<T>(100.0))
}

/// Relative residual accepted for a Ritz pair in the eigenvalue scan.
const RITZ_RTOL: f64 = 1e-6;

/// Discretization of the truncated half-space: the boundary grid
/// (one-dimensional, periodic) crossed with depth nodes t_i = i h_t,
/// i < N_t, h_t = T / N_t. Unknowns are ordered x-major: ix * N_t + it.
#[derive(Clone, Debug, PartialEq)]
pub struct StripGrid<T: Real> {
    boundary: BoundaryGrid<T>,
    points_t: usize,
    depth: T,
}

/// Builds a strip over `boundary`, which must be one-dimensional with
/// at least 8 points; `points_t >= 8` and `depth > 0`.
pub fn make_strip<T: Real>(
    boundary: BoundaryGrid<T>,
    points_t: usize,
    depth: T,
) -> Result<StripGrid<T>> {
    if boundary.dimension() != 1 {
        return Err(Error::invalid(format!(
            "strip oracle is one-dimensional; boundary grid has n = {}",
            boundary.dimension()
        )));
    }
    if boundary.points_per_axis() < 8 {
        return Err(Error::invalid(format!(
            "strip needs at least 8 boundary points, got {}",
            boundary.points_per_axis()
        )));
    }
    if points_t < 8 {
        return Err(Error::invalid(format!("strip needs at least 8 depth points, got {points_t}")));
    }
    if !(depth > T::zero()) || !depth.is_finite() {
        return Err(Error::invalid(format!("strip depth = {depth}, expected finite > 0")));
    }
    Ok(StripGrid { boundary, points_t, depth })
}

impl<T: Real> StripGrid<T> {
    pub fn boundary(&self) -> &BoundaryGrid<T> {
        &self.boundary
    }

    pub fn points_x(&self) -> usize {
        self.boundary.points_per_axis()
    }

    pub fn points_t(&self) -> usize {
        self.points_t
    }

    pub fn depth(&self) -> T {
        self.depth
    }

    pub fn spacing_x(&self) -> T {
        self.boundary.spacing()
    }

    pub fn spacing_t(&self) -> T {
        self.depth / r(self.points_t as f64)
    }

    pub fn node_t(&self, it: usize) -> T {
        self.spacing_t() * r(it as f64)
    }

    pub fn unknowns(&self) -> usize {
        self.points_x() * self.points_t
    }

    pub fn index(&self, ix: usize, it: usize) -> usize {
        debug_assert!(ix < self.points_x() && it < self.points_t);
        ix * self.points_t + it
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.points_t, idx % self.points_t)
    }

    /// Same extent, `factor` times the resolution in both directions.
    pub fn refined(&self, factor: usize) -> Result<StripGrid<T>> {
        if factor == 0 {
            return Err(Error::invalid("refinement factor must be positive"));
        }
        let boundary = crate::grid::make_grid(
            1,
            self.points_x() * factor,
            self.boundary.edge_length(),
        )?;
        make_strip(boundary, self.points_t * factor, self.depth)
    }

    /// Whether the truncation rule depth >= 8 / sqrt(-lambda) holds
    /// for a real negative lambda.
    pub fn depth_ok(&self, lambda: T) -> bool {
        lambda < T::zero() && self.depth * (-lambda).sqrt() >= r(DEPTH_FACTOR)
    }

    /// Trapezoid weight of depth row `it`: one half on the two
    /// boundary rows.
    pub fn weight(&self, it: usize) -> T {
        if it == 0 || it + 1 == self.points_t {
            r(0.5)
        } else {
            T::one()
        }
    }

    fn sqrt_weight(&self, it: usize) -> T {
        if it == 0 || it + 1 == self.points_t {
            r::<T>(0.5).sqrt()
        } else {
            T::one()
        }
    }
}

/// Complex field on the strip unknowns, x-major.
#[derive(Clone, Debug)]
pub struct StripFunction<T: Real> {
    strip: StripGrid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> StripFunction<T> {
    pub fn from_values(strip: StripGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != strip.unknowns() {
            return Err(Error::mismatch(format!(
                "strip has {} unknowns, got {} values",
                strip.unknowns(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("strip function contains non-finite values"));
        }
        Ok(StripFunction { strip, values })
    }

    /// Samples f(x, t) on the strip nodes.
    pub fn from_fn(strip: StripGrid<T>, f: impl Fn(T, T) -> Complex<T>) -> Result<Self> {
        let mut values = Vec::with_capacity(strip.unknowns());
        for ix in 0..strip.points_x() {
            let x = strip.boundary.coord_axis(ix);
            for it in 0..strip.points_t {
                values.push(f(x, strip.node_t(it)));
            }
        }
        Self::from_values(strip, values)
    }

    pub fn zeros(strip: StripGrid<T>) -> Self {
        let n = strip.unknowns();
        StripFunction { strip, values: vec![Complex::new(T::zero(), T::zero()); n] }
    }

    pub fn strip(&self) -> &StripGrid<T> {
        &self.strip
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == T::zero() && v.im == T::zero())
    }

    /// Discrete L2 norm with the trapezoid depth weights and cell
    /// measure.
    pub fn l2_norm(&self) -> T {
        let cell = self.strip.spacing_x() * self.strip.spacing_t();
        let n_t = self.strip.points_t;
        let mut acc = T::zero();
        for (q, v) in self.values.iter().enumerate() {
            acc += self.strip.weight(q % n_t) * v.norm_sqr();
        }
        (acc * cell).sqrt()
    }
}

/// Relative discrete-L2 distance from `a` to the reference `b`; falls
/// back to the absolute distance when the reference vanishes.
pub fn relative_l2_distance<T: Real>(a: &StripFunction<T>, b: &StripFunction<T>) -> Result<T> {
    if a.strip != b.strip {
        return Err(Error::mismatch("strip functions live on different grids"));
    }
    let diff_vals: Vec<Complex<T>> =
        a.values.iter().zip(&b.values).map(|(x, y)| *x - *y).collect();
    let diff = StripFunction { strip: a.strip.clone(), values: diff_vals };
    let denom = b.l2_norm();
    if denom == T::zero() {
        Ok(diff.l2_norm())
    } else {
        Ok(diff.l2_norm() / denom)
    }
}

/// Sparse strip operator in the weighted-symmetric frame, compressed
/// row storage. Rows follow the x-major unknown order; the 5-point
/// pattern plus boundary-row modifications is the only fill.
pub struct SparseOperator<T: Real> {
    strip: StripGrid<T>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
    sqrt_w: Vec<T>,
    real: bool,
}

impl<T: Real> SparseOperator<T> {
    pub fn strip(&self) -> &StripGrid<T> {
        &self.strip
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// True when every stored entry is real (real Robin coefficient).
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    /// Stored entries, weighted-symmetric frame.
    pub fn values(&self) -> &[Complex<T>] {
        &self.vals
    }

    /// Entry (i, j) of the weighted-symmetric matrix, zero off the
    /// pattern.
    pub fn sym_entry(&self, i: usize, j: usize) -> Complex<T> {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.cols[k] == j {
                return self.vals[k];
            }
        }
        Complex::new(T::zero(), T::zero())
    }

    pub(crate) fn sym_matvec_complex(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for q in 0..self.dim() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in self.row_ptr[q]..self.row_ptr[q + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[q] = acc;
        }
    }

    pub(crate) fn sym_matvec_real(&self, x: &[T], y: &mut [T]) {
        debug_assert!(self.real);
        for q in 0..self.dim() {
            let mut acc = T::zero();
            for k in self.row_ptr[q]..self.row_ptr[q + 1] {
                acc += self.vals[k].re * x[self.cols[k]];
            }
            y[q] = acc;
        }
    }

    /// Physical action A u = W^(-1/2) S W^(1/2) u.
    pub fn apply(&self, u: &StripFunction<T>) -> Result<StripFunction<T>> {
        if *u.strip() != self.strip {
            return Err(Error::mismatch("operator applied to a field on a different strip"));
        }
        let tmp: Vec<Complex<T>> =
            u.values.iter().zip(&self.sqrt_w).map(|(v, w)| v.scale(*w)).collect();
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        self.sym_matvec_complex(&tmp, &mut out);
        for (v, w) in out.iter_mut().zip(&self.sqrt_w) {
            *v = v.unscale(*w);
        }
        StripFunction::from_values(self.strip.clone(), out)
    }
}

/// Symmetrized coupling between depth levels `lo` and `lo + 1`: the
/// half-weighted boundary rows turn the one-sided ghost coupling into
/// -sqrt(2)/h_t^2 on both sides, interior couplings stay -1/h_t^2.
fn t_coupling<T: Real>(lo: usize, n_t: usize, ht2: T) -> T {
    if lo == 0 || lo + 2 == n_t {
        -(r::<T>(2.0).sqrt() * ht2)
    } else {
        -ht2
    }
}

/// Assembles the finite-difference Robin operator on the strip: the
/// 5-point Laplacian, the ghost-node Robin row at t = 0 (the Robin
/// coefficient enters only the diagonal there), a ghost-node Neumann
/// row at the top, periodic in x. Entries are stored in the
/// weighted-symmetric frame, which is exactly symmetric for real
/// coefficients.
pub fn fd_robin_matrix<T: Real>(
    alpha: &GridFunction<T>,
    strip: &StripGrid<T>,
) -> Result<SparseOperator<T>> {
    strip.boundary.check_same(alpha.grid(), "Robin coefficient grid vs strip boundary")?;
    let n_x = strip.points_x();
    let n_t = strip.points_t();
    let n = strip.unknowns();
    let hx2 = T::one() / (strip.spacing_x() * strip.spacing_x());
    let ht2 = T::one() / (strip.spacing_t() * strip.spacing_t());
    let h_t = strip.spacing_t();
    let diag_base = r::<T>(2.0) * (hx2 + ht2);
    let zero = Complex::new(T::zero(), T::zero());

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    let mut entries: Vec<(usize, Complex<T>)> = Vec::with_capacity(5);
    for ix in 0..n_x {
        for it in 0..n_t {
            entries.clear();
            let mut diag = Complex::new(diag_base, T::zero());
            if it == 0 {
                let a = alpha.values()[ix];
                diag = diag - a.scale(r::<T>(2.0) / h_t);
            }
            entries.push((strip.index(ix, it), diag));
            let left = (ix + n_x - 1) % n_x;
            let right = (ix + 1) % n_x;
            entries.push((strip.index(left, it), Complex::new(-hx2, T::zero())));
            entries.push((strip.index(right, it), Complex::new(-hx2, T::zero())));
            if it > 0 {
                entries.push((strip.index(ix, it - 1), Complex::new(t_coupling(it - 1, n_t, ht2), T::zero())));
            }
            if it + 1 < n_t {
                entries.push((strip.index(ix, it + 1), Complex::new(t_coupling(it, n_t, ht2), T::zero())));
            }
            entries.sort_unstable_by_key(|e| e.0);
            for (c, v) in entries.drain(..) {
                if v != zero {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
    }

    let sqrt_w: Vec<T> = (0..n).map(|q| strip.sqrt_weight(q % n_t)).collect();
    Ok(SparseOperator { strip: strip.clone(), row_ptr, cols, vals, sqrt_w, real: alpha.is_real() })
}

enum Factor<T: Real> {
    Real(BandedLu<T>),
    Complex(BandedLu<Complex<T>>),
}

/// Banded factorization of S - lambda for one strip operator, reusable
/// across right-hand sides. The band lives in depth-major order (half
/// bandwidths N_x), so the periodic x wrap stays inside one slice.
pub struct StripSolver<T: LinalgReal> {
    strip: StripGrid<T>,
    lambda: Complex<T>,
    sqrt_w: Vec<T>,
    factor: Factor<T>,
    /// perm[x-major index] = depth-major index.
    perm: Vec<usize>,
}

impl<T> StripSolver<T>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    pub fn new(op: &SparseOperator<T>, lambda: SpectralParameter<T>) -> Result<Self> {
        let strip = op.strip().clone();
        let n = op.dim();
        let n_x = strip.points_x();
        let n_t = strip.points_t();
        let mut perm = vec![0usize; n];
        for ix in 0..n_x {
            for it in 0..n_t {
                perm[ix * n_t + it] = it * n_x + ix;
            }
        }
        let lam = lambda.value();
        let real_path = op.is_real() && lambda.is_real();
        let factor = if real_path {
            let mut band = BandedMatrix::<T>::new(n, n_x, n_x);
            for q in 0..n {
                for k in op.row_ptr[q]..op.row_ptr[q + 1] {
                    let c = op.cols[k];
                    let mut v = op.vals[k].re;
                    if c == q {
                        v -= lam.re;
                    }
                    band.add(perm[q], perm[c], v);
                }
            }
            Factor::Real(band.factor()?)
        } else {
            let mut band = BandedMatrix::<Complex<T>>::new(n, n_x, n_x);
            for q in 0..n {
                for k in op.row_ptr[q]..op.row_ptr[q + 1] {
                    let c = op.cols[k];
                    let mut v = op.vals[k];
                    if c == q {
                        v -= lam;
                    }
                    band.add(perm[q], perm[c], v);
                }
            }
            Factor::Complex(band.factor()?)
        };
        Ok(StripSolver { strip, lambda: lam, sqrt_w: op.sqrt_w.clone(), factor, perm })
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda
    }

    /// Solves (S - lambda) x = rhs in the symmetric frame, x-major
    /// layout, real data. Fails if the factorization is complex.
    pub fn solve_sym_real(&self, x: &mut [T]) -> Result<()> {
        let lu = match &self.factor {
            Factor::Real(lu) => lu,
            Factor::Complex(_) => {
                return Err(Error::invalid(
                    "complex factorization cannot serve a real-valued solve",
                ))
            }
        };
        let mut t_major = vec![T::zero(); x.len()];
        for (q, &p) in self.perm.iter().enumerate() {
            t_major[p] = x[q];
        }
        lu.solve_in_place(&mut t_major);
        for (q, &p) in self.perm.iter().enumerate() {
            x[q] = t_major[p];
        }
        Ok(())
    }

    /// Solves (S - lambda) x = rhs in the symmetric frame, x-major
    /// layout. A real factorization serves complex data through two
    /// real solves.
    pub fn solve_sym_complex(&self, x: &mut [Complex<T>]) -> Result<()> {
        match &self.factor {
            Factor::Real(lu) => {
                let mut re = vec![T::zero(); x.len()];
                let mut im = vec![T::zero(); x.len()];
                for (q, &p) in self.perm.iter().enumerate() {
                    re[p] = x[q].re;
                    im[p] = x[q].im;
                }
                lu.solve_in_place(&mut re);
                lu.solve_in_place(&mut im);
                for (q, &p) in self.perm.iter().enumerate() {
                    x[q] = Complex::new(re[p], im[p]);
                }
            }
            Factor::Complex(lu) => {
                let mut t_major = vec![Complex::new(T::zero(), T::zero()); x.len()];
                for (q, &p) in self.perm.iter().enumerate() {
                    t_major[p] = x[q];
                }
                lu.solve_in_place(&mut t_major);
                for (q, &p) in self.perm.iter().enumerate() {
                    x[q] = t_major[p];
                }
            }
        }
        Ok(())
    }

    /// Solves the physical system (A - lambda) v = u by wrapping the
    /// symmetric solve with the frame weights.
    pub fn solve_physical(&self, u: &StripFunction<T>) -> Result<StripFunction<T>> {
        if *u.strip() != self.strip {
            return Err(Error::mismatch("solver and field strips differ"));
        }
        let mut x: Vec<Complex<T>> =
            u.values().iter().zip(&self.sqrt_w).map(|(v, w)| v.scale(*w)).collect();
        self.solve_sym_complex(&mut x)?;
        for (v, w) in x.iter_mut().zip(&self.sqrt_w) {
            *v = v.unscale(*w);
        }
        StripFunction::from_values(self.strip.clone(), x)
    }
}

/// Direct resolvent: solves (A - lambda) v = u and verifies the
/// relative residual to 1e-10, applying one refinement pass before
/// reporting a near-singular system.
pub fn fd_resolvent_apply<T>(
    op: &SparseOperator<T>,
    lambda: SpectralParameter<T>,
    u: &StripFunction<T>,
) -> Result<StripFunction<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    if *u.strip() != *op.strip() {
        return Err(Error::mismatch("field strip does not match the operator strip"));
    }
    if u.is_zero() {
        return Ok(StripFunction::zeros(op.strip().clone()));
    }
    let solver = StripSolver::new(op, lambda)?;
    let mut v = solver.solve_physical(u)?;
    let norm_u = vec_norm(u.values());
    for pass in 0..2 {
        let residual = solve_residual(op, lambda.value(), &v, u)?;
        if vec_norm(&residual) <= solve_rtol::<T>() * norm_u {
            return Ok(v);
        }
        if pass == 1 {
            return Err(Error::singular(format!(
                "resolvent solve stalled at relative residual {:e}",
                (vec_norm(&residual) / norm_u).to_f64().unwrap_or(f64::NAN)
            )));
        }
        let correction =
            solver.solve_physical(&StripFunction::from_values(op.strip().clone(), residual)?)?;
        for (vi, ci) in v.values.iter_mut().zip(correction.values()) {
            *vi += *ci;
        }
    }
    unreachable!("loop returns or errors on the second pass");
}

fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// u - (A - lambda) v, the defect of a candidate resolvent solution.
fn solve_residual<T: Real>(
    op: &SparseOperator<T>,
    lambda: Complex<T>,
    v: &StripFunction<T>,
    u: &StripFunction<T>,
) -> Result<Vec<Complex<T>>> {
    let av = op.apply(v)?;
    Ok(u.values()
        .iter()
        .zip(av.values())
        .zip(v.values())
        .map(|((ui, avi), vi)| *ui - (*avi - *vi * lambda))
        .collect())
}

/// Dense singular values of the resolvent difference
/// (A_2 - lambda)^(-1) - (A_1 - lambda)^(-1), top `k_max` of them.
///
/// Works in the weighted-symmetric frame, where plain singular values
/// coincide with those of the discrete-L2 operator and hence
/// approximate the continuum resolvent difference directly. Capped at
/// 4096 unknowns; requires real lambda below -max(sup|alpha_i|)^2.
pub fn fd_difference_singulars<T>(
    alpha1: &GridFunction<T>,
    alpha2: &GridFunction<T>,
    lambda: SpectralParameter<T>,
    strip: &StripGrid<T>,
    k_max: usize,
) -> Result<SingularSpectrum<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    let n = strip.unknowns();
    if n > DENSE_LIMIT {
        return Err(Error::size_limit(format!(
            "dense difference needs {n} unknowns, limit is {DENSE_LIMIT}"
        )));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be positive"));
    }
    let bound = alpha1.linf_norm().max(alpha2.linf_norm());
    let lam = lambda.require_real_below(bound * bound, "dense resolvent difference")?;

    let op1 = fd_robin_matrix(alpha1, strip)?;
    let op2 = fd_robin_matrix(alpha2, strip)?;
    let s1 = StripSolver::new(&op1, lambda)?;
    let s2 = StripSolver::new(&op2, lambda)?;

    let values = if op1.is_real() && op2.is_real() {
        // Row j holds the difference of the basis solves; the implicit
        // transpose leaves singular values unchanged.
        let mut d = Array2::<T>::zeros((n, n));
        let mut x1 = vec![T::zero(); n];
        let mut x2 = vec![T::zero(); n];
        for j in 0..n {
            for v in x1.iter_mut() {
                *v = T::zero();
            }
            x1[j] = T::one();
            x2.copy_from_slice(&x1);
            s1.solve_sym_real(&mut x1)?;
            s2.solve_sym_real(&mut x2)?;
            let mut row = d.row_mut(j);
            for (slot, (a, b)) in row.iter_mut().zip(x2.iter().zip(&x1)) {
                *slot = *a - *b;
            }
        }
        real_singular_values(d)?
    } else {
        let zero = Complex::new(T::zero(), T::zero());
        let mut d = Array2::<Complex<T>>::zeros((n, n));
        let mut x1 = vec![zero; n];
        let mut x2 = vec![zero; n];
        for j in 0..n {
            for v in x1.iter_mut() {
                *v = zero;
            }
            x1[j] = Complex::new(T::one(), T::zero());
            x2.copy_from_slice(&x1);
            s1.solve_sym_complex(&mut x1)?;
            s2.solve_sym_complex(&mut x2)?;
            let mut row = d.row_mut(j);
            for (slot, (a, b)) in row.iter_mut().zip(x2.iter().zip(&x1)) {
                *slot = *a - *b;
            }
        }
        crate::schatten::dense_singular_values(&d)?
    };

    let truncated: Vec<T> = values.into_iter().take(k_max).collect();
    Ok(SingularSpectrum::from_values(truncated)?.with_meta(SpectrumMeta {
        grid: format!("strip {}x{}", strip.points_x(), strip.points_t()),
        lambda: Some([lam.to_f64().unwrap_or(f64::NAN), 0.0]),
        tag: "fd-difference".into(),
    }))
}

/// Quadrature rule for the depth integral in the adjoint Poisson
/// operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid,
    Simpson,
}

/// Node weights (including h_t) for integrating over the depth nodes.
fn quadrature_weights<T: Real>(rule: QuadratureRule, n_t: usize, h_t: T) -> Vec<T> {
    let mut w = vec![h_t; n_t];
    match rule {
        QuadratureRule::Trapezoid => {
            w[0] = h_t * r(0.5);
            w[n_t - 1] = h_t * r(0.5);
        }
        QuadratureRule::Simpson => {
            // Composite Simpson over an even interval count; a trailing
            // trapezoid cell absorbs an odd remainder.
            let intervals = n_t - 1;
            let m = if intervals % 2 == 0 { intervals } else { intervals - 1 };
            let third = h_t / r(3.0);
            w[0] = third;
            for (i, slot) in w.iter_mut().enumerate().take(m + 1).skip(1) {
                *slot = if i == m {
                    third
                } else if i % 2 == 1 {
                    third * r(4.0)
                } else {
                    third * r(2.0)
                };
            }
            if m < intervals {
                w[m] += h_t * r(0.5);
                w[n_t - 1] = h_t * r(0.5);
            }
        }
    }
    w
}

/// Result of the Krein-formula resolvent: the field plus a warning
/// when the strip is too shallow for the truncation rule.
pub struct KreinApplied<T: Real> {
    pub field: StripFunction<T>,
    pub depth_warning: bool,
}

/// Resolvent of the Robin operator assembled from boundary data:
///
/// ```text
/// (A_alpha - lambda)^(-1) u = (A_N - lambda)^(-1) u
///     + gamma(lambda) alpha (I - M(lambda) alpha)^(-1) gamma(lambda)* u
/// ```
///
/// with the Neumann term solved by finite differences, gamma* realized
/// as a fiberwise depth quadrature, the boundary inverse dense, and
/// gamma sampled fiberwise. Trapezoid quadrature by default; see
/// [`krein_resolvent_apply_with`].
pub fn krein_resolvent_apply<T>(
    alpha: &GridFunction<T>,
    lambda: SpectralParameter<T>,
    u: &StripFunction<T>,
    strip: &StripGrid<T>,
) -> Result<KreinApplied<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    krein_resolvent_apply_with(alpha, lambda, u, strip, QuadratureRule::Trapezoid)
}

/// [`krein_resolvent_apply`] with an explicit quadrature rule for the
/// gamma* depth integral.
pub fn krein_resolvent_apply_with<T>(
    alpha: &GridFunction<T>,
    lambda: SpectralParameter<T>,
    u: &StripFunction<T>,
    strip: &StripGrid<T>,
    rule: QuadratureRule,
) -> Result<KreinApplied<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    strip.boundary.check_same(alpha.grid(), "Robin coefficient grid vs strip boundary")?;
    if *u.strip() != *strip {
        return Err(Error::mismatch("field strip does not match the requested strip"));
    }
    let bound = alpha.linf_norm();
    let lam = lambda.require_real_below(bound * bound, "Krein resolvent")?;
    let depth_warning = !strip.depth_ok(lam);

    let neumann = fd_robin_matrix(&GridFunction::zeros(strip.boundary.clone()), strip)?;
    let v_n = fd_resolvent_apply(&neumann, lambda, u)?;
    if alpha.is_zero() {
        return Ok(KreinApplied { field: v_n, depth_warning });
    }

    let n_x = strip.points_x();
    let n_t = strip.points_t();
    let h_t = strip.spacing_t();
    let zero = Complex::new(T::zero(), T::zero());
    let mut dft = Dft::new();

    // Fiber transform of u: bin-major layout so each fiber is one
    // contiguous run over depth.
    let mut uhat = vec![zero; n_x * n_t];
    let mut buf = vec![zero; n_x];
    for it in 0..n_t {
        for ix in 0..n_x {
            buf[ix] = u.values()[strip.index(ix, it)];
        }
        dft.unitary(&strip.boundary, &mut buf, FftDirection::Forward);
        for b in 0..n_x {
            uhat[b * n_t + it] = buf[b];
        }
    }

    // gamma(lambda)* u per fiber: int e^(-omega t) uhat dt / omega.
    let q_w = quadrature_weights(rule, n_t, h_t);
    let mut omegas = Vec::with_capacity(n_x);
    let mut bhat = vec![zero; n_x];
    for b in 0..n_x {
        let f = strip.boundary.freq_axis(b);
        let omega = fsqrt(f * f - lam);
        omegas.push(omega);
        let fiber = &uhat[b * n_t..(b + 1) * n_t];
        let mut acc = zero;
        for (it, (v, w)) in fiber.iter().zip(&q_w).enumerate() {
            acc += v.scale(*w * fexp(-omega * strip.node_t(it)));
        }
        bhat[b] = acc.unscale(omega);
    }

    // Boundary solve (I - M alpha) c = gamma* u, dense in x space.
    dft.unitary(&strip.boundary, &mut bhat, FftDirection::Inverse);
    let m_real = weyl_multiplier(lambda, &strip.boundary)?.real_matrix()?;
    let mut sys = Array2::<Complex<T>>::zeros((n_x, n_x));
    for i in 0..n_x {
        for j in 0..n_x {
            let mut v = Complex::new(-m_real[[i, j]], T::zero()) * alpha.values()[j];
            if i == j {
                v += Complex::new(T::one(), T::zero());
            }
            sys[[i, j]] = v;
        }
    }
    let c = sys.solve_into(Array1::from(bhat))?;

    // Correction field gamma(lambda) (alpha . c), fiber by fiber.
    let mut dhat: Vec<Complex<T>> =
        c.iter().zip(alpha.values()).map(|(ci, ai)| *ci * *ai).collect();
    dft.unitary(&strip.boundary, &mut dhat, FftDirection::Forward);
    let mut corr = vec![zero; n_x * n_t];
    for it in 0..n_t {
        let t = strip.node_t(it);
        for b in 0..n_x {
            buf[b] = dhat[b].scale(fexp(-omegas[b] * t)).unscale(omegas[b]);
        }
        dft.unitary(&strip.boundary, &mut buf, FftDirection::Inverse);
        for ix in 0..n_x {
            corr[strip.index(ix, it)] = buf[ix];
        }
    }

    let values: Vec<Complex<T>> =
        v_n.values().iter().zip(&corr).map(|(a, b)| *a + *b).collect();
    Ok(KreinApplied { field: StripFunction::from_values(strip.clone(), values)?, depth_warning })
}

/// Both sides of the abstract Green identity on a pair of separated
/// modes f_i = e^(i xi_i x) e^(-omega_i t), lambda_i = xi_i^2 - omega_i^2,
/// per unit boundary volume: the pairing (T f_1, f_2) - (f_1, T f_2)
/// reduces to (lambda_1 - lambda_2) / (omega_1 + omega_2) for equal
/// frequencies, while the boundary side gives omega_2 - omega_1; both
/// vanish for distinct lattice modes. Returns |LHS - RHS|.
pub fn green_identity_residual<T: Real>(mode1: (T, T), mode2: (T, T)) -> Result<T> {
    let (xi1, om1) = mode1;
    let (xi2, om2) = mode2;
    for v in [xi1, om1, xi2, om2] {
        if !v.is_finite() {
            return Err(Error::invalid("mode parameters must be finite"));
        }
    }
    if !(om1 > T::zero()) || !(om2 > T::zero()) {
        return Err(Error::invalid("mode decay rates must be positive"));
    }
    let (lhs, rhs) = if xi1 == xi2 {
        let lam1 = xi1 * xi1 - om1 * om1;
        let lam2 = xi2 * xi2 - om2 * om2;
        ((lam1 - lam2) / (om1 + om2), om2 - om1)
    } else {
        // Distinct lattice modes are orthogonal on the torus: every
        // inner product on either side carries the vanishing x factor.
        (T::zero(), T::zero())
    };
    Ok((lhs - rhs).abs())
}

/// Lowest eigenvalue of the half-line Robin fiber, FD and analytic.
pub struct FiberBoundState<T: Real> {
    /// Smallest eigenvalue of the discretized fiber operator.
    pub fd_value: T,
    /// xi^2 - c^2, the bound state the half-line fiber contributes.
    pub analytic: T,
}

/// Discretizes -d^2/dt^2 + xi^2 on [0, depth) with the Robin row at 0
/// and a Neumann top, and returns its lowest eigenvalue next to the
/// analytic value xi^2 - c^2. A nonpositive coefficient binds no state
/// and yields `None`.
pub fn fiber_bound_state<T: LinalgReal>(
    c: T,
    xi: T,
    points_t: usize,
    depth: T,
) -> Result<Option<FiberBoundState<T>>> {
    if !c.is_finite() || !xi.is_finite() {
        return Err(Error::invalid("fiber parameters must be finite"));
    }
    if points_t < 8 {
        return Err(Error::invalid(format!("fiber needs at least 8 depth points, got {points_t}")));
    }
    if !(depth > T::zero()) || !depth.is_finite() {
        return Err(Error::invalid(format!("fiber depth = {depth}, expected finite > 0")));
    }
    if c <= T::zero() {
        return Ok(None);
    }
    let n = points_t;
    let h = depth / r(n as f64);
    let ht2 = T::one() / (h * h);
    let xi2 = xi * xi;
    let mut m = Array2::<T>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = r::<T>(2.0) * ht2 + xi2;
    }
    m[[0, 0]] -= r::<T>(2.0) * c / h;
    for i in 0..n - 1 {
        let v = t_coupling(i, n, ht2);
        m[[i, i + 1]] = v;
        m[[i + 1, i]] = v;
    }
    let (vals, _) = m.eigh(UPLO::Lower)?;
    Ok(Some(FiberBoundState { fd_value: vals[0], analytic: xi2 - c * c }))
}

/// Eigenvalues of a real strip operator inside (shift, upper), found
/// by shift-invert Lanczos with full reorthogonalization on the
/// weighted-symmetric matrix. The shift must be a negative number
/// below every eigenvalue of interest; `steps` bounds the Krylov
/// dimension. Ritz values are kept only when their true residual
/// passes, so the list is reliable but possibly incomplete when
/// `steps` is too small.
pub fn strip_eigenvalues<T>(
    op: &SparseOperator<T>,
    shift: T,
    upper: T,
    steps: usize,
) -> Result<Vec<T>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    if !op.is_real() {
        return Err(Error::invalid(
            "eigenvalue extraction handles the selfadjoint case only (real coefficient)",
        ));
    }
    if !(shift < upper) {
        return Err(Error::invalid(format!("window ({shift}, {upper}) is empty")));
    }
    if steps < 2 {
        return Err(Error::invalid("need at least 2 Lanczos steps"));
    }
    let solver = StripSolver::new(op, SpectralParameter::real(shift)?)?;
    let n = op.dim();
    let dec = symmetric_lanczos(
        n,
        |x: &[T], y: &mut [T]| {
            y.copy_from_slice(x);
            solver.solve_sym_real(y)
        },
        steps,
    )?;
    let (thetas, vecs) = tridiagonal_eigh(&dec.alphas, &dec.betas)?;

    let mut found: Vec<T> = Vec::new();
    let mut x = vec![T::zero(); n];
    let mut sx = vec![T::zero(); n];
    for (i, &theta) in thetas.iter().enumerate() {
        if theta == T::zero() {
            continue;
        }
        let mu = shift + T::one() / theta;
        if mu <= shift || mu >= upper {
            continue;
        }
        for v in x.iter_mut() {
            *v = T::zero();
        }
        for (k, basis_vec) in dec.basis.iter().enumerate() {
            let w = vecs[[k, i]];
            if w != T::zero() {
                for (xi, bi) in x.iter_mut().zip(basis_vec) {
                    *xi += w * *bi;
                }
            }
        }
        op.sym_matvec_real(&x, &mut sx);
        let mut num = T::zero();
        let mut den = T::zero();
        for (sxi, xi) in sx.iter().zip(&x) {
            let d = *sxi - mu * *xi;
            num += d * d;
            den += *xi * *xi;
        }
        let res = fsqrt(num / den) / (T::one() + fabs(mu));
        if res < r::<T>(RITZ_RTOL) {
            found.push(mu);
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    found.dedup_by(|a, b| fabs(*a - *b) <= r::<T>(1e-8) * (T::one() + fabs(*a)));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn strip_8x8() -> StripGrid<f64> {
        make_strip(make_grid(1, 8, 4.0).unwrap(), 8, 2.0).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let s = strip_8x8();
        for ix in 0..8 {
            for it in 0..8 {
                assert_eq!(s.split(s.index(ix, it)), (ix, it));
            }
        }
    }

    #[test]
    fn strip_requires_one_dimensional_boundary() {
        let g2 = make_grid(2, 8, 4.0).unwrap();
        assert!(make_strip(g2, 8, 2.0).is_err());
    }

    #[test]
    fn quadrature_weights_integrate_constants() {
        // Both rules integrate 1 over [0, (n-1)h] exactly.
        for rule in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
            for n_t in [8usize, 9, 16, 33] {
                let h = 0.25f64;
                let w = quadrature_weights(rule, n_t, h);
                let total: f64 = w.iter().sum();
                let exact = h * (n_t as f64 - 1.0);
                assert!((total - exact).abs() < 1e-12, "{rule:?} n_t={n_t}: {total} vs {exact}");
            }
        }
    }

    #[test]
    fn simpson_beats_trapezoid_on_smooth_decay() {
        let n_t = 65usize;
        let h = 8.0 / n_t as f64;
        let exact = 1.0 - (-(h * (n_t as f64 - 1.0))).exp();
        let err = |rule| {
            let w = quadrature_weights::<f64>(rule, n_t, h);
            let total: f64 = w.iter().enumerate().map(|(i, wi)| wi * (-(h * i as f64)).exp()).sum();
            (total - exact).abs()
        };
        assert!(err(QuadratureRule::Simpson) < 0.2 * err(QuadratureRule::Trapezoid));
    }

    #[test]
    fn robin_matrix_is_exactly_symmetric_for_real_alpha() {
        let s = strip_8x8();
        let alpha = GridFunction::from_fn(s.boundary().clone(), |x| {
            num_complex::Complex::new(1.0 + 0.5 * (x[0] - 2.0).abs(), 0.0)
        })
        .unwrap();
        let op = fd_robin_matrix(&alpha, &s).unwrap();
        assert!(op.is_real());
        let n = op.dim();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(op.sym_entry(i, j), op.sym_entry(j, i), "asymmetry at ({i}, {j})");
            }
        }
    }

    #[test]
    fn neumann_rows_mirror_for_zero_alpha() {
        let s = strip_8x8();
        let zero = GridFunction::zeros(s.boundary().clone());
        let op = fd_robin_matrix(&zero, &s).unwrap();
        let n_t = s.points_t();
        // Bottom row of the depth stencil equals the top row mirrored.
        let bottom = op.sym_entry(s.index(0, 0), s.index(0, 1));
        let top = op.sym_entry(s.index(0, n_t - 1), s.index(0, n_t - 2));
        assert_eq!(bottom, top);
        let d0 = op.sym_entry(s.index(0, 0), s.index(0, 0));
        let dtop = op.sym_entry(s.index(0, n_t - 1), s.index(0, n_t - 1));
        assert_eq!(d0, dtop);
    }

    #[test]
    fn complex_alpha_matrix_conjugate_transposes() {
        let s = strip_8x8();
        let mk = |im: f64| {
            GridFunction::from_fn(s.boundary().clone(), |x| {
                num_complex::Complex::new(0.5 + 0.1 * x[0], im * (1.0 + x[0]))
            })
            .unwrap()
        };
        let op = fd_robin_matrix(&mk(0.3), &s).unwrap();
        let op_conj = fd_robin_matrix(&mk(-0.3), &s).unwrap();
        assert!(!op.is_real());
        let n = op.dim();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(op.sym_entry(i, j), op_conj.sym_entry(j, i).conj());
            }
        }
    }

    #[test]
    fn green_identity_closed_forms() {
        assert_eq!(green_identity_residual((0.0f64, 1.0), (0.0, 1.0)).unwrap(), 0.0);
        // omega 1 vs 2 at equal frequency: both sides equal 1.
        assert!(green_identity_residual((0.0f64, 1.0), (0.0, 2.0)).unwrap() < 1e-15);
        assert_eq!(green_identity_residual((1.0f64, 1.0), (2.0, 5.0)).unwrap(), 0.0);
        assert!(green_identity_residual((0.0f64, -1.0), (0.0, 2.0)).is_err());
    }
}
