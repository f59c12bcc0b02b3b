//! Periodic lattice model of the boundary hyperplane and its Fourier
//! calculus.
//!
//! The boundary R^n is truncated to a torus [0, L)^n sampled with N
//! points per axis. Index conventions, fixed once for reproducibility:
//!
//! * Lattice points x_j = j L / N componentwise, stored lexicographically
//!   with axis 0 slowest (row-major over axes).
//! * Frequencies are kept in DFT bin order: bin b on an axis carries the
//!   integer frequency b for b < (N+1)/2 and b - N otherwise, so the
//!   Nyquist bin of an even N sits at -N/2. Physical frequency is
//!   xi = 2 pi k / L.
//! * The DFT is unitary (1/sqrt(N) per axis per direction), so the
//!   operator norm of a Fourier multiplier equals max |symbol|.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{r, Real};

/// Uniform periodic lattice on [0, L)^n with n in {1, 2, 3}.
#[derive(Clone, Debug)]
pub struct BoundaryGrid<T: Real> {
    n: usize,
    points: usize,
    length: T,
    coords: Vec<T>,
    freqs: Vec<T>,
}

impl<T: Real> PartialEq for BoundaryGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.points == other.points && self.length == other.length
    }
}

/// Builds the lattice; rejects n outside {1, 2, 3}, N < 4 and L <= 0.
pub fn make_grid<T: Real>(n: usize, points: usize, length: T) -> Result<BoundaryGrid<T>> {
    if !(1..=3).contains(&n) {
        return Err(Error::invalid(format!("dimension n = {n}, expected 1, 2 or 3")));
    }
    if points < 4 {
        return Err(Error::invalid(format!("points per axis N = {points}, expected N >= 4")));
    }
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::invalid(format!("edge length L = {length}, expected L > 0")));
    }
    let h = length / r::<T>(points as f64);
    let coords = (0..points).map(|j| h * r::<T>(j as f64)).collect();
    let two_pi = T::PI() + T::PI();
    let freqs = (0..points)
        .map(|b| {
            // Integer frequency of bin b; Nyquist of even N goes to -N/2.
            let k = if b < points.div_ceil(2) { b as i64 } else { b as i64 - points as i64 };
            two_pi * r::<T>(k as f64) / length
        })
        .collect();
    Ok(BoundaryGrid { n, points, length, coords, freqs })
}

impl<T: Real> BoundaryGrid<T> {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn edge_length(&self) -> T {
        self.length
    }

    /// Lattice spacing L / N.
    pub fn spacing(&self) -> T {
        self.length / r::<T>(self.points as f64)
    }

    /// Total number of lattice points, N^n.
    pub fn total_points(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    /// Splits a linear index into per-axis digits (axis 0 slowest).
    pub fn decompose(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.n).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    /// Lattice point at a linear index, zero-padded beyond axis n.
    pub fn point(&self, idx: usize) -> [T; 3] {
        let d = self.decompose(idx);
        let mut out = [T::zero(); 3];
        for a in 0..self.n {
            out[a] = self.coords[d[a]];
        }
        out
    }

    /// Frequency vector at a linear bin index, zero-padded beyond axis n.
    pub fn frequency(&self, idx: usize) -> [T; 3] {
        let d = self.decompose(idx);
        let mut out = [T::zero(); 3];
        for a in 0..self.n {
            out[a] = self.freqs[d[a]];
        }
        out
    }

    /// |xi|^2 at a linear bin index.
    pub fn freq_norm_sq(&self, idx: usize) -> T {
        let d = self.decompose(idx);
        let mut s = T::zero();
        for a in 0..self.n {
            s += self.freqs[d[a]] * self.freqs[d[a]];
        }
        s
    }

    /// Axis coordinate of digit j.
    pub fn coord_axis(&self, j: usize) -> T {
        self.coords[j]
    }

    /// Axis frequency of bin b (DFT order).
    pub fn freq_axis(&self, b: usize) -> T {
        self.freqs[b]
    }

    /// Signed minimum-image difference x - c, reduced to [-L/2, L/2).
    pub fn min_image(&self, x: T, c: T) -> T {
        let l = self.length;
        let mut d = (x - c) % l;
        if d < T::zero() {
            d += l;
        }
        if d >= l / r::<T>(2.0) {
            d -= l;
        }
        d
    }

    pub(crate) fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::mismatch(format!(
                "{what}: (n={}, N={}, L={}) vs (n={}, N={}, L={})",
                self.n, self.points, self.length, other.n, other.points, other.length
            )))
        }
    }
}

/// Complex-valued samples on a [`BoundaryGrid`], lexicographic order.
#[derive(Clone, Debug)]
pub struct GridFunction<T: Real> {
    grid: BoundaryGrid<T>,
    values: Array1<Complex<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn from_values(grid: BoundaryGrid<T>, values: Array1<Complex<T>>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::mismatch(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.total_points()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("grid function contains non-finite entries"));
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(grid: BoundaryGrid<T>, f: impl Fn(&[T; 3]) -> Complex<T>) -> Result<Self> {
        let values = (0..grid.total_points()).map(|i| f(&grid.point(i))).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: BoundaryGrid<T>, value: Complex<T>) -> Self {
        let values = Array1::from_elem(grid.total_points(), value);
        GridFunction { grid, values }
    }

    pub fn zeros(grid: BoundaryGrid<T>) -> Self {
        Self::constant(grid, Complex::new(T::zero(), T::zero()))
    }

    pub fn grid(&self) -> &BoundaryGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &Array1<Complex<T>> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sup norm max |f|.
    pub fn linf_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == T::zero() && v.im == T::zero())
    }

    pub fn into_values(self) -> Array1<Complex<T>> {
        self.values
    }
}

/// Coefficient families used for Robin data.
///
/// Distances are periodic (minimum image), so a bump stays genuinely
/// compact inside the torus.
#[derive(Clone, Debug)]
pub enum CoefficientSpec<T: Real> {
    /// alpha(x) = value.
    Constant { value: Complex<T> },
    /// alpha(x) = amplitude * exp(-d(x, center)^2 / (2 sigma^2)).
    Gaussian { amplitude: Complex<T>, center: [T; 3], sigma: T },
    /// alpha(x) = amplitude on the cube max_a |x_a - center_a| <= halfwidth, else 0.
    BoxBump { amplitude: Complex<T>, center: [T; 3], halfwidth: T },
    /// alpha(x) = amplitude * (1 + d(x, 0)^2)^(-exponent/2).
    PowerTail { amplitude: Complex<T>, exponent: T },
}

/// Evaluates a coefficient family at every lattice point.
pub fn sample_coefficient<T: Real>(
    spec: &CoefficientSpec<T>,
    grid: &BoundaryGrid<T>,
) -> Result<GridFunction<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    match spec {
        CoefficientSpec::Constant { value } => Ok(GridFunction::constant(grid.clone(), *value)),
        CoefficientSpec::Gaussian { amplitude, center, sigma } => {
            if !(*sigma > T::zero()) {
                return Err(Error::invalid(format!("gaussian sigma = {sigma}, expected > 0")));
            }
            let two_sig_sq = *sigma * *sigma * r::<T>(2.0);
            GridFunction::from_fn(grid.clone(), |x| {
                let mut d2 = T::zero();
                for a in 0..grid.n {
                    let d = grid.min_image(x[a], center[a]);
                    d2 += d * d;
                }
                *amplitude * (-d2 / two_sig_sq).exp()
            })
        }
        CoefficientSpec::BoxBump { amplitude, center, halfwidth } => {
            let half_edge = grid.length / r::<T>(2.0);
            if !(*halfwidth > T::zero()) || !(*halfwidth < half_edge) {
                return Err(Error::invalid(format!(
                    "box halfwidth = {halfwidth}, expected 0 < halfwidth < L/2 = {half_edge}"
                )));
            }
            GridFunction::from_fn(grid.clone(), |x| {
                let inside = (0..grid.n).all(|a| grid.min_image(x[a], center[a]).abs() <= *halfwidth);
                if inside {
                    *amplitude
                } else {
                    zero
                }
            })
        }
        CoefficientSpec::PowerTail { amplitude, exponent } => {
            if !(*exponent > T::zero()) {
                return Err(Error::invalid(format!("power tail exponent = {exponent}, expected > 0")));
            }
            GridFunction::from_fn(grid.clone(), |x| {
                let mut d2 = T::zero();
                for a in 0..grid.n {
                    let d = grid.min_image(x[a], T::zero());
                    d2 += d * d;
                }
                *amplitude * (T::one() + d2).powf(-*exponent / r::<T>(2.0))
            })
        }
    }
}

/// Diagonal-in-frequency operator given by its symbol in DFT bin order.
#[derive(Clone, Debug)]
pub struct FourierMultiplier<T: Real> {
    grid: BoundaryGrid<T>,
    symbol: Array1<Complex<T>>,
}

impl<T: Real> FourierMultiplier<T> {
    pub fn from_symbol(grid: BoundaryGrid<T>, symbol: Array1<Complex<T>>) -> Result<Self> {
        if symbol.len() != grid.total_points() {
            return Err(Error::mismatch(format!(
                "symbol length {} does not match grid size {}",
                symbol.len(),
                grid.total_points()
            )));
        }
        if symbol.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("multiplier symbol contains non-finite entries"));
        }
        Ok(FourierMultiplier { grid, symbol })
    }

    /// Evaluates `f` at every frequency vector (DFT bin order).
    pub fn from_symbol_fn(
        grid: BoundaryGrid<T>,
        f: impl Fn(&[T; 3]) -> Complex<T>,
    ) -> Result<Self> {
        let symbol = (0..grid.total_points()).map(|i| f(&grid.frequency(i))).collect();
        Self::from_symbol(grid, symbol)
    }

    /// Evaluates a radial symbol f(|xi|^2) at every frequency.
    pub fn from_radial_fn(grid: BoundaryGrid<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let symbol = (0..grid.total_points()).map(|i| f(grid.freq_norm_sq(i))).collect();
        Self::from_symbol(grid, symbol)
    }

    pub fn grid(&self) -> &BoundaryGrid<T> {
        &self.grid
    }

    pub fn symbol(&self) -> &Array1<Complex<T>> {
        &self.symbol
    }

    /// Discrete operator norm, max |symbol| (the DFT is unitary).
    pub fn operator_norm(&self) -> T {
        self.symbol.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn is_real(&self) -> bool {
        self.symbol.iter().all(|v| v.im == T::zero())
    }

    /// Dense matrix of the multiplier.
    ///
    /// The matrix is circulant per axis: entry (j, j') depends only on
    /// j - j' mod N, and that stencil is one unnormalized inverse DFT of
    /// the symbol divided by N^n. Equivalent to
    /// `operator_matrix(&[self.into()])` but one FFT instead of N^n.
    pub fn matrix(&self) -> BoundaryOperator<T> {
        let stencil = self.circulant_stencil();
        let total = self.grid.total_points();
        let digits: Vec<[usize; 3]> = (0..total).map(|i| self.grid.decompose(i)).collect();
        let n = self.grid.n;
        let points = self.grid.points;
        let mut entries = Array2::from_elem((total, total), Complex::new(T::zero(), T::zero()));
        for row in 0..total {
            let dr = digits[row];
            for col in 0..total {
                let dc = digits[col];
                let mut idx = 0usize;
                for a in 0..n {
                    idx = idx * points + (dr[a] + points - dc[a]) % points;
                }
                entries[[row, col]] = stencil[idx];
            }
        }
        BoundaryOperator { grid: self.grid.clone(), entries, condition_flag: false }
    }

    /// Dense matrix of a real-symbol multiplier, materialized in `T`.
    ///
    /// Requires the symbol to be real and even in every axis (true for
    /// all radial symbols used here); the imaginary residue of the
    /// stencil must sit at rounding level or the call fails.
    pub(crate) fn real_matrix(&self) -> Result<Array2<T>> {
        let stencil = self.circulant_stencil();
        let scale = stencil.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        let resid = stencil.iter().map(|v| v.im.abs()).fold(T::zero(), T::max);
        let floor = r::<T>(1e-10).max(T::epsilon() * r::<T>(100.0));
        if resid > floor * scale {
            return Err(Error::invalid(
                "multiplier stencil is not real; symbol must be real and even",
            ));
        }
        let total = self.grid.total_points();
        let digits: Vec<[usize; 3]> = (0..total).map(|i| self.grid.decompose(i)).collect();
        let n = self.grid.n;
        let points = self.grid.points;
        let mut entries = Array2::zeros((total, total));
        for row in 0..total {
            let dr = digits[row];
            for col in 0..total {
                let dc = digits[col];
                let mut idx = 0usize;
                for a in 0..n {
                    idx = idx * points + (dr[a] + points - dc[a]) % points;
                }
                entries[[row, col]] = stencil[idx].re;
            }
        }
        Ok(entries)
    }

    fn circulant_stencil(&self) -> Vec<Complex<T>> {
        let total = self.grid.total_points();
        let mut buf: Vec<Complex<T>> = self.symbol.to_vec();
        let mut dft = Dft::new();
        dft.unitary(&self.grid, &mut buf, FftDirection::Inverse);
        let inv_sqrt = T::one() / r::<T>(total as f64).sqrt();
        for v in &mut buf {
            *v = *v * inv_sqrt;
        }
        buf
    }
}

/// Dense operator on the lattice.
#[derive(Clone, Debug)]
pub struct BoundaryOperator<T: Real> {
    grid: BoundaryGrid<T>,
    entries: Array2<Complex<T>>,
    condition_flag: bool,
}

impl<T: Real> BoundaryOperator<T> {
    pub fn from_entries(grid: BoundaryGrid<T>, entries: Array2<Complex<T>>) -> Result<Self> {
        let total = grid.total_points();
        if entries.nrows() != total || entries.ncols() != total {
            return Err(Error::mismatch(format!(
                "matrix shape {}x{} does not match grid size {}",
                entries.nrows(),
                entries.ncols(),
                total
            )));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("operator matrix contains non-finite entries"));
        }
        Ok(BoundaryOperator { grid, entries, condition_flag: false })
    }

    pub(crate) fn from_parts(
        grid: BoundaryGrid<T>,
        entries: Array2<Complex<T>>,
        condition_flag: bool,
    ) -> Self {
        BoundaryOperator { grid, entries, condition_flag }
    }

    pub fn grid(&self) -> &BoundaryGrid<T> {
        &self.grid
    }

    pub fn entries(&self) -> &Array2<Complex<T>> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn into_entries(self) -> Array2<Complex<T>> {
        self.entries
    }

    /// Set when an inversion inside the producing operation saw a
    /// condition estimate above 1e12.
    pub fn condition_flag(&self) -> bool {
        self.condition_flag
    }

    /// Applies the dense matrix to a grid function.
    pub fn apply(&self, f: &GridFunction<T>) -> Result<GridFunction<T>> {
        self.grid.check_same(f.grid(), "operator applied to function on different grid")?;
        let out = self.entries.dot(f.values());
        GridFunction::from_values(self.grid.clone(), out)
    }
}

/// One factor of an operator composition.
#[derive(Clone, Copy)]
pub enum OperatorFactor<'a, T: Real> {
    Multiplier(&'a FourierMultiplier<T>),
    Pointwise(&'a GridFunction<T>),
}

impl<'a, T: Real> From<&'a FourierMultiplier<T>> for OperatorFactor<'a, T> {
    fn from(m: &'a FourierMultiplier<T>) -> Self {
        OperatorFactor::Multiplier(m)
    }
}

impl<'a, T: Real> From<&'a GridFunction<T>> for OperatorFactor<'a, T> {
    fn from(f: &'a GridFunction<T>) -> Self {
        OperatorFactor::Pointwise(f)
    }
}

impl<'a, T: Real> OperatorFactor<'a, T> {
    fn grid(&self) -> &BoundaryGrid<T> {
        match self {
            OperatorFactor::Multiplier(m) => m.grid(),
            OperatorFactor::Pointwise(f) => f.grid(),
        }
    }
}

/// inverse-DFT(symbol * DFT(f)), the multiplier acting on a function.
pub fn apply_multiplier<T: Real>(
    m: &FourierMultiplier<T>,
    f: &GridFunction<T>,
) -> Result<GridFunction<T>> {
    m.grid().check_same(f.grid(), "multiplier and function grids differ")?;
    let mut dft = Dft::new();
    let mut buf = f.values.to_vec();
    apply_multiplier_in_place(m, &mut buf, &mut dft);
    GridFunction::from_values(f.grid.clone(), Array1::from_vec(buf))
}

fn apply_multiplier_in_place<T: Real>(
    m: &FourierMultiplier<T>,
    buf: &mut [Complex<T>],
    dft: &mut Dft<T>,
) {
    dft.unitary(&m.grid, buf, FftDirection::Forward);
    for (v, s) in buf.iter_mut().zip(m.symbol.iter()) {
        *v = *v * *s;
    }
    dft.unitary(&m.grid, buf, FftDirection::Inverse);
}

/// Entrywise product alpha . f (the multiplication operator).
pub fn pointwise_multiply<T: Real>(
    alpha: &GridFunction<T>,
    f: &GridFunction<T>,
) -> Result<GridFunction<T>> {
    alpha.grid.check_same(&f.grid, "pointwise factors on different grids")?;
    let values = alpha
        .values
        .iter()
        .zip(f.values.iter())
        .map(|(a, b)| *a * *b)
        .collect();
    GridFunction::from_values(f.grid.clone(), values)
}

/// Dense matrix of a factor composition, leftmost factor outermost
/// (applied last). Built by running the chain over every standard basis
/// vector.
pub fn operator_matrix<T: Real>(factors: &[OperatorFactor<'_, T>]) -> Result<BoundaryOperator<T>> {
    let Some(first) = factors.first() else {
        return Err(Error::invalid("operator_matrix requires at least one factor"));
    };
    let grid = first.grid().clone();
    for f in factors {
        grid.check_same(f.grid(), "operator factors on different grids")?;
    }
    let total = grid.total_points();
    let mut entries = Array2::from_elem((total, total), Complex::new(T::zero(), T::zero()));
    let mut dft = Dft::new();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); total];
    for col in 0..total {
        for v in buf.iter_mut() {
            *v = Complex::new(T::zero(), T::zero());
        }
        buf[col] = Complex::new(T::one(), T::zero());
        for factor in factors.iter().rev() {
            match factor {
                OperatorFactor::Multiplier(m) => apply_multiplier_in_place(m, &mut buf, &mut dft),
                OperatorFactor::Pointwise(a) => {
                    for (v, s) in buf.iter_mut().zip(a.values.iter()) {
                        *v = *v * *s;
                    }
                }
            }
        }
        for row in 0..total {
            entries[[row, col]] = buf[row];
        }
    }
    Ok(BoundaryOperator { grid, entries, condition_flag: false })
}

/// Unitary n-dimensional DFT working in place on lexicographic data.
pub(crate) struct Dft<T: Real> {
    planner: FftPlanner<T>,
}

impl<T: Real> Dft<T> {
    pub(crate) fn new() -> Self {
        Dft { planner: FftPlanner::new() }
    }

    pub(crate) fn unitary(
        &mut self,
        grid: &BoundaryGrid<T>,
        buf: &mut [Complex<T>],
        dir: FftDirection,
    ) {
        debug_assert_eq!(buf.len(), grid.total_points());
        let n = grid.n;
        let points = grid.points;
        let total = buf.len();
        let norm = T::one() / r::<T>(points as f64).sqrt();
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); points];
        for axis in 0..n {
            let fft = self.planner.plan_fft(points, dir);
            let stride = points.pow((n - 1 - axis) as u32);
            if stride == 1 {
                for chunk in buf.chunks_exact_mut(points) {
                    fft.process(chunk);
                }
            } else {
                let blocks = total / (points * stride);
                for b in 0..blocks {
                    let base = b * points * stride;
                    for s in 0..stride {
                        for l in 0..points {
                            scratch[l] = buf[base + s + l * stride];
                        }
                        fft.process(&mut scratch);
                        for l in 0..points {
                            buf[base + s + l * stride] = scratch[l];
                        }
                    }
                }
            }
            for v in buf.iter_mut() {
                *v = *v * norm;
            }
        }
    }
}
