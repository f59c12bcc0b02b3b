//! Discrete-eigenvalue search through the Birman-Schwinger characteristic.
//!
//! The smallest singular value of I - alpha M(lambda) vanishes exactly
//! at discrete eigenvalues of the Robin operator and stays near 1 far
//! from them, so the search is: evaluate the characteristic on a coarse
//! mesh over the requested rectangle, seed a derivative-free local
//! minimization at every mesh-local minimum below a fixed threshold,
//! and keep refined points whose residual drops below the tolerance.

use ndarray_linalg::{Lapack, Scalar};
use num_complex::Complex;

use super::{bs_characteristic, SpectralParameter};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::{fabs, r, LinalgReal, Real};

/// Mesh values below this seed a local minimization; the characteristic
/// approaches 1 away from eigenvalues.
const SEED_THRESHOLD: f64 = 0.9;

/// Coordinate-descent sweeps per seed before giving up on movement.
const MAX_CYCLES: usize = 12;

/// Deduplication radius in units of the refinement tolerance.
const DEDUP_FACTOR: f64 = 10.0;

/// Golden-section ratio (sqrt(5) - 1) / 2.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Rectangle in the complex plane, kept strictly away from [0, inf).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchRegion<T: Real> {
    re: (T, T),
    im: (T, T),
}

impl<T: Real> SearchRegion<T> {
    /// Rectangle [re.0, re.1] x [im.0, im.1]. Either bound pair may be
    /// degenerate (equal endpoints pin that coordinate). The rectangle
    /// must not touch the half-line [0, inf): when the imaginary range
    /// spans zero the real part must stay strictly negative.
    pub fn new(re: (T, T), im: (T, T)) -> Result<Self> {
        for v in [re.0, re.1, im.0, im.1] {
            if !v.is_finite() {
                return Err(Error::invalid("search region bounds must be finite"));
            }
        }
        if re.0 > re.1 || im.0 > im.1 {
            return Err(Error::invalid("search region bounds must be ordered (min, max)"));
        }
        let crosses_axis = im.0 <= T::zero() && im.1 >= T::zero();
        if crosses_axis && re.1 >= T::zero() {
            return Err(Error::invalid(
                "search region touches [0, inf); shrink it below the essential spectrum",
            ));
        }
        Ok(SearchRegion { re, im })
    }

    pub fn re_bounds(&self) -> (T, T) {
        self.re
    }

    pub fn im_bounds(&self) -> (T, T) {
        self.im
    }

    fn clamp_re(&self, x: T) -> T {
        x.max(self.re.0).min(self.re.1)
    }

    fn clamp_im(&self, x: T) -> T {
        x.max(self.im.0).min(self.im.1)
    }
}

/// How a refinement run terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineStatus {
    /// Residual fell below a quarter of the tolerance.
    Converged,
    /// Brackets shrank to the width floor with the residual still in
    /// the accepted band.
    BracketFloor,
}

/// One refined root of the Birman-Schwinger characteristic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueRecord<T: Real> {
    pub lambda: Complex<T>,
    /// Smallest singular value of I - alpha M(lambda) at the returned
    /// point; nonnegative by construction.
    pub residual: T,
    pub status: RefineStatus,
}

/// Locates discrete eigenvalues of the Robin operator with coefficient
/// `alpha` inside `region`.
///
/// `scan` gives the mesh point counts along the real and imaginary
/// axes (a degenerate axis uses a single point regardless). Every
/// returned record satisfies `residual < refine`; records closer than
/// ten tolerances are merged keeping the smaller residual, and the
/// result is sorted by real then imaginary part. An empty result means
/// no root was detected; it is not an error.
pub fn find_eigenvalues<T>(
    alpha: &GridFunction<T>,
    region: SearchRegion<T>,
    scan: (usize, usize),
    refine: T,
) -> Result<Vec<EigenvalueRecord<T>>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    if !(refine > T::zero()) {
        return Err(Error::invalid(format!("refine tolerance = {refine}, expected > 0")));
    }
    let res = axis_points(region.re, scan.0, "real")?;
    let ims = axis_points(region.im, scan.1, "imaginary")?;
    let n_re = res.len();
    let n_im = ims.len();

    let mut vals = Vec::with_capacity(n_re * n_im);
    for &im in &ims {
        for &re in &res {
            vals.push(characteristic(alpha, re, im)?);
        }
    }

    // Mesh-local minima below the threshold seed refinement. Ties
    // break lexicographically so an exactly flat pair seeds once.
    let threshold = r::<T>(SEED_THRESHOLD);
    let mut seeds: Vec<(usize, usize)> = Vec::new();
    for j in 0..n_im {
        for i in 0..n_re {
            let k = j * n_re + i;
            let v = vals[k];
            if v >= threshold {
                continue;
            }
            let mut is_min = true;
            'nbrs: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (i2, j2) = (i as i64 + di, j as i64 + dj);
                    if i2 < 0 || j2 < 0 || i2 >= n_re as i64 || j2 >= n_im as i64 {
                        continue;
                    }
                    let k2 = j2 as usize * n_re + i2 as usize;
                    let w = vals[k2];
                    let beats = if k2 < k { v < w } else { v <= w };
                    if !beats {
                        is_min = false;
                        break 'nbrs;
                    }
                }
            }
            if is_min {
                seeds.push((i, j));
            }
        }
    }

    let d_re = if n_re > 1 { res[1] - res[0] } else { T::zero() };
    let d_im = if n_im > 1 { ims[1] - ims[0] } else { T::zero() };

    let mut found = Vec::new();
    for (i, j) in seeds {
        let start = (res[i], ims[j], vals[j * n_re + i]);
        if let Some(rec) = refine_seed(alpha, &region, start, (d_re, d_im), refine)? {
            found.push(rec);
        }
    }

    let mut kept = dedup(found, r::<T>(DEDUP_FACTOR) * refine);
    kept.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("eigenvalue records are finite")
    });
    Ok(kept)
}

fn characteristic<T>(alpha: &GridFunction<T>, re: T, im: T) -> Result<T>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    bs_characteristic(alpha, SpectralParameter::new(Complex::new(re, im))?)
}

fn axis_points<T: Real>(range: (T, T), count: usize, axis: &str) -> Result<Vec<T>> {
    if range.0 == range.1 {
        return Ok(vec![range.0]);
    }
    if count < 2 {
        return Err(Error::invalid(format!(
            "scan needs at least 2 points along the non-degenerate {axis} axis, got {count}"
        )));
    }
    let step = (range.1 - range.0) / r::<T>((count - 1) as f64);
    Ok((0..count)
        .map(|k| if k + 1 == count { range.1 } else { range.0 + step * r::<T>(k as f64) })
        .collect())
}

/// Interval width below which a coordinate search stops; scales with
/// the magnitude of the current point so it stays meaningful across
/// the region.
fn width_floor<T: Real>(re: T, im: T) -> T {
    let base = r::<T>(1e-12).max(r::<T>(100.0) * T::epsilon());
    base * (T::one() + (re * re + im * im).sqrt())
}

fn refine_seed<T>(
    alpha: &GridFunction<T>,
    region: &SearchRegion<T>,
    start: (T, T, T),
    spacing: (T, T),
    refine: T,
) -> Result<Option<EigenvalueRecord<T>>>
where
    T: LinalgReal,
    Complex<T>: Lapack + Scalar<Real = T, Complex = Complex<T>>,
{
    let early = refine * r::<T>(0.25);
    let (mut xr, mut xi, mut val) = start;
    let re_free = region.re.1 > region.re.0;
    let im_free = region.im.1 > region.im.0;
    let mut dr_re = spacing.0;
    let mut dr_im = spacing.1;

    for _ in 0..MAX_CYCLES {
        if val < early {
            break;
        }
        let floor = width_floor(xr, xi);
        let mut biggest = T::zero();
        if re_free {
            let a = region.clamp_re(xr - dr_re);
            let b = region.clamp_re(xr + dr_re);
            let im_now = xi;
            let (nx, nv) =
                golden_min(|t| characteristic(alpha, t, im_now), a, b, floor, early, xr, val)?;
            let mv = fabs(nx - xr);
            xr = nx;
            val = nv;
            dr_re = (r::<T>(10.0) * floor).max(r::<T>(4.0) * mv);
            biggest = biggest.max(mv);
            if val < early {
                break;
            }
        }
        if im_free {
            let a = region.clamp_im(xi - dr_im);
            let b = region.clamp_im(xi + dr_im);
            let re_now = xr;
            let (nx, nv) =
                golden_min(|t| characteristic(alpha, re_now, t), a, b, floor, early, xi, val)?;
            let mv = fabs(nx - xi);
            xi = nx;
            val = nv;
            dr_im = (r::<T>(10.0) * floor).max(r::<T>(4.0) * mv);
            biggest = biggest.max(mv);
            if val < early {
                break;
            }
        }
        if biggest < floor {
            break;
        }
    }

    let status = if val < early { RefineStatus::Converged } else { RefineStatus::BracketFloor };
    if val < refine {
        Ok(Some(EigenvalueRecord { lambda: Complex::new(xr, xi), residual: val, status }))
    } else {
        Ok(None)
    }
}

/// Golden-section minimization on [a, b] seeded with an incumbent; the
/// best point ever probed is returned, so the result never regresses.
fn golden_min<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    mut a: T,
    mut b: T,
    w_floor: T,
    early: T,
    x0: T,
    f0: T,
) -> Result<(T, T)> {
    let mut best_x = x0;
    let mut best_f = f0;
    if b - a <= w_floor {
        return Ok((best_x, best_f));
    }
    let phi = r::<T>(GOLDEN);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    if fc < best_f {
        best_x = c;
        best_f = fc;
    }
    if fd < best_f {
        best_x = d;
        best_f = fd;
    }
    while b - a > w_floor && best_f >= early {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Ok((best_x, best_f))
}

/// Keeps the best record in every tolerance ball.
fn dedup<T: Real>(mut recs: Vec<EigenvalueRecord<T>>, radius: T) -> Vec<EigenvalueRecord<T>> {
    recs.sort_by(|a, b| a.residual.partial_cmp(&b.residual).expect("residuals are finite"));
    let mut kept: Vec<EigenvalueRecord<T>> = Vec::new();
    for rec in recs {
        if kept.iter().all(|k| (k.lambda - rec.lambda).norm() > radius) {
            kept.push(rec);
        }
    }
    kept
}
