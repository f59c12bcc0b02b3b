//! Shared helpers for the integration suites: seeded randomness and
//! quick constructors for boundary data.

#![allow(dead_code)]

use ndarray::Array1;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robinhs::grid::{BoundaryGrid, GridFunction};

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Complex samples with entries uniform in the square [-1, 1]^2.
pub fn random_function(grid: &BoundaryGrid<f64>, rng: &mut ChaCha8Rng) -> GridFunction<f64> {
    let values: Array1<C64> = (0..grid.total_points())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_values(grid.clone(), values).unwrap()
}

/// Real samples with entries uniform in [-1, 1].
pub fn random_real_function(grid: &BoundaryGrid<f64>, rng: &mut ChaCha8Rng) -> GridFunction<f64> {
    let values: Array1<C64> =
        (0..grid.total_points()).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
    GridFunction::from_values(grid.clone(), values).unwrap()
}

/// Max entrywise modulus of a dense complex matrix.
pub fn max_abs(m: &ndarray::Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
