//! Grid and Fourier-calculus integration tests: lattice layout,
//! coefficient sampling, multiplier application against independent
//! oracles, and dense materialization.

mod common;

use common::{c, max_abs, random_function, rng, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use rand::Rng;
use robinhs::grid::{
    apply_multiplier, make_grid, operator_matrix, pointwise_multiply, sample_coefficient,
    CoefficientSpec, FourierMultiplier, GridFunction, OperatorFactor,
};

fn linf_diff(a: &GridFunction<f64>, b: &GridFunction<f64>) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn frequency_lattice_is_integer_for_unit_circle() {
    let grid = make_grid(1, 8, std::f64::consts::TAU).unwrap();
    let mut freqs: Vec<f64> = (0..8).map(|b| grid.freq_axis(b)).collect();
    freqs.sort_by(f64::total_cmp);
    let expected = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    for (f, e) in freqs.iter().zip(expected) {
        assert!((f - e).abs() <= 1e-12, "frequency {f} vs {e}");
    }
}

#[test]
fn two_dimensional_lattice_has_the_documented_components() {
    let grid = make_grid(2, 4, 1.0).unwrap();
    assert_eq!(grid.total_points(), 16);
    let allowed = [-4.0 * std::f64::consts::PI, -2.0 * std::f64::consts::PI, 0.0,
        2.0 * std::f64::consts::PI];
    for idx in 0..16 {
        for comp in &grid.frequency(idx)[..2] {
            assert!(
                allowed.iter().any(|a| (a - comp).abs() <= 1e-12),
                "unexpected component {comp}"
            );
        }
    }
}

#[test]
fn grid_constructor_rejects_bad_parameters() {
    assert!(make_grid(1, 4, 0.0).is_err());
    assert!(make_grid(0, 8, 1.0).is_err());
    assert!(make_grid(4, 8, 1.0).is_err());
    assert!(make_grid(2, 3, 1.0).is_err());
}

#[test]
fn zero_frequency_appears_exactly_once() {
    for (n, points) in [(1usize, 9usize), (1, 8), (2, 6), (3, 4)] {
        let grid = make_grid(n, points, 2.7).unwrap();
        let zeros = (0..grid.total_points())
            .filter(|&i| grid.freq_norm_sq(i) == 0.0)
            .count();
        assert_eq!(zeros, 1, "n = {n}, N = {points}");
    }
}

#[test]
fn constant_family_fills_the_lattice() {
    let grid = make_grid(2, 8, 3.0).unwrap();
    let f = sample_coefficient(&CoefficientSpec::Constant { value: c(2.0, 0.0) }, &grid).unwrap();
    assert!(f.values().iter().all(|v| *v == c(2.0, 0.0)));
}

#[test]
fn gaussian_peaks_at_its_center() {
    let grid = make_grid(1, 64, 10.0).unwrap();
    // Center on a lattice point, so the peak value is exactly the amplitude.
    let center = grid.coord_axis(20);
    let spec = CoefficientSpec::Gaussian { amplitude: c(1.0, 0.0), center: [center, 0.0, 0.0], sigma: 0.7 };
    let f = sample_coefficient(&spec, &grid).unwrap();
    assert_eq!(f.values()[20], c(1.0, 0.0));
    let top = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert_eq!(top, 1.0);
}

#[test]
fn box_bump_riemann_sum_matches_its_width() {
    let grid = make_grid(1, 128, 20.0).unwrap();
    let w = 1.3;
    let spec =
        CoefficientSpec::BoxBump { amplitude: c(1.0, 0.0), center: [10.0, 0.0, 0.0], halfwidth: w };
    let f = sample_coefficient(&spec, &grid).unwrap();
    let cell = grid.spacing();
    let mass: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * cell;
    assert!((mass - 2.0 * w).abs() <= cell + 1e-12, "mass {mass} vs {}", 2.0 * w);
}

#[test]
fn box_bump_must_fit_in_the_torus() {
    let grid = make_grid(1, 16, 4.0).unwrap();
    let spec =
        CoefficientSpec::BoxBump { amplitude: c(1.0, 0.0), center: [0.0; 3], halfwidth: 2.0 };
    assert!(sample_coefficient(&spec, &grid).is_err());
}

#[test]
fn powertail_norm_is_stable_under_box_doubling() {
    // s p > n with s = 3, p = 1, n = 1: the scaled lattice 1-norm is a
    // Riemann sum of an integrable tail, so doubling L at fixed
    // spacing moves it by well under a percent.
    let spec = CoefficientSpec::PowerTail { amplitude: c(1.0, 0.0), exponent: 3.0 };
    let mut norms = Vec::new();
    for (points, length) in [(256usize, 40.0), (512, 80.0)] {
        let grid = make_grid(1, points, length).unwrap();
        let f = sample_coefficient(&spec, &grid).unwrap();
        norms.push(f.values().iter().map(|v| v.norm()).sum::<f64>() * grid.spacing());
    }
    let change = (norms[1] - norms[0]).abs() / norms[0];
    assert!(change < 0.01, "1-norm moved by {change:.4} under doubling");
}

#[test]
fn unit_symbol_round_trips_all_dimensions() {
    let mut gen = rng(11);
    for (n, points) in [(1usize, 32usize), (2, 8), (3, 4)] {
        let grid = make_grid(n, points, 5.0).unwrap();
        let f = random_function(&grid, &mut gen);
        let m = FourierMultiplier::from_symbol_fn(grid.clone(), |_| c(1.0, 0.0)).unwrap();
        let g = apply_multiplier(&m, &f).unwrap();
        let scale = f.linf_norm();
        assert!(linf_diff(&f, &g) <= 1e-12 * scale, "round trip failed at n = {n}");
    }
}

#[test]
fn plane_waves_are_multiplier_eigenfunctions() {
    let grid = make_grid(2, 8, 3.0).unwrap();
    let m = FourierMultiplier::from_radial_fn(grid.clone(), |n2| c(1.0 / (1.0 + n2), 0.5)).unwrap();
    for &bin in &[0usize, 5, 17, 63] {
        let xi = grid.frequency(bin);
        let f = GridFunction::from_fn(grid.clone(), |x| {
            c(0.0, xi[0] * x[0] + xi[1] * x[1]).exp()
        })
        .unwrap();
        let g = apply_multiplier(&m, &f).unwrap();
        let s = m.symbol()[bin];
        let worst = g
            .values()
            .iter()
            .zip(f.values())
            .map(|(gi, fi)| (gi - fi * s).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "bin {bin}: off by {worst:e}");
    }
}

#[test]
fn unimodular_symbols_preserve_the_direct_sum_norm() {
    let mut gen = rng(23);
    let grid = make_grid(1, 128, 7.0).unwrap();
    let phases: Array1<C64> =
        (0..128).map(|_| c(0.0, gen.gen_range(0.0..std::f64::consts::TAU)).exp()).collect();
    let m = FourierMultiplier::from_symbol(grid.clone(), phases).unwrap();
    for _ in 0..5 {
        let f = random_function(&grid, &mut gen);
        let g = apply_multiplier(&m, &f).unwrap();
        // Independent direct summation on both sides.
        let norm_in: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm_out: f64 = g.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm_in - norm_out).abs() <= 1e-12 * norm_in);
    }
}

#[test]
fn multiplier_application_is_linear() {
    let mut gen = rng(31);
    let grid = make_grid(1, 64, 4.0).unwrap();
    let m = FourierMultiplier::from_radial_fn(grid.clone(), |n2: f64| c((-n2).exp(), n2).finv())
        .unwrap();
    let f = random_function(&grid, &mut gen);
    let g = random_function(&grid, &mut gen);
    let (a, b) = (c(0.7, -0.2), c(-1.3, 0.4));
    let combo = GridFunction::from_values(
        grid.clone(),
        f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect(),
    )
    .unwrap();
    let lhs = apply_multiplier(&m, &combo).unwrap();
    let mf = apply_multiplier(&m, &f).unwrap();
    let mg = apply_multiplier(&m, &g).unwrap();
    let scale = lhs.linf_norm().max(1.0);
    let worst = lhs
        .values()
        .iter()
        .zip(mf.values().iter().zip(mg.values()))
        .map(|(l, (x, y))| (l - (a * x + b * y)).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12 * scale);
}

#[test]
fn unit_symbol_materializes_to_the_identity() {
    let grid = make_grid(1, 16, 2.0).unwrap();
    let m = FourierMultiplier::from_symbol_fn(grid.clone(), |_| c(1.0, 0.0)).unwrap();
    let mat = m.matrix();
    for i in 0..16 {
        for j in 0..16 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((mat.entries()[[i, j]] - c(want, 0.0)).norm() <= 1e-12);
        }
    }
}

#[test]
fn pointwise_factor_materializes_to_a_diagonal() {
    let mut gen = rng(47);
    let grid = make_grid(1, 12, 2.0).unwrap();
    let alpha = random_function(&grid, &mut gen);
    let mat = operator_matrix(&[OperatorFactor::Pointwise(&alpha)]).unwrap();
    for i in 0..12 {
        for j in 0..12 {
            let want = if i == j { alpha.values()[i] } else { c(0.0, 0.0) };
            assert!((mat.entries()[[i, j]] - want).norm() <= 1e-14);
        }
    }
}

#[test]
fn dense_composition_matches_matrix_free_application() {
    let mut gen = rng(53);
    let grid = make_grid(1, 8, 3.0).unwrap();
    let alpha = random_function(&grid, &mut gen);
    let m = FourierMultiplier::from_radial_fn(grid.clone(), |n2| c(1.0 / (2.0 + n2), -0.3))
        .unwrap();
    let mat = operator_matrix(&[
        OperatorFactor::Multiplier(&m),
        OperatorFactor::Pointwise(&alpha),
    ])
    .unwrap();
    for _ in 0..10 {
        let f = random_function(&grid, &mut gen);
        let via_matrix = mat.apply(&f).unwrap();
        let direct = apply_multiplier(&m, &pointwise_multiply(&alpha, &f).unwrap()).unwrap();
        assert!(linf_diff(&via_matrix, &direct) <= 1e-12 * direct.linf_norm().max(1.0));
    }
}

#[test]
fn multiplier_matrix_eigenvalues_recover_the_symbol() {
    let mut gen = rng(61);
    for grid in [make_grid(1, 16, 2.0).unwrap(), make_grid(2, 4, 1.5).unwrap()] {
        let total = grid.total_points();
        let symbol: Array1<C64> = (0..total)
            .map(|_| c(gen.gen_range(-1.0..1.0), gen.gen_range(-1.0..1.0)))
            .collect();
        let mut expected: Vec<C64> = symbol.to_vec();
        let m = FourierMultiplier::from_symbol(grid.clone(), symbol).unwrap();
        let (eigs, _) = m.matrix().into_entries().eig().unwrap();
        let mut got: Vec<C64> = eigs.to_vec();
        let key = |z: &C64| (z.re, z.im);
        expected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (e, g) in expected.iter().zip(&got) {
            assert!((e - g).norm() <= 1e-10, "eigenvalue {g} vs symbol {e}");
        }
    }
}

#[test]
fn multiplier_norm_is_the_symbol_sup() {
    let grid = make_grid(1, 32, 6.0).unwrap();
    let m = FourierMultiplier::from_radial_fn(grid.clone(), |n2| c(-2.0 / (1.0 + n2), 0.0))
        .unwrap();
    assert_eq!(m.operator_norm(), 2.0);
}

#[test]
fn pointwise_product_matches_an_elementwise_loop() {
    let mut gen = rng(71);
    let grid = make_grid(2, 6, 2.0).unwrap();
    let alpha = random_function(&grid, &mut gen);
    let f = random_function(&grid, &mut gen);
    let product = pointwise_multiply(&alpha, &f).unwrap();
    for i in 0..grid.total_points() {
        let want = alpha.values()[i] * f.values()[i];
        assert!((product.values()[i] - want).norm() <= 1e-15);
    }
    let zero = GridFunction::zeros(grid.clone());
    assert!(pointwise_multiply(&zero, &f).unwrap().is_zero());
    let one = GridFunction::constant(grid.clone(), c(1.0, 0.0));
    assert_eq!(linf_diff(&pointwise_multiply(&one, &f).unwrap(), &f), 0.0);
}

#[test]
fn mismatched_grids_are_rejected() {
    let g1 = make_grid(1, 8, 2.0).unwrap();
    let g2 = make_grid(1, 16, 2.0).unwrap();
    let f1 = GridFunction::constant(g1.clone(), c(1.0, 0.0));
    let f2 = GridFunction::constant(g2.clone(), c(1.0, 0.0));
    assert!(pointwise_multiply(&f1, &f2).is_err());
    let m = FourierMultiplier::from_symbol_fn(g1, |_| c(1.0, 0.0)).unwrap();
    assert!(apply_multiplier(&m, &f2).is_err());
    assert!(operator_matrix(&[
        OperatorFactor::Multiplier(&m),
        OperatorFactor::Pointwise(&f2)
    ])
    .is_err());
    assert!(operator_matrix::<f64>(&[]).is_err());
}

#[test]
fn circulant_matrix_agrees_with_basis_chase() {
    // matrix() takes the one-FFT circulant route; operator_matrix runs
    // the chain over basis vectors. The two must coincide.
    let mut gen = rng(83);
    let grid = make_grid(2, 4, 2.0).unwrap();
    let symbol: Array1<C64> = (0..16)
        .map(|_| c(gen.gen_range(-1.0..1.0), gen.gen_range(-1.0..1.0)))
        .collect();
    let m = FourierMultiplier::from_symbol(grid, symbol).unwrap();
    let fast = m.matrix();
    let slow = operator_matrix(&[OperatorFactor::Multiplier(&m)]).unwrap();
    let diff: Array2<C64> = fast.entries() - slow.entries();
    assert!(max_abs(&diff) <= 1e-13);
}
