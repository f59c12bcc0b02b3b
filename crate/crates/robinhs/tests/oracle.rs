//! Strip-oracle integration tests: finite-difference resolvents, dense
//! resolvent-difference singular values, the Krein assembly, and the
//! fiber witnesses behind the essential-spectrum bottom.

mod common;

use common::{c, random_function, rng, C64};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use rand::Rng;
use robinhs::grid::{make_grid, sample_coefficient, CoefficientSpec, GridFunction};
use robinhs::halfspace::SpectralParameter;
use robinhs::oracle::{
    fd_difference_singulars, fd_resolvent_apply, fd_robin_matrix, fiber_bound_state,
    green_identity_residual, krein_resolvent_apply, make_strip, relative_l2_distance,
    strip_eigenvalues, QuadratureRule, SparseOperator, StripFunction, StripGrid,
};

fn small_strip(n_x: usize, n_t: usize, length: f64, depth: f64) -> StripGrid<f64> {
    let boundary = make_grid(1, n_x, length).unwrap();
    make_strip(boundary, n_t, depth).unwrap()
}

fn gaussian_on(strip: &StripGrid<f64>, amplitude: f64) -> GridFunction<f64> {
    let l = strip.boundary().edge_length();
    let spec = CoefficientSpec::Gaussian {
        amplitude: c(amplitude, 0.0),
        center: [l / 2.0, 0.0, 0.0],
        sigma: l / 10.0,
    };
    sample_coefficient(&spec, strip.boundary()).unwrap()
}

/// Dense symmetric-frame matrix rebuilt from the sparse storage.
fn dense_frame(op: &SparseOperator<f64>) -> Array2<f64> {
    let n = op.dim();
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for k in op.row_ptr()[i]..op.row_ptr()[i + 1] {
            m[[i, op.col_indices()[k]]] = op.values()[k].re;
        }
    }
    m
}

#[test]
fn strip_constructor_guards_hold() {
    assert!(make_strip(make_grid(2, 8, 1.0).unwrap(), 8, 1.0).is_err());
    assert!(make_strip(make_grid(1, 8, 1.0).unwrap(), 7, 1.0).is_err());
    assert!(make_strip(make_grid(1, 8, 1.0).unwrap(), 8, 0.0).is_err());
    let strip = small_strip(8, 16, 4.0, 2.0);
    assert_eq!(strip.unknowns(), 128);
    assert!(strip.depth_ok(-25.0));
    assert!(!strip.depth_ok(-4.0));
}

#[test]
fn neumann_matrix_annihilates_constants() {
    let strip = small_strip(12, 16, 6.0, 3.0);
    let op = fd_robin_matrix(&GridFunction::zeros(strip.boundary().clone()), &strip).unwrap();
    let ones = StripFunction::from_fn(strip.clone(), |_, _| c(1.0, 0.0)).unwrap();
    let image = op.apply(&ones).unwrap();
    let scale = 2.0 / strip.spacing_x().powi(2) + 2.0 / strip.spacing_t().powi(2);
    let worst = image.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-12 * scale, "constant not annihilated: {worst:e}");
}

#[test]
fn resolvent_rescales_discrete_eigenvectors() {
    let strip = small_strip(8, 16, 4.0, 2.0);
    let alpha = GridFunction::constant(strip.boundary().clone(), c(1.2, 0.0));
    let op = fd_robin_matrix(&alpha, &strip).unwrap();
    let (vals, vecs) = dense_frame(&op).eigh(UPLO::Lower).unwrap();
    let (mu, x) = (vals[0], vecs.column(0));

    // Physical eigenvector undoes the weight: u = W^(-1/2) x.
    let values: Vec<C64> = (0..strip.unknowns())
        .map(|q| c(x[q] / strip.weight(strip.split(q).1).sqrt(), 0.0))
        .collect();
    let u = StripFunction::from_values(strip.clone(), values).unwrap();

    let lambda = SpectralParameter::real(-9.0).unwrap();
    let v = fd_resolvent_apply(&op, lambda, &u).unwrap();
    let worst = v
        .values()
        .iter()
        .zip(u.values())
        .map(|(vi, ui)| (vi - ui / (mu + 9.0)).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "eigenvector not rescaled by 1/(mu - lambda): {worst:e}");
}

#[test]
fn resolvent_solve_residual_meets_contract() {
    let strip = small_strip(16, 16, 8.0, 3.0);
    let alpha = gaussian_on(&strip, 1.0);
    let op = fd_robin_matrix(&alpha, &strip).unwrap();
    let lambda = SpectralParameter::real(-5.0).unwrap();
    let mut gen = rng(41);
    let values: Vec<C64> = (0..strip.unknowns())
        .map(|_| c(gen.gen_range(-1.0..1.0), gen.gen_range(-1.0..1.0)))
        .collect();
    let u = StripFunction::from_values(strip.clone(), values).unwrap();

    let v = fd_resolvent_apply(&op, lambda, &u).unwrap();
    let av = op.apply(&v).unwrap();
    let mut defect = 0.0f64;
    let mut norm_u = 0.0f64;
    for ((ui, avi), vi) in u.values().iter().zip(av.values()).zip(v.values()) {
        defect += (ui - (avi - vi * (-5.0))).norm_sqr();
        norm_u += ui.norm_sqr();
    }
    assert!(defect.sqrt() <= 1e-10 * norm_u.sqrt());
}

#[test]
fn zero_field_resolves_to_zero() {
    let strip = small_strip(8, 8, 4.0, 2.0);
    let op = fd_robin_matrix(&GridFunction::zeros(strip.boundary().clone()), &strip).unwrap();
    let lambda = SpectralParameter::real(-4.0).unwrap();
    let v = fd_resolvent_apply(&op, lambda, &StripFunction::zeros(strip.clone())).unwrap();
    assert!(v.is_zero());
}

#[test]
fn difference_vanishes_for_equal_coefficients() {
    let strip = small_strip(12, 12, 6.0, 2.0);
    let alpha = gaussian_on(&strip, 0.8);
    let lambda = SpectralParameter::real(-5.0).unwrap();
    let s = fd_difference_singulars(&alpha, &alpha, lambda, &strip, 5).unwrap();
    assert!(s.top() <= 1e-14, "difference of equal resolvents: {:e}", s.top());
}

#[test]
fn difference_singulars_swap_invariant() {
    let strip = small_strip(12, 16, 6.0, 2.5);
    let zero = GridFunction::zeros(strip.boundary().clone());
    let alpha = gaussian_on(&strip, 1.0);
    let lambda = SpectralParameter::real(-12.0).unwrap();
    let a = fd_difference_singulars(&zero, &alpha, lambda, &strip, 8).unwrap();
    let b = fd_difference_singulars(&alpha, &zero, lambda, &strip, 8).unwrap();
    assert_eq!(a.values().len(), b.values().len());
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= 1e-12 * a.top());
    }
}

#[test]
fn difference_respects_dense_limit() {
    let strip = small_strip(64, 65, 16.0, 4.0);
    let zero = GridFunction::zeros(strip.boundary().clone());
    let alpha = gaussian_on(&strip, 1.0);
    let lambda = SpectralParameter::real(-5.0).unwrap();
    assert!(fd_difference_singulars(&zero, &alpha, lambda, &strip, 8).is_err());
}

#[test]
fn difference_requires_lambda_below_threshold() {
    let strip = small_strip(8, 8, 4.0, 2.0);
    let zero = GridFunction::zeros(strip.boundary().clone());
    let alpha = GridFunction::constant(strip.boundary().clone(), c(2.0, 0.0));
    // -3 is above -max(sup|alpha|)^2 = -4.
    let lambda = SpectralParameter::real(-3.0).unwrap();
    assert!(fd_difference_singulars(&zero, &alpha, lambda, &strip, 4).is_err());
}

#[test]
fn krein_with_zero_coefficient_is_the_neumann_resolvent() {
    let strip = small_strip(16, 24, 8.0, 4.0);
    let zero = GridFunction::zeros(strip.boundary().clone());
    let op = fd_robin_matrix(&zero, &strip).unwrap();
    let lambda = SpectralParameter::real(-6.0).unwrap();
    let mut gen = rng(7);
    let u = StripFunction::from_values(
        strip.clone(),
        (0..strip.unknowns())
            .map(|_| c(gen.gen_range(-1.0..1.0), gen.gen_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap();

    let direct = fd_resolvent_apply(&op, lambda, &u).unwrap();
    let krein = krein_resolvent_apply(&zero, lambda, &u, &strip).unwrap();
    assert!(!krein.depth_warning);
    assert!(relative_l2_distance(&krein.field, &direct).unwrap() <= 1e-14);
}

#[test]
fn krein_flags_shallow_strips() {
    let strip = small_strip(8, 8, 4.0, 1.0);
    let zero = GridFunction::zeros(strip.boundary().clone());
    let lambda = SpectralParameter::real(-4.0).unwrap();
    let u = StripFunction::from_fn(strip.clone(), |x, t| c((-x - t).exp(), 0.0)).unwrap();
    // depth 1 < 8 / sqrt(4) = 4, so the truncation rule is violated.
    let krein = krein_resolvent_apply(&zero, lambda, &u, &strip).unwrap();
    assert!(krein.depth_warning);
}

#[test]
fn krein_constant_coefficient_matches_fiber_formula() {
    let strip = small_strip(32, 48, 8.0, 4.0);
    let lambda = SpectralParameter::real(-5.0).unwrap();
    let cc = 0.7;
    let alpha = GridFunction::constant(strip.boundary().clone(), c(cc, 0.0));

    // Single-mode data: u(x, t) = e^(i xi0 x) f(t) on lattice mode 3.
    let xi0 = strip.boundary().freq_axis(3);
    let f = |t: f64| (-(t - 1.0) * (t - 1.0)).exp();
    let u = StripFunction::from_fn(strip.clone(), |x, t| c(0.0, xi0 * x).exp() * f(t)).unwrap();

    let neumann = fd_robin_matrix(&GridFunction::zeros(strip.boundary().clone()), &strip).unwrap();
    let v_n = fd_resolvent_apply(&neumann, lambda, &u).unwrap();
    let krein = krein_resolvent_apply(&alpha, lambda, &u, &strip).unwrap();

    // The boundary solve diagonalizes over this one fiber: correction
    // = e^(i xi0 x) e^(-w t) Q c / (w (1 - c/w)), Q the trapezoid
    // transform of f against the decaying fiber.
    let w = (xi0 * xi0 + 5.0).sqrt();
    let ht = strip.spacing_t();
    let mut q = 0.0;
    for it in 0..strip.points_t() {
        let t = strip.node_t(it);
        let wgt = if it == 0 || it + 1 == strip.points_t() { 0.5 } else { 1.0 };
        q += wgt * ht * (-w * t).exp() * f(t);
    }
    q /= w;
    let gain = cc / (w * (1.0 - cc / w));

    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for q_idx in 0..strip.unknowns() {
        let (ix, it) = strip.split(q_idx);
        let x = strip.boundary().coord_axis(ix);
        let t = strip.node_t(it);
        let expected = c(0.0, xi0 * x).exp() * (-w * t).exp() * q * gain;
        let got = krein.field.values()[q_idx] - v_n.values()[q_idx];
        worst = worst.max((got - expected).norm());
        scale = scale.max(expected.norm());
    }
    assert!(worst <= 1e-10 * scale, "fiber correction off: {worst:e} vs scale {scale:e}");
}

#[test]
fn krein_error_drops_under_mesh_halving() {
    let coarse = small_strip(32, 32, 16.0, 4.0);
    let lambda = SpectralParameter::real(-5.0).unwrap();
    let field =
        |x: f64, t: f64| c((-((x - 8.0) * (x - 8.0) / 4.0 + (t - 1.0) * (t - 1.0))).exp(), 0.0);

    let mut errs = Vec::new();
    for strip in [coarse.clone(), coarse.refined(2).unwrap()] {
        let alpha = gaussian_on(&strip, 1.0);
        let op = fd_robin_matrix(&alpha, &strip).unwrap();
        let u = StripFunction::from_fn(strip.clone(), field).unwrap();
        let direct = fd_resolvent_apply(&op, lambda, &u).unwrap();
        let krein = krein_resolvent_apply(&alpha, lambda, &u, &strip).unwrap();
        errs.push(relative_l2_distance(&krein.field, &direct).unwrap());
    }
    assert!(errs[0] <= 0.05, "coarse Krein error too large: {}", errs[0]);
    assert!(
        errs[1] * 1.8 <= errs[0],
        "no convergence: coarse {} fine {}",
        errs[0],
        errs[1]
    );
}

#[test]
fn krein_simpson_agrees_with_trapezoid() {
    let strip = small_strip(16, 32, 8.0, 4.0);
    let alpha = gaussian_on(&strip, 0.9);
    let lambda = SpectralParameter::real(-5.0).unwrap();
    let u = StripFunction::from_fn(strip.clone(), |x, t| c((-t).exp() * (x * 0.5).sin(), 0.0))
        .unwrap();
    let trap = robinhs::oracle::krein_resolvent_apply_with(
        &alpha,
        lambda,
        &u,
        &strip,
        QuadratureRule::Trapezoid,
    )
    .unwrap();
    let simp = robinhs::oracle::krein_resolvent_apply_with(
        &alpha,
        lambda,
        &u,
        &strip,
        QuadratureRule::Simpson,
    )
    .unwrap();
    // Same field up to the quadrature's own O(h^2) wiggle.
    let d = relative_l2_distance(&simp.field, &trap.field).unwrap();
    assert!(d <= 5e-2, "quadrature rules disagree wildly: {d}");
    assert!(d > 0.0, "Simpson should not be bitwise trapezoid");
}

#[test]
fn green_identity_vanishes_on_random_mode_pairs() {
    let mut gen = rng(1105);
    for trial in 0..20 {
        let xi1 = gen.gen_range(-4.0..4.0);
        let w1 = gen.gen_range(0.3..5.0);
        let w2 = gen.gen_range(0.3..5.0);
        // Half the pairs share the transverse frequency, half do not.
        let xi2 = if trial % 2 == 0 { xi1 } else { xi1 + gen.gen_range(0.5..2.0) };
        let r = green_identity_residual((xi1, w1), (xi2, w2)).unwrap();
        assert!(r < 1e-10, "trial {trial}: residual {r:e}");
    }
    assert!(green_identity_residual((0.0, -1.0), (0.0, 1.0)).is_err());
}

#[test]
fn fiber_bound_state_tracks_the_analytic_value() {
    let deep = fiber_bound_state::<f64>(2.0, 0.0, 512, 40.0).unwrap().unwrap();
    assert_eq!(deep.analytic, -4.0);
    assert!(
        (deep.fd_value - deep.analytic).abs() <= 0.02 * 4.0,
        "fd {} vs analytic -4",
        deep.fd_value
    );

    let threshold = fiber_bound_state::<f64>(1.0, 1.0, 256, 30.0).unwrap().unwrap();
    assert_eq!(threshold.analytic, 0.0);
    assert!(threshold.fd_value.abs() <= 0.02);

    assert!(fiber_bound_state::<f64>(-1.0, 0.0, 64, 8.0).unwrap().is_none());
    assert!(fiber_bound_state::<f64>(0.0, 0.0, 64, 8.0).unwrap().is_none());
}

#[test]
fn strip_eigenvalues_match_a_dense_eigensolve() {
    let strip = small_strip(8, 8, 4.0, 2.0);
    let alpha = GridFunction::constant(strip.boundary().clone(), c(1.5, 0.0));
    let op = fd_robin_matrix(&alpha, &strip).unwrap();
    let (dense, _) = dense_frame(&op).eigh(UPLO::Lower).unwrap();

    let upper = dense[4] + 0.3 * (dense[5] - dense[4]);
    let found = strip_eigenvalues(&op, -40.0, upper, 50).unwrap();
    assert!(!found.is_empty());
    for mu in &found {
        let nearest = dense.iter().map(|d| (d - mu).abs()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-6 * (1.0 + mu.abs()), "spurious Ritz value {mu}");
    }
    // The bottom of the spectrum must be among the returned values.
    assert!((found[0] - dense[0]).abs() <= 1e-6 * (1.0 + dense[0].abs()));
}

#[test]
fn strip_bottom_approaches_minus_alpha_squared() {
    // Constant alpha = 2: the half-space essential spectrum starts at
    // -4, carried by the x-constant fiber; the fiber witness and the
    // full strip must agree on it.
    let strip = small_strip(16, 192, 8.0, 6.0);
    let alpha = GridFunction::constant(strip.boundary().clone(), c(2.0, 0.0));
    let op = fd_robin_matrix(&alpha, &strip).unwrap();
    let found = strip_eigenvalues(&op, -30.0, -3.5, 60).unwrap();
    assert!(!found.is_empty(), "no strip state below -3.5");
    assert!((found[0] + 4.0).abs() <= 0.05, "bottom {} far from -4", found[0]);

    let fiber = fiber_bound_state(2.0, 0.0, 192, 6.0).unwrap().unwrap();
    assert!(
        (found[0] - fiber.fd_value).abs() <= 1e-7 * (1.0 + found[0].abs()),
        "strip bottom {} vs fiber {}",
        found[0],
        fiber.fd_value
    );
}

#[test]
fn relative_distance_handles_zero_reference() {
    let strip = small_strip(8, 8, 4.0, 2.0);
    let zero = StripFunction::zeros(strip.clone());
    let unit = StripFunction::from_fn(strip.clone(), |_, _| c(1.0, 0.0)).unwrap();
    assert_eq!(relative_l2_distance(&zero, &zero).unwrap(), 0.0);
    // Zero reference falls back to the absolute distance.
    let d = relative_l2_distance(&unit, &zero).unwrap();
    assert!((d - unit.l2_norm()).abs() <= 1e-15);
}

#[test]
fn fd_solution_feeds_random_field_checks() {
    // Round trip through StripFunction accessors used by the suites.
    let strip = small_strip(8, 8, 4.0, 2.0);
    let boundary = strip.boundary().clone();
    let mut gen = rng(3);
    let f = random_function(&make_grid(1, 8, 4.0).unwrap(), &mut gen);
    assert_eq!(f.len(), boundary.total_points());
    let u = StripFunction::from_fn(strip.clone(), |x, t| c(x, t)).unwrap();
    let vals = u.values().to_vec();
    let rebuilt = StripFunction::from_values(strip, vals).unwrap();
    assert!(relative_l2_distance(&u, &rebuilt).unwrap() == 0.0);
}
