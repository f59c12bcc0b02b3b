//! Randomized property suites over the pure-function surface.

use ndarray::Array1;
use num_complex::Complex;
use proptest::prelude::*;
use robinhs::grid::{apply_multiplier, make_grid, pointwise_multiply, FourierMultiplier, GridFunction};
use robinhs::halfspace::{essential_bottom, SearchRegion, SpectralParameter};
use robinhs::schatten::{epsilon_count, schatten_norm, weak_quasinorm, SingularSpectrum};

type C64 = Complex<f64>;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex::new(re, im)).collect())
}

/// Nonnegative values for synthetic spectra, bounded away from inf.
fn spectrum_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..10.0f64, 1..40)
}

proptest! {
    #[test]
    fn dft_round_trips_on_random_data(
        n in 1usize..3,
        points in 4usize..14,
        length in 0.5..20.0f64,
        seed_values in complex_vec(14 * 14),
    ) {
        let grid = make_grid(n, points, length).unwrap();
        let total = grid.total_points();
        let values: Array1<C64> = seed_values.into_iter().take(total).collect();
        prop_assume!(values.len() == total);
        let f = GridFunction::from_values(grid.clone(), values).unwrap();
        let unit = FourierMultiplier::from_symbol_fn(grid, |_| Complex::new(1.0, 0.0)).unwrap();
        let g = apply_multiplier(&unit, &f).unwrap();
        let scale = f.linf_norm().max(1e-3);
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn pointwise_product_commutes(
        a in complex_vec(16),
        b in complex_vec(16),
    ) {
        let grid = make_grid(1, 16, 3.0).unwrap();
        let fa = GridFunction::from_values(grid.clone(), Array1::from_vec(a)).unwrap();
        let fb = GridFunction::from_values(grid.clone(), Array1::from_vec(b)).unwrap();
        let ab = pointwise_multiply(&fa, &fb).unwrap();
        let ba = pointwise_multiply(&fb, &fa).unwrap();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn schatten_norm_is_absolutely_homogeneous(
        values in spectrum_vec(),
        scale in 0.01..50.0f64,
        p in 0.3..5.0f64,
    ) {
        let s = SingularSpectrum::from_values(values.clone()).unwrap();
        let scaled = SingularSpectrum::from_values(
            values.iter().map(|v| v * scale).collect(),
        ).unwrap();
        let lhs = schatten_norm(&scaled, p).unwrap();
        let rhs = scale * schatten_norm(&s, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn epsilon_count_never_increases_with_epsilon(
        values in spectrum_vec(),
        e1 in 0.0..5.0f64,
        e2 in 0.0..5.0f64,
    ) {
        prop_assume!(e1 > 0.0 && e2 > 0.0);
        let s = SingularSpectrum::from_values(values).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(epsilon_count(&s, hi) <= epsilon_count(&s, lo));
    }

    #[test]
    fn weak_quasinorm_is_dominated_by_the_norm(
        values in spectrum_vec(),
        p in 0.5..4.0f64,
    ) {
        // k s_k^p <= sum of the k largest p-th powers.
        let s = SingularSpectrum::from_values(values).unwrap();
        let weak = weak_quasinorm(&s, p).unwrap();
        let full = schatten_norm(&s, p).unwrap();
        prop_assert!(weak <= full + 1e-12);
    }

    #[test]
    fn spectral_parameter_splits_the_plane(re in -50.0..50.0f64, im in -50.0..50.0f64) {
        let z = Complex::new(re, im);
        let ok = SpectralParameter::new(z).is_ok();
        prop_assert_eq!(ok, im != 0.0 || re < 0.0);
    }

    #[test]
    fn search_region_needs_negative_reals_when_crossing_the_axis(
        re0 in -20.0..-0.5f64,
        width in 0.1..10.0f64,
        im0 in -5.0..0.0f64,
        im1 in 0.0..5.0f64,
    ) {
        // Imaginary span includes 0, so any region with re1 < 0 passes
        // and any with re1 >= 0 fails.
        let ok = SearchRegion::new((re0, re0 + width), (im0, im1)).is_ok();
        prop_assert_eq!(ok, re0 + width < 0.0);
    }

    #[test]
    fn essential_bottom_is_never_positive(cval in -30.0..30.0f64) {
        let b = essential_bottom(cval);
        prop_assert!(b <= 0.0);
        if cval > 0.0 {
            prop_assert_eq!(b, -cval * cval);
        } else {
            prop_assert_eq!(b, 0.0);
        }
    }
}
