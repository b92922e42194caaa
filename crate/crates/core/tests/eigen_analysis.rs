mod common;

use std::f64::consts::PI;

use grushin_core::coefficient::CoefficientField;
use grushin_core::eigen_analysis::{decay_rate_estimate, lambda_sweep, scaling_exponent};
use grushin_core::grid::{build_grid, SubdomainSpec};
use grushin_core::mode_pde::{assemble_operator, eigendecompose, solve_mode, Scheme, Source};
use grushin_core::spectral::build_basis;

fn sweep(gamma: f64, n_cells: usize, n_list: &[usize]) -> grushin_core::eigen_analysis::ScalingFitReport {
    let grid = build_grid(-1.0, 1.0, n_cells).unwrap();
    let support = SubdomainSpec::new(0.3, 0.9, 0.3).unwrap();
    let b = CoefficientField::ones(&grid, support, 0.5, 2.0).unwrap();
    let basis = build_basis(PI, 64, 256).unwrap();
    lambda_sweep(gamma, &b, &basis, n_list, &grid).unwrap()
}

#[test]
fn slopes_follow_the_scaling_exponent() {
    let n_list: Vec<usize> = (8..=64).collect();
    for (gamma, want) in [(1.0, 0.5), (0.25, 0.8)] {
        let r = sweep(gamma, 2048, &n_list);
        assert_eq!(r.slope_theory, scaling_exponent(gamma));
        let slope = r.slope.unwrap();
        assert!((slope - want).abs() <= 0.05, "gamma = {gamma}: {slope}");
        assert!(r.c_star_lo > 0.0 && r.band_factor() <= 3.0);
        assert!(r.lambda_list.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn single_mode_sweep_has_no_slope() {
    let r = sweep(0.5, 256, &[4]);
    assert!(r.slope.is_none() && r.r_squared.is_none());
    assert_eq!(r.ratios().len(), 1);
    assert_eq!(r.c_star_lo, r.c_star_hi);
}

fn rate_error(k: usize, mixed: bool, dt: f64) -> (f64, f64) {
    let grid = build_grid(-1.0, 1.0, 400).unwrap();
    let support = SubdomainSpec::new(0.3, 0.9, 0.3).unwrap();
    let b = CoefficientField::ones(&grid, support, 0.5, 2.0).unwrap();
    let op = assemble_operator(&grid, 0.5, 16.0, &b).unwrap();
    let spec = eigendecompose(&op, 2).unwrap();
    let u0: Vec<f64> = if mixed {
        spec.eigenvectors[0].iter().zip(&spec.eigenvectors[1]).map(|(a, b)| a + b).collect()
    } else {
        spec.eigenvectors[k].clone()
    };
    let t_final = if mixed { 3.0 } else { 0.5 };
    let traj = solve_mode(&u0, Source::Zero, &op, t_final, dt, Scheme::CrankNicolson).unwrap();
    let want = spec.eigenvalues[if mixed { 0 } else { k }];
    (decay_rate_estimate(&traj).unwrap(), want)
}

#[test]
fn decay_rates_match_eigenvalues() {
    for k in [0, 1] {
        let (rate, lam) = rate_error(k, false, 1e-3);
        assert!((rate - lam).abs() <= 0.02 * lam, "k = {k}: {rate} vs {lam}");
    }
    let (rate, lam) = rate_error(0, true, 1e-3);
    assert!((rate - lam).abs() <= 0.02 * lam, "mixed: {rate} vs {lam}");
}

#[test]
fn decay_rate_error_is_second_order_in_dt() {
    let errors: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let (rate, lam) = rate_error(0, false, dt);
            (rate - lam).abs()
        })
        .collect();
    let order = common::observed_order(&errors);
    assert!(order >= 1.8, "order {order}, errors {errors:?}");
}
