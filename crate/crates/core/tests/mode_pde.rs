mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use grushin_core::coefficient::CoefficientField;
use grushin_core::grid::{build_grid, l2_norm, Grid1D, SubdomainSpec};
use grushin_core::mode_pde::{
    assemble_operator, eigendecompose, fractional_norm, heat_semigroup_subdomain, solve_mode,
    step_mode, time_derivative_discrepancy, ModeOperator, Scheme, Source,
};
use grushin_core::spectral::{build_basis, ModeStack};

fn ones(grid: &Grid1D) -> CoefficientField {
    let support = SubdomainSpec::new(0.3, 0.9, 0.3).unwrap();
    CoefficientField::ones(grid, support, 0.5, 2.0).unwrap()
}

fn op(n_cells: usize, gamma: f64, mu: f64) -> ModeOperator {
    let grid = build_grid(-1.0, 1.0, n_cells).unwrap();
    assemble_operator(&grid, gamma, mu, &ones(&grid)).unwrap()
}

#[test]
fn laplacian_ground_eigenvalue_matches_dense_oracle_and_continuum() {
    let small = op(120, 0.5, 0.0);
    let dense = common::jacobi_eigenvalues(common::dense(&small.tri));
    let spec = eigendecompose(&small, 5).unwrap();
    for k in 0..5 {
        assert!((spec.eigenvalues[k] - dense[k]).abs() <= 1e-9 * dense[k]);
    }
    let fine = op(1024, 0.5, 0.0);
    let want = PI * PI / 4.0;
    assert!((fine.smallest_eigenvalue() - want).abs() <= 1e-4 * want);
    // Second-order convergence: halving h quarters the error.
    let e1 = (op(256, 0.5, 0.0).smallest_eigenvalue() - want).abs();
    let e2 = (op(512, 0.5, 0.0).smallest_eigenvalue() - want).abs();
    assert!((e1 / e2 - 4.0).abs() < 0.05, "{}", e1 / e2);
}

#[test]
fn harmonic_oscillator_limit() {
    for mu in [1e4, 1e6] {
        let coarse = op(300, 1.0, mu);
        let dense = common::jacobi_eigenvalues(common::dense(&coarse.tri));
        let lam = coarse.smallest_eigenvalue();
        assert!((lam - dense[0]).abs() <= 1e-9 * dense[0], "mu = {mu}");
        let fine = op(4096, 1.0, mu).smallest_eigenvalue();
        assert!((fine / mu.sqrt() - 1.0).abs() < 1e-3, "mu = {mu}: {}", fine / mu.sqrt());
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let o = op(400, 0.5, 25.0);
    let spec = eigendecompose(&o, 12).unwrap();
    for i in 0..12 {
        for j in 0..12 {
            let g = o.grid.h * spec.eigenvectors[i].iter().zip(&spec.eigenvectors[j]).map(|(a, b)| a * b).sum::<f64>();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).abs() <= 1e-10, "({i}, {j}): {g}");
        }
    }
}

#[test]
fn assembled_operators_are_positive_definite() {
    for gamma in [0.25, 0.5, 1.0] {
        for mu in [0.0, 1.0, 1e3, 1e6] {
            let o = op(200, gamma, mu);
            assert!(o.smallest_eigenvalue() > 0.0);
            assert!(o.tri.off.iter().all(|&v| v < 0.0));
        }
    }
}

#[test]
fn ground_eigenvalue_is_monotone_in_mu() {
    let grid = build_grid(-1.0, 1.0, 300).unwrap();
    let b = ones(&grid);
    let mut prev = 0.0;
    for k in 0..40 {
        let mu = 0.5 * (k as f64).powi(2);
        let lam = assemble_operator(&grid, 0.5, mu, &b).unwrap().smallest_eigenvalue();
        assert!(lam >= prev, "mu = {mu}");
        prev = lam;
    }
}

#[test]
fn backward_euler_step_on_eigenvector() {
    let o = op(200, 0.5, 9.0);
    let spec = eigendecompose(&o, 1).unwrap();
    let e = &spec.eigenvectors[0];
    let zero = vec![0.0; e.len()];
    let dt = 0.01;
    let next = step_mode(e, &o, &zero, &zero, dt, Scheme::BackwardEuler).unwrap();
    let f = 1.0 / (1.0 + dt * spec.ground());
    for (a, b) in next.iter().zip(e) {
        assert!((a - f * b).abs() <= 1e-9 * b.abs().max(1e-3));
    }
    let still = step_mode(&zero, &o, &zero, &zero, dt, Scheme::CrankNicolson).unwrap();
    assert!(still.iter().all(|&v| v == 0.0));
}

fn manufactured(o: &ModeOperator, dt: f64, t_final: f64) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let w: Vec<f64> = o.grid.nodes.iter().map(|&x| (1.0 - x * x) * x.exp()).collect();
    let gw = o.apply(&w);
    let steps = (t_final / dt).round() as usize;
    let g = (0..=steps)
        .map(|j| {
            let t = j as f64 * dt;
            (0..w.len()).map(|i| -3.0 * (3.0 * t).sin() * w[i] + (3.0 * t).cos() * gw[i]).collect()
        })
        .collect();
    let dg = (0..=steps)
        .map(|j| {
            let t = j as f64 * dt;
            (0..w.len()).map(|i| -9.0 * (3.0 * t).cos() * w[i] - 3.0 * (3.0 * t).sin() * gw[i]).collect()
        })
        .collect();
    (w, g, dg)
}

#[test]
fn crank_nicolson_manufactured_solution_is_second_order() {
    let o = op(200, 0.5, 4.0);
    let t_final = 1.0;
    let errors: Vec<f64> = [0.02, 0.01, 0.005, 0.0025]
        .iter()
        .map(|&dt| {
            let (w, g, _) = manufactured(&o, dt, t_final);
            let traj = solve_mode(&w, Source::Samples(&g), &o, t_final, dt, Scheme::CrankNicolson).unwrap();
            let exact: Vec<f64> = w.iter().map(|v| (3.0 * t_final).cos() * v).collect();
            let diff: Vec<f64> = traj.last_state().iter().zip(&exact).map(|(a, b)| a - b).collect();
            l2_norm(&diff, &o.grid).unwrap()
        })
        .collect();
    let order = common::observed_order(&errors);
    assert!((1.8..=2.2).contains(&order), "order {order}, errors {errors:?}");
}

#[test]
fn differentiated_system_agrees_at_second_order() {
    let o = op(200, 0.5, 4.0);
    let t_final = 0.5;
    let errors: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| {
            let (w, g, dg) = manufactured(&o, dt, t_final);
            let traj = solve_mode(&w, Source::Samples(&g), &o, t_final, dt, Scheme::CrankNicolson).unwrap();
            time_derivative_discrepancy(&traj, &o, Source::Samples(&dg)).unwrap()
        })
        .collect();
    let order = common::observed_order(&errors);
    assert!((1.8..=2.2).contains(&order), "order {order}, errors {errors:?}");
}

#[test]
fn steady_state_has_zero_derivative() {
    let o = op(100, 0.5, 4.0);
    let u0: Vec<f64> = o.grid.nodes.iter().map(|x| 1.0 - x * x).collect();
    let g = vec![o.apply(&u0); 11];
    let traj = solve_mode(&u0, Source::Samples(&g), &o, 0.1, 0.01, Scheme::CrankNicolson).unwrap();
    for d in &traj.dstates {
        assert!(d.iter().all(|v| v.abs() <= 1e-9));
    }
}

#[test]
fn initial_derivative_of_eigenvector() {
    let o = op(200, 0.5, 16.0);
    let spec = eigendecompose(&o, 1).unwrap();
    let e = &spec.eigenvectors[0];
    let traj = solve_mode(e, Source::Zero, &o, 0.05, 1e-3, Scheme::CrankNicolson).unwrap();
    for (d, v) in traj.dstates[0].iter().zip(e) {
        assert!((d + spec.ground() * v).abs() <= 1e-8 * spec.ground());
    }
}

#[test]
fn eigenvector_decay_and_dissipation() {
    let o = op(300, 0.5, 16.0);
    let spec = eigendecompose(&o, 1).unwrap();
    let lam = spec.ground();
    let e = &spec.eigenvectors[0];
    let dt = 1e-3;
    let cn = solve_mode(e, Source::Zero, &o, 0.5, dt, Scheme::CrankNicolson).unwrap();
    let norms: Vec<f64> = cn.states.iter().map(|u| l2_norm(u, &o.grid).unwrap()).collect();
    for (j, n) in norms.iter().enumerate() {
        let t = cn.times[j];
        let want = (-lam * t).exp();
        assert!((n - want).abs() <= lam.powi(3) * dt * dt * t * want + 1e-12);
    }
    for w in norms.windows(2) {
        assert!(w[1] <= (-lam * dt).exp() * w[0] * (1.0 + lam.powi(3) * dt.powi(3)));
    }
    // Backward Euler contracts every datum by at least 1/(1 + λ₁dt).
    let data: Vec<f64> = o.grid.nodes.iter().map(|x| (3.0 * x).cos() + x).collect();
    let be = solve_mode(&data, Source::Zero, &o, 0.2, dt, Scheme::BackwardEuler).unwrap();
    for w in be.states.windows(2) {
        let a = l2_norm(&w[0], &o.grid).unwrap();
        let b = l2_norm(&w[1], &o.grid).unwrap();
        assert!(b <= a / (1.0 + lam * dt) * (1.0 + 1e-12));
    }
    let zero = solve_mode(&vec![0.0; e.len()], Source::Zero, &o, 0.05, dt, Scheme::CrankNicolson).unwrap();
    assert!(zero.states.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn backward_euler_preserves_positivity() {
    let o = op(120, 1.0, 50.0);
    // Inverse positivity of I + dt G, column by column.
    for k in 0..o.dim() {
        let mut e = vec![0.0; o.dim()];
        e[k] = 1.0;
        let col = o.tri.solve_shifted(1.0, 0.01, &e).unwrap();
        assert!(col.iter().all(|&v| v >= 0.0), "column {k}");
    }
    let u0: Vec<f64> = o.grid.nodes.iter().map(|&x| if x > 0.5 { 1.0 } else { 0.0 }).collect();
    let src = |t: f64, x: f64| (x * t).abs();
    let traj = solve_mode(&u0, Source::Fn(&src), &o, 0.3, 0.01, Scheme::BackwardEuler).unwrap();
    assert!(traj.states.iter().flatten().all(|&v| v >= 0.0));
}

#[test]
fn subdomain_heat_flow() {
    let grid = build_grid(0.3, 0.9, 300).unwrap();
    let sine: Vec<f64> = grid.nodes.iter().map(|&x| (PI * (x - 0.3) / 0.6).sin()).collect();
    let same = heat_semigroup_subdomain(&sine, 0.0, &grid, 1e-4).unwrap();
    assert_eq!(same, sine);
    let t = 0.05;
    let out = heat_semigroup_subdomain(&sine, t, &grid, 1e-4).unwrap();
    let f = (-(PI / 0.6).powi(2) * t).exp();
    for (a, b) in out.iter().zip(&sine) {
        assert!((a - f * b).abs() <= 5e-3 * f);
    }
    let bump: Vec<f64> = grid.nodes.iter().map(|&x| (0.05 - (x - 0.6).abs()).max(0.0)).collect();
    let flowed = heat_semigroup_subdomain(&bump, 0.02, &grid, 1e-4).unwrap();
    assert!(flowed.iter().all(|&v| v >= 0.0));
}

#[test]
fn fractional_norms_of_spectral_lines() {
    let grid = build_grid(-1.0, 1.0, 300).unwrap();
    let b = ones(&grid);
    let basis = Arc::new(build_basis(PI, 8, 64).unwrap());
    let ops: Vec<ModeOperator> = [1, 2]
        .iter()
        .map(|&n| assemble_operator(&grid, 0.5, basis.mu_n(n), &b).unwrap())
        .collect();
    let spectra: Vec<_> = ops.iter().map(|o| eigendecompose(o, 40).unwrap()).collect();
    for s in [0.5, 1.5, 2.0] {
        for k in [0, 3] {
            let stack = ModeStack::single(basis.clone(), 1, spectra[0].eigenvectors[k].clone()).unwrap();
            let got = fractional_norm(&stack, s, &spectra[..1]).unwrap();
            let want = spectra[0].eigenvalues[k].powf(s / 2.0);
            assert!((got - want).abs() <= 1e-10 * want, "s = {s}, k = {k}");
        }
        let (a, c) = (0.7, -1.3);
        let stack = ModeStack::new(
            basis.clone(),
            vec![1, 2],
            vec![
                spectra[0].eigenvectors[0].iter().map(|v| a * v).collect(),
                spectra[1].eigenvectors[0].iter().map(|v| c * v).collect(),
            ],
        )
        .unwrap();
        let got = fractional_norm(&stack, s, &spectra).unwrap();
        let want = (a * a * spectra[0].ground().powf(s) + c * c * spectra[1].ground().powf(s)).sqrt();
        assert!((got - want).abs() <= 1e-10 * want, "s = {s}");
    }
    // s = 0 is Parseval over the modes.
    let f: Vec<f64> = grid.nodes.iter().map(|x| 1.0 - x * x).collect();
    let g: Vec<f64> = grid.nodes.iter().map(|x| x * (1.0 - x * x)).collect();
    let stack = ModeStack::new(basis.clone(), vec![1, 2], vec![f.clone(), g.clone()]).unwrap();
    let got = fractional_norm(&stack, 0.0, &spectra).unwrap();
    let want = (l2_norm(&f, &grid).unwrap().powi(2) + l2_norm(&g, &grid).unwrap().powi(2)).sqrt();
    assert!((got - want).abs() <= 1e-8 * want, "{got} vs {want}");
}
