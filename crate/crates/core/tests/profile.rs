use nalgebra::{Vector2, Vector4};
use proptest::prelude::*;
use shockline_core::gas_model::{self, GasParams};
use shockline_core::profile::{self, ProfileOptions, ProfileSolution};

fn grid(g: &GasParams, n: usize) -> Vec<f64> {
    let us = profile::u_star(g);
    let (a, b) = (us + 1e-3, 1.0 - 1e-3);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Flux jump computed directly from the conserved endstates.
fn flux_jump(g: &GasParams, u: f64) -> f64 {
    let s = profile::endstates(g, u).unwrap();
    let fm = gas_model::flux_x(g, &s.state_minus).unwrap();
    let fp = gas_model::flux_x(g, &s.state_plus).unwrap();
    (fp - fm).amax()
}

fn solve(g: &GasParams, u: f64) -> ProfileSolution {
    let s = profile::endstates(g, u).unwrap();
    let om = profile::linearization_minus(g, &s).omega_minus.abs();
    let opts = ProfileOptions {
        half_length: 12.0 / om,
        ..ProfileOptions::default()
    };
    profile::solve_profile(g, &s, &opts).unwrap()
}

#[test]
fn endstates_on_the_full_grid() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        for u in grid(&g, 100) {
            let s = profile::endstates(&g, u).unwrap();
            assert!(flux_jump(&g, u) < 1e-12, "u+ = {u}");
            assert!(profile::rh_residual(&g, &s).unwrap() < 1e-12);
            assert!(profile::linearization_minus(&g, &s).m_minus.determinant() > 0.0);
            assert!(profile::is_lax_1_shock(&g, &s).unwrap());
            let det = profile::m_minus(&g, &s).determinant();
            assert!((det - profile::det_m_minus_formula(&g, &s)).abs() < 1e-12 * (1.0 + det.abs()));
        }
    }
}

#[test]
fn alpha_form_matches_direct_energies() {
    let g = gas_model::kinetic_gas(2).unwrap();
    for u in grid(&g, 20) {
        let s = profile::endstates(&g, u).unwrap();
        let (em, ep) = profile::endstate_energies_alpha_form(&g, u);
        assert!((em - s.e_minus).abs() < 1e-12 && (ep - s.e_plus).abs() < 1e-12);
    }
}

#[test]
fn strong_shock_downstream_energy() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        let big = g.big_gamma;
        let s = profile::endstates(&g, profile::u_star(&g) + 1e-6).unwrap();
        let want = 2.0 / (big + 2.0).powi(2);
        assert!((s.e_plus - want).abs() / want < 1e-4, "n = {n}: {} vs {want}", s.e_plus);
    }
    let g = gas_model::kinetic_gas(1).unwrap();
    assert!((2.0 / (g.big_gamma + 2.0).powi(2) - 0.28125).abs() < 1e-15);
}

#[test]
fn out_of_range_downstream_velocity() {
    let g = gas_model::make_gas(5.0 / 3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    assert!(profile::endstates(&g, 0.1).is_err());
    assert!(profile::endstates(&g, 1.2).is_err());
    let err = profile::endstates(&g, 0.1).unwrap_err();
    assert!(err.is_usage());
}

#[test]
fn profile_endpoints_and_tail() {
    let g = gas_model::kinetic_gas(1).unwrap();
    for u in [0.5, 0.7] {
        let p = solve(&g, u);
        let (el, er) = p.endpoint_errors();
        assert!(el < 1e-8 && er < 1e-8, "u+ = {u}: {el:e} {er:e}");
        assert!(p.monotone);
        let lin = profile::linearization_minus(&g, &p.shock);
        let fit = profile::profile_tail_direction(&p).unwrap();
        assert!((fit.rate / lin.omega_minus - 1.0).abs() < 0.02);
        let s = profile::asymptotic_direction(&g, &p.shock).unwrap();
        let angle = profile::line_angle(&fit.direction_conserved, &s.big_s);
        assert!(angle < 1e-5, "angle = {angle:e}");
        let anchor = p.eval(0.0);
        assert!((anchor.u - 0.5 * (1.0 + u)).abs() < 1e-9);
    }
}

#[test]
fn profile_self_convergence() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = profile::endstates(&g, 0.6).unwrap();
    let run = |tol: f64, seed: f64| {
        let opts = ProfileOptions {
            tol,
            seed_scale: seed,
            ..ProfileOptions::default()
        };
        let p = profile::solve_profile(&g, &s, &opts).unwrap();
        let pt = p.eval(1.0);
        Vector2::new(pt.u, pt.e)
    };
    let coarse = run(1e-9, 1e-7);
    let fine = run(5e-10, 1e-7);
    assert!((coarse - fine).norm() < 10.0 * 1e-9);
    let seeded = run(1e-10, 1e-8);
    assert!((seeded - run(1e-10, 1e-7)).norm() < 1e-7);
}

#[test]
fn synthetic_tail_recovers_direction() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = profile::endstates(&g, 0.5).unwrap();
    let dir = Vector2::new(-0.8, 0.6);
    let fast = Vector2::new(0.3, 1.0).normalize();
    let rate = 1.3;
    let xs: Vec<f64> = (0..400).map(|k| -30.0 + 0.075 * k as f64).collect();
    for contamination in [0.0, 1e-3] {
        let dev: Vec<Vector2<f64>> = xs
            .iter()
            .map(|&x| dir * 0.2 * (rate * x).exp() + fast * contamination * (3.0 * rate * x).exp())
            .collect();
        let ddev: Vec<Vector2<f64>> = xs
            .iter()
            .map(|&x| dir * 0.2 * rate * (rate * x).exp() + fast * contamination * 3.0 * rate * (3.0 * rate * x).exp())
            .collect();
        let fit = profile::fit_tail(&xs, &dev, &ddev, &s).unwrap();
        let tol = if contamination == 0.0 { 1e-10 } else { 1e-6 };
        let got = fit.direction;
        let err = (got - dir).norm().min((got + dir).norm());
        assert!(err < tol, "{err:e}");
        assert!((fit.rate - rate).abs() < 1e-6);
    }
    let short: Vec<f64> = xs[..5].to_vec();
    let flat = vec![dir; 5];
    assert!(profile::fit_tail(&short, &flat, &flat, &s).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn direction_invariant_under_viscosity_rescaling(t in 0.1f64..10.0, frac in 0.02f64..0.98, n in 1u32..3) {
        let g = gas_model::kinetic_gas(n).unwrap();
        let h = g.rescale_viscosity(t).unwrap();
        let us = profile::u_star(&g);
        let u = us + frac * (1.0 - us);
        let sg = profile::endstates(&g, u).unwrap();
        let sh = profile::endstates(&h, u).unwrap();
        let a = profile::asymptotic_direction(&g, &sg).unwrap().big_s;
        let b = profile::asymptotic_direction(&h, &sh).unwrap().big_s;
        prop_assert!((a - b).amax() < 1e-12 * a.amax().max(1.0));
    }

    #[test]
    fn energies_positive_and_ordered(frac in 1e-4f64..0.999, gamma in 1.1f64..2.0) {
        let g = gas_model::make_gas(gamma, 1.0, 0.0, 1.0, 1.0).unwrap();
        let us = profile::u_star(&g);
        let s = profile::endstates(&g, us + frac * (1.0 - us)).unwrap();
        prop_assert!(s.e_minus > 0.0 && s.e_plus > s.e_minus);
        prop_assert!(profile::rh_residual(&g, &s).unwrap() < 1e-12);
    }
}

#[test]
fn strong_direction_limit() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = profile::endstates(&g, profile::u_star(&g) + 1e-7).unwrap();
    let big = profile::asymptotic_direction(&g, &s).unwrap().big_s;
    let lim: Vector4<f64> = profile::strong_shock_direction(&g);
    assert!((big - lim).amax() < 1e-3, "{big:?} vs {lim:?}");
}
