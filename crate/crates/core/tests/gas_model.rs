use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;
use shockline_core::gas_model::{self, ConservedState, GasParams, PrimitiveState};

fn gas_strategy() -> impl Strategy<Value = GasParams> {
    (1.05f64..2.0, 0.5f64..2.0, -0.4f64..0.4, 0.2f64..3.0, 0.5f64..2.0)
        .prop_map(|(g, mu, eta, k, cv)| gas_model::make_gas(g, mu, eta * mu, k, cv).unwrap())
}

fn state_strategy() -> impl Strategy<Value = PrimitiveState> {
    (0.1f64..5.0, -2.0f64..2.0, -2.0f64..2.0, 0.05f64..3.0).prop_map(|(rho, u, v, e)| PrimitiveState { rho, u, v, e })
}

fn fd_jacobian(f: impl Fn(&Vector4<f64>) -> Vector4<f64>, x: &Vector4<f64>, h: f64) -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    for k in 0..4 {
        let mut xp = *x;
        let mut xm = *x;
        xp[k] += h;
        xm[k] -= h;
        j.set_column(k, &((f(&xp) - f(&xm)) / (2.0 * h)));
    }
    j
}

proptest! {
    #[test]
    fn primitive_round_trip(w in state_strategy()) {
        let s = gas_model::primitive_to_conserved(&w);
        let back = gas_model::conserved_to_primitive(&s).unwrap();
        prop_assert!((back.rho - w.rho).abs() < 1e-14 * w.rho.max(1.0));
        prop_assert!((back.u - w.u).abs() < 1e-14 * 4.0);
        prop_assert!((back.v - w.v).abs() < 1e-14 * 4.0);
        prop_assert!((back.e - w.e).abs() < 1e-14 * 8.0);
    }

    #[test]
    fn sound_speed_formulas_agree(g in gas_strategy(), rho in 0.01f64..10.0, e in 0.01f64..10.0) {
        let a = gas_model::sound_speed(&g, e);
        let b = gas_model::sound_speed_from_derivatives(&g, rho, e);
        prop_assert!((a - b).abs() < 1e-13 * a.max(1.0));
    }

    #[test]
    fn flux_jacobians_match_second_order_differences(g in gas_strategy(), w in state_strategy()) {
        let s = gas_model::primitive_to_conserved(&w);
        let x = s.to_vector();
        let f1 = |y: &Vector4<f64>| gas_model::flux_x(&g, &ConservedState::from_vector(y)).unwrap();
        let f2 = |y: &Vector4<f64>| gas_model::flux_y(&g, &ConservedState::from_vector(y)).unwrap();
        for (j, f) in [
            (gas_model::jacobian_f1(&g, &s).unwrap(), &f1 as &dyn Fn(&Vector4<f64>) -> Vector4<f64>),
            (gas_model::jacobian_f2(&g, &s).unwrap(), &f2),
        ] {
            let h = 1e-3 * w.rho.min(1.0);
            let e1 = (fd_jacobian(f, &x, h) - j).norm();
            let e2 = (fd_jacobian(f, &x, h / 2.0) - j).norm();
            prop_assert!(e2 < 1e-6 || (e1 / e2).log2() >= 1.9, "e1 = {e1}, e2 = {e2}");
        }
    }

    #[test]
    fn char_speeds_are_jacobian_eigenvalues(g in gas_strategy(), w in state_strategy()) {
        let s = gas_model::primitive_to_conserved(&w);
        let j = gas_model::jacobian_f1(&g, &s).unwrap();
        let mut ev: Vec<f64> = j.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let cs = gas_model::char_speeds(&g, &s).unwrap();
        for (a, b) in ev.iter().zip(cs.iter()) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{ev:?} vs {cs:?}");
        }
    }

    #[test]
    fn one_dimensional_jacobian_is_the_reduced_block(g in gas_strategy(), u in -2.0f64..2.0, e in 0.05f64..3.0) {
        let w = PrimitiveState { rho: 1.3, u, v: 0.0, e };
        let j4 = gas_model::jacobian_f1(&g, &gas_model::primitive_to_conserved(&w)).unwrap();
        let j3 = gas_model::jacobian_f1_1d(&g, u, e);
        let idx = [0usize, 1, 3];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &k) in idx.iter().enumerate() {
                prop_assert!((j3[(a, b)] - j4[(i, k)]).abs() < 1e-12 * (1.0 + j4[(i, k)].abs()));
            }
        }
    }
}

#[test]
fn lax_one_shock_upstream_speeds_positive() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        let s = shockline_core::profile::endstates(&g, 0.5).unwrap();
        let cm = gas_model::char_speeds(&g, &s.state_minus).unwrap();
        assert!(cm.iter().all(|&c| c > 0.0));
        let cp = gas_model::char_speeds(&g, &s.state_plus).unwrap();
        assert!(cp[0] < 0.0 && cp[1] > 0.0);
    }
}

#[test]
fn strong_shock_downstream_sound_speed() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = shockline_core::profile::endstates(&g, 0.25 + 1e-9).unwrap();
    let w = gas_model::conserved_to_primitive(&s.state_plus).unwrap();
    let c = gas_model::sound_speed(&g, w.e);
    assert!((c - 0.559).abs() < 1e-3, "c+ = {c}");
    assert!(w.u - c < 0.0 && w.u > 0.0);
}

#[test]
fn symmetric_state_speeds() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let w = PrimitiveState { rho: 2.0, u: 0.0, v: 0.0, e: 0.7 };
    let cs = gas_model::char_speeds(&g, &gas_model::primitive_to_conserved(&w)).unwrap();
    let c = gas_model::sound_speed(&g, 0.7);
    assert_eq!(cs, [-c, 0.0, 0.0, c]);
}

#[test]
fn invalid_constants_rejected() {
    assert!(gas_model::make_gas(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    assert!(gas_model::make_gas(1.4, 1.0, 1.5, 1.0, 1.0).is_err());
    assert!(gas_model::make_gas(1.4, 1.0, 0.0, -1.0, 1.0).is_err());
    assert!(gas_model::kinetic_gas(0).is_err());
    let bad = ConservedState { rho: 1.0, m1: 2.0, m2: 0.0, etot: 1.0 };
    assert!(gas_model::conserved_to_primitive(&bad).is_err());
}

#[test]
fn viscosity_rescaling_keeps_phi() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let h = g.rescale_viscosity(3.5).unwrap();
    assert!((g.phi - h.phi).abs() < 1e-15);
    assert_eq!(g.gamma, h.gamma);
}
