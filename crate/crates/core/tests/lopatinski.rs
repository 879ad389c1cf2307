use nalgebra::{DMatrix, DVector, Matrix4};
use proptest::prelude::*;
use shockline_core::gas_model::{self, GasParams};
use shockline_core::linalg::{self, C64};
use shockline_core::lopatinski::closed_forms as cf;
use shockline_core::lopatinski::curve::{self, AxisVerdict, CurveOptions};
use shockline_core::lopatinski::{self, MultiD, Verdict};
use shockline_core::profile::{self, ShockData};

fn shock(g: &GasParams, frac: f64) -> ShockData {
    let us = profile::u_star(g);
    profile::endstates(g, us + frac * (1.0 - us)).unwrap()
}

fn u_grid(g: &GasParams, n: usize) -> Vec<f64> {
    let us = profile::u_star(g);
    let (a, b) = (us + 1e-3, 1.0 - 1e-3);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn freq() -> impl Strategy<Value = (f64, C64)> {
    (0.0f64..5.0, 0.01f64..3.0, -5.0f64..5.0).prop_map(|(xi, re, im)| (xi, C64::new(re, im)))
}

fn recombination() -> impl Strategy<Value = DMatrix<C64>> {
    proptest::collection::vec(-1.0f64..1.0, 18)
        .prop_map(|v| DMatrix::from_fn(3, 3, |i, j| C64::new(v[2 * (3 * i + j)], v[2 * (3 * i + j) + 1]) + if i == j { C64::new(1.5, 0.0) } else { C64::new(0.0, 0.0) }))
        .prop_filter("well conditioned", |c| {
            let s = c.clone().svd(false, false).singular_values;
            s[0] / s[2] < 100.0
        })
}

#[test]
fn determinant_and_eigenvector_paths_agree() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        for u in u_grid(&g, 50) {
            let s = profile::endstates(&g, u).unwrap();
            let d = lopatinski::deltas(&g, &s).unwrap();
            let ra = d.delta_hat_det / d.delta_det;
            let rb = d.delta_hat / d.delta;
            assert!((ra - rb).abs() < 1e-10 * rb.abs().max(1.0), "u+ = {u}: {ra} vs {rb}");
        }
    }
}

#[test]
fn delta_positive_and_weak_shock_stable() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        for u in u_grid(&g, 100) {
            let s = profile::endstates(&g, u).unwrap();
            assert!(lopatinski::delta(&g, &s).unwrap() > 0.0, "u+ = {u}");
        }
        let s = profile::endstates(&g, 1.0 - 1e-3).unwrap();
        assert_eq!(lopatinski::onedim_verdict(&g, &s).unwrap().verdict, Verdict::Stable);
    }
}

#[test]
fn jump_matches_conserved_difference() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = shock(&g, 0.4);
    let direct = s.state_plus.to_vector() - s.state_minus.to_vector();
    assert!((lopatinski::jump_u(&s) - direct).amax() < 1e-15);
    let f2 = lopatinski::jump_f2(&g, &s).unwrap();
    let dp = gas_model::pressure(&g, s.rho_plus, s.e_plus) - gas_model::pressure(&g, 1.0, s.e_minus);
    assert!(f2[0].abs() < 1e-15 && f2[1].abs() < 1e-15 && f2[3].abs() < 1e-15);
    assert!((f2[2] - dp).abs() < 1e-14);
}

#[test]
fn column_operations_preserve_product() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let s = shock(&g, 0.5);
    let r = lopatinski::r_plus(&g, &s.state_plus).unwrap();
    let ju = lopatinski::jump_u(&s);
    let a1s = lopatinski::a1_minus_s(&g, &s).unwrap();
    let det = |r: &nalgebra::Matrix4x3<f64>, f: &nalgebra::Vector4<f64>| {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<4, 3>(0, 0).copy_from(r);
        m.set_column(3, f);
        m.determinant()
    };
    let base = det(&r, &ju) * det(&r, &a1s);
    let mut swapped = r;
    swapped.swap_columns(0, 2);
    assert!(det(&swapped, &ju) * det(&r, &ju) < 0.0);
    let p = det(&swapped, &ju) * det(&swapped, &a1s);
    assert!((p / base - 1.0).abs() < 1e-12);
    let mut scaled = r;
    scaled.column_mut(1).scale_mut(-3.0);
    let q = det(&scaled, &ju) * det(&scaled, &a1s);
    assert!(q / base > 0.0);
    let h = g.rescale_viscosity(0.3).unwrap();
    let sh = profile::endstates(&h, s.u_plus).unwrap();
    let dg = lopatinski::deltas(&g, &s).unwrap();
    let dh = lopatinski::deltas(&h, &sh).unwrap();
    assert!((dg.product() - dh.product()).abs() < 1e-12);
}

#[test]
fn left_eigenvector_residual_on_frequency_grid() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let md = MultiD::new(&g, &shock(&g, 0.5)).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            let xi = 5.0 * i as f64 / 19.0;
            let lam = C64::new(0.1, -5.0 + 10.0 * j as f64 / 19.0);
            let b = md.cal_r(xi, lam).unwrap();
            let a = md.cal_a(xi, lam);
            let res = (a.transpose() * &b.ell - &b.ell * b.stable_eigenvalue).norm() / b.ell.norm();
            assert!(res < 1e-10 * a.norm().max(1.0), "residual {res:e} at xi = {xi}, lambda = {lam}");
        }
    }
}

#[test]
fn one_dimensional_reduction_of_the_multid_determinant() {
    let g = gas_model::kinetic_gas(2).unwrap();
    for frac in [0.1, 0.5, 0.9] {
        let s = shock(&g, frac);
        let md = MultiD::new(&g, &s).unwrap();
        let r1 = lopatinski::r_plus(&g, &s.state_plus).unwrap();
        let r1 = DMatrix::from_fn(4, 3, |i, j| C64::new(r1[(i, j)], 0.0));
        let d = lopatinski::deltas(&g, &s).unwrap();
        for lam in [0.2, 1.0, 7.0] {
            let lam = C64::new(lam, 0.0);
            let b = md.cal_r(0.0, lam).unwrap();
            let c = r1.adjoint() * &b.r;
            let factor = linalg::det(&c);
            let dm = md.delta_md(0.0, lam).unwrap() / lam;
            let reduced = dm / factor;
            assert!(reduced.im.abs() < 1e-9 * reduced.norm());
            assert_eq!(reduced.re > 0.0, d.delta_det > 0.0);
            assert!((reduced.re / d.delta_det - 1.0).abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eta_hat_is_homogeneous((xi, lam) in freq(), frac in 0.05f64..0.95, n in 1u32..3) {
        let g = gas_model::kinetic_gas(n).unwrap();
        let md = MultiD::new(&g, &shock(&g, frac)).unwrap();
        let Some(base) = md.eta_hat(xi, lam).unwrap().value() else { return Ok(()) };
        for t in [1e-3, 1.0, 1e3] {
            let scaled = md.eta_hat(t * xi, lam * t).unwrap().value().unwrap();
            prop_assert!((scaled - base * t).norm() < 1e-9 * (base * t).norm(), "t = {t}");
        }
    }

    #[test]
    fn eta_hat_independent_of_basis((xi, lam) in freq(), c in recombination()) {
        let g = gas_model::kinetic_gas(1).unwrap();
        let md = MultiD::new(&g, &shock(&g, 0.4)).unwrap();
        let b = md.cal_r(xi, lam).unwrap();
        let (Some(e1), Some(e2)) = (md.eta_hat_with(&b.r, xi, lam), md.eta_hat_with(&(&b.r * &c), xi, lam)) else {
            return Ok(());
        };
        prop_assert!((e1 - e2).norm() < 1e-12 * e1.norm().max(1.0));
        let el = md.eta_hat_left(xi, lam).unwrap();
        prop_assert!((e1 - el).norm() < 1e-9 * e1.norm().max(1.0));
    }

    #[test]
    fn eta_hat_is_a_root((xi, lam) in freq(), frac in 0.05f64..0.95) {
        let g = gas_model::kinetic_gas(2).unwrap();
        let md = MultiD::new(&g, &shock(&g, frac)).unwrap();
        let b = md.cal_r(xi, lam).unwrap();
        let Some(eta) = md.eta_hat_with(&b.r, xi, lam) else { return Ok(()) };
        let f = &md.jump_u * lam + &md.jump_f2 * C64::new(0.0, xi) + &md.a1s * eta;
        let d = linalg::det(&linalg::hcat_vec(&b.r, &f));
        let size = linalg::det(&linalg::hcat_vec(&b.r, &md.a1s)).norm() * eta.norm().max(1.0);
        prop_assert!(d.norm() < 1e-10 * size.max(1.0), "residual {}", d.norm());
        let d0 = md.delta_hat_md(xi, lam, 0.0).unwrap();
        prop_assert_eq!(d0, md.delta_md(xi, lam).unwrap());
    }

    #[test]
    fn conjugate_frequencies(xi in 0.0f64..5.0, re in 0.01f64..3.0, im in -5.0f64..5.0) {
        let g = gas_model::kinetic_gas(1).unwrap();
        let md = MultiD::new(&g, &shock(&g, 0.6)).unwrap();
        let a = md.eta_hat_left(xi, C64::new(re, im)).unwrap();
        let b = md.eta_hat_left(xi, C64::new(re, -im)).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-8 * a.norm().max(1.0));
    }

    #[test]
    fn product_invariant_under_viscosity_rescaling(t in 0.1f64..10.0, frac in 0.01f64..0.99) {
        let g = gas_model::kinetic_gas(1).unwrap();
        let h = g.rescale_viscosity(t).unwrap();
        let dg = lopatinski::deltas(&g, &shock(&g, frac)).unwrap();
        let dh = lopatinski::deltas(&h, &shock(&h, frac)).unwrap();
        prop_assert!((dg.product() - dh.product()).abs() < 1e-12);
        prop_assert_eq!(
            lopatinski::onedim_verdict(&g, &shock(&g, frac)).unwrap().verdict,
            lopatinski::onedim_verdict(&h, &shock(&h, frac)).unwrap().verdict
        );
    }
}

#[test]
fn monatomic_curve_avoids_the_axis() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = profile::endstates(&g, 0.95).unwrap();
    let md = MultiD::new(&g, &s).unwrap();
    let (c, v) = curve::eta_curve_verdict(&md, &CurveOptions::default()).unwrap();
    assert_eq!(v, AxisVerdict::Avoids);
    assert!(c.tail_residual < 1e-2);
    assert_eq!(c.unresolved, 0);
    let asym = c.asymptote.unwrap();
    let far = c.points.last().unwrap().eta.unwrap() / c.points.last().unwrap().tau;
    assert!((far - asym).norm() < 1e-2 * asym.norm());
}

#[test]
fn short_tau_range_fails_the_tail_test() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let md = MultiD::new(&g, &profile::endstates(&g, 0.6).unwrap()).unwrap();
    let opts = CurveOptions {
        tau_max: 0.05,
        ..CurveOptions::default()
    };
    assert!(curve::eta_curve_verdict(&md, &opts).is_err());
}

#[test]
fn synthetic_curves() {
    let opts = CurveOptions {
        tau_max: 40.0,
        ..CurveOptions::default()
    };
    let line = |f: fn(f64) -> C64| {
        let c = curve::trace_curve(|t| Some(f(t)), &opts).unwrap();
        curve::curve_axis_intersection(&c, |t| Some(f(t)), 1e-10)
    };
    assert_eq!(line(|t| C64::new(-1.0, t)), AxisVerdict::Avoids);
    match line(|t| C64::new(2.0 - t * t, t)) {
        AxisVerdict::Intersects { tau, eta } => {
            assert!(tau.abs() < 1e-8 && (eta - 2.0).abs() < 1e-8);
        }
        v => panic!("expected an intersection, got {v:?}"),
    }
}

#[test]
fn critical_phi_values() {
    assert!((cf::phi_crit(2.0 / 3.0).unwrap() - 0.58541).abs() < 1e-4);
    assert!((cf::phi_crit(2.0 / 5.0).unwrap() - 0.48164).abs() < 1e-4);
}

#[test]
fn strong_limit_first_principles_is_approached() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        let lim = lopatinski::strong_shock_limits(&g).first_principles;
        let s = profile::endstates(&g, profile::u_star(&g) + 1e-7).unwrap();
        let d = lopatinski::deltas(&g, &s).unwrap();
        assert!((d.delta_hat - lim.delta_hat).abs() < 1e-4 * lim.delta_hat.abs());
        assert!((d.delta - lim.delta).abs() < 1e-4 * lim.delta.abs());
    }
}

#[test]
fn invalid_frequencies_rejected() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let md = MultiD::new(&g, &shock(&g, 0.5)).unwrap();
    assert!(md.cal_r(0.0, C64::new(0.0, 0.0)).is_err());
    assert!(md.cal_r(1.0, C64::new(-0.1, 0.0)).is_err());
    let _: DVector<C64> = md.cal_r(1.0, C64::new(0.0, 0.3)).unwrap().ell;
}
