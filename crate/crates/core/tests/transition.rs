use shockline_core::gas_model::{self, GasParams};
use shockline_core::io;
use shockline_core::lopatinski::curve::CurveOptions;
use shockline_core::lopatinski::{self, Verdict};
use shockline_core::profile;
use shockline_core::transition::{self, CrossOptions, SweepOptions, TransitionOutcome};

/// A non-kinetic gas whose `delta_hat` changes sign inside the range.
fn stiff_gas() -> GasParams {
    gas_model::make_gas(3.0, 1.0, 0.0, 2.0, 1.0).unwrap()
}

fn full_bracket(g: &GasParams) -> (f64, f64) {
    (profile::u_star(g) + 1e-3, 1.0 - 1e-3)
}

fn root(g: &GasParams, bracket: (f64, f64), tol: f64) -> transition::TransitionResult {
    match transition::find_transition(g, bracket, tol).unwrap() {
        TransitionOutcome::Root(r) => r,
        other => panic!("expected a root, got {other:?}"),
    }
}

#[test]
fn grid_must_lie_inside_the_admissible_range() {
    let g = gas_model::kinetic_gas(1).unwrap();
    assert!(transition::u_grid(&g, 0.1, 0.9, 5).is_err());
    assert!(transition::u_grid(&g, 0.3, 1.0, 5).is_err());
    assert!(transition::u_grid(&g, 0.3, 0.9, 0).is_err());
    assert_eq!(transition::u_grid(&g, 0.3, 0.9, 1).unwrap(), [0.3]);
    let u = transition::u_grid(&g, 0.3, 0.9, 7).unwrap();
    assert_eq!(u.len(), 7);
    assert_eq!((u[0], u[6]), (0.3, 0.9));
}

#[test]
fn sweep_rows_are_ordered_and_consistent() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let (a, b) = full_bracket(&g);
    let grid = transition::u_grid(&g, a, b, 40).unwrap();
    let rows = transition::sweep_1d(&g, &grid, &SweepOptions::default());
    assert!(rows.windows(2).all(|w| w[0].u_plus < w[1].u_plus));
    for r in &rows {
        let p = r.delta.unwrap() * r.delta_hat.unwrap();
        let want = if p > 0.0 { Verdict::Stable } else { Verdict::Unstable };
        assert_eq!(r.verdict_1d.unwrap(), want);
        assert!(r.evans_index.is_none());
    }
}

#[test]
fn sweep_output_is_bitwise_reproducible() {
    let g = stiff_gas();
    let (a, b) = full_bracket(&g);
    let grid = transition::u_grid(&g, a, b, 30).unwrap();
    let one = io::sweep_csv(&transition::sweep_1d(&g, &grid, &SweepOptions::default()));
    let two = io::sweep_csv(&transition::sweep_1d(&g, &grid, &SweepOptions::default()));
    assert_eq!(one, two);
    let strip = |mut rows: Vec<transition::SweepRow>| {
        rows.iter_mut().for_each(|r| r.seconds = 0.0);
        rows
    };
    let md = strip(transition::sweep_md(&g, &grid[..4], &CurveOptions::default()));
    let md2 = strip(transition::sweep_md(&g, &grid[..4], &CurveOptions::default()));
    assert_eq!(md, md2);
}

#[test]
fn bisection_root() {
    let g = stiff_gas();
    let r = root(&g, full_bracket(&g), 1e-10);
    assert!(r.residual < 1e-10);
    assert_eq!(r.side_signs.0, -r.side_signs.1);
    let s = profile::endstates(&g, r.u_star_transition).unwrap();
    assert!(lopatinski::delta_hat(&g, &s).unwrap().abs() < 1e-10);
    let u = r.u_star_transition;
    let below = profile::endstates(&g, u - 1e-4).unwrap();
    let above = profile::endstates(&g, u + 1e-4).unwrap();
    let sb = lopatinski::delta_hat(&g, &below).unwrap().signum();
    let sa = lopatinski::delta_hat(&g, &above).unwrap().signum();
    assert_eq!(sb, -sa);
}

#[test]
fn root_is_stable_under_refinement() {
    let g = stiff_gas();
    let tol = 1e-10;
    let base = root(&g, full_bracket(&g), tol).u_star_transition;
    let finer = root(&g, full_bracket(&g), tol / 100.0).u_star_transition;
    let (a, b) = full_bracket(&g);
    let shifted = root(&g, (a + 0.005, b - 0.02), tol).u_star_transition;
    assert!((base - finer).abs() < 10.0 * tol);
    assert!((base - shifted).abs() < 10.0 * tol);
    assert_eq!(base, root(&g, full_bracket(&g), tol).u_star_transition);
}

#[test]
fn kinetic_gases_have_no_transition() {
    for n in [1, 2] {
        let g = gas_model::kinetic_gas(n).unwrap();
        match transition::find_transition(&g, full_bracket(&g), 1e-10).unwrap() {
            TransitionOutcome::NoTransition { delta_hat, .. } => {
                assert!(delta_hat.0 > 0.0 && delta_hat.1 > 0.0);
            }
            TransitionOutcome::Root(r) => panic!("unexpected root at {}", r.u_star_transition),
        }
    }
}

#[test]
fn invalid_tolerance() {
    let g = stiff_gas();
    assert!(transition::find_transition(&g, full_bracket(&g), 0.0).unwrap_err().is_usage());
}

#[test]
fn evans_column_when_requested() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let grid = [0.9];
    let opts = SweepOptions {
        evans_stride: Some(1),
        ..SweepOptions::default()
    };
    let rows = transition::sweep_1d(&g, &grid, &opts);
    assert_eq!(rows[0].evans_index, Some(1));
}

#[test]
fn cross_validation_single_sample() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let r = transition::cross_validate(&g, &[0.9], &[8.0], &CrossOptions::default());
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!(row.signs_match, Some(true));
    assert_eq!(row.constant_layer_sign_constant, Some(true));
    assert_eq!(row.shock_sign_constant, Some(true));
    assert_eq!((r.compared, r.mismatches), (1, 0));
}
