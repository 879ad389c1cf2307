use shockline_core::evans::{self, BoundaryType, EvansOptions};
use shockline_core::gas_model;
use shockline_core::io;
use shockline_core::linalg::C64;
use shockline_core::lopatinski::curve::{CurveOptions, CurvePoint, EtaCurve};
use shockline_core::profile::{self, ProfileOptions};
use shockline_core::transition::{self, LayerSettings, SweepOptions};

fn parse(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn numbers_round_trip() {
    for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
        assert_eq!(io::num(x).parse::<f64>().unwrap(), x);
    }
    assert_eq!(io::num(0.5), "5.0000000000000000e-1");
}

#[test]
fn profile_table() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let s = profile::endstates(&g, 0.6).unwrap();
    let p = profile::solve_profile(&g, &s, &ProfileOptions::default()).unwrap();
    let (h, rows) = parse(&io::profile_csv(&p));
    assert_eq!(h, ["x", "u_hat", "e_hat"]);
    assert_eq!(rows.len(), p.grid.len());
    assert_eq!(rows[p.anchor][1].parse::<f64>().unwrap(), p.u[p.anchor]);
}

#[test]
fn curve_table_leaves_poles_empty() {
    let c = EtaCurve {
        points: vec![
            CurvePoint { tau: -1.0, eta: Some(C64::new(1.0, -2.0)) },
            CurvePoint { tau: 0.0, eta: None },
        ],
        poles: vec![0.0],
        asymptote: None,
        tail_residual: 0.0,
        unresolved: 0,
    };
    let (h, rows) = parse(&io::curve_csv(&c));
    assert_eq!(h, ["tau", "re_eta", "im_eta"]);
    assert_eq!(rows[1][1], "");
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), -2.0);
}

#[test]
fn evans_table_carries_the_scale() {
    let g = gas_model::kinetic_gas(1).unwrap();
    let l = transition::layer(&g, 0.5, &LayerSettings::default()).unwrap();
    let b = evans::bases_at(&l.system, C64::new(0.5, 0.0)).unwrap();
    let e0 = evans::boundary_kernel(BoundaryType::DirichletInflow);
    let v = evans::evans_boundary(&l.system, &b, &e0, l.x_shift, &EvansOptions::default()).unwrap();
    let (h, rows) = parse(&io::evans_csv(&[v]));
    assert_eq!(h, ["lambda_re", "lambda_im", "D_re", "D_im", "log_scale"]);
    let d: f64 = rows[0][2].parse().unwrap();
    let ls: f64 = rows[0][4].parse().unwrap();
    let value = v.checked().unwrap();
    assert!((d * ls.exp() - value.re).abs() < 1e-12 * value.norm());
}

#[test]
fn sweep_table_schema() {
    let g = gas_model::kinetic_gas(2).unwrap();
    let grid = transition::u_grid(&g, 0.3, 0.9, 3).unwrap();
    let (h, rows) = parse(&io::sweep_csv(&transition::sweep_1d(&g, &grid, &SweepOptions::default())));
    assert_eq!(
        h,
        ["u_plus", "e_minus", "delta", "delta_hat", "verdict_1d", "eta_curve_verdict", "evans_index", "note"]
    );
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[4] == "Stable" && r[5].is_empty()));
    let md = transition::sweep_md(&g, &grid, &CurveOptions::default());
    let (_, rows) = parse(&io::sweep_csv(&md));
    assert!(rows.iter().all(|r| r[5] == "Avoids"));
}
