use std::f64::consts::PI;

use approx::assert_relative_eq;
use bcsphase_core::boundary::{classify_shape, trace_curve, ShapePrediction};
use bcsphase_core::closed_form::constant_model_beta_c;
use bcsphase_core::dispersion::{build_bump_dispersion, verify_bounds};
use bcsphase_core::free_energy::{free_energy, free_energy_point, gap_trace_sum};
use bcsphase_core::gap::{g, solve_beta_c, solve_delta, solve_tau};
use bcsphase_core::{
    BzGeometry, DispersionModel, Error, GridSpec, MeasureFractions, Regime, SolverConfig,
};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn bump(geometry: BzGeometry) -> DispersionModel {
    build_bump_dispersion(
        2,
        MeasureFractions::new(0.15, 0.55).unwrap(),
        1.0,
        2.5,
        geometry,
    )
    .unwrap()
}

#[test]
fn bump_model_pipeline() {
    let model = bump(BzGeometry::canonical(1).unwrap());
    let (lo, hi) = verify_bounds(&model, 4096);
    assert!(lo >= 1.0 - 1e-12 && hi <= 2.5 + 1e-12);
    let u = -0.6;
    let bc = solve_beta_c(&model, u, &cfg()).unwrap();
    // Bounded by the constant models at the two levels.
    assert!(bc <= constant_model_beta_c(2, 1.0, u).unwrap());
    assert!(bc >= constant_model_beta_c(2, 2.5, u).unwrap());

    let beta = 0.5 * bc;
    let tau = solve_tau(&model, u, beta, &cfg()).unwrap();
    assert!(tau > PI && tau < 2.0 * PI);
    assert!(g(&model, u, beta, tau, 0.0, &cfg()).unwrap().abs() < 1e-10);

    let res = solve_delta(&model, u, beta, 2.0 * PI, &cfg()).unwrap();
    assert_eq!(res.regime, Regime::QPlus);
    let trace = gap_trace_sum(&model, u, beta, 2.0 * PI / beta, &cfg()).unwrap();
    assert_relative_eq!(trace, 1.0 / -u, max_relative = 1e-9);
}

#[test]
fn bump_model_on_sheared_lattice() {
    let model = bump(BzGeometry::new(&[vec![1.0, 0.0], vec![0.4, 1.2]]).unwrap());
    let (lo, hi) = verify_bounds(&model, 4096);
    assert!(lo >= 1.0 - 1e-12 && hi <= 2.5 + 1e-12);
    // Between the constant models at the two levels, since g decreases in |E|.
    let u = -0.6;
    let at = |m: &DispersionModel| g(m, u, 0.3, 6.0, 0.0, &cfg()).unwrap();
    let v = at(&model);
    assert!(v < at(&DispersionModel::constant(2, 1.0).unwrap()));
    assert!(v > at(&DispersionModel::constant(2, 2.5).unwrap()));
}

#[test]
fn free_energy_is_continuous_across_the_boundary() {
    let model = DispersionModel::cosine_1d(0.8, 1.0).unwrap();
    let u = -1.2;
    let bc = solve_beta_c(&model, u, &cfg()).unwrap();
    let beta = 0.6 * bc;
    let tau = solve_tau(&model, u, beta, &cfg()).unwrap();
    let h = 1e-6;
    let inside = free_energy_point(&model, u, beta, tau + h, &cfg()).unwrap();
    let outside = free_energy_point(&model, u, beta, tau - h, &cfg()).unwrap();
    assert_eq!(inside.regime, Regime::QPlus);
    assert_eq!(outside.regime, Regime::QMinus);
    assert!((inside.f - outside.f).abs() < 1e-5);
    assert!((inside.df_dt - outside.df_dt).abs() < 1e-3);
}

#[test]
fn phase_structure_is_periodic_and_symmetric() {
    let model = DispersionModel::multi_orbital(8, 7, 1.0, 7.0).unwrap();
    let u = -0.125;
    let beta = 0.1;
    for t in [0.5, 4.0, 6.0] {
        let base = solve_delta(&model, u, beta, t, &cfg()).unwrap();
        for shifted in [t + 4.0 * PI, -t, 4.0 * PI - t] {
            let other = solve_delta(&model, u, beta, shifted, &cfg()).unwrap();
            assert_eq!(other.regime, base.regime);
            assert!((other.delta - base.delta).abs() < 1e-12);
        }
        let f0 = free_energy(&model, u, beta, t, &cfg()).unwrap();
        let f1 = free_energy(&model, u, beta, -t, &cfg()).unwrap();
        assert!((f0 - f1).abs() < 1e-12);
    }
}

#[test]
fn predicted_and_traced_shapes_agree() {
    for e_max in [2.0, 6.0, 7.0, 9.0] {
        let model = DispersionModel::multi_orbital(8, 7, 1.0, e_max).unwrap();
        let verdict = classify_shape(&model).unwrap();
        let curve = trace_curve(&model, -0.125, &GridSpec::default(), &cfg()).unwrap();
        let multiple = curve.minima_count() > 1;
        assert_eq!(
            multiple,
            verdict.prediction == ShapePrediction::MultipleMinimaPossible,
            "e_max = {e_max}"
        );
    }
}

#[test]
fn coupling_gates() {
    let model = DispersionModel::constant(2, 1.0).unwrap();
    // The gap equation itself only needs U < 0; β_c and τ need admissibility.
    for u in [-1.0, -1.5] {
        assert!(matches!(
            solve_beta_c(&model, u, &cfg()),
            Err(Error::Inadmissible { .. })
        ));
        assert!(trace_curve(&model, u, &GridSpec::default(), &cfg()).is_err());
        assert!(solve_delta(&model, u, 0.1, 6.0, &cfg()).is_ok());
    }
    assert!(solve_delta(&model, 0.3, 0.1, 6.0, &cfg()).is_err());
    assert!(solve_beta_c(&model, 0.3, &cfg()).is_err());
}
