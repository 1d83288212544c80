//! Verification suites: closed-form oracles, finite-difference checks and
//! the reference phase-boundary shapes, each reduced to a pass/fail outcome.
//!
//! Random samples use a fixed seed, so every run is reproducible.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    a_hat, a_minus, a_plus, multiorbital_exact_tau_check, tau_prime, tau_second, trace_curve,
    w_levels, w_tilde, GridSpec, MinimumStatus,
};
use crate::bzquad::trace_integral;
use crate::closed_form::{
    constant_model_beta_c, constant_model_tau, cosine_integral_closed, AlgebraicConstants,
};
use crate::config::SolverConfig;
use crate::dispersion::{
    build_bump_dispersion, level_set_fractions, BzGeometry, DispersionModel, MeasureFractions,
};
use crate::error::Result;
use crate::free_energy::{
    gap_trace_sum, jump_report_at, odlro_and_density, second_derivative_jumps, ssb_order,
};
use crate::gap::{
    beta_c_upper_bound, dg_dt, dg_dx, dg_dz, g, solve_beta_c, solve_delta, solve_tau, Regime,
};

/// Coupling of the reference multi-orbital family.
pub const REFERENCE_U: f64 = -0.125;

/// The reference multi-orbital model `b = 8, b' = 7, e_min = 1`.
pub fn reference_model(e_max: f64) -> Result<DispersionModel> {
    DispersionModel::multi_orbital(8, 7, 1.0, e_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(&SolverConfig) -> Result<(bool, String)>;

pub struct Suite {
    pub id: usize,
    pub name: &'static str,
    check: CheckFn,
}

impl Suite {
    pub fn run(&self, cfg: &SolverConfig) -> CheckOutcome {
        let start = Instant::now();
        let (passed, detail) = match (self.check)(cfg) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckOutcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub const SUITES: &[Suite] = &[
    Suite {
        id: 1,
        name: "boundary_minima",
        check: boundary_minima,
    },
    Suite {
        id: 2,
        name: "exact_tau",
        check: exact_tau,
    },
    Suite {
        id: 3,
        name: "cosine_integral",
        check: cosine_integral,
    },
    Suite {
        id: 4,
        name: "constant_model",
        check: constant_model,
    },
    Suite {
        id: 5,
        name: "convexity",
        check: convexity,
    },
    Suite {
        id: 6,
        name: "gap_equation",
        check: gap_equation,
    },
    Suite {
        id: 7,
        name: "beta_c_bound",
        check: beta_c_bound,
    },
    Suite {
        id: 8,
        name: "free_energy_jumps",
        check: free_energy_jumps,
    },
    Suite {
        id: 9,
        name: "derivatives",
        check: derivatives,
    },
    Suite {
        id: 10,
        name: "shape_constants",
        check: shape_constants,
    },
    Suite {
        id: 11,
        name: "order_parameters",
        check: order_parameters,
    },
    Suite {
        id: 12,
        name: "bump_fractions",
        check: bump_fractions,
    },
];

/// Suites whose name contains `filter` (all when `None`).
pub fn select(filter: Option<&str>) -> Vec<&'static Suite> {
    SUITES
        .iter()
        .filter(|s| filter.is_none_or(|f| s.name.contains(f)))
        .collect()
}

pub fn run_suites(filter: Option<&str>, cfg: &SolverConfig) -> Vec<CheckOutcome> {
    select(filter).into_iter().map(|s| s.run(cfg)).collect()
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn boundary_minima(cfg: &SolverConfig) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (e_max, expected) in [(6.0, 1), (7.0, 2), (9.0, 1)] {
        let model = reference_model(e_max)?;
        let curve = trace_curve(&model, REFERENCE_U, &GridSpec::default(), cfg)?;
        let count = curve.minima_count();
        ok &= count == expected;
        // The minimum must be bracketed by a sign change of τ' within 1e-6.
        for m in curve
            .local_minima
            .iter()
            .filter(|m| m.status == MinimumStatus::Refined)
        {
            let left = tau_prime(&model, REFERENCE_U, m.beta - 1e-6, cfg)?;
            let right = tau_prime(&model, REFERENCE_U, m.beta + 1e-6, cfg)?;
            ok &= left < 0.0 && right > 0.0;
        }
        let at: Vec<String> = curve
            .local_minima
            .iter()
            .map(|m| format!("{:.6}", m.beta / curve.beta_c))
            .collect();
        detail.push(format!(
            "e_max={e_max}: {count} (β/β_c at {})",
            at.join(", ")
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    Ok((ok, format!("{}; {secs:.2} s", detail.join("; "))))
}

fn exact_tau(cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for e_max in [6.0, 7.0, 9.0] {
        let model = reference_model(e_max)?;
        let bc = solve_beta_c(&model, REFERENCE_U, cfg)?;
        for i in 1..=200 {
            let beta = bc * i as f64 / 201.0;
            let (exact, _) =
                multiorbital_exact_tau_check(8, 7, 1.0, e_max, REFERENCE_U, beta, cfg)?;
            let numeric = solve_tau(&model, REFERENCE_U, beta, cfg)?;
            worst = worst.max((exact - numeric).abs());
        }
    }
    Ok((
        worst <= 1e-8,
        format!("max |τ_exact − τ_bisect| = {worst:.3e}"),
    ))
}

fn cosine_integral(cfg: &SolverConfig) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: f64 = r.random_range(0.0..10.0);
        let t_hop: f64 = r.random_range(0.0..10.0);
        let model = DispersionModel::cosine_1d(t_hop, 1.0)?;
        let quad = trace_integral(&model, |l| 1.0 / (1.0 + x * l * l), &cfg.quad)?;
        worst = worst.max((quad - cosine_integral_closed(x, t_hop)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-10 && secs < 5.0,
        format!("max deviation {worst:.3e}; {secs:.2} s"),
    ))
}

fn constant_model(cfg: &SolverConfig) -> Result<(bool, String)> {
    let (mut worst_bc, mut worst_tau) = (0.0f64, 0.0f64);
    for b in [1usize, 2, 4] {
        for e in [0.5, 1.0, 3.0] {
            let model = DispersionModel::constant(b, e)?;
            for frac in [0.05, 0.3, 0.7, 0.95] {
                let u = -frac * 2.0 * e / b as f64;
                let bc = solve_beta_c(&model, u, cfg)?;
                worst_bc = worst_bc.max(rel_err(bc, constant_model_beta_c(b, e, u)?));
                for i in 1..20 {
                    let beta = bc * i as f64 / 20.0;
                    let tau = solve_tau(&model, u, beta, cfg)?;
                    worst_tau = worst_tau.max((tau - constant_model_tau(b, e, u, beta)?).abs());
                }
            }
        }
    }
    Ok((
        worst_bc <= 1e-10 && worst_tau <= 1e-10,
        format!("β_c deviation {worst_bc:.3e}, τ deviation {worst_tau:.3e}"),
    ))
}

fn convexity(cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut min_second = f64::INFINITY;
    for (b, e) in [(1usize, 1.0), (2, 0.5), (4, 2.0)] {
        let model = DispersionModel::constant(b, e)?;
        let u_max = e / (2f64.sinh() * b as f64);
        for u in [-u_max, -0.5 * u_max, -0.1 * u_max] {
            let bc = solve_beta_c(&model, u, cfg)?;
            for i in 0..100 {
                let beta = bc * (0.01 + 0.98 * i as f64 / 99.0);
                min_second = min_second.min(tau_second(&model, u, beta, cfg)?);
            }
        }
    }
    Ok((min_second > 0.0, format!("min τ'' = {min_second:.6e}")))
}

fn random_model(r: &mut ChaCha8Rng) -> Result<DispersionModel> {
    match r.random_range(0..3) {
        0 => DispersionModel::constant(r.random_range(1..5), r.random_range(0.5..3.0)),
        1 => {
            let b = r.random_range(2..9);
            let e_min = r.random_range(0.5..2.0);
            DispersionModel::multi_orbital(
                b,
                r.random_range(1..b),
                e_min,
                e_min * r.random_range(1.0..10.0),
            )
        }
        _ => DispersionModel::cosine_1d(r.random_range(0.0..3.0), r.random_range(0.5..2.0)),
    }
}

fn gap_equation(cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut r = rng(6);
    let tol = cfg.root.classification_tol;
    let (mut ok, mut n_plus, mut worst) = (true, 0, 0.0f64);
    for _ in 0..100 {
        let model = random_model(&mut r)?;
        let u = -r.random_range(0.05..0.95) * 2.0 * model.e_min() / model.orbitals() as f64;
        let bc = solve_beta_c(&model, u, cfg)?;
        let beta = bc * r.random_range(0.02..1.2);
        // Half the samples near t = 2π, where the ordered region is widest.
        let t = if r.random_bool(0.5) {
            r.random_range(2.0 * PI - 1.0..2.0 * PI + 1.0)
        } else {
            r.random_range(0.0..4.0 * PI)
        };
        let g0 = g(&model, u, beta, t, 0.0, cfg)?;
        let res = solve_delta(&model, u, beta, t, cfg)?;
        ok &= (res.regime == Regime::QPlus) == (g0 > tol);
        if res.regime != Regime::QPlus {
            continue;
        }
        n_plus += 1;
        let d = res.delta;
        let at_root = g(&model, u, beta, t, d, cfg)?;
        worst = worst.max(at_root.abs());
        // Strictly decreasing through the root: positive before, negative after.
        let mut prev = g0;
        for j in 1..=10 {
            let z = 2.0 * d * j as f64 / 11.0;
            let v = g(&model, u, beta, t, z, cfg)?;
            ok &= v < prev && (z < d) == (v > 0.0);
            prev = v;
        }
    }
    ok &= worst <= 1e-10 && n_plus > 0;
    Ok((
        ok,
        format!("{n_plus} ordered points, max |g(Δ)| = {worst:.3e}"),
    ))
}

fn beta_c_bound(cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut cases = Vec::new();
    for e_max in [1.0, 2.0, 6.0, 7.0, 9.0] {
        cases.push((reference_model(e_max)?, REFERENCE_U));
    }
    for (b, e) in [(1usize, 1.0), (2, 0.5), (4, 3.0)] {
        cases.push((DispersionModel::constant(b, e)?, -0.5 * e / b as f64));
    }
    for t_hop in [0.0, 0.5, 2.0] {
        cases.push((DispersionModel::cosine_1d(t_hop, 1.0)?, -1.0));
    }
    let fractions = MeasureFractions::new(0.2, 0.6)?;
    let bump = build_bump_dispersion(1, fractions, 1.0, 2.0, BzGeometry::canonical(1)?)?;
    cases.push((bump, -0.8));
    let mut min_margin = f64::INFINITY;
    for (model, u) in &cases {
        let bc = solve_beta_c(model, *u, cfg)?;
        min_margin = min_margin.min(beta_c_upper_bound(model, *u)? + 1e-10 - bc);
    }
    Ok((
        min_margin >= 0.0,
        format!(
            "{} configurations, min margin {min_margin:.3e}",
            cases.len()
        ),
    ))
}

fn free_energy_jumps(cfg: &SolverConfig) -> Result<(bool, String)> {
    let models = [
        (DispersionModel::constant(2, 1.5)?, -0.4),
        (reference_model(7.0)?, REFERENCE_U),
        (DispersionModel::cosine_1d(0.5, 1.0)?, -1.0),
    ];
    let (mut ok, mut worst_c1, mut worst_crit) = (true, 0.0f64, 0.0f64);
    let (mut worst_rel, mut worst_rel_beta) = (0.0f64, 0.0f64);
    for (model, u) in &models {
        let bc = solve_beta_c(model, *u, cfg)?;
        for i in 0..10 {
            let beta = bc * (0.05 + 0.9 * i as f64 / 9.0);
            let rep = second_derivative_jumps(model, *u, beta, cfg)?;
            worst_c1 = worst_c1.max(rep.c1_gap_dbeta).max(rep.c1_gap_dt);
            let rel_t =
                (rep.jump_d2f_dt2 - rep.analytic_jump_dt2).abs() / rep.analytic_jump_dt2.abs();
            let rel_b = (rep.jump_d2f_dbeta2 - rep.analytic_jump_dbeta2).abs()
                / rep.analytic_jump_dbeta2.abs();
            worst_rel = worst_rel.max(rel_t);
            worst_rel_beta = worst_rel_beta.max(rel_b);
            ok &= rep.jump_d2f_dt2 < 0.0 && rep.analytic_jump_dt2 < 0.0;
        }
        let crit = jump_report_at(model, *u, bc, 2.0 * PI, cfg)?;
        worst_crit = worst_crit.max(crit.jump_d2f_dt2.abs());
    }
    ok &= worst_c1 <= 1e-6 && worst_rel <= 1e-2 && worst_rel_beta <= 1e-2 && worst_crit < 1e-6;
    Ok((
        ok,
        format!(
            "C¹ gap {worst_c1:.3e}, jump rel. error ∂²F/∂t² {worst_rel:.3e}, \
             ∂²F/∂β² {worst_rel_beta:.3e}, jump at (β_c, 2π) {worst_crit:.3e}"
        ),
    ))
}

fn central<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn derivatives(cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut r = rng(9);
    let (mut worst_g, mut worst_tp, mut worst_ts) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let model = if r.random_bool(0.5) {
            reference_model(r.random_range(1.0..10.0))?
        } else {
            DispersionModel::cosine_1d(r.random_range(0.0..2.0), 1.0)?
        };
        let u = REFERENCE_U;
        let x = r.random_range(0.05..1.0);
        let t = r.random_range(0.1..4.0 * PI - 0.1);
        let z = r.random_range(0.1..2.0);
        let h = 1e-5;
        let fx = central(|v| g(&model, u, v, t, z, cfg), x, h * x)?;
        let ft = central(|v| g(&model, u, x, v, z, cfg), t, h)?;
        let fz = central(|v| g(&model, u, x, t, v, cfg), z, h * z)?;
        worst_g = worst_g
            .max(rel_err(dg_dx(&model, u, x, t, z, cfg)?, fx))
            .max(rel_err(dg_dt(&model, u, x, t, z, cfg)?, ft))
            .max(rel_err(dg_dz(&model, u, x, t, z, cfg)?, fz));

        let bc = solve_beta_c(&model, u, cfg)?;
        let beta = bc * r.random_range(0.05..0.95);
        let hb = 1e-5 * bc;
        let tp = tau_prime(&model, u, beta, cfg)?;
        worst_tp = worst_tp.max(rel_err(
            tp,
            central(|v| solve_tau(&model, u, v, cfg), beta, hb)?,
        ));
        let ts = tau_second(&model, u, beta, cfg)?;
        worst_ts = worst_ts.max(rel_err(
            ts,
            central(|v| tau_prime(&model, u, v, cfg), beta, hb)?,
        ));
    }
    Ok((
        worst_g <= 1e-6 && worst_tp <= 1e-6 && worst_ts <= 1e-4,
        format!("g partials {worst_g:.3e}, τ' {worst_tp:.3e}, τ'' {worst_ts:.3e}"),
    ))
}

fn shape_constants(_cfg: &SolverConfig) -> Result<(bool, String)> {
    let c = AlgebraicConstants::new();
    let threshold = 3.0 - 2.0 * 2f64.sqrt();
    let errs = [
        (c.threshold * c.threshold - c.eta0).abs(),
        (c.a0 * threshold - 1.0).abs(),
        (w_tilde(c.a0, -1.0, c.eta0)? - threshold).abs(),
        w_tilde(1.0, -1.0, 0.3)?.abs(),
        w_tilde(1.0, -1.0, 0.9)?.abs(),
        (a_plus(c.eta0)? - c.a0).abs(),
        (a_minus(c.eta0)? - c.a0).abs(),
        (a_hat(c.eta0)? - c.a0).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let mut monotone = true;
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 1..=100 {
        let lv = w_levels(c.eta0 * i as f64 / 100.0)?;
        monotone &= lv.0 > prev.0 && lv.1 > prev.1;
        prev = lv;
    }
    Ok((
        worst <= 1e-12 && monotone,
        format!("max identity error {worst:.3e}, levels increasing: {monotone}"),
    ))
}

fn order_parameters(cfg: &SolverConfig) -> Result<(bool, String)> {
    let models = [
        (DispersionModel::constant(1, 1.0)?, -1.0),
        (DispersionModel::cosine_1d(0.5, 1.0)?, -1.0),
        (reference_model(7.0)?, REFERENCE_U),
    ];
    let (mut ok, mut worst_trace, mut worst_odlro) = (true, 0.0f64, 0.0f64);
    for (model, u) in &models {
        let bc = solve_beta_c(model, *u, cfg)?;
        let b = model.orbitals();
        // Disordered: high temperature at any field, and t = π below β_c.
        for (beta, t) in [(1.5 * bc, 2.0 * PI), (0.5 * bc, PI), (0.3 * bc, 0.5)] {
            let theta = t / beta;
            ok &= ssb_order(model, *u, beta, theta, 1, cfg)? == 0.0;
            let (odlro, density) = odlro_and_density(model, *u, beta, theta, 1, b, cfg)?;
            ok &= odlro == 0.0 && density == 0.0;
        }
        for frac in [0.2, 0.5, 0.9] {
            let beta = frac * bc;
            let theta = 2.0 * PI / beta;
            let trace = gap_trace_sum(model, *u, beta, theta, cfg)?;
            worst_trace = worst_trace.max((trace - 1.0 / -u).abs());
            ok &= ssb_order(model, *u, beta, theta, 1, cfg)? != 0.0;
            if b == 1 {
                let (odlro, density) = odlro_and_density(model, *u, beta, theta, 1, 1, cfg)?;
                worst_odlro = worst_odlro.max((odlro - density).abs() / density);
            }
        }
    }
    ok &= worst_trace <= 1e-9 && worst_odlro <= 1e-9;
    Ok((
        ok,
        format!("trace identity {worst_trace:.3e}, ODLRO vs Δ²/U² {worst_odlro:.3e}"),
    ))
}

fn bump_fractions(_cfg: &SolverConfig) -> Result<(bool, String)> {
    let mut r = rng(12);
    let dim = 2;
    let m = 1024;
    let tol = 2.0 * dim as f64 / m as f64;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let s = r.random_range(0.05..0.6);
        let t = r.random_range(s + 0.05..0.95);
        let model = build_bump_dispersion(
            2,
            MeasureFractions::new(s, t)?,
            1.0,
            3.0,
            BzGeometry::canonical(dim)?,
        )?;
        let (top, bottom) = level_set_fractions(&model, m);
        worst = worst.max((top - s).abs()).max((bottom - (1.0 - t)).abs());
    }
    Ok((
        worst <= tol,
        format!("max fraction deviation {worst:.3e} (grid resolution {tol:.3e})"),
    ))
}
