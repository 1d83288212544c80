//! The four commands. Each returns its result as data; [`crate::run`] does
//! the output.

use std::io::Write;

use bcsphase_core::boundary::{trace_curve, LocalMinimum, MinimumStatus};
use bcsphase_core::free_energy::free_energy_point;
use bcsphase_core::gap::{beta_c_upper_bound, check_admissible, solve_beta_c, solve_delta};
use bcsphase_core::verify::{run_suites, CheckOutcome};
use bcsphase_core::{BoundaryCurve, Regime, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Every float in CSV output carries 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub delta: f64,
    pub regime: Regime,
    pub residual: f64,
    pub iterations: usize,
    pub beta: f64,
    pub t: f64,
}

pub fn cmd_gap(cfg: &RunConfig) -> Result<GapReport, CliError> {
    let block = cfg
        .gap
        .ok_or_else(|| CliError::Config("missing \"gap\" block".into()))?;
    let solver = cfg.solver()?;
    let model = cfg.admissible_model()?;
    let res = solve_delta(&model, cfg.coupling, block.beta, block.t, &solver)?;
    Ok(GapReport {
        delta: res.delta,
        regime: res.regime,
        residual: res.residual,
        iterations: res.iterations,
        beta: block.beta,
        t: block.t,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauCurveSummary {
    pub beta_c: f64,
    pub minima_count: usize,
    pub minima: Vec<LocalMinimum>,
    pub ambiguous: usize,
    pub samples: usize,
}

impl TauCurveSummary {
    pub fn of(curve: &BoundaryCurve) -> Self {
        Self {
            beta_c: curve.beta_c,
            minima_count: curve.minima_count(),
            minima: curve.local_minima.clone(),
            ambiguous: curve
                .local_minima
                .iter()
                .filter(|m| m.status == MinimumStatus::Ambiguous)
                .count(),
            samples: curve.samples.len(),
        }
    }
}

pub fn cmd_tau_curve(cfg: &RunConfig) -> Result<BoundaryCurve, CliError> {
    let block = cfg.tau_curve.unwrap_or_default();
    let solver = cfg.solver()?;
    let model = cfg.admissible_model()?;
    Ok(trace_curve(&model, cfg.coupling, &block.grid(), &solver)?)
}

pub fn write_tau_csv<W: Write>(curve: &BoundaryCurve, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "tau", "tau_prime", "tau_second", "flag"])?;
    for s in &curve.samples {
        w.write_record([
            fmt_f64(s.beta),
            fmt_f64(s.tau),
            fmt_f64(s.tau_prime),
            s.tau_second.map(fmt_f64).unwrap_or_default(),
            s.flag.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    pub beta: f64,
    pub t: f64,
    pub regime: Regime,
    pub delta: f64,
    pub f: f64,
}

/// Rows ordered by `β` first, then `t`.
pub fn cmd_phase_diagram(cfg: &RunConfig) -> Result<Vec<PhaseRow>, CliError> {
    let block = cfg
        .phase_diagram
        .ok_or_else(|| CliError::Config("missing \"phase_diagram\" block".into()))?;
    let solver = cfg.solver()?;
    let model = cfg.admissible_model()?;
    let betas = block.beta.values();
    let ts = block.t.values();
    if betas.is_empty() || ts.is_empty() {
        return Err(CliError::Config("phase diagram grid is empty".into()));
    }
    if betas.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(CliError::Config("phase diagram needs β > 0".into()));
    }
    let points: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| ts.iter().map(move |&t| (b, t)))
        .collect();
    points
        .par_iter()
        .map(|&(beta, t)| {
            let p = free_energy_point(&model, cfg.coupling, beta, t, &solver)?;
            Ok(PhaseRow {
                beta,
                t,
                regime: p.regime,
                delta: p.delta,
                f: p.f,
            })
        })
        .collect()
}

pub fn write_phase_csv<W: Write>(rows: &[PhaseRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "t", "regime", "delta", "F"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.beta),
            fmt_f64(r.t),
            r.regime.as_str().to_string(),
            fmt_f64(r.delta),
            fmt_f64(r.f),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

fn config_checks(cfg: &RunConfig, solver: &SolverConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let model = match cfg.model.build() {
        Ok(m) => m,
        Err(e) => {
            out.push(outcome("config_model", false, e.to_string()));
            return out;
        }
    };
    match check_admissible(&model, cfg.coupling) {
        Ok(()) => out.push(outcome("config_admissibility", true, "admissible".into())),
        Err(e) => {
            out.push(outcome("config_admissibility", false, e.to_string()));
            return out;
        }
    }
    let bound = solve_beta_c(&model, cfg.coupling, solver)
        .and_then(|bc| Ok((bc, beta_c_upper_bound(&model, cfg.coupling)?)));
    out.push(match bound {
        Ok((bc, ub)) => outcome(
            "config_beta_c_bound",
            bc <= ub + 1e-10,
            format!("β_c = {bc:.12}, bound {ub:.12}"),
        ),
        Err(e) => outcome("config_beta_c_bound", false, e.to_string()),
    });
    out
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        id: 0,
        name,
        passed,
        detail,
        seconds: 0.0,
    }
}

/// Runs the verification suites, plus admissibility and critical
/// temperature checks for `cfg` when given. `filter` keeps checks whose
/// name contains it.
pub fn cmd_verify(cfg: Option<&RunConfig>, filter: Option<&str>) -> Result<VerifyReport, CliError> {
    let solver = match cfg {
        Some(c) => c.solver()?,
        None => SolverConfig::default(),
    };
    let mut checks = Vec::new();
    if let Some(c) = cfg {
        checks.extend(
            config_checks(c, &solver)
                .into_iter()
                .filter(|o| filter.is_none_or(|f| o.name.contains(f))),
        );
    }
    checks.extend(run_suites(filter, &solver));
    if checks.is_empty() {
        return Err(CliError::Config(format!(
            "no check matches filter {:?}",
            filter.unwrap_or_default()
        )));
    }
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
