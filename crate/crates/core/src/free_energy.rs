//! Free energy density `F(β, t)`, its derivatives and jump structure across
//! the transition set, and the order parameters.
//!
//! ```text
//! F(β, t)    = Δ²/|U| − (1/β) D_d ∫ Tr log(2cos(t/2)e^{−βE} + e^{β(s−E)} + e^{−β(s+E)})
//! F̂(x, t, z) = z²/|U| − (1/x) D_d ∫ Tr log(cos(t/2) + cosh(x s))
//! ```
//!
//! with `s = √(E² + Δ²)` (resp. `√(E² + z²)`) and `Δ = Δ(β, t)`. The two
//! differ by `D_d ∫ Tr E − (b/β) log 2`, and `∂F̂/∂z = −z g`, so along the
//! solution of the gap equation only the explicit `x` and `t` dependence of
//! `F̂` contributes to the first derivatives of `F`.

use serde::{Deserialize, Serialize};

use crate::bzquad::{channel_integral, trace_integral, trace_integral_vec};
use crate::config::SolverConfig;
use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::gap::{self, dg_dx_dt, dg_dz_reduced, solve_delta, solve_tau, GapResult, Regime};
use crate::kernel::{self, Phase};

/// Free energy and its first derivatives at one `(β, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyPoint {
    pub f: f64,
    pub df_dbeta: f64,
    pub df_dt: f64,
    pub regime: Regime,
    pub delta: f64,
}

/// Second-derivative jumps of `F` at a point `(β₀, t₀)` of the transition
/// set. Every jump is the limit from the ordered side minus the limit from
/// the disordered side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub beta0: f64,
    pub t0: f64,
    /// One-sided finite-difference estimate of the `∂²F/∂β²` jump.
    pub jump_d2f_dbeta2: f64,
    /// One-sided finite-difference estimate of the `∂²F/∂t²` jump.
    pub jump_d2f_dt2: f64,
    /// `(∂g/∂x)² / ρ` with `ρ = lim (1/Δ) ∂g/∂z < 0`.
    pub analytic_jump_dbeta2: f64,
    /// `(∂g/∂t)² / ρ`.
    pub analytic_jump_dt2: f64,
    /// `|lim₊ ∂F/∂β − lim₋ ∂F/∂β|`, extrapolated from each side.
    pub c1_gap_dbeta: f64,
    /// `|lim₊ ∂F/∂t − lim₋ ∂F/∂t|`.
    pub c1_gap_dt: f64,
    /// `dτ/dβ` vanishes here (to `1e-6`). Whether the boundary is then
    /// monotone through `β₀` is left unclassified.
    pub stationary_boundary: bool,
}

/// `β(s − E) + log((1 − e^{−βs})² + 2(1 + cos(t/2)) e^{−βs})`, the log
/// argument of `F` rearranged so that nothing overflows.
fn log_partition_term(beta: f64, l: f64, delta: f64, ph: &Phase) -> f64 {
    let s = l.hypot(delta);
    let e = (-beta * s).exp();
    let em = -(-beta * s).exp_m1();
    let arg = em * em + 2.0 * ph.p * e;
    if arg > 0.0 {
        beta * (s - l) + arg.ln()
    } else {
        f64::NAN
    }
}

fn free_energy_with_delta(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let ph = Phase::new(t);
    let integral = trace_integral(
        model,
        |l| log_partition_term(beta, l, delta, &ph),
        &cfg.quad,
    )?;
    if !integral.is_finite() {
        return Err(Error::LogArgument(0.0));
    }
    Ok(delta * delta / -u - integral / beta)
}

/// `F(β, t)`, solving the gap equation for `Δ` first.
pub fn free_energy(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let gap = solve_delta(model, u, beta, t, cfg)?;
    free_energy_with_delta(model, u, beta, t, gap.delta, cfg)
}

/// `F̂(x, t, z)`.
pub fn f_hat(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    gap::g(model, u, x, t, z, cfg)?;
    let ph = Phase::new(t);
    let integral = trace_integral(
        model,
        |l| kernel::log_q(x * l.hypot(z), &ph).unwrap_or(f64::NAN),
        &cfg.quad,
    )?;
    if !integral.is_finite() {
        return Err(Error::LogArgument(0.0));
    }
    Ok(z * z / -u - integral / x)
}

/// `(∂F̂/∂x, ∂F̂/∂t, ∂F̂/∂z)` at `(x, t, z)`.
pub fn f_hat_gradient(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64, f64)> {
    let gz = gap::g(model, u, x, t, z, cfg)?;
    let ph = Phase::new(t);
    let [logs, slope, inv] = trace_integral_vec(
        model,
        |l| {
            let s = l.hypot(z);
            let y = x * s;
            [
                kernel::log_q(y, &ph).unwrap_or(f64::NAN),
                s * kernel::sinh_q(y, &ph),
                kernel::inv_q(y, &ph),
            ]
        },
        &cfg.quad,
    )?;
    if !logs.is_finite() {
        return Err(Error::LogArgument(0.0));
    }
    Ok((logs / (x * x) - slope / x, 0.5 * ph.sin / x * inv, -z * gz))
}

fn first_derivatives_with_delta(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let (fx, ft, _) = f_hat_gradient(model, u, beta, t, delta, cfg)?;
    let orbitals = trace_integral(model, |_| 1.0, &cfg.quad)?;
    Ok((fx + orbitals * std::f64::consts::LN_2 / (beta * beta), ft))
}

/// `(∂F/∂β, ∂F/∂t)`.
pub fn first_derivatives(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let gap = solve_delta(model, u, beta, t, cfg)?;
    first_derivatives_with_delta(model, u, beta, t, gap.delta, cfg)
}

/// `F` with its first derivatives, regime and `Δ`.
pub fn free_energy_point(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    cfg: &SolverConfig,
) -> Result<FreeEnergyPoint> {
    let gap = solve_delta(model, u, beta, t, cfg)?;
    let f = free_energy_with_delta(model, u, beta, t, gap.delta, cfg)?;
    let (df_dbeta, df_dt) = first_derivatives_with_delta(model, u, beta, t, gap.delta, cfg)?;
    Ok(FreeEnergyPoint {
        f,
        df_dbeta,
        df_dt,
        regime: gap.regime,
        delta: gap.delta,
    })
}

/// Step used by the one-sided second-derivative stencils.
fn jump_step(beta0: f64, axis: Axis) -> f64 {
    match axis {
        Axis::Beta => 1e-4 * beta0,
        Axis::Time => 1e-4,
    }
}

#[derive(Clone, Copy)]
enum Axis {
    Beta,
    Time,
}

/// Jump of one second derivative across the boundary, from three-point
/// one-sided stencils on analytic first derivatives, plus the gap between
/// the two extrapolated one-sided first-derivative limits.
///
/// On the ordered side the stencil is applied to `F'(Δ) − F'(0)`: the
/// `Δ = 0` expression is the disordered-side formula continued smoothly
/// across the boundary, so the derivative of the difference at the boundary
/// is exactly the jump, while the (typically much larger) smooth part
/// cancels point by point. When neither side is ordered, the raw
/// forward-minus-backward difference of one-sided second derivatives is
/// reported.
fn one_sided_jump(
    model: &DispersionModel,
    u: f64,
    beta0: f64,
    t0: f64,
    axis: Axis,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let point = |step: f64| match axis {
        Axis::Beta => (beta0 + step, t0),
        Axis::Time => (beta0, t0 + step),
    };
    let pick = |d: (f64, f64)| match axis {
        Axis::Beta => d.0,
        Axis::Time => d.1,
    };
    let at = |step: f64| -> Result<f64> {
        let (b, t) = point(step);
        Ok(pick(first_derivatives(model, u, b, t, cfg)?))
    };
    // F'(Δ) − F'(0) at an offset, together with the regime there.
    let excess = |step: f64| -> Result<(f64, Regime)> {
        let (b, t) = point(step);
        let gap = solve_delta(model, u, b, t, cfg)?;
        if gap.delta == 0.0 {
            return Ok((0.0, gap.regime));
        }
        let with = pick(first_derivatives_with_delta(
            model, u, b, t, gap.delta, cfg,
        )?);
        let without = pick(first_derivatives_with_delta(model, u, b, t, 0.0, cfg)?);
        Ok((with - without, gap.regime))
    };

    let h = jump_step(beta0, axis);
    let (d_fwd, r_fwd) = excess(h)?;
    let (d_bwd, r_bwd) = excess(-h)?;
    let ordered = if r_fwd == Regime::QPlus {
        Some((1.0, d_fwd))
    } else if r_bwd == Regime::QPlus {
        Some((-1.0, d_bwd))
    } else {
        None
    };
    match ordered {
        Some((sign, d1)) => {
            let d0 = excess(0.0)?.0;
            let d2 = excess(2.0 * sign * h)?.0;
            let jump = sign * (-3.0 * d0 + 4.0 * d1 - d2) / (2.0 * h);
            // The disordered side equals the continued branch, so the gap
            // between the one-sided limits is the limit of the excess,
            // extrapolated quadratically from points clear of the band
            // classified as the boundary itself.
            let mut d = h / 256.0;
            while d < h && excess(sign * d)?.1 != Regime::QPlus {
                d *= 2.0;
            }
            let e1 = excess(sign * d)?.0;
            let e2 = excess(2.0 * sign * d)?.0;
            let e3 = excess(3.0 * sign * d)?.0;
            Ok((jump, (3.0 * e1 - 3.0 * e2 + e3).abs()))
        }
        None => {
            let f0 = at(0.0)?;
            let forward = (-3.0 * f0 + 4.0 * at(h)? - at(2.0 * h)?) / (2.0 * h);
            let backward = (3.0 * f0 - 4.0 * at(-h)? + at(-2.0 * h)?) / (2.0 * h);
            let eps = 1e-3 * h;
            let lim_fwd = 2.0 * at(eps)? - at(2.0 * eps)?;
            let lim_bwd = 2.0 * at(-eps)? - at(-2.0 * eps)?;
            Ok((forward - backward, (lim_fwd - lim_bwd).abs()))
        }
    }
}

/// Jump report at an arbitrary point `(β₀, t₀)` of the transition set.
pub fn jump_report_at(
    model: &DispersionModel,
    u: f64,
    beta0: f64,
    t0: f64,
    cfg: &SolverConfig,
) -> Result<JumpReport> {
    let g0 = gap::g(model, u, beta0, t0, 0.0, cfg)?;
    if g0.abs() > 1e3 * cfg.root.classification_tol {
        return Err(Error::InvalidParameter(format!(
            "({beta0}, {t0}) is not on the transition set: g = {g0}"
        )));
    }
    let (gx, gt) = dg_dx_dt(model, u, beta0, t0, 0.0, cfg)?;
    let density = dg_dz_reduced(model, u, beta0, t0, 0.0, cfg)?;
    let (jump_t, c1_t) = one_sided_jump(model, u, beta0, t0, Axis::Time, cfg)?;
    let (jump_b, c1_b) = one_sided_jump(model, u, beta0, t0, Axis::Beta, cfg)?;
    let stationary = gt != 0.0 && (gx / gt).abs() < 1e-6;
    Ok(JumpReport {
        beta0,
        t0,
        jump_d2f_dbeta2: jump_b,
        jump_d2f_dt2: jump_t,
        analytic_jump_dbeta2: gx * gx / density,
        analytic_jump_dt2: gt * gt / density,
        c1_gap_dbeta: c1_b,
        c1_gap_dt: c1_t,
        stationary_boundary: stationary,
    })
}

/// Jump report at the boundary point `(β₀, τ(β₀))`, `0 < β₀ < β_c`.
pub fn second_derivative_jumps(
    model: &DispersionModel,
    u: f64,
    beta0: f64,
    cfg: &SolverConfig,
) -> Result<JumpReport> {
    let tau = solve_tau(model, u, beta0, cfg)?;
    jump_report_at(model, u, beta0, tau, cfg)
}

fn check_orbital(model: &DispersionModel, rho: usize) -> Result<usize> {
    let b = model.orbitals();
    if rho == 0 || rho > b {
        return Err(Error::OutOfRange {
            what: "orbital index",
            value: rho as f64,
            lo: 1.0,
            hi: b as f64,
        });
    }
    Ok(rho - 1)
}

/// `(D_d/2) ∫ G(k)(ρ, ρ) dk` with
/// `G = sinh(β s)/((cos(βθ/2) + cosh(β s)) s)`, `s = √(E² + Δ²)`.
fn g_kernel_channel(
    model: &DispersionModel,
    rho: usize,
    beta: f64,
    t: f64,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let ph = Phase::new(t);
    let v = channel_integral(
        model,
        rho,
        |l| {
            let s = l.hypot(delta);
            kernel::sinh_q(beta * s, &ph) / s
        },
        &cfg.quad,
    )?;
    Ok(0.5 * v)
}

/// Spontaneous symmetry breaking `−(Δ D_d/2) ∫ G(k)(ρ̂, ρ̂) dk` for the
/// orbital `rho` (one-based) at field strength `θ`.
pub fn ssb_order(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    theta: f64,
    rho: usize,
    cfg: &SolverConfig,
) -> Result<f64> {
    let rho = check_orbital(model, rho)?;
    let t = beta * theta;
    let gap = solve_delta(model, u, beta, t, cfg)?;
    if gap.delta == 0.0 {
        return Ok(0.0);
    }
    Ok(-gap.delta * g_kernel_channel(model, rho, beta, t, gap.delta, cfg)?)
}

/// Off-diagonal long-range order `Δ² Π_{ρ ∈ (ρ̂, η̂)} (D_d/2) ∫ G(k)(ρ, ρ)`
/// and the Cooper pair density `Δ²/U²`. Orbitals are one-based.
///
/// Fails with [`Error::BoundaryPoint`] on the transition set, where the
/// limit statement is different.
pub fn odlro_and_density(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    theta: f64,
    rho: usize,
    eta: usize,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let rho = check_orbital(model, rho)?;
    let eta = check_orbital(model, eta)?;
    let t = beta * theta;
    let gap: GapResult = solve_delta(model, u, beta, t, cfg)?;
    match gap.regime {
        Regime::QZero => Err(Error::BoundaryPoint(gap.residual)),
        Regime::QMinus => Ok((0.0, 0.0)),
        Regime::QPlus => {
            let d = gap.delta;
            let a = g_kernel_channel(model, rho, beta, t, d, cfg)?;
            let b = if eta == rho {
                a
            } else {
                g_kernel_channel(model, eta, beta, t, d, cfg)?
            };
            Ok((d * d * a * b, d * d / (u * u)))
        }
    }
}

/// `Σ_ρ (D_d/2) ∫ G(k)(ρ, ρ) dk`, which equals `1/|U|` whenever `Δ > 0`.
pub fn gap_trace_sum(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    theta: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let t = beta * theta;
    let gap = solve_delta(model, u, beta, t, cfg)?;
    let ph = Phase::new(t);
    let v = trace_integral(
        model,
        |l| {
            let s = l.hypot(gap.delta);
            kernel::sinh_q(beta * s, &ph) / s
        },
        &cfg.quad,
    )?;
    Ok(0.5 * v)
}
