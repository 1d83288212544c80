//! The gap function `g(x, t, z)`, its partial derivatives, and the solvers
//! for `Δ`, `β_c` and the boundary `τ(β)`.
//!
//! ```text
//! g(x, t, z) = −2/|U| + D_d ∫ Tr[ sinh(x s) / ((cos(t/2) + cosh(x s)) s) ] dk,
//! s = √(E(k)² + z²)
//! ```
//!
//! `g` depends on `t` only through `cos(t/2)`, so it is `4π`-periodic and
//! symmetric about `t = 2π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bzquad::{trace_integral, trace_integral_vec};
use crate::closed_form::artanh;
use crate::config::SolverConfig;
use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::kernel::{self, Phase};
use crate::roots::find_root;

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// Coupling, inverse temperature and time variable `t = βθ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub u: f64,
    pub beta: f64,
    pub t: f64,
}

impl ModelParams {
    pub fn new(u: f64, beta: f64, t: f64) -> Result<Self> {
        check_coupling(u)?;
        check_x(beta)?;
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t must be finite, got {t}"
            )));
        }
        Ok(Self { u, beta, t })
    }

    /// Parameters from the imaginary field strength `θ`, using `t = βθ`.
    pub fn from_theta(u: f64, beta: f64, theta: f64) -> Result<Self> {
        Self::new(u, beta, beta * theta)
    }
}

/// Sign of `g(β, t, 0)`: ordered phase, transition set or disordered phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    QPlus,
    QZero,
    QMinus,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::QPlus => "QPlus",
            Regime::QZero => "QZero",
            Regime::QMinus => "QMinus",
        }
    }
}

/// Solution of the gap equation at one `(β, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub delta: f64,
    pub regime: Regime,
    /// `g(β, t, Δ)`.
    pub residual: f64,
    pub iterations: usize,
}

/// Branch data of [`canonical_time`]: `t = 4π·periods ± t̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeBranch {
    pub periods: i64,
    pub reflected: bool,
}

/// Reduces `t` modulo `4π` and reflects about `2π`, giving the
/// representative `t̂ ∈ [0, 2π]` with the same `cos(t/2)`.
pub fn canonical_time(t: f64) -> (f64, TimeBranch) {
    let periods = (t / FOUR_PI).floor();
    let mut r = t - periods * FOUR_PI;
    let mut periods = periods as i64;
    if r >= FOUR_PI {
        r -= FOUR_PI;
        periods += 1;
    }
    if r < 0.0 {
        r = 0.0;
    }
    if r > TWO_PI {
        (
            FOUR_PI - r,
            TimeBranch {
                periods: periods + 1,
                reflected: true,
            },
        )
    } else {
        (
            r,
            TimeBranch {
                periods,
                reflected: false,
            },
        )
    }
}

pub(crate) fn check_coupling(u: f64) -> Result<()> {
    if u < 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "coupling must be finite and negative, got {u}"
        )))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "inverse temperature must be finite and positive, got {x}"
        )))
    }
}

fn check_args(u: f64, x: f64, t: f64, z: f64) -> Result<()> {
    check_coupling(u)?;
    check_x(x)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite, got {t}"
        )));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "z must be finite and non-negative, got {z}"
        )));
    }
    Ok(())
}

/// `|U| < 2 e_min / b`, required for `β_c` and `τ` to exist.
pub fn check_admissible(model: &DispersionModel, u: f64) -> Result<()> {
    check_coupling(u)?;
    let limit = 2.0 * model.e_min() / model.orbitals() as f64;
    if -u < limit {
        Ok(())
    } else {
        Err(Error::Inadmissible { coupling: u, limit })
    }
}

/// `g(x, t, z)`.
pub fn g(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    let integral = trace_integral(
        model,
        |l| {
            let s = l.hypot(z);
            kernel::sinh_q(x * s, &ph) / s
        },
        &cfg.quad,
    )?;
    Ok(2.0 / u + integral)
}

/// `∂g/∂x`.
pub fn dg_dx(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    trace_integral(model, |l| kernel::h_prime(x * l.hypot(z), &ph), &cfg.quad)
}

/// `∂g/∂t`. Vanishes identically where `sin(t/2) = 0`.
pub fn dg_dt(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    if ph.sin == 0.0 {
        return Ok(0.0);
    }
    let integral = trace_integral(
        model,
        |l| {
            let s = l.hypot(z);
            kernel::sinh_q2(x * s, &ph) / s
        },
        &cfg.quad,
    )?;
    Ok(0.5 * ph.sin * integral)
}

/// `(1/z) ∂g/∂z`, including its finite limit at `z = 0`,
/// `D_d ∫ Tr[(x h'(x|E|) − h(x|E|)/|E|) / E²]` with `h(y) = sinh y/(c + cosh y)`.
/// This limit is negative.
pub fn dg_dz_reduced(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    trace_integral(
        model,
        |l| {
            let s2 = l * l + z * z;
            let s = s2.sqrt();
            let y = x * s;
            (x * kernel::h_prime(y, &ph) - kernel::sinh_q(y, &ph) / s) / s2
        },
        &cfg.quad,
    )
}

/// `∂g/∂z` itself, which vanishes at `z = 0` by evenness in `z`.
pub fn dg_dz_raw(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    if z == 0.0 {
        check_args(u, x, t, z)?;
        return Ok(0.0);
    }
    Ok(z * dg_dz_reduced(model, u, x, t, z, cfg)?)
}

/// `∂g/∂z` for `z > 0`; at `z = 0` returns the limiting density
/// `lim (1/z) ∂g/∂z` from [`dg_dz_reduced`] instead of the raw value `0`.
/// Use [`dg_dz_raw`] for the plain derivative.
pub fn dg_dz(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    if z == 0.0 {
        dg_dz_reduced(model, u, x, t, z, cfg)
    } else {
        dg_dz_raw(model, u, x, t, z, cfg)
    }
}

/// First partial derivatives `(∂g/∂x, ∂g/∂t)` on one quadrature grid.
pub fn dg_dx_dt(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    let [gx, gt] = trace_integral_vec(
        model,
        |l| {
            let s = l.hypot(z);
            let y = x * s;
            [kernel::h_prime(y, &ph), kernel::sinh_q2(y, &ph) / s]
        },
        &cfg.quad,
    )?;
    Ok((gx, 0.5 * ph.sin * gt))
}

/// Second partial derivatives of `g` in `(x, t)` at fixed `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondPartials {
    pub gx: f64,
    pub gt: f64,
    pub gxx: f64,
    pub gxt: f64,
    pub gtt: f64,
}

/// `g_x, g_t, g_xx, g_xt, g_tt` on one quadrature grid.
pub fn second_partials(
    model: &DispersionModel,
    u: f64,
    x: f64,
    t: f64,
    z: f64,
    cfg: &SolverConfig,
) -> Result<SecondPartials> {
    check_args(u, x, t, z)?;
    let ph = Phase::new(t);
    let [gx, gt, gxx, gxt, gtt] = trace_integral_vec(
        model,
        |l| {
            let s = l.hypot(z);
            let y = x * s;
            [
                kernel::h_prime(y, &ph),
                kernel::sinh_q2(y, &ph) / s,
                s * kernel::h_second(y, &ph),
                kernel::h_prime_dc(y, &ph),
                kernel::tt_kernel(y, &ph) / s,
            ]
        },
        &cfg.quad,
    )?;
    Ok(SecondPartials {
        gx,
        gt: 0.5 * ph.sin * gt,
        gxx,
        gxt: -0.5 * ph.sin * gxt,
        gtt: 0.25 * gtt,
    })
}

/// Solves `g(β, t, Δ) = 0` for `Δ ≥ 0`, classifying `(β, t)` by the sign
/// of `g(β, t, 0)`.
pub fn solve_delta(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    t: f64,
    cfg: &SolverConfig,
) -> Result<GapResult> {
    cfg.validate()?;
    let g0 = g(model, u, beta, t, 0.0, cfg)?;
    let tol = cfg.root.classification_tol;
    if g0.abs() <= tol {
        return Ok(GapResult {
            delta: 0.0,
            regime: Regime::QZero,
            residual: g0,
            iterations: 0,
        });
    }
    if g0 < 0.0 {
        return Ok(GapResult {
            delta: 0.0,
            regime: Regime::QMinus,
            residual: g0,
            iterations: 0,
        });
    }
    // g decreases strictly in z towards −2/|U| < 0.
    let mut z_hi = model.e_max().max(1.0);
    let mut g_hi = g(model, u, beta, t, z_hi, cfg)?;
    let mut doublings = 0;
    while g_hi >= 0.0 {
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::BracketFailure {
                lo: 0.0,
                hi: z_hi,
                f_lo: g0,
                f_hi: g_hi,
            });
        }
        z_hi *= 2.0;
        g_hi = g(model, u, beta, t, z_hi, cfg)?;
    }
    let root = find_root(
        |z| g(model, u, beta, t, z, cfg),
        0.0,
        z_hi,
        g0,
        g_hi,
        &cfg.root,
    )?;
    Ok(GapResult {
        delta: root.x,
        regime: Regime::QPlus,
        residual: root.fx,
        iterations: root.iterations + doublings,
    })
}

/// Upper bound `(2/e_min) artanh(b|U|/(2e_min))` on `β_c`.
pub fn beta_c_upper_bound(model: &DispersionModel, u: f64) -> Result<f64> {
    check_admissible(model, u)?;
    let e = model.e_min();
    Ok(2.0 / e * artanh(-u * model.orbitals() as f64 / (2.0 * e)))
}

/// Critical inverse temperature: the root of `β ↦ g(β, 2π, 0)`.
pub fn solve_beta_c(model: &DispersionModel, u: f64, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let bound = beta_c_upper_bound(model, u)?;
    let f = |beta: f64| g(model, u, beta, TWO_PI, 0.0, cfg);
    // The bound is attained for constant dispersions; rounding may leave
    // g slightly positive there, so nudge it outwards.
    let mut hi = bound;
    let mut f_hi = f(hi)?;
    let mut nudge = 4.0 * f64::EPSILON;
    while f_hi > 0.0 {
        if nudge > 1e-6 {
            return Err(Error::BracketFailure {
                lo: bound,
                hi,
                f_lo: f_hi,
                f_hi,
            });
        }
        hi = bound * (1.0 + nudge);
        nudge *= 2.0;
        f_hi = f(hi)?;
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let mut lo = 0.5 * hi;
    let mut f_lo = f(lo)?;
    while f_lo <= 0.0 {
        if f_lo == 0.0 {
            return Ok(lo);
        }
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE * 1e10 {
            return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
        }
        f_lo = f(lo)?;
    }
    Ok(find_root(f, lo, hi, f_lo, f_hi, &cfg.root)?.x)
}

/// `τ(β) ∈ (π, 2π)`, the zero of `t ↦ g(β, t, 0)` for `0 < β < β_c`.
pub fn solve_tau(model: &DispersionModel, u: f64, beta: f64, cfg: &SolverConfig) -> Result<f64> {
    solve_tau_root(model, u, beta, cfg).map(|(tau, _)| tau)
}

/// `τ(β)` together with the residual `g(β, τ, 0)`.
pub(crate) fn solve_tau_root(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    check_admissible(model, u)?;
    check_x(beta)?;
    let f = |t: f64| g(model, u, beta, t, 0.0, cfg);
    let f_hi = f(TWO_PI)?;
    if f_hi <= 0.0 {
        let beta_c = solve_beta_c(model, u, cfg)?;
        return Err(Error::OutOfRange {
            what: "beta",
            value: beta,
            lo: 0.0,
            hi: beta_c,
        });
    }
    let f_lo = f(PI)?;
    let root = find_root(f, PI, TWO_PI, f_lo, f_hi, &cfg.root)?;
    Ok((root.x, root.fx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{constant_model_beta_c, constant_model_tau};
    use crate::dispersion::{build_bump_dispersion, BzGeometry, MeasureFractions};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn unit() -> DispersionModel {
        DispersionModel::constant(1, 1.0).unwrap()
    }

    fn reference(e_max: f64) -> DispersionModel {
        DispersionModel::multi_orbital(8, 7, 1.0, e_max).unwrap()
    }

    fn models() -> Vec<(DispersionModel, f64)> {
        let fr = MeasureFractions::new(0.3, 0.6).unwrap();
        vec![
            (unit(), -0.125),
            (reference(7.0), -0.125),
            (DispersionModel::cosine_1d(1.0, 1.0).unwrap(), -1.2),
            (
                build_bump_dispersion(2, fr, 0.8, 2.0, BzGeometry::canonical(1).unwrap()).unwrap(),
                -0.5,
            ),
        ]
    }

    #[test]
    fn constant_model_at_two_pi_is_coth() {
        for beta in [0.05, 0.3, 2.0] {
            let v = g(&unit(), -0.125, beta, TWO_PI, 0.0, &cfg()).unwrap();
            assert_relative_eq!(v, -16.0 + 1.0 / (beta / 2.0).tanh(), max_relative = 1e-13);
        }
    }

    #[test]
    fn large_z_tends_to_minus_two_over_u() {
        let v = g(&unit(), -0.125, 1.0, TWO_PI, 1e6, &cfg()).unwrap();
        assert!(v < -16.0 + 1e-4);
        assert!(v > -16.0);
    }

    #[test]
    fn small_beta_at_pi_is_negative() {
        for (m, u) in models() {
            assert!(g(&m, u, 0.001, PI, 0.0, &cfg()).unwrap() < 0.0);
        }
    }

    #[test]
    fn dg_dt_vanishes_at_two_pi() {
        for (m, u) in models() {
            assert_eq!(dg_dt(&m, u, 0.4, TWO_PI, 0.0, &cfg()).unwrap(), 0.0);
        }
    }

    #[test]
    fn dg_dx_against_central_difference() {
        let (x, t, z, h) = (1.0, 5.0, 0.3, 1e-5);
        let fd = (g(&unit(), -0.125, x + h, t, z, &cfg()).unwrap()
            - g(&unit(), -0.125, x - h, t, z, &cfg()).unwrap())
            / (2.0 * h);
        let an = dg_dx(&unit(), -0.125, x, t, z, &cfg()).unwrap();
        assert!((fd - an).abs() < 1e-6, "{fd} vs {an}");
    }

    #[test]
    fn dg_dz_reports_limit_at_zero() {
        let m = reference(7.0);
        let limit = dg_dz(&m, -0.125, 0.1, 5.0, 0.0, &cfg()).unwrap();
        assert!(limit < 0.0);
        assert_eq!(dg_dz_raw(&m, -0.125, 0.1, 5.0, 0.0, &cfg()).unwrap(), 0.0);
        let z = 1e-4;
        let approx = dg_dz(&m, -0.125, 0.1, 5.0, z, &cfg()).unwrap() / z;
        assert!((approx - limit).abs() < 1e-6 * limit.abs());
    }

    #[test]
    fn canonical_time_examples() {
        assert_eq!(canonical_time(TWO_PI).0, TWO_PI);
        assert!((canonical_time(FOUR_PI - 0.3).0 - 0.3).abs() < 1e-14);
        assert!(canonical_time(FOUR_PI - 0.3).1.reflected);
        assert!((canonical_time(6.0 * PI).0 - TWO_PI).abs() < 1e-14);
        let (r, br) = canonical_time(-1.0);
        assert!((r - 1.0).abs() < 1e-14 && br.reflected && br.periods == 0);
    }

    #[test]
    fn pi_is_always_disordered() {
        for (m, u) in models() {
            for beta in [0.01, 0.1, 1.0, 5.0] {
                let r = solve_delta(&m, u, beta, PI, &cfg()).unwrap();
                assert_eq!(r.regime, Regime::QMinus);
                assert_eq!(r.delta, 0.0);
            }
        }
    }

    #[test]
    fn constant_model_at_beta_c_is_transition_point() {
        let bc = constant_model_beta_c(1, 1.0, -0.125).unwrap();
        let r = solve_delta(&unit(), -0.125, bc, TWO_PI, &cfg()).unwrap();
        assert_eq!(r.regime, Regime::QZero);
        assert_eq!(r.delta, 0.0);
    }

    #[test]
    fn constant_model_ordered_phase_matches_scalar_oracle() {
        let beta = 0.06;
        let r = solve_delta(&unit(), -0.125, beta, TWO_PI, &cfg()).unwrap();
        assert_eq!(r.regime, Regime::QPlus);
        assert!(r.residual.abs() <= 1e-10);
        // Independent scalar bisection on sinh(βs)/((cosh(βs) − 1)s) = 16.
        let phi = |s: f64| 1.0 / ((beta * s / 2.0).tanh() * s) - 16.0;
        let (mut lo, mut hi) = (1.0, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        assert!(((1.0 + r.delta * r.delta).sqrt() - s).abs() < 1e-9 * s);
    }

    #[test]
    fn beta_c_constant_model_equals_bound() {
        let bc = solve_beta_c(&unit(), -0.125, &cfg()).unwrap();
        assert!((bc - 2.0 * (1.0f64 / 16.0).atanh()).abs() < 1e-12);
        assert!(bc <= beta_c_upper_bound(&unit(), -0.125).unwrap() + 1e-10);
    }

    #[test]
    fn beta_c_multi_orbital_below_bound() {
        let m = reference(7.0);
        let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
        assert!(g(&m, -0.125, bc, TWO_PI, 0.0, &cfg()).unwrap().abs() < 1e-10);
        assert!(bc <= 2.0 * 0.5f64.atanh());
    }

    #[test]
    fn beta_c_decreases_as_coupling_vanishes() {
        let m = reference(6.0);
        let mut last = f64::INFINITY;
        for k in (1..10).rev() {
            let u = -0.024 * k as f64;
            let bc = solve_beta_c(&m, u, &cfg()).unwrap();
            assert!(bc < last);
            last = bc;
        }
    }

    #[test]
    fn inadmissible_coupling_is_rejected() {
        let m = reference(7.0);
        assert!(matches!(
            solve_beta_c(&m, -0.25, &cfg()),
            Err(Error::Inadmissible { .. })
        ));
        assert!(solve_tau(&m, -0.3, 0.05, &cfg()).is_err());
    }

    #[test]
    fn tau_constant_model_matches_closed_form() {
        let bc = constant_model_beta_c(1, 1.0, -0.125).unwrap();
        for frac in [0.01, 0.2, 0.5, 0.8, 0.99] {
            let beta = frac * bc;
            let tau = solve_tau(&unit(), -0.125, beta, &cfg()).unwrap();
            let exact = constant_model_tau(1, 1.0, -0.125, beta).unwrap();
            assert!((tau - exact).abs() < 1e-10, "{frac}: {tau} vs {exact}");
        }
    }

    #[test]
    fn tau_limits_at_both_ends() {
        let m = reference(7.0);
        let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
        assert!(solve_tau(&m, -0.125, 0.999 * bc, &cfg()).unwrap() > TWO_PI - 0.1);
        assert!(solve_tau(&m, -0.125, 0.001 * bc, &cfg()).unwrap() > TWO_PI - 0.5);
        assert!(matches!(
            solve_tau(&m, -0.125, 1.01 * bc, &cfg()),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn second_partials_match_differences_of_first() {
        let (m, u) = (DispersionModel::cosine_1d(1.0, 1.0).unwrap(), -1.2);
        let (x, t, h) = (0.7, 4.4, 1e-5);
        let sp = second_partials(&m, u, x, t, 0.0, &cfg()).unwrap();
        let d = |x: f64, t: f64| dg_dx_dt(&m, u, x, t, 0.0, &cfg()).unwrap();
        let gxx = (d(x + h, t).0 - d(x - h, t).0) / (2.0 * h);
        let gxt = (d(x, t + h).0 - d(x, t - h).0) / (2.0 * h);
        let gtt = (d(x, t + h).1 - d(x, t - h).1) / (2.0 * h);
        assert!((sp.gxx - gxx).abs() < 1e-7 * gxx.abs().max(1.0));
        assert!((sp.gxt - gxt).abs() < 1e-7 * gxt.abs().max(1.0));
        assert!((sp.gtt - gtt).abs() < 1e-7 * gtt.abs().max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn strictly_decreasing_in_z(idx in 0usize..4, beta in 0.01f64..3.0, t in 0.0f64..12.0, z1 in 0.0f64..3.0, dz in 0.01f64..3.0) {
            let (m, u) = &models()[idx];
            let a = g(m, *u, beta, t, z1, &cfg()).unwrap();
            let b = g(m, *u, beta, t, z1 + dz, &cfg()).unwrap();
            prop_assert!(a > b);
        }

        #[test]
        fn symmetric_and_periodic_in_t(idx in 0usize..4, beta in 0.01f64..3.0, t in 0.0f64..12.5, z in 0.0f64..2.0) {
            let (m, u) = &models()[idx];
            let base = g(m, *u, beta, t, z, &cfg()).unwrap();
            let refl = g(m, *u, beta, FOUR_PI - t, z, &cfg()).unwrap();
            let shift = g(m, *u, beta, t + FOUR_PI, z, &cfg()).unwrap();
            prop_assert!((base - refl).abs() < 1e-13 * base.abs().max(1.0));
            prop_assert!((base - shift).abs() < 1e-13 * base.abs().max(1.0));
        }

        #[test]
        fn regime_matches_sign_and_root_is_accurate(idx in 0usize..4, beta in 0.005f64..2.0, t in 0.0f64..12.5) {
            let (m, u) = &models()[idx];
            let r = solve_delta(m, *u, beta, t, &cfg()).unwrap();
            let g0 = g(m, *u, beta, t, 0.0, &cfg()).unwrap();
            prop_assert_eq!(r.regime == Regime::QPlus, g0 > cfg().root.classification_tol);
            if r.regime == Regime::QPlus {
                prop_assert!(r.delta > 0.0);
                prop_assert!(g(m, *u, beta, t, r.delta, &cfg()).unwrap().abs() <= 1e-10);
            } else {
                prop_assert_eq!(r.delta, 0.0);
            }
        }

        #[test]
        fn analytic_derivatives_match_differences(idx in 0usize..4, beta in 0.05f64..2.0, t in 0.2f64..12.0, z in 0.05f64..2.0) {
            let (m, u) = &models()[idx];
            let h = 1e-5;
            let gg = |x: f64, t: f64, z: f64| g(m, *u, x, t, z, &cfg()).unwrap();
            let fx = (gg(beta + h, t, z) - gg(beta - h, t, z)) / (2.0 * h);
            let ft = (gg(beta, t + h, z) - gg(beta, t - h, z)) / (2.0 * h);
            let fz = (gg(beta, t, z + h) - gg(beta, t, z - h)) / (2.0 * h);
            let ax = dg_dx(m, *u, beta, t, z, &cfg()).unwrap();
            let at = dg_dt(m, *u, beta, t, z, &cfg()).unwrap();
            let az = dg_dz(m, *u, beta, t, z, &cfg()).unwrap();
            prop_assert!((fx - ax).abs() < 1e-6 * ax.abs().max(1.0), "x: {} vs {}", fx, ax);
            prop_assert!((ft - at).abs() < 1e-6 * at.abs().max(1.0), "t: {} vs {}", ft, at);
            prop_assert!((fz - az).abs() < 1e-6 * az.abs().max(1.0), "z: {} vs {}", fz, az);
        }

        #[test]
        fn tau_is_well_posed(idx in 0usize..4, frac in 0.001f64..0.999) {
            let (m, u) = &models()[idx];
            let bc = solve_beta_c(m, *u, &cfg()).unwrap();
            let beta = frac * bc;
            prop_assert!(g(m, *u, beta, PI, 0.0, &cfg()).unwrap() < 0.0);
            prop_assert!(g(m, *u, beta, TWO_PI, 0.0, &cfg()).unwrap() > 0.0);
            let tau = solve_tau(m, *u, beta, &cfg()).unwrap();
            prop_assert!(tau > PI && tau < TWO_PI);
            prop_assert!(dg_dt(m, *u, beta, tau, 0.0, &cfg()).unwrap() > 0.0);
        }
    }
}
