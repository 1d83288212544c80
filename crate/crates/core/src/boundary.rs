//! The phase boundary `τ(β)`: derivatives, curve tracing, local minima and
//! the multi-orbital shape classification.
//!
//! Along the boundary `g(β, τ(β), 0) = 0`, so
//!
//! ```text
//! τ'  = −g_x / g_t
//! τ'' = −(g_xx g_t² − 2 g_xt g_x g_t + g_tt g_x²) / g_t³
//! ```
//!
//! with all partials taken at `(β, τ(β), 0)`. `g_t > 0` on `(π, 2π)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{multiorbital_exact_tau, AlgebraicConstants};
use crate::config::{RootConfig, SolverConfig};
use crate::dispersion::{DispersionKind, DispersionModel};
use crate::error::{Error, Result};
use crate::gap::{self, check_admissible, dg_dx_dt, second_partials, solve_beta_c, solve_tau_root};
use crate::roots::find_root;

/// `|τ'|` below this is treated as numerically zero.
pub const PLATEAU_TOL: f64 = 1e-11;
/// Width of the final bracket around a local minimum.
pub const MINIMUM_BETA_TOL: f64 = 1e-9;

/// Sampling of `(0, β_c)` in the reduced variable `u = β/β_c`: a uniform
/// core on `[0.1, 0.9]` and geometric refinement towards both ends, where
/// `τ'` blows up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub core_points: usize,
    /// Points per decade in `u` (left end) and `1 − u` (right end).
    pub points_per_decade: usize,
    /// Decades resolved at each end, down to `10^{-decades}`.
    pub decades: u32,
    pub with_tau_second: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            core_points: 512,
            points_per_decade: 64,
            decades: 3,
            with_tau_second: false,
        }
    }
}

impl GridSpec {
    /// The reduced abscissae `u ∈ (0, 1)`, sorted and without duplicates.
    pub fn fractions(&self) -> Result<Vec<f64>> {
        let mut u = Vec::new();
        match self.core_points {
            0 => {}
            1 => u.push(0.5),
            n => u.extend((0..n).map(|i| 0.1 + 0.8 * i as f64 / (n - 1) as f64)),
        }
        let per = self.points_per_decade;
        if per > 0 {
            let d = self.decades as f64;
            for j in 0..(self.decades as usize * per) {
                let x = 10f64.powf(-d + j as f64 / per as f64);
                u.push(x);
                u.push(1.0 - x);
            }
        }
        if u.is_empty() {
            return Err(Error::InvalidParameter("the β grid is empty".into()));
        }
        u.sort_by(f64::total_cmp);
        u.dedup();
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleFlag {
    Ok,
    /// `|τ'|` is below [`PLATEAU_TOL`].
    Plateau,
}

impl SampleFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::Plateau => "plateau",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub beta: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub tau_second: Option<f64>,
    /// `g(β, τ, 0)`.
    pub residual: f64,
    pub flag: SampleFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimumStatus {
    /// Located by bisection on `τ'` to [`MINIMUM_BETA_TOL`].
    Refined,
    /// `τ'` is numerically zero between the bracketing samples, so the
    /// crossing cannot be resolved; excluded from the count.
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub beta: f64,
    pub tau: f64,
    pub tau_second: f64,
    pub status: MinimumStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub beta_c: f64,
    pub samples: Vec<CurveSample>,
    pub local_minima: Vec<LocalMinimum>,
}

impl BoundaryCurve {
    /// Number of resolved local minima.
    pub fn minima_count(&self) -> usize {
        self.local_minima
            .iter()
            .filter(|m| m.status == MinimumStatus::Refined)
            .count()
    }
}

struct BoundaryPoint {
    tau: f64,
    residual: f64,
    tau_prime: f64,
    tau_second: Option<f64>,
}

fn boundary_point(
    model: &DispersionModel,
    u: f64,
    beta: f64,
    second: bool,
    cfg: &SolverConfig,
) -> Result<BoundaryPoint> {
    let (tau, residual) = solve_tau_root(model, u, beta, cfg)?;
    if second {
        let p = second_partials(model, u, beta, tau, 0.0, cfg)?;
        Ok(BoundaryPoint {
            tau,
            residual,
            tau_prime: -p.gx / p.gt,
            tau_second: Some(tau_second_from(&p)),
        })
    } else {
        let (gx, gt) = dg_dx_dt(model, u, beta, tau, 0.0, cfg)?;
        Ok(BoundaryPoint {
            tau,
            residual,
            tau_prime: -gx / gt,
            tau_second: None,
        })
    }
}

fn tau_second_from(p: &gap::SecondPartials) -> f64 {
    let num = p.gxx * p.gt * p.gt - 2.0 * p.gxt * p.gx * p.gt + p.gtt * p.gx * p.gx;
    -num / (p.gt * p.gt * p.gt)
}

/// `dτ/dβ` for `0 < β < β_c`.
pub fn tau_prime(model: &DispersionModel, u: f64, beta: f64, cfg: &SolverConfig) -> Result<f64> {
    Ok(boundary_point(model, u, beta, false, cfg)?.tau_prime)
}

/// `d²τ/dβ²` for `0 < β < β_c`.
pub fn tau_second(model: &DispersionModel, u: f64, beta: f64, cfg: &SolverConfig) -> Result<f64> {
    Ok(boundary_point(model, u, beta, true, cfg)?
        .tau_second
        .expect("second derivative requested"))
}

/// Samples `τ, τ'` (and optionally `τ''`) on the grid described by `grid`
/// and locates the local minima of `τ` from sign changes of `τ'`.
pub fn trace_curve(
    model: &DispersionModel,
    u: f64,
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<BoundaryCurve> {
    cfg.validate()?;
    check_admissible(model, u)?;
    let fractions = grid.fractions()?;
    let beta_c = solve_beta_c(model, u, cfg)?;
    let samples = fractions
        .par_iter()
        .map(|&f| {
            let beta = f * beta_c;
            let p = boundary_point(model, u, beta, grid.with_tau_second, cfg)?;
            Ok(CurveSample {
                beta,
                tau: p.tau,
                tau_prime: p.tau_prime,
                tau_second: p.tau_second,
                residual: p.residual,
                flag: if p.tau_prime.abs() < PLATEAU_TOL {
                    SampleFlag::Plateau
                } else {
                    SampleFlag::Ok
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Pairs of consecutive definite-sign samples going from − to +.
    let mut brackets = Vec::new();
    let mut last_definite: Option<usize> = None;
    for (i, s) in samples.iter().enumerate() {
        if s.flag == SampleFlag::Plateau {
            continue;
        }
        if let Some(j) = last_definite {
            if samples[j].tau_prime < 0.0 && s.tau_prime > 0.0 {
                brackets.push((j, i));
            }
        }
        last_definite = Some(i);
    }

    let local_minima = brackets
        .par_iter()
        .map(|&(j, i)| {
            if i > j + 1 {
                // Only plateau samples in between.
                let mid = &samples[(i + j) / 2];
                return Ok(LocalMinimum {
                    beta: mid.beta,
                    tau: mid.tau,
                    tau_second: f64::NAN,
                    status: MinimumStatus::Ambiguous,
                });
            }
            refine_minimum(model, u, &samples[j], &samples[i], cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BoundaryCurve {
        beta_c,
        samples,
        local_minima,
    })
}

fn refine_minimum(
    model: &DispersionModel,
    u: f64,
    left: &CurveSample,
    right: &CurveSample,
    cfg: &SolverConfig,
) -> Result<LocalMinimum> {
    let root_cfg = RootConfig {
        abs_tol: f64::MAX,
        x_tol: MINIMUM_BETA_TOL,
        ..cfg.root
    };
    let root = find_root(
        |beta| tau_prime(model, u, beta, cfg),
        left.beta,
        right.beta,
        left.tau_prime,
        right.tau_prime,
        &root_cfg,
    )?;
    let p = boundary_point(model, u, root.x, true, cfg)?;
    Ok(LocalMinimum {
        beta: root.x,
        tau: p.tau,
        tau_second: p.tau_second.unwrap_or(f64::NAN),
        status: MinimumStatus::Refined,
    })
}

fn domain(what: &'static str) -> Error {
    Error::Domain(what)
}

/// The shape function `w̃(x, y, z)`.
///
/// At `y = −1` this is the rational form
/// `(x − 1)(1 + zx)² / ((1 − zx)(1 + x)²)`, valid for `x > 0`, `z > 0`,
/// `zx < 1`. For `−1 < y < 0` it is the hyperbolic quotient on the domain
/// `x < acosh(1/|y|)² / (2z(y + 1))`.
pub fn w_tilde(x: f64, y: f64, z: f64) -> Result<f64> {
    if !(x > 0.0 && z > 0.0 && x.is_finite() && z.is_finite()) {
        return Err(domain("w_tilde: need x > 0 and z > 0"));
    }
    if y == -1.0 {
        let zx = z * x;
        if zx >= 1.0 {
            return Err(domain("w_tilde: need zx < 1 at y = -1"));
        }
        return Ok((x - 1.0) * (1.0 + zx) * (1.0 + zx) / ((1.0 - zx) * (1.0 + x) * (1.0 + x)));
    }
    if !(y > -1.0 && y < 0.0) {
        return Err(domain("w_tilde: need -1 <= y < 0"));
    }
    let edge = (1.0 / y.abs()).acosh().powi(2) / (2.0 * z * (y + 1.0));
    if x >= edge {
        return Err(domain("w_tilde: x outside the domain D"));
    }
    let r = (y + 1.0).sqrt();
    let big = (r * (2.0 * x).sqrt()).cosh();
    let small = (r * (2.0 * z * x).sqrt()).cosh();
    let num = (1.0 + y * big) * (y + small) * (y + small);
    let den = (1.0 + y * small) * (y + big) * (y + big);
    Ok(-num / den)
}

fn eta_check(eta: f64) -> Result<()> {
    let eta0 = AlgebraicConstants::new().eta0;
    if eta > 0.0 && eta <= eta0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "eta",
            value: eta,
            lo: 0.0,
            hi: eta0,
        })
    }
}

/// `(1+η)/(6η)` and `√(((1+η)/(6η))² − 1/η)`, the latter written as
/// `√((η₀ − η)(1/η₀ − η))/(6η)` so that it vanishes exactly at `η₀`.
fn a_parts(eta: f64) -> Result<(f64, f64)> {
    eta_check(eta)?;
    let c = AlgebraicConstants::new();
    let centre = (1.0 + eta) / (6.0 * eta);
    let disc = ((c.eta0 - eta) * (c.a0 * c.a0 - eta)).max(0.0);
    Ok((centre, disc.sqrt() / (6.0 * eta)))
}

/// `a₊(η) = (1+η)/(6η) + √(((1+η)/(6η))² − 1/η)` for `0 < η ≤ η₀`.
pub fn a_plus(eta: f64) -> Result<f64> {
    let (c, r) = a_parts(eta)?;
    Ok(c + r)
}

/// `a₋(η)`, the smaller root, computed as `1/(η a₊(η))`.
pub fn a_minus(eta: f64) -> Result<f64> {
    Ok(1.0 / (eta * a_plus(eta)?))
}

/// `â(η) = (a₊(η) + a₋(η))/2 = (1+η)/(6η)`.
pub fn a_hat(eta: f64) -> Result<f64> {
    Ok(a_parts(eta)?.0)
}

/// `W(x, y, z, s) = sinh x/(y + cosh x) + s sinh(zx)/((y + cosh(zx)) z)`
/// for `x > 0`, `z > 0`, `−1 ≤ y ≤ 1`.
pub fn big_w(x: f64, y: f64, z: f64, s: f64) -> Result<f64> {
    if !(x > 0.0 && z > 0.0 && (-1.0..=1.0).contains(&y) && s.is_finite()) {
        return Err(domain("big_w: need x > 0, z > 0, -1 <= y <= 1"));
    }
    let term = |v: f64| {
        if v > 30.0 {
            let e = (-v).exp();
            let em = -(-v).exp_m1();
            (1.0 - e * e) / (em * em + 2.0 * (1.0 + y) * e)
        } else {
            let sh = (0.5 * v).sinh();
            v.sinh() / ((1.0 + y) + 2.0 * sh * sh)
        }
    };
    Ok(term(x) + s * term(z * x) / z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdSide {
    Above,
    At,
    Below,
}

/// Prediction for the number of local minima of `τ` at small `|U|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapePrediction {
    OneMinimum,
    MultipleMinimaPossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeVerdict {
    /// `e_min / e_max`.
    pub ratio: f64,
    pub threshold_side: ThresholdSide,
    pub prediction: ShapePrediction,
    /// `1` for a single minimum, `2` when several minima are predicted.
    pub minima_count: usize,
    /// Convexity of `τ` is only certified for equal levels.
    pub convexity_certified: bool,
}

fn verdict(ratio: f64, prediction: ShapePrediction) -> ShapeVerdict {
    let threshold = AlgebraicConstants::new().threshold;
    let threshold_side = if ratio > threshold {
        ThresholdSide::Above
    } else if ratio == threshold {
        ThresholdSide::At
    } else {
        ThresholdSide::Below
    };
    ShapeVerdict {
        ratio,
        threshold_side,
        prediction,
        minima_count: match prediction {
            ShapePrediction::OneMinimum => 1,
            ShapePrediction::MultipleMinimaPossible => 2,
        },
        convexity_certified: ratio == 1.0,
    }
}

/// Shape classification for the multi-orbital model.
///
/// With `η = (e_min/e_max)²` and `s = (b − b')/b'`, a boundary with several
/// local minima at small `|U|` is possible exactly when
/// `w̃(a₊(η), −1, η) ≤ s < w̃(a₋(η), −1, η)`; for
/// `e_min/e_max ≥ 3 − 2√2` the minimum is always unique. Constant
/// dispersions (ratio 1) are accepted as the trivial case.
pub fn classify_shape(model: &DispersionModel) -> Result<ShapeVerdict> {
    let (b, b_prime, e_min, e_max) = match *model.kind() {
        DispersionKind::MultiOrbitalDiagonal {
            b,
            b_prime,
            e_min,
            e_max,
        } => (b, b_prime, e_min, e_max),
        DispersionKind::ConstantDiagonal { .. } => {
            return Ok(verdict(1.0, ShapePrediction::OneMinimum))
        }
        ref k => return Err(Error::UnsupportedKind(k.name())),
    };
    let ratio = e_min / e_max;
    let threshold = AlgebraicConstants::new().threshold;
    if ratio >= threshold {
        return Ok(verdict(ratio, ShapePrediction::OneMinimum));
    }
    let (lower, upper) = w_levels(ratio * ratio)?;
    let s = (b - b_prime) as f64 / b_prime as f64;
    let prediction = if s >= lower && s < upper {
        ShapePrediction::MultipleMinimaPossible
    } else {
        ShapePrediction::OneMinimum
    };
    Ok(verdict(ratio, prediction))
}

/// `(w̃(a₊(η), −1, η), w̃(a₋(η), −1, η))`, the lower and upper level.
pub fn w_levels(eta: f64) -> Result<(f64, f64)> {
    let lower = w_tilde(a_plus(eta)?, -1.0, eta)?;
    let upper = w_tilde(a_minus(eta)?, -1.0, eta)?;
    Ok((lower, upper))
}

/// Structural formula for the coupling bound `U₀` below which the single
/// minimum is guaranteed when `e_min/e_max > 3 − 2√2`:
///
/// ```text
/// min{1, c₁/2} (e_min²/e_max) ((e_min/e_max)² − 17 + 12√2)
///   / (sinh(2) b cosh²(2 c_max e_max/e_min) cosh²(c_max e_max/e_min))
/// ```
///
/// `c₁` and `c_max` are generic constants with no explicit value, so the
/// result is a heuristic that depends on the caller's choice.
pub fn heuristic_u0(b: usize, e_min: f64, e_max: f64, c1: f64, c_max: f64) -> Result<f64> {
    let c = AlgebraicConstants::new();
    let ratio = e_min / e_max;
    if !(b > 0 && e_min > 0.0 && e_max >= e_min && c1 > 0.0 && c_max > 0.0) {
        return Err(Error::InvalidParameter(
            "heuristic_u0: invalid arguments".into(),
        ));
    }
    if ratio <= c.threshold {
        return Err(domain("heuristic_u0: need e_min/e_max > 3 - 2√2"));
    }
    let gap = (ratio - c.threshold) * (ratio + c.threshold);
    let k = e_max / e_min;
    let den =
        2f64.sinh() * b as f64 * (2.0 * c_max * k).cosh().powi(2) * (c_max * k).cosh().powi(2);
    Ok((c1 / 2.0).min(1.0) * e_min * e_min / e_max * gap / den)
}

/// Exact multi-orbital boundary at `β` together with the residual
/// `g(β, τ_exact, 0)` of the numerical gap function there.
#[allow(clippy::too_many_arguments)]
pub fn multiorbital_exact_tau_check(
    b: usize,
    b_prime: usize,
    e_min: f64,
    e_max: f64,
    u: f64,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let tau = multiorbital_exact_tau(b, b_prime, e_min, e_max, u, beta)?;
    let model = DispersionModel::multi_orbital(b, b_prime, e_min, e_max)?;
    let residual = gap::g(&model, u, beta, tau, 0.0, cfg)?;
    Ok((tau, residual))
}

/// `τ ∈ (π, 2π)`.
pub fn in_boundary_range(tau: f64) -> bool {
    tau > PI && tau < 2.0 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{constant_model_beta_c, constant_model_tau_prime};
    use crate::gap::{dg_dx, solve_tau};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn reference(e_max: f64) -> DispersionModel {
        DispersionModel::multi_orbital(8, 7, 1.0, e_max).unwrap()
    }

    #[test]
    fn grid_fractions_cover_both_ends() {
        let u = GridSpec::default().fractions().unwrap();
        assert!((u[0] - 1e-3).abs() < 1e-15);
        assert!((u[u.len() - 1] - (1.0 - 1e-3)).abs() < 1e-15);
        assert!(u.windows(2).all(|w| w[0] < w[1]));
        let empty = GridSpec {
            core_points: 0,
            points_per_decade: 0,
            ..GridSpec::default()
        };
        assert!(empty.fractions().is_err());
    }

    #[test]
    fn tau_prime_blows_up_at_both_ends() {
        let m = reference(7.0);
        let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
        assert!(tau_prime(&m, -0.125, 0.999 * bc, &cfg()).unwrap() > 10.0);
        assert!(tau_prime(&m, -0.125, 0.001 * bc, &cfg()).unwrap() < -10.0);
    }

    #[test]
    fn tau_prime_constant_model_matches_closed_form() {
        let m = DispersionModel::constant(2, 1.5).unwrap();
        let u = -0.4;
        let bc = constant_model_beta_c(2, 1.5, u).unwrap();
        for frac in [0.01, 0.1, 0.5, 0.9, 0.99] {
            let beta = frac * bc;
            let an = tau_prime(&m, u, beta, &cfg()).unwrap();
            let exact = constant_model_tau_prime(2, 1.5, u, beta).unwrap();
            assert!(
                (an - exact).abs() < 1e-8 * exact.abs().max(1.0),
                "{an} vs {exact}"
            );
        }
    }

    #[test]
    fn tau_second_matches_difference_of_tau() {
        let m = reference(7.0);
        let u = -0.125;
        let bc = solve_beta_c(&m, u, &cfg()).unwrap();
        for frac in [0.1, 0.25, 0.5, 0.8] {
            let beta = frac * bc;
            let h = 1e-4 * bc;
            let t = |b: f64| solve_tau(&m, u, b, &cfg()).unwrap();
            let fd = (t(beta + h) - 2.0 * t(beta) + t(beta - h)) / (h * h);
            let an = tau_second(&m, u, beta, &cfg()).unwrap();
            assert!((fd - an).abs() < 1e-4 * an.abs().max(1.0), "{fd} vs {an}");
        }
    }

    #[test]
    fn reference_family_minima_counts() {
        for (e_max, expected) in [(6.0, 1), (7.0, 2), (9.0, 1)] {
            let curve =
                trace_curve(&reference(e_max), -0.125, &GridSpec::default(), &cfg()).unwrap();
            assert_eq!(curve.minima_count(), expected, "e_max = {e_max}");
            for m in &curve.local_minima {
                assert!(m.tau_second >= 0.0);
            }
            let first = curve.samples.first().unwrap();
            let last = curve.samples.last().unwrap();
            assert!(first.tau_prime < 0.0 && last.tau_prime > 0.0);
            for s in &curve.samples {
                assert!(s.residual.abs() <= 1e-10);
                assert!(in_boundary_range(s.tau));
            }
        }
    }

    #[test]
    fn exact_tau_matches_bisection() {
        let m = reference(7.0);
        let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
        let beta = 0.5 * bc;
        let (exact, residual) =
            multiorbital_exact_tau_check(8, 7, 1.0, 7.0, -0.125, beta, &cfg()).unwrap();
        let numeric = solve_tau(&m, -0.125, beta, &cfg()).unwrap();
        assert!((exact - numeric).abs() < 1e-9);
        assert!(residual.abs() < 1e-10);
    }

    #[test]
    fn algebraic_shape_identities() {
        let c = AlgebraicConstants::new();
        assert!((w_tilde(c.a0, -1.0, c.eta0).unwrap() - c.threshold).abs() < 1e-12);
        assert!((w_tilde(c.a0, -1.0, c.eta0).unwrap() - (3.0 - 2.0 * SQRT_2)).abs() < 1e-12);
        for z in [0.01, 0.3, 0.9] {
            assert_eq!(w_tilde(1.0, -1.0, z).unwrap(), 0.0);
        }
        assert!((a_plus(c.eta0).unwrap() - c.a0).abs() < 1e-12);
        assert!((a_minus(c.eta0).unwrap() - c.a0).abs() < 1e-12);
        assert!((a_hat(c.eta0).unwrap() - c.a0).abs() < 1e-12);
        assert!(w_tilde(2.0, -1.0, 0.5).is_err());
        assert!(a_plus(0.1).is_err());
    }

    #[test]
    fn w_tilde_rational_form_is_the_continuation() {
        // Approaching y = −1 from inside D recovers the rational form.
        let (x, z) = (2.0, 0.2);
        let inside = w_tilde(x, -1.0 + 1e-9, z).unwrap();
        assert!((inside - w_tilde(x, -1.0, z).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn w_levels_limits_and_monotonicity() {
        let c = AlgebraicConstants::new();
        let (lo, hi) = w_levels(1e-7).unwrap();
        assert!((hi - 0.125).abs() < 1e-3 && lo.abs() < 1e-3);
        let (lo, hi) = w_levels(c.eta0 * (1.0 - 1e-9)).unwrap();
        assert!((lo - c.threshold).abs() < 1e-3 && (hi - c.threshold).abs() < 1e-3);
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 1..=100 {
            let eta = c.eta0 * i as f64 / 100.0;
            let lv = w_levels(eta).unwrap();
            assert!(lv.0 > prev.0 && lv.1 > prev.1, "not increasing at {eta}");
            prev = lv;
        }
    }

    #[test]
    fn big_w_relates_to_gap_function() {
        let (b, bp, e_min, e_max, u) = (8usize, 7usize, 1.0, 7.0, -0.125);
        let m = reference(e_max);
        for (x, t) in [(0.05, 4.0), (0.1, 5.5), (0.3, 6.0)] {
            let gv = gap::g(&m, u, x, t, 0.0, &cfg()).unwrap();
            let w = big_w(
                e_max * x,
                (t / 2.0).cos(),
                e_min / e_max,
                (b - bp) as f64 / bp as f64,
            )
            .unwrap();
            let rhs = bp as f64 / e_max * (-2.0 * e_max / (bp as f64 * -u) + w);
            assert_relative_eq!(gv, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn classification_matches_reference_family() {
        let expect = [
            (6.0, ShapePrediction::OneMinimum),
            (7.0, ShapePrediction::MultipleMinimaPossible),
            (9.0, ShapePrediction::OneMinimum),
        ];
        for (e_max, p) in expect {
            let v = classify_shape(&reference(e_max)).unwrap();
            assert_eq!(v.prediction, p, "e_max = {e_max}");
            assert_eq!(v.threshold_side, ThresholdSide::Below);
        }
        let v = classify_shape(&DispersionModel::multi_orbital(2, 1, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(v.threshold_side, ThresholdSide::Above);
        assert_eq!(v.minima_count, 1);
        assert!(v.convexity_certified);
        let v = classify_shape(&DispersionModel::multi_orbital(4, 1, 1.0, 20.0).unwrap()).unwrap();
        assert_eq!(v.prediction, ShapePrediction::OneMinimum);
        assert!(matches!(
            classify_shape(&DispersionModel::cosine_1d(1.0, 1.0).unwrap()),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn heuristic_u0_is_positive_above_threshold_only() {
        assert!(heuristic_u0(2, 1.0, 2.0, 1.0, 1.0).unwrap() > 0.0);
        assert!(heuristic_u0(2, 1.0, 7.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tau_prime_sign_opposes_dg_dx(e_max in 1.0f64..10.0, frac in 0.01f64..0.99) {
            let m = reference(e_max);
            let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
            let beta = frac * bc;
            let tp = tau_prime(&m, -0.125, beta, &cfg()).unwrap();
            let tau = solve_tau(&m, -0.125, beta, &cfg()).unwrap();
            let gx = dg_dx(&m, -0.125, beta, tau, 0.0, &cfg()).unwrap();
            prop_assert!(tp.signum() == -gx.signum() || tp == 0.0);
        }

        #[test]
        fn exact_tau_agrees_with_bisection(e_max in 1.0f64..10.0, frac in 0.005f64..0.995) {
            let m = reference(e_max);
            let bc = solve_beta_c(&m, -0.125, &cfg()).unwrap();
            let beta = frac * bc;
            let exact = multiorbital_exact_tau(8, 7, 1.0, e_max, -0.125, beta).unwrap();
            let numeric = solve_tau(&m, -0.125, beta, &cfg()).unwrap();
            prop_assert!((exact - numeric).abs() <= 1e-8);
        }
    }
}
