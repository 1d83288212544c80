//! Closed-form results used as independent oracles: the cosine-band
//! definite integral, the constant-dispersion boundary, the exact
//! multi-orbital boundary and the algebraic constants of the shape
//! classification.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// `η₀ = 17 − 12√2`, `a₀ = 3 + 2√2` and `threshold = 3 − 2√2 = √η₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicConstants {
    pub eta0: f64,
    pub a0: f64,
    pub threshold: f64,
}

impl AlgebraicConstants {
    /// Evaluated as `threshold = 1/a₀` and `η₀ = threshold²`, which avoids
    /// the cancellation in `17 − 12√2`.
    pub fn new() -> Self {
        let a0 = 3.0 + 2.0 * SQRT_2;
        let threshold = 1.0 / a0;
        Self {
            eta0: threshold * threshold,
            a0,
            threshold,
        }
    }
}

impl Default for AlgebraicConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `(1/2π) ∫₀^{2π} dk / (1 + x (t(cos k + 1) + 1)²)` in closed form.
///
/// Returns NaN unless `x ≥ 0` and `t_hop ≥ 0`.
pub fn cosine_integral_closed(x: f64, t_hop: f64) -> f64 {
    if !(x >= 0.0 && t_hop >= 0.0) {
        return f64::NAN;
    }
    let u = 2.0 * t_hop + 1.0;
    let a = (u * u * x + 1.0).sqrt();
    let b = (x + 1.0).sqrt();
    (a + b) / (SQRT_2 * a * b * (a * b + u * x + 1.0).sqrt())
}

/// `artanh(x)` as `½ ln(1 + 2x/(1 − x))`.
pub fn artanh(x: f64) -> f64 {
    0.5 * (2.0 * x / (1.0 - x)).ln_1p()
}

fn check_constant(b: usize, e: f64, u: f64) -> Result<(f64, f64)> {
    if b == 0 || !(e.is_finite() && e != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "constant model needs b ≥ 1 and e ≠ 0, got b = {b}, e = {e}"
        )));
    }
    let e = e.abs();
    let limit = 2.0 * e / b as f64;
    if !(u < 0.0 && -u < limit) {
        return Err(Error::Inadmissible { coupling: u, limit });
    }
    Ok((e, -u * b as f64 / (2.0 * e)))
}

/// `β_c = (2/e) artanh(b|U|/(2e))` for `E = e I_b`.
pub fn constant_model_beta_c(b: usize, e: f64, u: f64) -> Result<f64> {
    let (e, ratio) = check_constant(b, e, u)?;
    Ok(2.0 / e * artanh(ratio))
}

/// Returns `1 + cos(τ/2)` for the constant model, computed without
/// cancellation.
fn constant_model_one_plus_y(e: f64, ratio: f64, beta: f64) -> f64 {
    let x = beta * e;
    let sh = (0.5 * x).sinh();
    ratio * x.sinh() - 2.0 * sh * sh
}

/// `τ(β) = 2 arccos((|U|b/(2e)) sinh(βe) − cosh(βe))` for `E = e I_b`.
pub fn constant_model_tau(b: usize, e: f64, u: f64, beta: f64) -> Result<f64> {
    let (e, ratio) = check_constant(b, e, u)?;
    let beta_c = 2.0 / e * artanh(ratio);
    if !(beta > 0.0 && beta < beta_c) {
        return Err(Error::OutOfRange {
            what: "beta",
            value: beta,
            lo: 0.0,
            hi: beta_c,
        });
    }
    let delta = constant_model_one_plus_y(e, ratio, beta);
    tau_from_one_plus_y(delta)
}

/// `dτ/dβ` for the constant model, by differentiating the closed form.
pub fn constant_model_tau_prime(b: usize, e: f64, u: f64, beta: f64) -> Result<f64> {
    let (e, ratio) = check_constant(b, e, u)?;
    constant_model_tau(b, e, u, beta)?;
    let x = beta * e;
    let delta = constant_model_one_plus_y(e, ratio, beta);
    let dy = e * (ratio * x.cosh() - x.sinh());
    Ok(-2.0 * dy / (delta * (2.0 - delta)).sqrt())
}

/// `2 arccos(y)` from `δ = 1 + y ∈ (0, 1)`, accurate as `y → −1`.
fn tau_from_one_plus_y(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange {
            what: "cos(tau/2)",
            value: delta - 1.0,
            lo: -1.0,
            hi: 0.0,
        });
    }
    Ok(2.0 * PI - 4.0 * (0.5 * delta).sqrt().asin())
}

/// `D₀`, `D₁` and the discriminant `D₁² − 4D₀` of the multi-orbital
/// boundary equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiOrbitalCoefficients {
    pub d0: f64,
    pub d1: f64,
    /// `(X₁ − X₂ − Y₁ + Y₂)² + 4Y₁Y₂`, equal to `D₁² − 4D₀`.
    pub discriminant: f64,
}

/// Coefficients of the quadratic in `cos(τ/2)` whose larger root gives the
/// exact boundary for `E = e_max I_{b'} ⊕ e_min I_{b−b'}`.
pub fn multiorbital_coefficients(
    b: usize,
    b_prime: usize,
    e_min: f64,
    e_max: f64,
    u: f64,
    beta: f64,
) -> MultiOrbitalCoefficients {
    let au = -u;
    let x1 = (beta * e_max).cosh();
    let x2 = (beta * e_min).cosh();
    let s1 = (beta * e_max).sinh();
    let s2 = (beta * e_min).sinh();
    let bp = b_prime as f64;
    let rest = (b - b_prime) as f64;
    let d0 = x1 * x2 - 0.5 * au * (bp / e_max * s1 * x2 + rest / e_min * x1 * s2);
    let d1 = x1 + x2 - 0.5 * au * (bp / e_max * s1 + rest / e_min * s2);
    let y1 = 0.5 * au * bp / e_max * s1;
    let y2 = 0.5 * au * rest / e_min * s2;
    let diff = x1 - x2 - y1 + y2;
    MultiOrbitalCoefficients {
        d0,
        d1,
        discriminant: diff * diff + 4.0 * y1 * y2,
    }
}

/// Exact boundary `τ(β) = 2 arccos((−D₁ + √(D₁² − 4D₀))/2)`.
pub fn multiorbital_exact_tau(
    b: usize,
    b_prime: usize,
    e_min: f64,
    e_max: f64,
    u: f64,
    beta: f64,
) -> Result<f64> {
    if !(b_prime >= 1 && b_prime < b && e_min > 0.0 && e_min <= e_max && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ b' < b, 0 < e_min ≤ e_max, β > 0; got b = {b}, b' = {b_prime}, \
             e_min = {e_min}, e_max = {e_max}, β = {beta}"
        )));
    }
    let limit = 2.0 * e_min / b as f64;
    if !(u < 0.0 && -u < limit) {
        return Err(Error::Inadmissible { coupling: u, limit });
    }
    let co = multiorbital_coefficients(b, b_prime, e_min, e_max, u, beta);
    if !(co.discriminant > 0.0) {
        return Err(Error::Domain("multi-orbital discriminant"));
    }
    let root = co.discriminant.sqrt();
    // Larger root of y² + D₁y + D₀, in the cancellation-free arrangement.
    let y = if co.d1 <= 0.0 {
        0.5 * (root - co.d1)
    } else {
        -2.0 * co.d0 / (co.d1 + root)
    };
    if !(y > -1.0 && y < 0.0) {
        return Err(Error::OutOfRange {
            what: "cos(tau/2)",
            value: y,
            lo: -1.0,
            hi: 0.0,
        });
    }
    tau_from_one_plus_y(1.0 + y)
}
