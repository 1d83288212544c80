//! Bracketing root finder shared by all solvers.

use crate::config::RootConfig;
use crate::error::{Error, Result};

/// Bracket width below which secant steps are attempted.
const SECANT_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Finds a sign change of `f` inside `[lo, hi]`, given `f(lo)` and `f(hi)`
/// of opposite sign.
///
/// Bisection, switching to a safeguarded secant step once the bracket is
/// narrower than `1e-3`. A root is accepted when `|f| ≤ abs_tol` and the
/// bracket is narrower than `x_tol`, or when the bracket cannot shrink any
/// further in floating point.
pub(crate) fn find_root<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    cfg: &RootConfig,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            fx: 0.0,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            fx: 0.0,
            iterations: 0,
        });
    }
    if !(f_lo.signum() != f_hi.signum() && lo < hi) {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    let mut last_width = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let width = hi - lo;
        let best = if f_lo.abs() <= f_hi.abs() {
            Root {
                x: lo,
                fx: f_lo,
                iterations: iter - 1,
            }
        } else {
            Root {
                x: hi,
                fx: f_hi,
                iterations: iter - 1,
            }
        };
        let ulp_floor = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        if (best.fx.abs() <= cfg.abs_tol && width <= cfg.x_tol) || width <= ulp_floor {
            return Ok(best);
        }

        let mid = lo + 0.5 * width;
        let mut x = mid;
        if width < SECANT_WIDTH && width <= 0.5 * last_width {
            let s = lo - f_lo * width / (f_hi - f_lo);
            let margin = 0.01 * width;
            if s > lo + margin && s < hi - margin {
                x = s;
            }
        }
        if !(x > lo && x < hi) {
            x = mid;
        }
        last_width = width;

        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(Root {
                x,
                fx,
                iterations: iter,
            });
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Err(Error::MaxIterations(cfg.max_iter))
}
