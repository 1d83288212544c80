//! Overflow-free evaluation of the hyperbolic kernels built on
//! `q(y) = c + cosh y` with `c = cos(t/2)`.
//!
//! Writing `p = 1 + c = 2 cos²(t/4)` and `σ = sinh²(y/2)` gives
//! `q = p + 2σ`, which keeps full relative accuracy when `c → -1` and
//! `y → 0` simultaneously. Above `LARGE_Y` everything is rescaled by
//! `e^{-y}` instead.

use std::f64::consts::{LN_2, PI};

const LARGE_Y: f64 = 30.0;
const FOUR_PI: f64 = 4.0 * PI;

/// `cos(t/2)`, `1 + cos(t/2)` and `sin(t/2)` for a time variable `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Phase {
    pub c: f64,
    pub p: f64,
    pub sin: f64,
}

impl Phase {
    pub fn new(t: f64) -> Self {
        let r = t.rem_euclid(FOUR_PI);
        // Exact values at the symmetric points, where sin(t/2) must vanish.
        if r == 0.0 {
            return Self {
                c: 1.0,
                p: 2.0,
                sin: 0.0,
            };
        }
        if r == 2.0 * PI {
            return Self {
                c: -1.0,
                p: 0.0,
                sin: 0.0,
            };
        }
        let cq = (0.25 * r).cos();
        Self {
            c: (0.5 * r).cos(),
            p: 2.0 * cq * cq,
            sin: (0.5 * r).sin(),
        }
    }

    /// `sin²(t/2) = p (2 - p)`.
    pub fn sin2(&self) -> f64 {
        self.sin * self.sin
    }
}

/// Scaled quantities for large `y`: `e = e^{-y}` and `den = 2 e^{-y} q`.
struct Scaled {
    e: f64,
    den: f64,
}

impl Scaled {
    fn new(y: f64, p: f64) -> Self {
        let e = (-y).exp();
        let em = -(-y).exp_m1();
        Self {
            e,
            den: em * em + 2.0 * p * e,
        }
    }

    /// `1/q`.
    fn r(&self) -> f64 {
        2.0 * self.e / self.den
    }

    /// `cosh y / q`.
    fn a(&self) -> f64 {
        (1.0 + self.e * self.e) / self.den
    }

    /// `sinh y / q`.
    fn s(&self) -> f64 {
        (1.0 - self.e * self.e) / self.den
    }
}

fn sigma(y: f64) -> f64 {
    let sh = (0.5 * y).sinh();
    sh * sh
}

/// `sinh y / q`.
pub(crate) fn sinh_q(y: f64, ph: &Phase) -> f64 {
    if y > LARGE_Y {
        return Scaled::new(y, ph.p).s();
    }
    y.sinh() / (ph.p + 2.0 * sigma(y))
}

/// `1 / q`.
pub(crate) fn inv_q(y: f64, ph: &Phase) -> f64 {
    if y > LARGE_Y {
        return Scaled::new(y, ph.p).r();
    }
    1.0 / (ph.p + 2.0 * sigma(y))
}

/// `sinh y / q²`.
pub(crate) fn sinh_q2(y: f64, ph: &Phase) -> f64 {
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        return sc.s() * sc.r();
    }
    let q = ph.p + 2.0 * sigma(y);
    y.sinh() / (q * q)
}

/// `ln q`, or `None` when `q` is not positive.
pub(crate) fn log_q(y: f64, ph: &Phase) -> Option<f64> {
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        return Some(y - LN_2 + sc.den.ln());
    }
    let q = ph.p + 2.0 * sigma(y);
    (q > 0.0).then(|| q.ln())
}

/// `d/dy (sinh y / q) = (1 + c cosh y) / q²`.
pub(crate) fn h_prime(y: f64, ph: &Phase) -> f64 {
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        let em = 1.0 - sc.e;
        return 2.0 * sc.e * (ph.p * (1.0 + sc.e * sc.e) - em * em) / (sc.den * sc.den);
    }
    let s = sigma(y);
    let q = ph.p + 2.0 * s;
    (ph.p - 2.0 * s + 2.0 * ph.p * s) / (q * q)
}

/// `d²/dy² (sinh y / q) = sinh y (c² - c cosh y - 2) / q³`.
pub(crate) fn h_second(y: f64, ph: &Phase) -> f64 {
    let c = ph.c;
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        let (r, a, s) = (sc.r(), sc.a(), sc.s());
        return s * r * ((c * c - 2.0) * r - c * a);
    }
    let s = sigma(y);
    let q = ph.p + 2.0 * s;
    let num = ph.p * ph.p - 3.0 * ph.p + 2.0 * s * (1.0 - ph.p);
    y.sinh() * num / (q * q * q)
}

/// `(cosh² y - c cosh y - 2) / q³`, the `c`-derivative of `h_prime`.
pub(crate) fn h_prime_dc(y: f64, ph: &Phase) -> f64 {
    let c = ph.c;
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        let (r, a) = (sc.r(), sc.a());
        return r * (a * a - c * a * r - 2.0 * r * r);
    }
    let s = sigma(y);
    let q = ph.p + 2.0 * s;
    let num = 6.0 * s + 4.0 * s * s - ph.p - 2.0 * ph.p * s;
    num / (q * q * q)
}

/// `sinh y (c² + c cosh y + 2 sin²(t/2)) / q³`.
pub(crate) fn tt_kernel(y: f64, ph: &Phase) -> f64 {
    let c = ph.c;
    if y > LARGE_Y {
        let sc = Scaled::new(y, ph.p);
        let (r, a, s) = (sc.r(), sc.a(), sc.s());
        return s * r * ((c * c + 2.0 * ph.sin2()) * r + c * a);
    }
    let s = sigma(y);
    let q = ph.p + 2.0 * s;
    let num = 3.0 * ph.p - ph.p * ph.p + 2.0 * (ph.p - 1.0) * s;
    y.sinh() * num / (q * q * q)
}
