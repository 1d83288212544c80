//! Brillouin-zone trace integrals `D_d ∫ Tr f(E(k)) dk`.
//!
//! In dual coordinates the zone is the cube `[0, 2π)ᵈ` and the prefactor
//! `D_d` turns the integral into a plain average, so the periodic trapezoid
//! rule is the grid mean of `Σ_ρ f(λ_ρ)`. The grid is doubled until two
//! successive estimates agree to `abs_tol`.

use rayon::prelude::*;

use crate::config::QuadratureConfig;
use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};

/// Grid points per rayon task. Fixed so that results do not depend on the
/// thread count.
const BLOCK: usize = 4096;

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn add_all<const N: usize>(acc: &mut [Neumaier; N], v: [f64; N]) {
    for (a, x) in acc.iter_mut().zip(v) {
        a.add(x);
    }
}

/// Sum of `f(E(k̂))` over the grid points of the `m^d` grid. With
/// `odd_only`, points whose indices are all even are skipped (they belong
/// to the `(m/2)^d` grid and were summed already).
fn grid_sum<const N: usize, F>(model: &DispersionModel, m: usize, odd_only: bool, f: &F) -> [f64; N]
where
    F: Fn(&[f64]) -> [f64; N] + Sync,
{
    let d = model.dim();
    let total = m.pow(d as u32);
    let step = std::f64::consts::TAU / m as f64;
    let block_sum = |start: usize| -> [Neumaier; N] {
        let mut acc = [Neumaier::default(); N];
        let mut eig = vec![0.0; model.orbitals()];
        let mut kd = vec![0.0; d];
        for flat in start..(start + BLOCK).min(total) {
            let mut rest = flat;
            let mut all_even = true;
            for x in kd.iter_mut() {
                let i = rest % m;
                rest /= m;
                all_even &= i.is_multiple_of(2);
                *x = step * i as f64;
            }
            if odd_only && all_even {
                continue;
            }
            model.eigenvalues_dual(&kd, &mut eig);
            add_all(&mut acc, f(&eig));
        }
        acc
    };
    let starts: Vec<usize> = (0..total).step_by(BLOCK).collect();
    let partials: Vec<[Neumaier; N]> = if starts.len() > 1 {
        starts.par_iter().map(|&s| block_sum(s)).collect()
    } else {
        starts.iter().map(|&s| block_sum(s)).collect()
    };
    let mut acc = [Neumaier::default(); N];
    for p in &partials {
        for (a, part) in acc.iter_mut().zip(p) {
            a.add(part.sum);
            a.add(part.comp);
        }
    }
    acc.map(|a| a.value())
}

/// Integrates the per-point function `f` (which receives all eigenvalues at
/// one momentum) over the zone, normalized so that `f ≡ 1` gives `1`.
// TODO: cache the eigenvalues of each refinement level per model; root
// solves on d ≥ 2 bump models spend most of their time recomputing them.
fn zone_average<const N: usize, F>(
    model: &DispersionModel,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<[f64; N]>
where
    F: Fn(&[f64]) -> [f64; N] + Sync,
{
    cfg.validate()?;
    if let Some(eig) = model.constant_eigenvalues() {
        return Ok(f(&eig));
    }
    let d = model.dim() as i32;
    let mut m = cfg.base_points_per_dim;
    let mut sum = grid_sum(model, m, false, &f);
    let mut estimate = sum.map(|s| s / (m as f64).powi(d));
    for _ in 0..cfg.max_doublings {
        m *= 2;
        let extra = grid_sum(model, m, true, &f);
        for (s, e) in sum.iter_mut().zip(extra) {
            *s += e;
        }
        let next = sum.map(|s| s / (m as f64).powi(d));
        let (worst, diff) = estimate
            .iter()
            .zip(&next)
            .enumerate()
            .map(|(i, (a, b))| (i, (a - b).abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if diff < cfg.abs_tol {
            return Ok(next);
        }
        if !diff.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                previous: estimate[worst],
                last: next[worst],
                points: m,
            });
        }
        if m.checked_mul(2).is_none() {
            break;
        }
        estimate = next;
    }
    let worst = (0..N)
        .max_by(|&i, &j| {
            let di = (estimate[i] - sum[i] / (m as f64).powi(d)).abs();
            let dj = (estimate[j] - sum[j] / (m as f64).powi(d)).abs();
            di.total_cmp(&dj)
        })
        .unwrap_or(0);
    Err(Error::QuadratureNonConvergence {
        previous: estimate[worst],
        last: sum[worst] / (m as f64).powi(d),
        points: m,
    })
}

/// `D_d ∫ Tr f(E(k)) dk` for a scalar function `f`.
pub fn trace_integral<F>(model: &DispersionModel, f: F, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    trace_integral_vec(model, |l| [f(l)], cfg).map(|[v]| v)
}

/// Several trace integrals sharing one grid; convergence is required in
/// every component.
pub fn trace_integral_vec<const N: usize, F>(
    model: &DispersionModel,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N] + Sync,
{
    zone_average(
        model,
        |eig: &[f64]| {
            let mut acc = [Neumaier::default(); N];
            for &l in eig {
                add_all(&mut acc, f(l));
            }
            acc.map(|a| a.value())
        },
        cfg,
    )
}

/// `D_d ∫ f(λ_ρ(k)) dk` for the single eigenvalue channel `rho`
/// (zero-based). All models here are diagonal, so this is the `(ρ, ρ)`
/// matrix element of `f(E(k))`.
pub fn channel_integral<F>(
    model: &DispersionModel,
    rho: usize,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let b = model.orbitals();
    if rho >= b {
        return Err(Error::OutOfRange {
            what: "orbital index",
            value: (rho + 1) as f64,
            lo: 1.0,
            hi: b as f64,
        });
    }
    zone_average(model, |eig: &[f64]| [f(eig[rho])], cfg).map(|[v]| v)
}
