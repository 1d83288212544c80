//! Gapped dispersion relations on the momentum torus.
//!
//! Every model in this crate is diagonal in a fixed orbital basis, so a
//! model is fully described by its eigenvalues as functions of the dual
//! coordinates `k̂ = V⁻¹ k`, where the columns of `V` are the dual basis
//! vectors. Only eigenvalues are exposed; all integrals of interest are
//! traces of scalar functions of `E(k)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Lattice geometry of the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct BzGeometry {
    dim: usize,
    /// Column-major `d × d` matrix whose columns are the dual basis vectors.
    dual_basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    norm: f64,
}

impl BzGeometry {
    /// Canonical basis `v̂_j = e_j`, for which `D_d = (2π)⁻ᵈ`.
    pub fn canonical(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Self::from_columns(dim, DMatrix::identity(dim, dim))
    }

    /// Builds a geometry from dual basis vectors given as rows of `vectors`
    /// (`vectors[j]` is `v̂_{j+1}`).
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter(
                "dual basis must be a square d × d array".into(),
            ));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| vectors[j][i]);
        Self::from_columns(dim, m)
    }

    fn from_columns(dim: usize, dual_basis: DMatrix<f64>) -> Result<Self> {
        if dual_basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("dual basis is not finite".into()));
        }
        let det = dual_basis.determinant();
        let inverse = dual_basis
            .clone()
            .try_inverse()
            .filter(|_| det != 0.0 && det.is_finite())
            .ok_or_else(|| Error::InvalidParameter("dual basis is singular".into()))?;
        let norm = 1.0 / (det.abs() * TWO_PI.powi(dim as i32));
        Ok(Self {
            dim,
            dual_basis,
            inverse,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D_d = |det(v̂₁,…,v̂_d)|⁻¹ (2π)⁻ᵈ`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Dual basis vector `v̂_{j+1}`.
    pub fn basis_vector(&self, j: usize) -> Vec<f64> {
        self.dual_basis.column(j).iter().copied().collect()
    }

    /// Maps a momentum `k` to its dual coordinates `V⁻¹ k`.
    pub fn to_dual(&self, k: &[f64]) -> Result<Vec<f64>> {
        if k.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.inverse[(i, j)] * k[j]).sum())
            .collect())
    }

    /// Maps dual coordinates back to a momentum.
    pub fn from_dual(&self, kd: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.dual_basis[(i, j)] * kd[j]).sum())
            .collect()
    }
}

/// Fractions `0 < s < t < 1` of the Brillouin zone on which the bump
/// dispersion sits at `e_max` (measure `s`) and away from `e_min`
/// (measure `t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureFractions {
    s: f64,
    t: f64,
}

impl MeasureFractions {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(0.0 < s && s < t && t < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "measure fractions need 0 < s < t < 1, got s = {s}, t = {t}"
            )));
        }
        Ok(Self { s, t })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// The concrete dispersion families.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionKind {
    /// `E(k) = e I_b`.
    ConstantDiagonal { b: usize, e: f64 },
    /// `E(k) = e_max I_{b'} ⊕ e_min I_{b-b'}`.
    MultiOrbitalDiagonal {
        b: usize,
        b_prime: usize,
        e_min: f64,
        e_max: f64,
    },
    /// `E(k) = t (cos k + 1) + e_min` on the one-dimensional lattice.
    Cosine1D { t_hop: f64, e_min: f64 },
    /// `E(k) = Φ(V⁻¹k) I_b` with a smooth plateau bump `Φ`.
    Bump {
        b: usize,
        fractions: MeasureFractions,
        e_min: f64,
        e_max: f64,
    },
}

impl DispersionKind {
    pub fn name(&self) -> &'static str {
        match self {
            DispersionKind::ConstantDiagonal { .. } => "constant_diagonal",
            DispersionKind::MultiOrbitalDiagonal { .. } => "multi_orbital",
            DispersionKind::Cosine1D { .. } => "cosine_1d",
            DispersionKind::Bump { .. } => "bump",
        }
    }
}

/// Smooth plateau profile `φ` of the bump dispersion in one dual coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BumpProfile {
    plateau: f64,
    support: f64,
    height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Top,
    Between,
    Bottom,
}

/// `exp(-1/x)` for `x > 0`, else `0`.
fn mollifier_ramp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl BumpProfile {
    fn new(dim: usize, fractions: MeasureFractions, e_min: f64, e_max: f64) -> Self {
        let inv_d = 1.0 / dim as f64;
        Self {
            plateau: PI * fractions.s.powf(inv_d),
            support: PI * fractions.t.powf(inv_d),
            height: (e_max - e_min).powf(inv_d),
        }
    }

    fn level(&self, x: f64) -> Level {
        let u = (x - PI).abs();
        if u <= self.plateau {
            Level::Top
        } else if u >= self.support {
            Level::Bottom
        } else {
            Level::Between
        }
    }

    /// `x` must already be reduced to `[0, 2π)`.
    fn eval(&self, x: f64) -> f64 {
        let u = (x - PI).abs();
        if u <= self.plateau {
            return self.height;
        }
        if u >= self.support {
            return 0.0;
        }
        let inner = mollifier_ramp(self.support - u);
        let outer = mollifier_ramp(u - self.plateau);
        self.height * inner / (inner + outer)
    }
}

/// A gapped dispersion relation together with its Brillouin-zone geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    kind: DispersionKind,
    geometry: BzGeometry,
    bump: Option<BumpProfile>,
}

impl DispersionModel {
    pub fn constant(b: usize, e: f64) -> Result<Self> {
        Self::new(
            DispersionKind::ConstantDiagonal { b, e },
            BzGeometry::canonical(1)?,
        )
    }

    pub fn multi_orbital(b: usize, b_prime: usize, e_min: f64, e_max: f64) -> Result<Self> {
        Self::new(
            DispersionKind::MultiOrbitalDiagonal {
                b,
                b_prime,
                e_min,
                e_max,
            },
            BzGeometry::canonical(1)?,
        )
    }

    pub fn cosine_1d(t_hop: f64, e_min: f64) -> Result<Self> {
        Self::new(
            DispersionKind::Cosine1D { t_hop, e_min },
            BzGeometry::canonical(1)?,
        )
    }

    /// Validates the parameters of `kind` against `geometry`.
    pub fn new(kind: DispersionKind, geometry: BzGeometry) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match &kind {
            DispersionKind::ConstantDiagonal { b, e } => {
                if *b == 0 || !e.is_finite() || *e == 0.0 {
                    return bad(format!(
                        "constant model needs b ≥ 1 and e ≠ 0, got b = {b}, e = {e}"
                    ));
                }
            }
            DispersionKind::MultiOrbitalDiagonal {
                b,
                b_prime,
                e_min,
                e_max,
            } => {
                if *b < 2 || *b_prime == 0 || b_prime >= b {
                    return bad(format!(
                        "multi-orbital model needs b ≥ 2 and 1 ≤ b' < b, got b = {b}, b' = {b_prime}"
                    ));
                }
                if !positive(*e_min) || !positive(*e_max) || e_min > e_max {
                    return bad(format!(
                        "multi-orbital model needs 0 < e_min ≤ e_max, got {e_min}, {e_max}"
                    ));
                }
            }
            DispersionKind::Cosine1D { t_hop, e_min } => {
                if geometry.dim() != 1 {
                    return bad("cosine model is one-dimensional".into());
                }
                if !(t_hop.is_finite() && *t_hop >= 0.0) || !positive(*e_min) {
                    return bad(format!(
                        "cosine model needs t ≥ 0 and e_min > 0, got t = {t_hop}, e_min = {e_min}"
                    ));
                }
            }
            DispersionKind::Bump {
                b, e_min, e_max, ..
            } => {
                if *b == 0 {
                    return bad("bump model needs b ≥ 1".into());
                }
                if !positive(*e_min) || !positive(*e_max) || e_min >= e_max {
                    return bad(format!(
                        "bump model needs 0 < e_min < e_max, got {e_min}, {e_max}"
                    ));
                }
            }
        }
        let bump = match &kind {
            DispersionKind::Bump {
                fractions,
                e_min,
                e_max,
                ..
            } => Some(BumpProfile::new(geometry.dim(), *fractions, *e_min, *e_max)),
            _ => None,
        };
        Ok(Self {
            kind,
            geometry,
            bump,
        })
    }

    pub fn kind(&self) -> &DispersionKind {
        &self.kind
    }

    pub fn geometry(&self) -> &BzGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    /// Number of orbitals `b`.
    pub fn orbitals(&self) -> usize {
        match self.kind {
            DispersionKind::ConstantDiagonal { b, .. }
            | DispersionKind::MultiOrbitalDiagonal { b, .. }
            | DispersionKind::Bump { b, .. } => b,
            DispersionKind::Cosine1D { .. } => 1,
        }
    }

    /// Certified lower bound on `|λ_ρ(k)|`.
    pub fn e_min(&self) -> f64 {
        match self.kind {
            DispersionKind::ConstantDiagonal { e, .. } => e.abs(),
            DispersionKind::MultiOrbitalDiagonal { e_min, .. }
            | DispersionKind::Cosine1D { e_min, .. }
            | DispersionKind::Bump { e_min, .. } => e_min,
        }
    }

    /// Certified upper bound on `|λ_ρ(k)|`.
    pub fn e_max(&self) -> f64 {
        match self.kind {
            DispersionKind::ConstantDiagonal { e, .. } => e.abs(),
            DispersionKind::MultiOrbitalDiagonal { e_max, .. }
            | DispersionKind::Bump { e_max, .. } => e_max,
            DispersionKind::Cosine1D { t_hop, e_min } => 2.0 * t_hop + e_min,
        }
    }

    /// Eigenvalues when they do not depend on `k`.
    pub fn constant_eigenvalues(&self) -> Option<Vec<f64>> {
        match self.kind {
            DispersionKind::ConstantDiagonal { b, e } => Some(vec![e; b]),
            DispersionKind::MultiOrbitalDiagonal {
                b,
                b_prime,
                e_min,
                e_max,
            } => {
                let mut v = vec![e_max; b_prime];
                v.resize(b, e_min);
                Some(v)
            }
            DispersionKind::Cosine1D { t_hop: 0.0, e_min } => Some(vec![e_min]),
            _ => None,
        }
    }

    /// Eigenvalues `λ_1(k), …, λ_b(k)` at a momentum `k`.
    pub fn eigenvalues(&self, k: &[f64]) -> Result<Vec<f64>> {
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("momentum is not finite".into()));
        }
        let kd = self.geometry.to_dual(k)?;
        let mut out = vec![0.0; self.orbitals()];
        self.eigenvalues_dual(&kd, &mut out);
        Ok(out)
    }

    /// Eigenvalues at dual coordinates `kd`, written into `out` (length `b`).
    pub fn eigenvalues_dual(&self, kd: &[f64], out: &mut [f64]) {
        debug_assert_eq!(kd.len(), self.dim());
        debug_assert_eq!(out.len(), self.orbitals());
        match self.kind {
            DispersionKind::ConstantDiagonal { e, .. } => out.fill(e),
            DispersionKind::MultiOrbitalDiagonal {
                b_prime,
                e_min,
                e_max,
                ..
            } => {
                out[..b_prime].fill(e_max);
                out[b_prime..].fill(e_min);
            }
            DispersionKind::Cosine1D { t_hop, e_min } => {
                out[0] = t_hop * (kd[0].cos() + 1.0) + e_min;
            }
            DispersionKind::Bump { e_min, .. } => {
                let profile = self.bump.as_ref().expect("bump profile");
                let prod: f64 = kd
                    .iter()
                    .map(|&x| profile.eval(x.rem_euclid(TWO_PI)))
                    .product();
                out.fill(prod + e_min);
            }
        }
    }
}

/// Builds the plateau bump dispersion `E(k) = Φ(V⁻¹k) I_b`.
///
/// `Φ(x) = Π_j φ(x_j) + e_min` equals `e_max` on the cube
/// `|x_j - π| ≤ π s^{1/d}` and `e_min` outside `|x_j - π| < π t^{1/d}`, so
/// the normalized measures of the two level sets are `s` and `1 - t`.
pub fn build_bump_dispersion(
    b: usize,
    fractions: MeasureFractions,
    e_min: f64,
    e_max: f64,
    geometry: BzGeometry,
) -> Result<DispersionModel> {
    DispersionModel::new(
        DispersionKind::Bump {
            b,
            fractions,
            e_min,
            e_max,
        },
        geometry,
    )
}

/// Calls `f` on every point of the uniform `m^d` grid in dual coordinates.
pub(crate) fn for_each_grid_point(dim: usize, m: usize, mut f: impl FnMut(&[f64])) {
    let step = TWO_PI / m as f64;
    let mut idx = vec![0usize; dim];
    let mut kd = vec![0.0; dim];
    loop {
        for (x, &i) in kd.iter_mut().zip(&idx) {
            *x = step * i as f64;
        }
        f(&kd);
        let mut axis = 0;
        loop {
            if axis == dim {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < m {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

fn points_per_dim(dim: usize, n_samples: usize) -> usize {
    let mut m = (n_samples as f64).powf(1.0 / dim as f64).floor() as usize;
    while (m + 1)
        .checked_pow(dim as u32)
        .is_some_and(|p| p <= n_samples)
    {
        m += 1;
    }
    while m > 2 && m.pow(dim as u32) > n_samples {
        m -= 1;
    }
    m.max(2)
}

/// Minimum and maximum of `|λ_ρ(k)|` over a uniform grid of about
/// `n_samples` points (at least two per dimension).
pub fn verify_bounds(model: &DispersionModel, n_samples: usize) -> (f64, f64) {
    let m = points_per_dim(model.dim(), n_samples);
    let mut eig = vec![0.0; model.orbitals()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for_each_grid_point(model.dim(), m, |kd| {
        model.eigenvalues_dual(kd, &mut eig);
        for &l in &eig {
            lo = lo.min(l.abs());
            hi = hi.max(l.abs());
        }
    });
    (lo, hi)
}

/// Fractions of the zone where `Tr|E(k)|` equals `b e_max` and `b e_min`,
/// counted on an `m^d` grid. The counting error of each fraction is at most
/// `2d/m`.
///
/// For the bump model membership is decided from the branch of the profile
/// in each coordinate. Comparing floating-point values would not work:
/// within about `1/37` of the plateau edge `exp(-1/x)` is below machine
/// epsilon relative to the plateau value, so `Φ` rounds to `e_max` there.
/// Other kinds compare `Tr|E|` against the levels to `1e-12` relative.
pub fn level_set_fractions(model: &DispersionModel, m: usize) -> (f64, f64) {
    let b = model.orbitals() as f64;
    let (top, bottom) = (b * model.e_max(), b * model.e_min());
    let mut eig = vec![0.0; model.orbitals()];
    let (mut n_top, mut n_bottom, mut total) = (0usize, 0usize, 0usize);
    for_each_grid_point(model.dim(), m, |kd| {
        let (is_top, is_bottom) = match &model.bump {
            Some(profile) => {
                let levels = kd.iter().map(|&x| profile.level(x.rem_euclid(TWO_PI)));
                let (mut all_top, mut any_bottom) = (true, false);
                for l in levels {
                    all_top &= l == Level::Top;
                    any_bottom |= l == Level::Bottom;
                }
                (all_top, any_bottom)
            }
            None => {
                model.eigenvalues_dual(kd, &mut eig);
                let tr: f64 = eig.iter().map(|l| l.abs()).sum();
                (
                    (tr - top).abs() <= 1e-12 * top,
                    (tr - bottom).abs() <= 1e-12 * bottom,
                )
            }
        };
        n_top += is_top as usize;
        n_bottom += is_bottom as usize;
        total += 1;
    });
    (n_top as f64 / total as f64, n_bottom as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cosine_eigenvalues_at_symmetric_points() {
        let m = DispersionModel::cosine_1d(1.0, 1.0).unwrap();
        assert_eq!(m.eigenvalues(&[PI]).unwrap(), vec![1.0]);
        assert_eq!(m.eigenvalues(&[0.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn multi_orbital_eigenvalues_are_k_independent() {
        let m = DispersionModel::multi_orbital(8, 7, 1.0, 7.0).unwrap();
        let expected = vec![7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 1.0];
        assert_eq!(m.eigenvalues(&[0.3]).unwrap(), expected);
        assert_eq!(m.eigenvalues(&[-12.0]).unwrap(), expected);
        assert_eq!(m.constant_eigenvalues().unwrap(), expected);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = DispersionModel::cosine_1d(1.0, 1.0).unwrap();
        assert_eq!(
            m.eigenvalues(&[0.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn geometry_norm_matches_determinant() {
        let g = BzGeometry::new(&[vec![2.0, 0.5], vec![0.0, 1.5]]).unwrap();
        let expected = 1.0 / (3.0 * TWO_PI.powi(2));
        assert!(((g.norm() - expected) / expected).abs() < 1e-14);
        assert!((BzGeometry::canonical(3).unwrap().norm() - TWO_PI.powi(-3)).abs() < 1e-18);
        assert!(BzGeometry::new(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        let k = [0.7, -1.3];
        let back = g.from_dual(&g.to_dual(&k).unwrap());
        assert!((back[0] - k[0]).abs() < 1e-14 && (back[1] - k[1]).abs() < 1e-14);
    }

    #[test]
    fn bump_rejects_degenerate_levels_and_fractions() {
        let g = BzGeometry::canonical(1).unwrap();
        let fr = MeasureFractions::new(0.25, 0.5).unwrap();
        assert!(build_bump_dispersion(1, fr, 1.0, 1.0, g.clone()).is_err());
        assert!(MeasureFractions::new(0.5, 0.25).is_err());
        assert!(MeasureFractions::new(0.0, 0.5).is_err());
        assert!(MeasureFractions::new(0.2, 1.0).is_err());
    }

    #[test]
    fn bump_level_sets_have_requested_measure() {
        let g = BzGeometry::canonical(1).unwrap();
        let fr = MeasureFractions::new(0.25, 0.5).unwrap();
        let m = build_bump_dispersion(1, fr, 1.0, 2.0, g).unwrap();
        let n = 1 << 18;
        let (top, bottom) = level_set_fractions(&m, n);
        let tol = 2.0 / n as f64;
        assert!((top - 0.25).abs() <= tol, "top = {top}");
        assert!((bottom - 0.5).abs() <= tol, "bottom = {bottom}");
    }

    #[test]
    fn bump_in_two_dimensions() {
        let g = BzGeometry::canonical(2).unwrap();
        let fr = MeasureFractions::new(0.2, 0.6).unwrap();
        let m = build_bump_dispersion(2, fr, 1.0, 3.0, g).unwrap();
        assert!((m.eigenvalues(&[PI, PI]).unwrap()[0] - 3.0).abs() < 1e-12);
        assert_eq!(m.eigenvalues(&[0.0, PI]).unwrap(), vec![1.0, 1.0]);
        let n = 1024;
        let (top, bottom) = level_set_fractions(&m, n);
        let tol = 4.0 / n as f64;
        assert!((top - 0.2).abs() <= tol, "top = {top}");
        assert!((bottom - 0.4).abs() <= tol, "bottom = {bottom}");
    }

    #[test]
    fn verify_bounds_examples() {
        let c = DispersionModel::constant(1, 1.0).unwrap();
        assert_eq!(verify_bounds(&c, 64), (1.0, 1.0));

        let cos = DispersionModel::cosine_1d(1.0, 1.0).unwrap();
        let (lo, hi) = verify_bounds(&cos, 256);
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);

        let fr = MeasureFractions::new(0.25, 0.5).unwrap();
        let bump =
            build_bump_dispersion(1, fr, 1.0, 2.0, BzGeometry::canonical(1).unwrap()).unwrap();
        let (lo, hi) = verify_bounds(&bump, 4096);
        assert!((lo - 1.0).abs() <= 1e-12 && (hi - 2.0).abs() <= 1e-12);
    }

    fn models() -> Vec<DispersionModel> {
        let fr = MeasureFractions::new(0.1, 0.7).unwrap();
        vec![
            DispersionModel::constant(2, 1.5).unwrap(),
            DispersionModel::multi_orbital(8, 7, 1.0, 7.0).unwrap(),
            DispersionModel::cosine_1d(0.8, 0.5).unwrap(),
            build_bump_dispersion(2, fr, 0.5, 4.0, BzGeometry::canonical(1).unwrap()).unwrap(),
            build_bump_dispersion(
                1,
                fr,
                0.5,
                4.0,
                BzGeometry::new(&[vec![1.0, 0.3], vec![-0.2, 0.9]]).unwrap(),
            )
            .unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn eigenvalues_are_periodic_even_and_bounded(k0 in -20.0f64..20.0, k1 in -20.0f64..20.0, j in 0usize..2) {
            for m in models() {
                let k: Vec<f64> = [k0, k1][..m.dim()].to_vec();
                let base = m.eigenvalues(&k).unwrap();
                let jj = j.min(m.dim() - 1);
                let shift = m.geometry().basis_vector(jj);
                let shifted: Vec<f64> = k.iter().zip(&shift).map(|(a, v)| a + TWO_PI * v).collect();
                let neg: Vec<f64> = k.iter().map(|a| -a).collect();
                let per = m.eigenvalues(&shifted).unwrap();
                let refl = m.eigenvalues(&neg).unwrap();
                for r in 0..base.len() {
                    prop_assert!((per[r] - base[r]).abs() < 1e-12);
                    prop_assert!((refl[r] - base[r]).abs() < 1e-12);
                    prop_assert!(base[r].abs() >= m.e_min() - 1e-12);
                    prop_assert!(base[r].abs() <= m.e_max() + 1e-12);
                }
            }
        }

        #[test]
        fn bump_plateau_is_exactly_e_max(u in -1.0f64..1.0, v in -1.0f64..1.0, s in 0.05f64..0.5) {
            let fr = MeasureFractions::new(s, (s + 0.3).min(0.95)).unwrap();
            let m = build_bump_dispersion(1, fr, 1.0, 2.5, BzGeometry::canonical(2).unwrap()).unwrap();
            let c = PI * s.sqrt();
            let k = [PI + u * c, PI + v * c];
            prop_assert!((m.eigenvalues(&k).unwrap()[0] - 2.5).abs() <= 1e-12);
        }
    }
}
