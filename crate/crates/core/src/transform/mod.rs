//! Continuous wavelet transform `T_t = f(t²Δ)` acting diagonally on spectral
//! fields, the Calderón identity, and reconstruction from a scale grid.

mod field;
mod holder;
mod localize;

pub use field::{torus_basis_1d, GridField, Manifold, Mode, SpectralField};
pub use holder::{
    holder_fit, holder_test_field, sup_curve, sup_norm, HolderFit, DEFAULT_HOLDER_WINDOW,
};
pub use localize::{localization_report, LocalizationReport, LocalizationRow};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;
use crate::spectral::{band_integral, ScaleGrid, SymbolFunction};

/// Relative mass outside the scale grid tolerated by
/// [`calderon_identity_check`].
pub const OUTSIDE_MASS_TOLERANCE: f64 = 1e-6;

/// How the scale enters the multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleConvention {
    /// `f(t²λ)`; `∫ |f(t²λ)|² dt/t = c/2`.
    #[default]
    Squared,
    /// `f(tλ)`; `∫ |f(tλ)|² dt/t = c`.
    Linear,
}

impl ScaleConvention {
    pub fn argument(self, t: f64, lambda: f64) -> f64 {
        match self {
            ScaleConvention::Squared => t * t * lambda,
            ScaleConvention::Linear => t * lambda,
        }
    }

    /// The constant `c′` with `∫ ‖T_tF‖² dt/t = c′ ‖(I−P)F‖²`.
    pub fn constant(self, f: &SymbolFunction) -> Result<f64> {
        let c = f.calderon()?;
        Ok(match self {
            ScaleConvention::Squared => c / 2.0,
            ScaleConvention::Linear => c,
        })
    }

    fn band(self, grid: &ScaleGrid) -> (f64, f64) {
        match self {
            ScaleConvention::Squared => (grid.t_min().powi(2), grid.t_max().powi(2)),
            ScaleConvention::Linear => (grid.t_min(), grid.t_max()),
        }
    }
}

pub fn apply_wavelet(field: &SpectralField, f: &SymbolFunction, t: f64) -> SpectralField {
    apply_wavelet_with(field, f, t, ScaleConvention::Squared)
}

pub fn apply_wavelet_with(
    field: &SpectralField,
    f: &SymbolFunction,
    t: f64,
    convention: ScaleConvention,
) -> SpectralField {
    field.map_modes(|_, lambda, c| f.evaluate(convention.argument(t, lambda)) * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalderonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Largest relative mass of `|f|²` outside the grid, over the active
/// nonzero eigenvalues of `field`.
pub fn outside_mass(
    field: &SpectralField,
    f: &SymbolFunction,
    grid: &ScaleGrid,
    convention: ScaleConvention,
) -> Result<(f64, f64)> {
    let c = f.calderon()?;
    let (lo, hi) = convention.band(grid);
    let mut worst = (0.0, 0.0);
    let lambdas: Vec<f64> = field
        .coeffs()
        .iter()
        .filter(|&(_, &c)| c != 0.0)
        .map(|(m, _)| field.manifold().eigenvalue(m))
        .filter(|&l| l > 0.0)
        .collect();
    let mut seen: Vec<f64> = lambdas;
    seen.sort_by(f64::total_cmp);
    seen.dedup();
    for lambda in seen {
        let inside = band_integral(f, lo, hi, lambda)?;
        let outside = ((c - inside) / c).abs();
        if outside > worst.0 {
            worst = (outside, lambda);
        }
    }
    Ok(worst)
}

fn ensure_grid_covers(
    field: &SpectralField,
    f: &SymbolFunction,
    grid: &ScaleGrid,
    convention: ScaleConvention,
    tolerance: f64,
) -> Result<()> {
    let (outside, lambda) = outside_mass(field, f, grid, convention)?;
    if outside > tolerance {
        return Err(Error::GridTooNarrow {
            t_min: grid.t_min(),
            t_max: grid.t_max(),
            lambda,
            outside,
        });
    }
    Ok(())
}

/// `∫ ‖T_tF‖² dt/t` by the grid quadrature against `c′ ‖(I−P)F‖²`.
pub fn calderon_identity_check(
    field: &SpectralField,
    f: &SymbolFunction,
    grid: &ScaleGrid,
) -> Result<CalderonCheck> {
    calderon_identity_check_with(field, f, grid, ScaleConvention::Squared)
}

pub fn calderon_identity_check_with(
    field: &SpectralField,
    f: &SymbolFunction,
    grid: &ScaleGrid,
    convention: ScaleConvention,
) -> Result<CalderonCheck> {
    f.ensure_admissible()?;
    ensure_grid_covers(field, f, grid, convention, OUTSIDE_MASS_TOLERANCE)?;
    let per_scale: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| apply_wavelet_with(field, f, t, convention).norm_sq())
        .collect();
    let lhs = kahan_sum(per_scale.iter().zip(grid.weights()).map(|(v, w)| v * w));
    let rhs = convention.constant(f)? * field.mean_free().norm_sq();
    let rel_err = if rhs == 0.0 {
        lhs.abs()
    } else {
        ((lhs - rhs) / rhs).abs()
    };
    Ok(CalderonCheck { lhs, rhs, rel_err })
}

/// `(1/c′) ∫ T_t* T_t F dt/t` over the grid, applied per mode.
pub fn reconstruct(field: &SpectralField, f: &SymbolFunction, grid: &ScaleGrid) -> Result<SpectralField> {
    reconstruct_with_tolerance(field, f, grid, OUTSIDE_MASS_TOLERANCE)
}

/// As [`reconstruct`], accepting grids that leave up to `tolerance` of the
/// relative band mass outside.
pub fn reconstruct_with_tolerance(
    field: &SpectralField,
    f: &SymbolFunction,
    grid: &ScaleGrid,
    tolerance: f64,
) -> Result<SpectralField> {
    f.ensure_admissible()?;
    let convention = ScaleConvention::Squared;
    ensure_grid_covers(field, f, grid, convention, tolerance)?;
    let c = convention.constant(f)?;
    Ok(field.map_modes(|_, lambda, coeff| {
        if lambda == 0.0 {
            return 0.0;
        }
        let g = grid.integrate(|t| f.evaluate(convention.argument(t, lambda)).powi(2));
        g / c * coeff
    }))
}

/// `‖A − B‖ / ‖B‖`.
pub fn relative_l2_error(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let diff = a.combine(1.0, b, -1.0)?;
    Ok(diff.norm() / b.norm())
}

/// A torus field with `count` distinct nonzero modes whose eigenvalues lie in
/// `[eta, l_band]`, coefficients uniform in `[−1, 1]`.
pub fn random_band_field(
    manifold: Manifold,
    count: usize,
    eta: f64,
    l_band: f64,
    seed: u64,
) -> Result<SpectralField> {
    if !manifold.is_torus() {
        return Err(Error::InvalidArgument("random band fields are torus-only".into()));
    }
    let b = (l_band / (4.0 * std::f64::consts::PI.powi(2))).sqrt().floor() as i64;
    let candidates: Vec<Mode> = modes_in_box(manifold.mode_len(), b)
        .into_iter()
        .filter(|m| {
            let l = manifold.eigenvalue(m);
            l >= eta * (1.0 - 1e-12) && l <= l_band * (1.0 + 1e-12)
        })
        .collect();
    if candidates.len() < count {
        return Err(Error::InvalidArgument(format!(
            "only {} modes in [{eta}, {l_band}], {count} requested",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, candidates.len(), count);
    let entries: Vec<(Mode, f64)> = picks
        .into_iter()
        .map(|i| (candidates[i].clone(), rng.random_range(-1.0..=1.0)))
        .collect();
    SpectralField::from_modes(manifold, b.max(0) as usize, entries)
}

/// A zonal sphere field with random coefficients on degrees `1..=l_max`.
pub fn random_zonal_field(l_max: usize, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<(Mode, f64)> = (1..=l_max as i64)
        .map(|l| (vec![l, 0], rng.random_range(-1.0..=1.0)))
        .collect();
    SpectralField::from_modes(Manifold::Sphere2, l_max, entries)
}

fn modes_in_box(dim: usize, b: i64) -> Vec<Mode> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|m| {
                (-b..=b).map(move |k| {
                    let mut m = m.clone();
                    m.push(k);
                    m
                })
            })
            .collect();
    }
    out
}
