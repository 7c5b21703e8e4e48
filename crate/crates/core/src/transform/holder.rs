//! Sup norms of `T_tF` and log-log fitting of their decay in `t`.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::field::{Manifold, SpectralField};
use super::apply_wavelet;
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;
use crate::spectral::SymbolFunction;

pub const DEFAULT_HOLDER_WINDOW: (f64, f64) = (1e-3, 1e-1);

const MIN_FIT_POINTS: usize = 8;

/// `max |T_tF|` over the uniform synthesis grid. Grids coarser than four
/// points per unit of bandlimit produce an `AliasWarning` carrying the
/// estimate.
pub fn sup_norm(field: &SpectralField, t: f64, f: &SymbolFunction, grid_resolution: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("scale t = {t} must be positive")));
    }
    let tf = apply_wavelet(field, f, t);
    let value = tf
        .synthesize_uniform(grid_resolution)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if grid_resolution < 4 * field.bandlimit() {
        return Err(Error::AliasWarning {
            value,
            resolution: grid_resolution,
            bandlimit: field.bandlimit(),
        });
    }
    Ok(value)
}

/// `(t, ‖T_tF‖_∞)` for each scale.
pub fn sup_curve(
    field: &SpectralField,
    f: &SymbolFunction,
    scales: &[f64],
    grid_resolution: usize,
) -> Result<Vec<(f64, f64)>> {
    scales
        .par_iter()
        .map(|&t| sup_norm(field, t, f, grid_resolution).map(|v| (t, v)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderFit {
    pub alpha: f64,
    pub c: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares `log ‖T_tF‖ ≈ log C + α log t` on the scales inside
/// `t_window`.
pub fn holder_fit(sup_curve: &[(f64, f64)], t_window: (f64, f64)) -> Result<HolderFit> {
    let (lo, hi) = t_window;
    let pts: Vec<(f64, f64)> = sup_curve
        .iter()
        .copied()
        .filter(|&(t, _)| t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} scales in [{lo}, {hi}], need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    if pts.iter().all(|&(_, v)| v.abs() < 1e-14) {
        return Err(Error::DegenerateFit("all norms below 1e-14".into()));
    }
    if let Some(&(t, v)) = pts.iter().find(|&&(t, v)| !(t > 0.0) || !(v > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive point ({t}, {v})")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all scales identical".into()));
    }
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(HolderFit {
        alpha,
        c: intercept.exp(),
        r_squared,
        points: pts.len(),
    })
}

/// Fourier coefficients of `|sin πr|^{1/2}` on `T¹` up to `bandlimit`.
///
/// The function is even, so only cosine modes appear. Each coefficient is
/// `2∫₀¹ F(r) cos(2πmr) dr`, folded onto `[0, 1/2]` and integrated in
/// `v = √r` to remove the square-root endpoint behaviour.
pub fn holder_test_field(bandlimit: usize) -> Result<SpectralField> {
    let (x, w) = gauss_legendre(16);
    let v_max = 0.5f64.sqrt();
    let panels = 64 + 4 * bandlimit;
    let h = v_max / panels as f64;
    let mut nodes = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        let a = h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            let v = a + 0.5 * h * (xi + 1.0);
            let r = v * v;
            // dr = 2v dv; folding doubles the integral
            nodes.push((r, 0.5 * h * wi * 2.0 * v * 2.0 * (PI * r).sin().sqrt()));
        }
    }
    let mut entries = Vec::with_capacity(bandlimit + 1);
    for m in 0..=bandlimit {
        let integral: f64 = crate::numeric::kahan_sum(
            nodes.iter().map(|&(r, wt)| wt * (2.0 * PI * m as f64 * r).cos()),
        );
        let coeff = if m == 0 { integral } else { 2.0 * integral };
        entries.push((vec![m as i64], coeff));
    }
    SpectralField::from_modes(Manifold::Torus1, bandlimit, entries)
}
