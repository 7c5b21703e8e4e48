//! Weighted sup norms `t^n (1 + d/t)^N |K_t(x₀, ·)|` across scales.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::field::Manifold;
use crate::error::{Error, Result};
use crate::numeric::linspace;
use crate::spectral::SymbolFunction;
use crate::sphere::ZonalKernel;
use crate::torus::{default_bandlimit, factored_t2_scale, torus_kernel, SeriesMode, ThetaPair, TorusPoint};

pub const MAX_WEIGHT_POWER: u32 = 6;

const SPHERE_SAMPLES: usize = 4096;
const TORUS1_SAMPLES: usize = 2048;
const TORUS2_FACTORED_SAMPLES: usize = 256;
const TORUS2_LATTICE_SAMPLES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationRow {
    pub t: f64,
    /// Grid sup of the weighted kernel.
    pub sup: f64,
    /// Distance from `x₀` where the sup is attained.
    pub at_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub manifold: Manifold,
    pub power: u32,
    pub rows: Vec<LocalizationRow>,
    /// `max_t sup / min_t sup`.
    pub ratio: f64,
}

/// For each `t`, the grid sup over `y` of `t^n (1 + d(x₀, y)/t)^N |K_t(x₀, y)|`
/// with `x₀` the north pole or the origin.
pub fn localization_report(
    f: &SymbolFunction,
    manifold: Manifold,
    t_list: &[f64],
    power: u32,
) -> Result<LocalizationReport> {
    if power > MAX_WEIGHT_POWER {
        return Err(Error::InvalidArgument(format!("N = {power} exceeds {MAX_WEIGHT_POWER}")));
    }
    if t_list.is_empty() || t_list.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument("scales must be positive and nonempty".into()));
    }
    let rows = t_list
        .iter()
        .map(|&t| {
            let samples = match manifold {
                Manifold::Sphere2 => sphere_samples(f, t)?,
                Manifold::Torus1 => torus1_samples(f, t)?,
                Manifold::Torus2 => torus2_samples(f, t)?,
            };
            let n = manifold.dim() as i32;
            let (sup, at_distance) = samples
                .into_iter()
                .map(|(d, k)| (t.powi(n) * (1.0 + d / t).powi(power as i32) * k.abs(), d))
                .fold((0.0f64, 0.0f64), |best, cur| if cur.0 > best.0 { cur } else { best });
            Ok(LocalizationRow { t, sup, at_distance })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.sup).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.sup).fold(f64::INFINITY, f64::min);
    Ok(LocalizationReport {
        manifold,
        power,
        rows,
        ratio: max / min,
    })
}

/// `(d, K_t)` along a meridian from the pole.
fn sphere_samples(f: &SymbolFunction, t: f64) -> Result<Vec<(f64, f64)>> {
    let kernel = ZonalKernel::with_default_cutoff(f, t, 2)?;
    Ok(linspace(0.0, PI, SPHERE_SAMPLES)
        .into_par_iter()
        .map(|theta| (theta, kernel.sum(theta.cos())))
        .collect())
}

fn torus1_samples(f: &SymbolFunction, t: f64) -> Result<Vec<(f64, f64)>> {
    let b = default_bandlimit(t);
    (0..=TORUS1_SAMPLES / 2)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / TORUS1_SAMPLES as f64;
            let k = lattice_value(f, t, &TorusPoint::new(vec![x]), b)?;
            Ok((x, k))
        })
        .collect()
}

fn torus2_samples(f: &SymbolFunction, t: f64) -> Result<Vec<(f64, f64)>> {
    if let Some((tau, scale)) = factored_t2_scale(f, t) {
        // separable: h = U(s₁)V(s₂) + U(s₂)V(s₁)
        let r = TORUS2_FACTORED_SAMPLES;
        let pair = ThetaPair::new(tau, SeriesMode::auto(tau))?;
        let axis: Vec<f64> = (0..=r / 2).map(|i| i as f64 / r as f64).collect();
        let u: Vec<f64> = axis.iter().map(|&x| pair.u(x)).collect();
        let v: Vec<f64> = axis.iter().map(|&x| pair.v(x)).collect();
        let mut out = Vec::with_capacity(axis.len() * axis.len());
        for i in 0..axis.len() {
            for j in 0..axis.len() {
                let d = axis[i].hypot(axis[j]);
                out.push((d, scale * (u[i] * v[j] + u[j] * v[i])));
            }
        }
        return Ok(out);
    }
    let r = TORUS2_LATTICE_SAMPLES;
    let b = default_bandlimit(t);
    let axis: Vec<f64> = (0..=r / 2).map(|i| i as f64 / r as f64).collect();
    let pts: Vec<(f64, f64)> = axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect();
    pts.into_par_iter()
        .map(|(x, y)| {
            let k = lattice_value(f, t, &TorusPoint::new(vec![x, y]), b)?;
            Ok((x.hypot(y), k))
        })
        .collect()
}

fn lattice_value(f: &SymbolFunction, t: f64, p: &TorusPoint, bandlimit: usize) -> Result<f64> {
    match torus_kernel(f, t, p, bandlimit) {
        Err(e @ Error::TruncationWarning { .. }) => Ok(e.partial_value().unwrap_or(0.0)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_space;

    #[test]
    fn sphere_weighted_sup_is_bounded() {
        let ts = log_space(0.05, 1.0, 12);
        let rep = localization_report(&SymbolFunction::mexican(1), Manifold::Sphere2, &ts, 3).unwrap();
        assert!(rep.ratio <= 10.0, "{rep:?}");
        let rep0 = localization_report(&SymbolFunction::mexican(1), Manifold::Sphere2, &ts, 0).unwrap();
        assert!(rep0.ratio <= 4.0, "{rep0:?}");
        assert!(rep0.rows.iter().all(|r| r.at_distance == 0.0));
    }

    #[test]
    fn torus_paper_symbol_is_bounded() {
        let ts = log_space(0.05, 1.0, 8);
        let rep = localization_report(&SymbolFunction::paper_torus(), Manifold::Torus2, &ts, 3).unwrap();
        assert!(rep.ratio <= 10.0, "{rep:?}");
    }

    #[test]
    fn torus_weighted_sup_has_upper_bound() {
        // The upper half of the estimate holds uniformly; the kernel itself
        // collapses once 4π²t² is large, so only the sup is bounded.
        let ts = log_space(0.05, 1.0, 8);
        let rep = localization_report(&SymbolFunction::mexican(1), Manifold::Torus2, &ts, 3).unwrap();
        let small_t = rep.rows[0].sup;
        assert!(rep.rows.iter().all(|r| r.sup <= 10.0 * small_t));
    }

    #[test]
    fn factored_and_lattice_paths_agree() {
        let f = SymbolFunction::mexican(1);
        let t = 0.2;
        let fact = torus2_samples(&f, t).unwrap();
        let (d, k) = fact[3 * (TORUS2_FACTORED_SAMPLES / 2 + 1) + 5];
        let p = TorusPoint::new(vec![3.0 / 256.0, 5.0 / 256.0]);
        let direct = torus_kernel(&f, t, &p, default_bandlimit(t)).unwrap();
        assert!((k - direct).abs() < 1e-9 * direct.abs().max(1.0));
        assert!((d - p.coords()[0].hypot(p.coords()[1])).abs() < 1e-15);
    }

    #[test]
    fn torus1_report_runs() {
        let rep = localization_report(&SymbolFunction::mexican(1), Manifold::Torus1, &[0.05, 0.1, 0.2], 2).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.ratio >= 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = SymbolFunction::mexican(1);
        assert!(localization_report(&f, Manifold::Sphere2, &[0.1], 7).is_err());
        assert!(localization_report(&f, Manifold::Sphere2, &[], 3).is_err());
        assert!(localization_report(&f, Manifold::Sphere2, &[0.0], 3).is_err());
    }
}
