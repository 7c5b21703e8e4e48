//! Wavelet kernels on the flat torus `T^n = R^n / Z^n`.
//!
//! Eigenfunctions are `e^{2πi m·r}` with eigenvalue `4π²‖m‖²`, so
//! `K_t(r, s) = Σ_m f(4π²t²‖m‖²) e^{2πi m·(r−s)}`. For the two-dimensional
//! Mexican hat the lattice sum factors into the one-dimensional theta-type
//! series `U_t` and `V_t`, each of which has a rapidly converging eigen form
//! (large `t`) and a Poisson-summed form (small `t`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::sum_descending;
use crate::spectral::{SymbolFunction, SymbolKind};

/// Relative size of the boundary shell above which a lattice sum is flagged.
pub const SHELL_TOLERANCE: f64 = 1e-12;
/// `t` at and above which the eigen series is the default.
pub const MODE_THRESHOLD: f64 = 1.0;

/// A point of `T^n` with coordinates reduced into `(-1/2, 1/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        let coords = coords.into().into_iter().map(reduce).collect();
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Component-wise `self − other`, reduced.
    pub fn difference(&self, other: &TorusPoint) -> Result<TorusPoint> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(TorusPoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        ))
    }
}

fn reduce(x: f64) -> f64 {
    let y = x - x.floor();
    if y > 0.5 {
        y - 1.0
    } else {
        y
    }
}

pub fn torus_eigenvalue(m: &[i64]) -> f64 {
    let norm2: i64 = m.iter().map(|k| k * k).sum();
    4.0 * PI * PI * norm2 as f64
}

/// Geodesic distance: Euclidean length of the wrapped coordinate differences.
pub fn torus_distance(p: &TorusPoint, q: &TorusPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(p.coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| {
            let d = (a - b).abs().rem_euclid(1.0);
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    EigenSeries,
    PoissonSeries,
}

impl SeriesMode {
    pub fn auto(t: f64) -> Self {
        if t >= MODE_THRESHOLD {
            SeriesMode::EigenSeries
        } else {
            SeriesMode::PoissonSeries
        }
    }
}

/// The pair `U_t(x) = Σ e^{−πt²n²} e^{2πinx}` and
/// `V_t(x) = Σ (nt)² e^{−πt²n²} e^{2πinx}` at a fixed scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    t: f64,
    truncation_n: i64,
    mode: SeriesMode,
}

impl ThetaPair {
    pub fn new(t: f64, mode: SeriesMode) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("scale t = {t} must be positive")));
        }
        let truncation_n = match mode {
            SeriesMode::EigenSeries => (6.0 / t).ceil() as i64 + 8,
            SeriesMode::PoissonSeries => (6.0 * t).ceil() as i64 + 8,
        };
        Ok(Self { t, truncation_n, mode })
    }

    pub fn auto(t: f64) -> Result<Self> {
        Self::new(t, SeriesMode::auto(t))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn truncation_n(&self) -> i64 {
        self.truncation_n
    }

    pub fn mode(&self) -> SeriesMode {
        self.mode
    }

    pub fn u(&self, x: f64) -> f64 {
        let t = self.t;
        let n_max = self.truncation_n;
        match self.mode {
            SeriesMode::EigenSeries => {
                let mut terms = Vec::with_capacity(n_max as usize + 1);
                terms.push(1.0);
                for n in 1..=n_max {
                    let n = n as f64;
                    terms.push(2.0 * (-PI * t * t * n * n).exp() * (2.0 * PI * n * x).cos());
                }
                sum_descending(terms)
            }
            SeriesMode::PoissonSeries => {
                let terms = (-n_max..=n_max)
                    .map(|n| {
                        let y = (n as f64 + x) / t;
                        (-PI * y * y).exp()
                    })
                    .collect();
                sum_descending(terms) / t
            }
        }
    }

    pub fn v(&self, x: f64) -> f64 {
        let t = self.t;
        let n_max = self.truncation_n;
        match self.mode {
            SeriesMode::EigenSeries => {
                let terms = (1..=n_max)
                    .map(|n| {
                        let nt = n as f64 * t;
                        2.0 * nt * nt * (-PI * nt * nt).exp() * (2.0 * PI * n as f64 * x).cos()
                    })
                    .collect();
                sum_descending(terms)
            }
            SeriesMode::PoissonSeries => {
                let terms = (-n_max..=n_max)
                    .map(|n| {
                        let y = (n as f64 + x) / t;
                        (0.5 / PI - y * y) * (-PI * y * y).exp()
                    })
                    .collect();
                sum_descending(terms) / t
            }
        }
    }
}

pub fn u_t(t: f64, x: f64, mode: SeriesMode) -> Result<f64> {
    Ok(ThetaPair::new(t, mode)?.u(x))
}

pub fn v_t(t: f64, x: f64, mode: SeriesMode) -> Result<f64> {
    Ok(ThetaPair::new(t, mode)?.v(x))
}

/// `h_t(s₁, s₂) = U_t(s₁)V_t(s₂) + U_t(s₂)V_t(s₁)`: the kernel of `f(t²Δ)`
/// on `T²` for `f(u) = u e^{−u/4π} / 4π²`, evaluated at `p = r − s`.
pub fn mexican_hat_t2(t: f64, p: &TorusPoint) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch(p.dim(), 2));
    }
    let pair = ThetaPair::auto(t)?;
    let [s1, s2] = [p.coords[0], p.coords[1]];
    Ok(pair.u(s1) * pair.v(s2) + pair.u(s2) * pair.v(s1))
}

/// Maps a symbol to the factored `T²` form when one exists: returns
/// `(τ, scale)` with `K_t = scale · h_τ`.
pub fn factored_t2_scale(f: &SymbolFunction, t: f64) -> Option<(f64, f64)> {
    match f.kind() {
        SymbolKind::PaperTorus => Some((t, 1.0)),
        // s e^{-s} at s = 4π²t²‖m‖² is π·τ²‖m‖²e^{−πτ²‖m‖²} with πτ² = 4π²t².
        SymbolKind::Mexican(1) => Some((2.0 * t * PI.sqrt(), PI)),
        _ => None,
    }
}

/// Kernel values on `T²` through the factored theta series, for symbols that
/// admit it.
pub fn factored_kernel_t2(f: &SymbolFunction, t: f64, p: &TorusPoint) -> Option<Result<f64>> {
    let (tau, scale) = factored_t2_scale(f, t)?;
    Some(mexican_hat_t2(tau, p).map(|h| scale * h))
}

pub fn default_bandlimit(t: f64) -> usize {
    (8.0 / t).ceil() as usize
}

/// Truncated lattice sum `Σ_{‖m‖ ≤ B} f(4π²t²‖m‖²) cos(2π m·p)` in any
/// dimension. Flags a `TruncationWarning` (carrying the partial sum) when the
/// outermost shell `B−1 < ‖m‖ ≤ B` is not negligible.
pub fn torus_kernel(f: &SymbolFunction, t: f64, p: &TorusPoint, bandlimit: usize) -> Result<f64> {
    if bandlimit < 1 {
        return Err(Error::InvalidArgument("bandlimit must be ≥ 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("scale t = {t} must be positive")));
    }
    let dim = p.dim();
    if dim == 0 {
        return Err(Error::InvalidArgument("zero-dimensional torus".into()));
    }
    let b = bandlimit as i64;
    let b2 = b * b;
    let shell_lo = (b - 1) * (b - 1);
    let alpha = 4.0 * PI * PI * t * t;
    let multiplier: Vec<f64> = (0..=b2).map(|k| f.evaluate(alpha * k as f64)).collect();

    let mut terms = Vec::new();
    let mut total_abs = 0.0;
    let mut shell_abs = 0.0;
    let mut m = vec![-b; dim];
    loop {
        let norm2: i64 = m.iter().map(|k| k * k).sum();
        if norm2 <= b2 {
            let w = multiplier[norm2 as usize];
            if w != 0.0 {
                let phase: f64 = m.iter().zip(&p.coords).map(|(&k, &x)| k as f64 * x).sum();
                let term = w * (2.0 * PI * phase).cos();
                total_abs += w.abs();
                if norm2 > shell_lo {
                    shell_abs += w.abs();
                }
                terms.push(term);
            }
        }
        // odometer over [-b, b]^dim
        let mut i = 0;
        while i < dim {
            m[i] += 1;
            if m[i] <= b {
                break;
            }
            m[i] = -b;
            i += 1;
        }
        if i == dim {
            break;
        }
    }
    let value = sum_descending(terms);
    let tail_fraction = if total_abs > 0.0 { shell_abs / total_abs } else { 0.0 };
    if tail_fraction > SHELL_TOLERANCE {
        return Err(Error::TruncationWarning { value, tail_fraction });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linspace, log_space};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -0.5 + (i as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(torus_eigenvalue(&[0, 0]), 0.0);
        assert_eq!(torus_eigenvalue(&[1, 0]), 4.0 * PI * PI);
        assert!((torus_eigenvalue(&[3, 4]) - 100.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn point_reduction() {
        let p = TorusPoint::new(vec![0.5, -0.5, 1.25, -0.75, 3.0]);
        assert_eq!(p.coords(), &[0.5, 0.5, 0.25, 0.25, 0.0]);
    }

    #[test]
    fn distance_examples() {
        let p = TorusPoint::new(vec![0.4]);
        let q = TorusPoint::new(vec![-0.4]);
        assert!((torus_distance(&p, &q).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(torus_distance(&p, &p).unwrap(), 0.0);
        assert!(matches!(
            torus_distance(&p, &TorusPoint::new(vec![0.0, 0.0])),
            Err(Error::DimensionMismatch(1, 2))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pt = || TorusPoint::new(vec![rng.random::<f64>(), rng.random::<f64>()]);
        for _ in 0..1000 {
            let (a, b, c) = (pt(), pt(), pt());
            let ab = torus_distance(&a, &b).unwrap();
            let bc = torus_distance(&b, &c).unwrap();
            let ac = torus_distance(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-15);
            assert_eq!(ab, torus_distance(&b, &a).unwrap());
        }
    }

    #[test]
    fn truncation_first_omitted_term_negligible() {
        for t in log_space(0.05, 4.0, 17) {
            for mode in [SeriesMode::EigenSeries, SeriesMode::PoissonSeries] {
                let pair = ThetaPair::new(t, mode).unwrap();
                let n = (pair.truncation_n() + 1) as f64;
                let omitted = match mode {
                    SeriesMode::EigenSeries => (-PI * t * t * n * n).exp() * (n * t).powi(2).max(1.0),
                    // worst case x = 1/2 brings the shifted Gaussian closer
                    SeriesMode::PoissonSeries => {
                        let y = (n - 0.5) / t;
                        (-PI * y * y).exp() * (1.0 + y * y)
                    }
                };
                assert!(omitted < 1e-16, "t={t} {mode:?}: {omitted}");
            }
        }
    }

    #[test]
    fn large_and_small_t_limits() {
        let u = u_t(4.0, 0.0, SeriesMode::EigenSeries).unwrap();
        assert!((u - (1.0 + 2.0 * (-16.0 * PI).exp())).abs() < 1e-15);
        let t = 0.05;
        assert!((t * u_t(t, 0.0, SeriesMode::PoissonSeries).unwrap() - 1.0).abs() < 1e-12);
        assert!((t * v_t(t, 0.0, SeriesMode::PoissonSeries).unwrap() - 0.5 / PI).abs() < 1e-10);
    }

    #[test]
    fn dual_series_agree() {
        let xs = unit_grid(64);
        let mut worst: f64 = 0.0;
        for t in log_space(0.05, 4.0, 17).into_iter().chain([0.3, 1.0, 3.0]) {
            let e = ThetaPair::new(t, SeriesMode::EigenSeries).unwrap();
            let p = ThetaPair::new(t, SeriesMode::PoissonSeries).unwrap();
            for &x in &xs {
                worst = worst.max((e.u(x) - p.u(x)).abs()).max((e.v(x) - p.v(x)).abs());
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn parity_and_periodicity() {
        for t in [0.1, 0.7, 2.0] {
            let pair = ThetaPair::auto(t).unwrap();
            for x in linspace(-0.5, 0.5, 33) {
                let (u, v) = (pair.u(x), pair.v(x));
                assert!((u - pair.u(-x)).abs() <= 1e-14 * u.abs().max(1.0));
                assert!((v - pair.v(-x)).abs() <= 1e-14 * v.abs().max(1.0));
                assert!((u - pair.u(x + 1.0)).abs() <= 1e-13 * u.abs().max(1.0));
                assert!((v - pair.v(x - 1.0)).abs() <= 1e-13 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn v_is_scaled_second_derivative_of_u() {
        let step = 1e-4;
        for t in [0.3, 1.0, 2.0] {
            for x in [-0.37, 0.0, 0.11, 0.45] {
                let pair = ThetaPair::auto(t).unwrap();
                let u2 = (pair.u(x + step) - 2.0 * pair.u(x) + pair.u(x - step)) / (step * step);
                let expected = -(t * t) / (4.0 * PI * PI) * u2;
                assert!((pair.v(x) - expected).abs() <= 1e-6, "t={t} x={x}");
            }
        }
    }

    #[test]
    fn diagonal_table_values() {
        let table = [(2.0, 0.00070), (1.0, 0.59017), (0.5, 0.99984), (0.125, 1.00000)];
        let origin = TorusPoint::new(vec![0.0, 0.0]);
        for (t, expected) in table {
            let v = t * t * PI * mexican_hat_t2(t, &origin).unwrap();
            assert!((v - expected).abs() <= 1e-4, "t={t}: {v}");
        }
    }

    #[test]
    fn diagonal_asymptotics_monotone() {
        let origin = TorusPoint::new(vec![0.0, 0.0]);
        let gaps: Vec<f64> = [0.5, 0.25, 0.125, 0.0625]
            .iter()
            .map(|&t| (t * t * PI * mexican_hat_t2(t, &origin).unwrap() - 1.0).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
        assert!(gaps[3] < 1e-12);
    }

    #[test]
    fn factored_form_matches_brute_force_lattice() {
        let t = 0.5;
        let f = SymbolFunction::paper_torus();
        for p in [[0.0, 0.0], [0.1, -0.2], [0.37, 0.5], [-0.25, 0.03]] {
            // Direct double sum over the square, restricted to the ball.
            let mut direct = 0.0;
            for m1 in -40i64..=40 {
                for m2 in -40i64..=40 {
                    let n2 = (m1 * m1 + m2 * m2) as f64;
                    if n2 > 1600.0 {
                        continue;
                    }
                    let u = 4.0 * PI * PI * t * t * n2;
                    let w = u * (-u / (4.0 * PI)).exp() / (4.0 * PI * PI);
                    direct += w * (2.0 * PI * (m1 as f64 * p[0] + m2 as f64 * p[1])).cos();
                }
            }
            let pt = TorusPoint::new(p.to_vec());
            let fast = mexican_hat_t2(t, &pt).unwrap();
            assert!((fast - direct).abs() <= 1e-10, "{p:?}: {fast} vs {direct}");
            let lattice = torus_kernel(&f, t, &pt, 40).unwrap();
            assert!((lattice - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn mexican_one_factors_through_rescaled_hat() {
        let f = SymbolFunction::mexican(1);
        for t in [0.08, 0.3, 1.0] {
            for p in [[0.0, 0.0], [0.2, 0.1], [-0.45, 0.3]] {
                let pt = TorusPoint::new(p.to_vec());
                let fast = factored_kernel_t2(&f, t, &pt).unwrap().unwrap();
                let slow = torus_kernel(&f, t, &pt, default_bandlimit(t)).unwrap();
                assert!((fast - slow).abs() <= 1e-10 * (1.0 + slow.abs()), "t={t}");
            }
        }
        assert!(factored_kernel_t2(&SymbolFunction::mexican(2), 0.3, &TorusPoint::new(vec![0.0, 0.0])).is_none());
    }

    #[test]
    fn generic_kernel_has_zero_mean_and_symmetry() {
        let f = SymbolFunction::mexican(2);
        let t = 0.2;
        let xs = unit_grid(32);
        let mut sum = 0.0;
        for &x in &xs {
            for &y in &xs {
                let p = TorusPoint::new(vec![x, y]);
                let k = torus_kernel(&f, t, &p, default_bandlimit(t)).unwrap();
                let km = torus_kernel(&f, t, &TorusPoint::new(vec![-x, -y]), default_bandlimit(t)).unwrap();
                assert!((k - km).abs() <= 1e-13 * (1.0 + k.abs()));
                sum += k;
            }
        }
        assert!((sum / (32.0 * 32.0)).abs() <= 1e-14, "{sum}");
    }

    #[test]
    fn translation_invariance_is_exact() {
        let f = SymbolFunction::mexican(1);
        let r = TorusPoint::new(vec![0.13, -0.31]);
        let s = TorusPoint::new(vec![0.4, 0.22]);
        let a = [0.25, -0.125];
        let ra = TorusPoint::new(vec![r.coords()[0] + a[0], r.coords()[1] + a[1]]);
        let sa = TorusPoint::new(vec![s.coords()[0] + a[0], s.coords()[1] + a[1]]);
        let k1 = torus_kernel(&f, 0.3, &r.difference(&s).unwrap(), 27).unwrap();
        let k2 = torus_kernel(&f, 0.3, &ra.difference(&sa).unwrap(), 27).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn truncation_warning_carries_partial_sum() {
        let f = SymbolFunction::mexican(1);
        let err = torus_kernel(&f, 0.05, &TorusPoint::new(vec![0.0, 0.0]), 3).unwrap_err();
        assert!(matches!(err, Error::TruncationWarning { .. }));
        assert!(err.partial_value().unwrap() > 0.0);
        // 1-D and 3-D lattices go through the same path.
        torus_kernel(&f, 0.3, &TorusPoint::new(vec![0.1]), 27).unwrap();
        torus_kernel(&f, 0.5, &TorusPoint::new(vec![0.1, 0.0, -0.2]), 16).unwrap();
    }

    proptest! {
        #[test]
        fn mexican_hat_symmetric(t in 0.05f64..3.0, a in -0.5f64..0.5, b in -0.5f64..0.5) {
            let h1 = mexican_hat_t2(t, &TorusPoint::new(vec![a, b])).unwrap();
            let h2 = mexican_hat_t2(t, &TorusPoint::new(vec![b, a])).unwrap();
            prop_assert_eq!(h1, h2);
        }
    }
}
