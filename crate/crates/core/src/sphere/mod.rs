//! Zonal wavelet kernels on the sphere `S^n`.
//!
//! On `S^n` the degree-`l` spherical harmonics have eigenvalue `l(l+n−1)` and
//! the kernel of `f(t²Δ)` is zonal:
//! `K_t(x, y) = h_t(x·y) = Σ_l c_l f(t² l(l+n−1)) P_l^λ(x·y)` with
//! `λ = (n−1)/2` and `c_l = (n+2l−1) / (ω_n (n−1))`.

mod heat;
mod pole;

pub use heat::{
    exact_heat_trace_s2, gt_approx, heat_trace, ht_approx, ht_approx_with, HeatTraceSeries, HtForm,
    MaclaurinApprox,
};
pub use pole::{maclaurin_from_pole, pole_derivative_weights, pole_triangle, Poly, Rational};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::SymbolFunction;

/// Tail fraction above which a truncated zonal sum is flagged.
pub const ZONAL_TAIL_TOLERANCE: f64 = 1e-12;

/// Upward three-term recurrence for `P_l^λ`:
/// `(k+1) P_{k+1} = 2(k+λ) τ P_k − (k+2λ−1) P_{k−1}`, `P_0 = 1`, `P_1 = 2λτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerEvaluator {
    lambda: f64,
}

impl GegenbauerEvaluator {
    /// Evaluator for `S^n`, i.e. `λ = (n−1)/2`.
    pub fn for_sphere(n: u32) -> Self {
        Self {
            lambda: (n as f64 - 1.0) / 2.0,
        }
    }

    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `P_0^λ(τ), …, P_{l_max}^λ(τ)`.
    pub fn values(&self, l_max: usize, tau: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(l_max + 1);
        out.push(1.0);
        if l_max == 0 {
            return out;
        }
        let lam = self.lambda;
        out.push(2.0 * lam * tau);
        for k in 1..l_max {
            let kf = k as f64;
            let next = (2.0 * (kf + lam) * tau * out[k] - (kf + 2.0 * lam - 1.0) * out[k - 1]) / (kf + 1.0);
            out.push(next);
        }
        out
    }

    pub fn evaluate(&self, l: usize, tau: f64) -> f64 {
        let lam = self.lambda;
        if l == 0 {
            return 1.0;
        }
        let (mut p0, mut p1) = (1.0, 2.0 * lam * tau);
        for k in 1..l {
            let kf = k as f64;
            let p2 = (2.0 * (kf + lam) * tau * p1 - (kf + 2.0 * lam - 1.0) * p0) / (kf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    }
}

pub fn gegenbauer(l: usize, lambda: f64, tau: f64) -> f64 {
    GegenbauerEvaluator::with_lambda(lambda).evaluate(l, tau)
}

/// `binom(a, b)` as `f64`, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> f64 {
    if b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Surface area `ω_n = 2π^{(n+1)/2} / Γ((n+1)/2)` of `S^n`.
pub fn sphere_area(n: u32) -> f64 {
    // Γ at integers and half-integers in closed form.
    let gamma_half_n_plus_1 = if n % 2 == 1 {
        let k = (n + 1) / 2;
        (1..k).map(|i| i as f64).product::<f64>()
    } else {
        // Γ(k + 1/2) = (2k)! / (4^k k!) √π with k = n/2
        let k = n / 2;
        let mut g = PI.sqrt();
        for i in 0..k {
            g *= i as f64 + 0.5;
        }
        g
    };
    let area = 2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half_n_plus_1;
    if n == 2 {
        debug_assert!((area - 4.0 * PI).abs() < 1e-14);
        return 4.0 * PI;
    }
    area
}

/// `dim H_l = binom(n+l, n) − binom(n+l−2, n)` on `S^n`.
pub fn harmonic_dimension(n: u32, l: u64) -> f64 {
    let n = n as u64;
    if l == 0 {
        return 1.0;
    }
    binomial(n + l, n) - binomial(n + l - 2, n)
}

/// `c_l = (n+2l−1) / (ω_n (n−1))`.
pub fn zonal_coefficient(n: u32, l: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("zonal coefficients need n ≥ 2, got {n}")));
    }
    Ok((n as f64 + 2.0 * l as f64 - 1.0) / (sphere_area(n) * (n as f64 - 1.0)))
}

pub fn default_l_max(t: f64) -> usize {
    (12.0 / t).ceil() as usize + 16
}

/// `K_t(N, ·)` on `S^n` as the coefficient sequence `a_l = c_l f(t² l(l+n−1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalKernel {
    t: f64,
    n: u32,
    coeffs: Vec<f64>,
    omega_n: f64,
}

impl ZonalKernel {
    pub fn new(f: &SymbolFunction, t: f64, n: u32, l_max: usize) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("scale t = {t} must be positive")));
        }
        if l_max < 1 {
            return Err(Error::InvalidArgument("L_max must be ≥ 1".into()));
        }
        let omega_n = sphere_area(n);
        let nf = n as f64;
        let coeffs = (0..=l_max)
            .map(|l| {
                let lf = l as f64;
                Ok(zonal_coefficient(n, l)? * f.evaluate(t * t * lf * (lf + nf - 1.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { t, n, coeffs, omega_n })
    }

    pub fn with_default_cutoff(f: &SymbolFunction, t: f64, n: u32) -> Result<Self> {
        Self::new(f, t, n, default_l_max(t))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    pub fn l_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `|a_L| P_L^λ(1)` relative to the largest `|a_l| P_l^λ(1)`; `P_l^λ(1)`
    /// bounds `|P_l^λ|` on `[−1, 1]`.
    pub fn tail_fraction(&self) -> f64 {
        let n = self.n as u64;
        let mut running_max: f64 = 0.0;
        let mut last = 0.0;
        for (l, &a) in self.coeffs.iter().enumerate() {
            let b = if n == 2 { 1.0 } else { binomial(n + l as u64 - 2, l as u64) };
            last = (a * b).abs();
            running_max = running_max.max(last);
        }
        if running_max == 0.0 {
            0.0
        } else {
            last / running_max
        }
    }

    /// `h_t(τ) = Σ a_l P_l^λ(τ)` without the truncation check.
    pub fn sum(&self, cos_theta: f64) -> f64 {
        let tau = cos_theta.clamp(-1.0, 1.0);
        let p = GegenbauerEvaluator::for_sphere(self.n).values(self.l_max(), tau);
        crate::numeric::kahan_sum(self.coeffs.iter().zip(&p).map(|(a, p)| a * p))
    }

    /// `h_t(τ)`; a `TruncationWarning` carries the value when the cutoff is
    /// too small for this scale.
    pub fn evaluate(&self, cos_theta: f64) -> Result<f64> {
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&cos_theta) {
            return Err(Error::InvalidArgument(format!("cos θ = {cos_theta} outside [−1, 1]")));
        }
        let value = self.sum(cos_theta);
        let tail_fraction = self.tail_fraction();
        if tail_fraction > ZONAL_TAIL_TOLERANCE {
            return Err(Error::TruncationWarning { value, tail_fraction });
        }
        Ok(value)
    }

    /// `ω_n K_t(N, N)`, which equals `Σ_l dim H_l · f(t² l(l+n−1))`.
    pub fn diagonal_trace(&self) -> f64 {
        self.omega_n * self.sum(1.0)
    }
}

pub fn sphere_kernel_series(
    f: &SymbolFunction,
    t: f64,
    cos_theta: f64,
    n: u32,
    l_max: usize,
) -> Result<f64> {
    ZonalKernel::new(f, t, n, l_max)?.evaluate(cos_theta)
}

/// Geodesic distance on `S²`.
pub fn sphere_distance(x: [f64; 3], y: [f64; 3]) -> Result<f64> {
    for v in [x, y] {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitVector(norm));
        }
    }
    let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    Ok(dot.clamp(-1.0, 1.0).acos())
}

pub const NORTH_POLE: [f64; 3] = [1.0, 0.0, 0.0];

/// `z(θ) = (cos θ, sin θ, 0)`.
pub fn great_circle_point(theta: f64) -> [f64; 3] {
    [theta.cos(), theta.sin(), 0.0]
}
