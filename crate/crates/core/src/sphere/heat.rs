//! Heat trace on `S²` and the small-`t` approximations of `4π g_t` and `4π h_t`.

use num_rational::Ratio;

use super::pole::Rational;
use crate::numeric::kahan_sum;

/// `tr(e^{−sΔ}) ∼ Σ_k a_k s^{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatTraceSeries {
    coefficients: Vec<Rational>,
}

impl HeatTraceSeries {
    /// The `S²` expansion `1/s + 1/3 + s/15 + 4s²/315 + s³/315`.
    pub fn sphere2() -> Self {
        let r = |n: i128, d: i128| Ratio::new(n, d);
        Self {
            coefficients: vec![r(1, 1), r(1, 3), r(1, 15), r(4, 315), r(1, 315)],
        }
    }

    /// Keeps `a_0 … a_order`.
    pub fn truncated(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coefficients.len());
        Self {
            coefficients: self.coefficients[..keep].to_vec(),
        }
    }

    /// Highest power of `s` included.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn exact_coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.coefficients.iter().map(to_f64).collect()
    }

    pub fn evaluate(&self, s: f64) -> f64 {
        kahan_sum(self.coefficients().iter().enumerate().map(|(k, a)| a * s.powi(k as i32 - 1)))
    }

    pub fn derivative(&self, s: f64) -> f64 {
        kahan_sum(self.coefficients().iter().enumerate().map(|(k, a)| {
            let p = k as f64 - 1.0;
            a * p * s.powi(k as i32 - 2)
        }))
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        kahan_sum(self.coefficients().iter().enumerate().map(|(k, a)| {
            let p = k as f64 - 1.0;
            a * p * (p - 1.0) * s.powi(k as i32 - 3)
        }))
    }
}

pub fn heat_trace(s: f64, series: &HeatTraceSeries) -> f64 {
    series.evaluate(s)
}

/// `Σ_{l ≤ l_max} (2l+1) e^{−s l(l+1)}`.
pub fn exact_heat_trace_s2(s: f64, l_max: usize) -> f64 {
    kahan_sum((0..=l_max).map(|l| {
        let lf = l as f64;
        (2.0 * lf + 1.0) * (-s * lf * (lf + 1.0)).exp()
    }))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Coefficient tables for the brackets
/// `p(s, θ) = A(s) + (θ²/4) C(s)` and `q(s, θ) = A'(s) + (θ²/4) C'(s)`,
/// each a polynomial in `s = t²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaclaurinApprox {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub c_prime: Vec<f64>,
}

/// Which bracket `ht_approx_with` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HtForm {
    /// `−s ∂/∂s` applied to the `g_t` approximation.
    #[default]
    Differentiated,
    /// `−(1/s)[s² tr' + (θ²/4)(s² tr'' + s tr')]` from the heat trace directly.
    Direct,
}

impl MaclaurinApprox {
    pub fn sphere2() -> Self {
        Self {
            a: vec![1.0, 1.0 / 3.0, 1.0 / 15.0, 4.0 / 315.0, 1.0 / 315.0],
            c: vec![1.0 / 3.0, 2.0 / 15.0, 4.0 / 105.0, 4.0 / 315.0],
            a_prime: vec![1.0 / 3.0, 2.0 / 15.0, 4.0 / 105.0, 4.0 / 315.0],
            c_prime: vec![2.0 / 15.0, 8.0 / 105.0, 4.0 / 105.0],
        }
    }

    /// Tables derived from a heat-trace series: `A_k = a_k`,
    /// `C_{k−1} = k a_k`, and the primed tables are `s`-derivatives.
    pub fn from_heat_trace(series: &HeatTraceSeries) -> Self {
        let a: Vec<Rational> = series.exact_coefficients().to_vec();
        let c: Vec<Rational> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, ak)| ak * Ratio::from_integer(k as i128))
            .collect();
        let diff = |v: &[Rational]| -> Vec<Rational> {
            v.iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * Ratio::from_integer(k as i128))
                .collect()
        };
        let a_prime = diff(&a);
        let c_prime = diff(&c);
        let f = |v: &[Rational]| v.iter().map(to_f64).collect::<Vec<_>>();
        Self {
            a: f(&a),
            c: f(&c),
            a_prime: f(&a_prime),
            c_prime: f(&c_prime),
        }
    }

    /// `p ≡ 1`, `q ≡ 0`: the flat Mexican hat.
    pub fn flat() -> Self {
        Self {
            a: vec![1.0],
            c: Vec::new(),
            a_prime: Vec::new(),
            c_prime: Vec::new(),
        }
    }

    pub fn p(&self, s: f64, theta: f64) -> f64 {
        poly(&self.a, s) + theta * theta / 4.0 * poly(&self.c, s)
    }

    pub fn q(&self, s: f64, theta: f64) -> f64 {
        poly(&self.a_prime, s) + theta * theta / 4.0 * poly(&self.c_prime, s)
    }

    /// Approximation of `4π g_t(cos θ)`.
    pub fn g(&self, t: f64, theta: f64) -> f64 {
        let s = t * t;
        (-theta * theta / (4.0 * s)).exp() / s * self.p(s, theta)
    }

    /// Approximation of `4π h_t(cos θ)`.
    pub fn h(&self, t: f64, theta: f64) -> f64 {
        let s = t * t;
        let x = theta * theta / (4.0 * s);
        (-x).exp() / s * ((1.0 - x) * self.p(s, theta) - s * self.q(s, theta))
    }
}

fn poly(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

pub fn gt_approx(t: f64, theta: f64) -> f64 {
    MaclaurinApprox::sphere2().g(t, theta)
}

pub fn ht_approx(t: f64, theta: f64) -> f64 {
    ht_approx_with(t, theta, HtForm::Differentiated)
}

pub fn ht_approx_with(t: f64, theta: f64, form: HtForm) -> f64 {
    match form {
        HtForm::Differentiated => MaclaurinApprox::sphere2().h(t, theta),
        HtForm::Direct => {
            let s = t * t;
            let tr = HeatTraceSeries::sphere2();
            let (d1, d2) = (tr.derivative(s), tr.second_derivative(s));
            let x = theta * theta / 4.0;
            -(-x / s).exp() / s * (s * s * d1 + x * (s * s * d2 + s * d1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use crate::sphere::ZonalKernel;
    use crate::spectral::SymbolFunction;
    use std::f64::consts::PI;

    fn series_4pi(f: &SymbolFunction, t: f64, theta: f64) -> f64 {
        4.0 * PI * ZonalKernel::new(f, t, 2, 2000).unwrap().sum(theta.cos())
    }

    #[test]
    fn tables_follow_from_heat_trace() {
        let derived = MaclaurinApprox::from_heat_trace(&HeatTraceSeries::sphere2());
        let literal = MaclaurinApprox::sphere2();
        for (x, y) in [
            (&derived.a, &literal.a),
            (&derived.c, &literal.c),
            (&derived.a_prime, &literal.a_prime),
            (&derived.c_prime, &literal.c_prime),
        ] {
            assert_eq!(x.len(), y.len());
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).abs() < 1e-16);
            }
        }
        assert_eq!(literal.p(0.0, 0.0), 1.0);
        assert!((literal.q(0.0, 0.0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn heat_trace_against_spectral_sum() {
        let tr = HeatTraceSeries::sphere2();
        let exact = exact_heat_trace_s2(0.01, 2000);
        assert!(((heat_trace(0.01, &tr) - exact) / exact).abs() <= 1e-6);
        let exact = exact_heat_trace_s2(0.1, 2000);
        assert!(((heat_trace(0.1, &tr) - exact) / exact).abs() <= 1e-3);
        for s in [0.1, 0.05, 0.01, 0.002] {
            let exact = exact_heat_trace_s2(s, 4000);
            assert!((exact - (1.0 / s + 1.0 / 3.0)).abs() <= (exact - 1.0 / s).abs());
        }
        assert_eq!(tr.order(), 4);
        assert_eq!(tr.coefficients()[0], 1.0);
    }

    #[test]
    fn heat_trace_derivatives() {
        let tr = HeatTraceSeries::sphere2();
        let s = 0.3;
        let h = 1e-5;
        let d1 = (tr.evaluate(s + h) - tr.evaluate(s - h)) / (2.0 * h);
        let d2 = (tr.evaluate(s + h) - 2.0 * tr.evaluate(s) + tr.evaluate(s - h)) / (h * h);
        assert!((d1 - tr.derivative(s)).abs() < 1e-7);
        assert!((d2 - tr.second_derivative(s)).abs() < 1e-3);
        assert_eq!(tr.truncated(1).order(), 1);
    }

    #[test]
    fn gt_on_diagonal_matches_trace() {
        let tr = HeatTraceSeries::sphere2();
        for t in [0.05, 0.1, 0.3] {
            let s: f64 = t * t;
            assert!((gt_approx(t, 0.0) - tr.evaluate(s)).abs() < 1e-12 / s);
        }
    }

    #[test]
    fn approximations_at_t_01() {
        let t = 0.1;
        let g = SymbolFunction::gauss();
        let m = SymbolFunction::mexican(1);
        let (mut g_err, mut h_err) = (0.0f64, 0.0f64);
        for theta in linspace(-PI, PI, 2048) {
            g_err = g_err.max((gt_approx(t, theta) - series_4pi(&g, t, theta)).abs());
            h_err = h_err.max((ht_approx(t, theta) - series_4pi(&m, t, theta)).abs());
        }
        assert!(g_err <= 1e-3, "{g_err}");
        assert!(h_err <= 1.2e-3, "{h_err}");
        assert!((gt_approx(t, 0.3) - 10.655).abs() <= 0.02);
        assert!((series_4pi(&g, t, 0.3) - 10.655).abs() <= 0.02);
        assert!((ht_approx(t, 0.4) + 5.593).abs() <= 0.02);
        assert!((series_4pi(&m, t, 0.4) + 5.593).abs() <= 0.02);
    }

    #[test]
    fn direct_form_agrees_to_second_order() {
        let t = 0.1;
        for theta in [0.0, 0.01, 0.02, 0.05] {
            let a = ht_approx_with(t, theta, HtForm::Differentiated);
            let b = ht_approx_with(t, theta, HtForm::Direct);
            let x: f64 = theta * theta / 4.0;
            // the difference is O(θ⁴) times the 1/s⁴ scale of the bracket
            assert!((a - b).abs() <= 10.0 * x * x / t.powi(8) + 1e-10, "θ={theta}");
        }
    }

    #[test]
    fn flat_limit_is_mexican_hat_profile() {
        let flat = MaclaurinApprox::flat();
        for (t, theta) in [(0.1, 0.0), (0.1, 0.2), (0.3, 1.0)] {
            let x: f64 = theta * theta / (4.0 * t * t);
            let expect = (-x).exp() / (t * t) * (1.0 - x);
            assert!((flat.h(t, theta) - expect).abs() < 1e-14 * expect.abs().max(1.0));
        }
    }
}
