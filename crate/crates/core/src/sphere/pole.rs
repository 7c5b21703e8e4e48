//! Derivatives at the pole from powers of the Laplacian.
//!
//! For a zonal `U(x) = u(x₁)` on `S^n`, `ΔU = D u` with
//! `D = n x d/dx − (1−x²) d²/dx²`. Iterating `D` gives
//! `(Δ^k U)(N) = Σ_{j ≤ k} A[k][j] u^{(j)}(1)` with `A` triangular, and the
//! same construction with `n = 1` gives the `θ`-derivatives of `u(cos θ)`.

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::heat::to_f64;
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Deepest supported `m`.
pub const MAX_POLE_DEPTH: usize = 6;

/// Polynomial in `x` with exact coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn constant(c: Rational) -> Self {
        Poly(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn derivative(&self) -> Self {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Ratio::from_integer(k as i128))
                .collect(),
        )
    }

    /// Multiplies by `c0 + c1 x + c2 x²`.
    fn mul_quadratic(&self, c0: Rational, c1: Rational, c2: Rational) -> Self {
        let mut out = vec![Rational::zero(); self.0.len() + 2];
        for (k, c) in self.0.iter().enumerate() {
            out[k] += c * c0;
            out[k + 1] += c * c1;
            out[k + 2] += c * c2;
        }
        Poly(out)
    }

    fn add(&self, other: &Poly) -> Self {
        let len = self.0.len().max(other.0.len());
        let get = |p: &Poly, k: usize| p.0.get(k).copied().unwrap_or_else(Rational::zero);
        Poly((0..len).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn at_one(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, c| acc + c)
    }
}

/// Coefficient polynomials of `D^k u` in terms of `u, u', u'', …`.
fn iterate_operator(n: usize, depth: usize) -> Vec<Vec<Poly>> {
    let zero = Rational::zero();
    let one = Rational::one();
    let nr = Ratio::from_integer(n as i128);
    let mut levels = vec![vec![Poly::constant(one)]];
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let mut next = vec![Poly::default(); prev.len() + 2];
        for (j, p) in prev.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let dp = p.derivative();
            let ddp = dp.derivative();
            // n x p' − (1−x²) p''
            let same = dp
                .mul_quadratic(zero, nr, zero)
                .add(&ddp.mul_quadratic(-one, zero, one));
            // n x p − 2(1−x²) p'
            let two = Ratio::from_integer(2);
            let up1 = p
                .mul_quadratic(zero, nr, zero)
                .add(&dp.mul_quadratic(-two, zero, two));
            // −(1−x²) p
            let up2 = p.mul_quadratic(-one, zero, one);
            next[j] = next[j].add(&same);
            next[j + 1] = next[j + 1].add(&up1);
            next[j + 2] = next[j + 2].add(&up2);
        }
        levels.push(next);
    }
    levels
}

/// Rows `k = 1..=m`, columns `j = 1..=m`: `A[k][j] = p_{k,j}(1)`.
pub fn pole_triangle(m: usize, n: usize) -> Result<Vec<Vec<Rational>>> {
    if m == 0 || m > MAX_POLE_DEPTH {
        return Err(Error::InvalidArgument(format!("m = {m} outside 1..={MAX_POLE_DEPTH}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be ≥ 1".into()));
    }
    let levels = iterate_operator(n, m);
    let mut rows = Vec::with_capacity(m);
    for level in levels.iter().skip(1) {
        let at_one: Vec<Rational> = level.iter().map(Poly::at_one).collect();
        // u itself never appears and nothing above the diagonal survives at x = 1
        debug_assert!(at_one[0].is_zero());
        let k = rows.len() + 1;
        debug_assert!(at_one.iter().skip(k + 1).all(Zero::is_zero));
        rows.push((1..=m).map(|j| at_one.get(j).copied().unwrap_or_else(Rational::zero)).collect());
    }
    Ok(rows)
}

/// Weights `a` with `d^{2m}/dθ^{2m}[u(cos θ)]|₀ = Σ_{i=1}^{m} a_i (Δ^i U)(N)`.
pub fn pole_derivative_weights(m: usize, n: usize) -> Result<Vec<Rational>> {
    let a = pole_triangle(m, n)?;
    for (k, row) in a.iter().enumerate() {
        if row[k].is_zero() {
            return Err(Error::SingularTriangle(k + 1));
        }
    }
    let b = pole_triangle(m, 1)?;
    let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
    let rhs: Vec<Rational> = b[m - 1].iter().map(|x| x * sign).collect();
    // Aᵀ is lower triangular: forward substitution.
    let mut w = vec![Rational::zero(); m];
    for j in (0..m).rev() {
        let mut acc = rhs[j];
        for k in j + 1..m {
            acc -= a[k][j] * w[k];
        }
        w[j] = acc / a[j][j];
    }
    Ok(w)
}

/// `d^{2m}/dθ^{2m}[u(cos θ)]` at `θ = 0` from `delta_powers[i−1] = (Δ^i U)(N)`.
pub fn maclaurin_from_pole(m: usize, delta_powers: &[f64], n: usize) -> Result<f64> {
    if delta_powers.len() < m {
        return Err(Error::DimensionMismatch(delta_powers.len(), m));
    }
    let w = pole_derivative_weights(m, n)?;
    Ok(w.iter().zip(delta_powers).map(|(w, d)| to_f64(w) * d).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn first_order_identity_is_exact() {
        for n in 1..=6usize {
            let a = pole_triangle(1, n).unwrap();
            assert_eq!(a[0][0], r(n as i128, 1));
            assert_eq!(pole_derivative_weights(1, n).unwrap(), vec![r(-1, n as i128)]);
        }
        // U = x₁: ΔU = nU, d²/dθ² cos θ = −1
        for n in 2..=5usize {
            let v = maclaurin_from_pole(1, &[n as f64], n).unwrap();
            assert_eq!(v, -1.0);
        }
    }

    #[test]
    fn triangle_is_upper_triangular_with_nonzero_diagonal() {
        for n in 1..=5usize {
            let a = pole_triangle(MAX_POLE_DEPTH, n).unwrap();
            for (k, row) in a.iter().enumerate() {
                assert!(!row[k].is_zero());
                assert!(row.iter().skip(k + 1).all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn second_order_legendre() {
        // P₂ on S²: ΔP₂ = 6P₂, P₂(1) = 1
        let v = maclaurin_from_pole(2, &[6.0, 36.0], 2).unwrap();
        let g = |th: f64| {
            let c = th.cos();
            0.5 * (3.0 * c * c - 1.0)
        };
        let fd = |h: f64| (g(2.0 * h) - 4.0 * g(h) + 6.0 * g(0.0) - 4.0 * g(-h) + g(-2.0 * h)) / h.powi(4);
        let h = 1e-2;
        let oracle = (4.0 * fd(h / 2.0) - fd(h)) / 3.0;
        assert!(((v - oracle) / oracle).abs() <= 1e-6, "{v} vs {oracle}");
        assert!((v - 12.0).abs() < 1e-12);
    }

    #[test]
    fn higher_derivatives_of_eigenfunctions() {
        // u = x on S^n: ΔU = nU; d^{2m}/dθ^{2m} cos θ at 0 = (−1)^m
        for n in 2..=4usize {
            for m in 1..=MAX_POLE_DEPTH {
                let powers: Vec<f64> = (1..=m).map(|i| (n as f64).powi(i as i32)).collect();
                let v = maclaurin_from_pole(m, &powers, n).unwrap();
                let expect = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((v - expect).abs() < 1e-9, "n={n} m={m}: {v}");
            }
        }
    }

    #[test]
    fn argument_checks() {
        assert!(maclaurin_from_pole(0, &[], 2).is_err());
        assert!(maclaurin_from_pole(7, &[0.0; 7], 2).is_err());
        assert!(matches!(maclaurin_from_pole(3, &[1.0, 2.0], 2), Err(Error::DimensionMismatch(2, 3))));
    }
}
