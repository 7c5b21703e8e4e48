//! Small numerical kernels shared by the rest of the crate: compensated
//! summation, adaptive Simpson quadrature, golden-section search and
//! Gauss–Legendre rules.

use std::f64::consts::PI;
use std::ops::AddAssign;

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Sums terms after sorting them by decreasing magnitude.
pub fn sum_descending(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    kahan_sum(terms)
}

pub const SIMPSON_DEPTH_CAP: usize = 40;

/// Adaptive Simpson quadrature of `f` over `[a, b]`, pre-split into `panels`
/// equal pieces. `abs_tol` is the total absolute error target.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(b > a) {
        return Ok(0.0);
    }
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let panel_tol = abs_tol / panels as f64;
    let mut total = KahanSum::new();
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, 0)?;
    }
    Ok(total.value())
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= SIMPSON_DEPTH_CAP {
        return Err(Error::QuadratureFailure {
            depth: SIMPSON_DEPTH_CAP,
            a,
            b,
        });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + c.abs() + d.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximum of `f` over a log-spaced grid on `[lo, hi]`, refined by a local
/// golden-section search in `log s` around the best grid node.
pub fn log_grid_max<F>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let grid = log_space(lo, hi, points);
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &s) in grid.iter().enumerate() {
        let v = f(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let ul = grid[best_i.saturating_sub(1)].ln();
    let uh = grid[(best_i + 1).min(grid.len() - 1)].ln();
    if uh > ul {
        let (u, v) = golden_section_max(|u| f(u.exp()), ul, uh, 1e-14);
        if v > best {
            return (u.exp(), v);
        }
    }
    (grid[best_i], best)
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (ul, uh) = (lo.ln(), hi.ln());
    let step = (uh - ul) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (ul + step * i as f64).exp()
            }
        })
        .collect()
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on the
/// Legendre three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut acc = KahanSum::new();
        acc += 1e16;
        for _ in 0..1000 {
            acc += 1.0;
        }
        acc += -1e16;
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-13, 8).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simpson_depth_cap_reports_failure() {
        // Discontinuous integrand with an impossible tolerance.
        let r = adaptive_simpson(|x: f64| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 0.0, 1);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_section_max(|r: f64| r.powi(3) * (-r).exp(), 0.5, 10.0, 1e-12);
        assert!((x - 3.0).abs() < 1e-6);
        assert!((v - 27.0 * (-3.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        for n in [1, 2, 5, 16, 64, 512] {
            let (x, w) = gauss_legendre(n);
            assert!((kahan_sum(w.iter().copied()) - 2.0).abs() < 1e-13, "n={n}");
            if n >= 3 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
                assert!((q - 0.4).abs() < 1e-13);
            }
        }
    }
}
