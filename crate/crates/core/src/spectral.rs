//! Symbol-function calculus.
//!
//! A [`SymbolFunction`] is an admissible multiplier `f(s) = s^l f0(s)` with
//! `f0` rapidly decreasing. Every operator in the crate is a spectral
//! multiplier `f(t² Δ)`, so all eigenvalue-wise quantities (Calderón
//! constants, band integrals over scales, discrete dyadic-style sums and
//! their explicit truncation constants) live here.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, kahan_sum, log_grid_max, log_space, KahanSum};

/// Eigenvalue arguments above this are treated as contributing exactly zero.
pub const S_MAX: f64 = 1e4;
/// Log-grid used for sampled suprema (`‖f0‖∞`, `M_J`).
pub const SUP_GRID_LO: f64 = 1e-8;
pub const SUP_GRID_HI: f64 = 1e4;
pub const SUP_GRID_POINTS: usize = 10_000;
pub const DEFAULT_REL_TOL: f64 = 1e-10;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `s^m e^{-s}`
    Mexican(u32),
    /// `u e^{-u/4π} / 4π²`, the normalization used for the torus tables.
    PaperTorus,
    /// `e^{-s}`, the heat multiplier. Not admissible.
    Gauss,
    Custom,
}

#[derive(Clone)]
pub struct SymbolFunction {
    name: String,
    kind: SymbolKind,
    vanishing_order: u32,
    f0: RealFn,
    f0_sup: f64,
    calderon: Arc<OnceLock<f64>>,
}

impl fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFunction")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("vanishing_order", &self.vanishing_order)
            .field("f0_sup", &self.f0_sup)
            .finish()
    }
}

impl SymbolFunction {
    /// Builds `f(s) = s^l f0(s)`.
    pub fn new<F>(name: impl Into<String>, vanishing_order: u32, f0: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_kind(name, SymbolKind::Custom, vanishing_order, Arc::new(f0))
    }

    fn with_kind(name: impl Into<String>, kind: SymbolKind, l: u32, f0: RealFn) -> Self {
        let f0_sup = sampled_sup(|s| f0(s).abs(), true);
        Self {
            name: name.into(),
            kind,
            vanishing_order: l,
            f0,
            f0_sup,
            calderon: Arc::new(OnceLock::new()),
        }
    }

    /// `f_m(s) = s^m e^{-s}`; `m = 1` is the Mexican hat multiplier.
    pub fn mexican(m: u32) -> Self {
        Self::with_kind(
            format!("mexican:{m}"),
            SymbolKind::Mexican(m),
            m,
            Arc::new(|s: f64| (-s).exp()),
        )
    }

    pub fn paper_torus() -> Self {
        let k = 4.0 * PI;
        Self::with_kind(
            "paper-torus",
            SymbolKind::PaperTorus,
            1,
            Arc::new(move |u: f64| (-u / k).exp() / (PI * k)),
        )
    }

    pub fn gauss() -> Self {
        Self::with_kind("gauss", SymbolKind::Gauss, 0, Arc::new(|s: f64| (-s).exp()))
    }

    /// `s ↦ f(σ s)`. The Calderón constant is unchanged.
    pub fn dilated(&self, sigma: f64) -> Self {
        let inner = Arc::clone(&self.f0);
        let scale = sigma.powi(self.vanishing_order as i32);
        Self::with_kind(
            format!("{}@{sigma}", self.name),
            SymbolKind::Custom,
            self.vanishing_order,
            Arc::new(move |s| scale * inner(sigma * s)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn vanishing_order(&self) -> u32 {
        self.vanishing_order
    }

    /// Sampled `sup |f0|` over `{0} ∪ [1e-8, 1e4]`.
    pub fn f0_sup(&self) -> f64 {
        self.f0_sup
    }

    pub fn f0(&self, s: f64) -> f64 {
        (self.f0)(s)
    }

    #[inline]
    pub fn evaluate(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return if self.vanishing_order == 0 { (self.f0)(0.0) } else { 0.0 };
        }
        if s > S_MAX {
            return 0.0;
        }
        s.powi(self.vanishing_order as i32) * (self.f0)(s)
    }

    pub fn is_admissible(&self) -> bool {
        self.vanishing_order >= 1
    }

    /// Fails with `NonAdmissible` unless `f(0) = 0` and `f` is not identically
    /// zero on the probe grid.
    pub fn ensure_admissible(&self) -> Result<()> {
        if !self.is_admissible() || self.evaluate(0.0) != 0.0 {
            return Err(Error::NonAdmissible(self.name.clone()));
        }
        let probe = log_space(SUP_GRID_LO, SUP_GRID_HI, 2_000);
        if probe.iter().all(|&s| self.evaluate(s) == 0.0) {
            return Err(Error::NonAdmissible(self.name.clone()));
        }
        Ok(())
    }

    /// Checks the rapid-decay witness `sup s^J |f(s)| < ∞` for `J ≤ j_max`
    /// and finiteness on the sampling grid.
    pub fn check_invariants(&self, j_max: u32) -> Result<()> {
        if self.is_admissible() && self.evaluate(0.0) != 0.0 {
            return Err(Error::NonAdmissible(self.name.clone()));
        }
        let grid = log_space(SUP_GRID_LO, S_MAX, SUP_GRID_POINTS);
        for &s in &grid {
            let v = self.evaluate(s);
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{} is not finite at s = {s}",
                    self.name
                )));
            }
            for j in 0..=j_max {
                if !(s.powi(j as i32) * v).is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "{}: s^{j} f(s) unbounded at s = {s}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// `M_J = max_{r>0} |r^J f(r)|`.
    pub fn decay_sup(&self, j: u32) -> f64 {
        sampled_sup(|r| (r.powi(j as i32) * self.evaluate(r)).abs(), false)
    }

    /// Calderón constant at the default tolerance, computed once.
    pub fn calderon(&self) -> Result<f64> {
        if let Some(c) = self.calderon.get() {
            return Ok(*c);
        }
        let c = calderon_constant(self, DEFAULT_REL_TOL)?;
        Ok(*self.calderon.get_or_init(|| c))
    }
}

impl FromStr for SymbolFunction {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        match spec.trim() {
            "paper-torus" => Ok(Self::paper_torus()),
            "gauss" => Ok(Self::gauss()),
            other => {
                let m = other
                    .strip_prefix("mexican:")
                    .ok_or_else(|| Error::Parse(format!("unknown symbol spec `{other}`")))?;
                let m: u32 = m
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad mexican order in `{other}`")))?;
                if m == 0 {
                    return Err(Error::Parse("mexican:0 is the heat multiplier; use `gauss`".into()));
                }
                Ok(Self::mexican(m))
            }
        }
    }
}

fn sampled_sup<F: Fn(f64) -> f64>(g: F, include_zero: bool) -> f64 {
    let (_, grid_max) = log_grid_max(&g, SUP_GRID_LO, SUP_GRID_HI, SUP_GRID_POINTS);
    if include_zero {
        grid_max.max(g(0.0))
    } else {
        grid_max
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol {rel_tol} outside (0, 1e-3]"
        )));
    }
    Ok(())
}

/// Integrates `|f(s)|² ds/s` over `[lo, hi]` on the axis `u = log s`.
fn log_axis_integral(f: &SymbolFunction, lo: f64, hi: f64, abs_tol: f64) -> Result<f64> {
    let hi = hi.min(S_MAX);
    if !(hi > lo) || lo <= 0.0 {
        return Ok(0.0);
    }
    let (ul, uh) = (lo.ln(), hi.ln());
    let panels = ((uh - ul) * 4.0).ceil().clamp(8.0, 512.0) as usize;
    adaptive_simpson(
        |u| {
            let v = f.evaluate(u.exp());
            v * v
        },
        ul,
        uh,
        abs_tol,
        panels,
    )
}

/// `c = ∫₀^∞ |f(t)|² dt/t`.
pub fn calderon_constant(f: &SymbolFunction, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    f.ensure_admissible()?;

    // Coarse trapezoid estimate to scale tolerances.
    let grid = log_space(SUP_GRID_LO, S_MAX, 4_000);
    let h = (S_MAX / SUP_GRID_LO).ln() / (grid.len() - 1) as f64;
    let rough = h * kahan_sum(grid.iter().map(|&s| f.evaluate(s).powi(2)));
    if !(rough > 0.0) {
        return Err(Error::NonAdmissible(f.name().to_string()));
    }

    // Lower cut from the small-scale tail bound ‖f0‖² ε^{2l} / 2l.
    let l = f.vanishing_order() as f64;
    let sup2 = f.f0_sup().powi(2).max(f64::MIN_POSITIVE);
    let eps = (2.0 * l * 1e-3 * rel_tol * rough / sup2)
        .powf(1.0 / (2.0 * l))
        .min(1e-3);

    log_axis_integral(f, eps, S_MAX, 0.5 * rel_tol * rough)
}

/// `g_{ε,N}(λ) = ∫_ε^N |f(tλ)|² dt/t`.
pub fn band_integral(f: &SymbolFunction, eps: f64, upper: f64, lambda: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::InvalidArgument(format!(
            "band [{eps}, {upper}] must satisfy 0 < eps < N"
        )));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("negative eigenvalue {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let scale = f.calderon()?;
    log_axis_integral(f, eps * lambda, upper * lambda, 1e-3 * DEFAULT_REL_TOL * scale)
}

/// `h_{M,N}(λ) = Σ_{j=-M}^{N} |f|²(a^{2j} λ)`.
pub fn discrete_sum(f: &SymbolFunction, a: f64, m: u32, n: u32, lambda: f64) -> Result<f64> {
    check_ratio(a)?;
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("negative eigenvalue {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let a2 = a * a;
    let mut acc = KahanSum::new();
    for j in -(m as i64)..=(n as i64) {
        let s = a2.powi(j as i32) * lambda;
        let v = f.evaluate(s);
        acc += v * v;
    }
    Ok(acc.value())
}

fn check_ratio(a: f64) -> Result<()> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation ratio a = {a} must exceed 1")));
    }
    Ok(())
}

/// The bilateral sum `h(λ) = Σ_j |f|²(a^{2j} λ)`, truncated where the
/// explicit tail constants guarantee the remainder is below `1e-18 c`.
pub fn converged_sum(f: &SymbolFunction, a: f64, lambda: f64) -> Result<f64> {
    check_ratio(a)?;
    if lambda <= 0.0 {
        return Ok(0.0);
    }
    let c = f.calderon()?;
    let l = f.vanishing_order().max(1) as f64;
    let target = 1e-18 * c;
    let ln_a = a.ln();
    // Small-scale tail: (λ^{2l}‖f0‖²/(a^{4l}−1)) a^{−4Ml} ≤ target.
    let lead = lambda.powf(2.0 * l) * f.f0_sup().powi(2) / (a.powf(4.0 * l) - 1.0);
    let m = if lead > target {
        ((lead / target).ln() / (4.0 * l * ln_a)).ceil()
    } else {
        0.0
    };
    // Large scales: a^{2N} λ beyond S_MAX evaluates to zero.
    let n = ((S_MAX / lambda).ln() / (2.0 * ln_a)).ceil().max(0.0) + 1.0;
    discrete_sum(f, a, m as u32, n as u32, lambda)
}

/// Lower and upper Daubechies bounds over a probe grid of eigenvalues.
pub fn daubechies_bounds(f: &SymbolFunction, a: f64, lambda_grid: &[f64]) -> Result<(f64, f64)> {
    check_ratio(a)?;
    let lo = lambda_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambda_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) || hi < a * a * lo * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue grid [{lo}, {hi}] does not cover one period of ratio a² = {}",
            a * a
        )));
    }
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for &lambda in lambda_grid {
        let h = converged_sum(f, a, lambda)?;
        lower = lower.min(h);
        upper = upper.max(h);
    }
    if lower < 1e-14 {
        return Err(Error::DegenerateSymbol { a, lower });
    }
    Ok((lower, upper))
}

/// Explicit constants bounding the scale-truncation error on the spectral
/// band `[eta, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConstants {
    pub c_l: f64,
    pub c_eta: f64,
    pub c_l_prime: f64,
    pub c_eta_prime: f64,
    pub eta: f64,
    pub l_band: f64,
    pub j: u32,
    pub l: u32,
}

impl TruncationConstants {
    /// Bound on `sup_{[η,L]} |g_{ε,N} − c|`.
    pub fn band_bound(&self, eps: f64, upper: f64) -> f64 {
        self.c_l * eps.powi(2 * self.l as i32) + self.c_eta / upper.powi(2 * self.j as i32)
    }

    /// Bound on `sup_{[η,L]} |h_{M,N} − h|` for ratio `a`.
    pub fn sum_bound(&self, a: f64, m: u32, n: u32) -> f64 {
        self.c_l_prime / a.powf(4.0 * (m * self.l) as f64)
            + self.c_eta_prime / a.powf(4.0 * (n * self.j) as f64)
    }
}

pub fn truncation_constants(
    f: &SymbolFunction,
    eta: f64,
    l_band: f64,
    j: u32,
    a: f64,
) -> Result<TruncationConstants> {
    if !(eta > 0.0 && eta < l_band) {
        return Err(Error::InvalidArgument(format!(
            "band [{eta}, {l_band}] must satisfy 0 < eta < L"
        )));
    }
    if j < 1 {
        return Err(Error::InvalidArgument("decay order J must be ≥ 1".into()));
    }
    check_ratio(a)?;
    let l = f.vanishing_order();
    if l < 1 {
        return Err(Error::NonAdmissible(f.name().to_string()));
    }
    let sup2 = f.f0_sup() * f.f0_sup();
    let lpow = l_band.powi(2 * l as i32);
    let mj = f.decay_sup(j);
    let eta_pow = eta.powi(2 * j as i32);
    Ok(TruncationConstants {
        c_l: lpow * sup2 / (2 * l) as f64,
        c_eta: mj * mj / (2.0 * j as f64 * eta_pow),
        c_l_prime: lpow * sup2 / (a.powi(4 * l as i32) - 1.0),
        c_eta_prime: mj * mj / ((a.powi(4 * j as i32) - 1.0) * eta_pow),
        eta,
        l_band,
        j,
        l,
    })
}

/// Scale nodes with quadrature weights for `∫ · dt/t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ratio: Option<f64>,
}

/// How a band-adapted grid was chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDesign {
    /// Lower endpoint in the squared-scale variable (`t_min²`).
    pub eps: f64,
    /// Upper endpoint in the squared-scale variable (`t_max²`).
    pub upper: f64,
    pub constants: TruncationConstants,
    /// Predicted per-mode relative reconstruction error.
    pub predicted: f64,
}

impl ScaleGrid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, ratio: Option<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidArgument("scale grid needs matching nodes and weights".into()));
        }
        if nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("scale nodes must be positive and increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("scale weights must be positive".into()));
        }
        if let Some(a) = ratio {
            let ok = nodes
                .windows(2)
                .all(|w| ((w[1] / w[0]) - a).abs() <= 1e-12 * a);
            if !ok {
                return Err(Error::InvalidArgument(format!("nodes are not geometric with ratio {a}")));
            }
        }
        Ok(Self { nodes, weights, ratio })
    }

    /// Trapezoid rule in `log t` on `[t_min, t_max]`.
    pub fn log_trapezoid(t_min: f64, t_max: f64, nodes_per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) || nodes_per_decade == 0 {
            return Err(Error::InvalidArgument(format!("bad scale range [{t_min}, {t_max}]")));
        }
        let decades = (t_max / t_min).log10();
        let intervals = ((decades * nodes_per_decade as f64).ceil() as usize).max(2);
        let (ul, uh) = (t_min.ln(), t_max.ln());
        let h = (uh - ul) / intervals as f64;
        let nodes: Vec<f64> = (0..=intervals).map(|i| (ul + h * i as f64).exp()).collect();
        let mut weights = vec![h; intervals + 1];
        weights[0] = 0.5 * h;
        weights[intervals] = 0.5 * h;
        Ok(Self {
            nodes,
            weights,
            ratio: Some(h.exp()),
        })
    }

    /// `t_k = t0 a^k`, each weighted by `ln a` (a Riemann sum for `dt/t`).
    pub fn geometric(t0: f64, a: f64, count: usize) -> Result<Self> {
        check_ratio(a)?;
        let nodes: Vec<f64> = (0..count).map(|k| t0 * a.powi(k as i32)).collect();
        Self::new(nodes, vec![a.ln(); count], Some(a))
    }

    /// Chooses `[t_min, t_max]` so that the explicit truncation bound on the
    /// band `[eta, L]` equals `rel_err`, split evenly between both ends.
    /// Scales enter as `t²`, so the band endpoints are `t_min²` and `t_max²`.
    pub fn for_band(
        f: &SymbolFunction,
        eta: f64,
        l_band: f64,
        rel_err: f64,
        nodes_per_decade: usize,
    ) -> Result<(Self, GridDesign)> {
        let c = f.calderon()?;
        let l = f.vanishing_order() as f64;
        let mut best: Option<GridDesign> = None;
        for j in 1..=10 {
            let k = truncation_constants(f, eta, l_band, j, 2.0)?;
            let eps = (rel_err * c / (2.0 * k.c_l)).powf(1.0 / (2.0 * l));
            let upper = (2.0 * k.c_eta / (rel_err * c)).powf(1.0 / (2.0 * j as f64));
            let design = GridDesign {
                eps,
                upper,
                constants: k,
                predicted: k.band_bound(eps, upper) / c,
            };
            if best.is_none_or(|b| upper < b.upper) {
                best = Some(design);
            }
        }
        let design = best.expect("at least one decay order");
        let grid = Self::log_trapezoid(design.eps.sqrt(), design.upper.sqrt(), nodes_per_decade)?;
        Ok((grid, design))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ratio(&self) -> Option<f64> {
        self.ratio
    }

    pub fn t_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().expect("nonempty grid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `∫ g(t) dt/t`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        kahan_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)))
    }
}
