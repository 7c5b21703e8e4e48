//! The acceptance suite: each criterion recomputes its quantities from
//! scratch and reports pass or fail with the measured numbers.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_rational::Ratio;

use crate::error::Result;
use crate::numeric::{linspace, log_space};
use crate::spectral::{calderon_constant, ScaleGrid, SymbolFunction};
use crate::sphere::{
    binomial, exact_heat_trace_s2, gegenbauer, gt_approx, heat_trace, ht_approx, maclaurin_from_pole,
    pole_derivative_weights, pole_triangle, GegenbauerEvaluator, HeatTraceSeries, ZonalKernel,
};
use crate::torus::{mexican_hat_t2, SeriesMode, ThetaPair, TorusPoint};
use crate::transform::{
    calderon_identity_check, holder_fit, holder_test_field, localization_report, random_band_field,
    reconstruct_with_tolerance, relative_l2_error, sup_curve, Manifold, DEFAULT_HOLDER_WINDOW,
};

pub const TORUS_TABLE_TOL: f64 = 1e-4;
pub const THETA_DUALITY_TOL: f64 = 1e-10;
pub const GT_APPROX_TOL: f64 = 1e-3;
pub const HT_APPROX_TOL: f64 = 1.2e-3;
pub const SPOT_VALUE_TOL: f64 = 0.02;
pub const HEAT_TRACE_TOL_S001: f64 = 1e-6;
pub const HEAT_TRACE_TOL_S01: f64 = 1e-3;
pub const CALDERON_CONSTANT_TOL: f64 = 1e-9;
pub const PER_MODE_IDENTITY_TOL: f64 = 1e-8;
pub const FIELD_IDENTITY_TOL: f64 = 1e-6;
pub const RECONSTRUCTION_PREDICTED: f64 = 1e-4;
pub const RECONSTRUCTION_MEASURED_TOL: f64 = 2e-4;
pub const HOLDER_ALPHA: f64 = 0.5;
pub const HOLDER_ALPHA_TOL: f64 = 0.05;
pub const HOLDER_R2_MIN: f64 = 0.99;
pub const LOCALIZATION_RATIO_MAX: f64 = 10.0;
pub const GENERATING_FUNCTION_TOL: f64 = 1e-10;
pub const POLE_FD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {:>2} {:<34} {:>8.3}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(id: u32, name: &'static str, budget_s: u64, body: impl FnOnce() -> Result<Outcome>) -> CriterionResult {
    let start = Instant::now();
    let outcome = body().unwrap_or_else(|e| Outcome {
        passed: false,
        detail: format!("error: {e}"),
    });
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    let mut detail = outcome.detail;
    let in_time = elapsed < budget;
    if !in_time {
        detail.push_str(&format!("; over runtime budget {budget_s}s"));
    }
    CriterionResult {
        id,
        name,
        passed: outcome.passed && in_time,
        detail,
        elapsed,
        budget,
    }
}

pub fn criterion_01_torus_table() -> CriterionResult {
    timed(1, "torus diagonal table", 1, || {
        let table = [(2.0, 0.00070), (1.0, 0.59017), (0.5, 0.99984), (0.125, 1.00000)];
        let origin = TorusPoint::new(vec![0.0, 0.0]);
        let mut worst: f64 = 0.0;
        let mut cells = Vec::new();
        for (t, expect) in table {
            let v = t * t * PI * mexican_hat_t2(t, &origin)?;
            worst = worst.max((v - expect).abs());
            cells.push(format!("t={t}:{v:.5}"));
        }
        Ok(Outcome {
            passed: worst <= TORUS_TABLE_TOL,
            detail: format!("{} max|err|={worst:.2e}", cells.join(" ")),
        })
    })
}

pub fn criterion_02_theta_duality() -> CriterionResult {
    timed(2, "theta duality", 1, || {
        let mut worst: f64 = 0.0;
        for t in [0.05, 0.1, 0.3, 1.0, 3.0] {
            let eig = ThetaPair::new(t, SeriesMode::EigenSeries)?;
            let poi = ThetaPair::new(t, SeriesMode::PoissonSeries)?;
            for i in 0..64 {
                let x = -0.5 + (i as f64 + 0.5) / 64.0;
                worst = worst.max((eig.u(x) - poi.u(x)).abs());
                worst = worst.max((eig.v(x) - poi.v(x)).abs());
            }
        }
        Ok(Outcome {
            passed: worst <= THETA_DUALITY_TOL,
            detail: format!("max|eigen-poisson|={worst:.2e}"),
        })
    })
}

pub fn criterion_03_sphere_approximations() -> CriterionResult {
    timed(3, "sphere approximations at t=0.1", 5, || {
        let t = 0.1;
        let g = ZonalKernel::new(&SymbolFunction::gauss(), t, 2, 2000)?;
        let h = ZonalKernel::new(&SymbolFunction::mexican(1), t, 2, 2000)?;
        let (mut g_err, mut h_err) = (0.0f64, 0.0f64);
        for theta in linspace(-PI, PI, 2048) {
            let c = theta.cos();
            g_err = g_err.max((gt_approx(t, theta) - 4.0 * PI * g.sum(c)).abs());
            h_err = h_err.max((ht_approx(t, theta) - 4.0 * PI * h.sum(c)).abs());
        }
        let spots = [
            gt_approx(t, 0.3),
            4.0 * PI * g.sum(0.3f64.cos()),
            ht_approx(t, 0.4),
            4.0 * PI * h.sum(0.4f64.cos()),
        ];
        let spot_ok = (spots[0] - 10.655).abs() <= SPOT_VALUE_TOL
            && (spots[1] - 10.655).abs() <= SPOT_VALUE_TOL
            && (spots[2] + 5.593).abs() <= SPOT_VALUE_TOL
            && (spots[3] + 5.593).abs() <= SPOT_VALUE_TOL;
        Ok(Outcome {
            passed: g_err <= GT_APPROX_TOL && h_err <= HT_APPROX_TOL && spot_ok,
            detail: format!(
                "g err={g_err:.2e} h err={h_err:.2e} g(0.3)={:.4}/{:.4} h(0.4)={:.4}/{:.4}",
                spots[0], spots[1], spots[2], spots[3]
            ),
        })
    })
}

pub fn criterion_04_heat_trace() -> CriterionResult {
    timed(4, "heat-trace asymptotics", 1, || {
        let tr = HeatTraceSeries::sphere2();
        let rel = |s: f64| {
            let exact = exact_heat_trace_s2(s, 2000);
            ((heat_trace(s, &tr) - exact) / exact).abs()
        };
        let (a, b) = (rel(0.01), rel(0.1));
        Ok(Outcome {
            passed: a <= HEAT_TRACE_TOL_S001 && b <= HEAT_TRACE_TOL_S01,
            detail: format!("rel err s=0.01: {a:.2e}, s=0.1: {b:.2e}"),
        })
    })
}

pub fn criterion_05_calderon_constants() -> CriterionResult {
    timed(5, "Calderon constants", 1, || {
        let c1 = calderon_constant(&SymbolFunction::mexican(1), 1e-12)?;
        let c2 = calderon_constant(&SymbolFunction::mexican(2), 1e-12)?;
        let e1 = ((c1 - 0.25) / 0.25).abs();
        let e2 = ((c2 - 0.375) / 0.375).abs();
        Ok(Outcome {
            passed: e1 <= CALDERON_CONSTANT_TOL && e2 <= CALDERON_CONSTANT_TOL,
            detail: format!("c1={c1:.15} (rel {e1:.1e}) c2={c2:.15} (rel {e2:.1e})"),
        })
    })
}

pub fn criterion_06_spectral_identity() -> CriterionResult {
    timed(6, "spectral Calderon identity", 5, || {
        let f = SymbolFunction::mexican(1);
        let half_c = f.calderon()? / 2.0;
        let grid = ScaleGrid::log_trapezoid(1e-6, 10.0, 400)?;
        let lambdas = [4.0 * PI * PI, 100.0 * PI * PI, 2.0, 110.0, 2550.0];
        let mut worst: f64 = 0.0;
        for lambda in lambdas {
            let v = grid.integrate(|t| f.evaluate(t * t * lambda).powi(2));
            worst = worst.max((v - half_c).abs());
        }
        let field = random_band_field(Manifold::Torus2, 20, 1.0, 400.0 * PI * PI, 20_240_601)?;
        let chk = calderon_identity_check(&field, &f, &grid)?;
        Ok(Outcome {
            passed: worst <= PER_MODE_IDENTITY_TOL && chk.rel_err <= FIELD_IDENTITY_TOL,
            detail: format!("per-mode max|err|={worst:.2e} field rel err={:.2e}", chk.rel_err),
        })
    })
}

pub fn criterion_07_reconstruction() -> CriterionResult {
    timed(7, "predicted vs measured reconstruction", 10, || {
        let f = SymbolFunction::mexican(1);
        let (eta, l_band) = (4.0 * PI * PI, 400.0 * PI * PI);
        let (grid, design) = ScaleGrid::for_band(&f, eta, l_band, RECONSTRUCTION_PREDICTED, 400)?;
        let mut worst: f64 = 0.0;
        for seed in 0..50u64 {
            let field = random_band_field(Manifold::Torus2, 20, eta, l_band, 7_000 + seed)?;
            let rec = reconstruct_with_tolerance(&field, &f, &grid, RECONSTRUCTION_MEASURED_TOL)?;
            worst = worst.max(relative_l2_error(&rec, &field.mean_free())?);
        }
        Ok(Outcome {
            passed: worst <= RECONSTRUCTION_MEASURED_TOL,
            detail: format!(
                "grid t=[{:.3e}, {:.3e}] predicted={:.2e} measured max={worst:.2e}",
                grid.t_min(),
                grid.t_max(),
                design.predicted
            ),
        })
    })
}

pub fn criterion_08_holder() -> CriterionResult {
    timed(8, "Holder exponent", 10, || {
        let field = holder_test_field(256)?;
        let scales = log_space(DEFAULT_HOLDER_WINDOW.0, DEFAULT_HOLDER_WINDOW.1, 21);
        let curve = sup_curve(&field, &SymbolFunction::mexican(1), &scales, 4096)?;
        let fit = holder_fit(&curve, DEFAULT_HOLDER_WINDOW)?;
        Ok(Outcome {
            passed: (fit.alpha - HOLDER_ALPHA).abs() <= HOLDER_ALPHA_TOL && fit.r_squared >= HOLDER_R2_MIN,
            detail: format!("alpha={:.4} r2={:.5} C={:.4}", fit.alpha, fit.r_squared, fit.c),
        })
    })
}

pub fn criterion_09_localization() -> CriterionResult {
    timed(9, "localization boundedness", 10, || {
        let f = SymbolFunction::mexican(1);
        let ts = log_space(0.05, 1.0, 12);
        let s2 = localization_report(&f, Manifold::Sphere2, &ts, 3)?;
        let t2 = localization_report(&f, Manifold::Torus2, &ts, 3)?;
        Ok(Outcome {
            passed: s2.ratio <= LOCALIZATION_RATIO_MAX && t2.ratio <= LOCALIZATION_RATIO_MAX,
            detail: format!("S2 ratio={:.3} T2 ratio={:.3e}", s2.ratio, t2.ratio),
        })
    })
}

pub fn criterion_10_gegenbauer() -> CriterionResult {
    timed(10, "Gegenbauer correctness", 1, || {
        let mut mismatches = 0;
        for n in [2u32, 3, 4] {
            let vals = GegenbauerEvaluator::for_sphere(n).values(60, 1.0);
            for (l, v) in vals.iter().enumerate() {
                let exact = binomial(n as u64 + l as u64 - 2, l as u64) as u64;
                if v.round() as u64 != exact {
                    mismatches += 1;
                }
            }
        }
        let (r, tau) = (0.3f64, 0.7f64);
        let mut worst: f64 = 0.0;
        for lambda in [0.5, 1.0, 1.5] {
            let partial: f64 = (0..=60).map(|l| gegenbauer(l, lambda, tau) * r.powi(l as i32)).sum();
            let closed = (1.0 - 2.0 * r * tau + r * r).powf(-lambda);
            worst = worst.max(((partial - closed) / closed).abs());
        }
        Ok(Outcome {
            passed: mismatches == 0 && worst <= GENERATING_FUNCTION_TOL,
            detail: format!("binomial mismatches={mismatches} generating fn rel err={worst:.2e}"),
        })
    })
}

pub fn criterion_11_pole_triangle() -> CriterionResult {
    timed(11, "pole-derivative triangle", 1, || {
        // m = 1: (ΔU)(N) = n u'(1) and −d²/dθ² u(cos θ)|₀ = u'(1)
        let mut exact = true;
        for n in 1..=6usize {
            exact &= pole_triangle(1, n)?[0][0] == Ratio::from_integer(n as i128);
            exact &= pole_derivative_weights(1, n)? == vec![Ratio::new(-1, n as i128)];
        }
        let v = maclaurin_from_pole(2, &[6.0, 36.0], 2)?;
        let g = |th: f64| {
            let c = th.cos();
            0.5 * (3.0 * c * c - 1.0)
        };
        let d4 = |h: f64| (g(2.0 * h) - 4.0 * g(h) + 6.0 * g(0.0) - 4.0 * g(-h) + g(-2.0 * h)) / h.powi(4);
        let h = 1e-2;
        let oracle = (4.0 * d4(h / 2.0) - d4(h)) / 3.0;
        let rel = ((v - oracle) / oracle).abs();
        Ok(Outcome {
            passed: exact && rel <= POLE_FD_TOL,
            detail: format!("m=1 exact={exact} m=2 value={v:.12} fd={oracle:.12} rel={rel:.1e}"),
        })
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_01_torus_table(),
        criterion_02_theta_duality(),
        criterion_03_sphere_approximations(),
        criterion_04_heat_trace(),
        criterion_05_calderon_constants(),
        criterion_06_spectral_identity(),
        criterion_07_reconstruction(),
        criterion_08_holder(),
        criterion_09_localization(),
        criterion_10_gegenbauer(),
        criterion_11_pole_triangle(),
    ]
}
