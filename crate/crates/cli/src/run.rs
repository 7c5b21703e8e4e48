//! Command implementations. Each returns a [`Report`]: a CSV table, trailing
//! `# key=value` summary lines, and whether every tolerance held.

use std::f64::consts::PI;

use mwave::acceptance;
use mwave::numeric::log_space;
use mwave::spectral::{ScaleGrid, SymbolFunction, SymbolKind};
use mwave::sphere::{default_l_max, gt_approx, ht_approx, ZonalKernel};
use mwave::torus::{
    default_bandlimit, factored_kernel_t2, mexican_hat_t2, torus_kernel, SeriesMode, ThetaPair, TorusPoint,
};
use mwave::transform::{
    apply_wavelet, holder_fit, holder_test_field, localization_report, reconstruct_with_tolerance,
    relative_l2_error, sup_curve, Manifold, SpectralField, DEFAULT_HOLDER_WINDOW, OUTSIDE_MASS_TOLERANCE,
};
use mwave::Error;
use rayon::prelude::*;

use crate::config::{Command, RunConfig, ThetaSpec};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub trailer: Vec<(String, String)>,
    pub passed: bool,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            trailer: Vec::new(),
            passed: true,
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.trailer.push((key.to_string(), value.to_string()));
    }

    /// Provenance line, CSV body, then `# key=value` lines.
    pub fn render(&self, cfg: &RunConfig) -> Result<String, CliError> {
        let mut out = format!("# mwave {} v{VERSION} config={}\n", cfg.command(), cfg.hash());
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8_lossy(&body));
        for (k, v) in &self.trailer {
            out.push_str(&format!("# {k}={v}\n"));
        }
        Ok(out)
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command() {
        Command::Kernel => kernel(cfg),
        Command::Validate => validate(cfg),
        Command::Cwt => cwt(cfg),
        Command::Reconstruct => reconstruct(cfg),
        Command::Holder => holder(cfg),
        Command::Localize => localize(cfg),
        Command::Accept => accept(),
    }
}

fn symbol(cfg: &RunConfig, allow_non_admissible: bool) -> Result<SymbolFunction, CliError> {
    let spec = cfg.text("symbol").unwrap_or("mexican:1");
    let f: SymbolFunction = spec
        .parse()
        .map_err(|e: Error| CliError::Usage(format!("--symbol: {}", e)))?;
    if !allow_non_admissible && !f.is_admissible() {
        return Err(CliError::Usage(format!(
            "--symbol {spec} is not admissible for `{}` (only kernel and validate accept it)",
            cfg.command()
        )));
    }
    Ok(f)
}

fn scales(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let ts = cfg.require("t", cfg.floats("t"))?.to_vec();
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(CliError::Usage("--t: scales must be positive".into()));
    }
    Ok(ts)
}

fn read_field(cfg: &RunConfig) -> Result<SpectralField, CliError> {
    let path = cfg.require("input", cfg.path("input"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))?;
    SpectralField::from_csv(&text).map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))
}

fn mode_columns(m: Manifold) -> &'static [&'static str] {
    match m {
        Manifold::Torus1 => &["m1"],
        Manifold::Torus2 => &["m1", "m2"],
        Manifold::Sphere2 => &["l", "k"],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum KernelReport {
    Raw,
    FourPi,
    T2Pi,
}

fn kernel(cfg: &RunConfig) -> Result<Report, CliError> {
    let manifold = cfg.require("manifold", cfg.manifold())?;
    let f = symbol(cfg, true)?;
    let ts = scales(cfg)?;
    let report = match cfg.text("report") {
        None if manifold == Manifold::Sphere2 => KernelReport::FourPi,
        None | Some("kernel") => KernelReport::Raw,
        Some("4pi") => KernelReport::FourPi,
        Some("t2pi") => KernelReport::T2Pi,
        Some(other) => return Err(CliError::Usage(format!("--report: unknown `{other}` (kernel, 4pi, t2pi)"))),
    };
    let scale = |t: f64| match report {
        KernelReport::Raw => 1.0,
        KernelReport::FourPi => 4.0 * PI,
        KernelReport::T2Pi => t * t * PI,
    };
    match manifold {
        Manifold::Sphere2 => {
            if cfg.get("point").is_some() || cfg.get("grid").is_some() {
                return Err(CliError::Usage("--point/--grid apply to torus manifolds; use --theta".into()));
            }
            let theta = cfg.theta().unwrap_or(ThetaSpec { lo: 0.0, hi: PI, n: 512 });
            let mut rep = Report::new(&["t", "theta", "value"]);
            let mut worst_tail: f64 = 0.0;
            for &t in &ts {
                let l_max = cfg.count("l-max").unwrap_or_else(|| default_l_max(t));
                let k = ZonalKernel::new(&f, t, 2, l_max)?;
                worst_tail = worst_tail.max(k.tail_fraction());
                let values: Vec<f64> = theta.samples().par_iter().map(|th| k.sum(th.cos())).collect();
                for (th, v) in theta.samples().into_iter().zip(values) {
                    rep.rows.push(vec![num(t), num(th), num(scale(t) * v)]);
                }
            }
            if worst_tail > mwave::sphere::ZONAL_TAIL_TOLERANCE {
                rep.note("truncation_tail_fraction", num(worst_tail));
                eprintln!("warning: zonal series truncated with tail fraction {worst_tail:.3e}; raise --l-max");
            }
            Ok(rep)
        }
        torus => {
            if cfg.theta().is_some() {
                return Err(CliError::Usage("--theta applies to sphere2; use --point or --grid".into()));
            }
            let dim = torus.dim();
            let points: Vec<Vec<f64>> = match (cfg.floats("point"), cfg.count("grid")) {
                (Some(p), None) => {
                    if p.len() != dim {
                        return Err(CliError::Usage(format!("--point needs {dim} coordinates")));
                    }
                    vec![p.to_vec()]
                }
                (None, Some(n)) if n >= 1 => torus_grid(dim, n),
                (None, None) => vec![vec![0.0; dim]],
                _ => return Err(CliError::Usage("give one of --point or --grid (≥ 1)".into())),
            };
            let coord_cols: &[&str] = if dim == 1 { &["x"] } else { &["x", "y"] };
            let mut header = vec!["t"];
            header.extend_from_slice(coord_cols);
            header.push("value");
            let mut rep = Report::new(&header);
            let mut truncated = false;
            for &t in &ts {
                let values: Vec<(f64, bool)> = points
                    .par_iter()
                    .map(|p| torus_value(&f, t, p))
                    .collect::<Result<_, _>>()?;
                for (p, (v, tr)) in points.iter().zip(values) {
                    truncated |= tr;
                    let mut row = vec![num(t)];
                    row.extend(p.iter().map(|&x| num(x)));
                    row.push(num(scale(t) * v));
                    rep.rows.push(row);
                }
            }
            if truncated {
                rep.note("truncated", "true");
                eprintln!("warning: lattice sum truncated; values are partial sums");
            }
            Ok(rep)
        }
    }
}

fn torus_grid(dim: usize, n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..n).map(|i| -0.5 + (i as f64 + 0.5) / n as f64).collect();
    if dim == 1 {
        return axis.into_iter().map(|x| vec![x]).collect();
    }
    axis.iter().flat_map(|&x| axis.iter().map(move |&y| vec![x, y])).collect()
}

/// Kernel value and whether it is a truncated partial sum.
fn torus_value(f: &SymbolFunction, t: f64, p: &[f64]) -> Result<(f64, bool), CliError> {
    let point = TorusPoint::new(p.to_vec());
    if p.len() == 2 {
        if let Some(v) = factored_kernel_t2(f, t, &point) {
            return Ok((v?, false));
        }
    }
    match torus_kernel(f, t, &point, default_bandlimit(t)) {
        Ok(v) => Ok((v, false)),
        Err(e @ Error::TruncationWarning { .. }) => Ok((e.partial_value().unwrap_or(0.0), true)),
        Err(e) => Err(e.into()),
    }
}

fn validate(cfg: &RunConfig) -> Result<Report, CliError> {
    let target = cfg.require("target", cfg.text("target"))?;
    match target {
        "ht-approx" | "gt-approx" => {
            let is_h = target == "ht-approx";
            let tol = cfg.float("tolerance").unwrap_or(if is_h { 1.2e-3 } else { 1e-3 });
            let t = match cfg.floats("t") {
                None => 0.1,
                Some([t]) if *t > 0.0 => *t,
                Some(_) => return Err(CliError::Usage("--t: validate takes a single positive scale".into())),
            };
            let theta = cfg.theta().unwrap_or(ThetaSpec { lo: -PI, hi: PI, n: 2048 });
            let l_max = cfg.count("l-max").unwrap_or(2000);
            let f = if is_h { SymbolFunction::mexican(1) } else { SymbolFunction::gauss() };
            let k = ZonalKernel::new(&f, t, 2, l_max)?;
            let mut rep = Report::new(&["theta", "series", "approx", "abs_err"]);
            let mut worst: f64 = 0.0;
            let mut at = 0.0;
            for th in theta.samples() {
                let series = 4.0 * PI * k.sum(th.cos());
                let approx = if is_h { ht_approx(t, th) } else { gt_approx(t, th) };
                let err = (series - approx).abs();
                if err > worst {
                    worst = err;
                    at = th;
                }
                rep.rows.push(vec![num(th), num(series), num(approx), num(err)]);
            }
            rep.passed = worst <= tol;
            rep.note("max_abs_err", num(worst));
            rep.note("at_theta", num(at));
            rep.note("tolerance", num(tol));
            Ok(rep)
        }
        "theta-duality" => {
            let tol = cfg.float("tolerance").unwrap_or(1e-10);
            let ts = cfg.floats("t").map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.05, 0.1, 0.3, 1.0, 3.0]);
            let mut rep = Report::new(&["t", "x", "u_eigen", "u_poisson", "v_eigen", "v_poisson"]);
            let mut worst: f64 = 0.0;
            for t in ts {
                let e = ThetaPair::new(t, SeriesMode::EigenSeries)?;
                let p = ThetaPair::new(t, SeriesMode::PoissonSeries)?;
                for i in 0..64 {
                    let x = -0.5 + (i as f64 + 0.5) / 64.0;
                    let (ue, up, ve, vp) = (e.u(x), p.u(x), e.v(x), p.v(x));
                    worst = worst.max((ue - up).abs()).max((ve - vp).abs());
                    rep.rows.push(vec![num(t), num(x), num(ue), num(up), num(ve), num(vp)]);
                }
            }
            rep.passed = worst <= tol;
            rep.note("max_abs_diff", num(worst));
            rep.note("tolerance", num(tol));
            Ok(rep)
        }
        "torus-table" => {
            let tol = cfg.float("tolerance").unwrap_or(1e-4);
            let origin = TorusPoint::new(vec![0.0, 0.0]);
            let mut rep = Report::new(&["t", "t2pi_kernel", "expected", "abs_err"]);
            let mut worst: f64 = 0.0;
            for (t, expect) in [(2.0, 0.00070), (1.0, 0.59017), (0.5, 0.99984), (0.125, 1.00000)] {
                let v = t * t * PI * mexican_hat_t2(t, &origin)?;
                let err = (v - expect).abs();
                worst = worst.max(err);
                rep.rows.push(vec![num(t), num(v), num(expect), num(err)]);
            }
            rep.passed = worst <= tol;
            rep.note("max_abs_err", num(worst));
            rep.note("tolerance", num(tol));
            Ok(rep)
        }
        other => Err(CliError::Usage(format!(
            "--target: unknown `{other}` (ht-approx, gt-approx, theta-duality, torus-table)"
        ))),
    }
}

fn cwt(cfg: &RunConfig) -> Result<Report, CliError> {
    let f = symbol(cfg, false)?;
    let field = read_field(cfg)?;
    let ts = scales(cfg)?;
    let mut header = vec!["t"];
    header.extend_from_slice(mode_columns(field.manifold()));
    header.push("coefficient");
    let mut rep = Report::new(&header);
    for t in ts {
        let out = apply_wavelet(&field, &f, t);
        for (m, c) in out.coeffs() {
            let mut row = vec![num(t)];
            row.extend(m.iter().map(i64::to_string));
            row.push(num(*c));
            rep.rows.push(row);
        }
        rep.note(&format!("norm_sq[t={}]", num(t)), num(out.norm_sq()));
    }
    Ok(rep)
}

fn reconstruct(cfg: &RunConfig) -> Result<Report, CliError> {
    let f = symbol(cfg, false)?;
    let field = read_field(cfg)?;
    let npd = cfg.count("nodes-per-decade").unwrap_or(400);
    let (grid, predicted, tol) = match (cfg.float("t-min"), cfg.float("t-max")) {
        (Some(lo), Some(hi)) => {
            if cfg.float("rel-err").is_some() {
                return Err(CliError::Usage("--rel-err conflicts with --t-min/--t-max".into()));
            }
            let grid = ScaleGrid::log_trapezoid(lo, hi, npd)?;
            (grid, None, cfg.float("tolerance").unwrap_or(OUTSIDE_MASS_TOLERANCE))
        }
        (None, None) => {
            let rel = cfg.float("rel-err").unwrap_or(1e-4);
            let lambdas: Vec<f64> = field
                .coeffs()
                .keys()
                .map(|m| field.manifold().eigenvalue(m))
                .filter(|&l| l > 0.0)
                .collect();
            if lambdas.is_empty() {
                return Err(CliError::Usage("--input has no nonconstant modes".into()));
            }
            let eta = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
            let l_band = lambdas.iter().copied().fold(0.0, f64::max);
            let (grid, design) = ScaleGrid::for_band(&f, eta, l_band, rel, npd)?;
            let tol = cfg.float("tolerance").unwrap_or(2.0 * design.predicted);
            (grid, Some(design.predicted), tol)
        }
        _ => return Err(CliError::Usage("--t-min and --t-max go together".into())),
    };
    let rec = reconstruct_with_tolerance(&field, &f, &grid, tol)?;
    let target = field.mean_free();
    let measured = if target.norm_sq() > 0.0 { relative_l2_error(&rec, &target)? } else { rec.norm() };
    let mut header: Vec<&str> = mode_columns(field.manifold()).to_vec();
    header.push("coefficient");
    let mut rep = Report::new(&header);
    for (m, c) in rec.coeffs() {
        let mut row: Vec<String> = m.iter().map(i64::to_string).collect();
        row.push(num(*c));
        rep.rows.push(row);
    }
    rep.note("t_min", num(grid.t_min()));
    rep.note("t_max", num(grid.t_max()));
    rep.note("nodes", grid.len());
    if let Some(p) = predicted {
        rep.note("predicted_rel_err", num(p));
    }
    rep.note("measured_rel_err", num(measured));
    rep.note("tolerance", num(tol));
    rep.passed = measured <= tol;
    Ok(rep)
}

fn holder(cfg: &RunConfig) -> Result<Report, CliError> {
    let f = symbol(cfg, false)?;
    let field = match (cfg.path("input"), cfg.count("test-field")) {
        (Some(_), None) => read_field(cfg)?,
        (None, Some(b)) if b >= 1 => holder_test_field(b)?,
        (None, None) => holder_test_field(256)?,
        _ => return Err(CliError::Usage("give one of --input or --test-field (≥ 1)".into())),
    };
    if field.manifold() == Manifold::Torus2 && cfg.count("resolution").is_none() {
        eprintln!("note: torus2 synthesis uses resolution² points");
    }
    let window = cfg.window("window").unwrap_or(DEFAULT_HOLDER_WINDOW);
    let count = cfg.count("scales").unwrap_or(21);
    if count < 2 {
        return Err(CliError::Usage("--scales must be ≥ 2".into()));
    }
    let resolution = cfg.count("resolution").unwrap_or_else(|| 4096.max(4 * field.bandlimit()));
    let ts = log_space(window.0, window.1, count);
    let curve = sup_curve(&field, &f, &ts, resolution).map_err(|e| match e {
        Error::AliasWarning { resolution, bandlimit, .. } => CliError::Usage(format!(
            "--resolution {resolution} aliases bandlimit {bandlimit}; need at least {}",
            4 * bandlimit
        )),
        e => e.into(),
    })?;
    let mut rep = Report::new(&["t", "sup_norm"]);
    for &(t, v) in &curve {
        rep.rows.push(vec![num(t), num(v)]);
    }
    let fit = holder_fit(&curve, window)?;
    rep.note("alpha", num(fit.alpha));
    rep.note("c", num(fit.c));
    rep.note("r_squared", num(fit.r_squared));
    rep.note("points", fit.points);
    if let Some(expect) = cfg.float("expect-alpha") {
        let tol = cfg.float("tolerance").unwrap_or(0.05);
        rep.passed = (fit.alpha - expect).abs() <= tol;
        rep.note("expect_alpha", num(expect));
        rep.note("tolerance", num(tol));
    }
    Ok(rep)
}

fn localize(cfg: &RunConfig) -> Result<Report, CliError> {
    let manifold = cfg.require("manifold", cfg.manifold())?;
    let f = symbol(cfg, false)?;
    let ts = match cfg.floats("t") {
        Some(_) => scales(cfg)?,
        None => log_space(0.05, 1.0, 12),
    };
    let power = cfg.count("power").unwrap_or(3);
    let power = u32::try_from(power).map_err(|_| CliError::Usage("--power too large".into()))?;
    let report = localization_report(&f, manifold, &ts, power)?;
    let mut rep = Report::new(&["t", "weighted_sup", "at_distance"]);
    for r in &report.rows {
        rep.rows.push(vec![num(r.t), num(r.sup), num(r.at_distance)]);
    }
    let max_ratio = cfg.float("max-ratio").unwrap_or(10.0);
    rep.note("ratio", num(report.ratio));
    rep.note("max_ratio", num(max_ratio));
    rep.passed = report.ratio <= max_ratio;
    if matches!(f.kind(), SymbolKind::Mexican(_)) && manifold == Manifold::Torus2 && !rep.passed {
        eprintln!("note: on T² the kernel of s e^(-s) is O(e^(-4π²t²)) at large t; the inf over t collapses");
    }
    Ok(rep)
}

fn accept() -> Result<Report, CliError> {
    let results = acceptance::run_all();
    let mut rep = Report::new(&["id", "name", "passed", "detail"]);
    for r in &results {
        eprintln!("{r}");
        rep.rows.push(vec![
            r.id.to_string(),
            r.name.to_string(),
            r.passed.to_string(),
            r.detail.clone(),
        ]);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    rep.note("passed", results.len() - failed);
    rep.note("failed", failed);
    rep.passed = failed == 0;
    Ok(rep)
}
