//! Band-limited fields stored by their eigen-coefficients, and their samples on
//! quadrature grids.
//!
//! Torus modes are integer vectors `m`; the real basis function is the product
//! over coordinates of `1`, `cos(2π m_i r_i)` (`m_i > 0`) or `sin(2π |m_i| r_i)`
//! (`m_i < 0`). Sphere modes are `(l, k)` with `|k| ≤ l`, using Schmidt
//! semi-normalized real harmonics, so the zonal member `(l, 0)` is `P_l(cos θ)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, kahan_sum};
use crate::sphere::GegenbauerEvaluator;

pub type Mode = Vec<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Manifold {
    Torus1,
    Torus2,
    Sphere2,
}

impl Manifold {
    pub fn dim(self) -> usize {
        match self {
            Manifold::Torus1 => 1,
            Manifold::Torus2 | Manifold::Sphere2 => 2,
        }
    }

    pub fn volume(self) -> f64 {
        match self {
            Manifold::Torus1 | Manifold::Torus2 => 1.0,
            Manifold::Sphere2 => 4.0 * PI,
        }
    }

    pub fn is_torus(self) -> bool {
        !matches!(self, Manifold::Sphere2)
    }

    /// Number of integers in a mode index.
    pub fn mode_len(self) -> usize {
        match self {
            Manifold::Torus1 => 1,
            Manifold::Torus2 | Manifold::Sphere2 => 2,
        }
    }

    pub fn zero_mode(self) -> Mode {
        vec![0; self.mode_len()]
    }

    pub fn eigenvalue(self, mode: &[i64]) -> f64 {
        match self {
            Manifold::Torus1 | Manifold::Torus2 => crate::torus::torus_eigenvalue(mode),
            Manifold::Sphere2 => {
                let l = mode[0] as f64;
                l * (l + 1.0)
            }
        }
    }

    /// `∫ |basis|² dμ`.
    pub fn basis_norm_sq(self, mode: &[i64]) -> f64 {
        match self {
            Manifold::Torus1 | Manifold::Torus2 => {
                0.5f64.powi(mode.iter().filter(|&&m| m != 0).count() as i32)
            }
            Manifold::Sphere2 => 4.0 * PI / (2.0 * mode[0] as f64 + 1.0),
        }
    }

    pub fn check_mode(self, mode: &[i64], bandlimit: usize) -> Result<()> {
        if mode.len() != self.mode_len() {
            return Err(Error::DimensionMismatch(mode.len(), self.mode_len()));
        }
        let b = bandlimit as i64;
        match self {
            Manifold::Torus1 | Manifold::Torus2 => {
                if mode.iter().any(|m| m.abs() > b) {
                    return Err(Error::InvalidArgument(format!("mode {mode:?} exceeds bandlimit {b}")));
                }
            }
            Manifold::Sphere2 => {
                let (l, k) = (mode[0], mode[1]);
                if l < 0 || k.abs() > l {
                    return Err(Error::InvalidArgument(format!("invalid spherical index ({l}, {k})")));
                }
                if l > b {
                    return Err(Error::InvalidArgument(format!("degree {l} exceeds bandlimit {b}")));
                }
            }
        }
        Ok(())
    }

    fn csv_header(self) -> &'static [&'static str] {
        match self {
            Manifold::Torus1 => &["m1", "coefficient"],
            Manifold::Torus2 => &["m1", "m2", "coefficient"],
            Manifold::Sphere2 => &["l", "k", "coefficient"],
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::Torus1 => "torus1",
            Manifold::Torus2 => "torus2",
            Manifold::Sphere2 => "sphere2",
        })
    }
}

impl FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "torus1" => Ok(Manifold::Torus1),
            "torus2" => Ok(Manifold::Torus2),
            "sphere2" => Ok(Manifold::Sphere2),
            other => Err(Error::Parse(format!("unknown manifold `{other}` (torus1, torus2, sphere2)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    manifold: Manifold,
    coeffs: BTreeMap<Mode, f64>,
    bandlimit: usize,
}

impl SpectralField {
    pub fn new(manifold: Manifold, bandlimit: usize) -> Self {
        Self {
            manifold,
            coeffs: BTreeMap::new(),
            bandlimit,
        }
    }

    pub fn from_modes<I>(manifold: Manifold, bandlimit: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, f64)>,
    {
        let mut field = Self::new(manifold, bandlimit);
        for (mode, value) in modes {
            field.insert(mode, value)?;
        }
        Ok(field)
    }

    /// The constant function `value`.
    pub fn constant(manifold: Manifold, value: f64) -> Self {
        let mut field = Self::new(manifold, 0);
        field.coeffs.insert(manifold.zero_mode(), value);
        field
    }

    /// Sets a coefficient, replacing any previous value.
    pub fn insert(&mut self, mode: Mode, value: f64) -> Result<()> {
        self.manifold.check_mode(&mode, self.bandlimit)?;
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient for {mode:?}")));
        }
        self.coeffs.insert(mode, value);
        Ok(())
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn coeffs(&self) -> &BTreeMap<Mode, f64> {
        &self.coeffs
    }

    pub fn get(&self, mode: &[i64]) -> f64 {
        self.coeffs.get(mode).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of the constant mode.
    pub fn mean(&self) -> f64 {
        self.get(&self.manifold.zero_mode())
    }

    /// `(I − P) F`.
    pub fn mean_free(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&self.manifold.zero_mode());
        out
    }

    /// Applies `c ↦ g(mode, λ, c)` to every stored coefficient.
    pub fn map_modes<G>(&self, g: G) -> Self
    where
        G: Fn(&[i64], f64, f64) -> f64,
    {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, &c)| (m.clone(), g(m, self.manifold.eigenvalue(m), c)))
            .collect();
        Self {
            manifold: self.manifold,
            coeffs,
            bandlimit: self.bandlimit,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_, _, c| a * c)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.manifold != other.manifold {
            return Err(Error::InvalidArgument(format!(
                "cannot combine {} and {} fields",
                self.manifold, other.manifold
            )));
        }
        let mut coeffs: BTreeMap<Mode, f64> = self.coeffs.iter().map(|(m, &c)| (m.clone(), a * c)).collect();
        for (m, &c) in &other.coeffs {
            *coeffs.entry(m.clone()).or_insert(0.0) += b * c;
        }
        Ok(Self {
            manifold: self.manifold,
            coeffs,
            bandlimit: self.bandlimit.max(other.bandlimit),
        })
    }

    /// `‖F‖₂²` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        kahan_sum(self.coeffs.iter().map(|(m, c)| self.manifold.basis_norm_sq(m) * c * c))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn require_zonal(&self) -> Result<()> {
        if let Some(m) = self.coeffs.iter().find(|(m, &c)| m[1] != 0 && c != 0.0).map(|(m, _)| m) {
            return Err(Error::UnsupportedMode(format!("({}, {}) is not zonal", m[0], m[1])));
        }
        Ok(())
    }

    /// Pointwise value on a torus.
    pub fn evaluate_torus(&self, point: &[f64]) -> Result<f64> {
        if !self.manifold.is_torus() {
            return Err(Error::InvalidArgument("evaluate_torus on a sphere field".into()));
        }
        if point.len() != self.manifold.dim() {
            return Err(Error::DimensionMismatch(point.len(), self.manifold.dim()));
        }
        Ok(kahan_sum(self.coeffs.iter().map(|(m, &c)| {
            c * m.iter().zip(point).map(|(&k, &r)| torus_basis_1d(k, r)).product::<f64>()
        })))
    }

    /// Value of a zonal field at colatitude `θ` with `cos θ = cos_theta`.
    pub fn evaluate_zonal(&self, cos_theta: f64) -> Result<f64> {
        if self.manifold != Manifold::Sphere2 {
            return Err(Error::InvalidArgument("evaluate_zonal on a torus field".into()));
        }
        self.require_zonal()?;
        let l_max = self.coeffs.keys().map(|m| m[0] as usize).max().unwrap_or(0);
        let p = GegenbauerEvaluator::for_sphere(2).values(l_max, cos_theta.clamp(-1.0, 1.0));
        Ok(kahan_sum(self.coeffs.iter().map(|(m, &c)| c * p[m[0] as usize])))
    }

    /// Values on a uniform torus grid with `resolution` points per axis, or on
    /// a uniform colatitude grid `θ_i = iπ/(resolution−1)` for zonal sphere
    /// fields.
    pub fn synthesize_uniform(&self, resolution: usize) -> Result<Vec<f64>> {
        if resolution < 2 {
            return Err(Error::InvalidArgument("synthesis needs at least 2 points".into()));
        }
        match self.manifold {
            Manifold::Sphere2 => {
                self.require_zonal()?;
                let cosines: Vec<f64> = (0..resolution)
                    .map(|i| (PI * i as f64 / (resolution - 1) as f64).cos())
                    .collect();
                Ok(self.zonal_values(&cosines))
            }
            _ => {
                let axis: Vec<f64> = (0..resolution).map(|i| i as f64 / resolution as f64).collect();
                Ok(self.torus_values(&axis))
            }
        }
    }

    fn zonal_values(&self, cosines: &[f64]) -> Vec<f64> {
        let l_max = self.coeffs.keys().map(|m| m[0] as usize).max().unwrap_or(0);
        let geg = GegenbauerEvaluator::for_sphere(2);
        cosines
            .par_iter()
            .map(|&x| {
                let p = geg.values(l_max, x);
                kahan_sum(self.coeffs.iter().map(|(m, &c)| c * p[m[0] as usize]))
            })
            .collect()
    }

    /// Values on the tensor grid `axis^dim`, row-major with the first
    /// coordinate slowest.
    fn torus_values(&self, axis: &[f64]) -> Vec<f64> {
        let b = self
            .coeffs
            .keys()
            .flat_map(|m| m.iter().map(|k| k.unsigned_abs() as usize))
            .max()
            .unwrap_or(0);
        // table[k + b][i] = basis_1d(k, axis[i])
        let table: Vec<Vec<f64>> = (-(b as i64)..=b as i64)
            .map(|k| axis.iter().map(|&r| torus_basis_1d(k, r)).collect())
            .collect();
        let col = |k: i64| &table[(k + b as i64) as usize];
        let r = axis.len();
        match self.manifold.dim() {
            1 => (0..r)
                .into_par_iter()
                .map(|i| kahan_sum(self.coeffs.iter().map(|(m, &c)| c * col(m[0])[i])))
                .collect(),
            _ => (0..r * r)
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx / r, idx % r);
                    kahan_sum(self.coeffs.iter().map(|(m, &c)| c * col(m[0])[i] * col(m[1])[j]))
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(self.manifold.csv_header()).map_err(io)?;
        for (m, c) in &self.coeffs {
            let mut rec: Vec<String> = m.iter().map(i64::to_string).collect();
            rec.push(format!("{c:.16e}"));
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses CSV with one of the headers `m1,coefficient`,
    /// `m1,m2,coefficient` or `l,k,coefficient`. Lines starting with `#` are
    /// skipped. The bandlimit is the largest index present.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let manifold = [Manifold::Torus1, Manifold::Torus2, Manifold::Sphere2]
            .into_iter()
            .find(|m| m.csv_header() == header.iter().map(String::as_str).collect::<Vec<_>>().as_slice())
            .ok_or_else(|| Error::Parse(format!("unrecognised field header {header:?}")))?;
        let width = manifold.mode_len();
        let mut entries = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != width + 1 {
                return Err(Error::Parse(format!("record {}: expected {} fields", line + 1, width + 1)));
            }
            let mode = rec
                .iter()
                .take(width)
                .map(|s| s.parse::<i64>().map_err(|e| Error::Parse(format!("record {}: {e}", line + 1))))
                .collect::<Result<Mode>>()?;
            let value: f64 = rec[width]
                .parse()
                .map_err(|e| Error::Parse(format!("record {}: {e}", line + 1)))?;
            entries.push((mode, value));
        }
        let bandlimit = entries
            .iter()
            .map(|(m, _)| match manifold {
                Manifold::Sphere2 => m[0].max(0) as usize,
                _ => m.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0),
            })
            .max()
            .unwrap_or(0);
        Self::from_modes(manifold, bandlimit, entries)
    }
}

/// `1`, `cos(2πkr)` or `sin(2π|k|r)`.
pub fn torus_basis_1d(k: i64, r: f64) -> f64 {
    match k.cmp(&0) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Greater => (2.0 * PI * k as f64 * r).cos(),
        std::cmp::Ordering::Less => (2.0 * PI * (-k) as f64 * r).sin(),
    }
}

/// Samples with quadrature weights: uniform on tori, Gauss–Legendre in
/// `cos θ` times uniform in `φ` on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    manifold: Manifold,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl GridField {
    pub fn new(manifold: Manifold, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::DimensionMismatch(values.len(), weights.len()));
        }
        let total = kahan_sum(weights.iter().copied());
        if (total - manifold.volume()).abs() > 1e-12 * manifold.volume() {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected volume {}",
                manifold.volume()
            )));
        }
        Ok(Self { manifold, values, weights })
    }

    /// Samples `F` on a grid with `resolution` points per torus axis, or
    /// `resolution` Gauss–Legendre colatitudes by `2·resolution` longitudes.
    pub fn synthesize(field: &SpectralField, resolution: usize) -> Result<Self> {
        if resolution < 1 {
            return Err(Error::InvalidArgument("resolution must be ≥ 1".into()));
        }
        match field.manifold {
            Manifold::Sphere2 => {
                field.require_zonal()?;
                let (x, w) = gauss_legendre(resolution);
                let n_phi = 2 * resolution;
                let ring = field.zonal_values(&x);
                let dphi = 2.0 * PI / n_phi as f64;
                let values = ring.iter().flat_map(|&v| std::iter::repeat_n(v, n_phi)).collect();
                let weights = w.iter().flat_map(|&w| std::iter::repeat_n(w * dphi, n_phi)).collect();
                Self::new(Manifold::Sphere2, values, weights)
            }
            m => {
                let axis: Vec<f64> = (0..resolution).map(|i| i as f64 / resolution as f64).collect();
                let values = field.torus_values(&axis);
                let w = 1.0 / values.len() as f64;
                let weights = vec![w; values.len()];
                Self::new(m, values, weights)
            }
        }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integral(&self) -> f64 {
        kahan_sum(self.values.iter().zip(&self.weights).map(|(v, w)| v * w))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        kahan_sum(self.values.iter().zip(&self.weights).map(|(v, w)| v * v * w))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_torus2() -> SpectralField {
        SpectralField::from_modes(
            Manifold::Torus2,
            4,
            [
                (vec![0, 0], 0.5),
                (vec![1, 0], 1.0),
                (vec![-2, 3], -0.25),
                (vec![4, -4], 0.125),
            ],
        )
        .unwrap()
    }

    #[test]
    fn basis_norms_match_quadrature() {
        for m in [vec![0, 0], vec![1, 0], vec![-2, 3], vec![4, -4]] {
            let f = SpectralField::from_modes(Manifold::Torus2, 4, [(m.clone(), 1.0)]).unwrap();
            let g = GridField::synthesize(&f, 16).unwrap();
            assert!((g.l2_norm_sq() - Manifold::Torus2.basis_norm_sq(&m)).abs() < 1e-14);
        }
        for l in 0..6 {
            let f = SpectralField::from_modes(Manifold::Sphere2, 6, [(vec![l, 0], 1.0)]).unwrap();
            let g = GridField::synthesize(&f, 12).unwrap();
            assert!((g.l2_norm_sq() - 4.0 * PI / (2 * l + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_weights_sum_to_volume() {
        let g = GridField::synthesize(&sample_torus2(), 9).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let s = SpectralField::constant(Manifold::Sphere2, 1.0);
        let g = GridField::synthesize(&s, 7).unwrap();
        assert!((g.integral() - 4.0 * PI).abs() < 1e-12);
        assert!(GridField::new(Manifold::Torus1, vec![1.0], vec![0.5]).is_err());
    }

    #[test]
    fn parseval_and_pointwise_agree() {
        let f = sample_torus2();
        let g = GridField::synthesize(&f, 20).unwrap();
        assert!((g.l2_norm_sq() - f.norm_sq()).abs() < 1e-13);
        assert!((g.integral() - f.mean()).abs() < 1e-14);
        let v = f.evaluate_torus(&[0.1, 0.35]).unwrap();
        let direct = 0.5 + (0.2 * PI).cos() - 0.25 * (4.0 * PI * 0.1).sin() * (6.0 * PI * 0.35).cos()
            + 0.125 * (8.0 * PI * 0.1).cos() * (8.0 * PI * 0.35).sin();
        assert!((v - direct).abs() < 1e-14);
        assert_eq!(g.values()[0], f.evaluate_torus(&[0.0, 0.0]).unwrap());
    }

    #[test]
    fn mode_validation() {
        let mut f = SpectralField::new(Manifold::Torus2, 3);
        assert!(f.insert(vec![4, 0], 1.0).is_err());
        assert!(matches!(f.insert(vec![1], 1.0), Err(Error::DimensionMismatch(1, 2))));
        let mut s = SpectralField::new(Manifold::Sphere2, 3);
        assert!(s.insert(vec![2, 3], 1.0).is_err());
        s.insert(vec![2, 1], 1.0).unwrap();
        assert!(matches!(s.evaluate_zonal(0.3), Err(Error::UnsupportedMode(_))));
        assert!(f.insert(vec![1, 1], f64::NAN).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = sample_torus2();
        let text = f.to_csv().unwrap();
        assert!(text.starts_with("m1,m2,coefficient\n"));
        let back = SpectralField::from_csv(&format!("# provenance\n{text}")).unwrap();
        assert_eq!(back, f);
        let s = SpectralField::from_modes(Manifold::Sphere2, 5, [(vec![5, 0], 2.5), (vec![1, -1], 0.1)]).unwrap();
        assert_eq!(SpectralField::from_csv(&s.to_csv().unwrap()).unwrap(), s);
        assert!(SpectralField::from_csv("a,b\n1,2\n").is_err());
        assert!(SpectralField::from_csv("m1,coefficient\nx,2\n").is_err());
    }

    #[test]
    fn manifold_names() {
        for m in [Manifold::Torus1, Manifold::Torus2, Manifold::Sphere2] {
            assert_eq!(m.to_string().parse::<Manifold>().unwrap(), m);
        }
        assert!("klein".parse::<Manifold>().is_err());
    }
}
