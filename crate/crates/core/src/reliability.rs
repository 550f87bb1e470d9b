//! Component-level Weibull life distribution from per-point deterministic lives.
//!
//! With hazard density `d = N_det^{-m}` on the surface, the cumulative hazard is
//! `H(n) = n^m ∫ d dA`, so the life is Weibull with shape `m` and scale
//! `η = (∫ N_det^{-m} dA)^{-1/m}`. Hazards of disjoint surface subsets add.
//!
//! The integral is evaluated as `N_ref^{-m} Σ w_q (N_ref/N_q)^m` with
//! `N_ref = min N_q`, which keeps the sum representable for large `m`.

use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_ops::SurfaceFields;
use crate::mesh_io::SurfaceQuadrature;
use crate::strain_life::{CmbSolution, Material, SolveStatus};
use crate::sum::CompensatedSum;

/// Deterministic life at one surface integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct LifePoint {
    pub position: Vector3<f64>,
    pub elem: usize,
    pub face: usize,
    pub q: usize,
    pub eps_a: f64,
    pub temperature: f64,
    pub chi: f64,
    pub n_det: f64,
    pub status: SolveStatus,
    /// Surface weight (mm²).
    pub weight: f64,
}

impl LifePoint {
    pub fn hazard_density(&self, m: f64) -> f64 {
        self.n_det.powf(-m)
    }

    pub fn is_capped(&self) -> bool {
        self.status == SolveStatus::Capped
    }
}

/// Per-point lives over a surface, in (face, q) order.
#[derive(Debug, Clone, PartialEq)]
pub struct LifeField {
    pub points: Vec<LifePoint>,
    pub notch_support: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifeOptions {
    pub notch_support: bool,
    pub n_cap: f64,
}

impl Default for LifeOptions {
    fn default() -> Self {
        LifeOptions {
            notch_support: true,
            n_cap: crate::strain_life::DEFAULT_N_CAP,
        }
    }
}

impl LifeField {
    /// Solves the (optionally notch-supported) CMB equation at every point,
    /// with parameters interpolated at the local temperature.
    pub fn compute(
        quad: &SurfaceQuadrature,
        fields: &SurfaceFields,
        material: &Material,
        opts: &LifeOptions,
    ) -> Result<Self> {
        if quad.len() != fields.points.len() {
            return Err(Error::invalid("quadrature and field point counts differ"));
        }
        let mut points = Vec::with_capacity(quad.len());
        for (qp, st) in quad.points.iter().zip(&fields.points) {
            let chi = if opts.notch_support { st.chi } else { 0.0 };
            let sol = if st.eps_a > 0.0 {
                material.solve_cmb_notched(st.eps_a, chi, st.temperature, opts.n_cap)?
            } else {
                CmbSolution {
                    cycles: opts.n_cap,
                    status: SolveStatus::Capped,
                }
            };
            points.push(LifePoint {
                position: qp.position,
                elem: qp.elem,
                face: qp.face,
                q: qp.q,
                eps_a: st.eps_a,
                temperature: st.temperature,
                chi: st.chi,
                n_det: sol.cycles,
                status: sol.status,
                weight: qp.weight,
            });
        }
        Ok(LifeField {
            points,
            notch_support: opts.notch_support,
        })
    }

    pub fn capped_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_capped()).count()
    }

    /// The point with the largest strain amplitude (first one on ties).
    pub fn max_strain_point(&self) -> Option<&LifePoint> {
        self.points.iter().fold(None, |best: Option<&LifePoint>, p| match best {
            Some(b) if b.eps_a >= p.eps_a => Some(b),
            _ => Some(p),
        })
    }

    /// Indices of points matching a predicate.
    pub fn select(&self, pred: impl Fn(&LifePoint) -> bool) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| pred(&self.points[i])).collect()
    }
}

/// Failure modes of [`weibull_scale`]; indices refer to the input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleError {
    Empty,
    NonPositiveLife(usize),
    BadTerm(usize),
    ZeroHazard,
}

/// `η = (Σ w N^{-m})^{-1/m}` for `(N_det, weight)` pairs, accumulated in input
/// order as `N_ref (Σ w (N_ref/N)^m)^{-1/m}` with `N_ref = min N`.
pub fn weibull_scale<I>(lives: I, m: f64) -> std::result::Result<f64, ScaleError>
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let mut n_ref = f64::INFINITY;
    for (i, (n, _)) in lives.clone().enumerate() {
        if !(n > 0.0) {
            return Err(ScaleError::NonPositiveLife(i));
        }
        n_ref = n_ref.min(n);
    }
    if n_ref == f64::INFINITY {
        return Err(ScaleError::Empty);
    }
    let mut acc = CompensatedSum::new();
    for (i, (n, w)) in lives.enumerate() {
        let term = w * (n_ref / n).powf(m);
        if !term.is_finite() || term < 0.0 {
            return Err(ScaleError::BadTerm(i));
        }
        acc.add(term);
    }
    let s = acc.total();
    if !(s > 0.0) {
        return Err(ScaleError::ZeroHazard);
    }
    Ok(n_ref * s.powf(-1.0 / m))
}

fn scale_error(err: ScaleError, point: impl Fn(usize) -> String) -> Error {
    match err {
        ScaleError::Empty => Error::domain("hazard integral over an empty set of points"),
        ScaleError::NonPositiveLife(i) => Error::domain(format!("non-positive life at {}", point(i))),
        ScaleError::BadTerm(i) => Error::numerical(format!("non-finite hazard term at {}", point(i))),
        ScaleError::ZeroHazard => Error::domain("hazard integral is zero (no positive surface weight)"),
    }
}

fn describe(p: &LifePoint) -> String {
    format!(
        "element {} face {} point {} (N_det = {}, weight = {})",
        p.elem, p.face, p.q, p.n_det, p.weight
    )
}

/// Hazard integral `∫ N_det^{-m} dA` (cycles^-m · mm²). May underflow for
/// large `m`; [`eta_surface`] does not.
pub fn hazard_integral(life: &LifeField, m: f64) -> Result<f64> {
    Ok(eta_surface(life, m)?.powf(-m))
}

/// Weibull scale `η = (Σ_q w_q N_q^{-m})^{-1/m}`.
pub fn eta_surface(life: &LifeField, m: f64) -> Result<f64> {
    let all: Vec<&LifePoint> = life.points.iter().collect();
    eta_of(&all, m)
}

fn eta_of(points: &[&LifePoint], m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::domain(format!("Weibull shape must be positive, got {m}")));
    }
    weibull_scale(points.iter().map(|p| (p.n_det, p.weight)), m).map_err(|e| scale_error(e, |i| describe(points[i])))
}

/// Component life distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullLife {
    pub m: f64,
    pub eta: f64,
    pub notch_support: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<String>,
}

impl WeibullLife {
    pub fn new(m: f64, eta: f64) -> Result<Self> {
        if !(m > 0.0) || !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain(format!(
                "invalid Weibull parameters m = {m}, eta = {eta}"
            )));
        }
        Ok(WeibullLife {
            m,
            eta,
            notch_support: false,
            subset: None,
        })
    }

    pub fn from_field(life: &LifeField, m: f64) -> Result<Self> {
        let mut w = WeibullLife::new(m, eta_surface(life, m)?)?;
        w.notch_support = life.notch_support;
        Ok(w)
    }

    /// `H(n) = (n/η)^m`.
    pub fn cumulative_hazard(&self, n: f64) -> f64 {
        if n <= 0.0 {
            return 0.0;
        }
        (n / self.eta).powf(self.m)
    }

    /// `h(n) = (m/η)(n/η)^{m-1}`.
    pub fn hazard_rate(&self, n: f64) -> f64 {
        (self.m / self.eta) * (n.max(0.0) / self.eta).powf(self.m - 1.0)
    }

    /// `F(n) = 1 - exp(-H(n))`.
    pub fn cdf(&self, n: f64) -> f64 {
        -(-self.cumulative_hazard(n)).exp_m1()
    }

    pub fn survival(&self, n: f64) -> f64 {
        (-self.cumulative_hazard(n)).exp()
    }

    pub fn pdf(&self, n: f64) -> f64 {
        self.hazard_rate(n) * self.survival(n)
    }

    /// `n_p = η (-ln(1-p))^{1/m}` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        Ok(self.eta * (-(-p).ln_1p()).powf(1.0 / self.m))
    }

    /// Probabilistic average life (50 % quantile).
    pub fn median(&self) -> f64 {
        self.eta * std::f64::consts::LN_2.powf(1.0 / self.m)
    }
}

/// Distribution from a subset of the surface points (e.g. one hot spot).
pub fn subset_distribution(life: &LifeField, selection: &[usize], m: f64) -> Result<WeibullLife> {
    if selection.is_empty() {
        return Err(Error::domain("empty point selection"));
    }
    if let Some(&i) = selection.iter().find(|&&i| i >= life.points.len()) {
        return Err(Error::domain(format!("selected point {i} does not exist")));
    }
    let mut sorted = selection.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let chosen: Vec<&LifePoint> = sorted.iter().map(|&i| &life.points[i]).collect();
    let eta = eta_of(&chosen, m)?;
    let mut w = WeibullLife::new(m, eta)?;
    w.notch_support = life.notch_support;
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeEffect {
    pub factor: f64,
    /// True when the component field used notch support.
    pub combined: bool,
}

/// Median component life over the deterministic life of a smooth specimen at
/// the same maximum strain amplitude.
pub fn size_effect_factor(component: &WeibullLife, specimen: &CmbSolution) -> Result<SizeEffect> {
    if specimen.status != SolveStatus::Converged || !(specimen.cycles > 0.0) {
        return Err(Error::domain(format!(
            "reference specimen life is not usable ({:?}, {} cycles)",
            specimen.status, specimen.cycles
        )));
    }
    Ok(SizeEffect {
        factor: component.median() / specimen.cycles,
        combined: component.notch_support,
    })
}

/// Smooth-specimen reference life at the component's maximum strain and the
/// temperature of that point (plain CMB, no notch support).
pub fn specimen_reference(life: &LifeField, material: &Material, n_cap: f64) -> Result<CmbSolution> {
    let p = life
        .max_strain_point()
        .ok_or_else(|| Error::domain("empty life field"))?;
    material.solve_cmb(p.eps_a, p.temperature, n_cap)
}

/// Summary written to the distribution report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub m: f64,
    pub eta: f64,
    pub median: f64,
    pub quantiles: Quantiles,
    pub size_effect_factor: Option<f64>,
    pub notch_support: bool,
    pub capped_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    #[serde(rename = "1")]
    pub p01: f64,
    #[serde(rename = "5")]
    pub p05: f64,
    #[serde(rename = "50")]
    pub p50: f64,
    #[serde(rename = "95")]
    pub p95: f64,
    #[serde(rename = "99")]
    pub p99: f64,
}

impl DistributionReport {
    pub fn new(dist: &WeibullLife, life: &LifeField, size_effect: Option<SizeEffect>) -> Result<Self> {
        Ok(DistributionReport {
            m: dist.m,
            eta: dist.eta,
            median: dist.median(),
            quantiles: Quantiles {
                p01: dist.quantile(0.01)?,
                p05: dist.quantile(0.05)?,
                p50: dist.quantile(0.5)?,
                p95: dist.quantile(0.95)?,
                p99: dist.quantile(0.99)?,
            },
            size_effect_factor: size_effect.map(|s| s.factor),
            notch_support: dist.notch_support,
            capped_points: life.capped_count(),
        })
    }
}

pub const HAZARD_CSV_HEADER: &str = "x,y,z,elem,face,q,eps_a,T,chi,N_det,capped,hazard_density,weight";

/// Writes the per-integration-point hazard export.
pub fn write_hazard_csv(out: &mut impl Write, life: &LifeField, m: f64) -> std::io::Result<()> {
    writeln!(out, "{HAZARD_CSV_HEADER}")?;
    for p in &life.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.position[0],
            p.position[1],
            p.position[2],
            p.elem,
            p.face,
            p.q,
            p.eps_a,
            p.temperature,
            p.chi,
            p.n_det,
            u8::from(p.is_capped()),
            p.hazard_density(m),
            p.weight
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: &[(f64, f64)]) -> LifeField {
        LifeField {
            points: values
                .iter()
                .enumerate()
                .map(|(i, &(n, w))| LifePoint {
                    position: Vector3::zeros(),
                    elem: 0,
                    face: i,
                    q: 0,
                    eps_a: 0.01,
                    temperature: 0.0,
                    chi: 0.0,
                    n_det: n,
                    status: SolveStatus::Converged,
                    weight: w,
                })
                .collect(),
            notch_support: false,
        }
    }

    #[test]
    fn uniform_field_closed_form() {
        let f = field(&[(1e4, 1.0); 4]);
        assert!((eta_surface(&f, 2.0).unwrap() / 5000.0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_patch() {
        let f = field(&[(1e3, 1.0)]);
        assert_eq!(eta_surface(&f, 3.7).unwrap(), 1e3);
    }

    #[test]
    fn empty_and_bad_inputs() {
        let f = field(&[]);
        assert!(eta_surface(&f, 2.0).is_err());
        let f = field(&[(1e3, f64::INFINITY)]);
        let err = eta_surface(&f, 2.0).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
        assert!(subset_distribution(&field(&[(1e3, 1.0)]), &[], 2.0).is_err());
    }

    #[test]
    fn large_shape_does_not_underflow() {
        let f = field(&[(1e6, 1.0), (1.01e6, 3.0)]);
        let eta = eta_surface(&f, 80.0).unwrap();
        assert!(eta.is_finite() && eta < 1e6 && eta > 9e5);
    }

    #[test]
    fn cdf_examples() {
        let w = WeibullLife::new(2.0, 5000.0).unwrap();
        assert!((w.cdf(5000.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(w.cdf(0.0), 0.0);
        assert_eq!(w.cumulative_hazard(0.0), 0.0);
        assert!((w.cumulative_hazard(2500.0) - 0.25).abs() < 1e-15);
        assert!((w.cdf(2500.0) - 0.221_199_216_928_595_1).abs() < 1e-15);
        let n = 3100.0;
        assert!((w.cdf(n) - (1.0 - (-w.cumulative_hazard(n)).exp())).abs() < 1e-15);
        assert!((w.pdf(n) / (1.0 - w.cdf(n)) - w.hazard_rate(n)).abs() < 1e-12 * w.hazard_rate(n));
    }

    #[test]
    fn quantile_examples() {
        let w = WeibullLife::new(2.3, 1234.0).unwrap();
        let q = w.quantile(1.0 - (-1.0f64).exp()).unwrap();
        assert!((q / 1234.0 - 1.0).abs() < 1e-15);
        let e = WeibullLife::new(1.0, 100.0).unwrap();
        assert!((e.median() - 100.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(w.quantile(0.0).is_err());
        assert!(w.quantile(1.0).is_err());
        for i in 1..100 {
            let p = i as f64 / 100.0;
            assert!((w.cdf(w.quantile(p).unwrap()) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn size_effect_of_halved_area() {
        let full = WeibullLife::new(2.0, eta_surface(&field(&[(1e4, 2.0)]), 2.0).unwrap()).unwrap();
        let half = WeibullLife::new(2.0, eta_surface(&field(&[(1e4, 1.0)]), 2.0).unwrap()).unwrap();
        let spec = CmbSolution {
            cycles: 1e4,
            status: SolveStatus::Converged,
        };
        let a = size_effect_factor(&full, &spec).unwrap();
        let b = size_effect_factor(&half, &spec).unwrap();
        assert!((b.factor / a.factor - 2f64.sqrt()).abs() < 1e-14);
        let capped = CmbSolution {
            cycles: 1e12,
            status: SolveStatus::Capped,
        };
        assert!(size_effect_factor(&full, &capped).is_err());
    }

    #[test]
    fn size_effect_unity_on_calibrated_reference_area() {
        // Area chosen so that eta * ln2^(1/m) equals N_det.
        let (n, m) = (7.5e3, 3.0);
        let area = std::f64::consts::LN_2;
        let w = WeibullLife::from_field(&field(&[(n, area)]), m).unwrap();
        let spec = CmbSolution {
            cycles: n,
            status: SolveStatus::Converged,
        };
        assert!((size_effect_factor(&w, &spec).unwrap().factor - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hazard_csv_columns() {
        let mut out = Vec::new();
        write_hazard_csv(&mut out, &field(&[(100.0, 0.5)]), 2.0).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], HAZARD_CSV_HEADER);
        assert_eq!(lines[1], "0,0,0,0,0,0,0.01,0,0,100,0,0.0001,0.5");
    }
}
