//! Deterministic crack-initiation life from the Coffin-Manson-Basquin (CMB)
//! strain-life curve, optionally with a stress-gradient notch support factor.
//!
//! ```text
//! ε_a / n_χ = (σ'f / E) (2N)^b + ε'f (2N)^c,      n_χ = 1 + A χ^k
//! ```
//!
//! The inverse is solved in `u = ln(2N)`, where `ln ε(u)` is a convex,
//! strictly decreasing function; safeguarded Newton converges in a handful
//! of steps from the left end of the bracket.

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::field_ops::PlasticityRule;

/// Default life cap (cycles).
pub const DEFAULT_N_CAP: f64 = 1e12;

/// Lower end of the search bracket in `2N`.
const TWO_N_MIN: f64 = 1.0 / 1_048_576.0;

/// CMB curve parameters at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmbParams {
    pub sigma_f: f64,
    pub b: f64,
    pub eps_f: f64,
    pub c: f64,
    pub e_modulus: f64,
}

impl CmbParams {
    fn elastic_coefficient(&self) -> f64 {
        self.sigma_f / self.e_modulus
    }
}

/// Stress-gradient support law parameters (A in mm^k, k dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchSupport {
    pub a: f64,
    pub k: f64,
}

/// Strain amplitude on the CMB curve at `n` cycles.
pub fn cmb_strain(n: f64, p: &CmbParams) -> f64 {
    let two_n = 2.0 * n;
    p.elastic_coefficient() * two_n.powf(p.b) + p.eps_f * two_n.powf(p.c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// Strain below the curve at the life cap; the cap is returned.
    Capped,
    /// Strain above the curve at the lower bracket end; that end is returned.
    BelowRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmbSolution {
    pub cycles: f64,
    pub status: SolveStatus,
}

impl CmbSolution {
    pub fn is_capped(&self) -> bool {
        self.status == SolveStatus::Capped
    }
}

/// Deterministic life for a strain amplitude: the root of `cmb_strain(N) = eps_a`
/// within `2N ∈ [2^-20, 2 n_cap]`, relative accuracy better than 1e-12.
pub fn solve_cmb(eps_a: f64, p: &CmbParams, n_cap: f64) -> Result<CmbSolution> {
    if !(eps_a > 0.0) || !eps_a.is_finite() {
        return Err(Error::domain(format!("strain amplitude must be positive, got {eps_a}")));
    }
    let a1 = p.elastic_coefficient();
    let a2 = p.eps_f;
    let (b, c) = (p.b, p.c);
    let strain = |u: f64| a1 * (b * u).exp() + a2 * (c * u).exp();

    let mut lo = TWO_N_MIN.ln();
    let mut hi = (2.0 * n_cap).ln();
    if eps_a > strain(lo) {
        return Ok(CmbSolution {
            cycles: 0.5 * TWO_N_MIN,
            status: SolveStatus::BelowRange,
        });
    }
    if eps_a < strain(hi) {
        return Ok(CmbSolution {
            cycles: n_cap,
            status: SolveStatus::Capped,
        });
    }

    // Each branch alone is below the sum, so its root lies right of the true one.
    let ln_eps = eps_a.ln();
    let mut u = hi;
    if a1 > 0.0 {
        u = u.min((ln_eps - a1.ln()) / b);
    }
    if a2 > 0.0 {
        u = u.min((ln_eps - a2.ln()) / c);
    }
    u = u.clamp(lo, hi);

    for _ in 0..200 {
        let t1 = a1 * (b * u).exp();
        let t2 = a2 * (c * u).exp();
        let s = t1 + t2;
        let g = s.ln() - ln_eps;
        if g > 0.0 {
            lo = u;
        } else if g < 0.0 {
            hi = u;
        } else {
            break;
        }
        let slope = (b * t1 + c * t2) / s;
        let mut next = u - g / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - u).abs();
        u = next;
        if step <= 1e-14 * u.abs().max(1.0) || hi - lo <= 1e-14 {
            break;
        }
    }
    Ok(CmbSolution {
        cycles: 0.5 * u.exp(),
        status: SolveStatus::Converged,
    })
}

/// Notch support factor `n_χ = 1 + A χ^k` (≥ 1, non-decreasing in χ).
///
/// This plays the role of a support number (observed over expected fatigue
/// strength) expressed in strain: the effective amplitude is `ε_a / n_χ`.
pub fn notch_factor(chi: f64, support: &NotchSupport) -> f64 {
    if chi <= 0.0 {
        return 1.0;
    }
    1.0 + support.a * chi.powf(support.k)
}

/// Life with notch support: `solve_cmb(eps_a / n_χ)`.
pub fn solve_cmb_notched(
    eps_a: f64,
    chi: f64,
    p: &CmbParams,
    support: &NotchSupport,
    n_cap: f64,
) -> Result<CmbSolution> {
    if !(chi >= 0.0) {
        return Err(Error::domain(format!("chi must be non-negative, got {chi}")));
    }
    solve_cmb(eps_a / notch_factor(chi, support), p, n_cap)
}

/// Material parameters at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalParams {
    pub cmb: CmbParams,
    pub plasticity: PlasticityRule,
    pub e_modulus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Row {
    sigma_f: f64,
    b: f64,
    eps_f: f64,
    c: f64,
    e_modulus: f64,
    k_prime: f64,
    n_prime: f64,
}

impl Row {
    fn lerp(&self, other: &Row, w: f64) -> Row {
        let f = |a: f64, b: f64| a + (b - a) * w;
        Row {
            sigma_f: f(self.sigma_f, other.sigma_f),
            b: f(self.b, other.b),
            eps_f: f(self.eps_f, other.eps_f),
            c: f(self.c, other.c),
            e_modulus: f(self.e_modulus, other.e_modulus),
            k_prime: f(self.k_prime, other.k_prime),
            n_prime: f(self.n_prime, other.n_prime),
        }
    }
}

/// Full material description: CMB parameters (optionally tabulated over
/// temperature, linear interpolation, clamped outside the table), notch
/// support parameters and the Weibull shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    temperatures: Vec<f64>,
    rows: Vec<Row>,
    neuber: bool,
    pub notch: NotchSupport,
    pub m: f64,
    warnings: Vec<String>,
}

impl Material {
    /// Temperature-independent material.
    pub fn constant(cmb: CmbParams, notch: NotchSupport, m: f64, plasticity: PlasticityRule) -> Result<Self> {
        let (neuber, k_prime, n_prime) = match plasticity {
            PlasticityRule::Elastic => (false, 0.0, 0.0),
            PlasticityRule::Neuber { k_prime, n_prime } => (true, k_prime, n_prime),
        };
        let row = Row {
            sigma_f: cmb.sigma_f,
            b: cmb.b,
            eps_f: cmb.eps_f,
            c: cmb.c,
            e_modulus: cmb.e_modulus,
            k_prime,
            n_prime,
        };
        Material::build(vec![0.0], vec![row], neuber, notch, m)
    }

    fn build(temperatures: Vec<f64>, rows: Vec<Row>, neuber: bool, notch: NotchSupport, m: f64) -> Result<Self> {
        if temperatures.is_empty() || temperatures.len() != rows.len() {
            return Err(Error::invalid("material table needs one row per temperature"));
        }
        if temperatures.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("material temperatures must be strictly increasing"));
        }
        let mut warnings = Vec::new();
        for (t, r) in temperatures.iter().zip(&rows) {
            let at = format!("at T = {t}");
            if !(r.e_modulus > 0.0) {
                return Err(Error::invalid(format!("E must be positive {at}")));
            }
            if !(r.sigma_f >= 0.0) || !(r.eps_f >= 0.0) || r.sigma_f + r.eps_f == 0.0 {
                return Err(Error::invalid(format!(
                    "sigma_f and eps_f must be non-negative and not both zero {at}"
                )));
            }
            if !(r.b < 0.0) || !(r.c < 0.0) {
                return Err(Error::invalid(format!("exponents b and c must be negative {at}")));
            }
            if r.c > r.b {
                warnings.push(format!(
                    "ductility exponent c = {} is shallower than strength exponent b = {} {at}",
                    r.c, r.b
                ));
            }
            if neuber && (!(r.k_prime > 0.0) || !(r.n_prime > 0.0 && r.n_prime <= 1.0)) {
                return Err(Error::invalid(format!(
                    "Neuber plasticity needs K_prime > 0 and n_prime in (0, 1] {at}"
                )));
            }
        }
        if !(notch.a >= 0.0) || !notch.a.is_finite() {
            return Err(Error::invalid("notch support coefficient A must be >= 0"));
        }
        if !(notch.k > 0.0 && notch.k <= 2.0) {
            return Err(Error::invalid("notch support exponent k must lie in (0, 2]"));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::invalid("Weibull shape m must be positive"));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Material {
            temperatures,
            rows,
            neuber,
            notch,
            m,
            warnings,
        })
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn temperature_range(&self) -> (f64, f64) {
        (self.temperatures[0], *self.temperatures.last().unwrap())
    }

    /// True when `t` lies outside the tabulated range (and is clamped).
    pub fn is_extrapolated(&self, t: f64) -> bool {
        self.temperatures.len() > 1 && {
            let (lo, hi) = self.temperature_range();
            t < lo || t > hi
        }
    }

    /// Parameters at temperature `t`; exact table rows are returned bitwise.
    pub fn at(&self, t: f64) -> LocalParams {
        let temps = &self.temperatures;
        let row = if temps.len() == 1 || t <= temps[0] {
            self.rows[0]
        } else if t >= temps[temps.len() - 1] {
            self.rows[temps.len() - 1]
        } else {
            let i = temps.partition_point(|&x| x <= t) - 1;
            if temps[i] == t {
                self.rows[i]
            } else {
                let w = (t - temps[i]) / (temps[i + 1] - temps[i]);
                self.rows[i].lerp(&self.rows[i + 1], w)
            }
        };
        LocalParams {
            cmb: CmbParams {
                sigma_f: row.sigma_f,
                b: row.b,
                eps_f: row.eps_f,
                c: row.c,
                e_modulus: row.e_modulus,
            },
            plasticity: if self.neuber {
                PlasticityRule::Neuber {
                    k_prime: row.k_prime,
                    n_prime: row.n_prime,
                }
            } else {
                PlasticityRule::Elastic
            },
            e_modulus: row.e_modulus,
        }
    }

    /// Same material with the CMB parameters at one temperature replaced.
    pub fn with_constant_cmb(&self, cmb: CmbParams, notch: NotchSupport, m: f64) -> Result<Self> {
        let plasticity = self.at(self.temperatures[0]).plasticity;
        Material::constant(cmb, notch, m, plasticity)
    }

    pub fn cmb_strain(&self, n: f64, t: f64) -> f64 {
        cmb_strain(n, &self.at(t).cmb)
    }

    pub fn solve_cmb(&self, eps_a: f64, t: f64, n_cap: f64) -> Result<CmbSolution> {
        solve_cmb(eps_a, &self.at(t).cmb, n_cap)
    }

    pub fn solve_cmb_notched(&self, eps_a: f64, chi: f64, t: f64, n_cap: f64) -> Result<CmbSolution> {
        solve_cmb_notched(eps_a, chi, &self.at(t).cmb, &self.notch, n_cap)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_to_string(path)?;
        Material::from_json_str(&path.display().to_string(), &text)
    }

    pub fn from_json_str(file: &str, text: &str) -> Result<Self> {
        let raw: MaterialFile = crate::error::from_json_str(file, text)?;
        raw.into_material()
    }

    /// Serializable form (flat when the table has a single row).
    pub fn to_file(&self) -> MaterialFile {
        let col = |f: fn(&Row) -> f64| {
            if self.rows.len() == 1 {
                ScalarOrTable::Scalar(f(&self.rows[0]))
            } else {
                ScalarOrTable::Table(self.rows.iter().map(f).collect())
            }
        };
        MaterialFile {
            temperatures: (self.rows.len() > 1).then(|| self.temperatures.clone()),
            e_modulus: col(|r| r.e_modulus),
            sigma_f: col(|r| r.sigma_f),
            b: col(|r| r.b),
            eps_f: col(|r| r.eps_f),
            c: col(|r| r.c),
            a: self.notch.a,
            k: self.notch.k,
            m: self.m,
            plasticity: self.neuber.then(|| PlasticityFile {
                rule: PlasticityKind::Neuber,
                k_prime: Some(col(|r| r.k_prime)),
                n_prime: Some(col(|r| r.n_prime)),
            }),
            provenance: None,
        }
    }
}

/// A value given either once or per table temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrTable {
    Scalar(f64),
    Table(Vec<f64>),
}

impl ScalarOrTable {
    fn expand(&self, name: &str, n: usize) -> Result<Vec<f64>> {
        match self {
            ScalarOrTable::Scalar(v) => Ok(vec![*v; n]),
            ScalarOrTable::Table(v) if v.len() == n => Ok(v.clone()),
            ScalarOrTable::Table(v) => Err(Error::invalid(format!(
                "material field `{name}` has {} entries, expected {n}",
                v.len()
            ))),
        }
    }

    fn is_table(&self) -> bool {
        matches!(self, ScalarOrTable::Table(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlasticityKind {
    Elastic,
    Neuber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasticityFile {
    pub rule: PlasticityKind,
    #[serde(rename = "K_prime", default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<ScalarOrTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_prime: Option<ScalarOrTable>,
}

/// JSON material file. `A` is in mm^k (χ in 1/mm), stresses in MPa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperatures: Option<Vec<f64>>,
    #[serde(rename = "E")]
    pub e_modulus: ScalarOrTable,
    pub sigma_f: ScalarOrTable,
    pub b: ScalarOrTable,
    pub eps_f: ScalarOrTable,
    pub c: ScalarOrTable,
    #[serde(rename = "A")]
    pub a: f64,
    pub k: f64,
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plasticity: Option<PlasticityFile>,
    /// Free-form record of how the file was produced; ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl MaterialFile {
    pub fn into_material(self) -> Result<Material> {
        let mut columns = vec![&self.e_modulus, &self.sigma_f, &self.b, &self.eps_f, &self.c];
        if let Some(p) = &self.plasticity {
            columns.extend(p.k_prime.iter());
            columns.extend(p.n_prime.iter());
        }
        let any_table = columns.iter().any(|c| c.is_table());
        let temperatures = match (&self.temperatures, any_table) {
            (Some(t), _) => t.clone(),
            (None, false) => vec![0.0],
            (None, true) => {
                return Err(Error::invalid(
                    "tabulated material parameters need a `temperatures` array",
                ))
            }
        };
        let n = temperatures.len();
        let e = self.e_modulus.expand("E", n)?;
        let sf = self.sigma_f.expand("sigma_f", n)?;
        let b = self.b.expand("b", n)?;
        let ef = self.eps_f.expand("eps_f", n)?;
        let c = self.c.expand("c", n)?;
        let (neuber, kp, np) = match &self.plasticity {
            None
            | Some(PlasticityFile {
                rule: PlasticityKind::Elastic,
                ..
            }) => (false, vec![0.0; n], vec![0.0; n]),
            Some(p) => {
                let kp = p
                    .k_prime
                    .as_ref()
                    .ok_or_else(|| Error::invalid("Neuber plasticity needs `K_prime`"))?
                    .expand("K_prime", n)?;
                let np = p
                    .n_prime
                    .as_ref()
                    .ok_or_else(|| Error::invalid("Neuber plasticity needs `n_prime`"))?
                    .expand("n_prime", n)?;
                (true, kp, np)
            }
        };
        let rows = (0..n)
            .map(|i| Row {
                sigma_f: sf[i],
                b: b[i],
                eps_f: ef[i],
                c: c[i],
                e_modulus: e[i],
                k_prime: kp[i],
                n_prime: np[i],
            })
            .collect();
        Material::build(
            temperatures,
            rows,
            neuber,
            NotchSupport { a: self.a, k: self.k },
            self.m,
        )
    }
}
