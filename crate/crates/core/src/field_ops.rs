//! Derived scalar fields at surface integration points.
//!
//! The normalized gradient of a nodal scalar `f` at a surface point with inward
//! normal `n` is `-(∇f · n) / f`: positive where `f` decays into the depth,
//! clamped at zero otherwise. It is used for the von Mises stress (χ, enters
//! the notch support factor) and for temperature (χ_T, diagnostic only).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh_io::{MeshModel, StressTensor, SurfaceQuadrature};
use crate::strain_life::Material;

/// Equivalent (von Mises) stress of a symmetric tensor xx, yy, zz, xy, yz, zx.
pub fn von_mises(s: &StressTensor) -> f64 {
    let [xx, yy, zz, xy, yz, zx] = *s;
    let normal = (xx - yy).powi(2) + (yy - zz).powi(2) + (zz - xx).powi(2);
    let shear = xy * xy + yz * yz + zx * zx;
    (0.5 * normal + 3.0 * shear).max(0.0).sqrt()
}

/// Von Mises stress at every node.
pub fn nodal_von_mises(mesh: &MeshModel) -> Vec<f64> {
    mesh.nodal_stress().iter().map(von_mises).collect()
}

/// How the gradient vector is reduced to a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiMode {
    /// Decay rate along the inward normal, negative values clamped to zero.
    #[default]
    Normal,
    /// Full gradient magnitude.
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientOptions {
    /// Points where the field is at or below this value get zero.
    pub floor: f64,
    pub mode: ChiMode,
}

impl Default for GradientOptions {
    fn default() -> Self {
        GradientOptions {
            floor: 1e-6,
            mode: ChiMode::Normal,
        }
    }
}

/// Per-point normalized gradient plus the number of points hit by the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGradient {
    pub values: Vec<f64>,
    pub floored: usize,
}

/// Normalized gradient of an arbitrary nodal scalar at every quadrature point.
pub fn normalized_gradient(
    mesh: &MeshModel,
    quad: &SurfaceQuadrature,
    nodal: &[f64],
    opts: &GradientOptions,
) -> Result<NormalizedGradient> {
    let mut values = Vec::with_capacity(quad.len());
    let mut floored = 0;
    for p in &quad.points {
        let f = mesh.interpolate_scalar(p.elem, &p.local, nodal)?;
        if !(f > opts.floor) {
            floored += 1;
            values.push(0.0);
            continue;
        }
        let g = mesh.gradient(p.elem, &p.local, nodal)?;
        values.push(reduce(&g, &p.inward_normal, f, opts.mode));
    }
    Ok(NormalizedGradient { values, floored })
}

fn reduce(g: &Vector3<f64>, inward: &Vector3<f64>, f: f64, mode: ChiMode) -> f64 {
    match mode {
        ChiMode::Normal => (-g.dot(inward) / f).max(0.0),
        ChiMode::Magnitude => g.norm() / f,
    }
}

/// χ: normalized von Mises stress gradient (1/mm) from nodal von Mises values.
pub fn chi_field(
    mesh: &MeshModel,
    quad: &SurfaceQuadrature,
    sigma_e_nodal: &[f64],
    opts: &GradientOptions,
) -> Result<NormalizedGradient> {
    normalized_gradient(mesh, quad, sigma_e_nodal, opts)
}

/// χ_T: normalized temperature gradient (1/mm). Diagnostic export only.
pub fn chi_t_field(mesh: &MeshModel, quad: &SurfaceQuadrature, opts: &GradientOptions) -> Result<NormalizedGradient> {
    normalized_gradient(mesh, quad, mesh.nodal_temperature(), opts)
}

/// Conversion from elastic equivalent stress to elastic-plastic strain amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PlasticityRule {
    #[default]
    Elastic,
    /// Neuber's rule on a Ramberg-Osgood curve `ε = σ/E + (σ/K')^{1/n'}`.
    Neuber { k_prime: f64, n_prime: f64 },
}

/// Strain amplitude from the elastic von Mises stress amplitude.
pub fn strain_amplitude(sigma_e: f64, e_modulus: f64, rule: PlasticityRule) -> Result<f64> {
    if !(sigma_e >= 0.0) || !(e_modulus > 0.0) {
        return Err(Error::domain(format!(
            "strain amplitude needs sigma_e >= 0 and E > 0 (got {sigma_e}, {e_modulus})"
        )));
    }
    match rule {
        PlasticityRule::Elastic => Ok(sigma_e / e_modulus),
        PlasticityRule::Neuber { k_prime, n_prime } => {
            if !(k_prime > 0.0) || !(n_prime > 0.0 && n_prime <= 1.0) {
                return Err(Error::domain(format!(
                    "Ramberg-Osgood parameters need K' > 0 and n' in (0, 1] (got {k_prime}, {n_prime})"
                )));
            }
            let sigma = neuber_stress(sigma_e, e_modulus, k_prime, n_prime)?;
            Ok(ramberg_osgood(sigma, e_modulus, k_prime, n_prime))
        }
    }
}

fn ramberg_osgood(sigma: f64, e: f64, k: f64, n: f64) -> f64 {
    sigma / e + (sigma / k).powf(1.0 / n)
}

/// Local stress satisfying `σ·ε_RO(σ) = σ_e²/E`, bracketed in `[0, σ_e]`.
fn neuber_stress(sigma_e: f64, e: f64, k: f64, n: f64) -> Result<f64> {
    if sigma_e == 0.0 {
        return Ok(0.0);
    }
    let target = sigma_e * sigma_e / e;
    let residual = |s: f64| s * ramberg_osgood(s, e, k, n) - target;
    let slope = |s: f64| 2.0 * s / e + (1.0 + 1.0 / n) * (s / k).powf(1.0 / n);
    let (mut lo, mut hi) = (0.0, sigma_e);
    let mut s = sigma_e;
    for _ in 0..200 {
        let r = residual(s);
        if r.abs() <= 1e-12 * target {
            return Ok(s);
        }
        if r > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(s);
        }
        let newton = s - r / slope(s);
        s = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence(format!(
        "Neuber correction for sigma_e = {sigma_e} did not converge (bracket [{lo}, {hi}])"
    )))
}

/// Field values at one surface integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePointState {
    pub position: Vector3<f64>,
    pub temperature: f64,
    pub sigma_e: f64,
    pub eps_a: f64,
    pub chi: f64,
    pub chi_t: f64,
}

/// All surface point states plus floor-hit counters.
#[derive(Debug, Clone)]
pub struct SurfaceFields {
    pub points: Vec<SurfacePointState>,
    pub chi_floored: usize,
    pub chi_t_floored: usize,
}

/// Evaluates σ_e, ε_a, χ and χ_T at every quadrature point.
///
/// σ_e and T are interpolated from nodal values; E and the plasticity rule come
/// from the material at the local temperature.
pub fn surface_fields(
    mesh: &MeshModel,
    quad: &SurfaceQuadrature,
    material: &Material,
    opts: &GradientOptions,
) -> Result<SurfaceFields> {
    let sigma_nodal = nodal_von_mises(mesh);
    let chi = chi_field(mesh, quad, &sigma_nodal, opts)?;
    let chi_t = chi_t_field(mesh, quad, opts)?;
    let mut points = Vec::with_capacity(quad.len());
    for (i, p) in quad.points.iter().enumerate() {
        let temperature = mesh.interpolate_scalar(p.elem, &p.local, mesh.nodal_temperature())?;
        let sigma_e = mesh.interpolate_scalar(p.elem, &p.local, &sigma_nodal)?.max(0.0);
        let local = material.at(temperature);
        let eps_a = strain_amplitude(sigma_e, local.e_modulus, local.plasticity)?;
        points.push(SurfacePointState {
            position: p.position,
            temperature,
            sigma_e,
            eps_a,
            chi: chi.values[i],
            chi_t: chi_t.values[i],
        });
    }
    Ok(SurfaceFields {
        points,
        chi_floored: chi.floored,
        chi_t_floored: chi_t.floored,
    })
}
