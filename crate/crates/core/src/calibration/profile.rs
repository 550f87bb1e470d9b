//! Specimen surface profiles: the reduced surface-integral tables that stand in
//! for a full mesh when evaluating specimen lives.

use serde::{Deserialize, Serialize};

use crate::error::{from_json_str, read_to_string, Error, Result};

/// One row of a tabulated profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Surface area (mm²).
    pub area: f64,
    /// Local strain over nominal applied strain.
    pub kappa: f64,
    /// Normalized stress gradient (1/mm).
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// Gauge section at the applied strain, χ = 0.
    Uniform {
        area: f64,
    },
    Tabulated {
        rows: Vec<ProfileRow>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecimenProfile {
    pub id: String,
    pub shape: ProfileShape,
}

impl SpecimenProfile {
    pub fn uniform(id: impl Into<String>, area: f64) -> Result<Self> {
        let p = SpecimenProfile {
            id: id.into(),
            shape: ProfileShape::Uniform { area },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(id: impl Into<String>, rows: Vec<ProfileRow>) -> Result<Self> {
        let p = SpecimenProfile {
            id: id.into(),
            shape: ProfileShape::Tabulated { rows },
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let id = &self.id;
        match &self.shape {
            ProfileShape::Uniform { area } => {
                if !(*area > 0.0) || !area.is_finite() {
                    return Err(Error::invalid(format!(
                        "profile {id}: area must be positive, got {area}"
                    )));
                }
            }
            ProfileShape::Tabulated { rows } => {
                if rows.is_empty() {
                    return Err(Error::invalid(format!("profile {id}: no rows")));
                }
                for (i, r) in rows.iter().enumerate() {
                    let ok = r.area > 0.0 && r.kappa > 0.0 && r.chi >= 0.0;
                    if !ok || !(r.area.is_finite() && r.kappa.is_finite() && r.chi.is_finite()) {
                        return Err(Error::invalid(format!(
                            "profile {id}, row {i}: need dA > 0, kappa > 0, chi >= 0 (got {}, {}, {})",
                            r.area, r.kappa, r.chi
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Total surface area (mm²).
    pub fn area(&self) -> f64 {
        match &self.shape {
            ProfileShape::Uniform { area } => *area,
            ProfileShape::Tabulated { rows } => crate::sum::compensated_sum(rows.iter().map(|r| r.area)),
        }
    }

    /// True if any part of the surface carries a stress gradient.
    pub fn has_gradient(&self) -> bool {
        match &self.shape {
            ProfileShape::Uniform { .. } => false,
            ProfileShape::Tabulated { rows } => rows.iter().any(|r| r.chi > 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Uniform,
    Tabulated,
}

/// JSON form: `{"id", "kind"?, "area"}` or `{"id", "kind"?, "rows": [[dA, kappa, chi], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ProfileKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<[f64; 3]>>,
}

impl ProfileEntry {
    pub fn into_profile(self) -> Result<SpecimenProfile> {
        let id = self.id;
        let kind = match (self.kind, &self.area, &self.rows) {
            (Some(k), _, _) => k,
            (None, Some(_), None) => ProfileKind::Uniform,
            (None, None, Some(_)) => ProfileKind::Tabulated,
            _ => {
                return Err(Error::invalid(format!(
                    "profile {id}: give exactly one of `area` or `rows`, or set `kind`"
                )))
            }
        };
        match (kind, self.area, self.rows) {
            (ProfileKind::Uniform, Some(area), None) => SpecimenProfile::uniform(id, area),
            (ProfileKind::Tabulated, None, Some(rows)) => SpecimenProfile::tabulated(
                id,
                rows.into_iter()
                    .map(|[area, kappa, chi]| ProfileRow { area, kappa, chi })
                    .collect(),
            ),
            (ProfileKind::Uniform, ..) => Err(Error::invalid(format!(
                "profile {id}: uniform profiles take only `area`"
            ))),
            (ProfileKind::Tabulated, ..) => Err(Error::invalid(format!(
                "profile {id}: tabulated profiles take only `rows`"
            ))),
        }
    }

    pub fn from_profile(p: &SpecimenProfile) -> Self {
        match &p.shape {
            ProfileShape::Uniform { area } => ProfileEntry {
                id: p.id.clone(),
                kind: Some(ProfileKind::Uniform),
                area: Some(*area),
                rows: None,
            },
            ProfileShape::Tabulated { rows } => ProfileEntry {
                id: p.id.clone(),
                kind: Some(ProfileKind::Tabulated),
                area: None,
                rows: Some(rows.iter().map(|r| [r.area, r.kappa, r.chi]).collect()),
            },
        }
    }
}

/// Parses a JSON array of profiles; ids must be unique.
pub fn profiles_from_json_str(file: &str, text: &str) -> Result<Vec<SpecimenProfile>> {
    let entries: Vec<ProfileEntry> = from_json_str(file, text)?;
    let profiles = entries
        .into_iter()
        .map(ProfileEntry::into_profile)
        .collect::<Result<Vec<_>>>()?;
    for (i, p) in profiles.iter().enumerate() {
        if profiles[..i].iter().any(|q| q.id == p.id) {
            return Err(Error::invalid(format!("duplicate profile id {}", p.id)));
        }
    }
    Ok(profiles)
}

pub fn load_profiles(path: impl AsRef<std::path::Path>) -> Result<Vec<SpecimenProfile>> {
    let path = path.as_ref();
    profiles_from_json_str(&path.display().to_string(), &read_to_string(path)?)
}
