//! Serde model of the JSON mesh file.

use serde::{Deserialize, Serialize};

use super::{ElementKind, MeshModel, StressTensor, SurfaceFace};
use crate::error::{Error, Result};

/// Unit declaration. Only mm / MPa / C are accepted; nothing is converted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub length: String,
    pub stress: String,
    pub temperature: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            length: "mm".into(),
            stress: "MPa".into(),
            temperature: "C".into(),
        }
    }
}

impl Units {
    pub fn check(&self) -> Result<()> {
        if *self != Units::default() {
            return Err(Error::invalid(format!(
                "unsupported units {{length: {}, stress: {}, temperature: {}}}; expected mm, MPa, C",
                self.length, self.stress, self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementType {
    Tet4,
    Tet10,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    #[serde(rename = "type")]
    pub kind: ElementType,
    pub conn: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fields {
    /// Per node, aligned with `nodes`: xx, yy, zz, xy, yz, zx.
    pub stress: Vec<StressTensor>,
    /// Per node, aligned with `nodes`.
    pub temperature: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceEntry {
    pub elem: usize,
    pub face: usize,
}

/// Top-level layout of a mesh file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub units: Units,
    /// `[id, x, y, z]` rows.
    pub nodes: Vec<[f64; 4]>,
    pub elements: Vec<ElementEntry>,
    pub fields: Fields,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<Vec<SurfaceEntry>>,
}

impl MeshFile {
    pub fn into_model(self) -> Result<MeshModel> {
        self.units.check()?;
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (row, [id, x, y, z]) in self.nodes.iter().copied().enumerate() {
            if !(id >= 0.0 && id.fract() == 0.0 && id < 2f64.powi(53)) {
                return Err(Error::invalid(format!(
                    "nodes[{row}]: id {id} is not a non-negative integer"
                )));
            }
            nodes.push((id as u64, [x, y, z]));
        }
        let elements = self
            .elements
            .into_iter()
            .map(|e| {
                let kind = match e.kind {
                    ElementType::Tet4 => ElementKind::Tet4,
                    ElementType::Tet10 => ElementKind::Tet10,
                };
                (kind, e.conn)
            })
            .collect();
        let surface = self.surface.map(|s| {
            s.into_iter()
                .map(|f| SurfaceFace {
                    elem: f.elem,
                    local_face: f.face,
                })
                .collect()
        });
        MeshModel::new(nodes, elements, self.fields.stress, self.fields.temperature, surface)
    }

    /// Serializable form of a mesh.
    pub fn from_model(mesh: &MeshModel) -> Self {
        MeshFile {
            units: Units::default(),
            nodes: mesh
                .node_ids()
                .iter()
                .zip(mesh.coords())
                .map(|(&id, x)| [id as f64, x[0], x[1], x[2]])
                .collect(),
            elements: mesh
                .elements()
                .iter()
                .map(|e| ElementEntry {
                    kind: match e.kind {
                        ElementKind::Tet4 => ElementType::Tet4,
                        ElementKind::Tet10 => ElementType::Tet10,
                    },
                    conn: e.nodes.iter().map(|&i| mesh.node_ids()[i]).collect(),
                })
                .collect(),
            fields: Fields {
                stress: mesh.nodal_stress().to_vec(),
                temperature: mesh.nodal_temperature().to_vec(),
            },
            surface: mesh.explicit_surface().map(|s| {
                s.iter()
                    .map(|f| SurfaceEntry {
                        elem: f.elem,
                        face: f.local_face,
                    })
                    .collect()
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE_TET: &str = r#"{
        "units": {"length": "mm", "stress": "MPa", "temperature": "C"},
        "nodes": [[1, 0, 0, 0], [2, 1, 0, 0], [3, 0, 1, 0], [4, 0, 0, 1]],
        "elements": [{"type": "tet4", "conn": [1, 2, 3, 4]}],
        "fields": {
            "stress": [[100,0,0,0,0,0],[100,0,0,0,0,0],[100,0,0,0,0,0],[100,0,0,0,0,0]],
            "temperature": [850, 850, 850, 850]
        }
    }"#;

    #[test]
    fn single_tet() {
        let m = MeshModel::from_json_str("t", SINGLE_TET).unwrap();
        assert_eq!(m.node_count(), 4);
        assert_eq!(m.element_count(), 1);
        assert_eq!(m.extract_surface().len(), 4);
    }

    #[test]
    fn missing_node_is_named() {
        let text = SINGLE_TET.replace("[1, 2, 3, 4]", "[1, 2, 3, 99]");
        let err = MeshModel::from_json_str("t", &text).unwrap_err().to_string();
        assert!(err.contains("element 0") && err.contains("99"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = SINGLE_TET.replace("\"units\"", "\"extra\": 1, \"units\"");
        let err = MeshModel::from_json_str("t", &text).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn missing_temperature_field() {
        let text = SINGLE_TET.replace(",\n            \"temperature\": [850, 850, 850, 850]", "");
        let err = MeshModel::from_json_str("t", &text).unwrap_err().to_string();
        assert!(err.contains("temperature"), "{err}");
    }

    #[test]
    fn hex_elements_rejected() {
        let text = SINGLE_TET.replace("\"tet4\"", "\"hex8\"");
        let err = MeshModel::from_json_str("t", &text).unwrap_err().to_string();
        assert!(err.contains("elements[0].type"), "{err}");
    }

    #[test]
    fn wrong_units_rejected() {
        let text = SINGLE_TET.replace("\"mm\"", "\"m\"");
        assert!(MeshModel::from_json_str("t", &text).is_err());
    }

    #[test]
    fn explicit_surface_overrides() {
        let text = SINGLE_TET.replace("\"fields\"", "\"surface\": [{\"elem\": 0, \"face\": 2}], \"fields\"");
        let m = MeshModel::from_json_str("t", &text).unwrap();
        assert_eq!(m.extract_surface(), vec![SurfaceFace { elem: 0, local_face: 2 }]);
    }
}
