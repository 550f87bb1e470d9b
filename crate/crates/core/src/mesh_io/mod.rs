//! Mesh ingestion, boundary extraction, surface quadrature and isoparametric
//! interpolation on tetrahedral meshes.

mod block;
mod quadrature;
mod schema;
pub mod shape;

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::{read_to_string, Error, Result};
pub use block::{structured_block, BlockSpec};
pub use quadrature::{build_quadrature, QuadPoint, QuadratureRule, SurfaceQuadrature};
pub use schema::{MeshFile, SurfaceEntry, Units};
pub use shape::{Bary, ElementKind};

/// Symmetric stress tensor in the order xx, yy, zz, xy, yz, zx (MPa).
pub type StressTensor = [f64; 6];

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    /// Indices into the mesh node arrays (not external ids).
    pub nodes: Vec<usize>,
}

/// One face of the boundary surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceFace {
    pub elem: usize,
    pub local_face: usize,
}

/// An interior face shared by two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedFace {
    pub first: SurfaceFace,
    pub second: SurfaceFace,
}

/// Validated tetrahedral mesh with nodal stress and temperature fields.
///
/// Immutable after construction; all accessors take `&self`.
#[derive(Debug, Clone)]
pub struct MeshModel {
    node_ids: Vec<u64>,
    coords: Vec<Vector3<f64>>,
    elements: Vec<Element>,
    stress: Vec<StressTensor>,
    temperature: Vec<f64>,
    surface: Option<Vec<SurfaceFace>>,
}

/// Reads and validates a JSON mesh file.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<MeshModel> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    MeshModel::from_json_str(&path.display().to_string(), &text)
}

impl MeshModel {
    pub fn from_json_str(file: &str, text: &str) -> Result<Self> {
        let raw: MeshFile = crate::error::from_json_str(file, text)?;
        raw.into_model()
    }

    /// Builds a mesh from parts; node ids are external labels, connectivity
    /// refers to those labels.
    pub fn new(
        nodes: Vec<(u64, [f64; 3])>,
        elements: Vec<(ElementKind, Vec<u64>)>,
        stress: Vec<StressTensor>,
        temperature: Vec<f64>,
        surface: Option<Vec<SurfaceFace>>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, (id, x)) in nodes.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(Error::invalid(format!("duplicate node id {id}")));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("node {id} has non-finite coordinates")));
            }
        }
        if stress.len() != nodes.len() {
            return Err(Error::invalid(format!(
                "stress field has {} entries for {} nodes",
                stress.len(),
                nodes.len()
            )));
        }
        if temperature.len() != nodes.len() {
            return Err(Error::invalid(format!(
                "temperature field has {} entries for {} nodes",
                temperature.len(),
                nodes.len()
            )));
        }
        if let Some(i) = stress.iter().position(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::invalid(format!("node {} has a non-finite stress", nodes[i].0)));
        }
        if let Some(i) = temperature.iter().position(|t| !t.is_finite()) {
            return Err(Error::invalid(format!(
                "node {} has a non-finite temperature",
                nodes[i].0
            )));
        }

        let mut elems = Vec::with_capacity(elements.len());
        for (e, (kind, conn)) in elements.into_iter().enumerate() {
            if conn.len() != kind.node_count() {
                return Err(Error::invalid(format!(
                    "element {e}: {} needs {} nodes, got {}",
                    kind.name(),
                    kind.node_count(),
                    conn.len()
                )));
            }
            let mut idx = Vec::with_capacity(conn.len());
            for id in &conn {
                match index.get(id) {
                    Some(&i) => idx.push(i),
                    None => {
                        return Err(Error::invalid(format!(
                            "element {e} references node {id}, which does not exist"
                        )))
                    }
                }
            }
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("element {e} repeats a node")));
            }
            elems.push(Element { kind, nodes: idx });
        }

        let mesh = MeshModel {
            node_ids: nodes.iter().map(|(id, _)| *id).collect(),
            coords: nodes.iter().map(|(_, x)| Vector3::from(*x)).collect(),
            elements: elems,
            stress,
            temperature,
            surface,
        };

        for e in 0..mesh.elements.len() {
            let det = mesh.jacobian(e, &Bary::centroid()).determinant();
            if !(det > 0.0) {
                return Err(Error::invalid(format!(
                    "element {e} has non-positive Jacobian determinant {det:e} at its centroid"
                )));
            }
        }
        if let Some(faces) = &mesh.surface {
            for f in faces {
                if f.elem >= mesh.elements.len() {
                    return Err(Error::invalid(format!(
                        "surface face references element {}, which does not exist",
                        f.elem
                    )));
                }
                if f.local_face > 3 {
                    return Err(Error::invalid(format!(
                        "surface face on element {} has local face index {} (expected 0-3)",
                        f.elem, f.local_face
                    )));
                }
            }
        }
        mesh.face_table()?;
        Ok(mesh)
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn coords(&self) -> &[Vector3<f64>] {
        &self.coords
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> Result<&Element> {
        self.elements
            .get(e)
            .ok_or_else(|| Error::domain(format!("element {e} does not exist")))
    }

    pub fn nodal_stress(&self) -> &[StressTensor] {
        &self.stress
    }

    pub fn nodal_temperature(&self) -> &[f64] {
        &self.temperature
    }

    pub fn explicit_surface(&self) -> Option<&[SurfaceFace]> {
        self.surface.as_deref()
    }

    /// Copy of the mesh with all coordinates multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.coords.iter_mut().for_each(|x| *x *= s);
        m
    }

    /// Copy of the mesh with new nodal fields.
    pub fn with_fields(&self, stress: Vec<StressTensor>, temperature: Vec<f64>) -> Result<Self> {
        if stress.len() != self.node_count() || temperature.len() != self.node_count() {
            return Err(Error::invalid("field length does not match node count"));
        }
        let mut m = self.clone();
        m.stress = stress;
        m.temperature = temperature;
        Ok(m)
    }

    /// Corner-node centroid of an element.
    pub fn element_centroid(&self, e: usize) -> Vector3<f64> {
        let el = &self.elements[e];
        el.nodes[..4].iter().map(|&n| self.coords[n]).sum::<Vector3<f64>>() / 4.0
    }

    /// `J[i][k] = ∂x_i/∂ξ_k` at a local point.
    pub fn jacobian(&self, e: usize, local: &Bary) -> Matrix3<f64> {
        let el = &self.elements[e];
        let mut d = [[0.0; 3]; 10];
        el.kind.reference_derivatives(local, &mut d);
        let mut j = Matrix3::zeros();
        for (a, &n) in el.nodes.iter().enumerate() {
            let x = &self.coords[n];
            for i in 0..3 {
                for k in 0..3 {
                    j[(i, k)] += x[i] * d[a][k];
                }
            }
        }
        j
    }

    /// Global position of a local point.
    pub fn position(&self, e: usize, local: &Bary) -> Vector3<f64> {
        let el = &self.elements[e];
        let mut n = [0.0; 10];
        el.kind.values(local, &mut n);
        el.nodes.iter().zip(n.iter()).map(|(&i, &w)| self.coords[i] * w).sum()
    }

    /// Boundary faces: the explicit list when present, otherwise every face
    /// belonging to exactly one element, in ascending (element, local face) order.
    pub fn extract_surface(&self) -> Vec<SurfaceFace> {
        if let Some(s) = &self.surface {
            return s.clone();
        }
        let table = self.face_table().expect("face table validated on construction");
        let mut faces: Vec<SurfaceFace> = table
            .values()
            .filter(|owners| owners.len() == 1)
            .map(|owners| owners[0])
            .collect();
        faces.sort_unstable();
        faces
    }

    /// Faces shared by two elements, in ascending order of the first owner.
    pub fn shared_faces(&self) -> Vec<SharedFace> {
        let table = self.face_table().expect("face table validated on construction");
        let mut shared: Vec<SharedFace> = table
            .values()
            .filter(|owners| owners.len() == 2)
            .map(|owners| SharedFace {
                first: owners[0],
                second: owners[1],
            })
            .collect();
        shared.sort_unstable_by_key(|s| (s.first, s.second));
        shared
    }

    fn face_table(&self) -> Result<HashMap<[usize; 3], Vec<SurfaceFace>>> {
        let mut table: HashMap<[usize; 3], Vec<SurfaceFace>> = HashMap::new();
        for (e, el) in self.elements.iter().enumerate() {
            for (f, corners) in shape::FACES.iter().enumerate() {
                let mut key = corners.map(|c| el.nodes[c]);
                key.sort_unstable();
                table
                    .entry(key)
                    .or_default()
                    .push(SurfaceFace { elem: e, local_face: f });
            }
        }
        if let Some(owners) = table.values().find(|o| o.len() > 2) {
            return Err(Error::invalid(format!(
                "face of element {} is shared by {} elements",
                owners[0].elem,
                owners.len()
            )));
        }
        Ok(table)
    }

    /// Isoparametric interpolation of a per-node quantity with `N` components.
    pub fn interpolate<const N: usize>(&self, e: usize, local: &Bary, nodal: &[[f64; N]]) -> Result<[f64; N]> {
        local.check()?;
        let el = self.element(e)?;
        let mut n = [0.0; 10];
        el.kind.values(local, &mut n);
        if nodal.len() < self.node_count() {
            return Err(Error::invalid("nodal field shorter than node list"));
        }
        let nn = el.kind.node_count();
        if let Some(i) = n[..nn].iter().position(|&w| w == 1.0) {
            return Ok(nodal[el.nodes[i]]);
        }
        // Offsets from the first node keep constant fields exact.
        let base = nodal[el.nodes[0]];
        let mut out = base;
        for (&node, &w) in el.nodes.iter().zip(n.iter()).skip(1) {
            for c in 0..N {
                out[c] += w * (nodal[node][c] - base[c]);
            }
        }
        Ok(out)
    }

    /// Isoparametric interpolation of a nodal scalar.
    pub fn interpolate_scalar(&self, e: usize, local: &Bary, nodal: &[f64]) -> Result<f64> {
        local.check()?;
        let el = self.element(e)?;
        if nodal.len() < self.node_count() {
            return Err(Error::invalid("nodal field shorter than node list"));
        }
        let mut n = [0.0; 10];
        el.kind.values(local, &mut n);
        let nn = el.kind.node_count();
        if let Some(i) = n[..nn].iter().position(|&w| w == 1.0) {
            return Ok(nodal[el.nodes[i]]);
        }
        let base = nodal[el.nodes[0]];
        let offset: f64 = el
            .nodes
            .iter()
            .zip(n.iter())
            .skip(1)
            .map(|(&node, &w)| w * (nodal[node] - base))
            .sum();
        Ok(base + offset)
    }

    /// Global gradient of a nodal scalar at a local point, `J^{-T} ∇_ξ f`.
    pub fn gradient(&self, e: usize, local: &Bary, nodal: &[f64]) -> Result<Vector3<f64>> {
        local.check()?;
        let el = self.element(e)?;
        if nodal.len() < self.node_count() {
            return Err(Error::invalid("nodal field shorter than node list"));
        }
        let j = self.jacobian(e, local);
        let inv = j
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::numerical(format!("singular Jacobian in element {e}")))?;
        let mut d = [[0.0; 3]; 10];
        el.kind.reference_derivatives(local, &mut d);
        let mut g_ref = Vector3::zeros();
        for (a, &node) in el.nodes.iter().enumerate() {
            g_ref += Vector3::from(d[a]) * nodal[node];
        }
        Ok(inv.transpose() * g_ref)
    }
}
