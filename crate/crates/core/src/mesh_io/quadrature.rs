use nalgebra::Vector3;

use super::shape::{Bary, FACES};
use super::{MeshModel, SurfaceFace};
use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Triangle quadrature rules on the reference triangle (0,0), (1,0), (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    /// Strang-Fix 6-point rule, exact to total degree 3.
    Degree3,
    /// Radon 7-point rule, exact to total degree 5.
    #[default]
    Degree5,
}

impl QuadratureRule {
    pub fn from_degree(degree: u32) -> Result<Self> {
        match degree {
            3 => Ok(QuadratureRule::Degree3),
            5 => Ok(QuadratureRule::Degree5),
            d => Err(Error::invalid(format!(
                "unsupported quadrature degree {d} (supported: 3, 5)"
            ))),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            QuadratureRule::Degree3 => 3,
            QuadratureRule::Degree5 => 5,
        }
    }

    /// Points `(s, t)` and weights; the weights sum to the reference area 1/2.
    pub fn points(self) -> Vec<([f64; 2], f64)> {
        match self {
            QuadratureRule::Degree3 => {
                let (a, b, c) = (0.659027622374092, 0.231933368553031, 0.109039009072877);
                [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)]
                    .into_iter()
                    .map(|(s, t)| ([s, t], 1.0 / 12.0))
                    .collect()
            }
            QuadratureRule::Degree5 => {
                let r15 = 15f64.sqrt();
                let a1 = (6.0 - r15) / 21.0;
                let a2 = (6.0 + r15) / 21.0;
                let w1 = (155.0 - r15) / 2400.0;
                let w2 = (155.0 + r15) / 2400.0;
                vec![
                    ([1.0 / 3.0, 1.0 / 3.0], 9.0 / 80.0),
                    ([a1, a1], w1),
                    ([1.0 - 2.0 * a1, a1], w1),
                    ([a1, 1.0 - 2.0 * a1], w1),
                    ([a2, a2], w2),
                    ([1.0 - 2.0 * a2, a2], w2),
                    ([a2, 1.0 - 2.0 * a2], w2),
                ]
            }
        }
    }
}

/// One surface integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoint {
    /// Index into [`SurfaceQuadrature::faces`].
    pub face: usize,
    /// Index of the point within its face.
    pub q: usize,
    pub elem: usize,
    pub local: Bary,
    pub position: Vector3<f64>,
    /// Rule weight times the face area measure (mm²).
    pub weight: f64,
    /// Unit normal pointing into the parent element.
    pub inward_normal: Vector3<f64>,
}

/// Integration points over a set of boundary faces, ordered by (face, q).
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub rule: QuadratureRule,
    pub faces: Vec<SurfaceFace>,
    pub points: Vec<QuadPoint>,
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total surface area, summed in (face, q) order.
    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.points.iter().map(|p| p.weight))
    }

    /// Area of one face.
    pub fn face_weight(&self, face: usize) -> f64 {
        compensated_sum(self.points.iter().filter(|p| p.face == face).map(|p| p.weight))
    }
}

/// Maps a triangle rule onto every face, in the order given.
pub fn build_quadrature(mesh: &MeshModel, faces: &[SurfaceFace], rule: QuadratureRule) -> Result<SurfaceQuadrature> {
    let rule_points = rule.points();
    let mut points = Vec::with_capacity(faces.len() * rule_points.len());
    let mut dn = [[0.0; 4]; 10];
    let mut n = [0.0; 10];
    for (face_id, face) in faces.iter().enumerate() {
        let el = mesh.element(face.elem)?;
        let [a, b, c] = *FACES
            .get(face.local_face)
            .ok_or_else(|| Error::invalid(format!("local face index {} out of range", face.local_face)))?;
        let corners = [a, b, c].map(|i| mesh.coords[el.nodes[i]]);
        let face_centroid = (corners[0] + corners[1] + corners[2]) / 3.0;
        let to_inside = mesh.element_centroid(face.elem) - face_centroid;
        let scale = (corners[1] - corners[0])
            .norm()
            .max((corners[2] - corners[0]).norm())
            .max((corners[2] - corners[1]).norm());

        for (q, &([s, t], w)) in rule_points.iter().enumerate() {
            let mut l = [0.0; 4];
            l[a] = 1.0 - s - t;
            l[b] = s;
            l[c] = t;
            let local = Bary(l);
            el.kind.values(&local, &mut n);
            el.kind.bary_derivatives(&local, &mut dn);
            let mut position = Vector3::zeros();
            let mut ts = Vector3::zeros();
            let mut tt = Vector3::zeros();
            for (i, &node) in el.nodes.iter().enumerate() {
                let x = mesh.coords[node];
                position += x * n[i];
                ts += x * (dn[i][b] - dn[i][a]);
                tt += x * (dn[i][c] - dn[i][a]);
            }
            let cross = ts.cross(&tt);
            let area_measure = cross.norm();
            if !(area_measure > 1e-14 * scale * scale) {
                return Err(Error::numerical(format!(
                    "degenerate face {face_id} (element {}, local face {})",
                    face.elem, face.local_face
                )));
            }
            let mut normal = cross / area_measure;
            if normal.dot(&to_inside) < 0.0 {
                normal = -normal;
            }
            points.push(QuadPoint {
                face: face_id,
                q,
                elem: face.elem,
                local,
                position,
                weight: w * area_measure,
                inward_normal: normal,
            });
        }
    }
    Ok(SurfaceQuadrature {
        rule,
        faces: faces.to_vec(),
        points,
    })
}
