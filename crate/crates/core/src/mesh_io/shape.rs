//! Isoparametric shape functions for 4- and 10-node tetrahedra.
//!
//! Reference tetrahedron: vertices at (0,0,0), (1,0,0), (0,1,0), (0,0,1). Points
//! are carried as barycentric coordinates `L = (1-ξ-η-ζ, ξ, η, ζ)`. The shape
//! functions are written in `L` and differentiated with `L` treated as four
//! independent variables; reference derivatives follow from
//! `∂N/∂ξ_k = ∂N/∂L_k - ∂N/∂L_0`.
//!
//! Node order for tet10: corners 0..3, then mid-edge nodes on the edges
//! (0,1), (1,2), (2,0), (0,3), (1,3), (2,3).

use crate::error::{Error, Result};

/// Tolerance on barycentric coordinates (component range and unit sum).
pub const BARY_TOL: f64 = 1e-12;

/// Corner pairs of the six tet edges; edge `e` carries tet10 node `4 + e`.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];

/// Local faces as corner triples, ordered so that the right-hand normal of
/// `(p1 - p0) × (p2 - p0)` points out of a positively oriented element.
pub const FACES: [[usize; 3]; 4] = [[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];

/// Point in the reference tetrahedron, as barycentric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bary(pub [f64; 4]);

impl Bary {
    pub fn centroid() -> Self {
        Bary([0.25; 4])
    }

    /// From reference coordinates (ξ, η, ζ).
    pub fn from_reference(xi: f64, eta: f64, zeta: f64) -> Self {
        Bary([1.0 - xi - eta - zeta, xi, eta, zeta])
    }

    pub fn reference(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Checks that the point lies inside the reference element.
    pub fn check(&self) -> Result<()> {
        let sum: f64 = self.0.iter().sum();
        let inside = self
            .0
            .iter()
            .all(|&l| l.is_finite() && (-BARY_TOL..=1.0 + BARY_TOL).contains(&l));
        if !inside || (sum - 1.0).abs() > BARY_TOL {
            return Err(Error::domain(format!(
                "local coordinates {:?} lie outside the reference tetrahedron",
                self.0
            )));
        }
        Ok(())
    }
}

/// Supported element types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Tet4,
    Tet10,
}

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Tet4 => 4,
            ElementKind::Tet10 => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Tet4 => "tet4",
            ElementKind::Tet10 => "tet10",
        }
    }

    /// Local node indices of a face: 3 corners for tet4, 3 corners followed by
    /// the mid-edge nodes of edges (c0,c1), (c1,c2), (c2,c0) for tet10.
    pub fn face_nodes(self, face: usize) -> Vec<usize> {
        let c = FACES[face];
        match self {
            ElementKind::Tet4 => c.to_vec(),
            ElementKind::Tet10 => {
                let mut nodes = c.to_vec();
                for (a, b) in [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])] {
                    nodes.push(4 + edge_index(a, b));
                }
                nodes
            }
        }
    }

    /// Shape function values at `l`.
    pub fn values(self, l: &Bary, out: &mut [f64]) {
        let l = &l.0;
        match self {
            ElementKind::Tet4 => out[..4].copy_from_slice(l),
            ElementKind::Tet10 => {
                for i in 0..4 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                }
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    out[4 + e] = 4.0 * l[a] * l[b];
                }
            }
        }
    }

    /// Partial derivatives `∂N_i/∂L_j`, with `L` treated as independent.
    pub fn bary_derivatives(self, l: &Bary, out: &mut [[f64; 4]]) {
        let l = &l.0;
        match self {
            ElementKind::Tet4 => {
                for (i, row) in out.iter_mut().take(4).enumerate() {
                    *row = [0.0; 4];
                    row[i] = 1.0;
                }
            }
            ElementKind::Tet10 => {
                for (i, row) in out.iter_mut().take(4).enumerate() {
                    *row = [0.0; 4];
                    row[i] = 4.0 * l[i] - 1.0;
                }
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    let row = &mut out[4 + e];
                    *row = [0.0; 4];
                    row[a] = 4.0 * l[b];
                    row[b] = 4.0 * l[a];
                }
            }
        }
    }

    /// Derivatives with respect to the reference coordinates (ξ, η, ζ).
    pub fn reference_derivatives(self, l: &Bary, out: &mut [[f64; 3]]) {
        let mut dl = [[0.0; 4]; 10];
        self.bary_derivatives(l, &mut dl);
        for (row, d) in out.iter_mut().zip(dl.iter()).take(self.node_count()) {
            *row = [d[1] - d[0], d[2] - d[0], d[3] - d[0]];
        }
    }
}

fn edge_index(a: usize, b: usize) -> usize {
    EDGES
        .iter()
        .position(|&(p, q)| (p, q) == (a, b) || (p, q) == (b, a))
        .expect("corner pair is a tet edge")
}
