//! Structured tet4 meshes of rectangular blocks, for fixtures and studies.

use super::{ElementKind, MeshModel, StressTensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSpec {
    pub origin: [f64; 3],
    pub size: [f64; 3],
    pub divisions: [usize; 3],
}

/// Meshes a box with `divisions` cells per axis, each cell split into six
/// tetrahedra along its main diagonal (conforming across cells). Nodal fields
/// are sampled from the given functions of position.
pub fn structured_block(
    spec: &BlockSpec,
    stress: impl Fn(&[f64; 3]) -> StressTensor,
    temperature: impl Fn(&[f64; 3]) -> f64,
) -> Result<MeshModel> {
    let [nx, ny, nz] = spec.divisions;
    if nx == 0 || ny == 0 || nz == 0 || spec.size.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::invalid(
            "block needs positive size and at least one division per axis",
        ));
    }
    let id = |i: usize, j: usize, k: usize| (1 + i + (nx + 1) * (j + (ny + 1) * k)) as u64;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                let x = [
                    spec.origin[0] + spec.size[0] * i as f64 / nx as f64,
                    spec.origin[1] + spec.size[1] * j as f64 / ny as f64,
                    spec.origin[2] + spec.size[2] * k as f64 / nz as f64,
                ];
                nodes.push((id(i, j, k), x));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut elements = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for (p, perm) in PERMS.iter().enumerate() {
                    let mut c = [i, j, k];
                    let mut conn = vec![id(c[0], c[1], c[2])];
                    for &axis in perm {
                        c[axis] += 1;
                        conn.push(id(c[0], c[1], c[2]));
                    }
                    // Odd permutations produce left-handed tets.
                    if matches!(p, 1 | 2 | 5) {
                        conn.swap(1, 2);
                    }
                    elements.push((ElementKind::Tet4, conn));
                }
            }
        }
    }
    let stress_values = nodes.iter().map(|(_, x)| stress(x)).collect();
    let temperature_values = nodes.iter().map(|(_, x)| temperature(x)).collect();
    MeshModel::new(nodes, elements, stress_values, temperature_values, None)
}
