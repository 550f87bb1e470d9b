//! Regenerates the mesh and synthetic dataset fixtures under `fixtures/`.
//!
//! ```text
//! cargo run -p lcf-risk --example make_fixtures -- fixtures
//! ```

use std::path::{Path, PathBuf};

use lcf_risk::calibration::{load_profiles, simulate_dataset, DesignLevel, FitContext, Theta};
use lcf_risk::mesh_io::{structured_block, BlockSpec, ElementKind, MeshFile, MeshModel, StressTensor};
use lcf_risk::strain_life::Material;

fn uniaxial(s: f64) -> StressTensor {
    [s, 0.0, 0.0, 0.0, 0.0, 0.0]
}

fn write_mesh(dir: &Path, name: &str, mesh: &MeshModel) {
    let text = serde_json::to_string(&MeshFile::from_model(mesh)).unwrap();
    std::fs::write(dir.join(name), text + "\n").unwrap();
}

/// Unit cube split into 12 tets around a center node.
fn unit_cube() -> MeshModel {
    let mut nodes: Vec<(u64, [f64; 3])> = (0..8)
        .map(|i| {
            (
                i as u64 + 1,
                [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64],
            )
        })
        .collect();
    nodes.push((9, [0.5, 0.5, 0.5]));
    // Corner indices (0-based) of each cube face, in cyclic order.
    let faces = [
        [0, 1, 3, 2],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 3, 7, 6],
        [0, 2, 6, 4],
        [1, 3, 7, 5],
    ];
    let coords: Vec<[f64; 3]> = nodes.iter().map(|n| n.1).collect();
    let mut elements = Vec::new();
    for f in faces {
        for tri in [[f[0], f[1], f[2]], [f[0], f[2], f[3]]] {
            let mut conn = vec![tri[0] as u64 + 1, tri[1] as u64 + 1, tri[2] as u64 + 1, 9];
            if signed_volume(&coords, &conn) < 0.0 {
                conn.swap(1, 2);
            }
            elements.push((ElementKind::Tet4, conn));
        }
    }
    let stress = vec![uniaxial(100.0); nodes.len()];
    let temperature = vec![850.0; nodes.len()];
    MeshModel::new(nodes, elements, stress, temperature, None).unwrap()
}

fn signed_volume(coords: &[[f64; 3]], conn: &[u64]) -> f64 {
    let p = |i: usize| coords[conn[i] as usize - 1];
    let d = |a: [f64; 3], b: [f64; 3]| [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let (u, v, w) = (d(p(0), p(1)), d(p(0), p(2)), d(p(0), p(3)));
    u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0])
}

/// Two tet10 elements sharing the face (1,0,0)-(0,1,0)-(0,0,1). The midside
/// node of the edge from the origin to (1,0,0) is pushed outward, which
/// curves the two boundary faces containing that edge.
fn tet10_pair() -> MeshModel {
    let corners = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
    ];
    let mut nodes: Vec<(u64, [f64; 3])> = corners.iter().enumerate().map(|(i, x)| (i as u64 + 1, *x)).collect();
    let mid = |a: usize, b: usize, nodes: &mut Vec<(u64, [f64; 3])>| -> u64 {
        let (pa, pb) = (corners[a], corners[b]);
        let mut x = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0, (pa[2] + pb[2]) / 2.0];
        if (a, b) == (0, 1) {
            x[1] -= 0.05;
            x[2] -= 0.05;
        }
        if let Some((id, _)) = nodes.iter().find(|(_, y)| *y == x) {
            return *id;
        }
        let id = nodes.len() as u64 + 1;
        nodes.push((id, x));
        id
    };
    let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];
    let mut elements = Vec::new();
    for tet in [[0usize, 1, 2, 3], [1, 4, 2, 3]] {
        let mut conn: Vec<u64> = tet.iter().map(|&i| i as u64 + 1).collect();
        for (a, b) in edges {
            let (i, j) = (tet[a].min(tet[b]), tet[a].max(tet[b]));
            conn.push(mid(i, j, &mut nodes));
        }
        elements.push((ElementKind::Tet10, conn));
    }
    let f = |x: &[f64; 3]| x[0] * x[0] + 2.0 * x[1] - x[2] + 50.0;
    let stress = nodes.iter().map(|(_, x)| uniaxial(f(x))).collect();
    let temperature = nodes.iter().map(|(_, x)| 800.0 + 10.0 * x[2]).collect();
    MeshModel::new(nodes, elements, stress, temperature, None).unwrap()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let mesh_dir = dir.join("mesh");
    std::fs::create_dir_all(&mesh_dir).unwrap();
    let material = Material::load(dir.join("material/bracket.json")).expect("fixtures/material/bracket.json");
    let e = material.at(850.0).e_modulus;

    write_mesh(&mesh_dir, "unit_cube.json", &unit_cube());
    write_mesh(&mesh_dir, "tet10_pair.json", &tet10_pair());

    // σ = σ0 (1 - x/L) with L = 2 mm, T = T0 (1 - x/4): on the face x = 0 the
    // inward decay rates are 1/2 and 1/4 per mm.
    let decay = structured_block(
        &BlockSpec {
            origin: [0.0; 3],
            size: [1.0, 1.0, 1.0],
            divisions: [2, 2, 2],
        },
        |x| uniaxial(400.0 * (1.0 - x[0] / 2.0)),
        |x| 900.0 * (1.0 - x[0] / 4.0),
    )
    .unwrap();
    write_mesh(&mesh_dir, "linear_decay.json", &decay);

    // 1 x 1 x 0.5 mm plate (surface area 4 mm²) strained to the CMB strain at
    // 10^4 cycles.
    let eps = material.cmb_strain(1e4, 850.0);
    let plate = structured_block(
        &BlockSpec {
            origin: [0.0; 3],
            size: [1.0, 1.0, 0.5],
            divisions: [2, 2, 1],
        },
        |_| uniaxial(e * eps),
        |_| 850.0,
    )
    .unwrap();
    write_mesh(&mesh_dir, "uniform_plate.json", &plate);

    // Bracket: σxx = σ_top (1 - g(x) (H - z)) on a 4 x 2 x 1 mm block. The top
    // face carries the same stress everywhere; the decay rate into the depth
    // g(x) is about 0.1/mm near x = 0 (spot 1) and 0.8/mm near x = 4 (spot 2).
    let g = |x: f64| 0.45 + 0.35 * (3.0 * (x - 2.0)).tanh();
    let bracket = structured_block(
        &BlockSpec {
            origin: [0.0; 3],
            size: [4.0, 2.0, 1.0],
            divisions: [8, 4, 4],
        },
        |x| uniaxial(600.0 * (1.0 - g(x[0]) * (1.0 - x[2]))),
        |x| 850.0 + 30.0 * x[2],
    )
    .unwrap();
    write_mesh(&mesh_dir, "bracket.json", &bracket);

    // 100 synthetic specimen tests drawn from the truth parameters.
    let cal = dir.join("calibration");
    let truth = Material::load(cal.join("truth.json")).expect("fixtures/calibration/truth.json");
    let profiles = load_profiles(cal.join("profiles.json")).unwrap();
    let design: Vec<DesignLevel> =
        serde_json::from_str(&std::fs::read_to_string(cal.join("design.json")).unwrap()).unwrap();
    let ctx = FitContext::from_material(&truth, 850.0, 1e12).unwrap();
    let theta = Theta::from_material(&truth, 850.0);
    let data = simulate_dataset(&profiles, &design, &theta, &ctx, 850.0, 1).unwrap();
    data.write_csv(std::fs::File::create(cal.join("dataset.csv")).unwrap())
        .unwrap();
}
