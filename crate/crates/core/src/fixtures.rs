//! Built-in polyhedra used by tests, the acceptance suite and the CLI.
//!
//! Each solid is given by coordinates; faces are recovered by a brute-force
//! hull search and listed counter-clockwise as seen from outside.

use nalgebra::Vector3;

use crate::graph::PlanarGraph;

const PHI: f64 = 1.618_033_988_749_895;

pub const NAMES: [&str; 8] = [
    "tetrahedron",
    "cube",
    "octahedron",
    "dodecahedron",
    "icosahedron",
    "triangular-prism",
    "square-pyramid",
    "truncated-cube-one-corner",
];

/// Face lists of the convex hull of `points`, oriented outward. Every point
/// must be a hull vertex.
pub fn hull_faces(points: &[Vector3<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let eps = 1e-9;
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (points[j] - points[i]).cross(&(points[k] - points[i]));
                if normal.norm() < eps {
                    continue;
                }
                let normal = normal.normalize();
                let offset = normal.dot(&points[i]);
                let side: Vec<f64> = points.iter().map(|p| normal.dot(p) - offset).collect();
                let above = side.iter().any(|&s| s > eps);
                let below = side.iter().any(|&s| s < -eps);
                if above && below {
                    continue;
                }
                let outward = if above { -normal } else { normal };
                let mut on: Vec<usize> = (0..n).filter(|&m| side[m].abs() <= eps).collect();
                on.sort_unstable();
                if faces.iter().any(|f| {
                    let mut s = f.clone();
                    s.sort_unstable();
                    s == on
                }) {
                    continue;
                }
                let centroid = on.iter().map(|&m| points[m]).sum::<Vector3<f64>>() / on.len() as f64;
                let u = (points[on[0]] - centroid).normalize();
                let w = outward.cross(&u);
                on.sort_by(|&a, &b| {
                    let pa = points[a] - centroid;
                    let pb = points[b] - centroid;
                    let ta = pa.dot(&w).atan2(pa.dot(&u));
                    let tb = pb.dot(&w).atan2(pb.dot(&u));
                    ta.partial_cmp(&tb).unwrap()
                });
                let start = on.iter().enumerate().min_by_key(|(_, v)| **v).unwrap().0;
                on.rotate_left(start);
                faces.push(on);
            }
        }
    }
    faces
}

/// A named polyhedron with coordinates for its vertices.
#[derive(Debug, Clone)]
pub struct Solid {
    pub name: &'static str,
    pub graph: PlanarGraph,
    pub points: Vec<Vector3<f64>>,
}

fn solid(name: &'static str, coords: Vec<[f64; 3]>) -> Solid {
    let points: Vec<Vector3<f64>> = coords.into_iter().map(Vector3::from).collect();
    let graph = PlanarGraph::from_faces(&hull_faces(&points)).expect("hull of a convex solid");
    Solid {
        name,
        graph,
        points,
    }
}

pub fn solid_by_name(name: &str) -> Option<Solid> {
    let s = match name {
        "tetrahedron" => solid(
            "tetrahedron",
            vec![[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]],
        ),
        "cube" => {
            let mut c = Vec::new();
            for x in [-1., 1.] {
                for y in [-1., 1.] {
                    for z in [-1., 1.] {
                        c.push([x, y, z]);
                    }
                }
            }
            solid("cube", c)
        }
        "octahedron" => solid(
            "octahedron",
            vec![
                [1., 0., 0.],
                [-1., 0., 0.],
                [0., 1., 0.],
                [0., -1., 0.],
                [0., 0., 1.],
                [0., 0., -1.],
            ],
        ),
        "icosahedron" => {
            let mut c = Vec::new();
            for a in [-1., 1.] {
                for b in [-PHI, PHI] {
                    c.push([0., a, b]);
                    c.push([a, b, 0.]);
                    c.push([b, 0., a]);
                }
            }
            solid("icosahedron", c)
        }
        "dodecahedron" => {
            let mut c = Vec::new();
            for x in [-1., 1.] {
                for y in [-1., 1.] {
                    for z in [-1., 1.] {
                        c.push([x, y, z]);
                    }
                }
            }
            for a in [-1. / PHI, 1. / PHI] {
                for b in [-PHI, PHI] {
                    c.push([0., a, b]);
                    c.push([a, b, 0.]);
                    c.push([b, 0., a]);
                }
            }
            solid("dodecahedron", c)
        }
        "triangular-prism" => {
            let mut c = Vec::new();
            for z in [-1., 1.] {
                for k in 0..3 {
                    let t = std::f64::consts::TAU * k as f64 / 3.0;
                    c.push([t.cos(), t.sin(), z]);
                }
            }
            solid("triangular-prism", c)
        }
        "square-pyramid" => solid(
            "square-pyramid",
            vec![
                [1., 1., 0.],
                [-1., 1., 0.],
                [-1., -1., 0.],
                [1., -1., 0.],
                [0., 0., 1.],
            ],
        ),
        "truncated-cube-one-corner" => {
            let mut c = Vec::new();
            for x in [-1., 1.] {
                for y in [-1., 1.] {
                    for z in [-1., 1.] {
                        if x > 0. && y > 0. && z > 0. {
                            continue;
                        }
                        c.push([x, y, z]);
                    }
                }
            }
            c.extend([[1., 1., 0.5], [1., 0.5, 1.], [0.5, 1., 1.]]);
            solid("truncated-cube-one-corner", c)
        }
        _ => return None,
    };
    Some(s)
}

pub fn by_name(name: &str) -> Option<PlanarGraph> {
    solid_by_name(name).map(|s| s.graph)
}

pub fn tetrahedron() -> PlanarGraph {
    by_name("tetrahedron").unwrap()
}

pub fn cube() -> PlanarGraph {
    by_name("cube").unwrap()
}

pub fn octahedron() -> PlanarGraph {
    by_name("octahedron").unwrap()
}

pub fn dodecahedron() -> PlanarGraph {
    by_name("dodecahedron").unwrap()
}

pub fn icosahedron() -> PlanarGraph {
    by_name("icosahedron").unwrap()
}

pub fn triangular_prism() -> PlanarGraph {
    by_name("triangular-prism").unwrap()
}

pub fn square_pyramid() -> PlanarGraph {
    by_name("square-pyramid").unwrap()
}

/// The cube with one corner sliced off.
pub fn truncated_cube_one_corner() -> PlanarGraph {
    by_name("truncated-cube-one-corner").unwrap()
}

pub fn platonic_solids() -> Vec<(&'static str, PlanarGraph)> {
    ["tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron"]
        .into_iter()
        .map(|n| (n, by_name(n).unwrap()))
        .collect()
}

/// Inserts a new vertex in the middle of edge `e`.
pub fn subdivide_edge(g: &PlanarGraph, e: usize) -> PlanarGraph {
    let [a, b] = g.edge(e);
    let m = g.vertex_count();
    let faces: Vec<Vec<usize>> = g
        .faces()
        .iter()
        .map(|f| {
            let mut out = Vec::with_capacity(f.len() + 1);
            for i in 0..f.len() {
                let (x, y) = (f[i], f[(i + 1) % f.len()]);
                out.push(x);
                if (x, y) == (a, b) || (x, y) == (b, a) {
                    out.push(m);
                }
            }
            out
        })
        .collect();
    PlanarGraph::from_faces(&faces).expect("subdivision of a valid map")
}
