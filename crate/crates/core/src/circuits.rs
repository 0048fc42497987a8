//! Simple cycle enumeration and prismatic circuits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, FaceId, PlanarGraph, VertexId};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// A simple cycle in canonical form: starts at its smallest vertex and runs
/// towards the smaller of that vertex's two cycle neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<VertexId>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i + 1]` (cyclically).
    pub edges: Vec<EdgeId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CycleLimits {
    pub max_length: Option<usize>,
    pub cap: usize,
}

impl Default for CycleLimits {
    fn default() -> Self {
        CycleLimits {
            max_length: None,
            cap: DEFAULT_CYCLE_CAP,
        }
    }
}

impl CycleLimits {
    pub fn up_to(max_length: usize) -> Self {
        CycleLimits {
            max_length: Some(max_length),
            ..Default::default()
        }
    }
}

struct Search<'a> {
    g: &'a PlanarGraph,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    limits: CycleLimits,
    on_path: Vec<bool>,
    path: Vec<VertexId>,
    path_edges: Vec<EdgeId>,
    out: Vec<Cycle>,
}

impl Search<'_> {
    fn extend(&mut self, start: VertexId) -> Result<()> {
        let v = *self.path.last().unwrap();
        let max = self.limits.max_length.unwrap_or(usize::MAX);
        for i in 0..self.adj[v].len() {
            let (w, e) = self.adj[v][i];
            if w == start {
                if self.path.len() >= 3 && self.path[1] < v {
                    let mut edges = self.path_edges.clone();
                    edges.push(e);
                    self.out.push(Cycle {
                        vertices: self.path.clone(),
                        edges,
                    });
                    if self.out.len() > self.limits.cap {
                        return Err(Error::ResourceCap(self.limits.cap));
                    }
                }
            } else if w > start && !self.on_path[w] && self.path.len() < max {
                self.on_path[w] = true;
                self.path.push(w);
                self.path_edges.push(e);
                self.extend(start)?;
                self.path.pop();
                self.path_edges.pop();
                self.on_path[w] = false;
            }
        }
        Ok(())
    }
}

/// All simple cycles of length at least 3, each once up to rotation and
/// reflection, ordered by their sorted edge ids.
pub fn enumerate_simple_cycles(g: &PlanarGraph, limits: CycleLimits) -> Result<Vec<Cycle>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut search = Search {
        g,
        adj,
        limits,
        on_path: vec![false; g.vertex_count()],
        path: Vec::new(),
        path_edges: Vec::new(),
        out: Vec::new(),
    };
    for start in 0..search.g.vertex_count() {
        search.path = vec![start];
        search.on_path[start] = true;
        search.extend(start)?;
        search.on_path[start] = false;
    }
    let mut cycles = search.out;
    cycles.sort_by_cached_key(|c| c.sorted_edges());
    Ok(cycles)
}

/// Primal edges whose dual edges form a simple, non-facial cycle of the dual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrismaticCircuit {
    /// Primal edge ids, sorted.
    pub edges: Vec<EdgeId>,
    /// The cycle in the dual, as a sequence of dual vertices (primal faces).
    pub dual_cycle: Vec<FaceId>,
    pub length: usize,
}

pub fn prismatic_circuits(g: &PlanarGraph, limits: CycleLimits) -> Result<Vec<PrismaticCircuit>> {
    g.require_polyhedral()?;
    let dual = g.dual();
    let to_primal = dual.inverse_edge_map();
    let mut facial: Vec<Vec<EdgeId>> = (0..g.vertex_count())
        .map(|v| {
            let mut es: Vec<EdgeId> = g.star(v).into_iter().map(|d| g.dart_edge(d)).collect();
            es.sort_unstable();
            es
        })
        .collect();
    facial.sort_unstable();
    let mut out: Vec<PrismaticCircuit> = enumerate_simple_cycles(&dual.graph, limits)?
        .into_iter()
        .filter_map(|c| {
            let mut edges: Vec<EdgeId> = c.edges.iter().map(|&es| to_primal[es]).collect();
            edges.sort_unstable();
            if facial.binary_search(&edges).is_ok() {
                return None;
            }
            Some(PrismaticCircuit {
                length: edges.len(),
                edges,
                dual_cycle: c.vertices,
            })
        })
        .collect();
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn k4_has_seven_cycles() {
        let cycles = enumerate_simple_cycles(&fixtures::tetrahedron(), CycleLimits::default()).unwrap();
        assert_eq!(cycles.len(), 7);
        assert_eq!(cycles.iter().filter(|c| c.len() == 3).count(), 4);
        assert_eq!(cycles.iter().filter(|c| c.len() == 4).count(), 3);
    }

    #[test]
    fn single_triangle() {
        let g = PlanarGraph::from_faces(&[vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        let cycles = enumerate_simple_cycles(&g, CycleLimits::default()).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].vertices, vec![0, 1, 2]);
    }

    #[test]
    fn octahedron_triangles() {
        let cycles = enumerate_simple_cycles(&fixtures::octahedron(), CycleLimits::up_to(3)).unwrap();
        assert_eq!(cycles.len(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let limits = CycleLimits {
            max_length: None,
            cap: 5,
        };
        assert!(matches!(
            enumerate_simple_cycles(&fixtures::tetrahedron(), limits),
            Err(Error::ResourceCap(5))
        ));
    }

    #[test]
    fn canonical_form() {
        let cycles = enumerate_simple_cycles(&fixtures::cube(), CycleLimits::default()).unwrap();
        for c in &cycles {
            let min = *c.vertices.iter().min().unwrap();
            assert_eq!(c.vertices[0], min);
            assert!(c.vertices[1] < *c.vertices.last().unwrap());
        }
        let mut keys: Vec<_> = cycles.iter().map(|c| c.sorted_edges()).collect();
        let n = keys.len();
        keys.dedup();
        assert_eq!(keys.len(), n);
    }

    #[test]
    fn tetrahedron_prismatic_circuits() {
        let pc = prismatic_circuits(&fixtures::tetrahedron(), CycleLimits::default()).unwrap();
        assert_eq!(pc.len(), 3);
        assert!(pc.iter().all(|c| c.length == 4));
    }

    #[test]
    fn cube_has_no_prismatic_triangles() {
        let pc = prismatic_circuits(&fixtures::cube(), CycleLimits::default()).unwrap();
        assert!(pc.iter().all(|c| c.length >= 4));
        let g = fixtures::cube();
        let quads: Vec<_> = pc.iter().filter(|c| c.length == 4).collect();
        // 3 equators plus one 4-cycle around each of the 12 octahedron edges
        assert_eq!(quads.len(), 15);
        let equators = quads
            .iter()
            .filter(|c| {
                let mut vs: Vec<_> = c.edges.iter().flat_map(|&e| g.edge(e)).collect();
                vs.sort_unstable();
                vs.dedup();
                vs.len() == 8
            })
            .count();
        assert_eq!(equators, 3);
    }

    #[test]
    fn singly_truncated_cube_has_prismatic_triangle() {
        let g = fixtures::truncated_cube_one_corner();
        let pc = prismatic_circuits(&g, CycleLimits::default()).unwrap();
        let tri: Vec<_> = pc.iter().filter(|c| c.length == 3).collect();
        assert_eq!(tri.len(), 1);
        // none of the three edges lies on the cut triangle
        let cut = g.faces().iter().position(|f| f.len() == 3).unwrap();
        for &e in &tri[0].edges {
            assert!(!g.edge_faces(e).contains(&cut));
        }
    }

    #[test]
    fn trivalent_solids_have_long_circuits() {
        for g in [fixtures::cube(), fixtures::dodecahedron(), fixtures::tetrahedron()] {
            let pc = prismatic_circuits(&g, CycleLimits::up_to(6)).unwrap();
            assert!(pc.iter().all(|c| c.length >= 4));
        }
    }
}
