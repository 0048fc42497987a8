//! Embedded planar graphs stored as combinatorial maps.
//!
//! A graph is built from oriented face boundaries. Every undirected edge
//! `{u, v}` with `u < v` gets an [`EdgeId`], and two darts: `2 * e` runs
//! `u -> v` and `2 * e + 1` runs `v -> u`. Each dart lies on exactly one face
//! (the face on its left when faces are listed counter-clockwise as seen from
//! outside the polyhedron).

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;
pub type DartId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarGraph {
    n_vertices: usize,
    faces: Vec<Vec<VertexId>>,
    edges: Vec<[VertexId; 2]>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
    dart_face: Vec<FaceId>,
    dart_next: Vec<DartId>,
    dart_prev: Vec<DartId>,
    vertex_dart: Vec<DartId>,
    face_dart: Vec<DartId>,
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub euler_ok: bool,
    /// Minimum vertex cut found, capped at 3.
    pub connectivity: usize,
    pub simple_ok: bool,
    pub polyhedral: bool,
    pub messages: Vec<String>,
}

fn dart_of(u: VertexId, v: VertexId, lookup: &HashMap<(VertexId, VertexId), EdgeId>) -> DartId {
    let e = lookup[&(u.min(v), u.max(v))];
    if u < v {
        2 * e
    } else {
        2 * e + 1
    }
}

impl PlanarGraph {
    /// Builds the map whose face orbits are the given cyclic vertex sequences.
    pub fn from_faces(face_lists: &[Vec<VertexId>]) -> Result<Self> {
        let mut directed: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        let mut undirected: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        let mut max_vertex = None;
        for (fi, face) in face_lists.iter().enumerate() {
            if face.len() < 2 {
                return Err(Error::DegenerateFace { face: fi });
            }
            for i in 0..face.len() {
                let (a, b) = (face[i], face[(i + 1) % face.len()]);
                if a == b {
                    return Err(Error::Loop { face: fi, vertex: a });
                }
                max_vertex = max_vertex.max(Some(a));
                *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                let seen = directed.entry((a, b)).or_insert(0);
                *seen += 1;
            }
        }
        // Over-used edges are reported before under-used ones.
        for pass_over in [true, false] {
            for (&(a, b), &count) in &undirected {
                if (pass_over && count > 2) || (!pass_over && count < 2) {
                    return Err(Error::NonManifoldEdge(a, b, count));
                }
            }
        }
        for (&(a, b), &count) in &directed {
            if count > 1 {
                return Err(Error::InconsistentOrientation(a.min(b), a.max(b)));
            }
        }
        let n_vertices = max_vertex.map_or(0, |m| m + 1);
        let mut used = vec![false; n_vertices];
        for face in face_lists {
            for &v in face {
                used[v] = true;
            }
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::MissingVertex {
                expected: n_vertices,
                missing,
            });
        }

        let edges: Vec<[VertexId; 2]> = undirected.keys().map(|&(a, b)| [a, b]).collect();
        let edge_lookup: HashMap<_, _> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e[0], e[1]), i))
            .collect();
        let n_darts = 2 * edges.len();
        let mut dart_face = vec![usize::MAX; n_darts];
        let mut dart_next = vec![usize::MAX; n_darts];
        let mut dart_prev = vec![usize::MAX; n_darts];
        let mut face_dart = Vec::with_capacity(face_lists.len());
        for (fi, face) in face_lists.iter().enumerate() {
            let k = face.len();
            let darts: Vec<DartId> = (0..k)
                .map(|i| dart_of(face[i], face[(i + 1) % k], &edge_lookup))
                .collect();
            for i in 0..k {
                dart_face[darts[i]] = fi;
                dart_next[darts[i]] = darts[(i + 1) % k];
                dart_prev[darts[(i + 1) % k]] = darts[i];
            }
            face_dart.push(darts[0]);
        }
        // Any missing opposite dart would have shown up as an odd count above.
        debug_assert!(dart_face.iter().all(|&f| f != usize::MAX));

        let mut vertex_dart = vec![usize::MAX; n_vertices];
        for d in 0..n_darts {
            let t = if d % 2 == 0 { edges[d / 2][0] } else { edges[d / 2][1] };
            if vertex_dart[t] == usize::MAX {
                vertex_dart[t] = d;
            }
        }

        let g = PlanarGraph {
            n_vertices,
            faces: face_lists.to_vec(),
            edges,
            edge_lookup,
            dart_face,
            dart_next,
            dart_prev,
            vertex_dart,
            face_dart,
            labels: BTreeMap::new(),
        };

        for v in 0..n_vertices {
            let count = g.star(v).len();
            let outgoing = g.darts().filter(|&d| g.tail(d) == v).count();
            if count != outgoing {
                return Err(Error::NonManifoldVertex(v));
            }
        }
        if !g.is_connected_without(&[]) {
            return Err(Error::Disconnected);
        }
        let chi = g.euler_characteristic();
        if chi != 2 {
            return Err(Error::NotSpherical(chi));
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn faces(&self) -> &[Vec<VertexId>] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &[VertexId] {
        &self.faces[f]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&(u.min(v), u.max(v))).copied()
    }

    /// Dart running from `u` to `v`, if the edge exists.
    pub fn dart_between(&self, u: VertexId, v: VertexId) -> Option<DartId> {
        self.edge_between(u, v)
            .map(|e| if u < v { 2 * e } else { 2 * e + 1 })
    }

    pub fn darts(&self) -> std::ops::Range<DartId> {
        0..2 * self.edges.len()
    }

    pub fn dart_edge(&self, d: DartId) -> EdgeId {
        d / 2
    }

    pub fn opposite(&self, d: DartId) -> DartId {
        d ^ 1
    }

    pub fn tail(&self, d: DartId) -> VertexId {
        self.edges[d / 2][d % 2]
    }

    pub fn head(&self, d: DartId) -> VertexId {
        self.edges[d / 2][1 - d % 2]
    }

    /// Face on the left of the dart.
    pub fn dart_face(&self, d: DartId) -> FaceId {
        self.dart_face[d]
    }

    pub fn next(&self, d: DartId) -> DartId {
        self.dart_next[d]
    }

    pub fn prev(&self, d: DartId) -> DartId {
        self.dart_prev[d]
    }

    /// Faces on either side of an edge: `[left of u->v, left of v->u]`.
    pub fn edge_faces(&self, e: EdgeId) -> [FaceId; 2] {
        [self.dart_face[2 * e], self.dart_face[2 * e + 1]]
    }

    /// Boundary darts of a face in face order.
    pub fn face_darts(&self, f: FaceId) -> Vec<DartId> {
        let start = self.face_dart[f];
        let mut out = vec![start];
        let mut d = self.dart_next[start];
        while d != start {
            out.push(d);
            d = self.dart_next[d];
        }
        out
    }

    /// Outgoing darts at `v`, ordered so that the faces between consecutive
    /// darts run with the same orientation as the face lists.
    ///
    /// `dart_face(star[i])` is the face spanned by `star[i]` and `star[i + 1]`.
    pub fn star(&self, v: VertexId) -> Vec<DartId> {
        let start = self.vertex_dart[v];
        let mut out = vec![start];
        let mut d = self.opposite(self.dart_prev[start]);
        while d != start {
            out.push(d);
            if out.len() > self.dart_face.len() {
                break;
            }
            d = self.opposite(self.dart_prev[d]);
        }
        out
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.star(v).len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n_vertices).map(|v| self.degree(v)).collect()
    }

    pub fn all_degrees_odd(&self) -> bool {
        self.degrees().iter().all(|d| d % 2 == 1)
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.star(v).into_iter().map(|d| self.head(d)).collect()
    }

    fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn is_connected_without(&self, removed: &[VertexId]) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_vertices];
        for &r in removed {
            seen[r] = true;
        }
        let Some(start) = seen.iter().position(|s| !s) else {
            return true;
        };
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached + removed.len() == self.n_vertices
    }

    /// Vertex connectivity by exhaustive search over cuts of size at most 2.
    pub fn connectivity(&self) -> usize {
        let n = self.n_vertices;
        for k in 0..3 {
            if n <= k + 1 {
                return k;
            }
            let disconnects = match k {
                0 => !self.is_connected_without(&[]),
                1 => (0..n).any(|a| !self.is_connected_without(&[a])),
                _ => (0..n).any(|a| (a + 1..n).any(|b| !self.is_connected_without(&[a, b]))),
            };
            if disconnects {
                return k;
            }
        }
        3
    }

    pub fn validate(&self) -> ValidationReport {
        let mut messages = Vec::new();
        let chi = self.euler_characteristic();
        let euler_ok = chi == 2;
        if !euler_ok {
            messages.push(format!("V - E + F = {chi}"));
        }
        let mut pairs: Vec<_> = self.edges.iter().map(|&[a, b]| (a.min(b), a.max(b))).collect();
        let loops = pairs.iter().filter(|(a, b)| a == b).count();
        pairs.sort_unstable();
        pairs.dedup();
        let simple_ok = loops == 0 && pairs.len() == self.edges.len();
        if !simple_ok {
            messages.push("graph has loops or parallel edges".into());
        }
        let connectivity = self.connectivity();
        if connectivity < 3 {
            messages.push(format!("vertex connectivity {connectivity} < 3"));
        }
        if self.n_vertices < 4 {
            messages.push("fewer than four vertices".into());
        }
        ValidationReport {
            euler_ok,
            connectivity,
            simple_ok,
            polyhedral: euler_ok && simple_ok && connectivity >= 3 && self.n_vertices >= 4,
            messages,
        }
    }

    pub fn require_polyhedral(&self) -> Result<()> {
        let report = self.validate();
        if report.polyhedral {
            Ok(())
        } else {
            Err(Error::NotPolyhedral(report.messages.join("; ")))
        }
    }

    /// Dual map: vertex `f` of the dual is face `f`, face `v` of the dual is
    /// vertex `v`. The returned table sends each primal edge to its dual edge.
    pub fn dual(&self) -> DualGraph {
        let faces: Vec<Vec<VertexId>> = (0..self.n_vertices)
            .map(|v| self.star(v).into_iter().map(|d| self.dart_face[d]).collect())
            .collect();
        let graph = PlanarGraph::from_faces(&faces).expect("dual of a valid map is valid");
        let edge_map = (0..self.edges.len())
            .map(|e| {
                let [f, g] = self.edge_faces(e);
                graph.edge_between(f, g).expect("dual edge exists")
            })
            .collect();
        DualGraph { graph, edge_map }
    }

    /// Same graph with every face listed in the opposite direction.
    pub fn mirrored(&self) -> PlanarGraph {
        let faces: Vec<Vec<VertexId>> = self
            .faces
            .iter()
            .map(|f| f.iter().rev().copied().collect())
            .collect();
        PlanarGraph::from_faces(&faces).expect("mirror of a valid map is valid")
    }
}

/// A dual map together with the primal-to-dual edge correspondence.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub graph: PlanarGraph,
    /// `edge_map[e]` is the dual edge crossing primal edge `e`.
    pub edge_map: Vec<EdgeId>,
}

impl DualGraph {
    /// Primal edge crossed by dual edge `e_star`.
    pub fn primal_edge(&self, e_star: EdgeId) -> EdgeId {
        self.edge_map
            .iter()
            .position(|&x| x == e_star)
            .expect("dual edge map is a bijection")
    }

    pub fn inverse_edge_map(&self) -> Vec<EdgeId> {
        let mut inv = vec![0; self.edge_map.len()];
        for (e, &es) in self.edge_map.iter().enumerate() {
            inv[es] = e;
        }
        inv
    }
}

/// Orientation-preserving map isomorphism as a dart bijection `a -> b`.
pub fn map_isomorphism(a: &PlanarGraph, b: &PlanarGraph) -> Option<Vec<DartId>> {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.face_count() != b.face_count()
    {
        return None;
    }
    let n = 2 * a.edge_count();
    if n == 0 {
        return Some(Vec::new());
    }
    'candidate: for target in 0..n {
        let mut phi = vec![usize::MAX; n];
        phi[0] = target;
        let mut stack = vec![0];
        while let Some(d) = stack.pop() {
            let image = phi[d];
            for (src, dst) in [(a.next(d), b.next(image)), (a.opposite(d), b.opposite(image))] {
                if phi[src] == usize::MAX {
                    phi[src] = dst;
                    stack.push(src);
                } else if phi[src] != dst {
                    continue 'candidate;
                }
            }
        }
        let mut hit = vec![false; n];
        for &p in &phi {
            if p == usize::MAX || hit[p] {
                continue 'candidate;
            }
            hit[p] = true;
        }
        return Some(phi);
    }
    None
}

/// Isomorphism of embedded graphs, allowing a reflection.
pub fn is_isomorphic(a: &PlanarGraph, b: &PlanarGraph) -> bool {
    map_isomorphism(a, b).is_some() || map_isomorphism(a, &b.mirrored()).is_some()
}

/// JSON graph format: `{"faces": [[v, ...], ...], "labels": {...}}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GraphFile {
    pub faces: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<serde_json::Value>,
}

impl GraphFile {
    pub fn from_graph(g: &PlanarGraph) -> Self {
        GraphFile {
            faces: g.faces.clone(),
            labels: g.labels.clone(),
            origin: None,
        }
    }

    pub fn into_graph(self) -> Result<PlanarGraph> {
        Ok(PlanarGraph::from_faces(&self.faces)?.with_labels(self.labels))
    }

    pub fn parse(text: &str) -> Result<PlanarGraph> {
        serde_json::from_str::<GraphFile>(text)?.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn platonic_counts() {
        let t = fixtures::tetrahedron();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (4, 6, 4));
        let c = fixtures::cube();
        assert_eq!((c.vertex_count(), c.edge_count(), c.face_count()), (8, 12, 6));
    }

    #[test]
    fn edge_in_three_faces_is_rejected() {
        let faces = vec![vec![0, 1, 2], vec![1, 0, 3], vec![1, 2, 3], vec![2, 1, 4]];
        assert!(matches!(
            PlanarGraph::from_faces(&faces),
            Err(Error::NonManifoldEdge(1, 2, 3))
        ));
    }

    #[test]
    fn same_direction_twice_is_rejected() {
        let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        assert!(matches!(
            PlanarGraph::from_faces(&faces),
            Err(Error::InconsistentOrientation(..))
        ));
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let mut faces = fixtures::tetrahedron().faces().to_vec();
        faces.extend(
            fixtures::tetrahedron()
                .faces()
                .iter()
                .map(|f| f.iter().map(|v| v + 4).collect::<Vec<_>>()),
        );
        assert!(matches!(
            PlanarGraph::from_faces(&faces),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn star_walks_faces_in_order() {
        let c = fixtures::cube();
        for v in 0..c.vertex_count() {
            let star = c.star(v);
            assert_eq!(star.len(), 3);
            for (i, &d) in star.iter().enumerate() {
                let next = star[(i + 1) % star.len()];
                let f = c.dart_face(d);
                // both edges lie on the face between them
                assert_eq!(c.dart_face(c.opposite(next)), f);
            }
        }
    }

    #[test]
    fn degrees_and_parity() {
        let c = fixtures::cube();
        assert!(c.degrees().iter().all(|&d| d == 3));
        assert!(c.all_degrees_odd());
        let o = fixtures::octahedron();
        assert!(o.degrees().iter().all(|&d| d == 4));
        assert!(!o.all_degrees_odd());
        let i = fixtures::icosahedron();
        assert!(i.degrees().iter().all(|&d| d == 5));
        assert!(i.all_degrees_odd());
    }

    #[test]
    fn cube_is_polyhedral() {
        let r = fixtures::cube().validate();
        assert!(r.euler_ok && r.simple_ok && r.polyhedral);
        assert_eq!(r.connectivity, 3);
    }

    #[test]
    fn path_is_not_polyhedral() {
        let path = PlanarGraph::from_faces(&[vec![0, 1, 2, 1]]).unwrap();
        let r = path.validate();
        assert!(r.connectivity < 3);
        assert!(!r.polyhedral);
    }

    #[test]
    fn subdivided_cube_edge_has_connectivity_two() {
        let g = fixtures::subdivide_edge(&fixtures::cube(), 0);
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.validate().connectivity, 2);
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let d = fixtures::cube().dual();
        let g = &d.graph;
        assert_eq!((g.vertex_count(), g.edge_count(), g.face_count()), (6, 12, 8));
        assert!(is_isomorphic(g, &fixtures::octahedron()));
    }

    #[test]
    fn tetrahedron_is_self_dual() {
        let t = fixtures::tetrahedron();
        assert!(is_isomorphic(&t.dual().graph, &t));
    }

    #[test]
    fn dodecahedron_dual_is_icosahedron() {
        let d = fixtures::dodecahedron().dual().graph;
        assert_eq!((d.vertex_count(), d.edge_count(), d.face_count()), (12, 30, 20));
        let mut hist = BTreeMap::new();
        for f in d.faces() {
            *hist.entry(f.len()).or_insert(0) += 1;
        }
        assert_eq!(hist, BTreeMap::from([(3, 20)]));
        assert!(is_isomorphic(&d, &fixtures::icosahedron()));
    }

    #[test]
    fn double_dual_keeps_edge_correspondence() {
        for g in fixtures::platonic_solids().into_iter().map(|(_, g)| g) {
            let d1 = g.dual();
            let d2 = d1.graph.dual();
            // vertex v of the double dual is vertex v of g
            assert_eq!(d2.graph.faces().len(), g.faces().len());
            for e in 0..g.edge_count() {
                let back = d2.edge_map[d1.edge_map[e]];
                let [a, b] = d2.graph.edge(back);
                assert_eq!([a, b], g.edge(e));
            }
            assert!(map_isomorphism(&d2.graph, &g).is_some());
        }
    }

    #[test]
    fn json_round_trip() {
        let c = fixtures::cube();
        let text = GraphFile::from_graph(&c).to_json();
        let back = GraphFile::parse(&text).unwrap();
        assert_eq!(back, c);
    }
}
