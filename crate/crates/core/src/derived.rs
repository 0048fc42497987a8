//! Truncated and rectified graphs of a polyhedral graph.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{DartId, EdgeId, FaceId, GraphFile, PlanarGraph, VertexId};

/// Skeleton of the polyhedron with every vertex cut off.
///
/// Vertex `d` of the truncated graph sits on edge `dart_edge(d)` next to
/// `tail(d)`, so new vertices are indexed by darts of the original graph.
/// Faces `0..F` are the ordinary faces (same index as in the original),
/// faces `F + v` are the special faces cut at vertex `v`.
#[derive(Debug, Clone)]
pub struct TruncatedGraph {
    pub graph: PlanarGraph,
    /// `ordinary_edges[e]` is the truncated edge that remains of edge `e`.
    pub ordinary_edges: Vec<EdgeId>,
    pub special_edges: Vec<EdgeId>,
    /// `special_faces[v]` is the face created at vertex `v`.
    pub special_faces: Vec<FaceId>,
    /// `vertex_origin[d]` is the vertex near `tail(d)` on `dart_edge(d)`.
    pub vertex_origin: Vec<VertexId>,
    pub original_vertex_count: usize,
    pub original_face_count: usize,
}

impl TruncatedGraph {
    pub fn is_special_face(&self, f: FaceId) -> bool {
        f >= self.original_face_count
    }

    pub fn is_ordinary_edge(&self, e: EdgeId) -> bool {
        self.ordinary_edges.contains(&e)
    }

    /// Original (vertex, edge) incidence behind a truncated vertex.
    pub fn corner_origin(&self, g: &PlanarGraph, vertex: VertexId) -> (VertexId, EdgeId) {
        let d: DartId = vertex;
        (g.tail(d), g.dart_edge(d))
    }

    pub fn to_file(&self) -> GraphFile {
        let mut file = GraphFile::from_graph(&self.graph);
        file.origin = Some(serde_json::json!({
            "kind": "truncated",
            "ordinary_edges": self.ordinary_edges,
            "special_edges": self.special_edges,
            "special_faces": self.special_faces,
        }));
        file
    }
}

/// What a face of the rectified graph comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "id")]
pub enum FaceOrigin {
    Face(FaceId),
    Vertex(VertexId),
}

/// Rectified graph: one vertex per original edge (same index), faces
/// `0..F` from original faces and `F + v` from original vertices.
#[derive(Debug, Clone)]
pub struct RectifiedGraph {
    pub graph: PlanarGraph,
    pub face_origin: Vec<FaceOrigin>,
    pub original_face_count: usize,
}

impl RectifiedGraph {
    /// Vertex of the rectified graph standing for edge `e`.
    pub fn vertex_of_edge(&self, e: EdgeId) -> VertexId {
        e
    }

    pub fn to_file(&self) -> GraphFile {
        let mut file = GraphFile::from_graph(&self.graph);
        file.origin = Some(serde_json::json!({
            "kind": "rectified",
            "faces": self.face_origin,
        }));
        file
    }
}

pub fn truncate(g: &PlanarGraph) -> Result<TruncatedGraph> {
    g.require_polyhedral()?;
    let mut faces: Vec<Vec<VertexId>> = Vec::with_capacity(g.face_count() + g.vertex_count());
    for f in 0..g.face_count() {
        let mut ring = Vec::new();
        for d in g.face_darts(f) {
            ring.push(d);
            ring.push(g.opposite(d));
        }
        faces.push(ring);
    }
    for v in 0..g.vertex_count() {
        faces.push(g.star(v));
    }
    let graph = PlanarGraph::from_faces(&faces)?;
    let ordinary_edges: Vec<EdgeId> = (0..g.edge_count())
        .map(|e| graph.edge_between(2 * e, 2 * e + 1).expect("ordinary edge"))
        .collect();
    let mut special_edges: Vec<EdgeId> = (0..graph.edge_count())
        .filter(|e| !ordinary_edges.contains(e))
        .collect();
    special_edges.sort_unstable();
    Ok(TruncatedGraph {
        graph,
        ordinary_edges,
        special_edges,
        special_faces: (0..g.vertex_count()).map(|v| g.face_count() + v).collect(),
        vertex_origin: g.darts().collect(),
        original_vertex_count: g.vertex_count(),
        original_face_count: g.face_count(),
    })
}

pub fn rectify(g: &PlanarGraph) -> Result<RectifiedGraph> {
    g.require_polyhedral()?;
    let mut faces: Vec<Vec<VertexId>> = Vec::with_capacity(g.face_count() + g.vertex_count());
    let mut face_origin = Vec::with_capacity(faces.capacity());
    for f in 0..g.face_count() {
        faces.push(g.face_darts(f).into_iter().map(|d| g.dart_edge(d)).collect());
        face_origin.push(FaceOrigin::Face(f));
    }
    for v in 0..g.vertex_count() {
        faces.push(g.star(v).into_iter().map(|d| g.dart_edge(d)).collect());
        face_origin.push(FaceOrigin::Vertex(v));
    }
    Ok(RectifiedGraph {
        graph: PlanarGraph::from_faces(&faces)?,
        face_origin,
        original_face_count: g.face_count(),
    })
}
