use std::collections::BTreeSet;

use nalgebra::Vector3;
use polyscribe::circuits::{enumerate_simple_cycles, prismatic_circuits, CycleLimits};
use polyscribe::derived::{rectify, truncate};
use polyscribe::fixtures::{self, hull_faces};
use polyscribe::graph::{is_isomorphic, GraphFile};
use polyscribe::PlanarGraph;
use proptest::prelude::*;

/// Prismatic circuits by checking every edge subset: the dual edges must form
/// one connected 2-regular subgraph that is not the boundary of a dual face.
fn brute_force_prismatic(g: &PlanarGraph) -> BTreeSet<Vec<usize>> {
    let m = g.edge_count();
    assert!(m <= 16);
    let mut facial = BTreeSet::new();
    for v in 0..g.vertex_count() {
        let mut es: Vec<usize> = g.star(v).iter().map(|&d| g.dart_edge(d)).collect();
        es.sort_unstable();
        facial.insert(es);
    }
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() < 3 {
            continue;
        }
        let edges: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
        // dual edge of e joins the two faces on either side of e
        let mut deg = vec![0; g.face_count()];
        for &e in &edges {
            for f in g.edge_faces(e) {
                deg[f] += 1;
            }
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        // connectivity of the dual subgraph
        let mut seen = vec![false; g.face_count()];
        let start = g.edge_faces(edges[0])[0];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for &e in &edges {
                let [a, b] = g.edge_faces(e);
                for (x, y) in [(a, b), (b, a)] {
                    if x == f && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        let used = deg.iter().filter(|&&d| d > 0).count();
        if seen.iter().filter(|&&s| s).count() != used {
            continue;
        }
        if !facial.contains(&edges) {
            out.insert(edges);
        }
    }
    out
}

#[test]
fn prismatic_enumeration_matches_subset_oracle() {
    for name in ["tetrahedron", "triangular-prism", "square-pyramid", "cube", "octahedron"] {
        let g = fixtures::by_name(name).unwrap();
        assert!(g.edge_count() <= 12);
        let found: BTreeSet<Vec<usize>> = prismatic_circuits(&g, CycleLimits::default())
            .unwrap()
            .into_iter()
            .map(|c| c.edges)
            .collect();
        assert_eq!(found, brute_force_prismatic(&g), "{name}");
    }
}

#[test]
fn figure_graph_prismatic_matches_oracle() {
    let g = fixtures::truncated_cube_one_corner();
    let found: BTreeSet<Vec<usize>> = prismatic_circuits(&g, CycleLimits::default())
        .unwrap()
        .into_iter()
        .map(|c| c.edges)
        .collect();
    assert_eq!(found, brute_force_prismatic(&g));
}

fn random_polyhedron() -> impl Strategy<Value = PlanarGraph> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 5..11).prop_filter_map(
        "degenerate sample",
        |raw| {
            let pts: Vec<Vector3<f64>> = raw
                .into_iter()
                .map(|(x, y, z)| Vector3::new(x, y, z))
                .filter(|p| p.norm() > 0.2)
                .map(|p| p.normalize())
                .collect();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if (pts[i] - pts[j]).norm() < 0.15 {
                        return None;
                    }
                }
            }
            if pts.len() < 4 {
                return None;
            }
            let g = PlanarGraph::from_faces(&hull_faces(&pts)).ok()?;
            (g.vertex_count() == pts.len()).then_some(g)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn degree_sum_and_euler(g in random_polyhedron()) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        prop_assert_eq!(g.euler_characteristic(), 2);
        prop_assert!(g.validate().polyhedral);
    }

    #[test]
    fn dual_is_an_involution(g in random_polyhedron()) {
        let d = g.dual();
        prop_assert_eq!(d.graph.edge_count(), g.edge_count());
        prop_assert_eq!(d.graph.vertex_count(), g.face_count());
        prop_assert!(is_isomorphic(&d.graph.dual().graph, &g));
    }

    #[test]
    fn face_list_round_trip(g in random_polyhedron()) {
        let text = GraphFile::from_graph(&g).to_json();
        let back = GraphFile::parse(&text).unwrap();
        prop_assert!(is_isomorphic(&back, &g));
    }

    #[test]
    fn derived_counts(g in random_polyhedron()) {
        let (v, e, f) = (g.vertex_count(), g.edge_count(), g.face_count());
        let t = truncate(&g).unwrap();
        prop_assert_eq!((t.graph.vertex_count(), t.graph.edge_count(), t.graph.face_count()), (2 * e, 3 * e, f + v));
        prop_assert!(t.graph.degrees().iter().all(|&d| d == 3));
        let r = rectify(&g).unwrap();
        prop_assert_eq!((r.graph.vertex_count(), r.graph.edge_count(), r.graph.face_count()), (e, 2 * e, v + f));
        prop_assert!(r.graph.degrees().iter().all(|&d| d == 4));
        prop_assert!(is_isomorphic(&r.graph, &rectify(&g.dual().graph).unwrap().graph));
    }

    #[test]
    fn prismatic_circuits_are_simple_and_non_facial(g in random_polyhedron()) {
        let dual = g.dual();
        let circuits = prismatic_circuits(&g, CycleLimits::up_to(6)).unwrap();
        for c in &circuits {
            let mut vs = c.dual_cycle.clone();
            vs.sort_unstable();
            vs.dedup();
            prop_assert_eq!(vs.len(), c.length);
            prop_assert!(c.length >= 3);
            let mut es = c.edges.clone();
            es.dedup();
            prop_assert_eq!(es.len(), c.length);
        }
        // facial cycles of the dual are exactly the vertex stars and are excluded
        let all = enumerate_simple_cycles(&dual.graph, CycleLimits::up_to(6)).unwrap();
        let facial = all.len() - circuits.len();
        let short_faces = (0..g.vertex_count()).filter(|&v| g.degree(v) <= 6).count();
        prop_assert_eq!(facial, short_faces);
    }
}
