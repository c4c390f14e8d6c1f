//! Seeded random connected plane graphs for tests and demos.
//!
//! Construction: grow a triangulation by repeatedly dropping a fresh vertex
//! into a random face and joining it to that face's three corners, then
//! delete random non-bridge edges. Both steps preserve connectivity and a
//! valid embedding, so every output satisfies Euler's formula.

use crate::builtins::plane_graph_from_faces;
use crate::graph::{Graph, PlaneGraph, RotationSystem, VertexId};
use crate::reducibility::ForbiddenFamily;
use crate::rng::Stream;

/// Random plane triangulation on `n >= 3` vertices (ids 0..n).
pub fn random_triangulation(n: usize, rng: &mut Stream) -> PlaneGraph {
    assert!(n >= 3, "a triangulation needs at least 3 vertices");
    // Oriented triangle walks; every directed edge on exactly one walk.
    let mut faces: Vec<[VertexId; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for w in 3..n as VertexId {
        let [a, b, c] = faces.swap_remove(rng.below(faces.len()));
        faces.extend([[a, b, w], [b, c, w], [c, a, w]]);
    }
    plane_graph_from_faces(&faces.iter().map(|f| f.to_vec()).collect::<Vec<_>>())
}

/// The same graph without the edge `u v`; rotations keep their cyclic
/// order. Panics if the edge is absent.
pub fn delete_edge(pg: &PlaneGraph, u: VertexId, v: VertexId) -> PlaneGraph {
    assert!(pg.graph.has_edge(u, v), "edge {u} {v} not present");
    let mut graph = Graph::new();
    for w in pg.graph.vertices() {
        graph.add_vertex(w);
    }
    for (a, b) in pg.graph.edges() {
        if (a, b) != (u.min(v), u.max(v)) {
            graph.add_edge(a, b).unwrap();
        }
    }
    let mut order = std::collections::BTreeMap::new();
    for w in pg.graph.vertices() {
        let keep: Vec<VertexId> = pg
            .rotation
            .order_at(w)
            .iter()
            .copied()
            .filter(|&x| !((w == u && x == v) || (w == v && x == u)))
            .collect();
        order.insert(w, keep);
    }
    PlaneGraph::new(graph, RotationSystem::new(order)).expect("deletion keeps a valid rotation")
}

fn removable_edges(pg: &PlaneGraph) -> Vec<(VertexId, VertexId)> {
    pg.graph
        .edges()
        .into_iter()
        .filter(|&(u, v)| delete_edge(pg, u, v).graph.is_connected())
        .collect()
}

/// Triangulation on `n` vertices followed by up to `deletions` random
/// non-bridge edge removals (fewer if the graph runs out of cycles).
pub fn random_plane_graph(n: usize, deletions: usize, rng: &mut Stream) -> PlaneGraph {
    let mut pg = random_triangulation(n, rng);
    for _ in 0..deletions {
        let candidates = removable_edges(&pg);
        if candidates.is_empty() {
            break;
        }
        let &(u, v) = rng.choose(&candidates);
        pg = delete_edge(&pg, u, v);
    }
    pg
}

/// Connected plane graph avoiding `family`: start from a random plane
/// graph, then repeatedly delete a random cycle edge inside a violation
/// witness until no violation remains. Terminates because the edge count
/// strictly decreases and trees violate nothing.
pub fn random_family_free(
    n: usize,
    deletions: usize,
    family: &ForbiddenFamily,
    rng: &mut Stream,
) -> PlaneGraph {
    let mut pg = random_plane_graph(n, deletions, rng);
    while let Some(violation) = family.violation(&pg.graph) {
        let witness = violation.witness;
        let candidates: Vec<(VertexId, VertexId)> = removable_edges(&pg)
            .into_iter()
            .filter(|&(u, v)| witness.contains(&u) && witness.contains(&v))
            .collect();
        assert!(!candidates.is_empty(), "violation witness must contain a cycle edge");
        let &(u, v) = rng.choose(&candidates);
        pg = delete_edge(&pg, u, v);
    }
    pg
}
