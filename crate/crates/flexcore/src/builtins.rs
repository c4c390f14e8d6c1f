//! Bundled combinatorial data: the named polyhedra used by tests and the
//! CLI corpus, plus plane-graph constructions (dual, medial, truncation)
//! that derive the bigger ones from hand-entered face tables.
//!
//! Later sections add the built-in forbidden families and a corpus of
//! reducible configurations; the built-in template libraries and charge
//! specifications live with their machinery in `resolution` and
//! `discharging`.

use crate::graph::{Graph, PlaneGraph, RotationSystem, VertexId};
use crate::reducibility::{Configuration, FamilyPredicate, ForbiddenFamily};
use std::collections::{BTreeMap, BTreeSet};

/// Build an embedded graph from consistently oriented face walks: every
/// directed edge must appear on exactly one walk. The rotation at v is read
/// off the fragments u -> v -> w (w follows u around v). Panics on
/// inconsistent tables — inputs are fixed data, not user files.
pub fn plane_graph_from_faces(faces: &[Vec<VertexId>]) -> PlaneGraph {
    let mut succ: BTreeMap<VertexId, BTreeMap<VertexId, VertexId>> = BTreeMap::new();
    let mut graph = Graph::new();
    for walk in faces {
        assert!(walk.len() >= 2, "face walk too short");
        for &v in walk {
            graph.add_vertex(v);
        }
        for i in 0..walk.len() {
            let u = walk[i];
            let v = walk[(i + 1) % walk.len()];
            let w = walk[(i + 2) % walk.len()];
            assert_ne!(u, v, "face walk repeats a vertex consecutively");
            let prev = succ.entry(v).or_default().insert(u, w);
            assert!(prev.is_none(), "directed edge {u}->{v} appears on two walks");
            if !graph.has_edge(u, v) {
                graph.add_edge(u, v).expect("face data forms a simple graph");
            }
        }
    }
    let mut order = BTreeMap::new();
    for v in graph.vertices() {
        let nbrs: BTreeSet<VertexId> = graph.neighbors(v).collect();
        let map = succ.get(&v).expect("every vertex lies on a face");
        let start = *nbrs.iter().next().expect("no isolated vertices in face data");
        let mut cycle = vec![start];
        let mut cur = start;
        loop {
            cur = *map.get(&cur).expect("rotation successor defined");
            if cur == start {
                break;
            }
            cycle.push(cur);
            assert!(cycle.len() <= nbrs.len(), "rotation at {v} is not a single cycle");
        }
        assert_eq!(cycle.len(), nbrs.len(), "rotation at {v} misses neighbors");
        order.insert(v, cycle);
    }
    let pg = PlaneGraph::new(graph, RotationSystem::new(order)).expect("valid rotation");
    assert_eq!(pg.faces().len(), faces.len(), "face table inconsistent with tracing");
    pg
}

/// Dual plane graph: one vertex per face, adjacent when faces share an
/// edge. Requires the dual to be simple (true for 3-connected polyhedra).
pub fn dual(pg: &PlaneGraph) -> PlaneGraph {
    let faces = pg.faces();
    let mut side: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    for (idx, f) in faces.iter().enumerate() {
        for i in 0..f.walk.len() {
            let u = f.walk[i];
            let v = f.walk[(i + 1) % f.walk.len()];
            side.insert((u, v), idx as u32);
        }
    }
    // Faces of the dual sit around original vertices: at v, walk the faces
    // containing each directed edge (v, n) with n in rotation order.
    let dual_faces: Vec<Vec<VertexId>> = pg
        .graph
        .vertices()
        .map(|v| pg.rotation.order_at(v).iter().map(|&n| side[&(v, n)]).collect())
        .collect();
    plane_graph_from_faces(&dual_faces)
}

/// Medial plane graph: one vertex per edge, adjacent when two edges are
/// consecutive around a common face corner. Faces of the medial are the
/// original faces (walks of their edge midpoints) plus one reversed walk
/// around each original vertex.
pub fn medial(pg: &PlaneGraph) -> PlaneGraph {
    let edges = pg.graph.edges();
    let edge_id: BTreeMap<(VertexId, VertexId), u32> = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| ((u, v), i as u32))
        .collect();
    let id = |u: VertexId, v: VertexId| edge_id[&(u.min(v), u.max(v))];
    let mut walks: Vec<Vec<VertexId>> = Vec::new();
    for f in pg.faces() {
        let n = f.walk.len();
        walks.push((0..n).map(|i| id(f.walk[i], f.walk[(i + 1) % n])).collect());
    }
    for v in pg.graph.vertices() {
        let ord = pg.rotation.order_at(v);
        walks.push(ord.iter().rev().map(|&u| id(v, u)).collect());
    }
    plane_graph_from_faces(&walks)
}

/// Vertex truncation: one vertex per (vertex, incident edge) corner; corner
/// polygons replace vertices and original faces double in length.
pub fn truncate(pg: &PlaneGraph) -> PlaneGraph {
    let mut corner_id: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    let mut next = 0u32;
    for v in pg.graph.vertices() {
        for &u in pg.rotation.order_at(v) {
            corner_id.insert((v, u), next);
            next += 1;
        }
    }
    let mut walks: Vec<Vec<VertexId>> = Vec::new();
    for f in pg.faces() {
        let n = f.walk.len();
        let mut w = Vec::with_capacity(2 * n);
        for i in 0..n {
            let prev = f.walk[(i + n - 1) % n];
            let v = f.walk[i];
            let nextv = f.walk[(i + 1) % n];
            w.push(corner_id[&(v, prev)]);
            w.push(corner_id[&(v, nextv)]);
        }
        walks.push(w);
    }
    for v in pg.graph.vertices() {
        let ord = pg.rotation.order_at(v);
        walks.push(ord.iter().rev().map(|&u| corner_id[&(v, u)]).collect());
    }
    plane_graph_from_faces(&walks)
}

/// Cube with its standard embedding: bottom 0-3, top 4-7, vertical edges
/// i to i+4.
pub fn cube() -> PlaneGraph {
    plane_graph_from_faces(&[
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ])
}

/// Icosahedron: pole 0, upper pentagon 1-5, lower pentagon 6-10, pole 11.
pub fn icosahedron() -> PlaneGraph {
    let u = |i: usize| 1 + (i % 5) as VertexId;
    let l = |i: usize| 6 + (i % 5) as VertexId;
    let mut faces = Vec::with_capacity(20);
    for i in 0..5 {
        faces.push(vec![0, u(i), u(i + 1)]);
        faces.push(vec![u(i + 1), u(i), l(i)]);
        faces.push(vec![l(i), l(i + 1), u(i + 1)]);
        faces.push(vec![11, l(i + 1), l(i)]);
    }
    plane_graph_from_faces(&faces)
}

/// Dodecahedron: the dual of the icosahedron (12 pentagonal faces,
/// 3-regular on 20 vertices).
pub fn dodecahedron() -> PlaneGraph {
    dual(&icosahedron())
}

/// Icosidodecahedron: the medial of the icosahedron (4-regular on 30
/// vertices; 20 triangles and 12 pentagons).
pub fn icosidodecahedron() -> PlaneGraph {
    medial(&icosahedron())
}

/// Truncated cube: 3-regular on 24 vertices; 8 triangles and 6 octagons.
pub fn truncated_cube() -> PlaneGraph {
    truncate(&cube())
}

/// Petersen graph (no meaningful embedding; rotation is the sorted
/// placeholder). Outer cycle 0-4, spokes to 5-9, inner 5-step-2 cycle.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    let vertices: Vec<VertexId> = (0..10).collect();
    Graph::from_edges(&vertices, &edges).unwrap()
}

// ---------------------------------------------------------------------------
// Forbidden-subgraph patterns and the named families built from them.

/// K4 minus an edge: two triangles sharing an edge.
pub fn diamond() -> Graph {
    Graph::from_edges(&[0, 1, 2, 3], &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// A 4-cycle 0-1-2-3 with an apex 4 over the edge 2-3.
pub fn house() -> Graph {
    Graph::from_edges(&[0, 1, 2, 3, 4], &[(0, 1), (0, 3), (1, 2), (2, 3), (2, 4), (3, 4)])
        .unwrap()
}

/// Complete bipartite K_{2,3}: parts {0,1} and {2,3,4}.
pub fn two_three_biclique() -> Graph {
    Graph::from_edges(&[0, 1, 2, 3, 4], &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
        .unwrap()
}

fn cycle_pattern(len: u32) -> (String, Graph) {
    let ids: Vec<VertexId> = (0..len).collect();
    (format!("c{len}"), Graph::cycle(&ids))
}

/// No K4-minus-an-edge anywhere.
pub fn family_diamond() -> ForbiddenFamily {
    ForbiddenFamily::new("diamond", vec![("diamond".into(), diamond())], vec![])
}

/// No 4-cycles.
pub fn family_squares() -> ForbiddenFamily {
    ForbiddenFamily::new("c4", vec![cycle_pattern(4)], vec![])
}

/// No 4- or 5-cycles.
pub fn family_squares_pentagons() -> ForbiddenFamily {
    ForbiddenFamily::new("c4+c5", vec![cycle_pattern(4), cycle_pattern(5)], vec![])
}

/// No cycles of length 4, 5, or 6.
pub fn family_short_cycles() -> ForbiddenFamily {
    ForbiddenFamily::new("c4+c5+c6", vec![cycle_pattern(4), cycle_pattern(5), cycle_pattern(6)], vec![])
}

/// No 4-cycles, and no two triangles within distance 1 of each other.
pub fn family_squares_near_triangles() -> ForbiddenFamily {
    ForbiddenFamily::new(
        "c4+near-triangles",
        vec![cycle_pattern(4)],
        vec![FamilyPredicate::TrianglesWithinDistance(1)],
    )
}

/// No house subgraph.
pub fn family_house() -> ForbiddenFamily {
    ForbiddenFamily::new("house", vec![("house".into(), house())], vec![])
}

/// Neither a house nor a K_{2,3}.
pub fn family_house_biclique() -> ForbiddenFamily {
    ForbiddenFamily::new(
        "house+k23",
        vec![("house".into(), house()), ("k23".into(), two_three_biclique())],
        vec![],
    )
}

/// The built-in family registered under `name`, or `None` for an unknown
/// one. Names are the ones the builders above use, plus `none`.
pub fn builtin_family(name: &str) -> Option<ForbiddenFamily> {
    match name {
        "none" => Some(ForbiddenFamily::none()),
        "diamond" => Some(family_diamond()),
        "c4" => Some(family_squares()),
        "c4+c5" => Some(family_squares_pentagons()),
        "c4+c5+c6" => Some(family_short_cycles()),
        "c4+near-triangles" => Some(family_squares_near_triangles()),
        "house" => Some(family_house()),
        "house+k23" => Some(family_house_biclique()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Bundled reducibility corpus: small configurations whose verdicts the test
// suite pins down exactly.

/// One corpus configuration together with the verdict it must produce.
#[derive(Debug, Clone)]
pub struct ReducibleCase {
    pub name: String,
    pub k: u32,
    pub config: Configuration,
    pub family: ForbiddenFamily,
    pub expect_strong: bool,
    pub expect_weak: bool,
    /// Exact expected fix set (all cores when strong).
    pub expect_fix: Vec<VertexId>,
}

fn config(
    vertices: &[VertexId],
    edges: &[(VertexId, VertexId)],
    boundary: &[VertexId],
    host: &[(VertexId, u32)],
    fix: Option<&[VertexId]>,
) -> Configuration {
    Configuration::new(
        Graph::from_edges(vertices, edges).unwrap(),
        boundary.iter().copied().collect(),
        host.iter().copied().collect(),
        fix.map(|f| f.iter().copied().collect()),
    )
    .unwrap()
}

/// A single vertex whose host degree leaves two spare colors.
fn light_vertex(k: u32) -> ReducibleCase {
    ReducibleCase {
        name: format!("light-vertex-k{k}"),
        k,
        config: config(&[0], &[], &[], &[(0, k - 2)], None),
        family: ForbiddenFamily::none(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0],
    }
}

/// Triangle with two near-saturated vertices; the third is boundary.
fn tight_triangle(k: u32) -> ReducibleCase {
    ReducibleCase {
        name: format!("tight-triangle-k{k}"),
        k,
        config: config(
            &[0, 1, 2],
            &[(0, 1), (0, 2), (1, 2)],
            &[2],
            &[(0, k - 1), (1, k - 1)],
            None,
        ),
        family: family_diamond(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1],
    }
}

/// Path of three 3-vertices, no boundary.
fn cubic_path() -> ReducibleCase {
    ReducibleCase {
        name: "cubic-path3".into(),
        k: 4,
        config: config(&[0, 1, 2], &[(0, 1), (1, 2)], &[], &[(0, 3), (1, 3), (2, 3)], None),
        family: ForbiddenFamily::none(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1, 2],
    }
}

/// A d-vertex with d-2 cubic neighbors, sitting on a triangle whose other
/// two corners are boundary. Core ids: center 0, leaves 1..=d-2.
fn heavy_star(d: u32) -> ReducibleCase {
    let w1 = d - 1;
    let w2 = d;
    let mut vertices = vec![0];
    let mut edges = Vec::new();
    let mut host = vec![(0, d)];
    for leaf in 1..=d - 2 {
        vertices.push(leaf);
        edges.push((0, leaf));
        host.push((leaf, 3));
    }
    vertices.extend([w1, w2]);
    edges.extend([(0, w1), (0, w2), (w1, w2)]);
    ReducibleCase {
        name: format!("star-d{d}"),
        k: 4,
        config: config(&vertices, &edges, &[w1, w2], &host, None),
        family: family_squares_near_triangles(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: (0..=d - 2).collect(),
    }
}

/// Two triangles sharing a middle 4-vertex; degrees (3,4,4,3,4).
fn bowtie() -> ReducibleCase {
    ReducibleCase {
        name: "bowtie".into(),
        k: 4,
        config: config(
            &[0, 1, 2, 3, 4],
            &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)],
            &[],
            &[(0, 3), (1, 4), (2, 4), (3, 3), (4, 4)],
            None,
        ),
        family: family_squares(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1, 2, 3, 4],
    }
}

/// Two adjacent 4-vertices, each on its own otherwise-disjoint triangle
/// with degrees (3,4,4).
fn twin_triangles() -> ReducibleCase {
    ReducibleCase {
        name: "twin-triangles".into(),
        k: 4,
        config: config(
            &[0, 1, 2, 3, 4, 5],
            &[(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (3, 5), (4, 5)],
            &[],
            &[(0, 4), (1, 4), (2, 3), (3, 4), (4, 3), (5, 4)],
            None,
        ),
        family: family_squares_pentagons(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1, 2, 3, 4, 5],
    }
}

/// 4-cycle with two adjacent 4-vertices; the opposite edge is boundary.
fn heavy_pair_square() -> ReducibleCase {
    ReducibleCase {
        name: "heavy-pair-square".into(),
        k: 5,
        config: config(
            &[0, 1, 2, 3],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
            &[2, 3],
            &[(0, 4), (1, 4)],
            None,
        ),
        family: family_house(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1],
    }
}

/// 4-cycle with consecutive degrees 4,5,4; the fourth corner is boundary.
fn square_454() -> ReducibleCase {
    ReducibleCase {
        name: "square-454".into(),
        k: 5,
        config: config(
            &[0, 1, 2, 3],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
            &[3],
            &[(0, 4), (1, 5), (2, 4)],
            None,
        ),
        family: family_house_biclique(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1, 2],
    }
}

/// 4-cycle with one 4-vertex and three 5-vertices: the light corner cannot
/// be fixed, so the case is weak-only with the heavy corners fixable.
fn lopsided_square() -> ReducibleCase {
    ReducibleCase {
        name: "lopsided-square".into(),
        k: 5,
        config: config(
            &[0, 1, 2, 3],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
            &[],
            &[(0, 4), (1, 5), (2, 5), (3, 5)],
            Some(&[1, 2, 3]),
        ),
        family: family_house_biclique(),
        expect_strong: false,
        expect_weak: true,
        expect_fix: vec![1, 2, 3],
    }
}

/// Path of four 4-vertices, no boundary.
fn quartic_path() -> ReducibleCase {
    ReducibleCase {
        name: "quartic-path4".into(),
        k: 5,
        config: config(
            &[0, 1, 2, 3],
            &[(0, 1), (1, 2), (2, 3)],
            &[],
            &[(0, 4), (1, 4), (2, 4), (3, 4)],
            None,
        ),
        family: ForbiddenFamily::none(),
        expect_strong: true,
        expect_weak: true,
        expect_fix: vec![0, 1, 2, 3],
    }
}

/// Every bundled configuration, stars instantiated for degrees 4..=d_max.
pub fn reducible_corpus(d_max: u32) -> Vec<ReducibleCase> {
    let mut corpus = vec![
        light_vertex(4),
        light_vertex(5),
        tight_triangle(4),
        tight_triangle(5),
        cubic_path(),
    ];
    for d in 4..=d_max.max(4) {
        corpus.push(heavy_star(d));
    }
    corpus.extend([
        bowtie(),
        twin_triangles(),
        heavy_pair_square(),
        square_454(),
        lopsided_square(),
        quartic_path(),
    ]);
    corpus
}
