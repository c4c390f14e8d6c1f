//! Simple graphs with optional combinatorial embeddings.
//!
//! Vertices are arbitrary `u32` ids (files choose them; nothing assumes they
//! are contiguous). Edges are unordered pairs; loops and parallel edges are
//! rejected at construction. An embedding is a rotation system: the cyclic
//! order of neighbors around each vertex. Faces are closed walks of directed
//! edges recovered from the rotation by next-edge traversal, so cut edges
//! appear twice on the same face walk and lengths count traversals.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at vertex {0} is not allowed")]
    Loop(VertexId),
    #[error("parallel edge {0}-{1} is not allowed")]
    ParallelEdge(VertexId, VertexId),
    #[error("edge references unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("rotation at vertex {0} does not list its neighbors exactly once each")]
    BadRotation(VertexId),
    #[error("rotation system covers a different vertex set than the graph")]
    RotationVertexMismatch,
}

/// Simple undirected graph. Iteration order over vertices and neighbors is
/// always ascending by id, which keeps every derived report deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn from_edges(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
        let mut g = Graph::new();
        for &v in vertices {
            g.add_vertex(v);
        }
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Path along the given vertex sequence.
    pub fn path(ids: &[VertexId]) -> Graph {
        let edges: Vec<_> = ids.windows(2).map(|w| (w[0], w[1])).collect();
        Graph::from_edges(ids, &edges).expect("path construction")
    }

    /// Cycle through the given vertex sequence.
    pub fn cycle(ids: &[VertexId]) -> Graph {
        assert!(ids.len() >= 3, "a cycle needs at least 3 vertices");
        let mut edges: Vec<_> = ids.windows(2).map(|w| (w[0], w[1])).collect();
        edges.push((*ids.last().unwrap(), ids[0]));
        Graph::from_edges(ids, &edges).expect("cycle construction")
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::Loop(u));
        }
        if !self.adj.contains_key(&u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.adj.contains_key(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if self.adj[&u].contains(&v) {
            return Err(GraphError::ParallelEdge(u, v));
        }
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.adj.keys().copied().collect()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.m());
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Subgraph induced on `keep` (ids absent from the graph are ignored).
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for &v in keep {
            if self.has_vertex(v) {
                g.add_vertex(v);
            }
        }
        for (&u, nbrs) in &self.adj {
            if !keep.contains(&u) {
                continue;
            }
            for &v in nbrs {
                if u < v && keep.contains(&v) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    pub fn without_vertices(&self, drop: &BTreeSet<VertexId>) -> Graph {
        let keep: BTreeSet<_> = self.vertices().filter(|v| !drop.contains(v)).collect();
        self.induced(&keep)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([v]);
            seen.insert(v);
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for w in self.neighbors(u) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// BFS distance between two vertex sets: 0 if they intersect, None if no
    /// path connects them.
    pub fn set_distance(&self, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> Option<usize> {
        if a.is_empty() || b.is_empty() {
            return None;
        }
        if a.intersection(b).next().is_some() {
            return Some(0);
        }
        let mut dist: BTreeMap<VertexId, usize> = a.iter().map(|&v| (v, 0)).collect();
        let mut queue: VecDeque<VertexId> = a.iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            for w in self.neighbors(u) {
                if !dist.contains_key(&w) {
                    if b.contains(&w) {
                        return Some(du + 1);
                    }
                    dist.insert(w, du + 1);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// All triangles as sorted vertex triples, in lexicographic order.
    pub fn triangles(&self) -> Vec<[VertexId; 3]> {
        let mut out = Vec::new();
        for (&u, nbrs) in &self.adj {
            for &v in nbrs.range((u + 1)..) {
                for &w in self.adj[&v].range((v + 1)..) {
                    if nbrs.contains(&w) {
                        out.push([u, v, w]);
                    }
                }
            }
        }
        out
    }

    /// Degeneracy with its witnessing elimination order: repeatedly delete a
    /// minimum-degree vertex (smallest id on ties); the degeneracy is the
    /// largest degree seen at deletion time.
    pub fn degeneracy(&self) -> (usize, Vec<VertexId>) {
        let mut deg: BTreeMap<VertexId, usize> =
            self.adj.iter().map(|(&v, s)| (v, s.len())).collect();
        let mut alive: BTreeSet<VertexId> = self.vertex_set();
        let mut order = Vec::with_capacity(self.n());
        let mut d = 0;
        while !alive.is_empty() {
            let &v = alive
                .iter()
                .min_by_key(|&&v| (deg[&v], v))
                .expect("nonempty");
            d = d.max(deg[&v]);
            alive.remove(&v);
            order.push(v);
            for w in self.neighbors(v) {
                if alive.contains(&w) {
                    *deg.get_mut(&w).unwrap() -= 1;
                }
            }
        }
        (d, order)
    }
}

/// Cyclic neighbor order around each vertex. Which direction is "clockwise"
/// is a global convention; faces only need the orders to be mutually
/// consistent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RotationSystem {
    order: BTreeMap<VertexId, Vec<VertexId>>,
}

impl RotationSystem {
    pub fn new(order: BTreeMap<VertexId, Vec<VertexId>>) -> RotationSystem {
        RotationSystem { order }
    }

    /// Rotation listing each vertex's neighbors in ascending order. Only a
    /// placeholder embedding, but a valid input for face tracing.
    pub fn sorted(graph: &Graph) -> RotationSystem {
        RotationSystem {
            order: graph
                .vertices()
                .map(|v| (v, graph.neighbors(v).collect()))
                .collect(),
        }
    }

    pub fn order_at(&self, v: VertexId) -> &[VertexId] {
        self.order.get(&v).map_or(&[], |o| o.as_slice())
    }

    /// The neighbor following `u` in the cyclic order at `v`.
    pub fn successor(&self, v: VertexId, u: VertexId) -> Option<VertexId> {
        let ord = self.order.get(&v)?;
        let i = ord.iter().position(|&x| x == u)?;
        Some(ord[(i + 1) % ord.len()])
    }

    pub fn validate(&self, graph: &Graph) -> Result<(), GraphError> {
        if self.order.len() != graph.n() || !self.order.keys().all(|v| graph.has_vertex(*v)) {
            return Err(GraphError::RotationVertexMismatch);
        }
        for (&v, ord) in &self.order {
            let as_set: BTreeSet<_> = ord.iter().copied().collect();
            let nbrs: BTreeSet<_> = graph.neighbors(v).collect();
            if as_set != nbrs || ord.len() != nbrs.len() {
                return Err(GraphError::BadRotation(v));
            }
        }
        Ok(())
    }
}

/// One face: the closed walk of vertices it traverses. `walk[i] ->
/// walk[i+1]` (cyclically) are its directed edges; a cut edge contributes
/// both directions to the same face, so vertices may repeat and `len` counts
/// edge traversals, not distinct edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub walk: Vec<VertexId>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    /// Distinct vertices on the walk.
    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.walk.iter().copied().collect()
    }

    /// How many times the walk visits `v`.
    pub fn incidences(&self, v: VertexId) -> usize {
        self.walk.iter().filter(|&&x| x == v).count()
    }

    /// Rotate the cyclic walk so it starts at its lexicographically smallest
    /// (vertex, next-vertex) pair; gives every face one canonical spelling.
    fn canonicalize(&mut self) {
        let n = self.walk.len();
        if n == 0 {
            return;
        }
        let key = |i: usize| (self.walk[i], self.walk[(i + 1) % n]);
        let best = (0..n).min_by_key(|&i| key(i)).unwrap();
        self.walk.rotate_left(best);
    }
}

/// A graph together with a validated rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    pub graph: Graph,
    pub rotation: RotationSystem,
}

impl PlaneGraph {
    pub fn new(graph: Graph, rotation: RotationSystem) -> Result<PlaneGraph, GraphError> {
        rotation.validate(&graph)?;
        Ok(PlaneGraph { graph, rotation })
    }

    /// Graph with the placeholder sorted rotation (for inputs whose neighbor
    /// order carries no geometric meaning).
    pub fn with_sorted_rotation(graph: Graph) -> PlaneGraph {
        let rotation = RotationSystem::sorted(&graph);
        PlaneGraph { graph, rotation }
    }

    /// Trace all faces: the successor of directed edge (u, v) is (v, w)
    /// where w follows u in the rotation at v. Faces come out sorted by
    /// their canonical walks. Isolated vertices contribute no faces.
    pub fn faces(&self) -> Vec<Face> {
        let mut pending: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for (u, v) in self.graph.edges() {
            pending.insert((u, v));
            pending.insert((v, u));
        }
        let mut out = Vec::new();
        while let Some(&start) = pending.iter().next() {
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                pending.remove(&cur);
                walk.push(cur.0);
                let (u, v) = cur;
                let w = self
                    .rotation
                    .successor(v, u)
                    .expect("validated rotation has successors for all edges");
                cur = (v, w);
                if cur == start {
                    break;
                }
            }
            let mut face = Face { walk };
            face.canonicalize();
            out.push(face);
        }
        out.sort();
        out
    }

    /// V - E + F. Equals 2 exactly for a connected plane embedding.
    pub fn euler_characteristic(&self) -> i64 {
        self.graph.n() as i64 - self.graph.m() as i64 + self.faces().len() as i64
    }

    pub fn is_plane_embedding(&self) -> bool {
        self.graph.n() > 0 && self.graph.is_connected() && self.euler_characteristic() == 2
    }
}
