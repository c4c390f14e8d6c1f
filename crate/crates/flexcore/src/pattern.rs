//! Subgraph queries: does a host graph contain an (optionally induced) copy
//! of a small pattern, subject to host-degree bounds on pattern vertices?
//!
//! An embedding is an injective map pattern-vertex -> host-vertex carrying
//! pattern edges to host edges (and, in induced mode, pattern non-edges to
//! host non-edges). Enumeration is plain backtracking: pattern vertices in a
//! fixed connectivity-first order, host candidates in ascending id, so the
//! emission order is deterministic and the first hit is a stable witness.

use crate::graph::{Graph, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Host-degree requirement attached to a pattern vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeBound {
    Any,
    Exact(usize),
    AtLeast(usize),
    AtMost(usize),
}

impl DegreeBound {
    pub fn admits(&self, d: usize) -> bool {
        match *self {
            DegreeBound::Any => true,
            DegreeBound::Exact(x) => d == x,
            DegreeBound::AtLeast(x) => d >= x,
            DegreeBound::AtMost(x) => d <= x,
        }
    }
}

/// A small query graph; vertices without an entry in `degree` are
/// unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    pub graph: Graph,
    pub degree: BTreeMap<VertexId, DegreeBound>,
}

impl PatternGraph {
    pub fn plain(graph: Graph) -> PatternGraph {
        PatternGraph { graph, degree: BTreeMap::new() }
    }

    pub fn bound(&self, v: VertexId) -> DegreeBound {
        self.degree.get(&v).copied().unwrap_or(DegreeBound::Any)
    }
}

pub type Embedding = BTreeMap<VertexId, VertexId>;

/// Pattern vertices ordered so each one (after the first of its component)
/// touches an earlier one when possible: highest degree first, then most
/// placed neighbors, ties to the smallest id. Fixed order = deterministic
/// search tree.
fn search_order(pat: &Graph) -> Vec<VertexId> {
    let mut rest: Vec<VertexId> = pat.vertices().collect();
    let mut out: Vec<VertexId> = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let pick = *rest
            .iter()
            .max_by_key(|&&v| {
                let placed = out.iter().filter(|&&u| pat.has_edge(u, v)).count();
                (placed, pat.degree(v), std::cmp::Reverse(v))
            })
            .unwrap();
        rest.retain(|&v| v != pick);
        out.push(pick);
    }
    out
}

struct Search<'a, F: FnMut(&Embedding) -> bool> {
    host: &'a Graph,
    pat: &'a PatternGraph,
    induced: bool,
    order: Vec<VertexId>,
    /// emit returns false to stop the whole search.
    emit: F,
}

impl<F: FnMut(&Embedding) -> bool> Search<'_, F> {
    fn run(&mut self) -> bool {
        let mut partial = Embedding::new();
        self.extend(0, &mut partial)
    }

    fn extend(&mut self, depth: usize, partial: &mut Embedding) -> bool {
        if depth == self.order.len() {
            return (self.emit)(partial);
        }
        let p = self.order[depth];
        let bound = self.pat.bound(p);
        let pat_deg = self.pat.graph.degree(p);
        'cand: for h in self.host.vertices() {
            if partial.values().any(|&x| x == h) {
                continue;
            }
            if !bound.admits(self.host.degree(h)) || self.host.degree(h) < pat_deg {
                continue;
            }
            for (&q, &hq) in partial.iter() {
                let pe = self.pat.graph.has_edge(p, q);
                let he = self.host.has_edge(h, hq);
                if pe && !he {
                    continue 'cand;
                }
                if self.induced && !pe && he {
                    continue 'cand;
                }
            }
            partial.insert(p, h);
            let keep_going = self.extend(depth + 1, partial);
            partial.remove(&p);
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Visit embeddings in deterministic search order until `emit` returns
/// false.
pub fn for_each_embedding(
    host: &Graph,
    pat: &PatternGraph,
    induced: bool,
    emit: impl FnMut(&Embedding) -> bool,
) {
    let order = search_order(&pat.graph);
    Search { host, pat, induced, order, emit }.run();
}

/// All embeddings, sorted by their image vectors taken in ascending pattern
/// id order. The sort gives "lowest host ids win" a precise meaning for
/// callers that pick the first.
pub fn embeddings(host: &Graph, pat: &PatternGraph, induced: bool) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(host, pat, induced, |e| {
        out.push(e.clone());
        true
    });
    out.sort_by_key(|e| e.values().copied().collect::<Vec<_>>());
    out
}

/// First embedding in deterministic search order, if any. Cheaper than
/// `embeddings` when only existence (plus some witness) matters.
pub fn contains_subgraph(host: &Graph, pat: &PatternGraph, induced: bool) -> Option<Embedding> {
    let mut found = None;
    for_each_embedding(host, pat, induced, |e| {
        found = Some(e.clone());
        false
    });
    found
}
