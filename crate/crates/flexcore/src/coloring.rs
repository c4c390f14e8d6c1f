//! List assignments, colorings, requests, and the exact satisfaction
//! oracle.
//!
//! A coloring is proper if adjacent vertices differ; it respects a list
//! assignment if every vertex uses a color from its own list. A request asks
//! for specific colors (plain: one color per requested vertex; weighted: a
//! nonnegative weight per (vertex, color) pair) and a coloring's
//! satisfaction ratio is the satisfied fraction — count over domain size, or
//! weight over total weight. All arithmetic is exact.

use crate::graph::{Graph, VertexId};
use crate::rational::{rat_int, rat_pow, Rat};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type Color = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("no proper coloring from these lists exists")]
    NotColorable,
    #[error("satisfaction ratio undefined: {0}")]
    UndefinedRatio(String),
    #[error("bounds need k >= 3 and b >= 1 (got k={k}, b={b})")]
    BadParameters { k: i64, b: i64 },
    #[error("vertex {0} has no list")]
    MissingList(VertexId),
    #[error("request references vertex {0} which is not in the graph")]
    UnknownVertex(VertexId),
    #[error("plain request at vertex {v} asks for color {c} outside its list")]
    RequestOutsideList { v: VertexId, c: Color },
}

/// One color list per vertex. Lists may be empty (then nothing is
/// colorable), but every graph vertex must have an entry when an operation
/// pairs the assignment with a graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ListAssignment {
    lists: BTreeMap<VertexId, BTreeSet<Color>>,
}

impl ListAssignment {
    pub fn new(lists: BTreeMap<VertexId, BTreeSet<Color>>) -> ListAssignment {
        ListAssignment { lists }
    }

    /// Same list for every vertex of the graph.
    pub fn uniform(graph: &Graph, colors: &[Color]) -> ListAssignment {
        let set: BTreeSet<Color> = colors.iter().copied().collect();
        ListAssignment {
            lists: graph.vertices().map(|v| (v, set.clone())).collect(),
        }
    }

    pub fn get(&self, v: VertexId) -> Option<&BTreeSet<Color>> {
        self.lists.get(&v)
    }

    pub fn set(&mut self, v: VertexId, colors: BTreeSet<Color>) {
        self.lists.insert(v, colors);
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.lists.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &BTreeSet<Color>)> {
        self.lists.iter().map(|(&v, s)| (v, s))
    }

    /// Every graph vertex has a list.
    pub fn validate_for(&self, graph: &Graph) -> Result<(), ColoringError> {
        for v in graph.vertices() {
            if !self.lists.contains_key(&v) {
                return Err(ColoringError::MissingList(v));
            }
        }
        Ok(())
    }
}

/// A full proper coloring candidate: one color per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Coloring {
    pub map: BTreeMap<VertexId, Color>,
}

impl Coloring {
    pub fn get(&self, v: VertexId) -> Option<Color> {
        self.map.get(&v).copied()
    }

    pub fn is_proper(&self, graph: &Graph) -> bool {
        graph
            .edges()
            .iter()
            .all(|&(u, v)| match (self.get(u), self.get(v)) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            })
    }

    pub fn respects(&self, lists: &ListAssignment) -> bool {
        self.map
            .iter()
            .all(|(&v, &c)| lists.get(v).is_some_and(|l| l.contains(&c)))
    }
}

/// What the instance asks of a coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    /// One requested color per vertex in the domain. The request is
    /// "widespread" exactly when the domain is the whole vertex set.
    Plain { choices: BTreeMap<VertexId, Color> },
    /// Nonnegative weight per (vertex, color) pair; absent pairs weigh 0.
    Weighted { weights: BTreeMap<(VertexId, Color), Rat> },
}

impl Request {
    pub fn is_widespread(&self, graph: &Graph) -> bool {
        match self {
            Request::Plain { choices } => {
                graph.vertices().all(|v| choices.contains_key(&v))
            }
            Request::Weighted { .. } => false,
        }
    }

    pub fn validate_for(&self, graph: &Graph, lists: &ListAssignment) -> Result<(), ColoringError> {
        match self {
            Request::Plain { choices } => {
                for (&v, &c) in choices {
                    if !graph.has_vertex(v) {
                        return Err(ColoringError::UnknownVertex(v));
                    }
                    let l = lists.get(v).ok_or(ColoringError::MissingList(v))?;
                    if !l.contains(&c) {
                        return Err(ColoringError::RequestOutsideList { v, c });
                    }
                }
                Ok(())
            }
            Request::Weighted { weights } => {
                for &(v, _) in weights.keys() {
                    if !graph.has_vertex(v) {
                        return Err(ColoringError::UnknownVertex(v));
                    }
                }
                // Weights are parsed as nonnegative rationals; enforce anyway.
                if weights.values().any(|w| w < &rat_int(0)) {
                    return Err(ColoringError::UndefinedRatio("negative weight".into()));
                }
                Ok(())
            }
        }
    }

    /// Total achievable mass: domain size (plain) or total weight.
    pub fn normalizer(&self) -> Rat {
        match self {
            Request::Plain { choices } => rat_int(choices.len() as i64),
            Request::Weighted { weights } => weights.values().sum(),
        }
    }

    /// Mass this coloring satisfies: matched requests or collected weight.
    pub fn score(&self, coloring: &Coloring) -> Rat {
        match self {
            Request::Plain { choices } => {
                let hits = choices
                    .iter()
                    .filter(|(&v, &c)| coloring.get(v) == Some(c))
                    .count();
                rat_int(hits as i64)
            }
            Request::Weighted { weights } => coloring
                .map
                .iter()
                .filter_map(|(&v, &c)| weights.get(&(v, c)))
                .sum(),
        }
    }

    /// score / normalizer; errors when the normalizer is zero.
    pub fn satisfaction_ratio(&self, coloring: &Coloring) -> Result<Rat, ColoringError> {
        let norm = self.normalizer();
        if norm == rat_int(0) {
            return Err(ColoringError::UndefinedRatio(match self {
                Request::Plain { .. } => "empty request domain".into(),
                Request::Weighted { .. } => "total weight is zero".into(),
            }));
        }
        Ok(self.score(coloring) / norm)
    }
}

/// Streaming enumeration of all proper list colorings in canonical order:
/// vertices ascending by id, colors tried in ascending order, depth-first.
/// The k-th emitted coloring is therefore identical on every run.
pub struct ColoringIter<'a> {
    graph: &'a Graph,
    verts: Vec<VertexId>,
    lists: Vec<Vec<Color>>,
    /// chosen[i] = index into lists[i]; the stack of the DFS.
    chosen: Vec<usize>,
    done: bool,
}

impl<'a> ColoringIter<'a> {
    fn new(graph: &'a Graph, lists: &ListAssignment) -> Result<ColoringIter<'a>, ColoringError> {
        lists.validate_for(graph)?;
        let verts: Vec<VertexId> = graph.vertices().collect();
        let lists: Vec<Vec<Color>> = verts
            .iter()
            .map(|&v| lists.get(v).unwrap().iter().copied().collect())
            .collect();
        Ok(ColoringIter { graph, verts, lists, chosen: Vec::new(), done: false })
    }

    fn color_ok(&self, depth: usize, color_idx: usize) -> bool {
        let v = self.verts[depth];
        let c = self.lists[depth][color_idx];
        (0..depth).all(|j| {
            !self.graph.has_edge(v, self.verts[j]) || self.lists[j][self.chosen[j]] != c
        })
    }

    /// Advance the DFS to the next full assignment; `start` is the color
    /// index to begin from at the current depth.
    fn advance(&mut self, mut start: usize) -> bool {
        loop {
            let depth = self.chosen.len();
            let mut found = None;
            for i in start..self.lists.get(depth).map_or(0, |l| l.len()) {
                if self.color_ok(depth, i) {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    self.chosen.push(i);
                    if self.chosen.len() == self.verts.len() {
                        return true;
                    }
                    start = 0;
                }
                None => match self.chosen.pop() {
                    Some(prev) => start = prev + 1,
                    None => return false,
                },
            }
        }
    }
}

impl Iterator for ColoringIter<'_> {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.done {
            return None;
        }
        let resume = if self.chosen.len() == self.verts.len() && !self.verts.is_empty() {
            // Backtrack off the previously emitted leaf.
            let prev = self.chosen.pop().unwrap();
            prev + 1
        } else if self.chosen.is_empty() {
            0
        } else {
            unreachable!("iterator state is always a full leaf or the root")
        };
        if self.verts.is_empty() {
            // Exactly one empty coloring of the empty graph.
            self.done = true;
            return Some(Coloring { map: BTreeMap::new() });
        }
        if !self.advance(resume) {
            self.done = true;
            return None;
        }
        let map = self
            .verts
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, self.lists[i][self.chosen[i]]))
            .collect();
        Some(Coloring { map })
    }
}

/// All proper list colorings in canonical order.
pub fn enumerate_colorings<'a>(
    graph: &'a Graph,
    lists: &ListAssignment,
) -> Result<ColoringIter<'a>, ColoringError> {
    ColoringIter::new(graph, lists)
}

pub fn count_colorings(graph: &Graph, lists: &ListAssignment) -> Result<u64, ColoringError> {
    Ok(enumerate_colorings(graph, lists)?.count() as u64)
}

/// Existence check with most-constrained-vertex ordering; much faster than
/// enumeration when lists are tight.
pub fn is_colorable(graph: &Graph, lists: &ListAssignment) -> Result<bool, ColoringError> {
    lists.validate_for(graph)?;
    let verts: Vec<VertexId> = graph.vertices().collect();
    let mut remaining: BTreeMap<VertexId, BTreeSet<Color>> = verts
        .iter()
        .map(|&v| (v, lists.get(v).unwrap().clone()))
        .collect();
    fn solve(graph: &Graph, remaining: &mut BTreeMap<VertexId, BTreeSet<Color>>) -> bool {
        let Some((&v, _)) = remaining.iter().min_by_key(|(&v, s)| (s.len(), v)) else {
            return true;
        };
        let colors: Vec<Color> = remaining[&v].iter().copied().collect();
        let saved = remaining.remove(&v).unwrap();
        for c in colors {
            let mut touched = Vec::new();
            let mut dead = false;
            for u in graph.neighbors(v) {
                if let Some(s) = remaining.get_mut(&u) {
                    if s.remove(&c) {
                        touched.push(u);
                        if s.is_empty() {
                            dead = true;
                        }
                    }
                }
            }
            if !dead && solve(graph, remaining) {
                return true;
            }
            for u in touched {
                remaining.get_mut(&u).unwrap().insert(c);
            }
        }
        remaining.insert(v, saved);
        false
    }
    Ok(solve(graph, &mut remaining))
}

/// Result of the exact oracle: the best achievable satisfaction ratio and
/// the first coloring (in canonical order) that attains it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxSatisfaction {
    #[serde(with = "crate::rational::serde_rat")]
    pub best_ratio: Rat,
    pub witness: Coloring,
}

/// Exact branch-and-bound maximum of the satisfaction ratio over all proper
/// list colorings. Exponential in the worst case; intended for instances of
/// at most ~20 vertices.
pub fn max_satisfaction(
    graph: &Graph,
    lists: &ListAssignment,
    request: &Request,
) -> Result<MaxSatisfaction, ColoringError> {
    lists.validate_for(graph)?;
    request.validate_for(graph, lists)?;
    let norm = request.normalizer();
    if norm == rat_int(0) {
        return Err(ColoringError::UndefinedRatio(match request {
            Request::Plain { .. } => "empty request domain".into(),
            Request::Weighted { .. } => "total weight is zero".into(),
        }));
    }
    let verts: Vec<VertexId> = graph.vertices().collect();
    let lists_vec: Vec<Vec<Color>> = verts
        .iter()
        .map(|&v| lists.get(v).unwrap().iter().copied().collect())
        .collect();
    // gain[i][j]: mass collected if verts[i] takes lists_vec[i][j].
    let gain: Vec<Vec<Rat>> = verts
        .iter()
        .zip(&lists_vec)
        .map(|(&v, l)| {
            l.iter()
                .map(|&c| match request {
                    Request::Plain { choices } => {
                        rat_int((choices.get(&v) == Some(&c)) as i64)
                    }
                    Request::Weighted { weights } => {
                        weights.get(&(v, c)).cloned().unwrap_or_else(|| rat_int(0))
                    }
                })
                .collect()
        })
        .collect();
    // best_rest[i]: max possible mass from verts[i..], properness ignored —
    // an admissible bound for pruning.
    let mut best_rest: Vec<Rat> = vec![rat_int(0); verts.len() + 1];
    for i in (0..verts.len()).rev() {
        let here = gain[i].iter().max().cloned().unwrap_or_else(|| rat_int(0));
        best_rest[i] = here + best_rest[i + 1].clone();
    }

    struct Bb<'a> {
        graph: &'a Graph,
        verts: &'a [VertexId],
        lists: &'a [Vec<Color>],
        gain: &'a [Vec<Rat>],
        best_rest: &'a [Rat],
        chosen: Vec<usize>,
        best: Option<(Rat, Vec<usize>)>,
    }
    impl Bb<'_> {
        fn run(&mut self, score: Rat) {
            let depth = self.chosen.len();
            if depth == self.verts.len() {
                // Strict improvement only: the witness stays the first
                // optimum in canonical order.
                if self.best.as_ref().is_none_or(|(b, _)| score > *b) {
                    self.best = Some((score, self.chosen.clone()));
                }
                return;
            }
            if let Some((b, _)) = &self.best {
                if score.clone() + self.best_rest[depth].clone() <= *b {
                    return;
                }
            }
            let v = self.verts[depth];
            for j in 0..self.lists[depth].len() {
                let c = self.lists[depth][j];
                let ok = (0..depth).all(|i| {
                    !self.graph.has_edge(v, self.verts[i])
                        || self.lists[i][self.chosen[i]] != c
                });
                if !ok {
                    continue;
                }
                self.chosen.push(j);
                self.run(score.clone() + self.gain[depth][j].clone());
                self.chosen.pop();
            }
        }
    }
    let mut bb = Bb {
        graph,
        verts: &verts,
        lists: &lists_vec,
        gain: &gain,
        best_rest: &best_rest,
        chosen: Vec::new(),
        best: None,
    };
    bb.run(rat_int(0));
    let (score, chosen) = bb.best.ok_or(ColoringError::NotColorable)?;
    let witness = Coloring {
        map: verts
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, lists_vec[i][chosen[i]]))
            .collect(),
    };
    Ok(MaxSatisfaction { best_ratio: score / norm, witness })
}

/// The guaranteed satisfaction levels for parameters (k, b): a peeling
/// process with layers of at most b vertices and lists of size k retains
/// probability p = k^-b per color choice, satisfaction epsilon = p^(k-1),
/// and weak-variant satisfaction epsilon / b.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonBound {
    pub k: u32,
    pub b: u32,
    #[serde(with = "crate::rational::serde_rat")]
    pub p: Rat,
    #[serde(with = "crate::rational::serde_rat")]
    pub epsilon: Rat,
    #[serde(with = "crate::rational::serde_rat")]
    pub weak_epsilon: Rat,
}

pub fn epsilon_bound(k: u32, b: u32) -> Result<EpsilonBound, ColoringError> {
    if k < 3 || b < 1 {
        return Err(ColoringError::BadParameters { k: k as i64, b: b as i64 });
    }
    let p = rat_pow(&rat_int(k as i64), -(b as i64));
    let epsilon = rat_pow(&p, (k - 1) as i64);
    let weak_epsilon = epsilon.clone() / rat_int(b as i64);
    Ok(EpsilonBound { k, b, p, epsilon, weak_epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn lists_of(pairs: &[(VertexId, &[Color])]) -> ListAssignment {
        ListAssignment::new(
            pairs
                .iter()
                .map(|&(v, cs)| (v, cs.iter().copied().collect()))
                .collect(),
        )
    }

    #[test]
    fn single_vertex_enumerates_in_order() {
        let mut g = Graph::new();
        g.add_vertex(7);
        let l = lists_of(&[(7, &[3, 1, 2])]);
        let all: Vec<_> = enumerate_colorings(&g, &l).unwrap().collect();
        let got: Vec<Color> = all.iter().map(|c| c.get(7).unwrap()).collect();
        assert_eq!(got, vec![1, 2, 3]);
    }

    #[test]
    fn edge_with_shared_pair_has_two_colorings() {
        let g = Graph::path(&[0, 1]);
        let l = lists_of(&[(0, &[1, 2]), (1, &[1, 2])]);
        let all: Vec<_> = enumerate_colorings(&g, &l).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].get(0), Some(1));
        assert_eq!(all[0].get(1), Some(2));
        assert_eq!(all[1].get(0), Some(2));
        assert_eq!(all[1].get(1), Some(1));
    }

    #[test]
    fn triangle_with_equal_pairs_is_uncolorable() {
        let g = Graph::cycle(&[0, 1, 2]);
        let l = ListAssignment::uniform(&g, &[1, 2]);
        assert_eq!(count_colorings(&g, &l).unwrap(), 0);
        assert!(!is_colorable(&g, &l).unwrap());
        assert_eq!(
            max_satisfaction(&g, &l, &Request::Plain { choices: BTreeMap::from([(0, 1)]) }),
            Err(ColoringError::NotColorable)
        );
    }

    #[test]
    fn forced_path_is_colorable() {
        // 0 is forced to 1, so 1 must take 2, so 2 must take 3.
        let g = Graph::path(&[0, 1, 2]);
        let l = lists_of(&[(0, &[1]), (1, &[1, 2]), (2, &[2, 3])]);
        assert!(is_colorable(&g, &l).unwrap());
        let all: Vec<_> = enumerate_colorings(&g, &l).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].map, BTreeMap::from([(0, 1), (1, 2), (2, 3)]));
    }

    #[test]
    fn even_cycle_with_pairs_colorable_odd_not() {
        let even = Graph::cycle(&[0, 1, 2, 3]);
        let odd = Graph::cycle(&[0, 1, 2]);
        assert!(is_colorable(&even, &ListAssignment::uniform(&even, &[1, 2])).unwrap());
        assert!(!is_colorable(&odd, &ListAssignment::uniform(&odd, &[1, 2])).unwrap());
    }

    #[test]
    fn plain_request_on_triangle_best_is_one_third() {
        let g = Graph::cycle(&[0, 1, 2]);
        let l = ListAssignment::uniform(&g, &[1, 2, 3]);
        let r = Request::Plain { choices: BTreeMap::from([(0, 1), (1, 1), (2, 1)]) };
        assert!(r.is_widespread(&g));
        let best = max_satisfaction(&g, &l, &r).unwrap();
        assert_eq!(best.best_ratio, rat(1, 3));
        // First optimum in canonical order: 0 -> 1, then smallest legal rest.
        assert_eq!(best.witness.get(0), Some(1));
        assert!(best.witness.is_proper(&g));
    }

    #[test]
    fn weighted_request_prefers_heavy_pairs() {
        let g = Graph::path(&[0, 1]);
        let l = ListAssignment::uniform(&g, &[1, 2]);
        let r = Request::Weighted {
            weights: BTreeMap::from([((0, 1), rat_int(2)), ((1, 2), rat_int(1))]),
        };
        let best = max_satisfaction(&g, &l, &r).unwrap();
        assert_eq!(best.best_ratio, rat_int(1));
        assert_eq!(best.witness.get(0), Some(1));
        assert_eq!(best.witness.get(1), Some(2));
    }

    #[test]
    fn undefined_ratios_are_errors() {
        let g = Graph::path(&[0, 1]);
        let l = ListAssignment::uniform(&g, &[1, 2]);
        let empty = Request::Plain { choices: BTreeMap::new() };
        assert!(matches!(
            max_satisfaction(&g, &l, &empty),
            Err(ColoringError::UndefinedRatio(_))
        ));
        let zero = Request::Weighted { weights: BTreeMap::from([((0, 1), rat_int(0))]) };
        assert!(matches!(
            max_satisfaction(&g, &l, &zero),
            Err(ColoringError::UndefinedRatio(_))
        ));
    }

    #[test]
    fn request_validation_errors() {
        let g = Graph::path(&[0, 1]);
        let l = ListAssignment::uniform(&g, &[1, 2]);
        let outside = Request::Plain { choices: BTreeMap::from([(0, 9)]) };
        assert_eq!(
            outside.validate_for(&g, &l),
            Err(ColoringError::RequestOutsideList { v: 0, c: 9 })
        );
        let unknown = Request::Plain { choices: BTreeMap::from([(5, 1)]) };
        assert_eq!(unknown.validate_for(&g, &l), Err(ColoringError::UnknownVertex(5)));
    }

    #[test]
    fn epsilon_bound_exact_values() {
        let e = epsilon_bound(5, 3).unwrap();
        assert_eq!(e.p, rat(1, 125));
        assert_eq!(e.epsilon, rat(1, 244_140_625));
        assert_eq!(e.weak_epsilon, rat(1, 732_421_875));
        let e = epsilon_bound(3, 1).unwrap();
        assert_eq!(e.p, rat(1, 3));
        assert_eq!(e.epsilon, rat(1, 9));
        assert_eq!(e.weak_epsilon, rat(1, 9));
        assert!(epsilon_bound(2, 1).is_err());
        assert!(epsilon_bound(4, 0).is_err());
    }

    #[test]
    fn enumeration_matches_is_colorable() {
        // Path with a forced conflict in the middle.
        let g = Graph::path(&[0, 1, 2, 3]);
        let l = lists_of(&[(0, &[1]), (1, &[1]), (2, &[1, 2]), (3, &[2])]);
        assert_eq!(count_colorings(&g, &l).unwrap(), 0);
        assert!(!is_colorable(&g, &l).unwrap());
    }

    proptest::proptest! {
        /// Renaming colors bijectively never changes the number of
        /// colorings.
        #[test]
        fn counting_is_renaming_invariant(edge_bits in 0u32..(1 << 10), sizes in proptest::collection::vec(1usize..4, 5)) {
            let verts: Vec<VertexId> = (0..5).collect();
            let mut edges = Vec::new();
            let mut bit = 0;
            for i in 0..5u32 {
                for j in (i + 1)..5 {
                    if edge_bits >> bit & 1 == 1 {
                        edges.push((i, j));
                    }
                    bit += 1;
                }
            }
            let g = Graph::from_edges(&verts, &edges).unwrap();
            // Lists: vertex v gets `sizes[v]` colors starting at v (so lists overlap).
            let lists = ListAssignment::new(
                verts.iter().map(|&v| (v, (v..v + sizes[v as usize] as u32).collect())).collect(),
            );
            // Rename color c -> 2c + 1.
            let renamed = ListAssignment::new(
                lists.iter().map(|(v, s)| (v, s.iter().map(|&c| 2 * c + 1).collect())).collect(),
            );
            proptest::prop_assert_eq!(
                count_colorings(&g, &lists).unwrap(),
                count_colorings(&g, &renamed).unwrap()
            );
        }

        /// The oracle's witness is always a proper list coloring, and its
        /// ratio matches the reported maximum.
        #[test]
        fn oracle_witness_is_consistent(edge_bits in 0u32..(1 << 10), req_colors in proptest::collection::vec(1u32..4, 5)) {
            let verts: Vec<VertexId> = (0..5).collect();
            let mut edges = Vec::new();
            let mut bit = 0;
            for i in 0..5u32 {
                for j in (i + 1)..5 {
                    if edge_bits >> bit & 1 == 1 {
                        edges.push((i, j));
                    }
                    bit += 1;
                }
            }
            let g = Graph::from_edges(&verts, &edges).unwrap();
            let lists = ListAssignment::uniform(&g, &[1, 2, 3]);
            let r = Request::Plain {
                choices: verts.iter().map(|&v| (v, req_colors[v as usize])).collect(),
            };
            let best = match max_satisfaction(&g, &lists, &r) {
                Err(ColoringError::NotColorable) => {
                    proptest::prop_assert!(!is_colorable(&g, &lists).unwrap());
                    return Ok(());
                }
                other => other.unwrap(),
            };
            proptest::prop_assert!(best.witness.is_proper(&g));
            proptest::prop_assert!(best.witness.respects(&lists));
            proptest::prop_assert_eq!(r.satisfaction_ratio(&best.witness).unwrap(), best.best_ratio.clone());
            proptest::prop_assert!(best.best_ratio >= rat_int(0) && best.best_ratio <= rat_int(1));
        }
    }
}
