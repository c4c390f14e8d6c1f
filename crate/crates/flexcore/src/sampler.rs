//! Random proper colorings along a resolution, their exact laws, and the
//! guarantee checks.
//!
//! A resolution is consumed in reverse: the terminal residue is colored
//! first, uniformly among all its proper list colorings, then each peeled
//! block — last peeled first — is extended uniformly among its proper
//! colorings under lists with already-placed neighbor colors struck out.
//! Every stage is conditionally uniform, so the law of the output is
//! computable exactly by recursing over stages and averaging
//! ([`exact_distribution`]), and [`verify_bounds`] checks the guaranteed
//! marginal and avoidance levels against that law. Empirical estimation
//! ([`estimate_marginals`]) keys every draw by (seed, stage, trial), so
//! trial t of stage s is the same numbers on every run and thread count.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::coloring::{
    count_colorings, enumerate_colorings, epsilon_bound, Color, Coloring, ColoringError,
    ListAssignment, Request,
};
use crate::graph::{Graph, VertexId};
use crate::rational::{rat_int, rat_pow, rat_zero, Rat};
use crate::reducibility::{is_forbidding, ForbiddenFamily};
use crate::resolution::Resolution;
use crate::rng::Stream;

/// Enumeration ceiling for [`exact_distribution`]: the product of per-stage
/// coloring counts must stay at or below this.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("corrupt certificate: {0}")]
    BadPartition(String),
    #[error("corrupt certificate: no valid extension exists at {stage}")]
    NoExtension { stage: String },
    #[error("enumeration budget exceeded: at least {product} branches, limit {budget}")]
    BudgetExceeded { product: u128, budget: u128 },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// The exact law of the staged sampler: every support element is a proper
/// list coloring of the whole graph, and the probabilities sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringDistribution {
    pub support: BTreeMap<Coloring, Rat>,
}

impl ColoringDistribution {
    pub fn total(&self) -> Rat {
        self.support.values().sum()
    }

    /// Exact Prob[φ(v) = c] for every vertex and every color on its list
    /// (zero when the color never occurs).
    pub fn marginals(&self, lists: &ListAssignment) -> MarginalTable {
        let mut table: BTreeMap<(VertexId, Color), Rat> = BTreeMap::new();
        if let Some(first) = self.support.keys().next() {
            for &v in first.map.keys() {
                if let Some(l) = lists.get(v) {
                    for &c in l {
                        table.insert((v, c), rat_zero());
                    }
                }
            }
        }
        for (coloring, p) in &self.support {
            for (&v, &c) in &coloring.map {
                if let Some(entry) = table.get_mut(&(v, c)) {
                    *entry += p.clone();
                }
            }
        }
        MarginalTable { table }
    }

    /// Exact Prob[φ(v) ≠ c for every v in `set`]; 1 for the empty set.
    pub fn avoidance(&self, set: &BTreeSet<VertexId>, c: Color) -> Rat {
        self.support
            .iter()
            .filter(|(coloring, _)| set.iter().all(|&v| coloring.get(v) != Some(c)))
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Expected satisfaction ratio of `request` under this law.
    pub fn expected_satisfaction(&self, request: &Request) -> Result<Rat, ColoringError> {
        let mut total = rat_zero();
        for (coloring, p) in &self.support {
            total += request.satisfaction_ratio(coloring)? * p.clone();
        }
        Ok(total)
    }
}

/// Prob[φ(v) = c] per (vertex, color) pair — exact or empirical, depending
/// on who built it. Rows over a vertex's list sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalTable {
    pub table: BTreeMap<(VertexId, Color), Rat>,
}

impl MarginalTable {
    /// Zero for pairs the table never saw.
    pub fn get(&self, v: VertexId, c: Color) -> Rat {
        self.table.get(&(v, c)).cloned().unwrap_or_else(rat_zero)
    }

    pub fn row_sum(&self, v: VertexId) -> Rat {
        self.table
            .iter()
            .filter(|((u, _), _)| *u == v)
            .map(|(_, p)| p.clone())
            .sum()
    }
}

/// The coloring stages in draw order: terminal residue first, then the
/// peeled blocks from last peeled back to first. The key seeds the RNG
/// stream (0 for the residue, step index + 1 for peels).
fn stages(res: &Resolution) -> Vec<(u64, &BTreeSet<VertexId>, String)> {
    let mut out = vec![(0, &res.residue, "the residue".to_string())];
    for s in res.steps.iter().rev() {
        out.push((s.index as u64 + 1, &s.peeled, format!("step {}", s.index)));
    }
    out
}

/// The stages must partition the graph's vertices, or the staged process
/// would miss or double-color something.
fn check_partition(graph: &Graph, res: &Resolution) -> Result<(), SamplerError> {
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for (_, q, stage) in stages(res) {
        for &v in q {
            if !seen.insert(v) {
                return Err(SamplerError::BadPartition(format!(
                    "vertex {v} colored twice (again at {stage})"
                )));
            }
        }
    }
    if seen != graph.vertex_set() {
        return Err(SamplerError::BadPartition(
            "peeled sets plus residue do not cover the graph".to_string(),
        ));
    }
    Ok(())
}

/// All proper colorings of the block `q` under lists reduced by the colors
/// `psi` already placed on outside neighbors, in canonical order. A valid
/// certificate guarantees at least one.
fn extensions(
    graph: &Graph,
    lists: &ListAssignment,
    q: &BTreeSet<VertexId>,
    psi: &Coloring,
    stage: &str,
) -> Result<Vec<Coloring>, SamplerError> {
    let sub = graph.induced(q);
    let mut reduced: BTreeMap<VertexId, BTreeSet<Color>> = BTreeMap::new();
    for &y in q {
        let mut l = lists.get(y).ok_or(ColoringError::MissingList(y))?.clone();
        for u in graph.neighbors(y) {
            if let Some(c) = psi.get(u) {
                l.remove(&c);
            }
        }
        reduced.insert(y, l);
    }
    let exts: Vec<Coloring> =
        enumerate_colorings(&sub, &ListAssignment::new(reduced))?.collect();
    if exts.is_empty() {
        return Err(SamplerError::NoExtension { stage: stage.to_string() });
    }
    Ok(exts)
}

/// One random proper list coloring of the whole graph, drawn by the staged
/// process. `trial` keys an independent stream per sample, so trial t is
/// reproducible no matter how many other trials ran.
pub fn sample_coloring(
    graph: &Graph,
    lists: &ListAssignment,
    res: &Resolution,
    seed: u64,
    trial: u64,
) -> Result<Coloring, SamplerError> {
    lists.validate_for(graph)?;
    check_partition(graph, res)?;
    let mut psi = Coloring { map: BTreeMap::new() };
    for (key, q, stage) in stages(res) {
        let exts = extensions(graph, lists, q, &psi, &stage)?;
        let pick = Stream::new(seed, key, trial).below(exts.len());
        for (&v, &c) in &exts[pick].map {
            psi.map.insert(v, c);
        }
    }
    debug_assert!(psi.is_proper(graph) && psi.respects(lists));
    Ok(psi)
}

/// The exact law of [`sample_coloring`], by recursing over stages and
/// averaging uniformly over each stage's extensions. Refuses instances
/// whose unconditional per-stage coloring counts multiply past
/// [`ENUMERATION_BUDGET`] (an upper bound on the recursion tree, since
/// reduced lists only shrink the counts).
pub fn exact_distribution(
    graph: &Graph,
    lists: &ListAssignment,
    res: &Resolution,
) -> Result<ColoringDistribution, SamplerError> {
    lists.validate_for(graph)?;
    check_partition(graph, res)?;
    let stage_list = stages(res);
    let mut product: u128 = 1;
    for (_, q, _) in &stage_list {
        let sub = graph.induced(q);
        let full: BTreeMap<VertexId, BTreeSet<Color>> =
            q.iter().map(|&v| (v, lists.get(v).unwrap().clone())).collect();
        let count = count_colorings(&sub, &ListAssignment::new(full))? as u128;
        product = product.saturating_mul(count.max(1));
        if product > ENUMERATION_BUDGET {
            return Err(SamplerError::BudgetExceeded {
                product,
                budget: ENUMERATION_BUDGET,
            });
        }
    }

    fn recurse(
        graph: &Graph,
        lists: &ListAssignment,
        stage_list: &[(u64, &BTreeSet<VertexId>, String)],
        i: usize,
        psi: &mut Coloring,
        weight: Rat,
        support: &mut BTreeMap<Coloring, Rat>,
    ) -> Result<(), SamplerError> {
        let Some((_, q, stage)) = stage_list.get(i) else {
            *support.entry(psi.clone()).or_insert_with(rat_zero) += weight;
            return Ok(());
        };
        let exts = extensions(graph, lists, q, psi, stage)?;
        let share = weight / rat_int(exts.len() as i64);
        for ext in exts {
            for (&v, &c) in &ext.map {
                psi.map.insert(v, c);
            }
            recurse(graph, lists, stage_list, i + 1, psi, share.clone(), support)?;
            for v in ext.map.keys() {
                psi.map.remove(v);
            }
        }
        Ok(())
    }

    let mut support = BTreeMap::new();
    let mut psi = Coloring { map: BTreeMap::new() };
    recurse(graph, lists, &stage_list, 0, &mut psi, rat_int(1), &mut support)?;
    Ok(ColoringDistribution { support })
}

/// Empirical marginal frequencies over `n_samples` staged draws, as exact
/// fractions count/n. Deterministic given the seed.
pub fn estimate_marginals(
    graph: &Graph,
    lists: &ListAssignment,
    res: &Resolution,
    n_samples: u64,
    seed: u64,
) -> Result<MarginalTable, SamplerError> {
    assert!(n_samples >= 1, "need at least one sample");
    lists.validate_for(graph)?;
    let mut counts: BTreeMap<(VertexId, Color), u64> = BTreeMap::new();
    for v in graph.vertices() {
        for &c in lists.get(v).unwrap() {
            counts.insert((v, c), 0);
        }
    }
    for trial in 0..n_samples {
        let phi = sample_coloring(graph, lists, res, seed, trial)?;
        for (&v, &c) in &phi.map {
            *counts.get_mut(&(v, c)).expect("sample respects the lists") += 1;
        }
    }
    let n = rat_int(n_samples as i64);
    Ok(MarginalTable {
        table: counts
            .into_iter()
            .map(|(key, hits)| (key, rat_int(hits as i64) / n.clone()))
            .collect(),
    })
}

/// The lowest marginal found among the vertices claimed fixable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstMarginal {
    pub v: VertexId,
    pub c: Color,
    #[serde(with = "crate::rational::serde_rat")]
    pub prob: Rat,
}

/// The avoidance event closest to (or past) its guaranteed level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstAvoidance {
    pub set: Vec<VertexId>,
    pub c: Color,
    #[serde(with = "crate::rational::serde_rat")]
    pub prob: Rat,
    #[serde(with = "crate::rational::serde_rat")]
    pub bound: Rat,
}

/// Outcome of checking a distribution against its guaranteed levels. A
/// failed flag means the implementation is broken somewhere — the levels
/// are theorems about the staged process — so the caller should treat it
/// as a bug report, not a mathematical finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub k: u32,
    pub b: u32,
    #[serde(with = "crate::rational::serde_rat")]
    pub p: Rat,
    #[serde(with = "crate::rational::serde_rat")]
    pub epsilon: Rat,
    pub fix_ok: bool,
    pub worst_fix: Option<WorstMarginal>,
    pub avoidance_ok: bool,
    pub worst_avoidance: Option<WorstAvoidance>,
    pub forbidding_sets_checked: usize,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.fix_ok && self.avoidance_ok
    }
}

fn subsets_up_to(verts: &[VertexId], max: usize) -> Vec<Vec<VertexId>> {
    fn push(
        verts: &[VertexId],
        max: usize,
        start: usize,
        cur: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..verts.len() {
            cur.push(verts[i]);
            push(verts, max, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    push(verts, max, 0, &mut Vec::new(), &mut out);
    out
}

/// Checks the two guaranteed levels of the staged law with effective bound
/// `b`: every vertex in `fix` holds each of its list colors with
/// probability at least ε = k^(-b(k-1)), and for every forbidding set I of
/// one to k-2 vertices and every color, all of I avoids that color with
/// probability at least p^|I| where p = k^(-b). `fix` is the certificate's
/// verified fixable set ([`Resolution::fix_vertices`]).
pub fn verify_bounds(
    dist: &ColoringDistribution,
    graph: &Graph,
    lists: &ListAssignment,
    family: &ForbiddenFamily,
    k: u32,
    b: u32,
    fix: &BTreeSet<VertexId>,
) -> Result<BoundReport, SamplerError> {
    let levels = epsilon_bound(k, b)?;
    let marginals = dist.marginals(lists);
    let mut fix_ok = true;
    let mut worst_fix: Option<WorstMarginal> = None;
    for &v in fix {
        for &c in lists.get(v).ok_or(ColoringError::MissingList(v))? {
            let prob = marginals.get(v, c);
            if prob < levels.epsilon {
                fix_ok = false;
            }
            if worst_fix.as_ref().is_none_or(|w| prob < w.prob) {
                worst_fix = Some(WorstMarginal { v, c, prob });
            }
        }
    }

    let verts: Vec<VertexId> = graph.vertices().collect();
    let colors: BTreeSet<Color> =
        lists.iter().flat_map(|(_, l)| l.iter().copied()).collect();
    let mut avoidance_ok = true;
    let mut worst_avoidance: Option<WorstAvoidance> = None;
    let mut checked = 0;
    for subset in subsets_up_to(&verts, k.saturating_sub(2) as usize) {
        let set: BTreeSet<VertexId> = subset.iter().copied().collect();
        if !is_forbidding(graph, &set, family) {
            continue;
        }
        checked += 1;
        let bound = rat_pow(&levels.p, set.len() as i64);
        for &c in &colors {
            let prob = dist.avoidance(&set, c);
            if prob < bound {
                avoidance_ok = false;
            }
            // Compare by slack ratio so differently sized sets rank fairly.
            let tighter = worst_avoidance
                .as_ref()
                .is_none_or(|w| prob.clone() * w.bound.clone() < w.prob.clone() * bound.clone());
            if tighter {
                worst_avoidance = Some(WorstAvoidance {
                    set: subset.clone(),
                    c,
                    prob,
                    bound: bound.clone(),
                });
            }
        }
    }
    Ok(BoundReport {
        k,
        b,
        p: levels.p,
        epsilon: levels.epsilon,
        fix_ok,
        worst_fix,
        avoidance_ok,
        worst_avoidance,
        forbidding_sets_checked: checked,
    })
}
