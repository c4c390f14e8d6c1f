//! Peeling a host graph into a resolution certificate.
//!
//! A resolution witnesses that a graph can be consumed configuration by
//! configuration: step i matches a library template in the current graph
//! G_{i-1}, deletes the matched cores Q_i, and continues on
//! G_i = G_{i-1} - Q_i until the remainder — the terminal residue — is
//! itself reducible with empty boundary. The builder is greedy and
//! deterministic: templates are tried in library order, candidate images in
//! ascending vertex order, so identical inputs yield identical certificates.
//!
//! Matching is not trusted: every accepted step is re-verified by
//! [`check_reducible`] against the configuration actually induced in
//! G_{i-1} (whose degrees and extra edges may differ from the template),
//! and candidates that fail are skipped. [`validate_resolution`] replays a
//! finished certificate from scratch with the same checks, reporting every
//! violated clause as data rather than failing fast.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::graph::{Face, Graph, GraphError, PlaneGraph, RotationSystem, VertexId};
use crate::pattern::{embeddings, DegreeBound, Embedding, PatternGraph};
use crate::reducibility::{
    check_reducible, Configuration, FamilyViolation, ForbiddenFamily, Mode, ReducibilityError,
};

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error("template `{template}` uses face checks and needs an embedding")]
    NeedsEmbedding { template: String },
    #[error("embedding rejected: {0}")]
    BadEmbedding(#[from] GraphError),
    #[error("graph contains forbidden `{}` on vertices {:?}", .violation.rule, .violation.witness)]
    FamilyViolation { violation: FamilyViolation },
    #[error("no library template matches the remaining {} vertices", .residual.n())]
    Stuck { residual: Graph },
    #[error("template `{template}`: core {v} has an open degree bound, so no worst case exists")]
    UnboundedCore { template: String, v: VertexId },
    #[error("template `{template}` is malformed: {source}")]
    BadTemplate { template: String, source: ReducibilityError },
    #[error("template `{template}` does not satisfy its promised reducibility")]
    TemplateNotReducible { template: String },
}

/// Embedding-dependent side condition on a match, phrased over
/// template-local vertex ids. Face shapes are multisets of walk degrees
/// (so `[3, 4, 4]` is a 3-face whose corners have degrees 3, 4 and 4 in
/// the current graph, in any order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchCheck {
    /// The image of `v` lies on at least `count` faces of the given shape.
    OnFaceShape { v: VertexId, shape: Vec<u32>, count: usize },
    /// The image of `v` lies on a face of the given length.
    OnFaceLen { v: VertexId, len: usize },
    /// Some 3-face carries a 3-vertex adjacent to the image of `v` without
    /// the image itself.
    PendentTriangle { v: VertexId },
    /// The images of `u` and `v` lie on vertex-disjoint faces of the shape.
    DisjointFaceShapes { u: VertexId, v: VertexId, shape: Vec<u32> },
}

/// One library entry: a pattern with degree bounds, a designated boundary,
/// optional face checks, and the promise that every match (with boundary
/// removed) is a reducible configuration — strongly unless `weak` is set,
/// in which case `fix` names the template-local vertices promised fixable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigTemplate {
    pub name: String,
    pub pattern: PatternGraph,
    pub boundary: BTreeSet<VertexId>,
    pub checks: Vec<MatchCheck>,
    pub weak: bool,
    pub fix: Option<BTreeSet<VertexId>>,
}

impl ConfigTemplate {
    /// Non-boundary pattern vertices in ascending id order.
    pub fn cores(&self) -> Vec<VertexId> {
        self.pattern.graph.vertices().filter(|v| !self.boundary.contains(v)).collect()
    }

    pub fn needs_embedding(&self) -> bool {
        !self.checks.is_empty()
    }

    /// The template instantiated at its extremal promised degrees:
    /// `Exact(d)` and `AtMost(d)` cores take host degree `d`, which gives
    /// the smallest (hardest) residual lists; reducibility there implies it
    /// for every admissible match. Open-ended core bounds (`Any`,
    /// `AtLeast`) admit no fixed worst case and are rejected.
    pub fn worst_case_configuration(&self) -> Result<Configuration, ResolutionError> {
        let mut host = BTreeMap::new();
        for v in self.cores() {
            let d = match self.pattern.bound(v) {
                DegreeBound::Exact(d) | DegreeBound::AtMost(d) => d as u32,
                DegreeBound::Any | DegreeBound::AtLeast(_) => {
                    return Err(ResolutionError::UnboundedCore { template: self.name.clone(), v })
                }
            };
            host.insert(v, d);
        }
        Configuration::new(
            self.pattern.graph.clone(),
            self.boundary.clone(),
            host,
            self.fix.clone(),
        )
        .map_err(|source| ResolutionError::BadTemplate { template: self.name.clone(), source })
    }
}

/// An ordered list of templates sharing one color count and forbidden
/// family. Order is the builder's priority: cheap, always-applicable
/// templates belong first.
#[derive(Debug, Clone)]
pub struct ConfigurationLibrary {
    pub name: String,
    pub k: u32,
    pub family: ForbiddenFamily,
    pub templates: Vec<ConfigTemplate>,
}

impl ConfigurationLibrary {
    /// Re-derives every template's reducibility promise at its worst-case
    /// degrees. A library should pass this check before being used.
    pub fn verify_templates(&self) -> Result<(), ResolutionError> {
        for t in &self.templates {
            let cfg = t.worst_case_configuration()?;
            let mode = if t.weak { Mode::Weak } else { Mode::Strong };
            let report = check_reducible(&cfg, self.k, &self.family, mode)
                .map_err(|source| ResolutionError::BadTemplate {
                    template: t.name.clone(),
                    source,
                })?;
            if !report.verdict || report.declared_fix_ok == Some(false) {
                return Err(ResolutionError::TemplateNotReducible { template: t.name.clone() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolutionKind {
    Strong,
    Weak,
}

/// One peel: which template fired, where it mapped, and what was removed.
/// `fix` records the verified fixable subset of `peeled` (all of it for
/// strong steps).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionStep {
    pub index: usize,
    pub template: String,
    pub map: BTreeMap<VertexId, VertexId>,
    pub peeled: BTreeSet<VertexId>,
    pub boundary: BTreeSet<VertexId>,
    pub fix: BTreeSet<VertexId>,
}

/// A complete peeling certificate. `b` is the effective bound actually
/// achieved: the largest peeled set or residue. The peeled sets together
/// with the residue partition the host's vertices; `residue_fix` is the
/// verified fixable subset of the residue (all of it for certificates
/// whose residue is strongly reducible).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub k: u32,
    pub b: u32,
    pub family: String,
    pub kind: ResolutionKind,
    pub steps: Vec<ResolutionStep>,
    pub residue: BTreeSet<VertexId>,
    pub residue_fix: BTreeSet<VertexId>,
}

impl Resolution {
    /// Largest peeled set or residue — the bound downstream estimates use.
    pub fn effective_b(&self) -> u32 {
        self.steps
            .iter()
            .map(|s| s.peeled.len())
            .chain([self.residue.len()])
            .max()
            .unwrap_or(0) as u32
    }

    /// All vertices with verified fixability: the fix image of every step
    /// plus the fixable part of the residue. For strong certificates this
    /// is the whole vertex set; for weak ones each layer still contributes
    /// at least one vertex, so the union has at least |V|/b members.
    pub fn fix_vertices(&self) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<VertexId> =
            self.steps.iter().flat_map(|s| s.fix.iter().copied()).collect();
        out.extend(self.residue_fix.iter().copied());
        out
    }
}

fn face_shape_matches(graph: &Graph, face: &Face, shape: &[u32]) -> bool {
    if face.len() != shape.len() {
        return false;
    }
    let mut walk: Vec<u32> = face.walk.iter().map(|&v| graph.degree(v) as u32).collect();
    walk.sort_unstable();
    let mut want = shape.to_vec();
    want.sort_unstable();
    walk == want
}

fn check_holds(graph: &Graph, faces: &[Face], check: &MatchCheck, m: &Embedding) -> bool {
    let image = |v: &VertexId| m.get(v).copied();
    match check {
        MatchCheck::OnFaceShape { v, shape, count } => image(v).is_some_and(|img| {
            faces
                .iter()
                .filter(|f| f.incidences(img) > 0 && face_shape_matches(graph, f, shape))
                .count()
                >= *count
        }),
        MatchCheck::OnFaceLen { v, len } => image(v)
            .is_some_and(|img| faces.iter().any(|f| f.incidences(img) > 0 && f.len() == *len)),
        MatchCheck::PendentTriangle { v } => image(v).is_some_and(|img| {
            faces.iter().any(|f| {
                f.len() == 3
                    && f.incidences(img) == 0
                    && f.walk.iter().any(|&w| graph.degree(w) == 3 && graph.has_edge(img, w))
            })
        }),
        MatchCheck::DisjointFaceShapes { u, v, shape } => {
            let (Some(iu), Some(iv)) = (image(u), image(v)) else { return false };
            let with_shape = |x: VertexId| -> Vec<BTreeSet<VertexId>> {
                faces
                    .iter()
                    .filter(|f| f.incidences(x) > 0 && face_shape_matches(graph, f, shape))
                    .map(|f| f.vertex_set())
                    .collect()
            };
            let fu = with_shape(iu);
            let fv = with_shape(iv);
            fu.iter().any(|a| fv.iter().any(|b| a.is_disjoint(b)))
        }
    }
}

/// All matches of `template` in `graph`, sorted by image (ascending
/// template id order), each an injective homomorphism satisfying the
/// degree bounds and face checks. Face checks need `embedding`; templates
/// without them ignore it.
pub fn match_configuration(
    graph: &Graph,
    template: &ConfigTemplate,
    embedding: Option<&RotationSystem>,
) -> Result<Vec<Embedding>, ResolutionError> {
    let faces = if template.needs_embedding() {
        let rotation = embedding.ok_or_else(|| ResolutionError::NeedsEmbedding {
            template: template.name.clone(),
        })?;
        Some(PlaneGraph::new(graph.clone(), rotation.clone())?.faces())
    } else {
        None
    };
    let mut found = embeddings(graph, &template.pattern, false);
    if let Some(faces) = &faces {
        found.retain(|m| template.checks.iter().all(|c| check_holds(graph, faces, c, m)));
    }
    Ok(found)
}

/// Verifies one candidate match as an actual reducible configuration in
/// `g` and stamps it into a step. The configuration checked is the induced
/// subgraph on the image (so host edges the template did not mention count
/// too) at the image's true degrees. Returns `None` when the instance
/// fails, letting the builder try the next candidate.
fn verify_step(
    g: &Graph,
    library: &ConfigurationLibrary,
    t: &ConfigTemplate,
    m: &Embedding,
    index: usize,
) -> Option<ResolutionStep> {
    let image: BTreeSet<VertexId> = m.values().copied().collect();
    let boundary: BTreeSet<VertexId> =
        t.boundary.iter().filter_map(|v| m.get(v).copied()).collect();
    let peeled: BTreeSet<VertexId> = image.difference(&boundary).copied().collect();
    let host: BTreeMap<VertexId, u32> =
        peeled.iter().map(|&v| (v, g.degree(v) as u32)).collect();
    let declared: Option<BTreeSet<VertexId>> =
        t.fix.as_ref().map(|f| f.iter().filter_map(|v| m.get(v).copied()).collect());
    let cfg = Configuration::new(g.induced(&image), boundary.clone(), host, declared).ok()?;
    let mode = if t.weak { Mode::Weak } else { Mode::Strong };
    let report = check_reducible(&cfg, library.k, &library.family, mode).ok()?;
    if !report.verdict || report.declared_fix_ok == Some(false) {
        return None;
    }
    Some(ResolutionStep {
        index,
        template: t.name.clone(),
        map: m.clone(),
        peeled,
        boundary,
        fix: report.fix_set,
    })
}

fn next_step(
    g: &Graph,
    library: &ConfigurationLibrary,
    b_cap: u32,
    rotation: Option<&RotationSystem>,
    conservative_faces: bool,
    index: usize,
) -> Result<Option<(ResolutionStep, bool)>, ResolutionError> {
    for t in &library.templates {
        if t.cores().len() as u32 > b_cap {
            continue;
        }
        if t.needs_embedding() && (rotation.is_none() || (conservative_faces && index > 0)) {
            continue;
        }
        for m in &match_configuration(g, t, rotation)? {
            if let Some(step) = verify_step(g, library, t, m, index) {
                return Ok(Some((step, t.weak)));
            }
        }
    }
    Ok(None)
}

/// Is the whole remainder a boundary-free reducible configuration? Returns
/// the kind it supports (strong when fully fixable) and its fixable set.
fn residue_kind(
    g: &Graph,
    library: &ConfigurationLibrary,
) -> Option<(ResolutionKind, BTreeSet<VertexId>)> {
    let host: BTreeMap<VertexId, u32> = g.vertices().map(|v| (v, g.degree(v) as u32)).collect();
    let cfg = Configuration::new(g.clone(), BTreeSet::new(), host, None).ok()?;
    let report = check_reducible(&cfg, library.k, &library.family, Mode::Weak).ok()?;
    if report.strong {
        Some((ResolutionKind::Strong, report.fix_set))
    } else if report.weak {
        Some((ResolutionKind::Weak, report.fix_set))
    } else {
        None
    }
}

/// Rotation inherited by a subgraph: surviving vertices keep their cyclic
/// order with deleted neighbors skipped.
fn restrict_rotation(rotation: &RotationSystem, g: &Graph) -> RotationSystem {
    RotationSystem::new(
        g.vertices()
            .map(|v| {
                let order: Vec<VertexId> =
                    rotation.order_at(v).iter().copied().filter(|&u| g.has_vertex(u)).collect();
                (v, order)
            })
            .collect(),
    )
}

/// Greedily peels `graph` with `library` until it is gone or the remainder
/// (at most `b_cap` vertices) is boundary-free reducible. Steps never peel
/// more than `b_cap` vertices: larger templates are skipped.
///
/// The input must avoid the library's forbidden family outright. Face
/// checks run against the embedding inherited from `embedding` as vertices
/// disappear (faces merge); `conservative_faces` restricts face-checked
/// templates to the first step, where the embedding is the original one.
/// Without an embedding, face-checked templates are skipped entirely.
pub fn build_resolution(
    graph: &Graph,
    library: &ConfigurationLibrary,
    b_cap: u32,
    embedding: Option<&RotationSystem>,
    conservative_faces: bool,
) -> Result<Resolution, ResolutionError> {
    if let Some(violation) = library.family.violation(graph) {
        return Err(ResolutionError::FamilyViolation { violation });
    }
    if let Some(rot) = embedding {
        rot.validate(graph)?;
    }
    let mut g = graph.clone();
    let mut rotation = embedding.cloned();
    let mut steps: Vec<ResolutionStep> = Vec::new();
    let mut kind = ResolutionKind::Strong;
    let mut residue_fix = BTreeSet::new();
    while g.n() > 0 {
        match next_step(&g, library, b_cap, rotation.as_ref(), conservative_faces, steps.len())? {
            Some((step, weak)) => {
                if weak {
                    kind = ResolutionKind::Weak;
                }
                g = g.without_vertices(&step.peeled);
                rotation = rotation.map(|r| restrict_rotation(&r, &g));
                steps.push(step);
            }
            None => {
                match residue_kind(&g, library) {
                    Some((k, fix)) if g.n() as u32 <= b_cap => {
                        if k == ResolutionKind::Weak {
                            kind = ResolutionKind::Weak;
                        }
                        residue_fix = fix;
                        break;
                    }
                    _ => return Err(ResolutionError::Stuck { residual: g }),
                }
            }
        }
    }
    let residue = g.vertex_set();
    let mut resolution = Resolution {
        k: library.k,
        b: 0,
        family: library.family.name().to_string(),
        kind,
        steps,
        residue,
        residue_fix,
    };
    resolution.b = resolution.effective_b();
    Ok(resolution)
}

/// One violated certificate clause; `step` is absent for whole-certificate
/// clauses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub step: Option<usize>,
    pub clause: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<ValidationIssue>,
    pub effective_b: u32,
}

/// Replays a certificate against `graph` and `family` from scratch: the
/// peeled sets and residue must partition the vertices, each step's
/// configuration — as induced in the reconstructed G_{i-1} at its true
/// degrees — must pass [`check_reducible`] with the recorded fix set, weak
/// certificates need a nonempty fix image everywhere, and sizes must stay
/// within the declared `b`. Violations are collected, not thrown.
pub fn validate_resolution(
    graph: &Graph,
    res: &Resolution,
    family: &ForbiddenFamily,
) -> ValidationReport {
    let mut issues: Vec<ValidationIssue> = Vec::new();
    let mut flag = |step: Option<usize>, clause: &str, detail: String| {
        issues.push(ValidationIssue { step, clause: clause.to_string(), detail });
    };

    if res.family != family.name() {
        flag(
            None,
            "family",
            format!("certificate names family `{}`, validating against `{}`", res.family, family.name()),
        );
    }

    let mut seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    for s in &res.steps {
        for &v in &s.peeled {
            *seen.entry(v).or_default() += 1;
        }
    }
    for &v in &res.residue {
        *seen.entry(v).or_default() += 1;
    }
    let missing: Vec<VertexId> = graph.vertices().filter(|v| !seen.contains_key(v)).collect();
    if !missing.is_empty() {
        flag(None, "partition", format!("vertices never peeled nor residual: {missing:?}"));
    }
    let duplicated: Vec<VertexId> =
        seen.iter().filter(|&(_, &c)| c > 1).map(|(&v, _)| v).collect();
    if !duplicated.is_empty() {
        flag(None, "partition", format!("vertices claimed twice: {duplicated:?}"));
    }
    let alien: Vec<VertexId> = seen.keys().copied().filter(|&v| !graph.has_vertex(v)).collect();
    if !alien.is_empty() {
        flag(None, "partition", format!("vertices outside the graph: {alien:?}"));
    }

    let mode = match res.kind {
        ResolutionKind::Strong => Mode::Strong,
        ResolutionKind::Weak => Mode::Weak,
    };
    let mut g = graph.clone();
    for s in &res.steps {
        let image: BTreeSet<VertexId> = s.map.values().copied().collect();
        let support: BTreeSet<VertexId> = s.peeled.union(&s.boundary).copied().collect();
        if s.map.len() != image.len() {
            flag(Some(s.index), "match", "vertex map is not injective".to_string());
        }
        if image != support {
            flag(
                Some(s.index),
                "match",
                "map image differs from peeled set plus boundary".to_string(),
            );
        }
        if s.peeled.is_empty() {
            flag(Some(s.index), "progress", "step peels nothing".to_string());
        }
        if s.peeled.len() as u32 > res.b {
            flag(
                Some(s.index),
                "size",
                format!("peels {} vertices, certificate claims b = {}", s.peeled.len(), res.b),
            );
        }
        if res.kind == ResolutionKind::Weak && s.fix.is_empty() {
            flag(Some(s.index), "fix", "weak step records an empty fix image".to_string());
        }
        if !s.fix.is_subset(&s.peeled) {
            flag(Some(s.index), "fix", "fix image leaves the peeled set".to_string());
        }
        let absent: Vec<VertexId> =
            support.iter().copied().filter(|&v| !g.has_vertex(v)).collect();
        if !absent.is_empty() {
            flag(
                Some(s.index),
                "nested",
                format!("step uses vertices no longer present: {absent:?}"),
            );
        } else if !s.peeled.is_empty() {
            let host: BTreeMap<VertexId, u32> =
                s.peeled.iter().map(|&v| (v, g.degree(v) as u32)).collect();
            match Configuration::new(
                g.induced(&support),
                s.boundary.clone(),
                host,
                Some(s.fix.clone()),
            ) {
                Err(e) => flag(
                    Some(s.index),
                    "reducibility",
                    format!("configuration rejected: {e}"),
                ),
                Ok(cfg) => match check_reducible(&cfg, res.k, family, mode) {
                    Err(e) => flag(
                        Some(s.index),
                        "reducibility",
                        format!("reducibility check failed: {e}"),
                    ),
                    Ok(report) => {
                        if !report.verdict {
                            flag(
                                Some(s.index),
                                "reducibility",
                                "instantiated configuration is not reducible".to_string(),
                            );
                        }
                        if report.declared_fix_ok == Some(false) {
                            flag(
                                Some(s.index),
                                "fix",
                                "recorded fix set is not actually fixable".to_string(),
                            );
                        }
                    }
                },
            }
        }
        g = g.without_vertices(&s.peeled);
    }

    if !res.residue_fix.is_subset(&res.residue) {
        flag(None, "fix", "residue fix set leaves the residue".to_string());
    }
    if res.kind == ResolutionKind::Weak
        && !res.residue.is_empty()
        && res.residue_fix.is_empty()
    {
        flag(None, "fix", "weak certificate records an empty residue fix".to_string());
    }
    if g.vertex_set() != res.residue {
        flag(
            None,
            "residue",
            format!(
                "replay leaves {:?}, certificate records {:?}",
                g.vertex_set(),
                res.residue
            ),
        );
    } else if !res.residue.is_empty() {
        if res.residue.len() as u32 > res.b {
            flag(
                None,
                "size",
                format!("residue has {} vertices, certificate claims b = {}", res.residue.len(), res.b),
            );
        }
        let host: BTreeMap<VertexId, u32> =
            g.vertices().map(|v| (v, g.degree(v) as u32)).collect();
        match Configuration::new(g.clone(), BTreeSet::new(), host, Some(res.residue_fix.clone())) {
            Err(e) => flag(None, "residue", format!("residue rejected: {e}")),
            Ok(cfg) => match check_reducible(&cfg, res.k, family, mode) {
                Err(e) => flag(None, "residue", format!("residue check failed: {e}")),
                Ok(report) => {
                    if !report.verdict {
                        flag(
                            None,
                            "residue",
                            "terminal residue is not boundary-free reducible".to_string(),
                        );
                    }
                    if report.declared_fix_ok == Some(false) {
                        flag(
                            None,
                            "fix",
                            "recorded residue fix set is not actually fixable".to_string(),
                        );
                    }
                }
            },
        }
    }

    ValidationReport { valid: issues.is_empty(), issues, effective_b: res.effective_b() }
}

// ---------------------------------------------------------------------------
// Built-in template libraries, one per supported theorem-style setting.

fn template(
    name: &str,
    vertices: &[(VertexId, DegreeBound)],
    edges: &[(VertexId, VertexId)],
    boundary: &[VertexId],
) -> ConfigTemplate {
    let ids: Vec<VertexId> = vertices.iter().map(|&(v, _)| v).collect();
    let graph = Graph::from_edges(&ids, edges).expect("template data forms a simple graph");
    ConfigTemplate {
        name: name.to_string(),
        pattern: PatternGraph { graph, degree: vertices.iter().copied().collect() },
        boundary: boundary.iter().copied().collect(),
        checks: Vec::new(),
        weak: false,
        fix: None,
    }
}

/// k=5 against the diamond family: a 3⁻-vertex, else a triangle carrying
/// two 4-vertices (third corner boundary).
pub fn library_thm2() -> ConfigurationLibrary {
    use DegreeBound::{Any, AtMost, Exact};
    ConfigurationLibrary {
        name: "thm2".to_string(),
        k: 5,
        family: crate::builtins::family_diamond(),
        templates: vec![
            template("light-vertex", &[(0, AtMost(3))], &[], &[]),
            template(
                "tight-triangle",
                &[(0, Exact(4)), (1, Exact(4)), (2, Any)],
                &[(0, 1), (0, 2), (1, 2)],
                &[2],
            ),
        ],
    }
}

/// k=4 against squares and near triangles: a 2⁻-vertex, a path of three
/// 3-vertices, or a d-vertex carrying d-2 cubic neighbors next to a
/// triangle — one template per way the triangle can sit relative to the
/// star, instantiated for d up to `d_max`.
pub fn library_thm3(d_max: u32) -> ConfigurationLibrary {
    use DegreeBound::{Any, AtMost, Exact};
    let mut templates = vec![
        template("light-vertex", &[(0, AtMost(2))], &[], &[]),
        template(
            "cubic-path",
            &[(0, Exact(3)), (1, Exact(3)), (2, Exact(3))],
            &[(0, 1), (1, 2)],
            &[],
        ),
    ];
    for d in 4..=d_max.max(4) {
        let leaves: Vec<VertexId> = (1..=d - 2).collect();
        let star_vertices = |extra: &[(VertexId, DegreeBound)]| -> Vec<(VertexId, DegreeBound)> {
            let mut vs = vec![(0, Exact(d as usize))];
            vs.extend(leaves.iter().map(|&l| (l, Exact(3))));
            vs.extend_from_slice(extra);
            vs
        };
        let star_edges = |extra: &[(VertexId, VertexId)]| -> Vec<(VertexId, VertexId)> {
            let mut es: Vec<(VertexId, VertexId)> = leaves.iter().map(|&l| (0, l)).collect();
            es.extend_from_slice(extra);
            es
        };
        let (w1, w2, w3) = (d - 1, d, d + 1);
        // Center rides a triangle whose other corners are outside the star.
        templates.push(template(
            &format!("star-on-outer-triangle-d{d}"),
            &star_vertices(&[(w1, Any), (w2, Any)]),
            &star_edges(&[(0, w1), (0, w2), (w1, w2)]),
            &[w1, w2],
        ));
        // Center rides a triangle through one of its cubic leaves.
        templates.push(template(
            &format!("star-on-mixed-triangle-d{d}"),
            &star_vertices(&[(w1, Any)]),
            &star_edges(&[(0, w1), (1, w1)]),
            &[w1],
        ));
        // The triangle sits entirely inside the star: two leaves joined.
        templates.push(template(
            &format!("star-on-inner-triangle-d{d}"),
            &star_vertices(&[]),
            &star_edges(&[(1, 2)]),
            &[],
        ));
        // Center is adjacent to a triangle it does not ride.
        templates.push(template(
            &format!("star-beside-triangle-d{d}"),
            &star_vertices(&[(w1, Any), (w2, Any), (w3, Any)]),
            &star_edges(&[(0, w1), (w1, w2), (w1, w3), (w2, w3)]),
            &[w1, w2, w3],
        ));
        // A cubic leaf rides the triangle instead of the center.
        templates.push(template(
            &format!("star-leaf-on-triangle-d{d}"),
            &star_vertices(&[(w1, Any), (w2, Any)]),
            &star_edges(&[(1, w1), (1, w2), (w1, w2)]),
            &[w1, w2],
        ));
    }
    ConfigurationLibrary {
        name: "thm3".to_string(),
        k: 4,
        family: crate::builtins::family_squares_near_triangles(),
        templates,
    }
}

/// k=4 against short cycles: a 2⁻-vertex, a triangle carrying two
/// 3-vertices, a 4-vertex on two (3,4,4)-faces, or two adjacent 4-vertices
/// on disjoint (3,4,4)-faces. The last two check actual faces, so they
/// need an embedding.
pub fn library_thm4() -> ConfigurationLibrary {
    use DegreeBound::{Any, AtMost, Exact};
    let mut hub = template(
        "twin-face-hub",
        &[(0, Exact(4)), (1, Exact(3)), (2, Exact(4)), (3, Exact(3)), (4, Exact(4))],
        &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)],
        &[],
    );
    hub.checks = vec![MatchCheck::OnFaceShape { v: 0, shape: vec![3, 4, 4], count: 2 }];
    let mut pair = template(
        "twin-face-pair",
        &[
            (0, Exact(4)),
            (1, Exact(4)),
            (2, Exact(3)),
            (3, Exact(4)),
            (4, Exact(3)),
            (5, Exact(4)),
        ],
        &[(0, 1), (0, 2), (0, 3), (2, 3), (1, 4), (1, 5), (4, 5)],
        &[],
    );
    pair.checks = vec![MatchCheck::DisjointFaceShapes { u: 0, v: 1, shape: vec![3, 4, 4] }];
    ConfigurationLibrary {
        name: "thm4".to_string(),
        k: 4,
        family: crate::builtins::family_short_cycles(),
        templates: vec![
            template("light-vertex", &[(0, AtMost(2))], &[], &[]),
            template(
                "tight-triangle",
                &[(0, Exact(3)), (1, Exact(3)), (2, Any)],
                &[(0, 1), (0, 2), (1, 2)],
                &[2],
            ),
            hub,
            pair,
        ],
    }
}

/// k=5 against houses and K_{2,3}: a 3⁻-vertex and four 4-cycle shapes, of
/// which the (4,5,5,5) square is only weakly reducible — its three heavy
/// corners are the promised fix.
pub fn library_thm5() -> ConfigurationLibrary {
    use DegreeBound::{Any, AtMost, Exact};
    let mut lopsided = template(
        "lopsided-square",
        &[(0, Exact(4)), (1, Exact(5)), (2, Exact(5)), (3, Exact(5))],
        &[(0, 1), (1, 2), (2, 3), (0, 3)],
        &[],
    );
    lopsided.weak = true;
    lopsided.fix = Some([1, 2, 3].into_iter().collect());
    ConfigurationLibrary {
        name: "thm5".to_string(),
        k: 5,
        family: crate::builtins::family_house_biclique(),
        templates: vec![
            template("light-vertex", &[(0, AtMost(3))], &[], &[]),
            template(
                "heavy-pair-square",
                &[(0, Exact(4)), (1, Exact(4)), (2, Any), (3, Any)],
                &[(0, 1), (1, 2), (2, 3), (0, 3)],
                &[2, 3],
            ),
            template(
                "square-454",
                &[(0, Exact(4)), (1, Exact(5)), (2, Exact(4)), (3, Any)],
                &[(0, 1), (1, 2), (2, 3), (0, 3)],
                &[3],
            ),
            lopsided,
            template(
                "quartic-path",
                &[(0, Exact(4)), (1, Exact(4)), (2, Exact(4)), (3, Exact(4))],
                &[(0, 1), (1, 2), (2, 3)],
                &[],
            ),
        ],
    }
}

pub const BUILTIN_LIBRARIES: [&str; 4] = ["thm2", "thm3", "thm4", "thm5"];

/// Looks up a built-in library by name; `d_max` caps the star templates
/// where a library has degree-parameterized entries.
pub fn builtin_library(name: &str, d_max: u32) -> Option<ConfigurationLibrary> {
    match name {
        "thm2" => Some(library_thm2()),
        "thm3" => Some(library_thm3(d_max)),
        "thm4" => Some(library_thm4()),
        "thm5" => Some(library_thm5()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{
        dodecahedron, family_diamond, family_house, family_house_biclique, icosahedron,
        icosidodecahedron, plane_graph_from_faces, truncated_cube,
    };
    use crate::planegen::random_family_free;
    use crate::rng::Stream;

    fn c5() -> Graph {
        Graph::cycle(&[0, 1, 2, 3, 4])
    }

    /// A degree-4 hub riding two triangles, every spare valence closed off
    /// by pendant leaves: 0 is the only (3,4,4)-double-face vertex.
    fn hub_gadget() -> PlaneGraph {
        plane_graph_from_faces(&[
            vec![0, 1, 2],
            vec![0, 4, 3],
            vec![5, 1, 0, 3, 8, 3, 4, 9, 4, 10, 4, 0, 2, 6, 2, 7, 2, 1],
        ])
    }

    /// Two disjoint (3,4,4)-triangles whose 4-valent corners 0 and 3 are
    /// adjacent, padded with leaves to reach the promised degrees.
    fn twin_gadget() -> PlaneGraph {
        plane_graph_from_faces(&[
            vec![0, 1, 2],
            vec![3, 5, 4],
            vec![6, 0, 3, 10, 3, 4, 11, 4, 5, 12, 5, 13, 5, 3, 0, 2, 9, 2, 1, 7, 1, 8, 1, 0],
        ])
    }

    /// The test-only library: one triangle template demanding 4-valent
    /// cores, which matches nothing whose degrees are too small.
    fn picky_library() -> ConfigurationLibrary {
        use DegreeBound::{Any, Exact};
        ConfigurationLibrary {
            name: "picky".to_string(),
            k: 5,
            family: ForbiddenFamily::none(),
            templates: vec![template(
                "tight-triangle",
                &[(0, Exact(4)), (1, Exact(4)), (2, Any)],
                &[(0, 1), (0, 2), (1, 2)],
                &[2],
            )],
        }
    }

    #[test]
    fn builtin_libraries_verify_their_templates() {
        for name in BUILTIN_LIBRARIES {
            let lib = builtin_library(name, 8).unwrap();
            assert_eq!(lib.name, name);
            lib.verify_templates().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(builtin_library("thm9", 8).is_none());
        assert_eq!(library_thm3(8).templates.len(), 2 + 5 * 5);
        assert!(library_thm5().templates.iter().any(|t| t.weak));
    }

    #[test]
    fn match_counts_on_reference_hosts() {
        // Every pentagon vertex is a 3⁻-vertex.
        let light = &library_thm2().templates[0];
        assert_eq!(match_configuration(&c5(), light, None).unwrap().len(), 5);
        // Truncated cube: each triangle is all-cubic, so the two-cubic
        // triangle template matches (all corner orderings).
        let t4 = library_thm4();
        let matches =
            match_configuration(&truncated_cube().graph, &t4.templates[1], None).unwrap();
        assert!(!matches.is_empty());
        // Icosidodecahedron: 4-regular with triangles.
        let t2 = library_thm2();
        let matches =
            match_configuration(&icosidodecahedron().graph, &t2.templates[1], None).unwrap();
        assert!(!matches.is_empty());
    }

    #[test]
    fn face_checked_hub_needs_its_embedding() {
        let gadget = hub_gadget();
        assert!(gadget.is_plane_embedding());
        let hub = library_thm4().templates[2].clone();
        assert_eq!(hub.name, "twin-face-hub");
        let err = match_configuration(&gadget.graph, &hub, None).unwrap_err();
        assert!(matches!(err, ResolutionError::NeedsEmbedding { .. }));
        let matches =
            match_configuration(&gadget.graph, &hub, Some(&gadget.rotation)).unwrap();
        // Only vertex 0 rides two (3,4,4)-faces; its two triangles can be
        // assigned to the template's two in either order.
        assert_eq!(matches.len(), 2);
        assert!(matches.iter().all(|m| m[&0] == 0));
    }

    #[test]
    fn disjoint_faces_tell_twin_hosts_from_shared_hubs() {
        let pair = library_thm4().templates[3].clone();
        assert_eq!(pair.name, "twin-face-pair");
        let twin = twin_gadget();
        assert!(twin.is_plane_embedding());
        let matches = match_configuration(&twin.graph, &pair, Some(&twin.rotation)).unwrap();
        assert_eq!(matches.len(), 2);
        for m in &matches {
            let hubs: BTreeSet<VertexId> = [m[&0], m[&1]].into_iter().collect();
            assert_eq!(hubs, BTreeSet::from([0, 3]));
        }
        // The hub gadget's two triangles share vertex 0, so no pair of
        // adjacent 4-vertices has disjoint qualifying faces.
        let hubg = hub_gadget();
        assert!(match_configuration(&hubg.graph, &pair, Some(&hubg.rotation))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn five_light_steps_consume_a_pentagon() {
        let lib = library_thm3(6);
        let res = build_resolution(&c5(), &lib, 4, None, false).unwrap();
        assert_eq!(res.steps.len(), 5);
        assert!(res.steps.iter().all(|s| s.template == "light-vertex"));
        assert!(res.steps.iter().all(|s| s.peeled.len() == 1 && s.fix == s.peeled));
        assert!(res.residue.is_empty() && res.residue_fix.is_empty());
        assert_eq!((res.k, res.b, res.kind), (4, 1, ResolutionKind::Strong));
        assert_eq!(res.fix_vertices(), c5().vertex_set());
        assert!(validate_resolution(&c5(), &res, &lib.family).valid);
    }

    #[test]
    fn truncated_cube_resolves_and_validates() {
        let tc = truncated_cube();
        let lib = library_thm4();
        let res = build_resolution(&tc.graph, &lib, 6, Some(&tc.rotation), false).unwrap();
        assert_eq!(res.steps[0].template, "tight-triangle");
        assert_eq!(res.steps[0].boundary.len(), 1);
        assert!(res.residue.is_empty());
        assert_eq!(res.kind, ResolutionKind::Strong);
        assert!(res.b <= 3);
        let report = validate_resolution(&tc.graph, &res, &lib.family);
        assert!(report.valid, "{:?}", report.issues);
        assert_eq!(report.effective_b, res.b);
        // Determinism: an identical build yields an identical certificate.
        let again = build_resolution(&tc.graph, &lib, 6, Some(&tc.rotation), false).unwrap();
        assert_eq!(res, again);
    }

    #[test]
    fn icosidodecahedron_resolves_under_the_triangle_library() {
        let m = icosidodecahedron();
        let lib = library_thm2();
        let res = build_resolution(&m.graph, &lib, 6, Some(&m.rotation), false).unwrap();
        assert_eq!(res.steps[0].template, "tight-triangle");
        assert!(res.residue.is_empty());
        assert!(validate_resolution(&m.graph, &res, &lib.family).valid);
    }

    #[test]
    fn dodecahedron_resolves_under_the_path_library() {
        let d = dodecahedron();
        let lib = library_thm3(8);
        let res = build_resolution(&d.graph, &lib, 6, Some(&d.rotation), false).unwrap();
        assert_eq!(res.steps[0].template, "cubic-path");
        assert!(res.residue.is_empty());
        assert!(validate_resolution(&d.graph, &res, &lib.family).valid);
    }

    #[test]
    fn icosahedron_is_rejected_by_the_family_gate() {
        let err = build_resolution(
            &icosahedron().graph,
            &library_thm2(),
            6,
            None,
            false,
        )
        .unwrap_err();
        match err {
            ResolutionError::FamilyViolation { violation } => {
                assert_eq!(violation.rule, "diamond");
            }
            other => panic!("expected a family violation, got {other}"),
        }
    }

    #[test]
    fn stuck_reports_the_residual() {
        let err = build_resolution(&c5(), &picky_library(), 2, None, false).unwrap_err();
        match err {
            ResolutionError::Stuck { residual } => assert_eq!(residual.n(), 5),
            other => panic!("expected stuck, got {other}"),
        }
    }

    #[test]
    fn small_remainder_becomes_the_residue() {
        let triangle = Graph::cycle(&[0, 1, 2]);
        let lib = picky_library();
        let res = build_resolution(&triangle, &lib, 3, None, false).unwrap();
        assert!(res.steps.is_empty());
        assert_eq!(res.residue, BTreeSet::from([0, 1, 2]));
        // The triangle residue is strongly reducible: every vertex fixable.
        assert_eq!(res.residue_fix, res.residue);
        assert_eq!(res.b, 3);
        assert_eq!(res.fix_vertices(), res.residue);
        assert!(validate_resolution(&triangle, &res, &lib.family).valid);
    }

    #[test]
    fn leaves_are_peeled_before_face_templates_apply() {
        let gadget = hub_gadget();
        let lib = library_thm4();
        let res =
            build_resolution(&gadget.graph, &lib, 6, Some(&gadget.rotation), false).unwrap();
        assert_eq!(res.steps.len(), 11);
        assert!(res.steps.iter().all(|s| s.template == "light-vertex"));
        assert!(validate_resolution(&gadget.graph, &res, &lib.family).valid);
    }

    /// The weak square plus enough pendant leaves to realize its degrees.
    fn lopsided_host() -> Graph {
        Graph::from_edges(
            &(0..15).collect::<Vec<VertexId>>(),
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 6),
                (1, 7),
                (1, 8),
                (2, 9),
                (2, 10),
                (2, 11),
                (3, 12),
                (3, 13),
                (3, 14),
            ],
        )
        .unwrap()
    }

    #[test]
    fn weak_certificates_validate_and_mutations_are_flagged() {
        let host = lopsided_host();
        let family = family_house_biclique();
        let mut steps = vec![ResolutionStep {
            index: 0,
            template: "lopsided-square".to_string(),
            map: (0..4).map(|v| (v, v)).collect(),
            peeled: (0..4).collect(),
            boundary: BTreeSet::new(),
            fix: BTreeSet::from([1, 2, 3]),
        }];
        for (i, leaf) in (4..15).enumerate() {
            steps.push(ResolutionStep {
                index: i + 1,
                template: "light-vertex".to_string(),
                map: BTreeMap::from([(0, leaf)]),
                peeled: BTreeSet::from([leaf]),
                boundary: BTreeSet::new(),
                fix: BTreeSet::from([leaf]),
            });
        }
        let res = Resolution {
            k: 5,
            b: 4,
            family: family.name().to_string(),
            kind: ResolutionKind::Weak,
            steps,
            residue: BTreeSet::new(),
            residue_fix: BTreeSet::new(),
        };
        let report = validate_resolution(&host, &res, &family);
        assert!(report.valid, "{:?}", report.issues);
        assert_eq!(report.effective_b, 4);

        // Emptying a weak step's fix image breaks the fix clause.
        let mut defanged = res.clone();
        defanged.steps[0].fix.clear();
        let report = validate_resolution(&host, &defanged, &family);
        assert!(!report.valid);
        assert!(report.issues.iter().any(|i| i.clause == "fix"));

        // Validating against a different family is flagged by name.
        let report = validate_resolution(&host, &res, &family_house());
        assert!(!report.valid);
        assert!(report.issues.iter().any(|i| i.clause == "family"));
    }

    #[test]
    fn moving_a_boundary_vertex_into_the_peel_invalidates() {
        let tc = truncated_cube();
        let lib = library_thm4();
        let res = build_resolution(&tc.graph, &lib, 6, Some(&tc.rotation), false).unwrap();
        let mut bad = res.clone();
        let w = *bad.steps[0].boundary.iter().next().unwrap();
        bad.steps[0].boundary.clear();
        bad.steps[0].peeled.insert(w);
        let report = validate_resolution(&tc.graph, &bad, &lib.family);
        assert!(!report.valid);
        assert!(!report.issues.is_empty());
    }

    #[test]
    fn random_diamond_free_graphs_always_resolve() {
        // The two thm2 templates are unavoidable in diamond-free plane
        // graphs, so the builder must fully peel every sample.
        let family = family_diamond();
        let lib = library_thm2();
        for trial in 0..40u64 {
            let mut rng = Stream::new(23, trial, 0);
            let n = 4 + (trial as usize % 10);
            let deletions = trial as usize % 6;
            let pg = random_family_free(n, deletions, &family, &mut rng);
            let res = build_resolution(&pg.graph, &lib, 4, Some(&pg.rotation), false)
                .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
            assert!(res.b <= 2, "trial {trial} needed b = {}", res.b);
            assert_eq!(res.kind, ResolutionKind::Strong);
            assert!(res.residue.is_empty());
            let report = validate_resolution(&pg.graph, &res, &family);
            assert!(report.valid, "trial {trial}: {:?}", report.issues);
        }
    }
}
