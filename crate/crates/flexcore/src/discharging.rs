//! Exact-arithmetic discharging on plane graphs.
//!
//! A charge specification puts an affine amount of charge on every vertex
//! and face; ordered transfer rules then move charge along incidences. All
//! arithmetic is exact rational, every phase conserves the total, and the
//! audit lists whatever ends up negative. Five named specifications ship
//! with the crate (see [`builtin_spec`]).
//!
//! Rule semantics, precisely:
//!
//! * Rules fire in list order; each rule sees the state left by the
//!   previous one.
//! * Within one rule, every sender is evaluated against the same pre-rule
//!   snapshot, so peer senders cannot influence each other.
//! * A sender pays each receiver *occurrence*: a vertex that appears twice
//!   on a face walk counts twice in both directions.
//! * Each occurrence is claimed by the first transfer clause in the rule
//!   that matches it; later clauses skip it.
//! * `uniform-remainder` clauses split whatever the sender still holds
//!   (snapshot minus fixed payments of the same rule) equally among their
//!   occurrences. With zero occurrences the clause is inapplicable: charge
//!   stays put and the report records it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Face, PlaneGraph, VertexId};
use crate::rational::{rat, rat_int, rat_zero, serde_rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DischargeError {
    #[error("discharging requires a connected graph")]
    Disconnected,
    #[error("unknown charge specification `{0}`")]
    UnknownSpec(String),
}

/// A vertex or a face (by position in the embedding's face list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Element {
    Vertex(VertexId),
    Face(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vertex(v) => write!(f, "v{v}"),
            Element::Face(i) => write!(f, "f{i}"),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `slope · x + offset` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Affine {
    #[serde(with = "serde_rat")]
    pub slope: Rat,
    #[serde(with = "serde_rat")]
    pub offset: Rat,
}

impl Affine {
    pub fn new(slope: Rat, offset: Rat) -> Affine {
        Affine { slope, offset }
    }

    pub fn eval(&self, x: usize) -> Rat {
        &self.slope * rat_int(x as i64) + &self.offset
    }
}

/// Initial charge assignment: one affine form for vertices (of their
/// degree) and one for faces (of their walk length). The expected total is
/// what Euler's formula forces on every connected plane graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargeSpec {
    pub name: String,
    pub vertex: Affine,
    pub face: Affine,
    #[serde(with = "serde_rat")]
    pub expected_total: Rat,
}

/// Lower-bounded or exact integer test, written `3` or `4+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Exact(u32),
    AtLeast(u32),
}

impl Bound {
    pub fn admits(&self, x: usize) -> bool {
        match *self {
            Bound::Exact(b) => x == b as usize,
            Bound::AtLeast(b) => x >= b as usize,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(b) => write!(f, "{b}"),
            Bound::AtLeast(b) => write!(f, "{b}+"),
        }
    }
}

/// Which elements a rule collects charge from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sender {
    /// Vertices whose degree satisfies the bound.
    Vertices(Bound),
    /// Faces of matching length; `incident` further requires the presence
    /// (`true`) or absence (`false`) of an incident vertex in the degree
    /// class.
    Faces { len: Bound, incident: Option<(Bound, bool)> },
}

/// Degree multiset pattern for a face, e.g. `{3,4,4}` or `{4+,4+,4+}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceVec(pub Vec<Bound>);

impl FaceVec {
    /// Does the face's vertex-degree multiset satisfy the pattern? Tried
    /// over all assignments, so `{3,4+,4+}` matches degrees `(5,3,4)`.
    fn matches(&self, walk_degrees: &[usize]) -> bool {
        if walk_degrees.len() != self.0.len() {
            return false;
        }
        fn assign(bounds: &[Bound], degrees: &[usize], used: &mut Vec<bool>) -> bool {
            let Some((b, rest)) = bounds.split_first() else {
                return true;
            };
            for (i, &d) in degrees.iter().enumerate() {
                if !used[i] && b.admits(d) {
                    used[i] = true;
                    if assign(rest, degrees, used) {
                        return true;
                    }
                    used[i] = false;
                }
            }
            false
        }
        assign(&self.0, walk_degrees, &mut vec![false; walk_degrees.len()])
    }
}

impl fmt::Display for FaceVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "facevec{{")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

/// Extra predicate on a vertex receiver: it must lie on at least `count`
/// faces matching the degree pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub facevec: FaceVec,
    pub count: u32,
}

/// Which incidences of the sender a transfer clause pays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Incident faces, optionally restricted by walk length
    /// (`face` / `face3` / `face4+`).
    Face(Option<Bound>),
    /// 3-faces pendent to the sending vertex: some 3-vertex adjacent to the
    /// sender lies on the face, and the sender itself does not.
    Pendent,
    /// Incident vertices, optionally restricted by degree.
    Vertex(Option<Bound>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Amount {
    Fixed(Rat),
    RemainderUniform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub target: Target,
    pub condition: Option<Condition>,
    pub amount: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DischargingRule {
    pub name: String,
    pub sender: Sender,
    pub transfers: Vec<Transfer>,
}

/// Charges per element at one phase of the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargeState {
    pub phase: String,
    #[serde(with = "crate::rational::serde_rat_map")]
    pub vertices: BTreeMap<VertexId, Rat>,
    #[serde(with = "crate::rational::serde_rat_map")]
    pub faces: BTreeMap<usize, Rat>,
}

impl ChargeState {
    pub fn total(&self) -> Rat {
        self.vertices.values().chain(self.faces.values()).fold(rat_zero(), |a, b| a + b)
    }

    pub fn get(&self, e: Element) -> &Rat {
        match e {
            Element::Vertex(v) => &self.vertices[&v],
            Element::Face(i) => &self.faces[&i],
        }
    }

    fn get_mut(&mut self, e: Element) -> &mut Rat {
        match e {
            Element::Vertex(v) => self.vertices.get_mut(&v).expect("known vertex"),
            Element::Face(i) => self.faces.get_mut(&i).expect("known face"),
        }
    }
}

/// A `uniform-remainder` clause that found no receiver; the sender kept
/// its charge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inapplicable {
    pub rule: String,
    pub sender: Element,
}

/// Initial charges per the spec. Fails on disconnected input, where the
/// face count no longer obeys Euler's formula.
pub fn initial_charges(pg: &PlaneGraph, spec: &ChargeSpec) -> Result<ChargeState, DischargeError> {
    if !pg.graph.is_connected() {
        return Err(DischargeError::Disconnected);
    }
    let vertices = pg.graph.vertices().map(|v| (v, spec.vertex.eval(pg.graph.degree(v)))).collect();
    let faces = pg.faces().iter().enumerate().map(|(i, f)| (i, spec.face.eval(f.len()))).collect();
    Ok(ChargeState { phase: "initial".into(), vertices, faces })
}

/// Precomputed incidence data shared by all rules of a run.
struct Topology {
    faces: Vec<Face>,
    degrees: BTreeMap<VertexId, usize>,
    /// Per vertex: 3-faces pendent to it, ascending by face index.
    pendent: BTreeMap<VertexId, Vec<usize>>,
}

impl Topology {
    fn new(pg: &PlaneGraph) -> Topology {
        let faces = pg.faces();
        let degrees: BTreeMap<VertexId, usize> =
            pg.graph.vertices().map(|v| (v, pg.graph.degree(v))).collect();
        let mut pendent: BTreeMap<VertexId, Vec<usize>> =
            pg.graph.vertices().map(|v| (v, Vec::new())).collect();
        for (i, f) in faces.iter().enumerate() {
            if f.len() != 3 {
                continue;
            }
            let on_face = f.vertex_set();
            for &w in &on_face {
                if degrees[&w] != 3 {
                    continue;
                }
                for v in pg.graph.neighbors(w) {
                    if !on_face.contains(&v) {
                        let list = pendent.get_mut(&v).expect("known vertex");
                        if !list.contains(&i) {
                            list.push(i);
                        }
                    }
                }
            }
        }
        Topology { faces, degrees, pendent }
    }

    fn walk_degrees(&self, i: usize) -> Vec<usize> {
        self.faces[i].walk.iter().map(|v| self.degrees[v]).collect()
    }

    /// Faces whose degree pattern matches, per vertex occurrence count.
    fn vertex_meets(&self, v: VertexId, cond: &Condition) -> bool {
        let mut hits = 0u32;
        for (i, f) in self.faces.iter().enumerate() {
            if f.incidences(v) > 0 && cond.facevec.matches(&self.walk_degrees(i)) {
                hits += 1;
                if hits >= cond.count {
                    return true;
                }
            }
        }
        false
    }

    fn sender_elements(&self, sender: &Sender) -> Vec<Element> {
        match sender {
            Sender::Vertices(b) => self
                .degrees
                .iter()
                .filter(|(_, &d)| b.admits(d))
                .map(|(&v, _)| Element::Vertex(v))
                .collect(),
            Sender::Faces { len, incident } => (0..self.faces.len())
                .filter(|&i| {
                    if !len.admits(self.faces[i].len()) {
                        return false;
                    }
                    match incident {
                        None => true,
                        Some((bound, present)) => {
                            let has =
                                self.faces[i].walk.iter().any(|v| bound.admits(self.degrees[v]));
                            has == *present
                        }
                    }
                })
                .map(Element::Face)
                .collect(),
        }
    }

    /// Receiver occurrences of `sender`, each claimed by the first matching
    /// transfer clause: `(clause index, receiver)` pairs.
    fn claimed_occurrences(
        &self,
        sender: Element,
        transfers: &[Transfer],
    ) -> Vec<(usize, Element)> {
        let mut out = Vec::new();
        match sender {
            Element::Vertex(v) => {
                // Incident face occurrences, then pendent faces.
                for (i, f) in self.faces.iter().enumerate() {
                    for _ in 0..f.incidences(v) {
                        let hit = transfers.iter().position(|t| match &t.target {
                            Target::Face(bound) => {
                                bound.as_ref().is_none_or(|b| b.admits(f.len()))
                            }
                            _ => false,
                        });
                        if let Some(c) = hit {
                            out.push((c, Element::Face(i)));
                        }
                    }
                }
                for &i in &self.pendent[&v] {
                    let hit = transfers.iter().position(|t| t.target == Target::Pendent);
                    if let Some(c) = hit {
                        out.push((c, Element::Face(i)));
                    }
                }
            }
            Element::Face(i) => {
                for &w in &self.faces[i].walk {
                    let hit = transfers.iter().position(|t| match &t.target {
                        Target::Vertex(bound) => {
                            bound.as_ref().is_none_or(|b| b.admits(self.degrees[&w]))
                                && t.condition.as_ref().is_none_or(|c| self.vertex_meets(w, c))
                        }
                        _ => false,
                    });
                    if let Some(c) = hit {
                        out.push((c, Element::Vertex(w)));
                    }
                }
            }
        }
        out
    }
}

/// Applies the rules in order; returns one state per rule (the last is the
/// final state) plus every inapplicable remainder clause.
pub fn apply_rules(
    initial: &ChargeState,
    rules: &[DischargingRule],
    pg: &PlaneGraph,
) -> (Vec<ChargeState>, Vec<Inapplicable>) {
    let topo = Topology::new(pg);
    let mut phases = Vec::with_capacity(rules.len());
    let mut skipped = Vec::new();
    let mut state = initial.clone();
    for rule in rules {
        let snapshot = state.clone();
        let mut next = state.clone();
        for sender in topo.sender_elements(&rule.sender) {
            let occurrences = topo.claimed_occurrences(sender, &rule.transfers);
            let mut paid = rat_zero();
            // Fixed clauses pay per occurrence.
            for (c, t) in rule.transfers.iter().enumerate() {
                if let Amount::Fixed(a) = &t.amount {
                    for (_, receiver) in occurrences.iter().filter(|(i, _)| *i == c) {
                        *next.get_mut(*receiver) += a;
                        paid += a;
                    }
                }
            }
            // Remainder clauses then split what is left of the snapshot.
            let mut remainder = snapshot.get(sender).clone() - &paid;
            for (c, t) in rule.transfers.iter().enumerate() {
                if t.amount != Amount::RemainderUniform {
                    continue;
                }
                let mine: Vec<Element> =
                    occurrences.iter().filter(|(i, _)| *i == c).map(|(_, r)| *r).collect();
                if mine.is_empty() {
                    skipped.push(Inapplicable { rule: rule.name.clone(), sender });
                    continue;
                }
                let share = &remainder / rat_int(mine.len() as i64);
                for receiver in &mine {
                    *next.get_mut(*receiver) += &share;
                }
                paid += &remainder;
                remainder = rat_zero();
            }
            *next.get_mut(sender) -= &paid;
        }
        next.phase = format!("after {}", rule.name);
        phases.push(next.clone());
        state = next;
    }
    if let Some(last) = phases.last_mut() {
        last.phase = "final".into();
    }
    (phases, skipped)
}

/// Elements still negative, ascending (vertices before faces).
pub fn audit(state: &ChargeState) -> Vec<(Element, Rat)> {
    let mut out: Vec<(Element, Rat)> = state
        .vertices
        .iter()
        .map(|(&v, c)| (Element::Vertex(v), c.clone()))
        .chain(state.faces.iter().map(|(&i, c)| (Element::Face(i), c.clone())))
        .filter(|(_, c)| *c < rat_zero())
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Everything one verification run produces.
#[derive(Debug, Clone, Serialize)]
pub struct DischargeReport {
    pub spec: String,
    pub initial: ChargeState,
    pub phases: Vec<ChargeState>,
    pub inapplicable: Vec<Inapplicable>,
    pub negative: Vec<NegativeElement>,
    #[serde(with = "serde_rat")]
    pub total: Rat,
    pub total_matches_expected: bool,
    pub conserved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativeElement {
    pub element: Element,
    #[serde(with = "serde_rat")]
    pub charge: Rat,
}

/// Full pipeline: initial charges, rules in order, audit, conservation and
/// Euler-total checks.
pub fn run(
    pg: &PlaneGraph,
    spec: &ChargeSpec,
    rules: &[DischargingRule],
) -> Result<DischargeReport, DischargeError> {
    let initial = initial_charges(pg, spec)?;
    let (phases, inapplicable) = apply_rules(&initial, rules, pg);
    let total = initial.total();
    let final_state = phases.last().unwrap_or(&initial);
    let conserved = phases.iter().all(|p| p.total() == total);
    let negative = audit(final_state)
        .into_iter()
        .map(|(element, charge)| NegativeElement { element, charge })
        .collect();
    Ok(DischargeReport {
        spec: spec.name.clone(),
        total_matches_expected: total == spec.expected_total,
        initial,
        phases,
        inapplicable,
        negative,
        total,
        conserved,
    })
}

fn spec(name: &str, va: i64, vc: i64, fa: i64, fc: i64, total: i64) -> ChargeSpec {
    ChargeSpec {
        name: name.into(),
        vertex: Affine::new(rat_int(va), rat_int(vc)),
        face: Affine::new(rat_int(fa), rat_int(fc)),
        expected_total: rat_int(total),
    }
}

fn fixed(target: Target, num: i64, den: i64) -> Transfer {
    Transfer { target, condition: None, amount: Amount::Fixed(rat(num, den)) }
}

fn remainder(target: Target) -> Transfer {
    Transfer { target, condition: None, amount: Amount::RemainderUniform }
}

fn rule(name: &str, sender: Sender, transfers: Vec<Transfer>) -> DischargingRule {
    DischargingRule { name: name.into(), sender, transfers }
}

fn vec_case(entries: [Bound; 3], count: u32, num: i64, den: i64) -> Transfer {
    Transfer {
        target: Target::Vertex(Some(Bound::Exact(4))),
        condition: Some(Condition { facevec: FaceVec(entries.to_vec()), count }),
        amount: Amount::Fixed(rat(num, den)),
    }
}

/// The five bundled charge specifications with their ordered rules.
pub fn builtin_spec(name: &str) -> Result<(ChargeSpec, Vec<DischargingRule>), DischargeError> {
    use Bound::{AtLeast, Exact};
    let triangles = Target::Face(Some(Exact(3)));
    let big_faces = Target::Face(Some(AtLeast(4)));
    let any_face = Target::Face(None);
    match name {
        // deg-4 / len-4 charges; heavy vertices prop up triangles.
        "thm2" => Ok((
            spec("thm2", 1, -4, 1, -4, -8),
            vec![rule(
                "D1",
                Sender::Vertices(AtLeast(5)),
                vec![fixed(triangles.clone(), 1, 2)],
            )],
        )),
        // deg-2 vertex charge, constant -2 face charge; vertices feed faces,
        // lighter for pendent triangles, leftovers spread over big faces.
        "thm3" => Ok((
            spec("thm3", 1, -2, 0, -2, -4),
            vec![
                rule("D1", Sender::Vertices(Exact(3)), vec![fixed(any_face.clone(), 1, 3)]),
                rule(
                    "D2",
                    Sender::Vertices(AtLeast(4)),
                    vec![
                        fixed(triangles.clone(), 2, 3),
                        fixed(Target::Pendent, 1, 3),
                        remainder(big_faces.clone()),
                    ],
                ),
            ],
        )),
        // Constant -2 vertex charge, len-2 face charge; big faces fund their
        // vertices, triangles compensate their light corners.
        "thm4" => Ok((
            spec("thm4", 0, -2, 1, -2, -4),
            vec![
                rule(
                    "D1",
                    Sender::Faces { len: AtLeast(6), incident: None },
                    vec![remainder(Target::Vertex(None))],
                ),
                rule(
                    "D2A",
                    Sender::Faces { len: Exact(3), incident: Some((Exact(3), true)) },
                    vec![
                        fixed(Target::Vertex(Some(Exact(3))), 4, 7),
                        remainder(Target::Vertex(Some(Exact(4)))),
                    ],
                ),
                rule(
                    "D2B",
                    Sender::Faces { len: Exact(3), incident: Some((Exact(3), false)) },
                    vec![
                        vec_case([Exact(3), Exact(4), Exact(4)], 1, 3, 7),
                        vec_case([Exact(3), Exact(4), AtLeast(5)], 1, 1, 7),
                        vec_case([AtLeast(4), AtLeast(4), AtLeast(4)], 2, 2, 7),
                    ],
                ),
            ],
        )),
        // Same charges as thm3; send rate depends on the sender's degree.
        "thm5" => Ok((
            spec("thm5", 1, -2, 0, -2, -4),
            vec![
                rule("D1", Sender::Vertices(AtLeast(6)), vec![fixed(any_face.clone(), 2, 3)]),
                rule(
                    "D2",
                    Sender::Vertices(Exact(5)),
                    vec![fixed(triangles.clone(), 2, 3), fixed(big_faces.clone(), 1, 2)],
                ),
                rule(
                    "D3",
                    Sender::Vertices(Exact(4)),
                    vec![fixed(triangles.clone(), 2, 3), fixed(big_faces.clone(), 1, 3)],
                ),
            ],
        )),
        // Same charges as thm2; big faces trickle down, then every vertex
        // dumps everything into its triangles.
        "obs9" => Ok((
            spec("obs9", 1, -4, 1, -4, -8),
            vec![
                rule(
                    "R1",
                    Sender::Faces { len: AtLeast(5), incident: None },
                    vec![fixed(Target::Vertex(None), 1, 5)],
                ),
                rule("R2", Sender::Vertices(AtLeast(0)), vec![remainder(triangles)]),
            ],
        )),
        other => Err(DischargeError::UnknownSpec(other.into())),
    }
}

/// Names accepted by [`builtin_spec`].
pub const BUILTIN_SPECS: [&str; 5] = ["thm2", "thm3", "thm4", "thm5", "obs9"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{
        dodecahedron, icosahedron, icosidodecahedron, plane_graph_from_faces, truncated_cube,
    };
    use crate::graph::Graph;
    use crate::planegen::random_plane_graph;
    use crate::rng::Stream;

    fn pentagon() -> PlaneGraph {
        plane_graph_from_faces(&[vec![0, 1, 2, 3, 4], vec![4, 3, 2, 1, 0]])
    }

    /// Triangle 0-1-2 inside hexagon 3..=8, spokes 0-3, 1-5, 2-7.
    fn ringed_triangle() -> PlaneGraph {
        plane_graph_from_faces(&[
            vec![0, 1, 2],
            vec![1, 0, 3, 4, 5],
            vec![2, 1, 5, 6, 7],
            vec![0, 2, 7, 8, 3],
            vec![3, 8, 7, 6, 5, 4],
        ])
    }

    #[test]
    fn pentagon_charges_under_heavy_vertex_spec() {
        let (spec, rules) = builtin_spec("thm2").unwrap();
        let report = run(&pentagon(), &spec, &rules).unwrap();
        assert_eq!(report.total, rat_int(-8));
        assert!(report.total_matches_expected && report.conserved);
        // No vertex reaches degree 5: the rule never fires.
        assert_eq!(report.phases.last().unwrap().vertices, report.initial.vertices);
        let audit: Vec<Element> = report.negative.iter().map(|n| n.element).collect();
        assert_eq!(audit, (0..5u32).map(Element::Vertex).collect::<Vec<_>>());
        assert!(report.negative.iter().all(|n| n.charge == rat_int(-2)));
    }

    #[test]
    fn quartic_polyhedron_triangles_stay_negative() {
        let (spec, rules) = builtin_spec("thm2").unwrap();
        let report = run(&icosidodecahedron(), &spec, &rules).unwrap();
        assert_eq!(report.total, rat_int(-8));
        // 4-regular: D1 never fires, so exactly the 20 triangles stay at -1.
        assert_eq!(report.negative.len(), 20);
        for n in &report.negative {
            assert!(matches!(n.element, Element::Face(_)));
            assert_eq!(n.charge, rat_int(-1));
        }
    }

    #[test]
    fn initial_totals_match_hand_counts() {
        let (thm4, _) = builtin_spec("thm4").unwrap();
        let state = initial_charges(&truncated_cube(), &thm4).unwrap();
        assert_eq!(state.total(), rat_int(-4));
        let (thm3, _) = builtin_spec("thm3").unwrap();
        let state = initial_charges(&dodecahedron(), &thm3).unwrap();
        assert_eq!(state.total(), rat_int(-4));
        assert!(state.vertices.values().all(|c| *c == rat_int(1)));
        assert!(state.faces.values().all(|c| *c == rat_int(-2)));
    }

    #[test]
    fn disconnected_graphs_are_rejected() {
        let mut g = Graph::new();
        g.add_vertex(0);
        g.add_vertex(1);
        let pg = PlaneGraph::with_sorted_rotation(g);
        let (spec, _) = builtin_spec("thm2").unwrap();
        assert_eq!(initial_charges(&pg, &spec), Err(DischargeError::Disconnected));
    }

    #[test]
    fn euler_identities_hold_on_random_plane_graphs() {
        let mut rng = Stream::new(99, 0, 0);
        for trial in 0..50u64 {
            let pg = random_plane_graph(4 + (trial as usize % 13), trial as usize % 7, &mut rng);
            for name in BUILTIN_SPECS {
                let (spec, rules) = builtin_spec(name).unwrap();
                let report = run(&pg, &spec, &rules).unwrap();
                assert!(report.total_matches_expected, "{name} trial {trial}");
                assert!(report.conserved, "{name} trial {trial}");
            }
        }
    }

    #[test]
    fn heavy_vertices_lift_every_triangle_above_zero() {
        // All twelve vertices have degree 5, so each of the twenty
        // triangles collects 3 * 1/2 on top of its initial -1.
        let ico = icosahedron();
        let (spec, rules) = builtin_spec("thm2").unwrap();
        let report = run(&ico, &spec, &rules).unwrap();
        let last = report.phases.last().unwrap();
        assert!(last.faces.values().all(|c| *c == rat(1, 2)));
        assert!(last.vertices.values().all(|c| *c == rat(-3, 2)));
        assert!(report.conserved && report.total_matches_expected);
        assert_eq!(report.negative.len(), 12);
    }

    #[test]
    fn pendent_triangles_receive_the_smaller_share() {
        // Triangle 0-1-2 with a tail 0-3; 3-vertex 0 makes the triangle
        // pendent to 3 under the definition... vertex 0 has degree 3 and
        // lies on the 3-face, its neighbor 3 does not.
        let pg = plane_graph_from_faces(&[vec![0, 1, 2], vec![1, 0, 3, 0, 2]]);
        assert_eq!(pg.graph.degree(0), 3);
        let topo = Topology::new(&pg);
        assert_eq!(topo.pendent[&3], vec![0]);
        assert_eq!(topo.pendent[&1], Vec::<usize>::new());
        let (spec, rules) = builtin_spec("thm3").unwrap();
        let report = run(&pg, &spec, &rules).unwrap();
        assert!(report.conserved && report.total_matches_expected);
    }

    #[test]
    fn leftover_charge_spreads_over_big_faces() {
        // 3x3 grid, row-major ids. The center 4-vertex sits on no 3-face
        // and has no pendent 3-faces, so its whole surplus of 2 splits as
        // 1/2 per incident quad; the 3-vertices pay 1/3 per face.
        let grid = plane_graph_from_faces(&[
            vec![0, 1, 4, 3],
            vec![1, 2, 5, 4],
            vec![3, 4, 7, 6],
            vec![4, 5, 8, 7],
            vec![0, 3, 6, 7, 8, 5, 2, 1],
        ]);
        let (spec, rules) = builtin_spec("thm3").unwrap();
        let report = run(&grid, &spec, &rules).unwrap();
        assert!(report.conserved && report.total_matches_expected);
        assert!(report.inapplicable.is_empty());
        let last = report.phases.last().unwrap();
        assert!(last.vertices.values().all(|c| *c == rat_zero()));
        let faces = grid.faces();
        for (i, f) in faces.iter().enumerate() {
            let expected = if f.len() == 4 { rat(-5, 6) } else { rat(-2, 3) };
            assert_eq!(last.faces[&i], expected, "face {i}");
        }
    }

    #[test]
    fn remainder_with_no_receiver_is_recorded() {
        let (spec, rules) = builtin_spec("obs9").unwrap();
        let report = run(&pentagon(), &spec, &rules).unwrap();
        // No 3-face anywhere: every vertex keeps its charge under R2.
        assert_eq!(report.inapplicable.len(), 5);
        assert!(report.inapplicable.iter().all(|i| i.rule == "R2"));
        assert!(report.conserved);
    }

    #[test]
    fn ordered_rules_are_order_sensitive() {
        let pg = ringed_triangle();
        let (spec, rules) = builtin_spec("obs9").unwrap();
        let forward = run(&pg, &spec, &rules).unwrap();
        let swapped_rules: Vec<DischargingRule> = rules.iter().rev().cloned().collect();
        let swapped = run(&pg, &spec, &swapped_rules).unwrap();
        assert_eq!(forward.total, rat_int(-8));
        assert_eq!(swapped.total, rat_int(-8));
        assert!(forward.conserved && swapped.conserved);
        let a = forward.phases.last().unwrap();
        let b = swapped.phases.last().unwrap();
        assert_ne!(a.vertices, b.vertices);
        assert_ne!(a.faces, b.faces);
    }

    #[test]
    fn three_face_case_split_pays_by_neighborhood() {
        // Central triangle 0-1-2 (all degree 4) ringed by three corner
        // triangles with a degree-3 apex each and three quads meeting at 6.
        let hexa = plane_graph_from_faces(&[
            vec![0, 1, 2],
            vec![1, 0, 3],
            vec![0, 2, 4],
            vec![2, 1, 5],
            vec![1, 3, 6, 5],
            vec![0, 4, 6, 3],
            vec![2, 5, 6, 4],
        ]);
        for (v, d) in [(0, 4), (1, 4), (2, 4), (3, 3), (4, 3), (5, 3), (6, 3)] {
            assert_eq!(hexa.graph.degree(v), d, "degree of {v}");
        }
        let (spec, rules) = builtin_spec("thm4").unwrap();
        let report = run(&hexa, &spec, &rules).unwrap();
        assert!(report.conserved && report.total_matches_expected);
        let last = report.phases.last().unwrap();
        // Corner triangles pay 4/7 to their apex and split the remaining
        // 3/7 between their two 4-vertices; they end exactly empty.
        // The central (4,4,4) triangle pays 3/7 to each corner, because
        // every corner also sits on a (3,4,4) corner triangle.
        let faces = hexa.faces();
        for (i, f) in faces.iter().enumerate() {
            let expected = match (f.len(), f.vertex_set().contains(&6)) {
                (3, _) if f.vertex_set() == [0, 1, 2].into() => rat(-2, 7),
                (3, _) => rat_zero(),
                (4, true) => rat_int(2),
                other => panic!("unexpected face shape {other:?}"),
            };
            assert_eq!(last.faces[&i], expected, "face {i}");
        }
        for v in [0u32, 1, 2] {
            assert_eq!(last.vertices[&v], rat(-8, 7), "vertex {v}");
        }
        for v in [3u32, 4, 5] {
            assert_eq!(last.vertices[&v], rat(-10, 7), "vertex {v}");
        }
        assert_eq!(last.vertices[&6], rat_int(-2));
    }

    #[test]
    fn facevec_matches_as_a_multiset() {
        use Bound::*;
        assert!(FaceVec(vec![Exact(3), Exact(4), Exact(4)]).matches(&[4, 3, 4]));
        assert!(FaceVec(vec![Exact(3), Exact(4), AtLeast(5)]).matches(&[7, 4, 3]));
        assert!(!FaceVec(vec![Exact(3), Exact(4), AtLeast(5)]).matches(&[4, 4, 3]));
        assert!(FaceVec(vec![AtLeast(4), AtLeast(4), AtLeast(4)]).matches(&[5, 4, 6]));
        assert!(!FaceVec(vec![AtLeast(4), AtLeast(4), AtLeast(4)]).matches(&[5, 4]));
        // Bounds assign greedily but exhaustively: {3+, 5+} on (5, 3).
        assert!(FaceVec(vec![AtLeast(3), AtLeast(5)]).matches(&[5, 3]));
        assert!(FaceVec(vec![AtLeast(5), AtLeast(3)]).matches(&[3, 5]));
    }

    #[test]
    fn unknown_spec_errors() {
        assert_eq!(
            builtin_spec("thm9").unwrap_err(),
            DischargeError::UnknownSpec("thm9".into())
        );
    }

    #[test]
    fn reports_serialize_with_exact_rationals() {
        let (spec, rules) = builtin_spec("thm2").unwrap();
        let report = run(&pentagon(), &spec, &rules).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"-2/1\""), "{json}");
        assert!(json.contains("\"v0\""), "{json}");
        let again = serde_json::to_string(&run(&pentagon(), &spec, &rules).unwrap()).unwrap();
        assert_eq!(json, again);
    }
}
