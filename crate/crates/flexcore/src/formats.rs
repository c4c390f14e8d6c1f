//! Line-oriented text formats.
//!
//! All formats share one style: a `<name> v1` header line, then one record
//! per line. Blank lines and `#` comments are skipped. Parsers report
//! 1-based line numbers, reject structural junk outright (self-loops,
//! repeated neighbors, asymmetric rotations, undeclared vertices), and
//! round-trip with their writers byte-for-byte.
//!
//! * `flexgraph v1` — `v <id>: <neighbors in clockwise order>` per vertex.
//!   The neighbor order doubles as the rotation system when an embedding is
//!   needed; plain-graph consumers ignore it.
//! * `flexlists v1` — `L <v>: <colors>` lists plus an optional request:
//!   `R <v> <color>` lines (one color per vertex) or `W <v> <color> <num/den>`
//!   weight lines, never both.
//! * `flexconfig v1` — `core <id> deg=<n>` / `boundary <id>` vertex roles,
//!   `edge <u> <v>` lines, optional `fix <ids>` hint.
//! * `flexfamily v1` — optional `name <label>`, `pattern <name>` blocks of
//!   `vertex` / `edge` lines, and `predicate triangles_within_distance <d>`.
//! * `flexcharge v1` — optional `name <label>`, `vertex <slope> <offset>` and
//!   `face <slope> <offset>` affine charge lines, then ordered
//!   `rule <name> <sender> -> <transfer> [; <transfer>]*` lines. Senders are
//!   `vertex deg <bound>` or `face len <bound> [with|without deg <bound>]`;
//!   transfers pay `face`/`face3`/`face4+`, `pendent`, or
//!   `vertex [deg <bound>]`, optionally guarded by
//!   `if on [two] facevec{<bound>,…}`, an amount being `num/den` or
//!   `uniform-remainder`. Bounds are `3` (exact) or `4+` (at least).
//! * `flexres v1` — `k`, `b`, `family` and `kind` header fields, one
//!   `step <index> <template> map <t:h …> peel <ids> [boundary <ids>]
//!   [fix <ids>]` line per peel, and a final `residue [<ids>] [fix <ids>]`
//!   line.
//! * `flexlib v1` — a leading `name <label>`, then `template <name> [weak]`
//!   … `end` blocks of `core <id> <any|exact:N|atmost:N|atleast:N>`,
//!   `edge <u> <v>`, optional `boundary <ids>` / `fix <ids>` lines, and
//!   `check` lines (`face-shape <v> <a,b,c> count=<n>`, `face-len <v> <len>`,
//!   `pendent-triangle <v>`, `disjoint-face-shapes <u> <v> <a,b,c>`). The
//!   color count and family are not part of the file; they are supplied when
//!   the templates are assembled into a library.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::coloring::{Color, ListAssignment, Request};
use crate::discharging::{
    Affine, Amount, Bound, ChargeSpec, Condition, DischargingRule, FaceVec, Sender, Target,
    Transfer,
};
use crate::graph::{Graph, PlaneGraph, RotationSystem, VertexId};
use crate::pattern::{DegreeBound, PatternGraph};
use crate::rational::{rat_from_str, rat_int, rat_to_string, rat_zero, Rat};
use crate::reducibility::{Configuration, FamilyPredicate, ForbiddenFamily};
use crate::resolution::{ConfigTemplate, MatchCheck, Resolution, ResolutionKind, ResolutionStep};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: expected header `{expected}`")]
    BadHeader { line: usize, expected: &'static str },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: VertexId },
    #[error("line {line}: neighbor {v} repeated")]
    DuplicateNeighbor { line: usize, v: VertexId },
    #[error("vertex {u} lists {v} as a neighbor but not vice versa")]
    Asymmetric { u: VertexId, v: VertexId },
    #[error("line {line}: vertex {v} is not declared")]
    UnknownVertex { line: usize, v: VertexId },
    #[error("{0}")]
    Invalid(String),
}

fn malformed(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, msg: msg.into() }
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t))
        }
    })
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    expected: &'static str,
) -> Result<(), FormatError> {
    match lines.next() {
        Some((_, line)) if line == expected => Ok(()),
        Some((line, _)) => Err(FormatError::BadHeader { line, expected }),
        None => Err(FormatError::BadHeader { line: 1, expected }),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, FormatError> {
    token.parse().map_err(|_| malformed(line, format!("bad {what} `{token}`")))
}

/// A graph plus the rotation its file declared.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub rotation: RotationSystem,
}

impl ParsedGraph {
    /// Interprets the rotation as a plane embedding.
    pub fn plane(&self) -> Result<PlaneGraph, crate::graph::GraphError> {
        PlaneGraph::new(self.graph.clone(), self.rotation.clone())
    }
}

pub fn parse_flexgraph(text: &str) -> Result<ParsedGraph, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexgraph v1")?;
    let mut order: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut line_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ln, line) in lines {
        let rest = line
            .strip_prefix("v ")
            .ok_or_else(|| malformed(ln, format!("expected `v <id>: <neighbors>`, got `{line}`")))?;
        let (id_part, nbr_part) =
            rest.split_once(':').ok_or_else(|| malformed(ln, "missing `:` after vertex id"))?;
        let v: VertexId = parse_num(ln, id_part.trim(), "vertex id")?;
        if order.contains_key(&v) {
            return Err(malformed(ln, format!("vertex {v} declared twice")));
        }
        let mut nbrs = Vec::new();
        for tok in nbr_part.split_whitespace() {
            let u: VertexId = parse_num(ln, tok, "neighbor id")?;
            if u == v {
                return Err(FormatError::SelfLoop { line: ln, v });
            }
            if nbrs.contains(&u) {
                return Err(FormatError::DuplicateNeighbor { line: ln, v: u });
            }
            nbrs.push(u);
        }
        order.insert(v, nbrs);
        line_of.insert(v, ln);
    }
    for (&v, nbrs) in &order {
        for &u in nbrs {
            match order.get(&u) {
                None => return Err(FormatError::UnknownVertex { line: line_of[&v], v: u }),
                Some(back) if !back.contains(&v) => {
                    return Err(FormatError::Asymmetric { u: v, v: u })
                }
                _ => {}
            }
        }
    }
    let mut graph = Graph::new();
    for &v in order.keys() {
        graph.add_vertex(v);
    }
    for (&v, nbrs) in &order {
        for &u in nbrs {
            if v < u {
                graph.add_edge(v, u).expect("validated above");
            }
        }
    }
    Ok(ParsedGraph { graph, rotation: RotationSystem::new(order) })
}

/// Writes a graph; neighbor order follows `rotation` when given, ascending
/// ids otherwise.
pub fn write_flexgraph(graph: &Graph, rotation: Option<&RotationSystem>) -> String {
    let sorted = RotationSystem::sorted(graph);
    let rot = rotation.unwrap_or(&sorted);
    let mut out = String::from("flexgraph v1\n");
    for v in graph.vertices() {
        out.push_str(&format!("v {v}:"));
        for u in rot.order_at(v) {
            out.push_str(&format!(" {u}"));
        }
        out.push('\n');
    }
    out
}

/// Lists plus the request the same file declared, if any.
#[derive(Debug, Clone)]
pub struct ParsedLists {
    pub lists: ListAssignment,
    pub request: Option<Request>,
}

pub fn parse_flexlists(text: &str) -> Result<ParsedLists, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexlists v1")?;
    let mut lists: BTreeMap<VertexId, BTreeSet<Color>> = BTreeMap::new();
    let mut plain: BTreeMap<VertexId, (Color, usize)> = BTreeMap::new();
    let mut weighted: BTreeMap<(VertexId, Color), (crate::rational::Rat, usize)> = BTreeMap::new();
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "L" => {
                let rest = line.strip_prefix("L ").unwrap_or("");
                let (id_part, color_part) = rest
                    .split_once(':')
                    .ok_or_else(|| malformed(ln, "missing `:` after vertex id"))?;
                let v: VertexId = parse_num(ln, id_part.trim(), "vertex id")?;
                if lists.contains_key(&v) {
                    return Err(malformed(ln, format!("list for {v} declared twice")));
                }
                let mut colors = BTreeSet::new();
                for tok in color_part.split_whitespace() {
                    let c: Color = parse_num(ln, tok, "color")?;
                    if !colors.insert(c) {
                        return Err(malformed(ln, format!("color {c} repeated")));
                    }
                }
                lists.insert(v, colors);
            }
            "R" => {
                if !weighted.is_empty() {
                    return Err(malformed(ln, "`R` and `W` lines cannot be mixed"));
                }
                if tokens.len() != 3 {
                    return Err(malformed(ln, "expected `R <vertex> <color>`"));
                }
                let v: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                let c: Color = parse_num(ln, tokens[2], "color")?;
                if plain.insert(v, (c, ln)).is_some() {
                    return Err(malformed(ln, format!("request for {v} declared twice")));
                }
            }
            "W" => {
                if !plain.is_empty() {
                    return Err(malformed(ln, "`R` and `W` lines cannot be mixed"));
                }
                if tokens.len() != 4 {
                    return Err(malformed(ln, "expected `W <vertex> <color> <num/den>`"));
                }
                let v: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                let c: Color = parse_num(ln, tokens[2], "color")?;
                let w = rat_from_str(tokens[3])
                    .ok_or_else(|| malformed(ln, format!("bad rational `{}`", tokens[3])))?;
                if w < rat_zero() {
                    return Err(malformed(ln, format!("negative weight `{}`", tokens[3])));
                }
                if weighted.insert((v, c), (w, ln)).is_some() {
                    return Err(malformed(ln, format!("weight for {v} color {c} declared twice")));
                }
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    for (&v, &(c, ln)) in &plain {
        let list = lists.get(&v).ok_or(FormatError::UnknownVertex { line: ln, v })?;
        if !list.contains(&c) {
            return Err(malformed(ln, format!("requested color {c} is not in {v}'s list")));
        }
    }
    for (&(v, c), &(_, ln)) in &weighted {
        let list = lists.get(&v).ok_or(FormatError::UnknownVertex { line: ln, v })?;
        if !list.contains(&c) {
            return Err(malformed(ln, format!("weighted color {c} is not in {v}'s list")));
        }
    }
    let request = if !plain.is_empty() {
        Some(Request::Plain { choices: plain.into_iter().map(|(v, (c, _))| (v, c)).collect() })
    } else if !weighted.is_empty() {
        Some(Request::Weighted {
            weights: weighted.into_iter().map(|(k, (w, _))| (k, w)).collect(),
        })
    } else {
        None
    };
    Ok(ParsedLists { lists: ListAssignment::new(lists), request })
}

pub fn write_flexlists(lists: &ListAssignment, request: Option<&Request>) -> String {
    let mut out = String::from("flexlists v1\n");
    for (v, colors) in lists.iter() {
        out.push_str(&format!("L {v}:"));
        for c in colors {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
    }
    match request {
        Some(Request::Plain { choices }) => {
            for (v, c) in choices {
                out.push_str(&format!("R {v} {c}\n"));
            }
        }
        Some(Request::Weighted { weights }) => {
            for ((v, c), w) in weights {
                out.push_str(&format!("W {v} {c} {}\n", rat_to_string(w)));
            }
        }
        None => {}
    }
    out
}

pub fn parse_flexconfig(text: &str) -> Result<Configuration, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexconfig v1")?;
    let mut host: BTreeMap<VertexId, u32> = BTreeMap::new();
    let mut boundary: BTreeSet<VertexId> = BTreeSet::new();
    let mut edges: Vec<(usize, VertexId, VertexId)> = Vec::new();
    let mut fix: Option<BTreeSet<VertexId>> = None;
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "core" => {
                if tokens.len() != 3 {
                    return Err(malformed(ln, "expected `core <id> deg=<n>`"));
                }
                let v: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                let deg_tok = tokens[2]
                    .strip_prefix("deg=")
                    .ok_or_else(|| malformed(ln, "expected `deg=<n>`"))?;
                let d: u32 = parse_num(ln, deg_tok, "degree")?;
                if host.insert(v, d).is_some() || boundary.contains(&v) {
                    return Err(malformed(ln, format!("vertex {v} declared twice")));
                }
            }
            "boundary" => {
                if tokens.len() != 2 {
                    return Err(malformed(ln, "expected `boundary <id>`"));
                }
                let v: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                if !boundary.insert(v) || host.contains_key(&v) {
                    return Err(malformed(ln, format!("vertex {v} declared twice")));
                }
            }
            "edge" => {
                if tokens.len() != 3 {
                    return Err(malformed(ln, "expected `edge <u> <v>`"));
                }
                let u: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                let v: VertexId = parse_num(ln, tokens[2], "vertex id")?;
                edges.push((ln, u, v));
            }
            "fix" => {
                if fix.is_some() {
                    return Err(malformed(ln, "`fix` declared twice"));
                }
                let mut set = BTreeSet::new();
                for tok in &tokens[1..] {
                    set.insert(parse_num::<VertexId>(ln, tok, "vertex id")?);
                }
                fix = Some(set);
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    let mut pattern = Graph::new();
    for &v in host.keys().chain(boundary.iter()) {
        pattern.add_vertex(v);
    }
    for (ln, u, v) in edges {
        if u == v {
            return Err(FormatError::SelfLoop { line: ln, v: u });
        }
        for w in [u, v] {
            if !pattern.has_vertex(w) {
                return Err(FormatError::UnknownVertex { line: ln, v: w });
            }
        }
        pattern.add_edge(u, v).map_err(|_| malformed(ln, format!("edge {u} {v} repeated")))?;
    }
    Configuration::new(pattern, boundary, host, fix)
        .map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_flexconfig(cfg: &Configuration) -> String {
    let mut out = String::from("flexconfig v1\n");
    for (v, d) in cfg.host_degrees() {
        out.push_str(&format!("core {v} deg={d}\n"));
    }
    for v in cfg.boundary() {
        out.push_str(&format!("boundary {v}\n"));
    }
    for (u, v) in cfg.pattern().edges() {
        out.push_str(&format!("edge {u} {v}\n"));
    }
    if let Some(fix) = cfg.declared_fix() {
        out.push_str("fix");
        for v in fix {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_flexfamily(text: &str) -> Result<ForbiddenFamily, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexfamily v1")?;
    let mut name: Option<String> = None;
    struct Block {
        name: String,
        vertices: BTreeSet<VertexId>,
        edges: Vec<(usize, VertexId, VertexId)>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut predicates: Vec<FamilyPredicate> = Vec::new();
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "name" => {
                if tokens.len() != 2 || name.is_some() {
                    return Err(malformed(ln, "expected a single `name <label>` line"));
                }
                name = Some(tokens[1].to_string());
            }
            "pattern" => {
                if tokens.len() != 2 {
                    return Err(malformed(ln, "expected `pattern <name>`"));
                }
                if blocks.iter().any(|b| b.name == tokens[1]) {
                    return Err(malformed(ln, format!("pattern `{}` declared twice", tokens[1])));
                }
                blocks.push(Block {
                    name: tokens[1].to_string(),
                    vertices: BTreeSet::new(),
                    edges: Vec::new(),
                });
            }
            "vertex" | "edge" => {
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| malformed(ln, format!("`{}` outside a pattern", tokens[0])))?;
                if tokens[0] == "vertex" {
                    if tokens.len() != 2 {
                        return Err(malformed(ln, "expected `vertex <id>`"));
                    }
                    block.vertices.insert(parse_num(ln, tokens[1], "vertex id")?);
                } else {
                    if tokens.len() != 3 {
                        return Err(malformed(ln, "expected `edge <u> <v>`"));
                    }
                    let u: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                    let v: VertexId = parse_num(ln, tokens[2], "vertex id")?;
                    block.vertices.insert(u);
                    block.vertices.insert(v);
                    block.edges.push((ln, u, v));
                }
            }
            "predicate" => {
                if tokens.len() != 3 || tokens[1] != "triangles_within_distance" {
                    return Err(malformed(
                        ln,
                        "expected `predicate triangles_within_distance <d>`",
                    ));
                }
                predicates
                    .push(FamilyPredicate::TrianglesWithinDistance(parse_num(
                        ln, tokens[2], "distance",
                    )?));
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    let mut patterns = Vec::new();
    for block in blocks {
        let mut g = Graph::new();
        for &v in &block.vertices {
            g.add_vertex(v);
        }
        for (ln, u, v) in block.edges {
            if u == v {
                return Err(FormatError::SelfLoop { line: ln, v: u });
            }
            g.add_edge(u, v).map_err(|_| malformed(ln, format!("edge {u} {v} repeated")))?;
        }
        if g.n() == 0 {
            return Err(FormatError::Invalid(format!("pattern `{}` is empty", block.name)));
        }
        patterns.push((block.name, g));
    }
    let name = name.unwrap_or_else(|| {
        if patterns.is_empty() {
            "none".to_string()
        } else {
            patterns.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join("+")
        }
    });
    Ok(ForbiddenFamily::new(&name, patterns, predicates))
}

pub fn write_flexfamily(family: &ForbiddenFamily) -> String {
    let mut out = String::from("flexfamily v1\n");
    out.push_str(&format!("name {}\n", family.name()));
    for (name, g) in family.patterns() {
        out.push_str(&format!("pattern {name}\n"));
        for v in g.vertices().filter(|&v| g.degree(v) == 0) {
            out.push_str(&format!("vertex {v}\n"));
        }
        for (u, v) in g.edges() {
            out.push_str(&format!("edge {u} {v}\n"));
        }
    }
    for p in family.predicates() {
        match p {
            FamilyPredicate::TrianglesWithinDistance(d) => {
                out.push_str(&format!("predicate triangles_within_distance {d}\n"));
            }
        }
    }
    out
}

/// A parsed `flexcharge v1` file: the affine charge spec and its rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCharge {
    pub spec: ChargeSpec,
    pub rules: Vec<DischargingRule>,
}

fn parse_bound(line: usize, token: &str) -> Result<Bound, FormatError> {
    match token.strip_suffix('+') {
        Some(body) => Ok(Bound::AtLeast(parse_num(line, body, "bound")?)),
        None => Ok(Bound::Exact(parse_num(line, token, "bound")?)),
    }
}

fn parse_facevec(line: usize, token: &str) -> Result<FaceVec, FormatError> {
    let inner = token
        .strip_prefix("facevec{")
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| malformed(line, format!("expected `facevec{{…}}`, got `{token}`")))?;
    if inner.is_empty() {
        return Err(malformed(line, "facevec needs at least one entry"));
    }
    let bounds = inner
        .split(',')
        .map(|t| parse_bound(line, t))
        .collect::<Result<Vec<Bound>, FormatError>>()?;
    Ok(FaceVec(bounds))
}

fn parse_transfer(line: usize, clause: &str) -> Result<Transfer, FormatError> {
    let (lhs, rhs) = clause
        .split_once(':')
        .ok_or_else(|| malformed(line, "transfer needs `target : amount`"))?;
    let amount = match rhs.trim() {
        "uniform-remainder" => Amount::RemainderUniform,
        token => Amount::Fixed(
            rat_from_str(token)
                .ok_or_else(|| malformed(line, format!("bad transfer amount `{token}`")))?,
        ),
    };
    let tokens: Vec<&str> = lhs.split_whitespace().collect();
    let mut i = 1;
    let target = match tokens.first() {
        Some(&"face") => Target::Face(None),
        Some(&"pendent") => Target::Pendent,
        Some(&"vertex") => {
            if tokens.get(1) == Some(&"deg") {
                let b = tokens
                    .get(2)
                    .copied()
                    .ok_or_else(|| malformed(line, "`vertex deg` needs a bound"))?;
                i = 3;
                Target::Vertex(Some(parse_bound(line, b)?))
            } else {
                Target::Vertex(None)
            }
        }
        Some(t) if t.starts_with("face") => Target::Face(Some(parse_bound(line, &t[4..])?)),
        Some(t) => return Err(malformed(line, format!("unknown transfer target `{t}`"))),
        None => return Err(malformed(line, "transfer target missing")),
    };
    let condition = if i < tokens.len() {
        if tokens[i] != "if" || tokens.get(i + 1) != Some(&"on") {
            return Err(malformed(line, format!("unexpected `{}` in transfer", tokens[i])));
        }
        i += 2;
        let count = match tokens.get(i) {
            Some(&"two") => {
                i += 1;
                2
            }
            Some(t) if t.chars().all(|c| c.is_ascii_digit()) => {
                i += 1;
                parse_num(line, t, "face count")?
            }
            _ => 1,
        };
        let fv = tokens
            .get(i)
            .copied()
            .ok_or_else(|| malformed(line, "`if on` needs a facevec"))
            .and_then(|t| parse_facevec(line, t))?;
        i += 1;
        if !matches!(target, Target::Vertex(_)) {
            return Err(malformed(line, "`if on` conditions apply to vertex targets only"));
        }
        Some(Condition { facevec: fv, count })
    } else {
        None
    };
    if i != tokens.len() {
        return Err(malformed(line, format!("trailing `{}` in transfer", tokens[i])));
    }
    Ok(Transfer { target, condition, amount })
}

fn parse_rule(line: usize, text: &str) -> Result<DischargingRule, FormatError> {
    let (head, tail) = text
        .split_once("->")
        .ok_or_else(|| malformed(line, "rule needs `-> <transfers>`"))?;
    let tokens: Vec<&str> = head.split_whitespace().collect();
    let name = tokens
        .get(1)
        .ok_or_else(|| malformed(line, "rule needs a name"))?
        .to_string();
    let sender = match (tokens.get(2), tokens.get(3)) {
        (Some(&"vertex"), Some(&"deg")) if tokens.len() == 5 => {
            Sender::Vertices(parse_bound(line, tokens[4])?)
        }
        (Some(&"face"), Some(&"len")) if tokens.len() >= 5 => {
            let len = parse_bound(line, tokens[4])?;
            let incident = match tokens.get(5).copied() {
                None => None,
                Some(mode @ ("with" | "without"))
                    if tokens.get(6) == Some(&"deg") && tokens.len() == 8 =>
                {
                    Some((parse_bound(line, tokens[7])?, mode == "with"))
                }
                _ => {
                    return Err(malformed(line, "expected `with deg <bound>` or `without deg <bound>`"))
                }
            };
            Sender::Faces { len, incident }
        }
        _ => {
            return Err(malformed(
                line,
                "rule sender must be `vertex deg <bound>` or `face len <bound> [with|without deg <bound>]`",
            ))
        }
    };
    let transfers = tail
        .split(';')
        .map(|clause| parse_transfer(line, clause))
        .collect::<Result<Vec<Transfer>, FormatError>>()?;
    Ok(DischargingRule { name, sender, transfers })
}

pub fn parse_flexcharge(text: &str) -> Result<ParsedCharge, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexcharge v1")?;
    let mut name: Option<String> = None;
    let mut vertex: Option<Affine> = None;
    let mut face: Option<Affine> = None;
    let mut rules: Vec<DischargingRule> = Vec::new();
    let affine = |ln: usize, tokens: &[&str]| -> Result<Affine, FormatError> {
        if tokens.len() != 3 {
            return Err(malformed(ln, format!("expected `{} <slope> <offset>`", tokens[0])));
        }
        let coeff = |t: &str| {
            rat_from_str(t).ok_or_else(|| malformed(ln, format!("bad rational `{t}`")))
        };
        Ok(Affine::new(coeff(tokens[1])?, coeff(tokens[2])?))
    };
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "name" => {
                if tokens.len() != 2 || name.is_some() {
                    return Err(malformed(ln, "expected a single `name <label>` line"));
                }
                name = Some(tokens[1].to_string());
            }
            "vertex" if vertex.is_none() => vertex = Some(affine(ln, &tokens)?),
            "face" if face.is_none() => face = Some(affine(ln, &tokens)?),
            "vertex" | "face" => {
                return Err(malformed(ln, format!("`{}` charge declared twice", tokens[0])));
            }
            "rule" => {
                let rule = parse_rule(ln, line)?;
                if rules.iter().any(|r| r.name == rule.name) {
                    return Err(malformed(ln, format!("rule `{}` declared twice", rule.name)));
                }
                rules.push(rule);
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    let vertex = vertex.ok_or_else(|| {
        FormatError::Invalid("missing `vertex <slope> <offset>` charge line".into())
    })?;
    let face = face
        .ok_or_else(|| FormatError::Invalid("missing `face <slope> <offset>` charge line".into()))?;
    // The run-level total check only makes sense when the total is the same
    // on every connected plane graph: equal constants, and the slopes must
    // cancel the edge terms.
    let balance: Rat = &face.offset + (&vertex.slope + &face.slope) * rat_int(2);
    if vertex.offset != face.offset || balance != rat_zero() {
        return Err(FormatError::Invalid(
            "charge total depends on the graph: offsets must match and \
             offset + 2*(vertex slope + face slope) must be zero"
                .into(),
        ));
    }
    let expected_total = &face.offset * rat_int(2);
    Ok(ParsedCharge {
        spec: ChargeSpec {
            name: name.unwrap_or_else(|| "custom".into()),
            vertex,
            face,
            expected_total,
        },
        rules,
    })
}

fn write_transfer(out: &mut String, t: &Transfer) {
    match &t.target {
        Target::Face(None) => out.push_str("face"),
        Target::Face(Some(b)) => out.push_str(&format!("face{b}")),
        Target::Pendent => out.push_str("pendent"),
        Target::Vertex(None) => out.push_str("vertex"),
        Target::Vertex(Some(b)) => out.push_str(&format!("vertex deg {b}")),
    }
    if let Some(c) = &t.condition {
        match c.count {
            1 => out.push_str(&format!(" if on {}", c.facevec)),
            2 => out.push_str(&format!(" if on two {}", c.facevec)),
            n => out.push_str(&format!(" if on {n} {}", c.facevec)),
        }
    }
    match &t.amount {
        Amount::Fixed(r) => out.push_str(&format!(" : {}", rat_to_string(r))),
        Amount::RemainderUniform => out.push_str(" : uniform-remainder"),
    }
}

pub fn write_flexcharge(spec: &ChargeSpec, rules: &[DischargingRule]) -> String {
    let mut out = String::from("flexcharge v1\n");
    out.push_str(&format!("name {}\n", spec.name));
    for (kind, affine) in [("vertex", &spec.vertex), ("face", &spec.face)] {
        out.push_str(&format!(
            "{kind} {} {}\n",
            rat_to_string(&affine.slope),
            rat_to_string(&affine.offset)
        ));
    }
    for rule in rules {
        out.push_str(&format!("rule {} ", rule.name));
        match &rule.sender {
            Sender::Vertices(b) => out.push_str(&format!("vertex deg {b}")),
            Sender::Faces { len, incident } => {
                out.push_str(&format!("face len {len}"));
                if let Some((b, with)) = incident {
                    out.push_str(if *with { " with deg " } else { " without deg " });
                    out.push_str(&b.to_string());
                }
            }
        }
        out.push_str(" ->");
        for (i, t) in rule.transfers.iter().enumerate() {
            out.push_str(if i > 0 { " ; " } else { " " });
            write_transfer(&mut out, t);
        }
        out.push('\n');
    }
    out
}

fn parse_id_set(
    line: usize,
    tokens: &[&str],
    what: &str,
) -> Result<BTreeSet<VertexId>, FormatError> {
    let mut set = BTreeSet::new();
    for tok in tokens {
        let v: VertexId = parse_num(line, tok, "vertex id")?;
        if !set.insert(v) {
            return Err(malformed(line, format!("{what} repeats vertex {v}")));
        }
    }
    Ok(set)
}

fn parse_step(line: usize, tokens: &[&str]) -> Result<ResolutionStep, FormatError> {
    if tokens.len() < 3 {
        return Err(malformed(line, "expected `step <index> <template> …`"));
    }
    let index: usize = parse_num(line, tokens[1], "step index")?;
    let template = tokens[2].to_string();
    let mut sections: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for &tok in &tokens[3..] {
        match tok {
            "map" | "peel" | "boundary" | "fix" => {
                if sections.insert(tok, Vec::new()).is_some() {
                    return Err(malformed(line, format!("section `{tok}` repeated")));
                }
                current = Some(tok);
            }
            _ => match current {
                Some(section) => sections.get_mut(section).unwrap().push(tok),
                None => {
                    return Err(malformed(line, format!("token `{tok}` outside any section")))
                }
            },
        }
    }
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for tok in sections.remove("map").unwrap_or_default() {
        let (t, h) = tok
            .split_once(':')
            .ok_or_else(|| malformed(line, format!("expected `<t:h>` map pair, got `{tok}`")))?;
        let t: VertexId = parse_num(line, t, "template vertex")?;
        let h: VertexId = parse_num(line, h, "host vertex")?;
        if map.insert(t, h).is_some() {
            return Err(malformed(line, format!("map repeats template vertex {t}")));
        }
    }
    let peeled = parse_id_set(line, &sections.remove("peel").unwrap_or_default(), "peel")?;
    let boundary =
        parse_id_set(line, &sections.remove("boundary").unwrap_or_default(), "boundary")?;
    let fix = parse_id_set(line, &sections.remove("fix").unwrap_or_default(), "fix")?;
    Ok(ResolutionStep { index, template, map, peeled, boundary, fix })
}

pub fn parse_flexres(text: &str) -> Result<Resolution, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexres v1")?;
    let mut k: Option<u32> = None;
    let mut b: Option<u32> = None;
    let mut family: Option<String> = None;
    let mut kind: Option<ResolutionKind> = None;
    let mut steps: Vec<ResolutionStep> = Vec::new();
    let mut residue: Option<(BTreeSet<VertexId>, BTreeSet<VertexId>)> = None;
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "k" | "b" => {
                let slot = if tokens[0] == "k" { &mut k } else { &mut b };
                if tokens.len() != 2 || slot.is_some() {
                    return Err(malformed(ln, format!("expected a single `{} <n>`", tokens[0])));
                }
                *slot = Some(parse_num(ln, tokens[1], "count")?);
            }
            "family" => {
                if tokens.len() != 2 || family.is_some() {
                    return Err(malformed(ln, "expected a single `family <name>`"));
                }
                family = Some(tokens[1].to_string());
            }
            "kind" => {
                if tokens.len() != 2 || kind.is_some() {
                    return Err(malformed(ln, "expected a single `kind strong|weak`"));
                }
                kind = Some(match tokens[1] {
                    "strong" => ResolutionKind::Strong,
                    "weak" => ResolutionKind::Weak,
                    other => {
                        return Err(malformed(ln, format!("unknown kind `{other}`")))
                    }
                });
            }
            "step" => {
                if residue.is_some() {
                    return Err(malformed(ln, "`step` after `residue`"));
                }
                let step = parse_step(ln, &tokens)?;
                if step.index != steps.len() {
                    return Err(malformed(
                        ln,
                        format!("step index {} out of order, expected {}", step.index, steps.len()),
                    ));
                }
                steps.push(step);
            }
            "residue" => {
                if residue.is_some() {
                    return Err(malformed(ln, "`residue` declared twice"));
                }
                let rest = &tokens[1..];
                let (ids, fix) = match rest.iter().position(|&t| t == "fix") {
                    Some(i) => (&rest[..i], &rest[i + 1..]),
                    None => (rest, &[][..]),
                };
                residue = Some((
                    parse_id_set(ln, ids, "residue")?,
                    parse_id_set(ln, fix, "residue fix")?,
                ));
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| FormatError::Invalid(format!("missing `{what}` line"));
    let (residue, residue_fix) = residue.ok_or_else(|| missing("residue"))?;
    Ok(Resolution {
        k: k.ok_or_else(|| missing("k"))?,
        b: b.ok_or_else(|| missing("b"))?,
        family: family.ok_or_else(|| missing("family"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
        steps,
        residue,
        residue_fix,
    })
}

fn push_id_section(out: &mut String, keyword: &str, ids: &BTreeSet<VertexId>) {
    if ids.is_empty() {
        return;
    }
    out.push_str(&format!(" {keyword}"));
    for v in ids {
        out.push_str(&format!(" {v}"));
    }
}

pub fn write_flexres(res: &Resolution) -> String {
    let mut out = String::from("flexres v1\n");
    out.push_str(&format!("k {}\n", res.k));
    out.push_str(&format!("b {}\n", res.b));
    out.push_str(&format!("family {}\n", res.family));
    out.push_str(&format!(
        "kind {}\n",
        match res.kind {
            ResolutionKind::Strong => "strong",
            ResolutionKind::Weak => "weak",
        }
    ));
    for s in &res.steps {
        out.push_str(&format!("step {} {}", s.index, s.template));
        if !s.map.is_empty() {
            out.push_str(" map");
            for (t, h) in &s.map {
                out.push_str(&format!(" {t}:{h}"));
            }
        }
        push_id_section(&mut out, "peel", &s.peeled);
        push_id_section(&mut out, "boundary", &s.boundary);
        push_id_section(&mut out, "fix", &s.fix);
        out.push('\n');
    }
    out.push_str("residue");
    for v in &res.residue {
        out.push_str(&format!(" {v}"));
    }
    push_id_section(&mut out, "fix", &res.residue_fix);
    out.push('\n');
    out
}

/// A template collection parsed from a `flexlib v1` file. The file carries
/// patterns only; the color count and forbidden family arrive separately
/// when the collection is turned into a [`ConfigurationLibrary`].
#[derive(Debug, Clone)]
pub struct ParsedLibrary {
    pub name: String,
    pub templates: Vec<ConfigTemplate>,
}

fn parse_degree_bound(line: usize, token: &str) -> Result<DegreeBound, FormatError> {
    if token == "any" {
        return Ok(DegreeBound::Any);
    }
    let (kind, n) = token
        .split_once(':')
        .ok_or_else(|| malformed(line, format!("bad degree bound `{token}`")))?;
    let n: usize = parse_num(line, n, "degree")?;
    match kind {
        "exact" => Ok(DegreeBound::Exact(n)),
        "atmost" => Ok(DegreeBound::AtMost(n)),
        "atleast" => Ok(DegreeBound::AtLeast(n)),
        other => Err(malformed(line, format!("unknown degree bound kind `{other}`"))),
    }
}

fn parse_shape(line: usize, token: &str) -> Result<Vec<u32>, FormatError> {
    token.split(',').map(|t| parse_num(line, t, "face length")).collect()
}

fn parse_check(line: usize, tokens: &[&str]) -> Result<MatchCheck, FormatError> {
    let args = &tokens[2..];
    match tokens[1] {
        "face-shape" => {
            let count = args
                .get(2)
                .and_then(|t| t.strip_prefix("count="))
                .ok_or_else(|| {
                    malformed(line, "expected `check face-shape <v> <a,b,c> count=<n>`")
                })?;
            if args.len() != 3 {
                return Err(malformed(line, "expected `check face-shape <v> <a,b,c> count=<n>`"));
            }
            Ok(MatchCheck::OnFaceShape {
                v: parse_num(line, args[0], "vertex id")?,
                shape: parse_shape(line, args[1])?,
                count: parse_num(line, count, "count")?,
            })
        }
        "face-len" => {
            if args.len() != 2 {
                return Err(malformed(line, "expected `check face-len <v> <len>`"));
            }
            Ok(MatchCheck::OnFaceLen {
                v: parse_num(line, args[0], "vertex id")?,
                len: parse_num(line, args[1], "face length")?,
            })
        }
        "pendent-triangle" => {
            if args.len() != 1 {
                return Err(malformed(line, "expected `check pendent-triangle <v>`"));
            }
            Ok(MatchCheck::PendentTriangle { v: parse_num(line, args[0], "vertex id")? })
        }
        "disjoint-face-shapes" => {
            if args.len() != 3 {
                return Err(malformed(
                    line,
                    "expected `check disjoint-face-shapes <u> <v> <a,b,c>`",
                ));
            }
            Ok(MatchCheck::DisjointFaceShapes {
                u: parse_num(line, args[0], "vertex id")?,
                v: parse_num(line, args[1], "vertex id")?,
                shape: parse_shape(line, args[2])?,
            })
        }
        other => Err(malformed(line, format!("unknown check `{other}`"))),
    }
}

/// In-progress template block between `template` and `end`.
struct TemplateDraft {
    line: usize,
    name: String,
    weak: bool,
    cores: Vec<(VertexId, DegreeBound)>,
    edges: Vec<(VertexId, VertexId)>,
    boundary: Option<BTreeSet<VertexId>>,
    fix: Option<BTreeSet<VertexId>>,
    checks: Vec<MatchCheck>,
}

impl TemplateDraft {
    fn finish(self, end_line: usize) -> Result<ConfigTemplate, FormatError> {
        if self.cores.is_empty() {
            return Err(malformed(self.line, format!("template `{}` has no cores", self.name)));
        }
        let ids: Vec<VertexId> = self.cores.iter().map(|&(v, _)| v).collect();
        let declared: BTreeSet<VertexId> = ids.iter().copied().collect();
        for &(u, v) in &self.edges {
            for w in [u, v] {
                if !declared.contains(&w) {
                    return Err(FormatError::UnknownVertex { line: end_line, v: w });
                }
            }
        }
        let graph = Graph::from_edges(&ids, &self.edges)
            .map_err(|e| malformed(end_line, format!("template `{}`: {e}", self.name)))?;
        let boundary = self.boundary.unwrap_or_default();
        for set in [&boundary, self.fix.as_ref().unwrap_or(&BTreeSet::new())] {
            if let Some(&v) = set.iter().find(|v| !declared.contains(v)) {
                return Err(FormatError::UnknownVertex { line: end_line, v });
            }
        }
        Ok(ConfigTemplate {
            name: self.name,
            pattern: PatternGraph { graph, degree: self.cores.into_iter().collect() },
            boundary,
            checks: self.checks,
            weak: self.weak,
            fix: self.fix,
        })
    }
}

pub fn parse_flexlib(text: &str) -> Result<ParsedLibrary, FormatError> {
    fn inside<'d>(
        d: &'d mut Option<TemplateDraft>,
        ln: usize,
        kw: &str,
    ) -> Result<&'d mut TemplateDraft, FormatError> {
        d.as_mut().ok_or_else(|| malformed(ln, format!("`{kw}` outside a template block")))
    }
    let mut lines = content_lines(text);
    expect_header(&mut lines, "flexlib v1")?;
    let mut name: Option<String> = None;
    let mut templates: Vec<ConfigTemplate> = Vec::new();
    let mut draft: Option<TemplateDraft> = None;
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "name" => {
                if tokens.len() != 2 || name.is_some() || draft.is_some() || !templates.is_empty()
                {
                    return Err(malformed(ln, "expected a single leading `name <label>`"));
                }
                name = Some(tokens[1].to_string());
            }
            "template" => {
                if draft.is_some() {
                    return Err(malformed(ln, "`template` before previous block's `end`"));
                }
                let weak = match &tokens[1..] {
                    [_] => false,
                    [_, "weak"] => true,
                    _ => return Err(malformed(ln, "expected `template <name> [weak]`")),
                };
                let t_name = tokens[1].to_string();
                if templates.iter().any(|t| t.name == t_name) {
                    return Err(malformed(ln, format!("template `{t_name}` declared twice")));
                }
                draft = Some(TemplateDraft {
                    line: ln,
                    name: t_name,
                    weak,
                    cores: Vec::new(),
                    edges: Vec::new(),
                    boundary: None,
                    fix: None,
                    checks: Vec::new(),
                });
            }
            "core" => {
                if tokens.len() != 3 {
                    return Err(malformed(ln, "expected `core <id> <bound>`"));
                }
                let d = inside(&mut draft, ln, tokens[0])?;
                let v: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                if d.cores.iter().any(|&(u, _)| u == v) {
                    return Err(malformed(ln, format!("core {v} declared twice")));
                }
                d.cores.push((v, parse_degree_bound(ln, tokens[2])?));
            }
            "edge" => {
                if tokens.len() != 3 {
                    return Err(malformed(ln, "expected `edge <u> <v>`"));
                }
                let d = inside(&mut draft, ln, tokens[0])?;
                let u: VertexId = parse_num(ln, tokens[1], "vertex id")?;
                let v: VertexId = parse_num(ln, tokens[2], "vertex id")?;
                d.edges.push((u, v));
            }
            "boundary" | "fix" => {
                let set = parse_id_set(ln, &tokens[1..], tokens[0])?;
                let d = inside(&mut draft, ln, tokens[0])?;
                let slot = if tokens[0] == "boundary" { &mut d.boundary } else { &mut d.fix };
                if slot.is_some() {
                    return Err(malformed(ln, format!("`{}` declared twice", tokens[0])));
                }
                *slot = Some(set);
            }
            "check" => {
                if tokens.len() < 2 {
                    return Err(malformed(ln, "expected `check <kind> …`"));
                }
                let check = parse_check(ln, &tokens)?;
                inside(&mut draft, ln, tokens[0])?.checks.push(check);
            }
            "end" => {
                let d = draft
                    .take()
                    .ok_or_else(|| malformed(ln, "`end` without an open template block"))?;
                templates.push(d.finish(ln)?);
            }
            other => return Err(malformed(ln, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(d) = draft {
        return Err(FormatError::Invalid(format!(
            "template `{}` (line {}) is missing its `end`",
            d.name, d.line
        )));
    }
    Ok(ParsedLibrary {
        name: name.ok_or_else(|| FormatError::Invalid("missing `name` line".to_string()))?,
        templates,
    })
}

fn write_shape(out: &mut String, shape: &[u32]) {
    let parts: Vec<String> = shape.iter().map(|l| l.to_string()).collect();
    out.push_str(&parts.join(","));
}

pub fn write_flexlib(name: &str, templates: &[ConfigTemplate]) -> String {
    let mut out = String::from("flexlib v1\n");
    out.push_str(&format!("name {name}\n"));
    for t in templates {
        out.push_str(&format!("template {}{}\n", t.name, if t.weak { " weak" } else { "" }));
        for v in t.pattern.graph.vertices() {
            let bound = match t.pattern.bound(v) {
                DegreeBound::Any => "any".to_string(),
                DegreeBound::Exact(d) => format!("exact:{d}"),
                DegreeBound::AtMost(d) => format!("atmost:{d}"),
                DegreeBound::AtLeast(d) => format!("atleast:{d}"),
            };
            out.push_str(&format!("core {v} {bound}\n"));
        }
        for (u, v) in t.pattern.graph.edges() {
            out.push_str(&format!("edge {u} {v}\n"));
        }
        if !t.boundary.is_empty() {
            out.push_str("boundary");
            for v in &t.boundary {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        if let Some(fix) = &t.fix {
            out.push_str("fix");
            for v in fix {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        for check in &t.checks {
            match check {
                MatchCheck::OnFaceShape { v, shape, count } => {
                    out.push_str(&format!("check face-shape {v} "));
                    write_shape(&mut out, shape);
                    out.push_str(&format!(" count={count}\n"));
                }
                MatchCheck::OnFaceLen { v, len } => {
                    out.push_str(&format!("check face-len {v} {len}\n"));
                }
                MatchCheck::PendentTriangle { v } => {
                    out.push_str(&format!("check pendent-triangle {v}\n"));
                }
                MatchCheck::DisjointFaceShapes { u, v, shape } => {
                    out.push_str(&format!("check disjoint-face-shapes {u} {v} "));
                    write_shape(&mut out, shape);
                    out.push('\n');
                }
            }
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip_preserves_rotation() {
        let pg = builtins::icosahedron();
        let text = write_flexgraph(&pg.graph, Some(&pg.rotation));
        let parsed = parse_flexgraph(&text).unwrap();
        assert_eq!(parsed.graph.edges(), pg.graph.edges());
        for v in pg.graph.vertices() {
            assert_eq!(parsed.rotation.order_at(v), pg.rotation.order_at(v));
        }
        assert_eq!(write_flexgraph(&parsed.graph, Some(&parsed.rotation)), text);
        parsed.plane().unwrap();
    }

    #[test]
    fn graph_rejections_carry_line_numbers() {
        assert_eq!(
            parse_flexgraph("flexlists v1\n").unwrap_err(),
            FormatError::BadHeader { line: 1, expected: "flexgraph v1" }
        );
        assert_eq!(
            parse_flexgraph("flexgraph v1\nv 0: 0\n").unwrap_err(),
            FormatError::SelfLoop { line: 2, v: 0 }
        );
        assert_eq!(
            parse_flexgraph("flexgraph v1\nv 0: 1 1\nv 1: 0\n").unwrap_err(),
            FormatError::DuplicateNeighbor { line: 2, v: 1 }
        );
        assert_eq!(
            parse_flexgraph("flexgraph v1\nv 0: 1\nv 1:\n").unwrap_err(),
            FormatError::Asymmetric { u: 0, v: 1 }
        );
        assert_eq!(
            parse_flexgraph("flexgraph v1\n\n# comment\nv 0: 7\n").unwrap_err(),
            FormatError::UnknownVertex { line: 4, v: 7 }
        );
        assert!(matches!(
            parse_flexgraph("flexgraph v1\nv 0:\nv 0:\n").unwrap_err(),
            FormatError::Malformed { line: 3, .. }
        ));
        assert!(matches!(
            parse_flexgraph("flexgraph v1\nw 0:\n").unwrap_err(),
            FormatError::Malformed { line: 2, .. }
        ));
    }

    #[test]
    fn lists_round_trip_with_plain_request() {
        let text = "flexlists v1\nL 0: 1 2\nL 1: 2 3\nR 0 2\nR 1 3\n";
        let parsed = parse_flexlists(text).unwrap();
        assert_eq!(parsed.lists.get(0).unwrap().len(), 2);
        let request = parsed.request.clone().unwrap();
        assert!(matches!(&request, Request::Plain { choices } if choices.len() == 2));
        assert_eq!(write_flexlists(&parsed.lists, parsed.request.as_ref()), text);
    }

    #[test]
    fn lists_round_trip_with_weights() {
        let text = "flexlists v1\nL 4: 1 2 3\nW 4 1 1/2\nW 4 2 0/1\n";
        let parsed = parse_flexlists(text).unwrap();
        match parsed.request.clone().unwrap() {
            Request::Weighted { weights } => {
                assert_eq!(weights[&(4, 1)], rat(1, 2));
                assert_eq!(weights[&(4, 2)], rat(0, 1));
            }
            _ => panic!("expected weights"),
        }
        assert_eq!(write_flexlists(&parsed.lists, parsed.request.as_ref()), text);
    }

    #[test]
    fn lists_rejections() {
        for (text, needle) in [
            ("flexlists v1\nL 0: 1\nR 0 1\nW 0 1 1/2\n", "mixed"),
            ("flexlists v1\nL 0: 1\nR 0 2\n", "not in"),
            ("flexlists v1\nL 0: 1\nW 0 1 -1/2\n", "negative"),
            ("flexlists v1\nL 0: 1\nW 0 1 1/0\n", "bad rational"),
            ("flexlists v1\nL 0: 1\nR 0 1\nR 0 1\n", "twice"),
            ("flexlists v1\nL 0: 1 1\n", "repeated"),
            ("flexlists v1\nR 1 1\n", "not declared"),
        ] {
            let err = parse_flexlists(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        }
    }

    #[test]
    fn config_round_trip() {
        let text = "flexconfig v1\ncore 0 deg=4\ncore 1 deg=5\ncore 2 deg=5\ncore 3 deg=5\nedge 0 1\nedge 0 3\nedge 1 2\nedge 2 3\nfix 1 2 3\n";
        let cfg = parse_flexconfig(text).unwrap();
        assert_eq!(cfg.cores(), vec![0, 1, 2, 3]);
        assert_eq!(cfg.declared_fix(), Some(&[1, 2, 3].into_iter().collect()));
        assert_eq!(write_flexconfig(&cfg), text);
    }

    #[test]
    fn config_with_boundary_round_trips() {
        let text = "flexconfig v1\ncore 0 deg=3\ncore 1 deg=3\nboundary 2\nedge 0 1\nedge 0 2\nedge 1 2\n";
        let cfg = parse_flexconfig(text).unwrap();
        assert_eq!(cfg.boundary().len(), 1);
        assert_eq!(write_flexconfig(&cfg), text);
    }

    #[test]
    fn config_rejections() {
        for (text, needle) in [
            ("flexconfig v1\ncore 0 deg=3\ncore 0 deg=3\n", "twice"),
            ("flexconfig v1\ncore 0 deg=3\nboundary 0\n", "twice"),
            ("flexconfig v1\ncore 0 deg=3\nedge 0 5\n", "not declared"),
            ("flexconfig v1\ncore 0 deg=3\ncore 1 deg=3\nedge 0 1\nedge 1 0\n", "repeated"),
            ("flexconfig v1\ncore 0 deg=3\nfix 0\nfix 0\n", "twice"),
            ("flexconfig v1\ncore 0 deg=0\ncore 1 deg=3\nedge 0 1\n", "below"),
            ("flexconfig v1\nboundary 0\n", "proper subset"),
        ] {
            let err = parse_flexconfig(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        }
    }

    #[test]
    fn family_round_trip() {
        let text = "flexfamily v1\nname square+sparse-triangles\npattern c4\nedge 0 1\nedge 0 3\nedge 1 2\nedge 2 3\npredicate triangles_within_distance 1\n";
        let fam = parse_flexfamily(text).unwrap();
        assert_eq!(fam.name(), "square+sparse-triangles");
        assert_eq!(fam.patterns().len(), 1);
        assert_eq!(fam.predicates(), &[FamilyPredicate::TrianglesWithinDistance(1)]);
        assert_eq!(write_flexfamily(&fam), text);
    }

    #[test]
    fn empty_family_defaults_to_none() {
        let fam = parse_flexfamily("flexfamily v1\n").unwrap();
        assert!(fam.is_empty());
        assert_eq!(fam.name(), "none");
    }

    #[test]
    fn family_name_defaults_to_joined_patterns() {
        let text = "flexfamily v1\npattern a\nedge 0 1\npattern b\nedge 0 1\n";
        assert_eq!(parse_flexfamily(text).unwrap().name(), "a+b");
    }

    #[test]
    fn family_rejections() {
        for (text, needle) in [
            ("flexfamily v1\nedge 0 1\n", "outside"),
            ("flexfamily v1\npattern a\nedge 0 1\npattern a\n", "twice"),
            ("flexfamily v1\npattern a\nedge 0 0\n", "self-loop"),
            ("flexfamily v1\npredicate nearest_triangle 1\n", "predicate"),
            ("flexfamily v1\nname a\nname b\n", "single"),
        ] {
            let err = parse_flexfamily(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        }
    }

    fn arbitrary_graph() -> impl Strategy<Value = Graph> {
        (1usize..=7, any::<u32>()).prop_map(|(n, bits)| {
            let mut g = Graph::new();
            for v in 0..n as VertexId {
                g.add_vertex(v);
            }
            let mut bit = 0;
            for u in 0..n as VertexId {
                for v in (u + 1)..n as VertexId {
                    if bits & (1 << bit) != 0 {
                        g.add_edge(u, v).unwrap();
                    }
                    bit += 1;
                }
            }
            g
        })
    }

    #[test]
    fn charge_round_trip_is_exact_for_all_builtins() {
        for name in crate::discharging::BUILTIN_SPECS {
            let (spec, rules) = crate::discharging::builtin_spec(name).unwrap();
            let text = write_flexcharge(&spec, &rules);
            let parsed = parse_flexcharge(&text).unwrap();
            assert_eq!(parsed.spec, spec, "{name}");
            assert_eq!(parsed.rules, rules, "{name}");
            assert_eq!(write_flexcharge(&parsed.spec, &parsed.rules), text, "{name}");
        }
    }

    #[test]
    fn parsed_charge_file_drives_a_run() {
        let text = "flexcharge v1\n\
                    name drain\n\
                    vertex 1 -4\n\
                    face 1 -4\n\
                    rule R1 vertex deg 2 -> face : 1/2\n";
        let parsed = parse_flexcharge(text).unwrap();
        assert_eq!(parsed.spec.name, "drain");
        assert_eq!(parsed.spec.expected_total, rat_int(-8));
        let pg = builtins::plane_graph_from_faces(&[vec![0, 1, 2, 3, 4], vec![4, 3, 2, 1, 0]]);
        let report = crate::discharging::run(&pg, &parsed.spec, &parsed.rules).unwrap();
        assert!(report.conserved && report.total_matches_expected);
        let last = report.phases.last().unwrap();
        assert!(last.vertices.values().all(|c| *c == rat_int(-3)));
        assert!(last.faces.values().all(|c| *c == rat(7, 2)));
    }

    #[test]
    fn charge_unnamed_specs_get_a_default_name() {
        let text = "flexcharge v1\nvertex 1 -4\nface 1 -4\n";
        let parsed = parse_flexcharge(text).unwrap();
        assert_eq!(parsed.spec.name, "custom");
        assert!(parsed.rules.is_empty());
    }

    #[test]
    fn charge_rejections_explain_themselves() {
        let needle = |text: &str, needle: &str| {
            let err = parse_flexcharge(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        };
        assert_eq!(
            parse_flexcharge("flexgraph v1\n").unwrap_err(),
            FormatError::BadHeader { line: 1, expected: "flexcharge v1" }
        );
        needle("flexcharge v1\nface 1 -4\n", "missing `vertex");
        needle("flexcharge v1\nvertex 1 -4\n", "missing `face");
        needle("flexcharge v1\nvertex 1 -4\nvertex 1 -4\n", "declared twice");
        needle("flexcharge v1\nvertex 1 -4\nface 1 -3\n", "total depends on the graph");
        needle("flexcharge v1\nvertex 1 -4\nface 2 -4\n", "total depends on the graph");
        needle("flexcharge v1\nvertex one -4\nface 1 -4\n", "bad rational");
        let preamble = "flexcharge v1\nvertex 1 -4\nface 1 -4\n";
        needle(&format!("{preamble}rule R1 vertex deg 5+ face3 : 1/2\n"), "->");
        needle(&format!("{preamble}rule R1 vertex deg 5+ -> wat : 1/2\n"), "unknown transfer target");
        needle(&format!("{preamble}rule R1 vertex deg 5+ -> face3 : lots\n"), "bad transfer");
        needle(&format!("{preamble}rule R1 face len 3 with 3 -> face : 1/2\n"), "with deg");
        needle(
            &format!("{preamble}rule R1 face len 3 -> vertex if on facevec{{}} : 1/2\n"),
            "at least one entry",
        );
        needle(
            &format!("{preamble}rule R1 vertex deg 3 -> face3 if on facevec{{3,3,3}} : 1/2\n"),
            "vertex targets only",
        );
        needle(
            &format!("{preamble}rule R1 vertex deg 3 -> face : 1/2\nrule R1 vertex deg 4 -> face : 1/2\n"),
            "declared twice",
        );
        needle(&format!("{preamble}rule R1 vertex deg x -> face : 1/2\n"), "bound");
        needle(&format!("{preamble}charge 1 2\n"), "unknown directive");
    }

    #[test]
    fn resolution_round_trips_through_flexres() {
        use crate::resolution::{build_resolution, library_thm4, validate_resolution};
        let tc = builtins::truncated_cube();
        let lib = library_thm4();
        let res = build_resolution(&tc.graph, &lib, 6, Some(&tc.rotation), false).unwrap();
        let text = write_flexres(&res);
        let parsed = parse_flexres(&text).unwrap();
        assert_eq!(parsed, res);
        assert_eq!(write_flexres(&parsed), text);
        assert!(validate_resolution(&tc.graph, &parsed, &lib.family).valid);
    }

    #[test]
    fn weak_resolution_round_trips_through_flexres() {
        let res = Resolution {
            k: 5,
            b: 4,
            family: "house+k23".to_string(),
            kind: ResolutionKind::Weak,
            steps: vec![ResolutionStep {
                index: 0,
                template: "lopsided-square".to_string(),
                map: (0..4).map(|v| (v, v + 10)).collect(),
                peeled: (10..14).collect(),
                boundary: BTreeSet::new(),
                fix: BTreeSet::from([11, 12, 13]),
            }],
            residue: BTreeSet::from([14, 15]),
            residue_fix: BTreeSet::from([14]),
        };
        let text = write_flexres(&res);
        assert!(text.contains("kind weak"));
        assert!(text.contains("map 0:10 1:11 2:12 3:13"));
        assert!(text.contains("residue 14 15 fix 14"));
        let parsed = parse_flexres(&text).unwrap();
        assert_eq!(parsed, res);
        assert_eq!(write_flexres(&parsed), text);
    }

    #[test]
    fn flexres_rejections_carry_line_numbers() {
        let needle = |text: &str, needle: &str| {
            let err = parse_flexres(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` lacks `{needle}`");
        };
        assert_eq!(
            parse_flexres("flexgraph v1\n").unwrap_err(),
            FormatError::BadHeader { line: 1, expected: "flexres v1" }
        );
        let preamble = "flexres v1\nk 4\nb 2\nfamily c4\nkind strong\n";
        needle("flexres v1\nk 4\nk 5\n", "single `k <n>`");
        needle(&format!("{preamble}kind weak\n"), "single `kind");
        needle("flexres v1\nkind sturdy\n", "unknown kind");
        needle(&format!("{preamble}step 1 t peel 0\nresidue\n"), "out of order");
        needle(&format!("{preamble}step 0 t map 7 peel 0\nresidue\n"), "map pair");
        needle(&format!("{preamble}step 0 t map 0:1 0:2 peel 1\nresidue\n"), "repeats");
        needle(&format!("{preamble}step 0 t peel 1 1\nresidue\n"), "repeats vertex 1");
        needle(&format!("{preamble}step 0 t 5 peel 1\nresidue\n"), "outside any section");
        needle(&format!("{preamble}step 0 t peel 1 peel 2\nresidue\n"), "repeated");
        needle(&format!("{preamble}residue\nstep 0 t peel 1\n"), "after `residue`");
        needle(&format!("{preamble}residue\nresidue\n"), "declared twice");
        needle(&format!("{preamble}verdict yes\n"), "unknown directive");
        needle(&format!("{preamble}step 0 t peel 1\n"), "missing `residue`");
        needle("flexres v1\nresidue\n", "missing `k`");
    }

    #[test]
    fn template_libraries_round_trip_through_flexlib() {
        // thm4 exercises face checks and boundaries, thm5 a weak template
        // with a declared fix set, thm3 the degree-parameterized stars.
        for lib in [
            crate::resolution::library_thm2(),
            crate::resolution::library_thm3(6),
            crate::resolution::library_thm4(),
            crate::resolution::library_thm5(),
        ] {
            let text = write_flexlib(&lib.name, &lib.templates);
            let parsed = parse_flexlib(&text).unwrap();
            assert_eq!(parsed.name, lib.name);
            assert_eq!(parsed.templates, lib.templates);
            assert_eq!(write_flexlib(&parsed.name, &parsed.templates), text);
        }
    }

    #[test]
    fn flexlib_rejections_carry_line_numbers() {
        let needle = |text: &str, expect: &str| {
            let err = parse_flexlib(text).unwrap_err().to_string();
            assert!(err.contains(expect), "`{err}` does not mention `{expect}`");
        };
        let head = "flexlib v1\nname lib\n";
        needle("flexgraph v1\n", "expected header");
        needle("flexlib v1\ntemplate t\ncore 0 any\nend\nname lib\n", "leading `name");
        needle(&format!("{head}core 0 any\n"), "outside a template block");
        needle(&format!("{head}template t\ncore 0 any\n"), "missing its `end`");
        needle(&format!("{head}template t\nend\n"), "has no cores");
        needle(&format!("{head}template t\ncore 0 deg5\nend\n"), "bad degree bound");
        needle(&format!("{head}template t\ncore 0 most:3\nend\n"), "unknown degree bound");
        needle(&format!("{head}template t\ncore 0 any\ncore 0 any\nend\n"), "declared twice");
        needle(
            &format!("{head}template t\ncore 0 any\nedge 0 1\nend\n"),
            "vertex 1 is not declared",
        );
        needle(
            &format!("{head}template t\ncore 0 any\nboundary 1\nend\n"),
            "vertex 1 is not declared",
        );
        needle(
            &format!("{head}template t\ncore 0 any\ncheck face-shape 0 3,4,4\nend\n"),
            "count=",
        );
        needle(&format!("{head}template t\ncore 0 any\ncheck halo 0\nend\n"), "unknown check");
        needle(&format!("{head}template t\ntemplate u\n"), "before previous block's `end`");
        needle(&format!("{head}template t\ncore 0 any\nend\ntemplate t\n"), "declared twice");
        needle(&format!("{head}end\n"), "without an open template");
        needle(&format!("{head}rule x\n"), "unknown directive");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn graph_write_parse_is_identity(g in arbitrary_graph()) {
            let text = write_flexgraph(&g, None);
            let parsed = parse_flexgraph(&text).unwrap();
            prop_assert_eq!(parsed.graph.edges(), g.edges());
            prop_assert_eq!(
                parsed.graph.vertices().collect::<Vec<_>>(),
                g.vertices().collect::<Vec<_>>()
            );
            prop_assert_eq!(write_flexgraph(&parsed.graph, Some(&parsed.rotation)), text);
        }

        #[test]
        fn config_write_parse_is_stable(g in arbitrary_graph(), extra in 0u32..3) {
            let host = g.vertices().map(|v| (v, g.degree(v) as u32 + extra)).collect();
            let cfg = Configuration::new(g, BTreeSet::new(), host, None).unwrap();
            let text = write_flexconfig(&cfg);
            let reparsed = parse_flexconfig(&text).unwrap();
            prop_assert_eq!(write_flexconfig(&reparsed), text);
        }
    }
}
