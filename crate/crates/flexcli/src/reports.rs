//! Report payloads the `flex` binary prints.
//!
//! Every command wraps its payload in [`Envelope`] and serializes it with
//! `serde_json::to_string_pretty`; all maps are ordered and no payload
//! contains timestamps or machine state, so a rerun with the same flags
//! prints the same bytes. Rationals appear as `"num/den"` strings. Each
//! payload also renders a compact text form for `--format text`.

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use flexcore::coloring::{Coloring, Color, EpsilonBound, MaxSatisfaction};
use flexcore::discharging::DischargeReport;
use flexcore::graph::VertexId;
use flexcore::rational::{rat_to_string, Rat};
use flexcore::reducibility::ReducibilityReport;
use flexcore::resolution::{ResolutionKind, ValidationReport};
use flexcore::sampler::BoundReport;

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub command: &'static str,
    pub ok: bool,
    pub report: T,
}

fn ids(set: &BTreeSet<VertexId>) -> String {
    if set.is_empty() {
        return "-".to_string();
    }
    let parts: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    parts.join(" ")
}

#[derive(Serialize)]
pub struct CheckConfigReport {
    pub k: u32,
    pub family: String,
    pub mode: String,
    pub expect: Option<bool>,
    pub expect_met: Option<bool>,
    pub result: ReducibilityReport,
}

impl CheckConfigReport {
    pub fn text(&self) -> String {
        let r = &self.result;
        let mut out = format!(
            "verdict {} (mode {}, k={}, family {})\nstrong {}  weak {}\nfix {}\n",
            r.verdict,
            self.mode,
            self.k,
            self.family,
            r.strong,
            r.weak,
            ids(&r.fix_set),
        );
        if let Some(met) = self.expect_met {
            let _ = writeln!(out, "expectation {}", if met { "met" } else { "NOT met" });
        }
        out
    }
}

#[derive(Serialize)]
pub struct ResolveReport {
    pub library: String,
    pub k: u32,
    pub family: String,
    pub kind: ResolutionKind,
    pub steps: usize,
    pub residue_size: usize,
    pub b: u32,
    pub bounds: EpsilonBound,
    pub validation: ValidationReport,
    /// The certificate itself, in `flexres v1` form.
    pub certificate: String,
}

impl ResolveReport {
    pub fn text(&self) -> String {
        format!(
            "resolved with library {}: {} steps, residue {}, b={}, kind {:?}\nepsilon {}  p {}\n{}",
            self.library,
            self.steps,
            self.residue_size,
            self.b,
            self.kind,
            rat_to_string(&self.bounds.epsilon),
            rat_to_string(&self.bounds.p),
            self.certificate,
        )
    }
}

#[derive(Serialize)]
pub struct SampleReport {
    pub samples: u64,
    pub seed: u64,
    pub all_proper: bool,
    pub colorings: Vec<Coloring>,
}

impl SampleReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "{} samples, seed {}, all proper: {}\n",
            self.samples, self.seed, self.all_proper
        );
        for phi in &self.colorings {
            let parts: Vec<String> =
                phi.map.iter().map(|(v, c)| format!("{v}={c}")).collect();
            let _ = writeln!(out, "{}", parts.join(" "));
        }
        out
    }
}

#[derive(Serialize)]
pub struct MarginalRow {
    pub v: VertexId,
    pub c: Color,
    #[serde(with = "flexcore::rational::serde_rat")]
    pub p: Rat,
}

fn rows_text(rows: &[MarginalRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let _ = writeln!(out, "{} {} {}", row.v, row.c, rat_to_string(&row.p));
    }
    out
}

#[derive(Serialize)]
pub struct MarginalsReport {
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<MarginalRow>,
}

impl MarginalsReport {
    pub fn text(&self) -> String {
        format!("{} samples, seed {}\n{}", self.samples, self.seed, rows_text(&self.rows))
    }
}

#[derive(Serialize)]
pub struct ExactReport {
    pub support: usize,
    #[serde(with = "flexcore::rational::serde_rat")]
    pub total: Rat,
    pub rows: Vec<MarginalRow>,
    pub bounds: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_satisfaction: Option<String>,
}

impl ExactReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "support {}, total {}\nbounds ok: {} (epsilon {}, p {})\n",
            self.support,
            rat_to_string(&self.total),
            self.bounds.ok(),
            rat_to_string(&self.bounds.epsilon),
            rat_to_string(&self.bounds.p),
        );
        if let Some(s) = &self.expected_satisfaction {
            let _ = writeln!(out, "expected satisfaction {s}");
        }
        out.push_str(&rows_text(&self.rows));
        out
    }
}

pub fn discharge_text(r: &DischargeReport) -> String {
    let mut out = format!(
        "spec {}: initial total {} (expected: {}), conserved: {}\n",
        r.spec,
        rat_to_string(&r.total),
        r.total_matches_expected,
        r.conserved,
    );
    for phase in &r.phases {
        let _ = writeln!(out, "after {}: total {}", phase.phase, rat_to_string(&phase.total()));
    }
    for neg in &r.negative {
        let _ = writeln!(out, "negative: {} at {}", neg.element, rat_to_string(&neg.charge));
    }
    out
}

#[derive(Serialize)]
pub struct OracleReport {
    #[serde(with = "flexcore::rational::serde_rat")]
    pub normalizer: Rat,
    pub result: MaxSatisfaction,
}

impl OracleReport {
    pub fn text(&self) -> String {
        let parts: Vec<String> =
            self.result.witness.map.iter().map(|(v, c)| format!("{v}={c}")).collect();
        format!(
            "best ratio {} (normalizer {})\nwitness {}\n",
            rat_to_string(&self.result.best_ratio),
            rat_to_string(&self.normalizer),
            parts.join(" "),
        )
    }
}

#[derive(Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub family: Option<String>,
    /// None when no family is advertised, otherwise the check's outcome.
    pub family_free: Option<bool>,
    pub plane: bool,
    pub round_trip: bool,
    pub ok: bool,
    pub note: String,
}

#[derive(Serialize)]
pub struct CorpusReport {
    pub entries: Vec<CorpusRow>,
}

impl CorpusReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let family = match (&e.family, e.family_free) {
                (Some(f), Some(true)) => format!("{f}-free"),
                (Some(f), _) => format!("{f} VIOLATED"),
                (None, _) => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{}: n={} m={} plane={} round-trip={} family={} [{}] {}",
                e.name,
                e.vertices,
                e.edges,
                e.plane,
                e.round_trip,
                family,
                if e.ok { "ok" } else { "FAIL" },
                e.note,
            );
        }
        out
    }
}
