//! Report tree shared by every command, with JSON and plain-text renderings.

use std::fmt::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use prym_forge_core::bounds::{CliffordBound, CounterexamplePlan, GenusFormulas, GonalityVerdict};
use prym_forge_core::corresp::IdentityReport;
use prym_forge_core::cover::{CheckStatus, Validation};
use prym_forge_core::homology::PrymPackage;
use prym_forge_core::ngonal::{SplitCheck, SplitReport};
use prym_forge_core::seed::SeedFile;

pub const TOOL: &str = "prym-forge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `sha256:<hex>` of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub exit_code: i32,
    pub body: Body,
}

impl Report {
    pub fn new(command: &'static str, body: Body, exit_code: i32) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command,
            input: None,
            input_digest: None,
            exit_code,
            body,
        }
    }

    pub fn with_input(mut self, path: &str, bytes: Option<&[u8]>) -> Self {
        self.input = Some(path.to_string());
        self.input_digest = bytes.map(digest);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.tool, self.version, self.command);
        if let Some(input) = &self.input {
            let _ = write!(out, "input: {input}");
            if let Some(d) = &self.input_digest {
                let _ = write!(out, " ({d})");
            }
            out.push('\n');
        }
        self.body.render(&mut out);
        let _ = writeln!(out, "exit code: {}", self.exit_code);
        out
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Validate {
        admissible: bool,
        validation: Validation,
    },
    Analyze(Box<AnalyzeBody>),
    Verify(Box<VerifyBody>),
    Search(SearchBody),
    Bounds(BoundsRecord),
    Error(ErrorBody),
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub category: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
}

#[derive(Debug, Serialize)]
pub struct SigmaSummary {
    pub swaps_components: bool,
    pub fixed_point_free: bool,
    pub quotient_genera: Vec<i64>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeBody {
    pub validation: Validation,
    pub split: SplitReport,
    /// Closed-form cross checks; empty when the lift cover is connected.
    pub checks: Vec<SplitCheck>,
    pub formulas: Option<GenusFormulas>,
    pub sigma: SigmaSummary,
    pub primitive: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyBody {
    pub which: &'static str,
    pub identities: Vec<IdentityReport>,
    pub prym: Option<PrymPackage>,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SearchBody {
    pub n: usize,
    pub base_genus: usize,
    pub branch_count: usize,
    pub requested: usize,
    pub seed: u64,
    pub attempt_budget: u64,
    pub attempts: u64,
    pub seeds: Vec<SeedFile>,
    pub written: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum BoundsRecord {
    Castelnuovo {
        n1: u64,
        n2: u64,
        g_y1: u64,
        g_y2: u64,
        max_genus: u64,
    },
    Gonality {
        n: u64,
        gon_y: u64,
        delta: u64,
        threshold: u64,
        verdict: GonalityVerdict,
    },
    Clifford(CliffordBound),
    Plan(CounterexamplePlan),
    Vandermonde {
        n: u64,
        g_x: u64,
        value: String,
    },
    Genus(GenusFormulas),
}

fn status_tag(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn render_validation(out: &mut String, v: &Validation) {
    for d in &v.diagnostics {
        let _ = writeln!(out, "  {d}");
    }
    let _ = writeln!(
        out,
        "admissible: {}",
        if v.is_admissible() { "yes" } else { "no" }
    );
}

impl Body {
    fn render(&self, out: &mut String) {
        match self {
            Body::Validate { validation, .. } => render_validation(out, validation),
            Body::Analyze(a) => a.render(out),
            Body::Verify(v) => v.render(out),
            Body::Search(s) => s.render(out),
            Body::Bounds(b) => b.render(out),
            Body::Error(e) => {
                let _ = write!(out, "error ({}): ", e.category);
                if let (Some(l), Some(c)) = (e.line, e.column) {
                    let _ = write!(out, "line {l}, column {c}: ");
                }
                let _ = writeln!(out, "{}", e.message);
                if let Some(v) = &e.validation {
                    for d in v
                        .diagnostics
                        .iter()
                        .filter(|d| d.status != CheckStatus::Pass)
                    {
                        let _ = writeln!(out, "  {d}");
                    }
                }
            }
        }
    }
}

impl AnalyzeBody {
    fn render(&self, out: &mut String) {
        let s = &self.split;
        let _ = writeln!(
            out,
            "n = {}, g_Y = {}, g_X = {}, sign character {:?}",
            s.n, s.base_genus, s.pair_genus, s.sign_character
        );
        let _ = writeln!(
            out,
            "lift cover: degree {}, {} component(s){}",
            s.total_degree,
            s.component_count,
            if s.split { "" } else { " (does not split)" }
        );
        for (i, c) in s.components.iter().enumerate() {
            let _ = writeln!(
                out,
                "  C~{}: degree {}, genus {}, ramification degree {}",
                i + 1,
                c.degree,
                c.genus,
                c.ramification_degree
            );
        }
        let _ = writeln!(
            out,
            "ramification points per branch fiber: {:?}",
            s.ramification_points_per_branch
        );
        for c in &self.checks {
            let _ = writeln!(out, "  [{}] {}: {}", status_tag(c.passed), c.name, c.detail);
        }
        if let Some(f) = &self.formulas {
            let _ = write!(
                out,
                "closed forms: deg R = {}, g(C~i) = {}",
                f.ramification_degree, f.lift_component_genus
            );
            if let Some(q) = f.quotient_component_genus {
                let _ = write!(out, ", g(Ci) = {q}");
            }
            let _ = writeln!(out, ", dim P = {}", f.dim_prym);
        }
        let _ = writeln!(
            out,
            "sigma: {}, {}; quotient genera {:?}",
            if self.sigma.swaps_components {
                "swaps the components"
            } else {
                "preserves each component"
            },
            if self.sigma.fixed_point_free {
                "fixed-point free"
            } else {
                "has fixed points"
            },
            self.sigma.quotient_genera
        );
        let _ = writeln!(out, "primitive pair action: {}", self.primitive);
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
    }
}

impl VerifyBody {
    fn render(&self, out: &mut String) {
        for id in &self.identities {
            let _ = writeln!(
                out,
                "[{}] {} ({} fiber points)",
                status_tag(id.holds),
                id.name,
                id.checked_points
            );
            if let Some(c) = &id.counterexample {
                let _ = writeln!(out, "  at {}: {} != {}", c.witness, c.lhs, c.rhs);
            }
        }
        if let Some(p) = &self.prym {
            for c in &p.covers {
                let _ = writeln!(
                    out,
                    "H1({}): genus {}, rank {}, chi {}, unimodular {}",
                    c.name, c.genus, c.rank, c.euler_characteristic, c.form_unimodular
                );
            }
            for v in &p.verdicts {
                let _ = write!(out, "[{}] {}", status_tag(v.passed), v.name);
                if !v.detail.is_empty() {
                    let _ = write!(out, ": {}", v.detail);
                }
                out.push('\n');
            }
            if let Some(s) = &p.s {
                let _ = writeln!(out, "s on Prym lattices: {:?}", s);
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
    }
}

impl SearchBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "n = {}, g_Y = {}, b = {}, seed {}: {} of {} found in {} attempts (budget {})",
            self.n,
            self.base_genus,
            self.branch_count,
            self.seed,
            self.seeds.len(),
            self.requested,
            self.attempts,
            self.attempt_budget
        );
        if self.written.is_empty() {
            for s in &self.seeds {
                out.push_str(&s.to_canonical());
            }
        } else {
            for w in &self.written {
                let _ = writeln!(out, "wrote {w}");
            }
        }
    }
}

impl BoundsRecord {
    fn render(&self, out: &mut String) {
        let _ = match self {
            BoundsRecord::Castelnuovo {
                n1,
                n2,
                g_y1,
                g_y2,
                max_genus,
            } => writeln!(
                out,
                "Castelnuovo bound for degrees ({n1}, {n2}) over genera ({g_y1}, {g_y2}): {max_genus}"
            ),
            BoundsRecord::Gonality {
                n,
                gon_y,
                delta,
                threshold,
                verdict,
            } => match verdict {
                GonalityVerdict::Equals { gonality } => writeln!(
                    out,
                    "n = {n}, gon Y = {gon_y}, delta = {delta} >= {threshold}: gon X = {gonality}"
                ),
                GonalityVerdict::HypothesisFails { deficit } => writeln!(
                    out,
                    "n = {n}, gon Y = {gon_y}, delta = {delta} < {threshold}: hypothesis fails (deficit {deficit})"
                ),
            },
            BoundsRecord::Clifford(c) => writeln!(
                out,
                "g_Y = {}, gon Y = {}, delta = {}: gon X = {}, cliff X >= {} (gonality route {}, 2 g_Y - 1 = {})",
                c.g_y, c.gon_y, c.delta, c.gonality_x, c.bound, c.from_gonality, c.stated
            ),
            BoundsRecord::Plan(p) => writeln!(
                out,
                "target {}: g_Y = {}, gon Y = {}, delta_min = {}, g_X = {}",
                p.target, p.g_y, p.gon_y, p.delta_min, p.g_x
            ),
            BoundsRecord::Vandermonde { n, g_x, value } => {
                writeln!(out, "Vandermonde sum for n = {n}, g_X = {g_x}: {value}")
            }
            BoundsRecord::Genus(f) => {
                let _ = writeln!(
                    out,
                    "n = {}, g_X = {}, g_Y = {}: deg R = {}, g(C~i) = {}, dim P = {}",
                    f.n, f.g_x, f.g_y, f.ramification_degree, f.lift_component_genus, f.dim_prym
                );
                if let (Some(q), Some(d)) = (f.quotient_component_genus, f.dim_prym_first) {
                    let _ = writeln!(out, "g(Ci) = {q}, dim P1 = {d}");
                }
                writeln!(out, "class coefficient 2^(n-1) = {}", f.class_coefficient)
            }
        };
    }
}
