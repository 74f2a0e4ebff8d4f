//! Machine-readable report schemas. Every report deserializes back to an
//! equal value.

use std::fmt::Write as _;

use ctx_core::empirical::{Compatibility, EmpiricalModel};
use ctx_core::hidden_variable::{Certificate, ContextualityClass, FeasibilityVerdict};
use ctx_core::rational::{format_rational, int};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "ctx";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Accuracy reported alongside every ϑ value.
pub const THETA_TOLERANCE: f64 = 1e-4;

pub trait Render: Serialize {
    fn text(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn timing_line(out: &mut String, timing: Option<f64>) {
    if let Some(ms) = timing {
        let _ = writeln!(out, "time: {ms} ms");
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScenarioListing(pub Vec<ScenarioEntry>);

impl Render for ScenarioListing {
    fn text(&self) -> String {
        let width = self.0.iter().map(|e| e.name.len()).max().unwrap_or(0);
        self.0.iter().map(|e| format!("{:width$}  {}\n", e.name, e.description)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub first: String,
    pub second: String,
    pub overlap: Vec<String>,
    pub first_marginal: Value,
    pub second_marginal: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub compatible: bool,
    pub witness: Option<WitnessReport>,
}

impl CompatibilityReport {
    pub fn new(model: &EmpiricalModel, c: &Compatibility) -> Self {
        match c {
            Compatibility::Compatible => CompatibilityReport { compatible: true, witness: None },
            Compatibility::Incompatible(w) => {
                let s = model.scenario();
                CompatibilityReport {
                    compatible: false,
                    witness: Some(WitnessReport {
                        first: s.context_key(&s.cover()[w.first]),
                        second: s.context_key(&s.cover()[w.second]),
                        overlap: w.overlap.members().iter().map(|&m| s.measurements()[m].clone()).collect(),
                        first_marginal: w.first_marginal.weights().to_json(),
                        second_marginal: w.second_marginal.weights().to_json(),
                    }),
                }
            }
        }
    }

    fn text(&self, out: &mut String) {
        match &self.witness {
            None => out.push_str("compatibility: compatible\n"),
            Some(w) => {
                let _ = writeln!(
                    out,
                    "compatibility: incompatible on {{{}}} between {} {} and {} {}",
                    w.overlap.join(","),
                    w.first,
                    w.first_marginal,
                    w.second,
                    w.second_marginal
                );
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CertificateJson {
    Rational(Vec<String>),
    Boolean(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub semiring: String,
    pub feasible: bool,
    /// Weights over global sections in enumeration order.
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    /// Labels of the global sections carrying nonzero certificate weight.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support: Vec<String>,
}

impl FeasibilityReport {
    pub fn new(verdict: &FeasibilityVerdict, global_labels: &[String]) -> Self {
        let (certificate, support) = match &verdict.certificate {
            None => (None, Vec::new()),
            Some(Certificate::Rational(x)) => (
                Some(CertificateJson::Rational(x.iter().map(format_rational).collect())),
                x.iter()
                    .zip(global_labels)
                    .filter(|(v, _)| **v != int(0))
                    .map(|(v, l)| format!("{l}: {}", format_rational(v)))
                    .collect(),
            ),
            Some(Certificate::Boolean(x)) => (
                Some(CertificateJson::Boolean(x.clone())),
                x.iter().zip(global_labels).filter(|(b, _)| **b).map(|(_, l)| l.clone()).collect(),
            ),
        };
        FeasibilityReport {
            semiring: verdict.semiring.to_string(),
            feasible: verdict.feasible,
            certificate,
            candidates: verdict.candidate_count,
            support,
        }
    }

    fn text(&self, out: &mut String) {
        let _ =
            write!(out, "feasibility[{}]: {}", self.semiring, if self.feasible { "feasible" } else { "infeasible" });
        if let Some(c) = self.candidates {
            let _ = write!(out, " ({c} candidate global sections)");
        }
        out.push('\n');
        for s in &self.support {
            let _ = writeln!(out, "  {s}");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub input: String,
    pub scenario: String,
    pub semiring: String,
    pub compatibility: CompatibilityReport,
    pub class: Option<ContextualityClass>,
    pub feasibility: Vec<FeasibilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Render for AnalysisReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.input);
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(out, "semiring: {}", self.semiring);
        self.compatibility.text(&mut out);
        match self.class {
            Some(c) => {
                let _ = writeln!(out, "class: {c}");
            }
            None => out.push_str("class: n/a\n"),
        }
        for f in &self.feasibility {
            f.text(&mut out);
        }
        timing_line(&mut out, self.timing_ms);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub value: String,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub value: f64,
    pub tolerance: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub value: String,
    pub packing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectReport {
    /// `none`, `odd-hole` or `odd-antihole`.
    pub verdict: String,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub tool: String,
    pub version: String,
    pub input: String,
    pub n: usize,
    pub edges: usize,
    pub alpha: Option<AlphaReport>,
    pub theta: Option<ThetaReport>,
    pub alpha_star: Option<PackingReport>,
    pub perfect: Option<PerfectReport>,
    /// `α ≤ ϑ + tol ≤ α* + 2 tol`, when all three were computed.
    pub chain_holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Render for GraphReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.input);
        let _ = writeln!(out, "vertices: {}, edges: {}", self.n, self.edges);
        if let Some(a) = &self.alpha {
            let _ = writeln!(out, "alpha: {} witness {:?}", a.value, a.witness);
        }
        if let Some(t) = &self.theta {
            let _ = writeln!(
                out,
                "theta: {} ± {:e} (residual {:e}, {} iterations)",
                t.value, t.tolerance, t.residual, t.iterations
            );
        }
        if let Some(p) = &self.alpha_star {
            let _ = writeln!(out, "alpha*: {} packing [{}]", p.value, p.packing.join(", "));
        }
        if let Some(p) = &self.perfect {
            if p.verdict == "none" {
                out.push_str("perfect: no odd hole or antihole\n");
            } else {
                let _ = writeln!(out, "perfect: {} {:?}", p.verdict, p.witness);
            }
        }
        if let Some(c) = self.chain_holds {
            let _ = writeln!(out, "chain: {}", if c { "holds" } else { "VIOLATED" });
        }
        timing_line(&mut out, self.timing_ms);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub tool: String,
    pub version: String,
    pub state: String,
    pub realization: String,
    pub model: Value,
    pub written_to: Option<String>,
    pub compatibility: Option<CompatibilityReport>,
    pub class: Option<ContextualityClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Render for QuantumReport {
    fn text(&self) -> String {
        let mut out = String::new();
        match &self.written_to {
            Some(path) => {
                let _ = writeln!(out, "model written to {path}");
            }
            None => {
                out.push_str(&serde_json::to_string_pretty(&self.model).expect("model serializes"));
                out.push('\n');
            }
        }
        if let Some(c) = &self.compatibility {
            c.text(&mut out);
        }
        if let Some(c) = self.class {
            let _ = writeln!(out, "class: {c}");
        }
        timing_line(&mut out, self.timing_ms);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrittenFiles {
    pub files: Vec<String>,
}

impl Render for WrittenFiles {
    fn text(&self) -> String {
        self.files.iter().map(|f| format!("wrote {f}\n")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheckEntry {
    pub key: String,
    pub expected: String,
    pub measured: String,
    /// Absent when the value could not be measured.
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub source: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheckReport {
    pub name: String,
    pub checks: Vec<FixtureCheckEntry>,
}

impl Render for FixtureCheckReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}/{}: expected {} measured {} (deviation {}, tolerance {:e}, {})",
                if c.passed { "PASS" } else { "FAIL" },
                self.name,
                c.key,
                c.expected,
                c.measured,
                c.deviation.map_or("n/a".to_string(), |d| format!("{d:e}")),
                c.tolerance,
                c.source
            );
        }
        out
    }
}
