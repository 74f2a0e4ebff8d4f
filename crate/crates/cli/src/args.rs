use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ctx_core::SemiringTag;

#[derive(Debug, Parser)]
#[command(name = "ctx", version, about = "Contextuality and nonlocality analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalFlags {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Omit timing from reports, making output byte-stable.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Maximum number of global sections to enumerate.
    #[arg(long, global = true, value_name = "N")]
    pub cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Built-in scenarios and fixtures.
    Scenarios {
        #[command(subcommand)]
        action: ScenariosAction,
    },
    /// Compatibility, classification and feasibility of an empirical model.
    Analyze {
        /// Model JSON file or `builtin:<name>`.
        source: String,
        /// Report feasibility over this semiring only (prob, signed, bool).
        #[arg(long, value_parser = parse_semiring)]
        semiring: Option<SemiringTag>,
    },
    /// Exclusivity-graph invariants and export.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Generate an empirical model from a state and a realization.
    Quantum {
        state: PathBuf,
        realization: PathBuf,
        /// Also run compatibility and classification.
        #[arg(long)]
        check: bool,
        /// Write the model JSON here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Export or re-check built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenariosAction {
    List,
}

#[derive(Debug, Subcommand)]
pub enum GraphAction {
    /// α, ϑ, α* and the odd-hole test; all of them unless some are selected.
    Invariants {
        /// Graph JSON file or `builtin:<name>`.
        source: String,
        #[arg(long)]
        alpha: bool,
        #[arg(long)]
        theta: bool,
        #[arg(long)]
        alpha_star: bool,
        #[arg(long)]
        perfect: bool,
    },
    /// Write a Graphviz rendering.
    Export {
        source: String,
        #[arg(long, value_name = "PATH")]
        dot: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesAction {
    /// Write the fixture's JSON files.
    Export {
        name: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        dir: PathBuf,
    },
    /// Recompute the fixture's expected values.
    Check { name: String },
}

fn parse_semiring(s: &str) -> Result<SemiringTag, String> {
    s.parse::<SemiringTag>().map_err(|e| e.to_string())
}
