use std::fs;
use std::path::Path;
use std::time::Instant;

use ctx_core::empirical::{check_compatibility, EmpiricalModel, ModelFile, SemiringTag};
use ctx_core::exgraph::{
    fractional_packing, independence_number, lovasz_theta, odd_hole_or_antihole, ExclusivityGraph, GraphFile,
    PerfectionVerdict,
};
use ctx_core::fixtures::{builtin_scenario, catalog, fixture_files, get_fixture, run_fixture_checks};
use ctx_core::hidden_variable::{
    build_incidence_capped, classify_detailed, solve_possibilistic, solve_probabilistic, solve_signed, stack_support,
    stack_weights, FeasibilityVerdict,
};
use ctx_core::quantum::{quantum_model, RealizationFile, StateFile};
use ctx_core::rational::format_rational;
use ctx_core::scenario::DEFAULT_GLOBAL_SECTION_CAP;
use ctx_core::RationalizePolicy;
use serde::de::DeserializeOwned;

use crate::args::{Cli, Command, FixturesAction, GlobalFlags, GraphAction, ScenariosAction};
use crate::error::{CliError, EXIT_CANTCREAT};
use crate::report::*;

const BUILTIN_PREFIX: &str = "builtin:";

pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Scenarios { action: ScenariosAction::List } => Ok(render(g, &scenarios_list())),
        Command::Analyze { source, semiring } => analyze(g, source, *semiring).map(|r| render(g, &r)),
        Command::Graph { action: GraphAction::Invariants { source, alpha, theta, alpha_star, perfect } } => {
            let all = !(*alpha || *theta || *alpha_star || *perfect);
            let select = Selection {
                alpha: all || *alpha,
                theta: all || *theta,
                alpha_star: all || *alpha_star,
                perfect: all || *perfect,
            };
            graph_invariants(g, source, select).map(|r| render(g, &r))
        }
        Command::Graph { action: GraphAction::Export { source, dot } } => {
            let (graph, _) = load_graph(source)?;
            write_file(dot, &graph.to_dot())?;
            Ok(render(g, &WrittenFiles { files: vec![dot.display().to_string()] }))
        }
        Command::Quantum { state, realization, check, out } => {
            quantum(g, state, realization, *check, out.as_deref()).map(|r| render(g, &r))
        }
        Command::Fixtures { action: FixturesAction::Export { name, dir } } => {
            let files = fixture_files(name).map_err(CliError::not_found)?;
            fs::create_dir_all(dir).map_err(|e| CliError::new(EXIT_CANTCREAT, format!("{}: {e}", dir.display())))?;
            let mut written = Vec::new();
            for (file, text) in files {
                let path = dir.join(file);
                write_file(&path, &text)?;
                written.push(path.display().to_string());
            }
            Ok(render(g, &WrittenFiles { files: written }))
        }
        Command::Fixtures { action: FixturesAction::Check { name } } => {
            let report = run_fixture_checks(name).map_err(CliError::not_found)?;
            let report = FixtureCheckReport {
                name: report.name,
                checks: report
                    .checks
                    .into_iter()
                    .map(|c| FixtureCheckEntry {
                        key: c.key,
                        expected: c.expected,
                        measured: c.measured,
                        deviation: c.deviation.is_finite().then_some(c.deviation),
                        tolerance: c.tolerance,
                        source: c.source.to_string(),
                        passed: c.passed,
                    })
                    .collect(),
            };
            Ok(render(g, &report))
        }
    }
}

fn render<R: Render>(g: &GlobalFlags, report: &R) -> String {
    if g.json {
        report.json()
    } else {
        report.text()
    }
}

fn timing(g: &GlobalFlags, start: Instant) -> Option<f64> {
    (!g.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3)
}

fn cap(g: &GlobalFlags) -> u64 {
    g.cap.unwrap_or(DEFAULT_GLOBAL_SECTION_CAP)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::not_found(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::new(EXIT_CANTCREAT, format!("{}: {e}", path.display())))
}

fn builtin_name(source: &str) -> Option<&str> {
    source.strip_prefix(BUILTIN_PREFIX)
}

fn fixture_or_missing(name: &str) -> Result<&'static ctx_core::fixtures::Fixture, CliError> {
    get_fixture(name).map_err(CliError::not_found)
}

pub fn load_model(source: &str) -> Result<EmpiricalModel, CliError> {
    if let Some(name) = builtin_name(source) {
        return fixture_or_missing(name)?
            .model
            .clone()
            .ok_or_else(|| CliError::not_found(format!("fixture `{name}` has no empirical model")));
    }
    let file: ModelFile = read_json(Path::new(source))?;
    Ok(file.into_model(RationalizePolicy::default(), builtin_scenario)?)
}

pub fn load_graph(source: &str) -> Result<(ExclusivityGraph, String), CliError> {
    if let Some(name) = builtin_name(source) {
        let graph = fixture_or_missing(name)?
            .graph
            .clone()
            .ok_or_else(|| CliError::not_found(format!("fixture `{name}` has no exclusivity graph")))?;
        return Ok((graph, source.to_string()));
    }
    let file: GraphFile = read_json(Path::new(source))?;
    Ok((file.into_graph()?, source.to_string()))
}

fn scenarios_list() -> ScenarioListing {
    ScenarioListing(
        catalog()
            .iter()
            .map(|f| ScenarioEntry { name: f.name.to_string(), description: f.description.to_string() })
            .collect(),
    )
}

fn verdict_for(model: &EmpiricalModel, semiring: SemiringTag, cap: u64) -> Result<FeasibilityVerdict, CliError> {
    let system = build_incidence_capped(model.scenario(), cap)?;
    Ok(match semiring {
        SemiringTag::Probability => solve_probabilistic(&system, &stack_weights(model)?)?,
        SemiringTag::Signed => solve_signed(&system, &stack_weights(model)?)?,
        SemiringTag::Possibilistic => solve_possibilistic(&system, &stack_support(model))?,
    })
}

fn analyze(g: &GlobalFlags, source: &str, semiring: Option<SemiringTag>) -> Result<AnalysisReport, CliError> {
    let start = Instant::now();
    let model = load_model(source)?;
    let scenario = model.scenario();
    let cap = cap(g);
    scenario.ensure_global_cap(cap)?;
    let compat = check_compatibility(&model);
    let mut class = None;
    let mut verdicts = Vec::new();
    if model.semiring() == SemiringTag::Probability && compat.is_compatible() {
        let c = classify_detailed(&model, cap)?;
        class = Some(c.class);
        verdicts = vec![c.probabilistic, c.possibilistic];
    }
    match semiring {
        Some(s) => verdicts = vec![verdict_for(&model, s, cap)?],
        None if verdicts.is_empty() => verdicts = vec![verdict_for(&model, model.semiring(), cap)?],
        None => {}
    }
    let labels: Vec<String> =
        scenario.enumerate_global_sections_capped(cap)?.iter().map(|t| scenario.section_label(t)).collect();
    Ok(AnalysisReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        input: source.to_string(),
        scenario: format!(
            "{} measurements, {} outcomes, {} contexts",
            scenario.measurement_count(),
            scenario.outcome_count(),
            scenario.cover().len()
        ),
        semiring: model.semiring().to_string(),
        compatibility: CompatibilityReport::new(&model, &compat),
        class,
        feasibility: verdicts.iter().map(|v| FeasibilityReport::new(v, &labels)).collect(),
        timing_ms: timing(g, start),
    })
}

#[derive(Debug, Clone, Copy)]
struct Selection {
    alpha: bool,
    theta: bool,
    alpha_star: bool,
    perfect: bool,
}

fn graph_invariants(g: &GlobalFlags, source: &str, select: Selection) -> Result<GraphReport, CliError> {
    let start = Instant::now();
    let (graph, input) = load_graph(source)?;
    let alpha = select.alpha.then(|| independence_number(&graph));
    let theta = if select.theta { Some(lovasz_theta(&graph)?) } else { None };
    let alpha_star = select.alpha_star.then(|| fractional_packing(&graph));
    let perfect = select.perfect.then(|| odd_hole_or_antihole(&graph));
    let chain_holds = match (&alpha, &theta, &alpha_star) {
        (Some((a, _)), Some(t), Some((s, _))) => {
            let (a, s) = (ctx_core::rational::to_f64(a), ctx_core::rational::to_f64(s));
            Some(a <= t.value + THETA_TOLERANCE && t.value <= s + THETA_TOLERANCE)
        }
        _ => None,
    };
    Ok(GraphReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        input,
        n: graph.n(),
        edges: graph.edges().len(),
        alpha: alpha.map(|(v, w)| AlphaReport { value: format_rational(&v), witness: w }),
        theta: theta.map(|t| ThetaReport {
            value: t.value,
            tolerance: THETA_TOLERANCE,
            residual: t.residual,
            iterations: t.iterations,
        }),
        alpha_star: alpha_star.map(|(v, p)| PackingReport {
            value: format_rational(&v),
            packing: p.iter().map(format_rational).collect(),
        }),
        perfect: perfect.map(|v| match v {
            PerfectionVerdict::None => PerfectReport { verdict: "none".into(), witness: vec![] },
            PerfectionVerdict::OddHole(c) => PerfectReport { verdict: "odd-hole".into(), witness: c },
            PerfectionVerdict::OddAntihole(c) => PerfectReport { verdict: "odd-antihole".into(), witness: c },
        }),
        chain_holds,
        timing_ms: timing(g, start),
    })
}

fn quantum(
    g: &GlobalFlags,
    state_path: &Path,
    realization_path: &Path,
    check: bool,
    out: Option<&Path>,
) -> Result<QuantumReport, CliError> {
    let start = Instant::now();
    let state = read_json::<StateFile>(state_path)?.into_state()?;
    let realization = read_json::<RealizationFile>(realization_path)?.into_realization(builtin_scenario)?;
    let model = quantum_model(&state, &realization)?;
    let text = model.to_json_string();
    if let Some(path) = out {
        write_file(path, &(text.clone() + "\n"))?;
    }
    let (compatibility, class) = if check {
        let compat = check_compatibility(&model);
        let class = if compat.is_compatible() { Some(classify_detailed(&model, cap(g))?.class) } else { None };
        (Some(CompatibilityReport::new(&model, &compat)), class)
    } else {
        (None, None)
    };
    Ok(QuantumReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        state: state_path.display().to_string(),
        realization: realization_path.display().to_string(),
        model: serde_json::from_str(&text).expect("model JSON is valid"),
        written_to: out.map(|p| p.display().to_string()),
        compatibility,
        class,
        timing_ms: timing(g, start),
    })
}
