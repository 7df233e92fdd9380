//! `ftbn` — fault-tree and Bayesian-network dependability analysis.
//!
//! Models are either fault-tree DSL files (compiled internally at the
//! given mission time) or pre-built network JSON documents, which is how
//! noisy-gate and multi-state models are loaded. Exit codes: 0 success,
//! 2 validation failure, 3 I/O or parse failure, 4 impossible evidence,
//! 5 unknown target or flag misuse.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ftbn::ft::ParseErrorKind;
use ftbn::infer::InferError;
use ftbn::{
    compile, cutsets, ft, infer, reliability, BayesianNetwork, Evidence, FaultTree, MissionTime,
    VarId, STATE_FAULTY,
};

#[derive(Parser)]
#[command(
    name = "ftbn",
    version,
    about = "Fault-tree dependability analysis on Bayesian networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report diagnostics.
    Validate {
        /// Fault-tree DSL (.ft) or network JSON (.json).
        path: PathBuf,
    },
    /// Compile a fault tree into network JSON.
    Compile {
        path: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Failure probabilities of events at the mission time.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Events to report (default: the top event).
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
    },
    /// Posterior failure probabilities given evidence.
    Posterior {
        path: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Observations as VAR=STATE pairs.
        #[arg(long, value_delimiter = ',')]
        evidence: Vec<String>,
        /// Events to report (default: all components, ascending posterior).
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
    },
    /// Minimal cut sets with unreliability, posterior unreliability and
    /// diagnosis posterior.
    Cutsets {
        path: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ranked complete diagnoses given evidence.
    Diagnose {
        path: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Observations as VAR=STATE pairs.
        #[arg(long, value_delimiter = ',')]
        evidence: Vec<String>,
        /// Number of diagnoses to report.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Mission time in hours; required for fault-tree inputs.
    #[arg(long)]
    mission_time: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(3, e.to_string())
    }
}

impl From<ft::ParseError> for Failure {
    fn from(e: ft::ParseError) -> Self {
        // Grammar problems are parse failures; semantic problems are
        // validation failures.
        let code = match e.kind {
            ParseErrorKind::Syntax(_) => 3,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<InferError> for Failure {
    fn from(e: InferError) -> Self {
        let code = match e {
            InferError::ImpossibleEvidence => 4,
            InferError::UnknownVariable(_) | InferError::UnknownState { .. } => 5,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<cutsets::CutSetError> for Failure {
    fn from(e: cutsets::CutSetError) -> Self {
        match e {
            cutsets::CutSetError::Infer(e) => e.into(),
            other => Failure::new(2, other.to_string()),
        }
    }
}

impl From<compile::CompileError> for Failure {
    fn from(e: compile::CompileError) -> Self {
        Failure::new(2, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(5);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ftbn: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// A loaded model: either a tree to compile or a ready network.
enum Model {
    Tree(FaultTree),
    Network(BayesianNetwork),
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path)?;
    let looks_like_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or_else(|| text.trim_start().starts_with('{'));
    if looks_like_json {
        let net = BayesianNetwork::from_json_str(&text)
            .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))?;
        Ok(Model::Network(net))
    } else {
        Ok(Model::Tree(ft::parse_fault_tree(&text)?))
    }
}

/// Compiles tree inputs at the mission time; passes networks through.
fn materialize(model: Model, common: &CommonArgs) -> Result<BayesianNetwork, Failure> {
    match model {
        Model::Network(net) => {
            let diags = net.validate();
            if let Some(d) = diags.first() {
                return Err(Failure::new(2, d.to_string()));
            }
            Ok(net)
        }
        Model::Tree(tree) => {
            let t = require_mission_time(common)?;
            let priors = reliability::probability_table(&tree.primaries, t);
            let (net, _) = compile::compile(&tree, &priors)?;
            Ok(net)
        }
    }
}

fn require_mission_time(common: &CommonArgs) -> Result<MissionTime, Failure> {
    let hours = common
        .mission_time
        .ok_or_else(|| Failure::new(5, "--mission-time is required for fault-tree inputs"))?;
    MissionTime::hours(hours)
        .ok_or_else(|| Failure::new(5, "--mission-time must be finite and nonnegative"))
}

fn parse_evidence(pairs: &[String]) -> Result<Evidence, Failure> {
    let mut ev = Evidence::none();
    for pair in pairs {
        let Some((var, state)) = pair.split_once('=') else {
            return Err(Failure::new(
                5,
                format!("evidence `{pair}` is not of the form VAR=STATE"),
            ));
        };
        ev.set(var.trim(), state.trim());
    }
    Ok(ev)
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite f64 serializes")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

/// One report row: a label and the probability of interest.
fn render_rows(format: Format, header: (&str, &str), rows: &[(String, f64)]) -> String {
    let mut out = String::new();
    match format {
        Format::Table => {
            let width = rows
                .iter()
                .map(|(label, _)| label.len())
                .chain([header.0.len()])
                .max()
                .unwrap_or(0);
            let _ = writeln!(out, "{:<width$}  {}", header.0, header.1);
            for (label, value) in rows {
                let _ = writeln!(out, "{label:<width$}  {value:.5}");
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "{},{}", header.0, header.1);
            for (label, value) in rows {
                let _ = writeln!(out, "{label},{}", json_number(*value));
            }
        }
        Format::Json => {
            out.push_str("{\n");
            for (i, (label, value)) in rows.iter().enumerate() {
                let comma = if i + 1 < rows.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "  {}: {}{comma}",
                    json_string(label),
                    json_number(*value)
                );
            }
            out.push_str("}\n");
        }
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Compile { path, common } => cmd_compile(&path, &common),
        Command::Analyze {
            path,
            common,
            target,
        } => cmd_analyze(&path, &common, &target),
        Command::Posterior {
            path,
            common,
            evidence,
            target,
        } => cmd_posterior(&path, &common, &evidence, &target),
        Command::Cutsets { path, common } => cmd_cutsets(&path, &common),
        Command::Diagnose {
            path,
            common,
            evidence,
            top,
        } => cmd_diagnose(&path, &common, &evidence, top),
    }
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)?;
    let looks_like_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or_else(|| text.trim_start().starts_with('{'));
    let diagnostics: Vec<String> = if looks_like_json {
        let net = BayesianNetwork::from_json_str(&text)
            .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))?;
        net.validate().iter().map(|d| d.to_string()).collect()
    } else {
        let tree = ft::parse_fault_tree_unchecked(&text)?;
        tree.validate().iter().map(|d| d.to_string()).collect()
    };
    if diagnostics.is_empty() {
        Ok(())
    } else {
        for d in &diagnostics {
            eprintln!("{}: {d}", path.display());
        }
        Err(Failure::new(
            2,
            format!("{} diagnostic(s)", diagnostics.len()),
        ))
    }
}

fn cmd_compile(path: &Path, common: &CommonArgs) -> Result<(), Failure> {
    let model = load_model(path)?;
    let net = match model {
        Model::Network(net) => net,
        Model::Tree(tree) => {
            let t = require_mission_time(common)?;
            let priors = reliability::probability_table(&tree.primaries, t);
            compile::compile(&tree, &priors)?.0
        }
    };
    emit(common, &net.to_json_string())
}

fn cmd_analyze(path: &Path, common: &CommonArgs, targets: &[String]) -> Result<(), Failure> {
    let model = load_model(path)?;
    let default_target = match &model {
        Model::Tree(tree) => Some(tree.top.as_str().to_owned()),
        Model::Network(_) => None,
    };
    let net = materialize(model, common)?;
    let targets: Vec<String> = if targets.is_empty() {
        vec![default_target
            .ok_or_else(|| Failure::new(5, "--target is required for network inputs"))?]
    } else {
        targets.to_vec()
    };

    let mut rows = Vec::with_capacity(targets.len());
    for target in &targets {
        let dist = infer::marginal(&net, &VarId::from(target.as_str()), &Evidence::none())?;
        let p = dist.p(STATE_FAULTY).unwrap_or_else(|| 1.0 - dist.probs[0]);
        rows.push((target.clone(), p));
    }
    emit(
        common,
        &render_rows(common.format, ("event", "p_faulty"), &rows),
    )
}

fn cmd_posterior(
    path: &Path,
    common: &CommonArgs,
    evidence: &[String],
    targets: &[String],
) -> Result<(), Failure> {
    let model = load_model(path)?;
    let default_targets: Vec<String> = match &model {
        Model::Tree(tree) => tree.primaries.iter().map(|p| p.id.to_string()).collect(),
        Model::Network(net) => net.roots().map(|n| n.id().to_string()).collect(),
    };
    let net = materialize(model, common)?;
    let ev = parse_evidence(evidence)?;
    let targets = if targets.is_empty() {
        default_targets
    } else {
        targets.to_vec()
    };

    let mut rows = Vec::with_capacity(targets.len());
    for target in &targets {
        let dist = infer::marginal(&net, &VarId::from(target.as_str()), &ev)?;
        let p = dist.p(STATE_FAULTY).unwrap_or_else(|| 1.0 - dist.probs[0]);
        rows.push((target.clone(), p));
    }
    // ascending posterior, ties by name
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    emit(
        common,
        &render_rows(common.format, ("event", "p_posterior"), &rows),
    )
}

fn cmd_cutsets(path: &Path, common: &CommonArgs) -> Result<(), Failure> {
    let model = load_model(path)?;
    let Model::Tree(tree) = model else {
        return Err(Failure::new(
            2,
            "cut-set analysis needs a fault tree; for noisy or multi-state networks use `diagnose`",
        ));
    };
    let t = require_mission_time(common)?;
    let priors = reliability::probability_table(&tree.primaries, t);
    let (net, _) = compile::compile(&tree, &priors)?;
    let scored = cutsets::score_cut_sets(&tree, &net, &priors)?;

    let mut out = String::new();
    match common.format {
        Format::Table => {
            let width = scored
                .iter()
                .map(|s| s.cutset.to_string().len())
                .chain(["cut_set".len()])
                .max()
                .unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<width$}  order  unreliability  post_unreliability  diagnosis_posterior",
                "cut_set"
            );
            for s in &scored {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>5}  {:>13.5}  {:>18.5}  {:>19.5}",
                    s.cutset.to_string(),
                    s.cutset.order(),
                    s.unreliability,
                    s.posterior_unreliability,
                    s.diagnosis_posterior
                );
            }
        }
        Format::Csv => {
            let _ = writeln!(
                out,
                "members,order,unreliability,posterior_unreliability,diagnosis_posterior"
            );
            for s in &scored {
                let members = s
                    .cutset
                    .members()
                    .iter()
                    .map(|m| m.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(
                    out,
                    "{members},{},{},{},{}",
                    s.cutset.order(),
                    json_number(s.unreliability),
                    json_number(s.posterior_unreliability),
                    json_number(s.diagnosis_posterior)
                );
            }
        }
        Format::Json => {
            out.push_str("[\n");
            for (i, s) in scored.iter().enumerate() {
                let members = s
                    .cutset
                    .members()
                    .iter()
                    .map(|m| json_string(m.as_str()))
                    .collect::<Vec<_>>()
                    .join(", ");
                let comma = if i + 1 < scored.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "  {{\"members\": [{members}], \"order\": {}, \"unreliability\": {}, \"posterior_unreliability\": {}, \"diagnosis_posterior\": {}}}{comma}",
                    s.cutset.order(),
                    json_number(s.unreliability),
                    json_number(s.posterior_unreliability),
                    json_number(s.diagnosis_posterior)
                );
            }
            out.push_str("]\n");
        }
    }
    emit(common, &out)
}

fn cmd_diagnose(
    path: &Path,
    common: &CommonArgs,
    evidence: &[String],
    top: usize,
) -> Result<(), Failure> {
    if top < 1 {
        return Err(Failure::new(5, "--top must be at least 1"));
    }
    let model = load_model(path)?;
    let net = materialize(model, common)?;
    let ev = parse_evidence(evidence)?;
    let diagnoses = infer::top_k_diagnoses(&net, &ev, top)?;

    let label = |d: &infer::RankedDiagnosis| -> String {
        let failed = d.non_working(&net);
        if failed.is_empty() {
            "(all working)".to_owned()
        } else {
            failed
                .iter()
                .map(|(v, s)| format!("{v}={s}"))
                .collect::<Vec<_>>()
                .join(" ")
        }
    };

    let mut out = String::new();
    match common.format {
        Format::Table => {
            let labels: Vec<String> = diagnoses.iter().map(&label).collect();
            let width = labels
                .iter()
                .map(String::len)
                .chain(["diagnosis".len()])
                .max()
                .unwrap_or(0);
            let _ = writeln!(out, "rank  {:<width$}  posterior", "diagnosis");
            for (i, (d, l)) in diagnoses.iter().zip(&labels).enumerate() {
                let _ = writeln!(out, "{:>4}  {l:<width$}  {:.5}", i + 1, d.posterior);
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "rank,diagnosis,posterior");
            for (i, d) in diagnoses.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", i + 1, label(d), json_number(d.posterior));
            }
        }
        Format::Json => {
            out.push_str("[\n");
            for (i, d) in diagnoses.iter().enumerate() {
                let assignment = d
                    .assignment
                    .iter()
                    .map(|(v, s)| format!("{}: {}", json_string(v.as_str()), json_string(s)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let comma = if i + 1 < diagnoses.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "  {{\"rank\": {}, \"assignment\": {{{assignment}}}, \"posterior\": {}}}{comma}",
                    i + 1,
                    json_number(d.posterior)
                );
            }
            out.push_str("]\n");
        }
    }
    emit(common, &out)
}
