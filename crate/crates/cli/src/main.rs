use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use xpeerd_core::argumentation::{grounded_extension, parse_af, preferred_extensions};
use xpeerd_core::dbsim::{run_double_blind, ReviewerProfile};
use xpeerd_core::eval::{compute_metrics, parse_corpus};
use xpeerd_core::guards::CODE_HALT;
use xpeerd_core::prr::{run_prr, PrrInput, PrrOutput};
use xpeerd_core::{EngineConfig, ManuscriptError, ReportFile, ReviewSession, ReviewTask, SessionOutcome, Submission};

mod settings;

const EXIT_REFUSED: u8 = 2;
const EXIT_HALTED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Engine(String),
    #[error("{0}")]
    Io(String),
    #[error("configuration: {0}")]
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Input(_) => 65,
            CliError::Engine(_) => 70,
            CliError::Io(_) => 74,
            CliError::Config(_) => 78,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "xpeerd", version, about = "Deterministic manuscript review engine")]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (directory for `eval`); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `thresholds.lambda=1.2`
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Hc,
    Da,
    Conf,
}

impl From<TaskArg> for ReviewTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Hc => ReviewTask::HcReview,
            TaskArg::Da => ReviewTask::DaReview,
            TaskArg::Conf => ReviewTask::ConfReview,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Review one manuscript and write a report
    Review {
        #[arg(long, value_enum)]
        task: TaskArg,
        manuscript: PathBuf,
    },
    /// Run the three-round post-rejection game
    Prr {
        manuscript: PathBuf,
        reasons: PathBuf,
        /// Also write the table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Two independent reviewers plus the editor decision
    Dbsim {
        manuscript: PathBuf,
        profile1: PathBuf,
        profile2: PathBuf,
    },
    /// Metrics over a directory of report files
    Eval { dir: PathBuf },
    /// List extensions of an argumentation framework file
    Extensions {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "grounded")]
        semantics: SemanticsArg,
    },
    /// Configuration commands
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SemanticsArg {
    Grounded,
    Preferred,
}

#[derive(Subcommand, Debug)]
enum ConfigAction {
    /// Print the effective configuration
    Show,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Loads a submission; a file without claims counts as no manuscript.
fn load_submission(path: &Path) -> Result<Option<Arc<Submission>>, CliError> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::Input(format!("F(no_manuscript): cannot read manuscript {}: {e}", path.display()))
    })?;
    match Submission::from_json(&bytes) {
        Ok(s) => Ok(Some(Arc::new(s))),
        Err(ManuscriptError::EmptyManuscript) => Ok(None),
        Err(e) => Err(CliError::Input(format!("{}: {e}", path.display()))),
    }
}

fn require_submission(path: &Path) -> Result<Arc<Submission>, CliError> {
    load_submission(path)?.ok_or_else(|| CliError::Input(format!("{}: manuscript has no claims", path.display())))
}

fn report_exit(report: &ReportFile) -> u8 {
    match &report.refusal {
        None => 0,
        Some(r) if r.code == CODE_HALT => EXIT_HALTED,
        Some(_) => EXIT_REFUSED,
    }
}

fn cmd_review(cfg: EngineConfig, task: ReviewTask, manuscript: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let submission = load_submission(manuscript)?;
    let mut session = ReviewSession::new(task, cfg);
    if let Some(s) = submission {
        session.upload(s).map_err(|e| CliError::Engine(e.to_string()))?;
    }
    let outcome = session.run_to_completion().map_err(|e| CliError::Engine(e.to_string()))?;
    let report = match &outcome {
        SessionOutcome::GroundingFailed { .. } => unreachable!("grounding attempts are exhausted"),
        o => o.report(task).expect("settled outcome carries a report"),
    };
    if let Some(r) = &report.refusal {
        eprintln!("{}: {}", r.code, r.instructions);
    }
    emit(out, &report.to_json())?;
    Ok(report_exit(&report))
}

fn cmd_prr(cfg: EngineConfig, manuscript: &Path, reasons: &Path, csv: Option<&Path>, out: Option<&Path>) -> Result<u8, CliError> {
    let submission = require_submission(manuscript)?;
    let input = PrrInput::from_json(&read(reasons)?).map_err(|e| CliError::Input(format!("{}: {e}", reasons.display())))?;
    let run = run_prr(&submission.manuscript, &input, cfg.prr.decay, cfg.belief.agm_floor)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let output = PrrOutput::new(&run).map_err(|e| CliError::Engine(e.to_string()))?;
    if let Some(path) = csv {
        fs::write(path, output.to_csv()).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(out, &output.to_json())?;
    Ok(0)
}

fn cmd_dbsim(cfg: EngineConfig, manuscript: &Path, p1: &Path, p2: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let submission = require_submission(manuscript)?;
    let load = |p: &Path| {
        ReviewerProfile::from_json(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
    };
    let (p1, p2) = (load(p1)?, load(p2)?);
    let output = run_double_blind(&submission, &p1, &p2, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    emit(out, &output.to_json())?;
    Ok(report_exit(&output.reviewer1).max(report_exit(&output.reviewer2)))
}

fn cmd_eval(cfg: EngineConfig, dir: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let corpus = parse_corpus(dir).map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
    for d in &corpus.diagnostics {
        eprintln!("skipped {}: {}", d.file, d.message);
    }
    let e = &cfg.evaluation;
    let metrics = compute_metrics(
        &corpus.records,
        corpus.diagnostics.len(),
        e.compliance_threshold,
        e.uncertainty_tau,
    )
    .map_err(|e| CliError::Engine(e.to_string()))?;
    let out_dir = out.unwrap_or(Path::new("xpeerd-eval"));
    metrics
        .write_outputs(out_dir)
        .map_err(|e| CliError::Io(format!("cannot write to {}: {e}", out_dir.display())))?;
    print!("{}", metrics.summary());
    Ok(0)
}

fn cmd_extensions(cfg: EngineConfig, file: &Path, semantics: SemanticsArg, out: Option<&Path>) -> Result<u8, CliError> {
    let text = String::from_utf8(read(file)?).map_err(|e| CliError::Input(e.to_string()))?;
    let g = parse_af(&text).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let extensions = match semantics {
        SemanticsArg::Grounded => vec![grounded_extension(&g)],
        SemanticsArg::Preferred => preferred_extensions(&g, cfg.argumentation.enumeration_limit)
            .map_err(|e| CliError::Input(e.to_string()))?,
    };
    let mut s = String::new();
    for ext in &extensions {
        let members: Vec<&str> = ext.members.iter().map(String::as_str).collect();
        s.push_str(&format!("{{{}}}\n", members.join(", ")));
    }
    emit(out, s.as_bytes())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = settings::load(cli.config.as_deref(), &cli.overrides)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Review { task, manuscript } => cmd_review(cfg, task.into(), &manuscript, out),
        Command::Prr { manuscript, reasons, csv } => cmd_prr(cfg, &manuscript, &reasons, csv.as_deref(), out),
        Command::Dbsim { manuscript, profile1, profile2 } => cmd_dbsim(cfg, &manuscript, &profile1, &profile2, out),
        Command::Eval { dir } => cmd_eval(cfg, &dir, out),
        Command::Extensions { file, semantics } => cmd_extensions(cfg, &file, semantics, out),
        Command::Config { action: ConfigAction::Show } => {
            emit(out, settings::show(&cfg).as_bytes())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("xpeerd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
