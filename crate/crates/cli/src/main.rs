//! `mia-audit`: blind membership-inference dataset audits.

mod config;
mod error;
mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mia_audit::attacks::{GreedyStrategy, NoDatePolicy};
use mia_audit::metrics::{project_2d, ProjectedPoint, ProjectionConfig, SplitSpec};
use mia_audit::synth::{generate, ShiftSpec};
use mia_audit::textkit::TokenizerConfig;
use mia_audit::LabeledCorpus;

use config::{AttackName, AuditConfig, Overrides, Recipe};
use error::CliError;
use report::{load_report, markdown_table, merge_markdown, run_audit, AuditReport};

#[derive(Parser)]
#[command(
    name = "mia-audit",
    version,
    about = "Blind member/non-member distribution-shift audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run blind attacks on a labeled JSONL corpus and report AUC / TPR@FPR.
    Audit(Box<AuditArgs>),
    /// Generate a synthetic corpus from a shift spec (JSON).
    Synth(SynthArgs),
    /// Merge audit reports into one Markdown comparison table.
    Report(ReportArgs),
    /// 2-D PCA coordinates of bag-of-words counts, as CSV.
    Project(ProjectArgs),
}

#[derive(Args)]
struct AuditArgs {
    /// JSONL corpus with `text` and `label` fields.
    #[arg(long, required_unless_present = "replay")]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    recipe: Option<Recipe>,
    /// Attacks to run; repeat or comma-separate.
    #[arg(long = "attack", value_enum, value_delimiter = ',')]
    attacks: Vec<AttackName>,
    /// Stratified k-fold cross-validation (default 10).
    #[arg(long, conflicts_with_all = ["holdout", "group_key"])]
    kfold: Option<usize>,
    /// Single stratified split with this train fraction.
    #[arg(long, conflicts_with = "group_key")]
    holdout: Option<f64>,
    /// Group-disjoint split on this meta field.
    #[arg(long)]
    group_key: Option<String>,
    /// Train fraction for --group-key.
    #[arg(long, default_value_t = 0.8, requires = "group_key")]
    train_fraction: f64,
    #[arg(long, env = "MIA_AUDIT_SEED")]
    seed: Option<u64>,
    /// FPR levels for TPR@FPR; comma-separated (default 0.01,0.05).
    #[arg(long = "fpr", value_delimiter = ',')]
    fpr_levels: Vec<f64>,
    #[arg(long)]
    cutoff_year: Option<u32>,
    #[arg(long, value_parser = parse_no_date)]
    no_date_policy: Option<NoDatePolicy>,
    /// Word n-gram lengths for greedy-word, as LO,HI.
    #[arg(long, value_parser = parse_range)]
    word_range: Option<[usize; 2]>,
    /// Character n-gram lengths for greedy-char, as LO,HI.
    #[arg(long, value_parser = parse_range)]
    char_range: Option<[usize; 2]>,
    #[arg(long)]
    fpr_budget: Option<f64>,
    #[arg(long, value_parser = parse_strategy)]
    greedy_strategy: Option<GreedyStrategy>,
    /// Keep only the first N characters of every sample.
    #[arg(long)]
    head_chars: Option<usize>,
    #[arg(long)]
    min_df: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Do not lowercase tokens.
    #[arg(long)]
    keep_case: bool,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the Markdown table here (it is always printed to stdout).
    #[arg(long)]
    markdown: Option<PathBuf>,
    /// Re-run the audit recorded in a report and check the metrics match.
    #[arg(long, conflicts_with_all = ["recipe", "attacks"])]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// ShiftSpec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Output JSONL; the spec is copied next to it as `<stem>.spec.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true, num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_df: usize,
    #[arg(long, env = "MIA_AUDIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    keep_case: bool,
    /// CSV output (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<[usize; 2], String> {
    let (lo, hi) = s
        .split_once(',')
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(lo)?, num(hi)?])
}

fn parse_no_date(s: &str) -> Result<NoDatePolicy, String> {
    match s {
        "predict-member" => Ok(NoDatePolicy::PredictMember),
        "abstain" => Ok(NoDatePolicy::Abstain),
        _ => Err("expected predict-member or abstain".into()),
    }
}

fn parse_strategy(s: &str) -> Result<GreedyStrategy, String> {
    match s {
        "residual" => Ok(GreedyStrategy::Residual),
        "static" => Ok(GreedyStrategy::Static),
        _ => Err("expected residual or static".into()),
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::io(p, e)),
        None => io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

fn report_json(report: &AuditReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let (config, recorded) = match &args.replay {
        Some(path) => {
            let recorded = load_report(path)?;
            let mut config = recorded.config.clone();
            if let Some(d) = &args.dataset {
                config.dataset = d.clone();
            }
            (config, Some(recorded))
        }
        None => {
            let split = if let Some(k) = args.kfold {
                Some(SplitSpec::KFold { k })
            } else if let Some(train_fraction) = args.holdout {
                Some(SplitSpec::Holdout { train_fraction })
            } else {
                args.group_key
                    .clone()
                    .map(|group_key| SplitSpec::GroupDisjoint {
                        group_key,
                        train_fraction: args.train_fraction,
                    })
            };
            let overrides = Overrides {
                attacks: args.attacks,
                split,
                seed: args.seed,
                fpr_levels: args.fpr_levels,
                cutoff_year: args.cutoff_year,
                no_date_policy: args.no_date_policy,
                word_range: args.word_range,
                char_range: args.char_range,
                fpr_budget: args.fpr_budget,
                greedy_strategy: args.greedy_strategy,
                head_chars: args.head_chars,
                min_df: args.min_df,
                alpha: args.alpha,
                keep_case: args.keep_case,
            };
            let dataset = args.dataset.clone().expect("clap enforces --dataset");
            (AuditConfig::build(dataset, args.recipe, overrides)?, None)
        }
    };

    let report = run_audit(&config)?;
    let table = markdown_table(&report);
    print!("{table}");
    if let Some(p) = &args.markdown {
        write_output(Some(p), &table)?;
    }
    if let Some(p) = &args.json {
        write_output(Some(p), &report_json(&report))?;
    }

    if let Some(recorded) = recorded {
        if recorded.dataset.sha256 != report.dataset.sha256 {
            return Err(CliError::Data(format!(
                "replay: dataset sha256 {} differs from recorded {}",
                report.dataset.sha256, recorded.dataset.sha256
            )));
        }
        if recorded.runs != report.runs {
            return Err(CliError::Data(
                "replay: metrics or models differ from the recorded report".into(),
            ));
        }
        eprintln!("replay: {} run(s) reproduced exactly", report.runs.len());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| CliError::io(&args.spec, e))?;
    let spec: ShiftSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.spec.display())))?;
    let corpus = generate(&spec)?;
    corpus.save_jsonl(&args.out)?;
    let sidecar = args.out.with_extension("spec.json");
    let mut spec_json = serde_json::to_string_pretty(&spec).expect("spec serializes");
    spec_json.push('\n');
    write_output(Some(&sidecar), &spec_json)?;
    let c = corpus.counts();
    eprintln!(
        "wrote {} members + {} nonmembers to {} (spec: {})",
        c.members,
        c.nonmembers,
        args.out.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let reports = args
        .reports
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .unwrap_or(p.as_os_str())
                .to_string_lossy()
                .into_owned();
            load_report(p).map(|r| (name, r))
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_output(args.out.as_deref(), &merge_markdown(&reports)?)
}

fn cmd_project(args: ProjectArgs) -> Result<(), CliError> {
    let corpus = LabeledCorpus::load_jsonl(&args.dataset)?;
    let cfg = ProjectionConfig {
        tokenizer: TokenizerConfig {
            lowercase: !args.keep_case,
        },
        min_df: args.min_df,
        seed: args.seed,
        ..ProjectionConfig::default()
    };
    let points: Vec<ProjectedPoint<f64>> = project_2d(&corpus, &cfg)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for p in &points {
        w.serialize(p).map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Audit(a) => cmd_audit(*a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report(a) => cmd_report(a),
        Command::Project(a) => cmd_project(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
