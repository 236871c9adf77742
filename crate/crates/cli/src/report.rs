use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mia_audit::attacks::AttackSpec;
use mia_audit::metrics::{cross_validate, FoldModel, MetricRow};
use mia_audit::LabeledCorpus;

use crate::config::AuditConfig;
use crate::error::CliError;

pub const SCHEMA: &str = "mia-audit/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub sha256: String,
    pub members: usize,
    pub nonmembers: usize,
    pub provenance: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRun {
    pub attack: AttackSpec,
    pub row: MetricRow<f64>,
    /// One trained model (or rule set) per fold; empty for date attacks.
    pub models: Vec<FoldModel<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notes {
    pub tokenizer: String,
    pub stratification: String,
    pub greedy_scoring: String,
    /// Per date attack: samples without any year.
    pub no_date: BTreeMap<String, usize>,
    pub abstained: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: String,
    pub tool: ToolInfo,
    /// Unix seconds at creation. Not covered by the determinism guarantee.
    pub timestamp: u64,
    pub config: AuditConfig,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub runs: Vec<AttackRun>,
    pub notes: Notes,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn run_audit(config: &AuditConfig) -> Result<AuditReport, CliError> {
    config.validate()?;
    let sha256 = sha256_file(&config.dataset)?;
    let corpus = LabeledCorpus::load_jsonl(&config.dataset)?;
    let counts = corpus.counts();

    let mut runs = Vec::new();
    let mut no_date = BTreeMap::new();
    let mut abstained = BTreeMap::new();
    for attack in config.attack_specs()? {
        let out = cross_validate::<f64>(
            &attack,
            &corpus,
            &config.split,
            config.seed,
            &config.fpr_levels,
        )?;
        if let Some(n) = out.row.n_no_date {
            no_date.insert(attack.name().to_owned(), n);
        }
        if out.row.n_abstained > 0 {
            abstained.insert(attack.name().to_owned(), out.row.n_abstained);
        }
        runs.push(AttackRun {
            attack,
            row: out.row,
            models: out.models,
        });
    }

    let case = if config.lowercase {
        "lowercased"
    } else {
        "case kept"
    };
    Ok(AuditReport {
        schema: SCHEMA.to_owned(),
        tool: ToolInfo {
            name: "mia-audit".to_owned(),
            version: mia_audit::VERSION.to_owned(),
        },
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: config.clone(),
        seed: config.seed,
        dataset: DatasetInfo {
            name: corpus.name().to_owned(),
            sha256,
            members: counts.members,
            nonmembers: counts.nonmembers,
            provenance: corpus.provenance.clone(),
        },
        runs,
        notes: Notes {
            tokenizer: format!("maximal runs of Unicode alphanumeric characters, {case}"),
            stratification: "class-stratified, seeded SplitMix64 shuffle per class; \
                             held-out scores pooled across folds"
                .to_owned(),
            greedy_scoring: "ROC score 1/(1+i) for first matching rule i, 0 if none; \
                             greedy.heldout_* is the full rule set"
                .to_owned(),
            no_date,
            abstained,
        },
    })
}

pub fn load_report(path: &Path) -> Result<AuditReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        other => {
            return Err(CliError::Data(format!(
                "{}: schema mismatch: expected {SCHEMA:?}, found {:?}",
                path.display(),
                other.unwrap_or("<none>")
            )))
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn pct(v: f64) -> String {
    format!("{:.1}", 100.0 * v)
}

fn fpr_label(fpr: f64) -> String {
    format!("TPR@{}%FPR", 100.0 * fpr)
}

fn bold_if(best: bool, s: String) -> String {
    if best {
        format!("**{s}**")
    } else {
        s
    }
}

/// One row per attack, one column per metric (values in percent), best
/// value per column in bold.
pub fn markdown_table(report: &AuditReport) -> String {
    let levels = &report.config.fpr_levels;
    let mut out = String::from("| Dataset | Attack | AUC |");
    for &f in levels {
        out += &format!(" {} |", fpr_label(f));
    }
    out += "\n|---|---|---:|";
    out += &"---:|".repeat(levels.len());
    out.push('\n');

    let column = |i: usize, run: &AttackRun| -> Option<f64> {
        match i {
            0 => Some(run.row.auc),
            _ => run.row.tpr_at(levels[i - 1]),
        }
    };
    let best: Vec<f64> = (0..=levels.len())
        .map(|i| {
            report
                .runs
                .iter()
                .filter_map(|r| column(i, r))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    for run in &report.runs {
        out += &format!("| {} | {} |", report.dataset.name, run.row.attack);
        for (i, b) in best.iter().enumerate() {
            let cell = match column(i, run) {
                Some(v) => bold_if(report.runs.len() > 1 && v == *b, pct(v)),
                None => "n/a".to_owned(),
            };
            out += &format!(" {cell} |");
        }
        out.push('\n');
    }
    out
}

/// Long-format comparison across reports: one row per (dataset, attack,
/// metric), grouped by dataset; the best value per (dataset, metric) is bold.
pub fn merge_markdown(reports: &[(String, AuditReport)]) -> Result<String, CliError> {
    if reports.is_empty() {
        return Err(CliError::Usage("no reports given".into()));
    }
    // (dataset, metric order, attack, report index) -> (metric label, value)
    let mut rows: BTreeMap<(String, u64, String, usize), (String, f64)> = BTreeMap::new();
    for (idx, (_, r)) in reports.iter().enumerate() {
        for run in &r.runs {
            let ds = run.row.dataset.clone();
            let attack = run.row.attack.clone();
            rows.insert(
                (ds.clone(), 0, attack.clone(), idx),
                ("AUC".into(), run.row.auc),
            );
            for t in &run.row.tpr_at {
                let order = 1 + (t.fpr * 1e9).round() as u64;
                rows.insert(
                    (ds.clone(), order, attack.clone(), idx),
                    (fpr_label(t.fpr), t.tpr),
                );
            }
        }
    }
    let mut best: BTreeMap<(&str, u64), (f64, usize)> = BTreeMap::new();
    for ((ds, m, _, _), (_, v)) in &rows {
        let e = best.entry((ds, *m)).or_insert((f64::NEG_INFINITY, 0));
        e.0 = e.0.max(*v);
        e.1 += 1;
    }
    let mut out = String::from(
        "| Dataset | Attack | Metric | Value (%) | Report |\n|---|---|---|---:|---|\n",
    );
    for ((ds, m, attack, idx), (label, v)) in &rows {
        let (b, n) = best[&(ds.as_str(), *m)];
        out += &format!(
            "| {ds} | {attack} | {label} | {} | {} |\n",
            bold_if(n > 1 && *v == b, pct(*v)),
            reports[*idx].0
        );
    }
    Ok(out)
}
