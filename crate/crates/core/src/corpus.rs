//! Labeled member/non-member corpora: JSONL ingestion and deterministic splits.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Member,
    NonMember,
}

impl Label {
    pub fn is_member(self) -> bool {
        self == Label::Member
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Member => Label::NonMember,
            Label::NonMember => Label::Member,
        }
    }

    /// Parses the JSONL label string. Case-sensitive.
    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "member" => Some(Label::Member),
            "nonmember" => Some(Label::NonMember),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Member => "member",
            Label::NonMember => "nonmember",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    /// Raw text exactly as ingested; never normalized.
    pub text: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Sample {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub members: usize,
    pub nonmembers: usize,
}

impl ClassCounts {
    pub fn of<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        labels.into_iter().fold(Self::default(), |mut c, l| {
            match l {
                Label::Member => c.members += 1,
                Label::NonMember => c.nonmembers += 1,
            }
            c
        })
    }

    pub fn total(&self) -> usize {
        self.members + self.nonmembers
    }

    pub fn require_both(&self) -> Result<()> {
        if self.members == 0 || self.nonmembers == 0 {
            return Err(Error::SingleClass {
                members: self.members,
                nonmembers: self.nonmembers,
            });
        }
        Ok(())
    }
}

/// An ordered collection of samples with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    name: String,
    samples: Vec<Sample>,
    counts: ClassCounts,
    /// Free-form provenance (generator settings, source file).
    pub provenance: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct JsonlRecord {
    text: String,
    label: String,
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct JsonlRecordOut<'a> {
    id: &'a str,
    text: &'a str,
    label: Label,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    meta: &'a BTreeMap<String, String>,
}

impl LabeledCorpus {
    /// Builds a corpus, rejecting duplicate ids. An empty sample list is allowed
    /// here; audit operations check for both classes themselves.
    pub fn new(name: impl Into<String>, samples: Vec<Sample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(samples.len());
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateId(s.id.clone()));
            }
        }
        let counts = ClassCounts::of(samples.iter().map(|s| &s.label));
        Ok(Self {
            name: name.into(),
            samples,
            counts,
            provenance: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn counts(&self) -> ClassCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Sample> {
        self.samples.iter().find(|s| s.id == id)
    }

    /// Samples whose ids are in `ids`, in corpus order.
    pub fn select(&self, ids: &BTreeSet<String>) -> Vec<&Sample> {
        self.samples
            .iter()
            .filter(|s| ids.contains(&s.id))
            .collect()
    }

    pub fn ids(&self) -> BTreeSet<String> {
        self.samples.iter().map(|s| s.id.clone()).collect()
    }

    /// Reads the JSONL ingestion format: one object per line with `text`,
    /// `label` (`"member"` | `"nonmember"`), optional `id` and flat `meta`.
    /// Blank lines are skipped; missing ids become `line-<n>` (1-based).
    pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".to_owned());
        let mut corpus = Self::read_jsonl(name, BufReader::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::Io {
                path: path.to_owned(),
                source,
            },
            other => other,
        })?;
        corpus
            .provenance
            .insert("source".to_owned(), path.display().to_string());
        Ok(corpus)
    }

    pub fn read_jsonl(name: impl Into<String>, reader: impl BufRead) -> Result<Self> {
        let mut samples = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|source| Error::Io {
                path: Default::default(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: JsonlRecord =
                serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                    line: line_no,
                    message: e.to_string(),
                })?;
            let label = Label::parse(&rec.label).ok_or_else(|| Error::UnknownLabel {
                line: line_no,
                label: rec.label.clone(),
            })?;
            samples.push(Sample {
                id: rec.id.unwrap_or_else(|| format!("line-{line_no}")),
                text: rec.text,
                label,
                meta: rec.meta,
            });
        }
        if samples.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Self::new(name, samples)
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for s in &self.samples {
            let rec = JsonlRecordOut {
                id: &s.id,
                text: &s.text,
                label: s.label,
                meta: &s.meta,
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_owned(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_jsonl(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    /// Ids of each class, in corpus order.
    fn ids_by_class(&self) -> (Vec<&str>, Vec<&str>) {
        let mut members = Vec::with_capacity(self.counts.members);
        let mut nonmembers = Vec::with_capacity(self.counts.nonmembers);
        for s in &self.samples {
            match s.label {
                Label::Member => members.push(s.id.as_str()),
                Label::NonMember => nonmembers.push(s.id.as_str()),
            }
        }
        (members, nonmembers)
    }
}

/// One train/test partition; `train_ids` and `test_ids` are disjoint and
/// together cover the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train_ids: BTreeSet<String>,
    pub test_ids: BTreeSet<String>,
}

/// Stratified k-fold split.
///
/// Members are shuffled, then nonmembers, with one [`SplitMix64`] stream seeded
/// by `seed`; each shuffled class is dealt round-robin starting at fold 0.
pub fn kfold_split(corpus: &LabeledCorpus, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    let counts = corpus.counts();
    let max_k = counts.members.min(counts.nonmembers);
    if k < 2 || k > max_k {
        return Err(Error::InvalidSplit(format!(
            "k={k} must be in [2, {max_k}] (min class size)"
        )));
    }
    let (mut members, mut nonmembers) = corpus.ids_by_class();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut members);
    rng.shuffle(&mut nonmembers);

    let mut tests: Vec<BTreeSet<String>> = vec![BTreeSet::new(); k];
    for class in [&members, &nonmembers] {
        for (i, id) in class.iter().enumerate() {
            tests[i % k].insert((*id).to_owned());
        }
    }
    let all = corpus.ids();
    Ok(tests
        .into_iter()
        .enumerate()
        .map(|(fold_index, test_ids)| FoldSplit {
            fold_index,
            train_ids: all.difference(&test_ids).cloned().collect(),
            test_ids,
        })
        .collect())
}

fn check_fraction(train_fraction: f64) -> Result<()> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "train fraction {train_fraction} must be in (0, 1)"
        )));
    }
    Ok(())
}

/// Stratified train/test split: `round(train_fraction * n_class)` of each
/// class goes to train.
pub fn holdout_split(corpus: &LabeledCorpus, train_fraction: f64, seed: u64) -> Result<FoldSplit> {
    check_fraction(train_fraction)?;
    let (mut members, mut nonmembers) = corpus.ids_by_class();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut members);
    rng.shuffle(&mut nonmembers);

    let mut split = FoldSplit {
        fold_index: 0,
        train_ids: BTreeSet::new(),
        test_ids: BTreeSet::new(),
    };
    for (label, class) in [(Label::Member, &members), (Label::NonMember, &nonmembers)] {
        let n_train = (train_fraction * class.len() as f64).round() as usize;
        if n_train == 0 || n_train >= class.len() {
            return Err(Error::InvalidSplit(format!(
                "fraction {train_fraction} leaves an empty {label} side ({n_train} of {} in train)",
                class.len()
            )));
        }
        split
            .train_ids
            .extend(class[..n_train].iter().map(|s| (*s).to_owned()));
        split
            .test_ids
            .extend(class[n_train..].iter().map(|s| (*s).to_owned()));
    }
    Ok(split)
}

/// Split where no value of meta field `group_key` appears on both sides.
/// `round(train_fraction * n_groups)` groups (sorted, then shuffled) go to train.
pub fn group_disjoint_split(
    corpus: &LabeledCorpus,
    group_key: &str,
    train_fraction: f64,
    seed: u64,
) -> Result<FoldSplit> {
    check_fraction(train_fraction)?;
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in corpus.samples() {
        let g = s
            .meta
            .get(group_key)
            .ok_or_else(|| Error::MissingGroupKey {
                id: s.id.clone(),
                key: group_key.to_owned(),
            })?;
        groups.entry(g.as_str()).or_default().push(s.id.as_str());
    }
    let mut keys: Vec<&str> = groups.keys().copied().collect();
    let n_train = (train_fraction * keys.len() as f64).round() as usize;
    if n_train == 0 || n_train >= keys.len() {
        return Err(Error::InvalidSplit(format!(
            "{} group(s) under {group_key:?} cannot be split with fraction {train_fraction}",
            keys.len()
        )));
    }
    SplitMix64::new(seed).shuffle(&mut keys);

    let collect = |ks: &[&str]| -> BTreeSet<String> {
        ks.iter()
            .flat_map(|k| groups[k].iter().map(|id| (*id).to_owned()))
            .collect()
    };
    Ok(FoldSplit {
        fold_index: 0,
        train_ids: collect(&keys[..n_train]),
        test_ids: collect(&keys[n_train..]),
    })
}
