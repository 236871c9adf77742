//! Synthetic member/nonmember corpora with planted, parameterized shifts.
//!
//! Base text is i.i.d. tokens from one Zipf distribution shared by both
//! classes, so without shifts the two classes are exchangeable. Optional
//! shifts: a year token inserted with probability `p_date` (temporal shift)
//! and a marker string inserted with class-specific probabilities.
//!
//! Draw order from a single [`SplitMix64`] seeded with `seed`: members then
//! nonmembers; per sample the tokens, then (if enabled) the date coin, year
//! and position, then the marker coin and position.

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, LabeledCorpus, Sample};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::textkit::{MAX_YEAR, MIN_YEAR};

pub const DEFAULT_VOCAB_SIZE: usize = 5000;
pub const DEFAULT_ZIPF_EXPONENT: f64 = 1.1;
pub const DEFAULT_TEXT_LENGTH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalShift {
    pub member_years: YearRange,
    pub nonmember_years: YearRange,
    pub p_date: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerShift {
    /// Inserted verbatim as one whitespace-separated token; may be a word or
    /// a character sequence such as `"\u{a0}"`.
    pub text: String,
    pub p_member: f64,
    pub p_nonmember: f64,
}

fn default_vocab() -> usize {
    DEFAULT_VOCAB_SIZE
}
fn default_exponent() -> f64 {
    DEFAULT_ZIPF_EXPONENT
}
fn default_length() -> usize {
    DEFAULT_TEXT_LENGTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSpec {
    #[serde(default = "default_vocab")]
    pub base_vocab_size: usize,
    #[serde(default = "default_exponent")]
    pub zipf_exponent: f64,
    /// Base tokens per sample, before inserted shift tokens.
    #[serde(default = "default_length")]
    pub text_length: usize,
    pub n_member: usize,
    pub n_nonmember: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal: Option<TemporalShift>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<MarkerShift>,
    #[serde(default)]
    pub seed: u64,
}

impl ShiftSpec {
    /// No shifts, default base distribution.
    pub fn null(n_member: usize, n_nonmember: usize, seed: u64) -> Self {
        Self {
            base_vocab_size: DEFAULT_VOCAB_SIZE,
            zipf_exponent: DEFAULT_ZIPF_EXPONENT,
            text_length: DEFAULT_TEXT_LENGTH,
            n_member,
            n_nonmember,
            temporal: None,
            marker: None,
            seed,
        }
    }

    pub fn with_marker(mut self, text: &str, p_member: f64, p_nonmember: f64) -> Self {
        self.marker = Some(MarkerShift {
            text: text.to_owned(),
            p_member,
            p_nonmember,
        });
        self
    }

    pub fn with_temporal(mut self, member: (u32, u32), nonmember: (u32, u32), p_date: f64) -> Self {
        self.temporal = Some(TemporalShift {
            member_years: YearRange {
                from: member.0,
                to: member.1,
            },
            nonmember_years: YearRange {
                from: nonmember.0,
                to: nonmember.1,
            },
            p_date,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.base_vocab_size == 0 || self.text_length == 0 {
            return bad("vocabulary size and text length must be positive".into());
        }
        if !(self.zipf_exponent.is_finite() && self.zipf_exponent >= 0.0) {
            return bad(format!("zipf exponent {} must be >= 0", self.zipf_exponent));
        }
        if self.n_member == 0 || self.n_nonmember == 0 {
            return bad("need at least one member and one nonmember".into());
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if let Some(t) = &self.temporal {
            if !prob_ok(t.p_date) {
                return bad(format!("p_date {} outside [0, 1]", t.p_date));
            }
            for r in [t.member_years, t.nonmember_years] {
                if r.from > r.to || r.from < MIN_YEAR || r.to > MAX_YEAR {
                    return bad(format!(
                        "year range [{}, {}] must be nonempty within [{MIN_YEAR}, {MAX_YEAR}]",
                        r.from, r.to
                    ));
                }
            }
        }
        if let Some(m) = &self.marker {
            if !prob_ok(m.p_member) || !prob_ok(m.p_nonmember) {
                return bad("marker probabilities must be in [0, 1]".into());
            }
            if m.text.is_empty() || m.text.contains(' ') {
                return bad("marker must be non-empty and contain no space".into());
            }
            if m.text.chars().all(|c| c.is_ascii_lowercase())
                && token_rank(&m.text).is_some_and(|r| r <= self.base_vocab_size)
            {
                return bad(format!("marker {:?} is a base vocabulary token", m.text));
            }
        }
        Ok(())
    }
}

/// Name of the token of 1-based Zipf rank `rank`: bijective base-26 over
/// `a..z` (`1 -> a`, `26 -> z`, `27 -> aa`). Letters only, so base text never
/// contains digits or month names in title case.
pub fn token_name(rank: usize) -> String {
    let mut n = rank;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII")
}

fn token_rank(name: &str) -> Option<usize> {
    name.bytes().try_fold(0usize, |acc, b| {
        acc.checked_mul(26)?.checked_add((b - b'a') as usize + 1)
    })
}

struct Zipf {
    cumulative: Vec<f64>,
}

impl Zipf {
    fn new(size: usize, exponent: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = (1..=size)
            .map(|k| {
                acc += (k as f64).powf(-exponent);
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// 0-based rank.
    fn sample(&self, rng: &mut SplitMix64) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = rng.next_f64() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

pub fn generate(spec: &ShiftSpec) -> Result<LabeledCorpus> {
    spec.validate()?;
    let vocab: Vec<String> = (1..=spec.base_vocab_size).map(token_name).collect();
    let zipf = Zipf::new(spec.base_vocab_size, spec.zipf_exponent);
    let mut rng = SplitMix64::new(spec.seed);

    let mut samples = Vec::with_capacity(spec.n_member + spec.n_nonmember);
    for (label, count, prefix) in [
        (Label::Member, spec.n_member, 'm'),
        (Label::NonMember, spec.n_nonmember, 'n'),
    ] {
        for i in 0..count {
            let mut tokens: Vec<String> = (0..spec.text_length)
                .map(|_| vocab[zipf.sample(&mut rng)].clone())
                .collect();
            let mut meta = Vec::new();
            if let Some(t) = &spec.temporal {
                if rng.bernoulli(t.p_date) {
                    let r = match label {
                        Label::Member => t.member_years,
                        Label::NonMember => t.nonmember_years,
                    };
                    let year = r.from + rng.below(u64::from(r.to - r.from) + 1) as u32;
                    let pos = rng.below(tokens.len() as u64 + 1) as usize;
                    tokens.insert(pos, year.to_string());
                    meta.push(("year", year.to_string()));
                }
            }
            if let Some(m) = &spec.marker {
                let p = match label {
                    Label::Member => m.p_member,
                    Label::NonMember => m.p_nonmember,
                };
                if rng.bernoulli(p) {
                    let pos = rng.below(tokens.len() as u64 + 1) as usize;
                    tokens.insert(pos, m.text.clone());
                    meta.push(("marker", "1".to_owned()));
                }
            }
            let mut sample = Sample::new(format!("{prefix}{i:05}"), tokens.join(" "), label);
            for (k, v) in meta {
                sample = sample.with_meta(k, v);
            }
            samples.push(sample);
        }
    }

    let mut corpus = LabeledCorpus::new(format!("synth-{}", spec.seed), samples)?;
    corpus
        .provenance
        .insert("generator".to_owned(), "synth".to_owned());
    corpus.provenance.insert(
        "spec".to_owned(),
        serde_json::to_string(spec).expect("spec serializes"),
    );
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textkit::extract_years;

    #[test]
    fn token_names() {
        assert_eq!(token_name(1), "a");
        assert_eq!(token_name(26), "z");
        assert_eq!(token_name(27), "aa");
        assert_eq!(token_name(702), "zz");
        assert_eq!(token_name(703), "aaa");
        for r in [1, 26, 27, 702, 703, 5000] {
            assert_eq!(token_rank(&token_name(r)), Some(r));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = ShiftSpec::null(20, 20, 4).with_marker("marker", 0.5, 0.1);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = ShiftSpec { seed: 5, ..spec };
        assert_ne!(
            generate(&other).unwrap().samples(),
            generate(&ShiftSpec {
                seed: 4,
                ..other.clone()
            })
            .unwrap()
            .samples()
        );
    }

    #[test]
    fn shape_and_provenance() {
        let c = generate(&ShiftSpec::null(3, 2, 0)).unwrap();
        assert_eq!((c.counts().members, c.counts().nonmembers), (3, 2));
        assert!(c.samples().iter().all(|s| s.text.split(' ').count() == 100));
        assert!(c
            .samples()
            .iter()
            .all(|s| extract_years(&s.text).is_empty()));
        let spec: ShiftSpec = serde_json::from_str(&c.provenance["spec"]).unwrap();
        assert_eq!(spec, ShiftSpec::null(3, 2, 0));
    }

    #[test]
    fn marker_frequency() {
        let spec = ShiftSpec::null(500, 500, 0).with_marker("marker", 0.3, 0.0);
        let c = generate(&spec).unwrap();
        let with = |label: Label| {
            c.samples()
                .iter()
                .filter(|s| s.label == label && s.text.split(' ').any(|t| t == "marker"))
                .count()
        };
        let members = with(Label::Member);
        assert!((members as f64 / 500.0 - 0.3).abs() <= 0.05, "{members}");
        assert_eq!(with(Label::NonMember), 0);
        // Golden count under SplitMix64(0) and the documented draw order.
        assert_eq!(members, MARKER_GOLDEN_COUNT);
    }

    const MARKER_GOLDEN_COUNT: usize = 154;

    #[test]
    fn temporal_years_fall_in_ranges() {
        let spec = ShiftSpec::null(30, 30, 2).with_temporal((1990, 2016), (2023, 2024), 1.0);
        let c = generate(&spec).unwrap();
        for s in c.samples() {
            let years = extract_years(&s.text);
            assert_eq!(years.len(), 1);
            let y = *years.first().unwrap();
            match s.label {
                Label::Member => assert!((1990..=2016).contains(&y)),
                Label::NonMember => assert!((2023..=2024).contains(&y)),
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let base = ShiftSpec::null(10, 10, 0);
        assert!(generate(&ShiftSpec {
            n_member: 0,
            ..base.clone()
        })
        .is_err());
        assert!(generate(&base.clone().with_marker("m", 1.5, 0.0)).is_err());
        assert!(generate(&base.clone().with_marker("abc", 0.5, 0.0)).is_err());
        assert!(generate(&base.clone().with_marker("", 0.5, 0.0)).is_err());
        assert!(generate(&base.clone().with_temporal((2000, 1990), (2023, 2024), 1.0)).is_err());
        assert!(generate(&base.with_temporal((1990, 2000), (2023, 2024), -0.1)).is_err());
    }
}
