//! Keyword mention counting over dated document collections.
//!
//! Phrases match case-insensitively on Unicode word boundaries. Whitespace
//! inside a phrase matches any run of whitespace in the text, punctuation next
//! to a word does not block a match, and diacritics are significant.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::index::ShareSeries;
use crate::period::{Granularity, Period};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub outlet: String,
    /// Grouping label (country, institution type); may be empty.
    pub group: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// A document counts once if any phrase occurs in it.
    #[default]
    ContainsDocument,
    /// Every non-overlapping occurrence counts.
    CountOccurrences,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseSet {
    pub name: String,
    pub phrases: Vec<String>,
    #[serde(default)]
    pub match_mode: MatchMode,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("phrase set `{0}` has no phrases")]
    EmptyPhraseSet(String),
    #[error("phrase set `{set}`: phrase {phrase:?} is empty or has leading/trailing whitespace")]
    BadPhrase { set: String, phrase: String },
    #[error("{} document(s) dated outside {start}..{end}: {}", ids.len(), ids.join(", "))]
    DateOutOfRange { start: NaiveDate, end: NaiveDate, ids: Vec<String> },
    #[error("document {id}: outlet label is empty")]
    EmptyOutlet { id: String },
}

impl PhraseSet {
    pub fn new(name: impl Into<String>, phrases: &[&str], match_mode: MatchMode) -> Result<Self, CorpusError> {
        let ps = PhraseSet {
            name: name.into(),
            phrases: phrases.iter().map(|p| p.to_string()).collect(),
            match_mode,
        };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.phrases.is_empty() {
            return Err(CorpusError::EmptyPhraseSet(self.name.clone()));
        }
        for p in &self.phrases {
            if p.is_empty() || p.trim() != p {
                return Err(CorpusError::BadPhrase { set: self.name.clone(), phrase: p.clone() });
            }
        }
        Ok(())
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// A compiled phrase pattern.
#[derive(Debug, Clone)]
pub struct PhraseMatcher {
    re: Regex,
}

impl PhraseMatcher {
    /// Compiles `phrase`. Returns `None` for a phrase with no words.
    pub fn new(phrase: &str) -> Option<Self> {
        let words: Vec<&str> = phrase.split_whitespace().collect();
        let (first, last) = (words.first()?, words.last()?);
        let mut pat = String::from("(?i)");
        // `\b` only makes sense next to a word character; "c++" ends in punctuation.
        if first.chars().next().is_some_and(is_word_char) {
            pat.push_str(r"\b");
        }
        let body: Vec<String> = words.iter().map(|w| regex::escape(w)).collect();
        pat.push_str(&body.join(r"\s+"));
        if last.chars().next_back().is_some_and(is_word_char) {
            pat.push_str(r"\b");
        }
        let re = Regex::new(&pat).expect("escaped phrase is a valid pattern");
        Some(PhraseMatcher { re })
    }

    pub fn count(&self, text: &str) -> usize {
        self.re.find_iter(text).count()
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.re.is_match(text)
    }
}

/// Number of non-overlapping occurrences of `phrase` in `text`.
pub fn match_phrase(text: &str, phrase: &str) -> usize {
    match PhraseMatcher::new(phrase) {
        Some(m) => m.count(text),
        None => 0,
    }
}

/// True if any phrase of `ps` occurs in the document.
pub fn doc_matches(doc: &Document, ps: &PhraseSet) -> bool {
    CompiledPhraseSet::new(ps).matches(&doc.text)
}

/// A phrase set with its patterns compiled once.
#[derive(Debug, Clone)]
pub struct CompiledPhraseSet {
    pub name: String,
    pub match_mode: MatchMode,
    matchers: Vec<PhraseMatcher>,
}

impl CompiledPhraseSet {
    pub fn new(ps: &PhraseSet) -> Self {
        CompiledPhraseSet {
            name: ps.name.clone(),
            match_mode: ps.match_mode,
            matchers: ps.phrases.iter().filter_map(|p| PhraseMatcher::new(p)).collect(),
        }
    }

    pub fn matches(&self, text: &str) -> bool {
        self.matchers.iter().any(|m| m.is_match(text))
    }

    /// Occurrences summed over all phrases.
    pub fn occurrences(&self, text: &str) -> u64 {
        self.matchers.iter().map(|m| m.count(text) as u64).sum()
    }

    /// Per-document tally under this set's match mode.
    fn tally(&self, text: &str) -> u64 {
        match self.match_mode {
            MatchMode::ContainsDocument => u64::from(self.matches(text)),
            MatchMode::CountOccurrences => self.occurrences(text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MentionRow {
    pub period: Period,
    pub n_docs: u64,
    pub n_matching_docs: u64,
    pub n_occurrences: u64,
}

impl MentionRow {
    fn empty(period: Period) -> Self {
        MentionRow { period, n_docs: 0, n_matching_docs: 0, n_occurrences: 0 }
    }

    /// Share of matching documents; `None` when the period has no documents.
    pub fn share(&self) -> Option<f64> {
        (self.n_docs > 0).then(|| self.n_matching_docs as f64 / self.n_docs as f64)
    }

    /// Occurrences per document; `None` when the period has no documents.
    pub fn occurrence_rate(&self) -> Option<f64> {
        (self.n_docs > 0).then(|| self.n_occurrences as f64 / self.n_docs as f64)
    }
}

/// Per-period counts for one outlet and one phrase set, gap-free between the
/// first and last observed period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionSeries {
    pub outlet: String,
    pub phrase_set: String,
    pub match_mode: MatchMode,
    pub granularity: Granularity,
    pub rows: Vec<MentionRow>,
}

impl MentionSeries {
    /// Sums counts into a coarser granularity.
    pub fn rebucket(&self, to: Granularity) -> MentionSeries {
        assert!(self.granularity.nests_in(to), "cannot rebucket {} into {}", self.granularity, to);
        let mut buckets: BTreeMap<Period, MentionRow> = BTreeMap::new();
        for r in &self.rows {
            let p = r.period.coarsen(to);
            let e = buckets.entry(p).or_insert_with(|| MentionRow::empty(p));
            e.n_docs += r.n_docs;
            e.n_matching_docs += r.n_matching_docs;
            e.n_occurrences += r.n_occurrences;
        }
        MentionSeries {
            outlet: self.outlet.clone(),
            phrase_set: self.phrase_set.clone(),
            match_mode: self.match_mode,
            granularity: to,
            rows: fill_gaps(buckets),
        }
    }

    /// The attention series fed to the index: matching-document share, or
    /// occurrences per document under [`MatchMode::CountOccurrences`].
    pub fn to_share_series(&self) -> ShareSeries {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let v = match self.match_mode {
                    MatchMode::ContainsDocument => r.share(),
                    MatchMode::CountOccurrences => r.occurrence_rate(),
                };
                (r.period, v)
            })
            .collect();
        ShareSeries::new(self.outlet.clone(), self.granularity, rows).expect("mention rows are ordered")
    }
}

fn fill_gaps(buckets: BTreeMap<Period, MentionRow>) -> Vec<MentionRow> {
    let (Some(first), Some(last)) = (buckets.keys().next().copied(), buckets.keys().next_back().copied()) else {
        return Vec::new();
    };
    Period::range(first, last)
        .map(|p| buckets.get(&p).copied().unwrap_or_else(|| MentionRow::empty(p)))
        .collect()
}

/// Inclusive window of plausible document dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for DateWindow {
    fn default() -> Self {
        DateWindow {
            start: NaiveDate::from_ymd_opt(1900, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2100, 1, 1).unwrap(),
        }
    }
}

impl DateWindow {
    pub fn check(&self, docs: &[Document]) -> Result<(), CorpusError> {
        let mut ids: Vec<String> = docs
            .iter()
            .filter(|d| d.date < self.start || d.date > self.end)
            .map(|d| d.id.clone())
            .collect();
        if ids.is_empty() {
            return Ok(());
        }
        ids.sort();
        Err(CorpusError::DateOutOfRange { start: self.start, end: self.end, ids })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AggregateOptions {
    pub date_window: DateWindow,
    pub execution: Execution,
}

/// Per-outlet mention series under default options.
pub fn aggregate(
    docs: &[Document],
    ps: &PhraseSet,
    granularity: Granularity,
) -> Result<BTreeMap<String, MentionSeries>, CorpusError> {
    aggregate_with(docs, ps, granularity, &AggregateOptions::default())
}

pub fn aggregate_with(
    docs: &[Document],
    ps: &PhraseSet,
    granularity: Granularity,
    opts: &AggregateOptions,
) -> Result<BTreeMap<String, MentionSeries>, CorpusError> {
    ps.validate()?;
    check_documents(docs, &opts.date_window)?;
    let compiled = CompiledPhraseSet::new(ps);
    let per_doc = opts.execution.map(docs, |d| (compiled.matches(&d.text), compiled.occurrences(&d.text)));

    let mut by_outlet: BTreeMap<&str, BTreeMap<Period, MentionRow>> = BTreeMap::new();
    for (doc, (matched, occ)) in docs.iter().zip(per_doc) {
        let p = Period::containing(doc.date, granularity);
        let row = by_outlet
            .entry(doc.outlet.as_str())
            .or_default()
            .entry(p)
            .or_insert_with(|| MentionRow::empty(p));
        row.n_docs += 1;
        row.n_matching_docs += u64::from(matched);
        row.n_occurrences += occ;
    }
    Ok(by_outlet
        .into_iter()
        .map(|(outlet, buckets)| {
            let series = MentionSeries {
                outlet: outlet.to_string(),
                phrase_set: ps.name.clone(),
                match_mode: ps.match_mode,
                granularity,
                rows: fill_gaps(buckets),
            };
            (outlet.to_string(), series)
        })
        .collect())
}

fn check_documents(docs: &[Document], window: &DateWindow) -> Result<(), CorpusError> {
    if let Some(d) = docs.iter().find(|d| d.outlet.is_empty()) {
        return Err(CorpusError::EmptyOutlet { id: d.id.clone() });
    }
    window.check(docs)
}

/// Counts of documents (or occurrences, per each set's match mode) by phrase
/// set and period: the "words in journals" layout with sets as rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub granularity: Granularity,
    pub phrase_sets: Vec<String>,
    pub periods: Vec<Period>,
    /// `cells[s][t]` for phrase set `s` and period `t`.
    pub cells: Vec<Vec<u64>>,
    /// Total documents per period.
    pub n_docs: Vec<u64>,
}

impl CountTable {
    pub fn get(&self, set: &str, period: Period) -> Option<u64> {
        let s = self.phrase_sets.iter().position(|n| n == set)?;
        let t = self.periods.iter().position(|p| *p == period)?;
        Some(self.cells[s][t])
    }
}

/// Builds a [`CountTable`] covering the corpus' period span (or `span` when given).
pub fn count_table(
    docs: &[Document],
    phrase_sets: &[PhraseSet],
    granularity: Granularity,
    span: Option<(Period, Period)>,
    execution: Execution,
) -> CountTable {
    let compiled: Vec<CompiledPhraseSet> = phrase_sets.iter().map(CompiledPhraseSet::new).collect();
    let periods: Vec<Period> = match span {
        Some((a, b)) => Period::range(a, b).collect(),
        None => {
            let ps: Vec<Period> = docs.iter().map(|d| Period::containing(d.date, granularity)).collect();
            match (ps.iter().min(), ps.iter().max()) {
                (Some(&a), Some(&b)) => Period::range(a, b).collect(),
                _ => Vec::new(),
            }
        }
    };
    let mut cells = vec![vec![0u64; periods.len()]; compiled.len()];
    let mut n_docs = vec![0u64; periods.len()];
    let Some(first) = periods.first().copied() else {
        return CountTable { granularity, phrase_sets: names(phrase_sets), periods, cells, n_docs };
    };
    let tallies = execution.map(docs, |d| compiled.iter().map(|c| c.tally(&d.text)).collect::<Vec<_>>());
    for (doc, tally) in docs.iter().zip(tallies) {
        let t = first.steps_to(&Period::containing(doc.date, granularity));
        if t < 0 || t as usize >= periods.len() {
            continue;
        }
        let t = t as usize;
        n_docs[t] += 1;
        for (s, v) in tally.into_iter().enumerate() {
            cells[s][t] += v;
        }
    }
    CountTable { granularity, phrase_sets: names(phrase_sets), periods, cells, n_docs }
}

fn names(sets: &[PhraseSet]) -> Vec<String> {
    sets.iter().map(|s| s.name.clone()).collect()
}
