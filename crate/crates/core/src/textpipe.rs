//! Text classification with a dictionary mined from episodes.
//!
//! Each training document becomes one event sequence whose event types are
//! its words and whose times are token positions, so no episode can span two
//! documents. The selector is run on all training documents together and
//! the words appearing in the selected multi-node episodes form the reduced
//! dictionary ("Dictionary-II"); the full training vocabulary is
//! "Dictionary-I". Documents are then represented as tf-idf vectors over
//! either dictionary and classified with multinomial Naive Bayes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::{Alphabet, Event, EventDataset};
use crate::mdl::{select, SelectConfig, Selection};
use crate::occurrences::FrequencyMode;

/// Default largest gap (in token positions) between consecutive episode words.
pub const DEFAULT_TEXT_MAX_GAP: u32 = 5;

/// Tokenization settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub lowercase: bool,
    /// Tokens shorter than this many characters are dropped.
    pub min_len: usize,
    pub stopwords: BTreeSet<String>,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            lowercase: true,
            min_len: 3,
            stopwords: BTreeSet::new(),
        }
    }
}

/// Splits on every non-alphanumeric character and applies `options`.
pub fn preprocess(raw: &str, options: &PreprocessOptions) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if options.lowercase {
                t.to_lowercase()
            } else {
                t.to_string()
            }
        })
        .filter(|t| t.chars().count() >= options.min_len)
        .filter(|t| !options.stopwords.contains(t))
        .collect()
}

/// Labeled documents, each a list of tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub documents: Vec<Vec<String>>,
    pub labels: Vec<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Vec<String>>, labels: Vec<String>) -> Result<Self> {
        if documents.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} documents but {} labels",
                documents.len(),
                labels.len()
            )));
        }
        if documents.iter().flatten().any(|t| t.is_empty()) {
            return Err(Error::invalid("tokens must be non-empty"));
        }
        Ok(Self { documents, labels })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.labels.iter().collect();
        set.into_iter().cloned().collect()
    }

    /// Pre-tokenized format: one document per line, `<label>\t<token token ...>`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut documents = Vec::new();
        let mut labels = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (label, tokens) = line.split_once('\t').ok_or_else(|| {
                Error::parse(format!("line {}: expected `<label>\\t<tokens>`", k + 1))
            })?;
            let label = label.trim();
            if label.is_empty() {
                return Err(Error::parse(format!("line {}: empty label", k + 1)));
            }
            labels.push(label.to_string());
            documents.push(tokens.split_whitespace().map(str::to_string).collect());
        }
        Self::new(documents, labels)
    }

    pub fn to_text(&self) -> String {
        self.documents
            .iter()
            .zip(&self.labels)
            .map(|(doc, label)| format!("{label}\t{}\n", doc.join(" ")))
            .collect()
    }

    /// Reads `<root>/<split>/<class>/<docid>.txt`, tokenizing with `options`.
    /// Documents are ordered by class name, then file name.
    pub fn load_dir(root: &Path, split: &str, options: &PreprocessOptions) -> Result<Self> {
        let dir = root.join(split);
        let mut classes: Vec<_> = fs::read_dir(&dir)?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|e| e.path().is_dir())
            .collect();
        classes.sort_by_key(|e| e.file_name());
        let mut documents = Vec::new();
        let mut labels = Vec::new();
        for class in classes {
            let label = class.file_name().to_string_lossy().into_owned();
            let mut files: Vec<_> = fs::read_dir(class.path())?
                .collect::<std::io::Result<Vec<_>>>()?
                .into_iter()
                .filter(|e| e.path().extension().is_some_and(|x| x == "txt"))
                .collect();
            files.sort_by_key(|e| e.file_name());
            for file in files {
                let raw = fs::read(file.path())?;
                documents.push(preprocess(&String::from_utf8_lossy(&raw), options));
                labels.push(label.clone());
            }
        }
        Self::new(documents, labels)
    }
}

/// Which dictionary a word list is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DictionaryKind {
    /// Every distinct training word.
    Full,
    /// Words of the selected multi-node episodes.
    Episodes,
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "dictionary-1",
            Self::Episodes => "dictionary-2",
        })
    }
}

/// A word list with ids given by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    pub kind: DictionaryKind,
}

impl Dictionary {
    /// Words must be distinct; ids follow the given order.
    pub fn new(words: Vec<String>, kind: DictionaryKind) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (k, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::invalid("dictionary words must be non-empty"));
            }
            if index.insert(w.clone(), k).is_some() {
                return Err(Error::invalid(format!("word {w:?} listed twice")));
            }
        }
        Ok(Self { words, index, kind })
    }

    /// Dictionary-I: sorted distinct words of the corpus.
    pub fn full(corpus: &Corpus) -> Self {
        let words: BTreeSet<&String> = corpus.documents.iter().flatten().collect();
        Self::new(words.into_iter().cloned().collect(), DictionaryKind::Full)
            .expect("distinct words")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// One word per line; the line number (from 0) is the id.
    pub fn to_text(&self) -> String {
        self.words.iter().map(|w| format!("{w}\n")).collect()
    }

    pub fn parse(text: &str, kind: DictionaryKind) -> Result<Self> {
        let words = text
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect();
        Self::new(words, kind).map_err(|e| Error::parse(e.to_string()))
    }
}

/// One sequence per document, times `1..=len`, alphabet = Dictionary-I.
pub fn corpus_to_events(train: &Corpus) -> Result<EventDataset> {
    if train.is_empty() {
        return Err(Error::invalid("the training corpus is empty"));
    }
    let dict = Dictionary::full(train);
    let alphabet = Alphabet::new(dict.words().iter().cloned())?;
    let sequences = train
        .documents
        .iter()
        .map(|doc| {
            doc.iter()
                .enumerate()
                .map(|(k, w)| Event::new(alphabet.id(w).expect("word in dictionary"), k as i64 + 1))
                .collect()
        })
        .collect();
    EventDataset::new(alphabet, sequences)
}

/// Dictionary-II: sorted distinct symbols of the selected multi-node episodes.
pub fn build_dictionary_ii(selection: &Selection, alphabet: &Alphabet) -> Dictionary {
    let words: BTreeSet<&str> = selection
        .episodes
        .iter()
        .filter(|s| s.episode.len() >= 2)
        .flat_map(|s| s.episode.event_types().iter().map(|&id| alphabet.name(id)))
        .collect();
    Dictionary::new(
        words.into_iter().map(str::to_string).collect(),
        DictionaryKind::Episodes,
    )
    .expect("distinct words")
}

/// Output of [`mine_dictionary`].
#[derive(Debug, Clone)]
pub struct MinedDictionary {
    pub events: EventDataset,
    pub selection: Selection,
    pub dictionary: Dictionary,
}

/// Converts `train` to event data, runs the selector with non-overlapped
/// frequencies and returns Dictionary-II.
pub fn mine_dictionary(
    train: &Corpus,
    max_gap: u32,
    top_k: Option<usize>,
) -> Result<MinedDictionary> {
    let events = corpus_to_events(train)?;
    let selection = select(
        &events,
        SelectConfig::new(max_gap, top_k, FrequencyMode::NonOverlapped),
    )?;
    let dictionary = build_dictionary_ii(&selection, events.alphabet());
    Ok(MinedDictionary {
        events,
        selection,
        dictionary,
    })
}

/// How document vectors are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Weighting {
    /// Word counts times idf, cosine normalized.
    #[default]
    TfIdf,
    /// Presence (0/1) times idf, cosine normalized.
    BinaryTfIdf,
    /// Presence only.
    Binary,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfidf" => Ok(Self::TfIdf),
            "binary-tfidf" => Ok(Self::BinaryTfIdf),
            "binary" => Ok(Self::Binary),
            other => Err(Error::parse(format!("unknown weighting {other:?}"))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TfIdf => "tfidf",
            Self::BinaryTfIdf => "binary-tfidf",
            Self::Binary => "binary",
        })
    }
}

/// Sparse document vectors, one row per document, entries sorted by word id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub dim: usize,
    pub weighting: Weighting,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Euclidean norm of one row.
    pub fn norm(&self, row: usize) -> f64 {
        self.rows[row]
            .iter()
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Inverse document frequencies learned from a training corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Idf {
    pub n_docs: usize,
    pub df: Vec<usize>,
}

impl Idf {
    pub fn fit(train: &Corpus, dict: &Dictionary) -> Self {
        let mut df = vec![0; dict.len()];
        for doc in &train.documents {
            let ids: BTreeSet<usize> = doc.iter().filter_map(|w| dict.id(w)).collect();
            for id in ids {
                df[id] += 1;
            }
        }
        Self {
            n_docs: train.len(),
            df,
        }
    }

    /// `ln((1 + n_d)/(1 + df)) + 1`.
    pub fn idf(&self, id: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.df[id] as f64)).ln() + 1.0
    }
}

/// Term counts of `doc` restricted to `dict`, sorted by id. Words outside
/// the dictionary are ignored.
pub fn term_counts(doc: &[String], dict: &Dictionary) -> Vec<(usize, usize)> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for w in doc {
        if let Some(id) = dict.id(w) {
            *counts.entry(id).or_default() += 1;
        }
    }
    counts.into_iter().collect()
}

/// Vectors for `corpus` over `dict`, with idf taken from `idf` (fitted on the training split).
pub fn featurize(
    corpus: &Corpus,
    dict: &Dictionary,
    idf: &Idf,
    weighting: Weighting,
) -> FeatureMatrix {
    let rows = corpus
        .documents
        .par_iter()
        .map(|doc| {
            let counts = term_counts(doc, dict);
            let mut row: Vec<(usize, f64)> = counts
                .into_iter()
                .map(|(id, c)| match weighting {
                    Weighting::TfIdf => (id, c as f64 * idf.idf(id)),
                    Weighting::BinaryTfIdf => (id, idf.idf(id)),
                    Weighting::Binary => (id, 1.0),
                })
                .collect();
            if weighting != Weighting::Binary {
                let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (_, v) in &mut row {
                        *v /= norm;
                    }
                }
            }
            row
        })
        .collect();
    FeatureMatrix {
        rows,
        dim: dict.len(),
        weighting,
    }
}

/// Cosine-normalized tf-idf vectors with document frequencies from `corpus` itself.
pub fn tfidf(corpus: &Corpus, dict: &Dictionary) -> FeatureMatrix {
    featurize(corpus, dict, &Idf::fit(corpus, dict), Weighting::TfIdf)
}

/// Multinomial Naive Bayes over real-valued feature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub classes: Vec<String>,
    pub log_prior: Vec<f64>,
    /// `log_likelihood[c][w]`.
    pub log_likelihood: Vec<Vec<f64>>,
    pub smoothing: f64,
}

/// Additive smoothing constant of [`train_nb`].
pub const NB_SMOOTHING: f64 = 1.0;

/// Fits class priors and smoothed per-class word distributions. Smoothing
/// spreads over the features that carry weight in at least one training
/// document, so columns that are zero everywhere do not affect the model.
pub fn train_nb(features: &FeatureMatrix, labels: &[String]) -> Result<NbModel> {
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::invalid("cannot train on an empty corpus"));
    }
    let classes: Vec<String> = labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let class_of: HashMap<&String, usize> =
        classes.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let mut docs = vec![0usize; classes.len()];
    let mut mass = vec![vec![0.0; features.dim]; classes.len()];
    let mut active = vec![false; features.dim];
    for (row, label) in features.rows.iter().zip(labels) {
        let c = class_of[label];
        docs[c] += 1;
        for &(w, v) in row {
            if w >= features.dim {
                return Err(Error::invalid(format!(
                    "feature id {w} outside dimension {}",
                    features.dim
                )));
            }
            mass[c][w] += v;
            active[w] |= v != 0.0;
        }
    }
    let vocab = active.iter().filter(|&&a| a).count().max(1) as f64;
    let total = labels.len() as f64;
    let log_prior = docs.iter().map(|&d| (d as f64 / total).ln()).collect();
    let log_likelihood = mass
        .iter()
        .map(|m| {
            let denom = m.iter().sum::<f64>() + NB_SMOOTHING * vocab;
            m.iter()
                .map(|&x| ((x + NB_SMOOTHING) / denom).ln())
                .collect()
        })
        .collect();
    Ok(NbModel {
        classes,
        log_prior,
        log_likelihood,
        smoothing: NB_SMOOTHING,
    })
}

impl NbModel {
    /// Log posterior (up to a shared constant) of every class for one row.
    pub fn scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(p, ll)| p + row.iter().map(|&(w, v)| v * ll[w]).sum::<f64>())
            .collect()
    }

    /// Index of the most probable class; ties go to the lowest index.
    pub fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        let scores = self.scores(row);
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = k;
            }
        }
        best
    }
}

/// Predicted class names for every row.
pub fn predict(model: &NbModel, features: &FeatureMatrix) -> Result<Vec<String>> {
    let dim = model.log_likelihood.first().map_or(0, Vec::len);
    if features.dim != dim {
        return Err(Error::invalid(format!(
            "features have dimension {} but the model expects {dim}",
            features.dim
        )));
    }
    Ok(features
        .rows
        .par_iter()
        .map(|row| model.classes[model.predict_row(row)].clone())
        .collect())
}

/// Accuracy and macro-averaged F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f: f64,
}

/// Per-class F1 is 0 when precision and recall are both undefined or zero;
/// classes are those appearing in either list.
pub fn evaluate(predicted: &[String], truth: &[String]) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} documents",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty test set"));
    }
    let classes: BTreeSet<&String> = predicted.iter().chain(truth).collect();
    let correct = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    let mut f_sum = 0.0;
    for c in &classes {
        let tp = predicted
            .iter()
            .zip(truth)
            .filter(|(p, t)| p == c && t == c)
            .count() as f64;
        let fp = predicted
            .iter()
            .zip(truth)
            .filter(|(p, t)| p == c && t != c)
            .count() as f64;
        let fn_ = predicted
            .iter()
            .zip(truth)
            .filter(|(p, t)| p != c && t == c)
            .count() as f64;
        if tp > 0.0 {
            let precision = tp / (tp + fp);
            let recall = tp / (tp + fn_);
            f_sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    Ok(Metrics {
        accuracy: correct as f64 / truth.len() as f64,
        macro_f: f_sum / classes.len() as f64,
    })
}

/// Trains on `train` and scores on `test` using vectors over `dict`.
pub fn classify(
    train: &Corpus,
    test: &Corpus,
    dict: &Dictionary,
    weighting: Weighting,
) -> Result<Metrics> {
    let idf = Idf::fit(train, dict);
    let model = train_nb(&featurize(train, dict, &idf, weighting), &train.labels)?;
    let predicted = predict(&model, &featurize(test, dict, &idf, weighting))?;
    evaluate(&predicted, &test.labels)
}
