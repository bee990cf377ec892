//! Small bundled datasets used by tests, docs and the CLI examples.

use crate::events::{EventDataset, FixedIntervalEpisode};
use crate::textpipe::Corpus;

/// The 15-event running example `<(D,1),(A,2),(C,3),(E,3),...,(C,9)>`.
pub const SEQUENCE_ONE: &str = include_str!("../data/sequence1.txt");

/// The three hand-picked episodes used to illustrate the encoding table.
pub const TABLE_ONE_EPISODES: &str = include_str!("../data/table1_episodes.txt");

pub fn sequence_one() -> EventDataset {
    EventDataset::parse(SEQUENCE_ONE).expect("bundled data is valid")
}

pub fn table_one_episodes(data: &EventDataset) -> Vec<FixedIntervalEpisode> {
    TABLE_ONE_EPISODES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| FixedIntervalEpisode::parse(l, data.alphabet()).expect("bundled episode is valid"))
        .collect()
}

/// Training split of the bundled two-class review corpus (`<label>\t<tokens>` lines).
pub const REVIEW_TRAIN: &str = include_str!("../data/review_train.tsv");

/// Test split of the bundled review corpus.
pub const REVIEW_TEST: &str = include_str!("../data/review_test.tsv");

/// The bundled review corpus as (train, test).
pub fn review_corpus() -> (Corpus, Corpus) {
    (
        Corpus::parse(REVIEW_TRAIN).expect("bundled corpus is valid"),
        Corpus::parse(REVIEW_TEST).expect("bundled corpus is valid"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{self, REVIEW_SEED};

    #[test]
    fn bundled_review_corpus_matches_generator() {
        let generated = synth::review_corpus(100, 50, REVIEW_SEED);
        let (train, test) = review_corpus();
        assert_eq!(train, generated.train);
        assert_eq!(test, generated.test);
    }
}
