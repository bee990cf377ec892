//! Summarizing event sequences with fixed-interval serial episodes.
//!
//! The crate is organised bottom-up:
//!
//! - [`events`]: alphabets, event datasets and episode types.
//! - [`occurrences`]: occurrence search, non-overlapped filtering and covers.
//! - [`candidates`]: depth-first candidate generation.
//! - [`mdl`]: scores, greedy selection, encoding tables and decoding.
//! - [`hmm`]: the episode-pair hidden Markov model, simulation and likelihoods.
//! - [`textpipe`]: turning text corpora into event data and classifying with the mined dictionary.
//! - [`synth`]: seeded generators for synthetic corpora.

pub mod candidates;
pub mod error;
pub mod events;
pub mod fixtures;
pub mod hmm;
pub mod mdl;
pub mod occurrences;
pub mod synth;
pub mod textpipe;

pub use error::{Error, Result};
pub use events::{
    Alphabet, EpisodeSpec, Event, EventDataset, FixedIntervalEpisode, SerialEpisode, SymbolId, Time,
};
pub use occurrences::FrequencyMode;
