//! Seeded generators for synthetic text corpora.
//!
//! [`planted_corpus`] hides a few fixed-interval episodes among uniform
//! noise words, for checking that the selector finds exactly the planted
//! episodes. [`review_corpus`] produces a small two-class corpus in the
//! style of sentiment-labelled reviews: class phrases, neutral phrases,
//! common filler words and a long tail of rare words.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::events::EpisodeSpec;
use crate::textpipe::Corpus;

/// Seed of the bundled planted corpus.
pub const PLANTED_SEED: u64 = 20_240_601;

/// Seed of the bundled review corpus.
pub const REVIEW_SEED: u64 = 7;

/// The episodes hidden in [`planted_corpus`], over mutually disjoint words.
pub const PLANTED_EPISODES: [&str; 5] = [
    "amber -1-> basil -1-> cedar",
    "delta -2-> ember -1-> flint",
    "gamma -1-> hazel -3-> ivory",
    "jasper -2-> kelp",
    "lemon -1-> mango -1-> nutmeg -2-> olive",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub documents: usize,
    /// Target share of noise tokens among all tokens.
    pub noise_fraction: f64,
    /// Size of the noise vocabulary (disjoint from the planted words).
    pub noise_vocabulary: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            documents: 200,
            noise_fraction: 0.3,
            noise_vocabulary: 2000,
            seed: PLANTED_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    pub episodes: Vec<EpisodeSpec>,
    /// Planted occurrences of each episode.
    pub occurrences: Vec<usize>,
    pub noise_tokens: usize,
    pub total_tokens: usize,
}

/// Each document holds one to three planted occurrences, laid out one after
/// another; positions inside an occurrence's gaps and the slots around
/// occurrences are filled with noise words until the noise share reaches
/// `noise_fraction` of the corpus.
pub fn planted_corpus(config: &PlantedConfig) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let episodes: Vec<EpisodeSpec> = PLANTED_EPISODES
        .iter()
        .map(|s| s.parse().expect("planted episodes are valid"))
        .collect();
    let noise_word = |k: usize| format!("w{k:04}");

    let blocks_per_doc: Vec<usize> = (0..config.documents)
        .map(|_| rng.gen_range(1..=3))
        .collect();
    let total_blocks: usize = blocks_per_doc.iter().sum();
    let mut which: Vec<usize> = (0..total_blocks).map(|b| b % episodes.len()).collect();
    which.shuffle(&mut rng);

    let span = |e: &EpisodeSpec| e.gaps.iter().map(|&g| g as usize).sum::<usize>();
    let episode_tokens: usize = which.iter().map(|&e| episodes[e].symbols.len()).sum();
    let filler_tokens: usize = which
        .iter()
        .map(|&e| span(&episodes[e]) + 1 - episodes[e].symbols.len())
        .sum();
    let target_noise = ((config.noise_fraction / (1.0 - config.noise_fraction))
        * episode_tokens as f64)
        .round() as usize;
    let extra = target_noise.saturating_sub(filler_tokens);

    // extra noise per (document, slot), slot k sits before block k
    let mut slots: Vec<Vec<usize>> = blocks_per_doc.iter().map(|&b| vec![0; b + 1]).collect();
    for _ in 0..extra {
        let d = rng.gen_range(0..config.documents);
        let s = rng.gen_range(0..slots[d].len());
        slots[d][s] += 1;
    }

    let mut documents = Vec::with_capacity(config.documents);
    let mut next = which.into_iter();
    let mut occurrences = vec![0; episodes.len()];
    let mut noise_tokens = 0;
    for (d, &blocks) in blocks_per_doc.iter().enumerate() {
        let mut doc = Vec::new();
        for (b, &extra) in slots[d].iter().enumerate() {
            for _ in 0..extra {
                doc.push(noise_word(rng.gen_range(0..config.noise_vocabulary)));
                noise_tokens += 1;
            }
            if b == blocks {
                break;
            }
            let e = next.next().expect("one episode per block");
            occurrences[e] += 1;
            let ep = &episodes[e];
            doc.push(ep.symbols[0].clone());
            for (gap, sym) in ep.gaps.iter().zip(&ep.symbols[1..]) {
                for _ in 1..*gap {
                    doc.push(noise_word(rng.gen_range(0..config.noise_vocabulary)));
                    noise_tokens += 1;
                }
                doc.push(sym.clone());
            }
        }
        documents.push(doc);
    }
    let total_tokens = documents.iter().map(Vec::len).sum();
    let labels = vec!["doc".to_string(); config.documents];
    PlantedCorpus {
        corpus: Corpus::new(documents, labels).expect("generated tokens are non-empty"),
        episodes,
        occurrences,
        noise_tokens,
        total_tokens,
    }
}

const POSITIVE_PHRASES: [&str; 8] = [
    "truly wonderful performance",
    "highly recommend this gem",
    "beautiful moving story",
    "brilliant script and direction",
    "kept smiling throughout",
    "stunning visual feast",
    "heartfelt and charming",
    "masterful storytelling shines",
];

const NEGATIVE_PHRASES: [&str; 8] = [
    "complete waste time",
    "poorly written dialogue",
    "boring predictable plot",
    "terrible acting everywhere",
    "fell asleep halfway",
    "painfully slow pacing",
    "utterly forgettable mess",
    "clumsy editing ruins",
];

const NEUTRAL_PHRASES: [&str; 5] = [
    "the movie was released last summer",
    "the cast includes several newcomers",
    "the director also wrote the screenplay",
    "runs about two hours long",
    "based upon popular novel",
];

const FILLERS: [&str; 12] = [
    "the", "and", "film", "movie", "story", "scene", "actor", "really", "just", "also", "very",
    "much",
];

#[derive(Debug, Clone)]
pub struct ReviewCorpus {
    pub train: Corpus,
    pub test: Corpus,
}

/// A two-class corpus (`neg`, `pos`): `train_per_class` and `test_per_class`
/// documents per class. Every document carries two sentiment phrases (each
/// from its own class with probability 0.75), one neutral phrase, filler
/// words, and a handful of rare words that occur at most three times in
/// the whole corpus.
pub fn review_corpus(train_per_class: usize, test_per_class: usize, seed: u64) -> ReviewCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = 2 * (train_per_class + test_per_class);
    let rare_per_doc = 8;

    // rare words: each used one to three times, dealt out at random
    let mut rare: Vec<String> = Vec::new();
    let mut k = 0;
    while rare.len() < docs * rare_per_doc {
        let copies = rng.gen_range(1..=3);
        for _ in 0..copies {
            rare.push(rare_word(k));
        }
        k += 1;
    }
    rare.truncate(docs * rare_per_doc);
    rare.shuffle(&mut rng);
    let mut rare = rare.into_iter();

    let mut make = |label: &str, rng: &mut ChaCha8Rng| -> Vec<String> {
        let (own, other) = if label == "pos" {
            (&POSITIVE_PHRASES, &NEGATIVE_PHRASES)
        } else {
            (&NEGATIVE_PHRASES, &POSITIVE_PHRASES)
        };
        let mut parts: Vec<Vec<String>> = Vec::new();
        for _ in 0..2 {
            let pool = if rng.gen_bool(0.75) { own } else { other };
            parts.push(words(pool.choose(rng).expect("non-empty pool")));
        }
        parts.push(words(NEUTRAL_PHRASES.choose(rng).expect("non-empty pool")));
        for _ in 0..rng.gen_range(8..=14) {
            parts.push(vec![FILLERS
                .choose(rng)
                .expect("non-empty pool")
                .to_string()]);
        }
        for _ in 0..rare_per_doc {
            parts.push(vec![rare.next().expect("enough rare words")]);
        }
        parts.shuffle(rng);
        parts.concat()
    };

    let mut split = |per_class: usize, rng: &mut ChaCha8Rng| {
        let mut labels: Vec<&str> = Vec::with_capacity(2 * per_class);
        for _ in 0..per_class {
            labels.push("neg");
            labels.push("pos");
        }
        labels.shuffle(rng);
        let documents = labels.iter().map(|l| make(l, rng)).collect();
        Corpus::new(documents, labels.into_iter().map(str::to_string).collect())
            .expect("generated corpus is valid")
    };
    let train = split(train_per_class, &mut rng);
    let test = split(test_per_class, &mut rng);
    ReviewCorpus { train, test }
}

fn words(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_string).collect()
}

/// Pronounceable pseudo-words: `k` in base 20 over consonant-vowel syllables.
fn rare_word(mut k: usize) -> String {
    const CONSONANTS: [char; 10] = ['b', 'd', 'f', 'g', 'k', 'l', 'm', 'p', 'r', 't'];
    const VOWELS: [char; 2] = ['a', 'o'];
    let mut out = String::new();
    for _ in 0..4 {
        let digit = k % 20;
        k /= 20;
        out.push(CONSONANTS[digit / 2]);
        out.push(VOWELS[digit % 2]);
    }
    out.push('x');
    out
}
