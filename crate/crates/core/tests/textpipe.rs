use episodeseq::fixtures;
use episodeseq::textpipe::{
    featurize, mine_dictionary, preprocess, tfidf, Corpus, Dictionary, Idf, PreprocessOptions,
    Weighting, DEFAULT_TEXT_MAX_GAP,
};
use proptest::prelude::*;

fn corpus() -> impl Strategy<Value = Corpus> {
    let word = prop::sample::select(vec![
        "alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma",
    ]);
    let doc = prop::collection::vec(word, 1..=12);
    prop::collection::vec((doc, prop::bool::ANY), 2..=12).prop_map(|docs| {
        let (documents, labels) = docs
            .into_iter()
            .map(|(d, l)| {
                (
                    d.into_iter().map(str::to_string).collect(),
                    if l { "pos" } else { "neg" }.to_string(),
                )
            })
            .unzip();
        Corpus::new(documents, labels).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tfidf_rows_have_unit_norm_or_are_empty(train in corpus(), test in corpus()) {
        let dict = Dictionary::full(&train);
        for m in [tfidf(&train, &dict), featurize(&test, &dict, &Idf::fit(&train, &dict), Weighting::TfIdf)] {
            for k in 0..m.len() {
                let norm = m.norm(k);
                prop_assert!(m.rows[k].is_empty() || (norm - 1.0).abs() < 1e-12, "norm {}", norm);
            }
        }
    }

    #[test]
    fn binary_weights_are_zero_or_one(train in corpus()) {
        let dict = Dictionary::full(&train);
        let m = featurize(&train, &dict, &Idf::fit(&train, &dict), Weighting::Binary);
        prop_assert!(m.rows.iter().flatten().all(|&(_, w)| w == 0.0 || w == 1.0));
    }

    #[test]
    fn episode_dictionary_is_part_of_the_full_one(train in corpus()) {
        let full = Dictionary::full(&train);
        let mined = mine_dictionary(&train, DEFAULT_TEXT_MAX_GAP, None).unwrap();
        prop_assert!(mined.dictionary.words().iter().all(|w| full.contains(w)));
        for sel in &mined.selection.episodes {
            prop_assert!(sel.episode.len() >= 2);
        }
    }

    #[test]
    fn corpus_text_round_trips(c in corpus()) {
        prop_assert_eq!(Corpus::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn preprocessing_respects_its_options(raw in "[a-zA-Z ,.!]{0,80}", min_len in 1usize..=5) {
        let opts = PreprocessOptions { min_len, ..PreprocessOptions::default() };
        for t in preprocess(&raw, &opts) {
            prop_assert!(t.chars().count() >= min_len);
            prop_assert_eq!(t.to_lowercase(), t.clone());
            prop_assert!(t.chars().all(char::is_alphanumeric));
        }
    }
}

#[test]
fn bundled_corpus_shrinks_the_dictionary() {
    let (train, _) = fixtures::review_corpus();
    let full = Dictionary::full(&train);
    let mined = mine_dictionary(&train, DEFAULT_TEXT_MAX_GAP, None).unwrap();
    assert!(!mined.dictionary.is_empty());
    assert!(2 * mined.dictionary.len() <= full.len());
}
