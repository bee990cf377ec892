//! One function per subcommand.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use episodeseq::candidates::generate_candidates;
use episodeseq::hmm::{compare_pairs, EpisodePairModel, PairStats};
use episodeseq::mdl::{
    decode as decode_table, encode, select, EncodingTable, SelectConfig, Selection,
};
use episodeseq::occurrences::count_no_general;
use episodeseq::synth::{planted_corpus, review_corpus, PlantedConfig, PLANTED_SEED, REVIEW_SEED};
use episodeseq::textpipe::{
    classify as run_classify, mine_dictionary, Corpus, Dictionary, DictionaryKind,
    PreprocessOptions,
};
use episodeseq::{
    Alphabet, Error, EventDataset, FixedIntervalEpisode, Result, SerialEpisode, SymbolId,
};

use crate::{
    ClassifyArgs, CorpusArgs, DecodeArgs, DictArgs, HmmCompareArgs, HmmScoreArgs, HmmSimArgs,
    MineArgs, ModelArgs, SynthArgs, SynthKind,
};

/// Review corpus size written by `synth --kind review`.
const REVIEW_TRAIN_PER_CLASS: usize = 100;
const REVIEW_TEST_PER_CLASS: usize = 50;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Writes to `path`, or to standard output when absent.
fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Non-empty lines that are not `#` comments.
fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn summary(data: &EventDataset, selection: &Selection, table: &EncodingTable) -> String {
    let alphabet = data.alphabet();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "sequences: {}  events: {}  symbols: {}",
        data.num_sequences(),
        data.num_events(),
        alphabet.len()
    );
    let _ = writeln!(
        out,
        "selected episodes: {}  rounds: {}",
        selection.len(),
        selection.rounds
    );
    for sel in &selection.episodes {
        let _ = writeln!(
            out,
            "  {}\tf={}\toverlap-score={}\tround={}",
            sel.episode.format(alphabet),
            sel.occurrences.frequency(),
            sel.overlap_score,
            sel.round
        );
    }
    let _ = writeln!(out, "total length: {}", table.total_length());
    out
}

pub(crate) fn mine(args: MineArgs) -> Result<()> {
    let data = EventDataset::parse(&read(&args.input)?)?;
    if let Some(path) = &args.dump_candidates {
        let candidates = generate_candidates(&data, args.max_gap, args.freq_mode)?;
        write(path, &candidates.dump(data.alphabet()))?;
    }
    let selection = match &args.force_episodes {
        Some(path) => {
            let text = read(path)?;
            let episodes = content_lines(&text)
                .map(|l| FixedIntervalEpisode::parse(l, data.alphabet()))
                .collect::<Result<Vec<_>>>()?;
            Selection::forced(&data, &episodes, args.freq_mode)?
        }
        None => select(
            &data,
            SelectConfig::new(args.max_gap, args.top_k, args.freq_mode),
        )?,
    };
    let table = encode(&data, &selection)?;
    if let Some(path) = &args.dump_occurrences {
        let dump: String = selection
            .episodes
            .iter()
            .map(|s| s.occurrences.dump(data.alphabet()))
            .collect();
        write(path, &dump)?;
    }
    emit(args.output.as_deref(), &table.to_csv())?;
    let report = summary(&data, &selection, &table);
    if let Some(path) = &args.report {
        write(path, &report)?;
    }
    if !args.quiet {
        eprint!("{report}");
    }
    Ok(())
}

pub(crate) fn decode(args: DecodeArgs) -> Result<()> {
    let table = EncodingTable::parse_csv(&read(&args.input)?)?;
    let data = decode_table(&table)?;
    emit(args.output.as_deref(), &data.to_text())
}

fn build_model(args: &ModelArgs) -> Result<(EpisodePairModel, Alphabet)> {
    let alphabet = Alphabet::letters(args.alphabet_size);
    let alpha = SerialEpisode::parse(&args.alpha, &alphabet)?;
    let beta = SerialEpisode::parse(&args.beta, &alphabet)?;
    let model = EpisodePairModel::new(alpha, beta, args.alphabet_size, args.eta)?;
    Ok((model, alphabet))
}

fn read_observations(path: &Path, alphabet: &Alphabet) -> Result<Vec<SymbolId>> {
    read(path)?
        .split_whitespace()
        .map(|w| {
            alphabet
                .id(w)
                .ok_or_else(|| Error::Parse(format!("unknown symbol {w:?} in observation file")))
        })
        .collect()
}

fn symbol_line(symbols: &[SymbolId], alphabet: &Alphabet) -> String {
    let names: Vec<&str> = symbols.iter().map(|&s| alphabet.name(s)).collect();
    format!("{}\n", names.join(" "))
}

pub(crate) fn hmm_sim(args: HmmSimArgs) -> Result<()> {
    let (model, alphabet) = build_model(&args.model)?;
    let trajectory = model.simulate(args.length, args.seed)?;
    if let Some(path) = &args.dump_model {
        write(path, &model.to_json(&alphabet))?;
    }
    if let Some(path) = &args.observations {
        write(path, &symbol_line(&trajectory.symbols, &alphabet))?;
    }
    emit(args.output.as_deref(), &trajectory.dump(&alphabet))
}

pub(crate) fn hmm_score(args: HmmScoreArgs) -> Result<()> {
    let (model, alphabet) = build_model(&args.model)?;
    let o = read_observations(&args.input, &alphabet)?;
    let path = model.viterbi(&o)?;
    let counts = model.counts_of_path(&path)?;
    let ll = model.joint_log_likelihood(&o, &path)?;
    let data = episodeseq::hmm::observation_dataset(&o, &alphabet)?;
    let states: Vec<String> = path.iter().map(ToString::to_string).collect();
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", states.join(" "));
    let _ = writeln!(out, "log_likelihood: {ll:.12}");
    let _ = writeln!(
        out,
        "closed_form: {:.12}",
        model.closed_form_counts(&counts)
    );
    let _ = writeln!(out, "noise: {}", counts.noise);
    let _ = writeln!(out, "single: {}", counts.single);
    let _ = writeln!(out, "shared: {}", counts.shared);
    let _ = writeln!(out, "f_alpha: {}", count_no_general(&data, model.alpha()));
    let _ = writeln!(out, "f_beta: {}", count_no_general(&data, model.beta()));
    emit(args.output.as_deref(), &out)
}

pub(crate) fn hmm_compare(args: HmmCompareArgs) -> Result<()> {
    let (beta_model, alphabet) = build_model(&args.model)?;
    let gamma_args = ModelArgs {
        alpha: args.model.alpha.clone(),
        beta: args.gamma.clone(),
        alphabet_size: args.model.alphabet_size,
        eta: args.model.eta,
    };
    let (gamma_model, _) = build_model(&gamma_args)?;
    let o = read_observations(&args.input, &alphabet)?;
    let beta = PairStats::from_observation(&beta_model, &o, &alphabet)?;
    let gamma = PairStats::from_observation(&gamma_model, &o, &alphabet)?;
    let cmp = compare_pairs(&beta, &gamma, args.model.eta, args.model.alphabet_size)?;
    let preferred = match cmp.preferred {
        std::cmp::Ordering::Greater => "beta",
        std::cmp::Ordering::Less => "gamma",
        std::cmp::Ordering::Equal => "tie",
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "pair\tf_alpha\tf_other\toverlap\toverlap_score_1\toverlap_score_2"
    );
    for (name, s) in [("beta", &beta), ("gamma", &gamma)] {
        let _ = writeln!(
            out,
            "{name}\t{}\t{}\t{}\t{}\t{}",
            s.f_alpha,
            s.f_other,
            s.overlap,
            s.overlap_score_1(),
            s.overlap_score_2()
        );
    }
    let _ = writeln!(out, "log_ratio: {:.12}", cmp.log_ratio);
    let _ = writeln!(out, "preferred: {preferred}");
    emit(args.output.as_deref(), &out)
}

fn preprocess_options(args: &CorpusArgs) -> Result<PreprocessOptions> {
    let stopwords = match &args.stopwords {
        Some(path) => content_lines(&read(path)?).map(str::to_string).collect(),
        None => Default::default(),
    };
    Ok(PreprocessOptions {
        lowercase: !args.keep_case,
        min_len: args.min_len,
        stopwords,
    })
}

/// A corpus file, or split `split` of a directory tree.
fn load_corpus(path: &Path, split: &str, args: &CorpusArgs) -> Result<Corpus> {
    if path.is_dir() {
        Corpus::load_dir(path, split, &preprocess_options(args)?)
    } else {
        Corpus::parse(&read(path)?)
    }
}

pub(crate) fn dict(args: DictArgs) -> Result<()> {
    let train = load_corpus(&args.input, &args.split, &args.corpus)?;
    let mined = mine_dictionary(&train, args.max_gap, args.top_k)?;
    emit(args.output.as_deref(), &mined.dictionary.to_text())?;
    if !args.quiet {
        eprintln!(
            "dictionary-1: {} words  dictionary-2: {} words  episodes: {}",
            Dictionary::full(&train).len(),
            mined.dictionary.len(),
            mined.selection.len()
        );
    }
    Ok(())
}

pub(crate) fn classify(args: ClassifyArgs) -> Result<()> {
    let train = load_corpus(&args.train, "train", &args.corpus)?;
    let test = match &args.test {
        Some(path) => load_corpus(path, "test", &args.corpus)?,
        None if args.train.is_dir() => load_corpus(&args.train, "test", &args.corpus)?,
        None => {
            return Err(Error::Invalid(
                "--test is required when --train is a file".into(),
            ))
        }
    };
    let episodes = match &args.dictionary {
        Some(path) => Dictionary::parse(&read(path)?, DictionaryKind::Episodes)?,
        None => mine_dictionary(&train, args.max_gap, args.top_k)?.dictionary,
    };
    let mut out = String::from("dictionary,size,classifier,weighting,accuracy,macro_f\n");
    for dict in [Dictionary::full(&train), episodes] {
        let m = run_classify(&train, &test, &dict, args.weighting)?;
        let _ = writeln!(
            out,
            "{},{},naive-bayes,{},{:.6},{:.6}",
            dict.kind,
            dict.len(),
            args.weighting,
            m.accuracy,
            m.macro_f
        );
    }
    emit(args.output.as_deref(), &out)
}

pub(crate) fn synth(args: SynthArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    match args.kind {
        SynthKind::Planted => {
            let config = PlantedConfig {
                seed: args.seed.unwrap_or(PLANTED_SEED),
                ..PlantedConfig::default()
            };
            let planted = planted_corpus(&config);
            let episodes: String = planted.episodes.iter().map(|e| format!("{e}\n")).collect();
            write(&args.out_dir.join("planted.tsv"), &planted.corpus.to_text())?;
            write(&args.out_dir.join("planted_episodes.txt"), &episodes)?;
        }
        SynthKind::Review => {
            let review = review_corpus(
                REVIEW_TRAIN_PER_CLASS,
                REVIEW_TEST_PER_CLASS,
                args.seed.unwrap_or(REVIEW_SEED),
            );
            write(
                &args.out_dir.join("review_train.tsv"),
                &review.train.to_text(),
            )?;
            write(
                &args.out_dir.join("review_test.tsv"),
                &review.test.to_text(),
            )?;
        }
    }
    Ok(())
}
