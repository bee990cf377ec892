//! Depth-first enumeration of the fixed-interval episode lattice.
//!
//! Every symbol present in the data roots a search tree. A node is extended
//! by appending a symbol it does not yet contain, after any gap in
//! `1..=max_gap`; the child's distinct starts are the parent's starts at
//! which that symbol shows up at the required offset. A node is not extended
//! when its frequency is at most 2 (no descendant can then have a positive
//! score) or when it already uses every symbol present.
//!
//! Along each root-to-leaf path the best-scoring episode is emitted, so the
//! candidate set holds one episode per path, deduplicated.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::{Alphabet, EventDataset, FixedIntervalEpisode, SymbolId, Time};
use crate::mdl::score;
use crate::occurrences::{no_count, no_filter, FrequencyMode, OccurrenceList};

#[derive(Debug, Clone)]
pub struct Candidate {
    pub episode: FixedIntervalEpisode,
    /// Occurrences under the active frequency mode.
    pub occurrences: OccurrenceList,
    pub frequency: usize,
    pub score: i64,
}

#[derive(Debug, Clone)]
pub struct CandidateSet {
    /// Sorted by canonical episode string.
    pub candidates: Vec<Candidate>,
    pub max_gap: u32,
    pub mode: FrequencyMode,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn get(&self, episode: &FixedIntervalEpisode) -> Option<&Candidate> {
        self.candidates.iter().find(|c| &c.episode == episode)
    }

    /// `<episode>\t<f>\t<score>` lines.
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        self.candidates
            .iter()
            .map(|c| {
                format!(
                    "{}\t{}\t{}\n",
                    c.episode.format(alphabet),
                    c.frequency,
                    c.score
                )
            })
            .collect()
    }
}

struct Node {
    episode: FixedIntervalEpisode,
    // distinct starts, sorted (sequence, time)
    starts: Vec<(usize, Time)>,
    frequency: usize,
    score: i64,
}

impl Node {
    fn new(episode: FixedIntervalEpisode, starts: Vec<(usize, Time)>, mode: FrequencyMode) -> Self {
        let frequency = match mode {
            FrequencyMode::Distinct => starts.len(),
            FrequencyMode::NonOverlapped => no_count(&starts, episode.span()),
        };
        let score = score(episode.len(), frequency);
        Self {
            episode,
            starts,
            frequency,
            score,
        }
    }
}

struct Search<'a> {
    data: &'a EventDataset,
    max_gap: u32,
    mode: FrequencyMode,
    symbols_present: usize,
}

impl Search<'_> {
    /// Higher score, then more nodes, then the smaller canonical string.
    fn prefer(&self, a: &Node, b: &Node) -> Ordering {
        a.score
            .cmp(&b.score)
            .then(a.episode.len().cmp(&b.episode.len()))
            .then_with(|| {
                let alphabet = self.data.alphabet();
                b.episode.format(alphabet).cmp(&a.episode.format(alphabet))
            })
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let span = node.episode.span();
        let mut joined: BTreeMap<(u32, SymbolId), Vec<(usize, Time)>> = BTreeMap::new();
        for &(s, t) in &node.starts {
            let seq = self.data.sequence(s);
            let end = t + span;
            let lo = seq.partition_point(|e| e.time <= end);
            for ev in seq[lo..]
                .iter()
                .take_while(|e| e.time <= end + self.max_gap as Time)
            {
                if node.episode.contains(ev.event_type) {
                    continue;
                }
                let gap = (ev.time - end) as u32;
                let list = joined.entry((gap, ev.event_type)).or_default();
                if list.last() != Some(&(s, t)) {
                    list.push((s, t));
                }
            }
        }
        joined
            .into_iter()
            .map(|((gap, symbol), starts)| {
                let episode = node
                    .episode
                    .extended(symbol, gap)
                    .expect("symbol absent and gap positive");
                Node::new(episode, starts, self.mode)
            })
            .collect()
    }

    fn explore<'n>(
        &self,
        node: &'n Node,
        best: &'n Node,
        out: &mut BTreeMap<FixedIntervalEpisode, Candidate>,
    ) {
        let best = if self.prefer(node, best) == Ordering::Greater {
            node
        } else {
            best
        };
        let extendable = node.frequency > 2 && node.episode.len() < self.symbols_present;
        let children = if extendable {
            self.children(node)
        } else {
            Vec::new()
        };
        if children.is_empty() {
            if !out.contains_key(&best.episode) {
                out.insert(best.episode.clone(), self.to_candidate(best));
            }
            return;
        }
        for child in &children {
            self.explore(child, best, out);
        }
    }

    fn to_candidate(&self, node: &Node) -> Candidate {
        let entries = match self.mode {
            FrequencyMode::Distinct => node.starts.clone(),
            FrequencyMode::NonOverlapped => no_filter(&node.starts, node.episode.span()),
        };
        Candidate {
            episode: node.episode.clone(),
            occurrences: OccurrenceList::from_entries(node.episode.clone(), entries),
            frequency: node.frequency,
            score: node.score,
        }
    }
}

/// Runs the depth-first search from every 1-node episode and collects the
/// best episode of each path.
pub fn generate_candidates(
    data: &EventDataset,
    max_gap: u32,
    mode: FrequencyMode,
) -> Result<CandidateSet> {
    if max_gap == 0 {
        return Err(Error::invalid("maximum inter-event gap must be at least 1"));
    }
    let present = data.symbols_present();
    let mut roots: BTreeMap<SymbolId, Vec<(usize, Time)>> = BTreeMap::new();
    for (s, seq) in data.sequences().iter().enumerate() {
        for ev in seq {
            let list = roots.entry(ev.event_type).or_default();
            if list.last() != Some(&(s, ev.time)) {
                list.push((s, ev.time));
            }
        }
    }
    let search = Search {
        data,
        max_gap,
        mode,
        symbols_present: present.len(),
    };
    let found: Vec<BTreeMap<FixedIntervalEpisode, Candidate>> = roots
        .into_par_iter()
        .map(|(symbol, starts)| {
            let root = Node::new(FixedIntervalEpisode::single(symbol), starts, mode);
            let mut out = BTreeMap::new();
            search.explore(&root, &root, &mut out);
            out
        })
        .collect();

    let mut merged: BTreeMap<FixedIntervalEpisode, Candidate> = BTreeMap::new();
    for part in found {
        for (ep, cand) in part {
            merged.entry(ep).or_insert(cand);
        }
    }
    let alphabet = data.alphabet();
    let mut candidates: Vec<(String, Candidate)> = merged
        .into_values()
        .map(|c| (c.episode.format(alphabet), c))
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CandidateSet {
        candidates: candidates.into_iter().map(|(_, c)| c).collect(),
        max_gap,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sequence_one;
    use crate::occurrences::{find_distinct_starts, occurrences};

    #[test]
    fn sequence_one_prefix_stops_at_frequency_two() {
        let d = sequence_one();
        let abc = FixedIntervalEpisode::parse("A -2-> B -1-> C", d.alphabet()).unwrap();
        assert_eq!(find_distinct_starts(&d, &abc).frequency(), 2);
        assert_eq!(score(3, 2), -3);

        // A -2-> B already has f = 2, so its branch is not explored further
        // and the path emits the 2-node prefix.
        let set = generate_candidates(&d, 2, FrequencyMode::Distinct).unwrap();
        assert!(set.get(&abc).is_none());
        let ab = FixedIntervalEpisode::parse("A -2-> B", d.alphabet()).unwrap();
        let cand = set.get(&ab).expect("A -2-> B is a candidate");
        assert_eq!(cand.frequency, 2);
        assert_eq!(cand.score, -3);
    }

    #[test]
    fn empty_data_gives_no_candidates() {
        let d = EventDataset::empty(crate::events::Alphabet::letters(3));
        assert!(generate_candidates(&d, 3, FrequencyMode::NonOverlapped)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn repeated_single_symbol_only_yields_singletons() {
        let d =
            EventDataset::from_named(&[(1..=20).map(|t| (t, "A")).collect::<Vec<_>>()]).unwrap();
        let set = generate_candidates(&d, 3, FrequencyMode::NonOverlapped).unwrap();
        assert!(set.candidates.iter().all(|c| c.episode.len() == 1));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn zero_gap_bound_rejected() {
        assert!(generate_candidates(&sequence_one(), 0, FrequencyMode::Distinct).is_err());
    }

    #[test]
    fn candidates_verify_against_recount() {
        let d = sequence_one();
        for mode in [FrequencyMode::Distinct, FrequencyMode::NonOverlapped] {
            let set = generate_candidates(&d, 3, mode).unwrap();
            for c in &set.candidates {
                c.occurrences.verify(&d).unwrap();
                assert_eq!(c.occurrences, occurrences(&d, &c.episode, mode));
                assert_eq!(c.frequency, c.occurrences.frequency());
                assert_eq!(c.score, score(c.episode.len(), c.frequency));
            }
        }
    }

    #[test]
    fn repeated_block_yields_full_episode() {
        let names = ["A", "B", "C"];
        let seq: Vec<(i64, &str)> = (0..15).map(|i| (i as i64 + 1, names[i % 3])).collect();
        let d = EventDataset::from_named(&[seq]).unwrap();
        let set = generate_candidates(&d, 2, FrequencyMode::NonOverlapped).unwrap();
        let abc = FixedIntervalEpisode::parse("A -1-> B -1-> C", d.alphabet()).unwrap();
        let cand = set.get(&abc).unwrap();
        assert_eq!(cand.frequency, 5);
        assert_eq!(cand.score, 3);
        assert_eq!(find_distinct_starts(&d, &abc).frequency(), 5);
    }
}
