//! MDL coding of event data with fixed-interval episodes.
//!
//! A dataset is encoded as a table of rows `(size, episode, frequency,
//! starts)`. Selected multi-node episodes code for the events of their
//! occurrences and 1-node rows pick up whatever is left, so the table always
//! reproduces the data exactly. Every integer written costs one unit, which
//! makes a row with an `N`-node episode and `f` starts cost `2N + 1 + f`.
//!
//! [`select`] is the greedy selector: each round regenerates candidates on
//! the events not yet explained, then repeatedly adds the candidate with the
//! highest positive overlap-score.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::generate_candidates;
use crate::error::{Error, Result};
use crate::events::{
    Alphabet, EpisodeSpec, Event, EventDataset, FixedIntervalEpisode, SymbolId, Time,
};
use crate::occurrences::{
    cover, occurrences, overlap_count, CoverSet, FrequencyMode, OccurrenceList,
};

/// Coding gain of an `n`-node episode with frequency `f` over coding its
/// events with 1-node rows: `f·n − (2n + 1 + f)`.
pub fn score(n: usize, f: usize) -> i64 {
    (f * n) as i64 - row_cost(n, f) as i64
}

/// Units taken by one table row.
pub fn row_cost(n: usize, f: usize) -> usize {
    2 * n + 1 + f
}

/// Score of `ep` on `data` minus the events it shares with each episode in `selected`.
pub fn overlap_score(
    data: &EventDataset,
    ep: &FixedIntervalEpisode,
    selected: &[FixedIntervalEpisode],
    mode: FrequencyMode,
) -> i64 {
    let occ = occurrences(data, ep, mode);
    let own = cover(data, &occ).expect("occurrences found in the same data");
    let shared: usize = selected
        .iter()
        .map(|beta| {
            let other = cover(data, &occurrences(data, beta, mode))
                .expect("occurrences found in the same data");
            overlap_count(&own, &other)
        })
        .sum();
    score(ep.len(), occ.frequency()) - shared as i64
}

/// An episode chosen by the selector together with the occurrences it codes for.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedEpisode {
    pub episode: FixedIntervalEpisode,
    pub occurrences: OccurrenceList,
    /// Outer round (0-based) in which the episode was picked.
    pub round: usize,
    /// Overlap-score at the moment of selection.
    pub overlap_score: i64,
}

/// Result of a selection run: the chosen episodes in selection order and the
/// events left for 1-node rows.
#[derive(Debug, Clone)]
pub struct Selection {
    pub mode: FrequencyMode,
    pub episodes: Vec<SelectedEpisode>,
    /// Events not covered by any selected occurrence when the run stopped.
    pub residual: EventDataset,
    pub rounds: usize,
}

impl Selection {
    /// Uses `episodes` as the selection without running the selector.
    /// Occurrences are taken from the full data under `mode`.
    pub fn forced(
        data: &EventDataset,
        episodes: &[FixedIntervalEpisode],
        mode: FrequencyMode,
    ) -> Result<Self> {
        let mut chosen: Vec<SelectedEpisode> = Vec::new();
        let mut covers: Vec<CoverSet> = Vec::new();
        for ep in episodes {
            if ep.len() < 2 {
                return Err(Error::invalid(format!(
                    "forced episode {} has a single node; 1-node rows are added automatically",
                    ep.format(data.alphabet())
                )));
            }
            if chosen.iter().any(|s| &s.episode == ep) {
                return Err(Error::invalid(format!(
                    "episode {} listed twice",
                    ep.format(data.alphabet())
                )));
            }
            let occ = occurrences(data, ep, mode);
            let own = cover(data, &occ)?;
            let shared: usize = covers.iter().map(|c| overlap_count(&own, c)).sum();
            chosen.push(SelectedEpisode {
                episode: ep.clone(),
                overlap_score: score(ep.len(), occ.frequency()) - shared as i64,
                occurrences: occ,
                round: 0,
            });
            covers.push(own);
        }
        let mut covered = vec![Vec::new(); data.num_sequences()];
        for c in &covers {
            for &(s, p) in c.positions() {
                covered[s as usize].push(p as usize);
            }
        }
        let covered: Vec<BTreeSet<usize>> = covered.into_iter().map(BTreeSet::from_iter).collect();
        let residual = data.retain_positions(|s, p| !covered[s].contains(&p));
        Ok(Self {
            mode,
            episodes: chosen,
            residual,
            rounds: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn episode_list(&self) -> Vec<FixedIntervalEpisode> {
        self.episodes.iter().map(|s| s.episode.clone()).collect()
    }
}

/// Parameters of [`select`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectConfig {
    /// Largest gap between consecutive episode events.
    pub max_gap: u32,
    /// Upper bound on the number of selected episodes; `None` runs until no
    /// candidate improves the encoding.
    pub top_k: Option<usize>,
    pub mode: FrequencyMode,
}

impl SelectConfig {
    pub fn new(max_gap: u32, top_k: Option<usize>, mode: FrequencyMode) -> Self {
        Self {
            max_gap,
            top_k,
            mode,
        }
    }
}

struct Pool {
    candidates: Vec<(FixedIntervalEpisode, OccurrenceList, String)>,
    // overlap-score of each candidate given the episodes picked this round
    scores: Vec<i64>,
    // candidates covering each global event position
    covering: Vec<Vec<u32>>,
    covers: Vec<Vec<u32>>,
    taken: Vec<bool>,
}

impl Pool {
    fn best(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.candidates.len() {
            if self.taken[i] || self.candidates[i].0.len() < 2 {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) if self.better(i, b) => Some(i),
                keep => keep,
            };
        }
        best
    }

    /// Higher overlap-score, then higher frequency, then more nodes, then the
    /// lexicographically smaller episode string.
    fn better(&self, i: usize, j: usize) -> bool {
        let key = |k: usize| {
            (
                self.scores[k],
                self.candidates[k].1.frequency(),
                self.candidates[k].0.len(),
            )
        };
        match key(i).cmp(&key(j)) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.candidates[i].2 < self.candidates[j].2,
        }
    }

    fn take(&mut self, chosen: usize) {
        self.taken[chosen] = true;
        for &pos in &self.covers[chosen] {
            for &c in &self.covering[pos as usize] {
                self.scores[c as usize] -= 1;
            }
        }
    }
}

fn position_offsets(data: &EventDataset) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(data.num_sequences() + 1);
    let mut acc = 0;
    offsets.push(0);
    for seq in data.sequences() {
        acc += seq.len();
        offsets.push(acc);
    }
    offsets
}

/// Greedy selection of a small episode set that compresses `data`.
pub fn select(data: &EventDataset, config: SelectConfig) -> Result<Selection> {
    if config.top_k == Some(0) {
        return Err(Error::invalid("the episode budget K must be at least 1"));
    }
    let limit = config.top_k.unwrap_or(usize::MAX);
    let mut chosen: Vec<SelectedEpisode> = Vec::new();
    let mut residual = data.clone();
    let mut rounds = 0;

    while chosen.len() < limit {
        let set = generate_candidates(&residual, config.max_gap, config.mode)?;
        let alphabet = residual.alphabet();
        let offsets = position_offsets(&residual);
        let candidates: Vec<(FixedIntervalEpisode, OccurrenceList, String)> = set
            .candidates
            .into_iter()
            .filter(|c| c.episode.len() >= 2 && c.score > 0)
            .filter(|c| !chosen.iter().any(|s| s.episode == c.episode))
            .map(|c| {
                let name = c.episode.format(alphabet);
                (c.episode, c.occurrences, name)
            })
            .collect();
        let covers: Vec<Vec<u32>> = candidates
            .par_iter()
            .map(|(_, occ, _)| {
                let c =
                    cover(&residual, occ).expect("candidate occurrences come from the same data");
                c.positions()
                    .iter()
                    .map(|&(s, p)| (offsets[s as usize] + p as usize) as u32)
                    .collect()
            })
            .collect();
        let mut covering: Vec<Vec<u32>> = vec![Vec::new(); residual.num_events()];
        for (i, c) in covers.iter().enumerate() {
            for &pos in c {
                covering[pos as usize].push(i as u32);
            }
        }
        let scores = candidates
            .iter()
            .map(|(ep, occ, _)| score(ep.len(), occ.frequency()))
            .collect();
        let mut pool = Pool {
            taken: vec![false; candidates.len()],
            candidates,
            scores,
            covering,
            covers,
        };

        let mut picked: Vec<usize> = Vec::new();
        while chosen.len() + picked.len() < limit {
            let Some(best) = pool.best() else { break };
            if pool.scores[best] <= 0 {
                break;
            }
            picked.push(best);
            let overlap = pool.scores[best];
            pool.take(best);
            let (ep, occ, _) = &pool.candidates[best];
            chosen.push(SelectedEpisode {
                episode: ep.clone(),
                occurrences: occ.clone(),
                round: rounds,
                overlap_score: overlap,
            });
        }
        rounds += 1;
        if picked.is_empty() {
            break;
        }
        let mut removed = vec![false; residual.num_events()];
        for &i in &picked {
            for &pos in &pool.covers[i] {
                removed[pos as usize] = true;
            }
        }
        residual = residual.retain_positions(|s, p| !removed[offsets[s] + p]);
    }

    Ok(Selection {
        mode: config.mode,
        episodes: chosen,
        residual,
        rounds,
    })
}

/// One row of an [`EncodingTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub episode: FixedIntervalEpisode,
    /// `(sequence, start)` pairs, sorted. 1-node rows repeat a start once per
    /// duplicate event they stand for.
    pub starts: Vec<(usize, Time)>,
}

impl TableRow {
    pub fn size(&self) -> usize {
        self.episode.len()
    }

    pub fn frequency(&self) -> usize {
        self.starts.len()
    }

    /// Rows for multi-node episodes come from the selection; 1-node rows code
    /// the leftover events.
    pub fn is_selected(&self) -> bool {
        self.episode.len() >= 2
    }

    pub fn cost(&self) -> usize {
        row_cost(self.size(), self.frequency())
    }
}

/// Lossless encoding of a dataset: selected rows first, in selection order,
/// then 1-node rows in alphabet order.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTable {
    pub alphabet: Alphabet,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    size: usize,
    episode: String,
    freq: usize,
    starts: String,
}

impl EncodingTable {
    pub fn total_length(&self) -> usize {
        total_length(self)
    }

    /// CSV with header `size,episode,freq,starts`; starts are `seq:time`
    /// pairs separated by `;`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        for row in &self.rows {
            let mut starts = String::new();
            for (k, (s, t)) in row.starts.iter().enumerate() {
                if k > 0 {
                    starts.push(';');
                }
                write!(starts, "{s}:{t}").expect("writing to a String");
            }
            writer.serialize(CsvRow {
                size: row.size(),
                episode: row.episode.format(&self.alphabet),
                freq: row.frequency(),
                starts,
            })?;
        }
        if self.rows.is_empty() {
            writer.write_record(["size", "episode", "freq", "starts"])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Reads the CSV written by [`EncodingTable::write_csv`]. The alphabet is
    /// the sorted set of symbols named in the table.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["size", "episode", "freq", "starts"] {
            return Err(Error::parse(
                "table header must be `size,episode,freq,starts`",
            ));
        }
        let mut raw = Vec::new();
        for (k, record) in reader.deserialize::<CsvRow>().enumerate() {
            let line = k + 2;
            let row = record?;
            let spec: EpisodeSpec = row
                .episode
                .parse()
                .map_err(|e| Error::parse(format!("line {line}: {e}")))?;
            if spec.symbols.len() != row.size {
                return Err(Error::parse(format!(
                    "line {line}: size {} does not match a {}-node episode",
                    row.size,
                    spec.symbols.len()
                )));
            }
            let starts =
                parse_starts(&row.starts).map_err(|e| Error::parse(format!("line {line}: {e}")))?;
            if starts.len() != row.freq {
                return Err(Error::parse(format!(
                    "line {line}: frequency {} but {} starts listed",
                    row.freq,
                    starts.len()
                )));
            }
            let sorted = if spec.symbols.len() >= 2 {
                starts.windows(2).all(|w| w[0] < w[1])
            } else {
                starts.windows(2).all(|w| w[0] <= w[1])
            };
            if !sorted {
                return Err(Error::parse(format!("line {line}: starts out of order")));
            }
            raw.push((spec, starts));
        }
        let alphabet = Alphabet::sorted(
            raw.iter()
                .flat_map(|(spec, _)| spec.symbols.iter().cloned()),
        )?;
        let rows = raw
            .into_iter()
            .map(|(spec, starts)| {
                Ok(TableRow {
                    episode: spec.resolve(&alphabet)?,
                    starts,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alphabet, rows })
    }
}

fn parse_starts(text: &str) -> std::result::Result<Vec<(usize, Time)>, String> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|pair| {
            let (s, t) = pair
                .split_once(':')
                .ok_or_else(|| format!("start {pair:?} is not `seq:time`"))?;
            let s = s.parse().map_err(|_| format!("bad sequence index {s:?}"))?;
            let t = t.parse().map_err(|_| format!("bad start time {t:?}"))?;
            Ok((s, t))
        })
        .collect()
}

type Key = (usize, Time, SymbolId);

fn expand(row: &TableRow) -> impl Iterator<Item = Key> + '_ {
    row.starts.iter().flat_map(move |&(s, t)| {
        row.episode
            .event_types()
            .iter()
            .zip(row.episode.offsets())
            .map(move |(&ty, off)| (s, t + off, ty))
    })
}

/// Builds the table for `selection` over `data`. Events covered by a
/// selected occurrence are coded there; every other event gets a 1-node row.
pub fn encode(data: &EventDataset, selection: &Selection) -> Result<EncodingTable> {
    let mut rows = Vec::new();
    let mut covered: BTreeSet<Key> = BTreeSet::new();
    for chosen in &selection.episodes {
        chosen.occurrences.verify(data)?;
        let row = TableRow {
            episode: chosen.episode.clone(),
            starts: chosen.occurrences.entries().to_vec(),
        };
        covered.extend(expand(&row));
        rows.push(row);
    }

    let mut multiplicity: BTreeMap<Key, usize> = BTreeMap::new();
    for (s, seq) in data.sequences().iter().enumerate() {
        for ev in seq {
            *multiplicity.entry((s, ev.time, ev.event_type)).or_default() += 1;
        }
    }
    let alphabet = data.alphabet();
    let mut leftover: HashMap<SymbolId, Vec<(usize, Time)>> = HashMap::new();
    for (&(s, t, ty), &m) in &multiplicity {
        let keep = m - usize::from(covered.contains(&(s, t, ty)));
        let list = leftover.entry(ty).or_default();
        list.extend(std::iter::repeat_n((s, t), keep));
    }
    let mut symbols: Vec<SymbolId> = leftover.keys().copied().collect();
    symbols.sort_by_key(|&id| alphabet.name(id).to_string());
    for ty in symbols {
        let starts = leftover.remove(&ty).unwrap_or_default();
        if !starts.is_empty() {
            rows.push(TableRow {
                episode: FixedIntervalEpisode::single(ty),
                starts,
            });
        }
    }
    Ok(EncodingTable {
        alphabet: alphabet.clone(),
        rows,
    })
}

/// Σ over rows of `2N + 1 + f`.
pub fn total_length(table: &EncodingTable) -> usize {
    table.rows.iter().map(TableRow::cost).sum()
}

/// Rebuilds the dataset. Events coded by several selected rows are emitted
/// once; 1-node rows add one event per listed start.
pub fn decode(table: &EncodingTable) -> Result<EventDataset> {
    for row in &table.rows {
        if let Some(ty) = row
            .episode
            .event_types()
            .iter()
            .find(|ty| !table.alphabet.contains(**ty))
        {
            return Err(Error::parse(format!(
                "row references unknown symbol id {}",
                ty.0
            )));
        }
    }
    let mut shared: BTreeSet<Key> = BTreeSet::new();
    let mut events: Vec<Key> = Vec::new();
    for row in &table.rows {
        if row.is_selected() {
            shared.extend(expand(row));
        } else {
            events.extend(expand(row));
        }
    }
    events.extend(shared);
    let num_sequences = events.iter().map(|&(s, _, _)| s + 1).max().unwrap_or(0);
    let mut sequences = vec![Vec::new(); num_sequences];
    for (s, t, ty) in events {
        sequences[s].push(Event::new(ty, t));
    }
    EventDataset::new(table.alphabet.clone(), sequences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sequence_one, table_one_episodes};

    #[test]
    fn score_examples() {
        assert_eq!(score(3, 2), -3);
        assert_eq!(score(3, 5), 3);
        for f in 0..10 {
            assert_eq!(score(1, f), -3);
        }
    }

    #[test]
    fn overlap_score_examples() {
        let d = sequence_one();
        let eps = table_one_episodes(&d);
        assert_eq!(
            overlap_score(&d, &eps[1], &eps[..1], FrequencyMode::Distinct),
            -4
        );
        assert_eq!(overlap_score(&d, &eps[1], &[], FrequencyMode::Distinct), -3);
        assert_eq!(
            overlap_score(&d, &eps[0], &eps[..1], FrequencyMode::Distinct),
            -3 - 6
        );
    }

    #[test]
    fn table_one() {
        let d = sequence_one();
        let sel = Selection::forced(&d, &table_one_episodes(&d), FrequencyMode::Distinct).unwrap();
        let table = encode(&d, &sel).unwrap();
        assert_eq!(
            table.to_csv(),
            "size,episode,freq,starts\n\
             3,A -2-> B -1-> C,2,0:2;0:4\n\
             3,D -2-> E -2-> C,2,0:1;0:5\n\
             2,A -1-> B,1,0:7\n\
             1,C,2,0:3;0:8\n"
        );
        assert_eq!(total_length(&table), 29);
        assert_eq!(decode(&table).unwrap(), d);
    }

    #[test]
    fn table_one_non_overlapped() {
        let d = sequence_one();
        let sel =
            Selection::forced(&d, &table_one_episodes(&d), FrequencyMode::NonOverlapped).unwrap();
        let table = encode(&d, &sel).unwrap();
        assert_eq!(table.rows[0].starts, [(0, 2)]);
        assert_eq!(decode(&table).unwrap(), d);
    }

    #[test]
    fn empty_selection_gives_singletons() {
        let d = sequence_one();
        let sel = Selection::forced(&d, &[], FrequencyMode::NonOverlapped).unwrap();
        let table = encode(&d, &sel).unwrap();
        assert_eq!(table.rows.len(), 5);
        assert!(table.rows.iter().all(|r| r.size() == 1));
        assert_eq!(total_length(&table), 5 * 3 + 15);
    }

    #[test]
    fn small_lengths() {
        let d = EventDataset::from_named(&[vec![(4, "C")]]).unwrap();
        let table = encode(
            &d,
            &Selection::forced(&d, &[], FrequencyMode::Distinct).unwrap(),
        )
        .unwrap();
        assert_eq!(total_length(&table), 4);
        let empty = EncodingTable {
            alphabet: Alphabet::letters(1),
            rows: vec![],
        };
        assert_eq!(total_length(&empty), 0);
        assert!(decode(&empty).unwrap().is_empty());
    }

    #[test]
    fn decode_single_row() {
        let table = EncodingTable::parse_csv("size,episode,freq,starts\n1,C,2,0:3;0:8\n").unwrap();
        let d = decode(&table).unwrap();
        assert_eq!(d.to_text(), "3\tC\n8\tC\n");
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let d = sequence_one();
        let sel = Selection::forced(&d, &table_one_episodes(&d), FrequencyMode::Distinct).unwrap();
        let text = encode(&d, &sel).unwrap().to_csv();
        assert_eq!(EncodingTable::parse_csv(&text).unwrap().to_csv(), text);
    }

    #[test]
    fn malformed_tables_rejected() {
        for bad in [
            "size,episode,freq,starts\n2,C,1,0:3\n",
            "size,episode,freq,starts\n1,C,2,0:3\n",
            "size,episode,freq,starts\n1,C,1,0-3\n",
            "size,episode,freq,starts\n2,A -0-> B,1,0:3\n",
            "size,episode,freq,starts\n2,A -1-> B,2,0:5;0:3\n",
            "a,b,c,d\n",
        ] {
            assert!(EncodingTable::parse_csv(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn duplicates_survive_round_trip() {
        let d = EventDataset::from_named(&[
            vec![
                (1, "A"),
                (1, "A"),
                (2, "B"),
                (3, "A"),
                (4, "B"),
                (5, "A"),
                (6, "B"),
                (6, "B"),
            ],
            vec![],
            vec![(1, "B")],
        ])
        .unwrap();
        let ab = FixedIntervalEpisode::parse("A -1-> B", d.alphabet()).unwrap();
        let sel = Selection::forced(&d, &[ab], FrequencyMode::Distinct).unwrap();
        let table = encode(&d, &sel).unwrap();
        assert_eq!(decode(&table).unwrap(), d);
        let reparsed = EncodingTable::parse_csv(&table.to_csv()).unwrap();
        assert_eq!(decode(&reparsed).unwrap(), d);
    }

    #[test]
    fn selects_repeated_block() {
        let names = ["A", "B", "C"];
        let seq: Vec<(i64, &str)> = (0..15).map(|i| (i as i64 + 1, names[i % 3])).collect();
        let d = EventDataset::from_named(&[seq]).unwrap();
        let sel = select(
            &d,
            SelectConfig::new(2, Some(10), FrequencyMode::NonOverlapped),
        )
        .unwrap();
        let names: Vec<String> = sel
            .episodes
            .iter()
            .map(|s| s.episode.format(d.alphabet()))
            .collect();
        assert_eq!(names, ["A -1-> B -1-> C"]);
        let table = encode(&d, &sel).unwrap();
        assert_eq!(total_length(&table), 12);
        assert_eq!(decode(&table).unwrap(), d);
    }

    #[test]
    fn empty_data_selects_nothing() {
        let d = EventDataset::empty(Alphabet::letters(2));
        let sel = select(&d, SelectConfig::new(3, None, FrequencyMode::NonOverlapped)).unwrap();
        assert!(sel.is_empty());
    }

    #[test]
    fn zero_budget_rejected() {
        let d = sequence_one();
        assert!(select(
            &d,
            SelectConfig::new(3, Some(0), FrequencyMode::NonOverlapped)
        )
        .is_err());
    }

    #[test]
    fn forced_singleton_rejected() {
        let d = sequence_one();
        let c = FixedIntervalEpisode::parse("C", d.alphabet()).unwrap();
        assert!(Selection::forced(&d, &[c], FrequencyMode::Distinct).is_err());
    }
}
