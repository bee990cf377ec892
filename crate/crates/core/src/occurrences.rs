//! Occurrence detection and counting.
//!
//! For an injective fixed-interval episode an occurrence is pinned down by
//! its start time, so occurrence lists are just per-sequence start times.
//! Non-overlapped occurrences are extracted from the distinct ones with a
//! single greedy pass (`find_no_occurrences`), and events covered by
//! occurrences are bound to concrete positions so that overlaps between
//! episodes can be counted.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::events::{
    Alphabet, Event, EventDataset, FixedIntervalEpisode, SerialEpisode, SymbolId, Time,
};

/// Which occurrences count toward an episode's frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FrequencyMode {
    /// All distinct occurrences (every valid start time).
    Distinct,
    /// A maximal set of non-overlapped occurrences.
    #[default]
    NonOverlapped,
}

impl FromStr for FrequencyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct" => Ok(Self::Distinct),
            "non-overlapped" | "no" => Ok(Self::NonOverlapped),
            other => Err(Error::parse(format!("unknown frequency mode {other:?}"))),
        }
    }
}

impl fmt::Display for FrequencyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Distinct => "distinct",
            Self::NonOverlapped => "non-overlapped",
        })
    }
}

/// Start times of occurrences of one episode, kept as `(sequence, start)`
/// pairs sorted by sequence then time, strictly increasing within a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceList {
    episode: FixedIntervalEpisode,
    entries: Vec<(usize, Time)>,
}

impl OccurrenceList {
    /// Builds a list from per-sequence start lists. Validates ordering only;
    /// use [`OccurrenceList::verify`] to check against data.
    pub fn new(episode: FixedIntervalEpisode, starts: Vec<Vec<Time>>) -> Result<Self> {
        let mut entries = Vec::new();
        for (s, list) in starts.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "sequence {s}: occurrence starts must be strictly increasing"
                )));
            }
            entries.extend(list.iter().map(|&t| (s, t)));
        }
        Ok(Self { episode, entries })
    }

    pub(crate) fn from_entries(episode: FixedIntervalEpisode, entries: Vec<(usize, Time)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] < w[1]));
        Self { episode, entries }
    }

    pub fn episode(&self) -> &FixedIntervalEpisode {
        &self.episode
    }

    pub fn frequency(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(sequence, start)` pairs in sequence-then-time order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Time)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(usize, Time)] {
        &self.entries
    }

    /// Start times inside one sequence.
    pub fn starts_in(&self, seq: usize) -> Vec<Time> {
        let lo = self.entries.partition_point(|&(s, _)| s < seq);
        self.entries[lo..]
            .iter()
            .take_while(|&&(s, _)| s == seq)
            .map(|&(_, t)| t)
            .collect()
    }

    /// Checks that every start is a real occurrence in `data`.
    pub fn verify(&self, data: &EventDataset) -> Result<()> {
        for (s, t) in self.iter() {
            let seq = data.sequence(s);
            for (ty, off) in self
                .episode
                .event_types()
                .iter()
                .zip(self.episode.offsets())
            {
                if find_event(seq, t + off, *ty).is_none() {
                    return Err(Error::Integrity(format!(
                        "sequence {s}: no event of type {} at time {}",
                        ty.0,
                        t + off
                    )));
                }
            }
        }
        Ok(())
    }

    /// Debug dump, one `<episode>\t<seq>\t<start>` line per occurrence.
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        let name = self.episode.format(alphabet);
        self.iter()
            .map(|(s, t)| format!("{name}\t{s}\t{t}\n"))
            .collect()
    }
}

/// Lowest position in `seq` holding an event of type `ty` at time `time`.
pub fn find_event(seq: &[Event], time: Time, ty: SymbolId) -> Option<usize> {
    let first = seq.partition_point(|e| e.time < time);
    seq[first..]
        .iter()
        .take_while(|e| e.time == time)
        .position(|e| e.event_type == ty)
        .map(|p| first + p)
}

/// All start times (per sequence) at which `ep` occurs.
pub fn find_distinct_starts(data: &EventDataset, ep: &FixedIntervalEpisode) -> OccurrenceList {
    let offsets: Vec<Time> = ep.offsets().collect();
    let first = ep.event_types()[0];
    let mut entries: Vec<(usize, Time)> = Vec::new();
    for (s, seq) in data.sequences().iter().enumerate() {
        for ev in seq.iter().filter(|e| e.event_type == first) {
            if entries.last() == Some(&(s, ev.time)) {
                continue;
            }
            let all = ep.event_types()[1..]
                .iter()
                .zip(&offsets[1..])
                .all(|(ty, off)| find_event(seq, ev.time + off, *ty).is_some());
            if all {
                entries.push((s, ev.time));
            }
        }
    }
    OccurrenceList::from_entries(ep.clone(), entries)
}

/// Greedy extraction of a maximal set of non-overlapped occurrences.
///
/// Keeps the first start, then every start strictly after the last kept
/// start plus the episode span. Runs independently in each sequence.
pub fn find_no_occurrences(occ: &OccurrenceList) -> OccurrenceList {
    OccurrenceList::from_entries(
        occ.episode.clone(),
        no_filter(&occ.entries, occ.episode.span()),
    )
}

pub(crate) fn no_filter(entries: &[(usize, Time)], span: Time) -> Vec<(usize, Time)> {
    let mut kept: Vec<(usize, Time)> = Vec::new();
    for &(s, t) in entries {
        match kept.last() {
            Some(&(ls, lt)) if ls == s && t <= lt + span => {}
            _ => kept.push((s, t)),
        }
    }
    kept
}

pub(crate) fn no_count(entries: &[(usize, Time)], span: Time) -> usize {
    let mut count = 0;
    let mut last: Option<(usize, Time)> = None;
    for &(s, t) in entries {
        match last {
            Some((ls, lt)) if ls == s && t <= lt + span => {}
            _ => {
                count += 1;
                last = Some((s, t));
            }
        }
    }
    count
}

/// Occurrences of `ep` counted under `mode`.
pub fn occurrences(
    data: &EventDataset,
    ep: &FixedIntervalEpisode,
    mode: FrequencyMode,
) -> OccurrenceList {
    let distinct = find_distinct_starts(data, ep);
    apply_mode(distinct, mode)
}

pub(crate) fn apply_mode(distinct: OccurrenceList, mode: FrequencyMode) -> OccurrenceList {
    match mode {
        FrequencyMode::Distinct => distinct,
        FrequencyMode::NonOverlapped => find_no_occurrences(&distinct),
    }
}

/// Maximum number of non-overlapped occurrences of a general serial episode.
pub fn count_no_general(data: &EventDataset, ep: &SerialEpisode) -> usize {
    data.sequences()
        .iter()
        .map(|seq| count_no_in(seq.iter().map(|e| (e.event_type, e.time)), ep.event_types()))
        .sum()
}

/// Single left-to-right scan over time-sorted `(type, time)` pairs.
///
/// The automaton waits for the next episode node; consecutive nodes need
/// strictly increasing times, and after a completed occurrence the next one
/// must start strictly after it ended. Completing each occurrence as early as
/// possible maximises the count.
pub fn count_no_in<I>(events: I, episode: &[SymbolId]) -> usize
where
    I: IntoIterator<Item = (SymbolId, Time)>,
{
    if episode.is_empty() {
        return 0;
    }
    let mut next = 0;
    let mut count = 0;
    let mut last: Option<Time> = None;
    for (ty, t) in events {
        if ty == episode[next] && last.is_none_or(|l| t > l) {
            last = Some(t);
            next += 1;
            if next == episode.len() {
                count += 1;
                next = 0;
            }
        }
    }
    count
}

/// Event positions `(sequence, position)` covered by a set of occurrences, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverSet {
    positions: Vec<(u32, u32)>,
}

impl CoverSet {
    pub fn positions(&self) -> &[(u32, u32)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, seq: usize, pos: usize) -> bool {
        self.positions
            .binary_search(&(seq as u32, pos as u32))
            .is_ok()
    }
}

/// Binds every node of every listed occurrence to the lowest-index matching event.
pub fn cover(data: &EventDataset, occ: &OccurrenceList) -> Result<CoverSet> {
    let ep = occ.episode();
    let mut positions = Vec::with_capacity(occ.frequency() * ep.len());
    for (s, t) in occ.iter() {
        let seq = data.sequence(s);
        for (ty, off) in ep.event_types().iter().zip(ep.offsets()) {
            let pos = find_event(seq, t + off, *ty).ok_or_else(|| {
                Error::Integrity(format!(
                    "occurrence start {t} in sequence {s} has no event of type {} at time {}",
                    ty.0,
                    t + off
                ))
            })?;
            positions.push((s as u32, pos as u32));
        }
    }
    positions.sort_unstable();
    positions.dedup();
    Ok(CoverSet { positions })
}

/// OM: number of events covered by both sets.
pub fn overlap_count(a: &CoverSet, b: &CoverSet) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    let (x, y) = (&a.positions, &b.positions);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
