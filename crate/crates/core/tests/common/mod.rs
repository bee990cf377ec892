//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use episodeseq::{Alphabet, Event, EventDataset, FixedIntervalEpisode, SymbolId, Time};
use proptest::prelude::*;

pub const SYMBOLS: usize = 5;
pub const MAX_TIME: Time = 15;

/// One or two sequences over `A..E`, at most `max_events` events in total,
/// times in `1..=15`. Several events may share a timestamp.
pub fn dataset(max_events: usize) -> impl Strategy<Value = EventDataset> {
    let seq = prop::collection::vec((1..=MAX_TIME, 0..SYMBOLS as u32), 0..=max_events / 2);
    prop::collection::vec(seq, 1..=2).prop_map(|seqs| {
        let sequences = seqs
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|(t, x)| Event::new(SymbolId(x), t))
                    .collect()
            })
            .collect();
        EventDataset::new(Alphabet::letters(SYMBOLS), sequences).expect("valid dataset")
    })
}

/// Injective fixed-interval episode with 1..=max_n nodes over `A..E`, gaps in `1..=3`.
pub fn episode(max_n: usize) -> impl Strategy<Value = FixedIntervalEpisode> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just((0..SYMBOLS as u32).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(1u32..=3, n - 1),
            )
        })
        .prop_map(|(symbols, gaps)| {
            let types = symbols[..gaps.len() + 1]
                .iter()
                .map(|&s| SymbolId(s))
                .collect();
            FixedIntervalEpisode::new(types, gaps).expect("valid episode")
        })
}

/// Start times at which every node of `ep` finds a matching event, by direct scan.
pub fn brute_starts(data: &EventDataset, ep: &FixedIntervalEpisode) -> Vec<(usize, Time)> {
    let offsets: Vec<Time> = ep.offsets().collect();
    let mut out = Vec::new();
    for (s, seq) in data.sequences().iter().enumerate() {
        for t in -MAX_TIME..=2 * MAX_TIME {
            let hit = ep
                .event_types()
                .iter()
                .zip(&offsets)
                .all(|(ty, off)| seq.iter().any(|e| e.event_type == *ty && e.time == t + off));
            if hit {
                out.push((s, t));
            }
        }
    }
    out
}

/// Largest subset of fixed-interval occurrences in which any two are
/// non-overlapped, by trying every subset.
pub fn brute_max_no(starts: &[(usize, Time)], span: Time) -> usize {
    assert!(
        starts.len() <= 20,
        "too many occurrences for subset enumeration"
    );
    let apart =
        |a: (usize, Time), b: (usize, Time)| a.0 != b.0 || a.1 + span < b.1 || b.1 + span < a.1;
    let mut best = 0;
    for mask in 0u32..(1 << starts.len()) {
        let picked: Vec<_> = (0..starts.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| starts[k])
            .collect();
        if picked.len() <= best {
            continue;
        }
        if picked
            .iter()
            .enumerate()
            .all(|(i, &a)| picked[i + 1..].iter().all(|&b| apart(a, b)))
        {
            best = picked.len();
        }
    }
    best
}

/// Maximum number of non-overlapped occurrences of a general serial episode
/// in one time-sorted sequence: enumerate every occurrence (event index
/// tuples with strictly increasing times), then take the longest chain in
/// which each occurrence starts after the previous one ends.
pub fn brute_no_general(seq: &[(SymbolId, Time)], episode: &[SymbolId]) -> usize {
    fn extend(
        seq: &[(SymbolId, Time)],
        episode: &[SymbolId],
        from: usize,
        last: Option<Time>,
        first: Option<Time>,
        out: &mut Vec<(Time, Time)>,
    ) {
        if episode.is_empty() {
            out.push((
                first.expect("non-empty episode"),
                last.expect("non-empty episode"),
            ));
            return;
        }
        for k in from..seq.len() {
            let (ty, t) = seq[k];
            if ty == episode[0] && last.is_none_or(|l| t > l) {
                extend(seq, &episode[1..], k + 1, Some(t), first.or(Some(t)), out);
            }
        }
    }
    if episode.is_empty() {
        return 0;
    }
    let mut occ = Vec::new();
    extend(seq, episode, 0, None, None, &mut occ);
    occ.sort();
    occ.dedup();
    // longest chain ordered by start time
    let mut chain = vec![1usize; occ.len()];
    for i in 0..occ.len() {
        for j in 0..i {
            if occ[j].1 < occ[i].0 {
                chain[i] = chain[i].max(chain[j] + 1);
            }
        }
    }
    chain.into_iter().max().unwrap_or(0)
}

pub fn as_pairs(seq: &[Event]) -> Vec<(SymbolId, Time)> {
    seq.iter().map(|e| (e.event_type, e.time)).collect()
}

/// A 2- or 3-node episode planted at 3..=8 random starts in one sequence of
/// length 60, plus up to 30 noise events.
pub fn planted(max_noise: usize) -> impl Strategy<Value = (EventDataset, FixedIntervalEpisode)> {
    (
        episode(3).prop_filter("multi-node", |e| e.len() >= 2),
        prop::collection::vec(1..=50 as Time, 3..=8),
        prop::collection::vec((1..=60 as Time, 0..SYMBOLS as u32), 0..=max_noise),
    )
        .prop_map(|(ep, starts, noise)| {
            let mut seq: Vec<Event> = noise
                .into_iter()
                .map(|(t, x)| Event::new(SymbolId(x), t))
                .collect();
            for t in starts {
                for (ty, off) in ep.event_types().iter().zip(ep.offsets()) {
                    seq.push(Event::new(*ty, t + off));
                }
            }
            let data =
                EventDataset::new(Alphabet::letters(SYMBOLS), vec![seq]).expect("valid dataset");
            (data, ep)
        })
}
