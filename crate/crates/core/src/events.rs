//! Event data, alphabets and episodes.
//!
//! An [`EventDataset`] holds one or more event sequences over a shared
//! [`Alphabet`]. Each sequence is kept sorted by time; events that share a
//! timestamp are ordered by symbol name so that any two datasets with the same
//! multiset of events have the same layout. This canonical order is what
//! makes an encode/decode round trip reproduce the exact event order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of a symbol (event type) inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Integer timestamp. One integer is one unit of storage in the coding scheme.
pub type Time = i64;

/// A finite, ordered set of distinct symbol names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, SymbolId>,
    // rank of each id when symbols are sorted by name
    rank: Vec<u32>,
}

fn check_symbol_name(name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::invalid("empty symbol name"));
    }
    if name
        .chars()
        .any(|c| c.is_whitespace() || c == ',' || c == ';' || c == '"')
    {
        return Err(Error::invalid(format!(
            "symbol name {name:?} contains whitespace or a reserved character"
        )));
    }
    Ok(())
}

impl Alphabet {
    /// Builds an alphabet keeping the given order as symbol ids.
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, name) in symbols.iter().enumerate() {
            check_symbol_name(name)?;
            if index.insert(name.clone(), SymbolId(i as u32)).is_some() {
                return Err(Error::invalid(format!("duplicate symbol {name:?}")));
            }
        }
        let mut order: Vec<usize> = (0..symbols.len()).collect();
        order.sort_by(|&a, &b| symbols[a].cmp(&symbols[b]));
        let mut rank = vec![0u32; symbols.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        Ok(Self {
            symbols,
            index,
            rank,
        })
    }

    /// Builds an alphabet from arbitrary names, deduplicated and sorted.
    pub fn sorted<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Self::new(set)
    }

    /// `A`, `B`, ... for small sizes; `s26`, `s27`, ... past the Latin letters.
    pub fn letters(size: usize) -> Self {
        let names = (0..size).map(|k| {
            if k < 26 {
                ((b'A' + k as u8) as char).to_string()
            } else {
                format!("s{k}")
            }
        });
        Self::new(names).expect("generated names are unique")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()]
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        id.index() < self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Position of `id` in name order.
    pub fn rank(&self, id: SymbolId) -> u32 {
        self.rank[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len() as u32).map(SymbolId)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub event_type: SymbolId,
    pub time: Time,
}

impl Event {
    pub fn new(event_type: SymbolId, time: Time) -> Self {
        Self { event_type, time }
    }
}

/// Timestamped event sequences over one alphabet.
///
/// Trailing empty sequences are dropped on construction; the text formats
/// cannot represent them.
#[derive(Debug, Clone)]
pub struct EventDataset {
    sequences: Vec<Vec<Event>>,
    alphabet: Alphabet,
}

impl EventDataset {
    pub fn new(alphabet: Alphabet, mut sequences: Vec<Vec<Event>>) -> Result<Self> {
        for (s, seq) in sequences.iter().enumerate() {
            if let Some(ev) = seq.iter().find(|ev| !alphabet.contains(ev.event_type)) {
                return Err(Error::invalid(format!(
                    "sequence {s}: event type id {} outside alphabet of size {}",
                    ev.event_type.0,
                    alphabet.len()
                )));
            }
        }
        for seq in &mut sequences {
            seq.sort_by_key(|ev| (ev.time, alphabet.rank(ev.event_type)));
        }
        while sequences.last().is_some_and(Vec::is_empty) {
            sequences.pop();
        }
        Ok(Self {
            sequences,
            alphabet,
        })
    }

    /// Builds a dataset from named events; the alphabet is the sorted set of names seen.
    pub fn from_named<S: AsRef<str>>(sequences: &[Vec<(Time, S)>]) -> Result<Self> {
        let alphabet = Alphabet::sorted(
            sequences
                .iter()
                .flatten()
                .map(|(_, name)| name.as_ref().to_string()),
        )?;
        let seqs = sequences
            .iter()
            .map(|seq| {
                seq.iter()
                    .map(|(t, name)| Event::new(alphabet.id(name.as_ref()).unwrap(), *t))
                    .collect()
            })
            .collect();
        Self::new(alphabet, seqs)
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self {
            sequences: Vec::new(),
            alphabet,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn sequences(&self) -> &[Vec<Event>] {
        &self.sequences
    }

    pub fn sequence(&self, index: usize) -> &[Event] {
        self.sequences.get(index).map_or(&[], Vec::as_slice)
    }

    pub fn num_sequences(&self) -> usize {
        self.sequences.len()
    }

    pub fn num_events(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_events() == 0
    }

    /// Symbols that occur at least once, in id order.
    pub fn symbols_present(&self) -> Vec<SymbolId> {
        let mut seen = vec![false; self.alphabet.len()];
        for ev in self.sequences.iter().flatten() {
            seen[ev.event_type.index()] = true;
        }
        self.alphabet.ids().filter(|id| seen[id.index()]).collect()
    }

    /// Keeps the events for which `keep(sequence, position)` is true.
    pub fn retain_positions(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let sequences = self
            .sequences
            .iter()
            .enumerate()
            .map(|(s, seq)| {
                seq.iter()
                    .enumerate()
                    .filter(|&(p, _)| keep(s, p))
                    .map(|(_, ev)| *ev)
                    .collect()
            })
            .collect();
        Self::new(self.alphabet.clone(), sequences).expect("subset of a valid dataset")
    }

    /// Parses the `<time>\t<event_type>` format; a blank line ends a sequence.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sequences: Vec<Vec<(Time, String)>> = Vec::new();
        let mut current = Vec::new();
        let mut saw_line = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            saw_line = true;
            if line.trim().is_empty() {
                sequences.push(std::mem::take(&mut current));
                continue;
            }
            let (time, name) = line.split_once('\t').ok_or_else(|| {
                Error::parse(format!(
                    "line {}: expected `<time>\\t<event_type>`",
                    lineno + 1
                ))
            })?;
            let time: Time = time.trim().parse().map_err(|_| {
                Error::parse(format!("line {}: bad timestamp {time:?}", lineno + 1))
            })?;
            let name = name.trim();
            check_symbol_name(name)
                .map_err(|e| Error::parse(format!("line {}: {e}", lineno + 1)))?;
            current.push((time, name.to_string()));
        }
        if !current.is_empty() || !saw_line {
            sequences.push(current);
        }
        Self::from_named(&sequences)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, seq) in self.sequences.iter().enumerate() {
            if s > 0 {
                out.push('\n');
            }
            for ev in seq {
                out.push_str(&format!(
                    "{}\t{}\n",
                    ev.time,
                    self.alphabet.name(ev.event_type)
                ));
            }
        }
        out
    }
}

/// Datasets are equal when they hold the same named events in the same layout;
/// symbol ids and unused alphabet entries do not matter.
impl PartialEq for EventDataset {
    fn eq(&self, other: &Self) -> bool {
        self.sequences.len() == other.sequences.len()
            && self.sequences.iter().zip(&other.sequences).all(|(a, b)| {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| {
                        x.time == y.time
                            && self.alphabet.name(x.event_type) == other.alphabet.name(y.event_type)
                    })
            })
    }
}

/// An injective serial episode with prescribed gaps between consecutive nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedIntervalEpisode {
    event_types: Vec<SymbolId>,
    gaps: Vec<u32>,
}

impl FixedIntervalEpisode {
    pub fn new(event_types: Vec<SymbolId>, gaps: Vec<u32>) -> Result<Self> {
        if event_types.is_empty() {
            return Err(Error::invalid("episode needs at least one node"));
        }
        if gaps.len() + 1 != event_types.len() {
            return Err(Error::invalid(format!(
                "{}-node episode needs {} gaps, got {}",
                event_types.len(),
                event_types.len() - 1,
                gaps.len()
            )));
        }
        if gaps.contains(&0) {
            return Err(Error::invalid("inter-event gaps must be at least 1"));
        }
        check_injective(&event_types)?;
        Ok(Self { event_types, gaps })
    }

    pub fn single(symbol: SymbolId) -> Self {
        Self {
            event_types: vec![symbol],
            gaps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.event_types.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn event_types(&self) -> &[SymbolId] {
        &self.event_types
    }

    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    /// Time from the first to the last node of any occurrence.
    pub fn span(&self) -> Time {
        self.gaps.iter().map(|&g| g as Time).sum()
    }

    /// Offset of each node from the start time: 0, Δ1, Δ1+Δ2, ...
    pub fn offsets(&self) -> impl Iterator<Item = Time> + '_ {
        std::iter::once(0).chain(self.gaps.iter().scan(0, |acc, &g| {
            *acc += g as Time;
            Some(*acc)
        }))
    }

    pub fn contains(&self, symbol: SymbolId) -> bool {
        self.event_types.contains(&symbol)
    }

    /// Appends `symbol` after a gap of `gap`. `None` if the symbol is already present.
    pub fn extended(&self, symbol: SymbolId, gap: u32) -> Option<Self> {
        if self.contains(symbol) || gap == 0 {
            return None;
        }
        let mut event_types = self.event_types.clone();
        event_types.push(symbol);
        let mut gaps = self.gaps.clone();
        gaps.push(gap);
        Some(Self { event_types, gaps })
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        text.parse::<EpisodeSpec>()?.resolve(alphabet)
    }

    pub fn to_spec(&self, alphabet: &Alphabet) -> EpisodeSpec {
        EpisodeSpec {
            symbols: self
                .event_types
                .iter()
                .map(|&id| alphabet.name(id).to_string())
                .collect(),
            gaps: self.gaps.clone(),
        }
    }

    /// Canonical episode string, e.g. `A -2-> B -1-> C`.
    pub fn format(&self, alphabet: &Alphabet) -> String {
        self.to_spec(alphabet).to_string()
    }
}

fn check_injective(event_types: &[SymbolId]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in event_types {
        if !seen.insert(*id) {
            return Err(Error::invalid(format!(
                "episode is not injective: symbol id {} repeats",
                id.0
            )));
        }
    }
    Ok(())
}

/// A fixed-interval episode written with symbol names, independent of any alphabet.
///
/// Grammar: `SYM (-<int>-> SYM)*`, tokens separated by whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpisodeSpec {
    pub symbols: Vec<String>,
    pub gaps: Vec<u32>,
}

impl EpisodeSpec {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<FixedIntervalEpisode> {
        let ids = self
            .symbols
            .iter()
            .map(|name| {
                alphabet
                    .id(name)
                    .ok_or_else(|| Error::invalid(format!("unknown symbol {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FixedIntervalEpisode::new(ids, self.gaps.clone())
    }
}

impl FromStr for EpisodeSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() || tokens.len().is_multiple_of(2) {
            return Err(Error::parse(format!(
                "episode {text:?} does not match `SYM (-<gap>-> SYM)*`"
            )));
        }
        let mut symbols = vec![tokens[0].to_string()];
        let mut gaps = Vec::new();
        for pair in tokens[1..].chunks(2) {
            let gap = pair[0]
                .strip_prefix('-')
                .and_then(|s| s.strip_suffix("->"))
                .ok_or_else(|| Error::parse(format!("expected `-<gap>->`, got {:?}", pair[0])))?;
            let gap: i64 = gap
                .parse()
                .map_err(|_| Error::parse(format!("bad gap {gap:?} in {text:?}")))?;
            if gap < 1 || gap > u32::MAX as i64 {
                return Err(Error::invalid(format!(
                    "gap {gap} out of range; gaps must be >= 1"
                )));
            }
            gaps.push(gap as u32);
            symbols.push(pair[1].to_string());
        }
        for name in &symbols {
            check_symbol_name(name)?;
        }
        let distinct: BTreeSet<&String> = symbols.iter().collect();
        if distinct.len() != symbols.len() {
            return Err(Error::invalid(format!("episode {text:?} is not injective")));
        }
        Ok(Self { symbols, gaps })
    }
}

impl fmt::Display for EpisodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbols[0])?;
        for (gap, sym) in self.gaps.iter().zip(&self.symbols[1..]) {
            write!(f, " -{gap}-> {sym}")?;
        }
        Ok(())
    }
}

/// An injective serial episode without timing constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SerialEpisode {
    event_types: Vec<SymbolId>,
}

impl SerialEpisode {
    pub fn new(event_types: Vec<SymbolId>) -> Result<Self> {
        if event_types.is_empty() {
            return Err(Error::invalid("episode needs at least one node"));
        }
        check_injective(&event_types)?;
        Ok(Self { event_types })
    }

    pub fn len(&self) -> usize {
        self.event_types.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn event_types(&self) -> &[SymbolId] {
        &self.event_types
    }

    /// `A -> B -> C` (also accepts plain whitespace separation: `A B C`).
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let ids = text
            .split_whitespace()
            .filter(|tok| *tok != "->")
            .map(|name| {
                alphabet
                    .id(name)
                    .ok_or_else(|| Error::invalid(format!("unknown symbol {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if ids.is_empty() {
            return Err(Error::parse(format!("empty serial episode {text:?}")));
        }
        Self::new(ids)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        self.event_types
            .iter()
            .map(|&id| alphabet.name(id))
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

impl From<&FixedIntervalEpisode> for SerialEpisode {
    fn from(ep: &FixedIntervalEpisode) -> Self {
        Self {
            event_types: ep.event_types.clone(),
        }
    }
}
