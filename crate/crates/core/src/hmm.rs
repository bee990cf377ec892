//! The episode-pair hidden Markov model.
//!
//! A model is built from two `N`-node serial episodes `α` and `β` over an
//! alphabet of `M` symbols and a single noise parameter `η`. It has `4N² + 1`
//! states:
//!
//! - `S1_{i,j}` emits `α[i]`, `S2_{i,j}` emits `β[j]` (delta emissions);
//!   `i` and `j` record how far the current occurrences of `α` and `β` have
//!   progressed.
//! - `N1_{i,j}`, `N2_{i,j}` and `N0` emit uniformly over the alphabet.
//!
//! Every state moves to a noise state with probability `η` and shares the
//! rest equally among the reachable episode states. When the next symbol
//! of `α` equals the next symbol of `β`, the episode state before it instead
//! moves with probability `1 − η` to a state that advances both counters, so
//! one emitted event belongs to an occurrence of both episodes. Such states
//! are called shared.
//!
//! States are numbered in a fixed canonical order: all `S1` states row-major
//! in `(i, j)`, then `S2`, `N1`, `N2`, and finally `N0`. Ties in Viterbi
//! decoding go to the lowest number.
//!
//! All probabilities of sequences are returned as natural logarithms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{Alphabet, Event, EventDataset, SerialEpisode, SymbolId};
use crate::occurrences::count_no_general;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKind {
    Ep1,
    Ep2,
    Noise1,
    Noise2,
    Noise0,
}

/// A state `S1_{i,j}`, `S2_{i,j}`, `N1_{i,j}`, `N2_{i,j}` or `N0`, with 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateId {
    pub kind: StateKind,
    pub i: usize,
    pub j: usize,
}

impl StateId {
    pub fn new(kind: StateKind, i: usize, j: usize) -> Self {
        match kind {
            StateKind::Noise0 => Self { kind, i: 1, j: 1 },
            _ => Self { kind, i, j },
        }
    }

    pub fn ep1(i: usize, j: usize) -> Self {
        Self::new(StateKind::Ep1, i, j)
    }

    pub fn ep2(i: usize, j: usize) -> Self {
        Self::new(StateKind::Ep2, i, j)
    }

    pub fn noise1(i: usize, j: usize) -> Self {
        Self::new(StateKind::Noise1, i, j)
    }

    pub fn noise2(i: usize, j: usize) -> Self {
        Self::new(StateKind::Noise2, i, j)
    }

    pub fn noise0() -> Self {
        Self::new(StateKind::Noise0, 1, 1)
    }

    pub fn is_episode(&self) -> bool {
        matches!(self.kind, StateKind::Ep1 | StateKind::Ep2)
    }

    pub fn is_noise(&self) -> bool {
        !self.is_episode()
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            StateKind::Ep1 => "S1",
            StateKind::Ep2 => "S2",
            StateKind::Noise1 => "N1",
            StateKind::Noise2 => "N2",
            StateKind::Noise0 => return f.write_str("N0"),
        };
        write!(f, "{prefix}_{{{},{}}}", self.i, self.j)
    }
}

impl FromStr for StateId {
    type Err = Error;

    /// Accepts the display form, e.g. `S1_{1,2}` or `N0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "N0" {
            return Ok(Self::noise0());
        }
        let bad = || Error::parse(format!("bad state name {s:?}"));
        let (prefix, rest) = s.split_once('_').ok_or_else(bad)?;
        let kind = match prefix {
            "S1" => StateKind::Ep1,
            "S2" => StateKind::Ep2,
            "N1" => StateKind::Noise1,
            "N2" => StateKind::Noise2,
            _ => return Err(bad()),
        };
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(bad)?;
        let (i, j) = inner.split_once(',').ok_or_else(bad)?;
        let i = i.trim().parse().map_err(|_| bad())?;
        let j = j.trim().parse().map_err(|_| bad())?;
        Ok(Self::new(kind, i, j))
    }
}

/// How a transition enters its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    /// Into a noise state, probability `η`.
    Noise,
    /// Into an episode state, probability `(1 − η)/2`.
    Single,
    /// Into an episode state that emits a shared event, probability `1 − η`.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub to: usize,
    pub prob: f64,
    pub edge: Edge,
}

/// The model `Λ_{αβ}`.
#[derive(Debug, Clone)]
pub struct EpisodePairModel {
    alpha: SerialEpisode,
    beta: SerialEpisode,
    n: usize,
    m: usize,
    eta: f64,
    initial: Vec<Transition>,
    transitions: Vec<Vec<Transition>>,
}

/// `M / (M + 8)`, the exclusive upper bound on `η`.
pub fn eta_bound(m: usize) -> f64 {
    m as f64 / (m as f64 + 8.0)
}

impl EpisodePairModel {
    pub fn new(alpha: SerialEpisode, beta: SerialEpisode, m: usize, eta: f64) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n {
            return Err(Error::invalid(format!(
                "episodes must have the same positive length (got {} and {})",
                alpha.len(),
                beta.len()
            )));
        }
        if m == 0 {
            return Err(Error::invalid("alphabet size must be positive"));
        }
        if let Some(s) = alpha
            .event_types()
            .iter()
            .chain(beta.event_types())
            .find(|s| s.index() >= m)
        {
            return Err(Error::invalid(format!(
                "episode symbol id {} outside alphabet of size {m}",
                s.0
            )));
        }
        if !(eta > 0.0 && eta < eta_bound(m)) {
            return Err(Error::invalid(format!(
                "noise parameter {eta} must lie in (0, {m}/{})",
                m + 8
            )));
        }
        let mut model = Self {
            alpha,
            beta,
            n,
            m,
            eta,
            initial: Vec::new(),
            transitions: Vec::new(),
        };
        model.initial = model.build_initial();
        model.transitions = (0..model.num_states())
            .map(|k| model.build_row(model.state(k)))
            .collect();
        Ok(model)
    }

    pub fn alpha(&self) -> &SerialEpisode {
        &self.alpha
    }

    pub fn beta(&self) -> &SerialEpisode {
        &self.beta
    }

    /// Episode length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Alphabet size `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn num_states(&self) -> usize {
        4 * self.n * self.n + 1
    }

    /// Canonical number of a state.
    pub fn index(&self, s: StateId) -> usize {
        let nn = self.n * self.n;
        let cell = (s.i - 1) * self.n + (s.j - 1);
        match s.kind {
            StateKind::Ep1 => cell,
            StateKind::Ep2 => nn + cell,
            StateKind::Noise1 => 2 * nn + cell,
            StateKind::Noise2 => 3 * nn + cell,
            StateKind::Noise0 => 4 * nn,
        }
    }

    pub fn state(&self, index: usize) -> StateId {
        let nn = self.n * self.n;
        if index == 4 * nn {
            return StateId::noise0();
        }
        let kind = match index / nn {
            0 => StateKind::Ep1,
            1 => StateKind::Ep2,
            2 => StateKind::Noise1,
            _ => StateKind::Noise2,
        };
        let cell = index % nn;
        StateId::new(kind, cell / self.n + 1, cell % self.n + 1)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).map(|k| self.state(k))
    }

    /// Checks that `s` names a state of this model.
    pub fn contains(&self, s: StateId) -> bool {
        (1..=self.n).contains(&s.i) && (1..=self.n).contains(&s.j)
    }

    pub fn initial(&self) -> &[Transition] {
        &self.initial
    }

    /// Outgoing transitions of state `from` (canonical number).
    pub fn transitions(&self, from: usize) -> &[Transition] {
        &self.transitions[from]
    }

    pub fn transition_prob(&self, from: StateId, to: StateId) -> f64 {
        let to = self.index(to);
        self.transitions[self.index(from)]
            .iter()
            .find(|t| t.to == to)
            .map_or(0.0, |t| t.prob)
    }

    pub fn initial_prob(&self, s: StateId) -> f64 {
        let k = self.index(s);
        self.initial
            .iter()
            .find(|t| t.to == k)
            .map_or(0.0, |t| t.prob)
    }

    /// The symbol an episode state emits; `None` for noise states.
    pub fn emitted_symbol(&self, s: StateId) -> Option<SymbolId> {
        match s.kind {
            StateKind::Ep1 => Some(self.alpha.event_types()[s.i - 1]),
            StateKind::Ep2 => Some(self.beta.event_types()[s.j - 1]),
            _ => None,
        }
    }

    pub fn emission_prob(&self, s: StateId, symbol: SymbolId) -> f64 {
        match self.emitted_symbol(s) {
            Some(x) => f64::from(u8::from(x == symbol)),
            None if symbol.index() < self.m => 1.0 / self.m as f64,
            None => 0.0,
        }
    }

    /// Full emission distribution of a state over the `M` symbols.
    pub fn emission_distribution(&self, s: StateId) -> Vec<f64> {
        (0..self.m)
            .map(|k| self.emission_prob(s, SymbolId(k as u32)))
            .collect()
    }

    /// Whether the exit of `S1_{i,j}` is the shared variant: `α[i+1] = β[j]`.
    pub fn is_shared_exit(&self, s: StateId) -> bool {
        let a = &self.alpha.event_types();
        let b = &self.beta.event_types();
        match s.kind {
            StateKind::Ep1 => a[self.next(s.i) - 1] == b[s.j - 1],
            StateKind::Ep2 => a[s.i - 1] == b[self.next(s.j) - 1],
            _ => false,
        }
    }

    fn next(&self, k: usize) -> usize {
        k % self.n + 1
    }

    fn build_initial(&self) -> Vec<Transition> {
        let eta = self.eta;
        let noise = Transition {
            to: self.index(StateId::noise0()),
            prob: eta,
            edge: Edge::Noise,
        };
        if self.alpha.event_types()[0] == self.beta.event_types()[0] {
            vec![
                Transition {
                    to: self.index(StateId::ep1(1, self.next(1))),
                    prob: 1.0 - eta,
                    edge: Edge::Shared,
                },
                noise,
            ]
        } else {
            vec![
                self.single(StateId::ep1(1, 1)),
                self.single(StateId::ep2(1, 1)),
                noise,
            ]
        }
    }

    fn single(&self, to: StateId) -> Transition {
        Transition {
            to: self.index(to),
            prob: (1.0 - self.eta) / 2.0,
            edge: Edge::Single,
        }
    }

    fn noise(&self, to: StateId) -> Transition {
        Transition {
            to: self.index(to),
            prob: self.eta,
            edge: Edge::Noise,
        }
    }

    fn build_row(&self, s: StateId) -> Vec<Transition> {
        let (i, j) = (s.i, s.j);
        let shared = |to: StateId| Transition {
            to: self.index(to),
            prob: 1.0 - self.eta,
            edge: Edge::Shared,
        };
        match s.kind {
            // S1_{i,j} with α[i+1] = β[j]: the next α event is also the next β event.
            StateKind::Ep1 if self.is_shared_exit(s) => {
                vec![
                    shared(StateId::ep1(self.next(i), self.next(j))),
                    self.noise(StateId::noise1(i, j)),
                ]
            }
            StateKind::Ep2 if self.is_shared_exit(s) => {
                vec![
                    shared(StateId::ep2(self.next(i), self.next(j))),
                    self.noise(StateId::noise2(i, j)),
                ]
            }
            StateKind::Ep1 | StateKind::Noise1 => vec![
                self.single(StateId::ep1(self.next(i), j)),
                self.single(StateId::ep2(self.next(i), j)),
                self.noise(StateId::noise1(i, j)),
            ],
            StateKind::Ep2 | StateKind::Noise2 => vec![
                self.single(StateId::ep1(i, self.next(j))),
                self.single(StateId::ep2(i, self.next(j))),
                self.noise(StateId::noise2(i, j)),
            ],
            StateKind::Noise0 => vec![
                self.single(StateId::ep1(1, 1)),
                self.single(StateId::ep2(1, 1)),
                self.noise(StateId::noise0()),
            ],
        }
    }

    /// Samples `length` steps with a generator seeded by `seed`.
    pub fn simulate(&self, length: usize, seed: u64) -> Result<Trajectory> {
        if length == 0 {
            return Err(Error::invalid("trajectory length must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states: Vec<usize> = Vec::with_capacity(length);
        let mut symbols = Vec::with_capacity(length);
        let mut edges = Vec::with_capacity(length);
        let mut step = pick(&self.initial, &mut rng);
        for t in 0..length {
            if t > 0 {
                step = pick(&self.transitions[*states.last().unwrap()], &mut rng);
            }
            let s = self.state(step.to);
            let symbol = match self.emitted_symbol(s) {
                Some(x) => x,
                None => SymbolId(rng.gen_range(0..self.m as u32)),
            };
            states.push(step.to);
            symbols.push(symbol);
            edges.push(step.edge);
        }
        Ok(Trajectory {
            states: states.into_iter().map(|k| self.state(k)).collect(),
            symbols,
            edges,
        })
    }

    /// `ln P(o, q)`: initial probability, emissions and transitions along `q`.
    /// Returns `-inf` when any factor is zero.
    pub fn joint_log_likelihood(&self, o: &[SymbolId], q: &[StateId]) -> Result<f64> {
        if o.len() != q.len() {
            return Err(Error::invalid(format!(
                "{} symbols but {} states",
                o.len(),
                q.len()
            )));
        }
        if let Some(bad) = q.iter().find(|s| !self.contains(**s)) {
            return Err(Error::invalid(format!(
                "state {bad} not in a model with N = {}",
                self.n
            )));
        }
        let mut ll = 0.0;
        for (t, (&s, &x)) in q.iter().zip(o).enumerate() {
            let p = if t == 0 {
                self.initial_prob(s)
            } else {
                self.transition_prob(q[t - 1], s)
            };
            ll += p.ln() + self.emission_prob(s, x).ln();
        }
        Ok(ll)
    }

    /// `ln[(η/M)^{q_n} ((1−η)/2)^{q_e}]`.
    pub fn closed_form_case1(&self, noise: usize, episode: usize) -> f64 {
        let eta = self.eta;
        noise as f64 * (eta / self.m as f64).ln() + episode as f64 * ((1.0 - eta) / 2.0).ln()
    }

    /// `ln[(η/M)^{q_n} ((1−η)/2)^{q_1} (1−η)^{q_2}]`.
    pub fn closed_form_counts(&self, counts: &StateCounts) -> f64 {
        let eta = self.eta;
        self.closed_form_case1(counts.noise, counts.single)
            + counts.shared as f64 * (1.0 - eta).ln()
    }

    /// `ln[(η/M)^T ((1−η)M/(2η))^{N f_a + N f_b} ((1−η)M/(4η))^{−O}]`.
    pub fn closed_form_case2(
        &self,
        f_a: usize,
        f_b: usize,
        overlap: usize,
        length: usize,
    ) -> Result<f64> {
        let covered = self.n * (f_a + f_b);
        if 2 * overlap > covered || covered - overlap > length {
            return Err(Error::invalid(format!(
                "inconsistent counts: N = {}, f_a = {f_a}, f_b = {f_b}, O = {overlap}, T = {length}",
                self.n
            )));
        }
        let (eta, m) = (self.eta, self.m as f64);
        Ok(
            length as f64 * (eta / m).ln() + covered as f64 * ((1.0 - eta) * m / (2.0 * eta)).ln()
                - overlap as f64 * ((1.0 - eta) * m / (4.0 * eta)).ln(),
        )
    }

    /// Most likely state sequence for `o` (max-product in log space).
    pub fn viterbi(&self, o: &[SymbolId]) -> Result<Vec<StateId>> {
        if o.is_empty() {
            return Err(Error::invalid(
                "cannot decode an empty observation sequence",
            ));
        }
        if let Some(x) = o.iter().find(|x| x.index() >= self.m) {
            return Err(Error::invalid(format!(
                "symbol id {} outside alphabet of size {}",
                x.0, self.m
            )));
        }
        let s = self.num_states();
        let states: Vec<StateId> = self.states().collect();
        let log_emit = |k: usize, x: SymbolId| self.emission_prob(states[k], x).ln();

        let mut score = vec![f64::NEG_INFINITY; s];
        for t in &self.initial {
            score[t.to] = t.prob.ln() + log_emit(t.to, o[0]);
        }
        let mut back: Vec<Vec<u32>> = Vec::with_capacity(o.len());
        back.push(vec![0; s]);
        let mut next = vec![f64::NEG_INFINITY; s];
        let mut from = vec![u32::MAX; s];
        for &x in &o[1..] {
            next.fill(f64::NEG_INFINITY);
            from.fill(u32::MAX);
            for (k, row) in self.transitions.iter().enumerate() {
                if score[k] == f64::NEG_INFINITY {
                    continue;
                }
                for t in row {
                    let v = score[k] + t.prob.ln();
                    if v > next[t.to] || from[t.to] == u32::MAX {
                        next[t.to] = v;
                        from[t.to] = k as u32;
                    }
                }
            }
            for (k, v) in next.iter_mut().enumerate() {
                *v += log_emit(k, x);
            }
            std::mem::swap(&mut score, &mut next);
            back.push(from.clone());
        }
        let mut best = 0;
        for k in 1..s {
            if score[k] > score[best] {
                best = k;
            }
        }
        if score[best] == f64::NEG_INFINITY {
            return Err(Error::Integrity(
                "no state sequence has positive probability".into(),
            ));
        }
        let mut path = vec![best; o.len()];
        for t in (1..o.len()).rev() {
            path[t - 1] = back[t][path[t]] as usize;
        }
        Ok(path.into_iter().map(|k| states[k]).collect())
    }

    /// Splits a state sequence into noise, unshared episode and shared
    /// episode steps by the kind of transition used to enter each state.
    /// Fails if `q` has a zero-probability step.
    pub fn counts_of_path(&self, q: &[StateId]) -> Result<StateCounts> {
        let mut edges = Vec::with_capacity(q.len());
        for (t, &s) in q.iter().enumerate() {
            let k = self.index(s);
            let row = if t == 0 {
                &self.initial
            } else {
                &self.transitions[self.index(q[t - 1])]
            };
            let step = row
                .iter()
                .find(|tr| tr.to == k)
                .ok_or_else(|| Error::invalid(format!("step {t} into {s} has zero probability")))?;
            edges.push(step.edge);
        }
        Ok(StateCounts::tally(q, &edges))
    }

    /// JSON description: states, initial distribution, sparse transitions and emissions.
    pub fn to_json(&self, alphabet: &Alphabet) -> String {
        #[derive(Serialize)]
        struct Entry {
            from: String,
            to: String,
            p: f64,
            edge: Edge,
        }
        #[derive(Serialize)]
        struct Init {
            state: String,
            p: f64,
        }
        #[derive(Serialize)]
        struct Emission {
            state: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            symbol: Option<String>,
            uniform: bool,
        }
        #[derive(Serialize)]
        struct Dump {
            n: usize,
            m: usize,
            eta: f64,
            alpha: Vec<String>,
            beta: Vec<String>,
            states: Vec<String>,
            initial: Vec<Init>,
            transitions: Vec<Entry>,
            emissions: Vec<Emission>,
        }
        let name = |k: usize| self.state(k).to_string();
        let dump = Dump {
            n: self.n,
            m: self.m,
            eta: self.eta,
            alpha: self
                .alpha
                .event_types()
                .iter()
                .map(|&s| alphabet.name(s).to_string())
                .collect(),
            beta: self
                .beta
                .event_types()
                .iter()
                .map(|&s| alphabet.name(s).to_string())
                .collect(),
            states: (0..self.num_states()).map(name).collect(),
            initial: self
                .initial
                .iter()
                .map(|t| Init {
                    state: name(t.to),
                    p: t.prob,
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .enumerate()
                .flat_map(|(k, row)| {
                    row.iter().map(move |t| Entry {
                        from: name(k),
                        to: name(t.to),
                        p: t.prob,
                        edge: t.edge,
                    })
                })
                .collect(),
            emissions: self
                .states()
                .map(|s| Emission {
                    state: s.to_string(),
                    symbol: self.emitted_symbol(s).map(|x| alphabet.name(x).to_string()),
                    uniform: s.is_noise(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("model dump serializes")
    }
}

fn pick(row: &[Transition], rng: &mut ChaCha8Rng) -> Transition {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for t in row {
        acc += t.prob;
        if u < acc {
            return *t;
        }
    }
    *row.last().expect("transition rows are non-empty")
}

/// Decomposition of a state sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StateCounts {
    /// `|q_n|`: steps in noise states.
    pub noise: usize,
    /// `|q_1|`: episode steps entered with probability `(1 − η)/2`.
    pub single: usize,
    /// `|q_2|`: episode steps entered with probability `1 − η` (shared events).
    pub shared: usize,
    /// Events emitted as a node of `α` (shared events count for both episodes).
    pub alpha_nodes: usize,
    /// Events emitted as a node of `β`.
    pub beta_nodes: usize,
}

impl StateCounts {
    fn tally(q: &[StateId], edges: &[Edge]) -> Self {
        let mut c = Self::default();
        for (s, e) in q.iter().zip(edges) {
            match (s.kind, e) {
                (_, Edge::Noise) => c.noise += 1,
                (StateKind::Ep1, Edge::Single) => {
                    c.single += 1;
                    c.alpha_nodes += 1;
                }
                (StateKind::Ep2, Edge::Single) => {
                    c.single += 1;
                    c.beta_nodes += 1;
                }
                (_, Edge::Shared) => {
                    c.shared += 1;
                    c.alpha_nodes += 1;
                    c.beta_nodes += 1;
                }
                _ => unreachable!("noise states are only entered through noise edges"),
            }
        }
        c
    }

    /// `|q_e| = |q_1| + |q_2|`.
    pub fn episode(&self) -> usize {
        self.single + self.shared
    }

    pub fn len(&self) -> usize {
        self.noise + self.episode()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Completed occurrences of `α` and `β`, ignoring a trailing partial one.
    pub fn complete_occurrences(&self, n: usize) -> (usize, usize) {
        (self.alpha_nodes / n, self.beta_nodes / n)
    }
}

/// A sampled run of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<StateId>,
    pub symbols: Vec<SymbolId>,
    /// How each state was entered, recorded at generation time.
    pub edges: Vec<Edge>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn counts(&self) -> StateCounts {
        StateCounts::tally(&self.states, &self.edges)
    }

    /// Counts over the first `len` steps.
    pub fn prefix_counts(&self, len: usize) -> StateCounts {
        StateCounts::tally(&self.states[..len], &self.edges[..len])
    }

    /// Length of the longest prefix in which every started occurrence of
    /// `α` and of `β` is complete.
    pub fn complete_prefix_len(&self, n: usize) -> usize {
        let mut best = 0;
        let (mut a, mut b) = (0usize, 0usize);
        for (t, (s, e)) in self.states.iter().zip(&self.edges).enumerate() {
            match (s.kind, e) {
                (_, Edge::Noise) => {}
                (StateKind::Ep1, Edge::Single) => a += 1,
                (StateKind::Ep2, Edge::Single) => b += 1,
                _ => {
                    a += 1;
                    b += 1;
                }
            }
            if a % n == 0 && b % n == 0 {
                best = t + 1;
            }
        }
        best
    }

    /// The emitted symbols as a one-sequence dataset with times `1..=T`.
    pub fn to_dataset(&self, alphabet: &Alphabet) -> Result<EventDataset> {
        observation_dataset(&self.symbols, alphabet)
    }

    /// Two aligned lines: state names, then emitted symbols.
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        let mut top = String::new();
        let mut bottom = String::new();
        for (k, (s, x)) in self.states.iter().zip(&self.symbols).enumerate() {
            let a = s.to_string();
            let b = alphabet.name(*x);
            let width = a.len().max(b.len());
            if k > 0 {
                top.push(' ');
                bottom.push(' ');
            }
            top.push_str(&format!("{a:<width$}"));
            bottom.push_str(&format!("{b:<width$}"));
        }
        format!("{}\n{}\n", top.trim_end(), bottom.trim_end())
    }
}

/// One-sequence dataset with the symbols at times `1..=T`.
pub fn observation_dataset(symbols: &[SymbolId], alphabet: &Alphabet) -> Result<EventDataset> {
    let seq = symbols
        .iter()
        .enumerate()
        .map(|(t, &x)| Event::new(x, t as i64 + 1))
        .collect();
    EventDataset::new(alphabet.clone(), vec![seq])
}

/// Statistics of one episode pair `(α, β)` along a most likely state sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairStats {
    pub n: usize,
    /// `f*_α`.
    pub f_alpha: usize,
    /// `f*` of the second episode.
    pub f_other: usize,
    /// `O*`: events shared between occurrences of the two episodes.
    pub overlap: usize,
}

impl PairStats {
    pub fn new(n: usize, f_alpha: usize, f_other: usize, overlap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("episode length must be positive"));
        }
        if overlap > n * f_alpha.min(f_other) {
            return Err(Error::invalid(format!(
                "overlap {overlap} exceeds N·min(f) = {}",
                n * f_alpha.min(f_other)
            )));
        }
        Ok(Self {
            n,
            f_alpha,
            f_other,
            overlap,
        })
    }

    /// Statistics of `model` on observation `o`: Viterbi path, non-overlapped
    /// frequencies counted on `o`, shared events read off the path.
    pub fn from_observation(
        model: &EpisodePairModel,
        o: &[SymbolId],
        alphabet: &Alphabet,
    ) -> Result<Self> {
        let path = model.viterbi(o)?;
        let counts = model.counts_of_path(&path)?;
        let data = observation_dataset(o, alphabet)?;
        let f_alpha = count_no_general(&data, model.alpha());
        let f_other = count_no_general(&data, model.beta());
        Ok(Self {
            n: model.n(),
            f_alpha,
            f_other,
            overlap: counts.shared,
        })
    }

    pub fn overlap_score_1(&self) -> i64 {
        overlap_score_1(self.n, self.f_other, self.overlap)
    }

    pub fn overlap_score_2(&self) -> f64 {
        overlap_score_2(self.n, self.f_other, self.overlap)
    }
}

/// `N·f* − O*`.
pub fn overlap_score_1(n: usize, f_star: usize, o_star: usize) -> i64 {
    (n * f_star) as i64 - o_star as i64
}

/// `N·f* − O*/2`.
pub fn overlap_score_2(n: usize, f_star: usize, o_star: usize) -> f64 {
    (n * f_star) as f64 - o_star as f64 / 2.0
}

/// Outcome of comparing the pair models `Λ_{αβ}` and `Λ_{αγ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairComparison {
    /// `ln[P(o, q*|Λ_{αβ}) / P(o, q*|Λ_{αγ})]`.
    pub log_ratio: f64,
    /// `Greater` when `β` is preferred, `Less` when `γ` is, `Equal` on a tie.
    #[serde(skip)]
    pub preferred: Ordering,
}

/// Log likelihood ratio of the two pair models from their statistics:
/// `N(f*_β − f*_γ)·ln((1−η)M/(2η)) + (O*_{αγ} − O*_{αβ})·ln((1−η)M/(4η))`.
pub fn compare_pairs(
    beta: &PairStats,
    gamma: &PairStats,
    eta: f64,
    m: usize,
) -> Result<PairComparison> {
    if beta.n != gamma.n {
        return Err(Error::invalid(format!(
            "episode lengths differ: {} and {}",
            beta.n, gamma.n
        )));
    }
    if beta.f_alpha != gamma.f_alpha {
        return Err(Error::invalid(
            "both pairs must share the same first episode",
        ));
    }
    if !(eta > 0.0 && eta < eta_bound(m)) {
        return Err(Error::invalid(format!(
            "noise parameter {eta} out of range for M = {m}"
        )));
    }
    let mf = m as f64;
    let df = beta.n as i64 * (beta.f_other as i64 - gamma.f_other as i64);
    let dov = gamma.overlap as i64 - beta.overlap as i64;
    let log_ratio = df as f64 * ((1.0 - eta) * mf / (2.0 * eta)).ln()
        + dov as f64 * ((1.0 - eta) * mf / (4.0 * eta)).ln();
    let preferred = if df == 0 && dov == 0 {
        Ordering::Equal
    } else {
        log_ratio.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    };
    Ok(PairComparison {
        log_ratio,
        preferred,
    })
}
