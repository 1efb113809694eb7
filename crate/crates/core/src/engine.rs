//! Synchronous round-based message passing.
//!
//! A [`NodeProgram`] is stepped once per round at every node that has not yet
//! produced output. Messages sent in round `r` are visible in round `r + 1`.
//! Round 1 starts with empty inboxes. A node stops being stepped once it
//! returns an output, but whatever it sent in that final round is still
//! delivered. The run ends after the round in which the last node finishes.
//!
//! Every message is metered in the canonical encoding: a length-prefixed
//! sequence of unsigned integers, each costing a 6-bit width header plus its
//! minimal bit width (at least 1). The prefix is coded the same way.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::ceil_log2;

/// Cost of one integer in the canonical encoding.
pub fn value_bits(x: u64) -> u64 {
    6 + (64 - x.leading_zeros() as u64).max(1)
}

/// Cost of a whole encoded message.
pub fn payload_bits(words: &[u64]) -> u64 {
    value_bits(words.len() as u64) + words.iter().map(|&w| value_bits(w)).sum::<u64>()
}

/// Default CONGEST budget for an instance with `n` nodes and `c` colors.
pub fn default_budget(n: usize, c: usize) -> u64 {
    32 * (ceil_log2(n as u64) as u64 + ceil_log2(c as u64) as u64 + 8)
}

/// Cursor over an encoded message.
pub struct WordReader<'a> {
    words: &'a [u64],
    pos: usize,
}

impl<'a> WordReader<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        WordReader { words, pos: 0 }
    }

    pub fn next_word(&mut self) -> Result<u64> {
        let w = self
            .words
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::Decode("message truncated".into()))?;
        self.pos += 1;
        Ok(w)
    }

    pub fn is_exhausted(&self) -> bool {
        self.pos == self.words.len()
    }
}

/// Payload type exchanged by a program.
pub trait Message: Clone + Send + Sync + Sized {
    fn encode(&self, out: &mut Vec<u64>);
    fn decode(r: &mut WordReader<'_>) -> Result<Self>;

    fn bits(&self) -> u64 {
        let mut words = Vec::new();
        self.encode(&mut words);
        payload_bits(&words)
    }
}

fn narrow<T: TryFrom<u64>>(w: u64) -> Result<T> {
    T::try_from(w).map_err(|_| Error::Decode(format!("value {w} out of range")))
}

macro_rules! int_message {
    ($($t:ty),*) => {$(
        impl Message for $t {
            fn encode(&self, out: &mut Vec<u64>) {
                out.push(*self as u64);
            }
            fn decode(r: &mut WordReader<'_>) -> Result<Self> {
                narrow(r.next_word()?)
            }
        }
    )*};
}

int_message!(u8, u16, u32, u64, usize);

impl Message for bool {
    fn encode(&self, out: &mut Vec<u64>) {
        out.push(*self as u64);
    }
    fn decode(r: &mut WordReader<'_>) -> Result<Self> {
        match r.next_word()? {
            0 => Ok(false),
            1 => Ok(true),
            w => Err(Error::Decode(format!("bool word {w}"))),
        }
    }
}

impl Message for () {
    fn encode(&self, _: &mut Vec<u64>) {}
    fn decode(_: &mut WordReader<'_>) -> Result<Self> {
        Ok(())
    }
}

impl<T: Message> Message for Option<T> {
    fn encode(&self, out: &mut Vec<u64>) {
        match self {
            None => out.push(0),
            Some(x) => {
                out.push(1);
                x.encode(out);
            }
        }
    }
    fn decode(r: &mut WordReader<'_>) -> Result<Self> {
        match r.next_word()? {
            0 => Ok(None),
            1 => Ok(Some(T::decode(r)?)),
            w => Err(Error::Decode(format!("option tag {w}"))),
        }
    }
}

impl<A: Message, B: Message> Message for (A, B) {
    fn encode(&self, out: &mut Vec<u64>) {
        self.0.encode(out);
        self.1.encode(out);
    }
    fn decode(r: &mut WordReader<'_>) -> Result<Self> {
        Ok((A::decode(r)?, B::decode(r)?))
    }
}

impl<A: Message, B: Message, C: Message> Message for (A, B, C) {
    fn encode(&self, out: &mut Vec<u64>) {
        self.0.encode(out);
        self.1.encode(out);
        self.2.encode(out);
    }
    fn decode(r: &mut WordReader<'_>) -> Result<Self> {
        Ok((A::decode(r)?, B::decode(r)?, C::decode(r)?))
    }
}

impl<T: Message> Message for Vec<T> {
    fn encode(&self, out: &mut Vec<u64>) {
        out.push(self.len() as u64);
        for x in self {
            x.encode(out);
        }
    }
    fn decode(r: &mut WordReader<'_>) -> Result<Self> {
        let len: usize = narrow(r.next_word()?)?;
        (0..len).map(|_| T::decode(r)).collect()
    }
}

/// What a node sees about itself.
#[derive(Clone, Copy, Debug)]
pub struct NodeCtx<'a> {
    pub id: NodeId,
    pub neighbors: &'a [NodeId],
    pub n: usize,
    pub max_degree: usize,
}

impl NodeCtx<'_> {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// Messages received this round, aligned with the node's neighbor slots.
pub struct Inbox<'a, M> {
    slots: &'a [Option<M>],
}

impl<'a, M> Inbox<'a, M> {
    pub fn get(&self, slot: usize) -> Option<&'a M> {
        self.slots[slot].as_ref()
    }

    /// `(slot, message)` for every neighbor that sent something.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &'a M)> + 'a {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.as_ref().map(|m| (i, m)))
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }
}

#[derive(Clone, Debug)]
pub enum Outbox<M> {
    Silent,
    Broadcast(M),
    /// `(neighbor slot, message)` pairs; at most one message per slot.
    Targeted(Vec<(usize, M)>),
}

#[derive(Clone, Debug)]
pub struct Step<M, O> {
    pub outbox: Outbox<M>,
    pub output: Option<O>,
}

impl<M, O> Step<M, O> {
    pub fn silent() -> Self {
        Step {
            outbox: Outbox::Silent,
            output: None,
        }
    }

    pub fn send(outbox: Outbox<M>) -> Self {
        Step {
            outbox,
            output: None,
        }
    }

    pub fn broadcast(m: M) -> Self {
        Self::send(Outbox::Broadcast(m))
    }

    pub fn finish(output: O) -> Self {
        Step {
            outbox: Outbox::Silent,
            output: Some(output),
        }
    }

    pub fn with_output(mut self, output: O) -> Self {
        self.output = Some(output);
        self
    }
}

/// A per-node algorithm. `step` must depend only on its arguments.
pub trait NodeProgram: Sync {
    type Input: Sync;
    type State: Send;
    type Msg: Message;
    type Output: Clone + Send;

    fn init(&self, ctx: &NodeCtx<'_>, input: &Self::Input) -> Self::State;

    fn step(
        &self,
        ctx: &NodeCtx<'_>,
        state: &mut Self::State,
        round: usize,
        inbox: &Inbox<'_, Self::Msg>,
    ) -> Step<Self::Msg, Self::Output>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRounds {
    pub label: String,
    pub rounds: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub rounds: usize,
    pub messages_sent: u64,
    pub max_payload_bits: u64,
    pub per_phase: Vec<PhaseRounds>,
}

impl RunMetrics {
    pub fn phase_rounds(&self, label: &str) -> usize {
        self.per_phase
            .iter()
            .filter(|p| p.label == label)
            .map(|p| p.rounds)
            .sum()
    }

    /// Appends a run that starts after this one finished.
    pub fn then(&mut self, other: RunMetrics) {
        self.rounds += other.rounds;
        self.messages_sent += other.messages_sent;
        self.max_payload_bits = self.max_payload_bits.max(other.max_payload_bits);
        for p in other.per_phase {
            match self.per_phase.iter_mut().find(|q| q.label == p.label) {
                Some(q) => q.rounds += p.rounds,
                None => self.per_phase.push(p),
            }
        }
    }

    /// Merges a run executed simultaneously on a disjoint part of the network.
    pub fn alongside(&mut self, other: RunMetrics) {
        self.rounds = self.rounds.max(other.rounds);
        self.messages_sent += other.messages_sent;
        self.max_payload_bits = self.max_payload_bits.max(other.max_payload_bits);
        for p in other.per_phase {
            match self.per_phase.iter_mut().find(|q| q.label == p.label) {
                Some(q) => q.rounds = q.rounds.max(p.rounds),
                None => self.per_phase.push(p),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Local,
    Congest { budget_bits: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Executor {
    pub mode: Mode,
    /// Skip message serialization; messages are passed by clone.
    pub emulated: bool,
    pub max_rounds: usize,
}

impl Default for Executor {
    fn default() -> Self {
        Executor {
            mode: Mode::Local,
            emulated: false,
            max_rounds: 1_000_000,
        }
    }
}

/// A failed run together with the outputs produced before the failure.
#[derive(Debug, Clone)]
pub struct RunError<O> {
    pub error: Error,
    pub partial: Vec<Option<O>>,
    pub metrics: RunMetrics,
}

impl<O> From<RunError<O>> for Error {
    fn from(e: RunError<O>) -> Self {
        e.error
    }
}

pub type RunResult<O> = std::result::Result<(Vec<O>, RunMetrics), RunError<O>>;

enum Slot<M> {
    Empty,
    Plain(M),
    Encoded(Vec<u64>),
}

impl Executor {
    pub fn local() -> Self {
        Self::default()
    }

    pub fn congest(budget_bits: u64) -> Self {
        Executor {
            mode: Mode::Congest { budget_bits },
            ..Self::default()
        }
    }

    pub fn emulated(mut self, on: bool) -> Self {
        self.emulated = on;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: usize) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    fn budget(&self) -> Option<u64> {
        match self.mode {
            Mode::Local => None,
            Mode::Congest { budget_bits } => Some(budget_bits),
        }
    }

    /// Runs `program` to completion; the metrics carry a single phase `label`.
    pub fn run<P: NodeProgram>(
        &self,
        label: &str,
        program: &P,
        g: &Graph,
        inputs: &[P::Input],
    ) -> RunResult<P::Output> {
        assert_eq!(inputs.len(), g.n(), "one input per node");
        let n = g.n();
        let max_degree = g.max_degree();
        let ctx = |v: NodeId| NodeCtx {
            id: v,
            neighbors: g.neighbors(v),
            n,
            max_degree,
        };
        let mut states: Vec<Option<P::State>> = (0..n)
            .into_par_iter()
            .map(|v| Some(program.init(&ctx(v), &inputs[v])))
            .collect();
        let mut outputs: Vec<Option<P::Output>> = vec![None; n];
        let mut inbox: Vec<Option<P::Msg>> = (0..2 * g.edge_count()).map(|_| None).collect();
        let mut metrics = RunMetrics::default();
        let mut unfinished = n;
        let budget = self.budget();
        let emulated = self.emulated;

        let fail = |error: Error, outputs: Vec<Option<P::Output>>, mut metrics: RunMetrics| {
            metrics.per_phase = vec![PhaseRounds {
                label: label.to_string(),
                rounds: metrics.rounds,
            }];
            RunError {
                error,
                partial: outputs,
                metrics,
            }
        };

        let mut round = 0;
        while unfinished > 0 {
            if round == self.max_rounds {
                return Err(fail(
                    Error::Timeout {
                        max_rounds: self.max_rounds,
                        unfinished,
                    },
                    outputs,
                    metrics,
                ));
            }
            round += 1;
            metrics.rounds = round;

            let inbox_ref = &inbox;
            let steps: Vec<Option<(Step<P::Msg, P::Output>, Vec<Slot<P::Msg>>)>> = states
                .par_iter_mut()
                .enumerate()
                .map(|(v, state)| {
                    let state = state.as_mut()?;
                    let c = ctx(v);
                    let slots = Inbox {
                        slots: &inbox_ref[g.slot_range(v)],
                    };
                    let mut step = program.step(&c, state, round, &slots);
                    let deg = c.degree();
                    let mut out: Vec<Slot<P::Msg>> = (0..deg).map(|_| Slot::Empty).collect();
                    let mut place = |slot: usize, m: P::Msg| {
                        out[slot] = if emulated {
                            Slot::Plain(m)
                        } else {
                            let mut words = Vec::new();
                            m.encode(&mut words);
                            Slot::Encoded(words)
                        };
                    };
                    match std::mem::replace(&mut step.outbox, Outbox::Silent) {
                        Outbox::Silent => {}
                        Outbox::Broadcast(m) => {
                            for slot in 0..deg {
                                place(slot, m.clone());
                            }
                        }
                        Outbox::Targeted(list) => {
                            for (slot, m) in list {
                                place(slot, m);
                            }
                        }
                    }
                    Some((step, out))
                })
                .collect();

            for slot in inbox.iter_mut() {
                *slot = None;
            }
            for (v, entry) in steps.into_iter().enumerate() {
                let Some((step, out)) = entry else { continue };
                let base = g.slot_range(v).start;
                for (i, msg) in out.into_iter().enumerate() {
                    let (bits, delivered) = match msg {
                        Slot::Empty => continue,
                        Slot::Plain(m) => (m.bits(), m),
                        Slot::Encoded(words) => {
                            let bits = payload_bits(&words);
                            let mut reader = WordReader::new(&words);
                            let m = match P::Msg::decode(&mut reader) {
                                Ok(m) if reader.is_exhausted() => m,
                                Ok(_) => {
                                    return Err(fail(
                                        Error::Decode("trailing words".into()),
                                        outputs,
                                        metrics,
                                    ))
                                }
                                Err(e) => return Err(fail(e, outputs, metrics)),
                            };
                            (bits, m)
                        }
                    };
                    if let Some(budget) = budget {
                        if bits > budget {
                            let to = g.neighbors(v)[i];
                            return Err(fail(
                                Error::BudgetExceeded {
                                    round,
                                    from: v,
                                    to,
                                    bits,
                                    budget,
                                },
                                outputs,
                                metrics,
                            ));
                        }
                    }
                    metrics.messages_sent += 1;
                    metrics.max_payload_bits = metrics.max_payload_bits.max(bits);
                    inbox[g.mirror_of(base + i)] = Some(delivered);
                }
                if let Some(o) = step.output {
                    outputs[v] = Some(o);
                    states[v] = None;
                    unfinished -= 1;
                }
            }
        }
        metrics.per_phase = vec![PhaseRounds {
            label: label.to_string(),
            rounds: metrics.rounds,
        }];
        Ok((outputs.into_iter().map(|o| o.expect("finished")).collect(), metrics))
    }
}

/// Runs in LOCAL mode without serializing messages.
pub fn run_emulated<P: NodeProgram>(
    program: &P,
    g: &Graph,
    inputs: &[P::Input],
    max_rounds: usize,
) -> RunResult<P::Output> {
    Executor::local()
        .emulated(true)
        .with_max_rounds(max_rounds)
        .run("run", program, g, inputs)
}

/// Runs with serialized message buffers in the given mode.
pub fn run<P: NodeProgram>(
    program: &P,
    g: &Graph,
    inputs: &[P::Input],
    mode: Mode,
    max_rounds: usize,
) -> RunResult<P::Output> {
    Executor {
        mode,
        emulated: false,
        max_rounds,
    }
    .run("run", program, g, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    struct OwnId;

    impl NodeProgram for OwnId {
        type Input = ();
        type State = ();
        type Msg = ();
        type Output = NodeId;
        fn init(&self, _: &NodeCtx<'_>, _: &()) {}
        fn step(&self, ctx: &NodeCtx<'_>, _: &mut (), _: usize, _: &Inbox<'_, ()>) -> Step<(), NodeId> {
            Step::finish(ctx.id)
        }
    }

    struct MaxNeighbor;

    impl NodeProgram for MaxNeighbor {
        type Input = ();
        type State = ();
        type Msg = usize;
        type Output = usize;
        fn init(&self, _: &NodeCtx<'_>, _: &()) {}
        fn step(&self, ctx: &NodeCtx<'_>, _: &mut (), round: usize, inbox: &Inbox<'_, usize>) -> Step<usize, usize> {
            if round == 1 {
                Step::broadcast(ctx.id)
            } else {
                Step::finish(inbox.iter().map(|(_, &m)| m).max().unwrap_or(ctx.id))
            }
        }
    }

    /// Never finishes.
    struct Chatter;

    impl NodeProgram for Chatter {
        type Input = ();
        type State = ();
        type Msg = Vec<u64>;
        type Output = ();
        fn init(&self, _: &NodeCtx<'_>, _: &()) {}
        fn step(&self, _: &NodeCtx<'_>, _: &mut (), round: usize, _: &Inbox<'_, Vec<u64>>) -> Step<Vec<u64>, ()> {
            Step::broadcast(vec![u64::MAX; round])
        }
    }

    #[test]
    fn own_id_takes_one_round() {
        let g = generate(GraphKind::Ring, 6).unwrap();
        let (out, m) = run(&OwnId, &g, &[(); 6], Mode::Local, 10).unwrap();
        assert_eq!(out, (0..6).collect::<Vec<_>>());
        assert_eq!(m.rounds, 1);
        assert_eq!(m.messages_sent, 0);
    }

    #[test]
    fn max_neighbor_on_path() {
        let g = generate(GraphKind::Path, 3).unwrap();
        let (out, m) = run(&MaxNeighbor, &g, &[(); 3], Mode::Local, 10).unwrap();
        assert_eq!(out, vec![1, 2, 1]);
        assert_eq!(m.rounds, 2);
        assert_eq!(m.messages_sent, 4);
        let (out_e, m_e) = run_emulated(&MaxNeighbor, &g, &[(); 3], 10).unwrap();
        assert_eq!((out, m), (out_e, m_e));
    }

    #[test]
    fn single_node() {
        let g = Graph::empty(1);
        let (out, m) = run_emulated(&MaxNeighbor, &g, &[()], 5).unwrap();
        assert_eq!(out, vec![0]);
        assert_eq!(m.rounds, 2);
    }

    #[test]
    fn timeout_keeps_partial_outputs() {
        let g = generate(GraphKind::Path, 2).unwrap();
        let err = run(&Chatter, &g, &[(); 2], Mode::Local, 3).unwrap_err();
        assert_eq!(err.error, Error::Timeout { max_rounds: 3, unfinished: 2 });
        assert_eq!(err.partial, vec![None, None]);
        assert_eq!(err.metrics.rounds, 3);
    }

    #[test]
    fn budget_breach_reports_edge() {
        let g = generate(GraphKind::Path, 2).unwrap();
        // Round r sends a vector of r full-width words.
        let err = run(&Chatter, &g, &[(); 2], Mode::Congest { budget_bits: 150 }, 10).unwrap_err();
        match err.error {
            Error::BudgetExceeded { round, from, to, bits, budget } => {
                assert_eq!((round, from, to, budget), (2, 0, 1, 150));
                assert_eq!(bits, payload_bits(&[2, u64::MAX, u64::MAX]));
            }
            e => panic!("unexpected {e:?}"),
        }
        let emu = Executor::congest(150).emulated(true);
        assert!(matches!(
            emu.run("x", &Chatter, &g, &[(); 2]).unwrap_err().error,
            Error::BudgetExceeded { round: 2, .. }
        ));
    }

    #[test]
    fn encoding_costs() {
        assert_eq!(value_bits(0), 7);
        assert_eq!(value_bits(1), 7);
        assert_eq!(value_bits(255), 14);
        assert_eq!(payload_bits(&[]), 7);
        assert_eq!(7u32.bits(), 7 + 9);
        let m: (u32, Option<usize>) = (3, Some(4));
        let mut w = Vec::new();
        m.encode(&mut w);
        assert_eq!(w, vec![3, 1, 4]);
        let back = <(u32, Option<usize>)>::decode(&mut WordReader::new(&w)).unwrap();
        assert_eq!(back, m);
        assert!(u8::decode(&mut WordReader::new(&[300])).is_err());
    }

    #[test]
    fn metrics_composition() {
        let phase = |l: &str, r| RunMetrics {
            rounds: r,
            messages_sent: 1,
            max_payload_bits: r as u64,
            per_phase: vec![PhaseRounds { label: l.into(), rounds: r }],
        };
        let mut seq = phase("a", 3);
        seq.then(phase("b", 2));
        seq.then(phase("a", 1));
        assert_eq!(seq.rounds, 6);
        assert_eq!(seq.phase_rounds("a"), 4);
        let mut par = phase("a", 3);
        par.alongside(phase("a", 5));
        assert_eq!((par.rounds, par.phase_rounds("a"), par.messages_sent), (5, 5, 2));
        let json = serde_json::to_string(&phase("x", 1)).unwrap();
        assert_eq!(
            json,
            r#"{"rounds":1,"messages_sent":1,"max_payload_bits":1,"per_phase":[{"label":"x","rounds":1}]}"#
        );
    }

    #[test]
    fn default_budget_formula() {
        assert_eq!(default_budget(64, 1), 32 * 14);
        assert_eq!(default_budget(100, 27), 32 * (7 + 5 + 8));
    }
}
