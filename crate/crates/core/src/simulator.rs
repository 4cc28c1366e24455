//! Discrete-round execution of the retrieval protocol with full tracing.
//!
//! Synchronous runs are the degenerate asynchronous case: every node updates
//! every round and every delay is zero. At each of its update rounds a node
//! first transmits its current memory to all out-neighbors, then processes the
//! latest packet buffered from each in-neighbor, then applies its filter. A
//! packet stamped with `sent_round <= k_bar + tau_bar` belongs to the direct
//! phase; later packets are votes.
//!
//! Runs are deterministic: all randomness comes from a ChaCha stream seeded by
//! the scenario and all iteration is in label order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{is_f_local_admissible, is_f_total_admissible, AdversaryStrategy};
use crate::digraph::{Digraph, Node, NodeSubset};
use crate::protocol::{InboundMessage, MemoryVector, NodeState, PhiMode, SafeInterval};
use crate::{Error, Result, Round};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Sync,
    Async,
}

/// Which bound on the adversary set the scenario claims to respect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Admissibility {
    #[default]
    FLocal,
    FTotal,
}

/// When a node updates in asynchronous mode. Round 0 is initialization and
/// never listed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum UpdateRule {
    #[default]
    EveryRound,
    /// Multiples of the period.
    Period(Round),
    /// Strictly increasing explicit rounds.
    Rounds(Vec<Round>),
    /// Gaps drawn uniformly from `1..=k_bar`.
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DelayRule {
    #[default]
    Zero,
    /// Uniform in `0..=tau_bar`, drawn per message.
    Random,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AsyncSchedule {
    pub default_updates: UpdateRule,
    pub updates: BTreeMap<Node, UpdateRule>,
    pub delays: DelayRule,
    /// Fixed delay per directed edge `(sender, receiver)`; overrides `delays`.
    pub edge_delays: BTreeMap<(Node, Node), Round>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub graph: Digraph,
    pub f: usize,
    pub n_bar: usize,
    pub initial_values: BTreeMap<Node, f64>,
    pub safe_interval: SafeInterval,
    pub epsilon: BTreeMap<Node, f64>,
    pub default_epsilon: f64,
    pub adversaries: BTreeMap<Node, AdversaryStrategy>,
    pub admissibility: Admissibility,
    pub mode: Mode,
    pub k_bar: Round,
    pub tau_bar: Round,
    pub k_max: Option<Round>,
    pub seed: u64,
    pub phi_mode: PhiMode,
    pub schedule: AsyncSchedule,
    pub expected_average: Option<f64>,
}

impl ScenarioConfig {
    /// Synchronous, adversary-free scenario with `f = 0` and `eps = 0`.
    pub fn new(graph: Digraph, initial_values: BTreeMap<Node, f64>) -> Self {
        let n_bar = graph.node_count();
        Self {
            graph,
            f: 0,
            n_bar,
            initial_values,
            safe_interval: SafeInterval::default(),
            epsilon: BTreeMap::new(),
            default_epsilon: 0.0,
            adversaries: BTreeMap::new(),
            admissibility: Admissibility::FLocal,
            mode: Mode::Sync,
            k_bar: 1,
            tau_bar: 0,
            k_max: None,
            seed: 0,
            phi_mode: PhiMode::IncludeAll,
            schedule: AsyncSchedule::default(),
            expected_average: None,
        }
    }

    /// As [`new`](Self::new) with each node's initial value equal to its label.
    pub fn with_label_values(graph: Digraph) -> Self {
        let values = graph.nodes().map(|i| (i, i as f64)).collect();
        Self::new(graph, values)
    }

    /// `k_bar`, forced to 1 in synchronous mode.
    pub fn effective_k_bar(&self) -> Round {
        match self.mode {
            Mode::Sync => 1,
            Mode::Async => self.k_bar,
        }
    }

    /// `tau_bar`, forced to 0 in synchronous mode.
    pub fn effective_tau_bar(&self) -> Round {
        match self.mode {
            Mode::Sync => 0,
            Mode::Async => self.tau_bar,
        }
    }

    /// `(2N - 1)(k_bar + tau_bar)` unless overridden.
    pub fn default_stopping_round(&self) -> Round {
        let n = self.graph.node_count() as Round;
        (2 * n).saturating_sub(1) * (self.effective_k_bar() + self.effective_tau_bar())
    }

    pub fn stopping_round(&self) -> Round {
        self.k_max.unwrap_or_else(|| self.default_stopping_round())
    }

    pub fn adversary_set(&self) -> NodeSubset {
        let n = self.graph.node_count();
        NodeSubset::new(n, self.adversaries.keys().copied().filter(|&i| self.graph.contains_node(i)))
            .expect("members filtered to the graph")
    }

    pub fn regular_set(&self) -> NodeSubset {
        self.adversary_set().complement()
    }

    /// Whether the adversary set meets the declared admissibility bound.
    pub fn is_compliant(&self) -> bool {
        let a = self.adversary_set();
        match self.admissibility {
            Admissibility::FLocal => is_f_local_admissible(&self.graph, &a, self.f),
            Admissibility::FTotal => is_f_total_admissible(&a, self.f),
        }
    }

    pub fn epsilon_of(&self, node: Node) -> f64 {
        self.epsilon.get(&node).copied().unwrap_or(self.default_epsilon)
    }

    /// Declared expected average, or the mean of the regular initial values.
    pub fn expected_average(&self) -> f64 {
        self.expected_average.unwrap_or_else(|| {
            let regular = self.regular_set();
            let vals: Vec<f64> = regular.iter().filter_map(|i| self.initial_values.get(&i).copied()).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        let n = g.node_count();
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_bar < n {
            return invalid(format!("n_bar = {} is smaller than the node count {n}", self.n_bar));
        }
        for node in self.initial_values.keys().chain(self.epsilon.keys()).chain(self.adversaries.keys()) {
            g.check_node(*node)?;
        }
        if let Some(missing) = g.nodes().find(|i| !self.initial_values.contains_key(i)) {
            return invalid(format!("node {missing} has no initial value"));
        }
        if let Some((i, _)) = self.initial_values.iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("initial value of node {i} is not finite"));
        }
        let gains = std::iter::once(self.default_epsilon).chain(self.epsilon.values().copied());
        if let Some(e) = gains.into_iter().find(|e| !(0.0..1.0).contains(e)) {
            return invalid(format!("filter gain {e} outside [0, 1)"));
        }
        for (node, strategy) in &self.adversaries {
            strategy.validate(g, *node)?;
        }
        if self.mode == Mode::Sync {
            return Ok(());
        }
        if self.k_bar == 0 {
            return invalid("k_bar must be at least 1".into());
        }
        for (&(j, i), &d) in &self.schedule.edge_delays {
            if !g.has_edge(j, i) {
                return Err(Error::MissingEdge(j, i));
            }
            if d > self.tau_bar {
                return invalid(format!("delay {d} on edge ({j}, {i}) exceeds tau_bar = {}", self.tau_bar));
            }
        }
        for node in self.schedule.updates.keys() {
            g.check_node(*node)?;
        }
        let k_max = self.stopping_round();
        for i in g.nodes() {
            match self.update_rule(i) {
                UpdateRule::Period(p) if *p == 0 || *p > self.k_bar => {
                    return invalid(format!("node {i}: update period {p} outside 1..={}", self.k_bar));
                }
                UpdateRule::Rounds(rounds) => check_rounds(i, rounds, self.k_bar, k_max)?,
                _ => {}
            }
        }
        Ok(())
    }

    fn update_rule(&self, node: Node) -> &UpdateRule {
        self.schedule.updates.get(&node).unwrap_or(&self.schedule.default_updates)
    }
}

fn check_rounds(node: Node, rounds: &[Round], k_bar: Round, k_max: Round) -> Result<()> {
    let mut prev = 0;
    for &r in rounds.iter().take_while(|&&r| r <= k_max) {
        if r <= prev || r - prev > k_bar {
            return Err(Error::InvalidParameter(format!(
                "node {node}: update round {r} after {prev} violates the gap bound 1..={k_bar}"
            )));
        }
        prev = r;
    }
    if k_max - prev >= k_bar {
        return Err(Error::InvalidParameter(format!(
            "node {node}: no update between round {prev} and the stopping round {k_max}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Regular,
    Adversary,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Regular => "regular",
            Role::Adversary => "adversary",
        }
    }
}

/// One trace row. Adversary rows carry no state, only whether they emitted.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub node: Node,
    pub role: Role,
    pub x: Option<f64>,
    pub lambda: Option<usize>,
    /// Labels that entered memory this round.
    pub accepted: Vec<Node>,
    /// Cumulative suspicion set.
    pub suspected: Vec<Node>,
    pub updated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: Round,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MessageRecord {
    pub sent_round: Round,
    pub delivered_round: Round,
    pub sender: Node,
    pub receiver: Node,
    pub payload: MemoryVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuspicionEvent {
    pub round: Round,
    pub observer: Node,
    pub suspect: Node,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub mode: Mode,
    pub k_max: Round,
    pub k_bar: Round,
    pub tau_bar: Round,
    pub compliant: bool,
    pub expected_average: f64,
    pub roles: BTreeMap<Node, Role>,
    pub rounds: Vec<RoundRecord>,
    pub messages: Vec<MessageRecord>,
    pub suspicions: Vec<SuspicionEvent>,
    /// First round at which each regular node held every regular label.
    pub retrieval: BTreeMap<Node, Option<Round>>,
    /// End state of every node; adversaries' entries are their honest shadows.
    pub final_states: BTreeMap<Node, NodeState>,
    pub update_rounds: BTreeMap<Node, Vec<Round>>,
}

impl SimulationTrace {
    pub fn regular_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.roles.iter().filter(|(_, r)| **r == Role::Regular).map(|(n, _)| *n)
    }

    /// `x` of `node` at every round (adversaries yield `None`).
    pub fn x_series(&self, node: Node) -> Vec<Option<f64>> {
        self.rounds.iter().map(|r| r.nodes.get(node - 1).and_then(|rec| rec.x)).collect()
    }

    pub fn final_x(&self, node: Node) -> Option<f64> {
        (self.roles.get(&node) == Some(&Role::Regular)).then(|| self.final_states[&node].x())
    }

    /// One row per (round, node) in the fixed column order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,node,role,x,lambda,accepted_labels,suspected,updated_this_round\n");
        for r in &self.rounds {
            for rec in &r.nodes {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.round,
                    rec.node,
                    rec.role.as_str(),
                    rec.x.map(|x| x.to_string()).unwrap_or_default(),
                    rec.lambda.map(|l| l.to_string()).unwrap_or_default(),
                    join(&rec.accepted),
                    join(&rec.suspected),
                    rec.updated
                );
            }
        }
        out
    }

    pub fn messages_csv(&self) -> String {
        let mut out = String::from("sent_round,delivered_round,sender,receiver\n");
        for m in &self.messages {
            let _ = writeln!(out, "{},{},{},{}", m.sent_round, m.delivered_round, m.sender, m.receiver);
        }
        out
    }
}

fn join(labels: &[Node]) -> String {
    labels.iter().map(Node::to_string).collect::<Vec<_>>().join(";")
}

/// `|x_i - expected|` at the final round for every regular node.
pub fn consensus_error(trace: &SimulationTrace, expected: f64) -> BTreeMap<Node, f64> {
    trace.regular_nodes().map(|i| (i, (trace.final_states[&i].x() - expected).abs())).collect()
}

pub fn retrieval_rounds(trace: &SimulationTrace) -> BTreeMap<Node, Option<Round>> {
    trace.retrieval.clone()
}

pub fn run_sync(cfg: &ScenarioConfig) -> Result<SimulationTrace> {
    if cfg.mode != Mode::Sync {
        return Err(Error::InvalidParameter("run_sync needs a synchronous scenario".into()));
    }
    run(cfg)
}

pub fn run_async(cfg: &ScenarioConfig) -> Result<SimulationTrace> {
    if cfg.mode != Mode::Async {
        return Err(Error::InvalidParameter("run_async needs an asynchronous scenario".into()));
    }
    run(cfg)
}

/// Runs the scenario in its declared mode.
pub fn run(cfg: &ScenarioConfig) -> Result<SimulationTrace> {
    cfg.validate()?;
    Engine::new(cfg)?.run()
}

#[derive(Default)]
struct Buffers {
    direct: BTreeMap<Node, InboundMessage>,
    vote: BTreeMap<Node, InboundMessage>,
}

impl Buffers {
    fn deliver(&mut self, msg: InboundMessage, direct_cutoff: Round) {
        let slot = if msg.sent_round <= direct_cutoff { &mut self.direct } else { &mut self.vote };
        match slot.get(&msg.sender) {
            Some(prev) if prev.sent_round >= msg.sent_round => {}
            _ => {
                slot.insert(msg.sender, msg);
            }
        }
    }
}

struct Engine<'a> {
    cfg: &'a ScenarioConfig,
    n: usize,
    k_max: Round,
    k_bar: Round,
    tau_bar: Round,
    rng: ChaCha8Rng,
    regular: NodeSubset,
    roles: BTreeMap<Node, Role>,
    states: BTreeMap<Node, NodeState>,
    updates: BTreeMap<Node, Vec<Round>>,
    is_update: Vec<Vec<bool>>,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let n = cfg.graph.node_count();
        let k_max = cfg.stopping_round();
        let k_bar = cfg.effective_k_bar();
        let tau_bar = cfg.effective_tau_bar();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let regular = cfg.regular_set();
        let roles =
            cfg.graph.nodes().map(|i| (i, if regular.contains(i) { Role::Regular } else { Role::Adversary })).collect();
        let mut states = BTreeMap::new();
        for i in cfg.graph.nodes() {
            states.insert(i, NodeState::new(i, cfg.initial_values[&i], cfg.n_bar, cfg.epsilon_of(i))?);
        }
        let mut updates = BTreeMap::new();
        let mut is_update = vec![vec![false; k_max as usize + 1]; n + 1];
        for i in cfg.graph.nodes() {
            let rule = match cfg.mode {
                Mode::Sync => &UpdateRule::EveryRound,
                Mode::Async => cfg.update_rule(i),
            };
            let rounds = resolve_updates(rule, k_bar, k_max, &mut rng);
            for &r in &rounds {
                is_update[i][r as usize] = true;
            }
            updates.insert(i, rounds);
        }
        Ok(Self { cfg, n, k_max, k_bar, tau_bar, rng, regular, roles, states, updates, is_update })
    }

    fn delay(&mut self, sender: Node, receiver: Node) -> Round {
        if self.cfg.mode == Mode::Sync {
            return 0;
        }
        if let Some(&d) = self.cfg.schedule.edge_delays.get(&(sender, receiver)) {
            return d;
        }
        match self.cfg.schedule.delays {
            DelayRule::Zero => 0,
            DelayRule::Random => self.rng.gen_range(0..=self.tau_bar),
        }
    }

    fn run(mut self) -> Result<SimulationTrace> {
        let cfg = self.cfg;
        let safe = cfg.safe_interval;
        let direct_cutoff = self.k_bar + self.tau_bar;
        let mut buffers: Vec<Buffers> = (0..=self.n).map(|_| Buffers::default()).collect();
        let mut in_flight: BTreeMap<Round, Vec<InboundMessage>> = BTreeMap::new();
        let mut in_flight_to: BTreeMap<Round, Vec<Node>> = BTreeMap::new();
        let mut messages = Vec::new();
        let mut suspicions = Vec::new();
        let mut retrieval: BTreeMap<Node, Option<Round>> = self.regular.iter().map(|i| (i, None)).collect();
        let mut rounds = Vec::with_capacity(self.k_max as usize + 1);

        self.mark_retrieval(&mut retrieval, 0);
        rounds.push(self.record(0, &vec![true; self.n + 1]));

        for k in 1..=self.k_max {
            let active: Vec<bool> = (0..=self.n).map(|i| i > 0 && self.is_update[i][k as usize]).collect();
            let mut emitted = vec![false; self.n + 1];

            for sender in cfg.graph.nodes().filter(|&i| active[i]) {
                let honest = self.states[&sender].make_broadcast();
                for &receiver in cfg.graph.out_list(sender) {
                    let payload = match cfg.adversaries.get(&sender) {
                        Some(strategy) => strategy.emit(k, receiver, &honest, sender),
                        None => Some(honest.clone()),
                    };
                    let Some(payload) = payload else { continue };
                    emitted[sender] = true;
                    let delay = self.delay(sender, receiver);
                    messages.push(MessageRecord {
                        sent_round: k,
                        delivered_round: k + delay,
                        sender,
                        receiver,
                        payload: payload.clone(),
                    });
                    in_flight.entry(k + delay).or_default().push(InboundMessage {
                        sender,
                        payload,
                        sent_round: k,
                        delay,
                    });
                    in_flight_to.entry(k + delay).or_default().push(receiver);
                }
            }

            if let (Some(msgs), Some(dests)) = (in_flight.remove(&k), in_flight_to.remove(&k)) {
                for (msg, receiver) in msgs.into_iter().zip(dests) {
                    buffers[receiver].deliver(msg, direct_cutoff);
                }
            }

            for i in cfg.graph.nodes().filter(|&i| active[i]) {
                let state = self.states.get_mut(&i).expect("state for every node");
                let buf = &buffers[i];
                for msg in buf.direct.values() {
                    state.receive_direct(msg, k, &safe);
                }
                let inbox: Vec<InboundMessage> = buf.vote.values().cloned().collect();
                if !inbox.is_empty() {
                    state.detect_adversaries(&inbox, &safe);
                    state.accept_by_vote(&inbox, cfg.f, k);
                }
                state.update_async(k, cfg.phi_mode)?;
            }

            let record = self.record(k, &active);
            for (rec, prev) in record.nodes.iter().zip(&rounds.last().expect("round 0 recorded").nodes) {
                for s in rec.suspected.iter().filter(|s| !prev.suspected.contains(s)) {
                    suspicions.push(SuspicionEvent { round: k, observer: rec.node, suspect: *s });
                }
            }
            let record = self.mark_emitters(record, &emitted);
            rounds.push(record);
            self.mark_retrieval(&mut retrieval, k);
        }

        messages.sort_by_key(|m| (m.sent_round, m.sender, m.receiver));
        Ok(SimulationTrace {
            mode: cfg.mode,
            k_max: self.k_max,
            k_bar: self.k_bar,
            tau_bar: self.tau_bar,
            compliant: cfg.is_compliant(),
            expected_average: cfg.expected_average(),
            roles: self.roles,
            rounds,
            messages,
            suspicions,
            retrieval,
            final_states: self.states,
            update_rounds: self.updates,
        })
    }

    fn mark_retrieval(&self, retrieval: &mut BTreeMap<Node, Option<Round>>, k: Round) {
        for (i, done) in retrieval.iter_mut() {
            if done.is_none() && self.states[i].retrieval_complete(&self.regular) {
                *done = Some(k);
            }
        }
    }

    fn record(&self, k: Round, active: &[bool]) -> RoundRecord {
        let nodes = self
            .states
            .iter()
            .map(|(&i, s)| match self.roles[&i] {
                Role::Regular => NodeRecord {
                    node: i,
                    role: Role::Regular,
                    x: Some(s.x()),
                    lambda: Some(s.memory().occupancy()),
                    accepted: s.memory().filled().map(|(l, _)| l).filter(|&l| s.accepted_round(l) == Some(k)).collect(),
                    suspected: s.suspected().iter().copied().collect(),
                    updated: active[i],
                },
                Role::Adversary => NodeRecord {
                    node: i,
                    role: Role::Adversary,
                    x: None,
                    lambda: None,
                    accepted: Vec::new(),
                    suspected: Vec::new(),
                    updated: active[i],
                },
            })
            .collect();
        RoundRecord { round: k, nodes }
    }

    fn mark_emitters(&self, mut record: RoundRecord, emitted: &[bool]) -> RoundRecord {
        for rec in record.nodes.iter_mut().filter(|r| r.role == Role::Adversary) {
            rec.updated = emitted[rec.node];
        }
        record
    }
}

fn resolve_updates(rule: &UpdateRule, k_bar: Round, k_max: Round, rng: &mut ChaCha8Rng) -> Vec<Round> {
    match rule {
        UpdateRule::EveryRound => (1..=k_max).collect(),
        UpdateRule::Period(p) => (1..=k_max).filter(|r| r % p == 0).collect(),
        UpdateRule::Rounds(rounds) => rounds.iter().copied().filter(|&r| r >= 1 && r <= k_max).collect(),
        UpdateRule::Random => {
            let mut out = Vec::new();
            let mut r = 0;
            loop {
                r += rng.gen_range(1..=k_bar);
                if r > k_max {
                    break out;
                }
                out.push(r);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{complete, cycle_bidirectional, directed_path, wheel};

    #[test]
    fn complete_graph_reaches_exact_mean() {
        let cfg = ScenarioConfig::with_label_values(complete(4).unwrap());
        let trace = run_sync(&cfg).unwrap();
        assert_eq!(trace.k_max, 7);
        assert_eq!(trace.rounds.len(), 8);
        for (i, err) in consensus_error(&trace, 2.5) {
            assert_eq!(err, 0.0, "node {i}");
        }
        assert!(retrieval_rounds(&trace).values().all(|r| *r == Some(1)));
    }

    #[test]
    fn single_node_completes_at_round_zero() {
        let g = Digraph::new(1).unwrap();
        let trace = run_sync(&ScenarioConfig::with_label_values(g)).unwrap();
        assert_eq!(trace.retrieval[&1], Some(0));
        assert_eq!(consensus_error(&trace, 1.0)[&1], 0.0);
    }

    #[test]
    fn cycle_needs_the_pipeline_rounds() {
        let cfg = ScenarioConfig::with_label_values(cycle_bidirectional(7).unwrap());
        let trace = run_sync(&cfg).unwrap();
        for (i, r) in &trace.retrieval {
            let r = r.unwrap_or_else(|| panic!("node {i} incomplete"));
            assert!(r <= 13);
        }
        assert!(consensus_error(&trace, 4.0).values().all(|e| *e < 1e-12));
    }

    #[test]
    fn directed_path_leaves_upstream_incomplete() {
        let trace = run_sync(&ScenarioConfig::with_label_values(directed_path(4).unwrap())).unwrap();
        assert_eq!(trace.retrieval[&1], None);
        assert!(trace.retrieval[&4].is_some());
    }

    #[test]
    fn degenerate_async_equals_sync() {
        let mut cfg = ScenarioConfig::with_label_values(wheel(6, 6).unwrap());
        cfg.f = 1;
        cfg.default_epsilon = 0.3;
        cfg.adversaries.insert(2, AdversaryStrategy::SwitchOwn { honest_value: 2.0, new_value: 7.0, switch_round: 3 });
        let sync = run(&cfg).unwrap();
        cfg.mode = Mode::Async;
        cfg.k_bar = 1;
        cfg.tau_bar = 0;
        let asyn = run(&cfg).unwrap();
        assert_eq!(sync.to_csv(), asyn.to_csv());
        assert_eq!(sync.messages_csv(), asyn.messages_csv());
    }

    #[test]
    fn seeded_runs_are_reproducible_and_causal() {
        let mut cfg = ScenarioConfig::with_label_values(complete(5).unwrap());
        cfg.mode = Mode::Async;
        cfg.k_bar = 3;
        cfg.tau_bar = 2;
        cfg.seed = 11;
        cfg.schedule.default_updates = UpdateRule::Random;
        cfg.schedule.delays = DelayRule::Random;
        let a = run_async(&cfg).unwrap();
        let b = run_async(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.messages_csv(), b.messages_csv());
        for m in &a.messages {
            assert!(m.delivered_round >= m.sent_round && m.delivered_round - m.sent_round <= 2);
        }
        for rounds in a.update_rounds.values() {
            let mut prev = 0;
            for &r in rounds {
                assert!(r - prev >= 1 && r - prev <= 3);
                prev = r;
            }
            assert!(a.k_max - prev < 3);
        }
        assert!(a.retrieval.values().all(|r| r.is_some_and(|r| r <= 9 * 5)));
    }

    #[test]
    fn honest_adversary_is_indistinguishable() {
        let base = ScenarioConfig::with_label_values(wheel(6, 6).unwrap());
        let mut with = base.clone();
        with.adversaries.insert(6, AdversaryStrategy::Honest);
        let a = run(&base).unwrap();
        let b = run(&with).unwrap();
        let payloads = |t: &SimulationTrace| t.messages.iter().map(|m| m.payload.clone()).collect::<Vec<_>>();
        assert_eq!(payloads(&a), payloads(&b));
    }

    #[test]
    fn wheel_hub_equivocation_blocks_label_one() {
        let mut cfg = ScenarioConfig::with_label_values(wheel(6, 6).unwrap());
        cfg.f = 1;
        cfg.k_max = Some(50);
        let per_neighbor = BTreeMap::from([(3, BTreeMap::from([(1, 2.0)])), (4, BTreeMap::from([(1, 8.0)]))]);
        cfg.adversaries.insert(6, AdversaryStrategy::Equivocate { per_neighbor });
        let trace = run_sync(&cfg).unwrap();
        assert!(trace.compliant);
        assert_eq!(trace.final_states[&3].memory().get(1), None);
        assert_eq!(trace.final_states[&4].memory().get(1), None);
        assert_eq!(trace.retrieval[&3], None);
    }

    #[test]
    fn validation_rejects_bad_schedules() {
        let mut cfg = ScenarioConfig::with_label_values(complete(3).unwrap());
        cfg.mode = Mode::Async;
        cfg.k_bar = 2;
        cfg.schedule.updates.insert(1, UpdateRule::Period(3));
        assert!(run(&cfg).is_err());
        cfg.schedule.updates.insert(1, UpdateRule::Rounds(vec![2, 5]));
        assert!(run(&cfg).is_err());
        cfg.schedule.updates.insert(1, UpdateRule::Rounds((1..=20).collect()));
        cfg.schedule.edge_delays.insert((1, 2), 1);
        assert!(run(&cfg).is_err());
        cfg.tau_bar = 1;
        assert!(run(&cfg).is_ok());

        let mut missing = ScenarioConfig::with_label_values(complete(3).unwrap());
        missing.initial_values.remove(&2);
        assert!(run(&missing).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut cfg = ScenarioConfig::with_label_values(complete(3).unwrap());
        cfg.adversaries.insert(3, AdversaryStrategy::Silent);
        cfg.f = 1;
        let trace = run_sync(&cfg).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("round,node,role,x,lambda,accepted_labels,suspected,updated_this_round"));
        assert_eq!(lines.next(), Some("0,1,regular,1,1,1,,true"));
        assert!(csv.contains("\n1,3,adversary,,,,,false\n"));
        assert!(trace.messages_csv().starts_with("sent_round,delivered_round,sender,receiver\n1,1,1,2\n"));
    }
}
