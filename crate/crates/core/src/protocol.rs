//! Per-node retrieval state machine and averaging filter.
//!
//! A regular node keeps a write-once memory vector indexed by node label. In
//! the direct phase it stores each in-neighbor's own value as received; after
//! that a label is accepted only when `f + 1` distinct, unsuspected
//! in-neighbors carry the identical value for it. The node's state tracks the
//! running mean of its memory through a first-order filter.
//!
//! Everything here is a deterministic transition on [`NodeState`]; the
//! simulator owns time, delivery and I/O.

use std::collections::{BTreeMap, BTreeSet};

use crate::digraph::{Node, NodeSubset};
use crate::{Error, Result, Round};

/// Closed interval of legitimate initial values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SafeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SafeInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!("safe interval [{lo}, {hi}] is not a finite closed interval")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl Default for SafeInterval {
    fn default() -> Self {
        Self { lo: 0.0, hi: 10.0 }
    }
}

/// Which memory entries enter the running mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhiMode {
    /// Every filled entry, including values owned by nodes later suspected.
    #[default]
    IncludeAll,
    /// Filled entries whose label is not suspected.
    ExcludeDetected,
}

/// Fixed-length vector of optional values indexed by label `1..=n_bar`.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryVector {
    entries: Vec<Option<f64>>,
}

impl MemoryVector {
    pub fn empty(n_bar: usize) -> Self {
        Self { entries: vec![None; n_bar] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value stored for `label`; `None` for empty or out-of-range labels.
    pub fn get(&self, label: Node) -> Option<f64> {
        label.checked_sub(1).and_then(|k| self.entries.get(k).copied().flatten())
    }

    /// Overwrites an entry. Used to build arbitrary payloads; node memories
    /// only ever go through [`NodeState`]'s write-once transitions.
    pub fn set(&mut self, label: Node, value: Option<f64>) {
        if let Some(slot) = label.checked_sub(1).and_then(|k| self.entries.get_mut(k)) {
            *slot = value;
        }
    }

    /// Number of filled entries.
    pub fn occupancy(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// `(label, value)` for every filled entry, in label order.
    pub fn filled(&self) -> impl Iterator<Item = (Node, f64)> + '_ {
        self.entries.iter().enumerate().filter_map(|(k, e)| e.map(|v| (k + 1, v)))
    }
}

/// A packet as seen by its receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct InboundMessage {
    pub sender: Node,
    pub payload: MemoryVector,
    pub sent_round: Round,
    pub delay: Round,
}

/// Bit pattern used for exact value identity; folds -0.0 into 0.0.
fn value_key(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

/// What a node has observed from one in-neighbor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborHistory {
    pub last: Option<MemoryVector>,
    /// Distinct values ever received per label, in arrival order.
    pub values: BTreeMap<Node, Vec<f64>>,
}

impl NeighborHistory {
    fn record(&mut self, payload: &MemoryVector) {
        for (label, v) in payload.filled() {
            let seen = self.values.entry(label).or_default();
            if !seen.iter().any(|&w| value_key(w) == value_key(v)) {
                seen.push(v);
            }
        }
        self.last = Some(payload.clone());
    }

    /// `true` once some label has carried two different values.
    pub fn has_changed_value(&self) -> bool {
        self.values.values().any(|vals| vals.len() > 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeState {
    id: Node,
    x: f64,
    initial: f64,
    epsilon: f64,
    memory: MemoryVector,
    neighbor_history: BTreeMap<Node, NeighborHistory>,
    suspected: BTreeSet<Node>,
    accepted_round: Vec<Option<Round>>,
    poisoned: BTreeSet<Node>,
    last_update: Option<Round>,
}

impl NodeState {
    /// Fresh node holding only its own value; `x` starts at that value.
    pub fn new(id: Node, x0: f64, n_bar: usize, epsilon: f64) -> Result<Self> {
        if id == 0 || id > n_bar {
            return Err(Error::NodeOutOfRange { node: id, n: n_bar });
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("filter gain must lie in [0, 1), got {epsilon}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter(format!("initial value of node {id} is not finite")));
        }
        let mut memory = MemoryVector::empty(n_bar);
        memory.set(id, Some(x0));
        let mut accepted_round = vec![None; n_bar];
        accepted_round[id - 1] = Some(0);
        Ok(Self {
            id,
            x: x0,
            initial: x0,
            epsilon,
            memory,
            neighbor_history: BTreeMap::new(),
            suspected: BTreeSet::new(),
            accepted_round,
            poisoned: BTreeSet::new(),
            last_update: Some(0),
        })
    }

    pub fn id(&self) -> Node {
        self.id
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn memory(&self) -> &MemoryVector {
        &self.memory
    }

    pub fn suspected(&self) -> &BTreeSet<Node> {
        &self.suspected
    }

    pub fn poisoned(&self) -> &BTreeSet<Node> {
        &self.poisoned
    }

    pub fn neighbor_history(&self) -> &BTreeMap<Node, NeighborHistory> {
        &self.neighbor_history
    }

    /// Round at which `label` entered memory (0 for the node's own label).
    pub fn accepted_round(&self, label: Node) -> Option<Round> {
        label.checked_sub(1).and_then(|k| self.accepted_round.get(k).copied().flatten())
    }

    pub fn last_update(&self) -> Option<Round> {
        self.last_update
    }

    /// Snapshot of the current memory, identical for every out-neighbor.
    pub fn make_broadcast(&self) -> MemoryVector {
        self.memory.clone()
    }

    /// The memory as it was at round 0: only the node's own entry.
    pub fn initial_broadcast(&self) -> MemoryVector {
        let mut m = MemoryVector::empty(self.memory.len());
        m.set(self.id, Some(self.initial));
        m
    }

    fn observe(&mut self, msg: &InboundMessage) {
        self.neighbor_history.entry(msg.sender).or_default().record(&msg.payload);
    }

    fn suspect(&mut self, node: Node) -> bool {
        node != self.id && self.suspected.insert(node)
    }

    fn store(&mut self, label: Node, value: f64, round: Round) -> bool {
        if self.memory.get(label).is_some() || self.poisoned.contains(&label) {
            return false;
        }
        self.memory.set(label, Some(value));
        self.accepted_round[label - 1] = Some(round);
        true
    }

    /// Direct-phase receipt: stores the sender's own value if that entry is
    /// still empty. An own value outside `safe` marks the sender instead.
    /// Returns `true` when a new entry was stored.
    pub fn receive_direct(&mut self, msg: &InboundMessage, round: Round, safe: &SafeInterval) -> bool {
        self.observe(msg);
        let sender = msg.sender;
        if sender == self.id || sender > self.memory.len() || self.suspected.contains(&sender) {
            return false;
        }
        let Some(v) = msg.payload.get(sender) else {
            return false;
        };
        if !safe.contains(v) {
            self.suspect(sender);
            return false;
        }
        self.store(sender, v, round)
    }

    /// Accepts every empty label carried with an identical value by at least
    /// `f + 1` distinct unsuspected senders. Two values both reaching quorum
    /// poison the label and mark its owner. Returns newly accepted labels.
    pub fn accept_by_vote(&mut self, inbox: &[InboundMessage], f: usize, round: Round) -> Vec<Node> {
        for msg in inbox {
            self.observe(msg);
        }
        let voters: Vec<&InboundMessage> = {
            let mut seen = BTreeSet::new();
            inbox
                .iter()
                .filter(|m| m.sender != self.id && !self.suspected.contains(&m.sender) && seen.insert(m.sender))
                .collect()
        };
        let mut accepted = Vec::new();
        for label in 1..=self.memory.len() {
            if self.memory.get(label).is_some() || self.poisoned.contains(&label) {
                continue;
            }
            let mut tally: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
            for msg in &voters {
                if let Some(v) = msg.payload.get(label).filter(|v| !v.is_nan()) {
                    tally.entry(value_key(v)).or_insert((v, 0)).1 += 1;
                }
            }
            let quorum: Vec<f64> = tally.values().filter(|(_, c)| *c > f).map(|(v, _)| *v).collect();
            match quorum.as_slice() {
                [] => {}
                [v] => {
                    self.store(label, *v, round);
                    accepted.push(label);
                }
                _ => {
                    self.poisoned.insert(label);
                    self.suspect(label);
                }
            }
        }
        accepted
    }

    /// Marks a sender whose packet contradicts this node's own value, whose
    /// history shows a changed value for some label, or whose own value lies
    /// outside `safe`. Suspicion is permanent. Returns newly suspected nodes.
    ///
    /// Contradictions are checked on the node's own label only: a relayed
    /// value for some other label may differ from ours without the relayer
    /// being faulty when that label's owner equivocated.
    pub fn detect_adversaries(&mut self, inbox: &[InboundMessage], safe: &SafeInterval) -> Vec<Node> {
        for msg in inbox {
            self.observe(msg);
        }
        let mut flagged = Vec::new();
        for msg in inbox {
            let j = msg.sender;
            if j == self.id || self.suspected.contains(&j) {
                continue;
            }
            let contradicts_own = msg.payload.get(self.id).is_some_and(|v| value_key(v) != value_key(self.initial));
            let changed = self.neighbor_history.get(&j).is_some_and(NeighborHistory::has_changed_value);
            let out_of_interval = msg.payload.get(j).is_some_and(|v| !safe.contains(v));
            if (contradicts_own || changed || out_of_interval) && self.suspect(j) {
                flagged.push(j);
            }
        }
        flagged
    }

    /// Mean of the filled memory entries (the instantly cumulative average).
    pub fn phi(&self, mode: PhiMode) -> f64 {
        let (sum, count) = self
            .memory
            .filled()
            .filter(|(label, _)| mode == PhiMode::IncludeAll || !self.suspected.contains(label))
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        sum / count as f64
    }

    /// `x <- eps * x + (1 - eps) * phi`.
    pub fn update_sync(&mut self, mode: PhiMode) {
        self.x = self.epsilon * self.x + (1.0 - self.epsilon) * self.phi(mode);
    }

    /// Same contraction as [`update_sync`](Self::update_sync), applied at a
    /// scheduled round `k` against the state left by the previous update.
    pub fn update_async(&mut self, k: Round, mode: PhiMode) -> Result<()> {
        if let Some(last) = self.last_update.filter(|&last| last >= k) {
            return Err(Error::InvalidParameter(format!(
                "update at round {k} does not follow previous update at {last}"
            )));
        }
        self.update_sync(mode);
        self.last_update = Some(k);
        Ok(())
    }

    /// `true` iff every label in `regular` has a filled entry.
    pub fn retrieval_complete(&self, regular: &NodeSubset) -> bool {
        regular.iter().all(|label| self.memory.get(label).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(sender: Node, n_bar: usize, entries: &[(Node, f64)], round: Round) -> InboundMessage {
        let mut payload = MemoryVector::empty(n_bar);
        for &(l, v) in entries {
            payload.set(l, Some(v));
        }
        InboundMessage { sender, payload, sent_round: round, delay: 0 }
    }

    #[test]
    fn init_examples() {
        let s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        let filled: Vec<_> = s.memory().filled().collect();
        assert_eq!(filled, vec![(3, 3.0)]);
        assert_eq!(s.memory().len(), 6);
        assert_eq!(s.x(), 3.0);

        let s = NodeState::new(1, 0.0, 10, 0.5).unwrap();
        assert_eq!(s.memory().occupancy(), 1);
        assert_eq!(s.memory().get(1), Some(0.0));

        assert!(NodeState::new(1, 0.0, 6, 1.0).is_err());
        assert!(NodeState::new(1, 0.0, 6, -0.1).is_err());
        assert!(NodeState::new(7, 0.0, 6, 0.0).is_err());
    }

    #[test]
    fn broadcast_is_a_snapshot() {
        let mut s = NodeState::new(1, 1.0, 3, 0.0).unwrap();
        let before = s.make_broadcast();
        assert_eq!(before.filled().collect::<Vec<_>>(), vec![(1, 1.0)]);
        s.receive_direct(&msg(2, 3, &[(2, 2.0)], 1), 1, &SafeInterval::default());
        assert_eq!(before.occupancy(), 1);
        let after = s.make_broadcast();
        assert_eq!(after.filled().collect::<Vec<_>>(), vec![(1, 1.0), (2, 2.0)]);
        assert_eq!(s.initial_broadcast().occupancy(), 1);
    }

    #[test]
    fn direct_receipt() {
        let safe = SafeInterval::default();
        let mut s = NodeState::new(2, 2.0, 6, 0.0).unwrap();
        assert!(s.receive_direct(&msg(1, 6, &[(1, 1.0)], 1), 1, &safe));
        assert_eq!(s.memory().get(1), Some(1.0));
        assert_eq!(s.accepted_round(1), Some(1));

        assert!(!s.receive_direct(&msg(1, 6, &[(1, 1.0)], 1), 1, &safe));
        assert!(s.suspected().is_empty());

        assert!(!s.receive_direct(&msg(3, 6, &[(3, 42.0)], 1), 1, &safe));
        assert_eq!(s.memory().get(3), None);
        assert!(s.suspected().contains(&3));
    }

    #[test]
    fn vote_threshold() {
        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        let inbox = [msg(2, 6, &[(1, 1.0)], 2), msg(5, 6, &[(1, 1.0)], 2)];
        assert_eq!(s.accept_by_vote(&inbox, 1, 2), vec![1]);
        assert_eq!(s.memory().get(1), Some(1.0));

        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        let split = [msg(2, 6, &[(1, 1.0)], 2), msg(6, 6, &[(1, 7.0)], 2)];
        for k in 2..20 {
            assert!(s.accept_by_vote(&split, 1, k).is_empty());
        }
        assert_eq!(s.memory().get(1), None);

        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        assert_eq!(s.accept_by_vote(&[msg(6, 6, &[(1, 7.0)], 2)], 0, 2), vec![1]);
    }

    #[test]
    fn votes_ignore_suspected_and_duplicate_senders() {
        let safe = SafeInterval::default();
        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        s.receive_direct(&msg(6, 6, &[(6, 60.0)], 1), 1, &safe);
        assert!(s.suspected().contains(&6));
        let inbox = [msg(2, 6, &[(1, 1.0)], 2), msg(6, 6, &[(1, 1.0)], 2)];
        assert!(s.accept_by_vote(&inbox, 1, 2).is_empty());
        let dup = [msg(2, 6, &[(1, 1.0)], 2), msg(2, 6, &[(1, 1.0)], 2)];
        assert!(s.accept_by_vote(&dup, 1, 2).is_empty());
    }

    #[test]
    fn double_quorum_poisons_label() {
        let mut s = NodeState::new(1, 1.0, 5, 0.0).unwrap();
        let inbox = [
            msg(2, 5, &[(5, 2.0)], 2),
            msg(3, 5, &[(5, 2.0)], 2),
            msg(4, 5, &[(5, 8.0)], 2),
            msg(5, 5, &[(5, 8.0)], 2),
        ];
        assert!(s.accept_by_vote(&inbox, 1, 2).is_empty());
        assert!(s.poisoned().contains(&5));
        assert!(s.suspected().contains(&5));
        assert!(s.accept_by_vote(&inbox[..2], 1, 3).is_empty());
        assert_eq!(s.memory().get(5), None);
    }

    #[test]
    fn detection_scenarios() {
        let safe = SafeInterval::default();

        // A neighbor contradicting our own value.
        let mut s = NodeState::new(1, 1.0, 6, 0.0).unwrap();
        let lie = [msg(6, 6, &[(1, 2.5), (6, 6.0)], 3)];
        assert_eq!(s.detect_adversaries(&lie, &safe), vec![6]);

        // A neighbor changing its own value.
        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        s.receive_direct(&msg(4, 6, &[(4, 4.0)], 1), 1, &safe);
        let switched = [msg(4, 6, &[(4, 1.5)], 3)];
        assert_eq!(s.detect_adversaries(&switched, &safe), vec![4]);
        assert_eq!(s.memory().get(4), Some(4.0));

        // Honest traffic.
        let mut s = NodeState::new(3, 3.0, 6, 0.0).unwrap();
        let honest = [msg(2, 6, &[(2, 2.0), (1, 1.0)], 2), msg(4, 6, &[(4, 4.0), (1, 1.0)], 2)];
        s.accept_by_vote(&honest, 1, 2);
        assert!(s.detect_adversaries(&honest, &safe).is_empty());
        assert!(s.suspected().is_empty());
    }

    #[test]
    fn phi_examples() {
        let safe = SafeInterval::default();
        let mut s = NodeState::new(1, 1.0, 6, 0.0).unwrap();
        assert_eq!(s.phi(PhiMode::IncludeAll), 1.0);
        s.receive_direct(&msg(3, 6, &[(3, 3.0)], 1), 1, &safe);
        assert_eq!(s.phi(PhiMode::IncludeAll), 2.0);

        let mut full = NodeState::new(1, 1.0, 6, 0.0).unwrap();
        for j in 2..=6 {
            full.receive_direct(&msg(j, 6, &[(j, j as f64)], 1), 1, &safe);
        }
        assert_eq!(full.phi(PhiMode::IncludeAll), 3.5);
        full.detect_adversaries(&[msg(4, 6, &[(1, 9.0)], 2)], &safe);
        assert_eq!(full.phi(PhiMode::ExcludeDetected), (1.0 + 2.0 + 3.0 + 5.0 + 6.0) / 5.0);
        assert_eq!(full.phi(PhiMode::IncludeAll), 3.5);
    }

    #[test]
    fn filter_updates() {
        let safe = SafeInterval::default();
        let mut s = NodeState::new(1, 2.0, 2, 0.5).unwrap();
        s.receive_direct(&msg(2, 2, &[(2, 6.0)], 1), 1, &safe);
        s.update_sync(PhiMode::IncludeAll);
        assert_eq!(s.x(), 3.0);

        let mut s = NodeState::new(1, 2.0, 2, 0.0).unwrap();
        s.receive_direct(&msg(2, 2, &[(2, 6.0)], 1), 1, &safe);
        s.update_async(2, PhiMode::IncludeAll).unwrap();
        assert_eq!(s.x(), 4.0);
        assert!(s.update_async(2, PhiMode::IncludeAll).is_err());
        assert_eq!(s.last_update(), Some(2));
    }

    #[test]
    fn geometric_contraction_with_constant_phi() {
        let safe = SafeInterval::default();
        let mut s = NodeState::new(1, 1.0, 2, 0.3).unwrap();
        s.receive_direct(&msg(2, 2, &[(2, 5.0)], 1), 1, &safe);
        let target = s.phi(PhiMode::IncludeAll);
        let mut prev = (s.x() - target).abs();
        for k in 1..20 {
            s.update_async(k, PhiMode::IncludeAll).unwrap();
            let err = (s.x() - target).abs();
            assert!((err - 0.3 * prev).abs() < 1e-12);
            prev = err;
        }
    }

    #[test]
    fn retrieval_completion() {
        let safe = SafeInterval::default();
        let s = NodeState::new(2, 2.0, 6, 0.0).unwrap();
        assert!(s.retrieval_complete(&NodeSubset::new(6, [2]).unwrap()));
        assert!(!s.retrieval_complete(&NodeSubset::new(6, [1, 2]).unwrap()));
        let mut s = s;
        for j in [1, 3, 4, 5, 6] {
            s.receive_direct(&msg(j, 6, &[(j, j as f64)], 1), 1, &safe);
        }
        assert!(s.retrieval_complete(&NodeSubset::new(6, [1, 2, 3, 5, 6]).unwrap()));
    }
}
