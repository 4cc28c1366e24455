//! Scripted Byzantine behaviors and adversary-set admissibility.
//!
//! An adversarial node runs an honest shadow of the protocol; its strategy
//! rewrites the shadow's broadcast per out-neighbor and round. Strategies are
//! static: they never react to observed traffic.

use std::collections::{BTreeMap, BTreeSet};

use crate::digraph::{Digraph, Node, NodeSubset};
use crate::protocol::MemoryVector;
use crate::{Error, Result, Round};

#[derive(Clone, Debug, PartialEq)]
pub enum AdversaryStrategy {
    /// Sends `value` for every label in `target_labels` from `from_round` on.
    ConstantLie {
        target_labels: BTreeSet<Node>,
        value: f64,
        from_round: Round,
    },
    /// Sends `honest_value` as its own value before `switch_round` and
    /// `new_value` from then on.
    SwitchOwn {
        honest_value: f64,
        new_value: f64,
        switch_round: Round,
    },
    /// Per out-neighbor label overrides applied every round. Unmapped
    /// neighbors receive the honest payload.
    Equivocate {
        per_neighbor: BTreeMap<Node, BTreeMap<Node, f64>>,
    },
    /// Announces `value` as its own value.
    OutOfInterval {
        value: f64,
    },
    /// Sends nothing.
    Silent,
    Honest,
}

impl AdversaryStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ConstantLie { .. } => "constant-lie",
            Self::SwitchOwn { .. } => "switch-own",
            Self::Equivocate { .. } => "equivocate",
            Self::OutOfInterval { .. } => "out-of-interval",
            Self::Silent => "silent",
            Self::Honest => "honest",
        }
    }

    /// Checks the strategy's own invariants for adversary `own_id` in `g`.
    pub fn validate(&self, g: &Digraph, own_id: Node) -> Result<()> {
        g.check_node(own_id)?;
        match self {
            Self::SwitchOwn { switch_round: 0, .. } => {
                Err(Error::InvalidParameter(format!("node {own_id}: switch_round must be at least 1")))
            }
            Self::Equivocate { per_neighbor } => match per_neighbor.keys().find(|&&nb| !g.has_edge(own_id, nb)) {
                Some(nb) => Err(Error::InvalidParameter(format!(
                    "node {own_id}: equivocation target {nb} is not an out-neighbor"
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Payload sent to `neighbor` at round `k`, derived from the honest
    /// broadcast the shadow state would have sent. `None` means no message.
    pub fn emit(&self, k: Round, neighbor: Node, honest: &MemoryVector, own_id: Node) -> Option<MemoryVector> {
        let mut payload = honest.clone();
        match self {
            Self::Honest => {}
            Self::Silent => return None,
            Self::ConstantLie { target_labels, value, from_round } => {
                if k >= *from_round {
                    for &label in target_labels {
                        payload.set(label, Some(*value));
                    }
                }
            }
            Self::SwitchOwn { honest_value, new_value, switch_round } => {
                let own = if k >= *switch_round { *new_value } else { *honest_value };
                payload.set(own_id, Some(own));
            }
            Self::Equivocate { per_neighbor } => {
                for (&label, &value) in per_neighbor.get(&neighbor).into_iter().flatten() {
                    payload.set(label, Some(value));
                }
            }
            Self::OutOfInterval { value } => payload.set(own_id, Some(*value)),
        }
        Some(payload)
    }
}

/// `true` iff every node outside `adversaries` has at most `f` adversarial
/// in-neighbors.
pub fn is_f_local_admissible(g: &Digraph, adversaries: &NodeSubset, f: usize) -> bool {
    g.nodes()
        .filter(|i| !adversaries.contains(*i))
        .all(|i| g.in_list(i).iter().filter(|j| adversaries.contains(**j)).count() <= f)
}

/// `true` iff there are at most `f` adversaries in total.
pub fn is_f_total_admissible(adversaries: &NodeSubset, f: usize) -> bool {
    adversaries.len() <= f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{complete, wheel};

    fn honest(n_bar: usize, entries: &[(Node, f64)]) -> MemoryVector {
        let mut m = MemoryVector::empty(n_bar);
        for &(l, v) in entries {
            m.set(l, Some(v));
        }
        m
    }

    #[test]
    fn constant_lie_overrides_targets_from_round() {
        let s = AdversaryStrategy::ConstantLie { target_labels: (1..=6).collect(), value: 1.5, from_round: 1 };
        let out = s.emit(2, 3, &honest(6, &[(4, 4.0)]), 4).unwrap();
        assert!((1..=6).all(|l| out.get(l) == Some(1.5)));

        let s = AdversaryStrategy::ConstantLie { target_labels: [1, 2].into(), value: 1.5, from_round: 2 };
        let h = honest(6, &[(4, 4.0)]);
        assert_eq!(s.emit(1, 3, &h, 4).unwrap(), h);
        let out = s.emit(2, 3, &h, 4).unwrap();
        assert_eq!(out.get(1), Some(1.5));
        assert_eq!(out.get(4), Some(4.0));
    }

    #[test]
    fn equivocation_differs_per_neighbor() {
        let per_neighbor = BTreeMap::from([(3, BTreeMap::from([(1, 2.0)])), (4, BTreeMap::from([(1, 8.0)]))]);
        let s = AdversaryStrategy::Equivocate { per_neighbor };
        let h = honest(6, &[(6, 6.0)]);
        let to3 = s.emit(1, 3, &h, 6).unwrap();
        let to4 = s.emit(1, 4, &h, 6).unwrap();
        assert_eq!(to3.get(1), Some(2.0));
        assert_eq!(to4.get(1), Some(8.0));
        assert_ne!(to3, to4);
        assert_eq!(s.emit(1, 2, &h, 6).unwrap(), h);
        assert!(s.validate(&wheel(6, 6).unwrap(), 6).is_ok());

        let bad = AdversaryStrategy::Equivocate { per_neighbor: BTreeMap::from([(3, BTreeMap::new())]) };
        assert!(bad.validate(&wheel(6, 6).unwrap(), 1).is_err());
    }

    #[test]
    fn honest_silent_switch_and_out_of_interval() {
        let h = honest(4, &[(2, 2.0), (1, 1.0)]);
        assert_eq!(AdversaryStrategy::Honest.emit(5, 1, &h, 2), Some(h.clone()));
        assert_eq!(AdversaryStrategy::Silent.emit(5, 1, &h, 2), None);

        let s = AdversaryStrategy::SwitchOwn { honest_value: 2.0, new_value: 9.0, switch_round: 3 };
        assert_eq!(s.emit(2, 1, &h, 2).unwrap().get(2), Some(2.0));
        assert_eq!(s.emit(3, 1, &h, 2).unwrap().get(2), Some(9.0));
        let bad = AdversaryStrategy::SwitchOwn { honest_value: 2.0, new_value: 9.0, switch_round: 0 };
        assert!(bad.validate(&complete(4).unwrap(), 2).is_err());

        let s = AdversaryStrategy::OutOfInterval { value: -5.0 };
        assert_eq!(s.emit(1, 1, &h, 2).unwrap().get(2), Some(-5.0));
    }

    #[test]
    fn admissibility_examples() {
        let w = wheel(6, 6).unwrap();
        assert!(is_f_local_admissible(&w, &NodeSubset::new(6, [6]).unwrap(), 1));
        let k4 = complete(4).unwrap();
        assert!(!is_f_local_admissible(&k4, &NodeSubset::new(4, [1, 2]).unwrap(), 1));
        assert!(is_f_local_admissible(&k4, &NodeSubset::new(4, [1, 2]).unwrap(), 2));

        assert!(is_f_total_admissible(&NodeSubset::new(6, [4]).unwrap(), 1));
        assert!(!is_f_total_admissible(&NodeSubset::new(6, [1, 2]).unwrap(), 1));
        assert!(is_f_total_admissible(&NodeSubset::empty(6), 0));
    }
}
