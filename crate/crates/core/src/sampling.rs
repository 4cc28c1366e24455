//! Seeded generators of random graphs, adversary sets and strategies for
//! property-based testing and surveys.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adversary::{is_f_local_admissible, AdversaryStrategy};
use crate::digraph::{random_digraph, Digraph, Node, NodeSubset};
use crate::protocol::SafeInterval;
use crate::robustness::{connectivity_category, is_strongly_r_robust, ConnectivityCategory};
use crate::Result;

/// Draws digraphs with edge probability uniform in `[p_lo, p_hi]` until one is
/// strongly r-robust; `None` after `max_tries` rejections.
pub fn random_strongly_robust<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    (p_lo, p_hi): (f64, f64),
    max_tries: usize,
    rng: &mut R,
) -> Result<Option<Digraph>> {
    for _ in 0..max_tries {
        let p = rng.gen_range(p_lo..=p_hi);
        let g = random_digraph(n, p, rng);
        if is_strongly_r_robust(&g, r)?.verdict {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Draws digraphs until one is (`want = true`) or is not strongly connected.
pub fn random_with_connectivity<R: Rng + ?Sized>(
    n: usize,
    want: bool,
    p: f64,
    max_tries: usize,
    rng: &mut R,
) -> Option<Digraph> {
    (0..max_tries)
        .map(|_| random_digraph(n, p, rng))
        .find(|g| (connectivity_category(g) == ConnectivityCategory::C3) == want)
}

/// A nonempty f-local admissible adversary set of random size, or the empty
/// set if none was found in `max_tries` draws.
pub fn random_f_local_set<R: Rng + ?Sized>(g: &Digraph, f: usize, max_tries: usize, rng: &mut R) -> NodeSubset {
    let n = g.node_count();
    let mut nodes: Vec<Node> = g.nodes().collect();
    for _ in 0..max_tries {
        let size = rng.gen_range(1..=(f + 1).min(n - 1).max(1));
        nodes.shuffle(rng);
        let a = NodeSubset::new(n, nodes[..size].iter().copied()).expect("labels in range");
        if is_f_local_admissible(g, &a, f) {
            return a;
        }
    }
    NodeSubset::empty(n)
}

/// One of the scripted strategies with random parameters. Values stay inside
/// `safe` except for the out-of-interval variant.
pub fn random_strategy<R: Rng + ?Sized>(
    g: &Digraph,
    node: Node,
    honest_value: f64,
    safe: &SafeInterval,
    rng: &mut R,
) -> AdversaryStrategy {
    let n = g.node_count();
    let value = |rng: &mut R| rng.gen_range(safe.lo..=safe.hi);
    match rng.gen_range(0..6) {
        0 => {
            let target_labels: BTreeSet<Node> = g.nodes().filter(|_| rng.gen_bool(0.6)).collect();
            AdversaryStrategy::ConstantLie { target_labels, value: value(rng), from_round: rng.gen_range(1..=3) }
        }
        1 => AdversaryStrategy::SwitchOwn {
            honest_value,
            new_value: value(rng),
            switch_round: rng.gen_range(1..=n as u64),
        },
        2 => {
            let mut per_neighbor = BTreeMap::new();
            for &nb in g.out_list(node) {
                if rng.gen_bool(0.7) {
                    let chosen: Vec<Node> = g.nodes().filter(|_| rng.gen_bool(0.5)).collect();
                    let labels: BTreeMap<Node, f64> = chosen.into_iter().map(|l| (l, value(rng))).collect();
                    per_neighbor.insert(nb, labels);
                }
            }
            AdversaryStrategy::Equivocate { per_neighbor }
        }
        3 => AdversaryStrategy::OutOfInterval { value: safe.hi + 1.0 + value(rng) },
        4 => AdversaryStrategy::Silent,
        _ => AdversaryStrategy::Honest,
    }
}
