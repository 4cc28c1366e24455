//! Exhaustive decision procedures for the topological conditions that govern
//! retrieval: r-reachability, r-robustness, strong r-robustness (absolute and
//! relative to a set), f-resiliency, connectivity categories and strong
//! connectivity via node-disjoint paths.
//!
//! The subset-enumerating checkers are exponential in `N` and are meant for
//! desk-scale graphs. Subsets are visited by increasing cardinality, then
//! lexicographically, so the witness attached to a negative verdict is always
//! the first violation in that order.
//!
//! # Operation counts
//!
//! [`check_strongly_r_robust`] and [`check_f_resilient`] count basic edge
//! tests. In [`ScanMode::Audit`] every candidate is scanned in full and the
//! count depends on `N` only:
//!
//! - strong robustness: `sum_{k=1..N} C(N,k) * k * (N-k)`, which simplifies to
//!   `N (N-1) 2^(N-2)`. The closed form `N^2 2^(N-2) - N` that is sometimes
//!   quoted for this sum overcounts from `N = 3` on (15 against 12).
//! - f-resiliency: `N * sum_k C(N-1,k) * sum_h C(N-k-1,h) * h * (N-h)`. The
//!   inner sum equals `2^(m-2) m (2N-m-1)` with `m = N-k-1`; the
//!   simplification `2^m m (3N-k)` sometimes quoted for it does not match
//!   (16 against 2 at `N = 3, k = 1`). Growth is `O(N^3 3^N)` either way.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;

use crate::digraph::{random_digraph, Digraph, Node, NodeSubset};
use crate::subsets::{canonical_submasks, full_mask, submasks};
use crate::{Error, Result};

/// Largest `N` accepted by the subset-enumerating checkers.
pub const MAX_EXHAUSTIVE_NODES: usize = 24;

/// Whether a checker may stop scanning a candidate once its outcome is known.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanMode {
    #[default]
    EarlyExit,
    /// Scan every candidate in full so the test count is input-independent.
    Audit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub tests: u64,
    pub early_exit_enabled: bool,
}

impl OpCounter {
    fn new(mode: ScanMode) -> Self {
        Self { tests: 0, early_exit_enabled: mode == ScanMode::EarlyExit }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    RReachable,
    RRobust,
    StronglyRRobust,
    StronglyRRobustWrt,
    FResilient,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::RReachable => "r-reachable",
            QueryKind::RRobust => "robust",
            QueryKind::StronglyRRobust => "strong-robust",
            QueryKind::StronglyRRobustWrt => "strong-robust-wrt",
            QueryKind::FResilient => "resilient",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub kind: QueryKind,
    pub r: Option<usize>,
    pub f: Option<usize>,
    pub set: Option<NodeSubset>,
}

impl Query {
    fn with_r(kind: QueryKind, r: usize) -> Self {
        Self { kind, r: Some(r), f: None, set: None }
    }

    /// `r=3`, `f=1 `, `r=2 set=1 4` style parameter string.
    pub fn params(&self) -> String {
        let mut parts = Vec::new();
        if let Some(r) = self.r {
            parts.push(format!("r={r}"));
        }
        if let Some(f) = self.f {
            parts.push(format!("f={f}"));
        }
        if let Some(s) = &self.set {
            parts.push(format!("set={}", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")));
        }
        parts.join(" ")
    }
}

/// Evidence that a graph fails a condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A subset that is neither r-reachable nor dominated from outside.
    Subset(NodeSubset),
    /// Two disjoint subsets, neither r-reachable.
    Pair(NodeSubset, NodeSubset),
    /// A source, an f-local adversary set and a split of the remaining nodes
    /// where no node of `middle` can certify the source's value.
    Partition { source: Node, adversaries: NodeSubset, middle: NodeSubset, rest: NodeSubset },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Subset(s) => write!(f, "{s}"),
            Witness::Pair(a, b) => write!(f, "{a} | {b}"),
            Witness::Partition { source, adversaries, middle, rest } => {
                write!(f, "s={source} A={adversaries} M={middle} L={rest}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub query: Query,
    pub verdict: bool,
    pub witness: Option<Witness>,
    pub counter: OpCounter,
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

fn check_exhaustive_size(g: &Digraph) -> Result<()> {
    if g.node_count() > MAX_EXHAUSTIVE_NODES {
        Err(Error::TooLarge { n: g.node_count(), max: MAX_EXHAUSTIVE_NODES })
    } else {
        Ok(())
    }
}

fn check_r_bound(g: &Digraph, r: usize) -> Result<()> {
    let hi = ceil_half(g.node_count());
    if r == 0 || r > hi {
        return Err(Error::InvalidParameter(format!("r must lie in 1..={hi} for N = {}, got {r}", g.node_count())));
    }
    Ok(())
}

fn in_masks(g: &Digraph) -> Vec<u64> {
    g.nodes().map(|i| g.in_mask(i)).collect()
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64usize).filter(move |b| mask & (1u64 << b) != 0)
}

fn mask_reachable(ins: &[u64], s: u64, r: usize) -> bool {
    members(s).any(|b| (ins[b] & !s).count_ones() as usize >= r)
}

/// `true` iff some member of `s` has at least `r` in-neighbors outside `s`.
pub fn is_r_reachable(g: &Digraph, s: &NodeSubset, r: usize) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    for v in s.iter() {
        g.check_node(v)?;
    }
    Ok(s.iter().any(|i| g.in_list(i).iter().filter(|&&j| !s.contains(j)).count() >= r))
}

/// Every pair of nonempty disjoint subsets has an r-reachable member.
pub fn is_r_robust(g: &Digraph, r: usize) -> Result<RobustnessReport> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter("r-robustness needs N >= 2".into()));
    }
    check_r_bound(g, r)?;
    check_exhaustive_size(g)?;
    let ins = in_masks(g);
    let all = full_mask(n);
    let mut counter = OpCounter::new(ScanMode::EarlyExit);

    let mut reachable = vec![false; 1usize << n];
    for s in 1..=all {
        let k = s.count_ones() as u64;
        counter.tests += k * (n as u64 - k);
        reachable[s as usize] = mask_reachable(&ins, s, r);
    }

    let mut witness = None;
    for s1 in canonical_submasks(all) {
        if reachable[s1 as usize] {
            continue;
        }
        let rest = all & !s1;
        if submasks(rest).any(|s2| !reachable[s2 as usize]) {
            let s2 = canonical_submasks(rest).find(|&s2| !reachable[s2 as usize]).expect("exists");
            witness = Some(Witness::Pair(NodeSubset::from_mask(s1, n), NodeSubset::from_mask(s2, n)));
            break;
        }
    }
    Ok(RobustnessReport { query: Query::with_r(QueryKind::RRobust, r), verdict: witness.is_none(), witness, counter })
}

/// Strong r-robustness with early exit.
pub fn is_strongly_r_robust(g: &Digraph, r: usize) -> Result<RobustnessReport> {
    check_strongly_r_robust(g, r, ScanMode::EarlyExit)
}

/// Every nonempty `S` is r-reachable or has a member fed by all of `V \ S`.
///
/// Each examined member costs `N - |S|` tests, one per outside node.
pub fn check_strongly_r_robust(g: &Digraph, r: usize, mode: ScanMode) -> Result<RobustnessReport> {
    check_r_bound(g, r)?;
    check_exhaustive_size(g)?;
    let n = g.node_count();
    let ins = in_masks(g);
    let all = full_mask(n);
    let mut counter = OpCounter::new(mode);
    let mut witness = None;

    for s in canonical_submasks(all) {
        let outside = all & !s;
        let per_member = outside.count_ones() as u64;
        let mut satisfied = false;
        for b in members(s) {
            counter.tests += per_member;
            let from_outside = ins[b] & outside;
            if from_outside.count_ones() as usize >= r || from_outside == outside {
                satisfied = true;
                if mode == ScanMode::EarlyExit {
                    break;
                }
            }
        }
        if !satisfied && witness.is_none() {
            witness = Some(Witness::Subset(NodeSubset::from_mask(s, n)));
            if mode == ScanMode::EarlyExit {
                break;
            }
        }
    }
    Ok(RobustnessReport {
        query: Query::with_r(QueryKind::StronglyRRobust, r),
        verdict: witness.is_none(),
        witness,
        counter,
    })
}

/// Every nonempty `C` outside `s` is r-reachable.
///
/// When `r > |s|` the set `C = V \ s` can never be r-reachable, so the verdict
/// is simply `false` with that witness.
pub fn is_strongly_r_robust_wrt(g: &Digraph, s: &NodeSubset, r: usize) -> Result<RobustnessReport> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    for v in s.iter() {
        g.check_node(v)?;
    }
    check_exhaustive_size(g)?;
    let n = g.node_count();
    let ins = in_masks(g);
    let outside = full_mask(n) & !s.mask();
    let mut counter = OpCounter::new(ScanMode::EarlyExit);
    let mut witness = None;
    for c in canonical_submasks(outside) {
        let k = c.count_ones() as u64;
        counter.tests += k * (n as u64 - k);
        if !mask_reachable(&ins, c, r) {
            witness = Some(Witness::Subset(NodeSubset::from_mask(c, n)));
            break;
        }
    }
    Ok(RobustnessReport {
        query: Query { kind: QueryKind::StronglyRRobustWrt, r: Some(r), f: None, set: Some(s.clone()) },
        verdict: witness.is_none(),
        witness,
        counter,
    })
}

/// f-resiliency with early exit.
pub fn is_f_resilient(g: &Digraph, f: usize) -> Result<RobustnessReport> {
    check_f_resilient(g, f, ScanMode::EarlyExit)
}

/// For every source `s`, every nonempty adversary set `A` not containing `s`
/// and every nonempty `M` outside `A ∪ {s}` (with `L` the remainder), some
/// node of `M` has at most `f` in-neighbors in `A` and either `f + 1`
/// in-neighbors in `L` or a direct edge from `s`.
///
/// Triples whose `A` is not f-local (some node outside `A` has more than `f`
/// in-neighbors in `A`) describe no admissible attack and are not required to
/// pass; in audit mode they are still scanned and counted. Each examined node
/// of `M` costs `N - |M|` tests.
pub fn check_f_resilient(g: &Digraph, f: usize, mode: ScanMode) -> Result<RobustnessReport> {
    let n = g.node_count();
    if f == 0 {
        return Err(Error::InvalidParameter("f must be at least 1".into()));
    }
    if n < 3 {
        return Err(Error::InvalidParameter("f-resiliency needs N >= 3".into()));
    }
    check_exhaustive_size(g)?;
    let ins = in_masks(g);
    let all = full_mask(n);
    let mut counter = OpCounter::new(mode);
    let mut witness = None;

    'sources: for s in 1..=n {
        let s_bit = 1u64 << (s - 1);
        for a in canonical_submasks(all & !s_bit) {
            let admissible = members(all & !a).all(|b| (ins[b] & a).count_ones() as usize <= f);
            if !admissible && mode == ScanMode::EarlyExit {
                continue;
            }
            for m in canonical_submasks(all & !(a | s_bit)) {
                let rest = all & !(a | m);
                let per_member = (n as u64) - m.count_ones() as u64;
                let mut flagged = false;
                for b in members(m) {
                    counter.tests += per_member;
                    let few_adversaries = (ins[b] & a).count_ones() as usize <= f;
                    let certified = (ins[b] & rest).count_ones() as usize > f || ins[b] & s_bit != 0;
                    if few_adversaries && certified {
                        flagged = true;
                        if mode == ScanMode::EarlyExit {
                            break;
                        }
                    }
                }
                if !flagged && admissible && witness.is_none() {
                    witness = Some(Witness::Partition {
                        source: s,
                        adversaries: NodeSubset::from_mask(a, n),
                        middle: NodeSubset::from_mask(m, n),
                        rest: NodeSubset::from_mask(rest, n),
                    });
                    if mode == ScanMode::EarlyExit {
                        break 'sources;
                    }
                }
            }
        }
    }
    Ok(RobustnessReport {
        query: Query { kind: QueryKind::FResilient, r: None, f: Some(f), set: None },
        verdict: witness.is_none(),
        witness,
        counter,
    })
}

/// Largest `r` for which the graph is strongly r-robust, or 0 if none.
pub fn max_strong_robustness(g: &Digraph) -> Result<usize> {
    for r in (1..=ceil_half(g.node_count())).rev() {
        if is_strongly_r_robust(g, r)?.verdict {
            return Ok(r);
        }
    }
    Ok(0)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, t| acc * (n - t) as u128 / (t + 1) as u128)
}

/// Full-scan test count of [`check_strongly_r_robust`] on `n` nodes.
pub fn predicted_strong_robustness_tests(n: usize) -> u128 {
    let n = n as u64;
    (1..=n).map(|k| binomial(n, k) * (k * (n - k)) as u128).sum()
}

/// Full-scan test count of [`check_f_resilient`] on `n` nodes.
pub fn predicted_resilience_tests(n: usize) -> u128 {
    let n = n as u64;
    if n < 2 {
        return 0;
    }
    let outer: u128 = (1..n)
        .map(|k| {
            let m = n - k - 1;
            let inner: u128 = (1..=m).map(|h| binomial(m, h) * (h * (n - h)) as u128).sum();
            binomial(n - 1, k) * inner
        })
        .sum();
    n as u128 * outer
}

/// Connectivity classes of a digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConnectivityCategory {
    /// Underlying undirected graph is disconnected.
    C0,
    /// Weakly but not unilaterally connected.
    C1,
    /// Unilaterally but not strongly connected.
    C2,
    /// Strongly connected.
    C3,
}

impl fmt::Display for ConnectivityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConnectivityCategory::C0 => "C0",
            ConnectivityCategory::C1 => "C1",
            ConnectivityCategory::C2 => "C2",
            ConnectivityCategory::C3 => "C3",
        })
    }
}

fn reachable_from(g: &Digraph, start: Node, undirected: bool) -> Vec<bool> {
    let mut seen = vec![false; g.node_count() + 1];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        let outs = g.out_list(v).iter();
        let next: Vec<Node> =
            if undirected { outs.chain(g.in_list(v).iter()).copied().collect() } else { outs.copied().collect() };
        for w in next {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

pub fn connectivity_category(g: &Digraph) -> ConnectivityCategory {
    let n = g.node_count();
    let reach: Vec<Vec<bool>> =
        std::iter::once(Vec::new()).chain(g.nodes().map(|v| reachable_from(g, v, false))).collect();
    let pairs = || (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
    if pairs().all(|(a, b)| reach[a][b] && reach[b][a]) {
        ConnectivityCategory::C3
    } else if pairs().all(|(a, b)| reach[a][b] || reach[b][a]) {
        ConnectivityCategory::C2
    } else if reachable_from(g, 1, true).iter().skip(1).all(|&x| x) {
        ConnectivityCategory::C1
    } else {
        ConnectivityCategory::C0
    }
}

/// Maximum number of internally node-disjoint directed paths from `i` to `j`.
/// A direct edge `(i, j)` counts as one path.
pub fn disjoint_paths(g: &Digraph, i: Node, j: Node) -> Result<usize> {
    g.check_node(i)?;
    g.check_node(j)?;
    if i == j {
        return Err(Error::InvalidParameter(format!("disjoint paths need distinct endpoints, got {i} twice")));
    }
    // Node v splits into in-half 2(v-1) and out-half 2(v-1)+1 joined by a unit arc.
    let n = g.node_count();
    let size = 2 * n;
    let mut cap = vec![0i32; size * size];
    let idx = |a: usize, b: usize| a * size + b;
    let v_in = |v: Node| 2 * (v - 1);
    let v_out = |v: Node| 2 * (v - 1) + 1;
    for v in g.nodes() {
        cap[idx(v_in(v), v_out(v))] = if v == i || v == j { n as i32 } else { 1 };
    }
    for (a, b) in g.edges() {
        cap[idx(v_out(a), v_in(b))] = 1;
    }
    let (source, sink) = (v_out(i), v_in(j));
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for w in 0..size {
                if parent[w] == usize::MAX && cap[idx(u, w)] > 0 {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return Ok(flow);
        }
        let mut w = sink;
        while w != source {
            let u = parent[w];
            cap[idx(u, w)] -= 1;
            cap[idx(w, u)] += 1;
            w = u;
        }
        flow += 1;
    }
}

/// Minimum number of nodes whose removal leaves a non-strong or single-node
/// digraph. Graphs without a non-adjacent ordered pair get `N - 1`.
pub fn strong_connectivity(g: &Digraph) -> Result<usize> {
    if connectivity_category(g) != ConnectivityCategory::C3 {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.node_count();
    let mut best = n - 1;
    for i in g.nodes() {
        for j in g.nodes() {
            if i != j && !g.has_edge(i, j) {
                best = best.min(disjoint_paths(g, i, j)?);
            }
        }
    }
    Ok(best)
}

/// Tally of how often strong (2f+1)-robustness and f-resiliency co-occur.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImplicationSurvey {
    pub samples: usize,
    pub strongly_robust: usize,
    pub resilient: usize,
    pub both: usize,
}

/// Samples random digraphs and records both verdicts. Reports frequencies
/// only; no implication between the two conditions is assumed.
pub fn survey_strong_vs_resilient<R: Rng + ?Sized>(
    n: usize,
    f: usize,
    samples: usize,
    edge_probability: f64,
    rng: &mut R,
) -> Result<ImplicationSurvey> {
    let r = 2 * f + 1;
    let mut out = ImplicationSurvey::default();
    for _ in 0..samples {
        let g = random_digraph(n, edge_probability, rng);
        check_r_bound(&g, r)?;
        let strong = is_strongly_r_robust(&g, r)?.verdict;
        let resilient = is_f_resilient(&g, f)?.verdict;
        out.samples += 1;
        out.strongly_robust += strong as usize;
        out.resilient += resilient as usize;
        out.both += (strong && resilient) as usize;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{complete, cycle_bidirectional, directed_path, wheel};

    fn set(n: usize, v: &[Node]) -> NodeSubset {
        NodeSubset::new(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn reachability_examples() {
        let k4 = complete(4).unwrap();
        assert!(is_r_reachable(&k4, &set(4, &[1, 2]), 2).unwrap());
        assert!(!is_r_reachable(&k4, &NodeSubset::full(4), 1).unwrap());
        let w = wheel(6, 6).unwrap();
        assert!(!is_r_reachable(&w, &set(6, &[3, 4]), 3).unwrap());
        assert!(is_r_reachable(&w, &set(6, &[3, 4]), 2).unwrap());
        assert_eq!(is_r_reachable(&k4, &NodeSubset::empty(4), 1), Err(Error::EmptySubset));
    }

    #[test]
    fn robustness_examples() {
        assert!(is_r_robust(&complete(6).unwrap(), 3).unwrap().verdict);
        let c7 = is_r_robust(&cycle_bidirectional(7).unwrap(), 2).unwrap();
        assert!(!c7.verdict);
        let two = Digraph::from_undirected_edges(4, [(1, 2), (3, 4)]).unwrap();
        let rep = is_r_robust(&two, 1).unwrap();
        assert_eq!(rep.witness, Some(Witness::Pair(set(4, &[1, 2]), set(4, &[3, 4]))));
        assert!(is_r_robust(&complete(6).unwrap(), 4).is_err());
        assert!(is_r_robust(&Digraph::new(1).unwrap(), 1).is_err());
    }

    #[test]
    fn strong_robustness_examples() {
        assert!(is_strongly_r_robust(&complete(4).unwrap(), 2).unwrap().verdict);
        let rep = is_strongly_r_robust(&wheel(6, 6).unwrap(), 3).unwrap();
        assert!(!rep.verdict);
        assert!(rep.witness.is_some());
        assert!(is_strongly_r_robust(&complete(4).unwrap(), 3).is_err());
        assert!(is_strongly_r_robust(&complete(4).unwrap(), 0).is_err());
    }

    #[test]
    fn strong_robustness_wrt_examples() {
        let k4 = complete(4).unwrap();
        assert!(is_strongly_r_robust_wrt(&k4, &set(4, &[1]), 1).unwrap().verdict);
        let rep = is_strongly_r_robust_wrt(&wheel(6, 6).unwrap(), &set(6, &[1]), 3).unwrap();
        assert!(!rep.verdict);
        match rep.witness {
            Some(Witness::Subset(c)) => assert!(!c.contains(1) && !c.is_empty()),
            other => panic!("unexpected witness {other:?}"),
        }
        assert_eq!(is_strongly_r_robust_wrt(&k4, &NodeSubset::empty(4), 1).unwrap_err(), Error::EmptySubset);
        assert!(is_strongly_r_robust_wrt(&k4, &NodeSubset::full(4), 2).unwrap().verdict);
    }

    #[test]
    fn resilience_examples() {
        assert!(is_f_resilient(&complete(4).unwrap(), 1).unwrap().verdict);
        let rep = is_f_resilient(&wheel(6, 6).unwrap(), 1).unwrap();
        assert!(!rep.verdict);
        assert!(matches!(rep.witness, Some(Witness::Partition { .. })));
        assert!(is_f_resilient(&complete(4).unwrap(), 0).is_err());
        assert!(is_f_resilient(&complete(2).unwrap(), 1).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(connectivity_category(&directed_path(3).unwrap()), ConnectivityCategory::C2);
        let star = Digraph::from_edges(3, [(1, 2), (1, 3)]).unwrap();
        assert_eq!(connectivity_category(&star), ConnectivityCategory::C1);
        assert_eq!(connectivity_category(&Digraph::new(2).unwrap()), ConnectivityCategory::C0);
        assert_eq!(connectivity_category(&Digraph::new(1).unwrap()), ConnectivityCategory::C3);
        assert_eq!(connectivity_category(&wheel(6, 6).unwrap()), ConnectivityCategory::C3);
    }

    #[test]
    fn disjoint_path_examples() {
        let k5 = complete(5).unwrap();
        for i in 1..=5 {
            for j in 1..=5 {
                if i != j {
                    assert_eq!(disjoint_paths(&k5, i, j).unwrap(), 4);
                }
            }
        }
        assert_eq!(disjoint_paths(&wheel(6, 6).unwrap(), 1, 3).unwrap(), 3);
        let p = directed_path(3).unwrap();
        assert_eq!(disjoint_paths(&p, 1, 3).unwrap(), 1);
        assert_eq!(disjoint_paths(&p, 3, 1).unwrap(), 0);
        assert!(disjoint_paths(&p, 2, 2).is_err());
    }

    #[test]
    fn strong_connectivity_examples() {
        assert_eq!(strong_connectivity(&complete(6).unwrap()).unwrap(), 5);
        assert_eq!(strong_connectivity(&wheel(6, 6).unwrap()).unwrap(), 3);
        assert_eq!(strong_connectivity(&cycle_bidirectional(7).unwrap()).unwrap(), 2);
        assert_eq!(strong_connectivity(&directed_path(3).unwrap()), Err(Error::NotStronglyConnected));
    }

    #[test]
    fn max_strong_robustness_examples() {
        assert_eq!(max_strong_robustness(&complete(6).unwrap()).unwrap(), 3);
        let w = max_strong_robustness(&wheel(6, 6).unwrap()).unwrap();
        assert!(w <= 2);
        assert_eq!(max_strong_robustness(&directed_path(4).unwrap()).unwrap(), 0);
    }

    #[test]
    fn predicted_counts_small_values() {
        assert_eq!(predicted_strong_robustness_tests(1), 0);
        assert_eq!(predicted_strong_robustness_tests(2), 2);
        assert_eq!(predicted_strong_robustness_tests(3), 12);
        assert_eq!(predicted_strong_robustness_tests(4), 48);
        assert_eq!(predicted_resilience_tests(3), 12);
    }

    #[test]
    fn audit_counts_on_complete_graph() {
        let rep = check_strongly_r_robust(&complete(4).unwrap(), 2, ScanMode::Audit).unwrap();
        assert!(rep.verdict);
        assert!(!rep.counter.early_exit_enabled);
        assert_eq!(rep.counter.tests as u128, predicted_strong_robustness_tests(4));
        let early = is_strongly_r_robust(&complete(4).unwrap(), 2).unwrap();
        assert!(early.counter.tests < rep.counter.tests);
    }

    #[test]
    fn strong_robustness_is_not_preserved_by_uniform_in_edge_removal() {
        // K4 is strongly 2-robust. Drop one incoming edge per node: every arc
        // out of node 4 plus (1, 4). Node 4 then has no out-edges, so {1,2,3}
        // has no in-edge and the result is not even strongly 1-robust.
        let k4 = complete(4).unwrap();
        assert!(is_strongly_r_robust(&k4, 2).unwrap().verdict);
        let mut g = k4.clone();
        for (j, i) in [(4, 1), (4, 2), (4, 3), (1, 4)] {
            g = g.remove_edge(j, i, false).unwrap();
        }
        assert!(g.nodes().all(|v| g.in_degree(v) == 2));
        let rep = is_strongly_r_robust(&g, 1).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.witness, Some(Witness::Subset(set(4, &[1, 2, 3]))));
    }
}
