//! Directed graph model with 1-based node labels.
//!
//! An edge `(j, i)` means node `j` transmits to node `i`. Undirected graphs
//! are digraphs carrying both arcs. Graphs are immutable once built; surgery
//! such as [`Digraph::remove_edge`] returns a new value.
//!
//! # Edge-list format
//!
//! ```text
//! # comment
//! n 4
//! e 1 2      directed edge 1 -> 2
//! u 2 3      both 2 -> 3 and 3 -> 2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

/// Node label in `1..=N`.
pub type Node = usize;

/// Largest graph the bitmask-based analyses accept.
pub const MAX_MASK_NODES: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    // Row-major N x N, adj[(j-1) * n + (i-1)] for edge (j, i).
    adj: Vec<bool>,
    ins: Vec<Vec<Node>>,
    outs: Vec<Vec<Node>>,
}

impl Digraph {
    /// Edgeless graph on `n >= 1` nodes.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        Ok(Self { n, adj: vec![false; n * n], ins: vec![Vec::new(); n], outs: vec![Vec::new(); n] })
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        let mut g = Self::new(n)?;
        for (j, i) in edges {
            g.check_node(j)?;
            g.check_node(i)?;
            if j == i {
                return Err(Error::SelfLoop(i));
            }
            g.adj[(j - 1) * n + (i - 1)] = true;
        }
        g.rebuild_lists();
        Ok(g)
    }

    /// Builds a graph where every listed pair becomes two opposite arcs.
    pub fn from_undirected_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        Self::from_edges(n, edges.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]))
    }

    fn rebuild_lists(&mut self) {
        let n = self.n;
        for v in self.ins.iter_mut().chain(self.outs.iter_mut()) {
            v.clear();
        }
        for j in 1..=n {
            for i in 1..=n {
                if self.adj[(j - 1) * n + (i - 1)] {
                    self.outs[j - 1].push(i);
                    self.ins[i - 1].push(j);
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.outs.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<Node> {
        1..=self.n
    }

    pub fn contains_node(&self, i: Node) -> bool {
        (1..=self.n).contains(&i)
    }

    pub(crate) fn check_node(&self, i: Node) -> Result<()> {
        if self.contains_node(i) {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: i, n: self.n })
        }
    }

    /// `true` iff `(j, i)` is an edge. Out-of-range labels are simply absent.
    pub fn has_edge(&self, j: Node, i: Node) -> bool {
        self.contains_node(j) && self.contains_node(i) && self.adj[(j - 1) * self.n + (i - 1)]
    }

    /// All edges ordered by `(source, destination)`.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.outs.iter().enumerate().flat_map(|(j, outs)| outs.iter().map(move |&i| (j + 1, i)))
    }

    pub fn in_neighbors(&self, i: Node) -> Result<NodeSubset> {
        self.check_node(i)?;
        Ok(NodeSubset { members: self.ins[i - 1].iter().copied().collect(), parent_size: self.n })
    }

    pub fn out_neighbors(&self, i: Node) -> Result<NodeSubset> {
        self.check_node(i)?;
        Ok(NodeSubset { members: self.outs[i - 1].iter().copied().collect(), parent_size: self.n })
    }

    /// Sorted in-neighbor slice. Panics on an out-of-range label.
    pub fn in_list(&self, i: Node) -> &[Node] {
        &self.ins[i - 1]
    }

    /// Sorted out-neighbor slice. Panics on an out-of-range label.
    pub fn out_list(&self, i: Node) -> &[Node] {
        &self.outs[i - 1]
    }

    pub fn in_degree(&self, i: Node) -> usize {
        self.ins[i - 1].len()
    }

    pub fn out_degree(&self, i: Node) -> usize {
        self.outs[i - 1].len()
    }

    /// `true` when every arc has its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(j, i)| self.has_edge(i, j))
    }

    /// Copy of the graph without `(j, i)` (and `(i, j)` when `bidirectional`).
    pub fn remove_edge(&self, j: Node, i: Node, bidirectional: bool) -> Result<Digraph> {
        self.check_node(j)?;
        self.check_node(i)?;
        if !self.has_edge(j, i) {
            return Err(Error::MissingEdge(j, i));
        }
        if bidirectional && !self.has_edge(i, j) {
            return Err(Error::MissingEdge(i, j));
        }
        let mut g = self.clone();
        g.adj[(j - 1) * self.n + (i - 1)] = false;
        if bidirectional {
            g.adj[(i - 1) * self.n + (j - 1)] = false;
        }
        g.rebuild_lists();
        Ok(g)
    }

    /// Copy of the graph with `(j, i)` (and `(i, j)` when `bidirectional`) added.
    pub fn add_edge(&self, j: Node, i: Node, bidirectional: bool) -> Result<Digraph> {
        let extra = if bidirectional { vec![(j, i), (i, j)] } else { vec![(j, i)] };
        Digraph::from_edges(self.n, self.edges().chain(extra))
    }

    /// Subgraph induced by `s`, relabelled to `1..=|s|` in increasing order.
    /// The second value maps old labels to new ones.
    pub fn induced_subgraph(&self, s: &NodeSubset) -> Result<(Digraph, BTreeMap<Node, Node>)> {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        for v in s.iter() {
            self.check_node(v)?;
        }
        let map: BTreeMap<Node, Node> = s.iter().enumerate().map(|(k, v)| (v, k + 1)).collect();
        let edges = self.edges().filter_map(|(j, i)| Some((*map.get(&j)?, *map.get(&i)?))).collect::<Vec<_>>();
        Ok((Digraph::from_edges(map.len(), edges)?, map))
    }

    /// In-neighborhood of `i` as a bitmask (bit `v - 1` for node `v`).
    pub(crate) fn in_mask(&self, i: Node) -> u64 {
        self.ins[i - 1].iter().fold(0u64, |m, &v| m | (1u64 << (v - 1)))
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_edge_list(self))
    }
}

impl FromStr for Digraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_edge_list(s)
    }
}

/// A set of node labels drawn from a graph on `parent_size` nodes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NodeSubset {
    members: BTreeSet<Node>,
    parent_size: usize,
}

impl NodeSubset {
    pub fn new<I>(parent_size: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Node>,
    {
        let members: BTreeSet<Node> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&v| v == 0 || v > parent_size) {
            return Err(Error::NodeOutOfRange { node: bad, n: parent_size });
        }
        Ok(Self { members, parent_size })
    }

    pub fn empty(parent_size: usize) -> Self {
        Self { members: BTreeSet::new(), parent_size }
    }

    pub fn full(parent_size: usize) -> Self {
        Self { members: (1..=parent_size).collect(), parent_size }
    }

    pub fn parent_size(&self) -> usize {
        self.parent_size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Node) -> bool {
        self.members.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = Node> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &BTreeSet<Node> {
        &self.members
    }

    pub fn complement(&self) -> NodeSubset {
        Self {
            members: (1..=self.parent_size).filter(|v| !self.members.contains(v)).collect(),
            parent_size: self.parent_size,
        }
    }

    pub(crate) fn from_mask(mask: u64, parent_size: usize) -> Self {
        Self { members: (1..=parent_size).filter(|&v| mask & (1u64 << (v - 1)) != 0).collect(), parent_size }
    }

    pub(crate) fn mask(&self) -> u64 {
        self.members.iter().fold(0u64, |m, &v| m | (1u64 << (v - 1)))
    }
}

impl fmt::Display for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.members {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// The complete digraph `K_n`.
pub fn complete(n: usize) -> Result<Digraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
    }
    Digraph::from_edges(n, (1..=n).flat_map(|j| (1..=n).filter(move |&i| i != j).map(move |i| (j, i))))
}

/// Wheel on `n >= 4` nodes: the non-hub nodes form a bidirectional cycle in
/// increasing label order and the hub is joined both ways to each of them.
pub fn wheel(n: usize, hub: Node) -> Result<Digraph> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("wheel needs n >= 4, got {n}")));
    }
    if hub == 0 || hub > n {
        return Err(Error::NodeOutOfRange { node: hub, n });
    }
    let rim: Vec<Node> = (1..=n).filter(|&v| v != hub).collect();
    let mut pairs: Vec<(Node, Node)> = rim.iter().map(|&v| (hub, v)).collect();
    for k in 0..rim.len() {
        pairs.push((rim[k], rim[(k + 1) % rim.len()]));
    }
    Digraph::from_undirected_edges(n, pairs)
}

/// Bidirectional ring `1 - 2 - ... - n - 1` for `n >= 3`.
pub fn cycle_bidirectional(n: usize) -> Result<Digraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    Digraph::from_undirected_edges(n, (1..=n).map(|v| (v, v % n + 1)))
}

/// Directed path `1 -> 2 -> ... -> n`.
pub fn directed_path(n: usize) -> Result<Digraph> {
    Digraph::from_edges(n, (1..n).map(|v| (v, v + 1)))
}

/// Each ordered pair becomes an arc independently with probability `p`.
pub fn random_digraph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let mut edges = Vec::new();
    for j in 1..=n {
        for i in 1..=n {
            if i != j && rng.gen_bool(p) {
                edges.push((j, i));
            }
        }
    }
    Digraph::from_edges(n, edges).expect("generated labels are in range")
}

/// Each unordered pair becomes a bidirectional edge with probability `p`.
pub fn random_undirected<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Digraph::from_undirected_edges(n, edges).expect("generated labels are in range")
}

pub fn parse_edge_list(text: &str) -> Result<Digraph> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(Node, Node)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| Error::Parse { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let number =
            |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected a non-negative integer, found `{s}`")));
        match fields[0] {
            "n" => {
                if fields.len() != 2 {
                    return Err(err("header must be `n <N>`".into()));
                }
                if n.is_some() {
                    return Err(err("duplicate `n` header".into()));
                }
                let count = number(fields[1])?;
                if count == 0 {
                    return Err(err("graph needs at least one node".into()));
                }
                n = Some(count);
            }
            kind @ ("e" | "u") => {
                let Some(count) = n else {
                    return Err(err("edge before `n <N>` header".into()));
                };
                if fields.len() != 3 {
                    return Err(err(format!("edge line must be `{kind} <a> <b>`")));
                }
                let a = number(fields[1])?;
                let b = number(fields[2])?;
                for v in [a, b] {
                    if v == 0 || v > count {
                        return Err(err(format!("node {v} is out of range 1..={count}")));
                    }
                }
                if a == b {
                    return Err(err(format!("self-loop on node {a}")));
                }
                edges.push((a, b));
                if kind == "u" {
                    edges.push((b, a));
                }
            }
            other => return Err(err(format!("unknown line kind `{other}`"))),
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, message: "missing `n <N>` header".into() })?;
    Digraph::from_edges(n, edges)
}

/// Canonical text form: header then one `e` line per arc in sorted order.
pub fn serialize_edge_list(g: &Digraph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    for (j, i) in g.edges() {
        out.push_str(&format!("e {j} {i}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, v: &[Node]) -> NodeSubset {
        NodeSubset::new(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn neighbors_of_small_families() {
        let k3 = complete(3).unwrap();
        assert_eq!(k3.in_neighbors(1).unwrap(), set(3, &[2, 3]));
        assert_eq!(k3.out_neighbors(1).unwrap(), set(3, &[2, 3]));

        let w = wheel(6, 6).unwrap();
        assert_eq!(w.in_neighbors(3).unwrap(), set(6, &[2, 4, 6]));
        assert_eq!(w.out_neighbors(6).unwrap(), set(6, &[1, 2, 3, 4, 5]));

        let single = Digraph::new(1).unwrap();
        assert!(single.in_neighbors(1).unwrap().is_empty());

        let p = directed_path(3).unwrap();
        assert!(p.out_neighbors(3).unwrap().is_empty());
    }

    #[test]
    fn neighbor_queries_reject_bad_labels() {
        let k3 = complete(3).unwrap();
        assert_eq!(k3.in_neighbors(0), Err(Error::NodeOutOfRange { node: 0, n: 3 }));
        assert_eq!(k3.out_neighbors(4), Err(Error::NodeOutOfRange { node: 4, n: 3 }));
    }

    #[test]
    fn complete_graph_shapes() {
        assert_eq!(complete(2).unwrap().edges().collect::<Vec<_>>(), vec![(1, 2), (2, 1)]);
        assert_eq!(complete(4).unwrap().edge_count(), 12);
        assert!(complete(0).is_err());
        let k7 = complete(7).unwrap();
        assert!(k7.nodes().all(|i| k7.in_neighbors(i).unwrap().len() == 6));
    }

    #[test]
    fn wheel_structure() {
        let w = wheel(6, 6).unwrap();
        assert_eq!(w.in_degree(6), 5);
        assert_eq!(w.out_degree(6), 5);
        assert!((1..=5).all(|v| w.in_degree(v) == 3));
        for (a, b) in [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)] {
            assert!(w.has_edge(a, b) && w.has_edge(b, a));
        }
        assert_eq!(wheel(4, 4).unwrap(), complete(4).unwrap());
        assert!(wheel(3, 3).is_err());
        let off_center = wheel(7, 2).unwrap();
        assert_eq!(off_center.in_degree(2), 6);
        assert!(off_center.has_edge(1, 3) && off_center.has_edge(7, 1));
    }

    #[test]
    fn cycle_structure() {
        assert_eq!(cycle_bidirectional(3).unwrap(), complete(3).unwrap());
        let c7 = cycle_bidirectional(7).unwrap();
        assert_eq!(c7.edge_count(), 14);
        assert!(c7.has_edge(7, 1) && c7.has_edge(1, 7));
        assert!(cycle_bidirectional(2).is_err());
    }

    #[test]
    fn remove_edge_is_copy_on_write() {
        let k3 = complete(3).unwrap();
        let g = k3.remove_edge(1, 2, false).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(k3.edge_count(), 6);
        assert!(!g.has_edge(1, 2) && g.has_edge(2, 1));
        assert_eq!(g.remove_edge(1, 2, false), Err(Error::MissingEdge(1, 2)));
        assert_eq!(g.remove_edge(2, 1, true), Err(Error::MissingEdge(1, 2)));
        assert_eq!(g.add_edge(1, 2, false).unwrap(), k3);
        let both = k3.remove_edge(1, 3, true).unwrap();
        assert_eq!(both.edge_count(), 4);
    }

    #[test]
    fn induced_subgraphs() {
        let (g, map) = complete(4).unwrap().induced_subgraph(&set(4, &[1, 2, 3])).unwrap();
        assert_eq!(g, complete(3).unwrap());
        assert_eq!(map.len(), 3);

        let (rim, _) = wheel(6, 6).unwrap().induced_subgraph(&set(6, &[1, 2, 3, 4, 5])).unwrap();
        assert_eq!(rim, cycle_bidirectional(5).unwrap());

        let (g, map) = wheel(6, 6).unwrap().induced_subgraph(&set(6, &[2, 4, 6])).unwrap();
        assert_eq!(map[&6], 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 3), (2, 3), (3, 1), (3, 2)]);

        assert_eq!(complete(4).unwrap().induced_subgraph(&NodeSubset::empty(4)), Err(Error::EmptySubset));
    }

    #[test]
    fn parse_examples() {
        let g = parse_edge_list("n 3\ne 1 2\ne 2 3\ne 3 1").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3), (3, 1)]);

        let u = parse_edge_list("# ring\nn 3\n\nu 1 2\nu 2 3\nu 3 1\n").unwrap();
        assert_eq!(u, complete(3).unwrap());

        let text = "n 3\ne 3 1\ne 1 2\ne 1 2\n";
        assert_eq!(serialize_edge_list(&parse_edge_list(text).unwrap()), "n 3\ne 1 2\ne 3 1\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_edge_list("n 2\ne 1 1").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, message: "self-loop on node 1".into() });
        assert!(matches!(parse_edge_list("e 1 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("n 3\ne 1 4"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("n 3\n\ne 1 x"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_edge_list("n 3\nq 1 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("n 3\nn 4"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("# nothing"), Err(Error::Parse { line: 0, .. })));
    }

    #[test]
    fn subset_helpers() {
        let s = set(5, &[2, 4]);
        assert_eq!(s.complement(), set(5, &[1, 3, 5]));
        assert_eq!(NodeSubset::from_mask(s.mask(), 5), s);
        assert_eq!(s.to_string(), "2 4");
        assert!(NodeSubset::new(3, [4]).is_err());
    }
}
