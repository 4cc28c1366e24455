//! Search for undirected graphs with prescribed strong-robustness behavior.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resavg_core::digraph::{Digraph, Node};
use resavg_core::robustness::is_strongly_r_robust;
use resavg_core::{Error, Result};

/// Largest N searched exhaustively; above it candidates are sampled.
pub const MAX_ENUMERATED_NODES: usize = 7;

/// Sampling budget for N above [`MAX_ENUMERATED_NODES`].
pub const SAMPLE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureQuery {
    pub n: usize,
    pub r: usize,
    pub must_contain: Option<(Node, Node)>,
    /// Require that deleting `must_contain` in both directions destroys
    /// strong r-robustness.
    pub break_on_removal: bool,
    pub seed: u64,
}

impl FixtureQuery {
    fn accepts(&self, g: &Digraph) -> Result<bool> {
        if !is_strongly_r_robust(g, self.r)?.verdict {
            return Ok(false);
        }
        match (self.break_on_removal, self.must_contain) {
            (true, Some((a, b))) => Ok(!is_strongly_r_robust(&g.remove_edge(a, b, true)?, self.r)?.verdict),
            _ => Ok(true),
        }
    }
}

/// First undirected graph, in a seed-determined order, meeting `q`; `None`
/// when the candidate space or sampling budget is exhausted. No graph is
/// strongly r-robust for `r > ceil(N / 2)`, so such queries exhaust at once.
pub fn search_fixture(q: &FixtureQuery) -> Result<Option<Digraph>> {
    if q.n < 2 {
        return Err(Error::InvalidParameter("search needs at least 2 nodes".into()));
    }
    if q.r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if q.break_on_removal && q.must_contain.is_none() {
        return Err(Error::InvalidParameter("--break-on-removal needs --must-contain-edge".into()));
    }
    if let Some((a, b)) = q.must_contain {
        for v in [a, b] {
            if v == 0 || v > q.n {
                return Err(Error::NodeOutOfRange { node: v, n: q.n });
            }
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
    }
    if q.r > q.n.div_ceil(2) {
        return Ok(None);
    }
    let pairs: Vec<(Node, Node)> = (1..=q.n).flat_map(|i| (i + 1..=q.n).map(move |j| (i, j))).collect();
    let required = q.must_contain.map(|(a, b)| (a.min(b), a.max(b)));
    let free: Vec<(Node, Node)> = pairs.iter().copied().filter(|p| Some(*p) != required).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);

    let build = |chosen: &mut dyn Iterator<Item = (Node, Node)>| {
        Digraph::from_undirected_edges(q.n, required.into_iter().chain(chosen))
    };

    if q.n <= MAX_ENUMERATED_NODES {
        let mut masks: Vec<u32> = (0..1u32 << free.len()).collect();
        masks.shuffle(&mut rng);
        for mask in masks {
            let g = build(&mut free.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, p)| *p))?;
            if q.accepts(&g)? {
                return Ok(Some(g));
            }
        }
        return Ok(None);
    }
    for _ in 0..SAMPLE_BUDGET {
        let p: f64 = rng.gen_range(0.3..0.95);
        let keep: Vec<bool> = free.iter().map(|_| rng.gen_bool(p)).collect();
        let g = build(&mut free.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p))?;
        if q.accepts(&g)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}
