//! TOML scenario files.
//!
//! ```toml
//! [graph]
//! file = "graphs/fig3.el"        # or: generator = "wheel", n = 6, hub = 6
//! remove = [[3, 5]]              # undirected removals applied afterward
//!
//! [protocol]
//! f = 1
//! safe_interval = [0.0, 10.0]
//!
//! [nodes]
//! initial_values = "labels"      # or an array, one value per node
//! epsilon = 0.0                  # or an array
//!
//! [[adversaries]]
//! node = 4
//! kind = "constant-lie"
//! target_labels = [1, 2, 3, 5, 6]
//! value = 1.5
//! from_round = 2
//!
//! [schedule]
//! mode = "sync"
//! ```
//!
//! Relative graph paths resolve against the scenario file's directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use resavg_core::adversary::AdversaryStrategy;
use resavg_core::digraph::{self, Digraph, Node};
use resavg_core::protocol::{PhiMode, SafeInterval};
use resavg_core::simulator::{Admissibility, DelayRule, Mode, ScenarioConfig, UpdateRule};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    graph: GraphSection,
    protocol: ProtocolSection,
    nodes: NodesSection,
    #[serde(default)]
    adversaries: Vec<AdversaryEntry>,
    #[serde(default)]
    schedule: ScheduleSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    file: Option<String>,
    generator: Option<String>,
    n: Option<usize>,
    hub: Option<usize>,
    edges: Option<Vec<[usize; 2]>>,
    undirected_edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    remove: Vec<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    f: usize,
    n_bar: Option<usize>,
    k_max: Option<u64>,
    #[serde(default)]
    phi_mode: PhiModeName,
    safe_interval: Option<[f64; 2]>,
    expected_average: Option<f64>,
    #[serde(default)]
    admissibility: AdmissibilityName,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PhiModeName {
    #[default]
    IncludeAll,
    ExcludeDetected,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum AdmissibilityName {
    #[default]
    FLocal,
    FTotal,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodesSection {
    initial_values: Values,
    #[serde(default)]
    epsilon: Gains,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Values {
    List(Vec<f64>),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Gains {
    Uniform(f64),
    List(Vec<f64>),
}

impl Default for Gains {
    fn default() -> Self {
        Gains::Uniform(0.0)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdversaryEntry {
    node: Node,
    kind: String,
    target_labels: Option<Vec<Node>>,
    value: Option<f64>,
    from_round: Option<u64>,
    honest_value: Option<f64>,
    new_value: Option<f64>,
    switch_round: Option<u64>,
    per_neighbor: Option<Vec<Override>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Override {
    neighbor: Node,
    label: Node,
    value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSection {
    #[serde(default)]
    mode: ModeName,
    #[serde(default = "one")]
    k_bar: u64,
    #[serde(default)]
    tau_bar: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    updates: DrawName,
    #[serde(default)]
    node_updates: Vec<NodeUpdates>,
    #[serde(default)]
    delays: DelayName,
    #[serde(default)]
    edge_delays: Vec<EdgeDelay>,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            mode: ModeName::Sync,
            k_bar: 1,
            tau_bar: 0,
            seed: 0,
            updates: DrawName::EveryRound,
            node_updates: Vec::new(),
            delays: DelayName::Zero,
            edge_delays: Vec::new(),
        }
    }
}

fn one() -> u64 {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeName {
    #[default]
    Sync,
    Async,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DrawName {
    #[default]
    EveryRound,
    Random,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DelayName {
    #[default]
    Zero,
    Random,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeUpdates {
    node: Node,
    period: Option<u64>,
    rounds: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDelay {
    from: Node,
    to: Node,
    delay: u64,
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base).map_err(|message| CliError::Config { path: path.to_path_buf(), message })
}

/// Parses scenario text; graph files resolve against `base`.
pub fn parse_scenario(text: &str, base: &Path) -> Result<ScenarioConfig, String> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| e.to_string())?;
    let graph = build_graph(&file.graph, base)?;
    let n = graph.node_count();

    let initial_values: BTreeMap<Node, f64> = match &file.nodes.initial_values {
        Values::Keyword(k) if k == "labels" => graph.nodes().map(|i| (i, i as f64)).collect(),
        Values::Keyword(k) => {
            return Err(format!("nodes.initial_values: unknown keyword `{k}`, expected \"labels\" or an array"))
        }
        Values::List(v) if v.len() != n => {
            return Err(format!("nodes.initial_values: {} values for {n} nodes", v.len()));
        }
        Values::List(v) => (1..=n).zip(v.iter().copied()).collect(),
    };

    let mut cfg = ScenarioConfig::new(graph, initial_values);
    match &file.nodes.epsilon {
        Gains::Uniform(e) => cfg.default_epsilon = *e,
        Gains::List(v) if v.len() != n => return Err(format!("nodes.epsilon: {} gains for {n} nodes", v.len())),
        Gains::List(v) => cfg.epsilon = (1..=n).zip(v.iter().copied()).collect(),
    }

    let p = &file.protocol;
    cfg.f = p.f;
    cfg.n_bar = p.n_bar.unwrap_or(n);
    cfg.k_max = p.k_max;
    cfg.phi_mode = match p.phi_mode {
        PhiModeName::IncludeAll => PhiMode::IncludeAll,
        PhiModeName::ExcludeDetected => PhiMode::ExcludeDetected,
    };
    if let Some([lo, hi]) = p.safe_interval {
        cfg.safe_interval = SafeInterval::new(lo, hi).map_err(|e| format!("protocol.safe_interval: {e}"))?;
    }
    cfg.expected_average = p.expected_average;
    cfg.admissibility = match p.admissibility {
        AdmissibilityName::FLocal => Admissibility::FLocal,
        AdmissibilityName::FTotal => Admissibility::FTotal,
    };

    for entry in &file.adversaries {
        let strategy = build_strategy(entry).map_err(|e| format!("adversaries (node {}): {e}", entry.node))?;
        if cfg.adversaries.insert(entry.node, strategy).is_some() {
            return Err(format!("adversaries: node {} has more than one strategy", entry.node));
        }
    }

    let s = &file.schedule;
    cfg.mode = match s.mode {
        ModeName::Sync => Mode::Sync,
        ModeName::Async => Mode::Async,
    };
    cfg.k_bar = s.k_bar;
    cfg.tau_bar = s.tau_bar;
    cfg.seed = s.seed;
    cfg.schedule.default_updates = match s.updates {
        DrawName::EveryRound => UpdateRule::EveryRound,
        DrawName::Random => UpdateRule::Random,
    };
    for nu in &s.node_updates {
        let rule = match (nu.period, &nu.rounds) {
            (Some(p), None) => UpdateRule::Period(p),
            (None, Some(r)) => UpdateRule::Rounds(r.clone()),
            _ => {
                return Err(format!("schedule.node_updates (node {}): give exactly one of `period`, `rounds`", nu.node))
            }
        };
        if cfg.schedule.updates.insert(nu.node, rule).is_some() {
            return Err(format!("schedule.node_updates: node {} listed twice", nu.node));
        }
    }
    cfg.schedule.delays = match s.delays {
        DelayName::Zero => DelayRule::Zero,
        DelayName::Random => DelayRule::Random,
    };
    for d in &s.edge_delays {
        cfg.schedule.edge_delays.insert((d.from, d.to), d.delay);
    }

    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn build_graph(g: &GraphSection, base: &Path) -> Result<Digraph, String> {
    let sources = [g.file.is_some(), g.generator.is_some(), g.edges.is_some() || g.undirected_edges.is_some()];
    if sources.iter().filter(|s| **s).count() != 1 {
        return Err("graph: give exactly one of `file`, `generator`, or inline `edges`/`undirected_edges`".into());
    }
    let err = |field: &str, e: resavg_core::Error| format!("graph.{field}: {e}");
    let mut graph = if let Some(file) = &g.file {
        let path = base.join(file);
        let text = std::fs::read_to_string(&path).map_err(|e| format!("graph.file: {}: {e}", path.display()))?;
        digraph::parse_edge_list(&text).map_err(|e| err("file", e))?
    } else if let Some(name) = &g.generator {
        let n = g.n.ok_or("graph.n: required with `generator`")?;
        match name.as_str() {
            "complete" => digraph::complete(n),
            "wheel" => digraph::wheel(n, g.hub.unwrap_or(n)),
            "cycle" => digraph::cycle_bidirectional(n),
            "path" => digraph::directed_path(n),
            other => return Err(format!("graph.generator: unknown family `{other}`")),
        }
        .map_err(|e| err("generator", e))?
    } else {
        let n = g.n.ok_or("graph.n: required with inline edges")?;
        let directed = g.edges.iter().flatten().map(|[a, b]| (*a, *b));
        let undirected = g.undirected_edges.iter().flatten().flat_map(|[a, b]| [(*a, *b), (*b, *a)]);
        Digraph::from_edges(n, directed.chain(undirected)).map_err(|e| err("edges", e))?
    };
    for [a, b] in &g.remove {
        graph = graph.remove_edge(*a, *b, true).map_err(|e| err("remove", e))?;
    }
    Ok(graph)
}

fn build_strategy(e: &AdversaryEntry) -> Result<AdversaryStrategy, String> {
    let need = |v: Option<f64>, field: &str| v.ok_or_else(|| format!("`{field}` is required for kind `{}`", e.kind));
    let (strategy, used): (AdversaryStrategy, &[&str]) = match e.kind.as_str() {
        "constant-lie" => (
            AdversaryStrategy::ConstantLie {
                target_labels: e
                    .target_labels
                    .clone()
                    .ok_or("`target_labels` is required for kind `constant-lie`")?
                    .into_iter()
                    .collect(),
                value: need(e.value, "value")?,
                from_round: e.from_round.unwrap_or(1),
            },
            &["target_labels", "value", "from_round"],
        ),
        "switch-own" => (
            AdversaryStrategy::SwitchOwn {
                honest_value: need(e.honest_value, "honest_value")?,
                new_value: need(e.new_value, "new_value")?,
                switch_round: e.switch_round.ok_or("`switch_round` is required for kind `switch-own`")?,
            },
            &["honest_value", "new_value", "switch_round"],
        ),
        "equivocate" => {
            let mut per_neighbor: BTreeMap<Node, BTreeMap<Node, f64>> = BTreeMap::new();
            for o in e.per_neighbor.iter().flatten() {
                per_neighbor.entry(o.neighbor).or_default().insert(o.label, o.value);
            }
            (AdversaryStrategy::Equivocate { per_neighbor }, &["per_neighbor"])
        }
        "out-of-interval" => (AdversaryStrategy::OutOfInterval { value: need(e.value, "value")? }, &["value"]),
        "silent" => (AdversaryStrategy::Silent, &[]),
        "honest" => (AdversaryStrategy::Honest, &[]),
        other => return Err(format!("unknown kind `{other}`")),
    };
    let present: BTreeSet<&str> = [
        ("target_labels", e.target_labels.is_some()),
        ("value", e.value.is_some()),
        ("from_round", e.from_round.is_some()),
        ("honest_value", e.honest_value.is_some()),
        ("new_value", e.new_value.is_some()),
        ("switch_round", e.switch_round.is_some()),
        ("per_neighbor", e.per_neighbor.is_some()),
    ]
    .into_iter()
    .filter_map(|(name, set)| set.then_some(name))
    .collect();
    if let Some(extra) = present.iter().find(|f| !used.contains(f)) {
        return Err(format!("field `{extra}` does not apply to kind `{}`", e.kind));
    }
    Ok(strategy)
}
