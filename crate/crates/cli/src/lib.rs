//! Command-line front end for the resilient averaging toolkit.
//!
//! Exit codes: 0 for success or a true verdict, 1 for a false verdict or an
//! exhausted search, 2 for usage and configuration errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use resavg_core::digraph::{self, parse_edge_list, serialize_edge_list, Digraph, Node, NodeSubset};
use resavg_core::robustness::{self, ConnectivityCategory, ScanMode};
use resavg_core::simulator;

pub mod report;
pub mod scenario;
pub mod search;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] resavg_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "resavg", version, about = "Byzantine-resilient averaging: simulation and graph robustness analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write trace.csv, messages.csv and summary.txt.
    Simulate { scenario: PathBuf, out_dir: PathBuf },
    /// Evaluate a robustness or resiliency condition on a graph file.
    Check {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: CheckKind,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        f: Option<usize>,
        /// Comma-separated node set for `strong-robust-wrt`.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<Node>>,
        /// Disable early exit and report counted against predicted tests.
        #[arg(long)]
        audit: bool,
    },
    /// Connectivity category, strong connectivity and disjoint-path counts.
    Connectivity {
        graph: PathBuf,
        /// Print the pairwise node-disjoint path matrix.
        #[arg(long)]
        paths: bool,
    },
    /// Search for an undirected graph with prescribed strong robustness.
    SearchFixture {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_parser = parse_pair)]
        must_contain_edge: Option<(Node, Node)>,
        #[arg(long)]
        break_on_removal: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a generated graph as an edge list.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        hub: Option<Node>,
    },
    /// Count how often random digraphs are strongly (2f+1)-robust, f-resilient, or both.
    Survey {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0.7)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Robust,
    StrongRobust,
    StrongRobustWrt,
    Resilient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Complete,
    Wheel,
    Cycle,
}

fn parse_pair(s: &str) -> Result<(Node, Node), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<Node>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let stdout = |out: &mut dyn Write, text: &str| {
        out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
    };
    match cmd {
        Command::Simulate { scenario, out_dir } => {
            let cfg = scenario::load_scenario(scenario)?;
            let trace = simulator::run(&cfg)?;
            let summary = report::format_summary(&trace);
            std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
            for (name, body) in [
                ("trace.csv", trace.to_csv()),
                ("messages.csv", trace.messages_csv()),
                ("summary.txt", summary.clone()),
            ] {
                let path = out_dir.join(name);
                std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
            }
            stdout(out, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Check { graph, kind, r, f, set, audit } => {
            let g = load_graph(graph)?;
            let mode = if *audit { ScanMode::Audit } else { ScanMode::EarlyExit };
            let need_r = || r.ok_or_else(|| CliError::Usage("--r is required for this kind".into()));
            let report = match kind {
                CheckKind::Robust if !*audit => robustness::is_r_robust(&g, need_r()?)?,
                CheckKind::StrongRobust => robustness::check_strongly_r_robust(&g, need_r()?, mode)?,
                CheckKind::StrongRobustWrt if !*audit => {
                    let members =
                        set.clone().ok_or_else(|| CliError::Usage("--set is required for strong-robust-wrt".into()))?;
                    let s = NodeSubset::new(g.node_count(), members)?;
                    robustness::is_strongly_r_robust_wrt(&g, &s, need_r()?)?
                }
                CheckKind::Resilient => {
                    let f = f.ok_or_else(|| CliError::Usage("--f is required for resilient".into()))?;
                    robustness::check_f_resilient(&g, f, mode)?
                }
                _ => return Err(CliError::Usage("--audit applies to strong-robust and resilient only".into())),
            };
            stdout(out, &report::format_report(&report, g.node_count(), *audit))?;
            Ok(if report.verdict { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Connectivity { graph, paths } => {
            let g = load_graph(graph)?;
            let mut text = String::new();
            let category = robustness::connectivity_category(&g);
            text.push_str(&format!("category: {category}\n"));
            if category == ConnectivityCategory::C3 {
                text.push_str(&format!("kappa3: {}\n", robustness::strong_connectivity(&g)?));
            }
            if *paths {
                text.push_str("disjoint_paths:\n");
                for i in g.nodes() {
                    let row: Vec<String> = g
                        .nodes()
                        .map(|j| {
                            if i == j {
                                Ok("-".to_string())
                            } else {
                                robustness::disjoint_paths(&g, i, j).map(|p| p.to_string())
                            }
                        })
                        .collect::<Result<_, _>>()?;
                    text.push_str(&row.join(" "));
                    text.push('\n');
                }
            }
            stdout(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::SearchFixture { n, r, must_contain_edge, break_on_removal, seed } => {
            let q = search::FixtureQuery {
                n: *n,
                r: *r,
                must_contain: *must_contain_edge,
                break_on_removal: *break_on_removal,
                seed: *seed,
            };
            match search::search_fixture(&q)? {
                Some(g) => {
                    stdout(out, &serialize_edge_list(&g))?;
                    Ok(EXIT_OK)
                }
                None => {
                    stdout(out, "exhausted: no graph satisfies the constraints\n")?;
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Gen { family, n, hub } => {
            let g = match family {
                Family::Complete => digraph::complete(*n)?,
                Family::Wheel => digraph::wheel(*n, hub.unwrap_or(*n))?,
                Family::Cycle => digraph::cycle_bidirectional(*n)?,
            };
            stdout(out, &serialize_edge_list(&g))?;
            Ok(EXIT_OK)
        }
        Command::Survey { n, f, samples, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let s = robustness::survey_strong_vs_resilient(*n, *f, *samples, *p, &mut rng)?;
            let text = format!(
                "samples: {}\nstrongly_robust: {}\nresilient: {}\nboth: {}\n",
                s.samples, s.strongly_robust, s.resilient, s.both
            );
            stdout(out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

pub fn load_graph(path: &Path) -> Result<Digraph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_edge_list(&text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })
}
