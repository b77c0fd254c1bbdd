//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a campaign found a counterexample, `2` usage
//! or input errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::connectivity::{analyze, ConnectivityReport, SeparationWitness};
use crate::graph::{Graph, GraphError, Split, StructureWitness, VertexSet};
use crate::harness::{self, CampaignKind, CampaignParams, RunOptions};
use crate::isotropic::{ElementSet, IsotropicMatroid, TransverseCircuitSearch};
use crate::localeq::{self, DEFAULT_MEMBER_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "isomat", version, about = "Isotropic matroids of looped simple graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Connectivity report: tau, kappa*, kappa, kappa_B, case labels, witnesses.
    Analyze {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        json: bool,
    },
    /// Pendant/twin structure and a split, or a primality certificate.
    Split {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        json: bool,
    },
    /// Smallest transverse circuit, or all transverse circuits inside tau(X).
    Circuits {
        #[command(flatten)]
        input: GraphInput,
        /// Largest circuit size to search for.
        #[arg(long)]
        cap: Option<usize>,
        /// Comma-separated vertex set X; lists the transverse circuits in tau(X).
        #[arg(long)]
        within: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Local-equivalence class summary.
    Orbit {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = DEFAULT_MEMBER_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run an exhaustive verification campaign; writes a JSON-lines report.
    Verify {
        /// cconnect, vconnect, expdegree, halfcirc, lowdeg, oracle, foursep or unique.
        campaign: String,
        /// Largest vertex count.
        #[arg(long)]
        n: usize,
        /// Smallest vertex count (defaults depend on the campaign).
        #[arg(long)]
        n_min: Option<usize>,
        /// Include every loop pattern.
        #[arg(long)]
        loops: bool,
        #[arg(long, env = "ISOMAT_THREADS", default_value_t = 0)]
        threads: usize,
        /// Checkpoint file; resumed from if it exists.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stop after this many batches (the checkpoint allows resuming).
        #[arg(long)]
        stop_after: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in graph.
    Fixture {
        /// c5, w5, w6, w7, k44, k2 or p4.
        name: String,
        #[arg(long)]
        hex: bool,
    },
}

#[derive(Args, Debug, Default)]
struct GraphInput {
    /// File with one graph in text form, or one hex-encoded graph per line.
    file: Option<PathBuf>,
    /// Built-in graph name.
    #[arg(long, conflicts_with_all = ["file", "n"])]
    fixture: Option<String>,
    /// Vertex count for an inline graph.
    #[arg(long, conflicts_with = "file")]
    n: Option<usize>,
    /// Inline edges, e.g. "0-1,1-2".
    #[arg(long, requires = "n", allow_hyphen_values = true)]
    edges: Option<String>,
    /// Inline looped vertices, e.g. "0,2".
    #[arg(long, requires = "n")]
    loops: Option<String>,
}

#[derive(Debug)]
struct UsageError(String);

impl From<GraphError> for UsageError {
    fn from(e: GraphError) -> Self {
        UsageError(e.to_string())
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, UsageError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| UsageError(format!("bad {what} {t:?}"))))
        .collect()
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>, UsageError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once('-')
                .ok_or_else(|| UsageError(format!("bad edge {t:?}, expected u-v")))?;
            let p = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| UsageError(format!("bad edge {t:?}")))
            };
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

/// Parses a corpus: a single text-form graph, or hex graphs one per line.
pub fn parse_graphs(text: &str) -> Result<Vec<Graph>, GraphError> {
    let content = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty());
    match content {
        None => Err(GraphError::Parse("no graph in input".into())),
        Some(l) if l.starts_with("n=") => Ok(vec![Graph::parse_text(text)?]),
        Some(_) => text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(Graph::from_hex)
            .collect(),
    }
}

impl GraphInput {
    fn graphs(&self) -> Result<Vec<Graph>, UsageError> {
        if let Some(name) = &self.fixture {
            return harness::fixture(name)
                .map(|g| vec![g])
                .ok_or_else(|| UsageError(format!("unknown fixture {name:?}")));
        }
        if let Some(n) = self.n {
            let edges = parse_edges(self.edges.as_deref().unwrap_or(""))?;
            let loops = parse_list(self.loops.as_deref().unwrap_or(""), "loop vertex")?;
            return Ok(vec![Graph::from_edges(n, &edges, &loops)?]);
        }
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            return Ok(parse_graphs(&text)?);
        }
        Err(UsageError(
            "no graph given: use FILE, --fixture NAME or --n N [--edges ..] [--loops ..]".into(),
        ))
    }
}

enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Output goes to the given writers.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string(value).expect("serializable"))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Analyze { input, json } => {
            for g in input.graphs()? {
                let report = analyze(&g);
                if json {
                    emit_json(out, &json!({ "graph": g, "report": report }))?;
                } else {
                    write!(out, "{}", analyze_table(&g, &report))?;
                }
            }
        }
        Command::Split { input, json } => {
            for g in input.graphs()? {
                let structure = g.find_pendant_or_twins();
                let split = g.find_split();
                if json {
                    emit_json(
                        out,
                        &json!({ "graph": g, "prime": split.is_none(), "structure": structure, "split": split }),
                    )?;
                } else {
                    write!(out, "{}", split_table(&g, structure, split))?;
                }
            }
        }
        Command::Circuits {
            input,
            cap,
            within,
            json,
        } => {
            let within = within
                .map(|w| parse_list(&w, "vertex"))
                .transpose()?;
            for g in input.graphs()? {
                let m = IsotropicMatroid::build(&g);
                match &within {
                    Some(xs) => {
                        let x = vertex_set(&g, xs)?;
                        let circuits = m.transverse_circuits_in(x);
                        if json {
                            emit_json(out, &json!({ "graph": g, "within": x, "circuits": circuits }))?;
                        } else {
                            writeln!(out, "graph      {}", g.to_hex())?;
                            writeln!(out, "within     {}", fmt_vertices(x))?;
                            writeln!(out, "circuits   {}", circuits.len())?;
                            for c in &circuits {
                                writeln!(out, "  {}", fmt_elements(c))?;
                            }
                        }
                    }
                    None => {
                        let search = m
                            .min_transverse_circuit(cap)
                            .map_err(|e| UsageError(e.to_string()))?;
                        if json {
                            emit_json(out, &json!({ "graph": g, "search": search }))?;
                        } else {
                            writeln!(out, "graph      {}", g.to_hex())?;
                            match search {
                                TransverseCircuitSearch::Found { q, witness } => {
                                    writeln!(out, "q          {q}")?;
                                    writeln!(out, "witness    {}", fmt_elements(witness.set()))?;
                                }
                                TransverseCircuitSearch::ExceedsCap { cap } => {
                                    writeln!(out, "q          > {cap}")?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Command::Orbit { input, cap, json } => {
            for g in input.graphs()? {
                let o = localeq::orbit(&g, cap).map_err(|e| UsageError(e.to_string()))?;
                let s = o.summary();
                if json {
                    emit_json(out, &s)?;
                } else {
                    writeln!(out, "seed           {}", s.seed.to_hex())?;
                    writeln!(out, "size           {}{}", s.size, if s.truncated { " (truncated)" } else { "" })?;
                    if let (Some(d), Some(rep)) = (s.min_degree, &s.representative) {
                        writeln!(out, "min degree     {d}")?;
                        writeln!(out, "representative {}", rep.to_hex())?;
                    }
                }
            }
        }
        Command::Verify {
            campaign,
            n,
            n_min,
            loops,
            threads,
            checkpoint,
            stop_after,
            out: out_path,
        } => {
            let kind: CampaignKind = campaign.parse().map_err(|e: harness::HarnessError| UsageError(e.to_string()))?;
            let n_min = n_min.unwrap_or_else(|| kind.default_n_min(n));
            let params = CampaignParams::new(kind, n_min, n, loops).map_err(|e| UsageError(e.to_string()))?;
            let opts = RunOptions {
                threads,
                checkpoint,
                stop_after_batches: stop_after,
            };
            let report = harness::run_campaign(&params, &opts).map_err(|e| UsageError(e.to_string()))?;
            match out_path {
                Some(p) => {
                    let mut f = std::fs::File::create(&p)?;
                    report.write_jsonl(&mut f)?;
                }
                None => report.write_jsonl(out)?,
            }
            if !report.passed() {
                return Ok(EXIT_COUNTEREXAMPLE);
            }
        }
        Command::Fixture { name, hex } => {
            let g = harness::fixture(&name).ok_or_else(|| UsageError(format!("unknown fixture {name:?}")))?;
            if hex {
                writeln!(out, "{}", g.to_hex())?;
            } else {
                write!(out, "{g}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn vertex_set(g: &Graph, xs: &[usize]) -> Result<VertexSet, UsageError> {
    if let Some(&v) = xs.iter().find(|&&v| v >= g.n()) {
        return Err(UsageError(format!("vertex {v} out of range for n={}", g.n())));
    }
    Ok(xs.iter().copied().collect())
}

fn fmt_vertices(x: VertexSet) -> String {
    let items: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn fmt_elements(s: &ElementSet) -> String {
    let items: Vec<String> = s.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn fmt_witness(w: &SeparationWitness) -> String {
    let set = match (&w.elements, w.vertices) {
        (Some(e), _) => fmt_elements(e),
        (None, Some(x)) => format!("X={}", fmt_vertices(x)),
        _ => "-".into(),
    };
    format!("{:?} {set}  lambda={} < k={}", w.kind, w.lambda_value, w.k)
}

fn analyze_table(g: &Graph, r: &ConnectivityReport) -> String {
    let mut s = String::new();
    let row = |s: &mut String, k: &str, v: String| {
        let _ = writeln!(s, "{k:<17}{v}");
    };
    row(&mut s, "graph", g.to_hex());
    row(&mut s, "n", r.n.to_string());
    row(&mut s, "tau", r.tau.to_string());
    row(&mut s, "kappa*", r.kappa_star.to_string());
    row(&mut s, "kappa", r.kappa.to_string());
    row(&mut s, "kappa_B", r.kappa_b.to_string());
    row(&mut s, "case (cyclic)", r.case_thm1.to_string());
    row(
        &mut s,
        "case (vertical)",
        r.case_thm2.map_or("unclassified".into(), |c| c.to_string()),
    );
    if let Some(f) = r.family {
        row(&mut s, "family", format!("{f:?}"));
    }
    if let Some(w) = &r.witnesses.tau {
        row(&mut s, "tau witness", fmt_witness(w));
    }
    if let Some(w) = &r.witnesses.kappa {
        row(&mut s, "kappa witness", fmt_witness(w));
    }
    if let Some(w) = &r.witnesses.kappa_b {
        row(&mut s, "kappa_B witness", fmt_witness(w));
    }
    s
}

fn split_table(g: &Graph, structure: Option<StructureWitness>, split: Option<Split>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph      {}", g.to_hex());
    match structure {
        Some(StructureWitness::Pendant { vertex, on }) => {
            let _ = writeln!(s, "pendant    {vertex} (on {on})");
        }
        Some(StructureWitness::Twins { a, b }) => {
            let _ = writeln!(s, "twins      {a} {b}");
        }
        None => {
            let _ = writeln!(s, "pendant/twins none");
        }
    }
    match split {
        Some(sp) => {
            let _ = writeln!(
                s,
                "split      V1={} W1={} V2={} W2={}",
                fmt_vertices(sp.v1),
                fmt_vertices(sp.w1),
                fmt_vertices(sp.v2),
                fmt_vertices(sp.w2)
            );
        }
        None => {
            let _ = writeln!(s, "prime      yes");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<&str> = std::iter::once("isomat").chain(args.iter().copied()).collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn inline_edge_and_loop_lists() {
        assert_eq!(parse_edges("0-1, 1-2,").unwrap(), vec![(0, 1), (1, 2)]);
        assert!(parse_edges("0-").is_err());
        assert!(parse_edges("01").is_err());
        assert_eq!(parse_list("", "v").unwrap(), Vec::<usize>::new());
        assert!(parse_list("a", "v").is_err());
    }

    #[test]
    fn corpus_forms() {
        let text = "# corpus\n5:0000\n3:3f  # triangle, all looped\n";
        let gs = parse_graphs(text).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[1], Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)], &[0, 1, 2]).unwrap());
        let g = Graph::cycle(5);
        assert_eq!(parse_graphs(&g.to_text()).unwrap(), vec![g]);
        assert!(parse_graphs("# nothing\n").is_err());
    }

    #[test]
    fn table_output_mentions_every_parameter() {
        let (code, out, _) = call(&["analyze", "--fixture", "c5"]);
        assert_eq!(code, 0);
        for key in ["tau", "kappa*", "kappa_B", "inf", "C5"] {
            assert!(out.contains(key), "{out}");
        }
        let (code, out, _) = call(&["split", "--fixture", "p4"]);
        assert_eq!(code, 0);
        assert!(out.contains("pendant"));
        let (code, out, _) = call(&["circuits", "--fixture", "k44"]);
        assert_eq!(code, 0);
        assert!(out.contains("q          4"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["analyze"]).0, EXIT_USAGE);
        assert_eq!(call(&["analyze", "--fixture", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["analyze", "--n", "2", "--edges", "0-5"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "nope", "--n", "3"]).0, EXIT_USAGE);
        assert_eq!(call(&["circuits", "--fixture", "c5", "--within", "9"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
        assert_eq!(call(&["--version"]).0, EXIT_OK);
    }
}
