//! Command-line front end: solve, verify, metrics, count.
//!
//! Exit codes are a stable contract: 0 success, 1 error, 2 no solutions.

use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuit::Gate;
use crate::counter::compare_counters;
use crate::graph::{parse_graph, Graph, GraphFormat, VertexSet};
use crate::grover::{run_grover, ExecMode, RunOptions, SolutionCountSource};
use crate::oracle::{build_oracle, build_u_omega, phase_mcx_controls, plan_layout, WidthPolicy};
use crate::qcount::{run_quantum_counting, CountingConfig};
use crate::sim::{extract_phase_table, Histogram, SimError, DEFAULT_DENSE_QUBIT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_SOLUTIONS: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "grover-domset",
    about = "Grover search for size-k dominating sets on small graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the search and print the measurement histogram
    Solve(SolveArgs),
    /// Check the oracle's phase table against brute force
    Verify(VerifyArgs),
    /// Compare baseline and improved counter circuits
    Metrics(MetricsArgs),
    /// Estimate the solution count by phase estimation
    Count(CountArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Dimacs,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dense,
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Per-vertex checker widths sized so counters cannot wrap
    Exact,
    /// Two counting qubits per checker
    #[value(name = "paper2")]
    Uniform2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutArg {
    Json,
    Csv,
    Ascii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MSourceArg {
    /// Exact M from brute-force enumeration
    Classical,
    /// M estimated by the counting circuit
    Qcount,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Path to the instance file
    #[arg(long)]
    pub graph: PathBuf,
    /// Input format; inferred from the extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Target dominating-set size
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "compressed")]
    pub mode: ModeArg,
    #[arg(long = "width-policy", value_enum, default_value = "exact")]
    pub width_policy: PolicyArg,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Override the repetition count floor(pi/4 sqrt(N/M))
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum, default_value = "ascii")]
    pub out: OutArg,
    /// Dense-mode qubit limit (2^q amplitudes are allocated)
    #[arg(long = "dense-cap", default_value_t = DEFAULT_DENSE_QUBIT_CAP)]
    pub dense_cap: usize,
    /// Where the solution count M driving the plan comes from
    #[arg(long = "m-source", value_enum, default_value = "classical")]
    pub m_source: MSourceArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long = "width-policy", value_enum, default_value = "exact")]
    pub width_policy: PolicyArg,
    /// Test hook: drop the uncompute pass to force a violation
    #[arg(long, hide = true)]
    pub corrupt: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Largest counter width to report (rows run from 2 to this value)
    #[arg(long = "max-width")]
    pub max_width: usize,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Number of counting qubits
    #[arg(long, default_value_t = 7)]
    pub t: usize,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "ascii")]
    pub out: OutArg,
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Metrics(args) => cmd_metrics(&args),
        Command::Count(args) => cmd_count(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_ERROR
        }
    }
}

fn load_graph(args: &GraphArgs) -> Result<Graph, Box<dyn Error>> {
    let text = std::fs::read_to_string(&args.graph)
        .map_err(|e| format!("cannot read {}: {e}", args.graph.display()))?;
    let format = match args.format {
        Some(FormatArg::Dimacs) => GraphFormat::Dimacs,
        Some(FormatArg::Json) => GraphFormat::Json,
        None => infer_format(&args.graph),
    };
    Ok(parse_graph(&text, format)?)
}

fn infer_format(path: &Path) -> GraphFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => GraphFormat::Json,
        _ => GraphFormat::Dimacs,
    }
}

fn policy(arg: PolicyArg) -> WidthPolicy {
    match arg {
        PolicyArg::Exact => WidthPolicy::Exact,
        PolicyArg::Uniform2 => WidthPolicy::Uniform2,
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<i32, Box<dyn Error>> {
    let g = load_graph(&args.graph)?;
    let opts = RunOptions {
        mode: match args.mode {
            ModeArg::Dense => ExecMode::Dense,
            ModeArg::Compressed => ExecMode::Compressed,
        },
        width_policy: policy(args.width_policy),
        shots: args.shots,
        seed: args.seed,
        reps_override: args.reps,
        dense_cap: args.dense_cap,
        m_source: match args.m_source {
            MSourceArg::Classical => SolutionCountSource::Classical,
            MSourceArg::Qcount => SolutionCountSource::QuantumCounting { t: 7 },
        },
    };
    let outcome = run_grover(&g, args.graph.k, &opts)?;

    match args.out {
        OutArg::Json => println!("{}", serde_json::to_string_pretty(&outcome)?),
        OutArg::Csv => print!("{}", outcome.histogram.to_csv()),
        OutArg::Ascii => {
            let plan = &outcome.plan;
            println!("graph: {g}");
            println!("layout: {}", outcome.layout.summary());
            println!(
                "plan: N={} M={} r={} mode={} shots={} seed={}",
                plan.n_states,
                plan.m,
                plan.r,
                match plan.mode {
                    ExecMode::Dense => "dense",
                    ExecMode::Compressed => "compressed",
                },
                plan.shots,
                plan.seed
            );
            println!("exact target mass: {:.6}", outcome.exact_target_mass);
            if outcome.solutions.is_empty() {
                println!("solutions: none (output is uniform noise)");
            } else {
                println!("solutions (classically verified):");
                for s in &outcome.solutions {
                    let mask = u64::from_str_radix(s, 2).expect("solution bitstring");
                    println!("  {s}  {}", VertexSet::from_mask(mask).label());
                }
            }
            println!("counts ({} shots):", outcome.histogram.shots());
            print!("{}", ascii_histogram(&outcome.histogram));
        }
    }
    Ok(if outcome.is_degenerate() { EXIT_NO_SOLUTIONS } else { EXIT_OK })
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, Box<dyn Error>> {
    let g = load_graph(&args.graph)?;
    let k = args.graph.k;
    let layout = plan_layout(&g, k, policy(args.width_policy))?;
    let oracle = if args.corrupt {
        // marking pass and kickback without the uncompute pass
        let mut c = build_u_omega(&g, k, &layout)?;
        c.push(Gate::mcx_polarized(phase_mcx_controls(&layout, k), layout.phase_qubit()))?;
        c
    } else {
        build_oracle(&g, k, &layout)?
    };

    let n = g.vertex_count();
    let table = match extract_phase_table(&oracle, &layout) {
        Ok(table) => table,
        Err(err @ SimError::UncomputationViolation { .. }) => {
            println!("FAIL: {err}");
            return Ok(EXIT_ERROR);
        }
        Err(err) => return Err(err.into()),
    };

    for x in 0..1u64 << n {
        let s = VertexSet::from_mask(x);
        let expected = s.len() == k && g.is_dominating(&s);
        if table.is_marked(x) != expected {
            println!(
                "FAIL: input {}: oracle says {}, brute force says {}",
                s.bitstring(n),
                table.is_marked(x),
                expected
            );
            return Ok(EXIT_ERROR);
        }
    }
    println!(
        "ok: phase table matches brute force on all {} inputs (k={k}, {}), \
         every ancilla and counting qubit restored",
        1u64 << n,
        layout.summary()
    );
    Ok(EXIT_OK)
}

fn cmd_metrics(args: &MetricsArgs) -> Result<i32, Box<dyn Error>> {
    if args.max_width < 2 {
        return Err(format!("--max-width must be at least 2, got {}", args.max_width).into());
    }
    println!("{:<7} {:<14} {:<11}", "width", "x-gate delta", "depth delta");
    for w in 2..=args.max_width {
        let cmp = compare_counters(w)?;
        println!("{:<7} {:<14} {:<11}", w, cmp.x_delta, cmp.depth_delta);
    }
    Ok(EXIT_OK)
}

fn cmd_count(args: &CountArgs) -> Result<i32, Box<dyn Error>> {
    let g = load_graph(&args.graph)?;
    let k = args.graph.k;
    let cfg = CountingConfig { t: args.t, shots: args.shots, seed: args.seed };
    let result = run_quantum_counting(&g, k, &cfg)?;
    let classical_m = g.enumerate_dominating_sets(k)?.len();

    match args.out {
        OutArg::Json => println!("{}", serde_json::to_string_pretty(&result)?),
        OutArg::Csv => print!("{}", result.histogram.to_csv()),
        OutArg::Ascii => {
            println!("graph: {g}");
            println!("counting qubits: t={}", result.t);
            println!("outcome histogram ({} shots):", result.histogram.shots());
            print!("{}", ascii_histogram(&result.histogram));
            println!("M estimates per observed outcome:");
            for (key, estimate) in &result.m_estimates {
                println!("  y={key} -> M ~ {estimate:.3}");
            }
            println!("estimated M (rounded mode): {}", result.m_rounded_mode);
            println!("classical M (brute force):  {classical_m}");
        }
    }
    Ok(EXIT_OK)
}

/// One bar per outcome, sorted by decreasing count (ties by bitstring).
fn ascii_histogram(h: &Histogram) -> String {
    let mut rows: Vec<(&str, u64)> = h.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let max = rows.first().map_or(1, |&(_, c)| c.max(1));
    let mut out = String::new();
    for (key, count) in rows {
        let width = (count * 40 / max) as usize;
        writeln!(out, "  {key} {:<40} {count}", "#".repeat(width.max(1))).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_solve() {
        let cli = Cli::try_parse_from([
            "grover-domset",
            "solve",
            "--graph",
            "g.dimacs",
            "--k",
            "2",
            "--seed",
            "7",
        ])
        .unwrap();
        match cli.command {
            Command::Solve(args) => {
                assert_eq!(args.graph.k, 2);
                assert_eq!(args.seed, 7);
                assert_eq!(args.shots, 1000);
                assert_eq!(args.mode, ModeArg::Compressed);
                assert_eq!(args.dense_cap, DEFAULT_DENSE_QUBIT_CAP);
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn cli_rejects_unknown_mode() {
        assert!(Cli::try_parse_from([
            "grover-domset",
            "solve",
            "--graph",
            "g",
            "--k",
            "1",
            "--mode",
            "sparse",
        ])
        .is_err());
    }

    #[test]
    fn format_inference() {
        assert_eq!(infer_format(Path::new("a.json")), GraphFormat::Json);
        assert_eq!(infer_format(Path::new("a.dimacs")), GraphFormat::Dimacs);
        assert_eq!(infer_format(Path::new("a")), GraphFormat::Dimacs);
    }

    #[test]
    fn metrics_rejects_width_one() {
        let args = MetricsArgs { max_width: 1 };
        assert!(cmd_metrics(&args).is_err());
    }
}
