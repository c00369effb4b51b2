//! `drgspin`: analyze graphs, scan parameters and run the identity harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use drgspin::scan::Range;
use drgspin::{
    analyze_input, cycle_graph, evaluate_candidate, hypercube_graph, identity_harness, load_graph, scan, AnalyzeOptions,
    DRGraph, Error, FeasibilityCandidate, GridSpec, Verdict,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "drgspin", version, about = "Spin models from distance-regular graphs of q-Racah type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline on one graph.
    Analyze(AnalyzeArgs),
    /// Search (q, a) for integral intersection arrays.
    Scan(ScanArgs),
    /// Evaluate the scalar identities at random admissible parameters.
    Identities(IdentityArgs),
    /// Write a graph in edge-list format.
    Export(ExportArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// The N-cycle.
    #[arg(long, value_name = "N")]
    cycle: Option<usize>,
    /// The d-dimensional hypercube.
    #[arg(long, value_name = "D")]
    hypercube: Option<usize>,
    /// An edge-list file.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

impl Source {
    fn label(&self) -> String {
        match (self.cycle, self.hypercube, &self.file) {
            (Some(n), _, _) => format!("cycle {n}"),
            (_, Some(d), _) => format!("hypercube {d}"),
            (_, _, Some(p)) => format!("file {}", p.display()),
            _ => unreachable!("clap enforces one source"),
        }
    }

    fn build(&self) -> drgspin::Result<DRGraph> {
        match (self.cycle, self.hypercube, &self.file) {
            (Some(n), _, _) => cycle_graph(n),
            (_, Some(d), _) => hypercube_graph(d),
            (_, _, Some(p)) => load_graph(p),
            _ => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 0)]
    base_vertex: usize,
    /// Verify at every base vertex.
    #[arg(long)]
    all_vertices: bool,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long)]
    no_type3_bruteforce: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall time in the report (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    diameter: usize,
    /// Largest denominator N in q = exp(i pi m / N); 0 disables.
    #[arg(long, default_value_t = 60)]
    unit_circle_max: usize,
    /// Largest |j| in a = ±q^j; defaults to 2D + 2.
    #[arg(long)]
    power_max: Option<usize>,
    /// Skip the real (q, a) grid.
    #[arg(long)]
    no_real: bool,
    #[arg(long, default_value_t = 1.0)]
    real_q_min: f64,
    #[arg(long, default_value_t = 3.0)]
    real_q_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    real_q_step: f64,
    #[arg(long, default_value_t = 1e-3)]
    real_a_min: f64,
    #[arg(long, default_value_t = 3.0)]
    real_a_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    real_a_step: f64,
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Directory for `scan_D{D}.json` and `scan_D{D}.csv`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long)]
    diameter: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    if !(args.tolerance > 0.0) {
        return Ok(usage("--tolerance must be positive"));
    }
    let opts = AnalyzeOptions {
        base_vertex: args.base_vertex,
        all_vertices: args.all_vertices,
        tolerance: args.tolerance,
        type3_bruteforce: !args.no_type3_bruteforce,
        seed: args.seed,
    };
    let start = Instant::now();
    let mut report = analyze_input(&args.source.label(), || args.source.build(), &opts);
    if args.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    let text = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.render_text(),
    };
    emit(&text, args.output.as_deref())?;
    if let Some(e) = &report.error {
        eprintln!("{} [{}]: {}", e.kind, e.stage, e.message);
        if e.kind == "ParseError" || e.kind == "IoError" {
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    }
    Ok(match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(EXIT_FAIL),
    })
}

fn grid(args: &ScanArgs) -> GridSpec {
    GridSpec {
        unit_circle_max: args.unit_circle_max,
        power_max: args.power_max.unwrap_or(2 * args.diameter + 2),
        real_q: (!args.no_real).then_some(Range { lo: args.real_q_min, hi: args.real_q_max, step: args.real_q_step }),
        real_a: Range { lo: args.real_a_min, hi: args.real_a_max, step: args.real_a_step },
        threshold: args.threshold,
    }
}

fn write_csv(path: &Path, cands: &[FeasibilityCandidate]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["D", "q_re", "q_im", "a_re", "a_im", "family_tag", "residual", "n_implied", "arrays"])?;
    for x in cands {
        w.write_record([
            x.d.to_string(),
            format!("{:.15}", x.q.re),
            format!("{:.15}", x.q.im),
            format!("{:.15}", x.a.re),
            format!("{:.15}", x.a.im),
            x.family_tag.as_str().to_string(),
            format!("{:.3e}", x.integrality_residual),
            x.n_implied.to_string(),
            x.arrays_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run_scan(args: &ScanArgs) -> Result<ExitCode> {
    if args.diameter < 3 {
        return Ok(usage(format!("--diameter must be at least 3, got {}", args.diameter)));
    }
    let spec = grid(args);
    if let Err(e) = spec.validate() {
        return Ok(usage(e));
    }
    let cands = match scan(args.diameter, &spec) {
        Ok(c) => c,
        Err(e) => return Ok(usage(e)),
    };
    let evaluations: Vec<_> = cands.iter().filter_map(|c| evaluate_candidate(c).ok()).collect();
    let json = serde_json::json!({
        "diameter": args.diameter,
        "grid": spec,
        "candidates": cands,
        "evaluations": evaluations,
    });
    std::fs::create_dir_all(&args.out_dir)?;
    let base = args.out_dir.join(format!("scan_D{}", args.diameter));
    let json_path = base.with_extension("json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&json)? + "\n")?;
    write_csv(&base.with_extension("csv"), &cands)?;
    let feasible = evaluations.iter().filter(|e| e.feasible).count();
    println!(
        "D={}: {} candidates ({} pass the counting filters); wrote {} and {}",
        args.diameter,
        cands.len(),
        feasible,
        json_path.display(),
        base.with_extension("csv").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_identities(args: &IdentityArgs) -> Result<ExitCode> {
    if args.diameter < 3 {
        return Ok(usage(format!("--diameter must be at least 3, got {}", args.diameter)));
    }
    if args.samples == 0 {
        return Ok(usage("--samples must be at least 1"));
    }
    let report = identity_harness(args.diameter, args.samples, args.seed);
    match args.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
}

fn run_export(args: &ExportArgs) -> Result<ExitCode> {
    match args.source.build() {
        Ok(g) => {
            emit(&g.to_edge_list(), args.output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ (Error::Parse { .. } | Error::Io(_))) => Ok(usage(e)),
        Err(e) => {
            eprintln!("{}: {e}", e.kind());
            Ok(ExitCode::from(EXIT_FAIL))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Scan(a) => run_scan(a),
        Command::Identities(a) => run_identities(a),
        Command::Export(a) => run_export(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(EXIT_FAIL)
    })
}
