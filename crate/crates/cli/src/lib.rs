//! Command-line surface: instance generation, exact oracles, the solver
//! pipeline, verification, per-stage demos, and the experiment runner.
//!
//! Exit codes: 0 = success / witness found, 1 = proven absent / verification
//! failed, 2 = budget or stage failure, 64 = usage error.

pub mod experiment;
pub mod format;

use std::fs;
use std::sync::OnceLock;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use ihc_core::clock::Clock;
use ihc_core::connect::{connect, connect_oracle};
use ihc_core::forest::{build_forest, ForestParams};
use ihc_core::generators as gen;
use ihc_core::oracle::{ham_compatible, ham_properly_coloured, Budget};
use ihc_core::pipeline::{solve, PipelineParams, Route, SolveReport};
use ihc_core::regularize::regularize_system;
use ihc_core::system::System;
use ihc_core::VertexSet;

use format::{parse_cycle_file, parse_ihc, write_cycle_file, write_ihc, Instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABSENT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Monotonic wall clock injected into the core.
pub struct WallClock;

static CLOCK_START: OnceLock<Instant> = OnceLock::new();

impl Clock for WallClock {
    fn now_millis(&self) -> u64 {
        let start = CLOCK_START.get_or_init(Instant::now);
        start.elapsed().as_millis() as u64
    }
}

#[derive(Parser)]
#[command(
    name = "ihc",
    about = "Graphs with incompatibility systems: extremal instances, exact oracles, and a compatible-Hamilton-cycle solver",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file
    Gen(GenArgs),
    /// Decide compatible (or properly coloured) Hamilton cycle existence exactly
    Oracle(OracleArgs),
    /// Run the absorber/regularize/forest pipeline with verification
    Solve(SolveArgs),
    /// Verify a cycle file against an instance
    Verify(VerifyArgs),
    /// Per-stage demo: compatible linear forest
    Forest(ForestArgs),
    /// Per-stage demo: connect two anchor edges
    ConnectDemo(ConnectArgs),
    /// Per-stage demo: regularize the incompatibility system
    Regularize(RegularizeArgs),
    /// Sweep (n, d, mu) over random instances and write a CSV
    Experiment(experiment::ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// bollobas-erdos | source-orient | clique-blowup | circulant | random-regular | random-system
    #[arg(long)]
    family: String,
    /// Parameter k (bollobas-erdos)
    #[arg(long)]
    k: Option<usize>,
    /// Vertex count (clique-blowup, circulant, random-regular)
    #[arg(long)]
    n: Option<usize>,
    /// Degree: integer, or fraction of n when below 1 (random-regular)
    #[arg(long)]
    d: Option<f64>,
    /// Minimum-degree fraction as a rational, e.g. 7/12 (clique-blowup)
    #[arg(long)]
    delta: Option<String>,
    /// Boundedness fraction of n (random-system)
    #[arg(long)]
    mu: Option<f64>,
    /// Circulant connection set, e.g. 1,2,5
    #[arg(long)]
    conn: Option<String>,
    /// Input instance (source-orient re-orients it; random-system decorates it)
    #[arg(long)]
    graph: Option<String>,
    /// Source vertex (source-orient)
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Output .ihc path
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: String,
    /// Decide properly coloured instead of compatible (needs a colouring)
    #[arg(long)]
    properly_coloured: bool,
    /// Wall-time budget in milliseconds
    #[arg(long)]
    budget_ms: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    seed: u64,
    /// min-degree | almost-regular
    #[arg(long, default_value = "min-degree")]
    route: String,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    ell: Option<usize>,
    /// Forest block size (even); default picks the largest feasible
    #[arg(long)]
    m: Option<usize>,
    /// Partition tolerance slack (multiple of m^(3/5))
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    oracle_cap: Option<usize>,
    /// Write the full JSON report here
    #[arg(long)]
    report: Option<String>,
    /// Write the cycle file here when one is found
    #[arg(long)]
    cycle_out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    cycle: String,
}

#[derive(Args)]
struct ForestArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    m: Option<usize>,
    /// Partition tolerance slack (multiple of m^(3/5))
    #[arg(long, default_value_t = 3.0)]
    tol: f64,
    /// König decomposition width
    #[arg(long)]
    width: Option<usize>,
}

#[derive(Args)]
struct ConnectArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    x1: usize,
    #[arg(long)]
    x1p: usize,
    #[arg(long)]
    x2: usize,
    #[arg(long)]
    x2p: usize,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Comma-separated forbidden interior vertices
    #[arg(long)]
    avoid: Option<String>,
}

#[derive(Args)]
struct RegularizeArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    seed: u64,
    /// Write the regularized instance here
    #[arg(long)]
    out: Option<String>,
}

/// Entry point used by both the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successes, anything else is a usage error
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Forest(a) => cmd_forest(a),
        Command::ConnectDemo(a) => cmd_connect(a),
        Command::Regularize(a) => cmd_regularize(a),
        Command::Experiment(a) => experiment::cmd_experiment(a),
    }
}

fn load_instance(path: &str) -> Result<Instance, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {path}: {e}");
        EXIT_USAGE
    })?;
    parse_ihc(&text).map_err(|e| {
        eprintln!("error: {path}: {e}");
        EXIT_ABSENT
    })
}

fn parse_rational(text: &str) -> Option<(usize, usize)> {
    let mut parts = text.split('/');
    let num = parts.next()?.trim().parse().ok()?;
    let den = match parts.next() {
        Some(d) => d.trim().parse().ok()?,
        None => 1,
    };
    if parts.next().is_some() {
        return None;
    }
    Some((num, den))
}

fn parse_list(text: &str) -> Option<Vec<usize>> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().ok())
        .collect()
}

fn cmd_gen(a: GenArgs) -> i32 {
    let result: Result<Instance, String> = (|| {
        // families that decorate an existing graph load it first
        let base = match a.graph.as_ref() {
            None => None,
            Some(path) => Some(load_instance(path).map_err(|_| format!("cannot load {path}"))?),
        };
        let spec = match a.family.as_str() {
            "bollobas-erdos" => gen::GenSpec::BollobasErdos {
                k: a.k.ok_or("--k is required")?,
            },
            "source-orient" => gen::GenSpec::SourceOrient {
                source: a.source.ok_or("--source is required")?,
            },
            "clique-blowup" => {
                let (num, den) = a
                    .delta
                    .as_deref()
                    .and_then(parse_rational)
                    .ok_or("--delta must be a rational like 7/12")?;
                gen::GenSpec::CliqueBlowup {
                    n: a.n.ok_or("--n is required")?,
                    delta_num: num,
                    delta_den: den,
                }
            }
            "circulant" => gen::GenSpec::Circulant {
                n: a.n.ok_or("--n is required")?,
                connection: a
                    .conn
                    .as_deref()
                    .and_then(parse_list)
                    .ok_or("--conn must be a list like 1,2,5")?,
            },
            "random-regular" => {
                let n = a.n.ok_or("--n is required")?;
                let d = a.d.ok_or("--d is required")?;
                let degree = if d < 1.0 {
                    (d * n as f64).round() as usize
                } else {
                    d as usize
                };
                gen::GenSpec::RandomRegular { n, d: degree }
            }
            "random-system" => {
                let n = base.as_ref().ok_or("--graph is required")?.graph.n();
                let mu = a.mu.ok_or("--mu is required")?;
                gen::GenSpec::RandomSystem {
                    bound: (mu * n as f64).floor() as usize,
                }
            }
            other => return Err(format!("unknown family '{other}'")),
        };
        let (graph, colouring, system) = spec
            .generate(a.seed, base.as_ref().map(|i| &i.graph))
            .map_err(|e| e.to_string())?;
        // keep a base colouring when the family does not supply one
        let colouring = colouring.or_else(|| base.and_then(|b| b.colouring));
        Ok(Instance {
            graph,
            system,
            colouring,
        })
    })();
    match result {
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Ok(instance) => match fs::write(&a.out, write_ihc(&instance)) {
            Ok(()) => {
                println!(
                    "wrote {} (n = {}, {} edges, {} forbidden pairs)",
                    a.out,
                    instance.graph.n(),
                    instance.graph.edge_count(),
                    instance.system.pair_count()
                );
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", a.out);
                EXIT_USAGE
            }
        },
    }
}

fn cmd_oracle(a: OracleArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let clock = WallClock;
    let budget = match a.budget_ms {
        Some(ms) => Budget::millis(&clock, ms),
        None => Budget::unlimited(),
    };
    let outcome = if a.properly_coloured {
        let c = match &inst.colouring {
            Some(c) => c,
            None => {
                eprintln!("error: --properly-coloured needs a colouring block");
                return EXIT_USAGE;
            }
        };
        ham_properly_coloured(&inst.graph, c, &budget)
    } else {
        ham_compatible(&inst.graph, &inst.system, &budget)
    };
    match outcome {
        Ok(Some(cycle)) => {
            let verts: Vec<String> = cycle.verts().map(|v| v.to_string()).collect();
            println!("found cycle {}", verts.join(" "));
            EXIT_OK
        }
        Ok(None) => {
            println!("proven absent (search exhausted)");
            EXIT_ABSENT
        }
        Err(b) => {
            println!("budget exceeded ({} nodes)", b.nodes);
            EXIT_BUDGET
        }
    }
}

fn cmd_solve(a: SolveArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let mut params = PipelineParams {
        seed: a.seed,
        ..PipelineParams::default()
    };
    params.route = match a.route.as_str() {
        "min-degree" => Route::MinDegree,
        "almost-regular" => Route::AlmostRegular,
        other => {
            eprintln!("error: unknown route '{other}'");
            return EXIT_USAGE;
        }
    };
    if let Some(v) = a.alpha {
        params.alpha = v;
    }
    if let Some(v) = a.beta {
        params.beta = v;
    }
    if let Some(v) = a.eta {
        params.eta = v;
    }
    if let Some(v) = a.ell {
        params.ell = v;
    }
    if let Some(v) = a.m {
        params.m = Some(v);
    }
    if let Some(v) = a.tol {
        params.tol_slack = v;
    }
    if let Some(v) = a.oracle_cap {
        params.oracle_cap = v;
    }
    let report = solve(&inst.graph, &inst.system, &params, &WallClock);
    print_solve_summary(&report);
    if let Some(path) = &a.report {
        match serde_json::to_string_pretty(&report) {
            Ok(json) => {
                if let Err(e) = fs::write(path, json) {
                    eprintln!("error: cannot write {path}: {e}");
                    return EXIT_USAGE;
                }
            }
            Err(e) => {
                eprintln!("error: report serialization failed: {e}");
                return EXIT_BUDGET;
            }
        }
    }
    if let (Some(path), Some(cycle)) = (&a.cycle_out, &report.cycle) {
        if let Err(e) = fs::write(path, write_cycle_file(cycle)) {
            eprintln!("error: cannot write {path}: {e}");
            return EXIT_USAGE;
        }
    }
    match report.outcome {
        ihc_core::pipeline::Outcome::Cycle => EXIT_OK,
        ihc_core::pipeline::Outcome::InfeasibleCertificate => EXIT_ABSENT,
        ihc_core::pipeline::Outcome::StageFailure => EXIT_BUDGET,
    }
}

fn print_solve_summary(report: &SolveReport) {
    match report.outcome {
        ihc_core::pipeline::Outcome::Cycle => {
            println!(
                "cycle found and verified (oracle fallback: {})",
                report.oracle_fallback
            );
        }
        ihc_core::pipeline::Outcome::InfeasibleCertificate => {
            println!("no compatible Hamilton cycle exists (oracle exhaustion)");
        }
        ihc_core::pipeline::Outcome::StageFailure => {
            println!(
                "stage failure: {}",
                report.failure.as_deref().unwrap_or("unknown")
            );
        }
    }
    for s in &report.stages {
        println!("  stage {:>16}: {:>6} ms  {}", s.name, s.ms, s.detail);
    }
    for c in &report.chain {
        println!(
            "  check {}: {:.2} vs {:.2} -> {}",
            c.name,
            c.lhs,
            c.rhs,
            if c.ok { "ok" } else { "violated" }
        );
    }
}

fn cmd_verify(a: VerifyArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let text = match fs::read_to_string(&a.cycle) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", a.cycle);
            return EXIT_USAGE;
        }
    };
    let verts = match parse_cycle_file(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}: {e}", a.cycle);
            return EXIT_ABSENT;
        }
    };
    let (ok, violations) = ihc_core::pipeline::verify_cycle(&inst.graph, &inst.system, &verts);
    if ok {
        println!(
            "cycle verifies: compatible Hamilton cycle on {} vertices",
            verts.len()
        );
        EXIT_OK
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        EXIT_ABSENT
    }
}

fn cmd_forest(a: ForestArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let g = &inst.graph;
    // the forest machinery needs a regular system; regularize when necessary
    let (system, regularized): (Box<dyn System>, bool) = if inst.system.regularity(g).is_some() {
        (Box::new(inst.system.clone()), false)
    } else {
        match regularize_system(g, &inst.system, a.seed) {
            Ok(reg) => (Box::new(reg.system), true),
            Err(e) => {
                eprintln!("error: system is not regular and regularization failed: {e}");
                return EXIT_BUDGET;
            }
        }
    };
    let m = a.m.unwrap_or_else(|| {
        let mut m = (g.n() as f64).powf(0.25).floor() as usize;
        if m % 2 == 1 {
            m -= 1;
        }
        m.max(2)
    });
    let mut params = ForestParams::new(m, a.seed).with_slack(a.tol);
    params.width = a.width;
    match build_forest(g, system.as_ref(), &params) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_BUDGET
        }
        Ok(run) => {
            for p in run.forest.paths() {
                let verts: Vec<String> = p.verts().map(|v| v.to_string()).collect();
                println!("path {}", verts.join(" "));
            }
            println!(
                "{}",
                serde_json::json!({
                    "edges": run.stats.edges,
                    "components": run.stats.components,
                    "covered": run.stats.covered_vertices,
                    "singletons": run.stats.singletons,
                    "retries": run.stats.retries,
                    "empty_draws": run.stats.empty_draws,
                    "width": run.stats.width_used,
                    "min_class_size": run.stats.min_class_size,
                    "regularized_first": regularized,
                    "m": m,
                })
            );
            EXIT_OK
        }
    }
}

fn cmd_connect(a: ConnectArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let g = &inst.graph;
    let avoid = match a.avoid.as_deref() {
        None => VertexSet::new(g.n()),
        Some(list) => match parse_list(list) {
            Some(vs) => VertexSet::from_iter(g.n(), vs),
            None => {
                eprintln!("error: --avoid must be a comma separated vertex list");
                return EXIT_USAGE;
            }
        },
    };
    match connect(g, &inst.system, &avoid, (a.x1, a.x1p), (a.x2, a.x2p), a.eta) {
        Ok(run) => {
            let verts: Vec<String> = run.path.verts().map(|v| v.to_string()).collect();
            println!("path {}", verts.join(" "));
            println!("meeting vertex {}", run.meeting);
            for (i, s) in run.sizes_a.iter().enumerate() {
                println!(
                    "level {:>2}: |U_a| = {:>4}, |V_a| = {:>4}, |D_a| = {:>6}",
                    i + 1,
                    s.u_size,
                    s.v_size,
                    s.edge_count
                );
            }
            println!("oracle fallback: false");
            EXIT_OK
        }
        Err(e) => {
            // exact fallback on small hosts
            let maxlen = g.n().min(14);
            match connect_oracle(
                g,
                &inst.system,
                &avoid,
                (a.x1, a.x1p),
                (a.x2, a.x2p),
                maxlen,
            ) {
                Some(p) => {
                    let verts: Vec<String> = p.verts().map(|v| v.to_string()).collect();
                    println!("path {}", verts.join(" "));
                    println!("oracle fallback: true ({e})");
                    EXIT_OK
                }
                None => {
                    eprintln!("error: {e}; oracle found no witness up to length {maxlen}");
                    EXIT_BUDGET
                }
            }
        }
    }
}

fn cmd_regularize(a: RegularizeArgs) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    match regularize_system(&inst.graph, &inst.system, a.seed) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_BUDGET
        }
        Ok(reg) => {
            println!(
                "{}",
                serde_json::json!({
                    "regularity": reg.regularity,
                    "kept_degree": reg.kept_degree,
                    "fallback": reg.fallback,
                    "input_boundedness": inst.system.boundedness(&inst.graph),
                    "pairs": reg.system.pair_count(),
                })
            );
            if let Some(path) = &a.out {
                let out = Instance {
                    graph: inst.graph,
                    system: reg.system,
                    colouring: inst.colouring,
                };
                if let Err(e) = fs::write(path, write_ihc(&out)) {
                    eprintln!("error: cannot write {path}: {e}");
                    return EXIT_USAGE;
                }
            }
            EXIT_OK
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_and_list_parsing() {
        assert_eq!(parse_rational("7/12"), Some((7, 12)));
        assert_eq!(parse_rational("3"), Some((3, 1)));
        assert_eq!(parse_rational("a/b"), None);
        assert_eq!(parse_list("1,2,5"), Some(vec![1, 2, 5]));
        assert_eq!(parse_list("1,x"), None);
    }

    #[test]
    fn usage_error_code() {
        assert_eq!(run(["ihc", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["ihc", "--help"]), EXIT_OK);
    }
}
