//! Command-line front end: derive, verify, simulate and cross-check.
//!
//! Exit codes: 0 success, 1 verification or cross-check failed, 2 input
//! error, 3 inconclusive search, 4 safety violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use swarmform::behavior::Derivation;
use swarmform::continuum::{self, svg::trajectory_svg, ContinuumConfig, ContinuumReport};
use swarmform::graphs::{ArrivalMode, CheckOptions, ExploreMode};
use swarmform::grid::{self, GridConfig, DEFAULT_STEP_CAP};
use swarmform::io::{self, Bundle, NamedPattern};
use swarmform::lattice::DIRECTION_LEGEND;
use swarmform::plot::histogram_svg;
use swarmform::stats;
use swarmform::uniqueness::{check_uniqueness, oracle_all_static_patterns, UniquenessOptions};
use swarmform::{Error, Result};

#[derive(Parser)]
#[command(name = "swarmform", version, about = "Local behaviour synthesis, verification and simulation for swarm pattern formation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the state sets and safe action map and write them as a bundle.
    Derive(Target),
    /// Check uniqueness of the desired pattern and the local proof conditions.
    Verify(VerifyArgs),
    /// Batch of discrete grid simulations.
    SimGrid(GridArgs),
    /// Batch of continuous-space simulations.
    SimContinuum(ContinuumArgs),
    /// Cross-check the uniqueness checker against exhaustive enumeration.
    Oracle(Target),
}

#[derive(Args)]
struct Target {
    /// Built-in pattern name or pattern JSON file.
    #[arg(long)]
    pattern: String,
    /// Behaviour preset (Baseline, ALT1..ALT4) or behaviour config JSON file.
    #[arg(long, default_value = "Baseline")]
    behavior: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Built-in pattern name or pattern JSON file; ignored with --bundle.
    #[arg(long, required_unless_present = "bundle")]
    pattern: Option<String>,
    #[arg(long, default_value = "Baseline")]
    behavior: String,
    /// Bundle written by `derive`; checked against a fresh derivation.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Node budget of the placement search.
    #[arg(long, default_value_t = UniquenessOptions::default().node_limit)]
    cap: u64,
    /// Accept a state when some arrival activates it rather than every one.
    #[arg(long)]
    lenient_arrival: bool,
    /// Let the exploration walk continue through static positions.
    #[arg(long)]
    lenient_explore: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    pattern: String,
    /// Comma-separated behaviours or `all`.
    #[arg(long, default_value = "all")]
    behavior: String,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Step cap per run.
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    cap: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run even if the pattern is not the unique static pattern.
    #[arg(long)]
    force: bool,
    /// Also dump the move list of the first run of each behaviour.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args)]
struct ContinuumArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value = "ALT4")]
    behavior: String,
    #[arg(long, default_value_t = 50)]
    runs: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulated-time cap per run in seconds.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    force: bool,
    /// Controller and dynamics parameters as JSON; missing fields use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trajectory sampling interval in seconds for the first run.
    #[arg(long, default_value_t = 0.5)]
    record_every: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Derive(a) => derive(&a),
        Command::Verify(a) => verify(&a),
        Command::SimGrid(a) => sim_grid(&a),
        Command::SimContinuum(a) => sim_continuum(&a),
        Command::Oracle(a) => oracle(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn target(pattern: &str, behavior: &str) -> Result<(NamedPattern, Derivation)> {
    let np = io::resolve_pattern(pattern)?;
    let spec = io::resolve_behavior(behavior)?;
    let d = Derivation::new(&np.pattern, &spec)?;
    Ok((np, d))
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn stem(np: &NamedPattern, behavior: &str) -> String {
    format!("{}_{}", slug(&np.name), slug(behavior))
}

fn derive(a: &Target) -> Result<bool> {
    let (np, d) = target(&a.pattern, &a.behavior)?;
    let bundle = Bundle::from_derivation(&np, &d);
    let path = a.out.join(format!("{}_bundle.json", stem(&np, &d.spec.name)));
    io::write_json(&path, &bundle)?;
    let c = &bundle.counts;
    println!("pattern {} ({} agents), behaviour {}", np.name, np.pattern.len(), d.spec.name);
    println!("{}", np.pattern.render());
    println!(
        "S_des {}  S_blocked {}  S_static {}  S_active {}  S_simplicial {}  Q_safe {} states / {} pairs",
        c.s_des, c.s_blocked, c.s_static, c.s_active, c.s_simplicial, c.q_safe_states, c.q_safe_pairs
    );
    println!("wrote {}", path.display());
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let (np, d) = match &a.bundle {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<Bundle>(&text)?.check()?
        }
        None => target(a.pattern.as_deref().expect("required by clap"), &a.behavior)?,
    };
    let check = CheckOptions {
        arrival: if a.lenient_arrival { ArrivalMode::Exists } else { ArrivalMode::Every },
        explore: if a.lenient_explore { ExploreMode::Lenient } else { ExploreMode::Strict },
        ..CheckOptions::default()
    };
    let opts = UniquenessOptions { node_limit: a.cap, ..UniquenessOptions::default() };
    let report = io::verify(&np, &d, check, &opts)?;
    let path = a.out.join(format!("{}_verify.json", stem(&np, &d.spec.name)));
    io::write_json(&path, &report)?;

    let c = &report.conditions;
    println!("pattern {}, behaviour {}", np.name, d.spec.name);
    println!("outcome {:?}", report.outcome);
    for p in report.uniqueness.spurious(&np.pattern) {
        println!("spurious static pattern:\n{}", p.render());
    }
    println!("achievable {}", c.achievable);
    println!("lemma3_clique_ok {}", c.lemma3_clique_ok);
    println!("lemma3_loop_ok {}", c.lemma3_loop_ok);
    println!("thm_explore_ok {}", c.thm_explore_ok);
    println!("thm_arrival_ok {}", c.thm_arrival_ok);
    if !c.witnesses.is_empty() {
        println!("witnesses ({DIRECTION_LEGEND}):");
        for w in c.witnesses.iter().take(10) {
            println!("  {:?} {} {}", w.condition, w.state.bit_vector(), w.detail);
        }
        if c.witnesses.len() > 10 {
            println!("  ... {} more in the report", c.witnesses.len() - 10);
        }
    }
    println!("verified {}", report.verified);
    println!("wrote {}", path.display());
    Ok(report.verified)
}

fn sim_grid(a: &GridArgs) -> Result<bool> {
    let np = io::resolve_pattern(&a.pattern)?;
    let specs = io::resolve_behaviors(&a.behavior)?;
    for spec in &specs {
        grid::ensure_unique(&np.pattern, &np.name, spec, a.force)?;
    }
    let cfg = GridConfig { step_cap: a.cap, ..GridConfig::default() };
    let reports = grid::batch(&np.pattern, &np.name, &specs, a.runs, a.seed, &cfg)?;
    let summaries = grid::summarize(&reports);
    let base = slug(&np.name);
    io::write_text(&a.out.join(format!("{base}_grid_runs.csv")), &grid::runs_csv(&reports))?;
    io::write_text(&a.out.join(format!("{base}_grid_summary.csv")), &grid::summary_csv(&summaries))?;
    for spec in &specs {
        let steps = grid::converged_steps(&reports, &spec.name);
        let title = format!("{} {}: steps to completion ({} converged)", np.name, spec.name, steps.len());
        io::write_text(&a.out.join(format!("{}_grid_hist.svg", stem(&np, &spec.name))), &histogram_svg(&title, &steps, 20))?;
        if a.trajectory {
            let d = Derivation::new(&np.pattern, spec)?;
            let traced = GridConfig { record_trajectory: true, ..cfg };
            let r = grid::run(&np.pattern, &np.name, &d, grid::run_seed(a.seed, 0), &traced)?;
            let moves = r.trajectory.unwrap_or_default();
            io::write_text(&a.out.join(format!("{}_grid_trajectory.csv", stem(&np, &spec.name))), &grid::trajectory_csv(&moves))?;
        }
    }
    println!("{:<10} {:>5} {:>9} {:>12} {:>12}", "behaviour", "runs", "converged", "median", "IQR");
    for s in &summaries {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.0}"));
        println!("{:<10} {:>5} {:>9} {:>12} {:>12}", s.behavior, s.runs, s.converged, f(s.median_steps), f(s.iqr()));
    }
    println!("wrote {}", a.out.display());
    Ok(true)
}

#[derive(Serialize)]
struct ContinuumSummary<'a> {
    pattern: &'a str,
    behavior: &'a str,
    runs: usize,
    successes: usize,
    disconnections: usize,
    median_t_complete: Option<f64>,
    min_distance: f64,
    config: &'a ContinuumConfig,
    reports: &'a [ContinuumReport],
}

fn sim_continuum(a: &ContinuumArgs) -> Result<bool> {
    let np = io::resolve_pattern(&a.pattern)?;
    let spec = io::resolve_behavior(&a.behavior)?;
    grid::ensure_unique(&np.pattern, &np.name, &spec, a.force)?;
    let d = Derivation::new(&np.pattern, &spec)?;
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<ContinuumConfig>(&std::fs::read_to_string(p)?)?,
        None => ContinuumConfig::default(),
    };
    if let Some(cap) = a.cap {
        cfg.t_max = cap;
    }
    cfg.record_every = 0.0;
    cfg.validate()?;
    let reports = continuum::batch(&np.pattern, &np.name, &d, a.runs, a.seed, &cfg)?;

    let times: Vec<f64> = reports.iter().filter_map(|r| r.t_complete).collect();
    let summary = ContinuumSummary {
        pattern: &np.name,
        behavior: &spec.name,
        runs: reports.len(),
        successes: reports.iter().filter(|r| r.success).count(),
        disconnections: reports.iter().filter(|r| r.disconnect_time.is_some()).count(),
        median_t_complete: stats::median(&times),
        min_distance: reports.iter().map(|r| r.min_distance).fold(f64::INFINITY, f64::min),
        config: &cfg,
        reports: &reports,
    };
    let base = stem(&np, &spec.name);
    io::write_text(&a.out.join(format!("{base}_continuum_runs.csv")), &continuum::runs_csv(&reports))?;
    io::write_json(&a.out.join(format!("{base}_continuum_report.json")), &summary)?;

    let traced = ContinuumConfig { record_every: a.record_every, ..cfg };
    if a.record_every > 0.0 {
        let first = continuum::simulate(&np.pattern, &np.name, &d, grid::run_seed(a.seed, 0), &traced)?;
        let samples = first.trajectory.unwrap_or_default();
        io::write_text(&a.out.join(format!("{base}_continuum_trajectory.csv")), &continuum::trajectory_csv(&samples))?;
        io::write_text(&a.out.join(format!("{base}_continuum_trajectory.svg")), &trajectory_svg(&samples, 80.0))?;
    }

    println!(
        "{} {}: {}/{} successes, {} disconnections, median completion {}, min distance {:.3} m",
        np.name,
        spec.name,
        summary.successes,
        summary.runs,
        summary.disconnections,
        summary.median_t_complete.map_or("-".to_string(), |t| format!("{t:.1} s")),
        summary.min_distance
    );
    println!("wrote {}", a.out.display());
    if let Some(r) = reports.iter().find(|r| r.disconnect_time.is_some()) {
        let t = r.disconnect_time.unwrap_or(r.t_end);
        return Err(Error::SafetyViolation {
            step: (t / cfg.dt).round() as u64,
            what: format!("seed {} disconnected at t = {t:.2} s", r.seed),
        });
    }
    Ok(true)
}

#[derive(Serialize)]
struct OracleReport {
    pattern: String,
    behavior: String,
    agents: usize,
    checker_patterns: usize,
    oracle_patterns: usize,
    agree: bool,
    only_checker: Vec<swarmform::Pattern>,
    only_oracle: Vec<swarmform::Pattern>,
}

fn oracle(a: &Target) -> Result<bool> {
    let (np, d) = target(&a.pattern, &a.behavior)?;
    let n = np.pattern.len();
    let checker = check_uniqueness(&d.sets, n, &np.pattern, &UniquenessOptions::default())?;
    let oracle = oracle_all_static_patterns(&d.sets.s_static, n)?;
    let found: std::collections::BTreeSet<_> = checker.patterns_found.iter().cloned().collect();
    let report = OracleReport {
        pattern: np.name.clone(),
        behavior: d.spec.name.clone(),
        agents: n,
        checker_patterns: found.len(),
        oracle_patterns: oracle.len(),
        agree: found == oracle,
        only_checker: found.difference(&oracle).cloned().collect(),
        only_oracle: oracle.difference(&found).cloned().collect(),
    };
    let path = a.out.join(format!("{}_oracle.json", stem(&np, &d.spec.name)));
    io::write_json(&path, &report)?;
    println!(
        "{} {}: checker {} patterns, oracle {} patterns, {}",
        np.name,
        d.spec.name,
        report.checker_patterns,
        report.oracle_patterns,
        if report.agree { "agree" } else { "DISAGREE" }
    );
    println!("wrote {}", path.display());
    Ok(report.agree)
}
