//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --release --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmform::behavior::{Behavior, Derivation, StateSet, StateSets};
use swarmform::continuum::control::pair_command;
use swarmform::continuum::{self, attraction_repulsion, ContinuumConfig, ContinuumReport, ContinuumWorld, Shifts, Vec2};
use swarmform::graphs::CheckOptions;
use swarmform::grid::{self, random_formation, GridConfig, RunReport, DEFAULT_STEP_CAP};
use swarmform::io::{self, NamedPattern};
use swarmform::lattice::{state_of, Direction, LocalState, Pattern};
use swarmform::patterns;
use swarmform::stats::{mann_whitney_u, median};
use swarmform::uniqueness::{check_uniqueness, oracle_all_static_patterns, UniquenessOptions};
use swarmform::Result;

const SAFETY_RUNS_PER_CELL: u64 = 20;
const SAFETY_MIN_RUNS: usize = 500;
const SAFETY_BUDGET_S: f64 = 600.0;
const GRID_RUNS: u64 = 100;
const ORDER_P: f64 = 0.01;
const ORACLE_CASES: usize = 200;
const ORACLE_MAX_N: usize = 6;
const ORACLE_BUDGET_S: f64 = 900.0;
const CONTINUUM_RUNS: u64 = 50;
const T4_MIN_SUCCESS: usize = 48;
const T4_MEDIAN_S: f64 = 100.0;
const T9_MIN_SUCCESS: usize = 45;
const MIN_SEPARATION_M: f64 = 0.1;
const CONTINUUM_BUDGET_S: f64 = 1800.0;
const FIXED_POINT_TOL: f64 = 1e-9;
const SHIFT_TOL: f64 = 1e-10;
const PAIR_TRIALS: usize = 20;

const TRIANGLES: [&str; 2] = ["triangle-4", "triangle-9"];
const GRID_PATTERNS: [&str; 3] = ["triangle-4", "triangle-9", "hexagon-6"];

struct Verdicts(Vec<bool>);

impl Verdicts {
    fn record(&mut self, id: u32, name: &str, outcome: Result<(bool, String)>) {
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} criterion {id} ({name}): {detail}", if pass { "PASS" } else { "FAIL" });
        self.0.push(pass);
    }
}

fn named(name: &str) -> NamedPattern {
    NamedPattern { name: name.to_string(), pattern: patterns::by_name(name).expect("built-in") }
}

fn grid_batch(name: &str, behaviors: &[Behavior], cfg: &GridConfig, base_seed: u64, runs: u64) -> Result<Vec<RunReport>> {
    let specs: Vec<_> = behaviors.iter().map(|b| b.spec()).collect();
    grid::batch(&patterns::by_name(name)?, name, &specs, runs, base_seed, cfg)
}

fn converged(reports: &[RunReport], behavior: Behavior) -> usize {
    reports.iter().filter(|r| r.behavior == behavior.name() && r.converged).count()
}

/// Per-step collision and connectivity checks on every pattern and behaviour.
fn safety() -> Result<(bool, String)> {
    let start = Instant::now();
    let cfg = GridConfig { safety_every: 1, ..GridConfig::default() };
    let mut runs = 0;
    for name in patterns::NAMES {
        runs += grid_batch(name, &Behavior::ALL, &cfg, 1001, SAFETY_RUNS_PER_CELL)?.len();
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        runs >= SAFETY_MIN_RUNS && secs <= SAFETY_BUDGET_S,
        format!("{runs} runs, every step checked, 0 collisions, 0 disconnections, {secs:.0} s (budget {SAFETY_BUDGET_S} s)"),
    ))
}

fn convergence(batches: &[(&str, Vec<RunReport>)]) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, reports) in batches {
        for b in [Behavior::Baseline, Behavior::Alt1, Behavior::Alt2] {
            let k = converged(reports, b);
            pass &= k == GRID_RUNS as usize;
            parts.push(format!("{name} {b} {k}/{GRID_RUNS}"));
        }
    }
    Ok((pass, parts.join(", ")))
}

fn ordering(t9: &[RunReport]) -> Result<(bool, String)> {
    let order = [Behavior::Alt4, Behavior::Alt3, Behavior::Alt2, Behavior::Alt1, Behavior::Baseline];
    let steps: Vec<Vec<f64>> = order.iter().map(|b| grid::converged_steps(t9, b.name())).collect();
    let medians: Vec<f64> = steps.iter().map(|s| median(s).unwrap_or(f64::INFINITY)).collect();
    let mut pass = true;
    let mut parts: Vec<String> = order.iter().zip(&medians).map(|(b, m)| format!("{b} {m}")).collect();
    for i in 0..order.len() - 1 {
        let p = mann_whitney_u(&steps[i], &steps[i + 1]).map_or(1.0, |r| r.p_value);
        let ok = medians[i] < medians[i + 1] && p < ORDER_P;
        pass &= ok;
        parts.push(format!("{}<{} p={p:.2e}{}", order[i], order[i + 1], if ok { "" } else { " (violated)" }));
    }
    Ok((pass, format!("triangle-9 medians: {}", parts.join(", "))))
}

fn hexagon_negative(hex: &[RunReport]) -> Result<(bool, String)> {
    let np = named("hexagon-6");
    let mut pass = true;
    let mut parts = Vec::new();
    for b in [Behavior::Alt3, Behavior::Alt4] {
        let k = converged(hex, b);
        let d = Derivation::new(&np.pattern, &b.spec())?;
        let r = io::verify(&np, &d, CheckOptions::default(), &UniquenessOptions::default())?;
        pass &= k == 0 && !r.conditions.achievable;
        parts.push(format!("{b} {k}/{GRID_RUNS} converged, achievable={}", r.conditions.achievable));
    }
    Ok((pass, parts.join(", ")))
}

fn oracle_equivalence() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let mut spurious = 0;
    for case in 0..ORACLE_CASES {
        let n = rng.gen_range(2..=ORACLE_MAX_N);
        let p = Pattern::new(random_formation(n, &mut rng))?;
        let s_des: StateSet = p.iter().map(|c| state_of(&p, c)).collect::<Result<_>>()?;
        let density = [0.02, 0.05, 0.1, 0.2, 0.4][case % 5];
        let mut s_static = s_des;
        for s in LocalState::all() {
            if rng.gen_bool(density) {
                s_static.insert(s);
            }
        }
        let sets = StateSets {
            s_des,
            s_blocked: s_static.difference(&s_des),
            s_static,
            s_active: StateSet::all().difference(&s_static),
            s_simplicial: StateSet::EMPTY,
        };
        let found: BTreeSet<Pattern> =
            check_uniqueness(&sets, n, &p, &UniquenessOptions::default())?.patterns_found.into_iter().collect();
        let oracle = oracle_all_static_patterns(&s_static, n)?;
        mismatches += usize::from(found != oracle);
        spurious += usize::from(oracle.len() > 1);
    }
    let mut shipped = 0;
    for name in patterns::NAMES {
        let p = patterns::by_name(name)?;
        for b in Behavior::ALL {
            let d = Derivation::new(&p, &b.spec())?;
            let found: BTreeSet<Pattern> = check_uniqueness(&d.sets, p.len(), &p, &UniquenessOptions::default())?
                .patterns_found
                .into_iter()
                .collect();
            mismatches += usize::from(found != oracle_all_static_patterns(&d.sets.s_static, p.len())?);
            shipped += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        mismatches == 0 && secs <= ORACLE_BUDGET_S,
        format!(
            "{ORACLE_CASES} random static sets (N <= {ORACLE_MAX_N}, {spurious} with spurious patterns) and {shipped} shipped pattern/behaviour pairs, {mismatches} mismatches, {secs:.0} s"
        ),
    ))
}

fn continuum_reproduction() -> Result<(bool, String)> {
    let start = Instant::now();
    let cfg = ContinuumConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, need, median_cap) in [("triangle-4", T4_MIN_SUCCESS, Some(T4_MEDIAN_S)), ("triangle-9", T9_MIN_SUCCESS, None)] {
        let np = named(name);
        let d = Derivation::new(&np.pattern, &Behavior::Alt4.spec())?;
        let reports: Vec<ContinuumReport> = continuum::batch(&np.pattern, name, &d, CONTINUUM_RUNS, 1, &cfg)?;
        let times: Vec<f64> = reports.iter().filter_map(|r| r.t_complete).collect();
        let m = median(&times).unwrap_or(f64::INFINITY);
        let closest = reports
            .iter()
            .filter(|r| r.success)
            .map(|r| r.min_distance)
            .fold(f64::INFINITY, f64::min);
        let disconnected = reports.iter().filter(|r| r.disconnect_time.is_some()).count();
        pass &= times.len() >= need && median_cap.map_or(true, |c| m < c) && closest > MIN_SEPARATION_M;
        parts.push(format!(
            "{name} {}/{CONTINUUM_RUNS} (need {need}), median {m:.1} s, min distance {closest:.3} m, {disconnected} disconnected",
            times.len()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs <= CONTINUUM_BUDGET_S;
    parts.push(format!("{secs:.0} s"));
    Ok((pass, parts.join("; ")))
}

fn controller_properties() -> Result<(bool, String)> {
    let cfg = ContinuumConfig::default();
    let shifts = Shifts::solve(&cfg)?;

    let mut worst_step: f64 = 0.0;
    for d in Direction::ALL {
        let v = pair_command(Vec2::from_cell(d.offset(), cfg.rho_des), &shifts, &cfg)?;
        worst_step = worst_step.max(v.norm() * cfg.dt);
    }
    let p = patterns::triangle9();
    let d = Derivation::new(&p, &Behavior::Alt4.spec())?;
    let start: Vec<Vec2> = p.iter().map(|c| Vec2::from_cell(c, cfg.rho_des)).collect();
    let mut w = ContinuumWorld::new(&d, &cfg, &start, 1)?;
    for _ in 0..1000 {
        let before: Vec<Vec2> = w.agents().iter().map(|a| a.pos).collect();
        w.step()?;
        for (a, b) in w.agents().iter().zip(&before) {
            worst_step = worst_step.max((a.pos - *b).norm());
        }
    }

    let residual = attraction_repulsion(cfg.rho_des, shifts.orthogonal, &cfg)?
        .abs()
        .max(attraction_repulsion(2f64.sqrt() * cfg.rho_des, shifts.diagonal, &cfg)?.abs());

    let pair = patterns::pair();
    let dp = Derivation::new(&pair, &Behavior::Alt4.spec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut monotone = 0;
    for _ in 0..PAIR_TRIALS {
        let rho0 = rng.gen_range(0.1..cfg.rho_sensor);
        let mut w = ContinuumWorld::new(&dp, &cfg, &[Vec2::ZERO, Vec2::new(rho0, 0.0)], rng.gen())?;
        let mut prev = (rho0 - cfg.rho_des).abs();
        let mut ok = true;
        for _ in 0..3000 {
            w.step()?;
            let a = w.agents();
            let err = ((a[1].pos - a[0].pos).norm() - cfg.rho_des).abs();
            ok &= err <= prev + 1e-12;
            prev = err;
        }
        monotone += usize::from(ok && prev < 1e-3);
    }
    Ok((
        worst_step < FIXED_POINT_TOL && residual < SHIFT_TOL && monotone == PAIR_TRIALS,
        format!(
            "equilibrium drift {worst_step:.1e} m/step (tol {FIXED_POINT_TOL:.0e}), radial residual {residual:.1e} (tol {SHIFT_TOL:.0e}), {monotone}/{PAIR_TRIALS} pairs converge monotonically"
        ),
    ))
}

fn looseness(filtered: &[(&str, Vec<RunReport>)]) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, reports) in filtered {
        let np = named(name);
        for b in [Behavior::Alt3, Behavior::Alt4] {
            let d = Derivation::new(&np.pattern, &b.spec())?;
            let r = io::verify(&np, &d, CheckOptions::default(), &UniquenessOptions::default())?;
            let k = converged(reports, b);
            pass &= !r.conditions.thm_explore_ok && k == GRID_RUNS as usize;
            parts.push(format!("{name} {b} thm_explore_ok={} with {k}/{GRID_RUNS} converged", r.conditions.thm_explore_ok));
        }
    }
    Ok((pass, parts.join(", ")))
}

fn main() -> ExitCode {
    let mut v = Verdicts(Vec::new());
    v.record(1, "safety invariants", safety());

    let cfg = GridConfig { step_cap: DEFAULT_STEP_CAP, ..GridConfig::default() };
    let mut batches = Vec::new();
    for name in GRID_PATTERNS {
        match grid_batch(name, &Behavior::ALL, &cfg, 1, GRID_RUNS) {
            Ok(r) => batches.push((name, r)),
            Err(e) => {
                println!("FAIL grid batch for {name}: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let find = |n: &str| batches.iter().find(|(name, _)| *name == n).map(|(_, r)| r.as_slice()).unwrap_or(&[]);
    v.record(2, "grid convergence", convergence(&batches));
    v.record(3, "behaviour ordering", ordering(find("triangle-9")));
    v.record(4, "hexagon negative result", hexagon_negative(find("hexagon-6")));
    v.record(5, "checker-oracle equivalence", oracle_equivalence());
    v.record(6, "continuum reproduction", continuum_reproduction());
    v.record(7, "controller properties", controller_properties());
    let triangles: Vec<(&str, Vec<RunReport>)> =
        batches.iter().filter(|(n, _)| TRIANGLES.contains(n)).map(|(n, r)| (*n, r.clone())).collect();
    v.record(8, "proof-condition looseness", looseness(&triangles));

    let failed = v.0.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", v.0.len() - failed, v.0.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
