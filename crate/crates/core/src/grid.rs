//! Discrete simulator: one randomly chosen active agent takes one random
//! safe action per step on an unbounded lattice.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::behavior::{BehaviorSpec, Derivation};
use crate::error::{Error, Result};
use crate::lattice::{canonicalize, Cell, Direction, LocalState, Pattern};
use crate::stats;
use crate::uniqueness::{check_pattern, UniquenessOptions};

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub step_cap: u64,
    /// Check collisions and connectivity every this many steps (1 = every step).
    pub safety_every: u64,
    pub record_trajectory: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            step_cap: DEFAULT_STEP_CAP,
            safety_every: if cfg!(debug_assertions) { 1 } else { 64 },
            record_trajectory: false,
        }
    }
}

/// One realised move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub step: u64,
    pub agent: usize,
    pub from: Cell,
    pub to: Cell,
}

/// Agents on the lattice with their states and the set of active agents.
pub struct GridWorld<'a> {
    d: &'a Derivation,
    no_repeat: bool,
    pos: Vec<Cell>,
    occ: FxHashMap<Cell, usize>,
    state: Vec<u8>,
    active: Vec<usize>,
    slot: Vec<usize>,
    last_mover: Option<usize>,
    steps: u64,
}

const NOT_ACTIVE: usize = usize::MAX;

impl<'a> GridWorld<'a> {
    pub fn new(d: &'a Derivation, cells: &[Cell]) -> Result<Self> {
        let mut occ = FxHashMap::default();
        for (i, &c) in cells.iter().enumerate() {
            if occ.insert(c, i).is_some() {
                return Err(Error::DuplicateCell(c));
            }
        }
        if cells.len() < 2 {
            return Err(Error::SingletonPattern);
        }
        let mut w = GridWorld {
            d,
            no_repeat: d.spec.alt1_no_repeat,
            pos: cells.to_vec(),
            occ,
            state: vec![0; cells.len()],
            active: Vec::new(),
            slot: vec![NOT_ACTIVE; cells.len()],
            last_mover: None,
            steps: 0,
        };
        if !w.is_connected() {
            return Err(Error::DisconnectedPattern);
        }
        for i in 0..cells.len() {
            w.refresh(i);
        }
        Ok(w)
    }

    fn sense(&self, c: Cell) -> u8 {
        Direction::ALL
            .iter()
            .filter(|d| self.occ.contains_key(&(c + d.offset())))
            .fold(0, |acc, d| acc | d.bit())
    }

    fn refresh(&mut self, i: usize) {
        let bits = self.sense(self.pos[i]);
        self.state[i] = bits;
        let active = LocalState::new(bits).is_ok_and(|s| self.d.sets.is_active(s));
        match (active, self.slot[i] != NOT_ACTIVE) {
            (true, false) => {
                self.slot[i] = self.active.len();
                self.active.push(i);
            }
            (false, true) => {
                let k = self.slot[i];
                self.active.swap_remove(k);
                if k < self.active.len() {
                    self.slot[self.active[k]] = k;
                }
                self.slot[i] = NOT_ACTIVE;
            }
            _ => {}
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn positions(&self) -> &[Cell] {
        &self.pos
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn state_of(&self, agent: usize) -> Option<LocalState> {
        LocalState::new(self.state[agent]).ok()
    }

    pub fn pattern(&self) -> Result<Pattern> {
        canonicalize(self.pos.iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = FxHashSet::default();
        seen.insert(self.pos[0]);
        let mut queue = VecDeque::from([self.pos[0]]);
        while let Some(c) = queue.pop_front() {
            for n in c.neighbors() {
                if self.occ.contains_key(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == self.pos.len()
    }

    /// Collisions and disconnection are hard errors.
    pub fn check_safety(&self) -> Result<()> {
        if self.occ.len() != self.pos.len() {
            return Err(Error::SafetyViolation { step: self.steps, what: "two agents share a cell".into() });
        }
        if !self.is_connected() {
            return Err(Error::SafetyViolation { step: self.steps, what: "swarm disconnected".into() });
        }
        Ok(())
    }

    /// Moves one agent. Returns `None` when no agent is active.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> Result<Option<Move>> {
        let n_active = self.active.len();
        if n_active == 0 {
            return Ok(None);
        }
        let skip = match self.last_mover {
            Some(m) if self.no_repeat && n_active > 1 && self.slot[m] != NOT_ACTIVE => Some(self.slot[m]),
            _ => None,
        };
        let agent = match skip {
            Some(k) => {
                let mut r = rng.gen_range(0..n_active - 1);
                if r >= k {
                    r += 1;
                }
                self.active[r]
            }
            None => self.active[rng.gen_range(0..n_active)],
        };
        let s = LocalState::new(self.state[agent]).expect("active agents have neighbours");
        let moves: Vec<Direction> = self.d.q_safe.get(s).iter().collect();
        let dir = *moves.choose(rng).expect("active states have safe moves");
        let from = self.pos[agent];
        let to = from + dir.offset();
        if self.occ.contains_key(&to) {
            return Err(Error::SafetyViolation { step: self.steps, what: format!("move onto occupied cell {to}") });
        }
        self.occ.remove(&from);
        self.occ.insert(to, agent);
        self.pos[agent] = to;
        let mut touched: Vec<usize> = vec![agent];
        for c in from.neighbors().chain(to.neighbors()) {
            if let Some(&j) = self.occ.get(&c) {
                touched.push(j);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            self.refresh(j);
        }
        self.steps += 1;
        self.last_mover = Some(agent);
        Ok(Some(Move { step: self.steps, agent, from, to }))
    }
}

/// Connected random formation grown one cell at a time from the origin.
pub fn random_formation<R: Rng>(n: usize, rng: &mut R) -> Vec<Cell> {
    let mut cells = vec![Cell::ORIGIN];
    let mut taken: FxHashSet<Cell> = cells.iter().copied().collect();
    let mut frontier: BTreeSet<Cell> = Cell::ORIGIN.neighbors().collect();
    while cells.len() < n {
        let k = rng.gen_range(0..frontier.len());
        let c = *frontier.iter().nth(k).expect("index in range");
        frontier.remove(&c);
        taken.insert(c);
        cells.push(c);
        frontier.extend(c.neighbors().filter(|x| !taken.contains(x)));
    }
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub pattern: String,
    pub behavior: String,
    pub seed: u64,
    pub converged: bool,
    pub steps: u64,
    /// Left out of serialized reports so artifacts are reproducible.
    #[serde(skip)]
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Move>>,
}

/// Runs from a given formation until `p_des` forms or the cap is hit.
pub fn run_from<R: Rng>(
    p_des: &Pattern,
    name: &str,
    d: &Derivation,
    cells: &[Cell],
    seed: u64,
    rng: &mut R,
    cfg: &GridConfig,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut world = GridWorld::new(d, cells)?;
    let mut trajectory = cfg.record_trajectory.then(Vec::new);
    let every = cfg.safety_every.max(1);
    let converged = loop {
        if world.active_count() == 0 {
            if world.pattern()? == *p_des {
                break true;
            }
            return Err(Error::SpuriousStaticPattern { step: world.steps() });
        }
        if world.steps() >= cfg.step_cap {
            break false;
        }
        let mv = world.step(rng)?.expect("active agent exists");
        if world.steps() % every == 0 {
            world.check_safety()?;
        }
        if let Some(t) = trajectory.as_mut() {
            t.push(mv);
        }
    };
    world.check_safety()?;
    Ok(RunReport {
        pattern: name.to_string(),
        behavior: d.spec.name.clone(),
        seed,
        converged,
        steps: world.steps(),
        wall_time: start.elapsed().as_secs_f64(),
        trajectory,
    })
}

/// One seeded run from a random formation.
pub fn run(p_des: &Pattern, name: &str, d: &Derivation, seed: u64, cfg: &GridConfig) -> Result<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = random_formation(p_des.len(), &mut rng);
    run_from(p_des, name, d, &cells, seed, &mut rng, cfg)
}

/// Refuses behaviours under which `p_des` is not the unique static pattern,
/// unless forced.
pub fn ensure_unique(p_des: &Pattern, name: &str, spec: &BehaviorSpec, force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    let r = check_pattern(p_des, spec, &UniquenessOptions::default())?;
    if r.is_unique() {
        Ok(())
    } else {
        Err(Error::NotUnique(format!("{name} under {}", spec.name)))
    }
}

/// Seed of run `i` in a batch.
pub fn run_seed(base_seed: u64, i: u64) -> u64 {
    base_seed.wrapping_add(i)
}

/// `n_runs` independent runs per behaviour, in behaviour then seed order.
pub fn batch(
    p_des: &Pattern,
    name: &str,
    specs: &[BehaviorSpec],
    n_runs: u64,
    base_seed: u64,
    cfg: &GridConfig,
) -> Result<Vec<RunReport>> {
    if n_runs == 0 {
        return Err(Error::Config("need at least one run".into()));
    }
    let mut out = Vec::new();
    for spec in specs {
        let d = Derivation::new(p_des, spec)?;
        let reports: Result<Vec<RunReport>> = (0..n_runs)
            .into_par_iter()
            .map(|i| run(p_des, name, &d, run_seed(base_seed, i), cfg))
            .collect();
        out.extend(reports?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorSummary {
    pub pattern: String,
    pub behavior: String,
    pub runs: usize,
    pub converged: usize,
    /// Statistics over converged runs only.
    pub median_steps: Option<f64>,
    pub q1_steps: Option<f64>,
    pub q3_steps: Option<f64>,
}

impl BehaviorSummary {
    pub fn iqr(&self) -> Option<f64> {
        Some(self.q3_steps? - self.q1_steps?)
    }
}

/// Steps of converged runs for one behaviour.
pub fn converged_steps(reports: &[RunReport], behavior: &str) -> Vec<f64> {
    reports
        .iter()
        .filter(|r| r.behavior == behavior && r.converged)
        .map(|r| r.steps as f64)
        .collect()
}

/// One summary per behaviour, in order of first appearance.
pub fn summarize(reports: &[RunReport]) -> Vec<BehaviorSummary> {
    let mut names: Vec<(String, String)> = Vec::new();
    for r in reports {
        let key = (r.pattern.clone(), r.behavior.clone());
        if !names.contains(&key) {
            names.push(key);
        }
    }
    names
        .into_iter()
        .map(|(pattern, behavior)| {
            let mine: Vec<&RunReport> = reports
                .iter()
                .filter(|r| r.pattern == pattern && r.behavior == behavior)
                .collect();
            let steps: Vec<f64> = mine.iter().filter(|r| r.converged).map(|r| r.steps as f64).collect();
            let q = stats::quartiles(&steps);
            BehaviorSummary {
                runs: mine.len(),
                converged: steps.len(),
                median_steps: stats::median(&steps),
                q1_steps: q.map(|q| q.0),
                q3_steps: q.map(|q| q.1),
                pattern,
                behavior,
            }
        })
        .collect()
}

pub fn runs_csv(reports: &[RunReport]) -> String {
    let mut s = String::from("pattern,behavior,seed,converged,steps\n");
    for r in reports {
        let _ = writeln!(s, "{},{},{},{},{}", r.pattern, r.behavior, r.seed, r.converged, r.steps);
    }
    s
}

pub fn summary_csv(summaries: &[BehaviorSummary]) -> String {
    let fmt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v}"));
    let mut s = String::from("pattern,behavior,runs,converged,median_steps,q1_steps,q3_steps,iqr_steps\n");
    for b in summaries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            b.pattern,
            b.behavior,
            b.runs,
            b.converged,
            fmt(b.median_steps),
            fmt(b.q1_steps),
            fmt(b.q3_steps),
            fmt(b.iqr())
        );
    }
    s
}

pub fn trajectory_csv(moves: &[Move]) -> String {
    let mut s = String::from("step,agent,from_x,from_y,to_x,to_y\n");
    for m in moves {
        let _ = writeln!(s, "{},{},{},{},{},{}", m.step, m.agent, m.from.x, m.from.y, m.to.x, m.to.y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Behavior;
    use crate::lattice::is_connected;
    use crate::patterns;

    fn safe_cfg() -> GridConfig {
        GridConfig { safety_every: 1, ..GridConfig::default() }
    }

    #[test]
    fn random_formations_are_connected_and_seeded() {
        for seed in 0..50 {
            let a = random_formation(9, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = random_formation(9, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(a, b);
            assert_eq!(a.iter().collect::<FxHashSet<_>>().len(), 9);
            assert!(is_connected(&a));
        }
    }

    #[test]
    fn desired_start_takes_no_steps() {
        let p = patterns::triangle4();
        let d = Derivation::new(&p, &Behavior::Baseline.spec()).unwrap();
        let cells: Vec<Cell> = p.iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = run_from(&p, "triangle-4", &d, &cells, 1, &mut rng, &safe_cfg()).unwrap();
        assert!(r.converged);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn line_first_step_is_safe() {
        let p = patterns::triangle4();
        let d = Derivation::new(&p, &Behavior::Baseline.spec()).unwrap();
        let cells: Vec<Cell> = (0..4).map(|x| Cell::new(x, 0)).collect();
        for seed in 0..20 {
            let mut w = GridWorld::new(&d, &cells).unwrap();
            // Ends can slide around; middles can only bridge over their pair.
            assert_eq!(w.active_count(), 4);
            let s_before: Vec<LocalState> = (0..4).map(|i| w.state_of(i).unwrap()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mv = w.step(&mut rng).unwrap().unwrap();
            let dir = Direction::from_offset(mv.to - mv.from).unwrap();
            assert!(d.q_safe.get(s_before[mv.agent]).contains(dir));
            if mv.agent == 1 || mv.agent == 2 {
                assert!(matches!(dir, Direction::N | Direction::S));
            }
            w.check_safety().unwrap();
        }
    }

    #[test]
    fn triangle4_converges_and_is_deterministic() {
        let p = patterns::triangle4();
        for b in Behavior::ALL {
            let d = Derivation::new(&p, &b.spec()).unwrap();
            for seed in 0..10 {
                let a = run(&p, "triangle-4", &d, seed, &safe_cfg()).unwrap();
                let again = run(&p, "triangle-4", &d, seed, &safe_cfg()).unwrap();
                assert!(a.converged, "{b} seed {seed}");
                assert_eq!(a.steps, again.steps);
            }
        }
    }

    #[test]
    fn no_repeat_skips_last_mover() {
        let p = patterns::triangle9();
        let d = Derivation::new(&p, &Behavior::Alt1.spec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cells = random_formation(9, &mut rng);
        let mut w = GridWorld::new(&d, &cells).unwrap();
        let mut prev: Option<Move> = None;
        for _ in 0..2000 {
            let before = w.active_count();
            let was_active = prev.is_some_and(|m| w.slot[m.agent] != NOT_ACTIVE);
            let Some(mv) = w.step(&mut rng).unwrap() else { break };
            if let Some(pm) = prev {
                if before > 1 && was_active {
                    assert_ne!(pm.agent, mv.agent);
                }
            }
            prev = Some(mv);
        }
    }

    #[test]
    fn csv_shapes() {
        let p = patterns::pair();
        let reports = batch(&p, "pair", &[Behavior::Baseline.spec(), Behavior::Alt1.spec()], 3, 7, &safe_cfg()).unwrap();
        let csv = runs_csv(&reports);
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(csv.starts_with("pattern,behavior,seed,converged,steps\n"));
        let again = batch(&p, "pair", &[Behavior::Baseline.spec(), Behavior::Alt1.spec()], 3, 7, &safe_cfg()).unwrap();
        assert_eq!(runs_csv(&again), csv);
        let summary = summarize(&reports);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].runs, 3);
    }
}
