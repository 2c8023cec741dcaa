//! Continuous-space, continuous-time simulation: point agents with first-order
//! velocity dynamics run the lattice behaviour through a local controller that
//! discretises what they sense.

pub mod control;
pub mod svg;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::Derivation;
use crate::error::{Error, Result};
use crate::grid::{random_formation, run_seed};
use crate::lattice::{Cell, Direction, LocalState, Pattern};

pub use control::{
    attraction_repulsion, commanded_velocity, discretize_state, solve_rho_s, Controller, Mode, Shifts, Vec2,
};

/// Proportional gain (1/s) of the return to an interrupted action's start.
const RETREAT_GAIN: f64 = 2.0;

/// Physical and controller parameters. Distances in metres, times in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuumConfig {
    pub rho_sensor: f64,
    pub rho_des: f64,
    pub rho_safe: f64,
    pub t_adj1: f64,
    pub t_adj2: f64,
    pub k_r: f64,
    pub k_a: f64,
    pub v_action: f64,
    pub v_b: f64,
    /// Saturation of the alignment command.
    pub v_align_max: f64,
    /// Velocity time constant of the agents.
    pub tau: f64,
    pub dt: f64,
    pub control_period: f64,
    /// Each controller interval is `control_period` scaled by a uniform
    /// factor in [1 - tick_jitter, 1 + tick_jitter].
    pub tick_jitter: f64,
    /// After an interrupted action, Adjusting2 is extended by a uniform
    /// random time in [0, interrupt_backoff].
    pub interrupt_backoff: f64,
    /// A neighbour moving faster than this fraction of `v_action` is acting.
    pub acting_speed_fraction: f64,
    /// An action ends once the agent is this close to its target.
    pub arrival_tolerance: f64,
    /// Largest random offset of each coordinate of the initial positions.
    pub init_jitter: f64,
    pub t_max: f64,
    /// Trajectory sampling interval; 0 disables recording.
    pub record_every: f64,
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        ContinuumConfig {
            rho_sensor: 1.6,
            rho_des: 1.0,
            rho_safe: 0.3,
            t_adj1: 2.0,
            t_adj2: 9.0,
            k_r: 1.0,
            k_a: 5.0,
            v_action: 1.0,
            v_b: 10.0,
            v_align_max: 0.25,
            tau: 0.05,
            dt: 0.01,
            control_period: 0.1,
            tick_jitter: 0.5,
            interrupt_backoff: 5.0,
            acting_speed_fraction: 0.3,
            arrival_tolerance: 0.02,
            init_jitter: 0.05,
            t_max: 100_000.0,
            record_every: 0.0,
        }
    }
}

impl ContinuumConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.rho_safe > 0.0 && self.rho_safe < self.rho_des && self.rho_des < self.rho_sensor) {
            return bad("need 0 < rho_safe < rho_des < rho_sensor");
        }
        if self.rho_sensor < self.rho_des * std::f64::consts::SQRT_2 {
            return bad("rho_sensor must reach diagonal neighbours at sqrt(2) rho_des");
        }
        if !(self.dt > 0.0 && self.tau > 0.0 && self.control_period >= self.dt) {
            return bad("need dt > 0, tau > 0 and control_period >= dt");
        }
        if !(self.v_action > 0.0 && self.v_align_max > 0.0 && self.v_b >= 0.0) {
            return bad("speeds must be positive");
        }
        if !(self.t_adj1 >= 0.0 && self.t_adj2 >= 0.0 && self.t_max > 0.0 && self.record_every >= 0.0) {
            return bad("durations must be non-negative");
        }
        if !(0.0..1.0).contains(&self.tick_jitter) {
            return bad("tick_jitter must be in [0, 1)");
        }
        if !(self.interrupt_backoff >= 0.0) {
            return bad("interrupt_backoff must be non-negative");
        }
        if !(self.acting_speed_fraction > 0.0 && self.acting_speed_fraction * self.v_action > self.v_align_max) {
            return bad("acting threshold must exceed the alignment speed");
        }
        if !(self.arrival_tolerance > 0.0 && self.init_jitter >= 0.0) {
            return bad("need arrival_tolerance > 0 and init_jitter >= 0");
        }
        // Jittered diagonal neighbours must stay in range.
        if std::f64::consts::SQRT_2 * (self.rho_des + 2.0 * self.init_jitter) > self.rho_sensor {
            return bad("init_jitter can push diagonal neighbours out of sensing range");
        }
        Shifts::solve(self).map(|_| ())
    }

    fn acting_speed(&self) -> f64 {
        self.acting_speed_fraction * self.v_action
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub pos: Vec2,
    pub vel: Vec2,
    pub ctl: Controller,
    next_tick: f64,
}

/// One trajectory sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub agent: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Formed,
    Disconnected,
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumReport {
    pub pattern: String,
    pub behavior: String,
    pub seed: u64,
    pub success: bool,
    pub end: EndReason,
    pub t_complete: Option<f64>,
    pub t_end: f64,
    /// Smallest pairwise distance seen during the run.
    pub min_distance: f64,
    pub disconnect_time: Option<f64>,
    pub actions_started: u64,
    pub actions_interrupted: u64,
    /// Left out of serialized reports so artifacts are reproducible.
    #[serde(skip)]
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Sample>>,
}

/// The simulated swarm.
pub struct ContinuumWorld<'a> {
    d: &'a Derivation,
    cfg: ContinuumConfig,
    shifts: Shifts,
    agents: Vec<Agent>,
    /// Offset and distance from agent i to agent j at index i * n + j.
    geom: Vec<(Vec2, f64)>,
    scratch: Vec<Vec2>,
    rng: ChaCha8Rng,
    t: f64,
    steps: u64,
    min_distance: f64,
    actions_started: u64,
    actions_interrupted: u64,
}

impl<'a> ContinuumWorld<'a> {
    pub fn new(d: &'a Derivation, cfg: &ContinuumConfig, positions: &[Vec2], seed: u64) -> Result<Self> {
        cfg.validate()?;
        if positions.len() < 2 {
            return Err(Error::SingletonPattern);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let agents = positions
            .iter()
            .map(|&pos| Agent {
                pos,
                vel: Vec2::ZERO,
                ctl: Controller::default(),
                next_tick: rng.gen_range(0.0..cfg.control_period),
            })
            .collect();
        let mut w = ContinuumWorld {
            d,
            cfg: *cfg,
            shifts: Shifts::solve(cfg)?,
            agents,
            geom: Vec::new(),
            scratch: Vec::new(),
            rng,
            t: 0.0,
            steps: 0,
            min_distance: f64::INFINITY,
            actions_started: 0,
            actions_interrupted: 0,
        };
        w.refresh_geometry();
        Ok(w)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    /// Recomputes pairwise offsets after the agents moved.
    fn refresh_geometry(&mut self) {
        let n = self.agents.len();
        self.geom.resize(n * n, (Vec2::ZERO, 0.0));
        let mut closest = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let r = self.agents[j].pos - self.agents[i].pos;
                let d = r.norm();
                self.geom[i * n + j] = (r, d);
                self.geom[j * n + i] = (r.scale(-1.0), d);
                closest = closest.min(d);
            }
        }
        self.min_distance = self.min_distance.min(closest);
    }

    /// Offsets and distances of the agents within sensing range of `i`.
    fn sensed(&self, i: usize) -> impl Iterator<Item = (usize, Vec2, f64)> + '_ {
        let n = self.agents.len();
        let range = self.cfg.rho_sensor;
        self.geom[i * n..(i + 1) * n]
            .iter()
            .enumerate()
            .filter(move |&(j, &(_, d))| j != i && d <= range)
            .map(|(j, &(r, d))| (j, r, d))
    }

    fn is_moving_fast(&self, j: usize) -> bool {
        self.agents[j].vel.norm() > self.cfg.acting_speed()
    }

    /// Discretised local state of agent `i`, `None` with nobody in range.
    pub fn state_of(&self, i: usize) -> Option<LocalState> {
        let rel: Vec<Vec2> = self.sensed(i).map(|(_, r, _)| r).collect();
        discretize_state(&rel, &self.cfg).ok()
    }

    fn command(&mut self, i: usize) -> Result<Vec2> {
        if let Some(action) = self.agents[i].ctl.action {
            let remaining = action.target - self.agents[i].pos;
            let dist = remaining.norm();
            if dist > self.cfg.arrival_tolerance {
                return Ok(remaining.scale(self.cfg.v_action / dist));
            }
            self.agents[i].ctl.complete();
        }
        if let Some(home) = self.agents[i].ctl.retreat {
            let remaining = home - self.agents[i].pos;
            let dist = remaining.norm();
            let crowded = self.sensed(i).any(|(_, _, d)| d < self.cfg.rho_safe);
            if dist > self.cfg.arrival_tolerance && !crowded {
                let speed = self.cfg.v_action.min(RETREAT_GAIN * dist);
                return Ok(remaining.scale(speed / dist));
            }
            self.agents[i].ctl.retreat = None;
        }
        // Acting neighbours are left out of the alignment unless dangerously close.
        let mut rel = std::mem::take(&mut self.scratch);
        rel.clear();
        rel.extend(
            self.sensed(i)
                .filter(|&(j, _, d)| !self.is_moving_fast(j) || d < self.cfg.rho_safe)
                .map(|(_, r, _)| r),
        );
        let v = commanded_velocity(&rel, &self.shifts, &self.cfg);
        self.scratch = rel;
        v
    }

    /// Advances the swarm by one integration step.
    pub fn step(&mut self) -> Result<()> {
        let n = self.agents.len();
        let mut cmds = [Vec2::ZERO; 64];
        let mut cmds_vec = Vec::new();
        let cmds: &mut [Vec2] = if n <= cmds.len() {
            &mut cmds[..n]
        } else {
            cmds_vec.resize(n, Vec2::ZERO);
            &mut cmds_vec
        };
        for (i, c) in cmds.iter_mut().enumerate() {
            *c = self.command(i)?;
        }
        let dt = self.cfg.dt;
        let gain = 1.0 - (-dt / self.cfg.tau).exp();
        for (a, &cmd) in self.agents.iter_mut().zip(cmds.iter()) {
            a.vel += (cmd - a.vel).scale(gain);
            a.pos += a.vel.scale(dt);
            a.ctl.elapse(dt, &self.cfg);
        }
        self.refresh_geometry();
        self.steps += 1;
        self.t = self.steps as f64 * dt;
        for i in 0..n {
            if self.agents[i].next_tick <= self.t + 1e-9 {
                let j = self.cfg.tick_jitter;
                let scale = if j > 0.0 { self.rng.gen_range(1.0 - j..=1.0 + j) } else { 1.0 };
                self.agents[i].next_tick += self.cfg.control_period * scale;
                self.tick(i);
            }
        }
        Ok(())
    }

    fn tick(&mut self, i: usize) {
        let mut rel = Vec::new();
        let mut neighbor_acting = false;
        let mut min_distance = f64::INFINITY;
        for (j, r, d) in self.sensed(i) {
            neighbor_acting |= self.is_moving_fast(j);
            min_distance = min_distance.min(d);
            rel.push(r);
        }
        let obs = control::Observation {
            state: discretize_state(&rel, &self.cfg).ok(),
            neighbor_acting,
            min_distance,
        };
        let q = &self.d.q_safe;
        let rng = &mut self.rng;
        let pos = self.agents[i].pos;
        let choose = |s: LocalState| -> Option<Direction> { q.get(s).iter().choose(rng) };
        match self.agents[i].ctl.tick(pos, &obs, &self.cfg, choose) {
            control::TickEvent::Started => self.actions_started += 1,
            control::TickEvent::Interrupted => {
                self.actions_interrupted += 1;
                let b = self.cfg.interrupt_backoff;
                if b > 0.0 {
                    self.agents[i].ctl.backoff = self.rng.gen_range(0.0..=b);
                }
            }
            control::TickEvent::None => {}
        }
    }

    /// Connectivity of the sensing graph.
    pub fn is_connected(&self) -> bool {
        let n = self.agents.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (j, _, _) in self.sensed(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Lattice cells obtained by rounding positions relative to agent 0.
    pub fn rounded_cells(&self) -> Vec<Cell> {
        let o = self.agents[0].pos;
        let r = self.cfg.rho_des;
        self.agents
            .iter()
            .map(|a| {
                let p = a.pos - o;
                Cell::new((p.x / r).round() as i32, (p.y / r).round() as i32)
            })
            .collect()
    }

    /// Formed: nobody acting, every discretised state desired, and the rounded
    /// positions form the desired pattern.
    pub fn has_formed(&self, p_des: &Pattern) -> bool {
        if self.agents.iter().any(|a| a.ctl.mode == Mode::Acting) {
            return false;
        }
        let all_desired = (0..self.agents.len()).all(|i| self.state_of(i).is_some_and(|s| self.d.sets.s_des.contains(s)));
        all_desired && Pattern::new(self.rounded_cells()).is_ok_and(|p| p == *p_des)
    }

    fn record(&self, out: &mut Vec<Sample>) {
        for (i, a) in self.agents.iter().enumerate() {
            out.push(Sample { t: self.t, agent: i, x: a.pos.x, y: a.pos.y, vx: a.vel.x, vy: a.vel.y, mode: a.ctl.mode });
        }
    }
}

/// Initial positions: a random connected lattice formation with jitter.
pub fn initial_positions<R: Rng>(n: usize, cfg: &ContinuumConfig, rng: &mut R) -> Vec<Vec2> {
    let j = cfg.init_jitter;
    random_formation(n, rng)
        .into_iter()
        .map(|c| {
            let base = Vec2::from_cell(c, cfg.rho_des);
            if j > 0.0 {
                base + Vec2::new(rng.gen_range(-j..=j), rng.gen_range(-j..=j))
            } else {
                base
            }
        })
        .collect()
}

/// Runs from the given positions until the pattern forms, the swarm
/// disconnects or time runs out.
pub fn simulate_from(
    p_des: &Pattern,
    name: &str,
    d: &Derivation,
    positions: &[Vec2],
    seed: u64,
    cfg: &ContinuumConfig,
) -> Result<ContinuumReport> {
    let start = Instant::now();
    let mut world = ContinuumWorld::new(d, cfg, positions, seed)?;
    let mut trajectory = (cfg.record_every > 0.0).then(Vec::new);
    let check_every = ((cfg.control_period / cfg.dt).round() as u64).max(1);
    let record_every = ((cfg.record_every / cfg.dt).round() as u64).max(1);
    if let Some(t) = trajectory.as_mut() {
        world.record(t);
    }
    let mut end = EndReason::TimeLimit;
    let mut i = 0u64;
    loop {
        if i.is_multiple_of(check_every) {
            if !world.is_connected() {
                end = EndReason::Disconnected;
                break;
            }
            if world.has_formed(p_des) {
                end = EndReason::Formed;
                break;
            }
        }
        if world.time() >= cfg.t_max {
            break;
        }
        world.step()?;
        i += 1;
        if let Some(t) = trajectory.as_mut() {
            if i.is_multiple_of(record_every) {
                world.record(t);
            }
        }
    }
    if let Some(t) = trajectory.as_mut() {
        if !i.is_multiple_of(record_every) {
            world.record(t);
        }
    }
    let t_end = world.time();
    Ok(ContinuumReport {
        pattern: name.to_string(),
        behavior: d.spec.name.clone(),
        seed,
        success: end == EndReason::Formed,
        end,
        t_complete: (end == EndReason::Formed).then_some(t_end),
        t_end,
        min_distance: world.min_distance(),
        disconnect_time: (end == EndReason::Disconnected).then_some(t_end),
        actions_started: world.actions_started,
        actions_interrupted: world.actions_interrupted,
        wall_time: start.elapsed().as_secs_f64(),
        trajectory,
    })
}

/// One seeded run from a random jittered formation.
pub fn simulate(p_des: &Pattern, name: &str, d: &Derivation, seed: u64, cfg: &ContinuumConfig) -> Result<ContinuumReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = initial_positions(p_des.len(), cfg, &mut rng);
    let mut report = simulate_from(p_des, name, d, &positions, rng.gen(), cfg)?;
    report.seed = seed;
    Ok(report)
}

/// `n_runs` seeded runs in parallel, in seed order.
pub fn batch(
    p_des: &Pattern,
    name: &str,
    d: &Derivation,
    n_runs: u64,
    base_seed: u64,
    cfg: &ContinuumConfig,
) -> Result<Vec<ContinuumReport>> {
    if n_runs == 0 {
        return Err(Error::Config("need at least one run".into()));
    }
    (0..n_runs)
        .into_par_iter()
        .map(|i| simulate(p_des, name, d, run_seed(base_seed, i), cfg))
        .collect()
}

pub fn runs_csv(reports: &[ContinuumReport]) -> String {
    let mut out = String::from("pattern,behavior,seed,success,t_complete,min_distance,disconnect_time,actions_started,actions_interrupted\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.4},{},{},{}",
            r.pattern,
            r.behavior,
            r.seed,
            r.success,
            opt(r.t_complete),
            r.min_distance,
            opt(r.disconnect_time),
            r.actions_started,
            r.actions_interrupted
        );
    }
    out
}

pub fn trajectory_csv(samples: &[Sample]) -> String {
    let mut out = String::from("t,agent,x,y,vx,vy,mode\n");
    for s in samples {
        let _ = writeln!(out, "{:.3},{},{:.5},{:.5},{:.5},{:.5},{}", s.t, s.agent, s.x, s.y, s.vx, s.vy, s.mode.name());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Behavior;
    use crate::patterns;

    fn derivation(p: &Pattern) -> Derivation {
        Derivation::new(p, &Behavior::Alt4.spec()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ContinuumConfig::default().validate().is_ok());
        let c = ContinuumConfig { rho_safe: 1.2, ..Default::default() };
        assert!(c.validate().is_err());
        let c = ContinuumConfig { dt: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = ContinuumConfig { k_r: 2.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn pair_at_rest_is_a_fixed_point() {
        let p = patterns::pair();
        let d = derivation(&p);
        let cfg = ContinuumConfig::default();
        let start = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)];
        let mut w = ContinuumWorld::new(&d, &cfg, &start, 1).unwrap();
        for _ in 0..500 {
            let before: Vec<Vec2> = w.agents().iter().map(|a| a.pos).collect();
            w.step().unwrap();
            for (a, b) in w.agents().iter().zip(before) {
                assert!((a.pos - b).norm() < 1e-9);
            }
        }
        assert!(w.has_formed(&p));
    }

    #[test]
    fn two_agents_converge_monotonically() {
        let p = patterns::pair();
        let d = derivation(&p);
        let cfg = ContinuumConfig::default();
        for rho0 in [0.15, 0.5, 0.9, 1.2, 1.55] {
            let start = [Vec2::new(0.0, 0.0), Vec2::new(rho0, 0.0)];
            let mut w = ContinuumWorld::new(&d, &cfg, &start, 7).unwrap();
            let mut prev = (rho0 - 1.0_f64).abs();
            for _ in 0..3000 {
                w.step().unwrap();
                let a = w.agents();
                let err = ((a[1].pos - a[0].pos).norm() - 1.0).abs();
                assert!(err <= prev + 1e-12, "rho0 {rho0}: error grew from {prev} to {err}");
                prev = err;
            }
            assert!(prev < 1e-3, "rho0 {rho0}: final error {prev}");
        }
    }

    #[test]
    fn formed_start_succeeds_at_once() {
        let p = patterns::triangle4();
        let d = derivation(&p);
        let cfg = ContinuumConfig::default();
        let start: Vec<Vec2> = p.iter().map(|c| Vec2::from_cell(c, 1.0)).collect();
        let r = simulate_from(&p, "triangle-4", &d, &start, 3, &cfg).unwrap();
        assert!(r.success);
        assert_eq!(r.t_complete, Some(0.0));
        assert_eq!(r.actions_started, 0);
    }

    #[test]
    fn runs_are_deterministic() {
        let p = patterns::triangle4();
        let d = derivation(&p);
        let cfg = ContinuumConfig { t_max: 300.0, record_every: 1.0, ..Default::default() };
        let a = simulate(&p, "t", &d, 11, &cfg).unwrap();
        let b = simulate(&p, "t", &d, 11, &cfg).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.t_end, b.t_end);
        assert_eq!(a.actions_started, b.actions_started);
    }

    #[test]
    fn far_apart_pair_disconnects() {
        let p = patterns::pair();
        let d = derivation(&p);
        let cfg = ContinuumConfig::default();
        let start = [Vec2::new(0.0, 0.0), Vec2::new(0.0, 3.0)];
        let r = simulate_from(&p, "pair", &d, &start, 1, &cfg).unwrap();
        assert!(!r.success);
        assert_eq!(r.disconnect_time, Some(0.0));
    }

    #[test]
    fn csv_headers() {
        assert!(trajectory_csv(&[]).starts_with("t,agent,x,y,vx,vy,mode"));
        assert!(runs_csv(&[]).starts_with("pattern,behavior,seed,success"));
    }
}
