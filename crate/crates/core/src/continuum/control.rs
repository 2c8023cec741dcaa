//! Local controller pieces: state discretisation, the attraction-repulsion
//! term, bearing alignment and the action state machine.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Cell, Direction, LocalState};

use super::ContinuumConfig;

/// Planar vector, x East and y North.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    /// Bearing clockwise from North, in (-π, π].
    pub fn bearing(self) -> f64 {
        self.x.atan2(self.y)
    }

    pub fn from_cell(c: Cell, spacing: f64) -> Vec2 {
        Vec2::new(c.x as f64 * spacing, c.y as f64 * spacing)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

/// Lattice cell a neighbour at relative position `rel` is assigned to:
/// round each coordinate in units of the spacing and clamp to the 3x3 view.
/// A neighbour that rounds onto the agent's own cell takes the nearest of
/// the eight cell centres.
pub fn neighbor_cell(rel: Vec2, rho_des: f64) -> Cell {
    let r = |v: f64| (v / rho_des).round().clamp(-1.0, 1.0) as i32;
    let c = Cell::new(r(rel.x), r(rel.y));
    if c != Cell::ORIGIN {
        return c;
    }
    let unit = rel.scale(1.0 / rho_des);
    Direction::ALL
        .into_iter()
        .map(|d| d.offset())
        .min_by(|a, b| {
            let da = (Vec2::from_cell(*a, 1.0) - unit).norm();
            let db = (Vec2::from_cell(*b, 1.0) - unit).norm();
            da.total_cmp(&db)
        })
        .expect("eight directions")
}

/// Local state from the relative positions of the sensed neighbours.
pub fn discretize_state(neighbors: &[Vec2], cfg: &ContinuumConfig) -> Result<LocalState> {
    let bits = neighbors
        .iter()
        .map(|&r| Direction::from_offset(neighbor_cell(r, cfg.rho_des)).expect("cell in footprint"))
        .fold(0u8, |acc, d| acc | d.bit());
    LocalState::new(bits).map_err(|_| Error::InvalidState("no neighbour within sensing range".into()))
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Radial speed towards a neighbour at distance `rho` (negative pushes away).
pub fn attraction_repulsion(rho: f64, rho_s: f64, cfg: &ContinuumConfig) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Config(format!("distance must be positive, got {rho}")));
    }
    Ok(-cfg.k_r / rho + sigmoid(cfg.k_a * (rho - rho_s)))
}

/// Shift that puts the zero of the attraction-repulsion term at `rho_des`.
///
/// The attraction term saturates at 1, so a zero exists only while
/// `k_r / rho_des <= 1`. At exactly 1 the shift is minus infinity: the
/// sigmoid is held at its upper limit and the term reduces to `1 - k_r / rho`.
pub fn solve_rho_s(rho_des: f64, cfg: &ContinuumConfig) -> Result<f64> {
    if !(cfg.k_r > 0.0 && cfg.k_a > 0.0 && rho_des > 0.0) {
        return Err(Error::Config("k_r, k_a and rho_des must all be positive".into()));
    }
    let target = cfg.k_r / rho_des;
    if target > 1.0 {
        return Err(Error::Config(format!(
            "no equilibrium at {rho_des} m: repulsion {target} exceeds the attraction limit 1"
        )));
    }
    if target == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    // f decreases in rho_s; widen a bracket, then bisect.
    let f = |s: f64| -cfg.k_r / rho_des + sigmoid(cfg.k_a * (rho_des - s));
    let (mut lo, mut hi) = (rho_des - 1.0, rho_des + 1.0);
    let mut widen = 0;
    while !(f(lo) > 0.0 && f(hi) < 0.0) {
        let w = hi - lo;
        lo -= w;
        hi += w;
        widen += 1;
        if widen > 60 {
            return Err(Error::Config("could not bracket the attraction shift".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Shifts for orthogonal and diagonal neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shifts {
    pub orthogonal: f64,
    pub diagonal: f64,
}

impl Shifts {
    pub fn solve(cfg: &ContinuumConfig) -> Result<Self> {
        Ok(Shifts {
            orthogonal: solve_rho_s(cfg.rho_des, cfg)?,
            diagonal: solve_rho_s(cfg.rho_des * SQRT_2, cfg)?,
        })
    }
}

/// Unit vectors (East, North) of the eight lattice bearings, N first, clockwise.
const AXES: [(f64, f64); 8] = [
    (0.0, 1.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (1.0, 0.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
];

/// Command of an agent towards one neighbour at relative position `rel`.
///
/// The bearing term `cos(2β_des - β)` is the reflection of the unit bearing
/// vector `u` across the desired axis `d`, i.e. `2(u·d)d - u`, so the command
/// is `(v_r + 2 v_b) u - 2 v_b (u·d) d` and needs no trigonometry.
pub fn pair_command(rel: Vec2, shifts: &Shifts, cfg: &ContinuumConfig) -> Result<Vec2> {
    let rho = rel.norm();
    if !(rho > 0.0) {
        return Err(Error::Config(format!("distance must be positive, got {rho}")));
    }
    let u = rel.scale(1.0 / rho);
    let (k, dot) = AXES
        .iter()
        .map(|&(x, y)| u.x * x + u.y * y)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, dot)| if dot > best.1 { (k, dot) } else { best });
    let rho_s = if k % 2 == 1 { shifts.diagonal } else { shifts.orthogonal };
    let v_r = attraction_repulsion(rho, rho_s, cfg)?;
    let (dx, dy) = AXES[k];
    let b = 2.0 * cfg.v_b;
    Ok(Vec2::new((v_r + b) * u.x - b * dot * dx, (v_r + b) * u.y - b * dot * dy))
}

/// Summed alignment command, or the command towards the closest neighbour
/// alone when it is inside the safety distance. Saturated at `v_align_max`.
pub fn commanded_velocity(neighbors: &[Vec2], shifts: &Shifts, cfg: &ContinuumConfig) -> Result<Vec2> {
    let Some(closest) = neighbors.iter().copied().min_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return Ok(Vec2::ZERO);
    };
    let mut v = Vec2::ZERO;
    if closest.norm() < cfg.rho_safe {
        v = pair_command(closest, shifts, cfg)?;
    } else {
        for &r in neighbors {
            v += pair_command(r, shifts, cfg)?;
        }
    }
    let speed = v.norm();
    if speed > cfg.v_align_max {
        v = v.scale(cfg.v_align_max / speed);
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Aligning while waiting for a quiet neighbourhood.
    Adjusting1,
    /// Quiet long enough; acts as soon as it is active and not too close.
    Idle,
    Acting,
    /// Settling after an action.
    Adjusting2,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Adjusting1 => "adjusting1",
            Mode::Idle => "idle",
            Mode::Acting => "acting",
            Mode::Adjusting2 => "adjusting2",
        }
    }
}

/// Action in progress.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub direction: Direction,
    pub start: Vec2,
    pub target: Vec2,
}

/// Per-agent controller memory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Controller {
    pub mode: Mode,
    pub timer: f64,
    pub action: Option<Action>,
    /// Start point of an interrupted action, returned to at action speed.
    pub retreat: Option<Vec2>,
    /// Extra settling time drawn after an interruption.
    pub backoff: f64,
}

/// What the agent observes at a controller tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub state: Option<LocalState>,
    pub neighbor_acting: bool,
    pub min_distance: f64,
}

/// Outcome of a tick that the simulator records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TickEvent {
    None,
    Started,
    Interrupted,
}

impl Default for Controller {
    fn default() -> Self {
        Controller { mode: Mode::Adjusting1, timer: 0.0, action: None, retreat: None, backoff: 0.0 }
    }
}

impl Controller {
    /// Advances timers by `dt` seconds of simulated time.
    pub fn elapse(&mut self, dt: f64, cfg: &ContinuumConfig) {
        self.timer += dt;
        match self.mode {
            Mode::Adjusting1 if self.timer >= cfg.t_adj1 => self.mode = Mode::Idle,
            Mode::Adjusting2 if self.timer >= cfg.t_adj2 + self.backoff => {
                self.mode = Mode::Adjusting1;
                self.timer = 0.0;
                self.retreat = None;
                self.backoff = 0.0;
            }
            _ => {}
        }
    }

    /// Action finished by reaching its target.
    pub fn complete(&mut self) {
        self.mode = Mode::Adjusting2;
        self.timer = 0.0;
        self.action = None;
    }

    /// One pass of the on-board decision logic. `choose` picks a safe move
    /// for an active state.
    pub fn tick<F: FnMut(LocalState) -> Option<Direction>>(
        &mut self,
        position: Vec2,
        obs: &Observation,
        cfg: &ContinuumConfig,
        mut choose: F,
    ) -> TickEvent {
        let crowded = obs.min_distance <= cfg.rho_safe;
        match self.mode {
            Mode::Acting => {
                if obs.neighbor_acting || crowded {
                    self.retreat = self.action.map(|a| a.start);
                    self.complete();
                    return TickEvent::Interrupted;
                }
            }
            Mode::Adjusting1 | Mode::Idle => {
                if obs.neighbor_acting {
                    self.mode = Mode::Adjusting1;
                    self.timer = 0.0;
                } else if self.mode == Mode::Idle && !crowded {
                    if let Some(dir) = obs.state.and_then(&mut choose) {
                        let step = Vec2::from_cell(dir.offset(), cfg.rho_des);
                        self.mode = Mode::Acting;
                        self.timer = 0.0;
                        self.action = Some(Action { direction: dir, start: position, target: position + step });
                        return TickEvent::Started;
                    }
                }
            }
            Mode::Adjusting2 => {}
        }
        TickEvent::None
    }
}
