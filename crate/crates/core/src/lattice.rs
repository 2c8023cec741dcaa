//! Discrete geometry shared by every other module: the 8-neighbour lattice,
//! local states, sensor layouts, action spaces and canonical patterns.
//!
//! Axis convention: `x` grows to the East, `y` grows to the North. Directions
//! are indexed clockwise starting at North:
//!
//! ```text
//!   7 NW   0 N   1 NE
//!   6 W      .   2 E
//!   5 SW   4 S   3 SE
//! ```
//!
//! Bit `i` of a [`LocalState`] is set iff a neighbour is sensed at
//! `Direction::ALL[i].offset()`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Legend used whenever a state is printed as a bit vector.
pub const DIRECTION_LEGEND: &str = "N NE E SE S SW W NW";

/// Number of valid local states for the 8-cell layout (the null state is excluded).
pub const STATE_COUNT: usize = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    /// Chebyshev (king-move) distance to the origin.
    pub fn chebyshev(self) -> i32 {
        self.x.abs().max(self.y.abs())
    }

    /// True for the eight cells around the origin.
    pub fn in_footprint(self) -> bool {
        self != Cell::ORIGIN && self.chebyshev() <= 1
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        (self - other).in_footprint()
    }

    pub fn neighbors(self) -> impl Iterator<Item = Cell> {
        Direction::ALL.into_iter().map(move |d| self + d.offset())
    }
}

impl From<[i32; 2]> for Cell {
    fn from([x, y]: [i32; 2]) -> Self {
        Cell { x, y }
    }
}

impl From<Cell> for [i32; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl Add for Cell {
    type Output = Cell;
    fn add(self, o: Cell) -> Cell {
        Cell::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Cell {
    type Output = Cell;
    fn sub(self, o: Cell) -> Cell {
        Cell::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Cell {
    type Output = Cell;
    fn neg(self) -> Cell {
        Cell::new(-self.x, -self.y)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Direction {
    N = 0,
    NE = 1,
    E = 2,
    SE = 3,
    S = 4,
    SW = 5,
    W = 6,
    NW = 7,
}

const OFFSETS: [Cell; 8] = [
    Cell::new(0, 1),
    Cell::new(1, 1),
    Cell::new(1, 0),
    Cell::new(1, -1),
    Cell::new(0, -1),
    Cell::new(-1, -1),
    Cell::new(-1, 0),
    Cell::new(-1, 1),
];

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Direction {
        Direction::ALL[i % 8]
    }

    pub fn offset(self) -> Cell {
        OFFSETS[self.index()]
    }

    pub fn opposite(self) -> Direction {
        Direction::from_index(self.index() + 4)
    }

    /// N, E, S or W.
    pub fn is_orthogonal(self) -> bool {
        self.index().is_multiple_of(2)
    }

    pub fn from_offset(c: Cell) -> Option<Direction> {
        OFFSETS.iter().position(|&o| o == c).map(Direction::from_index)
    }

    pub fn bit(self) -> u8 {
        1 << self.index()
    }

    pub fn name(self) -> &'static str {
        ["N", "NE", "E", "SE", "S", "SW", "W", "NW"][self.index()]
    }

    pub fn parse(name: &str) -> Option<Direction> {
        Direction::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of directions packed into one byte.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionSet(u8);

impl DirectionSet {
    pub const EMPTY: DirectionSet = DirectionSet(0);
    pub const ALL: DirectionSet = DirectionSet(0xff);

    pub const fn from_bits(bits: u8) -> Self {
        DirectionSet(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & d.bit() != 0
    }

    pub fn insert(&mut self, d: Direction) {
        self.0 |= d.bit();
    }

    pub fn remove(&mut self, d: Direction) {
        self.0 &= !d.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Direction> for DirectionSet {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> Self {
        let mut s = DirectionSet::EMPTY;
        for d in iter {
            s.insert(d);
        }
        s
    }
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(Direction::name)).finish()
    }
}

impl Serialize for DirectionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for DirectionSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dirs = Vec::<Direction>::deserialize(d)?;
        Ok(dirs.into_iter().collect())
    }
}

/// Occupancy of the eight cells around an agent. Never all-zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalState(u8);

impl LocalState {
    pub const SURROUNDED: LocalState = LocalState(0xff);

    pub fn new(bits: u8) -> Result<Self> {
        if bits == 0 {
            Err(Error::InvalidState("the null state is not a local state".into()))
        } else {
            Ok(LocalState(bits))
        }
    }

    /// Builds a state from its occupied directions.
    pub fn from_dirs(dirs: &[Direction]) -> Result<Self> {
        LocalState::new(dirs.iter().copied().collect::<DirectionSet>().bits())
    }

    /// Parses either an 8-character bit string in legend order (`"10100010"`)
    /// or a comma-separated list of direction names (`"N,E,W"`).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
        let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.len() == 8 && compact.chars().all(|c| c == '0' || c == '1') {
            let bits = compact
                .chars()
                .enumerate()
                .filter(|(_, c)| *c == '1')
                .fold(0u8, |acc, (i, _)| acc | (1 << i));
            return LocalState::new(bits);
        }
        let mut set = DirectionSet::EMPTY;
        for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let d = Direction::parse(part)
                .ok_or_else(|| Error::InvalidState(format!("unknown direction `{part}`")))?;
            set.insert(d);
        }
        LocalState::new(set.bits())
    }

    /// All 255 valid states in increasing bit order.
    pub fn all() -> impl Iterator<Item = LocalState> {
        (1..=255u8).map(LocalState)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Dense index in `0..255`.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> LocalState {
        LocalState(i as u8 + 1)
    }

    pub fn has(self, d: Direction) -> bool {
        self.0 & d.bit() != 0
    }

    /// Occupancy of a cell given relative to the agent. The agent's own cell
    /// and anything outside the footprint read as empty.
    pub fn occupied(self, c: Cell) -> bool {
        Direction::from_offset(c).is_some_and(|d| self.has(d))
    }

    pub fn neighbor_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn neighbors(self) -> DirectionSet {
        DirectionSet(self.0)
    }

    pub fn empty_directions(self) -> DirectionSet {
        DirectionSet(!self.0)
    }

    pub fn neighbor_cells(self) -> impl Iterator<Item = Cell> {
        self.neighbors().iter().map(Direction::offset)
    }

    pub fn with(self, d: Direction) -> LocalState {
        LocalState(self.0 | d.bit())
    }

    /// `None` when removing the bit would leave the null state.
    pub fn without(self, d: Direction) -> Option<LocalState> {
        LocalState::new(self.0 & !d.bit()).ok()
    }

    /// Space-separated bit vector in legend order, e.g. `[1 0 1 0 0 0 1 0]`.
    pub fn bit_vector(self) -> String {
        let bits: Vec<&str> = (0..8)
            .map(|i| if self.0 & (1 << i) != 0 { "1" } else { "0" })
            .collect();
        format!("[{}]", bits.join(" "))
    }

    pub fn bit_string(self) -> String {
        (0..8)
            .map(|i| if self.0 & (1 << i) != 0 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for LocalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.neighbors().iter().map(Direction::name).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for LocalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for LocalState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.bit_string())
    }
}

impl<'de> Deserialize<'de> for LocalState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        LocalState::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Relative cells a robot can sense.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorLayout {
    offsets: Vec<Cell>,
}

impl SensorLayout {
    pub fn new(offsets: Vec<Cell>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Config("sensor layout is empty".into()));
        }
        let mut seen = HashSet::new();
        for &c in &offsets {
            if c == Cell::ORIGIN {
                return Err(Error::Config("sensor layout cannot contain the agent's own cell".into()));
            }
            if !seen.insert(c) {
                return Err(Error::Config(format!("sensor layout repeats offset {c}")));
            }
        }
        Ok(SensorLayout { offsets })
    }

    /// The 8-cell layout used throughout the crate.
    pub fn moore() -> Self {
        SensorLayout { offsets: OFFSETS.to_vec() }
    }

    pub fn offsets(&self) -> &[Cell] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn senses(&self, c: Cell) -> bool {
        self.offsets.contains(&c)
    }

    /// Omni-directional layouts are closed under negation.
    pub fn is_omnidirectional(&self) -> bool {
        self.offsets.iter().all(|&c| self.senses(-c))
    }

    /// Number of valid states: every realization except the null one.
    pub fn state_count(&self) -> u64 {
        (1u64 << self.offsets.len()) - 1
    }
}

impl Default for SensorLayout {
    fn default() -> Self {
        SensorLayout::moore()
    }
}

/// Moves an agent is physically able to make.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    moves: DirectionSet,
}

impl ActionSpace {
    pub fn new(moves: DirectionSet, layout: &SensorLayout) -> Result<Self> {
        if moves.is_empty() {
            return Err(Error::Config("action space is empty".into()));
        }
        if let Some(d) = moves.iter().find(|d| !layout.senses(d.offset())) {
            return Err(Error::Config(format!("move {d} targets a cell the sensors cannot see")));
        }
        Ok(ActionSpace { moves })
    }

    pub fn omnidirectional() -> Self {
        ActionSpace { moves: DirectionSet::ALL }
    }

    pub fn moves(self) -> DirectionSet {
        self.moves
    }
}

impl Default for ActionSpace {
    fn default() -> Self {
        ActionSpace::omnidirectional()
    }
}

/// Anything that can answer "is this lattice cell occupied?".
pub trait Occupancy {
    fn is_occupied(&self, c: Cell) -> bool;
}

impl Occupancy for BTreeSet<Cell> {
    fn is_occupied(&self, c: Cell) -> bool {
        self.contains(&c)
    }
}

impl<S: std::hash::BuildHasher> Occupancy for HashSet<Cell, S> {
    fn is_occupied(&self, c: Cell) -> bool {
        self.contains(&c)
    }
}

impl Occupancy for Pattern {
    fn is_occupied(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }
}

/// Raw occupancy byte around `c`; zero when `c` is isolated.
pub fn sense<O: Occupancy + ?Sized>(cells: &O, c: Cell) -> u8 {
    Direction::ALL
        .iter()
        .filter(|d| cells.is_occupied(c + d.offset()))
        .fold(0u8, |acc, d| acc | d.bit())
}

/// Local state of the agent at `c`.
pub fn state_of<O: Occupancy + ?Sized>(cells: &O, c: Cell) -> Result<LocalState> {
    if !cells.is_occupied(c) {
        return Err(Error::CellNotInPattern(c));
    }
    LocalState::new(sense(cells, c))
        .map_err(|_| Error::InvalidState(format!("agent at {c} has no neighbours")))
}

/// Whether two states can coexist when the second agent sits at `offset`
/// from the first: every cell visible to both agents must be seen the same
/// way, with each agent's own cell counted as occupied.
///
/// Offsets further than two cells apart share no visible cell and always agree.
pub fn frames_agree(a: LocalState, b: LocalState, offset: Cell) -> bool {
    if offset == Cell::ORIGIN {
        return false;
    }
    let occ_a = |c: Cell| c == Cell::ORIGIN || a.occupied(c);
    let occ_b = |c: Cell| c == offset || b.occupied(c - offset);
    let (x0, x1) = (offset.x.max(0) - 1, offset.x.min(0) + 1);
    let (y0, y1) = (offset.y.max(0) - 1, offset.y.min(0) + 1);
    for x in x0..=x1 {
        for y in y0..=y1 {
            let c = Cell::new(x, y);
            if occ_a(c) != occ_b(c) {
                return false;
            }
        }
    }
    true
}

/// Two states match along `u` when the first senses the second at `u`, the
/// second senses the first at `u`'s opposite, and their shared view agrees.
pub fn states_match(a: LocalState, b: LocalState, u: Direction) -> bool {
    a.has(u) && b.has(u.opposite()) && frames_agree(a, b, u.offset())
}

/// True iff the cells form a single component under 8-neighbour adjacency.
/// The empty set counts as connected.
pub fn is_connected<'a, I>(cells: I) -> bool
where
    I: IntoIterator<Item = &'a Cell>,
{
    let set: FxHashSet<Cell> = cells.into_iter().copied().collect();
    let Some(&start) = set.iter().next() else {
        return true;
    };
    let mut seen = FxHashSet::default();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for n in c.neighbors() {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// A finite set of lattice cells in canonical translation (`min x = min y = 0`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    cells: BTreeSet<Cell>,
}

impl Pattern {
    /// Validates and canonicalizes: rejects empty input, duplicates and
    /// disconnected sets.
    pub fn new<I: IntoIterator<Item = Cell>>(cells: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in cells {
            if !set.insert(c) {
                return Err(Error::DuplicateCell(c));
            }
        }
        if set.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if !is_connected(&set) {
            return Err(Error::DisconnectedPattern);
        }
        canonicalize(set)
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn is_connected(&self) -> bool {
        is_connected(&self.cells)
    }

    pub fn width(&self) -> i32 {
        self.cells.iter().map(|c| c.x).max().unwrap_or(-1) + 1
    }

    pub fn height(&self) -> i32 {
        self.cells.iter().map(|c| c.y).max().unwrap_or(-1) + 1
    }

    /// Local states of all agents, keyed by cell.
    pub fn states(&self) -> Result<Vec<(Cell, LocalState)>> {
        self.iter().map(|c| state_of(self, c).map(|s| (c, s))).collect()
    }

    /// ASCII picture, North up.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for y in (0..self.height()).rev() {
            for x in 0..self.width() {
                out.push(if self.contains(Cell::new(x, y)) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.cells.iter().map(|c| (c.x, c.y))).finish()
    }
}

/// Translates the cells so that `min x = min y = 0`. Connectivity is not
/// checked here; [`Pattern::new`] does that.
pub fn canonicalize<I: IntoIterator<Item = Cell>>(cells: I) -> Result<Pattern> {
    let cells: Vec<Cell> = cells.into_iter().collect();
    let min_x = cells.iter().map(|c| c.x).min().ok_or(Error::EmptyPattern)?;
    let min_y = cells.iter().map(|c| c.y).min().ok_or(Error::EmptyPattern)?;
    let shift = Cell::new(min_x, min_y);
    Ok(Pattern {
        cells: cells.into_iter().map(|c| c - shift).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;

    fn st(dirs: &[Direction]) -> LocalState {
        LocalState::from_dirs(dirs).unwrap()
    }

    fn set(cells: &[(i32, i32)]) -> BTreeSet<Cell> {
        cells.iter().map(|&(x, y)| Cell::new(x, y)).collect()
    }

    #[test]
    fn direction_offsets_and_opposites() {
        assert_eq!(N.offset(), Cell::new(0, 1));
        assert_eq!(SE.offset(), Cell::new(1, -1));
        assert_eq!(NW.offset(), Cell::new(-1, 1));
        for d in Direction::ALL {
            assert_eq!(d.opposite().offset(), -d.offset());
            assert_eq!(d.opposite().opposite(), d);
            assert_eq!(Direction::from_offset(d.offset()), Some(d));
        }
    }

    #[test]
    fn state_of_examples() {
        let pair = set(&[(0, 0), (1, 0)]);
        assert_eq!(state_of(&pair, Cell::new(0, 0)).unwrap(), st(&[E]));
        assert_eq!(state_of(&pair, Cell::new(1, 0)).unwrap(), st(&[W]));
        let block: BTreeSet<Cell> = (0..3).flat_map(|x| (0..3).map(move |y| Cell::new(x, y))).collect();
        assert_eq!(state_of(&block, Cell::new(1, 1)).unwrap(), LocalState::SURROUNDED);
        assert!(matches!(state_of(&pair, Cell::new(5, 5)), Err(Error::CellNotInPattern(_))));
    }

    #[test]
    fn matching_examples() {
        assert!(states_match(st(&[E]), st(&[W]), E));
        // The first agent claims a robot at (1,1), which is the second agent's N cell.
        assert!(!states_match(st(&[E, NE]), st(&[W]), E));
        assert!(!states_match(st(&[E]), st(&[E]), E));
    }

    #[test]
    fn canonicalize_examples() {
        let p = canonicalize(set(&[(5, 5), (6, 5)])).unwrap();
        assert_eq!(p.cells(), &set(&[(0, 0), (1, 0)]));
        assert_eq!(canonicalize(set(&[(0, 0)])).unwrap().cells(), &set(&[(0, 0)]));
        let p = canonicalize(set(&[(-1, 2), (0, 2), (-1, 3)])).unwrap();
        assert_eq!(p.cells(), &set(&[(0, 0), (1, 0), (0, 1)]));
        assert!(matches!(canonicalize(Vec::new()), Err(Error::EmptyPattern)));
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&set(&[(0, 0), (1, 1)])));
        assert!(!is_connected(&set(&[(0, 0), (2, 0)])));
        assert!(is_connected(&set(&[(0, 0), (1, 0), (2, 0), (1, 1)])));
    }

    #[test]
    fn pattern_validation() {
        assert!(matches!(Pattern::new(vec![]), Err(Error::EmptyPattern)));
        assert!(matches!(
            Pattern::new(vec![Cell::new(0, 0), Cell::new(0, 0)]),
            Err(Error::DuplicateCell(_))
        ));
        assert!(matches!(
            Pattern::new(vec![Cell::new(0, 0), Cell::new(3, 0)]),
            Err(Error::DisconnectedPattern)
        ));
    }

    #[test]
    fn state_space_size() {
        assert_eq!(LocalState::all().count(), STATE_COUNT);
        assert_eq!(SensorLayout::moore().state_count(), 255);
        assert!(LocalState::new(0).is_err());
    }

    #[test]
    fn parse_and_print() {
        let s = LocalState::parse("10100010").unwrap();
        assert_eq!(s, st(&[N, E, W]));
        assert_eq!(s.bit_vector(), "[1 0 1 0 0 0 1 0]");
        assert_eq!(LocalState::parse("N, E ,W").unwrap(), s);
        assert_eq!(s.to_string(), "{N,E,W}");
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<LocalState>(&json).unwrap(), s);
    }

    #[test]
    fn layouts_and_action_spaces() {
        let moore = SensorLayout::moore();
        assert!(moore.is_omnidirectional());
        let forward = SensorLayout::new(vec![Cell::new(0, 1), Cell::new(1, 1), Cell::new(-1, 1)]).unwrap();
        assert!(!forward.is_omnidirectional());
        assert!(SensorLayout::new(vec![Cell::ORIGIN]).is_err());
        assert!(ActionSpace::new(DirectionSet::EMPTY, &moore).is_err());
        let blind = ActionSpace::new([S].into_iter().collect(), &forward);
        assert!(blind.is_err());
        assert!(ActionSpace::new([N, NE].into_iter().collect(), &forward).is_ok());
    }
}
