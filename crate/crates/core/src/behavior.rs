//! From a desired pattern to a local behaviour: desired states, the safe
//! state-action map, and the desired / blocked / static / active / simplicial
//! classification of all 255 states.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    is_connected, state_of, ActionSpace, Cell, Direction, DirectionSet, LocalState, Pattern,
    SensorLayout,
};

/// A set of local states, stored as a 256-bit mask indexed by state bits.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StateSet([u64; 4]);

impl StateSet {
    pub const EMPTY: StateSet = StateSet([0; 4]);

    pub fn all() -> Self {
        let mut s = StateSet([u64::MAX; 4]);
        s.0[0] &= !1;
        s
    }

    pub fn contains(&self, s: LocalState) -> bool {
        let b = s.bits() as usize;
        self.0[b / 64] & (1 << (b % 64)) != 0
    }

    pub fn insert(&mut self, s: LocalState) -> bool {
        let b = s.bits() as usize;
        let fresh = !self.contains(s);
        self.0[b / 64] |= 1 << (b % 64);
        fresh
    }

    pub fn remove(&mut self, s: LocalState) {
        let b = s.bits() as usize;
        self.0[b / 64] &= !(1 << (b % 64));
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn union(&self, o: &StateSet) -> StateSet {
        StateSet(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }

    pub fn intersection(&self, o: &StateSet) -> StateSet {
        StateSet(std::array::from_fn(|i| self.0[i] & o.0[i]))
    }

    pub fn difference(&self, o: &StateSet) -> StateSet {
        StateSet(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }

    pub fn is_subset(&self, o: &StateSet) -> bool {
        self.difference(o).is_empty()
    }

    /// States in increasing bit order.
    pub fn iter(&self) -> impl Iterator<Item = LocalState> + '_ {
        LocalState::all().filter(move |s| self.contains(*s))
    }

    pub fn to_vec(&self) -> Vec<LocalState> {
        self.iter().collect()
    }
}

impl FromIterator<LocalState> for StateSet {
    fn from_iter<I: IntoIterator<Item = LocalState>>(iter: I) -> Self {
        let mut s = StateSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for StateSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for StateSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<LocalState>::deserialize(d)?.into_iter().collect())
    }
}

/// Per-state set of safe moves. States without an entry cannot move.
#[derive(Clone, PartialEq, Eq)]
pub struct SafeActionMap {
    entries: Box<[DirectionSet; 256]>,
}

impl SafeActionMap {
    pub fn empty() -> Self {
        SafeActionMap { entries: Box::new([DirectionSet::EMPTY; 256]) }
    }

    pub fn get(&self, s: LocalState) -> DirectionSet {
        self.entries[s.bits() as usize]
    }

    pub fn set(&mut self, s: LocalState, actions: DirectionSet) {
        self.entries[s.bits() as usize] = actions;
    }

    /// States with at least one safe action.
    pub fn domain(&self) -> StateSet {
        LocalState::all().filter(|s| !self.get(*s).is_empty()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LocalState, DirectionSet)> + '_ {
        LocalState::all()
            .map(|s| (s, self.get(s)))
            .filter(|(_, a)| !a.is_empty())
    }

    pub fn pair_count(&self) -> usize {
        self.iter().map(|(_, a)| a.len()).sum()
    }

    /// Copy of the map with a subset of moves retained for each state.
    pub fn restricted<F: FnMut(LocalState, Direction) -> bool>(&self, mut keep: F) -> Self {
        let mut out = SafeActionMap::empty();
        for (s, a) in self.iter() {
            out.set(s, a.iter().filter(|&d| keep(s, d)).collect());
        }
        out
    }
}

impl fmt::Debug for SafeActionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl Serialize for SafeActionMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let table: BTreeMap<String, Vec<Direction>> = self
            .iter()
            .map(|(st, a)| (st.bit_string(), a.iter().collect()))
            .collect();
        table.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SafeActionMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let table = BTreeMap::<String, Vec<Direction>>::deserialize(d)?;
        let mut map = SafeActionMap::empty();
        for (k, dirs) in table {
            let s = LocalState::parse(&k).map_err(serde::de::Error::custom)?;
            map.set(s, dirs.into_iter().collect());
        }
        Ok(map)
    }
}

/// The partition of the state space induced by a behaviour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSets {
    pub s_des: StateSet,
    pub s_blocked: StateSet,
    pub s_static: StateSet,
    pub s_active: StateSet,
    pub s_simplicial: StateSet,
}

impl StateSets {
    pub fn is_static(&self, s: LocalState) -> bool {
        self.s_static.contains(s)
    }

    pub fn is_active(&self, s: LocalState) -> bool {
        self.s_active.contains(s)
    }

    pub fn class_of(&self, s: LocalState) -> StateClass {
        if self.s_des.contains(s) {
            StateClass::Desired
        } else if self.s_blocked.contains(s) {
            StateClass::Blocked
        } else {
            StateClass::Active
        }
    }

    /// Checks the partition invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let all = StateSet::all();
        let bad = |m: &str| Err(Error::Config(format!("state sets violate: {m}")));
        if self.s_static != self.s_des.union(&self.s_blocked) {
            return bad("static = desired ∪ blocked");
        }
        if self.s_active != all.difference(&self.s_static) {
            return bad("active = all \\ static");
        }
        if !self.s_blocked.intersection(&self.s_simplicial).is_empty() {
            return bad("blocked ∩ simplicial = ∅");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateClass {
    Desired,
    Blocked,
    Active,
}

/// Behaviour configuration. Modifications are layered on top of the plain
/// safe map: a neighbour-count threshold above which states are treated as
/// blocked, the "keep an orthogonal neighbour" move filter, and whether the
/// grid simulator forbids the same agent from moving twice in a row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorSpec {
    #[serde(default = "custom_name")]
    pub name: String,
    #[serde(default)]
    pub blocked_neighbor_threshold: Option<usize>,
    #[serde(default)]
    pub alt3_cross_rule: bool,
    #[serde(default)]
    pub alt1_no_repeat: bool,
    /// State whose moves are exempt from the orthogonal-neighbour filter.
    #[serde(default)]
    pub cross_rule_exception: Option<LocalState>,
    /// Extra states forced into the blocked set.
    #[serde(default)]
    pub extra_blocked: Vec<LocalState>,
}

fn custom_name() -> String {
    "custom".to_string()
}

/// Exemption from the orthogonal-neighbour filter used by ALT3 and ALT4.
/// Re-derived by [`crate::uniqueness::derive_cross_rule_exception`]; a test
/// pins that the derivation still returns this state.
pub const CROSS_RULE_EXCEPTION_BITS: u8 = 0b0100_0100;

pub fn cross_rule_exception() -> LocalState {
    LocalState::new(CROSS_RULE_EXCEPTION_BITS).expect("non-null constant")
}

/// The five behaviours compared in the grid experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Behavior {
    Baseline,
    Alt1,
    Alt2,
    Alt3,
    Alt4,
}

impl Behavior {
    pub const ALL: [Behavior; 5] = [
        Behavior::Baseline,
        Behavior::Alt1,
        Behavior::Alt2,
        Behavior::Alt3,
        Behavior::Alt4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Behavior::Baseline => "Baseline",
            Behavior::Alt1 => "ALT1",
            Behavior::Alt2 => "ALT2",
            Behavior::Alt3 => "ALT3",
            Behavior::Alt4 => "ALT4",
        }
    }

    pub fn parse(name: &str) -> Option<Behavior> {
        Behavior::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Each alteration is cumulative over the previous one.
    pub fn spec(self) -> BehaviorSpec {
        let mut spec = BehaviorSpec::baseline();
        spec.name = self.name().to_string();
        if self >= Behavior::Alt1 {
            spec.alt1_no_repeat = true;
        }
        if self >= Behavior::Alt2 {
            spec.blocked_neighbor_threshold = Some(5);
        }
        if self >= Behavior::Alt3 {
            spec.alt3_cross_rule = true;
            spec.cross_rule_exception = Some(cross_rule_exception());
        }
        if self >= Behavior::Alt4 {
            spec.blocked_neighbor_threshold = Some(4);
        }
        spec
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BehaviorSpec {
    pub fn baseline() -> Self {
        BehaviorSpec {
            name: "Baseline".into(),
            blocked_neighbor_threshold: None,
            alt3_cross_rule: false,
            alt1_no_repeat: false,
            cross_rule_exception: None,
            extra_blocked: Vec::new(),
        }
    }

    /// Whether the threshold or the explicit list forces `s` into the blocked set.
    pub fn forces_blocked(&self, s: LocalState) -> bool {
        self.blocked_neighbor_threshold
            .is_some_and(|t| s.neighbor_count() > t)
            || self.extra_blocked.contains(&s)
    }
}

/// States agents are in once `p_des` is formed.
pub fn derive_desired_states(p_des: &Pattern) -> Result<StateSet> {
    if p_des.len() < 2 {
        return Err(Error::SingletonPattern);
    }
    p_des.iter().map(|c| state_of(p_des, c)).collect()
}

/// Moves that cannot collide, cannot go blind and keep the agent's prior
/// neighbours connected to it. The vacated cell is not used as a bridge.
pub fn safe_actions(s: LocalState, actions: &ActionSpace) -> DirectionSet {
    safe_actions_with_layout(s, actions, &SensorLayout::moore())
}

pub fn safe_actions_with_layout(
    s: LocalState,
    actions: &ActionSpace,
    layout: &SensorLayout,
) -> DirectionSet {
    let neighbors: Vec<Cell> = s.neighbor_cells().collect();
    actions
        .moves()
        .iter()
        .filter(|&d| !s.has(d))
        .filter(|&d| layout.senses(d.offset()))
        .filter(|&d| {
            let mut cells = neighbors.clone();
            cells.push(d.offset());
            is_connected(&cells)
        })
        .collect()
}

/// The orthogonal-neighbour rule evaluated in the mover's own frame: after
/// the move, the mover and every neighbour it can see must still have a
/// neighbour at N, E, S or W among the cells the mover can account for.
/// Cells outside the mover's original footprint count as empty.
pub fn keeps_orthogonal_contact(s: LocalState, d: Direction) -> bool {
    let mut occupied: Vec<Cell> = s.neighbor_cells().collect();
    occupied.push(d.offset());
    let orth = [Direction::N, Direction::E, Direction::S, Direction::W];
    occupied.iter().all(|&a| {
        orth.iter()
            .any(|o| occupied.contains(&(a + o.offset())))
    })
}

/// Connected groups of neighbours once the agent itself is removed.
pub fn cliques(s: LocalState) -> Vec<DirectionSet> {
    let mut remaining = s.neighbors();
    let mut out = Vec::new();
    while let Some(seed) = remaining.iter().next() {
        let mut clique = DirectionSet::EMPTY;
        let mut stack = vec![seed];
        remaining.remove(seed);
        while let Some(d) = stack.pop() {
            clique.insert(d);
            for other in remaining.iter() {
                if d.offset().is_adjacent(other.offset()) {
                    remaining.remove(other);
                    stack.push(other);
                }
            }
        }
        out.push(clique);
    }
    out
}

/// One clique and not fully surrounded.
pub fn is_simplicial(s: LocalState) -> bool {
    s.neighbor_count() < 8 && cliques(s).len() == 1
}

/// Classifies every state and builds the safe map for a behaviour.
pub fn classify(
    s_des: &StateSet,
    actions: &ActionSpace,
    spec: &BehaviorSpec,
) -> (StateSets, SafeActionMap) {
    let mut q = SafeActionMap::empty();
    let mut s_blocked = StateSet::EMPTY;
    for s in LocalState::all() {
        if s_des.contains(s) {
            continue;
        }
        let mut moves = safe_actions(s, actions);
        if spec.alt3_cross_rule && spec.cross_rule_exception != Some(s) {
            moves = moves.iter().filter(|&d| keeps_orthogonal_contact(s, d)).collect();
        }
        if spec.forces_blocked(s) {
            moves = DirectionSet::EMPTY;
        }
        if moves.is_empty() {
            s_blocked.insert(s);
        } else {
            q.set(s, moves);
        }
    }
    let s_static = s_des.union(&s_blocked);
    let s_active = StateSet::all().difference(&s_static);
    // An agent that can never leave is not simplicial, whatever its neighbours look like.
    let s_simplicial = LocalState::all()
        .filter(|&s| is_simplicial(s) && !s_blocked.contains(s))
        .collect();
    let sets = StateSets { s_des: *s_des, s_blocked, s_static, s_active, s_simplicial };
    (sets, q)
}

/// Everything derived from a desired pattern and a behaviour.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Derivation {
    pub spec: BehaviorSpec,
    pub sets: StateSets,
    pub q_safe: SafeActionMap,
}

impl Derivation {
    pub fn new(p_des: &Pattern, spec: &BehaviorSpec) -> Result<Self> {
        let s_des = derive_desired_states(p_des)?;
        Ok(Derivation::from_desired(&s_des, spec))
    }

    pub fn from_desired(s_des: &StateSet, spec: &BehaviorSpec) -> Self {
        let (sets, q_safe) = classify(s_des, &ActionSpace::omnidirectional(), spec);
        Derivation { spec: spec.clone(), sets, q_safe }
    }

    /// Table of state → class for export.
    pub fn class_table(&self) -> BTreeMap<String, StateClass> {
        LocalState::all()
            .map(|s| (s.bit_string(), self.sets.class_of(s)))
            .collect()
    }
}
