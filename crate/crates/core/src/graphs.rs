//! Local transition graphs over the 255 states and the machine checks of
//! the local convergence conditions built on them.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::behavior::{keeps_orthogonal_contact, safe_actions, Derivation, SafeActionMap, StateSet, StateSets};
use crate::lattice::{frames_agree, states_match, ActionSpace, Cell, Direction, DirectionSet, LocalState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// The agent's own move.
    T1,
    /// A neighbour's move, possibly out of view.
    T2,
    /// A neighbour's move that stays in view.
    T2r,
    /// A new agent arriving in view.
    T3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: LocalState,
    pub to: LocalState,
    /// Move taken by the agent itself (T1 only).
    pub action: Option<Direction>,
}

/// Directed multigraph over local states, kept as a sorted edge list plus
/// successor sets for reachability queries.
#[derive(Clone, Serialize)]
pub struct TransitionGraph {
    pub variant: Variant,
    edges: Vec<Edge>,
    #[serde(skip)]
    succ: Vec<StateSet>,
}

impl TransitionGraph {
    fn from_edges(variant: Variant, edges: FxHashSet<Edge>) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort();
        let mut succ = vec![StateSet::EMPTY; 256];
        for e in &edges {
            succ[e.from.bits() as usize].insert(e.to);
        }
        TransitionGraph { variant, edges, succ }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn successors(&self, s: LocalState) -> &StateSet {
        &self.succ[s.bits() as usize]
    }

    pub fn has_edge(&self, from: LocalState, to: LocalState) -> bool {
        self.successors(from).contains(to)
    }
}

impl fmt::Debug for TransitionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransitionGraph({:?}, {} edges)", self.variant, self.edges.len())
    }
}

/// Every occupancy of the listed cells, layered on top of `base`.
fn completions(base: u8, free_bits: &[u8]) -> impl Iterator<Item = u8> + '_ {
    (0u32..1 << free_bits.len()).map(move |mask| {
        free_bits
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(base, |acc, (_, b)| acc | b)
    })
}

/// States the agent can be in after its own move `d` from `s`. Cells that
/// were outside its old view may hold anything.
pub fn t1_outcomes(s: LocalState, d: Direction) -> Vec<LocalState> {
    let shift = d.offset();
    let mut base = 0u8;
    let mut free = Vec::new();
    for c in Direction::ALL {
        let old = c.offset() + shift;
        if old.chebyshev() > 1 {
            free.push(c.bit());
        } else if old != Cell::ORIGIN && s.occupied(old) {
            base |= c.bit();
        }
    }
    completions(base, &free).filter_map(|b| LocalState::new(b).ok()).collect()
}

pub fn build_t1(q: &SafeActionMap) -> TransitionGraph {
    let mut edges = FxHashSet::default();
    for (s, moves) in q.iter() {
        for d in moves.iter() {
            for to in t1_outcomes(s, d) {
                edges.insert(Edge { from: s, to, action: Some(d) });
            }
        }
    }
    TransitionGraph::from_edges(Variant::T1, edges)
}

/// Which neighbour moves the observer admits in T2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborModel {
    /// Any Moore step onto a cell not known to be occupied.
    AnyStep,
    /// The step must be a safe action of some active state the neighbour
    /// could be in, given what the observer sees of its surroundings.
    #[default]
    LegalStep,
}

/// Whether the neighbour at `p` could take step `e` under the behaviour,
/// enumerating the part of its view the observer cannot see.
fn neighbor_may_step(s: LocalState, p: Cell, e: Direction, sets: &StateSets, q: &SafeActionMap) -> bool {
    let mut base = 0u8;
    let mut free = Vec::new();
    for o in Direction::ALL {
        let c = p + o.offset();
        if c.chebyshev() > 1 {
            free.push(o.bit());
        } else if c == Cell::ORIGIN || s.occupied(c) {
            base |= o.bit();
        }
    }
    let legal = completions(base, &free)
        .any(|b| LocalState::new(b).is_ok_and(|n| sets.is_active(n) && q.get(n).contains(e)));
    legal
}

fn build_t2_variant(
    sets: &StateSets,
    q: &SafeActionMap,
    model: NeighborModel,
    retained_only: bool,
) -> TransitionGraph {
    let mut edges = FxHashSet::default();
    for s in LocalState::all() {
        for pd in s.neighbors().iter() {
            let p = pd.offset();
            for e in Direction::ALL {
                let dest = p + e.offset();
                if dest == Cell::ORIGIN {
                    continue;
                }
                let inside = dest.in_footprint();
                if inside && s.occupied(dest) {
                    continue;
                }
                if retained_only && !inside {
                    continue;
                }
                if model == NeighborModel::LegalStep && !neighbor_may_step(s, p, e, sets, q) {
                    continue;
                }
                let mut bits = s.bits() & !pd.bit();
                if let Some(nd) = Direction::from_offset(dest) {
                    bits |= nd.bit();
                }
                if let Ok(to) = LocalState::new(bits) {
                    edges.insert(Edge { from: s, to, action: None });
                }
            }
        }
    }
    let variant = if retained_only { Variant::T2r } else { Variant::T2 };
    TransitionGraph::from_edges(variant, edges)
}

pub fn build_t2(sets: &StateSets, q: &SafeActionMap, model: NeighborModel) -> TransitionGraph {
    build_t2_variant(sets, q, model, false)
}

pub fn build_t2r(sets: &StateSets, q: &SafeActionMap, model: NeighborModel) -> TransitionGraph {
    build_t2_variant(sets, q, model, true)
}

pub fn build_t3() -> TransitionGraph {
    let mut edges = FxHashSet::default();
    for s in LocalState::all() {
        for d in s.empty_directions().iter() {
            edges.insert(Edge { from: s, to: s.with(d), action: None });
        }
    }
    TransitionGraph::from_edges(Variant::T3, edges)
}

/// All four graphs for one behaviour.
#[derive(Clone, Debug)]
pub struct Graphs {
    pub t1: TransitionGraph,
    pub t2: TransitionGraph,
    pub t2r: TransitionGraph,
    pub t3: TransitionGraph,
}

impl Graphs {
    pub fn build(d: &Derivation, model: NeighborModel) -> Self {
        Graphs {
            t1: build_t1(&d.q_safe),
            t2: build_t2(&d.sets, &d.q_safe, model),
            t2r: build_t2r(&d.sets, &d.q_safe, model),
            t3: build_t3(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Achievable,
    Lemma3Clique,
    Lemma3Loop,
    ThmExplore,
    ThmArrival,
}

/// A state that fails a condition, with a short reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: Condition,
    pub state: LocalState,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub achievable: bool,
    pub lemma3_clique_ok: bool,
    pub lemma3_loop_ok: bool,
    pub thm_explore_ok: bool,
    pub thm_arrival_ok: bool,
    pub witnesses: Vec<Witness>,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.achievable
            && self.lemma3_clique_ok
            && self.lemma3_loop_ok
            && self.thm_explore_ok
            && self.thm_arrival_ok
    }

    pub fn witnesses_for(&self, c: Condition) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(move |w| w.condition == c)
    }
}

/// How strictly the exploration walk treats static intermediate positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreMode {
    /// Walk only through active states; static positions count as reached.
    #[default]
    Strict,
    /// Also continue from static positions with the unmodified safe moves.
    Lenient,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalMode {
    /// Every non-surrounding arrival must activate the agent.
    #[default]
    Every,
    /// Some arrival activating the agent suffices.
    Exists,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub neighbors: NeighborModel,
    pub explore: ExploreMode,
    pub arrival: ArrivalMode,
}

/// States from which each desired state is reachable in `t1 ∪ t2`, per desired state.
/// Returns the states that miss at least one desired state.
pub fn check_achievable(t1: &TransitionGraph, t2: &TransitionGraph, sets: &StateSets) -> (bool, Vec<Witness>) {
    let mut pred = vec![Vec::new(); 256];
    for e in t1.edges().iter().chain(t2.edges()) {
        pred[e.to.bits() as usize].push(e.from);
    }
    let mut failing = StateSet::EMPTY;
    let mut witnesses = Vec::new();
    for target in sets.s_des.iter() {
        let mut seen = StateSet::EMPTY;
        seen.insert(target);
        let mut queue = VecDeque::from([target]);
        while let Some(s) = queue.pop_front() {
            for &p in &pred[s.bits() as usize] {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        let missing = StateSet::all().difference(&seen);
        if !missing.is_empty() {
            witnesses.push(Witness {
                condition: Condition::Achievable,
                state: target,
                detail: format!("unreachable from {} states", missing.len()),
            });
        }
        failing = failing.union(&missing);
    }
    (failing.is_empty(), witnesses)
}

/// Whether a clique of `s` can be filled entirely by desired simplicial
/// agents that match `s` and each other.
pub fn clique_formable(s: LocalState, clique: DirectionSet, pool: &[LocalState]) -> bool {
    let cells: Vec<Direction> = clique.iter().collect();
    let mut chosen: Vec<LocalState> = Vec::with_capacity(cells.len());
    fn assign(
        s: LocalState,
        cells: &[Direction],
        pool: &[LocalState],
        chosen: &mut Vec<LocalState>,
    ) -> bool {
        let k = chosen.len();
        if k == cells.len() {
            return true;
        }
        let here = cells[k];
        for &t in pool {
            if !states_match(s, t, here) {
                continue;
            }
            let consistent = cells[..k].iter().zip(chosen.iter()).all(|(&prev, &pt)| {
                frames_agree(pt, t, here.offset() - prev.offset())
            });
            if consistent {
                chosen.push(t);
                if assign(s, cells, pool, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    assign(s, &cells, pool, &mut chosen)
}

pub fn check_lemma3(sets: &StateSets, t2r: &TransitionGraph) -> (bool, bool, Vec<Witness>) {
    let pool: Vec<LocalState> = sets.s_des.intersection(&sets.s_simplicial).to_vec();
    let mut witnesses = Vec::new();
    for s in sets.s_blocked.difference(&sets.s_des).iter() {
        for clique in crate::behavior::cliques(s) {
            if clique_formable(s, clique, &pool) {
                witnesses.push(Witness {
                    condition: Condition::Lemma3Clique,
                    state: s,
                    detail: format!("clique {clique:?} can be formed by desired simplicial agents"),
                });
            }
        }
    }
    let clique_ok = witnesses.is_empty();
    for s in sets.s_static.iter().filter(|s| s.neighbor_count() == 2) {
        let escapes = t2r.successors(s).intersection(&sets.s_active);
        if escapes.is_empty() {
            witnesses.push(Witness {
                condition: Condition::Lemma3Loop,
                state: s,
                detail: "no in-view neighbour move makes it active".into(),
            });
        }
    }
    let loop_ok = witnesses.iter().all(|w| w.condition != Condition::Lemma3Loop);
    (clique_ok, loop_ok, witnesses)
}

fn sense_fixed(neighbors: &[Cell], at: Cell) -> Option<LocalState> {
    let bits = Direction::ALL
        .iter()
        .filter(|d| neighbors.contains(&(at + d.offset())))
        .fold(0u8, |acc, d| acc | d.bit());
    LocalState::new(bits).ok()
}

/// Open cells the agent in `s` fails to reach when walking around its
/// fixed neighbours. Empty means the condition holds for `s`.
pub fn unexplored_cells(s: LocalState, d: &Derivation, mode: ExploreMode) -> Vec<Cell> {
    let neighbors: Vec<Cell> = s.neighbor_cells().collect();
    let actions = ActionSpace::omnidirectional();
    let lenient_moves = |t: LocalState| -> DirectionSet {
        let base = safe_actions(t, &actions);
        if d.spec.alt3_cross_rule && d.spec.cross_rule_exception != Some(t) {
            base.iter().filter(|&m| keeps_orthogonal_contact(t, m)).collect()
        } else {
            base
        }
    };
    let mut visited = FxHashSet::default();
    visited.insert(Cell::ORIGIN);
    let mut queue = VecDeque::from([Cell::ORIGIN]);
    while let Some(at) = queue.pop_front() {
        let Some(t) = sense_fixed(&neighbors, at) else {
            continue;
        };
        let moves = if d.sets.is_active(t) {
            d.q_safe.get(t)
        } else {
            match mode {
                ExploreMode::Strict => DirectionSet::EMPTY,
                ExploreMode::Lenient => lenient_moves(t),
            }
        };
        for m in moves.iter() {
            let next = at + m.offset();
            if visited.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut targets: Vec<Cell> = neighbors
        .iter()
        .flat_map(|n| n.neighbors())
        .filter(|c| !neighbors.contains(c))
        .collect::<FxHashSet<_>>()
        .into_iter()
        .filter(|c| !visited.contains(c))
        .collect();
    targets.sort();
    targets
}

pub fn check_theorem(d: &Derivation, t3: &TransitionGraph, opts: CheckOptions) -> (bool, bool, Vec<Witness>) {
    let sets = &d.sets;
    let mut witnesses = Vec::new();
    for s in sets.s_active.intersection(&sets.s_simplicial).iter() {
        let missed = unexplored_cells(s, d, opts.explore);
        if !missed.is_empty() {
            let list: Vec<String> = missed.iter().map(|c| c.to_string()).collect();
            witnesses.push(Witness {
                condition: Condition::ThmExplore,
                state: s,
                detail: format!("cannot reach {}", list.join(" ")),
            });
        }
    }
    let explore_ok = witnesses.is_empty();
    for s in sets.s_static.iter().filter(|s| s.neighbor_count() <= 6) {
        let arrivals: Vec<LocalState> = t3
            .successors(s)
            .iter()
            .filter(|&t| t != LocalState::SURROUNDED)
            .collect();
        let activating = arrivals.iter().filter(|&&t| sets.is_active(t)).count();
        let ok = match opts.arrival {
            ArrivalMode::Every => activating == arrivals.len(),
            ArrivalMode::Exists => arrivals.is_empty() || activating > 0,
        };
        if !ok {
            let stuck: Vec<String> = arrivals
                .iter()
                .filter(|t| !sets.is_active(**t))
                .map(|t| t.to_string())
                .collect();
            witnesses.push(Witness {
                condition: Condition::ThmArrival,
                state: s,
                detail: format!("arrivals stay static: {}", stuck.join(" ")),
            });
        }
    }
    let arrival_ok = witnesses.iter().all(|w| w.condition != Condition::ThmArrival);
    (explore_ok, arrival_ok, witnesses)
}

/// Runs every local condition for a derived behaviour.
pub fn check_conditions(d: &Derivation, opts: CheckOptions) -> ConditionReport {
    let g = Graphs::build(d, opts.neighbors);
    let (achievable, mut witnesses) = check_achievable(&g.t1, &g.t2, &d.sets);
    let (lemma3_clique_ok, lemma3_loop_ok, w3) = check_lemma3(&d.sets, &g.t2r);
    let (thm_explore_ok, thm_arrival_ok, wt) = check_theorem(d, &g.t3, opts);
    witnesses.extend(w3);
    witnesses.extend(wt);
    ConditionReport {
        achievable,
        lemma3_clique_ok,
        lemma3_loop_ok,
        thm_explore_ok,
        thm_arrival_ok,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Behavior;
    use crate::patterns;
    use Direction::*;

    fn st(dirs: &[Direction]) -> LocalState {
        LocalState::from_dirs(dirs).unwrap()
    }

    fn derive(p: &crate::Pattern, b: Behavior) -> Derivation {
        Derivation::new(p, &b.spec()).unwrap()
    }

    #[test]
    fn t1_frame_shift() {
        // Only the three cells east of the old view are unknown.
        let out = t1_outcomes(st(&[N]), E);
        assert_eq!(out.len(), 8);
        assert!(out.iter().all(|s| s.has(NW)));
        assert!(out.iter().all(|s| !s.has(W)), "vacated cell is empty");
        let d = derive(&patterns::triangle4(), Behavior::Baseline);
        assert!(!d.q_safe.get(st(&[E])).contains(NW));
    }

    #[test]
    fn t1_edges_follow_safe_map() {
        let d = derive(&patterns::triangle9(), Behavior::Alt2);
        let t1 = build_t1(&d.q_safe);
        for e in t1.edges() {
            assert!(d.q_safe.get(e.from).contains(e.action.unwrap()));
        }
    }

    #[test]
    fn t2_examples() {
        let d = derive(&patterns::triangle4(), Behavior::Baseline);
        let t2 = build_t2(&d.sets, &d.q_safe, NeighborModel::AnyStep);
        let t2r = build_t2r(&d.sets, &d.q_safe, NeighborModel::AnyStep);
        assert!(t2.has_edge(st(&[N]), st(&[NE])));
        assert!(t2r.has_edge(st(&[N]), st(&[NE])));
        assert!(t2r.has_edge(st(&[N, S]), st(&[NE, S])));
        assert!(t2.has_edge(st(&[N, S]), st(&[S])));
        assert!(!t2r.has_edge(st(&[N, S]), st(&[S])));
        for e in t2r.edges() {
            assert!(t2.has_edge(e.from, e.to));
        }
        let legal = build_t2(&d.sets, &d.q_safe, NeighborModel::LegalStep);
        assert!(legal.edge_count() <= t2.edge_count());
        for e in legal.edges() {
            assert!(t2.has_edge(e.from, e.to));
        }
    }

    #[test]
    fn t3_counts() {
        let t3 = build_t3();
        assert!(t3.has_edge(st(&[E]), st(&[E, N])));
        assert!(t3.successors(LocalState::SURROUNDED).is_empty());
        let expected: usize = LocalState::all().map(|s| 8 - s.neighbor_count()).sum();
        assert_eq!(t3.edge_count(), expected);
    }

    #[test]
    fn nothing_moves_when_everything_is_desired() {
        // Reachability needs moves; with every state desired there are none,
        // so only the empty path exists and distinct desired states are cut off.
        let d = Derivation::from_desired(&StateSet::all(), &Behavior::Baseline.spec());
        let g = Graphs::build(&d, NeighborModel::LegalStep);
        assert_eq!(g.t1.edge_count(), 0);
        assert_eq!(g.t2.edge_count(), 0);
        assert!(!check_achievable(&g.t1, &g.t2, &d.sets).0);
    }

    #[test]
    fn triangle4_baseline_is_achievable() {
        let d = derive(&patterns::triangle4(), Behavior::Baseline);
        let r = check_conditions(&d, CheckOptions::default());
        assert!(r.achievable, "{:?}", r.witnesses_for(Condition::Achievable).collect::<Vec<_>>());
    }

    #[test]
    fn hexagon_unachievable_with_cross_rule() {
        for b in [Behavior::Alt3, Behavior::Alt4] {
            let d = derive(&patterns::hexagon6(), b);
            let r = check_conditions(&d, CheckOptions::default());
            assert!(!r.achievable, "{b}");
        }
        for b in [Behavior::Baseline, Behavior::Alt1, Behavior::Alt2] {
            let d = derive(&patterns::hexagon6(), b);
            assert!(check_conditions(&d, CheckOptions::default()).achievable, "{b}");
        }
    }

    #[test]
    fn explore_walk_around_single_neighbour() {
        let d = derive(&patterns::triangle4(), Behavior::Baseline);
        assert!(d.sets.is_active(st(&[E])));
        assert!(unexplored_cells(st(&[E]), &d, ExploreMode::Strict).is_empty());
    }

    #[test]
    fn cross_rule_breaks_exploration() {
        for b in [Behavior::Alt3, Behavior::Alt4] {
            for p in [patterns::triangle4(), patterns::triangle9()] {
                let d = derive(&p, b);
                let r = check_conditions(&d, CheckOptions::default());
                assert!(!r.thm_explore_ok, "{b}");
            }
        }
    }

    #[test]
    fn one_neighbour_desired_state_can_break_clique_condition() {
        // The pair's desired states have one neighbour each, so a blocked
        // state with a lone neighbour clique can be completed by them.
        let d = derive(&patterns::triangle9(), Behavior::Alt2);
        let r = check_conditions(&d, CheckOptions::default());
        let pool: Vec<LocalState> = d.sets.s_des.intersection(&d.sets.s_simplicial).to_vec();
        assert_eq!(r.lemma3_clique_ok, d.sets.s_blocked.difference(&d.sets.s_des).iter().all(|s| {
            crate::behavior::cliques(s).into_iter().all(|c| !clique_formable(s, c, &pool))
        }));
    }

    #[test]
    fn arrival_exemption_for_surrounding() {
        let d = derive(&patterns::triangle4(), Behavior::Baseline);
        let t3 = build_t3();
        let (_, _, w) = check_theorem(&d, &t3, CheckOptions::default());
        assert!(w.iter().all(|w| w.state != LocalState::SURROUNDED));
    }
}
