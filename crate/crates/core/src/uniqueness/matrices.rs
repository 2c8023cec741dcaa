//! Match counts between static states and the cheap combination filters.

use serde::{Deserialize, Serialize};

use crate::behavior::StateSet;
use crate::error::{Error, Result};
use crate::lattice::{states_match, Direction, DirectionSet, LocalState};

/// Directions along which pairs of states match, indexed by position in `states`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkMatrix {
    pub states: Vec<LocalState>,
    links: Vec<DirectionSet>,
}

impl LinkMatrix {
    pub fn build(s_static: &StateSet) -> Self {
        let states = s_static.to_vec();
        let n = states.len();
        let mut links = vec![DirectionSet::EMPTY; n * n];
        for (i, &a) in states.iter().enumerate() {
            for (j, &b) in states.iter().enumerate() {
                links[i * n + j] = Direction::ALL
                    .into_iter()
                    .filter(|&u| states_match(a, b, u))
                    .collect();
            }
        }
        LinkMatrix { states, links }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: LocalState) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }

    /// Directions from state `i` to state `j` along which they match.
    pub fn d(&self, i: usize, j: usize) -> DirectionSet {
        self.links[i * self.states.len() + j]
    }

    /// Number of matching directions.
    pub fn m(&self, i: usize, j: usize) -> usize {
        self.d(i, j).len()
    }

    /// States that match nothing and can never coexist with anything.
    pub fn isolated(&self) -> Vec<LocalState> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| self.m(i, j) == 0))
            .map(|i| self.states[i])
            .collect()
    }
}

/// Number of multisets of size `n` drawn from `n_s` kinds.
pub fn count_combinations(n_s: usize, n: usize) -> Result<u128> {
    if n_s == 0 || n == 0 {
        return Err(Error::Config("combination counts need at least one state and one agent".into()));
    }
    // C(n_s + n - 1, n), built so every intermediate value is an integer.
    let overflow = || Error::CombinationOverflow { n_states: n_s, n_agents: n };
    let mut acc: u128 = 1;
    for k in 1..=n as u128 {
        acc = acc
            .checked_mul(n_s as u128 - 1 + k)
            .ok_or_else(overflow)?
            / k;
    }
    Ok(acc)
}

/// A multiset of states, kept as (state, multiplicity) pairs in state order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Combination {
    pub items: Vec<(LocalState, usize)>,
}

impl Combination {
    pub fn from_states<I: IntoIterator<Item = LocalState>>(states: I) -> Self {
        let mut v: Vec<LocalState> = states.into_iter().collect();
        v.sort();
        let mut items: Vec<(LocalState, usize)> = Vec::new();
        for s in v {
            match items.last_mut() {
                Some((last, k)) if *last == s => *k += 1,
                _ => items.push((s, 1)),
            }
        }
        Combination { items }
    }

    pub fn size(&self) -> usize {
        self.items.iter().map(|(_, k)| k).sum()
    }

    pub fn count(&self, s: LocalState) -> usize {
        self.items.iter().find(|(t, _)| *t == s).map_or(0, |(_, k)| *k)
    }
}

/// Calls `visit` with every multiset of size `n` over `states`, as counts.
pub fn for_each_combination<F: FnMut(&[usize]) -> bool>(n_kinds: usize, n: usize, mut visit: F) {
    fn rec<F: FnMut(&[usize]) -> bool>(i: usize, left: usize, counts: &mut Vec<usize>, visit: &mut F) -> bool {
        if i + 1 == counts.len() {
            counts[i] = left;
            let go_on = visit(counts);
            counts[i] = 0;
            return go_on;
        }
        for k in (0..=left).rev() {
            counts[i] = k;
            if !rec(i + 1, left - k, counts, visit) {
                counts[i] = 0;
                return false;
            }
        }
        counts[i] = 0;
        true
    }
    if n_kinds == 0 {
        return;
    }
    let mut counts = vec![0; n_kinds];
    rec(0, n, &mut counts, &mut visit);
}

/// Necessary conditions for a finite pattern: links pair up per direction,
/// every direction has an outermost agent, and every used direction has an edge.
pub fn completeness_test(c: &Combination) -> bool {
    let links_at = |u: Direction| -> usize {
        c.items.iter().filter(|(s, _)| s.has(u)).map(|(_, k)| k).sum()
    };
    for u in Direction::ALL {
        if links_at(u) != links_at(u.opposite()) {
            return false;
        }
        if c.items.iter().all(|(s, _)| s.has(u)) {
            return false;
        }
        let used = links_at(u) > 0;
        if used && !c.items.iter().any(|(s, _)| s.has(u) && !s.has(u.opposite())) {
            return false;
        }
    }
    true
}

/// Each instance needs its own partner along each of its links; fails when
/// the combination does not hold enough candidates for some state.
pub fn matching_test(c: &Combination, links: &LinkMatrix) -> bool {
    for &(s, k) in &c.items {
        let Some(i) = links.index_of(s) else {
            return false;
        };
        for u in s.neighbors().iter() {
            let supply: usize = c
                .items
                .iter()
                .filter_map(|&(t, kt)| {
                    let j = links.index_of(t)?;
                    links.d(i, j).contains(u).then_some(if t == s { kt - 1 } else { kt })
                })
                .sum();
            if supply < k {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;

    fn st(dirs: &[Direction]) -> LocalState {
        LocalState::from_dirs(dirs).unwrap()
    }

    /// Factorial form, evaluated in f64 for small arguments.
    fn multiset_coefficient(n_s: u32, n: u32) -> u128 {
        let f = |k: u32| (1..=k).map(f64::from).product::<f64>();
        (f(n_s + n - 1) / (f(n) * f(n_s - 1))).round() as u128
    }

    #[test]
    fn combination_counts() {
        assert_eq!(count_combinations(4, 5).unwrap(), 56);
        assert_eq!(count_combinations(1, 7).unwrap(), 1);
        assert_eq!(count_combinations(2, 3).unwrap(), 4);
        for n_s in 1..12 {
            for n in 1..10 {
                assert_eq!(count_combinations(n_s, n).unwrap(), multiset_coefficient(n_s as u32, n as u32));
            }
        }
        assert!(matches!(count_combinations(255, 1000), Err(Error::CombinationOverflow { .. })));
    }

    #[test]
    fn enumerated_combinations_match_count() {
        let mut seen = 0u128;
        for_each_combination(5, 4, |c| {
            assert_eq!(c.iter().sum::<usize>(), 4);
            seen += 1;
            true
        });
        assert_eq!(seen, count_combinations(5, 4).unwrap());
    }

    #[test]
    fn pair_matrices() {
        let set: StateSet = [st(&[E]), st(&[W])].into_iter().collect();
        let lm = LinkMatrix::build(&set);
        assert_eq!(lm.states, vec![st(&[E]), st(&[W])]);
        assert_eq!((lm.m(0, 0), lm.m(0, 1), lm.m(1, 0), lm.m(1, 1)), (0, 1, 1, 0));
        assert_eq!(lm.d(0, 1), [E].into_iter().collect());
        assert_eq!(lm.d(1, 0), [W].into_iter().collect());
    }

    #[test]
    fn self_match_needs_opposite_bits() {
        let all = LinkMatrix::build(&StateSet::all());
        for (i, s) in all.states.iter().enumerate() {
            if s.neighbors().iter().all(|u| !s.has(u.opposite())) {
                assert_eq!(all.m(i, i), 0, "{s}");
            }
        }
    }

    #[test]
    fn completeness_examples() {
        assert!(completeness_test(&Combination::from_states([st(&[E]), st(&[W])])));
        assert!(!completeness_test(&Combination::from_states([st(&[E]), st(&[E])])));
        assert!(!completeness_test(&Combination::from_states([st(&[N, S]); 4])));
    }

    #[test]
    fn matching_examples() {
        let a = st(&[E]);
        let b = st(&[W, E]);
        let c = st(&[W]);
        let set: StateSet = [a, b, c].into_iter().collect();
        let lm = LinkMatrix::build(&set);
        assert!(matching_test(&Combination::from_states([a, c]), &lm));
        // Two left ends but only one state that can sit east of them.
        assert!(!matching_test(&Combination::from_states([a, a, c]), &lm));
        let lonely = st(&[N, S, E, W]);
        let set: StateSet = [a, c, lonely].into_iter().collect();
        let lm = LinkMatrix::build(&set);
        assert!(!matching_test(&Combination::from_states([a, c, lonely]), &lm));
    }
}
