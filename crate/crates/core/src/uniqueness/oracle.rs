//! Exhaustive ground truth: every king-connected set of `n` cells up to
//! translation, kept when every agent's state is static.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;

use crate::behavior::StateSet;
use crate::error::{Error, Result};
use crate::lattice::{canonicalize, state_of, Cell, Pattern};

/// Largest agent count the oracle accepts. There are just under a million
/// fixed nine-cell animals; ten would take roughly six million.
pub const ORACLE_MAX: usize = 9;

/// Redelmeier's method: grow each animal from its lowest-leftmost cell,
/// extending only with cells that come after it, so every animal is
/// generated exactly once.
pub fn for_each_animal<F: FnMut(&[Cell])>(n: usize, mut visit: F) {
    fn allowed(c: Cell) -> bool {
        c.y > 0 || (c.y == 0 && c.x >= 0)
    }
    fn rec<F: FnMut(&[Cell])>(
        n: usize,
        cells: &mut Vec<Cell>,
        untried: &mut Vec<Cell>,
        seen: &mut FxHashSet<Cell>,
        visit: &mut F,
    ) {
        while let Some(c) = untried.pop() {
            cells.push(c);
            if cells.len() == n {
                visit(cells);
            } else {
                let mut fresh = Vec::new();
                for nb in c.neighbors() {
                    if allowed(nb) && seen.insert(nb) {
                        fresh.push(nb);
                    }
                }
                let mut next = untried.clone();
                next.extend(fresh.iter().copied());
                rec(n, cells, &mut next, seen, visit);
                for nb in fresh {
                    seen.remove(&nb);
                }
            }
            cells.pop();
        }
    }
    if n == 0 {
        return;
    }
    let mut seen = FxHashSet::default();
    seen.insert(Cell::ORIGIN);
    let mut untried = vec![Cell::ORIGIN];
    rec(n, &mut Vec::with_capacity(n), &mut untried, &mut seen, &mut visit);
}

pub fn count_animals(n: usize) -> u64 {
    let mut k = 0;
    for_each_animal(n, |_| k += 1);
    k
}

/// All patterns of `n` agents in which every agent's state lies in `s_static`.
pub fn oracle_all_static_patterns(s_static: &StateSet, n: usize) -> Result<BTreeSet<Pattern>> {
    if n > ORACLE_MAX {
        return Err(Error::OracleBound { n, max: ORACLE_MAX });
    }
    if n < 2 {
        return Err(Error::SingletonPattern);
    }
    let mut out = BTreeSet::new();
    let mut err = None;
    for_each_animal(n, |cells| {
        if err.is_some() {
            return;
        }
        let set: FxHashSet<Cell> = cells.iter().copied().collect();
        let all_static = cells
            .iter()
            .all(|&c| state_of(&set, c).is_ok_and(|s| s_static.contains(s)));
        if all_static {
            match canonicalize(cells.iter().copied()) {
                Ok(p) => {
                    out.insert(p);
                }
                Err(e) => err = Some(e),
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
