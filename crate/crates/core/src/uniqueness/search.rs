//! Depth-first placement of agents on the lattice such that every agent's
//! full local state is one of the allowed states.
//!
//! The lowest, then leftmost agent is the root at the origin, so every
//! pattern is produced exactly once. Each step picks an agent whose cell is
//! known to be occupied and commits to its full state, which fixes all eight
//! cells around it. The named pruning rules are counted in [`PruneStats`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{canonicalize, Cell, Direction, LocalState, Pattern};

/// How often each rule cut the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub nodes: u64,
    /// Candidate state contradicts cells already fixed ("no loose ends").
    pub spatial: u64,
    /// Candidate does not match an already placed neighbour.
    pub graph_edge: u64,
    /// Candidate would need more agents than are available.
    pub degree: u64,
    /// Multiset has no instance of the candidate left.
    pub compression: u64,
    /// Placement closed off before reaching the agent count.
    pub connectivity: u64,
}

impl PruneStats {
    pub fn add(&mut self, o: &PruneStats) {
        self.nodes += o.nodes;
        self.spatial += o.spatial;
        self.graph_edge += o.graph_edge;
        self.degree += o.degree;
        self.compression += o.compression;
        self.connectivity += o.connectivity;
    }
}

const UNKNOWN: u8 = 0;
const EMPTY: u8 = 1;
const OCCUPIED: u8 = 2;

/// Which states may be used and how often.
#[derive(Clone, Debug)]
pub enum Supply {
    /// Any number of each state.
    Unlimited(Vec<LocalState>),
    /// Exactly the given multiset.
    Multiset(Vec<(LocalState, usize)>),
}

struct Search<'a> {
    n: usize,
    width: i32,
    height: i32,
    x0: i32,
    status: Vec<u8>,
    state: Vec<u8>,
    occupied: usize,
    pending: Vec<Cell>,
    allowed: [bool; 256],
    left: [usize; 256],
    limited: bool,
    /// partners[t][u]: bitmask of states that match t along u, as a 256-bit set.
    partners: &'a [[[u64; 4]; 8]],
    log: Vec<(usize, u8)>,
    stats: PruneStats,
    limit: u64,
    found: BTreeSet<Pattern>,
}

fn has_partner(partners: &[[[u64; 4]; 8]], t: u8, u: Direction, other: u8) -> bool {
    let set = &partners[t as usize][u.index()];
    set[other as usize / 64] & (1 << (other % 64)) != 0
}

/// `partners[t][u]` over all 256 byte values.
pub fn partner_table() -> Vec<[[u64; 4]; 8]> {
    let mut table = vec![[[0u64; 4]; 8]; 256];
    for a in LocalState::all() {
        for u in a.neighbors().iter() {
            for b in LocalState::all() {
                if crate::lattice::states_match(a, b, u) {
                    let bb = b.bits() as usize;
                    table[a.bits() as usize][u.index()][bb / 64] |= 1 << (bb % 64);
                }
            }
        }
    }
    table
}

impl Search<'_> {
    fn index(&self, c: Cell) -> Option<usize> {
        let x = c.x + self.x0;
        if x < 0 || x >= self.width || c.y < 0 || c.y >= self.height {
            return None;
        }
        Some((c.y * self.width + x) as usize)
    }

    /// Cells below the root's row, or left of it on its row, are empty by choice of root.
    fn status_of(&self, c: Cell) -> u8 {
        if c.y < 0 || (c.y == 0 && c.x < 0) {
            return EMPTY;
        }
        match self.index(c) {
            Some(i) => self.status[i],
            None => EMPTY,
        }
    }

    fn set_status(&mut self, c: Cell, s: u8) {
        let i = self.index(c).expect("cell inside search window");
        self.log.push((i, self.status[i]));
        self.status[i] = s;
    }

    fn masks(&self, c: Cell) -> (u8, u8) {
        let mut occ = 0u8;
        let mut empty = 0u8;
        for d in Direction::ALL {
            match self.status_of(c + d.offset()) {
                OCCUPIED => occ |= d.bit(),
                EMPTY => empty |= d.bit(),
                _ => {}
            }
        }
        (occ, empty)
    }

    fn pick(&self) -> Option<usize> {
        self.pending
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| {
                let (o, e) = self.masks(c);
                8 - (o | e).count_ones()
            })
            .map(|(i, _)| i)
    }

    fn run(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.limit {
            return Err(Error::Inconclusive { limit: self.limit });
        }
        let Some(pi) = self.pick() else {
            if self.occupied == self.n {
                let cells = (0..self.status.len())
                    .filter(|&i| self.status[i] == OCCUPIED)
                    .map(|i| {
                        let w = self.width as usize;
                        Cell::new((i % w) as i32 - self.x0, (i / w) as i32)
                    });
                self.found.insert(canonicalize(cells)?);
            } else {
                self.stats.connectivity += 1;
            }
            return Ok(());
        };
        let c = self.pending.swap_remove(pi);
        let (occ, empty) = self.masks(c);
        let free: Vec<u8> = Direction::ALL
            .iter()
            .map(|d| d.bit())
            .filter(|b| (occ | empty) & b == 0)
            .collect();
        for mask in 0u32..1 << free.len() {
            let t = free
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(occ, |acc, (_, b)| acc | b);
            if t == 0 || !self.allowed[t as usize] {
                self.stats.spatial += 1;
                continue;
            }
            if self.limited && self.left[t as usize] == 0 {
                self.stats.compression += 1;
                continue;
            }
            let placed_ok = Direction::ALL.iter().all(|&u| {
                let nb = c + u.offset();
                if t & u.bit() == 0 {
                    return true;
                }
                let i = match self.index(nb) {
                    Some(i) => i,
                    None => return true,
                };
                let other = self.state[i];
                other == 0 || has_partner(self.partners, t, u, other)
            });
            if !placed_ok {
                self.stats.graph_edge += 1;
                continue;
            }
            let new_cells = (t & !occ).count_ones() as usize;
            if self.occupied + new_cells > self.n {
                self.stats.degree += 1;
                continue;
            }
            let mark = self.log.len();
            let pending_len = self.pending.len();
            let ci = self.index(c).expect("pending cell inside window");
            self.state[ci] = t;
            for d in Direction::ALL {
                let nb = c + d.offset();
                if self.status_of(nb) != UNKNOWN {
                    continue;
                }
                if t & d.bit() != 0 {
                    self.set_status(nb, OCCUPIED);
                    self.pending.push(nb);
                } else {
                    self.set_status(nb, EMPTY);
                }
            }
            self.occupied += new_cells;
            self.left[t as usize] = self.left[t as usize].wrapping_sub(1);
            let r = self.run();
            self.left[t as usize] = self.left[t as usize].wrapping_add(1);
            self.occupied -= new_cells;
            self.pending.truncate(pending_len);
            while self.log.len() > mark {
                let (i, old) = self.log.pop().expect("log entry");
                self.status[i] = old;
            }
            self.state[ci] = 0;
            r?;
        }
        self.pending.push(c);
        let last = self.pending.len() - 1;
        self.pending.swap(pi, last);
        Ok(())
    }
}

/// Result of one placement search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub patterns: BTreeSet<Pattern>,
    pub stats: PruneStats,
}

/// Every pattern of exactly `n` agents whose local states all come from
/// `supply`, up to translation. Fails with `Inconclusive` once more than
/// `node_limit` nodes have been expanded.
pub fn search_patterns(
    supply: &Supply,
    n: usize,
    partners: &[[[u64; 4]; 8]],
    node_limit: u64,
) -> Result<SearchResult> {
    if n < 2 {
        return Err(Error::SingletonPattern);
    }
    let mut allowed = [false; 256];
    let mut left = [0usize; 256];
    let limited = matches!(supply, Supply::Multiset(_));
    match supply {
        Supply::Unlimited(states) => {
            for s in states {
                allowed[s.bits() as usize] = true;
            }
        }
        Supply::Multiset(items) => {
            if items.iter().map(|(_, k)| k).sum::<usize>() != n {
                return Err(Error::Config("multiset size differs from agent count".into()));
            }
            for &(s, k) in items {
                allowed[s.bits() as usize] = k > 0;
                left[s.bits() as usize] = k;
            }
        }
    }
    let n_i = n as i32;
    let width = 2 * n_i + 3;
    let height = n_i + 2;
    let mut search = Search {
        n,
        width,
        height,
        x0: n_i + 1,
        status: vec![UNKNOWN; (width * height) as usize],
        state: vec![0; (width * height) as usize],
        occupied: 1,
        pending: vec![Cell::ORIGIN],
        allowed,
        left,
        limited,
        partners,
        log: Vec::new(),
        stats: PruneStats::default(),
        limit: node_limit,
        found: BTreeSet::new(),
    };
    search.set_status(Cell::ORIGIN, OCCUPIED);
    search.run()?;
    Ok(SearchResult { patterns: search.found, stats: search.stats })
}
