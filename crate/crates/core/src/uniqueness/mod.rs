//! Whether a desired pattern is the only configuration in which every agent
//! is static, for a fixed number of agents.

mod matrices;
mod oracle;
mod search;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, BehaviorSpec, Derivation, StateSet, StateSets};
use crate::error::{Error, Result};
use crate::graphs::{check_conditions, CheckOptions};
use crate::lattice::{state_of, LocalState, Pattern};

pub use matrices::{
    completeness_test, count_combinations, for_each_combination, matching_test, Combination,
    LinkMatrix,
};
pub use oracle::{count_animals, for_each_animal, oracle_all_static_patterns, ORACLE_MAX};
pub use search::{partner_table, search_patterns, PruneStats, SearchResult, Supply};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeTag {
    NoPattern,
    OnlyUndesired,
    DesiredPossibleNotUnique,
    DesiredUnique,
}

impl OutcomeTag {
    pub fn classify(found: &BTreeSet<Pattern>, p_des: &Pattern) -> OutcomeTag {
        match (found.contains(p_des), found.len()) {
            (_, 0) => OutcomeTag::NoPattern,
            (false, _) => OutcomeTag::OnlyUndesired,
            (true, 1) => OutcomeTag::DesiredUnique,
            (true, _) => OutcomeTag::DesiredPossibleNotUnique,
        }
    }
}

/// How the static configurations were enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Every multiset of static states is filtered, then placed.
    Combinations,
    /// One placement search over all static states at once.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessOptions {
    /// Node budget for each placement search.
    pub node_limit: u64,
    /// Largest multiset count for which combinations are enumerated.
    pub max_combinations: u128,
    pub force_strategy: Option<Strategy>,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        UniquenessOptions {
            node_limit: 100_000_000,
            max_combinations: 2_000_000,
            force_strategy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub outcome: OutcomeTag,
    pub patterns_found: Vec<Pattern>,
    pub n_agents: usize,
    pub n_static_states: usize,
    /// States that cannot match any static state and so never appear.
    pub isolated_states: Vec<LocalState>,
    pub combinations: Option<u128>,
    pub strategy: Strategy,
    pub passed_completeness: u64,
    pub passed_matching: u64,
    pub pruning: PruneStats,
}

impl UniquenessReport {
    pub fn is_unique(&self) -> bool {
        self.outcome == OutcomeTag::DesiredUnique
    }

    pub fn spurious(&self, p_des: &Pattern) -> Vec<&Pattern> {
        self.patterns_found.iter().filter(|p| *p != p_des).collect()
    }
}

/// Multiset of states in a pattern.
pub fn combination_of(p: &Pattern) -> Result<Combination> {
    let states: Result<Vec<LocalState>> = p.iter().map(|c| state_of(p, c)).collect();
    Ok(Combination::from_states(states?))
}

/// Every all-static pattern of `n` agents, then the four-way outcome for `p_des`.
pub fn check_uniqueness(
    sets: &StateSets,
    n: usize,
    p_des: &Pattern,
    opts: &UniquenessOptions,
) -> Result<UniquenessReport> {
    if p_des.len() != n {
        return Err(Error::Config(format!(
            "desired pattern has {} agents but {n} were requested",
            p_des.len()
        )));
    }
    let links = LinkMatrix::build(&sets.s_static);
    let isolated = links.isolated();
    let usable: Vec<LocalState> = links
        .states
        .iter()
        .copied()
        .filter(|s| !isolated.contains(s))
        .collect();
    let table = partner_table();
    let n_c = if usable.is_empty() { Some(0) } else { count_combinations(usable.len(), n).ok() };
    let strategy = opts.force_strategy.unwrap_or(match n_c {
        Some(k) if k <= opts.max_combinations => Strategy::Combinations,
        _ => Strategy::Direct,
    });

    let mut found = BTreeSet::new();
    let mut pruning = PruneStats::default();
    let mut passed_completeness = 0u64;
    let mut passed_matching = 0u64;
    match strategy {
        Strategy::Combinations => {
            let mut failure = None;
            for_each_combination(usable.len(), n, |counts| {
                let c = Combination {
                    items: usable
                        .iter()
                        .zip(counts)
                        .filter(|(_, &k)| k > 0)
                        .map(|(&s, &k)| (s, k))
                        .collect(),
                };
                if !completeness_test(&c) {
                    return true;
                }
                passed_completeness += 1;
                if !matching_test(&c, &links) {
                    return true;
                }
                passed_matching += 1;
                match search_patterns(&Supply::Multiset(c.items), n, &table, opts.node_limit) {
                    Ok(r) => {
                        pruning.add(&r.stats);
                        found.extend(r.patterns);
                        true
                    }
                    Err(e) => {
                        failure = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Strategy::Direct => {
            if !usable.is_empty() {
                let r = search_patterns(&Supply::Unlimited(usable.clone()), n, &table, opts.node_limit)?;
                pruning = r.stats;
                found = r.patterns;
            }
            // Found patterns must survive the filters the other route applies.
            for p in &found {
                let c = combination_of(p)?;
                if !completeness_test(&c) || !matching_test(&c, &links) {
                    return Err(Error::Config(format!(
                        "filter rejected the combination of a realisable pattern:\n{}",
                        p.render()
                    )));
                }
            }
        }
    }
    Ok(UniquenessReport {
        outcome: OutcomeTag::classify(&found, p_des),
        patterns_found: found.into_iter().collect(),
        n_agents: n,
        n_static_states: sets.s_static.len(),
        isolated_states: isolated,
        combinations: n_c,
        strategy,
        passed_completeness,
        passed_matching,
        pruning,
    })
}

/// Shorthand for a behaviour preset.
pub fn check_pattern(p_des: &Pattern, spec: &BehaviorSpec, opts: &UniquenessOptions) -> Result<UniquenessReport> {
    let d = Derivation::new(p_des, spec)?;
    check_uniqueness(&d.sets, p_des.len(), p_des, opts)
}

/// One candidate exemption from the orthogonal-neighbour filter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionCandidate {
    pub state: LocalState,
    /// Outcome per pattern that must be unique, in the order given.
    pub outcomes: Vec<OutcomeTag>,
    /// Local achievability per pattern that must stay out of reach.
    pub achievable: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionDerivation {
    /// Outcomes with no exemption at all.
    pub without: Vec<OutcomeTag>,
    /// States the filter newly blocks compared with the threshold-only behaviour.
    pub newly_blocked: Vec<LocalState>,
    pub candidates: Vec<ExceptionCandidate>,
    /// Candidates meeting both requirements.
    pub accepted: Vec<LocalState>,
    /// Accepted candidate with the fewest neighbours, ties to the lowest bits.
    pub chosen: Option<LocalState>,
}

/// Searches for a state whose exemption from the orthogonal-neighbour
/// filter makes every pattern in `unique` the only all-static configuration
/// while every pattern in `unreachable` stays locally unachievable.
pub fn derive_cross_rule_exception(
    unique: &[Pattern],
    unreachable: &[Pattern],
    opts: &UniquenessOptions,
) -> Result<ExceptionDerivation> {
    let patterns = unique;
    let mut spec = Behavior::Alt3.spec();
    spec.cross_rule_exception = None;
    let outcomes = |spec: &BehaviorSpec| -> Result<Vec<OutcomeTag>> {
        patterns
            .iter()
            .map(|p| check_pattern(p, spec, opts).map(|r| r.outcome))
            .collect()
    };
    let without = outcomes(&spec)?;
    let mut newly = StateSet::EMPTY;
    for p in patterns {
        let plain = Derivation::new(p, &Behavior::Alt2.spec())?;
        let filtered = Derivation::new(p, &spec)?;
        newly = newly.union(&filtered.sets.s_blocked.difference(&plain.sets.s_blocked));
    }
    let mut candidates = Vec::new();
    let mut accepted = Vec::new();
    for s in newly.iter() {
        let mut trial = spec.clone();
        trial.cross_rule_exception = Some(s);
        let got = outcomes(&trial)?;
        let achievable: Vec<bool> = unreachable
            .iter()
            .map(|p| {
                Derivation::new(p, &trial)
                    .map(|d| check_conditions(&d, CheckOptions::default()).achievable)
            })
            .collect::<Result<_>>()?;
        if got.iter().all(|o| *o == OutcomeTag::DesiredUnique) && !achievable.contains(&true) {
            accepted.push(s);
        }
        candidates.push(ExceptionCandidate { state: s, outcomes: got, achievable });
    }
    let chosen = accepted.iter().copied().min_by_key(|s| (s.neighbor_count(), s.bits()));
    Ok(ExceptionDerivation { without, newly_blocked: newly.to_vec(), candidates, accepted, chosen })
}
