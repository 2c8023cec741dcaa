//! The uniqueness checker finds exactly the all-static patterns that
//! exhaustive enumeration finds.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmform::behavior::{Behavior, Derivation, StateSet, StateSets};
use swarmform::grid::random_formation;
use swarmform::lattice::{state_of, LocalState, Pattern};
use swarmform::patterns;
use swarmform::uniqueness::{
    check_uniqueness, count_combinations, oracle_all_static_patterns, Strategy, UniquenessOptions,
};

/// Static set containing the states of `p_des` plus random extra states.
fn random_sets(p_des: &Pattern, density: f64, rng: &mut ChaCha8Rng) -> StateSets {
    let s_des: StateSet = p_des.iter().map(|c| state_of(p_des, c).unwrap()).collect();
    let mut s_static = s_des;
    for s in LocalState::all() {
        if rng.gen_bool(density) {
            s_static.insert(s);
        }
    }
    StateSets {
        s_des,
        s_blocked: s_static.difference(&s_des),
        s_static,
        s_active: StateSet::all().difference(&s_static),
        s_simplicial: StateSet::EMPTY,
    }
}

fn found(sets: &StateSets, p: &Pattern, strategy: Strategy) -> BTreeSet<Pattern> {
    let opts = UniquenessOptions { force_strategy: Some(strategy), ..UniquenessOptions::default() };
    check_uniqueness(sets, p.len(), p, &opts).unwrap().patterns_found.into_iter().collect()
}

#[test]
fn random_static_sets_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nontrivial = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=6);
        let p = Pattern::new(random_formation(n, &mut rng)).unwrap();
        let density = [0.02, 0.05, 0.1, 0.2, 0.4][case % 5];
        let sets = random_sets(&p, density, &mut rng);
        let oracle = oracle_all_static_patterns(&sets.s_static, n).unwrap();
        assert!(oracle.contains(&p), "case {case}: the desired pattern is always static");
        nontrivial += usize::from(oracle.len() > 1);

        assert_eq!(found(&sets, &p, Strategy::Direct), oracle, "case {case}: direct search");
        let combos = count_combinations(sets.s_static.len(), n).unwrap();
        if combos <= 2_000_000 {
            assert_eq!(found(&sets, &p, Strategy::Combinations), oracle, "case {case}: combinations");
        }
    }
    assert!(nontrivial > 50, "only {nontrivial} cases had spurious patterns");
}

#[test]
fn shipped_patterns_match_the_oracle() {
    for name in patterns::NAMES {
        let p = patterns::by_name(name).unwrap();
        for b in Behavior::ALL {
            let d = Derivation::new(&p, &b.spec()).unwrap();
            let checker = check_uniqueness(&d.sets, p.len(), &p, &UniquenessOptions::default()).unwrap();
            let found: BTreeSet<Pattern> = checker.patterns_found.into_iter().collect();
            let oracle = oracle_all_static_patterns(&d.sets.s_static, p.len()).unwrap();
            assert_eq!(found, oracle, "{name} under {b}");
        }
    }
}
