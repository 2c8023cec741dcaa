//! The proof conditions are sufficient, not necessary: the filtered
//! behaviours fail the exploration condition on the triangles, yet every
//! grid simulation of those same behaviours still forms the pattern.

use swarmform::behavior::{Behavior, Derivation};
use swarmform::graphs::{ArrivalMode, CheckOptions, ExploreMode};
use swarmform::grid::{self, GridConfig};
use swarmform::io::{self, NamedPattern};
use swarmform::patterns;
use swarmform::uniqueness::{OutcomeTag, UniquenessOptions};

#[test]
fn exploration_fails_locally_while_simulations_converge() {
    let lenient = CheckOptions { explore: ExploreMode::Lenient, arrival: ArrivalMode::Exists, ..CheckOptions::default() };
    for name in ["triangle-4", "triangle-9"] {
        let np = NamedPattern { name: name.into(), pattern: patterns::by_name(name).unwrap() };
        for b in [Behavior::Alt3, Behavior::Alt4] {
            let d = Derivation::new(&np.pattern, &b.spec()).unwrap();
            for opts in [CheckOptions::default(), lenient] {
                let r = io::verify(&np, &d, opts, &UniquenessOptions::default()).unwrap();
                assert_eq!(r.outcome, OutcomeTag::DesiredUnique, "{name} {b}");
                assert!(r.conditions.achievable, "{name} {b}");
                assert!(!r.conditions.thm_explore_ok, "{name} {b} {opts:?}");
                assert!(!r.verified);
            }

            let reports = grid::batch(&np.pattern, name, &[b.spec()], 100, 1, &GridConfig::default()).unwrap();
            let converged = reports.iter().filter(|r| r.converged).count();
            assert_eq!(converged, 100, "{name} {b}");
        }
    }
}

#[test]
fn lenient_exploration_separates_the_cross_rule() {
    let lenient = CheckOptions { explore: ExploreMode::Lenient, ..CheckOptions::default() };
    for name in ["triangle-4", "triangle-9"] {
        let np = NamedPattern { name: name.into(), pattern: patterns::by_name(name).unwrap() };
        let ok = |b: Behavior| {
            let d = Derivation::new(&np.pattern, &b.spec()).unwrap();
            io::verify(&np, &d, lenient, &UniquenessOptions::default()).unwrap().conditions.thm_explore_ok
        };
        assert!(ok(Behavior::Alt2), "{name}");
        assert!(!ok(Behavior::Alt3), "{name}");
        assert!(!ok(Behavior::Alt4), "{name}");
    }
}
