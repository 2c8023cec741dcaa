//! Checks uniqueness and the local convergence conditions for every preset,
//! under both the strict and the lenient reading of the exploration and
//! arrival conditions.
//!
//! cargo run --release --example verify_conditions

use swarmform::behavior::{Behavior, Derivation};
use swarmform::graphs::{check_conditions, ArrivalMode, CheckOptions, ExploreMode};
use swarmform::patterns;
use swarmform::uniqueness::{check_pattern, UniquenessOptions};

fn flag(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn main() -> swarmform::Result<()> {
    let lenient = CheckOptions { explore: ExploreMode::Lenient, arrival: ArrivalMode::Exists, ..CheckOptions::default() };
    println!(
        "{:<11} {:<9} {:<24} {:>6} {:>7} {:>5} {:>8} {:>8} {:>10}",
        "pattern", "behaviour", "outcome", "achv", "clique", "loop", "explore", "arrival", "explore(l)"
    );
    for name in ["triangle-4", "triangle-9", "hexagon-6"] {
        let p = patterns::by_name(name)?;
        for b in Behavior::ALL {
            let d = Derivation::new(&p, &b.spec())?;
            let strict = check_conditions(&d, CheckOptions::default());
            let loose = check_conditions(&d, lenient);
            let outcome = check_pattern(&p, &b.spec(), &UniquenessOptions::default())?.outcome;
            println!(
                "{:<11} {:<9} {:<24} {:>6} {:>7} {:>5} {:>8} {:>8} {:>10}",
                name,
                b.name(),
                format!("{outcome:?}"),
                flag(strict.achievable),
                flag(strict.lemma3_clique_ok),
                flag(strict.lemma3_loop_ok),
                flag(strict.thm_explore_ok),
                flag(strict.thm_arrival_ok),
                flag(loose.thm_explore_ok),
            );
        }
    }
    Ok(())
}
