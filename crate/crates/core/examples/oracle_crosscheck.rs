//! Compares the uniqueness checker with exhaustive enumeration of every
//! connected placement for the built-in patterns.
//!
//! cargo run --release --example oracle_crosscheck

use std::collections::BTreeSet;

use swarmform::behavior::{Behavior, Derivation};
use swarmform::patterns;
use swarmform::uniqueness::{check_uniqueness, count_animals, oracle_all_static_patterns, UniquenessOptions};

fn main() -> swarmform::Result<()> {
    for n in 2..=9 {
        println!("{n} cells: {} connected placements", count_animals(n));
    }
    for name in patterns::NAMES {
        let p = patterns::by_name(name)?;
        for b in Behavior::ALL {
            let d = Derivation::new(&p, &b.spec())?;
            let checker = check_uniqueness(&d.sets, p.len(), &p, &UniquenessOptions::default())?;
            let found: BTreeSet<_> = checker.patterns_found.into_iter().collect();
            let oracle = oracle_all_static_patterns(&d.sets.s_static, p.len())?;
            println!(
                "{name:<10} {b:<8} checker {} oracle {} {}",
                found.len(),
                oracle.len(),
                if found == oracle { "agree" } else { "DISAGREE" }
            );
        }
    }
    Ok(())
}
