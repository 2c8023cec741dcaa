//! Re-derives the state exempt from the orthogonal-neighbour filter: without
//! an exemption the filtered behaviour admits a spurious static pattern.
//!
//! cargo run --release --example cross_rule_exception

use swarmform::patterns;
use swarmform::uniqueness::{derive_cross_rule_exception, UniquenessOptions};

fn main() -> swarmform::Result<()> {
    let unique = [patterns::triangle4(), patterns::triangle9()];
    let unreachable = [patterns::hexagon6()];
    let r = derive_cross_rule_exception(&unique, &unreachable, &UniquenessOptions::default())?;
    println!("outcomes without exemption: {:?}", r.without);
    println!("states newly blocked by the filter: {}", r.newly_blocked.len());
    for c in &r.candidates {
        println!("  exempt {:<14} -> {:?}, hexagon achievable {:?}", c.state.to_string(), c.outcomes, c.achievable);
    }
    let accepted: Vec<String> = r.accepted.iter().map(|s| s.to_string()).collect();
    println!("accepted: {}", accepted.join(" "));
    match r.chosen {
        Some(s) => println!("chosen: {s} ({})", s.bit_vector()),
        None => println!("no exemption works"),
    }
    Ok(())
}
