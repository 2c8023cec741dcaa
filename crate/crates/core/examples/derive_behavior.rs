//! Derives the state partition and safe action map for a desired pattern.
//!
//! cargo run --release --example derive_behavior -- triangle-4 ALT2

use swarmform::behavior::{Behavior, Derivation};
use swarmform::io::{resolve_pattern, Bundle};
use swarmform::lattice::{state_of, DIRECTION_LEGEND};

fn main() -> swarmform::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let np = resolve_pattern(args.first().map_or("triangle-4", String::as_str))?;
    let behavior = args.get(1).and_then(|b| Behavior::parse(b)).unwrap_or(Behavior::Baseline);
    let d = Derivation::new(&np.pattern, &behavior.spec())?;

    println!("{} under {behavior}:\n{}", np.name, np.pattern.render());
    println!("desired states ({DIRECTION_LEGEND}):");
    for c in np.pattern.iter() {
        let s = state_of(&np.pattern, c)?;
        println!("  cell {c}: {} {s}", s.bit_vector());
    }
    let counts = Bundle::from_derivation(&np, &d).counts;
    println!("{counts:#?}");

    println!("first active states and their safe moves:");
    for (s, moves) in d.q_safe.iter().take(8) {
        let moves: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
        println!("  {s:<16} -> {}", moves.join(" "));
    }
    Ok(())
}
