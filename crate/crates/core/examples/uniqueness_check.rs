//! Searches for every all-static configuration of a pattern's size and
//! reports whether the desired pattern is the only one.
//!
//! cargo run --release --example uniqueness_check -- triangle-9

use swarmform::behavior::Behavior;
use swarmform::io::resolve_pattern;
use swarmform::uniqueness::{check_pattern, UniquenessOptions};

fn main() -> swarmform::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "triangle-9".into());
    let np = resolve_pattern(&arg)?;
    let opts = UniquenessOptions::default();
    for b in Behavior::ALL {
        let start = std::time::Instant::now();
        let r = check_pattern(&np.pattern, &b.spec(), &opts)?;
        println!(
            "{} {b}: {:?} via {:?}, {} static states, {} combinations, {} search nodes, {:.2} s",
            np.name,
            r.outcome,
            r.strategy,
            r.n_static_states,
            r.combinations.map_or("overflow".to_string(), |c| c.to_string()),
            r.pruning.nodes,
            start.elapsed().as_secs_f64()
        );
        for p in r.spurious(&np.pattern) {
            println!("spurious:\n{}", p.render());
        }
    }
    Ok(())
}
