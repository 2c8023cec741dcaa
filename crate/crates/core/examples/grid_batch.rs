//! Runs seeded grid batches for every behaviour and compares the
//! steps-to-completion distributions.
//!
//! cargo run --release --example grid_batch -- triangle-9 100

use swarmform::behavior::Behavior;
use swarmform::grid::{self, GridConfig};
use swarmform::io::resolve_pattern;
use swarmform::stats::mann_whitney_u;

fn main() -> swarmform::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let np = resolve_pattern(args.first().map_or("triangle-4", String::as_str))?;
    let runs: u64 = args.get(1).and_then(|r| r.parse().ok()).unwrap_or(100);
    let specs: Vec<_> = Behavior::ALL.iter().map(|b| b.spec()).collect();
    let reports = grid::batch(&np.pattern, &np.name, &specs, runs, 1, &GridConfig::default())?;
    print!("{}", grid::summary_csv(&grid::summarize(&reports)));

    for pair in Behavior::ALL.windows(2) {
        let slow = grid::converged_steps(&reports, pair[0].name());
        let fast = grid::converged_steps(&reports, pair[1].name());
        if let Some(mw) = mann_whitney_u(&fast, &slow) {
            println!("{} vs {}: U = {}, p = {:.2e}", pair[1], pair[0], mw.u, mw.p_value);
        }
    }
    Ok(())
}
