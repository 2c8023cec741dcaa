//! One continuous-space run with trajectory output as CSV and SVG.
//!
//! cargo run --release --example continuum_run -- triangle-4 3 /tmp/run

use std::path::PathBuf;

use swarmform::behavior::{Behavior, Derivation};
use swarmform::continuum::{self, svg::trajectory_svg, ContinuumConfig};
use swarmform::io::{resolve_pattern, write_text};

fn main() -> swarmform::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let np = resolve_pattern(args.first().map_or("triangle-4", String::as_str))?;
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let out = PathBuf::from(args.get(2).map_or("out/continuum_run", String::as_str));

    let d = Derivation::new(&np.pattern, &Behavior::Alt4.spec())?;
    let cfg = ContinuumConfig { record_every: 0.2, ..ContinuumConfig::default() };
    let r = continuum::simulate(&np.pattern, &np.name, &d, seed, &cfg)?;
    println!(
        "{} seed {seed}: {:?} at t = {:.1} s, {} actions ({} interrupted), min distance {:.3} m",
        np.name, r.end, r.t_end, r.actions_started, r.actions_interrupted, r.min_distance
    );
    let samples = r.trajectory.unwrap_or_default();
    write_text(&out.join("trajectory.csv"), &continuum::trajectory_csv(&samples))?;
    write_text(&out.join("trajectory.svg"), &trajectory_svg(&samples, 80.0))?;
    println!("wrote {}", out.display());
    Ok(())
}
