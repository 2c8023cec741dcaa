//! The alignment controller at and around its lattice equilibria.
//!
//! cargo run --release --example controller_equilibrium

use swarmform::continuum::control::pair_command;
use swarmform::continuum::{attraction_repulsion, ContinuumConfig, Shifts, Vec2};

fn main() -> swarmform::Result<()> {
    let cfg = ContinuumConfig::default();
    let s = Shifts::solve(&cfg)?;
    println!("shift: orthogonal {}, diagonal {:.6} m", s.orthogonal, s.diagonal);
    println!(
        "radial speed at the diagonal spacing: {:.1e} m/s",
        attraction_repulsion(2f64.sqrt() * cfg.rho_des, s.diagonal, &cfg)?
    );
    for rel in [Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, -1.0)] {
        let v = pair_command(rel, &s, &cfg)?;
        println!("neighbour at ({:+.1}, {:+.1}): command ({:+.1e}, {:+.1e})", rel.x, rel.y, v.x, v.y);
    }
    println!("radial sweep for an east neighbour (x, commanded vx):");
    for k in 2..=15 {
        let rho = 0.1 * k as f64;
        let v = pair_command(Vec2::new(rho, 0.0), &s, &cfg)?;
        println!("  {rho:.1} {:+.4}", v.x);
    }
    Ok(())
}
