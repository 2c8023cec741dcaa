//! Loads a pattern file, canonicalizes it and prints each agent's local state.
//!
//! cargo run --release --example pattern_file -- crates/core/patterns/hexagon-6.json

use std::path::Path;

use swarmform::io::{load_pattern, parse_pattern};
use swarmform::lattice::state_of;

fn main() -> swarmform::Result<()> {
    let np = match std::env::args().nth(1) {
        Some(path) => load_pattern(Path::new(&path))?,
        None => parse_pattern(r#"{"name": "shifted-triangle", "cells": [[10, -3], [11, -3], [12, -3], [11, -2]]}"#)?,
    };
    println!("{} ({} cells, {}x{}):\n{}", np.name, np.pattern.len(), np.pattern.width(), np.pattern.height(), np.pattern.render());
    for c in np.pattern.iter() {
        println!("  {c} -> {}", state_of(&np.pattern, c)?);
    }
    match parse_pattern(r#"{"name": "gap", "cells": [[0, 0], [2, 0]]}"#) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
