//! Built-in desired patterns.

use crate::error::{Error, Result};
use crate::lattice::{Cell, Pattern};

fn build(cells: &[(i32, i32)]) -> Pattern {
    Pattern::new(cells.iter().map(|&(x, y)| Cell::new(x, y))).expect("built-in pattern is valid")
}

pub fn pair() -> Pattern {
    build(&[(0, 0), (1, 0)])
}

pub fn line3() -> Pattern {
    build(&[(0, 0), (1, 0), (2, 0)])
}

/// Three in a row with one on top of the middle.
pub fn triangle4() -> Pattern {
    build(&[(0, 0), (1, 0), (2, 0), (1, 1)])
}

/// Rows of five, three and one.
pub fn triangle9() -> Pattern {
    build(&[
        (0, 0),
        (1, 0),
        (2, 0),
        (3, 0),
        (4, 0),
        (1, 1),
        (2, 1),
        (3, 1),
        (2, 2),
    ])
}

/// A ring of six in which every agent has exactly two neighbours.
pub fn hexagon6() -> Pattern {
    build(&[(1, 0), (2, 0), (0, 1), (3, 1), (1, 2), (2, 2)])
}

pub const NAMES: [&str; 5] = ["pair", "line-3", "triangle-4", "triangle-9", "hexagon-6"];

pub fn by_name(name: &str) -> Result<Pattern> {
    match name {
        "pair" => Ok(pair()),
        "line-3" => Ok(line3()),
        "triangle-4" => Ok(triangle4()),
        "triangle-9" => Ok(triangle9()),
        "hexagon-6" => Ok(hexagon6()),
        other => Err(Error::Config(format!(
            "unknown pattern `{other}` (known: {})",
            NAMES.join(", ")
        ))),
    }
}
