//! File formats and report bundles shared by the command-line tool and the
//! examples: pattern files, behaviour configs, derived bundles and
//! verification reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, BehaviorSpec, Derivation, SafeActionMap, StateClass, StateSets};
use crate::error::{Error, Result};
use crate::graphs::{check_conditions, CheckOptions, ConditionReport};
use crate::lattice::{Cell, Pattern, DIRECTION_LEGEND};
use crate::patterns;
use crate::uniqueness::{check_uniqueness, OutcomeTag, UniquenessOptions, UniquenessReport};

/// On-disk pattern: `{"name": "...", "cells": [[x, y], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub name: String,
    pub cells: Vec<[i32; 2]>,
}

/// A validated, canonical pattern with its name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPattern {
    pub name: String,
    pub pattern: Pattern,
}

impl PatternFile {
    pub fn from_pattern(name: &str, p: &Pattern) -> Self {
        PatternFile {
            name: name.to_string(),
            cells: p.iter().map(<[i32; 2]>::from).collect(),
        }
    }

    /// Canonicalizes and checks that the cells are distinct and connected.
    pub fn validate(&self) -> Result<NamedPattern> {
        let pattern = Pattern::new(self.cells.iter().map(|&c| Cell::from(c)))?;
        Ok(NamedPattern { name: self.name.clone(), pattern })
    }
}

pub fn parse_pattern(json: &str) -> Result<NamedPattern> {
    serde_json::from_str::<PatternFile>(json)?.validate()
}

pub fn load_pattern(path: &Path) -> Result<NamedPattern> {
    parse_pattern(&fs::read_to_string(path)?)
}

/// A built-in pattern name or the path of a pattern file.
pub fn resolve_pattern(arg: &str) -> Result<NamedPattern> {
    if patterns::NAMES.contains(&arg) {
        return Ok(NamedPattern { name: arg.to_string(), pattern: patterns::by_name(arg)? });
    }
    let path = Path::new(arg);
    if path.exists() {
        return load_pattern(path);
    }
    Err(Error::Config(format!(
        "`{arg}` is neither a pattern file nor a built-in pattern ({})",
        patterns::NAMES.join(", ")
    )))
}

/// A behaviour preset name or the path of a behaviour config file.
pub fn resolve_behavior(arg: &str) -> Result<BehaviorSpec> {
    if let Some(b) = Behavior::parse(arg) {
        return Ok(b.spec());
    }
    let path = Path::new(arg);
    if path.exists() {
        return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
    }
    Err(Error::Config(format!(
        "`{arg}` is neither a behaviour config file nor one of Baseline, ALT1, ALT2, ALT3, ALT4"
    )))
}

/// Comma-separated behaviours; `all` expands to the five presets.
pub fn resolve_behaviors(arg: &str) -> Result<Vec<BehaviorSpec>> {
    if arg.trim().eq_ignore_ascii_case("all") {
        return Ok(Behavior::ALL.iter().map(|b| b.spec()).collect());
    }
    arg.split(',').map(|a| resolve_behavior(a.trim())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleCounts {
    pub s_des: usize,
    pub s_blocked: usize,
    pub s_static: usize,
    pub s_active: usize,
    pub s_simplicial: usize,
    pub q_safe_states: usize,
    pub q_safe_pairs: usize,
}

/// Everything derived for one pattern under one behaviour, as exported.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Bundle {
    pub pattern: PatternFile,
    pub behavior: BehaviorSpec,
    pub direction_legend: String,
    pub counts: BundleCounts,
    pub sets: StateSets,
    /// State → safe actions, for active states only.
    pub q_safe: SafeActionMap,
    /// State → class, for every state.
    pub classes: BTreeMap<String, StateClass>,
}

impl Bundle {
    pub fn derive(np: &NamedPattern, spec: &BehaviorSpec) -> Result<Self> {
        let d = Derivation::new(&np.pattern, spec)?;
        Ok(Bundle::from_derivation(np, &d))
    }

    pub fn from_derivation(np: &NamedPattern, d: &Derivation) -> Self {
        let s = &d.sets;
        Bundle {
            pattern: PatternFile::from_pattern(&np.name, &np.pattern),
            behavior: d.spec.clone(),
            direction_legend: DIRECTION_LEGEND.to_string(),
            counts: BundleCounts {
                s_des: s.s_des.len(),
                s_blocked: s.s_blocked.len(),
                s_static: s.s_static.len(),
                s_active: s.s_active.len(),
                s_simplicial: s.s_simplicial.len(),
                q_safe_states: d.q_safe.domain().len(),
                q_safe_pairs: d.q_safe.pair_count(),
            },
            sets: s.clone(),
            q_safe: d.q_safe.clone(),
            classes: d.class_table(),
        }
    }

    /// Re-derives from the embedded pattern and behaviour and rejects a
    /// bundle whose tables disagree with the derivation.
    pub fn check(&self) -> Result<(NamedPattern, Derivation)> {
        let np = self.pattern.validate()?;
        let d = Derivation::new(&np.pattern, &self.behavior)?;
        if d.sets != self.sets || d.q_safe != self.q_safe {
            return Err(Error::Config(format!(
                "bundle tables for `{}` under {} do not match a fresh derivation",
                np.name, self.behavior.name
            )));
        }
        Ok((np, d))
    }
}

/// Verification verdict: uniqueness plus the local proof conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pattern: String,
    pub behavior: String,
    pub outcome: OutcomeTag,
    pub conditions: ConditionReport,
    pub uniqueness: UniquenessReport,
    /// Unique desired pattern and every condition holds.
    pub verified: bool,
}

pub fn verify(
    np: &NamedPattern,
    d: &Derivation,
    check: CheckOptions,
    opts: &UniquenessOptions,
) -> Result<VerifyReport> {
    let conditions = check_conditions(d, check);
    let uniqueness = check_uniqueness(&d.sets, np.pattern.len(), &np.pattern, opts)?;
    Ok(VerifyReport {
        pattern: np.name.clone(),
        behavior: d.spec.name.clone(),
        outcome: uniqueness.outcome,
        verified: uniqueness.is_unique() && conditions.all_ok(),
        conditions,
        uniqueness,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes a file, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_file_round_trip_canonicalizes() {
        let np = parse_pattern(r#"{"name": "t4", "cells": [[5, 5], [6, 5], [7, 5], [6, 6]]}"#).unwrap();
        assert_eq!(np.name, "t4");
        assert_eq!(np.pattern, patterns::triangle4());
        let back = serde_json::to_string(&PatternFile::from_pattern("t4", &np.pattern)).unwrap();
        assert_eq!(parse_pattern(&back).unwrap(), np);
    }

    #[test]
    fn bad_pattern_files_are_rejected() {
        assert!(matches!(parse_pattern("{not json"), Err(Error::Json(_))));
        assert!(matches!(
            parse_pattern(r#"{"name": "gap", "cells": [[0, 0], [2, 0]]}"#),
            Err(Error::DisconnectedPattern)
        ));
        assert!(matches!(
            parse_pattern(r#"{"name": "dup", "cells": [[0, 0], [0, 0]]}"#),
            Err(Error::DuplicateCell(_))
        ));
        assert!(matches!(parse_pattern(r#"{"name": "e", "cells": []}"#), Err(Error::EmptyPattern)));
    }

    #[test]
    fn behaviour_config_uses_defaults_for_missing_fields() {
        let spec: BehaviorSpec =
            serde_json::from_str(r#"{"blocked_neighbor_threshold": 5, "alt3_cross_rule": false, "alt1_no_repeat": true}"#)
                .unwrap();
        assert_eq!(spec.blocked_neighbor_threshold, Some(5));
        assert!(spec.alt1_no_repeat);
        assert!(spec.extra_blocked.is_empty());
        assert_eq!(resolve_behaviors("all").unwrap().len(), 5);
        assert_eq!(resolve_behaviors("baseline, alt2").unwrap()[1], Behavior::Alt2.spec());
        assert!(resolve_behavior("ALT9").is_err());
    }

    #[test]
    fn bundle_counts_and_self_check() {
        let np = resolve_pattern("triangle-4").unwrap();
        let b = Bundle::derive(&np, &Behavior::Baseline.spec()).unwrap();
        assert_eq!(b.counts.s_des, 4);
        assert_eq!(b.classes.len(), 255);
        let json = serde_json::to_string(&b).unwrap();
        let back: Bundle = serde_json::from_str(&json).unwrap();
        back.check().unwrap();

        let mut tampered = back;
        tampered.sets.s_active = tampered.sets.s_static;
        assert!(tampered.check().is_err());
    }

    #[test]
    fn pair_bundle_domain_is_active_states() {
        let np = resolve_pattern("pair").unwrap();
        let b = Bundle::derive(&np, &Behavior::Baseline.spec()).unwrap();
        assert_eq!(b.counts.s_des, 2);
        assert_eq!(b.counts.s_static + b.counts.s_active, 255);
        assert_eq!(b.counts.q_safe_states, b.counts.s_active);
        assert_eq!(b.counts.q_safe_states, 253 - b.counts.s_blocked);
    }

    #[test]
    fn singleton_pattern_cannot_be_derived() {
        let np = parse_pattern(r#"{"name": "one", "cells": [[0, 0]]}"#).unwrap();
        assert!(matches!(
            Bundle::derive(&np, &Behavior::Baseline.spec()),
            Err(Error::SingletonPattern)
        ));
    }
}
