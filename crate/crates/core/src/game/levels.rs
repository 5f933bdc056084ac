use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infer::{default_fixities, infer, parse_definition, subsumes, Env, Fixities};
use crate::syntax::{parse_scheme, Scheme};

/// The ten shipped levels, stored exactly as originally published.
pub const DEFAULT_LEVELS: &str = include_str!("../../levels/default.json");

/// Name every attempt must define.
pub const DEFINITION_NAME: &str = "zeroToHero";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

/// One entry of a level file, before its signatures are parsed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub number: u32,
    pub title: String,
    pub target: String,
    pub functions: Vec<FunctionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub number: u32,
    pub title: String,
    pub target: Scheme,
    pub available: Vec<(String, Scheme)>,
    pub reference_solution: Option<String>,
    pub solution_verified: bool,
    /// The entry as read from the file, for byte-level comparisons.
    #[serde(skip)]
    pub source: LevelEntry,
}

impl Level {
    /// The closed environment attempts are checked against.
    pub fn env(&self) -> Env {
        self.available.iter().cloned().collect()
    }

    pub fn fixities(&self) -> Fixities {
        let names: BTreeSet<&str> = self.available.iter().map(|(n, _)| n.as_str()).collect();
        default_fixities().into_iter().filter(|(op, _)| names.contains(op.as_str())).collect()
    }

    /// Does `code` define a function usable at the target signature?
    pub fn accepts(&self, code: &str) -> bool {
        let Ok(def) = parse_definition(code, &self.fixities()) else {
            return false;
        };
        def.name == DEFINITION_NAME && infer(&def, &self.env()).is_ok_and(|s| subsumes(&s, &self.target))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LevelFormatError {
    #[error("level file is not valid JSON: {0}")]
    Json(String),
    #[error("level {level}: field `{field}`: {message}")]
    Field { level: u32, field: String, message: String },
    #[error("level number {0} appears more than once")]
    DuplicateNumber(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSet {
    pub levels: Vec<Level>,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn get(&self, number: u32) -> Option<&Level> {
        self.levels.iter().find(|l| l.number == number)
    }

    pub fn by_index(&self, index: usize) -> Option<&Level> {
        self.levels.get(index)
    }
}

pub fn default_levels() -> LevelSet {
    load_levels(DEFAULT_LEVELS).expect("shipped level file is valid")
}

/// Parses a level file: `[{number, title, target, functions:[{name, type}], solution?}]`.
pub fn load_levels(text: &str) -> Result<LevelSet, LevelFormatError> {
    let entries: Vec<LevelEntry> = serde_json::from_str(text).map_err(|e| LevelFormatError::Json(e.to_string()))?;
    let mut seen = BTreeSet::new();
    let mut levels = Vec::new();
    for e in entries {
        if !seen.insert(e.number) {
            return Err(LevelFormatError::DuplicateNumber(e.number));
        }
        levels.push(build_level(e)?);
    }
    Ok(LevelSet { levels })
}

fn build_level(e: LevelEntry) -> Result<Level, LevelFormatError> {
    let field = |field: &str, message: String| LevelFormatError::Field { level: e.number, field: field.into(), message };
    let target = parse_scheme(&e.target).map_err(|err| field("target", err.to_string()))?;
    let mut available: Vec<(String, Scheme)> = Vec::new();
    for (i, f) in e.functions.iter().enumerate() {
        if available.iter().any(|(n, _)| *n == f.name) {
            return Err(field(&format!("functions[{i}].name"), format!("`{}` is listed twice", f.name)));
        }
        let s = parse_scheme(&f.ty).map_err(|err| field(&format!("functions[{i}].type"), err.to_string()))?;
        available.push((f.name.clone(), s));
    }
    let mut level = Level {
        number: e.number,
        title: e.title.clone(),
        target,
        available,
        reference_solution: e.solution.clone(),
        solution_verified: false,
        source: e,
    };
    level.solution_verified = level.reference_solution.as_deref().is_some_and(|code| level.accepts(code));
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set() {
        let set = default_levels();
        assert_eq!(set.len(), 10);
        assert_eq!(set.get(1).unwrap().target.to_string(), "Zero a -> Hero a");
        let l7 = set.get(7).unwrap();
        let ap = &l7.available.iter().find(|(n, _)| n == "<*>").unwrap().1;
        assert_eq!(ap.to_string(), "Hero (a -> c) -> Hero a -> Hero c");
    }

    #[test]
    fn verified_flags() {
        let set = default_levels();
        let flags: Vec<(u32, bool)> = set.levels.iter().map(|l| (l.number, l.solution_verified)).collect();
        for (n, ok) in flags {
            assert_eq!(ok, n != 5 && n != 9, "level {n}");
        }
    }

    #[test]
    fn format_errors() {
        assert!(matches!(load_levels("{"), Err(LevelFormatError::Json(_))));
        let bad = r#"[{"number": 3, "title": "x", "target": "Zero a ->", "functions": []}]"#;
        let err = load_levels(bad).unwrap_err();
        assert!(matches!(err, LevelFormatError::Field { level: 3, ref field, .. } if field == "target"), "{err}");
        let dup = r#"[{"number": 1, "title": "x", "target": "a", "functions": []},
                      {"number": 1, "title": "y", "target": "a", "functions": []}]"#;
        assert_eq!(load_levels(dup).unwrap_err(), LevelFormatError::DuplicateNumber(1));
    }

    #[test]
    fn operators_only_parse_when_provided() {
        let set = default_levels();
        assert!(!set.get(1).unwrap().accepts("zeroToHero z = f $ z"));
        assert!(set.get(2).unwrap().accepts("zeroToHero z = mkHero $ runZero z"));
        assert!(!set.get(1).unwrap().accepts("other z = f z"));
    }
}
