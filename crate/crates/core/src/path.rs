use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Location of a node inside a [`Scheme`](crate::syntax::Scheme).
///
/// The first index selects the scheme part: `0` is the body, `1 + i` is the
/// `i`-th context constraint. Further indices walk the tree: `App` children
/// are `[head, arg]`, `Fun` children are `[dom, cod]`, and a constraint's
/// children are its parameters followed by its inner context.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePath(Vec<u32>);

impl SourcePath {
    pub fn body() -> Self {
        SourcePath(vec![0])
    }

    pub fn constraint(index: usize) -> Self {
        SourcePath(vec![1 + index as u32])
    }

    pub fn root() -> Self {
        SourcePath(Vec::new())
    }

    pub fn child(&self, index: u32) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        SourcePath(v)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with(&self, prefix: &SourcePath) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn parent(&self) -> Option<SourcePath> {
        if self.0.is_empty() {
            None
        } else {
            Some(SourcePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl From<Vec<u32>> for SourcePath {
    fn from(v: Vec<u32>) -> Self {
        SourcePath(v)
    }
}

impl fmt::Display for SourcePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

impl FromStr for SourcePath {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(SourcePath::root());
        }
        s.split('/')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(SourcePath)
    }
}

impl Serialize for SourcePath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SourcePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
