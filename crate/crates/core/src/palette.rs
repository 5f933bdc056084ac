//! Deterministic identifier-to-color assignment.
//!
//! An identifier's preferred slot is a hash of its name, so the same name
//! gets the same color across unrelated renderings. Within one rendering,
//! collisions move to the nearest free slot in first-appearance order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Okabe–Ito followed by four high-contrast additions.
pub const DEFAULT_COLORS: [&str; 12] = [
    "#E69F00", "#56B4E9", "#009E73", "#F0E442", "#0072B2", "#D55E00", "#CC79A7", "#999999", "#882255",
    "#44AA99", "#999933", "#332288",
];

pub const MIN_PALETTE_LEN: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PaletteError {
    #[error("palette needs at least {MIN_PALETTE_LEN} colors, got {0}")]
    TooFew(usize),
    #[error("`{0}` is not a #RRGGBB color")]
    BadColor(String),
    #[error("palette file is not a JSON array of strings: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Palette {
    colors: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette { colors: DEFAULT_COLORS.iter().map(|c| c.to_string()).collect() }
    }
}

impl TryFrom<Vec<String>> for Palette {
    type Error = PaletteError;

    fn try_from(colors: Vec<String>) -> Result<Self, Self::Error> {
        Palette::new(colors)
    }
}

impl From<Palette> for Vec<String> {
    fn from(p: Palette) -> Self {
        p.colors
    }
}

impl Palette {
    pub fn new(colors: Vec<String>) -> Result<Self, PaletteError> {
        if colors.len() < MIN_PALETTE_LEN {
            return Err(PaletteError::TooFew(colors.len()));
        }
        for c in &colors {
            parse_hex(c).ok_or_else(|| PaletteError::BadColor(c.clone()))?;
        }
        Ok(Palette { colors })
    }

    /// Reads a palette override: a JSON array of `#RRGGBB` strings.
    pub fn from_json(text: &str) -> Result<Self, PaletteError> {
        let colors: Vec<String> = serde_json::from_str(text).map_err(|e| PaletteError::Json(e.to_string()))?;
        Palette::new(colors)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, slot: usize) -> &str {
        &self.colors[slot % self.colors.len()]
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ColorAssignment {
    pub slots: BTreeMap<String, usize>,
    /// Set when there were more identifiers than slots and colors repeat.
    pub recycled: bool,
}

impl ColorAssignment {
    pub fn slot(&self, id: &str) -> usize {
        self.slots.get(id).copied().unwrap_or(0)
    }
}

/// FNV-1a; stable across platforms and releases.
pub fn stable_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn preferred_slot(id: &str, palette_len: usize) -> usize {
    (stable_hash(id) % palette_len as u64) as usize
}

/// Assigns palette slots to `ids` (duplicates ignored, first appearance wins).
pub fn assign_colors<S: AsRef<str>>(ids: &[S], palette: &Palette) -> ColorAssignment {
    let n = palette.len();
    let mut taken = vec![false; n];
    let mut out = ColorAssignment::default();
    for id in ids {
        let id = id.as_ref();
        if out.slots.contains_key(id) {
            continue;
        }
        let home = preferred_slot(id, n);
        let slot = nearest_free(&taken, home).unwrap_or_else(|| {
            out.recycled = true;
            home
        });
        taken[slot] = true;
        out.slots.insert(id.to_string(), slot);
    }
    out
}

/// Probes `home`, `home+1`, `home-1`, `home+2`, … with wraparound.
fn nearest_free(taken: &[bool], home: usize) -> Option<usize> {
    let n = taken.len();
    for d in 0..=n / 2 {
        for cand in [(home + d) % n, (home + n - d % n) % n] {
            if !taken[cand] {
                return Some(cand);
            }
        }
    }
    None
}

pub fn parse_hex(c: &str) -> Option<(u8, u8, u8)> {
    let h = c.strip_prefix('#')?;
    if h.len() != 6 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let byte = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).ok();
    Some((byte(0)?, byte(2)?, byte(4)?))
}

/// Nearest entry of the xterm 6×6×6 color cube.
pub fn ansi256(c: &str) -> u8 {
    let (r, g, b) = parse_hex(c).unwrap_or((0x80, 0x80, 0x80));
    let level = |v: u8| ((v as u32 * 5 + 127) / 255) as u8;
    16 + 36 * level(r) + 6 * level(g) + level(b)
}
