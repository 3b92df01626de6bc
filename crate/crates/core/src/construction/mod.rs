//! Finite truncations of the level systems `W(2^(i+1)) = C(2^i) W(2^i)`.
//!
//! Only the choice sets `C(2^i)` are materialized. An element of `W(2^i)`
//! is a [`WordRef`]: one index into each lower choice set plus a final
//! letter. Because the blocks have fixed lengths, distinct references
//! always expand to distinct words.

mod builder;
mod capture;
mod free;
pub(crate) mod system;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::growthfn::GrowthError;

pub use builder::{build_plain, init_system, Constraint, SystemBuilder};
pub use capture::{build_uniformly_recurrent, CaptureEntry, CaptureLog};
pub use free::build_free_power_system;
pub use system::{BuildMode, LevelSystem};

/// Largest alphabet with canonical single-character letter names.
pub const MAX_LETTERS: usize = 26;

/// Upper bound on the flat storage of a single choice set, in letters.
pub const MAX_CSET_LETTERS: u128 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("level {level}: need {required} words but only {available} are admissible (deficit {})", required - available)]
    InsufficientWords {
        level: u32,
        required: BigUint,
        available: BigUint,
    },
    #[error("level {level}: {required} words must be included but C(2^{level}) holds only {available} (deficit {})", required - available)]
    CapacityExceeded {
        level: u32,
        required: BigUint,
        available: BigUint,
    },
    #[error("level {level}: choice set of {size} words is too large to materialize")]
    CSetTooLarge { level: u32, size: BigUint },
    #[error("alphabet of size {0} is not supported (1..={MAX_LETTERS})")]
    AlphabetSize(BigUint),
    #[error("level {level} requested but only levels below {defined} are defined")]
    LevelNotReady { level: u32, defined: u32 },
    #[error("capture at level {level} would exceed build depth {depth}")]
    DepthExceeded { level: u32, depth: u32 },
    #[error("invalid word reference: {0}")]
    InvalidRef(String),
    #[error("window [{from}, {from}+{len}) outside a word of length {word_len}")]
    OutOfRange { from: usize, len: usize, word_len: usize },
    #[error("growth function fails basic hypotheses: {0}")]
    Hypothesis(String),
    #[error("invalid build request: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    /// Letters `a, b, c, …`.
    pub fn standard(size: usize) -> Result<Self, BuildError> {
        if size == 0 || size > MAX_LETTERS {
            return Err(BuildError::AlphabetSize(BigUint::from(size)));
        }
        Ok(Alphabet {
            names: (0..size as u8).map(|i| (b'a' + i) as char).collect(),
        })
    }

    pub fn named(names: Vec<char>) -> Result<Self, BuildError> {
        let mut seen = names.clone();
        seen.sort_unstable();
        seen.dedup();
        if names.is_empty() || names.len() > MAX_LETTERS || seen.len() != names.len() {
            return Err(BuildError::AlphabetSize(BigUint::from(names.len())));
        }
        Ok(Alphabet { names })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// Bits needed per letter in packed encodings.
    pub fn bits_per_letter(&self) -> u32 {
        let d = self.names.len() as u32;
        (u32::BITS - (d.max(2) - 1).leading_zeros()).max(1)
    }

    pub fn render(&self, word: &[u8]) -> String {
        word.iter().map(|&l| self.names[l as usize]).collect()
    }

    pub fn parse(&self, text: &str) -> Option<Vec<u8>> {
        text.chars()
            .map(|c| self.names.iter().position(|&n| n == c).map(|i| i as u8))
            .collect()
    }
}

/// An element of `W(2^level)`, stored as `(c_{level-1}, …, c_0, letter)`.
///
/// The derived ordering is the lexicographic order on choice tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordRef {
    choices: Vec<u32>,
}

impl WordRef {
    pub fn new(choices: Vec<u32>) -> Self {
        assert!(!choices.is_empty(), "a word reference needs at least a letter");
        WordRef { choices }
    }

    pub fn letter(letter: u32) -> Self {
        WordRef { choices: vec![letter] }
    }

    pub fn level(&self) -> u32 {
        (self.choices.len() - 1) as u32
    }

    pub fn choices(&self) -> &[u32] {
        &self.choices
    }

    /// Length of the represented word.
    pub fn word_len(&self) -> usize {
        1usize << self.level()
    }

    /// The reference of the `W(2^k)` tail, `k <= level`.
    pub fn tail(&self, k: u32) -> WordRef {
        let skip = (self.level() - k) as usize;
        WordRef {
            choices: self.choices[skip..].to_vec(),
        }
    }
}

impl fmt::Display for WordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({})[", self.word_len())?;
        for (i, c) in self.choices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// The materialized choice set `C(2^level)`.
#[derive(Clone, Debug)]
pub struct CSet {
    level: u32,
    members: Vec<WordRef>,
    strings: Vec<Vec<u8>>,
    index: std::collections::HashMap<Vec<u8>, u32>,
}

impl CSet {
    pub(crate) fn new(level: u32, members: Vec<WordRef>, strings: Vec<Vec<u8>>) -> Self {
        let index = strings.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        CSet {
            level,
            members,
            strings,
            index,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[WordRef] {
        &self.members
    }

    /// Cached expansions, one per member, each of length `2^level`.
    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn position(&self, word: &[u8]) -> Option<u32> {
        self.index.get(word).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chooser {
    /// Lexicographically smallest admissible choice tuples.
    Lex,
    /// Uniform draws without replacement from a seeded ChaCha stream.
    Seeded { seed: u64 },
}

impl fmt::Display for Chooser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chooser::Lex => write!(f, "lex"),
            Chooser::Seeded { seed } => write!(f, "seeded({seed})"),
        }
    }
}

#[cfg(test)]
mod tests;
