use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Alphabet, BuildError, CSet, CaptureLog, Chooser, WordRef};
use crate::growthfn::GrowthFunction;
use crate::numeric::Ratio;

/// How a system was produced. Recorded for provenance only; analysis never
/// depends on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BuildMode {
    Plain,
    Recurrent {
        capture_budget: usize,
        mu_offset: u32,
        horizon: u32,
    },
    Free {
        epsilon: Ratio,
    },
}

/// A completed, immutable level system of depth `D`: choice sets for levels
/// `0..D`, so that `W(2^D)` is (implicitly) defined.
#[derive(Clone, Debug)]
pub struct LevelSystem {
    pub(crate) growth: GrowthFunction,
    pub(crate) alphabet: Alphabet,
    pub(crate) csets: Vec<CSet>,
    pub(crate) chooser: Chooser,
    pub(crate) mode: BuildMode,
    pub(crate) capture_log: CaptureLog,
}

impl LevelSystem {
    pub fn growth(&self) -> &GrowthFunction {
        &self.growth
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> u32 {
        self.csets.len() as u32
    }

    pub fn chooser(&self) -> Chooser {
        self.chooser
    }

    pub fn mode(&self) -> &BuildMode {
        &self.mode
    }

    pub fn capture_log(&self) -> &CaptureLog {
        &self.capture_log
    }

    pub fn csets(&self) -> &[CSet] {
        &self.csets
    }

    pub fn cset(&self, level: u32) -> &CSet {
        &self.csets[level as usize]
    }

    /// `|W(2^level)| = d · ∏_{j<level} |C_j|`.
    pub fn level_word_count(&self, level: u32) -> BigUint {
        assert!(level <= self.depth(), "level {level} beyond depth");
        self.csets[..level as usize]
            .iter()
            .fold(BigUint::from(self.alphabet.size()), |acc, c| acc * c.len())
    }

    /// Mixed radices of the choice tuples at `level`, most significant first.
    pub(crate) fn radices(&self, level: u32) -> Vec<u64> {
        let mut r: Vec<u64> = (0..level).rev().map(|j| self.csets[j as usize].len() as u64).collect();
        r.push(self.alphabet.size() as u64);
        r
    }

    pub fn is_valid_ref(&self, r: &WordRef) -> bool {
        r.level() <= self.depth()
            && r.choices()
                .iter()
                .zip(self.radices(r.level()))
                .all(|(&c, radix)| (c as u64) < radix)
    }

    fn check_ref(&self, r: &WordRef) -> Result<(), BuildError> {
        if self.is_valid_ref(r) {
            Ok(())
        } else {
            Err(BuildError::InvalidRef(r.to_string()))
        }
    }

    /// The full word of length `2^level`.
    pub fn expand(&self, r: &WordRef) -> Result<Vec<u8>, BuildError> {
        self.check_ref(r)?;
        Ok(expand_with(&self.csets, r))
    }

    /// Letters `[from, from + len)` of `r`, copying only the overlapping
    /// parts of the blocks.
    pub fn expand_window(&self, r: &WordRef, from: usize, len: usize) -> Result<Vec<u8>, BuildError> {
        self.check_ref(r)?;
        let word_len = r.word_len();
        if from.checked_add(len).is_none_or(|end| end > word_len) {
            return Err(BuildError::OutOfRange { from, len, word_len });
        }
        let end = from + len;
        let mut out = Vec::with_capacity(len);
        let level = r.level();
        let mut offset = 0usize;
        for (pos, &c) in r.choices().iter().enumerate() {
            if offset >= end {
                break;
            }
            let block: &[u8] = if (pos as u32) < level {
                let j = level - 1 - pos as u32;
                &self.csets[j as usize].strings()[c as usize]
            } else {
                std::slice::from_ref(&0u8)
            };
            let block_len = block.len();
            let lo = from.max(offset);
            let hi = end.min(offset + block_len);
            if lo < hi {
                if (pos as u32) < level {
                    out.extend_from_slice(&block[lo - offset..hi - offset]);
                } else {
                    out.push(c as u8);
                }
            }
            offset += block_len;
        }
        Ok(out)
    }

    /// The element of `W(2^level)` with lexicographic rank `index`.
    pub fn element_at(&self, level: u32, index: &BigUint) -> Result<WordRef, BuildError> {
        if level > self.depth() {
            return Err(BuildError::LevelNotReady {
                level,
                defined: self.depth(),
            });
        }
        if index >= &self.level_word_count(level) {
            return Err(BuildError::InvalidRef(format!(
                "index {index} out of range at level {level}"
            )));
        }
        Ok(decode_index(&self.radices(level), index))
    }

    /// Decomposes a word of length `2^t` into its reference, if it lies in
    /// `W(2^t)`.
    pub fn locate(&self, word: &[u8]) -> Option<WordRef> {
        locate_with(&self.csets, self.alphabet.size(), word)
    }

    /// Seeded sample without replacement of `count` elements of
    /// `W(2^level)`, returned in lexicographic order. Asking for at least
    /// the whole level returns all of it.
    pub fn sample_elements(&self, level: u32, count: usize, seed: u64) -> Vec<WordRef> {
        assert!(level <= self.depth(), "level {level} beyond depth");
        let total = self.level_word_count(level);
        let radices = self.radices(level);
        if total <= BigUint::from(count) {
            let n = total.to_u64().expect("fits");
            return (0..n).map(|i| decode_index(&radices, &BigUint::from(i))).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(super::builder::level_seed(seed, level));
        let mut picked: Vec<WordRef> = match total.to_usize() {
            Some(n) => index::sample(&mut rng, n, count)
                .into_iter()
                .map(|i| decode_index(&radices, &BigUint::from(i)))
                .collect(),
            None => {
                let mut seen = std::collections::BTreeSet::new();
                while seen.len() < count {
                    let choices = radices.iter().map(|&r| rng.gen_range(0..r) as u32).collect();
                    seen.insert(WordRef::new(choices));
                }
                seen.into_iter().collect()
            }
        };
        picked.sort();
        picked
    }

    /// All elements of `W(2^level)` in lexicographic order.
    pub fn elements(&self, level: u32) -> impl Iterator<Item = WordRef> + '_ {
        let radices = self.radices(level);
        let total = self
            .level_word_count(level)
            .to_u64()
            .expect("level too large to enumerate");
        (0..total).map(move |i| decode_index(&radices, &BigUint::from(i)))
    }

    /// The same system cut back to `depth` levels.
    pub fn truncated(&self, depth: u32) -> LevelSystem {
        assert!(depth <= self.depth());
        let mut out = self.clone();
        out.csets.truncate(depth as usize);
        out.capture_log.entries.retain(|e| e.capture_level < depth);
        out
    }

    /// `∏_{i<n} |C_i|`.
    pub fn cset_product(&self, n: u32) -> BigUint {
        self.csets[..n as usize]
            .iter()
            .fold(BigUint::one(), |acc, c| acc * c.len())
    }
}

pub(crate) fn expand_with(csets: &[CSet], r: &WordRef) -> Vec<u8> {
    let level = r.level();
    let mut out = Vec::with_capacity(r.word_len());
    for (pos, &c) in r.choices().iter().enumerate() {
        if (pos as u32) < level {
            let j = level - 1 - pos as u32;
            out.extend_from_slice(&csets[j as usize].strings()[c as usize]);
        } else {
            out.push(c as u8);
        }
    }
    out
}

pub(crate) fn locate_with(csets: &[CSet], d: usize, word: &[u8]) -> Option<WordRef> {
    let len = word.len();
    if len == 0 || !len.is_power_of_two() {
        return None;
    }
    let level = len.trailing_zeros();
    if level as usize > csets.len() {
        return None;
    }
    let mut choices = Vec::with_capacity(level as usize + 1);
    let mut rest = word;
    for j in (0..level).rev() {
        let (head, tail) = rest.split_at(1 << j);
        choices.push(csets[j as usize].position(head)?);
        rest = tail;
    }
    let letter = rest[0];
    if (letter as usize) >= d {
        return None;
    }
    choices.push(letter as u32);
    Some(WordRef::new(choices))
}

pub(crate) fn decode_index(radices: &[u64], index: &BigUint) -> WordRef {
    let mut rest = index.clone();
    let mut choices = vec![0u32; radices.len()];
    for (slot, &radix) in choices.iter_mut().zip(radices).rev() {
        let r = BigUint::from(radix);
        *slot = (&rest % &r).to_u32().expect("digit fits");
        rest /= r;
    }
    debug_assert!(rest.is_zero());
    WordRef::new(choices)
}
