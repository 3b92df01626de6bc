use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::{decode_index, expand_with};
use super::{Alphabet, BuildError, BuildMode, CSet, CaptureLog, Chooser, LevelSystem, WordRef, MAX_CSET_LETTERS};
use crate::growthfn::GrowthFunction;

/// Restriction on the members of the next choice set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Every member must end with this lower-level element.
    FixedSuffix(WordRef),
    /// These elements of the same level must be members.
    MustInclude(Vec<WordRef>),
}

/// Mutable state while levels are being added. Levels are appended strictly
/// in order and never revisited.
#[derive(Debug)]
pub struct SystemBuilder {
    pub(crate) sys: LevelSystem,
    max_depth: u32,
}

/// Starts a system over the alphabet of size `f(1)` with no levels defined.
pub fn init_system(growth: GrowthFunction, chooser: Chooser, depth: u32) -> Result<SystemBuilder, BuildError> {
    let d = growth.eval(1)?;
    let size = d
        .to_usize()
        .filter(|&s| (1..=super::MAX_LETTERS).contains(&s))
        .ok_or(BuildError::AlphabetSize(d))?;
    SystemBuilder::with_alphabet(growth, Alphabet::standard(size)?, chooser, depth)
}

/// The unconstrained construction: every level takes the first (or seeded)
/// `r_i` elements of `W(2^i)`.
pub fn build_plain(growth: GrowthFunction, chooser: Chooser, depth: u32) -> Result<LevelSystem, BuildError> {
    let mut b = init_system(growth, chooser, depth)?;
    b.fill_to(depth)?;
    Ok(b.finish())
}

impl SystemBuilder {
    pub(crate) fn with_alphabet(
        growth: GrowthFunction,
        alphabet: Alphabet,
        chooser: Chooser,
        depth: u32,
    ) -> Result<Self, BuildError> {
        if depth == 0 || depth > 40 {
            return Err(BuildError::Invalid(format!("depth {depth} outside 1..=40")));
        }
        Ok(SystemBuilder {
            sys: LevelSystem {
                growth,
                alphabet,
                csets: Vec::new(),
                chooser,
                mode: BuildMode::Plain,
                capture_log: CaptureLog::default(),
            },
            max_depth: depth,
        })
    }

    /// Levels `0..defined()` have choice sets.
    pub fn defined(&self) -> u32 {
        self.sys.depth()
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// Read-only view of the partial system.
    pub fn system(&self) -> &LevelSystem {
        &self.sys
    }

    pub(crate) fn set_mode(&mut self, mode: BuildMode) {
        self.sys.mode = mode;
    }

    /// `r_level = ⌈f(2^(level+1)) / f(2^level)⌉`.
    pub fn required_size(&self, level: u32) -> Result<BigUint, BuildError> {
        Ok(self.sys.growth.ratio(level)?)
    }

    /// Number of admissible members for `C(2^level)` under `constraint`.
    pub fn admissible_count(&self, level: u32, constraint: &Constraint) -> Result<BigUint, BuildError> {
        Ok(self.plan(level, constraint)?.free_count())
    }

    /// Fills levels unconstrained until `level` levels are defined.
    pub fn fill_to(&mut self, level: u32) -> Result<(), BuildError> {
        while self.defined() < level {
            self.choose_cset(self.defined(), &Constraint::None)?;
        }
        Ok(())
    }

    /// Chooses `C(2^level)` for the next undefined level.
    pub fn choose_cset(&mut self, level: u32, constraint: &Constraint) -> Result<&CSet, BuildError> {
        if level != self.defined() {
            return Err(BuildError::LevelNotReady {
                level,
                defined: self.defined(),
            });
        }
        if level >= self.max_depth {
            return Err(BuildError::DepthExceeded {
                level,
                depth: self.max_depth,
            });
        }
        let required = self.required_size(level)?;
        let size = required
            .to_u32()
            .filter(|&r| (r as u128) << level <= MAX_CSET_LETTERS)
            .ok_or_else(|| BuildError::CSetTooLarge {
                level,
                size: required.clone(),
            })? as usize;
        let plan = self.plan(level, constraint)?;
        if plan.must.len() > size {
            return Err(BuildError::CapacityExceeded {
                level,
                required: BigUint::from(plan.must.len()),
                available: required,
            });
        }
        let available = plan.free_count();
        if available < required {
            return Err(BuildError::InsufficientWords {
                level,
                required,
                available,
            });
        }
        let wanted = size - plan.must.len();
        let mut members = match self.sys.chooser {
            Chooser::Lex => plan.lex(wanted),
            Chooser::Seeded { seed } => plan.seeded(wanted, seed, level),
        };
        members.extend(plan.must.iter().cloned());
        members.sort();
        let strings = members.iter().map(|m| expand_with(&self.sys.csets, m)).collect();
        self.sys.csets.push(CSet::new(level, members, strings));
        Ok(self.sys.csets.last().expect("just pushed"))
    }

    fn plan(&self, level: u32, constraint: &Constraint) -> Result<Plan, BuildError> {
        if level > self.defined() {
            return Err(BuildError::LevelNotReady {
                level,
                defined: self.defined(),
            });
        }
        let radices = self.sys.radices(level);
        match constraint {
            Constraint::None => Ok(Plan {
                free: radices,
                fixed: Vec::new(),
                must: BTreeSet::new(),
            }),
            Constraint::FixedSuffix(w) => {
                if w.level() > level || !self.sys.is_valid_ref(w) {
                    return Err(BuildError::InvalidRef(format!(
                        "{w} cannot be a suffix at level {level}"
                    )));
                }
                let keep = (level - w.level()) as usize;
                Ok(Plan {
                    free: radices[..keep].to_vec(),
                    fixed: w.choices().to_vec(),
                    must: BTreeSet::new(),
                })
            }
            Constraint::MustInclude(list) => {
                for w in list {
                    if w.level() != level || !self.sys.is_valid_ref(w) {
                        return Err(BuildError::InvalidRef(format!("{w} is not an element of W(2^{level})")));
                    }
                }
                Ok(Plan {
                    free: radices,
                    fixed: Vec::new(),
                    must: list.iter().cloned().collect(),
                })
            }
        }
    }

    pub fn finish(self) -> LevelSystem {
        self.sys
    }
}

/// Admissible tuples: any digits over `free`, followed by `fixed`, minus
/// nothing; members of `must` are added separately and skipped while filling.
struct Plan {
    free: Vec<u64>,
    fixed: Vec<u32>,
    must: BTreeSet<WordRef>,
}

impl Plan {
    fn free_count(&self) -> BigUint {
        self.free.iter().fold(BigUint::one(), |acc, &r| acc * r)
    }

    fn tuple(&self, free_digits: WordRef) -> WordRef {
        if self.free.is_empty() {
            return WordRef::new(self.fixed.clone());
        }
        let mut c = free_digits.choices().to_vec();
        c.extend_from_slice(&self.fixed);
        WordRef::new(c)
    }

    fn at(&self, k: &BigUint) -> WordRef {
        if self.free.is_empty() {
            WordRef::new(self.fixed.clone())
        } else {
            self.tuple(decode_index(&self.free, k))
        }
    }

    fn lex(&self, wanted: usize) -> Vec<WordRef> {
        let mut out = Vec::with_capacity(wanted);
        let mut k = BigUint::from(0u32);
        while out.len() < wanted {
            let w = self.at(&k);
            if !self.must.contains(&w) {
                out.push(w);
            }
            k += 1u32;
        }
        out
    }

    fn seeded(&self, wanted: usize, seed: u64, level: u32) -> Vec<WordRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(level_seed(seed, level));
        let total = self.free_count();
        let draw = wanted + self.must.len();
        match total.to_usize() {
            Some(n) => index::sample(&mut rng, n, draw.min(n))
                .into_iter()
                .map(|i| self.at(&BigUint::from(i)))
                .filter(|w| !self.must.contains(w))
                .take(wanted)
                .collect(),
            None => {
                let mut seen = BTreeSet::new();
                while seen.len() < wanted {
                    let digits = self.free.iter().map(|&r| rng.gen_range(0..r) as u32).collect();
                    let w = self.tuple(WordRef::new(digits));
                    if !self.must.contains(&w) {
                        seen.insert(w);
                    }
                }
                seen.into_iter().collect()
            }
        }
    }
}

pub(crate) fn level_seed(seed: u64, level: u32) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(level as u64 + 1)
}
