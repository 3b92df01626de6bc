use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::builder::{init_system, Constraint, SystemBuilder};
use super::{BuildError, BuildMode, Chooser, LevelSystem, WordRef};
use crate::growthfn::{check_basic, compute_mu};
use crate::growthfn::{GrowthError, GrowthFunction};

/// One successful capture: `target` occurs as the suffix of every member of
/// `C(2^capture_level)`, so its occurrences in later levels are at most
/// `gap_bound` apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureEntry {
    pub target: WordRef,
    pub target_word: String,
    pub target_level: u32,
    pub mu: u32,
    /// Number of levels that already had choice sets.
    pub defined_before: u32,
    pub capture_level: u32,
    pub gap_bound: u64,
    /// Levels tried first and filled unconstrained because too few
    /// admissible words existed there.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub retries: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureLog {
    pub entries: Vec<CaptureEntry>,
}

impl CaptureLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn find(&self, target: &WordRef) -> Option<&CaptureEntry> {
        self.entries.iter().find(|e| &e.target == target)
    }
}

impl SystemBuilder {
    /// Captures `target` at `max(mu(t), defined)` with no fallback: if that
    /// level has too few admissible words the error is returned.
    pub fn capture_target(
        &mut self,
        target: &WordRef,
        mu_offset: u32,
        horizon: u32,
    ) -> Result<CaptureEntry, BuildError> {
        let mu = compute_mu(&self.sys.growth, target.level(), mu_offset, horizon)?;
        self.capture_with_mu(target, mu, false)
    }

    fn capture_with_mu(&mut self, target: &WordRef, mu: u32, retry: bool) -> Result<CaptureEntry, BuildError> {
        if !self.sys.is_valid_ref(target) {
            return Err(BuildError::InvalidRef(target.to_string()));
        }
        let defined_before = self.defined();
        let mut level = mu.max(defined_before);
        let mut retries = Vec::new();
        loop {
            if level >= self.max_depth() {
                return Err(BuildError::DepthExceeded {
                    level,
                    depth: self.max_depth(),
                });
            }
            self.fill_to(level)?;
            match self.choose_cset(level, &Constraint::FixedSuffix(target.clone())) {
                Ok(_) => break,
                Err(BuildError::InsufficientWords { .. }) if retry => {
                    retries.push(level);
                    self.choose_cset(level, &Constraint::None)?;
                    level += 1;
                }
                Err(e) => return Err(e),
            }
        }
        let word = self.sys.expand(target)?;
        let entry = CaptureEntry {
            target: target.clone(),
            target_word: self.sys.alphabet.render(&word),
            target_level: target.level(),
            mu,
            defined_before,
            capture_level: level,
            gap_bound: 1u64 << (level + 1),
            retries,
        };
        self.sys.capture_log.entries.push(entry.clone());
        Ok(entry)
    }
}

/// Captures up to `capture_budget` elements of the levels, taken in order of
/// level and then lexicographically, and fills the remaining levels
/// unconstrained. Capturing stops early once the next capture would land at
/// or beyond `depth`.
pub fn build_uniformly_recurrent(
    growth: GrowthFunction,
    depth: u32,
    capture_budget: usize,
    mu_offset: u32,
    horizon: u32,
    chooser: Chooser,
) -> Result<LevelSystem, BuildError> {
    if depth < 2 {
        return Err(BuildError::Invalid(format!("depth {depth} below 2")));
    }
    let basic = check_basic(&growth, 1u64 << depth.min(6))?;
    if !basic.ok() {
        return Err(BuildError::Hypothesis(format!(
            "{} is not monotone and submultiplicative",
            growth.family()
        )));
    }
    let mut b = init_system(growth, chooser, depth)?;
    b.set_mode(BuildMode::Recurrent {
        capture_budget,
        mu_offset,
        horizon,
    });
    let mut done = 0usize;
    'levels: for t in 0..depth - 1 {
        if done == capture_budget {
            break;
        }
        b.fill_to(t)?;
        let mu = match compute_mu(&b.sys.growth, t, mu_offset, horizon) {
            Ok(m) => m,
            // No admissible level up to the horizon, hence none below depth.
            Err(GrowthError::HorizonTooSmall { .. }) if horizon + 1 >= depth => break,
            Err(e) => return Err(e.into()),
        };
        let count = b.sys.level_word_count(t);
        let mut idx = BigUint::from(0u32);
        while idx < count {
            if done == capture_budget {
                break 'levels;
            }
            let target = b.sys.element_at(t, &idx)?;
            match b.capture_with_mu(&target, mu, true) {
                Ok(_) => done += 1,
                Err(BuildError::DepthExceeded { .. }) => break 'levels,
                Err(e) => return Err(e),
            }
            idx += 1u32;
        }
    }
    b.fill_to(depth)?;
    Ok(b.finish())
}
