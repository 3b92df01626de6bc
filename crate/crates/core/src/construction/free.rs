use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};

use super::builder::{Constraint, SystemBuilder};
use super::{Alphabet, BuildError, BuildMode, Chooser, LevelSystem, WordRef};
use crate::freesub::{free_params, FreeParams};
use crate::growthfn::{Family, GrowthFunction};
use crate::numeric::Ratio;

/// Largest number of generator products forced into one level.
const MAX_FORCED: usize = 1 << 16;

/// Builds a system over `{x, y}` for `f(n) = ⌈(1+ε)^n⌉` in which
/// `X = x^(2^t)` and `Y = y^(2^t)` generate a free subalgebra: every product
/// of `2^r` letters over `{X, Y}` is forced into `C(2^(t+r))`.
pub fn build_free_power_system(epsilon: Ratio, depth: u32) -> Result<(LevelSystem, FreeParams), BuildError> {
    let growth = GrowthFunction::new(Family::geometric(epsilon.clone()))?;
    let params = free_params(&epsilon, depth).map_err(|e| BuildError::Invalid(e.to_string()))?;
    let t = params.t;
    if growth.eval(1)? != BigUint::from(2u32) {
        return Err(BuildError::Invalid("f(1) must be 2".into()));
    }
    let mut b = SystemBuilder::with_alphabet(growth, Alphabet::named(vec!['x', 'y'])?, Chooser::Lex, depth)?;
    b.set_mode(BuildMode::Free {
        epsilon: epsilon.clone(),
    });
    for i in 0..depth {
        let required = b.required_size(i)?;
        let count = forced_count(i, t);
        if count > required {
            return Err(BuildError::CapacityExceeded {
                level: i,
                required: count,
                available: required,
            });
        }
        let forced = forced_words(i, t, &count)?;
        let refs = forced
            .iter()
            .map(|w| {
                b.sys
                    .locate(w)
                    .ok_or_else(|| BuildError::InvalidRef(format!("{} is not in W(2^{i})", b.sys.alphabet.render(w))))
            })
            .collect::<Result<Vec<WordRef>, _>>()?;
        b.choose_cset(i, &Constraint::MustInclude(refs))?;
    }
    Ok((b.finish(), params))
}

fn forced_count(level: u32, t: u32) -> BigUint {
    if level <= t {
        BigUint::from(2u32)
    } else {
        Pow::pow(BigUint::from(2u32), 1u64 << (level - t))
    }
}

/// Words that `C(2^level)` must contain.
fn forced_words(level: u32, t: u32, count: &BigUint) -> Result<Vec<Vec<u8>>, BuildError> {
    let len = 1usize << level;
    if level <= t {
        return Ok(vec![vec![0u8; len], vec![1u8; len]]);
    }
    let r = level - t;
    let n = count
        .to_usize()
        .filter(|&n| n <= MAX_FORCED)
        .ok_or(BuildError::CSetTooLarge {
            level,
            size: count.clone(),
        })?;
    let blocks = 1usize << r;
    let block = 1usize << t;
    Ok((0..n)
        .map(|bits| {
            let mut w = Vec::with_capacity(len);
            for k in 0..blocks {
                let letter = ((bits >> (blocks - 1 - k)) & 1) as u8;
                w.extend(std::iter::repeat_n(letter, block));
            }
            w
        })
        .collect())
}
