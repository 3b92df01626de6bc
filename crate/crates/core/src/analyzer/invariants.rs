//! Structural properties every level system must satisfy. Each check
//! returns an outcome with the first counterexample rather than panicking.

use serde::{Deserialize, Serialize};

use super::{factor_set_structural, max_safe_length, AnalyzeError, FactorSet};
use crate::construction::LevelSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantOutcome {
    pub name: String,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl InvariantOutcome {
    fn new(name: &str) -> Self {
        InvariantOutcome {
            name: name.to_string(),
            checked: 0,
            counterexample: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Every `(n-1)`-window of a member of `F(n)` lies in `F(n-1)`, for
/// `2 <= n <= n_max`.
pub fn factorial_closedness(sys: &LevelSystem, n_max: usize) -> Result<InvariantOutcome, AnalyzeError> {
    let mut out = InvariantOutcome::new("factorial_closedness");
    let mut prev = factor_set_structural(sys, 1)?;
    for n in 2..=n_max {
        let cur = factor_set_structural(sys, n)?;
        for w in cur.iter() {
            out.checked += 1;
            if !prev.contains(&w[..n - 1]) || !prev.contains(&w[1..]) {
                out.counterexample = Some(sys.alphabet().render(&w));
                return Ok(out);
            }
        }
        prev = cur;
    }
    Ok(out)
}

/// `dim_{n+m} <= dim_n · dim_m` for all `n + m <= dims.len()`.
pub fn submultiplicativity(dims: &[u64]) -> InvariantOutcome {
    let mut out = InvariantOutcome::new("submultiplicativity");
    let len = dims.len();
    for n in 1..=len {
        for m in n..=len - n {
            out.checked += 1;
            if dims[n + m - 1] as u128 > dims[n - 1] as u128 * dims[m - 1] as u128 {
                out.counterexample = Some(format!("n={n}, m={m}"));
                return out;
            }
        }
    }
    out
}

/// `F_{D-1}(n) ⊆ F_D(n)` for `n <= 2^(D-2)`, comparing the system with its
/// own truncation.
pub fn depth_monotonicity(sys: &LevelSystem, n_max: usize) -> Result<InvariantOutcome, AnalyzeError> {
    let mut out = InvariantOutcome::new("depth_monotonicity");
    if sys.depth() < 2 {
        return Err(AnalyzeError::Precondition("depth monotonicity needs depth >= 2".into()));
    }
    let shallow = sys.truncated(sys.depth() - 1);
    let limit = n_max.min(max_safe_length(shallow.depth()));
    for n in 1..=limit {
        let small = factor_set_structural(&shallow, n)?;
        let large = factor_set_structural(sys, n)?;
        out.checked += small.len() as u64;
        let missing = small.iter().find(|w| !large.contains(w));
        if let Some(w) = missing {
            out.counterexample = Some(sys.alphabet().render(&w));
            return Ok(out);
        }
    }
    Ok(out)
}

/// For every element `u` of `W(2^m)`, `m <= max_level`, and every `n < m`,
/// consecutive aligned `2^n`-blocks of `u` form a pair in
/// `C(2^n)W(2^n) ∪ W(2^n)C(2^n)`. Exhaustive, so only for shallow levels.
pub fn chunk_property(sys: &LevelSystem, max_level: u32) -> Result<InvariantOutcome, AnalyzeError> {
    let mut out = InvariantOutcome::new("chunk_property");
    let top = max_level.min(sys.depth());
    for m in 1..=top {
        for r in sys.elements(m) {
            let word = sys.expand(&r)?;
            for n in 0..m {
                let size = 1usize << n;
                let cset = sys.cset(n);
                let blocks: Vec<&[u8]> = word.chunks(size).collect();
                for pair in blocks.windows(2) {
                    out.checked += 1;
                    let (x, y) = (pair[0], pair[1]);
                    let in_w = |b: &[u8]| sys.locate(b).is_some();
                    let cw = cset.position(x).is_some() && in_w(y);
                    let wc = in_w(x) && cset.position(y).is_some();
                    if !(cw || wc) {
                        out.counterexample = Some(format!("{} at block size {size}", sys.alphabet().render(&word)));
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// For `n < 2^(D-1)`, every member of `F(n)` at depth `D-1` has a right
/// extension in `F(n+1)` at depth `D`.
pub fn extension_property(sys: &LevelSystem, n_max: usize) -> Result<InvariantOutcome, AnalyzeError> {
    let mut out = InvariantOutcome::new("extension_property");
    if sys.depth() < 2 {
        return Err(AnalyzeError::Precondition("extension property needs depth >= 2".into()));
    }
    let shallow = sys.truncated(sys.depth() - 1);
    let limit = n_max
        .min(max_safe_length(sys.depth()) - 1)
        .min(max_safe_length(shallow.depth()));
    let d = sys.alphabet().size() as u8;
    for n in 1..=limit {
        let small = factor_set_structural(&shallow, n)?;
        let next: FactorSet = factor_set_structural(sys, n + 1)?;
        for w in small.iter() {
            out.checked += 1;
            let mut ext = w.clone();
            ext.push(0);
            let found = (0..d).any(|l| {
                *ext.last_mut().expect("nonempty") = l;
                next.contains(&ext)
            });
            if !found {
                out.counterexample = Some(sys.alphabet().render(&w));
                return Ok(out);
            }
        }
    }
    Ok(out)
}
