use serde::{Deserialize, Serialize};

use super::{factor_set_structural, max_safe_length, AnalyzeError, FactorSet};
use crate::construction::LevelSystem;

/// Minimal forbidden words up to a length, valid at one depth only: a deeper
/// build may revive any of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenWords {
    pub depth: u32,
    pub max_len: usize,
    pub label: String,
    pub words: Vec<String>,
}

/// Words `w` with `|w| <= max_len`, absent from the factor language at this
/// depth, whose two maximal proper factors are both present.
pub fn minimal_forbidden_words(sys: &LevelSystem, max_len: usize) -> Result<ForbiddenWords, AnalyzeError> {
    let depth = sys.depth();
    if max_len == 0 || max_len > max_safe_length(depth) {
        return Err(AnalyzeError::DepthTooShallow { n: max_len, depth });
    }
    let d = sys.alphabet().size() as u8;
    let mut words = Vec::new();
    let mut prev: Option<FactorSet> = None;
    for n in 1..=max_len {
        let cur = factor_set_structural(sys, n)?;
        match &prev {
            None => {
                for l in 0..d {
                    if !cur.contains(&[l]) {
                        words.push(vec![l]);
                    }
                }
            }
            Some(p) => {
                for head in p.iter() {
                    let mut w = head;
                    w.push(0);
                    for l in 0..d {
                        *w.last_mut().expect("nonempty") = l;
                        if p.contains(&w[1..]) && !cur.contains(&w) {
                            words.push(w.clone());
                        }
                    }
                }
            }
        }
        prev = Some(cur);
    }
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(ForbiddenWords {
        depth,
        max_len,
        label: format!("forbidden at depth {depth}"),
        words: words.iter().map(|w| sys.alphabet().render(w)).collect(),
    })
}
