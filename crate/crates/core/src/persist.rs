//! Versioned JSON documents for level systems.
//!
//! Only choice tuples are stored. Loading re-expands every member, checks
//! sizes against the growth function and verifies the capture log, so a
//! document that passes [`load_system`] describes a valid system.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construction::system::expand_with;
use crate::construction::{Alphabet, BuildMode, CSet, CaptureLog, Chooser, LevelSystem, WordRef};
use crate::growthfn::{Family, GrowthFunction};

pub const FORMAT: &str = "growthforge-system";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed system document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("digest mismatch: recorded {recorded}, computed {computed}")]
    DigestMismatch { recorded: String, computed: String },
    #[error("unsupported document {format} version {version}")]
    Version { format: String, version: u32 },
    #[error("invalid system: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Body {
    format: String,
    version: u32,
    family: Family,
    chooser: Chooser,
    build: BuildMode,
    alphabet: Vec<char>,
    depth: u32,
    levels: Vec<Vec<WordRef>>,
    capture_log: CaptureLog,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Document {
    #[serde(flatten)]
    body: Body,
    digest: String,
}

fn body_of(sys: &LevelSystem) -> Body {
    Body {
        format: FORMAT.to_string(),
        version: VERSION,
        family: sys.growth().family().clone(),
        chooser: sys.chooser(),
        build: sys.mode().clone(),
        alphabet: sys.alphabet().names().to_vec(),
        depth: sys.depth(),
        levels: sys.csets().iter().map(|c| c.members().to_vec()).collect(),
        capture_log: sys.capture_log().clone(),
    }
}

fn digest_of(body: &Body) -> String {
    let canonical = serde_json::to_vec(body).expect("serializable");
    hex::encode(Sha256::digest(canonical))
}

/// SHA-256 of the canonical document body.
pub fn system_digest(sys: &LevelSystem) -> String {
    digest_of(&body_of(sys))
}

/// Pretty-printed document with a trailing newline. Identical systems give
/// identical bytes.
pub fn to_json(sys: &LevelSystem) -> String {
    let body = body_of(sys);
    let digest = digest_of(&body);
    let mut s = serde_json::to_string_pretty(&Document { body, digest }).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<LevelSystem, PersistError> {
    let doc: Document = serde_json::from_str(text)?;
    let computed = digest_of(&doc.body);
    if computed != doc.digest {
        return Err(PersistError::DigestMismatch {
            recorded: doc.digest,
            computed,
        });
    }
    rebuild(doc.body)
}

pub fn save_system(sys: &LevelSystem, path: &Path) -> Result<(), PersistError> {
    std::fs::write(path, to_json(sys))?;
    Ok(())
}

pub fn load_system(path: &Path) -> Result<LevelSystem, PersistError> {
    from_json(&std::fs::read_to_string(path)?)
}

fn rebuild(body: Body) -> Result<LevelSystem, PersistError> {
    let invalid = |m: String| PersistError::Invalid(m);
    if body.format != FORMAT || body.version != VERSION {
        return Err(PersistError::Version {
            format: body.format,
            version: body.version,
        });
    }
    if body.levels.len() != body.depth as usize {
        return Err(invalid(format!(
            "depth {} but {} levels stored",
            body.depth,
            body.levels.len()
        )));
    }
    let growth = GrowthFunction::new(body.family).map_err(|e| invalid(e.to_string()))?;
    let alphabet = Alphabet::named(body.alphabet).map_err(|e| invalid(e.to_string()))?;
    let d = growth.eval(1).map_err(|e| invalid(e.to_string()))?;
    if d != alphabet.size().into() {
        return Err(invalid(format!("alphabet has {} letters, f(1) = {d}", alphabet.size())));
    }
    let mut csets: Vec<CSet> = Vec::with_capacity(body.levels.len());
    for (i, members) in body.levels.into_iter().enumerate() {
        let level = i as u32;
        let r = growth.ratio(level).map_err(|e| invalid(e.to_string()))?;
        if r != members.len().into() {
            return Err(invalid(format!(
                "level {level} holds {} members, expected {r}",
                members.len()
            )));
        }
        let mut radices: Vec<u64> = (0..level).rev().map(|j| csets[j as usize].len() as u64).collect();
        radices.push(alphabet.size() as u64);
        for m in &members {
            let ok = m.level() == level && m.choices().iter().zip(&radices).all(|(&c, &r)| (c as u64) < r);
            if !ok {
                return Err(invalid(format!("{m} is not an element of W(2^{level})")));
            }
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("level {level} members are not strictly increasing")));
        }
        let strings = members.iter().map(|m| expand_with(&csets, m)).collect();
        csets.push(CSet::new(level, members, strings));
    }
    let sys = LevelSystem {
        growth,
        alphabet,
        csets,
        chooser: body.chooser,
        mode: body.build,
        capture_log: body.capture_log,
    };
    for e in &sys.capture_log().entries {
        if e.capture_level >= sys.depth() || !sys.is_valid_ref(&e.target) {
            return Err(invalid(format!("capture of {} is out of range", e.target)));
        }
        let target = sys.expand(&e.target).map_err(|e| invalid(e.to_string()))?;
        if sys.alphabet().render(&target) != e.target_word || e.gap_bound != 1u64 << (e.capture_level + 1) {
            return Err(invalid(format!("capture entry for {} is inconsistent", e.target)));
        }
        if !sys.cset(e.capture_level).strings().iter().all(|s| s.ends_with(&target)) {
            return Err(invalid(format!(
                "C(2^{}) does not end with captured {}",
                e.capture_level, e.target_word
            )));
        }
    }
    Ok(sys)
}
