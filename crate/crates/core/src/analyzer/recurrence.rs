use serde::{Deserialize, Serialize};

use super::{AnalyzeError, Verdict};
use crate::construction::LevelSystem;

/// Occurrence statistics of one pattern in one word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapScan {
    pub occurrences: usize,
    /// Start of the first occurrence, `None` if absent.
    pub first: Option<usize>,
    /// Largest difference between consecutive occurrence starts.
    pub max_gap: usize,
}

impl GapScan {
    pub fn within(&self, bound: usize) -> bool {
        matches!(self.first, Some(f) if f <= bound) && self.max_gap <= bound
    }
}

/// Scans every (possibly overlapping) occurrence of `pattern` in `word`.
pub fn scan_gaps(word: &[u8], pattern: &[u8]) -> GapScan {
    let mut scan = GapScan::default();
    if pattern.is_empty() || pattern.len() > word.len() {
        return scan;
    }
    let mut last: Option<usize> = None;
    for (i, w) in word.windows(pattern.len()).enumerate() {
        if w == pattern {
            scan.occurrences += 1;
            match last {
                None => scan.first = Some(i),
                Some(prev) => scan.max_gap = scan.max_gap.max(i - prev),
            }
            last = Some(i);
        }
    }
    scan
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceEntry {
    pub target: String,
    pub capture_level: u32,
    pub gap_bound: u64,
    pub max_gap: u64,
    pub max_first_offset: u64,
    pub elements_scanned: u64,
    /// Levels where a sample was scanned instead of every element.
    pub sampled_levels: Vec<u32>,
    pub violations: u64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub depth: u32,
    pub scan_cap: usize,
    pub seed: u64,
    pub entries: Vec<RecurrenceEntry>,
    /// Recurrence is certified only for the captured words.
    pub scope: String,
    pub verdict: Verdict,
}

/// For each captured word `w` with bound `c_w = 2^(n_w+1)`, scans elements
/// of `W(2^m)` for `n_w < m <= D` (all of them, or a seeded sample of
/// `scan_cap` per level) and checks that the first occurrence starts within
/// `c_w` and consecutive occurrences start at most `c_w` apart.
pub fn verify_recurrence_gaps(sys: &LevelSystem, scan_cap: usize, seed: u64) -> Result<RecurrenceReport, AnalyzeError> {
    if scan_cap == 0 {
        return Err(AnalyzeError::Precondition("scan cap must be positive".into()));
    }
    let mut entries = Vec::new();
    for cap in &sys.capture_log().entries {
        let pattern = sys.expand(&cap.target)?;
        let bound = cap.gap_bound as usize;
        let mut entry = RecurrenceEntry {
            target: cap.target_word.clone(),
            capture_level: cap.capture_level,
            gap_bound: cap.gap_bound,
            max_gap: 0,
            max_first_offset: 0,
            elements_scanned: 0,
            sampled_levels: Vec::new(),
            violations: 0,
            verdict: Verdict::Pass,
        };
        for m in cap.capture_level + 1..=sys.depth() {
            let count = sys.level_word_count(m);
            if count > scan_cap.into() {
                entry.sampled_levels.push(m);
            }
            let elements = sys.sample_elements(m, scan_cap, seed);
            for r in &elements {
                let word = sys.expand(r)?;
                let scan = scan_gaps(&word, &pattern);
                entry.elements_scanned += 1;
                entry.max_gap = entry.max_gap.max(scan.max_gap as u64);
                match scan.first {
                    Some(f) => entry.max_first_offset = entry.max_first_offset.max(f as u64),
                    None => entry.max_first_offset = u64::MAX,
                }
                if !scan.within(bound) {
                    entry.violations += 1;
                }
            }
        }
        entry.verdict = Verdict::from_bool(entry.violations == 0);
        entries.push(entry);
    }
    let ok = entries.iter().all(|e| e.verdict.passed());
    Ok(RecurrenceReport {
        depth: sys.depth(),
        scan_cap,
        seed,
        entries,
        scope: "uniformly recurrent up to captured set".to_string(),
        verdict: Verdict::from_bool(ok),
    })
}
