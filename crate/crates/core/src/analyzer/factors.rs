use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{max_safe_length, AnalyzeError};
use crate::construction::LevelSystem;

/// Environment variable capping brute-force expansion, in letters.
pub const BUDGET_ENV: &str = "GROWTHFORGE_BUDGET";
pub const DEFAULT_BUDGET: u128 = 1 << 28;

pub fn default_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bruteforce,
    Structural,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Bruteforce => write!(f, "bruteforce"),
            Method::Structural => write!(f, "structural"),
        }
    }
}

#[derive(Clone, Debug)]
enum Storage {
    /// `bits` per letter, first letter most significant.
    Packed(Vec<u128>),
    Words(Vec<Vec<u8>>),
}

/// The distinct factors of length `n` of `W(2^depth)`, sorted
/// lexicographically.
#[derive(Clone, Debug)]
pub struct FactorSet {
    n: usize,
    depth: u32,
    method: Method,
    bits: u32,
    storage: Storage,
}

impl FactorSet {
    fn from_words(n: usize, depth: u32, method: Method, bits: u32, words: impl IntoIterator<Item = Vec<u8>>) -> Self {
        let storage = if fits(n, bits) {
            let mut keys: Vec<u128> = words.into_iter().map(|w| u128::encode(&w, bits)).collect();
            keys.sort_unstable();
            keys.dedup();
            Storage::Packed(keys)
        } else {
            let mut ws: Vec<Vec<u8>> = words.into_iter().collect();
            ws.sort_unstable();
            ws.dedup();
            Storage::Words(ws)
        };
        FactorSet {
            n,
            depth,
            method,
            bits,
            storage,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        match &self.storage {
            Storage::Packed(k) => k.len(),
            Storage::Words(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        if word.len() != self.n || word.iter().any(|&l| (l as u32) >> self.bits != 0) {
            return false;
        }
        match &self.storage {
            Storage::Packed(k) => k.binary_search(&u128::encode(word, self.bits)).is_ok(),
            Storage::Words(w) => w.binary_search_by(|x| x.as_slice().cmp(word)).is_ok(),
        }
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = Vec<u8>> + '_> {
        match &self.storage {
            Storage::Packed(k) => Box::new(k.iter().map(move |key| key.decode(self.n, self.bits))),
            Storage::Words(w) => Box::new(w.iter().cloned()),
        }
    }

    pub fn words(&self) -> Vec<Vec<u8>> {
        self.iter().collect()
    }

    /// Set equality, ignoring method and depth stamps.
    pub fn same_words(&self, other: &FactorSet) -> bool {
        if self.n != other.n || self.len() != other.len() {
            return false;
        }
        match (&self.storage, &other.storage) {
            (Storage::Packed(a), Storage::Packed(b)) if self.bits == other.bits => a == b,
            _ => self.iter().eq(other.iter()),
        }
    }

    pub fn is_subset(&self, other: &FactorSet) -> bool {
        self.n == other.n && self.iter().all(|w| other.contains(&w))
    }
}

fn fits(n: usize, bits: u32) -> bool {
    n as u128 * bits as u128 <= 128
}

/// A fixed-length word encoding that supports concatenation.
trait Key: Clone + Eq + Hash + Send + Sync {
    fn encode(word: &[u8], bits: u32) -> Self;
    fn join(hi: &Self, lo: &Self, lo_len: usize, bits: u32) -> Self;
    fn decode(&self, len: usize, bits: u32) -> Vec<u8>;
}

impl Key for u128 {
    fn encode(word: &[u8], bits: u32) -> Self {
        word.iter().fold(0u128, |acc, &l| (acc << bits) | l as u128)
    }

    fn join(hi: &Self, lo: &Self, lo_len: usize, bits: u32) -> Self {
        let shift = lo_len as u32 * bits;
        if shift >= 128 {
            *lo
        } else {
            (hi << shift) | lo
        }
    }

    fn decode(&self, len: usize, bits: u32) -> Vec<u8> {
        let mask = (1u128 << bits) - 1;
        (0..len)
            .rev()
            .map(|i| ((self >> (i as u32 * bits)) & mask) as u8)
            .collect()
    }
}

impl Key for Vec<u8> {
    fn encode(word: &[u8], _bits: u32) -> Self {
        word.to_vec()
    }

    fn join(hi: &Self, lo: &Self, _lo_len: usize, _bits: u32) -> Self {
        let mut w = Vec::with_capacity(hi.len() + lo.len());
        w.extend_from_slice(hi);
        w.extend_from_slice(lo);
        w
    }

    fn decode(&self, _len: usize, _bits: u32) -> Vec<u8> {
        self.clone()
    }
}

/// Collects every length-`n` window of every element of `W(2^j)`, `j <= D`,
/// by full expansion. Budget from [`BUDGET_ENV`].
pub fn factor_set_bruteforce(sys: &LevelSystem, n: usize) -> Result<FactorSet, AnalyzeError> {
    factor_set_bruteforce_with_budget(sys, n, default_budget())
}

pub fn factor_set_bruteforce_with_budget(sys: &LevelSystem, n: usize, budget: u128) -> Result<FactorSet, AnalyzeError> {
    if n == 0 {
        return Err(AnalyzeError::Precondition("factor length must be positive".into()));
    }
    let depth = sys.depth();
    let required = (0..=depth)
        .map(|j| {
            let count = sys.level_word_count(j).to_u128().unwrap_or(u128::MAX);
            count.saturating_mul(1u128 << j)
        })
        .fold(0u128, u128::saturating_add);
    if required > budget {
        return Err(AnalyzeError::BudgetExceeded { required, budget });
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    for j in 0..=depth {
        if (1usize << j) < n {
            continue;
        }
        for r in sys.elements(j) {
            let word = sys.expand(&r)?;
            for w in word.windows(n) {
                if !seen.contains(w) {
                    seen.insert(w.to_vec());
                }
            }
        }
    }
    Ok(FactorSet::from_words(
        n,
        depth,
        Method::Bruteforce,
        sys.alphabet().bits_per_letter(),
        seen,
    ))
}

/// Same set as [`factor_set_bruteforce`], assembled from choice-set strings:
/// windows inside choice sets, plus for each level `j` every suffix of a
/// `C(2^j)` member followed by a prefix of an element of `W(2^j)`.
pub fn factor_set_structural(sys: &LevelSystem, n: usize) -> Result<FactorSet, AnalyzeError> {
    if n == 0 {
        return Err(AnalyzeError::Precondition("factor length must be positive".into()));
    }
    let depth = sys.depth();
    if n > max_safe_length(depth) {
        return Err(AnalyzeError::DepthTooShallow { n, depth });
    }
    let bits = sys.alphabet().bits_per_letter();
    let storage = if fits(n, bits) {
        let mut keys: Vec<u128> = structural::<u128>(sys, n, bits).into_iter().collect();
        keys.par_sort_unstable();
        Storage::Packed(keys)
    } else {
        let mut words: Vec<Vec<u8>> = structural::<Vec<u8>>(sys, n, bits).into_iter().collect();
        words.par_sort_unstable();
        Storage::Words(words)
    };
    Ok(FactorSet {
        n,
        depth,
        method: Method::Structural,
        bits,
        storage,
    })
}

fn structural<K: Key>(sys: &LevelSystem, n: usize, bits: u32) -> HashSet<K> {
    let depth = sys.depth();
    let mut prefixes = Prefixes::<K>::new(sys, bits);
    let mut tasks: Vec<(u32, usize, std::sync::Arc<Vec<K>>)> = Vec::new();
    for j in 0..depth {
        let half = 1usize << j;
        let lo = n.saturating_sub(half).max(1);
        let hi = (n - 1).min(half);
        for a in lo..=hi {
            tasks.push((j, a, prefixes.get(j, n - a)));
        }
    }

    let straddles = tasks
        .par_iter()
        .fold(HashSet::new, |mut acc: HashSet<K>, (j, a, pref)| {
            let mut suffixes: Vec<&[u8]> = sys.cset(*j).strings().iter().map(|s| &s[s.len() - a..]).collect();
            suffixes.sort_unstable();
            suffixes.dedup();
            for s in suffixes {
                let head = K::encode(s, bits);
                for p in pref.iter() {
                    acc.insert(K::join(&head, p, n - a, bits));
                }
            }
            acc
        });

    let windows = (0..depth)
        .filter(|&j| (1usize << j) >= n)
        .flat_map(|j| sys.cset(j).strings().iter())
        .collect::<Vec<_>>()
        .into_par_iter()
        .fold(HashSet::new, |mut acc: HashSet<K>, s| {
            for w in s.windows(n) {
                acc.insert(K::encode(w, bits));
            }
            acc
        });

    let mut out = straddles.chain(windows).reduce(HashSet::new, merge);
    if n == 1 {
        for l in 0..sys.alphabet().size() as u8 {
            out.insert(K::encode(&[l], bits));
        }
    }
    out
}

fn merge<K: Key>(mut a: HashSet<K>, mut b: HashSet<K>) -> HashSet<K> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    a.extend(b);
    a
}

/// Memoized distinct length-`m` prefixes of elements of `W(2^j)`.
struct Prefixes<'a, K> {
    sys: &'a LevelSystem,
    bits: u32,
    memo: HashMap<(u32, usize), std::sync::Arc<Vec<K>>>,
}

impl<'a, K: Key> Prefixes<'a, K> {
    fn new(sys: &'a LevelSystem, bits: u32) -> Self {
        Prefixes {
            sys,
            bits,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, j: u32, m: usize) -> std::sync::Arc<Vec<K>> {
        debug_assert!(m >= 1 && m <= 1usize << j);
        if let Some(v) = self.memo.get(&(j, m)) {
            return v.clone();
        }
        let bits = self.bits;
        let v: Vec<K> = if j == 0 {
            (0..self.sys.alphabet().size() as u8)
                .map(|l| K::encode(&[l], bits))
                .collect()
        } else {
            let half = 1usize << (j - 1);
            let strings = self.sys.cset(j - 1).strings();
            if m <= half {
                let mut heads: Vec<&[u8]> = strings.iter().map(|s| &s[..m]).collect();
                heads.sort_unstable();
                heads.dedup();
                heads.into_iter().map(|h| K::encode(h, bits)).collect()
            } else {
                let rest = self.get(j - 1, m - half);
                let mut out = Vec::with_capacity(strings.len() * rest.len());
                for s in strings {
                    let head = K::encode(s, bits);
                    for p in rest.iter() {
                        out.push(K::join(&head, p, m - half, bits));
                    }
                }
                out
            }
        };
        let v = std::sync::Arc::new(v);
        self.memo.insert((j, m), v.clone());
        v
    }
}
