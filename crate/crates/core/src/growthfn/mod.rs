//! Growth functions `f: N -> N` evaluated exactly, plus the finite-horizon
//! checkers for the hypotheses the level-system construction places on `f`.

mod hypotheses;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::{ceil_div, log2_bracket, rational_from_uint, Ratio};

pub use hypotheses::{
    check_basic, check_capture_conditions, check_rapid_growth, compute_mu, BasicReport, BetaEntry,
    CaptureConditionsReport, CheckOutcome, MarginEntry, RapidGrowthReport, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrowthError {
    #[error("argument {0} is not covered by the table")]
    UncoveredArgument(u64),
    #[error("argument must be at least 1")]
    ZeroArgument,
    #[error("invalid growth function parameter: {0}")]
    InvalidParameter(String),
    #[error("no mu({t}) with offset {offset} found up to horizon {horizon}")]
    HorizonTooSmall { t: u32, offset: u32, horizon: u32 },
}

/// The named families from the registry. Parameters are exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `⌈(1+ε)^n⌉`
    Geometric { epsilon: Ratio },
    /// `⌈n(1+ε)^n⌉`
    PolyGeometric { epsilon: Ratio },
    /// `⌈(1+ε)^n / n⌉`
    SharpPaper { epsilon: Ratio },
    /// `⌈2^(n^r)⌉`
    ExpPower { r: Ratio },
    /// Explicit values; typically given at 1, 2, 4, …, 2^H.
    Table {
        #[serde(with = "table_serde")]
        values: BTreeMap<u64, BigUint>,
    },
}

impl Family {
    pub fn geometric(epsilon: Ratio) -> Self {
        Family::Geometric { epsilon }
    }

    pub fn poly_geometric(epsilon: Ratio) -> Self {
        Family::PolyGeometric { epsilon }
    }

    pub fn sharp_paper(epsilon: Ratio) -> Self {
        Family::SharpPaper { epsilon }
    }

    pub fn exp_power(r: Ratio) -> Self {
        Family::ExpPower { r }
    }

    /// Table with `values[i]` at argument `2^i`.
    pub fn dyadic_table(values: &[u64]) -> Self {
        Family::Table {
            values: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (1u64 << i, BigUint::from(v)))
                .collect(),
        }
    }

    pub fn table<I: IntoIterator<Item = (u64, u64)>>(entries: I) -> Self {
        Family::Table {
            values: entries.into_iter().map(|(n, v)| (n, BigUint::from(v))).collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Geometric { .. } => "geometric",
            Family::PolyGeometric { .. } => "poly_geometric",
            Family::SharpPaper { .. } => "sharp_paper",
            Family::ExpPower { .. } => "exp_power",
            Family::Table { .. } => "table",
        }
    }

    /// ε for the families of the form `(1+ε)^n` up to polynomial factors.
    pub fn epsilon(&self) -> Option<&Ratio> {
        match self {
            Family::Geometric { epsilon } | Family::PolyGeometric { epsilon } | Family::SharpPaper { epsilon } => {
                Some(epsilon)
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), GrowthError> {
        match self {
            Family::Geometric { epsilon } | Family::PolyGeometric { epsilon } | Family::SharpPaper { epsilon } => {
                if !epsilon.is_positive() {
                    return Err(GrowthError::InvalidParameter(format!(
                        "epsilon must be positive, got {epsilon}"
                    )));
                }
            }
            Family::ExpPower { r } => {
                if !r.is_positive() {
                    return Err(GrowthError::InvalidParameter(format!("r must be positive, got {r}")));
                }
            }
            Family::Table { values } => {
                if values.is_empty() {
                    return Err(GrowthError::InvalidParameter("empty table".into()));
                }
                if values.contains_key(&0) {
                    return Err(GrowthError::InvalidParameter("table arguments start at 1".into()));
                }
                if values.values().any(|v| v.is_zero()) {
                    return Err(GrowthError::InvalidParameter("table values must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Geometric { epsilon } => write!(f, "geometric(eps={epsilon})"),
            Family::PolyGeometric { epsilon } => write!(f, "poly_geometric(eps={epsilon})"),
            Family::SharpPaper { epsilon } => write!(f, "sharp_paper(eps={epsilon})"),
            Family::ExpPower { r } => write!(f, "exp_power(r={r})"),
            Family::Table { values } => {
                write!(f, "table(")?;
                for (i, (n, v)) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{n}:{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

mod table_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BTreeMap<u64, BigUint>, s: S) -> Result<S::Ok, S::Error> {
        // Pairs rather than a string-keyed map, which would sort "16" before "2".
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (k, v) in v {
            seq.serialize_element(&(k, v.to_string()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, BigUint>, D::Error> {
        let raw: Vec<(u64, String)> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| v.parse::<BigUint>().map(|v| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// An evaluable growth function with an internal memo.
///
/// Evaluation is pure; the memo only caches exact results, so sharing a
/// `GrowthFunction` across threads is safe.
pub struct GrowthFunction {
    family: Family,
    memo: Mutex<HashMap<u64, BigUint>>,
    use_memo: bool,
}

impl Clone for GrowthFunction {
    fn clone(&self) -> Self {
        GrowthFunction {
            family: self.family.clone(),
            memo: Mutex::new(self.memo.lock().unwrap().clone()),
            use_memo: self.use_memo,
        }
    }
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFunction").field("family", &self.family).finish()
    }
}

impl GrowthFunction {
    pub fn new(family: Family) -> Result<Self, GrowthError> {
        family.validate()?;
        Ok(GrowthFunction {
            family,
            memo: Mutex::new(HashMap::new()),
            use_memo: true,
        })
    }

    /// Same function with memoization disabled.
    pub fn without_memo(family: Family) -> Result<Self, GrowthError> {
        let mut g = Self::new(family)?;
        g.use_memo = false;
        Ok(g)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Exact `f(n)`.
    pub fn eval(&self, n: u64) -> Result<BigUint, GrowthError> {
        if n == 0 {
            return Err(GrowthError::ZeroArgument);
        }
        if self.use_memo {
            if let Some(v) = self.memo.lock().unwrap().get(&n) {
                return Ok(v.clone());
            }
        }
        let v = self.compute(n)?;
        if self.use_memo {
            self.memo.lock().unwrap().insert(n, v.clone());
        }
        Ok(v)
    }

    fn compute(&self, n: u64) -> Result<BigUint, GrowthError> {
        let one_plus = |eps: &Ratio| eps.value() + BigRational::one();
        Ok(match &self.family {
            Family::Geometric { epsilon } => {
                let base = one_plus(epsilon);
                ceil_div(
                    &Pow::pow(base.numer().magnitude(), n),
                    &Pow::pow(base.denom().magnitude(), n),
                )
            }
            Family::PolyGeometric { epsilon } => {
                let base = one_plus(epsilon);
                ceil_div(
                    &(Pow::pow(base.numer().magnitude(), n) * n),
                    &Pow::pow(base.denom().magnitude(), n),
                )
            }
            Family::SharpPaper { epsilon } => {
                let base = one_plus(epsilon);
                ceil_div(
                    &Pow::pow(base.numer().magnitude(), n),
                    &(Pow::pow(base.denom().magnitude(), n) * n),
                )
            }
            Family::ExpPower { r } => exp_power_ceil(n, r.value()),
            Family::Table { values } => values.get(&n).cloned().ok_or(GrowthError::UncoveredArgument(n))?,
        })
    }

    /// `f(2^level)`.
    pub fn eval_dyadic(&self, level: u32) -> Result<BigUint, GrowthError> {
        self.eval(dyadic(level))
    }

    /// `r_i = ⌈f(2^(i+1)) / f(2^i)⌉`, the required size of `C(2^i)`.
    pub fn ratio(&self, level: u32) -> Result<BigUint, GrowthError> {
        let lo = self.eval_dyadic(level)?;
        let hi = self.eval_dyadic(level + 1)?;
        Ok(ceil_div(&hi, &lo))
    }

    /// The unrounded quotient `f(2^(i+1)) / f(2^i)`.
    pub fn exact_ratio(&self, level: u32) -> Result<BigRational, GrowthError> {
        let lo = self.eval_dyadic(level)?;
        let hi = self.eval_dyadic(level + 1)?;
        Ok(rational_from_uint(&hi) / rational_from_uint(&lo))
    }

    /// Whether `n` can be evaluated (always true outside tables).
    pub fn covers(&self, n: u64) -> bool {
        match &self.family {
            Family::Table { values } => values.contains_key(&n),
            _ => n >= 1,
        }
    }

    pub(crate) fn covered_up_to(&self, horizon: u64) -> Vec<u64> {
        match &self.family {
            Family::Table { values } => values.range(1..=horizon).map(|(k, _)| *k).collect(),
            _ => (1..=horizon).collect(),
        }
    }
}

pub(crate) fn dyadic(level: u32) -> u64 {
    assert!(level < 64, "dyadic level {level} out of range");
    1u64 << level
}

/// `⌈2^(n^r)⌉` for rational `r > 0`.
///
/// When `x = n^r` is an integer the answer is `2^x`. Otherwise `2^x` is
/// irrational, so the ceiling is `floor(2^x) + 1`, and `floor(2^x)` is the
/// largest `M` in `[2^⌊x⌋, 2^(⌊x⌋+1))` with `log2 M < x`; the comparisons
/// use rigorous brackets on both sides and never tie.
fn exp_power_ceil(n: u64, r: &BigRational) -> BigUint {
    let p = r.numer().to_u32().expect("exponent numerator fits u32");
    let q = r.denom().to_u32().expect("exponent denominator fits u32");
    let base = BigUint::from(n).pow(p);
    let k = base.nth_root(q);
    if Pow::pow(&k, q) == base {
        let k = k.to_u64().expect("exponent too large");
        return BigUint::one() << k as usize;
    }
    // x ∈ (k, k+1)
    let mut precision: u32 = 64;
    loop {
        if let Some(m) = exp_floor_search(&base, q, &k, precision) {
            return m + 1u32;
        }
        precision += 64;
        assert!(precision < 1 << 14, "exp_power bracket failed to separate");
    }
}

fn exp_floor_search(base: &BigUint, q: u32, k: &BigUint, precision: u32) -> Option<BigUint> {
    // x ∈ [a / 2^Q, (a+1) / 2^Q]
    let a = (base << (q as usize * precision as usize)).nth_root(q);
    let scale = BigInt::one() << precision as usize;
    let x_lo = BigRational::new(BigInt::from(a.clone()), scale.clone());
    let x_hi = BigRational::new(BigInt::from(a + 1u32), scale);
    let k = k.to_u64()? as usize;
    let iterations = precision + k as u32 + 8;
    // Invariant: log2(lo) < x, log2(hi) > x.
    let mut lo = BigUint::one() << k;
    let mut hi = BigUint::one() << (k + 1);
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        let (l, h) = log2_bracket(&rational_from_uint(&mid), iterations);
        if h < x_lo {
            lo = mid;
        } else if l > x_hi {
            hi = mid;
        } else {
            return None;
        }
    }
    Some(lo)
}
