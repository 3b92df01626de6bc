//! Free subalgebras generated by two power monomials `X = x^(2^t)`,
//! `Y = y^(2^t)` in systems of growth `⌈(1+ε)^n⌉`.
//!
//! `X` and `Y` have equal length and differ in their first letter, so they
//! form a code: distinct products substitute to distinct letter strings.
//! Freeness up to a product length is therefore exactly the presence of all
//! substituted strings in the factor language.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analyzer::{dims_up_to, factor_set_structural, max_safe_length, AnalyzeError, Verdict};
use crate::construction::LevelSystem;
use crate::numeric::{approx, log2_bracket, rational_pow, root_floor_scaled, Ratio};

/// Bisection steps for logarithm brackets (width about `2^-40`).
const LOG_ITERATIONS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParams {
    pub epsilon: Ratio,
    pub t: u32,
    /// `(X, Y)` as letter strings.
    pub generators: (String, String),
    /// Deepest `r` such that level `t + r` was built.
    pub r_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FreeParams {
    /// Degree of each generator, `2^t`.
    pub fn degree(&self) -> u64 {
        1u64 << self.t
    }
}

fn check_epsilon(epsilon: &Ratio) -> Result<(), FreeError> {
    let e = epsilon.value();
    if !e.is_zero() && epsilon.is_positive() && e <= &BigRational::one() {
        Ok(())
    } else {
        Err(FreeError::EpsilonOutOfRange(epsilon.to_string()))
    }
}

/// Parameters of the free-generator construction for `f(n) = ⌈(1+ε)^n⌉`
/// at the given build depth.
pub fn free_params(epsilon: &Ratio, depth: u32) -> Result<FreeParams, FreeError> {
    let t = compute_t(epsilon)?;
    let mut warnings = Vec::new();
    if epsilon.value() == &BigRational::one() {
        warnings.push("epsilon = 1 is the boundary case: f(n) = 2^n".to_string());
    }
    Ok(FreeParams {
        epsilon: epsilon.clone(),
        t,
        generators: ("x".repeat(1 << t), "y".repeat(1 << t)),
        r_max: depth.checked_sub(t + 1),
        warnings,
    })
}

/// `1 + k` for the smallest `k >= 0` with `(1+ε)^(2^k) >= 2`, decided by
/// exact repeated squaring.
pub fn compute_t(epsilon: &Ratio) -> Result<u32, FreeError> {
    check_epsilon(epsilon)?;
    let two = BigRational::from_integer(2.into());
    let mut power = BigRational::one() + epsilon.value();
    let mut k = 0u32;
    while power < two {
        power = &power * &power;
        k += 1;
    }
    Ok(k + 1)
}

/// A rational enclosure `lower <= value <= upper`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(skip)]
    pub lower: BigRational,
    #[serde(skip)]
    pub upper: BigRational,
    pub approx: String,
}

impl Bracket {
    fn new(lower: BigRational, upper: BigRational) -> Self {
        let mid = (&lower + &upper) / BigRational::from_integer(2.into());
        Bracket {
            approx: format!("{:.6}", approx(&mid)),
            lower,
            upper,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> f64 {
        approx(&((&self.lower + &self.upper) / BigRational::from_integer(2.into())))
    }

    pub fn contains_within(&self, value: &BigRational, tol: &BigRational) -> bool {
        &(&self.lower - tol) <= value && value <= &(&self.upper + tol)
    }
}

/// `1 / log2(1+ε)`, the least generator degree compatible with entropy
/// `1+ε`.
pub fn degree_lower_bound(epsilon: &Ratio) -> Result<Bracket, FreeError> {
    if !epsilon.is_positive() {
        return Err(FreeError::EpsilonOutOfRange(epsilon.to_string()));
    }
    degree_lower_bound_from_entropy(&(BigRational::one() + epsilon.value()))
}

/// `1 / log2(h)` for an observed entropy `h > 1`.
pub fn degree_lower_bound_from_entropy(h: &BigRational) -> Result<Bracket, FreeError> {
    if h <= &BigRational::one() {
        return Err(FreeError::Precondition(format!("entropy {h} must exceed 1")));
    }
    let (lo, hi) = log2_bracket(h, LOG_ITERATIONS);
    if lo.is_zero() {
        return Err(FreeError::Precondition(format!("entropy {h} too close to 1")));
    }
    Ok(Bracket::new(hi.recip(), lo.recip()))
}

/// `2^t · log2(1+ε)`: achieved degree over the lower bound.
pub fn optimality_ratio(epsilon: &Ratio) -> Result<Bracket, FreeError> {
    let t = compute_t(epsilon)?;
    let (lo, hi) = log2_bracket(&(BigRational::one() + epsilon.value()), LOG_ITERATIONS);
    let scale = BigRational::from_integer((1u64 << t).into());
    Ok(Bracket::new(&lo * &scale, &hi * &scale))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub epsilon: Ratio,
    pub t: u32,
    pub degree: u64,
    pub lower_bound: Bracket,
    pub ratio: Bracket,
    /// `1 < ratio <= 4`, decided on the bracket.
    pub ratio_in_range: bool,
    /// `(1+ε)^(2^(t-1)) >= 2`, and `(1+ε)^(2^(t-2)) < 2` when `t >= 2`.
    pub t_witness: bool,
}

pub fn optimality_report(epsilon: &Ratio) -> Result<OptimalityReport, FreeError> {
    let t = compute_t(epsilon)?;
    let ratio = optimality_ratio(epsilon)?;
    let one = BigRational::one();
    let four = BigRational::from_integer(4.into());
    let ratio_in_range = ratio.lower > one && ratio.upper <= four;
    Ok(OptimalityReport {
        epsilon: epsilon.clone(),
        t,
        degree: 1u64 << t,
        lower_bound: degree_lower_bound(epsilon)?,
        ratio,
        ratio_in_range,
        t_witness: t_witness(epsilon, t),
    })
}

fn t_witness(epsilon: &Ratio, t: u32) -> bool {
    let base = BigRational::one() + epsilon.value();
    let two = BigRational::from_integer(2.into());
    let reaches = rational_pow(&base, 1u64 << (t - 1)) >= two;
    let minimal = t < 2 || rational_pow(&base, 1u64 << (t - 2)) < two;
    reaches && minimal
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityCheck {
    pub level: u32,
    pub r: u32,
    pub size: u64,
    /// `2^(2^r)`.
    #[serde(
        serialize_with = "crate::numeric::serde_big::uint",
        deserialize_with = "crate::numeric::serde_big::uint_de"
    )]
    pub required: BigUint,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub params: FreeParams,
    pub depth: u32,
    pub max_products_len: usize,
    /// Products of each length `1..=max_products_len` found as factors.
    pub present_by_length: Vec<u64>,
    pub verified_products: u64,
    pub missing: Vec<String>,
    pub capacity: Vec<CapacityCheck>,
    pub optimality: OptimalityReport,
    /// `degree >= 1/log2(h(n)) - 1` at the deepest safe length; report only.
    pub entropy_consistency: Option<EntropyConsistency>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyConsistency {
    pub n: usize,
    pub h: String,
    pub bound: Option<Bracket>,
    pub holds: bool,
}

/// Checks every product of length `<= max_products_len` over `{X, Y}`
/// against the factor sets, plus the capacity `|C(2^(t+r))| >= 2^(2^r)`
/// at every built level.
pub fn verify_free_generators(
    sys: &LevelSystem,
    params: &FreeParams,
    max_products_len: usize,
) -> Result<FreenessReport, FreeError> {
    if sys.alphabet().size() != 2 {
        return Err(FreeError::Precondition("free systems use two letters".into()));
    }
    if max_products_len == 0 {
        return Err(FreeError::Precondition("product length must be positive".into()));
    }
    let block = 1usize << params.t;
    let longest = max_products_len
        .checked_mul(block)
        .filter(|&l| l <= max_safe_length(sys.depth()))
        .ok_or_else(|| {
            FreeError::Precondition(format!(
                "products of length {max_products_len} with generators of degree {block} exceed depth {}",
                sys.depth()
            ))
        })?;
    if max_products_len >= 64 {
        return Err(FreeError::Precondition("product length too large to enumerate".into()));
    }

    let mut present_by_length = Vec::with_capacity(max_products_len);
    let mut missing = Vec::new();
    for len in 1..=max_products_len {
        let factors = factor_set_structural(sys, len * block)?;
        let mut present = 0u64;
        for bits in 0..(1u64 << len) {
            let mut word = Vec::with_capacity(len * block);
            for k in 0..len {
                let letter = ((bits >> (len - 1 - k)) & 1) as u8;
                word.extend(std::iter::repeat_n(letter, block));
            }
            if factors.contains(&word) {
                present += 1;
            } else if missing.len() < 32 {
                missing.push(product_name(bits, len));
            }
        }
        present_by_length.push(present);
    }
    let verified_products = present_by_length.iter().sum();
    let expected: u64 = (1..=max_products_len).map(|l| 1u64 << l).sum();

    let mut capacity = Vec::new();
    for level in params.t..sys.depth() {
        let r = level - params.t;
        let required = num_traits::Pow::pow(BigUint::from(2u32), 1u64 << r);
        let size = sys.cset(level).len() as u64;
        capacity.push(CapacityCheck {
            level,
            r,
            size,
            ok: BigUint::from(size) >= required,
            required,
        });
    }
    let capacity_ok = capacity.iter().all(|c| c.ok);

    let entropy_consistency = entropy_consistency(sys, params, longest)?;
    Ok(FreenessReport {
        params: params.clone(),
        depth: sys.depth(),
        max_products_len,
        present_by_length,
        verified_products,
        missing,
        capacity,
        optimality: optimality_report(&params.epsilon)?,
        entropy_consistency,
        verdict: Verdict::from_bool(verified_products == expected && capacity_ok),
    })
}

fn entropy_consistency(
    sys: &LevelSystem,
    params: &FreeParams,
    n: usize,
) -> Result<Option<EntropyConsistency>, FreeError> {
    let dims = dims_up_to(sys, n)?;
    let g: u64 = dims.iter().sum();
    let scaled = root_floor_scaled(&BigRational::from_integer(g.into()), n as u32, 6);
    let h = BigRational::new(scaled.clone().into(), BigUint::from(10u32).pow(6).into());
    let bound = degree_lower_bound_from_entropy(&h).ok();
    let holds = match &bound {
        Some(b) => BigRational::from_integer(params.degree().into()) >= &b.lower - BigRational::one(),
        None => true,
    };
    Ok(Some(EntropyConsistency {
        n,
        h: crate::numeric::format_scaled(&scaled, 6),
        bound,
        holds,
    }))
}

fn product_name(bits: u64, len: usize) -> String {
    (0..len)
        .map(|k| if (bits >> (len - 1 - k)) & 1 == 0 { 'X' } else { 'Y' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(p: i64, q: i64) -> Ratio {
        Ratio::new(p, q)
    }

    #[test]
    fn t_values() {
        assert_eq!(compute_t(&eps(1, 1)).unwrap(), 1);
        assert_eq!(compute_t(&eps(1, 2)).unwrap(), 2);
        assert_eq!(compute_t(&eps(1, 10)).unwrap(), 4);
    }

    #[test]
    fn epsilon_range_enforced() {
        assert!(compute_t(&eps(0, 1)).is_err());
        assert!(compute_t(&eps(-1, 2)).is_err());
        assert!(compute_t(&eps(3, 2)).is_err());
    }

    #[test]
    fn lower_bound_values() {
        let tol = BigRational::new(1.into(), 1000.into());
        let check = |e: Ratio, v: (i64, i64)| {
            let b = degree_lower_bound(&e).unwrap();
            assert!(
                b.contains_within(&BigRational::new(v.0.into(), v.1.into()), &tol),
                "{e}: {}",
                b.approx
            );
        };
        check(eps(1, 1), (1, 1));
        check(eps(1, 2), (17095, 10000));
        check(eps(1, 10), (72725, 10000));
    }

    #[test]
    fn power_of_two_bound_is_exact() {
        let b = degree_lower_bound(&eps(1, 1)).unwrap();
        assert_eq!(b.lower, BigRational::one());
        assert_eq!(b.upper, BigRational::one());
    }

    #[test]
    fn optimality_in_range() {
        for e in [eps(1, 1), eps(1, 2), eps(1, 10), eps(1, 3), eps(1, 100)] {
            let r = optimality_report(&e).unwrap();
            assert!(r.ratio_in_range, "{e}: {}", r.ratio.approx);
            assert!(r.t_witness);
        }
        let r = optimality_ratio(&eps(1, 2)).unwrap();
        assert!((r.midpoint() - 2.3398).abs() < 1e-3);
        let r = optimality_ratio(&eps(1, 10)).unwrap();
        assert!((r.midpoint() - 2.2000).abs() < 1e-3);
    }
}
