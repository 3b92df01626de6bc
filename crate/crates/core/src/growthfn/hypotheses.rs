//! Horizon-stamped checks of the conditions placed on a growth function.
//!
//! Every verdict here is finite evidence: universally quantified statements
//! are checked up to the stated horizon only.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{dyadic, GrowthError, GrowthFunction};
use crate::numeric::{approx, rational_from_uint, serde_big};

/// A concrete counterexample: `lhs` was supposed to satisfy `relation` with
/// `rhs` at the given arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub args: Vec<u64>,
    #[serde(serialize_with = "serde_big::uint")]
    pub lhs: BigUint,
    pub relation: &'static str,
    #[serde(serialize_with = "serde_big::uint")]
    pub rhs: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub ok: bool,
    /// Number of individual inequalities evaluated.
    pub checked: u64,
    pub range: String,
    pub violation: Option<Violation>,
}

impl CheckOutcome {
    fn new(range: String) -> Self {
        CheckOutcome {
            ok: true,
            checked: 0,
            range,
            violation: None,
        }
    }

    fn record(&mut self, holds: bool, violation: impl FnOnce() -> Violation) {
        self.checked += 1;
        if !holds && self.ok {
            self.ok = false;
            self.violation = Some(violation());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasicReport {
    pub horizon: u64,
    pub strict_monotone: CheckOutcome,
    pub monotone: CheckOutcome,
    pub submultiplicative: CheckOutcome,
    pub warnings: Vec<String>,
}

impl BasicReport {
    /// Strictness failures are only warnings; non-decreasing values and
    /// submultiplicativity are what the construction needs.
    pub fn ok(&self) -> bool {
        self.monotone.ok && self.submultiplicative.ok
    }
}

/// Monotonicity and submultiplicativity on every covered argument up to
/// `horizon`.
pub fn check_basic(f: &GrowthFunction, horizon: u64) -> Result<BasicReport, GrowthError> {
    assert!(horizon >= 2, "check_basic needs horizon >= 2");
    let args = f.covered_up_to(horizon);
    let mut strict = CheckOutcome::new(format!("consecutive covered n <= {horizon}"));
    let mut weak = CheckOutcome::new(format!("consecutive covered n <= {horizon}"));
    for pair in args.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (f.eval(a)?, f.eval(b)?);
        strict.record(fa < fb, || Violation {
            args: vec![a, b],
            lhs: fa.clone(),
            relation: "<",
            rhs: fb.clone(),
        });
        weak.record(fa <= fb, || Violation {
            args: vec![a, b],
            lhs: fa.clone(),
            relation: "<=",
            rhs: fb.clone(),
        });
    }

    let mut sub = CheckOutcome::new(format!("n + m <= {horizon}"));
    for (i, &n) in args.iter().enumerate() {
        for &m in &args[i..] {
            if n + m > horizon || !f.covers(n + m) {
                continue;
            }
            let lhs = f.eval(n + m)?;
            let rhs = f.eval(n)? * f.eval(m)?;
            sub.record(lhs <= rhs, || Violation {
                args: vec![n, m],
                lhs: lhs.clone(),
                relation: "<=",
                rhs: rhs.clone(),
            });
        }
    }

    let mut warnings = Vec::new();
    if let Some(v) = &strict.violation {
        warnings.push(format!(
            "not strictly increasing: f({}) = {} and f({}) = {}",
            v.args[0], v.lhs, v.args[1], v.rhs
        ));
    }
    Ok(BasicReport {
        horizon,
        strict_monotone: strict,
        monotone: weak,
        submultiplicative: sub,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RapidGrowthReport {
    pub horizon: u64,
    pub alpha_max: u64,
    /// Smallest α with `n f(n) <= f(α n)` for every checked `n`.
    pub alpha: Option<u64>,
    /// First violation for each rejected α.
    pub rejected: Vec<Violation>,
    /// Rejected violation with the smallest `lhs / rhs`.
    pub best_deficit: Option<Violation>,
}

/// Searches the smallest integer α in `2..=α_max` with `n f(n) <= f(α n)`
/// for all covered `n` with `α n <= horizon`.
///
/// α is only a candidate if the checked range reaches `n = α + 1`, i.e.
/// `α (α + 1) <= horizon`; otherwise a linear `f` would pass vacuously.
pub fn check_rapid_growth(f: &GrowthFunction, horizon: u64) -> Result<RapidGrowthReport, GrowthError> {
    assert!(horizon >= 4, "check_rapid_growth needs horizon >= 4");
    let mut alpha_max = 2;
    while (alpha_max + 1) * (alpha_max + 2) <= horizon {
        alpha_max += 1;
    }
    let mut rejected = Vec::new();
    let mut alpha = None;
    for a in 2..=alpha_max {
        let mut failure = None;
        for n in 1..=horizon / a {
            if !f.covers(n) || !f.covers(a * n) {
                continue;
            }
            let lhs = f.eval(n)? * n;
            let rhs = f.eval(a * n)?;
            if lhs > rhs {
                failure = Some(Violation {
                    args: vec![n, a],
                    lhs,
                    relation: "<=",
                    rhs,
                });
                break;
            }
        }
        match failure {
            Some(v) => rejected.push(v),
            None => {
                alpha = Some(a);
                break;
            }
        }
    }
    let best_deficit = if alpha.is_none() {
        rejected
            .iter()
            .min_by(|x, y| {
                let rx = rational_from_uint(&x.lhs) / rational_from_uint(&x.rhs);
                let ry = rational_from_uint(&y.lhs) / rational_from_uint(&y.rhs);
                rx.cmp(&ry)
            })
            .cloned()
    } else {
        None
    };
    Ok(RapidGrowthReport {
        horizon,
        alpha_max,
        alpha,
        rejected,
        best_deficit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaEntry {
    #[serde(serialize_with = "serde_big::rational")]
    pub beta: BigRational,
    /// Least level from which `β f(2^(n+1)) <= f(2^n)^2` holds through the
    /// horizon.
    pub n_beta: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginEntry {
    pub n: u32,
    /// `f(2^n)^2 / f(2^(n+1))`
    #[serde(skip)]
    pub margin: BigRational,
    pub approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaptureConditionsReport {
    pub horizon: u32,
    pub betas: Vec<BetaEntry>,
    pub margins: Vec<MarginEntry>,
    /// Exact `∏_{i<k} (1 + f(2^i)/f(2^(i+1)))` at index `k - 1`, for
    /// `k = 1..=horizon+1`. Serialized as approximations only; the exact
    /// values run to hundreds of digits.
    #[serde(skip)]
    pub partial_values: Vec<BigRational>,
    pub product_partials_approx: Vec<f64>,
    /// Upper bound for the infinite product, present when the summands are
    /// seen halving at the end of the checked range.
    #[serde(skip)]
    pub product_tail_estimate: Option<BigRational>,
    pub product_tail_estimate_approx: Option<f64>,
}

impl CaptureConditionsReport {
    pub fn n_beta(&self, beta: &BigRational) -> Option<u32> {
        self.betas.iter().find(|b| &b.beta == beta).and_then(|b| b.n_beta)
    }

    pub fn all_betas_ok(&self) -> bool {
        self.betas.iter().all(|b| b.n_beta.is_some())
    }
}

/// Consecutive summand pairs that must show halving before a tail bound is
/// extrapolated.
const TAIL_WINDOW: u32 = 3;

pub fn check_capture_conditions(
    f: &GrowthFunction,
    betas: &[BigRational],
    horizon: u32,
) -> Result<CaptureConditionsReport, GrowthError> {
    assert!(!betas.is_empty(), "beta list must be non-empty");
    assert!(horizon >= 3, "check_capture_conditions needs horizon >= 3");
    let values: Vec<BigRational> = (0..=horizon + 1)
        .map(|i| f.eval_dyadic(i).map(|v| rational_from_uint(&v)))
        .collect::<Result<_, _>>()?;

    let margins: Vec<MarginEntry> = (0..=horizon)
        .map(|n| {
            let n_us = n as usize;
            let margin = &values[n_us] * &values[n_us] / &values[n_us + 1];
            MarginEntry {
                n,
                approx: approx(&margin),
                margin,
            }
        })
        .collect();

    let betas = betas
        .iter()
        .map(|beta| {
            let mut start = horizon + 1;
            while start > 0 && &margins[start as usize - 1].margin >= beta {
                start -= 1;
            }
            BetaEntry {
                beta: beta.clone(),
                n_beta: (start <= horizon).then_some(start),
            }
        })
        .collect();

    let summands: Vec<BigRational> = (0..=horizon as usize).map(|i| &values[i] / &values[i + 1]).collect();
    let mut partial = BigRational::one();
    let mut partial_values = Vec::new();
    for s in &summands {
        partial *= BigRational::one() + s;
        partial_values.push(partial.clone());
    }

    let last = summands.len() - 1;
    let two = BigRational::from_integer(2.into());
    let halving = (0..TAIL_WINDOW as usize).all(|k| last > k && &summands[last - k] * &two <= summands[last - k - 1]);
    let product_tail_estimate = if halving && summands[last] < BigRational::one() {
        Some(partial.clone() / (BigRational::one() - &summands[last]))
    } else {
        None
    };

    Ok(CaptureConditionsReport {
        horizon,
        betas,
        margins,
        product_partials_approx: partial_values.iter().map(approx).collect(),
        partial_values,
        product_tail_estimate_approx: product_tail_estimate.as_ref().map(approx),
        product_tail_estimate,
    })
}

/// Smallest level `m > t + offset` such that for every `n` in
/// `[m, horizon]`:
///
/// `f(2^(n+1)) / f(2^n) <= ∏_{i=t}^{n-1} r_i`.
pub fn compute_mu(f: &GrowthFunction, t: u32, offset: u32, horizon: u32) -> Result<u32, GrowthError> {
    let too_small = GrowthError::HorizonTooSmall { t, offset, horizon };
    if horizon <= t + offset {
        return Err(too_small);
    }
    // holds[k] refers to n = t + 1 + k.
    let mut holds = Vec::with_capacity((horizon - t) as usize);
    let mut product = BigUint::one();
    for n in (t + 1)..=horizon {
        product *= f.ratio(n - 1)?;
        let lhs = f.eval(dyadic(n + 1))?;
        let rhs = f.eval(dyadic(n))? * &product;
        holds.push(lhs <= rhs);
    }
    let mut start = horizon + 1;
    while start > t + 1 && holds[(start - 1 - (t + 1)) as usize] {
        start -= 1;
    }
    let m = start.max(t + offset + 1);
    if m > horizon {
        Err(too_small)
    } else {
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growthfn::Family;
    use crate::numeric::Ratio;

    fn g(f: Family) -> GrowthFunction {
        GrowthFunction::new(f).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn poly() -> GrowthFunction {
        g(Family::poly_geometric(Ratio::new(1, 10)))
    }

    #[test]
    fn basic_on_dyadic_table() {
        let r = check_basic(&g(Family::dyadic_table(&[2, 4, 8, 16])), 8).unwrap();
        assert!(r.monotone.ok && r.strict_monotone.ok);
        assert!(r.submultiplicative.ok);
        assert!(r.submultiplicative.checked >= 3);
        assert!(r.ok());
    }

    #[test]
    fn basic_strictness_warning_for_slow_geometric() {
        let r = check_basic(&g(Family::geometric(Ratio::new(1, 10))), 16).unwrap();
        assert!(!r.strict_monotone.ok);
        let v = r.strict_monotone.violation.as_ref().unwrap();
        assert_eq!(v.args, vec![1, 2]);
        assert_eq!(v.lhs, 2u32.into());
        assert_eq!(v.rhs, 2u32.into());
        assert_eq!(r.warnings.len(), 1);
        assert!(r.ok(), "strictness alone must not fail the report");
    }

    #[test]
    fn basic_all_ok_for_powers_of_two() {
        let r = check_basic(&g(Family::geometric(Ratio::integer(1))), 32).unwrap();
        assert!(r.strict_monotone.ok && r.submultiplicative.ok);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn basic_reports_submultiplicative_witness() {
        // f(2) = 5 > f(1)^2 = 4
        let r = check_basic(&g(Family::table([(1, 2), (2, 5), (3, 6)])), 3).unwrap();
        let v = r.submultiplicative.violation.clone().unwrap();
        assert_eq!(v.args, vec![1, 1]);
        assert!(!r.ok());
    }

    #[test]
    fn rapid_growth_examples() {
        let r = check_rapid_growth(&g(Family::geometric(Ratio::integer(1))), 64).unwrap();
        assert_eq!(r.alpha, Some(2));

        let linear = Family::table((1..=64).map(|n| (n, 2 * n)));
        let r = check_rapid_growth(&g(linear), 64).unwrap();
        assert_eq!(r.alpha, None);
        assert_eq!(r.rejected.len() as u64, r.alpha_max - 1);
        assert!(r.best_deficit.is_some());

        // α = 2 fails at n = 3: 3·f(3) = 12 > f(6) = 11.
        let r = check_rapid_growth(&poly(), 64).unwrap();
        assert_eq!(r.alpha, Some(3));
        assert_eq!(r.rejected[0].args, vec![3, 2]);
        assert_eq!(r.rejected[0].lhs, 12u32.into());
        assert_eq!(r.rejected[0].rhs, 11u32.into());
    }

    #[test]
    fn capture_conditions_for_borderline_and_reference_families() {
        let r = check_capture_conditions(&g(Family::geometric(Ratio::integer(1))), &[q(2, 1)], 10).unwrap();
        assert_eq!(r.n_beta(&q(2, 1)), None);
        assert!(r.margins.iter().all(|m| m.margin == q(1, 1)));

        let r = check_capture_conditions(&poly(), &[q(100, 1)], 12).unwrap();
        assert_eq!(r.n_beta(&q(100, 1)), Some(8));
        assert_eq!(r.margins[6].margin, q(28531 * 28531, 25437456));
        // (1+2/3)(1+1/2)(1+1/3)(1+18/74)(1+74/676)(1+676/28531)
        let expected = q(5, 3) * q(3, 2) * q(4, 3) * q(92, 74) * q(750, 676) * q(29207, 28531);
        assert_eq!(r.partial_values[5], expected);
        assert!((approx(&expected) - 4.7067).abs() < 1e-3);
        assert!(r.product_tail_estimate.is_some());
        assert!(r.partial_values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn literal_sharp_family_fails_condition_two() {
        let r = check_capture_conditions(&g(Family::sharp_paper(Ratio::new(1, 10))), &[q(2, 1)], 12).unwrap();
        assert_eq!(r.n_beta(&q(2, 1)), None);
        let last = &r.margins.last().unwrap().margin;
        assert!(last < &q(1, 100));
    }

    #[test]
    fn margins_track_expected_shapes() {
        let geo = check_capture_conditions(&g(Family::geometric(Ratio::new(1, 10))), &[q(1, 1)], 12).unwrap();
        for m in &geo.margins {
            assert!(m.margin >= q(1, 2) && m.margin <= q(2, 1), "n={} {}", m.n, m.approx);
        }
        let p = check_capture_conditions(&poly(), &[q(1, 1)], 12).unwrap();
        for m in p.margins.iter().filter(|m| m.n >= 4) {
            let target = q(1i64 << (m.n - 1), 1);
            assert!(m.margin <= &target * q(2, 1) && m.margin >= &target / q(2, 1));
        }
    }

    #[test]
    fn mu_examples() {
        let f = poly();
        assert_eq!(compute_mu(&f, 2, 0, 12), Ok(4));
        assert_eq!(compute_mu(&f, 0, 0, 12), Ok(1));
        let geo = g(Family::geometric(Ratio::integer(1)));
        for t in 0..4 {
            assert!(matches!(
                compute_mu(&geo, t, 0, 12),
                Err(GrowthError::HorizonTooSmall { .. })
            ));
        }
    }

    #[test]
    fn mu_is_monotone_in_offset() {
        let f = poly();
        for t in 0..4 {
            let mut prev = 0;
            for offset in 0..8 {
                match compute_mu(&f, t, offset, 12) {
                    Ok(m) => {
                        assert!(m >= prev);
                        assert!(m > t + offset);
                        prev = m;
                    }
                    Err(_) => prev = u32::MAX,
                }
            }
        }
    }

    #[test]
    fn mu_table_frozen_from_oracle() {
        // Python Fraction oracle, horizon 12.
        let f = poly();
        let got: Vec<Option<u32>> = (0..8).map(|t| compute_mu(&f, t, 0, 12).ok()).collect();
        assert_eq!(
            got,
            vec![Some(1), Some(3), Some(4), Some(5), Some(8), Some(11), None, None]
        );
    }
}
