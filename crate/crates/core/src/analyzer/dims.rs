use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{factor_set_structural, max_safe_length, AnalyzeError, Verdict};
use crate::construction::LevelSystem;
use crate::growthfn::{dyadic, Family};
use crate::numeric::{decimal_floor, format_scaled, rational_pow, root_floor_scaled, serde_big};

/// Fractional digits of reported entropy partials.
pub const ENTROPY_DIGITS: u32 = 6;

/// `dim_n` for `n = 1..=n_max` via the structural method.
pub fn dims_up_to(sys: &LevelSystem, n_max: usize) -> Result<Vec<u64>, AnalyzeError> {
    if n_max > max_safe_length(sys.depth()) {
        return Err(AnalyzeError::DepthTooShallow {
            n: n_max,
            depth: sys.depth(),
        });
    }
    (1..=n_max)
        .map(|n| factor_set_structural(sys, n).map(|f| f.len() as u64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRow {
    pub n: usize,
    pub dim: u64,
    pub cumulative: u64,
    pub entropy_partial: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub depth: u32,
    pub rows: Vec<DimRow>,
    pub cumulative_increasing: bool,
    pub submultiplicative: bool,
    /// First `(n, m)` with `dim_{n+m} > dim_n · dim_m`, if any.
    pub submultiplicative_violation: Option<(usize, usize)>,
}

impl DimensionReport {
    pub fn from_dims(depth: u32, dims: &[u64]) -> Self {
        let mut rows = Vec::with_capacity(dims.len());
        let mut g = 0u64;
        for (i, &dim) in dims.iter().enumerate() {
            g += dim;
            let n = i + 1;
            rows.push(DimRow {
                n,
                dim,
                cumulative: g,
                entropy_partial: entropy_text(g, n),
            });
        }
        let cumulative_increasing = dims.iter().all(|&d| d > 0);
        let violation = submultiplicative_violation(dims);
        DimensionReport {
            depth,
            rows,
            cumulative_increasing,
            submultiplicative: violation.is_none(),
            submultiplicative_violation: violation,
        }
    }

    pub fn dims(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.dim).collect()
    }

    pub fn dim(&self, n: usize) -> Option<u64> {
        self.rows.get(n.checked_sub(1)?).map(|r| r.dim)
    }

    /// Rows `n,dim,cumulative,entropy_partial,depth`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,dim,cumulative,entropy_partial,depth\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.dim, r.cumulative, r.entropy_partial, self.depth
            ));
        }
        out
    }
}

pub fn dim_series(sys: &LevelSystem, n_max: usize) -> Result<DimensionReport, AnalyzeError> {
    Ok(DimensionReport::from_dims(sys.depth(), &dims_up_to(sys, n_max)?))
}

fn submultiplicative_violation(dims: &[u64]) -> Option<(usize, usize)> {
    let len = dims.len();
    for n in 1..=len {
        for m in n..=len - n {
            if (dims[n + m - 1] as u128) > dims[n - 1] as u128 * dims[m - 1] as u128 {
                return Some((n, m));
            }
        }
    }
    None
}

fn entropy_text(g: u64, n: usize) -> String {
    let scaled = root_floor_scaled(&BigRational::from_integer(g.into()), n as u32, ENTROPY_DIGITS);
    format_scaled(&scaled, ENTROPY_DIGITS)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: u32,
    pub length: u64,
    pub depth: u32,
    pub dim: u64,
    /// `∏_{i<n} |C_i|`: distinct elements of `W(2^n)` are distinct factors.
    #[serde(serialize_with = "serde_big::uint", deserialize_with = "serde_big::uint_de")]
    pub hard_lower: BigUint,
    /// `2^(2n+3) · f(2^(n+1))`.
    #[serde(serialize_with = "serde_big::uint", deserialize_with = "serde_big::uint_de")]
    pub hard_upper: BigUint,
    /// `f(2^n)`; may be missed at finite depth.
    #[serde(serialize_with = "serde_big::uint", deserialize_with = "serde_big::uint_de")]
    pub soft_lower: BigUint,
    pub hard_lower_ok: bool,
    pub hard_upper_ok: bool,
    pub soft_lower_ok: bool,
}

impl SandwichReport {
    pub fn hard_ok(&self) -> bool {
        self.hard_lower_ok && self.hard_upper_ok
    }
}

pub fn check_growth_sandwich(sys: &LevelSystem, n: u32) -> Result<SandwichReport, AnalyzeError> {
    let len = sandwich_length(sys, n)?;
    let dim = factor_set_structural(sys, len)?.len() as u64;
    sandwich_with_dim(sys, n, dim)
}

fn sandwich_length(sys: &LevelSystem, n: u32) -> Result<usize, AnalyzeError> {
    if n >= sys.depth() {
        return Err(AnalyzeError::Precondition(format!(
            "sandwich at n={n} needs 2^n <= 2^(D-1), depth is {}",
            sys.depth()
        )));
    }
    Ok(1usize << n)
}

/// Same as [`check_growth_sandwich`] with `dim_{2^n}` already known.
pub fn sandwich_with_dim(sys: &LevelSystem, n: u32, dim: u64) -> Result<SandwichReport, AnalyzeError> {
    let len = sandwich_length(sys, n)?;
    let f = sys.growth();
    let hard_lower = sys.cset_product(n);
    let hard_upper =
        (BigUint::one() << (2 * n + 3)) * f.eval(dyadic(n + 1)).map_err(crate::construction::BuildError::from)?;
    let soft_lower = f.eval(dyadic(n)).map_err(crate::construction::BuildError::from)?;
    let d = BigUint::from(dim);
    Ok(SandwichReport {
        n,
        length: len as u64,
        depth: sys.depth(),
        dim,
        hard_lower_ok: d >= hard_lower,
        hard_upper_ok: d <= hard_upper,
        soft_lower_ok: d >= soft_lower,
        hard_lower,
        hard_upper,
        soft_lower,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub n: usize,
    pub cumulative: u64,
    pub h: String,
}

impl EntropyPoint {
    /// `lo <= g(n)^(1/n) <= hi`, decided exactly.
    pub fn in_bracket(&self, lo: &BigRational, hi: &BigRational) -> bool {
        let g = BigRational::from_integer(self.cumulative.into());
        let n = self.n as u64;
        rational_pow(lo, n) <= g && g <= rational_pow(hi, n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBand {
    pub name: String,
    pub lower: String,
    pub upper: String,
    pub lower_approx: f64,
    pub upper_approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub depth: u32,
    pub points: Vec<EntropyPoint>,
    pub bands: Vec<EntropyBand>,
}

impl EntropyReport {
    pub fn from_dims(sys: &LevelSystem, dims: &[u64]) -> Self {
        let mut g = 0u64;
        let points = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                g += d;
                EntropyPoint {
                    n: i + 1,
                    cumulative: g,
                    h: entropy_text(g, i + 1),
                }
            })
            .collect();
        EntropyReport {
            depth: sys.depth(),
            points,
            bands: entropy_bands(sys.growth().family()),
        }
    }

    pub fn at(&self, n: usize) -> Option<&EntropyPoint> {
        self.points.get(n.checked_sub(1)?)
    }
}

pub fn entropy_partial(sys: &LevelSystem, n_max: usize) -> Result<EntropyReport, AnalyzeError> {
    Ok(EntropyReport::from_dims(sys, &dims_up_to(sys, n_max)?))
}

/// Comparison bands for families with a parameter ε:
/// `[√(1+ε), (1+ε)^2]` and `[1+ε/3, 1+3ε]`.
pub fn entropy_bands(family: &Family) -> Vec<EntropyBand> {
    let eps = match family {
        Family::Geometric { epsilon } | Family::PolyGeometric { epsilon } | Family::SharpPaper { epsilon } => {
            epsilon.value().clone()
        }
        _ => return Vec::new(),
    };
    let one = BigRational::one();
    let base = &one + &eps;
    let sqrt_lower = format_scaled(&root_floor_scaled(&base, 2, ENTROPY_DIGITS), ENTROPY_DIGITS);
    let square = &base * &base;
    let three = BigRational::from_integer(3.into());
    let c_lower = &one + &eps / &three;
    let c_upper = &one + &eps * &three;
    vec![
        band("sqrt_square", sqrt_lower, &square),
        band("third_triple", decimal_floor(&c_lower, ENTROPY_DIGITS), &c_upper),
    ]
}

fn band(name: &str, lower: String, upper: &BigRational) -> EntropyBand {
    let upper_text = decimal_floor(upper, ENTROPY_DIGITS);
    EntropyBand {
        name: name.to_string(),
        lower_approx: lower.parse().unwrap_or(f64::NAN),
        upper_approx: crate::numeric::approx(upper),
        lower,
        upper: upper_text,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonperiodicityReport {
    pub n_max: usize,
    pub complexity: Vec<u64>,
    /// `p(n) - p(n-1)` for `n >= 2`.
    pub increments: Vec<i64>,
    /// Smallest `n` with `p(n) < n + 1`.
    pub first_failure: Option<usize>,
    pub verdict: Verdict,
}

impl NonperiodicityReport {
    pub fn from_dims(dims: &[u64]) -> Self {
        let first_failure = dims
            .iter()
            .enumerate()
            .find(|&(i, &p)| p < i as u64 + 2)
            .map(|(i, _)| i + 1);
        NonperiodicityReport {
            n_max: dims.len(),
            complexity: dims.to_vec(),
            increments: dims.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect(),
            first_failure,
            verdict: Verdict::from_bool(first_failure.is_none()),
        }
    }
}

/// `p(n) >= n + 1` for all `n <= n_max`.
pub fn check_nonperiodicity(sys: &LevelSystem, n_max: usize) -> Result<NonperiodicityReport, AnalyzeError> {
    if n_max < 2 {
        return Err(AnalyzeError::Precondition("n_max must be at least 2".into()));
    }
    Ok(NonperiodicityReport::from_dims(&dims_up_to(sys, n_max)?))
}
