//! Run configuration: a TOML file with one section per stage, overridden by
//! command-line flags. The effective configuration is echoed into every
//! report.

use std::path::Path;

use clap::ValueEnum;
use growthforge_core::{Chooser, Family, Ratio};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    Geometric,
    PolyGeometric,
    SharpPaper,
    ExpPower,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Recurrent,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ChooserKind {
    Lex,
    Seeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthSection {
    pub family: FamilyName,
    /// Exact rational, `p/q` or decimal.
    pub epsilon: String,
    /// Exponent for `exp_power`.
    pub r: Option<String>,
    /// Values at `1, 2, 4, …` for `table`.
    pub table: Option<Vec<u64>>,
}

impl Default for GrowthSection {
    fn default() -> Self {
        GrowthSection {
            family: FamilyName::PolyGeometric,
            epsilon: "1/10".into(),
            r: None,
            table: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildSection {
    pub mode: Mode,
    /// Number of choice sets. `free` picks the smallest sufficient depth
    /// when unset.
    pub depth: Option<u32>,
    pub chooser: ChooserKind,
    pub seed: u64,
    pub captures: usize,
    pub mu_offset: u32,
    pub horizon: u32,
}

impl Default for BuildSection {
    fn default() -> Self {
        BuildSection {
            mode: Mode::Plain,
            depth: None,
            chooser: ChooserKind::Lex,
            seed: 0,
            captures: 2,
            mu_offset: 0,
            horizon: 12,
        }
    }
}

pub const DEFAULT_DEPTH: u32 = 7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// Largest argument for the monotonicity, submultiplicativity and
    /// rapid-growth checks.
    pub horizon: u64,
    /// Largest level for the dyadic conditions and for μ.
    pub levels: u32,
    /// μ(t) is computed for `t = 0..=t_max`.
    pub t_max: u32,
    pub betas: Vec<String>,
    pub require_capture: bool,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            horizon: 64,
            levels: 12,
            t_max: 4,
            betas: vec!["2".into()],
            require_capture: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeSection {
    pub n_max: usize,
    /// Sandwich bounds are checked for `dim_{2^n}`, `n = 1..=sandwich_max`.
    pub sandwich_max: u32,
    pub forbidden_max: usize,
    /// Elements scanned per level before recurrence checks switch to sampling.
    pub scan_cap: usize,
    pub sample_seed: u64,
}

impl Default for AnalyzeSection {
    fn default() -> Self {
        AnalyzeSection {
            n_max: 32,
            sandwich_max: 5,
            forbidden_max: 8,
            scan_cap: 10_000,
            sample_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeSection {
    pub products_len: usize,
}

impl Default for FreeSection {
    fn default() -> Self {
        FreeSection { products_len: 4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<String>,
    pub csv: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub growth: GrowthSection,
    pub build: BuildSection,
    pub validate: ValidateSection,
    pub analyze: AnalyzeSection,
    pub free: FreeSection,
    pub output: OutputSection,
}

/// Flag values; every `Some` replaces the corresponding config entry.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub family: Option<FamilyName>,
    pub epsilon: Option<String>,
    pub r: Option<String>,
    pub table: Option<Vec<u64>>,
    pub mode: Option<Mode>,
    pub depth: Option<u32>,
    pub chooser: Option<ChooserKind>,
    pub seed: Option<u64>,
    pub captures: Option<usize>,
    pub mu_offset: Option<u32>,
    pub horizon: Option<u32>,
    pub n_max: Option<usize>,
    pub forbidden_max: Option<usize>,
    pub scan_cap: Option<usize>,
    pub products_len: Option<usize>,
    pub out: Option<String>,
    pub csv: Option<String>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        set(&mut self.growth.family, o.family);
        set(&mut self.growth.epsilon, o.epsilon);
        if o.r.is_some() {
            self.growth.r = o.r;
        }
        if o.table.is_some() {
            self.growth.table = o.table;
        }
        set(&mut self.build.mode, o.mode);
        if o.depth.is_some() {
            self.build.depth = o.depth;
        }
        set(&mut self.build.chooser, o.chooser);
        set(&mut self.build.seed, o.seed);
        set(&mut self.build.captures, o.captures);
        set(&mut self.build.mu_offset, o.mu_offset);
        set(&mut self.build.horizon, o.horizon);
        set(&mut self.analyze.n_max, o.n_max);
        set(&mut self.analyze.forbidden_max, o.forbidden_max);
        set(&mut self.analyze.scan_cap, o.scan_cap);
        set(&mut self.free.products_len, o.products_len);
        if o.out.is_some() {
            self.output.out = o.out;
        }
        if o.csv.is_some() {
            self.output.csv = o.csv;
        }
    }

    pub fn epsilon(&self) -> Result<Ratio, CliError> {
        parse_ratio("epsilon", &self.growth.epsilon)
    }

    pub fn family(&self) -> Result<Family, CliError> {
        let g = &self.growth;
        Ok(match g.family {
            FamilyName::Geometric => Family::geometric(self.epsilon()?),
            FamilyName::PolyGeometric => Family::poly_geometric(self.epsilon()?),
            FamilyName::SharpPaper => Family::sharp_paper(self.epsilon()?),
            FamilyName::ExpPower => {
                let r =
                    g.r.as_deref()
                        .ok_or_else(|| CliError::Usage("exp_power needs r".into()))?;
                Family::exp_power(parse_ratio("r", r)?)
            }
            FamilyName::Table => {
                let values = g
                    .table
                    .as_deref()
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| CliError::Usage("table family needs table values".into()))?;
                Family::dyadic_table(values)
            }
        })
    }

    pub fn chooser(&self) -> Chooser {
        match self.build.chooser {
            ChooserKind::Lex => Chooser::Lex,
            ChooserKind::Seeded => Chooser::Seeded { seed: self.build.seed },
        }
    }

    pub fn betas(&self) -> Result<Vec<Ratio>, CliError> {
        self.validate.betas.iter().map(|b| parse_ratio("beta", b)).collect()
    }
}

pub fn parse_ratio(name: &str, text: &str) -> Result<Ratio, CliError> {
    text.parse()
        .map_err(|_| CliError::Usage(format!("{name} = {text:?} is not an exact rational")))
}
