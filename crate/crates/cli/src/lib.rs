//! Command-line driver: `validate`, `build`, `analyze` and `free`.
//!
//! Exit codes: 0 success, 1 mathematical or verification failure, 2 usage
//! or I/O failure.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use growthforge_core::analyzer::{
    check_growth_sandwich, dims_up_to, max_safe_length, minimal_forbidden_words, sandwich_with_dim,
    verify_recurrence_gaps, DimensionReport, EntropyReport, ForbiddenWords, NonperiodicityReport, RecurrenceReport,
    SandwichReport,
};
use growthforge_core::construction::{
    build_free_power_system, build_plain, build_uniformly_recurrent, BuildMode, CaptureEntry,
};
use growthforge_core::freesub::{compute_t, free_params, verify_free_generators, FreenessReport};
use growthforge_core::growthfn::{
    check_basic, check_capture_conditions, check_rapid_growth, compute_mu, BasicReport, CaptureConditionsReport,
    RapidGrowthReport,
};
use growthforge_core::persist::{self, PersistError};
use growthforge_core::{AnalyzeError, BuildError, FreeError, GrowthError, GrowthFunction, LevelSystem, Verdict};
use serde::Serialize;

use config::{ChooserKind, FamilyName, Mode, Overrides, RunConfig, DEFAULT_DEPTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default system file written by `build`.
pub const DEFAULT_SYSTEM_FILE: &str = "system.json";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, unreadable or tampered files.
    #[error("{0}")]
    Usage(String),
    /// The mathematics does not work out for this configuration.
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Math(_) => EXIT_FAIL,
        }
    }
}

fn growth_error(e: GrowthError) -> CliError {
    match e {
        GrowthError::HorizonTooSmall { .. } => CliError::Math(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn build_error(e: BuildError) -> CliError {
    match e {
        BuildError::Growth(g) => growth_error(g),
        BuildError::Invalid(_) | BuildError::AlphabetSize(_) => CliError::Usage(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn analyze_error(e: AnalyzeError) -> CliError {
    match e {
        AnalyzeError::Build(b) => build_error(b),
        _ => CliError::Usage(e.to_string()),
    }
}

fn free_error(e: FreeError) -> CliError {
    match e {
        FreeError::Analyze(a) => analyze_error(a),
        _ => CliError::Usage(e.to_string()),
    }
}

fn persist_error(e: PersistError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Every report is wrapped with the command, the effective configuration
/// and, when a system is involved, its digest.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_digest: Option<String>,
    pub verdict: Verdict,
    pub report: T,
}

pub fn render<T: Serialize>(envelope: &Envelope<'_, T>) -> String {
    let mut s = serde_json::to_string_pretty(envelope).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct MuEntry {
    pub t: u32,
    pub mu: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionVerdicts {
    pub basic: bool,
    pub rapid_growth: bool,
    /// `β f(2^(n+1)) <= f(2^n)^2` eventually, for every configured β.
    pub square_margin: Option<bool>,
    /// A finite tail bound exists for the product condition.
    pub product: Option<bool>,
    pub mu: bool,
    pub capture_required: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub family: String,
    /// Level horizon actually used for the dyadic conditions.
    pub levels: u32,
    pub basic: BasicReport,
    pub rapid_growth: RapidGrowthReport,
    pub capture_conditions: Option<CaptureConditionsReport>,
    pub mu: Vec<MuEntry>,
    pub verdicts: ConditionVerdicts,
}

impl HypothesisReport {
    pub fn required_ok(&self) -> bool {
        let v = &self.verdicts;
        let capture = v.square_margin == Some(true) && v.product == Some(true) && v.mu;
        v.basic && v.rapid_growth && (!v.capture_required || capture)
    }
}

/// Largest level `L <= requested` with `f` evaluable at `1, 2, …, 2^(L+1)`.
fn evaluable_levels(g: &GrowthFunction, requested: u32) -> u32 {
    let mut l = requested.min(60);
    while l > 0 && !(0..=l + 1).all(|k| g.covers(1u64 << k)) {
        l -= 1;
    }
    l
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<HypothesisReport, CliError> {
    let family = cfg.family()?;
    let g = GrowthFunction::new(family.clone()).map_err(growth_error)?;
    let v = &cfg.validate;
    if v.horizon < 4 {
        return Err(CliError::Usage("validate.horizon must be at least 4".into()));
    }
    if v.betas.is_empty() {
        return Err(CliError::Usage("validate.betas must not be empty".into()));
    }
    let betas: Vec<_> = cfg.betas()?.into_iter().map(|b| b.0).collect();
    let basic = check_basic(&g, v.horizon).map_err(growth_error)?;
    let rapid_growth = check_rapid_growth(&g, v.horizon).map_err(growth_error)?;
    let levels = evaluable_levels(&g, v.levels);
    let capture_conditions = if levels >= 3 {
        Some(check_capture_conditions(&g, &betas, levels).map_err(growth_error)?)
    } else {
        None
    };
    let mut mu = Vec::new();
    for t in 0..=v.t_max {
        let entry = match compute_mu(&g, t, cfg.build.mu_offset, levels) {
            Ok(m) => MuEntry {
                t,
                mu: Some(m),
                error: None,
            },
            Err(e @ GrowthError::HorizonTooSmall { .. }) => MuEntry {
                t,
                mu: None,
                error: Some(e.to_string()),
            },
            Err(e) => return Err(growth_error(e)),
        };
        mu.push(entry);
    }
    let verdicts = ConditionVerdicts {
        basic: basic.ok(),
        rapid_growth: rapid_growth.alpha.is_some(),
        square_margin: capture_conditions.as_ref().map(|c| c.all_betas_ok()),
        product: capture_conditions.as_ref().map(|c| c.product_tail_estimate.is_some()),
        mu: mu.iter().all(|m| m.mu.is_some()),
        capture_required: v.require_capture,
    };
    Ok(HypothesisReport {
        family: family.to_string(),
        levels,
        basic,
        rapid_growth,
        capture_conditions,
        mu,
        verdicts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub mode: Mode,
    pub family: String,
    pub depth: u32,
    pub alphabet: String,
    pub cset_sizes: Vec<usize>,
    pub captures: Vec<CaptureEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free: Option<growthforge_core::FreeParams>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Smallest depth at which products of `len` generators of degree `2^t`
/// fit, and at least one capacity level `r >= 1` exists.
pub fn free_depth(t: u32, len: usize) -> u32 {
    let longest = (len.max(1) as u64) << t;
    let mut d = 1;
    while (1u64 << (d - 1)) < longest {
        d += 1;
    }
    d.max(t + 2)
}

pub fn cmd_build(cfg: &RunConfig, force: bool) -> Result<(LevelSystem, BuildReport), CliError> {
    let mode = cfg.build.mode;
    let (sys, free) = if mode == Mode::Free {
        if cfg.growth.family != FamilyName::Geometric {
            return Err(CliError::Usage("free mode uses the geometric family".into()));
        }
        let epsilon = cfg.epsilon()?;
        let t = compute_t(&epsilon).map_err(free_error)?;
        let depth = cfg.build.depth.unwrap_or_else(|| free_depth(t, cfg.free.products_len));
        let (sys, params) = build_free_power_system(epsilon, depth).map_err(build_error)?;
        (sys, Some(params))
    } else {
        let g = GrowthFunction::new(cfg.family()?).map_err(growth_error)?;
        let depth = cfg.build.depth.unwrap_or(DEFAULT_DEPTH);
        if !force {
            let basic = check_basic(&g, 1u64 << depth.clamp(1, 6)).map_err(growth_error)?;
            if !basic.ok() {
                return Err(CliError::Math(format!(
                    "growth function fails monotonicity or submultiplicativity: {}",
                    serde_json::to_string(&basic).expect("reports serialize")
                )));
            }
        }
        let sys = match mode {
            Mode::Plain => build_plain(g, cfg.chooser(), depth),
            _ => build_uniformly_recurrent(
                g,
                depth,
                cfg.build.captures,
                cfg.build.mu_offset,
                cfg.build.horizon,
                cfg.chooser(),
            ),
        }
        .map_err(build_error)?;
        (sys, None)
    };
    let mut warnings = Vec::new();
    let done = sys.capture_log().len();
    if mode == Mode::Recurrent && done < cfg.build.captures {
        warnings.push(format!(
            "{done} of {} requested captures fit below depth {}",
            cfg.build.captures,
            sys.depth()
        ));
    }
    let report = BuildReport {
        mode,
        family: sys.growth().family().to_string(),
        depth: sys.depth(),
        alphabet: sys.alphabet().names().iter().collect(),
        cset_sizes: sys.csets().iter().map(|c| c.len()).collect(),
        captures: sys.capture_log().entries.clone(),
        free,
        warnings,
    };
    Ok((sys, report))
}

pub fn load_system(path: &Path) -> Result<LevelSystem, CliError> {
    persist::load_system(path).map_err(persist_error)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub depth: u32,
    pub n_max: usize,
    pub dimensions: DimensionReport,
    pub sandwich: Vec<SandwichReport>,
    pub entropy: EntropyReport,
    pub nonperiodicity: Option<NonperiodicityReport>,
    pub recurrence: RecurrenceReport,
    pub forbidden: ForbiddenWords,
}

impl AnalyzeReport {
    /// All hard assertions; soft sandwich bounds and entropy bands are
    /// report-only.
    pub fn passed(&self) -> bool {
        self.dimensions.submultiplicative
            && self.sandwich.iter().all(|s| s.hard_ok())
            && self.nonperiodicity.as_ref().is_none_or(|p| p.verdict.passed())
            && self.recurrence.verdict.passed()
    }
}

pub fn cmd_analyze(sys: &LevelSystem, cfg: &RunConfig) -> Result<AnalyzeReport, CliError> {
    let a = &cfg.analyze;
    let n_max = a.n_max.min(max_safe_length(sys.depth()));
    if n_max == 0 {
        return Err(CliError::Usage("analysis needs n_max >= 1 and depth >= 1".into()));
    }
    let dims = dims_up_to(sys, n_max).map_err(analyze_error)?;
    let mut sandwich = Vec::new();
    for n in 1..=a.sandwich_max.min(sys.depth().saturating_sub(1)) {
        let len = 1usize << n;
        let s = if len <= n_max {
            sandwich_with_dim(sys, n, dims[len - 1])
        } else {
            check_growth_sandwich(sys, n)
        };
        sandwich.push(s.map_err(analyze_error)?);
    }
    let nonperiodicity = (n_max >= 2).then(|| NonperiodicityReport::from_dims(&dims));
    let recurrence = verify_recurrence_gaps(sys, a.scan_cap, a.sample_seed).map_err(analyze_error)?;
    let forbidden = minimal_forbidden_words(sys, a.forbidden_max.min(n_max)).map_err(analyze_error)?;
    Ok(AnalyzeReport {
        depth: sys.depth(),
        n_max,
        entropy: EntropyReport::from_dims(sys, &dims),
        dimensions: DimensionReport::from_dims(sys.depth(), &dims),
        sandwich,
        nonperiodicity,
        recurrence,
        forbidden,
    })
}

/// Loads a free system or builds one from ε, then verifies the generators.
pub fn cmd_free(cfg: &RunConfig, system: Option<&LevelSystem>) -> Result<(FreenessReport, String), CliError> {
    let built;
    let sys = match system {
        Some(sys) => sys,
        None => {
            let mut c = cfg.clone();
            c.build.mode = Mode::Free;
            c.growth.family = FamilyName::Geometric;
            built = cmd_build(&c, true)?.0;
            &built
        }
    };
    let epsilon = match sys.mode() {
        BuildMode::Free { epsilon } => epsilon.clone(),
        _ => return Err(CliError::Usage("system was not built in free mode".into())),
    };
    let params = free_params(&epsilon, sys.depth()).map_err(free_error)?;
    let report = verify_free_generators(sys, &params, cfg.free.products_len).map_err(free_error)?;
    Ok((report, persist::system_digest(sys)))
}

#[derive(Parser, Debug)]
#[command(
    name = "growthforge",
    version,
    about = "Level systems of monomial algebras: build, analyze, verify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the growth-function hypotheses and write a hypothesis report.
    Validate,
    /// Build a level system and write it to the system file.
    Build,
    /// Analyze a stored system: dimensions, sandwich, recurrence, forbidden words.
    Analyze {
        /// System file written by `build`.
        system: PathBuf,
    },
    /// Verify the free generators of a free-mode system, or of one built from ε.
    Free {
        #[arg(long)]
        system: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyName>,
    /// Exact rational, `p/q` or decimal.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// Exponent of `exp_power`.
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Table values at 1, 2, 4, … (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub table: Option<Vec<u64>>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub chooser: Option<ChooserKind>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Capture budget K.
    #[arg(long, global = true)]
    pub captures: Option<usize>,
    #[arg(long, global = true)]
    pub mu_offset: Option<u32>,
    /// Level horizon for μ during capture.
    #[arg(long, global = true)]
    pub horizon: Option<u32>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub forbidden_max: Option<usize>,
    #[arg(long, global = true)]
    pub scan_cap: Option<usize>,
    #[arg(long, global = true)]
    pub products_len: Option<usize>,
    /// System file for `build`, report file otherwise (default stdout).
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Dimension CSV written by `analyze`.
    #[arg(long, global = true)]
    pub csv: Option<String>,
    /// Build even if the growth function fails the basic checks.
    #[arg(long, global = true)]
    pub force: bool,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            family: self.family,
            epsilon: self.epsilon.clone(),
            r: self.r.clone(),
            table: self.table.clone(),
            mode: self.mode,
            depth: self.depth,
            chooser: self.chooser,
            seed: self.seed,
            captures: self.captures,
            mu_offset: self.mu_offset,
            horizon: self.horizon,
            n_max: self.nmax,
            forbidden_max: self.forbidden_max,
            scan_cap: self.scan_cap,
            products_len: self.products_len,
            out: self.out.clone(),
            csv: self.csv.clone(),
        }
    }

    pub fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(self.overrides());
        Ok(cfg)
    }
}

fn write_file(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))
}

/// Writes the report to `output.out` or to `stdout`.
fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output.out {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write report: {e}"))),
    }
}

fn exit_for(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = cli.flags.config()?;
    match &cli.command {
        Command::Validate => {
            let report = cmd_validate(&cfg)?;
            let passed = report.required_ok();
            let env = Envelope {
                command: "validate",
                config: &cfg,
                system_digest: None,
                verdict: Verdict::from_bool(passed),
                report,
            };
            emit(&cfg, &render(&env), stdout)?;
            Ok(exit_for(passed))
        }
        Command::Build => {
            let (sys, report) = cmd_build(&cfg, cli.flags.force)?;
            let path = cfg.output.out.as_deref().unwrap_or(DEFAULT_SYSTEM_FILE);
            persist::save_system(&sys, Path::new(path)).map_err(persist_error)?;
            let env = Envelope {
                command: "build",
                config: &cfg,
                system_digest: Some(persist::system_digest(&sys)),
                verdict: Verdict::Pass,
                report,
            };
            stdout
                .write_all(render(&env).as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write report: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::Analyze { system } => {
            let sys = load_system(system)?;
            let report = cmd_analyze(&sys, &cfg)?;
            if let Some(csv) = &cfg.output.csv {
                write_file(csv, &report.dimensions.to_csv())?;
            }
            let passed = report.passed();
            let env = Envelope {
                command: "analyze",
                config: &cfg,
                system_digest: Some(persist::system_digest(&sys)),
                verdict: Verdict::from_bool(passed),
                report,
            };
            emit(&cfg, &render(&env), stdout)?;
            Ok(exit_for(passed))
        }
        Command::Free { system } => {
            let loaded = system.as_deref().map(load_system).transpose()?;
            let (report, digest) = cmd_free(&cfg, loaded.as_ref())?;
            let passed = report.verdict.passed();
            let env = Envelope {
                command: "free",
                config: &cfg,
                system_digest: Some(digest),
                verdict: report.verdict,
                report,
            };
            emit(&cfg, &render(&env), stdout)?;
            Ok(exit_for(passed))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return EXIT_USAGE;
            }
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
