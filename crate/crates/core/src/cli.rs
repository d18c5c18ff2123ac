//! Command-line front end: `spectrum`, `tree`, `verify` and `butterfly`.
//!
//! Every parameter can come from a flag, from a `key = value` config file
//! (`--config`), or from its default, in that order of precedence. The
//! resolved [`RunConfig`] is echoed into every artifact. Output paths are
//! relative to `--out`; files are written atomically.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage error,
//! 3 verification counterexample.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::butterfly::{build_dataset, gap_width_report, render_svg, PanelMode, SvgOptions};
use crate::indexing::{
    annotated_document, boundary_path, gap_index, solve_diophantine, verify_conservation,
    verify_q_recursion, IndexingError,
};
use crate::ratcf::{ContinuedFraction, Int, Rational};
use crate::spectrum::{
    compute_spectrum, gap_convergence, potential_sequence, verify_nesting, LevelSpectra,
    SpectrumError,
};
use crate::tree::{build_tree, SpectralTree, VertexId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "kohmoto",
    version,
    about = "Gap indices and the colored Kohmoto butterfly"
)]
pub struct Cli {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory all output paths are relative to.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bands and indexed gaps of one periodic operator.
    Spectrum(SpectrumArgs),
    /// The spectral tree of a continued fraction.
    Tree(TreeArgs),
    /// Run invariant suites over given or random digit sequences.
    Verify(VerifyArgs),
    /// Dataset and SVG panels of the colored butterfly.
    Butterfly(ButterflyArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Frequency as a reduced fraction `p/q` in (0, 1).
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Comma-separated digits `0,a1,a2,...`; a trailing `1s` repeats 1.
    #[arg(long)]
    pub digits: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Attach the gap index to every G-vertex.
    #[arg(long)]
    pub annotate: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Recursion,
    Conservation,
    Range,
    Oracle,
    Nesting,
    Convergence,
    All,
}

impl Suite {
    const EACH: [Suite; 6] = [
        Suite::Oracle,
        Suite::Range,
        Suite::Recursion,
        Suite::Conservation,
        Suite::Nesting,
        Suite::Convergence,
    ];

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Recursion => "recursion",
            Suite::Conservation => "conservation",
            Suite::Range => "range",
            Suite::Oracle => "oracle",
            Suite::Nesting => "nesting",
            Suite::Convergence => "convergence",
            Suite::All => "all",
        }
    }

    fn spectral(self) -> bool {
        matches!(self, Suite::Nesting | Suite::Convergence)
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Suite as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Number of random digit sequences (ignored with --digits).
    #[arg(long)]
    pub fuzz: Option<usize>,
    /// Random digits are drawn from 1..=max-digit.
    #[arg(long)]
    pub max_digit: Option<Int>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// A single digit sequence instead of random ones; `1s` is the golden mean.
    #[arg(long)]
    pub digits: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Containment slack for the nesting suite; a negative value demands a
    /// strict margin.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Trees with a larger q_depth are skipped by the spectral suites.
    #[arg(long)]
    pub max_q: Option<Int>,
    /// JSON-lines report file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ButterflyArgs {
    #[arg(long)]
    pub qmax: Option<Int>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Write the artifacts even if some rows failed.
    #[arg(long)]
    pub keep_going: bool,
    /// SVG width in pixels.
    #[arg(long)]
    pub width: Option<f64>,
    /// SVG height in pixels.
    #[arg(long)]
    pub height: Option<f64>,
}

/// The fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Spectrum(SpectrumConfig),
    Tree(TreeConfig),
    Verify(VerifyConfig),
    Butterfly(ButterflyConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub alpha: String,
    pub lambda: f64,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub digits: String,
    pub depth: usize,
    pub annotate: bool,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub digits: Option<String>,
    pub fuzz: usize,
    pub max_digit: Int,
    pub seed: u64,
    pub depth: usize,
    pub lambda: f64,
    pub tolerance: f64,
    pub max_q: Int,
    pub report: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButterflyConfig {
    pub qmax: Int,
    pub lambda: f64,
    pub keep_going: bool,
    pub width: f64,
    pub height: f64,
}

const DEFAULT_LAMBDA: f64 = 1.0;
const DEFAULT_TREE_DEPTH: usize = 8;
const DEFAULT_FUZZ: usize = 100;
const DEFAULT_MAX_DIGIT: Int = 5;
const DEFAULT_TOLERANCE: f64 = 1e-8;
const DEFAULT_MAX_Q: Int = 1000;
const DEFAULT_QMAX: Int = 50;
/// Origins of boundary paths are taken from levels up to this one.
const ORIGIN_LEVELS: usize = 4;

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "lambda",
    "output",
    "digits",
    "depth",
    "annotate",
    "suite",
    "fuzz",
    "max-digit",
    "seed",
    "tolerance",
    "max-q",
    "report",
    "qmax",
    "keep-going",
    "width",
    "height",
];

#[derive(Debug)]
enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(m) => write!(f, "error: {m}"),
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn compute(e: impl Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Parsed `key = value` config file. Blank lines and `#` comments are
/// ignored; keys use the long flag names (`max-digit`, `keep-going`, ...).
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", no + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Parses a digit list. A trailing `1s` token (or the whole string `1s`,
/// meaning `0,1s`) is extended with ones up to `min_len` digits.
pub fn parse_digits(text: &str, min_len: usize) -> Result<ContinuedFraction, String> {
    let mut tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens == ["1s"] {
        tokens = vec!["0", "1s"];
    }
    let golden_tail = tokens.last() == Some(&"1s");
    if golden_tail {
        tokens.pop();
    }
    let mut digits = tokens
        .iter()
        .map(|t| {
            t.parse::<Int>()
                .map_err(|_| format!("bad digit `{t}` in `{text}`"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if golden_tail {
        while digits.len() < min_len.max(tokens.len() + 1) {
            digits.push(1);
        }
    }
    ContinuedFraction::new(digits).map_err(|e| e.to_string())
}

fn is_open_ended(text: &str) -> bool {
    text.trim().ends_with("1s")
}

fn resolve(cli: &Cli, file: &ConfigFile) -> Result<RunConfig, CliError> {
    Ok(match &cli.command {
        Command::Spectrum(a) => RunConfig::Spectrum(SpectrumConfig {
            alpha: file
                .pick(a.alpha.clone(), "alpha")?
                .ok_or_else(|| usage("--alpha is required"))?,
            lambda: file.pick(a.lambda, "lambda")?.unwrap_or(DEFAULT_LAMBDA),
            output: file.pick(a.output.clone(), "output")?,
        }),
        Command::Tree(a) => {
            let digits: String = file
                .pick(a.digits.clone(), "digits")?
                .ok_or_else(|| usage("--digits is required"))?;
            let depth = match file.pick(a.depth, "depth")? {
                Some(d) => d,
                None if is_open_ended(&digits) => DEFAULT_TREE_DEPTH,
                None => parse_digits(&digits, 0)
                    .map_err(usage)?
                    .len()
                    .saturating_sub(1),
            };
            RunConfig::Tree(TreeConfig {
                digits,
                depth,
                annotate: file.switch(a.annotate, "annotate")?,
                output: file.pick(a.output.clone(), "output")?,
            })
        }
        Command::Verify(a) => {
            let suite = file.pick(a.suite, "suite")?.unwrap_or(Suite::All);
            RunConfig::Verify(VerifyConfig {
                suite,
                digits: file.pick(a.digits.clone(), "digits")?,
                fuzz: file.pick(a.fuzz, "fuzz")?.unwrap_or(DEFAULT_FUZZ),
                max_digit: file
                    .pick(a.max_digit, "max-digit")?
                    .unwrap_or(DEFAULT_MAX_DIGIT),
                seed: file.pick(a.seed, "seed")?.unwrap_or(0),
                depth: file.pick(a.depth, "depth")?.unwrap_or(DEFAULT_TREE_DEPTH),
                lambda: file.pick(a.lambda, "lambda")?.unwrap_or(DEFAULT_LAMBDA),
                tolerance: file
                    .pick(a.tolerance, "tolerance")?
                    .unwrap_or(DEFAULT_TOLERANCE),
                max_q: file.pick(a.max_q, "max-q")?.unwrap_or(DEFAULT_MAX_Q),
                report: file
                    .pick(a.report.clone(), "report")?
                    .unwrap_or_else(|| PathBuf::from(format!("verify-{}.jsonl", suite.name()))),
            })
        }
        Command::Butterfly(a) => {
            let defaults = SvgOptions::default();
            RunConfig::Butterfly(ButterflyConfig {
                qmax: file.pick(a.qmax, "qmax")?.unwrap_or(DEFAULT_QMAX),
                lambda: file.pick(a.lambda, "lambda")?.unwrap_or(DEFAULT_LAMBDA),
                keep_going: file.switch(a.keep_going, "keep-going")?,
                width: file.pick(a.width, "width")?.unwrap_or(defaults.width),
                height: file.pick(a.height, "height")?.unwrap_or(defaults.height),
            })
        }
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Io<'a> {
    out_dir: PathBuf,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn path(&self, rel: &Path) -> PathBuf {
        self.out_dir.join(rel)
    }

    fn write_file(&self, rel: &Path, bytes: &[u8]) -> Result<(), CliError> {
        let p = self.path(rel);
        write_atomic(&p, bytes).map_err(|e| compute(format!("writing {}: {e}", p.display())))
    }

    /// File when `output` is set, stdout otherwise.
    fn emit(&mut self, output: Option<&Path>, text: &str) -> Result<(), CliError> {
        match output {
            Some(rel) => self.write_file(rel, text.as_bytes()),
            None => writeln!(self.stdout, "{text}").map_err(compute),
        }
    }

    fn warn(&mut self, msg: impl Display) {
        let _ = writeln!(self.stderr, "warning: {msg}");
    }

    fn say(&mut self, msg: impl Display) {
        let _ = writeln!(self.stdout, "{msg}");
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out_dir: cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        stdout,
        stderr,
    };
    match execute(&cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "{e}");
            e.code()
        }
    }
}

fn execute(cli: &Cli, io: &mut Io) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("reading {}: {e}", p.display())))?;
            ConfigFile::parse(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let config = resolve(cli, &file)?;
    match &config {
        RunConfig::Spectrum(c) => cmd_spectrum(&config, c, io),
        RunConfig::Tree(c) => cmd_tree(&config, c, io),
        RunConfig::Verify(c) => cmd_verify(&config, c, io),
        RunConfig::Butterfly(c) => cmd_butterfly(&config, c, io),
    }
}

#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(config: &RunConfig, body: T) -> Result<String, CliError> {
    serde_json::to_string_pretty(&WithConfig { config, body }).map_err(compute)
}

fn cmd_spectrum(config: &RunConfig, c: &SpectrumConfig, io: &mut Io) -> Result<i32, CliError> {
    let alpha: Rational = c.alpha.parse().map_err(usage)?;
    let pot = potential_sequence(alpha, c.lambda).map_err(usage)?;
    let spectrum = compute_spectrum(&pot).map_err(compute)?;
    let doc = spectrum.to_document().map_err(compute)?;
    io.emit(c.output.as_deref(), &to_json(config, doc)?)?;
    Ok(EXIT_OK)
}

fn cmd_tree(config: &RunConfig, c: &TreeConfig, io: &mut Io) -> Result<i32, CliError> {
    let digits = parse_digits(&c.digits, c.depth + 1).map_err(usage)?;
    let tree = build_tree(&digits, c.depth).map_err(usage)?;
    let doc = if c.annotate {
        annotated_document(&tree).map_err(compute)?
    } else {
        tree.to_document()
    };
    io.emit(c.output.as_deref(), &to_json(config, doc)?)?;
    Ok(EXIT_OK)
}

/// One line of the verify report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReportLine {
    Config {
        config: RunConfig,
    },
    Suite {
        suite: Suite,
        digits: String,
        depth: usize,
        checks: usize,
        failures: usize,
        skipped: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Counterexample {
        suite: Suite,
        digits: String,
        vertex: VertexId,
        detail: Value,
    },
    Summary {
        checks: usize,
        failures: usize,
        skipped: usize,
        passed: bool,
    },
}

/// Outcome of one suite on one tree.
#[derive(Debug, Default)]
pub struct SuiteOutcome {
    pub checks: usize,
    pub skipped: usize,
    pub counterexamples: Vec<(VertexId, Value)>,
    pub note: Option<String>,
}

impl SuiteOutcome {
    fn check(&mut self, ok: bool, v: VertexId, detail: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.counterexamples.push((v, detail()));
        }
    }
}

fn all_gaps(tree: &SpectralTree) -> Result<Vec<VertexId>, CliError> {
    let mut out = Vec::new();
    for k in 0..=tree.depth() {
        out.extend(tree.gaps_at(k).map_err(compute)?);
    }
    Ok(out)
}

/// Nonzero-index G-vertices on levels `0..=min(ORIGIN_LEVELS, depth - 1)`.
fn path_origins(tree: &SpectralTree) -> Result<Vec<VertexId>, CliError> {
    let top = ORIGIN_LEVELS.min(tree.depth().saturating_sub(1));
    let mut out = Vec::new();
    for k in 0..=top {
        for v in tree.gaps_at(k).map_err(compute)? {
            if gap_index(tree, v).map_err(compute)?.value != 0 {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Runs one suite (not `All`) on one tree.
pub fn run_suite(
    suite: Suite,
    tree: &SpectralTree,
    spectra: Option<&LevelSpectra>,
    tolerance: f64,
) -> Result<SuiteOutcome, String> {
    run_suite_inner(suite, tree, spectra, tolerance).map_err(|e| e.to_string())
}

fn run_suite_inner(
    suite: Suite,
    tree: &SpectralTree,
    spectra: Option<&LevelSpectra>,
    tolerance: f64,
) -> Result<SuiteOutcome, CliError> {
    let mut o = SuiteOutcome::default();
    match suite {
        Suite::Oracle => {
            for v in all_gaps(tree)? {
                let g = gap_index(tree, v).map_err(compute)?;
                let (za, zb) = tree.prefix_counts(v).map_err(compute)?;
                let conv = tree.convergent(v.level).map_err(compute)?;
                let n = (za + zb) as Int;
                let oracle = solve_diophantine(n, conv.p, conv.q).map_err(compute)?;
                o.check(
                    g.value == oracle,
                    v,
                    || json!({"n": n, "p": conv.p, "q": conv.q, "tree": g.value, "oracle": oracle}),
                );
            }
        }
        Suite::Range => {
            for v in all_gaps(tree)? {
                let g = gap_index(tree, v).map_err(compute)?;
                o.check(
                    (0..g.q).contains(&g.raw),
                    v,
                    || json!({"raw": g.raw, "q": g.q}),
                );
            }
        }
        Suite::Recursion => {
            for v in all_gaps(tree)? {
                if v.level >= tree.depth() {
                    continue;
                }
                match verify_q_recursion(tree, v) {
                    Ok(r) => o.check(r.passed(), v, || json!(r)),
                    Err(IndexingError::NeighborMissing(..)) => o.skipped += 1,
                    Err(e) => return Err(compute(e)),
                }
            }
        }
        Suite::Conservation => {
            for v in path_origins(tree)? {
                let path = boundary_path(tree, v, tree.depth() - v.level).map_err(compute)?;
                let r = verify_conservation(tree, &path).map_err(compute)?;
                for rec in &r.records {
                    o.check(
                        rec.passed,
                        rec.vertex,
                        || json!({"origin": v, "origin_index": r.origin, "record": rec}),
                    );
                }
            }
        }
        Suite::Nesting => {
            let spectra = spectra.expect("spectral suites get level spectra");
            let r = verify_nesting(tree, spectra, tolerance).map_err(compute)?;
            o.checks = r.checks;
            o.note = Some(format!("worst excess {:e}", r.worst_excess));
            for viol in r.violations {
                o.counterexamples.push((viol.vertex, json!(viol)));
            }
        }
        Suite::Convergence => {
            let spectra = spectra.expect("spectral suites get level spectra");
            let mut worst_ratio: f64 = 0.0;
            for v in path_origins(tree)? {
                if tree.depth() - v.level < 2 {
                    continue;
                }
                match gap_convergence(tree, spectra, v, tree.depth() - v.level) {
                    Ok(r) => {
                        worst_ratio = worst_ratio.max(r.width_ratio);
                        o.check(r.passed(), v, || json!(r));
                    }
                    Err(SpectrumError::NotABand(_)) => o.skipped += 1,
                    Err(e) => return Err(compute(e)),
                }
            }
            o.note = Some(format!("largest final/initial width ratio {worst_ratio:e}"));
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok(o)
}

/// The digit sequences a verify run covers, and the depth used for them.
fn verify_corpus(
    c: &VerifyConfig,
    io: &mut Io,
) -> Result<Vec<(ContinuedFraction, usize)>, CliError> {
    if let Some(text) = &c.digits {
        let cf = parse_digits(text, c.depth + 1).map_err(usage)?;
        let available = cf.len().saturating_sub(1);
        let depth = if available < c.depth {
            io.warn(format!(
                "digits `{text}` support depth {available} only; verifying to depth {available}"
            ));
            available
        } else {
            c.depth
        };
        return Ok(vec![(cf, depth)]);
    }
    if c.max_digit < 1 {
        return Err(usage("--max-digit must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    (0..c.fuzz)
        .map(|_| {
            let digits = std::iter::once(0)
                .chain((0..c.depth).map(|_| rng.gen_range(1..=c.max_digit)))
                .collect();
            Ok((ContinuedFraction::new(digits).map_err(compute)?, c.depth))
        })
        .collect()
}

fn cmd_verify(config: &RunConfig, c: &VerifyConfig, io: &mut Io) -> Result<i32, CliError> {
    if !c.tolerance.is_finite() {
        return Err(usage("--tolerance must be finite"));
    }
    let suites = c.suite.expand();
    if suites.iter().any(|s| s.spectral()) && !(c.lambda > 0.0 && c.lambda.is_finite()) {
        return Err(usage(
            "the spectral suites need a finite lambda > 0 (the tree orders bands for positive coupling)",
        ));
    }
    let corpus = verify_corpus(c, io)?;
    let mut lines = vec![ReportLine::Config {
        config: config.clone(),
    }];
    let (mut checks, mut failures, mut skipped) = (0, 0, 0);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(compute)?;
    let mut per_suite: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();

    for (cf, depth) in &corpus {
        let tree = build_tree(cf, *depth).map_err(compute)?;
        let q = tree.convergent(*depth).map_err(compute)?.q;
        let spectral_ok = q <= c.max_q;
        let spectra = if spectral_ok && suites.iter().any(|s| s.spectral()) {
            Some(
                single
                    .install(|| LevelSpectra::compute(&tree, c.lambda))
                    .map_err(compute)?,
            )
        } else {
            None
        };
        for &suite in &suites {
            let outcome = if suite.spectral() && !spectral_ok {
                io.warn(format!(
                    "{} skipped for {cf}: q_{depth} = {q} exceeds --max-q {}",
                    suite.name(),
                    c.max_q
                ));
                SuiteOutcome {
                    skipped: 1,
                    note: Some(format!("q = {q} exceeds max-q")),
                    ..SuiteOutcome::default()
                }
            } else {
                run_suite_inner(suite, &tree, spectra.as_ref(), c.tolerance)?
            };
            let n_fail = outcome.counterexamples.len();
            checks += outcome.checks;
            failures += n_fail;
            skipped += outcome.skipped;
            let entry = per_suite.entry(suite.name()).or_default();
            entry.0 += outcome.checks;
            entry.1 += n_fail;
            entry.2 += outcome.skipped;
            lines.push(ReportLine::Suite {
                suite,
                digits: cf.to_string(),
                depth: *depth,
                checks: outcome.checks,
                failures: n_fail,
                skipped: outcome.skipped,
                note: outcome.note,
            });
            for (vertex, detail) in outcome.counterexamples {
                lines.push(ReportLine::Counterexample {
                    suite,
                    digits: cf.to_string(),
                    vertex,
                    detail,
                });
            }
        }
    }
    let passed = failures == 0;
    lines.push(ReportLine::Summary {
        checks,
        failures,
        skipped,
        passed,
    });
    let mut text = String::new();
    for l in &lines {
        text.push_str(&serde_json::to_string(l).map_err(compute)?);
        text.push('\n');
    }
    io.write_file(&c.report, text.as_bytes())?;
    for (name, (ch, f, s)) in &per_suite {
        io.say(format!("{name}: {ch} checks, {f} failures, {s} skipped"));
    }
    io.say(format!(
        "{} sequence(s), {checks} checks, {failures} failures; report {}",
        corpus.len(),
        io.path(&c.report).display()
    ));
    Ok(if passed { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

pub const BUTTERFLY_CSV: &str = "butterfly.csv";
pub const BUTTERFLY_JSON: &str = "butterfly.json";
pub const BUTTERFLY_GAPS_SVG: &str = "butterfly-gaps.svg";
pub const BUTTERFLY_BANDS_SVG: &str = "butterfly-bands.svg";
pub const GAP_WIDTH_REPORT: &str = "gap-widths.txt";

fn cmd_butterfly(config: &RunConfig, c: &ButterflyConfig, io: &mut Io) -> Result<i32, CliError> {
    if c.qmax < 2 {
        return Err(usage(format!("--qmax must be at least 2, got {}", c.qmax)));
    }
    if !c.lambda.is_finite() {
        return Err(usage("--lambda must be finite"));
    }
    if !(c.width > 0.0 && c.height > 0.0) {
        return Err(usage("--width and --height must be positive"));
    }
    let dataset = build_dataset(c.qmax, c.lambda).map_err(compute)?;
    let failed: Vec<_> = dataset.failed_rows().collect();
    for r in &failed {
        io.warn(format!(
            "row {}: {}",
            r.alpha,
            r.error.as_deref().unwrap_or("failed")
        ));
    }
    if !failed.is_empty() && !c.keep_going {
        return Err(compute(format!(
            "{} of {} rows failed (use --keep-going to write the rest)",
            failed.len(),
            dataset.rows.len()
        )));
    }
    let echo = serde_json::to_string(config).map_err(compute)?;
    let svg = |mode| {
        let opts = SvgOptions {
            width: c.width,
            height: c.height,
            mode,
            comment: Some(format!("config: {echo}")),
            ..SvgOptions::default()
        };
        render_svg(&dataset, &opts).map_err(compute)
    };
    let gaps_svg = svg(PanelMode::Gaps)?;
    let bands_svg = svg(PanelMode::Bands)?;
    let csv = dataset
        .to_csv(Some(&format!("config: {echo}")))
        .map_err(compute)?;
    let json = dataset.to_json(Some(config)).map_err(compute)?;
    let report = format!("# config: {echo}\n{}", gap_width_report(&dataset));

    io.write_file(Path::new(BUTTERFLY_CSV), csv.as_bytes())?;
    io.write_file(Path::new(BUTTERFLY_JSON), json.as_bytes())?;
    io.write_file(Path::new(BUTTERFLY_GAPS_SVG), gaps_svg.as_bytes())?;
    io.write_file(Path::new(BUTTERFLY_BANDS_SVG), bands_svg.as_bytes())?;
    io.write_file(Path::new(GAP_WIDTH_REPORT), report.as_bytes())?;
    io.say(format!(
        "{} rows ({} failed), {} distinct indices, written to {}",
        dataset.rows.len(),
        failed.len(),
        dataset.produced_indices().len(),
        io.out_dir.display()
    ));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_shorthand() {
        assert_eq!(parse_digits("1s", 5).unwrap().to_string(), "0,1,1,1,1");
        assert_eq!(parse_digits("0,3,1s", 5).unwrap().to_string(), "0,3,1,1,1");
        assert_eq!(parse_digits("0,3,1s", 0).unwrap().to_string(), "0,3,1");
        assert_eq!(parse_digits("0,2,2", 9).unwrap().len(), 3);
        assert!(parse_digits("0,x", 2).is_err());
        assert!(parse_digits("1,2", 2).is_err());
    }

    #[test]
    fn config_file_parsing() {
        let f = ConfigFile::parse("# c\nlambda = 2.5\n\nmax_digit=3\n").unwrap();
        assert_eq!(f.get::<f64>("lambda").unwrap(), Some(2.5));
        assert_eq!(f.get::<Int>("max-digit").unwrap(), Some(3));
        assert_eq!(f.pick(Some(1.0), "lambda").unwrap(), Some(1.0));
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("lambda").is_err());
        assert!(f.get::<Int>("lambda").is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::All.expand().len(), 6);
    }
}
