//! The `mfdim` command line: `generate`, `dimension`, `verify` and `census`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid input or failed
//! validation, 3 budget exceeded, 4 a theorem check failed.
//!
//! Reports are `key = value` lines in a fixed order, so identical inputs give
//! byte-identical output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::budget::Budget;
use crate::combin::{
    census_enumerate, half_sum_inequality, majority_short_count, multinomial_census,
    ENUMERATION_LIMIT,
};
use crate::curvegen::{
    archimedean_spiral, contract_iterate, expand_iterate, logarithmic_spiral, Polyline, SvgOptions,
};
use crate::dims::{
    hausdorff_dimension, mf_dimension_estimate, mf_dimension_estimate_spiral,
    mf_dimension_resolvable, minkowski_dimension_estimate, verify_theorems, DimensionEstimate,
    EstimateConfig, TheoremReport, Verdict, VerifyConfig, MORAN_TOL,
};
use crate::error::Error;
use crate::model::{parse_rule, validate_rule, GeneratorRule, Severity, DEFAULT_VALIDATION_DEPTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_THEOREM: i32 = 4;

/// Largest `α` and `N` of the combinatorial suites run by `verify`.
pub const SUITE_MAX_ALPHA: u32 = 50;
pub const SUITE_MAX_N: u32 = 10;
/// Largest (even) `k` of the combinatorial suites.
pub const SUITE_MAX_K: u32 = 60;

#[derive(Debug, Parser)]
#[command(
    name = "mfdim",
    version,
    about = "Fractal curves and their Hausdorff, Minkowski and Mendès France dimensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a contractive or expanded iterate as a vertex file and/or SVG.
    Generate(GenerateArgs),
    /// Closed-form and estimated dimensions of a rule or a spiral.
    Dimension(DimensionArgs),
    /// Check the dimension theorems and the combinatorial identities.
    Verify(VerifyArgs),
    /// Exact segment census for N maps at step k.
    Census(CensusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Contract,
    Expand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpiralKind {
    Archimedean,
    Logarithmic,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    rule: PathBuf,
    #[arg(long, value_enum, default_value = "contract")]
    mode: Mode,
    /// 1-based segment index whose reciprocal ratio drives the expansion.
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long)]
    k: u32,
    /// Vertex file, one `x y` pair per line.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 800)]
    height: u32,
    #[arg(long, default_value_t = 1.0)]
    stroke_scale: f64,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Sausage width.
    #[arg(long, default_value_t = crate::dims::estimate::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Relative refinement tolerance of the area rasterizer.
    #[arg(long, default_value_t = crate::dims::estimate::DEFAULT_RASTER_TOL)]
    tol: f64,
    /// Trailing samples in the slope fit (default: half the samples, at least 3).
    #[arg(long)]
    fit_window: Option<usize>,
    /// Write the structured report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DimensionArgs {
    #[arg(long, conflicts_with = "spiral", required_unless_present = "spiral")]
    rule: Option<PathBuf>,
    /// Step range `a..b` (inclusive).
    #[arg(long, value_parser = parse_range, default_value = "2..7")]
    k: RangeInclusive<u32>,
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long, value_enum)]
    spiral: Option<SpiralKind>,
    /// Archimedean spiral step.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Longest Archimedean arc; samples are geometric from a hundredth of it.
    #[arg(long, default_value_t = 10_000.0)]
    max_length: f64,
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Logarithmic spiral growth rate `b` in `r = e^{bθ}`.
    #[arg(long, default_value_t = 0.2)]
    growth: f64,
    /// Logarithmic spiral turns; one sample per whole turn.
    #[arg(long, default_value_t = 12.0)]
    turns: f64,
    /// Also print an aligned table of the samples.
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    estimate: EstimateArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    rule: PathBuf,
    #[arg(long, value_parser = parse_range, default_value = "2..7")]
    k: RangeInclusive<u32>,
    #[command(flatten)]
    estimate: EstimateArgs,
}

#[derive(Debug, Args)]
struct CensusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad range start in {s:?}"))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad range end in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

enum Failure {
    Usage(String),
    Lib(Error),
    Validation(Vec<String>),
    Theorem,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Ordered `key = value` lines.
#[derive(Debug, Default)]
struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = Budget::from_env()
        .map_err(Failure::from)
        .and_then(|budget| match cli.command {
            Command::Generate(a) => generate(a, &budget, out),
            Command::Dimension(a) => dimension(a, &budget, out),
            Command::Verify(a) => verify(a, &budget, out),
            Command::Census(a) => census(a, &budget, out),
        });
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Validation(msgs)) => {
            for m in msgs {
                let _ = writeln!(err, "{m}");
            }
            EXIT_INVALID
        }
        Err(Failure::Theorem) => EXIT_THEOREM,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget { .. } => EXIT_BUDGET,
                _ => EXIT_INVALID,
            }
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, contents: &str) -> CliResult<()> {
    out.write_all(contents.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

/// Loads a rule and checks it at the deepest level (up to the default) that
/// fits the budget.
fn load_rule(path: &Path, budget: &Budget) -> CliResult<GeneratorRule> {
    let rule = parse_rule(&read_file(path)?)
        .map_err(|e| Failure::Validation(vec![format!("{}: {e}", path.display())]))?;
    let mut depth = DEFAULT_VALIDATION_DEPTH;
    while depth > 1 && budget.check_segments(rule.segment_count(), depth).is_err() {
        depth -= 1;
    }
    let report = validate_rule(&rule, depth, budget)?;
    if !report.ok {
        let msgs = report
            .messages
            .iter()
            .filter(|f| f.severity != Severity::Info)
            .map(|f| format!("{}: {:?}: {}", path.display(), f.severity, f.text))
            .collect();
        return Err(Failure::Validation(msgs));
    }
    for f in report
        .messages
        .iter()
        .filter(|f| f.severity == Severity::Warning)
    {
        log::warn!("{}: {}", path.display(), f.text);
    }
    Ok(rule)
}

fn estimate_config(a: &EstimateArgs, budget: &Budget) -> EstimateConfig {
    EstimateConfig {
        epsilon: a.epsilon,
        raster_tol: a.tol,
        fit_window: a.fit_window,
        budget: *budget,
    }
}

fn finish_report(report: &Report, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, &report.text()),
        None => emit(out, &report.text()),
    }
}

fn generate(a: GenerateArgs, budget: &Budget, out: &mut dyn Write) -> CliResult<()> {
    let rule = load_rule(&a.rule, budget)?;
    let curve = match a.mode {
        Mode::Contract => contract_iterate(&rule, a.k, budget)?,
        Mode::Expand => expand_iterate(&rule, a.i, a.k, budget)?,
    };
    if let Some(path) = &a.out {
        write_file(path, &curve.to_text())?;
    }
    if let Some(path) = &a.svg {
        let opts = SvgOptions {
            width: a.width,
            height: a.height,
            stroke_scale: a.stroke_scale,
            ..SvgOptions::default()
        };
        write_file(path, &curve.to_svg(&opts))?;
    }
    let stats = curve.length_stats();
    let mut r = Report::default();
    r.put("segments", stats.count);
    r.put("total_length", stats.total);
    r.put("min_segment", stats.min_seg);
    r.put("max_segment", stats.max_seg);
    emit(out, &r.text())
}

fn put_estimate(r: &mut Report, prefix: &str, e: &DimensionEstimate) {
    r.put(format!("{prefix}.samples"), e.samples.len());
    for s in &e.samples {
        r.put(
            format!("{prefix}.sample[{}]", s.step),
            format!("log_c={} log_a={} ratio={}", s.log_c, s.log_a, s.ratio),
        );
    }
    r.put(format!("{prefix}.fit_window"), e.fit_window);
    r.put(format!("{prefix}.slope"), e.slope);
    for w in &e.warnings {
        r.put(format!("{prefix}.warning"), w);
    }
}

fn dimension(a: DimensionArgs, budget: &Budget, out: &mut dyn Write) -> CliResult<()> {
    let cfg = estimate_config(&a.estimate, budget);
    let mut r = Report::default();
    r.put("epsilon", cfg.epsilon);
    r.put("raster_tol", cfg.raster_tol);
    let est = match (a.spiral, &a.rule) {
        (Some(kind), _) => {
            let family = spiral_family(kind, &a)?;
            r.put("source", format!("{kind:?}").to_lowercase());
            let est = mf_dimension_estimate_spiral(&family, &cfg)?;
            put_estimate(&mut r, "mf", &est);
            est
        }
        (None, Some(path)) => {
            let rule = load_rule(path, budget)?;
            r.put("source", rule.name().unwrap_or("rule"));
            r.put("ratios", join(rule.ratios()));
            r.put("hausdorff", hausdorff_dimension(rule.ratios(), MORAN_TOL)?);
            r.put(
                "resolvable_closed_form",
                mf_dimension_resolvable(rule.ratios())?,
            );
            r.put("expansion_index", a.i);
            r.put("k", format!("{}..{}", a.k.start(), a.k.end()));
            let est = mf_dimension_estimate(&rule, a.i, a.k.clone(), &cfg)?;
            put_estimate(&mut r, "mf", &est);
            let mk = minkowski_dimension_estimate(&rule, a.k.clone(), &cfg)?;
            for s in &mk.samples {
                r.put(
                    format!("minkowski.sample[{}]", s.k),
                    format!("log_epsilon={} log_area={}", s.log_epsilon, s.log_area),
                );
            }
            r.put("minkowski.fit_window", mk.fit_window);
            r.put("minkowski.dimension", mk.dimension);
            est
        }
        (None, None) => {
            return Err(Failure::Usage(
                "either --rule or --spiral is required".into(),
            ))
        }
    };
    finish_report(&r, a.estimate.report.as_deref(), out)?;
    if a.table {
        emit(out, &sample_table(&est))?;
    }
    Ok(())
}

fn sample_table(est: &DimensionEstimate) -> String {
    let mut t = format!(
        "{:>14} {:>10} {:>10} {:>8}\n",
        "step", "log C", "log A", "ratio"
    );
    for s in &est.samples {
        let step = if s.step.fract() == 0.0 {
            s.step.to_string()
        } else {
            format!("{:.3e}", s.step)
        };
        let _ = writeln!(
            t,
            "{step:>14} {:>10.4} {:>10.4} {:>8.4}",
            s.log_c, s.log_a, s.ratio
        );
    }
    let _ = writeln!(
        t,
        "slope over the last {} samples: {:.4}",
        est.fit_window, est.slope
    );
    t
}

fn spiral_family(kind: SpiralKind, a: &DimensionArgs) -> CliResult<Vec<Polyline>> {
    match kind {
        SpiralKind::Archimedean => {
            if a.samples < 2 {
                return Err(Failure::Usage("--samples must be at least 2".into()));
            }
            let last = (a.samples - 1) as f64;
            (0..a.samples)
                .map(|j| {
                    let length = a.max_length * 100f64.powf(j as f64 / last - 1.0);
                    archimedean_spiral(a.step, length).map_err(Failure::from)
                })
                .collect()
        }
        SpiralKind::Logarithmic => {
            let mut turns: Vec<f64> = (1..=a.turns.floor() as u32).map(f64::from).collect();
            if a.turns.fract() > 0.0 {
                turns.push(a.turns);
            }
            if turns.is_empty() {
                return Err(Failure::Usage("--turns must be at least 1".into()));
            }
            turns
                .into_iter()
                .map(|t| logarithmic_spiral(a.growth, t).map_err(Failure::from))
                .collect()
        }
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn put_theorem(r: &mut Report, t: &TheoremReport) {
    let verdict = match t.verdict {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::NotApplicable => "skipped",
    };
    r.put(format!("{}.verdict", t.name), verdict);
    r.put(format!("{}.tolerance", t.name), t.tolerance);
    for (k, v) in &t.details {
        r.put(format!("{}.{k}", t.name), v);
    }
    if let Some(note) = &t.note {
        r.put(format!("{}.note", t.name), note);
    }
}

/// Counts `(cases, violations)` of the half-sum inequality over `α ≤ max_alpha`, even `k ≤ max_k`.
pub fn half_sum_suite(max_alpha: u32, max_k: u32) -> crate::Result<(u32, u32)> {
    let mut cases = 0;
    let mut bad = 0;
    for alpha in 1..=max_alpha {
        for k in (2..=max_k).step_by(2) {
            cases += 1;
            if !half_sum_inequality(alpha, k)?.holds {
                bad += 1;
            }
        }
    }
    Ok((cases, bad))
}

/// Counts `(cases, violations)` of the majority count over `2 ≤ N ≤ max_n`, even `k ≤ max_k`.
pub fn majority_suite(max_n: u32, max_k: u32) -> crate::Result<(u32, u32)> {
    let mut cases = 0;
    let mut bad = 0;
    for n in 2..=max_n {
        for k in (2..=max_k).step_by(2) {
            cases += 1;
            if !majority_short_count(n, k)?.holds {
                bad += 1;
            }
        }
    }
    Ok((cases, bad))
}

fn verify(a: VerifyArgs, budget: &Budget, out: &mut dyn Write) -> CliResult<()> {
    let rule = load_rule(&a.rule, budget)?;
    let cfg = VerifyConfig {
        estimate: estimate_config(&a.estimate, budget),
        ks: a.k.clone(),
        ..VerifyConfig::default()
    };
    let mut r = Report::default();
    r.put("source", rule.name().unwrap_or("rule"));
    r.put("ratios", join(rule.ratios()));
    r.put("k", format!("{}..{}", a.k.start(), a.k.end()));
    r.put("epsilon", cfg.estimate.epsilon);
    let (t1, t2) = verify_theorems(&rule, &cfg)?;
    put_theorem(&mut r, &t1);
    put_theorem(&mut r, &t2);
    let mut all_hold = t1.verdict != Verdict::Fails && t2.verdict != Verdict::Fails;

    let (cases, bad) = half_sum_suite(SUITE_MAX_ALPHA, SUITE_MAX_K)?;
    r.put("half_sum.cases", cases);
    r.put("half_sum.violations", bad);
    all_hold &= bad == 0;
    let (cases, bad) = majority_suite(SUITE_MAX_N, SUITE_MAX_K)?;
    r.put("majority.cases", cases);
    r.put("majority.violations", bad);
    all_hold &= bad == 0;

    let n = rule.segment_count();
    let mut k = 0u32;
    while (n as u64).pow(k + 1) <= ENUMERATION_LIMIT {
        k += 1;
    }
    let matches = census_enumerate(&rule, k)? == multinomial_census(n, k, budget)?;
    r.put("census.k", k);
    r.put("census.matches_enumeration", matches);
    all_hold &= matches;

    r.put("result", if all_hold { "holds" } else { "fails" });
    finish_report(&r, a.estimate.report.as_deref(), out)?;
    if all_hold {
        Ok(())
    } else {
        Err(Failure::Theorem)
    }
}

fn census(a: CensusArgs, budget: &Budget, out: &mut dyn Write) -> CliResult<()> {
    if a.n < 1 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let table = multinomial_census(a.n, a.k, budget)?;
    match &a.out {
        Some(p) => write_file(p, &table.to_text()),
        None => emit(out, &table.to_text()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("mfdim").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn range_syntax() {
        assert_eq!(parse_range("2..7"), Ok(2..=7));
        assert_eq!(parse_range("2..=7"), Ok(2..=7));
        assert_eq!(parse_range("5"), Ok(5..=5));
        assert!(parse_range("7..2").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["census", "--n", "x", "--k", "2"]).0, EXIT_USAGE);
        assert_eq!(
            run_args(&["generate", "--rule", "/nonexistent.rule", "--k", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn census_output() {
        let (code, out, _) = run_args(&["census", "--n", "2", "--k", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "# census N=2 k=3 total=8\n0 3 1\n1 2 3\n2 1 3\n3 0 1\n"
        );
    }

    #[test]
    fn census_budget_exit_code() {
        let (code, _, err) = run_args(&["census", "--n", "10", "--k", "60"]);
        assert_eq!(code, EXIT_BUDGET, "{err}");
    }

    #[test]
    fn combinatorial_suites_hold() {
        assert_eq!(half_sum_suite(5, 10).unwrap(), (25, 0));
        assert_eq!(majority_suite(4, 10).unwrap(), (15, 0));
    }
}
