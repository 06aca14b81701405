//! Command-line driver: manifold loading, verification suites, fits and
//! corollary tables, with JSON or markdown reports.
//!
//! Exit codes: `0` all checks pass, `1` some residual exceeds its tolerance,
//! `2` usage or configuration error.

mod render;

use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use nullity_core::nk::{builtin, NkFrame, RegistryEntry, UnitField};
use nullity_core::pseudosym::tables::{
    corollary_table, CorollaryTable, RowStatus, TableName, TableTolerances,
};
use nullity_core::pseudosym::{
    dichotomy_check, fit_l, master_identity_check, ConditionKind, ConditionSpec,
    DichotomyTolerances, FitReport, LSummary, Verdict,
};
use nullity_core::suites::{aggregate, point_residuals, SuiteOutcome};
use nullity_core::{coefficients, config, frame, CoeffVector, FreeParams, Preset};

pub use render::sig12;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "NULLITY_FORGE_THREADS";

/// Default tolerance on fit residuals, relative to `max(1, max|lhs|)`.
pub const FIT_TOL: f64 = 1e-8;
/// Default tolerance on the ξ-projected identity at the fitted `L`.
pub const MASTER_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Usage = 2,
}

#[derive(Parser, Debug)]
#[command(
    name = "nullity-forge",
    version,
    about = "Curvature identities and pseudosymmetry fits on manifolds with a unit field of constant nullity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the curvature-like presets with their coefficients at dimension n.
    Presets(PresetsArgs),
    /// Run the curvature, nullity and lemma suites on a manifold.
    Verify(VerifyArgs),
    /// Fit L in T_a·K = L Q(σ, K) at sample points.
    Fit(FitArgs),
    /// Check a class-by-class corollary table against the registry.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sigma {
    G,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Acting on T_b itself.
    Tt,
    /// Acting on the Ricci tensor of T_b.
    Ts,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replaces every default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct FreeArgs {
    /// Free parameter a0 of the parametric presets.
    #[arg(long)]
    pub a0: Option<f64>,
    /// Free parameter a1 of the parametric presets.
    #[arg(long)]
    pub a1: Option<f64>,
}

impl FreeArgs {
    fn params(&self) -> Result<Option<FreeParams>, String> {
        match (self.a0, self.a1) {
            (Some(a0), Some(a1)) => Ok(Some(FreeParams { a0, a1 })),
            (None, None) => Ok(None),
            _ => Err("--a0 and --a1 must be given together".into()),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct PresetsArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub free: FreeArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Built-in name or path to a JSON manifold description.
    #[arg(long)]
    pub manifold: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[arg(long)]
    pub manifold: String,
    /// Comma-separated presets acting as derivations.
    #[arg(long, default_value = "r")]
    pub ta: String,
    /// Comma-separated presets being derived.
    #[arg(long, default_value = "r")]
    pub tb: String,
    #[arg(long, value_enum, default_value_t = Sigma::G)]
    pub sigma: Sigma,
    /// Ricci power for `--sigma s`: a number or an inclusive range `a..b`.
    #[arg(long, default_value = "1")]
    pub ell: String,
    #[arg(long, value_enum, default_value_t = Kind::Tt)]
    pub kind: Kind,
    /// Also classify each point by the Einstein / L = k dichotomy.
    #[arg(long)]
    pub dichotomy: bool,
    #[command(flatten)]
    pub free: FreeArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct PresetRow {
    pub name: &'static str,
    /// `None` for parametric presets without `--a0/--a1`.
    pub coefficients: Option<[f64; 8]>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct PresetsReport {
    pub n: usize,
    pub presets: Vec<PresetRow>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Default)]
pub struct VerdictCounts {
    pub precondition_failed: usize,
    pub einstein: usize,
    pub l_branch: usize,
    pub eta_einstein: usize,
    pub degenerate: usize,
    pub violation: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::PreconditionFailed => self.precondition_failed += 1,
            Verdict::Einstein => self.einstein += 1,
            Verdict::LBranch => self.l_branch += 1,
            Verdict::EtaEinstein => self.eta_einstein += 1,
            Verdict::Degenerate => self.degenerate += 1,
            Verdict::Violation => self.violation += 1,
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub condition: String,
    pub kind: ConditionKind,
    pub ta: String,
    pub tb: String,
    pub ell: usize,
    pub summary: LSummary,
    /// Worst ξ-projected identity residual at the fitted `L`.
    pub master_identity: Option<f64>,
    pub dichotomy: Option<VerdictCounts>,
    pub pass: bool,
    pub per_point: Vec<FitReport>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Report {
    pub manifold: Option<String>,
    pub points: usize,
    pub suites: Vec<SuiteOutcome>,
    pub fits: Vec<FitOutcome>,
    pub tables: Vec<CorollaryTable>,
}

impl Report {
    fn new(manifold: Option<String>, points: usize) -> Report {
        Report {
            manifold,
            points,
            suites: vec![],
            fits: vec![],
            tables: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
            && self.fits.iter().all(|f| f.pass)
            && self
                .tables
                .iter()
                .all(|t| t.rows.iter().all(|r| r.status != RowStatus::Contradicted))
    }
}

/// Output text plus exit status of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit: Exit,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Outcome {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {}\n", msg.into()),
            exit: Exit::Usage,
        }
    }

    fn report(report: &Report, format: Format, failures: Vec<String>) -> Outcome {
        let stdout = match format {
            Format::Json => to_json(report),
            Format::Markdown => render::report_markdown(report),
        };
        let exit = if report.passed() {
            Exit::Pass
        } else {
            Exit::Fail
        };
        let stderr = failures.iter().map(|f| format!("FAIL {f}\n")).collect();
        Outcome {
            stdout,
            stderr,
            exit,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Resolves a built-in name first, then a file path.
pub fn resolve_manifold(selector: &str) -> Result<RegistryEntry, String> {
    if let Some(e) = builtin(selector) {
        return Ok(e);
    }
    let path = Path::new(selector);
    if !path.exists() {
        return Err(format!(
            "'{selector}' is neither a built-in manifold nor a readable file"
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{selector}: {e}"))?;
    config::load_entry(&text).map_err(|e| format!("{selector}: {e}"))
}

fn check_common(c: &Common) -> Result<(), String> {
    if c.points == 0 {
        return Err("--points must be at least 1".into());
    }
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(format!("--tol must be positive, got {t}"));
        }
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| e.to_string())
}

pub fn cmd_presets(args: &PresetsArgs) -> Outcome {
    let free = match args.free.params() {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    if args.n < 3 {
        return Outcome::usage(format!("presets need n >= 3, got {}", args.n));
    }
    let rows = Preset::all(free)
        .into_iter()
        .map(|p| PresetRow {
            name: p.name(),
            coefficients: coefficients(p, args.n).ok().map(|c: CoeffVector| c.0),
        })
        .collect();
    let report = PresetsReport {
        n: args.n,
        presets: rows,
    };
    let stdout = match args.format {
        Format::Json => to_json(&report),
        Format::Markdown => render::presets_markdown(&report),
    };
    Outcome {
        stdout,
        stderr: String::new(),
        exit: Exit::Pass,
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Outcome {
    if let Err(e) = check_common(&args.common) {
        return Outcome::usage(e);
    }
    let entry = match resolve_manifold(&args.manifold) {
        Ok(e) => e,
        Err(e) => return Outcome::usage(e),
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let points = entry
        .spec
        .sample_points(args.common.points, args.common.seed);
    let per_point: Result<Vec<_>, _> = pool.install(|| {
        points
            .par_iter()
            .map(|p| point_residuals(&entry, p))
            .collect()
    });
    let per_point = match per_point {
        Ok(v) => v,
        Err(e) => return Outcome::usage(format!("{}: {e}", entry.name())),
    };
    let mut report = Report::new(Some(entry.name().to_string()), points.len());
    report.suites = aggregate(&per_point, args.common.tol);
    let failures = report
        .suites
        .iter()
        .filter(|s| !s.pass)
        .map(|s| {
            format!(
                "{} [{}] residual {:e}",
                s.id,
                s.paper_tag.as_deref().unwrap_or("-"),
                s.max_residual
            )
        })
        .collect();
    Outcome::report(&report, args.common.format, failures)
}

fn parse_presets(list: &str, free: Option<FreeParams>) -> Result<Vec<Preset>, String> {
    list.split(',')
        .map(|s| Preset::named(s.trim(), free).map_err(|e| e.to_string()))
        .collect()
}

fn parse_ell(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("--ell expects a number or a range a..b, got '{s}'");
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (usize, usize) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

/// Per-point result of one condition.
struct PointFit {
    fit: FitReport,
    master: Option<f64>,
    verdict: Option<Verdict>,
}

fn fit_point(
    entry: &RegistryEntry,
    p: &[f64],
    cond: &ConditionSpec,
    dichotomy: Option<&CoeffVector>,
    seed: u64,
) -> nullity_core::Result<PointFit> {
    let max_ell = cond.sigma_power().max(1);
    let (mut f, unit, nf_k) = if entry.has_structure() {
        let nf = NkFrame::at(&entry.spec, p, max_ell)?;
        (nf.frame, nf.unit, Some(nf.k))
    } else {
        let f = frame(&entry.spec, p, max_ell)?;
        let mut e0 = vec![0.0; f.dim()];
        e0[0] = 1.0;
        let unit = UnitField::normalized(&f.metric, &e0)?;
        (f, unit, None)
    };
    let fit = fit_l(cond, &mut f)?;
    let master = match fit.l {
        Some(l) if !fit.degenerate => Some(master_identity_check(cond, &mut f, &unit, l, seed, 4)?),
        _ => None,
    };
    let verdict = match (dichotomy, nf_k) {
        (Some(c), Some(k)) => {
            let nf = NkFrame { frame: f, unit, k };
            Some(dichotomy_check(&nf, c, fit.l, &DichotomyTolerances::default()).verdict)
        }
        _ => None,
    };
    Ok(PointFit {
        fit,
        master,
        verdict,
    })
}

pub fn cmd_fit(args: &FitArgs) -> Outcome {
    if let Err(e) = check_common(&args.common) {
        return Outcome::usage(e);
    }
    let setup = (|| -> Result<_, String> {
        let free = args.free.params()?;
        let entry = resolve_manifold(&args.manifold)?;
        let ta = parse_presets(&args.ta, free)?;
        let tb = parse_presets(&args.tb, free)?;
        let ells = if args.sigma == Sigma::S {
            parse_ell(&args.ell)?
        } else {
            vec![0]
        };
        let kind = match (args.kind, args.sigma) {
            (Kind::Tt, Sigma::G) => ConditionKind::TtG,
            (Kind::Tt, Sigma::S) => ConditionKind::TtSl,
            (Kind::Ts, Sigma::G) => ConditionKind::TRicciG,
            (Kind::Ts, Sigma::S) => ConditionKind::TRicciSl,
        };
        if args.dichotomy {
            if kind != ConditionKind::TtG || ta.iter().any(|p| *p != Preset::R) {
                return Err(
                    "--dichotomy applies to R·T = L Q(g, T): use --ta r --sigma g --kind tt".into(),
                );
            }
            if !entry.has_structure() {
                return Err(format!(
                    "--dichotomy needs a unit field and (k, epsilon); '{}' declares none",
                    entry.name()
                ));
            }
        }
        let n = entry.spec.dim;
        let mut conds = Vec::new();
        for &a in &ta {
            for &b in &tb {
                coefficients(a, n)
                    .and_then(|_| coefficients(b, n))
                    .map_err(|e| e.to_string())?;
                for &ell in &ells {
                    conds.push(ConditionSpec::new(kind, a, b, ell));
                }
            }
        }
        Ok((entry, conds, thread_pool()?))
    })();
    let (entry, conds, pool) = match setup {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let fit_tol = args.common.tol.unwrap_or(FIT_TOL);
    let master_tol = args.common.tol.unwrap_or(MASTER_TOL);
    let points = entry
        .spec
        .sample_points(args.common.points, args.common.seed);
    let mut report = Report::new(Some(entry.name().to_string()), points.len());
    let mut failures = Vec::new();
    for cond in &conds {
        let c = args
            .dichotomy
            .then(|| coefficients(cond.tb, entry.spec.dim).expect("checked above"));
        let results: Result<Vec<PointFit>, _> = pool.install(|| {
            points
                .par_iter()
                .enumerate()
                .map(|(i, p)| {
                    fit_point(
                        &entry,
                        p,
                        cond,
                        c.as_ref(),
                        args.common.seed.wrapping_add(i as u64),
                    )
                })
                .collect()
        });
        let results = match results {
            Ok(r) => r,
            Err(e) => return Outcome::usage(format!("{}: {e}", entry.name())),
        };
        let per_point: Vec<FitReport> = results.iter().map(|r| r.fit.clone()).collect();
        let summary = LSummary::of(&per_point);
        let master_identity = results.iter().filter_map(|r| r.master).reduce(f64::max);
        let dichotomy = args.dichotomy.then(|| {
            let mut counts = VerdictCounts::default();
            results
                .iter()
                .filter_map(|r| r.verdict)
                .for_each(|v| counts.add(v));
            counts
        });
        let fit_ok = per_point
            .iter()
            .all(|f| f.residual < fit_tol * f.lhs_max.max(1.0));
        let master_ok = master_identity.is_none_or(|m| m < master_tol);
        let dich_ok = dichotomy.as_ref().is_none_or(|d| d.violation == 0);
        let pass = fit_ok && master_ok && dich_ok;
        if !pass {
            failures.push(format!(
                "{}: fit residual {:e}, master identity {:?}, dichotomy violations {}",
                cond.label(),
                summary.max_residual,
                master_identity,
                dichotomy.as_ref().map_or(0, |d| d.violation)
            ));
        }
        report.fits.push(FitOutcome {
            condition: cond.label(),
            kind: cond.kind,
            ta: cond.ta.to_string(),
            tb: cond.tb.to_string(),
            ell: cond.sigma_power(),
            summary,
            master_identity,
            dichotomy,
            pass,
            per_point,
        });
    }
    Outcome::report(&report, args.common.format, failures)
}

pub fn cmd_table(args: &TableArgs) -> Outcome {
    if let Err(e) = check_common(&args.common) {
        return Outcome::usage(e);
    }
    let name: TableName = match args.name.parse() {
        Ok(n) => n,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let tol = match args.common.tol {
        Some(t) => TableTolerances {
            fit: t,
            l: t,
            tensor: t,
        },
        None => TableTolerances::default(),
    };
    let registry = nullity_core::builtin_registry();
    let table = match corollary_table(
        name,
        args.n,
        args.ell,
        &registry,
        args.common.points,
        args.common.seed,
        &tol,
    ) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let failures = table
        .rows
        .iter()
        .filter(|r| r.status == RowStatus::Contradicted)
        .map(|r| {
            format!(
                "{} row {}: contradicted by a registry witness",
                name,
                r.class.name()
            )
        })
        .collect();
    let mut report = Report::new(None, args.common.points);
    report.tables.push(table);
    Outcome::report(&report, args.common.format, failures)
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Presets(a) => cmd_presets(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Table(a) => cmd_table(a),
    }
}

/// Parses `args` (program name first) and runs; help and version print to stdout with exit 0.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Outcome {
                    stdout: e.to_string(),
                    stderr: String::new(),
                    exit: Exit::Pass,
                }
            }
            _ => Outcome {
                stdout: String::new(),
                stderr: e.to_string(),
                exit: Exit::Usage,
            },
        },
    }
}
