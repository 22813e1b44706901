//! `qpi`: list, evaluate and verify the identity catalog, probe q -> 1
//! limits, and write JSON reports.
//!
//! Exit codes: 0 everything passed, 1 something failed, 2 usage or domain
//! error, 3 inconclusive (precision escalation exhausted).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpi_core::catalog::{default_q_grid, Family, IdentityRecord, ParamPoint, Registry, Side, Status, VerificationReport, VerifyPolicy};
use qpi_core::limits::{default_exponent, q_to_1_limit, LimitFlag, LimitProbe, LimitReport};
use qpi_core::precision::{parse_rational, ten_pow_neg, to_bigreal};
use qpi_core::report::{rational_string, Report};
use qpi_core::Error;

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qpi", version, about = "Verify q-analogues of pi-formulas to high precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List registry entries.
    List {
        /// One of q-main, q-proof-chain, classical, telescoping.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate one side of an identity.
    Eval {
        id: String,
        #[arg(long, default_value = "lhs")]
        side: String,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, env = "QPI_DIGITS", default_value_t = 60)]
        digits: u32,
    },
    /// Verify one identity, or the whole registry with --all.
    Verify {
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        all: bool,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Extrapolate (1-q)^a LHS(q) as q -> 1.
    Limit {
        id: String,
        /// Normalization exponent a; defaults to the shipped value.
        #[arg(long)]
        exponent: Option<u32>,
        /// Levels j0..j1 with q_j = 1 - 2^-j/16.
        #[arg(long, default_value = "4..12")]
        levels: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run the full verification plus the limit probes and write one JSON document.
    Report {
        #[command(flatten)]
        run: RunArgs,
        /// Skip the q -> 1 probes.
        #[arg(long)]
        no_limits: bool,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Base q as p/r or a decimal.
    #[arg(long)]
    q: Option<String>,
    /// Further parameters as name=value; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, env = "QPI_DIGITS", default_value_t = 60)]
    digits: u32,
    /// Residual tolerance; must be at least 10^-(digits-10).
    #[arg(long, default_value = "1e-50")]
    tol: String,
    /// Comma-separated q values used for q-only identities.
    #[arg(long, value_delimiter = ',', default_values_t = ["1/4".to_string(), "1/2".to_string(), "3/4".to_string()])]
    q_grid: Vec<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Resolved settings of a verification run.
#[derive(Debug, Clone)]
struct RunConfig {
    policy: VerifyPolicy,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Result<Self, Error> {
        if a.digits < 20 {
            return Err(Error::Domain(format!("digits = {} is below the minimum of 20", a.digits)));
        }
        let tolerance = parse_rational(&a.tol)?;
        let floor = ten_pow_neg(a.digits - 10);
        if tolerance < floor {
            return Err(Error::Domain(format!("tolerance {} is below 10^-{} for {} digits", a.tol, a.digits - 10, a.digits)));
        }
        let q_grid = a.q_grid.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        for q in &q_grid {
            if *q <= 0 || *q >= 1 {
                return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
            }
        }
        let mut policy = VerifyPolicy { digits: a.digits, tolerance, q_grid, ..VerifyPolicy::default() };
        if let Some(w) = a.workers {
            policy.workers = w.max(1);
        }
        Ok(RunConfig { policy, out: a.out.clone() })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for_error(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        e if e.is_usage() => USAGE,
        Error::Inconclusive { .. } | Error::PrecisionEscalation { .. } => INCONCLUSIVE,
        _ => FAILED,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let registry = Registry::standard();
    match cli.command {
        Command::List { family, json } => cmd_list(&registry, family.as_deref(), json),
        Command::Eval { id, side, point, digits } => cmd_eval(&registry, &id, &side, &point, digits),
        Command::Verify { id, all, point, run, json } => {
            let config = RunConfig::from_args(&run)?;
            match (id, all) {
                (Some(id), false) => cmd_verify_one(&registry, &id, &point, &config, json),
                (None, true) => {
                    if point.q.is_some() || !point.params.is_empty() {
                        return Err(Error::Domain("--all takes no --q or --param; use --q-grid".into()));
                    }
                    cmd_verify_all(&registry, &config, json)
                }
                _ => Err(Error::MissingParameter("an identity id or --all".into())),
            }
        }
        Command::Limit { id, exponent, levels, digits, json } => cmd_limit(&registry, &id, exponent, &levels, digits, json),
        Command::Report { run, no_limits } => cmd_report(&registry, &RunConfig::from_args(&run)?, no_limits),
    }
}

fn cmd_list(registry: &Registry, family: Option<&str>, json: bool) -> Result<u8, Error> {
    let family = family.map(|f| f.parse::<Family>()).transpose()?;
    let records = registry.list(family);
    if json {
        let rows: Vec<serde_json::Value> = records
            .iter()
            .map(|r| serde_json::json!({"id": r.id, "family": r.family.as_str(), "anchor": r.anchor, "parameters": r.param_names()}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&rows).expect("plain JSON"));
    } else {
        let width = records.iter().map(|r| r.id.len()).max().unwrap_or(2);
        for r in records {
            println!("{:<width$}  {:<13}  {:<24}  {}", r.id, r.family.as_str(), r.param_names().join(","), r.anchor);
        }
    }
    Ok(OK)
}

/// Assembles a point from --q/--param; `None` when neither was given.
fn explicit_point(record: &IdentityRecord, args: &PointArgs) -> Result<Option<ParamPoint>, Error> {
    if args.q.is_none() && args.params.is_empty() {
        return Ok(None);
    }
    let mut p = ParamPoint::new();
    if let Some(q) = &args.q {
        p.set("q", parse_rational(q)?);
    }
    for a in &args.params {
        let (name, value) = ParamPoint::parse_assignment(a)?;
        p.set(&name, value);
    }
    record.validate(&p)?;
    Ok(Some(p))
}

fn cmd_eval(registry: &Registry, id: &str, side: &str, args: &PointArgs, digits: u32) -> Result<u8, Error> {
    let record = registry.get(id)?;
    let side: Side = side.parse()?;
    let point = match explicit_point(record, args)? {
        Some(p) => p,
        None => record
            .verification_points(&default_q_grid())
            .into_iter()
            .next()
            .ok_or_else(|| Error::MissingParameter(format!("parameters for `{id}`")))?,
    };
    let r = registry.eval_side(id, side, &point, digits)?;
    println!("{id} {side:?} at {point}");
    println!("value  {}", r.value.to_decimal(digits as usize));
    println!("bound  {}", r.bound.magnitude().to_decimal(3));
    println!("terms  {}", r.terms_used);
    Ok(OK)
}

fn summary_code(reports: &[VerificationReport]) -> u8 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        FAILED
    } else if reports.iter().any(|r| r.status == Status::Inconclusive) {
        INCONCLUSIVE
    } else {
        OK
    }
}

fn print_table(reports: &[VerificationReport]) {
    for r in reports {
        let residual = r.residual.as_ref().map_or("-".to_string(), |x| x.to_decimal(3));
        println!(
            "{:<12} {:<22} {:<40} residual {:<10} bound {:<10} terms {:<8} {} ms",
            r.status.to_string().to_uppercase(),
            r.id,
            r.point.to_string(),
            residual,
            r.bound.magnitude().to_decimal(3),
            r.terms,
            r.wall_ms
        );
        if let Some(note) = &r.note {
            println!("    {note}");
        }
    }
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    println!(
        "{} pass, {} fail, {} flagged, {} inconclusive",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Flagged),
        count(Status::Inconclusive)
    );
}

fn emit(config: &RunConfig, reports: &[VerificationReport], limits: &[LimitReport], json: bool) -> Result<(), Error> {
    let doc = || Report::new(&config.policy, reports, limits, chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    match &config.out {
        Some(path) => write_report(path, &doc().to_json())?,
        None if json => print!("{}", doc().to_json()),
        None => print_table(reports),
    }
    Ok(())
}

fn write_report(path: &PathBuf, text: &str) -> Result<(), Error> {
    let mut f = fs::File::create(path).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn cmd_verify_one(registry: &Registry, id: &str, args: &PointArgs, config: &RunConfig, json: bool) -> Result<u8, Error> {
    let record = registry.get(id)?;
    let points = match explicit_point(record, args)? {
        Some(p) => vec![p],
        None => record.verification_points(&config.policy.q_grid),
    };
    if points.is_empty() {
        return Err(Error::MissingParameter(format!("parameters for `{id}` (it has no default points)")));
    }
    let tol = qpi_core::catalog::effective_tolerance(record, &config.policy.tolerance);
    let reports = points
        .iter()
        .map(|p| registry.verify_identity(id, p, config.policy.digits, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    emit(config, &reports, &[], json)?;
    Ok(summary_code(&reports))
}

fn cmd_verify_all(registry: &Registry, config: &RunConfig, json: bool) -> Result<u8, Error> {
    let reports = registry.verify_all(&config.policy);
    emit(config, &reports, &[], json)?;
    Ok(summary_code(&reports))
}

fn parse_levels(s: &str) -> Result<(u32, u32), Error> {
    let bad = || Error::Parse(format!("levels `{s}` (expected j0..j1)"));
    let (a, b) = s.split_once("..").or_else(|| s.split_once(',')).ok_or_else(bad)?;
    let j0 = a.trim().parse().map_err(|_| bad())?;
    let j1 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    Ok((j0, j1))
}

fn cmd_limit(registry: &Registry, id: &str, exponent: Option<u32>, levels: &str, digits: u32, json: bool) -> Result<u8, Error> {
    registry.get(id)?;
    let a = match exponent.or_else(|| default_exponent(id)) {
        Some(a) => a,
        None => return Err(Error::MissingParameter(format!("--exponent (no shipped exponent for `{id}`)"))),
    };
    let (j0, j1) = parse_levels(levels)?;
    let probe = LimitProbe::new(id, a).levels(j0, j1);
    let report = match q_to_1_limit(registry, &probe, digits) {
        Ok(r) => r,
        Err(Error::Instability(msg)) => {
            if json {
                println!("{}", serde_json::json!({"id": id, "exponent": a, "flag": "unstable", "message": msg}));
            } else {
                println!("UNSTABLE {id} exponent {a}: {msg}");
            }
            return Ok(FAILED);
        }
        Err(e) => return Err(e),
    };
    if json {
        let entry = qpi_core::report::LimitEntry::from_report(&report);
        println!("{}", serde_json::to_string_pretty(&entry).expect("plain JSON"));
    } else {
        let tag = match report.flag {
            LimitFlag::Stable => "STABLE",
            LimitFlag::Zero => "ZERO",
        };
        println!("{tag} {id} exponent {a}, levels {j0}..{j1}, order {}", report.order);
        println!("extrapolant  {}", report.value.to_decimal(20));
        if let (Some(t), Some(err)) = (&report.target, report.error()) {
            println!("target       {}", t.to_decimal(20));
            println!("error        {}", err.to_decimal(3));
        }
        println!("diagnostic   {}", report.diagnostic.to_decimal(3));
        for (q, v) in &report.samples {
            println!("  q = {:<24} (1-q)^{a} LHS = {}", rational_string(q), v.to_decimal(20));
        }
    }
    Ok(match report.flag {
        LimitFlag::Stable => match report.error() {
            Some(err) if err > to_bigreal(&ten_pow_neg(6), 20) => FAILED,
            _ => OK,
        },
        LimitFlag::Zero => FAILED,
    })
}

fn cmd_report(registry: &Registry, config: &RunConfig, no_limits: bool) -> Result<u8, Error> {
    // fail on an unwritable destination before the long run
    if let Some(path) = &config.out {
        write_report(path, "")?;
    }
    let reports = registry.verify_all(&config.policy);
    let mut limits = Vec::new();
    let mut limit_failed = false;
    if !no_limits {
        for r in registry.list(Some(Family::QMain)) {
            let probe = LimitProbe::shipped(r.id)?;
            match q_to_1_limit(registry, &probe, 30) {
                Ok(l) => {
                    limit_failed |= l.flag != LimitFlag::Stable || l.error().is_some_and(|e| e > to_bigreal(&ten_pow_neg(6), 20));
                    limits.push(l);
                }
                Err(e) => {
                    eprintln!("limit {}: {e}", r.id);
                    limit_failed = true;
                }
            }
        }
    }
    let doc = Report::new(&config.policy, &reports, &limits, chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    match &config.out {
        Some(path) => write_report(path, &doc.to_json())?,
        None => print!("{}", doc.to_json()),
    }
    let code = summary_code(&reports);
    Ok(if code == OK && limit_failed { FAILED } else { code })
}
