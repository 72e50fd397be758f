use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;

use abscope::field::{parse_hex_modulus, MAX_DEGREE};
use abscope::geometry::{codim2_profile_of, hyperplane_profile_of, support_set};
use abscope::goldtest::find_odd_witness;
use abscope::sequence::{correlation_csv, crosscorr_walsh_bridge};
use abscope::spectrum::power_walsh;
use abscope::{CyclicBitVector, FieldSpec, IntersectionProfile};
use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::report::{emit_report, to_csv, to_json, to_table, Format};
use crate::scan::{evaluate, parse_checks, parse_range, scan_range, Check};
use crate::verify::{verify_all, VERIFY_CHECKS};
use crate::CliError;

const MAX_M_VAR: &str = "ABSCOPE_MAX_M";

#[derive(Parser, Debug)]
#[command(
    name = "abscope",
    version,
    about = "Almost-bent power maps over GF(2^m)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Extension degree of GF(2^m).
    #[arg(long)]
    m: u32,
    /// Primitive modulus in hex, e.g. 0x25.
    #[arg(long, value_parser = parse_poly)]
    poly: Option<u64>,
    /// Output encoding: json, csv or table.
    #[arg(long, default_value = "table", value_parser = parse_format)]
    format: Format,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct WithD {
    #[command(flatten)]
    common: Common,
    /// Exponent of the power map x -> x^d.
    #[arg(long)]
    d: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field parameters for the chosen modulus.
    Field(Common),
    /// Walsh spectrum of tr(x^d).
    Spectrum(WithD),
    /// Scan exponent classes.
    AbScan {
        #[command(flatten)]
        common: Common,
        /// Inclusive range A..B of exponents; default is every class.
        #[arg(long, value_parser = parse_range_arg)]
        d_range: Option<RangeInclusive<u64>>,
        /// Comma-separated: ab, gold, kasami, three-value, seven-value,
        /// trace-identity, witness, or all.
        #[arg(long, default_value = "ab,gold,kasami")]
        checks: String,
    },
    /// Hyperplane and codimension-2 intersection profiles of tr(x^d) = 1.
    Intersections(WithD),
    /// Every check for a single exponent, with consistency verification.
    GoldCheck(WithD),
    /// Odd-count subvector witness against the trace identity.
    Witness(WithD),
    /// Crosscorrelation of an m-sequence with its d-decimation.
    Crosscorr(WithD),
    /// Run the verification battery for one field.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of: field, sequence, bridge, ab, quadric-gold,
        /// envelope, hyperplane, trace-identity, witness, gold-support.
        #[arg(long)]
        checks: Option<String>,
    },
}

fn parse_poly(s: &str) -> Result<u64, String> {
    parse_hex_modulus(s).ok_or_else(|| format!("invalid hex polynomial {s:?}"))
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_range_arg(s: &str) -> Result<RangeInclusive<u64>, String> {
    parse_range(s).map_err(|e| e.to_string())
}

/// Successful run, or a run that found a violated invariant.
enum Status {
    Ok,
    Violation,
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report to `out`. Returns the process exit code: 0 on success, 1 on an
/// argument error, 2 when a verification finds a violated invariant.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return clap_exit(e, out, err),
    };
    match dispatch(cli.command, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::Violation) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn clap_exit(e: clap::Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            0
        }
        ErrorKind::InvalidSubcommand => {
            let name = match e.get(ContextKind::InvalidSubcommand) {
                Some(ContextValue::String(s)) => s.clone(),
                _ => String::new(),
            };
            let _ = writeln!(err, "error: {}", CliError::UnknownCommand(name));
            1
        }
        _ => {
            let _ = write!(err, "{}", e.render());
            1
        }
    }
}

fn max_m() -> Result<u32, CliError> {
    match std::env::var(MAX_M_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::BadFlag(format!("{MAX_M_VAR}={v:?} is not an integer"))),
        Err(_) => Ok(MAX_DEGREE),
    }
}

fn field(c: &Common) -> Result<FieldSpec, CliError> {
    Ok(FieldSpec::build(c.m, c.poly, max_m()?)?)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<Status, CliError> {
    let jobs = match &cmd {
        Command::Field(c) => c.jobs,
        Command::AbScan { common, .. } | Command::VerifyAll { common, .. } => common.jobs,
        Command::Spectrum(w)
        | Command::Intersections(w)
        | Command::GoldCheck(w)
        | Command::Witness(w)
        | Command::Crosscorr(w) => w.common.jobs,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::BadFlag(format!("--jobs: {e}")))?;
    let (text, status) = pool.install(|| run(cmd))?;
    out.write_all(text.as_bytes())?;
    Ok(status)
}

fn run(cmd: Command) -> Result<(String, Status), CliError> {
    match cmd {
        Command::Field(c) => cmd_field(&c),
        Command::Spectrum(w) => cmd_spectrum(&w),
        Command::AbScan {
            common,
            d_range,
            checks,
        } => {
            let spec = field(&common)?;
            let checks = parse_checks(&checks)?;
            let records = scan_range(&spec, d_range, &checks, common.jobs)?;
            Ok((emit_report(&records, common.format)?, Status::Ok))
        }
        Command::Intersections(w) => cmd_intersections(&w),
        Command::GoldCheck(w) => {
            let spec = field(&w.common)?;
            let checks: BTreeSet<Check> = Check::ALL.into();
            let record = evaluate(w.d, &spec, &checks)?;
            let status = if record.inconsistencies().is_empty() {
                Status::Ok
            } else {
                Status::Violation
            };
            Ok((emit_report(&[record], w.common.format)?, status))
        }
        Command::Witness(w) => cmd_witness(&w),
        Command::Crosscorr(w) => cmd_crosscorr(&w),
        Command::VerifyAll { common, checks } => cmd_verify(&common, checks.as_deref()),
    }
}

/// Renders a list of flat rows in the requested format.
fn render<T: Serialize + ?Sized>(
    value: &T,
    format: Format,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(value),
        Format::Csv => to_csv(header, rows),
        Format::Table => Ok(to_table(header, rows)),
    }
}

#[derive(Serialize)]
struct FieldInfo {
    m: u32,
    modulus: String,
    zeta: String,
    order: u64,
    trace_mask: String,
    log_tables: bool,
}

fn cmd_field(c: &Common) -> Result<(String, Status), CliError> {
    let spec = field(c)?;
    let info = FieldInfo {
        m: spec.m(),
        modulus: format!("{:#x}", spec.modulus()),
        zeta: spec.zeta().to_string(),
        order: spec.order(),
        trace_mask: format!("{:#x}", spec.trace_mask()),
        log_tables: spec.has_tables(),
    };
    let rows = vec![vec![
        info.m.to_string(),
        info.modulus.clone(),
        info.zeta.clone(),
        info.order.to_string(),
        info.trace_mask.clone(),
        info.log_tables.to_string(),
    ]];
    let header = ["m", "modulus", "zeta", "order", "trace_mask", "log_tables"];
    Ok((render(&info, c.format, &header, rows)?, Status::Ok))
}

#[derive(Serialize)]
struct SpectrumReport {
    m: u32,
    d: u64,
    linearity: u64,
    multiplicities: std::collections::BTreeMap<i64, u64>,
    coefficients: Vec<i32>,
}

fn cmd_spectrum(w: &WithD) -> Result<(String, Status), CliError> {
    let spec = field(&w.common)?;
    let s = power_walsh(w.d, &spec)?;
    let text = match w.common.format {
        Format::Csv => s.to_csv(),
        Format::Json => to_json(&SpectrumReport {
            m: spec.m(),
            d: w.d,
            linearity: s.linearity(),
            multiplicities: s.value_multiplicities(),
            coefficients: s.coeffs().to_vec(),
        })?,
        Format::Table => {
            let rows = s
                .value_multiplicities()
                .into_iter()
                .map(|(v, k)| vec![v.to_string(), k.to_string()])
                .collect::<Vec<_>>();
            format!("linearity {}\n", s.linearity()) + &to_table(&["value", "multiplicity"], rows)
        }
    };
    Ok((text, Status::Ok))
}

fn cmd_intersections(w: &WithD) -> Result<(String, Status), CliError> {
    let spec = field(&w.common)?;
    let set = support_set(w.d, &spec)?;
    let profiles: Vec<IntersectionProfile> = vec![
        hyperplane_profile_of(&set, &spec),
        codim2_profile_of(&set, &spec),
    ];
    let rows = profiles
        .iter()
        .flat_map(|p| {
            let family = serde_json::to_value(p.family)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            p.counts
                .iter()
                .map(move |(size, mult)| vec![family.clone(), size.to_string(), mult.to_string()])
        })
        .collect();
    let header = ["family", "size", "multiplicity"];
    Ok((
        render(&profiles, w.common.format, &header, rows)?,
        Status::Ok,
    ))
}

fn cmd_witness(w: &WithD) -> Result<(String, Status), CliError> {
    let spec = field(&w.common)?;
    let n = spec.order();
    if w.d == 0 || w.d >= n {
        return Err(abscope::Error::ExponentOutOfRange { d: w.d, max: n - 1 }.into());
    }
    let r = find_odd_witness(&CyclicBitVector::new(spec.m(), w.d)?)?;
    let status = if r.verified && r.multiset_size % 2 == 1 {
        Status::Ok
    } else {
        Status::Violation
    };
    let rows = vec![vec![
        r.d.to_string(),
        r.m.to_string(),
        r.witness.to_string(),
        r.multiset_size.to_string(),
        r.path.to_string(),
        r.verified.to_string(),
    ]];
    let header = [
        "d",
        "m",
        "witness_bits",
        "multiset_size",
        "path",
        "verified",
    ];
    Ok((render(&r, w.common.format, &header, rows)?, status))
}

fn cmd_crosscorr(w: &WithD) -> Result<(String, Status), CliError> {
    let spec = field(&w.common)?;
    let r = crosscorr_walsh_bridge(w.d, &spec)?;
    let status = if r.holds {
        Status::Ok
    } else {
        Status::Violation
    };
    let text = match w.common.format {
        Format::Json => to_json(&r)?,
        Format::Csv => correlation_csv(&r.crosscorrelation),
        Format::Table => {
            let rows = r
                .crosscorrelation
                .iter()
                .enumerate()
                .map(|(t, c)| vec![t.to_string(), c.to_string()])
                .collect::<Vec<_>>();
            format!(
                "bridge {} max {} linearity {}\n",
                if r.holds { "holds" } else { "FAILS" },
                r.max_crosscorrelation,
                r.linearity
            ) + &to_table(&["t", "value"], rows)
        }
    };
    Ok((text, status))
}

fn cmd_verify(c: &Common, checks: Option<&str>) -> Result<(String, Status), CliError> {
    let spec = field(c)?;
    let only = checks
        .map(|list| -> Result<BTreeSet<String>, CliError> {
            list.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    if VERIFY_CHECKS.contains(&s) {
                        Ok(s.to_string())
                    } else {
                        Err(CliError::BadFlag(format!("unknown check {s:?}")))
                    }
                })
                .collect()
        })
        .transpose()?;
    let outcomes = verify_all(&spec, only.as_ref())?;
    let status = if outcomes.iter().all(|o| o.passed) {
        Status::Ok
    } else {
        Status::Violation
    };
    let rows = outcomes
        .iter()
        .map(|o| {
            let s = if o.passed { "PASS" } else { "FAIL" };
            vec![o.name.to_string(), s.to_string(), o.detail.clone()]
        })
        .collect();
    Ok((
        render(&outcomes, c.format, &["check", "status", "detail"], rows)?,
        status,
    ))
}
