use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use abscope::goldtest::WitnessResult;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Output encoding shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(CliError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "table",
        })
    }
}

/// Everything known about one exponent class. Fields that were not requested
/// through the check set stay `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub m: u32,
    pub d: u64,
    pub canonical_d: u64,
    /// `gcd(d, 2^m - 1) = 1`.
    pub gcd_flag: bool,
    /// Linearity of the boolean function `tr(x^d)`.
    pub linearity: u64,
    pub ab_flag: Option<bool>,
    pub gold_flag: Option<bool>,
    pub gold_k: Option<u32>,
    pub kasami_flag: Option<bool>,
    pub kasami_k: Option<u32>,
    pub three_value_flag: Option<bool>,
    pub seven_value_set: Option<BTreeSet<u64>>,
    pub trace_identity_flag: Option<bool>,
    pub witness: Option<WitnessResult>,
}

impl ScanRecord {
    /// Cross-check of the flags against each other. Returns the violated rules.
    pub fn inconsistencies(&self) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let is = |f: Option<bool>| f == Some(true);
        if is(self.gold_flag) && self.trace_identity_flag == Some(false) {
            bad.push("gold without trace identity");
        }
        if is(self.gold_flag) && self.ab_flag == Some(false) && self.m % 2 == 1 {
            bad.push("gold without almost-bent");
        }
        if is(self.gold_flag) && self.three_value_flag == Some(false) {
            bad.push("gold without three-value");
        }
        if is(self.three_value_flag) && self.trace_identity_flag == Some(false) {
            bad.push("three-value without trace identity");
        }
        if is(self.three_value_flag) && self.gold_flag == Some(false) {
            bad.push("three-value for a non-Gold exponent");
        }
        if is(self.ab_flag) && self.linearity != 1u64 << self.m.div_ceil(2) {
            bad.push("almost-bent with wrong linearity");
        }
        if let Some(w) = &self.witness {
            if !w.verified || w.multiset_size % 2 == 0 {
                bad.push("unverified witness");
            }
            if is(self.trace_identity_flag) {
                bad.push("witness for an exponent satisfying the identity");
            }
        }
        bad
    }
}

const RECORD_HEADER: [&str; 15] = [
    "m",
    "d",
    "canonical_d",
    "gcd_flag",
    "linearity",
    "ab_flag",
    "gold_flag",
    "gold_k",
    "kasami_flag",
    "kasami_k",
    "three_value_flag",
    "seven_value_set",
    "trace_identity_flag",
    "witness_bits",
    "witness_path",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn record_row(r: &ScanRecord) -> Vec<String> {
    vec![
        r.m.to_string(),
        r.d.to_string(),
        r.canonical_d.to_string(),
        r.gcd_flag.to_string(),
        r.linearity.to_string(),
        opt(&r.ab_flag),
        opt(&r.gold_flag),
        opt(&r.gold_k),
        opt(&r.kasami_flag),
        opt(&r.kasami_k),
        opt(&r.three_value_flag),
        r.seven_value_set
            .as_ref()
            .map(|s| s.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
            .unwrap_or_default(),
        opt(&r.trace_identity_flag),
        r.witness
            .as_ref()
            .map(|w| w.witness.to_string())
            .unwrap_or_default(),
        r.witness
            .as_ref()
            .map(|w| w.path.to_string())
            .unwrap_or_default(),
    ]
}

/// Serializes scan records. JSON output is a pretty-printed array; CSV has a
/// fixed header; the table is column-aligned text.
pub fn emit_report(records: &[ScanRecord], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(records),
        Format::Csv => to_csv(&RECORD_HEADER, records.iter().map(record_row)),
        Format::Table => Ok(to_table(&RECORD_HEADER, records.iter().map(record_row))),
    }
}

pub(crate) fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn to_csv(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(e.into_error().to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn to_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let rows: Vec<Vec<String>> = rows.into_iter().collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
