use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use abscope::geometry::codim2_profile;
use abscope::goldtest::{
    canonical_exponent, classify_exponent, coset_representatives, find_odd_witness, trace_identity,
};
use abscope::spectrum::{ab_linearity, power_walsh};
use abscope::{gcd, CyclicBitVector, Error, FieldSpec};
use rayon::prelude::*;

use crate::report::ScanRecord;
use crate::CliError;

/// Per-record properties that a scan can compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Ab,
    Gold,
    Kasami,
    ThreeValue,
    SevenValue,
    TraceIdentity,
    Witness,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Ab,
        Check::Gold,
        Check::Kasami,
        Check::ThreeValue,
        Check::SevenValue,
        Check::TraceIdentity,
        Check::Witness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Ab => "ab",
            Check::Gold => "gold",
            Check::Kasami => "kasami",
            Check::ThreeValue => "three-value",
            Check::SevenValue => "seven-value",
            Check::TraceIdentity => "trace-identity",
            Check::Witness => "witness",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::BadFlag(format!("unknown check {s:?}")))
    }
}

/// Parses a comma-separated check list; `all` selects every check.
pub fn parse_checks(list: &str) -> Result<BTreeSet<Check>, CliError> {
    let mut out = BTreeSet::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            out.extend(Check::ALL);
        } else {
            out.insert(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(CliError::BadFlag("empty check list".into()));
    }
    Ok(out)
}

/// Parses `A..B` or `A..=B`; both are inclusive of `B`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || CliError::BadFlag(format!("invalid range {s:?}, expected A..B"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Evaluates the requested checks for the class of `d`. All properties are
/// computed on the canonical representative.
pub fn evaluate(d: u64, spec: &FieldSpec, checks: &BTreeSet<Check>) -> Result<ScanRecord, Error> {
    let m = spec.m();
    let n = spec.order();
    if d == 0 || d >= n {
        return Err(Error::ExponentOutOfRange { d, max: n - 1 });
    }
    let c = canonical_exponent(d, m);
    let odd_m = m % 2 == 1;
    let spectrum = power_walsh(c, spec)?;
    let linearity = spectrum.linearity();
    let gcd_flag = gcd(d, n) == 1;

    let wants = |k: Check| checks.contains(&k);
    let need_ab = wants(Check::Ab) || wants(Check::ThreeValue) || wants(Check::SevenValue);
    let ab = Some(odd_m && gcd_flag && linearity == ab_linearity(m));

    let class = (wants(Check::Gold) || wants(Check::Kasami)).then(|| classify_exponent(c, m));

    let mut three_value = None;
    let mut seven_value = None;
    if odd_m && (wants(Check::ThreeValue) || wants(Check::SevenValue)) {
        if ab == Some(true) {
            let observed = codim2_profile(c, spec)?.sizes();
            if wants(Check::ThreeValue) {
                let quadric = abscope::geometry::quadric_codim2_values(m);
                three_value = Some(observed.is_subset(&quadric));
            }
            if wants(Check::SevenValue) {
                seven_value = Some(observed);
            }
        } else if wants(Check::ThreeValue) {
            three_value = Some(false);
        }
    }

    let identity = if wants(Check::TraceIdentity) || wants(Check::Witness) {
        Some(trace_identity(c, spec)?)
    } else {
        None
    };

    let weight = c.count_ones();
    let witness = if wants(Check::Witness)
        && odd_m
        && identity == Some(false)
        && weight >= 4
        && weight.is_power_of_two()
    {
        Some(find_odd_witness(&CyclicBitVector::new(m, c)?)?)
    } else {
        None
    };

    Ok(ScanRecord {
        m,
        d,
        canonical_d: c,
        gcd_flag,
        linearity,
        ab_flag: if need_ab { ab } else { None },
        gold_flag: class
            .as_ref()
            .filter(|_| wants(Check::Gold))
            .map(|c| c.is_gold()),
        gold_k: class
            .as_ref()
            .filter(|_| wants(Check::Gold))
            .and_then(|c| c.gold_k),
        kasami_flag: class
            .as_ref()
            .filter(|_| wants(Check::Kasami))
            .map(|c| c.is_kasami()),
        kasami_k: class
            .as_ref()
            .filter(|_| wants(Check::Kasami))
            .and_then(|c| c.kasami_k),
        three_value_flag: three_value,
        seven_value_set: seven_value,
        trace_identity_flag: identity.filter(|_| wants(Check::TraceIdentity)),
        witness,
    })
}

/// Exponents to scan: the canonical representatives of every class that
/// meets `range`, each paired with the smallest `d` of that class in range.
/// Without a range every class except the linear one (`d = 1`) is taken with
/// `d` canonical.
fn targets(m: u32, range: Option<RangeInclusive<u64>>) -> Vec<u64> {
    let n = (1u64 << m) - 1;
    match range {
        None => coset_representatives(m)
            .into_iter()
            .filter(|&d| d != 1)
            .collect(),
        Some(r) => {
            let lo = (*r.start()).max(1);
            let hi = (*r.end()).min(n - 1);
            let mut first: BTreeMap<u64, u64> = BTreeMap::new();
            for d in lo..=hi {
                first.entry(canonical_exponent(d, m)).or_insert(d);
            }
            let mut ds: Vec<u64> = first.into_values().collect();
            ds.sort_unstable();
            ds
        }
    }
}

/// One record per exponent class in range, ascending by `d`. Evaluation runs
/// on a pool of `jobs` threads (0 picks the default); the output does not
/// depend on `jobs`.
pub fn scan_range(
    spec: &FieldSpec,
    range: Option<RangeInclusive<u64>>,
    checks: &BTreeSet<Check>,
    jobs: usize,
) -> Result<Vec<ScanRecord>, CliError> {
    let ds = targets(spec.m(), range);
    if ds.is_empty() {
        return Err(CliError::RangeEmpty);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::BadFlag(format!("--jobs: {e}")))?;
    let records = pool.install(|| {
        ds.par_iter()
            .map(|&d| evaluate(d, spec, checks))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lists() {
        let all = parse_checks("all").unwrap();
        assert_eq!(all.len(), 7);
        let two = parse_checks("ab, gold").unwrap();
        assert_eq!(two, [Check::Ab, Check::Gold].into());
        assert!(parse_checks("ab,nope").is_err());
        assert!(parse_checks("").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..9").unwrap(), 3..=9);
        assert_eq!(parse_range("3..=9").unwrap(), 3..=9);
        assert!(parse_range("9..3").is_err());
        assert!(parse_range("x..3").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn range_targets_pick_first_member() {
        // 13 and 11 share a class at m = 5; 13 is the only member in range
        assert_eq!(targets(5, Some(13..=13)), vec![13]);
        // 12 belongs to the class of 3
        assert_eq!(targets(5, Some(11..=13)), vec![11, 12]);
        assert_eq!(targets(5, Some(0..=2)), vec![1]);
        assert!(targets(5, Some(31..=40)).is_empty());
        assert_eq!(targets(5, None), vec![3, 5, 7, 11, 15]);
    }
}
