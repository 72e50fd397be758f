//! m-sequences, decimation and periodic correlation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::spectrum::{check_exponent, power_walsh};

/// One period of a binary periodic sequence. Indices are taken modulo the period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicSequence {
    bits: Vec<bool>,
}

impl PeriodicSequence {
    /// Panics on an empty period.
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "period must be at least 1");
        PeriodicSequence { bits }
    }

    #[inline]
    pub fn period(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn at(&self, i: usize) -> bool {
        self.bits[i % self.bits.len()]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for PeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for PeriodicSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BadBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::BadBitString(s.to_string()));
        }
        Ok(PeriodicSequence { bits })
    }
}

/// `a_i = tr(zeta^i)` over one period `2^m - 1`.
pub fn m_sequence(spec: &FieldSpec) -> PeriodicSequence {
    m_sequence_of(spec.zeta(), spec)
}

/// `a_i = tr(g^i)` for `i < 2^m - 1`.
pub(crate) fn m_sequence_of(g: FieldElement, spec: &FieldSpec) -> PeriodicSequence {
    let mut x = FieldElement::ONE;
    let bits = (0..spec.order())
        .map(|_| {
            let b = spec.trace(x);
            x = spec.mul(x, g);
            b
        })
        .collect();
    PeriodicSequence { bits }
}

/// Result of a decimation; `coprime` is false when `gcd(d, n) != 1`, in which
/// case an m-sequence does not stay an m-sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimation {
    pub sequence: PeriodicSequence,
    pub coprime: bool,
}

/// `b_i = a_{i d mod n}`.
pub fn decimate(a: &PeriodicSequence, d: u64) -> Decimation {
    let n = a.period() as u64;
    let bits = (0..n)
        .map(|i| a.bits[((i * (d % n)) % n) as usize])
        .collect();
    Decimation {
        sequence: PeriodicSequence { bits },
        coprime: gcd(d, n) == 1,
    }
}

#[inline]
fn sign(a: bool, b: bool) -> i64 {
    if a ^ b {
        -1
    } else {
        1
    }
}

/// `c_t(a) = sum_i (-1)^{a_i + a_{i+t}}`.
pub fn autocorrelation(a: &PeriodicSequence, t: usize) -> i64 {
    let n = a.period();
    (0..n).map(|i| sign(a.bits[i], a.bits[(i + t) % n])).sum()
}

/// `c_t(a, b) = sum_i (-1)^{a_i + b_{i+t}}`.
pub fn crosscorrelation(a: &PeriodicSequence, b: &PeriodicSequence, t: usize) -> Result<i64> {
    let n = a.period();
    if b.period() != n {
        return Err(Error::PeriodMismatch(n, b.period()));
    }
    Ok((0..n).map(|i| sign(a.bits[i], b.bits[(i + t) % n])).sum())
}

/// `c_t(a, b)` for `t = 0..n`.
pub fn crosscorrelation_spectrum(a: &PeriodicSequence, b: &PeriodicSequence) -> Result<Vec<i64>> {
    let n = a.period();
    if b.period() != n {
        return Err(Error::PeriodMismatch(n, b.period()));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|t| (0..n).map(|i| sign(a.bits[i], b.bits[(i + t) % n])).sum())
        .collect())
}

/// Odd period and `c_t(a) = -1` for every `1 <= t < n`.
pub fn is_perfect(a: &PeriodicSequence) -> Result<bool> {
    let n = a.period();
    if n.is_multiple_of(2) {
        return Err(Error::EvenPeriod(n));
    }
    Ok((1..n).into_par_iter().all(|t| autocorrelation(a, t) == -1))
}

/// `t,value` rows with a header line.
pub fn correlation_csv(values: &[i64]) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in values.iter().enumerate() {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Pointwise comparison of `c_t(a^{[d]}, a)` with `W_d(zeta^t) - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub d: u64,
    pub m: u32,
    /// The identity held for every shift `t`.
    pub holds: bool,
    /// Shifts where it failed.
    pub mismatches: Vec<usize>,
    pub crosscorrelation: Vec<i64>,
    pub max_crosscorrelation: i64,
    /// `L(x^d) = max_alpha |W_d(alpha)|`.
    pub linearity: u64,
    /// `max_t |c_t + 1|`, which equals `L(x^d)` because `W_d(0) = 0`.
    pub max_abs_shifted: u64,
}

/// Checks `c_t(a^{[d]}, a) = W_d(zeta^t) - 1` for all `t`, where `a` is the
/// m-sequence of `spec`. The `-1` is the `x = 0` term of `W_d`, which is `+1`.
pub fn crosscorr_walsh_bridge(d: u64, spec: &FieldSpec) -> Result<BridgeReport> {
    check_exponent(d, spec)?;
    let g = gcd(d, spec.order());
    if g != 1 {
        return Err(Error::NotCoprime { d, gcd: g });
    }
    let a = m_sequence(spec);
    let b = decimate(&a, d).sequence;
    let corr = crosscorrelation_spectrum(&b, &a)?;
    let w = power_walsh(d, spec)?;
    let mismatches: Vec<usize> = corr
        .iter()
        .enumerate()
        .filter(|&(t, &c)| c != w.get(spec.antilog(t as u64)) as i64 - 1)
        .map(|(t, _)| t)
        .collect();
    Ok(BridgeReport {
        d,
        m: spec.m(),
        holds: mismatches.is_empty(),
        mismatches,
        max_crosscorrelation: corr.iter().copied().max().unwrap_or(0),
        max_abs_shifted: corr
            .iter()
            .map(|c| (c + 1).unsigned_abs())
            .max()
            .unwrap_or(0),
        crosscorrelation: corr,
        linearity: w.linearity(),
    })
}
