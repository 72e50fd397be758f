//! Walsh spectra, linearity and almost-bent classification.
//!
//! Spectra are indexed by the field element `gamma` of the character
//! `x -> (-1)^{tr(gamma x)}`. The butterfly transform works in the dot-product
//! basis; [`walsh_fast`] maps its output back to trace indexing through the
//! dual basis of the field.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Bit-packed truth table of `f: GF(2^m) -> GF(2)`, indexed by element bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    m: u32,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zero(m: u32) -> Self {
        let words = (1usize << m).div_ceil(64);
        TruthTable {
            m,
            words: vec![0; words],
        }
    }

    pub fn from_fn(m: u32, mut f: impl FnMut(u32) -> bool) -> Self {
        let mut t = Self::zero(m);
        for x in 0..1u32 << m {
            if f(x) {
                t.set(x, true);
            }
        }
        t
    }

    /// Table from a bit slice of length `2^m`.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::LengthNotPowerOfTwo(n));
        }
        let m = n.trailing_zeros();
        Ok(Self::from_fn(m, |x| bits[x as usize]))
    }

    /// `x -> tr(beta * F(x))` for a vectorial `F` given as a value table.
    pub fn coordinate(values: &[FieldElement], beta: FieldElement, spec: &FieldSpec) -> Self {
        Self::from_fn(spec.m(), |x| spec.trace_beta(beta, values[x as usize]))
    }

    /// `x -> tr(x^d)`.
    pub fn power_trace(d: u64, spec: &FieldSpec) -> Self {
        let map = spec.power_map(d);
        Self::coordinate(&map, FieldElement::ONE, spec)
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, x: u32) -> bool {
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u32, value: bool) {
        let w = &mut self.words[(x >> 6) as usize];
        if value {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `(-1)^{f(x)}` for every `x`.
    pub fn signs(&self) -> Vec<i32> {
        (0..self.len() as u32)
            .map(|x| if self.get(x) { -1 } else { 1 })
            .collect()
    }
}

/// The `2^m` Walsh coefficients `W_f(gamma)` indexed by `gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct WalshSpectrum {
    m: u32,
    coeffs: Vec<i32>,
}

impl TryFrom<Vec<i32>> for WalshSpectrum {
    type Error = Error;

    fn try_from(coeffs: Vec<i32>) -> Result<Self> {
        let n = coeffs.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::LengthNotPowerOfTwo(n));
        }
        Ok(WalshSpectrum {
            m: n.trailing_zeros(),
            coeffs,
        })
    }
}

impl From<WalshSpectrum> for Vec<i32> {
    fn from(s: WalshSpectrum) -> Vec<i32> {
        s.coeffs
    }
}

impl WalshSpectrum {
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    #[inline]
    pub fn get(&self, gamma: FieldElement) -> i32 {
        self.coeffs[gamma.0 as usize]
    }

    /// `max |W(gamma)|`.
    pub fn linearity(&self) -> u64 {
        max_abs(&self.coeffs)
    }

    /// `sum W(gamma)^2`, which equals `2^{2m}` for every boolean function.
    pub fn parseval_sum(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|&c| (c as i64 * c as i64) as u64)
            .sum()
    }

    pub fn value_multiplicities(&self) -> BTreeMap<i64, u64> {
        multiplicities(&self.coeffs)
    }

    /// `gamma,coefficient` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,coefficient\n");
        for (g, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{g},{c}\n"));
        }
        out
    }
}

fn max_abs(values: &[i32]) -> u64 {
    values
        .iter()
        .map(|c| c.unsigned_abs() as u64)
        .max()
        .unwrap_or(0)
}

fn multiplicities(values: &[i32]) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for &c in values {
        *out.entry(c as i64).or_insert(0) += 1;
    }
    out
}

/// In-place unnormalized Walsh-Hadamard transform:
/// `out[u] = sum_x (-1)^{popcount(u & x)} in[x]`.
pub fn fwht<T>(data: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

fn raw_spectrum(f: &TruthTable) -> Vec<i32> {
    let mut s = f.signs();
    fwht(&mut s).expect("truth tables have power-of-two length");
    s
}

fn check_dims(f: &TruthTable, spec: &FieldSpec) -> Result<()> {
    if f.m() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            got: f.m(),
        });
    }
    Ok(())
}

/// `W_f(gamma) = sum_x (-1)^{tr(gamma x) + f(x)}` by the direct double loop.
pub fn walsh_naive(f: &TruthTable, spec: &FieldSpec) -> Result<WalshSpectrum> {
    check_dims(f, spec)?;
    let coeffs = spec
        .elements()
        .map(|gamma| {
            spec.elements()
                .map(|x| {
                    if spec.trace_beta(gamma, x) ^ f.get(x.0) {
                        -1
                    } else {
                        1
                    }
                })
                .sum()
        })
        .collect();
    Ok(WalshSpectrum {
        m: spec.m(),
        coeffs,
    })
}

/// Same spectrum as [`walsh_naive`] in `O(m 2^m)`.
pub fn walsh_fast(f: &TruthTable, spec: &FieldSpec) -> Result<WalshSpectrum> {
    check_dims(f, spec)?;
    let raw = raw_spectrum(f);
    let coeffs = spec
        .dual_table()
        .into_iter()
        .map(|u| raw[u as usize])
        .collect();
    Ok(WalshSpectrum {
        m: spec.m(),
        coeffs,
    })
}

/// `L(f) = max_gamma |W_f(gamma)|`. Independent of the character indexing.
pub fn linearity(f: &TruthTable) -> u64 {
    max_abs(&raw_spectrum(f))
}

/// `N(f) = 2^{m-1} - L(f)/2`, the distance to the nearest affine function.
pub fn nonlinearity(f: &TruthTable) -> Result<u64> {
    let l = linearity(f);
    if l % 2 == 1 {
        return Err(Error::OddLinearity(l));
    }
    Ok((1u64 << (f.m() - 1)) - l / 2)
}

/// True when `m` is even and `L(f) = 2^{m/2}`.
pub fn is_bent(f: &TruthTable) -> bool {
    f.m().is_multiple_of(2) && linearity(f) == 1u64 << (f.m() / 2)
}

pub(crate) fn check_exponent(d: u64, spec: &FieldSpec) -> Result<()> {
    let max = spec.order() - 1;
    if !(1..=max).contains(&d) {
        return Err(Error::ExponentOutOfRange { d, max });
    }
    Ok(())
}

/// `W_d(alpha) = sum_x (-1)^{tr(alpha x + x^d)}`.
pub fn power_walsh(d: u64, spec: &FieldSpec) -> Result<WalshSpectrum> {
    check_exponent(d, spec)?;
    walsh_fast(&TruthTable::power_trace(d, spec), spec)
}

/// `L(F) = max_{beta != 0} L(tr(beta F))` for `F` given as a value table.
pub fn vector_linearity(values: &[FieldElement], spec: &FieldSpec) -> Result<u64> {
    if values.len() != spec.size() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            got: values.len().trailing_zeros(),
        });
    }
    Ok((1..spec.size() as u32)
        .into_par_iter()
        .map(|beta| linearity(&TruthTable::coordinate(values, FieldElement(beta), spec)))
        .max()
        .unwrap_or(0))
}

/// `2^{(m+1)/2}` for odd `m`.
pub fn ab_linearity(m: u32) -> u64 {
    1u64 << m.div_ceil(2)
}

/// Value distribution of one coordinate spectrum of an almost-bent function.
/// `trace_at_zero` is `tr(beta F(0))`.
pub fn ab_multiplicities(m: u32, trace_at_zero: bool) -> BTreeMap<i64, u64> {
    let peak = ab_linearity(m) as i64;
    let quarter = 1u64 << (m - 2);
    let shift = 1u64 << ((m - 3) / 2);
    let (plus, minus) = if trace_at_zero {
        (quarter - shift, quarter + shift)
    } else {
        (quarter + shift, quarter - shift)
    };
    BTreeMap::from([(0, 1u64 << (m - 1)), (peak, plus), (-peak, minus)])
}

/// Almost-bent classification of `x -> x^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbReport {
    pub d: u64,
    pub m: u32,
    pub is_ab: bool,
    /// `L(x^d)` over all coordinate functions.
    pub linearity: u64,
    /// Value distribution of the coordinate spectrum at `beta = 1`.
    pub value_multiplicities: BTreeMap<i64, u64>,
    /// Every coordinate spectrum matches the almost-bent distribution,
    /// including the orientation given by `tr(beta F(0))`.
    pub sign_rule_ok: bool,
    /// `gcd(d, 2^m - 1) = 1`.
    pub bijective: bool,
}

/// Classifies `x^d` by computing all `2^m - 1` coordinate spectra.
pub fn classify_ab(d: u64, spec: &FieldSpec) -> Result<AbReport> {
    let m = spec.m();
    if m.is_multiple_of(2) {
        return Err(Error::EvenM(m));
    }
    check_exponent(d, spec)?;
    let values = spec.power_map(d);
    let f0 = values[0];
    let peak = ab_linearity(m) as i64;

    let per_beta: Vec<(u64, BTreeMap<i64, u64>, bool)> = (1..spec.size() as u32)
        .into_par_iter()
        .map(|beta| {
            let beta = FieldElement(beta);
            let raw = raw_spectrum(&TruthTable::coordinate(&values, beta, spec));
            (
                max_abs(&raw),
                multiplicities(&raw),
                spec.trace_beta(beta, f0),
            )
        })
        .collect();

    let linearity = per_beta.iter().map(|(l, _, _)| *l).max().unwrap_or(0);
    let is_ab = per_beta
        .iter()
        .all(|(_, mult, _)| mult.keys().all(|&v| v == 0 || v.abs() == peak));
    let sign_rule_ok = is_ab
        && per_beta
            .iter()
            .all(|(_, mult, t0)| *mult == ab_multiplicities(m, *t0));

    Ok(AbReport {
        d,
        m,
        is_ab,
        linearity,
        value_multiplicities: per_beta[0].1.clone(),
        sign_rule_ok,
        bijective: gcd(d, spec.order()) == 1,
    })
}

/// Almost-bent test for a bijective power map from the single spectrum `W_d`.
/// Non-bijective power maps are never almost bent.
pub fn is_ab_power(d: u64, spec: &FieldSpec) -> Result<bool> {
    let m = spec.m();
    if m.is_multiple_of(2) {
        return Err(Error::EvenM(m));
    }
    check_exponent(d, spec)?;
    if gcd(d, spec.order()) != 1 {
        return Ok(false);
    }
    let peak = ab_linearity(m) as i32;
    Ok(power_walsh(d, spec)?
        .coeffs()
        .iter()
        .all(|&c| c == 0 || c.abs() == peak))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: u32) -> FieldSpec {
        FieldSpec::new(m).unwrap()
    }

    #[test]
    fn constant_and_linear_tables() {
        let spec = f(4);
        let zero = TruthTable::zero(4);
        let w = walsh_fast(&zero, &spec).unwrap();
        assert_eq!(w.coeffs()[0], 16);
        assert!(w.coeffs()[1..].iter().all(|&c| c == 0));

        let one = TruthTable::from_fn(4, |_| true);
        assert_eq!(walsh_fast(&one, &spec).unwrap().coeffs()[0], -16);

        let tr = TruthTable::from_fn(4, |x| spec.trace(FieldElement(x)));
        let w = walsh_naive(&tr, &spec).unwrap();
        assert_eq!(w.coeffs()[1], 16);
        assert_eq!(w.coeffs().iter().filter(|&&c| c != 0).count(), 1);
        assert_eq!(linearity(&tr), 16);
        assert_eq!(nonlinearity(&tr).unwrap(), 0);
    }

    #[test]
    fn cube_trace_at_m3() {
        let spec = f(3);
        let t = TruthTable::power_trace(3, &spec);
        let w = walsh_naive(&t, &spec).unwrap();
        assert_eq!(
            w.value_multiplicities(),
            BTreeMap::from([(-4, 1), (0, 4), (4, 3)])
        );
        assert_eq!(linearity(&t), 4);
        assert_eq!(nonlinearity(&t).unwrap(), 2);
        assert_eq!(power_walsh(3, &spec).unwrap().coeffs()[1], -4);
    }

    #[test]
    fn nonlinearity_of_gold_at_m5() {
        let spec = f(5);
        assert_eq!(
            nonlinearity(&TruthTable::power_trace(3, &spec)).unwrap(),
            12
        );
    }

    #[test]
    fn power_walsh_properties() {
        let spec = f(5);
        assert_eq!(power_walsh(3, &spec).unwrap().coeffs()[0], 0);
        let w1 = power_walsh(1, &spec).unwrap();
        assert_eq!(w1.coeffs()[1], 32);
        assert_eq!(w1.coeffs().iter().filter(|&&c| c != 0).count(), 1);
        assert!(matches!(
            power_walsh(0, &spec),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            power_walsh(31, &spec),
            Err(Error::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn fwht_rejects_odd_lengths() {
        assert_eq!(fwht(&mut [1i32, 2, 3]), Err(Error::LengthNotPowerOfTwo(3)));
        assert_eq!(fwht::<i64>(&mut []), Err(Error::LengthNotPowerOfTwo(0)));
    }

    #[test]
    fn dimension_mismatch() {
        let spec = f(4);
        assert!(matches!(
            walsh_naive(&TruthTable::zero(3), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            walsh_fast(&TruthTable::zero(5), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vector_linearity_examples() {
        let spec = f(5);
        let identity: Vec<_> = spec.elements().collect();
        assert_eq!(vector_linearity(&identity, &spec).unwrap(), 32);
        let cube = spec.power_map(3);
        assert_eq!(vector_linearity(&cube, &spec).unwrap(), 8);
    }

    #[test]
    fn classify_small_cases() {
        let r = classify_ab(3, &f(3)).unwrap();
        assert!(r.is_ab && r.sign_rule_ok);
        assert_eq!(
            r.value_multiplicities,
            BTreeMap::from([(0, 4), (4, 3), (-4, 1)])
        );

        let r = classify_ab(3, &f(5)).unwrap();
        assert!(r.is_ab && r.sign_rule_ok);
        assert_eq!(
            r.value_multiplicities,
            BTreeMap::from([(0, 16), (8, 10), (-8, 6)])
        );

        assert!(classify_ab(13, &f(5)).unwrap().is_ab);
        let r = classify_ab(1, &f(5)).unwrap();
        assert!(!r.is_ab);
        assert_eq!(r.linearity, 32);
        assert_eq!(classify_ab(3, &f(4)), Err(Error::EvenM(4)));
    }

    #[test]
    fn non_bijective_exponent_is_reported() {
        // gcd(7, 511) = 7
        let spec9 = f(9);
        let r = classify_ab(7, &spec9).unwrap();
        assert!(!r.bijective);
        assert!(!r.is_ab);
        assert!(!is_ab_power(7, &spec9).unwrap());
    }

    #[test]
    fn bent_detection_for_even_m() {
        // x0 x1 + x2 x3
        let t = TruthTable::from_fn(4, |x| {
            ((x & 1) & (x >> 1 & 1)) ^ ((x >> 2 & 1) & (x >> 3 & 1)) == 1
        });
        assert!(is_bent(&t));
        assert!(!is_bent(&TruthTable::zero(4)));
    }

    #[test]
    fn spectrum_serialization() {
        let w = power_walsh(3, &f(3)).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.starts_with('['));
        let back: WalshSpectrum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
        let csv = w.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("gamma,coefficient\n0,0\n"));
        assert!(serde_json::from_str::<WalshSpectrum>("[1,2,3]").is_err());
    }
}
