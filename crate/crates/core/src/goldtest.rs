//! The trace identity `tr(x^d + (x+1)^d + 1) = 0`, cyclotomic cosets,
//! exponent classification and the run/gap witness construction.
//!
//! Binary vectors are written `(z_{m-1}, ..., z_0)`: bit `i` of the integer is
//! `z_i`, and [`CyclicBitVector::shift`] rotates towards the high end.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{binomial_is_odd, gcd};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::spectrum::{check_exponent, fwht, is_ab_power, power_walsh};

/// Default cap on `w(d)` for subvector enumeration (`2^w` subvectors).
pub const DEFAULT_WEIGHT_CAP: u32 = 20;

/// A length-`m` binary vector viewed cyclically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicBitVector {
    m: u32,
    bits: u64,
}

impl CyclicBitVector {
    pub fn new(m: u32, bits: u64) -> Result<Self> {
        if !(1..=63).contains(&m) || bits >> m != 0 {
            return Err(Error::BadBitString(format!("{bits:#b} (m = {m})")));
        }
        Ok(CyclicBitVector { m, bits })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn bit(&self, i: u32) -> bool {
        self.bits >> (i % self.m) & 1 == 1
    }

    fn mask(&self) -> u64 {
        (1u64 << self.m) - 1
    }

    /// `v^{(t)}`: cyclic shift by `t` positions to the left, i.e. the vector
    /// of `2^t a mod 2^m - 1`.
    pub fn shift(&self, t: u32) -> Self {
        let t = t % self.m;
        if t == 0 {
            return *self;
        }
        let bits = ((self.bits << t) | (self.bits >> (self.m - t))) & self.mask();
        CyclicBitVector { m: self.m, bits }
    }

    /// Nonzero, different from `v`, and every 1 of `self` is a 1 of `v`.
    pub fn is_subvector_of(&self, v: &CyclicBitVector) -> bool {
        self.m == v.m && self.bits != 0 && self.bits != v.bits && self.bits & !v.bits == 0
    }

    /// Maximal cyclic runs of ones as `(start, length)`, `start` being the
    /// lowest index of the run, sorted by start.
    pub fn runs(&self) -> Vec<(u32, u32)> {
        self.blocks(true)
    }

    /// Maximal cyclic gaps (runs of zeros) as `(start, length)`.
    pub fn gaps(&self) -> Vec<(u32, u32)> {
        self.blocks(false)
    }

    fn blocks(&self, value: bool) -> Vec<(u32, u32)> {
        let m = self.m;
        if (0..m).all(|i| self.bit(i) == value) {
            return vec![(0, m)];
        }
        // start right after a position holding the opposite value
        let anchor = (0..m).find(|&i| self.bit(i) != value).unwrap();
        let mut out = Vec::new();
        let mut k = 1;
        while k <= m {
            let i = (anchor + k) % m;
            if self.bit(i) == value {
                let mut len = 0;
                while self.bit((i + len) % m) == value {
                    len += 1;
                }
                out.push((i, len));
                k += len;
            } else {
                k += 1;
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for CyclicBitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.m as usize)
    }
}

impl FromStr for CyclicBitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 63 || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::BadBitString(s.to_string()));
        }
        let bits = u64::from_str_radix(s, 2).map_err(|_| Error::BadBitString(s.to_string()))?;
        CyclicBitVector::new(s.len() as u32, bits)
    }
}

impl Serialize for CyclicBitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CyclicBitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The cyclotomic coset `{2^i d mod 2^m - 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentCoset {
    /// Ascending.
    pub members: Vec<u64>,
    /// Smallest odd member.
    pub canonical: u64,
}

impl ExponentCoset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.members.binary_search(&e).is_ok()
    }
}

/// Doubling closure of `d` modulo `2^m - 1`. `d` is reduced first; the
/// zero class is `{0}`.
pub fn cyclotomic_coset(d: u64, m: u32) -> ExponentCoset {
    let n = (1u64 << m) - 1;
    let d = d % n;
    if d == 0 {
        return ExponentCoset {
            members: vec![0],
            canonical: 0,
        };
    }
    let v = CyclicBitVector { m, bits: d };
    let members: Vec<u64> = (0..m).map(|t| v.shift(t).bits).sorted().dedup().collect();
    let canonical = *members
        .iter()
        .find(|&&e| e % 2 == 1)
        .expect("nonzero class has odd members");
    ExponentCoset { members, canonical }
}

/// Smallest odd member of the coset of `d`.
pub fn canonical_exponent(d: u64, m: u32) -> u64 {
    let n = (1u64 << m) - 1;
    let v = CyclicBitVector { m, bits: d % n };
    (0..m)
        .map(|t| v.shift(t).bits)
        .filter(|e| e % 2 == 1)
        .min()
        .unwrap_or(0)
}

/// Canonical representatives of all nonzero classes, ascending.
pub fn coset_representatives(m: u32) -> Vec<u64> {
    let n = (1u64 << m) - 1;
    (1..n)
        .step_by(2)
        .filter(|&d| canonical_exponent(d, m) == d)
        .collect()
}

/// Membership of `d` in the Gold and Kasami families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentClass {
    pub d: u64,
    pub m: u32,
    pub canonical: u64,
    pub gcd: u64,
    /// Smallest `k` with `gcd(k, m) = 1` and `2^k + 1` in the coset of `d`.
    pub gold_k: Option<u32>,
    /// Smallest `k` with `gcd(k, m) = 1` and `2^{2k} - 2^k + 1` in the coset.
    pub kasami_k: Option<u32>,
}

impl ExponentClass {
    pub fn is_gold(&self) -> bool {
        self.gold_k.is_some()
    }

    pub fn is_kasami(&self) -> bool {
        self.kasami_k.is_some()
    }
}

fn pow2_mod(e: u32, m: u32) -> u64 {
    1u64 << (e % m)
}

pub fn gold_exponent(k: u32, m: u32) -> u64 {
    (pow2_mod(k, m) + 1) % ((1u64 << m) - 1)
}

pub fn kasami_exponent(k: u32, m: u32) -> u64 {
    let n = (1u64 << m) - 1;
    (pow2_mod(2 * k, m) + n - pow2_mod(k, m) + 1) % n
}

pub fn classify_exponent(d: u64, m: u32) -> ExponentClass {
    let n = (1u64 << m) - 1;
    let coset = cyclotomic_coset(d, m);
    let coprime_ks = || (1..m).filter(move |&k| gcd(k as u64, m as u64) == 1);
    ExponentClass {
        d,
        m,
        canonical: coset.canonical,
        gcd: gcd(d, n),
        gold_k: coprime_ks().find(|&k| coset.contains(gold_exponent(k, m))),
        kasami_k: coprime_ks().find(|&k| coset.contains(kasami_exponent(k, m))),
    }
}

/// `tr(x^d + (x+1)^d + 1) = 0` for every `x`, by enumeration. Even `d` is
/// replaced by its canonical coset member first.
pub fn trace_identity(d: u64, spec: &FieldSpec) -> Result<bool> {
    check_exponent(d, spec)?;
    let d = canonical_exponent(d, spec.m());
    let map = spec.power_map(d);
    let tr1 = spec.trace(FieldElement::ONE);
    Ok((0..spec.size()).all(|x| !(spec.trace(map[x]) ^ spec.trace(map[x ^ 1]) ^ tr1)))
}

/// Per-class tally of the exponents of `p(x) = x^d + (x+1)^d + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialParity {
    /// Every monomial of `tr(p(x))` has an even coefficient.
    pub vanishes: bool,
    /// Canonical representative -> number of exponents of `p` in that class.
    pub class_counts: BTreeMap<u64, u64>,
    /// Classes whose monomials in `tr(p(x))` have odd coefficient.
    pub odd_classes: Vec<u64>,
}

pub fn monomial_parity(d: u64, m: u32) -> Result<MonomialParity> {
    monomial_parity_with_cap(d, m, DEFAULT_WEIGHT_CAP)
}

/// The exponents of `p` are the proper nonzero submasks of `d` (Lucas).
/// A class `C` with `N_C` of them contributes `N_C * m / |C|` copies of each of
/// its monomials to `tr(p(x))`; the identity holds iff all of these are even.
pub fn monomial_parity_with_cap(d: u64, m: u32, cap: u32) -> Result<MonomialParity> {
    let n = (1u64 << m) - 1;
    if !(1..n).contains(&d) {
        return Err(Error::ExponentOutOfRange { d, max: n - 1 });
    }
    let weight = d.count_ones();
    if weight > cap {
        return Err(Error::WeightOverflow { weight, cap });
    }
    let mut class_counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut t = (d - 1) & d;
    while t != 0 {
        *class_counts.entry(canonical_exponent(t, m)).or_insert(0) += 1;
        t = (t - 1) & d;
    }
    let odd_classes: Vec<u64> = class_counts
        .iter()
        .filter(|&(&c, &count)| {
            let size = cyclotomic_coset(c, m).len() as u64;
            (count * (m as u64 / size)) % 2 == 1
        })
        .map(|(&c, _)| c)
        .collect();
    Ok(MonomialParity {
        vanishes: odd_classes.is_empty(),
        class_counts,
        odd_classes,
    })
}

/// `|S(s)|`: the number of shifts `i in 0..m` with `s^{(i)}` a subvector of `dbar`.
pub fn subvector_multiset_count(s: &CyclicBitVector, dbar: &CyclicBitVector) -> Result<u32> {
    if s.m != dbar.m {
        return Err(Error::LengthMismatch(s.m, dbar.m));
    }
    if s.bits == 0 || s.bits == dbar.bits {
        return Err(Error::InvalidSubvectorQuery);
    }
    Ok((0..s.m)
        .filter(|&i| s.shift(i).is_subvector_of(dbar))
        .count() as u32)
}

/// How a witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessPath {
    Line4,
    Line6,
    Line7,
    Line8,
    WeightObstruction,
    Fallback,
}

impl fmt::Display for WitnessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessPath::Line4 => "line4",
            WitnessPath::Line6 => "line6",
            WitnessPath::Line7 => "line7",
            WitnessPath::Line8 => "line8",
            WitnessPath::WeightObstruction => "weight-obstruction",
            WitnessPath::Fallback => "fallback",
        })
    }
}

/// A candidate produced by the run/gap construction that failed verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedCandidate {
    pub path: WitnessPath,
    pub witness: CyclicBitVector,
    /// `None` when the candidate is not a subvector at all.
    pub multiset_size: Option<u32>,
}

/// A subvector `w` of `dbar` with `|S(w)|` odd, which rules out the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessResult {
    /// The exponent whose vector the witness refers to (canonical form).
    pub d: u64,
    pub m: u32,
    #[serde(rename = "witness_bits")]
    pub witness: CyclicBitVector,
    pub multiset_size: u32,
    pub path: WitnessPath,
    pub verified: bool,
    /// Line (9) regroupings performed before the construction stopped.
    #[serde(skip)]
    pub regroupings: u32,
    #[serde(skip)]
    pub rejected: Option<RejectedCandidate>,
}

/// For `w(d)` not a power of two: some `C(z, i)` is odd, so an odd number of
/// weight-`i` exponents occur in `p` and one shift class must have odd `|S|`.
pub fn weight_obstruction_witness(dbar: &CyclicBitVector) -> Option<WitnessResult> {
    let z = dbar.weight();
    if z < 2 || z.is_power_of_two() {
        return None;
    }
    let i = (1..z).find(|&i| binomial_is_odd(z as u64, i as u64))?;
    let positions: Vec<u32> = (0..dbar.m).filter(|&p| dbar.bit(p)).collect();
    let mut seen = HashSet::new();
    for combo in positions.iter().combinations(i as usize) {
        let bits = combo.iter().fold(0u64, |acc, &&p| acc | 1 << p);
        let s = CyclicBitVector { m: dbar.m, bits };
        if !seen.insert(canonical_exponent(bits, dbar.m)) {
            continue;
        }
        let count = subvector_multiset_count(&s, dbar).ok()?;
        if count % 2 == 1 {
            return Some(WitnessResult {
                d: dbar.bits,
                m: dbar.m,
                witness: s,
                multiset_size: count,
                path: WitnessPath::WeightObstruction,
                verified: true,
                regroupings: 0,
                rejected: None,
            });
        }
    }
    None
}

/// A block occurrence at some level of the construction.
#[derive(Clone, Debug)]
struct Block {
    mask: u64,
    ones: u32,
    /// First and last position, walking upward (cyclically).
    start: u32,
    end: u32,
}

fn gap_after(blocks: &[Block], k: usize, m: u32) -> u32 {
    let next = &blocks[(k + 1) % blocks.len()];
    (next.start + m - blocks[k].end - 1) % m
}

/// Runs the run/gap construction on a canonical vector of weight `2^n`,
/// `n >= 2`. Returns the candidate and the line that produced it.
fn run_gap_candidate(dbar: &CyclicBitVector) -> (Option<(CyclicBitVector, WitnessPath)>, u32) {
    let mut regroupings = 0;
    (run_gap_levels(dbar, &mut regroupings), regroupings)
}

fn run_gap_levels(
    dbar: &CyclicBitVector,
    regroupings: &mut u32,
) -> Option<(CyclicBitVector, WitnessPath)> {
    let m = dbar.m;
    let z = dbar.weight();
    let vector = |bits| CyclicBitVector { m, bits };

    // line (1)
    let mut blocks: Vec<Block> = dbar
        .runs()
        .into_iter()
        .map(|(start, len)| Block {
            mask: (0..len).fold(0, |acc, k| acc | 1 << ((start + k) % m)),
            ones: len,
            start,
            end: (start + len - 1) % m,
        })
        .collect();
    let mut previous: Option<(Vec<Block>, u32)> = None;

    for _ in 0..=m {
        let l = blocks.iter().map(|b| b.ones).max()?;
        let longest: Vec<&Block> = blocks.iter().filter(|b| b.ones == l).collect();
        let s = longest.len() as u32;
        // line (3)
        let y = longest.iter().fold(0, |acc, b| acc | b.mask);
        // line (4)
        if z != l * s {
            return Some((vector(y), WitnessPath::Line4));
        }
        // line (5)
        let x = (0..blocks.len()).map(|k| gap_after(&blocks, k, m)).min()?;
        match s {
            1 => match &previous {
                // line (6): the single run with its second-lowest bit cleared
                None => {
                    let run = blocks[0].mask;
                    let low = run & run.wrapping_neg();
                    let rest = run ^ low;
                    let second = rest & rest.wrapping_neg();
                    return Some((vector(dbar.bits ^ second), WitnessPath::Line6));
                }
                // line (7): two adjacent blocks of the previous level
                Some((old, x_old)) => {
                    let k = (0..old.len()).find(|&k| gap_after(old, k, m) == *x_old)?;
                    let w = old[k].mask | old[(k + 1) % old.len()].mask;
                    return Some((vector(w), WitnessPath::Line7));
                }
            },
            // line (8)
            2 => {
                let k = (0..blocks.len()).find(|&k| gap_after(&blocks, k, m) == x)?;
                let w = blocks[k].mask | blocks[(k + 1) % blocks.len()].mask;
                return Some((vector(w), WitnessPath::Line8));
            }
            _ => {
                // line (9): chain blocks separated by minimum gaps
                let n = blocks.len();
                let brk = (0..n).find(|&k| gap_after(&blocks, k, m) != x)?;
                let mut chains: Vec<Block> = Vec::new();
                for step in 0..n {
                    let k = (brk + 1 + step) % n;
                    let b = &blocks[k];
                    let joins = step > 0 && gap_after(&blocks, (k + n - 1) % n, m) == x;
                    match chains.last_mut() {
                        Some(c) if joins => {
                            c.mask |= b.mask;
                            c.ones += b.ones;
                            c.end = b.end;
                        }
                        _ => chains.push(b.clone()),
                    }
                }
                chains.sort_by_key(|c| c.start);
                if chains.len() >= blocks.len() {
                    return None;
                }
                previous = Some((std::mem::replace(&mut blocks, chains), x));
                *regroupings += 1;
            }
        }
    }
    None
}

/// Builds a subvector `w` of `dbar` with `|S(w)|` odd for `w(d) = 2^n`,
/// `n >= 2`, `m` odd. `dbar` is first replaced by its canonical rotation.
///
/// The run/gap candidate is always checked with [`subvector_multiset_count`];
/// if it is not a subvector or its count is even, an odd class from
/// [`monomial_parity`] supplies the witness instead (`path = fallback`).
pub fn find_odd_witness(dbar: &CyclicBitVector) -> Result<WitnessResult> {
    let m = dbar.m;
    if m.is_multiple_of(2) {
        return Err(Error::EvenM(m));
    }
    let z = dbar.weight();
    if z == 2 {
        return Err(Error::GoldInput);
    }
    if z < 4 || !z.is_power_of_two() {
        return Err(Error::WeightNotPowerOfTwo(z));
    }
    let d = canonical_exponent(dbar.bits, m);
    let dbar = CyclicBitVector { m, bits: d };

    let mut rejected = None;
    let (candidate, regroupings) = run_gap_candidate(&dbar);
    if let Some((w, path)) = candidate {
        match subvector_multiset_count(&w, &dbar) {
            Ok(count) if count % 2 == 1 => {
                return Ok(WitnessResult {
                    d,
                    m,
                    witness: w,
                    multiset_size: count,
                    path,
                    verified: true,
                    regroupings,
                    rejected: None,
                });
            }
            Ok(count) => {
                rejected = Some(RejectedCandidate {
                    path,
                    witness: w,
                    multiset_size: Some(count),
                })
            }
            Err(_) => {
                rejected = Some(RejectedCandidate {
                    path,
                    witness: w,
                    multiset_size: None,
                })
            }
        }
    }

    let parity = monomial_parity_with_cap(d, m, z)?;
    let class = *parity.odd_classes.first().ok_or(Error::NoWitness)?;
    let witness = cyclotomic_coset(class, m)
        .members
        .into_iter()
        .map(|e| CyclicBitVector { m, bits: e })
        .find(|w| w.is_subvector_of(&dbar))
        .ok_or(Error::NoWitness)?;
    let count = subvector_multiset_count(&witness, &dbar)?;
    Ok(WitnessResult {
        d,
        m,
        witness,
        multiset_size: count,
        path: WitnessPath::Fallback,
        verified: count % 2 == 1,
        regroupings,
        rejected,
    })
}

/// Outcome of the support test on `W_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSupport {
    /// The support `{alpha : W_d(alpha) != 0}` is `{alpha : tr(gamma alpha) = 1}`.
    pub holds: bool,
    pub gamma: Option<FieldElement>,
    pub support_size: usize,
}

/// Tests whether the indicator `b` of the support of `W_d` is a linear form
/// `tr(gamma x)`. The candidate `gamma` is read off the transform of
/// `b = W_d^2 / 2^{m+1}`, which is `-2^{m-1}` exactly at `gamma` when `b` is linear.
pub fn gold_support_check(d: u64, spec: &FieldSpec) -> Result<GoldSupport> {
    if spec.m().is_multiple_of(2) {
        return Err(Error::EvenM(spec.m()));
    }
    if !is_ab_power(d, spec)? {
        return Err(Error::NotAlmostBent(d));
    }
    let w = power_walsh(d, spec)?;
    let scale = 1i64 << (spec.m() + 1);
    let mut b: Vec<i64> = w
        .coeffs()
        .iter()
        .map(|&c| (c as i64 * c as i64) / scale)
        .collect();
    let support_size = b.iter().filter(|&&v| v != 0).count();
    let indicator = b.clone();
    fwht(&mut b)?;
    let half = 1i64 << (spec.m() - 1);
    let dual = spec.dual_table();
    let gamma = spec
        .elements()
        .find(|g| b[dual[g.0 as usize] as usize] == -half);
    let holds = gamma.is_some_and(|g| {
        spec.elements()
            .all(|a| (indicator[a.0 as usize] == 1) == spec.trace_beta(g, a))
    });
    Ok(GoldSupport {
        holds,
        gamma: gamma.filter(|_| holds),
        support_size,
    })
}

/// `sum_y (-1)^{tr(y^d + (y + omega)^d)}` by direct summation.
pub fn dd_correlation(d: u64, omega: FieldElement, spec: &FieldSpec) -> Result<i64> {
    check_exponent(d, spec)?;
    let map = spec.power_map(d);
    Ok((0..spec.size())
        .map(|y| {
            let a = spec.trace(map[y]);
            let b = spec.trace(map[y ^ omega.0 as usize]);
            if a ^ b {
                -1
            } else {
                1
            }
        })
        .sum())
}

/// [`dd_correlation`] for every `omega`, via `W^2` and an inverse transform.
pub fn dd_correlation_all(d: u64, spec: &FieldSpec) -> Result<Vec<i64>> {
    check_exponent(d, spec)?;
    let map = spec.power_map(d);
    let mut v: Vec<i64> = map
        .iter()
        .map(|&y| if spec.trace(y) { -1 } else { 1 })
        .collect();
    fwht(&mut v)?;
    for c in v.iter_mut() {
        *c *= *c;
    }
    fwht(&mut v)?;
    let size = spec.size() as i64;
    Ok(v.into_iter().map(|c| c / size).collect())
}
