//! Intersections of `D_d = {x : tr(x^d) = 1}` with hyperplanes
//! `H^i(alpha) = {x : tr(alpha x) = i}` and codimension-2 cells
//! `H^{i,j}(alpha, beta)`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::spectrum::{check_exponent, is_ab_power, power_walsh, WalshSpectrum};

/// A set of field elements stored as a bitset over `0..2^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    m: u32,
    words: Vec<u64>,
}

impl SupportSet {
    pub fn from_fn(m: u32, mut member: impl FnMut(FieldElement) -> bool) -> Self {
        let n = 1usize << m;
        let mut words = vec![0u64; n.div_ceil(64)];
        for x in 0..n {
            if member(FieldElement(x as u32)) {
                words[x >> 6] |= 1 << (x & 63);
            }
        }
        SupportSet { m, words }
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn contains(&self, x: FieldElement) -> bool {
        let x = x.0 as usize;
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..1u32 << self.m)
            .map(FieldElement)
            .filter(move |&x| self.contains(x))
    }

    fn and_count(&self, other: &[u64]) -> u64 {
        self.words
            .iter()
            .zip(other)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    fn and3_count(&self, a: &[u64], b: &[u64]) -> u64 {
        self.words
            .iter()
            .zip(a.iter().zip(b))
            .map(|(d, (x, y))| (d & x & y).count_ones() as u64)
            .sum()
    }
}

/// `D_d = {x : tr(x^d) = 1}`.
pub fn support_set(d: u64, spec: &FieldSpec) -> Result<SupportSet> {
    check_exponent(d, spec)?;
    let map = spec.power_map(d);
    Ok(SupportSet::from_fn(spec.m(), |x| {
        spec.trace(map[x.0 as usize])
    }))
}

/// `|D ∩ H^i(alpha)|` by direct enumeration.
pub fn hyperplane_count(
    set: &SupportSet,
    alpha: FieldElement,
    i: bool,
    spec: &FieldSpec,
) -> Result<u64> {
    if alpha.is_zero() {
        return Err(Error::ZeroAlpha);
    }
    Ok(set
        .members()
        .filter(|&x| spec.trace_beta(alpha, x) == i)
        .count() as u64)
}

/// `|D ∩ H^{i,j}(alpha, beta)|` by direct enumeration.
pub fn codim2_count(
    set: &SupportSet,
    alpha: FieldElement,
    beta: FieldElement,
    i: bool,
    j: bool,
    spec: &FieldSpec,
) -> Result<u64> {
    check_pair(alpha, beta)?;
    Ok(set
        .members()
        .filter(|&x| spec.trace_beta(alpha, x) == i && spec.trace_beta(beta, x) == j)
        .count() as u64)
}

fn check_pair(alpha: FieldElement, beta: FieldElement) -> Result<()> {
    if alpha.is_zero() || beta.is_zero() || alpha == beta {
        return Err(Error::DegenerateSubspace);
    }
    Ok(())
}

/// Codimension-2 intersection size from the spectrum of `x^d`:
///
/// `8 S = 2^m - W(0) - (-1)^i W(alpha) - (-1)^j W(beta) - (-1)^{i+j} W(alpha+beta)`.
///
/// `W(0)` vanishes for bijective power maps, leaving the signed form of the
/// seven-value envelope.
pub fn codim2_from_walsh(
    spectrum: &WalshSpectrum,
    alpha: FieldElement,
    beta: FieldElement,
    i: bool,
    j: bool,
) -> Result<i64> {
    check_pair(alpha, beta)?;
    let sign = |bit: bool, w: i32| if bit { -(w as i64) } else { w as i64 };
    let numerator = (1i64 << spectrum.m())
        - spectrum.get(FieldElement::ZERO) as i64
        - sign(i, spectrum.get(alpha))
        - sign(j, spectrum.get(beta))
        - sign(i ^ j, spectrum.get(alpha + beta));
    if numerator % 8 != 0 {
        return Err(Error::NonIntegerResult { numerator });
    }
    Ok(numerator / 8)
}

/// Which family of subspaces a profile was taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceFamily {
    /// `H^0(alpha)`, `alpha != 0`.
    Hyperplanes,
    /// All four cells `H^{i,j}(alpha, beta)` per unordered pair `{alpha, beta}`.
    Codim2,
}

/// Multiset of intersection sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionProfile {
    pub family: SubspaceFamily,
    pub counts: BTreeMap<u64, u64>,
}

impl IntersectionProfile {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn sizes(&self) -> BTreeSet<u64> {
        self.counts.keys().copied().collect()
    }

    /// `{"size": multiplicity, ...}` with keys in ascending numeric order.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .counts
            .iter()
            .map(|(size, mult)| format!("\"{size}\":{mult}"))
            .collect();
        format!("{{{}}}", body.join(","))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,multiplicity\n");
        for (size, mult) in &self.counts {
            out.push_str(&format!("{size},{mult}\n"));
        }
        out
    }
}

/// Bitsets of `H^1(alpha)` for every `alpha`, indexed by `alpha`.
fn hyperplane_bitsets(spec: &FieldSpec) -> Vec<Vec<u64>> {
    let n = spec.size();
    spec.dual_table()
        .into_par_iter()
        .map(|dual| {
            let mut words = vec![0u64; n.div_ceil(64)];
            for x in 0..n {
                if (dual & x as u32).count_ones() & 1 == 1 {
                    words[x >> 6] |= 1 << (x & 63);
                }
            }
            words
        })
        .collect()
}

/// Profile of `|D ∩ H^0(alpha)|` over all `alpha != 0` for an arbitrary set.
pub fn hyperplane_profile_of(set: &SupportSet, spec: &FieldSpec) -> IntersectionProfile {
    let planes = hyperplane_bitsets(spec);
    let total = set.len() as u64;
    let mut counts = BTreeMap::new();
    for h in planes.iter().skip(1) {
        *counts.entry(total - set.and_count(h)).or_insert(0) += 1;
    }
    IntersectionProfile {
        family: SubspaceFamily::Hyperplanes,
        counts,
    }
}

fn require_odd(spec: &FieldSpec) -> Result<()> {
    if spec.m().is_multiple_of(2) {
        return Err(Error::EvenM(spec.m()));
    }
    Ok(())
}

/// Hyperplane profile of `D_d` for a bijective power map at odd `m`.
pub fn hyperplane_profile(d: u64, spec: &FieldSpec) -> Result<IntersectionProfile> {
    require_odd(spec)?;
    check_exponent(d, spec)?;
    let g = gcd(d, spec.order());
    if g != 1 {
        return Err(Error::NotCoprime { d, gcd: g });
    }
    Ok(hyperplane_profile_of(&support_set(d, spec)?, spec))
}

/// Hyperplane profile of a nondegenerate quadric of size `2^{m-1}` with the
/// hyperplane `alpha = 0` excluded.
pub fn quadric_hyperplane_profile(m: u32) -> BTreeMap<u64, u64> {
    let quarter = 1u64 << (m - 2);
    let shift = 1u64 << ((m - 3) / 2);
    BTreeMap::from([
        (quarter, (1u64 << (m - 1)) - 1),
        (quarter - shift, quarter + shift),
        (quarter + shift, quarter - shift),
    ])
}

/// True when `set` has the hyperplane profile of a nondegenerate quadric.
pub fn quasi_quadric_check(set: &SupportSet, spec: &FieldSpec) -> Result<bool> {
    require_odd(spec)?;
    let expected = 1usize << (spec.m() - 1);
    if set.len() != expected {
        return Err(Error::WrongCardinality {
            expected,
            got: set.len(),
        });
    }
    Ok(hyperplane_profile_of(set, spec).counts == quadric_hyperplane_profile(spec.m()))
}

/// Profile of all codimension-2 cells, scanned with bitset popcounts.
pub fn codim2_profile_of(set: &SupportSet, spec: &FieldSpec) -> IntersectionProfile {
    let planes = hyperplane_bitsets(spec);
    let total = set.len() as u64;
    let on_plane: Vec<u64> = planes.iter().map(|h| set.and_count(h)).collect();
    let n = spec.size();
    let counts = (1..n)
        .into_par_iter()
        .map(|a| {
            let mut local = BTreeMap::new();
            for b in a + 1..n {
                let c11 = set.and3_count(&planes[a], &planes[b]);
                let c10 = on_plane[a] - c11;
                let c01 = on_plane[b] - c11;
                let c00 = total + c11 - on_plane[a] - on_plane[b];
                for c in [c00, c01, c10, c11] {
                    *local.entry(c).or_insert(0u64) += 1;
                }
            }
            local
        })
        .reduce(BTreeMap::new, |mut acc, part| {
            for (k, v) in part {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        });
    IntersectionProfile {
        family: SubspaceFamily::Codim2,
        counts,
    }
}

pub fn codim2_profile(d: u64, spec: &FieldSpec) -> Result<IntersectionProfile> {
    Ok(codim2_profile_of(&support_set(d, spec)?, spec))
}

fn require_ab(d: u64, spec: &FieldSpec) -> Result<()> {
    require_odd(spec)?;
    if !is_ab_power(d, spec)? {
        return Err(Error::NotAlmostBent(d));
    }
    Ok(())
}

/// Outcome of an envelope check over all codimension-2 cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub holds: bool,
    pub observed: BTreeSet<u64>,
}

/// `h` with `value = 2^{m-3} + h 2^{(m-5)/2}`, if integral.
pub fn envelope_offset(value: u64, m: u32) -> Option<i64> {
    let delta = value as i64 - (1i64 << (m - 3));
    if m >= 5 {
        let step = 1i64 << ((m - 5) / 2);
        (delta % step == 0).then_some(delta / step)
    } else {
        // step 2^{-1} at m = 3
        Some(2 * delta)
    }
}

/// Every codimension-2 intersection lies in
/// `{2^{m-3} + h 2^{(m-5)/2} : |h| <= 3}`.
pub fn seven_value_check(d: u64, spec: &FieldSpec) -> Result<EnvelopeCheck> {
    require_ab(d, spec)?;
    let observed = codim2_profile(d, spec)?.sizes();
    let m = spec.m();
    let holds = observed
        .iter()
        .all(|&v| envelope_offset(v, m).is_some_and(|h| h.abs() <= 3));
    Ok(EnvelopeCheck { holds, observed })
}

/// The three quadric values `{2^{m-3}, 2^{m-3} ± 2^{(m-3)/2}}`.
pub fn quadric_codim2_values(m: u32) -> BTreeSet<u64> {
    let base = 1u64 << (m - 3);
    let shift = 1u64 << ((m - 3) / 2);
    BTreeSet::from([base - shift, base, base + shift])
}

/// Every codimension-2 intersection takes one of the three quadric values.
pub fn three_value_check(d: u64, spec: &FieldSpec) -> Result<bool> {
    Ok(three_value_envelope(d, spec)?.holds)
}

/// [`three_value_check`] together with the observed value set.
pub fn three_value_envelope(d: u64, spec: &FieldSpec) -> Result<EnvelopeCheck> {
    require_ab(d, spec)?;
    let observed = codim2_profile(d, spec)?.sizes();
    let allowed = quadric_codim2_values(spec.m());
    Ok(EnvelopeCheck {
        holds: observed.is_subset(&allowed),
        observed,
    })
}

/// Compares [`codim2_from_walsh`] with the bitset scan on every cell.
/// Returns the number of cells where the two disagree.
pub fn codim2_formula_mismatches(d: u64, spec: &FieldSpec) -> Result<u64> {
    let set = support_set(d, spec)?;
    let spectrum = power_walsh(d, spec)?;
    let planes = hyperplane_bitsets(spec);
    let total = set.len() as u64;
    let on_plane: Vec<u64> = planes.iter().map(|h| set.and_count(h)).collect();
    let n = spec.size();
    (1..n)
        .into_par_iter()
        .map(|a| -> Result<u64> {
            let alpha = FieldElement(a as u32);
            let mut bad = 0;
            for b in a + 1..n {
                let beta = FieldElement(b as u32);
                let c11 = set.and3_count(&planes[a], &planes[b]);
                let cells = [
                    (false, false, total + c11 - on_plane[a] - on_plane[b]),
                    (false, true, on_plane[b] - c11),
                    (true, false, on_plane[a] - c11),
                    (true, true, c11),
                ];
                for (i, j, count) in cells {
                    if codim2_from_walsh(&spectrum, alpha, beta, i, j)? != count as i64 {
                        bad += 1;
                    }
                }
            }
            Ok(bad)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))
}
