//! Arithmetic in GF(2^m) over a polynomial basis.
//!
//! Elements are bitmasks of the coefficients of `1, x, ..., x^{m-1}`. The
//! default modulus is the numerically smallest primitive polynomial of degree
//! `m`, so the class of `x` is always the fixed primitive element `zeta`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the extension degree.
pub const MAX_DEGREE: u32 = 28;
/// Largest degree the `u32` element representation can hold.
pub const HARD_MAX_DEGREE: u32 = 31;
/// Log/antilog tables are built up to this degree; above it multiplication
/// falls back to shift-and-reduce.
pub const TABLE_DEGREE_LIMIT: u32 = 20;

const DEFAULT_MODULI: &str = include_str!("../data/default_moduli.txt");

/// An element of GF(2^m) in polynomial-basis bitmask form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    // addition in characteristic 2 is xor
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        u32::deserialize(deserializer).map(FieldElement)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

#[derive(Clone, Debug)]
struct LogTables {
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
    /// `antilog[i] = zeta^i` for `0 <= i < 2^m - 1`.
    antilog: Vec<u32>,
}

/// Immutable description of GF(2^m).
#[derive(Clone, Debug)]
pub struct FieldSpec {
    m: u32,
    modulus: u64,
    zeta: FieldElement,
    trace_mask: u32,
    tables: Option<LogTables>,
    baby_steps: OnceLock<HashMap<u32, u32>>,
}

/// Builds GF(2^m) with the default cap on `m`. See [`FieldSpec::build`].
pub fn build_field(m: u32, modulus: Option<u64>) -> Result<FieldSpec> {
    FieldSpec::build(m, modulus, MAX_DEGREE)
}

impl FieldSpec {
    /// GF(2^m) under the default modulus.
    pub fn new(m: u32) -> Result<Self> {
        Self::build(m, None, MAX_DEGREE)
    }

    /// GF(2^m) under a caller-supplied modulus.
    pub fn with_modulus(m: u32, modulus: u64) -> Result<Self> {
        Self::build(m, Some(modulus), MAX_DEGREE)
    }

    /// Validates the modulus and precomputes the trace mask and, for
    /// `m <= TABLE_DEGREE_LIMIT`, the log/antilog tables.
    ///
    /// `max_m` is clamped to [`HARD_MAX_DEGREE`].
    pub fn build(m: u32, modulus: Option<u64>, max_m: u32) -> Result<Self> {
        let max = max_m.min(HARD_MAX_DEGREE);
        if !(2..=max).contains(&m) {
            return Err(Error::DegreeOutOfRange { m, min: 2, max });
        }
        let modulus = match modulus {
            Some(p) => p,
            None => default_modulus(m).unwrap_or_else(|| smallest_primitive_polynomial(m)),
        };
        if poly_degree(modulus) != Some(m) {
            return Err(Error::WrongModulusDegree { modulus, m });
        }
        if !is_irreducible(modulus) {
            return Err(Error::ReduciblePolynomial(modulus));
        }
        if !x_is_primitive(modulus) {
            return Err(Error::NotPrimitive(modulus));
        }

        let mut spec = FieldSpec {
            m,
            modulus,
            zeta: FieldElement(2),
            trace_mask: 0,
            tables: None,
            baby_steps: OnceLock::new(),
        };
        spec.trace_mask = (0..m)
            .filter(|&j| spec.trace_by_frobenius(FieldElement(1 << j)))
            .fold(0, |mask, j| mask | (1 << j));
        if m <= TABLE_DEGREE_LIMIT {
            spec.tables = Some(spec.build_tables());
        }
        Ok(spec)
    }

    fn build_tables(&self) -> LogTables {
        let n = self.order() as usize;
        let mut log = vec![0u32; n + 1];
        let mut antilog = Vec::with_capacity(n);
        let mut acc = 1u32;
        for i in 0..n {
            antilog.push(acc);
            log[acc as usize] = i as u32;
            acc = self.mul_reduce(acc, self.zeta.0);
        }
        debug_assert_eq!(acc, 1);
        LogTables { log, antilog }
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn zeta(&self) -> FieldElement {
        self.zeta
    }

    /// Number of field elements, `2^m`.
    #[inline]
    pub fn size(&self) -> usize {
        1usize << self.m
    }

    /// Order of the multiplicative group, `2^m - 1`.
    #[inline]
    pub fn order(&self) -> u64 {
        (1u64 << self.m) - 1
    }

    /// Bitmask `t` with `tr(a) = parity(a & t)`.
    #[inline]
    pub fn trace_mask(&self) -> u32 {
        self.trace_mask
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// All field elements in bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size() as u32).map(FieldElement)
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u64) < (1u64 << self.m)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let n = self.order() as u32;
                let mut e = t.log[a.0 as usize] + t.log[b.0 as usize];
                if e >= n {
                    e -= n;
                }
                FieldElement(t.antilog[e as usize])
            }
            None => FieldElement(self.mul_reduce(a.0, b.0)),
        }
    }

    /// Shift-and-add multiplication with interleaved reduction.
    fn mul_reduce(&self, a: u32, b: u32) -> u32 {
        mulmod_poly(a as u64, b as u64, self.modulus, self.m) as u32
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.is_zero() {
            return if e == 0 {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            };
        }
        let n = self.order();
        let e = e % n;
        match &self.tables {
            Some(t) => {
                let idx = (t.log[a.0 as usize] as u64 * e) % n;
                FieldElement(t.antilog[idx as usize])
            }
            None => {
                let mut base = a;
                let mut acc = FieldElement::ONE;
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(acc, base);
                    }
                    base = self.mul(base, base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// `zeta^i` for any `i`.
    pub fn antilog(&self, i: u64) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.antilog[(i % self.order()) as usize]),
            None => self.pow(self.zeta, i),
        }
    }

    /// Discrete logarithm to base `zeta`, in `0..2^m - 1`.
    pub fn dlog(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::LogOfZero);
        }
        if let Some(t) = &self.tables {
            return Ok(t.log[a.0 as usize] as u64);
        }
        // baby-step giant-step
        let n = self.order();
        let step = (n as f64).sqrt().ceil() as u64;
        let baby = self.baby_steps.get_or_init(|| {
            let mut map = HashMap::with_capacity(step as usize);
            let mut acc = FieldElement::ONE;
            for j in 0..step {
                map.entry(acc.0).or_insert(j as u32);
                acc = self.mul(acc, self.zeta);
            }
            map
        });
        let giant = self.pow(self.zeta, n - step % n);
        let mut gamma = a;
        for i in 0..=step {
            if let Some(&j) = baby.get(&gamma.0) {
                return Ok((i * step + j as u64) % n);
            }
            gamma = self.mul(gamma, giant);
        }
        unreachable!("zeta is primitive, every nonzero element has a logarithm")
    }

    /// Absolute trace `tr(a) = a + a^2 + ... + a^{2^{m-1}}`.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> bool {
        (a.0 & self.trace_mask).count_ones() & 1 == 1
    }

    /// `tr(beta * x)`.
    #[inline]
    pub fn trace_beta(&self, beta: FieldElement, x: FieldElement) -> bool {
        self.trace(self.mul(beta, x))
    }

    fn trace_by_frobenius(&self, a: FieldElement) -> bool {
        let mut acc = 0u32;
        let mut power = a.0;
        for _ in 0..self.m {
            acc ^= power;
            power = self.mul_reduce(power, power);
        }
        debug_assert!(acc <= 1, "trace must lie in GF(2)");
        acc == 1
    }

    /// The table `x -> x^d` indexed by `x`.
    pub fn power_map(&self, d: u64) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::ZERO; self.size()];
        out[0] = self.pow(FieldElement::ZERO, d);
        let zd = self.pow(self.zeta, d);
        let mut x = FieldElement::ONE;
        let mut xd = FieldElement::ONE;
        for _ in 0..self.order() {
            out[x.0 as usize] = xd;
            x = self.mul(x, self.zeta);
            xd = self.mul(xd, zd);
        }
        out
    }

    /// `W -> W'` such that `tr(gamma * x) = parity(W'(gamma) & x)` for all
    /// `x`, i.e. the coordinates of the linear form `x -> tr(gamma x)`.
    pub fn dual_coordinates(&self, gamma: FieldElement) -> u32 {
        (0..self.m)
            .filter(|&j| self.trace_beta(gamma, FieldElement(1 << j)))
            .fold(0, |acc, j| acc | (1 << j))
    }

    /// `dual_coordinates` for every `gamma`, indexed by `gamma`.
    pub fn dual_table(&self) -> Vec<u32> {
        let basis: Vec<u32> = (0..self.m)
            .map(|j| self.dual_coordinates(FieldElement(1 << j)))
            .collect();
        let mut out = vec![0u32; self.size()];
        for g in 1..self.size() {
            let low = g.trailing_zeros() as usize;
            out[g] = out[g & (g - 1)] ^ basis[low];
        }
        out
    }
}

fn poly_degree(p: u64) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros())
    }
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b).expect("division by zero polynomial");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: u64) -> bool {
    let Some(deg) = poly_degree(poly) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    let limit = 1u64 << (deg / 2 + 1);
    (2..limit).all(|q| poly_rem(poly, q) != 0)
}

fn mulmod_poly(a: u64, b: u64, modulus: u64, m: u32) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

fn powmod_poly(mut base: u64, mut e: u64, modulus: u64, m: u32) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_poly(acc, base, modulus, m);
        }
        base = mulmod_poly(base, base, modulus, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether `x` has multiplicative order `2^m - 1` modulo an irreducible `modulus`.
fn x_is_primitive(modulus: u64) -> bool {
    let m = poly_degree(modulus).unwrap_or(0);
    let n = (1u64 << m) - 1;
    powmod_poly(2, n, modulus, m) == 1
        && prime_factors(n)
            .into_iter()
            .all(|p| powmod_poly(2, n / p, modulus, m) != 1)
}

/// Numerically smallest primitive polynomial of degree `m`.
pub fn smallest_primitive_polynomial(m: u32) -> u64 {
    ((1u64 << m) | 1..1u64 << (m + 1))
        .step_by(2)
        .find(|&p| is_irreducible(p) && x_is_primitive(p))
        .expect("primitive polynomials exist in every degree")
}

/// Entry of the bundled modulus table, if `m` is covered by it.
pub fn default_modulus(m: u32) -> Option<u64> {
    default_moduli()
        .into_iter()
        .find(|&(k, _)| k == m)
        .map(|(_, p)| p)
}

/// The bundled `m -> modulus` table. Non-comment line `k` holds `m = k + 1`.
pub fn default_moduli() -> Vec<(u32, u64)> {
    DEFAULT_MODULI
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(k, l)| {
            let hex = l.trim_start_matches("0x").trim_start_matches("0X");
            let p = u64::from_str_radix(hex, 16).expect("bundled modulus table is valid hex");
            (k as u32 + 2, p)
        })
        .collect()
}

/// Parses a hexadecimal bitmask such as `0xB` or `b`.
pub fn parse_hex_modulus(s: &str) -> Option<u64> {
    let s = s.trim();
    let hex = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    u64::from_str_radix(hex, 16).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_three_defaults() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(f.modulus(), 0b1011);
        assert_eq!(f.zeta(), FieldElement(0b010));
    }

    #[test]
    fn degree_bounds() {
        assert!(matches!(
            FieldSpec::new(1),
            Err(Error::DegreeOutOfRange { m: 1, .. })
        ));
        assert!(matches!(
            FieldSpec::new(29),
            Err(Error::DegreeOutOfRange { m: 29, .. })
        ));
        assert!(FieldSpec::build(29, None, 30).is_ok());
    }

    #[test]
    fn rejects_bad_moduli() {
        // x^3 + 1 = (x + 1)(x^2 + x + 1)
        assert_eq!(
            FieldSpec::with_modulus(3, 0b1001).unwrap_err(),
            Error::ReduciblePolynomial(0b1001)
        );
        assert!(matches!(
            FieldSpec::with_modulus(3, 0b111),
            Err(Error::WrongModulusDegree { .. })
        ));
        // x^4 + x^3 + x^2 + x + 1 is irreducible, but x has order 5
        assert_eq!(
            FieldSpec::with_modulus(4, 0x1f).unwrap_err(),
            Error::NotPrimitive(0x1f)
        );
        // x^3 + x^2 + 1 is primitive as well
        assert!(FieldSpec::with_modulus(3, 0b1101).is_ok());
    }

    #[test]
    fn small_products() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(
            f.mul(FieldElement(0b010), FieldElement(0b100)),
            FieldElement(0b011)
        );
        assert_eq!(f.pow(FieldElement(0b010), 3), FieldElement(0b011));
        for a in f.elements() {
            assert_eq!(f.mul(a, FieldElement::ONE), a);
            assert_eq!(f.mul(a, FieldElement::ZERO), FieldElement::ZERO);
        }
    }

    #[test]
    fn pow_edge_cases() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.pow(FieldElement::ZERO, 0), FieldElement::ONE);
        assert_eq!(f.pow(FieldElement::ZERO, 7), FieldElement::ZERO);
        assert_eq!(f.pow(f.zeta(), 31), FieldElement::ONE);
        assert!((1..31).all(|k| f.pow(f.zeta(), k) != FieldElement::ONE));
        assert_eq!(f.pow(FieldElement(9), 0), FieldElement::ONE);
    }

    #[test]
    fn trace_facts() {
        let f = FieldSpec::new(3).unwrap();
        assert!(!f.trace(FieldElement::ZERO));
        assert!(f.trace(FieldElement::ONE));
        assert_eq!(f.elements().filter(|&a| f.trace(a)).count(), 4);
        let f8 = FieldSpec::new(8).unwrap();
        assert!(!f8.trace(FieldElement::ONE));
    }

    #[test]
    fn trace_beta_maps_are_distinct() {
        let f = FieldSpec::new(3).unwrap();
        let tables: std::collections::HashSet<Vec<bool>> = f
            .elements()
            .map(|b| f.elements().map(|x| f.trace_beta(b, x)).collect())
            .collect();
        assert_eq!(tables.len(), 8);
        assert!(f.elements().all(|x| !f.trace_beta(FieldElement::ZERO, x)));
        assert!(f
            .elements()
            .all(|x| f.trace_beta(FieldElement::ONE, x) == f.trace(x)));
    }

    #[test]
    fn dlog_roundtrip_with_and_without_tables() {
        let f = FieldSpec::new(10).unwrap();
        assert_eq!(f.dlog(FieldElement::ONE).unwrap(), 0);
        assert_eq!(f.dlog(f.zeta()).unwrap(), 1);
        assert_eq!(f.dlog(FieldElement::ZERO), Err(Error::LogOfZero));
        for a in f.elements().skip(1) {
            assert_eq!(f.antilog(f.dlog(a).unwrap()), a);
        }
        let big = FieldSpec::new(22).unwrap();
        assert!(!big.has_tables());
        for i in [0u64, 1, 2, 12345, 4_000_000, big.order() - 1] {
            assert_eq!(big.dlog(big.antilog(i)).unwrap(), i);
        }
    }

    #[test]
    fn bundled_table_matches_search() {
        let table = default_moduli();
        assert_eq!(table.len(), 27);
        for (m, p) in table.into_iter().filter(|&(m, _)| m <= 20) {
            assert_eq!(smallest_primitive_polynomial(m), p, "m = {m}");
        }
    }

    #[test]
    fn dual_table_agrees_with_trace() {
        let f = FieldSpec::new(6).unwrap();
        let dual = f.dual_table();
        for g in f.elements() {
            for x in f.elements() {
                let lhs = f.trace_beta(g, x);
                let rhs = (dual[g.0 as usize] & x.0).count_ones() & 1 == 1;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hex_parsing() {
        assert_eq!(parse_hex_modulus("0xB"), Some(11));
        assert_eq!(parse_hex_modulus("11d"), Some(0x11d));
        assert_eq!(parse_hex_modulus("zz"), None);
    }
}
