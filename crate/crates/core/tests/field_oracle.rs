use abscope::{FieldElement, FieldSpec};
use rand::{Rng, SeedableRng};

/// Carry-less product followed by long division by the modulus.
fn schoolbook(a: u64, b: u64, modulus: u64, m: u32) -> u64 {
    let mut prod = 0u64;
    for i in 0..m {
        if b >> i & 1 == 1 {
            prod ^= a << i;
        }
    }
    for deg in (m..2 * m).rev() {
        if prod >> deg & 1 == 1 {
            prod ^= modulus << (deg - m);
        }
    }
    prod
}

/// Trace from its definition `x + x^2 + ... + x^{2^{m-1}}`.
fn trace_by_squaring(spec: &FieldSpec, x: FieldElement) -> bool {
    let mut acc = FieldElement::ZERO;
    let mut y = x;
    for _ in 0..spec.m() {
        acc += y;
        y = spec.mul(y, y);
    }
    assert!(acc == FieldElement::ZERO || acc == FieldElement::ONE);
    acc == FieldElement::ONE
}

#[test]
fn multiplication_matches_schoolbook_on_all_pairs() {
    for m in 2..=8 {
        let spec = FieldSpec::new(m).unwrap();
        for a in spec.elements() {
            for b in spec.elements() {
                let expect = schoolbook(a.bits() as u64, b.bits() as u64, spec.modulus(), m);
                assert_eq!(spec.mul(a, b).bits() as u64, expect, "m={m} a={a} b={b}");
            }
        }
    }
}

#[test]
fn multiplication_matches_schoolbook_on_random_pairs() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    for m in [9, 13, 16, 20, 21, 24, 28] {
        let spec = FieldSpec::new(m).unwrap();
        let mask = (1u64 << m) - 1;
        for _ in 0..100_000 {
            let a = rng.gen::<u64>() & mask;
            let b = rng.gen::<u64>() & mask;
            let got = spec.mul(FieldElement(a as u32), FieldElement(b as u32));
            assert_eq!(
                got.bits() as u64,
                schoolbook(a, b, spec.modulus(), m),
                "m={m}"
            );
        }
    }
}

#[test]
fn trace_is_additive_and_matches_definition() {
    for m in 2..=12 {
        let spec = FieldSpec::new(m).unwrap();
        let elems: Vec<FieldElement> = spec.elements().collect();
        for &x in &elems {
            assert_eq!(spec.trace(x), trace_by_squaring(&spec, x), "m={m} x={x}");
        }
        let step = (elems.len() / 64).max(1);
        for &x in elems.iter().step_by(step) {
            for &y in &elems {
                assert_eq!(spec.trace(x + y), spec.trace(x) ^ spec.trace(y));
            }
        }
        // the trace is balanced
        let ones = elems.iter().filter(|&&x| spec.trace(x)).count();
        assert_eq!(ones, elems.len() / 2);
    }
}

#[test]
fn antilog_walks_every_nonzero_element() {
    for m in [3, 7, 10] {
        let spec = FieldSpec::new(m).unwrap();
        let mut seen = vec![false; spec.size()];
        for i in 0..spec.order() {
            let a = spec.antilog(i);
            assert!(!seen[a.bits() as usize]);
            seen[a.bits() as usize] = true;
            assert_eq!(spec.pow(spec.zeta(), i), a);
        }
        assert!(!seen[0]);
    }
}

#[test]
fn custom_modulus_gives_isomorphic_trace_counts() {
    // x^5 + x^4 + x^3 + x^2 + 1 is primitive
    let spec = FieldSpec::with_modulus(5, 0b111101).unwrap();
    for a in spec.elements() {
        for b in spec.elements() {
            assert_eq!(
                spec.mul(a, b).bits() as u64,
                schoolbook(a.bits() as u64, b.bits() as u64, 0b111101, 5)
            );
        }
    }
}
