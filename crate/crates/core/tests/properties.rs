use abscope::goldtest::{canonical_exponent, cyclotomic_coset, monomial_parity, trace_identity};
use abscope::sequence::{autocorrelation, crosscorrelation, decimate, m_sequence};
use abscope::spectrum::{walsh_fast, walsh_naive};
use abscope::{gcd, CyclicBitVector, FieldSpec, TruthTable};
use proptest::prelude::*;

fn table(m: u32, seed: Vec<bool>) -> TruthTable {
    TruthTable::from_fn(m, |x| seed[x as usize])
}

fn arb_table() -> impl Strategy<Value = (u32, Vec<bool>)> {
    (2u32..=9).prop_flat_map(|m| (Just(m), prop::collection::vec(any::<bool>(), 1 << m)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parseval((m, bits) in arb_table()) {
        let spec = FieldSpec::new(m).unwrap();
        let w = walsh_fast(&table(m, bits), &spec).unwrap();
        prop_assert_eq!(w.parseval_sum(), 1u64 << (2 * m));
    }

    #[test]
    fn fast_equals_naive((m, bits) in arb_table()) {
        let spec = FieldSpec::new(m).unwrap();
        let f = table(m, bits);
        prop_assert_eq!(walsh_fast(&f, &spec).unwrap(), walsh_naive(&f, &spec).unwrap());
    }

    #[test]
    fn complement_negates_spectrum((m, bits) in arb_table()) {
        let spec = FieldSpec::new(m).unwrap();
        let f = table(m, bits.clone());
        let g = TruthTable::from_fn(m, |x| !bits[x as usize]);
        let wf = walsh_fast(&f, &spec).unwrap();
        let wg = walsh_fast(&g, &spec).unwrap();
        for (a, b) in wf.coeffs().iter().zip(wg.coeffs()) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn shift_invariance(m in 3u32..=9, t in 0usize..600, u in 0usize..600) {
        // c_t depends only on t mod n; a shift of one argument moves the index
        let a = m_sequence(&FieldSpec::new(m).unwrap());
        let n = a.period();
        let shifted = abscope::PeriodicSequence::new((0..n).map(|i| a.at(i + u)).collect());
        prop_assert_eq!(autocorrelation(&a, t), autocorrelation(&a, t % n));
        prop_assert_eq!(autocorrelation(&shifted, t), autocorrelation(&a, t));
        prop_assert_eq!(
            crosscorrelation(&shifted, &a, t).unwrap(),
            autocorrelation(&a, (t % n + n - u % n) % n)
        );
    }

    #[test]
    fn decimation_composes(m in 3u32..=9, d in 1u64..500, e in 1u64..500) {
        let a = m_sequence(&FieldSpec::new(m).unwrap());
        let n = a.period() as u64;
        let twice = decimate(&decimate(&a, d).sequence, e).sequence;
        prop_assert_eq!(twice, decimate(&a, d * e % n).sequence);
    }

    #[test]
    fn coprime_decimation_keeps_balance(m in 3u32..=9, d in 1u64..500) {
        let a = m_sequence(&FieldSpec::new(m).unwrap());
        let n = a.period() as u64;
        let dec = decimate(&a, d);
        prop_assert_eq!(dec.coprime, gcd(d, n) == 1);
        if dec.coprime {
            prop_assert_eq!(dec.sequence.weight() as u64, n.div_ceil(2));
        }
    }

    #[test]
    fn canonical_exponent_is_coset_invariant(m in 3u32..=15, d in 1u64..(1 << 15)) {
        let n = (1u64 << m) - 1;
        let d = d % n;
        prop_assume!(d != 0);
        let c = canonical_exponent(d, m);
        let coset = cyclotomic_coset(d, m);
        prop_assert!(coset.contains(c));
        prop_assert_eq!(c % 2, 1);
        for &e in &coset.members {
            prop_assert_eq!(canonical_exponent(e, m), c);
            prop_assert_eq!(e.count_ones(), d.count_ones());
        }
    }

    #[test]
    fn cyclic_shift_is_a_group_action(m in 1u32..=40, bits in any::<u64>(), s in 0u32..80, t in 0u32..80) {
        let v = CyclicBitVector::new(m, bits & ((1u64 << m) - 1)).unwrap();
        prop_assert_eq!(v.shift(s).shift(t), v.shift(s + t));
        prop_assert_eq!(v.shift(m), v);
        prop_assert_eq!(v.shift(s).weight(), v.weight());
    }

    #[test]
    fn monomial_parity_agrees_with_enumeration(m in 3u32..=9, d in 1u64..511) {
        let spec = FieldSpec::new(m).unwrap();
        let d = d % spec.order();
        prop_assume!(d != 0);
        prop_assert_eq!(monomial_parity(d, m).unwrap().vanishes, trace_identity(d, &spec).unwrap());
    }
}
