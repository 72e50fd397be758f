//! The `verify-all` battery: every structural property checked for one field.

use std::collections::BTreeSet;

use abscope::geometry::{
    codim2_formula_mismatches, quasi_quadric_check, seven_value_check, support_set,
    three_value_check,
};
use abscope::goldtest::{
    classify_exponent, coset_representatives, dd_correlation_all, find_odd_witness,
    gold_support_check, monomial_parity, trace_identity, WitnessPath,
};
use abscope::sequence::{crosscorr_walsh_bridge, is_perfect, m_sequence};
use abscope::spectrum::{ab_multiplicities, classify_ab, is_ab_power};
use abscope::{gcd, CyclicBitVector, Error, FieldElement, FieldSpec};
use rayon::prelude::*;
use serde::Serialize;

/// Result of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const VERIFY_CHECKS: [&str; 10] = [
    "field",
    "sequence",
    "bridge",
    "ab",
    "quadric-gold",
    "envelope",
    "hyperplane",
    "trace-identity",
    "witness",
    "gold-support",
];

fn outcome(name: &'static str, failures: Vec<String>, ok_detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            ok_detail
        } else {
            failures.join("; ")
        },
    }
}

fn check_field(spec: &FieldSpec) -> Result<CheckOutcome, Error> {
    let mut bad = Vec::new();
    let n = spec.order();
    // every index for small fields, an even sample above that
    for i in (0..n).step_by((n / 65536).max(1) as usize) {
        let a = spec.antilog(i);
        if spec.dlog(a)? != i {
            bad.push(format!("dlog(antilog({i})) != {i}"));
            break;
        }
    }
    let dual = spec.dual_table();
    // both sides are linear in x, so the basis vectors suffice
    'outer: for g in spec.elements() {
        for x in (0..spec.m()).map(|i| FieldElement(1 << i)) {
            let lhs = spec.trace(spec.mul(g, x));
            let rhs = (dual[g.bits() as usize] & x.bits()).count_ones() % 2 == 1;
            if lhs != rhs {
                bad.push(format!("dual basis disagrees at gamma={g}"));
                break 'outer;
            }
        }
    }
    Ok(outcome(
        "field",
        bad,
        format!("zeta has order {n}; dual basis consistent"),
    ))
}

fn check_sequence(spec: &FieldSpec) -> Result<CheckOutcome, Error> {
    let a = m_sequence(spec);
    let perfect = is_perfect(&a)?;
    let bad = if perfect {
        vec![]
    } else {
        vec!["m-sequence autocorrelation is not two-valued".to_string()]
    };
    Ok(outcome(
        "sequence",
        bad,
        format!("period {} weight {}", a.period(), a.weight()),
    ))
}

fn check_bridge(spec: &FieldSpec, reps: &[u64]) -> Result<CheckOutcome, Error> {
    let coprime: Vec<u64> = reps
        .iter()
        .copied()
        .filter(|&d| gcd(d, spec.order()) == 1)
        .collect();
    let bad: Vec<String> = coprime
        .par_iter()
        .map(|&d| crosscorr_walsh_bridge(d, spec).map(|r| (d, r.holds)))
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .filter(|&(_, holds)| !holds)
        .map(|(d, _)| format!("bridge fails for d={d}"))
        .collect();
    Ok(outcome(
        "bridge",
        bad,
        format!("{} coprime classes", coprime.len()),
    ))
}

/// Canonical representatives that are almost bent.
fn ab_reps(spec: &FieldSpec, reps: &[u64]) -> Result<Vec<u64>, Error> {
    let flags = reps
        .par_iter()
        .map(|&d| is_ab_power(d, spec))
        .collect::<Result<Vec<bool>, Error>>()?;
    Ok(reps
        .iter()
        .zip(flags)
        .filter(|(_, f)| *f)
        .map(|(&d, _)| d)
        .collect())
}

fn check_ab(spec: &FieldSpec, ab: &[u64]) -> Result<CheckOutcome, Error> {
    let m = spec.m();
    let mut bad = Vec::new();
    let mut families = BTreeSet::new();
    for k in (1..m).filter(|&k| gcd(k as u64, m as u64) == 1) {
        families.insert(abscope::goldtest::gold_exponent(k, m));
        families.insert(abscope::goldtest::kasami_exponent(k, m));
    }
    for &d in &families {
        let r = classify_ab(d, spec)?;
        if !r.is_ab || !r.sign_rule_ok || r.value_multiplicities != ab_multiplicities(m, false) {
            bad.push(format!(
                "d={d} not almost bent with the expected distribution"
            ));
        }
    }
    for &d in ab {
        if !classify_ab(d, spec)?.sign_rule_ok {
            bad.push(format!("d={d}: coordinate distributions off"));
        }
    }
    Ok(outcome(
        "ab",
        bad,
        format!(
            "{} Gold/Kasami exponents; AB classes {:?}",
            families.len(),
            ab
        ),
    ))
}

fn check_quadric_gold(spec: &FieldSpec, ab: &[u64]) -> Result<CheckOutcome, Error> {
    let m = spec.m();
    let rows = ab
        .par_iter()
        .map(|&d| three_value_check(d, spec).map(|t| (d, t)))
        .collect::<Result<Vec<_>, Error>>()?;
    let bad = rows
        .iter()
        .filter(|&&(d, t)| t != classify_exponent(d, m).is_gold())
        .map(|(d, t)| format!("d={d}: three-value={t} disagrees with Gold classification"))
        .collect();
    let quadric: Vec<u64> = rows.iter().filter(|r| r.1).map(|r| r.0).collect();
    Ok(outcome(
        "quadric-gold",
        bad,
        format!("three-value classes {quadric:?}"),
    ))
}

fn check_envelope(spec: &FieldSpec, ab: &[u64]) -> Result<CheckOutcome, Error> {
    let mut bad = Vec::new();
    for &d in ab {
        let env = seven_value_check(d, spec)?;
        if !env.holds {
            bad.push(format!("d={d}: values {:?} outside envelope", env.observed));
        }
        let mism = codim2_formula_mismatches(d, spec)?;
        if mism != 0 {
            bad.push(format!(
                "d={d}: {mism} cells disagree with the Walsh formula"
            ));
        }
    }
    Ok(outcome("envelope", bad, format!("{} AB classes", ab.len())))
}

fn check_hyperplane(spec: &FieldSpec, ab: &[u64]) -> Result<CheckOutcome, Error> {
    let mut bad = Vec::new();
    for &d in ab {
        if !quasi_quadric_check(&support_set(d, spec)?, spec)? {
            bad.push(format!("d={d}: hyperplane profile is not quadric"));
        }
    }
    Ok(outcome(
        "hyperplane",
        bad,
        format!("{} AB classes", ab.len()),
    ))
}

fn check_trace_identity(spec: &FieldSpec, reps: &[u64]) -> Result<CheckOutcome, Error> {
    let m = spec.m();
    let rows = reps
        .par_iter()
        .map(|&d| -> Result<_, Error> {
            let ti = trace_identity(d, spec)?;
            let mp = match monomial_parity(d, m) {
                Ok(p) => Some(p.vanishes),
                Err(Error::WeightOverflow { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((d, ti, mp, classify_exponent(d, m).is_gold()))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut bad = Vec::new();
    let mut skipped = 0;
    for &(d, ti, mp, gold) in &rows {
        match mp {
            Some(v) if v != ti => bad.push(format!("d={d}: monomial parity disagrees")),
            None => skipped += 1,
            _ => {}
        }
        let weight_two = d.count_ones() == 2;
        if m % 2 == 1 && ti != weight_two {
            bad.push(format!(
                "d={d}: identity={ti} but canonical weight {}",
                d.count_ones()
            ));
        }
        if gold && !ti {
            bad.push(format!("d={d}: Gold exponent fails the identity"));
        }
    }
    let holding: Vec<u64> = rows.iter().filter(|r| r.1).map(|r| r.0).collect();
    Ok(outcome(
        "trace-identity",
        bad,
        format!("identity holds for {holding:?}; parity skipped for {skipped}"),
    ))
}

fn check_witness(spec: &FieldSpec, reps: &[u64]) -> Result<CheckOutcome, Error> {
    let m = spec.m();
    let mut bad = Vec::new();
    let mut fallbacks = Vec::new();
    let mut count = 0;
    for &d in reps {
        let w = d.count_ones();
        if w < 4 || !w.is_power_of_two() || trace_identity(d, spec)? {
            continue;
        }
        count += 1;
        let r = find_odd_witness(&CyclicBitVector::new(m, d)?)?;
        if !r.verified || r.multiset_size % 2 == 0 {
            bad.push(format!("d={d}: witness not certified"));
        }
        if r.path == WitnessPath::Fallback {
            fallbacks.push(d);
        }
    }
    Ok(outcome(
        "witness",
        bad,
        format!("{count} power-of-two weights; fallback for {fallbacks:?}"),
    ))
}

fn check_gold_support(spec: &FieldSpec) -> Result<CheckOutcome, Error> {
    let m = spec.m();
    let size = 1i64 << m;
    let mut bad = Vec::new();
    let golds: BTreeSet<u64> = (1..m)
        .filter(|&k| gcd(k as u64, m as u64) == 1)
        .map(|k| abscope::goldtest::canonical_exponent(abscope::goldtest::gold_exponent(k, m), m))
        .collect();
    for &d in &golds {
        let s = gold_support_check(d, spec)?;
        if !s.holds || s.gamma != Some(FieldElement::ONE) {
            bad.push(format!("d={d}: support is not tr(x)=1"));
        }
        let corr = dd_correlation_all(d, spec)?;
        let ok = corr.iter().enumerate().all(|(w, &c)| match w {
            0 => c == size,
            1 => c == -size,
            _ => c == 0,
        });
        if !ok {
            bad.push(format!(
                "d={d}: derivative correlation not concentrated on 0, 1"
            ));
        }
    }
    Ok(outcome(
        "gold-support",
        bad,
        format!("Gold classes {golds:?}"),
    ))
}

/// Runs the selected checks (all when `only` is `None`) for the field.
/// Checks that need odd `m` are skipped for even `m`.
pub fn verify_all(
    spec: &FieldSpec,
    only: Option<&BTreeSet<String>>,
) -> Result<Vec<CheckOutcome>, Error> {
    let wants = |name: &str| only.is_none_or(|s| s.contains(name));
    let odd = spec.m() % 2 == 1;
    // the linear class d = 1 is excluded throughout
    let reps: Vec<u64> = coset_representatives(spec.m())
        .into_iter()
        .filter(|&d| d != 1)
        .collect();
    let mut out = Vec::new();
    if wants("field") {
        out.push(check_field(spec)?);
    }
    if wants("sequence") {
        out.push(check_sequence(spec)?);
    }
    if wants("bridge") {
        out.push(check_bridge(spec, &reps)?);
    }
    let needs_ab = ["ab", "quadric-gold", "envelope", "hyperplane"]
        .iter()
        .any(|c| wants(c));
    let ab = if odd && needs_ab {
        ab_reps(spec, &reps)?
    } else {
        Vec::new()
    };
    if odd && wants("ab") {
        out.push(check_ab(spec, &ab)?);
    }
    if odd && wants("quadric-gold") {
        out.push(check_quadric_gold(spec, &ab)?);
    }
    if odd && wants("envelope") {
        out.push(check_envelope(spec, &ab)?);
    }
    if odd && wants("hyperplane") {
        out.push(check_hyperplane(spec, &ab)?);
    }
    if wants("trace-identity") {
        out.push(check_trace_identity(spec, &reps)?);
    }
    if odd && wants("witness") {
        out.push(check_witness(spec, &reps)?);
    }
    if odd && wants("gold-support") {
        out.push(check_gold_support(spec)?);
    }
    Ok(out)
}
