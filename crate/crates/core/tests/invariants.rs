use proptest::prelude::*;
use rayon::prelude::*;

use detfactor::arith::{gcd, is_prime_u64, is_smooth, perfect_power, primes_up_to};
use detfactor::graf_phi::{divisors_in_residue_class, graf_phi_factor, GrafOutcome, GrafPhiParams};
use detfactor::phi_chain::{split_with_factored_phi, ChainParams};
use detfactor::phi_reduce::{factor_given_phi, PhiOracle, PhiStrategy};
use detfactor::pm1::{pm1_factor_completely, Certificate, SplitOutcome};
use detfactor::quad::{pp1_factor_completely, QuadElement, Split2Config, DEFAULT_MS};
use detfactor::reference::{reference_factor, totient};
use detfactor::FactoredInteger;

#[test]
fn small_base_phi_descent_splits_below_1e5() {
    let failures: Vec<u64> = (9..100_000u64)
        .step_by(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&n| !is_prime_u64(n) && perfect_power(n).is_none())
        .filter(|&n| {
            let phi = totient(n).unwrap();
            !matches!(factor_given_phi(n, phi, PhiStrategy::SmallBase), Ok(SplitOutcome::Divisor(d)) if n % d == 0 && d > 1 && d < n)
        })
        .collect();
    assert!(failures.is_empty(), "no split for {failures:?}");
}

#[test]
fn graf_phi_smooth_pair_family() {
    let primes: Vec<u64> = primes_up_to(500_000).into_iter().filter(|&p| p > 2 && is_smooth(p - 1, 7)).collect();
    let mut cases = Vec::new();
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            if p * q >= 1_000_000 {
                break;
            }
            cases.push((p, q));
        }
    }
    assert!(cases.len() > 50);
    let params = GrafPhiParams { trial_guard: false, ..Default::default() };
    let bad: Vec<(u64, u64)> = cases
        .par_iter()
        .copied()
        .filter(|&(p, q)| {
            let n = p * q;
            !matches!(graf_phi_factor(n, (p - 1) * (q - 1), &params),
                Ok(GrafOutcome::Factored(f)) if f.factors() == [(p, 1), (q, 1)])
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn graf_phi_failure_carries_audit() {
    let params = GrafPhiParams { trial_guard: false, ..Default::default() };
    match graf_phi_factor(1001, 700, &params).unwrap() {
        GrafOutcome::Failure(audit) => {
            let json = serde_json::to_value(&audit).unwrap();
            assert!(json.get("l2").is_some() && json.get("reason").is_some());
        }
        GrafOutcome::Factored(f) => panic!("wrong phi accepted: {f}"),
    }
}

#[test]
fn mod_a_scan_finds_prime_in_class() {
    // once the base scan is exhausted every prime of d is 1 mod A; the split
    // must then come from the digit route or the mA + 1 scan
    let params = ChainParams::default();
    for d in (9..20_000u64).step_by(2).filter(|&d| !is_prime_u64(d) && perfect_power(d).is_none()) {
        let phi = reference_factor(totient(d).unwrap()).unwrap();
        let out = split_with_factored_phi(d, &phi, &params).unwrap();
        assert!(matches!(out, SplitOutcome::Divisor(x) if d % x == 0 && x > 1 && x < d), "{d}: {out:?}");
    }
}

#[test]
fn shared_oracle_across_threads() {
    let oracle = PhiOracle::computed();
    let total: u64 = (1..2000u64).into_par_iter().map(|n| oracle.query(n).unwrap()).sum();
    let expected: u64 = (1..2000u64).map(|n| totient(n).unwrap()).sum();
    assert_eq!(total, expected);
    assert_eq!(oracle.calls(), 1999);
}

#[test]
fn pp1_completes_p_plus_1_smooth_products() {
    // 29 = 2*3*5 - 1 and 71 = 2^3*3^2 - 1
    let f = pp1_factor_completely(29 * 71, 11, &DEFAULT_MS, &Split2Config { h: None, trial_bound: 0 }).unwrap();
    assert_eq!(f.factors(), &[(29, 1), (71, 1)]);
}

#[test]
fn pm1_complete_matches_reference() {
    for n in 2..5000u64 {
        match pm1_factor_completely(n, 1000) {
            Ok(f) => assert_eq!(f, reference_factor(n).unwrap(), "n = {n}"),
            Err(e) => panic!("{n}: {e}"),
        }
    }
}

proptest! {
    #[test]
    fn residue_class_matches_divisor_scan(d in 1u64..100_000, s in 2u64..=100, r in 1u64..100, x_max in 0u64..400) {
        let r = r % s;
        prop_assume!(r > 0 && gcd(r, s) == 1 && gcd(s, d) == 1);
        let got = divisors_in_residue_class(d, s, r, x_max).unwrap();
        let want: Vec<u64> = (1..=d).filter(|v| d % v == 0 && v % s == r && v > &r && (v - r) / s <= x_max).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn factored_integer_json_roundtrip(n in 1u64..10_000_000) {
        let f = reference_factor(n).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: FactoredInteger = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn quad_element_json_roundtrip(a1 in -500i128..500, a2 in -500i128..500, m in prop::sample::select(vec![2u64, 3, 5, 7]), n in (3u64..10_000).prop_map(|x| x | 1)) {
        let x = QuadElement::new(a1, a2, m, n).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        let back: QuadElement = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn chain_factors_random_odd(n in (3u64..2_000_000).prop_map(|x| x | 1)) {
        let oracle = PhiOracle::computed();
        let r = detfactor::phi_chain::phi_chain_factor(n, &oracle).unwrap();
        prop_assert_eq!(r.factors, reference_factor(n).unwrap());
        prop_assert!(r.oracle_calls <= detfactor::phi_chain::chain_call_bound(n));
    }
}

#[test]
fn tampered_certificate_json_is_rejected() {
    let SplitOutcome::PrimeProof(cert) = detfactor::pm1::pm1_factor(97, 7).unwrap() else { panic!() };
    let mut json: serde_json::Value = serde_json::to_value(&cert).unwrap();
    json["n"] = serde_json::Value::String("91".into());
    let back: Result<Certificate, _> = serde_json::from_value(json);
    assert!(back.map(|c| c.verify().is_err()).unwrap_or(true));
}
