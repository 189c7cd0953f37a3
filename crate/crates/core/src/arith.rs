//! Modular arithmetic on `u64` moduli, primality, perfect powers, factor
//! refinement and the smoothness parameter formulas.
//!
//! Moduli are `u64`; products go through `u128`. Exponents that do not fit a
//! machine word are carried as [`FactoredInteger`]s or `BigUint`s.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::{order_of, ModN};

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    if a >= b {
        (a - b) % n
    } else {
        n - (b - a) % n
    }
    .rem_euclid(n)
}

pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, n);
        }
        b = mul_mod(b, b, n);
        exp >>= 1;
    }
    result
}

/// `base^exp mod n` for an arbitrary-precision exponent.
pub fn pow_mod_big(base: u64, exp: &BigUint, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut result = 1u64;
    let b = base % n;
    for i in (0..exp.bits()).rev() {
        result = mul_mod(result, result, n);
        if exp.bit(i) {
            result = mul_mod(result, b, n);
        }
    }
    result
}

/// `base^M mod n` with `M` given by its factorization.
pub fn pow_mod_factored(base: u64, exp: &FactoredInteger, n: u64) -> u64 {
    let mut x = base % n;
    for &(p, e) in exp.factors() {
        for _ in 0..e {
            x = pow_mod(x, p, n);
        }
    }
    x % n
}

#[inline]
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `gcd(x - 1, n)` for a residue `x`, with `gcd(0, n) = n`.
#[inline]
pub fn gcd_minus_one(x: u64, n: u64) -> u64 {
    gcd(sub_mod(x, 1, n), n)
}

/// Inverse of `a` modulo `n`, or `Err(gcd(a, n))` when it does not exist.
pub fn inv_mod(a: u64, n: u64) -> std::result::Result<u64, u64> {
    let a = a % n;
    let ext = (a as i128).extended_gcd(&(n as i128));
    if ext.gcd != 1 {
        return Err(ext.gcd as u64);
    }
    Ok(ext.x.rem_euclid(n as i128) as u64)
}

#[inline]
pub fn isqrt(n: u64) -> u64 {
    n.sqrt()
}

/// Integer `k`-th root, rounded down.
#[inline]
pub fn iroot(n: u64, k: u32) -> u64 {
    n.nth_root(k)
}

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &is_p)| is_p)
        .map(|(i, _)| i as u64)
        .collect()
}

// Strong-pseudoprime bases proven sufficient below 3 317 044 064 679 887 385 961 981
// (Sorenson and Webster).
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Exclusive upper bound below which [`is_prime_det`] is proven correct.
pub const PRIME_TEST_WIDTH_BOUND: &str = "3317044064679887385961981";

fn strong_probable_prime(n: u64, d: u64, s: u32, a: u64) -> bool {
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for machine-word inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    MR_BASES.iter().all(|&a| strong_probable_prime(n, d, s, a))
}

/// Deterministic primality test, proven up to [`PRIME_TEST_WIDTH_BOUND`].
pub fn is_prime_det(n: &BigUint) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    let bound: BigUint = PRIME_TEST_WIDTH_BOUND.parse().expect("constant");
    if *n >= bound {
        return Err(Error::UnsupportedWidth(n.to_string()));
    }
    if n.is_even() {
        return Ok(false);
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for &a in &MR_BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return Ok(false);
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Returns `(d, k)` with `d^k = n` and `k >= 2` maximal, or `None`.
pub fn perfect_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    let max_k = 63 - n.leading_zeros();
    for k in (2..=max_k).rev() {
        let d = iroot(n, k);
        if d >= 2 && d.checked_pow(k) == Some(n) {
            return Some((d, k));
        }
    }
    None
}

/// Largest `e` with `q^e <= limit` (that is, `floor(ln limit / ln q)`).
pub fn max_power_le(q: u64, limit: u64) -> u32 {
    debug_assert!(q >= 2);
    let mut e = 0;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(q) {
        if next > limit {
            break;
        }
        acc = next;
        e += 1;
    }
    e
}

/// `M = prod_{q <= B} q^floor(ln n / ln q)`, the p-1 exponent.
pub fn build_m(n: u64, bound: u64) -> Result<FactoredInteger> {
    if bound < 2 {
        return Err(Error::InvalidParameter(format!("smoothness bound {bound} < 2")));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} too small")));
    }
    let factors = primes_up_to(bound.min(n))
        .into_iter()
        .map(|q| (q, max_power_le(q, n)))
        .filter(|&(_, e)| e > 0)
        .collect();
    Ok(FactoredInteger::from_sorted_primes(factors))
}

/// Multiplicative order of `b` modulo `n`, given an exponent `M` with
/// `b^M = 1 (mod n)`.
///
/// Primes of `M` are processed in increasing order; for each one the
/// exponent is lowered while the power of `b` stays 1.
pub fn element_order(b: u64, n: u64, m: &FactoredInteger) -> Result<FactoredInteger> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("modulus {n} < 2")));
    }
    let g = gcd(b % n, n);
    if g > 1 {
        return Err(Error::SharedFactor(g));
    }
    order_of(&ModN::new(n), &(b % n), m)
}

/// Refines a list of integers into pairwise coprime bases with exponents
/// whose product equals the product of the inputs.
pub fn factor_refine(parts: &[u64]) -> Vec<(u64, u32)> {
    let weighted: Vec<(u64, u32)> = parts.iter().map(|&x| (x, 1)).collect();
    factor_refine_weighted(&weighted)
}

/// [`factor_refine`] for inputs that already carry exponents: the result
/// has product `prod b^e` over the inputs.
pub fn factor_refine_weighted(parts: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut list: Vec<(u64, u32)> = parts.iter().copied().filter(|&(x, e)| x > 1 && e > 0).collect();
    'outer: loop {
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let g = gcd(list[i].0, list[j].0);
                if g > 1 {
                    let (bi, ei) = list[i];
                    let (bj, ej) = list[j];
                    list.swap_remove(j);
                    list.swap_remove(i);
                    for entry in [(bi / g, ei), (g, ei + ej), (bj / g, ej)] {
                        if entry.0 > 1 {
                            list.push(entry);
                        }
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    list.sort_unstable();
    list
}

/// `L(x, a) = exp((ln x)^a (ln ln x)^(1 - a))`.
pub fn l_value(x: f64, a: f64) -> Result<f64> {
    if !(x >= 16.0) {
        return Err(Error::Domain(format!("L(x, a) needs x >= 16, got {x}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("L(x, a) needs 0 < a < 1, got {a}")));
    }
    let ln = x.ln();
    Ok((ln.powf(a) * ln.ln().powf(1.0 - a)).exp())
}

/// Relative slack applied before rounding L-bounds outward.
pub const L_SLACK: f64 = 1e-6;

/// `ceil(L(x, a) * (1 + slack))`, saturating at `u64::MAX`.
pub fn l_ceil(x: f64, a: f64) -> Result<u64> {
    let v = l_value(x, a)? * (1.0 + L_SLACK);
    Ok(if v >= u64::MAX as f64 { u64::MAX } else { v.ceil() as u64 })
}

/// Splits `n` into the part made of primes `<= bound` (factored) and the
/// remaining cofactor.
pub fn trial_divide(mut n: u64, bound: u64) -> (Vec<(u64, u32)>, u64) {
    let mut found = Vec::new();
    if n == 0 {
        return (found, 0);
    }
    let mut p = 2u64;
    while p <= bound && p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            found.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 && n <= bound {
        found.push((n, 1));
        n = 1;
    }
    (found, n)
}

/// The `bound`-smooth part of `m` in factored form, and `m` divided by it.
pub fn smooth_part(m: u64, bound: u64) -> (FactoredInteger, u64) {
    let mut rest = m;
    let mut factors = Vec::new();
    for p in primes_up_to(bound) {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    (FactoredInteger::from_sorted_primes(factors), rest)
}

/// `true` when every prime factor of `m` is at most `bound`.
pub fn is_smooth(m: u64, bound: u64) -> bool {
    let (_, rest) = trial_divide(m, bound);
    rest == 1
}

/// `C(k, floor(k/2))`.
pub fn central_binomial(k: u32) -> BigUint {
    let half = k / 2;
    let mut acc = BigUint::one();
    for i in 0..half {
        acc = acc * BigUint::from(k - i) / BigUint::from(i + 1);
    }
    acc
}

/// Numeric parameters shared by the smoothness-driven algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBoundParams {
    pub n: u64,
    pub bound: u64,
    pub c: f64,
    pub u: f64,
    pub delta: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SmoothBoundParams {
    pub fn new(n: u64, bound: u64) -> Self {
        SmoothBoundParams {
            n,
            bound,
            c: 2.0,
            u: 1.0,
            delta: 0.5,
            eta: 1.0,
            alpha: 2.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} outside (0, 1)")))
            }
        };
        if self.bound < 2 {
            return Err(Error::InvalidParameter(format!("bound {} < 2", self.bound)));
        }
        if !(self.c > 0.0) || !(self.u > 0.0) {
            return Err(Error::InvalidParameter("c and u must be positive".into()));
        }
        open("delta", self.delta)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} outside (0, 1]", self.eta)));
        }
        open("alpha", self.alpha)?;
        open("gamma", self.gamma)?;
        if !(self.beta > 0.0 && self.beta <= 0.5) {
            return Err(Error::InvalidParameter(format!("beta = {} outside (0, 1/2]", self.beta)));
        }
        Ok(())
    }
}

pub(crate) fn ln(n: u64) -> f64 {
    (n as f64).ln()
}

/// `max(floor((ln n)^exponent), floor)` capped at `n - 1`, the top of a
/// `{2, ..., top}` base set.
pub(crate) fn base_top(n: u64, exponent: f64, floor: u64) -> u64 {
    let raw = ln(n.max(2)).powf(exponent);
    let raw = if raw >= u64::MAX as f64 { u64::MAX } else { raw.floor() as u64 };
    raw.max(floor).min(n.saturating_sub(1))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn perfect_power_examples() {
        assert_eq!(perfect_power(121), Some((11, 2)));
        assert_eq!(perfect_power(3125), Some((5, 5)));
        assert_eq!(perfect_power(91), None);
        assert_eq!(perfect_power(64), Some((2, 6)));
        assert_eq!(perfect_power(2), None);
    }

    #[test]
    fn perfect_power_matches_exhaustive_check() {
        const LIMIT: u64 = 1_000_000;
        // every d^k <= LIMIT, keeping the largest k per value
        let mut expected: Vec<Option<(u64, u32)>> = vec![None; LIMIT as usize + 1];
        for d in 2..=1000u64 {
            let mut k = 2;
            while let Some(v) = d.checked_pow(k).filter(|&v| v <= LIMIT) {
                if expected[v as usize].is_none_or(|(_, old)| k > old) {
                    expected[v as usize] = Some((d, k));
                }
                k += 1;
            }
        }
        for n in 2..=LIMIT {
            assert_eq!(perfect_power(n), expected[n as usize], "n = {n}");
        }
    }

    #[test]
    fn build_m_examples() {
        let m = build_m(91, 3).unwrap();
        assert_eq!(m.factors(), &[(2, 6), (3, 4)]);
        assert_eq!(m.to_u64(), Some(5184));
        assert_eq!(build_m(8, 2).unwrap().to_u64(), Some(8));
        assert_eq!(build_m(3, 2).unwrap().to_u64(), Some(2));
        assert!(matches!(build_m(91, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn build_m_divisible_by_bounded_smooth_numbers() {
        for n in [30u64, 91, 500, 1000] {
            let m = build_m(n, 7).unwrap();
            for d in 1..=n {
                if is_smooth(d, 7) {
                    assert!(m.is_divisible_by(d), "n = {n}, d = {d}");
                }
            }
        }
    }

    #[test]
    fn element_order_examples() {
        let m = FactoredInteger::from_factors(vec![(2, 2), (3, 1)]).unwrap();
        assert_eq!(element_order(3, 91, &m).unwrap().to_u64(), Some(6));
        assert_eq!(element_order(1, 91, &m).unwrap().to_u64(), Some(1));
        let m = FactoredInteger::from_factors(vec![(2, 4)]).unwrap();
        assert_eq!(element_order(2, 17, &m).unwrap().to_u64(), Some(8));
    }

    #[test]
    fn element_order_errors() {
        let m = FactoredInteger::from_factors(vec![(2, 2), (3, 1)]).unwrap();
        assert_eq!(element_order(7, 91, &m), Err(Error::SharedFactor(7)));
        let m = FactoredInteger::from_factors(vec![(2, 1)]).unwrap();
        assert_eq!(element_order(3, 91, &m), Err(Error::NotAnnihilated));
    }

    #[test]
    fn factor_refine_examples() {
        assert_eq!(factor_refine(&[6, 15]), vec![(2, 1), (3, 2), (5, 1)]);
        assert_eq!(factor_refine(&[7, 13]), vec![(7, 1), (13, 1)]);
        assert_eq!(factor_refine(&[4, 8]), vec![(2, 5)]);
        assert_eq!(factor_refine(&[]), vec![]);
    }

    #[test]
    fn primality_small_range() {
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(91));
        assert!(!is_prime_u64(1891));
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), brute_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn primality_known_pseudoprimes() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime_u64(n), "{n}");
        }
        assert!(is_prime_u64(18446744073709551557));
        assert!(!is_prime_u64(18446744073709551555));
    }

    #[test]
    fn primality_big_width() {
        let p: BigUint = "1000000000000000000000007".parse().unwrap();
        assert_eq!(is_prime_det(&p), Ok(true));
        let c: BigUint = "1000000000000000000000005".parse().unwrap();
        assert_eq!(is_prime_det(&c), Ok(false));
        let too_wide: BigUint = PRIME_TEST_WIDTH_BOUND.parse().unwrap();
        assert!(matches!(is_prime_det(&too_wide), Err(Error::UnsupportedWidth(_))));
    }

    #[test]
    fn l_value_reference_points() {
        // frozen from a 40-digit evaluation
        let a = l_value(1e6, 1.0 / 3.0).unwrap();
        assert!((a / 96.253_061_713_248_12 - 1.0).abs() < 1e-9);
        let b = l_value(1e6, 2.0 / 3.0).unwrap();
        assert!((b / 2816.490_524_713_320_5 - 1.0).abs() < 1e-9);
        assert!(b >= a);
        let near_one = l_value(20.0, 1.0 - 1e-12).unwrap();
        assert!((near_one - 20.0).abs() < 1e-6);
        assert!(matches!(l_value(15.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(l_value(100.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_and_gcd_helpers() {
        assert_eq!(inv_mod(3, 7), Ok(5));
        assert_eq!(inv_mod(14, 91), Err(7));
        assert_eq!(gcd_minus_one(1, 91), 91);
        assert_eq!(gcd_minus_one(64, 91), 7);
        assert_eq!(sub_mod(2, 5, 7), 4);
        assert_eq!(pow_mod_big(2, &BigUint::from(12u32), 91), 1);
    }

    #[test]
    fn central_binomial_values() {
        assert_eq!(central_binomial(2), BigUint::from(2u32));
        assert_eq!(central_binomial(3), BigUint::from(3u32));
        assert_eq!(central_binomial(4), BigUint::from(6u32));
        assert_eq!(central_binomial(10), BigUint::from(252u32));
    }

    #[test]
    fn smooth_bound_params_ranges() {
        let p = SmoothBoundParams::new(91, 7);
        assert!(p.validate().is_ok());
        let mut bad = p.clone();
        bad.beta = 0.6;
        assert!(bad.validate().is_err());
        let mut bad = p;
        bad.delta = 1.0;
        assert!(bad.validate().is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn refine_is_coprime_and_preserves_product(parts in prop::collection::vec(2u64..200, 1..5)) {
            let product: u64 = parts.iter().product();
            prop_assume!(product <= 1_000_000);
            let out = factor_refine(&parts);
            let mut rebuilt = 1u64;
            for &(b, e) in &out {
                rebuilt *= b.pow(e);
            }
            prop_assert_eq!(rebuilt, product);
            for i in 0..out.len() {
                for j in (i + 1)..out.len() {
                    prop_assert_eq!(gcd(out[i].0, out[j].0), 1);
                }
            }
        }

        #[test]
        fn element_order_is_minimal(n in 3u64..10_000, b in 2u64..10_000) {
            let b = b % n;
            prop_assume!(b > 0 && gcd(b, n) == 1);
            // phi(n), factored by trial division
            let (pf, _) = trial_divide(n, n);
            let mut phi = Vec::new();
            for &(p, e) in &pf {
                phi.extend(trial_divide(p - 1, p).0);
                if e > 1 {
                    phi.push((p, e - 1));
                }
            }
            let m = FactoredInteger::from_factors(phi).unwrap();
            let order = element_order(b, n, &m).unwrap().to_u64().unwrap();
            let brute = (1..=n).find(|&t| pow_mod(b, t, n) == 1).unwrap();
            prop_assert_eq!(order, brute);
        }
    }
}
