//! Pollard p-1: the randomized descent, the deterministic `split` with its
//! Fellows-Koblitz certificate, and the complete-factorization drivers.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    self, build_m, factor_refine_weighted, gcd, gcd_minus_one, is_prime_u64, perfect_power, pow_mod_factored,
};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::{checked_divisor, cyclic_generator_or_split, order_of, ModN, PhOutcome};
use crate::quad::QuadCertificate;

/// Base sets at least this large are scanned with rayon.
pub const PARALLEL_BASES: usize = 512;

/// Default lower bound on the top of the base set `{2, ..., top}`.
pub const BASE_FLOOR: u64 = 16;

/// Outcome of a splitting attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitOutcome {
    Divisor(u64),
    PrimeProof(Certificate),
    Failure(Failure),
}

impl SplitOutcome {
    pub fn divisor(&self) -> Option<u64> {
        match self {
            SplitOutcome::Divisor(d) => Some(*d),
            _ => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, SplitOutcome::Failure(_))
    }
}

/// Why a splitting attempt gave up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Failure {
    /// `gcd(b^M - 1, n) = 1`: the exponent does not annihilate `b` modulo any prime of `n`.
    NotAnnihilated { base: u64 },
    /// A quadratic base element has norm divisible by `n` but no component gcd splits.
    NormDegenerate { a1: i64, a2: i64 },
    /// A power-check gcd in the quadratic ring was 1.
    PowerCheck { a1: u64, a2: u64 },
    /// No witness, cyclic, but `LCM^2 <= n`: nothing can be concluded.
    LcmTooSmall { lcm: FactoredInteger },
    /// The cyclic subgroup test ran out of digits without a usable gcd.
    NonCyclicUnsplit,
    /// Every check passed but the deterministic primality test says composite.
    PrimalityRefuted,
    /// A base range was scanned without a split.
    Exhausted { first: u64, last: u64, prime_hint: bool },
    /// Every route of a composite splitter came back empty.
    NoSplit,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::NotAnnihilated { base } => write!(f, "b^M != 1 and gcd(b^M - 1, n) = 1 for b = {base}"),
            Failure::NormDegenerate { a1, a2 } => write!(f, "degenerate norm at {a1} + {a2}y"),
            Failure::PowerCheck { a1, a2 } => write!(f, "power check failed at {a1} + {a2}*sqrt(m)"),
            Failure::LcmTooSmall { lcm } => write!(f, "LCM of orders {lcm} does not exceed sqrt(n)"),
            Failure::NonCyclicUnsplit => write!(f, "subgroup not cyclic and no divisor surfaced"),
            Failure::PrimalityRefuted => write!(f, "all checks passed but n is composite"),
            Failure::Exhausted { first, last, prime_hint } => {
                write!(f, "bases {first}..={last} exhausted")?;
                if *prime_hint {
                    write!(f, " (n is prime)")?;
                }
                Ok(())
            }
            Failure::NoSplit => write!(f, "no split found"),
        }
    }
}

/// Evidence that `n` is prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Certificate {
    FellowsKoblitz(FkCertificate),
    Quadratic(QuadCertificate),
}

impl Certificate {
    pub fn n(&self) -> u64 {
        match self {
            Certificate::FellowsKoblitz(c) => c.n,
            Certificate::Quadratic(c) => c.n,
        }
    }

    pub fn verify(&self) -> Result<()> {
        match self {
            Certificate::FellowsKoblitz(c) => c.verify(),
            Certificate::Quadratic(c) => c.verify(),
        }
    }
}

/// Fellows-Koblitz primality evidence: bases whose orders are exact, with
/// no Fermat-Euclid witness among them, generating a cyclic group whose
/// order exceeds `sqrt(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FkCertificate {
    pub n: u64,
    pub bases: Vec<u64>,
    pub orders: Vec<FactoredInteger>,
    pub lcm: FactoredInteger,
    pub sqrt_check: bool,
}

impl FkCertificate {
    /// Rechecks every condition from the stored data alone.
    pub fn verify(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: String| Err(Error::Inconsistent(format!("certificate for {n}: {msg}")));
        if n < 3 || n.is_multiple_of(2) {
            return bad("modulus must be odd and at least 3".into());
        }
        if perfect_power(n).is_some() {
            return bad("modulus is a perfect power".into());
        }
        if self.bases.is_empty() || self.bases.len() != self.orders.len() {
            return bad("bases and orders differ in length".into());
        }
        let group = ModN::new(n);
        let mut lcm = FactoredInteger::one();
        for (&b, order) in self.bases.iter().zip(&self.orders) {
            if b < 2 || b >= n || gcd(b, n) != 1 {
                return bad(format!("base {b} not a unit"));
            }
            if pow_mod_factored(b, order, n) != 1 {
                return bad(format!("{order} does not annihilate {b}"));
            }
            for s in order.primes() {
                let y = pow_mod_factored(b, &order.div_prime(s).expect("prime of order"), n);
                if y == 1 {
                    return bad(format!("order of {b} is not {order}"));
                }
                if gcd_minus_one(y, n) != 1 {
                    return bad(format!("{b} is a Fermat-Euclid witness"));
                }
            }
            lcm = lcm.lcm(order);
        }
        if lcm != self.lcm {
            return bad(format!("stored LCM {} != {}", self.lcm, lcm));
        }
        let sqrt_ok = lcm.value() * lcm.value() > BigUint::from(n);
        if !sqrt_ok || !self.sqrt_check {
            return bad("LCM does not exceed sqrt(n)".into());
        }
        let gens: Vec<_> = self.bases.iter().copied().zip(self.orders.iter().cloned()).collect();
        match cyclic_generator_or_split(&group, &gens)? {
            PhOutcome::Cyclic { .. } => Ok(()),
            PhOutcome::Divisor(d) => bad(format!("bases generate a non-cyclic group, divisor {d}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FkWire {
    n: String,
    bases: Vec<String>,
    orders: Vec<FactoredInteger>,
    lcm: String,
    sqrt_check: bool,
}

impl Serialize for FkCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FkWire {
            n: self.n.to_string(),
            bases: self.bases.iter().map(u64::to_string).collect(),
            orders: self.orders.clone(),
            lcm: self.lcm.value().to_string(),
            sqrt_check: self.sqrt_check,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FkCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = FkWire::deserialize(deserializer)?;
        let num = |s: &str| s.parse::<u64>().map_err(|_| D::Error::custom(format!("bad integer {s:?}")));
        let n = num(&w.n)?;
        let bases = w.bases.iter().map(|b| num(b)).collect::<std::result::Result<Vec<_>, _>>()?;
        let lcm = w.orders.iter().fold(FactoredInteger::one(), |acc, o| acc.lcm(o));
        if lcm.value().to_string() != w.lcm {
            return Err(D::Error::custom(format!("lcm {} disagrees with orders ({})", w.lcm, lcm.value())));
        }
        Ok(FkCertificate { n, bases, orders: w.orders, lcm, sqrt_check: w.sqrt_check })
    }
}

/// `{2, ..., max(floor((ln n)^2), 16)}` capped at `n - 1`.
pub fn default_bases(n: u64) -> Vec<u64> {
    (2..=arith::base_top(n, 2.0, BASE_FLOOR)).collect()
}

fn require_odd(n: u64) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("n = {n} must be odd and at least 3")));
    }
    Ok(())
}

/// Result of steps 1-4 of the splitting algorithm over a base set.
pub(crate) enum Scan {
    Exit(SplitOutcome),
    Passed { bases: Vec<u64>, orders: Vec<FactoredInteger>, lcm: FactoredInteger },
}

fn first_in_order<T: Send, F>(bases: &[u64], f: F) -> Option<T>
where
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    if bases.len() >= PARALLEL_BASES {
        bases.par_iter().find_map_first(|&b| f(b))
    } else {
        bases.iter().find_map(|&b| f(b))
    }
}

/// Power check, orders, witness probes and the cyclicity test.
pub(crate) fn scan_bases(n: u64, m: &FactoredInteger, bases: &[u64]) -> Result<Scan> {
    // step 1: gcd(b^M - 1, n) first, then the shared-factor shortcut
    let exit = first_in_order(bases, |b| {
        let g = gcd_minus_one(pow_mod_factored(b, m, n), n);
        if g > 1 && g < n {
            return Some(SplitOutcome::Divisor(checked_divisor(g, n)));
        }
        let shared = gcd(b, n);
        if shared > 1 && shared < n {
            return Some(SplitOutcome::Divisor(checked_divisor(shared, n)));
        }
        (g == 1).then_some(SplitOutcome::Failure(Failure::NotAnnihilated { base: b }))
    });
    if let Some(out) = exit {
        return Ok(Scan::Exit(out));
    }

    // step 2: orders; every base is a unit annihilated by M at this point
    let group = ModN::new(n);
    let order = |b: u64| order_of(&group, &(b % n), m);
    let orders: Vec<FactoredInteger> = if bases.len() >= PARALLEL_BASES {
        bases.par_iter().map(|&b| order(b)).collect::<Result<_>>()?
    } else {
        bases.iter().map(|&b| order(b)).collect::<Result<_>>()?
    };

    // step 3: Fermat-Euclid witnesses
    let indexed: Vec<usize> = (0..bases.len()).collect();
    let witness = |i: usize| {
        let (b, ord) = (bases[i], &orders[i]);
        ord.primes().find_map(|s| {
            let y = pow_mod_factored(b, &ord.div_prime(s).expect("prime of order"), n);
            let g = gcd_minus_one(y, n);
            (g > 1 && g < n).then_some(g)
        })
    };
    let hit = if indexed.len() >= PARALLEL_BASES {
        indexed.par_iter().find_map_first(|&i| witness(i))
    } else {
        indexed.iter().find_map(|&i| witness(i))
    };
    if let Some(d) = hit {
        return Ok(Scan::Exit(SplitOutcome::Divisor(checked_divisor(d, n))));
    }

    // step 4: cyclicity
    let gens: Vec<_> = bases.iter().map(|&b| b % n).zip(orders.iter().cloned()).collect();
    let lcm = match cyclic_generator_or_split(&group, &gens)? {
        PhOutcome::Divisor(d) => return Ok(Scan::Exit(SplitOutcome::Divisor(checked_divisor(d, n)))),
        PhOutcome::Cyclic { order, .. } => order,
    };
    Ok(Scan::Passed { bases: bases.to_vec(), orders, lcm })
}

pub(crate) fn certificate_from_scan(n: u64, bases: Vec<u64>, orders: Vec<FactoredInteger>, lcm: FactoredInteger) -> SplitOutcome {
    if lcm.value() * lcm.value() > BigUint::from(n) {
        SplitOutcome::PrimeProof(Certificate::FellowsKoblitz(FkCertificate { n, bases, orders, lcm, sqrt_check: true }))
    } else {
        SplitOutcome::Failure(Failure::LcmTooSmall { lcm })
    }
}

/// The deterministic splitting algorithm over the default base set.
pub fn split(n: u64, m: &FactoredInteger) -> Result<SplitOutcome> {
    require_odd(n)?;
    split_with_bases(n, m, &default_bases(n))
}

/// [`split`] over a caller-chosen base set.
pub fn split_with_bases(n: u64, m: &FactoredInteger, bases: &[u64]) -> Result<SplitOutcome> {
    require_odd(n)?;
    if bases.is_empty() {
        return Err(Error::InvalidInput("empty base set".into()));
    }
    Ok(match scan_bases(n, m, bases)? {
        Scan::Exit(out) => out,
        Scan::Passed { bases, orders, lcm } => certificate_from_scan(n, bases, orders, lcm),
    })
}

/// Randomized p-1 with the power-of-two descent `gcd(b^(M/2^l) - 1, n)`.
pub fn pm1_random(n: u64, m: &FactoredInteger, b: u64) -> Result<SplitOutcome> {
    require_odd(n)?;
    let v = m.valuation(2);
    if v == 0 {
        return Err(Error::InvalidInput("exponent M must be even".into()));
    }
    let b = b % n;
    if b == 0 {
        return Err(Error::InvalidInput("base is 0 modulo n".into()));
    }
    let shared = gcd(b, n);
    if shared > 1 {
        return Ok(SplitOutcome::Divisor(checked_divisor(shared, n)));
    }
    Ok(descend(n, m, b))
}

// b^(odd part), then squarings up to b^M; probe from the top down
fn descend(n: u64, m: &FactoredInteger, b: u64) -> SplitOutcome {
    let v = m.valuation(2);
    let mut powers = vec![pow_mod_factored(b, &m.without_prime(2), n)];
    for _ in 0..v {
        let last = *powers.last().unwrap();
        powers.push(arith::mul_mod(last, last, n));
    }
    if gcd_minus_one(powers[v as usize], n) == 1 {
        return SplitOutcome::Failure(Failure::NotAnnihilated { base: b });
    }
    for x in powers.iter().rev() {
        let g = gcd_minus_one(*x, n);
        if g > 1 && g < n {
            return SplitOutcome::Divisor(checked_divisor(g, n));
        }
    }
    SplitOutcome::Failure(Failure::Exhausted { first: b, last: b, prime_hint: false })
}

/// Deterministic p-1 with smoothness bound `B`: perfect-power check, then
/// [`split`] with `M = build_m(n, B)`.
pub fn pm1_factor(n: u64, bound: u64) -> Result<SplitOutcome> {
    if bound < 2 {
        return Err(Error::InvalidParameter(format!("smoothness bound {bound} < 2")));
    }
    require_odd(n)?;
    pm1_factor_with_exponent(n, &build_m(n, bound)?)
}

/// [`pm1_factor`] with a caller-supplied exponent, e.g. the factored `n - 1`
/// of a Carmichael number.
pub fn pm1_factor_with_exponent(n: u64, m: &FactoredInteger) -> Result<SplitOutcome> {
    require_odd(n)?;
    if let Some((d, _)) = perfect_power(n) {
        return Ok(SplitOutcome::Divisor(checked_divisor(d, n)));
    }
    split(n, m)
}

/// Work-list factorization: primes are recognised, powers of two and
/// perfect powers peeled, and every other part handed to `splitter`
/// (`Ok(None)` means the part resists). Splits are refined into coprime parts.
pub fn factor_with<F>(n: u64, mut splitter: F) -> Result<FactoredInteger>
where
    F: FnMut(u64) -> Result<Option<u64>>,
{
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut work: Vec<(u64, u32)> = vec![(n, 1)];
    let mut primes = Vec::new();
    let mut stuck = Vec::new();
    while let Some((b, e)) = work.pop() {
        if b == 1 {
            continue;
        }
        if is_prime_u64(b) {
            primes.push((b, e));
            continue;
        }
        if b % 2 == 0 {
            let v = b.trailing_zeros();
            primes.push((2, v * e));
            work.push((b >> v, e));
            continue;
        }
        if let Some((d, k)) = perfect_power(b) {
            work.push((d, k * e));
            continue;
        }
        match splitter(b)? {
            Some(d) => {
                let d = checked_divisor(d, b);
                work.extend(factor_refine_weighted(&[(d, e), (b / d, e)]));
            }
            None => stuck.push(b),
        }
    }
    if !stuck.is_empty() {
        stuck.sort_unstable();
        primes.sort_unstable();
        return Err(Error::Incomplete { stuck, partial: primes });
    }
    FactoredInteger::from_factors(primes)
}

/// Complete factorization by iterated [`pm1_factor`]; every prime is
/// confirmed by the deterministic primality test.
pub fn pm1_factor_completely(n: u64, bound: u64) -> Result<FactoredInteger> {
    if bound < 2 {
        return Err(Error::InvalidParameter(format!("smoothness bound {bound} < 2")));
    }
    factor_with(n, |part| Ok(pm1_factor(part, bound)?.divisor()))
}

/// Fellows-Koblitz certificate for a prime `n` using `M = n - 1`, factored
/// by trial division up to `trial_bound` (the remaining cofactor must be
/// prime). `None` when the certificate cannot be completed.
pub fn certify_prime(n: u64, trial_bound: u64) -> Result<Option<FkCertificate>> {
    require_odd(n)?;
    let (mut parts, rest) = arith::trial_divide(n - 1, trial_bound);
    if rest > 1 {
        if !is_prime_u64(rest) {
            return Ok(None);
        }
        parts.push((rest, 1));
    }
    let m = FactoredInteger::from_factors(parts)?;
    match split(n, &m)? {
        SplitOutcome::PrimeProof(Certificate::FellowsKoblitz(c)) => Ok(Some(c)),
        _ => Ok(None),
    }
}

/// Fraction numerator: how many `b` in `Z_n^*` make the descent split.
pub fn descent_success_count(n: u64, m: &FactoredInteger) -> Result<(u64, u64)> {
    require_odd(n)?;
    let mut good = 0;
    let mut total = 0;
    for b in 1..n {
        if gcd(b, n) != 1 {
            continue;
        }
        total += 1;
        if matches!(pm1_random(n, m, b)?, SplitOutcome::Divisor(_)) {
            good += 1;
        }
    }
    Ok((good, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(v: &[(u64, u32)]) -> FactoredInteger {
        FactoredInteger::from_factors(v.to_vec()).unwrap()
    }

    #[test]
    fn pm1_random_examples() {
        let m = fi(&[(2, 2), (3, 1)]);
        assert_eq!(pm1_random(91, &m, 2), Ok(SplitOutcome::Divisor(7)));
        assert!(pm1_random(91, &m, 90).unwrap().is_failure());
        assert_eq!(pm1_random(91, &m, 7), Ok(SplitOutcome::Divisor(7)));
        assert!(matches!(pm1_random(91, &fi(&[(3, 1)]), 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split(91, &fi(&[(2, 6), (3, 4)])), Ok(SplitOutcome::Divisor(13)));
        // b = 7 exits in step 1 before the step-3 probe on b = 2 is reached
        assert_eq!(split(133, &fi(&[(2, 2), (3, 2)])), Ok(SplitOutcome::Divisor(19)));
        let SplitOutcome::PrimeProof(cert) = split(97, &fi(&[(2, 5), (3, 1)])).unwrap() else {
            panic!("97 is prime");
        };
        cert.verify().unwrap();
        let Certificate::FellowsKoblitz(fk) = cert else { panic!() };
        assert_eq!(fk.lcm.to_u64(), Some(96));
    }

    #[test]
    fn split_step3_probe_on_133() {
        // restricted to base 2: ord 18, gcd(2^9 - 1, 133) = 7
        assert_eq!(split_with_bases(133, &fi(&[(2, 2), (3, 2)]), &[2]), Ok(SplitOutcome::Divisor(7)));
    }

    #[test]
    fn split_reports_failure() {
        // 2^4 mod 7 = 2, gcd(1, 7) = 1
        assert_eq!(
            split(7, &fi(&[(2, 2)])),
            Ok(SplitOutcome::Failure(Failure::NotAnnihilated { base: 2 }))
        );
    }

    #[test]
    fn pm1_factor_examples() {
        let d = pm1_factor(91, 3).unwrap().divisor().unwrap();
        assert!(d == 7 || d == 13);
        let d = pm1_factor_with_exponent(561, &fi(&[(2, 4), (5, 1), (7, 1)])).unwrap().divisor().unwrap();
        assert!(561 % d == 0 && d > 1 && d < 561);
        assert_eq!(pm1_factor(9, 2), Ok(SplitOutcome::Divisor(3)));
        assert!(matches!(pm1_factor(91, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn pm1_factor_completely_examples() {
        assert_eq!(pm1_factor_completely(91, 3).unwrap(), fi(&[(7, 1), (13, 1)]));
        assert_eq!(pm1_factor_completely(1729, 3).unwrap(), fi(&[(7, 1), (13, 1), (19, 1)]));
        assert_eq!(pm1_factor_completely(7, 2).unwrap(), fi(&[(7, 1)]));
        assert_eq!(pm1_factor_completely(1, 2).unwrap(), FactoredInteger::one());
        assert_eq!(pm1_factor_completely(4 * 27 * 49, 3).unwrap(), fi(&[(2, 2), (3, 3), (7, 2)]));
    }

    #[test]
    fn pm1_factor_completely_reports_stuck_parts() {
        // 23 - 1 = 2 * 11 and 47 - 1 = 2 * 23: neither 3-smooth
        match pm1_factor_completely(23 * 47, 3) {
            Err(Error::Incomplete { stuck, .. }) => assert_eq!(stuck, vec![1081]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_round_trip_and_tamper() {
        let cert = certify_prime(97, 1000).unwrap().unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: FkCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        back.verify().unwrap();

        let mut forged = cert.clone();
        forged.n = 91;
        assert!(forged.verify().is_err());
        let mut forged = cert;
        forged.orders[0] = fi(&[(2, 5), (3, 1)]);
        forged.lcm = forged.orders.iter().fold(FactoredInteger::one(), |a, o| a.lcm(o));
        assert!(forged.verify().is_err());
    }

    #[test]
    fn rabin_density_on_91() {
        let (good, total) = descent_success_count(91, &fi(&[(2, 2), (3, 1)])).unwrap();
        assert_eq!(total, 72);
        assert!(2 * good >= total);
    }
}
