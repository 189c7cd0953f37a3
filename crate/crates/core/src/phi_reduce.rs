//! Factoring from a known value of Euler's function: semiprimes, two prime
//! powers, the equal-order factorization, and the power-of-two descent with
//! exponent `phi(n)`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, gcd, gcd_minus_one, is_prime_u64, isqrt, mul_mod, perfect_power, pow_mod};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::checked_divisor;
use crate::pm1::{factor_with, Failure, SplitOutcome};
use crate::reference::{reference_factor, totient_of};

#[derive(Debug)]
enum Backing {
    Table(HashMap<u64, u64>),
    Computed,
}

/// Answers `phi(m)` queries and logs them.
///
/// The table backing answers only what it was given; the computed backing
/// factors by trial division (so it refuses values above `10^8`).
#[derive(Debug)]
pub struct PhiOracle {
    backing: Backing,
    log: Mutex<Vec<u64>>,
}

impl PhiOracle {
    pub fn computed() -> Self {
        PhiOracle { backing: Backing::Computed, log: Mutex::new(Vec::new()) }
    }

    pub fn from_table(table: HashMap<u64, u64>) -> Self {
        PhiOracle { backing: Backing::Table(table), log: Mutex::new(Vec::new()) }
    }

    /// Lines of `"<n> <phi(n)>"`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!("line {}: expected \"<n> <phi>\"", i + 1)));
            };
            let num = |s: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("line {}: {s}: {e}", i + 1)));
            let (n, phi) = (num(a)?, num(b)?);
            if n == 0 || phi == 0 || phi > n {
                return Err(Error::Parse(format!("line {}: {phi} cannot be phi({n})", i + 1)));
            }
            if let Some(old) = table.insert(n, phi) {
                if old != phi {
                    return Err(Error::Parse(format!("line {}: conflicting values for {n}", i + 1)));
                }
            }
        }
        Ok(Self::from_table(table))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn query(&self, n: u64) -> Result<u64> {
        self.log.lock().expect("oracle log").push(n);
        match &self.backing {
            Backing::Table(t) => t.get(&n).copied().ok_or(Error::OracleIncomplete(n)),
            Backing::Computed => Ok(totient_of(&reference_factor(n)?)),
        }
    }

    pub fn calls(&self) -> usize {
        self.log.lock().expect("oracle log").len()
    }

    pub fn queries(&self) -> Vec<u64> {
        self.log.lock().expect("oracle log").clone()
    }

    pub fn reset(&self) {
        self.log.lock().expect("oracle log").clear();
    }
}

/// `(p, q)` with `p < q`, both prime, `pq = n`, `(p-1)(q-1) = phi`.
pub fn semiprime_from_phi(n: u64, phi: u64) -> Option<(u64, u64)> {
    if phi == 0 || phi >= n {
        return None;
    }
    let s = (n - phi + 1) as u128;
    let disc = (s * s).checked_sub(4 * n as u128)?;
    if disc == 0 || disc > u64::MAX as u128 {
        return None;
    }
    let r = isqrt(disc as u64) as u128;
    if r * r != disc || !(s + r).is_multiple_of(2) {
        return None;
    }
    let (p, q) = (((s - r) / 2) as u64, ((s + r) / 2) as u64);
    (p > 1 && p as u128 * q as u128 == n as u128 && is_prime_u64(p) && is_prime_u64(q)).then_some((p, q))
}

/// `(p, alpha, q, beta)` with `p < q` and `n = p^alpha q^beta`.
pub fn two_prime_powers_from_phi(n: u64, phi: u64) -> Option<(u64, u32, u64, u32)> {
    if n < 6 || phi == 0 || phi >= n {
        return None;
    }
    let g = gcd(n, phi);
    let (m, phi_m) = (n / g, phi / g);
    let check = |p: u64, q: u64| -> Option<(u64, u32, u64, u32)> {
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        let (a, rest) = strip(n, p);
        let (b, rest) = strip(rest, q);
        let f = FactoredInteger::from_factors(vec![(p, a), (q, b)]).ok()?;
        (rest == 1 && a > 0 && b > 0 && totient_of(&f) == phi).then_some((p, a, q, b))
    };
    if let Some(found) = semiprime_from_phi(m, phi_m).and_then(|(p, q)| check(p, q)) {
        return Some(found);
    }
    // m = q with p | q - 1
    if is_prime_u64(m) {
        let (_, rest) = strip(n, m);
        let p = match perfect_power(rest) {
            Some((r, _)) => r,
            None => rest,
        };
        if p > 1 && p != m && is_prime_u64(p) {
            return check(p, m);
        }
    }
    None
}

fn strip(mut n: u64, p: u64) -> (u32, u64) {
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    (e, n)
}

/// `parts[i - 1] = n_i`, the product of the primes dividing `n` exactly `i`
/// times; trailing ones are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualOrder {
    pub parts: Vec<u64>,
    pub oracle_calls: usize,
}

impl EqualOrder {
    pub fn value(&self) -> Option<u64> {
        self.parts.iter().enumerate().try_fold(1u64, |acc, (i, &p)| acc.checked_mul(p.checked_pow(i as u32 + 1)?))
    }
}

/// Equal-order factorization with a `phi`-oracle.
///
/// For `m > 1`, `D = m / gcd(m, phi(m))` is a squarefree product of primes
/// of `m` (the largest prime of `m` always occurs). The exponents of the
/// primes of `D` are read off by repeated gcds, the `D`-part removed, and
/// the rest handled the same way. Primes are recognized without a query.
pub fn equal_order_factorization(n: u64, oracle: &PhiOracle) -> Result<EqualOrder> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let before = oracle.calls();
    let mut parts: Vec<u64> = Vec::new();
    let add = |i: usize, d: u64, parts: &mut Vec<u64>| {
        if parts.len() < i {
            parts.resize(i, 1);
        }
        parts[i - 1] *= d;
    };
    let mut m = n;
    while m > 1 {
        let d = if is_prime_u64(m) {
            m
        } else {
            let phi = oracle.query(m)?;
            if phi == 0 || phi >= m {
                return Err(Error::Inconsistent(format!("oracle gave phi({m}) = {phi}")));
            }
            m / gcd(m, phi)
        };
        if d == 1 || !m.is_multiple_of(d) {
            return Err(Error::Inconsistent(format!("oracle value for {m} yields no prime part")));
        }
        // c_i: primes of d dividing m at least i times
        let mut t = m;
        let mut c = d;
        let mut i = 0;
        while c > 1 {
            t /= c;
            i += 1;
            let next = gcd(t, c);
            if c / next > 1 {
                add(i, c / next, &mut parts);
            }
            c = next;
        }
        m = t;
    }
    while parts.last() == Some(&1) {
        parts.pop();
    }
    let out = EqualOrder { parts, oracle_calls: oracle.calls() - before };
    if out.value() != Some(n) {
        return Err(Error::Inconsistent(format!("equal-order parts {:?} do not rebuild {n}", out.parts)));
    }
    Ok(out)
}

/// Base selection for [`factor_given_phi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiStrategy {
    /// `b = 2, ..., floor(2 (ln n)^2)`.
    SmallBase,
    /// As many bases, drawn from a seeded ChaCha8 stream.
    Randomized { seed: u64 },
}

/// Top of the small-base range.
pub fn small_base_top(n: u64) -> u64 {
    let t = 2.0 * arith::ln(n.max(2)).powi(2);
    (t.floor() as u64).max(2).min(n.saturating_sub(1))
}

/// The power-of-two descent with exponent `phi`: for each base, find the
/// first nontrivial `gcd(b^(phi/2^l) - 1, n)` from the top down.
pub fn factor_given_phi(n: u64, phi: u64, strategy: PhiStrategy) -> Result<SplitOutcome> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("n = {n} must be odd and at least 3")));
    }
    if phi == 0 {
        return Err(Error::InvalidInput("phi must be positive".into()));
    }
    if let Some((r, _)) = perfect_power(n) {
        return Ok(SplitOutcome::Divisor(checked_divisor(r, n)));
    }
    let top = small_base_top(n);
    let prime_hint = is_prime_u64(n);
    let exhausted = |first, last| SplitOutcome::Failure(Failure::Exhausted { first, last, prime_hint });
    match strategy {
        PhiStrategy::SmallBase => {
            for b in 2..=top {
                if let Some(out) = descend(n, phi, b) {
                    return Ok(out);
                }
            }
            Ok(exhausted(2, top))
        }
        PhiStrategy::Randomized { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 2..=top {
                let b = rng.gen_range(2..n);
                if let Some(out) = descend(n, phi, b) {
                    return Ok(out);
                }
            }
            Ok(exhausted(2, n - 1))
        }
    }
}

fn descend(n: u64, phi: u64, b: u64) -> Option<SplitOutcome> {
    let shared = gcd(b, n);
    if shared > 1 {
        return (shared < n).then_some(SplitOutcome::Divisor(shared));
    }
    // an odd phi only happens for n <= 2; doubling keeps the descent defined
    let v = phi.trailing_zeros().max(1);
    let odd = phi >> phi.trailing_zeros();
    let mut powers = vec![pow_mod(b, odd, n)];
    for _ in 0..v {
        let last = *powers.last().unwrap();
        powers.push(mul_mod(last, last, n));
    }
    if gcd_minus_one(*powers.last().unwrap(), n) == 1 {
        return Some(SplitOutcome::Failure(Failure::NotAnnihilated { base: b }));
    }
    powers.iter().rev().find_map(|&x| {
        let g = gcd_minus_one(x, n);
        (g > 1 && g < n).then(|| SplitOutcome::Divisor(checked_divisor(g, n)))
    })
}

/// Complete factorization by [`factor_given_phi`] on every part; `phi(n)`
/// serves as the exponent for each divisor since `phi(d) | phi(n)`.
pub fn factor_completely_given_phi(n: u64, phi: u64, strategy: PhiStrategy) -> Result<FactoredInteger> {
    factor_with(n, |part| match factor_given_phi(part, phi, strategy)? {
        SplitOutcome::Divisor(d) => Ok(Some(d)),
        _ => Ok(None),
    })
}

/// Dispatch on shape: semiprime, then two prime powers, then the descent.
pub fn factor_from_phi(n: u64, phi: u64, strategy: PhiStrategy) -> Result<FactoredInteger> {
    if let Some((p, q)) = semiprime_from_phi(n, phi) {
        return FactoredInteger::from_factors(vec![(p, 1), (q, 1)]);
    }
    if let Some((p, a, q, b)) = two_prime_powers_from_phi(n, phi) {
        return FactoredInteger::from_factors(vec![(p, a), (q, b)]);
    }
    factor_completely_given_phi(n, phi, strategy)
}
