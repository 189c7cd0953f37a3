//! Trial-division ground truth, Euler's totient and Carmichael's function.

use crate::arith::{gcd, trial_divide};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;

/// Default refusal bound for [`reference_factor`].
pub const REFERENCE_BOUND: u64 = 100_000_000;

/// Complete factorization by trial division; refuses `n > 10^8`.
pub fn reference_factor(n: u64) -> Result<FactoredInteger> {
    reference_factor_bounded(n, REFERENCE_BOUND)
}

pub fn reference_factor_bounded(n: u64, bound: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    if n > bound {
        return Err(Error::AboveBound { value: n, bound });
    }
    let (mut parts, rest) = trial_divide(n, u64::MAX);
    if rest > 1 {
        parts.push((rest, 1));
    }
    Ok(FactoredInteger::from_sorted_primes(parts))
}

/// `phi(n)` from the factorization of `n`.
pub fn totient_of(f: &FactoredInteger) -> u64 {
    f.factors().iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product()
}

/// `phi(n)` by trial division.
pub fn totient(n: u64) -> Result<u64> {
    Ok(totient_of(&reference_factor(n)?))
}

/// Carmichael's `lambda(n)` from the factorization of `n`.
pub fn carmichael_lambda_of(f: &FactoredInteger) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| match (p, e) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, e) => 1 << (e - 2),
            (p, e) => p.pow(e - 1) * (p - 1),
        })
        .fold(1, |acc, x| acc / gcd(acc, x) * x)
}

pub fn carmichael_lambda(n: u64) -> Result<u64> {
    Ok(carmichael_lambda_of(&reference_factor(n)?))
}

/// `lambda(n)` in factored form.
pub fn carmichael_lambda_factored(n: u64) -> Result<FactoredInteger> {
    reference_factor(carmichael_lambda(n)?)
}
