//! Factoring `n` from a factored `phi(n)`, and the totient-chain driver that
//! factors `n, phi(n), phi(phi(n)), ...` from the bottom up.

use crate::arith::{l_value, perfect_power};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::checked_divisor;
use crate::phi_reduce::PhiOracle;
use crate::pm1::{self, factor_with, Failure, Scan, SplitOutcome};
use crate::poly::base_a_split;
use crate::reference::totient_of;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub base_floor: u64,
    /// Multiplier on `L(d, (1 - beta) gamma)` for the `mA + 1` scan.
    pub m_slack: f64,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams { alpha: 2.0 / 3.0, beta: 1.0 / 3.0, gamma: 0.5, base_floor: pm1::BASE_FLOOR, m_slack: 4.0 }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        const EPS: f64 = 1e-9;
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !(unit(self.alpha) && unit(self.beta) && unit(self.gamma)) {
            return Err(Error::InvalidParameter("alpha, beta, gamma must lie in (0, 1)".into()));
        }
        if self.beta > 0.5 + EPS || 1.0 - self.beta < self.alpha - EPS {
            return Err(Error::InvalidParameter(format!("need beta <= 1/2 and 1 - beta >= alpha (beta = {})", self.beta)));
        }
        if (1.0 - self.beta) * (1.0 - self.gamma) > 1.0 - self.alpha + EPS {
            return Err(Error::InvalidParameter("need (1 - beta)(1 - gamma) <= 1 - alpha".into()));
        }
        if self.base_floor < 2 || !(self.m_slack >= 1.0) {
            return Err(Error::InvalidParameter("base floor >= 2 and slack >= 1 required".into()));
        }
        Ok(())
    }

    fn base_top(&self, d: u64) -> u64 {
        let l = if d >= 16 { l_value(d as f64, 1.0 - self.alpha).unwrap_or(0.0) } else { 0.0 };
        (l.floor() as u64).max(self.base_floor).min(d - 1)
    }

    fn m_cap(&self, d: u64, a: u64) -> u64 {
        let l = if d >= 16 { l_value(d as f64, (1.0 - self.beta) * self.gamma).unwrap_or(1.0) } else { 1.0 };
        let cap = (l.ceil() * self.m_slack).min(u64::MAX as f64) as u64;
        cap.min(d / a)
    }
}

/// Split `d` given a factored multiple of `phi(d)`.
///
/// The base scan exits with a divisor or proves `d` prime; otherwise every
/// prime of `d` is `1 mod A`, `A` the LCM of the base orders. Then the
/// base-`A` digits of `d` are tried as a product of `k` linear factors, and
/// finally the candidates `mA + 1`.
pub fn split_with_factored_phi(d: u64, phi_n: &FactoredInteger, params: &ChainParams) -> Result<SplitOutcome> {
    params.validate()?;
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("{d} must be odd and at least 3")));
    }
    if let Some((r, _)) = perfect_power(d) {
        return Ok(SplitOutcome::Divisor(checked_divisor(r, d)));
    }
    let bases: Vec<u64> = (2..=params.base_top(d)).collect();
    let a = match pm1::scan_bases(d, phi_n, &bases)? {
        Scan::Exit(out) => return Ok(out),
        Scan::Passed { bases, orders, lcm } => match pm1::certificate_from_scan(d, bases, orders, lcm) {
            SplitOutcome::Failure(Failure::LcmTooSmall { lcm }) => lcm,
            done => return Ok(done),
        },
    };
    let a = a.to_u64().expect("A^2 <= d");

    if a >= 2 {
        let k = digits(d, a) - 1;
        if k >= 2 {
            match base_a_split(d, a, k) {
                Ok(found) => return Ok(SplitOutcome::Divisor(checked_divisor(found[0], d))),
                Err(Error::BoundViolation(_) | Error::Inconsistent(_) | Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }

    for m in 1..=params.m_cap(d, a) {
        let p = m * a + 1;
        if p >= d {
            break;
        }
        if d.is_multiple_of(p) {
            return Ok(SplitOutcome::Divisor(p));
        }
    }
    Ok(SplitOutcome::Failure(Failure::NoSplit))
}

fn digits(mut d: u64, a: u64) -> u32 {
    let mut k = 0;
    while d > 0 {
        d /= a;
        k += 1;
    }
    k
}

/// Output of [`phi_chain_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFactorization {
    pub factors: FactoredInteger,
    /// `n, phi(n), ..., 1`.
    pub chain: Vec<u64>,
    pub oracle_calls: usize,
}

/// Queries the chain down to 1, then factors each level from the
/// factorization of the level below it.
pub fn phi_chain_factor(n: u64, oracle: &PhiOracle) -> Result<ChainFactorization> {
    phi_chain_factor_with(n, oracle, &ChainParams::default())
}

pub fn phi_chain_factor_with(n: u64, oracle: &PhiOracle, params: &ChainParams) -> Result<ChainFactorization> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let before = oracle.calls();
    let mut chain = vec![n];
    while let Some(&last) = chain.last().filter(|&&x| x > 1) {
        let next = oracle.query(last)?;
        if next == 0 || next >= last {
            return Err(Error::Inconsistent(format!("oracle gave phi({last}) = {next}")));
        }
        chain.push(next);
    }
    let oracle_calls = oracle.calls() - before;

    let mut below = FactoredInteger::one();
    for &value in chain.iter().rev().skip(1) {
        let f = factor_with(value, |part| Ok(split_with_factored_phi(part, &below, params)?.divisor()))?;
        if totient_of(&f) != below.to_u64().expect("chain values fit in 64 bits") {
            return Err(Error::Inconsistent(format!("phi({value}) from its factorization disagrees with the oracle")));
        }
        below = f;
    }
    Ok(ChainFactorization { factors: below, chain, oracle_calls })
}

/// Factor a Carmichael number with the factored `n - 1` as the exponent.
pub fn carmichael_factor(n: u64, n_minus_1: &FactoredInteger) -> Result<FactoredInteger> {
    if n < 3 || n_minus_1.to_u64() != Some(n - 1) {
        return Err(Error::InvalidInput(format!("expected the factorization of {} for n = {n}", n.saturating_sub(1))));
    }
    let params = ChainParams::default();
    factor_with(n, |part| Ok(split_with_factored_phi(part, n_minus_1, &params)?.divisor()))
}

/// Number of chain steps bounded by `1 + log2 n`.
pub fn chain_call_bound(n: u64) -> usize {
    1 + (63 - n.max(1).leading_zeros()) as usize
}
