//! Complete factorization from `(n, phi(n))` for integers whose primes have
//! enough smooth structure in `p - 1`: the smooth-pair witness scan, the
//! residue-class scan, the divisor search in a residue class, and the
//! list-driven driver around them.

use serde::Serialize;

use crate::arith::{self, factor_refine_weighted, gcd, is_prime_u64, perfect_power, pow_mod, smooth_part, trial_divide};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::checked_divisor;
use crate::phi_reduce::two_prime_powers_from_phi;
use crate::pm1::{self, Failure, Scan, SplitOutcome, BASE_FLOOR};
use crate::reference::totient_of;

/// Default cap on base-set size for the residue-class scans.
pub const GRAF_BASE_CAP: u64 = 2048;

/// Smallest smoothness bound the driver uses for `phi`.
pub const SMOOTH_FLOOR: u64 = 20;

/// Budget on `x` in the residue-class enumeration.
pub const ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GrafPhiParams {
    pub k: u32,
    pub u: f64,
    pub delta: f64,
    pub eta: f64,
    /// Trial division below `(ln n)^max(exponents)` before anything else.
    /// At small `n` that bound exceeds `sqrt(n)` and the pass factors
    /// everything, so tests switch it off.
    pub trial_guard: bool,
    pub base_cap: u64,
}

impl Default for GrafPhiParams {
    fn default() -> Self {
        GrafPhiParams { k: 1, u: 2.0, delta: 0.5, eta: 1.0, trial_guard: true, base_cap: GRAF_BASE_CAP }
    }
}

impl GrafPhiParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {} outside (0, 1)", self.delta)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} outside (0, 1]", self.eta)));
        }
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::InvalidParameter(format!("u = {} must be positive", self.u)));
        }
        if self.base_cap < 2 {
            return Err(Error::InvalidParameter("base cap below 2".into()));
        }
        Ok(())
    }

    /// `2/delta` and `(2 + eta)/(delta eta)`.
    pub fn pair_exponents(&self) -> (f64, f64) {
        (2.0 / self.delta, (2.0 + self.eta) / (self.delta * self.eta))
    }

    pub fn residue_exponent(&self) -> f64 {
        self.k as f64 + 3.0
    }

    pub fn guard_exponent(&self) -> f64 {
        let (a, b) = self.pair_exponents();
        a.max(b).max(self.residue_exponent())
    }

    /// `max((ln n)^u, 20)`.
    pub fn smooth_bound(&self, n: u64) -> u64 {
        let b = arith::ln(n.max(2)).powf(self.u);
        (if b >= 1e12 { 1_000_000_000_000 } else { b.floor() as u64 }).max(SMOOTH_FLOOR)
    }
}

fn base_set(d: u64, exponent: f64, cap: u64) -> Vec<u64> {
    let top = arith::base_top(d, exponent, BASE_FLOOR).min(cap.saturating_add(1));
    (2..=top).collect()
}

fn require_odd(d: u64) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("{d} must be odd and at least 3")));
    }
    Ok(())
}

/// Split `d` with the elements `b^(phi/M)`, `M` the `B`-smooth part of
/// `phi`: witnesses first, then the cyclicity test.
pub fn smooth_pair_witness(d: u64, phi: u64, b_smooth: u64, exponent: f64) -> Result<SplitOutcome> {
    smooth_pair_witness_capped(d, phi, b_smooth, exponent, GRAF_BASE_CAP)
}

pub fn smooth_pair_witness_capped(d: u64, phi: u64, b_smooth: u64, exponent: f64, cap: u64) -> Result<SplitOutcome> {
    require_odd(d)?;
    if phi == 0 {
        return Err(Error::InvalidInput("phi must be positive".into()));
    }
    let (m, rest) = smooth_part(phi, b_smooth);
    let bases = base_set(d, exponent, cap);
    if let Some(g) = bases.iter().map(|&b| gcd(b, d)).find(|&g| g > 1) {
        if g < d {
            return Ok(SplitOutcome::Divisor(checked_divisor(g, d)));
        }
    }
    let mut elems: Vec<u64> = bases.iter().map(|&b| pow_mod(b, rest, d)).filter(|&x| x > 1).collect();
    elems.dedup();
    if elems.is_empty() {
        return Ok(SplitOutcome::Failure(Failure::Exhausted {
            first: bases[0],
            last: *bases.last().unwrap(),
            prime_hint: is_prime_u64(d),
        }));
    }
    Ok(match pm1::scan_bases(d, &m, &elems)? {
        Scan::Exit(out) => out,
        Scan::Passed { .. } => SplitOutcome::Failure(Failure::Exhausted {
            first: bases[0],
            last: *bases.last().unwrap(),
            prime_hint: is_prime_u64(d),
        }),
    })
}

/// Outcome of the residue-class scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidueOutcome {
    /// `1 < gcd(b^M' - 1, d) < d`.
    Divisor(u64),
    /// A Fermat-Euclid witness among the annihilated bases.
    WitnessDivisor(u64),
    /// Every prime of `d` is `1 mod A`.
    ResidueClass(u64),
}

/// `M'` is the product of `p^v_p(phi)` over the primes `p` of `phi` with
/// `p - 1` being `B`-smooth. Bases with `b^M' = 1 (mod d)` have the same
/// order modulo every prime of `d` unless one of them is a witness, so the
/// LCM `A` of their orders divides `p - 1` for every `p | d`.
pub fn residue_class_scan(d: u64, phi: &FactoredInteger, b_smooth: u64, k: u32) -> Result<ResidueOutcome> {
    residue_class_scan_capped(d, phi, b_smooth, k, GRAF_BASE_CAP)
}

pub fn residue_class_scan_capped(
    d: u64,
    phi: &FactoredInteger,
    b_smooth: u64,
    k: u32,
    cap: u64,
) -> Result<ResidueOutcome> {
    require_odd(d)?;
    let m_prime = FactoredInteger::from_factors(
        phi.factors().iter().copied().filter(|&(p, _)| arith::is_smooth(p - 1, b_smooth)).collect(),
    )?;
    let bases = base_set(d, k as f64 + 3.0, cap);
    let mut annihilated = Vec::new();
    for &b in &bases {
        let shared = gcd(b, d);
        if shared > 1 && shared < d {
            return Ok(ResidueOutcome::Divisor(checked_divisor(shared, d)));
        }
        let g = arith::gcd_minus_one(arith::pow_mod_factored(b, &m_prime, d), d);
        if g > 1 && g < d {
            return Ok(ResidueOutcome::Divisor(checked_divisor(g, d)));
        }
        if g == d {
            annihilated.push(b);
        }
    }
    let group = crate::group::ModN::new(d);
    let mut a = FactoredInteger::one();
    for &b in &annihilated {
        let ord = crate::group::order_of(&group, &b, &m_prime)?;
        for s in ord.primes() {
            let y = arith::pow_mod_factored(b, &ord.div_prime(s).expect("prime of order"), d);
            let g = arith::gcd_minus_one(y, d);
            if g > 1 && g < d {
                return Ok(ResidueOutcome::WitnessDivisor(checked_divisor(g, d)));
            }
        }
        a = a.lcm(&ord);
    }
    let a = a.to_u64().ok_or_else(|| Error::Inconsistent("order LCM beyond 64 bits".into()))?;
    Ok(ResidueOutcome::ResidueClass(a))
}

/// Every divisor `s x + r` of `d` with `1 <= x <= x_max`, by enumeration.
pub fn divisors_in_residue_class(d: u64, s: u64, r: u64, x_max: u64) -> Result<Vec<u64>> {
    if d == 0 || r == 0 || r >= s || gcd(r, s) != 1 || gcd(s, d) != 1 {
        return Err(Error::InvalidInput(format!("need 0 < r < s, gcd(r, s) = gcd(s, d) = 1 (d={d}, s={s}, r={r})")));
    }
    let mut out = Vec::new();
    for x in 1..=x_max {
        let Some(v) = (s as u128 * x as u128 + r as u128).try_into().ok().filter(|&v: &u64| v <= d) else {
            break;
        };
        if d.is_multiple_of(v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Why the driver stopped; `l2` lists the deferred parts, `active` the
/// composite parts left when it stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrafAudit {
    pub l2: Vec<String>,
    pub active: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrafOutcome {
    Factored(FactoredInteger),
    Failure(GrafAudit),
}

/// The driver. Active parts are split by the two smooth-pair scans, then by
/// the residue-class scan and the divisor search; splits are refined into
/// coprime parts. Parts that resist are deferred; a single deferred part is
/// finished from its own `phi`, recovered by dividing out the contribution
/// of the primes already found.
pub fn graf_phi_factor(n: u64, phi: u64, params: &GrafPhiParams) -> Result<GrafOutcome> {
    params.validate()?;
    require_odd(n)?;
    if phi == 0 || phi >= n && n > 1 {
        return Err(Error::InvalidInput(format!("{phi} cannot be phi({n})")));
    }
    let sb = params.smooth_bound(n);
    let (e1, e2) = params.pair_exponents();
    // phi factored as far as p-1 can take it; unfinished parts are dropped
    let phi_factored = match pm1::pm1_factor_completely(phi, sb.max(2)) {
        Ok(f) => f,
        Err(Error::Incomplete { partial, .. }) => FactoredInteger::from_factors(partial)?,
        Err(e) => return Err(e),
    };

    let mut primes: Vec<(u64, u32)> = Vec::new();
    let mut active: Vec<(u64, u32)> = Vec::new();
    let start = if params.trial_guard {
        let bound = arith::ln(n).powf(params.guard_exponent());
        let bound = if bound >= u64::MAX as f64 { u64::MAX } else { bound as u64 };
        let (found, rest) = trial_divide(n, bound);
        primes.extend(found);
        rest
    } else {
        n
    };
    active.push((start, 1));
    let mut l2: Vec<(u64, u32)> = Vec::new();

    while let Some((d, w)) = active.pop() {
        if d == 1 {
            continue;
        }
        if is_prime_u64(d) {
            primes.push((d, w));
            continue;
        }
        if let Some((r, k)) = perfect_power(d) {
            active.push((r, k * w));
            continue;
        }
        match split_part(d, phi, &phi_factored, sb, e1, e2, params)? {
            Some(x) => active.extend(factor_refine_weighted(&[(x, w), (d / x, w)])),
            None => l2.push((d, w)),
        }
    }

    let fail = |reason: String, l2: &[(u64, u32)], active: &[(u64, u32)]| {
        GrafOutcome::Failure(GrafAudit {
            l2: l2.iter().map(|(d, _)| d.to_string()).collect(),
            active: active.iter().map(|(d, _)| d.to_string()).collect(),
            reason,
        })
    };
    match l2.as_slice() {
        [] => {}
        [(m, w)] => {
            let found = FactoredInteger::from_factors(primes.clone())?;
            let done = totient_of(&found);
            if !phi.is_multiple_of(done) {
                return Ok(fail(format!("phi is not divisible by phi of the found part ({done})"), &l2, &[]));
            }
            let Some(mw) = m.checked_pow(*w) else {
                return Ok(fail("deferred power overflows".into(), &l2, &[]));
            };
            match two_prime_powers_from_phi(mw, phi / done) {
                Some((p, a, q, b)) => {
                    primes.push((p, a));
                    primes.push((q, b));
                }
                None => return Ok(fail(format!("{mw} is not p^a q^b for phi = {}", phi / done), &l2, &[])),
            }
        }
        _ => return Ok(fail(format!("{} parts deferred", l2.len()), &l2, &[])),
    }
    let result = FactoredInteger::from_factors(primes)?;
    if result.to_u64() != Some(n) {
        return Err(Error::Inconsistent(format!("factorization {result} does not multiply to {n}")));
    }
    if totient_of(&result) != phi {
        return Ok(fail(format!("phi({n}) from the factorization is {}, not {phi}", totient_of(&result)), &[], &[]));
    }
    Ok(GrafOutcome::Factored(result))
}

fn split_part(
    d: u64,
    phi: u64,
    phi_factored: &FactoredInteger,
    sb: u64,
    e1: f64,
    e2: f64,
    params: &GrafPhiParams,
) -> Result<Option<u64>> {
    for e in [e1, e2] {
        if let SplitOutcome::Divisor(x) = smooth_pair_witness_capped(d, phi, sb, e, params.base_cap)? {
            return Ok(Some(x));
        }
    }
    match residue_class_scan_capped(d, phi_factored, sb, params.k, params.base_cap)? {
        ResidueOutcome::Divisor(x) | ResidueOutcome::WitnessDivisor(x) => Ok(Some(x)),
        ResidueOutcome::ResidueClass(a) if a > 1 => {
            let x_max = (arith::isqrt(d) / a).min(ENUMERATION_CAP);
            Ok(divisors_in_residue_class(d, a, 1, x_max)?.into_iter().find(|&x| x > 1 && x < d))
        }
        ResidueOutcome::ResidueClass(_) => Ok(None),
    }
}
