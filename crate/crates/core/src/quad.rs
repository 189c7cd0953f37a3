//! Arithmetic in `Z_n[sqrt(m)]`, the conjugation endomorphism `f_n`, units of
//! the real quadratic order, and the deterministic p+1 splitter `split2`.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, gcd_minus_one, inv_mod, is_prime_u64, mul_mod, perfect_power, sub_mod};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::{checked_divisor, cyclic_generator_or_split, order_of, pow_factored, PhOutcome, UnitGroup};
use crate::pm1::{factor_with, Certificate, Failure, SplitOutcome, PARALLEL_BASES};

/// Largest `m` accepted by [`unit_generators`] and [`split2`].
pub const MAX_M: u64 = 1000;

/// The radicands tried by default.
pub const DEFAULT_MS: [u64; 6] = [2, 3, 5, 7, 11, 13];

pub const DEFAULT_TRIAL_BOUND: u64 = 1000;

/// `Z_n[sqrt(m)]` as a unit group; elements are pairs `(a1, a2)` meaning
/// `a1 + a2 sqrt(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadGroup {
    n: u64,
    m: u64,
    m_mod: u64,
}

impl QuadGroup {
    pub fn new(n: u64, m: u64) -> Self {
        assert!(n >= 2);
        QuadGroup { n, m, m_mod: m % n }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn norm(&self, x: &(u64, u64)) -> u64 {
        let n = self.n;
        sub_mod(mul_mod(x.0, x.0, n), mul_mod(self.m_mod, mul_mod(x.1, x.1, n), n), n)
    }

    pub fn conj(&self, x: &(u64, u64)) -> (u64, u64) {
        (x.0, sub_mod(0, x.1, self.n))
    }

    /// `f_n(x) = conj(x) / x = conj(x)^2 / N(x)`; `Err(gcd(N(x), n))` when
    /// `x` is not a unit.
    pub fn conj_endo(&self, x: &(u64, u64)) -> std::result::Result<(u64, u64), u64> {
        let inv = inv_mod(self.norm(x), self.n)?;
        let c = self.conj(x);
        let sq = self.mul(&c, &c);
        Ok((mul_mod(sq.0, inv, self.n), mul_mod(sq.1, inv, self.n)))
    }
}

impl UnitGroup for QuadGroup {
    type Elem = (u64, u64);

    fn modulus(&self) -> u64 {
        self.n
    }

    fn one(&self) -> (u64, u64) {
        (1 % self.n, 0)
    }

    fn mul(&self, x: &(u64, u64), y: &(u64, u64)) -> (u64, u64) {
        let n = self.n as u128;
        let (a1, a2, b1, b2) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let m = self.m_mod as u128;
        let re = (a1 * b1 % n + (m * (a2 * b2 % n)) % n) % n;
        let im = (a1 * b2 % n + a2 * b1 % n) % n;
        (re as u64, im as u64)
    }

    fn invert(&self, x: &(u64, u64)) -> std::result::Result<(u64, u64), u64> {
        let inv = inv_mod(self.norm(x), self.n)?;
        let c = self.conj(x);
        Ok((mul_mod(c.0, inv, self.n), mul_mod(c.1, inv, self.n)))
    }

    // x and y agree modulo p exactly when p divides both coordinates of x - y
    fn probe(&self, x: &(u64, u64), y: &(u64, u64)) -> u64 {
        let d1 = sub_mod(x.0, y.0, self.n);
        let d2 = sub_mod(x.1, y.1, self.n);
        gcd(gcd(d1, d2), self.n)
    }
}

/// A residue `a1 + a2 sqrt(m)` of `Z_n[sqrt(m)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadElement {
    pub a1: u64,
    pub a2: u64,
    pub m: u64,
    pub n: u64,
}

impl QuadElement {
    pub fn new(a1: i128, a2: i128, m: u64, n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("modulus {n} < 2")));
        }
        let r = |a: i128| a.rem_euclid(n as i128) as u64;
        Ok(QuadElement { a1: r(a1), a2: r(a2), m, n })
    }

    fn group(&self) -> QuadGroup {
        QuadGroup::new(self.n, self.m)
    }

    fn from_pair(&self, p: (u64, u64)) -> Self {
        QuadElement { a1: p.0, a2: p.1, ..*self }
    }

    fn pair(&self) -> (u64, u64) {
        (self.a1, self.a2)
    }

    pub fn mul(&self, other: &QuadElement) -> Result<Self> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::InvalidInput("elements of different rings".into()));
        }
        Ok(self.from_pair(self.group().mul(&self.pair(), &other.pair())))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.from_pair(self.group().pow(&self.pair(), e))
    }

    pub fn pow_factored(&self, e: &FactoredInteger) -> Self {
        let g = self.group();
        self.from_pair(pow_factored(&g, &self.pair(), e))
    }

    /// `a1^2 - m a2^2 mod n`.
    pub fn norm(&self) -> u64 {
        self.group().norm(&self.pair())
    }

    pub fn conj(&self) -> Self {
        self.from_pair(self.group().conj(&self.pair()))
    }

    pub fn conj_endo(&self) -> Result<Self> {
        self.group().conj_endo(&self.pair()).map(|p| self.from_pair(p)).map_err(Error::SharedFactor)
    }

    pub fn is_one(&self) -> bool {
        self.pair() == self.group().one()
    }
}

#[derive(Serialize, Deserialize)]
struct QuadWire {
    a1: String,
    a2: String,
    m: u64,
    n: String,
}

impl Serialize for QuadElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadWire { a1: self.a1.to_string(), a2: self.a2.to_string(), m: self.m, n: self.n.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = QuadWire::deserialize(d)?;
        let num = |s: &str| s.parse::<u64>().map_err(|_| D::Error::custom(format!("bad integer {s:?}")));
        let (a1, a2, n) = (num(&w.a1)?, num(&w.a2)?, num(&w.n)?);
        if n < 2 || a1 >= n || a2 >= n {
            return Err(D::Error::custom("coordinates must be reduced residues modulo n >= 2"));
        }
        Ok(QuadElement { a1, a2, m: w.m, n })
    }
}

/// `a + b y` in `Z[y]`, where `y = sqrt(m)` for `m = 2, 3 (mod 4)` and
/// `y = (1 + sqrt(m)) / 2` for `m = 1 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadInteger {
    pub a: i128,
    pub b: i128,
}

fn uses_half_basis(m: u64) -> bool {
    m % 4 == 1
}

impl QuadInteger {
    /// Norm down to `Z`.
    pub fn norm(&self, m: u64) -> Option<i128> {
        let (a, b, m) = (self.a, self.b, m as i128);
        if uses_half_basis(m as u64) {
            a.checked_mul(a)?.checked_add(a.checked_mul(b)?)?.checked_sub(b.checked_mul(b)?.checked_mul((m - 1) / 4)?)
        } else {
            a.checked_mul(a)?.checked_sub(b.checked_mul(b)?.checked_mul(m)?)
        }
    }

    /// Exact norm, for units too large for the checked `i128` form.
    pub fn norm_big(&self, m: u64) -> BigInt {
        let (a, b) = (BigInt::from(self.a), BigInt::from(self.b));
        if uses_half_basis(m) {
            &a * &a + &a * &b - &b * &b * BigInt::from((m - 1) / 4)
        } else {
            &a * &a - &b * &b * BigInt::from(m)
        }
    }

    /// Image in `Z_n[sqrt(m)]` (`n` odd).
    pub fn project(&self, m: u64, n: u64) -> (u64, u64) {
        let r = |x: i128| x.rem_euclid(n as i128) as u64;
        if uses_half_basis(m) {
            let half = n.div_ceil(2);
            let b_half = mul_mod(r(self.b), half, n);
            ((r(self.a) + b_half) % n, b_half)
        } else {
            (r(self.a), r(self.b))
        }
    }
}

pub fn is_squarefree(m: u64) -> bool {
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `{-1, fundamental unit}` of `Z[y]`, from the continued fraction of
/// `sqrt(m)` or of `(1 + sqrt(m)) / 2`.
pub fn unit_generators(m: u64) -> Result<Vec<QuadInteger>> {
    if !(2..=MAX_M).contains(&m) || !is_squarefree(m) {
        return Err(Error::InvalidParameter(format!("m = {m} must be squarefree with 1 < m <= {MAX_M}")));
    }
    let d = m as i128;
    let root = arith::isqrt(m) as i128;
    let (mut p, mut q) = if uses_half_basis(m) { (1i128, 2i128) } else { (0, 1) };
    let q0 = q;
    let (mut h2, mut h1) = (0i128, 1i128);
    let (mut k2, mut k1) = (1i128, 0i128);
    let overflow = || Error::InvalidParameter(format!("fundamental unit for m = {m} overflows"));
    loop {
        let a = (p + root).div_euclid(q);
        let h = a.checked_mul(h1).and_then(|x| x.checked_add(h2)).ok_or_else(overflow)?;
        let k = a.checked_mul(k1).and_then(|x| x.checked_add(k2)).ok_or_else(overflow)?;
        (h2, h1, k2, k1) = (h1, h, k1, k);
        p = a * q - p;
        q = (d - p * p) / q;
        if q == q0 {
            let unit = if uses_half_basis(m) { QuadInteger { a: h - k, b: k } } else { QuadInteger { a: h, b: k } };
            debug_assert!(unit.norm_big(m).magnitude() == &BigUint::from(1u32));
            return Ok(vec![QuadInteger { a: -1, b: 0 }, unit]);
        }
    }
}

/// Certificate from the p+1 route: every group check passed under the
/// configured bounds and the deterministic primality test agrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadCertificate {
    pub n: u64,
    pub m: u64,
    pub h: u64,
    pub trial_bound: u64,
    pub lcm: FactoredInteger,
}

impl QuadCertificate {
    pub fn verify(&self) -> Result<()> {
        if !is_prime_u64(self.n) {
            return Err(Error::Inconsistent(format!("{} is not prime", self.n)));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct QuadCertWire {
    n: String,
    m: u64,
    h: u64,
    trial_bound: u64,
    lcm: FactoredInteger,
    bounded_confidence: bool,
}

impl Serialize for QuadCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadCertWire {
            n: self.n.to_string(),
            m: self.m,
            h: self.h,
            trial_bound: self.trial_bound,
            lcm: self.lcm.clone(),
            bounded_confidence: true,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = QuadCertWire::deserialize(d)?;
        let n = w.n.parse().map_err(|_| D::Error::custom(format!("bad integer {:?}", w.n)))?;
        Ok(QuadCertificate { n, m: w.m, h: w.h, trial_bound: w.trial_bound, lcm: w.lcm })
    }
}

/// Configuration for [`split2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split2Config {
    /// Coefficient bound `H` of the base set; `None` means `max(4, ceil((ln n)^2))`.
    pub h: Option<u64>,
    /// Prime factors up to this bound are found by trial division first (0 disables).
    pub trial_bound: u64,
}

impl Default for Split2Config {
    fn default() -> Self {
        Split2Config { h: None, trial_bound: DEFAULT_TRIAL_BOUND }
    }
}

impl Split2Config {
    pub fn coefficient_bound(&self, n: u64) -> u64 {
        self.h.unwrap_or_else(|| {
            let l = arith::ln(n.max(2));
            ((l * l).ceil() as u64).max(4)
        })
    }
}

/// The deterministic p+1 splitter over `Z_n[sqrt(m)]`.
pub fn split2(n: u64, m: u64, big_m: &FactoredInteger, config: &Split2Config) -> Result<SplitOutcome> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("n = {n} must be odd and at least 3")));
    }
    let units = unit_generators(m)?;
    let h = config.coefficient_bound(n);
    if h == 0 {
        return Err(Error::InvalidParameter("coefficient bound H must be at least 1".into()));
    }

    // step 1
    if let Some((d, _)) = perfect_power(n) {
        return Ok(SplitOutcome::Divisor(checked_divisor(d, n)));
    }
    let gm = gcd(m, n);
    if gm == n {
        return Err(Error::InvalidInput(format!("n = {n} divides m = {m}")));
    }
    if gm > 1 {
        return Ok(SplitOutcome::Divisor(checked_divisor(gm, n)));
    }

    // step 2
    let (small, _) = arith::trial_divide(n, config.trial_bound);
    if let Some(&(p, _)) = small.first() {
        if p < n {
            return Ok(SplitOutcome::Divisor(checked_divisor(p, n)));
        }
    }

    // step 3
    let group = QuadGroup::new(n, m);
    let hi = h as i128;
    let mut base: Vec<(u64, u64)> = units.iter().map(|u| u.project(m, n)).collect();
    for a1 in -hi..=hi {
        for a2 in -hi..=hi {
            let a = QuadInteger { a: a1, b: a2 };
            let norm = a.norm(m).ok_or_else(|| Error::InvalidParameter("coefficient bound too large".into()))?;
            let (c1, c2) = a.project(m, n);
            if (c1, c2) == (0, 0) {
                continue;
            }
            let g = gcd(norm.unsigned_abs().rem_euclid(n as u128) as u64, n);
            if g > 1 && g < n {
                return Ok(SplitOutcome::Divisor(checked_divisor(g, n)));
            }
            if g == n {
                let (g1, g2) = (gcd(c1, n), gcd(c2, n));
                if g1 == 1 || g2 == 1 {
                    return Ok(SplitOutcome::Failure(Failure::NormDegenerate { a1: a1 as i64, a2: a2 as i64 }));
                }
                for gi in [g1, g2] {
                    if gi < n {
                        return Ok(SplitOutcome::Divisor(checked_divisor(gi, n)));
                    }
                }
                continue;
            }
            base.push((c1, c2));
        }
    }

    // f_n(B_n), duplicates removed in first-seen order
    let mut seen = HashSet::new();
    let mut images = Vec::new();
    for x in &base {
        let fx = group.conj_endo(x).map_err(|g| Error::Inconsistent(format!("non-unit survived the norm scan ({g})")))?;
        if seen.insert(fx) {
            images.push(fx);
        }
    }

    // step 4
    let power_check = |b: &(u64, u64)| {
        let (b1, b2) = pow_factored(&group, b, big_m);
        let (g1, g2) = (gcd_minus_one(b1, n), gcd(b2, n));
        if g1 == 1 || g2 == 1 {
            return Some(SplitOutcome::Failure(Failure::PowerCheck { a1: b.0, a2: b.1 }));
        }
        [g1, g2].into_iter().find(|&g| g < n).map(|g| SplitOutcome::Divisor(checked_divisor(g, n)))
    };
    let exit = if images.len() >= PARALLEL_BASES {
        images.par_iter().find_map_first(power_check)
    } else {
        images.iter().find_map(power_check)
    };
    if let Some(out) = exit {
        return Ok(out);
    }

    // step 5
    let orders: Vec<FactoredInteger> = if images.len() >= PARALLEL_BASES {
        images.par_iter().map(|b| order_of(&group, b, big_m)).collect::<Result<_>>()?
    } else {
        images.iter().map(|b| order_of(&group, b, big_m)).collect::<Result<_>>()?
    };

    // step 6
    let witness = |i: usize| {
        let (b, ord) = (&images[i], &orders[i]);
        ord.primes().find_map(|s| {
            let (y1, y2) = pow_factored(&group, b, &ord.div_prime(s).expect("prime of order"));
            [gcd_minus_one(y1, n), gcd(y2, n)].into_iter().find(|&g| g > 1 && g < n)
        })
    };
    let idx: Vec<usize> = (0..images.len()).collect();
    let hit = if idx.len() >= PARALLEL_BASES {
        idx.par_iter().find_map_first(|&i| witness(i))
    } else {
        idx.iter().find_map(|&i| witness(i))
    };
    if let Some(d) = hit {
        return Ok(SplitOutcome::Divisor(checked_divisor(d, n)));
    }

    // step 7
    let gens: Vec<_> = images.into_iter().zip(orders).collect();
    let lcm = match cyclic_generator_or_split(&group, &gens) {
        Ok(PhOutcome::Divisor(d)) => return Ok(SplitOutcome::Divisor(checked_divisor(d, n))),
        Ok(PhOutcome::Cyclic { order, .. }) => order,
        Err(Error::InvalidInput(_)) => return Ok(SplitOutcome::Failure(Failure::NonCyclicUnsplit)),
        Err(e) => return Err(e),
    };

    // step 8, rechecked
    if is_prime_u64(n) {
        Ok(SplitOutcome::PrimeProof(Certificate::Quadratic(QuadCertificate {
            n,
            m,
            h,
            trial_bound: config.trial_bound,
            lcm,
        })))
    } else {
        Ok(SplitOutcome::Failure(Failure::PrimalityRefuted))
    }
}

/// p+1 with smoothness bound `B`: [`split2`] with
/// `M = prod_{q <= B} q^floor(ln(n+1) / ln q)`.
pub fn pp1_factor(n: u64, bound: u64, m: u64, config: &Split2Config) -> Result<SplitOutcome> {
    if bound < 2 {
        return Err(Error::InvalidParameter(format!("smoothness bound {bound} < 2")));
    }
    let big_m = arith::build_m(n.checked_add(1).ok_or_else(|| Error::UnsupportedWidth(n.to_string()))?, bound)?;
    split2(n, m, &big_m, config)
}

/// Complete factorization by [`pp1_factor`], trying each `m` in turn on
/// every composite part.
pub fn pp1_factor_completely(n: u64, bound: u64, ms: &[u64], config: &Split2Config) -> Result<FactoredInteger> {
    if ms.is_empty() {
        return Err(Error::InvalidParameter("no radicand m supplied".into()));
    }
    factor_with(n, |part| {
        for &m in ms {
            match pp1_factor(part, bound, m, config) {
                Ok(SplitOutcome::Divisor(d)) => return Ok(Some(d)),
                Ok(_) => {}
                Err(Error::InvalidInput(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    })
}

/// Legendre-Jacobi symbol `(a / p)` for odd `p`.
pub fn jacobi(a: i64, p: u64) -> i32 {
    debug_assert!(p % 2 == 1);
    let mut a = a.rem_euclid(p as i64) as u64;
    let mut n = p;
    let mut t = 1;
    while a != 0 {
        while a.is_even() {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(a1: i128, a2: i128, m: u64, n: u64) -> QuadElement {
        QuadElement::new(a1, a2, m, n).unwrap()
    }

    #[test]
    fn quad_pow_examples() {
        assert_eq!(el(1, 1, 2, 91).pow(2), el(3, 2, 2, 91));
        assert_eq!(el(7, 5, 2, 91).pow(0), el(1, 0, 2, 91));
        assert_eq!(el(0, 1, 2, 7).pow(6), el(1, 0, 2, 7));
    }

    #[test]
    fn conj_endo_examples() {
        assert_eq!(el(5, 0, 2, 91).conj_endo().unwrap(), el(1, 0, 2, 91));
        let x = el(1, 1, 2, 7);
        let f = x.conj_endo().unwrap();
        assert_eq!(f, el(4, 2, 2, 7));
        // (2/7) = 1, so f lands in a group of order dividing 7 - 1
        let ff = f.conj_endo().unwrap();
        let order = (1..=64).find(|&k| ff.pow(k).is_one()).unwrap();
        assert_eq!(order, 3);
        // (2/13) = -1: order divides 13 + 1
        let ff = el(1, 1, 2, 13).conj_endo().unwrap().conj_endo().unwrap();
        let order = (1..=64).find(|&k| ff.pow(k).is_one()).unwrap();
        assert_eq!(14 % order, 0);
        assert_eq!(el(3, 2, 2, 91).mul(&el(1, 0, 2, 91)).unwrap(), el(3, 2, 2, 91));
        // norm 7^2 - 2 * 0 shares 7 with 91
        assert_eq!(el(7, 0, 2, 91).conj_endo(), Err(Error::SharedFactor(7)));
    }

    #[test]
    fn unit_generator_examples() {
        let u = |m| unit_generators(m).unwrap()[1];
        assert_eq!(u(2), QuadInteger { a: 1, b: 1 });
        assert_eq!(u(3), QuadInteger { a: 2, b: 1 });
        assert_eq!(u(5), QuadInteger { a: 0, b: 1 });
        assert_eq!(u(13), QuadInteger { a: 1, b: 1 });
        assert_eq!(u(94), QuadInteger { a: 2143295, b: 221064 });
        assert!(unit_generators(12).is_err());
        assert!(unit_generators(1).is_err());
    }

    #[test]
    fn unit_generators_have_unit_norm() {
        for m in (2..=MAX_M).filter(|&m| is_squarefree(m)) {
            let units = unit_generators(m).unwrap();
            let n = units[1].norm_big(m);
            assert!(n == BigInt::from(1) || n == BigInt::from(-1), "m = {m}");
        }
    }

    #[test]
    fn split2_examples() {
        let cfg = Split2Config { h: Some(4), trial_bound: 0 };
        let m14 = FactoredInteger::from_factors(vec![(2, 1), (7, 1)]).unwrap();
        let d = split2(91, 2, &m14, &cfg).unwrap().divisor().unwrap();
        assert!(d == 7 || d == 13);
        let out = split2(13, 2, &m14, &cfg).unwrap();
        let SplitOutcome::PrimeProof(cert) = out else { panic!("{out:?}") };
        cert.verify().unwrap();
        assert_eq!(split2(9, 3, &m14, &cfg), Ok(SplitOutcome::Divisor(3)));
    }

    #[test]
    fn split2_trial_division_step() {
        let m = FactoredInteger::from_factors(vec![(2, 1)]).unwrap();
        assert_eq!(split2(3 * 1009, 2, &m, &Split2Config::default()), Ok(SplitOutcome::Divisor(3)));
    }

    #[test]
    fn pp1_factor_completely_on_small_inputs() {
        let cfg = Split2Config { h: None, trial_bound: 0 };
        // 13 + 1 = 14 and (2/13) = -1; 11 + 1 = 12 and (3/11) = -1
        let f = pp1_factor_completely(13 * 23, 7, &[2], &cfg).unwrap();
        assert_eq!(f.to_u64(), Some(299));
    }

    #[test]
    fn jacobi_values() {
        assert_eq!(jacobi(2, 13), -1);
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(5, 11), 1);
        assert_eq!(jacobi(3, 9), 0);
    }

    #[test]
    fn json_round_trip() {
        let x = el(3, 2, 2, 91);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a1":"3","a2":"2","m":2,"n":"91"}"#);
        assert_eq!(serde_json::from_str::<QuadElement>(&s).unwrap(), x);
        assert!(serde_json::from_str::<QuadElement>(r#"{"a1":"93","a2":"2","m":2,"n":"91"}"#).is_err());
    }
}
