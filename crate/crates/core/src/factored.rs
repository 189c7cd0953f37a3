use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

/// A positive integer together with its complete prime factorization.
///
/// Primes are machine words; the value itself may be wider (exponents
/// such as `M` in the p-1 method routinely exceed 64 bits).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { value: BigUint::one(), factors: Vec::new() }
    }

    /// Builds from `(p, e)` pairs in any order. Repeated primes are merged,
    /// zero exponents dropped; every `p` must be prime.
    pub fn from_factors(mut pairs: Vec<(u64, u32)>) -> Result<Self> {
        pairs.retain(|&(_, e)| e > 0);
        if let Some(&(p, _)) = pairs.iter().find(|&&(p, _)| !is_prime_u64(p)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        pairs.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(pairs.len());
        for (p, e) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Self::from_sorted_primes(merged))
    }

    /// Caller guarantees strictly increasing primes with positive exponents.
    pub(crate) fn from_sorted_primes(factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(p, e)| e > 0 && is_prime_u64(p)));
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        FactoredInteger { value, factors }
    }

    /// A single prime power `p^e`.
    pub fn prime_power(p: u64, e: u32) -> Result<Self> {
        Self::from_factors(vec![(p, e)])
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// `v_p` of the value.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Number of distinct primes.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Number of primes counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn is_divisible_by(&self, d: u64) -> bool {
        (&self.value % BigUint::from(d)) == BigUint::from(0u32)
    }

    /// `true` when `other` divides `self`, decided on exponents.
    pub fn divides(&self, other: &FactoredInteger) -> bool {
        self.factors.iter().all(|&(p, e)| other.valuation(p) >= e)
    }

    fn merge_with(&self, other: &FactoredInteger, f: impl Fn(u32, u32) -> u32) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let a = self.factors.get(i).copied();
            let b = other.factors.get(j).copied();
            let (p, e) = match (a, b) {
                (Some((p, e)), Some((q, g))) if p == q => {
                    i += 1;
                    j += 1;
                    (p, f(e, g))
                }
                (Some((p, e)), Some((q, _))) if p < q => {
                    i += 1;
                    (p, f(e, 0))
                }
                (Some((p, e)), None) => {
                    i += 1;
                    (p, f(e, 0))
                }
                (_, Some((q, g))) => {
                    j += 1;
                    (q, f(0, g))
                }
                (None, None) => unreachable!(),
            };
            if e > 0 {
                out.push((p, e));
            }
        }
        Self::from_sorted_primes(out)
    }

    pub fn mul(&self, other: &FactoredInteger) -> Self {
        self.merge_with(other, |a, b| a + b)
    }

    pub fn lcm(&self, other: &FactoredInteger) -> Self {
        self.merge_with(other, u32::max)
    }

    pub fn gcd(&self, other: &FactoredInteger) -> Self {
        self.merge_with(other, u32::min)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &FactoredInteger) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        Some(self.merge_with(other, |a, b| a - b))
    }

    /// `self / p`, or `None` when `p` does not divide.
    pub fn div_prime(&self, p: u64) -> Option<Self> {
        if self.valuation(p) == 0 {
            return None;
        }
        let factors = self
            .factors
            .iter()
            .filter_map(|&(q, e)| match (q == p, e) {
                (true, 1) => None,
                (true, e) => Some((q, e - 1)),
                (false, e) => Some((q, e)),
            })
            .collect();
        Some(Self::from_sorted_primes(factors))
    }

    /// The `p`-part `p^{v_p}`.
    pub fn prime_part(&self, p: u64) -> Self {
        match self.valuation(p) {
            0 => Self::one(),
            e => Self::from_sorted_primes(vec![(p, e)]),
        }
    }

    /// Removes all factors of `p`.
    pub fn without_prime(&self, p: u64) -> Self {
        Self::from_sorted_primes(self.factors.iter().copied().filter(|&(q, _)| q != p).collect())
    }
}

impl Default for FactoredInteger {
    fn default() -> Self {
        Self::one()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireFactor {
    p: String,
    e: u32,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    value: String,
    factors: Vec<WireFactor>,
}

impl Serialize for FactoredInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            value: self.value.to_string(),
            factors: self.factors.iter().map(|&(p, e)| WireFactor { p: p.to_string(), e }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FactoredInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = Wire::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(wire.factors.len());
        for f in wire.factors {
            let p: u64 = f.p.parse().map_err(|_| D::Error::custom(format!("bad prime {:?}", f.p)))?;
            if f.e == 0 {
                return Err(D::Error::custom(format!("zero exponent for {p}")));
            }
            pairs.push((p, f.e));
        }
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(D::Error::custom("factors must be strictly increasing"));
        }
        let value: BigUint =
            wire.value.parse().map_err(|_| D::Error::custom(format!("bad value {:?}", wire.value)))?;
        let fi = FactoredInteger::from_factors(pairs).map_err(D::Error::custom)?;
        if fi.value != value {
            return Err(D::Error::custom(format!("value {value} != product of factors {}", fi.value)));
        }
        Ok(fi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(pairs: &[(u64, u32)]) -> FactoredInteger {
        FactoredInteger::from_factors(pairs.to_vec()).unwrap()
    }

    #[test]
    fn construction_merges_and_sorts() {
        let x = fi(&[(13, 1), (2, 2), (13, 1), (3, 0)]);
        assert_eq!(x.factors(), &[(2, 2), (13, 2)]);
        assert_eq!(x.to_u64(), Some(676));
        assert!(FactoredInteger::from_factors(vec![(91, 1)]).is_err());
    }

    #[test]
    fn algebra() {
        let a = fi(&[(2, 2), (3, 1)]);
        let b = fi(&[(2, 1), (5, 1)]);
        assert_eq!(a.lcm(&b).to_u64(), Some(60));
        assert_eq!(a.gcd(&b).to_u64(), Some(2));
        assert_eq!(a.mul(&b).to_u64(), Some(120));
        assert_eq!(a.checked_div(&b), None);
        assert_eq!(a.checked_div(&fi(&[(2, 1)])).unwrap().to_u64(), Some(6));
        assert_eq!(a.div_prime(3).unwrap().to_u64(), Some(4));
        assert_eq!(a.valuation(2), 2);
        assert_eq!(a.omega(), 2);
        assert_eq!(a.big_omega(), 3);
        assert_eq!(a.to_string(), "2^2 * 3");
    }

    #[test]
    fn json_shape() {
        let x = fi(&[(7, 1), (13, 1)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"value":"91","factors":[{"p":"7","e":1},{"p":"13","e":1}]}"#);
        let back: FactoredInteger = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let one = serde_json::to_string(&FactoredInteger::one()).unwrap();
        assert_eq!(one, r#"{"value":"1","factors":[]}"#);
    }

    #[test]
    fn json_rejects_inconsistent_documents() {
        for bad in [
            r#"{"value":"92","factors":[{"p":"7","e":1},{"p":"13","e":1}]}"#,
            r#"{"value":"91","factors":[{"p":"13","e":1},{"p":"7","e":1}]}"#,
            r#"{"value":"91","factors":[{"p":"91","e":1}]}"#,
            r#"{"value":"1","factors":[{"p":"7","e":0}]}"#,
        ] {
            assert!(serde_json::from_str::<FactoredInteger>(bad).is_err(), "{bad}");
        }
    }
}
