//! Unit groups with zero-divisor detection, element orders, and the PH
//! algorithm: given elements with known smooth orders, produce a generator of
//! the subgroup they generate or a nontrivial divisor of the modulus.

use std::fmt::Debug;

use crate::arith::{self, gcd, is_prime_u64};
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;

/// The multiplicative group of a ring over `Z_n`, viewed through an
/// interface that can report common factors with `n`.
pub trait UnitGroup: Sync {
    type Elem: Clone + Eq + Debug + Send + Sync;

    fn modulus(&self) -> u64;
    fn one(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    /// `Err(g)` carries the factor of `n` that blocked inversion.
    fn invert(&self, x: &Self::Elem) -> std::result::Result<Self::Elem, u64>;

    /// The gcd of `n` with the difference `x - y`; `n` when `x == y`.
    fn probe(&self, x: &Self::Elem, y: &Self::Elem) -> u64;

    fn pow(&self, x: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// First `j` with `probe(x, table[j]) > 1`, together with that gcd.
    fn first_hit(&self, x: &Self::Elem, table: &[Self::Elem]) -> Option<(usize, u64)> {
        table.iter().enumerate().find_map(|(j, t)| {
            let d = self.probe(x, t);
            (d > 1).then_some((j, d))
        })
    }
}

/// `Z_n^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModN {
    n: u64,
}

impl ModN {
    pub fn new(n: u64) -> Self {
        assert!(n >= 2, "modulus must be at least 2");
        ModN { n }
    }
}

const HIT_BLOCK: usize = 32;

impl UnitGroup for ModN {
    type Elem = u64;

    fn modulus(&self) -> u64 {
        self.n
    }

    fn one(&self) -> u64 {
        1 % self.n
    }

    fn mul(&self, x: &u64, y: &u64) -> u64 {
        arith::mul_mod(*x, *y, self.n)
    }

    fn invert(&self, x: &u64) -> std::result::Result<u64, u64> {
        arith::inv_mod(*x, self.n)
    }

    fn probe(&self, x: &u64, y: &u64) -> u64 {
        gcd(arith::sub_mod(*x, *y, self.n), self.n)
    }

    fn pow(&self, x: &u64, e: u64) -> u64 {
        arith::pow_mod(*x, e, self.n)
    }

    // One gcd per block of differences; rescan the block on a hit.
    fn first_hit(&self, x: &u64, table: &[u64]) -> Option<(usize, u64)> {
        for (b, block) in table.chunks(HIT_BLOCK).enumerate() {
            let prod = block
                .iter()
                .fold(1u64, |acc, t| arith::mul_mod(acc, arith::sub_mod(*x, *t, self.n), self.n));
            if gcd(prod, self.n) > 1 {
                for (i, t) in block.iter().enumerate() {
                    let d = self.probe(x, t);
                    if d > 1 {
                        return Some((b * HIT_BLOCK + i, d));
                    }
                }
            }
        }
        None
    }
}

/// `x^(p^e)`.
pub fn pow_prime_power<G: UnitGroup>(g: &G, x: &G::Elem, p: u64, e: u32) -> G::Elem {
    (0..e).fold(x.clone(), |acc, _| g.pow(&acc, p))
}

/// `x^M` with `M` given by its factorization.
pub fn pow_factored<G: UnitGroup>(g: &G, x: &G::Elem, m: &FactoredInteger) -> G::Elem {
    m.factors().iter().fold(x.clone(), |acc, &(p, e)| pow_prime_power(g, &acc, p, e))
}

/// The order of `x`, given that `x^M = 1`.
///
/// For each prime `p` of `M` in increasing order, `y = x^(M / p^e)` is
/// raised to successive powers of `p` until it reaches 1.
pub fn order_of<G: UnitGroup>(g: &G, x: &G::Elem, m: &FactoredInteger) -> Result<FactoredInteger> {
    let one = g.one();
    if pow_factored(g, x, m) != one {
        return Err(Error::NotAnnihilated);
    }
    let mut order = Vec::new();
    for &(p, e) in m.factors() {
        let mut y = pow_factored(g, x, &m.without_prime(p));
        let mut k = 0;
        while y != one {
            y = g.pow(&y, p);
            k += 1;
        }
        debug_assert!(k <= e);
        if k > 0 {
            order.push((p, k));
        }
    }
    Ok(FactoredInteger::from_sorted_primes(order))
}

/// Result of the PH algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhOutcome<E> {
    Divisor(u64),
    Cyclic { generator: E, order: FactoredInteger },
}

pub(crate) fn checked_divisor(d: u64, n: u64) -> u64 {
    assert!(d > 1 && d < n && n.is_multiple_of(d), "invalid divisor {d} of {n}");
    d
}

const TABLE_LIMIT: u64 = 1 << 16;

/// The PH algorithm for `ord(a) = s^v`, `ord(b) = s^w`.
///
/// Returns a nontrivial divisor of `n`, or certifies `<a, b>` cyclic and
/// returns the input of larger order as its generator. A digit search that
/// runs past `j = s - 1` means the order hypotheses were false.
pub fn ph_split<G: UnitGroup>(
    g: &G,
    a: &G::Elem,
    b: &G::Elem,
    s: u64,
    v: u32,
    w: u32,
) -> Result<PhOutcome<G::Elem>> {
    let n = g.modulus();
    if !is_prime_u64(s) {
        return Err(Error::InvalidInput(format!("{s} is not prime")));
    }
    let (a, b, v) = if w > v { (b, a, w) } else { (a, b, v) };
    let order = FactoredInteger::prime_power(s, v)?;
    if v == 0 {
        return Ok(PhOutcome::Cyclic { generator: a.clone(), order });
    }
    let a_inv = g.invert(a).map_err(Error::SharedFactor)?;
    // a^(s^(v-1)) has order s; its powers are the candidate digits
    let a_top = pow_prime_power(g, a, s, v - 1);
    let table: Option<Vec<G::Elem>> = (s <= TABLE_LIMIT).then(|| {
        let mut t = Vec::with_capacity(s as usize);
        let mut acc = g.one();
        for _ in 0..s {
            t.push(acc.clone());
            acc = g.mul(&acc, &a_top);
        }
        t
    });

    let mut c = b.clone();
    for t in 0..v {
        let cp = pow_prime_power(g, &c, s, v - 1 - t);
        let hit = match &table {
            Some(table) => g.first_hit(&cp, table),
            None => {
                let mut acc = g.one();
                let mut found = None;
                for j in 0..s {
                    let d = g.probe(&cp, &acc);
                    if d > 1 {
                        found = Some((j as usize, d));
                        break;
                    }
                    acc = g.mul(&acc, &a_top);
                }
                found
            }
        };
        let Some((j, d)) = hit else {
            return Err(Error::InvalidInput(format!(
                "no digit found for s = {s} at position {t}; order hypotheses violated"
            )));
        };
        if d != n {
            return Ok(PhOutcome::Divisor(checked_divisor(d, n)));
        }
        // c <- c * a^(-j s^t)
        let step = pow_prime_power(g, &g.pow(&a_inv, j as u64), s, t);
        c = g.mul(&c, &step);
    }
    Ok(PhOutcome::Cyclic { generator: a.clone(), order })
}

/// [`ph_split`] in `Z_n^*`.
pub fn ph_split_mod(n: u64, a: u64, b: u64, s: u64, v: u32, w: u32) -> Result<PhOutcome<u64>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("modulus {n} must be odd and at least 3")));
    }
    let g = ModN::new(n);
    ph_split(&g, &(a % n), &(b % n), s, v, w)
}

/// Generator of `<gens>` with order the LCM of the input orders, or a
/// nontrivial divisor. The inputs are folded one at a time; each fold runs
/// [`ph_split`] on the `s`-primary parts, primes in increasing order.
pub fn cyclic_generator_or_split<G: UnitGroup>(
    g: &G,
    gens: &[(G::Elem, FactoredInteger)],
) -> Result<PhOutcome<G::Elem>> {
    let Some((first, rest)) = gens.split_first() else {
        return Ok(PhOutcome::Cyclic { generator: g.one(), order: FactoredInteger::one() });
    };
    let mut cur = first.0.clone();
    let mut cur_order = first.1.clone();
    for (x, x_order) in rest {
        let lcm = cur_order.lcm(x_order);
        let mut next = g.one();
        for &(s, _) in lcm.factors() {
            let va = cur_order.valuation(s);
            let vb = x_order.valuation(s);
            let a_s = pow_factored(g, &cur, &cur_order.without_prime(s));
            let b_s = pow_factored(g, x, &x_order.without_prime(s));
            let part = if vb == 0 {
                a_s
            } else if va == 0 {
                b_s
            } else {
                match ph_split(g, &a_s, &b_s, s, va, vb)? {
                    PhOutcome::Divisor(d) => return Ok(PhOutcome::Divisor(d)),
                    PhOutcome::Cyclic { generator, .. } => generator,
                }
            };
            next = g.mul(&next, &part);
        }
        cur = next;
        cur_order = lcm;
    }
    Ok(PhOutcome::Cyclic { generator: cur, order: cur_order })
}

/// [`cyclic_generator_or_split`] in `Z_n^*`.
pub fn cyclic_generator_or_split_mod(n: u64, gens: &[(u64, FactoredInteger)]) -> Result<PhOutcome<u64>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("modulus {n} must be odd and at least 3")));
    }
    let g = ModN::new(n);
    let gens: Vec<_> = gens.iter().map(|(x, o)| (x % n, o.clone())).collect();
    cyclic_generator_or_split(&g, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow_mod;

    fn fi(v: &[(u64, u32)]) -> FactoredInteger {
        FactoredInteger::from_factors(v.to_vec()).unwrap()
    }

    fn cyclic(generator: u64, order: &[(u64, u32)]) -> PhOutcome<u64> {
        PhOutcome::Cyclic { generator, order: fi(order) }
    }

    #[test]
    fn ph_split_examples() {
        assert_eq!(ph_split_mod(91, 16, 79, 3, 1, 1), Ok(PhOutcome::Divisor(13)));
        assert_eq!(ph_split_mod(91, 16, 74, 3, 1, 1), Ok(cyclic(16, &[(3, 1)])));
        assert_eq!(ph_split_mod(91, 16, 1, 3, 1, 0), Ok(cyclic(16, &[(3, 1)])));
        // interchange when w > v
        assert_eq!(ph_split_mod(91, 1, 16, 3, 0, 1), Ok(cyclic(16, &[(3, 1)])));
    }

    #[test]
    fn ph_split_rejects_wrong_orders() {
        // 35 has order 3 mod 97 but 96 has order 2
        assert_eq!(pow_mod(35, 3, 97), 1);
        assert!(matches!(ph_split_mod(97, 35, 96, 3, 1, 1), Err(Error::InvalidInput(_))));
        assert!(matches!(ph_split_mod(97, 35, 96, 4, 1, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn cyclic_generator_examples() {
        assert_eq!(
            cyclic_generator_or_split_mod(91, &[(16, fi(&[(3, 1)])), (79, fi(&[(3, 1)]))]),
            Ok(PhOutcome::Divisor(13))
        );
        assert_eq!(
            cyclic_generator_or_split_mod(17, &[(4, fi(&[(2, 2)])), (2, fi(&[(2, 3)]))]),
            Ok(cyclic(2, &[(2, 3)]))
        );
        assert_eq!(cyclic_generator_or_split_mod(91, &[(3, fi(&[(2, 1), (3, 1)]))]), Ok(cyclic(3, &[(2, 1), (3, 1)])));
    }

    #[test]
    fn generator_generates_all_inputs_mod_prime() {
        let p = 97;
        let gens: Vec<_> = (2..12u64)
            .map(|b| {
                let o = order_of(&ModN::new(p), &b, &fi(&[(2, 5), (3, 1)])).unwrap();
                (b, o)
            })
            .collect();
        let PhOutcome::Cyclic { generator, order } = cyclic_generator_or_split_mod(p, &gens).unwrap() else {
            panic!("prime modulus cannot split");
        };
        let o = order.to_u64().unwrap();
        assert_eq!(o, 96);
        let powers: Vec<u64> = (0..o).map(|k| pow_mod(generator, k, p)).collect();
        for (b, _) in gens {
            assert!(powers.contains(&b));
        }
    }

    #[test]
    fn batched_first_hit_matches_linear_scan() {
        let g = ModN::new(1001);
        let table: Vec<u64> = (0..200).map(|j| (j * 37 + 5) % 1001).collect();
        for x in 0..1001u64 {
            let linear = table.iter().enumerate().find_map(|(j, t)| {
                let d = g.probe(&x, t);
                (d > 1).then_some((j, d))
            });
            assert_eq!(g.first_hit(&x, &table), linear);
        }
    }
}
