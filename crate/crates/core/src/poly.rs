//! Polynomials over `F_p`: squarefree decomposition, Berlekamp
//! factorization, Hensel lifting along a factor tree, and the base-`A`
//! reconstruction of divisors `bA + 1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::arith::{central_binomial, inv_mod, is_prime_u64, mul_mod};
use crate::error::{Error, Result};

/// Search cap for the auxiliary prime of [`base_a_split`].
pub const SMALL_PRIME_CAP: u64 = 1_000_000;

/// Largest `p^e` that [`hensel_lift`] handles.
pub const HENSEL_MODULUS_LIMIT: u64 = 1 << 62;

/// A polynomial over `F_p`, coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyModP {
    p: u64,
    coeffs: Vec<u64>,
}

impl PolyModP {
    /// Coefficients are reduced modulo `p`; `p` must be prime below `2^32`.
    pub fn new(p: u64, coeffs: &[u64]) -> Result<Self> {
        if p >= 1 << 32 || !is_prime_u64(p) {
            return Err(Error::InvalidInput(format!("{p} is not a prime below 2^32")));
        }
        Ok(Self::from_vec(p, coeffs.iter().map(|c| c % p).collect()))
    }

    /// From signed integer coefficients.
    pub fn from_ints(p: u64, coeffs: &[i128]) -> Result<Self> {
        let reduced: Vec<u64> = coeffs.iter().map(|c| c.rem_euclid(p as i128) as u64).collect();
        Self::new(p, &reduced)
    }

    fn from_vec(p: u64, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyModP { p, coeffs }
    }

    fn zero(p: u64) -> Self {
        PolyModP { p, coeffs: Vec::new() }
    }

    fn constant(p: u64, c: u64) -> Self {
        Self::from_vec(p, vec![c % p])
    }

    fn x(p: u64) -> Self {
        PolyModP { p, coeffs: vec![0, 1] }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p).expect("field element");
        self.scale(inv)
    }

    fn scale(&self, c: u64) -> Self {
        Self::from_vec(self.p, self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|i| (self.coeffs.get(i).unwrap_or(&0) + other.coeffs.get(i).unwrap_or(&0)) % self.p)
            .collect();
        Self::from_vec(self.p, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(self.p - 1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::from_vec(self.p, c)
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let mut rem = self.coeffs.clone();
        let dd = divisor.deg();
        if rem.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(divisor.leading(), p).expect("field element");
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dd], inv, p);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = (rem[i + j] + p - mul_mod(c, b, p)) % p;
            }
        }
        (Self::from_vec(p, quot), Self::from_vec(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s a + t b = g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::constant(p, 1), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::constant(p, 1));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            (r0, r1, s0, s1, t0, t1) = (r1, r, s1, s, t1, t);
        }
        let inv = inv_mod(r0.leading(), p).unwrap_or(1);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> Self {
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p)).collect();
        Self::from_vec(self.p, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut result = Self::constant(self.p, 1).rem(modulus);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        result
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_one()
    }

    // f(X) = g(X^p): returns g
    fn pth_root(&self) -> Self {
        let c = self.coeffs.iter().step_by(self.p as usize).copied().collect();
        Self::from_vec(self.p, c)
    }
}

impl fmt::Display for PolyModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, c) => write!(f, "{c}X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c}X^{i}")?,
            }
        }
        write!(f, " (mod {})", self.p)
    }
}

fn poly_order(a: &PolyModP, b: &PolyModP) -> Ordering {
    a.coeffs.len().cmp(&b.coeffs.len()).then_with(|| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()))
}

/// Squarefree decomposition of a monic polynomial: `f = prod g_i^{e_i}`.
pub fn squarefree_decomposition(f: &PolyModP) -> Vec<(PolyModP, u32)> {
    let p = f.p;
    let f = f.monic();
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let fp = f.derivative();
    if fp.is_zero() {
        for (g, e) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, e * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&fp);
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.deg() > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if c.deg() > 0 {
        for (g, e) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, e * p as u32));
        }
    }
    out
}

// Basis of {g : g^p = g mod f} from the null space of (Q - I)^T.
fn berlekamp_basis(f: &PolyModP) -> Vec<PolyModP> {
    let p = f.p;
    let n = f.deg();
    let xp = PolyModP::x(p).pow_mod(p, f);
    let mut rows = Vec::with_capacity(n);
    let mut cur = PolyModP::constant(p, 1);
    for _ in 0..n {
        let mut row = cur.coeffs.clone();
        row.resize(n, 0);
        rows.push(row);
        cur = cur.mul(&xp).rem(f);
    }
    // a[j][i] = Q[i][j] - delta_ij
    let mut a: Vec<Vec<u64>> = (0..n).map(|j| (0..n).map(|i| (rows[i][j] + p - u64::from(i == j)) % p).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..n).find(|&i| a[i][col] != 0) else { continue };
        a.swap(r, pr);
        let inv = inv_mod(a[r][col], p).expect("field element");
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..n {
            if i != r && a[i][col] != 0 {
                let factor = a[i][col];
                for j in 0..n {
                    a[i][j] = (a[i][j] + p - mul_mod(factor, a[r][j], p)) % p;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - a[row][fc]) % p;
            }
            PolyModP::from_vec(p, v)
        })
        .collect()
}

// Irreducible factors of a monic squarefree polynomial, deterministic
// search over s in F_p.
fn berlekamp_squarefree(f: &PolyModP) -> Vec<PolyModP> {
    let p = f.p;
    let basis = berlekamp_basis(f);
    let k = basis.len();
    let mut factors = vec![f.clone()];
    if k <= 1 {
        return factors;
    }
    for v in basis.iter().filter(|v| v.deg() > 0) {
        for s in 0..p {
            if factors.len() == k {
                break;
            }
            let shifted = v.sub(&PolyModP::constant(p, s));
            let mut next = Vec::with_capacity(factors.len() + 1);
            for h in factors {
                if h.deg() <= 1 {
                    next.push(h);
                    continue;
                }
                let g = h.gcd(&shifted);
                if g.deg() > 0 && g.deg() < h.deg() {
                    next.push(h.div_rem(&g).0.monic());
                    next.push(g);
                } else {
                    next.push(h);
                }
            }
            factors = next;
        }
        if factors.len() == k {
            break;
        }
    }
    factors
}

/// Complete factorization over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactorization {
    pub leading: u64,
    /// Monic irreducible factors with multiplicities, sorted by degree then coefficients.
    pub factors: Vec<(PolyModP, u32)>,
}

impl PolyFactorization {
    pub fn product(&self, p: u64) -> PolyModP {
        let mut acc = PolyModP::constant(p, self.leading);
        for (g, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(g);
            }
        }
        acc
    }
}

/// Berlekamp factorization into monic irreducibles with multiplicities.
pub fn berlekamp_factor(f: &PolyModP) -> Result<PolyFactorization> {
    if f.deg() == 0 {
        return Err(Error::InvalidInput("polynomial of degree < 1".into()));
    }
    let mut factors = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for h in berlekamp_squarefree(&g) {
            factors.push((h, e));
        }
    }
    factors.sort_by(|a, b| poly_order(&a.0, &b.0).then(a.1.cmp(&b.1)));
    let mut merged: Vec<(PolyModP, u32)> = Vec::with_capacity(factors.len());
    for (g, e) in factors {
        match merged.last_mut() {
            Some(last) if last.0 == g => last.1 += e,
            _ => merged.push((g, e)),
        }
    }
    Ok(PolyFactorization { leading: f.leading(), factors: merged })
}

// Dense integer polynomials modulo q = p^e; coefficients low degree first.
fn zq_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = ((c[i + j] as u128 + x as u128 * y as u128) % q as u128) as u64;
        }
    }
    c
}

fn zq_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn to_poly_mod_p(a: &[u64], p: u64) -> PolyModP {
    PolyModP::from_vec(p, a.iter().map(|c| c % p).collect())
}

// Lifts monic F = G H (mod p) with G, H monic and coprime to F = G H (mod p^e).
fn lift_pair(f: &[u64], g: &PolyModP, h: &PolyModP, p: u64, e: u32) -> (Vec<u64>, Vec<u64>) {
    let q = p.pow(e);
    let (_, _, t) = g.ext_gcd(h);
    let mut gl: Vec<u64> = g.coeffs.clone();
    let mut hl: Vec<u64> = h.coeffs.clone();
    let mut pk = p;
    for _ in 1..e {
        let prod = zq_mul(&gl, &hl, q);
        let len = f.len().max(prod.len());
        let diff: Vec<u64> = (0..len)
            .map(|i| {
                let a = *f.get(i).unwrap_or(&0) as u128;
                let b = *prod.get(i).unwrap_or(&0) as u128;
                ((a + q as u128 - b) % q as u128) as u64
            })
            .collect();
        debug_assert!(diff.iter().all(|c| c % pk == 0));
        let err = to_poly_mod_p(&diff.iter().map(|c| c / pk).collect::<Vec<_>>(), p);
        // G dH + H dG = err (mod p) with deg dG < deg G
        let dg = t.mul(&err).rem(g);
        let dh = err.sub(&h.mul(&dg)).div_rem(g).0;
        for (i, &c) in dg.coeffs.iter().enumerate() {
            gl[i] = ((gl[i] as u128 + c as u128 * pk as u128) % q as u128) as u64;
        }
        for (i, &c) in dh.coeffs.iter().enumerate() {
            hl[i] = ((hl[i] as u128 + c as u128 * pk as u128) % q as u128) as u64;
        }
        pk *= p;
    }
    (gl, hl)
}

fn lift_tree(f: &[u64], factors: &[PolyModP], p: u64, e: u32) -> Vec<Vec<u64>> {
    if factors.len() == 1 {
        return vec![f.to_vec()];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[PolyModP]| fs.iter().fold(PolyModP::constant(p, 1), |acc, g| acc.mul(g));
    let (g, h) = (prod(&factors[..mid]), prod(&factors[mid..]));
    let (gl, hl) = lift_pair(f, &g, &h, p, e);
    let mut out = lift_tree(&gl, &factors[..mid], p, e);
    out.extend(lift_tree(&hl, &factors[mid..], p, e));
    out
}

/// Lifts `f = prod u_i (mod p)` to `f = prod U_i (mod p^e)` with
/// `U_i = u_i (mod p)`. Returns the coefficient vectors of the `U_i`
/// reduced modulo `p^e`.
pub fn hensel_lift(f: &[i128], factors: &[PolyModP], p: u64, e: u32) -> Result<Vec<Vec<u64>>> {
    if !is_prime_u64(p) || p >= 1 << 32 {
        return Err(Error::InvalidInput(format!("{p} is not a prime below 2^32")));
    }
    if e == 0 {
        return Err(Error::InvalidInput("target exponent must be positive".into()));
    }
    let q = (p as u128).checked_pow(e).filter(|&q| q < HENSEL_MODULUS_LIMIT as u128).ok_or_else(|| {
        Error::UnsupportedWidth(format!("{p}^{e}"))
    })? as u64;
    if factors.is_empty() || factors.iter().any(|g| g.p != p || g.deg() == 0) {
        return Err(Error::InvalidInput("factors must be nonconstant polynomials mod p".into()));
    }
    let fq: Vec<u64> = zq_trim(f.iter().map(|c| c.rem_euclid(q as i128) as u64).collect());
    let fp = to_poly_mod_p(&fq, p);
    if fp.deg() + 1 != fq.len() || fp.is_zero() {
        return Err(Error::InvalidInput("p divides the leading coefficient".into()));
    }
    let product = factors.iter().fold(PolyModP::constant(p, 1), |acc, g| acc.mul(g));
    if product != fp {
        return Err(Error::InvalidInput("factors do not multiply to f modulo p".into()));
    }
    for i in 0..factors.len() {
        for j in (i + 1)..factors.len() {
            if factors[i].gcd(&factors[j]).deg() > 0 {
                return Err(Error::InvalidInput(format!("factors {i} and {j} are not coprime modulo {p}")));
            }
        }
    }
    let monic: Vec<PolyModP> = factors.iter().map(PolyModP::monic).collect();
    let lc_inv = inv_mod(fq.last().copied().unwrap_or(0), q)
        .map_err(|_| Error::InvalidInput("p divides the leading coefficient".into()))?;
    let f_monic: Vec<u64> = fq.iter().map(|&c| ((c as u128 * lc_inv as u128) % q as u128) as u64).collect();
    let lifted = lift_tree(&f_monic, &monic, p, e);

    // restore leading coefficients; the last factor absorbs the correction
    let mut out = Vec::with_capacity(lifted.len());
    let mut used = 1u64;
    let r = lifted.len();
    for (i, g) in lifted.into_iter().enumerate() {
        let c = if i + 1 < r {
            let c = factors[i].leading();
            used = mul_mod(used, c, q);
            c
        } else {
            let inv = inv_mod(used, q).map_err(|_| Error::InvalidInput("leading coefficients not units".into()))?;
            mul_mod(*fq.last().unwrap(), inv, q)
        };
        out.push(zq_trim(g.iter().map(|&x| mul_mod(x, c, q)).collect()));
    }
    Ok(out)
}

/// Base-`A` digits of `d`, least significant first.
fn base_digits(d: u64, a: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = d;
    while x > 0 {
        out.push(x % a);
        x /= a;
    }
    out
}

/// Recovers the `k` divisors `b_i A + 1` of `d` from the base-`A` digits of
/// `d`, read as the coefficients of `prod (b_i X + 1)`.
pub fn base_a_split(d: u64, a: u64, k: u32) -> Result<Vec<u64>> {
    if d < 2 || a < 2 || k == 0 {
        return Err(Error::InvalidInput(format!("base_a_split needs d >= 2, A >= 2, k >= 1 (got {d}, {a}, {k})")));
    }
    let lhs = BigUint::from(a).pow(k + 1);
    let rhs = central_binomial(k) * BigUint::from(d);
    if lhs <= rhs {
        return Err(Error::BoundViolation(format!("{a}^{} <= C({k}, {}) * {d}", k + 1, k / 2)));
    }
    let digits = base_digits(d, a);
    if digits.len() != k as usize + 1 || digits[0] != 1 {
        return Err(Error::Inconsistent(format!("digits of {d} in base {a} are {digits:?}, expected 1 + ... + a_{k} A^{k}")));
    }
    let g: Vec<i128> = digits.iter().map(|&c| c as i128).collect();
    let ak = digits[k as usize];

    let mut p = 2u64;
    let gp = loop {
        if p > SMALL_PRIME_CAP {
            return Err(Error::Domain(format!("no auxiliary prime below {SMALL_PRIME_CAP}")));
        }
        if is_prime_u64(p) && !ak.is_multiple_of(p) {
            let gp = PolyModP::from_ints(p, &g)?;
            if gp.is_squarefree() {
                break gp;
            }
        }
        p += 1;
    };

    let fact = berlekamp_factor(&gp)?;
    if fact.factors.iter().any(|(h, e)| h.deg() != 1 || *e != 1) {
        return Err(Error::Inconsistent(format!("{gp} does not split into distinct linear factors")));
    }
    let mut e = 1u32;
    let mut q = p as u128;
    while q <= d as u128 {
        q *= p as u128;
        e += 1;
    }
    let mut linear: Vec<PolyModP> = fact.factors.into_iter().map(|(h, _)| h).collect();
    linear[0] = linear[0].scale(fact.leading);
    let lifted = hensel_lift(&g, &linear, p, e)?;
    let q = q as u64;

    let mut out = Vec::with_capacity(lifted.len());
    for h in lifted {
        // h = c (X + r), with r = 1/b
        let c = h.get(1).copied().unwrap_or(0);
        let c_inv = inv_mod(c, q).map_err(|_| Error::Inconsistent("non-unit linear coefficient".into()))?;
        let r = mul_mod(h[0], c_inv, q);
        let b = inv_mod(r, q).map_err(|_| Error::Inconsistent(format!("root {r} not invertible modulo {q}")))?;
        let factor = (b as u128) * (a as u128) + 1;
        if factor > d as u128 {
            return Err(Error::Inconsistent(format!("recovered b = {b} gives a factor above {d}")));
        }
        out.push(factor as u64);
    }
    let product = out.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x as u128));
    if product != Some(d as u128) {
        return Err(Error::Inconsistent(format!("recovered {out:?} do not multiply to {d}")));
    }
    out.sort_unstable();
    Ok(out)
}
