//! Finite fields `F_q`, `q = p^k`, backed by precomputed log/antilog tables.
//!
//! An element is identified by its canonical index: the coordinate vector
//! `(c_0, ..., c_{k-1})` in the power basis of the modulus root is read as the
//! base-`p` integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. Comparing indices is
//! the canonical element order (lexicographic, most significant coordinate last),
//! which fixes the choice of default modulus and of the generator.

use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arith;

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{k} exceeds the table limit of {MAX_ORDER} elements")]
    TooLarge { p: u64, k: u32 },
    #[error("modulus must be a monic irreducible polynomial of degree {0} over F_p")]
    NotIrreducible(u32),
    #[error("inversion of zero")]
    InversionOfZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("invalid field element {0:?}")]
    BadElement(String),
}

/// An element of a particular [`Field`]. Cheap to copy; meaningless without its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElt {
    field: u64,
    index: u32,
}

impl FieldElt {
    /// Canonical index of the element (see module docs).
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }
}

/// The finite field `F_p[t]/(modulus)`. Immutable after construction.
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    id: u64,
    generator: u32,
    // exp[j] = index of g^j, 0 <= j < q-1
    exp: Vec<u32>,
    // log[x] = j with g^j = x; log[0] is unused
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    /// `F_{p^k}` with the default modulus: `x` for `k = 1`, otherwise the
    /// smallest monic irreducible of degree `k` in canonical order.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        let (p32, _) = check_size(p, k)?;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            default_modulus(p32, k)
        };
        Self::build(p32, k, modulus)
    }

    /// `F_{p^k}` with a caller-supplied monic modulus given by ascending coefficients.
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Self, FieldError> {
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let k = (modulus.len() - 1) as u32;
        let (p32, _) = check_size(p, k)?;
        if *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p32) {
            return Err(FieldError::NotIrreducible(k));
        }
        if k > 1 && !is_irreducible(p32, modulus) {
            return Err(FieldError::NotIrreducible(k));
        }
        Self::build(p32, k, modulus.to_vec())
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let q = p.pow(k);
        let mut hasher = DefaultHasher::new();
        (p, &modulus).hash(&mut hasher);
        let id = hasher.finish();

        let generator = find_generator(p, k, q, &modulus);
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for j in 0..q - 1 {
            exp.push(x);
            log[x as usize] = j;
            x = poly_mul_index(p, k, &modulus, x, generator);
        }
        debug_assert_eq!(x, 1);

        let mut field = Field {
            p,
            k,
            q,
            modulus,
            id,
            generator,
            exp,
            log,
            trace: Vec::new(),
        };
        field.trace = (0..q).map(|x| field.trace_slow(x)).collect();
        Ok(field)
    }

    fn trace_slow(&self, x: u32) -> u32 {
        if self.k == 1 {
            return x;
        }
        let mut acc = 0u32;
        let mut y = x;
        for _ in 0..self.k {
            acc = self.raw_add(acc, y);
            y = self.raw_pow(y, self.p as u64);
        }
        debug_assert!(acc < self.p, "trace left the prime subfield");
        acc
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Ascending coefficients of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn wrap(&self, index: u32) -> FieldElt {
        FieldElt {
            field: self.id,
            index,
        }
    }

    fn check(&self, x: FieldElt) -> Result<u32, FieldError> {
        if x.field != self.id {
            return Err(FieldError::FieldMismatch);
        }
        Ok(x.index)
    }

    /// Whether `x` was produced by this field.
    pub fn contains(&self, x: FieldElt) -> bool {
        x.field == self.id
    }

    pub fn zero(&self) -> FieldElt {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElt {
        self.wrap(1)
    }

    /// The smallest generator of `F_q^*` in canonical order.
    pub fn primitive_root(&self) -> FieldElt {
        self.wrap(self.generator)
    }

    /// Element from its canonical index.
    pub fn from_index(&self, index: u32) -> Result<FieldElt, FieldError> {
        if index >= self.q {
            return Err(FieldError::BadElement(index.to_string()));
        }
        Ok(self.wrap(index))
    }

    /// Element from its coordinate vector (missing high coordinates are zero).
    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElt, FieldError> {
        if coords.len() > self.k as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadElement(format!("{coords:?}")));
        }
        let index = coords.iter().rev().fold(0u32, |acc, &c| acc * self.p + c);
        Ok(self.wrap(index))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElt {
        self.wrap(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coords(&self, x: FieldElt) -> Vec<u32> {
        let mut idx = x.index;
        (0..self.k)
            .map(|_| {
                let c = idx % self.p;
                idx /= self.p;
                c
            })
            .collect()
    }

    /// Coordinates joined by `:`; for prime fields just the residue.
    pub fn format(&self, x: FieldElt) -> String {
        self.coords(x)
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(":")
    }

    /// Inverse of [`Field::format`]. Prime-field residues may be given as any integer.
    pub fn parse(&self, s: &str) -> Result<FieldElt, FieldError> {
        let bad = || FieldError::BadElement(s.to_string());
        if self.k == 1 && !s.contains(':') {
            let n: i64 = s.trim().parse().map_err(|_| bad())?;
            return Ok(self.from_int(n));
        }
        let coords = s
            .split(':')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        self.from_coords(&coords).map_err(|_| bad())
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElt> + '_ {
        (0..self.q).map(|i| self.wrap(i))
    }

    /// Nonzero elements ordered by discrete logarithm: `g^0, g^1, ...`.
    pub fn units_by_log(&self) -> impl Iterator<Item = FieldElt> + '_ {
        self.exp.iter().map(|&i| self.wrap(i))
    }

    pub fn add(&self, x: FieldElt, y: FieldElt) -> Result<FieldElt, FieldError> {
        Ok(self.wrap(self.raw_add(self.check(x)?, self.check(y)?)))
    }

    pub fn sub(&self, x: FieldElt, y: FieldElt) -> Result<FieldElt, FieldError> {
        let y = self.raw_neg(self.check(y)?);
        Ok(self.wrap(self.raw_add(self.check(x)?, y)))
    }

    pub fn neg(&self, x: FieldElt) -> Result<FieldElt, FieldError> {
        Ok(self.wrap(self.raw_neg(self.check(x)?)))
    }

    pub fn mul(&self, x: FieldElt, y: FieldElt) -> Result<FieldElt, FieldError> {
        Ok(self.wrap(self.raw_mul(self.check(x)?, self.check(y)?)))
    }

    pub fn inv(&self, x: FieldElt) -> Result<FieldElt, FieldError> {
        let x = self.check(x)?;
        if x == 0 {
            return Err(FieldError::InversionOfZero);
        }
        Ok(self.wrap(self.raw_inv(x)))
    }

    pub fn div(&self, x: FieldElt, y: FieldElt) -> Result<FieldElt, FieldError> {
        let y = self.inv(y)?;
        self.mul(x, y)
    }

    /// `x^e` for any integer exponent; negative exponents need `x != 0`.
    pub fn pow(&self, x: FieldElt, e: &BigInt) -> Result<FieldElt, FieldError> {
        let xi = self.check(x)?;
        if xi == 0 {
            return match e.sign() {
                num_bigint::Sign::Plus => Ok(self.zero()),
                num_bigint::Sign::NoSign => Ok(self.one()),
                num_bigint::Sign::Minus => Err(FieldError::InversionOfZero),
            };
        }
        let order = BigInt::from(self.q - 1);
        let r = e.mod_floor(&order).to_u64().expect("reduced exponent fits");
        Ok(self.wrap(self.raw_pow(xi, r)))
    }

    pub fn pow_i64(&self, x: FieldElt, e: i64) -> Result<FieldElt, FieldError> {
        self.pow(x, &BigInt::from(e))
    }

    /// Absolute trace `x + x^p + ... + x^{p^{k-1}}`, returned as a residue mod `p`.
    pub fn trace(&self, x: FieldElt) -> Result<u32, FieldError> {
        Ok(self.trace[self.check(x)? as usize])
    }

    /// Exponent `j` in `[0, q-2]` with `g^j = x`.
    pub fn dlog(&self, x: FieldElt) -> Result<u32, FieldError> {
        let xi = self.check(x)?;
        if xi == 0 {
            return Err(FieldError::LogOfZero);
        }
        Ok(self.log[xi as usize])
    }

    /// `g^j` for the fixed generator `g`.
    pub fn exp(&self, j: i64) -> FieldElt {
        self.wrap(self.exp[j.rem_euclid((self.q - 1) as i64) as usize])
    }

    // Index-level kernels shared with the character-sum enumerators.

    pub(crate) fn raw_add(&self, x: u32, y: u32) -> u32 {
        if self.k == 1 {
            let s = x + y;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut x, mut y) = (x, y);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        out
    }

    pub(crate) fn raw_neg(&self, x: u32) -> u32 {
        let mut x = x;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let c = x % self.p;
            out += ((self.p - c) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        out
    }

    pub(crate) fn raw_mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = self.log[x as usize] + self.log[y as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    pub(crate) fn raw_inv(&self, x: u32) -> u32 {
        let n = self.q - 1;
        let l = self.log[x as usize];
        self.exp[((n - l) % n) as usize]
    }

    pub(crate) fn raw_pow(&self, x: u32, e: u64) -> u32 {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = (self.q - 1) as u64;
        let l = self.log[x as usize] as u64;
        self.exp[((l * (e % n)) % n) as usize]
    }

    pub(crate) fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    pub(crate) fn trace_table(&self) -> &[u32] {
        &self.trace
    }
}

fn check_size(p: u64, k: u32) -> Result<(u32, u32), FieldError> {
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if !arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
    if q > MAX_ORDER as u128 {
        return Err(FieldError::TooLarge { p, k });
    }
    Ok((p as u32, q as u32))
}

// Polynomials over F_p as ascending coefficient vectors, used only during construction.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    let p64 = p as u64;
    let lead_inv = arith::mod_inv(m[dm] as u64, p64).expect("nonzero leading coefficient");
    while r.len() > dm {
        let c = (r.pop().unwrap() % p64) * lead_inv % p64;
        if c == 0 {
            continue;
        }
        let shift = r.len() - dm;
        for (j, &mj) in m[..dm].iter().enumerate() {
            r[shift + j] = (r[shift + j] + p64 * p64 - c * mj as u64 % p64) % p64;
        }
    }
    trim(r.into_iter().map(|c| (c % p64) as u32).collect())
}

fn index_to_coeffs(p: u32, k: u32, mut idx: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            c
        })
        .collect()
}

fn coeffs_to_index(p: u32, coeffs: &[u32]) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn poly_mul_index(p: u32, k: u32, modulus: &[u32], x: u32, y: u32) -> u32 {
    let a = index_to_coeffs(p, k, x);
    let b = index_to_coeffs(p, k, y);
    let mut prod = vec![0u64; 2 * k as usize];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    let r = poly_rem(p, &prod, modulus);
    coeffs_to_index(p, &r)
}

fn poly_pow_index(p: u32, k: u32, modulus: &[u32], x: u32, mut e: u64) -> u32 {
    let mut base = x;
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_index(p, k, modulus, acc, base);
        }
        base = poly_mul_index(p, k, modulus, base, base);
        e >>= 1;
    }
    acc
}

/// Trial division by every monic polynomial of degree at most `deg/2`.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut g = index_to_coeffs(p, d as u32, low);
            g.push(1);
            if poly_rem(p, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, k: u32) -> Vec<u32> {
    (0..p.pow(k))
        .map(|low| {
            let mut f = index_to_coeffs(p, k, low);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(p, f))
        .expect("an irreducible polynomial of every degree exists")
}

fn find_generator(p: u32, k: u32, q: u32, modulus: &[u32]) -> u32 {
    let order = (q - 1) as u64;
    let primes: Vec<u64> = arith::factorize(order)
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    (1..q)
        .find(|&g| {
            primes
                .iter()
                .all(|&l| poly_pow_index(p, k, modulus, g, order / l) != 1)
        })
        .expect("F_q^* is cyclic")
}

impl Field {
    /// `b * a^e` with the integer `a` lifted through the prime subfield.
    pub fn scale_by_prime_power(
        &self,
        b: FieldElt,
        a: u32,
        e: i64,
    ) -> Result<FieldElt, FieldError> {
        let a = self.from_int(a as i64);
        let ae = self.pow(a, &BigInt::from(e))?;
        self.mul(b, ae)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(5).unwrap();
        let (three, four, two) = (f.from_int(3), f.from_int(4), f.from_int(2));
        assert_eq!(f.mul(three, four).unwrap(), f.from_int(2));
        assert_eq!(f.inv(two).unwrap(), three);
        assert_eq!(f.inv(f.zero()), Err(FieldError::InversionOfZero));
        assert_eq!(f.pow_i64(two, -1).unwrap(), three);
        assert_eq!(f.pow_i64(f.zero(), -2), Err(FieldError::InversionOfZero));
        assert_eq!(f.pow_i64(f.zero(), 0).unwrap(), f.one());
        let big = BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        // 2 has order 4; the exponent is 2 mod 4
        assert_eq!(f.pow(two, &big).unwrap(), four);
    }

    #[test]
    fn f4_reduces_by_modulus() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let t = f.from_coords(&[0, 1]).unwrap();
        assert_eq!(f.mul(t, t).unwrap(), f.from_coords(&[1, 1]).unwrap());
    }

    #[test]
    fn trace_examples() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.trace(f7.from_int(3)).unwrap(), 3);
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(f4.trace(f4.from_coords(&[0, 1]).unwrap()).unwrap(), 1);
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(f9.trace(f9.from_coords(&[0, 1]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(Field::prime(5).unwrap().primitive_root().index(), 2);
        assert_eq!(Field::prime(7).unwrap().primitive_root().index(), 3);
        assert_eq!(Field::prime(2).unwrap().primitive_root().index(), 1);
        // t generates F_4^*
        assert_eq!(Field::new(2, 2).unwrap().primitive_root().index(), 2);
    }

    #[test]
    fn dlog_examples() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.dlog(f5.one()).unwrap(), 0);
        assert_eq!(f5.dlog(f5.from_int(4)).unwrap(), 2);
        assert_eq!(f5.dlog(f5.zero()), Err(FieldError::LogOfZero));
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.dlog(f7.from_int(6)).unwrap(), 3);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::prime(4).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Field::new(3, 0).unwrap_err(), FieldError::ZeroDegree);
        // x^2 + 1 = (x+1)^2 over F_2
        assert_eq!(
            Field::with_modulus(2, &[1, 0, 1]).unwrap_err(),
            FieldError::NotIrreducible(2)
        );
        assert!(matches!(
            Field::new(2, 40),
            Err(FieldError::TooLarge { .. })
        ));
    }

    #[test]
    fn mixing_fields_is_rejected() {
        let f5 = Field::prime(5).unwrap();
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f5.add(f5.one(), f7.one()), Err(FieldError::FieldMismatch));
    }

    #[test]
    fn custom_modulus_f9() {
        // x^2 + x + 2 is irreducible over F_3
        let f = Field::with_modulus(3, &[2, 1, 1]).unwrap();
        assert_eq!(f.q(), 9);
        let g = f.primitive_root();
        assert_eq!(f.pow_i64(g, 8).unwrap(), f.one());
        assert_ne!(f.pow_i64(g, 4).unwrap(), f.one());
    }

    #[test]
    fn format_and_parse() {
        let f = Field::new(3, 2).unwrap();
        let x = f.from_coords(&[2, 1]).unwrap();
        assert_eq!(f.format(x), "2:1");
        assert_eq!(f.parse("2:1").unwrap(), x);
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.parse("-1").unwrap(), f7.from_int(6));
        assert!(f7.parse("x").is_err());
    }

    #[test]
    fn invariants_on_small_fields() {
        for (p, k) in [(2, 1), (2, 3), (3, 3), (5, 2), (7, 1), (11, 1)] {
            let f = Field::new(p, k).unwrap();
            let g = f.primitive_root();
            for j in 0..(f.q() - 1) as i64 {
                let x = f.pow_i64(g, j).unwrap();
                assert_eq!(f.dlog(x).unwrap() as i64, j);
                assert_eq!(f.exp(j), x);
            }
            let els: Vec<_> = f.elements().collect();
            for &x in &els {
                let xp = f.pow_i64(x, p as i64).unwrap();
                assert_eq!(f.trace(xp).unwrap(), f.trace(x).unwrap());
                for &y in &els {
                    let s = f.add(x, y).unwrap();
                    assert_eq!(
                        f.trace(s).unwrap(),
                        (f.trace(x).unwrap() + f.trace(y).unwrap()) % f.p()
                    );
                    assert_eq!(f.sub(s, y).unwrap(), x);
                }
                for c in 0..f.p() {
                    let cx = f.mul(f.from_int(c as i64), x).unwrap();
                    assert_eq!(f.trace(cx).unwrap(), c * f.trace(x).unwrap() % f.p());
                }
            }
        }
    }
}
