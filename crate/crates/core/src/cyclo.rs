//! Exact arithmetic in `Z[ζ_m]`.
//!
//! A [`CycInt`] stores a length-`m` coefficient vector in the group ring
//! `Z[x]/(x^m - 1)`; coefficient `i` belongs to `ζ_m^i`. Several vectors
//! represent the same cyclotomic integer, so comparison and output first reduce
//! modulo `Φ_m`, which leaves coefficients only on `ζ_m^0 .. ζ_m^{φ(m)-1}`.
//! Sums and differences of reduced vectors stay reduced; rotations (Galois maps,
//! multiplication by roots of unity, re-embedding) do not, and are reduced lazily.
//!
//! Multiplication reduces both operands, convolves, and reduces the product.
//! The kernels run in checked `i128` and fall back to [`BigInt`] on overflow.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith;
use crate::poly::{cyclotomic_poly, IntPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(usize, usize),
    #[error("index {index} is not coprime to the conductor {conductor}")]
    NonCoprimeIndex { index: i64, conductor: usize },
    #[error("conductor {from} cannot be re-embedded at conductor {to}")]
    BadConductor { from: usize, to: usize },
    #[error("value does not lie in Q(ζ_{0})")]
    NotInSubfield(usize),
    #[error("malformed cyclotomic integer: {0}")]
    Malformed(String),
}

/// Reduction data for one conductor.
struct Ring {
    phi: usize,
    // nonzero non-leading coefficients of Φ_m as (exponent, coefficient)
    tail: Vec<(usize, BigInt)>,
    tail_small: Vec<(usize, i128)>,
}

fn ring(m: usize) -> Arc<Ring> {
    static RINGS: OnceLock<RwLock<HashMap<usize, Arc<Ring>>>> = OnceLock::new();
    let rings = RINGS.get_or_init(Default::default);
    if let Some(r) = rings.read().unwrap().get(&m) {
        return r.clone();
    }
    let poly = cyclotomic_poly(m);
    let phi = poly.degree().unwrap();
    let tail: Vec<(usize, BigInt)> = poly.coeffs()[..phi]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect();
    let tail_small = tail
        .iter()
        .map(|(i, c)| (*i, c.to_i128().expect("cyclotomic coefficient fits i128")))
        .collect();
    let r = Arc::new(Ring {
        phi,
        tail,
        tail_small,
    });
    rings.write().unwrap().insert(m, r.clone());
    r
}

fn to_small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(ToPrimitive::to_i128).collect()
}

fn to_big(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// Reduce `v` modulo `Φ` in place; afterwards only `v[..phi]` can be nonzero.
fn reduce_small(v: &mut [i128], ring: &Ring) -> Option<()> {
    let phi = ring.phi;
    for i in (phi..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        v[i] = 0;
        let base = i - phi;
        for &(j, a) in &ring.tail_small {
            v[base + j] = v[base + j].checked_sub(c.checked_mul(a)?)?;
        }
    }
    Some(())
}

fn reduce_big(v: &mut [BigInt], ring: &Ring) {
    let phi = ring.phi;
    for i in (phi..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        let base = i - phi;
        for (j, a) in &ring.tail {
            v[base + j] -= &c * a;
        }
    }
}

/// Reduce modulo `Φ_m`; returns exactly `phi(m)` coefficients.
fn reduce(v: &[BigInt], m: usize) -> Vec<BigInt> {
    let r = ring(m);
    if v[r.phi.min(v.len())..].iter().all(Zero::is_zero) {
        let mut out = v[..r.phi.min(v.len())].to_vec();
        out.resize(r.phi, BigInt::zero());
        return out;
    }
    if let Some(mut small) = to_small(v) {
        if reduce_small(&mut small, &r).is_some() {
            small.truncate(r.phi);
            return to_big(&small);
        }
    }
    let mut big = v.to_vec();
    reduce_big(&mut big, &r);
    big.truncate(r.phi);
    big
}

fn convolve_small(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
            }
        }
    }
    Some(out)
}

fn convolve_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// A complex embedding value with an a-priori bound on its floating-point error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Embedding {
    pub value: Complex64,
    pub error: f64,
}

/// An element of `Z[ζ_m]`.
#[derive(Clone, Debug)]
pub struct CycInt {
    conductor: usize,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "conductor must be positive");
        CycInt {
            conductor: m,
            coeffs: vec![BigInt::zero(); m],
        }
    }

    pub fn one(m: usize) -> Self {
        Self::from_int(m, BigInt::one())
    }

    pub fn from_int(m: usize, c: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = c.into();
        z
    }

    /// `ζ_m^e`.
    pub fn root_of_unity(m: usize, e: i64) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[e.rem_euclid(m as i64) as usize] = BigInt::one();
        z
    }

    /// From group-ring coefficients; entries beyond `m` wrap around (`x^m = 1`).
    pub fn from_coeffs(m: usize, coeffs: Vec<BigInt>) -> Self {
        let mut z = Self::zero(m);
        for (i, c) in coeffs.into_iter().enumerate() {
            z.coeffs[i % m] += c;
        }
        z
    }

    pub fn from_i64(m: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(m, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `Σ counts[i] ζ_m^i`.
    pub fn from_counts(m: usize, counts: &[u64]) -> Self {
        Self::from_coeffs(m, counts.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    /// Raw group-ring coefficients (not necessarily reduced).
    pub fn raw_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficients of the canonical form: exactly `φ(m)` entries.
    pub fn canonical_coeffs(&self) -> Vec<BigInt> {
        reduce(&self.coeffs, self.conductor)
    }

    /// The same element with its vector reduced modulo `Φ_m`.
    pub fn canonical(&self) -> Self {
        let mut coeffs = self.canonical_coeffs();
        coeffs.resize(self.conductor, BigInt::zero());
        CycInt {
            conductor: self.conductor,
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.canonical_coeffs().iter().all(Zero::is_zero)
    }

    /// The integer this element equals, if it is rational.
    pub fn as_integer(&self) -> Option<BigInt> {
        let c = self.canonical_coeffs();
        c[1..].iter().all(Zero::is_zero).then(|| c[0].clone())
    }

    fn check(&self, other: &CycInt) -> Result<(), CycloError> {
        if self.conductor != other.conductor {
            return Err(CycloError::ConductorMismatch(
                self.conductor,
                other.conductor,
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &CycInt) -> Result<CycInt, CycloError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &CycInt) -> Result<CycInt, CycloError> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &CycInt) -> Result<CycInt, CycloError> {
        self.check(other)?;
        let m = self.conductor;
        let a = self.canonical_coeffs();
        let b = other.canonical_coeffs();
        let r = ring(m);
        if let (Some(sa), Some(sb)) = (to_small(&a), to_small(&b)) {
            if let Some(mut prod) = convolve_small(&sa, &sb) {
                if reduce_small(&mut prod, &r).is_some() {
                    prod.resize(m, 0);
                    return Ok(CycInt {
                        conductor: m,
                        coeffs: to_big(&prod),
                    });
                }
            }
        }
        let mut prod = convolve_big(&a, &b);
        reduce_big(&mut prod, &r);
        prod.resize(m, BigInt::zero());
        Ok(CycInt {
            conductor: m,
            coeffs: prod,
        })
    }

    /// In-place `self += other`; conductors must agree.
    pub fn add_assign_ref(&mut self, other: &CycInt) {
        assert_eq!(self.conductor, other.conductor, "conductor mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    /// In-place `self += ζ_m^shift * other`.
    pub fn add_rotated(&mut self, other: &CycInt, shift: usize) {
        assert_eq!(self.conductor, other.conductor, "conductor mismatch");
        let m = self.conductor;
        for (i, b) in other.coeffs.iter().enumerate() {
            if !b.is_zero() {
                self.coeffs[(i + shift) % m] += b;
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> CycInt {
        CycInt {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Exact division by a nonzero integer, if every canonical coefficient is divisible.
    pub fn div_exact_int(&self, d: &BigInt) -> Option<CycInt> {
        if d.is_zero() {
            return None;
        }
        let coeffs = self.canonical_coeffs();
        let mut out = Vec::with_capacity(self.conductor);
        for c in &coeffs {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        out.resize(self.conductor, BigInt::zero());
        Some(CycInt {
            conductor: self.conductor,
            coeffs: out,
        })
    }

    /// `ζ_m^e * self`.
    pub fn mul_root(&self, e: i64) -> CycInt {
        let m = self.conductor;
        let s = e.rem_euclid(m as i64) as usize;
        let mut coeffs = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i + s) % m] = c.clone();
        }
        CycInt {
            conductor: m,
            coeffs,
        }
    }

    pub fn pow(&self, mut e: u32) -> CycInt {
        let mut base = self.canonical();
        let mut acc = CycInt::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The automorphism `ζ_m ↦ ζ_m^a`.
    pub fn galois(&self, a: i64) -> Result<CycInt, CycloError> {
        let m = self.conductor;
        let ar = a.rem_euclid(m as i64) as u64;
        if arith::gcd(ar, m as u64) != 1 && m > 1 {
            return Err(CycloError::NonCoprimeIndex {
                index: a,
                conductor: m,
            });
        }
        let mut coeffs = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(i as u64 * ar % m as u64) as usize] += c;
            }
        }
        Ok(CycInt {
            conductor: m,
            coeffs,
        })
    }

    /// Re-embed into `Z[ζ_M]` for a multiple `M` of the conductor, sending
    /// `ζ_m` to `ζ_M^{M/m}`.
    pub fn change_conductor(&self, big_m: usize) -> Result<CycInt, CycloError> {
        let m = self.conductor;
        if big_m == 0 || big_m % m != 0 {
            return Err(CycloError::BadConductor { from: m, to: big_m });
        }
        let step = big_m / m;
        let mut coeffs = vec![BigInt::zero(); big_m];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        Ok(CycInt {
            conductor: big_m,
            coeffs,
        })
    }

    /// Express this element at a smaller conductor `d` with `d | m` and
    /// `gcd(d, m/d) = 1`, inverting [`CycInt::change_conductor`].
    ///
    /// Uses `Z[ζ_m] = Z[ζ_d] ⊗ Z[ζ_e]` for `e = m/d`: the element is reduced in
    /// the `ζ_e` direction, and lies in `Q(ζ_d)` iff every component other than
    /// the `ζ_e^0` one vanishes.
    pub fn descend(&self, d: usize) -> Result<CycInt, CycloError> {
        let m = self.conductor;
        if d == 0 || m % d != 0 || arith::gcd(d as u64, (m / d) as u64) != 1 {
            return Err(CycloError::BadConductor { from: m, to: d });
        }
        let e = m / d;
        if e == 1 {
            return Ok(self.clone());
        }
        // ζ_m^k = ζ_d^{k e^{-1} mod d} · ζ_e^{k d^{-1} mod e}
        let inv_e = arith::mod_inv(e as u64 % d as u64, d as u64).unwrap_or(0) as usize;
        let inv_d = arith::mod_inv(d as u64 % e as u64, e as u64).unwrap() as usize;
        let mut rows = vec![vec![BigInt::zero(); d]; e];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sd = k * inv_e % d;
            let se = k * inv_d % e;
            rows[se][sd] += c;
        }
        let r = ring(e);
        for i in (r.phi..e).rev() {
            let row = std::mem::take(&mut rows[i]);
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            let base = i - r.phi;
            for (j, a) in &r.tail {
                for (dst, src) in rows[base + j].iter_mut().zip(&row) {
                    *dst -= src * a;
                }
            }
        }
        for row in &rows[1..r.phi] {
            let z = CycInt {
                conductor: d,
                coeffs: row.clone(),
            };
            if !z.is_zero() {
                return Err(CycloError::NotInSubfield(d));
            }
        }
        Ok(CycInt {
            conductor: d,
            coeffs: rows.swap_remove(0),
        })
    }

    /// Evaluate at `ζ_m ↦ exp(2πi j/m)`.
    pub fn embed_complex(&self, j: i64) -> Result<Embedding, CycloError> {
        let m = self.conductor;
        let jr = j.rem_euclid(m as i64) as u64;
        if arith::gcd(jr, m as u64) != 1 && m > 1 {
            return Err(CycloError::NonCoprimeIndex {
                index: j,
                conductor: m,
            });
        }
        let coeffs = self.canonical_coeffs();
        let mut value = Complex64::new(0.0, 0.0);
        let mut l1 = 0.0f64;
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64().unwrap_or(f64::INFINITY);
            l1 += cf.abs();
            let theta = 2.0 * PI * ((i as u64 * jr) % m as u64) as f64 / m as f64;
            value += Complex64::from_polar(cf, theta);
        }
        let error = l1 * (coeffs.len() as f64 + 4.0) * f64::EPSILON;
        Ok(Embedding { value, error })
    }

    /// All embeddings `j = 1..m` with `gcd(j, m) = 1`, paired with `j`.
    pub fn embeddings(&self) -> Vec<(u64, Embedding)> {
        let m = self.conductor as u64;
        (1..=m.max(1))
            .filter(|&j| arith::gcd(j, m) == 1)
            .map(|j| (j, self.embed_complex(j as i64).unwrap()))
            .collect()
    }

    /// The coefficient polynomial of the canonical form.
    pub fn to_poly(&self) -> IntPoly {
        IntPoly::new(self.canonical_coeffs())
    }

    /// `{"m": m, "coeffs": [...]}` with the canonical coefficients.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .canonical_coeffs()
            .iter()
            .map(|c| Value::Number(serde_json::Number::from_str(&c.to_string()).unwrap()))
            .collect();
        json!({ "m": self.conductor, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<CycInt, CycloError> {
        let bad = || CycloError::Malformed(v.to_string());
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        if m == 0 {
            return Err(bad());
        }
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| match c {
                Value::Number(n) => BigInt::from_str(&n.to_string()).map_err(|_| bad()),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() > m {
            return Err(bad());
        }
        Ok(CycInt::from_coeffs(m, coeffs))
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor && self.canonical_coeffs() == other.canonical_coeffs()
    }
}

impl Eq for CycInt {}

impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

// Operators panic on conductor mismatch; use the checked_* methods to get an error.

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.checked_add(rhs).unwrap()
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.checked_sub(rhs).unwrap()
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.checked_mul(rhs).unwrap()
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Number of embeddings `j` coprime to `m` (i.e. `φ(m)`).
pub fn degree_of_field(m: usize) -> usize {
    ring(m).phi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: usize, v: &[i64]) -> CycInt {
        CycInt::from_i64(m, v)
    }

    fn canon(z: &CycInt) -> Vec<i64> {
        z.canonical_coeffs()
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn arithmetic_examples() {
        let z3 = CycInt::root_of_unity(3, 1);
        let z3sq = CycInt::root_of_unity(3, 2);
        assert_eq!(canon(&(&z3 + &z3sq)), vec![-1, 0]);

        let i = CycInt::root_of_unity(4, 1);
        assert_eq!(canon(&(&i * &i)), vec![-1, 0]);

        // (1 + ζ)(1 + ζ^4) = 2 + ζ + ζ^4 = 1 - ζ^2 - ζ^3 in Z[ζ_5]
        let a = c(5, &[1, 1]);
        let b = c(5, &[1, 0, 0, 0, 1]);
        assert_eq!(canon(&(&a * &b)), vec![1, 0, -1, -1]);
    }

    #[test]
    fn conductor_mismatch_is_an_error() {
        let a = CycInt::one(3);
        let b = CycInt::one(5);
        assert_eq!(a.checked_add(&b), Err(CycloError::ConductorMismatch(3, 5)));
        assert_eq!(a.checked_mul(&b), Err(CycloError::ConductorMismatch(3, 5)));
        let a15 = a.change_conductor(15).unwrap();
        let b15 = b.change_conductor(15).unwrap();
        assert_eq!(canon(&(&a15 * &b15)), canon(&CycInt::one(15)));
        assert!(a.change_conductor(10).is_err());
    }

    #[test]
    fn galois_examples() {
        let z = c(7, &[3, 1, 0, 5]);
        assert_eq!(z.galois(1).unwrap(), z);
        assert_eq!(
            canon(&CycInt::root_of_unity(3, 1).galois(2).unwrap()),
            vec![-1, -1]
        );
        let w = c(5, &[0, 1, 0, 0, 1]).galois(2).unwrap();
        assert_eq!(w, c(5, &[0, 0, 1, 1]));
        assert!(matches!(
            z.galois(7),
            Err(CycloError::NonCoprimeIndex { .. })
        ));
    }

    #[test]
    fn embedding_examples() {
        let e = CycInt::from_int(12, 7).embed_complex(5).unwrap();
        assert!((e.value - Complex64::new(7.0, 0.0)).norm() < 1e-12);
        let e = CycInt::root_of_unity(4, 1).embed_complex(1).unwrap();
        assert!((e.value - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let e = c(3, &[0, 1, -1]).embed_complex(1).unwrap();
        assert!((e.value - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        assert!(CycInt::one(6).embed_complex(3).is_err());
    }

    #[test]
    fn cyclotomic_relation_vanishes() {
        for m in 1..=200usize {
            let phi = cyclotomic_poly(m);
            let z = CycInt::from_coeffs(m, phi.coeffs().to_vec());
            assert!(z.is_zero(), "Φ_{m}(ζ_{m}) != 0");
        }
    }

    #[test]
    fn descend_round_trip() {
        // 5 ζ_7^3 - 2 embedded at conductor 42 and brought back
        let z = c(7, &[-2, 0, 0, 5]);
        let up = z.change_conductor(42).unwrap();
        assert_eq!(up.descend(7).unwrap(), z);
        // ζ_6 is not in Q(ζ_7)
        let w = CycInt::root_of_unity(6, 1).change_conductor(42).unwrap();
        assert_eq!(w.descend(7), Err(CycloError::NotInSubfield(7)));
        // rational after cancellation: ζ_6 + ζ_6^5 = 1
        let r = c(6, &[0, 1, 0, 0, 0, 1]).change_conductor(42).unwrap();
        assert_eq!(r.descend(7).unwrap(), CycInt::one(7));
        assert_eq!(up.descend(14).unwrap(), z.change_conductor(14).unwrap());
        assert_eq!(up.descend(6), Err(CycloError::NotInSubfield(6)));
        assert!(matches!(
            up.descend(5),
            Err(CycloError::BadConductor { .. })
        ));
    }

    #[test]
    fn big_coefficients_fall_back_to_bigint() {
        let big: BigInt = BigInt::from(i128::MAX) * 4;
        let z = CycInt::from_coeffs(5, vec![big.clone(), BigInt::one()]);
        let sq = &z * &z;
        // (B + ζ)^2 = B^2 + 2Bζ + ζ^2
        let expect = CycInt::from_coeffs(5, vec![&big * &big, &big * 2, BigInt::one()]);
        assert_eq!(sq, expect);
    }

    #[test]
    fn json_round_trip() {
        let z = c(5, &[1, 0, -1, -1]);
        assert_eq!(z.to_json().to_string(), r#"{"m":5,"coeffs":[1,0,-1,-1]}"#);
        let big = CycInt::from_coeffs(3, vec!["123456789012345678901234567890".parse().unwrap()]);
        assert_eq!(CycInt::from_json(&big.to_json()).unwrap(), big);
        assert!(CycInt::from_json(&json!({"m": 0, "coeffs": []})).is_err());
    }

    #[test]
    fn exact_integer_division() {
        let z = c(5, &[6, -12, 0, 18]);
        assert_eq!(
            z.div_exact_int(&BigInt::from(6)).unwrap(),
            c(5, &[1, -2, 0, 3])
        );
        assert!(z.div_exact_int(&BigInt::from(5)).is_none());
    }
}
