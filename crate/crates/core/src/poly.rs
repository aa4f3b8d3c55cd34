//! Dense univariate polynomials over `Z`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith;

/// Polynomial with arbitrary-precision integer coefficients, ascending degree.
/// The leading coefficient is nonzero unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^d`.
    pub fn monomial(c: BigInt, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Quotient and remainder on division by a monic polynomial.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= d {
            return (IntPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in divisor.coeffs[..d].iter().enumerate() {
                rem[i - d + j] -= &c * dj;
            }
            quot[i - d] = c;
        }
        rem.truncate(d);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// `self / divisor` when the division is exact, for monic `divisor`.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.div_rem_monic(divisor);
        r.is_zero().then_some(q)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let unit = a.is_one();
            match i {
                0 => write!(f, "{a}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{a}*x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

fn cache() -> &'static RwLock<HashMap<usize, Arc<IntPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The `m`-th cyclotomic polynomial, by exact division of `x^m - 1` by `Φ_d`
/// for every proper divisor `d` of `m`. Results are memoized process-wide.
pub fn cyclotomic_poly(m: usize) -> Arc<IntPoly> {
    assert!(m >= 1, "cyclotomic polynomials are indexed from 1");
    if let Some(hit) = cache().read().unwrap().get(&m) {
        return hit.clone();
    }
    let mut acc = &IntPoly::monomial(BigInt::one(), m) - &IntPoly::one();
    for d in arith::divisors(m as u64) {
        let d = d as usize;
        if d == m {
            continue;
        }
        acc = acc
            .div_exact(&cyclotomic_poly(d))
            .expect("cyclotomic divisor chain divides exactly");
    }
    let phi = Arc::new(acc);
    cache().write().unwrap().insert(m, phi.clone());
    phi
}
