//! Galois orbits in `Q(ζ_p)` and algebraic degrees.
//!
//! `Gal(Q(ζ_p)/Q)` is `F_p^*` acting by `σ_a(ζ_p) = ζ_p^a`. Because the
//! extension is Galois, the degree of an element is the size of its orbit, so
//! degrees are computed by counting distinct conjugates rather than factoring.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::charsum::{CharSumError, IkFormula};
use crate::cyclo::CycInt;
use crate::poly::IntPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("expected a prime conductor, found {0}")]
    WrongConductor(usize),
    #[error("orbit polynomial has a non-integer coefficient at degree {0}")]
    NonIntegerCoefficients(usize),
    #[error("orbit polynomial does not vanish at the element")]
    NotARoot,
    #[error("{0} is not a unit of F_{1}")]
    BadUnit(i64, u32),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
}

/// The orbit of an element of `Z[ζ_p]` under `Gal(Q(ζ_p)/Q)`.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub base: CycInt,
    /// `conjugates[a - 1] = σ_a(base)` for `a = 1..p-1`.
    pub conjugates: Vec<CycInt>,
    pub distinct_count: usize,
    pub stabilizer_order: usize,
}

impl OrbitReport {
    /// One representative per distinct conjugate, in order of first appearance.
    pub fn distinct(&self) -> Vec<CycInt> {
        let mut seen = HashSet::new();
        self.conjugates
            .iter()
            .filter(|c| seen.insert(c.canonical_coeffs()))
            .cloned()
            .collect()
    }
}

fn prime_conductor(z: &CycInt) -> Result<usize, GaloisError> {
    let p = z.conductor();
    if !arith::is_prime(p as u64) {
        return Err(GaloisError::WrongConductor(p));
    }
    Ok(p)
}

pub fn conjugate_set(z: &CycInt) -> Result<OrbitReport, GaloisError> {
    let p = prime_conductor(z)?;
    let conjugates: Vec<CycInt> = (1..p as i64)
        .map(|a| z.galois(a).expect("units are coprime to p").canonical())
        .collect();
    let distinct_count = conjugates
        .iter()
        .map(CycInt::canonical_coeffs)
        .collect::<HashSet<_>>()
        .len();
    Ok(OrbitReport {
        base: z.clone(),
        stabilizer_order: (p - 1) / distinct_count,
        conjugates,
        distinct_count,
    })
}

/// Degree of `z` over `Q`. Scaling by a nonzero integer does not change it.
pub fn degree_of(z: &CycInt) -> Result<usize, GaloisError> {
    Ok(conjugate_set(z)?.distinct_count)
}

/// `∏ (x - c)` over the distinct conjugates `c` of `z`; checked to have integer
/// coefficients and to vanish at `z`.
pub fn min_poly(z: &CycInt) -> Result<IntPoly, GaloisError> {
    let p = prime_conductor(z)?;
    let orbit = conjugate_set(z)?;
    // coefficients in Z[ζ_p], ascending
    let mut acc = vec![CycInt::one(p)];
    for c in orbit.distinct() {
        let mut next = vec![CycInt::zero(p); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1].add_assign_ref(a);
            next[i] = &next[i] - &(&c * a);
        }
        acc = next;
    }
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(i, c)| c.as_integer().ok_or(GaloisError::NonIntegerCoefficients(i)))
        .collect::<Result<Vec<BigInt>, _>>()?;
    let poly = IntPoly::new(coeffs);

    let mut value = CycInt::zero(p);
    for c in poly.coeffs().iter().rev() {
        value = &(&value * z) + &CycInt::from_int(p, c.clone());
    }
    if !value.is_zero() {
        return Err(GaloisError::NotARoot);
    }
    Ok(poly)
}

/// `(p-1)/gcd(n+1, p-1)`: the degree bound for `IK_n(q,b)`, attained when `q = p`.
pub fn predicted_degree(p: u32, n: u32) -> u32 {
    let pm1 = (p - 1) as u64;
    (pm1 / arith::gcd(n as u64 + 1, pm1)) as u32
}

/// Does `σ_a(q(q-1) IK_n(q,b))` equal `q(q-1) IK_n(q, b a^{-(n+1)})`?
pub fn equivariance_check(
    formula: &IkFormula,
    b: crate::ff::FieldElt,
    a: i64,
) -> Result<bool, GaloisError> {
    let f = formula.field();
    let p = f.p();
    if a.rem_euclid(p as i64) == 0 {
        return Err(GaloisError::BadUnit(a, p));
    }
    let n = formula.n();
    let lhs = formula
        .scaled(b)?
        .value
        .galois(a)
        .map_err(CharSumError::from)?;
    let moved = f
        .scale_by_prime_power(b, a.rem_euclid(p as i64) as u32, -(n as i64 + 1))
        .map_err(CharSumError::from)?;
    let rhs = formula.scaled(moved)?.value;
    Ok(lhs == rhs)
}

/// Whether `d` divides `predicted_degree(p, n)`.
pub fn divides_prediction(d: usize, p: u32, n: u32) -> bool {
    d != 0 && (predicted_degree(p, n) as usize) % d == 0
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::charsum::SumContext;
    use crate::ff::Field;

    #[test]
    fn orbit_examples() {
        let five = CycInt::from_int(7, 5);
        let o = conjugate_set(&five).unwrap();
        assert_eq!((o.distinct_count, o.stabilizer_order), (1, 6));
        let z = CycInt::root_of_unity(3, 1);
        let o = conjugate_set(&z).unwrap();
        assert_eq!(o.distinct_count, 2);
        assert_eq!(o.conjugates[1], CycInt::root_of_unity(3, 2));
        assert_eq!(degree_of(&CycInt::zero(5)).unwrap(), 1);
        assert_eq!(
            degree_of(&CycInt::one(6)),
            Err(GaloisError::WrongConductor(6))
        );
    }

    #[test]
    fn degrees_of_inverted_sums() {
        let f7 = Arc::new(Field::prime(7).unwrap());
        let ctx = SumContext::new(f7.clone());
        let s = ctx.ik_formula(1).unwrap().scaled(f7.one()).unwrap();
        assert_eq!(degree_of(&s.value).unwrap(), 3);

        let f5 = Arc::new(Field::prime(5).unwrap());
        let ctx = SumContext::new(f5.clone());
        let s = ctx.ik_formula(1).unwrap().scaled(f5.one()).unwrap();
        assert_eq!(degree_of(&s.value).unwrap(), 2);
        let f3 = ctx.ik_formula(3).unwrap();
        for b in f5.units_by_log() {
            assert_eq!(degree_of(&f3.scaled(b).unwrap().value).unwrap(), 1);
        }
    }

    #[test]
    fn min_poly_examples() {
        assert_eq!(
            min_poly(&CycInt::from_int(5, -1)).unwrap(),
            IntPoly::from_i64(&[1, 1])
        );
        assert_eq!(
            min_poly(&CycInt::root_of_unity(3, 1)).unwrap(),
            IntPoly::from_i64(&[1, 1, 1])
        );
        let f5 = Arc::new(Field::prime(5).unwrap());
        let s = SumContext::new(f5.clone())
            .ik_formula(1)
            .unwrap()
            .scaled(f5.one())
            .unwrap();
        let mp = min_poly(&s.value).unwrap();
        assert_eq!(mp.degree(), Some(2));
        assert!(mp.is_monic());
    }

    #[test]
    fn equivariance_examples() {
        let f7 = Arc::new(Field::prime(7).unwrap());
        let formula = SumContext::new(f7.clone()).ik_formula(1).unwrap();
        assert!(equivariance_check(&formula, f7.one(), 1).unwrap());
        assert!(equivariance_check(&formula, f7.one(), 3).unwrap());
        assert_eq!(
            equivariance_check(&formula, f7.one(), 7),
            Err(GaloisError::BadUnit(7, 7))
        );

        let f9 = Arc::new(Field::new(3, 2).unwrap());
        let formula = SumContext::new(f9.clone()).ik_formula(2).unwrap();
        assert!(equivariance_check(&formula, f9.primitive_root(), 2).unwrap());
    }

    #[test]
    fn predicted_degrees() {
        assert_eq!(predicted_degree(7, 1), 3);
        assert_eq!(predicted_degree(5, 3), 1);
        assert_eq!(predicted_degree(31, 4), 6);
        assert_eq!(predicted_degree(2, 5), 1);
    }
}
