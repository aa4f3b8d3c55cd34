//! Characters, Gauss sums, and Kloosterman sums over `F_q`.
//!
//! Values live in cyclotomic rings. Additive characters take values at conductor
//! `p`, multiplicative characters at conductor `q - 1`, and Gauss sums at the
//! common conductor `M = p(q - 1)`, where `ζ_p = ζ_M^{q-1}` and `ζ_{q-1} = ζ_M^p`.
//!
//! The inverted sum is available two ways: direct enumeration, and the
//! Gauss-sum expansion
//!
//! ```text
//! q(q-1) IK_n(q,b) = -(q-1)^{n+1} + (-1)^{n+1}
//!                    + Σ_{χ≠1} χ^{n+1}(-1) χ^{-1}(b) G(χ^{-(n+1)})^2 G(χ)^{n+1}
//! ```
//!
//! which is kept multiplied through by `q(q-1)` so everything stays in `Z[ζ_M]`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{CycInt, CycloError};
use crate::ff::{Field, FieldElt, FieldError};

/// Default cap on enumerated tuples for the brute-force paths.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Absolute slack allowed when comparing a numeric bound.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharSumError {
    #[error("the parameter b must be nonzero")]
    ZeroParameter,
    #[error("dimension n must be at least 1")]
    BadDimension,
    #[error("{tuples} tuples exceed the enumeration budget of {budget}")]
    BudgetExceeded { tuples: u128, budget: u64 },
    #[error("multiplicative character evaluated at zero")]
    CharAtZero,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// The multiplicative character `χ = ω^{-m}`, i.e. `χ(g^j) = ζ_{q-1}^{-m j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharSpec {
    group_order: u32,
    m_index: u32,
}

impl CharSpec {
    pub fn new(field: &Field, m: i64) -> Self {
        let group_order = field.q() - 1;
        CharSpec {
            group_order,
            m_index: m.rem_euclid(group_order as i64) as u32,
        }
    }

    pub fn trivial(field: &Field) -> Self {
        Self::new(field, 0)
    }

    pub fn m_index(self) -> u32 {
        self.m_index
    }

    pub fn is_trivial(self) -> bool {
        self.m_index == 0
    }

    /// `χ^e`.
    pub fn pow(self, e: i64) -> Self {
        let n = self.group_order as i64;
        CharSpec {
            group_order: self.group_order,
            m_index: (self.m_index as i64 * e.rem_euclid(n)).rem_euclid(n) as u32,
        }
    }
}

/// A sum together with the integer factor it has been multiplied by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumValue {
    pub value: CycInt,
    #[serde(serialize_with = "crate::ser::bigint_as_number")]
    pub scale: BigInt,
}

impl SumValue {
    pub fn unscaled(value: CycInt) -> Self {
        SumValue {
            value,
            scale: BigInt::one(),
        }
    }

    /// The mathematical quantity itself, dividing out the scale exactly.
    pub fn to_unscaled(&self) -> Option<CycInt> {
        if self.scale.is_one() {
            return Some(self.value.clone());
        }
        self.value.div_exact_int(&self.scale)
    }

    /// The value multiplied to the given scale; `target` must be a multiple of the current scale.
    pub fn at_scale(&self, target: &BigInt) -> Option<CycInt> {
        let (q, r) = num_integer::Integer::div_rem(target, &self.scale);
        r.is_zero().then(|| self.value.scale(&q))
    }
}

/// `q(q-1)` as a big integer.
pub fn formula_scale(field: &Field) -> BigInt {
    BigInt::from(field.q()) * BigInt::from(field.q() - 1)
}

/// `ψ(x) = ζ_p^{Tr x}`.
pub fn additive_char(field: &Field, x: FieldElt) -> Result<CycInt, CharSumError> {
    let t = field.trace(x)?;
    Ok(CycInt::root_of_unity(field.p() as usize, t as i64))
}

/// `χ(x)` at conductor `q - 1`.
pub fn mult_char(field: &Field, chi: CharSpec, x: FieldElt) -> Result<CycInt, CharSumError> {
    if !field.contains(x) {
        return Err(FieldError::FieldMismatch.into());
    }
    if x.is_zero() {
        return Err(CharSumError::CharAtZero);
    }
    let j = field.dlog(x)? as i64;
    let n = (field.q() - 1) as usize;
    Ok(CycInt::root_of_unity(n, -(chi.m_index as i64) * j))
}

/// `G(χ) = Σ_{x≠0} χ(x) ψ(x)` at conductor `p(q-1)`.
pub fn gauss_sum(field: &Field, chi: CharSpec) -> CycInt {
    let p = field.p() as u64;
    let n = (field.q() - 1) as u64;
    let m = p * n;
    let trace = field.trace_table();
    let mut counts = vec![0u64; m as usize];
    for (j, &x) in field.exp_table().iter().enumerate() {
        let add = n * trace[x as usize] as u64;
        let mul = p * (chi.m_index as u64 * j as u64 % n);
        counts[((add + m - mul) % m) as usize] += 1;
    }
    CycInt::from_counts(m as usize, &counts)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Classical,
    Inverted,
}

fn check_args(field: &Field, n: u32, b: FieldElt) -> Result<(), CharSumError> {
    if n == 0 {
        return Err(CharSumError::BadDimension);
    }
    if !field.contains(b) {
        return Err(FieldError::FieldMismatch.into());
    }
    if b.is_zero() {
        return Err(CharSumError::ZeroParameter);
    }
    Ok(())
}

/// Histogram over `F_p` of the traces hit by the enumeration; the free
/// coordinates are `x_1..x_n` and `x_{n+1} = b/(x_1⋯x_n)`.
fn enumerate(
    field: &Field,
    n: u32,
    b: FieldElt,
    budget: u64,
    kind: Kind,
) -> Result<Vec<u64>, CharSumError> {
    check_args(field, n, b)?;
    let group = (field.q() - 1) as u128;
    let tuples = group.checked_pow(n).unwrap_or(u128::MAX);
    if tuples > budget as u128 {
        return Err(CharSumError::BudgetExceeded { tuples, budget });
    }
    let p = field.p() as usize;
    let trace = field.trace_table();
    let weight: Vec<u32> = match kind {
        Kind::Classical => trace.to_vec(),
        Kind::Inverted => (0..field.q())
            .map(|s| {
                if s == 0 {
                    0
                } else {
                    trace[field.raw_inv(s) as usize]
                }
            })
            .collect(),
    };
    let lb = field.dlog(b)?;
    let n = n as usize;

    let hist = (0..group as u32)
        .into_par_iter()
        .map(|e1| {
            let mut hist = vec![0u64; p];
            walk(field, n, lb, e1, kind, &weight, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; p],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

/// All tuples with `x_1 = g^{e1}`.
fn walk(field: &Field, n: usize, lb: u32, e1: u32, kind: Kind, weight: &[u32], hist: &mut [u64]) {
    let group = field.q() - 1;
    let exp = field.exp_table();
    let mut e = vec![0u32; n];
    // sums[i] = x_1 + ... + x_{i+1}; logs[i] = log(x_1 ⋯ x_{i+1})
    let mut sums = vec![0u32; n];
    let mut logs = vec![0u32; n];
    e[0] = e1;
    sums[0] = exp[e1 as usize];
    logs[0] = e1;
    let refresh = |from: usize, e: &[u32], sums: &mut [u32], logs: &mut [u32]| {
        for j in from..n {
            sums[j] = field.raw_add(sums[j - 1], exp[e[j] as usize]);
            let l = logs[j - 1] + e[j];
            logs[j] = if l >= group { l - group } else { l };
        }
    };
    refresh(1, &e, &mut sums, &mut logs);
    loop {
        let last = (lb + group - logs[n - 1]) % group;
        let s = field.raw_add(sums[n - 1], exp[last as usize]);
        if kind == Kind::Classical || s != 0 {
            hist[weight[s as usize] as usize] += 1;
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            e[i] += 1;
            if e[i] < group {
                break;
            }
            e[i] = 0;
            i -= 1;
        }
        refresh(i, &e, &mut sums, &mut logs);
    }
}

/// `K_n(q,b) = Σ ψ(x_1 + … + x_n + b/(x_1⋯x_n))` by enumeration.
pub fn kloosterman_brute(
    field: &Field,
    n: u32,
    b: FieldElt,
    budget: u64,
) -> Result<SumValue, CharSumError> {
    let hist = enumerate(field, n, b, budget, Kind::Classical)?;
    Ok(SumValue::unscaled(CycInt::from_counts(
        field.p() as usize,
        &hist,
    )))
}

/// `IK_n(q,b) = Σ ψ(1/(x_1 + … + x_{n+1}))` over `x_1⋯x_{n+1} = b` with nonzero
/// coordinate sum, by enumeration.
pub fn inverted_kloosterman_brute(
    field: &Field,
    n: u32,
    b: FieldElt,
    budget: u64,
) -> Result<SumValue, CharSumError> {
    let hist = enumerate(field, n, b, budget, Kind::Inverted)?;
    Ok(SumValue::unscaled(CycInt::from_counts(
        field.p() as usize,
        &hist,
    )))
}

/// A field together with its memoized Gauss sums.
pub struct SumContext {
    field: Arc<Field>,
    gauss: OnceLock<Vec<CycInt>>,
}

impl SumContext {
    pub fn new(field: Arc<Field>) -> Self {
        SumContext {
            field,
            gauss: OnceLock::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<Field> {
        self.field.clone()
    }

    /// `p(q-1)`.
    pub fn conductor(&self) -> usize {
        self.field.p() as usize * (self.field.q() - 1) as usize
    }

    /// `G(ω^{-m})` for every `m` in `[0, q-2]`, computed once.
    pub fn gauss_sums(&self) -> &[CycInt] {
        self.gauss.get_or_init(|| {
            let f = &*self.field;
            (0..f.q() - 1)
                .into_par_iter()
                .map(|m| gauss_sum(f, CharSpec::new(f, m as i64)).canonical())
                .collect()
        })
    }

    pub fn gauss(&self, chi: CharSpec) -> &CycInt {
        &self.gauss_sums()[chi.m_index as usize]
    }

    /// Precompute the `b`-independent part of the Gauss-sum expansion for dimension `n`.
    pub fn ik_formula(&self, n: u32) -> Result<IkFormula, CharSumError> {
        if n == 0 {
            return Err(CharSumError::BadDimension);
        }
        let f = &*self.field;
        let group = (f.q() - 1) as i64;
        let p = f.p() as i64;
        let big_m = self.conductor();
        let e = n as i64 + 1;
        let neg_one = f.neg(f.one())?;
        let log_neg_one = f.dlog(neg_one)? as i64;

        let mut constant: BigInt = -Pow::pow(BigInt::from(group), e as u32);
        constant += if e % 2 == 0 { 1 } else { -1 };

        let terms = (1..group)
            .into_par_iter()
            .map(|m| {
                let chi = CharSpec::new(f, m);
                let chi_e = chi.pow(e);
                // χ^{n+1}(-1) as a power of ζ_{q-1}, moved to conductor M
                let sign_shift = -p * ((chi_e.m_index as i64 * log_neg_one) % group);
                let g_inv = self.gauss(chi.pow(-e));
                let g = self.gauss(chi);
                let t = &(g_inv * g_inv) * &g.pow(e as u32);
                t.mul_root(sign_shift)
            })
            .collect();
        Ok(IkFormula {
            field: self.field.clone(),
            n,
            conductor: big_m,
            constant,
            terms,
        })
    }
}

/// The Gauss-sum expansion of `q(q-1) IK_n(q, ·)` for one `(F_q, n)`.
pub struct IkFormula {
    field: Arc<Field>,
    n: u32,
    conductor: usize,
    constant: BigInt,
    // terms[m-1] = χ^{n+1}(-1) G(χ^{-(n+1)})^2 G(χ)^{n+1} for χ = ω^{-m}
    terms: Vec<CycInt>,
}

impl IkFormula {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `q(q-1) IK_n(q,b)` at conductor `p(q-1)`.
    pub fn scaled_full(&self, b: FieldElt) -> Result<CycInt, CharSumError> {
        let f = &*self.field;
        check_args(f, self.n, b)?;
        let p = f.p() as usize;
        let lb = f.dlog(b)? as usize;
        let group = (f.q() - 1) as usize;
        let mut acc = CycInt::from_int(self.conductor, self.constant.clone());
        for (i, t) in self.terms.iter().enumerate() {
            let m = i + 1;
            // χ^{-1}(b) = ζ_{q-1}^{m log b} = ζ_M^{p m log b}
            acc.add_rotated(t, p * (m * lb % group) % self.conductor);
        }
        Ok(acc)
    }

    /// `q(q-1) IK_n(q,b)` brought down to conductor `p`.
    pub fn scaled(&self, b: FieldElt) -> Result<SumValue, CharSumError> {
        let full = self.scaled_full(b)?;
        let value = full.descend(self.field.p() as usize)?;
        Ok(SumValue {
            value,
            scale: formula_scale(&self.field),
        })
    }
}

/// `q(q-1) IK_n(q,b)` via the Gauss-sum expansion.
pub fn ik_formula_scaled(field: Arc<Field>, n: u32, b: FieldElt) -> Result<SumValue, CharSumError> {
    SumContext::new(field).ik_formula(n)?.scaled(b)
}

/// Recompute `q(q-1) S_1`, the `u = 0` slice of the orthogonality expansion,
/// from its definition for every `b`, and compare it with `-(q-1)^{n+1}`.
///
/// `q(q-1) S_1 = Σ_λ ψ(1/λ) · Σ_χ χ^{-1}(b) (Σ_x χ(x))^{n+1}`.
pub fn s1_identity_check(field: &Field, n: u32) -> Result<bool, CharSumError> {
    if n == 0 {
        return Err(CharSumError::BadDimension);
    }
    let p = field.p() as usize;
    let group = (field.q() - 1) as usize;
    let big_m = p * group;

    let mut psi_sum = CycInt::zero(p);
    for lambda in field.units_by_log() {
        psi_sum.add_assign_ref(&additive_char(field, field.inv(lambda)?)?);
    }
    let psi_sum = psi_sum.change_conductor(big_m)?;

    let powers: Vec<CycInt> = (0..group as i64)
        .map(|m| {
            let chi = CharSpec::new(field, m);
            let mut s = CycInt::zero(group);
            for x in field.units_by_log() {
                s.add_assign_ref(&mult_char(field, chi, x)?);
            }
            Ok(s.pow(n + 1))
        })
        .collect::<Result<_, CharSumError>>()?;

    let expected = CycInt::from_int(big_m, -Pow::pow(BigInt::from(group), n + 1));
    for b in field.units_by_log() {
        let mut char_part = CycInt::zero(group);
        for (m, pw) in powers.iter().enumerate() {
            let chi_inv = CharSpec::new(field, -(m as i64));
            let w = mult_char(field, chi_inv, b)?;
            char_part.add_assign_ref(&(&w * pw));
        }
        let total = &psi_sum * &char_part.change_conductor(big_m)?;
        if total != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One embedding's worth of bound data.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub embedding: u64,
    pub lhs1: f64,
    pub rhs1: f64,
    pub ok1: bool,
    pub lhs2: Option<f64>,
    pub rhs2: Option<f64>,
    pub ok2: Option<bool>,
}

/// Both estimates on `IK_n(q,b)` evaluated at every complex embedding.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: u32,
    pub n: u32,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok1 && r.ok2.unwrap_or(true))
    }

    pub fn second_bound_applies(&self) -> bool {
        self.rows.first().is_some_and(|r| r.lhs2.is_some())
    }

    /// Largest left side of the first bound over all embeddings.
    pub fn max_lhs1(&self) -> f64 {
        self.rows.iter().map(|r| r.lhs1).fold(0.0, f64::max)
    }

    pub fn max_lhs2(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| r.lhs2)
            .try_fold(0.0, |a: f64, x| x.map(|x| a.max(x)))
    }

    pub fn rhs1(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.rhs1)
    }

    pub fn rhs2(&self) -> Option<f64> {
        self.rows.first().and_then(|r| r.rhs2)
    }
}

/// Check `|IK + (q-1)^n/q| ≤ q^{(n+1)/2}` and, when `p ∤ n+1`,
/// `|IK + ((q-1)^n - (-1)^n (q+1))/q| ≤ 2n q^{n/2}` at each embedding.
///
/// The main terms are added exactly (at scale `q(q-1)`) before embedding, so
/// the floating-point cancellation happens only in the small remainder.
pub fn bounds_check(field: &Field, n: u32, ik: &SumValue) -> Result<BoundReport, CharSumError> {
    let q = field.q();
    let scale = formula_scale(field);
    let scaled = ik
        .at_scale(&scale)
        .ok_or(CharSumError::Cyclo(CycloError::Malformed(
            "scale does not divide q(q-1)".into(),
        )))?;
    let m = scaled.conductor();
    let qm1 = BigInt::from(q - 1);
    let main: BigInt = Pow::pow(qm1.clone(), n + 1);
    let first = &scaled + &CycInt::from_int(m, main.clone());
    let sign = if n % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let second_applies = (n + 1) % field.p() != 0;
    let second = second_applies.then(|| {
        let shift = &main - sign * BigInt::from(q + 1) * &qm1;
        &scaled + &CycInt::from_int(m, shift)
    });

    let qf = q as f64;
    let denom = qf * (qf - 1.0);
    let rhs1 = qf.powf((n as f64 + 1.0) / 2.0);
    let rhs2 = 2.0 * n as f64 * qf.powf(n as f64 / 2.0);

    let mut rows = Vec::new();
    for (j, e1) in first.embeddings() {
        let lhs1 = e1.value.norm() / denom;
        let ok1 = lhs1 <= rhs1 + BOUND_SLACK;
        let (lhs2, ok2) = match &second {
            Some(s) => {
                let lhs = s.embed_complex(j as i64)?.value.norm() / denom;
                (Some(lhs), Some(lhs <= rhs2 + BOUND_SLACK))
            }
            None => (None, None),
        };
        rows.push(BoundRow {
            embedding: j,
            lhs1,
            rhs1,
            ok1,
            lhs2,
            rhs2: second_applies.then_some(rhs2),
            ok2,
        });
    }
    Ok(BoundReport { q, n, rows })
}

/// `|K_n(q,b)| ≤ (n+1) q^{n/2}` at every embedding.
pub fn kloosterman_bound_holds(field: &Field, n: u32, k: &SumValue) -> bool {
    let rhs = (n as f64 + 1.0) * (field.q() as f64).powf(n as f64 / 2.0);
    let Some(v) = k.to_unscaled() else {
        return false;
    };
    v.embeddings()
        .iter()
        .all(|(_, e)| e.value.norm() <= rhs + BOUND_SLACK)
}
