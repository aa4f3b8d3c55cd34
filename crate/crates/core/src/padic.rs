//! Truncated arithmetic in `Z_p[π]/(π^N)` with `π^{p-1} = -p`.
//!
//! Every element has a unique expansion `Σ d_i π^i` with digits `d_i` in
//! `[0, p-1]`. Carries use `p = -π^{p-1}`: a carry `c` out of position `i`
//! lands as `-c` at position `i + p - 1`, so normalization is a single forward
//! pass. `v_π` is the index of the first nonzero digit.
//!
//! Cyclotomic integers of conductor dividing `p(p-1)` embed by sending `ζ_p` to
//! the root of unity `ζ ≡ 1 + π (mod π^2)` and `ζ_{p-1}` to the Teichmüller lift
//! of the generator of `F_p^*`; under this embedding the multiplicative
//! character `ω^{-m}` of `charsum` is the `-m`-th power of the Teichmüller character.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::charsum::{gauss_sum, CharSpec, CharSumError, IkFormula, SumContext};
use crate::cyclo::{CycInt, CycloError};
use crate::ff::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("operands differ in prime or precision")]
    PrecisionMismatch,
    #[error("residue must be a unit mod p")]
    ZeroParameter,
    #[error("precision {have} is below the required {need}")]
    PrecisionTooLow { have: usize, need: usize },
    #[error("conductor {0} does not divide p(p-1) = {1}")]
    UnsupportedConductor(usize, usize),
    #[error("all digits below π^{0} vanish")]
    PrecisionExhausted(usize),
    #[error("(p-1) divides (n+1)m for m = {0}")]
    DegenerateIndex(u32),
    #[error("invalid parameters: {0}")]
    DegenerateParameters(String),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// `4(p-1) + 8`.
pub fn default_precision(p: u32) -> usize {
    4 * (p as usize - 1) + 8
}

/// Largest precision the retry loop will try: `32(p-1)`.
pub fn max_precision(p: u32) -> usize {
    (32 * (p as usize - 1)).max(default_precision(p))
}

/// An element of `Z_p[π]/(π^N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicElt {
    p: u32,
    digits: Vec<u32>,
}

impl fmt::Debug for PadicElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicElt(p={}, {:?})", self.p, self.digits)
    }
}

/// Normalize raw positional coefficients into digits, keeping `n` positions.
fn normalize(p: u32, mut raw: Vec<i128>, n: usize) -> Vec<u32> {
    raw.resize(raw.len().max(n), 0);
    let pi = p as i128;
    let hop = p as usize - 1;
    let mut digits = vec![0u32; n];
    for i in 0..n {
        let c = raw[i];
        let r = c.rem_euclid(pi);
        digits[i] = r as u32;
        let carry = (c - r) / pi;
        if carry != 0 && i + hop < n {
            raw[i + hop] -= carry;
        }
    }
    digits
}

impl PadicElt {
    pub fn zero(p: u32, precision: usize) -> Self {
        PadicElt {
            p,
            digits: vec![0; precision],
        }
    }

    pub fn one(p: u32, precision: usize) -> Self {
        Self::from_i64(p, precision, 1)
    }

    /// `π` itself.
    pub fn pi(p: u32, precision: usize) -> Self {
        Self::monomial(p, precision, 1, 1)
    }

    /// `d π^i`.
    pub fn monomial(p: u32, precision: usize, d: i64, i: usize) -> Self {
        let mut raw = vec![0i128; precision.max(i + 1)];
        raw[i] = d as i128;
        PadicElt {
            p,
            digits: normalize(p, raw, precision),
        }
    }

    pub fn from_i64(p: u32, precision: usize, c: i64) -> Self {
        Self::from_int(p, precision, &BigInt::from(c))
    }

    /// The rational integer `c`; only positions divisible by `p - 1` are nonzero.
    pub fn from_int(p: u32, precision: usize, c: &BigInt) -> Self {
        let mut digits = vec![0u32; precision];
        let pb = BigInt::from(p);
        let hop = p as usize - 1;
        let mut c = c.clone();
        let mut i = 0;
        while i < precision && !c.is_zero() {
            let r = c.mod_floor(&pb);
            digits[i] = r.to_u32().unwrap();
            c = -((c - r) / &pb);
            i += hop;
        }
        PadicElt { p, digits }
    }

    /// From raw digits, normalizing any that are out of range.
    pub fn from_digits(p: u32, digits: &[i64]) -> Self {
        let raw = digits.iter().map(|&d| d as i128).collect();
        PadicElt {
            p,
            digits: normalize(p, raw, digits.len()),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// `v_π`, or `None` when every digit below the precision vanishes.
    pub fn valuation(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }

    /// Drop digits at and above `precision`.
    pub fn truncate(&self, precision: usize) -> Self {
        PadicElt {
            p: self.p,
            digits: self.digits[..precision.min(self.digits.len())].to_vec(),
        }
    }

    fn check(&self, other: &Self) -> Result<(), PadicError> {
        if self.p != other.p || self.digits.len() != other.digits.len() {
            return Err(PadicError::PrecisionMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        let raw = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| a as i128 + b as i128)
            .collect();
        Ok(PadicElt {
            p: self.p,
            digits: normalize(self.p, raw, self.precision()),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        let raw = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| a as i128 - b as i128)
            .collect();
        Ok(PadicElt {
            p: self.p,
            digits: normalize(self.p, raw, self.precision()),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        let n = self.precision();
        let mut raw = vec![0i128; n];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits[..n - i].iter().enumerate() {
                raw[i + j] += a as i128 * b as i128;
            }
        }
        Ok(PadicElt {
            p: self.p,
            digits: normalize(self.p, raw, n),
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = PadicElt::one(self.p, self.precision());
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
}

impl Add for &PadicElt {
    type Output = PadicElt;
    fn add(self, rhs: &PadicElt) -> PadicElt {
        self.checked_add(rhs).unwrap()
    }
}

impl Sub for &PadicElt {
    type Output = PadicElt;
    fn sub(self, rhs: &PadicElt) -> PadicElt {
        self.checked_sub(rhs).unwrap()
    }
}

impl Mul for &PadicElt {
    type Output = PadicElt;
    fn mul(self, rhs: &PadicElt) -> PadicElt {
        self.checked_mul(rhs).unwrap()
    }
}

impl Neg for &PadicElt {
    type Output = PadicElt;
    fn neg(self) -> PadicElt {
        let raw = self.digits.iter().map(|&d| -(d as i128)).collect();
        PadicElt {
            p: self.p,
            digits: normalize(self.p, raw, self.precision()),
        }
    }
}

fn check_prime(p: u32) -> Result<(), PadicError> {
    if !arith::is_prime(p as u64) {
        return Err(PadicError::NotPrime(p));
    }
    Ok(())
}

/// The Teichmüller lift of `a`: the `(p-1)`-th root of unity congruent to `a` mod `π`.
pub fn teichmuller(p: u32, a: u32, precision: usize) -> Result<PadicElt, PadicError> {
    check_prime(p)?;
    if a % p == 0 {
        return Err(PadicError::ZeroParameter);
    }
    let mut x = PadicElt::from_i64(p, precision, (a % p) as i64);
    // each x <- x^p step fixes at least one more base-p digit
    for _ in 0..=precision {
        let y = x.pow(p as u64);
        if y == x {
            return Ok(x);
        }
        x = y;
    }
    unreachable!("Teichmüller iteration converges within the precision")
}

fn binomial_row(p: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::from(1u32)];
    for k in 1..=p as usize {
        let prev = &row[k - 1];
        row.push(prev * BigInt::from(p as usize - k + 1) / BigInt::from(k));
    }
    row
}

/// The primitive `p`-th root of unity `ζ` with `ζ - 1 ≡ π (mod π^2)`.
///
/// Solves `Φ_p(1 + y) = 0` one digit at a time from `y = π`. Near the target
/// root the valuation of `f(y) = Φ_p(1 + y)` is `v(y - y_1) + p - 2`, and the
/// next digit of `y` is read off the leading digits of `f(y)` and `f'(y)`.
pub fn zeta_p_padic(p: u32, precision: usize) -> Result<PadicElt, PadicError> {
    check_prime(p)?;
    let need = 2 * (p as usize - 1);
    if precision < need {
        return Err(PadicError::PrecisionTooLow {
            have: precision,
            need,
        });
    }
    let work = precision + p as usize - 2;
    let binom = binomial_row(p);
    // f(y) = Σ_{k=1}^{p} C(p,k) y^{k-1};  f'(y) = Σ_{k=2}^{p} C(p,k)(k-1) y^{k-2}
    let f_coeffs: Vec<PadicElt> = (1..=p as usize)
        .map(|k| PadicElt::from_int(p, work, &binom[k]))
        .collect();
    let df_coeffs: Vec<PadicElt> = (2..=p as usize)
        .map(|k| PadicElt::from_int(p, work, &(&binom[k] * BigInt::from(k - 1))))
        .collect();
    let horner = |coeffs: &[PadicElt], y: &PadicElt| {
        coeffs
            .iter()
            .rev()
            .fold(PadicElt::zero(p, work), |acc, c| &(&acc * y) + c)
    };

    let mut y = PadicElt::pi(p, work);
    let lift = p as usize - 2;
    loop {
        let fy = horner(&f_coeffs, &y);
        let Some(v) = fy.valuation() else { break };
        let dfy = horner(&df_coeffs, &y);
        debug_assert_eq!(dfy.valuation(), Some(lift));
        let k = v - lift;
        let lead_f = fy.digits[v] as u64;
        let lead_df = dfy.digits[lift] as u64;
        let inv = arith::mod_inv(lead_df, p as u64).expect("derivative is a unit times π^(p-2)");
        let d = (p as u64 - lead_f * inv % p as u64) % p as u64;
        y = &y + &PadicElt::monomial(p, work, d as i64, k);
    }
    let zeta = (&y + &PadicElt::one(p, work)).truncate(precision);
    debug_assert!(zeta.pow(p as u64) == PadicElt::one(p, precision));
    Ok(zeta)
}

/// The ring map `Z[ζ_{p(p-1)}] → Z_p[π]/(π^N)`.
pub struct PadicEmbedding {
    p: u32,
    precision: usize,
    // images[e] = image of ζ_M^e, M = p(p-1)
    images: Vec<PadicElt>,
}

impl PadicEmbedding {
    /// Embedding for `F_p`, using its primitive root for `ζ_{p-1}`.
    pub fn new(field: &Field, precision: usize) -> Result<Self, PadicError> {
        if field.k() != 1 {
            return Err(PadicError::DegenerateParameters(
                "p-adic embedding needs a prime field".into(),
            ));
        }
        let p = field.p();
        let zeta = zeta_p_padic(p, precision)?;
        let teich = teichmuller(p, field.primitive_root().index(), precision)?;
        let mut zeta_pows = vec![PadicElt::one(p, precision)];
        for i in 1..p as usize {
            zeta_pows.push(&zeta_pows[i - 1] * &zeta);
        }
        let mut teich_pows = vec![PadicElt::one(p, precision)];
        for i in 1..(p as usize - 1) {
            teich_pows.push(&teich_pows[i - 1] * &teich);
        }
        let big_m = p as usize * (p as usize - 1);
        // ζ_M^e = ζ_p^{-e mod p} ζ_{p-1}^{e mod (p-1)} since ζ_p = ζ_M^{p-1}, ζ_{p-1} = ζ_M^p
        let images = (0..big_m)
            .map(|e| {
                let s = (p as usize - e % p as usize) % p as usize;
                let t = e % (p as usize - 1);
                &zeta_pows[s] * &teich_pows[t]
            })
            .collect();
        Ok(PadicEmbedding {
            p,
            precision,
            images,
        })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn conductor(&self) -> usize {
        self.images.len()
    }

    /// The image of `ζ_p`.
    pub fn zeta(&self) -> &PadicElt {
        &self.images[self.conductor() - (self.p as usize - 1)]
    }

    /// The image of `ζ_{p-1}` (the Teichmüller lift of the generator).
    pub fn teichmuller_generator(&self) -> &PadicElt {
        &self.images[self.p as usize]
    }

    pub fn embed(&self, z: &CycInt) -> Result<PadicElt, PadicError> {
        let big_m = self.conductor();
        if big_m % z.conductor() != 0 {
            return Err(PadicError::UnsupportedConductor(z.conductor(), big_m));
        }
        let z = z.change_conductor(big_m)?;
        let n = self.precision;
        let mut raw = vec![0i128; n];
        for (e, c) in z.raw_coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cd = PadicElt::from_int(self.p, n, c);
            let img = &self.images[e].digits;
            for (i, &a) in cd.digits.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in img[..n - i].iter().enumerate() {
                    raw[i + j] += a as i128 * b as i128;
                }
            }
        }
        Ok(PadicElt {
            p: self.p,
            digits: normalize(self.p, raw, n),
        })
    }
}

/// Convenience wrapper: embed `z` into `Z_p[π]/(π^N)` for the prime field `F_p`.
pub fn embed_cyclotomic(
    field: &Field,
    z: &CycInt,
    precision: usize,
) -> Result<PadicElt, PadicError> {
    PadicEmbedding::new(field, precision)?.embed(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StickelbergerReport {
    pub p: u32,
    pub m: u32,
    pub predicted: u64,
    pub observed: u64,
    pub ok: bool,
}

/// Compare `v_π(G(ω^{-m}))` with the base-`p` digit sum of `m`.
pub fn stickelberger_check(
    embedding: &PadicEmbedding,
    field: &Field,
    m: u32,
) -> Result<StickelbergerReport, PadicError> {
    let p = field.p();
    if m > p - 2 && p > 2 {
        return Err(PadicError::DegenerateParameters(format!(
            "m = {m} outside [0, p-2]"
        )));
    }
    if embedding.precision() <= m as usize {
        return Err(PadicError::PrecisionTooLow {
            have: embedding.precision(),
            need: m as usize + 1,
        });
    }
    let g = gauss_sum(field, CharSpec::new(field, m as i64));
    let image = embedding.embed(&g)?;
    let observed = image
        .valuation()
        .ok_or(PadicError::PrecisionExhausted(embedding.precision()))? as u64;
    let predicted = arith::digit_sum(m as u64, p as u64);
    Ok(StickelbergerReport {
        p,
        m,
        predicted,
        observed,
        ok: predicted == observed,
    })
}

/// `{x}_{p-1}`.
fn residue(x: i64, modulus: i64) -> i64 {
    x.rem_euclid(modulus)
}

/// `V(m)` as the fraction `w / (p-1)` together with `W(m) = w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Valuations {
    /// `W(m)`, in units of `v_π`.
    pub w: u64,
    /// `p - 1`; `V(m) = w / denom`.
    pub denom: u64,
}

impl Valuations {
    pub fn v(&self) -> f64 {
        self.w as f64 / self.denom as f64
    }

    /// `V(m)` in lowest terms.
    pub fn v_fraction(&self) -> (u64, u64) {
        let g = arith::gcd(self.w, self.denom);
        (self.w / g, self.denom / g)
    }
}

/// `W(m) = (n+1)m + 2{-(n+1)m}_{p-1}`: the π-adic valuation of
/// `G(ω^{m(n+1)})^2 G(ω^{-m})^{n+1}` for `q = p`.
pub fn valuation_formulas(p: u32, n: u32, m: u32) -> Result<Valuations, PadicError> {
    check_prime(p)?;
    if m == 0 || m > p.saturating_sub(2) {
        return Err(PadicError::DegenerateParameters(format!(
            "m = {m} outside [1, p-2]"
        )));
    }
    let pm1 = p as i64 - 1;
    let e = (n as i64 + 1) * m as i64;
    if e % pm1 == 0 {
        return Err(PadicError::DegenerateIndex(m));
    }
    Ok(Valuations {
        w: (e + 2 * residue(-e, pm1)) as u64,
        denom: pm1 as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    /// `(p-1) | (n+1)`: every conjugate coincides.
    Trivial,
    /// `p - 1 > n + 1`.
    I,
    /// `(n+1)/2 < p - 1 < n + 1`.
    II,
    /// `p - 1 ≤ (n+1)/2`.
    III,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Trivial => "trivial",
            CaseLabel::I => "I",
            CaseLabel::II => "II",
            CaseLabel::III => "III",
        })
    }
}

/// Which regime `(p, n)` falls in, and whether it sits on the `p - 1 = (n+1)/2` boundary.
pub fn classify(p: u32, n: u32) -> (CaseLabel, bool) {
    let pm1 = p as u64 - 1;
    let e = n as u64 + 1;
    if e % pm1 == 0 {
        return (CaseLabel::Trivial, false);
    }
    if pm1 > e {
        (CaseLabel::I, false)
    } else if 2 * pm1 > e {
        (CaseLabel::II, false)
    } else {
        (CaseLabel::III, 2 * pm1 == e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub p: u32,
    pub n: u32,
    pub b: u32,
    pub a: u32,
    pub case_label: CaseLabel,
    /// On the `p - 1 = (n+1)/2` boundary, classified as Case III.
    pub boundary: bool,
    /// Case I: `p - 1 = k + (n+1)h`; Case III: `{n+1}_{p-1}`.
    pub h: Option<u64>,
    pub k: Option<u64>,
    pub m_star: Option<u32>,
    /// `a^{gcd(n+1, p-1)} = 1`: the two conjugates must coincide.
    pub stabilized: bool,
    pub predicted_valuation: Option<u64>,
    pub observed_valuation: Option<u64>,
    /// The exact difference of the two conjugates vanished.
    pub difference_is_zero: bool,
    pub precision: usize,
}

impl CaseReport {
    pub fn ok(&self) -> bool {
        if self.stabilized {
            self.difference_is_zero
        } else {
            self.predicted_valuation.is_some()
                && self.predicted_valuation == self.observed_valuation
        }
    }
}

/// The main-term prediction for `v_π(p(p-1)(IK_n(b) - IK_n(b a^{-(n+1)})))`:
/// returns `(h, k, m*, W(m*))`.
pub fn predict(p: u32, n: u32, a: u32) -> Result<(Option<u64>, Option<u64>, u32, u64), PadicError> {
    let (label, _) = classify(p, n);
    let pm1 = p as u64 - 1;
    let e = n as u64 + 1;
    match label {
        CaseLabel::Trivial => Err(PadicError::DegenerateParameters(
            "(p-1) divides (n+1); there is no main term".into(),
        )),
        CaseLabel::I => {
            // p - 1 = k + (n+1)h with 1 <= k <= n+1
            let h = (pm1 - 1) / e;
            let k = pm1 - e * h;
            // a^{-m(n+1)} ≢ 1 (mod p) for the largest such m in [1, h]
            let a_inv = arith::mod_inv(a as u64, p as u64).ok_or(PadicError::ZeroParameter)?;
            let m_star = (1..=h)
                .rev()
                .find(|&m| arith::mod_pow(a_inv, m * e, p as u64) != 1)
                .ok_or_else(|| {
                    PadicError::DegenerateParameters(format!("a = {a} stabilizes the sum"))
                })? as u32;
            let w = valuation_formulas(p, n, m_star)?.w;
            Ok((Some(h), Some(k), m_star, w))
        }
        CaseLabel::II => Ok((None, None, 1, valuation_formulas(p, n, 1)?.w)),
        CaseLabel::III => Ok((Some(e % pm1), None, 1, valuation_formulas(p, n, 1)?.w)),
    }
}

/// Case analysis for `F_p`, building the sum formula for `n`.
pub fn case_analysis(
    p: u32,
    n: u32,
    b: u32,
    a: u32,
    precision: usize,
) -> Result<CaseReport, PadicError> {
    check_prime(p)?;
    let field = Field::prime(p as u64).map_err(CharSumError::from)?;
    let formula = SumContext::new(Arc::new(field)).ik_formula(n)?;
    case_analysis_with(&formula, b, a, precision)
}

/// Case analysis for one `(b, a)` on a prime field, with the precision retry built in.
pub fn case_analysis_with(
    formula: &IkFormula,
    b: u32,
    a: u32,
    precision: usize,
) -> Result<CaseReport, PadicError> {
    let field = formula.field();
    let (p, n) = (field.p(), formula.n());
    if field.k() != 1 {
        return Err(PadicError::DegenerateParameters(
            "case analysis needs q = p".into(),
        ));
    }
    if b == 0 || b >= p || a == 0 || a >= p {
        return Err(PadicError::DegenerateParameters(format!(
            "b = {b}, a = {a} must lie in [1, p-1]"
        )));
    }
    let (case_label, boundary) = classify(p, n);
    let g = arith::gcd(n as u64 + 1, p as u64 - 1);
    let stabilized = arith::mod_pow(a as u64, g, p as u64) == 1;

    let bf = field.from_int(b as i64);
    let moved = field
        .scale_by_prime_power(bf, a, -(n as i64 + 1))
        .map_err(CharSumError::from)?;
    let diff = &formula.scaled(bf)?.value - &formula.scaled(moved)?.value;
    let difference_is_zero = diff.is_zero();

    let mut report = CaseReport {
        p,
        n,
        b,
        a,
        case_label,
        boundary,
        h: None,
        k: None,
        m_star: None,
        stabilized,
        predicted_valuation: None,
        observed_valuation: None,
        difference_is_zero,
        precision,
    };
    if stabilized {
        return Ok(report);
    }
    let (h, k, m_star, w) = predict(p, n, a)?;
    report.h = h;
    report.k = k;
    report.m_star = Some(m_star);
    report.predicted_valuation = Some(w);

    let mut prec = precision.max(2 * (p as usize - 1));
    loop {
        let emb = PadicEmbedding::new(field, prec)?;
        if let Some(v) = emb.embed(&diff)?.valuation() {
            report.observed_valuation = Some(v as u64);
            report.precision = prec;
            return Ok(report);
        }
        if prec >= max_precision(p) {
            return Err(PadicError::PrecisionExhausted(prec));
        }
        prec = (prec * 2).min(max_precision(p));
    }
}
