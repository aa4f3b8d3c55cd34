//! Verification suites over parameter grids.
//!
//! Each suite runs on an explicit `(p, k, n)` selection when one is given and
//! on the standard desk-scale grid otherwise. Failures carry enough parameters
//! to reproduce them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith;
use crate::charsum::{
    bounds_check, inverted_kloosterman_brute, CharSumError, SumContext, DEFAULT_BUDGET,
};
use crate::ff::{Field, FieldError};
use crate::galois::{self, GaloisError};
use crate::padic::{self, PadicEmbedding, PadicError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identity,
    Degree,
    Stickelberger,
    Cases,
    Bounds,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Identity,
        Suite::Degree,
        Suite::Stickelberger,
        Suite::Cases,
        Suite::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::Degree => "degree",
            Suite::Stickelberger => "stickelberger",
            Suite::Cases => "cases",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| VerifyError::InvalidParameters(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub p: Option<u32>,
    pub p_max: Option<u32>,
    pub k: u32,
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub budget: u64,
    pub precision: Option<usize>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            p: None,
            p_max: None,
            k: 1,
            n: None,
            n_max: None,
            budget: DEFAULT_BUDGET,
            precision: None,
        }
    }
}

impl VerifyParams {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::InvalidParameters(m));
        if let Some(p) = self.p {
            if !arith::is_prime(p as u64) {
                return bad(format!("p = {p} is not prime"));
            }
        }
        if self.p_max.is_some_and(|p| p < 2) {
            return bad("p-max must be at least 2".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.n == Some(0) || self.n_max == Some(0) {
            return bad("n must be at least 1".into());
        }
        Ok(())
    }

    fn explicit_p(&self) -> bool {
        self.p.is_some() || self.p_max.is_some()
    }

    fn primes(&self, default: &[u32]) -> Vec<u32> {
        match (self.p, self.p_max) {
            (Some(p), _) => vec![p],
            (None, Some(hi)) => arith::primes_in(2, hi as u64)
                .into_iter()
                .map(|p| p as u32)
                .collect(),
            (None, None) => default.to_vec(),
        }
    }

    fn ns(&self, default: &[u32]) -> Vec<u32> {
        match (self.n, self.n_max) {
            (Some(n), _) => vec![n],
            (None, Some(hi)) => (1..=hi).collect(),
            (None, None) => default.to_vec(),
        }
    }

    /// Fields `(p, k)` to run; the default grid adds the small extensions.
    fn fields(&self, default_primes: &[u32]) -> Result<Vec<Arc<Field>>, VerifyError> {
        let mut pk: Vec<(u32, u32)> = self
            .primes(default_primes)
            .into_iter()
            .map(|p| (p, self.k))
            .collect();
        if !self.explicit_p() && self.k == 1 {
            pk.extend(EXTENSIONS);
        }
        pk.into_iter()
            .map(|(p, k)| Ok(Arc::new(Field::new(p as u64, k)?)))
            .collect()
    }
}

/// `q ∈ {4, 9, 25, 8, 27}`.
const EXTENSIONS: [(u32, u32); 5] = [(2, 2), (3, 2), (5, 2), (2, 3), (3, 3)];

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {}: {} checks, {} failures",
            self.suite.name(),
            self.checks,
            self.failures.len()
        )
    }
}

fn collect(
    suite: Suite,
    results: Vec<Result<Vec<String>, VerifyError>>,
    checks: usize,
) -> Result<SuiteReport, VerifyError> {
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    Ok(SuiteReport {
        suite,
        checks,
        failures,
    })
}

fn field_tag(f: &Field) -> String {
    format!("p={} k={}", f.p(), f.k())
}

/// Brute enumeration times `q(q-1)` equals the Gauss-sum formula, for every `b`.
pub fn verify_identity(params: &VerifyParams) -> Result<SuiteReport, VerifyError> {
    params.validate()?;
    let primes = params.primes(&[3, 5, 7, 11, 13]);
    let ns = params.ns(&[1, 2, 3]);
    let explicit = params.explicit_p() || params.n.is_some() || params.n_max.is_some();
    let mut jobs = Vec::new();
    for &p in &primes {
        let f = Arc::new(Field::new(p as u64, params.k)?);
        for &n in &ns {
            let tuples = (f.q() as u128 - 1).pow(n);
            if tuples > params.budget as u128 {
                if explicit {
                    return Err(CharSumError::BudgetExceeded {
                        tuples,
                        budget: params.budget,
                    }
                    .into());
                }
                continue;
            }
            jobs.push((f.clone(), n));
        }
    }
    let checks = jobs.iter().map(|(f, _)| f.q() as usize - 1).sum();
    let results = jobs
        .into_par_iter()
        .map(|(f, n)| {
            let formula = SumContext::new(f.clone()).ik_formula(n)?;
            let mut fails = Vec::new();
            for b in f.units_by_log() {
                let brute = inverted_kloosterman_brute(&f, n, b, params.budget)?;
                let lhs = formula.scaled(b)?;
                if brute.at_scale(&lhs.scale).as_ref() != Some(&lhs.value) {
                    fails.push(format!(
                        "identity {} n={n} b={}: q(q-1)*brute != formula",
                        field_tag(&f),
                        f.format(b)
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    collect(Suite::Identity, results, checks)
}

/// Degree equals `(p-1)/gcd(n+1, p-1)` on prime fields and divides it on extensions.
pub fn verify_degree(params: &VerifyParams) -> Result<SuiteReport, VerifyError> {
    params.validate()?;
    let default_primes: Vec<u32> = arith::primes_in(2, 31)
        .into_iter()
        .map(|p| p as u32)
        .collect();
    let fields = params.fields(&default_primes)?;
    let mut jobs = Vec::new();
    for f in fields {
        let ns = if f.k() > 1 && !params.explicit_p() {
            vec![1, 2]
        } else {
            params.ns(&(1..=8).collect::<Vec<_>>())
        };
        jobs.extend(ns.into_iter().map(|n| (f.clone(), n)));
    }
    let checks = jobs.iter().map(|(f, _)| f.q() as usize - 1).sum();
    let results = jobs
        .into_par_iter()
        .map(|(f, n)| {
            let formula = SumContext::new(f.clone()).ik_formula(n)?;
            let bound = galois::predicted_degree(f.p(), n) as usize;
            let mut fails = Vec::new();
            for b in f.units_by_log() {
                let d = galois::degree_of(&formula.scaled(b)?.value)?;
                let ok = if f.k() == 1 {
                    d == bound
                } else {
                    bound % d == 0
                };
                if !ok {
                    fails.push(format!(
                        "degree {} n={n} b={}: degree {d}, bound {bound}",
                        field_tag(&f),
                        f.format(b)
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    collect(Suite::Degree, results, checks)
}

/// `v_π(G(ω^{-m})) = m` for `0 ≤ m ≤ p-2`.
pub fn verify_stickelberger(params: &VerifyParams) -> Result<SuiteReport, VerifyError> {
    params.validate()?;
    let primes = params.primes(&[3, 5, 7, 11, 13, 17, 19]);
    let checks = primes.iter().map(|&p| (p as usize - 1).max(1)).sum();
    let results = primes
        .into_par_iter()
        .map(|p| {
            let f = Field::prime(p as u64)?;
            let prec = params
                .precision
                .unwrap_or_else(|| padic::default_precision(p));
            let emb = PadicEmbedding::new(&f, prec)?;
            let mut fails = Vec::new();
            for m in 0..=p.saturating_sub(2) {
                let r = padic::stickelberger_check(&emb, &f, m)?;
                if !r.ok {
                    fails.push(format!(
                        "stickelberger p={p} m={m} precision={prec}: observed {}, predicted {}",
                        r.observed, r.predicted
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    collect(Suite::Stickelberger, results, checks)
}

const CASE_GRID: [(u32, u32); 9] = [
    (7, 1),
    (11, 1),
    (11, 3),
    (13, 1),
    (13, 3),
    (5, 5),
    (7, 7),
    (3, 6),
    (5, 13),
];

/// Observed valuation of the difference of two conjugates against the main-term
/// prediction, for every `(a, b)`; exact vanishing when `a` stabilizes the sum.
pub fn verify_cases(params: &VerifyParams) -> Result<SuiteReport, VerifyError> {
    params.validate()?;
    if params.k != 1 {
        return Err(VerifyError::InvalidParameters(
            "case analysis runs on prime fields only".into(),
        ));
    }
    let grid: Vec<(u32, u32)> =
        if params.explicit_p() || params.n.is_some() || params.n_max.is_some() {
            let primes = params.primes(&[7]);
            let ns = params.ns(&[1]);
            primes
                .iter()
                .flat_map(|&p| ns.iter().map(move |&n| (p, n)))
                .filter(|&(p, _)| p > 2)
                .collect()
        } else {
            CASE_GRID.to_vec()
        };
    let checks = grid.iter().map(|&(p, _)| (p as usize - 1).pow(2)).sum();
    let results = grid
        .into_par_iter()
        .map(|(p, n)| {
            let f = Arc::new(Field::prime(p as u64)?);
            let formula = SumContext::new(f).ik_formula(n)?;
            let prec = params.precision.unwrap_or_else(|| padic::default_precision(p));
            let mut fails = Vec::new();
            for a in 1..p {
                for b in 1..p {
                    let r = padic::case_analysis_with(&formula, b, a, prec)?;
                    if !r.ok() {
                        fails.push(format!(
                            "cases p={p} n={n} b={b} a={a} precision={}: case {}, stabilized {}, predicted {:?}, observed {:?}",
                            r.precision, r.case_label, r.stabilized, r.predicted_valuation, r.observed_valuation
                        ));
                    }
                }
            }
            Ok(fails)
        })
        .collect();
    collect(Suite::Cases, results, checks)
}

/// Both estimates at every complex embedding, for the identity and degree grids.
pub fn verify_bounds(params: &VerifyParams) -> Result<SuiteReport, VerifyError> {
    params.validate()?;
    let default_primes: Vec<u32> = arith::primes_in(2, 31)
        .into_iter()
        .map(|p| p as u32)
        .collect();
    let fields = params.fields(&default_primes)?;
    let mut jobs = Vec::new();
    for f in fields {
        let ns = if f.k() > 1 && !params.explicit_p() {
            vec![1, 2]
        } else {
            params.ns(&(1..=8).collect::<Vec<_>>())
        };
        jobs.extend(ns.into_iter().map(|n| (f.clone(), n)));
    }
    let checks = jobs.iter().map(|(f, _)| f.q() as usize - 1).sum();
    let results = jobs
        .into_par_iter()
        .map(|(f, n)| {
            let formula = SumContext::new(f.clone()).ik_formula(n)?;
            let mut fails = Vec::new();
            for b in f.units_by_log() {
                let report = bounds_check(&f, n, &formula.scaled(b)?)?;
                if !report.all_ok() {
                    fails.push(format!(
                        "bounds {} n={n} b={}: max lhs1 {} (rhs {}), max lhs2 {:?} (rhs {:?})",
                        field_tag(&f),
                        f.format(b),
                        report.max_lhs1(),
                        report.rhs1(),
                        report.max_lhs2(),
                        report.rhs2()
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    collect(Suite::Bounds, results, checks)
}

/// Run one suite, or every suite for [`Suite::All`].
pub fn run(suite: Suite, params: &VerifyParams) -> Result<Vec<SuiteReport>, VerifyError> {
    params.validate()?;
    let one = |s: Suite| match s {
        Suite::Identity => verify_identity(params),
        Suite::Degree => verify_degree(params),
        Suite::Stickelberger => verify_stickelberger(params),
        Suite::Cases => verify_cases(params),
        Suite::Bounds => verify_bounds(params),
        Suite::All => unreachable!(),
    };
    match suite {
        Suite::All => Suite::EACH.into_iter().map(one).collect(),
        s => Ok(vec![one(s)?]),
    }
}
