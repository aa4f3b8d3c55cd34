//! Parameter sweeps over `(q, n, b)` with deterministic CSV, JSON, and table output.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::arith;
use crate::charsum::{bounds_check, CharSumError, SumContext};
use crate::ff::{Field, FieldError};
use crate::galois::{self, GaloisError};
use crate::padic::{self, CaseLabel, PadicError};

#[derive(Debug, Error)]
pub enum CensusError {
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
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl FromStr for Format {
    type Err = CensusError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(CensusError::InvalidParameters(format!(
                "unknown format {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusParams {
    /// Inclusive prime range.
    pub p_min: u32,
    pub p_max: u32,
    pub k_ext: u32,
    /// Inclusive range of `n`.
    pub n_min: u32,
    pub n_max: u32,
    pub precision: Option<usize>,
}

impl CensusParams {
    pub fn primes(&self) -> Result<Vec<u32>, CensusError> {
        if self.p_min > self.p_max || self.n_min > self.n_max {
            return Err(CensusError::InvalidParameters("empty range".into()));
        }
        if self.n_min == 0 {
            return Err(CensusError::InvalidParameters(
                "n must be at least 1".into(),
            ));
        }
        if self.k_ext == 0 {
            return Err(CensusError::InvalidParameters(
                "k must be at least 1".into(),
            ));
        }
        let primes: Vec<u32> = arith::primes_in(self.p_min as u64, self.p_max as u64)
            .into_iter()
            .map(|p| p as u32)
            .collect();
        if primes.is_empty() {
            return Err(CensusError::InvalidParameters(format!(
                "no primes in [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        Ok(primes)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRecord {
    pub p: u32,
    pub k_ext: u32,
    pub q: u32,
    pub n: u32,
    pub b: String,
    pub degree: usize,
    pub predicted_degree_bound: u32,
    /// `None` for extension fields, where only divisibility is expected.
    pub degree_matches: Option<bool>,
    pub bound1_lhs: f64,
    pub bound1_rhs: f64,
    pub bound2_lhs: Option<f64>,
    pub bound2_rhs: Option<f64>,
    pub case_label: String,
    pub predicted_val: Option<u64>,
    pub observed_val: Option<u64>,
    pub dlog_b: u32,
}

pub const HEADER: [&str; 15] = [
    "p",
    "k_ext",
    "q",
    "n",
    "b",
    "degree",
    "predicted_degree_bound",
    "degree_matches",
    "bound1_lhs",
    "bound1_rhs",
    "bound2_lhs",
    "bound2_rhs",
    "case_label",
    "predicted_val",
    "observed_val",
];

impl CensusRecord {
    pub fn divides_bound(&self) -> bool {
        self.degree != 0 && self.predicted_degree_bound as usize % self.degree == 0
    }

    pub fn bounds_ok(&self) -> bool {
        let slack = crate::charsum::BOUND_SLACK;
        self.bound1_lhs <= self.bound1_rhs + slack
            && match (self.bound2_lhs, self.bound2_rhs) {
                (Some(l), Some(r)) => l <= r + slack,
                _ => true,
            }
    }

    /// Every check the row carries.
    pub fn consistent(&self) -> bool {
        self.divides_bound()
            && self.degree_matches != Some(false)
            && self.bounds_ok()
            && self.predicted_val == self.observed_val
    }

    fn fields(&self) -> [String; 15] {
        let opt_f = |x: Option<f64>| x.map(format_decimal).unwrap_or_default();
        let opt_u = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.p.to_string(),
            self.k_ext.to_string(),
            self.q.to_string(),
            self.n.to_string(),
            self.b.clone(),
            self.degree.to_string(),
            self.predicted_degree_bound.to_string(),
            match self.degree_matches {
                Some(m) => m.to_string(),
                None => "n/a".into(),
            },
            format_decimal(self.bound1_lhs),
            format_decimal(self.bound1_rhs),
            opt_f(self.bound2_lhs),
            opt_f(self.bound2_rhs),
            self.case_label.clone(),
            opt_u(self.predicted_val),
            opt_u(self.observed_val),
        ]
    }

    fn to_json(&self) -> Value {
        let num = |s: String| Value::Number(Number::from_str(&s).expect("formatted decimal"));
        let opt = |s: String| if s.is_empty() { Value::Null } else { num(s) };
        let f = self.fields();
        let mut m = Map::new();
        for (i, (key, val)) in HEADER.iter().zip(f).enumerate() {
            let v = match i {
                4 | 12 => Value::String(val),
                7 => match self.degree_matches {
                    Some(b) => Value::Bool(b),
                    None => Value::String(val),
                },
                _ => opt(val),
            };
            m.insert(key.to_string(), v);
        }
        Value::Object(m)
    }
}

/// `x` with 12 significant digits, `%g` style, independent of locale.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    const SIG: i32 = 12;
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..SIG).contains(&exp) {
        format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        trim(&format!("{:.*}", (SIG - 1 - exp) as usize, x))
    }
}

/// All rows for one `(q, n)`, in increasing `dlog b`.
pub fn records_for(
    field: Arc<Field>,
    n: u32,
    precision: Option<usize>,
) -> Result<Vec<CensusRecord>, CensusError> {
    let p = field.p();
    let k_ext = field.k();
    let ctx = SumContext::new(field.clone());
    let formula = ctx.ik_formula(n)?;
    let bound = galois::predicted_degree(p, n);
    let (label, _) = padic::classify(p, n);
    let a = field.primitive_root().index();
    let precision = precision.unwrap_or_else(|| padic::default_precision(p));

    let units: Vec<_> = field.units_by_log().collect();
    units
        .into_par_iter()
        .enumerate()
        .map(|(dlog_b, b)| {
            let s = formula.scaled(b)?;
            let degree = galois::degree_of(&s.value)?;
            let report = bounds_check(&field, n, &s)?;
            let (case_label, predicted_val, observed_val) = if k_ext > 1 {
                ("n/a".to_string(), None, None)
            } else if label == CaseLabel::Trivial {
                (label.to_string(), None, None)
            } else {
                let c = padic::case_analysis_with(&formula, b.index(), a, precision)?;
                (
                    label.to_string(),
                    c.predicted_valuation,
                    c.observed_valuation,
                )
            };
            Ok(CensusRecord {
                p,
                k_ext,
                q: field.q(),
                n,
                b: field.format(b),
                degree,
                predicted_degree_bound: bound,
                degree_matches: (k_ext == 1).then_some(degree == bound as usize),
                bound1_lhs: report.max_lhs1(),
                bound1_rhs: report.rhs1(),
                bound2_lhs: report.max_lhs2(),
                bound2_rhs: report.rhs2(),
                case_label,
                predicted_val,
                observed_val,
                dlog_b: dlog_b as u32,
            })
        })
        .collect()
}

/// Every row for the parameter grid, sorted by `(p, k_ext, n, dlog b)`.
pub fn run_census(params: &CensusParams) -> Result<Vec<CensusRecord>, CensusError> {
    let primes = params.primes()?;
    let fields = primes
        .iter()
        .map(|&p| Field::new(p as u64, params.k_ext).map(Arc::new))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(Arc<Field>, u32)> = fields
        .iter()
        .flat_map(|f| (params.n_min..=params.n_max).map(move |n| (f.clone(), n)))
        .collect();
    let mut rows: Vec<CensusRecord> = jobs
        .into_par_iter()
        .map(|(f, n)| records_for(f, n, params.precision))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.p, r.k_ext, r.n, r.dlog_b));
    Ok(rows)
}

pub fn write_records<W: Write>(
    rows: &[CensusRecord],
    format: Format,
    mut out: W,
) -> Result<(), CensusError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(HEADER)?;
            for r in rows {
                w.write_record(r.fields())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let arr = Value::Array(rows.iter().map(CensusRecord::to_json).collect());
            serde_json::to_writer_pretty(&mut out, &arr).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Format::Table => {
            let cells: Vec<[String; 15]> = rows.iter().map(CensusRecord::fields).collect();
            let widths: Vec<usize> = (0..HEADER.len())
                .map(|i| {
                    cells
                        .iter()
                        .map(|c| c[i].len())
                        .chain([HEADER[i].len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |vals: &[&str]| {
                let mut s = String::new();
                for (i, v) in vals.iter().enumerate() {
                    let _ = write!(s, "{v:>w$}  ", w = widths[i]);
                }
                s.trim_end().to_string()
            };
            writeln!(out, "{}", line(&HEADER))?;
            for c in &cells {
                let refs: Vec<&str> = c.iter().map(String::as_str).collect();
                writeln!(out, "{}", line(&refs))?;
            }
        }
    }
    Ok(())
}
