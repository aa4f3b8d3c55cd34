use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Number, Value};

use ikdeg::census::{self, CensusError, CensusParams, Format};
use ikdeg::charsum::{inverted_kloosterman_brute, CharSumError, SumContext, DEFAULT_BUDGET};
use ikdeg::galois;
use ikdeg::verify::{self, Suite, VerifyError, VerifyParams};
use ikdeg::{CycInt, Field};

#[derive(Parser)]
#[command(
    name = "ikdeg",
    version,
    about = "Exact inverted Kloosterman sums: identities, degrees, valuations"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "IKDEG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite: identity, degree, stickelberger, cases, bounds, or all.
    Verify {
        suite: String,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Tabulate degree, bounds, and valuations over a parameter sweep.
    Census {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Compute one inverted Kloosterman sum.
    Sum {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Field element, coordinates joined by ':' for extensions.
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = SumPath::Formula)]
        path: SumPath,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Clone, Debug)]
struct Grid {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    p_max: Option<u32>,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SumPath {
    Brute,
    Formula,
    Both,
}

/// Bad input; maps to exit code 2.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid parameters: {}", self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_invalid(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_invalid(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<Invalid>()
            || matches!(
                c.downcast_ref::<VerifyError>(),
                Some(VerifyError::InvalidParameters(_))
            )
            || matches!(
                c.downcast_ref::<CensusError>(),
                Some(CensusError::InvalidParameters(_))
            )
            || c.downcast_ref::<ikdeg::FieldError>().is_some()
            || matches!(
                c.downcast_ref::<CharSumError>(),
                Some(
                    CharSumError::BudgetExceeded { .. }
                        | CharSumError::BadDimension
                        | CharSumError::Field(_)
                )
            )
            || matches!(
                c.downcast_ref::<VerifyError>(),
                Some(
                    VerifyError::Field(_)
                        | VerifyError::CharSum(CharSumError::BudgetExceeded { .. })
                )
            )
    })
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Verify {
            suite,
            grid,
            budget,
            precision,
        } => cmd_verify(&suite, grid, budget, precision),
        Command::Census {
            grid,
            format,
            out,
            precision,
        } => cmd_census(grid, &format, out, precision),
        Command::Sum {
            p,
            k,
            n,
            b,
            path,
            budget,
        } => cmd_sum(p, k, n, &b, path, budget),
    }
}

fn cmd_verify(suite: &str, grid: Grid, budget: u64, precision: Option<usize>) -> Result<bool> {
    let suite = Suite::from_str(suite)?;
    let params = VerifyParams {
        p: grid.p,
        p_max: grid.p_max,
        k: grid.k,
        n: grid.n,
        n_max: grid.n_max,
        budget,
        precision,
    };
    let reports = verify::run(suite, &params)?;
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        for f in &r.failures {
            println!("  {f}");
        }
        ok &= r.passed();
    }
    Ok(ok)
}

fn census_params(grid: &Grid, precision: Option<usize>) -> Result<CensusParams> {
    let (p_min, p_max) = match (grid.p, grid.p_max) {
        (Some(p), None) => (p, p),
        (lo, Some(hi)) => (lo.unwrap_or(2), hi),
        (None, None) => return Err(invalid("census needs --p or --p-max")),
    };
    if grid.p.is_some_and(|p| !ikdeg::arith::is_prime(p as u64)) {
        return Err(invalid(format!("p = {} is not prime", grid.p.unwrap())));
    }
    let (n_min, n_max) = match (grid.n, grid.n_max) {
        (Some(n), None) => (n, n),
        (lo, Some(hi)) => (lo.unwrap_or(1), hi),
        (None, None) => return Err(invalid("census needs --n or --n-max")),
    };
    Ok(CensusParams {
        p_min,
        p_max,
        k_ext: grid.k,
        n_min,
        n_max,
        precision,
    })
}

fn cmd_census(
    grid: Grid,
    format: &str,
    out: Option<PathBuf>,
    precision: Option<usize>,
) -> Result<bool> {
    let format = Format::from_str(format)?;
    let params = census_params(&grid, precision)?;
    let rows = census::run_census(&params)?;
    match out {
        Some(path) => {
            let file =
                File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            census::write_records(&rows, format, &mut w)?;
            w.flush()?;
        }
        None => census::write_records(&rows, format, io::stdout().lock())?,
    }
    Ok(rows.iter().all(|r| r.consistent()))
}

fn decimal(x: f64) -> Value {
    Value::Number(Number::from_str(&census::format_decimal(x)).expect("finite decimal"))
}

fn cmd_sum(p: u32, k: u32, n: u32, b: &str, path: SumPath, budget: u64) -> Result<bool> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let field = Arc::new(Field::new(p as u64, k)?);
    let b = field.parse(b)?;
    if b.is_zero() {
        return Err(invalid("b must be nonzero"));
    }

    let formula_value = match path {
        SumPath::Brute => None,
        _ => {
            let s = SumContext::new(field.clone()).ik_formula(n)?.scaled(b)?;
            Some(
                s.to_unscaled()
                    .context("formula value is not divisible by q(q-1)")?,
            )
        }
    };
    let brute_value = match path {
        SumPath::Formula => None,
        _ => Some(inverted_kloosterman_brute(&field, n, b, budget)?.value),
    };
    let agree = match (&formula_value, &brute_value) {
        (Some(f), Some(b)) => Some(f == b),
        _ => None,
    };
    let value: CycInt = formula_value
        .or(brute_value)
        .expect("at least one path ran");

    let embeddings: Vec<Value> = value
        .embeddings()
        .into_iter()
        .map(|(j, e)| {
            let clean = |x: f64| if x.abs() <= e.error { 0.0 } else { x };
            json!({"j": j, "re": decimal(clean(e.value.re)), "im": decimal(clean(e.value.im))})
        })
        .collect();
    let mut report = json!({
        "p": p,
        "k": k,
        "q": field.q(),
        "n": n,
        "b": field.format(b),
        "path": format!("{path:?}").to_lowercase(),
        "value": value.to_json(),
        "embeddings": embeddings,
        "degree": galois::degree_of(&value)?,
        "minpoly": galois::min_poly(&value)?.to_string(),
    });
    if let Some(a) = agree {
        report["paths_agree"] = Value::Bool(a);
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(agree != Some(false))
}
