//! Command-line front end for `lucaspf-core`: cascade reports, term searches
//! and small utilities over products of factorials and cyclotomic values.

pub mod exec;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use lucaspf_core::bounds::{unit_product, LogAlphaPolicy};
use lucaspf_core::cyclotomic::{cyclotomic_value, m_n_exact};
use lucaspf_core::interval::MAX_PRECISION_BITS;
use lucaspf_core::pipeline::{run_general_cascade, run_real_cascade, run_unit_case, CascadeOptions, CascadeResult};
use lucaspf_core::search::{decimal_digits, DEFAULT_MAX_N};
use lucaspf_core::{pf_decompose, pf_fast_reject, pf_member, validate_params, verify_fibonacci_identity};
use lucaspf_core::{Error, Interval, Precision, SearchConfig, SeqKind};
use num_bigint::BigInt;

pub use exec::Parallel;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for invalid input, 3 when an inequality could not be decided, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Undecidable { .. }) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lucaspf", version, about = "Lucas sequence terms that are products of factorials")]
pub struct Cli {
    /// Starting precision of interval evaluations, doubled up to 512 bits.
    #[arg(long, global = true, env = "LUCASPF_PRECISION_BITS", default_value_t = 64)]
    pub precision_bits: u32,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    General,
    Real,
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "V", alias = "v")]
    V,
}

impl From<KindArg> for SeqKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::U => SeqKind::U,
            KindArg::V => SeqKind::V,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogAlphaArg {
    Half,
    ThreeQuarters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Bounds,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a bound cascade and print its stage table.
    Bounds {
        /// Defaults to the case the parameters fall in, or general.
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
        #[arg(long, value_enum, default_value = "U")]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true, requires = "s")]
        r: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "r")]
        s: Option<i64>,
        /// Worst-case lower bound for ln|alpha| in terms of ln n.
        #[arg(long, value_enum, default_value = "half")]
        log_alpha: LogAlphaArg,
        /// Write the report document here ("-" for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Search a sequence for terms that are products of factorials.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long, value_enum, default_value = "U")]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        min_n: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: u64,
        /// Also report indices removed by the parity and size filter.
        #[arg(long)]
        reject_log: bool,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Hit list as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Decide whether an integer is a signed product of factorials.
    Pf {
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(long)]
        decompose: bool,
        #[arg(long, default_value_t = 16)]
        limit: usize,
    },
    /// Evaluate the cyclotomic value and the primitive part at one index.
    Cyclotomic {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trial_bound: u64,
    },
    /// Run built-in self checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

impl Cli {
    fn precision(&self) -> Result<Precision, CliError> {
        if !(8..=MAX_PRECISION_BITS).contains(&self.precision_bits) {
            return Err(CliError::Usage(format!(
                "precision must lie in 8..={MAX_PRECISION_BITS} bits, got {}",
                self.precision_bits
            )));
        }
        Ok(Precision { start_bits: self.precision_bits, max_bits: MAX_PRECISION_BITS })
    }

    fn executor(&self) -> Result<Parallel, CliError> {
        if self.workers == 0 {
            return Err(CliError::Usage("need at least one worker".into()));
        }
        Ok(Parallel::new(self.workers)?)
    }
}

/// Runs a parsed command, writing human output to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Bounds { case, kind, r, s, log_alpha, json } => {
            let params = match (r, s) {
                (Some(r), Some(s)) => Some(validate_params(*r, *s)?),
                _ => None,
            };
            let case = match (case, &params) {
                (Some(c), _) => *c,
                (None, Some(p)) if p.unit_norm() => CaseArg::Unit,
                (None, Some(p)) if p.roots_real() => CaseArg::Real,
                _ => CaseArg::General,
            };
            let opts = CascadeOptions {
                policy: match log_alpha {
                    LogAlphaArg::Half => LogAlphaPolicy::HalfLogN,
                    LogAlphaArg::ThreeQuarters => LogAlphaPolicy::ThreeQuartersLogN,
                },
                precision: cli.precision()?,
            };
            let exec = cli.executor()?;
            let kind = SeqKind::from(*kind);
            let result = match case {
                CaseArg::General => run_general_cascade(kind, &opts, &exec)?,
                CaseArg::Real => run_real_cascade(kind, &opts, &exec)?,
                CaseArg::Unit => {
                    let p = match params {
                        Some(p) => p,
                        None => validate_params(1, 1)?,
                    };
                    run_unit_case(&p, kind, &opts, &exec)?
                }
            };
            lucaspf_core::pipeline::emit_report(&result)?;
            emit(out, json.as_deref(), &report::cascade_table(&result), &report::to_json(&result)?)?;
            Ok(cascade_exit(&result))
        }
        Command::Search { r, s, kind, min_n, max_n, reject_log, json, csv } => {
            let cfg = SearchConfig {
                r: *r,
                s: *s,
                kind: (*kind).into(),
                n_min: *min_n,
                n_max: *max_n,
                workers: cli.workers,
                reject_log: *reject_log,
            };
            cfg.validate()?;
            let rep = cli.executor()?.search(&cfg)?;
            emit(out, json.as_deref(), &report::search_table(&rep), &report::to_json(&rep)?)?;
            if let Some(path) = csv {
                if path == Path::new("-") {
                    report::write_hits_csv(&rep, &mut *out)?;
                } else {
                    report::write_hits_csv(&rep, BufWriter::new(File::create(path)?))?;
                }
            }
            Ok(0)
        }
        Command::Pf { n, decompose, limit } => {
            let value = BigInt::from_str(n.trim()).map_err(|_| CliError::Usage(format!("not an integer: {n}")))?;
            let member = pf_member(&value)?;
            writeln!(out, "{value}: {}", if member { "product of factorials" } else { "not a product of factorials" })?;
            if let Some(reason) = pf_fast_reject(&value) {
                writeln!(out, "fast filter: {reason:?}")?;
            }
            if *decompose && member {
                for w in pf_decompose(&value, *limit)? {
                    writeln!(out, "{w}")?;
                }
            }
            Ok(0)
        }
        Command::Cyclotomic { r, s, n, trial_bound } => {
            let p = validate_params(*r, *s)?;
            let phi = cyclotomic_value(&p, *n)?;
            let res = m_n_exact(&p, *n, *trial_bound)?;
            writeln!(out, "Phi_{n} = {phi}")?;
            writeln!(out, "digits {}", decimal_digits(&phi))?;
            writeln!(out, "ln(|Phi_n|/n) in [{:.12}, {:.12}]", res.mn_lower_log.lo_f64(), res.mn_lower_log.hi_f64())?;
            match res.mn_value {
                Some(m) => writeln!(out, "M_{n} = {m}")?,
                None => writeln!(out, "M_{n} not certified with trial bound {trial_bound}")?,
            }
            Ok(0)
        }
        Command::Verify { suite } => {
            let checks = verify_checks(*suite, cli)?;
            let mut ok = true;
            for (name, pass) in &checks {
                writeln!(out, "{} {name}", if *pass { "PASS" } else { "FAIL" })?;
                ok &= pass;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

/// Nonzero when some stage is not decisive.
pub fn cascade_exit(c: &CascadeResult) -> i32 {
    if c.all_decisive() {
        0
    } else {
        1
    }
}

fn emit(out: &mut dyn Write, json: Option<&Path>, table: &str, doc: &str) -> Result<(), CliError> {
    match json {
        Some(p) if p == Path::new("-") => out.write_all(doc.as_bytes())?,
        Some(p) => {
            std::fs::write(p, doc)?;
            out.write_all(table.as_bytes())?;
        }
        None => out.write_all(table.as_bytes())?,
    }
    Ok(())
}

fn verify_checks(suite: Suite, cli: &Cli) -> Result<Vec<(&'static str, bool)>, CliError> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        let fib = validate_params(1, 1)?;
        checks.push(("F1 F2 F3 F4 F5 F6 F8 F10 F12 = 11!", verify_fibonacci_identity()));
        checks.push(("Phi_12 = 6 for (1, 1)", cyclotomic_value(&fib, 12)? == BigInt::from(6)));
        let hits = cli.executor()?.search(&SearchConfig {
            r: 1,
            s: 1,
            kind: SeqKind::U,
            n_min: 1,
            n_max: 150,
            workers: cli.workers,
            reject_log: false,
        })?;
        let idx: Vec<u64> = hits.hits.iter().map(|h| h.index).collect();
        checks.push(("Fibonacci hits up to 150 are 1 2 3 6 12", idx == [1, 2, 3, 6, 12]));
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        let opts = CascadeOptions { policy: LogAlphaPolicy::HalfLogN, precision: cli.precision()? };
        let exec = cli.executor()?;
        let bits = opts.precision.start_bits;
        let c = unit_product(40, bits)?;
        let pass = c.certainly_gt(&Interval::from_decimal("0.278293", bits)?);
        checks.push(("unit product exceeds 0.278293", pass));
        let fib = validate_params(1, 1)?;
        checks.push(("unit case bound is 150", run_unit_case(&fib, SeqKind::U, &opts, &exec)?.final_bound == 150));
        checks.push(("real case bound is 210", run_real_cascade(SeqKind::U, &opts, &exec)?.final_bound == 210));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Io(std::io::Error::other("x")).exit_code(), 1);
        assert_eq!(CliError::Core(Error::Undecidable { context: "n = 200".into(), bits: 512 }).exit_code(), 3);
    }

    #[test]
    fn arguments_parse() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["lucaspf", "--workers", "4", "pf", "720"]).unwrap();
        assert_eq!(cli.workers, 4);
        assert!(Cli::try_parse_from(["lucaspf", "search", "--kind", "W"]).is_err());
    }
}
