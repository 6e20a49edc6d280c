//! cvbell: evaluate, expand, maximize, and export figure data for
//! continuous-variable GHZ Bell tests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 I/O error.

mod figures;
mod output;
mod verify;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvbell_core::bellval::{eval_asymptotic, eval_equal_settings};
use cvbell_core::expansion::mk_expand_raw;
use cvbell_core::{
    bell_value_general, class_coefficients, maximize_asymptotic, maximize_over_displacement,
    ClassTable, OptimizationResult, SettingsTable,
};

use output::fmt_f64;

/// Command failure carrying the documented exit code.
pub enum Failure {
    /// exit 2: bad flags, bad values, unsupported sizes
    Usage(String),
    /// exit 1: a verification check failed
    Verification,
    /// exit 3: filesystem or stream trouble
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification => 1,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m,
            Failure::Verification => "verification failed",
        }
    }
}

/// Core errors surface as usage errors: every fallible core call a
/// command makes is parameterized purely by user-provided flags.
fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn stream(e: io::Error) -> Failure {
    Failure::Io(format!("stdout: {e}"))
}

#[derive(Parser)]
#[command(
    name = "cvbell",
    version,
    about = "Continuous-variable GHZ Bell-violation toolkit",
    long_about = "Continuous-variable GHZ Bell-violation toolkit.\n\n\
        Scalar output is CSV with a header row; expansions are JSON. Every \
        real number is serialized with 17 significant digits and parses back \
        to the identical f64. Identical flags produce byte-identical output \
        regardless of CVBELL_THREADS (which caps worker threads; default: \
        all cores).\n\nExit codes: 0 success, 1 verification failure, \
        2 usage error, 3 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the n-party Bell combination with exact dyadic coefficients
    #[command(long_about = "Print the n-party Bell combination as JSON.\n\n\
        Shape: {\"n\": N, \"classes\": [{\"k\", \"num\", \"den_pow2\"}, ...]} — \
        every correlation whose selector primes exactly k parties carries the \
        coefficient num / 2^den_pow2 (num is a decimal string; zero classes are \
        omitted). With --full (n <= 24) a \"terms\" array follows: one entry per \
        nonzero selector, ascending, where bit i of \"selector\" primes party i \
        and \"selector_bits\" spells the same mask with party 0 first.")]
    Expand {
        /// number of parties (n >= 2)
        #[arg(long)]
        n: usize,
        /// also emit the selector-level term list (needs n <= 24)
        #[arg(long)]
        full: bool,
    },
    /// Evaluate the Bell combination at explicit parameters
    #[command(long_about = "Evaluate the Bell combination at explicit parameters.\n\n\
        Finite mode (--r and --j): CSV row n,r,j,value,cancellation_estimate. \
        The default settings are the near-optimal ones (unprimed displacement 0, \
        primed i*sqrt(J)); --phases rotates party k's primed displacement to \
        sqrt(J) e^{i phi_k}.\n\nAsymptotic mode (--asymptotic --a): CSV row \
        n,a,value,cancellation_estimate for the large-squeezing limit at scaled \
        displacement A = J e^{2r}.")]
    Eval {
        /// number of parties (n >= 2)
        #[arg(long)]
        n: usize,
        /// squeezing parameter r >= 0 (finite mode)
        #[arg(long)]
        r: Option<f64>,
        /// displacement magnitude J >= 0 (finite mode)
        #[arg(long)]
        j: Option<f64>,
        /// comma-separated per-party phases of the primed settings (finite mode)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phases: Option<Vec<f64>>,
        /// evaluate the large-squeezing limit instead
        #[arg(long)]
        asymptotic: bool,
        /// scaled displacement A = J e^{2r} (asymptotic mode)
        #[arg(long)]
        a: Option<f64>,
    },
    /// Maximize over the displacement magnitude
    #[command(long_about = "Maximize the Bell combination over the displacement \
        magnitude.\n\nCSV: n,mode,arg,value — first the global maximum, then \
        every detected local maximum ascending in arg. With --r the search runs \
        over J in (0, 5] at fixed squeezing; with --asymptotic it runs over \
        A in (0, 3] in the large-squeezing limit. The zero-displacement value 2 \
        is always a candidate, so the report never falls below 2.")]
    Max {
        /// number of parties (n >= 2)
        #[arg(long)]
        n: usize,
        /// fixed squeezing r >= 0: maximize B_n(r, J) over J
        #[arg(long)]
        r: Option<f64>,
        /// maximize the large-squeezing limit B_n(A) over A
        #[arg(long)]
        asymptotic: bool,
    },
    /// Write figure-data CSV files
    #[command(long_about = figures::FIGURE_HELP)]
    Figure {
        /// figure number (1, 2, or 3)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// output directory, created if missing
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate the numerical paths against each other
    #[command(long_about = "Run the cross-path validation suite and print one row \
        per check.\n\nChecks: GHZ construction vs closed-form exponent matrix, \
        state purity, correlation closed form vs Wigner evaluation, class \
        recursion vs brute-force term grouping, odd-n coefficient patterns, \
        zero-squeezing closed form, asymptotic limit consistency, and the \
        truncated-Fock oracle (skipped by --fast). Exit 0 iff everything passes.")]
    Verify {
        /// skip the (slower) truncated-Fock checks
        #[arg(long)]
        fast: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cvbell: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Some(raw) = std::env::var_os("CVBELL_THREADS") else {
        return Ok(());
    };
    let parsed = raw
        .to_str()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t >= 1);
    let threads = parsed.ok_or_else(|| {
        usage(format!("CVBELL_THREADS must be a positive integer, got {raw:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Expand { n, full } => cmd_expand(n, full),
        Cmd::Eval {
            n,
            r,
            j,
            phases,
            asymptotic,
            a,
        } => cmd_eval(n, r, j, phases, asymptotic, a),
        Cmd::Max { n, r, asymptotic } => cmd_max(n, r, asymptotic),
        Cmd::Figure { which, out } => figures::write_figure(which, &out),
        Cmd::Verify { fast } => cmd_verify(fast),
    }
}

fn cmd_expand(n: usize, full: bool) -> Result<(), Failure> {
    let classes = class_coefficients(n).map_err(usage)?;
    // the n = 24 term list has ~16.8M entries; stream instead of building
    let stdout = io::stdout();
    let mut w = io::BufWriter::new(stdout.lock());
    (|| -> io::Result<()> {
        write!(w, "{{\"n\":{n},\"classes\":[")?;
        let mut first = true;
        for (k, c) in classes.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            write!(
                w,
                "{{\"k\":{k},\"num\":\"{}\",\"den_pow2\":{}}}",
                c.numerator(),
                c.den_pow2()
            )?;
        }
        w.write_all(b"]")
    })()
    .map_err(stream)?;
    if full {
        let (nums, den) = mk_expand_raw(n).map_err(usage)?;
        (|| -> io::Result<()> {
            w.write_all(b",\"terms\":[")?;
            let mut first = true;
            for (s, &v) in nums.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                // per-term reduction, same normalization as the class view
                let shift = v.trailing_zeros().min(den);
                let bits: String = (0..n)
                    .map(|i| if s >> i & 1 == 1 { '1' } else { '0' })
                    .collect();
                write!(
                    w,
                    "{{\"selector\":{s},\"selector_bits\":\"{bits}\",\"num\":\"{}\",\"den_pow2\":{}}}",
                    v >> shift,
                    den - shift
                )?;
            }
            w.write_all(b"]")
        })()
        .map_err(stream)?;
    }
    w.write_all(b"}\n").and_then(|()| w.flush()).map_err(stream)
}

fn cmd_eval(
    n: usize,
    r: Option<f64>,
    j: Option<f64>,
    phases: Option<Vec<f64>>,
    asymptotic: bool,
    a: Option<f64>,
) -> Result<(), Failure> {
    let require_nonneg = |name: &str, v: f64| -> Result<f64, Failure> {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(usage(format!("--{name} must be finite and >= 0, got {v}")))
        }
    };
    if asymptotic {
        if r.is_some() || j.is_some() || phases.is_some() {
            return Err(usage("--asymptotic excludes --r, --j and --phases"));
        }
        let a = require_nonneg("a", a.ok_or_else(|| usage("--asymptotic needs --a"))?)?;
        let table = ClassTable::new(n).map_err(usage)?;
        let bv = eval_asymptotic(&table, a);
        println!("n,a,value,cancellation_estimate");
        println!(
            "{n},{},{},{}",
            fmt_f64(a),
            fmt_f64(bv.value),
            fmt_f64(bv.cancellation_estimate)
        );
        return Ok(());
    }
    if a.is_some() {
        return Err(usage("--a needs --asymptotic"));
    }
    let (Some(r), Some(j)) = (r, j) else {
        return Err(usage("eval needs --r and --j (or --asymptotic with --a)"));
    };
    let r = require_nonneg("r", r)?;
    let j = require_nonneg("j", j)?;
    let bv = match phases {
        None => {
            let table = ClassTable::new(n).map_err(usage)?;
            eval_equal_settings(&table, r, j)
        }
        Some(phases) => {
            let settings = SettingsTable::with_phases(n, j, &phases).map_err(usage)?;
            bell_value_general(n, r, &settings).map_err(usage)?
        }
    };
    println!("n,r,j,value,cancellation_estimate");
    println!(
        "{n},{},{},{},{}",
        fmt_f64(r),
        fmt_f64(j),
        fmt_f64(bv.value),
        fmt_f64(bv.cancellation_estimate)
    );
    Ok(())
}

fn cmd_max(n: usize, r: Option<f64>, asymptotic: bool) -> Result<(), Failure> {
    let result: OptimizationResult = match (r, asymptotic) {
        (Some(_), true) => return Err(usage("--r and --asymptotic are mutually exclusive")),
        (None, false) => return Err(usage("max needs --r or --asymptotic")),
        (Some(r), false) => maximize_over_displacement(n, r, None).map_err(usage)?,
        (None, true) => maximize_asymptotic(n, None).map_err(usage)?,
    };
    println!("n,mode,arg,value");
    println!(
        "{n},global,{},{}",
        fmt_f64(result.argmax),
        fmt_f64(result.value)
    );
    for (arg, value) in &result.local_maxima {
        println!("{n},local,{},{}", fmt_f64(*arg), fmt_f64(*value));
    }
    Ok(())
}

fn cmd_verify(fast: bool) -> Result<(), Failure> {
    let checks = verify::run(fast);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(8);
    println!("{:<width$}  status  detail", "check");
    for c in &checks {
        println!("{:<width$}  {:<6}  {}", c.name, c.status.label(), c.detail);
    }
    let failed = checks
        .iter()
        .filter(|c| c.status == verify::Status::Fail)
        .count();
    let skipped = checks
        .iter()
        .filter(|c| c.status == verify::Status::Skip)
        .count();
    let passed = checks.len() - failed - skipped;
    println!(
        "{:<width$}  {:<6}  {passed} passed, {failed} failed, {skipped} skipped",
        "overall",
        if failed == 0 { "PASS" } else { "FAIL" }
    );
    if verify::all_passed(&checks) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
