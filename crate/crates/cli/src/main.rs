//! `orbicalc`: command-line front end to the orbicalc library.

mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orbicalc::funcalg::{parse, parse_point, ProjPoint, DEFAULT_DEGREE_CAP};
use orbicalc::orbits::MAX_HORIZON;
use orbicalc::{Error, KRatFunc, QRatFunc, Rational};

/// Version tag carried by every JSON report.
pub const SCHEMA: &str = "orbicalc/1";

#[derive(Parser, Debug)]
#[command(
    name = "orbicalc",
    version,
    about = "Orbifold calculus for rational maps of the Riemann sphere"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Minimum working precision for certified numerics.
    #[arg(long = "precision-bits", global = true, default_value_t = 128)]
    pub precision_bits: u32,
    /// Largest degree of any input or intermediate iterate.
    #[arg(long = "degree-cap", global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree, critical data, canonical orbifolds and Euler characteristics.
    Analyze { f: String },
    /// Exceptional and (generalized) Lattes classification.
    Lattes { a: String },
    /// Components and genera of A^d(x) = U(y) for d = 1..dmax.
    CurveGenus {
        a: String,
        u: String,
        #[arg(long, default_value_t = 3)]
        dmax: usize,
    },
    /// Whether F = U o V for some V, with V when it exists.
    LeftFactor { u: String, f: String },
    /// Whether A o X = X o B.
    Semiconj { a: String, x: String, b: String },
    /// Whether the genera of A^d(x) = U(y) stay bounded.
    BoundedGenus {
        a: String,
        u: String,
        #[arg(long, default_value_t = 3)]
        lmax: usize,
    },
    /// Members n of 0..=N with A^n(x0) in U(P^1(Q)).
    OrbitScan {
        a: String,
        u: String,
        x0: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

/// Validated job: every input parsed and every option range-checked.
pub enum Job {
    Analyze {
        f: KRatFunc,
    },
    Lattes {
        a: KRatFunc,
    },
    CurveGenus {
        a: KRatFunc,
        u: KRatFunc,
        dmax: usize,
    },
    LeftFactor {
        u: KRatFunc,
        f: KRatFunc,
    },
    Semiconj {
        a: KRatFunc,
        x: KRatFunc,
        b: KRatFunc,
    },
    BoundedGenus {
        a: KRatFunc,
        u: KRatFunc,
        lmax: usize,
    },
    OrbitScan {
        a: QRatFunc,
        u: QRatFunc,
        x0: ProjPoint<Rational>,
        n: usize,
    },
}

fn map(text: &str, what: &str, cap: usize) -> Result<KRatFunc, Error> {
    let f = parse(text).map_err(|e| Error::Invalid(format!("{what}: {e}")))?;
    if f.degree() > cap {
        return Err(Error::Invalid(format!(
            "{what} has degree {} above --degree-cap {cap}",
            f.degree()
        )));
    }
    Ok(f)
}

fn rational(f: KRatFunc, what: &str) -> Result<QRatFunc, Error> {
    f.to_rational()
        .ok_or_else(|| Error::Invalid(format!("{what} must have rational coefficients")))
}

fn iterate_fits(a: &KRatFunc, k: usize, cap: usize, flag: &str) -> Result<(), Error> {
    let deg = (a.degree() as u128)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if deg > cap as u128 {
        return Err(Error::Invalid(format!(
            "deg A^{k} = {deg} exceeds --degree-cap {cap}; lower {flag}"
        )));
    }
    Ok(())
}

fn validate(cmd: Command, opts: &GlobalOpts) -> Result<Job, Error> {
    if !(53..=512).contains(&opts.precision_bits) {
        return Err(Error::Invalid(format!(
            "--precision-bits {} outside 53..=512",
            opts.precision_bits
        )));
    }
    let cap = opts.degree_cap;
    Ok(match cmd {
        Command::Analyze { f } => Job::Analyze {
            f: map(&f, "F", cap)?,
        },
        Command::Lattes { a } => Job::Lattes {
            a: map(&a, "A", cap)?,
        },
        Command::CurveGenus { a, u, dmax } => {
            let a = map(&a, "A", cap)?;
            if dmax == 0 {
                return Err(Error::Invalid("--dmax must be at least 1".into()));
            }
            iterate_fits(&a, dmax, cap, "--dmax")?;
            Job::CurveGenus {
                a,
                u: map(&u, "U", cap)?,
                dmax,
            }
        }
        Command::LeftFactor { u, f } => Job::LeftFactor {
            u: map(&u, "U", cap)?,
            f: map(&f, "F", cap)?,
        },
        Command::Semiconj { a, x, b } => Job::Semiconj {
            a: map(&a, "A", cap)?,
            x: map(&x, "X", cap)?,
            b: map(&b, "B", cap)?,
        },
        Command::BoundedGenus { a, u, lmax } => {
            let a = map(&a, "A", cap)?;
            if lmax == 0 {
                return Err(Error::Invalid("--lmax must be at least 1".into()));
            }
            iterate_fits(&a, lmax, cap, "--lmax")?;
            Job::BoundedGenus {
                a,
                u: map(&u, "U", cap)?,
                lmax,
            }
        }
        Command::OrbitScan { a, u, x0, n } => {
            if n > MAX_HORIZON {
                return Err(Error::Invalid(format!(
                    "--n {n} above the horizon limit {MAX_HORIZON}"
                )));
            }
            let x0 = parse_point(&x0).map_err(|e| Error::Invalid(format!("x0: {e}")))?;
            let x0 = match x0 {
                ProjPoint::Infinity => ProjPoint::Infinity,
                ProjPoint::Finite(s) if s.is_rational() => ProjPoint::Finite(s.real_part().clone()),
                ProjPoint::Finite(_) => return Err(Error::Invalid("x0 must be rational".into())),
            };
            Job::OrbitScan {
                a: rational(map(&a, "A", cap)?, "A")?,
                u: rational(map(&u, "U", cap)?, "U")?,
                x0,
                n,
            }
        }
    })
}

/// 0 success, 2 bad input or unsupported request, 3 budget or precision
/// exhausted, 1 internal inconsistency.
fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        3
    } else if matches!(e, Error::Inconsistent(_)) {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = cli.opts.clone();
    let job = match validate(cli.command, &opts) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("orbicalc: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let out = report::run(&job, &opts);
    if !out.text.is_empty() {
        // a closed pipe (e.g. `| head`) is not an error of ours
        let _ = writeln!(std::io::stdout().lock(), "{}", out.text);
    }
    match out.error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("orbicalc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
