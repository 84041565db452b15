//! The `torusvc` command line.
//!
//! Exit codes: 0 success or the property holds, 1 the property fails,
//! 2 usage, parse or I/O errors, 3 a resource guard refused the request.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{bounds_table, format_table};
use crate::error::{Error, Result};
use crate::extraction::{check_extraction, sample_extraction_matrix, CheckMode, SampleOutcome};
use crate::formats::{
    parse_matrix, parse_points, verify_certificate, write_matrix, write_points, CertKind,
    Certificate,
};
use crate::lifting::{lift_points, verify_lift, LiftMode};
use crate::search::{search_shattered, vc_exact};
use crate::shatter::{growth_count, shatter_report, Family, Mask};
use crate::stripes::{build_stripe_shattered_set, stripe_witness, PairIndex};
use crate::torus::{parse_rat, PointSet, Shape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "torusvc",
    version,
    about = "VC-dimension tools for boxes, cubes and stripes on the torus"
)]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// boxes, cubes or stripes
    #[arg(long)]
    family: String,
    /// Stripe length p/q; stripes without it means any length.
    #[arg(long)]
    l: Option<String>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        let l = self.l.as_deref().map(parse_rat).transpose()?;
        Family::parse(&self.family, l)
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Witness,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a point set is shattered.
    Shatter {
        points: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        /// Write the witnesses found to this certificate file.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Count the subsets a family cuts out of a point set.
    Growth {
        points: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Build the n+1 point set in T^(2^n) shattered by stripes of length l.
    StripesBuild {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the witness stripes as a certificate.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Decide the extraction property of a matrix.
    ExtractCheck {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "witness")]
        mode: ModeArg,
    },
    /// Sample balanced matrices until one has the extraction property.
    ExtractSample {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_trials: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Lift a stripe-shattered set through an extraction matrix.
    Lift {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        l: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build and check cube witnesses on a lifted set.
    CertifyLift {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        l: String,
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Re-check a certificate against a point set.
    VerifyCert { points: PathBuf, cert: PathBuf },
    /// Tabulate upper and lower bounds.
    Bounds {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        d_list: Vec<u64>,
    },
    /// Exact VC-dimension by exhaustive enumeration (d <= 2).
    VcExact {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Write the largest shattered configuration here.
        #[arg(long)]
        points_out: Option<PathBuf>,
        /// Write its certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Randomized search for a box-shattered set.
    Search {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn load_points(path: &Path) -> Result<PointSet> {
    with_path(path, parse_points(&read(path)?))
}

fn load_matrix(path: &Path) -> Result<crate::extraction::SymbolMatrix> {
    with_path(path, parse_matrix(&read(path)?))
}

fn kind_of(family: Family) -> CertKind {
    match family {
        Family::Boxes => CertKind::Boxes,
        Family::Cubes => CertKind::Cubes,
        Family::StripesFixed(_) | Family::StripesAny => CertKind::Stripes,
    }
}

fn write_cert(
    path: &Path,
    ps: &PointSet,
    kind: CertKind,
    entries: BTreeMap<Mask, Shape>,
) -> Result<()> {
    let cert = Certificate::new(ps.dim(), ps.len(), kind, entries)?;
    write(path, &cert.write())
}

fn dispatch(cmd: Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<i32> {
    match cmd {
        Command::Shatter {
            points,
            family,
            cert,
        } => {
            let ps = load_points(&points)?;
            let family = family.family()?;
            let report = shatter_report(&ps, family)?;
            if let Some(path) = cert {
                write_cert(&path, &ps, kind_of(family), report.witnesses.clone())?;
            }
            match report.missing {
                None => {
                    writeln!(out, "shattered")?;
                    Ok(EXIT_OK)
                }
                Some(m) => {
                    writeln!(out, "not shattered: missing mask {m}")?;
                    Ok(EXIT_FAILS)
                }
            }
        }
        Command::Growth { points, family } => {
            let ps = load_points(&points)?;
            writeln!(out, "{}", growth_count(&ps, family.family()?)?)?;
            Ok(EXIT_OK)
        }
        Command::StripesBuild { n, l, output, cert } => {
            let l = parse_rat(&l)?;
            let ps = build_stripe_shattered_set(n, l)?;
            write(&output, &write_points(&ps))?;
            if let Some(path) = cert {
                let entries = (0..1u64 << (n + 1))
                    .map(|m| Ok((Mask(m), Shape::Stripe(stripe_witness(n, l, Mask(m))?))))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                write_cert(&path, &ps, CertKind::Stripes, entries)?;
            }
            let pairs = PairIndex::new(n)?;
            writeln!(
                out,
                "{} points in dimension {}",
                ps.len(),
                pairs.dimensions()
            )?;
            Ok(EXIT_OK)
        }
        Command::ExtractCheck { matrix, mode } => {
            let m = load_matrix(&matrix)?;
            let mode = match mode {
                ModeArg::Exhaustive => CheckMode::Exhaustive,
                ModeArg::Witness => CheckMode::Witness,
            };
            let v = check_extraction(&m, mode)?;
            if v.holds {
                writeln!(out, "holds")?;
                return Ok(EXIT_OK);
            }
            writeln!(out, "fails")?;
            if let Some(w) = &v.counterexample_word {
                writeln!(out, "word {}", join(w))?;
            }
            if let Some(w) = &v.failure_witness {
                writeln!(out, "rows {}", join(&w.rows))?;
                writeln!(out, "symbols {}", join(&w.symbols))?;
                writeln!(out, "cols {}", join(&w.cols))?;
            }
            Ok(EXIT_FAILS)
        }
        Command::ExtractSample {
            m,
            k,
            q,
            seed,
            max_trials,
            output,
        } => match sample_extraction_matrix(m, k, parse_rat(&q)?, max_trials, seed)? {
            SampleOutcome::Found { matrix, trials } => {
                write(&output, &write_matrix(&matrix))?;
                writeln!(out, "found after {trials} trials")?;
                Ok(EXIT_OK)
            }
            SampleOutcome::Exhausted { trials } => {
                writeln!(out, "exhausted after {trials} trials")?;
                Ok(EXIT_FAILS)
            }
        },
        Command::Lift {
            points,
            matrix,
            l,
            output,
        } => {
            let inst = lift_points(
                &load_points(&points)?,
                &load_matrix(&matrix)?,
                parse_rat(&l)?,
            )?;
            write(&output, &write_points(inst.lifted()))?;
            writeln!(
                out,
                "{} points in dimension {}",
                inst.lifted().len(),
                inst.lifted().dim()
            )?;
            Ok(EXIT_OK)
        }
        Command::CertifyLift {
            points,
            matrix,
            l,
            exhaustive: _,
            sample,
            seed,
            output,
        } => {
            let inst = lift_points(
                &load_points(&points)?,
                &load_matrix(&matrix)?,
                parse_rat(&l)?,
            )?;
            let mode = match sample {
                Some(count) => LiftMode::Sample { count, seed },
                None => LiftMode::Exhaustive,
            };
            let report = verify_lift(&inst, mode)?;
            for f in &report.failures {
                writeln!(out, "failed mask {}: {}", f.mask, f.reason)?;
            }
            if !report.passed() {
                return Ok(EXIT_FAILS);
            }
            let masks: Vec<Mask> = match mode {
                LiftMode::Exhaustive => (0..1u64 << report.points).map(Mask).collect(),
                LiftMode::Sample { .. } => sampled_masks(report.points, sample.unwrap_or(0), seed),
            };
            let entries = masks
                .into_iter()
                .map(|m| Ok((m, Shape::Cube(inst.cube_witness(m)?))))
                .collect::<Result<BTreeMap<_, _>>>()?;
            let n_entries = entries.len();
            write_cert(&output, inst.lifted(), CertKind::Cubes, entries)?;
            writeln!(
                out,
                "certified {n_entries} masks on {} points, edge {}",
                report.points,
                inst.edge()
            )?;
            Ok(EXIT_OK)
        }
        Command::VerifyCert { points, cert } => {
            let ps = load_points(&points)?;
            let c = with_path(&cert, Certificate::parse(&read(&cert)?))?;
            let check = verify_certificate(&ps, &c)?;
            match check.mismatch {
                Some((m, got)) => {
                    writeln!(out, "invalid: mask {m} shape cuts out {got}")?;
                    Ok(EXIT_FAILS)
                }
                None => {
                    let scope = if check.complete {
                        "complete"
                    } else {
                        "partial"
                    };
                    writeln!(out, "verified {} masks ({scope})", check.verified)?;
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Bounds { d_list } => {
            write!(out, "{}", format_table(&bounds_table(&d_list)?))?;
            Ok(EXIT_OK)
        }
        Command::VcExact {
            d,
            family,
            n_max,
            points_out,
            cert,
        } => {
            let family = family.family()?;
            let r = vc_exact(d, family, n_max)?;
            writeln!(out, "{}", r.value)?;
            if let Some(ps) = &r.witness {
                if let Some(path) = &points_out {
                    write(path, &write_points(ps))?;
                }
                if let Some(path) = &cert {
                    write_cert(path, ps, kind_of(family), r.certificates.clone())?;
                }
            }
            for lv in &r.levels {
                writeln!(
                    err,
                    "n={} classes={} {}",
                    lv.n,
                    lv.configs,
                    if lv.shattered {
                        "shattered"
                    } else {
                        "none shattered"
                    }
                )?;
            }
            if r.refuted_at.is_none() {
                writeln!(err, "lower bound only: no size up to {n_max} was refuted")?;
            }
            if !r.complete {
                writeln!(err, "grid enumeration: the value is a lower bound")?;
            }
            Ok(EXIT_OK)
        }
        Command::Search {
            d,
            n,
            budget,
            seed,
            output,
            cert,
        } => match search_shattered(d, n, budget, seed)? {
            Some(hit) => {
                if let Some(path) = &output {
                    write(path, &write_points(&hit.points))?;
                }
                if let Some(path) = &cert {
                    write_cert(path, &hit.points, CertKind::Boxes, hit.certificates.clone())?;
                }
                writeln!(out, "found after {} evaluations", hit.evaluations)?;
                write!(out, "{}", write_points(&hit.points))?;
                Ok(EXIT_OK)
            }
            None => {
                writeln!(out, "not found")?;
                Ok(EXIT_FAILS)
            }
        },
    }
}

fn sampled_masks(n: usize, count: usize, seed: u64) -> Vec<Mask> {
    use rand::{Rng, SeedableRng};
    // same stream as the lift check
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let full = Mask::full(n).0;
    (0..count).map(|_| Mask(rng.gen::<u64>() & full)).collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard { .. } => EXIT_GUARD,
        _ => EXIT_USAGE,
    }
}

/// Runs the command line with explicit output streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let (mut obuf, mut ebuf) = (Vec::new(), Vec::new());
    let result = match cli.jobs {
        Some(0) => Err(Error::InvalidParameter("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(cli.cmd, &mut obuf, &mut ebuf))),
        None => dispatch(cli.cmd, &mut obuf, &mut ebuf),
    };
    let _ = out.write_all(&obuf);
    let _ = err.write_all(&ebuf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs the command line on the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
