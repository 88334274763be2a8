//! Command-line front end.
//!
//! Exit codes: 0 success, 2 certification failure, 3 invalid input.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use config::ConfigFile;

use crate::construction::checker::check_sequence;
use crate::construction::{build_delta_sequence, DeltaSequence};
use crate::dimfun::DimensionFunction;
use crate::error::{Error, Result};
use crate::maps::{reduce_multivariate, AffineMap, MultiPolynomial, Polynomial};
use crate::numerics::rational::format_rational;
use crate::witness::{certify_measure_decay, search, verify_certificate, PatternSpec, WitnessCertificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pattern-cert", version, about = "Certified pattern witnesses in thin sets")]
struct Cli {
    /// key = value file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Preimage,
    Image,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and check a scale sequence
    Deltas {
        #[arg(long)]
        h: Option<String>,
        #[arg(long = "L")]
        l: Option<u32>,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "deltas.json")]
        out: PathBuf,
    },
    /// Search a witness for a pattern and write its certificate
    Witness {
        #[arg(long)]
        deltas: PathBuf,
        /// maps separated by ';'
        #[arg(long)]
        pattern: Option<String>,
        /// one map per line
        #[arg(long)]
        pattern_file: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// comma-separated rank per map (default 1, 2, ...)
        #[arg(long)]
        ranks: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long = "L")]
        l: Option<u32>,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long, default_value = "certificate.json")]
        out: PathBuf,
    },
    /// Per-level covering bounds as CSV
    CertifyMeasure {
        #[arg(long)]
        deltas: PathBuf,
        /// defaults to the sequence's own dimension function
        #[arg(long)]
        h: Option<String>,
        #[arg(long = "N1")]
        n1: Option<u64>,
        #[arg(long = "N2")]
        n2: Option<u64>,
        /// levels 1..=levels (default: the whole sequence)
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value = "cover.csv")]
        out: PathBuf,
    },
    /// Reduce multivariate polynomials to one variable
    Reduce {
        #[arg(long)]
        input: PathBuf,
        /// number of variables (default: highest index used)
        #[arg(long)]
        vars: Option<usize>,
        #[arg(long, default_value = "pattern.txt")]
        out: PathBuf,
    },
    /// Re-check a certificate file
    Verify {
        #[arg(long)]
        certificate: PathBuf,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Certification { .. }
        | Error::Infeasible(_)
        | Error::StepLimit(_)
        | Error::Bracket(_)
        | Error::Unrepresentable { .. } => EXIT_CERTIFICATION,
        Error::Domain(_) | Error::Index { .. } | Error::Config(_) | Error::Parse { .. } => EXIT_INVALID,
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Deltas { h, l, n, depth, out: path } => {
            let h: DimensionFunction = need(cfg.pick(h, "h")?, "h")?.parse()?;
            let l = need(cfg.pick(l, "L")?, "L")?;
            let n = cfg.pick(n, "N")?.unwrap_or(1);
            let depth = need(cfg.pick(depth, "depth")?, "depth")?;
            let seq = build_delta_sequence(&h, l, n, depth)?;
            let report = check_sequence(&seq);
            if !report.ok() {
                let v = &report.violations[0];
                return Err(Error::Certification {
                    step: v.m,
                    reason: format!("replay rejected level {}: {}", v.m, v.what),
                });
            }
            let mut json = serde_json::to_value(&seq).expect("serializable");
            json["verification"] = serde_json::json!({
                "inequalities_checked": report.inequalities_checked,
                "violations": 0,
            });
            write_atomic(&path, &pretty(&json))?;
            writeln!(out, "{} scales written to {}", seq.deltas().len(), path.display()).ok();
            Ok(EXIT_OK)
        }
        Command::Witness {
            deltas,
            pattern,
            pattern_file,
            mode,
            ranks,
            depth,
            l,
            n,
            out: path,
        } => {
            let seq = load_deltas(&deltas)?;
            if let Some(l) = cfg.pick(l, "L")? {
                if l != seq.L() {
                    return Err(Error::Config(format!("L = {l} but the sequence was built for L = {}", seq.L())));
                }
            }
            if let Some(n) = cfg.pick(n, "N")? {
                if n != seq.N() {
                    return Err(Error::Config(format!("N = {n} but the sequence was built for N = {}", seq.N())));
                }
            }
            let lines = pattern_lines(pattern.or_else(|| cfg.get("pattern").map(String::from)), pattern_file.as_deref())?;
            let mode = match mode {
                Some(m) => m,
                None => match cfg.get("mode") {
                    None | Some("preimage") => ModeArg::Preimage,
                    Some("image") => ModeArg::Image,
                    Some(other) => return Err(Error::Config(format!("unknown mode {other:?}"))),
                },
            };
            let ranks = match ranks.or_else(|| cfg.get("ranks").map(String::from)) {
                None => None,
                Some(text) => Some(
                    text.split(',')
                        .map(|r| r.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad rank {r:?}"))))
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            let depth = need(cfg.pick(depth, "depth")?, "depth")?;
            let polys = lines
                .iter()
                .map(|(line, text)| Polynomial::parse_line(text, *line))
                .collect::<Result<Vec<_>>>()?;
            let spec = match mode {
                ModeArg::Preimage => PatternSpec::preimage(&polys, ranks, seq, depth)?,
                ModeArg::Image => {
                    let affines = polys
                        .iter()
                        .map(|p| {
                            if p.degree() != 1 {
                                return Err(Error::Config(format!("image mode takes affine maps, got {p}")));
                            }
                            AffineMap::new(p.coeffs()[1].clone(), p.coeffs()[0].clone())
                        })
                        .collect::<Result<Vec<_>>>()?;
                    PatternSpec::image(&affines, ranks, seq, depth)?
                }
            };
            let cert = search(&spec)?;
            let report = verify_certificate(&cert);
            write_atomic(&path, &pretty(&cert))?;
            summarize(out, &cert);
            if report.ok {
                writeln!(out, "verified").ok();
                Ok(EXIT_OK)
            } else {
                let f = report.failure.expect("failure recorded");
                writeln!(out, "verification failed at step {:?}: {}", f.step, f.reason).ok();
                Ok(EXIT_CERTIFICATION)
            }
        }
        Command::CertifyMeasure {
            deltas,
            h,
            n1,
            n2,
            levels,
            out: path,
        } => {
            let seq = load_deltas(&deltas)?;
            let h: DimensionFunction = match cfg.pick(h, "h")? {
                Some(text) => text.parse()?,
                None => seq.h().clone(),
            };
            let n1 = cfg.pick(n1, "N1")?.unwrap_or(1);
            let n2 = cfg.pick(n2, "N2")?.unwrap_or(1);
            let levels = cfg.pick(levels, "levels")?.unwrap_or(seq.depth());
            let cover = certify_measure_decay(&seq, &h, n1, n2, levels)?;
            let mut buf = Vec::new();
            cover.write_csv(&mut buf).expect("in-memory write");
            write_atomic(&path, &String::from_utf8(buf).expect("ascii"))?;
            let bad = cover.decay_violations();
            writeln!(out, "{} levels written to {}", cover.levels.len(), path.display()).ok();
            if bad.is_empty() {
                Ok(EXIT_OK)
            } else {
                writeln!(out, "bound not below 1/n at levels {bad:?}").ok();
                Ok(EXIT_CERTIFICATION)
            }
        }
        Command::Reduce { input, vars, out: path } => {
            let text = read(&input)?;
            let rows: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty())
                .collect();
            let vars = vars.unwrap_or_else(|| highest_variable(&text).max(1));
            let polys = rows
                .iter()
                .map(|(line, l)| MultiPolynomial::parse_line(l, vars, *line))
                .collect::<Result<Vec<_>>>()?;
            let (lambdas, uni) = reduce_multivariate(&polys)?;
            let mut body = format!(
                "# lambdas: {}\n",
                lambdas.iter().map(short).collect::<Vec<_>>().join(", ")
            );
            for p in &uni {
                body.push_str(&p.to_string());
                body.push('\n');
            }
            write_atomic(&path, &body)?;
            write!(out, "{body}").ok();
            Ok(EXIT_OK)
        }
        Command::Verify { certificate } => {
            let cert: WitnessCertificate = serde_json::from_str(&read(&certificate)?)
                .map_err(|e| Error::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?;
            let report = verify_certificate(&cert);
            if report.ok {
                writeln!(out, "verified").ok();
                Ok(EXIT_OK)
            } else {
                let f = report.failure.expect("failure recorded");
                match f.step {
                    Some(s) => writeln!(out, "rejected at step {s}: {}", f.reason),
                    None => writeln!(out, "rejected: {}", f.reason),
                }
                .ok();
                Ok(EXIT_CERTIFICATION)
            }
        }
    }
}

fn need<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required setting {key}")))
}

fn short(x: &crate::numerics::Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format_rational(x)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_deltas(path: &Path) -> Result<DeltaSequence> {
    let seq: DeltaSequence = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    seq.validate()?;
    Ok(seq)
}

/// Pattern entries with their source line numbers.
fn pattern_lines(inline: Option<String>, file: Option<&Path>) -> Result<Vec<(usize, String)>> {
    let (text, sep) = match (inline, file) {
        (Some(_), Some(_)) => return Err(Error::Config("give either --pattern or --pattern-file".into())),
        (Some(t), None) => (t, ';'),
        (None, Some(p)) => (read(p)?, '\n'),
        (None, None) => return Err(Error::Config("missing required setting pattern".into())),
    };
    let items: Vec<(usize, String)> = text
        .split(sep)
        .enumerate()
        .map(|(i, s)| (i + 1, s.split('#').next().unwrap_or("").trim().to_string()))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Config("pattern is empty".into()));
    }
    Ok(items)
}

fn highest_variable(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'x' && (i == 0 || !bytes[i - 1].is_ascii_alphanumeric()) {
            let digits: String = text[i + 1..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(k) = digits.parse::<usize>() {
                best = best.max(k);
            }
        }
    }
    best
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn summarize(out: &mut dyn Write, cert: &WitnessCertificate) {
    for s in &cert.steps {
        writeln!(out, "level {:>3}  map {}  cell {}  X {}", s.m, s.owner, s.c, s.x).ok();
    }
    writeln!(out, "witness {}", format_rational(&cert.witness)).ok();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_count_from_text() {
        assert_eq!(highest_variable("x1*x2 - x3^2\nx12"), 12);
        assert_eq!(highest_variable("max + 1"), 0);
    }

    #[test]
    fn pattern_separators() {
        let p = pattern_lines(Some("x; 2*x+1 ;x^2".into()), None).unwrap();
        assert_eq!(p, vec![(1, "x".into()), (2, "2*x+1".into()), (3, "x^2".into())]);
        assert!(pattern_lines(None, None).is_err());
    }
}
