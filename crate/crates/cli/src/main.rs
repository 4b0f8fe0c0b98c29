//! `schottky-zeta`: resonances of Schottky surfaces and their covers from the command line.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use schottky_zeta::covers::{cover_invariants, factorization_check};
use schottky_zeta::harness::{
    run_experiment, sample_points, write_experiment, write_outputs, Cover, CoverSource, ExperimentConfig,
    ExperimentKind, SchemeSource, Sidecar, Table,
};
use schottky_zeta::resonance::{
    count_m, count_n, locate_zeros, zeta_source, BoxOptions, CountOptions, LocateOptions, Rect, ZetaFunction,
    ZetaMethod,
};
use schottky_zeta::thermo::{hausdorff_dimension_with, pressure, DEFAULT_DIMENSION_Q};

/// `println!` that ignores write errors such as a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}
use schottky_zeta::{Error, SchottkyScheme};

const THREADS_ENV: &str = "SCHOTTKY_ZETA_THREADS";

#[derive(Parser)]
#[command(name = "schottky-zeta", version, about = "Resonances of Schottky surfaces and their finite covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct Source {
    /// Scheme file (JSON).
    #[arg(long, global = true)]
    scheme: Option<PathBuf>,
    /// Named fixture: cylinder[:ℓ], pants[:ℓ1,ℓ2,sep], integral[:a,b,c,d;a,b,c,d].
    #[arg(long, global = true, default_value = "pants")]
    fixture: String,
    /// Cover file (JSON, 1-indexed permutations).
    #[arg(long, global = true, conflicts_with_all = ["congruence", "regular"])]
    cover: Option<PathBuf>,
    /// Congruence cover `q,kind` with kind 0 = Γ₀, 1 = Γ₁, 2 = Γ.
    #[arg(long, global = true, value_parser = parse_congruence, conflicts_with = "regular")]
    congruence: Option<(u64, u8)>,
    /// Regular cover, e.g. `Z6:1`, `Z2xZ2:1,0;0,1`, `perm:2,1,3;1,3,2`.
    #[arg(long, global = true)]
    regular: Option<String>,
}

#[derive(Args, Serialize, Clone)]
struct Numerics {
    /// Monomial order per disk.
    #[arg(long = "Q", default_value_t = 40)]
    q: usize,
    /// Disk refinement level.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// auto, transfer or euler.
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    method: ZetaMethod,
    /// Word cutoff for Euler products.
    #[arg(long, default_value_t = 12)]
    cutoff: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Schottky conditions and report the gap and contraction bound.
    Validate(#[command(flatten)] Source),
    /// Hausdorff dimension of the limit set.
    Delta {
        #[command(flatten)]
        source: Source,
        #[arg(long = "Q", default_value_t = DEFAULT_DIMENSION_Q)]
        q: usize,
    },
    /// Pressure on a grid `a:b:n`, as CSV.
    Pressure {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        grid: String,
        #[arg(long = "Q", default_value_t = DEFAULT_DIMENSION_Q)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twisted zeta value at one point.
    Zeta {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        s: Complex64,
    },
    /// Zeta values on a grid, as CSV.
    ZetaGrid {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        /// `x0,x1,y0,y1`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rect)]
        rect: Rect,
        #[arg(long, default_value_t = 11)]
        nx: usize,
        #[arg(long, default_value_t = 11)]
        ny: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros in a rectangle, as CSV.
    Scan {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rect)]
        rect: Rect,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `N(r)`: zeros with `|s| ≤ r`.
    CountN {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        #[arg(long)]
        r: f64,
        /// Use this `δ` instead of computing it.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// `M(σ, T)`: zeros with `Re s ≥ σ`, `|Im s − T| ≤ 1`.
    CountM {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Cover invariants as JSON.
    CoverReport {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 8)]
        max_word_len: usize,
    },
    /// Regular-representation determinant against the product over characters.
    FactorCheck {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        num: Numerics,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// `x0,x1,y0,y1`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rect, default_value = "-0.5,1.5,-6,6")]
        sample_rect: Rect,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
    },
    /// Scripted sweep driven by a JSON configuration.
    Experiment {
        #[arg(long, required_unless_present = "print_config")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_kind, required_unless_present = "print_config")]
        kind: Option<ExperimentKind>,
        /// Print a starting configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
}

fn config_error(msg: impl ToString) -> Error {
    Error::InvalidParameter(msg.to_string())
}

fn parse_floats(text: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number `{x}`")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let v = parse_floats(text, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn parse_rect(text: &str) -> Result<Rect, String> {
    let v = parse_floats(text, 4)?;
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn parse_congruence(text: &str) -> Result<(u64, u8), String> {
    let (q, k) = text.split_once(',').ok_or("expected `q,kind`")?;
    Ok((
        q.trim().parse().map_err(|_| format!("bad modulus `{q}`"))?,
        k.trim().parse().map_err(|_| format!("bad kind `{k}`"))?,
    ))
}

fn parse_method(text: &str) -> Result<ZetaMethod, String> {
    match text {
        "auto" => Ok(ZetaMethod::Auto),
        "transfer" => Ok(ZetaMethod::Transfer),
        "euler" => Ok(ZetaMethod::Euler),
        _ => Err(format!("unknown method `{text}`")),
    }
}

fn parse_kind(text: &str) -> Result<ExperimentKind, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

impl Source {
    fn scheme_source(&self) -> SchemeSource {
        match &self.scheme {
            Some(path) => SchemeSource::File { path: path.clone() },
            None => SchemeSource::Fixture {
                spec: self.fixture.clone(),
            },
        }
    }

    fn load(&self) -> Result<SchottkyScheme<f64>, Error> {
        self.scheme_source().load()
    }

    fn cover_source(&self) -> CoverSource {
        match (&self.cover, self.congruence, &self.regular) {
            (Some(path), _, _) => CoverSource::File { path: path.clone() },
            (_, Some((q, kind)), _) => CoverSource::Congruence { q, kind },
            (_, _, Some(spec)) => CoverSource::Regular { spec: spec.clone() },
            _ => CoverSource::Trivial,
        }
    }

    fn resolve(&self) -> Result<(SchottkyScheme<f64>, Cover), Error> {
        let scheme = self.load()?;
        let cover = self.cover_source().resolve(&scheme)?;
        Ok((scheme, cover))
    }

    fn zeta(&self, num: &Numerics) -> Result<(SchottkyScheme<f64>, Cover, Box<dyn ZetaFunction>), Error> {
        let (scheme, cover) = self.resolve()?;
        let zeta = zeta_source(&scheme, &cover.rep(), num.method, num.q, num.level, num.cutoff)?;
        Ok((scheme, cover, zeta))
    }
}

fn resolve_delta(scheme: &SchottkyScheme<f64>, given: Option<f64>) -> Result<f64, Error> {
    match given {
        Some(d) => Ok(d),
        None => Ok(hausdorff_dimension_with(scheme, DEFAULT_DIMENSION_Q)?.delta),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn argv() -> Vec<String> {
    std::env::args().collect()
}

/// CSV to `out` (with a sidecar) or to stdout.
fn emit_table(table: &Table, out: &Option<PathBuf>, command: &str, config: serde_json::Value) -> Result<(), Error> {
    match out {
        Some(path) => {
            let side = write_outputs(path, table, &Sidecar::new(command, config))?;
            eprintln!("wrote {} and {}", path.display(), side.display());
        }
        None => {
            let stdout = std::io::stdout();
            table.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

/// `Ok(true)` on success, `Ok(false)` on a reported mathematical failure.
fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Validate(source) => {
            let scheme = match &source.scheme {
                Some(path) => SchottkyScheme::load(path)?,
                None => source.load()?,
            };
            match scheme.validate() {
                Ok(report) => {
                    print_json(&json!({"valid": true, "rank": scheme.rank(), "report": report}))?;
                    Ok(true)
                }
                Err(failure) => {
                    print_json(&json!({"valid": false, "failure": failure, "message": failure.to_string()}))?;
                    Ok(false)
                }
            }
        }
        Command::Delta { source, q } => {
            let report = hausdorff_dimension_with(&source.load()?, q)?;
            print_json(&report)?;
            Ok(report.consistent)
        }
        Command::Pressure { source, grid, q, out } => {
            let parts: Vec<&str> = grid.split(':').collect();
            let [a, b, n] = parts.as_slice() else {
                return Err(config_error("grid must be `a:b:n`"));
            };
            let a: f64 = a.parse().map_err(|_| config_error("bad grid start"))?;
            let b: f64 = b.parse().map_err(|_| config_error("bad grid end"))?;
            let n: usize = n.parse().map_err(|_| config_error("bad grid count"))?;
            if n == 0 || !(a.is_finite() && b.is_finite()) {
                return Err(config_error("grid needs finite ends and n ≥ 1"));
            }
            let scheme = source.load()?;
            let mut table = Table::new(&["sigma", "pressure"]);
            for i in 0..n {
                let sigma = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                table.push(vec![sigma.into(), pressure(&scheme, sigma, q)?.into()]);
            }
            emit_table(&table, &out, "pressure", json!({"argv": argv(), "source": source, "grid": grid, "q": q}))?;
            Ok(true)
        }
        Command::Zeta { source, num, s } => {
            let (_, cover, zeta) = source.zeta(&num)?;
            let v = zeta.eval(s)?;
            let value = v.log.exp();
            print_json(&json!({
                "s": [s.re, s.im],
                "value": [value.re, value.im],
                "log_abs": v.log.re,
                "arg": v.arg(),
                "precision_warning": v.precision_warning,
                "degree": cover.degree(),
                "source": zeta.describe(),
            }))?;
            Ok(!v.precision_warning)
        }
        Command::ZetaGrid { source, num, rect, nx, ny, out } => {
            if nx < 1 || ny < 1 {
                return Err(config_error("nx and ny must be positive"));
            }
            let (_, _, zeta) = source.zeta(&num)?;
            let at = |lo: f64, hi: f64, i: usize, n: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            let mut table = Table::new(&["re_s", "im_s", "re_det", "im_det", "abs_det"]);
            for i in 0..nx {
                for j in 0..ny {
                    let s = Complex64::new(at(rect.re_min, rect.re_max, i, nx), at(rect.im_min, rect.im_max, j, ny));
                    let d = zeta.eval(s)?.log.exp();
                    table.push(vec![s.re.into(), s.im.into(), d.re.into(), d.im.into(), d.norm().into()]);
                }
            }
            let config = json!({"argv": argv(), "source": source, "numerics": num, "rect": rect, "nx": nx, "ny": ny});
            emit_table(&table, &out, "zeta-grid", config)?;
            Ok(true)
        }
        Command::Scan { source, num, rect, tol, out } => {
            let (_, _, zeta) = source.zeta(&num)?;
            let opts = LocateOptions {
                tol,
                ..LocateOptions::default()
            };
            let report = locate_zeros(zeta.as_ref(), &rect, &opts)?;
            let mut table = Table::new(&["re", "im", "multiplicity"]);
            let mut zeros: Vec<_> = report.zeros.iter().collect();
            zeros.sort_by(|a, b| {
                let key = |z: &Complex64| ((z.re / tol).round(), z.im);
                key(&a.location).partial_cmp(&key(&b.location)).expect("finite zeros")
            });
            for z in zeros {
                table.push(vec![z.location.re.into(), z.location.im.into(), z.multiplicity.into()]);
            }
            let config = json!({"argv": argv(), "source": source, "numerics": num, "rect": rect, "tol": tol});
            emit_table(&table, &out, "scan", config)?;
            eprintln!(
                "{}",
                serde_json::to_string(&json!({"winding": report.winding, "unresolved": report.unresolved, "diagnostics": report.diagnostics}))?
            );
            Ok(report.is_resolved())
        }
        Command::CountN { source, num, r, delta } => {
            let (scheme, _, zeta) = source.zeta(&num)?;
            let delta = resolve_delta(&scheme, delta)?;
            let report = count_n(zeta.as_ref(), delta, r, &CountOptions::default())?;
            out!("{}", report.count);
            out!("{}", serde_json::to_string(&json!({"delta": delta, "report": report, "source": zeta.describe()}))?);
            Ok(report.unresolved == 0)
        }
        Command::CountM { source, num, sigma, t, delta } => {
            let (scheme, _, zeta) = source.zeta(&num)?;
            let delta = resolve_delta(&scheme, delta)?;
            let report = count_m(zeta.as_ref(), delta, sigma, t, &BoxOptions::default())?;
            out!("{}", report.count);
            out!("{}", serde_json::to_string(&json!({"delta": delta, "report": report, "source": zeta.describe()}))?);
            Ok(true)
        }
        Command::CoverReport { source, max_word_len } => {
            let (scheme, cover) = source.resolve()?;
            let inv = cover_invariants(&scheme, &cover.action, max_word_len)?;
            print_json(&inv)?;
            Ok(inv.ell0_certified)
        }
        Command::FactorCheck {
            source,
            num,
            samples,
            sample_rect,
            threshold,
        } => {
            let (scheme, cover) = source.resolve()?;
            let group = cover
                .abelian
                .as_ref()
                .ok_or_else(|| config_error("factor-check needs an abelian --regular cover"))?;
            if samples == 0 {
                return Err(config_error("samples must be positive"));
            }
            let r = sample_rect;
            let points = sample_points([r.re_min, r.re_max, r.im_min, r.im_max], samples);
            let report = factorization_check(&scheme, group, &points, num.q, num.level)?;
            out!("{:e}", report.max_relative_error);
            out!("{}", serde_json::to_string(&report)?);
            Ok(report.max_relative_error < threshold)
        }
        Command::Experiment { config, kind, print_config } => {
            if print_config {
                let csv = format!("out/{}.csv", kind.map_or("experiment", |k| k.name()));
                let cfg = ExperimentConfig::new(
                    SchemeSource::Fixture { spec: "cylinder:2".into() },
                    vec![
                        CoverSource::Trivial,
                        CoverSource::Regular { spec: "Z2:1".into() },
                        CoverSource::Regular { spec: "Z3:1".into() },
                    ],
                    csv,
                );
                out!("{}", cfg.to_json()?);
                return Ok(true);
            }
            let (Some(path), Some(kind)) = (config, kind) else {
                return Err(config_error("--config and --kind are required"));
            };
            let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
            let report = run_experiment(&cfg, kind)?;
            let side = write_experiment(&cfg, &report)?;
            eprintln!("wrote {} and {}", cfg.output.csv.display(), side.display());
            match report.failure {
                None => Ok(true),
                Some(e) if e.is_config_error() => Err(e),
                Some(e) => {
                    eprintln!("error: {e}");
                    Ok(false)
                }
            }
        }
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config_error(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config_error(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|_| run(cli.command));
    let _ = std::io::stdout().flush();
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
