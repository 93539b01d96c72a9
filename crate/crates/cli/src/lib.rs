//! Command-line front end: body construction, distance runs, certificates,
//! theorem suites, equilateral families and SVG rendering.

pub mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bmdist::bmd::{estimate_distance, map_from_json, position_ratio, DistanceConfig};
use bmdist::certificate::{certify_euclidean_distance, verify_certificate, Certification};
use bmdist::constructions::equilateral::{default_generator, EquilateralGenerator};
use bmdist::constructions::{hanner, hanner_positioned, standard_body, HannerSpec};
use bmdist::geometry::{apply_map, json};
use bmdist::oracles::{random_symmetric_polygon, theorem_suite, SuiteConfig};
use bmdist::{BodyExpr, LinearMap};
use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub use render::render_svg;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("body {index} has dimension {dim}; render needs planar bodies")]
    NotPlanar { index: usize, dim: usize },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] bmdist::Error),
    /// The command ran but its result is a failure (e.g. a theorem suite case).
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::NotPlanar { .. } | CliError::Read { .. } => 2,
            CliError::Core(e) if e.is_validation() => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bmdist", version, about = "Banach-Mazur distances, cones and contact-point certificates")]
struct Cli {
    /// Random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance (optimizer tolerance for `distance`, case tolerance for `theorem`).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of optimizer restarts.
    #[arg(long, global = true, default_value_t = 200)]
    restarts: usize,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or normalize a body and print it as JSON.
    Body(BodyArgs),
    /// Estimate the Banach-Mazur distance between two bodies.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Certify the distance of a body to the Euclidean ball.
    Certify {
        #[arg(long)]
        body: String,
    },
    /// Re-check the arithmetic of a certificate produced by `certify`.
    VerifyCertificate {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Run a randomized theorem suite.
    Theorem {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 10)]
        cases: usize,
        /// Apexes or ℓ1 summands added to the planar bases.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// N of the equilateral family (cor-equilateral only).
        #[arg(long = "equilateral-n", default_value_t = 2)]
        equilateral_n: usize,
    },
    /// Build an experimental equilateral family and print its distance matrix as CSV.
    Equilateral {
        #[arg(long = "n", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Draw planar bodies as an SVG overlay.
    Render {
        /// Body to draw; repeat for overlays.
        #[arg(long = "body")]
        bodies: Vec<String>,
        /// Witness map (or a `distance` output) for exactly two bodies K, L:
        /// draws K, W(L) and the outer homothetic copy of K.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

/// Body sources; bodies elsewhere are given as a JSON file path, inline JSON,
/// `hanner:SPEC` or `std:NAME:DIM[:PARAM]`.
#[derive(Debug, Args)]
struct BodyArgs {
    #[command(flatten)]
    source: BodySource,
    /// Hanner polytope in the position whose contact points certify `√n`.
    #[arg(long)]
    positioned: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct BodySource {
    /// Hanner polytope from a spec such as `l1(seg,linf(seg,seg))`.
    #[arg(long)]
    hanner: Option<String>,
    /// Standard body `NAME:DIM[:PARAM]`.
    #[arg(long)]
    standard: Option<String>,
    /// Random 0-symmetric polygon drawn with `--seed`.
    #[arg(long)]
    random_polygon: bool,
    /// Body JSON file to validate and re-emit.
    #[arg(long)]
    file: Option<PathBuf>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn parse_json(text: &str, what: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("{what} is not valid JSON: {e}")))
}

fn standard(spec: &str) -> CliResult<BodyExpr> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || CliError::Usage(format!("standard body `{spec}` should look like NAME:DIM or NAME:DIM:PARAM"));
    if !(2..=3).contains(&parts.len()) {
        return Err(usage());
    }
    let dim = parts[1].parse().map_err(|_| usage())?;
    let param = parts.get(2).map(|p| p.parse()).transpose().map_err(|_| usage())?;
    Ok(standard_body(parts[0], dim, param)?)
}

/// Resolves a body argument.
pub fn load_body(arg: &str) -> CliResult<BodyExpr> {
    if let Some(spec) = arg.strip_prefix("hanner:") {
        return Ok(hanner(&spec.parse::<HannerSpec>()?)?);
    }
    if let Some(spec) = arg.strip_prefix("std:") {
        return standard(spec);
    }
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { read(Path::new(arg))? };
    Ok(json::from_json(&parse_json(&text, arg)?)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn body_command(body_args: &BodyArgs, seed: u64) -> CliResult<String> {
    let args = &body_args.source;
    if body_args.positioned && args.hanner.is_none() {
        return Err(CliError::Usage("--positioned only applies to --hanner".into()));
    }
    let body = if let Some(spec) = &args.hanner {
        let spec: HannerSpec = spec.parse()?;
        if body_args.positioned {
            hanner_positioned(&spec)?
        } else {
            hanner(&spec)?
        }
    } else if let Some(spec) = &args.standard {
        standard(spec)?
    } else if args.random_polygon {
        random_symmetric_polygon(&mut ChaCha8Rng::seed_from_u64(seed))
    } else {
        let path = args.file.as_ref().expect("clap enforces one body source");
        json::from_json(&parse_json(&read(path)?, &path.display().to_string())?)?
    };
    Ok(pretty(&json::to_json(&body)))
}

fn witness_map(path: &Path) -> CliResult<LinearMap> {
    let v = parse_json(&read(path)?, &path.display().to_string())?;
    Ok(map_from_json(v.get("witness").unwrap_or(&v))?)
}

fn render_command(bodies: &[String], witness: Option<&Path>) -> CliResult<String> {
    let mut bodies = bodies.iter().map(|b| load_body(b)).collect::<CliResult<Vec<_>>>()?;
    if let Some(path) = witness {
        if bodies.len() != 2 {
            return Err(CliError::Usage("--witness needs exactly two bodies, K then L".into()));
        }
        let w = witness_map(path)?;
        let (k, l) = (&bodies[0], &bodies[1]);
        if k.dim() != 2 || l.dim() != 2 {
            let (index, dim) = if k.dim() != 2 { (0, k.dim()) } else { (1, l.dim()) };
            return Err(CliError::NotPlanar { index, dim });
        }
        let rho = position_ratio(k, l, &w)?;
        let image = apply_map(&w, l)?;
        let mut outer_map = LinearMap::identity(2).scaled(rho);
        outer_map.pre = -&w.post;
        outer_map.post = w.post.clone();
        let outer = apply_map(&outer_map, k)?;
        bodies = vec![bodies[0].clone(), image, outer];
    }
    render_svg(&bodies)
}

fn equilateral_command(n: usize, count: usize, cfg: &DistanceConfig) -> CliResult<String> {
    let family = default_generator().generate(n, count)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend((0..family.len()).map(|i| i.to_string()));
    let csv_err = |e: csv::Error| CliError::Failed(format!("CSV output: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    let mut d = vec![vec![1.0; family.len()]; family.len()];
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let est = estimate_distance(&family[i], &family[j], cfg)?;
            d[i][j] = est.upper;
            d[j][i] = est.upper;
        }
    }
    for (i, row) in d.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(format!("CSV output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of numbers is UTF-8"))
}

fn execute(cli: &Cli) -> CliResult<String> {
    let distance_cfg = |symmetric: bool| DistanceConfig {
        restarts: cli.restarts,
        seed: cli.seed,
        tol: cli.tol.unwrap_or(DistanceConfig::default().tol),
        symmetric,
        ..DistanceConfig::default()
    };
    match &cli.command {
        Command::Body(args) => body_command(args, cli.seed),
        Command::Distance { a, b } => {
            let (k, l) = (load_body(a)?, load_body(b)?);
            let cfg = distance_cfg(k.is_symmetric() && l.is_symmetric());
            Ok(pretty(&estimate_distance(&k, &l, &cfg)?.to_json()))
        }
        Command::Certify { body } => Ok(pretty(&certify_euclidean_distance(&load_body(body)?)?.to_json())),
        Command::VerifyCertificate { cert } => {
            let v = parse_json(&read(cert)?, &cert.display().to_string())?;
            let replay = verify_certificate(&Certification::from_json(&v)?);
            let out = pretty(&serde_json::json!({
                "valid": replay.valid,
                "residual": replay.residual,
                "min_weight": replay.min_weight,
                "weight_sum": replay.weight_sum,
                "radius_spread": replay.radius_spread,
            }));
            if replay.valid {
                Ok(out)
            } else {
                emit(cli.out.as_deref(), &out)?;
                Err(CliError::Core(bmdist::Error::NotOptimalPosition))
            }
        }
        Command::Theorem { suite, cases, m, equilateral_n } => {
            let cfg = SuiteConfig {
                cases: *cases,
                seed: cli.seed,
                tol: cli.tol.unwrap_or(SuiteConfig::default().tol),
                restarts: cli.restarts,
                m: *m,
                equilateral_n: *equilateral_n,
            };
            let report = theorem_suite(suite, &cfg)?;
            let out = pretty(&report.to_json());
            // the open-question search reports candidates, it does not assert
            if report.all_pass() || suite == "question-l1-search" {
                Ok(out)
            } else {
                emit(cli.out.as_deref(), &out)?;
                let failed = report.cases.iter().filter(|c| !c.pass).count();
                Err(CliError::Failed(format!("{failed} case(s) of {suite} failed")))
            }
        }
        Command::Equilateral { n, count } => equilateral_command(*n, *count, &distance_cfg(true)),
        Command::Render { bodies, witness } => render_command(bodies, witness.as_deref()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.restarts == 0 {
        eprintln!("error: --restarts must be positive");
        return 2;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("error: --tol must be a positive number");
            return 2;
        }
    }
    let result = execute(&cli).and_then(|text| emit(cli.out.as_deref(), &text));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
