use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use spectral_ball::format::{g17, to_json};
use spectral_ball::pipeline::{parse_pipeline, parse_poly};
use spectral_ball::verify::{
    falsify_diag_twist, fiber_affine_test, fiber_scan, run_default_suite, SuiteConfig, Verdict,
};
use spectral_ball::{Automorphism64, EntirePoly64, Error, Mat2d};

const AFFINE_RADII: [f64; 3] = [1.0, 2.0, 4.0];
const CSV_HEADER: &str = "re_lambda,im_lambda,re_f12,im_f12,re_f21,im_f21,residual_contrib";

#[derive(Debug, Parser)]
#[command(name = "spectral-ball", version, about = "Automorphisms of the 2x2 spectral ball")]
struct Cli {
    /// RNG seed.
    #[arg(long, global = true, env = "SPECTRAL_BALL_SEED", default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the default verification suite and write one JSON report per check.
    Verify(VerifyArgs),
    /// Fit a constant conjugator to a diagonal twist along the fiber.
    Falsify(FiberArgs),
    /// Tabulate a diagonal twist along a fiber circle as CSV.
    FiberScan(ScanArgs),
    /// Apply a pipeline of automorphisms to one matrix.
    Apply(ApplyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Upper bound applied to every check threshold.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    workers: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FiberArgs {
    /// Coefficients of φ in ascending degree, e.g. `[0,1]` or `[[0,0],[1,0]]`.
    #[arg(long)]
    phi: String,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    fiber: FiberArgs,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    #[arg(long)]
    pipeline: PathBuf,
    /// Matrix as `[[[re,im],[re,im]],[[re,im],[re,im]]]`.
    #[arg(long)]
    input: PathBuf,
    /// Also invert the pipeline and report `‖f⁻¹(f(x)) − x‖ / (1 + ‖x‖)`.
    #[arg(long)]
    check_roundtrip: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    /// Check failure or domain error.
    Domain(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Domain(_) => 1,
            Self::Usage(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_to(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json_line(value: &Value) -> String {
    let mut s = to_json(value).expect("reports serialize");
    s.push('\n');
    s
}

fn parse_phi(text: &str) -> Result<EntirePoly64, Failure> {
    parse_poly(text).map_err(|e| Failure::Usage(format!("--phi: {e}")))
}

fn check_radius(radius: f64) -> Result<(), Failure> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--radius must be positive, got {radius}")))
    }
}

fn verify(seed: u64, args: &VerifyArgs) -> Outcome {
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let samples = usize::try_from(args.samples)
        .map_err(|_| Failure::Usage("--samples out of range".into()))?;
    let cfg = SuiteConfig {
        seed,
        samples,
        tol: args.tol,
        workers: args.workers as usize,
    };
    let reports = run_default_suite(&cfg)?;
    let text: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
    write_to(Some(&args.out), &text)?;
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.check.as_str())
        .collect();
    eprintln!("{} checks, {} failed", reports.len(), failed.len());
    for check in &failed {
        eprintln!("FAIL {check}");
    }
    Ok(failed.is_empty())
}

fn falsify(args: &FiberArgs) -> Outcome {
    let phi = parse_phi(&args.phi)?;
    check_radius(args.radius)?;
    let fit = falsify_diag_twist(&phi, args.radius, args.count as usize)?;
    let affine = fiber_affine_test(&phi, &AFFINE_RADII, args.count.max(3) as usize)?;
    let mut text = json_line(&json!({ "fit": fit }));
    text.push_str(&json_line(&json!({ "affine": affine })));
    write_to(None, &text)?;
    eprintln!("verdict: {:?}", fit.verdict);
    Ok(fit.verdict != Verdict::Inconclusive)
}

fn fiber_scan_csv(args: &ScanArgs) -> Outcome {
    let phi = parse_phi(&args.fiber.phi)?;
    check_radius(args.fiber.radius)?;
    let scan = fiber_scan(&phi, args.fiber.radius, args.fiber.count as usize)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &scan.rows {
        let mut cells = vec![g17(row.lambda.re), g17(row.lambda.im)];
        match row.image {
            Some((f12, f21)) => cells.extend([f12.re, f12.im, f21.re, f21.im].map(g17)),
            None => cells.extend(["inf"; 4].map(String::from)),
        }
        cells.push(g17(row.residual_contrib));
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_to(args.out.as_deref(), &text)?;
    let residual = scan.fit.map_or("none".to_string(), |f| g17(f.residual));
    eprintln!(
        "rows: {}, overflow rows: {}, fit residual: {residual}",
        scan.rows.len(),
        scan.overflow_rows
    );
    Ok(true)
}

fn apply(args: &ApplyArgs) -> Outcome {
    let f: Automorphism64 = parse_pipeline(&read(&args.pipeline)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.pipeline.display())))?;
    let x: Mat2d = serde_json::from_str(&read(&args.input)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.input.display())))?;
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be nonnegative, got {}", args.tol)));
    }
    let y = f.apply_with_tol(&x, args.tol)?;
    let mut text = json_line(&json!(y));
    let mut pass = true;
    if args.check_roundtrip {
        let back = f.invert()?.apply_with_tol(&y, args.tol)?;
        let error = (back - x).frobenius_norm() / (1.0 + x.frobenius_norm());
        pass = error <= args.tol;
        text.push_str(&json_line(&json!({
            "round_trip_error": error,
            "tol": args.tol,
            "pass": pass,
        })));
    }
    write_to(args.out.as_deref(), &text)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(a) => verify(cli.seed, a),
        Command::Falsify(a) => falsify(a),
        Command::FiberScan(a) => fiber_scan_csv(a),
        Command::Apply(a) => apply(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            let (Failure::Domain(msg) | Failure::Usage(msg)) = &failure;
            eprintln!("error: {msg}");
            ExitCode::from(failure.code())
        }
    }
}
