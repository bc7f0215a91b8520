//! Command-line front end: apply fractional operators to sequence files,
//! emit Grünwald–Letnikov weights, run the identity-verification suites, and
//! benchmark the fast convolution path.
//!
//! Exit statuses are a stable contract: 0 success, 1 failed verification or
//! benchmark disagreement, 2 usage/parse errors (including unknown check
//! ids), 3 domain errors (bad orders, misaligned grids, singular kernels).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use discfrac::grid::format_sig12;
use discfrac::verify::to_jsonl;
use discfrac::{
    apply_fast, gl_apply, gl_apply_fast, gl_weights, run_suite, Error, Family, Formulation,
    GridFunction, Kind, OperatorSpec, Side, WeightMode,
};

#[derive(Parser)]
#[command(
    name = "discfrac",
    version,
    about = "Discrete fractional sums and differences on unit grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a fractional operator to a sequence file
    Apply(ApplyArgs),
    /// Emit a Grünwald–Letnikov weight sequence
    Weights(WeightsArgs),
    /// Run identity checks and write JSONL reports
    Verify(VerifyArgs),
    /// Time gl_apply vs gl_apply_fast and check agreement
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Delta,
    Nabla,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sum,
    Difference,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Riemann,
    Binomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Difference,
    Sum,
}

impl From<FamilyArg> for Family {
    fn from(v: FamilyArg) -> Self {
        match v {
            FamilyArg::Delta => Family::Delta,
            FamilyArg::Nabla => Family::Nabla,
        }
    }
}

impl From<SideArg> for Side {
    fn from(v: SideArg) -> Self {
        match v {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

impl From<KindArg> for Kind {
    fn from(v: KindArg) -> Self {
        match v {
            KindArg::Sum => Kind::Sum,
            KindArg::Difference => Kind::Difference,
        }
    }
}

impl From<FormulationArg> for Formulation {
    fn from(v: FormulationArg) -> Self {
        match v {
            FormulationArg::Riemann => Formulation::Riemann,
            FormulationArg::Binomial => Formulation::Binomial,
        }
    }
}

#[derive(Args)]
struct ApplyArgs {
    /// Input sequence: CSV with header `t,value` (or just `value`), or JSON
    /// {"origin": ..., "values": [...]}
    #[arg(long)]
    input: PathBuf,
    /// Output path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum)]
    side: SideArg,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Operator order α > 0
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = FormulationArg::Riemann)]
    formulation: FormulationArg,
    /// Left anchor a (required for left operators)
    #[arg(long = "a", allow_hyphen_values = true)]
    a: Option<f64>,
    /// Right anchor b (required for right operators)
    #[arg(long = "b", allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct WeightsArgs {
    /// Weight order α > 0
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Highest weight index K (emits k = 0..=K)
    #[arg(long = "K")]
    k: usize,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Output path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every registered check (the default when --ids is absent)
    #[arg(long, conflicts_with = "ids")]
    all: bool,
    /// Comma-separated check ids to run
    #[arg(long, value_delimiter = ',')]
    ids: Vec<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSONL report path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid lengths to time (default 1024..16384 doubling)
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Delta)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = KindArg::Difference)]
    kind: KindArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Usage-level problem found after clap parsing.
struct UsageError(String);

enum CmdError {
    Usage(String),
    Domain(Error),
    Failed(String),
    Io(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Domain(e)
    }
}

impl From<UsageError> for CmdError {
    fn from(e: UsageError) -> Self {
        CmdError::Usage(e.0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Apply(args) => cmd_apply(&args),
        Command::Weights(args) => cmd_weights(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(code) => code,
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Domain(e)) => {
            eprintln!("error: {e}");
            // parse-level and unknown-id problems are usage errors
            match e {
                Error::Parse(_) | Error::UnknownCheck(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
        Err(CmdError::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn write_out(path: Option<&Path>, payload: &str) -> Result<(), CmdError> {
    match path {
        Some(p) => fs::write(p, payload)
            .map_err(|e| CmdError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// Reads the input sequence. CSV with a `t` column or JSON carries its own
/// origin; a bare `value` column takes the origin from the anchor flags
/// (a for left operators, b − (L−1) for right ones).
fn read_input(path: &Path, side: Side, anchor: f64) -> Result<GridFunction, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Domain(Error::Parse(format!("{}: {e}", path.display()))))?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        return Ok(GridFunction::from_json(&text)?);
    }
    let first_line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase();
    if first_line == "value" {
        let mut values = Vec::new();
        for (i, line) in text
            .lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .enumerate()
        {
            let v: f64 = line.trim().parse().map_err(|_| {
                CmdError::Domain(Error::Parse(format!("row {}: bad value '{line}'", i + 1)))
            })?;
            values.push(v);
        }
        let origin = match side {
            Side::Left => anchor,
            Side::Right => anchor - (values.len().max(1) - 1) as f64,
        };
        return Ok(GridFunction::new(origin, values)?);
    }
    Ok(GridFunction::from_csv(&text)?)
}

fn cmd_apply(args: &ApplyArgs) -> Result<ExitCode, CmdError> {
    let side: Side = args.side.into();
    let anchor = match side {
        Side::Left => args
            .a
            .ok_or_else(|| UsageError("left operators require --a".into()))?,
        Side::Right => args
            .b
            .ok_or_else(|| UsageError("right operators require --b".into()))?,
    };
    let f = read_input(&args.input, side, anchor)?;
    let spec = OperatorSpec::new(
        args.family.into(),
        side,
        args.kind.into(),
        args.formulation.into(),
        args.alpha,
        anchor,
    )?;
    let out = apply_fast(&spec, &f)?;
    let payload = match args.format {
        FormatArg::Csv => out.to_csv(),
        FormatArg::Json => {
            let mut s = out.to_json();
            s.push('\n');
            s
        }
    };
    let summary = format!("origin {} length {}", format_sig12(out.origin()), out.len());
    match &args.output {
        Some(path) => {
            write_out(Some(path), &payload)?;
            println!("{summary}");
        }
        None => {
            // keep stdout as pure payload; the summary goes to stderr
            write_out(None, &payload)?;
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_weights(args: &WeightsArgs) -> Result<ExitCode, CmdError> {
    if !args.alpha.is_finite() || args.alpha <= 0.0 {
        return Err(CmdError::Domain(Error::InvalidOrder(args.alpha)));
    }
    let mode = match args.mode {
        ModeArg::Difference => WeightMode::Difference,
        ModeArg::Sum => WeightMode::Sum,
    };
    let w = gl_weights(args.alpha, mode, args.k);
    let mut payload = String::from("k,w\n");
    for (k, v) in w.values().iter().enumerate() {
        payload.push_str(&format!("{k},{}\n", format_sig12(*v)));
    }
    write_out(args.output.as_deref(), &payload)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CmdError> {
    let reports = run_suite(&args.ids, args.seed)?;
    let payload = to_jsonl(&reports);
    write_out(args.output.as_deref(), &payload)?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    eprintln!(
        "{} checks run, {} failed (seed {})",
        reports.len(),
        failed,
        args.seed
    );
    if failed > 0 {
        return Err(CmdError::Failed(format!("{failed} checks failed")));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, CmdError> {
    let sizes = if args.sizes.is_empty() {
        vec![1024, 2048, 4096, 8192, 16384]
    } else {
        args.sizes.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("size\tdirect_ns\tfast_ns\tmax_rel_err");
    for &size in &sizes {
        if size < 2 {
            return Err(UsageError(format!("size {size} is too small")).into());
        }
        let values: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = GridFunction::new(0.0, values)?;
        let side: Side = args.side.into();
        let anchor = match side {
            Side::Left => 0.0,
            Side::Right => f.end(),
        };
        let spec = OperatorSpec::new(
            args.family.into(),
            side,
            args.kind.into(),
            Formulation::Binomial,
            args.alpha,
            anchor,
        )?;

        let t0 = Instant::now();
        let direct = gl_apply(&spec, &f)?;
        let direct_ns = t0.elapsed().as_nanos();
        let t0 = Instant::now();
        let fast = gl_apply_fast(&spec, &f)?;
        let fast_ns = t0.elapsed().as_nanos();

        let mut max_rel = 0.0f64;
        for (x, y) in direct.values().iter().zip(fast.values()) {
            max_rel = max_rel.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
        }
        println!("{size}\t{direct_ns}\t{fast_ns}\t{:e}", max_rel);
        if max_rel > 1e-9 {
            return Err(CmdError::Failed(format!(
                "fast path disagrees with direct path at size {size}: {max_rel:e}"
            )));
        }
    }
    Ok(ExitCode::SUCCESS)
}
