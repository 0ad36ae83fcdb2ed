use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use vasyunin::cli::{run, Check, Command, OutputFormat, RunConfig};
use vasyunin::{Error, Precision, SeedFamily};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Coeffs,
    Profile,
    Canonical,
    Diverge,
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    First,
    Second,
    Third,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// X = n * 2^12
    Default,
}

/// Build correction sequences and emit coefficient, profile, canonical-form
/// and divergence tables.
#[derive(Debug, Parser)]
#[command(name = "vasyunin", version)]
#[command(group(ArgGroup::new("cutoff").args(["x", "x_policy"])))]
struct Args {
    command: CommandArg,

    #[arg(long, value_enum, default_value = "first")]
    family: FamilyArg,

    /// Index of the correction (profile, canonical).
    #[arg(long)]
    n: Option<u64>,

    /// Largest index (coeffs, diverge); overrides suite limits in verify.
    #[arg(long)]
    n_max: Option<u64>,

    /// Fixed truncation point for the divergence integrals.
    #[arg(long)]
    x: Option<u64>,

    #[arg(long, value_enum)]
    x_policy: Option<PolicyArg>,

    /// Decimal digits in rendered values.
    #[arg(long, default_value_t = Precision::DEFAULT_DIGITS)]
    precision: u32,

    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,

    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Profile length (default 4n).
    #[arg(long)]
    horizon: Option<u64>,

    /// Comma-separated verify suites: identity, plateau, canonical, idempotency.
    #[arg(long)]
    checks: Option<String>,

    /// Identity-audit negative control, as K=V (replaces c_K by V).
    #[arg(long, value_parser = parse_mutation)]
    mutate: Option<(u64, i64)>,

    /// Record this string as metadata.timestamp.
    #[arg(long)]
    timestamp: Option<String>,
}

fn parse_mutation(s: &str) -> Result<(u64, i64), String> {
    let (k, v) = s.split_once('=').ok_or("expected K=V")?;
    let k = k.trim().parse().map_err(|e| format!("{e}"))?;
    let v = v.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((k, v))
}

fn config(args: &Args) -> Result<RunConfig, Error> {
    let command = match args.command {
        CommandArg::Coeffs => Command::Coeffs,
        CommandArg::Profile => Command::Profile,
        CommandArg::Canonical => Command::Canonical,
        CommandArg::Diverge => Command::Diverge,
        CommandArg::Verify => Command::Verify,
    };
    let family = match args.family {
        FamilyArg::First => SeedFamily::First,
        FamilyArg::Second => SeedFamily::Second,
        FamilyArg::Third => SeedFamily::Third,
    };
    let mut cfg = RunConfig::new(command, family);
    cfg.n = args.n;
    cfg.n_max = args.n_max;
    cfg.cutoff = args.x;
    cfg.horizon = args.horizon;
    cfg.precision = Precision::new(args.precision)?;
    cfg.format = match args.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    cfg.checks = args.checks.as_deref().map(Check::parse_list).transpose()?;
    cfg.mutation = args.mutate;
    cfg.timestamp = args.timestamp.clone();
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let output = config(&args).and_then(|cfg| run(&cfg));
    let output = match output {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, &output.text),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
