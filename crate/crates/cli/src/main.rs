use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gauge_cli::commands::{cmd_convergence, cmd_integrate, cmd_transfer, cmd_valuation, Query};
use gauge_cli::config::{Format, JobConfig};
use gauge_cli::report::ResultDoc;
use gauge_cli::{exit, CliError};
use gauge_core::{SpaceDescriptor, Status};

/// Gauge integration jobs, convergence studies, valuation order queries and
/// Cantor transfer runs.
///
/// Any configuration field can also be set with a flag of its dotted name,
/// for example `--policy.seed 7`, `--measure cantor-ifs --measure.p0 0.25`
/// or `--schedule '{"kind":"shrinking-constant","c0":0.25}'`.
#[derive(Parser, Debug)]
#[command(name = "gauge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate to a tolerance.
    Integrate(JobArgs),
    /// Tabulate Riemann sums over a range of gauge levels.
    Convergence(JobArgs),
    /// Integrate f∘g on Cantor space and compare with [0,1] when p0 = 1/2.
    Transfer(JobArgs),
    /// Decide the order or way-below relation between two simple valuations.
    Valuation(ValuationArgs),
}

#[derive(Args, Debug)]
struct JobArgs {
    /// JSON job configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin integrand name or expression.
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Level range `a..b` (inclusive) or `n` for `1..n`.
    #[arg(long)]
    levels: Option<String>,
    /// Cantor weight of the digit 0 for transfer runs.
    #[arg(long)]
    p0: Option<f64>,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct ValuationArgs {
    #[arg(value_enum)]
    query: Query,
    /// Left valuation, e.g. `bottom` or `1/2*[0,0.5] + 1/2*[0.5,1]`.
    left: String,
    right: String,
    /// Space descriptor as JSON; inferred from the carriers when absent.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

type Overrides = Vec<(String, String)>;
type Task = fn(&JobConfig) -> Result<ResultDoc, CliError>;

const CONFIG_FIELDS: [&str; 9] =
    ["space", "measure", "integrand", "epsilon", "schedule", "policy", "levels", "p0", "output"];

/// Separates `--dotted.name value` and `--field value` flags for config
/// fields without a dedicated option from the arguments clap handles.
fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    const DEDICATED: [&str; 3] = ["integrand", "levels", "p0"];
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            rest.push(arg);
            continue;
        };
        let (name, inline) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (flag.to_string(), None),
        };
        let root = name.split('.').next().unwrap_or("");
        let is_override = CONFIG_FIELDS.contains(&root) && (name.contains('.') || !DEDICATED.contains(&root));
        if !is_override {
            rest.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it
                .next()
                .ok_or_else(|| CliError::Config(format!("flag --{name} needs a value")))?,
        };
        overrides.push((name, value));
    }
    Ok((rest, overrides))
}

fn load_config(args: &JobArgs, overrides: &[(String, String)]) -> Result<JobConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => JobConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => JobConfig::default(),
    };
    let mut flags: Vec<(String, String)> = Vec::new();
    let json = |s: &str| serde_json::to_string(s).expect("string serializes");
    if let Some(v) = &args.integrand {
        flags.push(("integrand".into(), json(v)));
    }
    if let Some(v) = args.eps {
        flags.push(("epsilon".into(), v.to_string()));
    }
    if let Some(v) = args.seed {
        flags.push(("policy.seed".into(), v.to_string()));
    }
    if let Some(v) = &args.levels {
        flags.push(("levels".into(), json(v)));
    }
    if let Some(v) = args.p0 {
        flags.push(("p0".into(), v.to_string()));
    }
    if let Some(v) = &args.out {
        flags.push(("output.path".into(), json(&v.to_string_lossy())));
    }
    if let Some(v) = args.format {
        let f = match v {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
        };
        flags.push(("output.format".into(), json(f)));
    }
    flags.extend(overrides.iter().cloned());
    cfg.apply_overrides(&flags)?;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, path: Option<&str>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            eprintln!("wrote {p}");
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli, overrides: Overrides) -> Result<i32, CliError> {
    let (args, task): (JobArgs, Task) = match cli.command {
        Command::Valuation(v) => {
            let space: Option<SpaceDescriptor> = v
                .space
                .as_deref()
                .map(|s| serde_json::from_str(s).map_err(|e| CliError::Config(format!("invalid --space: {e}"))))
                .transpose()?;
            let doc = cmd_valuation(v.query, &v.left, &v.right, space.as_ref())?;
            emit(&doc.to_json(), v.out.as_deref().and_then(|p| p.to_str()))?;
            return Ok(exit::CONVERGED);
        }
        Command::Integrate(a) => (a, cmd_integrate),
        Command::Convergence(a) => (a, cmd_convergence),
        Command::Transfer(a) => (a, cmd_transfer),
    };
    let cfg = load_config(&args, &overrides)?;
    let doc = task(&cfg)?;
    let text = match cfg.output.format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    emit(&text, cfg.output.path.as_deref())?;
    Ok(match doc.status {
        Status::Converged => exit::CONVERGED,
        Status::BudgetExhausted => exit::BUDGET_EXHAUSTED,
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let split = if args.get(1).map(String::as_str) == Some("valuation") {
        Ok((args, Vec::new()))
    } else {
        split_overrides(args)
    };
    let (rest, overrides) = match split {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::ERROR as u8);
        }
    };
    let cli = match Cli::try_parse_from(rest) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::ERROR } else { exit::CONVERGED };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli, overrides) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
