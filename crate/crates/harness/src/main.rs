use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use synthlab::{builtins, run, ConfigError, Experiment, Format, Outcome, RunError};

#[derive(Parser)]
#[command(name = "synthlab", version, about = "Spectral-synthesis numerical laboratory on finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Module-action identities and canonical-decomposition property suite.
    Identities(Common),
    /// Residual certificate, reconstruction sequence and r_inf experiment.
    Certificate(Common),
    /// Convergence verifier on a builtin sequence generator.
    Convergence(Common),
    /// Union construction / decomposition with the default oracle.
    Union(Common),
    /// List the builtin scenarios.
    List,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    config: Option<PathBuf>,
    /// Name of a builtin scenario (see `synthlab list`).
    #[arg(long)]
    builtin: Option<String>,
    /// Output directory; without it the selected format goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides every tolerance in the config.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Record per-row wall time (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

fn load(common: &Common) -> Result<Experiment, ConfigError> {
    let mut exp = match (&common.config, &common.builtin) {
        (Some(path), _) => Experiment::from_path(path)?,
        (None, Some(name)) => Experiment::builtin(name)?,
        (None, None) => return Err(ConfigError::new("give --config or --builtin")),
    };
    exp.apply_overrides(common.seed, common.tol)?;
    Ok(exp)
}

fn formats(common: &Common, exp: &Experiment, outcome: &Outcome, to_dir: bool) -> Vec<Format> {
    let mut selected = Vec::new();
    if common.csv {
        selected.push(Format::Csv);
    }
    if common.json {
        selected.push(Format::Json);
    }
    if selected.is_empty() {
        match exp.config.output.format {
            Some(f) => selected.push(f),
            None if to_dir => selected.extend([Format::Csv, Format::Json]),
            None => selected.push(outcome.default_format()),
        }
    }
    selected
}

fn emit(common: &Common, exp: &Experiment, outcome: &Outcome) -> Result<(), ConfigError> {
    let dir = common.out.clone().or_else(|| exp.config.output.dir.clone().map(PathBuf::from));
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir)
                .map_err(|e| ConfigError::new(format!("cannot create {}: {e}", dir.display())))?;
            let stem = exp.config.name.clone().unwrap_or_else(|| outcome.command.to_string()).replace('^', "");
            for format in formats(common, exp, outcome, true) {
                let ext = match format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                let path = dir.join(format!("{stem}-{}.{ext}", outcome.command));
                std::fs::write(&path, outcome.render(format))
                    .map_err(|e| ConfigError::new(format!("cannot write {}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            for format in formats(common, exp, outcome, false) {
                print!("{}", outcome.render(format));
            }
        }
    }
    Ok(())
}

fn execute(command: &Command) -> Result<bool, RunError> {
    let common = match command {
        Command::Identities(c) | Command::Certificate(c) | Command::Convergence(c) | Command::Union(c) => c,
        Command::List => {
            for name in builtins::NAMES {
                println!("{name}");
            }
            return Ok(true);
        }
    };
    let exp = load(common)?;
    let outcome = match command {
        Command::Identities(_) => run::run_identities(&exp)?,
        Command::Certificate(_) => run::run_certificate(&exp, common.timing)?,
        Command::Convergence(_) => run::run_convergence(&exp)?,
        Command::Union(_) => run::run_union(&exp)?,
        Command::List => unreachable!(),
    };
    emit(common, &exp, &outcome)?;
    if !outcome.pass {
        eprintln!("{}: invariant check failed", outcome.command);
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ RunError::Numerical(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
