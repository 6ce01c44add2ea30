use std::path::{Path, PathBuf};
use std::process::ExitCode;

use atomqec_cli::runner::{output_dir, sweep_scaling, write_scaling};
use atomqec_cli::verify::{run_suite, verify_csv};
use atomqec_cli::{parse_config_with, simulate, write_run, CliError, Config, ConfigError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "atomqec", version, about = "Encoded neutral-atom experiment runner")]
struct Cli {
    /// Override the config's run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, replacing `<out-root>/<name>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root for output directories when --out is not given.
    #[arg(long, env = "ATOMQEC_OUT", default_value = "atomqec-out", global = true)]
    out_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config over its alpha grid.
    Run { config: PathBuf },
    /// Pseudothreshold and discard scaling over the config's [scaling] N values.
    Sweep { config: PathBuf },
    /// Check builder circuits against the statevector oracle.
    Verify,
}

fn load(path: &Path, seed: Option<u64>) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(ConfigError { line: 0, field: None, message: format!("{}: {e}", path.display()) })
    })?;
    Ok(parse_config_with(&text, seed)?)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config, cli.seed)?;
            if cfg.experiments.is_empty() && cfg.costmodel.is_none() {
                return Err(CliError::Config(ConfigError {
                    line: 0,
                    field: None,
                    message: "nothing to run: add an [experiment] or [costmodel] section".into(),
                }));
            }
            let dir = output_dir(cli.out.as_deref(), &cli.out_root, &cfg, config);
            let r = simulate(&cfg, cli.threads.unwrap_or(cfg.threads))?;
            write_run(&dir, &cfg, &r)?;
            for (p, t) in &r.thresholds {
                println!("pseudothreshold {}: {}", p.name, t.label());
            }
            println!("wrote {}", dir.display());
        }
        Command::Sweep { config } => {
            let cfg = load(config, cli.seed)?;
            let dir = output_dir(cli.out.as_deref(), &cli.out_root, &cfg, config);
            let (expanded, r, rows) = sweep_scaling(&cfg, cli.threads.unwrap_or(cfg.threads))?;
            write_scaling(&dir, &expanded, &r, &rows)?;
            for row in &rows {
                println!("N={} pseudothreshold {}", row.n, row.threshold.label());
            }
            println!("wrote {}", dir.display());
        }
        Command::Verify => {
            let rows = run_suite()?;
            let dir = cli.out.clone().unwrap_or_else(|| cli.out_root.join("verify"));
            std::fs::create_dir_all(&dir).map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
            let path = dir.join("verify.csv");
            std::fs::write(&path, verify_csv(&rows))
                .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            let failed: Vec<&str> = rows.iter().filter(|r| r.status() == "fail").map(|r| r.circuit.as_str()).collect();
            let checked = rows.iter().filter(|r| r.outcome.is_some()).count();
            println!("checked {checked} circuits, skipped {}", rows.len() - checked);
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
