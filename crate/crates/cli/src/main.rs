mod commands;
mod config;
mod output;
mod repro;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::*;
use output::{Provenance, Table};

/// Environment variable overriding the output directory.
const OUT_DIR_ENV: &str = "COMPACTUM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "compactum", version, about = "Entropy numbers, box dimension and polynomial rank toolkit")]
struct Cli {
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory. Without one, tables go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write two-column plot data per series (needs an output directory).
    #[arg(long, global = true)]
    plot_data: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Greedy cover, exact covering number and packing certificates.
    Cover(CoverParams),
    /// Dyadic entropy brackets of a point cloud.
    Entropy(EntropyParams),
    /// Box-counting dimension estimate.
    Boxdim(BoxdimParams),
    /// Entropy bounds for a diagonal operator.
    Diagonal(DiagonalParams),
    /// Block bounds and partial sums for the factorial partition.
    Sigma(SigmaParams),
    /// Generic Jacobian rank of a polynomial family.
    Polyrank(PolyrankParams),
    /// Exact corank of the coefficient system of a family.
    Corank(CorankParams),
    /// Homogeneous Taylor parts of a built-in sampler.
    Taylor(TaylorParams),
    /// Net transfer witnesses for a built-in sampler.
    Transfer(TransferParams),
    /// ℓ_p summability diagnostic of an entropy profile.
    Summability(SummabilityParams),
    /// Reproduce a worked example.
    Repro(ReproParams),
}

impl Command {
    fn name(&self) -> CommandName {
        match self {
            Self::Cover(_) => CommandName::Cover,
            Self::Entropy(_) => CommandName::Entropy,
            Self::Boxdim(_) => CommandName::Boxdim,
            Self::Diagonal(_) => CommandName::Diagonal,
            Self::Sigma(_) => CommandName::Sigma,
            Self::Polyrank(_) => CommandName::Polyrank,
            Self::Corank(_) => CommandName::Corank,
            Self::Taylor(_) => CommandName::Taylor,
            Self::Transfer(_) => CommandName::Transfer,
            Self::Summability(_) => CommandName::Summability,
            Self::Repro(_) => CommandName::Repro,
        }
    }

    /// The command named in the config file, with no flag overrides.
    fn from_config(name: CommandName) -> Self {
        match name {
            CommandName::Cover => Self::Cover(Default::default()),
            CommandName::Entropy => Self::Entropy(Default::default()),
            CommandName::Boxdim => Self::Boxdim(Default::default()),
            CommandName::Diagonal => Self::Diagonal(Default::default()),
            CommandName::Sigma => Self::Sigma(Default::default()),
            CommandName::Polyrank => Self::Polyrank(Default::default()),
            CommandName::Corank => Self::Corank(Default::default()),
            CommandName::Taylor => Self::Taylor(Default::default()),
            CommandName::Transfer => Self::Transfer(Default::default()),
            CommandName::Summability => Self::Summability(Default::default()),
            CommandName::Repro => Self::Repro(Default::default()),
        }
    }
}

fn command_label(name: CommandName) -> String {
    format!("{name:?}").to_lowercase()
}

fn execute(cmd: Command, cfg: ConfigFile, seed: u64) -> Result<(String, Vec<Table>), Failure> {
    let label = command_label(cmd.name());
    let tables = match cmd {
        Command::Cover(p) => commands::cover(p.merge(cfg.cover), seed),
        Command::Entropy(p) => commands::entropy(p.merge(cfg.entropy), seed),
        Command::Boxdim(p) => commands::boxdim(p.merge(cfg.boxdim), seed),
        Command::Diagonal(p) => commands::diagonal(p.merge(cfg.diagonal)),
        Command::Sigma(p) => commands::sigma(p.merge(cfg.sigma)),
        Command::Polyrank(p) => commands::polyrank(p.merge(cfg.polyrank), seed),
        Command::Corank(p) => commands::corank(p.merge(cfg.corank)),
        Command::Taylor(p) => commands::taylor(p.merge(cfg.taylor), seed),
        Command::Transfer(p) => commands::transfer(p.merge(cfg.transfer), seed),
        Command::Summability(p) => commands::summability(p.merge(cfg.summability), seed),
        Command::Repro(p) => {
            let p = p.merge(cfg.repro);
            let id = p.id.ok_or_else(|| Failure::Schema("repro needs an example id".into()))?;
            let label = format!("repro {}", id.as_str());
            return repro::run(id, p, seed).map(|t| (label, t));
        }
    }?;
    Ok((label, tables))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::Schema)?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(1);
    let out_dir =
        cli.out.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).or(cfg.output_path.clone());
    let plot = cli.plot_data || cfg.plot_data.unwrap_or(false);
    if plot && out_dir.is_none() {
        return Err(Failure::Schema("plot data needs an output directory".into()));
    }
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            return Err(Failure::Schema("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    let cmd = match cli.command {
        Some(cmd) => {
            if let Some(named) = cfg.command {
                if named != cmd.name() {
                    return Err(Failure::Schema(format!(
                        "config names command `{}` but `{}` was given",
                        command_label(named),
                        command_label(cmd.name())
                    )));
                }
            }
            cmd
        }
        None => Command::from_config(
            cfg.command
                .ok_or_else(|| Failure::Schema("no command given on the command line or in the config".into()))?,
        ),
    };

    let (label, tables) = execute(cmd, cfg, seed)?;
    let prov = Provenance { command: &label, seed };
    match out_dir {
        Some(dir) => {
            let written = output::write_dir(&dir, &tables, &prov, plot).map_err(|e| Failure::Io(e.to_string()))?;
            for path in written {
                eprintln!("wrote {path}");
            }
        }
        None => match output::write_stream(&mut io::stdout().lock(), &tables, &prov) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(Failure::Io(e.to_string())),
            _ => {}
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("compactum: {e}");
            ExitCode::from(match e {
                Failure::Schema(_) => 2,
                Failure::Compute(_) | Failure::Io(_) => 1,
            })
        }
    }
}
