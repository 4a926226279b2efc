use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use blockscope_core::BlockDelayScope;
use clap::{Parser, Subcommand};

mod run;

use run::{run, write_fixture, CliError, DeviceChoice, Format, Metric, RunConfig};

/// Per-block area, delay and power of an annotated FPGA netlist.
#[derive(Debug, Parser)]
#[command(name = "blockscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a netlist and print the report on stdout.
    Analyze(AnalyzeArgs),
    /// Write a built-in fixture: gcd, fig6 or random:<seed>:<n>.
    Fixtures {
        name: String,
        out_dir: PathBuf,
        /// Register width of the gcd fixture (1-8).
        #[arg(long)]
        width: Option<usize>,
        /// Device whose LUT delays the gcd fixture uses.
        #[arg(long, default_value = "spartan6")]
        device: String,
    },
}

#[derive(Debug, clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    netlist: PathBuf,
    /// Activity profile; enables the power metric.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Power coefficients overriding the defaults.
    #[arg(long)]
    power_model: Option<PathBuf>,
    /// Built-in device: spartan6, virtex5 or virtex7.
    #[arg(long, conflicts_with = "device_file")]
    device: Option<String>,
    /// Custom device profile file.
    #[arg(long)]
    device_file: Option<PathBuf>,
    /// Replace LUT delays with the device profile's values.
    #[arg(long)]
    override_delays: bool,
    /// Comma-separated subset of area, delay, power.
    #[arg(long, value_enum, value_delimiter = ',')]
    metrics: Vec<Metric>,
    /// Merge blocks below this hierarchy depth.
    #[arg(long)]
    group_depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Count only block cells in the block delay, not intra-block nets.
    #[arg(long)]
    block_delay_nodes_only: bool,
}

impl From<AnalyzeArgs> for RunConfig {
    fn from(a: AnalyzeArgs) -> Self {
        RunConfig {
            netlist_path: a.netlist,
            profile_path: a.profile,
            power_model_path: a.power_model,
            device: a
                .device
                .map(DeviceChoice::Builtin)
                .or(a.device_file.map(DeviceChoice::File)),
            override_delays: a.override_delays,
            metrics: a.metrics,
            group_depth: a.group_depth,
            format: a.format,
            block_delay_scope: if a.block_delay_nodes_only {
                BlockDelayScope::NodesOnly
            } else {
                BlockDelayScope::WithIntraBlockNets
            },
        }
    }
}

/// `BLOCKSCOPE_THREADS` caps the worker pool; unset or 0 picks automatically.
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("BLOCKSCOPE_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("BLOCKSCOPE_THREADS: not a number: {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let config = RunConfig::from(args);
            if config.device.is_some() && !config.override_delays {
                eprintln!(
                    "note: netlist delays kept; pass --override-delays to apply the device profile"
                );
            }
            let out = thread_pool()?.install(|| run(&config))?;
            std::io::stdout()
                .lock()
                .write_all(out.as_bytes())
                .map_err(|e| CliError::Internal(format!("writing report: {e}")))
        }
        Command::Fixtures {
            name,
            out_dir,
            width,
            device,
        } => {
            for path in write_fixture(&name, &out_dir, width, &device)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); help and version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("blockscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
