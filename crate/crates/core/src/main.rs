use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crack_homog::experiment::{load_config, preset, run_experiment, ExperimentConfig, Mode, PRESETS};
use crack_homog::plot::emit_plots;
use crack_homog::{Error, Result};

#[derive(Parser)]
#[command(
    name = "crack-homog",
    version,
    about = "Direct and homogenized heat diffusion in a cracked medium"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run(RunArgs),
    /// Regenerate the SVG plots of a run directory.
    Plot {
        /// Run directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// List presets, or print one as a JSON config.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Start from a named preset (fig3, fig4, fig5, fig6).
    #[arg(long)]
    preset: Option<String>,
    /// direct | fixed_point | weak | approx | profile_variant | compare | sweep
    #[arg(long, value_name = "M")]
    mode: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma-separated list of periods.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    n1d: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    accelerate: bool,
    /// Skip SVG generation.
    #[arg(long)]
    no_plots: bool,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn resolve(args: RunArgs) -> Result<ExperimentConfig> {
    let mut c = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(Error::config("preset", "use either --config or --preset")),
        (Some(path), None) => load_config(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(m) = &args.mode {
        c.mode = m.parse::<Mode>()?;
    }
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = args.$f { c.$f = v; })* };
    }
    set!(alpha, beta, epsilon, epsilons, nx, dt, t_end, tol, out);
    if args.ny.is_some() {
        c.ny = args.ny;
    }
    if args.n1d.is_some() {
        c.n1d = args.n1d;
    }
    if args.delta.is_some() {
        c.delta = args.delta;
    }
    if args.accelerate {
        c.accelerate = true;
    }
    if args.no_plots {
        c.plots = false;
    }
    Ok(c)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = resolve(args)?;
            let summary = run_experiment(&config)?;
            println!("{}", serde_json::to_string_pretty(&summary["runs"])?);
            if !summary["comparison"].as_object().is_some_and(|o| o.is_empty()) {
                println!("{}", serde_json::to_string_pretty(&summary["comparison"])?);
            }
            println!("artifacts written to {}", config.out.display());
        }
        Command::Plot { out } => {
            for p in emit_plots(&out)? {
                println!("{}", p.display());
            }
        }
        Command::Presets { name: None } => {
            for name in PRESETS {
                let c = preset(name)?;
                println!(
                    "{name}: mode {}, alpha {}, out {}",
                    c.mode.name(),
                    c.alpha,
                    c.out.display()
                );
            }
        }
        Command::Presets { name: Some(name) } => {
            println!("{}", serde_json::to_string_pretty(&preset(&name)?)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
