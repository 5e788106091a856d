use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use netsurface::run::{self, RunConfig};
use netsurface::{Error, FailureScenario, Ranking};

#[derive(Parser)]
#[command(
    name = "netsurface",
    version,
    about = "Robustness surfaces of network topologies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one failure scenario and write the robustness surface.
    Run {
        #[arg(long)]
        topology: PathBuf,
        /// node-random, node-degree, node-bc, node-cc, link-random or link-bc
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = run::DEFAULT_P_MAX)]
        pmax: u32,
        /// Defaults to 500 for random and 100 for targeted scenarios.
        #[arg(long)]
        configs: Option<usize>,
        #[arg(long, default_value_t = run::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = netsurface::pca::DEFAULT_ALPHA)]
        alpha: f64,
        /// When targeted scores are computed: adaptive (before every
        /// percentage step) or static (once, on the intact graph).
        #[arg(long, default_value = "adaptive")]
        ranking: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write heatmap.ppm.
        #[arg(long)]
        heatmap: bool,
    },
    /// Print structural statistics of a topology.
    Characterize {
        #[arg(long)]
        topology: PathBuf,
    },
    /// Repeat the run recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        /// Defaults to the manifest's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("netsurface: [{}] {}", e.category(), single_line(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn single_line(e: &Error) -> String {
    e.to_string()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            topology,
            scenario,
            pmax,
            configs,
            seed,
            alpha,
            ranking,
            out,
            heatmap,
        } => {
            let scenario: FailureScenario = scenario.parse()?;
            let ranking: Ranking = ranking.parse()?;
            let config = RunConfig {
                p_max: pmax,
                configs: configs.unwrap_or_else(|| run::default_configs(scenario)),
                master_seed: seed,
                alpha,
                ranking,
                out_dir: out,
                heatmap,
                ..RunConfig::new(topology, scenario)
            };
            let outcome = run::run(&config)?;
            report(&outcome, &config.out_dir);
        }
        Command::Characterize { topology } => {
            let s = run::characterize(&topology)?;
            println!("N       {}", s.node_count);
            println!("L       {}", s.link_count);
            println!("<k>     {:.2} +- {:.2}", s.degree.mean, s.degree.std_dev);
            println!("k_max   {}", s.max_degree);
            println!(
                "<l>     {:.2} +- {:.2}",
                s.shortest_path.mean, s.shortest_path.std_dev
            );
            match s.assortativity {
                Some(r) => println!("r       {r:.3}"),
                None => println!("r       undefined"),
            }
        }
        Command::Replay { manifest, out } => {
            let dir = out
                .clone()
                .unwrap_or_else(|| manifest.parent().map(PathBuf::from).unwrap_or_default());
            let outcome = run::replay(&manifest, out.as_deref())?;
            report(&outcome, &dir);
        }
    }
    Ok(())
}

fn report(outcome: &run::RunOutcome, dir: &std::path::Path) {
    let s = &outcome.surface;
    println!(
        "{}: {} percentages x {} configurations, R*_init = {:.12}, area under mean = {:.6}",
        s.scenario,
        s.percentages.len(),
        s.config_count(),
        s.r_star_init,
        outcome.summary.area_under_mean
    );
    println!("outputs written to {}", dir.display());
}
