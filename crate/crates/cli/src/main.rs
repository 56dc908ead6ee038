use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

mod commands;
mod config;

use config::{field_listing, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "coonsfit", version, about = "Fit deformable Coons-patch templates to meshes")]
struct Cli {
    /// TOML configuration file; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized step (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Config override `section.field=value`, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a template to a target mesh.
    Fit {
        /// Template file, or `builtin:cube`.
        #[arg(long)]
        template: String,
        #[arg(long)]
        mesh: PathBuf,
    },
    /// Generate a balanced intersection dataset.
    GenIntersectData {
        /// `self` or `pair` (overrides dataset.kind).
        #[arg(long)]
        kind: Option<String>,
        /// Overrides dataset.count.
        #[arg(long)]
        count: Option<usize>,
        /// Dataset file (default: <out>/<kind>.cxds).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train an intersection classifier on a dataset file.
    TrainMlp {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Augment and rasterize every drawing in a directory.
    Augment {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write the welded tessellation of a template as OBJ.
    Tessellate {
        /// Template file, or `builtin:cube`.
        #[arg(long)]
        template: String,
        /// Overrides tessellate.n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the loss terms of a template instance against a mesh.
    EvalLoss {
        /// Rest-pose template file, or `builtin:cube`.
        #[arg(long)]
        template: String,
        /// Template file holding the deformed control points (default: rest pose).
        #[arg(long)]
        instance: Option<String>,
        #[arg(long)]
        mesh: PathBuf,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.with_env(std::env::vars())?;
    let sets = cli
        .sets
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim()))
                .with_context(|| format!("--set expects key=value, got `{s}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    cfg = cfg.with_overrides(sets)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut cfg = effective_config(&cli)?;
    let out: &Path = &cli.out;
    match cli.command {
        Command::Fit { template, mesh } => commands::fit(&cfg, &template, &mesh, out),
        Command::GenIntersectData { kind, count, output } => {
            if let Some(k) = kind {
                cfg = cfg.with_overrides([("dataset.kind".to_string(), k.as_str())])?;
            }
            if let Some(c) = count {
                cfg.dataset.count = c;
            }
            commands::gen_intersect_data(&cfg, output.as_deref(), out)
        }
        Command::TrainMlp { dataset } => commands::train_mlp(&cfg, &dataset, out),
        Command::Augment { input } => commands::augment(&cfg, &input, out),
        Command::Tessellate { template, n } => {
            if let Some(n) = n {
                cfg.tessellate.n = n;
            }
            commands::tessellate(&cfg, &template, out)
        }
        Command::EvalLoss { template, instance, mesh } => commands::eval_loss(&cfg, &template, instance.as_deref(), &mesh),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let help = format!(
        "Configuration fields and defaults (set with --config, --set key=value, or {}SECTION__FIELD):\n{}",
        config::ENV_PREFIX,
        field_listing()
    );
    let matches = Cli::command().after_long_help(help).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
