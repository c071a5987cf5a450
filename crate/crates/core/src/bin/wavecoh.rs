use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wavecoh::config::{self, AnalysisConfig, Overrides};
use wavecoh::render::{self, HeatmapLayers, HeatmapStyle, ValueRange};
use wavecoh::{grid, pipeline, synth, Error, Result};

#[derive(Parser)]
#[command(
    name = "wavecoh",
    version,
    about = "Wavelet coherence lead/lag analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonFlags {
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Significance level, e.g. 0.95.
    #[arg(long)]
    level: Option<f64>,
    /// Number of surrogate pairs.
    #[arg(long)]
    surrogates: Option<usize>,
    /// Output directory (or file, for synth and render).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the index against one commodity.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Commodity name; defaults to the first configured one.
        #[arg(long)]
        commodity: Option<String>,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Analyze the index against every configured commodity.
    Batch {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Write synthetic series from the [synth] section of a config file.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Re-render a heatmap from exported grid CSVs.
    Render {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        coi: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        phase: Option<PathBuf>,
        /// Fixed color range as `lo:hi`.
        #[arg(long)]
        range: Option<String>,
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn load_config(path: &PathBuf, flags: &CommonFlags) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::load(path)?;
    cfg.apply(&Overrides {
        seed: flags.seed,
        level: flags.level,
        surrogates: flags.surrogates,
        output_dir: flags.out.clone(),
    })?;
    Ok(cfg)
}

fn parse_range(text: &str) -> Result<ValueRange> {
    let bad = || Error::InvalidParams(format!("--range expects lo:hi, got '{text}'"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(bad());
    }
    Ok(ValueRange::Fixed(lo, hi))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            config,
            commodity,
            flags,
        } => {
            let cfg = load_config(&config, &flags)?;
            let source = match &commodity {
                Some(name) => cfg.commodity(name).ok_or_else(|| Error::Config {
                    path: config.clone(),
                    message: format!("no commodity named '{name}'"),
                })?,
                None => &cfg.commodities[0],
            };
            let report = pipeline::run_pair(&cfg, source)?;
            println!(
                "{}: {} table rows written to {}",
                report.commodity,
                report.summaries.len(),
                report.dir.display()
            );
        }
        Command::Batch { config, flags } => {
            let cfg = load_config(&config, &flags)?;
            let report = pipeline::run_batch(&cfg)?;
            println!(
                "{} pairs; summary in {}",
                report.pairs.len(),
                report.summary_path.display()
            );
        }
        Command::Synth { config, flags } => {
            let mut spec = config::load_synth_spec(&config)?;
            if let Some(seed) = flags.seed {
                spec.seed = seed;
            }
            let out = flags.out.unwrap_or_else(|| PathBuf::from("synthetic.csv"));
            let series = synth::generate(&spec)?;
            synth::write_series_csv(&out, &series)?;
            println!(
                "{} series of {} months written to {}",
                series.len(),
                spec.len,
                out.display()
            );
        }
        Command::Render {
            grid: grid_path,
            coi,
            mask,
            phase,
            range,
            flags,
        } => {
            let g = grid::load_grid(&grid_path)?;
            let (_, coi) = grid::load_coi(&coi)?;
            let mask = mask.map(pipeline::load_mask).transpose()?;
            let phase = phase.map(grid::load_grid).transpose()?;
            let style = HeatmapStyle {
                range: range
                    .as_deref()
                    .map(parse_range)
                    .transpose()?
                    .unwrap_or(ValueRange::Auto),
                ..HeatmapStyle::default()
            };
            let img = render::render_heatmap(
                &HeatmapLayers {
                    grid: &g.grid,
                    periods: &g.periods,
                    coi: &coi,
                    mask: mask.as_ref(),
                    phase: phase.as_ref().map(|p| &p.grid),
                },
                &style,
            )?;
            let out = flags.out.unwrap_or_else(|| grid_path.with_extension("png"));
            img.save(&out)?;
            println!(
                "{}x{} image written to {}",
                img.width(),
                img.height(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
