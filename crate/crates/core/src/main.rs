use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use oilbrush::etf::EtfParams;
use oilbrush::pipeline::{level_p_max, run, DirectionMode, PipelineConfig, PipelineError};
use oilbrush::raster::HueMetric;
use oilbrush::stroke::SearchParams;

/// Repaint an image as a set of textured oil-paint strokes.
#[derive(Debug, Parser)]
#[command(name = "oilbrush", version)]
struct Cli {
    /// Source image (PNG or JPEG).
    #[arg(short, long)]
    input: PathBuf,
    /// Destination PNG.
    #[arg(short, long)]
    output: PathBuf,
    /// Largest anchor probability, in (0, 1].
    #[arg(long, conflicts_with = "level")]
    p_max: Option<f64>,
    /// Fineness preset 2..=6; sets p_max to 1/level².
    #[arg(long)]
    level: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grayscale stroke template with alpha; defaults to the bundled brush.
    #[arg(long)]
    template: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    etf_radius: usize,
    #[arg(long, default_value_t = 3)]
    etf_iters: usize,
    #[arg(long, default_value_t = 15)]
    lloyd_iters: usize,
    /// etf, random or constant:<degrees>
    #[arg(long, default_value = "etf")]
    direction: DirectionMode,
    /// Hue threshold in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
    hue_threshold: f64,
    /// Value threshold on the 0..255 scale.
    #[arg(long, default_value_t = 15.0)]
    value_threshold: f64,
    /// Compare hues by plain absolute difference instead of around the circle.
    #[arg(long)]
    literal_hue: bool,
    #[arg(long, default_value_t = 10)]
    max_padding_rounds: usize,
    /// Write density, anchor, flow and progress images into this directory.
    #[arg(long, value_name = "DIR")]
    dump_intermediates: Option<PathBuf>,
    /// Strokes between progress snapshots.
    #[arg(long, default_value_t = 1000)]
    progress_every: usize,
}

impl Cli {
    fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let p_max = match (self.p_max, self.level) {
            (Some(p), _) => p,
            (None, Some(l)) => level_p_max(l)?,
            (None, None) => PipelineConfig::default().p_max,
        };
        Ok(PipelineConfig {
            p_max,
            seed: self.seed,
            etf: EtfParams {
                radius: self.etf_radius,
                iterations: self.etf_iters,
            },
            search: SearchParams {
                t_h: self.hue_threshold,
                t_v: self.value_threshold,
                hue_metric: if self.literal_hue {
                    HueMetric::Literal
                } else {
                    HueMetric::Circular
                },
                ..SearchParams::default()
            },
            lloyd_iterations: self.lloyd_iters,
            direction: self.direction,
            template_path: self.template.clone(),
            dump_dir: self.dump_intermediates.clone(),
            progress_every: self.progress_every,
            max_padding_rounds: self.max_padding_rounds,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .config()
        .and_then(|cfg| run(&cfg, &cli.input, &cli.output));
    match result {
        Ok(s) => {
            println!(
                "anchors {}  strokes {} ({} padding in {} rounds, {} fallback pixels)  {:.2}s",
                s.k,
                s.strokes,
                s.padding_strokes,
                s.padding_rounds,
                s.fallback_pixels,
                s.elapsed.as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("oilbrush: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
