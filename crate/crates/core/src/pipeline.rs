//! End-to-end painting: density map, anchors, flow field, strokes,
//! compositing and hole padding.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::density::{
    anchor_count, build_density_map, voronoi_relax, AnchorSet, DensityError, DensityMap,
    RejectionSampler, SampleError,
};
use crate::dump;
use crate::etf::{compute_etf, initial_tangents, EtfField, EtfParams};
use crate::image_io;
use crate::raster::{rgb_to_hsv, to_gray, Raster, Rgb8};
use crate::render::{
    pad_holes, paint_onto, Canvas, PaddingReport, PaddingSource, RenderError, StampRenderer,
    StrokeTemplate,
};
use crate::stroke::{build_stroke, SearchParams, StrokeParams};

/// The preset fineness levels; level `n` places at most one anchor per
/// `n × n` pixel square.
pub const FINENESS_LEVELS: [u32; 5] = [2, 3, 4, 5, 6];

pub fn level_p_max(level: u32) -> Result<f64, PipelineError> {
    if FINENESS_LEVELS.contains(&level) {
        Ok(1.0 / (level * level) as f64)
    } else {
        Err(PipelineError::InvalidConfig(format!(
            "fineness level must be between 2 and 6, got {level}"
        )))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read input {path}: {message}")]
    InputUnreadable { path: String, message: String },
    #[error("unsupported image format for {path}: {message}")]
    UnsupportedFormat { path: String, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {message}")]
    WriteFailed { path: String, message: String },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Sampling(#[from] SampleError),
}

impl From<DensityError> for PipelineError {
    fn from(e: DensityError) -> Self {
        PipelineError::InvalidConfig(e.to_string())
    }
}

impl PipelineError {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::InvalidConfig(_) => 2,
            PipelineError::InputUnreadable { .. } => 3,
            PipelineError::UnsupportedFormat { .. } => 4,
            PipelineError::WriteFailed { .. } => 5,
            PipelineError::Render(RenderError::TemplateIo { .. }) => 3,
            PipelineError::Render(RenderError::Template(_)) => 2,
            PipelineError::Render(_) | PipelineError::Sampling(_) => 1,
        }
    }
}

/// Where stroke directions come from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DirectionMode {
    #[default]
    Etf,
    /// Every stroke at this angle, radians.
    Constant(f64),
    /// Independent random direction per pixel.
    Random,
}

impl FromStr for DirectionMode {
    type Err = String;

    /// Accepts `etf`, `random` or `constant:<degrees>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "etf" => Ok(Self::Etf),
            "random" => Ok(Self::Random),
            _ => {
                let deg = s
                    .strip_prefix("constant:")
                    .ok_or_else(|| format!("expected etf, random or constant:<deg>, got {s:?}"))?;
                let deg: f64 = deg.parse().map_err(|_| format!("bad angle in {s:?}"))?;
                if !deg.is_finite() {
                    return Err(format!("bad angle in {s:?}"));
                }
                Ok(Self::Constant(deg.to_radians()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub p_max: f64,
    pub seed: u64,
    pub etf: EtfParams,
    pub search: SearchParams,
    pub lloyd_iterations: usize,
    pub direction: DirectionMode,
    /// `None` uses the bundled brush.
    pub template_path: Option<PathBuf>,
    pub dump_dir: Option<PathBuf>,
    /// Strokes between progress snapshots when dumping.
    pub progress_every: usize,
    pub max_padding_rounds: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            p_max: 0.25,
            seed: 0,
            etf: EtfParams::default(),
            search: SearchParams::default(),
            lloyd_iterations: 15,
            direction: DirectionMode::Etf,
            template_path: None,
            dump_dir: None,
            progress_every: 1000,
            max_padding_rounds: 10,
        }
    }
}

impl PipelineConfig {
    pub fn with_level(level: u32) -> Result<Self, PipelineError> {
        Ok(Self {
            p_max: level_p_max(level)?,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidConfig(m));
        if !(self.p_max > 0.0 && self.p_max <= 1.0) {
            return bad(format!("p_max must lie in (0, 1], got {}", self.p_max));
        }
        if !(self.search.t_h > 0.0 && self.search.t_h.is_finite()) {
            return bad(format!(
                "hue threshold must be positive, got {}",
                self.search.t_h
            ));
        }
        if !(self.search.t_v > 0.0 && self.search.t_v.is_finite()) {
            return bad(format!(
                "value threshold must be positive, got {}",
                self.search.t_v
            ));
        }
        if !(self.search.delta > 0.0 && self.search.delta.is_finite()) {
            return bad(format!(
                "search step must be positive, got {}",
                self.search.delta
            ));
        }
        if self.progress_every == 0 {
            return bad("progress interval must be at least 1".into());
        }
        if let DirectionMode::Constant(a) = self.direction {
            if !a.is_finite() {
                return bad("constant direction must be finite".into());
            }
        }
        Ok(())
    }

    fn template(&self) -> Result<StrokeTemplate, PipelineError> {
        Ok(match &self.template_path {
            Some(p) => StrokeTemplate::load(p)?,
            None => StrokeTemplate::default_brush(),
        })
    }
}

/// Independent random streams derived from the run seed.
#[derive(Debug, Clone, Copy)]
enum Stream {
    Sampling = 1,
    Direction = 2,
}

fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Anchor count from the density map.
    pub k: usize,
    /// Strokes painted, padding included.
    pub strokes: usize,
    pub padding_strokes: usize,
    pub padding_rounds: usize,
    pub fallback_pixels: usize,
    pub elapsed: Duration,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Painting {
    pub canvas: Canvas,
    pub density: DensityMap,
    pub anchors: AnchorSet,
    pub etf: EtfField,
    pub strokes: Vec<StrokeParams>,
    pub padding: PaddingReport,
    pub summary: Summary,
}

/// Paints `input` according to `config`.
pub fn paint_image(
    config: &PipelineConfig,
    input: &Raster<Rgb8>,
) -> Result<Painting, PipelineError> {
    config.validate()?;
    let template = config.template()?;
    let started = Instant::now();
    let (w, h) = (input.width(), input.height());

    let gray = to_gray(input);
    let hsv = rgb_to_hsv(input);
    let density = build_density_map(&gray, config.p_max)?;
    let k = anchor_count(&density).min(w * h);
    let mut rng = stream_rng(config.seed, Stream::Sampling);
    let sampled = RejectionSampler::default().sample(&density, k, &mut rng)?;
    let anchors = voronoi_relax(&sampled.anchors, &density, config.lloyd_iterations);

    let etf = match config.direction {
        DirectionMode::Etf => compute_etf(&gray, config.etf),
        DirectionMode::Constant(a) => {
            EtfField::constant(initial_tangents(&gray).modulus, a.rem_euclid(PI))
        }
        DirectionMode::Random => {
            let mut rng = stream_rng(config.seed, Stream::Direction);
            EtfField::random(initial_tangents(&gray).modulus, &mut rng)
        }
    };

    let strokes: Vec<StrokeParams> = anchors
        .pixels(w, h)
        .into_iter()
        .zip(&anchors.probs)
        .map(|(px, &p)| build_stroke(px, p, &etf, &hsv, config.p_max, &config.search))
        .collect();

    let mut renderer = StampRenderer::new(template);
    let mut canvas = Canvas::new(w, h);
    let mut dump_error = None;
    {
        let dir = config.dump_dir.as_deref();
        let every = config.progress_every;
        let mut on_stroke = |n: usize, c: &Canvas| {
            if let Some(dir) = dir {
                if n.is_multiple_of(every) && dump_error.is_none() {
                    let path = dir.join(format!("progress_{}.png", n / every));
                    if let Err(e) = image_io::save_png(&c.color, &path) {
                        dump_error = Some(e);
                    }
                }
            }
        };
        paint_onto(&mut canvas, &strokes, &mut renderer, &mut on_stroke)?;
    }
    if let Some(e) = dump_error {
        return Err(e);
    }

    let source = PaddingSource {
        rgb: input,
        hsv: &hsv,
        density: &density,
        etf: &etf,
        search: &config.search,
    };
    let padding = pad_holes(
        &mut canvas,
        &source,
        &mut renderer,
        config.max_padding_rounds,
    )?;

    let summary = Summary {
        k,
        strokes: strokes.len() + padding.strokes.len(),
        padding_strokes: padding.strokes.len(),
        padding_rounds: padding.rounds,
        fallback_pixels: padding.fallback_pixels,
        elapsed: started.elapsed(),
    };
    let painting = Painting {
        canvas,
        density,
        anchors,
        etf,
        strokes,
        padding,
        summary,
    };
    if let Some(dir) = &config.dump_dir {
        write_intermediates(dir, &painting)?;
    }
    Ok(painting)
}

fn write_intermediates(dir: &Path, p: &Painting) -> Result<(), PipelineError> {
    let (w, h) = (p.canvas.width(), p.canvas.height());
    let write_text = |name: &str, body: String| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| PipelineError::WriteFailed {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    };
    image_io::save_png(&dump::density_image(&p.density), &dir.join("density.png"))?;
    image_io::save_png(
        &dump::anchors_image(&p.anchors, w, h),
        &dir.join("anchors.png"),
    )?;
    image_io::save_png(&dump::etf_image(&p.etf, 8), &dir.join("etf.png"))?;
    write_text("anchors.csv", dump::anchors_csv(&p.anchors))?;
    let all: Vec<StrokeParams> = p
        .strokes
        .iter()
        .chain(&p.padding.strokes)
        .copied()
        .collect();
    write_text("strokes.csv", dump::strokes_csv(&all))
}

/// Reads `input`, paints it and writes the result to `output` as PNG.
pub fn run(config: &PipelineConfig, input: &Path, output: &Path) -> Result<Summary, PipelineError> {
    config.validate()?;
    if let Some(dir) = &config.dump_dir {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::WriteFailed {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    let img = image_io::load_rgb(input)?;
    let painting = paint_image(config, &img)?;
    image_io::save_png(&painting.canvas.color, output)?;
    Ok(painting.summary)
}
