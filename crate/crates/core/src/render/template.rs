use std::path::Path;

use image::{GrayAlphaImage, ImageFormat, LumaA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RenderError;
use crate::raster::Raster;

static DEFAULT_BRUSH_PNG: &[u8] = include_bytes!("../../assets/brush.png");

/// Grayscale brush image plus its footprint. The long side runs along `x`
/// and is the drawing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeTemplate {
    texture: Raster<u8>,
    mask: Raster<bool>,
    g_m: f64,
}

impl StrokeTemplate {
    pub fn new(texture: Raster<u8>, mask: Raster<bool>) -> Result<Self, RenderError> {
        if texture.width() != mask.width() || texture.height() != mask.height() {
            return Err(RenderError::Template(format!(
                "texture is {}x{} but mask is {}x{}",
                texture.width(),
                texture.height(),
                mask.width(),
                mask.height()
            )));
        }
        let (sum, n) = texture
            .as_slice()
            .iter()
            .zip(mask.as_slice())
            .filter(|(_, &m)| m)
            .fold((0.0, 0usize), |(s, n), (&t, _)| (s + t as f64, n + 1));
        if n == 0 {
            return Err(RenderError::Template(
                "mask has no foreground pixels".into(),
            ));
        }
        let g_m = sum / n as f64;
        if g_m <= 0.0 {
            return Err(RenderError::Template("foreground is entirely black".into()));
        }
        let tpl = Self { texture, mask, g_m };
        Ok(if tpl.texture.height() > tpl.texture.width() {
            tpl.transposed()
        } else {
            tpl
        })
    }

    /// Decodes a grayscale+alpha PNG: alpha > 0 marks the footprint, the
    /// gray channel is the texture. Images without alpha use every pixel.
    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self, RenderError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| RenderError::Template(e.to_string()))?
            .into_luma_alpha8();
        Self::from_luma_alpha(&img)
    }

    pub fn load(path: &Path) -> Result<Self, RenderError> {
        let bytes = std::fs::read(path).map_err(|e| RenderError::TemplateIo {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_png_bytes(&bytes)
    }

    fn from_luma_alpha(img: &GrayAlphaImage) -> Result<Self, RenderError> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let texture = Raster::from_fn(w, h, |x, y| img.get_pixel(x as u32, y as u32).0[0])
            .map_err(|e| RenderError::Template(e.to_string()))?;
        let mask = Raster::from_fn(w, h, |x, y| img.get_pixel(x as u32, y as u32).0[1] > 0)
            .map_err(|e| RenderError::Template(e.to_string()))?;
        Self::new(texture, mask)
    }

    /// The brush that ships with the crate.
    pub fn default_brush() -> Self {
        Self::from_png_bytes(DEFAULT_BRUSH_PNG).expect("bundled brush template is valid")
    }

    pub fn to_luma_alpha(&self) -> GrayAlphaImage {
        GrayAlphaImage::from_fn(self.width() as u32, self.height() as u32, |x, y| {
            let (x, y) = (x as usize, y as usize);
            let a = if *self.mask.at(x, y) { 255 } else { 0 };
            LumaA([*self.texture.at(x, y), a])
        })
    }

    pub fn save_png(&self, path: &Path) -> image::ImageResult<()> {
        self.to_luma_alpha()
            .save_with_format(path, ImageFormat::Png)
    }

    pub fn texture(&self) -> &Raster<u8> {
        &self.texture
    }

    pub fn mask(&self) -> &Raster<bool> {
        &self.mask
    }

    /// Mean gray over the footprint.
    pub fn g_m(&self) -> f64 {
        self.g_m
    }

    pub fn width(&self) -> usize {
        self.texture.width()
    }

    pub fn height(&self) -> usize {
        self.texture.height()
    }

    fn transposed(&self) -> Self {
        let (w, h) = (self.height(), self.width());
        Self {
            texture: Raster::from_fn(w, h, |x, y| *self.texture.at(y, x)).expect("non-empty"),
            mask: Raster::from_fn(w, h, |x, y| *self.mask.at(y, x)).expect("non-empty"),
            g_m: self.g_m,
        }
    }

    /// Synthesizes a bristle brush: a rounded footprint with ragged sides and
    /// tips, textured with streaks along its length.
    pub fn procedural(width: usize, height: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let smooth = |v: Vec<f64>, r: usize| -> Vec<f64> {
            (0..v.len())
                .map(|i| {
                    let lo = i.saturating_sub(r);
                    let hi = (i + r + 1).min(v.len());
                    v[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
                })
                .collect()
        };
        let mut noise = |n: usize, r: usize| -> Vec<f64> {
            smooth((0..n).map(|_| rng.random::<f64>()).collect(), r)
        };
        let side_top = noise(width, 3);
        let side_bottom = noise(width, 3);
        let tip_left = noise(height, 1);
        let tip_right = noise(height, 1);
        let bristles = noise(height, 1);
        let drift = noise(width, 12);

        let mask = Raster::from_fn(width, height, |x, y| {
            let u = 2.0 * (x as f64 + 0.5) / width as f64 - 1.0;
            let v = 2.0 * (y as f64 + 0.5) / height as f64 - 1.0;
            let side = if v < 0.0 { side_top[x] } else { side_bottom[x] };
            let half = (1.0 - u.abs().powi(8)).max(0.0).powf(0.25) * (0.93 + 0.07 * side);
            let left = 0.92 + 0.08 * tip_left[y];
            let right = 0.9 + 0.1 * tip_right[y];
            v.abs() <= half && u >= -left && u <= right
        })
        .expect("non-empty template");
        let texture = Raster::from_fn(width, height, |x, y| {
            let u = (x as f64 + 0.5) / width as f64;
            let streak = 0.55 + 0.45 * bristles[y];
            // paint thins out towards the trailing end
            let load = 0.8 + 0.2 * (1.0 - (1.0 - u).powi(3)) + 0.1 * (drift[x] - 0.5);
            (255.0 * streak * load).clamp(1.0, 255.0) as u8
        })
        .expect("non-empty template");
        Self::new(texture, mask).expect("procedural template has a footprint")
    }
}
