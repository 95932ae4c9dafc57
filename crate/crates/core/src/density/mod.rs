//! Adaptive anchor placement.
//!
//! A gradient-driven probability map decides how many strokes an image gets
//! and where they go. Anchors are first drawn by rejection sampling and then
//! spread out with weighted Lloyd iterations over the pixel grid.

mod lloyd;
mod sampling;

pub use lloyd::{relax_traced, voronoi_relax, LloydTrace, Relaxation};
pub use sampling::{rejection_sample, RejectionSampler, SampleError, Sampling, StallPolicy};

use thiserror::Error;

use crate::raster::{mean_filter, sobel_gradient, Raster};

/// Ratio `p_max / p_min`.
pub const DYNAMIC_RANGE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("maximum sampling probability must lie in (0, 1], got {0}")]
    InvalidPMax(f64),
}

/// Per-pixel sampling probability bounded to `[p_min, p_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMap {
    probs: Raster<f64>,
    p_min: f64,
    p_max: f64,
}

impl DensityMap {
    /// Wraps an explicit probability raster. Values are clamped into
    /// `[p_max / 100, p_max]`.
    pub fn from_probs(mut probs: Raster<f64>, p_max: f64) -> Result<Self, DensityError> {
        let p_min = check_p_max(p_max)?;
        for v in probs.as_mut_slice() {
            *v = v.clamp(p_min, p_max);
        }
        Ok(Self {
            probs,
            p_min,
            p_max,
        })
    }

    pub fn probs(&self) -> &Raster<f64> {
        &self.probs
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn width(&self) -> usize {
        self.probs.width()
    }

    pub fn height(&self) -> usize {
        self.probs.height()
    }

    /// Probability at the pixel nearest to `(x, y)`.
    pub fn prob_at(&self, x: f64, y: f64) -> f64 {
        let (px, py) = nearest_pixel(x, y, self.width(), self.height());
        *self.probs.at(px, py)
    }
}

fn check_p_max(p_max: f64) -> Result<f64, DensityError> {
    if p_max.is_finite() && p_max > 0.0 && p_max <= 1.0 {
        Ok(p_max / DYNAMIC_RANGE)
    } else {
        Err(DensityError::InvalidPMax(p_max))
    }
}

/// Rounds a real position half-up to a pixel, clamped into the raster.
pub fn nearest_pixel(x: f64, y: f64, width: usize, height: usize) -> (usize, usize) {
    let px = (x + 0.5).floor().clamp(0.0, (width - 1) as f64) as usize;
    let py = (y + 0.5).floor().clamp(0.0, (height - 1) as f64) as usize;
    (px, py)
}

/// Smoothed Sobel magnitude min-max normalized into `[p_max / 100, p_max]`.
/// A featureless image maps to `p_min` everywhere.
pub fn build_density_map(gray: &Raster<f64>, p_max: f64) -> Result<DensityMap, DensityError> {
    let p_min = check_p_max(p_max)?;
    let g = mean_filter(&sobel_gradient(gray));
    let (lo, hi) = g
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let probs = if range > 0.0 {
        g.map(|&v| {
            if v == hi {
                p_max
            } else {
                (p_min + (v - lo) * (p_max - p_min) / range).clamp(p_min, p_max)
            }
        })
    } else {
        g.map(|_| p_min)
    };
    Ok(DensityMap {
        probs,
        p_min,
        p_max,
    })
}

/// Number of anchors: the probability mass of the map, rounded half-up and
/// never below one.
pub fn anchor_count(dm: &DensityMap) -> usize {
    let mass: f64 = dm.probs.as_slice().iter().sum();
    ((mass + 0.5).floor() as usize).max(1)
}

/// Anchor positions together with the density value under each.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    pub anchors: Vec<(f64, f64)>,
    pub probs: Vec<f64>,
}

impl AnchorSet {
    /// Builds a set and reads each anchor's probability from `dm`.
    pub fn from_positions(anchors: Vec<(f64, f64)>, dm: &DensityMap) -> Self {
        let probs = anchors.iter().map(|&(x, y)| dm.prob_at(x, y)).collect();
        Self { anchors, probs }
    }

    pub fn k(&self) -> usize {
        self.anchors.len()
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Anchor positions rounded to pixels.
    pub fn pixels(&self, width: usize, height: usize) -> Vec<(usize, usize)> {
        self.anchors
            .iter()
            .map(|&(x, y)| nearest_pixel(x, y, width, height))
            .collect()
    }
}
