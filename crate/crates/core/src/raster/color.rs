use std::f64::consts::{FRAC_PI_3, PI, TAU};

use super::{Raster, Rgb8};

/// HSV color with hue in radians `[0, 2π)`, saturation in `[0, 1]` and value
/// on the 8-bit scale `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl HsvPixel {
    pub fn from_rgb([r, g, b]: Rgb8) -> Self {
        let (r, g, b) = (r as f64, g as f64, b as f64);
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let delta = max - min;
        let s = if max > 0.0 { delta / max } else { 0.0 };
        let sector = if delta == 0.0 {
            0.0
        } else if max == r {
            let h = (g - b) / delta;
            if h < 0.0 {
                h + 6.0
            } else {
                h
            }
        } else if max == g {
            (b - r) / delta + 2.0
        } else {
            (r - g) / delta + 4.0
        };
        let mut h = sector * FRAC_PI_3;
        if h >= TAU {
            h -= TAU;
        }
        Self { h, s, v: max }
    }

    /// Converts back to 8-bit RGB, rounding and clamping each channel.
    pub fn to_rgb(self) -> Rgb8 {
        let v = self.v.clamp(0.0, 255.0);
        let s = self.s.clamp(0.0, 1.0);
        let c = v * s;
        let sector = self.h.rem_euclid(TAU) / FRAC_PI_3;
        let x = c * (1.0 - ((sector % 2.0) - 1.0).abs());
        let m = v - c;
        let (r, g, b) = match sector as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let q = |ch: f64| (ch + m).round().clamp(0.0, 255.0) as u8;
        [q(r), q(g), q(b)]
    }
}

pub fn rgb_to_hsv(img: &Raster<Rgb8>) -> Raster<HsvPixel> {
    img.map(|&px| HsvPixel::from_rgb(px))
}

pub fn hsv_to_rgb(img: &Raster<HsvPixel>) -> Raster<Rgb8> {
    img.map(|px| px.to_rgb())
}

/// How two hues are compared during stroke search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HueMetric {
    /// Shortest distance around the hue circle.
    #[default]
    Circular,
    /// Plain `|h1 - h2|`, ignoring the wrap at 2π.
    Literal,
}

pub fn hue_distance(h1: f64, h2: f64, metric: HueMetric) -> f64 {
    let d = (h1 - h2).abs();
    match metric {
        HueMetric::Literal => d,
        HueMetric::Circular => {
            let d = d.rem_euclid(TAU);
            if d > PI {
                TAU - d
            } else {
                d
            }
        }
    }
}
