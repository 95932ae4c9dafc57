//! Debug renderings of intermediate pipeline state.

use std::fmt::Write as _;

use crate::density::{AnchorSet, DensityMap};
use crate::etf::EtfField;
use crate::raster::{Raster, Rgb8};
use crate::stroke::StrokeParams;

/// Density as gray, mapping `[0, p_max]` linearly onto `[0, 255]`.
pub fn density_image(dm: &DensityMap) -> Raster<Rgb8> {
    let scale = 255.0 / dm.p_max();
    dm.probs().map(|&p| {
        let g = (p * scale).round().clamp(0.0, 255.0) as u8;
        [g, g, g]
    })
}

/// Black anchor dots on white.
pub fn anchors_image(anchors: &AnchorSet, width: usize, height: usize) -> Raster<Rgb8> {
    let mut img = Raster::filled(width, height, [255u8; 3]).expect("non-empty");
    for (x, y) in anchors.pixels(width, height) {
        *img.at_mut(x, y) = [0, 0, 0];
    }
    img
}

pub fn anchors_csv(anchors: &AnchorSet) -> String {
    let mut out = String::from("x,y,p\n");
    for (&(x, y), p) in anchors.anchors.iter().zip(&anchors.probs) {
        let _ = writeln!(out, "{x},{y},{p}");
    }
    out
}

/// Short line segments along the field on a grid with the given spacing.
pub fn etf_image(field: &EtfField, spacing: usize) -> Raster<Rgb8> {
    let (w, h) = (field.width(), field.height());
    let mut img = Raster::filled(w, h, [255u8; 3]).expect("non-empty");
    let spacing = spacing.max(2);
    let half = spacing as f64 * 0.4;
    for cy in (spacing / 2..h).step_by(spacing) {
        for cx in (spacing / 2..w).step_by(spacing) {
            let (sin, cos) = field.angle.at(cx, cy).sin_cos();
            let steps = (half * 4.0) as i64;
            for s in -steps..=steps {
                let t = s as f64 / 4.0;
                let x = (cx as f64 + t * cos).round() as i64;
                let y = (cy as f64 + t * sin).round() as i64;
                if let Ok(px) = img.get_mut(x, y) {
                    *px = [0, 0, 0];
                }
            }
        }
    }
    img
}

pub fn strokes_csv(strokes: &[StrokeParams]) -> String {
    let mut out = String::from("x,y,theta,l1,l2,w1,w2,h,s,v\n");
    for s in strokes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.anchor.0,
            s.anchor.1,
            s.theta,
            s.l1,
            s.l2,
            s.w1,
            s.w2,
            s.color.h,
            s.color.s,
            s.color.v
        );
    }
    out
}
