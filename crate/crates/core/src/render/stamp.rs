use std::collections::HashMap;

use image::imageops::{self, FilterType};
use image::GrayImage;

use super::{RenderError, StrokeTemplate};
use crate::raster::{HsvPixel, Raster, Rgb8};
use crate::stroke::StrokeParams;

/// A rasterized stroke. Local pixel `(i, j)` lands on canvas pixel
/// `(origin.0 + i, origin.1 + j)`; only pixels with `mask` set are painted.
#[derive(Debug, Clone, PartialEq)]
pub struct Stamp {
    pub origin: (i64, i64),
    pub color: Raster<Rgb8>,
    pub mask: Raster<bool>,
}

impl Stamp {
    pub fn painted(&self) -> impl Iterator<Item = (i64, i64, Rgb8)> + '_ {
        self.mask
            .enumerate()
            .filter(|(_, _, &m)| m)
            .map(|(i, j, _)| {
                (
                    self.origin.0 + i as i64,
                    self.origin.1 + j as i64,
                    *self.color.at(i, j),
                )
            })
    }
}

/// Template resampled to a stroke's length × width, before rotation.
#[derive(Debug)]
struct Resized {
    texture: Raster<f64>,
    mask: Raster<bool>,
}

/// Turns stroke parameters into stamps. Resized templates are cached by
/// their integer size.
#[derive(Debug)]
pub struct StampRenderer {
    template: StrokeTemplate,
    cache: HashMap<(usize, usize), Resized>,
}

// keeps exact pixel-boundary samples on the same side under rotation error
const EDGE_EPS: f64 = 1e-9;

impl StampRenderer {
    pub fn new(template: StrokeTemplate) -> Self {
        Self {
            template,
            cache: HashMap::new(),
        }
    }

    pub fn template(&self) -> &StrokeTemplate {
        &self.template
    }

    fn resized(&mut self, len: usize, wid: usize) -> &Resized {
        let tpl = &self.template;
        self.cache.entry((len, wid)).or_insert_with(|| {
            let src = GrayImage::from_raw(
                tpl.width() as u32,
                tpl.height() as u32,
                tpl.texture().as_slice().to_vec(),
            )
            .expect("template buffer matches its size");
            let small = imageops::resize(&src, len as u32, wid as u32, FilterType::Triangle);
            let texture = Raster::from_fn(len, wid, |x, y| {
                small.get_pixel(x as u32, y as u32).0[0] as f64
            })
            .expect("non-empty");
            let sx = tpl.width() as f64 / len as f64;
            let sy = tpl.height() as f64 / wid as f64;
            let mask = Raster::from_fn(len, wid, |x, y| {
                let tx = (((x as f64 + 0.5) * sx) as usize).min(tpl.width() - 1);
                let ty = (((y as f64 + 0.5) * sy) as usize).min(tpl.height() - 1);
                *tpl.mask().at(tx, ty)
            })
            .expect("non-empty");
            Resized { texture, mask }
        })
    }

    /// Resizes the template to `(l1 + l2) × (w1 + w2)`, rotates it by θ about
    /// the anchor and recolours it with the stroke's hue and saturation.
    ///
    /// The value channel is the texture scaled by `v / g`, where `g` is the
    /// stamp's own foreground mean, so the painted pixels average to `v`.
    /// When that scaling would push highlights past 255 the texture contrast
    /// is reduced around the mean instead of clipping.
    pub fn render(&mut self, sp: &StrokeParams) -> Result<Stamp, RenderError> {
        let (len, wid) = (sp.length(), sp.width());
        let (len_px, wid_px) = (len.round(), wid.round());
        if !(len_px >= 1.0 && wid_px >= 1.0) {
            return Err(RenderError::DegenerateStroke {
                length: len,
                width: wid,
            });
        }
        let (len_px, wid_px) = (len_px as usize, wid_px as usize);
        let (l2, w2) = (sp.l2, sp.w2);
        let scale_u = len_px as f64 / len;
        let scale_w = wid_px as f64 / wid;
        let (sin, cos) = sp.theta.sin_cos();

        // canvas-space bounding box of the rotated rectangle
        let corners = [(-l2, -w2), (sp.l1, -w2), (-l2, sp.w1), (sp.l1, sp.w1)];
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (u, w) in corners {
            let dx = u * cos - w * sin;
            let dy = u * sin + w * cos;
            lo_x = lo_x.min(dx);
            hi_x = hi_x.max(dx);
            lo_y = lo_y.min(dy);
            hi_y = hi_y.max(dy);
        }
        let (x0, x1) = (lo_x.floor() as i64 - 1, hi_x.ceil() as i64 + 1);
        let (y0, y1) = (lo_y.floor() as i64 - 1, hi_y.ceil() as i64 + 1);
        let bw = (x1 - x0 + 1) as usize;
        let bh = (y1 - y0 + 1) as usize;

        let src = self.resized(len_px, wid_px);
        let mut mask = Raster::filled(bw, bh, false).expect("non-empty box");
        let mut tex = Raster::filled(bw, bh, 0.0f64).expect("non-empty box");
        for j in 0..bh {
            let dy = (y0 + j as i64) as f64;
            for i in 0..bw {
                let dx = (x0 + i as i64) as f64;
                let tu = (dx * cos + dy * sin + l2) * scale_u;
                let tw = (-dx * sin + dy * cos + w2) * scale_w;
                let (mi, mj) = ((tu + EDGE_EPS).floor(), (tw + EDGE_EPS).floor());
                if mi < 0.0 || mj < 0.0 || mi >= len_px as f64 || mj >= wid_px as f64 {
                    continue;
                }
                if !*src.mask.at(mi as usize, mj as usize) {
                    continue;
                }
                *mask.at_mut(i, j) = true;
                *tex.at_mut(i, j) = bilinear(&src.texture, tu - 0.5, tw - 0.5);
            }
        }

        let values = value_channel(&tex, &mask, sp.color.v);
        let color = Raster::from_fn(bw, bh, |i, j| {
            HsvPixel {
                h: sp.color.h,
                s: sp.color.s,
                v: *values.at(i, j),
            }
            .to_rgb()
        })
        .expect("non-empty box");

        let (ax, ay) = (sp.anchor.0 as i64, sp.anchor.1 as i64);
        Ok(Stamp {
            origin: (ax + x0, ay + y0),
            color,
            mask,
        })
    }
}

fn bilinear(img: &Raster<f64>, x: f64, y: f64) -> f64 {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let x = x.clamp(0.0, w - 1.0);
    let y = y.clamp(0.0, h - 1.0);
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    let bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Scales the texture so the masked mean equals `v`, compressing contrast
/// when highlights would exceed 255.
fn value_channel(tex: &Raster<f64>, mask: &Raster<bool>, v: f64) -> Raster<f64> {
    let (sum, max, n) = tex
        .as_slice()
        .iter()
        .zip(mask.as_slice())
        .filter(|(_, &m)| m)
        .fold((0.0, 0.0f64, 0usize), |(s, mx, n), (&t, _)| {
            (s + t, mx.max(t), n + 1)
        });
    if n == 0 {
        return tex.map(|_| v);
    }
    let g = sum / n as f64;
    if g <= 0.0 {
        return tex.map(|_| v);
    }
    let mut gain = v / g;
    if v + gain * (max - g) > 255.0 {
        gain = (255.0 - v) / (max - g);
    }
    tex.map(|&t| (v + gain * (t - g)).clamp(0.0, 255.0))
}
