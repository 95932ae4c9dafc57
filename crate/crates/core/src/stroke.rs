//! Per-anchor stroke parameters.
//!
//! A stroke is a rectangle around its anchor, oriented along the local flow
//! direction θ. Its four half-extents come from walking outwards from the
//! anchor until hue or value drift too far from the anchor's colour, then
//! clamping the walk into bounds set by the local sampling probability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use crate::etf::EtfField;
use crate::raster::{hue_distance, HsvPixel, HueMetric, Raster};

/// Thresholds and step size for the length search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Maximum hue drift, radians.
    pub t_h: f64,
    /// Maximum value drift on the 0..255 scale.
    pub t_v: f64,
    pub delta: f64,
    pub hue_metric: HueMetric,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            t_h: FRAC_PI_3,
            t_v: 15.0,
            delta: 1.0,
            hue_metric: HueMetric::Circular,
        }
    }
}

/// `p^(-1/2)`: the side of the square that holds one anchor at density `p`.
#[inline]
pub fn spacing(p: f64) -> f64 {
    1.0 / p.sqrt()
}

/// Clamp intervals for a stroke whose anchor has probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub min_width: f64,
    pub max_width: f64,
    pub min_length: f64,
    pub max_length: f64,
}

impl SearchLimits {
    pub fn new(p: f64, p_max: f64) -> Self {
        let p = p.min(p_max);
        Self {
            min_width: spacing(p_max),
            max_width: spacing(p),
            min_length: 3.0 * spacing(p_max),
            max_length: 3.0 * spacing(p),
        }
    }

    pub fn clamp_width(&self, w: f64) -> f64 {
        w.clamp(self.min_width, self.max_width)
    }

    pub fn clamp_length(&self, l: f64) -> f64 {
        l.clamp(self.min_length, self.max_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeParams {
    pub anchor: (usize, usize),
    pub theta: f64,
    /// Extent along θ.
    pub l1: f64,
    /// Extent along θ + π.
    pub l2: f64,
    /// Extent along θ + π/2.
    pub w1: f64,
    /// Extent along θ − π/2.
    pub w2: f64,
    pub color: HsvPixel,
    /// Sampling probability under the anchor.
    pub p: f64,
}

impl StrokeParams {
    pub fn length(&self) -> f64 {
        self.l1 + self.l2
    }

    pub fn width(&self) -> f64 {
        self.w1 + self.w2
    }

    pub fn area(&self) -> f64 {
        self.length() * self.width()
    }
}

/// Walks from `anchor` along `alpha` in steps of `delta`, returning the
/// travelled length at the first step that leaves the image or lands on a
/// pixel whose hue or value differs too much from the anchor. The failing
/// step is included, so the result is at least `delta`.
pub fn search_length(
    anchor: (usize, usize),
    alpha: f64,
    hsv: &Raster<HsvPixel>,
    params: &SearchParams,
) -> f64 {
    walk(anchor, alpha, hsv, params, f64::INFINITY)
}

/// [`search_length`] that gives up once the length reaches `cap`.
pub fn search_length_capped(
    anchor: (usize, usize),
    alpha: f64,
    hsv: &Raster<HsvPixel>,
    params: &SearchParams,
    cap: f64,
) -> f64 {
    walk(anchor, alpha, hsv, params, cap)
}

fn walk(
    anchor: (usize, usize),
    alpha: f64,
    hsv: &Raster<HsvPixel>,
    params: &SearchParams,
    cap: f64,
) -> f64 {
    assert!(params.delta > 0.0, "step must be positive");
    let origin = *hsv.at(anchor.0, anchor.1);
    let (x0, y0) = (anchor.0 as f64, anchor.1 as f64);
    let (dx, dy) = (alpha.cos(), alpha.sin());
    let mut n = 0u64;
    loop {
        n += 1;
        let len = n as f64 * params.delta;
        let px = (x0 + len * dx + 0.5).floor() as i64;
        let py = (y0 + len * dy + 0.5).floor() as i64;
        let Ok(here) = hsv.get(px, py) else {
            return len;
        };
        let same_hue = hue_distance(here.h, origin.h, params.hue_metric) < params.t_h;
        let same_value = (here.v - origin.v).abs() < params.t_v;
        if !(same_hue && same_value) || len >= cap {
            return len;
        }
    }
}

/// Searches all four extents of the stroke anchored at `anchor`.
pub fn build_stroke(
    anchor: (usize, usize),
    p: f64,
    etf: &EtfField,
    hsv: &Raster<HsvPixel>,
    p_max: f64,
    params: &SearchParams,
) -> StrokeParams {
    let theta = *etf.angle.at(anchor.0, anchor.1);
    let limits = SearchLimits::new(p, p_max);
    let along = |alpha: f64, cap: f64| search_length_capped(anchor, alpha, hsv, params, cap);
    StrokeParams {
        anchor,
        theta,
        l1: limits.clamp_length(along(theta, limits.max_length)),
        l2: limits.clamp_length(along(theta + PI, limits.max_length)),
        w1: limits.clamp_width(along(theta + FRAC_PI_2, limits.max_width)),
        w2: limits.clamp_width(along(theta - FRAC_PI_2, limits.max_width)),
        color: *hsv.at(anchor.0, anchor.1),
        p: p.min(p_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{rgb_to_hsv, Rgb8};
    use proptest::prelude::*;

    fn hsv_from(w: usize, h: usize, f: impl FnMut(usize, usize) -> Rgb8) -> Raster<HsvPixel> {
        rgb_to_hsv(&Raster::from_fn(w, h, f).unwrap())
    }

    fn flat_etf(w: usize, h: usize, theta: f64) -> EtfField {
        EtfField::constant(Raster::filled(w, h, 0.0).unwrap(), theta)
    }

    /// Per-pixel walk: list the pixels hit by steps 1, 2, ... and stop at the
    /// first one that is off-image or fails a threshold.
    fn walk_oracle(
        anchor: (usize, usize),
        alpha: f64,
        img: &Raster<HsvPixel>,
        t_h: f64,
        t_v: f64,
    ) -> f64 {
        let o = img.at(anchor.0, anchor.1);
        for step in 1.. {
            let fx = anchor.0 as f64 + step as f64 * alpha.cos();
            let fy = anchor.1 as f64 + step as f64 * alpha.sin();
            let (px, py) = ((fx + 0.5).floor(), (fy + 0.5).floor());
            if px < 0.0 || py < 0.0 || px >= img.width() as f64 || py >= img.height() as f64 {
                return step as f64;
            }
            let c = img.at(px as usize, py as usize);
            let dh = (c.h - o.h).abs();
            let dh = dh.min(2.0 * PI - dh);
            if !(dh < t_h && (c.v - o.v).abs() < t_v) {
                return step as f64;
            }
        }
        unreachable!()
    }

    #[test]
    fn uniform_image_walks_to_the_border() {
        let img = hsv_from(50, 30, |_, _| [90, 140, 30]);
        let sp = SearchParams::default();
        assert_eq!(search_length((10, 12), 0.0, &img, &sp), 40.0);
        assert_eq!(search_length((10, 12), PI, &img, &sp), 11.0);
        assert_eq!(search_length((10, 12), FRAC_PI_2, &img, &sp), 18.0);
    }

    #[test]
    fn walk_stops_at_value_edge() {
        let img = hsv_from(
            60,
            20,
            |x, _| if x < 30 { [0, 0, 0] } else { [255, 255, 255] },
        );
        let sp = SearchParams::default();
        let l = search_length((20, 10), 0.0, &img, &sp);
        assert_eq!(l, walk_oracle((20, 10), 0.0, &img, FRAC_PI_3, 15.0));
        assert!((l - 10.0).abs() <= 1.0);
    }

    #[test]
    fn symmetric_image_gives_symmetric_lengths() {
        let img = hsv_from(41, 9, |x, _| {
            if (x as i64 - 20).abs() > 7 {
                [200, 30, 30]
            } else {
                [30, 30, 200]
            }
        });
        let sp = SearchParams::default();
        let fwd = search_length((20, 4), 0.0, &img, &sp);
        let back = search_length((20, 4), PI, &img, &sp);
        assert_eq!(fwd, back);
        assert_eq!(fwd, 8.0);
    }

    #[test]
    fn hue_threshold_uses_the_chosen_metric() {
        // hues of 355° and 5° are close on the circle, far apart literally
        let a = HsvPixel {
            h: 355f64.to_radians(),
            s: 1.0,
            v: 200.0,
        };
        let b = HsvPixel {
            h: 5f64.to_radians(),
            s: 1.0,
            v: 200.0,
        };
        let img = Raster::from_fn(20, 1, |x, _| if x < 5 { a } else { b }).unwrap();
        let circ = SearchParams::default();
        let lit = SearchParams {
            hue_metric: HueMetric::Literal,
            ..circ
        };
        assert_eq!(search_length((2, 0), 0.0, &img, &circ), 18.0);
        assert_eq!(search_length((2, 0), 0.0, &img, &lit), 3.0);
    }

    #[test]
    fn saturation_is_ignored() {
        let img = Raster::from_fn(20, 1, |x, _| HsvPixel {
            h: 1.0,
            s: if x % 2 == 0 { 0.1 } else { 0.9 },
            v: 100.0,
        })
        .unwrap();
        assert_eq!(
            search_length((0, 0), 0.0, &img, &SearchParams::default()),
            20.0
        );
    }

    #[test]
    fn densest_anchor_collapses_to_minimum_extents() {
        let img = hsv_from(100, 100, |_, _| [120, 80, 60]);
        let s = build_stroke(
            (50, 50),
            0.25,
            &flat_etf(100, 100, 0.3),
            &img,
            0.25,
            &SearchParams::default(),
        );
        assert_eq!((s.l1, s.l2, s.w1, s.w2), (6.0, 6.0, 2.0, 2.0));
        assert_eq!(s.theta, 0.3);
        assert_eq!(s.color, *img.at(50, 50));
        assert_eq!(s.area(), 48.0);
    }

    #[test]
    fn sparsest_anchor_hits_maximum_length() {
        let p_max = 0.25;
        let img = hsv_from(200, 200, |_, _| [120, 80, 60]);
        let s = build_stroke(
            (100, 100),
            p_max / 100.0,
            &flat_etf(200, 200, 0.0),
            &img,
            p_max,
            &SearchParams::default(),
        );
        let want_len = 30.0 * spacing(p_max);
        assert!((s.l1 - want_len).abs() < 1e-9 && (s.l2 - want_len).abs() < 1e-9);
        assert!((s.w1 - 20.0).abs() < 1e-9 && (s.w2 - 20.0).abs() < 1e-9);
    }

    #[test]
    fn widths_next_to_an_edge_follow_the_walk() {
        // stroke runs vertically; edge three pixels to the right
        let p_max = 0.25;
        let img = hsv_from(60, 60, |x, _| {
            if x < 33 {
                [40, 40, 40]
            } else {
                [220, 220, 220]
            }
        });
        let etf = flat_etf(60, 60, FRAC_PI_2);
        let s = build_stroke(
            (30, 30),
            p_max / 4.0,
            &etf,
            &img,
            p_max,
            &SearchParams::default(),
        );
        let lim = SearchLimits::new(p_max / 4.0, p_max);
        // θ + π/2 points to -x (away from the edge), θ − π/2 to +x
        let raw_w1 = walk_oracle((30, 30), FRAC_PI_2 + FRAC_PI_2, &img, FRAC_PI_3, 15.0);
        let raw_w2 = walk_oracle((30, 30), 0.0, &img, FRAC_PI_3, 15.0);
        assert_eq!(raw_w2, 3.0);
        assert_eq!(s.w1, lim.clamp_width(raw_w1));
        assert_eq!(s.w2, 3.0);
        assert_eq!(s.w1, 4.0);
        for w in [s.w1, s.w2] {
            assert!((spacing(p_max)..=2.0 * spacing(p_max)).contains(&w));
        }
    }

    #[test]
    fn limits_collapse_at_p_max() {
        let l = SearchLimits::new(1.0 / 9.0, 1.0 / 9.0);
        assert_eq!(l.min_width, l.max_width);
        assert_eq!(l.min_length, l.max_length);
        assert!((l.min_length - 9.0).abs() < 1e-12);
    }

    /// Rotates an image a quarter turn: pixel (x, y) moves to (h - 1 - y, x).
    fn rotate_quarter(img: &Raster<HsvPixel>) -> Raster<HsvPixel> {
        let (w, h) = (img.width(), img.height());
        Raster::from_fn(h, w, |x, y| *img.at(y, h - 1 - x)).unwrap()
    }

    proptest! {
        #[test]
        fn lower_density_never_shrinks_extents(
            raw in 0.5f64..200.0,
            p_max in 0.01f64..1.0,
            a in 0.01f64..1.0,
            b in 0.01f64..1.0,
        ) {
            let (hi, lo) = if a >= b { (a * p_max, b * p_max) } else { (b * p_max, a * p_max) };
            let dense = SearchLimits::new(hi, p_max);
            let sparse = SearchLimits::new(lo, p_max);
            prop_assert!(sparse.clamp_width(raw) >= dense.clamp_width(raw));
            prop_assert!(sparse.clamp_length(raw) >= dense.clamp_length(raw));
            prop_assert!(dense.min_width <= dense.max_width);
            prop_assert!(dense.min_length <= dense.max_length);
        }

        #[test]
        fn quarter_turn_invariance(
            seed in 0u64..500,
            ax in 0usize..24,
            ay in 0usize..16,
            quarter in 0u32..4,
        ) {
            // blocky random image so axis walks cross real edges
            let img = hsv_from(24, 16, |x, y| {
                let v = ((x / 4) as u64 * 31 + (y / 3) as u64 * 17 + seed) % 7;
                [(v * 36) as u8, 100, (255 - v * 30) as u8]
            });
            let rot = rotate_quarter(&img);
            let sp = SearchParams::default();
            let alpha = quarter as f64 * FRAC_PI_2;
            let a = search_length((ax, ay), alpha, &img, &sp);
            let b = search_length((16 - 1 - ay, ax), alpha + FRAC_PI_2, &rot, &sp);
            prop_assert!((a - b).abs() <= 1.0, "{} vs {}", a, b);
        }

        #[test]
        fn matches_brute_force_walk(
            seed in 0u64..1000,
            ax in 0usize..32,
            ay in 0usize..32,
            alpha in 0.0f64..(2.0 * PI),
        ) {
            let img = hsv_from(32, 32, |x, y| {
                let t = ((x * x + 3 * y + seed as usize) % 23) as u8;
                [t * 11, 255 - t * 9, (x * 8) as u8]
            });
            let got = search_length((ax, ay), alpha, &img, &SearchParams::default());
            prop_assert_eq!(got, walk_oracle((ax, ay), alpha, &img, FRAC_PI_3, 15.0));
        }

        #[test]
        fn capped_search_clamps_identically(
            ax in 0usize..40,
            alpha in 0.0f64..(2.0 * PI),
            p in 0.003f64..0.25,
        ) {
            let img = hsv_from(40, 40, |x, y| if (x / 9 + y / 13) % 2 == 0 { [10, 200, 10] } else { [10, 200, 60] });
            let sp = SearchParams::default();
            let lim = SearchLimits::new(p, 0.25);
            let full = search_length((ax, 20), alpha, &img, &sp);
            let capped = search_length_capped((ax, 20), alpha, &img, &sp, lim.max_length);
            prop_assert_eq!(lim.clamp_length(full), lim.clamp_length(capped));
        }
    }
}
