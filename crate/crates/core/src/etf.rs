//! Edge tangent flow: a per-pixel line direction that follows nearby edges.
//!
//! The field starts from Sobel gradients rotated by a quarter turn. Smoothing
//! passes then pull each direction towards a modulus-weighted average of its
//! disk neighbourhood, so weak pixels inherit the orientation of strong
//! edges close by. Directions are lines, not rays, and all averaging happens
//! on doubled angles.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::density::nearest_pixel;
use crate::raster::{sobel_xy, Raster};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtfParams {
    pub radius: usize,
    pub iterations: usize,
}

impl Default for EtfParams {
    fn default() -> Self {
        Self {
            radius: 5,
            iterations: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtfField {
    /// Direction in `[0, π)`.
    pub angle: Raster<f64>,
    /// Gradient modulus; smoothing leaves it untouched.
    pub modulus: Raster<f64>,
}

/// Folds an angle into `[0, π)`.
pub fn canonical_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Smallest difference between two line directions, in `[0, π/2]`.
pub fn line_angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Gradient field rotated by π/2, before any smoothing.
pub fn initial_tangents(gray: &Raster<f64>) -> EtfField {
    let (gx, gy) = sobel_xy(gray);
    let modulus = Raster::from_vec(
        gray.width(),
        gray.height(),
        gx.as_slice()
            .iter()
            .zip(gy.as_slice())
            .map(|(x, y)| x.hypot(*y))
            .collect(),
    )
    .expect("same shape");
    let angle = Raster::from_vec(
        gray.width(),
        gray.height(),
        gx.as_slice()
            .iter()
            .zip(gy.as_slice())
            .map(|(x, y)| canonical_angle(y.atan2(*x) + FRAC_PI_2))
            .collect(),
    )
    .expect("same shape");
    EtfField { angle, modulus }
}

pub fn compute_etf(gray: &Raster<f64>, params: EtfParams) -> EtfField {
    let mut field = initial_tangents(gray);
    for _ in 0..params.iterations {
        field.angle = smooth_pass(&field, params.radius);
    }
    field
}

fn smooth_pass(field: &EtfField, radius: usize) -> Raster<f64> {
    let (w, h) = (field.angle.width(), field.angle.height());
    let r = radius as isize;
    let offsets: Vec<(isize, isize)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
        .collect();

    let weights = field.modulus.as_slice();
    let (c2, s2): (Vec<f64>, Vec<f64>) = field
        .angle
        .as_slice()
        .iter()
        .zip(weights)
        .map(|(a, m)| (m * (2.0 * a).cos(), m * (2.0 * a).sin()))
        .unzip();

    let prev = field.angle.as_slice();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let (mut sc, mut ss, mut sw) = (0.0, 0.0, 0.0);
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                sc += c2[j];
                ss += s2[j];
                sw += weights[j];
            }
            let here = prev[y as usize * w + x as usize];
            if sw > 0.0 && (sc != 0.0 || ss != 0.0) {
                out.push(canonical_angle(ss.atan2(sc) / 2.0));
            } else {
                out.push(here);
            }
        }
    }
    Raster::from_vec(w, h, out).expect("same shape")
}

impl EtfField {
    /// Every pixel points along `angle`; the modulus is kept from `modulus`.
    pub fn constant(modulus: Raster<f64>, angle: f64) -> Self {
        let a = canonical_angle(angle);
        Self {
            angle: modulus.map(|_| a),
            modulus,
        }
    }

    /// Independent uniform directions per pixel.
    pub fn random<R: Rng + ?Sized>(modulus: Raster<f64>, rng: &mut R) -> Self {
        let angle = modulus.map(|_| rng.random_range(0.0..PI));
        Self { angle, modulus }
    }

    pub fn width(&self) -> usize {
        self.angle.width()
    }

    pub fn height(&self) -> usize {
        self.angle.height()
    }
}

/// Direction at the pixel nearest to `anchor`.
///
/// Panics if the anchor does not round to a pixel of the field.
pub fn direction_at(field: &EtfField, anchor: (f64, f64)) -> f64 {
    let (w, h) = (field.width(), field.height());
    let (x, y) = anchor;
    assert!(
        x >= -0.5 && y >= -0.5 && x < w as f64 - 0.5 && y < h as f64 - 0.5,
        "anchor ({x}, {y}) outside {w}x{h} field"
    );
    let (px, py) = nearest_pixel(x, y, w, h);
    *field.angle.at(px, py)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(a: f64) -> f64 {
        a.to_degrees()
    }

    /// Tangent of the circle through `(x, y)` around `c`.
    fn circle_tangent(x: usize, y: usize, c: (f64, f64)) -> f64 {
        canonical_angle((y as f64 - c.1).atan2(x as f64 - c.0) + FRAC_PI_2)
    }

    fn circles(n: usize, c: (f64, f64), noise: Option<u64>) -> Raster<f64> {
        let mut rng = noise.map(ChaCha8Rng::seed_from_u64);
        Raster::from_fn(n, n, |x, y| {
            let r = (x as f64 - c.0).hypot(y as f64 - c.1);
            let n = rng.as_mut().map_or(0.0, |g| g.random_range(-12.0..12.0));
            r + n
        })
        .unwrap()
    }

    fn mean_deviation(field: &EtfField, c: (f64, f64), min_r: f64) -> f64 {
        let (mut s, mut n) = (0.0, 0.0);
        for (x, y, &a) in field.angle.enumerate() {
            let r = (x as f64 - c.0).hypot(y as f64 - c.1);
            let border = x < 3 || y < 3 || x + 3 >= field.width() || y + 3 >= field.height();
            if r > min_r && !border {
                s += line_angle_diff(a, circle_tangent(x, y, c));
                n += 1.0;
            }
        }
        s / n
    }

    #[test]
    fn horizontal_ramp_gives_vertical_tangents() {
        let img = Raster::from_fn(24, 24, |x, _| x as f64).unwrap();
        let f = compute_etf(&img, EtfParams::default());
        for y in 3..21 {
            for x in 3..21 {
                assert!(line_angle_diff(*f.angle.at(x, y), FRAC_PI_2) < 1e-9);
            }
        }
    }

    #[test]
    fn circle_tangents_are_accurate() {
        let c = (63.5, 63.5);
        let f = compute_etf(&circles(128, c, None), EtfParams::default());
        let mut worst: f64 = 0.0;
        for (x, y, &a) in f.angle.enumerate() {
            let r = (x as f64 - c.0).hypot(y as f64 - c.1);
            if r > 10.0 && r < 55.0 {
                worst = worst.max(deg(line_angle_diff(a, circle_tangent(x, y, c))));
            }
        }
        assert!(worst < 5.0, "worst deviation {worst} deg");
    }

    #[test]
    fn constant_image_keeps_working() {
        let img = Raster::filled(16, 16, 100.0).unwrap();
        let f = compute_etf(&img, EtfParams::default());
        assert!(f.modulus.as_slice().iter().all(|&m| m == 0.0));
        assert!(f.angle.as_slice().iter().all(|&a| (0.0..PI).contains(&a)));
    }

    #[test]
    fn smoothing_leaves_modulus_bit_identical() {
        let img = circles(64, (30.2, 33.7), Some(3));
        let raw = initial_tangents(&img);
        let smoothed = compute_etf(
            &img,
            EtfParams {
                radius: 4,
                iterations: 5,
            },
        );
        assert_eq!(raw.modulus, smoothed.modulus);
    }

    #[test]
    fn smoothing_reduces_noise_induced_error() {
        let c = (63.5, 63.5);
        let img = circles(128, c, Some(9));
        let mut prev = f64::INFINITY;
        for iters in 0..=3 {
            let f = compute_etf(
                &img,
                EtfParams {
                    radius: 5,
                    iterations: iters,
                },
            );
            let dev = mean_deviation(&f, c, 10.0);
            assert!(dev <= prev, "iteration {iters}: {dev} > {prev}");
            prev = dev;
        }
    }

    #[test]
    fn flipping_directions_by_pi_changes_nothing() {
        let img = circles(48, (20.0, 26.0), Some(1));
        let base = initial_tangents(&img);
        let flipped = EtfField {
            angle: base.angle.map(|a| a + PI),
            modulus: base.modulus.clone(),
        };
        let a = smooth_pass(&base, 3);
        let b = smooth_pass(&flipped, 3);
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!(line_angle_diff(*x, *y) < 1e-9);
        }
    }

    #[test]
    fn direction_lookup_rounds_to_pixel() {
        let modulus = Raster::filled(10, 8, 1.0).unwrap();
        let f = EtfField::constant(modulus, 0.7);
        assert_eq!(direction_at(&f, (0.0, 0.0)), 0.7);
        assert_eq!(direction_at(&f, (9.2, 7.4)), 0.7);

        let mut g = EtfField::constant(Raster::filled(4, 4, 0.0).unwrap(), 0.0);
        *g.angle.at_mut(0, 0) = 1.25;
        assert_eq!(direction_at(&g, (0.0, 0.0)), 1.25);
        assert_eq!(direction_at(&g, (0.49, 0.2)), 1.25);
        assert_eq!(direction_at(&g, (0.5, 0.0)), 0.0);
    }

    #[test]
    #[should_panic]
    fn out_of_bounds_anchor_panics() {
        let f = EtfField::constant(Raster::filled(4, 4, 0.0).unwrap(), 0.0);
        direction_at(&f, (4.0, 0.0));
    }

    #[test]
    fn vertical_edge_tangent_is_vertical() {
        let img = Raster::from_fn(40, 40, |x, _| if x < 20 { 30.0 } else { 220.0 }).unwrap();
        let f = compute_etf(&img, EtfParams::default());
        for y in [5.0, 20.0, 33.0] {
            let th = direction_at(&f, (19.0, y));
            assert!(deg(line_angle_diff(th, FRAC_PI_2)) < 2.0);
        }
    }

    #[test]
    fn canonical_angle_range() {
        assert_eq!(canonical_angle(PI), 0.0);
        assert!((canonical_angle(-0.25) - (PI - 0.25)).abs() < 1e-12);
        assert!((canonical_angle(3.0 * PI + 0.5) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn random_field_is_seeded() {
        let m = Raster::filled(6, 6, 1.0).unwrap();
        let a = EtfField::random(m.clone(), &mut ChaCha8Rng::seed_from_u64(4));
        let b = EtfField::random(m, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        assert!(a.angle.as_slice().iter().all(|v| (0.0..PI).contains(v)));
    }
}
