use super::Raster;

/// Window size of every filter in this module.
pub const FILTER_WINDOW: usize = 5;

const SMOOTH: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
const DERIV: [f64; 5] = [-1.0, -2.0, 0.0, 2.0, 1.0];
const BOX: [f64; 5] = [1.0; 5];

/// Correlates `img` with the outer product `ky ⊗ kx`, replicating edge pixels
/// outside the raster, and divides the result by `norm`.
fn separable(img: &Raster<f64>, kx: &[f64; 5], ky: &[f64; 5], norm: f64) -> Raster<f64> {
    let (w, h) = (img.width(), img.height());
    let src = img.as_slice();
    let half = (FILTER_WINDOW / 2) as isize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kx.iter().enumerate() {
                let sx = (x as isize + i as isize - half).clamp(0, w as isize - 1) as usize;
                acc += k * row[sx];
            }
            tmp[y * w + x] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (i, k) in ky.iter().enumerate() {
            let sy = (y as isize + i as isize - half).clamp(0, h as isize - 1) as usize;
            let src_row = &tmp[sy * w..(sy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += k * s;
            }
        }
    }
    if norm != 1.0 {
        for v in &mut out {
            *v /= norm;
        }
    }
    Raster::from_vec(w, h, out).expect("dimensions preserved")
}

/// 5×5 Sobel derivatives `(gx, gy)`; `gx` is positive where intensity grows
/// with `x`.
pub fn sobel_xy(gray: &Raster<f64>) -> (Raster<f64>, Raster<f64>) {
    let gx = separable(gray, &DERIV, &SMOOTH, 1.0);
    let gy = separable(gray, &SMOOTH, &DERIV, 1.0);
    (gx, gy)
}

/// Per-pixel gradient modulus `sqrt(gx² + gy²)` from the 5×5 Sobel kernels.
pub fn sobel_gradient(gray: &Raster<f64>) -> Raster<f64> {
    let (gx, gy) = sobel_xy(gray);
    let mag = gx
        .as_slice()
        .iter()
        .zip(gy.as_slice())
        .map(|(x, y)| x.hypot(*y))
        .collect();
    Raster::from_vec(gray.width(), gray.height(), mag).expect("dimensions preserved")
}

/// 5×5 box average.
pub fn mean_filter(img: &Raster<f64>) -> Raster<f64> {
    separable(img, &BOX, &BOX, (FILTER_WINDOW * FILTER_WINDOW) as f64)
}
