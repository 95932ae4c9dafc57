use super::{RenderError, Stamp, StampRenderer};
use crate::density::DensityMap;
use crate::etf::EtfField;
use crate::raster::{connected_components, HsvPixel, Raster, Rgb8};
use crate::stroke::{build_stroke, SearchParams, StrokeParams};

const BLANK: Rgb8 = [255, 255, 255];

/// Output raster plus a record of which pixels have been painted.
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    pub color: Raster<Rgb8>,
    pub covered: Raster<bool>,
}

impl Canvas {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            color: Raster::filled(width, height, BLANK).expect("canvas must be non-empty"),
            covered: Raster::filled(width, height, false).expect("canvas must be non-empty"),
        }
    }

    pub fn width(&self) -> usize {
        self.color.width()
    }

    pub fn height(&self) -> usize {
        self.color.height()
    }

    pub fn uncovered(&self) -> usize {
        self.covered.as_slice().iter().filter(|&&c| !c).count()
    }

    /// Paints the stamp's footprint opaquely, clipping at the canvas edge.
    pub fn apply(&mut self, stamp: &Stamp) {
        for (x, y, c) in stamp.painted() {
            if let Ok(px) = self.color.get_mut(x, y) {
                *px = c;
                *self.covered.get_mut(x, y).expect("same shape as color") = true;
            }
        }
    }
}

/// Indices of `strokes` from largest to smallest area; ties keep input order.
pub fn painting_order(strokes: &[StrokeParams]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..strokes.len()).collect();
    order.sort_by(|&a, &b| strokes[b].area().total_cmp(&strokes[a].area()));
    order
}

/// Composites strokes onto `canvas` in painting order. `on_stroke` sees the
/// canvas after every stroke together with the number painted so far.
pub fn paint_onto(
    canvas: &mut Canvas,
    strokes: &[StrokeParams],
    renderer: &mut StampRenderer,
    on_stroke: &mut dyn FnMut(usize, &Canvas),
) -> Result<(), RenderError> {
    for (n, i) in painting_order(strokes).into_iter().enumerate() {
        let stamp = renderer.render(&strokes[i])?;
        canvas.apply(&stamp);
        on_stroke(n + 1, canvas);
    }
    Ok(())
}

/// Paints every stroke on a blank canvas, largest first.
pub fn paint(
    strokes: &[StrokeParams],
    renderer: &mut StampRenderer,
    width: usize,
    height: usize,
) -> Result<Canvas, RenderError> {
    let mut canvas = Canvas::new(width, height);
    paint_onto(&mut canvas, strokes, renderer, &mut |_, _| {})?;
    Ok(canvas)
}

/// Image data the padding strokes are searched against.
#[derive(Debug, Clone, Copy)]
pub struct PaddingSource<'a> {
    pub rgb: &'a Raster<Rgb8>,
    pub hsv: &'a Raster<HsvPixel>,
    pub density: &'a DensityMap,
    pub etf: &'a EtfField,
    pub search: &'a SearchParams,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PaddingReport {
    /// Padding rounds run.
    pub rounds: usize,
    pub strokes: Vec<StrokeParams>,
    /// Uncovered pixel count before padding and after each round.
    pub uncovered: Vec<usize>,
    /// Pixels copied straight from the source after the rounds ran out.
    pub fallback_pixels: usize,
}

/// Fills unpainted pixels. Each round places a stroke at the centroid of
/// every 4-connected hole (or the hole pixel nearest it, for holes that do
/// not contain their centroid), paints those strokes on a scratch canvas and
/// copies them into the holes only. Whatever survives `max_rounds` takes the
/// source colour.
pub fn pad_holes(
    canvas: &mut Canvas,
    source: &PaddingSource<'_>,
    renderer: &mut StampRenderer,
    max_rounds: usize,
) -> Result<PaddingReport, RenderError> {
    let (w, h) = (canvas.width(), canvas.height());
    let mut report = PaddingReport {
        uncovered: vec![canvas.uncovered()],
        ..Default::default()
    };
    while report.rounds < max_rounds {
        let remaining = *report.uncovered.last().expect("seeded above");
        if remaining == 0 {
            break;
        }
        let holes = canvas.covered.map(|&c| !c);
        let strokes: Vec<StrokeParams> = connected_components(&holes)
            .iter()
            .map(|c| {
                let (x, y) = c.interior_point();
                let p = *source.density.probs().at(x, y);
                build_stroke(
                    (x, y),
                    p,
                    source.etf,
                    source.hsv,
                    source.density.p_max(),
                    source.search,
                )
            })
            .collect();
        let mut scratch = Canvas::new(w, h);
        paint_onto(&mut scratch, &strokes, renderer, &mut |_, _| {})?;

        let (dst, done) = (canvas.color.as_mut_slice(), canvas.covered.as_mut_slice());
        for (i, (&hit, &c)) in scratch
            .covered
            .as_slice()
            .iter()
            .zip(scratch.color.as_slice())
            .enumerate()
        {
            if hit && !done[i] {
                dst[i] = c;
                done[i] = true;
            }
        }
        report.rounds += 1;
        report.strokes.extend(strokes);
        let now = canvas.uncovered();
        report.uncovered.push(now);
        if now == remaining {
            // no progress; further rounds would repeat this one exactly
            break;
        }
    }

    if *report.uncovered.last().expect("non-empty") > 0 {
        let src = source.rgb.as_slice();
        let (dst, done) = (canvas.color.as_mut_slice(), canvas.covered.as_mut_slice());
        for i in 0..dst.len() {
            if !done[i] {
                dst[i] = src[i];
                done[i] = true;
                report.fallback_pixels += 1;
            }
        }
    }
    Ok(report)
}
