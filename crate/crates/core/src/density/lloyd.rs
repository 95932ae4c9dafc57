use super::{AnchorSet, DensityMap};

/// Energy after each Lloyd step. `energies[0]` pairs the initial centroids
/// with their first assignment; `energies[i]` is measured after update `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydTrace {
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub anchors: AnchorSet,
    pub trace: LloydTrace,
}

/// Weighted Lloyd relaxation of `anchors` over the pixel grid, weighting
/// every pixel by its density value.
pub fn voronoi_relax(anchors: &AnchorSet, weights: &DensityMap, iterations: usize) -> AnchorSet {
    relax_traced(anchors, weights, iterations).anchors
}

/// As [`voronoi_relax`], also recording the weighted quantization energy
/// `Σ I_p · |pixel − centroid|²` across iterations.
pub fn relax_traced(anchors: &AnchorSet, weights: &DensityMap, iterations: usize) -> Relaxation {
    let (w, h) = (weights.width(), weights.height());
    let probs = weights.probs().as_slice();
    let mut centroids = anchors.anchors.clone();
    let mut assignment = vec![0u32; w * h];
    let mut energies = Vec::with_capacity(iterations + 1);

    for it in 0..iterations {
        let grid = CentroidGrid::new(&centroids, w, h);
        for y in 0..h {
            for x in 0..w {
                assignment[y * w + x] = grid.nearest(x, y, &centroids) as u32;
            }
        }
        if it == 0 {
            energies.push(energy(&assignment, &centroids, probs, w));
        }

        let k = centroids.len();
        let mut sx = vec![0.0; k];
        let mut sy = vec![0.0; k];
        let mut sw = vec![0.0; k];
        for (i, (&a, &p)) in assignment.iter().zip(probs).enumerate() {
            let a = a as usize;
            sx[a] += p * (i % w) as f64;
            sy[a] += p * (i / w) as f64;
            sw[a] += p;
        }
        for (c, ((x, y), m)) in centroids.iter_mut().zip(sx.iter().zip(&sy).zip(&sw)) {
            // empty cluster: keep the previous position
            if *m > 0.0 {
                *c = (x / m, y / m);
            }
        }
        energies.push(energy(&assignment, &centroids, probs, w));
    }

    Relaxation {
        anchors: AnchorSet::from_positions(centroids, weights),
        trace: LloydTrace { energies },
    }
}

fn energy(assignment: &[u32], centroids: &[(f64, f64)], probs: &[f64], w: usize) -> f64 {
    assignment
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(i, (&a, &p))| p * dist2((i % w) as f64, (i / w) as f64, centroids[a as usize]))
        .sum()
}

#[inline]
fn dist2(x: f64, y: f64, c: (f64, f64)) -> f64 {
    let dx = x - c.0;
    let dy = y - c.1;
    dx * dx + dy * dy
}

/// Uniform bucket grid over centroids. `nearest` returns exactly what a full
/// scan would, including the lowest-index tie-break.
struct CentroidGrid {
    cell: usize,
    cols: usize,
    rows: usize,
    starts: Vec<usize>,
    members: Vec<u32>,
}

impl CentroidGrid {
    fn new(centroids: &[(f64, f64)], w: usize, h: usize) -> Self {
        let area = (w * h) as f64;
        let cell = ((area / centroids.len().max(1) as f64).sqrt().ceil() as usize).max(1);
        let cols = w.div_ceil(cell);
        let rows = h.div_ceil(cell);
        let cell_of = |&(x, y): &(f64, f64)| {
            let cx = ((x.max(0.0) as usize) / cell).min(cols - 1);
            let cy = ((y.max(0.0) as usize) / cell).min(rows - 1);
            cy * cols + cx
        };
        let mut counts = vec![0usize; cols * rows + 1];
        for c in centroids {
            counts[cell_of(c) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut members = vec![0u32; centroids.len()];
        for (i, c) in centroids.iter().enumerate() {
            let slot = &mut fill[cell_of(c)];
            members[*slot] = i as u32;
            *slot += 1;
        }
        Self {
            cell,
            cols,
            rows,
            starts,
            members,
        }
    }

    fn nearest(&self, x: usize, y: usize, centroids: &[(f64, f64)]) -> usize {
        let (fx, fy) = (x as f64, y as f64);
        let cx = (x / self.cell) as isize;
        let cy = (y / self.cell) as isize;
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        let max_ring = self.cols.max(self.rows) as isize;
        for r in 0..=max_ring {
            for gy in (cy - r).max(0)..=(cy + r).min(self.rows as isize - 1) {
                let on_edge_row = gy == cy - r || gy == cy + r;
                let step = if on_edge_row { 1 } else { (2 * r).max(1) };
                let mut gx = cx - r;
                while gx <= cx + r {
                    if gx >= 0 && gx < self.cols as isize {
                        let cell = gy as usize * self.cols + gx as usize;
                        for &j in &self.members[self.starts[cell]..self.starts[cell + 1]] {
                            let j = j as usize;
                            let d = dist2(fx, fy, centroids[j]);
                            if d < best_d || (d == best_d && j < best) {
                                best_d = d;
                                best = j;
                            }
                        }
                    }
                    gx += step;
                }
            }
            // anything in ring r + 1 or beyond is farther than r * cell
            let bound = (r as usize * self.cell) as f64;
            if best != usize::MAX && best_d <= bound * bound {
                break;
            }
        }
        best
    }
}
