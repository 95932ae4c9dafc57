use super::Raster;

/// A 4-connected region of `true` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Member pixels in discovery order.
    pub pixels: Vec<(usize, usize)>,
    /// Mean member coordinate, rounded half-up to the nearest pixel.
    pub centroid: (usize, usize),
}

impl Component {
    pub fn size(&self) -> usize {
        self.pixels.len()
    }

    /// The centroid if it lies inside the region, otherwise the member pixel
    /// nearest to it (first in discovery order on ties).
    pub fn interior_point(&self) -> (usize, usize) {
        let (cx, cy) = (self.centroid.0 as i64, self.centroid.1 as i64);
        let d2 = |&(x, y): &(usize, usize)| (x as i64 - cx).pow(2) + (y as i64 - cy).pow(2);
        let mut best = self.pixels[0];
        for p in &self.pixels {
            if d2(p) < d2(&best) {
                best = *p;
            }
        }
        best
    }
}

/// Labels the 4-connected components of `mask`. Components are returned in
/// the row-major order of their first pixel.
pub fn connected_components(mask: &Raster<bool>) -> Vec<Component> {
    let (w, h) = (mask.width(), mask.height());
    let cells = mask.as_slice();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !cells[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        let (mut sx, mut sy) = (0u64, 0u64);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            sx += x as u64;
            sy += y as u64;
            let mut visit = |j: usize| {
                if cells[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        let n = pixels.len() as f64;
        let centroid = (
            (sx as f64 / n + 0.5).floor() as usize,
            (sy as f64 / n + 0.5).floor() as usize,
        );
        out.push(Component { pixels, centroid });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mask_from(w: usize, h: usize, on: &[(usize, usize)]) -> Raster<bool> {
        let mut m = Raster::filled(w, h, false).unwrap();
        for &(x, y) in on {
            *m.at_mut(x, y) = true;
        }
        m
    }

    #[test]
    fn empty_mask_has_no_components() {
        let m = Raster::filled(8, 8, false).unwrap();
        assert!(connected_components(&m).is_empty());
    }

    #[test]
    fn diagonal_neighbors_are_separate() {
        let m = mask_from(4, 4, &[(1, 1), (2, 2)]);
        let cc = connected_components(&m);
        assert_eq!(cc.len(), 2);
        assert_eq!(cc[0].centroid, (1, 1));
        assert_eq!(cc[1].centroid, (2, 2));
    }

    #[test]
    fn solid_block_centroid() {
        let mut on = Vec::new();
        for y in 10..=12 {
            for x in 10..=12 {
                on.push((x, y));
            }
        }
        let cc = connected_components(&mask_from(20, 20, &on));
        assert_eq!(cc.len(), 1);
        assert_eq!(cc[0].size(), 9);
        assert_eq!(cc[0].centroid, (11, 11));
    }

    #[test]
    fn interior_point_of_a_ring() {
        let mask = Raster::from_fn(5, 5, |x, y| x == 0 || y == 0 || x == 4 || y == 4).unwrap();
        let cc = connected_components(&mask);
        assert_eq!(cc[0].centroid, (2, 2));
        let (x, y) = cc[0].interior_point();
        assert!(cc[0].pixels.contains(&(x, y)));
        assert_eq!((x as i64 - 2).abs() + (y as i64 - 2).abs(), 2);
        let block = connected_components(&Raster::filled(3, 3, true).unwrap());
        assert_eq!(block[0].interior_point(), block[0].centroid);
    }

    #[test]
    fn centroid_rounds_half_up() {
        let cc = connected_components(&mask_from(5, 1, &[(1, 0), (2, 0)]));
        assert_eq!(cc[0].centroid, (2, 0));
    }

    proptest! {
        #[test]
        fn components_partition_the_mask(
            (w, h, bits) in (1usize..24, 1usize..24)
                .prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<bool>(), w * h)))
        ) {
            let m = Raster::from_vec(w, h, bits).unwrap();
            let cc = connected_components(&m);
            let total: usize = cc.iter().map(Component::size).sum();
            let pop = m.as_slice().iter().filter(|&&b| b).count();
            prop_assert_eq!(total, pop);
            let mut owner = vec![usize::MAX; w * h];
            for (label, c) in cc.iter().enumerate() {
                for &(x, y) in &c.pixels {
                    prop_assert!(*m.at(x, y));
                    prop_assert_eq!(owner[y * w + x], usize::MAX);
                    owner[y * w + x] = label;
                }
            }
            // 4-neighbours that are both set share a label
            for y in 0..h {
                for x in 0..w {
                    if x + 1 < w && *m.at(x, y) && *m.at(x + 1, y) {
                        prop_assert_eq!(owner[y * w + x], owner[y * w + x + 1]);
                    }
                    if y + 1 < h && *m.at(x, y) && *m.at(x, y + 1) {
                        prop_assert_eq!(owner[y * w + x], owner[(y + 1) * w + x]);
                    }
                }
            }
        }
    }
}
