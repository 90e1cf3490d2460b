//! Gray-coded square M-QAM alphabet with hard-decision decoding and the
//! decision-region geometry used by the reliability functions.
//!
//! Points are normalised to unit average energy, so the minimum inter-point
//! distance of square M-QAM is `sqrt(6/(M-1))`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Binary-reflected Gray code of `n`.
fn gray_code(n: usize) -> usize {
    n ^ (n >> 1)
}

/// An M-ary square QAM alphabet (M ∈ {4, 16, 64}).
///
/// `points[w]` is the constellation point whose bit word (MSB-first) is `w`.
/// The word splits into an in-phase half and a quadrature half, each
/// Gray-coded along its axis, so lattice neighbours differ in exactly one bit.
#[derive(Debug, Clone)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    side: usize,
    points: Vec<Complex64>,
    d_min: f64,
    interior_mask: Vec<bool>,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64) {
            return Err(Error::invalid(format!(
                "unsupported QAM order {order}; expected 4, 16 or 64"
            )));
        }
        let bits_per_symbol = (order as f64).log2().round() as usize;
        let side = (order as f64).sqrt().round() as usize;
        let half = bits_per_symbol / 2;

        // Unit average energy: each axis carries levels ±1, ±3, … scaled by κ.
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();

        let mut points = vec![Complex64::new(0.0, 0.0); order];
        let mut interior_mask = vec![false; order];
        for col in 0..side {
            for row in 0..side {
                let word = (gray_code(col) << half) | gray_code(row);
                let re = scale * (2.0 * col as f64 - (side as f64 - 1.0));
                let im = scale * (2.0 * row as f64 - (side as f64 - 1.0));
                points[word] = Complex64::new(re, im);
                interior_mask[word] =
                    col > 0 && col < side - 1 && row > 0 && row < side - 1;
            }
        }

        Ok(Self {
            order,
            bits_per_symbol,
            side,
            points,
            d_min: 2.0 * scale,
            interior_mask,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Minimum distance between any two alphabet points.
    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    /// True where the point has four nearest lattice neighbours.
    pub fn interior_mask(&self) -> &[bool] {
        &self.interior_mask
    }

    pub fn is_interior(&self, index: usize) -> bool {
        self.interior_mask[index]
    }

    /// Distances to the nearest and next-nearest lattice neighbour.
    ///
    /// On the square lattice these are `d_min` and `√2·d_min` for every
    /// point; how many neighbours actually exist at those distances is a
    /// separate question answered by [`Self::interior_mask`].
    pub fn neighbor_distances(&self, index: usize) -> (f64, f64) {
        assert!(index < self.order, "point index out of range");
        (self.d_min, std::f64::consts::SQRT_2 * self.d_min)
    }

    /// Map a bit sequence onto constellation points, one point per
    /// `bits_per_symbol` group (MSB-first within a group).
    pub fn map_bits(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        Ok(self
            .indices_from_bits(bits)?
            .into_iter()
            .map(|w| self.points[w])
            .collect())
    }

    /// Same as [`Self::map_bits`] but returns the point indices.
    pub fn indices_from_bits(&self, bits: &[bool]) -> Result<Vec<usize>> {
        if !bits.len().is_multiple_of(self.bits_per_symbol) {
            return Err(Error::invalid(format!(
                "bit count {} is not divisible by {} bits per symbol",
                bits.len(),
                self.bits_per_symbol
            )));
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|group| group.iter().fold(0usize, |w, &b| (w << 1) | b as usize))
            .collect())
    }

    /// Bit word of point `index`, MSB-first.
    pub fn bits_for_index(&self, index: usize) -> Vec<bool> {
        (0..self.bits_per_symbol)
            .rev()
            .map(|i| (index >> i) & 1 == 1)
            .collect()
    }

    /// Hard-decode each symbol back to its bit word.
    pub fn demap_bits(&self, symbols: &[Complex64]) -> Vec<bool> {
        symbols
            .iter()
            .flat_map(|&v| self.bits_for_index(self.hard_decision(v).0))
            .collect()
    }

    /// Nearest constellation point to `v` by Euclidean distance.
    ///
    /// Ties (points exactly equidistant from `v`) go to the lower index, so
    /// the decision is deterministic everywhere.
    pub fn hard_decision(&self, v: Complex64) -> (usize, Complex64) {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (v - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        (best, self.points[best])
    }

    /// Hard decision over a whole frame, returning point indices.
    pub fn decode_indices(&self, symbols: &[Complex64]) -> Vec<usize> {
        symbols.iter().map(|&v| self.hard_decision(v).0).collect()
    }

    /// Per-tone deviation of a frame from its hard decisions.
    pub fn deviations(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        symbols
            .iter()
            .map(|&v| v - self.hard_decision(v).1)
            .collect()
    }

    /// Lattice side length (√M).
    pub fn side(&self) -> usize {
        self.side
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_square_orders() {
        assert!(QamConstellation::new(8).is_err());
        assert!(QamConstellation::new(32).is_err());
        assert!(QamConstellation::new(0).is_err());
    }

    #[test]
    fn unit_average_energy() {
        for order in [4, 16, 64] {
            let c = QamConstellation::new(order).unwrap();
            let e: f64 =
                c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
            assert!((e - 1.0).abs() < 1e-12, "order {order}: energy {e}");
        }
    }

    #[test]
    fn d_min_matches_pairwise_minimum() {
        for order in [4, 16, 64] {
            let c = QamConstellation::new(order).unwrap();
            let mut pairwise = f64::INFINITY;
            for i in 0..order {
                for j in (i + 1)..order {
                    pairwise = pairwise.min((c.point(i) - c.point(j)).norm());
                }
            }
            assert!((c.d_min() - pairwise).abs() < 1e-12);
            let analytic = (6.0 / (order as f64 - 1.0)).sqrt();
            assert!((c.d_min() - analytic).abs() < 1e-12);
        }
    }

    #[test]
    fn bit_map_is_gray_coded_bijection() {
        for order in [4usize, 16, 64] {
            let c = QamConstellation::new(order).unwrap();
            // Bijection: every index maps to a distinct point.
            for i in 0..order {
                for j in (i + 1)..order {
                    assert!((c.point(i) - c.point(j)).norm() > 1e-9);
                }
            }
            // Gray property: lattice neighbours differ in exactly one bit.
            for i in 0..order {
                for j in 0..order {
                    let d = (c.point(i) - c.point(j)).norm();
                    if i != j && d < c.d_min() + 1e-9 {
                        assert_eq!(
                            (i ^ j).count_ones(),
                            1,
                            "order {order}: adjacent words {i:#b} and {j:#b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn map_bits_identity_for_word_zero() {
        let c = QamConstellation::new(16).unwrap();
        let x = c.map_bits(&[false, false, false, false]).unwrap();
        assert_eq!(x.len(), 1);
        assert!((x[0] - c.point(0)).norm() < 1e-15);
    }

    #[test]
    fn map_bits_rejects_bad_length() {
        let c = QamConstellation::new(16).unwrap();
        assert!(c.map_bits(&[true, false, true]).is_err());
    }

    #[test]
    fn map_demap_round_trip() {
        let c = QamConstellation::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bits: Vec<bool> = (0..256).map(|_| rng.gen_bool(0.5)).collect();
        let symbols = c.map_bits(&bits).unwrap();
        assert_eq!(c.demap_bits(&symbols), bits);
    }

    #[test]
    fn random_frames_have_unit_empirical_energy() {
        // Average symbol energy over many mapped frames converges to 1.
        let c = QamConstellation::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let frames = 10_000;
        let n = 64;
        let mut acc = 0.0;
        for _ in 0..frames {
            let bits: Vec<bool> =
                (0..n * c.bits_per_symbol()).map(|_| rng.gen_bool(0.5)).collect();
            let x = c.map_bits(&bits).unwrap();
            acc += x.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let mean = acc / (frames * n) as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean symbol energy {mean}");
    }

    #[test]
    fn hard_decision_identity_on_alphabet() {
        let c = QamConstellation::new(16).unwrap();
        for i in 0..16 {
            let (idx, p) = c.hard_decision(c.point(i));
            assert_eq!(idx, i);
            assert_eq!(p, c.point(i));
        }
    }

    #[test]
    fn hard_decision_midpoint_tie_breaks_low_index() {
        let c = QamConstellation::new(16).unwrap();
        // Midpoint between two horizontally adjacent points.
        let a = 0usize;
        let mut b = None;
        for j in 1..16 {
            let d = (c.point(0) - c.point(j)).norm();
            if (d - c.d_min()).abs() < 1e-12
                && (c.point(j).im - c.point(0).im).abs() < 1e-12
            {
                b = Some(j);
            }
        }
        let b = b.expect("point 0 has a horizontal neighbour");
        let mid = (c.point(a) + c.point(b)) / 2.0;
        let (idx, _) = c.hard_decision(mid);
        assert_eq!(idx, a.min(b));
    }

    #[test]
    fn hard_decision_matches_exhaustive_scan() {
        // Brute-force oracle: recompute the argmin independently.
        let c = QamConstellation::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100_000 {
            let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (idx, _) = c.hard_decision(v);
            let oracle = (0..16)
                .map(|i| (i, (v - c.point(i)).norm_sqr()))
                .fold((0usize, f64::INFINITY), |acc, (i, d)| {
                    if d < acc.1 {
                        (i, d)
                    } else {
                        acc
                    }
                })
                .0;
            assert_eq!(idx, oracle);
        }
    }

    #[test]
    fn hard_decision_is_idempotent() {
        let c = QamConstellation::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (_, p) = c.hard_decision(v);
            let (_, p2) = c.hard_decision(p);
            assert_eq!(p, p2);
        }
    }

    #[test]
    fn neighbor_distances_match_lattice_enumeration() {
        for order in [4usize, 16] {
            let c = QamConstellation::new(order).unwrap();
            for i in 0..order {
                let (d_nn, d_nnn) = c.neighbor_distances(i);
                let mut dists: Vec<f64> = (0..order)
                    .filter(|&j| j != i)
                    .map(|j| (c.point(i) - c.point(j)).norm())
                    .collect();
                dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
                assert!((dists[0] - d_nn).abs() < 1e-12);
                let next = dists.iter().find(|&&d| d > dists[0] + 1e-9).unwrap();
                assert!((next - d_nnn).abs() < 1e-12);
                // Interior flag agrees with the number of d_min neighbours.
                let nn_count =
                    dists.iter().filter(|&&d| (d - d_nn).abs() < 1e-9).count();
                assert_eq!(c.is_interior(i), nn_count == 4, "order {order} point {i}");
            }
        }
    }

    #[test]
    fn interior_region_corner_distance() {
        // The farthest in-region point from an interior point is the region
        // corner at d_min/√2.
        let c = QamConstellation::new(16).unwrap();
        let corner = c.d_min() / std::f64::consts::SQRT_2;
        let interior = (0..16).find(|&i| c.is_interior(i)).unwrap();
        let p = c.point(interior);
        let offset = Complex64::from_polar(corner - 1e-9, std::f64::consts::FRAC_PI_4);
        let (idx, _) = c.hard_decision(p + offset);
        assert_eq!(idx, interior);
    }
}
