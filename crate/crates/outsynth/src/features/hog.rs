//! Histogram of oriented gradients.
//!
//! Pinned algorithm (all choices are part of the descriptor contract and are
//! exercised bit-for-bit by the frozen-value tests):
//!
//! 1. Centered differences `[-1, 0, 1]` in x and y with edge replication.
//! 2. Unsigned orientation in `[0, 180)` degrees; magnitude `sqrt(gx^2+gy^2)`.
//! 3. Hard assignment of each pixel's magnitude to `floor(theta / bin_width)`
//!    (no interpolation between neighboring bins).
//! 4. Non-overlapping cells of `cell = (ch, cw)` pixels; `floor(h/ch)` by
//!    `floor(w/cw)` cells, trailing pixels ignored.
//! 5. Blocks of `block = (bh, bw)` cells sliding with stride one cell; each
//!    block's concatenated cell histograms are L2-normalized as
//!    `v / sqrt(||v||^2 + eps^2)` with `eps = 1e-6`.
//! 6. Output: blocks row-major, within a block cells row-major, innermost the
//!    orientation bins.

use super::GrayImage;
use crate::error::{Error, Result};

pub const HOG_NORM_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HogParams {
    pub orientations: usize,
    /// Cell size in pixels `(height, width)`.
    pub cell: (usize, usize),
    /// Block size in cells `(height, width)`.
    pub block: (usize, usize),
}

impl Default for HogParams {
    fn default() -> Self {
        HogParams {
            orientations: 9,
            cell: (14, 14),
            block: (1, 1),
        }
    }
}

impl HogParams {
    fn validate(&self) -> Result<()> {
        if self.orientations == 0 {
            return Err(Error::config("hog: orientations must be >= 1"));
        }
        if self.cell.0 == 0 || self.cell.1 == 0 {
            return Err(Error::config("hog: cell dimensions must be >= 1"));
        }
        if self.block.0 == 0 || self.block.1 == 0 {
            return Err(Error::config("hog: block dimensions must be >= 1"));
        }
        Ok(())
    }

    fn grid(&self, height: usize, width: usize) -> Result<(usize, usize, usize, usize)> {
        self.validate()?;
        let n_cells_y = height / self.cell.0;
        let n_cells_x = width / self.cell.1;
        if n_cells_y == 0 || n_cells_x == 0 {
            return Err(Error::config(format!(
                "hog: image {height}x{width} smaller than one {}x{} cell",
                self.cell.0, self.cell.1
            )));
        }
        if self.block.0 > n_cells_y || self.block.1 > n_cells_x {
            return Err(Error::config(format!(
                "hog: block {}x{} cells exceeds the {}x{} cell grid",
                self.block.0, self.block.1, n_cells_y, n_cells_x
            )));
        }
        let n_blocks_y = n_cells_y - self.block.0 + 1;
        let n_blocks_x = n_cells_x - self.block.1 + 1;
        Ok((n_cells_y, n_cells_x, n_blocks_y, n_blocks_x))
    }

    pub fn output_len(&self, height: usize, width: usize) -> Result<usize> {
        let (_, _, n_blocks_y, n_blocks_x) = self.grid(height, width)?;
        Ok(n_blocks_y * n_blocks_x * self.block.0 * self.block.1 * self.orientations)
    }
}

pub fn hog(image: &GrayImage, params: &HogParams) -> Result<Vec<f64>> {
    let (h, w) = (image.height(), image.width());
    let (n_cells_y, n_cells_x, n_blocks_y, n_blocks_x) = params.grid(h, w)?;
    let n_or = params.orientations;
    let bin_width = 180.0 / n_or as f64;

    // Per-cell orientation histograms, magnitude-weighted.
    let mut cells = vec![0.0f64; n_cells_y * n_cells_x * n_or];
    for y in 0..n_cells_y * params.cell.0 {
        let cy = y / params.cell.0;
        for x in 0..n_cells_x * params.cell.1 {
            let cx = x / params.cell.1;
            let gx = image.get_replicated(y as isize, x as isize + 1)
                - image.get_replicated(y as isize, x as isize - 1);
            let gy = image.get_replicated(y as isize + 1, x as isize)
                - image.get_replicated(y as isize - 1, x as isize);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            // Unsigned orientation in [0, 180).
            let mut theta = gy.atan2(gx).to_degrees();
            if theta < 0.0 {
                theta += 180.0;
            }
            if theta >= 180.0 {
                theta -= 180.0;
            }
            let bin = ((theta / bin_width) as usize).min(n_or - 1);
            cells[(cy * n_cells_x + cx) * n_or + bin] += mag;
        }
    }

    // Sliding blocks, each L2-normalized with the epsilon in the norm.
    let block_len = params.block.0 * params.block.1 * n_or;
    let mut out = Vec::with_capacity(n_blocks_y * n_blocks_x * block_len);
    for by in 0..n_blocks_y {
        for bx in 0..n_blocks_x {
            let start = out.len();
            for dy in 0..params.block.0 {
                for dx in 0..params.block.1 {
                    let cell = ((by + dy) * n_cells_x + (bx + dx)) * n_or;
                    out.extend_from_slice(&cells[cell..cell + n_or]);
                }
            }
            let norm_sq: f64 = out[start..].iter().map(|v| v * v).sum();
            let norm = (norm_sq + HOG_NORM_EPS * HOG_NORM_EPS).sqrt();
            for v in &mut out[start..] {
                *v /= norm;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_len_matches_grid_formula() {
        // 28x28, cell 14x14, block 1x1, 9 orientations: 2x2 blocks of 9.
        let p = HogParams::default();
        assert_eq!(p.output_len(28, 28).unwrap(), 36);
        // 28x28, cell 7x7 -> 4x4 cells; block 2x2 -> 3x3 blocks of 2*2*9.
        let p = HogParams {
            orientations: 9,
            cell: (7, 7),
            block: (2, 2),
        };
        assert_eq!(p.output_len(28, 28).unwrap(), 3 * 3 * 4 * 9);
    }

    #[test]
    fn constant_image_gives_zero_histograms() {
        let im = GrayImage::new(4, 4, vec![0.7; 16]).unwrap();
        let p = HogParams {
            orientations: 4,
            cell: (2, 2),
            block: (1, 1),
        };
        let v = hog(&im, &p).unwrap();
        assert_eq!(v.len(), 4 * 4);
        // No gradient anywhere; normalization keeps zeros finite.
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn vertical_edge_lands_in_horizontal_gradient_bin() {
        // Left half black, right half white: gradient points along +x,
        // angle 0 degrees -> bin 0 everywhere.
        let mut data = vec![0.0; 36];
        for y in 0..6 {
            for x in 3..6 {
                data[y * 6 + x] = 1.0;
            }
        }
        let im = GrayImage::new(6, 6, data).unwrap();
        let p = HogParams {
            orientations: 9,
            cell: (3, 3),
            block: (1, 1),
        };
        let v = hog(&im, &p).unwrap();
        for cell in v.chunks(9) {
            let total: f64 = cell.iter().sum();
            // All mass in bin 0 (possibly zero mass in flat cells).
            assert!((cell[0] - total).abs() < 1e-12, "cell {cell:?}");
        }
    }

    #[test]
    fn rejects_undersized_images_and_bad_params() {
        let im = GrayImage::new(4, 4, vec![0.0; 16]).unwrap();
        let too_big_cell = HogParams {
            orientations: 9,
            cell: (5, 5),
            block: (1, 1),
        };
        assert!(hog(&im, &too_big_cell).is_err());
        let too_big_block = HogParams {
            orientations: 9,
            cell: (2, 2),
            block: (3, 3),
        };
        assert!(hog(&im, &too_big_block).is_err());
        let zero_or = HogParams {
            orientations: 0,
            cell: (2, 2),
            block: (1, 1),
        };
        assert!(hog(&im, &zero_or).is_err());
    }

    #[test]
    fn block_normalization_bounds_values() {
        let data: Vec<f64> = (0..144).map(|i| (i % 7) as f64 / 7.0).collect();
        let im = GrayImage::new(12, 12, data).unwrap();
        let p = HogParams {
            orientations: 9,
            cell: (4, 4),
            block: (2, 2),
        };
        let v = hog(&im, &p).unwrap();
        assert_eq!(v.len(), p.output_len(12, 12).unwrap());
        for block in v.chunks(2 * 2 * 9) {
            let norm: f64 = block.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= 1.0 + 1e-12, "block norm {norm}");
        }
        assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
