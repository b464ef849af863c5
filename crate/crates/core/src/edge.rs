//! Boundary detection: thresholded luma differences between adjacent pixels.
//!
//! Only the top and left borders of each pixel are stored; a pixel's bottom
//! and right borders are the top/left borders of its neighbors.

use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, LumaBuffer};

/// Luma-difference threshold, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeThreshold(f32);

impl EdgeThreshold {
    pub fn new(value: f32) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(EdgeThreshold(value))
        } else {
            Err(Error::contract(format!(
                "edge threshold must be in (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f32 {
        self.0
    }
}

impl Default for EdgeThreshold {
    fn default() -> Self {
        EdgeThreshold(0.1)
    }
}

/// Per-pixel edge flags.
///
/// `top_edge(x, y)` marks a discontinuity between `(x, y)` and `(x, y-1)`;
/// geometrically it lies on the horizontal line `Y = y` spanning
/// `X in [x, x+1]`. `left_edge(x, y)` marks `(x, y)` vs `(x-1, y)` and lies
/// on `X = x` spanning `Y in [y, y+1]`. Row 0 carries no top edges and
/// column 0 no left edges: out-of-image is "no neighbor", not contrast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    width: u32,
    height: u32,
    top: Vec<bool>,
    left: Vec<bool>,
}

impl EdgeMask {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize) * (self.width as usize) + (x as usize)
    }

    #[inline]
    pub fn top_edge(&self, x: u32, y: u32) -> bool {
        self.top[self.idx(x, y)]
    }

    #[inline]
    pub fn left_edge(&self, x: u32, y: u32) -> bool {
        self.left[self.idx(x, y)]
    }

    /// Bounds-tolerant lookups: out-of-image positions carry no edges.
    #[inline]
    pub fn top_edge_at(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
            && self.top_edge(x as u32, y as u32)
    }

    #[inline]
    pub fn left_edge_at(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
            && self.left_edge(x as u32, y as u32)
    }

    pub fn any_edge(&self, x: u32, y: u32) -> bool {
        self.top_edge(x, y) || self.left_edge(x, y)
    }

    /// Swaps axes: the transposed mask's top edges are this mask's left
    /// edges and vice versa. Lets one scanline algorithm serve both
    /// orientations.
    pub fn transposed(&self) -> EdgeMask {
        let (w, h) = (self.width, self.height);
        let mut top = vec![false; (w as usize) * (h as usize)];
        let mut left = vec![false; (w as usize) * (h as usize)];
        for y in 0..h {
            for x in 0..w {
                let src = self.idx(x, y);
                let dst = (x as usize) * (h as usize) + (y as usize);
                top[dst] = self.left[src];
                left[dst] = self.top[src];
            }
        }
        EdgeMask {
            width: h,
            height: w,
            top,
            left,
        }
    }

    /// Horizontal mirror. Top edges flip in place; the left edge between
    /// columns `x-1, x` maps to the one between the mirrored pair.
    pub fn mirrored_x(&self) -> EdgeMask {
        let (w, h) = (self.width, self.height);
        let mut top = vec![false; (w as usize) * (h as usize)];
        let mut left = vec![false; (w as usize) * (h as usize)];
        for y in 0..h {
            for x in 0..w {
                let dst = (y as usize) * (w as usize) + (x as usize);
                top[dst] = self.top_edge(w - 1 - x, y);
                if x > 0 {
                    left[dst] = self.left_edge(w - x, y);
                }
            }
        }
        EdgeMask {
            width: w,
            height: h,
            top,
            left,
        }
    }
}

/// Flags every adjacent-pixel luma difference strictly greater than the
/// threshold. A difference exactly equal to the threshold is not an edge.
pub fn detect_edges(luma: &LumaBuffer, threshold: EdgeThreshold) -> EdgeMask {
    detect_edges_with(luma, threshold, true)
}

pub(crate) fn detect_edges_with(luma: &LumaBuffer, threshold: EdgeThreshold, par: bool) -> EdgeMask {
    let (w, h) = (luma.width(), luma.height());
    let t = threshold.value();
    let rows = crate::util::dispatch_map(h as usize, par, |y| {
        let y = y as u32;
        let mut top = vec![false; w as usize];
        let mut left = vec![false; w as usize];
        for x in 0..w {
            let here = luma.get(x, y);
            if y > 0 {
                top[x as usize] = (here - luma.get(x, y - 1)).abs() > t;
            }
            if x > 0 {
                left[x as usize] = (here - luma.get(x - 1, y)).abs() > t;
            }
        }
        (top, left)
    });
    let mut top = Vec::with_capacity((w as usize) * (h as usize));
    let mut left = Vec::with_capacity((w as usize) * (h as usize));
    for (t_row, l_row) in rows {
        top.extend_from_slice(&t_row);
        left.extend_from_slice(&l_row);
    }
    EdgeMask {
        width: w,
        height: h,
        top,
        left,
    }
}

/// Debug visualization: red = top edge, green = left edge, yellow = both.
pub fn render_mask(mask: &EdgeMask) -> ImageBuffer {
    ImageBuffer::from_fn(mask.width(), mask.height(), |x, y| {
        match (mask.top_edge(x, y), mask.left_edge(x, y)) {
            (true, true) => [255, 255, 0, 255],
            (true, false) => [255, 0, 0, 255],
            (false, true) => [0, 255, 0, 255],
            (false, false) => [0, 0, 0, 255],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::compute_luma;

    fn luma_rows(rows: &[&[f32]]) -> LumaBuffer {
        let img = ImageBuffer::from_fn(rows[0].len() as u32, rows.len() as u32, |x, y| {
            let v = (rows[y as usize][x as usize] * 255.0).round() as u8;
            [v, v, v, 255]
        });
        compute_luma(&img)
    }

    #[test]
    fn maximal_contrast_marks_second_row() {
        let luma = luma_rows(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let mask = detect_edges(&luma, EdgeThreshold::new(0.1).unwrap());
        assert!(mask.top_edge(0, 1) && mask.top_edge(1, 1));
        assert!(!mask.top_edge(0, 0) && !mask.top_edge(1, 0));
        assert!(!mask.left_edge(1, 0) && !mask.left_edge(1, 1));
    }

    #[test]
    fn uniform_image_has_no_edges() {
        let luma = luma_rows(&[&[0.4, 0.4, 0.4], &[0.4, 0.4, 0.4]]);
        let mask = detect_edges(&luma, EdgeThreshold::default());
        for y in 0..2 {
            for x in 0..3 {
                assert!(!mask.any_edge(x, y));
            }
        }
    }

    #[test]
    fn difference_equal_to_threshold_is_not_an_edge() {
        // Build the threshold from the measured difference so the compare
        // is exact, then nudge it below to see the edge appear.
        let img = ImageBuffer::new(1, 2, vec![[0, 0, 0, 255], [130, 130, 130, 255]]).unwrap();
        let luma = compute_luma(&img);
        let diff = (luma.get(0, 1) - luma.get(0, 0)).abs();
        let at = detect_edges(&luma, EdgeThreshold::new(diff).unwrap());
        assert!(!at.top_edge(0, 1), "equality must not trigger");
        let below = detect_edges(&luma, EdgeThreshold::new(diff * 0.999).unwrap());
        assert!(below.top_edge(0, 1));
    }

    #[test]
    fn threshold_bounds_are_enforced() {
        assert!(EdgeThreshold::new(0.0).is_err());
        assert!(EdgeThreshold::new(1.0).is_err());
        assert!(EdgeThreshold::new(0.5).is_ok());
    }

    #[test]
    fn borders_carry_no_edges() {
        let luma = luma_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let mask = detect_edges(&luma, EdgeThreshold::default());
        for x in 0..2 {
            assert!(!mask.top_edge(x, 0));
        }
        for y in 0..2 {
            assert!(!mask.left_edge(0, y));
        }
    }

    #[test]
    fn transpose_round_trips() {
        let luma = luma_rows(&[&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0]]);
        let mask = detect_edges(&luma, EdgeThreshold::default());
        assert_eq!(mask.transposed().transposed(), mask);
        assert!(mask.transposed().top_edge(1, 1) == mask.left_edge(1, 1));
    }
}
