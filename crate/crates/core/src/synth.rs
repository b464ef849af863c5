//! Synthetic ground-truth scenes and reference oracles.
//!
//! Half-plane scenes are defined by an exact rational slope and intercept,
//! so rasterization, supersampled references and true step endpoints can
//! all be computed in integer arithmetic with no floating-point ambiguity.
//! Slopes are restricted to `(0, 1)` where a generator needs steps; other
//! octants are covered by mirroring or transposing the generated images.

use num_rational::Ratio;

use crate::edge::EdgeMask;
use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, Rgba};
use crate::runs::{CrossingPattern, Dir, Orientation};
use crate::predict::RunEndRef;
use crate::util::dispatch_map;

/// Exact rational used for slopes and intercepts.
pub type Frac = Ratio<i64>;

pub const BLACK: Rgba = [0, 0, 0, 255];
pub const WHITE: Rgba = [255, 255, 255, 255];

/// A half plane `y <= k*x + b` rasterized over a bi-level image. The inside
/// color fills pixels whose center satisfies the inequality; centers exactly
/// on the line count as inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlaneScene {
    pub slope: Frac,
    pub intercept: Frac,
    pub width: u32,
    pub height: u32,
    pub inside: Rgba,
    pub outside: Rgba,
}

impl HalfPlaneScene {
    pub fn new(slope: Frac, intercept: Frac, width: u32, height: u32) -> Result<Self> {
        let scene = HalfPlaneScene {
            slope,
            intercept,
            width,
            height,
            inside: BLACK,
            outside: WHITE,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn with_colors(mut self, inside: Rgba, outside: Rgba) -> Result<Self> {
        self.inside = inside;
        self.outside = outside;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::contract("scene dimensions must be at least 1x1"));
        }
        if self.inside == self.outside {
            return Err(Error::contract("scene colors must be distinct"));
        }
        Ok(())
    }

    /// Membership test for the point `(x_num/scale, y_num/scale)`, exact.
    /// Centers on the line are inside.
    #[inline]
    fn inside_scaled(&self, x_num: i128, y_num: i128, scale: i128) -> bool {
        let p = *self.slope.numer() as i128;
        let q = *self.slope.denom() as i128;
        let bn = *self.intercept.numer() as i128;
        let bd = *self.intercept.denom() as i128;
        // y <= (p/q) x + bn/bd, multiplied through by q*bd > 0.
        y_num * q * bd <= p * bd * x_num + scale * q * bn
    }

    /// Count of inside pixels in column `x` before vertical clamping.
    fn inside_rows(&self, x: i64) -> i64 {
        let p = *self.slope.numer() as i128;
        let q = *self.slope.denom() as i128;
        let bn = *self.intercept.numer() as i128;
        let bd = *self.intercept.denom() as i128;
        // Pixel (x, y) is inside iff (2y+1) q bd <= p bd (2x+1) + 2 q bn.
        let num = p * bd * (2 * x as i128 + 1) + 2 * q * bn;
        let den = q * bd;
        let t = num.div_euclid(den);
        if t < 1 {
            0
        } else {
            (((t + 1) / 2) as i64).min(i64::from(u32::MAX))
        }
    }
}

/// Rasterizes the scene by its pixel-center rule.
pub fn rasterize_halfplane(scene: &HalfPlaneScene) -> ImageBuffer {
    ImageBuffer::from_fn(scene.width, scene.height, |x, y| {
        if scene.inside_scaled(2 * x as i128 + 1, 2 * y as i128 + 1, 2) {
            scene.inside
        } else {
            scene.outside
        }
    })
}

/// Supersampled ground truth: `samples x samples` coverage per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceImage {
    pub image: ImageBuffer,
    pub samples: u32,
}

fn reference_row(scene: &HalfPlaneScene, s: u32, y: usize) -> Vec<Rgba> {
    let s = s as i128;
    let total = (s * s) as u64;
    (0..scene.width)
        .map(|x| {
            let mut count = 0u64;
            for j in 0..s {
                let y_num = 2 * s * y as i128 + 2 * j + 1;
                for i in 0..s {
                    let x_num = 2 * s * x as i128 + 2 * i + 1;
                    if scene.inside_scaled(x_num, y_num, 2 * s) {
                        count += 1;
                    }
                }
            }
            mix_colors(scene.inside, scene.outside, count, total)
        })
        .collect()
}

/// Per-channel mix `round((count*a + (total-count)*b) / total)`, rounding
/// half away from zero in exact integer arithmetic.
fn mix_colors(a: Rgba, b: Rgba, count: u64, total: u64) -> Rgba {
    let mut out = [0u8; 4];
    for c in 0..4 {
        let num = count * a[c] as u64 + (total - count) * b[c] as u64;
        out[c] = ((2 * num + total) / (2 * total)) as u8;
    }
    out
}

/// Computes the supersampled reference; `samples` must be at least 4.
pub fn supersample_reference(scene: &HalfPlaneScene, samples: u32) -> Result<ReferenceImage> {
    check_samples(samples)?;
    let rows = dispatch_map(scene.height as usize, true, |y| reference_row(scene, samples, y));
    Ok(ReferenceImage {
        image: ImageBuffer::new(scene.width, scene.height, rows.concat())?,
        samples,
    })
}

/// Sequential twin of [`supersample_reference`], kept for the benchmark
/// suite regardless of the `parallel` feature.
pub fn supersample_reference_seq(scene: &HalfPlaneScene, samples: u32) -> Result<ReferenceImage> {
    check_samples(samples)?;
    let rows = dispatch_map(scene.height as usize, false, |y| reference_row(scene, samples, y));
    Ok(ReferenceImage {
        image: ImageBuffer::new(scene.width, scene.height, rows.concat())?,
        samples,
    })
}

fn check_samples(samples: u32) -> Result<()> {
    if samples < 4 {
        return Err(Error::contract(format!(
            "supersampling needs at least 4 samples per axis, got {samples}"
        )));
    }
    Ok(())
}

/// Columns where the rasterized boundary drops one row: the ground-truth
/// endpoint positions. Requires a slope strictly inside `(0, 1)`; steeper
/// or negative boundaries are handled by mirroring/transposing the scene.
pub fn true_step_endpoints(scene: &HalfPlaneScene) -> Result<Vec<u32>> {
    let k = scene.slope;
    if k <= Frac::new(0, 1) || k >= Frac::new(1, 1) {
        return Err(Error::contract(format!(
            "true_step_endpoints requires slope in (0, 1), got {k}"
        )));
    }
    let h = scene.height as i64;
    let mut drops = Vec::new();
    let mut prev = scene.inside_rows(0);
    for x in 1..scene.width as i64 {
        let m = scene.inside_rows(x);
        debug_assert!(m == prev || m == prev + 1, "slope below 1 drops at most one row");
        // A drop is visible when its crossing edge lies inside the image.
        if m == prev + 1 && m >= 1 && m <= h {
            drops.push(x as u32);
        }
        prev = m;
    }
    Ok(drops)
}

/// Result of the pixel-walk baseline search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceResult {
    pub position: i64,
    pub steps: u32,
    /// Pattern lookups spent walking, one per two boundary pixels.
    pub probes: u64,
}

/// The expensive baseline the predictor replaces: follow the boundary one
/// pixel at a time, absorbing steps of any width whose far end repeats the
/// starting crossing pattern, for up to `budget` steps. Works directly on
/// the edge mask so it stays independent of the run cache and the
/// prediction path; serves as the correctness oracle for both.
pub fn brute_force_extend(
    mask: &EdgeMask,
    start: &RunEndRef,
    dir: Dir,
    budget: u32,
) -> BruteForceResult {
    let flag = |line: i64, axis: i64| -> bool {
        match start.orientation {
            Orientation::Horizontal => mask.top_edge_at(axis, line),
            Orientation::Vertical => mask.left_edge_at(line, axis),
        }
    };
    let pattern_at = |line: i64, stop: i64| -> CrossingPattern {
        let (lower, upper) = match start.orientation {
            Orientation::Horizontal => (
                mask.left_edge_at(stop, line),
                mask.left_edge_at(stop, line - 1),
            ),
            Orientation::Vertical => (
                mask.top_edge_at(line, stop),
                mask.top_edge_at(line - 1, stop),
            ),
        };
        match (lower, upper) {
            (true, true) => CrossingPattern::Both,
            (true, false) => CrossingPattern::TowardLower,
            (false, true) => CrossingPattern::TowardUpper,
            (false, false) => CrossingPattern::None,
        }
    };

    let mut result = BruteForceResult {
        position: start.pos,
        steps: 0,
        probes: 0,
    };
    let Some(shift) = start.pattern.line_shift() else {
        return result;
    };

    let mut line = start.line;
    let mut pos = start.pos;
    while result.steps < budget {
        let next_line = line + shift;
        // The continuation run's first pixel cell sits directly at the
        // current endpoint (cell `pos` going right, `pos - 1` going left).
        let first_cell = match dir {
            Dir::Pos => pos,
            Dir::Neg => pos - 1,
        };
        if !flag(next_line, first_cell) {
            break;
        }
        let mut width = 1i64;
        while flag(next_line, first_cell + dir.step() * width) {
            width += 1;
        }
        result.probes += (width as u64).div_ceil(2);
        let end_pos = pos + dir.step() * width;
        if pattern_at(next_line, end_pos) != start.pattern {
            break;
        }
        pos = end_pos;
        line = next_line;
        result.steps += 1;
        result.position = pos;
    }
    result
}

/// Builds a bi-level image from ASCII art: `#` maps to `on`, anything else
/// to `off`. Test and debug helper.
pub fn bilevel_from_ascii(art: &[&str], on: Rgba, off: Rgba) -> ImageBuffer {
    let height = art.len() as u32;
    let width = art[0].len() as u32;
    let rows: Vec<Vec<u8>> = art
        .iter()
        .map(|row| row.bytes().collect())
        .collect();
    ImageBuffer::from_fn(width, height, |x, y| {
        if rows[y as usize][x as usize] == b'#' {
            on
        } else {
            off
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{detect_edges, EdgeThreshold};
    use crate::raster::compute_luma;
    use crate::runs::RunCache;

    fn interior_widths(scene: &HalfPlaneScene) -> Vec<u32> {
        let img = rasterize_halfplane(scene);
        let mask = detect_edges(&compute_luma(&img), EdgeThreshold::default());
        let cache = RunCache::build(&mask);
        cache
            .horizontal()
            .iter()
            .filter(|r| r.is_interior())
            .map(|r| r.len())
            .collect()
    }

    #[test]
    fn zero_slope_splits_rows_uniformly() {
        let scene = HalfPlaneScene::new(Frac::new(0, 1), Frac::new(5, 2), 8, 6).unwrap();
        let img = rasterize_halfplane(&scene);
        for y in 0..6 {
            let row_color = img.get(0, y);
            for x in 1..8 {
                assert_eq!(img.get(x, y), row_color, "row {y} must be uniform");
            }
        }
        // y + 0.5 <= 2.5 holds through row 2; the tie row counts as inside.
        assert_eq!(img.get(0, 1), BLACK);
        assert_eq!(img.get(0, 2), BLACK);
        assert_eq!(img.get(0, 3), WHITE);
    }

    #[test]
    fn slope_third_steps_are_three_wide() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(0, 1), 30, 12).unwrap();
        let widths = interior_widths(&scene);
        assert!(!widths.is_empty());
        assert!(widths.iter().all(|&w| w == 3), "widths {widths:?}");
    }

    #[test]
    fn slope_two_sevenths_alternates_three_and_four() {
        let scene = HalfPlaneScene::new(Frac::new(2, 7), Frac::new(1, 2), 70, 25).unwrap();
        let widths = interior_widths(&scene);
        assert!(widths.contains(&3) && widths.contains(&4), "widths {widths:?}");
        assert!(widths.iter().all(|&w| w == 3 || w == 4));
    }

    #[test]
    fn fully_inside_pixel_takes_inside_color() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(20, 1), 8, 8).unwrap();
        let r = supersample_reference(&scene, 8).unwrap();
        assert_eq!(r.image.get(0, 0), BLACK);
    }

    #[test]
    fn center_on_horizontal_line_mixes_half() {
        // k = 0 and the line passes exactly through row 2's pixel centers.
        let scene = HalfPlaneScene::new(Frac::new(0, 1), Frac::new(5, 2), 4, 5).unwrap();
        let r = supersample_reference(&scene, 8).unwrap();
        // Half the subsamples in row 2 are inside (ties included).
        assert_eq!(r.image.get(1, 2), [128, 128, 128, 255]);
        assert_eq!(r.image.get(1, 1), BLACK);
        assert_eq!(r.image.get(1, 3), WHITE);
    }

    #[test]
    fn supersample_rejects_tiny_sample_counts() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(0, 1), 4, 4).unwrap();
        assert!(supersample_reference(&scene, 3).is_err());
        assert!(supersample_reference(&scene, 4).is_ok());
    }

    #[test]
    fn coverage_tracks_the_closed_form_area() {
        // Exact per-pixel coverage of the half plane, clipped to the pixel
        // square, integrated in closed form.
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(0, 1), 24, 10).unwrap();
        let s = 16u32;
        let r = supersample_reference(&scene, s).unwrap();
        let k = 1.0 / 3.0;
        let b = 0.0;
        let mut max_err: f64 = 0.0;
        for y in 0..scene.height {
            for x in 0..scene.width {
                let area = clipped_halfplane_area(k, b, x as f64, y as f64);
                let got = (255.0 - r.image.get(x, y)[0] as f64) / 255.0;
                max_err = max_err.max((got - area).abs());
            }
        }
        // Midpoint subsampling of a linear boundary at S=16 lands within
        // three quantization steps of the analytic area (computed bound for
        // this scene; dominated by the shared rounding phase of the rows).
        assert!(
            max_err <= 3.0 / 256.0 + 1.0 / 510.0 + 1e-12,
            "max coverage error {max_err}"
        );
        assert!(max_err > 1.0 / 256.0, "bound should be tight-ish: {max_err}");
    }

    /// Area of `{y' <= k x' + b}` inside the unit pixel at (x, y), by
    /// integrating the clamped boundary height across the column.
    fn clipped_halfplane_area(k: f64, b: f64, x: f64, y: f64) -> f64 {
        // Integrate via fine trapezoid on the clamped height; the boundary
        // is linear so this converges immediately except at clamp kinks.
        let n = 4096;
        let mut acc = 0.0;
        for i in 0..n {
            let t0 = x + i as f64 / n as f64;
            let t1 = x + (i + 1) as f64 / n as f64;
            let h0 = ((k * t0 + b) - y).clamp(0.0, 1.0);
            let h1 = ((k * t1 + b) - y).clamp(0.0, 1.0);
            acc += (h0 + h1) / 2.0 / n as f64;
        }
        acc
    }

    #[test]
    fn doubling_samples_moves_pixels_by_less_than_one_part_in_s() {
        let scene = HalfPlaneScene::new(Frac::new(2, 7), Frac::new(1, 3), 21, 9).unwrap();
        for s in [4u32, 8, 16] {
            let a = supersample_reference(&scene, s).unwrap().image;
            let b = supersample_reference(&scene, 2 * s).unwrap().image;
            let budget = (255.0 / s as f64).ceil() as i32;
            for (pa, pb) in a.pixels().iter().zip(b.pixels()) {
                for c in 0..3 {
                    let d = (pa[c] as i32 - pb[c] as i32).abs();
                    assert!(d <= budget, "s={s} delta {d}");
                }
            }
        }
    }

    #[test]
    fn drops_for_slope_third_land_every_three_columns() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(0, 1), 30, 12).unwrap();
        let drops = true_step_endpoints(&scene).unwrap();
        // Ties on the line count as inside, which puts the first drop at
        // column 1 and the rest three columns apart.
        assert_eq!(drops, vec![1, 4, 7, 10, 13, 16, 19, 22, 25, 28]);
    }

    #[test]
    fn drops_for_slope_half_step_two_wide() {
        let scene = HalfPlaneScene::new(Frac::new(1, 2), Frac::new(0, 1), 16, 10).unwrap();
        let drops = true_step_endpoints(&scene).unwrap();
        for pair in drops.windows(2) {
            assert_eq!(pair[1] - pair[0], 2);
        }
    }

    #[test]
    fn shallow_slope_drops_once_in_frame() {
        let scene = HalfPlaneScene::new(Frac::new(1, 64), Frac::new(0, 1), 64, 6).unwrap();
        let drops = true_step_endpoints(&scene).unwrap();
        assert_eq!(drops.len(), 1);
        assert_eq!(drops[0], 32);
    }

    #[test]
    fn endpoints_reject_out_of_range_slopes() {
        assert!(HalfPlaneScene::new(Frac::new(3, 2), Frac::new(0, 1), 8, 8)
            .and_then(|s| true_step_endpoints(&s))
            .is_err());
        assert!(HalfPlaneScene::new(Frac::new(0, 1), Frac::new(0, 1), 8, 8)
            .and_then(|s| true_step_endpoints(&s))
            .is_err());
    }

    #[test]
    fn drops_match_a_scan_of_the_rasterized_mask() {
        for (p, q, bn, bd) in [(1i64, 3i64, 0i64, 1i64), (2, 7, 5, 3), (3, 8, -1, 2), (1, 2, 7, 5)] {
            let scene =
                HalfPlaneScene::new(Frac::new(p, q), Frac::new(bn, bd), 64, 40).unwrap();
            let drops = true_step_endpoints(&scene).unwrap();
            let img = rasterize_halfplane(&scene);
            let mask = detect_edges(&compute_luma(&img), EdgeThreshold::default());
            // Scan: a drop at column x shows up as a vertical stub edge.
            let mut scanned = Vec::new();
            for x in 1..scene.width {
                for y in 0..scene.height {
                    if mask.left_edge(x, y) {
                        scanned.push(x);
                        break;
                    }
                }
            }
            assert_eq!(drops, scanned, "k={p}/{q} b={bn}/{bd}");
        }
    }

    #[test]
    fn zero_budget_walk_stays_put() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(1, 2), 30, 12).unwrap();
        let img = rasterize_halfplane(&scene);
        let mask = detect_edges(&compute_luma(&img), EdgeThreshold::default());
        let cache = RunCache::build(&mask);
        let run = cache
            .horizontal()
            .iter()
            .find(|r| r.is_z_shaped() && r.is_interior())
            .unwrap();
        let start = RunEndRef::of(run, Dir::Pos);
        let out = brute_force_extend(&mask, &start, Dir::Pos, 0);
        assert_eq!(out.position, start.pos);
        assert_eq!((out.steps, out.probes), (0, 0));
    }
}
