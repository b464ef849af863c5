//! Boundary revectorization and color mixing.
//!
//! Runs become sub-pixel segments (one per Z or L shape, two for a U), the
//! segments integrate to per-column coverage areas, and the areas drive the
//! final blend. Offsets use the convention that `+0.5` points toward the
//! upper side of the run line (negative perpendicular axis) and `-0.5`
//! toward the lower side, so an endpoint at a toward-lower crossing sits at
//! offset `-0.5`.
//!
//! Corrected segments carry how many rows each endpoint dropped while being
//! extended; their coverage is the long chord through the corrected
//! endpoints, evaluated over the source run's own span and clamped to half
//! a pixel. For uncorrected segments that reduces exactly to linear
//! interpolation between the end offsets.

use num_rational::Ratio;

use crate::predict::CorrectedEndpoint;
use crate::raster::{ImageBuffer, Rgba};
use crate::runs::{CrossingPattern, Orientation, Run};

type Q = Ratio<i64>;

fn half() -> Q {
    Q::new(1, 2)
}

fn zero() -> Q {
    Q::new(0, 1)
}

/// Which neighbor a blended pixel mixes with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Above,
    Below,
    Left,
    Right,
}

/// One pixel's mixing coefficient toward one neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendWeight {
    pub pixel: (u32, u32),
    /// Coverage fraction in `[0, 0.5]`.
    pub area: f64,
    pub neighbor: Neighbor,
}

/// A revectorized boundary segment in run-axis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedSegment {
    pub orientation: Orientation,
    /// Boundary line of the source run.
    pub line: u32,
    /// Axis coordinates of the (possibly corrected) endpoints; `end > start`.
    pub start: f64,
    pub end: f64,
    /// Crossing offsets at the endpoints, in `{-0.5, 0.0, +0.5}`.
    pub offset_start: f64,
    pub offset_end: f64,
    /// Rows each endpoint moved away from the run line during extension
    /// (zero for local reconstruction).
    pub absorbed_start: u32,
    pub absorbed_end: u32,
    /// Axis span the segment blends over: the source run's extent (for a U
    /// shape, that half of it).
    pub window: (f64, f64),
}

impl CorrectedSegment {
    /// A purely local segment whose blending window is its own span.
    pub fn local(
        orientation: Orientation,
        line: u32,
        start: f64,
        end: f64,
        offset_start: f64,
        offset_end: f64,
    ) -> CorrectedSegment {
        CorrectedSegment {
            orientation,
            line,
            start,
            end,
            offset_start,
            offset_end,
            absorbed_start: 0,
            absorbed_end: 0,
            window: (start, end),
        }
    }

    /// Endpoint heights in offset units, including rows absorbed by
    /// extension.
    fn end_heights(&self) -> (Q, Q) {
        let lift = |offset: f64, rows: u32| -> Q {
            let base = frac_from_half(offset);
            match offset.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => base + Q::from_integer(rows as i64),
                Some(std::cmp::Ordering::Less) => base - Q::from_integer(rows as i64),
                _ => base,
            }
        };
        (
            lift(self.offset_start, self.absorbed_start),
            lift(self.offset_end, self.absorbed_end),
        )
    }
}

fn frac_from_half(v: f64) -> Q {
    let doubled = v * 2.0;
    debug_assert!(doubled.fract() == 0.0, "coordinate {v} is not a half-integer");
    Q::new(doubled as i64, 2)
}

fn pattern_offset(p: CrossingPattern) -> f64 {
    // A doubled crossing behaves like its lower one.
    match p {
        CrossingPattern::TowardLower | CrossingPattern::Both => -0.5,
        CrossingPattern::TowardUpper => 0.5,
        CrossingPattern::None => 0.0,
    }
}

/// Builds the revectorized segment(s) for a run.
///
/// Opposite crossings give one Z segment between the corrected endpoints;
/// one crossing plus an open end gives an L segment falling to offset zero
/// at the open end; same-side crossings give the two halves of a U meeting
/// at the run midpoint. Runs with no crossings produce nothing to blend.
/// Corrections only apply to Z shapes; pass unmoved endpoints for the rest.
pub fn build_segments(
    run: &Run,
    corrected_neg: &CorrectedEndpoint,
    corrected_pos: &CorrectedEndpoint,
) -> Vec<CorrectedSegment> {
    let shaped = |p: CrossingPattern| match p {
        CrossingPattern::Both => CrossingPattern::TowardLower,
        other => other,
    };
    let (sn, sp) = (shaped(run.pattern_neg), shaped(run.pattern_pos));
    let (start, end) = (run.start as f64, run.end as f64);
    let base = |s: f64, e: f64, os: f64, oe: f64| {
        CorrectedSegment::local(run.orientation, run.line, s, e, os, oe)
    };

    match (sn, sp) {
        (CrossingPattern::None, CrossingPattern::None) => Vec::new(),
        (CrossingPattern::None, cross) => vec![base(start, end, 0.0, pattern_offset(cross))],
        (cross, CrossingPattern::None) => vec![base(start, end, pattern_offset(cross), 0.0)],
        (a, b) if a == b => {
            let mid = (start + end) / 2.0;
            let o = pattern_offset(a);
            vec![base(start, mid, o, 0.0), base(mid, end, 0.0, o)]
        }
        (a, b) => {
            // Z shape: the corrected endpoints replace the local ends.
            vec![CorrectedSegment {
                orientation: run.orientation,
                line: run.line,
                start: corrected_neg.position as f64,
                end: corrected_pos.position as f64,
                offset_start: pattern_offset(a),
                offset_end: pattern_offset(b),
                absorbed_start: corrected_neg.steps_absorbed,
                absorbed_end: corrected_pos.steps_absorbed,
                window: (start, end),
            }]
        }
    }
}

/// Integrates the segment's height column by column over its blending
/// window and assigns each side's area to the adjacent pixel on that side,
/// mixing toward the opposite neighbor. Heights are clamped to half a
/// pixel; columns where the height crosses zero split at the crossing.
/// All arithmetic is exact until the final conversion of each area.
pub fn coverage_areas(segment: &CorrectedSegment) -> Vec<BlendWeight> {
    let s = frac_from_half(segment.start);
    let e = frac_from_half(segment.end);
    if e <= s {
        return Vec::new();
    }
    let (u_s, u_e) = segment.end_heights();
    let (win_lo, win_hi) = (
        frac_from_half(segment.window.0),
        frac_from_half(segment.window.1),
    );

    // Height profile: linear, described by a slope and one known point.
    // Uncorrected segments interpolate between their end offsets. Corrected
    // ones take the slope of the chord through the verified endpoints but
    // keep the zero crossing at the window midpoint: the far endpoints pin
    // the slope to within one part per span, while their half-pixel
    // quantization bias would otherwise shift the whole profile sideways.
    // On uniform staircases both descriptions coincide exactly.
    let slope = (u_e - u_s) / (e - s);
    let corrected = segment.absorbed_start > 0 || segment.absorbed_end > 0;
    let (x0, h0) = if corrected {
        ((win_lo + win_hi) / Q::from_integer(2), zero())
    } else {
        (s, u_s)
    };
    let height_at = |x: Q| -> Q { h0 + slope * (x - x0) };
    let clamp_half = |h: Q| -> Q { h.min(half()).max(-half()) };

    let mut weights = Vec::new();
    let mut col = win_lo.floor().to_integer();
    let col_end = win_hi.ceil().to_integer();
    while col < col_end {
        let a = Q::from_integer(col).max(win_lo);
        let b = Q::from_integer(col + 1).min(win_hi);
        if a >= b {
            col += 1;
            continue;
        }

        // Breakpoints where the unclamped height hits -1/2, 0 or +1/2.
        let mut cuts = vec![a, b];
        if slope != zero() {
            for v in [-half(), zero(), half()] {
                let x = x0 + (v - h0) / slope;
                if x > a && x < b {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_unstable();
        cuts.dedup();

        let mut pos_area = zero();
        let mut neg_area = zero();
        for pair in cuts.windows(2) {
            let (t0, t1) = (pair[0], pair[1]);
            let h0 = clamp_half(height_at(t0));
            let h1 = clamp_half(height_at(t1));
            let piece = (h0 + h1) / Q::from_integer(2) * (t1 - t0);
            if piece > zero() {
                pos_area += piece;
            } else {
                neg_area -= piece;
            }
        }

        let c = col as i64;
        if pos_area > zero() {
            if let Some(w) = upper_side_weight(segment, c, pos_area) {
                weights.push(w);
            }
        }
        if neg_area > zero() {
            if let Some(w) = lower_side_weight(segment, c, neg_area) {
                weights.push(w);
            }
        }
        col += 1;
    }
    weights
}

fn frac_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Positive heights lie on the upper (negative perpendicular) side of the
/// run line: the pixel there mixes toward its neighbor across the line.
fn upper_side_weight(segment: &CorrectedSegment, col: i64, area: Q) -> Option<BlendWeight> {
    if col < 0 || segment.line == 0 {
        return None;
    }
    let line = segment.line;
    let (pixel, neighbor) = match segment.orientation {
        Orientation::Horizontal => ((col as u32, line - 1), Neighbor::Below),
        Orientation::Vertical => ((line - 1, col as u32), Neighbor::Right),
    };
    Some(BlendWeight {
        pixel,
        area: frac_to_f64(area.min(half())),
        neighbor,
    })
}

fn lower_side_weight(segment: &CorrectedSegment, col: i64, area: Q) -> Option<BlendWeight> {
    if col < 0 {
        return None;
    }
    let line = segment.line;
    let (pixel, neighbor) = match segment.orientation {
        Orientation::Horizontal => ((col as u32, line), Neighbor::Above),
        Orientation::Vertical => ((line, col as u32), Neighbor::Left),
    };
    Some(BlendWeight {
        pixel,
        area: frac_to_f64(area.min(half())),
        neighbor,
    })
}

fn round_half_away(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Mixes each weighted pixel with its neighbors: horizontal-boundary
/// weights (above/below) first, vertical-boundary weights second, both
/// fetching neighbor colors from the original image. Per-channel results
/// round half away from zero. Unweighted pixels pass through bit exactly,
/// and alpha is never touched.
pub fn blend(image: &ImageBuffer, weights: &[BlendWeight]) -> ImageBuffer {
    blend_with(image, weights, true)
}

pub(crate) fn blend_with(image: &ImageBuffer, weights: &[BlendWeight], par: bool) -> ImageBuffer {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let mut above = vec![0.0f64; w * h];
    let mut below = vec![0.0f64; w * h];
    let mut left = vec![0.0f64; w * h];
    let mut right = vec![0.0f64; w * h];
    for weight in weights {
        let (x, y) = weight.pixel;
        if x as usize >= w || y as usize >= h {
            debug_assert!(false, "weight out of bounds at ({x}, {y})");
            continue;
        }
        let idx = y as usize * w + x as usize;
        let plane = match weight.neighbor {
            Neighbor::Above => &mut above,
            Neighbor::Below => &mut below,
            Neighbor::Left => &mut left,
            Neighbor::Right => &mut right,
        };
        plane[idx] = (plane[idx] + weight.area).min(0.5);
    }

    let rows = crate::util::dispatch_map(h, par, |y| {
        let mut row: Vec<Rgba> = Vec::with_capacity(w);
        for x in 0..w {
            let idx = y * w + x;
            let src = image.get(x as u32, y as u32);
            let mut val = [src[0] as f64, src[1] as f64, src[2] as f64];

            // Horizontal-boundary pass: neighbors above/below. The second
            // (vertical) pass applies to the intermediate result, still
            // fetching neighbor colors from the original image. Sums are
            // grouped so that swapping the two sides is bit-neutral, which
            // keeps mirrored inputs producing mirrored outputs exactly.
            for (a_neg, a_pos, d) in [
                (above[idx], below[idx], (0i64, 1i64)),
                (left[idx], right[idx], (1, 0)),
            ] {
                if a_neg <= 0.0 && a_pos <= 0.0 {
                    continue;
                }
                let n_neg = (a_neg > 0.0).then(|| neighbor_color(image, x, y, -d.0, -d.1));
                let n_pos = (a_pos > 0.0).then(|| neighbor_color(image, x, y, d.0, d.1));
                let total = a_neg + a_pos;
                for c in 0..3 {
                    let t_neg = n_neg.map_or(0.0, |n| a_neg * n[c] as f64);
                    let t_pos = n_pos.map_or(0.0, |n| a_pos * n[c] as f64);
                    let mixed = (1.0 - total) * val[c] + (t_neg + t_pos);
                    val[c] = round_half_away(mixed) as f64;
                }
            }

            row.push([val[0] as u8, val[1] as u8, val[2] as u8, src[3]]);
        }
        row
    });
    ImageBuffer::new(image.width(), image.height(), rows.concat())
        .expect("dimensions preserved")
}

fn neighbor_color(image: &ImageBuffer, x: usize, y: usize, dx: i64, dy: i64) -> Rgba {
    let nx = x as i64 + dx;
    let ny = y as i64 + dy;
    debug_assert!(
        nx >= 0 && ny >= 0 && (nx as u32) < image.width() && (ny as u32) < image.height(),
        "blend weight points off the image"
    );
    image.get(nx as u32, ny as u32)
}
