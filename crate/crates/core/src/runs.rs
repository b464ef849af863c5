//! Edge-run measurement: walking flagged edges to their endpoints,
//! classifying the perpendicular crossings that terminate them, and caching
//! maximal runs for the prediction stage.
//!
//! Coordinate model: a horizontal run at `line = y` lies on the geometric
//! line `Y = y` (between rows `y-1` and `y`) and spans axis positions
//! `[start, end)` in x. A vertical run at `line = x` lies on `X = x` and
//! spans y. "Toward lower" means the crossing edge extends toward the
//! positive perpendicular axis (screen down for horizontal runs, screen
//! right for vertical ones); "toward upper" is the opposite side.

use std::collections::HashMap;
use std::fmt;

use crate::edge::EdgeMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Horizontal => write!(f, "horizontal"),
            Orientation::Vertical => write!(f, "vertical"),
        }
    }
}

/// Which perpendicular edge(s) terminate a run at one of its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingPattern {
    None,
    TowardLower,
    TowardUpper,
    Both,
}

impl CrossingPattern {
    fn classify(lower: bool, upper: bool) -> Self {
        match (lower, upper) {
            (true, true) => CrossingPattern::Both,
            (true, false) => CrossingPattern::TowardLower,
            (false, true) => CrossingPattern::TowardUpper,
            (false, false) => CrossingPattern::None,
        }
    }

    /// Row shift per absorbed step when following a boundary across this
    /// crossing: +1 line for a lower crossing, -1 for an upper one.
    pub fn line_shift(self) -> Option<i64> {
        match self {
            CrossingPattern::TowardLower => Some(1),
            CrossingPattern::TowardUpper => Some(-1),
            _ => None,
        }
    }

    pub fn is_single_crossing(self) -> bool {
        matches!(
            self,
            CrossingPattern::TowardLower | CrossingPattern::TowardUpper
        )
    }
}

impl fmt::Display for CrossingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CrossingPattern::None => "none",
            CrossingPattern::TowardLower => "lower",
            CrossingPattern::TowardUpper => "upper",
            CrossingPattern::Both => "both",
        };
        write!(f, "{s}")
    }
}

/// Search direction along a run's axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Neg,
    Pos,
}

impl Dir {
    #[inline]
    pub fn step(self) -> i64 {
        match self {
            Dir::Neg => -1,
            Dir::Pos => 1,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::Neg => write!(f, "neg"),
            Dir::Pos => write!(f, "pos"),
        }
    }
}

/// A run as measured from one anchor pixel: distances to both ends, the
/// crossing pattern at each end, and whether the search cap cut the walk
/// short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRun {
    pub orientation: Orientation,
    pub anchor: (u32, u32),
    pub d_neg: u32,
    pub d_pos: u32,
    pub pattern_neg: CrossingPattern,
    pub pattern_pos: CrossingPattern,
    pub truncated_neg: bool,
    pub truncated_pos: bool,
}

impl EdgeRun {
    /// `L = d_neg + d_pos + 1`.
    pub fn step_width(&self) -> u32 {
        self.d_neg + self.d_pos + 1
    }
}

struct AxisMask<'a> {
    mask: &'a EdgeMask,
    orientation: Orientation,
}

impl<'a> AxisMask<'a> {
    #[inline]
    fn flag(&self, line: i64, axis: i64) -> bool {
        match self.orientation {
            Orientation::Horizontal => self.mask.top_edge_at(axis, line),
            Orientation::Vertical => self.mask.left_edge_at(line, axis),
        }
    }

    /// Perpendicular flag on the lower (+perp) side at a stop position.
    #[inline]
    fn perp_lower(&self, line: i64, stop: i64) -> bool {
        match self.orientation {
            Orientation::Horizontal => self.mask.left_edge_at(stop, line),
            Orientation::Vertical => self.mask.top_edge_at(line, stop),
        }
    }

    #[inline]
    fn perp_upper(&self, line: i64, stop: i64) -> bool {
        match self.orientation {
            Orientation::Horizontal => self.mask.left_edge_at(stop, line - 1),
            Orientation::Vertical => self.mask.top_edge_at(line - 1, stop),
        }
    }

    #[inline]
    fn pattern_at(&self, line: i64, stop: i64) -> CrossingPattern {
        CrossingPattern::classify(self.perp_lower(line, stop), self.perp_upper(line, stop))
    }
}

/// Measures the edge run through `pixel` in the given orientation.
///
/// Walks the matching edge flag in both directions, stopping at the first
/// pixel lacking the flag or after `cap` steps; the truncated flags record
/// which. The anchor pixel must carry the flag (contract error otherwise).
pub fn search_run(
    mask: &EdgeMask,
    pixel: (u32, u32),
    orientation: Orientation,
    cap: u32,
) -> Result<EdgeRun> {
    let (px, py) = pixel;
    let (line, anchor_axis) = match orientation {
        Orientation::Horizontal => (py as i64, px as i64),
        Orientation::Vertical => (px as i64, py as i64),
    };
    let am = AxisMask { mask, orientation };
    if !am.flag(line, anchor_axis) {
        return Err(Error::contract(format!(
            "pixel ({px}, {py}) has no {orientation} edge"
        )));
    }

    let walk = |dir: i64| -> (u32, bool) {
        let mut d = 0u32;
        loop {
            let next = anchor_axis + dir * (d as i64 + 1);
            if !am.flag(line, next) {
                return (d, false);
            }
            if d == cap {
                return (d, true);
            }
            d += 1;
        }
    };
    let (d_neg, truncated_neg) = walk(-1);
    let (d_pos, truncated_pos) = walk(1);

    // Stop positions: one past the last flagged pixel on each side. The
    // negative stop equals the first run pixel's own coordinate because an
    // edge at axis position a spans [a, a+1).
    let stop_neg = anchor_axis - d_neg as i64;
    let stop_pos = anchor_axis + d_pos as i64 + 1;
    Ok(EdgeRun {
        orientation,
        anchor: pixel,
        d_neg,
        d_pos,
        pattern_neg: am.pattern_at(line, stop_neg),
        pattern_pos: am.pattern_at(line, stop_pos),
        truncated_neg,
        truncated_pos,
    })
}

/// Decides whether the boundary through `pixel` is predominantly horizontal
/// or vertical by comparing run extents along the pixel's four borders
/// (its own top/left edges plus the neighbors' bottom/right ones).
/// Ties go to horizontal; a pixel with edges of only one orientation
/// returns that orientation without comparison.
pub fn dominant_orientation(
    mask: &EdgeMask,
    pixel: (u32, u32),
    cap: u32,
) -> Result<Orientation> {
    let (px, py) = pixel;
    let extent = |p: (u32, u32), o: Orientation| -> Option<u32> {
        let flagged = match o {
            Orientation::Horizontal => mask.top_edge_at(p.0 as i64, p.1 as i64),
            Orientation::Vertical => mask.left_edge_at(p.0 as i64, p.1 as i64),
        };
        if !flagged {
            return None;
        }
        let run = search_run(mask, p, o, cap).expect("flag checked above");
        Some(run.d_neg + run.d_pos)
    };

    let h = extent((px, py), Orientation::Horizontal)
        .max(extent((px, py + 1), Orientation::Horizontal));
    let v = extent((px, py), Orientation::Vertical)
        .max(extent((px + 1, py), Orientation::Vertical));

    match (h, v) {
        (None, None) => Err(Error::contract(format!(
            "pixel ({px}, {py}) has no edges on any border"
        ))),
        (Some(_), None) => Ok(Orientation::Horizontal),
        (None, Some(_)) => Ok(Orientation::Vertical),
        (Some(h), Some(v)) => {
            if v > h {
                Ok(Orientation::Vertical)
            } else {
                Ok(Orientation::Horizontal)
            }
        }
    }
}

/// A maximal run in the cache: the span `[start, end)` along its axis plus
/// the crossing pattern at each end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub orientation: Orientation,
    pub line: u32,
    pub start: u32,
    pub end: u32,
    pub pattern_neg: CrossingPattern,
    pub pattern_pos: CrossingPattern,
}

impl Run {
    pub fn len(&self) -> u32 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn end_pos(&self, dir: Dir) -> u32 {
        match dir {
            Dir::Neg => self.start,
            Dir::Pos => self.end,
        }
    }

    pub fn end_pattern(&self, dir: Dir) -> CrossingPattern {
        match dir {
            Dir::Neg => self.pattern_neg,
            Dir::Pos => self.pattern_pos,
        }
    }

    /// Both ends are genuine crossings, i.e. the run is flanked by drops
    /// rather than open image borders.
    pub fn is_interior(&self) -> bool {
        self.pattern_neg != CrossingPattern::None && self.pattern_pos != CrossingPattern::None
    }

    /// Opposite single crossings at the two ends.
    pub fn is_z_shaped(&self) -> bool {
        self.pattern_neg.is_single_crossing()
            && self.pattern_pos.is_single_crossing()
            && self.pattern_neg != self.pattern_pos
    }
}

const NO_RUN: u32 = u32::MAX;

/// All maximal runs of an edge mask, enumerated once, with end-position
/// lookup tables for the prediction probes. Results are identical to
/// per-pixel searching; neighboring pixels simply share one walk.
#[derive(Debug)]
pub struct RunCache {
    width: u32,
    height: u32,
    horizontal: Vec<Run>,
    vertical: Vec<Run>,
    h_at: Vec<u32>,
    v_at: Vec<u32>,
    ends: HashMap<(Orientation, u32, u32, bool), u32>,
}

impl RunCache {
    pub fn build(mask: &EdgeMask) -> RunCache {
        let horizontal = scan_lines(mask, Orientation::Horizontal);
        let vertical = scan_lines(mask, Orientation::Vertical);
        let (w, h) = (mask.width() as usize, mask.height() as usize);

        let mut h_at = vec![NO_RUN; w * h];
        for (i, run) in horizontal.iter().enumerate() {
            for x in run.start..run.end {
                h_at[(run.line as usize) * w + x as usize] = i as u32;
            }
        }
        let mut v_at = vec![NO_RUN; w * h];
        for (i, run) in vertical.iter().enumerate() {
            for y in run.start..run.end {
                v_at[(y as usize) * w + run.line as usize] = i as u32;
            }
        }

        let mut ends = HashMap::new();
        for (i, run) in horizontal.iter().enumerate() {
            ends.insert((Orientation::Horizontal, run.line, run.start, false), i as u32);
            ends.insert((Orientation::Horizontal, run.line, run.end, true), i as u32);
        }
        for (i, run) in vertical.iter().enumerate() {
            ends.insert((Orientation::Vertical, run.line, run.start, false), i as u32);
            ends.insert((Orientation::Vertical, run.line, run.end, true), i as u32);
        }

        RunCache {
            width: mask.width(),
            height: mask.height(),
            horizontal,
            vertical,
            h_at,
            v_at,
            ends,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn horizontal(&self) -> &[Run] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[Run] {
        &self.vertical
    }

    pub fn runs(&self, orientation: Orientation) -> &[Run] {
        match orientation {
            Orientation::Horizontal => &self.horizontal,
            Orientation::Vertical => &self.vertical,
        }
    }

    /// The run whose `dir` end sits exactly at `(line, pos)`, if any.
    pub fn run_ending_at(
        &self,
        orientation: Orientation,
        line: i64,
        pos: i64,
        dir: Dir,
    ) -> Option<&Run> {
        if line < 0 || pos < 0 || line > u32::MAX as i64 || pos > u32::MAX as i64 {
            return None;
        }
        let key = (orientation, line as u32, pos as u32, dir == Dir::Pos);
        self.ends
            .get(&key)
            .map(|&i| &self.runs(orientation)[i as usize])
    }

    /// The run covering the given pixel's edge of this orientation.
    pub fn run_through(&self, orientation: Orientation, pixel: (u32, u32)) -> Option<&Run> {
        let (x, y) = pixel;
        if x >= self.width || y >= self.height {
            return None;
        }
        let idx = (y as usize) * (self.width as usize) + x as usize;
        let id = match orientation {
            Orientation::Horizontal => self.h_at[idx],
            Orientation::Vertical => self.v_at[idx],
        };
        (id != NO_RUN).then(|| &self.runs(orientation)[id as usize])
    }

    /// Cache-backed equivalent of [`search_run`]: derives the anchored view
    /// (capped distances, truncation, patterns) from the stored maximal run.
    pub fn anchored(
        &self,
        mask: &EdgeMask,
        pixel: (u32, u32),
        orientation: Orientation,
        cap: u32,
    ) -> Option<EdgeRun> {
        let run = self.run_through(orientation, pixel)?;
        let axis = match orientation {
            Orientation::Horizontal => pixel.0,
            Orientation::Vertical => pixel.1,
        };
        let full_neg = axis - run.start;
        let full_pos = run.end - 1 - axis;
        let d_neg = full_neg.min(cap);
        let d_pos = full_pos.min(cap);
        let truncated_neg = full_neg > cap;
        let truncated_pos = full_pos > cap;
        let am = AxisMask { mask, orientation };
        let line = run.line as i64;
        let pattern_neg = if truncated_neg {
            am.pattern_at(line, axis as i64 - d_neg as i64)
        } else {
            run.pattern_neg
        };
        let pattern_pos = if truncated_pos {
            am.pattern_at(line, axis as i64 + d_pos as i64 + 1)
        } else {
            run.pattern_pos
        };
        Some(EdgeRun {
            orientation,
            anchor: pixel,
            d_neg,
            d_pos,
            pattern_neg,
            pattern_pos,
            truncated_neg,
            truncated_pos,
        })
    }
}

fn scan_lines(mask: &EdgeMask, orientation: Orientation) -> Vec<Run> {
    let (lines, axis_len) = match orientation {
        Orientation::Horizontal => (mask.height(), mask.width()),
        Orientation::Vertical => (mask.width(), mask.height()),
    };
    let am = AxisMask { mask, orientation };
    let mut runs = Vec::new();
    for line in 1..lines {
        let l = line as i64;
        let mut a = 0u32;
        while a < axis_len {
            if !am.flag(l, a as i64) {
                a += 1;
                continue;
            }
            let start = a;
            while a < axis_len && am.flag(l, a as i64) {
                a += 1;
            }
            runs.push(Run {
                orientation,
                line,
                start,
                end: a,
                pattern_neg: am.pattern_at(l, start as i64),
                pattern_pos: am.pattern_at(l, a as i64),
            });
        }
    }
    runs
}
