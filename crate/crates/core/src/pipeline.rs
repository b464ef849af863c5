//! End-to-end pipeline: luma, edge detection, run measurement, optional
//! slope-predicted endpoint correction, revectorization and blending.
//!
//! Output is deterministic for a fixed input and configuration on any
//! thread count: every parallel stage maps independent indices to owned
//! values, and the only cross-run reductions are integer sums.

use crate::edge::{detect_edges_with, EdgeMask, EdgeThreshold};
use crate::error::Result;
use crate::predict::{extend_endpoint, CorrectedEndpoint, RunEndRef, SearchBudget};
use crate::raster::{compute_luma_with, ImageBuffer};
use crate::revector::{blend_with, build_segments, coverage_areas, BlendWeight};
use crate::runs::{Dir, Orientation, Run, RunCache};
use crate::util::dispatch_map;

/// Reconstruction mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Pass the image through untouched.
    None,
    /// Local per-run reconstruction only.
    LocalMlaa,
    /// Local reconstruction plus slope-predicted endpoint correction.
    SlopeMlaa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub threshold: EdgeThreshold,
    pub max_cycles: SearchBudget,
    pub search_cap: u32,
    pub mode: Mode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            threshold: EdgeThreshold::default(),
            max_cycles: SearchBudget::default(),
            search_cap: 64,
            mode: Mode::SlopeMlaa,
        }
    }
}

/// One endpoint extension performed by the slope mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionRecord {
    pub orientation: Orientation,
    pub run_index: usize,
    pub line: u32,
    pub dir: Dir,
    pub start_pos: i64,
    pub end_pos: i64,
    pub steps_absorbed: u32,
    pub probes_used: u32,
    pub pinned_width: Option<u32>,
}

/// Instrumentation gathered by one pipeline invocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineStats {
    pub total_pattern_probes: u64,
    pub runs_extended: u64,
    pub max_probes_per_direction: u32,
    pub weights_applied: u64,
    pub extensions: Vec<ExtensionRecord>,
}

/// Computes the edge mask the pipeline would use for an image.
pub fn build_mask(image: &ImageBuffer, threshold: EdgeThreshold) -> EdgeMask {
    build_mask_with(image, threshold, true)
}

fn build_mask_with(image: &ImageBuffer, threshold: EdgeThreshold, par: bool) -> EdgeMask {
    detect_edges_with(&compute_luma_with(image, par), threshold, par)
}

/// Per-pixel dominant orientation, or none where a pixel touches no edges.
/// Mirrors [`crate::runs::dominant_orientation`] but reads the prepared run
/// cache: the extent of a border's run is its length minus one, ties and
/// horizontal-only pixels stay horizontal.
fn dominance_plane(cache: &RunCache, par: bool) -> Vec<Option<Orientation>> {
    let (w, h) = (cache.width(), cache.height());
    let rows = dispatch_map(h as usize, par, |y| {
        let y = y as u32;
        let mut row = Vec::with_capacity(w as usize);
        let ext = |o: Orientation, p: (u32, u32)| cache.run_through(o, p).map(|r| r.len() - 1);
        for x in 0..w {
            let h_ext = ext(Orientation::Horizontal, (x, y))
                .max(ext(Orientation::Horizontal, (x, y + 1)));
            let v_ext = ext(Orientation::Vertical, (x, y))
                .max(ext(Orientation::Vertical, (x + 1, y)));
            row.push(match (h_ext, v_ext) {
                (None, None) => None,
                (Some(_), None) => Some(Orientation::Horizontal),
                (None, Some(_)) => Some(Orientation::Vertical),
                (Some(he), Some(ve)) => Some(if ve > he {
                    Orientation::Vertical
                } else {
                    Orientation::Horizontal
                }),
            });
        }
        row
    });
    rows.concat()
}

struct RunOutput {
    weights: Vec<BlendWeight>,
    extensions: Vec<ExtensionRecord>,
}

/// Whether slope prediction applies to this run: an interior Z shape at
/// least two pixels wide that the search cap can trust.
fn extendable(run: &Run, cap: u32) -> bool {
    run.is_z_shaped() && run.len() >= 2 && run.len() <= cap
}

fn process_run(
    cache: &RunCache,
    dominance: &[Option<Orientation>],
    width: usize,
    run_index: usize,
    run: &Run,
    config: &PipelineConfig,
) -> RunOutput {
    let unmoved = |dir: Dir| CorrectedEndpoint {
        position: run.end_pos(dir) as i64,
        steps_absorbed: 0,
        probes_used: 0,
        pinned_width: None,
    };

    let mut extensions = Vec::new();
    let (neg, pos) = if config.mode == Mode::SlopeMlaa && extendable(run, config.search_cap) {
        let mut corrected = [unmoved(Dir::Neg), unmoved(Dir::Pos)];
        for (slot, dir) in [Dir::Neg, Dir::Pos].into_iter().enumerate() {
            let end = RunEndRef::of(run, dir);
            let out = extend_endpoint(cache, &end, run.len(), dir, config.max_cycles);
            extensions.push(ExtensionRecord {
                orientation: run.orientation,
                run_index,
                line: run.line,
                dir,
                start_pos: end.pos,
                end_pos: out.position,
                steps_absorbed: out.steps_absorbed,
                probes_used: out.probes_used,
                pinned_width: out.pinned_width,
            });
            corrected[slot] = out;
        }
        (corrected[0], corrected[1])
    } else {
        (unmoved(Dir::Neg), unmoved(Dir::Pos))
    };

    let mut weights = Vec::new();
    for segment in build_segments(run, &neg, &pos) {
        for weight in coverage_areas(&segment) {
            // Perpendicular stubs along a longer boundary belong to the
            // other orientation's reconstruction; keep only weights whose
            // target pixel is dominated by this run's orientation.
            let (x, y) = weight.pixel;
            let idx = y as usize * width + x as usize;
            if dominance[idx] == Some(run.orientation) {
                weights.push(weight);
            }
        }
    }
    RunOutput {
        weights,
        extensions,
    }
}

fn run_pipeline_inner(
    image: &ImageBuffer,
    config: &PipelineConfig,
    par: bool,
) -> (ImageBuffer, PipelineStats) {
    if config.mode == Mode::None {
        return (image.clone(), PipelineStats::default());
    }

    let mask = build_mask_with(image, config.threshold, par);
    let cache = RunCache::build(&mask);
    let dominance = dominance_plane(&cache, par);
    let width = image.width() as usize;

    let h_count = cache.horizontal().len();
    let v_count = cache.vertical().len();
    let outputs = dispatch_map(h_count + v_count, par, |i| {
        let (run, index) = if i < h_count {
            (&cache.horizontal()[i], i)
        } else {
            (&cache.vertical()[i - h_count], i - h_count)
        };
        process_run(&cache, &dominance, width, index, run, config)
    });

    let mut stats = PipelineStats::default();
    let mut weights = Vec::new();
    for out in outputs {
        for ext in &out.extensions {
            stats.total_pattern_probes += ext.probes_used as u64;
            stats.max_probes_per_direction = stats.max_probes_per_direction.max(ext.probes_used);
        }
        stats.runs_extended += (!out.extensions.is_empty()) as u64;
        stats.extensions.extend(out.extensions);
        weights.extend(out.weights);
    }
    stats.weights_applied = weights.len() as u64;

    (blend_with(image, &weights, par), stats)
}

/// Runs the pipeline on an image. Mode `None` returns the input bit
/// exactly; the other modes blend boundary pixels by reconstructed
/// coverage, with `SlopeMlaa` first correcting run endpoints by slope
/// prediction.
pub fn run_pipeline(image: &ImageBuffer, config: &PipelineConfig) -> (ImageBuffer, PipelineStats) {
    run_pipeline_inner(image, config, true)
}

/// Sequential twin of [`run_pipeline`], available regardless of the
/// `parallel` feature for benchmarking and verification.
pub fn run_pipeline_seq(
    image: &ImageBuffer,
    config: &PipelineConfig,
) -> (ImageBuffer, PipelineStats) {
    run_pipeline_inner(image, config, false)
}

/// Renders accumulated blend areas for debugging: red encodes weights from
/// horizontal boundaries, green from vertical ones.
pub fn render_weights(image: &ImageBuffer, config: &PipelineConfig) -> Result<ImageBuffer> {
    let mask = build_mask(image, config.threshold);
    let cache = RunCache::build(&mask);
    let dominance = dominance_plane(&cache, true);
    let width = image.width() as usize;
    let mut horizontal = vec![0.0f64; width * image.height() as usize];
    let mut vertical = vec![0.0f64; width * image.height() as usize];

    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        for (index, run) in cache.runs(orientation).iter().enumerate() {
            let out = process_run(&cache, &dominance, width, index, run, config);
            for w in out.weights {
                let idx = w.pixel.1 as usize * width + w.pixel.0 as usize;
                match orientation {
                    Orientation::Horizontal => horizontal[idx] += w.area,
                    Orientation::Vertical => vertical[idx] += w.area,
                }
            }
        }
    }

    Ok(ImageBuffer::from_fn(
        image.width(),
        image.height(),
        |x, y| {
            let idx = y as usize * width + x as usize;
            let r = (horizontal[idx].min(1.0) * 255.0).round() as u8;
            let g = (vertical[idx].min(1.0) * 255.0).round() as u8;
            [r, g, 0, 255]
        },
    ))
}
