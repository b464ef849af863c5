//! Morphological anti-aliasing with slope-predicted boundary endpoint
//! correction.
//!
//! The pipeline detects pixel edges from luma discontinuities, measures the
//! staircase runs they form, reconstructs sub-pixel boundary segments, and
//! blends colors by the coverage those segments imply. The slope mode
//! additionally verifies where each staircase really ends: a step of width
//! `L` can only be followed by steps of width `L-1`, `L` or `L+1`, so a
//! handful of pattern probes per step replaces a pixel-by-pixel walk.
//!
//! The `synth` module generates exact rational-slope ground truth scenes
//! with supersampled references and a brute-force walking oracle, so every
//! measurable claim about the search (agreement, probe bounds, quality) can
//! be checked numerically.

pub mod edge;
mod error;
pub mod metrics;
pub mod pipeline;
pub mod predict;
pub mod raster;
pub mod revector;
pub mod runs;
pub mod synth;
mod util;

pub use edge::{detect_edges, render_mask, EdgeMask, EdgeThreshold};
pub use error::{Error, Result};
pub use metrics::{endpoint_deviation, psnr, MetricsReport};
pub use pipeline::{
    build_mask, run_pipeline, run_pipeline_seq, Mode, PipelineConfig, PipelineStats,
};
pub use predict::{
    admissible_slope_interval, extend_endpoint, probe_step_end, widths_consistent,
    CorrectedEndpoint, ProbeCounter, RunEndRef, SearchBudget,
};
pub use raster::{compute_luma, load_image, save_image, ImageBuffer, LumaBuffer, Rgba};
pub use revector::{blend, build_segments, coverage_areas, BlendWeight, CorrectedSegment, Neighbor};
pub use runs::{
    dominant_orientation, search_run, CrossingPattern, Dir, EdgeRun, Orientation, Run, RunCache,
};
pub use synth::{
    brute_force_extend, rasterize_halfplane, supersample_reference, supersample_reference_seq,
    true_step_endpoints, BruteForceResult, Frac, HalfPlaneScene, ReferenceImage,
};
