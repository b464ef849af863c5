//! Quality and cost metrics: PSNR against a reference, endpoint deviation
//! against ground-truth drop positions, and the aggregate report.

use crate::error::{Error, Result};
use crate::pipeline::{ExtensionRecord, PipelineStats};
use crate::raster::ImageBuffer;
use crate::runs::{Dir, Orientation, Run};

/// Aggregate quality/cost report for one pipeline invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub psnr_db: f64,
    pub mean_endpoint_deviation: f64,
    pub max_endpoint_deviation: f64,
    pub total_pattern_probes: u64,
    pub runs_extended: u64,
}

impl MetricsReport {
    pub fn new(
        psnr_db: f64,
        deviation: (f64, f64),
        stats: &PipelineStats,
    ) -> MetricsReport {
        MetricsReport {
            psnr_db,
            mean_endpoint_deviation: deviation.0,
            max_endpoint_deviation: deviation.1,
            total_pattern_probes: stats.total_pattern_probes,
            runs_extended: stats.runs_extended,
        }
    }
}

/// Standard 8-bit PSNR in decibels over the RGB channels. Identical images
/// report infinity.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            a_width: a.width(),
            a_height: a.height(),
            b_width: b.width(),
            b_height: b.height(),
        });
    }
    let mut sq_err = 0u64;
    for (pa, pb) in a.pixels().iter().zip(b.pixels()) {
        for c in 0..3 {
            let d = pa[c] as i64 - pb[c] as i64;
            sq_err += (d * d) as u64;
        }
    }
    if sq_err == 0 {
        return Ok(f64::INFINITY);
    }
    let samples = (a.width() as f64) * (a.height() as f64) * 3.0;
    let mse = sq_err as f64 / samples;
    Ok(10.0 * ((255.0 * 255.0) / mse).log10())
}

/// Mean and maximum absolute deviation between paired predicted and true
/// endpoint positions. The truth list must be nonempty and the lists must
/// pair up one to one.
pub fn endpoint_deviation(predicted: &[f64], truth: &[f64]) -> Result<(f64, f64)> {
    if truth.is_empty() {
        return Err(Error::contract("empty truth set for endpoint deviation"));
    }
    if predicted.len() != truth.len() {
        return Err(Error::contract(format!(
            "deviation pairing mismatch: {} predicted vs {} truth",
            predicted.len(),
            truth.len()
        )));
    }
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for (p, t) in predicted.iter().zip(truth) {
        let d = (p - t).abs();
        sum += d;
        max = max.max(d);
    }
    Ok((sum / truth.len() as f64, max))
}

/// Pairs run-endpoint predictions with budget-clamped ground truth.
///
/// For each measured endpoint that coincides with a true drop, the target
/// is the drop `budget` steps further along (clamped to the last drop in
/// that direction): the farthest endpoint a correct predictor could verify.
/// Local reconstruction predicts its own end, so its deviation grows with
/// the step width; a correct slope search lands on the target exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationPairs {
    pub mean: f64,
    pub max: f64,
    pub pairs: usize,
}

fn clamped_target(drops: &[u32], idx: usize, dir: Dir, budget: u32) -> f64 {
    let target = match dir {
        Dir::Pos => (idx + budget as usize).min(drops.len() - 1),
        Dir::Neg => idx.saturating_sub(budget as usize),
    };
    drops[target] as f64
}

/// Deviation of slope-corrected endpoints, from pipeline extension records.
pub fn slope_deviation(
    drops: &[u32],
    extensions: &[ExtensionRecord],
    orientation: Orientation,
    budget: u32,
) -> Result<(f64, f64)> {
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for ext in extensions.iter().filter(|e| e.orientation == orientation) {
        let Ok(idx) = drops.binary_search(&(ext.start_pos as u32)) else {
            continue;
        };
        predicted.push(ext.end_pos as f64);
        truth.push(clamped_target(drops, idx, ext.dir, budget));
    }
    endpoint_deviation(&predicted, &truth)
}

/// Deviation of local (uncorrected) endpoints for the same anchor set the
/// slope mode would extend.
pub fn local_deviation(
    drops: &[u32],
    runs: &[Run],
    search_cap: u32,
    budget: u32,
) -> Result<(f64, f64)> {
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for run in runs {
        if !(run.is_z_shaped() && run.len() >= 2 && run.len() <= search_cap) {
            continue;
        }
        for dir in [Dir::Neg, Dir::Pos] {
            let pos = run.end_pos(dir);
            let Ok(idx) = drops.binary_search(&pos) else {
                continue;
            };
            predicted.push(pos as f64);
            truth.push(clamped_target(drops, idx, dir, budget));
        }
    }
    endpoint_deviation(&predicted, &truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{run_pipeline, Mode, PipelineConfig};
    use crate::predict::SearchBudget;
    use crate::raster::Rgba;
    use crate::synth::{rasterize_halfplane, true_step_endpoints, Frac, HalfPlaneScene};

    #[test]
    fn identical_images_have_infinite_psnr() {
        let img = ImageBuffer::filled(10, 10, [1, 2, 3, 255]);
        assert!(psnr(&img, &img.clone()).unwrap().is_infinite());
    }

    #[test]
    fn black_vs_white_is_zero_db() {
        let a = ImageBuffer::filled(8, 8, [0, 0, 0, 255]);
        let b = ImageBuffer::filled(8, 8, [255, 255, 255, 255]);
        assert_eq!(psnr(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn single_count_error_matches_the_formula() {
        let a = ImageBuffer::filled(10, 10, [100, 100, 100, 255]);
        let mut px: Vec<Rgba> = a.pixels().to_vec();
        px[37][1] = 101;
        let b = ImageBuffer::new(10, 10, px).unwrap();
        let expect = 10.0 * (255.0f64 * 255.0 * 300.0).log10();
        assert!((psnr(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn psnr_requires_matching_dimensions() {
        let a = ImageBuffer::filled(4, 4, [0, 0, 0, 255]);
        let b = ImageBuffer::filled(4, 5, [0, 0, 0, 255]);
        assert!(matches!(psnr(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn perfect_prediction_deviates_zero() {
        let d = endpoint_deviation(&[3.0, 6.0, 9.0], &[3.0, 6.0, 9.0]).unwrap();
        assert_eq!(d, (0.0, 0.0));
    }

    #[test]
    fn deviation_rejects_empty_truth() {
        assert!(endpoint_deviation(&[], &[]).is_err());
    }

    #[test]
    fn slope_deviation_is_zero_on_clean_lines() {
        let scene = HalfPlaneScene::new(Frac::new(1, 3), Frac::new(5, 2), 120, 50).unwrap();
        let img = rasterize_halfplane(&scene);
        let drops = true_step_endpoints(&scene).unwrap();
        let config = PipelineConfig {
            mode: Mode::SlopeMlaa,
            max_cycles: SearchBudget(6),
            ..PipelineConfig::default()
        };
        let (_, stats) = run_pipeline(&img, &config);
        let (mean, max) =
            slope_deviation(&drops, &stats.extensions, Orientation::Horizontal, 6).unwrap();
        assert_eq!((mean, max), (0.0, 0.0));
    }

    #[test]
    fn local_deviation_grows_with_step_width() {
        let budget = 4;
        let mut means = Vec::new();
        for q in [3i64, 5] {
            let scene = HalfPlaneScene::new(Frac::new(1, q), Frac::new(5, 2), 160, 64).unwrap();
            let img = rasterize_halfplane(&scene);
            let drops = true_step_endpoints(&scene).unwrap();
            let mask = crate::pipeline::build_mask(&img, Default::default());
            let cache = crate::runs::RunCache::build(&mask);
            let (mean, _) = local_deviation(&drops, cache.horizontal(), 64, budget).unwrap();
            means.push(mean);
            // Slope search on the same scene pairs exactly.
            let config = PipelineConfig {
                mode: Mode::SlopeMlaa,
                max_cycles: SearchBudget(budget),
                ..PipelineConfig::default()
            };
            let (_, stats) = run_pipeline(&img, &config);
            let (smean, _) =
                slope_deviation(&drops, &stats.extensions, Orientation::Horizontal, budget)
                    .unwrap();
            assert!(smean < mean, "slope {smean} must beat local {mean}");
        }
        assert!(means[1] > means[0], "wider steps deviate more: {means:?}");
    }
}
