//! Probe-count benchmark: for every scene and cycle budget, compare the
//! slope search's pattern probes against the pixel-walking baseline on the
//! same endpoints, and assert the per-direction probe bound.

use std::path::{Path, PathBuf};

use slope_mlaa::{
    brute_force_extend, build_mask, load_image, psnr, run_pipeline, Mode, RunCache, RunEndRef,
};

use crate::args::BenchArgs;
use crate::commands::pipeline_config;
use crate::{CliError, CliResult};

pub fn run_bench(args: BenchArgs) -> CliResult<()> {
    let scenes = discover_scenes(&args.scenes)?;
    if scenes.is_empty() {
        return Err(CliError::Contract(format!(
            "no scene PNGs found in {}",
            args.scenes.display()
        )));
    }

    let mut report = csv::Writer::from_path(&args.output)?;
    report.write_record([
        "schema",
        "scene",
        "cycles",
        "runs_extended",
        "slope_probes",
        "max_probes_per_direction",
        "probe_bound",
        "brute_probes",
        "probe_ratio",
        "psnr_slope_db",
        "psnr_local_db",
        "psnr_none_db",
    ])?;
    let mut probes = match &args.probes_out {
        Some(path) => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record([
                "schema",
                "scene",
                "cycles",
                "run_id",
                "orientation",
                "line",
                "direction",
                "probes_used",
                "steps_absorbed",
                "pinned_width",
            ])?;
            Some(w)
        }
        None => None,
    };

    for scene_path in &scenes {
        let name = scene_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let image = load_image(scene_path)?;
        let reference = reference_for(scene_path)?;

        for &n in &args.cycles.0 {
            let slope_cfg =
                pipeline_config(args.threshold, n, args.search_cap, Mode::SlopeMlaa)?;
            let (slope_out, stats) = run_pipeline(&image, &slope_cfg);

            let bound = n + 2;
            if stats.max_probes_per_direction > bound {
                return Err(CliError::Contract(format!(
                    "probe bound violated on {name}: {} > {bound}",
                    stats.max_probes_per_direction
                )));
            }

            // Walk the same endpoints with the pixel-by-pixel baseline.
            let mask = build_mask(&image, slope_cfg.threshold);
            let cache = RunCache::build(&mask);
            let mut brute_probes = 0u64;
            for ext in &stats.extensions {
                let run = &cache.runs(ext.orientation)[ext.run_index];
                let start = RunEndRef::of(run, ext.dir);
                brute_probes += brute_force_extend(&mask, &start, ext.dir, n).probes;
            }
            let ratio = if stats.total_pattern_probes > 0 {
                format!(
                    "{:.4}",
                    brute_probes as f64 / stats.total_pattern_probes as f64
                )
            } else {
                String::new()
            };

            let (psnr_slope, psnr_local, psnr_none) = match &reference {
                Some(reference) => {
                    let local_cfg =
                        pipeline_config(args.threshold, n, args.search_cap, Mode::LocalMlaa)?;
                    let (local_out, _) = run_pipeline(&image, &local_cfg);
                    (
                        format!("{:.4}", psnr(&slope_out, reference)?),
                        format!("{:.4}", psnr(&local_out, reference)?),
                        format!("{:.4}", psnr(&image, reference)?),
                    )
                }
                None => (String::new(), String::new(), String::new()),
            };

            report.write_record([
                "bench-v1".to_string(),
                name.clone(),
                n.to_string(),
                stats.runs_extended.to_string(),
                stats.total_pattern_probes.to_string(),
                stats.max_probes_per_direction.to_string(),
                bound.to_string(),
                brute_probes.to_string(),
                ratio,
                psnr_slope,
                psnr_local,
                psnr_none,
            ])?;

            if let Some(w) = probes.as_mut() {
                for ext in &stats.extensions {
                    w.write_record([
                        "probes-v1".to_string(),
                        name.clone(),
                        n.to_string(),
                        ext.run_index.to_string(),
                        ext.orientation.to_string(),
                        ext.line.to_string(),
                        ext.dir.to_string(),
                        ext.probes_used.to_string(),
                        ext.steps_absorbed.to_string(),
                        ext.pinned_width.map(|w| w.to_string()).unwrap_or_default(),
                    ])?;
                }
            }
        }
    }

    report.flush()?;
    if let Some(mut w) = probes {
        w.flush()?;
    }
    println!(
        "benchmarked {} scene(s) x {} budget(s) -> {}",
        scenes.len(),
        args.cycles.0.len(),
        args.output.display()
    );
    Ok(())
}

fn discover_scenes(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut scenes = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned());
        let Some(name) = name else { continue };
        if name.ends_with(".png") && !name.ends_with(".ref.png") {
            scenes.push(path);
        }
    }
    scenes.sort();
    Ok(scenes)
}

fn reference_for(scene: &Path) -> CliResult<Option<slope_mlaa::ImageBuffer>> {
    let mut ref_path = scene.to_path_buf();
    ref_path.set_extension("ref.png");
    if ref_path.exists() {
        Ok(Some(load_image(&ref_path)?))
    } else {
        Ok(None)
    }
}
