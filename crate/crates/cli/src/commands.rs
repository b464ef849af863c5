use std::io::Write;

use slope_mlaa::{
    build_mask, load_image, psnr, rasterize_halfplane, render_mask, run_pipeline, save_image,
    supersample_reference, EdgeThreshold, Frac, HalfPlaneScene, PipelineConfig, RunCache,
    SearchBudget,
};

use crate::args::{Cli, Command, DiffArgs, ProcessArgs, SynthArgs};
use crate::bench::run_bench;
use crate::{CliError, CliResult};

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let threads = cli.threads;
    run_with_threads(threads, move || match cli.command {
        Command::Process(args) => process(args),
        Command::Synth(args) => synth(args),
        Command::Diff(args) => diff(args),
        Command::Bench(args) => run_bench(args),
    })
}

#[cfg(feature = "parallel")]
fn run_with_threads(threads: usize, f: impl FnOnce() -> CliResult<()> + Send) -> CliResult<()> {
    if threads == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Contract(format!("thread pool: {e}")))?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(threads: usize, f: impl FnOnce() -> CliResult<()> + Send) -> CliResult<()> {
    if threads > 1 {
        eprintln!("note: built without the parallel feature; running sequentially");
    }
    f()
}

pub(crate) fn pipeline_config(
    threshold: f32,
    max_cycles: u32,
    search_cap: u32,
    mode: slope_mlaa::Mode,
) -> CliResult<PipelineConfig> {
    Ok(PipelineConfig {
        threshold: EdgeThreshold::new(threshold)?,
        max_cycles: SearchBudget(max_cycles),
        search_cap,
        mode,
    })
}

fn process(args: ProcessArgs) -> CliResult<()> {
    let config = pipeline_config(
        args.threshold,
        args.max_cycles,
        args.search_cap,
        args.mode.into(),
    )?;
    let image = load_image(&args.input)?;

    if let Some(path) = &args.dump_edges {
        save_image(&render_mask(&build_mask(&image, config.threshold)), path)?;
    }
    if let Some(path) = &args.dump_weights {
        save_image(&slope_mlaa::pipeline::render_weights(&image, &config)?, path)?;
    }
    if let Some(path) = &args.dump_runs {
        dump_runs(&image, &config, path)?;
    }

    let (out, stats) = run_pipeline(&image, &config);
    save_image(&out, &args.output)?;
    println!(
        "processed {} -> {} ({}x{}), runs extended {}, pattern probes {}, max probes/direction {}, weights {}",
        args.input.display(),
        args.output.display(),
        image.width(),
        image.height(),
        stats.runs_extended,
        stats.total_pattern_probes,
        stats.max_probes_per_direction,
        stats.weights_applied,
    );
    Ok(())
}

fn dump_runs(
    image: &slope_mlaa::ImageBuffer,
    config: &PipelineConfig,
    path: &std::path::Path,
) -> CliResult<()> {
    let mask = build_mask(image, config.threshold);
    let cache = RunCache::build(&mask);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "schema",
        "orientation",
        "anchor_x",
        "anchor_y",
        "d_neg",
        "d_pos",
        "pattern_neg",
        "pattern_pos",
    ])?;
    for run in cache.horizontal().iter().chain(cache.vertical()) {
        let (ax, ay) = match run.orientation {
            slope_mlaa::Orientation::Horizontal => (run.start, run.line),
            slope_mlaa::Orientation::Vertical => (run.line, run.start),
        };
        w.write_record([
            "runs-v1".to_string(),
            run.orientation.to_string(),
            ax.to_string(),
            ay.to_string(),
            "0".to_string(),
            (run.len() - 1).to_string(),
            run.pattern_neg.to_string(),
            run.pattern_pos.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn synth(args: SynthArgs) -> CliResult<()> {
    let (width, height) = args.size;
    if args.slope <= Frac::new(0, 1) || args.slope >= Frac::new(1, 1) {
        return Err(CliError::Contract(format!(
            "synth slope must be in (0, 1), got {}",
            args.slope
        )));
    }
    let scene = HalfPlaneScene::new(args.slope, args.intercept, width, height)?;
    save_image(&rasterize_halfplane(&scene), &args.output)?;
    println!("wrote scene {}", args.output.display());
    if let Some(ref_path) = &args.reference {
        let reference = supersample_reference(&scene, args.supersample)?;
        save_image(&reference.image, ref_path)?;
        println!(
            "wrote reference {} ({}x{} subsamples)",
            ref_path.display(),
            args.supersample,
            args.supersample
        );
    }
    Ok(())
}

fn diff(args: DiffArgs) -> CliResult<()> {
    let a = load_image(&args.a)?;
    let b = load_image(&args.b)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "psnr(a, b) = {}", format_db(psnr(&a, &b)?))?;
    if let Some(ref_path) = &args.reference {
        let reference = load_image(ref_path)?;
        let pa = psnr(&a, &reference)?;
        let pb = psnr(&b, &reference)?;
        writeln!(out, "psnr(a, reference) = {}", format_db(pa))?;
        writeln!(out, "psnr(b, reference) = {}", format_db(pb))?;
        writeln!(out, "delta(b - a) = {:.4} dB", pb - pa)?;
    }
    Ok(())
}

pub(crate) fn format_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.4} dB")
    }
}
