use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slope_mlaa::{Frac, Mode};

#[derive(Parser)]
#[command(name = "slope-mlaa", version, about = "Morphological anti-aliasing with slope-predicted endpoint correction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for the parallel stages (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Anti-alias a PNG image.
    Process(ProcessArgs),
    /// Generate a synthetic half-plane scene (and optional reference).
    Synth(SynthArgs),
    /// Report PSNR between two images, optionally against a reference.
    Diff(DiffArgs),
    /// Probe-count and quality benchmark over a directory of scenes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    None,
    Mlaa,
    Slope,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::None => Mode::None,
            ModeArg::Mlaa => Mode::LocalMlaa,
            ModeArg::Slope => Mode::SlopeMlaa,
        }
    }
}

#[derive(Args)]
pub struct ProcessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Luma difference threshold in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f32,
    /// Endpoint-search budget per direction.
    #[arg(long = "max-cycles", default_value_t = 4)]
    pub max_cycles: u32,
    /// Run-walk cap per direction in pixels.
    #[arg(long = "search-cap", default_value_t = 64)]
    pub search_cap: u32,
    /// Write the edge mask as a debug PNG (red: top, green: left).
    #[arg(long = "dump-edges")]
    pub dump_edges: Option<PathBuf>,
    /// Write accumulated blend weights as a debug PNG.
    #[arg(long = "dump-weights")]
    pub dump_weights: Option<PathBuf>,
    /// Write measured runs as CSV.
    #[arg(long = "dump-runs")]
    pub dump_runs: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Boundary slope as a fraction p/q in (0, 1).
    #[arg(long, value_parser = parse_frac)]
    pub slope: Frac,
    /// Boundary intercept in pixels: decimal or fraction.
    #[arg(long, value_parser = parse_frac, default_value = "0", allow_hyphen_values = true)]
    pub intercept: Frac,
    /// Scene size as WxH.
    #[arg(long, value_parser = parse_size)]
    pub size: (u32, u32),
    #[arg(long = "out")]
    pub output: PathBuf,
    /// Also write a supersampled reference image.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Samples per axis for the reference.
    #[arg(long, default_value_t = 16)]
    pub supersample: u32,
}

#[derive(Args)]
pub struct DiffArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of scene PNGs; `<name>.ref.png` siblings enable PSNR columns.
    #[arg(long)]
    pub scenes: PathBuf,
    /// Cycle budgets: `a..b` (inclusive), a comma list, or one value.
    #[arg(long, value_parser = parse_cycles, default_value = "0..8")]
    pub cycles: Cycles,
    #[arg(long = "out")]
    pub output: PathBuf,
    /// Optional per-extension probe CSV.
    #[arg(long = "probes-out")]
    pub probes_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f32,
    #[arg(long = "search-cap", default_value_t = 64)]
    pub search_cap: u32,
}

#[derive(Clone, Debug)]
pub struct Cycles(pub Vec<u32>);

pub fn parse_frac(s: &str) -> Result<Frac, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let q: i64 = q.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if q == 0 {
            return Err("denominator must be nonzero".into());
        }
        return Ok(Frac::new(p, q));
    }
    if let Some((int, dec)) = s.split_once('.') {
        if dec.len() > 9 || dec.chars().any(|c| !c.is_ascii_digit()) {
            return Err(format!("bad decimal: {s}"));
        }
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|e| format!("bad integer part: {e}"))?
        };
        let den = 10i64.pow(dec.len() as u32);
        let num: i64 = if dec.is_empty() {
            0
        } else {
            dec.parse().map_err(|e| format!("bad fraction part: {e}"))?
        };
        let signed = int.abs() * den + num;
        let signed = if negative || int < 0 { -signed } else { signed };
        return Ok(Frac::new(signed, den));
    }
    let v: i64 = s.parse().map_err(|e| format!("bad number: {e}"))?;
    Ok(Frac::new(v, 1))
}

pub fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size must look like 128x128, got {s}"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("bad width: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("bad height: {e}"))?;
    Ok((w, h))
}

pub fn parse_cycles(s: &str) -> Result<Cycles, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let b: u32 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
        if a > b {
            return Err("range start exceeds end".into());
        }
        return Ok(Cycles((a..=b).collect()));
    }
    let vals: Result<Vec<u32>, _> = s.split(',').map(|v| v.trim().parse::<u32>()).collect();
    match vals {
        Ok(v) if !v.is_empty() => Ok(Cycles(v)),
        _ => Err(format!("bad cycle list: {s}")),
    }
}
