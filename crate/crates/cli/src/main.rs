//! `regurec` command-line front end.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use regurec::configs::{self, validate_image};
use regurec::digitizer::{self, IntensityMap, TrinaryImage};
use regurec::metrics;
use regurec::reconstruct::{self, Bump, ReconstructOptions, ReconstructedCurve, DEFAULT_SAMPLES};
use regurec::shapes::{self, Shape};
use regurec::suite::{self, SuiteOptions, DEFAULT_MARGIN, DEFAULT_SEED};
use regurec::{Exec, PipelineError};

#[derive(Parser)]
#[command(name = "regurec", version, about = "Trinary digitization and smooth reconstruction of r-regular shapes")]
struct Cli {
    /// Run sequentially even when built with the `parallel` feature.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Size {
    #[value(name = "2x2")]
    S2,
    #[value(name = "3x3")]
    S3,
    #[value(name = "4x4")]
    S4,
}

#[derive(Clone, Copy, ValueEnum)]
enum BumpName {
    Paper,
    Smoothstep,
}

#[derive(clap::Args)]
struct BlendArgs {
    #[arg(long, value_enum, default_value = "paper")]
    bump: BumpName,
    /// Samples per pixel curve.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Digitize a shape spec into a TRINARY image.
    Digitize {
        shape: PathBuf,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
        #[arg(long, env = "REGUREC_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the grey-level image as PGM.
        #[arg(long)]
        pgm: Option<PathBuf>,
        /// Intensity map for the PGM: identity, square or sqrt.
        #[arg(long, default_value = "identity")]
        intensity: String,
    },
    /// Write the catalogue of legal configurations of one size.
    Enumerate {
        #[arg(value_enum)]
        size: Size,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every window of an image against the catalogues.
    Validate { image: PathBuf },
    /// Reconstruct a smooth boundary curve from an image.
    Reconstruct {
        image: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        blend: BlendArgs,
        /// Reconstruct even if the image has invalid configurations.
        #[arg(long)]
        force: bool,
    },
    /// Compare a reconstruction with the shape it came from.
    Evaluate {
        shape: PathBuf,
        image: PathBuf,
        /// Curve JSON; reconstructed from the image when omitted.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Boundary sampling step in world units (default d/50, at most d/20).
        #[arg(long)]
        spacing: Option<f64>,
        #[command(flatten)]
        blend: BlendArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the evaluation suite and write a JSON-lines report.
    Suite {
        /// Suite config; the built-in suite when omitted.
        config: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Boundary sampling step as a multiple of d.
        #[arg(long, default_value_t = metrics::DEFAULT_SPACING_REL)]
        spacing: f64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
        #[arg(long, env = "REGUREC_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        blend: BlendArgs,
    },
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::Other(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| PipelineError::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_shape(path: &Path) -> Result<Shape, PipelineError> {
    Ok(shapes::parse_shape_spec(&read(path)?)?)
}

fn load_image(path: &Path) -> Result<TrinaryImage, PipelineError> {
    Ok(TrinaryImage::parse(&read(path)?)?)
}

fn positive(name: &str, v: f64) -> Result<(), PipelineError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PipelineError::Other(format!("--{name} must be positive, got {v}")))
    }
}

fn reconstruct_options(b: &BlendArgs, exec: Exec) -> Result<ReconstructOptions, PipelineError> {
    if b.samples < 2 {
        return Err(PipelineError::Other("--samples must be at least 2".into()));
    }
    let bump = match b.bump {
        BumpName::Paper => Bump::Paper,
        BumpName::Smoothstep => Bump::Smoothstep,
    };
    Ok(ReconstructOptions { bump, samples: b.samples, exec })
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Digitize { shape, d, margin, seed, output, pgm, intensity } => {
            positive("d", d)?;
            let s = load_shape(&shape)?;
            let g = digitizer::prepare_grid(&s, d, margin, seed)?;
            let img = digitizer::digitize_trinary_with(&s, &g, exec)?;
            if let Some(p) = pgm {
                let m = IntensityMap::parse(&intensity)
                    .ok_or_else(|| PipelineError::Other(format!("unknown intensity map {intensity:?}")))?;
                let grey = digitizer::digitize_grey_with(&s, &g, &m, exec)?;
                write_out(Some(&p), &grey.to_pgm())?;
            }
            write_out(output.as_deref(), &img.to_string())
        }
        Command::Enumerate { size, output } => {
            let k = match size {
                Size::S2 => 2,
                Size::S3 => 3,
                Size::S4 => 4,
            };
            write_out(output.as_deref(), &configs::try_catalogue(k)?.to_text())
        }
        Command::Validate { image } => {
            let img = load_image(&image)?;
            let v = validate_image(&img);
            if v.is_empty() {
                println!("ok: {}x{} image, no invalid configurations", img.width(), img.height());
                Ok(())
            } else {
                for x in &v {
                    println!("{x}");
                }
                Err(PipelineError::InvalidConfiguration(v))
            }
        }
        Command::Reconstruct { image, output, svg, blend, force } => {
            let img = load_image(&image)?;
            let v = validate_image(&img);
            if !v.is_empty() {
                for x in &v {
                    eprintln!("{x}");
                }
                if !force {
                    return Err(PipelineError::InvalidConfiguration(v));
                }
                eprintln!("warning: continuing past {} invalid configuration(s)", v.len());
            }
            let (graph, curve) = reconstruct::reconstruct(&img, &reconstruct_options(&blend, exec)?)?;
            if curve.strict_containment_misses > 0 {
                eprintln!("note: {} samples leave their pixel by more than rounding", curve.strict_containment_misses);
            }
            if let Some(p) = svg {
                write_out(Some(&p), &svg::render(&img, Some(&graph), &curve))?;
            }
            write_out(output.as_deref(), &(curve.to_json() + "\n"))
        }
        Command::Evaluate { shape, image, curve, spacing, blend, output } => {
            let s = load_shape(&shape)?;
            let img = load_image(&image)?;
            let curve = match curve {
                Some(p) => ReconstructedCurve::from_json(&read(&p)?)
                    .map_err(|e| PipelineError::Other(format!("{}: {e}", p.display())))?,
                None => reconstruct::reconstruct(&img, &reconstruct_options(&blend, exec)?)?.1,
            };
            let spacing = spacing.unwrap_or_else(|| metrics::default_spacing(img.grid.d));
            positive("spacing", spacing)?;
            let report = metrics::evaluate(&s, &img, &curve, spacing)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| PipelineError::Other(e.to_string()))?;
            write_out(output.as_deref(), &(json + "\n"))?;
            if report.passes() {
                Ok(())
            } else {
                Err(PipelineError::Other("reconstruction misses the Hausdorff bound, component count or separation".into()))
            }
        }
        Command::Suite { config, output, spacing, margin, seed, blend } => {
            positive("spacing", spacing)?;
            let cases = match config {
                Some(p) => suite::parse_suite_config(&read(&p)?)?,
                None => suite::default_suite(),
            };
            let ro = reconstruct_options(&blend, exec)?;
            let o = SuiteOptions { bump: ro.bump, samples: ro.samples, spacing_rel: spacing, margin, seed, exec };
            let records = suite::run_suite(&cases, &o);
            let mut text = String::new();
            for r in &records {
                text += &serde_json::to_string(r).map_err(|e| PipelineError::Other(e.to_string()))?;
                text.push('\n');
            }
            write_out(output.as_deref(), &text)?;
            for r in records.iter().filter(|r| !r.ok()) {
                eprintln!("FAIL {} d={} variant={}: {}", r.name, r.d, r.variant, r.error.as_deref().unwrap_or("check failed"));
            }
            let sum = suite::summarize(&records);
            eprintln!(
                "{} cases, {} failures, max bound_ratio {:.4}, strict containment misses {}",
                sum.cases, sum.failures, sum.max_bound_ratio, sum.strict_containment_misses
            );
            if sum.failures == 0 {
                Ok(())
            } else {
                Err(PipelineError::Other(format!("{} suite case(s) failed", sum.failures)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
