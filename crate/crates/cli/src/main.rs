//! `skelscan` — command-line runner for the skeleton-based human-shape
//! detection pipeline.
//!
//! Subcommands mirror the pipeline stages: `diff` and `skeletonize` expose
//! intermediate rasters, `features` prints shape features, `detect` runs a
//! single frame, `run` streams reports for a frame sequence, and `gen`
//! produces synthetic test figures. Reports are line-delimited JSON on
//! stdout. Exit codes: 0 clean, 1 usage error, 2 unrecoverable I/O error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use skelscan_core::imaging::largest_object;
use skelscan_core::pipeline::{analyze_frame, finish_report, tracker, ReportLine};
use skelscan_core::skeleton::{build_graph, prune, thin};
use skelscan_core::synthgen::{
    self, HumanoidSpec, Pose, RigidKind,
};
use skelscan_core::{BinaryMask, GrayImage, PipelineConfig};

#[derive(Parser)]
#[command(name = "skelscan", version, about = "Skeleton-based human-shape detection")]
struct Cli {
    /// TOML config file overriding pipeline defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the DIFF mask between a background and a frame.
    Diff {
        #[arg(long)]
        background: PathBuf,
        #[arg(long)]
        frame: PathBuf,
        /// Apply morphological cleanup before writing.
        #[arg(long)]
        clean: bool,
        /// Output file name inside --out-dir.
        #[arg(long, default_value = "diff.png")]
        out: String,
    },
    /// Write the pruned skeleton raster and its graph as JSON.
    Skeletonize(StageInput),
    /// Print shape features (V/H ratio, fork ratios, flags) as JSON.
    Features(StageInput),
    /// Run the full pipeline on a single frame and print its report.
    Detect {
        /// Background image; repeat for illumination variants.
        #[arg(long, required = true)]
        background: Vec<PathBuf>,
        #[arg(long)]
        frame: PathBuf,
        /// Include per-stage timing in diagnostics.
        #[arg(long)]
        timing: bool,
    },
    /// Stream per-frame reports for an ordered frame sequence.
    Run {
        /// Background image; repeat for illumination variants.
        #[arg(long, required = true)]
        background: Vec<PathBuf>,
        /// Frame files; sequence numbers parsed from trailing digits.
        #[arg(required = true)]
        frames: Vec<PathBuf>,
        /// Worker threads; 1 is strictly sequential.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Include per-stage timing in diagnostics.
        #[arg(long)]
        timing: bool,
    },
    /// Generate synthetic figures and backgrounds.
    #[command(subcommand)]
    Gen(GenCommand),
}

/// Input for stage commands: either a ready binary mask, or a
/// background/frame pair run through differencing and object isolation.
#[derive(Args)]
struct StageInput {
    /// Binary mask raster (nonzero = foreground).
    #[arg(long, conflicts_with_all = ["background", "frame"])]
    mask: Option<PathBuf>,
    #[arg(long, requires = "frame")]
    background: Option<PathBuf>,
    #[arg(long, requires = "background")]
    frame: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Deterministic textured background raster.
    Background {
        #[arg(long, default_value_t = 320)]
        width: usize,
        #[arg(long, default_value_t = 240)]
        height: usize,
        #[arg(long, default_value = "background.png")]
        out: String,
    },
    /// Humanoid stick figure.
    Humanoid {
        #[arg(long, default_value_t = 160)]
        height: usize,
        #[arg(long, default_value_t = 0.125)]
        neck_fraction: f64,
        #[arg(long, default_value_t = 0.42)]
        waist_fraction: f64,
        #[arg(long, default_value_t = 0.30)]
        arm_span_fraction: f64,
        #[arg(long, default_value_t = 3)]
        thickness: usize,
        #[arg(long, value_enum, default_value_t = PoseArg::ArmsDown)]
        pose: PoseArg,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Integer upscale factor applied to the rendered mask.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[command(flatten)]
        composite: CompositeArgs,
    },
    /// Quadruped figure (horizontal body, four legs, head).
    Quadruped {
        #[arg(long, default_value_t = 120)]
        body: usize,
        #[arg(long, default_value_t = 40)]
        legs: usize,
        #[command(flatten)]
        composite: CompositeArgs,
    },
    /// Rigid silhouette (box or car-like).
    Rigid {
        #[arg(long, value_enum, default_value_t = RigidArg::Box)]
        kind: RigidArg,
        #[arg(long, default_value_t = 100)]
        width: usize,
        #[arg(long, default_value_t = 40)]
        height: usize,
        #[command(flatten)]
        composite: CompositeArgs,
    },
}

/// Optional compositing of the figure onto an existing background,
/// producing a ready-to-detect frame next to the figure raster.
#[derive(Args)]
struct CompositeArgs {
    /// Background image to composite the figure onto (writes frame.png).
    #[arg(long)]
    background: Option<PathBuf>,
    /// Top-left placement (row, col) of the figure on the background.
    #[arg(long, num_args = 2, value_names = ["ROW", "COL"], default_values_t = [0, 0])]
    at: Vec<usize>,
    /// Gray level of figure pixels in the composited frame.
    #[arg(long, default_value_t = 230)]
    level: u8,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoseArg {
    ArmsDown,
    ArmsOut,
    SlightBend,
}

#[derive(Clone, Copy, ValueEnum)]
enum RigidArg {
    Box,
    CarLike,
}

/// Error carrying the process exit code: 1 usage, 2 unrecoverable I/O.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
    fn io(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("skelscan: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref())?;
    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    match cli.command {
        Command::Diff { background, frame, clean, out } => {
            let bg = load_gray(&background)?;
            let fr = load_gray(&frame)?;
            let mask = skelscan_core::imaging::diff_mask(&bg, &fr, cfg.intensity_tolerance)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let mask = if clean {
                skelscan_core::imaging::clean_mask(&mask, cfg.open_radius, cfg.close_radius)
            } else {
                mask
            };
            save_mask(&mask, &cli.out_dir.join(out))
        }
        Command::Skeletonize(input) => {
            let object = stage_object(&input, &cfg)?;
            let skeleton = thin(&object).map_err(|e| Failure::usage(e.to_string()))?;
            let graph = build_graph(&skeleton).map_err(|e| Failure::usage(e.to_string()))?;
            let pruned = prune(&graph, cfg.prune_relative, cfg.prune_absolute);
            save_mask(&pruned.to_mask(), &cli.out_dir.join("skeleton.png"))?;
            let json = serde_json::to_string_pretty(&pruned).expect("graph serializes");
            write_file(&cli.out_dir.join("graph.json"), json.as_bytes())
        }
        Command::Features(input) => {
            let object = stage_object(&input, &cfg)?;
            let skeleton = thin(&object).map_err(|e| Failure::usage(e.to_string()))?;
            let graph = build_graph(&skeleton).map_err(|e| Failure::usage(e.to_string()))?;
            let pruned = prune(&graph, cfg.prune_relative, cfg.prune_absolute);
            let features =
                skelscan_core::features::shape_features(&pruned, cfg.neck_range, cfg.waist_range)
                    .map_err(|e| Failure::usage(e.to_string()))?;
            println!("{}", serde_json::to_string(&features).expect("features serialize"));
            Ok(())
        }
        Command::Detect { background, frame, timing } => {
            let bgs = load_backgrounds(&background)?;
            let fr = load_gray(&frame)?;
            let mut track = tracker(&cfg);
            let line = match analyze_frame(&bgs, &fr, 0, &cfg, timing)
                .and_then(|a| finish_report(a, &mut track, &cfg))
            {
                Ok(report) => ReportLine::Report(report),
                Err(e) => ReportLine::Error { frame_id: 0, error: e.to_string() },
            };
            emit(&[line])
        }
        Command::Run { background, frames, jobs, timing } => {
            let bgs = load_backgrounds(&background)?;
            let ids = frame_ids(&frames)?;
            run_stream(&bgs, &frames, &ids, jobs, timing, &cfg)
        }
        Command::Gen(gen) => run_gen(gen, &cli.out_dir),
    }
}

fn load_config(path: Option<&Path>) -> CliResult<PipelineConfig> {
    let cfg = match path {
        None => PipelineConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| Failure::usage(format!("bad config {}: {e}", p.display())))?
        }
    };
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

fn load_gray(path: &Path) -> CliResult<GrayImage> {
    GrayImage::load(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn load_backgrounds(paths: &[PathBuf]) -> CliResult<Vec<GrayImage>> {
    paths.iter().map(|p| load_gray(p)).collect()
}

fn save_mask(mask: &BinaryMask, path: &Path) -> CliResult<()> {
    mask.save(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Resolve a stage command's input to an isolated object mask.
fn stage_object(input: &StageInput, cfg: &PipelineConfig) -> CliResult<BinaryMask> {
    if let Some(mask_path) = &input.mask {
        return BinaryMask::load(mask_path)
            .map_err(|e| Failure::io(format!("{}: {e}", mask_path.display())));
    }
    let (bg_path, fr_path) = match (&input.background, &input.frame) {
        (Some(b), Some(f)) => (b, f),
        _ => return Err(Failure::usage("provide either --mask or --background with --frame")),
    };
    let bg = load_gray(bg_path)?;
    let fr = load_gray(fr_path)?;
    let raw = skelscan_core::imaging::diff_mask(&bg, &fr, cfg.intensity_tolerance)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let cleaned = skelscan_core::imaging::clean_mask(&raw, cfg.open_radius, cfg.close_radius);
    match largest_object(&cleaned, cfg.min_area) {
        Some((object, _, _)) => Ok(object),
        None => Err(Failure::usage(format!("no object of at least {} px found", cfg.min_area))),
    }
}

/// Sequence numbers from trailing digits in the file stems. Falls back to
/// positional indices when any stem has no digits; explicit numbers must
/// be strictly increasing in the given order.
fn frame_ids(frames: &[PathBuf]) -> CliResult<Vec<u64>> {
    let parsed: Option<Vec<u64>> = frames
        .iter()
        .map(|p| {
            let stem = p.file_stem()?.to_string_lossy();
            let digits: String = stem
                .chars()
                .rev()
                .take_while(|c| c.is_ascii_digit())
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            digits.parse().ok()
        })
        .collect();
    match parsed {
        Some(ids) => {
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Failure::usage("frame sequence numbers must be strictly increasing"));
            }
            Ok(ids)
        }
        None => Ok((0..frames.len() as u64).collect()),
    }
}

fn emit(lines: &[ReportLine]) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in lines {
        let json = serde_json::to_string(line).expect("report serializes");
        writeln!(out, "{json}").map_err(|e| Failure::io(format!("stdout: {e}")))?;
    }
    Ok(())
}

/// Decode and analyze frames (in parallel when jobs > 1), then apply the
/// tracker strictly in frame order so every schedule emits identical
/// bytes. Frame decode and analysis errors become in-stream records.
fn run_stream(
    backgrounds: &[GrayImage],
    frames: &[PathBuf],
    ids: &[u64],
    jobs: usize,
    timing: bool,
    cfg: &PipelineConfig,
) -> CliResult<()> {
    if jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::usage(format!("cannot build worker pool: {e}")))?;
    let mut track = tracker(cfg);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    // Bounded chunks keep memory flat on long streams while preserving
    // frame order at the emit point.
    let chunk = (jobs * 32).max(32);
    for (paths, chunk_ids) in frames.chunks(chunk).zip(ids.chunks(chunk)) {
        let analyses: Vec<_> = pool.install(|| {
            paths
                .par_iter()
                .zip(chunk_ids.par_iter())
                .map(|(path, &id)| {
                    let analysis = GrayImage::load(path)
                        .and_then(|f| analyze_frame(backgrounds, &f, id, cfg, timing));
                    (id, analysis)
                })
                .collect()
        });
        for (id, analysis) in analyses {
            let line = match analysis.and_then(|a| finish_report(a, &mut track, cfg)) {
                Ok(report) => ReportLine::Report(report),
                Err(e) => ReportLine::Error { frame_id: id, error: e.to_string() },
            };
            let json = serde_json::to_string(&line).expect("report serializes");
            writeln!(out, "{json}").map_err(|e| Failure::io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn run_gen(gen: GenCommand, out_dir: &Path) -> CliResult<()> {
    match gen {
        GenCommand::Background { width, height, out } => {
            let bg = GrayImage::from_fn(width, height, |r, c| (60 + (r * 7 + c * 3) % 60) as u8);
            bg.save(&out_dir.join(out))
                .map_err(|e| Failure::io(e.to_string()))
        }
        GenCommand::Humanoid {
            height,
            neck_fraction,
            waist_fraction,
            arm_span_fraction,
            thickness,
            pose,
            jitter,
            seed,
            scale,
            composite,
        } => {
            let spec = HumanoidSpec {
                height_px: height,
                neck_fraction,
                waist_fraction,
                arm_span_fraction,
                limb_thickness: thickness,
                pose: match pose {
                    PoseArg::ArmsDown => Pose::ArmsDown,
                    PoseArg::ArmsOut => Pose::ArmsOut,
                    PoseArg::SlightBend => Pose::SlightBend,
                },
                jitter_px: jitter,
            };
            let truth =
                synthgen::render_humanoid(&spec, seed).map_err(|e| Failure::usage(e.to_string()))?;
            let mask = if scale > 1 { synthgen::upscale(&truth.mask, scale) } else { truth.mask.clone() };
            write_figure(out_dir, &mask, &truth, &composite)
        }
        GenCommand::Quadruped { body, legs, composite } => {
            let truth = synthgen::render_quadruped(body, legs)
                .map_err(|e| Failure::usage(e.to_string()))?;
            write_figure(out_dir, &truth.mask.clone(), &truth, &composite)
        }
        GenCommand::Rigid { kind, width, height, composite } => {
            let truth = synthgen::render_rigid(
                match kind {
                    RigidArg::Box => RigidKind::Box,
                    RigidArg::CarLike => RigidKind::CarLike,
                },
                width,
                height,
            );
            write_figure(out_dir, &truth.mask.clone(), &truth, &composite)
        }
    }
}

/// Write figure.png and truth.json; with a composite background, also
/// frame.png with the figure stamped at the requested offset and level.
fn write_figure(
    out_dir: &Path,
    mask: &BinaryMask,
    truth: &synthgen::FigureGroundTruth,
    composite: &CompositeArgs,
) -> CliResult<()> {
    save_mask(mask, &out_dir.join("figure.png"))?;
    let json = serde_json::to_string_pretty(truth).expect("truth serializes");
    write_file(&out_dir.join("truth.json"), json.as_bytes())?;
    if let Some(bg_path) = &composite.background {
        let bg = load_gray(bg_path)?;
        let (row, col) = (composite.at[0], composite.at[1]);
        if row + mask.height() > bg.height() || col + mask.width() > bg.width() {
            return Err(Failure::usage("figure does not fit on the background at --at"));
        }
        let mut frame = bg;
        for (r, c) in mask.iter_foreground() {
            frame.set(row + r, col + c, composite.level);
        }
        frame
            .save(&out_dir.join("frame.png"))
            .map_err(|e| Failure::io(e.to_string()))?;
    }
    Ok(())
}
