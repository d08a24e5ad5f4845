use clap::{Args, Parser, Subcommand, ValueEnum};
use radaug::affine::{affine_transform, AffineError, AffineRanges, AffineSampler};
use radaug::eval::{
    run_experiment, AggregateReport, EvalError, EvalReport, ExperimentConfig, InferenceMode,
    ModelConfig,
};
use radaug::expander::{
    derive_item_seed, expand, pick_pole, ExpandError, ExpansionPlan, PlanKind, MANIFEST_FILE,
};
use radaug::io::{load_dataset, read_image, read_manifest, write_image, IoError};
use radaug::radial::{radial_transform, RadialError, RadialParams};
use radaug::{FillPolicy, Image, Pole};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Radial and affine image augmentation toolkit.
#[derive(Parser, Debug)]
#[command(name = "radaug", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transform a single image.
    Transform(TransformArgs),
    /// Expand a labeled dataset directory with seeded augmentations.
    Expand(ExpandArgs),
    /// Grid of originals, affine and radial versions of the inputs.
    Montage(MontageArgs),
    /// Train on an expanded manifest and evaluate on a test directory.
    Eval(EvalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TransformKind {
    Radial,
    Affine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExpandKind {
    Identity,
    Radial,
    Affine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Fill {
    Zero,
    Clamp,
}

impl From<Fill> for FillPolicy {
    fn from(f: Fill) -> Self {
        match f {
            Fill::Zero => FillPolicy::Zero,
            Fill::Clamp => FillPolicy::Clamp,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelKind {
    Centroid,
    Knn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InferenceArg {
    Auto,
    Direct,
    Vote,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, value_enum)]
    kind: TransformKind,
    #[arg(long)]
    input: PathBuf,
    /// Output path; `.png` writes PNG, anything else binary PGM.
    #[arg(long)]
    out: PathBuf,
    /// Pole as `u,v` (row,col) or `random`.
    #[arg(long, default_value = "random")]
    pole: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of rays; defaults to the image height.
    #[arg(long)]
    rays: Option<usize>,
    /// Number of radii; defaults to the image width.
    #[arg(long)]
    radii: Option<usize>,
    #[arg(long, value_enum, default_value_t = Fill::Zero)]
    fill: Fill,
    /// Affine draw index within the seeded sampler.
    #[arg(long, default_value_t = 0)]
    index: u64,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    kind: ExpandKind,
    /// Augmentations per source image; identity always uses 1.
    #[arg(long, default_value_t = radaug::expander::DEFAULT_PER_IMAGE)]
    per_image: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    in_dir: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Fill::Zero)]
    fill: Fill,
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long)]
    radii: Option<usize>,
}

#[derive(Args, Debug)]
struct MontageArgs {
    #[arg(long, num_args = 0..)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Side of each square cell in pixels.
    #[arg(long, default_value_t = 64)]
    cell: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Fill::Zero)]
    fill: Fill,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    train_manifest: PathBuf,
    #[arg(long)]
    test_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelKind::Centroid)]
    model: ModelKind,
    /// Neighbours for `--model knn`.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Softmax temperature for `--model centroid`.
    #[arg(long, default_value_t = 0.05)]
    temperature: f64,
    /// Feature side length (images are resized to side x side).
    #[arg(long, default_value_t = 16)]
    side: usize,
    /// Test-time poles per image under vote inference.
    #[arg(long, default_value_t = radaug::eval::DEFAULT_TEST_POLES)]
    poles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inclusive seed range `a..b`; overrides `--seed`.
    #[arg(long)]
    seeds: Option<String>,
    /// Structured (JSON lines) report output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InferenceArg::Auto)]
    inference: InferenceArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<RadialError> for CliError {
    fn from(e: RadialError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AffineError> for CliError {
    fn from(e: AffineError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExpandError> for CliError {
    fn from(e: ExpandError) -> Self {
        match e {
            ExpandError::Decode { .. } | ExpandError::Output(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Load { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn print_config(command: &str, entries: &[(&str, String)]) {
    println!("[{command}] resolved configuration");
    let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (key, value) in entries {
        println!("  {key:<width$} = {value}");
    }
}

fn parse_pole(text: &str, seed: u64, img: &Image) -> Result<Pole, CliError> {
    if text == "random" {
        return Ok(pick_pole(seed, img.rows(), img.cols()));
    }
    let (u, v) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("pole must be `u,v` or `random`, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("invalid pole coordinate `{s}`")))
    };
    let pole = Pole::new(parse(u)?, parse(v)?);
    if !img.pole_is_valid(pole) {
        return Err(CliError::Usage(format!(
            "pole {pole} is outside the {}x{} image",
            img.rows(),
            img.cols()
        )));
    }
    Ok(pole)
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("seed range must look like `a..b`, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Usage(format!("empty seed range {a}..{b}")));
    }
    Ok((a..=b).collect())
}

fn radial_params(
    img: &Image,
    rays: Option<usize>,
    radii: Option<usize>,
    fill: Fill,
) -> Result<RadialParams, CliError> {
    Ok(RadialParams::new(
        rays.unwrap_or(img.rows()),
        radii.unwrap_or(img.cols()),
        fill.into(),
    )?)
}

fn cmd_transform(args: &TransformArgs) -> Result<(), CliError> {
    let img = read_image(&args.input)?;
    let mut config = vec![
        ("kind", format!("{:?}", args.kind).to_lowercase()),
        ("input", args.input.display().to_string()),
        ("size", format!("{}x{}", img.rows(), img.cols())),
        ("seed", args.seed.to_string()),
        ("fill", FillPolicy::from(args.fill).to_string()),
    ];
    let out = match args.kind {
        TransformKind::Radial => {
            let pole = parse_pole(&args.pole, args.seed, &img)?;
            let params = radial_params(&img, args.rays, args.radii, args.fill)?;
            config.push(("pole", pole.to_string()));
            config.push(("rays", params.rays.to_string()));
            config.push(("radii", params.radii.to_string()));
            config.push(("out", args.out.display().to_string()));
            print_config("transform", &config);
            radial_transform(&img, pole, params)?.image
        }
        TransformKind::Affine => {
            let sampler = AffineSampler::new(AffineRanges::default(), args.seed)?;
            let p = sampler.draw_params(args.index, img.rows(), img.cols());
            config.push(("index", args.index.to_string()));
            config.push(("params", format!("{p:?}")));
            config.push(("out", args.out.display().to_string()));
            print_config("transform", &config);
            affine_transform(&img, &p, args.fill.into())?
        }
    };
    write_image(&out, &args.out)?;
    println!(
        "wrote {} ({}x{})",
        args.out.display(),
        out.rows(),
        out.cols()
    );
    Ok(())
}

fn cmd_expand(args: &ExpandArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.in_dir).map_err(|e| CliError::Usage(e.to_string()))?;
    let fill = FillPolicy::from(args.fill);
    let mut plan = match args.kind {
        ExpandKind::Identity => ExpansionPlan::identity(args.seed, &args.out_dir),
        ExpandKind::Radial => ExpansionPlan {
            kind: PlanKind::Radial {
                rays: args.rays,
                radii: args.radii,
                fill,
            },
            ..ExpansionPlan::radial(args.per_image, args.seed, &args.out_dir)
        },
        ExpandKind::Affine => ExpansionPlan {
            kind: PlanKind::Affine {
                ranges: AffineRanges::default(),
                fill,
            },
            ..ExpansionPlan::affine(args.per_image, args.seed, &args.out_dir)
        },
    };
    plan = plan.with_workers(args.workers);
    let shape = |v: Option<usize>, what: &str| v.map_or(format!("image {what}"), |n| n.to_string());
    let mut config = vec![
        ("kind", plan.kind.name().to_string()),
        ("in_dir", args.in_dir.display().to_string()),
        ("out_dir", args.out_dir.display().to_string()),
        ("per_image", plan.per_image.to_string()),
        ("seed", args.seed.to_string()),
        ("workers", args.workers.to_string()),
        ("classes", dataset.classes.join(",")),
        ("sources", dataset.items.len().to_string()),
    ];
    match &plan.kind {
        PlanKind::Identity => {}
        PlanKind::Radial { rays, radii, fill } => {
            config.push(("rays", shape(*rays, "height")));
            config.push(("radii", shape(*radii, "width")));
            config.push(("fill", fill.to_string()));
        }
        PlanKind::Affine { ranges, fill } => {
            config.push(("ranges", format!("{ranges:?}")));
            config.push(("fill", fill.to_string()));
        }
    }
    print_config("expand", &config);
    if args.kind == ExpandKind::Identity && args.per_image != 1 {
        println!("note: identity expansion writes one copy per image; --per-image ignored");
    }
    let manifest = expand(&dataset, &plan)?;
    for (name, count) in manifest.classes.iter().zip(manifest.class_counts()) {
        println!("{name}: {count}");
    }
    println!(
        "total {} images; manifest {}",
        manifest.records.len(),
        args.out_dir.join(MANIFEST_FILE).display()
    );
    Ok(())
}

fn blit(canvas: &mut [u8], width: usize, top: usize, left: usize, cell: &Image) {
    for r in 0..cell.rows() {
        let row = &cell.pixels()[r * cell.cols()..(r + 1) * cell.cols()];
        let start = (top + r) * width + left;
        canvas[start..start + cell.cols()].copy_from_slice(row);
    }
}

fn cmd_montage(args: &MontageArgs) -> Result<(), CliError> {
    if args.inputs.is_empty() {
        return Err(CliError::Usage("montage needs at least one input".into()));
    }
    if args.cell == 0 {
        return Err(CliError::Usage("--cell must be positive".into()));
    }
    let images = args
        .inputs
        .iter()
        .map(read_image)
        .collect::<Result<Vec<_>, _>>()?;
    let sampler = AffineSampler::new(AffineRanges::default(), args.seed)?;
    let poles: Vec<Pole> = images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            pick_pole(
                derive_item_seed(args.seed, i as u64, 0),
                img.rows(),
                img.cols(),
            )
        })
        .collect();
    let pole_list: Vec<String> = poles.iter().map(|p| p.to_string()).collect();
    print_config(
        "montage",
        &[
            ("inputs", args.inputs.len().to_string()),
            ("cell", args.cell.to_string()),
            ("seed", args.seed.to_string()),
            ("fill", FillPolicy::from(args.fill).to_string()),
            ("poles", pole_list.join(" ")),
            ("out", args.out.display().to_string()),
        ],
    );
    let cell = args.cell;
    let width = cell * images.len();
    let mut canvas = vec![0u8; width * cell * 3];
    for (i, img) in images.iter().enumerate() {
        let p = sampler.draw_params(i as u64, img.rows(), img.cols());
        let affine = affine_transform(img, &p, args.fill.into())?;
        let params = RadialParams::for_image(img).with_fill(args.fill.into());
        let radial = radial_transform(img, poles[i], params)?.image;
        for (row, version) in [img, &affine, &radial].into_iter().enumerate() {
            let resized = version.resize_nearest(cell, cell).expect("positive cell");
            blit(&mut canvas, width, row * cell, i * cell, &resized);
        }
    }
    let grid = Image::new(cell * 3, width, canvas).expect("grid dimensions");
    write_image(&grid, &args.out)?;
    println!(
        "wrote {} ({}x{})",
        args.out.display(),
        grid.rows(),
        grid.cols()
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let manifest = read_manifest(&args.train_manifest).map_err(|e| match e {
        IoError::ManifestParse { .. } => CliError::Usage(e.to_string()),
        _ => CliError::Io(e.to_string()),
    })?;
    let test = load_dataset(&args.test_dir).map_err(|e| CliError::Usage(e.to_string()))?;
    let seeds = match &args.seeds {
        Some(range) => parse_seeds(range)?,
        None => vec![args.seed],
    };
    let model = match args.model {
        ModelKind::Centroid => ModelConfig::NearestCentroid {
            side: args.side,
            temperature: args.temperature,
        },
        ModelKind::Knn => ModelConfig::Knn {
            side: args.side,
            k: args.k,
        },
    };
    let inference = match args.inference {
        InferenceArg::Auto => InferenceMode::Auto,
        InferenceArg::Direct => InferenceMode::Direct,
        InferenceArg::Vote => InferenceMode::Vote,
    };
    let train_root = args.train_manifest.parent().unwrap_or(Path::new("."));
    let seed_text = match (seeds.first(), seeds.last()) {
        (Some(a), Some(b)) if seeds.len() > 1 => format!("{a}..{b}"),
        _ => args.seed.to_string(),
    };
    print_config(
        "eval",
        &[
            ("train_manifest", args.train_manifest.display().to_string()),
            ("train_records", manifest.records.len().to_string()),
            ("test_dir", args.test_dir.display().to_string()),
            ("test_images", test.items.len().to_string()),
            ("classes", test.classes.join(",")),
            ("model", model.describe()),
            ("inference", format!("{:?}", args.inference).to_lowercase()),
            ("poles", args.poles.to_string()),
            ("seeds", seed_text),
            ("workers", args.workers.to_string()),
            (
                "report",
                args.report
                    .as_ref()
                    .map_or("none".into(), |p| p.display().to_string()),
            ),
        ],
    );

    let mut reports: Vec<EvalReport> = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let config = ExperimentConfig {
            model,
            inference,
            poles: args.poles,
            seed,
            workers: args.workers,
        };
        let report = run_experiment(&manifest, train_root, &test, &config)?;
        println!();
        print!("{}", report.to_table());
        reports.push(report);
    }
    if let Some(path) = &args.report {
        let io_err = |e: std::io::Error| {
            CliError::Io(format!("cannot write report {}: {e}", path.display()))
        };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        for report in &reports {
            report.write_structured(&mut w).map_err(io_err)?;
        }
    }
    if reports.len() > 1 {
        let agg = AggregateReport::from_reports(&reports)?;
        println!();
        print!("{}", agg.to_table());
        println!("{}", agg.summary_line());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Montage(a) => cmd_montage(a),
        Command::Eval(a) => cmd_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
