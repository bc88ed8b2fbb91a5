use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fullquat::autoencoder::{load_model, save_model};
use fullquat::codec::BLOCK_SIZES;
use fullquat::harness::{
    format_summary, load_labeled, run_sweep, summarize, time_block_sizes, train_from_manifest, training_log, RankSpec,
    SweepSpec,
};
use fullquat::imageio::{list_images, load_image, save_image, split_corpus, CorpusManifest, ImageFormat, Split};
use fullquat::metrics::{write_rows, QualityReport};
use fullquat::{compress, decompress, CodecParams, CompressedContainer, Error, Mode, PairModel, TrainConfig};

#[derive(Parser)]
#[command(name = "fullquat", version, about = "Full-quaternion block QSVD image compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a corpus, train the pixel-pair model, report held-out quality.
    Train(TrainArgs),
    /// Compress an image into a container.
    Compress(CompressArgs),
    /// Decompress a container into an image.
    Decompress(DecompressArgs),
    /// Compare two images.
    Eval(EvalArgs),
    /// Evaluate every (image, mode, n, t) combination and write CSV.
    Sweep(SweepArgs),
    /// Median QSVD time of one image per block size.
    Timing(TimingArgs),
    /// Write a seeded 60/40 train/test manifest for a directory.
    SplitCorpus(SplitArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Directory of PNG/PPM images.
    corpus: PathBuf,
    /// key=value training configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed (used for the split and initialization).
    #[arg(long)]
    seed: Option<u64>,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch loss log; defaults to `<out>.log.csv`.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, default_value = "full")]
    mode: Mode,
    #[arg(short = 'n', long = "block-size", default_value_t = 64)]
    block_size: usize,
    #[arg(short = 't', long)]
    rank: usize,
}

#[derive(Args)]
struct CompressArgs {
    image: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Decode the result and print quality against the input.
    #[arg(long)]
    evaluate: bool,
}

#[derive(Args)]
struct DecompressArgs {
    container: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output image; `.png` or `.ppm`.
    #[arg(long)]
    out: PathBuf,
    /// Original image to report quality against.
    #[arg(long)]
    evaluate: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    original: PathBuf,
    decoded: PathBuf,
    /// Container whose size gives the compression ratio.
    #[arg(long)]
    container: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Directory of images; all of them are used.
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    corpus: Option<PathBuf>,
    /// Manifest; its test split is used.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "full,pure")]
    modes: Vec<Mode>,
    #[arg(short = 'n', long = "block-size", value_delimiter = ',', default_values_t = BLOCK_SIZES)]
    block_sizes: Vec<usize>,
    /// Explicit ranks; overrides `--fractions`.
    #[arg(short = 't', long = "rank", value_delimiter = ',')]
    ranks: Vec<usize>,
    /// Ranks as fractions of the block size.
    #[arg(long, value_delimiter = ',', default_value = "1/16,1/8,1/4,1/2")]
    fractions: Vec<String>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct TimingArgs {
    image: PathBuf,
    #[arg(long, default_value = "full")]
    mode: Mode,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(short = 'n', long = "block-size", value_delimiter = ',', default_values_t = BLOCK_SIZES)]
    block_sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
}

#[derive(Args)]
struct SplitArgs {
    corpus: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}

fn read_model(path: &Path) -> Result<PairModel, Error> {
    load_model(&fs::read(path)?)
}

/// Loads `--model` if given; full mode refuses to run without one.
fn model_for(mode: Mode, path: Option<&Path>) -> Result<Option<PairModel>, Error> {
    match (mode, path) {
        (_, Some(p)) => Ok(Some(read_model(p)?)),
        (Mode::Full, None) => Err(usage("full mode requires --model")),
        (Mode::Pure, None) => Ok(None),
    }
}

fn parse_fraction(s: &str) -> Result<(usize, usize), Error> {
    let (num, den) = s.split_once('/').ok_or_else(|| usage(format!("fraction {s:?} is not num/den")))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| usage(format!("fraction {s:?} is not num/den")));
    Ok((parse(num)?, parse(den)?))
}

fn train_cmd(a: TrainArgs) -> Result<(), Error> {
    let mut cfg = match &a.config {
        Some(p) => TrainConfig::parse_kv(&fs::read_to_string(p)?)?,
        None => TrainConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let manifest = split_corpus(&list_images(&a.corpus)?, cfg.seed)?;
    let result = train_from_manifest(&manifest, &cfg)?;
    fs::write(&a.out, save_model(&result.outcome.model))?;
    let log = a.log.unwrap_or_else(|| with_suffix(&a.out, ".log.csv"));
    fs::write(&log, training_log(&result.outcome.loss_history))?;
    manifest.save(with_suffix(&a.out, ".manifest"))?;
    println!(
        "trained on {} images, {} epochs ({}), final loss {:.6e}",
        manifest.count(Split::Train),
        result.outcome.loss_history.len(),
        if result.outcome.converged { "converged" } else { "epoch cap" },
        result.outcome.loss_history.last().copied().unwrap_or(f64::NAN)
    );
    println!("held-out ({} images): {}", manifest.count(Split::Test), result.held_out.mean);
    Ok(())
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn compress_cmd(a: CompressArgs) -> Result<(), Error> {
    let params = CodecParams::new(a.codec.block_size, a.codec.rank, a.codec.mode)?;
    let model = model_for(params.mode, a.model.as_deref())?;
    let img = load_image(&a.image)?;
    let c = compress(&img, model.as_ref(), &params)?;
    let bytes = c.to_bytes();
    fs::write(&a.out, &bytes)?;
    println!("{} -> {} ({} bytes)", a.image.display(), a.out.display(), bytes.len());
    if a.evaluate {
        let decoded = decompress(&c, model.as_ref())?;
        println!("{}", QualityReport::with_size(&img, &decoded, bytes.len())?);
    }
    Ok(())
}

fn decompress_cmd(a: DecompressArgs) -> Result<(), Error> {
    let bytes = fs::read(&a.container)?;
    let c = CompressedContainer::from_bytes(&bytes)?;
    let model = model_for(c.header.mode, a.model.as_deref())?;
    let img = decompress(&c, model.as_ref())?;
    save_image(&img, &a.out, ImageFormat::from_path(&a.out))?;
    println!("{} -> {} ({}x{})", a.container.display(), a.out.display(), img.width(), img.height());
    if let Some(orig) = a.evaluate {
        println!("{}", QualityReport::with_size(&load_image(orig)?, &img, bytes.len())?);
    }
    Ok(())
}

fn eval_cmd(a: EvalArgs) -> Result<(), Error> {
    let (orig, dec) = (load_image(&a.original)?, load_image(&a.decoded)?);
    let report = match a.container {
        Some(p) => QualityReport::with_size(&orig, &dec, fs::metadata(p)?.len() as usize)?,
        None => QualityReport::compare(&orig, &dec)?,
    };
    println!("{report}");
    Ok(())
}

fn sweep_cmd(a: SweepArgs) -> Result<(), Error> {
    let ranks = if a.ranks.is_empty() {
        RankSpec::Fractions(a.fractions.iter().map(|f| parse_fraction(f)).collect::<Result<_, _>>()?)
    } else {
        RankSpec::Explicit(a.ranks)
    };
    let spec = SweepSpec {
        modes: a.modes,
        block_sizes: a.block_sizes,
        ranks,
        reps: a.reps,
    };
    spec.validate()?;
    let paths: Vec<PathBuf> = match (&a.corpus, &a.manifest) {
        (Some(dir), _) => list_images(dir)?,
        (None, Some(m)) => CorpusManifest::load(m)?.paths(Split::Test).map(Path::to_path_buf).collect(),
        (None, None) => unreachable!("clap requires one of --corpus/--manifest"),
    };
    if paths.is_empty() {
        return Err(usage("sweep corpus is empty"));
    }
    let model = match &a.model {
        Some(p) => Some(read_model(p)?),
        None if spec.modes.contains(&Mode::Full) => return Err(usage("full mode requires --model")),
        None => None,
    };
    let images = load_labeled(paths.iter().map(PathBuf::as_path))?;
    let outcome = run_sweep(&images, model.as_ref(), &spec)?;
    write_rows(fs::File::create(&a.csv)?, &outcome.rows)?;
    for f in &outcome.failures {
        let t = f.t.map_or("*".to_string(), |t| t.to_string());
        eprintln!("failed: {} {} n={} t={t}: {}", f.image, f.mode, f.n, f.message);
    }
    print!("{}", format_summary(&summarize(&outcome.rows)));
    println!("{} rows, {} failures -> {}", outcome.rows.len(), outcome.failures.len(), a.csv.display());
    Ok(())
}

fn timing_cmd(a: TimingArgs) -> Result<(), Error> {
    for &n in &a.block_sizes {
        CodecParams::new(n, 1, a.mode)?;
    }
    let model = model_for(a.mode, a.model.as_deref())?;
    let img = load_image(&a.image)?;
    let table = time_block_sizes(&img, model.as_ref(), a.mode, &a.block_sizes, a.reps)?;
    println!("n      median_qsvd_seconds");
    for (n, s) in &table.entries {
        println!("{n:<6} {s:.6}");
    }
    println!("argmin n = {}", table.argmin());
    Ok(())
}

fn split_cmd(a: SplitArgs) -> Result<(), Error> {
    let m = split_corpus(&list_images(&a.corpus)?, a.seed)?;
    m.save(&a.out)?;
    println!("{} train / {} test -> {}", m.count(Split::Train), m.count(Split::Test), a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Train(a) => train_cmd(a),
        Command::Compress(a) => compress_cmd(a),
        Command::Decompress(a) => decompress_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Timing(a) => timing_cmd(a),
        Command::SplitCorpus(a) => split_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
