mod presets;

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarlab::channels::{variance_to_snr_db, ChannelModel};
use polarlab::construction::{
    bec_profile, interp_code_with, permuted_code, union_bound, AlphaScaling, CodeSpec,
    LayerPermutation,
};
use polarlab::decoders::Decoder;
use polarlab::montecarlo::{
    grid, proposition2_check, random_code_reference, run_point, run_sweep_with, with_workers,
    write_csv, DesignMode, Record, SimEstimate, SweepFamily, SweepPlan, SweepRow,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use presets::{figure, DEFAULT_TRIALS, FIGURES};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] polarlab::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "polarlab", version, about = "Polar / Reed-Muller interpolating codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its specification.
    Construct(ConstructArgs),
    /// Estimate the block error probability at one point.
    Simulate(SimulateArgs),
    /// Run a parameter sweep and write a CSV table.
    Sweep(SweepArgs),
    /// Emit the random-code MAP reference curve over the BEC.
    RandomRef(RandomRefArgs),
    /// Compare MAP on a layer-permuted code with SC on the original.
    Prop2(Prop2Args),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl From<Toggle> for bool {
    fn from(t: Toggle) -> bool {
        matches!(t, Toggle::On)
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Scaling {
    #[default]
    NoiseVariance,
    Bhattacharyya,
}

impl From<Scaling> for AlphaScaling {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::NoiseVariance => AlphaScaling::NoiseVariance,
            Scaling::Bhattacharyya => AlphaScaling::Bhattacharyya,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    /// Parameters are erasure probabilities.
    Bec,
    /// Parameters are SNRs in dB.
    Bawgn,
}

impl From<Family> for SweepFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Bec => SweepFamily::Bec,
            Family::Bawgn => SweepFamily::BawgnSnrDb,
        }
    }
}

/// A list `a,b,c` or a range `start:stop:step`.
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => grid(num(start)?, num(stop)?, num(step)?).map_err(|e| e.to_string())?,
        [_] => s.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("bad grid '{s}'")),
    };
    Ok(Grid(values))
}

#[derive(Args)]
struct RunArgs {
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    rate: f64,
    /// Base channel, e.g. `bec:0.5` or `bawgn:0.6309`.
    #[arg(long)]
    channel: ChannelModel,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t)]
    scaling: Scaling,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Code specification file; replaces the construction flags.
    #[arg(long, conflicts_with_all = ["n", "rate", "alpha", "design"])]
    code: Option<PathBuf>,
    #[arg(long, required_unless_present = "code")]
    n: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Transmission channel.
    #[arg(long)]
    channel: ChannelModel,
    /// Design channel; defaults to the transmission channel.
    #[arg(long)]
    design: Option<ChannelModel>,
    /// `map`, `sc`, `scl:L`, `bp` or `bp:ITER`.
    #[arg(long)]
    decoder: Decoder,
    #[arg(long, value_enum, default_value_t)]
    scaling: Scaling,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Load the grids of a published figure.
    #[arg(long, value_parser = clap::value_parser!(u8).range(*FIGURES.start() as i64..=*FIGURES.end() as i64))]
    figure: Option<u8>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_parser = parse_grid)]
    alphas: Option<Grid>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Erasure probabilities or SNRs in dB.
    #[arg(long, value_parser = parse_grid)]
    params: Option<Grid>,
    #[arg(long, value_delimiter = ',')]
    decoders: Option<Vec<Decoder>>,
    /// Fixed design channel, used when per-point redesign is off.
    #[arg(long)]
    design: Option<ChannelModel>,
    #[arg(long, value_enum)]
    paired: Option<Toggle>,
    #[arg(long, value_enum)]
    redesign_per_point: Option<Toggle>,
    #[arg(long, value_enum, default_value_t)]
    scaling: Scaling,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RandomRefArgs {
    /// Block length N.
    #[arg(long)]
    len: usize,
    /// Dimension k.
    #[arg(long)]
    dim: usize,
    /// Erasure probabilities.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Prop2Args {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long)]
    epsilon: f64,
    /// One-based layer permutation, e.g. `2,1,3`; random when absent.
    #[arg(long, value_delimiter = ',')]
    perm: Option<Vec<usize>>,
    /// Seed for drawing the permutation; defaults to `--seed`.
    #[arg(long)]
    perm_seed: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

/// Writes `text` to `out` only once it is complete.
fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn csv_text(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

/// Grid coordinate of a transmission channel: ε, or SNR in dB.
fn channel_param(c: &ChannelModel) -> f64 {
    match c.split().0 {
        ChannelModel::Bec(e) => *e,
        ChannelModel::Bawgn(v) => variance_to_snr_db(*v),
        ChannelModel::ConvexPerfect { .. } => f64::NAN,
    }
}

fn point_record(family: &str, spec: &CodeSpec, channel: &ChannelModel, decoder: &Decoder, est: &SimEstimate) -> Record {
    Record {
        family: family.into(),
        alpha: Some(spec.alpha()),
        n: Some(spec.n()),
        rate: spec.rate(),
        channel: channel.to_string(),
        param: channel_param(channel),
        decoder: decoder.name().into(),
        list: decoder.list_size(),
        max_iter: decoder.max_iter(),
        trials: Some(est.trials),
        errors: Some(est.errors),
        pe: est.pe,
        ci: Some((est.ci_lo, est.ci_hi)),
        seed: Some(est.seed),
    }
}

fn check_trials(trials: u64, workers: Option<usize>) -> CliResult<()> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    Ok(())
}

fn construct(a: ConstructArgs) -> CliResult<()> {
    let spec = interp_code_with(a.n, a.rate, &a.channel, a.alpha, a.scaling.into()).map_err(usage)?;
    eprintln!("dimension: {} of {}", spec.dimension(), spec.len());
    eprintln!("realized rate: {}", spec.realized_rate());
    if let ChannelModel::Bec(e) = a.channel {
        let z = bec_profile(a.n, e)?;
        let picked = spec.info_set().iter().map(|&i| z.scores()[i]);
        let (lo, hi) = picked.fold((f64::INFINITY, 0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        eprintln!("selected Z at epsilon={e}: min {lo:.6e}, max {hi:.6e}");
        eprintln!("union bound at epsilon={e}: {:.6e}", union_bound(&spec, e)?.value());
    }
    emit(a.out.as_deref(), &spec.to_string())
}

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let trials = a.run.trials.unwrap_or(DEFAULT_TRIALS);
    check_trials(trials, a.run.workers)?;
    let spec = match &a.code {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?
            .parse::<CodeSpec>()
            .map_err(usage)?,
        None => {
            let n = a.n.expect("required by clap");
            let design = a.design.as_ref().unwrap_or_else(|| a.channel.split().0);
            interp_code_with(n, a.rate, design, a.alpha, a.scaling.into()).map_err(usage)?
        }
    };
    a.decoder.validate().map_err(usage)?;
    if !a.decoder.supports(a.channel.family()) {
        return Err(usage(format!("decoder {} cannot run over {}", a.decoder, a.channel)));
    }
    let est = with_workers(a.run.workers, || run_point(&spec, &a.channel, &a.decoder, trials, a.run.seed))??;
    eprintln!("pe {:.6e} [{:.6e}, {:.6e}] in {:.2?}", est.pe, est.ci_lo, est.ci_hi, est.wall_time);
    let record = point_record("interp", &spec, &a.channel, &a.decoder, &est);
    emit(a.run.out.as_deref(), &csv_text(&[record]))
}

fn sweep_plan(a: &SweepArgs) -> CliResult<SweepPlan> {
    let preset = match a.figure {
        Some(k) => figure(k)?,
        None => None,
    };
    let missing = |flag: &str| usage(format!("{flag} is required without --figure"));
    let n = a.n.or(preset.as_ref().map(|p| p.n)).ok_or_else(|| missing("--n"))?;
    let rate = a.rate.or(preset.as_ref().map(|p| p.rate)).unwrap_or(0.5);
    let alphas = match (&a.alphas, &preset) {
        (Some(g), _) => g.0.clone(),
        (None, Some(p)) => p.alphas.clone(),
        (None, None) => return Err(missing("--alphas")),
    };
    let params = match (&a.params, &preset) {
        (Some(g), _) => g.0.clone(),
        (None, Some(p)) => p.params.clone(),
        (None, None) => return Err(missing("--params")),
    };
    let decoders = match (&a.decoders, &preset) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => p.decoders.clone(),
        (None, None) => return Err(missing("--decoders")),
    };
    let family = match (a.family, &preset) {
        (Some(f), _) => f.into(),
        (None, Some(p)) => p.family,
        (None, None) => SweepFamily::Bec,
    };
    let design = a.design.clone().or_else(|| preset.as_ref().and_then(|p| p.design.clone()));
    let redesign = match a.redesign_per_point {
        Some(t) => t.into(),
        None => a.design.is_none() && preset.as_ref().is_none_or(|p| p.design.is_none()),
    };
    let design = match (redesign, design) {
        (true, _) if a.design.is_some() => {
            return Err(usage("--design requires --redesign-per-point off"))
        }
        (true, _) => DesignMode::PerPoint,
        (false, Some(c)) => DesignMode::Fixed(c),
        (false, None) => return Err(usage("--redesign-per-point off requires --design")),
    };
    let trials = a.run.trials.unwrap_or(DEFAULT_TRIALS);
    check_trials(trials, a.run.workers)?;
    let plan = SweepPlan {
        n,
        rate,
        alphas,
        family,
        params,
        decoders,
        trials,
        seed: a.run.seed,
        paired: a.paired.is_none_or(bool::from),
        design,
        scaling: a.scaling.into(),
        workers: a.run.workers,
    };
    plan.validate().map_err(usage)?;
    if let DesignMode::Fixed(c) = &plan.design {
        interp_code_with(n, rate, c, plan.alphas[0], plan.scaling).map_err(usage)?;
    }
    Ok(plan)
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let plan = sweep_plan(&a)?;
    let total = plan.alphas.len() * plan.params.len() * plan.decoders.len();
    let done = AtomicUsize::new(0);
    let rows = run_sweep_with(&plan, |r: &SweepRow| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!(
            "[{k}/{total}] alpha={} {} {} errors={} pe={:.3e}",
            r.alpha, r.channel, r.decoder, r.estimate.errors, r.estimate.pe
        );
    })?;
    let records: Vec<Record> = rows.iter().map(Record::from).collect();
    emit(a.run.out.as_deref(), &csv_text(&records))
}

fn random_ref(a: RandomRefArgs) -> CliResult<()> {
    let curve = random_code_reference(a.len, a.dim, &a.grid.0).map_err(usage)?;
    let records: Vec<Record> = curve
        .into_iter()
        .map(|(eps, pe)| Record {
            family: "random".into(),
            alpha: None,
            n: a.len.is_power_of_two().then(|| a.len.trailing_zeros()),
            rate: a.dim as f64 / a.len as f64,
            channel: ChannelModel::Bec(eps).to_string(),
            param: eps,
            decoder: "random-map".into(),
            list: None,
            max_iter: None,
            trials: None,
            errors: None,
            pe,
            ci: None,
            seed: None,
        })
        .collect();
    emit(a.out.as_deref(), &csv_text(&records))
}

fn prop2(a: Prop2Args) -> CliResult<()> {
    let trials = a.run.trials.unwrap_or(DEFAULT_TRIALS);
    check_trials(trials, a.run.workers)?;
    let channel = ChannelModel::bec(a.epsilon).map_err(usage)?;
    let spec = interp_code_with(a.n, a.rate, &channel, 1.0, AlphaScaling::default()).map_err(usage)?;
    let pi = match a.perm {
        Some(map) => LayerPermutation::new(map).map_err(usage)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.perm_seed.unwrap_or(a.run.seed));
            LayerPermutation::random(a.n, &mut rng)
        }
    };
    permuted_code(&spec, &pi).map_err(usage)?;
    let report = with_workers(a.run.workers, || proposition2_check(&spec, &pi, a.epsilon, trials, a.run.seed))??;
    eprintln!("permutation: {:?}", pi.mapping());
    eprintln!(
        "MAP(permuted) {:.6e} vs SC(original) {:.6e}: {}",
        report.map.pe,
        report.sc.pe,
        if report.holds { "holds" } else { "violated" }
    );
    let records = [
        point_record("permuted", &report.permuted, &channel, &Decoder::Map, &report.map),
        point_record("interp", &spec, &channel, &Decoder::Sc, &report.sc),
    ];
    emit(a.run.out.as_deref(), &csv_text(&records))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::RandomRef(a) => random_ref(a),
        Command::Prop2(a) => prop2(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
