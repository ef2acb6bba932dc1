//! `scos` command-line tool.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 saturation (a traversal hit its node limit).

mod config;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scos::baseline::{DscfConfig, SclConfig};
use scos::bench::{
    csv_row, estimate_bias, estimate_bit_channel_bias, fmt_g, lemma1_bound, ml_crosscheck,
    pm_histogram, run_point, DecoderConfig, SimConfig, CSV_HEADER,
};
use scos::codes::{
    crc_polar_spec, pac_code, parse_taps, polar_info_set_pw, rm_info_set, rm_polar_info_set,
    sample_drm_polar, Provenance, PW_BETA,
};
use scos::scos::{Bias, BiasHeader, BiasProfile, ScosConfig};
use scos::{CodeSpec, CrcSpec};

use config::{
    parse_auto, parse_bias, parse_estimator, parse_real, BiasSource, Estimator, FileConfig,
};

#[derive(Parser)]
#[command(
    name = "scos",
    version,
    about = "Ordered-search decoding of G_N-coset codes"
)]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat TOML config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its spec file.
    Construct(ConstructArgs),
    /// Frame error rate simulation; CSV rows go to stdout as points finish.
    Simulate(SimulateArgs),
    /// Estimate a search bias profile by genie-aided SC.
    Bias(BiasArgs),
    /// Histogram of the transmitted word's path metric.
    Histogram(HistogramArgs),
    /// Compare the unbounded search's visits with the node-set bound.
    Vset(VsetArgs),
    /// Check the unbounded search against exhaustive ML decoding.
    MlCrosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Rm,
    PolarPw,
    RmPolar,
    Pac,
    DrmPolar,
    CrcPolar,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    rule: Rule,
    /// log2 of the block length.
    #[arg(long, visible_alias = "m")]
    n: usize,
    /// Information length (payload length for crc-polar).
    #[arg(long)]
    k: Option<usize>,
    /// Reed-Muller order.
    #[arg(long)]
    r: Option<usize>,
    /// Convolution taps for pac, e.g. 011011.
    #[arg(long)]
    g: Option<String>,
    /// Polarization-weight base.
    #[arg(long)]
    beta: Option<f64>,
    /// CRC generator taps, highest degree first (default x^7+x^6+x^5+x^2+1).
    #[arg(long)]
    crc: Option<String>,
    /// File name without extension.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Code spec file.
    #[arg(long)]
    code: Option<PathBuf>,
    /// sc, scos, scl or dscf.
    #[arg(long)]
    decoder: Option<String>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snr: Option<Vec<f64>>,
    /// Maximum frames per point.
    #[arg(long, alias = "max-frames")]
    frames: Option<u64>,
    #[arg(long)]
    min_frames: Option<u64>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    /// Visit budget as a multiple of N, or inf.
    #[arg(long)]
    lambda_max_ratio: Option<String>,
    /// List capacity, or auto.
    #[arg(long)]
    eta: Option<String>,
    /// Largest accepted path metric, or inf.
    #[arg(long)]
    m_max: Option<String>,
    /// zero, auto or profile:<path>.
    #[arg(long)]
    bias: Option<String>,
    /// Frames used when the bias is estimated.
    #[arg(long)]
    bias_frames: Option<u64>,
    /// first-error or bit-channel.
    #[arg(long)]
    bias_estimator: Option<String>,
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    flip_order_max: Option<usize>,
    /// Send the all-zero word.
    #[arg(long)]
    all_zero: bool,
}

#[derive(Args)]
struct BiasArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    #[arg(long)]
    frames: Option<u64>,
    /// first-error or bit-channel.
    #[arg(long)]
    estimator: Option<String>,
}

#[derive(Args)]
struct HistogramArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    bin_width: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    /// Report the mass at or above this metric.
    #[arg(long)]
    tail: Option<f64>,
}

#[derive(Args)]
struct VsetArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    #[arg(long)]
    frames: Option<u64>,
    /// Per-frame traversal limit.
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<u64>,
}

enum Failure {
    Config(String),
    Runtime(String),
    Saturated(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Saturated(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Saturated(m) => m,
        }
    }
}

impl From<scos::Error> for Failure {
    fn from(e: scos::Error) -> Self {
        match e {
            scos::Error::Io(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn cfg_err<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Config(msg.into()))
}

/// Global settings after merging flags with the config file.
struct Context {
    file: FileConfig,
    seed: u64,
    workers: usize,
    out: Option<PathBuf>,
}

impl Context {
    fn new(cli: &Cli) -> Outcome<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p).map_err(Failure::Config)?,
            None => FileConfig::default(),
        };
        let workers = cli.workers.or(file.workers).unwrap_or(1);
        if workers == 0 {
            return cfg_err("workers must be >= 1");
        }
        Ok(Self {
            seed: cli.seed.or(file.seed).unwrap_or(0),
            workers,
            out: cli.out.clone(),
            file,
        })
    }

    fn code(&self, flag: &Option<PathBuf>) -> Outcome<CodeSpec> {
        let Some(path) = flag.clone().or_else(|| self.file.code.clone()) else {
            return cfg_err("no code spec given (use --code or the `code` key)");
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(CodeSpec::from_toml(&text)?)
    }

    fn one_snr(&self, flag: Option<f64>) -> Outcome<f64> {
        match flag {
            Some(s) => Ok(s),
            None => match self.file.snr.clone().map(|p| p.into_vec()).as_deref() {
                Some([s]) => Ok(*s),
                Some(_) => cfg_err("this command takes a single SNR point"),
                None => cfg_err("no SNR given (use --snr or the `snr` key)"),
            },
        }
    }

    fn snr_list(&self, flag: &Option<Vec<f64>>) -> Option<Vec<f64>> {
        flag.clone()
            .or_else(|| self.file.snr.clone().map(|p| p.into_vec()))
    }

    fn frames(&self, flag: Option<u64>, default: u64) -> u64 {
        flag.or(self.file.frames).unwrap_or(default)
    }

    /// Output directory, created on demand.
    fn out_dir(&self) -> Outcome<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    let ctx = Context::new(cli)?;
    match &cli.cmd {
        Command::Construct(a) => construct(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Bias(a) => bias(&ctx, a),
        Command::Histogram(a) => histogram(&ctx, a),
        Command::Vset(a) => vset(&ctx, a),
        Command::MlCrosscheck(a) => crosscheck(&ctx, a),
    }
}

fn need<T>(v: Option<T>, flag: &str, rule: &str) -> Outcome<T> {
    v.ok_or_else(|| Failure::Config(format!("{rule} needs --{flag}")))
}

/// Reed-Muller order whose code has dimension `k`.
fn rm_order_for(n: usize, k: usize) -> Outcome<usize> {
    for r in 0..=n {
        if rm_info_set(r, n)?.len() == k {
            return Ok(r);
        }
    }
    cfg_err(format!("no RM(r, {n}) code has dimension {k}"))
}

fn build_code(ctx: &Context, a: &ConstructArgs) -> Outcome<(CodeSpec, &'static str)> {
    let n = a.n;
    let beta = a.beta.unwrap_or(PW_BETA);
    let prov = |rule: &str, r: Option<usize>, beta: Option<f64>| Provenance {
        rule: rule.into(),
        r,
        beta,
        ..Provenance::default()
    };
    Ok(match a.rule {
        Rule::Rm => {
            let r = need(a.r, "r", "rm")?;
            let spec = CodeSpec::with_info_set(n, rm_info_set(r, n)?)?;
            (spec.with_provenance(prov("rm", Some(r), None)), "rm")
        }
        Rule::PolarPw => {
            let k = need(a.k, "k", "polar-pw")?;
            let spec = CodeSpec::with_info_set(n, polar_info_set_pw(n, k, beta)?)?;
            (
                spec.with_provenance(prov("polar-pw", None, Some(beta))),
                "polar_pw",
            )
        }
        Rule::RmPolar => {
            let k = need(a.k, "k", "rm-polar")?;
            let r = need(a.r, "r", "rm-polar")?;
            let spec = CodeSpec::with_info_set(n, rm_polar_info_set(n, r, k, beta)?)?;
            (
                spec.with_provenance(prov("rm-polar", Some(r), Some(beta))),
                "rm_polar",
            )
        }
        Rule::Pac => {
            let g = parse_taps(&need(a.g.clone(), "g", "pac")?)?;
            let r = match (a.r, a.k) {
                (Some(r), None) => r,
                (None, Some(k)) => rm_order_for(n, k)?,
                (Some(r), Some(k)) => {
                    if rm_info_set(r, n)?.len() != k {
                        return cfg_err(format!("RM({r}, {n}) does not have dimension {k}"));
                    }
                    r
                }
                (None, None) => return cfg_err("pac needs --k or --r"),
            };
            (pac_code(n, r, &g)?, "pac")
        }
        Rule::DrmPolar => {
            let k = need(a.k, "k", "drm-polar")?;
            let base = match a.r {
                Some(r) => CodeSpec::with_info_set(n, rm_polar_info_set(n, r, k, beta)?)?
                    .with_provenance(prov("rm-polar", Some(r), Some(beta))),
                None => CodeSpec::with_info_set(n, polar_info_set_pw(n, k, beta)?)?
                    .with_provenance(prov("polar-pw", None, Some(beta))),
            };
            (sample_drm_polar(&base, ctx.seed)?, "drm_polar")
        }
        Rule::CrcPolar => {
            let k = need(a.k, "k", "crc-polar")?;
            let crc = match &a.crc {
                Some(t) => CrcSpec::from_bit_string(t)?,
                None => CrcSpec::crc7(),
            };
            (crc_polar_spec(n, k, crc, beta)?, "crc_polar")
        }
    })
}

fn construct(ctx: &Context, a: &ConstructArgs) -> Outcome<()> {
    let (spec, stem) = build_code(ctx, a)?;
    let name = a
        .name
        .clone()
        .unwrap_or_else(|| format!("{stem}_{}_{}", spec.len(), spec.k()));
    let path = ctx.out_dir()?.join(format!("{name}.toml"));
    fs::write(&path, spec.to_toml())?;
    let p = spec.provenance();
    let mut line = format!(
        "N={} K={} rate={} rule={}",
        spec.len(),
        spec.k(),
        fmt_g(spec.rate()),
        p.rule
    );
    if let Some(r) = p.r {
        line += &format!(" r={r}");
    }
    if let Some(b) = p.beta {
        line += &format!(" beta={}", fmt_g(b));
    }
    if let Some(g) = &p.g {
        line += &format!(" g={g}");
    }
    if let Some(s) = p.seed {
        line += &format!(" seed={s}");
    }
    if let Some(c) = spec.crc() {
        line += &format!(" crc={}", c.to_bit_string());
    }
    println!("{line} hash={}", spec.content_hash());
    println!("wrote {}", path.display());
    Ok(())
}

fn estimator_name(e: Estimator) -> &'static str {
    match e {
        Estimator::FirstError => "first-error",
        Estimator::BitChannel => "bit-channel",
    }
}

fn bias_file_name(spec: &CodeSpec, snr: f64, est: Estimator) -> String {
    format!(
        "bias_{}_{}_{}.csv",
        spec.content_hash(),
        fmt_g(snr),
        estimator_name(est)
    )
}

fn estimate(
    spec: &CodeSpec,
    snr: f64,
    frames: u64,
    seed: u64,
    workers: usize,
    est: Estimator,
) -> Outcome<BiasProfile> {
    Ok(match est {
        Estimator::FirstError => estimate_bias(spec, snr, frames, seed, workers)?,
        Estimator::BitChannel => estimate_bit_channel_bias(spec, snr, frames, seed, workers)?,
    })
}

fn read_profile(path: &Path) -> Outcome<(BiasProfile, BiasHeader)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(BiasProfile::from_text(&text)?)
}

/// Profile for one SNR point: reuses a cached file with matching metadata,
/// otherwise estimates (and caches when an output directory is set).
fn auto_profile(
    ctx: &Context,
    spec: &CodeSpec,
    snr: f64,
    frames: u64,
    est: Estimator,
) -> Outcome<BiasProfile> {
    let want = BiasHeader {
        code_hash: spec.content_hash(),
        snr_db: snr,
        frames,
        seed: ctx.seed,
    };
    let cache = match &ctx.out {
        Some(_) => Some(ctx.out_dir()?.join(bias_file_name(spec, snr, est))),
        None => None,
    };
    if let Some(path) = cache.as_ref().filter(|p| p.exists()) {
        if let Ok((profile, header)) = read_profile(path) {
            if header == want && profile.len() == spec.len() {
                return Ok(profile);
            }
        }
    }
    let profile = estimate(spec, snr, frames, ctx.seed, ctx.workers, est)?;
    if let Some(path) = cache {
        fs::write(path, profile.to_text(&want))?;
    }
    Ok(profile)
}

fn simulate(ctx: &Context, a: &SimulateArgs) -> Outcome<()> {
    let f = &ctx.file;
    let spec = ctx.code(&a.code)?;
    let len = spec.len();
    let Some(snr) = ctx.snr_list(&a.snr) else {
        return cfg_err("no SNR points given (use --snr or the `snr` key)");
    };
    let decoder = a
        .decoder
        .clone()
        .or_else(|| f.decoder.clone())
        .unwrap_or_else(|| "scos".into());
    let mut sim = SimConfig::new(spec.clone(), DecoderConfig::Sc, snr.clone());
    sim.max_frames = a
        .frames
        .or(f.max_frames)
        .or(f.frames)
        .unwrap_or(sim.max_frames);
    sim.min_frames = a.min_frames.or(f.min_frames).unwrap_or(sim.min_frames);
    sim.min_frame_errors = a
        .min_frame_errors
        .or(f.min_frame_errors)
        .unwrap_or(sim.min_frame_errors);
    sim.seed = ctx.seed;
    sim.workers = ctx.workers;
    sim.all_zero = a.all_zero || f.all_zero.unwrap_or(false);

    // one decoder config per point, since an estimated bias depends on the SNR
    let decoders: Vec<DecoderConfig> = match decoder.as_str() {
        "sc" => vec![DecoderConfig::Sc; snr.len()],
        "scl" => {
            let l = a.list_size.or(f.list_size).unwrap_or(16);
            vec![DecoderConfig::Scl(SclConfig::new(l)?); snr.len()]
        }
        "dscf" => {
            let t_max = a.t_max.or(f.t_max).unwrap_or(70);
            let alpha = a.alpha.or(f.alpha).unwrap_or(0.45);
            let order = a.flip_order_max.or(f.flip_order_max).unwrap_or(3);
            let c = DscfConfig::new(t_max, alpha)?.with_max_order(order)?;
            vec![DecoderConfig::Dscf(c); snr.len()]
        }
        "scos" => {
            let ratio = match &a.lambda_max_ratio {
                Some(s) => parse_real(s).map_err(Failure::Config)?,
                None => match &f.lambda_max_ratio {
                    Some(r) => r.value().map_err(Failure::Config)?,
                    None => f64::INFINITY,
                },
            };
            let mut base = ScosConfig::with_budget_ratio(ratio, len)?;
            let eta = match &a.eta {
                Some(s) => parse_auto(s).map_err(Failure::Config)?,
                None => match &f.eta {
                    Some(e) => e.value().map_err(Failure::Config)?,
                    None => None,
                },
            };
            if let Some(e) = eta {
                base.eta = Some(e as usize);
            }
            base.m_max = match &a.m_max {
                Some(s) => parse_real(s).map_err(Failure::Config)?,
                None => match &f.m_max {
                    Some(r) => r.value().map_err(Failure::Config)?,
                    None => f64::INFINITY,
                },
            };
            let source = a
                .bias
                .as_deref()
                .or(f.bias.as_deref())
                .map(parse_bias)
                .transpose()
                .map_err(Failure::Config)?
                .unwrap_or(BiasSource::Zero);
            let est = a
                .bias_estimator
                .as_deref()
                .or(f.bias_estimator.as_deref())
                .map(parse_estimator)
                .transpose()
                .map_err(Failure::Config)?
                .unwrap_or(Estimator::FirstError);
            let bias_frames = a.bias_frames.or(f.bias_frames).unwrap_or(100_000);
            let mut out = Vec::with_capacity(snr.len());
            for &s in &snr {
                let bias = match &source {
                    BiasSource::Zero => Bias::Zero,
                    BiasSource::File(path) => {
                        let (profile, header) = read_profile(path)?;
                        if header.code_hash != spec.content_hash() {
                            return cfg_err(format!(
                                "{} was estimated for code {}, not {}",
                                path.display(),
                                header.code_hash,
                                spec.content_hash()
                            ));
                        }
                        if header.snr_db != s {
                            eprintln!(
                                "warning: {} was estimated at {} dB, used at {} dB",
                                path.display(),
                                fmt_g(header.snr_db),
                                fmt_g(s)
                            );
                        }
                        Bias::Profile(profile)
                    }
                    BiasSource::Auto => {
                        Bias::Profile(auto_profile(ctx, &spec, s, bias_frames, est)?)
                    }
                };
                let c = base.clone().with_bias(bias);
                c.validate(len)?;
                out.push(DecoderConfig::Scos(c));
            }
            out
        }
        other => return cfg_err(format!("unknown decoder {other:?} (sc, scos, scl, dscf)")),
    };
    sim.decoder = decoders[0].clone();
    sim.validate()?;

    let mut file = match &ctx.out {
        Some(_) => Some(File::create(ctx.out_dir()?.join("fer.csv"))?),
        None => None,
    };
    let mut emit = |line: &str| -> io::Result<()> {
        let mut stdout = io::stdout().lock();
        writeln!(stdout, "{line}")?;
        stdout.flush()?;
        if let Some(f) = file.as_mut() {
            writeln!(f, "{line}")?;
            f.flush()?;
        }
        Ok(())
    };
    emit(CSV_HEADER)?;
    for (i, dec) in decoders.iter().enumerate() {
        let point = run_point(&sim, i, dec)?;
        let s = &point.stats;
        if s.frames >= sim.max_frames && sim.max_frames > 0 && s.frame_errors < sim.min_frame_errors
        {
            eprintln!(
                "warning: {} dB stopped at {} frames with {} of {} target errors",
                fmt_g(point.snr_db),
                s.frames,
                s.frame_errors,
                sim.min_frame_errors
            );
        }
        if let Some(row) = csv_row(&point, len, sim.seed) {
            emit(&row)?;
        }
    }
    Ok(())
}

fn bias(ctx: &Context, a: &BiasArgs) -> Outcome<()> {
    let spec = ctx.code(&a.code)?;
    let snr = ctx.one_snr(a.snr)?;
    let frames = ctx.frames(a.frames, ctx.file.bias_frames.unwrap_or(100_000));
    let est = a
        .estimator
        .as_deref()
        .or(ctx.file.bias_estimator.as_deref())
        .map(parse_estimator)
        .transpose()
        .map_err(Failure::Config)?
        .unwrap_or(Estimator::FirstError);
    let profile = estimate(&spec, snr, frames, ctx.seed, ctx.workers, est)?;
    let header = BiasHeader {
        code_hash: spec.content_hash(),
        snr_db: snr,
        frames,
        seed: ctx.seed,
    };
    let path = ctx.out_dir()?.join(bias_file_name(&spec, snr, est));
    fs::write(&path, profile.to_text(&header))?;
    let b_end = profile.b().last().copied().unwrap_or(0.0);
    println!(
        "estimator={} sum_p={} b_N={}",
        estimator_name(est),
        fmt_g(profile.p().iter().sum()),
        fmt_g(b_end)
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn histogram(ctx: &Context, a: &HistogramArgs) -> Outcome<()> {
    let spec = ctx.code(&a.code)?;
    let snr = ctx.one_snr(a.snr)?;
    let frames = ctx.frames(a.frames, 100_000);
    let width = a.bin_width.or(ctx.file.bin_width).unwrap_or(1.0);
    let bins = a.bins.or(ctx.file.bins).unwrap_or(100);
    let tail = a.tail.or(ctx.file.tail).unwrap_or(50.0);
    let hist = pm_histogram(&spec, snr, frames, width, bins, ctx.seed, ctx.workers)?;
    let path = ctx.out_dir()?.join(format!(
        "pm_hist_{}_{}.csv",
        spec.content_hash(),
        fmt_g(snr)
    ));
    fs::write(&path, hist.to_csv())?;
    println!(
        "frames={} max_pm={} at_or_above_{}={} tail_mass={}",
        hist.total,
        fmt_g(hist.max),
        fmt_g(tail),
        hist.count_at_or_above(tail),
        fmt_g(hist.tail_mass(tail))
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn vset(ctx: &Context, a: &VsetArgs) -> Outcome<()> {
    let spec = ctx.code(&a.code)?;
    let snr = ctx.one_snr(a.snr)?;
    let frames = ctx.frames(a.frames, 10_000);
    let limit = a.node_limit.or(ctx.file.node_limit).unwrap_or(10_000_000);
    let res = lemma1_bound(&spec, snr, frames, ctx.seed, ctx.workers, limit)?;
    let path = ctx
        .out_dir()?
        .join(format!("vset_{}_{}.csv", spec.content_hash(), fmt_g(snr)));
    let csv = format!(
        "snr_db,frames,mean_vset_ratio,mean_visit_ratio,violations,saturated,seed\n{},{},{},{},{},{},{}\n",
        fmt_g(snr),
        res.frames,
        fmt_g(res.mean_bound),
        fmt_g(res.mean_ratio),
        res.violations,
        res.saturated,
        ctx.seed
    );
    fs::write(&path, &csv)?;
    print!("{csv}");
    if res.saturated > 0 {
        return Err(Failure::Saturated(format!(
            "{} of {} frames hit the node limit of {limit}; means exclude them",
            res.saturated, res.frames
        )));
    }
    Ok(())
}

fn crosscheck(ctx: &Context, a: &CrosscheckArgs) -> Outcome<()> {
    let spec = ctx.code(&a.code)?;
    let snr = ctx.snr_list(&a.snr).unwrap_or_else(|| vec![0.0, 2.0, 4.0]);
    let frames = ctx.frames(a.frames, 10_000);
    let mut csv = String::from("snr_db,frames,pm_mismatches,word_mismatches,seed\n");
    let mut bad = 0;
    for &s in &snr {
        let r = ml_crosscheck(&spec, s, frames, ctx.seed, ctx.workers)?;
        bad += r.pm_mismatches + r.word_mismatches;
        csv += &format!(
            "{},{},{},{},{}\n",
            fmt_g(s),
            r.frames,
            r.pm_mismatches,
            r.word_mismatches,
            ctx.seed
        );
    }
    print!("{csv}");
    if ctx.out.is_some() {
        fs::write(ctx.out_dir()?.join("ml_crosscheck.csv"), &csv)?;
    }
    if bad > 0 {
        return Err(Failure::Runtime(format!(
            "{bad} disagreements with exhaustive ML"
        )));
    }
    Ok(())
}
