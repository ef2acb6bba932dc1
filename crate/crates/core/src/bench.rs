//! Monte Carlo experiments over the biAWGN channel.
//!
//! Frames are drawn from per-frame random streams and folded in frame order,
//! so every result depends on the seed alone and not on the worker count.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::baseline::{brute_force_ml, DscfConfig, DscfDecoder, SclConfig, SclDecoder};
use crate::channel::{ebn0_to_sigma, frame_rng, transmit};
use crate::codes::{transform, CodeSpec};
use crate::engine::{calc_pm, hard_dec, path_metric, ScDecoder, ScTree};
use crate::error::{invalid, Error, Result};
use crate::scos::{compute_bias, BiasProfile, ScosConfig, ScosDecoder};

#[derive(Debug, Clone, PartialEq)]
pub enum DecoderConfig {
    Sc,
    Scos(ScosConfig),
    Scl(SclConfig),
    Dscf(DscfConfig),
}

impl DecoderConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderConfig::Sc => "sc",
            DecoderConfig::Scos(_) => "scos",
            DecoderConfig::Scl(_) => "scl",
            DecoderConfig::Dscf(_) => "dscf",
        }
    }
}

/// Decision of one frame; `u_hat` is `None` for a rejected frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub u_hat: Option<Vec<u8>>,
    pub node_visits: u64,
}

/// Any supported decoder behind one interface, with its own workspace.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum FrameDecoder {
    Sc(ScDecoder),
    Scos(ScosDecoder, ScosConfig),
    Scl(SclDecoder, SclConfig),
    Dscf(DscfDecoder, DscfConfig),
}

impl FrameDecoder {
    pub fn new(spec: &CodeSpec, cfg: &DecoderConfig) -> Self {
        let n = spec.n();
        match cfg {
            DecoderConfig::Sc => FrameDecoder::Sc(ScDecoder::new(n)),
            DecoderConfig::Scos(c) => FrameDecoder::Scos(ScosDecoder::new(n), c.clone()),
            DecoderConfig::Scl(c) => FrameDecoder::Scl(SclDecoder::new(n), *c),
            DecoderConfig::Dscf(c) => FrameDecoder::Dscf(DscfDecoder::new(n), *c),
        }
    }

    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64]) -> Decision {
        match self {
            FrameDecoder::Sc(d) => Decision {
                u_hat: Some(d.decode(spec, llr).0),
                node_visits: spec.len() as u64,
            },
            FrameDecoder::Scos(d, c) => {
                let out = d.decode(spec, llr, c);
                Decision {
                    u_hat: out.u_hat,
                    node_visits: out.node_visits,
                }
            }
            FrameDecoder::Scl(d, c) => {
                let out = d.decode(spec, llr, c);
                Decision {
                    u_hat: out.crc_pass.then_some(out.u_hat),
                    node_visits: out.node_visits,
                }
            }
            FrameDecoder::Dscf(d, c) => {
                let out = d.decode(spec, llr, c);
                Decision {
                    u_hat: out.u_hat,
                    node_visits: out.node_visits,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub decoder: DecoderConfig,
    pub snr_points: Vec<f64>,
    pub min_frames: u64,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub seed: u64,
    pub workers: usize,
    /// Transmit the all-zero word instead of random payloads.
    pub all_zero: bool,
}

impl SimConfig {
    pub fn new(spec: CodeSpec, decoder: DecoderConfig, snr_points: Vec<f64>) -> Self {
        Self {
            spec,
            decoder,
            snr_points,
            min_frames: 0,
            max_frames: 1_000_000,
            min_frame_errors: 100,
            seed: 0,
            workers: 1,
            all_zero: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_points.is_empty() {
            return invalid("at least one SNR point is required");
        }
        if self.min_frame_errors == 0 {
            return invalid("min_frame_errors must be >= 1");
        }
        if self.workers == 0 {
            return invalid("workers must be >= 1");
        }
        if let DecoderConfig::Scos(c) = &self.decoder {
            c.validate(self.spec.len())?;
        }
        if matches!(self.decoder, DecoderConfig::Dscf(_)) && self.spec.crc().is_none() {
            return invalid("the dscf decoder needs a code with a CRC");
        }
        Ok(())
    }

    fn done(&self, s: &PointStats) -> bool {
        s.frames >= self.max_frames
            || (s.frames >= self.min_frames && s.frame_errors >= self.min_frame_errors)
    }
}

/// Counters of one SNR point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointStats {
    pub frames: u64,
    /// Undetected errors plus erasures.
    pub frame_errors: u64,
    pub undetected_errors: u64,
    pub erasures: u64,
    pub sum_node_visits: u64,
    /// Undetected errors whose decision metric is at most the transmitted word's.
    pub ml_lb_errors: u64,
}

impl PointStats {
    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ufer(&self) -> f64 {
        ratio(self.undetected_errors, self.frames)
    }

    /// Mean node visits per frame in units of N.
    pub fn visit_ratio(&self, len: usize) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.sum_node_visits as f64 / (self.frames as f64 * len as f64)
        }
    }

    fn add(&mut self, f: &FrameStats) {
        self.frames += 1;
        self.sum_node_visits += f.node_visits;
        if f.erasure {
            self.erasures += 1;
            self.frame_errors += 1;
        } else if f.error {
            self.undetected_errors += 1;
            self.frame_errors += 1;
            self.ml_lb_errors += f.ml_lb as u64;
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub snr_db: f64,
    pub stats: PointStats,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub len: usize,
    pub seed: u64,
    pub points: Vec<PointResult>,
}

impl SimResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            if let Some(row) = csv_row(p, self.len, self.seed) {
                out.push_str(&row);
                out.push('\n');
            }
        }
        out
    }
}

pub const CSV_HEADER: &str =
    "snr_db,frames,frame_errors,fer,undetected_errors,ufer,erasures,avg_visit_ratio,ml_lb_errors,seed";

/// CSV line of one point, or `None` for a point without frames.
pub fn csv_row(p: &PointResult, len: usize, seed: u64) -> Option<String> {
    let s = &p.stats;
    (s.frames > 0).then(|| {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_g(p.snr_db),
            s.frames,
            s.frame_errors,
            fmt_g(s.fer()),
            s.undetected_errors,
            fmt_g(s.ufer()),
            s.erasures,
            fmt_g(s.visit_ratio(len)),
            s.ml_lb_errors,
            seed
        )
    })
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameStats {
    error: bool,
    erasure: bool,
    ml_lb: bool,
    node_visits: u64,
}

/// Payload, input vector and channel LLRs of one frame.
pub fn draw_frame(
    spec: &CodeSpec,
    sigma: f64,
    seed: u64,
    point: u64,
    frame: u64,
    all_zero: bool,
) -> (Vec<u8>, Vec<f64>) {
    let mut rng = frame_rng(seed, point, frame);
    let payload: Vec<u8> = (0..spec.payload_len())
        .map(|_| {
            if all_zero {
                0
            } else {
                rng.random::<bool>() as u8
            }
        })
        .collect();
    let info = spec
        .info_from_payload(&payload)
        .expect("payload length matches the code");
    let u = spec.place(&info).expect("info length matches the code");
    let cw = transform(&u);
    let llr = transmit(&cw, sigma, &mut rng);
    (u, llr)
}

fn build_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Evaluates frames `0..max_frames` in parallel batches and feeds the
/// results to `accept` in frame order until it returns true.
fn drive<S, T, I, F, G>(pool: &ThreadPool, max_frames: u64, init: I, frame: F, mut accept: G)
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> T + Sync + Send,
    T: Send,
    G: FnMut(T) -> bool,
{
    let batch = (pool.current_num_threads() as u64 * 32).max(32);
    let mut start = 0u64;
    while start < max_frames {
        let end = (start + batch).min(max_frames);
        let results: Vec<T> = pool.install(|| {
            (start as usize..end as usize)
                .into_par_iter()
                .map_init(&init, |s, f| frame(s, f as u64))
                .collect()
        });
        for r in results {
            if accept(r) {
                return;
            }
        }
        start = end;
    }
}

/// Frame error rate simulation; calls `on_point` as each point completes.
pub fn run_fer_with<C: FnMut(&PointResult)>(cfg: &SimConfig, mut on_point: C) -> Result<SimResult> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    let mut points = Vec::with_capacity(cfg.snr_points.len());
    for pi in 0..cfg.snr_points.len() {
        let point = simulate_point(cfg, &pool, pi, &cfg.decoder)?;
        on_point(&point);
        points.push(point);
    }
    Ok(SimResult {
        len: cfg.spec.len(),
        seed: cfg.seed,
        points,
    })
}

/// Runs point `index` of `cfg` with `decoder` in place of `cfg.decoder`.
///
/// Frames are drawn exactly as in [`run_fer`], so a sweep assembled from
/// single points matches the full run when the decoders agree.
pub fn run_point(cfg: &SimConfig, index: usize, decoder: &DecoderConfig) -> Result<PointResult> {
    if index >= cfg.snr_points.len() {
        return invalid(format!("point {index} out of range"));
    }
    let cfg = SimConfig {
        decoder: decoder.clone(),
        ..cfg.clone()
    };
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    simulate_point(&cfg, &pool, index, decoder)
}

fn simulate_point(
    cfg: &SimConfig,
    pool: &ThreadPool,
    pi: usize,
    decoder: &DecoderConfig,
) -> Result<PointResult> {
    let spec = &cfg.spec;
    let snr = cfg.snr_points[pi];
    let sigma = ebn0_to_sigma(snr, spec.rate())?;
    let started = Instant::now();
    let mut stats = PointStats::default();
    if cfg.max_frames > 0 {
        drive(
            pool,
            cfg.max_frames,
            || (FrameDecoder::new(spec, decoder), ScTree::new(spec.n())),
            |(dec, tree), f| {
                let (u, llr) = draw_frame(spec, sigma, cfg.seed, pi as u64, f, cfg.all_zero);
                let d = dec.decode(spec, &llr);
                let mut fs = FrameStats {
                    node_visits: d.node_visits,
                    ..FrameStats::default()
                };
                match d.u_hat {
                    None => fs.erasure = true,
                    Some(u_hat) if u_hat != u => {
                        fs.error = true;
                        let m_hat = path_metric(tree, &llr, &u_hat);
                        let m_true = path_metric(tree, &llr, &u);
                        fs.ml_lb = m_hat <= m_true;
                    }
                    Some(_) => {}
                }
                fs
            },
            |fs| {
                stats.add(&fs);
                cfg.done(&stats)
            },
        );
    }
    Ok(PointResult {
        snr_db: snr,
        stats,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

pub fn run_fer(cfg: &SimConfig) -> Result<SimResult> {
    run_fer_with(cfg, |_| {})
}

/// Size of the set of code-tree nodes with metric at most `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VsetCount {
    pub count: u64,
    /// True when the traversal stopped at the node limit.
    pub saturated: bool,
}

/// Counts code-tree nodes at depths `1..=N` whose path metric does not
/// exceed `threshold`, stopping once more than `node_limit` are found.
pub fn vset_size(spec: &CodeSpec, llr: &[f64], threshold: f64, node_limit: u64) -> VsetCount {
    let mut tree = ScTree::new(spec.n());
    vset_size_with(&mut tree, spec, llr, threshold, node_limit)
}

fn vset_size_with(
    tree: &mut ScTree,
    spec: &CodeSpec,
    llr: &[f64],
    threshold: f64,
    node_limit: u64,
) -> VsetCount {
    let mut walk = VsetWalk {
        spec,
        v: vec![0; spec.len()],
        threshold,
        limit: node_limit,
        count: 0,
        saturated: false,
    };
    if threshold >= 0.0 {
        tree.load_channel(llr);
        walk.visit(tree, 0, 0.0);
    }
    VsetCount {
        count: walk.count,
        saturated: walk.saturated,
    }
}

struct VsetWalk<'a> {
    spec: &'a CodeSpec,
    v: Vec<u8>,
    threshold: f64,
    limit: u64,
    count: u64,
    saturated: bool,
}

impl VsetWalk<'_> {
    // The tree keeps the LLR blocks of phase `p` valid while sibling
    // subtrees are explored, so `l` is computed once per node.
    fn visit(&mut self, tree: &mut ScTree, p: usize, pm: f64) {
        if p == self.spec.len() || self.saturated {
            return;
        }
        let l = tree.recursively_calc_l(p);
        let bits: &[u8] = if self.spec.is_info(p + 1) {
            &[0, 1]
        } else if self.spec.frozen_value(p, &self.v) == 0 {
            &[0]
        } else {
            &[1]
        };
        for &bit in bits {
            let m = calc_pm(pm, bit, l);
            if m > self.threshold {
                continue;
            }
            self.count += 1;
            if self.count > self.limit {
                self.saturated = true;
                return;
            }
            self.v[p] = bit;
            tree.set_decision(p, bit);
            self.visit(tree, p + 1, m);
            if self.saturated {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Result {
    pub frames: u64,
    /// Mean of `vset_size / N` at the ML metric.
    pub mean_bound: f64,
    /// Mean unbounded-search visit ratio on the same frames.
    pub mean_ratio: f64,
    /// Frames where the visit count fell below the set size.
    pub violations: u64,
    /// Frames skipped because the traversal hit the node limit.
    pub saturated: u64,
}

/// Monte Carlo mean of the node-set complexity bound paired with the
/// unbounded ordered-search complexity on the same frames.
pub fn lemma1_bound(
    spec: &CodeSpec,
    snr_db: f64,
    frames: u64,
    seed: u64,
    workers: usize,
    node_limit: u64,
) -> Result<Lemma1Result> {
    let pool = build_pool(workers)?;
    let sigma = ebn0_to_sigma(snr_db, spec.rate())?;
    let cfg = ScosConfig::unbounded();
    let len = spec.len() as f64;
    let mut res = Lemma1Result {
        frames: 0,
        mean_bound: 0.0,
        mean_ratio: 0.0,
        violations: 0,
        saturated: 0,
    };
    let (mut sum_bound, mut sum_visits) = (0u64, 0u64);
    drive(
        &pool,
        frames,
        || (ScosDecoder::new(spec.n()), ScTree::new(spec.n())),
        |(dec, tree), f| {
            let (_, llr) = draw_frame(spec, sigma, seed, 0, f, false);
            let out = dec.decode(spec, &llr, &cfg);
            let vs = vset_size_with(tree, spec, &llr, out.pm, node_limit);
            (out.node_visits, vs)
        },
        |(visits, vs)| {
            res.frames += 1;
            if vs.saturated {
                res.saturated += 1;
            } else {
                sum_bound += vs.count;
                sum_visits += visits;
                res.violations += (visits < vs.count) as u64;
            }
            false
        },
    );
    let counted = (res.frames - res.saturated) as f64;
    if counted > 0.0 {
        res.mean_bound = sum_bound as f64 / (counted * len);
        res.mean_ratio = sum_visits as f64 / (counted * len);
    }
    Ok(res)
}

/// Genie-aided SC first-error statistics turned into a bias profile.
pub fn estimate_bias(
    spec: &CodeSpec,
    snr_db: f64,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<BiasProfile> {
    if frames == 0 {
        return invalid("bias estimation needs at least one frame");
    }
    let pool = build_pool(workers)?;
    let sigma = ebn0_to_sigma(snr_db, spec.rate())?;
    let mut counts = vec![0u64; spec.len()];
    drive(
        &pool,
        frames,
        || ScTree::new(spec.n()),
        |tree, f| {
            let (u, llr) = draw_frame(spec, sigma, seed, 0, f, false);
            tree.load_channel(&llr);
            for (p, &bit) in u.iter().enumerate() {
                let l = tree.recursively_calc_l(p);
                if spec.is_info(p + 1) && hard_dec(l) != bit {
                    return Some(p);
                }
                tree.set_decision(p, bit);
            }
            None
        },
        |first| {
            if let Some(p) = first {
                counts[p] += 1;
            }
            false
        },
    );
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / frames as f64).collect();
    compute_bias(&p)
}

/// Bit-channel error probabilities under genie-aided SC, frozen phases included.
///
/// Each `p_j` is the rate at which the hard decision at phase `j` disagrees with
/// the transmitted bit given a correct prefix, the quantity density evolution
/// tracks. Frozen phases carry the expected growth of the transmitted path's
/// metric, so leaving them out makes the bias nearly flat.
pub fn estimate_bit_channel_bias(
    spec: &CodeSpec,
    snr_db: f64,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<BiasProfile> {
    if frames == 0 {
        return invalid("bias estimation needs at least one frame");
    }
    let pool = build_pool(workers)?;
    let sigma = ebn0_to_sigma(snr_db, spec.rate())?;
    let mut counts = vec![0u64; spec.len()];
    drive(
        &pool,
        frames,
        || ScTree::new(spec.n()),
        |tree, f| {
            let (u, llr) = draw_frame(spec, sigma, seed, 0, f, false);
            tree.load_channel(&llr);
            let mut wrong = Vec::new();
            for (p, &bit) in u.iter().enumerate() {
                if hard_dec(tree.recursively_calc_l(p)) != bit {
                    wrong.push(p);
                }
                tree.set_decision(p, bit);
            }
            wrong
        },
        |wrong| {
            for p in wrong {
                counts[p] += 1;
            }
            false
        },
    );
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / frames as f64).collect();
    compute_bias(&p)
}

/// Histogram of the genie path metric `M(u^N)` of the transmitted word.
#[derive(Debug, Clone, PartialEq)]
pub struct PmHistogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    /// Samples at or beyond `bin_width * counts.len()`.
    pub overflow: u64,
    pub total: u64,
    pub max: f64,
}

impl PmHistogram {
    pub fn new(bin_width: f64, bins: usize) -> Result<Self> {
        if bin_width.is_nan() || bin_width <= 0.0 || bins == 0 {
            return invalid("histogram needs a positive bin width and at least one bin");
        }
        Ok(Self {
            bin_width,
            counts: vec![0; bins],
            overflow: 0,
            total: 0,
            max: 0.0,
        })
    }

    pub fn add(&mut self, x: f64) {
        let b = (x / self.bin_width).floor();
        if b >= 0.0 && (b as usize) < self.counts.len() {
            self.counts[b as usize] += 1;
        } else {
            self.overflow += 1;
        }
        self.total += 1;
        self.max = self.max.max(x);
    }

    /// Number of samples in bins whose lower edge is at least `t`.
    pub fn count_at_or_above(&self, t: f64) -> u64 {
        let first = (t / self.bin_width).ceil().max(0.0) as usize;
        self.counts.iter().skip(first).sum::<u64>() + self.overflow
    }

    /// Fraction of samples at or above `t`, with `t` rounded up to a bin edge.
    pub fn tail_mass(&self, t: f64) -> f64 {
        ratio(self.count_at_or_above(t), self.total)
    }

    /// Probability density per bin.
    pub fn density(&self) -> Vec<f64> {
        let scale = self.total as f64 * self.bin_width;
        self.counts
            .iter()
            .map(|&c| if scale > 0.0 { c as f64 / scale } else { 0.0 })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count,density\n");
        for (i, (&c, d)) in self.counts.iter().zip(self.density()).enumerate() {
            let lo = i as f64 * self.bin_width;
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_g(lo),
                fmt_g(lo + self.bin_width),
                c,
                fmt_g(d)
            ));
        }
        let lo = self.counts.len() as f64 * self.bin_width;
        out.push_str(&format!("{},inf,{},0\n", fmt_g(lo), self.overflow));
        out
    }
}

#[allow(clippy::too_many_arguments)]
pub fn pm_histogram(
    spec: &CodeSpec,
    snr_db: f64,
    frames: u64,
    bin_width: f64,
    bins: usize,
    seed: u64,
    workers: usize,
) -> Result<PmHistogram> {
    let mut hist = PmHistogram::new(bin_width, bins)?;
    let pool = build_pool(workers)?;
    let sigma = ebn0_to_sigma(snr_db, spec.rate())?;
    drive(
        &pool,
        frames,
        || ScTree::new(spec.n()),
        |tree, f| {
            let (u, llr) = draw_frame(spec, sigma, seed, 0, f, false);
            path_metric(tree, &llr, &u)
        },
        |pm| {
            hist.add(pm);
            false
        },
    );
    Ok(hist)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CrosscheckResult {
    pub frames: u64,
    pub pm_mismatches: u64,
    pub word_mismatches: u64,
}

/// Compares the unbounded ordered search with exhaustive ML decoding.
pub fn ml_crosscheck(
    spec: &CodeSpec,
    snr_db: f64,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<CrosscheckResult> {
    if spec.k() > crate::baseline::BRUTE_FORCE_MAX_K {
        return Err(Error::TooLarge {
            k: spec.k(),
            limit: crate::baseline::BRUTE_FORCE_MAX_K,
        });
    }
    let pool = build_pool(workers)?;
    let sigma = ebn0_to_sigma(snr_db, spec.rate())?;
    let cfg = ScosConfig::unbounded();
    let mut res = CrosscheckResult::default();
    drive(
        &pool,
        frames,
        || ScosDecoder::new(spec.n()),
        |dec, f| {
            let (_, llr) = draw_frame(spec, sigma, seed, 0, f, false);
            let out = dec.decode(spec, &llr, &cfg);
            let (u_ml, pm_ml) = brute_force_ml(spec, &llr).expect("dimension checked");
            (out.pm != pm_ml, out.u_hat.as_deref() != Some(&u_ml[..]))
        },
        |(pm_bad, word_bad)| {
            res.frames += 1;
            res.pm_mismatches += pm_bad as u64;
            res.word_mismatches += word_bad as u64;
            false
        },
    );
    Ok(res)
}
