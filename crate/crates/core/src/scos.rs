//! Successive cancellation ordered search.
//!
//! The decoder starts from the SC estimate and explores flipping sets in
//! ascending order of score. A branch is abandoned as soon as its path
//! metric reaches that of the current most likely leaf; once the candidate
//! list empties, the current leaf is the minimum-metric codeword. A
//! node-visit budget and a list capacity trade optimality for complexity,
//! and a finite maximum metric turns the decoder into one that can reject
//! a frame.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::codes::CodeSpec;
use crate::engine::{calc_pm, hard_dec, DecoderWorkspace};
use crate::error::{invalid, Error, Result};

/// First-error probabilities per phase and their cumulative bias
/// `b[i] = sum_{j <= i} ln(1 - p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasProfile {
    p: Vec<f64>,
    b: Vec<f64>,
}

/// Metadata stored at the top of a bias profile file.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasHeader {
    pub code_hash: String,
    pub snr_db: f64,
    pub frames: u64,
    pub seed: u64,
}

/// Builds a bias profile from per-phase first-error probabilities.
pub fn compute_bias(p: &[f64]) -> Result<BiasProfile> {
    let mut b = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for (j, &pj) in p.iter().enumerate() {
        if !(0.0..1.0).contains(&pj) {
            return invalid(format!("p[{}] = {pj} is outside [0, 1)", j + 1));
        }
        acc += (1.0 - pj).ln();
        b.push(acc);
    }
    Ok(BiasProfile { p: p.to_vec(), b })
}

impl BiasProfile {
    pub fn zero(len: usize) -> Self {
        Self {
            p: vec![0.0; len],
            b: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// First-error probabilities, 0-based.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Cumulative bias, 0-based (`b()[i - 1]` is the bias of phase `i`).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn to_text(&self, header: &BiasHeader) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# code_hash={} snr_db={} frames={} seed={}",
            header.code_hash, header.snr_db, header.frames, header.seed
        );
        out.push_str("index,p,b\n");
        for (j, (p, b)) in self.p.iter().zip(&self.b).enumerate() {
            let _ = writeln!(out, "{},{},{}", j + 1, p, b);
        }
        out
    }

    /// Parses a profile file; `b` is recomputed from `p`.
    pub fn from_text(text: &str) -> Result<(Self, BiasHeader)> {
        let mut header = None;
        let mut p = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                header = Some(parse_header(rest)?);
                continue;
            }
            if line.starts_with("index") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("bad bias line {line:?}")));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in {line:?}")))?;
            if idx != p.len() + 1 {
                return Err(Error::Parse(format!(
                    "indices must be consecutive at {line:?}"
                )));
            }
            let pj: f64 = fields[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad p in {line:?}")))?;
            p.push(pj);
        }
        let header = header.ok_or_else(|| Error::Parse("missing bias header".into()))?;
        Ok((compute_bias(&p)?, header))
    }
}

fn parse_header(rest: &str) -> Result<BiasHeader> {
    let mut code_hash = None;
    let mut snr_db = None;
    let mut frames = None;
    let mut seed = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
        let bad = |_| Error::Parse(format!("bad header value {kv:?}"));
        match k {
            "code_hash" => code_hash = Some(v.to_string()),
            "snr_db" => snr_db = Some(v.parse::<f64>().map_err(|_| bad(()))?),
            "frames" => frames = Some(v.parse::<u64>().map_err(|_| bad(()))?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad(()))?),
            _ => {}
        }
    }
    match (code_hash, snr_db, frames, seed) {
        (Some(code_hash), Some(snr_db), Some(frames), Some(seed)) => Ok(BiasHeader {
            code_hash,
            snr_db,
            frames,
            seed,
        }),
        _ => Err(Error::Parse("incomplete bias header".into())),
    }
}

/// List capacity `floor(log2(N) * lambda_max / N)`; `None` means unbounded.
pub fn eta_from_budget(lambda_max: Option<u64>, len: usize) -> Option<usize> {
    let log2n = len.trailing_zeros() as u64;
    lambda_max.map(|lm| (log2n * lm / len as u64) as usize)
}

/// Bias term used to order the search.
#[derive(Debug, Clone, PartialEq)]
pub enum Bias {
    Zero,
    Profile(BiasProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScosConfig {
    /// Node-visit budget; `None` is unbounded.
    pub lambda_max: Option<u64>,
    /// List capacity; `None` is unbounded.
    pub eta: Option<usize>,
    /// Maximum accepted path metric; `INFINITY` disables rejection.
    pub m_max: f64,
    pub bias: Bias,
}

impl Default for ScosConfig {
    fn default() -> Self {
        Self::unbounded()
    }
}

impl ScosConfig {
    /// Unbounded complexity, zero bias: an ML decoder.
    pub fn unbounded() -> Self {
        Self {
            lambda_max: None,
            eta: None,
            m_max: f64::INFINITY,
            bias: Bias::Zero,
        }
    }

    /// Budget of `ratio * N` visits with the matching list capacity.
    pub fn with_budget_ratio(ratio: f64, len: usize) -> Result<Self> {
        if ratio.is_nan() || ratio < 1.0 {
            return invalid(format!("budget ratio must be >= 1, got {ratio}"));
        }
        let lambda_max = if ratio.is_infinite() {
            None
        } else {
            Some((ratio * len as f64).floor() as u64)
        };
        Ok(Self {
            lambda_max,
            eta: eta_from_budget(lambda_max, len),
            ..Self::unbounded()
        })
    }

    pub fn with_bias(mut self, bias: Bias) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_max_pm(mut self, m_max: f64) -> Self {
        self.m_max = m_max;
        self
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if let Some(lm) = self.lambda_max {
            if lm < len as u64 {
                return invalid(format!("lambda_max = {lm} is below N = {len}"));
            }
        }
        if self.eta == Some(0) {
            return invalid("list capacity must be >= 1");
        }
        if self.m_max.is_nan() || self.m_max < 0.0 {
            return invalid("m_max must be non-negative");
        }
        if let Bias::Profile(p) = &self.bias {
            if p.len() != len {
                return invalid(format!("bias profile has {} entries, N = {len}", p.len()));
            }
        }
        Ok(())
    }
}

/// A flipping set with the metric and score of its branch node.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipRecord {
    /// Ascending 1-based information indices.
    pub flip_set: Vec<usize>,
    pub m_bar: f64,
    pub s_bar: f64,
}

/// Flipping records kept in ascending score order, at most `capacity` long.
#[derive(Debug, Clone, Default)]
pub struct FlipList {
    entries: VecDeque<FlipRecord>,
    capacity: Option<usize>,
}

impl FlipList {
    pub fn new(capacity: Option<usize>) -> Self {
        Self {
            entries: VecDeque::new(),
            capacity,
        }
    }

    /// Inserts after every entry with a score `<=` the new one, then drops
    /// the worst entry if the capacity is exceeded.
    pub fn insert(&mut self, rec: FlipRecord) {
        let pos = self.entries.partition_point(|r| r.s_bar <= rec.s_bar);
        self.entries.insert(pos, rec);
        if let Some(cap) = self.capacity {
            if self.entries.len() > cap {
                self.entries.pop_back();
            }
        }
    }

    pub fn pop_first(&mut self) -> Option<FlipRecord> {
        self.entries.pop_front()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FlipRecord> {
        self.entries.iter()
    }

    fn reset(&mut self, capacity: Option<usize>) {
        self.entries.clear();
        self.capacity = capacity;
    }
}

/// Smallest index in exactly one of the two ascending sets.
///
/// # Panics
///
/// Panics if the sets are equal.
pub fn find_start_index(e: &[usize], e_prev: &[usize]) -> usize {
    let mut a = e.iter().peekable();
    let mut b = e_prev.iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some(&&x), Some(&&y)) if x == y => {
                a.next();
                b.next();
            }
            (Some(&&x), Some(&&y)) => return x.min(y),
            (Some(&&x), None) => return x,
            (None, Some(&&y)) => return y,
            (None, None) => panic!("find_start_index called with identical flipping sets"),
        }
    }
}

/// How a partial SC pass ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassEnd {
    /// Reached phase N with a metric below the incumbent; the leaf was committed.
    Leaf,
    /// The metric at this 1-based phase reached the incumbent's.
    Pruned(usize),
    /// The node-visit budget ran out before the next phase.
    Exhausted,
}

/// One executed pass, recorded when tracing is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct PassTrace {
    pub flip_set: Vec<usize>,
    pub m_bar: f64,
    pub m_cml_before: f64,
    pub m_cml_after: f64,
    pub i_start: usize,
    pub end: PassEnd,
    /// Running metric at the last executed phase.
    pub pm_at_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScosOutcome {
    /// Decided input vector `u^N`; `None` when no leaf beat `m_max`.
    pub u_hat: Option<Vec<u8>>,
    /// Metric of `u_hat`, infinite when rejected.
    pub pm: f64,
    /// True when a full-length leaf under the threshold was found.
    pub omega: bool,
    pub node_visits: u64,
    pub leaves_found: usize,
    pub budget_exhausted: bool,
}

/// Reusable ordered-search decoder for codes of length `2^n`.
#[derive(Debug, Clone)]
pub struct ScosDecoder {
    ws: DecoderWorkspace,
    list: FlipList,
    flip_mask: Vec<bool>,
    zero_bias: Vec<f64>,
    visits: u64,
    budget: Option<u64>,
    trace: Option<Vec<PassTrace>>,
}

impl ScosDecoder {
    pub fn new(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            ws: DecoderWorkspace::new(n),
            list: FlipList::default(),
            flip_mask: vec![false; len],
            zero_bias: vec![0.0; len],
            visits: 0,
            budget: None,
            trace: None,
        }
    }

    /// Records every executed pass of subsequent decodes.
    pub fn enable_trace(&mut self, on: bool) {
        self.trace = if on { Some(Vec::new()) } else { None };
    }

    pub fn trace(&self) -> &[PassTrace] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn workspace(&self) -> &DecoderWorkspace {
        &self.ws
    }

    pub fn node_visits(&self) -> u64 {
        self.visits
    }

    /// Prepares the workspace for a frame without searching; used together
    /// with [`ScosDecoder::sc_dec`].
    pub fn begin(&mut self, llr: &[f64], m_cml: f64, budget: Option<u64>) {
        self.ws.reset(llr, m_cml);
        self.visits = 0;
        self.budget = budget;
    }

    /// Partial SC pass from 1-based phase `i_start` with the decisions in
    /// `e` inverted.
    ///
    /// Flipped metrics and scores are recorded at information phases beyond
    /// `max(e)` (all of them when `e` is empty). The pass stops at the first
    /// phase whose metric reaches the incumbent's, and commits the leaf if it
    /// reaches phase N.
    pub fn sc_dec(
        &mut self,
        spec: &CodeSpec,
        bias: &[f64],
        i_start: usize,
        e: &[usize],
    ) -> PassEnd {
        let len = spec.len();
        debug_assert!(i_start >= 1 && i_start <= len);
        let info = spec.info_mask();
        let max_e = e.last().copied().unwrap_or(0);
        for &i in e {
            self.flip_mask[i - 1] = true;
        }
        let ws = &mut self.ws;
        ws.tree.truncate_committed(i_start - 1);
        let mut end = PassEnd::Leaf;
        for i in i_start..=len {
            if self.budget.is_some_and(|b| self.visits >= b) {
                end = PassEnd::Exhausted;
                break;
            }
            self.visits += 1;
            let p = i - 1;
            let l = ws.tree.recursively_calc_l(p);
            let bit = if info[p] {
                let bit = hard_dec(l) ^ self.flip_mask[p] as u8;
                if i > max_e {
                    ws.m_bar[i] = calc_pm(ws.m[i - 1], bit ^ 1, l);
                    ws.s_bar[i] = ws.m_bar[i] + bias[p];
                }
                bit
            } else {
                spec.frozen_value(p, &ws.v)
            };
            ws.v[p] = bit;
            ws.m[i] = calc_pm(ws.m[i - 1], bit, l);
            if ws.m[i] >= ws.m_cml {
                end = PassEnd::Pruned(i);
                break;
            }
            ws.tree.set_decision(p, bit);
        }
        for &i in e {
            self.flip_mask[i - 1] = false;
        }
        if end == PassEnd::Leaf {
            ws.m_cml = ws.m[len];
            ws.u_hat.copy_from_slice(&ws.v);
        }
        end
    }

    /// Decodes one frame. With `cfg.m_max` finite this is the thresholded
    /// variant: frames with no leaf below `m_max` are rejected.
    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64], cfg: &ScosConfig) -> ScosOutcome {
        let len = spec.len();
        assert_eq!(llr.len(), len, "LLR length must equal N");
        assert_eq!(
            self.flip_mask.len(),
            len,
            "decoder built for another length"
        );
        let zero = std::mem::take(&mut self.zero_bias);
        let bias: &[f64] = match &cfg.bias {
            Bias::Zero => &zero,
            Bias::Profile(p) => p.b(),
        };
        self.begin(llr, cfg.m_max, cfg.lambda_max);
        self.list.reset(cfg.eta);
        if let Some(t) = self.trace.as_mut() {
            t.clear();
        }

        let mut omega = false;
        let mut leaves = 0;
        let mut exhausted = false;

        let before = self.ws.m_cml;
        let end = self.sc_dec(spec, bias, 1, &[]);
        self.record(Vec::new(), 0.0, before, 1, end);
        match end {
            PassEnd::Leaf => {
                omega = true;
                leaves += 1;
            }
            PassEnd::Exhausted => exhausted = true,
            PassEnd::Pruned(_) => {}
        }

        if !exhausted {
            for i in 1..=len {
                if spec.is_info(i) && self.ws.m_bar[i] < self.ws.m_cml {
                    self.list.insert(FlipRecord {
                        flip_set: vec![i],
                        m_bar: self.ws.m_bar[i],
                        s_bar: self.ws.s_bar[i],
                    });
                }
            }
            let mut e_prev: Vec<usize> = Vec::new();
            while let Some(rec) = self.list.pop_first() {
                if rec.m_bar >= self.ws.m_cml {
                    continue;
                }
                let j = find_start_index(&rec.flip_set, &e_prev);
                let i_start = j.min(self.ws.tree.committed() + 1);
                let before = self.ws.m_cml;
                let end = self.sc_dec(spec, bias, i_start, &rec.flip_set);
                let i_end = match end {
                    PassEnd::Leaf => {
                        omega = true;
                        leaves += 1;
                        len
                    }
                    PassEnd::Pruned(i) => i,
                    PassEnd::Exhausted => {
                        exhausted = true;
                        self.record(rec.flip_set, rec.m_bar, before, i_start, end);
                        break;
                    }
                };
                let max_e = *rec.flip_set.last().expect("list entries are non-empty");
                for i in max_e + 1..=i_end {
                    if spec.is_info(i) && self.ws.m_bar[i] < self.ws.m_cml {
                        let mut flip_set = Vec::with_capacity(rec.flip_set.len() + 1);
                        flip_set.extend_from_slice(&rec.flip_set);
                        flip_set.push(i);
                        self.list.insert(FlipRecord {
                            flip_set,
                            m_bar: self.ws.m_bar[i],
                            s_bar: self.ws.s_bar[i],
                        });
                    }
                }
                self.record(rec.flip_set.clone(), rec.m_bar, before, i_start, end);
                e_prev = rec.flip_set;
            }
        }

        self.zero_bias = zero;
        ScosOutcome {
            u_hat: omega.then(|| self.ws.u_hat.clone()),
            pm: if omega { self.ws.m_cml } else { f64::INFINITY },
            omega,
            node_visits: self.visits,
            leaves_found: leaves,
            budget_exhausted: exhausted,
        }
    }

    fn record(
        &mut self,
        flip_set: Vec<usize>,
        m_bar: f64,
        before: f64,
        i_start: usize,
        end: PassEnd,
    ) {
        if let Some(t) = self.trace.as_mut() {
            let last = match end {
                PassEnd::Leaf => self.ws.m.len() - 1,
                PassEnd::Pruned(i) => i,
                PassEnd::Exhausted => i_start.saturating_sub(1),
            };
            t.push(PassTrace {
                flip_set,
                m_bar,
                m_cml_before: before,
                m_cml_after: self.ws.m_cml,
                i_start,
                end,
                pm_at_end: self.ws.m[last],
            });
        }
    }
}

/// Ordered search without a metric threshold.
pub fn scos(spec: &CodeSpec, llr: &[f64], cfg: &ScosConfig) -> ScosOutcome {
    let cfg = ScosConfig {
        m_max: f64::INFINITY,
        ..cfg.clone()
    };
    ScosDecoder::new(spec.n()).decode(spec, llr, &cfg)
}

/// Ordered search with the threshold `cfg.m_max`.
pub fn scos_with_max_pm(spec: &CodeSpec, llr: &[f64], cfg: &ScosConfig) -> ScosOutcome {
    ScosDecoder::new(spec.n()).decode(spec, llr, cfg)
}
