//! Reference decoders: SC list, dynamic SC flip and an exhaustive ML search.

use std::cmp::Ordering;

use crate::codes::CodeSpec;
use crate::engine::{calc_pm, hard_dec, path_metric, ScTree};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SclConfig {
    pub list_size: usize,
}

impl SclConfig {
    pub fn new(list_size: usize) -> Result<Self> {
        if list_size == 0 {
            return invalid("list size must be >= 1");
        }
        Ok(Self { list_size })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SclOutcome {
    pub u_hat: Vec<u8>,
    pub pm: f64,
    /// False when the code has a CRC and no surviving path passes it.
    pub crc_pass: bool,
    /// Executed phases summed over all live paths.
    pub node_visits: u64,
}

/// SC list decoder with per-path tree storage.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    n: usize,
    trees: Vec<ScTree>,
    paths: Vec<Vec<u8>>,
    pms: Vec<f64>,
    llrs: Vec<f64>,
    loaded: Vec<bool>,
}

#[derive(Clone, Copy)]
struct Candidate {
    pm: f64,
    parent: usize,
    bit: u8,
}

impl SclDecoder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            trees: Vec::new(),
            paths: Vec::new(),
            pms: Vec::new(),
            llrs: Vec::new(),
            loaded: Vec::new(),
        }
    }

    fn ensure_slots(&mut self, count: usize) {
        let len = 1usize << self.n;
        while self.trees.len() < count {
            self.trees.push(ScTree::new(self.n));
            self.paths.push(vec![0; len]);
            self.pms.push(0.0);
            self.llrs.push(0.0);
            self.loaded.push(false);
        }
    }

    fn fork(&mut self, src: usize, dst: usize, phase0: usize, llr: &[f64]) {
        if !self.loaded[dst] {
            self.trees[dst].load_channel(llr);
            self.loaded[dst] = true;
        }
        let (a, b) = if src < dst {
            let (lo, hi) = self.trees.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.trees.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        b.copy_live_state(a, phase0);
        let (a, b) = if src < dst {
            let (lo, hi) = self.paths.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.paths.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        b[..phase0].copy_from_slice(&a[..phase0]);
    }

    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64], cfg: &SclConfig) -> SclOutcome {
        let len = spec.len();
        assert_eq!(llr.len(), len, "LLR length must equal N");
        let l_max = cfg.list_size.max(1);
        self.ensure_slots(l_max);
        self.loaded.iter_mut().for_each(|x| *x = false);
        self.trees[0].load_channel(llr);
        self.loaded[0] = true;
        self.pms[0] = 0.0;

        let mut active: Vec<usize> = vec![0];
        let mut free: Vec<usize> = (1..l_max).rev().collect();
        let mut cands: Vec<Candidate> = Vec::with_capacity(2 * l_max);
        let mut visits = 0u64;
        let info = spec.info_mask();

        for p in 0..len {
            for &s in &active {
                self.llrs[s] = self.trees[s].recursively_calc_l(p);
            }
            visits += active.len() as u64;
            if !info[p] {
                for &s in &active {
                    let bit = spec.frozen_value(p, &self.paths[s]);
                    self.pms[s] = calc_pm(self.pms[s], bit, self.llrs[s]);
                    self.paths[s][p] = bit;
                    self.trees[s].set_decision(p, bit);
                }
                continue;
            }

            cands.clear();
            for (idx, &s) in active.iter().enumerate() {
                for bit in 0..2u8 {
                    cands.push(Candidate {
                        pm: calc_pm(self.pms[s], bit, self.llrs[s]),
                        parent: idx,
                        bit,
                    });
                }
            }
            cands.sort_by(|a, b| {
                a.pm.total_cmp(&b.pm)
                    .then(a.parent.cmp(&b.parent))
                    .then(a.bit.cmp(&b.bit))
            });
            cands.truncate(l_max);

            let mut kept = vec![0u8; active.len()];
            for c in &cands {
                kept[c.parent] += 1;
            }
            for (idx, &s) in active.iter().enumerate() {
                if kept[idx] == 0 {
                    free.push(s);
                }
            }
            // Copies are taken before any decision of this phase is written.
            let mut owner_used = vec![false; active.len()];
            let mut next: Vec<(usize, Candidate)> = Vec::with_capacity(cands.len());
            for &c in &cands {
                let s = active[c.parent];
                let slot = if owner_used[c.parent] {
                    let t = free.pop().expect("list never exceeds its size");
                    self.fork(s, t, p, llr);
                    t
                } else {
                    owner_used[c.parent] = true;
                    s
                };
                next.push((slot, c));
            }
            active.clear();
            for (slot, c) in next {
                self.pms[slot] = c.pm;
                self.paths[slot][p] = c.bit;
                self.trees[slot].set_decision(p, c.bit);
                active.push(slot);
            }
        }

        // `active` is in ascending metric order with ties broken by lineage.
        let chosen = active
            .iter()
            .copied()
            .find(|&s| spec.crc_check(&self.paths[s]));
        let (slot, crc_pass) = match chosen {
            Some(s) => (s, true),
            None => {
                let best = active
                    .iter()
                    .copied()
                    .min_by(|&a, &b| self.pms[a].total_cmp(&self.pms[b]))
                    .expect("at least one path survives");
                (best, false)
            }
        };
        SclOutcome {
            u_hat: self.paths[slot].clone(),
            pm: self.pms[slot],
            crc_pass,
            node_visits: visits,
        }
    }
}

pub fn scl_decode(spec: &CodeSpec, llr: &[f64], cfg: &SclConfig) -> SclOutcome {
    SclDecoder::new(spec.n()).decode(spec, llr, cfg)
}

fn softplus_penalty(l_abs: f64, alpha: f64) -> f64 {
    (-alpha * l_abs).exp().ln_1p() / alpha
}

/// Flip metric of a set of 1-based information indices `flip_set` (sorted
/// ascending), given decision-LLR magnitudes `l_abs` (0-based by phase).
pub fn dscf_metric(
    flip_set: &[usize],
    l_abs: &[f64],
    info_set: &[usize],
    alpha: f64,
) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    let Some(&i_max) = flip_set.last() else {
        return invalid("flip set must be non-empty");
    };
    if i_max > l_abs.len() {
        return invalid("flip index beyond the available LLRs");
    }
    let direct: f64 = flip_set.iter().map(|&i| l_abs[i - 1]).sum();
    let penalty: f64 = info_set
        .iter()
        .take_while(|&&j| j <= i_max)
        .map(|&j| softplus_penalty(l_abs[j - 1], alpha))
        .sum();
    Ok(direct + penalty)
}

/// Single-flip metric of 1-based index `i`.
pub fn scf_metric_q1(l_abs: &[f64], info_set: &[usize], i: usize, alpha: f64) -> Result<f64> {
    dscf_metric(&[i], l_abs, info_set, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DscfConfig {
    pub t_max: usize,
    pub alpha: f64,
    /// Largest flipping set tried.
    pub max_order: usize,
}

impl DscfConfig {
    pub fn new(t_max: usize, alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return invalid(format!("alpha must be positive, got {alpha}"));
        }
        Ok(Self {
            t_max,
            alpha,
            max_order: 3,
        })
    }

    pub fn with_max_order(mut self, max_order: usize) -> Result<Self> {
        if max_order == 0 {
            return invalid("flip order must be >= 1");
        }
        self.max_order = max_order;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DscfOutcome {
    /// CRC-passing input vector, or `None` after `t_max` failed attempts.
    pub u_hat: Option<Vec<u8>>,
    /// Re-decoding attempts after the initial SC pass.
    pub attempts: usize,
    pub node_visits: u64,
}

/// Dynamic SC flip decoder.
#[derive(Debug, Clone)]
pub struct DscfDecoder {
    tree: ScTree,
    v: Vec<u8>,
    l_abs: Vec<f64>,
    flip: Vec<bool>,
    penalty_prefix: Vec<f64>,
}

impl DscfDecoder {
    pub fn new(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            tree: ScTree::new(n),
            v: vec![0; len],
            l_abs: vec![0.0; len],
            flip: vec![false; len],
            penalty_prefix: vec![0.0; len + 1],
        }
    }

    fn pass(&mut self, spec: &CodeSpec, start: usize, flip_set: &[usize]) -> u64 {
        let info = spec.info_mask();
        for &i in flip_set {
            self.flip[i - 1] = true;
        }
        for p in start..spec.len() {
            let l = self.tree.recursively_calc_l(p);
            self.l_abs[p] = l.abs();
            let bit = if info[p] {
                hard_dec(l) ^ self.flip[p] as u8
            } else {
                spec.frozen_value(p, &self.v)
            };
            self.v[p] = bit;
            self.tree.set_decision(p, bit);
        }
        for &i in flip_set {
            self.flip[i - 1] = false;
        }
        (spec.len() - start) as u64
    }

    fn refresh_penalties(&mut self, spec: &CodeSpec, alpha: f64) {
        let info = spec.info_mask();
        for p in 0..spec.len() {
            let add = if info[p] {
                softplus_penalty(self.l_abs[p], alpha)
            } else {
                0.0
            };
            self.penalty_prefix[p + 1] = self.penalty_prefix[p] + add;
        }
    }

    /// Inserts `parent ∪ {j}` for every information index `j > max(parent)`
    /// into the pool, which is kept sorted and at most `cap` long.
    fn extend_pool(
        &self,
        spec: &CodeSpec,
        parent: &[usize],
        pool: &mut Vec<(f64, Vec<usize>)>,
        cap: usize,
    ) {
        let base: f64 = parent.iter().map(|&i| self.l_abs[i - 1]).sum();
        let lo = parent.last().copied().unwrap_or(0);
        for &j in spec.info_set().iter().filter(|&&j| j > lo) {
            let q = base + self.l_abs[j - 1] + self.penalty_prefix[j];
            if pool.len() >= cap && pool.last().is_some_and(|w| w.0 <= q) {
                continue;
            }
            let pos = pool.partition_point(|w| w.0 <= q);
            let mut set = Vec::with_capacity(parent.len() + 1);
            set.extend_from_slice(parent);
            set.push(j);
            pool.insert(pos, (q, set));
            pool.truncate(cap);
        }
    }

    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64], cfg: &DscfConfig) -> DscfOutcome {
        assert_eq!(llr.len(), spec.len(), "LLR length must equal N");
        self.tree.load_channel(llr);
        let mut visits = self.pass(spec, 0, &[]);
        if spec.crc_check(&self.v) {
            return DscfOutcome {
                u_hat: Some(self.v.clone()),
                attempts: 0,
                node_visits: visits,
            };
        }
        let mut pool: Vec<(f64, Vec<usize>)> = Vec::new();
        self.refresh_penalties(spec, cfg.alpha);
        self.extend_pool(spec, &[], &mut pool, cfg.t_max);

        let mut prev: Vec<usize> = Vec::new();
        let mut attempts = 0;
        while attempts < cfg.t_max && !pool.is_empty() {
            let (_, set) = pool.remove(0);
            attempts += 1;
            let start = first_difference(&set, &prev);
            visits += self.pass(spec, start - 1, &set);
            if spec.crc_check(&self.v) {
                return DscfOutcome {
                    u_hat: Some(self.v.clone()),
                    attempts,
                    node_visits: visits,
                };
            }
            if set.len() < cfg.max_order {
                self.refresh_penalties(spec, cfg.alpha);
                self.extend_pool(spec, &set, &mut pool, cfg.t_max - attempts);
            }
            prev = set;
        }
        DscfOutcome {
            u_hat: None,
            attempts,
            node_visits: visits,
        }
    }
}

/// First 1-based phase at which two flipping sets lead to different paths.
fn first_difference(a: &[usize], b: &[usize]) -> usize {
    a.iter()
        .zip(b)
        .find(|(x, y)| x != y)
        .map(|(x, y)| *x.min(y))
        .unwrap_or_else(|| {
            let k = a.len().min(b.len());
            match (a.get(k), b.get(k)) {
                (Some(&x), _) | (None, Some(&x)) => x,
                (None, None) => 1,
            }
        })
}

pub fn dscf_decode(spec: &CodeSpec, llr: &[f64], cfg: &DscfConfig) -> DscfOutcome {
    DscfDecoder::new(spec.n()).decode(spec, llr, cfg)
}

/// Largest dimension accepted by [`brute_force_ml`].
pub const BRUTE_FORCE_MAX_K: usize = 20;

/// Exhaustive minimum-metric decoding over all `2^K` information words.
///
/// Ties go to the lexicographically smallest information word.
pub fn brute_force_ml(spec: &CodeSpec, llr: &[f64]) -> Result<(Vec<u8>, f64)> {
    let k = spec.k();
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::TooLarge {
            k,
            limit: BRUTE_FORCE_MAX_K,
        });
    }
    let mut tree = ScTree::new(spec.n());
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut info = vec![0u8; k];
    for word in 0u64..1 << k {
        for (j, b) in info.iter_mut().enumerate() {
            *b = (word >> (k - 1 - j) & 1) as u8;
        }
        let u = spec.place(&info)?;
        let pm = path_metric(&mut tree, llr, &u);
        let better = match &best {
            None => true,
            Some((_, b)) => pm.partial_cmp(b) == Some(Ordering::Less),
        };
        if better {
            best = Some((u, pm));
        }
    }
    Ok(best.expect("at least one codeword"))
}
