//! Successive cancellation substrate shared by every decoder.
//!
//! [`ScTree`] holds the `(n + 1) x N` LLR and partial-sum arrays. Layer 0
//! stores the channel LLRs in bit-reversed order, so that the butterfly
//! below decodes `u G_2^{(x)n}` and the bit reversal of `B_N` is absorbed
//! at load time. Layer `d` is split into `2^d` blocks of `N >> d` entries;
//! phase `p` (0-based) owns block `p >> (n - d)` on layer `d`.
//!
//! Recomputation is incremental: phase `p > 0` only refreshes the layers
//! `n - tz(p) ..= n`, where `tz` counts trailing zeros.

use crate::codes::{bit_reverse, CodeSpec};

/// Min-sum check-node update `sign(a) sign(b) min(|a|, |b|)`, `sign(0) = +1`.
#[inline]
pub fn f_minsum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Variable-node update `b + (1 - 2s) a`.
#[inline]
pub fn g_update(a: f64, b: f64, s: u8) -> f64 {
    if s & 1 == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision; zero maps to 0.
#[inline]
pub fn hard_dec(l: f64) -> u8 {
    if l >= 0.0 {
        0
    } else {
        1
    }
}

/// Min-sum path-metric update: unchanged when `v` agrees with the hard
/// decision on `l`, otherwise increased by `|l|`.
#[inline]
pub fn calc_pm(m: f64, v: u8, l: f64) -> f64 {
    if v == hard_dec(l) {
        m
    } else {
        m + l.abs()
    }
}

/// LLR and partial-sum arrays of one SC decoding path.
#[derive(Debug, Clone)]
pub struct ScTree {
    n: usize,
    len: usize,
    llr: Vec<f64>,
    bits: Vec<u8>,
    committed: usize,
}

impl ScTree {
    pub fn new(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            n,
            len,
            llr: vec![0.0; (n + 1) * len],
            bits: vec![0; (n + 1) * len],
            committed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Loads channel LLRs and resets the committed prefix.
    pub fn load_channel(&mut self, llr: &[f64]) {
        assert_eq!(llr.len(), self.len, "LLR length must equal N");
        for k in 0..self.len {
            self.llr[k] = llr[bit_reverse(k, self.n)];
        }
        self.committed = 0;
    }

    /// Number of leading phases whose decisions are written to the
    /// partial-sum arrays.
    pub fn committed(&self) -> usize {
        self.committed
    }

    /// Forgets decisions from 1-based phase `phase + 1` on.
    pub fn truncate_committed(&mut self, phase: usize) {
        self.committed = self.committed.min(phase);
    }

    /// LLR entry on `layer` at position `index` of the internal layout.
    pub fn llr_at(&self, layer: usize, index: usize) -> f64 {
        self.llr[layer * self.len + index]
    }

    /// Computes the decision LLR of 0-based phase `phase0`.
    ///
    /// Requires the decisions of phases `0..phase0` to be committed.
    pub fn recursively_calc_l(&mut self, phase0: usize) -> f64 {
        let n = self.n;
        let len = self.len;
        let start = if phase0 == 0 {
            1
        } else {
            n - phase0.trailing_zeros() as usize
        };
        for d in start..=n {
            let size = len >> d;
            let blk = phase0 >> (n - d);
            let base = blk * size;
            let parent = (blk >> 1) * 2 * size;
            let (upper, lower) = self.llr.split_at_mut(d * len);
            let prev = &upper[(d - 1) * len + parent..(d - 1) * len + parent + 2 * size];
            let (top, bottom) = prev.split_at(size);
            let cur = &mut lower[base..base + size];
            if blk & 1 == 0 {
                for ((out, &a), &b) in cur.iter_mut().zip(top).zip(bottom) {
                    *out = f_minsum(a, b);
                }
            } else {
                let left = &self.bits[d * len + base - size..d * len + base];
                for (((out, &a), &b), &s) in cur.iter_mut().zip(top).zip(bottom).zip(left) {
                    *out = g_update(a, b, s);
                }
            }
        }
        self.llr[n * len + phase0]
    }

    /// Writes the decision of 0-based phase `phase0` and propagates partial
    /// sums when it completes a right child.
    pub fn set_decision(&mut self, phase0: usize, bit: u8) {
        self.bits[self.n * self.len + phase0] = bit;
        self.committed = phase0 + 1;
        if phase0 & 1 == 1 {
            self.recursively_calc_c(phase0);
        }
    }

    /// Combines completed sibling blocks upward from phase `phase0`.
    pub fn recursively_calc_c(&mut self, phase0: usize) {
        let len = self.len;
        let mut d = self.n;
        let mut blk = phase0;
        while d > 0 && blk & 1 == 1 {
            let size = len >> d;
            let left = (blk - 1) * size;
            let (upper, lower) = self.bits.split_at_mut(d * len);
            let src = &lower[left..left + 2 * size];
            let dst = &mut upper[(d - 1) * len + left..(d - 1) * len + left + 2 * size];
            let (dl, dr) = dst.split_at_mut(size);
            let (sl, sr) = src.split_at(size);
            for j in 0..size {
                dl[j] = sl[j] ^ sr[j];
                dr[j] = sr[j];
            }
            d -= 1;
            blk >>= 1;
        }
    }

    /// Re-encoded bottom layer in channel order. After all N decisions this
    /// equals the encoding of the decided input vector.
    pub fn codeword(&self) -> Vec<u8> {
        (0..self.len)
            .map(|j| self.bits[bit_reverse(j, self.n)])
            .collect()
    }

    /// Copies from `src` everything that phases after `phase0` will read:
    /// on each layer, the sibling pair of blocks on the path of `phase0`.
    /// The channel layer is assumed to be loaded already.
    pub fn copy_live_state(&mut self, src: &ScTree, phase0: usize) {
        debug_assert_eq!(self.n, src.n);
        let len = self.len;
        for d in 1..=self.n {
            let size = len >> d;
            let pair = ((phase0 >> (self.n - d)) >> 1) * 2 * size;
            let range = d * len + pair..d * len + pair + 2 * size;
            self.llr[range.clone()].copy_from_slice(&src.llr[range.clone()]);
            self.bits[range.clone()].copy_from_slice(&src.bits[range]);
        }
        self.committed = src.committed;
    }
}

/// Working state of the ordered-search decoder: tree arrays plus the
/// per-phase metric arrays. Metric arrays are indexed by 1-based phase, with
/// `m[0] = 0`.
#[derive(Debug, Clone)]
pub struct DecoderWorkspace {
    pub(crate) tree: ScTree,
    pub(crate) v: Vec<u8>,
    pub(crate) u_hat: Vec<u8>,
    pub(crate) m: Vec<f64>,
    pub(crate) m_bar: Vec<f64>,
    pub(crate) s_bar: Vec<f64>,
    pub(crate) m_cml: f64,
}

impl DecoderWorkspace {
    pub fn new(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            tree: ScTree::new(n),
            v: vec![0; len],
            u_hat: vec![0; len],
            m: vec![0.0; len + 1],
            m_bar: vec![f64::INFINITY; len + 1],
            s_bar: vec![f64::INFINITY; len + 1],
            m_cml: f64::INFINITY,
        }
    }

    /// Loads a frame and clears all metrics.
    pub fn reset(&mut self, llr: &[f64], m_cml: f64) {
        self.tree.load_channel(llr);
        self.u_hat.fill(0);
        self.m.fill(0.0);
        self.m_bar.fill(f64::INFINITY);
        self.s_bar.fill(f64::INFINITY);
        self.m_cml = m_cml;
    }

    pub fn tree(&self) -> &ScTree {
        &self.tree
    }

    /// Current working path `v` (0-based).
    pub fn path(&self) -> &[u8] {
        &self.v
    }

    /// Best leaf found so far.
    pub fn best_leaf(&self) -> &[u8] {
        &self.u_hat
    }

    /// Running path metric after 1-based phase `i` (`i = 0` gives 0).
    pub fn pm(&self, i: usize) -> f64 {
        self.m[i]
    }

    /// Metric of the flipped decision at 1-based phase `i`.
    pub fn flipped_pm(&self, i: usize) -> f64 {
        self.m_bar[i]
    }

    /// Score of the flipped decision at 1-based phase `i`.
    pub fn flipped_score(&self, i: usize) -> f64 {
        self.s_bar[i]
    }

    pub fn current_best_pm(&self) -> f64 {
        self.m_cml
    }
}

/// Plain SC decoder with a reusable tree.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    tree: ScTree,
    v: Vec<u8>,
    llrs: Vec<f64>,
}

impl ScDecoder {
    pub fn new(n: usize) -> Self {
        Self {
            tree: ScTree::new(n),
            v: vec![0; 1 << n],
            llrs: vec![0.0; 1 << n],
        }
    }

    /// Decodes one frame, returning the SC path `v^N` and its metric.
    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64]) -> (Vec<u8>, f64) {
        self.tree.load_channel(llr);
        let info = spec.info_mask();
        let mut pm = 0.0;
        for p in 0..self.tree.len() {
            let l = self.tree.recursively_calc_l(p);
            self.llrs[p] = l;
            let bit = if info[p] {
                hard_dec(l)
            } else {
                spec.frozen_value(p, &self.v)
            };
            pm = calc_pm(pm, bit, l);
            self.v[p] = bit;
            self.tree.set_decision(p, bit);
        }
        (self.v.clone(), pm)
    }

    /// Decision LLRs of the last decoded frame.
    pub fn decision_llrs(&self) -> &[f64] {
        &self.llrs
    }

    /// Partial sums of the last frame, re-encoded to channel order.
    pub fn codeword(&self) -> Vec<u8> {
        self.tree.codeword()
    }
}

/// One-shot SC decoding.
pub fn sc_decode(spec: &CodeSpec, llr: &[f64]) -> (Vec<u8>, f64) {
    ScDecoder::new(spec.n()).decode(spec, llr)
}

/// Min-sum metric of a given input vector `u^N`, accumulated phase by phase
/// along the SC schedule (the genie path).
pub fn path_metric(tree: &mut ScTree, llr: &[f64], u: &[u8]) -> f64 {
    tree.load_channel(llr);
    let mut pm = 0.0;
    for (p, &bit) in u.iter().enumerate() {
        let l = tree.recursively_calc_l(p);
        pm = calc_pm(pm, bit, l);
        tree.set_decision(p, bit);
    }
    pm
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::codes::{rm_info_set, transform, CodeSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Non-incremental reference: decision LLR of phase `prefix.len()` via
    /// the interleaved recursion of `B_N G_2^{(x)n}` on channel-order LLRs.
    pub(crate) fn naive_llr(llr: &[f64], prefix: &[u8]) -> f64 {
        let len = llr.len();
        if len == 1 {
            return llr[0];
        }
        let half = len / 2;
        let even: Vec<f64> = (0..half).map(|j| llr[2 * j]).collect();
        let odd: Vec<f64> = (0..half).map(|j| llr[2 * j + 1]).collect();
        if prefix.len() < half {
            let child: Vec<f64> = even
                .iter()
                .zip(&odd)
                .map(|(&a, &b)| f_minsum(a, b))
                .collect();
            naive_llr(&child, prefix)
        } else {
            let x1 = transform(&prefix[..half]);
            let child: Vec<f64> = (0..half)
                .map(|j| g_update(even[j], odd[j], x1[j]))
                .collect();
            naive_llr(&child, &prefix[half..])
        }
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(f_minsum(2.0, -3.0), -2.0);
        assert_eq!(f_minsum(0.0, 5.0), 0.0);
        assert_eq!(f_minsum(-1.5, -4.0), 1.5);
        assert_eq!(g_update(2.0, 3.0, 0), 5.0);
        assert_eq!(g_update(2.0, 3.0, 1), 1.0);
        assert_eq!(g_update(0.0, 3.0, 1), 3.0);
        assert_eq!(hard_dec(3.2), 0);
        assert_eq!(hard_dec(-0.1), 1);
        assert_eq!(hard_dec(0.0), 0);
        assert!((calc_pm(1.5, 0, -2.3) - 3.8).abs() < 1e-12);
        assert_eq!(calc_pm(1.5, 1, -2.3), 1.5);
        assert_eq!(calc_pm(0.0, 0, 0.0), 0.0);
    }

    #[test]
    fn two_point_butterfly() {
        let mut tree = ScTree::new(1);
        tree.load_channel(&[1.25, -3.0]);
        assert_eq!(tree.recursively_calc_l(0), f_minsum(1.25, -3.0));
        tree.set_decision(0, 1);
        assert_eq!(tree.recursively_calc_l(1), g_update(1.25, -3.0, 1));
        tree.set_decision(1, 1);
        assert_eq!(tree.codeword(), vec![0, 1]);
    }

    #[test]
    fn partial_sums_match_encoder() {
        let mut tree = ScTree::new(1);
        tree.load_channel(&[0.0; 2]);
        for (p, &b) in [0u8, 1].iter().enumerate() {
            tree.recursively_calc_l(p);
            tree.set_decision(p, b);
        }
        assert_eq!(tree.codeword(), vec![1, 1]);

        let mut tree = ScTree::new(2);
        tree.load_channel(&[0.0; 4]);
        for (p, &b) in [0u8, 1, 0, 0].iter().enumerate() {
            tree.recursively_calc_l(p);
            tree.set_decision(p, b);
        }
        assert_eq!(tree.codeword(), vec![1, 0, 1, 0]);

        let mut tree = ScTree::new(3);
        tree.load_channel(&[0.0; 8]);
        for p in 0..8 {
            tree.recursively_calc_l(p);
            tree.set_decision(p, 0);
        }
        assert_eq!(tree.codeword(), vec![0; 8]);
    }

    #[test]
    fn incremental_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [0usize, 1, 2, 3, 4, 5] {
            let len = 1 << n;
            let mut tree = ScTree::new(n);
            for _ in 0..200 {
                let llr: Vec<f64> = (0..len).map(|_| rng.random_range(-4.0..4.0)).collect();
                tree.load_channel(&llr);
                let mut u = Vec::new();
                for p in 0..len {
                    let l = tree.recursively_calc_l(p);
                    assert_eq!(l.to_bits(), naive_llr(&llr, &u).to_bits());
                    let bit = rng.random_range(0..2u8);
                    tree.set_decision(p, bit);
                    u.push(bit);
                }
                assert_eq!(tree.codeword(), transform(&u));
            }
        }
    }

    #[test]
    fn sc_hand_trace() {
        // N = 2, A = {2}: f(-1, 3) = -1 forces a disagreement at phase 1.
        let spec = CodeSpec::with_info_set(1, vec![2]).unwrap();
        let (u, pm) = sc_decode(&spec, &[-1.0, 3.0]);
        assert_eq!(u, vec![0, 0]);
        assert_eq!(pm, 1.0);
    }

    #[test]
    fn sc_noiseless_and_metric_identity() {
        let spec = CodeSpec::with_info_set(4, rm_info_set(2, 4).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut dec = ScDecoder::new(4);
        for _ in 0..100 {
            let info: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2u8)).collect();
            let cw = spec.encode(&info).unwrap();
            let clean: Vec<f64> = cw
                .iter()
                .map(|&c| if c == 0 { 5.0 } else { -5.0 })
                .collect();
            let (u, pm) = dec.decode(&spec, &clean);
            assert_eq!(spec.extract(&u), info);
            assert_eq!(pm, 0.0);

            let noisy: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (u, pm) = dec.decode(&spec, &noisy);
            let mut expected = 0.0;
            for (p, &l) in dec.decision_llrs().iter().enumerate() {
                if u[p] != hard_dec(l) {
                    expected += l.abs();
                }
            }
            assert_eq!(pm, expected);
            assert_eq!(dec.codeword(), transform(&u));
            let mut tree = ScTree::new(4);
            assert_eq!(path_metric(&mut tree, &noisy, &u), pm);
        }
    }

    #[test]
    fn live_copy_preserves_future_llrs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let len = 16;
        for _ in 0..100 {
            let llr: Vec<f64> = (0..len).map(|_| rng.random_range(-4.0..4.0)).collect();
            let fork = rng.random_range(0..len);
            let mut a = ScTree::new(n);
            a.load_channel(&llr);
            let mut u = Vec::new();
            for p in 0..fork {
                a.recursively_calc_l(p);
                let bit = rng.random_range(0..2u8);
                a.set_decision(p, bit);
                u.push(bit);
            }
            a.recursively_calc_l(fork);
            let mut b = ScTree::new(n);
            b.load_channel(&llr);
            b.copy_live_state(&a, fork);
            b.set_decision(fork, 1);
            u.push(1);
            for p in fork + 1..len {
                let l = b.recursively_calc_l(p);
                assert_eq!(l.to_bits(), naive_llr(&llr, &u).to_bits());
                let bit = rng.random_range(0..2u8);
                b.set_decision(p, bit);
                u.push(bit);
            }
        }
    }
}
