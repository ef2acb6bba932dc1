//! Modified G_N-coset codes.
//!
//! A code is described by its block length `N = 2^n`, an information set
//! `A` and, for every frozen index, the set of earlier information indices
//! whose XOR gives the frozen bit (an empty set means a static zero). All
//! indices exposed by this module are 1-based.
//!
//! Encoding computes `c = u B_N G_2^{(x)n}` where `B_N` is the bit-reversal
//! permutation.

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::crc::{parse_bit_string, CrcSpec};
use crate::error::{invalid, Error, Result};

/// `2^(1/4)`, the usual polarization-weight base.
pub const PW_BETA: f64 = 1.189_207_115_002_721;

/// How a code was built. Only used for bookkeeping and file round trips.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
}

/// A modified G_N-coset code, optionally with an outer CRC.
///
/// With a CRC attached, the `K` information bits are a payload of
/// `K - crc.degree()` bits followed by its CRC remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: usize,
    info_set: Vec<usize>,
    constraints: BTreeMap<usize, Vec<usize>>,
    crc: Option<CrcSpec>,
    provenance: Provenance,
    // 0-based per-phase view used by the decoders.
    is_info: Vec<bool>,
    deps: Vec<Vec<usize>>,
}

impl CodeSpec {
    /// Builds and validates a spec. Frozen indices missing from
    /// `constraints` are static zeros.
    pub fn new(
        n: usize,
        info_set: Vec<usize>,
        constraints: BTreeMap<usize, Vec<usize>>,
    ) -> Result<Self> {
        if n > 24 {
            return invalid(format!("n = {n} is too large"));
        }
        let len = 1usize << n;
        let mut info_set = info_set;
        info_set.sort_unstable();
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("duplicate info index".into()));
        }
        if info_set.iter().any(|&i| i == 0 || i > len) {
            return Err(Error::InvalidSpec(format!(
                "info indices must lie in 1..={len}"
            )));
        }
        let mut is_info = vec![false; len];
        for &i in &info_set {
            is_info[i - 1] = true;
        }
        let mut deps = vec![Vec::new(); len];
        let mut normalized = BTreeMap::new();
        for (&i, js) in &constraints {
            if i == 0 || i > len {
                return Err(Error::InvalidSpec(format!(
                    "constraint index {i} out of range"
                )));
            }
            if is_info[i - 1] {
                return Err(Error::InvalidSpec(format!(
                    "index {i} is both information and frozen"
                )));
            }
            let mut js = js.clone();
            js.sort_unstable();
            js.dedup();
            for &j in &js {
                if j == 0 || j >= i || !is_info[j - 1] {
                    return Err(Error::InvalidSpec(format!(
                        "frozen bit {i} depends on {j}, which is not an earlier info index"
                    )));
                }
            }
            deps[i - 1] = js.iter().map(|j| j - 1).collect();
            if !js.is_empty() {
                normalized.insert(i, js);
            }
        }
        Ok(Self {
            n,
            info_set,
            constraints: normalized,
            crc: None,
            provenance: Provenance::default(),
            is_info,
            deps,
        })
    }

    /// A code with all frozen bits statically zero.
    pub fn with_info_set(n: usize, info_set: Vec<usize>) -> Result<Self> {
        Self::new(n, info_set, BTreeMap::new())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_crc(mut self, crc: CrcSpec) -> Result<Self> {
        if crc.degree() > self.k() {
            return invalid(format!(
                "CRC degree {} exceeds K = {}",
                crc.degree(),
                self.k()
            ));
        }
        self.crc = Some(crc);
        Ok(self)
    }

    /// log2 of the block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length N.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension K = |A|.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    /// Number of payload bits: K minus the CRC degree.
    pub fn payload_len(&self) -> usize {
        self.k() - self.crc.as_ref().map_or(0, |c| c.degree())
    }

    pub fn rate(&self) -> f64 {
        self.payload_len() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn constraints(&self) -> &BTreeMap<usize, Vec<usize>> {
        &self.constraints
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// True when 1-based index `i` carries information.
    pub fn is_info(&self, i: usize) -> bool {
        self.is_info[i - 1]
    }

    /// 0-based information mask.
    pub(crate) fn info_mask(&self) -> &[bool] {
        &self.is_info
    }

    /// Value of the frozen bit at 0-based phase `phase0` given the decided
    /// prefix `v` (0-based).
    #[inline]
    pub(crate) fn frozen_value(&self, phase0: usize, v: &[u8]) -> u8 {
        self.deps[phase0].iter().fold(0u8, |acc, &j| acc ^ v[j])
    }

    /// Places `info_bits` on the information set and evaluates the frozen
    /// constraints, returning `u^N`.
    pub fn place(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.k() {
            return invalid(format!(
                "expected {} info bits, got {}",
                self.k(),
                info_bits.len()
            ));
        }
        let mut u = vec![0u8; self.len()];
        let mut next = info_bits.iter();
        for p in 0..self.len() {
            u[p] = if self.is_info[p] {
                next.next().copied().unwrap_or(0) & 1
            } else {
                self.frozen_value(p, &u)
            };
        }
        Ok(u)
    }

    /// Information bits (in info-set order) of an input vector `u^N`.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&i| u[i - 1]).collect()
    }

    /// Appends the CRC (if any) to a payload, giving the K info bits.
    pub fn info_from_payload(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.payload_len() {
            return invalid(format!(
                "expected {} payload bits, got {}",
                self.payload_len(),
                payload.len()
            ));
        }
        Ok(match &self.crc {
            Some(crc) => crc.append(payload),
            None => payload.to_vec(),
        })
    }

    /// CRC test on an input vector `u^N`; always true without a CRC.
    pub fn crc_check(&self, u: &[u8]) -> bool {
        match &self.crc {
            Some(crc) => crc.check(&self.extract(u)),
            None => true,
        }
    }

    /// Returns true when `u` satisfies every frozen constraint.
    pub fn is_valid_input(&self, u: &[u8]) -> bool {
        u.len() == self.len()
            && (0..self.len()).all(|p| self.is_info[p] || u[p] == self.frozen_value(p, u))
    }

    /// Encodes K information bits into a codeword `c^N`.
    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let u = self.place(info_bits)?;
        Ok(transform(&u))
    }

    /// Short content hash used to key cached bias profiles.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.n.to_le_bytes());
        for &i in &self.info_set {
            hasher.update(i.to_le_bytes());
        }
        for (i, js) in &self.constraints {
            hasher.update(b"c");
            hasher.update(i.to_le_bytes());
            for j in js {
                hasher.update(j.to_le_bytes());
            }
        }
        if let Some(crc) = &self.crc {
            hasher.update(b"crc");
            hasher.update(crc.taps());
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Serializes to the TOML code-spec format.
    pub fn to_toml(&self) -> String {
        let file = CodeSpecFile {
            n: self.n,
            k: self.k(),
            info_set: self.info_set.clone(),
            crc: self.crc.as_ref().map(|c| CrcFile {
                taps: c.to_bit_string(),
            }),
            provenance: self.provenance.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|(i, js)| (i.to_string(), js.clone()))
                .collect(),
        };
        toml::to_string(&file).expect("code spec serialization cannot fail")
    }

    /// Parses the TOML code-spec format and validates every invariant.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: CodeSpecFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut constraints = BTreeMap::new();
        for (key, js) in file.constraints {
            let i: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad constraint key {key:?}")))?;
            constraints.insert(i, js);
        }
        let spec = Self::new(file.n, file.info_set, constraints)?;
        if spec.k() != file.k {
            return Err(Error::InvalidSpec(format!(
                "k = {} but info_set has {} entries",
                file.k,
                spec.k()
            )));
        }
        let spec = spec.with_provenance(file.provenance);
        match file.crc {
            Some(c) => spec.with_crc(CrcSpec::from_bit_string(&c.taps)?),
            None => Ok(spec),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CrcFile {
    taps: String,
}

#[derive(Serialize, Deserialize)]
struct CodeSpecFile {
    n: usize,
    k: usize,
    info_set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    crc: Option<CrcFile>,
    #[serde(default)]
    provenance: Provenance,
    #[serde(default)]
    constraints: BTreeMap<String, Vec<usize>>,
}

/// Bit-reverses the lowest `bits` bits of `x`.
#[inline]
pub fn bit_reverse(x: usize, bits: usize) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS as usize - bits)
    }
}

/// Computes `u B_N G_2^{(x)n}` in O(N log N).
pub fn transform(u: &[u8]) -> Vec<u8> {
    let len = u.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let n = len.trailing_zeros() as usize;
    let mut x: Vec<u8> = (0..len).map(|k| u[bit_reverse(k, n)]).collect();
    let mut half = 1;
    while half < len {
        for block in x.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    x
}

fn check_n(n: usize) -> Result<()> {
    if n > 24 {
        return invalid(format!("n = {n} is too large"));
    }
    Ok(())
}

/// Info set of RM(r, n): indices whose `i - 1` has Hamming weight >= n - r.
pub fn rm_info_set(r: usize, n: usize) -> Result<Vec<usize>> {
    check_n(n)?;
    if r > n {
        return invalid(format!("RM order r = {r} exceeds n = {n}"));
    }
    Ok((1..=1usize << n)
        .filter(|&i| ((i - 1).count_ones() as usize) + r >= n)
        .collect())
}

/// Polarization weight of 1-based index `i`.
pub fn polarization_weight(i: usize, beta: f64) -> f64 {
    let x = i - 1;
    (0..usize::BITS)
        .filter(|&k| x >> k & 1 == 1)
        .map(|k| beta.powi(k as i32))
        .sum()
}

// Highest-weight `k` members of `candidates`, ties toward the larger index,
// returned ascending.
fn top_by_weight(candidates: &[usize], k: usize, beta: f64) -> Vec<usize> {
    let mut ranked: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&i| (polarization_weight(i, beta), i))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
    let mut chosen: Vec<usize> = ranked.into_iter().take(k).map(|(_, i)| i).collect();
    chosen.sort_unstable();
    chosen
}

/// Polar info set chosen by β-expansion polarization weight.
pub fn polar_info_set_pw(n: usize, k: usize, beta: f64) -> Result<Vec<usize>> {
    check_n(n)?;
    let len = 1usize << n;
    if k > len {
        return invalid(format!("K = {k} exceeds N = {len}"));
    }
    let all: Vec<usize> = (1..=len).collect();
    Ok(top_by_weight(&all, k, beta))
}

/// RM-polar info set: the `k` highest-weight members of RM(r, n).
pub fn rm_polar_info_set(n: usize, r: usize, k: usize, beta: f64) -> Result<Vec<usize>> {
    let rm = rm_info_set(r, n)?;
    if k > rm.len() {
        return invalid(format!("K = {k} exceeds |RM({r},{n})| = {}", rm.len()));
    }
    Ok(top_by_weight(&rm, k, beta))
}

/// Convolutional dynamic-frozen constraints.
///
/// `g[k - 1]` is the tap at offset `k`: a frozen `u_i` equals the XOR of
/// `u_{i-k}` over the set taps with `i - k >= 1`. Taps that land on frozen
/// positions are replaced by that position's own constraint, so the result
/// only references information indices.
pub fn pac_constraints(
    n: usize,
    info_set: &[usize],
    g: &[u8],
) -> Result<BTreeMap<usize, Vec<usize>>> {
    check_n(n)?;
    let len = 1usize << n;
    let info: BTreeSet<usize> = info_set.iter().copied().collect();
    let mut resolved: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for i in (1..=len).filter(|i| !info.contains(i)) {
        let mut set = BTreeSet::new();
        for (k, _) in g.iter().enumerate().filter(|(_, &t)| t == 1) {
            let offset = k + 1;
            if offset >= i {
                continue;
            }
            let j = i - offset;
            if info.contains(&j) {
                toggle(&mut set, j);
            } else {
                for &d in &resolved[&j] {
                    toggle(&mut set, d);
                }
            }
        }
        resolved.insert(i, set);
    }
    Ok(resolved
        .into_iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| (i, s.into_iter().collect()))
        .collect())
}

fn toggle(set: &mut BTreeSet<usize>, x: usize) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// PAC code with the RM(r, n) information set and tap vector `g`.
pub fn pac_code(n: usize, r: usize, g: &[u8]) -> Result<CodeSpec> {
    let info = rm_info_set(r, n)?;
    let constraints = pac_constraints(n, &info, g)?;
    Ok(
        CodeSpec::new(n, info, constraints)?.with_provenance(Provenance {
            rule: "pac".into(),
            r: Some(r),
            g: Some(g.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()),
            ..Provenance::default()
        }),
    )
}

/// Parses a tap string such as `"011011"`.
pub fn parse_taps(s: &str) -> Result<Vec<u8>> {
    parse_bit_string(s)
}

/// Draws a member of the dRM-polar ensemble around `base`.
///
/// For every frozen index in ascending order, and every earlier info index
/// in ascending order, one coefficient is drawn as the low bit of
/// `next_u32()` from a `ChaCha8Rng` seeded with `seed`.
pub fn sample_drm_polar(base: &CodeSpec, seed: u64) -> Result<CodeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = sample_drm_polar_with(base, &mut rng)?;
    spec.provenance.rule = "drm-polar".into();
    spec.provenance.seed = Some(seed);
    Ok(spec)
}

/// Same as [`sample_drm_polar`] with a caller-supplied generator.
pub fn sample_drm_polar_with<R: RngCore>(base: &CodeSpec, rng: &mut R) -> Result<CodeSpec> {
    let mut constraints = BTreeMap::new();
    for i in (1..=base.len()).filter(|&i| !base.is_info(i)) {
        let js: Vec<usize> = base
            .info_set()
            .iter()
            .copied()
            .take_while(|&j| j < i)
            .filter(|_| rng.next_u32() & 1 == 1)
            .collect();
        constraints.insert(i, js);
    }
    let spec = CodeSpec::new(base.n(), base.info_set().to_vec(), constraints)?;
    Ok(spec.with_provenance(base.provenance().clone()))
}

/// Polar code of `k_outer + crc.degree()` PW-selected indices carrying a
/// `k_outer`-bit payload and its CRC.
pub fn crc_polar_spec(n: usize, k_outer: usize, crc: CrcSpec, beta: f64) -> Result<CodeSpec> {
    check_n(n)?;
    let len = 1usize << n;
    let k = k_outer + crc.degree();
    if k > len {
        return invalid(format!(
            "payload {k_outer} plus CRC degree {} exceeds N = {len}",
            crc.degree()
        ));
    }
    let info = polar_info_set_pw(n, k, beta)?;
    CodeSpec::with_info_set(n, info)?
        .with_provenance(Provenance {
            rule: "crc-polar".into(),
            beta: Some(beta),
            ..Provenance::default()
        })
        .with_crc(crc)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force generator matrix B_N * F^{(x)n} as rows of bits.
    fn generator_matrix(n: usize) -> Vec<Vec<u8>> {
        let mut f = vec![vec![1u8]];
        for _ in 0..n {
            let m = f.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..m {
                for c in 0..m {
                    next[r][c] = f[r][c];
                    next[r + m][c] = f[r][c];
                    next[r + m][c + m] = f[r][c];
                }
            }
            f = next;
        }
        (0..f.len()).map(|r| f[bit_reverse(r, n)].clone()).collect()
    }

    fn matrix_encode(u: &[u8], g: &[Vec<u8>]) -> Vec<u8> {
        let mut c = vec![0u8; u.len()];
        for (r, &bit) in u.iter().enumerate() {
            if bit == 1 {
                for (ci, gi) in c.iter_mut().zip(&g[r]) {
                    *ci ^= gi;
                }
            }
        }
        c
    }

    #[test]
    fn encode_examples() {
        let spec = CodeSpec::with_info_set(1, vec![1, 2]).unwrap();
        assert_eq!(spec.encode(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(transform(&[0, 1, 0, 0]), vec![1, 0, 1, 0]);
        let spec = CodeSpec::with_info_set(2, vec![4]).unwrap();
        assert_eq!(spec.encode(&[0]).unwrap(), vec![0; 4]);
        assert!(spec.encode(&[0, 1]).is_err());
    }

    #[test]
    fn transform_matches_matrix_for_all_inputs() {
        for n in 0..=4 {
            let g = generator_matrix(n);
            let len = 1usize << n;
            for word in 0..1u32 << len {
                let u: Vec<u8> = (0..len).map(|k| (word >> k & 1) as u8).collect();
                assert_eq!(transform(&u), matrix_encode(&u, &g));
            }
        }
    }

    #[test]
    fn rm_sets() {
        assert_eq!(rm_info_set(3, 3).unwrap(), (1..=8).collect::<Vec<_>>());
        assert_eq!(rm_info_set(0, 3).unwrap(), vec![8]);
        assert_eq!(rm_info_set(1, 2).unwrap(), vec![2, 3, 4]);
        assert!(rm_info_set(4, 3).is_err());
        let binom =
            |n: usize, k: usize| -> usize { (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1)) };
        for n in 0..=8 {
            for r in 0..=n {
                let expected: usize = (0..=r).map(|k| binom(n, k)).sum();
                assert_eq!(rm_info_set(r, n).unwrap().len(), expected);
            }
        }
        assert_eq!(rm_info_set(3, 7).unwrap().len(), 64);
    }

    #[test]
    fn pw_sets() {
        assert_eq!(
            polar_info_set_pw(3, 8, PW_BETA).unwrap(),
            (1..=8).collect::<Vec<_>>()
        );
        assert!(polar_info_set_pw(3, 0, PW_BETA).unwrap().is_empty());
        assert_eq!(polar_info_set_pw(3, 4, PW_BETA).unwrap(), vec![4, 6, 7, 8]);
        assert!(polar_info_set_pw(3, 9, PW_BETA).is_err());
    }

    #[test]
    fn rm_polar_sets() {
        let rm = rm_info_set(2, 3).unwrap();
        assert_eq!(rm_polar_info_set(3, 2, rm.len(), PW_BETA).unwrap(), rm);
        // weights of i-1 = 4..7 are 1.414, 2.414, 2.603, 3.603; top three.
        assert_eq!(rm_polar_info_set(3, 2, 3, PW_BETA).unwrap(), vec![6, 7, 8]);
        let set = rm_polar_info_set(8, 4, 154, PW_BETA).unwrap();
        assert_eq!(set.len(), 154);
        assert!(set.iter().all(|&i| (i - 1).count_ones() >= 4));
        assert!(rm_polar_info_set(3, 1, 5, PW_BETA).is_err());
    }

    #[test]
    fn pac_examples() {
        let g = parse_taps("011011").unwrap();
        let info: Vec<usize> = (1..=6).collect();
        let c = pac_constraints(3, &info, &g).unwrap();
        assert_eq!(c[&7], vec![1, 2, 4, 5]);
        let c = pac_constraints(2, &[1, 2], &g).unwrap();
        assert_eq!(c[&3], vec![1]);
        let zero = pac_constraints(7, &rm_info_set(3, 7).unwrap(), &[0; 6]).unwrap();
        assert!(zero.is_empty());
    }

    #[test]
    fn pac_substitution_matches_literal_rule() {
        // Evaluating the shift rule literally on u must agree with the
        // normalized constraint table for every info word.
        let n = 4;
        let g = parse_taps("011011").unwrap();
        let info = rm_info_set(2, n).unwrap();
        let spec = CodeSpec::new(n, info.clone(), pac_constraints(n, &info, &g).unwrap()).unwrap();
        for word in 0..1u32 << info.len() {
            let bits: Vec<u8> = (0..info.len()).map(|k| (word >> k & 1) as u8).collect();
            let u = spec.place(&bits).unwrap();
            for i in 1..=16usize {
                if !spec.is_info(i) {
                    let lit = g
                        .iter()
                        .enumerate()
                        .filter(|(k, &t)| t == 1 && k + 1 < i)
                        .fold(0u8, |acc, (k, _)| acc ^ u[i - k - 2]);
                    assert_eq!(u[i - 1], lit, "frozen {i}");
                }
            }
        }
    }

    #[test]
    fn pac_128_64_constraints_are_causal() {
        let spec = pac_code(7, 3, &parse_taps("011011").unwrap()).unwrap();
        assert_eq!((spec.len(), spec.k()), (128, 64));
        for (&i, js) in spec.constraints() {
            assert!(!spec.is_info(i));
            assert!(js.iter().all(|&j| j < i && spec.is_info(j)));
        }
    }

    struct ZeroRng;
    impl RngCore for ZeroRng {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            dst.fill(0)
        }
    }

    #[test]
    fn drm_polar_sampling() {
        let info = rm_polar_info_set(3, 2, 4, PW_BETA).unwrap();
        let base = CodeSpec::with_info_set(3, info).unwrap();
        let a = sample_drm_polar(&base, 1).unwrap();
        let b = sample_drm_polar(&base, 1).unwrap();
        assert_eq!(a.constraints(), b.constraints());
        let zero = sample_drm_polar_with(&base, &mut ZeroRng).unwrap();
        assert!(zero.constraints().is_empty());

        // Independent replay of the documented draw order.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut expected = BTreeMap::new();
        for i in 1..=8usize {
            if base.info_set().contains(&i) {
                continue;
            }
            let mut js = Vec::new();
            for &j in base.info_set() {
                if j < i && rng.next_u32() % 2 == 1 {
                    js.push(j);
                }
            }
            if !js.is_empty() {
                expected.insert(i, js);
            }
        }
        assert_eq!(a.constraints(), &expected);
    }

    #[test]
    fn crc_polar_dimensions() {
        let spec = crc_polar_spec(7, 64, CrcSpec::crc7(), PW_BETA).unwrap();
        assert_eq!(spec.k(), 71);
        assert_eq!(spec.payload_len(), 64);
        assert!(crc_polar_spec(3, 4, CrcSpec::crc7(), PW_BETA).is_err());
        let info = spec.info_from_payload(&[1; 64]).unwrap();
        let u = spec.place(&info).unwrap();
        assert!(spec.crc_check(&u));
        let mut bad = u.clone();
        bad[spec.info_set()[3] - 1] ^= 1;
        assert!(!spec.crc_check(&bad));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut c = BTreeMap::new();
        c.insert(1, vec![2]);
        assert!(CodeSpec::new(1, vec![2], c).is_err());
        let mut c = BTreeMap::new();
        c.insert(2, vec![1]);
        assert!(CodeSpec::new(1, vec![2], c).is_err());
        assert!(CodeSpec::with_info_set(1, vec![3]).is_err());
        assert!(CodeSpec::with_info_set(1, vec![1, 1]).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let spec = pac_code(5, 2, &parse_taps("011011").unwrap()).unwrap();
        let back = CodeSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(spec, back);
        assert_eq!(spec.content_hash(), back.content_hash());
        let crc = crc_polar_spec(6, 20, CrcSpec::crc7(), PW_BETA).unwrap();
        let back = CodeSpec::from_toml(&crc.to_toml()).unwrap();
        assert_eq!(crc, back);
        assert_ne!(crc.content_hash(), spec.content_hash());
    }

    proptest::proptest! {
        #[test]
        fn encoding_is_linear(seed in 0u64..1000, a in proptest::collection::vec(0u8..2, 11), b in proptest::collection::vec(0u8..2, 11)) {
            let info = rm_info_set(2, 4).unwrap();
            let base = CodeSpec::with_info_set(4, info).unwrap();
            let spec = sample_drm_polar(&base, seed).unwrap();
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let ca = spec.encode(&a).unwrap();
            let cb = spec.encode(&b).unwrap();
            let cs = spec.encode(&sum).unwrap();
            let xor: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
            proptest::prop_assert_eq!(cs, xor);
        }
    }
}
