//! BPSK over the binary-input AWGN channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Noise standard deviation for a given Eb/N0 (dB) and code rate.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return invalid(format!("rate must lie in (0, 1], got {rate}"));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        let sigma = ebn0_to_sigma(ebn0_db, rate)?;
        Ok(Self {
            ebn0_db,
            rate,
            sigma,
        })
    }
}

/// Channel LLRs `2 y / sigma^2` for `y = (1 - 2c) + sigma z`.
pub fn llrs_from_noise(codeword: &[u8], sigma: f64, noise: &[f64]) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    codeword
        .iter()
        .zip(noise)
        .map(|(&c, &z)| scale * (bpsk(c) + sigma * z))
        .collect()
}

/// Transmits a codeword, drawing standard normal noise from `rng`.
pub fn transmit<R: Rng + ?Sized>(codeword: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    let noise: Vec<f64> = codeword
        .iter()
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    llrs_from_noise(codeword, sigma, &noise)
}

/// LLRs of a noiseless transmission.
pub fn noiseless_llrs(codeword: &[u8], sigma: f64) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    codeword.iter().map(|&c| scale * bpsk(c)).collect()
}

#[inline]
fn bpsk(c: u8) -> f64 {
    if c & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent random stream for one frame.
///
/// The stream depends only on `(seed, point, frame)`, so simulation results
/// do not depend on how frames are spread over workers.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(splitmix64(seed ^ splitmix64(point)));
    rng.set_stream(frame);
    rng
}
