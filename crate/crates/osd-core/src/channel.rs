//! BPSK over AWGN with Eb/N0 parameterization and the correlation
//! discrepancy metric.
//!
//! Noise is a pure function of `(seed, frame_index)` so frames can be
//! generated in parallel, in any order, with bit-identical results.

use crate::gf2::BitVec;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// One received frame: channel outputs, their magnitudes, hard decisions.
#[derive(Debug, Clone)]
pub struct NoisyWord {
    pub soft: Vec<f64>,
    pub reliability: Vec<f64>,
    pub hard: BitVec,
}

impl NoisyWord {
    /// Decision convention: soft >= 0 maps to bit 0.
    pub fn from_soft(soft: Vec<f64>) -> Self {
        let reliability: Vec<f64> = soft.iter().map(|s| s.abs()).collect();
        let mut hard = BitVec::zeros(soft.len());
        for (i, &s) in soft.iter().enumerate() {
            if s < 0.0 {
                hard.set(i, true);
            }
        }
        Self {
            soft,
            reliability,
            hard,
        }
    }

    pub fn len(&self) -> usize {
        self.soft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.soft.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub seed: u64,
}

impl ChannelConfig {
    /// Noise variance per dimension: sigma^2 = 1 / (2 R 10^{EbN0/10}).
    pub fn noise_variance(&self) -> f64 {
        1.0 / (2.0 * self.rate * 10f64.powf(self.ebn0_db / 10.0))
    }
}

fn frame_rng(seed: u64, frame_index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&frame_index.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// BPSK map (bit 0 -> +1, bit 1 -> -1) plus AWGN.
pub fn transmit(codeword: &BitVec, cfg: &ChannelConfig, frame_index: u64) -> NoisyWord {
    let sigma = cfg.noise_variance().sqrt();
    let mut rng = frame_rng(cfg.seed, frame_index);
    let soft: Vec<f64> = (0..codeword.len())
        .map(|i| {
            let s = if codeword.get(i) { -1.0 } else { 1.0 };
            let noise: f64 = StandardNormal.sample(&mut rng);
            s + sigma * noise
        })
        .collect();
    NoisyWord::from_soft(soft)
}

/// Correlation discrepancy: sum of reliabilities where the candidate
/// disagrees with the hard decisions. Lower is more likely; minimizing it
/// over a codebook is ML decoding on this channel.
pub fn discrepancy(candidate: &BitVec, w: &NoisyWord) -> Result<f64, ChannelError> {
    if candidate.len() != w.len() {
        return Err(ChannelError::LengthMismatch {
            expected: w.len(),
            got: candidate.len(),
        });
    }
    let mut diff = candidate.clone();
    diff.xor_assign(&w.hard);
    Ok(diff.iter_ones().map(|i| w.reliability[i]).sum())
}
