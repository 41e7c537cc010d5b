use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::trial_rng;
use crate::bits::{encode_ascii7, BitString, Configuration};
use crate::error::{Error, Result};
use crate::hash::{chaos_hash_bits, ChaosHashParams};

/// Aggregate of the Hamming distances `B_i` between digest pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionReport {
    pub n: usize,
    pub trials: usize,
    pub b_min: usize,
    pub b_max: usize,
    /// Mean changed bit number.
    pub b_mean: f64,
    /// Mean changed probability, in percent.
    pub p_mean: f64,
    pub delta_b: f64,
    /// In percent.
    pub delta_p: f64,
    /// `histogram[b]` counts the trials with `B_i = b`; length `n + 1`.
    pub histogram: Vec<u64>,
}

impl DiffusionReport {
    pub fn from_distances(n: usize, distances: &[usize]) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one trial is needed".into(),
            ));
        }
        if let Some(&b) = distances.iter().find(|&&b| b > n) {
            return Err(Error::InvalidParameter(format!(
                "distance {b} exceeds the digest size {n}"
            )));
        }
        let t = distances.len() as f64;
        let mut histogram = vec![0u64; n + 1];
        for &b in distances {
            histogram[b] += 1;
        }
        let b_mean = distances.iter().sum::<usize>() as f64 / t;
        let p = b_mean / n as f64;
        let delta_b = (distances
            .iter()
            .map(|&b| (b as f64 - b_mean).powi(2))
            .sum::<f64>()
            / t)
            .sqrt();
        let delta_p = (distances
            .iter()
            .map(|&b| (b as f64 / n as f64 - p).powi(2))
            .sum::<f64>()
            / t)
            .sqrt();
        Ok(DiffusionReport {
            n,
            trials: distances.len(),
            b_min: *distances.iter().min().expect("non-empty"),
            b_max: *distances.iter().max().expect("non-empty"),
            b_mean,
            p_mean: 100.0 * p,
            delta_b,
            delta_p: 100.0 * delta_p,
            histogram,
        })
    }

    pub const CSV_HEADER: &'static str = "n,trials,b_min,b_max,b_mean,p_mean,delta_b,delta_p";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.4},{:.4},{:.4},{:.4}",
            self.n,
            self.trials,
            self.b_min,
            self.b_max,
            self.b_mean,
            self.p_mean,
            self.delta_b,
            self.delta_p
        )
    }

    /// `distance,count` rows for every distance seen at least once.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("distance,count\n");
        for (b, &c) in self.histogram.iter().enumerate().filter(|(_, &c)| c > 0) {
            out.push_str(&format!("{b},{c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffusionConfig {
    /// Message size before encoding; `msg_len_bits / 8` characters are drawn.
    pub msg_len_bits: usize,
    pub trials: usize,
    pub seed: u64,
    /// Flip every bit of a single message instead of sampling `trials` pairs.
    pub exhaustive: bool,
}

fn random_text(rng: &mut ChaCha8Rng, chars: usize) -> Vec<u8> {
    (0..chars).map(|_| rng.gen_range(32u8..=126)).collect()
}

/// Runs `trials` independent trials; `trial` returns one Hamming distance.
pub fn diffusion_with<F>(n: usize, trials: usize, seed: u64, trial: F) -> Result<DiffusionReport>
where
    F: Fn(&mut ChaCha8Rng) -> Result<usize> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "at least one trial is needed".into(),
        ));
    }
    let distances = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t)))
        .collect::<Result<Vec<usize>>>()?;
    DiffusionReport::from_distances(n, &distances)
}

/// Hashes a random printable message, flips one bit of its 7-bit encoding,
/// hashes again and records the number of changed digest bits.
pub fn diffusion_test(
    params: &ChaosHashParams,
    config: &DiffusionConfig,
) -> Result<DiffusionReport> {
    if config.msg_len_bits < 8 || !config.msg_len_bits.is_multiple_of(8) {
        return Err(Error::InvalidParameter(format!(
            "message size must be a positive multiple of 8 bits, got {}",
            config.msg_len_bits
        )));
    }
    let chars = config.msg_len_bits / 8;
    let n = params.n();
    if config.exhaustive {
        let mut rng = trial_rng(config.seed, 0);
        let bits = encode_ascii7(&random_text(&mut rng, chars))?;
        let base = chaos_hash_bits(params, &bits)?;
        let distances = (0..bits.len())
            .into_par_iter()
            .map(|i| {
                let mut flipped = bits.clone();
                flipped.flip(i);
                base.hamming_distance(&chaos_hash_bits(params, &flipped)?)
            })
            .collect::<Result<Vec<usize>>>()?;
        return DiffusionReport::from_distances(n, &distances);
    }
    diffusion_with(n, config.trials, config.seed, |rng| {
        let bits = encode_ascii7(&random_text(rng, chars))?;
        let mut flipped = bits.clone();
        flipped.flip(rng.gen_range(0..bits.len()));
        chaos_hash_bits(params, &bits)?.hamming_distance(&chaos_hash_bits(params, &flipped)?)
    })
}

fn random_configuration(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    let mut bits = BitString::with_capacity(n);
    let mut left = n;
    while left > 0 {
        let width = left.min(64);
        bits.push_value(rng.gen::<u64>() >> (64 - width), width);
        left -= width;
    }
    Configuration::new(bits).expect("n >= 1")
}

/// The same harness driven by a fair-coin "hash": both digests of a trial are
/// independent uniform `n`-bit strings, so `B_i ~ Binomial(n, 1/2)`.
pub fn reference_diffusion(n: usize, trials: usize, seed: u64) -> Result<DiffusionReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "digest size must be positive".into(),
        ));
    }
    diffusion_with(n, trials, seed, |rng| {
        random_configuration(rng, n).hamming_distance(&random_configuration(rng, n))
    })
}
