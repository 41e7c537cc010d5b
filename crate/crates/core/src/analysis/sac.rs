//! Dependence matrix for the strict avalanche criterion.
//!
//! For a message size `m` and digest size `n`, entry `J[i][j]` is the fraction
//! of `r` random messages `x` for which flipping input bit `i` flips output
//! bit `j`. Under the criterion every entry is close to 1/2.

use rand::Rng;
use rayon::prelude::*;

use super::trial_rng;
use crate::bits::{BitString, Configuration};
use crate::error::{Error, Result};
use crate::hash::{chaos_hash_bits, ChaosHashParams};

/// Flip counts for one message size. Rows are input bits, columns output bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceMatrix {
    rows: usize,
    cols: usize,
    r: usize,
    counts: Vec<u32>,
}

impl DependenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.cols + j]
    }

    /// `J[i][j]`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / self.r as f64
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    let mut bits = BitString::with_capacity(len);
    let mut left = len;
    while left > 0 {
        let width = left.min(64);
        bits.push_value(rng.gen::<u64>() >> (64 - width), width);
        left -= width;
    }
    bits
}

/// Builds the dependence matrix of `f` for `msg_bits`-bit messages. Message
/// `q` is drawn from stream `stream_base + q` of `seed`.
pub fn dependence_matrix<F>(
    f: &F,
    msg_bits: usize,
    out_bits: usize,
    r: usize,
    seed: u64,
    stream_base: u64,
) -> Result<DependenceMatrix>
where
    F: Fn(&BitString) -> Result<Configuration> + Sync,
{
    if msg_bits == 0 || out_bits == 0 || r == 0 {
        return Err(Error::InvalidParameter(
            "message size, digest size and r must be positive".into(),
        ));
    }
    let cells = msg_bits * out_bits;
    let counts = (0..r as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u32; cells],
            |mut acc, q| -> Result<Vec<u32>> {
                let mut rng = trial_rng(seed, stream_base + q);
                let x = random_bits(&mut rng, msg_bits);
                let fx = f(&x)?;
                if fx.n() != out_bits {
                    return Err(Error::DimensionMismatch {
                        expected: out_bits,
                        found: fx.n(),
                    });
                }
                let mut flipped = x;
                for i in 0..msg_bits {
                    flipped.flip(i);
                    let diff = fx.bits().xor(f(&flipped)?.bits())?;
                    flipped.flip(i);
                    let row = &mut acc[i * out_bits..(i + 1) * out_bits];
                    for j in diff.ones() {
                        row[j] += 1;
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u32; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(DependenceMatrix {
        rows: msg_bits,
        cols: out_bits,
        r,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SacConfig {
    /// Number of message sizes drawn uniformly from `1..=max_size`.
    pub size_samples: usize,
    /// Messages per size (`r`).
    pub messages_per_size: usize,
    pub max_size: usize,
    pub seed: u64,
}

impl SacConfig {
    pub fn new(size_samples: usize, messages_per_size: usize, seed: u64) -> Self {
        SacConfig {
            size_samples,
            messages_per_size,
            max_size: 1000,
            seed,
        }
    }
}

/// Summary of every `J[i][j]` over all sampled sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SacReport {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub r: usize,
    pub sizes: Vec<usize>,
    pub entries: u64,
}

impl SacReport {
    pub const CSV_HEADER: &'static str = "sizes,r,entries,mean,min,max,stddev";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.sizes.len(),
            self.r,
            self.entries,
            self.mean,
            self.min,
            self.max,
            self.stddev
        )
    }
}

#[derive(Default)]
struct Summary {
    sum: u128,
    sum_sq: u128,
    entries: u128,
    min: u32,
    max: u32,
}

impl Summary {
    fn add(&mut self, m: &DependenceMatrix) {
        if self.entries == 0 {
            self.min = u32::MAX;
        }
        for &c in m.counts() {
            self.sum += c as u128;
            self.sum_sq += (c as u128) * (c as u128);
            self.min = self.min.min(c);
            self.max = self.max.max(c);
        }
        self.entries += m.counts().len() as u128;
    }
}

/// Runs the dependence-matrix experiment for `f` over randomly drawn message
/// sizes and summarizes all entries.
pub fn sac_with<F>(f: &F, out_bits: usize, config: &SacConfig) -> Result<SacReport>
where
    F: Fn(&BitString) -> Result<Configuration> + Sync,
{
    if config.size_samples == 0 || config.messages_per_size == 0 || config.max_size == 0 {
        return Err(Error::InvalidParameter(
            "size samples, r and maximum size must be positive".into(),
        ));
    }
    let r = config.messages_per_size;
    let mut size_rng = trial_rng(config.seed, 0);
    let sizes: Vec<usize> = (0..config.size_samples)
        .map(|_| size_rng.gen_range(1..=config.max_size))
        .collect();
    let mut summary = Summary::default();
    for (k, &m) in sizes.iter().enumerate() {
        let base = 1 + (k as u64) * (r as u64);
        summary.add(&dependence_matrix(f, m, out_bits, r, config.seed, base)?);
    }
    let e = summary.entries;
    let rf = r as f64;
    let mean_count = summary.sum as f64 / e as f64;
    let var_count = (e * summary.sum_sq - summary.sum * summary.sum) as f64 / (e as f64 * e as f64);
    Ok(SacReport {
        mean: mean_count / rf,
        min: summary.min as f64 / rf,
        max: summary.max as f64 / rf,
        stddev: var_count.sqrt() / rf,
        r,
        sizes,
        entries: e as u64,
    })
}

/// The experiment on the chaotic hash, with messages fed in as raw bits.
pub fn sac_test(params: &ChaosHashParams, config: &SacConfig) -> Result<SacReport> {
    sac_with(
        &|x: &BitString| chaos_hash_bits(params, x),
        params.n(),
        config,
    )
}
