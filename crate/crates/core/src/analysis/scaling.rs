use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::Rng;

use super::trial_rng;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hash::{chaos_hash_bits, ChaosHashParams};
use crate::strategy::KeyMaterial;

/// Minimum wall time of one timed batch.
const BATCH_TARGET: Duration = Duration::from_millis(5);
const MIN_RUNS: usize = 5;

/// One line of a timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    /// Message length in bits, or digest size for a digest-size sweep.
    pub size: usize,
    /// Median wall time of one hash, in seconds.
    pub median_secs: f64,
    /// `median_secs / size`.
    pub normalized: f64,
    /// This row's median over the previous row's.
    pub ratio: Option<f64>,
}

impl ScalingRow {
    pub const CSV_HEADER: &'static str = "size,median_seconds,normalized_seconds,ratio";

    pub fn csv_row(&self) -> String {
        let ratio = self.ratio.map(|r| format!("{r:.4}")).unwrap_or_default();
        format!(
            "{},{:.9e},{:.9e},{}",
            self.size, self.median_secs, self.normalized, ratio
        )
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

/// Median per-hash time of each `(params, message)` case over `runs` batches,
/// each batch long enough to dominate timer resolution. Batches are taken
/// round-robin over the cases so that a slow spell on the machine lands on
/// all of them instead of on one.
fn median_hash_times(cases: &[(ChaosHashParams, BitString)], runs: usize) -> Result<Vec<f64>> {
    let mut reps = Vec::with_capacity(cases.len());
    for (params, message) in cases {
        let start = Instant::now();
        black_box(chaos_hash_bits(params, message)?);
        let single = start.elapsed().max(Duration::from_nanos(100));
        reps.push((BATCH_TARGET.as_nanos() / single.as_nanos()).clamp(1, 100_000) as u32);
    }
    let mut samples = vec![Vec::with_capacity(runs); cases.len()];
    for _ in 0..runs {
        for ((params, message), (&reps, out)) in cases.iter().zip(reps.iter().zip(&mut samples)) {
            let start = Instant::now();
            for _ in 0..reps {
                black_box(chaos_hash_bits(params, black_box(message))?);
            }
            out.push(start.elapsed().as_secs_f64() / reps as f64);
        }
    }
    Ok(samples
        .into_iter()
        .map(|mut s| {
            s.sort_by(f64::total_cmp);
            s[s.len() / 2]
        })
        .collect())
}

fn check_sizes(sizes: &[usize], runs: usize) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter(
            "at least two sizes are needed".into(),
        ));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::InvalidParameter(
            "sizes must be positive and strictly increasing".into(),
        ));
    }
    if runs < MIN_RUNS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_RUNS} runs are needed"
        )));
    }
    Ok(())
}

fn rows(sizes: &[usize], medians: Vec<f64>) -> Vec<ScalingRow> {
    let mut out: Vec<ScalingRow> = Vec::with_capacity(sizes.len());
    for (&size, median) in sizes.iter().zip(medians) {
        let ratio = out.last().map(|prev| median / prev.median_secs);
        out.push(ScalingRow {
            size,
            median_secs: median,
            normalized: median / size as f64,
            ratio,
        });
    }
    out
}

/// Hash time against message length (bits) at a fixed digest size.
pub fn scaling_benchmark(
    params: &ChaosHashParams,
    lengths: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    check_sizes(lengths, runs)?;
    let cases: Vec<_> = lengths
        .iter()
        .enumerate()
        .map(|(k, &len)| {
            (
                params.clone(),
                random_bits(&mut trial_rng(seed, k as u64), len),
            )
        })
        .collect();
    let medians = median_hash_times(&cases, runs)?;
    Ok(rows(lengths, medians))
}

/// Hash time against digest size at a fixed message length.
pub fn digest_size_sweep(
    key: &KeyMaterial,
    digest_sizes: &[usize],
    msg_bits: usize,
    runs: usize,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    check_sizes(digest_sizes, runs)?;
    let message = random_bits(&mut trial_rng(seed, 0), msg_bits.max(1));
    let cases = digest_sizes
        .iter()
        .map(|&n| Ok((ChaosHashParams::new(n, key.clone())?, message.clone())))
        .collect::<Result<Vec<_>>>()?;
    let medians = median_hash_times(&cases, runs)?;
    Ok(rows(digest_sizes, medians))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ChaosHashParams {
        ChaosHashParams::with_text_key(64, "my key").unwrap()
    }

    #[test]
    fn rejects_bad_length_lists() {
        assert!(scaling_benchmark(&params(), &[], 5, 0).is_err());
        assert!(scaling_benchmark(&params(), &[1024], 5, 0).is_err());
        assert!(scaling_benchmark(&params(), &[2048, 1024], 5, 0).is_err());
        assert!(scaling_benchmark(&params(), &[1024, 2048], 2, 0).is_err());
    }

    #[test]
    fn produces_one_row_per_length() {
        let table = scaling_benchmark(&params(), &[64, 128], 5, 0).unwrap();
        assert_eq!(table.len(), 2);
        assert!(table[0].ratio.is_none());
        assert!(table[1].ratio.unwrap() > 0.0);
        assert!(table.iter().all(|r| r.median_secs > 0.0));
    }
}
