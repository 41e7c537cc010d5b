//! The distance `d = d_e + d_s` on strategy x configuration space, computed on
//! finite strategy prefixes with exact rational arithmetic.
//!
//! `d_s` over a prefix of `K` terms is a partial sum; the omitted tail is at
//! most `(n - 1) / n * 10^-K`, so every strategy distance is reported as the
//! interval `[partial, partial + tail_bound]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::Configuration;
use crate::error::{Error, Result};
use crate::strategy::Strategy;

/// Hamming distance between two configurations.
pub fn d_e(a: &Configuration, b: &Configuration) -> Result<usize> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    a.hamming_distance(b)
}

/// A distance known up to a bounded, non-negative tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance {
    pub value: BigRational,
    pub tail_bound: BigRational,
}

impl Distance {
    pub fn upper(&self) -> BigRational {
        &self.value + &self.tail_bound
    }
}

fn ten_pow(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k)
}

/// `9/n * sum_{k=1}^{K} |a_k - b_k| / 10^k` over the first `prefix_len` terms.
pub fn d_s(a: &Strategy, b: &Strategy, prefix_len: usize) -> Result<Distance> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let shortest = a.len().min(b.len());
    if shortest < prefix_len {
        return Err(Error::InvalidParameter(format!(
            "strategy prefix of {shortest} terms is shorter than the requested {prefix_len}"
        )));
    }
    let n = BigInt::from(a.n());
    // sum_k |a_k - b_k| * 10^(K-k), then scale by 9 / (n * 10^K)
    let mut numerator = BigInt::zero();
    for (k, (&x, &y)) in a
        .indices()
        .iter()
        .zip(b.indices())
        .take(prefix_len)
        .enumerate()
    {
        let diff = x.abs_diff(y);
        if diff != 0 {
            numerator += BigInt::from(diff) * ten_pow(prefix_len - 1 - k);
        }
    }
    let scale = &n * ten_pow(prefix_len);
    let value = BigRational::new(numerator * BigInt::from(9u32), scale.clone());
    let tail_bound = BigRational::new(&n - BigInt::one(), scale);
    Ok(Distance { value, tail_bound })
}

/// A point `(S, E)` with a finite strategy prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricPoint {
    pub strategy_prefix: Strategy,
    pub config: Configuration,
}

impl MetricPoint {
    pub fn new(strategy_prefix: Strategy, config: Configuration) -> Result<Self> {
        if strategy_prefix.n() != config.n() {
            return Err(Error::DimensionMismatch {
                expected: config.n(),
                found: strategy_prefix.n(),
            });
        }
        Ok(MetricPoint {
            strategy_prefix,
            config,
        })
    }
}

/// `d_e(E, E') + d_s(S, S')`; both prefixes must have the same length.
pub fn d(x: &MetricPoint, y: &MetricPoint) -> Result<Distance> {
    let k = x.strategy_prefix.len();
    if y.strategy_prefix.len() != k {
        return Err(Error::LengthMismatch {
            left: k,
            right: y.strategy_prefix.len(),
        });
    }
    let hamming = d_e(&x.config, &y.config)?;
    let strategy = d_s(&x.strategy_prefix, &y.strategy_prefix, k)?;
    Ok(Distance {
        value: BigRational::from_integer(BigInt::from(hamming)) + strategy.value,
        tail_bound: strategy.tail_bound,
    })
}
