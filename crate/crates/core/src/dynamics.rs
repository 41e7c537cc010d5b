//! Asynchronous iterations of Boolean maps.
//!
//! A step at index `s` replaces component `s` of the configuration by
//! `f_s(x)` and leaves every other component alone. The hash uses the
//! negation map, for which a step simply flips bit `s`.

use crate::bits::Configuration;
use crate::error::{Error, Result};
use crate::strategy::Strategy;

/// A map `f: B^n -> B^n`, evaluated one component at a time.
pub trait BooleanMap {
    fn n(&self) -> usize;

    /// `f_i(x)` for `i` in `1..=n`.
    fn component(&self, i: usize, x: &Configuration) -> bool;

    fn eval(&self, x: &Configuration) -> Configuration {
        let mut out = x.clone();
        for i in 1..=self.n() {
            out.set_component(i, self.component(i, x));
        }
        out
    }

    fn name(&self) -> &str {
        "map"
    }
}

impl<M: BooleanMap + ?Sized> BooleanMap for &M {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn component(&self, i: usize, x: &Configuration) -> bool {
        (**self).component(i, x)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<M: BooleanMap + ?Sized> BooleanMap for Box<M> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn component(&self, i: usize, x: &Configuration) -> bool {
        (**self).component(i, x)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Negation {
    n: usize,
}

impl Negation {
    pub fn new(n: usize) -> Self {
        Negation { n }
    }
}

impl BooleanMap for Negation {
    fn n(&self) -> usize {
        self.n
    }
    #[inline]
    fn component(&self, i: usize, x: &Configuration) -> bool {
        !x.component(i)
    }
    fn name(&self) -> &str {
        "negation"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Identity { n }
    }
}

impl BooleanMap for Identity {
    fn n(&self) -> usize {
        self.n
    }
    fn component(&self, i: usize, x: &Configuration) -> bool {
        x.component(i)
    }
    fn name(&self) -> &str {
        "identity"
    }
}

/// Cyclic rotation of the components by one place: `f_i(x) = x_{i-1}`,
/// with `f_1(x) = x_n`. Bijective on `B^n`, but a single asynchronous step
/// copies `x_{s-1}` over `x_s` and so loses information when `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rotation {
    n: usize,
}

impl Rotation {
    pub fn new(n: usize) -> Self {
        Rotation { n }
    }
}

impl BooleanMap for Rotation {
    fn n(&self) -> usize {
        self.n
    }
    fn component(&self, i: usize, x: &Configuration) -> bool {
        if i == 1 {
            x.component(self.n)
        } else {
            x.component(i - 1)
        }
    }
    fn name(&self) -> &str {
        "rotation"
    }
}

/// The constant map returning a fixed configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constant {
    value: Configuration,
}

impl Constant {
    pub fn new(value: Configuration) -> Self {
        Constant { value }
    }
}

impl BooleanMap for Constant {
    fn n(&self) -> usize {
        self.value.n()
    }
    fn component(&self, i: usize, _x: &Configuration) -> bool {
        self.value.component(i)
    }
    fn name(&self) -> &str {
        "constant"
    }
}

/// Looks up one of the named maps: `negation`, `identity`, `rotation`, or
/// `zero` (the constant all-zero map).
pub fn named_map(name: &str, n: usize) -> Result<Box<dyn BooleanMap + Send + Sync>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "system size must be positive".into(),
        ));
    }
    Ok(match name {
        "negation" => Box::new(Negation::new(n)),
        "identity" => Box::new(Identity::new(n)),
        "rotation" => Box::new(Rotation::new(n)),
        "zero" => Box::new(Constant::new(Configuration::zeros(n))),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown map {other:?} (expected negation, identity, rotation or zero)"
            )))
        }
    })
}

fn check_dims<F: BooleanMap + ?Sized>(f: &F, x: &Configuration) -> Result<()> {
    if f.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: x.n(),
        });
    }
    Ok(())
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(())
}

#[inline]
fn step_in_place<F: BooleanMap + ?Sized>(f: &F, i: usize, x: &mut Configuration) {
    let value = f.component(i, x);
    x.set_component(i, value);
}

/// `F_f(i, x)`: component `i` replaced by `f_i(x)`.
pub fn apply_f<F: BooleanMap + ?Sized>(
    f: &F,
    i: usize,
    x: &Configuration,
) -> Result<Configuration> {
    check_dims(f, x)?;
    check_index(i, x.n())?;
    let mut out = x.clone();
    step_in_place(f, i, &mut out);
    Ok(out)
}

/// A point of the phase space: a strategy (with a read cursor) and a
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemPoint {
    strategy: Strategy,
    offset: usize,
    config: Configuration,
}

impl SystemPoint {
    pub fn new(strategy: Strategy, config: Configuration) -> Result<Self> {
        if strategy.n() != config.n() {
            return Err(Error::DimensionMismatch {
                expected: config.n(),
                found: strategy.n(),
            });
        }
        Ok(SystemPoint {
            strategy,
            offset: 0,
            config,
        })
    }

    /// Strategy terms not yet consumed.
    pub fn remaining(&self) -> &[usize] {
        &self.strategy.indices()[self.offset..]
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }
}

/// `G_f(S, x) = (shift(S), F_f(S^0, x))`.
pub fn step_g<F: BooleanMap + ?Sized>(f: &F, point: &SystemPoint) -> Result<SystemPoint> {
    let &head = point.remaining().first().ok_or(Error::StrategyExhausted)?;
    let config = apply_f(f, head, &point.config)?;
    Ok(SystemPoint {
        strategy: point.strategy.clone(),
        offset: point.offset + 1,
        config,
    })
}

/// Runs every term of the strategy and returns the final configuration.
pub fn iterate<F: BooleanMap + ?Sized>(
    f: &F,
    strategy: &Strategy,
    x0: &Configuration,
) -> Result<Configuration> {
    check_dims(f, x0)?;
    if strategy.n() != x0.n() {
        return Err(Error::DimensionMismatch {
            expected: x0.n(),
            found: strategy.n(),
        });
    }
    let mut x = x0.clone();
    for &s in strategy.indices() {
        step_in_place(f, s, &mut x);
    }
    Ok(x)
}

/// Largest system size the exhaustive oracles accept.
pub const MAX_ORACLE_N: usize = 16;

/// Outcome of an exhaustive step check: `table[v]` is the index of the image
/// of the configuration with index `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepPermutation {
    pub bijective: bool,
    pub table: Vec<u32>,
}

fn is_permutation(table: &[u32]) -> bool {
    let mut seen = vec![false; table.len()];
    for &v in table {
        let v = v as usize;
        if v >= seen.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

fn check_oracle_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_ORACLE_N,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "system size must be positive".into(),
        ));
    }
    Ok(())
}

/// Enumerates `B^n` and tabulates `x -> F_f(s, x)`.
pub fn check_bijective_step<F: BooleanMap + ?Sized>(f: &F, s: usize) -> Result<StepPermutation> {
    let n = f.n();
    check_oracle_size(n)?;
    check_index(s, n)?;
    let table: Vec<u32> = (0..1u64 << n)
        .map(|v| {
            let mut x = Configuration::from_index(v, n);
            step_in_place(f, s, &mut x);
            x.to_index() as u32
        })
        .collect();
    Ok(StepPermutation {
        bijective: is_permutation(&table),
        table,
    })
}

/// Whether `x -> iterate(f, strategy, x)` permutes `B^n`.
pub fn check_bijective_iteration<F: BooleanMap + ?Sized>(
    f: &F,
    strategy: &Strategy,
) -> Result<bool> {
    let n = f.n();
    check_oracle_size(n)?;
    if strategy.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: strategy.n(),
        });
    }
    let table: Vec<u32> = (0..1u64 << n)
        .map(|v| {
            let mut x = Configuration::from_index(v, n);
            for &s in strategy.indices() {
                step_in_place(f, s, &mut x);
            }
            x.to_index() as u32
        })
        .collect();
    Ok(is_permutation(&table))
}
