//! The keyed chaotic hash and the post-treatment that wraps any keyed hash
//! in keyed asynchronous iterations of a bijective Boolean map.

use crate::bits::{encode_ascii7, BitString, Configuration};
use crate::dynamics::{iterate, BooleanMap, Negation};
use crate::error::{Error, Result};
use crate::pretreatment::{check_digest_size, fold_xor, normalize_bits, ExpandedView};
use crate::strategy::{
    condense_seed, derive_seed, gen_strategy, state_from_fold, strategy_from_state,
    CombinedXorshift, GeneratorState, KeyMaterial, SeedMaterial, Strategy, PIPELINE_STATE,
};

pub const DEFAULT_DIGEST_BITS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaosHashParams {
    n: usize,
    key: KeyMaterial,
}

impl ChaosHashParams {
    pub fn new(n: usize, key: KeyMaterial) -> Result<Self> {
        check_digest_size(n)?;
        Ok(ChaosHashParams { n, key })
    }

    pub fn with_text_key(n: usize, key: &str) -> Result<Self> {
        Self::new(n, KeyMaterial::from_text(key)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn key(&self) -> &KeyMaterial {
        &self.key
    }
}

/// Strategy of length `2n` for an already-encoded message, alongside `x0`.
pub fn hash_strategy(
    params: &ChaosHashParams,
    msg_bits: &BitString,
) -> Result<(Strategy, Configuration)> {
    let n = params.n;
    if !n.is_multiple_of(64) {
        let (d, x0) = normalize_bits(msg_bits, n)?.into_parts();
        let seed = derive_seed(&d, &params.key)?;
        return Ok((gen_strategy(&seed, n, 2 * n)?, x0));
    }
    let (x0, state) = fused_inputs(msg_bits, n, params.key.bits())?;
    Ok((strategy_from_state(&state, n, 2 * n)?, x0))
}

/// `x0` and the condensed seed in one pass over `D`, without materializing
/// `D`, the key chain or the seed. Needs `n % 64 == 0`.
fn fused_inputs(
    msg_bits: &BitString,
    n: usize,
    key: &BitString,
) -> Result<(Configuration, GeneratorState)> {
    let view = ExpandedView::new(msg_bits, n)?;
    // one period of the key chain, in whole words
    let key_period = key.len() / gcd(key.len(), 64);
    let key_words: Vec<u64> = (0..key_period)
        .map(|j| key.cyclic_word(j * 64 % key.len()))
        .collect();

    let x0_words = n / 64;
    let state_words = PIPELINE_STATE.bits() / 64;
    let mut x0 = vec![0u64; x0_words];
    let mut state = vec![0u64; state_words];
    let (mut k, mut xi, mut si) = (0, 0, 0);
    for j in 0..view.len() / 64 {
        let d = view.word(j);
        x0[xi] ^= d;
        state[si] ^= d ^ key_words[k];
        k = if k + 1 == key_period { 0 } else { k + 1 };
        xi = if xi + 1 == x0_words { 0 } else { xi + 1 };
        si = if si + 1 == state_words { 0 } else { si + 1 };
    }
    let x0 = Configuration::new(from_words(&x0))?;
    let state = state_from_fold(&from_words(&state), PIPELINE_STATE);
    Ok((x0, state))
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn from_words(words: &[u64]) -> BitString {
    let mut out = BitString::with_capacity(64 * words.len());
    for &word in words {
        out.push_value(word, 64);
    }
    out
}

/// Digest of an already-encoded message.
pub fn chaos_hash_bits(params: &ChaosHashParams, msg_bits: &BitString) -> Result<Configuration> {
    let (strategy, x0) = hash_strategy(params, msg_bits)?;
    iterate(&Negation::new(params.n), &strategy, &x0)
}

/// Uppercase hexadecimal digest of a 7-bit ASCII message.
pub fn chaos_hash(params: &ChaosHashParams, message: &[u8]) -> Result<String> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    chaos_hash_bits(params, &encode_ascii7(message)?)?.to_hex()
}

/// A keyed hash `h(k, m)` with a fixed digest size.
pub trait InnerHash {
    fn digest_bits(&self) -> usize;

    fn evaluate(&self, key: &BitString, message: &BitString) -> Result<Configuration>;

    fn name(&self) -> &str;
}

/// The chaotic hash used as an inner hash; the key bits are used as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaosInner {
    n: usize,
}

impl ChaosInner {
    pub fn new(n: usize) -> Result<Self> {
        check_digest_size(n)?;
        Ok(ChaosInner { n })
    }
}

impl InnerHash for ChaosInner {
    fn digest_bits(&self) -> usize {
        self.n
    }

    fn evaluate(&self, key: &BitString, message: &BitString) -> Result<Configuration> {
        let params = ChaosHashParams::new(self.n, KeyMaterial::from_bits(key.clone())?)?;
        chaos_hash_bits(&params, message)
    }

    fn name(&self) -> &str {
        "chaos"
    }
}

/// A deliberately weak toy: the message and the key are each zero-padded
/// and XOR-folded into `n` bits, and the two folds are XORed. Collisions
/// are trivial to find, which makes it useful for showing that the
/// post-treatment preserves collisions rather than removing them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorFoldInner {
    n: usize,
}

impl XorFoldInner {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "digest size must be positive".into(),
            ));
        }
        Ok(XorFoldInner { n })
    }

    fn fold_padded(&self, bits: &BitString) -> Result<Configuration> {
        if bits.is_empty() {
            return Ok(Configuration::zeros(self.n));
        }
        let mut padded = bits.clone();
        let target = bits.len().div_ceil(self.n) * self.n;
        padded.append(&BitString::zeros(target - bits.len()));
        fold_xor(&padded, self.n)
    }
}

impl InnerHash for XorFoldInner {
    fn digest_bits(&self) -> usize {
        self.n
    }

    fn evaluate(&self, key: &BitString, message: &BitString) -> Result<Configuration> {
        let m = self.fold_padded(message)?;
        let k = self.fold_padded(key)?;
        Configuration::new(m.bits().xor(k.bits())?)
    }

    fn name(&self) -> &str {
        "xorfold"
    }
}

/// Looks up an inner hash by name: `chaos` or `xorfold`.
pub fn named_inner(name: &str, n: usize) -> Result<Box<dyn InnerHash + Send + Sync>> {
    match name {
        "chaos" => Ok(Box::new(ChaosInner::new(n)?)),
        "xorfold" => Ok(Box::new(XorFoldInner::new(n)?)),
        other => Err(Error::InvalidParameter(format!(
            "unknown inner hash {other:?} (expected chaos or xorfold)"
        ))),
    }
}

/// `(K1, K2, N)`: inner-hash key, strategy seed and iteration count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostTreatKey {
    k1: BitString,
    k2: BitString,
    iterations: usize,
}

impl PostTreatKey {
    pub fn new(k1: BitString, k2: BitString, iterations: usize) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidParameter(
                "post-treatment needs at least one iteration".into(),
            ));
        }
        if k2.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(PostTreatKey { k1, k2, iterations })
    }

    pub fn k1(&self) -> &BitString {
        &self.k1
    }

    pub fn k2(&self) -> &BitString {
        &self.k2
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// The `N` strategy terms generated from `K2`.
    pub fn strategy(&self, n: usize) -> Result<Strategy> {
        let state = condense_seed(&SeedMaterial::new(self.k2.clone()), PIPELINE_STATE);
        let mut g = CombinedXorshift::from_state(&state);
        Strategy::new((0..self.iterations).map(|_| g.next_index(n)).collect(), n)
    }
}

/// A post-treatment bound to a key and a map, with the strategy generated
/// once.
pub struct PostTreatment<F> {
    f: F,
    strategy: Strategy,
}

impl<F: BooleanMap> PostTreatment<F> {
    pub fn new(key: &PostTreatKey, f: F) -> Result<Self> {
        let strategy = key.strategy(f.n())?;
        Ok(PostTreatment { f, strategy })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn apply(&self, inner_digest: &Configuration) -> Result<Configuration> {
        iterate(&self.f, &self.strategy, inner_digest)
    }

    /// Replays the strategy backwards. At step `s` the predecessor agrees with
    /// the current configuration off component `s`, and its component `s` is
    /// the unique value `v` with `f_s(x[s := v]) = y_s`.
    pub fn invert(&self, digest: &Configuration) -> Result<Configuration> {
        let n = self.f.n();
        if digest.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: digest.n(),
            });
        }
        let mut x = digest.clone();
        for &s in self.strategy.indices().iter().rev() {
            let target = x.component(s);
            x.set_component(s, false);
            let from_zero = self.f.component(s, &x);
            x.set_component(s, true);
            let from_one = self.f.component(s, &x);
            if from_zero == from_one {
                return Err(Error::NotInvertible { component: s });
            }
            x.set_component(s, from_one == target);
        }
        Ok(x)
    }
}

/// `H(K, m)`: the inner digest `h(K1, m)` moved through `N` asynchronous steps
/// of `f` driven by the generator seeded with `K2`.
pub fn post_treat<H, F>(
    inner: &H,
    key: &PostTreatKey,
    f: F,
    message: &BitString,
) -> Result<Configuration>
where
    H: InnerHash + ?Sized,
    F: BooleanMap,
{
    if inner.digest_bits() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: inner.digest_bits(),
        });
    }
    let x = inner.evaluate(key.k1(), message)?;
    PostTreatment::new(key, f)?.apply(&x)
}

/// Recovers the inner digest from a post-treated digest.
pub fn invert_post_treat<F: BooleanMap>(
    key: &PostTreatKey,
    f: F,
    digest: &Configuration,
) -> Result<Configuration> {
    PostTreatment::new(key, f)?.invert(digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Identity, Rotation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
        BitString::from_iter((0..len).map(|_| rng.gen::<bool>()))
    }

    fn reference_inputs(
        msg: &BitString,
        n: usize,
        key: &KeyMaterial,
    ) -> (Configuration, GeneratorState) {
        let (d, x0) = normalize_bits(msg, n).unwrap().into_parts();
        (
            x0,
            condense_seed(&derive_seed(&d, key).unwrap(), PIPELINE_STATE),
        )
    }

    #[test]
    fn fused_inputs_match_reference_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let lengths = [
            1, 2, 7, 31, 62, 63, 64, 65, 119, 127, 128, 129, 191, 192, 255, 256, 1000, 4096, 20_000,
        ];
        for n in [64, 128, 256, 512, 1024] {
            for &len in &lengths {
                let msg = random_bits(&mut rng, len);
                let key_len = rng.gen_range(1..=300);
                let key = KeyMaterial::from_bits(random_bits(&mut rng, key_len)).unwrap();
                assert_eq!(
                    fused_inputs(&msg, n, key.bits()).unwrap(),
                    reference_inputs(&msg, n, &key),
                    "n = {n}, message length {len}, key length {key_len}"
                );
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn fused_inputs_agree_on_random_input(
            msg in proptest::collection::vec(proptest::bool::ANY, 1..3000),
            key in proptest::collection::vec(proptest::bool::ANY, 1..200),
            n in proptest::sample::select(vec![64usize, 128, 256, 512]),
        ) {
            let msg: BitString = msg.into_iter().collect();
            let key = KeyMaterial::from_bits(key.into_iter().collect()).unwrap();
            proptest::prop_assert_eq!(fused_inputs(&msg, n, key.bits()).unwrap(), reference_inputs(&msg, n, &key));
        }
    }

    fn random_config(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
        Configuration::new(random_bits(rng, n)).unwrap()
    }

    fn params() -> ChaosHashParams {
        ChaosHashParams::with_text_key(256, "my key").unwrap()
    }

    #[test]
    fn digest_has_64_uppercase_digits() {
        let h = chaos_hash(&params(), b"The original text").unwrap();
        assert_eq!(h.len(), 64);
        assert!(h
            .chars()
            .all(|c| c.is_ascii_digit() || c.is_ascii_uppercase()));
        assert_eq!(chaos_hash(&params(), b"The original text").unwrap(), h);
    }

    #[test]
    fn digest_is_x0_xor_strategy_parity() {
        let msg = encode_ascii7(b"The original text").unwrap();
        let (strategy, x0) = hash_strategy(&params(), &msg).unwrap();
        let mut expected = x0.clone();
        for &s in strategy.indices() {
            expected.flip_component(s);
        }
        assert_eq!(chaos_hash_bits(&params(), &msg).unwrap(), expected);
    }

    #[test]
    fn digest_sizes() {
        for n in [4, 8, 12, 128, 512, 1024] {
            let p = ChaosHashParams::with_text_key(n, "my key").unwrap();
            assert_eq!(chaos_hash(&p, b"abc").unwrap().len(), n / 4);
        }
        assert!(ChaosHashParams::with_text_key(10, "k").is_err());
        assert!(ChaosHashParams::with_text_key(256, "").is_err());
    }

    #[test]
    fn hash_rejects_bad_messages() {
        assert_eq!(chaos_hash(&params(), b""), Err(Error::EmptyMessage));
        assert!(matches!(
            chaos_hash(&params(), &[b'a', 0xFF]),
            Err(Error::NonAscii { position: 1, .. })
        ));
    }

    #[test]
    fn keys_separate_digests() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let a: String = (0..6).map(|_| rng.gen_range(32u8..127) as char).collect();
            let b: String = (0..6).map(|_| rng.gen_range(32u8..127) as char).collect();
            if a == b {
                continue;
            }
            let pa = ChaosHashParams::with_text_key(256, &a).unwrap();
            let pb = ChaosHashParams::with_text_key(256, &b).unwrap();
            assert_ne!(
                chaos_hash(&pa, b"The original text").unwrap(),
                chaos_hash(&pb, b"The original text").unwrap()
            );
        }
    }

    #[test]
    fn one_character_change_moves_about_half_the_bits() {
        let mut total = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let trials = 200;
        for _ in 0..trials {
            let mut msg: Vec<u8> = (0..40).map(|_| rng.gen_range(32u8..127)).collect();
            let a = chaos_hash_bits(&params(), &encode_ascii7(&msg).unwrap()).unwrap();
            let i = rng.gen_range(0..msg.len());
            msg[i] = if msg[i] == b'a' { b'b' } else { b'a' };
            let b = chaos_hash_bits(&params(), &encode_ascii7(&msg).unwrap()).unwrap();
            total += a.hamming_distance(&b).unwrap();
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 128.0).abs() < 3.0, "mean changed bits {mean}");
    }

    fn key(rng: &mut ChaCha8Rng, iterations: usize) -> PostTreatKey {
        PostTreatKey::new(random_bits(rng, 64), random_bits(rng, 128), iterations).unwrap()
    }

    #[test]
    fn zero_iterations_disallowed() {
        assert!(PostTreatKey::new(BitString::zeros(8), BitString::zeros(8), 0).is_err());
    }

    #[test]
    fn one_negation_step_flips_one_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let inner = XorFoldInner::new(256).unwrap();
        let msg = random_bits(&mut rng, 1000);
        let k = key(&mut rng, 1);
        let plain = inner.evaluate(k.k1(), &msg).unwrap();
        let treated = post_treat(&inner, &k, Negation::new(256), &msg).unwrap();
        assert_eq!(plain.hamming_distance(&treated).unwrap(), 1);
    }

    #[test]
    fn repeated_index_restores_inner_digest() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let inner = XorFoldInner::new(1).unwrap();
        let msg = random_bits(&mut rng, 50);
        // with n = 1 every index is 1, so two steps flip the only bit twice
        let k = key(&mut rng, 2);
        assert_eq!(k.strategy(1).unwrap().indices(), &[1, 1]);
        let plain = inner.evaluate(k.k1(), &msg).unwrap();
        assert_eq!(
            post_treat(&inner, &k, Negation::new(1), &msg).unwrap(),
            plain
        );
    }

    #[test]
    fn dimension_mismatch_detected() {
        let inner = XorFoldInner::new(16).unwrap();
        let k = PostTreatKey::new(BitString::zeros(8), BitString::zeros(8), 4).unwrap();
        assert_eq!(
            post_treat(&inner, &k, Negation::new(8), &BitString::zeros(8)),
            Err(Error::DimensionMismatch {
                expected: 8,
                found: 16
            })
        );
    }

    #[test]
    fn collisions_coincide_with_inner_collisions() {
        // 8-bit toy inner hash, all 12-bit messages
        let inner = XorFoldInner::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..5 {
            let k = key(&mut rng, 16);
            let pt = PostTreatment::new(&k, Negation::new(8)).unwrap();
            let mut forward = HashMap::new();
            let mut backward = HashMap::new();
            for v in 0..1u64 << 12 {
                let m = BitString::from_u64(v, 12);
                let h = inner.evaluate(k.k1(), &m).unwrap();
                let big_h = pt.apply(&h).unwrap();
                assert_eq!(*forward.entry(h.clone()).or_insert(big_h.clone()), big_h);
                assert_eq!(*backward.entry(big_h).or_insert(h.clone()), h);
            }
        }
    }

    #[test]
    fn round_trip_negation() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let k = key(&mut rng, 512);
        let pt = PostTreatment::new(&k, Negation::new(256)).unwrap();
        for _ in 0..1000 {
            let x = random_config(&mut rng, 256);
            assert_eq!(pt.invert(&pt.apply(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn negation_inverse_is_reversed_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let k = key(&mut rng, 100);
        let pt = PostTreatment::new(&k, Negation::new(64)).unwrap();
        let y = random_config(&mut rng, 64);
        let reversed: Vec<usize> = pt.strategy().indices().iter().rev().copied().collect();
        let replay = iterate(
            &Negation::new(64),
            &Strategy::new(reversed, 64).unwrap(),
            &y,
        )
        .unwrap();
        assert_eq!(pt.invert(&y).unwrap(), replay);
    }

    #[test]
    fn identity_round_trip_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let k = key(&mut rng, 30);
        let pt = PostTreatment::new(&k, Identity::new(8)).unwrap();
        for v in 0..256 {
            let x = Configuration::from_index(v, 8);
            assert_eq!(pt.invert(&pt.apply(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn rotation_cannot_be_inverted() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let k = key(&mut rng, 16);
        assert!(matches!(
            invert_post_treat(&k, Rotation::new(8), &Configuration::zeros(8)),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn chaos_inner_uses_key_bits() {
        let inner = ChaosInner::new(256).unwrap();
        let key = encode_ascii7(b"my key").unwrap();
        let msg = encode_ascii7(b"The original text").unwrap();
        assert_eq!(
            inner.evaluate(&key, &msg).unwrap(),
            chaos_hash_bits(&params(), &msg).unwrap()
        );
    }
}
