//! Strategy generation: seed derivation from `(D, key)`, condensation of the
//! seed into generator state, and the combined xorshift-family generator
//! that draws indices in `1..=n`.
//!
//! # Generator definition
//!
//! [`CombinedXorshift`] runs three subgenerators in lockstep and combines
//! their 32-bit outputs. All arithmetic is on `u32` with wrapping.
//!
//! ```text
//! xorshift32   y ^= y << 13;  y ^= y >> 17;  y ^= y << 5
//! xor128       t = x ^ (x << 11); (x, y, z) = (y, z, w)
//!              w = w ^ (w >> 19) ^ t ^ (t >> 8)
//! xorwow       t = v0 ^ (v0 >> 2); (v0, v1, v2, v3) = (v1, v2, v3, v4)
//!              v4 = v4 ^ (v4 << 4) ^ t ^ (t << 1);  d += 362437
//! output       (y_xorshift ^ w_xor128) + (d + v4)
//! ```
//!
//! One output word costs 24 elementary operations: 12 XOR, 9 shifts and
//! 3 additions.
//!
//! Seeding expands the condensed state words into the ten subgenerator words
//! through the murmur3 32-bit finalizer, chained over every state word, so
//! that any change in the condensed state reaches all three subgenerators.
//! The Weyl counter `d` starts at 6615241. A subgenerator whose words all
//! come out zero gets fixed non-zero words.
//!
//! # Index draws
//!
//! Each index consumes a `2n`-bit number: `max(1, ceil(2n / 32))` output
//! words are XORed into one 32-bit value, which is accepted only below the
//! largest multiple of `n` not exceeding `2^32`, then mapped to
//! `value % n + 1`. A rejected draw consumes a fresh `2n`-bit number.

use std::fmt;

use crate::bits::{encode_ascii7, BitString};
use crate::error::{Error, Result};

/// Key bits used to derive a seed. Text keys are 7-bit encoded.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KeyMaterial(BitString);

impl KeyMaterial {
    pub fn from_text(key: &str) -> Result<Self> {
        if key.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(KeyMaterial(encode_ascii7(key.as_bytes())?))
    }

    pub fn from_bits(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(KeyMaterial(bits))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }
}

impl fmt::Debug for KeyMaterial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyMaterial({} bits)", self.0.len())
    }
}

/// `D` XORed with the repeated key chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedMaterial(BitString);

impl SeedMaterial {
    pub fn new(bits: BitString) -> Self {
        SeedMaterial(bits)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }
}

pub fn derive_seed(d: &BitString, key: &KeyMaterial) -> Result<SeedMaterial> {
    if d.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let chain = key.bits().repeat_to(d.len());
    Ok(SeedMaterial(d.xor(&chain)?))
}

/// Width of the condensed generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateWidth {
    Bits128,
    Bits192,
    Bits256,
}

impl StateWidth {
    pub fn bits(self) -> usize {
        match self {
            StateWidth::Bits128 => 128,
            StateWidth::Bits192 => 192,
            StateWidth::Bits256 => 256,
        }
    }

    pub fn words(self) -> usize {
        self.bits() / 32
    }
}

impl TryFrom<usize> for StateWidth {
    type Error = Error;

    fn try_from(bits: usize) -> Result<Self> {
        match bits {
            128 => Ok(StateWidth::Bits128),
            192 => Ok(StateWidth::Bits192),
            256 => Ok(StateWidth::Bits256),
            other => Err(Error::InvalidParameter(format!(
                "generator state must be 128, 192 or 256 bits, got {other}"
            ))),
        }
    }
}

/// Width used by the hash pipeline and the post-treatment.
pub const PIPELINE_STATE: StateWidth = StateWidth::Bits256;

/// Replacement for zero state words, indexed by word position.
pub const ZERO_WORD_FIXUP: [u32; 8] = [
    0x6A09_E667,
    0xBB67_AE85,
    0x3C6E_F372,
    0xA54F_F53A,
    0x510E_527F,
    0x9B05_688C,
    0x1F83_D9AB,
    0x5BE0_CD19,
];

/// Condensed generator state: 32-bit words, the first word holding the
/// leftmost 32 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorState {
    words: Vec<u32>,
}

impl GeneratorState {
    pub fn words(&self) -> &[u32] {
        &self.words
    }
}

/// XOR-folds the seed into `width` bits (the last partial block padded with
/// zeros) and replaces zero words with [`ZERO_WORD_FIXUP`].
pub fn condense_seed(seed: &SeedMaterial, width: StateWidth) -> GeneratorState {
    let bits = seed.bits();
    let w = width.bits();
    let mut folded = BitString::zeros(w);
    let mut start = 0;
    while start < bits.len() {
        let take = (bits.len() - start).min(w);
        let mut block = bits.slice(start, take);
        if take < w {
            block.append(&BitString::zeros(w - take));
        }
        folded.xor_assign(&block).expect("equal widths");
        start += take;
    }
    state_from_fold(&folded, width)
}

/// The zero-word fixup applied to an already folded `width`-bit seed.
pub(crate) fn state_from_fold(folded: &BitString, width: StateWidth) -> GeneratorState {
    debug_assert_eq!(folded.len(), width.bits());
    let words = (0..width.words())
        .map(|k| match folded.slice(32 * k, 32).to_u64() as u32 {
            0 => ZERO_WORD_FIXUP[k],
            v => v,
        })
        .collect();
    GeneratorState { words }
}

#[inline]
fn fmix32(mut h: u32) -> u32 {
    h ^= h >> 16;
    h = h.wrapping_mul(0x85EB_CA6B);
    h ^= h >> 13;
    h = h.wrapping_mul(0xC2B2_AE35);
    h ^= h >> 16;
    h
}

const WEYL_START: u32 = 6_615_241;
const WEYL_STEP: u32 = 362_437;

/// Combined xorshift32 / xor128 / xorwow generator. See the module docs for
/// the normative transition functions.
#[derive(Debug, Clone)]
pub struct CombinedXorshift {
    xs: u32,
    x128: [u32; 4],
    wow: [u32; 5],
    weyl: u32,
}

impl CombinedXorshift {
    pub fn from_state(state: &GeneratorState) -> Self {
        let words = state.words();
        assert!(!words.is_empty());
        let mut acc = 0u32;
        for &w in words {
            acc = fmix32(acc ^ w);
        }
        let mut slots = [0u32; 10];
        for (j, slot) in slots.iter_mut().enumerate() {
            let salt = (j as u32 + 1).wrapping_mul(0x9E37_79B9);
            *slot = fmix32(words[j % words.len()] ^ acc ^ salt);
            acc = fmix32(acc.wrapping_add(*slot));
        }
        let mut g = CombinedXorshift {
            xs: slots[0],
            x128: [slots[1], slots[2], slots[3], slots[4]],
            wow: [slots[5], slots[6], slots[7], slots[8], slots[9]],
            weyl: WEYL_START,
        };
        if g.xs == 0 {
            g.xs = ZERO_WORD_FIXUP[0];
        }
        if g.x128.iter().all(|&w| w == 0) {
            g.x128.copy_from_slice(&ZERO_WORD_FIXUP[1..5]);
        }
        if g.wow.iter().all(|&w| w == 0) {
            g.wow.copy_from_slice(&ZERO_WORD_FIXUP[3..8]);
        }
        g
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let mut y = self.xs;
        y ^= y << 13;
        y ^= y >> 17;
        y ^= y << 5;
        self.xs = y;

        let [x, y1, z, w] = self.x128;
        let t = x ^ (x << 11);
        let w_next = w ^ (w >> 19) ^ t ^ (t >> 8);
        self.x128 = [y1, z, w, w_next];

        let [v0, v1, v2, v3, v4] = self.wow;
        let t = v0 ^ (v0 >> 2);
        let v_next = v4 ^ (v4 << 4) ^ t ^ (t << 1);
        self.wow = [v1, v2, v3, v4, v_next];
        self.weyl = self.weyl.wrapping_add(WEYL_STEP);

        (y ^ w_next).wrapping_add(self.weyl.wrapping_add(v_next))
    }

    /// A uniform index in `1..=n`, consuming a `2n`-bit number per attempt.
    pub fn next_index(&mut self, n: usize) -> usize {
        IndexDraw::new(n).draw(self)
    }
}

/// Per-`n` constants of [`CombinedXorshift::next_index`].
#[derive(Debug, Clone, Copy)]
struct IndexDraw {
    n: u64,
    limit: u64,
    words: usize,
}

impl IndexDraw {
    fn new(n: usize) -> Self {
        assert!(
            n >= 1 && (n as u64) <= 1u64 << 32,
            "n = {n} outside 1..=2^32"
        );
        let n = n as u64;
        IndexDraw {
            n,
            limit: (1u64 << 32) - (1u64 << 32) % n,
            words: words_per_index(n as usize),
        }
    }

    #[inline]
    fn draw(self, g: &mut CombinedXorshift) -> usize {
        loop {
            let mut value = 0u32;
            for _ in 0..self.words {
                value ^= g.next_u32();
            }
            if (value as u64) < self.limit {
                return (value as u64 % self.n) as usize + 1;
            }
        }
    }
}

/// Generator words consumed per index draw: `max(1, ceil(2n / 32))`.
pub fn words_per_index(n: usize) -> usize {
    (2 * n).div_ceil(32).max(1)
}

/// A finite sequence of component indices in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    indices: Vec<usize>,
    n: usize,
}

impl Strategy {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "system size must be positive".into(),
            ));
        }
        if let Some(&index) = indices.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(Strategy { indices, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Comma-separated decimal listing.
    pub fn to_csv(&self) -> String {
        self.indices
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// `length` indices in `1..=n`, drawn from the generator seeded by `seed`.
pub fn gen_strategy(seed: &SeedMaterial, n: usize, length: usize) -> Result<Strategy> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "system size must be positive".into(),
        ));
    }
    if length == 0 {
        return Err(Error::InvalidParameter(
            "strategy length must be positive".into(),
        ));
    }
    strategy_from_state(&condense_seed(seed, PIPELINE_STATE), n, length)
}

pub(crate) fn strategy_from_state(
    state: &GeneratorState,
    n: usize,
    length: usize,
) -> Result<Strategy> {
    let mut g = CombinedXorshift::from_state(state);
    let draw = IndexDraw::new(n);
    let indices = (0..length).map(|_| draw.draw(&mut g)).collect();
    Strategy::new(indices, n)
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
        BitString::from_iter((0..len).map(|_| rng.gen::<bool>()))
    }

    #[test]
    fn seed_with_zero_d_is_the_key_chain() {
        let key = KeyMaterial::from_text("k").unwrap();
        let seed = derive_seed(&BitString::zeros(512), &key).unwrap();
        let expected = "1101011".parse::<BitString>().unwrap().repeat_to(512);
        assert_eq!(seed.bits(), &expected);
    }

    #[test]
    fn seed_of_key_chain_is_zero() {
        let key = KeyMaterial::from_text("my key").unwrap();
        let chain = key.bits().repeat_to(512);
        let seed = derive_seed(&chain, &key).unwrap();
        assert_eq!(seed.bits(), &BitString::zeros(512));
    }

    #[test]
    fn seed_for_worked_example_matches_hand_built_chain() {
        let d = crate::pretreatment::normalize(b"The original text", 256)
            .unwrap()
            .d()
            .clone();
        let key = KeyMaterial::from_text("my key").unwrap();
        let seed = derive_seed(&d, &key).unwrap();
        // hand-built chain: 6 characters * 7 bits = 42 bits, cycled
        let chain: String = "my key"
            .bytes()
            .map(|b| format!("{b:07b}"))
            .collect::<String>()
            .chars()
            .cycle()
            .take(512)
            .collect();
        let chain: BitString = chain.parse().unwrap();
        assert_eq!(seed.bits(), &d.xor(&chain).unwrap());
        assert_eq!(derive_seed(&d, &key).unwrap(), seed);
    }

    #[test]
    fn empty_keys_rejected() {
        assert_eq!(KeyMaterial::from_text(""), Err(Error::EmptyKey));
        assert_eq!(
            KeyMaterial::from_bits(BitString::new()),
            Err(Error::EmptyKey)
        );
        assert!(matches!(
            KeyMaterial::from_text("clé"),
            Err(Error::NonAscii { .. })
        ));
    }

    #[test]
    fn condense_exact_width_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits = random_bits(&mut rng, 128);
        let state = condense_seed(&SeedMaterial::new(bits.clone()), StateWidth::Bits128);
        for (k, &w) in state.words().iter().enumerate() {
            let expected = bits.slice(32 * k, 32).to_u64() as u32;
            if expected != 0 {
                assert_eq!(w, expected);
            }
        }
    }

    #[test]
    fn condense_zero_seed_gives_fixups() {
        let state = condense_seed(
            &SeedMaterial::new(BitString::zeros(512)),
            StateWidth::Bits256,
        );
        assert_eq!(state.words(), &ZERO_WORD_FIXUP);
        let state = condense_seed(
            &SeedMaterial::new(BitString::zeros(512)),
            StateWidth::Bits192,
        );
        assert_eq!(state.words(), &ZERO_WORD_FIXUP[..6]);
    }

    #[test]
    fn condense_512_into_128_xors_quarters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bits = random_bits(&mut rng, 512);
        // independent oracle: bitwise XOR of the four quarters
        let expected: BitString = (0..128)
            .map(|i| bits.get(i) ^ bits.get(i + 128) ^ bits.get(i + 256) ^ bits.get(i + 384))
            .collect();
        let state = condense_seed(&SeedMaterial::new(bits), StateWidth::Bits128);
        for k in 0..4 {
            assert_eq!(state.words()[k], expected.slice(32 * k, 32).to_u64() as u32);
        }
    }

    #[test]
    fn condense_pads_partial_block() {
        let bits: BitString = "1".repeat(160).parse().unwrap();
        let state = condense_seed(&SeedMaterial::new(bits), StateWidth::Bits128);
        // first 32 bits: ones ^ ones = 0 -> fixup; remaining 96 bits: ones
        assert_eq!(
            state.words(),
            &[ZERO_WORD_FIXUP[0], u32::MAX, u32::MAX, u32::MAX]
        );
    }

    #[test]
    fn state_width_parsing() {
        assert_eq!(StateWidth::try_from(192).unwrap(), StateWidth::Bits192);
        assert!(StateWidth::try_from(100).is_err());
    }

    fn generator(seed: u64) -> CombinedXorshift {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = random_bits(&mut rng, 512);
        CombinedXorshift::from_state(&condense_seed(&SeedMaterial::new(bits), PIPELINE_STATE))
    }

    #[test]
    fn n_one_always_yields_one() {
        let mut g = generator(3);
        assert!((0..1000).all(|_| g.next_index(1) == 1));
    }

    #[test]
    fn same_state_same_sequence() {
        let mut a = generator(4);
        let mut b = generator(4);
        for _ in 0..1000 {
            assert_eq!(a.next_index(256), b.next_index(256));
        }
    }

    #[test]
    fn words_per_index_values() {
        assert_eq!(words_per_index(1), 1);
        assert_eq!(words_per_index(16), 1);
        assert_eq!(words_per_index(17), 2);
        assert_eq!(words_per_index(256), 16);
        assert_eq!(words_per_index(1024), 64);
    }

    /// Upper 0.99 quantile of chi-square with 255 degrees of freedom.
    const CHI2_255_Q99: f64 = 310.457;

    #[test]
    fn index_frequencies_pass_chi_square() {
        let mut g = generator(5);
        let draws = 1_000_000;
        let n = 256;
        let mut counts = vec![0u64; n];
        for _ in 0..draws {
            counts[g.next_index(n) - 1] += 1;
        }
        let expected = draws as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < CHI2_255_Q99, "chi-square {chi2}");
        let sigma = (expected * (1.0 - 1.0 / n as f64)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expected).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn non_power_of_two_range_is_uniform() {
        // 2^32 mod 255 != 0, so rejection is exercised on the boundary
        let mut g = generator(6);
        let n = 255;
        let draws = 500_000;
        let mut counts = vec![0u64; n];
        for _ in 0..draws {
            counts[g.next_index(n) - 1] += 1;
        }
        let expected = draws as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 0.99 quantile for 254 degrees of freedom
        assert!(chi2 < 309.33, "chi-square {chi2}");
    }

    #[test]
    fn strategy_length_and_range() {
        let d = crate::pretreatment::normalize(b"The original text", 256)
            .unwrap()
            .d()
            .clone();
        let seed = derive_seed(&d, &KeyMaterial::from_text("my key").unwrap()).unwrap();
        let s = gen_strategy(&seed, 256, 512).unwrap();
        assert_eq!(s.len(), 512);
        assert!(s.indices().iter().all(|&i| (1..=256).contains(&i)));
        assert_eq!(gen_strategy(&seed, 256, 512).unwrap(), s);
    }

    #[test]
    fn different_keys_give_different_strategies() {
        let d = crate::pretreatment::normalize(b"The original text", 256)
            .unwrap()
            .d()
            .clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let k1: String = (0..8).map(|_| rng.gen_range(32u8..127) as char).collect();
            let k2: String = (0..8).map(|_| rng.gen_range(32u8..127) as char).collect();
            if k1 == k2 {
                continue;
            }
            let s1 = gen_strategy(
                &derive_seed(&d, &KeyMaterial::from_text(&k1).unwrap()).unwrap(),
                256,
                512,
            )
            .unwrap();
            let s2 = gen_strategy(
                &derive_seed(&d, &KeyMaterial::from_text(&k2).unwrap()).unwrap(),
                256,
                512,
            )
            .unwrap();
            assert_ne!(s1, s2);
        }
    }

    #[test]
    fn strategy_rejects_out_of_range() {
        assert_eq!(
            Strategy::new(vec![1, 5], 4),
            Err(Error::IndexOutOfRange { index: 5, n: 4 })
        );
        assert_eq!(
            Strategy::new(vec![0], 4),
            Err(Error::IndexOutOfRange { index: 0, n: 4 })
        );
        assert_eq!(Strategy::new(vec![3, 1, 2], 3).unwrap().to_csv(), "3,1,2");
    }

    #[test]
    fn zero_length_strategy_rejected() {
        let seed = SeedMaterial::new(BitString::zeros(512));
        assert!(gen_strategy(&seed, 8, 0).is_err());
    }

    proptest! {
        #[test]
        fn strategies_stay_in_range(seed in any::<u64>(), n in 1usize..2000, len in 1usize..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits = random_bits(&mut rng, 512);
            let s = gen_strategy(&SeedMaterial::new(bits), n, len).unwrap();
            prop_assert_eq!(s.len(), len);
            prop_assert!(s.indices().iter().all(|&i| i >= 1 && i <= n));
        }
    }
}
