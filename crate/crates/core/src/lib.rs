//! A keyed hash function built on asynchronous iterations of the Boolean
//! negation map.
//!
//! A message is normalized into an expanded string `D` and an initial
//! `n`-bit configuration `x0` ([`pretreatment`]). `D` XORed with the repeated
//! key seeds a combined xorshift-family generator that draws a strategy of
//! `2n` component indices ([`strategy`]). Running the strategy through the
//! negation map, one component per step ([`dynamics`]), gives the digest
//! ([`hash`]).
//!
//! The same machinery wraps any keyed hash as a post-treatment: the inner
//! digest is moved through `N` keyed asynchronous steps of a bijective map.
//! Collisions of the wrapped hash are exactly the collisions of the inner
//! one.
//!
//! [`analysis`] holds the statistical battery (one-bit diffusion, the strict
//! avalanche dependence matrix, value repartition, scaling timings) and
//! [`metric`] the phase-space distance used by the property tests.
//!
//! This is a research artifact. It makes no claim of cryptographic strength
//! and nothing here runs in constant time.
//!
//! ```
//! use chaoshash::{chaos_hash, ChaosHashParams};
//!
//! let params = ChaosHashParams::with_text_key(256, "my key").unwrap();
//! let digest = chaos_hash(&params, b"The original text").unwrap();
//! assert_eq!(digest.len(), 64);
//! ```

pub mod analysis;
pub mod bits;
pub mod dynamics;
pub mod error;
pub mod hash;
pub mod metric;
pub mod pretreatment;
pub mod strategy;

pub use bits::{encode_ascii7, BitString, Configuration};
pub use dynamics::{
    apply_f, check_bijective_iteration, check_bijective_step, iterate, named_map, step_g,
    BooleanMap, Constant, Identity, Negation, Rotation, StepPermutation, SystemPoint,
};
pub use error::{Error, Result};
pub use hash::{
    chaos_hash, chaos_hash_bits, invert_post_treat, named_inner, post_treat, ChaosHashParams,
    ChaosInner, InnerHash, PostTreatKey, PostTreatment, XorFoldInner, DEFAULT_DIGEST_BITS,
};
pub use metric::{d, d_e, d_s, Distance, MetricPoint};
pub use pretreatment::{normalize, normalize_bits, NormalizedMessage};
pub use strategy::{
    condense_seed, derive_seed, gen_strategy, CombinedXorshift, GeneratorState, KeyMaterial,
    SeedMaterial, StateWidth, Strategy,
};
