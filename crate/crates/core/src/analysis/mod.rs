//! Statistical evaluation of the hash: one-bit diffusion, the strict
//! avalanche dependence matrix, value repartition and scaling timings.
//!
//! Every experiment derives an independent random stream per trial from
//! `(seed, trial)`, so results are identical whether trials run in parallel
//! or one after another.

mod diffusion;
mod repartition;
mod sac;
mod scaling;

pub use diffusion::{
    diffusion_test, diffusion_with, reference_diffusion, DiffusionConfig, DiffusionReport,
};
pub use repartition::{repartition_export, RepartitionExport, RepartitionRow};
pub use sac::{dependence_matrix, sac_test, sac_with, DependenceMatrix, SacConfig, SacReport};
pub use scaling::{digest_size_sweep, scaling_benchmark, ScalingRow};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream for one trial of an experiment.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
