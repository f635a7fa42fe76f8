//! Experiment harness: synthetic spam-like data, the true/assumed cost
//! error model, accuracy under gaming, and the parameter sweeps.

mod data;
mod gaming;
mod schema;
mod sweep;

pub use data::{
    generate_synthetic_population, normalize_features, train_test_split, Normalization,
    DEFAULT_ALIGNMENT,
};
pub use gaming::{accuracy_under_gaming, perturb_direction, sin_angle};
pub use schema::{Feature, FeatureSchema};
pub use sweep::{
    run_angle_sweep, run_gaming_sweep, run_hybrid_sweep, write_rows, DataSource, ExperimentConfig,
    SweepRow, GAMMA_NONE, METHOD_BASELINE, METHOD_HYBRID, METHOD_ROBUST,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random stream `stream` for `seed`.
pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
