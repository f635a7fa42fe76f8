//! Gaming-robust learners, the sample-size calculator and the linear
//! baseline they are compared against.

mod baseline;
mod bound;
mod min_separable;
mod separable;

pub use baseline::{plain_accuracy, train_baseline_linear, BaselineModel, SvmParams};
pub use bound::{bound_lhs, sample_bound, SampleBound};
pub use min_separable::{
    empirical_effective_err, train_min_separable, train_min_separable_with, GridOptions,
    TrainedConjunction, DEFAULT_GRID_BUDGET,
};
pub(crate) use separable::single_part as single_part_of;
pub use separable::{train_separable, train_threshold_with_margin, TrainedThreshold};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `(1−γ)·α′ + γ·β`.
pub fn hybrid_direction<S: Scalar>(alpha_prime: &[S], beta: &[S], gamma: &S) -> Result<Vec<S>> {
    if alpha_prime.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha_prime.len(),
            got: beta.len(),
        });
    }
    let keep = S::one() - gamma.clone();
    Ok(alpha_prime
        .iter()
        .zip(beta)
        .map(|(a, b)| keep.clone() * a.clone() + gamma.clone() * b.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hybrid_endpoints_and_midpoint() {
        let (a, b) = ([1.0, 0.0], [0.0, 1.0]);
        assert_eq!(hybrid_direction(&a, &b, &0.0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(hybrid_direction(&a, &b, &1.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(hybrid_direction(&a, &b, &0.5).unwrap(), vec![0.5, 0.5]);
        assert!(hybrid_direction(&a, &[1.0], &0.5).is_err());
    }
}
