use super::{CostModel, SeparableCost};
use crate::error::{Error, Result};
use crate::game::ScoreFn;
use crate::scalar::Scalar;

/// Rewrites a tabular cost as the minimum of `|X|²` separable costs.
///
/// Part `(w, z)` evaluates to `c(w,z) + D·[x≠w] + D·[y≠z]`, realised with
/// `b1(x) = −D·[x≠w]` and `b2(y) = c(w,z) + D·[y≠z]`. The `(x, y)` part
/// recovers `c(x,y)` and every other part costs at least `D ≥ max c`.
/// `d` defaults to the largest matrix entry.
pub fn separable_decompose<S: Scalar>(c: &CostModel<S>, d: Option<S>) -> Result<CostModel<S>> {
    let matrix = c
        .tabular_matrix()
        .ok_or_else(|| Error::unsupported("separable_decompose expects a tabular cost"))?;
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let max_entry = matrix
        .iter()
        .flatten()
        .fold(S::zero(), |m, v| if *v > m { v.clone() } else { m });
    let d = match d {
        Some(d) if d < max_entry => {
            return Err(Error::invalid(format!(
                "D = {d} is below the largest entry {max_entry}"
            )))
        }
        Some(d) => d,
        None => max_entry,
    };

    let mut parts = Vec::with_capacity(n * n);
    for w in 0..n {
        let b1: Vec<S> = (0..n)
            .map(|x| if x == w { S::zero() } else { -d.clone() })
            .collect();
        for z in 0..n {
            let base = matrix[w][z].clone();
            let b2 = (0..n)
                .map(|y| {
                    if y == z {
                        base.clone()
                    } else {
                        base.clone() + d.clone()
                    }
                })
                .collect();
            parts.push(SeparableCost::new(
                ScoreFn::tabular(b1.clone()),
                ScoreFn::tabular(b2),
            ));
        }
    }
    Ok(CostModel::min_separable(parts).with_scale(c.scale.clone()))
}
