use super::data::random_unit;
use super::schema::norm;
use super::seeded;
use crate::costs::{scale_for_budget, CostModel};
use crate::error::{Error, Result};
use crate::game::{jury_payoff, Classifier, Population, Search};

/// Sine of the angle between `a` and `b`.
pub fn sin_angle(a: &[f64], b: &[f64]) -> f64 {
    let cos = dot(a, b) / (norm(a) * norm(b));
    (1.0 - cos * cos).max(0.0).sqrt()
}

/// `alpha` plus seed-fixed Gaussian noise, scaled so that the sine of the
/// angle to `alpha` is `target` (within 1e−3), renormalized to `‖alpha‖`.
pub fn perturb_direction(alpha: &[f64], target: f64, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::invalid(format!(
            "sin θ target must lie in [0,1), got {target}"
        )));
    }
    let len = norm(alpha);
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::invalid("alpha must be a non-zero finite vector"));
    }
    if target == 0.0 {
        return Ok(alpha.to_vec());
    }
    let unit: Vec<f64> = alpha.iter().map(|a| a / len).collect();
    let mut g = random_unit(alpha.len(), &mut seeded(seed, 3));
    // the sine along α + s·g only reaches sin(α,g) unless g leans away
    if dot(&g, &unit) < 0.0 || sin_angle(&unit, &g) < target + 1e-3 {
        let along = dot(&g, &unit);
        g.iter_mut().zip(&unit).for_each(|(gi, u)| *gi -= along * u);
        if norm(&g) < 1e-12 {
            return Err(Error::invalid(
                "alpha is one-dimensional; no direction to perturb into",
            ));
        }
    }
    let at = |s: f64| -> Vec<f64> { unit.iter().zip(&g).map(|(u, gi)| u + s * gi).collect() };
    let mut hi = 1.0;
    while sin_angle(&unit, &at(hi)) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sin_angle(&unit, &at(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let v = at(0.5 * (lo + hi));
    let n = norm(&v);
    Ok(v.into_iter().map(|x| x / n * len).collect())
}

/// Jury payoff of `f` on `test` when every member best-responds under
/// `c_true` rescaled for `t` units of gaming. The classifier must reduce to
/// a halfspace (or a constant); `c_true` must be linear or mixed.
pub fn accuracy_under_gaming(
    f: &Classifier<f64>,
    test: &Population<f64>,
    c_true: &CostModel<f64>,
    t: f64,
) -> Result<f64> {
    let c = scale_for_budget(c_true, &t)?;
    jury_payoff(f, &c, test, Search::Analytic)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
