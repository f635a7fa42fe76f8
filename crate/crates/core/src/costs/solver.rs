use super::{CostKind, CostModel};
use crate::error::{Error, Result};
use crate::game::{Point, Site};
use crate::scalar::{dot, Scalar};

const FALLBACK_ITERATIONS: usize = 10_000;

/// Cheapest way for `x` to reach `⟨w,y⟩ + b ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceCost<S> {
    pub cost: S,
    pub point: Point<S>,
    /// `true` when the closed-form candidates failed and the projected
    /// gradient fallback produced the answer.
    pub used_fallback: bool,
}

/// Minimum of `c(x, y)` over the closed halfspace `⟨w,y⟩ + b ≥ 0` for
/// linear and mixed costs.
///
/// With `r = −(⟨w,x⟩+b) > 0` the optimum lies on the boundary and is one of
/// three KKT points: hinge inactive (`d = r·w/‖w‖²`), hinge active
/// (`2εd = μw − (1−ε)α`), or on the kink `⟨α,d⟩ = 0`. All three are
/// evaluated and the cheapest kept. For `ε = 0` the kink point costs zero
/// whenever `α` is not a positive multiple of `w`, so the infimum is always
/// attained on the closed halfspace.
pub fn min_cost_to_acceptance<S: Scalar>(
    x: &Point<S>,
    w: &[S],
    b: &S,
    c: &CostModel<S>,
) -> Result<AcceptanceCost<S>> {
    let (alpha, eps) = match &c.kind {
        CostKind::Linear { alpha } => (alpha, S::zero()),
        CostKind::MixedTrue { alpha, epsilon } => (alpha, epsilon.clone()),
        _ => {
            return Err(Error::unsupported(
                "acceptance cost needs a linear or mixed cost",
            ))
        }
    };
    let n = x.dim();
    for len in [w.len(), alpha.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let ww = dot(w, w);
    if ww.is_zero() {
        return Err(Error::invalid("halfspace normal w is zero"));
    }
    let r = -(dot(w, &x.coords) + b.clone());
    if r <= S::zero() {
        return Ok(AcceptanceCost {
            cost: S::zero(),
            point: x.clone(),
            used_fallback: false,
        });
    }

    let p = S::one() - eps.clone();
    let aw = dot(alpha, w);
    let aa = dot(alpha, alpha);
    let objective = |d: &[S]| -> S {
        let hinge = dot(alpha, d);
        let hinge = if hinge > S::zero() { hinge } else { S::zero() };
        p.clone() * hinge + eps.clone() * dot(d, d)
    };
    let combo = |u: S, v: S| -> Vec<S> {
        w.iter()
            .zip(alpha)
            .map(|(wi, ai)| u.clone() * wi.clone() + v.clone() * ai.clone())
            .collect()
    };

    let mut candidates = vec![combo(r.clone() / ww.clone(), S::zero())];
    if eps > S::zero() {
        let two_eps = S::two() * eps.clone();
        let mu = (two_eps.clone() * r.clone() + p.clone() * aw.clone()) / ww.clone();
        candidates.push(combo(mu / two_eps.clone(), -p.clone() / two_eps));
    }
    let det = ww.clone() * aa.clone() - aw.clone() * aw.clone();
    if det > S::zero() {
        // u·‖w‖² + v·⟨α,w⟩ = r and u·⟨α,w⟩ + v·‖α‖² = 0
        candidates.push(combo(r.clone() * aa / det.clone(), -(r.clone() * aw) / det));
    }

    let mut best: Option<(S, Vec<S>)> = None;
    for d in candidates {
        let Some(d) = make_feasible(x, w, b, &ww, d) else {
            continue;
        };
        let v = objective(&d);
        if !v.is_finite_value() {
            continue;
        }
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, d));
        }
    }

    let (d, used_fallback) = match best {
        Some((_, d)) => (d, false),
        None if eps > S::zero() => (projected_gradient(x, w, b, alpha, &eps)?, true),
        None => {
            return Err(Error::invalid(
                "acceptance cost is not representable in this scalar type",
            ))
        }
    };
    let point = Point::new(
        x.coords
            .iter()
            .zip(&d)
            .map(|(xi, di)| xi.clone() + di.clone())
            .collect(),
    );
    let cost = c.eval(Site::free(x), Site::free(&point))?;
    Ok(AcceptanceCost {
        cost,
        point,
        used_fallback,
    })
}

/// Pushes `d` along `w` until `x + d` passes the test. Exact scalars need
/// no push; floats may land a rounding error short of the boundary.
pub(crate) fn make_feasible<S: Scalar>(
    x: &Point<S>,
    w: &[S],
    b: &S,
    ww: &S,
    mut d: Vec<S>,
) -> Option<Vec<S>> {
    if !d.iter().all(Scalar::is_finite_value) {
        return None;
    }
    let margin = |d: &[S]| {
        let y: Vec<S> = x
            .coords
            .iter()
            .zip(d)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        dot(w, &y) + b.clone()
    };
    if margin(&d) >= S::zero() {
        return Some(d);
    }
    let scale =
        x.coords
            .iter()
            .chain(d.iter())
            .fold(S::one(), |m, v| if v.abs() > m { v.abs() } else { m });
    let mut step = scale * S::lit(f64::EPSILON);
    for _ in 0..64 {
        let k = step.clone() / ww.clone();
        let pushed: Vec<S> = d
            .iter()
            .zip(w)
            .map(|(di, wi)| di.clone() + k.clone() * wi.clone())
            .collect();
        if margin(&pushed) >= S::zero() {
            d = pushed;
            return Some(d);
        }
        step = step * S::two();
    }
    None
}

/// Projected subgradient descent in `f64` for the mixed objective,
/// 10⁴ iterations with step `1/L`, `L = 2ε`. Keeps the best feasible
/// iterate.
fn projected_gradient<S: Scalar>(
    x: &Point<S>,
    w: &[S],
    b: &S,
    alpha: &[S],
    eps: &S,
) -> Result<Vec<S>> {
    let f = |v: &[S]| v.iter().map(Scalar::to_f64_lossy).collect::<Vec<f64>>();
    let (xf, wf, af) = (f(&x.coords), f(w), f(alpha));
    let (e, bf) = (eps.to_f64_lossy(), b.to_f64_lossy());
    let ww: f64 = wf.iter().map(|v| v * v).sum();
    let r = -(xf.iter().zip(&wf).map(|(a, b)| a * b).sum::<f64>() + bf);
    let dotf = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let project = |d: &mut Vec<f64>| {
        let gap = r - dotf(&wf, d);
        if gap > 0.0 {
            for (di, wi) in d.iter_mut().zip(&wf) {
                *di += gap * wi / ww;
            }
        }
    };
    let obj = |d: &[f64]| (1.0 - e) * dotf(&af, d).max(0.0) + e * dotf(d, d);

    let step = 1.0 / (2.0 * e);
    let mut d: Vec<f64> = wf.iter().map(|wi| r * wi / ww).collect();
    let mut best = (obj(&d), d.clone());
    for _ in 0..FALLBACK_ITERATIONS {
        let active = dotf(&af, &d) > 0.0;
        for (i, di) in d.iter_mut().enumerate() {
            let g = 2.0 * e * *di + if active { (1.0 - e) * af[i] } else { 0.0 };
            *di -= step * g;
        }
        project(&mut d);
        let v = obj(&d);
        if v < best.0 {
            best = (v, d.clone());
        }
    }
    let out: Vec<S> = best
        .1
        .iter()
        .map(|v| {
            S::from_f64(*v).ok_or_else(|| Error::invalid("fallback produced a non-finite step"))
        })
        .collect::<Result<_>>()?;
    let ww = dot(w, w);
    make_feasible(x, w, b, &ww, out)
        .ok_or_else(|| Error::invalid("fallback did not reach the halfspace"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::Rational;

    fn solve(x: &[f64], w: &[f64], b: f64, c: &CostModel<f64>) -> AcceptanceCost<f64> {
        min_cost_to_acceptance(&Point::new(x.to_vec()), w, &b, c).unwrap()
    }

    #[test]
    fn already_accepted_stays() {
        let r = solve(
            &[1.0, 0.0],
            &[1.0, 0.0],
            0.0,
            &CostModel::mixed(vec![1.0, 0.0], 0.5),
        );
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.point.coords, vec![1.0, 0.0]);
    }

    #[test]
    fn pure_quadratic() {
        let r = solve(
            &[-2.0, 0.0],
            &[1.0, 0.0],
            0.0,
            &CostModel::mixed(vec![1.0, 0.0], 1.0),
        );
        assert_eq!(r.cost, 4.0);
        assert_eq!(r.point.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn pure_linear_parallel() {
        let r = solve(
            &[-2.0, 0.0],
            &[1.0, 0.0],
            0.0,
            &CostModel::linear(vec![1.0, 0.0]),
        );
        assert_eq!(r.cost, 2.0);
        assert_eq!(r.point.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn pure_linear_free_direction() {
        // α orthogonal to w: crossing is free
        let r = solve(
            &[-2.0, 0.0],
            &[1.0, 0.0],
            0.0,
            &CostModel::linear(vec![0.0, 1.0]),
        );
        assert_eq!(r.cost, 0.0);
        assert!(r.point.coords[0] >= 0.0);
    }

    #[test]
    fn exact_rationals() {
        let q = |n| rational(n, 1);
        let c = CostModel::<Rational>::mixed(vec![q(1), q(1)], rational(1, 2));
        let r = min_cost_to_acceptance(&Point::new(vec![q(-3), q(0)]), &[q(1), q(0)], &q(0), &c)
            .unwrap();
        // hinge active: d = (3, -1/2), cost = ½·(5/2) + ½·(9 + 1/4)
        assert_eq!(r.point.coords, vec![q(0), rational(-1, 2)]);
        assert_eq!(r.cost, rational(47, 8));
    }

    #[test]
    fn scale_multiplies() {
        let c = CostModel::mixed(vec![1.0, 0.0], 1.0).with_scale(0.5);
        assert_eq!(solve(&[-2.0, 0.0], &[1.0, 0.0], 0.0, &c).cost, 2.0);
    }

    #[test]
    fn errors() {
        let c = CostModel::linear(vec![1.0, 0.0]);
        let x = Point::new(vec![0.0, 0.0]);
        assert!(min_cost_to_acceptance(&x, &[0.0, 0.0], &-1.0, &c).is_err());
        assert!(min_cost_to_acceptance(&x, &[1.0], &-1.0, &c).is_err());
        let t = CostModel::tabular(vec![vec![0.0]]);
        assert!(min_cost_to_acceptance(&x, &[1.0, 0.0], &-1.0, &t).is_err());
    }

    #[test]
    fn fallback_agrees_with_closed_form() {
        let x = Point::new(vec![-1.0, 0.5, 2.0]);
        let (w, b, alpha, eps): ([f64; 3], f64, [f64; 3], f64) =
            ([1.0, 2.0, -0.5], 0.3, [0.4, -1.0, 2.0], 0.3);
        let closed =
            min_cost_to_acceptance(&x, &w, &b, &CostModel::mixed(alpha.to_vec(), eps)).unwrap();
        let d = projected_gradient(&x, &w, &b, &alpha, &eps).unwrap();
        let y = Point::new(x.coords.iter().zip(&d).map(|(a, b)| a + b).collect());
        let c = CostModel::mixed(alpha.to_vec(), eps);
        let v = c.eval(Site::free(&x), Site::free(&y)).unwrap();
        assert!(
            (v - closed.cost).abs() <= 1e-6 * closed.cost.max(1.0),
            "{v} vs {}",
            closed.cost
        );
    }
}
