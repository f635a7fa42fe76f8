//! Cost-function families and their shared evaluation contract.
//!
//! Every model evaluates to `scale × formula`, is non-negative, and is zero
//! on identical sites. The `scale` field carries the `2/t` gaming-budget
//! factor (see [`scale_for_budget`]).

mod decompose;
mod metric;
mod solver;

pub use decompose::separable_decompose;
pub use metric::{
    covering_radius, greedy_net, metric_net_approximate, validate_metric, MetricCheckReport,
};
pub(crate) use solver::make_feasible;
pub use solver::{min_cost_to_acceptance, AcceptanceCost};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ScoreFn, ScoreRange, Site};
use crate::scalar::{dot, max0, min_of, Scalar};

/// `max(0, c2(y) − c1(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct SeparableCost<S> {
    pub c1: ScoreFn<S>,
    pub c2: ScoreFn<S>,
}

impl<S: Scalar> SeparableCost<S> {
    pub fn new(c1: ScoreFn<S>, c2: ScoreFn<S>) -> Self {
        SeparableCost { c1, c2 }
    }

    /// Linear cost `⟨α, y − x⟩₊` as a separable pair over the real line.
    pub fn from_linear(alpha: Vec<S>) -> Self {
        let f = ScoreFn::linear(alpha);
        SeparableCost {
            c1: f.clone(),
            c2: f,
        }
    }

    pub fn eval(&self, x: Site<'_, S>, y: Site<'_, S>) -> Result<S> {
        Ok(max0(self.c2.eval(y)? - self.c1.eval(x)?))
    }

    /// `range(c1) ⊆ range(c2)`; exact for finite ranges, taken on
    /// declaration for the real line.
    pub fn range_condition_holds(&self) -> bool {
        self.c1.range().is_subset_of(&self.c2.range())
    }

    pub fn scaled(&self, k: &S) -> Self {
        SeparableCost {
            c1: self.c1.scaled(k),
            c2: self.c2.scaled(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub enum CostKind<S> {
    Linear {
        alpha: Vec<S>,
    },
    Separable(SeparableCost<S>),
    MinSeparable {
        parts: Vec<SeparableCost<S>>,
    },
    Tabular {
        matrix: Vec<Vec<S>>,
    },
    /// `(1−ε)⟨α, y−x⟩₊ + ε‖y−x‖²`.
    #[serde(rename = "mixed")]
    MixedTrue {
        alpha: Vec<S>,
        epsilon: S,
    },
}

fn unit<S: Scalar>() -> S {
    S::one()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct CostModel<S: Scalar> {
    #[serde(flatten)]
    pub kind: CostKind<S>,
    #[serde(default = "unit")]
    pub scale: S,
}

impl<S: Scalar> CostModel<S> {
    pub fn new(kind: CostKind<S>) -> Self {
        CostModel {
            kind,
            scale: S::one(),
        }
    }

    pub fn linear(alpha: Vec<S>) -> Self {
        Self::new(CostKind::Linear { alpha })
    }

    pub fn separable(c1: ScoreFn<S>, c2: ScoreFn<S>) -> Self {
        Self::new(CostKind::Separable(SeparableCost::new(c1, c2)))
    }

    pub fn min_separable(parts: Vec<SeparableCost<S>>) -> Self {
        Self::new(CostKind::MinSeparable { parts })
    }

    pub fn tabular(matrix: Vec<Vec<S>>) -> Self {
        Self::new(CostKind::Tabular { matrix })
    }

    pub fn mixed(alpha: Vec<S>, epsilon: S) -> Self {
        Self::new(CostKind::MixedTrue { alpha, epsilon })
    }

    pub fn with_scale(mut self, scale: S) -> Self {
        self.scale = scale;
        self
    }

    /// `c(x, y)`. Identical sites cost zero for every family.
    pub fn eval(&self, x: Site<'_, S>, y: Site<'_, S>) -> Result<S> {
        if x.same_as(&y) {
            return Ok(S::zero());
        }
        let raw = match &self.kind {
            CostKind::Linear { alpha } => {
                let d = displacement(alpha.len(), x, y)?;
                max0(dot(alpha, &d))
            }
            CostKind::Separable(sep) => sep.eval(x, y)?,
            CostKind::MinSeparable { parts } => {
                let mut best: Option<S> = None;
                for part in parts {
                    let v = part.eval(x, y)?;
                    best = Some(match best {
                        Some(b) => min_of(b, v),
                        None => v,
                    });
                }
                best.ok_or_else(|| Error::invalid("min-separable cost with no parts"))?
            }
            CostKind::Tabular { matrix } => {
                let n = matrix.len();
                let (i, j) = match (x.index, y.index) {
                    (Some(i), Some(j)) => (i, j),
                    _ => {
                        return Err(Error::unsupported(
                            "tabular cost evaluated at a non-member point",
                        ))
                    }
                };
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, len: n });
                }
                matrix[i][j].clone()
            }
            CostKind::MixedTrue { alpha, epsilon } => {
                let d = displacement(alpha.len(), x, y)?;
                let sq = dot(&d, &d);
                (S::one() - epsilon.clone()) * max0(dot(alpha, &d)) + epsilon.clone() * sq
            }
        };
        Ok(self.scale.clone() * raw)
    }

    /// Checks the family invariants: positive scale, ε ∈ [0,1],
    /// non-negative zero-diagonal square matrices, separable range
    /// condition, consistent dimensions.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite_value() && self.scale > S::zero()) {
            return Err(Error::invalid(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        match &self.kind {
            CostKind::Linear { alpha } => check_vector(alpha),
            CostKind::MixedTrue { alpha, epsilon } => {
                check_vector(alpha)?;
                if !(*epsilon >= S::zero() && *epsilon <= S::one()) {
                    return Err(Error::invalid(format!(
                        "epsilon must lie in [0,1], got {epsilon}"
                    )));
                }
                Ok(())
            }
            CostKind::Separable(sep) => {
                if !sep.range_condition_holds() {
                    return Err(Error::invalid(
                        "separable cost requires range(c1) ⊆ range(c2)",
                    ));
                }
                Ok(())
            }
            CostKind::MinSeparable { parts } => {
                if parts.is_empty() {
                    return Err(Error::invalid("min-separable cost with no parts"));
                }
                Ok(())
            }
            CostKind::Tabular { matrix } => {
                let n = matrix.len();
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::invalid(format!(
                            "row {i} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    for (j, v) in row.iter().enumerate() {
                        if !v.is_finite_value() || *v < S::zero() {
                            return Err(Error::invalid(format!(
                                "entry ({i},{j}) = {v} is negative or non-finite"
                            )));
                        }
                        if i == j && !v.is_zero() {
                            return Err(Error::invalid(format!(
                                "diagonal entry {i} is {v}, expected 0"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// The separable parts whose minimum is this cost (scale not applied),
    /// for the families that have such a form.
    pub fn separable_parts(&self) -> Option<Vec<SeparableCost<S>>> {
        match &self.kind {
            CostKind::Linear { alpha } => Some(vec![SeparableCost::from_linear(alpha.clone())]),
            CostKind::Separable(sep) => Some(vec![sep.clone()]),
            CostKind::MinSeparable { parts } => Some(parts.clone()),
            _ => None,
        }
    }

    pub fn tabular_matrix(&self) -> Option<&Vec<Vec<S>>> {
        match &self.kind {
            CostKind::Tabular { matrix } => Some(matrix),
            _ => None,
        }
    }

    /// Full pairwise matrix over a population, scale included.
    pub fn matrix_over(&self, pop: &crate::game::Population<S>) -> Result<Vec<Vec<S>>> {
        (0..pop.len())
            .map(|i| {
                (0..pop.len())
                    .map(|j| self.eval(pop.site(i), pop.site(j)))
                    .collect()
            })
            .collect()
    }
}

fn check_vector<S: Scalar>(v: &[S]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid("cost direction is empty"));
    }
    if !v.iter().all(Scalar::is_finite_value) {
        return Err(Error::invalid("non-finite cost coefficient"));
    }
    Ok(())
}

fn displacement<S: Scalar>(dim: usize, x: Site<'_, S>, y: Site<'_, S>) -> Result<Vec<S>> {
    for p in [x.point, y.point] {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    Ok(y.point
        .coords
        .iter()
        .zip(&x.point.coords)
        .map(|(a, b)| a.clone() - b.clone())
        .collect())
}

/// Rescales a cost so Contestant will move up to `t` units of original
/// cost: the scale is multiplied by `2/t`.
pub fn scale_for_budget<S: Scalar>(c: &CostModel<S>, t: &S) -> Result<CostModel<S>> {
    if !(t.is_finite_value() && *t > S::zero()) {
        return Err(Error::invalid(format!(
            "gaming budget must be positive, got {t}"
        )));
    }
    let mut out = c.clone();
    out.scale = c.scale.clone() * (S::two() / t.clone());
    Ok(out)
}

/// Finite range helper for callers building tabular separable costs.
pub fn tabular_range<S: Scalar>(values: &[S]) -> ScoreRange<S> {
    ScoreRange::finite(values.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Point;
    use crate::scalar::rational;
    use crate::Rational;

    fn pt(v: &[f64]) -> Point<f64> {
        Point::new(v.to_vec())
    }

    #[test]
    fn identical_sites_cost_zero() {
        let x = pt(&[1.0, 2.0]);
        for c in [
            CostModel::linear(vec![1.0, -1.0]),
            CostModel::mixed(vec![1.0, 0.0], 0.5),
            CostModel::separable(
                ScoreFn::linear(vec![1.0, 0.0]),
                ScoreFn::linear(vec![0.0, 1.0]),
            ),
        ] {
            assert_eq!(c.eval(Site::free(&x), Site::free(&x)).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_formula() {
        let c = CostModel::linear(vec![1.0, -1.0]);
        let (x, y) = (pt(&[0.0, 0.0]), pt(&[2.0, 1.0]));
        assert_eq!(c.eval(Site::free(&x), Site::free(&y)).unwrap(), 1.0);
        assert_eq!(c.eval(Site::free(&y), Site::free(&x)).unwrap(), 0.0);
    }

    #[test]
    fn mixed_formula() {
        let c = CostModel::mixed(vec![1.0, 0.0], 0.5);
        let (x, y) = (pt(&[0.0, 0.0]), pt(&[2.0, 0.0]));
        assert_eq!(c.eval(Site::free(&x), Site::free(&y)).unwrap(), 3.0);
    }

    #[test]
    fn mixed_formula_exact() {
        let c = CostModel::<Rational>::mixed(vec![rational(1, 1), rational(0, 1)], rational(1, 2));
        let x = Point::new(vec![rational(0, 1), rational(0, 1)]);
        let y = Point::new(vec![rational(2, 1), rational(0, 1)]);
        assert_eq!(
            c.eval(Site::free(&x), Site::free(&y)).unwrap(),
            rational(3, 1)
        );
    }

    #[test]
    fn dimension_and_index_errors() {
        let c = CostModel::linear(vec![1.0, 0.0]);
        let (x, y) = (pt(&[0.0]), pt(&[1.0, 0.0]));
        assert!(matches!(
            c.eval(Site::free(&x), Site::free(&y)),
            Err(Error::DimensionMismatch { .. })
        ));
        let t = CostModel::tabular(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let p = pt(&[0.0]);
        assert!(matches!(
            t.eval(Site::member(0, &p), Site::member(5, &p)),
            Err(Error::IndexOutOfRange { .. })
        ));
        let q = pt(&[1.0]);
        assert!(t.eval(Site::free(&p), Site::member(1, &q)).is_err());
    }

    #[test]
    fn budget_scaling() {
        let c = CostModel::linear(vec![1.0]);
        let (x, y) = (pt(&[0.0]), pt(&[1.5]));
        let base = c.eval(Site::free(&x), Site::free(&y)).unwrap();
        let at = |t: f64| {
            scale_for_budget(&c, &t)
                .unwrap()
                .eval(Site::free(&x), Site::free(&y))
                .unwrap()
        };
        assert_eq!(at(2.0), base);
        assert_eq!(at(1.0), 2.0 * base);
        assert_eq!(at(4.0), 0.5 * base);
        assert!(scale_for_budget(&c, &0.0).is_err());
        assert!(scale_for_budget(&c, &-1.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(CostModel::tabular(vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .validate()
            .is_ok());
        assert!(CostModel::tabular(vec![vec![1.0, 1.0], vec![1.0, 0.0]])
            .validate()
            .is_err());
        assert!(CostModel::tabular(vec![vec![0.0, -1.0], vec![1.0, 0.0]])
            .validate()
            .is_err());
        assert!(CostModel::mixed(vec![1.0], 1.5).validate().is_err());
        let bad = CostModel::separable(
            ScoreFn::tabular(vec![0.0, 5.0]),
            ScoreFn::tabular(vec![0.0, 1.0]),
        );
        assert!(bad.validate().is_err());
        let good = CostModel::separable(
            ScoreFn::tabular(vec![1.0, 1.0]),
            ScoreFn::tabular(vec![0.0, 1.0]),
        );
        assert!(good.validate().is_ok());
        assert!(CostModel::linear(vec![1.0])
            .with_scale(0.0)
            .validate()
            .is_err());
    }

    #[test]
    fn cost_json_formats() {
        let c: CostModel<f64> =
            serde_json::from_str(r#"{"type":"mixed","alpha":[1,2],"epsilon":0.2}"#).unwrap();
        assert_eq!(c, CostModel::mixed(vec![1.0, 2.0], 0.2));
        let c: CostModel<f64> =
            serde_json::from_str(r#"{"type":"linear","alpha":[1],"scale":2}"#).unwrap();
        assert_eq!(c.scale, 2.0);
        let s = serde_json::to_string(&CostModel::tabular(vec![vec![0.0]])).unwrap();
        assert_eq!(s, r#"{"type":"tabular","matrix":[[0.0]],"scale":1.0}"#);
        let sep = r#"{"type":"separable","c1":{"type":"tabular","values":[1,2]},"c2":{"type":"linear","alpha":[1],"range":[1,2,3]}}"#;
        let c: CostModel<f64> = serde_json::from_str(sep).unwrap();
        assert!(matches!(c.kind, CostKind::Separable(_)));
        let ms = r#"{"type":"min_separable","parts":[{"c1":{"type":"linear","alpha":[1]},"c2":{"type":"linear","alpha":[1]}}]}"#;
        let c: CostModel<f64> = serde_json::from_str(ms).unwrap();
        assert!(matches!(c.kind, CostKind::MinSeparable { ref parts } if parts.len() == 1));
    }
}
