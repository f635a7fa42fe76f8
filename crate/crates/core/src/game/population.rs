use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary label, `−1` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn from_sign(v: i64) -> Option<Label> {
        match v {
            -1 => Some(Label::Neg),
            1 => Some(Label::Pos),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn value<S: Scalar>(self) -> S {
        match self {
            Label::Neg => -S::one(),
            Label::Pos => S::one(),
        }
    }

    pub fn is_pos(self) -> bool {
        self == Label::Pos
    }

    pub fn from_bool(accept: bool) -> Label {
        if accept {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

impl Serialize for Label {
    fn serialize<Z: Serializer>(&self, ser: Z) -> std::result::Result<Z::Ok, Z::Error> {
        ser.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(de)?;
        Label::from_sign(v)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be -1 or 1, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl<S> From<Vec<S>> for Point<S> {
    fn from(coords: Vec<S>) -> Self {
        Point { coords }
    }
}

/// A location a cost or score can be evaluated at: a population member
/// (index known, so tabular models apply) or a free point in feature space.
#[derive(Debug)]
pub struct Site<'a, S> {
    pub index: Option<usize>,
    pub point: &'a Point<S>,
}

impl<S> Clone for Site<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Site<'_, S> {}

impl<'a, S: Scalar> Site<'a, S> {
    pub fn member(index: usize, point: &'a Point<S>) -> Self {
        Site {
            index: Some(index),
            point,
        }
    }

    pub fn free(point: &'a Point<S>) -> Self {
        Site { index: None, point }
    }

    pub fn same_as(&self, other: &Site<'_, S>) -> bool {
        match (self.index, other.index) {
            (Some(a), Some(b)) => a == b,
            _ => self.point == other.point,
        }
    }
}

/// Weighted labeled point; training samples carry the population index
/// they were drawn from so tabular scores can be evaluated on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<S> {
    pub index: Option<usize>,
    pub point: Point<S>,
    pub label: Label,
    pub weight: S,
}

impl<S: Scalar> Sample<S> {
    pub fn site(&self) -> Site<'_, S> {
        Site {
            index: self.index,
            point: &self.point,
        }
    }

    pub fn unit(point: Point<S>, label: Label) -> Self {
        Sample {
            index: None,
            point,
            label,
            weight: S::one(),
        }
    }
}

/// Finite weighted population with target labels. The sampling
/// distribution is weight-proportional.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<S> {
    points: Vec<Point<S>>,
    weights: Vec<S>,
    labels: Vec<Label>,
    dim: usize,
}

impl<S: Scalar> Population<S> {
    pub fn new(points: Vec<Point<S>>, weights: Vec<S>, labels: Vec<Label>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if labels.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        let dim = points[0].dim();
        if dim == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if !p.coords.iter().all(Scalar::is_finite_value) {
                return Err(Error::invalid("non-finite coordinate"));
            }
        }
        for w in &weights {
            if !(w.is_finite_value() && *w > S::zero()) {
                return Err(Error::invalid(format!("weights must be positive, got {w}")));
            }
        }
        Ok(Population {
            points,
            weights,
            labels,
            dim,
        })
    }

    /// Unit-weight population.
    pub fn unweighted(points: Vec<Point<S>>, labels: Vec<Label>) -> Result<Self> {
        let weights = vec![S::one(); points.len()];
        Self::new(points, weights, labels)
    }

    /// Population over an abstract finite set: point `i` gets the single
    /// coordinate `i`. Used with tabular costs and scores.
    pub fn indexed(weights: Vec<S>, labels: Vec<Label>) -> Result<Self> {
        let points = (0..weights.len())
            .map(|i| Point::new(vec![S::from_usize(i).expect("index fits scalar")]))
            .collect();
        Self::new(points, weights, labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn site(&self, i: usize) -> Site<'_, S> {
        Site::member(i, &self.points[i])
    }

    pub fn total_weight(&self) -> S {
        self.weights
            .iter()
            .fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// Probability of member `i` under the induced distribution.
    pub fn probability(&self, i: usize) -> S {
        self.weights[i].clone() / self.total_weight()
    }

    /// Every member as a weighted training sample.
    pub fn samples(&self) -> Vec<Sample<S>> {
        (0..self.len()).map(|i| self.sample(i)).collect()
    }

    pub fn sample(&self, i: usize) -> Sample<S> {
        Sample {
            index: Some(i),
            point: self.points[i].clone(),
            label: self.labels[i],
            weight: self.weights[i].clone(),
        }
    }

    /// Sub-population keeping member order of `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(indices.len());
        let mut weights = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            points.push(self.points[i].clone());
            weights.push(self.weights[i].clone());
            labels.push(self.labels[i]);
        }
        Self::new(points, weights, labels)
    }

    /// Weighted fraction of members for which `hit(i)` holds, summed in
    /// index order.
    pub fn weighted_fraction(&self, hit: impl Fn(usize) -> bool) -> S {
        self.weighted_count(hit) / self.total_weight()
    }

    pub fn weighted_count(&self, hit: impl Fn(usize) -> bool) -> S {
        let mut acc = S::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if hit(i) {
                acc = acc + w.clone();
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_populations() {
        let p = |v: f64| Point::new(vec![v]);
        assert!(matches!(
            Population::<f64>::new(vec![], vec![], vec![]),
            Err(Error::EmptyPopulation)
        ));
        assert!(Population::new(vec![p(1.0)], vec![0.0], vec![Label::Pos]).is_err());
        assert!(Population::new(vec![p(1.0)], vec![1.0, 2.0], vec![Label::Pos]).is_err());
        assert!(Population::new(
            vec![p(1.0), Point::new(vec![1.0, 2.0])],
            vec![1.0, 1.0],
            vec![Label::Pos; 2]
        )
        .is_err());
        assert!(Population::new(vec![p(f64::NAN)], vec![1.0], vec![Label::Pos]).is_err());
    }

    #[test]
    fn probability_is_weight_proportional() {
        let pop = Population::indexed(vec![1.0, 3.0], vec![Label::Neg, Label::Pos]).unwrap();
        assert_eq!(pop.probability(1), 0.75);
        assert_eq!(pop.weighted_fraction(|i| i == 0), 0.25);
    }

    #[test]
    fn label_serde() {
        assert_eq!(
            serde_json::to_string(&vec![Label::Neg, Label::Pos]).unwrap(),
            "[-1,1]"
        );
        assert!(serde_json::from_str::<Label>("0").is_err());
    }
}
