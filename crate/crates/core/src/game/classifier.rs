use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::population::{Label, Site};
use crate::error::{Error, Result};
use crate::scalar::{dot, total_cmp, Ext, Scalar};

/// Declared image of a score function: the whole real line, or a finite
/// sorted set of values.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ScoreRange<S> {
    #[default]
    RealLine,
    Finite(Vec<S>),
}

impl<S: Scalar> ScoreRange<S> {
    /// Sorted, deduplicated finite range.
    pub fn finite(mut values: Vec<S>) -> Self {
        values.sort_by(total_cmp);
        values.dedup();
        ScoreRange::Finite(values)
    }

    /// `max(range ∩ [lo, hi])`.
    pub fn max_in(&self, lo: &S, hi: &S) -> Option<S> {
        if lo > hi {
            return None;
        }
        match self {
            ScoreRange::RealLine => Some(hi.clone()),
            ScoreRange::Finite(vals) => {
                let p = vals.partition_point(|v| v <= hi);
                if p == 0 {
                    return None;
                }
                let v = &vals[p - 1];
                (v >= lo).then(|| v.clone())
            }
        }
    }

    /// Smallest range value strictly above `v`; `None` for the real line
    /// (no minimum exists) or when nothing lies above.
    pub fn min_above(&self, v: &S) -> Option<S> {
        match self {
            ScoreRange::RealLine => None,
            ScoreRange::Finite(vals) => vals.get(vals.partition_point(|x| x <= v)).cloned(),
        }
    }

    pub fn min(&self) -> Option<S> {
        match self {
            ScoreRange::RealLine => None,
            ScoreRange::Finite(vals) => vals.first().cloned(),
        }
    }

    pub fn contains(&self, v: &S) -> bool {
        match self {
            ScoreRange::RealLine => true,
            ScoreRange::Finite(vals) => vals.binary_search_by(|x| total_cmp(x, v)).is_ok(),
        }
    }

    /// Range inclusion; the real line contains everything and is only
    /// contained in itself.
    pub fn is_subset_of(&self, other: &ScoreRange<S>) -> bool {
        match (self, other) {
            (_, ScoreRange::RealLine) => true,
            (ScoreRange::RealLine, ScoreRange::Finite(_)) => false,
            (ScoreRange::Finite(a), ScoreRange::Finite(_)) => a.iter().all(|v| other.contains(v)),
        }
    }

    pub fn scaled(&self, k: &S) -> Self {
        match self {
            ScoreRange::RealLine => ScoreRange::RealLine,
            ScoreRange::Finite(vals) => {
                ScoreRange::finite(vals.iter().map(|v| v.clone() * k.clone()).collect())
            }
        }
    }
}

impl<S: Serialize> Serialize for ScoreRange<S> {
    fn serialize<Z: Serializer>(&self, ser: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            ScoreRange::RealLine => ser.serialize_str("real_line"),
            ScoreRange::Finite(v) => v.serialize(ser),
        }
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for ScoreRange<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<S> {
            Tag(String),
            Values(Vec<S>),
        }
        match Repr::<S>::deserialize(de)? {
            Repr::Tag(s) if s == "real_line" => Ok(ScoreRange::RealLine),
            Repr::Tag(s) => Err(serde::de::Error::custom(format!("unknown range {s:?}"))),
            Repr::Values(v) => Ok(ScoreRange::finite(v)),
        }
    }
}

/// Real-valued score over the population: a linear functional of the
/// coordinates, or a table indexed by member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub enum ScoreFn<S> {
    Linear {
        alpha: Vec<S>,
        #[serde(default)]
        range: ScoreRange<S>,
    },
    Tabular {
        values: Vec<S>,
    },
}

impl<S: Scalar> ScoreFn<S> {
    pub fn linear(alpha: Vec<S>) -> Self {
        ScoreFn::Linear {
            alpha,
            range: ScoreRange::RealLine,
        }
    }

    pub fn tabular(values: Vec<S>) -> Self {
        ScoreFn::Tabular { values }
    }

    pub fn eval(&self, at: Site<'_, S>) -> Result<S> {
        match self {
            ScoreFn::Linear { alpha, .. } => {
                if alpha.len() != at.point.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: alpha.len(),
                        got: at.point.dim(),
                    });
                }
                Ok(dot(alpha, &at.point.coords))
            }
            ScoreFn::Tabular { values } => {
                let i = at.index.ok_or_else(|| {
                    Error::unsupported("tabular score evaluated at a non-member point")
                })?;
                values.get(i).cloned().ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: values.len(),
                })
            }
        }
    }

    pub fn range(&self) -> ScoreRange<S> {
        match self {
            ScoreFn::Linear { range, .. } => range.clone(),
            ScoreFn::Tabular { values } => ScoreRange::finite(values.clone()),
        }
    }

    /// `k · score`, with the declared range scaled alongside.
    pub fn scaled(&self, k: &S) -> Self {
        match self {
            ScoreFn::Linear { alpha, range } => ScoreFn::Linear {
                alpha: alpha.iter().map(|a| a.clone() * k.clone()).collect(),
                range: range.scaled(k),
            },
            ScoreFn::Tabular { values } => ScoreFn::Tabular {
                values: values.iter().map(|v| v.clone() * k.clone()).collect(),
            },
        }
    }

    pub fn as_linear(&self) -> Option<&[S]> {
        match self {
            ScoreFn::Linear { alpha, .. } => Some(alpha),
            ScoreFn::Tabular { .. } => None,
        }
    }

    pub fn tabular_values(&self) -> Option<&[S]> {
        match self {
            ScoreFn::Tabular { values } => Some(values),
            ScoreFn::Linear { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct ThresholdPart<S> {
    pub score: ScoreFn<S>,
    pub t: Ext<S>,
}

/// Publishable classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub enum Classifier<S> {
    Constant {
        label: Label,
    },
    /// `+1` iff `⟨w,x⟩ + b ≥ 0`.
    Linear {
        w: Vec<S>,
        b: S,
    },
    /// `+1` iff `score(x) ≥ t`.
    Threshold {
        score: ScoreFn<S>,
        t: Ext<S>,
    },
    /// `+1` iff every part's threshold is met.
    Conjunction {
        parts: Vec<ThresholdPart<S>>,
    },
    Tabular {
        labels: Vec<Label>,
    },
}

impl<S: Scalar> Classifier<S> {
    pub fn reject_all() -> Self {
        Classifier::Constant { label: Label::Neg }
    }

    pub fn accept_all() -> Self {
        Classifier::Constant { label: Label::Pos }
    }

    pub fn predict(&self, at: Site<'_, S>) -> Result<Label> {
        Ok(match self {
            Classifier::Constant { label } => *label,
            Classifier::Linear { w, b } => {
                if w.len() != at.point.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: w.len(),
                        got: at.point.dim(),
                    });
                }
                Label::from_bool(dot(w, &at.point.coords) + b.clone() >= S::zero())
            }
            Classifier::Threshold { score, t } => match t {
                Ext::Infinity => Label::Neg,
                Ext::Finite(_) => Label::from_bool(t.admits(&score.eval(at)?)),
            },
            Classifier::Conjunction { parts } => {
                for part in parts {
                    if part.t.is_infinite() || !part.t.admits(&part.score.eval(at)?) {
                        return Ok(Label::Neg);
                    }
                }
                Label::Pos
            }
            Classifier::Tabular { labels } => {
                let i = at.index.ok_or_else(|| {
                    Error::unsupported("tabular classifier applied to a non-member point")
                })?;
                *labels.get(i).ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: labels.len(),
                })?
            }
        })
    }

    /// Halfspace form `(w, b)` for classifiers that are affine tests on the
    /// coordinates. Constant and `t = ∞` classifiers return `None`; use
    /// [`Classifier::constant_label`] for those.
    pub fn as_halfspace(&self) -> Option<(Vec<S>, S)> {
        match self {
            Classifier::Linear { w, b } => Some((w.clone(), b.clone())),
            Classifier::Threshold {
                score: ScoreFn::Linear { alpha, .. },
                t: Ext::Finite(t),
            } => Some((alpha.clone(), -t.clone())),
            _ => None,
        }
    }

    pub fn constant_label(&self) -> Option<Label> {
        match self {
            Classifier::Constant { label } => Some(*label),
            Classifier::Threshold {
                t: Ext::Infinity, ..
            } => Some(Label::Neg),
            Classifier::Linear { w, b } if w.iter().all(|v| v.is_zero()) => {
                Some(Label::from_bool(*b >= S::zero()))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::population::Point;

    #[test]
    fn range_interval_queries() {
        let r = ScoreRange::finite(vec![5.0, 1.0, 3.0, 3.0]);
        assert_eq!(r, ScoreRange::Finite(vec![1.0, 3.0, 5.0]));
        assert_eq!(r.max_in(&1.5, &3.5), Some(3.0));
        assert_eq!(r.max_in(&3.5, &4.5), None);
        assert_eq!(r.max_in(&5.0, &7.0), Some(5.0));
        assert_eq!(r.min_above(&3.0), Some(5.0));
        assert_eq!(r.min_above(&5.0), None);
        assert_eq!(ScoreRange::<f64>::RealLine.max_in(&3.0, &5.0), Some(5.0));
    }

    #[test]
    fn range_inclusion() {
        let small = ScoreRange::finite(vec![1.0, 2.0]);
        let big = ScoreRange::finite(vec![0.0, 1.0, 2.0]);
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(big.is_subset_of(&ScoreRange::RealLine));
        assert!(!ScoreRange::RealLine.is_subset_of(&big));
    }

    #[test]
    fn predictions() {
        let p = Point::new(vec![1.0, -1.0]);
        let at = Site::free(&p);
        let lin = Classifier::Linear {
            w: vec![1.0, 1.0],
            b: 0.0,
        };
        assert_eq!(lin.predict(at).unwrap(), Label::Pos);
        let th = Classifier::Threshold {
            score: ScoreFn::linear(vec![1.0, 0.0]),
            t: Ext::Finite(1.0),
        };
        assert_eq!(th.predict(at).unwrap(), Label::Pos);
        let th_inf = Classifier::Threshold {
            score: ScoreFn::linear(vec![1.0, 0.0]),
            t: Ext::Infinity,
        };
        assert_eq!(th_inf.predict(at).unwrap(), Label::Neg);
        let conj = Classifier::Conjunction {
            parts: vec![
                ThresholdPart {
                    score: ScoreFn::linear(vec![1.0, 0.0]),
                    t: Ext::Finite(0.0),
                },
                ThresholdPart {
                    score: ScoreFn::linear(vec![0.0, 1.0]),
                    t: Ext::Finite(0.0),
                },
            ],
        };
        assert_eq!(conj.predict(at).unwrap(), Label::Neg);
        let tab = Classifier::<f64>::Tabular {
            labels: vec![Label::Pos],
        };
        assert!(tab.predict(at).is_err());
        assert_eq!(tab.predict(Site::member(0, &p)).unwrap(), Label::Pos);
    }

    #[test]
    fn classifier_json_shape() {
        let c = Classifier::Threshold {
            score: ScoreFn::linear(vec![1.0]),
            t: Ext::Finite(8.0),
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"type":"threshold","score":{"type":"linear","alpha":[1.0],"range":"real_line"},"t":8.0}"#
        );
        let back: Classifier<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
