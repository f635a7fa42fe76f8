use serde::Serialize;

use crate::costs::{CostModel, SeparableCost};
use crate::error::{Error, Result};
use crate::game::{Classifier, Label, Sample};
use crate::scalar::{total_cmp, Ext, Scalar};

/// Output of [`train_separable`].
///
/// `threshold`, `effective_threshold` and `candidate_thresholds` are in the
/// cost's own units (scale applied); the published classifier thresholds
/// the unscaled `c2` at `threshold / scale`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct TrainedThreshold<S> {
    pub classifier: Classifier<S>,
    pub threshold: Ext<S>,
    pub effective_threshold: Ext<S>,
    pub empirical_err: S,
    /// `s_1, …, s_m` in sample order, then `∞`.
    pub candidate_thresholds: Vec<Ext<S>>,
}

/// Gaming-robust threshold learner for a separable cost.
///
/// Every candidate `s_i = max(c2(X) ∩ [t_i, t_i + 2])` (or `∞`) with
/// `t_i = c1(x_i)` is scored by the weighted error of `c1 ≥ s − 2`, and the
/// best one wins, larger thresholds first on ties. Runs in `O(m log m)`.
pub fn train_separable<S: Scalar>(
    samples: &[Sample<S>],
    c: &CostModel<S>,
) -> Result<TrainedThreshold<S>> {
    let part = single_part(c)?;
    train_threshold_with_margin(samples, &part, &c.scale, &S::two())
}

/// [`train_separable`] with the gaming allowance `margin` in place of 2.
/// A zero margin is plain threshold ERM on `c1` with candidates `c2(X)`.
pub fn train_threshold_with_margin<S: Scalar>(
    samples: &[Sample<S>],
    part: &SeparableCost<S>,
    scale: &S,
    margin: &S,
) -> Result<TrainedThreshold<S>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let scaled = part.scaled(scale);
    let range = scaled.c2.range();

    let mut t = Vec::with_capacity(samples.len());
    for s in samples {
        t.push(scaled.c1.eval(s.site())?);
    }
    let mut candidates: Vec<Ext<S>> = t
        .iter()
        .map(
            |ti| match range.max_in(ti, &(ti.clone() + margin.clone())) {
                Some(v) => Ext::Finite(v),
                None => Ext::Infinity,
            },
        )
        .collect();
    candidates.push(Ext::Infinity);

    let table = ErrorTable::new(samples, &t);
    let mut order: Vec<&Ext<S>> = candidates.iter().collect();
    order.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    order.dedup();

    let mut best: Option<(S, Ext<S>)> = None;
    for s in order {
        let err = table.error_at(&s.minus(margin));
        if best.as_ref().is_none_or(|(be, _)| err < *be) {
            best = Some((err, s.clone()));
        }
    }
    let (empirical_err, threshold) = best.expect("candidate set contains infinity");
    let classifier = match &threshold {
        Ext::Infinity => Classifier::Threshold {
            score: part.c2.clone(),
            t: Ext::Infinity,
        },
        Ext::Finite(v) => Classifier::Threshold {
            score: part.c2.clone(),
            t: Ext::Finite(v.clone() / scale.clone()),
        },
    };
    Ok(TrainedThreshold {
        classifier,
        effective_threshold: threshold.minus(margin),
        threshold,
        empirical_err,
        candidate_thresholds: candidates,
    })
}

/// Weighted error of `c1 ≥ θ` for any `θ`, from sorted scores and prefix sums.
struct ErrorTable<S> {
    sorted: Vec<S>,
    pos_prefix: Vec<S>,
    neg_prefix: Vec<S>,
    total: S,
}

impl<S: Scalar> ErrorTable<S> {
    fn new(samples: &[Sample<S>], t: &[S]) -> Self {
        let mut idx: Vec<usize> = (0..t.len()).collect();
        idx.sort_by(|&a, &b| total_cmp(&t[a], &t[b]).then(a.cmp(&b)));
        let mut pos_prefix = vec![S::zero()];
        let mut neg_prefix = vec![S::zero()];
        for &i in &idx {
            let (p, n) = match samples[i].label {
                Label::Pos => (samples[i].weight.clone(), S::zero()),
                Label::Neg => (S::zero(), samples[i].weight.clone()),
            };
            pos_prefix.push(pos_prefix.last().unwrap().clone() + p);
            neg_prefix.push(neg_prefix.last().unwrap().clone() + n);
        }
        let total = samples.iter().fold(S::zero(), |a, s| a + s.weight.clone());
        ErrorTable {
            sorted: idx.iter().map(|&i| t[i].clone()).collect(),
            pos_prefix,
            neg_prefix,
            total,
        }
    }

    fn error_at(&self, theta: &Ext<S>) -> S {
        let k = match theta {
            Ext::Finite(th) => self.sorted.partition_point(|v| v < th),
            Ext::Infinity => self.sorted.len(),
        };
        let n = self.sorted.len();
        let wrong =
            self.pos_prefix[k].clone() + (self.neg_prefix[n].clone() - self.neg_prefix[k].clone());
        wrong / self.total.clone()
    }
}

pub(crate) fn single_part<S: Scalar>(c: &CostModel<S>) -> Result<SeparableCost<S>> {
    match c.separable_parts() {
        Some(mut parts) if parts.len() == 1 => Ok(parts.remove(0)),
        _ => Err(Error::unsupported(
            "train_separable needs a linear or separable cost",
        )),
    }
}
