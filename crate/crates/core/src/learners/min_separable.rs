use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::costs::{CostModel, SeparableCost};
use crate::error::{Error, Result};
use crate::game::{Classifier, Label, Sample, ScoreRange, ThresholdPart};
use crate::scalar::{total_cmp, Ext, Scalar};

pub const DEFAULT_GRID_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Largest `(m+1)^k` accepted.
    pub budget: f64,
    /// Worker threads for the grid scan; `0` or `1` scans inline.
    pub workers: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            budget: DEFAULT_GRID_BUDGET,
            workers: 1,
        }
    }
}

/// Output of [`train_min_separable`]. Threshold vectors are in the cost's
/// own units (scale applied).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct TrainedConjunction<S> {
    pub classifier: Classifier<S>,
    /// The winning grid point `s⃗`.
    pub threshold_vector: Vec<Ext<S>>,
    /// Thresholds actually placed on each `b2`.
    pub published: Vec<Ext<S>>,
    /// `min{b2(y) : f(y) = 1}` per part, the values gaming is measured from.
    pub realized_minima: Vec<Ext<S>>,
    pub empirical_err: S,
    pub grid_size: u128,
}

/// Weighted fraction of samples whose label disagrees with the effective
/// label: accepted iff some part has `b1(x) ≥ s_b − 2`. Parts with
/// `s_b = ∞` accept nobody.
pub fn empirical_effective_err<S: Scalar>(
    thresholds: &[Ext<S>],
    samples: &[Sample<S>],
    parts: &[SeparableCost<S>],
) -> Result<S> {
    if thresholds.len() != parts.len() {
        return Err(Error::DimensionMismatch {
            expected: parts.len(),
            got: thresholds.len(),
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let t = part_scores(samples, parts)?;
    let w = Weights::new(samples);
    Ok(w.error(&t, thresholds, &S::two()))
}

/// Gaming-robust conjunction learner for a minimum of `k` separable costs.
///
/// Scans every `s⃗` in the product of per-part candidates
/// `{max(b2(X) ∩ [t_{i,b}, t_{i,b}+2])} ∪ {∞}`. Each grid point is turned
/// into a publishable conjunction and scored by the effective error of that
/// conjunction's realized minima. Ties go to the lexicographically largest
/// `s⃗`.
///
/// When `k ≥ 2`, a finite-range part's threshold is lowered to the least
/// range value that still excludes the points `s_b` excludes, and a part
/// at `∞` is parked above every sample's score; grid points whose `∞`
/// cannot be parked are skipped. When every `b2` is tabular over the same
/// domain the realized minima are computed exactly; otherwise each part is
/// assumed to reach its own threshold.
pub fn train_min_separable<S: Scalar>(
    samples: &[Sample<S>],
    c: &CostModel<S>,
) -> Result<TrainedConjunction<S>> {
    train_min_separable_with(samples, c, GridOptions::default())
}

pub fn train_min_separable_with<S: Scalar>(
    samples: &[Sample<S>],
    c: &CostModel<S>,
    opts: GridOptions,
) -> Result<TrainedConjunction<S>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let raw_parts = c.separable_parts().ok_or_else(|| {
        Error::unsupported("train_min_separable needs a min-separable, separable or linear cost")
    })?;
    if raw_parts.is_empty() {
        return Err(Error::invalid("cost has no separable parts"));
    }
    let k = raw_parts.len();
    let m = samples.len();
    let grid_size = (m as u128 + 1).checked_pow(k as u32).unwrap_or(u128::MAX);
    if grid_size as f64 > opts.budget {
        return Err(Error::BudgetExceeded {
            required: grid_size as f64,
            budget: opts.budget,
        });
    }

    let parts: Vec<SeparableCost<S>> = raw_parts.iter().map(|p| p.scaled(&c.scale)).collect();
    let t = part_scores(samples, &parts)?;
    let two = S::two();
    let ranges: Vec<ScoreRange<S>> = parts.iter().map(|p| p.c2.range()).collect();
    let axes: Vec<Vec<Ext<S>>> = (0..k)
        .map(|b| {
            let mut vals: Vec<Ext<S>> = t[b]
                .iter()
                .map(
                    |ti| match ranges[b].max_in(ti, &(ti.clone() + two.clone())) {
                        Some(v) => Ext::Finite(v),
                        None => Ext::Infinity,
                    },
                )
                .collect();
            vals.push(Ext::Infinity);
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            vals.dedup();
            vals
        })
        .collect();

    let ctx = Context {
        t: &t,
        ranges: &ranges,
        tabular: tabular_domain(&parts),
        weights: Weights::new(samples),
        two,
    };
    let total: usize = axes.iter().map(Vec::len).product();
    let scan = |range: std::ops::Range<usize>| -> Option<Scored<S>> {
        let mut best: Option<Scored<S>> = None;
        for flat in range {
            let svec = decode(flat, &axes);
            if let Some(s) = ctx.score(svec) {
                best = Some(match best {
                    Some(b) if !s.beats(&b) => b,
                    _ => s,
                });
            }
        }
        best
    };
    let best = if opts.workers <= 1 {
        scan(0..total)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let chunk = total.div_ceil(opts.workers * 4).max(1);
        let starts: Vec<usize> = (0..total).step_by(chunk).collect();
        pool.install(|| {
            starts
                .par_iter()
                .map(|&s| scan(s..(s + chunk).min(total)))
                .reduce(
                    || None,
                    |a, b| match (a, b) {
                        (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
                        (a, None) => a,
                        (None, b) => b,
                    },
                )
        })
    };
    // the all-∞ vector always realizes, so something was scored
    let best = best.expect("grid contains the reject-all vector");

    let classifier = Classifier::Conjunction {
        parts: raw_parts
            .iter()
            .zip(&best.published)
            .map(|(p, v)| ThresholdPart {
                score: p.c2.clone(),
                t: match v {
                    Ext::Finite(v) => Ext::Finite(v.clone() / c.scale.clone()),
                    Ext::Infinity => Ext::Infinity,
                },
            })
            .collect(),
    };
    Ok(TrainedConjunction {
        classifier,
        threshold_vector: best.svec,
        published: best.published,
        realized_minima: best.minima,
        empirical_err: best.err,
        grid_size,
    })
}

struct Scored<S> {
    svec: Vec<Ext<S>>,
    published: Vec<Ext<S>>,
    minima: Vec<Ext<S>>,
    err: S,
}

impl<S: Scalar> Scored<S> {
    /// Lower error, then lexicographically larger grid point.
    fn beats(&self, other: &Scored<S>) -> bool {
        match total_cmp(&self.err, &other.err) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => lex_cmp(&self.svec, &other.svec) == Ordering::Greater,
        }
    }
}

fn lex_cmp<S: Scalar>(a: &[Ext<S>], b: &[Ext<S>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn decode<S: Scalar>(mut flat: usize, axes: &[Vec<Ext<S>>]) -> Vec<Ext<S>> {
    let mut out = vec![Ext::Infinity; axes.len()];
    for b in (0..axes.len()).rev() {
        let n = axes[b].len();
        out[b] = axes[b][flat % n].clone();
        flat /= n;
    }
    out
}

struct Context<'a, S> {
    t: &'a [Vec<S>],
    ranges: &'a [ScoreRange<S>],
    /// `b2` values over a shared finite domain, when every part is tabular.
    tabular: Option<Vec<Vec<S>>>,
    weights: Weights<S>,
    two: S,
}

impl<S: Scalar> Context<'_, S> {
    fn score(&self, svec: Vec<Ext<S>>) -> Option<Scored<S>> {
        let published = self.realize(&svec)?;
        let minima = self.minima(&published);
        let err = self.weights.error(self.t, &minima, &self.two);
        Some(Scored {
            svec,
            published,
            minima,
            err,
        })
    }

    fn realize(&self, svec: &[Ext<S>]) -> Option<Vec<Ext<S>>> {
        let k = svec.len();
        if k == 1 || svec.iter().all(Ext::is_infinite) {
            return Some(svec.to_vec());
        }
        let mut out = Vec::with_capacity(k);
        for b in 0..k {
            let t = &self.t[b];
            let v = match (&self.ranges[b], &svec[b]) {
                (ScoreRange::Finite(_), Ext::Finite(s)) => {
                    let cut = s.clone() - self.two.clone();
                    let excluded = t.iter().filter(|v| **v < cut).cloned().reduce(max_of);
                    match excluded {
                        Some(e) => self.ranges[b].min_above(&(e + self.two.clone())),
                        None => self.ranges[b].min(),
                    }
                    .expect("s itself is a qualifying range value")
                }
                (ScoreRange::Finite(_), Ext::Infinity) => {
                    let top = t.iter().cloned().reduce(max_of).expect("nonempty sample");
                    self.ranges[b].min_above(&(top + self.two.clone()))?
                }
                (ScoreRange::RealLine, Ext::Finite(s)) => s.clone(),
                (ScoreRange::RealLine, Ext::Infinity) => {
                    let top = t.iter().cloned().reduce(max_of).expect("nonempty sample");
                    top + self.two.clone() + S::one()
                }
            };
            out.push(Ext::Finite(v));
        }
        Some(out)
    }

    fn minima(&self, published: &[Ext<S>]) -> Vec<Ext<S>> {
        let Some(values) = &self.tabular else {
            return published.to_vec();
        };
        let k = published.len();
        let n = values[0].len();
        let mut mins: Vec<Option<S>> = vec![None; k];
        for y in 0..n {
            let accepted = (0..k).all(|b| published[b].admits(&values[b][y]));
            if !accepted {
                continue;
            }
            for b in 0..k {
                let v = &values[b][y];
                if mins[b].as_ref().is_none_or(|m| v < m) {
                    mins[b] = Some(v.clone());
                }
            }
        }
        mins.into_iter()
            .map(|m| m.map_or(Ext::Infinity, Ext::Finite))
            .collect()
    }
}

fn tabular_domain<S: Scalar>(parts: &[SeparableCost<S>]) -> Option<Vec<Vec<S>>> {
    let values: Vec<Vec<S>> = parts
        .iter()
        .map(|p| p.c2.tabular_values().map(<[S]>::to_vec))
        .collect::<Option<_>>()?;
    let n = values[0].len();
    (n > 0 && values.iter().all(|v| v.len() == n)).then_some(values)
}

fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

fn part_scores<S: Scalar>(
    samples: &[Sample<S>],
    parts: &[SeparableCost<S>],
) -> Result<Vec<Vec<S>>> {
    parts
        .iter()
        .map(|p| {
            samples
                .iter()
                .map(|s| p.c1.eval(s.site()))
                .collect::<Result<Vec<S>>>()
        })
        .collect()
}

struct Weights<S> {
    w: Vec<S>,
    pos: Vec<bool>,
    total: S,
}

impl<S: Scalar> Weights<S> {
    fn new(samples: &[Sample<S>]) -> Self {
        Weights {
            w: samples.iter().map(|s| s.weight.clone()).collect(),
            pos: samples.iter().map(|s| s.label == Label::Pos).collect(),
            total: samples.iter().fold(S::zero(), |a, s| a + s.weight.clone()),
        }
    }

    /// Sample-order weighted error of the union-of-parts acceptance rule.
    fn error(&self, t: &[Vec<S>], thresholds: &[Ext<S>], margin: &S) -> S {
        let cuts: Vec<Ext<S>> = thresholds.iter().map(|s| s.minus(margin)).collect();
        let mut wrong = S::zero();
        for j in 0..self.w.len() {
            let accepted = cuts.iter().zip(t).any(|(cut, tb)| cut.admits(&tb[j]));
            if accepted != self.pos[j] {
                wrong = wrong + self.w[j].clone();
            }
        }
        wrong / self.total.clone()
    }
}
