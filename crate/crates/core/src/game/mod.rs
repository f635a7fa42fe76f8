//! The Jury/Contestant game: best response, effective labels and payoffs.
//!
//! Contestant moves from `x` to `y` only when the published classifier
//! rejects `x`, accepts `y`, and `c(x,y) < 2`; exact ties stay put.

mod classifier;
mod population;

pub use classifier::{Classifier, ScoreFn, ScoreRange, ThresholdPart};
pub use population::{Label, Point, Population, Sample, Site};

use crate::costs::{make_feasible, min_cost_to_acceptance, CostKind, CostModel};
use crate::error::{Error, Result};
use crate::scalar::{dot, Ext, Scalar};

/// Where Contestant may move.
#[derive(Debug)]
pub enum CandidateSet<'a, S> {
    /// The finite point set of a population (required for tabular models).
    Population(&'a Population<S>),
    /// The whole feature space, via the closed-form acceptance-cost solver.
    Analytic,
}

impl<S> Clone for CandidateSet<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for CandidateSet<'_, S> {}

/// How aggregate functions pick a candidate set for a population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Search {
    /// Analytic when the (classifier, cost) pair supports it, else the
    /// population's own points.
    #[default]
    Auto,
    Population,
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target<S> {
    Member(usize),
    Point(Point<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseOutcome<S> {
    pub target: Target<S>,
    pub cost: S,
    pub moved: bool,
    /// `f` at the target.
    pub label: Label,
}

impl<S: Scalar> BestResponseOutcome<S> {
    fn stay(x: Site<'_, S>, label: Label) -> Self {
        let target = match x.index {
            Some(i) => Target::Member(i),
            None => Target::Point(x.point.clone()),
        };
        BestResponseOutcome {
            target,
            cost: S::zero(),
            moved: false,
            label,
        }
    }
}

/// Contestant's best move from `x`.
///
/// Among accepted candidates the cheapest wins, then the lowest index.
/// A move happens only if it is strictly better than staying.
pub fn best_response<S: Scalar>(
    x: Site<'_, S>,
    f: &Classifier<S>,
    c: &CostModel<S>,
    candidates: CandidateSet<'_, S>,
) -> Result<BestResponseOutcome<S>> {
    let here = f.predict(x)?;
    if here.is_pos() {
        return Ok(BestResponseOutcome::stay(x, here));
    }
    match candidates {
        CandidateSet::Population(pop) => {
            if pop.dim() != x.point.dim() {
                return Err(Error::DimensionMismatch {
                    expected: pop.dim(),
                    got: x.point.dim(),
                });
            }
            let accepted = accepted_members(f, pop)?;
            respond_within(x, c, pop, &accepted)
        }
        CandidateSet::Analytic => respond_analytic(x, f, c),
    }
}

/// `f(Δ(x))`.
pub fn effective_label<S: Scalar>(
    f: &Classifier<S>,
    c: &CostModel<S>,
    x: Site<'_, S>,
    candidates: CandidateSet<'_, S>,
) -> Result<Label> {
    Ok(best_response(x, f, c, candidates)?.label)
}

/// Best responses of every population member.
pub fn best_responses<S: Scalar>(
    f: &Classifier<S>,
    c: &CostModel<S>,
    pop: &Population<S>,
    search: Search,
) -> Result<Vec<BestResponseOutcome<S>>> {
    let analytic = match search {
        Search::Auto => supports_analytic(f, c),
        Search::Population => false,
        Search::Analytic => true,
    };
    let own = accepted_members(f, pop)?;
    (0..pop.len())
        .map(|i| {
            let x = pop.site(i);
            if own[i] {
                Ok(BestResponseOutcome::stay(x, Label::Pos))
            } else if analytic {
                respond_analytic(x, f, c)
            } else {
                respond_within(x, c, pop, &own)
            }
        })
        .collect()
}

pub fn effective_labels<S: Scalar>(
    f: &Classifier<S>,
    c: &CostModel<S>,
    pop: &Population<S>,
    search: Search,
) -> Result<Vec<Label>> {
    Ok(best_responses(f, c, pop, search)?
        .into_iter()
        .map(|o| o.label)
        .collect())
}

/// `Pr[h(x) = f(Δ(x))]` under the population's weights.
pub fn jury_payoff<S: Scalar>(
    f: &Classifier<S>,
    c: &CostModel<S>,
    pop: &Population<S>,
    search: Search,
) -> Result<S> {
    let eff = effective_labels(f, c, pop, search)?;
    let labels = pop.labels();
    Ok(pop.weighted_fraction(|i| eff[i] == labels[i]))
}

/// `E[f(Δ(x)) − c(x, Δ(x))]`.
pub fn contestant_payoff<S: Scalar>(
    f: &Classifier<S>,
    c: &CostModel<S>,
    pop: &Population<S>,
    search: Search,
) -> Result<S> {
    let outcomes = best_responses(f, c, pop, search)?;
    let mut acc = S::zero();
    for (o, w) in outcomes.iter().zip(pop.weights()) {
        acc = acc + w.clone() * (o.label.value::<S>() - o.cost.clone());
    }
    Ok(acc / pop.total_weight())
}

/// Whether [`CandidateSet::Analytic`] can handle this pair: constant
/// classifiers with any cost, halfspaces against linear or mixed costs, and
/// linear thresholds against separable costs whose `c2` is a positive
/// multiple of the threshold score.
pub fn supports_analytic<S: Scalar>(f: &Classifier<S>, c: &CostModel<S>) -> bool {
    if f.constant_label().is_some() {
        return true;
    }
    match &c.kind {
        CostKind::Linear { .. } | CostKind::MixedTrue { .. } => f.as_halfspace().is_some(),
        CostKind::Separable(_) => separable_threshold(f, c).is_some(),
        _ => false,
    }
}

fn accepted_members<S: Scalar>(f: &Classifier<S>, pop: &Population<S>) -> Result<Vec<bool>> {
    (0..pop.len())
        .map(|i| Ok(f.predict(pop.site(i))?.is_pos()))
        .collect()
}

fn respond_within<S: Scalar>(
    x: Site<'_, S>,
    c: &CostModel<S>,
    pop: &Population<S>,
    accepted: &[bool],
) -> Result<BestResponseOutcome<S>> {
    let two = S::two();
    let mut best: Option<(usize, S)> = None;
    for (j, _) in accepted.iter().enumerate().filter(|(_, a)| **a) {
        let y = pop.site(j);
        if x.same_as(&y) {
            continue;
        }
        let cost = c.eval(x, y)?;
        if cost < two && best.as_ref().is_none_or(|(_, bc)| cost < *bc) {
            best = Some((j, cost));
        }
    }
    Ok(match best {
        Some((j, cost)) => BestResponseOutcome {
            target: Target::Member(j),
            cost,
            moved: true,
            label: Label::Pos,
        },
        None => BestResponseOutcome::stay(x, Label::Neg),
    })
}

fn respond_analytic<S: Scalar>(
    x: Site<'_, S>,
    f: &Classifier<S>,
    c: &CostModel<S>,
) -> Result<BestResponseOutcome<S>> {
    if let Some(label) = f.constant_label() {
        return Ok(BestResponseOutcome::stay(x, label));
    }
    let (cost, point) = match &c.kind {
        CostKind::Linear { .. } | CostKind::MixedTrue { .. } => {
            let (w, b) = f.as_halfspace().ok_or_else(|| {
                Error::unsupported("analytic best response needs a halfspace classifier")
            })?;
            let r = min_cost_to_acceptance(x.point, &w, &b, c)?;
            (r.cost, r.point)
        }
        CostKind::Separable(_) => {
            let (a2, lambda, t) = separable_threshold(f, c).ok_or_else(|| {
                Error::unsupported("analytic best response needs a threshold on a linear c2")
            })?;
            // reach c2(y) = λt along a2, then settle rounding on the f side
            let target = lambda * t.clone();
            let aa = dot(&a2, &a2);
            let step = (target - dot(&a2, &x.point.coords)) / aa.clone();
            let d: Vec<S> = a2.iter().map(|a| a.clone() * step.clone()).collect();
            let (w, _) = f.as_halfspace().expect("linear threshold");
            let ww = dot(&w, &w);
            let d = make_feasible(x.point, &w, &-t, &ww, d).ok_or_else(|| {
                Error::invalid("could not place a point on the acceptance boundary")
            })?;
            let y = Point::new(
                x.point
                    .coords
                    .iter()
                    .zip(&d)
                    .map(|(a, b)| a.clone() + b.clone())
                    .collect(),
            );
            (c.eval(x, Site::free(&y))?, y)
        }
        _ => {
            return Err(Error::unsupported(
                "no analytic best response for this cost family",
            ))
        }
    };
    Ok(if cost < S::two() {
        BestResponseOutcome {
            target: Target::Point(point),
            cost,
            moved: true,
            label: Label::Pos,
        }
    } else {
        BestResponseOutcome::stay(x, Label::Neg)
    })
}

/// For a linear threshold `⟨s,y⟩ ≥ t` against a separable cost with linear
/// `c1, c2` and `c2 = λ·s`, `λ > 0`: returns `(c2's α, λ, t)`.
fn separable_threshold<S: Scalar>(f: &Classifier<S>, c: &CostModel<S>) -> Option<(Vec<S>, S, S)> {
    let (
        CostKind::Separable(sep),
        Classifier::Threshold {
            score,
            t: Ext::Finite(t),
        },
    ) = (&c.kind, f)
    else {
        return None;
    };
    let (s, a2) = (score.as_linear()?, sep.c2.as_linear()?);
    sep.c1.as_linear()?;
    if s.len() != a2.len() {
        return None;
    }
    let ss = dot(s, s);
    if ss.is_zero() {
        return None;
    }
    let lambda = dot(s, a2) / ss;
    if lambda <= S::zero()
        || s.iter()
            .zip(a2)
            .any(|(si, ai)| lambda.clone() * si.clone() != *ai)
    {
        return None;
    }
    Some((a2.to_vec(), lambda, t.clone()))
}
