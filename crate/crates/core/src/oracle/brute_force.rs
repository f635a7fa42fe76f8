use rayon::prelude::*;
use serde::Serialize;

use crate::costs::CostModel;
use crate::error::{Error, Result};
use crate::game::{jury_payoff, Classifier, Label, Population, Search};
use crate::scalar::{total_cmp, Ext, Scalar};

pub const DEFAULT_MAX_POINTS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest population enumerated exhaustively.
    pub max_points: usize,
    pub workers: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_points: DEFAULT_MAX_POINTS,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct OptimumReport<S> {
    pub opt_payoff: S,
    /// Weight of correctly classified members under the optimum.
    pub opt_weight: S,
    pub opt_labeling: Classifier<S>,
    pub evaluations: u64,
    pub mode: Mode,
}

/// Strategic maximum over all `2^|X|` labelings of the population.
///
/// Member `i` ends up accepted iff some accepted `j` has `c(i,j) < 2`
/// (`j = i` included). Among maximizers the lexicographically smallest
/// labeling wins, reading members in index order with `−1 < +1`.
pub fn brute_force_optimum<S: Scalar>(
    pop: &Population<S>,
    c: &CostModel<S>,
) -> Result<OptimumReport<S>> {
    brute_force_optimum_with(pop, c, OracleOptions::default())
}

pub fn brute_force_optimum_with<S: Scalar>(
    pop: &Population<S>,
    c: &CostModel<S>,
    opts: OracleOptions,
) -> Result<OptimumReport<S>> {
    let n = pop.len();
    if n > opts.max_points.min(40) {
        return Err(Error::BudgetExceeded {
            required: 2f64.powi(n as i32),
            budget: 2f64.powi(opts.max_points as i32),
        });
    }
    // member i is bit n-1-i, so numeric order on masks is lexicographic order
    let bit = |i: usize| 1u64 << (n - 1 - i);
    let two = S::two();
    let mut reach = vec![0u64; n];
    for (i, r) in reach.iter_mut().enumerate() {
        *r |= bit(i);
        for j in 0..n {
            if j != i && c.eval(pop.site(i), pop.site(j))? < two {
                *r |= bit(j);
            }
        }
    }
    let correct = |mask: u64| -> S {
        let labels = pop.labels();
        pop.weighted_count(|i| ((mask & reach[i]) != 0) == labels[i].is_pos())
    };
    let total: u64 = 1u64 << n;
    let scan = |lo: u64, hi: u64| -> (S, u64) {
        let mut best = (correct(lo), lo);
        for mask in lo + 1..hi {
            let v = correct(mask);
            if v > best.0 {
                best = (v, mask);
            }
        }
        best
    };
    let (opt_weight, mask) = if opts.workers <= 1 || total < 1024 {
        scan(0, total)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let chunk = (total / (opts.workers as u64 * 8)).max(1);
        let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
        pool.install(|| {
            starts
                .par_iter()
                .map(|&s| scan(s, (s + chunk).min(total)))
                .reduce_with(|a, b| match total_cmp(&b.0, &a.0) {
                    std::cmp::Ordering::Greater => b,
                    std::cmp::Ordering::Less => a,
                    std::cmp::Ordering::Equal => {
                        if b.1 < a.1 {
                            b
                        } else {
                            a
                        }
                    }
                })
                .expect("at least one chunk")
        })
    };
    let labels: Vec<Label> = (0..n)
        .map(|i| Label::from_bool(mask & bit(i) != 0))
        .collect();
    let opt_payoff = opt_weight.clone() / pop.total_weight();
    Ok(OptimumReport {
        opt_payoff,
        opt_weight,
        opt_labeling: Classifier::Tabular { labels },
        evaluations: total,
        mode: Mode::Full,
    })
}

/// Best game payoff among thresholds on `c2` at `c2(X) ∪ {∞}`, found by
/// simulating each one over the population's own points.
pub fn separable_threshold_optimum<S: Scalar>(
    pop: &Population<S>,
    c: &CostModel<S>,
) -> Result<(S, Classifier<S>)> {
    let part = crate::learners::single_part_of(c)?;
    let mut values = Vec::with_capacity(pop.len());
    for i in 0..pop.len() {
        values.push(part.c2.eval(pop.site(i))?);
    }
    values.sort_by(total_cmp);
    values.dedup();
    let mut best: Option<(S, Classifier<S>)> = None;
    let candidates = values.into_iter().map(Ext::Finite).chain([Ext::Infinity]);
    for t in candidates {
        let f = Classifier::Threshold {
            score: part.c2.clone(),
            t,
        };
        let v = jury_payoff(&f, c, pop, Search::Population)?;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, f));
        }
    }
    Ok(best.expect("infinity is always a candidate"))
}
