#![allow(dead_code)]

use proptest::prelude::*;

use stratclass::costs::{CostModel, SeparableCost};
use stratclass::game::{Label, Population, ScoreFn};

/// Indexed population with small integer weights.
pub fn population(n: usize) -> impl Strategy<Value = Population<f64>> {
    (
        prop::collection::vec(1u8..=5, n),
        prop::collection::vec(any::<bool>(), n),
    )
        .prop_map(|(w, l)| {
            Population::indexed(
                w.into_iter().map(f64::from).collect(),
                l.into_iter().map(Label::from_bool).collect(),
            )
            .unwrap()
        })
}

/// Zero-diagonal matrix with entries in quarter steps up to 4, so exact 2s
/// occur.
pub fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0u8..=16, n), n).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.into_iter()
                    .enumerate()
                    .map(|(j, v)| if i == j { 0.0 } else { f64::from(v) / 4.0 })
                    .collect()
            })
            .collect()
    })
}

pub fn tabular_instance(max_n: usize) -> impl Strategy<Value = (Population<f64>, CostModel<f64>)> {
    (1..=max_n).prop_flat_map(|n| (population(n), matrix(n).prop_map(CostModel::tabular)))
}

/// Tabular separable part over `n` members with `c1(x) ≥ c2(x)`,
/// `range(c1) ⊆ range(c2)` and no cost of exactly 2. Values are multiples
/// of 1/1024, so float arithmetic on them is exact.
pub fn separable_part(n: usize) -> impl Strategy<Value = SeparableCost<f64>> {
    (
        prop::collection::vec(0u32..8192, n),
        prop::collection::vec(any::<prop::sample::Index>(), n),
    )
        .prop_map(move |(c2, picks)| {
            let c1: Vec<u32> = (0..n)
                .map(|i| {
                    let above: Vec<u32> = c2.iter().copied().filter(|v| *v >= c2[i]).collect();
                    *picks[i].get(&above)
                })
                .collect();
            (c1, c2)
        })
        .prop_filter("cost of exactly 2", |(c1, c2)| {
            !c1.iter()
                .any(|a| c2.iter().any(|b| i64::from(*b) - i64::from(*a) == 2048))
        })
        .prop_map(|(c1, c2)| {
            let f = |v: Vec<u32>| v.into_iter().map(|x| f64::from(x) / 1024.0).collect();
            SeparableCost::new(ScoreFn::tabular(f(c1)), ScoreFn::tabular(f(c2)))
        })
}

pub fn separable_instance(
    max_n: usize,
) -> impl Strategy<Value = (Population<f64>, SeparableCost<f64>)> {
    (1..=max_n).prop_flat_map(|n| (population(n), separable_part(n)))
}

pub fn single(part: &SeparableCost<f64>) -> CostModel<f64> {
    CostModel::separable(part.c1.clone(), part.c2.clone())
}
