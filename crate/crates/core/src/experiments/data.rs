use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::schema::{norm, FeatureSchema};
use super::seeded;
use crate::error::{Error, Result};
use crate::game::{Label, Point, Population};

/// Class-mean direction blend used by [`generate_synthetic_population`]
/// when none is given.
pub const DEFAULT_ALIGNMENT: f64 = 0.5;

/// Two unit-covariance Gaussian classes, `n/2` negatives and the rest
/// positives, with class means `±separation/2 · u`.
///
/// `u` is the unit vector along `alignment·α + (1−alignment)·g`, where `α`
/// is the schema's unit cost direction and `g` a seed-drawn unit vector;
/// `alignment = 0` gives a purely random direction. Member order is shuffled.
pub fn generate_synthetic_population(
    schema: &FeatureSchema,
    n: usize,
    seed: u64,
    separation: f64,
    alignment: f64,
) -> Result<Population<f64>> {
    schema.validate()?;
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::invalid(format!(
            "class separation must be non-negative, got {separation}"
        )));
    }
    if !(0.0..=1.0).contains(&alignment) {
        return Err(Error::invalid(format!(
            "alignment must lie in [0,1], got {alignment}"
        )));
    }
    let dim = schema.dim();
    let mut rng = seeded(seed, 1);
    let u = class_direction(&schema.alpha(), alignment, &mut rng);

    let neg = n / 2;
    let mut labels: Vec<Label> = (0..n).map(|i| Label::from_bool(i >= neg)).collect();
    labels.shuffle(&mut rng);
    let half = separation / 2.0;
    let points = labels
        .iter()
        .map(|l| {
            let s = f64::from(l.sign()) * half;
            Point::new(
                u.iter()
                    .map(|ui| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        s * ui + z
                    })
                    .collect::<Vec<f64>>(),
            )
        })
        .collect::<Vec<_>>();
    debug_assert!(points.iter().all(|p| p.dim() == dim));
    Population::unweighted(points, labels)
}

fn class_direction(alpha: &[f64], alignment: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let g = random_unit(alpha.len(), rng);
        let u: Vec<f64> = alpha
            .iter()
            .zip(&g)
            .map(|(a, g)| alignment * a + (1.0 - alignment) * g)
            .collect();
        let n = norm(&u);
        if n > 1e-9 {
            return u.into_iter().map(|v| v / n).collect();
        }
    }
}

pub(crate) fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&g);
        if n > 1e-12 {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Per-feature affine map `x ↦ (x − mean)/std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Columns whose standard deviation was zero and was replaced by 1.
    pub clamped: Vec<bool>,
}

impl Normalization {
    pub fn apply(&self, pop: &Population<f64>) -> Result<Population<f64>> {
        if pop.dim() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: pop.dim(),
            });
        }
        let points = pop
            .points()
            .iter()
            .map(|p| {
                Point::new(
                    p.coords
                        .iter()
                        .zip(self.means.iter().zip(&self.stds))
                        .map(|(x, (m, s))| (x - m) / s)
                        .collect(),
                )
            })
            .collect();
        Population::new(points, pop.weights().to_vec(), pop.labels().to_vec())
    }
}

/// Fits zero mean and unit (population) standard deviation per feature,
/// unweighted, and applies it. Constant columns keep std 1 and are flagged.
pub fn normalize_features(pop: &Population<f64>) -> Result<(Population<f64>, Normalization)> {
    let n = pop.len() as f64;
    let dim = pop.dim();
    let mut means = vec![0.0; dim];
    for p in pop.points() {
        for (m, x) in means.iter_mut().zip(&p.coords) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut vars = vec![0.0; dim];
    for p in pop.points() {
        for ((v, x), m) in vars.iter_mut().zip(&p.coords).zip(&means) {
            *v += (x - m) * (x - m);
        }
    }
    let mut clamped = vec![false; dim];
    let stds = vars
        .iter()
        .zip(clamped.iter_mut())
        .map(|(v, c)| {
            let s = (v / n).sqrt();
            if s > 0.0 {
                s
            } else {
                log::warn!("constant feature column; std clamped to 1");
                *c = true;
                1.0
            }
        })
        .collect();
    let norm = Normalization {
        means,
        stds,
        clamped,
    };
    Ok((norm.apply(pop)?, norm))
}

/// Seeded shuffle, then the first `n_train` members train and the rest test.
pub fn train_test_split(
    pop: &Population<f64>,
    n_train: usize,
    seed: u64,
) -> Result<(Population<f64>, Population<f64>)> {
    if n_train == 0 || n_train >= pop.len() {
        return Err(Error::invalid(format!(
            "cannot split {} points with {n_train} for training",
            pop.len()
        )));
    }
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.shuffle(&mut seeded(seed, 2));
    Ok((
        pop.select(&order[..n_train])?,
        pop.select(&order[n_train..])?,
    ))
}
