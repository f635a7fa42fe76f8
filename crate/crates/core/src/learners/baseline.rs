use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Classifier, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub reg: f64,
    pub epochs: usize,
    /// `c` in the step size `c/√t`.
    pub step: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            reg: 1e-2,
            epochs: 50,
            step: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub params: SvmParams,
    /// Set when the sample had a single class and a constant was returned.
    pub single_class: bool,
}

impl BaselineModel {
    pub fn classifier(&self) -> Classifier<f64> {
        Classifier::Linear {
            w: self.w.clone(),
            b: self.b,
        }
    }
}

/// Linear max-margin baseline: `reg/2·‖w‖² + mean weighted hinge`, by
/// stochastic subgradient steps of size `c/√t` over seeded shuffles. The
/// bias is not regularized. Returns the average of the last epoch's iterates.
pub fn train_baseline_linear(samples: &[Sample<f64>], params: SvmParams) -> Result<BaselineModel> {
    let m = samples.len();
    if m == 0 {
        return Err(Error::EmptySample);
    }
    if !(params.reg > 0.0 && params.step > 0.0 && params.epochs > 0) {
        return Err(Error::invalid("reg, step and epochs must be positive"));
    }
    let dim = samples[0].point.dim();
    if let Some(s) = samples.iter().find(|s| s.point.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: s.point.dim(),
        });
    }
    let first = samples[0].label;
    if samples.iter().all(|s| s.label == first) {
        log::warn!("baseline trained on a single-class sample; returning a constant classifier");
        return Ok(BaselineModel {
            w: vec![0.0; dim],
            b: f64::from(first.sign()),
            params,
            single_class: true,
        });
    }

    let mean_w = samples.iter().map(|s| s.weight).sum::<f64>() / m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut avg_w = vec![0.0; dim];
    let mut avg_b = 0.0;
    let mut step_no = 0u64;
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let last = epoch + 1 == params.epochs;
        for &i in &order {
            step_no += 1;
            let eta = params.step / (step_no as f64).sqrt();
            let s = &samples[i];
            let y = f64::from(s.label.sign());
            let margin = y * (dot(&w, &s.point.coords) + b);
            let scale = 1.0 - eta * params.reg;
            for wj in w.iter_mut() {
                *wj *= scale;
            }
            if margin < 1.0 {
                let g = eta * y * s.weight / mean_w;
                for (wj, xj) in w.iter_mut().zip(&s.point.coords) {
                    *wj += g * xj;
                }
                b += g;
            }
            if last {
                for (a, wj) in avg_w.iter_mut().zip(&w) {
                    *a += wj;
                }
                avg_b += b;
            }
        }
    }
    let n = m as f64;
    Ok(BaselineModel {
        w: avg_w.into_iter().map(|v| v / n).collect(),
        b: avg_b / n,
        params,
        single_class: false,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unweighted fraction of samples `f` labels correctly, no gaming.
pub fn plain_accuracy(f: &Classifier<f64>, samples: &[Sample<f64>]) -> Result<f64> {
    let mut hit = 0usize;
    for s in samples {
        if f.predict(s.site())? == s.label {
            hit += 1;
        }
    }
    Ok(hit as f64 / samples.len() as f64)
}
