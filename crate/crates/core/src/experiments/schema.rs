use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub cost_coefficient: f64,
}

/// Named features and the per-feature coefficient of the linear cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<Feature>,
}

const DEFAULT_FEATURES: [(&str, f64); 15] = [
    ("Number of tips on the place", -1.0),
    ("Place rating", -1.0),
    ("Number of emails", -1.0),
    ("Number of contact information", -1.0),
    ("Number of URLs", -1.0),
    ("Number of phone numbers", -1.0),
    ("Number of numeric characters", -1.0),
    ("SentiStrength score", 1.0),
    ("Combined-method", 1.0),
    ("Number of words", 0.1),
    ("Ratio of followers to followees", 1.0),
    ("Number of distinct 1-grams", 0.1),
    ("Number of tips posted by user", 0.1),
    ("Number of followers", 1.0),
    ("Number of capital letters", 0.1),
];

impl Default for FeatureSchema {
    /// The 15 spam-tip features.
    fn default() -> Self {
        FeatureSchema {
            features: DEFAULT_FEATURES
                .iter()
                .map(|&(name, c)| Feature {
                    name: name.to_string(),
                    cost_coefficient: c,
                })
                .collect(),
        }
    }
}

impl FeatureSchema {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        let s = FeatureSchema { features };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.features.iter().map(|f| f.cost_coefficient).collect()
    }

    /// Coefficient vector scaled to unit norm.
    pub fn alpha(&self) -> Vec<f64> {
        let c = self.coefficients();
        let n = norm(&c);
        c.into_iter().map(|v| v / n).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::invalid("schema has no features"));
        }
        if !self.features.iter().all(|f| f.cost_coefficient.is_finite()) {
            return Err(Error::invalid("non-finite cost coefficient"));
        }
        if self.features.iter().all(|f| f.cost_coefficient == 0.0) {
            return Err(Error::invalid("all cost coefficients are zero"));
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
