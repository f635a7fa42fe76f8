use serde::Serialize;

use super::CostModel;
use crate::error::{Error, Result};
use crate::scalar::{min_of, Scalar};

const MAX_REPORTED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCheckReport {
    pub is_metric: bool,
    /// `(i, j, k)` with `c(i,k) > c(i,j) + c(j,k)`; at most 100 listed.
    pub violations: Vec<(usize, usize, usize)>,
    pub violation_count: usize,
    pub symmetry_ok: bool,
    pub diagonal_ok: bool,
    pub nonnegative_ok: bool,
}

/// Full O(n³) metric check. Pseudometrics (zero distance between distinct
/// points) pass.
pub fn validate_metric<S: Scalar>(matrix: &[Vec<S>]) -> Result<MetricCheckReport> {
    let n = matrix.len();
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    let mut symmetry_ok = true;
    let mut diagonal_ok = true;
    let mut nonnegative_ok = true;
    for i in 0..n {
        diagonal_ok &= matrix[i][i].is_zero();
        for j in 0..n {
            nonnegative_ok &= matrix[i][j] >= S::zero();
            symmetry_ok &= matrix[i][j] == matrix[j][i];
        }
    }
    let mut violations = Vec::new();
    let mut violation_count = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if matrix[i][k] > matrix[i][j].clone() + matrix[j][k].clone() {
                    violation_count += 1;
                    if violations.len() < MAX_REPORTED_VIOLATIONS {
                        violations.push((i, j, k));
                    }
                }
            }
        }
    }
    Ok(MetricCheckReport {
        is_metric: violation_count == 0 && symmetry_ok && diagonal_ok && nonnegative_ok,
        violations,
        violation_count,
        symmetry_ok,
        diagonal_ok,
        nonnegative_ok,
    })
}

/// `max_x min_{s∈S} c(x, s)`: the smallest ε for which `net` is an ε-net.
pub fn covering_radius<S: Scalar>(matrix: &[Vec<S>], net: &[usize]) -> Result<S> {
    if net.is_empty() {
        return Err(Error::invalid("net is empty"));
    }
    let n = matrix.len();
    if let Some(&s) = net.iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange { index: s, len: n });
    }
    let mut radius = S::zero();
    for row in matrix {
        let d = net
            .iter()
            .map(|&s| row[s].clone())
            .reduce(min_of)
            .expect("net nonempty");
        if d > radius {
            radius = d;
        }
    }
    Ok(radius)
}

/// Greedy farthest-point traversal from point 0 until every point is
/// within `epsilon` of the net.
pub fn greedy_net<S: Scalar>(matrix: &[Vec<S>], epsilon: &S) -> Result<Vec<usize>> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let mut net = vec![0];
    let mut dist: Vec<S> = matrix.iter().map(|row| row[0].clone()).collect();
    loop {
        let (far, d) = dist
            .iter()
            .enumerate()
            .fold((0, S::zero()), |(bi, bd), (i, d)| {
                if *d > bd {
                    (i, d.clone())
                } else {
                    (bi, bd)
                }
            });
        if d <= *epsilon {
            return Ok(net);
        }
        net.push(far);
        for (i, row) in matrix.iter().enumerate() {
            dist[i] = min_of(dist[i].clone(), row[far].clone());
        }
    }
}

/// `c̃(x,y) = min_{w,z∈S} c(x,w) + c(w,z) + c(z,y)`, which satisfies
/// `c ≤ c̃ ≤ c + 4ε` for an ε-net `S`. The diagonal is reset to zero so
/// the result is a valid tabular cost.
pub fn metric_net_approximate<S: Scalar>(c: &CostModel<S>, net: &[usize]) -> Result<CostModel<S>> {
    let matrix = c
        .tabular_matrix()
        .ok_or_else(|| Error::unsupported("metric_net_approximate expects a tabular cost"))?;
    if net.is_empty() {
        return Err(Error::invalid("net is empty"));
    }
    let report = validate_metric(matrix)?;
    if !report.is_metric {
        return Err(Error::NotMetric(format!(
            "{} triangle violations, symmetric: {}, zero diagonal: {}",
            report.violation_count, report.symmetry_ok, report.diagonal_ok
        )));
    }
    let n = matrix.len();
    if let Some(&s) = net.iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange { index: s, len: n });
    }

    // inner[w][y] = min_z c(w,z) + c(z,y), restricted to w, z in the net
    let inner: Vec<Vec<S>> = net
        .iter()
        .map(|&w| {
            (0..n)
                .map(|y| {
                    net.iter()
                        .map(|&z| matrix[w][z].clone() + matrix[z][y].clone())
                        .reduce(min_of)
                        .expect("net nonempty")
                })
                .collect()
        })
        .collect();
    let approx = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if x == y {
                        return S::zero();
                    }
                    net.iter()
                        .enumerate()
                        .map(|(wi, &w)| matrix[x][w].clone() + inner[wi][y].clone())
                        .reduce(min_of)
                        .expect("net nonempty")
                })
                .collect()
        })
        .collect();
    Ok(CostModel::tabular(approx).with_scale(c.scale.clone()))
}
