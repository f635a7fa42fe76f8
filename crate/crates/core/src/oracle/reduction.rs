use std::collections::BTreeSet;

use serde::Serialize;

use super::brute_force::{brute_force_optimum_with, Mode, OracleOptions};
use crate::costs::CostModel;
use crate::error::{Error, Result};
use crate::game::{jury_payoff, Classifier, Label, Population, Search};
use crate::scalar::Scalar;

/// 3-CNF formula. Literals are signed 1-based variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i64; 3]>) -> Result<Self> {
        for clause in &clauses {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::invalid(format!(
                        "literal {lit} out of range for {num_vars} variables"
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Reads DIMACS CNF. Clauses with fewer than three literals are padded
    /// by repeating their last literal; repeated literals are merged first,
    /// and more than three distinct literals is an error.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(Error::Format(format!(
                        "line {}: bad problem line {line:?}",
                        lineno + 1
                    )));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad count {s:?}")))
                };
                header = Some((parse(f[2])?, parse(f[3])?));
                continue;
            }
            if header.is_none() {
                return Err(Error::Format("clause before the problem line".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| {
                    Error::Format(format!("line {}: bad literal {tok:?}", lineno + 1))
                })?;
                if lit == 0 {
                    clauses.push(pad_clause(&current)?);
                    current.clear();
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(pad_clause(&current)?);
        }
        let (num_vars, num_clauses) =
            header.ok_or_else(|| Error::Format("missing problem line".into()))?;
        if clauses.len() != num_clauses {
            return Err(Error::Format(format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        CnfFormula::new(num_vars, clauses).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }

    /// Satisfiability by trying every assignment; for tiny formulas only.
    pub fn is_satisfiable(&self) -> Result<bool> {
        if self.num_vars > 24 {
            return Err(Error::BudgetExceeded {
                required: 2f64.powi(self.num_vars as i32),
                budget: 2f64.powi(24),
            });
        }
        Ok((0u64..1 << self.num_vars).any(|assign| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&lit| {
                    let v = assign >> (lit.unsigned_abs() - 1) & 1 == 1;
                    v == (lit > 0)
                })
            })
        }))
    }
}

fn pad_clause(lits: &[i64]) -> Result<[i64; 3]> {
    let mut distinct: Vec<i64> = Vec::new();
    for &l in lits {
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    match distinct.len() {
        0 => Err(Error::Format("empty clause".into())),
        1..=3 => {
            let last = *distinct.last().unwrap();
            while distinct.len() < 3 {
                distinct.push(last);
            }
            Ok([distinct[0], distinct[1], distinct[2]])
        }
        n => Err(Error::Format(format!(
            "clause has {n} distinct literals; at most 3 are supported"
        ))),
    }
}

/// Weighted population and two-valued metric built from a 3-CNF formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct ReductionInstance<S: Scalar> {
    #[serde(skip)]
    pub population: Population<S>,
    #[serde(skip)]
    pub metric: CostModel<S>,
    /// Point names in index order: `L_i_k`, `P_i_j`, `Q_i_k_j_l`, `R`.
    pub index_map: Vec<String>,
    pub k: u64,
    pub big_m: u64,
    pub num_clauses: usize,
    /// Per clause pair `(i, j)`, the indices of its `Q` points.
    #[serde(skip)]
    pub pair_q: Vec<((usize, usize), Vec<usize>)>,
    #[serde(skip)]
    pub p_index: Vec<usize>,
    #[serde(skip)]
    pub r_index: usize,
}

const CLOSE: f64 = 1.5;
const FAR: f64 = 2.5;

/// Builds the hardness instance for `cnf` with scale parameter `K`.
///
/// Points: one `L` per literal slot (weight `K(m−1−1/m)`, label −1), one
/// `P` per clause pair (weight `2K`, +1), one `Q` per non-contradictory
/// literal pair from different clauses (weight 1, −1) and a single `R`
/// (weight `K·M`, `M = 2·C(m,2)`, −1). Distances are 1.5 for the close
/// pairs `P–Q`, `P–R`, `Q–L` (both of its literals) and 2.5 otherwise.
pub fn sat_to_game<S: Scalar>(cnf: &CnfFormula, k: u64) -> Result<ReductionInstance<S>> {
    let m = cnf.clauses.len();
    check_params(m, k)?;
    let (m64, big_m) = (m as u64, (m * (m - 1)) as u64);
    let w_l = k * (m64 - 1) - k / m64;

    let mut names = Vec::new();
    let mut weights: Vec<u64> = Vec::new();
    let mut labels = Vec::new();
    let mut push = |name: String, w: u64, y: Label| {
        names.push(name);
        weights.push(w);
        labels.push(y);
        names.len() - 1
    };
    let mut l_index = vec![[0usize; 3]; m];
    for (i, slots) in l_index.iter_mut().enumerate() {
        for (kk, slot) in slots.iter_mut().enumerate() {
            *slot = push(format!("L_{}_{}", i + 1, kk + 1), w_l, Label::Neg);
        }
    }
    let mut p_index = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            p_index.push(push(format!("P_{}_{}", i + 1, j + 1), 2 * k, Label::Pos));
            pairs.push((i, j));
        }
    }
    let mut close: Vec<(usize, usize)> = Vec::new();
    let mut pair_q = Vec::new();
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let mut qs = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                if cnf.clauses[i][a] == -cnf.clauses[j][b] {
                    continue;
                }
                let q = push(
                    format!("Q_{}_{}_{}_{}", i + 1, a + 1, j + 1, b + 1),
                    1,
                    Label::Neg,
                );
                close.push((p_index[pi], q));
                close.push((q, l_index[i][a]));
                close.push((q, l_index[j][b]));
                qs.push(q);
            }
        }
        pair_q.push(((i, j), qs));
    }
    let r_index = push("R".into(), k * big_m, Label::Neg);
    for &p in &p_index {
        close.push((p, r_index));
    }

    let n = names.len();
    let close: BTreeSet<(usize, usize)> = close
        .into_iter()
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    let matrix: Vec<Vec<S>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| match () {
                    _ if a == b => S::zero(),
                    _ if close.contains(&(a, b)) => S::lit(CLOSE),
                    _ => S::lit(FAR),
                })
                .collect()
        })
        .collect();
    let weights = weights
        .into_iter()
        .map(|w| {
            S::from_u64(w).ok_or_else(|| Error::invalid("weight does not fit the scalar type"))
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(ReductionInstance {
        population: Population::indexed(weights, labels)?,
        metric: CostModel::tabular(matrix),
        index_map: names,
        k,
        big_m,
        num_clauses: m,
        pair_q,
        p_index,
        r_index,
    })
}

fn check_params(m: usize, k: u64) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!("need at least 2 clauses, got {m}")));
    }
    if k == 0 || !k.is_multiple_of(m as u64) {
        return Err(Error::invalid(format!(
            "K = {k} must be a positive multiple of m = {m}"
        )));
    }
    Ok(())
}

/// `b = K(M + 3m(m−1−1/m)) + 9·C(m,2)`.
///
/// This counts all `9·C(m,2)` potential `Q` points; on an instance where
/// contradictory pairs dropped some of them, the all-reject classifier
/// scores [`instance_baseline`] instead.
pub fn baseline_payoff(m: u64, k: u64) -> Result<u64> {
    check_params(m as usize, k)?;
    let big_m = m * (m - 1);
    let pairs = m * (m - 1) / 2;
    Ok(k * big_m + 3 * (k * m * (m - 1) - k) + 9 * pairs)
}

/// Weight the all-reject classifier gets right on this instance.
pub fn instance_baseline<S: Scalar>(inst: &ReductionInstance<S>) -> S {
    let labels = inst.population.labels();
    inst.population.weighted_count(|i| labels[i] == Label::Neg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct ReductionReport<S> {
    pub mode: Mode,
    pub satisfiable: bool,
    /// Weighted count of correctly classified points at the optimum found.
    pub optimum: S,
    pub baseline: u64,
    pub instance_baseline: S,
    /// `b + K − 9·C(m,2)` when satisfiable, `b` otherwise.
    pub predicted: u64,
    pub pass: bool,
    pub evaluations: u64,
    /// Restricted mode: no single flip of a rejected point to +1 helps.
    pub perturbation_ok: Option<bool>,
    pub labeling: Vec<Label>,
}

/// Checks the payoff dichotomy on a concrete formula.
///
/// Full mode enumerates every labeling. Restricted mode fixes `R`, all
/// `P` and all `L` to −1 and lets each clause pair accept at most one of
/// its `Q` points, then confirms that no single rejected point would pay
/// off if flipped to +1.
pub fn verify_reduction<S: Scalar>(
    cnf: &CnfFormula,
    k: u64,
    mode: Mode,
    opts: OracleOptions,
) -> Result<ReductionReport<S>> {
    let inst = sat_to_game::<S>(cnf, k)?;
    let m = cnf.clauses.len() as u64;
    let satisfiable = cnf.is_satisfiable()?;
    let baseline = baseline_payoff(m, k)?;
    let pairs = m * (m - 1) / 2;
    let predicted = if satisfiable {
        baseline + k - 9 * pairs
    } else {
        baseline
    };

    let (optimum, labeling, evaluations, perturbation_ok) = match mode {
        Mode::Full => {
            let r = brute_force_optimum_with(&inst.population, &inst.metric, opts)?;
            let Classifier::Tabular { labels } = r.opt_labeling else {
                unreachable!("oracle returns tabular labelings")
            };
            (r.opt_weight, labels, r.evaluations, None)
        }
        Mode::Restricted => restricted_search(&inst, opts)?,
    };
    let predicted_s = S::from_u64(predicted)
        .ok_or_else(|| Error::invalid("bound does not fit the scalar type"))?;
    let pass = if satisfiable {
        optimum >= predicted_s
    } else {
        optimum == predicted_s
    };
    Ok(ReductionReport {
        mode,
        satisfiable,
        optimum,
        baseline,
        instance_baseline: instance_baseline(&inst),
        predicted,
        pass: pass && perturbation_ok.unwrap_or(true),
        evaluations,
        perturbation_ok,
        labeling,
    })
}

type Found<S> = (S, Vec<Label>, u64, Option<bool>);

fn restricted_search<S: Scalar>(
    inst: &ReductionInstance<S>,
    opts: OracleOptions,
) -> Result<Found<S>> {
    let radices: Vec<usize> = inst.pair_q.iter().map(|(_, qs)| qs.len() + 1).collect();
    let configs = radices.iter().fold(1f64, |a, &r| a * r as f64);
    let budget = 2f64.powi(opts.max_points as i32);
    if configs > budget {
        return Err(Error::BudgetExceeded {
            required: configs,
            budget,
        });
    }
    let pop = &inst.population;
    let n = pop.len();
    let score = |labels: &[Label]| -> Result<S> {
        let f = Classifier::Tabular {
            labels: labels.to_vec(),
        };
        Ok(jury_payoff(&f, &inst.metric, pop, Search::Population)? * pop.total_weight())
    };

    let mut digits = vec![0usize; radices.len()];
    let mut best: Option<(S, Vec<Label>)> = None;
    let mut evaluations = 0u64;
    loop {
        let mut labels = vec![Label::Neg; n];
        for (d, (_, qs)) in digits.iter().zip(&inst.pair_q) {
            if *d > 0 {
                labels[qs[d - 1]] = Label::Pos;
            }
        }
        let v = score(&labels)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, labels));
        }
        // odometer, last digit fastest
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                let (v, labels) = best.expect("at least one configuration");
                let mut ok = true;
                for i in 0..n {
                    if labels[i] == Label::Pos {
                        continue;
                    }
                    let mut flipped = labels.clone();
                    flipped[i] = Label::Pos;
                    evaluations += 1;
                    if score(&flipped)? > v {
                        ok = false;
                    }
                }
                return Ok((v, labels, evaluations, Some(ok)));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}
