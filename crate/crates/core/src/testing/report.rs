use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bh::{bh_correct, bh_line, sorted_order};
use super::local::{anova_local, check_shape, friedman_local, wilks_local, PopulationEstimates};
use super::types::{Decision, Method, ProfilePoint, TestOutcome};
use crate::cell::cells;
use crate::error::{Error, Result};
use crate::estimation::{aggregate_summaries, BlockSummary};
use crate::hierarchy::ParameterGroups;

/// Display threshold on averaged individual rejection rates. Heuristic: the
/// raw rates are always reported alongside.
pub const RATE_THRESHOLD: f64 = 0.5;

/// Outcomes of one method over all groups, with BH bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: Method,
    pub alpha: f64,
    /// Number of hypotheses entering the BH step.
    pub m: usize,
    pub groups: Vec<TestOutcome>,
    /// Tested p-values in nondecreasing order with the BH line at each rank.
    pub p_profile: Vec<ProfilePoint>,
    /// `K* x K*` decision codes: 0 fail, 1 reject, 2 trivial-zero, 3 not-testable.
    pub rejection_matrix: Vec<Vec<u8>>,
}

impl TestReport {
    fn assemble(
        method: Method,
        alpha: f64,
        groups: &ParameterGroups,
        mut outcomes: Vec<TestOutcome>,
        apply_bh: bool,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let tested: Vec<usize> = (0..outcomes.len()).filter(|&i| outcomes[i].is_tested()).collect();
        let p: Vec<f64> = tested.iter().map(|&i| outcomes[i].p_value.unwrap()).collect();
        let m = p.len();
        if apply_bh {
            for (&i, reject) in tested.iter().zip(bh_correct(&p, alpha)?) {
                outcomes[i].decision = if reject { Decision::Reject } else { Decision::Fail };
            }
        }
        let p_profile = sorted_order(&p)
            .into_iter()
            .enumerate()
            .map(|(rank, j)| ProfilePoint {
                p: p[j],
                bh_line: bh_line(rank + 1, m, alpha),
            })
            .collect();
        let k = groups.k_star();
        let mut rejection_matrix = vec![vec![0u8; k]; k];
        for c in cells(k) {
            let code = outcomes[groups.group_of(c)].decision.code();
            rejection_matrix[c.row][c.col] = code;
            rejection_matrix[c.col][c.row] = code;
        }
        Ok(TestReport {
            method,
            alpha,
            m,
            groups: outcomes,
            p_profile,
            rejection_matrix,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fraction of tested groups rejected. For `wilks-individual` this is the
    /// mean per-graph rejection rate over tested groups.
    pub fn rejection_fraction(&self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        if self.method == Method::WilksIndividual {
            let total: f64 = self
                .groups
                .iter()
                .filter(|o| o.is_tested())
                .filter_map(|o| o.rejection_rate)
                .sum();
            return total / self.m as f64;
        }
        let rejected = self.groups.iter().filter(|o| o.decision == Decision::Reject).count();
        rejected as f64 / self.m as f64
    }

    pub fn rejection_matrix_csv(&self) -> String {
        matrix_to_csv(&self.rejection_matrix)
    }

    /// `rank,p,bh_line` rows, rank starting at 1.
    pub fn p_profile_csv(&self) -> String {
        let mut out = String::from("rank,p,bh_line\n");
        for (i, pt) in self.p_profile.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, pt.p, pt.bh_line));
        }
        out
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Comma-separated rows of integer codes, no header.
pub fn matrix_to_csv(matrix: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for row in matrix {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses the output of [`matrix_to_csv`], checking codes and squareness.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<u8>>> {
    let rows: Vec<Vec<u8>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|f| {
                    f.trim()
                        .parse::<u8>()
                        .ok()
                        .filter(|&c| Decision::from_code(c).is_some())
                        .ok_or_else(|| {
                            Error::InvalidArgument(format!("line {}: invalid code {f:?}", i + 1))
                        })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Dimension("rejection matrix is not square".into()));
    }
    Ok(rows)
}

fn check_population(population: &[BlockSummary], groups: &ParameterGroups) -> Result<()> {
    if population.is_empty() {
        return Err(Error::InvalidArgument("empty population".into()));
    }
    population.iter().try_for_each(|s| check_shape(s, groups))
}

fn per_graph_outcomes(summary: &BlockSummary, groups: &ParameterGroups, alpha: f64) -> Result<Vec<TestOutcome>> {
    let outcomes = groups
        .groups()
        .iter()
        .map(|g| {
            wilks_local(summary, g).map(|mut o| {
                o.method = Method::WilksIndividual;
                o
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TestReport::assemble(Method::WilksIndividual, alpha, groups, outcomes, true)?.groups)
}

/// Per group, the fraction of graphs whose BH-corrected Wilks test rejects it;
/// `None` for groups never tested in any graph.
pub fn individual_rejection_rates(
    population: &[BlockSummary],
    groups: &ParameterGroups,
    alpha: f64,
) -> Result<Vec<Option<f64>>> {
    Ok(individual_summary(population, groups, alpha)?
        .into_iter()
        .map(|o| o.rejection_rate)
        .collect())
}

fn individual_summary(population: &[BlockSummary], groups: &ParameterGroups, alpha: f64) -> Result<Vec<TestOutcome>> {
    check_population(population, groups)?;
    check_alpha(alpha)?;
    let per_graph: Vec<Vec<TestOutcome>> = population
        .par_iter()
        .map(|s| per_graph_outcomes(s, groups, alpha))
        .collect::<Result<_>>()?;
    let graphs = population.len() as f64;
    Ok(groups
        .groups()
        .iter()
        .map(|g| {
            let rows: Vec<&TestOutcome> = per_graph.iter().map(|r| &r[g.id]).collect();
            let tested: Vec<&&TestOutcome> = rows.iter().filter(|o| o.is_tested()).collect();
            if tested.is_empty() {
                let all_zero = rows.iter().all(|o| o.decision == Decision::TrivialZero);
                let mut o = if all_zero {
                    TestOutcome::trivial_zero(g.id, Method::WilksIndividual, g.df())
                } else {
                    TestOutcome::not_testable(g.id, Method::WilksIndividual)
                };
                o.rejection_rate = all_zero.then_some(0.0);
                return o;
            }
            let count = tested.len() as f64;
            let rejects = rows.iter().filter(|o| o.decision == Decision::Reject).count() as f64;
            let rate = rejects / graphs;
            let mut o = TestOutcome::tested(
                g.id,
                Method::WilksIndividual,
                tested.iter().map(|o| o.statistic).sum::<f64>() / count,
                tested.iter().map(|o| o.df).max().unwrap(),
                None,
                tested.iter().map(|o| o.p_value.unwrap()).sum::<f64>() / count,
            );
            o.rejection_rate = Some(rate);
            o.decision = if rate >= RATE_THRESHOLD {
                Decision::Reject
            } else {
                Decision::Fail
            };
            o
        })
        .collect())
}

/// Pools the population, then runs BH-corrected Wilks tests on the pooled counts.
pub fn aggregated_test(population: &[BlockSummary], groups: &ParameterGroups, alpha: f64) -> Result<TestReport> {
    check_population(population, groups)?;
    let pooled = aggregate_summaries(population)?;
    let outcomes = groups
        .groups()
        .iter()
        .map(|g| wilks_local(&pooled, g))
        .collect::<Result<Vec<_>>>()?;
    TestReport::assemble(Method::WilksAggregated, alpha, groups, outcomes, true)
}

/// Runs one method over every group and applies BH across the tested groups.
///
/// For `wilks-individual` each group's p-value is its mean over graphs, and
/// its decision compares the rejection rate with [`RATE_THRESHOLD`].
pub fn run_tests(
    population: &[BlockSummary],
    groups: &ParameterGroups,
    method: Method,
    alpha: f64,
) -> Result<TestReport> {
    check_population(population, groups)?;
    match method {
        Method::WilksAggregated => aggregated_test(population, groups, alpha),
        Method::WilksIndividual => {
            let outcomes = individual_summary(population, groups, alpha)?;
            TestReport::assemble(method, alpha, groups, outcomes, false)
        }
        Method::Anova | Method::Friedman => {
            let outcomes = groups
                .groups()
                .par_iter()
                .map(|g| {
                    let est = PopulationEstimates::from_population(population, g);
                    if method == Method::Anova {
                        anova_local(&est)
                    } else {
                        friedman_local(&est)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            TestReport::assemble(method, alpha, groups, outcomes, true)
        }
    }
}
