use serde::{Deserialize, Serialize};

use super::types::{Method, TestOutcome};
use crate::error::{Error, Result};
use crate::estimation::{group_null_estimate, llr_local, mle_alt, BlockSummary};
use crate::hierarchy::{Group, ParameterGroups};
use crate::numeric::{chi2_sf, f_sf};

fn zero_edges(summary: &BlockSummary, group: &Group) -> bool {
    group.cells.iter().all(|&c| summary.edges_of(c) == 0)
}

fn defined_cells(summary: &BlockSummary, group: &Group) -> usize {
    group.cells.iter().filter(|&&c| summary.dyads_of(c) > 0).count()
}

/// Wilks test of one group on one summary.
///
/// The degrees of freedom count member cells that have at least one dyad,
/// minus one. Outcomes carry no decision beyond not-testable and
/// trivial-zero; the multiple-testing step decides the rest.
pub fn wilks_local(summary: &BlockSummary, group: &Group) -> Result<TestOutcome> {
    let method = Method::WilksAggregated;
    let defined = defined_cells(summary, group);
    if !group.is_testable() || defined < 2 {
        return Ok(TestOutcome::not_testable(group.id, method));
    }
    if zero_edges(summary, group) {
        return Ok(TestOutcome::trivial_zero(group.id, method, defined - 1));
    }
    let alt = mle_alt(summary);
    let llr = llr_local(summary, group, &alt, group_null_estimate(summary, group))?;
    let df = defined - 1;
    let p = chi2_sf(llr.statistic, df)?;
    Ok(TestOutcome::tested(group.id, method, llr.statistic, df, None, p.value))
}

/// Global Wilks test over the testable, non-trivial groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl GlobalTest {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

pub fn wilks_global(summary: &BlockSummary, groups: &ParameterGroups) -> Result<GlobalTest> {
    check_shape(summary, groups)?;
    let mut statistic = 0.0;
    let mut df = 0;
    for g in groups.groups() {
        let o = wilks_local(summary, g)?;
        if o.is_tested() {
            statistic += o.statistic;
            df += o.df;
        }
    }
    if df == 0 {
        return Err(Error::InvalidArgument("no testable groups".into()));
    }
    Ok(GlobalTest {
        statistic,
        df,
        p_value: chi2_sf(statistic, df)?.value,
    })
}

pub(crate) fn check_shape(summary: &BlockSummary, groups: &ParameterGroups) -> Result<()> {
    if summary.k_star() != groups.k_star() {
        return Err(Error::Dimension(format!(
            "summary has {} blocks, groups cover {}",
            summary.k_star(),
            groups.k_star()
        )));
    }
    Ok(())
}

/// Per-graph cell estimates for one group: `estimates[s][j]` is the estimate
/// of cell `j` of the group in graph `s`, `None` where the cell has no dyads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationEstimates {
    pub group_id: usize,
    pub estimates: Vec<Vec<Option<f64>>>,
    pub dyads: Vec<Vec<u64>>,
    /// Every member cell has zero edges in every graph.
    pub all_zero: bool,
}

impl PopulationEstimates {
    pub fn from_population(population: &[BlockSummary], group: &Group) -> Self {
        let estimates = population
            .iter()
            .map(|s| {
                group
                    .cells
                    .iter()
                    .map(|&c| {
                        let n = s.dyads_of(c);
                        (n > 0).then(|| s.edges_of(c) as f64 / n as f64)
                    })
                    .collect()
            })
            .collect();
        let dyads = population
            .iter()
            .map(|s| group.cells.iter().map(|&c| s.dyads_of(c)).collect())
            .collect();
        PopulationEstimates {
            group_id: group.id,
            estimates,
            dyads,
            all_zero: population.iter().all(|s| zero_edges(s, group)),
        }
    }

    /// Builds from a complete matrix of observations (rows are graphs).
    pub fn from_rows(group_id: usize, rows: Vec<Vec<f64>>) -> Self {
        let all_zero = rows.iter().flatten().all(|&v| v == 0.0);
        PopulationEstimates {
            group_id,
            dyads: rows.iter().map(|r| vec![0; r.len()]).collect(),
            estimates: rows
                .into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
            all_zero,
        }
    }

    pub fn graph_count(&self) -> usize {
        self.estimates.len()
    }

    pub fn cell_count(&self) -> usize {
        self.estimates.first().map_or(0, Vec::len)
    }

    fn complete_rows(&self) -> Option<Vec<Vec<f64>>> {
        self.estimates
            .iter()
            .map(|r| r.iter().copied().collect::<Option<Vec<f64>>>())
            .collect()
    }

    /// Common gate for the population methods: `Ok(Err(outcome))` short-circuits.
    fn prepare(&self, method: Method) -> Result<std::result::Result<Vec<Vec<f64>>, TestOutcome>> {
        if self.graph_count() < 2 {
            return Err(Error::InvalidArgument(format!(
                "{} needs at least 2 graphs, got {}",
                method.as_str(),
                self.graph_count()
            )));
        }
        let k = self.cell_count();
        if k < 2 {
            return Ok(Err(TestOutcome::not_testable(self.group_id, method)));
        }
        let Some(rows) = self.complete_rows() else {
            return Ok(Err(TestOutcome::not_testable(self.group_id, method)));
        };
        if self.all_zero {
            return Ok(Err(TestOutcome::trivial_zero(self.group_id, method, k - 1)));
        }
        Ok(Ok(rows))
    }
}

/// One-way ANOVA with the group's cells as levels and graphs as replicates.
pub fn anova_local(estimates: &PopulationEstimates) -> Result<TestOutcome> {
    let method = Method::Anova;
    let rows = match estimates.prepare(method)? {
        Ok(rows) => rows,
        Err(outcome) => return Ok(outcome),
    };
    let (f, d1, d2) = anova_f(&rows);
    let p = if f.is_nan() {
        1.0
    } else {
        f_sf(f, d1 as f64, d2 as f64)?.value
    };
    let statistic = if f.is_nan() { 0.0 } else { f };
    Ok(TestOutcome::tested(estimates.group_id, method, statistic, d1, Some(d2), p))
}

/// `F = (SSB / (k-1)) / (SSW / (k(S-1)))`; NaN when every observation is equal.
pub(crate) fn anova_f(rows: &[Vec<f64>]) -> (f64, usize, usize) {
    let s = rows.len();
    let k = rows[0].len();
    let grand = rows.iter().flatten().sum::<f64>() / (s * k) as f64;
    let means: Vec<f64> = (0..k)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / s as f64)
        .collect();
    let ssb: f64 = means.iter().map(|m| s as f64 * (m - grand).powi(2)).sum();
    let ssw: f64 = rows
        .iter()
        .map(|r| r.iter().zip(&means).map(|(x, m)| (x - m).powi(2)).sum::<f64>())
        .sum();
    let (d1, d2) = (k - 1, k * (s - 1));
    let f = if ssb == 0.0 && ssw == 0.0 {
        f64::NAN
    } else if ssw == 0.0 {
        f64::INFINITY
    } else {
        (ssb / d1 as f64) / (ssw / d2 as f64)
    };
    (f, d1, d2)
}

/// Friedman rank test with graphs as blocks and the group's cells as treatments.
pub fn friedman_local(estimates: &PopulationEstimates) -> Result<TestOutcome> {
    let method = Method::Friedman;
    let rows = match estimates.prepare(method)? {
        Ok(rows) => rows,
        Err(outcome) => return Ok(outcome),
    };
    let k = rows[0].len();
    let q = friedman_q(&rows);
    let p = if q == 0.0 { 1.0 } else { chi2_sf(q, k - 1)?.value };
    Ok(TestOutcome::tested(estimates.group_id, method, q, k - 1, None, p))
}

/// Average ranks (1-based) within one row and the row's `Σ (t³ - t)` over tie runs.
pub(crate) fn rank_row(row: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
    let mut ranks = vec![0.0; row.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Tie-corrected Friedman statistic; 0 when every row is fully tied.
pub(crate) fn friedman_q(rows: &[Vec<f64>]) -> f64 {
    let s = rows.len() as f64;
    let k = rows[0].len();
    let kf = k as f64;
    let mut rank_sums = vec![0.0; k];
    let mut ties = 0.0;
    for r in rows {
        let (ranks, t) = rank_row(r);
        for (acc, v) in rank_sums.iter_mut().zip(ranks) {
            *acc += v;
        }
        ties += t;
    }
    let correction = 1.0 - ties / (s * (kf * kf * kf - kf));
    if correction <= 0.0 {
        return 0.0;
    }
    let centre = (kf + 1.0) / 2.0;
    let spread: f64 = rank_sums.iter().map(|r| (r / s - centre).powi(2)).sum();
    12.0 * s / (kf * (kf + 1.0)) * spread / correction
}
