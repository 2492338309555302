use serde::{Deserialize, Serialize};

use super::summary::BlockSummary;
use crate::error::{Error, Result};
use crate::hierarchy::{Group, ParameterGroups};

fn check_groups(summary: &BlockSummary, groups: &ParameterGroups) -> Result<()> {
    if summary.k_star() != groups.k_star() {
        return Err(Error::Dimension(format!(
            "summary has {} blocks, groups cover {}",
            summary.k_star(),
            groups.k_star()
        )));
    }
    Ok(())
}

/// Free-model estimates `e / n` per cell; `None` where a cell has no dyads.
pub fn mle_alt(summary: &BlockSummary) -> Vec<Option<f64>> {
    summary
        .dyads()
        .iter()
        .zip(summary.edges())
        .map(|(&n, &e)| (n > 0).then(|| e as f64 / n as f64))
        .collect()
}

/// Pooled estimate of one group; `None` when the group has no dyads.
pub fn group_null_estimate(summary: &BlockSummary, group: &Group) -> Option<f64> {
    let n: u64 = group.cells.iter().map(|&c| summary.dyads_of(c)).sum();
    let e: u64 = group.cells.iter().map(|&c| summary.edges_of(c)).sum();
    (n > 0).then(|| e as f64 / n as f64)
}

/// Tied-model estimates per group id.
pub fn mle_null(summary: &BlockSummary, groups: &ParameterGroups) -> Result<Vec<Option<f64>>> {
    check_groups(summary, groups)?;
    Ok(groups
        .groups()
        .iter()
        .map(|g| group_null_estimate(summary, g))
        .collect())
}

/// `KL(Bern(p) || Bern(q))` in nats, with `0 log 0 = 0`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "Bernoulli parameters must lie in [0, 1] (p = {p}, q = {q})"
        )));
    }
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * ((a - b) / b).ln_1p()
        }
    };
    Ok((term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0))
}

/// Likelihood-ratio statistic of one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLlr {
    pub group_id: usize,
    /// `-2 log λ` for the group.
    pub statistic: f64,
    pub df: usize,
    /// The pooled estimate is 0, 1 or undefined, so the statistic is pinned at 0.
    pub degenerate: bool,
}

/// `-2 log λ_γ = 2 Σ_{cells} n_cell KL(alt_cell || null)`.
///
/// `alt` holds the free estimates in cell index order and `null` the group's
/// pooled estimate. Cells without dyads contribute nothing.
pub fn llr_local(summary: &BlockSummary, group: &Group, alt: &[Option<f64>], null: Option<f64>) -> Result<GroupLlr> {
    let degenerate = match null {
        None => true,
        Some(q) => q == 0.0 || q == 1.0,
    };
    let mut statistic = 0.0;
    if !degenerate {
        let q = null.unwrap();
        for &c in &group.cells {
            let n = summary.dyads_of(c);
            if let Some(p) = alt[c.index(summary.k_star())] {
                statistic += n as f64 * kl_bernoulli(p, q)?;
            }
        }
    }
    Ok(GroupLlr {
        group_id: group.id,
        statistic: 2.0 * statistic,
        df: group.df(),
        degenerate,
    })
}

/// Per-group and global likelihood-ratio statistics with their estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlrReport {
    pub groups: Vec<GroupLlr>,
    /// `-2 log λ_T`, the sum of the group statistics.
    pub global: f64,
    pub null_estimates: Vec<Option<f64>>,
    pub alt_estimates: Vec<Option<f64>>,
}

impl LlrReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per group: `group_id,df,stat,degenerate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group_id,df,stat,degenerate\n");
        for g in &self.groups {
            out.push_str(&format!("{},{},{},{}\n", g.group_id, g.df, g.statistic, g.degenerate));
        }
        out
    }
}

pub fn llr_global(summary: &BlockSummary, groups: &ParameterGroups) -> Result<LlrReport> {
    let alt = mle_alt(summary);
    let null = mle_null(summary, groups)?;
    let locals = groups
        .groups()
        .iter()
        .map(|g| llr_local(summary, g, &alt, null[g.id]))
        .collect::<Result<Vec<_>>>()?;
    Ok(LlrReport {
        global: locals.iter().map(|g| g.statistic).sum(),
        groups: locals,
        null_estimates: null,
        alt_estimates: alt,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PreferredModel {
    Rmhsbm,
    Sbm,
}

/// BIC comparison of the tied model against the free SBM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicReport {
    pub delta: f64,
    pub llr: f64,
    pub penalty: f64,
    pub preferred: PreferredModel,
}

/// `Δ = -2 log λ_T - Σ_γ (|γ_B| - 1) ln C(n, 2)` for a single graph.
pub fn bic_delta(summary: &BlockSummary, groups: &ParameterGroups) -> Result<BicReport> {
    if summary.graph_count() != 1 {
        return Err(Error::InvalidArgument(format!(
            "BIC needs the summary of one graph, got {} graphs",
            summary.graph_count()
        )));
    }
    let n = summary.vertex_count();
    if n < 3 {
        return Err(Error::Domain(format!("BIC needs at least 3 vertices, got {n}")));
    }
    let llr = llr_global(summary, groups)?.global;
    let dyads = (n as f64) * (n as f64 - 1.0) / 2.0;
    let penalty = groups.total_df() as f64 * dyads.ln();
    let delta = llr - penalty;
    Ok(BicReport {
        delta,
        llr,
        penalty,
        preferred: if delta < 0.0 {
            PreferredModel::Rmhsbm
        } else {
            PreferredModel::Sbm
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::Cell;
    use approx::assert_relative_eq;

    fn example() -> (BlockSummary, ParameterGroups) {
        // K* = 2 with block sizes 5 and 2: cells {0,0}: 10, {0,1}: 10, {1,1}: 1.
        let summary = BlockSummary::new(2, 7, vec![10, 10, 1], vec![3, 5, 0]).unwrap();
        let groups = ParameterGroups::from_cells(
            vec![5, 2],
            vec![vec![Cell::new(0, 0), Cell::new(0, 1)], vec![Cell::new(1, 1)]],
        )
        .unwrap();
        (summary, groups)
    }

    fn bernoulli_loglik(e: f64, n: f64, p: f64) -> f64 {
        let a = if e > 0.0 { e * p.ln() } else { 0.0 };
        let b = if n - e > 0.0 { (n - e) * (1.0 - p).ln() } else { 0.0 };
        a + b
    }

    #[test]
    fn estimators() {
        let (s, g) = example();
        assert_eq!(mle_alt(&s), vec![Some(0.3), Some(0.5), Some(0.0)]);
        assert_eq!(mle_null(&s, &g).unwrap(), vec![Some(0.4), Some(0.0)]);
        // Grid maximization of the pooled likelihood lands on 0.4.
        let best = (1..1000)
            .map(|i| i as f64 / 1000.0)
            .max_by(|&a, &b| {
                let f = |p| bernoulli_loglik(3.0, 10.0, p) + bernoulli_loglik(5.0, 10.0, p);
                f(a).partial_cmp(&f(b)).unwrap()
            })
            .unwrap();
        assert_relative_eq!(best, 0.4, epsilon = 1e-12);
        let empty = BlockSummary::new(1, 1, vec![0], vec![0]).unwrap();
        assert_eq!(mle_alt(&empty), vec![None]);
    }

    #[test]
    fn kl_values() {
        assert_relative_eq!(kl_bernoulli(0.3, 0.4).unwrap(), 0.021_600_9, max_relative = 1e-5);
        for p in [0.0, 0.2, 0.5, 1.0] {
            assert_eq!(kl_bernoulli(p, p).unwrap(), 0.0);
        }
        assert_eq!(kl_bernoulli(0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.0, 0.0).unwrap(), 0.0);
        assert!(kl_bernoulli(1.1, 0.5).is_err());
        assert!(kl_bernoulli(0.5, -0.1).is_err());
    }

    #[test]
    fn local_statistic_example() {
        let (s, g) = example();
        let report = llr_global(&s, &g).unwrap();
        let direct = 2.0
            * (bernoulli_loglik(3.0, 10.0, 0.3) + bernoulli_loglik(5.0, 10.0, 0.5)
                - bernoulli_loglik(8.0, 20.0, 0.4));
        assert_relative_eq!(report.groups[0].statistic, direct, max_relative = 1e-12);
        assert_relative_eq!(report.groups[0].statistic, 0.840_25, max_relative = 1e-4);
        assert_eq!(report.groups[0].df, 1);
        assert!(!report.groups[0].degenerate);
        assert!(report.groups[1].degenerate);
        assert_eq!(report.groups[1].statistic, 0.0);
        assert_eq!(report.global, report.groups[0].statistic);
    }

    #[test]
    fn csv_and_json_export() {
        let (s, g) = example();
        let r = llr_global(&s, &g).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("group_id,df,stat,degenerate\n0,1,"));
        assert!(csv.ends_with("1,0,0,true\n"));
        let back: LlrReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn bic_examples() {
        // n = 100 vertices in two blocks of 50 and a tied diagonal pair at equal rates.
        let sizes = [50usize, 50];
        let dyads = vec![1225, 2500, 1225];
        let s = BlockSummary::new(2, 100, dyads, vec![245, 300, 245]).unwrap();
        let g = ParameterGroups::from_cells(
            sizes.to_vec(),
            vec![vec![Cell::new(0, 0), Cell::new(1, 1)], vec![Cell::new(0, 1)]],
        )
        .unwrap();
        let r = bic_delta(&s, &g).unwrap();
        assert_eq!(r.llr, 0.0);
        assert_relative_eq!(r.delta, -(4950f64.ln()), max_relative = 1e-12);
        assert_relative_eq!(r.delta, -8.507, max_relative = 1e-3);
        assert_eq!(r.preferred, PreferredModel::Rmhsbm);
        assert_eq!(r.delta, r.llr - r.penalty);

        let single = ParameterGroups::singletons(sizes.to_vec());
        let r = bic_delta(&s, &single).unwrap();
        assert_eq!((r.penalty, r.delta), (0.0, 0.0));

        let tiny = BlockSummary::new(1, 2, vec![1], vec![0]).unwrap();
        assert!(bic_delta(&tiny, &ParameterGroups::singletons(vec![2])).is_err());
        let pooled = s.merge(&s).unwrap();
        assert!(bic_delta(&pooled, &g).is_err());
    }
}
