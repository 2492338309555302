use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use rmhsbm::cell::cells;
use rmhsbm::estimation::{kl_bernoulli, llr_global, mle_alt, mle_null, BlockSummary};
use rmhsbm::hierarchy::{
    build_parameter_groups, flatten_model, level_nodes, presets, tie_motif_parents, RootedTree, SymMatrix,
};
use rmhsbm::numeric::chi2_sf;
use rmhsbm::testing::{bh_correct, bh_line};
use rmhsbm::{Cell, ParameterGroups, Seed};

const LABELS: [&str; 3] = ["a", "b", "c"];

fn random_sym(dim: usize, rng: &mut impl Rng) -> SymMatrix {
    let values = (0..dim * (dim + 1) / 2).map(|_| rng.random_range(0.05..0.95)).collect();
    SymMatrix::from_upper(dim, values).unwrap()
}

/// Every tied group shares one value in any flattened model, and distinct
/// groups get distinct values when the hierarchy parameters are generic.
#[test]
fn tying_soundness_and_completeness() {
    proptest!(ProptestConfig::with_cases(64), |(
        sequence in prop::collection::vec(0usize..3, 1..6),
        leaves in 1usize..4,
        seed in any::<u64>(),
    )| {
        let labels: Vec<&str> = sequence.iter().map(|&i| LABELS[i]).collect();
        let spec = presets::motif_sequence(&labels, leaves, 2);
        let groups = build_parameter_groups(&spec);
        let mut rng = Seed::new(seed).rng();
        let mut levels: BTreeMap<usize, SymMatrix> = level_nodes(&spec)
            .into_iter()
            .map(|u| (u, random_sym(spec.tree().children(u).len(), &mut rng)))
            .collect();
        tie_motif_parents(&spec, &mut levels);
        let motifs: BTreeMap<String, SymMatrix> = spec
            .motifs()
            .iter()
            .map(|m| (m.label.clone(), random_sym(m.leaf_count, &mut rng)))
            .collect();
        let flat = flatten_model(&spec, &levels, &motifs).unwrap();

        let mut value_of_group: BTreeMap<usize, f64> = BTreeMap::new();
        for c in cells(spec.k_star()) {
            let v = flat.probability(c);
            let g = groups.group_of(c);
            let first = *value_of_group.entry(g).or_insert(v);
            prop_assert_eq!(first, v, "cell {:?} differs within group {}", c, g);
        }
        let mut values: Vec<f64> = value_of_group.values().copied().collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        prop_assert_eq!(values.len(), groups.len());
    });
}

fn ancestors(parents: &[i64], mut v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while parents[v] >= 0 {
        v = parents[v] as usize;
        out.push(v);
    }
    out
}

#[test]
fn lca_matches_ancestor_set_oracle() {
    let tree_parents = prop::collection::vec(any::<prop::sample::Index>(), 1..40).prop_map(|picks| {
        let mut parents = vec![-1i64];
        for (i, p) in picks.iter().enumerate() {
            parents.push(p.index(i + 1) as i64);
        }
        parents
    });
    proptest!(ProptestConfig::with_cases(128), |(parents in tree_parents, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>())| {
        let tree = RootedTree::from_parents(&parents).unwrap();
        let n = parents.len();
        let (a, b) = (a.index(n), b.index(n));
        let up_a = ancestors(&parents, a);
        let up_b = ancestors(&parents, b);
        // The first ancestor of `a` (walking up) that is also above `b`.
        let oracle = *up_a.iter().find(|v| up_b.contains(v)).unwrap();
        prop_assert_eq!(tree.lca(a, b).unwrap(), oracle);
        prop_assert_eq!(tree.lca(b, a).unwrap(), oracle);
    });
}

#[test]
fn bh_laws() {
    let pvals = prop::collection::vec(0.0f64..=1.0, 1..60);
    proptest!(ProptestConfig::with_cases(256), |(p in pvals, alpha in 0.001f64..0.5, which in any::<prop::sample::Index>(), shrink in 0.0f64..1.0)| {
        let m = p.len();
        let reject = bh_correct(&p, alpha).unwrap();

        // Step-up oracle: reject every p at or below the largest p_(k) <= k alpha / m.
        let mut sorted = p.clone();
        sorted.sort_by(f64::total_cmp);
        let cutoff = (1..=m).rev().find(|&k| sorted[k - 1] <= bh_line(k, m, alpha)).map(|k| sorted[k - 1]);
        for (x, r) in p.iter().zip(&reject) {
            prop_assert_eq!(*r, cutoff.is_some_and(|c| *x <= c));
        }

        // Shrinking one p-value never removes a rejection.
        let mut q = p.clone();
        let i = which.index(m);
        q[i] *= shrink;
        let after = bh_correct(&q, alpha).unwrap();
        for (before, now) in reject.iter().zip(&after) {
            prop_assert!(!before || *now);
        }

        // Raising alpha never removes a rejection.
        let wider = bh_correct(&p, (alpha * 1.5).min(0.99)).unwrap();
        for (before, now) in reject.iter().zip(&wider) {
            prop_assert!(!before || *now);
        }

        // Boundaries.
        prop_assert!(bh_correct(&vec![0.0; m], alpha).unwrap().iter().all(|&r| r));
        let above: Vec<f64> = p.iter().map(|x| alpha + (1.0 - alpha) * x.max(1e-9)).collect();
        prop_assert!(bh_correct(&above, alpha).unwrap().iter().all(|&r| !r));
    });
}

/// A random single-graph summary over `sizes`, with edge counts in `0..=n`.
fn random_summary(sizes: &[usize], fractions: &[f64]) -> BlockSummary {
    let k = sizes.len();
    let mut dyads = Vec::new();
    let mut edges = Vec::new();
    for (i, c) in cells(k).enumerate() {
        let n = rmhsbm::cell::dyad_count(c, sizes);
        dyads.push(n);
        edges.push((fractions[i % fractions.len()] * n as f64).round() as u64);
    }
    BlockSummary::new(k, sizes.iter().sum(), dyads, edges).unwrap()
}

fn random_groups(sizes: &[usize], assignment: &[usize]) -> ParameterGroups {
    let k = sizes.len();
    let mut by_group: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
    for (i, c) in cells(k).enumerate() {
        by_group.entry(assignment[i % assignment.len()]).or_default().push(c);
    }
    ParameterGroups::from_cells(sizes.to_vec(), by_group.into_values().collect()).unwrap()
}

fn bernoulli_loglik(e: f64, n: f64, p: f64) -> f64 {
    let term = |k: f64, x: f64| if k == 0.0 { 0.0 } else { k * x.ln() };
    term(e, p) + term(n - e, 1.0 - p)
}

#[test]
fn llr_nonnegative_additive_and_matches_likelihood() {
    let case = (
        prop::collection::vec(1usize..8, 1..5),
        prop::collection::vec(0.0f64..=1.0, 1..12),
        prop::collection::vec(0usize..4, 1..12),
    );
    proptest!(ProptestConfig::with_cases(256), |((sizes, fractions, assignment) in case)| {
        let summary = random_summary(&sizes, &fractions);
        let groups = random_groups(&sizes, &assignment);
        let report = llr_global(&summary, &groups).unwrap();
        let sum: f64 = report.groups.iter().map(|g| g.statistic).sum();
        prop_assert!(report.groups.iter().all(|g| g.statistic >= 0.0));
        prop_assert!((report.global - sum).abs() <= 1e-9 * (1.0 + sum));

        // Direct maximized log-likelihoods under both hypotheses.
        let alt = mle_alt(&summary);
        let null = mle_null(&summary, &groups).unwrap();
        let k = summary.k_star();
        let mut diff = 0.0;
        for c in cells(k) {
            let (n, e) = (summary.dyads_of(c) as f64, summary.edges_of(c) as f64);
            if n == 0.0 {
                continue;
            }
            let i = c.index(k);
            diff += bernoulli_loglik(e, n, alt[i].unwrap()) - bernoulli_loglik(e, n, null[groups.group_of(c)].unwrap());
        }
        prop_assert!((report.global - 2.0 * diff).abs() <= 1e-8 * (1.0 + report.global.abs()));
    });
}

#[test]
fn merge_is_associative_and_commutative() {
    let fr = prop::collection::vec(0.0f64..=1.0, 1..8);
    proptest!(|(sizes in prop::collection::vec(1usize..6, 1..4), a in fr.clone(), b in fr.clone(), c in fr)| {
        let (x, y, z) = (random_summary(&sizes, &a), random_summary(&sizes, &b), random_summary(&sizes, &c));
        let left = x.merge(&y).unwrap().merge(&z).unwrap();
        let right = x.merge(&y.merge(&z).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(x.merge(&y).unwrap(), y.merge(&x).unwrap());
        prop_assert_eq!(left.graph_count(), 3);
    });
}

/// `2 (p - q)^2 <= KL(p || q) <= (p - q)^2 / (q (1 - q))` on a 99 x 49 grid.
#[test]
fn pinsker_sandwich_grid() {
    for i in 1..=99 {
        for j in 1..=49 {
            let p = i as f64 / 100.0;
            let q = j as f64 / 50.0;
            let kl = kl_bernoulli(p, q).unwrap();
            let d2 = (p - q) * (p - q);
            assert!(kl >= 2.0 * d2 - 1e-15, "lower bound at p={p}, q={q}");
            assert!(kl <= d2 / (q * (1.0 - q)) + 1e-15, "upper bound at p={p}, q={q}");
        }
    }
}

#[test]
fn chi2_df2_closed_form() {
    proptest!(ProptestConfig::with_cases(512), |(x in 0.0f64..600.0)| {
        let sf = chi2_sf(x, 2).unwrap().value;
        let exact = (-x / 2.0).exp();
        prop_assert!((sf - exact).abs() <= 1e-12 * exact.max(1e-300) || (sf - exact).abs() < 1e-300);
    });
}
