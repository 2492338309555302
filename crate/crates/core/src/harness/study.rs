use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PerturbationSetting, Sampler, StudyConfig};
use crate::error::{Error, Result};
use crate::estimation::{bic_delta, summarize, BlockSummary};
use crate::hierarchy::{build_parameter_groups, FlatModel, Membership, ParameterGroups};
use crate::sampling::{
    corrupt_parameters, draw_model_parameters, perturb_parameters, sample_block_summary,
    sample_conditional_sbm, PerturbationMode, Seed,
};
use crate::testing::{run_tests, wilks_global, Method, ProfilePoint};

/// Per-method aggregate at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    /// Mean over replicates of the fraction of tested groups rejected.
    pub mean_rejection_fraction: f64,
    /// Per cell, the fraction of replicates in which the cell's group was rejected.
    pub reject_rate: Vec<Vec<f64>>,
    /// Decision codes of the first replicate.
    pub example_matrix: Vec<Vec<u8>>,
    /// Sorted p-values of the first replicate.
    pub example_profile: Vec<ProfilePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub corruption: usize,
    /// `corruption` over the number of tied-model parameters (groups).
    pub fraction_corrupted: f64,
    pub relative_sd: f64,
    pub mode: PerturbationMode,
    pub replicates: usize,
    /// Fraction of all sampled graphs whose global Wilks test rejects.
    pub global_rejection_rate: f64,
    pub mean_bic: f64,
    pub bic_sd: f64,
    /// Empirical 5% and 95% quantiles of the per-graph BIC differences.
    pub bic_low: f64,
    pub bic_high: f64,
    /// Fraction of graphs with a negative BIC difference.
    pub bic_negative_fraction: f64,
    pub methods: Vec<MethodSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub k_star: usize,
    pub group_count: usize,
    pub total_df: usize,
    pub methods: Vec<Method>,
    pub points: Vec<SweepPoint>,
}

impl StudyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study results serialize")
    }
}

struct Replicate {
    global_rejections: usize,
    bics: Vec<f64>,
    reports: Vec<(f64, Vec<Vec<u8>>, Vec<ProfilePoint>)>,
}

/// Runs the whole sweep. Replicates run in parallel; results are reduced in
/// (point, parameterization, replicate) order so output is seed-determined.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let spec = config.hierarchy()?;
    let groups = build_parameter_groups(&spec);
    let methods: Vec<Method> = config.methods.clone();
    if config.graphs_per_population < 2 && methods.iter().any(|m| matches!(m, Method::Anova | Method::Friedman)) {
        return Err(Error::InvalidArgument(
            "anova and friedman need graphs_per_population >= 2".into(),
        ));
    }
    let tied = groups.tied_cells().len();
    if let Some(&c) = config.corruption_counts.iter().find(|&&c| c > tied) {
        return Err(Error::InvalidArgument(format!(
            "corruption count {c} exceeds the {tied} tied cells"
        )));
    }
    let points: Vec<(usize, PerturbationSetting)> = config
        .perturbations
        .iter()
        .flat_map(|&p| config.corruption_counts.iter().map(move |&c| (c, p)))
        .collect();
    let jobs: Vec<(usize, usize, usize)> = (0..points.len())
        .flat_map(|i| (0..config.n_params).flat_map(move |p| (0..config.n_reps).map(move |r| (i, p, r))))
        .collect();
    let master = Seed::new(config.master_seed);
    let tau = Membership::contiguous(groups.block_sizes());

    let outcomes: Vec<Replicate> = jobs
        .par_iter()
        .map(|&(i, p, r)| {
            let (corruption, setting) = points[i];
            run_replicate(config, &groups, &tau, &methods, master, corruption, setting, p, r)
        })
        .collect::<Result<_>>()?;

    let per_point = config.n_params * config.n_reps;
    let k = groups.k_star();
    let points = points
        .iter()
        .enumerate()
        .map(|(i, &(corruption, setting))| {
            let reps = &outcomes[i * per_point..(i + 1) * per_point];
            summarize_point(corruption, groups.len(), setting, reps, &methods, k, config.graphs_per_population)
        })
        .collect();
    Ok(StudyResult {
        k_star: k,
        group_count: groups.len(),
        total_df: groups.total_df(),
        methods,
        points,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_replicate(
    config: &StudyConfig,
    groups: &ParameterGroups,
    tau: &Membership,
    methods: &[Method],
    master: Seed,
    corruption: usize,
    setting: PerturbationSetting,
    param: usize,
    rep: usize,
) -> Result<Replicate> {
    // The parameterization and its corrupted cells depend only on `param`,
    // so every sweep point shares them.
    let param_seed = master.derive("param", param as u64);
    let base = draw_model_parameters(groups, config.prior, param_seed)?;
    let corrupted = corrupt_parameters(&base, groups, corruption, config.prior, param_seed.derive("corrupt", 0))?;
    let rep_seed = param_seed.derive("rep", rep as u64);
    let perturbed = perturb_parameters(&corrupted.model, setting.relative_sd, setting.mode, rep_seed.derive("perturb", 0))?;
    let population = (0..config.graphs_per_population)
        .map(|s| {
            let model = perturbed.realize(s);
            sample_summary(&model, tau, config.sampler, rep_seed.derive("graph", s as u64))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut global_rejections = 0;
    let mut bics = Vec::with_capacity(population.len());
    for summary in &population {
        if wilks_global(summary, groups)?.rejects(config.alpha) {
            global_rejections += 1;
        }
        bics.push(bic_delta(summary, groups)?.delta);
    }
    let reports = methods
        .iter()
        .map(|&m| {
            let report = run_tests(&population, groups, m, config.alpha)?;
            Ok((report.rejection_fraction(), report.rejection_matrix, report.p_profile))
        })
        .collect::<Result<_>>()?;
    Ok(Replicate {
        global_rejections,
        bics,
        reports,
    })
}

fn sample_summary(model: &FlatModel, tau: &Membership, sampler: Sampler, seed: Seed) -> Result<BlockSummary> {
    match sampler {
        Sampler::Dyad => summarize(&sample_conditional_sbm(model, tau, seed)?),
        Sampler::Summary => sample_block_summary(model, seed),
    }
}

fn summarize_point(
    corruption: usize,
    parameters: usize,
    setting: PerturbationSetting,
    reps: &[Replicate],
    methods: &[Method],
    k: usize,
    graphs: usize,
) -> SweepPoint {
    let mut bics: Vec<f64> = reps.iter().flat_map(|r| r.bics.iter().copied()).collect();
    let graph_total = (reps.len() * graphs) as f64;
    let rejections: usize = reps.iter().map(|r| r.global_rejections).sum();
    let (mean, sd) = mean_sd(&bics);
    bics.sort_by(f64::total_cmp);
    let negative = bics.iter().filter(|&&b| b < 0.0).count();

    let methods = methods
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            let mut reject_rate = vec![vec![0.0; k]; k];
            for r in reps {
                for (row, codes) in reject_rate.iter_mut().zip(&r.reports[j].1) {
                    for (v, &c) in row.iter_mut().zip(codes) {
                        if c == 1 {
                            *v += 1.0;
                        }
                    }
                }
            }
            let n = reps.len().max(1) as f64;
            reject_rate.iter_mut().flatten().for_each(|v| *v /= n);
            let (example_matrix, example_profile) = reps
                .first()
                .map(|r| (r.reports[j].1.clone(), r.reports[j].2.clone()))
                .unwrap_or_default();
            MethodSummary {
                method,
                mean_rejection_fraction: ratio(reps.iter().map(|r| r.reports[j].0).sum(), reps.len() as f64),
                reject_rate,
                example_matrix,
                example_profile,
            }
        })
        .collect();

    SweepPoint {
        corruption,
        fraction_corrupted: ratio(corruption as f64, parameters as f64),
        relative_sd: setting.relative_sd,
        mode: setting.mode,
        replicates: reps.len(),
        global_rejection_rate: ratio(rejections as f64, graph_total),
        mean_bic: mean,
        bic_sd: sd,
        bic_low: quantile(&bics, 0.05),
        bic_high: quantile(&bics, 0.95),
        bic_negative_fraction: ratio(negative as f64, bics.len() as f64),
        methods,
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        n => {
            let h = q * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}
