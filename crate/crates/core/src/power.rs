//! Monte Carlo level and power studies over a grid of sample sizes.
//!
//! Each (grid point, replication) pair owns two derived seed streams, one
//! for data generation and one for the pipeline, so reports are
//! byte-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, Scenario};
use crate::model::MethodDescriptor;
use crate::permutation::derive_seed;
use crate::pipeline::{run_pipeline_multi, PipelineConfig};
use crate::pooling::PoolingRule;
use crate::projection::CenterStrategy;
use crate::univariate::TestId;

const DATA_STREAM: u64 = 1 << 60;
const PIPELINE_STREAM: u64 = 2 << 60;

/// A simulation scenario: the generator, the replication count, and the
/// grid of per-group (or per-pair) sample sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub replications: usize,
    pub n_grid: Vec<usize>,
}

impl ScenarioSpec {
    fn validate(&self, config: &PipelineConfig) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidScenario {
                reason: "need at least one replication".to_string(),
            });
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidScenario {
                reason: "empty sample-size grid".to_string(),
            });
        }
        // leave-one-out projection removes one point per center
        let loo = matches!(config.center_strategy, CenterStrategy::SamplePoints) as usize;
        let min_n = match config.univariate {
            TestId::HoeffdingD => 5 + loo,
            TestId::ThasSum => 3 + loo,
            TestId::Ks | TestId::Cvm | TestId::KruskalWallis => 2,
        };
        if let Some(&bad) = self.n_grid.iter().find(|&&n| n < min_n) {
            return Err(Error::InvalidScenario {
                reason: format!(
                    "grid value {bad} below the minimum {min_n} for test {}",
                    config.univariate
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: usize,
    pub replications: usize,
    pub rejections: usize,
    pub rate: f64,
    /// Binomial standard error; absent (undefined) when R = 1.
    pub mc_se: Option<f64>,
}

/// Deterministic study report: no wall-clock fields, so identical inputs
/// produce byte-identical serializations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerReport {
    pub scenario: String,
    pub method: MethodDescriptor,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub rows: Vec<PowerRow>,
}

/// Rejection rate (p ≤ α) per grid point for the configured pipeline.
pub fn power_study(config: &PipelineConfig, spec: &ScenarioSpec) -> Result<PowerReport> {
    let mut reports = power_study_multi(config, &[config.pooling], spec)?;
    Ok(reports.remove(0))
}

/// Power study across several pooling rules at once; the per-center
/// statistic matrix of each replication is shared between rules.
pub fn power_study_multi(
    config: &PipelineConfig,
    rules: &[PoolingRule],
    spec: &ScenarioSpec,
) -> Result<Vec<PowerReport>> {
    config.validate()?;
    spec.validate(config)?;
    if rules.is_empty() {
        return Err(Error::EmptyInput);
    }
    let r = spec.replications;
    let jobs: Vec<(usize, usize)> = (0..spec.n_grid.len())
        .flat_map(|g| (0..r).map(move |rep| (g, rep)))
        .collect();

    // rejected[job][rule]
    let rejected: Vec<Vec<bool>> = jobs
        .par_iter()
        .map(|&(g, rep)| {
            let stream = ((g as u64) << 24) | rep as u64;
            let data_seed = derive_seed(config.seed, DATA_STREAM ^ stream);
            let pipe_seed = derive_seed(config.seed, PIPELINE_STREAM ^ stream);
            let data = generate(&spec.scenario, spec.n_grid[g], data_seed)?;
            let mut rep_config = config.clone();
            rep_config.seed = pipe_seed;
            let reports = run_pipeline_multi(&rep_config, rules, &data)?;
            Ok(reports
                .iter()
                .map(|rep| rep.p_value <= config.alpha)
                .collect::<Vec<bool>>())
        })
        .collect::<Result<_>>()?;

    Ok(rules
        .iter()
        .enumerate()
        .map(|(ri, &rule)| {
            let rows = (0..spec.n_grid.len())
                .map(|g| {
                    let rejections = jobs
                        .iter()
                        .zip(&rejected)
                        .filter(|(&(jg, _), flags)| jg == g && flags[ri])
                        .count();
                    let rate = rejections as f64 / r as f64;
                    let mc_se = if r > 1 {
                        Some((rate * (1.0 - rate) / r as f64).sqrt())
                    } else {
                        None
                    };
                    PowerRow {
                        n: spec.n_grid[g],
                        replications: r,
                        rejections,
                        rate,
                        mc_se,
                    }
                })
                .collect();
            PowerReport {
                scenario: spec.scenario.id(),
                method: MethodDescriptor {
                    problem: config.problem.id().to_string(),
                    center_strategy: config.center_strategy.id(),
                    univariate: config.univariate.id().to_string(),
                    pooling: rule.id().to_string(),
                    pooling_b: if rule.is_global() { 0 } else { config.b },
                },
                alpha: config.alpha,
                b: config.b,
                seed: config.seed,
                rows,
            }
        })
        .collect())
}
