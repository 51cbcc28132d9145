//! Combining M per-center statistics or p-values into one decision:
//! max/sum/mean of statistics, min/max of p-values, the Fisher log
//! combination, and the Bonferroni and Hommel global tests.
//!
//! Combined statistics and combined p-values are not valid p-values by
//! themselves; they are calibrated by the permutation engine. The
//! Bonferroni and Hommel rules are the exception: they produce a final
//! p-value directly, valid under arbitrary dependence between centers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoolingRule {
    /// Maximum per-center statistic; permutation-calibrated.
    MaxStat,
    /// Minimum per-center p-value; permutation-calibrated.
    MinP,
    /// Sum of per-center statistics; permutation-calibrated.
    SumStat,
    /// Fisher combination −2Σlog pᵢ; permutation-calibrated.
    FisherLogP,
    /// Maximum per-center p-value; permutation-calibrated.
    MaxP,
    /// M·p₍₁₎ capped at 1; a final p-value, no permutation.
    BonferroniGlobal,
    /// min over j of M·C_M·p₍ⱼ₎/j capped at 1; a final p-value.
    HommelGlobal,
    /// Mean per-center statistic; permutation-calibrated.
    MeanStat,
}

impl PoolingRule {
    pub fn id(&self) -> &'static str {
        match self {
            PoolingRule::MaxStat => "maxstat",
            PoolingRule::MinP => "minp",
            PoolingRule::SumStat => "sumstat",
            PoolingRule::FisherLogP => "fisher",
            PoolingRule::MaxP => "maxp",
            PoolingRule::BonferroniGlobal => "bonferroni",
            PoolingRule::HommelGlobal => "hommel",
            PoolingRule::MeanStat => "meanstat",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Some(match s {
            "maxstat" => PoolingRule::MaxStat,
            "minp" => PoolingRule::MinP,
            "sumstat" => PoolingRule::SumStat,
            "fisher" => PoolingRule::FisherLogP,
            "maxp" => PoolingRule::MaxP,
            "bonferroni" => PoolingRule::BonferroniGlobal,
            "hommel" => PoolingRule::HommelGlobal,
            "meanstat" => PoolingRule::MeanStat,
            _ => return None,
        })
    }

    /// Whether the pooled quantity is already a final p-value (global
    /// tests) rather than a statistic in need of permutation calibration.
    pub fn is_global(&self) -> bool {
        matches!(self, PoolingRule::BonferroniGlobal | PoolingRule::HommelGlobal)
    }

    /// Whether the pooled value operates on p-values (as opposed to raw
    /// statistics).
    pub fn uses_pvalues(&self) -> bool {
        !matches!(
            self,
            PoolingRule::MaxStat | PoolingRule::SumStat | PoolingRule::MeanStat
        )
    }

    /// Direction of the rejection region for permutation calibration:
    /// true when larger pooled values are more extreme.
    pub fn rejects_for_large(&self) -> bool {
        !matches!(self, PoolingRule::MinP | PoolingRule::MaxP)
    }
}

impl std::fmt::Display for PoolingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

fn require_nonempty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        Err(Error::EmptyInput)
    } else {
        Ok(())
    }
}

fn require_pvalues(pvals: &[f64]) -> Result<()> {
    require_nonempty(pvals)?;
    for &p in pvals {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::OutOfRangeP { value: p });
        }
    }
    Ok(())
}

pub fn max_stat(stats: &[f64]) -> Result<f64> {
    require_nonempty(stats)?;
    Ok(stats.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

pub fn sum_stat(stats: &[f64]) -> Result<f64> {
    require_nonempty(stats)?;
    Ok(stats.iter().sum())
}

pub fn mean_stat(stats: &[f64]) -> Result<f64> {
    Ok(sum_stat(stats)? / stats.len() as f64)
}

pub fn min_p(pvals: &[f64]) -> Result<f64> {
    require_pvalues(pvals)?;
    Ok(pvals.iter().cloned().fold(f64::INFINITY, f64::min))
}

pub fn max_p(pvals: &[f64]) -> Result<f64> {
    require_pvalues(pvals)?;
    Ok(pvals.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// Fisher combination −2Σlog pᵢ. p = 0 is rejected; permutation p-values
/// are at least 1/(B+1), so it cannot occur on the calibration path.
pub fn fisher_log(pvals: &[f64]) -> Result<f64> {
    require_pvalues(pvals)?;
    Ok(-2.0 * pvals.iter().map(|p| p.ln()).sum::<f64>())
}

/// Bonferroni global test: min(1, M·p₍₁₎). This is a final p-value.
pub fn bonferroni_global(pvals: &[f64]) -> Result<f64> {
    let m = pvals.len() as f64;
    Ok((m * min_p(pvals)?).min(1.0))
}

/// Hommel global test: min(1, min over j of M·C_M·p₍ⱼ₎/j) with
/// C_M = Σ_{l=1..M} 1/l. Valid under arbitrary dependence.
pub fn hommel_global(pvals: &[f64]) -> Result<f64> {
    require_pvalues(pvals)?;
    let m = pvals.len();
    let c_m: f64 = (1..=m).map(|l| 1.0 / l as f64).sum();
    let mut sorted = pvals.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let mf = m as f64;
    let best = sorted
        .iter()
        .enumerate()
        .map(|(idx, &p)| mf * c_m * p / (idx + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(best.min(1.0))
}

/// Evaluate a rule against per-center statistics and p-values. Global rules
/// return their final p-value as the pooled value.
pub fn pool(rule: PoolingRule, stats: &[f64], pvals: &[f64]) -> Result<f64> {
    match rule {
        PoolingRule::MaxStat => max_stat(stats),
        PoolingRule::SumStat => sum_stat(stats),
        PoolingRule::MeanStat => mean_stat(stats),
        PoolingRule::MinP => min_p(pvals),
        PoolingRule::MaxP => max_p(pvals),
        PoolingRule::FisherLogP => fisher_log(pvals),
        PoolingRule::BonferroniGlobal => bonferroni_global(pvals),
        PoolingRule::HommelGlobal => hommel_global(pvals),
    }
}
