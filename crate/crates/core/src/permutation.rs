//! Permutation calibration: group-label permutation for K-sample problems,
//! pairing permutation for independence problems, and an exact full
//! enumeration path for tiny N.
//!
//! Permutation b draws its RNG seed as `derive_seed(master_seed, b)`, so
//! results are bit-identical for any execution order or thread count. The
//! p-value convention is (1 + #{b : T_b ≥ T_obs})/(B + 1); the add-one
//! accounts for the identity permutation exactly once and keeps p > 0.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{LabeledDataset, PairedDataset};

/// Default cap on the number of assignments exact mode will enumerate.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

/// SplitMix64 finalizer; the documented 64-bit mix behind all seed
/// derivation in this crate.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `stream` of `master`: splitmix64(master ^ splitmix64(stream)).
/// Stream 0 is reserved for center generation; permutation b uses stream b.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    /// Shuffle the group labels; observations stay put.
    LabelPermute,
    /// Re-pair x-row i with y-row π(i); the x-block is untouched.
    PairPermute,
}

#[derive(Debug, Clone)]
pub struct PermutationPlan {
    pub mode: PermutationMode,
    pub b: usize,
    pub master_seed: u64,
    /// Enumerate all distinct assignments instead of sampling B of them.
    pub exact: bool,
    pub exact_cap: u64,
}

impl PermutationPlan {
    pub fn monte_carlo(mode: PermutationMode, b: usize, master_seed: u64) -> Self {
        Self {
            mode,
            b,
            master_seed,
            exact: false,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    pub fn exact(mode: PermutationMode) -> Self {
        Self {
            mode,
            b: 1,
            master_seed: 0,
            exact: true,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.exact && self.b < 1 {
            return Err(Error::InvalidPlan {
                reason: format!("B must be >= 1, got {}", self.b),
            });
        }
        Ok(())
    }
}

/// Result of one calibration run.
#[derive(Debug, Clone)]
pub struct PermutationOutcome {
    pub p_value: f64,
    pub observed: f64,
    /// Permuted (or enumerated) statistic values, exportable for
    /// diagnostics. Monte Carlo mode: index b-1 holds permutation b.
    pub null_sample: Vec<f64>,
}

fn pvalue_from_null(observed: f64, null_sample: &[f64], exact: bool) -> f64 {
    let ge = null_sample.iter().filter(|&&t| t >= observed).count();
    if exact {
        // the identity assignment is part of the enumeration
        ge as f64 / null_sample.len() as f64
    } else {
        (1 + ge) as f64 / (null_sample.len() + 1) as f64
    }
}

/// Calibrate a K-sample statistic by label permutation (or exact
/// enumeration when the plan says so).
pub fn permutation_pvalue_k_sample<F>(
    statistic: &F,
    data: &LabeledDataset,
    plan: &PermutationPlan,
) -> Result<PermutationOutcome>
where
    F: Fn(&LabeledDataset) -> Result<f64> + Sync,
{
    plan.validate()?;
    if plan.mode != PermutationMode::LabelPermute {
        return Err(Error::InvalidPlan {
            reason: "K-sample data requires LabelPermute mode".to_string(),
        });
    }
    let observed = statistic(data)?;
    if plan.exact {
        let null_sample = enumerate_label_assignment_stats(statistic, data, plan.exact_cap)?;
        let p_value = pvalue_from_null(observed, &null_sample, true);
        return Ok(PermutationOutcome {
            p_value,
            observed,
            null_sample,
        });
    }
    let null_sample: Vec<f64> = (1..=plan.b)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.master_seed, b as u64));
            let mut labels = data.labels().to_vec();
            labels.shuffle(&mut rng);
            let permuted = data.with_labels(labels)?;
            statistic(&permuted)
        })
        .collect::<Result<Vec<f64>>>()?;
    let p_value = pvalue_from_null(observed, &null_sample, false);
    Ok(PermutationOutcome {
        p_value,
        observed,
        null_sample,
    })
}

/// Calibrate an independence statistic by pairing permutation.
pub fn permutation_pvalue_independence<F>(
    statistic: &F,
    data: &PairedDataset,
    plan: &PermutationPlan,
) -> Result<PermutationOutcome>
where
    F: Fn(&PairedDataset) -> Result<f64> + Sync,
{
    plan.validate()?;
    if plan.mode != PermutationMode::PairPermute {
        return Err(Error::InvalidPlan {
            reason: "independence data requires PairPermute mode".to_string(),
        });
    }
    let observed = statistic(data)?;
    if plan.exact {
        let null_sample = enumerate_pairing_stats(statistic, data, plan.exact_cap)?;
        let p_value = pvalue_from_null(observed, &null_sample, true);
        return Ok(PermutationOutcome {
            p_value,
            observed,
            null_sample,
        });
    }
    let null_sample: Vec<f64> = (1..=plan.b)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.master_seed, b as u64));
            let mut pairing: Vec<usize> = (0..data.n()).collect();
            pairing.shuffle(&mut rng);
            let permuted = data.with_pairing(&pairing)?;
            statistic(&permuted)
        })
        .collect::<Result<Vec<f64>>>()?;
    let p_value = pvalue_from_null(observed, &null_sample, false);
    Ok(PermutationOutcome {
        p_value,
        observed,
        null_sample,
    })
}

/// Exact two-sample (more generally K-sample) p-value by full enumeration
/// of the distinct label assignments: p = #{assignments with T ≥ T_obs} /
/// (number of assignments).
pub fn exact_two_sample_pvalue<F>(
    statistic: &F,
    data: &LabeledDataset,
    cap: u64,
) -> Result<PermutationOutcome>
where
    F: Fn(&LabeledDataset) -> Result<f64> + Sync,
{
    let observed = statistic(data)?;
    let null_sample = enumerate_label_assignment_stats(statistic, data, cap)?;
    let p_value = pvalue_from_null(observed, &null_sample, true);
    Ok(PermutationOutcome {
        p_value,
        observed,
        null_sample,
    })
}

/// Number of distinct label assignments N!/(n₁!·…·n_K!), or an error when
/// it exceeds `cap`.
pub fn count_label_assignments(group_sizes: &[usize], cap: u64) -> Result<u64> {
    let mut total: u128 = 1;
    let mut placed = 0usize;
    for &size in group_sizes {
        for i in 1..=size {
            placed += 1;
            total = total * placed as u128 / i as u128; // running binomial, exact
            if total > cap as u128 {
                return Err(Error::TooManyAssignments {
                    assignments: total,
                    cap,
                });
            }
        }
    }
    Ok(total as u64)
}

fn enumerate_label_assignment_stats<F>(
    statistic: &F,
    data: &LabeledDataset,
    cap: u64,
) -> Result<Vec<f64>>
where
    F: Fn(&LabeledDataset) -> Result<f64> + Sync,
{
    let sizes = data.group_sizes().to_vec();
    let total = count_label_assignments(&sizes, cap)?;
    let mut stats = Vec::with_capacity(total as usize);
    let mut remaining = sizes;
    let mut buf = vec![0usize; data.n()];
    enumerate_rec(&mut remaining, &mut buf, 0, &mut |labels| {
        let permuted = data.with_labels(labels.to_vec())?;
        stats.push(statistic(&permuted)?);
        Ok(())
    })?;
    Ok(stats)
}

fn enumerate_rec(
    remaining: &mut Vec<usize>,
    buf: &mut Vec<usize>,
    pos: usize,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos == buf.len() {
        return f(buf);
    }
    for g in 0..remaining.len() {
        if remaining[g] > 0 {
            remaining[g] -= 1;
            buf[pos] = g + 1;
            enumerate_rec(remaining, buf, pos + 1, f)?;
            remaining[g] += 1;
        }
    }
    Ok(())
}

fn enumerate_pairing_stats<F>(statistic: &F, data: &PairedDataset, cap: u64) -> Result<Vec<f64>>
where
    F: Fn(&PairedDataset) -> Result<f64> + Sync,
{
    let n = data.n();
    let mut total: u128 = 1;
    for i in 1..=n {
        total *= i as u128;
        if total > cap as u128 {
            return Err(Error::TooManyAssignments {
                assignments: total,
                cap,
            });
        }
    }
    let mut stats = Vec::with_capacity(total as usize);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let permuted = data.with_pairing(&perm)?;
        stats.push(statistic(&permuted)?);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(stats)
}

/// Lexicographic successor; false once the last permutation is reached.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
