//! The end-to-end test pipeline: generate centers, project, apply the
//! univariate test per center, calibrate by permutation, pool.
//!
//! Centers are generated once from the master seed (sub-stream 0) and held
//! fixed across permutations. Each permutation recomputes the full set of
//! per-center statistics; projections are cached, so only the label vector
//! (K-sample) or the pairing (independence) moves. Per-center p-values and
//! the pooled p-value are taken from the same family of B+1 exchangeable
//! assignments (the observed one plus B permutations), which keeps the
//! add-one convention exact.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::GeneratedData;
use crate::model::{
    CenterOrigin, CenterPoint, CenterResult, CenterSpec, LabeledDataset, MethodDescriptor,
    PairedDataset, TestReport,
};
use crate::permutation::{count_label_assignments, derive_seed, DEFAULT_EXACT_CAP};
use crate::pooling::{pool, PoolingRule};
use crate::projection::{distances_from, CenterStrategy};
use crate::univariate::{
    argsort, cvm_sweep, hoeffding_d_pairs, ks_sweep, kw_from_ranks, midranks, thas_sum_pairs,
    tie_correction, TestId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    TwoSample,
    KSample,
    Independence,
}

impl Problem {
    pub fn id(&self) -> &'static str {
        match self {
            Problem::TwoSample => "two-sample",
            Problem::KSample => "k-sample",
            Problem::Independence => "independence",
        }
    }
}

/// The two-step procedure made concrete: projection strategy, univariate
/// test, pooling rule, and calibration budget.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub problem: Problem,
    pub center_strategy: CenterStrategy,
    pub univariate: TestId,
    pub pooling: PoolingRule,
    /// Permutation budget for Monte Carlo calibration.
    pub b: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Enumerate every distinct assignment instead of sampling B.
    pub exact: bool,
    pub exact_cap: u64,
}

impl PipelineConfig {
    pub fn new(
        problem: Problem,
        center_strategy: CenterStrategy,
        univariate: TestId,
        pooling: PoolingRule,
        b: usize,
        seed: u64,
    ) -> Self {
        Self {
            problem,
            center_strategy,
            univariate,
            pooling,
            b,
            seed,
            alpha: 0.05,
            exact: false,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("alpha must be in (0,1), got {}", self.alpha),
            });
        }
        if !self.exact && self.b < 1 {
            return Err(Error::InvalidConfig {
                reason: format!("B must be >= 1, got {}", self.b),
            });
        }
        let compatible = match self.problem {
            Problem::TwoSample => {
                matches!(self.univariate, TestId::Ks | TestId::Cvm | TestId::KruskalWallis)
            }
            Problem::KSample => matches!(self.univariate, TestId::KruskalWallis),
            Problem::Independence => {
                matches!(self.univariate, TestId::HoeffdingD | TestId::ThasSum)
            }
        };
        if !compatible {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "univariate test {} is not defined for the {} problem",
                    self.univariate,
                    self.problem.id()
                ),
            });
        }
        Ok(())
    }

    fn method(&self, rule: PoolingRule, pooling_b: usize) -> MethodDescriptor {
        MethodDescriptor {
            problem: self.problem.id().to_string(),
            center_strategy: self.center_strategy.id(),
            univariate: self.univariate.id().to_string(),
            pooling: rule.id().to_string(),
            pooling_b,
        }
    }
}

/// Run the configured pipeline and produce a full report.
pub fn run_pipeline(config: &PipelineConfig, data: &GeneratedData) -> Result<TestReport> {
    let mut reports = run_pipeline_multi(config, &[config.pooling], data)?;
    Ok(reports.remove(0))
}

/// Run the pipeline once and pool the same per-center results under
/// several rules; the per-center statistic matrix is shared, so sweeping
/// pooling rules costs nothing extra.
pub fn run_pipeline_multi(
    config: &PipelineConfig,
    rules: &[PoolingRule],
    data: &GeneratedData,
) -> Result<Vec<TestReport>> {
    config.validate()?;
    if rules.is_empty() {
        return Err(Error::EmptyInput);
    }
    let start = std::time::Instant::now();
    let (matrix, centers, reported_b) = match (config.problem, data) {
        (Problem::TwoSample | Problem::KSample, GeneratedData::KSample(d)) => {
            if config.problem == Problem::TwoSample && d.k() != 2 {
                return Err(Error::InvalidConfig {
                    reason: format!("two-sample problem with K = {}", d.k()),
                });
            }
            k_sample_matrix(config, d)?
        }
        (Problem::Independence, GeneratedData::Independence(d)) => {
            independence_matrix(config, d)?
        }
        _ => {
            return Err(Error::InvalidConfig {
                reason: "dataset kind does not match the configured problem".to_string(),
            });
        }
    };
    let pooled = pool_reports(config, rules, &matrix, &centers, reported_b)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    Ok(pooled
        .into_iter()
        .map(|mut r| {
            r.runtime_ms = runtime_ms;
            r
        })
        .collect())
}

/// Per-center statistic matrix: `matrix[center][v]` where v = 0 is the
/// observed assignment and v = 1.. are permutations (or the full
/// enumeration in exact mode).
type StatMatrix = Vec<Vec<f64>>;

fn k_sample_matrix(
    config: &PipelineConfig,
    data: &LabeledDataset,
) -> Result<(StatMatrix, Vec<CenterSpec>, usize)> {
    let centers = crate::projection::sample_centers(
        &config.center_strategy,
        &data.into(),
        derive_seed(config.seed, 0),
    )?;
    let caches: Vec<TwoSampleCenterCache> = centers
        .iter()
        .map(|c| TwoSampleCenterCache::build(c, data, config.univariate))
        .collect::<Result<_>>()?;

    let eval = |labels: &[usize]| -> Vec<f64> {
        caches
            .iter()
            .map(|cache| cache.statistic(labels, data.k(), config.univariate))
            .collect()
    };

    let observed = eval(data.labels());
    let (columns, reported_b): (Vec<Vec<f64>>, usize) = if config.exact {
        // enumerate every distinct assignment, skipping the observed one:
        // it already sits at column v = 0, so the family of columns is the
        // full assignment set without duplication
        let total = count_label_assignments(data.group_sizes(), config.exact_cap)? as usize;
        let mut cols = Vec::with_capacity(total - 1);
        let mut remaining = data.group_sizes().to_vec();
        let mut buf = vec![0usize; data.n()];
        enumerate_labels(&mut remaining, &mut buf, 0, &mut |labels| {
            if labels != data.labels() {
                cols.push(eval(labels));
            }
        });
        (cols, total)
    } else {
        let cols = (1..=config.b)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, b as u64));
                let mut labels = data.labels().to_vec();
                labels.shuffle(&mut rng);
                eval(&labels)
            })
            .collect();
        (cols, config.b)
    };

    let mut matrix = vec![Vec::with_capacity(columns.len() + 1); centers.len()];
    for (ci, m) in matrix.iter_mut().enumerate() {
        m.push(observed[ci]);
        for col in &columns {
            m.push(col[ci]);
        }
    }
    Ok((matrix, centers, reported_b))
}

fn enumerate_labels(
    remaining: &mut Vec<usize>,
    buf: &mut Vec<usize>,
    pos: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if pos == buf.len() {
        f(buf);
        return;
    }
    for g in 0..remaining.len() {
        if remaining[g] > 0 {
            remaining[g] -= 1;
            buf[pos] = g + 1;
            enumerate_labels(remaining, buf, pos + 1, f);
            remaining[g] += 1;
        }
    }
}

struct TwoSampleCenterCache {
    /// Original row indices in ascending-distance order (excluded row
    /// dropped for sample-point centers).
    rows_sorted: Vec<usize>,
    dist_sorted: Vec<f64>,
    /// Midranks aligned with `rows_sorted`; only built for Kruskal–Wallis.
    midrank_sorted: Vec<f64>,
    tie_corr: f64,
}

impl TwoSampleCenterCache {
    fn build(center: &CenterSpec, data: &LabeledDataset, test: TestId) -> Result<Self> {
        let z = match &center.point {
            CenterPoint::TwoSample(z) => z,
            CenterPoint::Independence { .. } => {
                return Err(Error::DimensionMismatch {
                    context: "independence center in a K-sample pipeline".to_string(),
                })
            }
        };
        let excluded = match center.origin {
            CenterOrigin::SamplePoint(i) => Some(i),
            _ => None,
        };
        let all = distances_from(z.view(), data.y().view())?;
        let mut rows: Vec<usize> = (0..data.n()).filter(|&i| Some(i) != excluded).collect();
        let dist: Vec<f64> = rows.iter().map(|&i| all[i]).collect();
        let order = argsort(&dist);
        rows = order.iter().map(|&j| rows[j]).collect();
        let dist_sorted: Vec<f64> = order.iter().map(|&j| dist[j]).collect();
        let (midrank_sorted, tie_corr) = if test == TestId::KruskalWallis {
            (midranks(&dist_sorted), tie_correction(&dist_sorted))
        } else {
            (Vec::new(), 1.0)
        };
        Ok(Self {
            rows_sorted: rows,
            dist_sorted,
            midrank_sorted,
            tie_corr,
        })
    }

    fn statistic(&self, labels: &[usize], k: usize, test: TestId) -> f64 {
        let gathered: Vec<usize> = self.rows_sorted.iter().map(|&r| labels[r]).collect();
        match test {
            TestId::Ks | TestId::Cvm => {
                let n1 = gathered.iter().filter(|&&l| l == 1).count();
                let n2 = gathered.len() - n1;
                if test == TestId::Ks {
                    ks_sweep(&self.dist_sorted, &gathered, n1, n2)
                } else {
                    cvm_sweep(&self.dist_sorted, &gathered, n1, n2)
                }
            }
            TestId::KruskalWallis => {
                kw_from_ranks(&self.midrank_sorted, &gathered, k, self.tie_corr)
            }
            TestId::HoeffdingD | TestId::ThasSum => {
                unreachable!("validated: independence tests never reach the K-sample path")
            }
        }
    }
}

enum IndepCenterCache {
    /// Center fixed in space: distance vectors are permutation-invariant,
    /// only the pairing moves.
    Fixed { dx: Vec<f64>, dy: Vec<f64> },
    /// Center is sample row i: distances come from the shared matrices
    /// and move with the pairing on the y side.
    SampleRow { row: usize },
}

struct IndepPipelineCache {
    per_center: Vec<IndepCenterCache>,
    /// Full pairwise distance matrices, built only when some center is a
    /// sample point.
    dist_x: Option<Vec<Vec<f64>>>,
    dist_y: Option<Vec<Vec<f64>>>,
    n: usize,
}

impl IndepPipelineCache {
    fn build(centers: &[CenterSpec], data: &PairedDataset) -> Result<Self> {
        let needs_matrices = centers
            .iter()
            .any(|c| matches!(c.origin, CenterOrigin::SamplePoint(_)));
        let (dist_x, dist_y) = if needs_matrices {
            (
                Some(pairwise(data.x().view())),
                Some(pairwise(data.y().view())),
            )
        } else {
            (None, None)
        };
        let per_center = centers
            .iter()
            .map(|c| {
                if let CenterOrigin::SamplePoint(row) = c.origin {
                    if row >= data.n() {
                        return Err(Error::DimensionMismatch {
                            context: format!("sample-point index {row} out of range"),
                        });
                    }
                    Ok(IndepCenterCache::SampleRow { row })
                } else {
                    match &c.point {
                        CenterPoint::Independence { zx, zy } => Ok(IndepCenterCache::Fixed {
                            dx: distances_from(zx.view(), data.x().view())?,
                            dy: distances_from(zy.view(), data.y().view())?,
                        }),
                        CenterPoint::TwoSample(_) => Err(Error::DimensionMismatch {
                            context: "K-sample center in an independence pipeline".to_string(),
                        }),
                    }
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            per_center,
            dist_x,
            dist_y,
            n: data.n(),
        })
    }

    /// Per-center statistics when x-row i is paired with y-row
    /// `pairing[i]`.
    fn statistics(&self, pairing: &[usize], test: TestId) -> Result<Vec<f64>> {
        self.per_center
            .iter()
            .map(|cache| {
                let (dx, dy): (Vec<f64>, Vec<f64>) = match cache {
                    IndepCenterCache::Fixed { dx, dy } => (
                        dx.clone(),
                        (0..self.n).map(|i| dy[pairing[i]]).collect(),
                    ),
                    IndepCenterCache::SampleRow { row } => {
                        let mx = self.dist_x.as_ref().expect("built");
                        let my = self.dist_y.as_ref().expect("built");
                        let mut dx = Vec::with_capacity(self.n - 1);
                        let mut dy = Vec::with_capacity(self.n - 1);
                        for k in 0..self.n {
                            if k == *row {
                                continue;
                            }
                            dx.push(mx[k][*row]);
                            dy.push(my[pairing[k]][pairing[*row]]);
                        }
                        (dx, dy)
                    }
                };
                match test {
                    TestId::HoeffdingD => hoeffding_d_pairs(&dx, &dy),
                    TestId::ThasSum => thas_sum_pairs(&dx, &dy),
                    _ => unreachable!("validated: K-sample tests never reach the independence path"),
                }
            })
            .collect()
    }
}

fn pairwise(m: ndarray::ArrayView2<f64>) -> Vec<Vec<f64>> {
    let n = m.nrows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m
                .row(i)
                .iter()
                .zip(m.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

fn independence_matrix(
    config: &PipelineConfig,
    data: &PairedDataset,
) -> Result<(StatMatrix, Vec<CenterSpec>, usize)> {
    let centers = crate::projection::sample_centers(
        &config.center_strategy,
        &data.into(),
        derive_seed(config.seed, 0),
    )?;
    let cache = IndepPipelineCache::build(&centers, data)?;

    let identity: Vec<usize> = (0..data.n()).collect();
    let observed = cache.statistics(&identity, config.univariate)?;

    let (columns, reported_b): (Vec<Vec<f64>>, usize) = if config.exact {
        let mut total: u128 = 1;
        for i in 1..=data.n() {
            total *= i as u128;
            if total > config.exact_cap as u128 {
                return Err(Error::TooManyAssignments {
                    assignments: total,
                    cap: config.exact_cap,
                });
            }
        }
        // skip the identity pairing: it sits at column v = 0 already
        let mut cols = Vec::with_capacity(total as usize - 1);
        let mut perm = identity.clone();
        while next_perm(&mut perm) {
            cols.push(cache.statistics(&perm, config.univariate)?);
        }
        (cols, total as usize)
    } else {
        let cols = (1..=config.b)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, b as u64));
                let mut pairing = identity.clone();
                pairing.shuffle(&mut rng);
                cache.statistics(&pairing, config.univariate)
            })
            .collect::<Result<Vec<_>>>()?;
        (cols, config.b)
    };

    let mut matrix = vec![Vec::with_capacity(columns.len() + 1); centers.len()];
    for (ci, m) in matrix.iter_mut().enumerate() {
        m.push(observed[ci]);
        for col in &columns {
            m.push(col[ci]);
        }
    }
    Ok((matrix, centers, reported_b))
}

fn next_perm(perm: &mut [usize]) -> bool {
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

/// p-values within the exchangeable family: for every column v,
/// p[center][v] = #{u : T_u ≥ T_v} / V. At v = 0 this reproduces the
/// add-one convention (the observed value counts itself once).
fn per_center_pvalues(matrix: &StatMatrix) -> Vec<Vec<f64>> {
    matrix
        .iter()
        .map(|values| {
            let mut sorted = values.clone();
            sorted.sort_unstable_by(f64::total_cmp);
            let v = values.len() as f64;
            values
                .iter()
                .map(|t| {
                    let below = sorted.partition_point(|x| x < t);
                    (sorted.len() - below) as f64 / v
                })
                .collect()
        })
        .collect()
}

fn pool_reports(
    config: &PipelineConfig,
    rules: &[PoolingRule],
    matrix: &StatMatrix,
    centers: &[CenterSpec],
    // Monte Carlo budget, or the enumeration size in exact mode
    reported_b: usize,
) -> Result<Vec<TestReport>> {
    let m = matrix.len();
    let v_total = matrix[0].len();
    let pvals = per_center_pvalues(matrix);

    let per_center: Vec<CenterResult> = (0..m)
        .map(|ci| CenterResult {
            center: (&centers[ci]).into(),
            statistic: matrix[ci][0],
            p_value: pvals[ci][0],
        })
        .collect();

    rules
        .iter()
        .map(|&rule| {
            let (statistic, p_value, pooling_b) = if rule.is_global() {
                let observed_p: Vec<f64> = (0..m).map(|ci| pvals[ci][0]).collect();
                let p = pool(rule, &[], &observed_p)?;
                (p, p, 0)
            } else {
                let mut pooled = Vec::with_capacity(v_total);
                let mut stats_col = vec![0.0; m];
                let mut pvals_col = vec![0.0; m];
                for v in 0..v_total {
                    for ci in 0..m {
                        stats_col[ci] = matrix[ci][v];
                        pvals_col[ci] = pvals[ci][v];
                    }
                    pooled.push(pool(rule, &stats_col, &pvals_col)?);
                }
                let obs = pooled[0];
                let extreme = if rule.rejects_for_large() {
                    pooled.iter().filter(|&&t| t >= obs).count()
                } else {
                    pooled.iter().filter(|&&t| t <= obs).count()
                };
                // v = 0 participates, so p ≥ 1/V; for Monte Carlo this is
                // exactly (1 + #{b : extreme}) / (B + 1)
                (obs, extreme as f64 / v_total as f64, reported_b)
            };
            Ok(TestReport {
                method: config.method(rule, pooling_b),
                statistic,
                p_value,
                per_center: per_center.clone(),
                b: reported_b,
                seed: config.seed,
                runtime_ms: 0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Scenario};
    use crate::model::LabeledDataset;
    use ndarray::{array, Array1, Array2};

    fn exact_config(test: TestId, pooling: PoolingRule) -> PipelineConfig {
        let centers = vec![CenterSpec::two_sample(Array1::zeros(1))];
        let mut c = PipelineConfig::new(
            Problem::TwoSample,
            CenterStrategy::FixedList(centers),
            test,
            pooling,
            1,
            0,
        );
        c.exact = true;
        c
    }

    #[test]
    fn identical_groups_exact_p_one() {
        // group value multisets coincide, so the observed KS is minimal
        let y = array![[1.0], [2.0], [1.0], [2.0]];
        let data = LabeledDataset::new(y, vec![1, 1, 2, 2], 2).unwrap();
        let report = run_pipeline(
            &exact_config(TestId::Ks, PoolingRule::MaxStat),
            &GeneratedData::KSample(data),
        )
        .unwrap();
        assert_eq!(report.p_value, 1.0);
        assert_eq!(report.b, 6); // 4!/(2!2!) assignments
    }

    #[test]
    fn exact_mode_counts_assignments() {
        let y = array![
            [0.1], [0.2], [0.4], [0.6], [1.9], [2.2], [2.4], [2.8]
        ];
        let data = LabeledDataset::new(y, vec![1, 1, 1, 1, 2, 2, 2, 2], 2).unwrap();
        let report = run_pipeline(
            &exact_config(TestId::Ks, PoolingRule::MaxStat),
            &GeneratedData::KSample(data),
        )
        .unwrap();
        assert_eq!(report.b, 70);
        // separated groups: observed split (or its mirror) is the most
        // extreme, p = 2/70
        assert!((report.p_value - 2.0 / 70.0).abs() < 1e-12);
    }

    #[test]
    fn bonferroni_path_skips_pooled_permutation() {
        let data = match generate(&Scenario::NullGaussian { q: 2, k: 2 }, 15, 3).unwrap() {
            GeneratedData::KSample(d) => d,
            _ => unreachable!(),
        };
        let config = PipelineConfig::new(
            Problem::TwoSample,
            CenterStrategy::UniformBoundingBox { m: 5, expansion: 0.1 },
            TestId::Ks,
            PoolingRule::BonferroniGlobal,
            99,
            11,
        );
        let report = run_pipeline(&config, &GeneratedData::KSample(data)).unwrap();
        assert_eq!(report.method.pooling_b, 0);
        assert_eq!(report.b, 99);
        assert_eq!(report.per_center.len(), 5);
        // per-center p-values remain permutation-based add-one values
        for c in &report.per_center {
            assert!(c.p_value >= 1.0 / 100.0 && c.p_value <= 1.0);
        }
        assert!(report.p_value > 0.0 && report.p_value <= 1.0);
    }

    #[test]
    fn per_center_pvalues_follow_add_one_convention() {
        let matrix = vec![vec![3.0, 1.0, 3.0, 5.0, 2.0]];
        let p = per_center_pvalues(&matrix);
        // values >= 3.0 are {3.0, 3.0, 5.0} → p = 3/5 at v=0
        assert_eq!(p[0][0], 3.0 / 5.0);
        assert_eq!(p[0][3], 1.0 / 5.0);
        assert_eq!(p[0][1], 1.0);
    }

    #[test]
    fn incompatible_test_rejected() {
        let config = PipelineConfig::new(
            Problem::Independence,
            CenterStrategy::SamplePoints,
            TestId::Ks,
            PoolingRule::MinP,
            10,
            0,
        );
        assert!(matches!(config.validate(), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn hhg_reproduced_by_sample_points_sumstat_thas() {
        let data = match generate(&Scenario::LinearDep { p: 2, q: 2, rho: 0.6 }, 12, 21).unwrap()
        {
            GeneratedData::Independence(d) => d,
            _ => unreachable!(),
        };
        let config = PipelineConfig::new(
            Problem::Independence,
            CenterStrategy::SamplePoints,
            TestId::ThasSum,
            PoolingRule::SumStat,
            19,
            5,
        );
        let report = run_pipeline(&config, &GeneratedData::Independence(data.clone())).unwrap();
        let hhg = crate::reference::hhg_stat(&data).unwrap();
        assert!(
            (report.statistic - hhg).abs() < 1e-10,
            "pooled {} vs hhg {}",
            report.statistic,
            hhg
        );
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let data = match generate(&Scenario::LocationShift { q: 2, delta: 0.8 }, 20, 7).unwrap() {
            GeneratedData::KSample(d) => d,
            _ => unreachable!(),
        };
        let config = PipelineConfig::new(
            Problem::TwoSample,
            CenterStrategy::UniformBoundingBox { m: 8, expansion: 0.1 },
            TestId::Cvm,
            PoolingRule::FisherLogP,
            200,
            42,
        );
        let gd = GeneratedData::KSample(data);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_pipeline(&config, &gd).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_pipeline(&config, &gd).unwrap());
        assert_eq!(single.statistic, multi.statistic);
        assert_eq!(single.p_value, multi.p_value);
        for (a, b) in single.per_center.iter().zip(&multi.per_center) {
            assert_eq!(a.statistic, b.statistic);
            assert_eq!(a.p_value, b.p_value);
        }
    }

    #[test]
    fn multi_rule_run_shares_per_center_results() {
        let data = match generate(&Scenario::LocationShift { q: 3, delta: 0.5 }, 25, 2).unwrap() {
            GeneratedData::KSample(d) => d,
            _ => unreachable!(),
        };
        let config = PipelineConfig::new(
            Problem::TwoSample,
            CenterStrategy::UniformBoundingBox { m: 6, expansion: 0.1 },
            TestId::Ks,
            PoolingRule::MinP,
            99,
            13,
        );
        let rules = [
            PoolingRule::MinP,
            PoolingRule::MaxStat,
            PoolingRule::SumStat,
            PoolingRule::MeanStat,
            PoolingRule::FisherLogP,
            PoolingRule::MaxP,
            PoolingRule::BonferroniGlobal,
            PoolingRule::HommelGlobal,
        ];
        let reports =
            run_pipeline_multi(&config, &rules, &GeneratedData::KSample(data)).unwrap();
        assert_eq!(reports.len(), rules.len());
        for r in &reports[1..] {
            for (a, b) in r.per_center.iter().zip(&reports[0].per_center) {
                assert_eq!(a.statistic, b.statistic);
                assert_eq!(a.p_value, b.p_value);
            }
        }
        // sum/mean pooling differ only by the fixed factor M, so their
        // permutation p-values must coincide
        let p_sum = reports.iter().find(|r| r.method.pooling == "sumstat").unwrap();
        let p_mean = reports.iter().find(|r| r.method.pooling == "meanstat").unwrap();
        assert_eq!(p_sum.p_value, p_mean.p_value);
    }

    #[test]
    fn fixed_independence_center_pipeline_runs() {
        let data = match generate(&Scenario::LinearDep { p: 1, q: 1, rho: 0.9 }, 30, 8).unwrap() {
            GeneratedData::Independence(d) => d,
            _ => unreachable!(),
        };
        let centers = vec![CenterSpec::independence(Array1::zeros(1), Array1::zeros(1))];
        let config = PipelineConfig::new(
            Problem::Independence,
            CenterStrategy::FixedList(centers),
            TestId::HoeffdingD,
            PoolingRule::MaxStat,
            99,
            17,
        );
        let report = run_pipeline(&config, &GeneratedData::Independence(data)).unwrap();
        // strong linear dependence from a centered projection should be
        // detected comfortably at B = 99
        assert!(report.p_value <= 0.05, "p = {}", report.p_value);
    }

    #[test]
    fn k_sample_kruskal_wallis_pipeline_runs() {
        let y = Array2::from_shape_fn((30, 2), |(i, j)| (i * 7 % 13) as f64 + j as f64 + (i / 10) as f64 * 3.0);
        let labels: Vec<usize> = (0..30).map(|i| 1 + i / 10).collect();
        let data = LabeledDataset::new(y, labels, 3).unwrap();
        let config = PipelineConfig::new(
            Problem::KSample,
            CenterStrategy::UniformBoundingBox { m: 4, expansion: 0.1 },
            TestId::KruskalWallis,
            PoolingRule::FisherLogP,
            49,
            23,
        );
        let report = run_pipeline(&config, &GeneratedData::KSample(data)).unwrap();
        assert_eq!(report.per_center.len(), 4);
        assert!(report.p_value > 0.0 && report.p_value <= 1.0);
    }
}
