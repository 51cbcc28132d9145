//! Statistics implemented both directly and via their per-center
//! decompositions, serving as algebraic cross-checks for the projection
//! framework: the energy two-sample statistic and its per-observation
//! scores, the HHG independence statistic (equal to summed Thas
//! statistics over sample-point centers), and the U-statistic
//! order-lifting construction.

use std::sync::Arc;

use itertools::Itertools;
use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::model::{CenterOrigin, CenterSpec, LabeledDataset, PairedDataset, ProjectedSample};
use crate::projection::project_independence;
use crate::univariate::pearson_2x2;

fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

fn split_groups(data: &LabeledDataset) -> Result<(Vec<usize>, Vec<usize>)> {
    if data.k() != 2 {
        return Err(Error::NotTwoGroups { got: data.k() });
    }
    let g1 = (0..data.n()).filter(|&i| data.labels()[i] == 1).collect();
    let g2 = (0..data.n()).filter(|&i| data.labels()[i] == 2).collect();
    Ok((g1, g2))
}

/// Two-sample energy statistic
/// 𝓔 = N₁N₂/(N₁+N₂)·(2·B̄ − W̄₁ − W̄₂) where B̄ is the mean between-group
/// distance and W̄ᵢ the mean within-group distances (self-distances
/// included in the within means).
pub fn energy_stat(data: &LabeledDataset) -> Result<f64> {
    let (g1, g2) = split_groups(data)?;
    let y = data.y();
    let (n1, n2) = (g1.len() as f64, g2.len() as f64);
    let mut between = 0.0;
    for &l in &g1 {
        for &m in &g2 {
            between += euclidean(y.row(l), y.row(m));
        }
    }
    let mut within1 = 0.0;
    for &l in &g1 {
        for &m in &g1 {
            within1 += euclidean(y.row(l), y.row(m));
        }
    }
    let mut within2 = 0.0;
    for &l in &g2 {
        for &m in &g2 {
            within2 += euclidean(y.row(l), y.row(m));
        }
    }
    Ok(n1 * n2 / (n1 + n2)
        * (2.0 / (n1 * n2) * between - within1 / (n1 * n1) - within2 / (n2 * n2)))
}

/// Per-observation energy scores Sᵢ with Σᵢ Sᵢ = 𝓔:
/// Sᵢ = {mean distance of yᵢ to group 1 − mean distance to group 2}·w(i),
/// w(i) = −N₂/N for group-1 rows and +N₁/N otherwise.
pub fn energy_scores(data: &LabeledDataset) -> Result<Vec<f64>> {
    let (g1, g2) = split_groups(data)?;
    let y = data.y();
    let (n1, n2) = (g1.len() as f64, g2.len() as f64);
    let n = n1 + n2;
    let mut scores = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        let mean1 = g1.iter().map(|&m| euclidean(y.row(i), y.row(m))).sum::<f64>() / n1;
        let mean2 = g2.iter().map(|&m| euclidean(y.row(i), y.row(m))).sum::<f64>() / n2;
        let w = if data.labels()[i] == 1 { -n2 / n } else { n1 / n };
        scores.push((mean1 - mean2) * w);
    }
    Ok(scores)
}

/// HHG independence statistic: ΣᵢΣ_{j≠i} S(i,j), where S(i,j) is the
/// Pearson score of the 2×2 table classifying the N−2 points k ∉ {i,j} by
/// I(‖x_k−x_i‖ ≤ ‖x_j−x_i‖) and I(‖y_k−y_i‖ ≤ ‖y_j−y_i‖).
pub fn hhg_stat(data: &PairedDataset) -> Result<f64> {
    let n = data.n();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let dx = pairwise_distances(data.x().view());
    let dy = pairwise_distances(data.y().view());
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let (rx, ry) = (dx[i][j], dy[i][j]);
            let (mut a, mut b, mut c, mut d) = (0u64, 0u64, 0u64, 0u64);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                match (dx[i][k] <= rx, dy[i][k] <= ry) {
                    (true, true) => a += 1,
                    (true, false) => b += 1,
                    (false, true) => c += 1,
                    (false, false) => d += 1,
                }
            }
            total += pearson_2x2(a, b, c, d);
        }
    }
    Ok(total)
}

fn pairwise_distances(m: ndarray::ArrayView2<f64>) -> Vec<Vec<f64>> {
    let n = m.nrows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = euclidean(m.row(i), m.row(j));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Σᵢ thas_sum over sample-point centers; the decomposed route that must
/// equal [`hhg_stat`]. Needs N ≥ 4 so each leave-one-out sample has at
/// least 3 points.
pub fn summed_thas_over_sample_points(data: &PairedDataset) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..data.n() {
        let center = CenterSpec::independence(
            data.x().row(i).to_owned(),
            data.y().row(i).to_owned(),
        )
        .with_origin(CenterOrigin::SamplePoint(i));
        let proj = project_independence(&center, data)?;
        total += crate::univariate::thas_sum(&proj)?.value;
    }
    Ok(total)
}

type KernelFn = dyn Fn(&[(f64, f64)]) -> f64 + Send + Sync;

/// A symmetric kernel of order m over paired univariate points; the
/// building block of a univariate U-statistic.
#[derive(Clone)]
pub struct KernelSpec {
    pub order: usize,
    eval: Arc<KernelFn>,
}

impl KernelSpec {
    pub fn new(order: usize, eval: impl Fn(&[(f64, f64)]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            order,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, points: &[(f64, f64)]) -> f64 {
        debug_assert_eq!(points.len(), self.order);
        (self.eval)(points)
    }
}

/// The order-(m+1) kernel produced by lifting an order-m univariate
/// kernel to multivariate paired data: each point of the subset acts as
/// the center in turn, the other m points are projected to distances from
/// it, and h is averaged over the m+1 choices.
#[derive(Clone)]
pub struct LiftedKernel {
    pub order: usize,
    base: KernelSpec,
}

impl LiftedKernel {
    /// Evaluate on the rows of `data` indexed by `subset`
    /// (subset length = order = m+1).
    pub fn eval(&self, data: &PairedDataset, subset: &[usize]) -> f64 {
        debug_assert_eq!(subset.len(), self.order);
        let m1 = subset.len();
        let mut sum = 0.0;
        let mut proj: Vec<(f64, f64)> = Vec::with_capacity(m1 - 1);
        for (ci, &c) in subset.iter().enumerate() {
            proj.clear();
            for (ki, &k) in subset.iter().enumerate() {
                if ki == ci {
                    continue;
                }
                proj.push((
                    euclidean(data.x().row(k), data.x().row(c)),
                    euclidean(data.y().row(k), data.y().row(c)),
                ));
            }
            sum += self.base.eval(&proj);
        }
        sum / m1 as f64
    }
}

/// Lift an order-m univariate kernel to the order-(m+1) multivariate
/// kernel of the sample-point-centered U-statistic construction.
pub fn u_lift(h: &KernelSpec) -> LiftedKernel {
    LiftedKernel {
        order: h.order + 1,
        base: h.clone(),
    }
}

/// U-statistic of h over paired univariate points: the average of h over
/// all size-m subsets.
pub fn u_statistic_univariate(h: &KernelSpec, points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len();
    let m = h.order;
    if n < m {
        return Err(Error::TooFewPoints { needed: m, got: n });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for subset in (0..n).combinations(m) {
        let pts: Vec<(f64, f64)> = subset.iter().map(|&i| points[i]).collect();
        sum += h.eval(&pts);
        count += 1;
    }
    Ok(sum / count as f64)
}

/// U-statistic of a lifted kernel over all size-(m+1) subsets of the data.
pub fn u_statistic_lifted(f: &LiftedKernel, data: &PairedDataset) -> Result<f64> {
    let n = data.n();
    if n < f.order {
        return Err(Error::TooFewPoints {
            needed: f.order,
            got: n,
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for subset in (0..n).combinations(f.order) {
        sum += f.eval(data, &subset);
        count += 1;
    }
    Ok(sum / count as f64)
}

/// The decomposed route: average over all sample-point centers of the
/// order-m U-statistic of h on the N−1 leave-one-out projected distances.
/// Equals the order-(m+1) U-statistic of the lifted kernel.
pub fn mean_leave_one_out_u_statistic(h: &KernelSpec, data: &PairedDataset) -> Result<f64> {
    let n = data.n();
    if n < h.order + 1 {
        return Err(Error::TooFewPoints {
            needed: h.order + 1,
            got: n,
        });
    }
    let mut sum = 0.0;
    for i in 0..n {
        let center = CenterSpec::independence(
            data.x().row(i).to_owned(),
            data.y().row(i).to_owned(),
        )
        .with_origin(CenterOrigin::SamplePoint(i));
        let proj = project_independence(&center, data)?;
        let points: Vec<(f64, f64)> = match &proj {
            ProjectedSample::Paired { dx, dy, .. } => {
                dx.iter().cloned().zip(dy.iter().cloned()).collect()
            }
            _ => unreachable!(),
        };
        sum += u_statistic_univariate(h, &points)?;
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_paired(n: usize, p: usize, q: usize, seed: u64) -> PairedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.0..1.0));
        let y = Array2::from_shape_fn((n, q), |_| rng.gen_range(-1.0..1.0));
        PairedDataset::new(x, y).unwrap()
    }

    fn random_labeled(n: usize, q: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = Array2::from_shape_fn((n, q), |_| rng.gen_range(-1.0..1.0));
        let n1 = rng.gen_range(1..n);
        let labels = (0..n).map(|i| if i < n1 { 1 } else { 2 }).collect();
        LabeledDataset::new(y, labels, 2).unwrap()
    }

    #[test]
    fn energy_single_points() {
        let y = array![[0.0], [1.0]];
        let data = LabeledDataset::new(y, vec![1, 2], 2).unwrap();
        assert!((energy_stat(&data).unwrap() - 1.0).abs() < 1e-15);
        let s = energy_scores(&data).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15);
        assert!((s[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_identical_groups_zero() {
        let y = array![[1.0, 2.0], [3.0, 4.0], [1.0, 2.0], [3.0, 4.0]];
        let data = LabeledDataset::new(y, vec![1, 1, 2, 2], 2).unwrap();
        assert!(energy_stat(&data).unwrap().abs() < 1e-12);
    }

    #[test]
    fn energy_decomposition_identity() {
        for seed in 0..10 {
            let data = random_labeled(20, 3, seed);
            let e = energy_stat(&data).unwrap();
            let s: f64 = energy_scores(&data).unwrap().iter().sum();
            assert!((e - s).abs() < 1e-10, "E={e} vs sum={s}");
        }
    }

    #[test]
    fn energy_score_zero_for_equidistant_row() {
        // row 0 has mean distance 0.75 to both groups
        let y = array![[0.0, 0.0], [1.5, 0.0], [0.0, 0.5], [0.0, 1.0]];
        let data = LabeledDataset::new(y, vec![1, 1, 2, 2], 2).unwrap();
        let s = energy_scores(&data).unwrap();
        assert!(s[0].abs() < 1e-12, "S_0 = {}", s[0]);
    }

    #[test]
    fn hhg_three_points_hand_enumeration() {
        // every table classifies a single point, so some margin is always
        // zero and every score is 0
        let x = array![[0.0], [1.0], [3.0]];
        let y = array![[0.5], [2.0], [1.0]];
        let data = PairedDataset::new(x, y).unwrap();
        assert_eq!(hhg_stat(&data).unwrap(), 0.0);
    }

    #[test]
    fn hhg_equals_summed_thas() {
        for seed in 0..8 {
            let n = 4 + (seed as usize % 12);
            let data = random_paired(n, 2, 2, seed);
            let direct = hhg_stat(&data).unwrap();
            let decomposed = summed_thas_over_sample_points(&data).unwrap();
            assert!(
                (direct - decomposed).abs() < 1e-10,
                "n={n}: {direct} vs {decomposed}"
            );
        }
    }

    #[test]
    fn hhg_invariant_under_block_scaling() {
        // scaling the x-block is a monotone transform of all x-distances
        let data = random_paired(12, 2, 2, 99);
        let direct = hhg_stat(&data).unwrap();
        let scaled = PairedDataset::new(data.x() * 3.5, data.y().clone()).unwrap();
        assert!((hhg_stat(&scaled).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn lift_order_one_sum_kernel() {
        let h = KernelSpec::new(1, |p| p[0].0 + p[0].1);
        let f = u_lift(&h);
        assert_eq!(f.order, 2);
        let x = array![[0.0], [3.0]];
        let y = array![[0.0], [4.0]];
        let data = PairedDataset::new(x, y).unwrap();
        // symmetry collapses the average: f = ‖x2−x1‖ + ‖y2−y1‖ = 3 + 4
        assert!((f.eval(&data, &[0, 1]) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn lifted_u_statistic_equals_mean_loo() {
        let kernels = vec![
            KernelSpec::new(1, |p: &[(f64, f64)]| p[0].0 + 2.0 * p[0].1),
            KernelSpec::new(2, |p: &[(f64, f64)]| {
                (p[0].0 - p[1].0).abs() * (p[0].1 - p[1].1).abs()
            }),
        ];
        for h in &kernels {
            for seed in 0..5 {
                let data = random_paired(6, 2, 1, seed + 50);
                let f = u_lift(h);
                let lifted = u_statistic_lifted(&f, &data).unwrap();
                let loo = mean_leave_one_out_u_statistic(h, &data).unwrap();
                assert!((lifted - loo).abs() < 1e-12, "{lifted} vs {loo}");
            }
        }
    }

    #[test]
    fn lifted_kernel_argument_permutation_invariant() {
        let h = KernelSpec::new(2, |p: &[(f64, f64)]| {
            (p[0].0 - p[1].0).abs() + (p[0].1 - p[1].1).powi(2)
        });
        let f = u_lift(&h);
        let data = random_paired(8, 2, 2, 7);
        let base = f.eval(&data, &[1, 4, 6]);
        for perm in [[4, 1, 6], [6, 4, 1], [1, 6, 4], [4, 6, 1], [6, 1, 4]] {
            assert!((f.eval(&data, &perm) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn u_statistic_too_few_points() {
        let h = KernelSpec::new(3, |_| 0.0);
        assert!(matches!(
            u_statistic_univariate(&h, &[(0.0, 0.0), (1.0, 1.0)]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        ));
    }
}
