//! Univariate test statistics applied to projected samples: two-sample
//! Kolmogorov–Smirnov and Cramér–von Mises, Kruskal–Wallis for K > 2,
//! Hoeffding's D and the Thas–Ottoy partition-sum statistic for
//! independence, and the Pearson 2×2 score.
//!
//! All statistics depend on the data only through the projected values, so
//! permutation calibration is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProjectedSample;

/// Analytic range of the classical Hoeffding D normalization (the 30×
/// rank-count formula).
pub const HOEFFDING_D_MIN: f64 = -0.5;
pub const HOEFFDING_D_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestId {
    /// Two-sample Kolmogorov–Smirnov, value in [0,1].
    Ks,
    /// Two-sample Cramér–von Mises, value ≥ 0.
    Cvm,
    /// Kruskal–Wallis (K ≥ 2 groups), value ≥ 0.
    KruskalWallis,
    /// Hoeffding's D, classical normalization, value in [-0.5, 1].
    HoeffdingD,
    /// Thas–Ottoy sum of Pearson scores over sample-induced partitions.
    ThasSum,
}

impl TestId {
    pub fn id(&self) -> &'static str {
        match self {
            TestId::Ks => "ks",
            TestId::Cvm => "cvm",
            TestId::KruskalWallis => "kw",
            TestId::HoeffdingD => "hoeffding",
            TestId::ThasSum => "thas",
        }
    }
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UnivariateStatistic {
    pub value: f64,
    pub test: TestId,
    pub n_effective: usize,
}

fn two_sample_parts(proj: &ProjectedSample) -> Result<(&[f64], &[usize])> {
    match proj {
        ProjectedSample::TwoSample {
            distances,
            labels,
            n_groups,
            ..
        } => {
            if *n_groups != 2 {
                return Err(Error::NotTwoGroups { got: *n_groups });
            }
            Ok((distances, labels))
        }
        ProjectedSample::Paired { .. } => Err(Error::NotTwoGroups { got: 0 }),
    }
}

fn paired_parts(proj: &ProjectedSample) -> Result<(&[f64], &[f64])> {
    match proj {
        ProjectedSample::Paired { dx, dy, .. } => Ok((dx, dy)),
        ProjectedSample::TwoSample { .. } => Err(Error::DimensionMismatch {
            context: "two-sample projection passed to an independence statistic".to_string(),
        }),
    }
}

/// Indices 0..n sorted by ascending value.
pub(crate) fn argsort(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Two-sample Kolmogorov–Smirnov statistic on projected distances:
/// sup over pooled sample points of |ECDF₁ − ECDF₂|. O(N log N).
pub fn ks_two_sample(proj: &ProjectedSample) -> Result<UnivariateStatistic> {
    let (d, labels) = two_sample_parts(proj)?;
    let (n1, n2) = group_counts_2(labels)?;
    let order = argsort(d);
    let dist_sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let labels_sorted: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let value = ks_sweep(&dist_sorted, &labels_sorted, n1, n2);
    Ok(UnivariateStatistic {
        value,
        test: TestId::Ks,
        n_effective: d.len(),
    })
}

/// Two-sample Cramér–von Mises statistic:
/// (N₁N₂/(N₁+N₂)²) · Σ over pooled points of (ECDF₁ − ECDF₂)².
pub fn cvm_two_sample(proj: &ProjectedSample) -> Result<UnivariateStatistic> {
    let (d, labels) = two_sample_parts(proj)?;
    let (n1, n2) = group_counts_2(labels)?;
    let order = argsort(d);
    let dist_sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let labels_sorted: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let value = cvm_sweep(&dist_sorted, &labels_sorted, n1, n2);
    Ok(UnivariateStatistic {
        value,
        test: TestId::Cvm,
        n_effective: d.len(),
    })
}

fn group_counts_2(labels: &[usize]) -> Result<(usize, usize)> {
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    let n2 = labels.len() - n1;
    if n1 == 0 || n2 == 0 {
        return Err(Error::NotTwoGroups {
            got: if labels.is_empty() { 0 } else { 1 },
        });
    }
    Ok((n1, n2))
}

/// Sweep over values sorted ascending, labels aligned. ECDFs use ≤, so the
/// difference is evaluated after each tie run. Empty groups give 0 (the
/// pipeline may hit them under leave-one-out permutations of tiny groups).
pub(crate) fn ks_sweep(dist: &[f64], labels: &[usize], n1: usize, n2: usize) -> f64 {
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let (mut c1, mut c2) = (0usize, 0usize);
    let mut best = 0.0f64;
    let n = dist.len();
    let mut i = 0;
    while i < n {
        let v = dist[i];
        while i < n && dist[i] == v {
            if labels[i] == 1 {
                c1 += 1;
            } else {
                c2 += 1;
            }
            i += 1;
        }
        let diff = (c1 as f64 / n1 as f64 - c2 as f64 / n2 as f64).abs();
        if diff > best {
            best = diff;
        }
    }
    best
}

pub(crate) fn cvm_sweep(dist: &[f64], labels: &[usize], n1: usize, n2: usize) -> f64 {
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let (mut c1, mut c2) = (0usize, 0usize);
    let mut sum = 0.0f64;
    let n = dist.len();
    let mut i = 0;
    while i < n {
        let v = dist[i];
        let start = i;
        while i < n && dist[i] == v {
            if labels[i] == 1 {
                c1 += 1;
            } else {
                c2 += 1;
            }
            i += 1;
        }
        let diff = c1 as f64 / n1 as f64 - c2 as f64 / n2 as f64;
        sum += (i - start) as f64 * diff * diff;
    }
    let nn = (n1 + n2) as f64;
    (n1 as f64) * (n2 as f64) / (nn * nn) * sum
}

/// Kruskal–Wallis statistic with midranks and the usual tie correction.
/// Defined for K ≥ 2; this is the univariate K-sample test the harness
/// uses when K > 2.
pub fn kruskal_wallis(proj: &ProjectedSample) -> Result<UnivariateStatistic> {
    match proj {
        ProjectedSample::TwoSample {
            distances,
            labels,
            n_groups,
            ..
        } => {
            let ranks = midranks(distances);
            let value = kw_from_ranks(&ranks, labels, *n_groups, tie_correction(distances));
            Ok(UnivariateStatistic {
                value,
                test: TestId::KruskalWallis,
                n_effective: distances.len(),
            })
        }
        ProjectedSample::Paired { .. } => Err(Error::DimensionMismatch {
            context: "paired projection passed to Kruskal-Wallis".to_string(),
        }),
    }
}

/// Midranks (average ranks for ties), 1-based.
pub(crate) fn midranks(values: &[f64]) -> Vec<f64> {
    let order = argsort(values);
    let mut ranks = vec![0.0; values.len()];
    let n = values.len();
    let mut i = 0;
    while i < n {
        let v = values[order[i]];
        let start = i;
        while i < n && values[order[i]] == v {
            i += 1;
        }
        let avg = (start + i + 1) as f64 / 2.0; // mean of ranks start+1..=i
        for &idx in &order[start..i] {
            ranks[idx] = avg;
        }
    }
    ranks
}

/// 1 − Σ(t³−t)/(n³−n) over tie runs; 0 when all values are equal.
pub(crate) fn tie_correction(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 1.0;
    }
    let order = argsort(values);
    let mut tie_sum = 0.0f64;
    let mut i = 0;
    while i < n {
        let v = values[order[i]];
        let start = i;
        while i < n && values[order[i]] == v {
            i += 1;
        }
        let t = (i - start) as f64;
        tie_sum += t * t * t - t;
    }
    let nf = n as f64;
    1.0 - tie_sum / (nf * nf * nf - nf)
}

/// H statistic from precomputed midranks. Empty groups are skipped; an
/// all-tied sample (correction 0) gives 0.
pub(crate) fn kw_from_ranks(ranks: &[f64], labels: &[usize], k: usize, correction: f64) -> f64 {
    let n = ranks.len();
    if n < 2 || correction <= 0.0 {
        return 0.0;
    }
    let mut sums = vec![0.0f64; k];
    let mut counts = vec![0usize; k];
    for (r, &lab) in ranks.iter().zip(labels) {
        sums[lab - 1] += r;
        counts[lab - 1] += 1;
    }
    let nf = n as f64;
    let mut term = 0.0;
    for g in 0..k {
        if counts[g] > 0 {
            term += sums[g] * sums[g] / counts[g] as f64;
        }
    }
    let h = 12.0 / (nf * (nf + 1.0)) * term - 3.0 * (nf + 1.0);
    h / correction
}

// ---------------------------------------------------------------------------
// Hoeffding's D
// ---------------------------------------------------------------------------

/// Hoeffding's D on paired projected distances, classical 30× normalization.
///
/// Uses the rank-count formula D = 30·[(n−2)(n−3)D₁ + D₂ − 2(n−2)D₃] /
/// [n(n−1)(n−2)(n−3)(n−4)] with midranks and quarter-corrections for ties,
/// computed in O(N log N) via sorting and a Fenwick-tree sweep for the
/// bivariate ranks. All rank counts are held as scaled integers (2R, 2S,
/// 4Q), so the combination is exact and reproducible.
pub fn hoeffding_d(proj: &ProjectedSample) -> Result<UnivariateStatistic> {
    let (dx, dy) = paired_parts(proj)?;
    let value = hoeffding_d_pairs(dx, dy)?;
    Ok(UnivariateStatistic {
        value,
        test: TestId::HoeffdingD,
        n_effective: dx.len(),
    })
}

/// Fast-path Hoeffding D on raw pairs.
pub fn hoeffding_d_pairs(dx: &[f64], dy: &[f64]) -> Result<f64> {
    let n = dx.len();
    if dy.len() != n {
        return Err(Error::DimensionMismatch {
            context: format!("{} x-distances vs {} y-distances", n, dy.len()),
        });
    }
    if n < 5 {
        return Err(Error::TooFewPoints { needed: 5, got: n });
    }
    let r2 = scaled_midranks(dx);
    let s2 = scaled_midranks(dy);
    let q4 = scaled_bivariate_ranks(dx, dy);
    Ok(hoeffding_from_scaled(&r2, &s2, &q4))
}

/// Combine scaled ranks into D. Shared by the fast path and the counting
/// oracle in tests.
pub(crate) fn hoeffding_from_scaled(r2: &[i64], s2: &[i64], q4: &[i64]) -> f64 {
    let n = r2.len() as i128;
    let mut d1_16: i128 = 0; // 16·D1
    let mut d2_16: i128 = 0; // 16·D2
    let mut d3_16: i128 = 0; // 16·D3
    for i in 0..r2.len() {
        let q = q4[i] as i128;
        let r = r2[i] as i128;
        let s = s2[i] as i128;
        d1_16 += (q - 4) * (q - 8);
        d2_16 += (r - 2) * (r - 4) * (s - 2) * (s - 4);
        d3_16 += (r - 4) * (s - 4) * (q - 4);
    }
    let t16 = (n - 2) * (n - 3) * d1_16 + d2_16 - 2 * (n - 2) * d3_16;
    let denom = n * (n - 1) * (n - 2) * (n - 3) * (n - 4);
    30.0 * (t16 as f64 / 16.0) / denom as f64
}

/// 2×midrank as integers: 2R_i = 2 + 2·#{x_j < x_i} + #{j≠i: x_j = x_i}.
pub(crate) fn scaled_midranks(values: &[f64]) -> Vec<i64> {
    let n = values.len();
    let order = argsort(values);
    let mut out = vec![0i64; n];
    let mut i = 0;
    while i < n {
        let v = values[order[i]];
        let start = i;
        while i < n && values[order[i]] == v {
            i += 1;
        }
        let run = (i - start) as i64;
        let below = start as i64;
        let scaled = 2 + 2 * below + (run - 1);
        for &idx in &order[start..i] {
            out[idx] = scaled;
        }
    }
    out
}

/// Dense ranks: equal values share one integer rank in 0..n_distinct.
fn dense_ranks(values: &[f64]) -> (Vec<usize>, usize) {
    let n = values.len();
    let order = argsort(values);
    let mut ranks = vec![0usize; n];
    let mut next = 0usize;
    let mut i = 0;
    while i < n {
        let v = values[order[i]];
        while i < n && values[order[i]] == v {
            ranks[order[i]] = next;
            i += 1;
        }
        next += 1;
    }
    (ranks, next)
}

struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of counts at positions 0..=i; 0 when i is "before the start".
    fn prefix(&self, i: usize) -> i64 {
        let mut i = i + 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// 4×Q_i with the quarter/half tie corrections:
/// 4Q_i = 4 + 4·#{x<,y<} + #{j≠i: x=,y=} + 2·#{x=,y<} + 2·#{x<,y=}.
///
/// Sweeps x-tie groups in ascending order; a Fenwick tree over dense
/// y-ranks holds all points with strictly smaller x.
pub(crate) fn scaled_bivariate_ranks(dx: &[f64], dy: &[f64]) -> Vec<i64> {
    let n = dx.len();
    let (yrank, ny) = dense_ranks(dy);
    let order = argsort(dx);
    let mut q4 = vec![0i64; n];
    let mut fen = Fenwick::new(ny);
    let mut i = 0;
    while i < n {
        let v = dx[order[i]];
        let start = i;
        while i < n && dx[order[i]] == v {
            i += 1;
        }
        let group = &order[start..i];
        // against points with strictly smaller x
        for &idx in group {
            let yr = yrank[idx];
            let below = if yr > 0 { fen.prefix(yr - 1) } else { 0 };
            let equal = fen.prefix(yr) - below;
            q4[idx] = 4 + 4 * below + 2 * equal;
        }
        // within the x-tie group: sort members by y-rank, count runs
        let mut members: Vec<usize> = group.to_vec();
        members.sort_unstable_by_key(|&idx| yrank[idx]);
        let mut j = 0;
        while j < members.len() {
            let yr = yrank[members[j]];
            let run_start = j;
            while j < members.len() && yrank[members[j]] == yr {
                j += 1;
            }
            let run = (j - run_start) as i64;
            let y_below_in_group = run_start as i64;
            for &idx in &members[run_start..j] {
                q4[idx] += 2 * y_below_in_group + (run - 1);
            }
        }
        for &idx in group {
            fen.add(yrank[idx]);
        }
    }
    q4
}

// ---------------------------------------------------------------------------
// Pearson 2×2 score and the Thas–Ottoy partition sum
// ---------------------------------------------------------------------------

/// Pearson score n(ad − bc)²/((a+b)(c+d)(a+c)(b+d)) for a 2×2 table;
/// 0 when any margin is 0.
pub fn pearson_2x2(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let r1 = a + b;
    let r2 = c + d;
    let c1 = a + c;
    let c2 = b + d;
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return 0.0;
    }
    let n = (a + b + c + d) as i128;
    let det = a as i128 * d as i128 - b as i128 * c as i128;
    let num = n * det * det;
    let den = r1 as u128 * r2 as u128 * c1 as u128 * c2 as u128;
    num as f64 / den as f64
}

/// Thas–Ottoy statistic: sum over partition points w = (dx[j], dy[j]) of
/// the Pearson score of the 2×2 table classifying the other points by
/// I(dx ≤ w_x), I(dy ≤ w_y).
pub fn thas_sum(proj: &ProjectedSample) -> Result<UnivariateStatistic> {
    let (dx, dy) = paired_parts(proj)?;
    let value = thas_sum_pairs(dx, dy)?;
    Ok(UnivariateStatistic {
        value,
        test: TestId::ThasSum,
        n_effective: dx.len(),
    })
}

pub fn thas_sum_pairs(dx: &[f64], dy: &[f64]) -> Result<f64> {
    let n = dx.len();
    if dy.len() != n {
        return Err(Error::DimensionMismatch {
            context: format!("{} x-distances vs {} y-distances", n, dy.len()),
        });
    }
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let mut total = 0.0;
    for j in 0..n {
        let (wx, wy) = (dx[j], dy[j]);
        let (mut a, mut b, mut c, mut d) = (0u64, 0u64, 0u64, 0u64);
        for k in 0..n {
            if k == j {
                continue;
            }
            match (dx[k] <= wx, dy[k] <= wy) {
                (true, true) => a += 1,
                (true, false) => b += 1,
                (false, true) => c += 1,
                (false, false) => d += 1,
            }
        }
        total += pearson_2x2(a, b, c, d);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn two_sample(d: Vec<f64>, labels: Vec<usize>) -> ProjectedSample {
        ProjectedSample::TwoSample {
            distances: d,
            labels,
            n_groups: 2,
            excluded_index: None,
        }
    }

    fn paired(dx: Vec<f64>, dy: Vec<f64>) -> ProjectedSample {
        ProjectedSample::Paired {
            dx,
            dy,
            excluded_index: None,
        }
    }

    #[test]
    fn ks_identical_samples_zero() {
        let p = two_sample(vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0], vec![1, 1, 1, 2, 2, 2]);
        assert!(ks_two_sample(&p).unwrap().value.abs() < TOL);
    }

    #[test]
    fn ks_disjoint_supports_one() {
        let p = two_sample(vec![1.0, 2.0, 3.0, 4.0], vec![1, 1, 2, 2]);
        assert!((ks_two_sample(&p).unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn ks_interleaved_half() {
        // ECDF differences at 1,2,3,4 are 0.5, 0, 0.5, 0.
        let p = two_sample(vec![1.0, 3.0, 2.0, 4.0], vec![1, 1, 2, 2]);
        assert!((ks_two_sample(&p).unwrap().value - 0.5).abs() < TOL);
    }

    #[test]
    fn ks_requires_two_groups() {
        let p = ProjectedSample::TwoSample {
            distances: vec![1.0, 2.0],
            labels: vec![1, 1],
            n_groups: 3,
            excluded_index: None,
        };
        assert!(matches!(ks_two_sample(&p), Err(Error::NotTwoGroups { got: 3 })));
    }

    #[test]
    fn cvm_identical_zero() {
        let p = two_sample(vec![5.0, 6.0, 5.0, 6.0], vec![1, 1, 2, 2]);
        assert!(cvm_two_sample(&p).unwrap().value.abs() < TOL);
    }

    #[test]
    fn cvm_two_points() {
        let p = two_sample(vec![1.0, 2.0], vec![1, 2]);
        assert!((cvm_two_sample(&p).unwrap().value - 0.25).abs() < TOL);
    }

    // independent brute-force routes used by the property tests below
    fn ks_brute(d: &[f64], labels: &[usize]) -> f64 {
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        let n2 = labels.len() - n1;
        d.iter()
            .map(|&w| {
                let f1 = d
                    .iter()
                    .zip(labels)
                    .filter(|&(&v, &l)| l == 1 && v <= w)
                    .count() as f64
                    / n1 as f64;
                let f2 = d
                    .iter()
                    .zip(labels)
                    .filter(|&(&v, &l)| l == 2 && v <= w)
                    .count() as f64
                    / n2 as f64;
                (f1 - f2).abs()
            })
            .fold(0.0, f64::max)
    }

    fn cvm_brute(d: &[f64], labels: &[usize]) -> f64 {
        let n1 = labels.iter().filter(|&&l| l == 1).count() as f64;
        let n2 = labels.len() as f64 - n1;
        let sum: f64 = d
            .iter()
            .map(|&w| {
                let f1 = d
                    .iter()
                    .zip(labels)
                    .filter(|&(&v, &l)| l == 1 && v <= w)
                    .count() as f64
                    / n1;
                let f2 = d
                    .iter()
                    .zip(labels)
                    .filter(|&(&v, &l)| l == 2 && v <= w)
                    .count() as f64
                    / n2;
                (f1 - f2) * (f1 - f2)
            })
            .sum();
        n1 * n2 / ((n1 + n2) * (n1 + n2)) * sum
    }

    #[test]
    fn ks_cvm_match_brute_force_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(4..25);
            // coarse grid forces ties
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let labels: Vec<usize> = (0..n)
                .map(|i| if i < n / 2 { 1 } else { 2 })
                .collect();
            let p = two_sample(d.clone(), labels.clone());
            let ks = ks_two_sample(&p).unwrap().value;
            let cvm = cvm_two_sample(&p).unwrap().value;
            assert!((ks - ks_brute(&d, &labels)).abs() < TOL);
            assert!((cvm - cvm_brute(&d, &labels)).abs() < TOL);
        }
    }

    #[test]
    fn kruskal_wallis_detects_shift() {
        let d = vec![1.0, 2.0, 3.0, 11.0, 12.0, 13.0, 21.0, 22.0, 23.0];
        let labels = vec![1, 1, 1, 2, 2, 2, 3, 3, 3];
        let p = ProjectedSample::TwoSample {
            distances: d,
            labels,
            n_groups: 3,
            excluded_index: None,
        };
        let h = kruskal_wallis(&p).unwrap().value;
        // separated groups give the maximal H = 12/(9·10)·(6²+15²+24²)/3 − 30 = 7.2
        assert!((h - 7.2).abs() < 1e-9);
    }

    #[test]
    fn kruskal_wallis_all_tied_zero() {
        let p = ProjectedSample::TwoSample {
            distances: vec![2.0; 6],
            labels: vec![1, 1, 2, 2, 3, 3],
            n_groups: 3,
            excluded_index: None,
        };
        assert_eq!(kruskal_wallis(&p).unwrap().value, 0.0);
    }

    // O(N^2) counting route for the scaled ranks, independent of the
    // sort/Fenwick fast path.
    fn scaled_ranks_by_counting(dx: &[f64], dy: &[f64]) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
        let n = dx.len();
        let mut r2 = vec![0i64; n];
        let mut s2 = vec![0i64; n];
        let mut q4 = vec![0i64; n];
        for i in 0..n {
            let (mut xl, mut xe, mut yl, mut ye) = (0i64, 0i64, 0i64, 0i64);
            let (mut bll, mut bee, mut bel, mut ble) = (0i64, 0i64, 0i64, 0i64);
            for j in 0..n {
                if j == i {
                    continue;
                }
                if dx[j] < dx[i] {
                    xl += 1;
                }
                if dx[j] == dx[i] {
                    xe += 1;
                }
                if dy[j] < dy[i] {
                    yl += 1;
                }
                if dy[j] == dy[i] {
                    ye += 1;
                }
                match (dx[j] < dx[i], dx[j] == dx[i], dy[j] < dy[i], dy[j] == dy[i]) {
                    (true, _, true, _) => bll += 1,
                    (_, true, _, true) => bee += 1,
                    (_, true, true, _) => bel += 1,
                    (true, _, _, true) => ble += 1,
                    _ => {}
                }
            }
            r2[i] = 2 + 2 * xl + xe;
            s2[i] = 2 + 2 * yl + ye;
            q4[i] = 4 + 4 * bll + bee + 2 * bel + 2 * ble;
        }
        (r2, s2, q4)
    }

    #[test]
    fn hoeffding_monotone_is_one() {
        let p = paired(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!((hoeffding_d(&p).unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn hoeffding_reflection_matches_monotone() {
        let p = paired(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!((hoeffding_d(&p).unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn hoeffding_symmetric_in_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dx: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let dy: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let a = hoeffding_d_pairs(&dx, &dy).unwrap();
        let b = hoeffding_d_pairs(&dy, &dx).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hoeffding_too_few_points() {
        assert!(matches!(
            hoeffding_d_pairs(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::TooFewPoints { needed: 5, got: 4 })
        ));
    }

    #[test]
    fn hoeffding_fast_ranks_match_counting_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(5..30);
            let dx: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
            let dy: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
            let r2 = scaled_midranks(&dx);
            let s2 = scaled_midranks(&dy);
            let q4 = scaled_bivariate_ranks(&dx, &dy);
            let (r2b, s2b, q4b) = scaled_ranks_by_counting(&dx, &dy);
            assert_eq!(r2, r2b);
            assert_eq!(s2, s2b);
            assert_eq!(q4, q4b);
        }
    }

    #[test]
    fn hoeffding_within_analytic_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.gen_range(5..40);
            let dx: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let dy: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let d = hoeffding_d_pairs(&dx, &dy).unwrap();
            assert!((HOEFFDING_D_MIN - 1e-12..=HOEFFDING_D_MAX + 1e-12).contains(&d));
        }
    }

    #[test]
    fn pearson_worked_examples() {
        assert_eq!(pearson_2x2(1, 1, 1, 1), 0.0);
        assert_eq!(pearson_2x2(2, 0, 0, 2), 4.0);
        assert_eq!(pearson_2x2(0, 0, 3, 7), 0.0);
        assert_eq!(pearson_2x2(0, 0, 0, 0), 0.0);
    }

    #[test]
    fn thas_three_points_all_margins_zero() {
        // partitions at each of the three points each leave an empty
        // row or column, so every table scores 0
        let p = paired(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 1.0]);
        assert_eq!(thas_sum(&p).unwrap().value, 0.0);
    }

    #[test]
    fn thas_comonotone_positive() {
        let dx: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let dy = dx.clone();
        let v = thas_sum_pairs(&dx, &dy).unwrap();
        assert!(v > 0.0);
        // hand check one partition: at j=4 (w=(5,5)), a=4, d=5 → n=9, score 9
        // total equals the chi-square route summed over partitions
        let mut oracle = 0.0;
        for j in 0..10 {
            let mut cells = [0.0f64; 4];
            for k in 0..10 {
                if k == j {
                    continue;
                }
                let idx = match (dx[k] <= dx[j], dy[k] <= dy[j]) {
                    (true, true) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (false, false) => 3,
                };
                cells[idx] += 1.0;
            }
            let n: f64 = cells.iter().sum();
            let r1 = cells[0] + cells[1];
            let r2 = cells[2] + cells[3];
            let c1 = cells[0] + cells[2];
            let c2 = cells[1] + cells[3];
            if r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0 {
                continue;
            }
            let expected = [r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n];
            oracle += cells
                .iter()
                .zip(&expected)
                .map(|(o, e)| (o - e) * (o - e) / e)
                .sum::<f64>();
        }
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    }

    #[test]
    fn thas_too_few_points() {
        assert!(matches!(
            thas_sum_pairs(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn thas_invariant_under_separate_monotone_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let dx: Vec<f64> = (0..15).map(|_| rng.gen_range(0.1..2.0)).collect();
        let dy: Vec<f64> = (0..15).map(|_| rng.gen_range(0.1..2.0)).collect();
        let v = thas_sum_pairs(&dx, &dy).unwrap();
        let tx: Vec<f64> = dx.iter().map(|u| u.exp()).collect();
        let ty: Vec<f64> = dy.iter().map(|u| u * u * u).collect();
        let w = thas_sum_pairs(&tx, &ty).unwrap();
        assert!((v - w).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn ks_cvm_rank_invariance(values in proptest::collection::vec(0.01f64..100.0, 6..30)) {
            let n = values.len();
            let labels: Vec<usize> = (0..n).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
            let p = two_sample(values.clone(), labels.clone());
            let cubed: Vec<f64> = values.iter().map(|v| v * v * v).collect();
            let pc = two_sample(cubed, labels.clone());
            let ks_a = ks_two_sample(&p).unwrap().value;
            let ks_b = ks_two_sample(&pc).unwrap().value;
            prop_assert!((ks_a - ks_b).abs() < 1e-12);
            let cvm_a = cvm_two_sample(&p).unwrap().value;
            let cvm_b = cvm_two_sample(&pc).unwrap().value;
            prop_assert!((cvm_a - cvm_b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ks_a));
            prop_assert!(cvm_a >= 0.0);
        }

        #[test]
        fn ks_cvm_label_swap_invariance(values in proptest::collection::vec(0.0f64..10.0, 6..24)) {
            let n = values.len();
            let labels: Vec<usize> = (0..n).map(|i| if i < n / 2 { 1 } else { 2 }).collect();
            let swapped: Vec<usize> = labels.iter().map(|&l| 3 - l).collect();
            let a = two_sample(values.clone(), labels);
            let b = two_sample(values, swapped);
            prop_assert!((ks_two_sample(&a).unwrap().value - ks_two_sample(&b).unwrap().value).abs() < 1e-12);
            prop_assert!((cvm_two_sample(&a).unwrap().value - cvm_two_sample(&b).unwrap().value).abs() < 1e-12);
        }
    }
}
