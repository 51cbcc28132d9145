//! Brute-force oracle implementations, kept deliberately independent of the
//! library's computation paths: direct ECDF enumeration for KS/CvM, the
//! order-5 kernel enumeration for Hoeffding's D, and an
//! observed-vs-expected chi-square route for the Thas partition sum.

use itertools::Itertools;

/// KS by evaluating both ECDFs at every pooled point.
pub fn ks_oracle(d: &[f64], labels: &[usize]) -> f64 {
    let n1 = labels.iter().filter(|&&l| l == 1).count() as f64;
    let n2 = labels.len() as f64 - n1;
    d.iter()
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
            (f1 - f2).abs()
        })
        .fold(0.0, f64::max)
}

/// Cramér–von Mises by direct formula evaluation at every pooled point.
pub fn cvm_oracle(d: &[f64], labels: &[usize]) -> f64 {
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

/// Hoeffding's D by enumerating the order-5 kernel over all ordered
/// 5-tuples of distinct indices (every 5-subset in each of its 120
/// orderings). Valid for tie-free data, where the kernel's strict
/// inequalities match the rank-count formula exactly.
///
/// The kernel is the signed indicator combination behind
/// Δ = E[(F_xy − F_x·F_y)²]:
///   g = 1{x₁<x₅,y₁<y₅}·1{x₂<x₅,y₂<y₅}
///     − 2·1{x₁<x₅,y₁<y₅}·1{x₂<x₅}·1{y₃<y₅}
///     + 1{x₁<x₅}·1{x₂<x₅}·1{y₃<y₅}·1{y₄<y₅}
pub fn hoeffding_kernel_oracle(dx: &[f64], dy: &[f64]) -> f64 {
    let n = dx.len();
    assert!(n >= 5);
    let mut t: i128 = 0;
    for subset in (0..n).combinations(5) {
        for perm in subset.iter().permutations(5) {
            let (i1, i2, i3, i4, i5) = (*perm[0], *perm[1], *perm[2], *perm[3], *perm[4]);
            let both1 = dx[i1] < dx[i5] && dy[i1] < dy[i5];
            let both2 = dx[i2] < dx[i5] && dy[i2] < dy[i5];
            let x2 = dx[i2] < dx[i5];
            let y3 = dy[i3] < dy[i5];
            let t1 = (both1 && both2) as i128;
            let t2 = (both1 && x2 && y3) as i128;
            let t3 = (dx[i1] < dx[i5] && x2 && y3 && dy[i4] < dy[i5]) as i128;
            t += t1 - 2 * t2 + t3;
        }
    }
    let nn = n as i128;
    let denom = nn * (nn - 1) * (nn - 2) * (nn - 3) * (nn - 4);
    // same final float expression as the fast path (t16 = 16·T), so a
    // matching integer T gives a bitwise-equal f64
    30.0 * ((16 * t) as f64 / 16.0) / denom as f64
}

/// Thas partition sum via the chi-square observed-vs-expected route,
/// summing Σ(O−E)²/E over the four cells of each sample-induced partition.
pub fn thas_chi2_oracle(dx: &[f64], dy: &[f64]) -> f64 {
    let n = dx.len();
    let mut total = 0.0;
    for j in 0..n {
        let mut cells = [0.0f64; 4];
        for k in 0..n {
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
        let m: f64 = cells.iter().sum();
        let r1 = cells[0] + cells[1];
        let r2 = cells[2] + cells[3];
        let c1 = cells[0] + cells[2];
        let c2 = cells[1] + cells[3];
        if r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0 {
            continue;
        }
        let expected = [r1 * c1 / m, r1 * c2 / m, r2 * c1 / m, r2 * c2 / m];
        total += cells
            .iter()
            .zip(&expected)
            .map(|(o, e)| (o - e) * (o - e) / e)
            .sum::<f64>();
    }
    total
}

/// Asymptotic two-sample KS critical value at level `alpha`:
/// c(α)·√((n+m)/(n·m)) with c(α) = √(−ln(α/2)/2).
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
