//! Synthetic data generators for level and power studies. Deterministic
//! given (scenario, seed).

use ndarray::Array2;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LabeledDataset, PairedDataset};

/// A data-generating process. K-sample scenarios produce a
/// [`LabeledDataset`] with `n` rows per group; independence scenarios
/// produce a [`PairedDataset`] with `n` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// K groups, all N(0, I_q): a K-sample null.
    NullGaussian { q: usize, k: usize },
    /// K groups of iid standard log-normal coordinates: a heavy-tailed
    /// K-sample null.
    NullLogNormal { q: usize, k: usize },
    /// Two groups; group 2 shifted by delta/√q in every coordinate, so the
    /// mean difference has Euclidean norm delta.
    LocationShift { q: usize, delta: f64 },
    /// Two groups; group 2 scaled by `ratio`.
    ScaleShift { q: usize, ratio: f64 },
    /// y_j = ρ·x_{j mod p} + √(1−ρ²)·ε.
    LinearDep { p: usize, q: usize, rho: f64 },
    /// y_j = (x_{j mod p}² − 1)/√2 + noise·ε; uncorrelated but dependent.
    QuadraticDep { p: usize, q: usize, noise: f64 },
    /// Points on the unit circle plus noise; zero linear correlation with
    /// total dependence.
    CircleDep { noise: f64 },
    /// Independent N(0, I_p) and N(0, I_q): an independence null.
    NullIndep { p: usize, q: usize },
}

#[derive(Debug, Clone)]
pub enum GeneratedData {
    KSample(LabeledDataset),
    Independence(PairedDataset),
}

impl Scenario {
    pub fn is_k_sample(&self) -> bool {
        matches!(
            self,
            Scenario::NullGaussian { .. }
                | Scenario::NullLogNormal { .. }
                | Scenario::LocationShift { .. }
                | Scenario::ScaleShift { .. }
        )
    }

    pub fn id(&self) -> String {
        match self {
            Scenario::NullGaussian { q, k } => format!("null-gaussian(q={q},k={k})"),
            Scenario::NullLogNormal { q, k } => format!("null-lognormal(q={q},k={k})"),
            Scenario::LocationShift { q, delta } => format!("location-shift(q={q},delta={delta})"),
            Scenario::ScaleShift { q, ratio } => format!("scale-shift(q={q},ratio={ratio})"),
            Scenario::LinearDep { p, q, rho } => format!("linear-dep(p={p},q={q},rho={rho})"),
            Scenario::QuadraticDep { p, q, noise } => {
                format!("quadratic-dep(p={p},q={q},noise={noise})")
            }
            Scenario::CircleDep { noise } => format!("circle-dep(noise={noise})"),
            Scenario::NullIndep { p, q } => format!("null-indep(p={p},q={q})"),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = match self {
            Scenario::NullGaussian { q, k } | Scenario::NullLogNormal { q, k } => {
                *q >= 1 && *k >= 2
            }
            Scenario::LocationShift { q, .. } => *q >= 1,
            Scenario::ScaleShift { q, ratio } => *q >= 1 && *ratio > 0.0,
            Scenario::LinearDep { p, q, rho } => *p >= 1 && *q >= 1 && rho.abs() <= 1.0,
            Scenario::QuadraticDep { p, q, noise } => *p >= 1 && *q >= 1 && *noise >= 0.0,
            Scenario::CircleDep { noise } => *noise >= 0.0,
            Scenario::NullIndep { p, q } => *p >= 1 && *q >= 1,
        };
        if !ok {
            return Err(Error::InvalidScenario {
                reason: format!("bad parameters for {}", self.id()),
            });
        }
        if n < 2 {
            return Err(Error::InvalidScenario {
                reason: format!("need n >= 2, got {n}"),
            });
        }
        Ok(())
    }
}

/// Generate data for `scenario` with `n` rows per group (K-sample) or `n`
/// pairs (independence). Bit-reproducible given the seed.
pub fn generate(scenario: &Scenario, n: usize, seed: u64) -> Result<GeneratedData> {
    scenario.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = StandardNormal;
    match scenario {
        Scenario::NullGaussian { q, k } => {
            let y = Array2::from_shape_fn((n * k, *q), |_| std_normal.sample(&mut rng));
            let labels = (0..n * k).map(|i| 1 + i / n).collect();
            Ok(GeneratedData::KSample(LabeledDataset::new(y, labels, *k)?))
        }
        Scenario::NullLogNormal { q, k } => {
            let ln = LogNormal::new(0.0, 1.0).expect("valid");
            let y = Array2::from_shape_fn((n * k, *q), |_| ln.sample(&mut rng));
            let labels = (0..n * k).map(|i| 1 + i / n).collect();
            Ok(GeneratedData::KSample(LabeledDataset::new(y, labels, *k)?))
        }
        Scenario::LocationShift { q, delta } => {
            let shift = delta / (*q as f64).sqrt();
            let y = Array2::from_shape_fn((2 * n, *q), |(i, _)| {
                let v: f64 = std_normal.sample(&mut rng);
                if i < n {
                    v
                } else {
                    v + shift
                }
            });
            let labels = (0..2 * n).map(|i| if i < n { 1 } else { 2 }).collect();
            Ok(GeneratedData::KSample(LabeledDataset::new(y, labels, 2)?))
        }
        Scenario::ScaleShift { q, ratio } => {
            let y = Array2::from_shape_fn((2 * n, *q), |(i, _)| {
                let v: f64 = std_normal.sample(&mut rng);
                if i < n {
                    v
                } else {
                    v * ratio
                }
            });
            let labels = (0..2 * n).map(|i| if i < n { 1 } else { 2 }).collect();
            Ok(GeneratedData::KSample(LabeledDataset::new(y, labels, 2)?))
        }
        Scenario::LinearDep { p, q, rho } => {
            let x = Array2::from_shape_fn((n, *p), |_| std_normal.sample(&mut rng));
            let noise = (1.0 - rho * rho).sqrt();
            let mut y = Array2::zeros((n, *q));
            for i in 0..n {
                for j in 0..*q {
                    let e: f64 = std_normal.sample(&mut rng);
                    y[[i, j]] = rho * x[[i, j % p]] + noise * e;
                }
            }
            Ok(GeneratedData::Independence(PairedDataset::new(x, y)?))
        }
        Scenario::QuadraticDep { p, q, noise } => {
            let x = Array2::from_shape_fn((n, *p), |_| std_normal.sample(&mut rng));
            let mut y = Array2::zeros((n, *q));
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..n {
                for j in 0..*q {
                    let e: f64 = std_normal.sample(&mut rng);
                    let u = x[[i, j % p]];
                    y[[i, j]] = (u * u - 1.0) * scale + noise * e;
                }
            }
            Ok(GeneratedData::Independence(PairedDataset::new(x, y)?))
        }
        Scenario::CircleDep { noise } => {
            let angle = Uniform::new(0.0, 2.0 * std::f64::consts::PI);
            let mut x = Array2::zeros((n, 1));
            let mut y = Array2::zeros((n, 1));
            for i in 0..n {
                let theta: f64 = angle.sample(&mut rng);
                let ex: f64 = std_normal.sample(&mut rng);
                let ey: f64 = std_normal.sample(&mut rng);
                x[[i, 0]] = theta.cos() + noise * ex;
                y[[i, 0]] = theta.sin() + noise * ey;
            }
            Ok(GeneratedData::Independence(PairedDataset::new(x, y)?))
        }
        Scenario::NullIndep { p, q } => {
            let x = Array2::from_shape_fn((n, *p), |_| std_normal.sample(&mut rng));
            let y = Array2::from_shape_fn((n, *q), |_| std_normal.sample(&mut rng));
            Ok(GeneratedData::Independence(PairedDataset::new(x, y)?))
        }
    }
}
