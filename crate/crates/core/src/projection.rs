//! Projection of multivariate data to univariate distances from center
//! points, and generation of center points.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{CenterOrigin, CenterPoint, CenterSpec, LabeledDataset, PairedDataset, ProjectedSample};

/// How center points are chosen.
#[derive(Debug, Clone)]
pub enum CenterStrategy {
    /// Use exactly these centers.
    FixedList(Vec<CenterSpec>),
    /// M draws, uniform over the axis-aligned bounding box of the sample,
    /// each side expanded by `expansion` (fraction of its length) on both
    /// ends.
    UniformBoundingBox { m: usize, expansion: f64 },
    /// M draws from a normal with the sample mean and diagonal sample
    /// covariance.
    GaussianMomentFit { m: usize },
    /// Every sample row in turn, with leave-one-out projection.
    SamplePoints,
}

impl CenterStrategy {
    pub fn id(&self) -> String {
        match self {
            CenterStrategy::FixedList(c) => format!("fixed(M={})", c.len()),
            CenterStrategy::UniformBoundingBox { m, expansion } => {
                format!("bbox(M={m},expansion={expansion})")
            }
            CenterStrategy::GaussianMomentFit { m } => format!("gauss(M={m})"),
            CenterStrategy::SamplePoints => "sample-points".to_string(),
        }
    }
}

/// Euclidean distance of every row of `y` from `z`.
pub fn distances_from(z: ArrayView1<f64>, y: ArrayView2<f64>) -> Result<Vec<f64>> {
    if z.len() != y.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("center has {} coordinates, data has {}", z.len(), y.ncols()),
        });
    }
    Ok(y.rows()
        .into_iter()
        .map(|row| euclidean(row, z))
        .collect())
}

fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// Project K-sample data to (distance, label) pairs. When the center is
/// sample row i, that row is excluded and N' = N−1.
pub fn project_two_sample(center: &CenterSpec, data: &LabeledDataset) -> Result<ProjectedSample> {
    let z = match &center.point {
        CenterPoint::TwoSample(z) => z,
        CenterPoint::Independence { .. } => {
            return Err(Error::DimensionMismatch {
                context: "independence center applied to K-sample data".to_string(),
            })
        }
    };
    let excluded = excluded_row(&center.origin, data.n())?;
    let all = distances_from(z.view(), data.y().view())?;
    let mut distances = Vec::with_capacity(data.n());
    let mut labels = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        if Some(i) == excluded {
            continue;
        }
        distances.push(all[i]);
        labels.push(data.labels()[i]);
    }
    Ok(ProjectedSample::TwoSample {
        distances,
        labels,
        n_groups: data.k(),
        excluded_index: excluded,
    })
}

/// Project independence data to paired distances (‖x_i − z_x‖, ‖y_i − z_y‖).
pub fn project_independence(center: &CenterSpec, data: &PairedDataset) -> Result<ProjectedSample> {
    let (zx, zy) = match &center.point {
        CenterPoint::Independence { zx, zy } => (zx, zy),
        CenterPoint::TwoSample(_) => {
            return Err(Error::DimensionMismatch {
                context: "K-sample center applied to independence data".to_string(),
            })
        }
    };
    let excluded = excluded_row(&center.origin, data.n())?;
    let all_x = distances_from(zx.view(), data.x().view())?;
    let all_y = distances_from(zy.view(), data.y().view())?;
    let mut dx = Vec::with_capacity(data.n());
    let mut dy = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        if Some(i) == excluded {
            continue;
        }
        dx.push(all_x[i]);
        dy.push(all_y[i]);
    }
    Ok(ProjectedSample::Paired {
        dx,
        dy,
        excluded_index: excluded,
    })
}

fn excluded_row(origin: &CenterOrigin, n: usize) -> Result<Option<usize>> {
    match origin {
        CenterOrigin::SamplePoint(i) => {
            if *i >= n {
                Err(Error::DimensionMismatch {
                    context: format!("sample-point center index {i} out of range for {n} rows"),
                })
            } else {
                Ok(Some(*i))
            }
        }
        _ => Ok(None),
    }
}

/// The data block(s) centers are drawn over. For K-sample problems this is
/// the pooled y-block; for independence problems the x- and y-blocks
/// produce paired (z_x, z_y) centers.
pub enum CenterDomain<'a> {
    KSample(&'a LabeledDataset),
    Independence(&'a PairedDataset),
}

impl<'a> From<&'a LabeledDataset> for CenterDomain<'a> {
    fn from(d: &'a LabeledDataset) -> Self {
        CenterDomain::KSample(d)
    }
}

impl<'a> From<&'a PairedDataset> for CenterDomain<'a> {
    fn from(d: &'a PairedDataset) -> Self {
        CenterDomain::Independence(d)
    }
}

/// Generate center points. Deterministic given `seed`; draws use a ChaCha8
/// stream so results do not depend on platform or thread count.
///
/// If the sample is a single repeated point and `expansion` is 0 the
/// bounding box has zero volume; draws then all coincide with that point,
/// which is allowed.
pub fn sample_centers(strategy: &CenterStrategy, data: &CenterDomain, seed: u64) -> Result<Vec<CenterSpec>> {
    match strategy {
        CenterStrategy::FixedList(centers) => {
            if centers.is_empty() {
                return Err(Error::EmptyInput);
            }
            Ok(centers.clone())
        }
        CenterStrategy::UniformBoundingBox { m, expansion } => {
            if *m < 1 {
                return Err(Error::EmptyInput);
            }
            if !(*expansion >= 0.0) {
                return Err(Error::InvalidConfig {
                    reason: format!("bounding-box expansion must be >= 0, got {expansion}"),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match data {
                CenterDomain::KSample(d) => {
                    let bounds = bounding_box(d.y().view(), *expansion);
                    Ok((0..*m)
                        .map(|_| {
                            CenterSpec::two_sample(draw_uniform(&bounds, &mut rng))
                                .with_origin(CenterOrigin::Sampled("bbox".to_string()))
                        })
                        .collect())
                }
                CenterDomain::Independence(d) => {
                    let bx = bounding_box(d.x().view(), *expansion);
                    let by = bounding_box(d.y().view(), *expansion);
                    Ok((0..*m)
                        .map(|_| {
                            let zx = draw_uniform(&bx, &mut rng);
                            let zy = draw_uniform(&by, &mut rng);
                            CenterSpec::independence(zx, zy)
                                .with_origin(CenterOrigin::Sampled("bbox".to_string()))
                        })
                        .collect())
                }
            }
        }
        CenterStrategy::GaussianMomentFit { m } => {
            if *m < 1 {
                return Err(Error::EmptyInput);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match data {
                CenterDomain::KSample(d) => {
                    let moments = column_moments(d.y().view());
                    Ok((0..*m)
                        .map(|_| {
                            CenterSpec::two_sample(draw_gaussian(&moments, &mut rng))
                                .with_origin(CenterOrigin::Sampled("gauss".to_string()))
                        })
                        .collect())
                }
                CenterDomain::Independence(d) => {
                    let mx = column_moments(d.x().view());
                    let my = column_moments(d.y().view());
                    Ok((0..*m)
                        .map(|_| {
                            let zx = draw_gaussian(&mx, &mut rng);
                            let zy = draw_gaussian(&my, &mut rng);
                            CenterSpec::independence(zx, zy)
                                .with_origin(CenterOrigin::Sampled("gauss".to_string()))
                        })
                        .collect())
                }
            }
        }
        CenterStrategy::SamplePoints => match data {
            CenterDomain::KSample(d) => Ok((0..d.n())
                .map(|i| {
                    CenterSpec::two_sample(d.y().row(i).to_owned())
                        .with_origin(CenterOrigin::SamplePoint(i))
                })
                .collect()),
            CenterDomain::Independence(d) => Ok((0..d.n())
                .map(|i| {
                    CenterSpec::independence(d.x().row(i).to_owned(), d.y().row(i).to_owned())
                        .with_origin(CenterOrigin::SamplePoint(i))
                })
                .collect()),
        },
    }
}

fn bounding_box(m: ArrayView2<f64>, expansion: f64) -> Vec<(f64, f64)> {
    (0..m.ncols())
        .map(|j| {
            let col = m.column(j);
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pad = (hi - lo) * expansion / 2.0;
            (lo - pad, hi + pad)
        })
        .collect()
}

fn draw_uniform(bounds: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Array1<f64> {
    Array1::from_iter(bounds.iter().map(|&(lo, hi)| {
        if hi > lo {
            rng.gen_range(lo..hi)
        } else {
            lo
        }
    }))
}

fn column_moments(m: ArrayView2<f64>) -> Vec<(f64, f64)> {
    let n = m.nrows() as f64;
    (0..m.ncols())
        .map(|j| {
            let col = m.column(j);
            let mean = col.sum() / n;
            let var = if m.nrows() > 1 {
                col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        })
        .collect()
}

fn draw_gaussian(moments: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Array1<f64> {
    Array1::from_iter(moments.iter().map(|&(mean, sd)| {
        if sd > 0.0 {
            Normal::new(mean, sd).expect("finite moments").sample(rng)
        } else {
            mean
        }
    }))
}
