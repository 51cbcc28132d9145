//! Domain types shared by all modules: datasets, center points, projected
//! samples, and test reports.
//!
//! All types are immutable after construction and safe to share across
//! threads. Constructors validate their invariants, so a value that exists
//! is a value that passed validation.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// K-sample data: an N×q matrix with a group label per row.
///
/// Labels are re-coded internally to contiguous 1..=K; the original label
/// strings are preserved for reporting. Rows containing non-finite values
/// are rejected outright rather than dropped, since silently dropping rows
/// would bias permutation nulls.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    y: Array2<f64>,
    labels: Vec<usize>,
    group_names: Vec<String>,
    group_sizes: Vec<usize>,
}

impl LabeledDataset {
    /// Build from recoded labels in 1..=k. Every group in 1..=k must be
    /// populated.
    pub fn new(y: Array2<f64>, labels: Vec<usize>, k: usize) -> Result<Self> {
        let group_names = (1..=k).map(|g| g.to_string()).collect();
        Self::with_group_names(y, labels, group_names)
    }

    /// Build from arbitrary label values; distinct values are sorted and
    /// re-coded to 1..=K.
    pub fn from_raw_labels(y: Array2<f64>, raw: &[String]) -> Result<Self> {
        let mut names: Vec<String> = raw.to_vec();
        names.sort();
        names.dedup();
        let labels = raw
            .iter()
            .map(|v| names.binary_search(v).expect("label present") + 1)
            .collect();
        Self::with_group_names(y, labels, names)
    }

    fn with_group_names(y: Array2<f64>, labels: Vec<usize>, group_names: Vec<String>) -> Result<Self> {
        let k = group_names.len();
        if y.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                context: format!("{} rows but {} labels", y.nrows(), labels.len()),
            });
        }
        if k < 2 {
            return Err(Error::EmptyGroup { group: 2 });
        }
        let mut group_sizes = vec![0usize; k];
        for (row, &lab) in labels.iter().enumerate() {
            if lab < 1 || lab > k {
                return Err(Error::DimensionMismatch {
                    context: format!("label {lab} at row {row} outside 1..={k}"),
                });
            }
            group_sizes[lab - 1] += 1;
        }
        if let Some(g) = group_sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptyGroup { group: g + 1 });
        }
        check_finite(&y)?;
        Ok(Self {
            y,
            labels,
            group_names,
            group_sizes,
        })
    }

    /// Re-check all invariants. Constructors already enforce them; this is
    /// the explicit validation entry point for data read from files.
    pub fn validate(&self) -> Result<()> {
        let mut sizes = vec![0usize; self.k()];
        for &lab in &self.labels {
            sizes[lab - 1] += 1;
        }
        if let Some(g) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptyGroup { group: g + 1 });
        }
        check_finite(&self.y)
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    /// Recoded labels, one per row, each in 1..=K.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.group_names.len()
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn dim(&self) -> usize {
        self.y.ncols()
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Original label value for recoded group `g` (1-based).
    pub fn group_name(&self, g: usize) -> &str {
        &self.group_names[g - 1]
    }

    /// Same observations under a different label vector (permutation nulls).
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Self::with_group_names(self.y.clone(), labels, self.group_names.clone())
    }
}

/// Independence data: aligned N×p and N×q matrices; row i of `x` is paired
/// with row i of `y`.
#[derive(Debug, Clone)]
pub struct PairedDataset {
    x: Array2<f64>,
    y: Array2<f64>,
}

impl PairedDataset {
    pub fn new(x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::DimensionMismatch {
                context: format!("x has {} rows, y has {}", x.nrows(), y.nrows()),
            });
        }
        check_finite(&x)?;
        check_finite(&y)?;
        Ok(Self { x, y })
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&self.x)?;
        check_finite(&self.y)
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim_x(&self) -> usize {
        self.x.ncols()
    }

    pub fn dim_y(&self) -> usize {
        self.y.ncols()
    }

    /// Re-pair x-row i with y-row `pairing[i]` (permutation nulls). The
    /// x-block is left untouched.
    pub fn with_pairing(&self, pairing: &[usize]) -> Result<Self> {
        if pairing.len() != self.n() {
            return Err(Error::DimensionMismatch {
                context: format!("pairing length {} for {} rows", pairing.len(), self.n()),
            });
        }
        let mut y = Array2::zeros(self.y.raw_dim());
        for (i, &j) in pairing.iter().enumerate() {
            y.row_mut(i).assign(&self.y.row(j));
        }
        Self::new(self.x.clone(), y)
    }
}

fn check_finite(m: &Array2<f64>) -> Result<()> {
    for ((row, col), &v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { row, col });
        }
    }
    Ok(())
}

/// Where a center point came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CenterOrigin {
    Fixed,
    /// Drawn by a sampling strategy, identified by its id ("bbox", "gauss").
    Sampled(String),
    /// The center is sample row i; projection then leaves that row out.
    SamplePoint(usize),
}

/// The center coordinates: a single point for K-sample projection, or an
/// (x-side, y-side) pair for independence projection.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterPoint {
    TwoSample(Array1<f64>),
    Independence { zx: Array1<f64>, zy: Array1<f64> },
}

/// One center point plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSpec {
    pub point: CenterPoint,
    pub origin: CenterOrigin,
}

impl CenterSpec {
    pub fn two_sample(z: Array1<f64>) -> Self {
        Self {
            point: CenterPoint::TwoSample(z),
            origin: CenterOrigin::Fixed,
        }
    }

    pub fn independence(zx: Array1<f64>, zy: Array1<f64>) -> Self {
        Self {
            point: CenterPoint::Independence { zx, zy },
            origin: CenterOrigin::Fixed,
        }
    }

    pub fn with_origin(mut self, origin: CenterOrigin) -> Self {
        self.origin = origin;
        self
    }
}

/// Univariate distance data produced by projecting a dataset from a center.
///
/// N' equals N, or N−1 when the center is a sample point (leave-one-out);
/// `excluded_index` records the left-out row in that case.
#[derive(Debug, Clone)]
pub enum ProjectedSample {
    TwoSample {
        distances: Vec<f64>,
        labels: Vec<usize>,
        n_groups: usize,
        excluded_index: Option<usize>,
    },
    Paired {
        dx: Vec<f64>,
        dy: Vec<f64>,
        excluded_index: Option<usize>,
    },
}

impl ProjectedSample {
    pub fn len(&self) -> usize {
        match self {
            ProjectedSample::TwoSample { distances, .. } => distances.len(),
            ProjectedSample::Paired { dx, .. } => dx.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn excluded_index(&self) -> Option<usize> {
        match self {
            ProjectedSample::TwoSample { excluded_index, .. }
            | ProjectedSample::Paired { excluded_index, .. } => *excluded_index,
        }
    }
}

/// Serializable summary of a center for reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterSummary {
    pub origin: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zx: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zy: Option<Vec<f64>>,
}

impl From<&CenterSpec> for CenterSummary {
    fn from(c: &CenterSpec) -> Self {
        let origin = match &c.origin {
            CenterOrigin::Fixed => "fixed".to_string(),
            CenterOrigin::Sampled(id) => format!("sampled:{id}"),
            CenterOrigin::SamplePoint(i) => format!("sample-point:{i}"),
        };
        match &c.point {
            CenterPoint::TwoSample(z) => CenterSummary {
                origin,
                z: Some(z.to_vec()),
                zx: None,
                zy: None,
            },
            CenterPoint::Independence { zx, zy } => CenterSummary {
                origin,
                z: None,
                zx: Some(zx.to_vec()),
                zy: Some(zy.to_vec()),
            },
        }
    }
}

/// Per-center entry of a test report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterResult {
    pub center: CenterSummary,
    pub statistic: f64,
    pub p_value: f64,
}

/// How a report was produced: projection strategy, univariate test, and
/// pooling rule. `pooling_b` is 0 when the pooling stage needed no
/// permutation (Bonferroni/Hommel global tests).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodDescriptor {
    pub problem: String,
    pub center_strategy: String,
    pub univariate: String,
    pub pooling: String,
    pub pooling_b: usize,
}

/// Full result of one pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub method: MethodDescriptor,
    pub statistic: f64,
    pub p_value: f64,
    pub per_center: Vec<CenterResult>,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub runtime_ms: u64,
}
