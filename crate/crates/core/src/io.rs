//! CSV ingestion and report serialization.
//!
//! Input CSV requires a header row, UTF-8, decimal points, no thousands
//! separators. K-sample data names its group column; independence data
//! names the x- and y-block columns. Reports serialize to JSON (fixed key
//! set) or CSV (one row per center plus a summary row).

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{LabeledDataset, PairedDataset, TestReport};
use crate::power::PowerReport;

fn parse_cell(value: &str, row: usize, col: usize) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| Error::ParseValue {
        value: value.to_string(),
        row,
        col,
    })
}

fn column_indices(header: &csv::StringRecord, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn { name: name.clone() })
        })
        .collect()
}

/// Read K-sample data. `label_col` selects the group column; `y_cols`
/// selects the numeric block (all remaining columns when `None`).
pub fn read_labeled_csv(
    path: &Path,
    label_col: &str,
    y_cols: Option<&[String]>,
) -> Result<LabeledDataset> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    let label_idx = header
        .iter()
        .position(|h| h == label_col)
        .ok_or_else(|| Error::MissingColumn {
            name: label_col.to_string(),
        })?;
    let y_idx: Vec<usize> = match y_cols {
        Some(names) => column_indices(&header, names)?,
        None => (0..header.len()).filter(|&i| i != label_idx).collect(),
    };
    if y_idx.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut labels: Vec<String> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        labels.push(record.get(label_idx).unwrap_or("").trim().to_string());
        for &ci in &y_idx {
            let cell = record.get(ci).ok_or_else(|| Error::ParseValue {
                value: String::new(),
                row,
                col: ci,
            })?;
            values.push(parse_cell(cell, row, ci)?);
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let y = Array2::from_shape_vec((labels.len(), y_idx.len()), values).expect("shape consistent");
    LabeledDataset::from_raw_labels(y, &labels)
}

/// Read independence data from named x- and y-block columns.
pub fn read_paired_csv(path: &Path, x_cols: &[String], y_cols: &[String]) -> Result<PairedDataset> {
    if x_cols.is_empty() || y_cols.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    let x_idx = column_indices(&header, x_cols)?;
    let y_idx = column_indices(&header, y_cols)?;
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for &ci in &x_idx {
            xs.push(parse_cell(record.get(ci).unwrap_or(""), row, ci)?);
        }
        for &ci in &y_idx {
            ys.push(parse_cell(record.get(ci).unwrap_or(""), row, ci)?);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let x = Array2::from_shape_vec((n, x_idx.len()), xs).expect("shape consistent");
    let y = Array2::from_shape_vec((n, y_idx.len()), ys).expect("shape consistent");
    PairedDataset::new(x, y)
}

/// Write K-sample data with a `label` column followed by y0..y{q−1}.
/// Floats print in shortest round-trip form, so read-back is bit-identical.
pub fn write_labeled_csv(data: &LabeledDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["label".to_string()];
    header.extend((0..data.dim()).map(|j| format!("y{j}")));
    writer.write_record(&header)?;
    for i in 0..data.n() {
        let mut record = vec![data.group_name(data.labels()[i]).to_string()];
        record.extend(data.y().row(i).iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write independence data with columns x0..x{p−1}, y0..y{q−1}.
pub fn write_paired_csv(data: &PairedDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..data.dim_x()).map(|j| format!("x{j}")).collect();
    header.extend((0..data.dim_y()).map(|j| format!("y{j}")));
    writer.write_record(&header)?;
    for i in 0..data.n() {
        let mut record: Vec<String> = data.x().row(i).iter().map(|v| format!("{v}")).collect();
        record.extend(data.y().row(i).iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Column names for a paired-data CSV written by [`write_paired_csv`].
pub fn paired_default_columns(p: usize, q: usize) -> (Vec<String>, Vec<String>) {
    (
        (0..p).map(|j| format!("x{j}")).collect(),
        (0..q).map(|j| format!("y{j}")).collect(),
    )
}

pub fn report_to_json(report: &TestReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// CSV report: one row per center plus a summary row. Fixed columns; empty
/// cells where a field does not apply.
pub fn report_to_csv(report: &TestReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "row_type",
        "center_index",
        "center_origin",
        "statistic",
        "p_value",
        "pooling",
        "B",
        "seed",
    ])?;
    for (i, c) in report.per_center.iter().enumerate() {
        writer.write_record([
            "center",
            &i.to_string(),
            &c.center.origin,
            &format!("{}", c.statistic),
            &format!("{}", c.p_value),
            "",
            "",
            "",
        ])?;
    }
    writer.write_record([
        "summary",
        "",
        "",
        &format!("{}", report.statistic),
        &format!("{}", report.p_value),
        &report.method.pooling,
        &report.b.to_string(),
        &report.seed.to_string(),
    ])?;
    let bytes = writer.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn power_report_to_json(report: &PowerReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn power_report_to_csv(report: &PowerReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["n", "replications", "rejections", "rate", "mc_se"])?;
    for row in &report.rows {
        writer.write_record([
            row.n.to_string(),
            row.replications.to_string(),
            row.rejections.to_string(),
            format!("{}", row.rate),
            row.mc_se.map(|s| format!("{s}")).unwrap_or_default(),
        ])?;
    }
    let bytes = writer.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Write a string to a file, or stdout when `path` is `None`.
pub fn write_output(content: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(p)?;
            f.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
