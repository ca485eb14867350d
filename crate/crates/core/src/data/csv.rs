// SPDX-License-Identifier: MIT OR Apache-2.0

//! Comma-separated input with a header row, one row per time step.

use std::path::Path;

use crate::data::{Dataset, Transform};
use crate::error::{Error, Result};
use crate::series::SeriesPoint;

fn column_index(headers: &::csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn parse_cell(record: &::csv::StringRecord, idx: usize) -> Option<f64> {
    let v: f64 = record.get(idx)?.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Reads `y_column` and `feature_columns` from a CSV file. Rows with an empty
/// or non-numeric cell in any of those columns are dropped and counted.
pub fn load_csv(
    path: impl AsRef<Path>,
    y_column: &str,
    feature_columns: &[String],
    transform: Transform,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = ::csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader.headers()?.clone();
    let y_idx = column_index(&headers, y_column)?;
    let x_idx: Vec<usize> = feature_columns
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut dropped = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let Some(y) = parse_cell(&record, y_idx) else {
            dropped += 1;
            continue;
        };
        let x: Option<Vec<f64>> = x_idx.iter().map(|&i| parse_cell(&record, i)).collect();
        let Some(x) = x else {
            dropped += 1;
            continue;
        };
        let y = match transform {
            Transform::None => y,
            Transform::Log => {
                if y <= 0.0 {
                    // header is line 1
                    return Err(Error::NonPositiveLog { row: row + 2, value: y });
                }
                y.ln()
            }
        };
        points.push(SeriesPoint::new(points.len() as u64 + 1, x, y));
    }
    if dropped > 0 {
        log::info!("{}: dropped {dropped} malformed rows", path.display());
    }
    Ok(Dataset {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        points,
        y_column: y_column.to_string(),
        feature_columns: feature_columns.to_vec(),
        source: path.display().to_string(),
        transform,
        dropped_rows: dropped,
    })
}

/// Writes `t`, the response and the features under their column names.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = ::csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string(), dataset.y_column.clone()];
    header.extend(dataset.feature_columns.iter().cloned());
    writer.write_record(&header)?;
    for p in &dataset.points {
        let mut row = vec![p.t.to_string(), p.y.to_string()];
        row.extend(p.x.iter().map(|v| v.to_string()));
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn log_transform() {
        let f = file_with(&format!("date,price\na,1\nb,{}\n", std::f64::consts::E));
        let d = load_csv(f.path(), "price", &[], Transform::Log).unwrap();
        assert_eq!(d.ys(), vec![0.0, 1.0]);
        assert_eq!(d.points[1].t, 2);
    }

    #[test]
    fn identity_transform() {
        let f = file_with("y,x\n-3.5,1\n2,2\n");
        let d = load_csv(f.path(), "y", &["x".to_string()], Transform::None).unwrap();
        assert_eq!(d.ys(), vec![-3.5, 2.0]);
        assert_eq!(d.xs(), vec![vec![1.0], vec![2.0]]);
    }

    #[test]
    fn malformed_row_dropped() {
        let mut body = String::from("y,x\n");
        for i in 0..100 {
            if i == 37 {
                body.push_str("oops,1\n");
            } else {
                body.push_str(&format!("{i},{}\n", i * 2));
            }
        }
        let f = file_with(&body);
        let d = load_csv(f.path(), "y", &["x".to_string()], Transform::None).unwrap();
        assert_eq!(d.len(), 99);
        assert_eq!(d.dropped_rows, 1);
        assert!(d.points.iter().enumerate().all(|(i, p)| p.t == i as u64 + 1));
    }

    #[test]
    fn empty_cell_dropped() {
        let f = file_with("y,x\n1,\n2,3\n");
        let d = load_csv(f.path(), "y", &["x".to_string()], Transform::None).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.dropped_rows, 1);
    }

    #[test]
    fn errors() {
        let f = file_with("y\n1\n0\n");
        assert!(matches!(
            load_csv(f.path(), "y", &[], Transform::Log),
            Err(Error::NonPositiveLog { row: 3, .. })
        ));
        assert!(matches!(
            load_csv(f.path(), "price", &[], Transform::None),
            Err(Error::MissingColumn(_))
        ));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "y", &[], Transform::None),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let mut d = Dataset::from_values("demo", &[0.1, -2.0, 1e-300, 3.0 / 7.0]);
        d.feature_columns = vec!["a".into(), "b".into()];
        for (i, p) in d.points.iter_mut().enumerate() {
            p.x = vec![i as f64 / 3.0, -(i as f64).sqrt()];
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("demo.csv");
        write_csv(&d, &path).unwrap();
        let back = load_csv(&path, "y", &d.feature_columns, Transform::None).unwrap();
        assert_eq!(back.points, d.points);
        assert_eq!(back.dropped_rows, 0);
    }
}
