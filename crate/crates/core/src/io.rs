//! CSV formats.
//!
//! Dataset CSV: header row, all numeric, the last column is the target.
//! Prediction-matrix CSV: header of model ids followed by a final column
//! named `__target__`.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::harness::Dataset;
use crate::types::{PredictionMatrix, TargetVector};

pub const TARGET_COLUMN: &str = "__target__";

fn read_table<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Parse("missing header row".into()));
    }
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "row {}, column `{}`: `{field}` is not a number",
                        line + 1,
                        header.get(j).map_or("?", String::as_str)
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn column_major(rows: &[Vec<f64>], cols: std::ops::Range<usize>) -> Vec<Vec<f64>> {
    cols.map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub fn read_dataset<R: Read>(reader: R, name: &str) -> Result<Dataset> {
    let (header, rows) = read_table(reader)?;
    if header.len() < 2 {
        return Err(Error::DimensionMismatch(
            "dataset needs at least one feature column and a target column".into(),
        ));
    }
    let d = header.len() - 1;
    let features = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let target = rows.iter().map(|r| r[d]).collect();
    Dataset::new(name, features, target)
}

pub fn write_dataset<W: Write>(writer: W, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ds.features.ncols()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for i in 0..ds.nrows() {
        let mut row: Vec<String> = (0..ds.features.ncols())
            .map(|j| ds.features[(i, j)].to_string())
            .collect();
        row.push(ds.target[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_prediction_matrix<R: Read>(reader: R) -> Result<(PredictionMatrix, TargetVector)> {
    let (header, rows) = read_table(reader)?;
    if header.last().map(String::as_str) != Some(TARGET_COLUMN) {
        return Err(Error::Parse(format!(
            "last column must be named `{TARGET_COLUMN}`"
        )));
    }
    let p = header.len() - 1;
    let ids = header[..p].to_vec();
    let columns = column_major(&rows, 0..p);
    let x = if p == 0 {
        return Err(Error::Empty(
            "prediction matrix has no model columns".into(),
        ));
    } else {
        PredictionMatrix::from_columns(&columns, ids)?
    };
    let y = TargetVector::new(rows.iter().map(|r| r[p]).collect())?;
    Ok((x, y))
}

pub fn write_prediction_matrix<W: Write>(
    writer: W,
    x: &PredictionMatrix,
    y: &TargetVector,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = x.column_ids().iter().map(String::as_str).collect();
    header.push(TARGET_COLUMN);
    w.write_record(&header)?;
    for i in 0..x.nrows() {
        let mut row: Vec<String> = (0..x.ncols()).map(|j| x.column(j)[i].to_string()).collect();
        row.push(y.values()[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_matrix_round_trip() {
        let x = PredictionMatrix::from_columns(
            &[vec![0.1, 1.0 / 3.0, -2e-9], vec![1e300, 5.0, 6.5]],
            vec!["ridge:alpha=0.1,solver=svd".into(), "b".into()],
        )
        .unwrap();
        let y = TargetVector::new(vec![1.0, 2.0, 3.25]).unwrap();
        let mut buf = Vec::new();
        write_prediction_matrix(&mut buf, &x, &y).unwrap();
        let (x2, y2) = read_prediction_matrix(buf.as_slice()).unwrap();
        assert_eq!(x, x2);
        assert_eq!(y, y2);
    }

    #[test]
    fn missing_target_column_is_a_parse_error() {
        let err = read_prediction_matrix("a,b\n1,2\n3,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn non_numeric_is_a_parse_error() {
        let err = read_prediction_matrix("a,__target__\n1,2\nx,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn ragged_rows_are_a_parse_error() {
        let err = read_prediction_matrix("a,__target__\n1,2\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn single_row_is_a_dimension_error() {
        let err = read_prediction_matrix("a,__target__\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Empty(_)));
    }

    #[test]
    fn dataset_last_column_is_target() {
        let text = "a,b,t\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n2,2,2\n3,3,4\n";
        let ds = read_dataset(text.as_bytes(), "tiny").unwrap();
        assert_eq!(ds.features.ncols(), 2);
        assert_eq!(ds.target, vec![3.0, 6.0, 9.0, 1.0, 2.0, 4.0]);
    }
}
