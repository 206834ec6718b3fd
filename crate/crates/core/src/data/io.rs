use std::path::Path;

use super::{Column, DatasetSchema, RawDataset};
use crate::{Error, Result};

/// What [`load_csv`] left out.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadReport {
    /// File line numbers (header is line 1) of rows dropped for missing cells.
    pub dropped: Vec<usize>,
}

/// Reads the outcome and covariate columns named in `schema` from a CSV file
/// with a header row. Other columns are ignored. Rows with an empty cell in
/// any used column are dropped and reported.
pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<(RawDataset, LoadReport)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("{} has no column `{name}`", path.display())))
    };

    let (cont_names, cat_names) = schema.covariates.required_columns();
    let mut numeric: Vec<(String, usize)> = vec![(schema.y1.clone(), 0), (schema.y2.clone(), 0)];
    numeric.extend(cont_names.into_iter().map(|n| (n, 0)));
    for (name, idx) in numeric.iter_mut() {
        *idx = find(name)?;
    }
    let text: Vec<(String, usize)> = cat_names
        .into_iter()
        .map(|n| find(&n).map(|i| (n, i)))
        .collect::<Result<_>>()?;

    let mut nums: Vec<Vec<f64>> = vec![Vec::new(); numeric.len()];
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); text.len()];
    let mut report = LoadReport::default();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let cell = |i: usize| record.get(i).unwrap_or("");
        if numeric.iter().chain(&text).any(|(_, i)| cell(*i).is_empty()) {
            report.dropped.push(line);
            continue;
        }
        for ((name, i), out) in numeric.iter().zip(nums.iter_mut()) {
            let raw = cell(*i);
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                row: line,
                column: name.clone(),
                detail: format!("`{raw}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row: line, column: name.clone(), detail: format!("`{raw}` is not finite") });
            }
            out.push(v);
        }
        for ((_, i), out) in text.iter().zip(labels.iter_mut()) {
            out.push(cell(*i).to_string());
        }
    }
    if !report.dropped.is_empty() {
        log::warn!(
            "{}: dropped {} row(s) with missing cells (lines {:?})",
            path.display(),
            report.dropped.len(),
            report.dropped
        );
    }

    let mut nums = nums.into_iter();
    let y1 = nums.next().unwrap_or_default();
    let y2 = nums.next().unwrap_or_default();
    let mut columns: Vec<(String, Column)> =
        numeric[2..].iter().map(|(n, _)| n.clone()).zip(nums.map(Column::Continuous)).collect();
    columns.extend(text.into_iter().map(|(n, _)| n).zip(labels.into_iter().map(Column::Categorical)));
    Ok((RawDataset::new(y1, y2, columns)?, report))
}
