use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{Dataset, DatasetError, FeatureKind, Record, Schema};

/// Loads a headered CSV file. Row numbers in errors count data rows from 1.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset, DatasetError> {
    read_csv(File::open(path)?, schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset, DatasetError> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };

    let label_col = column(&schema.label)?;
    let sensitive_col = column(&schema.sensitive)?;
    let mut numeric_cols = Vec::new();
    let mut categorical_cols = Vec::new();
    for f in &schema.features {
        let idx = column(&f.name)?;
        match f.kind {
            FeatureKind::Numeric => numeric_cols.push((idx, f.name.as_str())),
            FeatureKind::Categorical => categorical_cols.push(idx),
        }
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let cell = |idx: usize| row.get(idx).unwrap_or("");
        let label = schema.label_of(cell(label_col), row_no)?;
        let sensitive = cell(sensitive_col).to_string();
        let privileged = schema.is_privileged(&sensitive, row_no)?;
        let numeric = numeric_cols
            .iter()
            .map(|&(idx, name)| {
                let raw = cell(idx);
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| DatasetError::ParseNumeric {
                        row: row_no,
                        column: name.to_string(),
                        value: raw.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let categorical = categorical_cols
            .iter()
            .map(|&idx| cell(idx).to_string())
            .collect();
        records.push(Record {
            numeric,
            categorical,
            label,
            privileged,
            sensitive,
        });
    }
    Dataset::new(Arc::new(schema.clone()), records)
}

/// Writes `d` as CSV: feature columns in schema order, then the sensitive
/// column (unless it is already a feature), then the label.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<(), DatasetError> {
    let schema = d.schema();
    let sensitive_is_feature = schema.features.iter().any(|f| f.name == schema.sensitive);
    let mut w = csv::Writer::from_writer(writer);

    let mut header: Vec<&str> = schema.features.iter().map(|f| f.name.as_str()).collect();
    if !sensitive_is_feature {
        header.push(&schema.sensitive);
    }
    header.push(&schema.label);
    w.write_record(&header)?;

    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for r in d.records() {
        row.clear();
        let (mut num, mut cat) = (r.numeric.iter(), r.categorical.iter());
        for f in &schema.features {
            match f.kind {
                FeatureKind::Numeric => row.push(num.next().unwrap().to_string()),
                FeatureKind::Categorical => row.push(cat.next().unwrap().clone()),
            }
        }
        if !sensitive_is_feature {
            row.push(r.sensitive.clone());
        }
        row.push(schema.label_text(r.label).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
