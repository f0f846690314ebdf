//! Tabular time series ingested from CSV.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which CSV columns carry the entity key, time, numeric values and an
/// optional categorical color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableBindings {
    pub key_field: String,
    pub time_field: String,
    pub value_fields: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_field: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub key: String,
    pub time: f64,
    pub values: Vec<f64>,
    pub color: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("missing field `{0}` in header")]
    MissingField(String),
    #[error("row {row}: duplicate (key, time) = ({key}, {time})")]
    DuplicateKeyTime { row: usize, key: String, time: f64 },
    #[error("table has no rows")]
    EmptyTable,
    #[error("unparseable numeric values in rows {rows:?}")]
    Unparseable { rows: Vec<usize> },
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub bindings: TableBindings,
    records: Vec<Record>,
    index: BTreeMap<OrderedFloat<f64>, BTreeMap<String, usize>>,
}

impl DataTable {
    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.bindings.value_fields.iter().position(|f| f == name)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.index.keys().map(|t| t.0)
    }

    pub fn has_time(&self, time: f64) -> bool {
        self.index.get(&OrderedFloat(time)).is_some_and(|m| !m.is_empty())
    }

    pub fn get(&self, key: &str, time: f64) -> Option<&Record> {
        self.index
            .get(&OrderedFloat(time))
            .and_then(|m| m.get(key))
            .map(|&i| &self.records[i])
    }

    /// Records at `time`, ordered by key.
    pub fn at_time(&self, time: f64) -> impl Iterator<Item = &Record> + '_ {
        self.index
            .get(&OrderedFloat(time))
            .into_iter()
            .flat_map(|m| m.values())
            .map(|&i| &self.records[i])
    }

    /// Builds a table directly from records, enforcing the same invariants
    /// as CSV ingest.
    pub fn from_records(bindings: TableBindings, records: Vec<Record>) -> Result<Self, IngestError> {
        if records.is_empty() {
            return Err(IngestError::EmptyTable);
        }
        let mut index: BTreeMap<OrderedFloat<f64>, BTreeMap<String, usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.values.len() != bindings.value_fields.len() || r.values.iter().any(|v| !v.is_finite()) || !r.time.is_finite() {
                return Err(IngestError::Unparseable { rows: vec![i + 1] });
            }
            let slot = index.entry(OrderedFloat(r.time)).or_default();
            if slot.insert(r.key.clone(), i).is_some() {
                return Err(IngestError::DuplicateKeyTime {
                    row: i + 1,
                    key: r.key.clone(),
                    time: r.time,
                });
            }
        }
        Ok(Self {
            bindings,
            records,
            index,
        })
    }
}

/// Reads a headed CSV. Row numbers in errors count data rows from 1.
pub fn ingest_csv(bytes: &[u8], bindings: &TableBindings) -> Result<DataTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = reader.headers().map_err(|e| IngestError::Csv(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingField(name.to_string()))
    };
    let key_col = column(&bindings.key_field)?;
    let time_col = column(&bindings.time_field)?;
    let value_cols = bindings
        .value_fields
        .iter()
        .map(|f| column(f))
        .collect::<Result<Vec<_>, _>>()?;
    let color_col = bindings.color_field.as_deref().map(column).transpose()?;

    let mut records = Vec::new();
    let mut bad_rows = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| IngestError::Csv(e.to_string()))?;
        let num = |col: usize| {
            row.get(col)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
        };
        let time = num(time_col);
        let values: Option<Vec<f64>> = value_cols.iter().map(|&c| num(c)).collect();
        match (time, values) {
            (Some(time), Some(values)) => records.push(Record {
                key: row.get(key_col).unwrap_or_default().to_string(),
                time,
                values,
                color: color_col.map(|c| row.get(c).unwrap_or_default().to_string()),
            }),
            _ => bad_rows.push(row_no),
        }
    }
    if !bad_rows.is_empty() {
        return Err(IngestError::Unparseable { rows: bad_rows });
    }
    DataTable::from_records(bindings.clone(), records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings() -> TableBindings {
        TableBindings {
            key_field: "country".into(),
            time_field: "year".into(),
            value_fields: vec!["value".into()],
            color_field: None,
        }
    }

    #[test]
    fn three_rows() {
        let csv = "country,year,value\nPeru,2000,1\nChile,2000,2\nPeru,2001,3\n";
        let t = ingest_csv(csv.as_bytes(), &bindings()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.get("Peru", 2001.0).unwrap().values, vec![3.0]);
        assert_eq!(t.times().collect::<Vec<_>>(), vec![2000.0, 2001.0]);
        let keys: Vec<_> = t.at_time(2000.0).map(|r| r.key.as_str()).collect();
        assert_eq!(keys, vec!["Chile", "Peru"]);
    }

    #[test]
    fn missing_time_field() {
        let csv = "country,value\nPeru,1\n";
        assert_eq!(
            ingest_csv(csv.as_bytes(), &bindings()).unwrap_err(),
            IngestError::MissingField("year".into())
        );
    }

    #[test]
    fn duplicate_key_time() {
        let csv = "country,year,value\nPeru,2000,1\nPeru,2000,2\n";
        assert!(matches!(
            ingest_csv(csv.as_bytes(), &bindings()).unwrap_err(),
            IngestError::DuplicateKeyTime { row: 2, .. }
        ));
    }

    #[test]
    fn empty_and_bad_rows() {
        assert_eq!(
            ingest_csv(b"country,year,value\n", &bindings()).unwrap_err(),
            IngestError::EmptyTable
        );
        let csv = "country,year,value\nPeru,2000,x\nChile,2000,2\nBolivia,y,3\n";
        assert_eq!(
            ingest_csv(csv.as_bytes(), &bindings()).unwrap_err(),
            IngestError::Unparseable { rows: vec![1, 3] }
        );
    }
}
