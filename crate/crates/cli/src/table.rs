//! Small helpers shared by the CSV readers and writers.

use std::io::{Read, Write};

use crate::error::{FormatError, Result};

/// Rows of a headed CSV with the requested columns located by name.
pub(crate) struct Table {
    columns: Vec<usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    /// `line_offset` is added to the reader's line numbers, for input that
    /// starts part-way into a file.
    pub(crate) fn read<R: Read>(input: R, wanted: &[&'static str], line_offset: u64) -> Result<Table> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = reader.headers()?.clone();
        let columns = wanted
            .iter()
            .map(|name| {
                header
                    .iter()
                    .position(|h| h == *name)
                    .ok_or(FormatError::MissingColumn(name))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line()) + line_offset;
                FormatError::MalformedRow {
                    line,
                    reason: e.to_string(),
                }
            })?;
            let line = record.position().map_or(0, |p| p.line()) + line_offset;
            rows.push((line, record));
        }
        Ok(Table { columns, rows })
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn line(&self, row: usize) -> u64 {
        self.rows[row].0
    }

    pub(crate) fn text(&self, row: usize, column: usize) -> &str {
        let (_, record) = &self.rows[row];
        record.get(self.columns[column]).unwrap_or("")
    }

    pub(crate) fn number(&self, row: usize, column: usize, name: &str) -> Result<f64> {
        let text = self.text(row, column);
        text.parse::<f64>().map_err(|_| FormatError::MalformedRow {
            line: self.line(row),
            reason: format!("column `{name}`: `{text}` is not a number"),
        })
    }
}

pub(crate) fn write_rows<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}
