//! Rectangular numeric result tables and their CSV form.

use std::io::Write;

/// Column names, row-major cells and `#` metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// `(key, value)` pairs emitted as `# key: value` before the header.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Game runs that hit the iteration cap.
    pub nonconverged_runs: usize,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            nonconverged_runs: 0,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of column `name`, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Writes metadata, header and rows. Cells use 17 significant digits
    /// and lines end with `\n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (key, value) in &self.metadata {
            for line in value.lines() {
                writeln!(out, "# {key}: {line}")?;
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}
