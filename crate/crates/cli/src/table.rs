use std::io::Write;

use rainbow_core::numeric::format_sig12;

/// Rows of already-formatted cells under a fixed header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match the header");
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format_sig12(x)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn emit_csv<W: Write>(table: &Table, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_for_empty_tables() {
        let mut buf = Vec::new();
        emit_csv(&Table::new(&["a", "b"]), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n");
    }

    #[test]
    fn quotes_cells_with_commas() {
        let mut t = Table::new(&["x", "cover"]);
        t.push(vec![num(1.0 / 3.0), "{\"a\":1,\"b\":2}".into()]);
        let mut buf = Vec::new();
        emit_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,cover\n0.333333333333,\"{\"\"a\"\":1,\"\"b\"\":2}\"\n");
    }
}
