//! Numeric CSV tables. Units live in the header names (`pressure_kpa`,
//! `angle_deg`, `torque_nm`, ...). Numbers are written with six significant
//! digits in `%g` style; `-0` is written as `0` and NaN as `nan`.

use std::collections::BTreeSet;
use std::io::Write;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("empty table: no header row")]
    Empty,
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("empty column name at position {0}")]
    EmptyColumn(usize),
    #[error("row {row}: expected {expected} fields, got {got}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NotNumeric { row: usize, column: String, value: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Result<Self, CsvError> {
        let header: Vec<String> = header.into_iter().map(Into::into).collect();
        check_header(&header)?;
        Ok(Self { header, rows: Vec::new() })
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<(), CsvError> {
        if row.len() != self.header.len() {
            return Err(CsvError::Ragged { row: self.rows.len() + 1, expected: self.header.len(), got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn parse(text: &str) -> Result<Self, CsvError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
        let mut records = reader.records();
        let header: Vec<String> = match records.next() {
            Some(r) => r?.iter().map(|s| s.trim().to_string()).collect(),
            None => return Err(CsvError::Empty),
        };
        check_header(&header)?;
        let mut rows = Vec::new();
        for (i, rec) in records.enumerate() {
            let rec = rec?;
            let row = i + 1;
            if rec.len() != header.len() {
                return Err(CsvError::Ragged { row, expected: header.len(), got: rec.len() });
            }
            let values = rec
                .iter()
                .zip(&header)
                .map(|(v, column)| {
                    let v = v.trim();
                    v.parse::<f64>().map_err(|_| CsvError::NotNumeric { row, column: column.clone(), value: v.to_string() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(values);
        }
        Ok(Self { header, rows })
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CsvError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| format_number(x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        // writing to a Vec cannot fail
        let _ = self.write_to(&mut buf);
        String::from_utf8(buf).unwrap_or_default()
    }
}

fn check_header(header: &[String]) -> Result<(), CsvError> {
    if header.is_empty() {
        return Err(CsvError::Empty);
    }
    let mut seen = BTreeSet::new();
    for (i, h) in header.iter().enumerate() {
        if h.is_empty() {
            return Err(CsvError::EmptyColumn(i));
        }
        if !seen.insert(h.as_str()) {
            return Err(CsvError::DuplicateColumn(h.clone()));
        }
    }
    Ok(())
}

/// Six significant digits, `%g` style.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = trim_zeros(&s);
        if s == "-0" { "0".into() } else { s }
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (112.2345678, "112.235"),
            (30.8132, "30.8132"),
            (1.0e-7, "1e-07"),
            (123456789.0, "1.23457e+08"),
            (999999.6, "1e+06"),
            (0.000123456789, "0.000123457"),
            (-1e-300 * 1e-300, "0"),
        ];
        for (x, s) in cases {
            assert_eq!(format_number(x), s, "{x}");
        }
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn round_trip() {
        let mut t = CsvTable::new(["pressure_kpa", "angle_deg"]).unwrap();
        t.push(vec![10.0, 12.25]).unwrap();
        t.push(vec![20.0, f64::NAN]).unwrap();
        let s = t.to_csv_string();
        assert_eq!(s, "pressure_kpa,angle_deg\n10,12.25\n20,nan\n");
        let back = CsvTable::parse(&s).unwrap();
        assert_eq!(back.header, t.header);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][1].is_nan());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(CsvTable::parse(""), Err(CsvError::Empty)));
        assert!(matches!(CsvTable::parse("a,a\n1,2\n"), Err(CsvError::DuplicateColumn(_))));
        assert!(matches!(CsvTable::parse("a,b\n1\n"), Err(CsvError::Ragged { row: 1, .. })));
        assert!(matches!(CsvTable::parse("a,b\n1,x\n"), Err(CsvError::NotNumeric { .. })));
        assert!(CsvTable::new(["a", ""]).is_err());
        let mut t = CsvTable::new(["a"]).unwrap();
        assert!(t.push(vec![1.0, 2.0]).is_err());
    }
}
