//! CSV tables: initial data `y,B0,A0`, flow data `y,f,h`, and solution rows
//! `t,r,x,y,B,A,residual`.

use std::io::{Read, Write};
use std::sync::Arc;

use super::data::{FlowData, Pchip};
use super::FlowError;

pub const INITIAL_HEADER: [&str; 3] = ["y", "B0", "A0"];
pub const FLOW_HEADER: [&str; 3] = ["y", "f", "h"];
pub const SOLUTION_HEADER: [&str; 7] = ["t", "r", "x", "y", "B", "A", "residual"];

/// Columns of a three-column numeric table, validated for strictly
/// increasing first column and finite entries.
fn read_three_columns<R: Read>(reader: R, header: [&str; 3]) -> Result<[Vec<f64>; 3], FlowError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let found = rdr.headers().map_err(|e| FlowError::Csv(e.to_string()))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(FlowError::Csv(format!(
            "expected header {}, found {}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut cols: [Vec<f64>; 3] = Default::default();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| FlowError::Csv(e.to_string()))?;
        if record.len() != 3 {
            return Err(FlowError::Csv(format!("row {}: expected 3 fields", line + 1)));
        }
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| FlowError::Csv(format!("row {}: bad number {field:?}", line + 1)))?;
            if !v.is_finite() {
                return Err(FlowError::Csv(format!("row {}: non-finite value", line + 1)));
            }
            col.push(v);
        }
    }
    if cols[0].len() < 2 {
        return Err(FlowError::TooFewSamples { needed: 2, got: cols[0].len() });
    }
    if cols[0].windows(2).any(|w| w[1] <= w[0]) {
        return Err(FlowError::Csv("y column must be strictly increasing".into()));
    }
    Ok(cols)
}

/// Sampled initial data `B0(y)`, `A0(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialTable {
    pub y: Vec<f64>,
    pub b0: Vec<f64>,
    pub a0: Vec<f64>,
}

impl InitialTable {
    pub fn read<R: Read>(reader: R) -> Result<Self, FlowError> {
        let [y, b0, a0] = read_three_columns(reader, INITIAL_HEADER)?;
        if let Some(i) = b0.iter().zip(&a0).position(|(b, a)| !(*b > 0.0 && *a > 0.0)) {
            return Err(FlowError::Csv(format!("row {}: B0 and A0 must be positive", i + 1)));
        }
        Ok(InitialTable { y, b0, a0 })
    }

    /// Interpolates both columns and induces `(f, h)`.
    pub fn to_flow_data(&self, rel_tol: f64) -> Result<FlowData, FlowError> {
        let b0 = Pchip::new(self.y.clone(), self.b0.clone())?;
        let a0 = Pchip::new(self.y.clone(), self.a0.clone())?;
        Ok(FlowData::from_initial_data(Arc::new(b0), Arc::new(a0), rel_tol))
    }
}

/// Reads a `y,f,h` table into interpolated flow data.
pub fn read_flow_table<R: Read>(reader: R) -> Result<FlowData, FlowError> {
    let [y, f, h] = read_three_columns(reader, FLOW_HEADER)?;
    Ok(FlowData::new(Pchip::new(y.clone(), f)?, Pchip::new(y, h)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionRow {
    pub t: f64,
    pub r: f64,
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub a: f64,
    pub residual: f64,
}

/// Shortest round-trip representation.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_solution<W: Write>(writer: W, rows: &[SolutionRow]) -> Result<(), FlowError> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| FlowError::Csv(e.to_string());
    w.write_record(SOLUTION_HEADER).map_err(err)?;
    for row in rows {
        let fields = [row.t, row.r, row.x, row.y, row.b, row.a, row.residual].map(format_f64);
        w.write_record(&fields).map_err(err)?;
    }
    w.flush().map_err(|e| FlowError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_initial_table() {
        let text = "y, B0, A0\n1.0, 0.5, 0.2\n2.0, 0.7, 0.3\n";
        let t = InitialTable::read(text.as_bytes()).unwrap();
        assert_eq!(t.y, vec![1.0, 2.0]);
        assert_eq!(t.a0, vec![0.2, 0.3]);
    }

    #[test]
    fn rejects_bad_tables() {
        for text in [
            "y,B,A\n1,1,1\n2,1,1\n",
            "y,B0,A0\n1,1,1\n",
            "y,B0,A0\n1,1,1\n1,1,1\n",
            "y,B0,A0\n1,1,1\n2,-1,1\n",
            "y,B0,A0\n1,1,1\n2,x,1\n",
            "y,B0,A0\n1,1,1\n2,inf,1\n",
            "y,B0,A0\n1,1\n2,1,1\n",
        ] {
            assert!(InitialTable::read(text.as_bytes()).is_err(), "{text}");
        }
    }

    #[test]
    fn flow_table_round_trip_values() {
        let text = "y,f,h\n0,0.1,-1\n1,0.2,-1\n2,0.1,-1\n";
        let data = read_flow_table(text.as_bytes()).unwrap();
        assert_eq!(data.f.value(1.0).unwrap(), 0.2);
        assert_eq!(data.h.value(1.5).unwrap(), -1.0);
    }

    #[test]
    fn writes_solution_header() {
        let mut out = Vec::new();
        let row = SolutionRow { t: 0.0, r: 1.0, x: 1.0, y: 1.0, b: 0.5, a: 0.25, residual: 1e-20 };
        write_solution(&mut out, &[row]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "t,r,x,y,B,A,residual\n0.0,1.0,1.0,1.0,0.5,0.25,1e-20\n");
    }
}
