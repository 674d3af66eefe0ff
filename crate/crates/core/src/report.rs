//! CSV output shared by the table emitters.

use crate::error::{Error, Result};

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a header and rows as CSV text.
pub fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn table_layout() {
        let t = csv_table(&["a", "b"], vec![vec!["1".to_string(), "x,y".to_string()]]).unwrap();
        assert_eq!(t, "a,b\n1,\"x,y\"\n");
    }
}
