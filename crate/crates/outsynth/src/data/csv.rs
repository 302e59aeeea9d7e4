//! Numeric CSV with a mandatory header row.
//!
//! Floats are written in shortest round-trip form, so a written file reloads
//! to bit-identical values and identical runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Load an all-numeric CSV. Returns the header names and the value matrix.
pub fn load_csv_matrix(path: impl AsRef<Path>) -> Result<(Vec<String>, Array2<f64>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| Error::data(format!("{}: empty file", path.display())))?;
    let header: Vec<String> = header_line.split(',').map(|s| s.trim().to_string()).collect();
    let ncols = header.len();

    let mut values = Vec::new();
    let mut nrows = 0usize;
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            return Err(Error::data(format!(
                "{}:{}: {} fields, header has {ncols}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|e| {
                Error::data(format!(
                    "{}:{}: column {col} ('{}'): {e}",
                    path.display(),
                    lineno + 1,
                    field.trim()
                ))
            })?;
            values.push(v);
        }
        nrows += 1;
    }
    if nrows == 0 {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }
    let matrix = Array2::from_shape_vec((nrows, ncols), values)
        .expect("row/col bookkeeping is consistent");
    Ok((header, matrix))
}

/// Write a matrix as CSV with the given header. Values use shortest
/// round-trip formatting.
pub fn write_csv_matrix(
    path: impl AsRef<Path>,
    header: &[impl AsRef<str>],
    matrix: &Array2<f64>,
) -> Result<()> {
    let path = path.as_ref();
    if header.len() != matrix.ncols() {
        return Err(Error::data(format!(
            "write_csv_matrix: {} header fields for {} columns",
            header.len(),
            matrix.ncols()
        )));
    }
    let mut out = String::new();
    out.push_str(
        &header
            .iter()
            .map(|h| h.as_ref())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in matrix.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let m = arr2(&[[0.1, -2.5e-17, 3.0], [f64::MIN_POSITIVE, 1.0 / 3.0, -0.0]]);
        write_csv_matrix(&p, &["a", "b", "c"], &m).unwrap();
        let (header, loaded) = load_csv_matrix(&p).unwrap();
        assert_eq!(header, vec!["a", "b", "c"]);
        assert_eq!(loaded.dim(), (2, 3));
        for (x, y) in m.iter().zip(loaded.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn identical_writes_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let m = arr2(&[[1.0, 2.0], [3.5, -0.25]]);
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_csv_matrix(&p1, &["x", "y"], &m).unwrap();
        write_csv_matrix(&p2, &["x", "y"], &m).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn malformed_rows_are_reported_with_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "a,b\n1.0,2.0\n3.0\n").unwrap();
        let err = load_csv_matrix(&p).unwrap_err();
        assert!(format!("{err}").contains(":3:"), "{err}");

        std::fs::write(&p, "a,b\n1.0,zebra\n").unwrap();
        let err = load_csv_matrix(&p).unwrap_err();
        assert!(format!("{err}").contains("zebra"), "{err}");

        std::fs::write(&p, "a,b\n").unwrap();
        assert!(load_csv_matrix(&p).is_err());
    }
}
