//! Text formats: matrices with one row per line and comma-separated
//! rational vectors. Entries are integers or `p/q` with `q > 0`; floating
//! point literals are rejected so that chamber membership stays exact.

use std::fs;
use std::path::Path;

use num_traits::Zero;
use santalo_core::exact::{ExactMatrix, Rational};

use crate::error::{CliError, Result};

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || CliError::Rational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let q: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if q.is_zero() || q.sign() == num_bigint::Sign::Minus {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// `"1,4/5,4/5"` to a vector.
pub fn parse_rational_csv(s: &str) -> Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Err(CliError::Usage("empty vector".into()));
    }
    s.split(',').map(parse_rational).collect()
}

pub fn format_rational_csv(v: &[Rational]) -> String {
    v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses the matrix text format. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_matrix(text: &str) -> Result<ExactMatrix> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| CliError::Format { line: idx + 1, message: e.to_string() })?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::Format {
                    line: idx + 1,
                    message: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Format { line: 0, message: "matrix has no rows".into() });
    }
    Ok(ExactMatrix::from_rows(&rows)?)
}

pub fn format_matrix(m: &ExactMatrix) -> String {
    let mut out = String::new();
    for row in m.row_vecs() {
        out.push_str(&row.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: &Path) -> Result<ExactMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_matrix(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use santalo_core::exact::{rat, rational_vec};

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("4/5").unwrap(), rat(4, 5));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        for bad in ["0.5", "1/0", "1/-2", "x", "", "1e3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_rational_csv("1,4/5,4/5").unwrap(), rational_vec(&[(1, 1), (4, 5), (4, 5)]));
    }

    #[test]
    fn matrix_text() {
        let m = parse_matrix("# pentagon\n1 1 1 1 1\n2 1 0 1 0\n\n1 2 0 0 1\n").unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.cols(), 5);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        let err = parse_matrix("1 2\n3\n").unwrap_err();
        assert!(matches!(err, CliError::Format { line: 2, .. }));
        assert!(parse_matrix("1 0.5\n").is_err());
    }
}
