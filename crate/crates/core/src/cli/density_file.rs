//! Plain-text density matrices: a header line `n=<int>` followed by `2^n` rows
//! of `2^n` whitespace-separated complex entries written as `a+bi`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dicke::{DensityOperator, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};

pub fn parse_complex(token: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("invalid complex entry {token:?} (expected a+bi)"));
    let body = token.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // the sign separating real and imaginary parts: not leading, not an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

pub fn parse_density(text: &str) -> Result<DensityOperator> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty density-matrix file".into()))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected header n=<int>, got {header:?}")))?;
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::Parse(format!("qubit count {n} outside 1..={MAX_DENSE_QUBITS}")));
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut rows = 0;
    for (r, line) in lines.enumerate() {
        if r >= dim {
            return Err(Error::Parse(format!("more than {dim} rows")));
        }
        let entries = line.split_whitespace().map(parse_complex).collect::<Result<Vec<_>>>()?;
        if entries.len() != dim {
            return Err(Error::Parse(format!("row {} has {} entries, expected {dim}", r + 1, entries.len())));
        }
        for (c, z) in entries.into_iter().enumerate() {
            matrix[(r, c)] = z;
        }
        rows += 1;
    }
    if rows != dim {
        return Err(Error::Parse(format!("found {rows} rows, expected {dim}")));
    }
    DensityOperator::new(n, matrix)
}

pub fn format_density(rho: &DensityOperator) -> String {
    let m = rho.matrix();
    let mut out = format!("n={}\n", rho.qubits());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format_complex(m[(r, c)])).collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a String");
    }
    out
}

pub fn load_density(path: &Path) -> Result<DensityOperator> {
    parse_density(&std::fs::read_to_string(path)?)
}

pub fn save_density(path: &Path, rho: &DensityOperator) -> Result<()> {
    std::fs::write(path, format_density(rho))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("0.25+0i").unwrap(), Complex64::new(0.25, 0.0));
        assert_eq!(parse_complex("-1e-3-2.5E+2i").unwrap(), Complex64::new(-1e-3, -250.0));
        assert!(parse_complex("1+-0i").is_err());
        assert!(parse_complex("0.5").is_err());
        assert!(parse_complex("abc+1i").is_err());
        let z = Complex64::new(0.1, -1.0 / 3.0);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn scaled_identity_round_trip() {
        let rho = DensityOperator::maximally_mixed(3).unwrap();
        let back = parse_density(&format_density(&rho)).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() <= 1e-15);
    }

    #[test]
    fn rejects_trace_defect() {
        let text = "n=1\n0.45+0i 0+0i\n0+0i 0.45+0i\n";
        let err = parse_density(text).unwrap_err();
        assert!(matches!(err, Error::NonPhysical(_)));
        assert!(err.to_string().contains("trace"), "{err}");
    }

    #[test]
    fn rejects_hermiticity_defect_with_magnitude() {
        let text = "n=1\n0.5+0i 0.001+0i\n0+0i 0.5+0i\n";
        let err = parse_density(text).unwrap_err().to_string();
        assert!(err.contains("Hermiticity defect 1e-3"), "{err}");
    }

    #[test]
    fn rejects_malformed_layout() {
        assert!(parse_density("").is_err());
        assert!(parse_density("m=1\n").is_err());
        assert!(parse_density("n=1\n0.5+0i 0+0i\n").is_err());
        assert!(parse_density("n=1\n0.5+0i\n0+0i 0.5+0i\n").is_err());
    }
}
