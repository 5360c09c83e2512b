//! Plain-text matrix format.
//!
//! ```text
//! rows cols modulus
//! e e e ...
//! ```
//!
//! `modulus` is a prime, `Z` (integers) or `Q` (rationals written `num/den`).
//! One line per row, entries separated by single spaces. Writing then reading
//! any matrix returns an identical value; the written form is canonical and
//! is what certificate digests are computed over.

use std::io::{self, Write as _};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use super::{check_prime, parse_rational, IntMatrix, MatrixError, PrimeFieldMatrix, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyMatrix {
    Prime(PrimeFieldMatrix),
    Integer(IntMatrix),
    Rational(RationalMatrix),
}

impl AnyMatrix {
    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::Prime(m) => m.rows(),
            AnyMatrix::Integer(m) => m.rows(),
            AnyMatrix::Rational(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyMatrix::Prime(m) => m.cols(),
            AnyMatrix::Integer(m) => m.cols(),
            AnyMatrix::Rational(m) => m.cols(),
        }
    }

    /// Rank over the matrix's own field (the rationals for `Z` and `Q`).
    pub fn rank(&self) -> usize {
        match self {
            AnyMatrix::Prime(m) => m.rank(),
            AnyMatrix::Integer(m) => m.rank(),
            AnyMatrix::Rational(m) => m.rank(),
        }
    }

    pub fn field_token(&self) -> String {
        match self {
            AnyMatrix::Prime(m) => m.modulus().to_string(),
            AnyMatrix::Integer(_) => "Z".into(),
            AnyMatrix::Rational(_) => "Q".into(),
        }
    }
}

impl From<PrimeFieldMatrix> for AnyMatrix {
    fn from(m: PrimeFieldMatrix) -> Self {
        AnyMatrix::Prime(m)
    }
}

impl From<IntMatrix> for AnyMatrix {
    fn from(m: IntMatrix) -> Self {
        AnyMatrix::Integer(m)
    }
}

impl From<RationalMatrix> for AnyMatrix {
    fn from(m: RationalMatrix) -> Self {
        AnyMatrix::Rational(m)
    }
}

pub fn write_matrix(m: &AnyMatrix) -> String {
    let mut out = Vec::with_capacity(16 + m.rows() * (m.cols() * 2 + 1));
    write_matrix_to(m, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("ascii output")
}

/// Streams the canonical serialization row by row.
pub fn write_matrix_to<W: io::Write>(m: &AnyMatrix, w: &mut W) -> io::Result<()> {
    match m {
        AnyMatrix::Prime(pm) => write_prime_to(pm, w),
        AnyMatrix::Integer(im) => {
            writeln!(w, "{} {} Z", im.rows(), im.cols())?;
            write_rows(w, im.rows(), im.cols(), |line, i, j| write!(line, "{}", im.get(i, j)))
        }
        AnyMatrix::Rational(rm) => {
            writeln!(w, "{} {} Q", rm.rows(), rm.cols())?;
            write_rows(w, rm.rows(), rm.cols(), |line, i, j| {
                write!(line, "{}/{}", rm.get(i, j).numer(), rm.get(i, j).denom())
            })
        }
    }
}

fn write_rows<W: io::Write>(
    w: &mut W,
    rows: usize,
    cols: usize,
    mut entry: impl FnMut(&mut Vec<u8>, usize, usize) -> io::Result<()>,
) -> io::Result<()> {
    let mut line = Vec::new();
    for i in 0..rows {
        line.clear();
        for j in 0..cols {
            if j > 0 {
                line.push(b' ');
            }
            entry(&mut line, i, j)?;
        }
        line.push(b'\n');
        w.write_all(&line)?;
    }
    Ok(())
}

/// Same output as [`write_matrix_to`] for a borrowed GF(p) matrix.
pub fn write_prime_to<W: io::Write>(m: &PrimeFieldMatrix, w: &mut W) -> io::Result<()> {
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.modulus())?;
    let Some(g) = m.as_gf2() else {
        return write_rows(w, m.rows(), m.cols(), |line, i, j| write!(line, "{}", m.get(i, j)));
    };
    let cols = g.cols();
    let mut line = vec![b' '; 2 * cols];
    if cols > 0 {
        line[2 * cols - 1] = b'\n';
    }
    for i in 0..g.rows() {
        for (k, &word) in g.row(i).iter().enumerate() {
            let base = k * 64;
            for b in 0..64.min(cols - base) {
                line[2 * (base + b)] = b'0' + ((word >> b) & 1) as u8;
            }
        }
        if cols == 0 {
            w.write_all(b"\n")?;
        } else {
            w.write_all(&line)?;
        }
    }
    Ok(())
}

/// Hex SHA-256 of the canonical text serialization.
pub fn matrix_digest(m: &AnyMatrix) -> String {
    let mut hasher = Sha256::new();
    write_matrix_to(m, &mut hasher).expect("hashing never fails");
    hex::encode(hasher.finalize())
}

/// [`matrix_digest`] without wrapping the matrix.
pub fn prime_matrix_digest(m: &PrimeFieldMatrix) -> String {
    let mut hasher = Sha256::new();
    write_prime_to(m, &mut hasher).expect("hashing never fails");
    hex::encode(hasher.finalize())
}

fn perr(line: usize, msg: impl Into<String>) -> MatrixError {
    MatrixError::Parse { line, msg: msg.into() }
}

pub fn read_matrix(text: &str) -> Result<AnyMatrix, MatrixError> {
    let header = text.lines().next().ok_or_else(|| perr(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(perr(1, "header must be `rows cols modulus`"));
    }
    let rows: usize = fields[0].parse().map_err(|_| perr(1, "bad row count"))?;
    let cols: usize = fields[1].parse().map_err(|_| perr(1, "bad column count"))?;
    let body: Vec<(usize, &str)> = text.lines().enumerate().skip(1).map(|(i, l)| (i + 1, l)).collect();
    // trailing blank lines are tolerated; rows with zero columns are blank lines
    let body: Vec<(usize, &str)> = if cols == 0 {
        body.into_iter().take(rows).collect()
    } else {
        body.into_iter().filter(|(_, l)| !l.trim().is_empty()).collect()
    };
    if body.len() < rows {
        return Err(perr(body.len() + 2, format!("expected {rows} rows, found {}", body.len())));
    }
    if cols > 0 && body.len() > rows {
        return Err(perr(body[rows].0, "unexpected extra row"));
    }
    fn split(row: (usize, &str), cols: usize) -> Result<Vec<&str>, MatrixError> {
        let toks: Vec<&str> = row.1.split_whitespace().collect();
        if toks.len() != cols {
            return Err(perr(row.0, format!("expected {cols} entries, found {}", toks.len())));
        }
        Ok(toks)
    }
    match fields[2] {
        "Z" => {
            let mut m = IntMatrix::zeros(rows, cols);
            for (i, &row) in body.iter().take(rows).enumerate() {
                for (j, t) in split(row, cols)?.into_iter().enumerate() {
                    let v: BigInt = t.parse().map_err(|_| perr(row.0, format!("bad integer `{t}`")))?;
                    m.set(i, j, v);
                }
            }
            Ok(AnyMatrix::Integer(m))
        }
        "Q" => {
            let mut m = RationalMatrix::zeros(rows, cols);
            for (i, &row) in body.iter().take(rows).enumerate() {
                for (j, t) in split(row, cols)?.into_iter().enumerate() {
                    let v = parse_rational(t).ok_or_else(|| perr(row.0, format!("bad rational `{t}`")))?;
                    m.set(i, j, v);
                }
            }
            Ok(AnyMatrix::Rational(m))
        }
        tok => {
            let p: u64 = tok.parse().map_err(|_| perr(1, format!("bad modulus `{tok}`")))?;
            check_prime(p)?;
            let mut m = PrimeFieldMatrix::zeros(p, rows, cols)?;
            for (i, &row) in body.iter().take(rows).enumerate() {
                for (j, t) in split(row, cols)?.into_iter().enumerate() {
                    let v: u64 = t.parse().map_err(|_| perr(row.0, format!("bad residue `{t}`")))?;
                    if v >= p {
                        return Err(perr(row.0, format!("entry {v} not reduced modulo {p}")));
                    }
                    if v != 0 {
                        m.set(i, j, v as u32);
                    }
                }
            }
            Ok(AnyMatrix::Prime(m))
        }
    }
}
