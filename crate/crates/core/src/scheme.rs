//! Schemes: `r x 3` tables of `n x n` matrices over GF(p).
//!
//! A scheme `(A_l, B_l, C_l)` is valid when `sum_l A_l ⊗ B_l ⊗ C_l` equals
//! `sum_{i,j,k} E_ik ⊗ E_kj ⊗ E_ji`, the tensor of `C^T = A B`. The third
//! matrix of every row is therefore the transpose of the usual coefficient
//! matrix of the output entries.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Mat;
use crate::symmetry::Permutation;

/// One multiplication: `(a, b, c)`. Rows order lexicographically by `a`,
/// then `b`, then `c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Row {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
}

impl Row {
    pub fn mats(&self) -> [Mat; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_mats(m: [Mat; 3]) -> Row {
        Row { a: m[0], b: m[1], c: m[2] }
    }

    pub fn rank_vector(&self) -> [u8; 3] {
        [self.a.rank() as u8, self.b.rank() as u8, self.c.rank() as u8]
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Scheme {
    field: Field,
    n: usize,
    rows: Vec<Row>,
}

impl Scheme {
    pub fn new(field: Field, n: usize, rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyScheme);
        }
        for row in &rows {
            for m in row.mats() {
                if m.n() != n || m.field() != field {
                    return Err(Error::ShapeMismatch(format!("matrix {m} is not a {n}x{n} matrix over {field}")));
                }
            }
        }
        Ok(Scheme { field, n, rows })
    }

    /// Rows of `3 n^2` signed integers (A, B, C row-major), reduced mod p.
    pub fn from_signed_rows(field: Field, n: usize, rows: &[&[i64]]) -> Result<Self> {
        let nn = n * n;
        let rows = rows
            .iter()
            .map(|e| {
                if e.len() != 3 * nn {
                    return Err(Error::ShapeMismatch(format!("row has {} entries, expected {}", e.len(), 3 * nn)));
                }
                Ok(Row {
                    a: Mat::from_signed(field, n, &e[..nn])?,
                    b: Mat::from_signed(field, n, &e[nn..2 * nn])?,
                    c: Mat::from_signed(field, n, &e[2 * nn..])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Scheme::new(field, n, rows)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }

    pub fn same_shape(&self, other: &Scheme) -> bool {
        self.field == other.field && self.n == other.n && self.r() == other.r()
    }

    /// Checks the Brent equations
    /// `sum_l a[i1,i2] b[j1,j2] c[k1,k2] = [i2=j1][j2=k1][k2=i1]` over GF(p).
    pub fn verify(&self) -> bool {
        let n = self.n;
        let nn = n * n;
        let p = self.field.modulus() as u64;
        let mut tensor = vec![0u64; nn * nn * nn];
        for row in &self.rows {
            let (a, b, c) = (row.a.row_major(), row.b.row_major(), row.c.row_major());
            for (ia, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
                for (ib, &y) in b.iter().enumerate().filter(|(_, &y)| y != 0) {
                    let xy = x as u64 * y as u64 % p;
                    let base = (ia * nn + ib) * nn;
                    for (ic, &z) in c.iter().enumerate() {
                        tensor[base + ic] += xy * z as u64;
                    }
                }
            }
        }
        for i1 in 0..n {
            for i2 in 0..n {
                for j1 in 0..n {
                    for j2 in 0..n {
                        for k1 in 0..n {
                            for k2 in 0..n {
                                let idx = ((i1 * n + i2) * nn + j1 * n + j2) * nn + k1 * n + k2;
                                let expect = u64::from(i2 == j1 && j2 == k1 && k2 == i1);
                                if tensor[idx] % p != expect {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    pub fn rank_pattern(&self) -> RankPattern {
        RankPattern { entries: self.rows.iter().map(Row::rank_vector).collect() }
    }

    /// Indices of rows whose three matrices are all zero.
    pub fn lint(&self) -> Vec<usize> {
        (0..self.r()).filter(|&i| self.rows[i].is_zero()).collect()
    }

    /// Transposes every third matrix, converting between the `C = A B`
    /// convention used by most published schemes and the `C^T` convention
    /// used here.
    pub fn transpose_c(&self) -> Scheme {
        let rows = self.rows.iter().map(|r| Row { a: r.a, b: r.b, c: r.c.transpose() }).collect();
        Scheme { field: self.field, n: self.n, rows }
    }

    /// Canonical text form: header `scheme <n> <r> <p>` and one line of
    /// `3 n^2` integers per row, LF terminated.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scheme {} {} {}", self.n, self.r(), self.field.modulus()).unwrap();
        for row in &self.rows {
            let mut first = true;
            for m in row.mats() {
                for x in m.row_major() {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    write!(out, "{x}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the canonical serialization.
    pub fn canonical_digest(&self) -> [u8; 32] {
        Sha256::digest(self.serialize().as_bytes()).into()
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.canonical_digest())
    }

    pub fn to_document(&self) -> SchemeDocument {
        SchemeDocument {
            field: self.field.modulus() as u32,
            n: self.n,
            r: self.r(),
            rows: self.rows.iter().map(|r| RowDocument { a: r.a.rows(), b: r.b.rows(), c: r.c.rows() }).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("scheme documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Scheme> {
        let doc: SchemeDocument =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        doc.into_scheme()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Lexicographic comparison row by row; errors on differing shapes.
pub fn scheme_cmp(s1: &Scheme, s2: &Scheme) -> Result<Ordering> {
    if !s1.same_shape(s2) {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare (n={}, r={}, {}) with (n={}, r={}, {})",
            s1.n,
            s1.r(),
            s1.field,
            s2.n,
            s2.r(),
            s2.field
        )));
    }
    Ok(s1.rows.cmp(&s2.rows))
}

/// Structured form accepted and emitted with `--json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub field: u32,
    pub n: usize,
    pub r: usize,
    pub rows: Vec<RowDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDocument {
    pub a: Vec<Vec<u8>>,
    pub b: Vec<Vec<u8>>,
    pub c: Vec<Vec<u8>>,
}

impl SchemeDocument {
    pub fn into_scheme(self) -> Result<Scheme> {
        let field = Field::new(self.field)?;
        if self.rows.len() != self.r {
            return Err(Error::ShapeMismatch(format!(
                "document declares r = {} but has {} rows",
                self.r,
                self.rows.len()
            )));
        }
        let n = self.n;
        let mat = |m: &Vec<Vec<u8>>| -> Result<Mat> {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::ShapeMismatch(format!("matrix is not {n}x{n}")));
            }
            Mat::from_row_major(field, n, &m.concat())
        };
        let rows = self
            .rows
            .iter()
            .map(|r| Ok(Row { a: mat(&r.a)?, b: mat(&r.b)?, c: mat(&r.c)? }))
            .collect::<Result<Vec<_>>>()?;
        Scheme::new(field, n, rows)
    }
}

fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let tok = &tail[..len];
        let col = offset + start + 1;
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

/// Parses every scheme block in `text`. Blank lines and lines starting with
/// `#` are ignored.
pub fn parse(text: &str) -> Result<Vec<Scheme>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let mut out = Vec::new();
    while let Some((lineno, header)) = lines.next() {
        let toks: Vec<_> = tokens(header).collect();
        if toks.first().map(|t| t.1) != Some("scheme") {
            return Err(Error::parse(lineno, toks.first().map_or(1, |t| t.0), "expected `scheme <n> <r> <p>` header"));
        }
        if toks.len() != 4 {
            let col = toks.get(4).map_or(header.len() + 1, |t| t.0);
            return Err(Error::parse(lineno, col, format!("header has {} fields, expected 4", toks.len())));
        }
        let num = |k: usize| -> Result<usize> {
            toks[k]
                .1
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, toks[k].0, format!("bad number {:?}", toks[k].1)))
        };
        let (n, r, p) = (num(1)?, num(2)?, num(3)?);
        if n == 0 || n > crate::matrix::MAX_DIM {
            return Err(Error::parse(lineno, toks[1].0, format!("dimension {n} outside 1..=5")));
        }
        if r == 0 {
            return Err(Error::parse(lineno, toks[2].0, "scheme has no rows"));
        }
        let field =
            Field::new(p.min(u32::MAX as usize) as u32).map_err(|e| Error::parse(lineno, toks[3].0, e.to_string()))?;
        let nn = n * n;
        let mut rows = Vec::with_capacity(r);
        for k in 0..r {
            let (dl, data) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno, 1, format!("expected {r} rows after header, found {k}")))?;
            let toks: Vec<_> = tokens(data).collect();
            if toks.len() != 3 * nn {
                let col = toks.get(3 * nn).map_or(data.len() + 1, |t| t.0);
                return Err(Error::parse(dl, col, format!("row has {} entries, expected {}", toks.len(), 3 * nn)));
            }
            let mut vals = Vec::with_capacity(3 * nn);
            for (col, tok) in toks {
                let v: u32 = tok.parse().map_err(|_| Error::parse(dl, col, format!("bad entry {tok:?}")))?;
                if v >= p as u32 {
                    return Err(Error::parse(dl, col, format!("entry {v} not reduced modulo {p}")));
                }
                vals.push(v as u8);
            }
            rows.push(Row {
                a: Mat::from_row_major(field, n, &vals[..nn])?,
                b: Mat::from_row_major(field, n, &vals[nn..2 * nn])?,
                c: Mat::from_row_major(field, n, &vals[2 * nn..])?,
            });
        }
        out.push(Scheme::new(field, n, rows)?);
    }
    Ok(out)
}

/// The `r x 3` table of ranks.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RankPattern {
    entries: Vec<[u8; 3]>,
}

impl RankPattern {
    pub fn new(entries: Vec<[u8; 3]>) -> Self {
        RankPattern { entries }
    }

    pub fn entries(&self) -> &[[u8; 3]] {
        &self.entries
    }

    /// Rows sorted so rank vectors are non-increasing.
    pub fn sorted(&self) -> RankPattern {
        let mut entries = self.entries.clone();
        entries.sort_by(|x, y| y.cmp(x));
        RankPattern { entries }
    }

    pub fn is_sorted(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] >= w[1])
    }

    /// The pattern of the scheme after the column symmetry.
    pub fn permute_columns(&self, cs: &ColumnSymmetry) -> RankPattern {
        RankPattern {
            entries: self
                .entries
                .iter()
                .map(|e| {
                    let v = cs.pi().permute(e);
                    [v[0], v[1], v[2]]
                })
                .collect(),
        }
    }

    /// The lexicographically maximal sorted pattern over all six column
    /// symmetries, and the symmetries attaining it.
    pub fn maximal(&self) -> (RankPattern, Vec<ColumnSymmetry>) {
        let candidates: Vec<_> =
            ColumnSymmetry::all().into_iter().map(|cs| (self.permute_columns(&cs).sorted(), cs)).collect();
        let best = candidates.iter().map(|(p, _)| p).max().unwrap().clone();
        let syms = candidates.into_iter().filter(|(p, _)| *p == best).map(|(_, cs)| cs).collect();
        (best, syms)
    }
}

impl fmt::Display for RankPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {} {}", e[0], e[1], e[2])?;
        }
        Ok(())
    }
}

/// A permutation of the three columns; odd permutations also transpose.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ColumnSymmetry {
    pi: Permutation,
}

impl ColumnSymmetry {
    pub fn new(pi: Permutation) -> Result<Self> {
        if pi.len() != 3 {
            return Err(Error::ShapeMismatch("column symmetry must act on 3 columns".into()));
        }
        Ok(ColumnSymmetry { pi })
    }

    /// All six, ordered by their image vectors.
    pub fn all() -> Vec<ColumnSymmetry> {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            .into_iter()
            .map(|im| ColumnSymmetry { pi: Permutation::from_images(im.to_vec()).unwrap() })
            .collect()
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn transpose(&self) -> bool {
        !self.pi.is_even()
    }

    pub fn apply_row(&self, row: &Row) -> Row {
        let mut src = row.mats();
        if self.transpose() {
            for m in src.iter_mut() {
                *m = m.transpose();
            }
        }
        let mut out = src;
        for (j, m) in src.iter().enumerate() {
            out[self.pi.image(j)] = *m;
        }
        Row::from_mats(out)
    }

    pub fn apply(&self, scheme: &Scheme) -> Scheme {
        Scheme { field: scheme.field, n: scheme.n, rows: scheme.rows.iter().map(|r| self.apply_row(r)).collect() }
    }
}

impl fmt::Display for ColumnSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pi)?;
        if self.transpose() {
            write!(f, "^T")?;
        }
        Ok(())
    }
}

/// Column symmetries whose image, after sorting rows, has the maximal rank
/// pattern.
pub fn sorted_pattern_symmetries(scheme: &Scheme) -> Vec<ColumnSymmetry> {
    scheme.rank_pattern().maximal().1
}

/// Reference schemes.
pub mod fixtures {
    use super::*;

    /// Strassen's algorithm in the `C^T` convention.
    pub const STRASSEN: [[i64; 12]; 7] = [
        [1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1],
        [0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 0, -1],
        [1, 0, 0, 0, 0, 1, 0, -1, 0, 0, 1, 1],
        [0, 0, 0, 1, -1, 0, 1, 0, 1, 1, 0, 0],
        [1, 1, 0, 0, 0, 0, 0, 1, -1, 0, 1, 0],
        [-1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 1],
        [0, 1, 0, -1, 0, 0, 1, 1, 1, 0, 0, 0],
    ];

    /// Laderman's 23-multiplication 3x3 algorithm in the `C^T` convention.
    pub const LADERMAN: [[i64; 27]; 23] = [
        [1, 1, 1, -1, -1, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, -1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 1, 0, 1, -1, -1, -1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
        [-1, 0, 0, 1, 1, 0, 0, 0, 0, 1, -1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0],
        [0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 1, 0, 1],
        [-1, 0, 0, 0, 0, 0, 1, 1, 0, 1, 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1],
        [-1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 1, 0, -1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1],
        [1, 1, 1, 0, -1, -1, -1, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 0, -1, 0, 1, 1, -1, -1, -1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 1, -1, 0, 0, 0, 1, 1, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1, 1, 0, 1, 1, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0],
        [0, 0, -1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, -1, 0, 1, 0, 0, 0, 0, 1, 1, 0],
        [0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 1, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    ];

    /// The schoolbook algorithm: one row `E_ik ⊗ E_kj ⊗ E_ji` per product.
    pub fn naive(field: Field, n: usize) -> Result<Scheme> {
        let unit = |i: usize, j: usize| Mat::from_fn(field, n, |a, b| u8::from(a == i && b == j));
        let mut rows = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    rows.push(Row { a: unit(i, k), b: unit(k, j), c: unit(j, i) });
                }
            }
        }
        Scheme::new(field, n, rows)
    }

    pub fn strassen(field: Field) -> Scheme {
        let rows: Vec<&[i64]> = STRASSEN.iter().map(|r| &r[..]).collect();
        Scheme::from_signed_rows(field, 2, &rows).unwrap()
    }

    pub fn laderman(field: Field) -> Scheme {
        let rows: Vec<&[i64]> = LADERMAN.iter().map(|r| &r[..]).collect();
        Scheme::from_signed_rows(field, 3, &rows).unwrap()
    }
}
