//! Dense `n x n` matrices over GF(p), `n <= 5`.
//!
//! Entries are packed one byte each in *order-key layout*: column `n - 1`
//! first, then column `n - 2`, and so on, each column stored top to bottom.
//! With that layout the derived lexicographic `Ord` on the cell array is the
//! matrix order used for normal forms: the last column is compared first
//! (entries top to bottom), ties fall through to the column before it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::Field;

pub const MAX_DIM: usize = 5;
const CELLS: usize = MAX_DIM * MAX_DIM;

/// Default bound on the order of GL(n, p) that [`enumerate_gl`] will build.
pub const DEFAULT_GL_CAP: u64 = 20_000_000;
/// Default bound on the number of nullspace vectors [`solve_sandwich`] walks.
pub const DEFAULT_NULLSPACE_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat {
    field: Field,
    n: u8,
    cells: [u8; CELLS],
}

#[inline]
fn slot(n: usize, i: usize, j: usize) -> usize {
    (n - 1 - j) * n + i
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOutOfRange(n));
    }
    Ok(())
}

impl Mat {
    pub fn zero(field: Field, n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Mat { field, n: n as u8, cells: [0; CELLS] })
    }

    pub fn identity(field: Field, n: usize) -> Result<Self> {
        let mut m = Mat::zero(field, n)?;
        for i in 0..n {
            m.cells[slot(n, i, i)] = 1;
        }
        Ok(m)
    }

    /// Builds a matrix from `n * n` row-major entries, each already in `0..p`.
    pub fn from_row_major(field: Field, n: usize, entries: &[u8]) -> Result<Self> {
        check_dim(n)?;
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        let mut m = Mat { field, n: n as u8, cells: [0; CELLS] };
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if v >= field.modulus() {
                    return Err(Error::EntryOutOfRange { value: v as u32, p: field.modulus() });
                }
                m.cells[slot(n, i, j)] = v;
            }
        }
        Ok(m)
    }

    /// Builds a matrix from signed integers, reducing each modulo p.
    pub fn from_signed(field: Field, n: usize, entries: &[i64]) -> Result<Self> {
        let reduced: Vec<u8> = entries.iter().map(|&v| field.reduce(v)).collect();
        Mat::from_row_major(field, n, &reduced)
    }

    pub(crate) fn from_fn(field: Field, n: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut m = Mat { field, n: n as u8, cells: [0; CELLS] };
        for i in 0..n {
            for j in 0..n {
                m.cells[slot(n, i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[slot(self.n(), i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u8) {
        assert!(value < self.field.modulus());
        let n = self.n();
        self.cells[slot(n, i, j)] = value;
    }

    pub fn row_major(&self) -> Vec<u8> {
        let n = self.n();
        (0..n * n).map(|k| self.get(k / n, k % n)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    pub fn same_shape(&self, other: &Mat) -> bool {
        self.n == other.n && self.field == other.field
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        debug_assert!(self.same_shape(rhs));
        let n = self.n();
        let p = self.field.modulus() as u32;
        let mut out = Mat { field: self.field, n: self.n, cells: [0; CELLS] };
        for j in 0..n {
            let bcol = &rhs.cells[slot(n, 0, j)..slot(n, 0, j) + n];
            for i in 0..n {
                let mut acc = 0u32;
                for (k, &b) in bcol.iter().enumerate() {
                    acc += self.cells[slot(n, i, k)] as u32 * b as u32;
                }
                out.cells[slot(n, i, j)] = (acc % p) as u8;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        debug_assert!(self.same_shape(rhs));
        let mut out = *self;
        for (o, r) in out.cells.iter_mut().zip(rhs.cells.iter()) {
            *o = self.field.add(*o, *r);
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.n(), |i, j| self.get(j, i))
    }

    fn dense(&self) -> [[u8; MAX_DIM]; MAX_DIM] {
        let mut d = [[0u8; MAX_DIM]; MAX_DIM];
        for (i, row) in d.iter_mut().enumerate().take(self.n()) {
            for (j, x) in row.iter_mut().enumerate().take(self.n()) {
                *x = self.get(i, j);
            }
        }
        d
    }

    /// Rank over GF(p) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n();
        let f = self.field;
        let mut d = self.dense();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| d[r][col] != 0) else { continue };
            d.swap(rank, piv);
            let inv = f.inv(d[rank][col]).expect("nonzero pivot");
            let (top, rest) = d.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            for row in rest.iter_mut() {
                let factor = f.mul(row[col], inv);
                if factor != 0 {
                    for (x, &y) in row[col..n].iter_mut().zip(&pivot_row[col..n]) {
                        *x = f.sub(*x, f.mul(factor, y));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n()
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n();
        let f = self.field;
        let mut a = self.dense();
        let mut b = Mat::identity(f, n)?.dense();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != 0).ok_or(Error::SingularMatrix)?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = f.inv(a[col][col])?;
            for c in 0..n {
                a[col][c] = f.mul(a[col][c], inv);
                b[col][c] = f.mul(b[col][c], inv);
            }
            for r in 0..n {
                let factor = a[r][col];
                if r != col && factor != 0 {
                    for c in 0..n {
                        a[r][c] = f.sub(a[r][c], f.mul(factor, a[col][c]));
                        b[r][c] = f.sub(b[r][c], f.mul(factor, b[col][c]));
                    }
                }
            }
        }
        Ok(Mat::from_fn(f, n, |i, j| b[i][j]))
    }

    /// The minimum of `{ self * W^-1 : W in GL(n, p) }` together with an
    /// invertible `T` such that `self * T` equals it.
    ///
    /// The minimum is the column echelon form: the reduced row echelon basis
    /// of the column space laid out as the leading columns, zero columns last.
    pub fn minimize_columns(&self) -> (Mat, Mat) {
        let n = self.n();
        let f = self.field;
        // [B^T | I], row reduced with pivots restricted to the left block.
        let mut aug: Vec<Vec<u8>> = (0..n)
            .map(|i| {
                let mut row: Vec<u8> = (0..n).map(|j| self.get(j, i)).collect();
                row.extend((0..n).map(|j| u8::from(i == j)));
                row
            })
            .collect();
        row_reduce(&mut aug, f, n);
        let bmin = Mat::from_fn(f, n, |i, j| aug[j][i]);
        let t = Mat::from_fn(f, n, |i, j| aug[j][n + i]);
        (bmin, t)
    }

    /// True when `self` already equals its column echelon form.
    pub fn is_column_minimal(&self) -> bool {
        self.minimize_columns().0 == *self
    }
}

/// The minimum of the two-sided orbit `{ U M V^-1 }` of any rank-`rank`
/// matrix: `I_rank` in the bottom-left block, zeros elsewhere.
pub fn minimal_biequivalent(field: Field, n: usize, rank: usize) -> Result<Mat> {
    check_dim(n)?;
    if rank > n {
        return Err(Error::RankOutOfRange { rank, n });
    }
    Ok(Mat::from_fn(field, n, |i, j| u8::from(j < rank && i == n - rank + j)))
}

/// In-place reduced row echelon form; pivots are searched only in the first
/// `pivot_cols` columns. Returns the pivot columns in row order.
pub(crate) fn row_reduce(rows: &mut [Vec<u8>], f: Field, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&k| rows[k][col] != 0) else { continue };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][col]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for k in 0..rows.len() {
            let factor = rows[k][col];
            if k != r && factor != 0 {
                for c in 0..rows[k].len() {
                    let sub = f.mul(factor, rows[r][c]);
                    rows[k][c] = f.sub(rows[k][c], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// `|GL(n, p)| = prod_{i<n} (p^n - p^i)`.
pub fn gl_order(field: Field, n: usize) -> u128 {
    let p = field.modulus() as u128;
    let pn = p.pow(n as u32);
    (0..n as u32).map(|i| pn - p.pow(i)).product()
}

/// All invertible matrices of one dimension over one field, ascending.
#[derive(Clone, Debug)]
pub struct GlSet {
    field: Field,
    n: usize,
    elements: Arc<[Mat]>,
}

impl GlSet {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mat> {
        self.elements.iter()
    }
}

type GlSlot = Arc<OnceLock<Arc<[Mat]>>>;

fn gl_cache() -> &'static Mutex<HashMap<(Field, usize), GlSlot>> {
    static CACHE: OnceLock<Mutex<HashMap<(Field, usize), GlSlot>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Enumerates GL(n, p) in ascending matrix order. Results are cached per
/// `(n, p)` and shared between threads.
pub fn enumerate_gl(field: Field, n: usize, cap: u64) -> Result<GlSet> {
    check_dim(n)?;
    let size = gl_order(field, n);
    if size > cap as u128 {
        return Err(Error::GlTooLarge { n, p: field.modulus(), size, cap });
    }
    let slot = gl_cache().lock().unwrap().entry((field, n)).or_default().clone();
    let elements = slot.get_or_init(|| build_gl(field, n)).clone();
    Ok(GlSet { field, n, elements })
}

fn build_gl(field: Field, n: usize) -> Arc<[Mat]> {
    let p = field.modulus();
    let len = n * n;
    let mut m = Mat { field, n: n as u8, cells: [0; CELLS] };
    let mut out = Vec::with_capacity(gl_order(field, n) as usize);
    // Odometer over the packed cells, most significant cell first, which
    // visits matrices in ascending order.
    loop {
        if m.is_invertible() {
            out.push(m);
        }
        let mut k = len;
        loop {
            if k == 0 {
                return out.into();
            }
            k -= 1;
            m.cells[k] += 1;
            if m.cells[k] < p {
                break;
            }
            m.cells[k] = 0;
        }
    }
}

/// All pairs of invertible `(V, W)` with `V X W^-1 = Y`, ascending by `(V, W)`.
///
/// Solves the homogeneous system `V X = Y W` in the `2 n^2` entries of `V` and
/// `W`, walks the solution space in p-ary Gray code order (one basis vector
/// added per step) and keeps the pairs where both halves are invertible.
pub fn solve_sandwich(x: &Mat, y: &Mat, cap: u64) -> Result<Vec<(Mat, Mat)>> {
    if !x.same_shape(y) {
        return Err(Error::ShapeMismatch("sandwich operands differ in shape".into()));
    }
    let n = x.n();
    let f = x.field();
    let nn = n * n;
    let unknowns = 2 * nn;
    let mut system: Vec<Vec<u8>> = Vec::with_capacity(nn);
    for i in 0..n {
        for j in 0..n {
            let mut eq = vec![0u8; unknowns];
            for k in 0..n {
                // + V[i][k] X[k][j]
                eq[i * n + k] = f.add(eq[i * n + k], x.get(k, j));
                // - Y[i][k] W[k][j]
                let w = nn + k * n + j;
                eq[w] = f.sub(eq[w], y.get(i, k));
            }
            system.push(eq);
        }
    }
    let pivots = row_reduce(&mut system, f, unknowns);
    let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
    let size = (f.modulus() as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::SolutionSpaceTooLarge { size, cap });
    }
    let basis: Vec<Vec<u8>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u8; unknowns];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(system[row][fc]);
            }
            v
        })
        .collect();

    let p = f.modulus() as u128;
    let mut z = vec![0u8; unknowns];
    let mut out = Vec::new();
    for t in 1..size {
        let mut k = 0;
        let mut rest = t;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        for (zi, bi) in z.iter_mut().zip(&basis[k]) {
            *zi = f.add(*zi, *bi);
        }
        let v = Mat::from_fn(f, n, |i, j| z[i * n + j]);
        if !v.is_invertible() {
            continue;
        }
        let w = Mat::from_fn(f, n, |i, j| z[nn + i * n + j]);
        if w.is_invertible() {
            out.push((v, w));
        }
    }
    out.sort_unstable();
    Ok(out)
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use std::cmp::Ordering;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn gf(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn m(p: u32, n: usize, e: &[u8]) -> Mat {
        Mat::from_row_major(gf(p), n, e).unwrap()
    }

    fn all_matrices(f: Field, n: usize) -> Vec<Mat> {
        let p = f.modulus() as usize;
        (0..p.pow((n * n) as u32))
            .map(|mut code| {
                let e: Vec<u8> = (0..n * n)
                    .map(|_| {
                        let d = (code % p) as u8;
                        code /= p;
                        d
                    })
                    .collect();
                Mat::from_row_major(f, n, &e).unwrap()
            })
            .collect()
    }

    fn random_mat(rng: &mut ChaCha8Rng, f: Field, n: usize) -> Mat {
        Mat::from_fn(f, n, |_, _| rng.gen_range(0..f.modulus()))
    }

    // Matrix order written out directly: last column first, each column
    // compared top to bottom.
    fn reference_cmp(a: &Mat, b: &Mat) -> Ordering {
        let n = a.n();
        for j in (0..n).rev() {
            for i in 0..n {
                match a.get(i, j).cmp(&b.get(i, j)) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
        }
        Ordering::Equal
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(gf(2), 2).unwrap().rank(), 2);
        assert_eq!(Mat::zero(gf(2), 3).unwrap().rank(), 0);
        assert_eq!(m(2, 2, &[0, 0, 1, 1]).rank(), 1);
        assert_eq!(m(3, 2, &[1, 2, 2, 1]).rank(), 1);
        assert_eq!(m(2, 2, &[1, 1, 1, 1]).rank(), 1);
    }

    #[test]
    fn inverse_examples() {
        let i3 = Mat::identity(gf(2), 3).unwrap();
        assert_eq!(i3.inverse().unwrap(), i3);
        let a = m(2, 2, &[1, 1, 0, 1]);
        assert_eq!(a.inverse().unwrap(), a);
        let b = m(3, 2, &[2, 0, 0, 1]);
        assert_eq!(b.inverse().unwrap(), b);
        assert_eq!(m(2, 2, &[1, 1, 1, 1]).inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn order_examples() {
        let a = m(2, 2, &[0, 0, 1, 0]);
        let b = m(2, 2, &[1, 0, 0, 0]);
        assert!(a < b);
        assert!(Mat::zero(gf(2), 2).unwrap() < Mat::identity(gf(2), 2).unwrap());
        assert_eq!(a.cmp(&a), Ordering::Equal);
    }

    #[test]
    fn packed_order_matches_definition_exhaustively() {
        let f = gf(2);
        let all = all_matrices(f, 2);
        for a in &all {
            for b in &all {
                assert_eq!(a.cmp(b), reference_cmp(a, b));
            }
        }
        let f3 = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let (a, b) = (random_mat(&mut rng, f3, 3), random_mat(&mut rng, f3, 3));
            assert_eq!(a.cmp(&b), reference_cmp(&a, &b));
        }
    }

    #[test]
    fn minimal_biequivalent_examples() {
        assert_eq!(minimal_biequivalent(gf(2), 2, 1).unwrap(), m(2, 2, &[0, 0, 1, 0]));
        for n in 1..=5 {
            assert_eq!(minimal_biequivalent(gf(3), n, n).unwrap(), Mat::identity(gf(3), n).unwrap());
        }
        assert!(minimal_biequivalent(gf(2), 3, 0).unwrap().is_zero());
        assert_eq!(minimal_biequivalent(gf(2), 3, 4), Err(Error::RankOutOfRange { rank: 4, n: 3 }));
        assert_eq!(minimal_biequivalent(gf(2), 3, 2).unwrap(), m(2, 3, &[0, 0, 0, 1, 0, 0, 0, 1, 0]));
    }

    #[test]
    fn minimal_biequivalent_is_orbit_minimum_n2_p2() {
        let f = gf(2);
        let gl = enumerate_gl(f, 2, DEFAULT_GL_CAP).unwrap();
        for a in all_matrices(f, 2) {
            let expect = minimal_biequivalent(f, 2, a.rank()).unwrap();
            let mut best = None::<Mat>;
            for u in gl.iter() {
                for v in gl.iter() {
                    let x = u.mul(&a).mul(&v.inverse().unwrap());
                    assert!(expect <= x);
                    best = Some(best.map_or(x, |b| b.min(x)));
                }
            }
            assert_eq!(best.unwrap(), expect);
        }
    }

    fn brute_minimize_columns(b: &Mat, gl: &GlSet) -> Mat {
        gl.iter().map(|w| b.mul(&w.inverse().unwrap())).min().unwrap()
    }

    #[test]
    fn minimize_columns_examples() {
        let f = gf(2);
        let i2 = Mat::identity(f, 2).unwrap();
        assert_eq!(i2.minimize_columns().0, i2);
        assert_eq!(m(2, 2, &[1, 1, 1, 1]).minimize_columns().0, m(2, 2, &[1, 0, 1, 0]));
        let z = Mat::zero(f, 3).unwrap();
        assert_eq!(z.minimize_columns().0, z);
    }

    #[test]
    fn minimize_columns_matches_brute_force() {
        for p in [2, 3] {
            let f = gf(p);
            let gl = enumerate_gl(f, 2, DEFAULT_GL_CAP).unwrap();
            for b in all_matrices(f, 2) {
                let (bmin, t) = b.minimize_columns();
                assert!(t.is_invertible());
                assert_eq!(b.mul(&t), bmin);
                assert_eq!(bmin, brute_minimize_columns(&b, &gl), "B = {b}");
            }
        }
        let f = gf(2);
        let gl3 = enumerate_gl(f, 3, DEFAULT_GL_CAP).unwrap();
        for b in all_matrices(f, 3) {
            let (bmin, t) = b.minimize_columns();
            assert_eq!(b.mul(&t), bmin);
            assert_eq!(bmin, brute_minimize_columns(&b, &gl3));
        }
        let f3 = gf(3);
        let gl33 = enumerate_gl(f3, 3, DEFAULT_GL_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let b = random_mat(&mut rng, f3, 3);
            let (bmin, t) = b.minimize_columns();
            assert_eq!(b.mul(&t), bmin);
            assert_eq!(bmin, brute_minimize_columns(&b, &gl33));
        }
    }

    #[test]
    fn gl_sizes_and_order() {
        assert_eq!(enumerate_gl(gf(2), 2, DEFAULT_GL_CAP).unwrap().len(), 6);
        let gl3 = enumerate_gl(gf(2), 3, DEFAULT_GL_CAP).unwrap();
        assert_eq!(gl3.len(), 168);
        assert_eq!((gl3.len() as u64).pow(3), 4_741_632);
        assert_eq!(enumerate_gl(gf(3), 1, DEFAULT_GL_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_gl(gf(3), 2, DEFAULT_GL_CAP).unwrap().len(), 48);
        assert!(gl3.elements().windows(2).all(|w| w[0] < w[1]));
        assert!(gl3.iter().all(Mat::is_invertible));
        assert_eq!(gl_order(gf(3), 3), 11232);
        match enumerate_gl(gf(3), 4, DEFAULT_GL_CAP) {
            Err(Error::GlTooLarge { size, .. }) => assert_eq!(size, 24_261_120),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn brute_sandwich(x: &Mat, y: &Mat, gl: &GlSet) -> Vec<(Mat, Mat)> {
        let mut out = Vec::new();
        for v in gl.iter() {
            for w in gl.iter() {
                if v.mul(x) == y.mul(w) {
                    out.push((*v, *w));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn solve_sandwich_examples() {
        let f = gf(2);
        let i2 = Mat::identity(f, 2).unwrap();
        let z = Mat::zero(f, 2).unwrap();
        let id = solve_sandwich(&i2, &i2, DEFAULT_NULLSPACE_CAP).unwrap();
        assert_eq!(id.len(), 6);
        assert!(id.iter().all(|(v, w)| v == w));
        assert_eq!(solve_sandwich(&z, &z, DEFAULT_NULLSPACE_CAP).unwrap().len(), 36);
        let e11 = m(2, 2, &[1, 0, 0, 0]);
        assert_eq!(solve_sandwich(&e11, &e11, DEFAULT_NULLSPACE_CAP).unwrap().len(), 4);
    }

    #[test]
    fn solve_sandwich_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2, 3] {
            let f = gf(p);
            let gl = enumerate_gl(f, 2, DEFAULT_GL_CAP).unwrap();
            for _ in 0..50 {
                let x = random_mat(&mut rng, f, 2);
                // half the time make Y equivalent to X so the answer is nonempty
                let y = if rng.gen_bool(0.5) {
                    let u = gl.elements()[rng.gen_range(0..gl.len())];
                    let w = gl.elements()[rng.gen_range(0..gl.len())];
                    u.mul(&x).mul(&w.inverse().unwrap())
                } else {
                    random_mat(&mut rng, f, 2)
                };
                let got = solve_sandwich(&x, &y, DEFAULT_NULLSPACE_CAP).unwrap();
                for (v, w) in &got {
                    assert_eq!(v.mul(&x).mul(&w.inverse().unwrap()), y);
                }
                assert_eq!(got, brute_sandwich(&x, &y, &gl));
            }
        }
    }

    #[test]
    fn solve_sandwich_cap() {
        let f = gf(3);
        let z = Mat::zero(f, 3).unwrap();
        assert!(matches!(solve_sandwich(&z, &z, DEFAULT_NULLSPACE_CAP), Err(Error::SolutionSpaceTooLarge { .. })));
    }

    #[test]
    fn rank_invariant_under_sandwiching() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2, 3, 5] {
            let f = gf(p);
            for _ in 0..1000 {
                let n = rng.gen_range(1..=4);
                let mat = random_mat(&mut rng, f, n);
                let u = loop {
                    let c = random_mat(&mut rng, f, n);
                    if c.is_invertible() {
                        break c;
                    }
                };
                let v = loop {
                    let c = random_mat(&mut rng, f, n);
                    if c.is_invertible() {
                        break c;
                    }
                };
                assert_eq!(u.mul(&mat).mul(&v.inverse().unwrap()).rank(), mat.rank());
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_round_trip(entries in proptest::collection::vec(0u8..5, 16)) {
            let a = Mat::from_row_major(gf(5), 4, &entries).unwrap();
            if let Ok(inv) = a.inverse() {
                prop_assert_eq!(a.mul(&inv), Mat::identity(gf(5), 4).unwrap());
                prop_assert_eq!(inv.mul(&a), Mat::identity(gf(5), 4).unwrap());
            } else {
                prop_assert!(a.rank() < 4);
            }
        }
    }
}
