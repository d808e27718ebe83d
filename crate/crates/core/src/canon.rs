//! Normal forms of schemes under the full symmetry group.
//!
//! The normal form of a scheme is the smallest scheme in its orbit among
//! those whose rank pattern is the sorted maximal one. It is computed row by
//! row: the first row is the minimum of a row orbit under `GL^3`, found
//! directly from the structure of minimal rows ([`minimize_row`]); every later
//! row is the minimum over the stabilizer of the rows fixed so far, taken
//! over every partial solution ("tail") that can still reach the normal form.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::{self, enumerate_gl, minimal_biequivalent, solve_sandwich, Mat};
use crate::scheme::{ColumnSymmetry, RankPattern, Row, Scheme};
use crate::symmetry::{Permutation, SandwichTriple, SymmetryElement};

/// Enumeration bounds. Exceeding any of them aborts with a cap error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_stabilizer: u64,
    pub max_nullspace: u64,
    pub max_gl: u64,
    pub max_brute_force: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_stabilizer: 10_000_000,
            max_nullspace: matrix::DEFAULT_NULLSPACE_CAP,
            max_gl: matrix::DEFAULT_GL_CAP,
            max_brute_force: 100_000_000,
        }
    }
}

/// An explicit set of sandwich triples fixing some rows, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    elements: Vec<SandwichTriple>,
}

impl Stabilizer {
    pub fn elements(&self) -> &[SandwichTriple] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: &SandwichTriple) -> bool {
        self.elements.binary_search(t).is_ok()
    }

    fn retain_fixing(&mut self, row: &Row) {
        self.elements.retain(|g| g.apply(row) == *row);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormResult {
    pub nf: Scheme,
    /// Maps the input scheme to `nf`.
    pub witness: SymmetryElement,
}

fn push_capped<T>(out: &mut Vec<T>, item: T, cap: u64) -> Result<()> {
    if out.len() as u64 >= cap {
        return Err(Error::StabilizerTooLarge { size: out.len() as u128 + 1, cap });
    }
    out.push(item);
    Ok(())
}

/// All invertible `X` with `m X = m`.
fn right_stabilizer(m: &Mat, limits: &Limits) -> Result<Vec<Mat>> {
    let n = m.n();
    let f = m.field();
    // X = I + Y with every column of Y in ker(m)
    let mut rows = m.rows();
    let pivots = matrix::row_reduce(&mut rows, f, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel: Vec<Vec<u8>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u8; n];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[r][fc]);
            }
            v
        })
        .collect();
    let dims = kernel.len() * n;
    let p = f.modulus() as u128;
    let size = p.checked_pow(dims as u32).unwrap_or(u128::MAX);
    if size > limits.max_nullspace as u128 {
        return Err(Error::SolutionSpaceTooLarge { size, cap: limits.max_nullspace });
    }
    let mut coeffs = vec![0u8; dims];
    let mut out = Vec::new();
    loop {
        let x = Mat::from_fn(f, n, |i, j| {
            let mut v = u8::from(i == j);
            for (k, kv) in kernel.iter().enumerate() {
                v = f.add(v, f.mul(coeffs[j * kernel.len() + k], kv[i]));
            }
            v
        });
        if x.is_invertible() {
            out.push(x);
        }
        let Some(pos) = coeffs.iter().rposition(|&c| c + 1 < f.modulus()) else { break };
        coeffs[pos] += 1;
        for c in coeffs[pos + 1..].iter_mut() {
            *c = 0;
        }
    }
    Ok(out)
}

fn keep_min<T>(best: &mut Option<Mat>, found: &mut Vec<T>, candidate: Mat, item: T, cap: u64) -> Result<()> {
    match best {
        Some(b) if candidate > *b => Ok(()),
        Some(b) if candidate == *b => push_capped(found, item, cap),
        _ => {
            *best = Some(candidate);
            found.clear();
            found.push(item);
            Ok(())
        }
    }
}

/// The minimum of the `GL^3` orbit of `row` and every triple reaching it.
///
/// If `A` is invertible it is first mapped to the identity by
/// `(A^-1, I, I)`, after which `U = V` is forced. If `B` is then invertible as
/// well, `W = V B` and only a conjugation of `B C A` remains; otherwise `B`
/// goes to its two-sided minimum and `C` is minimized over the pairs `(V, W)`
/// that achieve it. If `A` is singular, `A` goes to its two-sided minimum,
/// `B` to the smallest column echelon form reachable under the pairs `(U, V)`
/// that achieve it, and `C` is minimized over the remaining freedom.
pub fn minimize_row(row: &Row, limits: &Limits) -> Result<(Row, Vec<SandwichTriple>)> {
    let n = row.a.n();
    let f = row.a.field();
    let ident = Mat::identity(f, n)?;
    let cap = limits.max_stabilizer;
    let mut witnesses: Vec<SandwichTriple> = Vec::new();
    let mut best_c: Option<Mat> = None;

    let min_row = if row.a.rank() == n {
        let a_inv = row.a.inverse()?;
        let t0 = SandwichTriple::from_parts([(a_inv, row.a), (ident, ident), (ident, ident)]);
        let shifted = t0.apply(row); // (I, B, C A)
        if shifted.b.rank() == n {
            // W = V B, C1 = V (B C A) V^-1
            let core = shifted.b.mul(&shifted.c);
            let gl = enumerate_gl(f, n, limits.max_gl)?;
            let mut found = Vec::new();
            for v in gl.iter() {
                let c = v.mul(&core).mul(&v.inverse()?);
                keep_min(&mut best_c, &mut found, c, *v, cap)?;
            }
            for v in found {
                let w = v.mul(&shifted.b);
                witnesses.push(SandwichTriple::new(v, v, w)?.compose(&t0));
            }
            Row { a: ident, b: ident, c: best_c.unwrap() }
        } else {
            let b1 = minimal_biequivalent(f, n, shifted.b.rank())?;
            let pairs = solve_sandwich(&shifted.b, &b1, limits.max_nullspace)?;
            let mut found = Vec::new();
            for (v, w) in pairs {
                let c = w.mul(&shifted.c).mul(&v.inverse()?);
                keep_min(&mut best_c, &mut found, c, (v, w), cap)?;
            }
            for (v, w) in found {
                witnesses.push(SandwichTriple::new(v, v, w)?.compose(&t0));
            }
            Row { a: ident, b: b1, c: best_c.unwrap() }
        }
    } else {
        let a1 = minimal_biequivalent(f, n, row.a.rank())?;
        let pairs = solve_sandwich(&row.a, &a1, limits.max_nullspace)?;
        // B1 is the smallest column echelon form of V B over all (U, V).
        let mut best_b: Option<Mat> = None;
        let mut reaching: Vec<(Mat, Mat, Mat)> = Vec::new();
        for (u, v) in pairs {
            let (bmin, t) = v.mul(&row.b).minimize_columns();
            keep_min(&mut best_b, &mut reaching, bmin, (u, v, t), u64::MAX)?;
        }
        let b1 = best_b.expect("GL pairs exist for an orbit minimum");
        // every W with V B W^-1 = B1 is X T^-1 with B1 X = B1
        let stab_b = right_stabilizer(&b1, limits)?;
        let mut found = Vec::new();
        for (u, v, t) in reaching {
            let u_inv = u.inverse()?;
            let w0 = t.inverse()?;
            let partial = row.c.mul(&u_inv);
            for x in &stab_b {
                let w = x.mul(&w0);
                let c = w.mul(&partial);
                keep_min(&mut best_c, &mut found, c, (u, v, w), cap)?;
            }
        }
        for (u, v, w) in found {
            witnesses.push(SandwichTriple::new(u, v, w)?);
        }
        Row { a: a1, b: b1, c: best_c.unwrap() }
    };
    witnesses.sort_unstable();
    witnesses.dedup();
    Ok((min_row, witnesses))
}

/// `{ g h0^-1 : g in witnesses }`: every triple fixing `min_row`, given all
/// triples mapping one row onto it.
pub fn row_stabilizer(min_row: &Row, witnesses: &[SandwichTriple], limits: &Limits) -> Result<Stabilizer> {
    let h0 = witnesses.first().ok_or_else(|| Error::Witness("empty witness set".into()))?;
    if witnesses.len() as u64 > limits.max_stabilizer {
        return Err(Error::StabilizerTooLarge { size: witnesses.len() as u128, cap: limits.max_stabilizer });
    }
    let h0_inv = h0.inverse();
    let mut elements: Vec<SandwichTriple> = witnesses.iter().map(|g| g.compose(&h0_inv)).collect();
    elements.sort_unstable();
    elements.dedup();
    debug_assert!(elements.iter().all(|g| g.apply(min_row) == *min_row));
    Ok(Stabilizer { elements })
}

/// The first `g` in `stab` minimizing `g * row`.
fn stabilizer_argmin(stab: &Stabilizer, row: &Row) -> (Row, SandwichTriple) {
    let mut best: Option<(Row, SandwichTriple)> = None;
    for g in stab.elements() {
        let a = g.u().mul(&row.a).mul(g.v_inv());
        if let Some((b, _)) = &best {
            if a > b.a {
                continue;
            }
        }
        let cand = g.apply(row);
        if best.as_ref().is_none_or(|(b, _)| cand < *b) {
            best = Some((cand, *g));
        }
    }
    best.expect("stabilizer contains the identity")
}

#[derive(Clone, Debug)]
struct Tail {
    /// (original row index, rank vector, current row)
    rows: Vec<(usize, [u8; 3], Row)>,
    acc: SandwichTriple,
    consumed: Vec<usize>,
}

impl Tail {
    fn key(&self) -> Vec<Row> {
        let mut k: Vec<Row> = self.rows.iter().map(|x| x.2).collect();
        k.sort_unstable();
        k
    }
}

/// Runs the row-by-row search on a scheme whose columns are already in
/// place. Returns the candidate rows and the surviving tail used to build
/// the witness.
fn search(s: &Scheme, target: &RankPattern, limits: &Limits) -> Result<(Vec<Row>, Tail)> {
    let mut tails = vec![Tail {
        rows: s.rows().iter().enumerate().map(|(i, r)| (i, r.rank_vector(), *r)).collect(),
        acc: SandwichTriple::identity(s.field(), s.n())?,
        consumed: Vec::new(),
    }];
    let mut stab: Option<Stabilizer> = None;
    let mut prefix = Vec::with_capacity(s.r());

    for want in target.entries() {
        let mut best: Option<Row> = None;
        let mut winners: Vec<(usize, usize, SandwichTriple)> = Vec::new();
        let mut first_witnesses: Option<Vec<SandwichTriple>> = None;
        for (ti, tail) in tails.iter().enumerate() {
            for (pos, (_, rv, row)) in tail.rows.iter().enumerate() {
                if rv != want {
                    continue;
                }
                let (m, g, wits) = match &stab {
                    None => {
                        let (m, wits) = minimize_row(row, limits)?;
                        (m, wits[0], Some(wits))
                    }
                    Some(st) => {
                        let (m, g) = stabilizer_argmin(st, row);
                        (m, g, None)
                    }
                };
                match best {
                    Some(b) if m > b => continue,
                    Some(b) if m == b => {}
                    _ => {
                        best = Some(m);
                        winners.clear();
                        first_witnesses = wits;
                    }
                }
                winners.push((ti, pos, g));
            }
        }
        let best =
            best.ok_or_else(|| Error::ShapeMismatch("rank pattern target not reachable from the tails".into()))?;
        stab = Some(match stab {
            None => row_stabilizer(&best, &first_witnesses.expect("first step has witnesses"), limits)?,
            Some(mut st) => {
                st.retain_fixing(&best);
                st
            }
        });

        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (ti, pos, g) in winners {
            let tail = &tails[ti];
            let mut consumed = tail.consumed.clone();
            consumed.push(tail.rows[pos].0);
            let rows = tail
                .rows
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != pos)
                .map(|(_, &(orig, rv, row))| (orig, rv, g.apply(&row)))
                .collect();
            let t = Tail { rows, acc: g.compose(&tail.acc), consumed };
            if seen.insert(t.key()) {
                next.push(t);
            }
        }
        tails = next;
        prefix.push(best);
    }
    let tail = tails.into_iter().next().expect("at least one tail survives");
    Ok((prefix, tail))
}

/// The normal form of `s` and a group element mapping `s` to it.
pub fn normal_form_with(s: &Scheme, limits: &Limits) -> Result<NormalFormResult> {
    let (target, symmetries) = s.rank_pattern().maximal();
    let mut best: Option<(Vec<Row>, SymmetryElement)> = None;
    for cs in symmetries {
        let moved = cs.apply(s);
        let (rows, tail) = search(&moved, &target, limits)?;
        if best.as_ref().is_some_and(|(b, _)| rows >= *b) {
            continue;
        }
        // output row k is input row consumed[k]
        let mut sigma = vec![0; s.r()];
        for (k, &orig) in tail.consumed.iter().enumerate() {
            sigma[orig] = k;
        }
        let witness = SymmetryElement::new(Permutation::from_images(sigma)?, cs.pi().clone(), tail.acc)?;
        best = Some((rows, witness));
    }
    let (rows, witness) = best.expect("at least one column symmetry attains the maximum");
    let nf = Scheme::new(s.field(), s.n(), rows)?;
    debug_assert_eq!(witness.apply(s).as_ref(), Ok(&nf));
    Ok(NormalFormResult { nf, witness })
}

pub fn normal_form(s: &Scheme) -> Result<NormalFormResult> {
    normal_form_with(s, &Limits::default())
}

pub fn is_normal_form_with(s: &Scheme, limits: &Limits) -> Result<bool> {
    Ok(normal_form_with(s, limits)?.nf == *s)
}

pub fn is_normal_form(s: &Scheme) -> Result<bool> {
    is_normal_form_with(s, &Limits::default())
}

/// A group element mapping `s1` to `s2`, if the schemes are equivalent.
pub fn equivalent_with(s1: &Scheme, s2: &Scheme, limits: &Limits) -> Result<Option<SymmetryElement>> {
    if !s1.same_shape(s2) {
        return Err(Error::ShapeMismatch(format!(
            "schemes differ in shape: (n={}, r={}, {}) vs (n={}, r={}, {})",
            s1.n(),
            s1.r(),
            s1.field(),
            s2.n(),
            s2.r(),
            s2.field()
        )));
    }
    if s1.rank_pattern().maximal().0 != s2.rank_pattern().maximal().0 {
        return Ok(None);
    }
    let r1 = normal_form_with(s1, limits)?;
    let r2 = normal_form_with(s2, limits)?;
    if r1.nf != r2.nf {
        return Ok(None);
    }
    Ok(Some(r2.witness.invert().compose(&r1.witness)?))
}

pub fn equivalent(s1: &Scheme, s2: &Scheme) -> Result<Option<SymmetryElement>> {
    equivalent_with(s1, s2, &Limits::default())
}

/// The normal form by exhaustive search over the whole group: every column
/// symmetry, every triple in `GL^3` and every row order whose image has the
/// maximal sorted rank pattern.
pub fn brute_force_normal_form(s: &Scheme, limits: &Limits) -> Result<Scheme> {
    let n = s.n();
    let r = s.r();
    let gl = enumerate_gl(s.field(), n, limits.max_gl)?;
    let factorial = (1..=r as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).unwrap_or(u128::MAX);
    let size = factorial.saturating_mul(6).saturating_mul((gl.len() as u128).pow(3));
    if size > limits.max_brute_force as u128 {
        return Err(Error::SearchTooLarge { size, cap: limits.max_brute_force });
    }
    let gl_pairs: Vec<(Mat, Mat)> = gl.iter().map(|m| (*m, m.inverse().unwrap())).collect();
    let (target, _) = s.rank_pattern().maximal();

    let mut best: Option<Vec<Row>> = None;
    for cs in ColumnSymmetry::all() {
        let moved = cs.apply(s);
        let ranks: Vec<[u8; 3]> = moved.rows().iter().map(Row::rank_vector).collect();
        // row orders (output position -> input row) whose pattern is the target
        let mut orders = Vec::new();
        let mut used = vec![false; r];
        let mut current = Vec::with_capacity(r);
        collect_orders(&ranks, target.entries(), &mut used, &mut current, &mut orders);
        if orders.is_empty() {
            continue;
        }
        for &u in &gl_pairs {
            for &v in &gl_pairs {
                for &w in &gl_pairs {
                    let t = SandwichTriple::from_parts([u, v, w]);
                    let rows: Vec<Row> = moved.rows().iter().map(|row| t.apply(row)).collect();
                    for order in &orders {
                        let smaller = match &best {
                            None => true,
                            Some(b) => order.iter().map(|&i| &rows[i]).lt(b.iter()),
                        };
                        if smaller {
                            best = Some(order.iter().map(|&i| rows[i]).collect());
                        }
                    }
                }
            }
        }
    }
    Scheme::new(s.field(), n, best.expect("some column symmetry attains the maximum"))
}

fn collect_orders(
    ranks: &[[u8; 3]],
    target: &[[u8; 3]],
    used: &mut [bool],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let k = current.len();
    if k == ranks.len() {
        out.push(current.clone());
        return;
    }
    for i in 0..ranks.len() {
        if !used[i] && ranks[i] == target[k] {
            used[i] = true;
            current.push(i);
            collect_orders(ranks, target, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::Field;
    use crate::scheme::fixtures;
    use crate::symmetry::{random_element, random_element_with};

    fn gf(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn all_triples(f: Field, n: usize) -> Vec<SandwichTriple> {
        let gl = enumerate_gl(f, n, u64::MAX).unwrap();
        let mut out = Vec::new();
        for u in gl.iter() {
            for v in gl.iter() {
                for w in gl.iter() {
                    out.push(SandwichTriple::new(*u, *v, *w).unwrap());
                }
            }
        }
        out
    }

    fn brute_min_row(row: &Row, triples: &[SandwichTriple]) -> (Row, Vec<SandwichTriple>) {
        let min = triples.iter().map(|t| t.apply(row)).min().unwrap();
        let mut wit: Vec<_> = triples.iter().filter(|t| t.apply(row) == min).copied().collect();
        wit.sort_unstable();
        (min, wit)
    }

    fn random_mat(rng: &mut ChaCha8Rng, f: Field, n: usize) -> Mat {
        let e: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..f.modulus())).collect();
        Mat::from_row_major(f, n, &e).unwrap()
    }

    fn random_row(rng: &mut ChaCha8Rng, f: Field, n: usize) -> Row {
        Row { a: random_mat(rng, f, n), b: random_mat(rng, f, n), c: random_mat(rng, f, n) }
    }

    fn random_scheme(rng: &mut ChaCha8Rng, f: Field, n: usize, r: usize) -> Scheme {
        Scheme::new(f, n, (0..r).map(|_| random_row(rng, f, n)).collect()).unwrap()
    }

    fn all_rows(f: Field, n: usize) -> Vec<Row> {
        let p = f.modulus() as usize;
        let mats: Vec<Mat> = (0..p.pow((n * n) as u32))
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
            .collect();
        let mut rows = Vec::new();
        for a in &mats {
            for b in &mats {
                for c in &mats {
                    rows.push(Row { a: *a, b: *b, c: *c });
                }
            }
        }
        rows
    }

    fn assert_first_row_structure(nf: &Scheme) {
        let first = nf.rows()[0];
        let n = nf.n();
        assert_eq!(first.a, minimal_biequivalent(nf.field(), n, first.a.rank()).unwrap());
        assert!(first.b.is_column_minimal());
    }

    #[test]
    fn minimize_row_identity_row() {
        let f = gf(2);
        let i = Mat::identity(f, 2).unwrap();
        let row = Row { a: i, b: i, c: i };
        let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
        assert_eq!(m, row);
        assert_eq!(wit.len(), 6);
        assert!(wit.iter().all(|t| t.u() == t.v() && t.v() == t.w()));
    }

    #[test]
    fn minimize_row_strassen_row_two() {
        let f = gf(2);
        let row = fixtures::strassen(f).rows()[1];
        let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
        assert_eq!(m.a, Mat::from_row_major(f, 2, &[0, 0, 1, 0]).unwrap());
        let (bm, bw) = brute_min_row(&row, &all_triples(f, 2));
        assert_eq!(m, bm);
        assert_eq!(wit, bw);
    }

    #[test]
    fn minimize_row_exhaustive_n2_p2() {
        let f = gf(2);
        let triples = all_triples(f, 2);
        for row in all_rows(f, 2) {
            let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
            let (bm, bw) = brute_min_row(&row, &triples);
            assert_eq!(m, bm, "row {row:?}");
            assert_eq!(wit, bw, "row {row:?}");
        }
    }

    #[test]
    fn minimize_row_exhaustive_n1() {
        for p in [2, 3, 5] {
            let f = gf(p);
            let triples = all_triples(f, 1);
            for row in all_rows(f, 1) {
                let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
                assert_eq!((m, wit), brute_min_row(&row, &triples));
            }
        }
    }

    #[test]
    fn minimize_row_random_n2_p3() {
        let f = gf(3);
        let triples = all_triples(f, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in 0..40 {
            let mut row = random_row(&mut rng, f, 2);
            // exercise each case of the construction
            match k % 4 {
                0 => row.a = Mat::identity(f, 2).unwrap(),
                1 => {
                    row.a = Mat::identity(f, 2).unwrap();
                    row.b = Mat::from_row_major(f, 2, &[1, 2, 2, 1]).unwrap();
                }
                2 => row.a = Mat::from_row_major(f, 2, &[1, 2, 2, 1]).unwrap(),
                _ => {}
            }
            let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
            assert_eq!((m, wit), brute_min_row(&row, &triples), "row {row:?}");
        }
    }

    #[test]
    fn minimize_row_structure_n3() {
        let f = gf(2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let row = random_row(&mut rng, f, 3);
            let (m, wit) = minimize_row(&row, &Limits::default()).unwrap();
            assert_eq!(m.a, minimal_biequivalent(f, 3, row.a.rank()).unwrap());
            assert!(m.b.is_column_minimal());
            for t in &wit {
                assert_eq!(t.apply(&row), m);
            }
            // every stabilizer element is accounted for
            let stab = row_stabilizer(&m, &wit, &Limits::default()).unwrap();
            assert_eq!(stab.len(), wit.len());
        }
    }

    #[test]
    fn stabilizer_examples() {
        let f = gf(2);
        let lim = Limits::default();
        let i = Mat::identity(f, 2).unwrap();
        let id_row = Row { a: i, b: i, c: i };
        let (_, wit) = minimize_row(&id_row, &lim).unwrap();
        assert_eq!(row_stabilizer(&id_row, &wit, &lim).unwrap().len(), 6);

        let z = Mat::zero(f, 2).unwrap();
        let zero_row = Row { a: z, b: z, c: z };
        let (m, wit) = minimize_row(&zero_row, &lim).unwrap();
        assert_eq!(m, zero_row);
        assert_eq!(row_stabilizer(&zero_row, &wit, &lim).unwrap().len(), 216);

        let triples = all_triples(f, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let row = random_row(&mut rng, f, 2);
            let (m, wit) = minimize_row(&row, &lim).unwrap();
            let stab = row_stabilizer(&m, &wit, &lim).unwrap();
            let brute: Vec<_> = triples.iter().filter(|t| t.apply(&m) == m).copied().collect();
            assert_eq!(stab.elements(), &brute[..]);
            // closed under composition and inversion
            for g in stab.elements().iter().take(10) {
                assert!(stab.contains(&g.inverse()));
                for h in stab.elements().iter().take(10) {
                    assert!(stab.contains(&g.compose(h)));
                }
            }
        }
    }

    #[test]
    fn stabilizer_cap() {
        let f = gf(2);
        let z = Mat::zero(f, 2).unwrap();
        let lim = Limits { max_stabilizer: 100, ..Limits::default() };
        assert!(matches!(minimize_row(&Row { a: z, b: z, c: z }, &lim), Err(Error::StabilizerTooLarge { .. })));
    }

    #[test]
    fn trivial_normal_form() {
        let s = crate::scheme::parse("scheme 1 1 2\n1 1 1\n").unwrap().remove(0);
        let res = normal_form(&s).unwrap();
        assert_eq!(res.nf, s);
        assert!(is_normal_form(&s).unwrap());
    }

    #[test]
    fn zero_scheme_is_normal() {
        let f = gf(2);
        let z = Mat::zero(f, 2).unwrap();
        let s = Scheme::new(f, 2, vec![Row { a: z, b: z, c: z }; 2]).unwrap();
        assert!(is_normal_form(&s).unwrap());
    }

    #[test]
    fn strassen_matches_brute_force() {
        let f = gf(2);
        let s = fixtures::strassen(f);
        let res = normal_form(&s).unwrap();
        assert_eq!(res.witness.apply(&s).unwrap(), res.nf);
        assert_eq!(res.nf, brute_force_normal_form(&s, &Limits::default()).unwrap());
        assert!(res.nf.verify());
        assert!(res.nf.rank_pattern().is_sorted());
        assert_first_row_structure(&res.nf);
        assert_eq!(normal_form(&res.nf).unwrap().nf, res.nf);
    }

    #[test]
    fn strassen_orbit_invariance() {
        for p in [2, 3] {
            let f = gf(p);
            let s = fixtures::strassen(f);
            let nf = normal_form(&s).unwrap().nf;
            for seed in 0..100 {
                let g = random_element(f, 2, 7, seed).unwrap();
                let moved = g.apply(&s).unwrap();
                let res = normal_form(&moved).unwrap();
                assert_eq!(res.nf, nf, "p = {p}, seed = {seed}");
                assert_eq!(res.witness.apply(&moved).unwrap(), nf);
            }
        }
    }

    #[test]
    fn single_row_schemes_match_brute_force() {
        let f = gf(2);
        for row in all_rows(f, 1) {
            let s = Scheme::new(f, 1, vec![row]).unwrap();
            let nf = normal_form(&s).unwrap().nf;
            let brute = brute_force_normal_form(&s, &Limits::default()).unwrap();
            assert_eq!(nf, brute);
            assert_eq!(brute_force_normal_form(&brute, &Limits::default()).unwrap(), brute);
        }
    }

    #[test]
    fn random_schemes_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (p, trials, max_r) in [(2, 40, 5), (3, 6, 3)] {
            let f = gf(p);
            for _ in 0..trials {
                let r = rng.gen_range(1..=max_r);
                let s = random_scheme(&mut rng, f, 2, r);
                let res = normal_form(&s).unwrap();
                assert_eq!(res.witness.apply(&s).unwrap(), res.nf);
                assert_eq!(res.nf, brute_force_normal_form(&s, &Limits::default()).unwrap(), "{s}");
                assert_first_row_structure(&res.nf);
            }
        }
    }

    #[test]
    fn random_schemes_orbit_invariance_n3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2, 3] {
            let f = gf(p);
            for _ in 0..6 {
                let s = random_scheme(&mut rng, f, 3, 4);
                let nf = normal_form(&s).unwrap().nf;
                assert_first_row_structure(&nf);
                for _ in 0..3 {
                    let g = random_element_with(&mut rng, f, 3, 4).unwrap();
                    assert_eq!(normal_form(&g.apply(&s).unwrap()).unwrap().nf, nf);
                }
            }
        }
    }

    #[test]
    fn minimality_against_sampled_orbit() {
        let f = gf(2);
        let s = fixtures::strassen(f);
        let nf = normal_form(&s).unwrap().nf;
        let target = s.rank_pattern().maximal().0;
        let mut checked = 0;
        for seed in 0..3000 {
            let img = random_element(f, 2, 7, seed).unwrap().apply(&s).unwrap();
            let mut rows = img.into_rows();
            rows.sort_by_key(|row| std::cmp::Reverse(row.rank_vector()));
            let img = Scheme::new(f, 2, rows).unwrap();
            if img.rank_pattern() == target {
                assert!(nf <= img);
                checked += 1;
            }
        }
        assert!(checked >= 300);
    }

    #[test]
    fn is_normal_form_rejects_larger_images() {
        let f = gf(2);
        let nf = normal_form(&fixtures::strassen(f)).unwrap().nf;
        assert!(is_normal_form(&nf).unwrap());
        let mut larger = 0;
        for seed in 0..40 {
            let img = random_element(f, 2, 7, seed).unwrap().apply(&nf).unwrap();
            if img != nf {
                assert!(!is_normal_form(&img).unwrap());
                larger += 1;
            }
        }
        assert!(larger > 0);
    }

    #[test]
    fn equivalence_examples() {
        let f = gf(2);
        let s = fixtures::strassen(f);
        let w = equivalent(&s, &s).unwrap().unwrap();
        assert_eq!(w.apply(&s).unwrap(), s);
        for seed in 0..10 {
            let t = random_element(f, 2, 7, seed).unwrap().apply(&s).unwrap();
            let g = equivalent(&s, &t).unwrap().unwrap();
            assert_eq!(g.apply(&s).unwrap(), t);
        }
        let mut rows = s.rows().to_vec();
        rows[1].a = Mat::zero(f, 2).unwrap();
        let broken = Scheme::new(f, 2, rows).unwrap();
        assert_eq!(equivalent(&s, &broken).unwrap(), None);
        assert!(equivalent(&s, &fixtures::laderman(f)).is_err());
    }

    #[test]
    fn brute_force_bound() {
        let f = gf(2);
        assert!(matches!(
            brute_force_normal_form(&fixtures::laderman(f), &Limits::default()),
            Err(Error::SearchTooLarge { .. })
        ));
    }
}
