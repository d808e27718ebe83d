//! The symmetry group of `n x n` schemes with `r` rows: row permutations,
//! column permutations (with transposition when odd) and sandwiching by
//! triples of invertible matrices.
//!
//! Permutations act on positions: the entry at position `i` moves to
//! position `sigma(i)`. Applying `(sigma, pi, t)` permutes rows by `sigma`,
//! transposes every matrix if `pi` is odd and moves column `j` to `pi(j)`, and
//! finally maps each row `(A, B, C)` to `(U A V^-1, V B W^-1, W C U^-1)`.
//! Under these conventions the twisted product
//!
//! ```text
//! (s1, p1, t1) * (s2, p2, t2) = (s1 s2, p1 p2, t1 * phi(p1)(t2))
//! ```
//!
//! is compatible with the action, where `phi(pi)` moves the components of a
//! triple like columns, after replacing `(U, V, W)` by
//! `(V^-T, W^-T, U^-T)` when `pi` is odd.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Mat;
use crate::scheme::{Row, Scheme};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation { images: (0..len).collect() }
    }

    /// `images[i]` is where position `i` is sent (0-based).
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Witness(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Moves `items[i]` to position `self(i)`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.len());
        let mut out = items.to_vec();
        for (i, item) in items.iter().enumerate() {
            out[self.images[i]] = item.clone();
        }
        out
    }

    /// Parses 1-based cycle notation such as `(1,2,3)(4,5)`; `()` is the
    /// identity.
    pub fn parse_cycles(text: &str, len: usize) -> Result<Self> {
        let bad = || Error::Witness(format!("bad cycle notation {text:?}"));
        let mut images: Vec<usize> = (0..len).collect();
        let mut used = vec![false; len];
        let mut rest = text.trim();
        if rest == "()" {
            return Ok(Permutation { images });
        }
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let points = body[..close]
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            for &pt in &points {
                if pt == 0 || pt > len || std::mem::replace(&mut used[pt - 1], true) {
                    return Err(bad());
                }
            }
            for (k, &pt) in points.iter().enumerate() {
                images[pt - 1] = points[(k + 1) % points.len()] - 1;
            }
            rest = &body[close + 1..];
        }
        Ok(Permutation { images })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (k, i) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A triple `(U, V, W)` of invertible matrices acting by sandwiching. The
/// inverses are kept alongside so applying a triple never inverts.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SandwichTriple {
    u: Mat,
    v: Mat,
    w: Mat,
    u_inv: Mat,
    v_inv: Mat,
    w_inv: Mat,
}

impl SandwichTriple {
    pub fn new(u: Mat, v: Mat, w: Mat) -> Result<Self> {
        if !u.same_shape(&v) || !u.same_shape(&w) {
            return Err(Error::ShapeMismatch("triple components differ in shape".into()));
        }
        Ok(SandwichTriple { u_inv: u.inverse()?, v_inv: v.inverse()?, w_inv: w.inverse()?, u, v, w })
    }

    pub(crate) fn from_parts(pairs: [(Mat, Mat); 3]) -> Self {
        let [(u, u_inv), (v, v_inv), (w, w_inv)] = pairs;
        SandwichTriple { u, v, w, u_inv, v_inv, w_inv }
    }

    pub fn identity(field: Field, n: usize) -> Result<Self> {
        let i = Mat::identity(field, n)?;
        Ok(SandwichTriple { u: i, v: i, w: i, u_inv: i, v_inv: i, w_inv: i })
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    pub fn w(&self) -> &Mat {
        &self.w
    }

    pub fn u_inv(&self) -> &Mat {
        &self.u_inv
    }

    pub fn v_inv(&self) -> &Mat {
        &self.v_inv
    }

    pub fn w_inv(&self) -> &Mat {
        &self.w_inv
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn field(&self) -> Field {
        self.u.field()
    }

    pub fn is_identity(&self) -> bool {
        let i = Mat::identity(self.field(), self.n()).unwrap();
        self.u == i && self.v == i && self.w == i
    }

    /// `(U A V^-1, V B W^-1, W C U^-1)`.
    #[inline]
    pub fn apply(&self, row: &Row) -> Row {
        Row {
            a: self.u.mul(&row.a).mul(&self.v_inv),
            b: self.v.mul(&row.b).mul(&self.w_inv),
            c: self.w.mul(&row.c).mul(&self.u_inv),
        }
    }

    /// Componentwise product: `self` acts after `other`.
    pub fn compose(&self, other: &SandwichTriple) -> SandwichTriple {
        SandwichTriple {
            u: self.u.mul(&other.u),
            v: self.v.mul(&other.v),
            w: self.w.mul(&other.w),
            u_inv: other.u_inv.mul(&self.u_inv),
            v_inv: other.v_inv.mul(&self.v_inv),
            w_inv: other.w_inv.mul(&self.w_inv),
        }
    }

    pub fn inverse(&self) -> SandwichTriple {
        SandwichTriple { u: self.u_inv, v: self.v_inv, w: self.w_inv, u_inv: self.u, v_inv: self.v, w_inv: self.w }
    }

    /// The automorphism `phi(pi)` applied to this triple.
    pub fn twist(&self, pi: &Permutation) -> SandwichTriple {
        let comps = if pi.is_even() {
            [(self.u, self.u_inv), (self.v, self.v_inv), (self.w, self.w_inv)]
        } else {
            [
                (self.v_inv.transpose(), self.v.transpose()),
                (self.w_inv.transpose(), self.w.transpose()),
                (self.u_inv.transpose(), self.u.transpose()),
            ]
        };
        let moved = pi.permute(&comps);
        SandwichTriple::from_parts([moved[0], moved[1], moved[2]])
    }
}

/// A full group element `(sigma, pi, (U, V, W))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetryElement {
    pub sigma: Permutation,
    pub pi: Permutation,
    pub triple: SandwichTriple,
}

impl SymmetryElement {
    pub fn new(sigma: Permutation, pi: Permutation, triple: SandwichTriple) -> Result<Self> {
        if pi.len() != 3 {
            return Err(Error::Witness("column permutation must act on 3 points".into()));
        }
        Ok(SymmetryElement { sigma, pi, triple })
    }

    pub fn identity(field: Field, n: usize, r: usize) -> Result<Self> {
        Ok(SymmetryElement {
            sigma: Permutation::identity(r),
            pi: Permutation::identity(3),
            triple: SandwichTriple::identity(field, n)?,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity() && self.pi.is_identity() && self.triple.is_identity()
    }

    fn check_against(&self, scheme: &Scheme) -> Result<()> {
        if self.sigma.len() != scheme.r() || self.triple.n() != scheme.n() || self.triple.field() != scheme.field() {
            return Err(Error::ShapeMismatch(format!(
                "group element for r={}, n={}, {} applied to scheme with r={}, n={}, {}",
                self.sigma.len(),
                self.triple.n(),
                self.triple.field(),
                scheme.r(),
                scheme.n(),
                scheme.field()
            )));
        }
        Ok(())
    }

    /// Rows, then columns (with transposition when `pi` is odd), then the
    /// sandwich triple.
    pub fn apply(&self, scheme: &Scheme) -> Result<Scheme> {
        self.check_against(scheme)?;
        let permuted = self.sigma.permute(scheme.rows());
        let cs = crate::scheme::ColumnSymmetry::new(self.pi.clone())?;
        let rows = permuted.iter().map(|row| self.triple.apply(&cs.apply_row(row))).collect();
        Scheme::new(scheme.field(), scheme.n(), rows)
    }

    /// `self * other`; acting with the result equals acting with `other`
    /// first and then with `self`.
    pub fn compose(&self, other: &SymmetryElement) -> Result<SymmetryElement> {
        if self.sigma.len() != other.sigma.len()
            || self.triple.n() != other.triple.n()
            || self.triple.field() != other.triple.field()
        {
            return Err(Error::ShapeMismatch("composing elements of different groups".into()));
        }
        Ok(SymmetryElement {
            sigma: self.sigma.compose(&other.sigma),
            pi: self.pi.compose(&other.pi),
            triple: self.triple.compose(&other.triple.twist(&self.pi)),
        })
    }

    pub fn invert(&self) -> SymmetryElement {
        let pi_inv = self.pi.inverse();
        SymmetryElement { sigma: self.sigma.inverse(), triple: self.triple.inverse().twist(&pi_inv), pi: pi_inv }
    }

    /// `sigma:<cycles> pi:<cycles> U:<n^2 ints> V:<n^2 ints> W:<n^2 ints>`,
    /// matrices row-major and comma separated.
    pub fn to_text(&self) -> String {
        let mat = |m: &Mat| m.row_major().iter().map(u8::to_string).collect::<Vec<_>>().join(",");
        format!(
            "sigma:{} pi:{} U:{} V:{} W:{}",
            self.sigma,
            self.pi,
            mat(self.triple.u()),
            mat(self.triple.v()),
            mat(self.triple.w())
        )
    }

    pub fn parse_text(text: &str, field: Field, n: usize, r: usize) -> Result<Self> {
        let mut parts = [None; 5];
        const KEYS: [&str; 5] = ["sigma", "pi", "U", "V", "W"];
        for token in text.split_whitespace() {
            let (key, value) =
                token.split_once(':').ok_or_else(|| Error::Witness(format!("expected key:value, got {token:?}")))?;
            let slot =
                KEYS.iter().position(|k| *k == key).ok_or_else(|| Error::Witness(format!("unknown key {key:?}")))?;
            if parts[slot].replace(value).is_some() {
                return Err(Error::Witness(format!("duplicate key {key:?}")));
            }
        }
        let get = |k: usize| parts[k].ok_or_else(|| Error::Witness(format!("missing {}", KEYS[k])));
        let mat = |k: usize| -> Result<Mat> {
            let entries = get(k)?
                .split(',')
                .map(|t| t.parse::<u8>().map_err(|_| Error::Witness(format!("bad entry {t:?} in {}", KEYS[k]))))
                .collect::<Result<Vec<_>>>()?;
            Mat::from_row_major(field, n, &entries)
        };
        let triple = SandwichTriple::new(mat(2)?, mat(3)?, mat(4)?)?;
        SymmetryElement::new(Permutation::parse_cycles(get(0)?, r)?, Permutation::parse_cycles(get(1)?, 3)?, triple)
    }
}

impl fmt::Display for SymmetryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Uniform invertible matrix by rejection sampling.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Result<Mat> {
    let p = field.modulus();
    let mut entries = vec![0u8; n * n];
    loop {
        for e in entries.iter_mut() {
            *e = rng.gen_range(0..p);
        }
        let m = Mat::from_row_major(field, n, &entries)?;
        if m.is_invertible() {
            return Ok(m);
        }
    }
}

pub fn random_element_with<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, r: usize) -> Result<SymmetryElement> {
    let mut sigma: Vec<usize> = (0..r).collect();
    sigma.shuffle(rng);
    let mut pi = vec![0, 1, 2];
    pi.shuffle(rng);
    let triple = SandwichTriple::new(
        random_invertible(rng, field, n)?,
        random_invertible(rng, field, n)?,
        random_invertible(rng, field, n)?,
    )?;
    SymmetryElement::new(Permutation { images: sigma }, Permutation { images: pi }, triple)
}

/// Deterministic in `seed`.
pub fn random_element(field: Field, n: usize, r: usize, seed: u64) -> Result<SymmetryElement> {
    random_element_indexed(field, n, r, seed, 0)
}

/// The `index`-th element of the stream determined by `seed`; each index
/// draws from its own ChaCha stream so elements are independent of how many
/// were generated before.
pub fn random_element_indexed(field: Field, n: usize, r: usize, seed: u64, index: u64) -> Result<SymmetryElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_element_with(&mut rng, field, n, r)
}
