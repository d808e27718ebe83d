//! Prime fields GF(p) with `p <= 251`.
//!
//! Elements are stored as their representative in `0..p`, one byte each. The
//! total order used by every comparison in the crate is the order of these
//! representatives, so `0 < 1 < 2 < ... < p - 1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const MAX_MODULUS: u32 = 251;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    p: u8,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p: p as u8 })
    }

    #[inline]
    pub fn modulus(self) -> u8 {
        self.p
    }

    pub fn elem(self, value: u32) -> Result<FieldElement> {
        if value >= self.p as u32 {
            return Err(Error::EntryOutOfRange { value, p: self.p });
        }
        Ok(FieldElement { value: value as u8, field: self })
    }

    /// Reduces an arbitrary integer, so `-1` maps to `p - 1`.
    pub fn reduce(self, value: i64) -> u8 {
        value.rem_euclid(self.p as i64) as u8
    }

    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.p).map(move |value| FieldElement { value, field: self })
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // a^(p-2) by square and multiply
        let (mut base, mut exp, mut acc) = (a, self.p as u32 - 2, 1u8);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        Ok(acc)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// An element of a prime field, tagged with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    field: Field,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    #[inline]
    pub fn field(self) -> Field {
        self.field
    }

    pub fn inv(self) -> Result<Self> {
        Ok(FieldElement { value: self.field.inv(self.value)?, field: self.field })
    }

    fn same_field(self, other: Self) -> Field {
        assert_eq!(self.field, other.field, "operands from different fields");
        self.field
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let field = self.same_field(rhs);
        FieldElement { value: field.add(self.value, rhs.value), field }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let field = self.same_field(rhs);
        FieldElement { value: field.sub(self.value, rhs.value), field }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let field = self.same_field(rhs);
        FieldElement { value: field.mul(self.value, rhs.value), field }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement { value: self.field.neg(self.value), field: self.field }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.same_field(*other);
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
