//! Exact arithmetic contexts: the prime field F_p and the rational line.
//!
//! Elements are plain values; the context they live in is carried by the
//! [`FieldCtx`] that operates on them (and by [`crate::set::FSet`], which
//! pairs a context with its elements). Every context operation validates its
//! operands, so a residue that is out of range for the modulus, or a rational
//! handed to a prime context, is reported as [`Error::ContextMismatch`].

mod primality;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use primality::{is_prime, is_prime_u64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    PrimeField,
    Rational,
}

/// The ambient field. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldCtx {
    Prime(Arc<BigUint>),
    Rational,
}

/// A field element in canonical form: a residue in `[0, p)` or a reduced
/// fraction with positive denominator.
///
/// Ordering is numeric within a context (residues compare as integers).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Residue(BigUint),
    Rational(BigRational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Elem {
    pub fn as_residue(&self) -> Option<&BigUint> {
        match self {
            Elem::Residue(v) => Some(v),
            Elem::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Elem::Rational(q) => Some(q),
            Elem::Residue(_) => None,
        }
    }

    pub fn residue_u64(&self) -> Option<u64> {
        self.as_residue().and_then(|v| v.to_u64())
    }

    /// The canonical representative viewed as a rational number: the residue
    /// itself for F_p, the fraction for Q.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Elem::Residue(v) => BigRational::from_integer(BigInt::from(v.clone())),
            Elem::Rational(q) => q.clone(),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Residue(v) => write!(f, "{v}"),
            Elem::Rational(q) => write!(f, "{}", render_rational(q)),
        }
    }
}

/// `"n"` for integers, `"num/den"` otherwise.
pub fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

impl FieldCtx {
    pub fn new(kind: FieldKind, modulus: Option<BigUint>) -> Result<Self> {
        match (kind, modulus) {
            (FieldKind::PrimeField, None) => Err(Error::MissingModulus),
            (FieldKind::PrimeField, Some(p)) => Self::prime_big(p),
            (FieldKind::Rational, None) => Ok(FieldCtx::Rational),
            (FieldKind::Rational, Some(_)) => Err(Error::UnexpectedModulus),
        }
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::prime_big(BigUint::from(p))
    }

    pub fn prime_big(p: BigUint) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NonPrimeModulus(p.to_string()));
        }
        Ok(FieldCtx::Prime(Arc::new(p)))
    }

    pub fn rational() -> Self {
        FieldCtx::Rational
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            FieldCtx::Prime(_) => FieldKind::PrimeField,
            FieldCtx::Rational => FieldKind::Rational,
        }
    }

    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            FieldCtx::Prime(p) => Some(p),
            FieldCtx::Rational => None,
        }
    }

    pub fn modulus_u64(&self) -> Option<u64> {
        self.modulus().and_then(|p| p.to_u64())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FieldCtx::Rational)
    }

    /// Short label used in tables: the modulus, or `Q`.
    pub fn label(&self) -> String {
        match self {
            FieldCtx::Prime(p) => p.to_string(),
            FieldCtx::Rational => "Q".to_string(),
        }
    }

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Elem {
        match self {
            FieldCtx::Prime(p) => {
                let p = BigInt::from((**p).clone());
                let r = v.mod_floor(&p);
                Elem::Residue(r.to_biguint().expect("mod_floor is nonnegative"))
            }
            FieldCtx::Rational => Elem::Rational(BigRational::from_integer(v.clone())),
        }
    }

    /// Maps a rational into the context. In F_p the denominator is inverted.
    pub fn from_rational(&self, q: &BigRational) -> Result<Elem> {
        match self {
            FieldCtx::Rational => Ok(Elem::Rational(q.clone())),
            FieldCtx::Prime(_) => {
                let n = self.from_bigint(q.numer());
                let d = self.from_bigint(q.denom());
                self.div(&n, &d)
            }
        }
    }

    /// Whether `e` is a canonical element of this context.
    pub fn contains(&self, e: &Elem) -> bool {
        match (self, e) {
            (FieldCtx::Prime(p), Elem::Residue(v)) => v < &**p,
            (FieldCtx::Rational, Elem::Rational(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, e: &Elem) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn is_zero(&self, e: &Elem) -> bool {
        match e {
            Elem::Residue(v) => v.is_zero(),
            Elem::Rational(q) => q.is_zero(),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub_unchecked(a, b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        self.div_unchecked(a, b)
    }

    pub fn neg(&self, a: &Elem) -> Result<Elem> {
        self.check(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        self.div(&self.one(), a)
    }

    pub fn arith(&self, op: ArithOp, a: &Elem, b: &Elem) -> Result<Elem> {
        match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b),
        }
    }

    // The *_unchecked variants assume both operands already belong to the
    // context; set-level code validates once on construction and then uses
    // these in inner loops.

    pub(crate) fn add_unchecked(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (FieldCtx::Prime(p), Elem::Residue(x), Elem::Residue(y)) => {
                let s = x + y;
                Elem::Residue(if s >= **p { s - &**p } else { s })
            }
            (FieldCtx::Rational, Elem::Rational(x), Elem::Rational(y)) => Elem::Rational(x + y),
            _ => unreachable!("operands validated against context"),
        }
    }

    pub(crate) fn sub_unchecked(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (FieldCtx::Prime(p), Elem::Residue(x), Elem::Residue(y)) => {
                Elem::Residue(if x >= y { x - y } else { &**p - y + x })
            }
            (FieldCtx::Rational, Elem::Rational(x), Elem::Rational(y)) => Elem::Rational(x - y),
            _ => unreachable!("operands validated against context"),
        }
    }

    pub(crate) fn mul_unchecked(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (FieldCtx::Prime(p), Elem::Residue(x), Elem::Residue(y)) => Elem::Residue((x * y) % &**p),
            (FieldCtx::Rational, Elem::Rational(x), Elem::Rational(y)) => Elem::Rational(x * y),
            _ => unreachable!("operands validated against context"),
        }
    }

    pub(crate) fn neg_unchecked(&self, a: &Elem) -> Elem {
        match (self, a) {
            (FieldCtx::Prime(p), Elem::Residue(x)) => Elem::Residue(if x.is_zero() { x.clone() } else { &**p - x }),
            (FieldCtx::Rational, Elem::Rational(x)) => Elem::Rational(-x),
            _ => unreachable!("operands validated against context"),
        }
    }

    pub(crate) fn inv_unchecked(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match (self, a) {
            (FieldCtx::Prime(p), Elem::Residue(x)) => {
                // Fermat: x^(p-2).
                let e = &**p - 2u32;
                Ok(Elem::Residue(x.modpow(&e, p)))
            }
            (FieldCtx::Rational, Elem::Rational(x)) => Ok(Elem::Rational(x.recip())),
            _ => unreachable!("operands validated against context"),
        }
    }

    pub(crate) fn div_unchecked(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let binv = self.inv_unchecked(b)?;
        Ok(self.mul_unchecked(a, &binv))
    }

    /// Text form: decimal residue, or `num/den` (integers without `/1`).
    pub fn render(&self, e: &Elem) -> String {
        e.to_string()
    }

    /// Parses the text form. Residues must already be in `[0, p)`;
    /// rationals are reduced.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        match self {
            FieldCtx::Prime(p) => {
                let v: BigInt = s.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
                if v.sign() == Sign::Minus || v >= BigInt::from((**p).clone()) {
                    return Err(Error::ResidueOutOfRange { value: v.to_string(), modulus: p.to_string() });
                }
                Ok(Elem::Residue(v.to_biguint().expect("checked nonnegative")))
            }
            FieldCtx::Rational => parse_rational(s).map(Elem::Rational),
        }
    }

    /// Sum of canonical representatives, as used for search tie-breaking.
    pub fn representative_sum<'a>(&self, elems: impl IntoIterator<Item = &'a Elem>) -> BigRational {
        elems.into_iter().fold(BigRational::zero(), |acc, e| acc + e.to_rational())
    }

    /// Whether the element equals -1 in this context.
    pub fn is_minus_one(&self, e: &Elem) -> bool {
        *e == self.from_i64(-1)
    }
}

/// Word-sized arithmetic for moduli below 2^32, used by inner loops of set
/// operations and search. Results are identical to the `BigUint` path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SmallPrime {
    pub p: u64,
}

impl SmallPrime {
    pub fn for_ctx(ctx: &FieldCtx) -> Option<Self> {
        ctx.modulus_u64().filter(|&p| p < (1 << 32)).map(|p| SmallPrime { p })
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - b + a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue.
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }
}
