//! Finite sets of field elements and the set arithmetic built on them:
//! sumsets, difference sets, product and ratio sets, the expander set
//! `A(B+1)`, signed k-fold sums, affine images and partial sumsets over an
//! explicit [`PairGraph`].

mod graph;
pub mod io;

use std::collections::HashMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx, SmallPrime};

pub use graph::PairGraph;

/// Binary operation used to combine two sets elementwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Sum,
    Diff,
    Prod,
    Ratio,
}

/// A finite set of elements of one field, stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FSet {
    ctx: FieldCtx,
    elems: Vec<Elem>,
}

impl FSet {
    pub fn new(ctx: FieldCtx, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let elems: Vec<Elem> = elems.into_iter().collect();
        for e in &elems {
            ctx.check(e)?;
        }
        Ok(Self::canonical(ctx, elems))
    }

    pub fn empty(ctx: FieldCtx) -> Self {
        FSet { ctx, elems: Vec::new() }
    }

    /// Builds a set from integers, reducing them into the context.
    pub fn from_i64s(ctx: &FieldCtx, values: &[i64]) -> Self {
        let elems = values.iter().map(|&v| ctx.from_i64(v)).collect();
        Self::canonical(ctx.clone(), elems)
    }

    /// Builds a rational set from `(numerator, denominator)` pairs.
    pub fn from_fractions(values: &[(i64, i64)]) -> Result<Self> {
        let ctx = FieldCtx::rational();
        let mut elems = Vec::with_capacity(values.len());
        for &(n, d) in values {
            if d == 0 {
                return Err(Error::DivisionByZero);
            }
            elems.push(Elem::Rational(BigRational::new(n.into(), d.into())));
        }
        Ok(Self::canonical(ctx, elems))
    }

    pub(crate) fn canonical(ctx: FieldCtx, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        FSet { ctx, elems }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Elem> {
        self.elems.iter()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&self.ctx.zero())
    }

    pub fn contains_minus_one(&self) -> bool {
        self.contains(&self.ctx.from_i64(-1))
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&self.ctx.one())
    }

    pub fn same_ctx(&self, other: &FSet) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.ctx == other.ctx && self.elems.iter().all(|e| other.contains(e))
    }

    /// Sorted-merge intersection.
    pub fn intersection(&self, other: &FSet) -> Result<FSet> {
        self.same_ctx(other)?;
        let mut out = Vec::new();
        merge_walk(&self.elems, &other.elems, |e| out.push(e.clone()));
        Ok(FSet { ctx: self.ctx.clone(), elems: out })
    }

    pub fn intersection_size(&self, other: &FSet) -> Result<usize> {
        self.same_ctx(other)?;
        let mut n = 0;
        merge_walk(&self.elems, &other.elems, |_| n += 1);
        Ok(n)
    }

    pub fn union(&self, other: &FSet) -> Result<FSet> {
        self.same_ctx(other)?;
        let mut v = self.elems.clone();
        v.extend(other.elems.iter().cloned());
        Ok(Self::canonical(self.ctx.clone(), v))
    }

    pub fn difference(&self, other: &FSet) -> Result<FSet> {
        self.same_ctx(other)?;
        let elems = self.elems.iter().filter(|e| !other.contains(e)).cloned().collect();
        Ok(FSet { ctx: self.ctx.clone(), elems })
    }

    /// Subset selected by a predicate; order is preserved.
    pub fn filter(&self, mut keep: impl FnMut(&Elem) -> bool) -> FSet {
        let elems = self.elems.iter().filter(|e| keep(e)).cloned().collect();
        FSet { ctx: self.ctx.clone(), elems }
    }

    /// Subset by index positions.
    pub fn select(&self, indices: impl IntoIterator<Item = usize>) -> FSet {
        let elems = indices.into_iter().map(|i| self.elems[i].clone()).collect();
        Self::canonical(self.ctx.clone(), elems)
    }

    /// Image under an arbitrary map into the same context.
    pub(crate) fn map_unchecked(&self, f: impl Fn(&Elem) -> Elem) -> FSet {
        Self::canonical(self.ctx.clone(), self.elems.iter().map(f).collect())
    }

    /// `A + y`.
    pub fn translate(&self, y: &Elem) -> Result<FSet> {
        self.ctx.check(y)?;
        Ok(self.map_unchecked(|a| self.ctx.add_unchecked(a, y)))
    }

    /// `x * A` for any `x`, including zero (which collapses the set).
    pub fn dilate(&self, x: &Elem) -> Result<FSet> {
        self.ctx.check(x)?;
        Ok(self.map_unchecked(|a| self.ctx.mul_unchecked(a, x)))
    }

    /// `-A`.
    pub fn negate(&self) -> FSet {
        self.map_unchecked(|a| self.ctx.neg_unchecked(a))
    }

    /// `A^{-1}`; fails if `0 ∈ A`.
    pub fn inverse(&self) -> Result<FSet> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut v = Vec::with_capacity(self.len());
        for a in &self.elems {
            v.push(self.ctx.inv_unchecked(a)?);
        }
        Ok(Self::canonical(self.ctx.clone(), v))
    }

    /// `xA + y` with `x ≠ 0`; always a bijective image.
    pub fn affine_image(&self, x: &Elem, y: &Elem) -> Result<FSet> {
        self.ctx.check(x)?;
        self.ctx.check(y)?;
        if self.ctx.is_zero(x) {
            return Err(Error::ZeroDilation);
        }
        Ok(self.map_unchecked(|a| self.ctx.add_unchecked(&self.ctx.mul_unchecked(a, x), y)))
    }

    /// `A + 1`.
    pub fn shift_one(&self) -> FSet {
        let one = self.ctx.one();
        self.map_unchecked(|a| self.ctx.add_unchecked(a, &one))
    }

    /// All pairwise results `a op b`.
    pub fn combine(&self, other: &FSet, op: SetOp) -> Result<FSet> {
        self.same_ctx(other)?;
        if op == SetOp::Ratio && other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(sp) = SmallPrime::for_ctx(&self.ctx) {
            let a = self.residues();
            let mut b = other.residues();
            if op == SetOp::Ratio {
                b.iter_mut().for_each(|v| *v = sp.inv(*v));
            }
            let f = small_op(sp, op);
            let out = a.iter().flat_map(|&x| b.iter().map(move |&y| f(x, y)));
            return Ok(self.sibling_from_small(sp, out));
        }
        let rhs = match op {
            SetOp::Ratio => other.inverse()?,
            _ => other.clone(),
        };
        let mut out = Vec::with_capacity(self.len() * rhs.len());
        for a in &self.elems {
            for b in &rhs.elems {
                out.push(self.apply_unchecked(op, a, b));
            }
        }
        Ok(Self::canonical(self.ctx.clone(), out))
    }

    /// `A(B+1) = {a(b+1) : a ∈ A, b ∈ B}`.
    pub fn expander_set(&self, other: &FSet) -> Result<FSet> {
        self.same_ctx(other)?;
        self.combine(&other.shift_one(), SetOp::Prod)
    }

    /// `{Σ s_i a_i : a_i ∈ A}` for a list of signs `±1`.
    pub fn kfold_sum(&self, signs: &[i8]) -> Result<FSet> {
        if signs.is_empty() {
            return Err(Error::InvalidArgument("k-fold sum needs at least one sign".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        let signed = |s: i8| if s == 1 { self.clone() } else { self.negate() };
        let mut acc = signed(signs[0]);
        for &s in &signs[1..] {
            acc = acc.combine(&signed(s), SetOp::Sum)?;
        }
        Ok(acc)
    }

    /// `|A ∩ xB|` by dilating `B` and merging.
    pub fn dilate_intersection_size(&self, other: &FSet, x: &Elem) -> Result<usize> {
        self.intersection_size(&other.dilate(x)?)
    }

    /// Representation counts `x ↦ #{(a, b) : a op b = x}` over all pairs.
    pub fn representation_counts(&self, other: &FSet, op: SetOp) -> Result<Vec<(Elem, u64)>> {
        self.same_ctx(other)?;
        if op == SetOp::Ratio && other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(sp) = SmallPrime::for_ctx(&self.ctx) {
            let a = self.residues();
            let mut b = other.residues();
            if op == SetOp::Ratio {
                b.iter_mut().for_each(|v| *v = sp.inv(*v));
            }
            let f = small_op(sp, op);
            let mut counts: HashMap<u64, u64> = HashMap::new();
            for &x in &a {
                for &y in &b {
                    *counts.entry(f(x, y)).or_default() += 1;
                }
            }
            let mut v: Vec<(Elem, u64)> = counts.into_iter().map(|(k, c)| (Elem::Residue(k.into()), c)).collect();
            v.sort_unstable();
            return Ok(v);
        }
        let rhs = match op {
            SetOp::Ratio => other.inverse()?,
            _ => other.clone(),
        };
        let mut counts: HashMap<Elem, u64> = HashMap::new();
        for a in &self.elems {
            for b in &rhs.elems {
                *counts.entry(self.apply_unchecked(op, a, b)).or_default() += 1;
            }
        }
        let mut v: Vec<(Elem, u64)> = counts.into_iter().collect();
        v.sort_unstable();
        Ok(v)
    }

    /// Sum of canonical representatives.
    pub fn representative_sum(&self) -> BigRational {
        self.ctx.representative_sum(&self.elems)
    }

    /// Canonical text forms of the elements.
    pub fn rendered(&self) -> Vec<String> {
        self.elems.iter().map(|e| e.to_string()).collect()
    }

    fn apply_unchecked(&self, op: SetOp, a: &Elem, b: &Elem) -> Elem {
        // For Ratio the right operand has already been inverted.
        match op {
            SetOp::Sum => self.ctx.add_unchecked(a, b),
            SetOp::Diff => self.ctx.sub_unchecked(a, b),
            SetOp::Prod | SetOp::Ratio => self.ctx.mul_unchecked(a, b),
        }
    }

    pub(crate) fn residues(&self) -> Vec<u64> {
        self.elems.iter().map(|e| e.residue_u64().expect("small prime context")).collect()
    }

    /// Collects word-sized residues. Moduli up to 2^16 use a dense bitmask;
    /// larger ones sort and deduplicate.
    fn sibling_from_small(&self, sp: SmallPrime, values: impl Iterator<Item = u64>) -> FSet {
        let elems = if sp.p <= 1 << 16 {
            let mut mask = vec![0u64; (sp.p as usize).div_ceil(64)];
            for v in values {
                mask[(v / 64) as usize] |= 1 << (v % 64);
            }
            let mut out = Vec::new();
            for (w, &word) in mask.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let t = bits.trailing_zeros() as u64;
                    out.push(Elem::Residue((w as u64 * 64 + t).into()));
                    bits &= bits - 1;
                }
            }
            out
        } else {
            let mut v: Vec<u64> = values.collect();
            v.sort_unstable();
            v.dedup();
            v.into_iter().map(|x| Elem::Residue(x.into())).collect()
        };
        FSet { ctx: self.ctx.clone(), elems }
    }
}

fn small_op(sp: SmallPrime, op: SetOp) -> impl Fn(u64, u64) -> u64 + Copy {
    move |x, y| match op {
        SetOp::Sum => sp.add(x, y),
        SetOp::Diff => sp.sub(x, y),
        SetOp::Prod | SetOp::Ratio => sp.mul(x, y),
    }
}

fn merge_walk<'a>(a: &'a [Elem], b: &'a [Elem], mut hit: impl FnMut(&'a Elem)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hit(&a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

impl<'a> IntoIterator for &'a FSet {
    type Item = &'a Elem;
    type IntoIter = std::slice::Iter<'a, Elem>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}
