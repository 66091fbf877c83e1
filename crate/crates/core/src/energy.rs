//! Multiplicity spectra and the energies derived from them.
//!
//! A [`MultiplicityHistogram`] records, for each multiplicity `m`, how many
//! support points `x` have exactly `m` representations. Every higher energy
//! `E_α = Σ_x μ(x)^α` and every rich-product set `S_t` is a function of that
//! spectrum, so the histogram is the single computed object and everything
//! else reads from it.
//!
//! Three spectra are supported:
//!
//! * `Ratio`: `μ(x) = |A ∩ xB| = #{(a, b) : a/b = x}` over `x ∈ A/B`;
//! * `Product`: `μ(x) = |A ∩ xB^{-1}| = #{(a, b) : ab = x}` over `x ∈ AB`;
//! * `AdditiveShift`: `μ(x) = |A ∩ (x + B)| = #{(a, b) : a - b = x}` over
//!   `x ∈ A - B`.
//!
//! Second moments agree between `Ratio` and `Product` (both count solutions
//! of `ab = a'b'`); the other moments do not.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::certified::{
    pow_rational_interval, Interval, DEFAULT_PRECISION, DEFAULT_PRECISION_CAP, TARGET_RELATIVE_BITS,
};
use crate::error::{Error, Result};
use crate::field::{Elem, SmallPrime};
use crate::set::{FSet, SetOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramKind {
    Product,
    Ratio,
    AdditiveShift,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityHistogram {
    kind: HistogramKind,
    left_size: u64,
    right_size: u64,
    /// `(m, count)` sorted by `m`, counts positive.
    pairs: Vec<(u64, u64)>,
}

impl MultiplicityHistogram {
    pub fn from_counts(
        kind: HistogramKind,
        left_size: u64,
        right_size: u64,
        mults: impl IntoIterator<Item = u64>,
    ) -> Self {
        let mut spectrum: BTreeMap<u64, u64> = BTreeMap::new();
        for m in mults {
            *spectrum.entry(m).or_default() += 1;
        }
        MultiplicityHistogram { kind, left_size, right_size, pairs: spectrum.into_iter().collect() }
    }

    pub fn kind(&self) -> HistogramKind {
        self.kind
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn count(&self, m: u64) -> u64 {
        self.pairs.iter().find(|&&(k, _)| k == m).map_or(0, |&(_, c)| c)
    }

    /// Number of support points, i.e. `|AB|`, `|A/B|` or `|A - B|`.
    pub fn total_support(&self) -> u64 {
        self.pairs.iter().map(|&(_, c)| c).sum()
    }

    /// `Σ m · count(m)`; equals `|A||B|`.
    pub fn pair_total(&self) -> u64 {
        self.pairs.iter().map(|&(m, c)| m * c).sum()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.pairs.last().map_or(0, |&(m, _)| m)
    }

    pub fn left_size(&self) -> u64 {
        self.left_size
    }

    pub fn right_size(&self) -> u64 {
        self.right_size
    }

    /// `Σ count(m) · m^k`, exact.
    pub fn moment(&self, k: u32) -> BigUint {
        self.pairs.iter().map(|&(m, c)| BigUint::from(m).pow(k) * c).fold(BigUint::zero(), |a, b| a + b)
    }

    /// Number of support points with multiplicity at least `t`.
    pub fn support_at_least(&self, t: u64) -> u64 {
        self.pairs.iter().filter(|&&(m, _)| m >= t).map(|&(_, c)| c).sum()
    }

    /// Splits the spectrum into `m ≤ delta` and `m > delta`.
    pub fn split_at(&self, delta: u64) -> (MultiplicityHistogram, MultiplicityHistogram) {
        let part = |keep: &dyn Fn(u64) -> bool| MultiplicityHistogram {
            kind: self.kind,
            left_size: self.left_size,
            right_size: self.right_size,
            pairs: self.pairs.iter().copied().filter(|&(m, _)| keep(m)).collect(),
        };
        (part(&|m| m <= delta), part(&|m| m > delta))
    }

    /// `E_α` at a fixed working precision.
    pub fn energy_at_precision(&self, alpha: &BigRational, bits: u32) -> Interval {
        let mut acc = Interval::from_int(0);
        for &(m, c) in &self.pairs {
            let term = pow_rational_interval(&BigRational::from_integer(m.into()), alpha, bits);
            acc = acc.add(&term.scale(&BigRational::from_integer(c.into())));
        }
        acc
    }

    /// Exact value of `E_{3/2}^2` when it is rational.
    ///
    /// Writing `m = s²d` with `d` squarefree, `E_{3/2} = Σ_d R_d √d` with
    /// `R_d = Σ count·m·s`. When only one squarefree class occurs the square is
    /// the integer `R_d² d`; otherwise it is irrational and `None` is
    /// returned.
    pub fn three_halves_squared_exact(&self) -> Option<BigUint> {
        let mut classes: BTreeMap<u64, BigUint> = BTreeMap::new();
        for &(m, c) in &self.pairs {
            let (s, d) = squarefree_split(m);
            *classes.entry(d).or_default() += BigUint::from(m) * s * c;
        }
        match classes.len() {
            0 => Some(BigUint::zero()),
            1 => {
                let (d, r) = classes.into_iter().next().expect("one class");
                Some(&r * &r * d)
            }
            _ => None,
        }
    }
}

/// `m = s² d` with `d` squarefree.
fn squarefree_split(mut m: u64) -> (u64, u64) {
    let mut s = 1;
    let mut d = 1;
    let mut f = 2;
    while f * f <= m {
        let mut e = 0;
        while m.is_multiple_of(f) {
            m /= f;
            e += 1;
        }
        s *= f.pow(e / 2);
        if e % 2 == 1 {
            d *= f;
        }
        f += 1;
    }
    (s, d * m)
}

/// Serializes as `[[m, count], ...]`.
pub fn serialize_pairs<S: Serializer>(pairs: &[(u64, u64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    pairs.serialize(s)
}

fn rejects_zero(a: &FSet, b: &FSet) -> Result<()> {
    if a.contains_zero() || b.contains_zero() {
        Err(Error::ZeroElementPresent)
    } else {
        Ok(())
    }
}

/// Multiplicity spectrum of the chosen kind.
pub fn histogram(a: &FSet, b: &FSet, kind: HistogramKind) -> Result<MultiplicityHistogram> {
    a.same_ctx(b)?;
    let op = match kind {
        HistogramKind::Product => SetOp::Prod,
        HistogramKind::Ratio => SetOp::Ratio,
        HistogramKind::AdditiveShift => SetOp::Diff,
    };
    if kind != HistogramKind::AdditiveShift {
        rejects_zero(a, b)?;
    }
    let counts = a.representation_counts(b, op)?;
    Ok(MultiplicityHistogram::from_counts(kind, a.len() as u64, b.len() as u64, counts.into_iter().map(|(_, c)| c)))
}

/// A value of `E_α`: exact (a point) for integer `α`, a certified enclosure
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyValue {
    pub alpha: BigRational,
    pub value: Interval,
    pub precision_bits: u32,
}

impl EnergyValue {
    pub fn is_exact(&self) -> bool {
        self.value.is_point()
    }

    /// The exact integer value when the enclosure is a point.
    pub fn exact(&self) -> Option<&BigRational> {
        self.is_exact().then(|| self.value.lo())
    }
}

impl Serialize for EnergyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EnergyValue", 4)?;
        st.serialize_field("alpha", &crate::field::render_rational(&self.alpha))?;
        st.serialize_field("exact", &self.is_exact())?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        st.end()
    }
}

/// `E_α` from a histogram with the default precision cap.
pub fn energy(hist: &MultiplicityHistogram, alpha: &BigRational) -> Result<EnergyValue> {
    energy_with_cap(hist, alpha, DEFAULT_PRECISION_CAP)
}

/// `E_α` with precision doubling from 128 bits until the relative width is
/// below `2^-64`, failing once `cap` bits have been tried.
pub fn energy_with_cap(hist: &MultiplicityHistogram, alpha: &BigRational, cap: u32) -> Result<EnergyValue> {
    if alpha < &BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "energy exponent must be at least 1, got {}",
            crate::field::render_rational(alpha)
        )));
    }
    if alpha.is_integer() {
        let k = u32::try_from(alpha.numer().clone())
            .map_err(|_| Error::InvalidArgument("energy exponent too large".into()))?;
        return Ok(EnergyValue {
            alpha: alpha.clone(),
            value: Interval::point(BigRational::from_integer(hist.moment(k).into())),
            precision_bits: 0,
        });
    }
    let mut bits = DEFAULT_PRECISION.min(cap);
    loop {
        let value = hist.energy_at_precision(alpha, bits);
        if value.relative_width_below(TARGET_RELATIVE_BITS) {
            return Ok(EnergyValue { alpha: alpha.clone(), value, precision_bits: bits });
        }
        if bits >= cap {
            return Err(Error::PrecisionCapExceeded { lo: value.lo_decimal(), hi: value.hi_decimal() });
        }
        bits = (bits * 2).min(cap);
    }
}

/// `S_t(A, B) = {s ∈ AB : |A ∩ sB^{-1}| ≥ t}`.
pub fn rich_products(a: &FSet, b: &FSet, t: u64) -> Result<FSet> {
    a.same_ctx(b)?;
    rejects_zero(a, b)?;
    let max = a.len().min(b.len()) as u64;
    if t < 1 || t > max {
        return Err(Error::TOutOfRange { t, max });
    }
    let counts = a.representation_counts(b, SetOp::Prod)?;
    let elems: Vec<Elem> = counts.into_iter().filter(|&(_, c)| c >= t).map(|(x, _)| x).collect();
    FSet::new(a.ctx().clone(), elems)
}

fn sum_of_squares(counts: impl IntoIterator<Item = u64>) -> u128 {
    counts.into_iter().map(|c| (c as u128) * (c as u128)).sum()
}

/// `E₊(A, B) = #{(a, b, a', b') : a + b = a' + b'}`.
pub fn additive_energy(a: &FSet, b: &FSet) -> Result<u128> {
    let counts = a.representation_counts(b, SetOp::Sum)?;
    Ok(sum_of_squares(counts.into_iter().map(|(_, c)| c)))
}

/// `E(A, ξA) = #{(a, b, c, d) ∈ A⁴ : a + ξb = c + ξd}`.
pub fn twisted_energy(a: &FSet, xi: &Elem) -> Result<u128> {
    a.ctx().check(xi)?;
    if a.ctx().is_zero(xi) {
        return Err(Error::ZeroTwist);
    }
    if let Some(sp) = SmallPrime::for_ctx(a.ctx()) {
        let v = a.residues();
        let x = xi.residue_u64().expect("small prime");
        let mut counts: HashMap<u64, u64> = HashMap::with_capacity(v.len() * v.len());
        for &p in &v {
            for &q in &v {
                *counts.entry(sp.add(p, sp.mul(x, q))).or_default() += 1;
            }
        }
        return Ok(sum_of_squares(counts.into_values()));
    }
    additive_energy(a, &a.dilate(xi)?)
}

/// `E₂(A, B)`, the multiplicative energy (requires `0 ∉ A, B`).
pub fn multiplicative_energy(a: &FSet, b: &FSet) -> Result<BigUint> {
    Ok(histogram(a, b, HistogramKind::Product)?.moment(2))
}

/// Direct quadruple counting, independent of the histogram route.
///
/// Cost is `O(|A|²|B|²)`; inputs larger than [`oracle::SIZE_LIMIT`] are
/// refused unless `allow_large` is set.
pub mod oracle {
    use super::*;

    pub const SIZE_LIMIT: usize = 20;

    fn gate(sizes: &[usize], allow_large: bool) -> Result<()> {
        match sizes.iter().max() {
            Some(&n) if n > SIZE_LIMIT && !allow_large => {
                Err(Error::BudgetExceeded { needed: format!("set of size {n}"), budget: SIZE_LIMIT as u64 })
            }
            _ => Ok(()),
        }
    }

    fn count4(a: &FSet, b: &FSet, allow_large: bool, eq: impl Fn(&Elem, &Elem, &Elem, &Elem) -> bool) -> Result<u128> {
        a.same_ctx(b)?;
        gate(&[a.len(), b.len()], allow_large)?;
        let mut n = 0u128;
        for x in a {
            for y in b {
                for x2 in a {
                    for y2 in b {
                        if eq(x, y, x2, y2) {
                            n += 1;
                        }
                    }
                }
            }
        }
        Ok(n)
    }

    /// `#{ab = a'b'}`.
    pub fn multiplicative_quadruples(a: &FSet, b: &FSet, allow_large: bool) -> Result<u128> {
        let ctx = a.ctx().clone();
        count4(a, b, allow_large, |x, y, x2, y2| ctx.mul_unchecked(x, y) == ctx.mul_unchecked(x2, y2))
    }

    /// `#{a + b = a' + b'}`.
    pub fn additive_quadruples(a: &FSet, b: &FSet, allow_large: bool) -> Result<u128> {
        let ctx = a.ctx().clone();
        count4(a, b, allow_large, |x, y, x2, y2| ctx.add_unchecked(x, y) == ctx.add_unchecked(x2, y2))
    }

    /// `#{a + ξb = c + ξd}` over `A⁴`.
    pub fn twisted_quadruples(a: &FSet, xi: &Elem, allow_large: bool) -> Result<u128> {
        let ctx = a.ctx().clone();
        ctx.check(xi)?;
        count4(a, a, allow_large, |x, y, x2, y2| {
            ctx.add_unchecked(x, &ctx.mul_unchecked(xi, y)) == ctx.add_unchecked(x2, &ctx.mul_unchecked(xi, y2))
        })
    }

    /// `Σ_x μ(x)^k` by enumerating pairs and counting each support point's
    /// multiplicity with a direct scan.
    pub fn moment_by_scan(a: &FSet, b: &FSet, op: SetOp, k: u32, allow_large: bool) -> Result<u128> {
        a.same_ctx(b)?;
        gate(&[a.len(), b.len()], allow_large)?;
        let ctx = a.ctx();
        let apply = |x: &Elem, y: &Elem| -> Result<Elem> {
            match op {
                SetOp::Sum => ctx.add(x, y),
                SetOp::Diff => ctx.sub(x, y),
                SetOp::Prod => ctx.mul(x, y),
                SetOp::Ratio => ctx.div(x, y),
            }
        };
        let support = a.combine(b, op)?;
        let mut total = 0u128;
        for s in &support {
            let mut m = 0u128;
            for x in a {
                for y in b {
                    if apply(x, y)? == *s {
                        m += 1;
                    }
                }
            }
            total += m.pow(k);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn fp(p: u64, v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::prime(p).unwrap(), v)
    }

    fn q(v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::rational(), v)
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn subgroup_histogram() {
        let h = fp(7, &[1, 2, 4]);
        let hist = histogram(&h, &h, HistogramKind::Ratio).unwrap();
        assert_eq!(hist.pairs(), &[(3, 3)]);
        let prod = histogram(&h, &h, HistogramKind::Product).unwrap();
        assert_eq!(prod.pairs(), &[(3, 3)]);

        let one = fp(7, &[1]);
        assert_eq!(histogram(&one, &one, HistogramKind::Ratio).unwrap().pairs(), &[(1, 1)]);
        assert_eq!(histogram(&fp(7, &[0, 1]), &h, HistogramKind::Product), Err(Error::ZeroElementPresent));
        // Additive shifts tolerate zero.
        assert!(histogram(&fp(7, &[0, 1]), &h, HistogramKind::AdditiveShift).is_ok());
    }

    #[test]
    fn subgroup_energies() {
        let h = fp(7, &[1, 2, 4]);
        let hist = histogram(&h, &h, HistogramKind::Ratio).unwrap();
        assert_eq!(energy(&hist, &int(2)).unwrap().exact(), Some(&int(27)));
        assert_eq!(energy(&hist, &int(3)).unwrap().exact(), Some(&int(81)));
    }

    #[test]
    fn fractional_energy_encloses() {
        // {1,2,3}: ratio multiplicities 3 (x=1), 1 for the six others.
        let a = q(&[1, 2, 3]);
        let hist = histogram(&a, &a, HistogramKind::Ratio).unwrap();
        assert_eq!(hist.pairs(), &[(1, 6), (3, 1)]);
        let e = energy(&hist, &BigRational::new(3.into(), 2.into())).unwrap();
        assert!(!e.is_exact());
        // 6 + 3√3 = 11.19615242270663188058...
        assert!(e.value.lo_decimal().starts_with("11.1961524227066318805"), "{}", e.value);
        assert!(e.value.relative_width_below(64));
        assert_eq!(e.precision_bits, 128);
    }

    #[test]
    fn fractional_energy_exact_for_squares() {
        let hist = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 4, 4, [4, 1, 1, 9]);
        let e = energy(&hist, &BigRational::new(3.into(), 2.into())).unwrap();
        assert_eq!(e.exact(), Some(&int(8 + 1 + 1 + 27)));
    }

    #[test]
    fn energy_rejects_small_alpha() {
        let hist = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 1, 1, [1]);
        assert!(energy(&hist, &BigRational::new(1.into(), 2.into())).is_err());
    }

    #[test]
    fn precision_cap_reports_enclosure() {
        let hist = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 2, 2, [2, 3]);
        let alpha = BigRational::new(3.into(), 2.into());
        assert!(energy_with_cap(&hist, &alpha, 128).is_ok());
        match energy_with_cap(&hist, &alpha, 32) {
            Err(Error::PrecisionCapExceeded { lo, hi }) => assert!(lo < hi),
            other => panic!("expected cap failure, got {other:?}"),
        }
        let coarse = hist.energy_at_precision(&alpha, 2);
        let fine = hist.energy_at_precision(&alpha, 256);
        assert!(fine.within(&coarse));
    }

    #[test]
    fn three_halves_squared() {
        // m = 2 and m = 8 share squarefree class 2: 2√2 + 8·2√2 = 18√2.
        let hist = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 0, 0, [2, 8]);
        assert_eq!(hist.three_halves_squared_exact(), Some(BigUint::from(18u32 * 18 * 2)));
        let mixed = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 0, 0, [2, 3]);
        assert_eq!(mixed.three_halves_squared_exact(), None);
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(97), (1, 97));
    }

    #[test]
    fn rich_product_examples() {
        let h = fp(7, &[1, 2, 4]);
        assert_eq!(rich_products(&h, &h, 3).unwrap(), h);
        let a = q(&[2, 3, 5]);
        let b = q(&[2, 7]);
        assert_eq!(rich_products(&a, &b, 1).unwrap(), a.combine(&b, SetOp::Prod).unwrap());
        assert_eq!(rich_products(&h, &h, 4), Err(Error::TOutOfRange { t: 4, max: 3 }));
        assert_eq!(rich_products(&h, &h, 0), Err(Error::TOutOfRange { t: 0, max: 3 }));
        assert_eq!(rich_products(&fp(7, &[0, 1]), &h, 1), Err(Error::ZeroElementPresent));
    }

    #[test]
    fn additive_energy_examples() {
        let a = fp(5, &[0, 1]);
        assert_eq!(additive_energy(&a, &a).unwrap(), 6);
        let all = fp(5, &[0, 1, 2, 3, 4]);
        assert_eq!(additive_energy(&all, &all).unwrap(), 125);
    }

    #[test]
    fn twisted_energy_examples() {
        let f = FieldCtx::prime(5).unwrap();
        let a = fp(5, &[0, 1]);
        assert_eq!(twisted_energy(&a, &f.one()).unwrap(), 6);
        let all = fp(5, &[0, 1, 2, 3, 4]);
        assert_eq!(twisted_energy(&all, &f.from_i64(2)).unwrap(), 125);
        assert_eq!(twisted_energy(&a, &f.zero()), Err(Error::ZeroTwist));
        // Generic path through the rationals.
        let r = q(&[1, 2, 3]);
        let xi = FieldCtx::rational().from_i64(2);
        assert_eq!(twisted_energy(&r, &xi).unwrap(), oracle::twisted_quadruples(&r, &xi, false).unwrap());
    }

    #[test]
    fn oracle_size_gate() {
        let big = FSet::from_i64s(&FieldCtx::prime(101).unwrap(), &(1..=21).collect::<Vec<_>>());
        assert!(matches!(oracle::multiplicative_quadruples(&big, &big, false), Err(Error::BudgetExceeded { .. })));
        assert!(oracle::multiplicative_quadruples(&big, &big, true).is_ok());
    }

    #[test]
    fn split_partitions_spectrum() {
        let hist = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 0, 0, [1, 1, 2, 3, 5]);
        let (lo, hi) = hist.split_at(2);
        assert_eq!(lo.pairs(), &[(1, 2), (2, 1)]);
        assert_eq!(hi.pairs(), &[(3, 1), (5, 1)]);
        assert_eq!(lo.moment(2) + hi.moment(2), hist.moment(2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn nonzero_set(p: u64, max: usize) -> impl Strategy<Value = FSet> {
            proptest::collection::vec(1..p as i64, 1..=max).prop_map(move |v| fp(p, &v))
        }

        proptest! {
            #[test]
            fn pair_counting_identity(a in nonzero_set(97, 16), b in nonzero_set(97, 16)) {
                for kind in [HistogramKind::Product, HistogramKind::Ratio, HistogramKind::AdditiveShift] {
                    let h = histogram(&a, &b, kind).unwrap();
                    prop_assert_eq!(h.pair_total(), (a.len() * b.len()) as u64);
                    prop_assert!(h.max_multiplicity() <= a.len().min(b.len()) as u64);
                }
            }

            #[test]
            fn second_moment_matches_quadruples(a in nonzero_set(53, 12), b in nonzero_set(53, 12)) {
                let direct = oracle::multiplicative_quadruples(&a, &b, false).unwrap();
                for kind in [HistogramKind::Product, HistogramKind::Ratio] {
                    let h = histogram(&a, &b, kind).unwrap();
                    let e = energy(&h, &int(2)).unwrap();
                    prop_assert_eq!(e.exact().unwrap(), &BigRational::from_integer(direct.into()));
                }
                prop_assert!(direct >= (a.len() * b.len()) as u128);
            }

            #[test]
            fn integer_moments_match_scan(a in nonzero_set(31, 8), b in nonzero_set(31, 8), k in 1u32..5) {
                let h = histogram(&a, &b, HistogramKind::Ratio).unwrap();
                let scan = oracle::moment_by_scan(&a, &b, SetOp::Ratio, k, false).unwrap();
                prop_assert_eq!(h.moment(k), BigUint::from(scan));
                let hp = histogram(&a, &b, HistogramKind::Product).unwrap();
                let scan = oracle::moment_by_scan(&a, &b, SetOp::Prod, k, false).unwrap();
                prop_assert_eq!(hp.moment(k), BigUint::from(scan));
            }

            #[test]
            fn additive_energy_matches_oracle(a in nonzero_set(41, 10), b in nonzero_set(41, 10)) {
                let e = additive_energy(&a, &b).unwrap();
                prop_assert_eq!(e, oracle::additive_quadruples(&a, &b, false).unwrap());
                prop_assert!(e >= (a.len() * b.len()) as u128);
            }

            #[test]
            fn twisted_energy_lower_bound(a in nonzero_set(43, 10), xi in 1i64..43) {
                let xi = a.ctx().from_i64(xi);
                let e = twisted_energy(&a, &xi).unwrap();
                prop_assert_eq!(e, oracle::twisted_quadruples(&a, &xi, false).unwrap());
                prop_assert!(e >= (a.len() * a.len()) as u128);
            }

            #[test]
            fn rich_products_nest(a in nonzero_set(61, 10), b in nonzero_set(61, 10)) {
                let max = a.len().min(b.len()) as u64;
                for t in 1..max {
                    let s_t = rich_products(&a, &b, t).unwrap();
                    let s_next = rich_products(&a, &b, t + 1).unwrap();
                    prop_assert!(s_next.is_subset(&s_t));
                }
            }

            #[test]
            fn fractional_enclosures_nest(mults in proptest::collection::vec(1u64..40, 1..20)) {
                let h = MultiplicityHistogram::from_counts(HistogramKind::Ratio, 0, 0, mults);
                let alpha = BigRational::new(3.into(), 2.into());
                let coarse = h.energy_at_precision(&alpha, 32);
                let fine = h.energy_at_precision(&alpha, 128);
                prop_assert!(fine.within(&coarse));
                if let Some(sq) = h.three_halves_squared_exact() {
                    let sq = BigRational::from_integer(sq.into());
                    prop_assert!((coarse.lo() * coarse.lo()) <= sq);
                    prop_assert!((coarse.hi() * coarse.hi()) >= sq);
                }
            }
        }
    }
}
