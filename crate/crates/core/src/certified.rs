//! Certified enclosures with exact rational endpoints.
//!
//! Irrational quantities (square and higher roots, logarithms) are enclosed
//! in intervals whose endpoints are dyadic rationals obtained by outward
//! rounding of exact integer computations. Nothing here touches floating
//! point, so `lo ≤ true value ≤ hi` holds unconditionally.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

/// Default working precision, in fractional bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Default cap for adaptive precision doubling.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;
/// Target relative width: `(hi - lo) / lo < 2^-64`.
pub const TARGET_RELATIVE_BITS: u32 = 64;

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// `floor(q * 2^bits) / 2^bits`.
pub fn floor_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q.numer() * pow2(bits);
    BigRational::new(scaled.div_floor(q.denom()), pow2(bits))
}

/// `ceil(q * 2^bits) / 2^bits`.
pub fn ceil_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q.numer() * pow2(bits);
    BigRational::new(scaled.div_ceil(q.denom()), pow2(bits))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::point(BigRational::from_integer(n.into()))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Whether `self ⊆ other`.
    pub fn within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// `(hi - lo) / lo < 2^-bits`; false when `lo ≤ 0` unless the interval is
    /// a point.
    pub fn relative_width_below(&self, bits: u32) -> bool {
        if self.is_point() {
            return true;
        }
        if !self.lo.is_positive() {
            return false;
        }
        self.width() * BigRational::from_integer(pow2(bits)) < self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        if k.is_negative() {
            Interval { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            Interval { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    /// Product of intervals with nonnegative lower endpoints.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi }
    }

    pub fn pow_nonneg(&self, e: u32) -> Interval {
        debug_assert!(!self.lo.is_negative());
        Interval { lo: Pow::pow(&self.lo, e), hi: Pow::pow(&self.hi, e) }
    }

    /// `self / other` for a strictly positive divisor and nonnegative dividend.
    pub fn div_positive(&self, other: &Interval) -> Interval {
        debug_assert!(other.lo.is_positive() && !self.lo.is_negative());
        Interval { lo: &self.lo / &other.hi, hi: &self.hi / &other.lo }
    }

    /// Rounds endpoints outward onto the dyadic grid of `bits` fractional
    /// bits. Keeps denominators bounded during long computations.
    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    /// Decides `self ≤ x`: `Some(true)` if certainly, `Some(false)` if
    /// certainly not, `None` when `x` lies inside the open enclosure.
    pub fn certainly_le(&self, x: &BigRational) -> Option<bool> {
        if &self.hi <= x {
            Some(true)
        } else if &self.lo > x {
            Some(false)
        } else {
            None
        }
    }

    /// Decides `x ≤ self`.
    pub fn certainly_ge(&self, x: &BigRational) -> Option<bool> {
        if &self.lo >= x {
            Some(true)
        } else if &self.hi < x {
            Some(false)
        } else {
            None
        }
    }

    pub fn lo_decimal(&self) -> String {
        decimal_floor(&self.lo, DECIMAL_DIGITS)
    }

    pub fn hi_decimal(&self) -> String {
        decimal_ceil(&self.hi, DECIMAL_DIGITS)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_decimal(), self.hi_decimal())
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &self.lo_decimal())?;
        st.serialize_field("hi", &self.hi_decimal())?;
        st.end()
    }
}

/// Fractional digits used when rendering interval endpoints.
pub const DECIMAL_DIGITS: u32 = 24;

fn render_scaled(v: &BigInt, digits: u32) -> String {
    let base = BigInt::from(10u32).pow(digits);
    let neg = v.sign() == Sign::Minus;
    let (int, frac) = v.abs().div_rem(&base);
    let mut frac = frac.to_string();
    while frac.len() < digits as usize {
        frac.insert(0, '0');
    }
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Decimal rendering rounded toward negative infinity.
pub fn decimal_floor(q: &BigRational, digits: u32) -> String {
    let scaled = q.numer() * BigInt::from(10u32).pow(digits);
    render_scaled(&scaled.div_floor(q.denom()), digits)
}

/// Decimal rendering rounded toward positive infinity.
pub fn decimal_ceil(q: &BigRational, digits: u32) -> String {
    let scaled = q.numer() * BigInt::from(10u32).pow(digits);
    render_scaled(&scaled.div_ceil(q.denom()), digits)
}

/// Enclosure of `x^(1/n)` for `x ≥ 0`, exact when the root is dyadic at the
/// requested precision.
pub fn root_interval(x: &BigRational, n: u32, bits: u32) -> Interval {
    assert!(n >= 1, "root index must be positive");
    assert!(!x.is_negative(), "root of a negative number");
    if n == 1 {
        return Interval::point(x.clone());
    }
    let scale = BigInt::one() << (bits as usize * n as usize);
    let scaled = x.numer() * scale;
    let (fl, rem) = scaled.div_rem(x.denom());
    let fl = fl.to_biguint().expect("nonnegative");
    let r_lo = fl.nth_root(n);
    let exact = rem.is_zero() && Pow::pow(&r_lo, n) == fl;
    let r_hi = if exact { r_lo.clone() } else { &r_lo + 1u32 };
    let den = pow2(bits);
    Interval { lo: BigRational::new(BigInt::from(r_lo), den.clone()), hi: BigRational::new(BigInt::from(r_hi), den) }
}

/// Enclosure of `base^(p/q)` for `base ≥ 0` and a nonnegative rational
/// exponent.
pub fn pow_rational_interval(base: &BigRational, exponent: &BigRational, bits: u32) -> Interval {
    assert!(!exponent.is_negative(), "negative exponent");
    let p = exponent.numer().to_biguint().expect("nonnegative");
    let q: u32 = u32::try_from(exponent.denom().clone()).expect("exponent denominator fits u32");
    let p: u32 = u32::try_from(p).expect("exponent numerator fits u32");
    root_interval(&Pow::pow(base, p), q, bits)
}

/// Enclosure of `atanh(y) = Σ y^(2i+1)/(2i+1)` for `0 ≤ y < 1`.
fn atanh_interval(y: &BigRational, bits: u32) -> Interval {
    assert!(!y.is_negative() && y < &BigRational::one());
    let work = bits + 16;
    let y2 = y * y;
    let eps = BigRational::new(BigInt::one(), pow2(work));
    let mut term_lo = floor_dyadic(y, work);
    let mut term_hi = ceil_dyadic(y, work);
    let mut sum_lo = BigRational::zero();
    let mut sum_hi = BigRational::zero();
    let mut k = 1u64;
    loop {
        let kq = BigRational::from_integer(k.into());
        sum_lo += floor_dyadic(&(&term_lo / &kq), work);
        sum_hi += ceil_dyadic(&(&term_hi / &kq), work);
        term_lo = floor_dyadic(&(&term_lo * &y2), work);
        term_hi = ceil_dyadic(&(&term_hi * &y2), work);
        k += 2;
        if term_hi <= eps {
            break;
        }
    }
    // Tail: Σ_{j≥0} y^(k+2j)/(k+2j) ≤ y^k / (1 - y²).
    let tail = &term_hi / (BigRational::one() - &y2);
    sum_hi += ceil_dyadic(&tail, work);
    Interval { lo: sum_lo, hi: sum_hi }.round_outward(bits)
}

/// Enclosure of the natural logarithm of a positive integer.
pub fn ln_interval(v: &BigUint, bits: u32) -> Interval {
    assert!(!v.is_zero(), "ln(0)");
    if v.is_one() {
        return Interval::point(BigRational::zero());
    }
    let work = bits + 8;
    let k = v.bits() - 1;
    let two_k = BigInt::one() << k as usize;
    let v = BigInt::from(v.clone());
    let y = BigRational::new(&v - &two_k, &v + &two_k);
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let two = BigRational::from_integer(2.into());
    let ln2 = atanh_interval(&third, work).scale(&two);
    let ln_r = atanh_interval(&y, work).scale(&two);
    ln2.scale(&BigRational::from_integer(k.into())).add(&ln_r).round_outward(bits)
}

/// Enclosure of `ln(num) / ln(den)`; `None` when `den = 1`.
pub fn log_ratio_interval(num: &BigUint, den: &BigUint, bits: u32) -> Option<Interval> {
    if den.is_one() || den.is_zero() || num.is_zero() {
        return None;
    }
    if num == den {
        return Some(Interval::from_int(1));
    }
    let n = ln_interval(num, bits + 8);
    let d = ln_interval(den, bits + 8);
    Some(n.div_positive(&d).round_outward(bits))
}
