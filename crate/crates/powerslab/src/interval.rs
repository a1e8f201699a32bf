//! Closed-interval arithmetic over `f64` with outward rounding.
//!
//! Every operation inflates its result by one ulp on each side instead of
//! switching the FPU rounding mode. That costs at most two ulps of width
//! per operation but keeps the implementation portable and thread-safe,
//! and it preserves the only property we need: the exact real result of
//! an expression is always contained in the computed enclosure.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with finite endpoints, `lo <= hi`.
#[derive(Clone, Copy, PartialEq, Debug, serde::Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn assert_valid(lo: f64, hi: f64) {
    assert!(
        lo.is_finite() && hi.is_finite() && lo <= hi,
        "invalid interval endpoints [{lo}, {hi}]"
    );
}

impl Interval {
    /// Exact interval from already-correct endpoints.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert_valid(lo, hi);
        Interval { lo, hi }
    }

    /// Degenerate interval holding one exactly-representable value.
    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Interval for a quantity quoted as a pair of decimal bounds.
    ///
    /// The parsed `f64` literals can land on either side of the decimal
    /// values they abbreviate, so both endpoints are pushed outward one ulp.
    pub fn from_decimal_bounds(lo: f64, hi: f64) -> Self {
        assert_valid(lo, hi);
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Exact enclosure of an integer (wide integers round when converted).
    pub fn from_u64(n: u64) -> Self {
        let approx = n as f64;
        if approx as u128 == n as u128 && approx.fract() == 0.0 && n < (1 << 53) {
            Interval::point(approx)
        } else {
            Interval {
                lo: approx.next_down(),
                hi: approx.next_up(),
            }
        }
    }

    /// Exact enclosure of a 128-bit integer.
    pub fn from_u128(n: u128) -> Self {
        let approx = n as f64;
        if n < (1 << 53) {
            Interval::point(approx)
        } else {
            Interval {
                lo: approx.next_down(),
                hi: approx.next_up(),
            }
        }
    }

    /// Natural logarithm of 2. `std::f64::consts::LN_2` is correctly
    /// rounded, so one ulp on each side encloses the real value.
    pub fn ln2() -> Self {
        Interval {
            lo: std::f64::consts::LN_2.next_down(),
            hi: std::f64::consts::LN_2.next_up(),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Widen relatively by `rel` on both sides (used to absorb a known
    /// relative error bound of a tabulated quantity). Requires `rel >= 0`.
    pub fn widen_rel(&self, rel: f64) -> Self {
        assert!(rel >= 0.0 && rel.is_finite());
        let r = Interval::new(1.0 - rel, 1.0 + rel);
        *self * r
    }

    /// Outward-rounded square root. Requires `lo >= 0`.
    pub fn sqrt(&self) -> Result<Self> {
        if self.lo < 0.0 {
            return Err(Error::invalid(format!(
                "sqrt of interval with negative lower endpoint {}",
                self.lo
            )));
        }
        Ok(outward((self.lo.sqrt()).max(0.0), self.hi.sqrt()))
    }

    /// Outward-rounded non-negative integer power.
    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Interval::point(1.0);
        }
        let mut acc = *self;
        for _ in 1..n {
            acc = acc * *self;
        }
        acc
    }

    /// Intersection, if non-empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }
}

/// One-ulp outward inflation of a raw `[lo, hi]` result.
fn outward(lo: f64, hi: f64) -> Interval {
    let lo = lo.next_down();
    let hi = hi.next_up();
    assert_valid(lo, hi);
    Interval { lo, hi }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        outward(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        outward(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let mut lo = products[0];
        let mut hi = products[0];
        for &p in &products[1..] {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        outward(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    /// Panics when the divisor straddles zero; callers in this crate only
    /// divide by intervals of one sign.
    fn div(self, rhs: Interval) -> Interval {
        assert!(
            rhs.lo > 0.0 || rhs.hi < 0.0,
            "division by interval containing zero: [{}, {}]",
            rhs.lo,
            rhs.hi
        );
        let quotients = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let mut lo = quotients[0];
        let mut hi = quotients[0];
        for &q in &quotients[1..] {
            lo = lo.min(q);
            hi = hi.max(q);
        }
        outward(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    #[test]
    fn point_and_accessors() {
        let x = Interval::point(1.5);
        assert_eq!(x.lo(), 1.5);
        assert_eq!(x.hi(), 1.5);
        assert_eq!(x.width(), 0.0);
        assert!(x.contains(1.5));
        assert!(!x.contains(1.5000001));
    }

    #[test]
    fn add_contains_exact_sum() {
        let a = Interval::point(0.1);
        let b = Interval::point(0.2);
        let s = a + b;
        // 0.1 + 0.2 != 0.3 in binary; the enclosure must cover the real sum
        // of the two f64 inputs regardless.
        assert!(s.lo() < 0.1 + 0.2 && 0.1 + 0.2 < s.hi());
    }

    #[test]
    fn mul_signs() {
        let a = Interval::new(-2.0, 3.0);
        let b = Interval::new(-5.0, 1.0);
        let p = a * b;
        assert!(p.contains(-15.0));
        assert!(p.contains(10.0));
        assert!(p.contains(0.0));
    }

    #[test]
    fn div_by_zero_straddling_panics() {
        let a = Interval::point(1.0);
        let b = Interval::new(-1.0, 1.0);
        let r = std::panic::catch_unwind(|| a / b);
        assert!(r.is_err());
    }

    #[test]
    fn sqrt_rejects_negative() {
        assert!(Interval::new(-1.0, 1.0).sqrt().is_err());
        let s = Interval::point(2.0).sqrt().unwrap();
        assert!(s.contains(std::f64::consts::SQRT_2));
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let x = Interval::from_decimal_bounds(0.7163436, 0.7163436);
        let p4 = x.powi(4);
        let by_hand = x * x * x * x;
        assert_eq!(p4.lo(), by_hand.lo());
        assert_eq!(p4.hi(), by_hand.hi());
        assert!(p4.contains(0.7163436_f64.powi(4)));
    }

    #[test]
    fn ln2_encloses_reference() {
        let l = Interval::ln2();
        assert!(l.contains(0.6931471805599453));
        assert!(l.width() < 1e-15);
    }

    #[test]
    fn from_u64_large_values_enclose() {
        let n = (1u64 << 60) + 1; // not representable in f64
        let iv = Interval::from_u64(n);
        assert!(iv.lo() <= n as f64 && n as f64 <= iv.hi());
        assert!(iv.width() > 0.0);
        assert_eq!(Interval::from_u64(12).width(), 0.0);
    }

    fn rational(x: f64) -> BigRational {
        BigRational::from_f64(x).expect("finite f64")
    }

    fn contains_rational(iv: &Interval, x: &BigRational) -> bool {
        rational(iv.lo()) <= *x && *x <= rational(iv.hi())
    }

    proptest! {
        // Exact rational evaluation of a composed expression must lie inside
        // the interval result: ((a+b)*c - d) / e with small integer inputs.
        #[test]
        fn composed_expression_containment(
            a in -1000i64..1000, b in -1000i64..1000,
            c in -1000i64..1000, d in -1000i64..1000,
            e in 1i64..1000,
        ) {
            let ia = Interval::point(a as f64);
            let ib = Interval::point(b as f64);
            let ic = Interval::point(c as f64);
            let id = Interval::point(d as f64);
            let ie = Interval::point(e as f64);
            let result = ((ia + ib) * ic - id) / ie;

            let big = |v: i64| BigRational::from_integer(BigInt::from(v));
            let exact = ((big(a) + big(b)) * big(c) - big(d)) / big(e);
            prop_assert!(contains_rational(&result, &exact));
        }

        #[test]
        fn reciprocal_product_containment(p in 3u64..100_000) {
            // (p-1)/(p-2) as used by the singular series.
            let num = Interval::from_u64(p - 1);
            let den = Interval::from_u64(p - 2);
            let r = num / den;
            let exact = BigRational::new(BigInt::from(p - 1), BigInt::from(p - 2));
            prop_assert!(contains_rational(&r, &exact));
            prop_assert!(r.lo() >= 1.0);
        }

        #[test]
        fn sqrt_containment(n in 0u64..1_000_000) {
            let s = Interval::from_u64(n).sqrt().unwrap();
            let x = (n as f64).sqrt();
            prop_assert!(s.contains(x));
            // exact square root of n*n comes back around n
            let sq = Interval::from_u64(n * n).sqrt().unwrap();
            prop_assert!(sq.contains(n as f64));
        }
    }
}
