//! Exact rational scalar with an inline fast path.
//!
//! Values whose numerator and denominator fit in `i64` are kept inline and
//! combined through `i128`; anything larger spills to `BigRational`. The
//! representation is canonical, so derived equality and hashing are exact.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub struct Q(Repr);

#[derive(Clone)]
enum Repr {
    /// Reduced, `den > 0`, neither part equal to `i64::MIN`.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    gcd_u128(a as u128, b as u128) as u64
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Q {
    pub fn zero() -> Q {
        Q(Repr::Small(0, 1))
    }

    pub fn one() -> Q {
        Q(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Q {
        if n == i64::MIN {
            return Q::from_big(BigRational::from_integer(BigInt::from(n)));
        }
        Q(Repr::Small(n, 1))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Q {
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Q(Repr::Small(n as i64, d as i64))
        } else {
            Q(Repr::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))))
        }
    }

    pub fn from_big(r: BigRational) -> Q {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d != i64::MIN {
                return Q(Repr::Small(n, d));
            }
        }
        Q(Repr::Big(Box::new(r)))
    }

    pub fn from_bigint(n: BigInt) -> Q {
        Q::from_big(BigRational::from_integer(n))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Q {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                if *n < 0 {
                    Q(Repr::Small(-d, -n))
                } else {
                    Q(Repr::Small(*d, *n))
                }
            }
            Repr::Big(b) => Q::from_big(b.recip()),
        }
    }

    /// Small integer view, if the value is an integer fitting `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `self += a * b`, the inner loop of every elimination in the crate.
    pub fn add_mul(&mut self, a: &Q, b: &Q) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let (Repr::Small(sn, 1), Repr::Small(an, 1), Repr::Small(bn, 1)) = (&self.0, &a.0, &b.0) {
            let v = *sn as i128 + (*an as i128) * (*bn as i128);
            if fits(v) {
                self.0 = Repr::Small(v as i64, 1);
                return;
            }
        }
        let p = a * b;
        *self += &p;
    }

    /// `self -= a * b`.
    pub fn sub_mul(&mut self, a: &Q, b: &Q) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let (Repr::Small(sn, 1), Repr::Small(an, 1), Repr::Small(bn, 1)) = (&self.0, &a.0, &b.0) {
            let v = *sn as i128 - (*an as i128) * (*bn as i128);
            if fits(v) {
                self.0 = Repr::Small(v as i64, 1);
                return;
            }
        }
        let p = a * b;
        *self -= &p;
    }
}

fn add_small(an: i64, ad: i64, bn: i64, bd: i64) -> Q {
    if ad == bd {
        if ad == 1 {
            return Q::from_i128(an as i128 + bn as i128, 1);
        }
        return Q::from_i128(an as i128 + bn as i128, ad as i128);
    }
    let g = gcd_u64(ad as u64, bd as u64) as i128;
    let (ad, bd) = (ad as i128, bd as i128);
    let num = an as i128 * (bd / g) + bn as i128 * (ad / g);
    Q::from_i128(num, ad / g * bd)
}

fn mul_small(an: i64, ad: i64, bn: i64, bd: i64) -> Q {
    if ad == 1 && bd == 1 {
        return Q::from_i128(an as i128 * bn as i128, 1);
    }
    let g1 = gcd_u64(an.unsigned_abs(), bd as u64).max(1) as i128;
    let g2 = gcd_u64(bn.unsigned_abs(), ad as u64).max(1) as i128;
    let num = (an as i128 / g1) * (bn as i128 / g2);
    let den = (ad as i128 / g2) * (bd as i128 / g1);
    Q::from_i128(num, den)
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, rhs: &Q) -> Q {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => add_small(*an, *ad, *bn, *bd),
            _ => Q::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, rhs: &Q) -> Q {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => add_small(*an, *ad, -*bn, *bd),
            _ => Q::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, rhs: &Q) -> Q {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => mul_small(*an, *ad, *bn, *bd),
            _ => Q::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        self * &rhs.recip()
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match &self.0 {
            Repr::Small(n, d) => Q(Repr::Small(-n, *d)),
            Repr::Big(b) => Q::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Q> for Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Q> for Q {
            type Output = Q;
            fn $m(self, rhs: &Q) -> Q {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Q> for &'a Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Q> for Q {
    fn add_assign(&mut self, rhs: Q) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Q> for Q {
    fn sub_assign(&mut self, rhs: Q) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, rhs: &Q) {
        *self = &*self * rhs;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        let mut acc = Q::zero();
        for q in iter {
            acc += &q;
        }
        acc
    }
}

impl<'a> Sum<&'a Q> for Q {
    fn sum<I: Iterator<Item = &'a Q>>(iter: I) -> Q {
        let mut acc = Q::zero();
        for q in iter {
            acc += q;
        }
        acc
    }
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Q {}

impl Hash for Q {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Q {
    fn default() -> Q {
        Q::zero()
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::from_int(n)
    }
}

impl From<i32> for Q {
    fn from(n: i32) -> Q {
        Q::from_int(n as i64)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseQError(pub String);

impl FromStr for Q {
    type Err = ParseQError;
    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let t = s.trim();
        let err = || ParseQError(s.to_string());
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| err())?;
        let d: BigInt = den.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Q::from_int(i)),
                None => n.to_string().parse().map_err(serde::de::Error::custom),
            },
            other => Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

/// Least common multiple of the denominators, as a big integer.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        if !v.is_integer() {
            l = l.lcm(&v.denom());
        }
    }
    l
}

/// Greatest common divisor of the numerators (all values assumed integral).
pub fn gcd_numerators<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    let mut g = BigInt::zero();
    for v in values {
        if !v.is_zero() {
            g = g.gcd(&v.numer());
            if g.is_one() {
                break;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Q::new(4, -6), Q::new(-2, 3));
        assert_eq!(Q::new(0, -5), Q::zero());
        assert_eq!(Q::new(6, 3).to_i64(), Some(2));
    }

    #[test]
    fn spills_to_big_and_back() {
        let big = Q::from_int(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.to_string(), "85070591730234615847396907784232501249");
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let m = Q::from_int(i64::MIN);
        assert_eq!((-&m).to_string(), "9223372036854775808");
    }

    #[test]
    fn parses_and_prints() {
        let q: Q = " -10/4 ".parse().unwrap();
        assert_eq!(q, Q::new(-5, 2));
        assert_eq!(q.to_string(), "-5/2");
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn ordering_across_representations() {
        let a = Q::new(1, 3);
        let b = Q::new(1, 2);
        assert!(a < b);
        let huge = &Q::from_int(i64::MAX) * &Q::from_int(4);
        assert!(huge > b);
        assert!(-&huge < a);
    }

    #[test]
    fn fused_ops() {
        let mut acc = Q::from_int(3);
        acc.add_mul(&Q::new(1, 2), &Q::from_int(4));
        assert_eq!(acc, Q::from_int(5));
        acc.sub_mul(&Q::from_int(i64::MAX), &Q::from_int(2));
        assert_eq!(acc.to_big(), BigRational::from_integer(BigInt::from(5) - BigInt::from(i64::MAX) * 2));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn big(n: i64, d: i64) -> BigRational {
            BigRational::new(BigInt::from(n), BigInt::from(d))
        }

        proptest! {
            #[test]
            fn field_ops_match_bigrational(an in any::<i64>(), ad in 1i64.., bn in any::<i64>(), bd in 1i64..) {
                let (a, b) = (Q::from_big(big(an, ad)), Q::from_big(big(bn, bd)));
                prop_assert_eq!((&a + &b).to_big(), big(an, ad) + big(bn, bd));
                prop_assert_eq!((&a - &b).to_big(), big(an, ad) - big(bn, bd));
                prop_assert_eq!((&a * &b).to_big(), big(an, ad) * big(bn, bd));
                if bn != 0 {
                    prop_assert_eq!((&a / &b).to_big(), big(an, ad) / big(bn, bd));
                }
                prop_assert_eq!(a.cmp(&b), big(an, ad).cmp(&big(bn, bd)));
            }
        }
    }
}
