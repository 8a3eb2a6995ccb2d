//! The quadratic field Q(√−3), stored on the basis {1, √−3}.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::rational::Rational;

/// `re + im·√−3`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldElem {
    pub re: Rational,
    pub im: Rational,
}

impl FieldElem {
    pub fn new(re: Rational, im: Rational) -> Self {
        FieldElem { re, im }
    }

    pub fn zero() -> Self {
        FieldElem::default()
    }

    pub fn one() -> Self {
        FieldElem::from(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        FieldElem::from(Rational::from_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        FieldElem::from(Rational::new(n, d))
    }

    /// √−3.
    pub fn sqrt_m3() -> Self {
        FieldElem::new(Rational::zero(), Rational::one())
    }

    /// ξ = (−1+√−3)/2, a primitive cube root of unity.
    pub fn xi() -> Self {
        FieldElem::new(Rational::new(-1, 2), Rational::new(1, 2))
    }

    /// ξ^k for any integer k.
    pub fn xi_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => FieldElem::one(),
            1 => FieldElem::xi(),
            _ => FieldElem::new(Rational::new(-1, 2), Rational::new(-1, 2)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElem::new(self.re.clone(), -&self.im)
    }

    /// Field norm re² + 3·im².
    pub fn norm(&self) -> Rational {
        &(&self.re * &self.re) + &(&Rational::from_int(3) * &(&self.im * &self.im))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(FieldElem::new(&self.re / &n, &(-&self.im) / &n))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElem::new(&self.re * r, &self.im * r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = FieldElem::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Square root in Q(√−3) with the canonical sign (re > 0, or re = 0 and im ≥ 0).
    ///
    /// Writing x = p + q√−3, we need p² − 3q² = re and 2pq = im.
    pub fn sqrt(&self) -> Option<FieldElem> {
        let three = Rational::from_int(3);
        let root = if self.im.is_zero() {
            if let Some(p) = self.re.sqrt() {
                FieldElem::from(p)
            } else if let Some(q) = (&(-&self.re) / &three).sqrt() {
                FieldElem::new(Rational::zero(), q)
            } else {
                return None;
            }
        } else {
            // p² is a root of t² − re·t − 3im²/4 = 0, with t = p² > 0.
            let disc = &(&self.re * &self.re) + &(&three * &(&self.im * &self.im));
            let s = disc.sqrt()?;
            let p2 = &(&self.re + &s) / &Rational::from_int(2);
            let p = p2.sqrt()?;
            if p.is_zero() {
                return None;
            }
            let q = &self.im / &(&Rational::from_int(2) * &p);
            FieldElem::new(p, q)
        };
        debug_assert_eq!(&root * &root, *self);
        let flip = root.re.signum() < 0 || (root.re.is_zero() && root.im.signum() < 0);
        Some(if flip { -root } else { root })
    }
}

impl From<Rational> for FieldElem {
    fn from(r: Rational) -> Self {
        FieldElem::new(r, Rational::zero())
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        FieldElem::int(n)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        FieldElem::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        FieldElem::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        if self.im.is_zero() {
            return rhs.scale(&self.re);
        }
        if rhs.im.is_zero() {
            return self.scale(&rhs.re);
        }
        let three = Rational::from_int(3);
        let re = &(&self.re * &rhs.re) - &(&three * &(&self.im * &rhs.im));
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        FieldElem::new(re, im)
    }
}

impl<'a> Div<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        let inv = rhs.inv().expect("division by zero in Q(sqrt(-3))");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(-self.re, -self.im)
    }
}

impl<'a> Neg for &'a FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -self.clone()
    }
}

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, rhs: &FieldElem) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&FieldElem> for FieldElem {
    fn sub_assign(&mut self, rhs: &FieldElem) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&FieldElem> for FieldElem {
    fn mul_assign(&mut self, rhs: &FieldElem) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for FieldElem {
    /// Canonical form `p/q + r/s*sqrt(-3)`, omitting zero parts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*sqrt(-3)", self.im),
            (false, false) => {
                if self.im.signum() < 0 {
                    write!(f, "{} - {}*sqrt(-3)", self.re, -&self.im)
                } else {
                    write!(f, "{} + {}*sqrt(-3)", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse field element from {0:?}")]
pub struct ParseFieldError(pub String);

fn parse_im(s: &str) -> Option<Rational> {
    let s = s.trim();
    let body = s.strip_suffix("sqrt(-3)")?.trim_end();
    let body = body.strip_suffix('*').unwrap_or(body).trim();
    match body {
        "" | "+" => Some(Rational::one()),
        "-" => Some(-Rational::one()),
        b => b.replace(' ', "").parse().ok(),
    }
}

impl FromStr for FieldElem {
    type Err = ParseFieldError;
    /// Accepts `p/q`, `r/s*sqrt(-3)` and `p/q + r/s*sqrt(-3)` (or with `-`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFieldError(s.to_string());
        let t = s.trim();
        if !t.contains("sqrt") {
            return t.replace(' ', "").parse::<Rational>().map(FieldElem::from).map_err(|_| err());
        }
        // Find the sign that separates the rational part from the surd part.
        let bytes: Vec<char> = t.chars().collect();
        let mut split = None;
        for (i, c) in bytes.iter().enumerate().skip(1) {
            if (*c == '+' || *c == '-') && bytes[i - 1] == ' ' {
                split = Some(i);
            }
        }
        match split {
            Some(i) => {
                let head: String = bytes[..i].iter().collect();
                let tail: String = bytes[i..].iter().collect();
                let re: Rational = head.trim().replace(' ', "").parse().map_err(|_| err())?;
                let tail = tail.replacen(' ', "", 1);
                let im = parse_im(&tail).ok_or_else(err)?;
                Ok(FieldElem::new(re, im))
            }
            None => parse_im(t).map(|im| FieldElem::new(Rational::zero(), im)).ok_or_else(err),
        }
    }
}

impl serde::Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for FieldElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fe(a: i64, b: i64, c: i64, d: i64) -> FieldElem {
        FieldElem::new(Rational::new(a, b), Rational::new(c, d))
    }

    #[test]
    fn cube_root_of_unity() {
        let xi = FieldElem::xi();
        assert_eq!(&(&xi * &xi) * &xi, FieldElem::one());
        assert_eq!(FieldElem::xi_pow(2), &xi * &xi);
        assert_eq!(FieldElem::xi_pow(-1), FieldElem::xi_pow(2));
    }

    #[test]
    fn defining_relation() {
        let s = FieldElem::sqrt_m3();
        assert_eq!(&s * &s, FieldElem::int(-3));
    }

    #[test]
    fn inverse() {
        let x = fe(1, 1, 1, 1);
        assert_eq!(x.inv().unwrap(), fe(1, 4, -1, 4));
        assert!(FieldElem::zero().inv().is_none());
    }

    #[test]
    fn square_roots() {
        assert_eq!(FieldElem::int(4).sqrt(), Some(FieldElem::int(2)));
        assert_eq!(fe(-2, 1, 2, 1).sqrt(), Some(fe(1, 1, 1, 1)));
        assert_eq!(FieldElem::int(-1).sqrt(), None);
        assert_eq!(FieldElem::int(-3).sqrt(), Some(FieldElem::sqrt_m3()));
        assert_eq!(FieldElem::int(-12).sqrt(), Some(FieldElem::sqrt_m3().scale(&Rational::from_int(2))));
        assert_eq!(FieldElem::int(2).sqrt(), None);
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "-7/3", "2*sqrt(-3)", "-14/81*sqrt(-3)", "1/2 + 1/2*sqrt(-3)", "-1/2 - 1/2*sqrt(-3)"] {
            let x: FieldElem = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        let x: FieldElem = "-sqrt(-3)".parse().unwrap();
        assert_eq!(x, -FieldElem::sqrt_m3());
    }

    fn arb_fe() -> impl Strategy<Value = FieldElem> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| fe(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_axioms(a in arb_fe(), b in arb_fe(), c in arb_fe()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn sqrt_recovers_root(x in arb_fe()) {
            let c = &x * &x;
            let r = c.sqrt().expect("square must have a root");
            prop_assert_eq!(&r * &r, c);
            prop_assert!(r == x || r == -x.clone());
        }

        #[test]
        fn render_parse(x in arb_fe()) {
            let back: FieldElem = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
