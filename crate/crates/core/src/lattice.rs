//! The lattice L = Zβ₁ + Zβ₂ (Gram matrix [[4,−2],[−2,4]]), its dual and isometries.
//!
//! Vectors are stored in sixths: `LatticeVec { m, n }` is (m·β₁ + n·β₂)/6.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeVec {
    pub m: i64,
    pub n: i64,
}

impl LatticeVec {
    pub const ZERO: LatticeVec = LatticeVec { m: 0, n: 0 };
    pub const BETA1: LatticeVec = LatticeVec { m: 6, n: 0 };
    pub const BETA2: LatticeVec = LatticeVec { m: 0, n: 6 };
    pub const BETA0: LatticeVec = LatticeVec { m: -6, n: -6 };

    pub const fn new(m: i64, n: i64) -> Self {
        LatticeVec { m, n }
    }

    /// The vector (a·β₁ + b·β₂)/d in sixths; panics unless d divides 6·a and 6·b.
    pub fn from_frac(a: i64, b: i64, d: i64) -> Self {
        assert!((6 * a) % d == 0 && (6 * b) % d == 0, "denominator must divide 6");
        LatticeVec { m: 6 * a / d, n: 6 * b / d }
    }

    /// βᵢ for i ∈ {0, 1, 2}.
    pub fn beta(i: usize) -> Self {
        match i % 3 {
            0 => Self::BETA0,
            1 => Self::BETA1,
            _ => Self::BETA2,
        }
    }

    pub fn scale(self, k: i64) -> Self {
        LatticeVec { m: self.m * k, n: self.n * k }
    }

    /// 36·⟨self, other⟩ as an integer.
    pub fn pairing36(self, o: LatticeVec) -> i64 {
        4 * self.m * o.m - 2 * self.m * o.n - 2 * self.n * o.m + 4 * self.n * o.n
    }

    pub fn pairing(self, o: LatticeVec) -> Rational {
        Rational::new(self.pairing36(o), 36)
    }

    pub fn norm(self) -> Rational {
        self.pairing(self)
    }

    /// Pairings with β₁ and β₂ are integral.
    pub fn in_dual(self) -> bool {
        self.pairing36(Self::BETA1) % 36 == 0 && self.pairing36(Self::BETA2) % 36 == 0
    }

    /// Lies in L itself.
    pub fn in_lattice(self) -> bool {
        self.m % 6 == 0 && self.n % 6 == 0
    }

    pub fn coset(self) -> Result<CosetLabel, LatticeError> {
        CosetLabel::of(self)
    }
}

impl Add for LatticeVec {
    type Output = LatticeVec;
    fn add(self, o: LatticeVec) -> LatticeVec {
        LatticeVec { m: self.m + o.m, n: self.n + o.n }
    }
}

impl Sub for LatticeVec {
    type Output = LatticeVec;
    fn sub(self, o: LatticeVec) -> LatticeVec {
        LatticeVec { m: self.m - o.m, n: self.n - o.n }
    }
}

impl Neg for LatticeVec {
    type Output = LatticeVec;
    fn neg(self) -> LatticeVec {
        LatticeVec { m: -self.m, n: -self.n }
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})/6", self.m, self.n)
    }
}

impl fmt::Debug for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LatticeVec {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::Parse(s.to_string());
        let inner = s.trim().strip_suffix("/6").ok_or_else(bad)?;
        let inner = inner.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Ok(LatticeVec { m: a.trim().parse().map_err(|_| bad())?, n: b.trim().parse().map_err(|_| bad())? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("{0} is not in the dual lattice")]
    NotInDual(LatticeVec),
    #[error("cannot parse lattice vector from {0:?}")]
    Parse(String),
    #[error("unknown coset label {0:?}")]
    UnknownCoset(String),
}

/// Klein part of a coset label: L_0 = L, L_a = β₂/2 + L, L_b = β₀/2 + L, L_c = β₁/2 + L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Klein {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl Klein {
    pub const ALL: [Klein; 4] = [Klein::Zero, Klein::A, Klein::B, Klein::C];

    pub fn rep(self) -> LatticeVec {
        match self {
            Klein::Zero => LatticeVec::ZERO,
            Klein::A => LatticeVec::new(0, 3),
            Klein::B => LatticeVec::new(-3, -3),
            Klein::C => LatticeVec::new(3, 0),
        }
    }

    /// Group law of Z₂ × Z₂.
    pub fn add(self, o: Klein) -> Klein {
        let bits = |k: Klein| match k {
            Klein::Zero => 0u8,
            Klein::A => 1,
            Klein::B => 2,
            Klein::C => 3,
        };
        match bits(self) ^ bits(o) {
            0 => Klein::Zero,
            1 => Klein::A,
            2 => Klein::B,
            _ => Klein::C,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Klein::Zero => "0",
            Klein::A => "a",
            Klein::B => "b",
            Klein::C => "c",
        }
    }
}

/// A coset L^{(i,j)} = L_i + L^j of L in its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetLabel {
    pub klein: Klein,
    pub ternary: u8,
}

impl CosetLabel {
    pub const ZERO: CosetLabel = CosetLabel { klein: Klein::Zero, ternary: 0 };

    pub fn new(klein: Klein, ternary: u8) -> Self {
        CosetLabel { klein, ternary: ternary % 3 }
    }

    pub fn all() -> Vec<CosetLabel> {
        let mut out = Vec::new();
        for k in Klein::ALL {
            for t in 0..3 {
                out.push(CosetLabel::new(k, t));
            }
        }
        out
    }

    /// L^1 = (−β₁+β₂)/3 + L and L^2 = (β₁−β₂)/3 + L.
    pub fn ternary_rep(t: u8) -> LatticeVec {
        match t % 3 {
            0 => LatticeVec::ZERO,
            1 => LatticeVec::new(-2, 2),
            _ => LatticeVec::new(2, -2),
        }
    }

    pub fn rep(self) -> LatticeVec {
        self.klein.rep() + Self::ternary_rep(self.ternary)
    }

    pub fn of(v: LatticeVec) -> Result<CosetLabel, LatticeError> {
        if !v.in_dual() {
            return Err(LatticeError::NotInDual(v));
        }
        let klein = match (v.m.rem_euclid(2), v.n.rem_euclid(2)) {
            (0, 0) => Klein::Zero,
            (0, 1) => Klein::A,
            (1, 1) => Klein::B,
            _ => Klein::C,
        };
        let ternary = match (v.m.rem_euclid(3), v.n.rem_euclid(3)) {
            (0, 0) => 0,
            (1, 2) => 1,
            (2, 1) => 2,
            _ => return Err(LatticeError::NotInDual(v)),
        };
        Ok(CosetLabel { klein, ternary })
    }

    /// Minimal value of ⟨λ,λ⟩/2 over the coset.
    pub fn min_weight(self) -> Rational {
        lattice_points(self, &Rational::from_int(4))
            .into_iter()
            .map(|v| &v.norm() / &Rational::from_int(2))
            .min()
            .expect("coset is nonempty")
    }
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.klein.symbol(), self.ternary)
    }
}

impl FromStr for CosetLabel {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::UnknownCoset(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
        let (k, t) = inner.split_once(',').ok_or_else(bad)?;
        let klein = match k.trim() {
            "0" => Klein::Zero,
            "a" => Klein::A,
            "b" => Klein::B,
            "c" => Klein::C,
            _ => return Err(bad()),
        };
        let t: u8 = t.trim().parse().map_err(|_| bad())?;
        if t > 2 {
            return Err(bad());
        }
        Ok(CosetLabel::new(klein, t))
    }
}

/// All λ in the coset with ⟨λ,λ⟩/2 ≤ max_wt, sorted.
pub fn lattice_points(c: CosetLabel, max_wt: &Rational) -> Vec<LatticeVec> {
    // 36⟨λ,λ⟩ = 2(m² + n²) + 2(m − n)² ≥ 2(m² + n²) bounds the search box.
    let bound36 = (max_wt * &Rational::from_int(72)).floor();
    let bound36: i64 = num_traits::ToPrimitive::to_i64(&bound36).expect("weight bound too large");
    let r = num_integer::Roots::sqrt(&(bound36.max(0) / 2)) + 7;
    let rep = c.rep();
    let mut out = Vec::new();
    let lo = |x: i64| (-r - x).div_euclid(6);
    for a in lo(rep.m)..=(r - rep.m).div_euclid(6) + 1 {
        for b in lo(rep.n)..=(r - rep.n).div_euclid(6) + 1 {
            let v = rep + LatticeVec::new(6 * a, 6 * b);
            if v.pairing36(v) <= bound36 {
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// A lattice isometry given by its integer matrix on the basis (β₁, β₂).
///
/// Columns are the images of β₁ and β₂: `cols[0] = g(β₁)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub name: &'static str,
    pub cols: [[i64; 2]; 2],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { name: "id", cols: [[1, 0], [0, 1]] };
    /// β₁ → β₂ → β₀ → β₁.
    pub const TAU: Isometry = Isometry { name: "tau", cols: [[0, 1], [-1, -1]] };
    /// β₁ ↔ β₂.
    pub const SIGMA: Isometry = Isometry { name: "sigma", cols: [[0, 1], [1, 0]] };
    /// β → −β.
    pub const THETA: Isometry = Isometry { name: "theta", cols: [[-1, 0], [0, -1]] };

    pub fn by_name(name: &str) -> Option<Isometry> {
        match name {
            "id" | "identity" => Some(Self::IDENTITY),
            "tau" => Some(Self::TAU),
            "sigma" => Some(Self::SIGMA),
            "theta" => Some(Self::THETA),
            _ => None,
        }
    }

    pub fn apply(&self, v: LatticeVec) -> LatticeVec {
        LatticeVec {
            m: self.cols[0][0] * v.m + self.cols[1][0] * v.n,
            n: self.cols[0][1] * v.m + self.cols[1][1] * v.n,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = self.apply(LatticeVec::new(other.cols[0][0], other.cols[0][1]));
        let b = self.apply(LatticeVec::new(other.cols[1][0], other.cols[1][1]));
        Isometry { name: "composite", cols: [[a.m, a.n], [b.m, b.n]] }
    }

    pub fn same_matrix(&self, other: &Isometry) -> bool {
        self.cols == other.cols
    }

    pub fn power(&self, k: u32) -> Isometry {
        let mut acc = Isometry::IDENTITY;
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Preserves the Gram form.
    pub fn is_isometry(&self) -> bool {
        let b1 = self.apply(LatticeVec::BETA1);
        let b2 = self.apply(LatticeVec::BETA2);
        b1.pairing36(b1) == 144 && b2.pairing36(b2) == 144 && b1.pairing36(b2) == -72
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.name, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gram_matrix() {
        assert_eq!(LatticeVec::BETA1.pairing(LatticeVec::BETA1), Rational::from_int(4));
        assert_eq!(LatticeVec::BETA1.pairing(LatticeVec::BETA2), Rational::from_int(-2));
        let v = LatticeVec::from_frac(1, -1, 3);
        assert_eq!(v.norm(), Rational::new(4, 3));
    }

    #[test]
    fn coset_labels() {
        assert_eq!(LatticeVec::from_frac(-1, 1, 3).coset().unwrap(), CosetLabel::new(Klein::Zero, 1));
        assert_eq!(LatticeVec::from_frac(0, 1, 2).coset().unwrap(), CosetLabel::new(Klein::A, 0));
        assert_eq!(LatticeVec::ZERO.coset().unwrap(), CosetLabel::ZERO);
        assert!(LatticeVec::new(1, 0).coset().is_err());
        let mut seen: Vec<CosetLabel> = CosetLabel::all().iter().map(|c| c.rep().coset().unwrap()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn isometry_relations() {
        let t = Isometry::TAU;
        let s = Isometry::SIGMA;
        let th = Isometry::THETA;
        assert_eq!(t.apply(LatticeVec::BETA1), LatticeVec::BETA2);
        assert_eq!(t.apply(LatticeVec::BETA0), LatticeVec::BETA1);
        assert_eq!(th.apply(LatticeVec::BETA1), -LatticeVec::BETA1);
        assert!(t.power(3).same_matrix(&Isometry::IDENTITY));
        assert!(s.power(2).same_matrix(&Isometry::IDENTITY));
        assert!(th.power(2).same_matrix(&Isometry::IDENTITY));
        assert!(s.compose(&t).compose(&s).same_matrix(&t.power(2)));
        assert!(t.compose(&th).same_matrix(&th.compose(&t)));
        for g in [t, s, th] {
            assert!(g.is_isometry());
        }
    }

    #[test]
    fn coset_min_weights() {
        assert_eq!(CosetLabel::new(Klein::Zero, 1).min_weight(), Rational::new(2, 3));
        assert_eq!(CosetLabel::new(Klein::C, 0).min_weight(), Rational::new(1, 2));
        assert_eq!(CosetLabel::new(Klein::C, 1).min_weight(), Rational::new(1, 6));
    }

    #[test]
    fn text_forms() {
        let v: LatticeVec = "(1,-2)/6".parse().unwrap();
        assert_eq!(v, LatticeVec::new(1, -2));
        assert_eq!(v.to_string(), "(1,-2)/6");
        let c: CosetLabel = "(c,2)".parse().unwrap();
        assert_eq!(c.to_string(), "(c,2)");
    }

    fn arb_dual() -> impl Strategy<Value = LatticeVec> {
        (0usize..12, -4i64..4, -4i64..4)
            .prop_map(|(c, a, b)| CosetLabel::all()[c].rep() + LatticeVec::new(6 * a, 6 * b))
    }

    proptest! {
        #[test]
        fn isometries_preserve_pairing(x in arb_dual(), y in arb_dual()) {
            for g in [Isometry::TAU, Isometry::SIGMA, Isometry::THETA] {
                prop_assert_eq!(g.apply(x).pairing(g.apply(y)), x.pairing(y));
            }
        }

        #[test]
        fn coset_constant_on_translates(x in arb_dual(), a in -5i64..5, b in -5i64..5) {
            let y = x + LatticeVec::new(6 * a, 6 * b);
            prop_assert_eq!(x.coset().unwrap(), y.coset().unwrap());
        }
    }
}
