//! The W₃ commutation relations of (ω̃¹, J) and (ω̃², K), checked as
//! operator identities on a graded basis of V_L.

use std::rc::Rc;

use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::catalog::named;
use crate::field::FieldElem;
use crate::fock::{graded_basis, FockState, Key};
use crate::lattice::CosetLabel;
use crate::rational::Rational;
use crate::vertex::mode_apply;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    L1L1,
    L1J,
    L2L2,
    L2K,
    JJ,
    KK,
}

impl Relation {
    pub const ALL: [Relation; 6] = [Relation::L1L1, Relation::L1J, Relation::L2L2, Relation::L2K, Relation::JJ, Relation::KK];

    pub fn name(self) -> &'static str {
        match self {
            Relation::L1L1 => "[L1(m),L1(n)]",
            Relation::L1J => "[L1(m),J(n)]",
            Relation::L2L2 => "[L2(m),L2(n)]",
            Relation::L2K => "[L2(m),K(n)]",
            Relation::JJ => "[J(m),J(n)]",
            Relation::KK => "[K(m),K(n)]",
        }
    }
}

/// A vector Σ (a + b√−3)/den · e_id over interned basis keys, kept with
/// den > 0 and gcd(den, all a, b) = 1 so that equal vectors compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Iv {
    den: i128,
    terms: Vec<(u32, i128, i128)>,
}

/// An i128 overflow; reported as a failure, never as a pass.
#[derive(Debug)]
struct Overflow;

type R<T> = Result<T, Overflow>;

/// The scalar (a + b√−3)/den.
#[derive(Clone, Copy)]
struct Scalar(i128, i128, i128);

impl Scalar {
    fn int(n: i64) -> Self {
        Scalar(n as i128, 0, 1)
    }

    fn from_field(x: &FieldElem) -> R<Self> {
        let part = |r: &Rational| -> R<(i128, i128)> {
            Ok((r.numer().to_i128().ok_or(Overflow)?, r.denom().to_i128().ok_or(Overflow)?))
        };
        let (a, da) = part(&x.re)?;
        let (b, db) = part(&x.im)?;
        let l = lcm(da, db)?;
        Ok(Scalar(a.checked_mul(l / da).ok_or(Overflow)?, b.checked_mul(l / db).ok_or(Overflow)?, l))
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> R<i128> {
    (a / gcd(a, b)).checked_mul(b).ok_or(Overflow)
}

fn mul(a: i128, b: i128) -> R<i128> {
    a.checked_mul(b).ok_or(Overflow)
}

fn plus(a: i128, b: i128) -> R<i128> {
    a.checked_add(b).ok_or(Overflow)
}

impl Iv {
    fn zero() -> Self {
        Iv { den: 1, terms: Vec::new() }
    }

    fn from_state(it: &mut Interner, s: &FockState) -> R<Self> {
        let parts: Vec<(u32, Scalar)> = s.terms.iter().map(|(k, c)| Ok((it.id(k), Scalar::from_field(c)?))).collect::<R<_>>()?;
        let mut acc = Acc::default();
        for (id, c) in parts {
            acc.push(&Iv { den: 1, terms: vec![(id, 1, 0)] }, c)?;
        }
        acc.finish()
    }

    fn scale(&self, c: Scalar) -> R<Self> {
        let mut acc = Acc::default();
        acc.push(self, c)?;
        acc.finish()
    }
}

/// Accumulates Σ c_i v_i over a common denominator.
#[derive(Default)]
struct Acc {
    den: i128,
    map: FxHashMap<u32, (i128, i128)>,
}

impl Acc {
    fn push(&mut self, v: &Iv, c: Scalar) -> R<()> {
        let Scalar(ca, cb, cd) = c;
        if (ca == 0 && cb == 0) || v.terms.is_empty() {
            return Ok(());
        }
        if self.den == 0 {
            self.den = 1;
        }
        let d = mul(v.den, cd)?;
        let l = lcm(self.den, d)?;
        if l != self.den {
            let f = l / self.den;
            for x in self.map.values_mut() {
                *x = (mul(x.0, f)?, mul(x.1, f)?);
            }
            self.den = l;
        }
        let f = l / d;
        let (ca, cb) = (mul(ca, f)?, mul(cb, f)?);
        for &(id, a, b) in &v.terms {
            let re = plus(mul(a, ca)?, -mul(3, mul(b, cb)?)?)?;
            let im = plus(mul(a, cb)?, mul(b, ca)?)?;
            let e = self.map.entry(id).or_insert((0, 0));
            *e = (plus(e.0, re)?, plus(e.1, im)?);
        }
        Ok(())
    }

    fn finish(self) -> R<Iv> {
        let mut terms: Vec<(u32, i128, i128)> = self.map.into_iter().filter(|(_, x)| *x != (0, 0)).map(|(i, x)| (i, x.0, x.1)).collect();
        if terms.is_empty() {
            return Ok(Iv::zero());
        }
        terms.sort_unstable_by_key(|t| t.0);
        let g = terms.iter().fold(self.den, |g, t| gcd(gcd(g, t.1), t.2));
        for t in terms.iter_mut() {
            t.1 /= g;
            t.2 /= g;
        }
        Ok(Iv { den: self.den / g, terms })
    }
}

fn combine(parts: &[(&Iv, Scalar)]) -> R<Iv> {
    let mut acc = Acc::default();
    for (v, c) in parts {
        acc.push(v, *c)?;
    }
    acc.finish()
}

/// Basis keys numbered in order of first appearance.
#[derive(Default)]
struct Interner {
    ids: FxHashMap<Key, u32>,
    keys: Vec<Key>,
}

impl Interner {
    fn id(&mut self, k: &Key) -> u32 {
        if let Some(&i) = self.ids.get(k) {
            return i;
        }
        let i = self.keys.len() as u32;
        self.ids.insert(k.clone(), i);
        self.keys.push(k.clone());
        i
    }
}

/// Modes u_k, with images of basis keys memoized.
struct Op {
    u: &'static FockState,
    memo: FxHashMap<(i64, u32), Rc<Iv>>,
}

impl Op {
    fn new(u: &'static FockState) -> Self {
        Op { u, memo: FxHashMap::default() }
    }

    fn apply(&mut self, it: &mut Interner, k: i64, v: &Iv) -> R<Iv> {
        let mut acc = Acc::default();
        for &(id, a, b) in &v.terms {
            let img = match self.memo.get(&(k, id)) {
                Some(img) => img.clone(),
                None => {
                    let key = it.keys[id as usize].clone();
                    let img = Rc::new(Iv::from_state(it, &mode_apply(self.u, k, &FockState::basis(key.0, key.1)))?);
                    self.memo.insert((k, id), img.clone());
                    img
                }
            };
            acc.push(&img, Scalar(a, b, v.den))?;
        }
        acc.finish()
    }
}

/// L(n) = ω̃_{n+1} and W(n) = X_{n+2} for one W₃ pair.
struct Pair {
    l: Op,
    w: Op,
    c: Rational,
    /// (a, b, q, d) in the W(m)W(n) relation, see [`Pair::ww`].
    ww: (i64, i64, i64, Rational),
    /// :LL:(s)w keyed by (s, id of w).
    quad: FxHashMap<(i64, u32), Rc<Iv>>,
}

impl Pair {
    fn l(&mut self, it: &mut Interner, n: i64, v: &Iv) -> R<Iv> {
        self.l.apply(it, n + 1, v)
    }

    fn w(&mut self, it: &mut Interner, n: i64, v: &Iv) -> R<Iv> {
        self.w.apply(it, n + 2, v)
    }

    /// [L(m), L(n)]w by the Virasoro relation.
    fn ll(&mut self, it: &mut Interner, m: i64, n: i64, v: &Iv) -> R<Iv> {
        let a = self.l(it, m + n, v)?;
        let mut parts = vec![(&a, Scalar::int(m - n))];
        if m + n == 0 {
            parts.push((v, Scalar::from_field(&FieldElem::from(&Rational::new(m * m * m - m, 12) * &self.c))?));
        }
        combine(&parts)
    }

    /// [L(m), W(n)]w = (2m − n)W(m + n)w.
    fn lw(&mut self, it: &mut Interner, m: i64, n: i64, v: &Iv) -> R<Iv> {
        self.w(it, m + n, v)?.scale(Scalar::int(2 * m - n))
    }

    /// Σ_{k≤−2} L(k)L(s−k)w + Σ_{k≥−1} L(s−k)L(k)w, using L(j)w = 0 for j > wt.
    fn normal_ordered(&mut self, it: &mut Interner, s: i64, id: u32, v: &Iv, wt: i64) -> R<Rc<Iv>> {
        if let Some(q) = self.quad.get(&(s, id)) {
            return Ok(q.clone());
        }
        let mut parts = Vec::new();
        for k in (s - wt).min(-2)..=-2 {
            let inner = self.l(it, s - k, v)?;
            parts.push(self.l(it, k, &inner)?);
        }
        for k in -1..=wt {
            let inner = self.l(it, k, v)?;
            parts.push(self.l(it, s - k, &inner)?);
        }
        let q = Rc::new(combine(&parts.iter().map(|p| (p, Scalar::int(1))).collect::<Vec<_>>())?);
        self.quad.insert((s, id), q.clone());
        Ok(q)
    }

    /// [W(m), W(n)]w = (m−n)(a(m+n+2)(m+n+3) + b(m+2)(n+2))L(m+n)w
    ///   + q(m−n) :LL:(m+n)w + d·m(m²−1)(m²−4)δ_{m+n,0} w, where w is the
    ///   basis vector `id` of weight `wt`.
    fn ww(&mut self, it: &mut Interner, m: i64, n: i64, id: u32, v: &Iv, wt: i64) -> R<Iv> {
        let (a, b, q, d) = self.ww.clone();
        let s = m + n;
        let lin = (m - n) * (a * (s + 2) * (s + 3) + b * (m + 2) * (n + 2));
        let l = self.l(it, s, v)?;
        let quad = self.normal_ordered(it, s, id, v, wt)?;
        let mut parts = vec![(&l, Scalar::int(lin)), (&*quad, Scalar::int(q * (m - n)))];
        if s == 0 {
            parts.push((v, Scalar::from_field(&FieldElem::from(&d * &Rational::from_int(m * (m * m - 1) * (m * m - 4))))?));
        }
        combine(&parts)
    }

    /// The direct side [X(m), Y(n)]w for a relation.
    fn direct(&mut self, it: &mut Interner, rel: Relation, m: i64, n: i64, v: &Iv) -> R<Iv> {
        let (a, b) = match rel {
            Relation::L1L1 | Relation::L2L2 => {
                let a = self.l(it, n, v)?;
                let b = self.l(it, m, v)?;
                (self.l(it, m, &a)?, self.l(it, n, &b)?)
            }
            Relation::L1J | Relation::L2K => {
                let a = self.w(it, n, v)?;
                let b = self.l(it, m, v)?;
                (self.l(it, m, &a)?, self.w(it, n, &b)?)
            }
            Relation::JJ | Relation::KK => {
                let a = self.w(it, n, v)?;
                let b = self.w(it, m, v)?;
                (self.w(it, m, &a)?, self.w(it, n, &b)?)
            }
        };
        combine(&[(&a, Scalar::int(1)), (&b, Scalar::int(-1))])
    }

    fn closed(&mut self, it: &mut Interner, rel: Relation, m: i64, n: i64, id: u32, v: &Iv, wt: i64) -> R<Iv> {
        match rel {
            Relation::L1L1 | Relation::L2L2 => self.ll(it, m, n, v),
            Relation::L1J | Relation::L2K => self.lw(it, m, n, v),
            Relation::JJ | Relation::KK => self.ww(it, m, n, id, v, wt),
        }
    }
}

fn pair_one() -> Pair {
    let n = named();
    Pair { l: Op::new(&n.w1), w: Op::new(&n.j), c: Rational::new(6, 5), ww: (22, 35, -120, Rational::new(-7, 10)), quad: FxHashMap::default() }
}

fn pair_two() -> Pair {
    let n = named();
    Pair { l: Op::new(&n.w2), w: Op::new(&n.k), c: Rational::new(4, 5), ww: (-46, -65, 240, Rational::new(13, 15)), quad: FxHashMap::default() }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    pub relation: Relation,
    pub name: String,
    /// Number of (m, n, basis state) triples compared.
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CommutatorReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Every relation for |m|, |n| ≤ `range` on the monomial basis of V_L of
/// weight ≤ `max_weight`, comparing the direct composition with the
/// closed form. For the antisymmetric relations the composition for (n, m)
/// is the negative of the one for (m, n) and is not recomputed.
pub fn check_commutators(max_weight: i64, range: i64) -> Vec<CommutatorReport> {
    let mut it = Interner::default();
    let basis: Vec<(i64, FockState)> = (0..=max_weight)
        .flat_map(|d| graded_basis(CosetLabel::ZERO, &Rational::from_int(d), None).into_iter().map(move |b| (d, b)))
        .collect();
    let mut one = pair_one();
    let mut two = pair_two();
    Relation::ALL
        .iter()
        .map(|&rel| {
            let p = match rel {
                Relation::L1L1 | Relation::L1J | Relation::JJ => &mut one,
                _ => &mut two,
            };
            let antisymmetric = !matches!(rel, Relation::L1J | Relation::L2K);
            let mut checked = 0;
            let mut failures = Vec::new();
            for (d, w) in &basis {
                let (key, c) = w.terms.iter().next().expect("basis vector");
                assert!(w.terms.len() == 1 && c.is_one());
                let id = it.id(key);
                let v = Iv { den: 1, terms: vec![(id, 1, 0)] };
                let mut direct: FxHashMap<(i64, i64), Iv> = FxHashMap::default();
                for m in -range..=range {
                    for n in -range..=range {
                        let lhs = match direct.remove(&(n, m)) {
                            Some(x) if antisymmetric => x.scale(Scalar::int(-1)),
                            _ => p.direct(&mut it, rel, m, n, &v).inspect(|x| {
                                if antisymmetric && m < n {
                                    direct.insert((m, n), x.clone());
                                }
                            }),
                        };
                        let rhs = p.closed(&mut it, rel, m, n, id, &v, *d);
                        checked += 1;
                        let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
                        if !ok && failures.len() < 5 {
                            let why = if lhs.is_err() || rhs.is_err() { " (i128 overflow)" } else { "" };
                            failures.push(format!("m={m} n={n} on {w}{why}"));
                        }
                    }
                }
            }
            CommutatorReport { relation: rel, name: rel.name().to_string(), checked, failures }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_weight_relations() {
        for r in check_commutators(2, 2) {
            assert!(r.ok(), "{:?}", r);
        }
    }

    #[test]
    fn wrong_central_term_detected() {
        let mut it = Interner::default();
        let mut p = pair_one();
        p.ww.3 = Rational::new(-7, 11);
        let w = graded_basis(CosetLabel::ZERO, &Rational::zero(), None).remove(0);
        let id = it.id(w.terms.keys().next().unwrap());
        let v = Iv { den: 1, terms: vec![(id, 1, 0)] };
        let lhs = p.direct(&mut it, Relation::JJ, 3, -3, &v).unwrap();
        let rhs = p.closed(&mut it, Relation::JJ, 3, -3, id, &v, 0).unwrap();
        assert_ne!(lhs, rhs);
        p.ww.3 = Rational::new(-7, 10);
        assert_eq!(lhs, p.closed(&mut it, Relation::JJ, 3, -3, id, &v, 0).unwrap());
    }

    #[test]
    fn integer_vectors_are_canonical() {
        let a = Iv { den: 1, terms: vec![(0, 2, 1)] };
        let half = combine(&[(&a, Scalar(1, 0, 2)), (&a, Scalar(1, 0, 2))]).unwrap();
        assert_eq!(half, a);
        let z = combine(&[(&a, Scalar(1, 0, 3)), (&a, Scalar(-1, 0, 3))]).unwrap();
        assert_eq!(z, Iv::zero());
        // (2 + √−3)(1 + √−3) = −1 + 3√−3
        assert_eq!(a.scale(Scalar(1, 1, 1)).unwrap().terms, vec![(0, -1, 3)]);
    }
}
