//! The space M(1) ⊗ C[L^⊥]: Heisenberg monomials over {β₁, β₂} tensored with
//! lattice exponentials, with the Heisenberg action and weight grading.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::field::FieldElem;
use crate::lattice::{lattice_points, CosetLabel, Isometry, LatticeVec};
use crate::linalg::SpanSolver;
use crate::rational::Rational;

/// One of the two basis vectors β₁ (index 0) and β₂ (index 1) of h.
pub type Basis = u8;

/// A vector c₁β₁ + c₂β₂ of h = C ⊗ L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecH {
    pub c1: FieldElem,
    pub c2: FieldElem,
}

impl VecH {
    pub fn new(c1: FieldElem, c2: FieldElem) -> Self {
        VecH { c1, c2 }
    }

    pub fn basis(b: Basis) -> Self {
        if b == 0 {
            VecH::new(FieldElem::one(), FieldElem::zero())
        } else {
            VecH::new(FieldElem::zero(), FieldElem::one())
        }
    }

    /// The real vector λ of the lattice, viewed in h.
    pub fn from_lattice(v: LatticeVec) -> Self {
        VecH::new(FieldElem::frac(v.m, 6), FieldElem::frac(v.n, 6))
    }

    /// βᵢ, i ∈ {0,1,2}.
    pub fn beta(i: usize) -> Self {
        Self::from_lattice(LatticeVec::beta(i))
    }

    /// (c₁, c₂) as a list of nonzero (basis, coefficient) pairs.
    pub fn components(&self) -> SmallVec<[(Basis, FieldElem); 2]> {
        let mut out = SmallVec::new();
        if !self.c1.is_zero() {
            out.push((0, self.c1.clone()));
        }
        if !self.c2.is_zero() {
            out.push((1, self.c2.clone()));
        }
        out
    }

    pub fn pair_lattice(&self, v: LatticeVec) -> FieldElem {
        let p1 = Rational::new(4 * v.m - 2 * v.n, 6);
        let p2 = Rational::new(-2 * v.m + 4 * v.n, 6);
        &self.c1.scale(&p1) + &self.c2.scale(&p2)
    }

    pub fn pair_basis(&self, b: Basis) -> FieldElem {
        let (g1, g2) = if b == 0 { (4, -2) } else { (-2, 4) };
        &self.c1.scale(&Rational::from_int(g1)) + &self.c2.scale(&Rational::from_int(g2))
    }

    pub fn add(&self, o: &VecH) -> VecH {
        VecH::new(&self.c1 + &o.c1, &self.c2 + &o.c2)
    }

    pub fn scale(&self, c: &FieldElem) -> VecH {
        VecH::new(&self.c1 * c, &self.c2 * c)
    }
}

/// ⟨β_a, β_b⟩ for basis indices.
pub fn gram(a: Basis, b: Basis) -> i64 {
    if a == b {
        4
    } else {
        -2
    }
}

/// ⟨β_b, λ⟩ as a rational.
pub fn pair_basis_lattice(b: Basis, v: LatticeVec) -> Rational {
    if b == 0 {
        Rational::new(4 * v.m - 2 * v.n, 6)
    } else {
        Rational::new(-2 * v.m + 4 * v.n, 6)
    }
}

const MODE_CAP: u8 = 127;

/// Encodes a factor β_b(−mode) as one byte; plain byte order is
/// (mode descending, basis ascending).
#[inline]
pub fn encode(mode: u8, b: Basis) -> u8 {
    debug_assert!(mode >= 1 && mode <= MODE_CAP && b < 2);
    ((MODE_CAP - mode) << 1) | b
}

#[inline]
pub fn decode(e: u8) -> (u8, Basis) {
    (MODE_CAP - (e >> 1), e & 1)
}

/// A product of creation operators β_{b₁}(−n₁)···β_{b_k}(−n_k), kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HeisMono(pub SmallVec<[u8; 14]>);

impl HeisMono {
    pub fn one() -> Self {
        HeisMono(SmallVec::new())
    }

    pub fn from_factors(factors: &[(u8, Basis)]) -> Self {
        let mut v: SmallVec<[u8; 14]> = factors.iter().map(|&(m, b)| encode(m, b)).collect();
        v.sort_unstable();
        HeisMono(v)
    }

    pub fn factors(&self) -> impl Iterator<Item = (u8, Basis)> + '_ {
        self.0.iter().map(|&e| decode(e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Σ modes.
    pub fn degree(&self) -> u32 {
        self.factors().map(|(m, _)| m as u32).sum()
    }

    pub fn max_mode(&self) -> u8 {
        self.0.first().map(|&e| decode(e).0).unwrap_or(0)
    }

    pub fn times(&self, other: &HeisMono) -> HeisMono {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut out: SmallVec<[u8; 14]> = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        HeisMono(out)
    }

    pub fn with_factor(&self, mode: u8, b: Basis) -> HeisMono {
        let e = encode(mode, b);
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= e);
        v.insert(pos, e);
        HeisMono(v)
    }

    /// β_b(k) for k > 0 applied to this monomial (no lattice factor involved):
    /// Σ over matching factors of k⟨β_b, β_c⟩ times the monomial with that factor removed.
    pub fn annihilate(&self, b: Basis, k: u8) -> SmallVec<[(HeisMono, i64); 4]> {
        let mut out: SmallVec<[(HeisMono, i64); 4]> = SmallVec::new();
        let mut i = 0;
        while i < self.0.len() {
            let (m, c) = decode(self.0[i]);
            if m == k {
                // count multiplicity of this exact factor
                let mut j = i;
                while j < self.0.len() && self.0[j] == self.0[i] {
                    j += 1;
                }
                let mult = (j - i) as i64;
                let mut v = self.0.clone();
                v.remove(i);
                out.push((HeisMono(v), mult * k as i64 * gram(b, c)));
                i = j;
            } else {
                i += 1;
            }
        }
        out
    }
}

impl fmt::Display for HeisMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, b) in self.factors() {
            write!(f, "b{}(-{})", b + 1, m)?;
        }
        Ok(())
    }
}

impl fmt::Debug for HeisMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A basis vector h ⊗ e^λ.
pub type Key = (HeisMono, LatticeVec);

/// Finite linear combination of basis vectors; zero coefficients are never stored.
#[derive(Clone, Default)]
pub struct FockState {
    pub terms: FxHashMap<Key, FieldElem>,
}

impl PartialEq for FockState {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(k, v)| other.terms.get(k) == Some(v))
    }
}

impl Eq for FockState {}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn vacuum() -> Self {
        Self::exp(LatticeVec::ZERO)
    }

    /// e^λ.
    pub fn exp(v: LatticeVec) -> Self {
        Self::basis(HeisMono::one(), v)
    }

    pub fn basis(h: HeisMono, v: LatticeVec) -> Self {
        let mut s = FockState::zero();
        s.terms.insert((h, v), FieldElem::one());
        s
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Key, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(key) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockState, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn add(&mut self, other: &FockState) {
        self.add_scaled(other, &FieldElem::one());
    }

    pub fn plus(&self, other: &FockState) -> FockState {
        let mut s = self.clone();
        s.add(other);
        s
    }

    pub fn minus(&self, other: &FockState) -> FockState {
        let mut s = self.clone();
        s.add_scaled(other, &FieldElem::int(-1));
        s
    }

    pub fn scaled(&self, c: &FieldElem) -> FockState {
        if c.is_zero() {
            return FockState::zero();
        }
        FockState { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn coeff(&self, key: &Key) -> FieldElem {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Terms in canonical order (lattice point, then monomial).
    pub fn sorted_terms(&self) -> Vec<(&Key, &FieldElem)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0 .1, &a.0 .0).cmp(&(b.0 .1, &b.0 .0)));
        v
    }

    /// Weight of a homogeneous state; `None` for the zero state.
    pub fn weight(&self) -> Result<Option<Rational>, FockError> {
        let mut w: Option<Rational> = None;
        for (h, v) in self.terms.keys() {
            let x = key_weight(h, *v);
            match &w {
                None => w = Some(x),
                Some(y) if *y == x => {}
                Some(_) => return Err(FockError::Inhomogeneous),
            }
        }
        Ok(w)
    }

    /// Splits into homogeneous components keyed by weight.
    pub fn components(&self) -> BTreeMap<Rational, FockState> {
        let mut out: BTreeMap<Rational, FockState> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(key_weight(&k.0, k.1)).or_default().terms.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn cosets(&self) -> Vec<CosetLabel> {
        let mut v: Vec<CosetLabel> = self.terms.keys().filter_map(|k| k.1.coset().ok()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Applies the isometry to every Heisenberg factor and to λ.
    pub fn apply_isometry(&self, g: &Isometry) -> FockState {
        let img = [VecH::from_lattice(g.apply(LatticeVec::BETA1)), VecH::from_lattice(g.apply(LatticeVec::BETA2))];
        let mut out = FockState::zero();
        for ((h, v), c) in &self.terms {
            let mut partial: Vec<(HeisMono, FieldElem)> = vec![(HeisMono::one(), c.clone())];
            for (m, b) in h.factors() {
                let mut next = Vec::with_capacity(partial.len() * 2);
                for (mono, coef) in &partial {
                    for (bb, cc) in img[b as usize].components() {
                        next.push((mono.with_factor(m, bb), coef * &cc));
                    }
                }
                partial = next;
            }
            let gv = g.apply(*v);
            for (mono, coef) in partial {
                out.add_term((mono, gv), &coef);
            }
        }
        out
    }

    /// Multiplies every term by a creation polynomial `poly` (lattice part untouched).
    pub fn times_creation(&self, poly: &[(HeisMono, FieldElem)]) -> FockState {
        let mut out = FockState::zero();
        for ((h, v), c) in &self.terms {
            for (p, pc) in poly {
                out.add_term((h.times(p), *v), &(c * pc));
            }
        }
        out
    }
}

pub fn key_weight(h: &HeisMono, v: LatticeVec) -> Rational {
    &Rational::new(v.pairing36(v), 72) + &Rational::from_int(h.degree() as i64)
}

impl fmt::Display for FockState {
    /// One term per line: `b1(-2)b2(-1).e[(1,0)/6] * coeff`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((h, v), c) in self.sorted_terms() {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{}.e[{}] * {}", h, v, c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("state is not homogeneous")]
    Inhomogeneous,
}

/// v(n) applied to w.
pub fn heis_apply(v: &VecH, n: i64, w: &FockState) -> FockState {
    let mut out = FockState::zero();
    for ((h, lam), c) in &w.terms {
        if n < 0 {
            for (b, cb) in v.components() {
                out.add_term((h.with_factor((-n) as u8, b), *lam), &(c * &cb));
            }
        } else if n == 0 {
            out.add_term((h.clone(), *lam), &(c * &v.pair_lattice(*lam)));
        } else {
            if n > h.max_mode() as i64 {
                continue;
            }
            for (b, cb) in v.components() {
                for (mono, k) in h.annihilate(b, n as u8) {
                    out.add_term((mono, *lam), &(c * &cb.scale(&Rational::from_int(k))));
                }
            }
        }
    }
    out
}

/// All multisets of factors (mode ≥ 1, basis ∈ {0,1}) with Σ modes = d.
pub fn monomials_of_degree(d: u32) -> Vec<HeisMono> {
    fn rec(remaining: u32, max_code: u32, cur: &mut Vec<(u8, Basis)>, out: &mut Vec<HeisMono>) {
        if remaining == 0 {
            out.push(HeisMono::from_factors(cur));
            return;
        }
        // factor codes ordered by (mode, basis); choose non-increasing codes
        let top = max_code.min(2 * remaining + 1);
        for code in (2..=top).rev() {
            let mode = code / 2;
            if mode > remaining || mode == 0 {
                continue;
            }
            cur.push((mode as u8, (code % 2) as u8));
            rec(remaining - mode, code, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, 2 * d + 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Basis of the weight-`wt` subspace of V_{coset}, as basis keys.
pub fn graded_keys(coset: CosetLabel, wt: &Rational) -> Vec<Key> {
    let mut out = Vec::new();
    for v in lattice_points(coset, wt) {
        let rest = wt - &Rational::new(v.pairing36(v), 72);
        if !rest.is_integer() || rest.signum() < 0 {
            continue;
        }
        let d = rest.to_i64().expect("small degree") as u32;
        for h in monomials_of_degree(d) {
            out.push((h, v));
        }
    }
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    out
}

/// A basis of the weight-`wt` piece of V_{coset}, optionally restricted to
/// the τ-eigenspace with eigenvalue ξ^k.
pub fn graded_basis(coset: CosetLabel, wt: &Rational, tau_eigen: Option<i64>) -> Vec<FockState> {
    let keys = graded_keys(coset, wt);
    let Some(k) = tau_eigen else {
        return keys.into_iter().map(|(h, v)| FockState::basis(h, v)).collect();
    };
    let mut solver: SpanSolver<Key> = SpanSolver::new();
    let mut out = Vec::new();
    for (h, v) in keys {
        let s = FockState::basis(h, v);
        let p = tau_projection(&s, k);
        if p.is_zero() {
            continue;
        }
        if solver.insert(p.terms.clone().into_iter().collect(), out.len()).is_none() {
            out.push(p);
        }
    }
    out
}

/// (w + ξ^{−k}τw + ξ^{−2k}τ²w)/3, the projection onto the ξ^k-eigenspace of τ.
pub fn tau_projection(w: &FockState, k: i64) -> FockState {
    let t1 = w.apply_isometry(&Isometry::TAU);
    let t2 = t1.apply_isometry(&Isometry::TAU);
    let mut out = w.clone();
    out.add_scaled(&t1, &FieldElem::xi_pow(-k));
    out.add_scaled(&t2, &FieldElem::xi_pow(-2 * k));
    out.scaled(&FieldElem::frac(1, 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: Basis) -> VecH {
        VecH::basis(i)
    }

    #[test]
    fn heisenberg_examples() {
        let w = heis_apply(&b(0), -1, &FockState::vacuum());
        assert_eq!(heis_apply(&b(0), 1, &w), FockState::vacuum().scaled(&FieldElem::int(4)));
        let e = FockState::exp(LatticeVec::BETA2);
        assert_eq!(heis_apply(&b(0), 0, &e), e.scaled(&FieldElem::int(-2)));
        assert!(heis_apply(&b(1), 3, &FockState::exp(LatticeVec::BETA1)).is_zero());
    }

    #[test]
    fn weights() {
        let w = |s: &FockState| s.weight().unwrap().unwrap();
        assert_eq!(w(&FockState::exp(LatticeVec::BETA1)), Rational::from_int(2));
        assert_eq!(w(&FockState::exp(LatticeVec::from_frac(1, -1, 3))), Rational::new(2, 3));
        let s = FockState::basis(HeisMono::from_factors(&[(2, 0), (1, 1)]), LatticeVec::ZERO);
        assert_eq!(w(&s), Rational::from_int(3));
        let mut mixed = FockState::vacuum();
        mixed.add(&FockState::exp(LatticeVec::BETA1));
        assert_eq!(mixed.weight(), Err(FockError::Inhomogeneous));
    }

    #[test]
    fn graded_dimensions_of_vl() {
        let dims: Vec<usize> = (0..=6).map(|n| graded_keys(CosetLabel::ZERO, &Rational::from_int(n)).len()).collect();
        assert_eq!(dims, vec![1, 2, 11, 22, 50, 96, 191]);
    }

    #[test]
    fn tau_eigenspaces_partition() {
        for n in 0..=3 {
            let wt = Rational::from_int(n);
            let total = graded_keys(CosetLabel::ZERO, &wt).len();
            let parts: usize = (0..3).map(|k| graded_basis(CosetLabel::ZERO, &wt, Some(k)).len()).sum();
            assert_eq!(parts, total);
        }
    }

    #[test]
    fn isometry_lift() {
        let e = FockState::exp(LatticeVec::BETA1);
        assert_eq!(e.apply_isometry(&Isometry::TAU), FockState::exp(LatticeVec::BETA2));
        let h = heis_apply(&b(1), -2, &FockState::vacuum());
        let th = h.apply_isometry(&Isometry::TAU);
        // τβ₂ = β₀ = −β₁ − β₂
        let mut expect = heis_apply(&b(0), -2, &FockState::vacuum()).scaled(&FieldElem::int(-1));
        expect.add_scaled(&h, &FieldElem::int(-1));
        assert_eq!(th, expect);
    }

    #[test]
    fn rendering() {
        let s = FockState::basis(HeisMono::from_factors(&[(1, 1), (2, 0)]), LatticeVec::new(1, 0))
            .scaled(&FieldElem::frac(-1, 2));
        assert_eq!(s.to_string(), "b1(-2)b2(-1).e[(1,0)/6] * -1/2");
    }
}
