//! Mode actions u_n w for u ∈ V_L on the modules V_{L^{(i,j)}}.
//!
//! For u = β_{b₁}(−n₁)···β_{b_k}(−n_k) e^β the vertex operator is
//!
//! ```text
//! Y(u, z) = : ∂^{(n₁−1)}β_{b₁}(z) ··· ∂^{(n_k−1)}β_{b_k}(z) E^−(−β,z) E^+(−β,z) e_β z^β :
//! ```
//!
//! with trivial cocycle. In the normal ordering every factor splits into a
//! creation part (modes < 0, left of e_β) and an annihilation part (modes ≥ 0,
//! acting on the input first). The coefficient of z^{−n−1} is assembled by
//! applying the annihilation parts, then E^+, then e_β z^β, and finally
//! multiplying by the needed coefficient of the creation series.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::field::FieldElem;
use crate::fock::{pair_basis_lattice, Basis, FockState, HeisMono, Key};
use crate::lattice::LatticeVec;
use crate::rational::{binom, Rational};

type Poly = Vec<(HeisMono, FieldElem)>;

/// Creation series Π A_i^−(z) · E^−(−β, z), coefficients indexed by the power of z.
struct CreationSeries {
    coeffs: Vec<Poly>,
}

thread_local! {
    static SERIES: RefCell<HashMap<(LatticeVec, Vec<(u8, Basis)>), CreationSeries>> = RefCell::new(HashMap::new());
}

fn poly_add(dst: &mut HashMap<HeisMono, FieldElem>, h: HeisMono, c: FieldElem) {
    if c.is_zero() {
        return;
    }
    use std::collections::hash_map::Entry;
    match dst.entry(h) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

fn finish(map: HashMap<HeisMono, FieldElem>) -> Poly {
    let mut v: Poly = map.into_iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// β(−k) as a creation polynomial in the β₁/β₂ basis.
fn lattice_creation(beta: LatticeVec, k: u8) -> Poly {
    let mut out = Vec::new();
    if beta.m != 0 {
        out.push((HeisMono::from_factors(&[(k, 0)]), FieldElem::frac(beta.m, 6)));
    }
    if beta.n != 0 {
        out.push((HeisMono::from_factors(&[(k, 1)]), FieldElem::frac(beta.n, 6)));
    }
    out
}

fn build_series(beta: LatticeVec, factors: &[(u8, Basis)], degree: usize) -> CreationSeries {
    // E^−(−β, z) = exp(Σ_k β(−k) z^k / k); e_d = (1/d) Σ_{k=1}^d β(−k) e_{d−k}.
    let mut e: Vec<Poly> = vec![vec![(HeisMono::one(), FieldElem::one())]];
    for d in 1..=degree {
        let mut m = HashMap::new();
        if beta != LatticeVec::ZERO {
            for k in 1..=d {
                let bk = lattice_creation(beta, k as u8);
                for (h, c) in &e[d - k] {
                    for (hb, cb) in &bk {
                        poly_add(&mut m, h.times(hb), &(c * cb) * &FieldElem::frac(1, d as i64));
                    }
                }
            }
        }
        e.push(finish(m));
    }
    // Each factor contributes A^−(z) = Σ_{t≥0} binom(t+n−1, n−1) β_b(−(t+n)) z^t.
    let mut acc = e;
    for &(n, b) in factors {
        let mut next: Vec<Poly> = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            let mut m = HashMap::new();
            for t in 0..=d {
                let coef = binom((t + n as usize - 1) as i64, n as i64 - 1);
                let mono = HeisMono::from_factors(&[((t + n as usize) as u8, b)]);
                for (h, c) in &acc[d - t] {
                    poly_add(&mut m, h.times(&mono), c.scale(&coef));
                }
            }
            next.push(finish(m));
        }
        acc = next;
    }
    CreationSeries { coeffs: acc }
}

/// Coefficient of z^d in the creation series for (β, factors); calls `f` with it.
fn with_creation<R>(beta: LatticeVec, factors: &[(u8, Basis)], d: usize, f: impl FnOnce(&Poly) -> R) -> R {
    SERIES.with(|cell| {
        let mut cache = cell.borrow_mut();
        let key = (beta, factors.to_vec());
        let need_build = match cache.get(&key) {
            Some(s) => s.coeffs.len() <= d,
            None => true,
        };
        if need_build {
            let deg = (d + 2).max(8);
            cache.insert(key.clone(), build_series(beta, factors, deg));
        }
        f(&cache[&key].coeffs[d])
    })
}

/// β(k) for k > 0 (β a lattice vector) applied to a monomial.
fn lattice_annihilate(h: &HeisMono, beta: LatticeVec, k: u8) -> Vec<(HeisMono, Rational)> {
    let mut out = Vec::new();
    for (b, c) in [(0u8, beta.m), (1u8, beta.n)] {
        if c == 0 {
            continue;
        }
        let coeff = Rational::new(c, 6);
        for (mono, g) in h.annihilate(b, k) {
            out.push((mono, &coeff * &Rational::from_int(g)));
        }
    }
    out
}

/// Annihilation-side terms: (power of z, monomial, coefficient).
type ZTerms = Vec<(i64, HeisMono, FieldElem)>;

fn apply_annihilation_factor(terms: &ZTerms, n: u8, b: Basis, lam: LatticeVec) -> ZTerms {
    // A^+(z) = Σ_{k≥0} binom(−k−1, n−1) β_b(k) z^{−k−n}
    let mut out = Vec::new();
    let p0 = pair_basis_lattice(b, lam);
    for (e, h, c) in terms {
        if !p0.is_zero() {
            let coef = &binom(-1, n as i64 - 1) * &p0;
            out.push((e - n as i64, h.clone(), c.scale(&coef)));
        }
        for k in 1..=h.max_mode() {
            let bk = binom(-(k as i64) - 1, n as i64 - 1);
            for (mono, g) in h.annihilate(b, k) {
                let coef = &bk * &Rational::from_int(g);
                out.push((e - k as i64 - n as i64, mono, c.scale(&coef)));
            }
        }
    }
    out
}

thread_local! {
    static E_PLUS: RefCell<HashMap<(HeisMono, LatticeVec), std::rc::Rc<ZTerms>>> = RefCell::new(HashMap::new());
}

fn apply_e_plus(terms: ZTerms, beta: LatticeVec) -> ZTerms {
    if beta == LatticeVec::ZERO {
        return terms;
    }
    let mut out = Vec::new();
    for (e, h, c) in terms {
        let single = E_PLUS.with(|cell| {
            let key = (h, beta);
            if let Some(r) = cell.borrow().get(&key) {
                return r.clone();
            }
            let r = std::rc::Rc::new(e_plus_monomial(vec![(0, key.0.clone(), FieldElem::one())], beta));
            cell.borrow_mut().insert(key, r.clone());
            r
        });
        out.extend(single.iter().map(|(e1, h1, c1)| (e + e1, h1.clone(), c1 * &c)));
    }
    merge(out)
}

fn e_plus_monomial(terms: ZTerms, beta: LatticeVec) -> ZTerms {
    // E^+(−β, z) = Π_k exp(−β(k) z^{−k} / k)
    let mut cur = merge(terms);
    let maxk = cur.iter().map(|t| t.1.max_mode()).max().unwrap_or(0);
    for k in 1..=maxk {
        let mut next = Vec::with_capacity(cur.len());
        for (e, h, c) in cur {
            let mut layer: Vec<(HeisMono, FieldElem)> = vec![(h, c)];
            let mut j: i64 = 0;
            while !layer.is_empty() {
                for (hh, cc) in &layer {
                    next.push((e - (k as i64) * j, hh.clone(), cc.clone()));
                }
                j += 1;
                let scale = Rational::new(-1, k as i64 * j);
                let mut nl = HashMap::new();
                for (hh, cc) in &layer {
                    if hh.max_mode() < k {
                        continue;
                    }
                    for (mono, g) in lattice_annihilate(hh, beta, k) {
                        poly_add(&mut nl, mono, cc.scale(&(&g * &scale)));
                    }
                }
                layer = nl.into_iter().collect();
            }
        }
        cur = merge(next);
    }
    cur
}

/// Combines terms with equal power of z and monomial.
fn merge(terms: ZTerms) -> ZTerms {
    let mut m: HashMap<(i64, HeisMono), FieldElem> = HashMap::with_capacity(terms.len());
    for (e, h, c) in terms {
        use std::collections::hash_map::Entry;
        match m.entry((e, h)) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }
    let mut out: ZTerms = m.into_iter().filter(|(_, c)| !c.is_zero()).map(|((e, h), c)| (e, h, c)).collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out
}

/// The coefficient of z^{−n−1} in Y(u, z) w.
pub fn mode_apply(u: &FockState, n: i64, w: &FockState) -> FockState {
    let mut out = FockState::zero();
    let target = -n - 1;
    for ((hu, beta), cu) in &u.terms {
        let factors: Vec<(u8, Basis)> = hu.factors().collect();
        let k = factors.len();
        assert!(k < 16, "too many Heisenberg factors");
        for ((hw, lam), cw) in &w.terms {
            let shift36 = beta.pairing36(*lam);
            assert!(shift36 % 36 == 0, "non-integral mode: u must lie in V_L");
            let shift = shift36 / 36;
            let new_lam = *lam + *beta;
            for mask in 0u32..(1 << k) {
                let mut right: ZTerms = vec![(0, hw.clone(), cu * cw)];
                let mut rest: Vec<(u8, Basis)> = Vec::with_capacity(k);
                for (i, &(ni, bi)) in factors.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        right = apply_annihilation_factor(&right, ni, bi, *lam);
                        if right.is_empty() {
                            break;
                        }
                    } else {
                        rest.push((ni, bi));
                    }
                }
                if right.is_empty() {
                    continue;
                }
                let right = apply_e_plus(right, *beta);
                for (e, h, c) in right {
                    let d = target - (e + shift);
                    if d < 0 {
                        continue;
                    }
                    with_creation(*beta, &rest, d as usize, |poly| {
                        for (p, pc) in poly {
                            out.add_term((h.times(p), new_lam), &(&c * pc));
                        }
                    });
                }
            }
        }
    }
    out
}

/// Weight of a nonzero homogeneous state (panics on inhomogeneous input).
pub fn wt(s: &FockState) -> Rational {
    s.weight().expect("homogeneous state").unwrap_or_default()
}

/// Weight as an integer (for states of V_L).
pub fn wt_int(s: &FockState) -> i64 {
    wt(s).to_i64().expect("integral weight")
}

/// Smallest k ≥ 0 with u_m w = 0 for all m ≥ k.
pub fn annihilation_order(u: &FockState, w: &FockState) -> i64 {
    if u.is_zero() || w.is_zero() {
        return 0;
    }
    // u_m w has weight wt u + wt w − m − 1, and module weights are ≥ 0.
    let bound = (&wt(u) + &max_weight_of(w)).floor();
    let mut k = num_traits::ToPrimitive::to_i64(&bound).unwrap().max(0);
    while k > 0 && mode_apply(u, k - 1, w).is_zero() {
        k -= 1;
    }
    k
}

fn max_weight_of(w: &FockState) -> Rational {
    w.components().keys().next_back().cloned().unwrap_or_default()
}

/// Both sides of the Borcherds identity with integral modes:
/// Σ_i binom(m,i) (u_{l+i}v)_{m+n−i} w = Σ_i (−1)^i binom(l,i) (u_{l+m−i} v_{n+i} w − (−1)^l v_{l+n−i} u_{m+i} w).
pub fn borcherds_sides(u: &FockState, v: &FockState, w: &FockState, l: i64, m: i64, n: i64) -> (FockState, FockState) {
    let wu = wt(u);
    let wv = wt(v);
    let ww = max_weight_of(w);
    let int = |r: &Rational| num_traits::ToPrimitive::to_i64(&r.floor()).unwrap();
    // u_{l+i} v = 0 once l+i ≥ wt u + wt v.
    let imax_left = int(&(&wu + &wv)) - l;
    let mut lhs = FockState::zero();
    for i in 0..=imax_left.max(-1) {
        let c = binom(m, i);
        if c.is_zero() {
            continue;
        }
        let uv = mode_apply(u, l + i, v);
        if uv.is_zero() {
            continue;
        }
        lhs.add_scaled(&mode_apply(&uv, m + n - i, w), &FieldElem::from(c));
    }
    // v_{n+i} w = 0 once n+i ≥ wt v + wt w; likewise u_{m+i} w.
    let imax_a = int(&(&wv + &ww)) - n;
    let imax_b = int(&(&wu + &ww)) - m;
    let imax = imax_a.max(imax_b);
    let sign_l = if l.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut rhs = FockState::zero();
    for i in 0..=imax.max(-1) {
        let c = binom(l, i);
        if c.is_zero() {
            continue;
        }
        let c = if i % 2 == 0 { c } else { -c };
        let vw = mode_apply(v, n + i, w);
        if !vw.is_zero() {
            rhs.add_scaled(&mode_apply(u, l + m - i, &vw), &FieldElem::from(c.clone()));
        }
        let uw = mode_apply(u, m + i, w);
        if !uw.is_zero() {
            rhs.add_scaled(&mode_apply(v, l + n - i, &uw), &FieldElem::from(&c * &Rational::from_int(-sign_l)));
        }
    }
    (lhs, rhs)
}

pub fn borcherds_check(u: &FockState, v: &FockState, w: &FockState, l: i64, m: i64, n: i64) -> bool {
    let (a, b) = borcherds_sides(u, v, w, l, m, n);
    a == b
}

/// [u_m, v_n] w computed by the commutator formula Σ_i binom(m,i) (u_i v)_{m+n−i} w.
pub fn commutator_by_formula(u: &FockState, v: &FockState, w: &FockState, m: i64, n: i64) -> FockState {
    let top = num_traits::ToPrimitive::to_i64(&(&wt(u) + &wt(v)).floor()).unwrap();
    let mut out = FockState::zero();
    for i in 0..=top {
        let c = binom(m, i);
        if c.is_zero() {
            continue;
        }
        let uv = mode_apply(u, i, v);
        if uv.is_zero() {
            continue;
        }
        out.add_scaled(&mode_apply(&uv, m + n - i, w), &FieldElem::from(c));
    }
    out
}

/// u_m v_n w − v_n u_m w.
pub fn commutator_direct(u: &FockState, v: &FockState, w: &FockState, m: i64, n: i64) -> FockState {
    let a = mode_apply(u, m, &mode_apply(v, n, w));
    let b = mode_apply(v, n, &mode_apply(u, m, w));
    a.minus(&b)
}

/// The associativity-type formula with T = 1, r = 0:
/// u_p v_q w = Σ_{i=0}^{N} Σ_{j≥0} binom(p−k, i) binom(k, j) (u_{p−k−i+j} v)_{q+k+i−j} w,
/// where k is minimal with z^k Y(u,z) w regular and N minimal with z^{N+1+q} Y(v,z) w regular.
pub fn formula1_sides(u: &FockState, v: &FockState, w: &FockState, p: i64, q: i64) -> (FockState, FockState) {
    let lhs = mode_apply(u, p, &mode_apply(v, q, w));
    let k = annihilation_order(u, w);
    let nv = annihilation_order(v, w);
    let big_n = (nv - q - 1).max(0);
    let mut rhs = FockState::zero();
    for i in 0..=big_n {
        let ci = binom(p - k, i);
        if ci.is_zero() {
            continue;
        }
        for j in 0..=k {
            let cj = binom(k, j);
            if cj.is_zero() {
                continue;
            }
            let uv = mode_apply(u, p - k - i + j, v);
            if uv.is_zero() {
                continue;
            }
            let t = mode_apply(&uv, q + k + i - j, w);
            rhs.add_scaled(&t, &FieldElem::from(&ci * &cj));
        }
    }
    (lhs, rhs)
}

pub fn formula1_check(u: &FockState, v: &FockState, w: &FockState, p: i64, q: i64) -> bool {
    let (a, b) = formula1_sides(u, v, w, p, q);
    a == b
}

/// Applies a fixed operator to each basis key of a state, with memoization.
pub struct ModeCache<'a> {
    pub u: &'a FockState,
    memo: HashMap<(i64, Key), FockState>,
}

impl<'a> ModeCache<'a> {
    pub fn new(u: &'a FockState) -> Self {
        ModeCache { u, memo: HashMap::new() }
    }

    pub fn apply(&mut self, n: i64, w: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (key, c) in &w.terms {
            let entry = self.memo.entry((n, key.clone())).or_insert_with(|| {
                mode_apply(self.u, n, &FockState::basis(key.0.clone(), key.1))
            });
            out.add_scaled(entry, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{heis_apply, VecH};

    fn b1m1() -> FockState {
        heis_apply(&VecH::basis(0), -1, &FockState::vacuum())
    }

    fn omega() -> FockState {
        // (1/6)(β₁(−1)² + β₁(−1)β₂(−1) + β₂(−1)²)
        let mut s = FockState::zero();
        for (f, c) in [(&[(1u8, 0u8), (1, 0)][..], 1), (&[(1, 0), (1, 1)][..], 1), (&[(1, 1), (1, 1)][..], 1)] {
            s.add_term((HeisMono::from_factors(f), LatticeVec::ZERO), &FieldElem::frac(c, 6));
        }
        s
    }

    #[test]
    fn vacuum_creation_property() {
        let u = b1m1();
        assert_eq!(mode_apply(&u, -1, &FockState::vacuum()), u);
        let e = FockState::exp(LatticeVec::BETA1);
        assert_eq!(mode_apply(&e, -1, &FockState::vacuum()), e);
        let mixed = mode_apply(&b1m1(), -1, &e);
        assert_eq!(mode_apply(&mixed, -1, &FockState::vacuum()), mixed);
    }

    #[test]
    fn virasoro_zero_mode_is_weight() {
        let om = omega();
        let w = b1m1();
        assert_eq!(mode_apply(&om, 1, &w), w);
        let e = FockState::exp(LatticeVec::BETA1);
        assert_eq!(mode_apply(&om, 1, &e), e.scaled(&FieldElem::int(2)));
        let t = FockState::exp(LatticeVec::from_frac(1, -1, 3));
        assert_eq!(mode_apply(&om, 1, &t), t.scaled(&FieldElem::frac(2, 3)));
        // central charge 2: ω₃ω = (c/2)·1
        assert_eq!(mode_apply(&om, 3, &om), FockState::vacuum());
    }

    #[test]
    fn lattice_exponential_products() {
        // e^{β}_{−⟨β,β⟩−1} e^{−β} = 1 for the pairing ⟨β,−β⟩ = −4: e^β_{3} e^{−β} = vacuum
        let e = FockState::exp(LatticeVec::BETA1);
        let f = FockState::exp(-LatticeVec::BETA1);
        assert_eq!(mode_apply(&e, 3, &f), FockState::vacuum());
        assert_eq!(mode_apply(&e, 2, &f), b1m1());
        assert!(mode_apply(&e, 4, &f).is_zero());
    }

    #[test]
    fn borcherds_small_cases() {
        let om = omega();
        let e = FockState::exp(LatticeVec::BETA1);
        assert!(borcherds_check(&om, &om, &e, 0, 1, 1));
        assert!(borcherds_check(&e, &b1m1(), &FockState::exp(-LatticeVec::BETA2), -1, 2, 0));
    }
}
