//! Truncated q-series with rational exponents, and the graded characters of
//! the lattice cosets, the commutant eigenspaces, the Virasoro minimal models
//! and the twisted sectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::catalog::{named, omega_1, omega_2};
use crate::field::FieldElem;
use crate::fock::{graded_basis, graded_keys, key_weight, tau_projection, FockState, HeisMono, Key};
use crate::lattice::{lattice_points, CosetLabel, Klein};
use crate::linalg::SparseVec;
use crate::modular::exact_kernel;
use crate::rational::Rational;
use crate::vertex::mode_apply;

/// Σ c·q^e with every coefficient at exponent ≤ `upto` exact.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    pub terms: BTreeMap<Rational, i64>,
    pub upto: Rational,
}

impl QSeries {
    pub fn zero(upto: Rational) -> Self {
        QSeries { terms: BTreeMap::new(), upto }
    }

    pub fn monomial(e: Rational, c: i64, upto: Rational) -> Self {
        let mut s = QSeries::zero(upto);
        s.add_term(e, c);
        s
    }

    pub fn one(upto: Rational) -> Self {
        QSeries::monomial(Rational::zero(), 1, upto)
    }

    pub fn add_term(&mut self, e: Rational, c: i64) {
        if e > self.upto || c == 0 {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: &Rational) -> i64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    /// Lowest exponent with a nonzero coefficient, or `upto` if none is known.
    pub fn low(&self) -> Rational {
        self.terms.keys().next().cloned().unwrap_or_else(|| self.upto.clone())
    }

    pub fn leading(&self) -> Option<(Rational, i64)> {
        self.terms.iter().next().map(|(e, c)| (e.clone(), *c))
    }

    pub fn truncate(&self, upto: &Rational) -> Self {
        let upto = upto.min(&self.upto).clone();
        let terms = self.terms.iter().filter(|(e, _)| **e <= upto).map(|(e, c)| (e.clone(), *c)).collect();
        QSeries { terms, upto }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let mut out = QSeries::zero(self.upto.clone().min(o.upto.clone()));
        for (e, c) in self.terms.iter().chain(&o.terms) {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> QSeries {
        let mut out = QSeries::zero(self.upto.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.scale(-1))
    }

    /// Multiplication by q^s.
    pub fn shift(&self, s: &Rational) -> QSeries {
        QSeries { terms: self.terms.iter().map(|(e, c)| (e + s, *c)).collect(), upto: &self.upto + s }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let upto = (&self.upto + &o.low()).min(&o.upto + &self.low());
        let mut out = QSeries::zero(upto);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// 1/self, for a series whose leading coefficient is ±1.
    pub fn inverse(&self) -> Option<QSeries> {
        let (e0, c0) = self.leading()?;
        if c0.abs() != 1 {
            return None;
        }
        // self = c0 q^e0 (1 + r)
        let rel = self.shift(&-e0.clone()).scale(c0);
        let r = rel.sub(&QSeries::one(rel.upto.clone()));
        let upto = rel.upto.clone();
        let mut out = QSeries::one(upto.clone());
        let mut power = QSeries::one(upto.clone());
        if let Some(step) = r.terms.keys().next().cloned() {
            let mut k = 1i64;
            while &step * &Rational::from_int(k) <= upto {
                power = power.mul(&r).scale(-1).truncate(&upto);
                power.upto = upto.clone();
                out = out.add(&power);
                k += 1;
            }
        }
        Some(out.scale(c0).shift(&-e0))
    }

    pub fn div(&self, o: &QSeries) -> Option<QSeries> {
        Some(self.mul(&o.inverse()?))
    }

    /// Terms whose exponent lies in `base + step·Z`.
    pub fn class(&self, base: &Rational, step: &Rational) -> QSeries {
        let terms = self.terms.iter().filter(|(e, _)| (&(*e - base) / step).is_integer()).map(|(e, c)| (e.clone(), *c)).collect();
        QSeries { terms, upto: self.upto.clone() }
    }

    /// First exponent ≤ min(upto) where the two series differ.
    pub fn first_difference(&self, o: &QSeries) -> Option<Rational> {
        let upto = self.upto.clone().min(o.upto.clone());
        let d = self.sub(o);
        d.terms.keys().find(|e| **e <= upto).cloned()
    }

    pub fn nonnegative(&self) -> bool {
        self.terms.values().all(|c| *c >= 0)
    }

    /// The first `n` terms as (exponent, coefficient).
    pub fn head(&self, n: usize) -> Vec<(Rational, i64)> {
        self.terms.iter().take(n).map(|(e, c)| (e.clone(), *c)).collect()
    }
}

impl fmt::Display for QSeries {
    /// One `exponent: coefficient` line per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.terms {
            writeln!(f, "{e}: {c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}q^{e}")).collect();
        write!(f, "{} + O(q^{})", parts.join(" + "), self.upto)
    }
}

/// ∏ 1/(1 − q^{e}) over the given exponents, to precision `upto`.
pub fn inverse_product(exps: impl IntoIterator<Item = Rational>, upto: &Rational) -> QSeries {
    let mut out = QSeries::one(upto.clone());
    for e in exps {
        if e > *upto {
            continue;
        }
        let mut geo = QSeries::one(upto.clone());
        let mut k = 1i64;
        while &e * &Rational::from_int(k) <= *upto {
            geo.add_term(&e * &Rational::from_int(k), 1);
            k += 1;
        }
        out = out.mul(&geo);
        out.upto = upto.clone();
    }
    out
}

/// ∏_{n≥1} (1 − qⁿ)^{−2}: the two-boson Fock space.
pub fn heisenberg_character(upto: i64) -> QSeries {
    let u = Rational::from_int(upto);
    let single: Vec<Rational> = (1..=upto).map(Rational::from_int).collect();
    inverse_product(single.iter().cloned().chain(single.iter().cloned()), &u)
}

/// Character of V_{coset} to grade N above its minimal weight.
pub fn coset_character(c: CosetLabel, n: i64) -> QSeries {
    let lo = c.min_weight();
    let upto = &lo + &Rational::from_int(n);
    let mut theta = QSeries::zero(upto.clone());
    for v in lattice_points(c, &upto) {
        theta.add_term(key_weight(&HeisMono::one(), v), 1);
    }
    let mut out = theta.mul(&heisenberg_character(n + 1));
    out = out.truncate(&upto);
    out.upto = upto;
    out
}

/// Graded dimensions of V_{coset}(ε) from the Fock basis.
pub fn basis_character(c: CosetLabel, tau_eigen: Option<i64>, n: i64) -> QSeries {
    let lo = c.min_weight();
    let upto = &lo + &Rational::from_int(n);
    let mut out = QSeries::zero(upto);
    for k in 0..=n {
        let wt = &lo + &Rational::from_int(k);
        out.add_term(wt.clone(), graded_basis(c, &wt, tau_eigen).len() as i64);
    }
    out
}

/// Virasoro minimal models used here: (p, p′) with c = 1 − 6(p − p′)²/(pp′).
fn minimal_pair(c: &Rational) -> Option<(i64, i64)> {
    [(4, 3), (5, 4), (6, 5)].into_iter().find(|&(p, q)| Rational::from_int(1) - Rational::new(6 * (p - q) * (p - q), p * q) == *c)
}

fn h_rs(p: i64, q: i64, r: i64, s: i64) -> Rational {
    Rational::new((p * r - q * s).pow(2) - (p - q).pow(2), 4 * p * q)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no minimal model with c = {0}, h = {1}")]
pub struct UnknownModule(pub String, pub String);

/// Irreducible character of L(c, h) from the alternating sum over the
/// affine Weyl orbit, divided by ∏(1 − qⁿ), to grade N above h.
pub fn minimal_model_character(c: &Rational, h: &Rational, n: i64) -> Result<QSeries, UnknownModule> {
    let err = || UnknownModule(c.to_string(), h.to_string());
    let (p, q) = minimal_pair(c).ok_or_else(err)?;
    let (r, s) = (1..q).flat_map(|r| (1..p).map(move |s| (r, s))).find(|&(r, s)| h_rs(p, q, r, s) == *h).ok_or_else(err)?;
    let upto = h + &Rational::from_int(n);
    let mut num = QSeries::zero(upto.clone());
    let d = (p - q).pow(2);
    let kmax = n + 2;
    for k in -kmax..=kmax {
        let a = 2 * p * q * k + p * r - q * s;
        let b = 2 * p * q * k + p * r + q * s;
        num.add_term(Rational::new(a * a - d, 4 * p * q), 1);
        num.add_term(Rational::new(b * b - d, 4 * p * q), -1);
    }
    let phi = inverse_product((1..=n + 1).map(Rational::from_int), &Rational::from_int(n + 1));
    let mut out = num.mul(&phi).truncate(&upto);
    out.upto = upto;
    Ok(out)
}

fn mm(c: (i64, i64), h: (i64, i64), n: i64) -> QSeries {
    minimal_model_character(&Rational::new(c.0, c.1), &Rational::new(h.0, h.1), n).expect("tabulated module")
}

/// The commutant eigenspaces whose characters enter the decompositions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// ker (ω̃²)₁ in V_{L_i}.
    Mk(Klein),
    /// (ω̃²)₁ = 2/5 in V_{L_i}.
    Wk(Klein),
    /// ker (ω̃¹)₁ in V_{L^j}.
    Mt(u8),
    /// (ω¹)₁ = 0, (ω²)₁ = 3/5 in V_{L^j}.
    Wt(u8),
    /// ξ^ε-eigenspace of τ in M_k^0.
    M(i64),
    /// ξ^ε-eigenspace of τ in W_k^0.
    W(i64),
}

impl Space {
    pub fn name(&self) -> String {
        match self {
            Space::Mk(k) => format!("M_k^{}", k.symbol()),
            Space::Wk(k) => format!("W_k^{}", k.symbol()),
            Space::Mt(j) => format!("M_t^{j}"),
            Space::Wt(j) => format!("W_t^{j}"),
            Space::M(e) => format!("M({e})"),
            Space::W(e) => format!("W({e})"),
        }
    }

    fn coset(&self) -> CosetLabel {
        match *self {
            Space::Mk(k) | Space::Wk(k) => CosetLabel::new(k, 0),
            Space::Mt(j) | Space::Wt(j) => CosetLabel::new(Klein::Zero, j),
            Space::M(_) | Space::W(_) => CosetLabel::ZERO,
        }
    }

    /// Difference between the total weight and the module's own grading.
    fn shift(&self) -> Rational {
        match self {
            Space::Wk(_) | Space::W(_) => Rational::new(2, 5),
            Space::Wt(_) => Rational::new(3, 5),
            _ => Rational::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    W1,
    W2,
    Om1,
    Om2,
}

fn op_state(op: Op) -> &'static FockState {
    static OM: OnceLock<(FockState, FockState)> = OnceLock::new();
    let om = OM.get_or_init(|| (omega_1(), omega_2()));
    match op {
        Op::W1 => &named().w1,
        Op::W2 => &named().w2,
        Op::Om1 => &om.0,
        Op::Om2 => &om.1,
    }
}

/// Images u₁b of the monomial basis of one graded piece, memoized.
fn piece_images(c: CosetLabel, wt: &Rational, op: Op) -> Arc<HashMap<Key, FockState>> {
    type Cache = HashMap<(CosetLabel, Rational, Op), Arc<HashMap<Key, FockState>>>;
    static CACHE: OnceLock<Mutex<Cache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (c, wt.clone(), op);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let u = op_state(op);
    let imgs: HashMap<Key, FockState> = graded_keys(c, wt).into_iter().map(|k| (k.clone(), mode_apply(u, 1, &FockState::basis(k.0, k.1)))).collect();
    let imgs = Arc::new(imgs);
    cache.lock().unwrap().insert(key, imgs.clone());
    imgs
}

fn apply_linear(images: &HashMap<Key, FockState>, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    for (k, x) in &s.terms {
        out.add_scaled(&images[k], x);
    }
    out
}

/// Dimension of {v ∈ span(basis) : (u)₁v = h·v for each (u, h)} in one
/// graded piece, computed exactly.
fn eigenspace_dim(c: CosetLabel, wt: &Rational, basis: &[FockState], conds: &[(Op, Rational)], tau_eigen: Option<i64>) -> usize {
    let images: Vec<_> = conds.iter().map(|(op, _)| piece_images(c, wt, *op)).collect();
    let cols: Vec<SparseVec<(usize, Key)>> = basis
        .iter()
        .map(|b| {
            let mut v: SparseVec<(usize, Key)> = BTreeMap::new();
            for (t, (_, h)) in conds.iter().enumerate() {
                let mut img = apply_linear(&images[t], b);
                if let Some(e) = tau_eigen {
                    assert_eq!(tau_projection(&img, e), img, "operator does not commute with tau");
                }
                img.add_scaled(b, &-FieldElem::from(h.clone()));
                for (k, x) in img.terms {
                    v.insert((t, k), x);
                }
            }
            v
        })
        .collect();
    exact_kernel(&cols).expect("kernel lifts").relations.len()
}

/// Graded character of a commutant eigenspace in its own grading, to
/// grade N above the coset's minimal weight.
pub fn eigenspace_character(space: Space, n: i64) -> QSeries {
    let c = space.coset();
    let lo = c.min_weight();
    let shift = space.shift();
    let conds: Vec<(Op, Rational)> = match space {
        Space::Mk(_) | Space::M(_) => vec![(Op::W2, Rational::zero())],
        Space::Wk(_) | Space::W(_) => vec![(Op::W2, Rational::new(2, 5))],
        Space::Mt(_) => vec![(Op::W1, Rational::zero())],
        Space::Wt(_) => vec![(Op::Om1, Rational::zero()), (Op::Om2, Rational::new(3, 5))],
    };
    let tau = match space {
        Space::M(e) | Space::W(e) => Some(e),
        _ => None,
    };
    let upto = &(&lo + &Rational::from_int(n)) - &shift;
    let mut out = QSeries::zero(upto);
    for k in 0..=n {
        let wt = &lo + &Rational::from_int(k);
        let basis = graded_basis(c, &wt, tau);
        let dim = eigenspace_dim(c, &wt, &basis, &conds, tau);
        out.add_term(&wt - &shift, dim as i64);
    }
    out
}

/// Minimal-model side of each eigenspace character.
pub fn expected_character(space: Space, n: i64) -> Option<QSeries> {
    let ising = |h: (i64, i64)| mm((1, 2), h, n);
    let tri = |h: (i64, i64)| mm((7, 10), h, n);
    let tp = |h: (i64, i64)| mm((4, 5), h, n);
    Some(match space {
        Space::Mk(Klein::Zero) => ising((0, 1)).mul(&tri((0, 1))).add(&ising((1, 2)).mul(&tri((3, 2)))),
        Space::Mk(Klein::A | Klein::B) => ising((1, 16)).mul(&tri((7, 16))),
        Space::Mk(Klein::C) => ising((1, 2)).mul(&tri((0, 1))).add(&ising((0, 1)).mul(&tri((3, 2)))),
        Space::Wk(Klein::Zero) => ising((0, 1)).mul(&tri((3, 5))).add(&ising((1, 2)).mul(&tri((1, 10)))),
        Space::Wk(Klein::A | Klein::B) => ising((1, 16)).mul(&tri((3, 80))),
        Space::Wk(Klein::C) => ising((1, 2)).mul(&tri((3, 5))).add(&ising((0, 1)).mul(&tri((1, 10)))),
        Space::Mt(0) => tp((0, 1)).add(&tp((3, 1))),
        Space::Mt(_) => tp((2, 3)),
        Space::Wt(0) => tp((2, 5)).add(&tp((7, 5))),
        Space::Wt(_) => tp((1, 15)),
        Space::M(_) | Space::W(_) => return None,
    })
}

/// One character identity checked coefficient-wise.
#[derive(Clone, Debug, Serialize)]
pub struct CharCheck {
    pub name: String,
    pub ok: bool,
    /// Exponent through which the identity was compared.
    pub upto: String,
    pub first_failure: Option<String>,
}

fn check(name: impl Into<String>, lhs: &QSeries, rhs: &QSeries, need: &Rational) -> CharCheck {
    let upto = lhs.upto.clone().min(rhs.upto.clone());
    let diff = lhs.first_difference(rhs);
    let covered = upto >= *need;
    CharCheck {
        name: name.into(),
        ok: diff.is_none() && covered && lhs.nonnegative() && rhs.nonnegative(),
        upto: upto.to_string(),
        first_failure: diff.map(|e| format!("q^{e}: {} vs {}", lhs.coeff(&e), rhs.coeff(&e))).or_else(|| (!covered).then(|| format!("only compared through q^{upto}"))),
    }
}

/// All decomposition identities at truncation N.
pub fn verify_decompositions(n: i64) -> Vec<CharCheck> {
    let mut out = Vec::new();
    let mut chars: HashMap<Space, QSeries> = HashMap::new();
    let mut get = |s: Space| chars.entry(s).or_insert_with(|| eigenspace_character(s, n + 1)).clone();
    // commutant characters against minimal models
    let spaces: Vec<Space> = Klein::ALL.iter().flat_map(|&k| [Space::Mk(k), Space::Wk(k)]).chain((0..3).flat_map(|j| [Space::Mt(j), Space::Wt(j)])).collect();
    for s in &spaces {
        let lhs = get(*s);
        let rhs = expected_character(*s, n).unwrap();
        let need = &lhs.low() + &Rational::from_int(n);
        let name = if matches!(s, Space::Mt(_) | Space::Wt(_)) { "ternary" } else { "klein" };
        out.push(check(format!("{name} {}", s.name()), &lhs, &rhs, &need));
    }
    // lattice cosets
    for &k in &Klein::ALL {
        for j in 0..3u8 {
            let c = CosetLabel::new(k, j);
            let lhs = coset_character(c, n);
            let rhs = get(Space::Mk(k)).mul(&get(Space::Mt(j))).add(&get(Space::Wk(k)).mul(&get(Space::Wt(j))));
            let need = &c.min_weight() + &Rational::from_int(n);
            out.push(check(format!("coset {c}"), &lhs, &rhs, &need));
        }
    }
    // τ-eigenspaces of V_L
    let full = coset_character(CosetLabel::ZERO, n);
    let need = Rational::from_int(n);
    out.push(check("basis count V_L", &full, &basis_character(CosetLabel::ZERO, None, n), &need));
    let mut sum = QSeries::zero(need.clone());
    for e in 0..3 {
        let lhs = basis_character(CosetLabel::ZERO, Some(e), n);
        sum = sum.add(&lhs);
        let rhs = get(Space::M(e)).mul(&get(Space::Mt(0))).add(&get(Space::W(e)).mul(&get(Space::Wt(0))));
        out.push(check(format!("tau-eigenspace {e}"), &lhs, &rhs, &need));
    }
    out.push(check("tau-eigenspaces sum", &sum, &full, &need));
    out
}

/// Characters of the τ-twisted sector: S[τ] and its M_T / W_T split.
#[derive(Clone, Debug)]
pub struct TwistedCharacters {
    pub s: QSeries,
    pub m_t: QSeries,
    pub w_t: QSeries,
}

/// ch S[τ] = q^{1/9} ∏_{n≥0} 1/((1 − q^{1/3+n})(1 − q^{2/3+n})).
pub fn s_tau_character(n: i64) -> QSeries {
    let upto = &Rational::new(1, 9) + &Rational::from_int(n);
    let rel = Rational::from_int(n);
    let exps = (0..=n).flat_map(|k| [&Rational::new(1, 3) + &Rational::from_int(k), &Rational::new(2, 3) + &Rational::from_int(k)]);
    let mut out = inverse_product(exps, &rel).shift(&Rational::new(1, 9));
    out.upto = upto;
    out
}

/// Splits S[τ] = ch M_T·A_j + ch W_T·B_j (j = 0, 1), where A_j, B_j are the
/// characters of M_t^j, W_t^j: both equations hold because every
/// V_L^{T_{χ_j}}(τ) has the same character.
pub fn twisted_split(n: i64) -> TwistedCharacters {
    let m = n + 2;
    let s = s_tau_character(m);
    let a0 = mm((4, 5), (0, 1), m).add(&mm((4, 5), (3, 1), m));
    let a1 = mm((4, 5), (2, 3), m);
    let b0 = mm((4, 5), (2, 5), m).add(&mm((4, 5), (7, 5), m));
    let b1 = mm((4, 5), (1, 15), m);
    let d = a0.mul(&b1).sub(&a1.mul(&b0));
    let m_t = s.mul(&b1.sub(&b0)).div(&d).expect("unit leading term");
    let w_t = s.mul(&a0.sub(&a1)).div(&d).expect("unit leading term");
    TwistedCharacters { s, m_t, w_t }
}

/// The ε-part of M_T(τ) or W_T(τ): exponents in 1/9 + ε′/3 + Z (resp.
/// 2/45 + ε′/3 + Z) where ε = 2ε′ (resp. 2ε′ − 1) mod 3.
pub fn twisted_part(tc: &TwistedCharacters, which_m: bool, eps: i64) -> QSeries {
    let (series, base) = if which_m { (&tc.m_t, Rational::new(1, 9)) } else { (&tc.w_t, Rational::new(2, 45)) };
    let e_prime = if which_m { (2 * eps).rem_euclid(3) } else { (2 * (eps + 1)).rem_euclid(3) };
    series.class(&(&base + &Rational::new(e_prime, 3)), &Rational::from_int(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    pub m_t_head: Vec<(String, i64)>,
    pub w_t_head: Vec<(String, i64)>,
    pub m_t_matches: bool,
    pub w_t_matches: bool,
    pub nonnegative: bool,
    /// Consistency of S[τ] with the j = 2 decomposition.
    pub third_sector: bool,
    /// Lowest weight of each ε-part: (label, weight).
    pub top_weights: Vec<(String, String)>,
}

impl TwistedReport {
    pub fn ok(&self) -> bool {
        self.m_t_matches && self.w_t_matches && self.nonnegative && self.third_sector
    }
}

pub fn verify_twisted(n: i64) -> TwistedReport {
    let tc = twisted_split(n);
    let r = |a: i64, b: i64| Rational::new(a, b);
    let m_expected = [r(1, 9), r(7, 9), r(10, 9), r(13, 9)];
    let w_expected = [r(2, 45), r(17, 45), r(32, 45), r(47, 45)];
    let head = |s: &QSeries| s.head(4).into_iter().map(|(e, c)| (e.to_string(), c)).collect::<Vec<_>>();
    let matches = |s: &QSeries, want: &[Rational; 4]| s.head(4).iter().map(|(e, c)| (e.clone(), *c)).eq(want.iter().map(|e| (e.clone(), 1)));
    let m = m_expected.clone();
    let w = w_expected.clone();
    // the same S[τ] against M_t^2, W_t^2
    let k = n + 2;
    let a2 = mm((4, 5), (2, 3), k);
    let b2 = mm((4, 5), (1, 15), k);
    let third = tc.m_t.mul(&a2).add(&tc.w_t.mul(&b2));
    let need = &Rational::new(1, 9) + &Rational::from_int(n);
    let third_sector = third.first_difference(&tc.s).is_none() && third.upto.clone().min(tc.s.upto.clone()) >= need;
    let mut top_weights = Vec::new();
    for eps in 0..3 {
        top_weights.push((format!("MT(tau)({eps})"), twisted_part(&tc, true, eps).low().to_string()));
        top_weights.push((format!("WT(tau)({eps})"), twisted_part(&tc, false, eps).low().to_string()));
    }
    TwistedReport {
        m_t_head: head(&tc.m_t),
        w_t_head: head(&tc.w_t),
        m_t_matches: matches(&tc.m_t, &m),
        w_t_matches: matches(&tc.w_t, &w),
        nonnegative: tc.m_t.nonnegative() && tc.w_t.nonnegative(),
        third_sector,
        top_weights,
    }
}

/// Lowest weight of the ε-part of the τ-twisted module V_L^{T_χ}(τ):
/// exponents of S[τ] in 1/9 + ε′/3 + Z with ε = 2ε′ mod 3.
pub fn twisted_module_weight(eps: i64) -> Rational {
    let s = s_tau_character(2);
    let e_prime = (2 * eps).rem_euclid(3);
    s.class(&(&Rational::new(1, 9) + &Rational::new(e_prime, 3)), &Rational::from_int(1)).low()
}

/// Lowest weight of a twisted first factor such as `MT(tau)(1)` or
/// `WT(tau2)(0)`; τ² modules are contragredient and share the character.
pub fn twisted_factor_weight(tc: &TwistedCharacters, label: &str) -> Option<Rational> {
    let which_m = label.starts_with("MT(");
    if !which_m && !label.starts_with("WT(") {
        return None;
    }
    let eps: i64 = label.rsplit_once('(')?.1.trim_end_matches(')').parse().ok()?;
    Some(twisted_part(tc, which_m, eps).low())
}

/// One weight compared between two independent sources.
#[derive(Clone, Debug, Serialize)]
pub struct WeightCheck {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub ok: bool,
}

fn weight_check(name: String, expected: Option<Rational>, found: Option<Rational>) -> WeightCheck {
    let show = |x: &Option<Rational>| x.as_ref().map_or("none".to_string(), |r| r.to_string());
    WeightCheck { ok: expected.is_some() && expected == found, expected: show(&expected), found: show(&found), name }
}

fn rational_entry(x: &FieldElem) -> Option<Rational> {
    x.is_rational().then(|| x.re.clone())
}

/// Twisted a₁ values of the roster and the cards against the character
/// split, and the L(0) eigenvalue W1 + W2 of every card against the weight
/// of its module.
pub fn weight_checks(tc: &TwistedCharacters, roster: &[crate::classify::Quadruplet], cards: &[crate::cards::Card]) -> Vec<WeightCheck> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for q in roster {
        if let Some(w) = twisted_factor_weight(tc, &q.first) {
            if seen.insert(q.first.clone()) {
                out.push(weight_check(format!("roster a1 {}", q.first), Some(w), rational_entry(&q.a1)));
            }
        }
    }
    for card in cards {
        let (w1, w2) = (card.matrix("W1"), card.matrix("W2"));
        let module_weight = if card.is_twisted() {
            card.tau_eigen.map(twisted_module_weight)
        } else {
            card.top.as_deref().and_then(crate::catalog::top_vectors).and_then(|tops| tops[0].weight().ok().flatten())
        };
        for (i, [first, _]) in card.quadruplets.iter().enumerate() {
            let l0 = rational_entry(&(&w1.rows[i][i] + &w2.rows[i][i]));
            out.push(weight_check(format!("{} top {i} L(0)", card.name), module_weight.clone(), l0));
            if card.is_twisted() {
                out.push(weight_check(format!("{} top {i} a1", card.name), twisted_factor_weight(tc, first), rational_entry(&w1.rows[i][i])));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn series_arithmetic() {
        let n = r(5, 1);
        let geo = inverse_product([r(1, 1)], &n);
        let one_minus_q = QSeries::one(n.clone()).sub(&QSeries::monomial(r(1, 1), 1, n.clone()));
        assert_eq!(geo.mul(&one_minus_q).first_difference(&QSeries::one(n.clone())), None);
        let inv = one_minus_q.inverse().unwrap();
        assert_eq!(inv.first_difference(&geo), None);
        let shifted = QSeries::monomial(r(1, 3), -1, n.clone()).add(&QSeries::monomial(r(4, 3), 2, n.clone()));
        let back = shifted.inverse().unwrap().mul(&shifted);
        assert_eq!(back.first_difference(&QSeries::one(back.upto.clone())), None);
    }

    #[test]
    fn ising_vacuum_character() {
        let ch = minimal_model_character(&r(1, 2), &r(0, 1), 6).unwrap();
        let coeffs: Vec<i64> = (0..=6).map(|k| ch.coeff(&r(k, 1))).collect();
        assert_eq!(coeffs, vec![1, 0, 1, 1, 2, 2, 3]);
        let ch = minimal_model_character(&r(4, 5), &r(2, 3), 2).unwrap();
        assert_eq!(ch.leading(), Some((r(2, 3), 1)));
        assert!(minimal_model_character(&r(4, 5), &r(1, 7), 2).is_err());
    }

    #[test]
    fn lattice_characters() {
        let v = coset_character(CosetLabel::ZERO, 3);
        assert_eq!(v.coeff(&r(2, 1)), 11);
        assert_eq!(v.first_difference(&basis_character(CosetLabel::ZERO, None, 3)), None);
        let c01 = coset_character(CosetLabel::new(Klein::Zero, 1), 1);
        assert_eq!(c01.leading(), Some((r(2, 3), 3)));
        let c = coset_character(CosetLabel::new(Klein::C, 1), 1);
        assert_eq!(c.leading().unwrap().0, r(1, 6));
    }

    #[test]
    fn low_grade_decompositions() {
        for c in verify_decompositions(2) {
            assert!(c.ok, "{:?}", c);
        }
    }

    #[test]
    fn twisted_heads() {
        let rep = verify_twisted(4);
        assert!(rep.ok(), "{:?}", rep);
        assert_eq!(twisted_module_weight(2), r(4, 9));
        let tc = twisted_split(3);
        let roster = crate::classify::parse_quadruplets(crate::classify::QUADRUPLETS_JSON).unwrap();
        let checks = weight_checks(&tc, &roster, &crate::cards::builtin_cards());
        assert!(checks.len() > 60);
        for c in checks {
            assert!(c.ok, "{:?}", c);
        }
    }
}
