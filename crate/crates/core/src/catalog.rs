//! Named vectors of V_L and its modules, in β-coordinates.
//!
//! With α = β/√2, the vectors x(α) = e^β + e^{−β}, y(α) = e^β − e^{−β} and
//! w(α) = ½α(−1)² − x(α) = ¼β(−1)² − x(α) generate everything else here.

use std::sync::OnceLock;

use crate::field::FieldElem;
use crate::fock::{heis_apply, FockState, Key, VecH};
use crate::lattice::LatticeVec;
use crate::linalg::SpanSolver;
use crate::vertex::mode_apply;
use crate::words::{parse_identities, Base, Coeff, Gen, Identity, Letter, ParseError, Word};

fn fe(n: i64, d: i64) -> FieldElem {
    FieldElem::frac(n, d)
}

/// v(−n) applied to w.
pub fn create(v: &VecH, n: i64, w: &FockState) -> FockState {
    heis_apply(v, -n, w)
}

/// v₁(−n₁)⋯v_k(−n_k)·1.
pub fn heis_word(factors: &[(VecH, i64)]) -> FockState {
    let mut s = FockState::vacuum();
    for (v, n) in factors.iter().rev() {
        s = create(v, *n, &s);
    }
    s
}

pub fn beta(i: usize) -> VecH {
    VecH::beta(i)
}

/// β_i − β_j in h.
pub fn beta_diff(i: usize, j: usize) -> VecH {
    beta(i).add(&beta(j).scale(&FieldElem::int(-1)))
}

fn exp_pm(i: usize, sign: i64) -> FockState {
    let b = LatticeVec::beta(i);
    let mut s = FockState::exp(b);
    s.add_scaled(&FockState::exp(-b), &FieldElem::int(sign));
    s
}

/// x(α_i) = e^{β_i} + e^{−β_i}.
pub fn x_alpha(i: usize) -> FockState {
    exp_pm(i, 1)
}

/// y(α_i) = e^{β_i} − e^{−β_i}.
pub fn y_alpha(i: usize) -> FockState {
    exp_pm(i, -1)
}

/// w(α_i) = ¼β_i(−1)² − x(α_i).
pub fn w_alpha(i: usize) -> FockState {
    let b = beta(i);
    let mut s = heis_word(&[(b.clone(), 1), (b, 1)]).scaled(&fe(1, 4));
    s.add_scaled(&x_alpha(i), &FieldElem::int(-1));
    s
}

/// The conformal vector ω = (1/12)Σ_i β_i(−1)².
pub fn omega() -> FockState {
    let mut s = FockState::zero();
    for i in 0..3 {
        s.add_scaled(&heis_word(&[(beta(i), 1), (beta(i), 1)]), &fe(1, 12));
    }
    s
}

/// ω̃¹ = (1/5)(w(α₁) + w(α₂) + w(α₀)), central charge 6/5.
pub fn omega_t1() -> FockState {
    let mut s = FockState::zero();
    for i in 0..3 {
        s.add_scaled(&w_alpha(i), &fe(1, 5));
    }
    s
}

/// ω̃² = ω − ω̃¹, central charge 4/5.
pub fn omega_t2() -> FockState {
    omega().minus(&omega_t1())
}

/// ω¹ = ¼w(α₁), central charge 1/2.
pub fn omega_1() -> FockState {
    w_alpha(1).scaled(&fe(1, 4))
}

/// ω² = ω̃¹ − ω¹, central charge 7/10.
pub fn omega_2() -> FockState {
    omega_t1().minus(&omega_1())
}

/// Index triples (i, j, k) cycling through (1,2,0), (2,0,1), (0,1,2).
const CYCLE: [(usize, usize, usize); 3] = [(1, 2, 0), (2, 0, 1), (0, 1, 2)];

/// The weight 3 generator J of the W₃ algebra with central charge 6/5.
pub fn j_vec() -> FockState {
    let mut s = FockState::zero();
    for &(i, j, k) in &CYCLE {
        // β_i(−2)(β_j − β_k)(−1)
        s.add_scaled(&heis_word(&[(beta(i), 2), (beta_diff(j, k), 1)]), &fe(-1, 6));
        // (β_j − β_k)(−1) y(α_i)
        s.add_scaled(&create(&beta_diff(j, k), 1, &y_alpha(i)), &FieldElem::int(-1));
    }
    s
}

/// The weight 3 generator K of the W₃ algebra with central charge 4/5.
pub fn k_vec() -> FockState {
    let mut s = heis_word(&[(beta_diff(1, 2), 1), (beta_diff(2, 0), 1), (beta_diff(0, 1), 1)]).scaled(&fe(-1, 9));
    for &(i, j, k) in &CYCLE {
        s.add(&create(&beta_diff(j, k), 1, &x_alpha(i)));
    }
    s
}

/// P = y(α₁) + y(α₂) + y(α₀), the weight 2 highest weight vector of W(0).
pub fn p_vec() -> FockState {
    let mut s = FockState::zero();
    for i in 0..3 {
        s.add(&y_alpha(i));
    }
    s
}

/// The printed closed form of J₁P.
pub fn j1p_formula() -> FockState {
    let b1 = beta(1);
    let b2 = beta(2);
    let mut s = FockState::zero();
    for (c, f) in [
        (2, [&b1, &b1, &b1]),
        (3, [&b1, &b1, &b2]),
        (-3, [&b1, &b2, &b2]),
        (-2, [&b2, &b2, &b2]),
    ] {
        let fs: Vec<(VecH, i64)> = f.iter().map(|v| ((*v).clone(), 1)).collect();
        s.add_scaled(&heis_word(&fs), &fe(13 * c, 9));
    }
    s.add_scaled(&k_vec(), &FieldElem::int(-4));
    s
}

/// The printed closed form of K₁P.
pub fn k1p_formula() -> FockState {
    let mut s = heis_word(&[(beta(1), 2), (beta(2), 1)]);
    s.add_scaled(&heis_word(&[(beta(2), 2), (beta(1), 1)]), &FieldElem::int(-1));
    let mut s = s.scaled(&fe(7, 2));
    s.add(&j_vec());
    s
}

/// Named vectors computed once per process.
pub struct Named {
    pub omega: FockState,
    pub w1: FockState,
    pub w2: FockState,
    pub j: FockState,
    pub k: FockState,
    pub p: FockState,
    pub jp: FockState,
    pub kp: FockState,
}

pub fn named() -> &'static Named {
    static N: OnceLock<Named> = OnceLock::new();
    N.get_or_init(|| {
        let p = p_vec();
        let j = j_vec();
        let k = k_vec();
        let jp = mode_apply(&j, 1, &p);
        let kp = mode_apply(&k, 1, &p);
        Named { omega: omega(), w1: omega_t1(), w2: omega_t2(), j, k, p, jp, kp }
    })
}

/// Looks up a named vector: `1`, `W1`, `W2`, `J`, `K`, `P`, `JP`, `KP`, `omega`.
pub fn by_name(name: &str) -> Option<FockState> {
    let n = named();
    Some(match name {
        "1" => FockState::vacuum(),
        "omega" => n.omega.clone(),
        "W1" => n.w1.clone(),
        "W2" => n.w2.clone(),
        "J" => n.j.clone(),
        "K" => n.k.clone(),
        "P" => n.p.clone(),
        "JP" => n.jp.clone(),
        "KP" => n.kp.clone(),
        _ => return None,
    })
}

pub fn generator(g: Gen) -> &'static FockState {
    let n = named();
    match g {
        Gen::W1 => &n.w1,
        Gen::W2 => &n.w2,
        Gen::J => &n.j,
        Gen::K => &n.k,
    }
}

/// Applies one letter X(−depth) = X_{wt X − 1 − depth}.
pub fn apply_letter(l: Letter, w: &FockState) -> FockState {
    mode_apply(generator(l.gen), l.subscript(), w)
}

/// The state a word denotes.
pub fn word_state(w: &Word) -> FockState {
    let mut s = match w.base {
        Base::Vacuum => FockState::vacuum(),
        Base::P => named().p.clone(),
    };
    for l in w.letters.iter().rev() {
        s = apply_letter(*l, &s);
        if s.is_zero() {
            break;
        }
    }
    s
}

// Top vectors of the untwisted modules, up to a global scale.

/// v^{2,ε} = β₁(−1) − ξ^ε β₂(−1).
pub fn v2(eps: i64) -> FockState {
    let v = beta(1).add(&beta(2).scale(&-FieldElem::xi_pow(eps)));
    create(&v, 1, &FockState::vacuum())
}

fn sign(j: i64) -> i64 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// (β_i − β_j)/3 with a sign.
fn third_diff(i: usize, j: usize, s: i64) -> LatticeVec {
    let d = LatticeVec::beta(i) - LatticeVec::beta(j);
    LatticeVec::new(s * d.m / 3, s * d.n / 3)
}

/// v^{4,j,ε} = e^{s(β₁−β₂)/3} + ξ^{2ε}e^{s(β₂−β₀)/3} + ξ^ε e^{s(β₀−β₁)/3}, s = (−1)^j.
pub fn v4(j: i64, eps: i64) -> FockState {
    let s = sign(j);
    let mut out = FockState::exp(third_diff(1, 2, s));
    out.add_scaled(&FockState::exp(third_diff(2, 0, s)), &FieldElem::xi_pow(2 * eps));
    out.add_scaled(&FockState::exp(third_diff(0, 1, s)), &FieldElem::xi_pow(eps));
    out
}

/// v^{3,j} = v^{4,j,0}.
pub fn v3(j: i64) -> FockState {
    v4(j, 0)
}

/// v^{5,1} = e^{β₁/2} − e^{−β₁/2}, v^{5,2} = e^{β₁/2} + e^{−β₁/2}.
pub fn v5(k: i64) -> FockState {
    let h = LatticeVec::new(3, 0);
    let mut out = FockState::exp(h);
    out.add_scaled(&FockState::exp(-h), &FieldElem::int(if k == 1 { -1 } else { 1 }));
    out
}

/// v^{6,j} = e^{−(−1)^j(β₂−β₀)/6}.
pub fn v6(j: i64) -> FockState {
    let d = LatticeVec::beta(2) - LatticeVec::beta(0);
    let s = -sign(j);
    FockState::exp(LatticeVec::new(s * d.m / 6, s * d.n / 6))
}

/// Top vectors of an untwisted card by name, e.g. `v2(1)`, `v4(1,2)`, `v5`.
pub fn top_vectors(name: &str) -> Option<Vec<FockState>> {
    let (head, args) = match name.split_once('(') {
        Some((h, a)) => (h, a.trim_end_matches(')')),
        None => (name, ""),
    };
    let nums: Vec<i64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<_>>>()?
    };
    Some(match (head, nums.as_slice()) {
        ("vac", []) => vec![FockState::vacuum()],
        ("v2", [e]) => vec![v2(*e)],
        ("v3", [j]) => vec![v3(*j)],
        ("v4", [j, e]) => vec![v4(*j, *e)],
        ("v5", []) => vec![v5(1), v5(2)],
        ("v6", [j]) => vec![v6(*j)],
        _ => return None,
    })
}

pub const STRUCTURE_CONSTANTS: &str = include_str!("../data/structure_constants.txt");
pub const APPENDIX_B: &str = include_str!("../data/appendix_b.txt");

/// The state on the left of a data line: `u n v` is u_n v, `null` is 0.
pub fn lhs_state(lhs: &str) -> Option<FockState> {
    if lhs == "null" {
        return Some(FockState::zero());
    }
    let parts: Vec<&str> = lhs.split_whitespace().collect();
    let [u, n, v] = parts.as_slice() else { return None };
    Some(mode_apply(&by_name(u)?, n.parse().ok()?, &by_name(v)?))
}

/// Outcome of checking one data line against the vertex engine.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IdentityCheck {
    pub lhs: String,
    pub terms: usize,
    pub holds: bool,
    /// Coefficients fixed by the computation where the printed sign was missing.
    pub resolved: Vec<(String, String)>,
}

/// Checks `lhs = Σ c·word`. Terms with an undetermined sign are solved for
/// (by expressing the residual in the span of their words); the line holds
/// when the residual lies in that span with coefficients of the printed
/// magnitude.
pub fn check_identity(id: &Identity) -> IdentityCheck {
    let mut residual = lhs_state(&id.lhs).unwrap_or_default();
    let mut unknown: Vec<(&Word, &FieldElem)> = Vec::new();
    for t in &id.terms {
        match &t.coeff {
            Coeff::Known(c) => residual.add_scaled(&word_state(&t.word), &-c.clone()),
            Coeff::UnknownSign(m) => unknown.push((&t.word, m)),
        }
    }
    let mut resolved = Vec::new();
    let holds = if unknown.is_empty() {
        residual.is_zero()
    } else {
        let mut solver: SpanSolver<Key> = SpanSolver::new();
        let mut independent = true;
        for (i, (w, _)) in unknown.iter().enumerate() {
            independent &= solver.insert(word_state(w).terms.into_iter().collect(), i).is_none();
        }
        match solver.express(residual.terms.into_iter().collect()) {
            Some(coords) if independent => unknown.iter().enumerate().all(|(i, (w, m))| {
                let c = coords.get(&i).cloned().unwrap_or_default();
                resolved.push((w.to_string(), c.to_string()));
                c == **m || c == -(*m).clone()
            }),
            _ => false,
        }
    };
    IdentityCheck { lhs: id.lhs.clone(), terms: id.terms.len(), holds, resolved }
}

/// Checks every line of a data file.
pub fn check_identities(text: &str) -> Result<Vec<IdentityCheck>, ParseError> {
    Ok(parse_identities(text)?.iter().map(check_identity).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::wt_int;

    fn one() -> FockState {
        FockState::vacuum()
    }

    #[test]
    fn central_charges() {
        let n = named();
        assert_eq!(mode_apply(&n.w1, 3, &n.w1), one().scaled(&fe(3, 5)));
        assert_eq!(mode_apply(&n.w2, 3, &n.w2), one().scaled(&fe(2, 5)));
        assert!(mode_apply(&n.w1, 2, &n.w2).is_zero());
        assert!(mode_apply(&n.w1, 1, &n.w2).is_zero());
        let o1 = omega_1();
        assert_eq!(mode_apply(&o1, 3, &o1), one().scaled(&fe(1, 4)));
    }

    #[test]
    fn j_is_commutator_of_w() {
        let a = mode_apply(&w_alpha(1), 0, &w_alpha(2));
        let b = mode_apply(&w_alpha(2), 0, &w_alpha(1));
        assert_eq!(a.minus(&b), j_vec());
    }

    #[test]
    fn first_structure_constants() {
        let n = named();
        assert_eq!(mode_apply(&n.j, 5, &n.j), one().scaled(&FieldElem::int(-84)));
        assert!(mode_apply(&n.j, 4, &n.j).is_zero());
        assert_eq!(mode_apply(&n.j, 3, &n.j), n.w1.scaled(&FieldElem::int(-420)));
        assert_eq!(mode_apply(&n.k, 5, &n.k), one().scaled(&FieldElem::int(104)));
        assert_eq!(mode_apply(&n.k, 3, &n.k), n.w2.scaled(&FieldElem::int(780)));
        let mut pp = n.w1.scaled(&FieldElem::int(-16));
        pp.add_scaled(&n.w2, &FieldElem::int(-6));
        assert_eq!(mode_apply(&n.p, 1, &n.p), pp);
    }

    #[test]
    fn p_is_highest_weight() {
        let n = named();
        assert_eq!(mode_apply(&n.w1, 1, &n.p), n.p.scaled(&fe(8, 5)));
        assert_eq!(mode_apply(&n.w2, 1, &n.p), n.p.scaled(&fe(2, 5)));
        assert!(mode_apply(&n.w1, 2, &n.p).is_zero());
        assert!(mode_apply(&n.j, 2, &n.p).is_zero());
        assert!(mode_apply(&n.k, 2, &n.p).is_zero());
    }

    #[test]
    fn closed_forms_of_jp_and_kp() {
        let n = named();
        assert_eq!(n.jp, j1p_formula());
        assert_eq!(n.kp, k1p_formula());
        assert_eq!(wt_int(&n.jp), 3);
    }

    #[test]
    fn words_denote_states() {
        let w: Word = "W1(-1) 1".parse().unwrap();
        assert_eq!(word_state(&w), named().w1);
        let w: Word = "J(-1) 1".parse().unwrap();
        assert_eq!(word_state(&w), named().j);
        let w: Word = "J(1) P".parse().unwrap();
        assert_eq!(word_state(&w), named().jp);
    }

    #[test]
    fn top_vector_parsing() {
        assert_eq!(top_vectors("v4(1,2)").unwrap()[0], v4(1, 2));
        assert_eq!(top_vectors("v5").unwrap().len(), 2);
        assert!(top_vectors("v9").is_none());
    }

    #[test]
    fn structure_constant_lines_hold() {
        for c in check_identities(STRUCTURE_CONSTANTS).unwrap() {
            assert!(c.holds, "{}", c.lhs);
        }
    }

    #[test]
    fn product_expansion_lines_hold() {
        let checks = check_identities(APPENDIX_B).unwrap();
        assert_eq!(checks.len(), 32);
        for c in &checks {
            assert!(c.holds, "{} {:?}", c.lhs, c.resolved);
        }
        let resolved: Vec<_> = checks.iter().flat_map(|c| c.resolved.clone()).collect();
        assert_eq!(resolved.len(), 2);
        eprintln!("{:?}", resolved);
    }
}
