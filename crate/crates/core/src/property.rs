//! Seeded randomized checks: the Borcherds identity on V_L-modules,
//! equivariance of the lattice automorphisms, and vanishing of ψ on O(V).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cards::Card;
use crate::catalog::named;
use crate::field::FieldElem;
use crate::fock::{graded_keys, FockState};
use crate::lattice::{CosetLabel, Isometry};
use crate::rational::Rational;
use crate::vertex::{borcherds_sides, mode_apply};
use crate::zhu::{card_scalar, circ};

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    /// Up to five failing cases.
    pub failures: Vec<String>,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.cases > 0 && self.passed == self.cases
    }

    fn run(name: &str, seed: u64, cases: usize, mut case: impl FnMut(&mut ChaCha8Rng) -> Result<(), String>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut passed = 0;
        let mut failures = Vec::new();
        for i in 0..cases {
            match case(&mut rng) {
                Ok(()) => passed += 1,
                Err(e) if failures.len() < 5 => failures.push(format!("case {i}: {e}")),
                Err(_) => {}
            }
        }
        PropertyReport { name: name.to_string(), seed, cases, passed, failures }
    }
}

fn small(rng: &mut ChaCha8Rng) -> FieldElem {
    let re = rng.gen_range(-3..=3);
    let im = if rng.gen_bool(0.25) { rng.gen_range(-2..=2) } else { 0 };
    let c = FieldElem::new(Rational::from_int(re), Rational::from_int(im));
    if c.is_zero() {
        FieldElem::one()
    } else {
        c
    }
}

/// A combination of one or two basis keys of V_coset with weight below
/// min weight + `levels`.
fn random_state(rng: &mut ChaCha8Rng, coset: CosetLabel, levels: i64) -> FockState {
    let wt = &coset.min_weight() + &Rational::from_int(rng.gen_range(0..levels));
    let keys = graded_keys(coset, &wt);
    let mut s = FockState::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let k = keys.choose(rng).expect("nonempty graded piece").clone();
        s.add_term(k, &small(rng));
    }
    if s.is_zero() {
        s.add_term(keys[0].clone(), &FieldElem::one());
    }
    s
}

fn random_coset(rng: &mut ChaCha8Rng) -> CosetLabel {
    *CosetLabel::all().choose(rng).expect("cosets")
}

/// u, v ∈ V_L (a basis combination or a generator of V_L^τ) and w in a
/// random coset module; both sides of the Borcherds identity for
/// l, m, n ∈ [−2, 2].
pub fn borcherds_suite(seed: u64, cases: usize) -> PropertyReport {
    let gens = [&named().w1, &named().w2, &named().j, &named().k, &named().p];
    let pick = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.3) {
            (*gens.choose(rng).expect("generators")).clone()
        } else {
            random_state(rng, CosetLabel::ZERO, 3)
        }
    };
    PropertyReport::run("borcherds", seed, cases, |rng| {
        let u = pick(rng);
        let v = pick(rng);
        let c = random_coset(rng);
        let w = random_state(rng, c, 2);
        let (l, m, n) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let (a, b) = borcherds_sides(&u, &v, &w, l, m, n);
        if a == b {
            Ok(())
        } else {
            Err(format!("l={l} m={m} n={n} u={u} v={v} w={w}"))
        }
    })
}

/// g(u_n w) = (gu)_n (gw) for g ∈ {τ, σ}, u ∈ V_L, w in a random coset.
pub fn equivariance_suite(seed: u64, cases: usize) -> PropertyReport {
    PropertyReport::run("automorphism equivariance", seed, cases, |rng| {
        let g = if rng.gen_bool(0.5) { Isometry::TAU } else { Isometry::SIGMA };
        let u = random_state(rng, CosetLabel::ZERO, 3);
        let c = random_coset(rng);
        let w = random_state(rng, c, 2);
        let n = rng.gen_range(-3..=2);
        let lhs = mode_apply(&u, n, &w).apply_isometry(&g);
        let rhs = mode_apply(&u.apply_isometry(&g), n, &w.apply_isometry(&g));
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("{} n={n} u={u} w={w}", g.name))
        }
    })
}

/// Homogeneous states of V_L^τ of weight 2 and 3, as random combinations.
fn fixed_point_state(rng: &mut ChaCha8Rng, weight: i64) -> FockState {
    let n = named();
    let omega = n.w1.plus(&n.w2);
    let pool: Vec<FockState> = match weight {
        2 => vec![n.w1.clone(), n.w2.clone(), n.p.clone()],
        _ => vec![
            n.j.clone(),
            n.k.clone(),
            n.jp.clone(),
            n.kp.clone(),
            mode_apply(&omega, 0, &n.w1),
            mode_apply(&omega, 0, &n.w2),
            mode_apply(&omega, 0, &n.p),
        ],
    };
    let mut s = FockState::zero();
    for x in &pool {
        if rng.gen_bool(0.6) {
            s.add_scaled(x, &small(rng));
        }
    }
    if s.is_zero() {
        s = pool.choose(rng).expect("pool").clone();
    }
    s
}

/// ψ vanishes on O(V) for the one-dimensional cards: ψ(u∘v) = 0 with
/// wt u + wt v ≤ 5, and ψ(L(−1)x + L(0)x) = 0 with x = u_{−k}v.
pub fn o_annihilation_suite(cards: &[Card], seed: u64, cases: usize) -> PropertyReport {
    let one_dim: Vec<&Card> = cards.iter().filter(|c| c.dim == 1).collect();
    let omega = named().w1.plus(&named().w2);
    let vacuum = FockState::vacuum();
    PropertyReport::run("O(V) annihilation", seed, cases, |rng| {
        let card = *one_dim.choose(rng).ok_or("no one-dimensional cards")?;
        let wu = rng.gen_range(2..=3);
        let u = fixed_point_state(rng, wu);
        let (what, x) = if rng.gen_bool(0.75) {
            let v = match rng.gen_range(0..=5 - wu) {
                0 | 1 => vacuum.clone(),
                2 => fixed_point_state(rng, 2),
                _ => fixed_point_state(rng, 3),
            };
            (format!("u∘v, u={u}, v={v}"), circ(&u, &v))
        } else {
            let v = if wu == 2 && rng.gen_bool(0.5) { fixed_point_state(rng, 2) } else { vacuum.clone() };
            let k = rng.gen_range(1..=2);
            let y = mode_apply(&u, -k, &v);
            let x = mode_apply(&omega, 0, &y).plus(&mode_apply(&omega, 1, &y));
            (format!("(L(-1)+L(0))u_(-{k})v, u={u}, v={v}"), x)
        };
        match card_scalar(card, &x) {
            Ok(s) if s.is_zero() => Ok(()),
            Ok(s) => Err(format!("{}: {what} gives {s}", card.name)),
            Err(e) => Err(format!("{}: {what}: {e}", card.name)),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::builtin_cards;

    #[test]
    fn small_runs_pass() {
        assert!(borcherds_suite(1, 10).ok());
        assert!(equivariance_suite(1, 10).ok());
        let r = o_annihilation_suite(&builtin_cards(), 1, 10);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn corrupted_card_detected() {
        let mut cards: Vec<Card> = builtin_cards().into_iter().filter(|c| c.name == "V_L(1)").collect();
        let m = cards[0].matrices.get_mut("W1").unwrap();
        m.rows[0][0] = &m.rows[0][0] + &FieldElem::one();
        assert!(!o_annihilation_suite(&cards, 3, 20).ok());
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = serde_json::to_string(&borcherds_suite(7, 5)).unwrap();
        let b = serde_json::to_string(&borcherds_suite(7, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_automorphism_detected() {
        // β₁ ↦ β₁, β₂ ↦ −β₂ is not an isometry, so equivariance must fail somewhere.
        let g = Isometry { name: "bad", cols: [[1, 0], [0, -1]] };
        let u = FockState::exp(crate::lattice::LatticeVec::BETA1);
        let w = FockState::exp(crate::lattice::LatticeVec::BETA2);
        let lhs = mode_apply(&u, -1, &w).apply_isometry(&g);
        let rhs = mode_apply(&u.apply_isometry(&g), -1, &w.apply_isometry(&g));
        assert_ne!(lhs, rhs);
    }
}
