//! Classification of simple V_L^τ-modules through A(V_L^τ): the 60 candidate
//! quadruplets (a₁, a₂, b₁, b₂), exact solution of the scalar system for
//! (x₁, x₂, x₃), matching against the module cards, the dimension of the Zhu
//! algebra, and the σ-permutation of the modules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cards::{action_matrix, sigma_odd, Card, GENERATORS};
use crate::catalog::named;
use crate::field::FieldElem;
use crate::fock::{graded_basis, FockState};
use crate::groebner::{solve, SolutionSet};
use crate::lattice::{CosetLabel, Klein};
use crate::linalg::{rank, relations, Matrix};
use crate::poly::{Poly, Var};
use crate::rational::Rational;
use crate::zhu::ScalarSystem;

pub const QUADRUPLETS_JSON: &str = include_str!("../data/quadruplets.json");

/// Where the value of b₁ comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum B1Source {
    /// Recomputed here from the vertex operators.
    Computed,
    /// Transcribed twisted-module data.
    Tabulated,
    /// Unknown; solved for.
    Symbolic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quadruplet {
    /// M for M¹⊗M², W for W¹⊗W².
    pub kind: String,
    pub first: String,
    pub second: String,
    pub a1: FieldElem,
    pub b1: Option<FieldElem>,
    pub b1_source: B1Source,
    pub a2: FieldElem,
    pub b2: FieldElem,
}

impl Quadruplet {
    pub fn label(&self) -> String {
        format!("{} ⊗ {}", self.first, self.second)
    }
}

#[derive(Deserialize)]
struct Roster {
    quadruplets: Vec<Quadruplet>,
}

pub fn parse_quadruplets(text: &str) -> Result<Vec<Quadruplet>, serde_json::Error> {
    Ok(serde_json::from_str::<Roster>(text)?.quadruplets)
}

/// Top level of an untwisted M(0)-module from the vertex operators: the
/// lowest-weight part of {v : (ω̃²)₁v = h·v} in a coset (and τ-eigenspace).
#[derive(Clone, Debug, Serialize)]
pub struct FirstFactorTop {
    pub label: String,
    pub weight: Rational,
    pub dim: usize,
    pub a1: FieldElem,
    /// Eigenvalue of J₂ when it acts as a scalar.
    pub b1: Option<FieldElem>,
}

fn first_factor_setup(label: &str) -> Option<(CosetLabel, Option<i64>, FieldElem)> {
    let h0 = FieldElem::zero();
    let h1 = FieldElem::frac(2, 5);
    let c = CosetLabel { klein: Klein::C, ternary: 0 };
    let eps = |s: &str| s.parse::<i64>().ok();
    Some(match label {
        "Mk^c" => (c, None, h0),
        "Wk^c" => (c, None, h1),
        _ => {
            let inner = label.get(2..label.len() - 1)?;
            match &label[..2] {
                "M(" => (CosetLabel::ZERO, Some(eps(inner)?), h0),
                "W(" => (CosetLabel::ZERO, Some(eps(inner)?), h1),
                _ => return None,
            }
        }
    })
}

/// Computes (a₁, b₁) for M(ε), W(ε), M_k^c or W_k^c.
pub fn first_factor_top(label: &str) -> Option<FirstFactorTop> {
    let (coset, eigen, h) = first_factor_setup(label)?;
    let w2 = &named().w2;
    for step in 0..=18 {
        let wt = Rational::new(step, 6);
        let basis = graded_basis(coset, &wt, eigen);
        if basis.is_empty() {
            continue;
        }
        let m = action_matrix(w2, 1, &basis)?;
        let shifted = m.sub(&Matrix::scalar(basis.len(), &h));
        let cols = (0..basis.len()).map(|j| (0..basis.len()).map(|i| (i, shifted.rows[i][j].clone())).filter(|(_, c)| !c.is_zero()).collect());
        let kernel = relations(cols);
        if kernel.is_empty() {
            continue;
        }
        let tops: Vec<FockState> = kernel
            .iter()
            .map(|combo| {
                let mut s = FockState::zero();
                for (i, c) in combo {
                    s.add_scaled(&basis[*i], c);
                }
                s
            })
            .collect();
        let b1 = action_matrix(&named().j, 2, &tops).and_then(|m| m.as_scalar());
        let a1 = &FieldElem::from(wt.clone()) - &h;
        return Some(FirstFactorTop { label: label.to_string(), weight: wt, dim: tops.len(), a1, b1 });
    }
    None
}

/// A quadruplet with its computed entries filled in and checked.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedQuadruplet {
    pub quadruplet: Quadruplet,
    /// For computed entries: whether the recomputed a₁ agrees with the roster.
    pub a1_ok: bool,
}

/// The 60 quadruplets with every `computed` (a₁, b₁) recomputed.
pub fn enumerate_quadruplets(roster: &[Quadruplet]) -> Vec<ResolvedQuadruplet> {
    let mut tops: BTreeMap<String, Option<FirstFactorTop>> = BTreeMap::new();
    roster
        .iter()
        .map(|q| {
            let mut q = q.clone();
            let mut a1_ok = true;
            if q.b1_source == B1Source::Computed {
                let top = tops.entry(q.first.clone()).or_insert_with(|| first_factor_top(&q.first)).clone();
                match top {
                    Some(t) if t.dim == 1 && t.b1.is_some() => {
                        a1_ok = t.a1 == q.a1;
                        if q.b1.as_ref().is_some_and(|b| Some(b) != t.b1.as_ref()) {
                            a1_ok = false;
                        }
                        q.b1 = t.b1;
                    }
                    _ => a1_ok = false,
                }
            }
            ResolvedQuadruplet { quadruplet: q, a1_ok }
        })
        .collect()
}

/// The system for (x₁, x₂, x₃) (and b₁ when symbolic) at a quadruplet.
pub fn specialize(system: &ScalarSystem, q: &Quadruplet) -> (Vec<Poly>, Vec<Var>) {
    let mut vals = vec![(Var::A1, q.a1.clone()), (Var::A2, q.a2.clone()), (Var::B2, q.b2.clone())];
    let mut vars = vec![Var::X1, Var::X2, Var::X3];
    match &q.b1 {
        Some(b) => vals.push((Var::B1, b.clone())),
        None => vars.insert(0, Var::B1),
    }
    let polys = system.relations.iter().map(|(_, p)| p.eval(&vals)).collect();
    (polys, vars)
}

/// Solves the scalar system at one quadruplet.
pub fn solve_system(system: &ScalarSystem, q: &Quadruplet) -> SolutionSet {
    let (polys, vars) = specialize(system, q);
    solve(&polys, &vars)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadrupletOutcome {
    pub label: String,
    pub kind: String,
    pub a1: String,
    pub a2: String,
    pub b1: String,
    pub b2: String,
    pub b1_source: B1Source,
    pub a1_ok: bool,
    /// The unique (x₁, x₂, x₃), if any.
    pub solution: Option<[String; 3]>,
    pub rejected: bool,
    /// Solutions exist but are not a single point in Q(√−3).
    pub ambiguous: bool,
    pub card: Option<String>,
    pub card_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub outcomes: Vec<QuadrupletOutcome>,
    pub solvable: usize,
    pub rejected: usize,
    pub symbolic_rejected: usize,
    pub symbolic_total: usize,
    pub one_dim_cards: usize,
    pub two_dim_cards: usize,
    pub total_modules: usize,
    /// Every one-dimensional card is hit by exactly one survivor.
    pub cards_covered: bool,
}

impl ClassificationReport {
    pub fn ok(&self) -> bool {
        self.solvable == 23
            && self.rejected == 37
            && self.symbolic_rejected == self.symbolic_total
            && self.total_modules == 30
            && self.cards_covered
            && self.outcomes.iter().all(|o| o.a1_ok && !o.ambiguous && (o.rejected || o.card_matches))
    }
}

fn card_scalars(card: &Card) -> [FieldElem; 7] {
    GENERATORS.map(|g| card.scalar(g))
}

/// Runs the classification over the roster.
pub fn classify_all(system: &ScalarSystem, roster: &[Quadruplet], cards: &[Card]) -> ClassificationReport {
    let resolved = enumerate_quadruplets(roster);
    let mut outcomes = Vec::new();
    let mut hits: BTreeMap<String, usize> = BTreeMap::new();
    for r in &resolved {
        let q = &r.quadruplet;
        let sol = solve_system(system, q);
        let unique = sol.unique().map(|p| {
            let n = p.len();
            [p[n - 3].clone(), p[n - 2].clone(), p[n - 1].clone()]
        });
        let card = cards.iter().find(|c| c.dim == 1 && c.quadruplets[0] == [q.first.clone(), q.second.clone()]);
        let card_matches = match (&unique, card, &q.b1) {
            (Some(x), Some(c), Some(b1)) => {
                let want = [q.a1.clone(), q.a2.clone(), b1.clone(), q.b2.clone(), x[0].clone(), x[1].clone(), x[2].clone()];
                card_scalars(c) == want
            }
            _ => false,
        };
        if let (Some(_), Some(c)) = (&unique, card) {
            *hits.entry(c.name.clone()).or_default() += 1;
        }
        let show = |x: &FieldElem| x.to_string();
        outcomes.push(QuadrupletOutcome {
            label: q.label(),
            kind: q.kind.clone(),
            a1: show(&q.a1),
            a2: show(&q.a2),
            b1: q.b1.as_ref().map(show).unwrap_or_else(|| "b1".into()),
            b2: show(&q.b2),
            b1_source: q.b1_source,
            a1_ok: r.a1_ok,
            solution: unique.map(|x| x.map(|v| v.to_string())),
            rejected: sol.inconsistent,
            ambiguous: !sol.inconsistent && sol.unique().is_none(),
            card: card.filter(|_| sol.unique().is_some()).map(|c| c.name.clone()),
            card_matches,
        });
    }
    let solvable = outcomes.iter().filter(|o| o.solution.is_some()).count();
    let rejected = outcomes.iter().filter(|o| o.rejected).count();
    let symbolic: Vec<&QuadrupletOutcome> = outcomes.iter().filter(|o| o.b1_source == B1Source::Symbolic).collect();
    let one_dim_cards = cards.iter().filter(|c| c.dim == 1).count();
    let two_dim_cards = cards.iter().filter(|c| c.dim == 2).count();
    let cards_covered = cards.iter().filter(|c| c.dim == 1).all(|c| hits.get(&c.name) == Some(&1));
    ClassificationReport {
        solvable,
        rejected,
        symbolic_rejected: symbolic.iter().filter(|o| o.rejected).count(),
        symbolic_total: symbolic.len(),
        one_dim_cards,
        two_dim_cards,
        total_modules: solvable + two_dim_cards,
        cards_covered,
        outcomes,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZhuStructure {
    pub dimension: usize,
    pub one_dim_blocks: usize,
    pub two_dim_blocks: Vec<String>,
    /// Each card's generators span the full matrix algebra of its top level.
    pub blocks_simple: bool,
}

/// All products of the generator matrices of length at most `len`.
fn words_in(mats: &[Matrix], len: usize) -> Vec<Matrix> {
    let n = mats[0].dim();
    let mut layer = vec![Matrix::identity(n)];
    let mut all = layer.clone();
    for _ in 0..len {
        layer = layer.iter().flat_map(|w| mats.iter().map(move |m| w.mul(m))).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn generated_dim(card: &Card) -> usize {
    let mats: Vec<Matrix> = GENERATORS.iter().map(|g| card.matrix(g).clone()).collect();
    let n = card.dim;
    rank(words_in(&mats, n).iter().map(|m| {
        let mut v = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if !m.rows[i][j].is_zero() {
                    v.insert(i * n + j, m.rows[i][j].clone());
                }
            }
        }
        v
    }))
}

/// A(V_L^τ) ≅ ⊕ End(top level) over the 30 modules.
pub fn zhu_algebra_structure(cards: &[Card]) -> ZhuStructure {
    ZhuStructure {
        dimension: cards.iter().map(|c| c.dim * c.dim).sum(),
        one_dim_blocks: cards.iter().filter(|c| c.dim == 1).count(),
        two_dim_blocks: cards.iter().filter(|c| c.dim == 2).map(|c| c.name.clone()).collect(),
        blocks_simple: cards.iter().all(|c| generated_dim(c) == c.dim * c.dim),
    }
}

/// The σ-image predicted from module names: V_L(1) ↔ V_L(2),
/// V_{L^(0,1)}(ε) ↔ V_{L^(0,2)}(2ε), V_{L^(c,1)} ↔ V_{L^(c,2)},
/// twisted (τ, χ_j) ↔ (τ², χ'_j) with the same ε; the rest are fixed.
pub fn sigma_by_name(name: &str) -> String {
    let swap12 = |c: char| match c {
        '1' => '2',
        '2' => '1',
        x => x,
    };
    if let Some(e) = name.strip_prefix("V_L(").and_then(|s| s.strip_suffix(')')) {
        return format!("V_L({})", e.chars().map(swap12).collect::<String>());
    }
    if let Some(rest) = name.strip_prefix("V_L^(0,") {
        // "j)(e)"
        let j = rest.chars().next().unwrap();
        let e = rest.chars().nth(3).unwrap();
        return format!("V_L^(0,{})({})", swap12(j), swap12(e));
    }
    if let Some(rest) = name.strip_prefix("V_L^(c,") {
        let j = rest.chars().next().unwrap();
        return format!("V_L^(c,{})", swap12(j));
    }
    if let Some(rest) = name.strip_prefix("V_L^T'") {
        return format!("V_L^T{}", rest.replace("(tau2)", "(tau)"));
    }
    if let Some(rest) = name.strip_prefix("V_L^T") {
        return format!("V_L^T'{}", rest.replace("(tau)", "(tau2)"));
    }
    name.to_string()
}

/// Traces of all generator words of length ≤ 3: a complete invariant of a
/// semisimple representation of the top level.
fn trace_signature(mats: &[Matrix]) -> Vec<FieldElem> {
    words_in(mats, 3)
        .iter()
        .map(|m| {
            let mut t = FieldElem::zero();
            for i in 0..m.dim() {
                t += &m.rows[i][i];
            }
            t
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaPair {
    pub card: String,
    /// Cards whose data equals the sign-flipped data of this card.
    pub computed: Vec<String>,
    pub expected: String,
    pub recorded: String,
}

impl SigmaPair {
    pub fn ok(&self) -> bool {
        self.computed == [self.expected.clone()] && self.recorded == self.expected
    }
}

/// Applies (b₁, b₂, x₂, x₃) ↦ (−b₁, −b₂, −x₂, −x₃) to each card and finds the
/// card it lands on.
pub fn sigma_permutation_check(cards: &[Card]) -> Vec<SigmaPair> {
    let mats = |c: &Card, flip: bool| -> Vec<Matrix> {
        GENERATORS
            .iter()
            .map(|g| {
                let m = c.matrix(g).clone();
                if flip && sigma_odd(g) {
                    m.scale(&FieldElem::int(-1))
                } else {
                    m
                }
            })
            .collect()
    };
    let sigs: Vec<(usize, Vec<FieldElem>)> = cards.iter().map(|c| (c.dim, trace_signature(&mats(c, false)))).collect();
    cards
        .iter()
        .map(|c| {
            let flipped = (c.dim, trace_signature(&mats(c, true)));
            let computed = cards.iter().zip(&sigs).filter(|(_, s)| **s == flipped).map(|(d, _)| d.name.clone()).collect();
            SigmaPair { card: c.name.clone(), computed, expected: sigma_by_name(&c.name), recorded: c.sigma.clone() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::builtin_cards;
    use crate::zhu::{derive_scalar_system, ExpansionTable};

    fn roster() -> Vec<Quadruplet> {
        parse_quadruplets(QUADRUPLETS_JSON).unwrap()
    }

    #[test]
    fn roster_shape() {
        let r = roster();
        assert_eq!(r.len(), 60);
        assert_eq!(r.iter().filter(|q| q.kind == "M").count(), 30);
        assert_eq!(r.iter().filter(|q| q.b1_source == B1Source::Symbolic).count(), 6);
        for q in &r {
            let allowed = if q.kind == "M" { ["0", "2/3"] } else { ["2/5", "1/15"] };
            assert!(allowed.contains(&q.a2.to_string().as_str()), "{}", q.label());
        }
    }

    #[test]
    fn untwisted_first_factors() {
        let t = first_factor_top("W(1)").unwrap();
        assert_eq!((t.a1.clone(), t.dim), (FieldElem::frac(3, 5), 1));
        assert_eq!(t.b1, Some(FieldElem::new(0.into(), 2.into())));
        let m = first_factor_top("M(0)").unwrap();
        assert_eq!((m.a1, m.b1), (FieldElem::zero(), Some(FieldElem::zero())));
        let k = first_factor_top("Wk^c").unwrap();
        assert_eq!(k.a1, FieldElem::frac(1, 10));
    }

    #[test]
    fn sample_systems() {
        let sys = derive_scalar_system(ExpansionTable::builtin()).unwrap();
        let r = roster();
        let zero = r.iter().find(|q| q.first == "M(0)" && q.second == "Mt^0").unwrap();
        assert_eq!(solve_system(&sys, zero).unique(), Some(&vec![FieldElem::zero(); 3]));
        let mut w1 = r.iter().find(|q| q.first == "W(1)" && q.second == "Wt^0").unwrap().clone();
        w1.b1 = Some(FieldElem::new(0.into(), 2.into()));
        let want = vec![FieldElem::zero(), FieldElem::zero(), FieldElem::new(0.into(), (-12).into())];
        assert_eq!(solve_system(&sys, &w1).unique(), Some(&want));
    }

    #[test]
    fn sigma_names() {
        assert_eq!(sigma_by_name("V_L^(0,1)(1)"), "V_L^(0,2)(2)");
        assert_eq!(sigma_by_name("V_L^T1(tau)(2)"), "V_L^T'1(tau2)(2)");
        assert_eq!(sigma_by_name("V_L^(c,0)"), "V_L^(c,0)");
        for p in sigma_permutation_check(&builtin_cards()) {
            assert!(p.ok(), "{:?}", p);
        }
    }

    #[test]
    fn structure_of_zhu_algebra() {
        let s = zhu_algebra_structure(&builtin_cards());
        assert_eq!((s.dimension, s.one_dim_blocks, s.two_dim_blocks.len()), (51, 23, 7));
        assert!(s.blocks_simple);
    }

    #[test]
    fn full_classification() {
        let sys = derive_scalar_system(ExpansionTable::builtin()).unwrap();
        let rep = classify_all(&sys, &roster(), &builtin_cards());
        for o in &rep.outcomes {
            if !(o.a1_ok && !o.ambiguous && (o.rejected || o.card_matches)) {
                eprintln!("{:?}", o);
            }
        }
        assert_eq!((rep.solvable, rep.rejected, rep.total_modules), (23, 37, 30));
        assert!(rep.ok());
    }
}
