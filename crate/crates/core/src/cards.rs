//! Evaluation cards: the action of the zero modes of ω̃¹, ω̃², J, K, P, J₁P
//! and K₁P on the top level of each irreducible V_L^τ-module.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{by_name, top_vectors};
use crate::field::FieldElem;
use crate::fock::{FockState, Key};
use crate::lattice::{CosetLabel, Isometry};
use crate::linalg::{Matrix, SpanSolver};
use crate::vertex::mode_apply;

pub const CARDS_JSON: &str = include_str!("../data/cards.json");

/// Generator order used throughout: o(ω̃¹), o(ω̃²), o(J), o(K), o(P), o(J₁P), o(K₁P).
pub const GENERATORS: [&str; 7] = ["W1", "W2", "J", "K", "P", "JP", "KP"];

/// The zero-mode index wt(u) − 1 of each generator.
pub fn zero_mode(g: &str) -> i64 {
    match g {
        "W1" | "W2" | "P" => 1,
        _ => 2,
    }
}

/// Generators that change sign under the lift of σ.
pub fn sigma_odd(g: &str) -> bool {
    matches!(g, "J" | "K" | "JP" | "KP")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Card {
    pub name: String,
    pub kind: String,
    pub isometry: String,
    /// Catalog name of the top vectors (untwisted modules only).
    pub top: Option<String>,
    pub dim: usize,
    /// (first factor, second factor) module labels for each top basis vector.
    pub quadruplets: Vec<[String; 2]>,
    /// Column i is the image of top basis vector i.
    pub matrices: BTreeMap<String, Matrix>,
    pub sigma: String,
    pub coset: Option<String>,
    pub tau_eigen: Option<i64>,
}

impl Card {
    pub fn matrix(&self, g: &str) -> &Matrix {
        &self.matrices[g]
    }

    /// The scalar of a generator on a one-dimensional card.
    pub fn scalar(&self, g: &str) -> FieldElem {
        self.matrices[g].rows[0][0].clone()
    }

    pub fn is_twisted(&self) -> bool {
        self.kind == "twisted"
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CardFile {
    pub schema: u32,
    pub generators: Vec<String>,
    pub convention: String,
    pub cards: Vec<Card>,
}

#[derive(Debug, thiserror::Error)]
pub enum CardError {
    #[error("card data: {0}")]
    Json(#[from] serde_json::Error),
    #[error("card {0}: {1}")]
    Invalid(String, String),
}

pub fn parse_cards(text: &str) -> Result<Vec<Card>, CardError> {
    let file: CardFile = serde_json::from_str(text)?;
    for c in &file.cards {
        if c.quadruplets.len() != c.dim {
            return Err(CardError::Invalid(c.name.clone(), "quadruplet count differs from dim".into()));
        }
        for g in GENERATORS {
            let m = c.matrices.get(g).ok_or_else(|| CardError::Invalid(c.name.clone(), format!("missing {g}")))?;
            if m.dim() != c.dim || m.rows.iter().any(|r| r.len() != c.dim) {
                return Err(CardError::Invalid(c.name.clone(), format!("{g} has wrong shape")));
            }
        }
    }
    Ok(file.cards)
}

pub fn builtin_cards() -> Vec<Card> {
    parse_cards(CARDS_JSON).expect("builtin card data is valid")
}

/// Result of recomputing an untwisted card from its top vectors.
#[derive(Clone, Debug, Serialize)]
pub struct TopCheck {
    pub card: String,
    pub coset_ok: bool,
    pub tau_ok: bool,
    pub lowest: bool,
    pub mismatches: Vec<String>,
}

impl TopCheck {
    pub fn ok(&self) -> bool {
        self.coset_ok && self.tau_ok && self.lowest && self.mismatches.is_empty()
    }
}

fn sparse(s: &FockState) -> BTreeMap<Key, FieldElem> {
    s.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect()
}

/// The matrix of o(u) on the span of `tops`, or `None` if the span is not stable.
pub fn action_matrix(u: &FockState, mode: i64, tops: &[FockState]) -> Option<Matrix> {
    let mut solver: SpanSolver<Key> = SpanSolver::new();
    for (i, t) in tops.iter().enumerate() {
        solver.insert(sparse(t), i);
    }
    let n = tops.len();
    let mut m = Matrix::zeros(n);
    for (j, t) in tops.iter().enumerate() {
        let img = mode_apply(u, mode, t);
        let coords = solver.express(sparse(&img))?;
        for (i, c) in coords {
            m.rows[i][j] = c;
        }
    }
    Some(m)
}

/// Recomputes an untwisted card from the top vectors in the catalog.
pub fn check_untwisted(card: &Card) -> Option<TopCheck> {
    let tops = top_vectors(card.top.as_deref()?)?;
    let coset_ok = match &card.coset {
        Some(label) => {
            let want: Option<CosetLabel> = label.parse().ok();
            tops.iter().all(|t| {
                let cs = t.cosets();
                let expect = want.map(|w| match w.klein {
                    // V_{L^(c,j)} also carries the a and b cosets, which τ permutes.
                    crate::lattice::Klein::C => cs.iter().all(|c| c.ternary == w.ternary),
                    _ => cs == vec![w],
                });
                expect.unwrap_or(false)
            })
        }
        None => false,
    };
    let tau_ok = match card.tau_eigen {
        Some(e) => tops.iter().all(|t| t.apply_isometry(&Isometry::TAU) == t.scaled(&FieldElem::xi_pow(e))),
        None => true,
    };
    let mut mismatches = Vec::new();
    let mut lowest = true;
    for g in GENERATORS {
        let u = by_name(g).expect("generator");
        let mode = zero_mode(g);
        match action_matrix(&u, mode, &tops) {
            Some(m) if &m == card.matrix(g) => {}
            Some(m) => mismatches.push(format!("{g}: computed {:?}", m.rows)),
            None => mismatches.push(format!("{g}: top level not stable")),
        }
        lowest &= tops.iter().all(|t| mode_apply(&u, mode + 1, t).is_zero());
    }
    Some(TopCheck { card: card.name.clone(), coset_ok, tau_ok, lowest, mismatches })
}

/// Checks every untwisted card in the list.
pub fn verify_untwisted(cards: &[Card]) -> Vec<TopCheck> {
    cards.iter().filter(|c| !c.is_twisted()).filter_map(check_untwisted).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_roster() {
        let cards = builtin_cards();
        assert_eq!(cards.len(), 30);
        assert_eq!(cards.iter().filter(|c| c.dim == 1).count(), 23);
        assert_eq!(cards.iter().filter(|c| c.dim == 2).count(), 7);
    }

    #[test]
    fn untwisted_tables_recompute() {
        let cards = builtin_cards();
        let checks = verify_untwisted(&cards);
        assert_eq!(checks.len(), 12);
        for c in &checks {
            assert!(c.ok(), "{:?}", c);
        }
    }
}
