//! Exact sparse linear algebra over Q(√−3).

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::field::FieldElem;

pub type SparseVec<K> = BTreeMap<K, FieldElem>;

struct Row<K> {
    vec: SparseVec<K>,
    /// This row as a combination of the inserted labels.
    combo: BTreeMap<usize, FieldElem>,
}

/// Incremental echelon form. Each row is normalized so that its largest key
/// (the pivot) has coefficient 1.
pub struct SpanSolver<K: Ord + Clone + Hash> {
    rows: Vec<Row<K>>,
    pivots: HashMap<K, usize>,
}

impl<K: Ord + Clone + Hash> Default for SpanSolver<K> {
    fn default() -> Self {
        SpanSolver { rows: Vec::new(), pivots: HashMap::new() }
    }
}

fn axpy<K: Ord + Clone>(dst: &mut SparseVec<K>, src: &SparseVec<K>, c: &FieldElem) {
    for (k, v) in src {
        let t = v * c;
        match dst.get_mut(k) {
            Some(x) => {
                *x += &t;
                if x.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    dst.insert(k.clone(), t);
                }
            }
        }
    }
}

impl<K: Ord + Clone + Hash> SpanSolver<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the rows; returns the residual and the row multipliers used.
    fn reduce(&self, mut v: SparseVec<K>) -> (SparseVec<K>, BTreeMap<usize, FieldElem>) {
        let mut used: BTreeMap<usize, FieldElem> = BTreeMap::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.iter().next_back(),
                Some(c) => v.range(..c.clone()).next_back(),
            };
            let Some((k, c)) = next else { break };
            let (k, c) = (k.clone(), c.clone());
            if let Some(&r) = self.pivots.get(&k) {
                axpy(&mut v, &self.rows[r].vec, &(-&c));
                let e = used.entry(r).or_default();
                *e += &c;
            }
            cursor = Some(k);
        }
        (v, used)
    }

    fn combo_of(&self, used: &BTreeMap<usize, FieldElem>) -> BTreeMap<usize, FieldElem> {
        let mut out: BTreeMap<usize, FieldElem> = BTreeMap::new();
        for (r, c) in used {
            for (label, d) in &self.rows[*r].combo {
                let e = out.entry(*label).or_default();
                *e += &(c * d);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Adds `v` (tagged `label`) if it is independent and returns `None`;
    /// otherwise returns its coordinates in the previously accepted labels.
    pub fn insert(&mut self, v: SparseVec<K>, label: usize) -> Option<BTreeMap<usize, FieldElem>> {
        let (res, used) = self.reduce(v);
        if res.is_empty() {
            return Some(self.combo_of(&used));
        }
        let (pk, pc) = res.iter().next_back().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let inv = pc.inv().unwrap();
        let mut combo = self.combo_of(&used);
        for c in combo.values_mut() {
            *c = -(&*c * &inv);
        }
        combo.insert(label, inv.clone());
        let vec: SparseVec<K> = res.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        self.pivots.insert(pk, self.rows.len());
        self.rows.push(Row { vec, combo });
        None
    }

    /// Coordinates of `v` in the accepted labels, or `None` if outside the span.
    pub fn express(&self, v: SparseVec<K>) -> Option<BTreeMap<usize, FieldElem>> {
        let (res, used) = self.reduce(v);
        if res.is_empty() {
            Some(self.combo_of(&used))
        } else {
            None
        }
    }

    pub fn contains(&self, v: SparseVec<K>) -> bool {
        self.reduce(v).0.is_empty()
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone + Hash>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> usize {
    let mut s = SpanSolver::new();
    for (i, v) in vectors.into_iter().enumerate() {
        s.insert(v, i);
    }
    s.rank()
}

/// A basis of the linear relations Σⱼ cⱼ·vⱼ = 0 among the given vectors.
pub fn relations<K: Ord + Clone + Hash>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> Vec<BTreeMap<usize, FieldElem>> {
    let mut s = SpanSolver::new();
    let mut out = Vec::new();
    for (j, v) in vectors.into_iter().enumerate() {
        if let Some(mut combo) = s.insert(v, j) {
            for c in combo.values_mut() {
                *c = -c.clone();
            }
            combo.insert(j, FieldElem::one());
            out.push(combo);
        }
    }
    out
}

/// A dense matrix over Q(√−3); `rows[i][j]` is the (i, j) entry.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Matrix {
    pub rows: Vec<Vec<FieldElem>>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { rows: vec![vec![FieldElem::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i][i] = FieldElem::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &FieldElem) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = FieldElem::zero();
                for k in 0..n {
                    acc += &(&self.rows[i][k] * &o.rows[k][j]);
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        let n = self.dim();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.rows[i][j] += &o.rows[i][j];
            }
        }
        out
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.add(&o.scale(&FieldElem::int(-1)))
    }

    pub fn scale(&self, c: &FieldElem) -> Matrix {
        Matrix { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// The scalar c if this matrix is c·I.
    pub fn as_scalar(&self) -> Option<FieldElem> {
        let c = self.rows.first()?.first()?.clone();
        (*self == Matrix::scalar(self.dim(), &c)).then_some(c)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.rows[i][j].is_zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, FieldElem::int(c))).collect()
    }

    #[test]
    fn express_in_span() {
        let mut s = SpanSolver::new();
        assert!(s.insert(sv(&[(0, 1)]), 0).is_none());
        let c = s.express(sv(&[(0, 2)])).unwrap();
        assert_eq!(c[&0], FieldElem::int(2));
        assert!(s.express(sv(&[(1, 1)])).is_none());
    }

    #[test]
    fn dependent_insert_reports_combination() {
        let mut s = SpanSolver::new();
        s.insert(sv(&[(0, 1), (1, 1)]), 0);
        s.insert(sv(&[(1, 1), (2, 1)]), 1);
        let c = s.insert(sv(&[(0, 1), (1, 2), (2, 1)]), 2).unwrap();
        assert_eq!(c[&0], FieldElem::one());
        assert_eq!(c[&1], FieldElem::one());
        assert_eq!(s.rank(), 2);
        assert_eq!(rank(vec![sv(&[(0, 1)]), sv(&[(0, 3)]), sv(&[(5, 1)])]), 2);
        let rel = relations(vec![sv(&[(0, 1)]), sv(&[(0, 3)]), sv(&[(5, 1)])]);
        assert_eq!(rel.len(), 1);
        assert_eq!(rel[0][&0], FieldElem::int(-3));
    }

    #[test]
    fn matrices() {
        let a = Matrix { rows: vec![vec![FieldElem::zero(), FieldElem::one()], vec![FieldElem::int(-1), FieldElem::zero()]] };
        assert_eq!(a.mul(&a), Matrix::scalar(2, &FieldElem::int(-1)));
        assert_eq!(a.mul(&a).as_scalar(), Some(FieldElem::int(-1)));
        assert!(a.as_scalar().is_none());
    }
}
