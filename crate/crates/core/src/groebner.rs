//! Buchberger's algorithm over Q(√−3) in the lex order of [`Var`], and
//! exact point solving of zero-dimensional systems by back substitution.

use std::collections::BTreeSet;

use crate::field::FieldElem;
use crate::poly::{mono_degree, mono_div, mono_lcm, Mono, Poly, Var};

/// Leading monomial and coefficient (lex, a1 > a2 > … > y).
pub fn leading(p: &Poly) -> Option<(Mono, FieldElem)> {
    p.terms.iter().next_back().map(|(m, c)| (*m, c.clone()))
}

fn monic(p: &Poly) -> Poly {
    match leading(p) {
        Some((_, c)) => p.scale(&c.inv().expect("nonzero")),
        None => p.clone(),
    }
}

/// Full reduction of `p` modulo `basis`.
pub fn reduce(p: &Poly, basis: &[Poly]) -> Poly {
    let leads: Vec<(Mono, FieldElem)> = basis.iter().map(|g| leading(g).expect("nonzero basis element")).collect();
    let mut r = p.clone();
    let mut out = Poly::zero();
    while let Some((m, c)) = leading(&r) {
        match leads.iter().position(|(lm, _)| mono_div(&m, lm).is_some()) {
            Some(i) => {
                let (lm, lc) = &leads[i];
                let q = mono_div(&m, lm).unwrap();
                let f = -(&c / lc);
                r = r.add(&basis[i].mul_mono(&q, &f));
            }
            None => {
                out.add_term(m, &c);
                r.terms.remove(&m);
            }
        }
    }
    out
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (mf, cf) = leading(f).unwrap();
    let (mg, cg) = leading(g).unwrap();
    let l = mono_lcm(&mf, &mg);
    let a = f.mul_mono(&mono_div(&l, &mf).unwrap(), &cf.inv().unwrap());
    let b = g.mul_mono(&mono_div(&l, &mg).unwrap(), &cg.inv().unwrap());
    a.sub(&b)
}

fn coprime(a: &Mono, b: &Mono) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// The reduced Gröbner basis of the ideal generated by `polys`.
pub fn groebner(polys: &[Poly]) -> Vec<Poly> {
    let mut g: Vec<Poly> = Vec::new();
    for p in polys {
        let r = reduce(p, &g);
        if !r.is_zero() {
            g.push(monic(&r));
        }
    }
    if g.iter().any(|p| p.as_constant().is_some()) {
        return vec![Poly::one()];
    }
    // pairs ordered by total degree of the lcm, then lex
    let mut pairs: BTreeSet<(u32, Mono, usize, usize)> = BTreeSet::new();
    let lcm_of = |g: &[Poly], i: usize, j: usize| mono_lcm(&leading(&g[i]).unwrap().0, &leading(&g[j]).unwrap().0);
    for j in 0..g.len() {
        for i in 0..j {
            let l = lcm_of(&g, i, j);
            pairs.insert((mono_degree(&l), l, i, j));
        }
    }
    while let Some(pair) = pairs.pop_first() {
        let (_, _, i, j) = pair;
        let (mi, mj) = (leading(&g[i]).unwrap().0, leading(&g[j]).unwrap().0);
        if coprime(&mi, &mj) {
            continue;
        }
        let h = reduce(&s_poly(&g[i], &g[j]), &g);
        if h.is_zero() {
            continue;
        }
        if h.as_constant().is_some() {
            return vec![Poly::one()];
        }
        g.push(monic(&h));
        let n = g.len() - 1;
        for i in 0..n {
            let l = lcm_of(&g, i, n);
            pairs.insert((mono_degree(&l), l, i, n));
        }
    }
    // minimal, then reduced
    let mut minimal: Vec<Poly> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let lp = leading(p).unwrap().0;
        let redundant = g.iter().enumerate().any(|(j, q)| {
            let lq = leading(q).unwrap().0;
            j != i && mono_div(&lp, &lq).is_some() && (lp != lq || j < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out: Vec<Poly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            let (lm, lc) = leading(&minimal[i]).unwrap();
            let tail = reduce(&minimal[i].sub(&Poly::monomial(lm, lc.clone())), &others);
            monic(&Poly::monomial(lm, lc).add(&tail))
        })
        .collect();
    out.sort_by(|a, b| leading(a).unwrap().0.cmp(&leading(b).unwrap().0));
    out
}

pub fn is_unit_ideal(gb: &[Poly]) -> bool {
    gb.len() == 1 && gb[0].as_constant().is_some()
}

/// Dense univariate polynomial, lowest degree first.
type Dense = Vec<FieldElem>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn to_dense(p: &Poly, v: Var) -> Option<Dense> {
    let mut out = vec![FieldElem::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in &p.terms {
        if m.iter().enumerate().any(|(i, e)| i != v.index() && *e != 0) {
            return None;
        }
        out[m[v.index()] as usize] = c.clone();
    }
    Some(trim(out))
}

fn dense_rem(a: &Dense, b: &Dense) -> (Dense, Dense) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].inv().expect("nonzero");
    let mut q = vec![FieldElem::zero(); a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lb;
        for (i, bc) in b.iter().enumerate() {
            let t = &r[k + i] - &(&c * bc);
            r[k + i] = t;
        }
        q[k] = c;
        r = trim(r);
    }
    (q, r)
}

fn dense_gcd(a: &Dense, b: &Dense) -> Dense {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let (_, r) = dense_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Roots in Q(√−3) of a univariate polynomial; the flag is false when some
/// root could not be found in the field.
fn roots(p: &Dense) -> (Vec<FieldElem>, bool) {
    let deriv: Dense = p.iter().enumerate().skip(1).map(|(i, c)| c * &FieldElem::int(i as i64)).collect();
    let g = dense_gcd(p, &trim(deriv));
    let sf = if g.len() > 1 { trim(dense_rem(p, &g).0) } else { p.clone() };
    match sf.len() {
        0 | 1 => (Vec::new(), true),
        2 => (vec![-(&sf[0] / &sf[1])], true),
        3 => {
            let (c, b, a) = (&sf[0], &sf[1], &sf[2]);
            let disc = &(b * b) - &(&FieldElem::int(4) * &(a * c));
            match disc.sqrt() {
                Some(s) => {
                    let two_a = &FieldElem::int(2) * a;
                    let r1 = &(&-b.clone() + &s) / &two_a;
                    let r2 = &(&-b.clone() - &s) / &two_a;
                    (if r1 == r2 { vec![r1] } else { vec![r1, r2] }, true)
                }
                None => (Vec::new(), false),
            }
        }
        _ => (Vec::new(), false),
    }
}

/// Solutions of a polynomial system in the listed variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub vars: Vec<Var>,
    /// Points over Q(√−3), coordinates in `vars` order.
    pub points: Vec<Vec<FieldElem>>,
    /// The ideal is the unit ideal: no solution over any extension.
    pub inconsistent: bool,
    /// Some branch has infinitely many solutions.
    pub positive_dimensional: bool,
    /// Some roots lie outside Q(√−3) or were not isolated.
    pub incomplete: bool,
}

impl SolutionSet {
    pub fn unique(&self) -> Option<&Vec<FieldElem>> {
        (self.points.len() == 1 && !self.positive_dimensional && !self.incomplete).then(|| &self.points[0])
    }
}

/// Solves `polys = 0` for `vars` (which must be the only variables present,
/// listed in decreasing lex order).
pub fn solve(polys: &[Poly], vars: &[Var]) -> SolutionSet {
    let mut out = SolutionSet { vars: vars.to_vec(), points: Vec::new(), inconsistent: false, positive_dimensional: false, incomplete: false };
    let gb = groebner(polys);
    if is_unit_ideal(&gb) {
        out.inconsistent = true;
        return out;
    }
    solve_rec(&gb, vars, &mut Vec::new(), &mut out);
    out
}

fn solve_rec(gb: &[Poly], vars: &[Var], suffix: &mut Vec<FieldElem>, out: &mut SolutionSet) {
    if is_unit_ideal(gb) {
        return;
    }
    let Some((&last, init)) = vars.split_last() else {
        out.points.push(suffix.iter().rev().cloned().collect());
        return;
    };
    let Some(uni) = gb.iter().find_map(|g| to_dense(g, last).filter(|d| d.len() > 1)) else {
        out.positive_dimensional = true;
        return;
    };
    let (rs, complete) = roots(&uni);
    out.incomplete |= !complete;
    for r in rs {
        let sub: Vec<Poly> = gb.iter().map(|g| g.eval(&[(last, r.clone())])).collect();
        let next = groebner(&sub);
        suffix.push(r);
        solve_rec(&next, init, suffix, out);
        suffix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn unit_ideal_detected() {
        let gb = groebner(&[p("x1*x2 - 1"), p("x2")]);
        assert!(is_unit_ideal(&gb));
    }

    #[test]
    fn reduced_basis_of_line_and_circle() {
        let gb = groebner(&[p("x1^2 + x2^2 - 2"), p("x1 - x2")]);
        assert_eq!(gb, vec![p("x2^2 - 1"), p("x1 - x2")]);
        let s = solve(&[p("x1^2 + x2^2 - 2"), p("x1 - x2")], &[Var::X1, Var::X2]);
        assert_eq!(s.points.len(), 2);
        assert!(s.points.contains(&vec![FieldElem::one(), FieldElem::one()]));
    }

    #[test]
    fn roots_in_quadratic_field() {
        // x² + x + 1 has the roots ξ, ξ².
        let s = solve(&[p("x3^2 + x3 + 1")], &[Var::X3]);
        assert_eq!(s.points.len(), 2);
        assert!(s.points.contains(&vec![FieldElem::xi()]));
        let t = solve(&[p("x3^2 - 2")], &[Var::X3]);
        assert!(t.incomplete && t.points.is_empty() && !t.inconsistent);
        let u = solve(&[p("x1*x2")], &[Var::X1, Var::X2]);
        assert!(u.positive_dimensional);
    }

    #[test]
    fn double_root_is_one_point() {
        let s = solve(&[p("x1^2"), p("x2 - x1")], &[Var::X1, Var::X2]);
        assert_eq!(s.unique(), Some(&vec![FieldElem::zero(), FieldElem::zero()]));
    }
}
