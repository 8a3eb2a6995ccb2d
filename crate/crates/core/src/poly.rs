//! Sparse commutative polynomials over Q(√−3) in the scalars of a
//! one-dimensional top level: a₁, a₂, b₁, b₂ (actions of ω̃¹, ω̃², J, K),
//! x₁, x₂, x₃ (actions of P, J₁P, K₁P) and y (action of J₁K₁P).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::field::FieldElem;

pub const NVARS: usize = 8;
pub const VAR_NAMES: [&str; NVARS] = ["a1", "a2", "b1", "b2", "x1", "x2", "x3", "y"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A1,
    A2,
    B1,
    B2,
    X1,
    X2,
    X3,
    Y,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::A1, Var::A2, Var::B1, Var::B2, Var::X1, Var::X2, Var::X3, Var::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.index()]
    }

    pub fn by_name(s: &str) -> Option<Var> {
        VAR_NAMES.iter().position(|n| *n == s).map(|i| Var::ALL[i])
    }
}

/// Exponent vector.
pub type Mono = [u8; NVARS];

pub fn mono_degree(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = [0u8; NVARS];
    for i in 0..NVARS {
        out[i] = a[i] + b[i];
    }
    out
}

/// a / b if b divides a.
pub fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out = [0u8; NVARS];
    for i in 0..NVARS {
        out[i] = a[i].checked_sub(b[i])?;
    }
    Some(out)
}

pub fn mono_lcm(a: &Mono, b: &Mono) -> Mono {
    let mut out = [0u8; NVARS];
    for i in 0..NVARS {
        out[i] = a[i].max(b[i]);
    }
    out
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Mono, FieldElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: FieldElem) -> Self {
        let mut p = Poly::zero();
        p.add_term([0; NVARS], &c);
        p
    }

    pub fn one() -> Self {
        Self::constant(FieldElem::one())
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0u8; NVARS];
        m[v.index()] = 1;
        Poly::monomial(m, FieldElem::one())
    }

    pub fn monomial(m: Mono, c: FieldElem) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, &c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c);
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&FieldElem::int(-1))
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(mono_mul(m1, m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: &FieldElem) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, x)| (mono_mul(k, m), x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(mono_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u8 {
        self.terms.keys().map(|m| m[v.index()]).max().unwrap_or(0)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    pub fn coeff(&self, m: &Mono) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The constant c if this polynomial is constant.
    pub fn as_constant(&self) -> Option<FieldElem> {
        match self.terms.len() {
            0 => Some(FieldElem::zero()),
            1 => self.terms.get(&[0; NVARS]).cloned(),
            _ => None,
        }
    }

    /// Substitutes `v := p`.
    pub fn subst(&self, v: Var, p: &Poly) -> Poly {
        let i = v.index();
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m[i] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(p);
                powers.push(next);
            }
            let mut rest = *m;
            rest[i] = 0;
            out = out.add(&powers[e].mul_mono(&rest, c));
        }
        out
    }

    /// Substitutes constants for the given variables.
    pub fn eval(&self, vals: &[(Var, FieldElem)]) -> Poly {
        let mut out = self.clone();
        for (v, c) in vals {
            out = out.subst(*v, &Poly::constant(c.clone()));
        }
        out
    }

    /// The factor c with self = c·other, if one exists (other nonzero).
    pub fn ratio_to(&self, other: &Poly) -> Option<FieldElem> {
        let (m, c) = other.terms.iter().next()?;
        let r = &self.coeff(m) * &c.inv()?;
        (other.scale(&r) == *self).then_some(r)
    }

    /// Scales so that the coefficient of `m` is 1.
    pub fn normalized_at(&self, m: &Mono) -> Option<Poly> {
        let c = self.terms.get(m)?;
        Some(self.scale(&c.inv()?))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // graded order, highest first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| (mono_degree(b.0), b.0).cmp(&(mono_degree(a.0), a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = (0..NVARS)
                .filter(|&k| m[k] > 0)
                .map(|k| if m[k] == 1 { VAR_NAMES[k].to_string() } else { format!("{}^{}", VAR_NAMES[k], m[k]) })
                .collect();
            let (neg, mag) = if c.is_rational() && c.re.signum() < 0 { (true, -c.clone()) } else { (false, c.clone()) };
            let cs = if c.is_rational() { mag.to_string() } else { format!("({})", mag) };
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => cs,
                (false, true) => mono.join("*"),
                (false, false) => format!("{}*{}", cs, mono.join("*")),
            };
            match (i, neg) {
                (0, false) => write!(f, "{}", body)?,
                (0, true) => write!(f, "-{}", body)?,
                (_, false) => write!(f, " + {}", body)?,
                (_, true) => write!(f, " - {}", body)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial: {0}")]
pub struct ParsePolyError(pub String);

/// Accepts sums of terms `c*v^k*w` with rational or parenthesized field
/// coefficients, e.g. `15*b2*x1 + 5*a2*x3 - 2*x3` or `(2*sqrt(-3))*x1`.
impl FromStr for Poly {
    type Err = ParsePolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| ParsePolyError(format!("{m} in {s:?}"));
        // split into signed terms at top-level + and -
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        let mut neg = false;
        for (i, &ch) in chars.iter().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let prev_is_op = i == 0 || matches!(chars[i - 1], '*' | '^' | '(');
            if depth == 0 && (ch == '+' || ch == '-') && !prev_is_op {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                }
                neg = ch == '-';
                continue;
            }
            if depth == 0 && i == 0 && ch == '-' {
                neg = true;
                continue;
            }
            cur.push(ch);
        }
        if !cur.is_empty() {
            terms.push((neg, cur));
        }
        let mut out = Poly::zero();
        for (neg, t) in terms {
            let mut coeff = FieldElem::one();
            let mut mono = [0u8; NVARS];
            // split on '*' at depth 0
            let mut parts: Vec<String> = Vec::new();
            let mut d = 0;
            let mut buf = String::new();
            for ch in t.chars() {
                match ch {
                    '(' => d += 1,
                    ')' => d -= 1,
                    _ => {}
                }
                if ch == '*' && d == 0 {
                    parts.push(std::mem::take(&mut buf));
                } else {
                    buf.push(ch);
                }
            }
            parts.push(buf);
            for p in parts {
                if let Some(inner) = p.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
                    let c: FieldElem = inner.replace('*', " * ").replace(" * sqrt", "*sqrt").parse().map_err(|_| err("coefficient"))?;
                    coeff = &coeff * &c;
                } else if let Some(v) = p.split('^').next().and_then(Var::by_name) {
                    let e: u8 = match p.split_once('^') {
                        Some((_, e)) => e.parse().map_err(|_| err("exponent"))?,
                        None => 1,
                    };
                    mono[v.index()] += e;
                } else {
                    let c: FieldElem = p.parse().map_err(|_| err("token"))?;
                    coeff = &coeff * &c;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(mono, &coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic() {
        let x = Poly::var(Var::X1);
        let a = Poly::var(Var::A1);
        let s = x.add(&a);
        assert_eq!(s.mul(&s), p("x1^2 + 2*x1*a1 + a1^2"));
        assert_eq!(s.sub(&s), Poly::zero());
        assert_eq!(s.pow(3).total_degree(), 3);
    }

    #[test]
    fn parse_display_round_trip() {
        let q = p("15*b2*x1 + 5*a2*x3 - 2*x3 - 3/7");
        assert_eq!(q.to_string().parse::<Poly>().unwrap(), q);
        let r = p("(2*sqrt(-3))*x1 - x2^2");
        assert_eq!(r.coeff(&{
            let mut m = [0; NVARS];
            m[4] = 1;
            m
        }), FieldElem::new(0.into(), 2.into()));
        assert_eq!(r.to_string().parse::<Poly>().unwrap(), r);
    }

    #[test]
    fn substitution_and_ratio() {
        let q = p("x1*y + y^2");
        let r = q.subst(Var::Y, &p("x1 + 1"));
        assert_eq!(r, p("2*x1^2 + 3*x1 + 1"));
        assert_eq!(r.scale(&FieldElem::frac(-3, 2)).ratio_to(&r), Some(FieldElem::frac(-3, 2)));
        assert_eq!(p("x1 + 1").ratio_to(&p("x1 + 2")), None);
        assert_eq!(q.eval(&[(Var::X1, FieldElem::int(2)), (Var::Y, FieldElem::int(3))]).as_constant(), Some(FieldElem::int(15)));
    }
}
