//! Words in the generator modes and the text format used by the data files.
//!
//! A data line reads `LHS | c₁ word₁ ; c₂ word₂ ; ...`. Word tokens are
//! `W1(k)`, `W2(k)`, `J(k)`, `K(k)` with VOA subscripts k (so `W1(0)` is
//! (ω̃¹)₀ and `J(1)` is J₁), applied right to left to a base `1` or `P`.
//! A coefficient written `?c` has an unknown sign and magnitude c.

use std::fmt;
use std::str::FromStr;

use crate::field::FieldElem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    /// ω̃¹ (weight 2)
    W1,
    /// ω̃² (weight 2)
    W2,
    /// J (weight 3)
    J,
    /// K (weight 3)
    K,
}

impl Gen {
    pub fn weight(self) -> i64 {
        match self {
            Gen::W1 | Gen::W2 => 2,
            Gen::J | Gen::K => 3,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Gen::W1 => "W1",
            Gen::W2 => "W2",
            Gen::J => "J",
            Gen::K => "K",
        }
    }

    /// Whether the modes of `self` and `other` commute.
    pub fn commutes_with(self, other: Gen) -> bool {
        let left = |g: Gen| matches!(g, Gen::W1 | Gen::J);
        left(self) != left(other)
    }
}

/// The operator X(−depth) in shifted notation, i.e. the VOA mode
/// X_{wt X − 1 − depth}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub depth: i64,
}

impl Letter {
    pub fn new(gen: Gen, depth: i64) -> Self {
        Letter { gen, depth }
    }

    pub fn from_subscript(gen: Gen, sub: i64) -> Self {
        Letter { gen, depth: gen.weight() - 1 - sub }
    }

    pub fn subscript(self) -> i64 {
        self.gen.weight() - 1 - self.depth
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.gen.token(), self.subscript())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Vacuum,
    P,
}

impl Base {
    pub fn weight(self) -> i64 {
        match self {
            Base::Vacuum => 0,
            Base::P => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    /// Leftmost letter first.
    pub letters: Vec<Letter>,
    pub base: Base,
}

impl Word {
    pub fn new(letters: Vec<Letter>, base: Base) -> Self {
        Word { letters, base }
    }

    pub fn base(base: Base) -> Self {
        Word { letters: Vec::new(), base }
    }

    pub fn weight(&self) -> i64 {
        self.base.weight() + self.letters.iter().map(|l| l.depth).sum::<i64>()
    }

    /// The word with its first letter removed.
    pub fn rest(&self) -> Word {
        Word { letters: self.letters[1..].to_vec(), base: self.base }
    }

    pub fn prepend(&self, l: Letter) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(l);
        letters.extend_from_slice(&self.letters);
        Word { letters, base: self.base }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{} ", l)?;
        }
        match self.base {
            Base::Vacuum => write!(f, "1"),
            Base::P => write!(f, "P"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("bad token {0:?}")]
    Token(String),
    #[error("bad coefficient {0:?}")]
    Coeff(String),
    #[error("malformed line {0:?}")]
    Line(String),
}

impl FromStr for Word {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let (last, init) = toks.split_last().ok_or_else(|| ParseError::Token(s.to_string()))?;
        let base = match *last {
            "1" => Base::Vacuum,
            "P" => Base::P,
            t => return Err(ParseError::Token(t.to_string())),
        };
        let mut letters = Vec::new();
        for t in init {
            let (name, rest) = t.split_once('(').ok_or_else(|| ParseError::Token(t.to_string()))?;
            let sub: i64 = rest
                .strip_suffix(')')
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| ParseError::Token(t.to_string()))?;
            let gen = match name {
                "W1" => Gen::W1,
                "W2" => Gen::W2,
                "J" => Gen::J,
                "K" => Gen::K,
                _ => return Err(ParseError::Token(t.to_string())),
            };
            letters.push(Letter::from_subscript(gen, sub));
        }
        Ok(Word { letters, base })
    }
}

/// A coefficient that may carry an undetermined sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coeff {
    Known(FieldElem),
    UnknownSign(FieldElem),
}

impl Coeff {
    pub fn magnitude(&self) -> &FieldElem {
        match self {
            Coeff::Known(c) | Coeff::UnknownSign(c) => c,
        }
    }
}

/// One `coefficient · word` summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coeff,
    pub word: Word,
}

/// A parsed data line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub lhs: String,
    pub terms: Vec<Term>,
}

impl Identity {
    pub fn has_unknown_sign(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.coeff, Coeff::UnknownSign(_)))
    }
}

fn parse_term(s: &str) -> Result<Term, ParseError> {
    let s = s.trim();
    let (c, w) = s.split_once(char::is_whitespace).ok_or_else(|| ParseError::Line(s.to_string()))?;
    let coeff = if let Some(mag) = c.strip_prefix('?') {
        Coeff::UnknownSign(mag.parse().map_err(|_| ParseError::Coeff(c.to_string()))?)
    } else {
        Coeff::Known(c.parse().map_err(|_| ParseError::Coeff(c.to_string()))?)
    };
    Ok(Term { coeff, word: w.parse()? })
}

/// Parses a data file; blank lines and `#` comments are skipped.
pub fn parse_identities(text: &str) -> Result<Vec<Identity>, ParseError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once('|').ok_or_else(|| ParseError::Line(line.to_string()))?;
        let terms = if rhs.trim() == "0" {
            Vec::new()
        } else {
            rhs.split(';').map(parse_term).collect::<Result<Vec<_>, _>>()?
        };
        out.push(Identity { lhs: lhs.trim().to_string(), terms });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_words() {
        let w: Word = "W1(0) W2(-1) K(1) P".parse().unwrap();
        assert_eq!(w.letters.len(), 3);
        assert_eq!(w.letters[0], Letter::new(Gen::W1, 1));
        assert_eq!(w.letters[1], Letter::new(Gen::W2, 2));
        assert_eq!(w.letters[2], Letter::new(Gen::K, 1));
        assert_eq!(w.weight(), 6);
        assert_eq!(w.to_string(), "W1(0) W2(-1) K(1) P");
        let j: Word = "J(-1) 1".parse().unwrap();
        assert_eq!(j.weight(), 3);
    }

    #[test]
    fn parses_lines() {
        let ids = parse_identities("# c\nP 1 JP | -312/7 J(-1) 1 ; -80/7 K(1) P\nX | ?182 W1(0) P\nZ | 0\n").unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids[0].terms.len(), 2);
        assert!(ids[1].has_unknown_sign());
        assert!(ids[2].terms.is_empty());
    }

    #[test]
    fn commuting_families() {
        assert!(Gen::J.commutes_with(Gen::K));
        assert!(Gen::J.commutes_with(Gen::W2));
        assert!(!Gen::J.commutes_with(Gen::W1));
        assert!(!Gen::K.commutes_with(Gen::K));
    }
}
