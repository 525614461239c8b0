//! Group words over opaque generator labels, and the labels of their
//! attracting (`+`) and repelling (`-`) fixed points.
//!
//! A word is written with letters separated by spaces or dots, `'` marking
//! an inverse: `a b a'` and `a.b.a'` are the same word. Point labels use the
//! dotted form so they never contain whitespace: `a.b+`, `b'-`, and
//! `g(h+)` for the image of the point `h+` under `g`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub name: String,
    pub inverse: bool,
}

impl Letter {
    fn inv(&self) -> Letter {
        Letter {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(name: &str) -> Self {
        Word(vec![Letter {
            name: name.to_string(),
            inverse: false,
        }])
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for l in letters {
            if out.last().is_some_and(|p| p.name == l.name && p.inverse != l.inverse) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Parse `a b a'` or `a.b.a'`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '.').filter(|t| !t.is_empty()) {
            let inverse = tok.ends_with('\'');
            let name = tok.trim_end_matches('\'');
            if !valid_name(name) || tok.len() - name.len() > 1 {
                return Err(Error::InvalidInput(format!("invalid word letter `{}`", tok)));
            }
            letters.push(Letter {
                name: name.to_string(),
                inverse,
            });
        }
        if letters.is_empty() {
            return Err(Error::InvalidInput(format!("empty word `{}`", s)));
        }
        Ok(Self::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inv).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// `self * w * self^-1`.
    pub fn conjugate(&self, w: &Word) -> Word {
        self.concat(w).concat(&self.inverse())
    }

    /// Whichever of `self`, `self^-1` prints first, and whether it was inverted.
    pub fn orientation_class(&self) -> (Word, bool) {
        let inv = self.inverse();
        if inv.to_string() < self.to_string() {
            (inv, true)
        } else {
            (self.clone(), false)
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}{}", l.name, if l.inverse { "'" } else { "" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FixedSign {
    Plus,
    Minus,
}

impl FixedSign {
    pub fn flip(self) -> Self {
        match self {
            FixedSign::Plus => FixedSign::Minus,
            FixedSign::Minus => FixedSign::Plus,
        }
    }

    fn suffix(self) -> char {
        match self {
            FixedSign::Plus => '+',
            FixedSign::Minus => '-',
        }
    }
}

/// The point `w^+` or `w^-`, with `(w^-1)^+ = w^-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedPoint {
    pub word: Word,
    pub sign: FixedSign,
}

impl FixedPoint {
    /// Canonical representative: the word is replaced by the orientation class
    /// representative, flipping the sign when inverted.
    pub fn new(word: Word, sign: FixedSign) -> Self {
        let (w, inverted) = word.orientation_class();
        FixedPoint {
            word: w,
            sign: if inverted { sign.flip() } else { sign },
        }
    }

    pub fn plus(word: &Word) -> Self {
        Self::new(word.clone(), FixedSign::Plus)
    }

    pub fn minus(word: &Word) -> Self {
        Self::new(word.clone(), FixedSign::Minus)
    }

    /// `g(p) = (g w g^-1)^sign`.
    pub fn act(&self, g: &Word) -> Self {
        Self::new(g.conjugate(&self.word), self.sign)
    }

    /// Parse a point label: `w+`, `w-`, or `g(p)`.
    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        if let Some(open) = label.find('(') {
            if !label.ends_with(')') {
                return Err(Error::InvalidInput(format!("unbalanced point label `{}`", label)));
            }
            let g = Word::parse(&label[..open])?;
            let inner = Self::parse(&label[open + 1..label.len() - 1])?;
            return Ok(inner.act(&g));
        }
        let (body, sign) = if let Some(b) = label.strip_suffix('+') {
            (b, FixedSign::Plus)
        } else if let Some(b) = label.strip_suffix('-') {
            (b, FixedSign::Minus)
        } else {
            return Err(Error::InvalidInput(format!("point label `{}` lacks a +/- suffix", label)));
        };
        let w = Word::parse(body)?;
        if w.is_identity() {
            return Err(Error::InvalidInput(format!("identity has no fixed points (`{}`)", label)));
        }
        Ok(Self::new(w, sign))
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.word, self.sign.suffix())
    }
}

/// Label of `w^+`, as written by the user (no canonicalisation).
pub fn plus_label(w: &Word) -> String {
    FixedPoint::plus(w).to_string()
}

/// Label of `w^-`.
pub fn minus_label(w: &Word) -> String {
    FixedPoint::minus(w).to_string()
}

/// Label of the image of point `p` under `g`, in the `g(p)` form.
pub fn action_label(g: &Word, p: &str) -> String {
    format!("{}({})", g, p)
}
