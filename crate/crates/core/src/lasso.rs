//! Ultimately periodic traces `u v^ω`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::alphabet::{format_letter, Alphabet, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("the loop of a lasso must be nonempty")]
    EmptyLoop,
    #[error("malformed lasso `{text}`: {msg}")]
    Malformed { text: String, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LassoTrace {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoTrace { prefix, cycle })
    }

    /// Build from string slices, e.g. `from_strs(&[&["p"]], &[&[]])`.
    pub fn from_strs(prefix: &[&[&str]], cycle: &[&[&str]]) -> Self {
        let conv = |ls: &[&[&str]]| -> Vec<Letter> {
            ls.iter()
                .map(|l| l.iter().map(|s| s.to_string()).collect())
                .collect()
        };
        LassoTrace::new(conv(prefix), conv(cycle)).expect("nonempty loop")
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of canonical positions, `|prefix| + |loop|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn canonical_index(&self, j: usize) -> usize {
        let u = self.prefix.len();
        if j < u {
            j
        } else {
            u + (j - u) % self.cycle.len()
        }
    }

    /// Canonical index of position `c + 1` for canonical `c`.
    pub fn successor(&self, c: usize) -> usize {
        if c + 1 < self.positions() {
            c + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn letter_at(&self, j: usize) -> &Letter {
        let c = self.canonical_index(j);
        if c < self.prefix.len() {
            &self.prefix[c]
        } else {
            &self.cycle[c - self.prefix.len()]
        }
    }

    /// The suffix from position `j`, with the consumed prefix dropped and
    /// the loop rotated, so equal canonical indices give equal values.
    pub fn suffix(&self, j: usize) -> LassoTrace {
        let u = self.prefix.len();
        if j < u {
            return LassoTrace {
                prefix: self.prefix[j..].to_vec(),
                cycle: self.cycle.clone(),
            };
        }
        let shift = (j - u) % self.cycle.len();
        let mut cycle = self.cycle[shift..].to_vec();
        cycle.extend_from_slice(&self.cycle[..shift]);
        LassoTrace {
            prefix: Vec::new(),
            cycle,
        }
    }

    /// The first `n` letters of the unfolding.
    pub fn unroll(&self, n: usize) -> Vec<Letter> {
        (0..n).map(|j| self.letter_at(j).clone()).collect()
    }

    pub fn props(&self) -> BTreeSet<String> {
        self.prefix
            .iter()
            .chain(self.cycle.iter())
            .flat_map(|l| l.iter().cloned())
            .collect()
    }

    /// Letter masks per canonical position.
    pub fn masks(&self, alphabet: &Alphabet) -> Vec<u32> {
        self.prefix
            .iter()
            .chain(self.cycle.iter())
            .map(|l| alphabet.mask(l))
            .collect()
    }

    pub fn from_masks(alphabet: &Alphabet, prefix: &[u32], cycle: &[u32]) -> Self {
        LassoTrace::new(
            prefix.iter().map(|m| alphabet.letter(*m)).collect(),
            cycle.iter().map(|m| alphabet.letter(*m)).collect(),
        )
        .expect("nonempty loop")
    }

    /// Same infinite word: compares unfoldings up to a common horizon.
    pub fn same_word(&self, other: &LassoTrace) -> bool {
        let a = self.cycle.len();
        let b = other.cycle.len();
        let horizon = self.prefix.len().max(other.prefix.len()) + a * b;
        (0..horizon).all(|j| self.letter_at(j) == other.letter_at(j))
    }
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.prefix.iter().map(format_letter).collect();
        parts.push(";".to_string());
        parts.extend(self.cycle.iter().map(format_letter));
        f.write_str(&parts.join(" "))
    }
}

fn parse_letters(text: &str, whole: &str) -> Result<Vec<Letter>, LassoError> {
    let bad = |msg: &str| LassoError::Malformed {
        text: whole.to_string(),
        msg: msg.to_string(),
    };
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        if !rest.starts_with('{') {
            return Err(bad("expected `{`"));
        }
        let close = rest.find('}').ok_or_else(|| bad("unclosed `{`"))?;
        let body = &rest[1..close];
        let mut letter = Letter::new();
        for p in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                return Err(bad(&format!("invalid proposition `{p}`")));
            }
            letter.insert(p.to_string());
        }
        out.push(letter);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

impl FromStr for LassoTrace {
    type Err = LassoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pre, lp) = s.split_once(';').ok_or_else(|| LassoError::Malformed {
            text: s.to_string(),
            msg: "missing `;` between prefix and loop".to_string(),
        })?;
        if lp.contains(';') {
            return Err(LassoError::Malformed {
                text: s.to_string(),
                msg: "more than one `;`".to_string(),
            });
        }
        LassoTrace::new(parse_letters(pre, s)?, parse_letters(lp, s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> LassoTrace {
        s.parse().unwrap()
    }

    #[test]
    fn letter_at_examples() {
        let w = l("{p} ; {}");
        assert_eq!(w.letter_at(0), &Letter::from(["p".to_string()]));
        assert!(w.letter_at(7).is_empty());
        let v = l("; {a} {b}");
        assert_eq!(v.letter_at(5), &Letter::from(["b".to_string()]));
    }

    #[test]
    fn suffix_examples() {
        let w = l("{a} ; {b} {c}");
        assert_eq!(w.suffix(0), w);
        // w = a b c b c ..., so position 3 starts another `b`.
        assert_eq!(w.suffix(3), l("; {b} {c}"));
        assert_eq!(w.suffix(2), l("; {c} {b}"));
        assert_eq!(w.suffix(1).suffix(1), w.suffix(2));
    }

    #[test]
    fn canonical_index_examples() {
        let w = l("{} ; {} {} {}");
        assert_eq!(w.canonical_index(7), 1);
        assert_eq!(w.canonical_index(0), 0);
        assert_eq!(w.canonical_index(1), 1);
        assert_eq!(w.successor(3), 1);
    }

    #[test]
    fn text_round_trip() {
        let w = l("{p,q} {} {p} ; {p} {}");
        assert_eq!(w.to_string(), "{p,q} {} {p} ; {p} {}");
        assert_eq!(l(&w.to_string()), w);
        assert_eq!(l(" ; {p}").to_string(), "; {p}");
        assert!("{p}".parse::<LassoTrace>().is_err());
        assert!("{p} ;".parse::<LassoTrace>().is_err());
        assert!("{p ; {q}".parse::<LassoTrace>().is_err());
    }
}
