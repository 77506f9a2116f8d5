//! Finite proposition sets and letters encoded as bitmasks.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::PropFormula;

/// A letter: the set of propositions that hold.
pub type Letter = BTreeSet<String>;

/// Largest supported number of propositions (letters are `u32` masks and
/// automata enumerate the full alphabet).
pub const MAX_PROPS: usize = 16;

/// Sorted proposition list; letter `m` contains proposition `props[i]` iff
/// bit `i` of `m` is set.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Alphabet {
    props: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = props.into_iter().map(Into::into).collect();
        assert!(set.len() <= MAX_PROPS, "at most {MAX_PROPS} propositions are supported");
        Alphabet {
            props: set.into_iter().collect(),
        }
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    /// Number of letters, `2^|P|`.
    pub fn num_letters(&self) -> usize {
        1 << self.props.len()
    }

    pub fn letters(&self) -> std::ops::Range<u32> {
        0..self.num_letters() as u32
    }

    pub fn index_of(&self, p: &str) -> Option<usize> {
        self.props.binary_search_by(|q| q.as_str().cmp(p)).ok()
    }

    /// Mask of a letter; propositions outside the alphabet are ignored.
    pub fn mask(&self, letter: &Letter) -> u32 {
        letter
            .iter()
            .filter_map(|p| self.index_of(p))
            .fold(0, |m, i| m | (1 << i))
    }

    pub fn letter(&self, mask: u32) -> Letter {
        self.props
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    }

    pub fn has(&self, mask: u32, p: &str) -> bool {
        self.index_of(p).is_some_and(|i| mask & (1 << i) != 0)
    }

    pub fn holds(&self, phi: &PropFormula, mask: u32) -> bool {
        phi.holds(&|p| self.has(mask, p))
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet::new(self.props.iter().chain(other.props.iter()).cloned())
    }

    pub fn contains_all(&self, props: &BTreeSet<String>) -> bool {
        props.iter().all(|p| self.index_of(p).is_some())
    }

    /// Conjunction of literals describing exactly the letter `mask`.
    pub fn minterm(&self, mask: u32) -> PropFormula {
        let mut acc: Option<PropFormula> = None;
        for (i, p) in self.props.iter().enumerate() {
            let lit = if mask & (1 << i) != 0 {
                PropFormula::atom(p)
            } else {
                PropFormula::not(PropFormula::atom(p))
            };
            acc = Some(match acc {
                None => lit,
                Some(a) => PropFormula::and(a, lit),
            });
        }
        acc.unwrap_or(PropFormula::True)
    }

    /// A propositional formula satisfied by exactly the given letters.
    pub fn describe(&self, letters: &BTreeSet<u32>) -> PropFormula {
        if letters.is_empty() {
            return PropFormula::False;
        }
        if letters.len() == self.num_letters() {
            return PropFormula::True;
        }
        // Drop propositions on which the set does not depend.
        let mut cubes: Vec<(u32, u32)> = letters.iter().map(|m| (*m, 0u32)).collect();
        for i in 0..self.props.len() {
            let bit = 1u32 << i;
            let mut merged = Vec::new();
            let mut used = vec![false; cubes.len()];
            for a in 0..cubes.len() {
                if used[a] {
                    continue;
                }
                let (va, da) = cubes[a];
                if da & bit != 0 {
                    merged.push(cubes[a]);
                    used[a] = true;
                    continue;
                }
                let partner = (a + 1..cubes.len())
                    .find(|&b| !used[b] && cubes[b].1 == da && cubes[b].0 == va ^ bit);
                used[a] = true;
                match partner {
                    Some(b) => {
                        used[b] = true;
                        merged.push((va & !bit, da | bit));
                    }
                    None => merged.push((va, da)),
                }
            }
            cubes = merged;
        }
        let mut acc: Option<PropFormula> = None;
        for (val, dc) in cubes {
            let mut cube: Option<PropFormula> = None;
            for (i, p) in self.props.iter().enumerate() {
                if dc & (1 << i) != 0 {
                    continue;
                }
                let lit = if val & (1 << i) != 0 {
                    PropFormula::atom(p)
                } else {
                    PropFormula::not(PropFormula::atom(p))
                };
                cube = Some(match cube {
                    None => lit,
                    Some(c) => PropFormula::and(c, lit),
                });
            }
            let cube = cube.unwrap_or(PropFormula::True);
            acc = Some(match acc {
                None => cube,
                Some(a) => PropFormula::or(a, cube),
            });
        }
        acc.unwrap_or(PropFormula::False)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.props.join(","))
    }
}

pub fn format_letter(letter: &Letter) -> String {
    format!(
        "{{{}}}",
        letter.iter().cloned().collect::<Vec<_>>().join(",")
    )
}
