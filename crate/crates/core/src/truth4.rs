//! The five-valued robust truth domain.
//!
//! Values are four monotone bits `b1 b2 b3 b4` packed into the low nibble of
//! a byte with `b1` as the most significant bit, so the order on values is
//! the integer order and lattice operations are bitwise.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthError {
    #[error("bits {0}{1}{2}{3} are not monotone")]
    NonMonotoneBits(u8, u8, u8, u8),
    #[error("`{0}` is not a truth value (expected one of 0000, 0001, 0011, 0111, 1111)")]
    Unparsable(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthValue4(u8);

impl TruthValue4 {
    pub const F0000: TruthValue4 = TruthValue4(0b0000);
    pub const F0001: TruthValue4 = TruthValue4(0b0001);
    pub const F0011: TruthValue4 = TruthValue4(0b0011);
    pub const F0111: TruthValue4 = TruthValue4(0b0111);
    pub const F1111: TruthValue4 = TruthValue4(0b1111);

    /// All values in increasing order.
    pub const ALL: [TruthValue4; 5] = [
        Self::F0000,
        Self::F0001,
        Self::F0011,
        Self::F0111,
        Self::F1111,
    ];

    /// The four nonzero values, indexed by bit: `DEGREES[i-1]` is the value
    /// whose threshold corresponds to bit `i`.
    pub const DEGREES: [TruthValue4; 4] = [Self::F1111, Self::F0111, Self::F0011, Self::F0001];

    pub fn from_bits(b1: u8, b2: u8, b3: u8, b4: u8) -> Result<Self, TruthError> {
        if b1 > 1 || b2 > 1 || b3 > 1 || b4 > 1 || b1 > b2 || b2 > b3 || b3 > b4 {
            return Err(TruthError::NonMonotoneBits(b1, b2, b3, b4));
        }
        Ok(TruthValue4((b1 << 3) | (b2 << 2) | (b3 << 1) | b4))
    }

    /// Assemble a value from possibly non-monotone bits by lifting each bit
    /// to the maximum of itself and all earlier bits.
    pub fn from_bits_max_lift(bits: [bool; 4]) -> Self {
        let mut acc = false;
        let mut packed = 0u8;
        for (n, b) in bits.iter().enumerate() {
            acc |= *b;
            if acc {
                packed |= 1 << (3 - n);
            }
        }
        TruthValue4(packed)
    }

    /// Value with the first `level` bits counted from the right set.
    pub fn from_level(level: usize) -> Self {
        Self::ALL[level.min(4)]
    }

    /// Position in the order, 0 for `0000` up to 4 for `1111`.
    pub fn level(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn packed(self) -> u8 {
        self.0
    }

    /// Bit `i` for `i` in 1..=4; `b1` is the leftmost.
    pub fn bit(self, i: usize) -> bool {
        assert!((1..=4).contains(&i), "bit index {i} out of range");
        self.0 & (1 << (4 - i)) != 0
    }

    /// Value whose threshold is tested by bit `i`: 1 → 1111, 4 → 0001.
    pub fn degree(i: usize) -> Self {
        assert!((1..=4).contains(&i), "bit index {i} out of range");
        Self::DEGREES[i - 1]
    }

    /// Inverse of [`degree`](Self::degree); `None` for `0000`.
    pub fn bit_index(self) -> Option<usize> {
        Self::DEGREES.iter().position(|d| *d == self).map(|n| n + 1)
    }

    pub fn meet(self, other: Self) -> Self {
        TruthValue4(self.0 & other.0)
    }

    pub fn join(self, other: Self) -> Self {
        TruthValue4(self.0 | other.0)
    }

    pub fn negate(self) -> Self {
        if self == Self::F1111 {
            Self::F0000
        } else {
            Self::F1111
        }
    }

    pub fn imply(self, other: Self) -> Self {
        if self <= other {
            Self::F1111
        } else {
            other
        }
    }

    pub fn empty_min() -> Self {
        Self::F1111
    }

    pub fn empty_max() -> Self {
        Self::F0000
    }

    pub fn meet_all<I: IntoIterator<Item = Self>>(values: I) -> Self {
        values.into_iter().fold(Self::empty_min(), Self::meet)
    }

    pub fn join_all<I: IntoIterator<Item = Self>>(values: I) -> Self {
        values.into_iter().fold(Self::empty_max(), Self::join)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::F1111
        } else {
            Self::F0000
        }
    }
}

impl fmt::Display for TruthValue4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl fmt::Debug for TruthValue4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl FromStr for TruthValue4 {
    type Err = TruthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|v| v.to_string() == t)
            .ok_or_else(|| TruthError::Unparsable(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TruthValue4 as T;

    #[test]
    fn lattice_examples() {
        assert_eq!(T::F1111.meet(T::F0011), T::F0011);
        assert_eq!(T::F0111.meet(T::F0001), T::F0001);
        assert_eq!(T::F0001.join(T::F0011), T::F0011);
        for x in T::ALL {
            assert_eq!(T::F0000.meet(x), T::F0000);
            assert_eq!(T::F1111.join(x), T::F1111);
        }
        assert_eq!(T::join_all([]), T::F0000);
        assert_eq!(T::meet_all([]), T::F1111);
        assert_eq!(T::empty_min(), T::F1111);
        assert_eq!(T::empty_max(), T::F0000);
    }

    #[test]
    fn negation_and_implication() {
        assert_eq!(T::F1111.negate(), T::F0000);
        assert_eq!(T::F0111.negate(), T::F1111);
        assert_eq!(T::F0011.negate().negate(), T::F0000);
        assert_eq!(T::F0011.imply(T::F0111), T::F1111);
        assert_eq!(T::F1111.imply(T::F0011), T::F0011);
        assert_eq!(T::F0000.imply(T::F0000), T::F1111);
    }

    #[test]
    fn bits_and_parsing() {
        assert_eq!(T::from_bits(0, 1, 1, 1), Ok(T::F0111));
        assert_eq!(T::from_bits(0, 0, 0, 0), Ok(T::F0000));
        assert_eq!(T::from_bits(1, 0, 0, 0), Err(TruthError::NonMonotoneBits(1, 0, 0, 0)));
        assert!(T::from_bits(1, 0, 1, 1).is_err());
        assert_eq!("0011".parse::<T>(), Ok(T::F0011));
        assert!("0101".parse::<T>().is_err());
        assert_eq!(T::F0111.to_string(), "0111");
        assert!(!T::F0111.bit(1));
        assert!(T::F0111.bit(2));
        assert_eq!(T::degree(2), T::F0111);
        assert_eq!(T::F0011.bit_index(), Some(3));
        assert_eq!(T::F0000.bit_index(), None);
        assert_eq!(T::from_bits_max_lift([false, true, false, false]), T::F0111);
    }

    #[test]
    fn order_matches_integers() {
        for w in T::ALL.windows(2) {
            assert!(w[0] < w[1]);
            assert!(w[0].packed() < w[1].packed());
        }
    }
}
