//! Fixed-width bit strings.
//!
//! One type serves both as the schedule encoding `x ∈ {0,1}^N` and as the
//! basis-state key of the simulator. Bit `i` lives in word `i / 64` at
//! position `i % 64`, so qubit 0 is the least significant bit.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::Error;

type Words = SmallVec<[u64; 3]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Words,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(len.div_ceil(64), 0);
        Self { len, words }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                out.set(i, true);
            }
        }
        out
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut out = Self::zeros(len);
        for i in ones {
            out.set(i, true);
        }
        out
    }

    /// Low `len` bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut out = Self::zeros(len);
        for i in 0..len.min(64) {
            if value >> i & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Hamming weight.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// True iff the two strings share a set bit.
    pub fn intersects(&self, other: &BitString) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Copies bits `start..start + len` into a new string.
    pub fn extract(&self, start: usize, len: usize) -> BitString {
        let mut out = BitString::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Writes `bits` into positions `start..start + bits.len()`.
    pub fn insert(&mut self, start: usize, bits: &BitString) {
        for i in 0..bits.len() {
            self.set(start + i, bits.get(i));
        }
    }

    /// True iff no bit in `start..start + len` is set.
    pub fn range_is_zero(&self, start: usize, len: usize) -> bool {
        (start..start + len).all(|i| !self.get(i))
    }

    /// Value of the first 64 bits, qubit 0 least significant.
    pub fn low_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for BitString {
    /// Character `i` is bit `i`, i.e. vertex order, not numeric order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut out = BitString::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => out.set(i, true),
                other => {
                    return Err(Error::Validation(format!(
                        "bit string contains {other:?} at position {i}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
