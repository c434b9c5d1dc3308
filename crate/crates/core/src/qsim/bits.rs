//! Packed bitstrings and measurement batches.
//!
//! Qubit `q` is bit `q % 64` of word `q / 64`. For registers of at most 64
//! qubits a bitstring is therefore the computational-basis index itself.
//! Serialized bitstrings print qubit 0 as the leftmost character.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) fn words_for(n_bits: usize) -> usize {
    n_bits.div_ceil(64).max(1)
}

/// Bit `i` of a packed word slice.
#[inline]
pub fn bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

/// Qubit carrying bit `i` (0 or 1) of the cell `(cash_point, day)`.
#[inline]
pub fn cell_qubit(cash_point: usize, day: usize, i: usize, days: usize) -> usize {
    2 * (cash_point * days + day) + i
}

/// Spin value of a bit: `0 -> -1`, `1 -> +1`.
#[inline]
pub fn spin(b: bool) -> i8 {
    if b {
        1
    } else {
        -1
    }
}

/// An owned `n`-bit string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    n_bits: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(n_bits: usize) -> Self {
        Self {
            n_bits,
            words: vec![0; words_for(n_bits)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Basis index to bitstring (`n_bits <= 64`).
    pub fn from_index(index: u64, n_bits: usize) -> Self {
        assert!(n_bits <= 64);
        let mask = if n_bits == 64 {
            u64::MAX
        } else {
            (1u64 << n_bits) - 1
        };
        Self {
            n_bits,
            words: vec![index & mask],
        }
    }

    pub fn from_words(words: &[u64], n_bits: usize) -> Self {
        let mut s = Self::zeros(n_bits);
        for i in 0..n_bits {
            s.set(i, bit(words, i));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.n_bits);
        bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.n_bits);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Basis index (`n_bits <= 64`).
    pub fn index(&self) -> u64 {
        assert!(self.n_bits <= 64);
        self.words[0]
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_bits {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => out.set(i, true),
                other => return Err(Error::invalid(format!("bad bit character {other:?}"))),
            }
        }
        Ok(out)
    }
}

/// `K` measurement outcomes of an `N`-qubit register, stored packed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    n_bits: usize,
    words_per_shot: usize,
    data: Vec<u64>,
}

impl SampleBatch {
    pub(crate) fn with_capacity(n_bits: usize, shots: usize) -> Self {
        let words_per_shot = words_for(n_bits);
        Self {
            n_bits,
            words_per_shot,
            data: Vec::with_capacity(shots * words_per_shot),
        }
    }

    pub(crate) fn from_raw(n_bits: usize, data: Vec<u64>) -> Self {
        let words_per_shot = words_for(n_bits);
        debug_assert_eq!(data.len() % words_per_shot, 0);
        Self {
            n_bits,
            words_per_shot,
            data,
        }
    }

    pub(crate) fn push_words(&mut self, words: &[u64]) {
        debug_assert_eq!(words.len(), self.words_per_shot);
        self.data.extend_from_slice(words);
    }

    pub fn from_bitstrings(n_bits: usize, shots: &[BitString]) -> Result<Self> {
        let mut batch = Self::with_capacity(n_bits, shots.len());
        for s in shots {
            if s.len() != n_bits {
                return Err(Error::invalid(format!(
                    "expected {n_bits} bits, got {}",
                    s.len()
                )));
            }
            batch.push_words(s.words());
        }
        Ok(batch)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn shots(&self) -> usize {
        self.data.len() / self.words_per_shot
    }

    /// Packed words of shot `k`.
    pub fn shot(&self, k: usize) -> &[u64] {
        &self.data[k * self.words_per_shot..(k + 1) * self.words_per_shot]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.data.chunks_exact(self.words_per_shot)
    }

    pub fn bitstring(&self, k: usize) -> BitString {
        BitString::from_words(self.shot(k), self.n_bits)
    }

    /// Distinct outcomes with their multiplicities; counts sum to `shots()`.
    pub fn counts(&self) -> BTreeMap<BitString, usize> {
        let mut out = BTreeMap::new();
        for shot in self.iter() {
            *out.entry(BitString::from_words(shot, self.n_bits))
                .or_insert(0) += 1;
        }
        out
    }

    /// Fraction of shots reading `1` on qubit `q`.
    pub fn frequency_of_one(&self, q: usize) -> f64 {
        let ones = self.iter().filter(|s| bit(s, q)).count();
        ones as f64 / self.shots() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qubit_zero_prints_first() {
        let mut s = BitString::zeros(5);
        s.set(0, true);
        s.set(3, true);
        assert_eq!(s.to_string(), "10010");
        assert_eq!(s.index(), 0b01001);
    }

    #[test]
    fn cell_convention() {
        // q(c,t,i) = 2 (c D + t) + i
        assert_eq!(cell_qubit(0, 0, 0, 4), 0);
        assert_eq!(cell_qubit(1, 2, 1, 4), 13);
        assert_eq!(spin(false), -1);
        assert_eq!(spin(true), 1);
    }

    #[test]
    fn batch_counts_sum_to_shots() {
        let shots: Vec<BitString> = ["01", "01", "11"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let b = SampleBatch::from_bitstrings(2, &shots).unwrap();
        assert_eq!(b.shots(), 3);
        let c = b.counts();
        assert_eq!(c.values().sum::<usize>(), 3);
        assert_eq!(c[&"01".parse::<BitString>().unwrap()], 2);
        assert!(SampleBatch::from_bitstrings(3, &shots).is_err());
    }

    proptest! {
        #[test]
        fn parse_display_round_trip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let s = BitString::from_bools(&bits);
            let back: BitString = s.to_string().parse().unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(BitString::from_words(s.words(), s.len()), s);
        }
    }
}
