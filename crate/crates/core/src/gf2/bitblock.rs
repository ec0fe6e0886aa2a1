use std::fmt;

use crate::error::{Error, Result};

/// Packed GF(2) vector.
///
/// Bit `i` lives in word `i / 64` at position `i % 64` (least significant bit
/// first). Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    len: usize,
    words: Vec<u64>,
}

impl BitBlock {
    pub const MAX_LEN: usize = 1 << 24;

    /// All-zero block of `len` bits.
    ///
    /// # Panics
    ///
    /// Panics if `len` is zero or larger than [`BitBlock::MAX_LEN`].
    pub fn zeros(len: usize) -> Self {
        Self::try_zeros(len).expect("invalid BitBlock length")
    }

    pub fn try_zeros(len: usize) -> Result<Self> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(Error::Size(format!(
                "bit block length {len} outside [1, {}]",
                Self::MAX_LEN
            )));
        }
        Ok(Self {
            len,
            words: vec![0; words_for(len)],
        })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self> {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut block = Self::try_zeros(bits.len())?;
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                block.set(i, true);
            }
        }
        Ok(block)
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Result<Self> {
        let mut block = Self::try_zeros(len)?;
        if index >= len {
            return Err(Error::IndexOutOfRange { index, bound: len });
        }
        block.set(index, true);
        Ok(block)
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Self { len, words }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR with a block of the same length.
    pub fn xor_assign(&mut self, other: &BitBlock) {
        assert_eq!(self.len, other.len, "xor of blocks with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitBlock) -> BitBlock {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitBlock) -> bool {
        assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (w, &word) in self.words.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let tz = word.trailing_zeros() as usize;
                out.push(w * 64 + tz);
                word &= word - 1;
            }
        }
        out
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({self})")
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths() {
        assert!(BitBlock::try_zeros(0).is_err());
        assert!(BitBlock::try_zeros(BitBlock::MAX_LEN + 1).is_err());
        assert!(BitBlock::try_zeros(BitBlock::MAX_LEN).is_ok());
    }

    #[test]
    fn tail_bits_stay_clear() {
        let b = BitBlock::from_words(70, vec![u64::MAX, u64::MAX]);
        assert_eq!(b.count_ones(), 70);
        assert_eq!(b.words()[1], (1 << 6) - 1);
    }

    #[test]
    fn set_get_and_ones() {
        let mut b = BitBlock::zeros(130);
        for i in [0, 63, 64, 129] {
            b.set(i, true);
        }
        assert_eq!(b.ones(), vec![0, 63, 64, 129]);
        b.set(63, false);
        assert!(!b.get(63));
        assert_eq!(b.count_ones(), 3);
    }

    #[test]
    fn display_is_bit_string() {
        let b = BitBlock::from_bits([true, false, true, true]).unwrap();
        assert_eq!(b.to_string(), "1011");
    }
}
