//! Bit-packed GF(2) linear algebra over the Kronecker generator `G_N = F^{⊗n}`.
//!
//! Rows of `G_N` are indexed in natural order; no bit-reversal permutation is
//! applied anywhere in the crate.

mod bitblock;
mod matrix;

pub use bitblock::BitBlock;
pub(crate) use matrix::EquationSystem;
pub use matrix::{kron_power, rank, solve_unique, GF2Matrix, Solution, KRON_MATERIALIZE_CAP};

use crate::error::{Error, Result};

/// Masks selecting the lower bit of each in-word butterfly pair, per stage.
const STAGE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Computes `u · G_N` with `n` in-place butterfly stages.
///
/// Position `j` of the result is the XOR of `u_i` over all `i` whose binary
/// digits contain those of `j`.
pub fn encode(u: &BitBlock) -> Result<BitBlock> {
    let len = u.len();
    if !len.is_power_of_two() {
        return Err(Error::Size(format!("encode length {len} is not a power of two")));
    }
    let mut x = u.clone();
    encode_in_place(&mut x);
    Ok(x)
}

pub(crate) fn encode_in_place(x: &mut BitBlock) {
    let n = x.len().trailing_zeros() as usize;
    let words = x.words_mut();
    for s in 0..n.min(6) {
        let d = 1u32 << s;
        let mask = STAGE_MASKS[s];
        for w in words.iter_mut() {
            *w ^= (*w >> d) & mask;
        }
    }
    for s in 6..n {
        let stride = 1usize << (s - 6);
        for base in (0..words.len()).step_by(2 * stride) {
            for k in base..base + stride {
                words[k] ^= words[k + stride];
            }
        }
    }
}

/// Hamming weight of row `i` of `G_N`, `2^{popcount(i)}`, without materializing it.
pub fn row_weight(i: usize, n: u32) -> Result<u64> {
    let bound = 1usize << n;
    if i >= bound {
        return Err(Error::IndexOutOfRange { index: i, bound });
    }
    Ok(1u64 << i.count_ones())
}

/// Binary expansion `(b_1, ..., b_n)` of an index, most significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryExpansion {
    bits: Vec<u8>,
}

impl BinaryExpansion {
    pub fn of(index: usize, n: u32) -> Result<Self> {
        let bound = 1usize << n;
        if index >= bound {
            return Err(Error::IndexOutOfRange { index, bound });
        }
        let bits = (0..n).rev().map(|k| (index >> k & 1) as u8).collect();
        Ok(Self { bits })
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain {
                value: b as f64,
                domain: "{0,1}",
            });
        }
        Ok(Self { bits })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    /// Bits with `b_1` (the most significant) first.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn value(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
    }

    pub fn weight(&self) -> u32 {
        self.bits.iter().map(|&b| b as u32).sum()
    }
}
