use std::fmt;

use super::bitblock::{words_for, BitBlock};
use crate::error::{Error, Result};

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<BitBlock>,
}

impl GF2Matrix {
    pub fn from_rows(rows: Vec<BitBlock>) -> Result<Self> {
        let cols = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::Size("matrix needs at least one row".into())),
        };
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 {
            return Err(Error::Size("matrix needs at least one row".into()));
        }
        let row = BitBlock::try_zeros(cols)?;
        Ok(Self {
            cols,
            rows: vec![row; rows],
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let mut m = Self::zeros(size, size)?;
        for i in 0..size {
            m.rows[i].set(i, true);
        }
        Ok(m)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitBlock {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitBlock] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Row vector times matrix: `x · self`.
    pub fn left_mul(&self, x: &BitBlock) -> Result<BitBlock> {
        if x.len() != self.num_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.num_rows(),
                actual: x.len(),
            });
        }
        let mut out = BitBlock::try_zeros(self.cols)?;
        for i in x.ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = GF2Matrix::zeros(self.cols, self.num_rows()).expect("non-empty");
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.num_rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// Largest `n` for which `kron_power` materializes `F^{⊗n}`.
pub const KRON_MATERIALIZE_CAP: u32 = 14;

/// `F^{⊗n}` with `F = [[1,0],[1,1]]`, in natural row order.
///
/// Entry `(i, j)` is one exactly when the binary digits of `j` are a subset of
/// those of `i`.
pub fn kron_power(n: u32) -> Result<GF2Matrix> {
    if n > KRON_MATERIALIZE_CAP {
        return Err(Error::Size(format!(
            "kron_power({n}) exceeds materialization cap {KRON_MATERIALIZE_CAP}"
        )));
    }
    let size = 1usize << n;
    let rows = (0..size)
        .map(|i| {
            let mut row = BitBlock::zeros(size);
            for j in 0..size {
                if j & !i == 0 {
                    row.set(j, true);
                }
            }
            row
        })
        .collect();
    GF2Matrix::from_rows(rows)
}

/// Outcome of solving `x · A = b` for `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(BitBlock),
    NonUnique,
    Inconsistent,
}

/// Augmented linear system stored as packed equation rows.
///
/// Each equation is a row over `unknowns` coefficients followed by one
/// right-hand-side bit at column `unknowns`.
pub(crate) struct EquationSystem {
    unknowns: usize,
    stride: usize,
    data: Vec<u64>,
    equations: usize,
}

impl EquationSystem {
    pub(crate) fn with_capacity(unknowns: usize, equations: usize) -> Self {
        let stride = words_for(unknowns + 1);
        Self {
            unknowns,
            stride,
            data: Vec::with_capacity(stride * equations),
            equations: 0,
        }
    }

    /// Appends an equation whose coefficients are produced by `coeff(t)`.
    pub(crate) fn push_with(&mut self, rhs: bool, mut coeff: impl FnMut(usize) -> bool) {
        let start = self.data.len();
        self.data.resize(start + self.stride, 0);
        let row = &mut self.data[start..];
        for t in 0..self.unknowns {
            if coeff(t) {
                row[t / 64] |= 1 << (t % 64);
            }
        }
        if rhs {
            row[self.unknowns / 64] |= 1 << (self.unknowns % 64);
        }
        self.equations += 1;
    }

    /// Gauss-Jordan elimination over the coefficient columns.
    ///
    /// Returns the rank and, per unknown, the equation index holding its
    /// pivot (if any).
    fn eliminate(&mut self) -> (usize, Vec<Option<usize>>) {
        let stride = self.stride;
        let mut pivots = vec![None; self.unknowns];
        let mut rank = 0;
        for col in 0..self.unknowns {
            let w = col / 64;
            let bit = 1u64 << (col % 64);
            let Some(p) = (rank..self.equations).find(|&r| self.data[r * stride + w] & bit != 0)
            else {
                continue;
            };
            if p != rank {
                for k in 0..stride {
                    self.data.swap(p * stride + k, rank * stride + k);
                }
            }
            let (before, rest) = self.data.split_at_mut(rank * stride);
            let (pivot, after) = rest.split_at_mut(stride);
            for row in before.chunks_exact_mut(stride).chain(after.chunks_exact_mut(stride)) {
                if row[w] & bit != 0 {
                    for k in w..stride {
                        row[k] ^= pivot[k];
                    }
                }
            }
            pivots[col] = Some(rank);
            rank += 1;
        }
        (rank, pivots)
    }

    fn rhs(&self, eq: usize) -> bool {
        let c = self.unknowns;
        self.data[eq * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub(crate) fn solve(mut self) -> Solution {
        let (rank, pivots) = self.eliminate();
        // rows below the rank have zero coefficients after elimination
        if (rank..self.equations).any(|r| self.rhs(r)) {
            return Solution::Inconsistent;
        }
        if rank < self.unknowns {
            return Solution::NonUnique;
        }
        let mut x = BitBlock::zeros(self.unknowns);
        for (t, p) in pivots.iter().enumerate() {
            if let Some(r) = p {
                x.set(t, self.rhs(*r));
            }
        }
        Solution::Unique(x)
    }
}

/// GF(2) rank by packed Gaussian elimination. The input is not modified.
pub fn rank(m: &GF2Matrix) -> usize {
    let cols = m.num_cols();
    let stride = words_for(cols);
    let mut data: Vec<u64> = m.rows().iter().flat_map(|r| r.words().iter().copied()).collect();
    let rows = m.num_rows();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let w = col / 64;
        let bit = 1u64 << (col % 64);
        let Some(p) = (rank..rows).find(|&r| data[r * stride + w] & bit != 0) else {
            continue;
        };
        if p != rank {
            for k in 0..stride {
                data.swap(p * stride + k, rank * stride + k);
            }
        }
        let (head, tail) = data.split_at_mut((rank + 1) * stride);
        let pivot = &head[rank * stride..];
        for row in tail.chunks_exact_mut(stride) {
            if row[w] & bit != 0 {
                for k in w..stride {
                    row[k] ^= pivot[k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `x · a = b` where the unknowns index the rows of `a`.
///
/// `Unique(x)` when `rank(a)` equals the row count and `b` lies in the row
/// space, `NonUnique` when the system is consistent with free variables, and
/// `Inconsistent` otherwise.
pub fn solve_unique(a: &GF2Matrix, b: &BitBlock) -> Result<Solution> {
    if b.len() != a.num_cols() {
        return Err(Error::DimensionMismatch {
            expected: a.num_cols(),
            actual: b.len(),
        });
    }
    let unknowns = a.num_rows();
    let mut system = EquationSystem::with_capacity(unknowns, a.num_cols());
    for c in 0..a.num_cols() {
        system.push_with(b.get(c), |t| a.get(t, c));
    }
    Ok(system.solve())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rows_from(bits: &[&str]) -> GF2Matrix {
        GF2Matrix::from_rows(
            bits.iter()
                .map(|s| BitBlock::from_bits(s.chars().map(|c| c == '1')).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn kron_small_powers() {
        assert_eq!(kron_power(0).unwrap(), rows_from(&["1"]));
        assert_eq!(kron_power(1).unwrap(), rows_from(&["10", "11"]));
        assert_eq!(
            kron_power(2).unwrap(),
            rows_from(&["1000", "1100", "1010", "1111"])
        );
    }

    #[test]
    fn kron_cap() {
        assert!(matches!(kron_power(15), Err(Error::Size(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&GF2Matrix::identity(4).unwrap()), 4);
        assert_eq!(rank(&rows_from(&["0110", "0110"])), 1);
        assert_eq!(rank(&kron_power(3).unwrap()), 8);
        assert_eq!(rank(&GF2Matrix::zeros(3, 5).unwrap()), 0);
    }

    #[test]
    fn rank_full_for_kron_powers() {
        for n in 0..=8 {
            assert_eq!(rank(&kron_power(n).unwrap()), 1 << n);
        }
    }

    #[test]
    fn rank_leaves_input_alone() {
        let m = rows_from(&["110", "011", "101"]);
        let copy = m.clone();
        assert_eq!(rank(&m), 2);
        assert_eq!(m, copy);
    }

    #[test]
    fn solve_identity() {
        let a = GF2Matrix::identity(5).unwrap();
        let b = BitBlock::from_bits([true, false, true, true, false]).unwrap();
        assert_eq!(solve_unique(&a, &b).unwrap(), Solution::Unique(b));
    }

    #[test]
    fn solve_zero_row_is_non_unique() {
        let a = rows_from(&["100", "000", "001"]);
        let b = BitBlock::from_bits([true, false, true]).unwrap();
        assert_eq!(solve_unique(&a, &b).unwrap(), Solution::NonUnique);
    }

    #[test]
    fn solve_inconsistent() {
        let a = rows_from(&["100", "000", "001"]);
        let b = BitBlock::from_bits([true, true, false]).unwrap();
        assert_eq!(solve_unique(&a, &b).unwrap(), Solution::Inconsistent);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = GF2Matrix::identity(3).unwrap();
        let b = BitBlock::zeros(4);
        assert!(matches!(
            solve_unique(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Random 6x10 full-row-rank systems; uniqueness confirmed by trying all
    /// 2^6 candidate row combinations.
    #[test]
    fn solve_random_full_rank_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let rows: Vec<BitBlock> = (0..6)
                .map(|_| BitBlock::from_bits((0..10).map(|_| rng.random::<bool>())).unwrap())
                .collect();
            let a = GF2Matrix::from_rows(rows).unwrap();
            if rank(&a) != 6 {
                continue;
            }
            let x0 = BitBlock::from_bits((0..6).map(|_| rng.random::<bool>())).unwrap();
            let b = a.left_mul(&x0).unwrap();
            let hits: Vec<u32> = (0u32..64)
                .filter(|&c| {
                    let x = BitBlock::from_bits((0..6).map(|t| c >> t & 1 == 1)).unwrap();
                    a.left_mul(&x).unwrap() == b
                })
                .collect();
            assert_eq!(hits.len(), 1);
            assert_eq!(solve_unique(&a, &b).unwrap(), Solution::Unique(x0));
            checked += 1;
        }
    }

    #[test]
    fn transpose_round_trip() {
        let m = rows_from(&["1100", "0111", "1010"]);
        assert_eq!(m.transpose().transpose(), m);
        assert!(m.transpose().get(3, 1));
    }
}
