use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A permutation `π` of the `n` binary-expansion positions, stored one-based.
///
/// Applied to an expansion `b = (b_1, ..., b_n)` (most significant first), it
/// produces `(P_π b)_k = b_{π(k)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LayerPermutation {
    map: Vec<usize>,
}

impl LayerPermutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &p in &map {
            if p == 0 || p > n || seen[p - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{map:?} is not a permutation of 1..={n}"
                )));
            }
            seen[p - 1] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: u32) -> Self {
        Self {
            map: (1..=n as usize).collect(),
        }
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (1..=n as usize).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn n(&self) -> u32 {
        self.map.len() as u32
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &p)| p == k + 1)
    }

    /// Index whose expansion is `P_π` applied to the expansion of `index`.
    pub fn apply(&self, index: usize) -> usize {
        let n = self.map.len();
        let bit = |k: usize| index >> (n - k) & 1;
        (1..=n).fold(0, |acc, k| acc << 1 | bit(self.map[k - 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validates_bijection() {
        assert!(LayerPermutation::new(vec![2, 1, 3]).is_ok());
        assert!(LayerPermutation::new(vec![1, 1]).is_err());
        assert!(LayerPermutation::new(vec![0, 1]).is_err());
        assert!(LayerPermutation::new(vec![1, 3]).is_err());
    }

    #[test]
    fn swap_example() {
        let p = LayerPermutation::new(vec![2, 1]).unwrap();
        assert_eq!(p.apply(1), 2);
        assert_eq!(p.apply(2), 1);
        assert_eq!(p.apply(3), 3);
        assert_eq!(p.apply(0), 0);
    }

    #[test]
    fn cyclic_shift_moves_bits() {
        // (P b)_k = b_{π(k)} with π = (2, 3, 1): (b1, b2, b3) -> (b2, b3, b1)
        let p = LayerPermutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.apply(0b100), 0b001);
        assert_eq!(p.apply(0b010), 0b100);
        assert_eq!(p.apply(0b001), 0b010);
    }

    #[test]
    fn apply_is_bijective_and_weight_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 0..=8u32 {
            let p = LayerPermutation::random(n, &mut rng);
            let mut seen = vec![false; 1 << n];
            for i in 0..1usize << n {
                let j = p.apply(i);
                assert!(!seen[j]);
                seen[j] = true;
                assert_eq!(i.count_ones(), j.count_ones());
            }
        }
    }

    #[test]
    fn identity_is_identity() {
        let p = LayerPermutation::identity(5);
        assert!(p.is_identity());
        assert!((0..32).all(|i| p.apply(i) == i));
    }
}
