use super::kernels::{bec, hard, Erasure, Kernel, Llr};
use super::{check_length, erasure_messages, info_bits, llr_messages, DecodeResult, DecodeStatus};
use crate::channels::{ObservationBlock, ObservationFamily};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100;

/// Messages on the `n + 1` layers of the butterfly graph.
///
/// Layer 0 holds the bits `u`, layer `n` the codeword. The stage between
/// layers `l` and `l + 1` pairs `a` with `b = a | 2^(n-1-l)` and maps
/// `(v_a, v_b)` to `(v_a ⊕ v_b, v_b)`.
struct Graph<K: Kernel> {
    n: usize,
    /// Messages travelling towards layer 0.
    left: Vec<Vec<K::Msg>>,
    /// Messages travelling towards layer n.
    right: Vec<Vec<K::Msg>>,
}

impl<K: Kernel> Graph<K> {
    fn new(channel: &[K::Msg], frozen: &[bool]) -> Self {
        let len = channel.len();
        let n = len.trailing_zeros() as usize;
        let mut left = vec![vec![K::unknown(); len]; n + 1];
        let mut right = vec![vec![K::unknown(); len]; n + 1];
        left[n].copy_from_slice(channel);
        for (r, &f) in right[0].iter_mut().zip(frozen) {
            if f {
                *r = K::sure(0);
            }
        }
        Self { n, left, right }
    }

    fn pairs(&self, l: usize) -> impl Iterator<Item = (usize, usize)> {
        let s = self.n - 1 - l;
        let len = 1usize << self.n;
        (0..len).filter(move |a| a >> s & 1 == 0).map(move |a| (a, a | 1 << s))
    }

    /// Returns whether any message changed.
    fn sweep_left(&mut self) -> bool {
        let mut changed = false;
        for l in (0..self.n).rev() {
            let pairs: Vec<_> = self.pairs(l).collect();
            let (lo, hi) = self.left.split_at_mut(l + 1);
            let (out, inc, r) = (&mut lo[l], &hi[0], &self.right[l]);
            for (a, b) in pairs {
                let na = K::check(inc[a], K::equal(inc[b], r[b]));
                let nb = K::equal(K::check(r[a], inc[a]), inc[b]);
                changed |= na != out[a] || nb != out[b];
                out[a] = na;
                out[b] = nb;
            }
        }
        changed
    }

    fn sweep_right(&mut self) -> bool {
        let mut changed = false;
        for l in 0..self.n {
            let pairs: Vec<_> = self.pairs(l).collect();
            let (lo, hi) = self.right.split_at_mut(l + 1);
            let (r, out, inc) = (&lo[l], &mut hi[0], &self.left[l + 1]);
            for (a, b) in pairs {
                let na = K::check(r[a], K::equal(inc[b], r[b]));
                let nb = K::equal(K::check(r[a], inc[a]), r[b]);
                changed |= na != out[a] || nb != out[b];
                out[a] = na;
                out[b] = nb;
            }
        }
        changed
    }

    fn belief(&self, i: usize) -> K::Msg {
        K::equal(self.left[0][i], self.right[0][i])
    }
}

/// Belief propagation on the butterfly graph: a leftward sweep followed by a
/// rightward sweep per iteration.
///
/// Over erasures the decoder stops as soon as every information bit is known,
/// or at a fixed point (then `Failed`); `max_iter` only bounds LLR decoding.
pub fn bp_decode(spec: &CodeSpec, obs: &ObservationBlock, max_iter: usize) -> Result<DecodeResult> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    check_length(spec, obs)?;
    let frozen: Vec<bool> = spec.info_mask().iter().map(|&m| !m).collect();
    match obs.family() {
        ObservationFamily::Erasure => Ok(bp_bec(spec, &erasure_messages(obs)?, &frozen)),
        ObservationFamily::Gaussian => Ok(bp_llr(spec, &llr_messages(obs)?, &frozen, max_iter)),
    }
}

fn bp_bec(spec: &CodeSpec, msgs: &[u8], frozen: &[bool]) -> DecodeResult {
    let mut g = Graph::<Erasure>::new(msgs, frozen);
    let info = spec.info_set();
    // a safety net only: each productive iteration resolves at least one message
    let cap = 2 * msgs.len() * (g.n + 1) + 1;
    let mut iterations = 0;
    let mut result = loop {
        iterations += 1;
        let moved = g.sweep_left();
        let pending = info.iter().copied().find(|&i| !bec::known(g.belief(i)));
        let Some(first) = pending else {
            let u: Vec<u8> = (0..msgs.len()).map(|i| g.belief(i) & 1).collect();
            break DecodeResult::decoded(info_bits(spec, &u));
        };
        let moved = g.sweep_right() | moved;
        if !moved || iterations >= cap {
            break DecodeResult::undecided(DecodeStatus::Failed, Some(first));
        }
    };
    result.iterations = Some(iterations);
    result
}

fn bp_llr(spec: &CodeSpec, llrs: &[f64], frozen: &[bool], max_iter: usize) -> DecodeResult {
    let mut g = Graph::<Llr>::new(llrs, frozen);
    for it in 0..max_iter {
        g.sweep_left();
        if it + 1 < max_iter {
            g.sweep_right();
        }
    }
    let u: Vec<u8> = (0..llrs.len())
        .map(|i| if frozen[i] { 0 } else { hard(g.belief(i)) })
        .collect();
    let mut result = DecodeResult::decoded(info_bits(spec, &u));
    result.iterations = Some(max_iter);
    result
}
