use std::rc::Rc;

use super::kernels::{bec, hard, Erasure, Kernel, Llr};
use super::{check_length, erasure_messages, llr_messages, DecodeResult, DecodeStatus};
use crate::channels::{softplus, ObservationBlock, ObservationFamily};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitBlock;

/// What the erasure-channel list decoder does when more than `L` consistent
/// paths are alive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ListOverflow {
    /// Declare failure: every surviving path is equally likely.
    #[default]
    Fail,
    /// Keep the first `L` paths in lexicographic order of their decisions.
    Prune,
}

struct Decision {
    bit: u8,
    prev: Option<Rc<Decision>>,
}

/// One list path. Index `d` of `llr` and `left` holds depth `d` (length `N >> d`);
/// index 0 is unused because depth 0 is the shared channel observation.
struct Path<M> {
    llr: Vec<Rc<Vec<M>>>,
    left: Vec<Rc<Vec<u8>>>,
    decisions: Option<Rc<Decision>>,
    metric: f64,
}

impl<M: Clone> Clone for Path<M> {
    fn clone(&self) -> Self {
        Self {
            llr: self.llr.clone(),
            left: self.left.clone(),
            decisions: self.decisions.clone(),
            metric: self.metric,
        }
    }
}

/// Mutable access to a buffer, replacing it when another path shares it.
fn writable<T: Clone>(slot: &mut Rc<Vec<T>>, fill: T) -> &mut Vec<T> {
    if Rc::get_mut(slot).is_none() {
        *slot = Rc::new(vec![fill; slot.len()]);
    }
    Rc::get_mut(slot).expect("fresh buffer is unique")
}

struct Tree<'a, K: Kernel> {
    n: usize,
    channel: &'a [K::Msg],
    /// Scratch for re-encoding while climbing.
    enc: Vec<u8>,
    enc_next: Vec<u8>,
}

impl<'a, K: Kernel> Tree<'a, K> {
    fn new(channel: &'a [K::Msg]) -> Self {
        let len = channel.len();
        Self {
            n: len.trailing_zeros() as usize,
            channel,
            enc: Vec::with_capacity(len),
            enc_next: Vec::with_capacity(len),
        }
    }

    fn root(&self) -> Path<K::Msg> {
        let len = self.channel.len();
        Path {
            llr: (0..=self.n).map(|d| Rc::new(vec![K::unknown(); len >> d])).collect(),
            left: (0..=self.n).map(|d| Rc::new(vec![0; len >> d])).collect(),
            decisions: None,
            metric: 0.0,
        }
    }

    /// Message at the leaf decided in step `phi`.
    fn descend(&self, path: &mut Path<K::Msg>, phi: usize) -> K::Msg {
        let n = self.n;
        let first = if phi == 0 { 1 } else { n - phi.trailing_zeros() as usize };
        for d in first..=n {
            let (lo, hi) = path.llr.split_at_mut(d);
            let parent: &[K::Msg] = if d == 1 { self.channel } else { &lo[d - 1] };
            let target = writable(&mut hi[0], K::unknown());
            if d == first && phi != 0 {
                let s = &path.left[d];
                for (j, t) in target.iter_mut().enumerate() {
                    *t = K::var(parent[2 * j], parent[2 * j + 1], s[j]);
                }
            } else {
                for (j, t) in target.iter_mut().enumerate() {
                    *t = K::check(parent[2 * j], parent[2 * j + 1]);
                }
            }
        }
        path.llr[n][0]
    }

    /// Records the decision `u` of step `phi` in the partial-sum state.
    fn climb(&mut self, path: &mut Path<K::Msg>, phi: usize, u: u8) {
        let n = self.n;
        self.enc.clear();
        self.enc.push(u);
        let mut d = n;
        while d > 0 {
            if phi >> (n - d) & 1 == 0 {
                writable(&mut path.left[d], 0).copy_from_slice(&self.enc);
                return;
            }
            let s = &path.left[d];
            self.enc_next.clear();
            for (j, &t) in self.enc.iter().enumerate() {
                self.enc_next.push(s[j] ^ t);
                self.enc_next.push(t);
            }
            std::mem::swap(&mut self.enc, &mut self.enc_next);
            d -= 1;
        }
    }
}

fn bit_reverse(phi: usize, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        phi.reverse_bits() >> (usize::BITS as usize - n)
    }
}

/// A child of path `parent` extended by `bit`.
struct Child {
    parent: usize,
    bit: u8,
    metric: f64,
}

/// Builds the next list from `children`, moving each parent into its last child.
fn spawn<M: Clone>(paths: Vec<Path<M>>, children: &[Child]) -> Vec<Path<M>> {
    let mut uses = vec![0usize; paths.len()];
    for c in children {
        uses[c.parent] += 1;
    }
    let mut slots: Vec<Option<Path<M>>> = paths.into_iter().map(Some).collect();
    children
        .iter()
        .map(|c| {
            uses[c.parent] -= 1;
            let mut p = if uses[c.parent] == 0 {
                slots[c.parent].take().expect("parent used once more than counted")
            } else {
                slots[c.parent].clone().expect("parent still present")
            };
            p.metric = c.metric;
            p
        })
        .collect()
}

struct Outcome<M> {
    paths: Vec<Path<M>>,
    /// `(index, alive paths)` when the list overflowed under `ListOverflow::Fail`.
    overflow: Option<(usize, usize)>,
    /// Index at which the last paths died.
    extinct_at: Option<usize>,
}

/// Runs the list decoder; `expand` turns each path's leaf message into children.
fn run<K: Kernel>(
    spec: &CodeSpec,
    channel: &[K::Msg],
    list: usize,
    overflow: ListOverflow,
    mut expand: impl FnMut(usize, bool, K::Msg, &Path<K::Msg>, &mut Vec<Child>),
    rank: bool,
) -> Outcome<K::Msg> {
    let mask = spec.info_mask();
    let mut tree = Tree::<K>::new(channel);
    let n = tree.n;
    let mut paths = vec![tree.root()];
    let mut children = Vec::with_capacity(2 * list);
    for phi in 0..channel.len() {
        let i = bit_reverse(phi, n);
        children.clear();
        for (p, path) in paths.iter_mut().enumerate() {
            let m = tree.descend(path, phi);
            expand(p, mask[i], m, path, &mut children);
        }
        if children.is_empty() {
            return Outcome {
                paths: Vec::new(),
                overflow: None,
                extinct_at: Some(i),
            };
        }
        if children.len() > list {
            if rank {
                children.sort_by(|a, b| a.metric.total_cmp(&b.metric));
            } else if overflow == ListOverflow::Fail {
                return Outcome {
                    paths: Vec::new(),
                    overflow: Some((i, children.len())),
                    extinct_at: None,
                };
            }
            children.truncate(list);
        }
        paths = spawn(paths, &children);
        for (path, c) in paths.iter_mut().zip(&children) {
            if mask[i] {
                path.decisions = Some(Rc::new(Decision {
                    bit: c.bit,
                    prev: path.decisions.take(),
                }));
            }
            tree.climb(path, phi, c.bit);
        }
    }
    Outcome {
        paths,
        overflow: None,
        extinct_at: None,
    }
}

/// Information bits of a path in ascending index order.
fn path_bits(spec: &CodeSpec, path: &Path<impl Clone>) -> BitBlock {
    let n = spec.n() as usize;
    let mask = spec.info_mask();
    // position within the information set of each information step, in decoding order
    let mut rank_of = vec![0usize; spec.len()];
    for (t, &i) in spec.info_set().iter().enumerate() {
        rank_of[i] = t;
    }
    let order: Vec<usize> = (0..spec.len())
        .map(|phi| bit_reverse(phi, n))
        .filter(|&i| mask[i])
        .map(|i| rank_of[i])
        .collect();
    let mut bits = BitBlock::zeros(spec.dimension());
    let mut node = path.decisions.as_deref();
    for &t in order.iter().rev() {
        let d = node.expect("one decision per information bit");
        bits.set(t, d.bit == 1);
        node = d.prev.as_deref();
    }
    bits
}

/// List decoding with the default overflow rule.
pub fn scl_decode(spec: &CodeSpec, obs: &ObservationBlock, list: usize) -> Result<DecodeResult> {
    scl_decode_with(spec, obs, list, ListOverflow::default())
}

/// Successive cancellation list decoding with `list` paths.
///
/// On LLRs, paths are ranked by `μ += ln(1 + e^{-(1-2u)λ})` and the
/// smallest-metric path is returned. On erasures, paths fork only at erased
/// information bits, paths contradicting the observation or a frozen bit are
/// dropped, and the result is `Decoded` only if a single path survives.
pub fn scl_decode_with(
    spec: &CodeSpec,
    obs: &ObservationBlock,
    list: usize,
    overflow: ListOverflow,
) -> Result<DecodeResult> {
    if list == 0 {
        return Err(Error::InvalidArgument("list size must be at least 1".into()));
    }
    check_length(spec, obs)?;
    match obs.family() {
        ObservationFamily::Erasure => scl_bec(spec, &erasure_messages(obs)?, list, overflow),
        ObservationFamily::Gaussian => scl_llr(spec, &llr_messages(obs)?, list),
    }
}

fn scl_bec(spec: &CodeSpec, msgs: &[u8], list: usize, overflow: ListOverflow) -> Result<DecodeResult> {
    let expand = |p: usize, info: bool, m: u8, _: &Path<u8>, out: &mut Vec<Child>| {
        let child = |bit| Child {
            parent: p,
            bit,
            metric: 0.0,
        };
        match (info, m) {
            (_, bec::CONFLICT) => {}
            (false, bec::ONE) => {}
            (false, _) => out.push(child(0)),
            (true, bec::ERASED) => {
                out.push(child(0));
                out.push(child(1));
            }
            (true, bit) => out.push(child(bit)),
        }
    };
    let outcome = run::<Erasure>(spec, msgs, list, overflow, expand, false);
    let result = if let Some((i, alive)) = outcome.overflow {
        let mut r = DecodeResult::undecided(DecodeStatus::Failed, Some(i));
        r.surviving_paths = Some(alive);
        r
    } else {
        let alive = outcome.paths.len();
        let mut r = match alive {
            0 => DecodeResult::undecided(DecodeStatus::Failed, outcome.extinct_at),
            1 => DecodeResult::decoded(path_bits(spec, &outcome.paths[0])),
            _ => DecodeResult::undecided(DecodeStatus::Ambiguous, None),
        };
        r.surviving_paths = Some(alive);
        r
    };
    Ok(result)
}

fn scl_llr(spec: &CodeSpec, llrs: &[f64], list: usize) -> Result<DecodeResult> {
    let expand = |p: usize, info: bool, l: f64, path: &Path<f64>, out: &mut Vec<Child>| {
        let cost = |bit: u8| path.metric + softplus(if bit == 0 { -l } else { l });
        if info {
            // the hard decision goes first so that ties keep it
            let h = hard(l);
            out.push(Child {
                parent: p,
                bit: h,
                metric: cost(h),
            });
            out.push(Child {
                parent: p,
                bit: 1 - h,
                metric: cost(1 - h),
            });
        } else {
            out.push(Child {
                parent: p,
                bit: 0,
                metric: cost(0),
            });
        }
    };
    let outcome = run::<Llr>(spec, llrs, list, ListOverflow::Prune, expand, true);
    let best = outcome
        .paths
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.metric.total_cmp(&b.1.metric).then(a.0.cmp(&b.0)))
        .map(|(_, p)| p)
        .expect("LLR paths never die");
    let mut r = DecodeResult::decoded(path_bits(spec, best));
    r.surviving_paths = Some(outcome.paths.len());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_reversal() {
        assert_eq!(bit_reverse(1, 3), 4);
        assert_eq!(bit_reverse(6, 3), 3);
        assert_eq!(bit_reverse(0, 0), 0);
    }

    #[test]
    fn tree_leaf_order_matches_recursive_sc() {
        let channel: Vec<f64> = (0..16).map(|k| (k as f64 * 0.7).sin() * 3.0).collect();
        let mut rec = Vec::new();
        super::super::sc::sc_tree::<Llr>(&channel, |i, l| {
            rec.push((i, l));
            Some(hard(l))
        });
        let mut tree = Tree::<Llr>::new(&channel);
        let mut path = tree.root();
        for (phi, &(i, l)) in rec.iter().enumerate() {
            assert_eq!(bit_reverse(phi, 4), i);
            let m = tree.descend(&mut path, phi);
            assert_eq!(m.to_bits(), l.to_bits());
            tree.climb(&mut path, phi, hard(m));
        }
    }
}
