use super::kernels::{bec, hard, Erasure, Kernel, Llr};
use super::{check_length, erasure_messages, info_bits, llr_messages, DecodeResult, DecodeStatus};
use crate::channels::ObservationBlock;
use crate::construction::CodeSpec;
use crate::error::Result;

/// Walks the decoding tree depth first, calling `leaf(index, message)` for
/// each synthetic channel in decoding order. `leaf` returns the decided bit,
/// or `None` to stop early. Returns whether every leaf was decided.
pub(crate) fn sc_tree<K: Kernel>(
    channel: &[K::Msg],
    mut leaf: impl FnMut(usize, K::Msg) -> Option<u8>,
) -> bool {
    let len = channel.len();
    let mut scratch = vec![K::unknown(); len.saturating_sub(1)];
    let mut enc = vec![0u8; len];
    let mut enc_scratch = vec![0u8; len.saturating_sub(1)];
    recurse::<K, _>(channel, &mut scratch, &mut enc, &mut enc_scratch, 0, 1, &mut leaf)
}

fn recurse<K: Kernel, F: FnMut(usize, K::Msg) -> Option<u8>>(
    msgs: &[K::Msg],
    scratch: &mut [K::Msg],
    out: &mut [u8],
    enc_scratch: &mut [u8],
    base: usize,
    step: usize,
    leaf: &mut F,
) -> bool {
    let m = msgs.len();
    if m == 1 {
        return match leaf(base, msgs[0]) {
            Some(u) => {
                out[0] = u;
                true
            }
            None => false,
        };
    }
    let half = m / 2;
    let (child, rest) = scratch.split_at_mut(half);
    let (s, enc_rest) = enc_scratch.split_at_mut(half);
    for j in 0..half {
        child[j] = K::check(msgs[2 * j], msgs[2 * j + 1]);
    }
    if !recurse::<K, F>(child, rest, s, enc_rest, base, 2 * step, leaf) {
        return false;
    }
    for j in 0..half {
        child[j] = K::var(msgs[2 * j], msgs[2 * j + 1], s[j]);
    }
    if !recurse::<K, F>(child, rest, &mut out[half..], enc_rest, base + step, 2 * step, leaf) {
        return false;
    }
    // in place: position half + j is read before 2j and 2j + 1 are written
    for j in 0..half {
        let t = out[half + j];
        out[2 * j] = s[j] ^ t;
        out[2 * j + 1] = t;
    }
    true
}

/// Successive cancellation over the erasure channel.
///
/// Stops with `Failed` at the first information bit that is still erased.
pub fn sc_decode_bec(spec: &CodeSpec, obs: &ObservationBlock) -> Result<DecodeResult> {
    check_length(spec, obs)?;
    let msgs = erasure_messages(obs)?;
    let mask = spec.info_mask();
    let mut u = vec![0u8; spec.len()];
    let mut stuck = None;
    let complete = sc_tree::<Erasure>(&msgs, |i, m| {
        if !mask[i] {
            return Some(0);
        }
        if bec::known(m) {
            u[i] = m;
            Some(m)
        } else {
            stuck = Some(i);
            None
        }
    });
    if complete {
        Ok(DecodeResult::decoded(info_bits(spec, &u)))
    } else {
        Ok(DecodeResult::undecided(DecodeStatus::Failed, stuck))
    }
}

/// Successive cancellation on channel LLRs. Always returns `Decoded`.
pub fn sc_decode_llr(spec: &CodeSpec, obs: &ObservationBlock) -> Result<DecodeResult> {
    check_length(spec, obs)?;
    let llrs = llr_messages(obs)?;
    let mask = spec.info_mask();
    let mut u = vec![0u8; spec.len()];
    sc_tree::<Llr>(&llrs, |i, l| {
        if mask[i] {
            u[i] = hard(l);
        }
        Some(u[i])
    });
    Ok(DecodeResult::decoded(info_bits(spec, &u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{encode, BitBlock};

    #[test]
    fn leaves_visit_bit_reversed_order() {
        let mut seen = Vec::new();
        sc_tree::<Llr>(&[0.0; 8], |i, _| {
            seen.push(i);
            Some(0)
        });
        assert_eq!(seen, vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn tree_reencodes_decisions() {
        // deciding every leaf from a known codeword returns u itself and
        // leaves the encoded output equal to the codeword
        for n in 0..=6u32 {
            let len = 1usize << n;
            for seed in 0..20u64 {
                let u: Vec<u8> = (0..len).map(|i| ((seed * 31 + i as u64 * 7) >> 2 & 1) as u8).collect();
                let ub = BitBlock::from_bits(u.iter().map(|&b| b == 1)).unwrap();
                let x = encode(&ub).unwrap();
                let msgs: Vec<u8> = x.iter().map(u8::from).collect();
                let mut got = vec![9u8; len];
                assert!(sc_tree::<Erasure>(&msgs, |i, m| {
                    got[i] = m;
                    Some(m)
                }));
                assert_eq!(got, u);
            }
        }
    }
}
