//! Message kernels shared by the tree (SC/SCL) and graph (BP) decoders.
//!
//! A node with input messages `llr` of length `2m` splits into the even
//! position (`x_{2j} = s_j ⊕ t_j`) and the odd position (`x_{2j+1} = t_j`),
//! where `s` and `t` are the re-encoded outputs of the left and right children.

use crate::channels::PERFECT_LLR;

const LLR_CLAMP: f64 = 40.0;

/// Erasure-domain message values.
pub(crate) mod bec {
    #[cfg(test)]
    pub const ZERO: u8 = 0;
    pub const ONE: u8 = 1;
    pub const ERASED: u8 = 2;
    /// Contradictory evidence; absorbs everything it meets.
    pub const CONFLICT: u8 = 3;

    #[inline]
    pub fn known(m: u8) -> bool {
        m <= ONE
    }
}

/// Operations a message alphabet must provide.
pub(crate) trait Kernel {
    type Msg: Copy + PartialEq + std::fmt::Debug;

    /// Parity of two independent observations.
    fn check(a: Self::Msg, b: Self::Msg) -> Self::Msg;

    /// Two independent observations of the same bit.
    fn equal(a: Self::Msg, b: Self::Msg) -> Self::Msg;

    /// Observation of `t` from `even` (which sees `s ⊕ t`) and `odd`, given `s`.
    fn var(even: Self::Msg, odd: Self::Msg, s: u8) -> Self::Msg;

    /// Message for a symbol known to equal `bit`.
    fn sure(bit: u8) -> Self::Msg;

    /// Message carrying no information.
    fn unknown() -> Self::Msg;
}

pub(crate) struct Llr;

impl Kernel for Llr {
    type Msg = f64;

    #[inline]
    fn check(a: f64, b: f64) -> f64 {
        boxplus(a, b)
    }

    #[inline]
    fn equal(a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn var(even: f64, odd: f64, s: u8) -> f64 {
        if s == 0 {
            odd + even
        } else {
            odd - even
        }
    }

    #[inline]
    fn sure(bit: u8) -> f64 {
        if bit == 0 {
            PERFECT_LLR
        } else {
            -PERFECT_LLR
        }
    }

    #[inline]
    fn unknown() -> f64 {
        0.0
    }
}

pub(crate) struct Erasure;

impl Kernel for Erasure {
    type Msg = u8;

    #[inline]
    fn check(a: u8, b: u8) -> u8 {
        if a == bec::CONFLICT || b == bec::CONFLICT {
            bec::CONFLICT
        } else if bec::known(a) && bec::known(b) {
            a ^ b
        } else {
            bec::ERASED
        }
    }

    #[inline]
    fn equal(a: u8, b: u8) -> u8 {
        match (a, b) {
            (bec::CONFLICT, _) | (_, bec::CONFLICT) => bec::CONFLICT,
            (bec::ERASED, x) | (x, bec::ERASED) => x,
            (x, y) if x == y => x,
            _ => bec::CONFLICT,
        }
    }

    #[inline]
    fn var(even: u8, odd: u8, s: u8) -> u8 {
        let flipped = if bec::known(even) { even ^ s } else { even };
        Self::equal(flipped, odd)
    }

    #[inline]
    fn sure(bit: u8) -> u8 {
        bit
    }

    #[inline]
    fn unknown() -> u8 {
        bec::ERASED
    }
}

/// `2 atanh(tanh(a/2) tanh(b/2))` in a form that neither overflows nor cancels.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let a = a.clamp(-LLR_CLAMP, LLR_CLAMP);
    let b = b.clamp(-LLR_CLAMP, LLR_CLAMP);
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Hard decision, ties resolved to 0.
#[inline]
pub fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxplus_ref(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn boxplus_matches_definition() {
        for a in [-7.5, -2.0, -0.3, 0.0, 0.1, 1.0, 4.0, 9.0] {
            for b in [-6.0, -1.1, -0.01, 0.0, 0.5, 2.5, 8.0] {
                let (x, y) = (boxplus(a, b), boxplus_ref(a, b));
                assert!((x - y).abs() < 1e-12, "{a} {b}: {x} vs {y}");
            }
        }
    }

    /// `ln((1 + e^{a+b}) / (e^a + e^b))`, usable where `tanh` saturates.
    fn boxplus_log_ref(a: f64, b: f64) -> f64 {
        (1.0 + (a + b).exp()).ln() - (a.exp() + b.exp()).ln()
    }

    #[test]
    fn boxplus_is_safe_for_large_inputs() {
        assert!((boxplus(1e6, 1e6) - boxplus_log_ref(40.0, 40.0)).abs() < 1e-12);
        assert!((boxplus(1e6, -3.0) + 3.0).abs() < 1e-12);
        assert_eq!(boxplus(0.0, 1e6), 0.0);
        assert!(boxplus(-1e300, 1e300).is_finite());
    }

    #[test]
    fn hard_ties_to_zero() {
        assert_eq!(hard(0.0), 0);
        assert_eq!(hard(-0.0), 0);
        assert_eq!(hard(-1e-300), 1);
        assert_eq!(hard(2.0), 0);
    }

    #[test]
    fn erasure_rules() {
        use bec::*;
        assert_eq!(Erasure::check(ONE, ONE), ZERO);
        assert_eq!(Erasure::check(ONE, ERASED), ERASED);
        assert_eq!(Erasure::check(CONFLICT, ERASED), CONFLICT);
        assert_eq!(Erasure::var(ONE, ERASED, 1), ZERO);
        assert_eq!(Erasure::var(ERASED, ONE, 0), ONE);
        assert_eq!(Erasure::var(ONE, ONE, 1), CONFLICT);
        assert_eq!(Erasure::var(ONE, ONE, 0), ONE);
        assert_eq!(Erasure::var(ERASED, ERASED, 1), ERASED);
        assert_eq!(Erasure::equal(ZERO, ERASED), ZERO);
    }

    #[test]
    fn llr_var_flips_even_branch() {
        assert_eq!(Llr::var(2.0, 3.0, 0), 5.0);
        assert_eq!(Llr::var(2.0, 3.0, 1), 1.0);
    }
}
