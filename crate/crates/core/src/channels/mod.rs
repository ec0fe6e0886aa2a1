//! Binary memoryless symmetric channels used for design and simulation.
//!
//! BPSK maps bit 0 to +1 and bit 1 to -1; a positive LLR favors bit 0.

pub mod quadrature;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gf2::BitBlock;

/// LLR magnitude used when a symbol is known exactly but consumed by a soft decoder.
pub const PERFECT_LLR: f64 = 1e6;

const CAPACITY_NODES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    /// Binary erasure channel with erasure probability ε.
    Bec(f64),
    /// Binary-input AWGN channel with noise variance σ².
    Bawgn(f64),
    /// Uses the perfect channel with probability 1 - α and `base` otherwise.
    /// The receiver learns which one was used.
    ConvexPerfect { base: Box<ChannelModel>, alpha: f64 },
}

impl ChannelModel {
    pub fn bec(epsilon: f64) -> Result<Self> {
        let c = Self::Bec(epsilon);
        c.validate()?;
        Ok(c)
    }

    pub fn bawgn(variance: f64) -> Result<Self> {
        let c = Self::Bawgn(variance);
        c.validate()?;
        Ok(c)
    }

    /// BAWGN channel at `snr_db = 10 log10(1/σ²)`.
    pub fn bawgn_snr_db(snr_db: f64) -> Result<Self> {
        Self::bawgn(snr_db_to_variance(snr_db))
    }

    pub fn convex_perfect(base: ChannelModel, alpha: f64) -> Result<Self> {
        let c = Self::ConvexPerfect {
            base: Box::new(base),
            alpha,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bec(e) => {
                if !(0.0..=1.0).contains(e) {
                    return Err(Error::Domain {
                        value: *e,
                        domain: "[0,1]",
                    });
                }
            }
            Self::Bawgn(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Error::Domain {
                        value: *v,
                        domain: "(0,inf)",
                    });
                }
            }
            Self::ConvexPerfect { base, alpha } => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(Error::Domain {
                        value: *alpha,
                        domain: "[0,1]",
                    });
                }
                if matches!(**base, Self::ConvexPerfect { .. }) {
                    return Err(Error::InvalidArgument(
                        "convex combination cannot nest another convex combination".into(),
                    ));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// The underlying non-perfect channel and the probability of using it.
    pub fn split(&self) -> (&ChannelModel, f64) {
        match self {
            Self::ConvexPerfect { base, alpha } => (base, *alpha),
            other => (other, 1.0),
        }
    }

    /// Whether observations are erasure symbols (as opposed to LLRs).
    pub fn family(&self) -> ObservationFamily {
        match self.split().0 {
            Self::Bawgn(_) => ObservationFamily::Gaussian,
            _ => ObservationFamily::Erasure,
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bec(e) => write!(f, "bec:{e}"),
            Self::Bawgn(v) => write!(f, "bawgn:{v}"),
            Self::ConvexPerfect { base, alpha } => write!(f, "convex:{base}:alpha={alpha}"),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized channel descriptor '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["bec", e] => Self::bec(num(e)?),
            ["bawgn", v] => Self::bawgn(num(v)?),
            ["convex", kind, p, a] => {
                let alpha = a.strip_prefix("alpha=").ok_or_else(bad)?;
                let base = format!("{kind}:{p}").parse::<ChannelModel>()?;
                Self::convex_perfect(base, num(alpha)?)
            }
            _ => Err(bad()),
        }
    }
}

pub fn snr_db_to_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn variance_to_snr_db(variance: f64) -> f64 {
    -10.0 * variance.log10()
}

/// Bhattacharyya parameter `Z(W)`.
pub fn bhattacharyya(c: &ChannelModel) -> f64 {
    match c {
        ChannelModel::Bec(e) => *e,
        ChannelModel::Bawgn(v) => (-1.0 / (2.0 * v)).exp(),
        ChannelModel::ConvexPerfect { base, alpha } => alpha * bhattacharyya(base),
    }
}

/// Symmetric capacity in bits per channel use.
pub fn capacity(c: &ChannelModel) -> f64 {
    match c {
        ChannelModel::Bec(e) => 1.0 - e,
        ChannelModel::Bawgn(v) => bawgn_capacity(*v),
        ChannelModel::ConvexPerfect { base, alpha } => alpha * capacity(base) + (1.0 - alpha),
    }
}

fn bawgn_capacity(variance: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let rule = RULE.get_or_init(|| quadrature::gauss_hermite(CAPACITY_NODES));
    // Given bit 0, the LLR is N(2/σ², 4/σ²); C = 1 - E[log2(1 + e^{-L})].
    let mean = 2.0 / variance;
    let std = 2.0 / variance.sqrt();
    let loss = quadrature::gaussian_expectation(rule, mean, std, |l| softplus(-l));
    (1.0 - loss / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// LLR of a BAWGN output for transmitted `bit` and additive `noise`.
pub fn bawgn_llr(bit: bool, noise: f64, variance: f64) -> f64 {
    let x = if bit { -1.0 } else { 1.0 };
    2.0 * (x + noise) / variance
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BecSymbol {
    Zero,
    One,
    Erased,
}

impl BecSymbol {
    pub fn known(bit: bool) -> Self {
        if bit {
            Self::One
        } else {
            Self::Zero
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            Self::Zero => Some(false),
            Self::One => Some(true),
            Self::Erased => None,
        }
    }
}

/// One received symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Observation {
    Erasure(BecSymbol),
    Llr(f64),
    /// Delivered by the perfect channel.
    Perfect(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObservationFamily {
    /// Erasure-channel symbols (possibly mixed with perfect ones).
    Erasure,
    /// Gaussian LLRs (possibly mixed with perfect ones).
    Gaussian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservationBlock {
    family: ObservationFamily,
    symbols: Vec<Observation>,
}

impl ObservationBlock {
    pub fn new(family: ObservationFamily, symbols: Vec<Observation>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Size("empty observation block".into()));
        }
        for (i, o) in symbols.iter().enumerate() {
            let ok = match (family, o) {
                (_, Observation::Perfect(_)) => true,
                (ObservationFamily::Erasure, Observation::Erasure(_)) => true,
                (ObservationFamily::Gaussian, Observation::Llr(l)) => l.is_finite(),
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "observation {i} ({o:?}) does not belong to a {family:?} block"
                )));
            }
        }
        Ok(Self { family, symbols })
    }

    pub fn family(&self) -> ObservationFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Observation] {
        &self.symbols
    }

    pub fn erasure_count(&self) -> usize {
        self.symbols
            .iter()
            .filter(|o| matches!(o, Observation::Erasure(BecSymbol::Erased)))
            .count()
    }

    pub fn perfect_count(&self) -> usize {
        self.symbols
            .iter()
            .filter(|o| matches!(o, Observation::Perfect(_)))
            .count()
    }

    /// Erasure view: perfect symbols become known values.
    pub fn to_bec_symbols(&self) -> Result<Vec<BecSymbol>> {
        if self.family != ObservationFamily::Erasure {
            return Err(Error::Unsupported(
                "erasure view of a Gaussian observation block".into(),
            ));
        }
        Ok(self
            .symbols
            .iter()
            .map(|o| match *o {
                Observation::Erasure(s) => s,
                Observation::Perfect(b) => BecSymbol::known(b),
                Observation::Llr(_) => unreachable!("validated at construction"),
            })
            .collect())
    }

    /// LLR view: erasures become 0 and perfect symbols become `±PERFECT_LLR`.
    pub fn to_llrs(&self) -> Vec<f64> {
        let sure = |b: bool| if b { -PERFECT_LLR } else { PERFECT_LLR };
        self.symbols
            .iter()
            .map(|o| match *o {
                Observation::Llr(l) => l,
                Observation::Perfect(b) => sure(b),
                Observation::Erasure(s) => s.value().map_or(0.0, sure),
            })
            .collect()
    }
}

/// Sends `codeword` through `c`, one independent channel use per symbol.
pub fn transmit<R: Rng + ?Sized>(
    c: &ChannelModel,
    codeword: &BitBlock,
    rng: &mut R,
) -> ObservationBlock {
    let (base, alpha) = c.split();
    let symbols = codeword
        .iter()
        .map(|bit| {
            if alpha < 1.0 && rng.random::<f64>() >= alpha {
                return Observation::Perfect(bit);
            }
            match base {
                ChannelModel::Bec(e) => {
                    if rng.random::<f64>() < *e {
                        Observation::Erasure(BecSymbol::Erased)
                    } else {
                        Observation::Erasure(BecSymbol::known(bit))
                    }
                }
                ChannelModel::Bawgn(v) => {
                    let z: f64 = StandardNormal.sample(rng);
                    Observation::Llr(bawgn_llr(bit, v.sqrt() * z, *v))
                }
                ChannelModel::ConvexPerfect { .. } => unreachable!("nesting rejected"),
            }
        })
        .collect();
    ObservationBlock {
        family: c.family(),
        symbols,
    }
}
