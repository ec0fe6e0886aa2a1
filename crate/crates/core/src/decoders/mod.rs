//! MAP, successive cancellation, list and belief propagation decoders.
//!
//! Frozen bits are zero. Decoders consume an [`ObservationBlock`] of length
//! `N` and return the information bits in ascending index order.

mod bp;
mod kernels;
mod map;
mod sc;
mod scl;

use std::fmt;
use std::str::FromStr;

pub use bp::{bp_decode, DEFAULT_MAX_ITER};
pub use kernels::{boxplus, hard};
pub use map::map_decode_bec;
pub use sc::{sc_decode_bec, sc_decode_llr};
pub use scl::{scl_decode, scl_decode_with, ListOverflow};

use crate::channels::{ObservationBlock, ObservationFamily};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitBlock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Decoded,
    /// Several information words are equally consistent with the observation.
    Ambiguous,
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Present iff `status` is `Decoded`.
    pub info_bits: Option<BitBlock>,
    /// First information index the decoder could not resolve.
    pub first_error: Option<usize>,
    /// Number of list paths alive at the end (list decoding).
    pub surviving_paths: Option<usize>,
    /// Iterations performed (belief propagation).
    pub iterations: Option<usize>,
}

impl DecodeResult {
    pub(crate) fn decoded(bits: BitBlock) -> Self {
        Self {
            status: DecodeStatus::Decoded,
            info_bits: Some(bits),
            first_error: None,
            surviving_paths: None,
            iterations: None,
        }
    }

    pub(crate) fn undecided(status: DecodeStatus, first_error: Option<usize>) -> Self {
        debug_assert_ne!(status, DecodeStatus::Decoded);
        Self {
            status,
            info_bits: None,
            first_error,
            surviving_paths: None,
            iterations: None,
        }
    }

    pub fn is_decoded(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }

    /// Whether the decoder returned exactly `info`.
    pub fn recovers(&self, info: &BitBlock) -> bool {
        self.info_bits.as_ref() == Some(info)
    }
}

/// Decoder selection with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decoder {
    Map,
    Sc,
    Scl { list: usize, overflow: ListOverflow },
    Bp { max_iter: usize },
}

impl Decoder {
    pub fn scl(list: usize) -> Self {
        Self::Scl {
            list,
            overflow: ListOverflow::default(),
        }
    }

    pub fn bp() -> Self {
        Self::Bp {
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Map => "map",
            Self::Sc => "sc",
            Self::Scl { .. } => "scl",
            Self::Bp { .. } => "bp",
        }
    }

    pub fn list_size(&self) -> Option<usize> {
        match self {
            Self::Scl { list, .. } => Some(*list),
            _ => None,
        }
    }

    pub fn max_iter(&self) -> Option<usize> {
        match self {
            Self::Bp { max_iter } => Some(*max_iter),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Scl { list: 0, .. } => {
                Err(Error::InvalidArgument("list size must be at least 1".into()))
            }
            Self::Bp { max_iter: 0 } => Err(Error::InvalidArgument(
                "max_iter must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn supports(&self, family: ObservationFamily) -> bool {
        !matches!((self, family), (Self::Map, ObservationFamily::Gaussian))
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scl { list, .. } => write!(f, "scl:{list}"),
            Self::Bp { max_iter } => write!(f, "bp:{max_iter}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Decoder {
    type Err = Error;

    /// `map`, `sc`, `scl:<L>`, `bp` or `bp:<max_iter>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized decoder '{s}'"));
        let d = match s.trim().split_once(':') {
            None => match s.trim() {
                "map" => Self::Map,
                "sc" => Self::Sc,
                "bp" => Self::bp(),
                _ => return Err(bad()),
            },
            Some(("scl", l)) => Self::scl(l.parse().map_err(|_| bad())?),
            Some(("bp", m)) => Self::Bp {
                max_iter: m.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Runs `decoder` on `obs`.
pub fn decode(spec: &CodeSpec, obs: &ObservationBlock, decoder: &Decoder) -> Result<DecodeResult> {
    decoder.validate()?;
    if !decoder.supports(obs.family()) {
        return Err(Error::Unsupported(format!(
            "{} decoding of {:?} observations",
            decoder.name(),
            obs.family()
        )));
    }
    match (*decoder, obs.family()) {
        (Decoder::Map, _) => map_decode_bec(spec, obs),
        (Decoder::Sc, ObservationFamily::Erasure) => sc_decode_bec(spec, obs),
        (Decoder::Sc, ObservationFamily::Gaussian) => sc_decode_llr(spec, obs),
        (Decoder::Scl { list, overflow }, _) => scl_decode_with(spec, obs, list, overflow),
        (Decoder::Bp { max_iter }, _) => bp_decode(spec, obs, max_iter),
    }
}

pub(crate) fn check_length(spec: &CodeSpec, obs: &ObservationBlock) -> Result<()> {
    if obs.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            actual: obs.len(),
        });
    }
    Ok(())
}

pub(crate) fn erasure_messages(obs: &ObservationBlock) -> Result<Vec<u8>> {
    Ok(obs
        .to_bec_symbols()?
        .into_iter()
        .map(|s| s.value().map_or(kernels::bec::ERASED, u8::from))
        .collect())
}

pub(crate) fn llr_messages(obs: &ObservationBlock) -> Result<Vec<f64>> {
    if obs.family() != ObservationFamily::Gaussian {
        return Err(Error::Unsupported(
            "LLR decoding of erasure observations".into(),
        ));
    }
    let llrs = obs.to_llrs();
    if let Some(&bad) = llrs.iter().find(|l| !l.is_finite()) {
        return Err(Error::Domain {
            value: bad,
            domain: "finite LLR",
        });
    }
    Ok(llrs)
}

/// Information bits of a full decision vector `u`, ascending index order.
pub(crate) fn info_bits(spec: &CodeSpec, u: &[u8]) -> BitBlock {
    BitBlock::from_bits(spec.info_set().iter().map(|&i| u[i] == 1))
        .expect("dimension is positive")
}
