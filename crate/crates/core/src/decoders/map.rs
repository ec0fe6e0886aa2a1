use super::{check_length, DecodeResult, DecodeStatus};
use crate::channels::ObservationBlock;
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::{EquationSystem, Solution};

/// Exact MAP decoding over the erasure channel by Gaussian elimination.
///
/// Each unerased position `j` gives the equation `Σ_{i ∈ A, i ⊇ j} u_i = y_j`.
pub fn map_decode_bec(spec: &CodeSpec, obs: &ObservationBlock) -> Result<DecodeResult> {
    check_length(spec, obs)?;
    let symbols = obs.to_bec_symbols()?;
    let info = spec.info_set();
    let known = symbols.iter().filter(|s| s.value().is_some()).count();
    let mut system = EquationSystem::with_capacity(info.len(), known);
    for (j, s) in symbols.iter().enumerate() {
        if let Some(v) = s.value() {
            system.push_with(v, |t| info[t] & j == j);
        }
    }
    match system.solve() {
        Solution::Unique(bits) => Ok(DecodeResult::decoded(bits)),
        Solution::NonUnique => Ok(DecodeResult::undecided(DecodeStatus::Ambiguous, None)),
        Solution::Inconsistent => Err(Error::Integrity(
            "observation is not consistent with any codeword".into(),
        )),
    }
}
