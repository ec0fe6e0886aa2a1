//! Information-set selection: the Reed-Muller rule, the channel-specific polar
//! rule, and the family `C_α` that interpolates between them.

mod permutation;
mod profile;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use permutation::LayerPermutation;
pub use profile::{
    bec_profile, bhattacharyya_bec, bhattacharyya_profile, f0, f1, gaussian_profile,
    ProfileSemantics, ReliabilityProfile, MAX_STAGES,
};

use crate::channels::ChannelModel;
use crate::error::{Error, Result};
use crate::gf2::BitBlock;

/// Erasure probability used to order rows of equal weight in the RM rule.
pub const RM_TIE_BREAK_EPSILON: f64 = 1e-3;

/// How the interpolation parameter scales a BAWGN design channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphaScaling {
    /// Design for BAWGN(α σ²) with the Gaussian approximation.
    #[default]
    NoiseVariance,
    /// Design for a channel with Bhattacharyya parameter α Z(W) using the
    /// Bhattacharyya recursion.
    Bhattacharyya,
}

/// A code of length `N = 2^n` given by its information set.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpec {
    n: u32,
    rate: f64,
    alpha: f64,
    channel: Option<ChannelModel>,
    info_set: Vec<usize>,
}

/// Code dimension `round(N R)` with halves rounded up.
pub fn dimension(n: u32, rate: f64) -> Result<usize> {
    profile::check_stages(n)?;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::RateOutOfRange(rate));
    }
    let k = ((1u64 << n) as f64 * rate + 0.5).floor() as usize;
    if k == 0 {
        return Err(Error::Size(format!("rate {rate} gives dimension 0 at n = {n}")));
    }
    Ok(k)
}

impl CodeSpec {
    /// Builds a spec from an explicit information set (any order).
    ///
    /// `channel` is the base design channel and `alpha` its interpolation
    /// parameter; both are recorded for provenance only.
    pub fn new(
        n: u32,
        rate: f64,
        alpha: f64,
        channel: Option<ChannelModel>,
        mut info_set: Vec<usize>,
    ) -> Result<Self> {
        let k = dimension(n, rate)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain {
                value: alpha,
                domain: "[0,1]",
            });
        }
        if let Some(c) = &channel {
            c.validate()?;
        }
        info_set.sort_unstable();
        let bound = 1usize << n;
        if let Some(&bad) = info_set.iter().find(|&&i| i >= bound) {
            return Err(Error::IndexOutOfRange { index: bad, bound });
        }
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated information index".into()));
        }
        if info_set.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: info_set.len(),
            });
        }
        Ok(Self {
            n,
            rate,
            alpha,
            channel,
            info_set,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Requested rate.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `|A| / N`.
    pub fn realized_rate(&self) -> f64 {
        self.info_set.len() as f64 / self.len() as f64
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Base design channel, `None` for the channel-independent RM rule.
    pub fn channel(&self) -> Option<&ChannelModel> {
        self.channel.as_ref()
    }

    /// Information set, ascending.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    /// `mask[i]` is true when index `i` carries information.
    pub fn info_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for &i in &self.info_set {
            mask[i] = true;
        }
        mask
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        let mask = self.info_mask();
        (0..self.len()).filter(|&i| !mask[i]).collect()
    }

    /// Codeword `u G_N` for information bits placed on the information set
    /// (ascending order) and zeros elsewhere.
    pub fn encode(&self, info: &BitBlock) -> Result<BitBlock> {
        if info.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: info.len(),
            });
        }
        let mut u = BitBlock::zeros(self.len());
        for (t, &i) in self.info_set.iter().enumerate() {
            if info.get(t) {
                u.set(i, true);
            }
        }
        crate::gf2::encode_in_place(&mut u);
        Ok(u)
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "rate={}", self.rate)?;
        writeln!(f, "alpha={}", self.alpha)?;
        match &self.channel {
            Some(c) => writeln!(f, "channel={c}")?,
            None => writeln!(f, "channel=none")?,
        }
        for i in &self.info_set {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut header = |key: &str| -> Result<&str> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing '{key}=' line")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected '{key}=', found '{line}'")))
        };
        let num_err = |what: &str, v: &str| Error::Parse(format!("bad {what} '{v}'"));
        let n_str = header("n")?;
        let n: u32 = n_str.parse().map_err(|_| num_err("n", n_str))?;
        let rate_str = header("rate")?;
        let rate: f64 = rate_str.parse().map_err(|_| num_err("rate", rate_str))?;
        let alpha_str = header("alpha")?;
        let alpha: f64 = alpha_str.parse().map_err(|_| num_err("alpha", alpha_str))?;
        let channel = match header("channel")? {
            "none" => None,
            d => Some(d.parse::<ChannelModel>()?),
        };
        let mut info = Vec::new();
        for line in lines {
            info.push(line.parse::<usize>().map_err(|_| num_err("index", line))?);
        }
        if info.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("indices must be strictly ascending".into()));
        }
        CodeSpec::new(n, rate, alpha, channel, info)
    }
}

/// Selects the `N R` heaviest rows of `G_N`.
///
/// Rows of equal weight are ordered by their Bhattacharyya parameter at
/// [`RM_TIE_BREAK_EPSILON`], then by index.
pub fn rm_select(n: u32, rate: f64) -> Result<CodeSpec> {
    let k = dimension(n, rate)?;
    let info = rm_order(n)?.into_iter().take(k).collect();
    CodeSpec::new(n, rate, 0.0, None, info)
}

fn rm_order(n: u32) -> Result<Vec<usize>> {
    let tie = bec_profile(n, RM_TIE_BREAK_EPSILON)?;
    let key = tie.key();
    let mut idx: Vec<usize> = (0..1usize << n).collect();
    idx.sort_by(|&a, &b| {
        b.count_ones()
            .cmp(&a.count_ones())
            .then(key[a].total_cmp(&key[b]))
            .then(a.cmp(&b))
    });
    Ok(idx)
}

/// Reliability profile used to design for `c`, or `None` when every
/// synthetic channel is perfect and the RM rule applies.
pub fn design_profile(
    n: u32,
    c: &ChannelModel,
    scaling: AlphaScaling,
) -> Result<Option<ReliabilityProfile>> {
    c.validate()?;
    let (base, alpha) = c.split();
    let profile = match base {
        ChannelModel::Bec(e) => {
            let z = alpha * e;
            (z > 0.0).then(|| bhattacharyya_profile(n, z)).transpose()?
        }
        ChannelModel::Bawgn(v) => match scaling {
            _ if alpha == 0.0 => None,
            AlphaScaling::NoiseVariance => Some(gaussian_profile(n, alpha * v)?),
            AlphaScaling::Bhattacharyya => {
                let z = alpha * (-1.0 / (2.0 * v)).exp();
                (z > 0.0).then(|| bhattacharyya_profile(n, z)).transpose()?
            }
        },
        ChannelModel::ConvexPerfect { .. } => unreachable!("nesting rejected by validate"),
    };
    Ok(profile)
}

/// Polar rule: the `N R` most reliable synthetic channels for `c`.
pub fn polar_select(n: u32, rate: f64, c: &ChannelModel) -> Result<CodeSpec> {
    polar_select_with(n, rate, c, AlphaScaling::default())
}

pub fn polar_select_with(
    n: u32,
    rate: f64,
    c: &ChannelModel,
    scaling: AlphaScaling,
) -> Result<CodeSpec> {
    let k = dimension(n, rate)?;
    let (base, alpha) = c.split();
    let info = match design_profile(n, c, scaling)? {
        Some(p) => p.ranking().into_iter().take(k).collect(),
        None => rm_order(n)?.into_iter().take(k).collect(),
    };
    CodeSpec::new(n, rate, alpha, Some(base.clone()), info)
}

/// The interpolating code `C_α`: polar code for the α-scaled channel, RM code at α = 0.
pub fn interp_code(n: u32, rate: f64, base: &ChannelModel, alpha: f64) -> Result<CodeSpec> {
    interp_code_with(n, rate, base, alpha, AlphaScaling::default())
}

pub fn interp_code_with(
    n: u32,
    rate: f64,
    base: &ChannelModel,
    alpha: f64,
    scaling: AlphaScaling,
) -> Result<CodeSpec> {
    if let ChannelModel::ConvexPerfect { .. } = base {
        return Err(Error::InvalidArgument(
            "interpolation base must be a plain channel".into(),
        ));
    }
    let design = ChannelModel::convex_perfect(base.clone(), alpha)?;
    if alpha == 0.0 {
        let rm = rm_select(n, rate)?;
        return CodeSpec::new(n, rate, 0.0, Some(base.clone()), rm.info_set);
    }
    polar_select_with(n, rate, &design, scaling)
}

/// One step of a walk along the family.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkStep {
    pub alpha: f64,
    pub spec: CodeSpec,
    /// Size of the symmetric difference with the previous step's set.
    pub swap_count: usize,
    /// `(index, row weight)` entering the information set.
    pub added: Vec<(usize, u64)>,
    /// `(index, row weight)` leaving the information set.
    pub removed: Vec<(usize, u64)>,
}

impl WalkStep {
    /// Whether the entering rows can be paired with the leaving rows so that
    /// each entering row is at least as heavy as the one it replaces.
    pub fn weight_non_decreasing(&self) -> bool {
        let mut a: Vec<u64> = self.added.iter().map(|x| x.1).collect();
        let mut r: Vec<u64> = self.removed.iter().map(|x| x.1).collect();
        a.sort_unstable();
        r.sort_unstable();
        a.len() == r.len() && a.iter().zip(&r).all(|(x, y)| x >= y)
    }
}

/// Constructs `C_α` along a descending grid and reports the rows that change.
pub fn family_walk(
    n: u32,
    rate: f64,
    base: &ChannelModel,
    grid: &[f64],
) -> Result<Vec<WalkStep>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty alpha grid".into()));
    }
    if grid.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("alpha grid must be descending".into()));
    }
    let mut steps: Vec<WalkStep> = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let spec = interp_code(n, rate, base, alpha)?;
        let cur: BTreeSet<usize> = spec.info_set().iter().copied().collect();
        let (added, removed) = match steps.last() {
            Some(prev) => {
                let old: BTreeSet<usize> = prev.spec.info_set().iter().copied().collect();
                let w = |i: usize| (i, 1u64 << i.count_ones());
                (
                    cur.difference(&old).map(|&i| w(i)).collect(),
                    old.difference(&cur).map(|&i| w(i)).collect(),
                )
            }
            None => (Vec::new(), Vec::new()),
        };
        steps.push(WalkStep {
            alpha,
            swap_count: added.len() + removed.len(),
            spec,
            added,
            removed,
        });
    }
    Ok(steps)
}

/// Applies a layer permutation to every information index.
pub fn permuted_code(spec: &CodeSpec, pi: &LayerPermutation) -> Result<CodeSpec> {
    if pi.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n() as usize,
            actual: pi.n() as usize,
        });
    }
    let info = spec.info_set().iter().map(|&i| pi.apply(i)).collect();
    CodeSpec::new(
        spec.n(),
        spec.rate(),
        spec.alpha(),
        spec.channel().cloned(),
        info,
    )
}

/// Sum of the information-set Bhattacharyya parameters over BEC(ε).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnionBound {
    raw: f64,
}

impl UnionBound {
    pub fn raw(&self) -> f64 {
        self.raw
    }

    /// The bound as a probability.
    pub fn value(&self) -> f64 {
        self.raw.clamp(0.0, 1.0)
    }
}

pub fn union_bound(spec: &CodeSpec, epsilon: f64) -> Result<UnionBound> {
    if let Some(c) = spec.channel() {
        if c.family() != crate::channels::ObservationFamily::Erasure {
            return Err(Error::Unsupported(format!(
                "union bound for design channel {c}"
            )));
        }
    }
    let p = bec_profile(spec.n(), epsilon)?;
    let raw = spec.info_set().iter().map(|&i| p.scores()[i]).sum();
    Ok(UnionBound { raw })
}
