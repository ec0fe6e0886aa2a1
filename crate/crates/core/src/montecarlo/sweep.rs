use std::cmp::Ordering;
use std::time::Instant;

use super::{check_pairing, count_errors, mix, with_workers, SimEstimate};
use crate::channels::ChannelModel;
use crate::construction::{interp_code_with, AlphaScaling, CodeSpec};
use crate::decoders::Decoder;
use crate::error::{Error, Result};

/// Channel axis of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepFamily {
    /// Parameters are erasure probabilities.
    Bec,
    /// Parameters are SNRs in dB.
    BawgnSnrDb,
}

impl SweepFamily {
    pub fn channel(self, param: f64) -> Result<ChannelModel> {
        match self {
            Self::Bec => ChannelModel::bec(param),
            Self::BawgnSnrDb => {
                if !param.is_finite() {
                    return Err(Error::Domain {
                        value: param,
                        domain: "finite SNR in dB",
                    });
                }
                ChannelModel::bawgn_snr_db(param)
            }
        }
    }
}

/// Which channel each code of the sweep is designed for.
#[derive(Clone, Debug, PartialEq)]
pub enum DesignMode {
    /// Redesign for the transmission channel at every grid point.
    PerPoint,
    /// One code per α, designed for this base channel.
    Fixed(ChannelModel),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub n: u32,
    pub rate: f64,
    pub alphas: Vec<f64>,
    pub family: SweepFamily,
    pub params: Vec<f64>,
    pub decoders: Vec<Decoder>,
    pub trials: u64,
    pub seed: u64,
    /// Share channel realizations across α.
    pub paired: bool,
    pub design: DesignMode,
    pub scaling: AlphaScaling,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.params.is_empty() || self.decoders.is_empty() {
            return Err(Error::InvalidArgument("sweep grids must be non-empty".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Domain {
                value: a,
                domain: "[0, 1]",
            });
        }
        if let DesignMode::Fixed(c) = &self.design {
            c.validate()?;
        }
        for &p in &self.params {
            let ch = self.family.channel(p)?;
            for d in &self.decoders {
                check_pairing(&ch, d, self.trials)?;
            }
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed shared by every decoder at one grid point.
    pub fn point_seed(&self, alpha: f64, param: f64) -> u64 {
        if self.paired {
            mix(&[self.seed, param.to_bits()])
        } else {
            mix(&[self.seed, alpha.to_bits(), param.to_bits()])
        }
    }

    fn code(&self, alpha: f64, channel: &ChannelModel) -> Result<CodeSpec> {
        let base = match &self.design {
            DesignMode::PerPoint => channel,
            DesignMode::Fixed(c) => c,
        };
        interp_code_with(self.n, self.rate, base, alpha, self.scaling)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub param: f64,
    pub channel: ChannelModel,
    pub decoder: Decoder,
    pub spec: CodeSpec,
    pub estimate: SimEstimate,
}

fn row_order(a: &SweepRow, b: &SweepRow) -> Ordering {
    a.alpha
        .total_cmp(&b.alpha)
        .then(a.param.total_cmp(&b.param))
        .then(a.decoder.name().cmp(b.decoder.name()))
        .then(a.decoder.list_size().cmp(&b.decoder.list_size()))
        .then(a.decoder.max_iter().cmp(&b.decoder.max_iter()))
}

pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    run_sweep_with(plan, |_| {})
}

/// Runs every point of the plan, calling `progress` after each one.
pub fn run_sweep_with(plan: &SweepPlan, progress: impl Fn(&SweepRow) + Send + Sync) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    with_workers(plan.workers, || {
        let mut rows = Vec::new();
        for &alpha in &plan.alphas {
            let fixed = match plan.design {
                DesignMode::Fixed(_) => Some(plan.code(alpha, &plan.family.channel(plan.params[0])?)?),
                DesignMode::PerPoint => None,
            };
            for &param in &plan.params {
                let channel = plan.family.channel(param)?;
                let spec = match &fixed {
                    Some(s) => s.clone(),
                    None => plan.code(alpha, &channel)?,
                };
                let seed = plan.point_seed(alpha, param);
                for decoder in &plan.decoders {
                    let start = Instant::now();
                    let errors = count_errors(&spec, &channel, decoder, plan.trials, seed)?;
                    let row = SweepRow {
                        alpha,
                        param,
                        channel: channel.clone(),
                        decoder: *decoder,
                        spec: spec.clone(),
                        estimate: SimEstimate::new(plan.trials, errors, seed, start.elapsed()),
                    };
                    progress(&row);
                    rows.push(row);
                }
            }
        }
        rows.sort_by(row_order);
        Ok(rows)
    })?
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 12 decimals.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::InvalidArgument(format!(
            "bad grid {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::run_point;

    fn plan(alphas: Vec<f64>, decoders: Vec<Decoder>) -> SweepPlan {
        SweepPlan {
            n: 6,
            rate: 0.5,
            alphas,
            family: SweepFamily::Bec,
            params: vec![0.4],
            decoders,
            trials: 500,
            seed: 11,
            paired: true,
            design: DesignMode::PerPoint,
            scaling: AlphaScaling::default(),
            workers: None,
        }
    }

    #[test]
    fn grid_is_clean() {
        let g = grid(0.3, 0.5, 0.005).unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[1], 0.305);
        assert_eq!(g[40], 0.5);
        assert_eq!(grid(0.0, 1.0, 0.05).unwrap().len(), 21);
        assert_eq!(grid(0.4, 0.4, 0.1).unwrap(), vec![0.4]);
        assert!(grid(0.5, 0.4, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn single_point_matches_run_point() {
        let p = plan(vec![1.0], vec![Decoder::Sc]);
        let rows = run_sweep(&p).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        let direct = run_point(&r.spec, &r.channel, &Decoder::Sc, 500, r.estimate.seed).unwrap();
        assert_eq!(r.estimate.errors, direct.errors);
    }

    #[test]
    fn rows_are_sorted() {
        let p = plan(vec![1.0, 0.0, 0.5], vec![Decoder::scl(4), Decoder::Sc, Decoder::scl(2)]);
        let rows = run_sweep(&p).unwrap();
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.alpha, r.decoder.name(), r.decoder.list_size()))
            .collect();
        assert_eq!(keys[0], (0.0, "sc", None));
        assert_eq!(keys[1], (0.0, "scl", Some(2)));
        assert_eq!(keys[8], (1.0, "scl", Some(4)));
    }

    #[test]
    fn invalid_plans_are_rejected() {
        assert!(run_sweep(&plan(vec![], vec![Decoder::Sc])).is_err());
        assert!(run_sweep(&plan(vec![1.2], vec![Decoder::Sc])).is_err());
        let mut p = plan(vec![1.0], vec![Decoder::Map]);
        p.family = SweepFamily::BawgnSnrDb;
        p.params = vec![2.0];
        assert!(run_sweep(&p).is_err());
        let mut p = plan(vec![1.0], vec![Decoder::Sc]);
        p.trials = 0;
        assert!(run_sweep(&p).is_err());
        p.trials = 1;
        p.params = vec![1.5];
        assert!(run_sweep(&p).is_err());
    }

    #[test]
    fn fixed_design_keeps_one_code_per_alpha() {
        let mut p = plan(vec![1.0], vec![Decoder::Sc]);
        p.params = vec![0.3, 0.45];
        p.design = DesignMode::Fixed(ChannelModel::Bec(0.5));
        let rows = run_sweep(&p).unwrap();
        assert_eq!(rows[0].spec, rows[1].spec);
        assert_eq!(rows[0].spec.channel(), Some(&ChannelModel::Bec(0.5)));
    }
}
