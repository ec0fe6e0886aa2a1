//! Sweep grids for reproducing the published figures.

use polarlab::channels::ChannelModel;
use polarlab::decoders::Decoder;
use polarlab::montecarlo::{grid, SweepFamily};
use polarlab::Result;

pub const FIGURES: std::ops::RangeInclusive<u8> = 1..=8;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub n: u32,
    pub rate: f64,
    pub alphas: Vec<f64>,
    pub family: SweepFamily,
    pub params: Vec<f64>,
    pub decoders: Vec<Decoder>,
    /// Fixed design channel; `None` redesigns at every grid point.
    pub design: Option<ChannelModel>,
}

fn bec(alphas: Vec<f64>, params: Vec<f64>, decoders: Vec<Decoder>) -> Preset {
    Preset {
        n: 10,
        rate: 0.5,
        alphas,
        family: SweepFamily::Bec,
        params,
        decoders,
        design: None,
    }
}

/// Grid of figure `k`, or `None` outside `FIGURES`.
pub fn figure(k: u8) -> Result<Option<Preset>> {
    let alpha_axis = || grid(0.0, 1.0, 0.05);
    let eps_axis = || grid(0.30, 0.49, 0.005);
    let preset = match k {
        1 => bec(alpha_axis()?, vec![0.40, 0.42, 0.44, 0.46], vec![Decoder::Map]),
        2 => bec(vec![0.0, 0.3, 0.6, 1.0], eps_axis()?, vec![Decoder::Map]),
        3 => bec(alpha_axis()?, vec![0.30, 0.33, 0.36, 0.39], vec![Decoder::Sc]),
        4 => {
            let mut decoders: Vec<Decoder> = [2, 4, 8, 16, 32].map(Decoder::scl).to_vec();
            decoders.push(Decoder::Map);
            bec(vec![0.4, 0.9], eps_axis()?, decoders)
        }
        5 => bec(vec![0.3, 0.5, 0.7, 1.0], eps_axis()?, vec![Decoder::scl(8)]),
        6 => bec(vec![0.3, 0.5, 0.7, 1.0], eps_axis()?, vec![Decoder::scl(32)]),
        7 => bec(vec![0.4, 0.6, 0.8, 1.0], eps_axis()?, vec![Decoder::bp()]),
        8 => Preset {
            n: 11,
            rate: 0.5,
            alphas: vec![0.4, 0.6, 0.8, 1.0],
            family: SweepFamily::BawgnSnrDb,
            params: grid(1.0, 3.0, 0.125)?,
            decoders: vec![Decoder::scl(8), Decoder::scl(32)],
            design: Some(ChannelModel::bawgn(0.6309)?),
        },
        _ => return Ok(None),
    };
    Ok(Some(preset))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_has_a_preset() {
        for k in FIGURES {
            let p = figure(k).unwrap().unwrap();
            assert!(!p.alphas.is_empty() && !p.params.is_empty() && !p.decoders.is_empty());
        }
        assert!(figure(0).unwrap().is_none());
        assert!(figure(9).unwrap().is_none());
    }

    #[test]
    fn grids_match_captions() {
        let p = figure(3).unwrap().unwrap();
        assert_eq!(p.alphas.len() * p.params.len(), 84);
        let p = figure(2).unwrap().unwrap();
        assert_eq!(p.params.len(), 39);
        assert_eq!((p.params[0], p.params[38]), (0.30, 0.49));
        let p = figure(8).unwrap().unwrap();
        assert_eq!(p.params.len(), 17);
        assert_eq!(p.n, 11);
        assert_eq!(p.alphas, vec![0.4, 0.6, 0.8, 1.0]);
    }
}
