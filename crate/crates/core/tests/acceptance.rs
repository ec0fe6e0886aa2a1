//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::Instant;

use polarlab::channels::{transmit, ChannelModel, ObservationBlock};
use polarlab::construction::{bec_profile, interp_code, polar_select, rm_select, AlphaScaling, CodeSpec, LayerPermutation};
use polarlab::decoders::{map_decode_bec, sc_decode_bec, sc_decode_llr, scl_decode, DecodeStatus, Decoder};
use polarlab::gf2::BitBlock;
use polarlab::montecarlo::{
    proposition2_check, random_code_reference, run_point, run_sweep, trial_rng, wilson_interval,
    write_csv, DesignMode, Record, SweepFamily, SweepPlan, SweepRow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_info<R: Rng>(k: usize, rng: &mut R) -> BitBlock {
    BitBlock::from_bits((0..k).map(|_| rng.random::<bool>())).unwrap()
}

fn trial(spec: &CodeSpec, ch: &ChannelModel, rng: &mut ChaCha8Rng) -> (BitBlock, ObservationBlock) {
    let info = random_info(spec.dimension(), rng);
    let x = spec.encode(&info).unwrap();
    let obs = transmit(ch, &x, rng);
    (info, obs)
}

/// Information words whose codeword agrees with every unerased symbol.
fn consistent_words(spec: &CodeSpec, obs: &ObservationBlock) -> Vec<BitBlock> {
    let k = spec.dimension();
    let sym = obs.to_bec_symbols().unwrap();
    (0u64..1 << k)
        .map(|v| BitBlock::from_bits((0..k).map(|t| v >> t & 1 == 1)).unwrap())
        .filter(|info| {
            let x = spec.encode(info).unwrap();
            sym.iter().enumerate().all(|(j, s)| s.value().is_none_or(|b| b == x.get(j)))
        })
        .collect()
}

fn conservation() -> Outcome {
    let mut worst = 0f64;
    for n in 1..=12 {
        for k in 1..=9 {
            let eps = k as f64 / 10.0;
            let total: f64 = bec_profile(n, eps).unwrap().scores().iter().sum();
            let expected = (1u64 << n) as f64 * eps;
            worst = worst.max((total - expected).abs() / expected);
        }
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e} over n<=12"))
}

fn map_vs_enumeration() -> Outcome {
    let spec = polar_select(4, 0.5, &ChannelModel::Bec(0.5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (_, obs) = trial(&spec, &ChannelModel::Bec(0.5), &mut rng);
        let r = map_decode_bec(&spec, &obs).unwrap();
        let words = consistent_words(&spec, &obs);
        let ok = match words.as_slice() {
            [w] => r.status == DecodeStatus::Decoded && r.info_bits.as_ref() == Some(w),
            _ => r.status == DecodeStatus::Ambiguous,
        };
        mismatches += usize::from(!ok);
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in 1000 erasure patterns"))
}

fn scl_vs_map() -> Outcome {
    let ch = ChannelModel::Bec(0.4);
    let spec = polar_select(4, 0.5, &ch).unwrap();
    let list = 1 << spec.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (_, obs) = trial(&spec, &ch, &mut rng);
        let map = map_decode_bec(&spec, &obs).unwrap();
        let scl = scl_decode(&spec, &obs, list).unwrap();
        mismatches += usize::from(map.status != scl.status || map.info_bits != scl.info_bits);
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in 1000 trials, L={list}"))
}

fn scl1_vs_sc() -> Outcome {
    let mut mismatches = [0, 0];
    let bec = ChannelModel::Bec(0.4);
    let spec = polar_select(8, 0.5, &bec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let (_, obs) = trial(&spec, &bec, &mut rng);
        let (sc, scl) = (sc_decode_bec(&spec, &obs).unwrap(), scl_decode(&spec, &obs, 1).unwrap());
        mismatches[0] += usize::from(sc.status != scl.status || sc.info_bits != scl.info_bits);
    }
    let awgn = ChannelModel::Bawgn(0.8);
    let spec = polar_select(8, 0.5, &awgn).unwrap();
    for _ in 0..1000 {
        let (_, obs) = trial(&spec, &awgn, &mut rng);
        let (sc, scl) = (sc_decode_llr(&spec, &obs).unwrap(), scl_decode(&spec, &obs, 1).unwrap());
        mismatches[1] += usize::from(sc.status != scl.status || sc.info_bits != scl.info_bits);
    }
    outcome(
        mismatches == [0, 0],
        format!("mismatches: {} erasure, {} Gaussian, 1000 trials each", mismatches[0], mismatches[1]),
    )
}

fn small_epsilon_is_rm() -> Outcome {
    let differing: Vec<u32> = [4, 6, 8]
        .into_iter()
        .filter(|&n| {
            let polar = polar_select(n, 0.5, &ChannelModel::Bec(1e-3)).unwrap();
            polar.info_set() != rm_select(n, 0.5).unwrap().info_set()
        })
        .collect();
    outcome(differing.is_empty(), format!("n in {{4,6,8}} differing: {differing:?}"))
}

const MONOTONE_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const MONOTONE_EPS: [f64; 2] = [0.40, 0.45];

fn monotone_plan(workers: Option<usize>) -> SweepPlan {
    SweepPlan {
        n: 8,
        rate: 0.5,
        alphas: MONOTONE_ALPHAS.to_vec(),
        family: SweepFamily::Bec,
        params: MONOTONE_EPS.to_vec(),
        decoders: vec![Decoder::Map, Decoder::Sc],
        trials: 10_000,
        seed: 6,
        paired: true,
        design: DesignMode::PerPoint,
        scaling: AlphaScaling::default(),
        workers,
    }
}

fn csv_bytes(rows: &[SweepRow]) -> Vec<u8> {
    let records: Vec<Record> = rows.iter().map(Record::from).collect();
    let mut out = Vec::new();
    write_csv(&mut out, &records).unwrap();
    out
}

fn monotonicity(rows: &[SweepRow]) -> Outcome {
    let count = |a: f64, e: f64, d: Decoder| {
        rows.iter()
            .find(|r| r.alpha == a && r.param == e && r.decoder == d)
            .unwrap()
            .estimate
            .errors
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for e in MONOTONE_EPS {
        // α descending
        let map: Vec<u64> = MONOTONE_ALPHAS.iter().rev().map(|&a| count(a, e, Decoder::Map)).collect();
        let sc: Vec<u64> = MONOTONE_ALPHAS.iter().rev().map(|&a| count(a, e, Decoder::Sc)).collect();
        let map_inv = map.windows(2).filter(|w| w[1] > w[0]).count();
        let sc_inv = sc.windows(2).filter(|w| w[1] < w[0]).count();
        pass &= map_inv <= 1 && sc_inv <= 1;
        detail.push(format!("eps={e}: MAP {map:?} ({map_inv} inv), SC {sc:?} ({sc_inv} inv)"));
    }
    outcome(pass, format!("M=1e4, alpha 1->0; {}", detail.join("; ")))
}

fn list_point_claim() -> Outcome {
    let point = |alpha: f64, eps: f64| {
        let ch = ChannelModel::Bec(eps);
        let spec = interp_code(10, 0.5, &ch, alpha).unwrap();
        run_point(&spec, &ch, &Decoder::scl(32), 10_000, 77).unwrap().pe
    };
    let half = point(0.5, 0.385);
    let polar = point(1.0, 0.325);
    let polar_hard = point(1.0, 0.385);
    let band = |p: f64| (2e-4..=5e-3).contains(&p);
    let ratio_ok = half * 3.0 <= polar_hard && half < polar_hard;
    outcome(
        band(half) && band(polar) && ratio_ok,
        format!(
            "M=1e4, L=32: C_0.5@0.385 {half:.2e}, C_1@0.325 {polar:.2e}, C_1@0.385 {polar_hard:.2e} (ratio {:.1})",
            polar_hard / half
        ),
    )
}

fn permuted_map_vs_sc() -> Outcome {
    let spec = polar_select(8, 0.5, &ChannelModel::Bec(0.45)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pass = true;
    let mut detail = Vec::new();
    for _ in 0..3 {
        let pi = LayerPermutation::random(8, &mut rng);
        let r = proposition2_check(&spec, &pi, 0.45, 10_000, 88).unwrap();
        pass &= r.holds;
        detail.push(format!("{:?}: MAP {:.2e} <= SC {:.2e}", pi.mapping(), r.map.pe, r.sc.pe));
    }
    outcome(pass, format!("M=1e4; {}", detail.join("; ")))
}

/// Whether the columns selected by `mask` are linearly dependent.
fn dependent(cols: &[u64], mask: u64) -> bool {
    let mut basis: Vec<u64> = Vec::new();
    for (j, &c) in cols.iter().enumerate() {
        if mask >> j & 1 == 0 {
            continue;
        }
        let v = basis.iter().fold(c, |v, &b| v.min(v ^ b));
        if v == 0 {
            return true;
        }
        basis.push(v);
        basis.sort_unstable_by(|a, b| b.cmp(a));
    }
    false
}

fn random_reference() -> Outcome {
    let (len, k, trials) = (16usize, 8usize, 100_000u64);
    let mut pass = true;
    let mut detail = Vec::new();
    for (idx, eps) in [0.2, 0.4, 0.6].into_iter().enumerate() {
        let mut failures = 0;
        for t in 0..trials {
            let mut rng = trial_rng(9 + idx as u64, t, 0);
            let cols: Vec<u64> = (0..len).map(|_| rng.random::<u64>() & 0xFF).collect();
            let mask = (0..len).fold(0u64, |m, j| m | u64::from(rng.random::<f64>() < eps) << j);
            failures += u64::from(dependent(&cols, mask));
        }
        let (lo, hi) = wilson_interval(failures, trials);
        let pe = random_code_reference(len, k, &[eps]).unwrap()[0].1;
        pass &= lo <= pe && pe <= hi;
        detail.push(format!("eps={eps}: {pe:.4} in [{lo:.4}, {hi:.4}]"));
    }
    let grid: Vec<f64> = (0..39).map(|i| 0.30 + 0.005 * i as f64).collect();
    let curve = random_code_reference(1024, 512, &grid).unwrap();
    let strict = curve.windows(2).all(|w| w[0].1 < w[1].1);
    pass &= strict;
    detail.push(format!("N=1024 curve strictly increasing: {strict}"));

    // reported only
    let ch = ChannelModel::Bec(0.42);
    let spec = interp_code(10, 0.5, &ch, 0.3).unwrap();
    let est = run_point(&spec, &ch, &Decoder::Map, 2000, 99).unwrap();
    let reference = random_code_reference(1024, 512, &[0.42]).unwrap()[0].1;
    detail.push(format!(
        "report: random {reference:.2e} vs C_0.3 MAP {:.2e} [{:.2e}, {:.2e}] at eps=0.42, M=2000",
        est.pe, est.ci_lo, est.ci_hi
    ));
    outcome(pass, detail.join("; "))
}

fn gaussian_gain() -> Outcome {
    let snrs: Vec<f64> = (0..9).map(|i| 1.0 + 0.25 * i as f64).collect();
    let plan = SweepPlan {
        n: 11,
        rate: 0.5,
        alphas: vec![0.8, 1.0],
        family: SweepFamily::BawgnSnrDb,
        params: snrs.clone(),
        decoders: vec![Decoder::scl(32)],
        trials: 1000,
        seed: 10,
        paired: true,
        design: DesignMode::Fixed(ChannelModel::Bawgn(0.6309)),
        scaling: AlphaScaling::default(),
        workers: None,
    };
    let rows = run_sweep(&plan).unwrap();
    let curve = |alpha: f64| -> Vec<f64> {
        snrs.iter()
            .map(|&s| rows.iter().find(|r| r.alpha == alpha && r.param == s).unwrap().estimate.pe)
            .collect()
    };
    let first = |pe: &[f64]| snrs.iter().zip(pe).find(|(_, &p)| p <= 1e-2).map(|(&s, _)| s);
    let (c08, c1) = (curve(0.8), curve(1.0));
    let (s08, s1) = (first(&c08), first(&c1));
    let pass = match (s08, s1) {
        (Some(a), Some(b)) => b - a >= 0.25 - 1e-9,
        (Some(_), None) => true,
        _ => false,
    };
    let fmt = |v: &[f64]| v.iter().map(|p| format!("{p:.1e}")).collect::<Vec<_>>().join(" ");
    outcome(
        pass,
        format!(
            "M=1e3, L=32, SNR 1..3 dB: first SNR with pe<=1e-2: C_0.8 {s08:?}, C_1 {s1:?}; C_0.8 [{}]; C_1 [{}]",
            fmt(&c08),
            fmt(&c1)
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut record = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {id:>2} [{}] {name}: {} ({secs:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o, secs));
    };

    record(1, "conservation oracle", &mut conservation);
    record(2, "MAP oracle equivalence", &mut map_vs_enumeration);
    record(3, "SCL with full list equals MAP", &mut scl_vs_map);
    record(4, "SCL(1) equals SC", &mut scl1_vs_sc);
    record(5, "small-epsilon polar code is RM", &mut small_epsilon_is_rm);
    let reference = run_sweep(&monotone_plan(None)).unwrap();
    record(6, "paired monotonicity trends", &mut || monotonicity(&reference));
    record(7, "list decoding point claim", &mut list_point_claim);
    record(8, "permuted MAP beats SC", &mut permuted_map_vs_sc);
    record(9, "random-code reference", &mut random_reference);
    record(10, "Gaussian list decoding gain", &mut gaussian_gain);
    record(11, "determinism across worker counts", &mut || {
        let base = csv_bytes(&reference);
        let same = [1, 3]
            .into_iter()
            .all(|w| csv_bytes(&run_sweep(&monotone_plan(Some(w))).unwrap()) == base);
        outcome(same, format!("criterion-6 CSV ({} bytes) identical with 1 and 3 workers: {same}", base.len()))
    });

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
