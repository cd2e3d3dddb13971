#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use risbeam::model::{CVector, ChannelSet, Deployment, SystemConfig};
use risbeam::powerctl::GainTable;

/// (K, N) pairs cycled through by the regression corpus.
pub const CORPUS_SIZES: [(usize, usize); 10] = [(2, 4), (2, 8), (3, 6), (4, 4), (4, 8), (3, 12), (2, 16), (4, 12), (6, 8), (8, 8)];

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub config: SystemConfig,
    pub seed: u64,
}

/// 100 seeded scenarios: sizes from `CORPUS_SIZES`, targets cycling through
/// 1, 2 and 4, every fifth one with rows distributed on a 100 m circle.
pub fn corpus() -> Vec<CorpusEntry> {
    (0..100)
        .map(|i| {
            let (k, n) = CORPUS_SIZES[i % CORPUS_SIZES.len()];
            let mut config = SystemConfig::new(k, n).with_target([1.0, 2.0, 4.0][(i / CORPUS_SIZES.len()) % 3]);
            if i % 5 == 4 {
                config.deployment = Deployment::Distributed { radius_m: 100.0 };
            }
            CorpusEntry {
                config,
                seed: 1000 + i as u64,
            }
        })
        .collect()
}

/// Deterministic K = 3, N = 4 instance used by the frozen external values:
/// `g_ki[n] = a_ki (1 + n/10) exp(j(1.3k + 0.7in + 0.4n²))` with `a_kk = 1`
/// and `a_ki = 0.35` otherwise.
pub fn fixed_instance() -> ChannelSet {
    ChannelSet::from_fn(3, 4, |k, i, n| {
        let amp = if k == i { 1.0 } else { 0.35 };
        let (k, i, n) = (k as f64, i as f64, n as f64);
        Complex64::from_polar(amp * (1.0 + 0.1 * n), 1.3 * k + 0.7 * i * n + 0.4 * n * n)
    })
    .unwrap()
}

pub const FIXED_TARGETS: [f64; 3] = [1.0, 2.0, 1.5];

pub fn random_channels(rng: &mut impl Rng, k: usize, n: usize) -> ChannelSet {
    ChannelSet::from_fn(k, n, |_, _, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap()
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Gain table with `ρ(DC) <= max_radius` for targets all equal to `gamma`.
pub fn random_feasible_table(rng: &mut impl Rng, k: usize, gamma: f64, max_radius: f64) -> GainTable {
    let direct: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut cross = DMatrix::from_fn(k, k, |r, c| if r == c { 0.0 } else { rng.random_range(0.0..1.0) });
    // Row sums of DC bound its spectral radius.
    let worst = (0..k)
        .map(|r| gamma / direct[r] * cross.row(r).sum())
        .fold(0.0, f64::max);
    if worst > 0.0 {
        cross *= max_radius * rng.random_range(0.1..1.0) / worst;
    }
    GainTable { direct, cross }
}

/// Symmetric K-user table with spectral radius `Γ c (K-1) / a = radius`.
pub fn symmetric_table(k: usize, gamma: f64, radius: f64) -> GainTable {
    let a = 1.0;
    let c = radius * a / (gamma * (k - 1) as f64);
    GainTable {
        direct: vec![a; k],
        cross: DMatrix::from_fn(k, k, |r, col| if r == col { 0.0 } else { c }),
    }
}
