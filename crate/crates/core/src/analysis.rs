//! Post-hoc phase quantization, energy efficiency, and the single-user
//! received-power scaling law.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, BeamformingSolution, CVector, PhaseBeamformer, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyModel {
    /// Inverse power-amplifier efficiency `μ`.
    pub amplifier_inverse_efficiency: f64,
    pub bs_circuit_power_w: f64,
    pub user_circuit_power_w: f64,
    pub ris_element_power_w: f64,
    pub bandwidth_hz: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            amplifier_inverse_efficiency: 1.0 / 0.8,
            bs_circuit_power_w: dbm_to_watts(29.0),
            user_circuit_power_w: dbm_to_watts(5.0),
            ris_element_power_w: dbm_to_watts(5.0),
            bandwidth_hz: 1e6,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.amplifier_inverse_efficiency,
            self.bs_circuit_power_w,
            self.user_circuit_power_w,
            self.ris_element_power_w,
            self.bandwidth_hz,
        ];
        if fields.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("energy model parameters must be positive and finite".into()))
        }
    }
}

/// `Σ_k B log₂(1 + Γ_k) / (μ P + P_B + K P_user + N K P_R)` in bits per
/// joule, with `P` the solution's sum transmit power. An infeasible solution
/// (infinite power) scores zero.
pub fn energy_efficiency(solution: &BeamformingSolution, config: &SystemConfig, model: &EnergyModel) -> f64 {
    let rate: f64 = config.sinr_targets.iter().map(|g| model.bandwidth_hz * (1.0 + g).log2()).sum();
    let k = config.num_users as f64;
    let n = config.units_per_user as f64;
    let consumed = model.amplifier_inverse_efficiency * solution.sum_power_w
        + model.bs_circuit_power_w
        + k * model.user_circuit_power_w
        + n * k * model.ris_element_power_w;
    rate / consumed
}

/// `F = {e^{j2πl/L} : l = 0..L-1}` with `L = 2^bits`.
pub fn codebook(bits: u32) -> Result<Vec<Complex64>> {
    if !(1..=30).contains(&bits) {
        return Err(Error::Domain(format!("phase resolution must be 1..=30 bits, got {bits}")));
    }
    let levels = 1usize << bits;
    Ok((0..levels).map(|l| level(l, levels)).collect())
}

fn level(l: usize, levels: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * l as f64 / levels as f64)
}

/// Index of the nearest codebook element; exact halfway cases take the
/// lower index.
pub fn quantize_index(z: Complex64, bits: u32) -> usize {
    let levels = 1usize << bits;
    let angle = z.arg().rem_euclid(2.0 * PI);
    let x = angle * levels as f64 / (2.0 * PI);
    ((x - 0.5).ceil() as usize) % levels
}

pub fn quantize_phases(phases: &PhaseBeamformer, bits: u32) -> Result<PhaseBeamformer> {
    codebook(bits)?;
    let levels = 1usize << bits;
    let vectors = phases
        .vectors()
        .iter()
        .map(|v| CVector::from_iterator(v.len(), v.iter().map(|z| level(quantize_index(*z, bits), levels))))
        .collect();
    PhaseBeamformer::new(vectors)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingMode {
    /// `θ = 1`
    AllOnes,
    /// `θ_n = g_n / |g_n|`
    Mrt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `P0 E|g^T θ|²` for `g ~ CN(0, ρ I)`, one ChaCha20
/// stream per seed, trials drawn sequentially.
pub fn scaling_law_trial(n: usize, rho: f64, p0: f64, mode: ScalingMode, trials: usize, seed: u64) -> Result<ScalingEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::Domain("scaling-law estimate needs N >= 1 and at least one trial".into()));
    }
    if !(rho > 0.0 && p0 > 0.0) {
        return Err(Error::Domain("ρ and P0 must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let amp = (rho / 2.0).sqrt();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for t in 0..trials {
        let mut coherent = Complex64::new(0.0, 0.0);
        let mut aligned = 0.0;
        for _ in 0..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let g = Complex64::new(re, im) * amp;
            coherent += g;
            aligned += g.norm();
        }
        let value = p0
            * match mode {
                ScalingMode::AllOnes => coherent.norm_sqr(),
                ScalingMode::Mrt => aligned * aligned,
            };
        // Welford update.
        let delta = value - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (value - mean);
    }
    let var = if trials > 1 { m2 / (trials - 1) as f64 } else { 0.0 };
    Ok(ScalingEstimate {
        mean,
        std_error: (var / trials as f64).sqrt(),
    })
}

/// `AllOnes`: `N ρ P0`. `Mrt`: `P0 (N ρ + N(N-1) π ρ / 4)`, from
/// `E|g_n|² = ρ` and `E|g_n| = √(πρ)/2`.
pub fn scaling_law_exact(n: usize, rho: f64, p0: f64, mode: ScalingMode) -> f64 {
    let n = n as f64;
    match mode {
        ScalingMode::AllOnes => n * rho * p0,
        ScalingMode::Mrt => p0 * (n * rho + n * (n - 1.0) * PI * rho / 4.0),
    }
}

/// The quadratic-growth constant `(π² - 7π + 16)/4` as printed alongside the
/// scaling law. It disagrees with the moment computation, whose quadratic
/// coefficient is `π/4`; kept for side-by-side reporting.
pub const PRINTED_MRT_CONSTANT: f64 = (PI * PI - 7.0 * PI + 16.0) / 4.0;

/// `P0 ρ N² · PRINTED_MRT_CONSTANT`, the printed large-N law.
pub fn scaling_law_printed(n: usize, rho: f64, p0: f64) -> f64 {
    p0 * rho * (n * n) as f64 * PRINTED_MRT_CONSTANT
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_examples() {
        let one_bit = quantize_index(Complex64::from_polar(1.0, 0.9 * PI), 1);
        assert_eq!(one_bit, 1);
        assert_eq!(quantize_index(Complex64::from_polar(1.0, PI / 3.0), 2), 1);
        // Halfway between levels 0 and 1 of a 2-bit codebook.
        assert_eq!(quantize_index(Complex64::from_polar(1.0, PI / 4.0), 2), 0);
        assert_eq!(quantize_index(Complex64::from_polar(1.0, -0.01), 3), 0);
    }

    #[test]
    fn exact_laws() {
        assert_eq!(scaling_law_exact(10, 2.0, 3.0, ScalingMode::AllOnes), 60.0);
        assert!((scaling_law_exact(2, 1.0, 1.0, ScalingMode::Mrt) - (2.0 + PI / 2.0)).abs() < 1e-15);
        assert!((PRINTED_MRT_CONSTANT - 0.969_613_956_490_201_5).abs() < 1e-15);
    }

    #[test]
    fn energy_efficiency_reference() {
        let config = SystemConfig::new(1, 1).with_target(1.0);
        let mut sol = BeamformingSolution::failed(PhaseBeamformer::ones(1, 1), crate::model::SolveStatus::Feasible);
        sol.sum_power_w = 1.0;
        let ee = energy_efficiency(&sol, &config, &EnergyModel::default());
        let expect = 1e6 / (1.25 + 10f64.powf(-0.1) + 2.0 * 10f64.powf(-2.5));
        assert!((ee - expect).abs() < 1e-9 * expect);
    }
}
