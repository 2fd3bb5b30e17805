//! Channel models and the Eb/N0-to-noise mapping.
//!
//! Noise derivation, used everywhere BER is plotted: a user of amplitude d
//! sends one unit-energy 4QAM symbol over a unit-norm signature, so its
//! received symbol energy is d² and its energy per information bit is
//! E_b = d²/2. With E_b averaged across users, N0 = mean(d²) / (2·10^(dB/10)),
//! and the complex noise per chip has total variance σ² = N0, i.e. σ²/2 per
//! real component.

use num_complex::Complex64;
use rand::Rng;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    /// Frequency-nonselective fading: one complex gain per user per symbol,
    /// i.i.d. across users and symbols, unit mean square, known to the
    /// receiver.
    RayleighFlat,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::RayleighFlat => "rayleigh_flat",
        })
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh_flat" => Ok(ChannelKind::RayleighFlat),
            other => Err(format!(
                "unknown channel \"{other}\" (expected awgn or rayleigh_flat)"
            )),
        }
    }
}

/// Per-chip complex noise variance σ² for a target Eb/N0.
pub fn noise_sigma_sq(eb_n0_db: f64, mean_amplitude_sq: f64) -> f64 {
    mean_amplitude_sq / (2.0 * 10f64.powf(eb_n0_db / 10.0))
}

/// One standard-normal pair via Box-Muller; u1 is kept in (0, 1] so the log
/// never sees zero.
pub fn standard_normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Circularly-symmetric complex Gaussian with E|z|² = 1.
pub fn standard_complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let (a, b) = standard_normal_pair(rng);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Per-user gains for one symbol period: exactly 1 for AWGN, unit-mean-square
/// Rayleigh otherwise.
pub fn draw_gains(kind: ChannelKind, k: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    match kind {
        ChannelKind::Awgn => vec![Complex64::new(1.0, 0.0); k],
        ChannelKind::RayleighFlat => (0..k).map(|_| standard_complex_gaussian(rng)).collect(),
    }
}

/// Analytic BER of a lone Gray-mapped 4QAM user on AWGN,
/// Q(√(2·Eb/N0)) = erfc(√(Eb/N0))/2. The reference every simulated
/// single-user point must track.
pub fn single_user_awgn_ber(eb_n0_db: f64) -> f64 {
    let eb_n0 = 10f64.powf(eb_n0_db / 10.0);
    0.5 * libm::erfc(eb_n0.sqrt())
}

/// y = s + n with per-chip complex noise variance sigma_sq.
pub fn add_noise(s: &[Complex64], sigma_sq: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    if sigma_sq == 0.0 {
        return s.to_vec();
    }
    let component_std = (sigma_sq / 2.0).sqrt();
    s.iter()
        .map(|&c| {
            let (a, b) = standard_normal_pair(rng);
            c + Complex64::new(a * component_std, b * component_std)
        })
        .collect()
}
