//! Monte Carlo BER sweeps over Eb/N0 with replayable randomness.
//!
//! Every trial owns a counter-derived RNG: the generator is seeded with the
//! run seed and its stream is set to (snr_index << 48) | trial_index. A
//! trial's draws therefore never depend on scheduling, and because batch
//! results are integer error counts summed over a fixed index range, the
//! sweep output is byte-identical whether trials run on one thread or many.
//!
//! Trials run in batches of [`TRIAL_BATCH`]; the early-stop rule (enough bit
//! errors) is evaluated only at batch boundaries so the trial count — and
//! with it the BER denominator — is schedule-independent too.

use crate::channel::{add_noise, draw_gains, noise_sigma_sq, ChannelKind};
use crate::ml::{detect_ml, MlError, ML_MAX_USERS};
use crate::modem::{bit_errors, symbol, BITS_PER_SYMBOL};
use crate::pda::{detect_pda, PdaConfig};
use crate::spreading::{SpreadError, Spreader};
use lds_core::lds::{build_lds, import_csv, import_json, LdsMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

/// Trials between stop-rule checks; also the parallel work unit.
pub const TRIAL_BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Ml,
    Pda,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorKind::Ml => "ml",
            DetectorKind::Pda => "pda",
        })
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ml" => Ok(DetectorKind::Ml),
            "pda" => Ok(DetectorKind::Pda),
            other => Err(format!("unknown detector '{other}' (expected ml or pda)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon over the trial batch; falls back to sequential when the crate
    /// is built without the `parallel` feature.
    Parallel,
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Execution::Sequential => "sequential",
            Execution::Parallel => "parallel",
        })
    }
}

impl std::str::FromStr for Execution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(Execution::Sequential),
            "parallel" => Ok(Execution::Parallel),
            other => Err(format!(
                "unknown execution mode '{other}' (expected sequential or parallel)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    /// build the L x (L+2) system of this prime-power order
    Order(u64),
    /// load a matrix interchange file (JSON or CSV, sniffed)
    File(PathBuf),
    /// K orthogonal users, the single-user baseline at K = 1
    Identity(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub matrix: MatrixSource,
    /// per-user amplitudes d_k; None means all ones
    pub amplitudes: Option<Vec<f64>>,
    pub channel: ChannelKind,
    pub detector: DetectorKind,
    pub snr_db: Vec<f64>,
    pub seed: u64,
    pub max_trials: u64,
    /// stop a point early once this many bit errors are seen; 0 disables
    /// the early stop and always runs max_trials
    pub min_bit_errors: u64,
    pub pda_max_iters: usize,
    pub pda_damping: f64,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(
        matrix: MatrixSource,
        detector: DetectorKind,
        channel: ChannelKind,
        snr_db: Vec<f64>,
    ) -> Self {
        SimConfig {
            matrix,
            amplitudes: None,
            channel,
            detector,
            snr_db,
            seed: 1,
            max_trials: 1_000_000,
            min_bit_errors: 100,
            pda_max_iters: 20,
            pda_damping: 0.0,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug)]
pub enum SweepError {
    Matrix(String),
    Spread(SpreadError),
    Ml(MlError),
    BadParameter(String),
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::Matrix(detail) => write!(f, "matrix setup failed: {detail}"),
            SweepError::Spread(e) => write!(f, "spreading setup failed: {e}"),
            SweepError::Ml(e) => e.fmt(f),
            SweepError::BadParameter(detail) => f.write_str(detail),
        }
    }
}

impl std::error::Error for SweepError {}

impl From<SpreadError> for SweepError {
    fn from(e: SpreadError) -> Self {
        SweepError::Spread(e)
    }
}

impl From<MlError> for SweepError {
    fn from(e: MlError) -> Self {
        SweepError::Ml(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BerPoint {
    /// stored as bits of the f64 to keep Eq; see eb_n0_db()
    eb_n0_bits: u64,
    pub trials: u64,
    pub bit_errors: u64,
    pub total_bits: u64,
}

impl BerPoint {
    pub fn eb_n0_db(&self) -> f64 {
        f64::from_bits(self.eb_n0_bits)
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.total_bits as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutput {
    pub matrix_id: String,
    pub points: Vec<BerPoint>,
}

/// Reads a matrix interchange file, accepting either serialization.
pub fn load_matrix(path: &Path) -> Result<LdsMatrix, SweepError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SweepError::Matrix(format!("{}: {e}", path.display())))?;
    let parsed = if text.trim_start().starts_with('{') {
        import_json(&text)
    } else {
        import_csv(&text)
    };
    parsed.map_err(|e| SweepError::Matrix(format!("{}: {e}", path.display())))
}

fn build_spreader(cfg: &SimConfig) -> Result<Spreader, SweepError> {
    let amps_for = |k: usize| match &cfg.amplitudes {
        Some(a) => a.clone(),
        None => vec![1.0; k],
    };
    match &cfg.matrix {
        MatrixSource::Order(q) => {
            let m = build_lds(*q).map_err(|e| SweepError::Matrix(e.to_string()))?;
            Ok(Spreader::from_matrix(&m, &amps_for(m.k()))?)
        }
        MatrixSource::File(path) => {
            let m = load_matrix(path)?;
            Ok(Spreader::from_matrix(&m, &amps_for(m.k()))?)
        }
        MatrixSource::Identity(k) => Ok(Spreader::identity(*k, &amps_for(*k))?),
    }
}

fn validate(cfg: &SimConfig) -> Result<(), SweepError> {
    if cfg.snr_db.is_empty() {
        return Err(SweepError::BadParameter("snr_db list is empty".into()));
    }
    if cfg.snr_db.len() > 1 << 16 {
        return Err(SweepError::BadParameter(
            "snr_db list exceeds 65536 points".into(),
        ));
    }
    if cfg.max_trials == 0 {
        return Err(SweepError::BadParameter("max_trials must be at least 1".into()));
    }
    if cfg.max_trials >= 1 << 48 {
        return Err(SweepError::BadParameter(
            "max_trials must stay below 2^48 to keep trial RNG streams distinct".into(),
        ));
    }
    if !(0.0..1.0).contains(&cfg.pda_damping) {
        return Err(SweepError::BadParameter(
            "pda_damping must lie in [0, 1)".into(),
        ));
    }
    if cfg.pda_max_iters == 0 {
        return Err(SweepError::BadParameter(
            "pda_max_iters must be at least 1".into(),
        ));
    }
    if matches!(cfg.matrix, MatrixSource::Identity(0)) {
        return Err(SweepError::BadParameter(
            "identity matrix needs at least 1 user".into(),
        ));
    }
    Ok(())
}

fn run_trial(
    cfg: &SimConfig,
    spreader: &Spreader,
    pda_cfg: &PdaConfig,
    sigma_sq: f64,
    snr_index: usize,
    trial: u64,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((snr_index as u64) << 48) | trial);
    let k = spreader.k();
    let digits: Vec<u8> = (0..k).map(|_| rng.gen_range(0..4u8)).collect();
    let gains = draw_gains(cfg.channel, k, &mut rng);
    let x: Vec<Complex64> = digits.iter().map(|&d| symbol(d)).collect();
    let clean = spreader
        .transmit_faded(&x, Some(&gains))
        .expect("symbol count fixed by construction");
    let y = add_noise(&clean, sigma_sq, &mut rng);
    let decided = match cfg.detector {
        DetectorKind::Ml => detect_ml(&y, spreader, &gains).expect("user count was validated"),
        DetectorKind::Pda => detect_pda(&y, spreader, &gains, sigma_sq, pda_cfg).symbols,
    };
    u64::from(bit_errors(&digits, &decided))
}

fn run_batch(
    cfg: &SimConfig,
    spreader: &Spreader,
    pda_cfg: &PdaConfig,
    sigma_sq: f64,
    snr_index: usize,
    trials: std::ops::Range<u64>,
) -> u64 {
    #[cfg(feature = "parallel")]
    if cfg.execution == Execution::Parallel {
        return trials
            .into_par_iter()
            .map(|t| run_trial(cfg, spreader, pda_cfg, sigma_sq, snr_index, t))
            .sum();
    }
    trials
        .map(|t| run_trial(cfg, spreader, pda_cfg, sigma_sq, snr_index, t))
        .sum()
}

/// Runs the configured sweep and returns one BER point per Eb/N0 value.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepOutput, SweepError> {
    validate(cfg)?;
    let spreader = build_spreader(cfg)?;
    let k = spreader.k();
    if cfg.detector == DetectorKind::Ml && k > ML_MAX_USERS {
        return Err(MlError::SearchSpaceTooLarge { k }.into());
    }
    let pda_cfg = PdaConfig {
        max_iters: cfg.pda_max_iters,
        damping: cfg.pda_damping,
    };
    let bits_per_trial = (k * BITS_PER_SYMBOL) as u64;

    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (snr_index, &snr) in cfg.snr_db.iter().enumerate() {
        let sigma_sq = noise_sigma_sq(snr, spreader.mean_amplitude_sq());
        let mut trials = 0u64;
        let mut errors = 0u64;
        while trials < cfg.max_trials
            && (cfg.min_bit_errors == 0 || errors < cfg.min_bit_errors)
        {
            let batch = TRIAL_BATCH.min(cfg.max_trials - trials);
            errors += run_batch(
                cfg,
                &spreader,
                &pda_cfg,
                sigma_sq,
                snr_index,
                trials..trials + batch,
            );
            trials += batch;
        }
        points.push(BerPoint {
            eb_n0_bits: snr.to_bits(),
            trials,
            bit_errors: errors,
            total_bits: trials * bits_per_trial,
        });
    }
    Ok(SweepOutput {
        matrix_id: spreader.id().to_string(),
        points,
    })
}

/// CSV with one row per Eb/N0 point plus run provenance columns.
pub fn write_csv<W: io::Write>(
    cfg: &SimConfig,
    out: &SweepOutput,
    w: &mut W,
) -> io::Result<()> {
    writeln!(
        w,
        "eb_n0_db,trials,bit_errors,ber,detector,channel,matrix_id,seed"
    )?;
    for p in &out.points {
        writeln!(
            w,
            "{},{},{},{:.6e},{},{},{},{}",
            p.eb_n0_db(),
            p.trials,
            p.bit_errors,
            p.ber(),
            cfg.detector,
            cfg.channel,
            out.matrix_id,
            cfg.seed
        )?;
    }
    Ok(())
}

/// Two-column points file, ready for `plot "file" with linespoints`.
pub fn write_gnuplot<W: io::Write>(out: &SweepOutput, w: &mut W) -> io::Result<()> {
    writeln!(w, "# {}: eb_n0_db ber", out.matrix_id)?;
    for p in &out.points {
        writeln!(w, "{} {:.6e}", p.eb_n0_db(), p.ber())?;
    }
    Ok(())
}
