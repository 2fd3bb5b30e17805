//! Unique-decodability census over the full input space.
//!
//! Enumerates every 4QAM input vector, maps it through the scaled spreading
//! matrix in exact integer arithmetic, and counts how many noiseless chip
//! vectors coincide. A collision means even a zero-noise ML detector must
//! guess between inputs, putting a floor under the error rate; the counts
//! quantify how high.
//!
//! Symbols are scaled by √2 to the Gaussian integers ±1±i and amplitudes are
//! cleared of denominators with one common multiplier, so outputs are exact
//! integer vectors and equality is never a float question.

use lds_core::lds::LdsMatrix;
use num_rational::Ratio;
use std::collections::HashMap;
use std::fmt;

/// 4^K inputs are materialized in a hash map; 10 users ≈ 1M entries.
pub const UD_MAX_USERS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UdError {
    UserCount { k: usize },
    AmplitudeCount { expected: usize, got: usize },
    NonPositiveAmplitude { user: usize },
    AmplitudeTooLarge { user: usize },
}

impl fmt::Display for UdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UdError::UserCount { k } => write!(
                f,
                "census over 4^{k} inputs exceeds the {UD_MAX_USERS}-user ceiling"
            ),
            UdError::AmplitudeCount { expected, got } => {
                write!(f, "expected {expected} amplitudes, got {got}")
            }
            UdError::NonPositiveAmplitude { user } => {
                write!(f, "amplitude for user {user} must be positive")
            }
            UdError::AmplitudeTooLarge { user } => write!(
                f,
                "amplitude for user {user} does not fit the integer census after \
                 clearing denominators"
            ),
        }
    }
}

impl std::error::Error for UdError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdReport {
    /// 4^K enumerated input vectors
    pub inputs: u64,
    /// distinct noiseless chip vectors among them
    pub distinct_outputs: u64,
    /// unordered input pairs mapping to the same output
    pub colliding_pairs: u64,
    /// inputs sharing their output with at least one other input
    pub ambiguous_inputs: u64,
}

impl UdReport {
    pub fn is_uniquely_decodable(&self) -> bool {
        self.colliding_pairs == 0
    }
}

impl fmt::Display for UdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} inputs -> {} distinct outputs, {} colliding pairs, {} ambiguous inputs",
            self.inputs, self.distinct_outputs, self.colliding_pairs, self.ambiguous_inputs
        )
    }
}

/// Census over explicit dense columns with entries in {-1, 0, 1}.
pub fn ud_check(
    l: usize,
    columns: &[Vec<i8>],
    amplitudes: &[Ratio<i64>],
) -> Result<UdReport, UdError> {
    let k = columns.len();
    if k == 0 || k > UD_MAX_USERS {
        return Err(UdError::UserCount { k });
    }
    if amplitudes.len() != k {
        return Err(UdError::AmplitudeCount {
            expected: k,
            got: amplitudes.len(),
        });
    }
    let mut lcm = 1i64;
    for (user, d) in amplitudes.iter().enumerate() {
        if *d <= Ratio::from_integer(0) {
            return Err(UdError::NonPositiveAmplitude { user });
        }
        lcm = num_integer::lcm(lcm, *d.denom());
    }
    let scaled: Vec<i64> = amplitudes
        .iter()
        .map(|d| d.numer() * (lcm / d.denom()))
        .collect();
    if let Some(user) = scaled.iter().position(|&v| v.abs() > i64::from(i32::MAX)) {
        return Err(UdError::AmplitudeTooLarge { user });
    }

    let sparse: Vec<Vec<(usize, i64)>> = columns
        .iter()
        .zip(&scaled)
        .map(|(col, &d)| {
            col.iter()
                .enumerate()
                .filter(|&(_, &e)| e != 0)
                .map(|(i, &e)| (i, i64::from(e) * d))
                .collect()
        })
        .collect();

    let inputs = 4u64.pow(k as u32);
    let mut census: HashMap<Vec<i64>, u64> = HashMap::with_capacity(inputs as usize);
    let mut out = vec![0i64; 2 * l];
    for code in 0..inputs {
        out.iter_mut().for_each(|v| *v = 0);
        for (user, col) in sparse.iter().enumerate() {
            let d = (code >> (2 * user)) & 3;
            // symbol index to ±1±i: high bit flips the real part
            let re = if d & 2 == 0 { 1 } else { -1 };
            let im = if d & 1 == 0 { 1 } else { -1 };
            for &(i, v) in col {
                out[i] += v * re;
                out[l + i] += v * im;
            }
        }
        *census.entry(out.clone()).or_insert(0) += 1;
    }

    let mut colliding_pairs = 0u64;
    let mut ambiguous_inputs = 0u64;
    for &n in census.values() {
        if n > 1 {
            colliding_pairs += n * (n - 1) / 2;
            ambiguous_inputs += n;
        }
    }
    Ok(UdReport {
        inputs,
        distinct_outputs: census.len() as u64,
        colliding_pairs,
        ambiguous_inputs,
    })
}

/// Census of a full spreading matrix under the given amplitude diagonal.
pub fn ud_check_matrix(m: &LdsMatrix, amplitudes: &[Ratio<i64>]) -> Result<UdReport, UdError> {
    ud_check(m.l(), m.columns(), amplitudes)
}
