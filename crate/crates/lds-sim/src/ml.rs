//! Exhaustive maximum-likelihood detection.
//!
//! Returns an exact minimizer of ‖y − Hx‖² over all M^K symbol hypotheses,
//! where H folds spreading, amplitudes and per-user channel gains. Ties —
//! hypotheses whose metrics agree to within float rounding, as happens on
//! non-uniquely-decodable systems where distinct inputs emit the same
//! signal — go to the lexicographically smallest symbol-index vector.
//!
//! Two search strategies, same contract:
//! * all gains real (AWGN): the quadrature components decouple, so two
//!   antipodal searches of 2^K hypotheses replace the 4^K joint search; the
//!   joint minimizer set is the product of the per-part sets, and per-part
//!   lexicographic-first equals joint lexicographic-first (the index's high
//!   bit is the real-part sign).
//! * complex gains (fading): a mixed-radix reflected Gray walk visits all
//!   4^K hypotheses, changing one user's symbol per step so the residual
//!   updates touch only that column's q+1 chips.
//!
//! The walking metric accumulates float drift, so any step landing within
//! eps of the incumbent triggers a from-scratch recomputation of both
//! metrics before the comparison. Recomputed metrics closer than a much
//! finer tolerance count as tied: colliding hypotheses produce the same
//! signal through different arithmetic, so their metrics can land an ulp
//! apart, and resolving those lexicographically keeps the decision
//! independent of enumeration order. Both tolerances scale with ‖y‖².

use crate::modem::SYMBOLS;
use crate::spreading::Spreader;
use num_complex::Complex64;
use std::fmt;

/// 4^K hypotheses stay enumerable up to K·log2(4) = 20 candidate bits.
pub const ML_MAX_USERS: usize = 10;

const A: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MlError {
    SearchSpaceTooLarge { k: usize },
}

impl fmt::Display for MlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlError::SearchSpaceTooLarge { k } => write!(
                f,
                "ML would enumerate 4^{k} hypotheses; {ML_MAX_USERS} users is the \
                 ceiling — use the pda detector for larger systems"
            ),
        }
    }
}

impl std::error::Error for MlError {}

fn near_tie_eps(target_norm_sq: f64) -> f64 {
    1e-7 * (1.0 + target_norm_sq)
}

fn exact_tie_eps(target_norm_sq: f64) -> f64 {
    1e-12 * (1.0 + target_norm_sq)
}

/// ML detection of one received chip vector. `gains` carries the per-user
/// channel state (all ones over AWGN).
pub fn detect_ml(
    y: &[Complex64],
    spreader: &Spreader,
    gains: &[Complex64],
) -> Result<Vec<u8>, MlError> {
    let k = spreader.k();
    assert_eq!(y.len(), spreader.l(), "chip count mismatch");
    assert_eq!(gains.len(), k, "gain count mismatch");
    if k > ML_MAX_USERS {
        return Err(MlError::SearchSpaceTooLarge { k });
    }
    if gains.iter().all(|g| g.im == 0.0) {
        Ok(detect_decoupled(y, spreader, gains))
    } else {
        Ok(detect_joint(y, spreader, gains))
    }
}

/// Real-gain path: minimize over each quadrature component independently.
fn detect_decoupled(y: &[Complex64], spreader: &Spreader, gains: &[Complex64]) -> Vec<u8> {
    let cols: Vec<Vec<(usize, f64)>> = (0..spreader.k())
        .map(|k| {
            spreader
                .col(k)
                .iter()
                .map(|&(i, e)| (i, e * gains[k].re))
                .collect()
        })
        .collect();
    let re_target: Vec<f64> = y.iter().map(|c| c.re).collect();
    let im_target: Vec<f64> = y.iter().map(|c| c.im).collect();
    let b0 = antipodal_search(&re_target, &cols);
    let b1 = antipodal_search(&im_target, &cols);
    b0.iter().zip(&b1).map(|(&hi, &lo)| 2 * hi + lo).collect()
}

fn antipodal_metric(target: &[f64], cols: &[Vec<(usize, f64)>], bits: &[u8]) -> f64 {
    let mut r = target.to_vec();
    for (col, &bit) in cols.iter().zip(bits) {
        let x = if bit == 0 { A } else { -A };
        for &(i, e) in col {
            r[i] -= e * x;
        }
    }
    r.iter().map(|v| v * v).sum()
}

/// Minimizes ‖target − Σ cols_k·(±1/√2)‖² over sign patterns; bit 0 is the
/// positive sign. Binary reflected Gray enumeration, one sign flip per step.
fn antipodal_search(target: &[f64], cols: &[Vec<(usize, f64)>]) -> Vec<u8> {
    let k = cols.len();
    let norm_sq = target.iter().map(|v| v * v).sum();
    let eps = near_tie_eps(norm_sq);
    let tie_eps = exact_tie_eps(norm_sq);

    // start at all-zero bits (all positive), the lexicographic minimum
    let mut bits = vec![0u8; k];
    let mut r = target.to_vec();
    for col in cols {
        for &(i, e) in col {
            r[i] -= e * A;
        }
    }
    let mut metric: f64 = r.iter().map(|v| v * v).sum();

    let mut best_bits = bits.clone();
    let mut best_metric = metric;

    for step in 1u64..1 << k {
        let j = step.trailing_zeros() as usize; // reflected Gray flip position
        let old_x = if bits[j] == 0 { A } else { -A };
        bits[j] ^= 1;
        // symbol moves old -> -old, so the residual gains 2·old per entry
        for &(i, e) in &cols[j] {
            metric -= r[i] * r[i];
            r[i] += 2.0 * old_x * e;
            metric += r[i] * r[i];
        }
        if metric < best_metric - eps {
            best_metric = metric;
            best_bits.copy_from_slice(&bits);
        } else if (metric - best_metric).abs() <= eps {
            let exact_cand = antipodal_metric(target, cols, &bits);
            let exact_best = antipodal_metric(target, cols, &best_bits);
            let tied = (exact_cand - exact_best).abs() <= tie_eps;
            if (!tied && exact_cand < exact_best) || (tied && bits < best_bits) {
                best_bits.copy_from_slice(&bits);
            }
            best_metric = antipodal_metric(target, cols, &best_bits);
        }
    }
    best_bits
}

fn joint_metric(y: &[Complex64], cols: &[Vec<(usize, Complex64)>], digits: &[u8]) -> f64 {
    let mut r = y.to_vec();
    for (col, &d) in cols.iter().zip(digits) {
        let x = SYMBOLS[d as usize];
        for &(i, e) in col {
            r[i] -= e * x;
        }
    }
    r.iter().map(|c| c.norm_sqr()).sum()
}

/// Complex-gain path: loopless mixed-radix reflected Gray walk over all 4^K
/// symbol-index vectors (one digit moves by ±1 per step).
fn detect_joint(y: &[Complex64], spreader: &Spreader, gains: &[Complex64]) -> Vec<u8> {
    let k = spreader.k();
    let cols: Vec<Vec<(usize, Complex64)>> = (0..k)
        .map(|u| {
            spreader
                .col(u)
                .iter()
                .map(|&(i, e)| (i, gains[u] * e))
                .collect()
        })
        .collect();
    let norm_sq = y.iter().map(|c| c.norm_sqr()).sum();
    let eps = near_tie_eps(norm_sq);
    let tie_eps = exact_tie_eps(norm_sq);

    let mut digits = vec![0u8; k];
    let mut r = y.to_vec();
    for col in &cols {
        for &(i, e) in col {
            r[i] -= e * SYMBOLS[0];
        }
    }
    let mut metric: f64 = r.iter().map(|c| c.norm_sqr()).sum();

    let mut best_digits = digits.clone();
    let mut best_metric = metric;

    // focus pointers and directions of the mixed-radix Gray generator
    let mut focus: Vec<usize> = (0..=k).collect();
    let mut dir = vec![1i8; k];

    loop {
        let j = focus[0];
        focus[0] = 0;
        if j == k {
            break;
        }
        let old = digits[j];
        let new = (old as i8 + dir[j]) as u8;
        digits[j] = new;
        if new == 0 || new == 3 {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        let dx = SYMBOLS[new as usize] - SYMBOLS[old as usize];
        for &(i, e) in &cols[j] {
            metric -= r[i].norm_sqr();
            r[i] -= e * dx;
            metric += r[i].norm_sqr();
        }
        if metric < best_metric - eps {
            best_metric = metric;
            best_digits.copy_from_slice(&digits);
        } else if (metric - best_metric).abs() <= eps {
            let exact_cand = joint_metric(y, &cols, &digits);
            let exact_best = joint_metric(y, &cols, &best_digits);
            let tied = (exact_cand - exact_best).abs() <= tie_eps;
            if (!tied && exact_cand < exact_best) || (tied && digits < best_digits) {
                best_digits.copy_from_slice(&digits);
            }
            best_metric = joint_metric(y, &cols, &best_digits);
        }
    }
    best_digits
}
