//! Probabilistic data association multiuser detection.
//!
//! The complex system is rewritten over the reals: the received vector is
//! stacked as [Re y; Im y] and each user contributes two antipodal bits — an
//! in-phase bit with column [Re g·c; Im g·c]/√2 and a quadrature bit with
//! column [−Im g·c; Re g·c]/√2. Every bit j keeps a posterior p_j = P(b_j=+1),
//! and each update treats the other bits' residual interference as Gaussian
//! with mean Σ h_i(2p_i−1) and covariance Σ 4p_i(1−p_i)·h_i·h_iᵀ + (σ²/2)·I.
//!
//! The working state is W = Σ⁻¹ over *all* bits. Excluding bit j for its own
//! update never forms Σ_{−j}: with w = 4p_j(1−p_j) the downdated quadratic
//! collapses to
//!
//!   LLR_j = 2·h_jᵀ W z_{−j} / (1 − w·h_jᵀ W h_j),
//!
//! and after p_j moves, W absorbs the variance change by one rank-1
//! Sherman–Morrison step. A sweep is one serial pass over the 2K bits
//! (in-phase bits first); sweeps stop when no posterior moves by 1e-6.
//!
//! Near-singular covariances (zero noise, saturated posteriors) fall back to
//! a from-scratch inverse with diagonal loading, reported on the outcome.

use crate::spreading::Spreader;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

const LLR_CLAMP: f64 = 40.0;
const NOISE_FLOOR: f64 = 1e-10;
const DENOM_FLOOR: f64 = 1e-12;
const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PdaConfig {
    /// sweep budget over all bits
    pub max_iters: usize,
    /// fraction of the old posterior kept on each update, in [0, 1)
    pub damping: f64,
}

impl Default for PdaConfig {
    fn default() -> Self {
        PdaConfig {
            max_iters: 20,
            damping: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PdaOutcome {
    /// hard symbol-index decisions, one per user
    pub symbols: Vec<u8>,
    /// per-user symbol posteriors (product of the two bit posteriors)
    pub posteriors: Vec<[f64; 4]>,
    /// sweeps actually performed
    pub iterations: usize,
    pub converged: bool,
    /// true when the covariance needed diagonal loading at any point
    pub used_loading: bool,
}

/// The 2K stacked real bit columns of the real-equivalent model.
fn stacked_columns(spreader: &Spreader, gains: &[Complex64]) -> Vec<Vec<f64>> {
    let l = spreader.l();
    let k = spreader.k();
    let mut cols = vec![vec![0.0; 2 * l]; 2 * k];
    for u in 0..k {
        let g = gains[u];
        for &(i, e) in spreader.col(u) {
            let s = e * FRAC_1_SQRT_2;
            cols[u][i] = g.re * s;
            cols[u][l + i] = g.im * s;
            cols[k + u][i] = -g.im * s;
            cols[k + u][l + i] = g.re * s;
        }
    }
    cols
}

/// Gauss-Jordan inverse with partial pivoting. None on a vanishing pivot.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let inv_p = 1.0 / m[col][col];
        for v in m[col].iter_mut() {
            *v *= inv_p;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let f = row[col];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn bit_variance(p: f64) -> f64 {
    4.0 * p * (1.0 - p)
}

/// Fresh W = (Σ w_j h_j h_jᵀ + diag·I)⁻¹, escalating the loading until the
/// inverse exists.
fn rebuild_w(h: &[Vec<f64>], p: &[f64], dim: usize, mut diag: f64) -> Vec<Vec<f64>> {
    loop {
        let mut sigma = vec![vec![0.0; dim]; dim];
        for (col, &pj) in h.iter().zip(p) {
            let w = bit_variance(pj);
            if w == 0.0 {
                continue;
            }
            for r in 0..dim {
                if col[r] == 0.0 {
                    continue;
                }
                let wr = w * col[r];
                for c in 0..dim {
                    sigma[r][c] += wr * col[c];
                }
            }
        }
        for r in 0..dim {
            sigma[r][r] += diag;
        }
        if let Some(w) = invert(&sigma) {
            return w;
        }
        diag *= 10.0;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One PDA detection of a received chip vector. `sigma_sq` is the complex
/// noise variance per chip (both quadratures together).
pub fn detect_pda(
    y: &[Complex64],
    spreader: &Spreader,
    gains: &[Complex64],
    sigma_sq: f64,
    cfg: &PdaConfig,
) -> PdaOutcome {
    let l = spreader.l();
    let k = spreader.k();
    assert_eq!(y.len(), l, "chip count mismatch");
    assert_eq!(gains.len(), k, "gain count mismatch");
    assert!(sigma_sq >= 0.0, "negative noise variance");
    assert!(
        (0.0..1.0).contains(&cfg.damping),
        "damping must lie in [0, 1)"
    );
    assert!(cfg.max_iters >= 1, "need at least one sweep");

    let dim = 2 * l;
    let n = 2 * k;
    let h = stacked_columns(spreader, gains);
    let mut y_r = Vec::with_capacity(dim);
    y_r.extend(y.iter().map(|c| c.re));
    y_r.extend(y.iter().map(|c| c.im));

    let mut used_loading = false;
    let mut noise_half = sigma_sq / 2.0;
    if noise_half < NOISE_FLOOR {
        noise_half = NOISE_FLOOR;
        used_loading = true;
    }

    let mut p = vec![0.5f64; n];
    let mut w_mat = rebuild_w(&h, &p, dim, noise_half);
    // mean of the full model, Σ h_j(2p_j − 1); zero at the uniform start
    let mut mean = vec![0.0f64; dim];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let mut max_delta: f64 = 0.0;
        for j in 0..n {
            let hj = &h[j];
            let wj = bit_variance(p[j]);
            let mut wh = vec![0.0f64; dim];
            for (r, whr) in wh.iter_mut().enumerate() {
                let mut acc = 0.0;
                for c in 0..dim {
                    acc += w_mat[r][c] * hj[c];
                }
                *whr = acc;
            }
            let mut hwh: f64 = hj.iter().zip(&wh).map(|(a, b)| a * b).sum();
            let tilt = 2.0 * p[j] - 1.0;
            // h_jᵀ W z with z = y − mean + h_j·tilt, via (Wh)ᵀz
            let mut hwz: f64 = (0..dim)
                .map(|r| wh[r] * (y_r[r] - mean[r] + hj[r] * tilt))
                .sum();
            let mut denom = 1.0 - wj * hwh;
            if denom <= DENOM_FLOOR {
                used_loading = true;
                w_mat = rebuild_w(&h, &p, dim, noise_half + NOISE_FLOOR);
                for (r, whr) in wh.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for c in 0..dim {
                        acc += w_mat[r][c] * hj[c];
                    }
                    *whr = acc;
                }
                hwh = hj.iter().zip(&wh).map(|(a, b)| a * b).sum();
                hwz = (0..dim)
                    .map(|r| wh[r] * (y_r[r] - mean[r] + hj[r] * tilt))
                    .sum();
                denom = (1.0 - wj * hwh).max(DENOM_FLOOR);
            }
            let llr = (2.0 * hwz / denom).clamp(-LLR_CLAMP, LLR_CLAMP);
            let p_new = cfg.damping * p[j] + (1.0 - cfg.damping) * sigmoid(llr);
            max_delta = max_delta.max((p_new - p[j]).abs());

            let shift = 2.0 * (p_new - p[j]);
            if shift != 0.0 {
                for (mr, hr) in mean.iter_mut().zip(hj) {
                    *mr += hr * shift;
                }
            }
            let dw = bit_variance(p_new) - wj;
            p[j] = p_new;
            if dw != 0.0 {
                let sm_denom = 1.0 + dw * hwh;
                if sm_denom.abs() <= DENOM_FLOOR {
                    used_loading = true;
                    w_mat = rebuild_w(&h, &p, dim, noise_half + NOISE_FLOOR);
                } else {
                    let f = dw / sm_denom;
                    for r in 0..dim {
                        let fr = f * wh[r];
                        if fr == 0.0 {
                            continue;
                        }
                        for c in 0..dim {
                            w_mat[r][c] -= fr * wh[c];
                        }
                    }
                }
            }
        }
        if max_delta < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }

    let mut symbols = Vec::with_capacity(k);
    let mut posteriors = Vec::with_capacity(k);
    for u in 0..k {
        let pu = p[u];
        let pv = p[k + u];
        let b0 = u8::from(pu < 0.5);
        let b1 = u8::from(pv < 0.5);
        symbols.push(2 * b0 + b1);
        posteriors.push([
            pu * pv,
            pu * (1.0 - pv),
            (1.0 - pu) * pv,
            (1.0 - pu) * (1.0 - pv),
        ]);
    }
    PdaOutcome {
        symbols,
        posteriors,
        iterations,
        converged,
        used_loading,
    }
}
