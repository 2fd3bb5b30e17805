//! Gray-mapped 4QAM: two data bits per symbol, one on each quadrature
//! component, unit average energy.
//!
//! Symbol index = 2·b0 + b1, where b0 picks the sign of the real part and b1
//! the sign of the imaginary part (bit 0 → positive). Adjacent decision
//! regions therefore differ in exactly one bit, and the index bits ARE the
//! data bits: bit errors between two indices are `(a ^ b).count_ones()`.

use num_complex::Complex64;
use std::fmt;

pub const BITS_PER_SYMBOL: usize = 2;
pub const CONSTELLATION_SIZE: usize = 4;

const A: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four symbols in index order 0..4.
pub const SYMBOLS: [Complex64; 4] = [
    Complex64::new(A, A),   // bits (0,0)
    Complex64::new(A, -A),  // bits (0,1)
    Complex64::new(-A, A),  // bits (1,0)
    Complex64::new(-A, -A), // bits (1,1)
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitCountError {
    pub got: usize,
}

impl fmt::Display for BitCountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bit count {} is not a multiple of {BITS_PER_SYMBOL}", self.got)
    }
}

impl std::error::Error for BitCountError {}

pub fn symbol(index: u8) -> Complex64 {
    SYMBOLS[index as usize]
}

pub fn index_from_bits(b0: u8, b1: u8) -> u8 {
    2 * b0 + b1
}

pub fn bits_from_index(index: u8) -> (u8, u8) {
    (index >> 1 & 1, index & 1)
}

/// Maps pairs of bits to symbols; the bit count must be even.
pub fn modulate(bits: &[u8]) -> Result<Vec<Complex64>, BitCountError> {
    if bits.len() % BITS_PER_SYMBOL != 0 {
        return Err(BitCountError { got: bits.len() });
    }
    Ok(bits
        .chunks_exact(BITS_PER_SYMBOL)
        .map(|pair| symbol(index_from_bits(pair[0], pair[1])))
        .collect())
}

/// Nearest-symbol decision; component signs decide the bits, zeros slice
/// toward bit 0 (the positive half-plane).
pub fn hard_demap(x: Complex64) -> u8 {
    let b0 = u8::from(x.re < 0.0);
    let b1 = u8::from(x.im < 0.0);
    index_from_bits(b0, b1)
}

/// Bit errors between two index sequences of equal length.
pub fn bit_errors(sent: &[u8], decided: &[u8]) -> u64 {
    sent.iter()
        .zip(decided)
        .map(|(&a, &b)| u64::from((a ^ b).count_ones()))
        .sum()
}
