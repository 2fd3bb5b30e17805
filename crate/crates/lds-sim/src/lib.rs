//! Link-level Monte Carlo evaluation of sparse spreading matrices.
//!
//! The chain: 4QAM mapping ([`modem`]), sparse spreading with per-user
//! amplitudes ([`spreading`]), AWGN or flat Rayleigh fading ([`channel`]),
//! then joint detection by exhaustive ML ([`ml`]) or probabilistic data
//! association ([`pda`]). [`sweep`] drives replayable BER-vs-Eb/N0 runs from
//! a [`config`] file, and [`ud`] counts exact noiseless collisions of the
//! overloaded system.

pub mod channel;
pub mod config;
pub mod ml;
pub mod modem;
pub mod pda;
pub mod spreading;
pub mod sweep;
pub mod ud;
