//! Points, lines and quadrics of the projective plane PG(2, q) in cyclic
//! (Singer) coordinates.
//!
//! Indexing points by i and lines by j through powers of a generator of
//! GF(q^3)*, line j passes through point i exactly when the relative trace
//! of alpha^(i-j) vanishes. The point-line incidence matrix is therefore a
//! circulant built from one trace-zero indicator column, and a non-degenerate
//! quadric arises from the same column by multiplying indices with a fixed
//! unit r mod L.

use crate::galois::FieldCtx;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectiveError {
    /// Objects built for different plane orders cannot be combined.
    OrderMismatch { left: u64, right: u64 },
}

impl fmt::Display for ProjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveError::OrderMismatch { left, right } => {
                write!(f, "plane order mismatch: q = {left} vs q = {right}")
            }
        }
    }
}

impl std::error::Error for ProjectiveError {}

/// Indicator column of the trace-zero point set: entry i is 1 iff
/// Tr(alpha^i) = 0, for i in 0..q^2+q+1. Its support has exactly q+1
/// elements and is a planar difference set mod L.
pub fn singer_first_column(ctx: &FieldCtx) -> Vec<u8> {
    let q = ctx.q();
    let l = q * q + q + 1;
    let a = ctx.alpha();
    (0..l)
        .map(|i| u8::from(ctx.trace(&ctx.pow(&a, i)).is_zero()))
        .collect()
}

/// Point-line incidence matrix of PG(2, q): an L x L circulant whose column
/// j is the first column shifted down by j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    q: u64,
    first_col: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of points (= number of lines), L = q^2 + q + 1.
    pub fn l(&self) -> usize {
        self.first_col.len()
    }

    pub fn first_col(&self) -> &[u8] {
        &self.first_col
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        let l = self.l();
        self.first_col[(i + l - j % l) % l]
    }

    /// Row indices of the q+1 points on line j, ascending.
    pub fn col_support(&self, j: usize) -> Vec<usize> {
        let l = self.l();
        let mut s: Vec<usize> = self
            .first_col
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b == 1)
            .map(|(i, _)| (i + j) % l)
            .collect();
        s.sort_unstable();
        s
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let l = self.l();
        (0..l)
            .map(|i| (0..l).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

pub fn incidence_matrix(ctx: &FieldCtx) -> IncidenceMatrix {
    IncidenceMatrix {
        q: ctx.q(),
        first_col: singer_first_column(ctx),
    }
}

/// Indicator vector of a non-degenerate quadric of PG(2, q) in the same point
/// coordinates as the incidence matrix: q+1 points, meeting every line in 0,
/// 1 or 2 of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricVector {
    q: u64,
    multiplier: u64,
    bits: Vec<u8>,
}

impl QuadricVector {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn l(&self) -> usize {
        self.bits.len()
    }

    /// The index multiplier r used to remap the trace-zero column.
    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; gcd(a, m) = 1 holds for every tabulated order
    let (mut old_r, mut r) = (i128::from(a), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(i128::from(m)) as u64
}

/// Builds the quadric indicator from the trace-zero column: point r*i mod L
/// is on the quadric iff Tr(alpha^i) = 0, where r is the inverse of q+1 mod L
/// for even q and the inverse of 2 mod L for odd q.
pub fn quadric_vector(ctx: &FieldCtx) -> QuadricVector {
    let q = ctx.q();
    let l = q * q + q + 1;
    let r = if q % 2 == 0 {
        mod_inverse(q + 1, l)
    } else {
        mod_inverse(2, l)
    };
    let first = singer_first_column(ctx);
    let mut bits = vec![0u8; l as usize];
    for (i, &b) in first.iter().enumerate() {
        if b == 1 {
            bits[((r as u128 * i as u128) % l as u128) as usize] = 1;
        }
    }
    QuadricVector {
        q,
        multiplier: r,
        bits,
    }
}

/// Counts lines meeting the quadric in 0, 1 and 2 points. For a
/// non-degenerate quadric these are (q^2-q)/2, q+1 and (q^2+q)/2.
pub fn intersection_distribution(
    im: &IncidenceMatrix,
    gq: &QuadricVector,
) -> Result<(usize, usize, usize), ProjectiveError> {
    if im.q() != gq.q() {
        return Err(ProjectiveError::OrderMismatch {
            left: im.q(),
            right: gq.q(),
        });
    }
    let mut counts = [0usize; 3];
    for j in 0..im.l() {
        let hits = im
            .col_support(j)
            .iter()
            .filter(|&&i| gq.bits[i] == 1)
            .count();
        counts[hits] += 1;
    }
    Ok((counts[0], counts[1], counts[2]))
}
