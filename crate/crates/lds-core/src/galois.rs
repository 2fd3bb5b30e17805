//! Arithmetic in GF(p^(3r)), the cubic extension of GF(q) for q = p^r.
//!
//! Elements are polynomials over GF(p) reduced modulo a fixed primitive
//! polynomial of degree 3r, so the residue class of x generates the
//! multiplicative group. Everything is exact integer arithmetic; the
//! coefficients never leave `u8`/`u16` range for the tabulated fields.

use std::fmt;

/// Tabulated primitive polynomials, one per supported (p, r) pair.
/// Coefficients are ascending, monic, of degree 3r.
const PRIMITIVE_POLYS: &[(u64, u32, &[u8])] = &[
    (2, 1, &[1, 1, 0, 1]),          // x^3 + x + 1
    (3, 1, &[1, 2, 0, 1]),          // x^3 + 2x + 1
    (5, 1, &[2, 3, 0, 1]),          // x^3 + 3x + 2
    (7, 1, &[2, 3, 0, 1]),          // x^3 + 3x + 2
    (2, 2, &[1, 1, 0, 0, 0, 0, 1]), // x^6 + x + 1
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// The characteristic must be prime.
    NonPrime(u64),
    /// No primitive polynomial tabulated for this (p, r).
    NoTabulatedPolynomial { p: u64, r: u32 },
    /// Zero has no multiplicative inverse.
    ZeroInverse,
    /// Coefficient vector has the wrong length or an out-of-range residue.
    BadElement { expected_len: usize, p: u64 },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NonPrime(p) => write!(f, "p = {p} is not prime"),
            FieldError::NoTabulatedPolynomial { p, r } => {
                write!(f, "no primitive polynomial tabulated for p = {p}, r = {r}")
            }
            FieldError::ZeroInverse => write!(f, "zero has no inverse"),
            FieldError::BadElement { expected_len, p } => {
                write!(f, "element needs {expected_len} residues mod {p}")
            }
        }
    }
}

impl std::error::Error for FieldError {}

/// An element of GF(p^(3r)): residues mod p, ascending powers of x, length 3r.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfElem {
    coeffs: Vec<u8>,
}

impl GfElem {
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// For prime-field values (all non-constant coefficients zero) returns
    /// the constant term; `None` otherwise.
    pub fn as_prime_scalar(&self) -> Option<u64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(u64::from(self.coeffs[0]))
        } else {
            None
        }
    }
}

impl fmt::Debug for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GfElem{:?}", self.coeffs)
    }
}

/// Field context: the characteristic, extension degree and modulus that give
/// meaning to a bag of coefficients. All arithmetic goes through the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    r: u32,
    q: u64,
    order: u64,
    modulus: Vec<u8>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    pub fn new(p: u64, r: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let poly = PRIMITIVE_POLYS
            .iter()
            .find(|&&(tp, tr, _)| tp == p && tr == r)
            .ok_or(FieldError::NoTabulatedPolynomial { p, r })?
            .2;
        let q = p.pow(r);
        Ok(FieldCtx {
            p,
            r,
            q,
            order: q.pow(3),
            modulus: poly.to_vec(),
        })
    }

    /// Subfield order q = p^r.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Field order q^3 = p^(3r).
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> usize {
        3 * self.r as usize
    }

    /// Modulus coefficients, ascending, monic.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn zero(&self) -> GfElem {
        GfElem {
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn one(&self) -> GfElem {
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = 1;
        GfElem { coeffs }
    }

    /// The residue class of x, a generator of the multiplicative group.
    pub fn alpha(&self) -> GfElem {
        let mut coeffs = vec![0; self.degree()];
        coeffs[1] = 1;
        GfElem { coeffs }
    }

    pub fn element(&self, coeffs: &[u8]) -> Result<GfElem, FieldError> {
        if coeffs.len() != self.degree() || coeffs.iter().any(|&c| u64::from(c) >= self.p) {
            return Err(FieldError::BadElement {
                expected_len: self.degree(),
                p: self.p,
            });
        }
        Ok(GfElem {
            coeffs: coeffs.to_vec(),
        })
    }

    /// Iterates over all q^3 field elements in lexicographic coefficient order.
    pub fn elements(&self) -> impl Iterator<Item = GfElem> + '_ {
        let deg = self.degree();
        (0..self.order).map(move |mut n| {
            let mut coeffs = vec![0u8; deg];
            for c in coeffs.iter_mut() {
                *c = (n % self.p) as u8;
                n /= self.p;
            }
            GfElem { coeffs }
        })
    }

    pub fn add(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| ((u64::from(x) + u64::from(y)) % self.p) as u8)
            .collect();
        GfElem { coeffs }
    }

    pub fn sub(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| ((u64::from(x) + self.p - u64::from(y)) % self.p) as u8)
            .collect();
        GfElem { coeffs }
    }

    pub fn mul(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let deg = self.degree();
        let mut prod = vec![0u16; 2 * deg - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u16::from(x) * u16::from(y)) % self.p as u16;
            }
        }
        // reduce modulo the monic modulus
        for k in (deg..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            let shift = k - deg;
            for (i, &m) in self.modulus[..deg].iter().enumerate() {
                let sub = (c * u16::from(m)) % self.p as u16;
                prod[shift + i] = (prod[shift + i] + self.p as u16 - sub) % self.p as u16;
            }
        }
        GfElem {
            coeffs: prod[..deg].iter().map(|&c| c as u8).collect(),
        }
    }

    pub fn pow(&self, a: &GfElem, mut e: u64) -> GfElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &GfElem) -> Result<GfElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.order - 2))
    }

    /// Relative trace onto GF(q): a + a^q + a^(q^2). Lands in the subfield,
    /// i.e. the result t always satisfies t^q = t.
    pub fn trace(&self, a: &GfElem) -> GfElem {
        let aq = self.pow(a, self.q);
        let aq2 = self.pow(&aq, self.q);
        self.add(&self.add(a, &aq), &aq2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_prime_characteristic() {
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert_eq!(FieldCtx::new(1, 1).unwrap_err(), FieldError::NonPrime(1));
    }

    #[test]
    fn rejects_untabulated_degree() {
        assert_eq!(
            FieldCtx::new(11, 1).unwrap_err(),
            FieldError::NoTabulatedPolynomial { p: 11, r: 1 }
        );
        assert_eq!(
            FieldCtx::new(3, 2).unwrap_err(),
            FieldError::NoTabulatedPolynomial { p: 3, r: 2 }
        );
    }

    #[test]
    fn q3_modulus_is_pinned() {
        let f = FieldCtx::new(3, 1).unwrap();
        assert_eq!(f.modulus(), &[1, 2, 0, 1]);
        assert_eq!(f.q(), 3);
        assert_eq!(f.order(), 27);
    }

    #[test]
    fn alpha_is_primitive_in_every_tabulated_field() {
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            let n = f.order() - 1;
            let a = f.alpha();
            assert_eq!(f.pow(&a, n), f.one(), "alpha^(q^3-1) != 1 for p={p} r={r}");
            // order must not divide any maximal proper divisor of q^3 - 1
            let mut m = n;
            let mut factors = Vec::new();
            let mut d = 2;
            while d * d <= m {
                if m % d == 0 {
                    factors.push(d);
                    while m % d == 0 {
                        m /= d;
                    }
                }
                d += 1;
            }
            if m > 1 {
                factors.push(m);
            }
            for fct in factors {
                assert_ne!(
                    f.pow(&a, n / fct),
                    f.one(),
                    "alpha has order dividing {}/{fct} for p={p} r={r}",
                    n
                );
            }
        }
    }

    #[test]
    fn alpha_order_seven_in_gf8() {
        let f = FieldCtx::new(2, 1).unwrap();
        let a = f.alpha();
        for k in 1..7 {
            assert_ne!(f.pow(&a, k), f.one(), "alpha^{k} = 1 too early");
        }
        assert_eq!(f.pow(&a, 7), f.one());
    }

    #[test]
    fn inverse_law_exhaustive() {
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            let one = f.one();
            for a in f.elements() {
                if a.is_zero() {
                    assert_eq!(f.inv(&a).unwrap_err(), FieldError::ZeroInverse);
                } else {
                    assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), one);
                }
            }
        }
    }

    #[test]
    fn characteristic_three_sums_vanish() {
        let f = FieldCtx::new(3, 1).unwrap();
        for a in f.elements() {
            let s = f.add(&f.add(&a, &a), &a);
            assert!(s.is_zero(), "a+a+a != 0 for {a:?}");
        }
    }

    #[test]
    fn field_axioms_exhaustive_via_tables() {
        // Element indices 0..order with table lookups keep the full
        // triple enumeration cheap even for GF(343).
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            let n = f.order() as usize;
            let elems: Vec<GfElem> = f.elements().collect();
            let idx = |e: &GfElem| -> usize {
                e.coeffs()
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &c| acc * f.p() as usize + c as usize)
            };
            let mut mul = vec![0usize; n * n];
            let mut add = vec![0usize; n * n];
            for i in 0..n {
                for j in 0..n {
                    mul[i * n + j] = idx(&f.mul(&elems[i], &elems[j]));
                    add[i * n + j] = idx(&f.add(&elems[i], &elems[j]));
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(mul[i * n + j], mul[j * n + i]);
                    assert_eq!(add[i * n + j], add[j * n + i]);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ij_k = mul[mul[i * n + j] * n + k];
                        let i_jk = mul[i * n + mul[j * n + k]];
                        assert_eq!(ij_k, i_jk, "associativity fails at ({i},{j},{k})");
                        let left = mul[i * n + add[j * n + k]];
                        let right = add[mul[i * n + j] * n + mul[i * n + k]];
                        assert_eq!(left, right, "distributivity fails at ({i},{j},{k})");
                    }
                }
            }
        }
    }

    #[test]
    fn power_cycle_closes_in_gf27() {
        let f = FieldCtx::new(3, 1).unwrap();
        assert_eq!(f.pow(&f.alpha(), 26), f.one());
    }

    #[test]
    fn trace_is_additive() {
        for (p, r) in [(2, 1), (3, 1)] {
            let f = FieldCtx::new(p, r).unwrap();
            let elems: Vec<GfElem> = f.elements().collect();
            for a in &elems {
                for b in &elems {
                    assert_eq!(
                        f.trace(&f.add(a, b)),
                        f.add(&f.trace(a), &f.trace(b)),
                        "trace not additive at {a:?}, {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn trace_lands_in_subfield() {
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            for a in f.elements() {
                let t = f.trace(&a);
                assert_eq!(f.pow(&t, f.q()), t, "trace(a)^q != trace(a) for {a:?}");
            }
        }
    }

    #[test]
    fn trace_of_zero_is_zero() {
        let f = FieldCtx::new(5, 1).unwrap();
        assert!(f.trace(&f.zero()).is_zero());
    }

    #[test]
    fn trace_zero_count_matches_point_line_budget() {
        // exactly q+1 of the first q^2+q+1 powers of alpha are trace-zero
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            let q = f.q();
            let l = q * q + q + 1;
            let a = f.alpha();
            let zeros = (0..l)
                .filter(|&i| f.trace(&f.pow(&a, i)).is_zero())
                .count() as u64;
            assert_eq!(zeros, q + 1, "wrong trace-zero count for q={q}");
        }
    }

    #[test]
    fn trace_zero_count_q2_brute_force() {
        let f = FieldCtx::new(2, 1).unwrap();
        let a = f.alpha();
        let zeros: Vec<u64> = (0..7).filter(|&i| f.trace(&f.pow(&a, i)).is_zero()).collect();
        assert_eq!(zeros, vec![1, 2, 4]);
    }
}
