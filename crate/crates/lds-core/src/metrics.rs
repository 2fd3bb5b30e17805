//! Exact figures of merit for spreading matrices: cross-correlations, total
//! squared correlation, Welch bounds, the squared-distance spectrum, and
//! minimum-Eb/N0 capacity arithmetic.
//!
//! Everything that can be a rational is a rational; square roots and dB
//! values materialize only at display time.

use crate::lds::LdsMatrix;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub type Frac = Ratio<i64>;

fn frac(n: i64, d: i64) -> Frac {
    Ratio::new(n, d)
}

fn dec(x: Frac) -> f64 {
    x.to_f64().expect("ratio within f64 range")
}

/// Exact correlation and distance summary of one matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationReport {
    pub matrix_id: String,
    pub l: usize,
    pub k: usize,
    /// Normalized correlations rho[a][b] = <c_a, c_b>; symmetric, unit
    /// diagonal, off-diagonal magnitudes at most 1/(q+1).
    pub rho: Vec<Vec<Frac>>,
    /// max |rho[a][b]| over distinct pairs.
    pub c_max: Frac,
    /// Ordered double sum of rho^2 over all pairs, diagonal included.
    pub tsc: Frac,
    /// Welch lower bound K^2/L on the ordered-sum TSC.
    pub welch_tsc_lb: Frac,
    /// The closed-form TSC expression in q (see [`tsc_closed_form`]); counts
    /// pairs differently from `tsc`, so the two are reported side by side
    /// rather than asserted equal.
    pub tsc_closed_form: Frac,
    /// Squared Euclidean distances between normalized columns over unordered
    /// distinct pairs, with multiplicities.
    pub distance_spectrum: BTreeMap<Frac, usize>,
}

impl CorrelationReport {
    pub fn min_distance_sq(&self) -> Frac {
        *self
            .distance_spectrum
            .keys()
            .next()
            .expect("spectrum of a valid matrix is nonempty")
    }

    pub fn tsc_minus_closed_form(&self) -> Frac {
        self.tsc - self.tsc_closed_form
    }
}

pub fn correlation_report(m: &LdsMatrix) -> CorrelationReport {
    let k = m.k();
    let denom = i64::from(m.scale_sq_denom());
    let rho: Vec<Vec<Frac>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| frac(i64::from(m.dot(a, b)), denom))
                .collect()
        })
        .collect();
    let mut c_max = Frac::zero();
    let mut tsc = Frac::zero();
    for a in 0..k {
        for b in 0..k {
            let r = rho[a][b];
            tsc += r * r;
            if a != b && r.abs() > c_max {
                c_max = r.abs();
            }
        }
    }
    CorrelationReport {
        matrix_id: m.id(),
        l: m.l(),
        k,
        rho,
        c_max,
        tsc,
        welch_tsc_lb: frac((k * k) as i64, m.l() as i64),
        tsc_closed_form: tsc_closed_form(m.q()),
        distance_spectrum: distance_spectrum(m),
    }
}

/// Closed-form TSC expression in the plane order:
/// (q²+q+2) + (q²+q+1)(q²+q) / (2(q+1)²) + 1/(q+1).
///
/// Divided by q² this tends to 3/2 as q grows. It undercounts the ordered
/// double sum measured by [`correlation_report`] (cross pairs enter once, not
/// twice), so reports carry both values and their difference.
pub fn tsc_closed_form(q: u64) -> Frac {
    let q = q as i64;
    frac(q * q + q + 2, 1)
        + frac((q * q + q + 1) * (q * q + q), 2 * (q + 1) * (q + 1))
        + frac(1, q + 1)
}

/// Squared distances ‖c_a - c_b‖² between normalized columns, all unordered
/// distinct pairs. With unit-norm columns this is 2 - 2·rho.
pub fn distance_spectrum(m: &LdsMatrix) -> BTreeMap<Frac, usize> {
    let denom = i64::from(m.scale_sq_denom());
    let mut spectrum = BTreeMap::new();
    for a in 0..m.k() {
        for b in (a + 1)..m.k() {
            let d_sq = frac(2, 1) - frac(2 * i64::from(m.dot(a, b)), denom);
            *spectrum.entry(d_sq).or_insert(0) += 1;
        }
    }
    spectrum
}

/// The three squared distances a signed plane construction of order q can
/// produce: {2q/(q+1), 2, (2q+4)/(q+1)}.
pub fn expected_distance_set(q: u64) -> [Frac; 3] {
    let q = q as i64;
    [
        frac(2 * q, q + 1),
        frac(2, 1),
        frac(2 * q + 4, q + 1),
    ]
}

/// Welch lower bound on the maximum cross-correlation magnitude of K
/// unit-norm sequences in L dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmaxBound {
    pub value: f64,
    pub value_sq: Frac,
    /// K ≤ L: the bound degenerates to 0 and an orthogonal set exists.
    pub orthogonality_possible: bool,
}

pub fn welch_cmax_lb(k: usize, l: usize) -> CmaxBound {
    if k <= l {
        return CmaxBound {
            value: 0.0,
            value_sq: Frac::zero(),
            orthogonality_possible: true,
        };
    }
    let value_sq = frac((k - l) as i64, (l * (k - 1)) as i64);
    CmaxBound {
        value: dec(value_sq).sqrt(),
        value_sq,
        orthogonality_possible: false,
    }
}

/// Minimum Eb/N0 for reliable communication at spectral efficiency eta
/// (information bits per chip): (2^eta - 1)/eta, linear and in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShannonLimit {
    pub eta: f64,
    pub eb_n0: f64,
    pub eb_n0_db: f64,
}

/// Spectral efficiency of a loaded system: code_rate · bits_per_symbol · K/L,
/// and the matching minimum Eb/N0. All arguments must be positive.
pub fn shannon_limit(
    code_rate: f64,
    bits_per_symbol: f64,
    k: usize,
    l: usize,
) -> ShannonLimit {
    shannon_limit_at_eta(code_rate * bits_per_symbol * k as f64 / l as f64)
}

pub fn shannon_limit_at_eta(eta: f64) -> ShannonLimit {
    assert!(eta > 0.0, "spectral efficiency must be positive");
    // exp_m1 keeps precision as eta -> 0, where the limit is ln 2.
    let eb_n0 = (eta * std::f64::consts::LN_2).exp_m1() / eta;
    ShannonLimit {
        eta,
        eb_n0,
        eb_n0_db: 10.0 * eb_n0.log10(),
    }
}

/// Human-readable rendering: one row per figure, exact fraction next to its
/// decimal, including the measured-vs-closed-form TSC difference line.
pub fn report_table(r: &CorrelationReport) -> String {
    let mut s = String::new();
    let mut row = |name: &str, value: String| {
        let _ = writeln!(s, "{name:<26}{value}");
    };
    row("matrix", r.matrix_id.clone());
    row("chips L", r.l.to_string());
    row("signatures K", r.k.to_string());
    let load = frac(r.k as i64, r.l as i64);
    row("load K/L", format!("{load} = {:.4}", dec(load)));
    row("c_max", format!("{} = {:.5}", r.c_max, dec(r.c_max)));
    let cb = welch_cmax_lb(r.k, r.l);
    row(
        "welch c_max bound",
        format!("sqrt({}) = {:.5}", cb.value_sq, cb.value),
    );
    row("tsc (ordered sum)", format!("{} = {:.5}", r.tsc, dec(r.tsc)));
    row(
        "welch tsc bound K^2/L",
        format!("{} = {:.5}", r.welch_tsc_lb, dec(r.welch_tsc_lb)),
    );
    row(
        "tsc closed form",
        format!("{} = {:.5}", r.tsc_closed_form, dec(r.tsc_closed_form)),
    );
    let diff = r.tsc_minus_closed_form();
    row(
        "tsc - closed form",
        format!("{} = {:.5} (definitions count pairs differently)", diff, dec(diff)),
    );
    row(
        "min pair distance",
        format!("sqrt({}) = {:.5}", r.min_distance_sq(), dec(r.min_distance_sq()).sqrt()),
    );
    let _ = writeln!(s, "distance spectrum (d^2 x pairs)");
    for (d_sq, count) in &r.distance_spectrum {
        let _ = writeln!(s, "  {d_sq:>8} = {:.5}  x {count}", dec(*d_sq));
    }
    s
}

/// Machine-readable rendering of the same report; fractions as strings,
/// decimals alongside.
pub fn report_json(r: &CorrelationReport) -> String {
    let frac_obj = |x: Frac| {
        serde_json::json!({ "frac": x.to_string(), "dec": dec(x) })
    };
    let cb = welch_cmax_lb(r.k, r.l);
    let spectrum: Vec<serde_json::Value> = r
        .distance_spectrum
        .iter()
        .map(|(d_sq, count)| {
            serde_json::json!({ "d_sq": d_sq.to_string(), "dec": dec(*d_sq), "pairs": count })
        })
        .collect();
    let v = serde_json::json!({
        "matrix_id": r.matrix_id,
        "L": r.l,
        "K": r.k,
        "c_max": frac_obj(r.c_max),
        "welch_cmax_lb": { "sq_frac": cb.value_sq.to_string(), "dec": cb.value },
        "tsc": frac_obj(r.tsc),
        "welch_tsc_lb": frac_obj(r.welch_tsc_lb),
        "tsc_closed_form": frac_obj(r.tsc_closed_form),
        "tsc_minus_closed_form": frac_obj(r.tsc_minus_closed_form()),
        "min_d_sq": frac_obj(r.min_distance_sq()),
        "distance_spectrum": spectrum,
    });
    serde_json::to_string_pretty(&v).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::build_lds;

    #[test]
    fn closed_form_values() {
        assert_eq!(tsc_closed_form(2), frac(32, 3));
        // 14 + 156/32 + 1/4
        assert_eq!(tsc_closed_form(3), frac(153, 8));
    }

    #[test]
    fn closed_form_over_q_sq_tends_to_three_halves() {
        let at = |q: u64| dec(tsc_closed_form(q)) / (q * q) as f64;
        assert!((at(7) - 1.695153).abs() < 1e-5);
        assert!((at(23) - 1.548244).abs() < 1e-5);
        assert!((at(101) - 1.510147).abs() < 1e-5);
        assert!((at(7) - 1.5).abs() > (at(23) - 1.5).abs());
        assert!((at(23) - 1.5).abs() > (at(101) - 1.5).abs());
    }

    #[test]
    fn report_q2_frozen_values() {
        let r = correlation_report(&build_lds(2).unwrap());
        assert_eq!(r.c_max, frac(1, 3));
        assert_eq!(r.tsc, frac(137, 9));
        assert_eq!(r.welch_tsc_lb, frac(81, 7));
        assert_eq!(r.tsc_minus_closed_form(), frac(41, 9));
        let spectrum: Vec<(Frac, usize)> =
            r.distance_spectrum.iter().map(|(&d, &c)| (d, c)).collect();
        assert_eq!(
            spectrum,
            vec![(frac(4, 3), 19), (frac(2, 1), 8), (frac(8, 3), 9)]
        );
        assert_eq!(r.min_distance_sq(), frac(4, 3));
    }

    #[test]
    fn report_q3_frozen_values() {
        let r = correlation_report(&build_lds(3).unwrap());
        assert_eq!(r.c_max, frac(1, 4));
        assert_eq!(r.tsc, frac(207, 8));
        assert_eq!(r.welch_tsc_lb, frac(225, 13));
        let spectrum: Vec<(Frac, usize)> =
            r.distance_spectrum.iter().map(|(&d, &c)| (d, c)).collect();
        assert_eq!(
            spectrum,
            vec![(frac(3, 2), 68), (frac(2, 1), 18), (frac(5, 2), 19)]
        );
    }

    #[test]
    fn rho_is_symmetric_with_unit_diagonal() {
        for q in [2, 3] {
            let r = correlation_report(&build_lds(q).unwrap());
            for a in 0..r.k {
                assert_eq!(r.rho[a][a], frac(1, 1));
                for b in 0..r.k {
                    assert_eq!(r.rho[a][b], r.rho[b][a]);
                }
            }
        }
    }

    #[test]
    fn tsc_exceeds_welch_bound_everywhere() {
        for q in [2, 3, 4, 5, 7] {
            let r = correlation_report(&build_lds(q).unwrap());
            assert!(r.tsc > r.welch_tsc_lb, "q={q}: {} vs {}", r.tsc, r.welch_tsc_lb);
        }
    }

    #[test]
    fn spectrum_stays_in_the_three_value_set() {
        for q in [2, 3, 4, 5, 7] {
            let m = build_lds(q).unwrap();
            let expected = expected_distance_set(q);
            for d_sq in distance_spectrum(&m).keys() {
                assert!(expected.contains(d_sq), "q={q}: unexpected d^2 {d_sq}");
            }
        }
    }

    #[test]
    fn expected_set_q2() {
        assert_eq!(
            expected_distance_set(2),
            [frac(4, 3), frac(2, 1), frac(8, 3)]
        );
    }

    #[test]
    fn welch_cmax_bound_values() {
        let b = welch_cmax_lb(9, 7);
        assert_eq!(b.value_sq, frac(1, 28));
        assert!((b.value - 0.18898).abs() < 1e-5);
        assert!(!b.orthogonality_possible);

        let b = welch_cmax_lb(15, 13);
        assert_eq!(b.value_sq, frac(1, 91));
        assert!((b.value - 0.10483).abs() < 1e-5);

        let b = welch_cmax_lb(7, 7);
        assert_eq!(b.value, 0.0);
        assert!(b.orthogonality_possible);
    }

    #[test]
    fn capacity_limits_for_loaded_qpsk_third_rate() {
        let s = shannon_limit(1.0 / 3.0, 2.0, 9, 7);
        assert!((s.eta - 6.0 / 7.0).abs() < 1e-12);
        assert!((s.eb_n0 - 0.9467).abs() < 1e-4);
        assert!((s.eb_n0_db - (-0.2379)).abs() < 1e-3);

        let s = shannon_limit(1.0 / 3.0, 2.0, 15, 13);
        assert!((s.eta - 10.0 / 13.0).abs() < 1e-12);
        assert!((s.eb_n0 - 0.9156).abs() < 1e-4);
        assert!((s.eb_n0_db - (-0.3828)).abs() < 1e-3);
    }

    #[test]
    fn capacity_limit_small_eta_is_ln_two() {
        let s = shannon_limit_at_eta(1e-9);
        assert!((s.eb_n0 - std::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn table_surfaces_the_closed_form_discrepancy() {
        let r = correlation_report(&build_lds(2).unwrap());
        let table = report_table(&r);
        assert!(table.contains("tsc closed form"));
        assert!(table.contains("41/9"));
        assert!(table.contains("32/3"));
    }

    #[test]
    fn json_report_parses_back() {
        let r = correlation_report(&build_lds(3).unwrap());
        let v: serde_json::Value = serde_json::from_str(&report_json(&r)).unwrap();
        assert_eq!(v["K"], 15);
        assert_eq!(v["c_max"]["frac"], "1/4");
        assert_eq!(v["tsc"]["frac"], "207/8");
        assert_eq!(v["distance_spectrum"].as_array().unwrap().len(), 3);
    }
}
