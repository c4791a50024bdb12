//! Slopes of syzygy bundles and the comparison between `M_{E(d)}` and its
//! subbundle `M_{E(d)⊗O(-S)}`.
//!
//! For a globally generated `E` of rank `r`, `M_E` has rank `h⁰(E) - r` and
//! first Chern class `-c₁(E)`, so `μ_A(M_E) = -(c₁(E)·A) / (h⁰(E) - r)`.
//! Clearing the two (positive) denominators, the subbundle has larger slope
//! iff
//!
//! ```text
//! N(d) = (c₁(E(d))·A)(h⁰(E(d)(-S)) - r) - (c₁(E(d)(-S))·A)(h⁰(E(d)) - r) > 0.
//! ```
//!
//! `N` is computed directly from the Chern data. Its quadratic expansion is
//! recovered by interpolation, and that interpolant is the authority for
//! every verdict. The closed-form coefficients as usually printed are kept
//! alongside for comparison only.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::chern::{h0_under_vanishing, tensor_line, twist, Assumption, BundleNumerics, Tagged};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceData};
use crate::poly::{QuadraticPolynomial, Threshold};
use crate::rational::{frac, int, sign, Rational};

/// Numerical invariants of the syzygy bundle `M_E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyzygyInvariants {
    #[serde(with = "crate::rational::as_string")]
    pub rank_m: Rational,
    pub c1_m: DivisorClass,
    pub source: BundleNumerics,
}

pub fn syzygy_invariants(
    bundle: &BundleNumerics,
    surface: &SurfaceData,
) -> Result<Tagged<SyzygyInvariants>> {
    let h0 = h0_under_vanishing(bundle, surface)?;
    Ok(h0.map(|h0| SyzygyInvariants {
        rank_m: h0 - int(i64::from(bundle.rank)),
        c1_m: -&bundle.c1,
        source: bundle.clone(),
    }))
}

/// `μ_A(M_E) = -(c₁(E)·A) / (h⁰(E) - r)`.
pub fn syzygy_slope(
    bundle: &BundleNumerics,
    polarization: &DivisorClass,
    surface: &SurfaceData,
) -> Result<Tagged<Rational>> {
    slope_of("E", bundle, polarization, surface)
}

fn slope_of(
    label: &str,
    bundle: &BundleNumerics,
    polarization: &DivisorClass,
    surface: &SurfaceData,
) -> Result<Tagged<Rational>> {
    surface.check("polarization", polarization)?;
    let inv = syzygy_invariants(bundle, surface)?;
    if !inv.value.rank_m.is_positive() {
        return Err(Error::SlopeUndefined {
            bundle: label.to_string(),
            denominator: inv.value.rank_m,
        });
    }
    let degree = surface.pair(&inv.value.c1_m, polarization)?;
    Ok(inv.map(|i| degree / i.rank_m))
}

/// The data of one slope comparison: a bundle `E`, the twisting class `D`
/// (normally `det E`), the subtracted effective class `S` and the
/// polarization `A`.
#[derive(Debug, Clone)]
pub struct SlopeComparison<'a> {
    pub surface: &'a SurfaceData,
    pub bundle: &'a BundleNumerics,
    pub determinant: &'a DivisorClass,
    pub subtracted: &'a DivisorClass,
    pub polarization: &'a DivisorClass,
}

/// Both syzygy slopes at one twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopePair {
    /// `μ_A(M_{E(d)⊗O(-S)})`
    pub subbundle: Rational,
    /// `μ_A(M_{E(d)})`
    pub bundle: Rational,
}

impl<'a> SlopeComparison<'a> {
    pub fn new(
        surface: &'a SurfaceData,
        bundle: &'a BundleNumerics,
        determinant: &'a DivisorClass,
        subtracted: &'a DivisorClass,
        polarization: &'a DivisorClass,
    ) -> Result<Self> {
        surface.check("c1", &bundle.c1)?;
        surface.check("D", determinant)?;
        surface.check("S", subtracted)?;
        surface.check("A", polarization)?;
        bundle.validate("E")?;
        Ok(SlopeComparison {
            surface,
            bundle,
            determinant,
            subtracted,
            polarization,
        })
    }

    fn twisted_pair(&self, d: i64) -> Result<(BundleNumerics, BundleNumerics)> {
        let full = twist(self.bundle, d, self.determinant, self.surface)?;
        let sub = tensor_line(&full, &-self.subtracted, self.surface)?;
        Ok((full, sub))
    }

    fn rank(&self) -> Rational {
        int(i64::from(self.bundle.rank))
    }

    /// `N(d)` with no sign requirement on the slope denominators.
    pub fn numerator(&self, d: i64) -> Result<Rational> {
        let (full, sub) = self.twisted_pair(d)?;
        let r = self.rank();
        let h0_full = h0_under_vanishing(&full, self.surface)?.value;
        let h0_sub = h0_under_vanishing(&sub, self.surface)?.value;
        let deg_full = self.surface.pair(&full.c1, self.polarization)?;
        let deg_sub = self.surface.pair(&sub.c1, self.polarization)?;
        Ok(deg_full * (h0_sub - &r) - deg_sub * (h0_full - r))
    }

    /// `N(d)`, refusing when either syzygy bundle has nonpositive rank.
    pub fn slope_difference_numerator(&self, d: i64) -> Result<Tagged<Rational>> {
        self.denominators_positive(d)?;
        Ok(Tagged {
            value: self.numerator(d)?,
            assumptions: vec![Assumption::HigherCohomologyVanishes],
            warnings: Vec::new(),
        })
    }

    fn denominators_positive(&self, d: i64) -> Result<()> {
        let (full, sub) = self.twisted_pair(d)?;
        let r = self.rank();
        for (label, b) in [("E(d)", &full), ("E(d)(-S)", &sub)] {
            let denominator = h0_under_vanishing(b, self.surface)?.value - &r;
            if !denominator.is_positive() {
                return Err(Error::SlopeUndefined {
                    bundle: format!("{label} at d = {d}"),
                    denominator,
                });
            }
        }
        Ok(())
    }

    /// Both syzygy slopes at twist `d`.
    pub fn slopes(&self, d: i64) -> Result<SlopePair> {
        let (full, sub) = self.twisted_pair(d)?;
        let label_full = format!("E(d) at d = {d}");
        let label_sub = format!("E(d)(-S) at d = {d}");
        Ok(SlopePair {
            subbundle: slope_of(&label_sub, &sub, self.polarization, self.surface)?.value,
            bundle: slope_of(&label_full, &full, self.polarization, self.surface)?.value,
        })
    }

    /// The degree-≤2 interpolant of `N` through `d = 0, 1, 2`.
    pub fn quadratic_expansion(&self) -> Result<QuadraticPolynomial> {
        Ok(QuadraticPolynomial::through_0_1_2(
            &self.numerator(0)?,
            &self.numerator(1)?,
            &self.numerator(2)?,
        ))
    }

    /// Intersection numbers the closed forms are written in.
    pub fn intersection_numbers(&self) -> Result<IntersectionNumbers> {
        let x = self.surface;
        let (d, s, a, k) = (
            self.determinant,
            self.subtracted,
            self.polarization,
            x.canonical_class(),
        );
        Ok(IntersectionNumbers {
            d_squared: x.pair(d, d)?,
            s_dot_a: x.pair(s, a)?,
            d_dot_a: x.pair(d, a)?,
            d_dot_s: x.pair(d, s)?,
            k_dot_s: x.pair(k, s)?,
            s_squared: x.pair(s, s)?,
            d_dot_k: x.pair(d, k)?,
        })
    }

    /// `(2r-1)(D²)(S·A) - 2(D·A)(D·S)`, the leading-term condition as printed.
    pub fn printed_condition(&self) -> Result<Rational> {
        let n = self.intersection_numbers()?;
        let r = self.rank();
        Ok((int(2) * r - int(1)) * &n.d_squared * &n.s_dot_a - int(2) * &n.d_dot_a * &n.d_dot_s)
    }

    /// `(D²)(S·A) - 2(D·A)(D·S)`.
    pub fn unstrengthened_condition(&self) -> Result<Rational> {
        let n = self.intersection_numbers()?;
        Ok(&n.d_squared * &n.s_dot_a - int(2) * &n.d_dot_a * &n.d_dot_s)
    }

    /// The closed-form coefficients transcribed literally, with their
    /// coefficient-wise difference from the interpolated expansion.
    pub fn paper_coefficients(&self) -> Result<PrintedCoefficients> {
        let n = self.intersection_numbers()?;
        let r = self.rank();
        let half = frac(1, 2);
        let chi = int(self.surface.chi_structure_sheaf());
        let lead = (int(2) * &r - int(1)) * &n.d_squared * &n.s_dot_a
            - int(2) * &n.d_dot_a * &n.d_dot_s;
        let canonical = (&n.k_dot_s + &n.s_squared) * &n.d_dot_a - &n.d_dot_k * &n.s_dot_a;
        let a2 = &r * &r * &half * &lead;
        let a1 = &r * &lead + &r * &r * &half * &canonical;
        let a0 = (&r * &half * &n.s_dot_a * &n.d_squared - &n.d_dot_a * &n.d_dot_s)
            + &r * &half * &canonical
            + &r * &r * (chi - int(1))
            + &r * &self.bundle.c2 * &n.s_dot_a;
        let printed = QuadraticPolynomial::new(a2, a1, a0);
        let oracle = self.quadratic_expansion()?;
        let discrepancy = printed.minus(&oracle);
        Ok(PrintedCoefficients {
            printed,
            oracle,
            discrepancy,
        })
    }

    /// Part (1): instability of `M_{E(d)}` for large `d` via the subbundle
    /// `M_{E(d)(-S)}`, decided by the sign of the interpolated leading
    /// coefficient.
    pub fn criterion_part1(&self) -> Result<Part1Record> {
        let printed_condition = self.printed_condition()?;
        let oracle = self.quadratic_expansion()?;
        let verdict = Verdict::from_positive(oracle.a2.is_positive());
        let printed_verdict = Verdict::from_positive(printed_condition.is_positive());
        Ok(Part1Record {
            printed_sign: sign(&printed_condition),
            oracle_sign: sign(&oracle.a2),
            discrepancy_case: verdict != printed_verdict,
            printed_condition,
            oracle_a2: oracle.a2,
            verdict,
            printed_verdict,
        })
    }

    /// Part (2): the explicit twist bound. The rigorous threshold comes from
    /// the interpolated quadratic; `-A₁/A₀` from the printed coefficients is
    /// carried as printed.
    pub fn criterion_part2_threshold(&self) -> Result<Part2Record> {
        let printed = self.paper_coefficients()?;
        let printed_threshold = (!printed.printed.a0.is_zero())
            .then(|| -&printed.printed.a1 / &printed.printed.a0);
        Ok(Part2Record {
            printed_condition: self.printed_condition()?,
            printed_threshold,
            threshold: printed.oracle.positivity_threshold(),
            oracle: printed.oracle,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionNumbers {
    #[serde(with = "crate::rational::as_string")]
    pub d_squared: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub s_dot_a: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub d_dot_a: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub d_dot_s: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub k_dot_s: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub s_squared: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub d_dot_k: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedCoefficients {
    /// As printed; not authoritative.
    pub printed: QuadraticPolynomial,
    pub oracle: QuadraticPolynomial,
    /// `printed - oracle`, coefficient by coefficient.
    pub discrepancy: QuadraticPolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The subbundle has strictly larger slope for all large `d`.
    UnstableForLargeD,
    NoConclusion,
}

impl Verdict {
    fn from_positive(positive: bool) -> Self {
        if positive {
            Verdict::UnstableForLargeD
        } else {
            Verdict::NoConclusion
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Part1Record {
    #[serde(with = "crate::rational::as_string")]
    pub printed_condition: Rational,
    pub printed_sign: i8,
    #[serde(with = "crate::rational::as_string")]
    pub oracle_a2: Rational,
    pub oracle_sign: i8,
    pub verdict: Verdict,
    /// What the printed condition alone would conclude; not authoritative.
    pub printed_verdict: Verdict,
    /// Printed condition and oracle disagree on the verdict.
    pub discrepancy_case: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Part2Record {
    #[serde(with = "crate::rational::as_string")]
    pub printed_condition: Rational,
    /// `-A₁/A₀` from the printed coefficients, when `A₀ ≠ 0`.
    #[serde(serialize_with = "serialize_opt_rational")]
    pub printed_threshold: Option<Rational>,
    pub oracle: QuadraticPolynomial,
    pub threshold: Threshold,
}

fn serialize_opt_rational<S: serde::Serializer>(
    value: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_some(&crate::rational::format_rational(v)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn bl2() -> SurfaceData {
        SurfaceData::new(
            "Bl2P2",
            vec![vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]],
            DivisorClass::from_ints(&[-3, 1, 1]),
            1,
            vec![
                DivisorClass::from_ints(&[0, 1, 0]),
                DivisorClass::from_ints(&[0, 0, 1]),
                DivisorClass::from_ints(&[1, -1, -1]),
            ],
        )
        .unwrap()
    }

    fn p2() -> SurfaceData {
        SurfaceData::new(
            "P2",
            vec![vec![1]],
            DivisorClass::from_ints(&[-3]),
            1,
            vec![DivisorClass::from_ints(&[1])],
        )
        .unwrap()
    }

    #[test]
    fn slope_of_line_on_blowup() {
        let x = bl2();
        let e = BundleNumerics::line_bundle(DivisorClass::from_ints(&[1, 0, 0]));
        let mu = syzygy_slope(&e, &DivisorClass::from_ints(&[1, 0, 0]), &x).unwrap();
        assert_eq!(mu.value, frac(-1, 2));
        assert_eq!(mu.assumptions, vec![Assumption::HigherCohomologyVanishes]);
    }

    #[test]
    fn slope_zero_when_degree_zero() {
        let x = bl2();
        // c1 = E1 + E2 - ... pick c1 with c1·A = 0 and enough sections: 2L with A = E1
        let e = BundleNumerics::line_bundle(DivisorClass::from_ints(&[2, 0, 0]));
        let mu = syzygy_slope(&e, &DivisorClass::from_ints(&[0, 1, 0]), &x).unwrap();
        assert_eq!(mu.value, int(0));
    }

    #[test]
    fn slope_on_plane_matches_classical_formula() {
        let x = p2();
        let h = DivisorClass::from_ints(&[1]);
        for n in 1..=12i64 {
            let e = BundleNumerics::line_bundle(DivisorClass::from_ints(&[n]));
            let mu = syzygy_slope(&e, &h, &x).unwrap().value;
            assert_eq!(mu, frac(-2, n + 3), "n = {n}");
        }
    }

    #[test]
    fn slope_undefined_without_enough_sections() {
        let x = bl2();
        let trivial = BundleNumerics::line_bundle(DivisorClass::zero(3));
        let err = syzygy_slope(&trivial, &DivisorClass::from_ints(&[1, 0, 0]), &x).unwrap_err();
        assert!(matches!(err, Error::SlopeUndefined { .. }));
    }

    #[test]
    fn zero_subtraction_gives_zero_numerator() {
        let x = bl2();
        let e = BundleNumerics::new(2, DivisorClass::from_ints(&[3, -1, -1]), int(2)).unwrap();
        let zero = DivisorClass::zero(3);
        let a = DivisorClass::from_ints(&[3, -1, -1]);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &zero, &a).unwrap();
        for d in 0..10 {
            assert_eq!(cmp.numerator(d).unwrap(), int(0));
        }
        assert!(cmp.quadratic_expansion().unwrap().is_zero());
        let part1 = cmp.criterion_part1().unwrap();
        assert_eq!(part1.printed_condition, int(0));
        assert_eq!(part1.verdict, Verdict::NoConclusion);
        let part2 = cmp.criterion_part2_threshold().unwrap();
        assert_eq!(part2.threshold, Threshold::Never);
    }

    #[test]
    fn printed_constant_term_at_zero_subtraction() {
        // χ(O_X) = 2 lattice: printed A₀ collapses to r²(χ-1) while N ≡ 0
        let x = SurfaceData::new(
            "chi-two",
            vec![vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]],
            DivisorClass::from_ints(&[-3, 1, 1]),
            2,
            vec![
                DivisorClass::from_ints(&[0, 1, 0]),
                DivisorClass::from_ints(&[0, 0, 1]),
                DivisorClass::from_ints(&[1, -1, -1]),
            ],
        )
        .unwrap();
        let e = BundleNumerics::new(3, DivisorClass::from_ints(&[3, -1, -1]), int(4)).unwrap();
        let zero = DivisorClass::zero(3);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &zero, &e.c1).unwrap();
        let pc = cmp.paper_coefficients().unwrap();
        assert!(pc.oracle.is_zero());
        assert_eq!(pc.printed, QuadraticPolynomial::new(int(0), int(0), int(9)));
        assert_eq!(pc.discrepancy.a0, int(9));
    }

    #[test]
    fn boundary_polarization_running_example() {
        let x = bl2();
        let e = BundleNumerics::new(2, DivisorClass::from_ints(&[3, -1, -1]), int(2)).unwrap();
        let s = DivisorClass::from_ints(&[0, 1, 0]);
        let a = DivisorClass::from_ints(&[3, -2, -1]);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &s, &a).unwrap();
        // 3·7·2 - 2·6·1
        assert_eq!(cmp.printed_condition().unwrap(), int(30));
        assert_eq!(cmp.unstrengthened_condition().unwrap(), int(2));
        let part1 = cmp.criterion_part1().unwrap();
        assert_eq!(part1.verdict, Verdict::UnstableForLargeD);
        assert!(!part1.discrepancy_case);
    }

    #[test]
    fn half_step_polarization_is_eventually_stable_direction() {
        // A = 3L - (3/2)E1 - E2: the printed condition is positive but
        // N(d) has negative leading coefficient.
        let x = bl2();
        let e = BundleNumerics::new(2, DivisorClass::from_ints(&[3, -1, -1]), int(2)).unwrap();
        let s = DivisorClass::from_ints(&[0, 1, 0]);
        let a = DivisorClass::new(vec![int(3), frac(-3, 2), int(-1)]);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &s, &a).unwrap();
        let part1 = cmp.criterion_part1().unwrap();
        assert_eq!(part1.printed_condition, frac(37, 2));
        assert_eq!(part1.oracle_a2, int(-5));
        assert!(part1.discrepancy_case);
        assert_eq!(cmp.criterion_part2_threshold().unwrap().threshold, Threshold::Never);
    }

    #[test]
    fn checked_numerator_reports_undefined_slope() {
        let x = bl2();
        let e = BundleNumerics::line_bundle(DivisorClass::from_ints(&[1, 0, 0]));
        let s = DivisorClass::from_ints(&[1, 0, 0]);
        let a = DivisorClass::from_ints(&[3, -1, -1]);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &s, &a).unwrap();
        // E(0)(-S) = O: h0 - r = 0
        assert!(matches!(
            cmp.slope_difference_numerator(0),
            Err(Error::SlopeUndefined { .. })
        ));
        assert!(cmp.slope_difference_numerator(1).is_ok());
        assert!(cmp.numerator(0).is_ok());
    }

    #[test]
    fn threshold_is_rechecked_against_numerator() {
        let x = bl2();
        let e = BundleNumerics::new(2, DivisorClass::from_ints(&[3, -1, -1]), int(2)).unwrap();
        let s = DivisorClass::from_ints(&[0, 1, 0]);
        let a = DivisorClass::new(vec![int(3), frac(-15, 8), int(-1)]);
        let cmp = SlopeComparison::new(&x, &e, &e.c1, &s, &a).unwrap();
        let rec = cmp.criterion_part2_threshold().unwrap();
        let d0 = rec.threshold.as_finite().expect("finite threshold");
        let d0: i64 = d0.try_into().unwrap();
        for d in d0..d0 + 26 {
            assert!(cmp.numerator(d).unwrap().is_positive(), "d = {d}");
        }
        if d0 > 0 {
            assert!(!cmp.numerator(d0 - 1).unwrap().is_positive());
        }
        assert!(d0 >= 0 && BigInt::from(d0) == *rec.threshold.as_finite().unwrap());
    }
}
