//! Chern classes of twists, Riemann–Roch on surfaces, and h⁰ in the
//! vanishing range.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceData};
use crate::rational::{format_rational, int, Rational};

/// Rank and Chern classes of a vector bundle on a surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleNumerics {
    pub rank: u32,
    pub c1: DivisorClass,
    #[serde(with = "crate::rational::as_string")]
    pub c2: Rational,
}

impl BundleNumerics {
    pub fn new(rank: u32, c1: DivisorClass, c2: Rational) -> Result<Self> {
        let bundle = BundleNumerics { rank, c1, c2 };
        bundle.validate("bundle")?;
        Ok(bundle)
    }

    pub fn line_bundle(c1: DivisorClass) -> Self {
        BundleNumerics {
            rank: 1,
            c1,
            c2: Rational::zero(),
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidBundle {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if self.rank == 0 {
            return Err(invalid("rank must be at least 1"));
        }
        if self.rank == 1 && !self.c2.is_zero() {
            return Err(invalid("a line bundle has c2 = 0"));
        }
        Ok(())
    }

    fn rank_q(&self) -> Rational {
        int(i64::from(self.rank))
    }

    fn binom_rank_2(&self) -> Rational {
        let r = i64::from(self.rank);
        int(r * (r - 1) / 2)
    }
}

/// Hypotheses a value was computed under. They travel with results into
/// every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// h¹ = h² = 0, so h⁰ = χ.
    HigherCohomologyVanishes,
    /// E(d) and E(d)⊗O(-S) are globally generated.
    GlobalGeneration,
}

impl Assumption {
    pub fn describe(self) -> &'static str {
        match self {
            Assumption::HigherCohomologyVanishes => "assumes h^1 = h^2 = 0 (h^0 = chi)",
            Assumption::GlobalGeneration => {
                "assumes E(d) and E(d)(-S) are globally generated (user-asserted, not verified)"
            }
        }
    }
}

/// A value together with the assumptions it rests on and any data
/// warnings raised while computing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub assumptions: Vec<Assumption>,
    pub warnings: Vec<String>,
}

impl<T> Tagged<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Tagged<U> {
        Tagged {
            value: f(self.value),
            assumptions: self.assumptions,
            warnings: self.warnings,
        }
    }
}

/// `E ⊗ O(T)`:
/// `c₁ ↦ c₁ + rT`, `c₂ ↦ c₂ + (r-1)(c₁·T) + C(r,2)T²`.
pub fn tensor_line(
    bundle: &BundleNumerics,
    line: &DivisorClass,
    surface: &SurfaceData,
) -> Result<BundleNumerics> {
    surface.check("c1", &bundle.c1)?;
    surface.check("line class", line)?;
    let r = bundle.rank_q();
    let c1_t = surface.pair_unchecked(&bundle.c1, line);
    let t2 = surface.pair_unchecked(line, line);
    Ok(BundleNumerics {
        rank: bundle.rank,
        c1: &bundle.c1 + &line.scale(&r),
        c2: &bundle.c2 + (&r - int(1)) * c1_t + bundle.binom_rank_2() * t2,
    })
}

/// `E(d) = E ⊗ O(dD)`.
pub fn twist(
    bundle: &BundleNumerics,
    d: i64,
    divisor: &DivisorClass,
    surface: &SurfaceData,
) -> Result<BundleNumerics> {
    surface.check("c1", &bundle.c1)?;
    surface.check("D", divisor)?;
    let r = bundle.rank_q();
    let d = int(d);
    let c1_d = surface.pair_unchecked(&bundle.c1, divisor);
    let d2 = surface.pair_unchecked(divisor, divisor);
    Ok(BundleNumerics {
        rank: bundle.rank,
        c1: &bundle.c1 + &divisor.scale(&(&r * &d)),
        c2: &bundle.c2 + (&r - int(1)) * &d * c1_d + bundle.binom_rank_2() * &d * &d * d2,
    })
}

/// Riemann–Roch: `χ(E) = rχ(O_X) + ½c₁·(c₁ - K_X) - c₂`.
pub fn chi(bundle: &BundleNumerics, surface: &SurfaceData) -> Result<Rational> {
    surface.check("c1", &bundle.c1)?;
    let c1_minus_k = &bundle.c1 - surface.canonical_class();
    let half = Rational::new(1.into(), 2.into());
    Ok(bundle.rank_q() * int(surface.chi_structure_sheaf())
        + half * surface.pair_unchecked(&bundle.c1, &c1_minus_k)
        - &bundle.c2)
}

/// h⁰(E) under the assumption that h¹ and h² vanish.
pub fn h0_under_vanishing(
    bundle: &BundleNumerics,
    surface: &SurfaceData,
) -> Result<Tagged<Rational>> {
    let value = chi(bundle, surface)?;
    let mut warnings = Vec::new();
    if !value.is_integer() {
        warnings.push(format!(
            "chi = {} is not an integer; the Chern data is inconsistent with an actual bundle",
            format_rational(&value)
        ));
    }
    Ok(Tagged {
        value,
        assumptions: vec![Assumption::HigherCohomologyVanishes],
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn running_bundle() -> BundleNumerics {
        BundleNumerics::new(2, DivisorClass::from_ints(&[3, -1, -1]), int(2)).unwrap()
    }

    #[test]
    fn twist_running_example() {
        let x = bl2();
        let e = running_bundle();
        let t = twist(&e, 1, &e.c1, &x).unwrap();
        assert_eq!(t.c1, DivisorClass::from_ints(&[9, -3, -3]));
        assert_eq!(t.c2, int(16));
        assert_eq!(twist(&e, 0, &e.c1, &x).unwrap(), e);
    }

    #[test]
    fn twist_line_bundle() {
        let x = bl2();
        let l = BundleNumerics::line_bundle(DivisorClass::from_ints(&[3, -1, -1]));
        let t = twist(&l, 3, &l.c1, &x).unwrap();
        assert_eq!(t.c1, DivisorClass::from_ints(&[12, -4, -4]));
        assert_eq!(t.c2, int(0));
    }

    #[test]
    fn tensor_examples() {
        let x = bl2();
        let e = running_bundle();
        assert_eq!(tensor_line(&e, &DivisorClass::zero(3), &x).unwrap(), e);
        let t = tensor_line(&e, &DivisorClass::from_ints(&[0, -1, 0]), &x).unwrap();
        assert_eq!(t.c1, DivisorClass::from_ints(&[3, -3, -1]));
        assert_eq!(t.c2, int(0));
    }

    #[test]
    fn chi_examples() {
        let x = bl2();
        let line = BundleNumerics::line_bundle(DivisorClass::from_ints(&[1, 0, 0]));
        assert_eq!(chi(&line, &x).unwrap(), int(3));
        let trivial = BundleNumerics::line_bundle(DivisorClass::zero(3));
        assert_eq!(chi(&trivial, &x).unwrap(), int(1));
    }

    #[test]
    fn chi_on_plane_matches_binomial_count() {
        let x = p2();
        for n in 0..=10i64 {
            let bundle = BundleNumerics::line_bundle(DivisorClass::from_ints(&[n]));
            // dim of degree-n forms in 3 variables
            let expected = (n + 1) * (n + 2) / 2;
            assert_eq!(chi(&bundle, &x).unwrap(), int(expected), "n = {n}");
        }
    }

    #[test]
    fn h0_carries_vanishing_tag_and_integrality_warning() {
        let x = bl2();
        let line = BundleNumerics::line_bundle(DivisorClass::from_ints(&[1, 0, 0]));
        let h0 = h0_under_vanishing(&line, &x).unwrap();
        assert_eq!(h0.value, int(3));
        assert_eq!(h0.assumptions, vec![Assumption::HigherCohomologyVanishes]);
        assert!(h0.warnings.is_empty());

        let odd = BundleNumerics::new(2, DivisorClass::from_ints(&[1, 0, 0]), Rational::new(1.into(), 3.into())).unwrap();
        let h0 = h0_under_vanishing(&odd, &x).unwrap();
        assert_eq!(h0.warnings.len(), 1);
    }

    #[test]
    fn invalid_bundles_are_rejected() {
        assert!(BundleNumerics::new(0, DivisorClass::zero(3), int(0)).is_err());
        assert!(BundleNumerics::new(1, DivisorClass::zero(3), int(1)).is_err());
    }
}
