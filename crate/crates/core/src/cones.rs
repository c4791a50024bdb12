//! Nefness and ampleness against the effective-cone generators, the nef
//! boundary along a generator, and the perturbation back into the ample cone.
//!
//! All tests are membership tests in the dual of the cone spanned by the
//! supplied generators. They are only as good as that generator list.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceData};
use crate::rational::{format_rational, pow2_inverse, Rational};

/// Why a class fails to be nef or ample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    /// Pairs with generator `index` (0-based) to the recorded value.
    Generator { index: usize, value: String },
    /// Self-intersection is not positive.
    NonPositiveSquare { value: String },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Generator { index, value } => write!(f, "C{} pairing {value}", index + 1),
            Witness::NonPositiveSquare { value } => write!(f, "self-intersection {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Positivity {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Positivity {
    fn yes() -> Self {
        Positivity {
            holds: true,
            witness: None,
        }
    }

    fn no(witness: Witness) -> Self {
        Positivity {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// `D·C_i ≥ 0` for every generator. The witness is the first violator.
pub fn is_nef(class: &DivisorClass, surface: &SurfaceData) -> Result<Positivity> {
    surface.check("class", class)?;
    for (index, g) in surface.generators().iter().enumerate() {
        let value = surface.pair_unchecked(class, g);
        if value.is_negative() {
            return Ok(Positivity::no(Witness::Generator {
                index,
                value: format_rational(&value),
            }));
        }
    }
    Ok(Positivity::yes())
}

/// Nakai–Moishezon against the generator set: `D² > 0` and `D·C_i > 0`.
pub fn is_ample(class: &DivisorClass, surface: &SurfaceData) -> Result<Positivity> {
    surface.check("class", class)?;
    let square = surface.pair_unchecked(class, class);
    if !square.is_positive() {
        return Ok(Positivity::no(Witness::NonPositiveSquare {
            value: format_rational(&square),
        }));
    }
    for (index, g) in surface.generators().iter().enumerate() {
        let value = surface.pair_unchecked(class, g);
        if !value.is_positive() {
            return Ok(Positivity::no(Witness::Generator {
                index,
                value: format_rational(&value),
            }));
        }
    }
    Ok(Positivity::yes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NefBoundary {
    #[serde(with = "crate::rational::as_string")]
    pub t0: Rational,
    /// 0-based indices of generators with `(D - t0·C_j)·C_i = 0`.
    pub vanishing_generator_indices: Vec<usize>,
}

/// Largest `t` with `D - t·C_j` nef.
///
/// Only generators with `C_j·C_i > 0` bound `t`; the others keep
/// `(D - tC_j)·C_i ≥ D·C_i ≥ 0` for all `t ≥ 0`.
pub fn max_nef_parameter(
    class: &DivisorClass,
    direction: &DivisorClass,
    surface: &SurfaceData,
) -> Result<NefBoundary> {
    surface.check("D", class)?;
    surface.check("C_j", direction)?;
    let nef = is_nef(class, surface)?;
    if let Some(Witness::Generator { index, .. }) = nef.witness {
        return Err(Error::NotNef { witness: index });
    }

    let mut t0: Option<Rational> = None;
    for g in surface.generators() {
        let slope = surface.pair_unchecked(direction, g);
        if slope.is_positive() {
            let bound = surface.pair_unchecked(class, g) / slope;
            if t0.as_ref().is_none_or(|t| bound < *t) {
                t0 = Some(bound);
            }
        }
    }
    let Some(t0) = t0 else {
        let generator = surface
            .generators()
            .iter()
            .position(|g| g == direction)
            .unwrap_or(0);
        return Err(Error::NefRayUnbounded { generator });
    };

    let boundary = class - &direction.scale(&t0);
    let vanishing_generator_indices = surface
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| surface.pair_unchecked(&boundary, g).is_zero())
        .map(|(i, _)| i)
        .collect();
    Ok(NefBoundary {
        t0,
        vanishing_generator_indices,
    })
}

/// The leading-term inequality to carry from the boundary class `A` to
/// `A' = A + εC_j`: `(2r-1)(D²)(S·A') - 2(D·A')(D·S) ≥ 0`.
#[derive(Debug, Clone)]
pub struct PerturbConstraint {
    pub rank: u32,
    pub determinant: DivisorClass,
    pub subtracted: DivisorClass,
}

impl PerturbConstraint {
    pub fn value(&self, polarization: &DivisorClass, surface: &SurfaceData) -> Result<Rational> {
        let d = &self.determinant;
        let s = &self.subtracted;
        let d2 = surface.pair(d, d)?;
        let sa = surface.pair(s, polarization)?;
        let da = surface.pair(d, polarization)?;
        let ds = surface.pair(d, s)?;
        let factor = Rational::from_integer((2 * i64::from(self.rank) - 1).into());
        Ok(factor * d2 * sa - Rational::from_integer(2.into()) * da * ds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Perturbation {
    pub polarization: DivisorClass,
    #[serde(with = "crate::rational::as_string")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub constraint_value: Rational,
}

pub const EPSILON_SEARCH_DEPTH: u32 = 32;

/// Tries `ε = 1/2, 1/4, …, 2^-32` and returns the first `A + εC_j` that is
/// ample and satisfies the constraint.
pub fn perturb_to_ample(
    boundary: &DivisorClass,
    direction: &DivisorClass,
    constraint: &PerturbConstraint,
    surface: &SurfaceData,
) -> Result<Perturbation> {
    perturb_to_ample_with(boundary, direction, constraint, surface, |_| Ok(None))
}

/// As [`perturb_to_ample`], with an extra acceptance test. `extra` returns
/// `Some(reason)` to reject a candidate.
pub fn perturb_to_ample_with<F>(
    boundary: &DivisorClass,
    direction: &DivisorClass,
    constraint: &PerturbConstraint,
    surface: &SurfaceData,
    mut extra: F,
) -> Result<Perturbation>
where
    F: FnMut(&DivisorClass) -> Result<Option<String>>,
{
    surface.check("A", boundary)?;
    surface.check("C_j", direction)?;
    let mut last = None;
    for k in 1..=EPSILON_SEARCH_DEPTH {
        let epsilon = pow2_inverse(k);
        let candidate = boundary + &direction.scale(&epsilon);
        let ample = is_ample(&candidate, surface)?;
        let failure = if let Some(w) = ample.witness {
            Some(format!("A' not ample ({w})"))
        } else {
            let value = constraint.value(&candidate, surface)?;
            if value.is_negative() {
                Some(format!(
                    "(2r-1)(D^2)(S.A') - 2(D.A')(D.S) = {} < 0",
                    format_rational(&value)
                ))
            } else if let Some(reason) = extra(&candidate)? {
                Some(reason)
            } else {
                return Ok(Perturbation {
                    polarization: candidate,
                    epsilon,
                    constraint_value: value,
                });
            }
        };
        last = failure.map(|f| (epsilon, f));
    }
    let (last_epsilon, condition) = last.expect("search depth is positive");
    Err(Error::EpsilonExhausted {
        last_epsilon,
        condition,
    })
}
