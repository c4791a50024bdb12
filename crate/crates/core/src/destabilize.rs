//! Construction of a polarization for which `M_{E(d)}` is unstable for
//! large `d`.
//!
//! Pick the generator `C_j` of least `D`-degree, walk from `D = det E`
//! along `-C_j` to the nef boundary `A = D - t₀C_j`, nudge back into the
//! ample cone with `A' = A + εC_j`, and compare `M_{E(d)(-C_j)}` against
//! `M_{E(d)}` at `A'`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::chern::{Assumption, BundleNumerics};
use crate::cones::{
    is_ample, is_nef, max_nef_parameter, perturb_to_ample_with, PerturbConstraint,
};
use crate::error::{Error, Hypothesis, Result};
use crate::lattice::{first_pairwise_violation, validate_surface, DivisorClass, SurfaceData};
use crate::poly::{QuadraticPolynomial, Threshold};
use crate::rational::{format_rational, Rational};
use crate::slopes::{Part1Record, PrintedCoefficients, SlopeComparison};

pub const JUSTIFICATION: &str = "For globally generated F ⊆ E, M_F is a subbundle of M_E; \
with E(d) and E(d)(-S) globally generated, M_{E(d)(-S)} ⊆ M_{E(d)}. \
Its slope exceeds that of M_{E(d)} for every d ≥ d0 because N(d) > 0 there \
(leading coefficient of the slope-difference numerator positive), so M_{E(d)} is not stable with respect to A'.";

/// Index of the generator with least `D`-degree (0-based, lowest index wins)
/// and every index attaining that degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalCurve {
    pub index: usize,
    pub ties: Vec<usize>,
    #[serde(with = "crate::rational::as_string")]
    pub degree: Rational,
}

pub fn choose_minimal_curve(class: &DivisorClass, surface: &SurfaceData) -> Result<MinimalCurve> {
    surface.check("D", class)?;
    let degrees: Vec<Rational> = surface
        .generators()
        .iter()
        .map(|g| surface.pair_unchecked(class, g))
        .collect();
    let degree = degrees
        .iter()
        .min()
        .cloned()
        .expect("surfaces have at least one generator");
    let ties: Vec<usize> = degrees
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == degree)
        .map(|(i, _)| i)
        .collect();
    Ok(MinimalCurve {
        index: ties[0],
        ties,
        degree,
    })
}

/// Everything the construction produced, with indices 1-based as `C_1..C_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DestabilizationReport {
    pub surface: String,
    pub bundle: BundleNumerics,
    pub chosen_index_j: usize,
    pub tied_indices: Vec<usize>,
    #[serde(rename = "S")]
    pub subtracted: DivisorClass,
    #[serde(with = "crate::rational::as_string")]
    pub t0: Rational,
    pub vanishing_generator_indices: Vec<usize>,
    pub boundary_a: DivisorClass,
    #[serde(with = "crate::rational::as_string")]
    pub epsilon: Rational,
    pub ample_a_prime: DivisorClass,
    /// `(D²)(S·A) - 2(D·A)(D·S)` at the boundary class.
    #[serde(with = "crate::rational::as_string")]
    pub chain_value: Rational,
    /// `D²(t₀ - D·C_j)`, the lower bound for `chain_value`.
    #[serde(with = "crate::rational::as_string")]
    pub chain_lower_bound: Rational,
    /// `(2r-1)(D²)(S·A') - 2(D·A')(D·S)`.
    #[serde(with = "crate::rational::as_string")]
    pub strengthened_value: Rational,
    /// Interpolated `N(d)` at `A'`.
    pub quadratic: QuadraticPolynomial,
    pub d0: Threshold,
    pub criterion: Part1Record,
    pub coefficients: PrintedCoefficients,
    pub justification: String,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
}

fn violation(h: Hypothesis) -> Error {
    Error::HypothesisViolation(h)
}

/// Checks every precondition of the construction, naming the first failure.
pub fn check_hypotheses(bundle: &BundleNumerics, surface: &SurfaceData) -> Result<()> {
    let report = validate_surface(surface);
    if let Some(failed) = report.structural.iter().find(|c| !c.passed) {
        return Err(violation(Hypothesis::StructurallyValid(format!(
            "{}: {}",
            failed.name, failed.detail
        ))));
    }
    if surface.picard_rank() < 3 {
        return Err(violation(Hypothesis::PicardRankAtLeastThree {
            rank: surface.picard_rank(),
        }));
    }
    if let Some((i, j, value)) = first_pairwise_violation(surface) {
        return Err(violation(Hypothesis::PairwiseIntersectionAtMostOne { i, j, value }));
    }
    if bundle.rank == 0 {
        return Err(violation(Hypothesis::PositiveRank));
    }
    surface.check("c1", &bundle.c1)?;
    let ample = is_ample(&bundle.c1, surface)?;
    if let Some(w) = ample.witness {
        return Err(violation(Hypothesis::DeterminantAmple {
            witness: w.to_string(),
        }));
    }
    Ok(())
}

pub fn run_pipeline(bundle: &BundleNumerics, surface: &SurfaceData) -> Result<DestabilizationReport> {
    check_hypotheses(bundle, surface)?;
    bundle.validate("E")?;
    let det = &bundle.c1;
    let mut warnings = Vec::new();
    let report = validate_surface(surface);
    for c in report.advisory.iter().filter(|c| !c.passed) {
        warnings.push(format!("{} fails: {}", c.name, c.detail));
    }

    let minimal = choose_minimal_curve(det, surface)?;
    let cj = &surface.generators()[minimal.index];
    let nef = max_nef_parameter(det, cj, surface)?;
    let boundary = det - &cj.scale(&nef.t0);

    let d2 = surface.pair(det, det)?;
    let chain_lower_bound = &d2 * (&nef.t0 - &minimal.degree);
    let boundary_cmp = SlopeComparison::new(surface, bundle, det, cj, &boundary)?;
    let chain_value = boundary_cmp.unstrengthened_condition()?;
    if chain_value.is_negative() {
        return Err(Error::ChainViolated { value: chain_value });
    }
    if nef.t0 < minimal.degree {
        warnings.push(format!(
            "t0 = {} is below D.C_j = {}",
            format_rational(&nef.t0),
            format_rational(&minimal.degree)
        ));
    }

    let constraint = PerturbConstraint {
        rank: bundle.rank,
        determinant: det.clone(),
        subtracted: cj.clone(),
    };
    // The interpolated leading coefficient has the last word, so a candidate
    // must also make it strictly positive.
    let perturbation = perturb_to_ample_with(&boundary, cj, &constraint, surface, |candidate| {
        let cmp = SlopeComparison::new(surface, bundle, det, cj, candidate)?;
        let a2 = cmp.quadratic_expansion()?.a2;
        Ok((!a2.is_positive()).then(|| {
            format!(
                "interpolated leading coefficient a2 = {} is not positive",
                format_rational(&a2)
            )
        }))
    })?;
    let a_prime = perturbation.polarization;
    debug_assert!(is_ample(&a_prime, surface)?.holds);

    let cmp = SlopeComparison::new(surface, bundle, det, cj, &a_prime)?;
    let quadratic = cmp.quadratic_expansion()?;
    let d0 = quadratic.positivity_threshold();
    let criterion = cmp.criterion_part1()?;
    let coefficients = cmp.paper_coefficients()?;

    let assumptions = [
        Assumption::HigherCohomologyVanishes,
        Assumption::GlobalGeneration,
    ]
    .iter()
    .map(|a| format!("{} for d >= d0", a.describe()))
    .collect();

    Ok(DestabilizationReport {
        surface: surface.name().to_string(),
        bundle: bundle.clone(),
        chosen_index_j: minimal.index + 1,
        tied_indices: minimal.ties.iter().map(|i| i + 1).collect(),
        subtracted: cj.clone(),
        t0: nef.t0,
        vanishing_generator_indices: nef.vanishing_generator_indices.iter().map(|i| i + 1).collect(),
        boundary_a: boundary,
        epsilon: perturbation.epsilon,
        ample_a_prime: a_prime,
        chain_value,
        chain_lower_bound,
        strengthened_value: perturbation.constraint_value,
        quadratic,
        d0,
        criterion,
        coefficients,
        justification: JUSTIFICATION.to_string(),
        assumptions,
        warnings,
    })
}

/// One surface with the bundles to run on it.
#[derive(Debug, Clone)]
pub struct BatchJob {
    pub surface: SurfaceData,
    pub bundles: Vec<(String, BundleNumerics)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum BatchOutcome {
    Success {
        report: Box<DestabilizationReport>,
        discrepancy_case: bool,
    },
    HypothesisViolation {
        message: String,
    },
    Failure {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchEntry {
    pub surface: String,
    pub bundle: String,
    pub outcome: BatchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub successes: usize,
    pub hypothesis_violations: usize,
    pub failures: usize,
    pub discrepancy_cases: usize,
    pub entries: Vec<BatchEntry>,
}

/// Runs the pipeline on every (surface, bundle) pair, in input order.
pub fn batch_report(jobs: &[BatchJob]) -> BatchReport {
    let mut entries = Vec::new();
    for job in jobs {
        for (name, bundle) in &job.bundles {
            let outcome = match run_pipeline(bundle, &job.surface) {
                Ok(report) => BatchOutcome::Success {
                    discrepancy_case: report.criterion.discrepancy_case,
                    report: Box::new(report),
                },
                Err(e @ Error::HypothesisViolation(_)) => BatchOutcome::HypothesisViolation {
                    message: e.to_string(),
                },
                Err(e) => BatchOutcome::Failure {
                    message: e.to_string(),
                },
            };
            entries.push(BatchEntry {
                surface: job.surface.name().to_string(),
                bundle: name.clone(),
                outcome,
            });
        }
    }
    let count = |f: fn(&BatchOutcome) -> bool| entries.iter().filter(|e| f(&e.outcome)).count();
    BatchReport {
        successes: count(|o| matches!(o, BatchOutcome::Success { .. })),
        hypothesis_violations: count(|o| matches!(o, BatchOutcome::HypothesisViolation { .. })),
        failures: count(|o| matches!(o, BatchOutcome::Failure { .. })),
        discrepancy_cases: count(|o| {
            matches!(
                o,
                BatchOutcome::Success {
                    discrepancy_case: true,
                    ..
                }
            )
        }),
        entries,
    }
}

/// Re-derives the report's invariants from scratch. Returns the first
/// violated one.
pub fn verify_report(
    report: &DestabilizationReport,
    surface: &SurfaceData,
    horizon: i64,
) -> std::result::Result<(), String> {
    let fail = |what: &str| Err(what.to_string());
    let nef = is_nef(&report.boundary_a, surface).map_err(|e| e.to_string())?;
    if !nef.holds {
        return fail("boundary A is not nef");
    }
    if !surface
        .generators()
        .iter()
        .any(|g| surface.pair_unchecked(&report.boundary_a, g).is_zero())
    {
        return fail("boundary A meets no generator in zero");
    }
    if !is_ample(&report.ample_a_prime, surface).map_err(|e| e.to_string())?.holds {
        return fail("A' is not ample");
    }
    if report.chain_value.is_negative() {
        return fail("chain value negative");
    }
    if report.strengthened_value.is_negative() {
        return fail("strengthened value negative");
    }
    let Some(d0) = report.d0.as_finite() else {
        return fail("no threshold");
    };
    let d0: i64 = d0.try_into().map_err(|_| "threshold out of range".to_string())?;
    let cmp = SlopeComparison::new(
        surface,
        &report.bundle,
        &report.bundle.c1,
        &report.subtracted,
        &report.ample_a_prime,
    )
    .map_err(|e| e.to_string())?;
    for d in d0..=d0 + horizon {
        let n = cmp.numerator(d).map_err(|e| e.to_string())?;
        if !n.is_positive() {
            return Err(format!("N({d}) = {} is not positive", format_rational(&n)));
        }
    }
    Ok(())
}
