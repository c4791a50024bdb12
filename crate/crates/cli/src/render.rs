//! Human-readable rendering and the JSON shapes for the slope and criterion
//! commands. Rationals always serialize as strings.

use std::fmt::Write;

use serde::Serialize;

use syzygy_core::chern::chi;
use syzygy_core::destabilize::{BatchOutcome, BatchReport, DestabilizationReport};
use syzygy_core::rational::format_rational;
use syzygy_core::slopes::{syzygy_invariants, IntersectionNumbers, Part1Record, Part2Record, PrintedCoefficients};
use syzygy_core::{
    BundleNumerics, DivisorClass, QuadraticPolynomial, Rational, Result, SlopeComparison, SurfaceData,
    Tagged, ValidationReport,
};

fn r(x: &Rational) -> String {
    format_rational(x)
}

fn poly(q: &QuadraticPolynomial) -> String {
    let term = |c: &Rational, first: bool| {
        let text = r(c);
        match text.strip_prefix('-') {
            Some(abs) if first => format!("-{abs}"),
            Some(abs) => format!(" - {abs}"),
            None if first => text,
            None => format!(" + {text}"),
        }
    };
    format!("{}·d²{}·d{}", term(&q.a2, true), term(&q.a1, false), term(&q.a0, false))
}

fn notes(out: &mut String, assumptions: &[String], warnings: &[String]) {
    for a in assumptions {
        let _ = writeln!(out, "  {a}");
    }
    for w in warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
}

fn describe<T>(tagged: &Tagged<T>) -> Vec<String> {
    tagged.assumptions.iter().map(|a| a.describe().to_string()).collect()
}

pub fn validation(report: &ValidationReport) -> String {
    let mut out = format!("surface {}\n", report.surface);
    for (group, checks) in [
        ("structural", &report.structural),
        ("pipeline", &report.pipeline),
        ("advisory", &report.advisory),
    ] {
        let _ = writeln!(out, "{group}:");
        for c in checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "  [{mark}] {}", c.name);
            } else {
                let _ = writeln!(out, "  [{mark}] {} ({})", c.name, c.detail);
            }
        }
    }
    let verdict = match (report.structural_ok(), report.pipeline_ok()) {
        (false, _) => "structurally invalid",
        (true, false) => "valid, but the destabilization hypotheses fail",
        (true, true) => "valid, destabilization hypotheses hold",
    };
    let _ = writeln!(out, "{verdict}");
    out
}

#[derive(Debug, Serialize)]
pub struct SlopeOutput {
    surface: String,
    bundle: String,
    twist: i64,
    polarization: DivisorClass,
    twisted: BundleNumerics,
    #[serde(with = "syzygy_core::rational::as_string")]
    chi: Rational,
    #[serde(with = "syzygy_core::rational::as_string")]
    h0: Rational,
    #[serde(with = "syzygy_core::rational::as_string")]
    syzygy_rank: Rational,
    #[serde(with = "syzygy_core::rational::as_string")]
    slope: Rational,
    assumptions: Vec<String>,
    warnings: Vec<String>,
    #[serde(skip)]
    display: [String; 3],
}

impl SlopeOutput {
    pub fn new(
        surface: &SurfaceData,
        bundle: &str,
        twist: i64,
        polarization: &DivisorClass,
        twisted: &BundleNumerics,
        slope: Tagged<Rational>,
    ) -> Result<Self> {
        let inv = syzygy_invariants(twisted, surface)?;
        let rank = i64::from(twisted.rank);
        Ok(SlopeOutput {
            surface: surface.name().to_string(),
            bundle: bundle.to_string(),
            twist,
            polarization: polarization.clone(),
            twisted: twisted.clone(),
            chi: chi(twisted, surface)?,
            h0: &inv.value.rank_m + Rational::from_integer(rank.into()),
            syzygy_rank: inv.value.rank_m.clone(),
            assumptions: describe(&slope),
            warnings: slope.warnings.clone(),
            slope: slope.value,
            display: [
                surface.display(polarization),
                surface.display(&twisted.c1),
                r(&twisted.c2),
            ],
        })
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{} on {}, twist d = {}, polarization A = {}\n",
            self.bundle, self.surface, self.twist, self.display[0]
        );
        let _ = writeln!(
            out,
            "  E(d): rank {}, c1 = {}, c2 = {}",
            self.twisted.rank, self.display[1], self.display[2]
        );
        let _ = writeln!(out, "  chi = {}, h0 = {}", r(&self.chi), r(&self.h0));
        let _ = writeln!(out, "  rank M = {}", r(&self.syzygy_rank));
        let _ = writeln!(out, "  slope of M = {}", r(&self.slope));
        notes(&mut out, &self.assumptions, &self.warnings);
        out
    }
}

#[derive(Debug, Serialize)]
pub struct CriterionOutput {
    surface: String,
    bundle: String,
    subtracted: DivisorClass,
    polarization: DivisorClass,
    intersections: IntersectionNumbers,
    part1: Part1Record,
    part2: Part2Record,
    coefficients: PrintedCoefficients,
    /// Exact numerator values for the first few twists.
    samples: Vec<Sample>,
}

#[derive(Debug, Serialize)]
struct Sample {
    d: i64,
    #[serde(with = "syzygy_core::rational::as_string")]
    numerator: Rational,
}

impl CriterionOutput {
    pub fn new(surface: &SurfaceData, bundle: &str, cmp: &SlopeComparison<'_>) -> Result<Self> {
        let samples = (0..=5)
            .map(|d| {
                Ok(Sample {
                    d,
                    numerator: cmp.numerator(d)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CriterionOutput {
            surface: surface.name().to_string(),
            bundle: bundle.to_string(),
            subtracted: cmp.subtracted.clone(),
            polarization: cmp.polarization.clone(),
            intersections: cmp.intersection_numbers()?,
            part1: cmp.criterion_part1()?,
            part2: cmp.criterion_part2_threshold()?,
            coefficients: cmp.paper_coefficients()?,
            samples,
        })
    }

    pub fn render(&self, surface: &SurfaceData, paper_mode: bool) -> String {
        let mut out = format!(
            "{} on {}, S = {}, A = {}\n",
            self.bundle,
            self.surface,
            surface.display(&self.subtracted),
            surface.display(&self.polarization)
        );
        let _ = writeln!(out, "  slope-difference numerator N(d) = {}", poly(&self.part2.oracle));
        for s in &self.samples {
            let _ = writeln!(out, "    N({}) = {}", s.d, r(&s.numerator));
        }
        let _ = writeln!(out, "  leading coefficient a2 = {}", r(&self.part1.oracle_a2));
        let _ = writeln!(out, "  verdict: {}", verdict_text(self.part1.verdict));
        match self.part2.threshold.as_finite() {
            Some(d0) => {
                let _ = writeln!(out, "  N(d) > 0 for all integers d >= {d0}");
            }
            None => {
                let _ = writeln!(out, "  N(d) is not eventually positive");
            }
        }
        if paper_mode {
            paper_lines(&mut out, &self.part1, &self.coefficients);
            if let Some(t) = &self.part2.printed_threshold {
                let _ = writeln!(out, "  [printed] -A1/A0 = {}", r(t));
            }
        }
        out
    }
}

fn verdict_text(v: syzygy_core::slopes::Verdict) -> &'static str {
    match v {
        syzygy_core::slopes::Verdict::UnstableForLargeD => "M_{E(d)} is unstable for all large d",
        syzygy_core::slopes::Verdict::NoConclusion => "no conclusion",
    }
}

fn paper_lines(out: &mut String, part1: &Part1Record, coefficients: &PrintedCoefficients) {
    let _ = writeln!(
        out,
        "  [printed] (2r-1)D²(S·A) - 2(D·A)(D·S) = {} -> {}",
        r(&part1.printed_condition),
        verdict_text(part1.printed_verdict)
    );
    let _ = writeln!(out, "  [printed] coefficients {}", poly(&coefficients.printed));
    let _ = writeln!(out, "  [printed] minus exact   {}", poly(&coefficients.discrepancy));
    if part1.discrepancy_case {
        let _ = writeln!(out, "  [printed] verdict disagrees with the exact expansion");
    }
}

pub fn destabilization(
    surface: &SurfaceData,
    bundle: &str,
    report: &DestabilizationReport,
    paper_mode: bool,
) -> String {
    let indices = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
    let mut out = format!("{bundle} on {}\n", report.surface);
    let _ = writeln!(
        out,
        "  minimal curve C{} (ties: {}), S = {}",
        report.chosen_index_j,
        indices(&report.tied_indices),
        surface.display(&report.subtracted)
    );
    let _ = writeln!(
        out,
        "  t0 = {} (vanishing on C{})",
        r(&report.t0),
        indices(&report.vanishing_generator_indices)
    );
    let _ = writeln!(out, "  boundary A = {}", surface.display(&report.boundary_a));
    let _ = writeln!(
        out,
        "  chain value {} >= {}",
        r(&report.chain_value),
        r(&report.chain_lower_bound)
    );
    let _ = writeln!(out, "  epsilon = {}", r(&report.epsilon));
    let _ = writeln!(out, "  ample A' = {}", surface.display(&report.ample_a_prime));
    let _ = writeln!(out, "  N(d) = {}", poly(&report.quadratic));
    let _ = writeln!(out, "  M_{{E(d)}} is A'-unstable for all d >= {}", report.d0);
    if paper_mode {
        paper_lines(&mut out, &report.criterion, &report.coefficients);
        let _ = writeln!(out, "  [printed] strengthened value = {}", r(&report.strengthened_value));
    }
    notes(&mut out, &report.assumptions, &report.warnings);
    out
}

pub fn batch(report: &BatchReport) -> String {
    let mut out = String::new();
    for e in &report.entries {
        let line = match &e.outcome {
            BatchOutcome::Success {
                report,
                discrepancy_case,
            } => format!(
                "ok        eps = {}, d0 = {}{}",
                r(&report.epsilon),
                report.d0,
                if *discrepancy_case { " (printed verdict differs)" } else { "" }
            ),
            BatchOutcome::HypothesisViolation { message } => format!("skipped   {message}"),
            BatchOutcome::Failure { message } => format!("failed    {message}"),
        };
        let _ = writeln!(out, "{:<12} {:<8} {line}", e.surface, e.bundle);
    }
    let _ = writeln!(
        out,
        "{} succeeded, {} hypothesis violations, {} failures, {} discrepancy cases",
        report.successes, report.hypothesis_violations, report.failures, report.discrepancy_cases
    );
    out
}
