//! Divisor classes on a fixed basis of the Néron–Severi lattice and the
//! intersection pairing between them.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// Coordinates of a divisor class in the surface's chosen basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass(Vec<Rational>);

impl DivisorClass {
    pub fn new(coords: Vec<Rational>) -> Self {
        DivisorClass(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DivisorClass(coords.iter().copied().map(int).collect())
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![Rational::zero(); rank])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        DivisorClass(self.0.iter().map(|c| c * factor).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        assert_eq!(self.len(), other.len(), "divisor classes of different rank");
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| f(a, b)).collect())
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::vec_as_string::serialize(&self.0, s)
    }
}

/// Numerical data of a smooth projective surface: the intersection form on a
/// chosen basis, the canonical class, χ(O_X) and the curves generating the
/// effective cone.
///
/// Construction only checks shapes. Use [`validate_surface`] for the
/// geometric checks (symmetry, nondegeneracy, signature).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceData {
    name: String,
    basis_labels: Option<Vec<String>>,
    intersection_matrix: Vec<Vec<i64>>,
    canonical_class: DivisorClass,
    chi_structure_sheaf: i64,
    effective_cone_generators: Vec<DivisorClass>,
}

impl SurfaceData {
    pub fn new(
        name: impl Into<String>,
        intersection_matrix: Vec<Vec<i64>>,
        canonical_class: DivisorClass,
        chi_structure_sheaf: i64,
        effective_cone_generators: Vec<DivisorClass>,
    ) -> Result<Self> {
        let name = name.into();
        let rank = intersection_matrix.len();
        if rank == 0 {
            return Err(Error::Parse {
                context: format!("surface {name}"),
                message: "Picard rank must be positive".into(),
            });
        }
        for (i, row) in intersection_matrix.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::DimensionMismatch {
                    class: format!("intersection_matrix row {}", i + 1),
                    expected: rank,
                    found: row.len(),
                });
            }
        }
        check_len("canonical_class", &canonical_class, rank)?;
        if effective_cone_generators.is_empty() {
            return Err(Error::Parse {
                context: format!("surface {name}"),
                message: "effective_cone_generators must be nonempty".into(),
            });
        }
        for (i, g) in effective_cone_generators.iter().enumerate() {
            check_len(&format!("generator C{}", i + 1), g, rank)?;
        }
        Ok(SurfaceData {
            name,
            basis_labels: None,
            intersection_matrix,
            canonical_class,
            chi_structure_sheaf,
            effective_cone_generators,
        })
    }

    /// Attaches names for the basis vectors, used only for display.
    pub fn with_basis_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.picard_rank() {
            return Err(Error::DimensionMismatch {
                class: "basis labels".into(),
                expected: self.picard_rank(),
                found: labels.len(),
            });
        }
        self.basis_labels = Some(labels);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn picard_rank(&self) -> usize {
        self.intersection_matrix.len()
    }

    pub fn intersection_matrix(&self) -> &[Vec<i64>] {
        &self.intersection_matrix
    }

    pub fn canonical_class(&self) -> &DivisorClass {
        &self.canonical_class
    }

    pub fn chi_structure_sheaf(&self) -> i64 {
        self.chi_structure_sheaf
    }

    pub fn generators(&self) -> &[DivisorClass] {
        &self.effective_cone_generators
    }

    pub fn basis_labels(&self) -> Option<&[String]> {
        self.basis_labels.as_deref()
    }

    /// Checks a class has the right number of coordinates for this lattice.
    pub fn check(&self, label: &str, class: &DivisorClass) -> Result<()> {
        check_len(label, class, self.picard_rank())
    }

    /// The intersection number `aᵀ M b`.
    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
        self.check("left operand", a)?;
        self.check("right operand", b)?;
        Ok(self.pair_unchecked(a, b))
    }

    pub fn self_intersection(&self, a: &DivisorClass) -> Result<Rational> {
        self.pair(a, a)
    }

    pub(crate) fn pair_unchecked(&self, a: &DivisorClass, b: &DivisorClass) -> Rational {
        let mut total = Rational::zero();
        for (i, row) in self.intersection_matrix.iter().enumerate() {
            if a.0[i].is_zero() {
                continue;
            }
            let mut inner = Rational::zero();
            for (j, &m) in row.iter().enumerate() {
                if m != 0 && !b.0[j].is_zero() {
                    inner += &b.0[j] * int(m);
                }
            }
            total += &a.0[i] * inner;
        }
        total
    }

    /// Human-readable form such as `3L - E1 - E2`, falling back to the
    /// coordinate tuple when the basis is unnamed.
    pub fn display(&self, class: &DivisorClass) -> String {
        let Some(labels) = &self.basis_labels else {
            return class.to_string();
        };
        let mut out = String::new();
        for (c, label) in class.0.iter().zip(labels) {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if !magnitude.is_one() {
                let text = format_rational(&magnitude);
                if magnitude.is_integer() {
                    out.push_str(&text);
                } else {
                    out.push_str(&format!("({text})"));
                }
            }
            out.push_str(label);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn check_len(label: &str, class: &DivisorClass, rank: usize) -> Result<()> {
    if class.len() != rank {
        return Err(Error::DimensionMismatch {
            class: label.to_string(),
            expected: rank,
            found: class.len(),
        });
    }
    Ok(())
}

/// Numbers of positive, negative and zero eigenvalues of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Inertia of a symmetric integer matrix, by congruence diagonalization over
/// the rationals (Sylvester's law of inertia).
pub fn signature(matrix: &[Vec<i64>]) -> Signature {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix
        .iter()
        .map(|row| row.iter().copied().map(int).collect())
        .collect();
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(p) = (k + 1..n).find(|&p| !a[p][p].is_zero()) {
                a.swap(k, p);
                for row in a.iter_mut() {
                    row.swap(k, p);
                }
            } else if let Some(p) = (k + 1..n).find(|&p| !a[k][p].is_zero()) {
                // Diagonal vanishes but a[k][p] does not: e_k + e_p has square 2·a[k][p].
                for j in 0..n {
                    let v = a[p][j].clone();
                    a[k][j] += v;
                }
                for i in 0..n {
                    let v = a[i][p].clone();
                    a[i][k] += v;
                }
            } else {
                sig.zero += 1;
                continue;
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_positive() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            // The trailing block after the row operation is the Schur
            // complement, which is symmetric, so the mirrored column
            // operation is not needed.
            for j in k..n {
                let v = &factor * &a[k][j];
                a[i][j] -= v;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rational::zero();
            a[i][k] = Rational::zero();
        }
    }
    sig
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

/// Outcome of [`validate_surface`]. Structural checks gate every
/// computation; the pipeline checks gate only the destabilizer search.
/// Negative self-intersection of generators is advisory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub surface: String,
    pub structural: Vec<Check>,
    pub pipeline: Vec<Check>,
    pub advisory: Vec<Check>,
}

impl ValidationReport {
    pub fn structural_ok(&self) -> bool {
        self.structural.iter().all(|c| c.passed)
    }

    pub fn pipeline_ok(&self) -> bool {
        self.structural_ok() && self.pipeline.iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.structural
            .iter()
            .chain(&self.pipeline)
            .chain(&self.advisory)
    }
}

pub const CHECK_SYMMETRIC: &str = "intersection matrix symmetric";
pub const CHECK_NONDEGENERATE: &str = "intersection matrix nondegenerate";
pub const CHECK_SIGNATURE: &str = "signature (1, rho-1)";
pub const CHECK_GENERATORS_NONZERO: &str = "generators nonzero";
pub const CHECK_RANK_AT_LEAST_3: &str = "Picard rank at least 3";
pub const CHECK_PAIRWISE_AT_MOST_1: &str = "pairwise generator intersections at most 1";
pub const CHECK_NEGATIVE_GENERATORS: &str = "generators have negative self-intersection";

pub fn validate_surface(surface: &SurfaceData) -> ValidationReport {
    let m = surface.intersection_matrix();
    let rank = surface.picard_rank();

    let asymmetric = (0..rank)
        .flat_map(|i| (i + 1..rank).map(move |j| (i, j)))
        .find(|&(i, j)| m[i][j] != m[j][i]);
    let symmetric = match asymmetric {
        None => Check::new(CHECK_SYMMETRIC, true, ""),
        Some((i, j)) => Check::new(
            CHECK_SYMMETRIC,
            false,
            format!(
                "entry ({},{}) = {} but ({},{}) = {}",
                i + 1,
                j + 1,
                m[i][j],
                j + 1,
                i + 1,
                m[j][i]
            ),
        ),
    };

    let mut structural = vec![symmetric.clone()];
    if symmetric.passed {
        let sig = signature(m);
        structural.push(Check::new(
            CHECK_NONDEGENERATE,
            sig.zero == 0,
            format!("{} zero eigenvalue(s)", sig.zero),
        ));
        structural.push(Check::new(
            CHECK_SIGNATURE,
            sig.positive == 1 && sig.negative + 1 == rank,
            format!("({}, {})", sig.positive, sig.negative),
        ));
    } else {
        structural.push(Check::new(CHECK_NONDEGENERATE, false, "skipped: not symmetric"));
        structural.push(Check::new(CHECK_SIGNATURE, false, "skipped: not symmetric"));
    }
    let zero_generators: Vec<String> = surface
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_zero())
        .map(|(i, _)| format!("C{}", i + 1))
        .collect();
    structural.push(Check::new(
        CHECK_GENERATORS_NONZERO,
        zero_generators.is_empty(),
        zero_generators.join(", "),
    ));

    let mut pipeline = vec![Check::new(
        CHECK_RANK_AT_LEAST_3,
        rank >= 3,
        format!("rho = {rank}"),
    )];
    let gens = surface.generators();
    let offending: Vec<String> = (0..gens.len())
        .flat_map(|i| (i + 1..gens.len()).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let v = surface.pair_unchecked(&gens[i], &gens[j]);
            (v > Rational::one()).then(|| format!("C{}.C{} = {}", i + 1, j + 1, format_rational(&v)))
        })
        .collect();
    pipeline.push(Check::new(
        CHECK_PAIRWISE_AT_MOST_1,
        offending.is_empty(),
        offending.join(", "),
    ));

    let nonnegative: Vec<String> = gens
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let v = surface.pair_unchecked(g, g);
            (!v.is_negative()).then(|| format!("C{}^2 = {}", i + 1, format_rational(&v)))
        })
        .collect();
    let advisory = vec![Check::new(
        CHECK_NEGATIVE_GENERATORS,
        nonnegative.is_empty(),
        nonnegative.join(", "),
    )];

    ValidationReport {
        surface: surface.name().to_string(),
        structural,
        pipeline,
        advisory,
    }
}

/// First pair of generators meeting with multiplicity above one, if any.
pub(crate) fn first_pairwise_violation(surface: &SurfaceData) -> Option<(usize, usize, Rational)> {
    let gens = surface.generators();
    (0..gens.len())
        .flat_map(|i| (i + 1..gens.len()).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, surface.pair_unchecked(&gens[i], &gens[j])))
        .find(|(_, _, v)| *v > Rational::one())
}
