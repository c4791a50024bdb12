//! The TOML surface document read by the CLI and used for the catalog.
//!
//! ```toml
//! name = "Bl2P2"
//! picard_rank = 3
//! basis = ["L", "E1", "E2"]
//! intersection_matrix = [[1, 0, 0], [0, -1, 0], [0, 0, -1]]
//! canonical_class = [-3, 1, 1]
//! chi_structure_sheaf = 1
//! effective_cone_generators = [[0, 1, 0], [0, 0, 1], [1, -1, -1]]
//!
//! [[bundles]]
//! name = "E"
//! rank = 2
//! c1 = [3, -1, -1]
//! c2 = 2
//! ```
//!
//! Rational entries are integers or `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::chern::BundleNumerics;
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceData};
use crate::rational::{Rational, RationalText};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDocument {
    pub name: String,
    pub picard_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    pub intersection_matrix: Vec<Vec<i64>>,
    pub canonical_class: Vec<RationalText>,
    pub chi_structure_sheaf: i64,
    pub effective_cone_generators: Vec<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bundles: Vec<BundleDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedFlags>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDocument {
    pub name: String,
    pub rank: u32,
    pub c1: Vec<RationalText>,
    pub c2: RationalText,
}

/// Facts about a catalog surface, re-derived and compared in tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFlags {
    pub structural: bool,
    pub picard_rank_at_least_3: bool,
    pub pairwise_at_most_1: bool,
    pub negative_generators: bool,
    /// A class known to be ample, used to generate ample test classes.
    pub reference_ample: Vec<RationalText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intersections: Vec<ExpectedIntersection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedIntersection {
    pub a: Vec<RationalText>,
    pub b: Vec<RationalText>,
    pub value: RationalText,
}

pub fn class_from_text(key: &str, coords: &[RationalText]) -> Result<DivisorClass> {
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.clone().into_rational().map_err(|e| Error::Parse {
                context: format!("{key}[{i}]"),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<Rational>>>()
        .map(DivisorClass::new)
}

pub fn class_to_text(class: &DivisorClass) -> Vec<RationalText> {
    class.coords().iter().map(RationalText::from_rational).collect()
}

fn rational_from_text(key: &str, value: &RationalText) -> Result<Rational> {
    value.clone().into_rational().map_err(|e| Error::Parse {
        context: key.to_string(),
        message: e.to_string(),
    })
}

impl SurfaceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            context: "surface document".into(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                context: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("documents always serialize")
    }

    /// Builds the surface, checking shapes but not geometry.
    pub fn surface(&self) -> Result<SurfaceData> {
        if self.intersection_matrix.len() != self.picard_rank {
            return Err(Error::DimensionMismatch {
                class: "intersection_matrix".into(),
                expected: self.picard_rank,
                found: self.intersection_matrix.len(),
            });
        }
        let canonical = class_from_text("canonical_class", &self.canonical_class)?;
        let generators = self
            .effective_cone_generators
            .iter()
            .enumerate()
            .map(|(i, g)| class_from_text(&format!("effective_cone_generators[{i}]"), g))
            .collect::<Result<Vec<_>>>()?;
        let surface = SurfaceData::new(
            self.name.clone(),
            self.intersection_matrix.clone(),
            canonical,
            self.chi_structure_sheaf,
            generators,
        )?;
        match &self.basis {
            Some(labels) => surface.with_basis_labels(labels.clone()),
            None => Ok(surface),
        }
    }

    pub fn bundles(&self) -> Result<Vec<(String, BundleNumerics)>> {
        self.bundles
            .iter()
            .map(|b| Ok((b.name.clone(), b.numerics(self.picard_rank)?)))
            .collect()
    }

    pub fn bundle(&self, name: &str) -> Result<BundleNumerics> {
        self.bundles
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| Error::UnknownBundle(name.to_string()))?
            .numerics(self.picard_rank)
    }

    pub fn from_surface(surface: &SurfaceData, bundles: &[(String, BundleNumerics)]) -> Self {
        SurfaceDocument {
            name: surface.name().to_string(),
            picard_rank: surface.picard_rank(),
            basis: surface.basis_labels().map(<[String]>::to_vec),
            intersection_matrix: surface.intersection_matrix().to_vec(),
            canonical_class: class_to_text(surface.canonical_class()),
            chi_structure_sheaf: surface.chi_structure_sheaf(),
            effective_cone_generators: surface.generators().iter().map(class_to_text).collect(),
            bundles: bundles
                .iter()
                .map(|(name, b)| BundleDocument {
                    name: name.clone(),
                    rank: b.rank,
                    c1: class_to_text(&b.c1),
                    c2: RationalText::from_rational(&b.c2),
                })
                .collect(),
            expected: None,
        }
    }
}

impl BundleDocument {
    pub fn numerics(&self, picard_rank: usize) -> Result<BundleNumerics> {
        let c1 = class_from_text(&format!("bundles.{}.c1", self.name), &self.c1)?;
        if c1.len() != picard_rank {
            return Err(Error::DimensionMismatch {
                class: format!("bundles.{}.c1", self.name),
                expected: picard_rank,
                found: c1.len(),
            });
        }
        let c2 = rational_from_text(&format!("bundles.{}.c2", self.name), &self.c2)?;
        let bundle = BundleNumerics {
            rank: self.rank,
            c1,
            c2,
        };
        bundle.validate(&self.name)?;
        Ok(bundle)
    }
}
