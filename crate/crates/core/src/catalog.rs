//! Built-in surfaces and sample bundles.
//!
//! The entries are the TOML files under `catalog/`, embedded at compile
//! time, in the same format the CLI reads.

use std::path::Path;

use crate::chern::BundleNumerics;
use crate::document::{class_from_text, ExpectedFlags, SurfaceDocument};
use crate::error::{Error, Result};
use crate::lattice::{validate_surface, DivisorClass, SurfaceData};

pub const EMBEDDED: &[(&str, &str)] = &[
    ("bl2p2.toml", include_str!("../catalog/bl2p2.toml")),
    ("bl3p2.toml", include_str!("../catalog/bl3p2.toml")),
    ("p2.toml", include_str!("../catalog/p2.toml")),
    ("quadric.toml", include_str!("../catalog/quadric.toml")),
    ("pairwise_two.toml", include_str!("../catalog/pairwise_two.toml")),
];

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub file: String,
    pub document: SurfaceDocument,
    pub surface: SurfaceData,
    pub sample_bundles: Vec<(String, BundleNumerics)>,
    pub expected: ExpectedFlags,
}

impl CatalogEntry {
    pub fn reference_ample(&self) -> Result<DivisorClass> {
        class_from_text("expected.reference_ample", &self.expected.reference_ample)
    }

    pub fn bundle(&self, name: &str) -> Option<&BundleNumerics> {
        self.sample_bundles
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
    }

    fn from_document(file: &str, document: SurfaceDocument) -> Result<Self> {
        let surface = document.surface()?;
        let report = validate_surface(&surface);
        if let Some(failed) = report.structural.iter().find(|c| !c.passed) {
            return Err(Error::Parse {
                context: file.to_string(),
                message: format!("catalog surface fails {}: {}", failed.name, failed.detail),
            });
        }
        let expected = document.expected.clone().ok_or_else(|| Error::Parse {
            context: file.to_string(),
            message: "catalog entries need an [expected] table".into(),
        })?;
        Ok(CatalogEntry {
            file: file.to_string(),
            sample_bundles: document.bundles()?,
            document,
            surface,
            expected,
        })
    }
}

/// The embedded catalog, in a fixed order.
pub fn load_catalog() -> Result<Vec<CatalogEntry>> {
    EMBEDDED
        .iter()
        .map(|(file, text)| {
            let doc = SurfaceDocument::parse(text).map_err(|e| relabel(e, file))?;
            CatalogEntry::from_document(file, doc)
        })
        .collect()
}

/// Every `*.toml` in `dir`, sorted by file name.
pub fn load_catalog_dir(dir: &Path) -> Result<Vec<CatalogEntry>> {
    let io = |source| Error::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let doc = SurfaceDocument::read(p)?;
            let file = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            CatalogEntry::from_document(&file, doc)
        })
        .collect()
}

fn relabel(e: Error, file: &str) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse {
            context: file.to_string(),
            message,
        },
        other => other,
    }
}
