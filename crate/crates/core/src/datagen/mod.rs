//! Construction of controllably skewed benchmark datasets.
//!
//! A dataset here is a list of examples carrying a class label `y` and a
//! domain label `d`. Skew is controlled per class: a [`SkewSpec`] names each
//! class's majority domain and the exact fraction `rho` of its examples that
//! land there. Two dataset families are provided: CIFAR-10 with a grayscale
//! domain carved out of the color images ([`cifar`]), and a low-dimensional
//! synthetic analog ([`synthetic`]) where domain 1 is a fixed linear
//! information-reducing transform of domain 0.

mod augment;
pub mod cifar;
mod skb;
mod synthetic;
mod transform;

pub use augment::{augment, augment_with};
pub use cifar::{build_cifar10s, Cifar10sBundle};
pub use skb::{read_dataset, write_dataset, DATASET_MAGIC};
pub use synthetic::{build_synthetic, SyntheticBundle, SyntheticConfig};
pub use transform::{luma_gray, rank_projection, DomainTransform};

use thiserror::Error;

use crate::seeding::rng_from_seed;
use rand::seq::SliceRandom;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("ingestion error reading {file}: {source}")]
    Ingestion { file: String, source: std::io::Error },
    #[error("format error in {file}: {details}")]
    Format { file: String, details: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("feature shape: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("dataset io: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset file: {0}")]
    DatasetFormat(String),
}

/// One labelled example: features, target class `y`, domain `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: u32,
    pub features: Vec<f32>,
    pub y: u16,
    pub d: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
    /// A per-domain test copy; every example carries this domain label.
    TestDomain(u16),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub n_classes: u16,
    pub n_domains: u16,
    pub split: Split,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.examples.first().map(|e| e.features.len()).unwrap_or(0)
    }

    /// Count of examples per (class, domain) cell, row-major over classes.
    pub fn cell_counts(&self) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0usize; self.n_domains as usize]; self.n_classes as usize];
        for e in &self.examples {
            counts[e.y as usize][e.d as usize] += 1;
        }
        counts
    }

    /// Check the structural invariants: labels in range, finite features,
    /// consistent feature width, unique ids.
    pub fn validate(&self) -> Result<(), DatagenError> {
        let dim = self.feature_dim();
        let mut ids: Vec<u32> = Vec::with_capacity(self.examples.len());
        for e in &self.examples {
            if e.y >= self.n_classes {
                return Err(DatagenError::InvalidConfig(format!(
                    "example {} has class {} >= {}",
                    e.id, e.y, self.n_classes
                )));
            }
            if e.d >= self.n_domains {
                return Err(DatagenError::InvalidConfig(format!(
                    "example {} has domain {} >= {}",
                    e.id, e.d, self.n_domains
                )));
            }
            if e.features.len() != dim {
                return Err(DatagenError::Shape { expected: dim, got: e.features.len() });
            }
            if e.features.iter().any(|v| !v.is_finite()) {
                return Err(DatagenError::InvalidConfig(format!(
                    "example {} has non-finite features",
                    e.id
                )));
            }
            ids.push(e.id);
        }
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(DatagenError::InvalidConfig("duplicate example ids".into()));
        }
        Ok(())
    }
}

/// Per-class skew: the majority domain receives exactly `round(rho · n)` of
/// the class's examples.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SkewSpec {
    /// Majority-domain fraction per class, in [0.5, 1.0].
    pub rho: f64,
    /// Majority domain index per class.
    pub majority_domain: Vec<u16>,
}

impl SkewSpec {
    /// The canonical split: the first half of the classes are majority
    /// domain 0, the rest majority domain 1, so global domain totals balance.
    pub fn half_split(n_classes: u16, rho: f64) -> Self {
        let cut = (n_classes + 1) / 2;
        SkewSpec {
            rho,
            majority_domain: (0..n_classes).map(|c| u16::from(c >= cut)).collect(),
        }
    }

    pub fn validate(&self, n_classes: u16, n_domains: u16) -> Result<(), DatagenError> {
        if !(0.5..=1.0).contains(&self.rho) {
            return Err(DatagenError::InvalidConfig(format!("rho {} outside [0.5, 1.0]", self.rho)));
        }
        if self.majority_domain.len() != n_classes as usize {
            return Err(DatagenError::InvalidConfig(format!(
                "majority assignment covers {} classes, expected {}",
                self.majority_domain.len(),
                n_classes
            )));
        }
        if self.majority_domain.iter().any(|&d| d >= n_domains) {
            return Err(DatagenError::InvalidConfig("majority domain out of range".into()));
        }
        Ok(())
    }
}

/// Domain labels for the `n` examples of one class.
///
/// Exactly `round(rho · n)` examples keep the class's majority domain; the
/// minority members are drawn without replacement from a seeded permutation
/// of the class's indices. With more than two domains the minority is spread
/// round-robin over the others. Deterministic given the seed.
pub fn assign_domains(
    class: usize,
    n_per_class: usize,
    spec: &SkewSpec,
    n_domains: u16,
    seed: u64,
) -> Vec<u16> {
    let majority = spec.majority_domain[class];
    let n_major = (spec.rho * n_per_class as f64).round() as usize;
    let n_minor = n_per_class.saturating_sub(n_major);
    let mut labels = vec![majority; n_per_class];
    if n_minor == 0 || n_domains < 2 {
        return labels;
    }
    let others: Vec<u16> = (0..n_domains).filter(|&d| d != majority).collect();
    let mut order: Vec<usize> = (0..n_per_class).collect();
    order.shuffle(&mut rng_from_seed(seed));
    for (k, &idx) in order.iter().take(n_minor).enumerate() {
        labels[idx] = others[k % others.len()];
    }
    labels
}
