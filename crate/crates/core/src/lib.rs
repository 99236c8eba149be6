//! Benchmark engine for studying class–domain correlation bias in classifiers.
//!
//! The crate is organized around the lifecycle of a bias-mitigation experiment:
//!
//! - [`datagen`] builds controllably skewed datasets, either from the CIFAR-10
//!   binary batches (color vs. grayscale domains) or as a synthetic
//!   low-dimensional stand-in with a seeded class–domain joint distribution.
//! - [`nncore`] is a small dense-network engine with hand-rolled
//!   backpropagation, SGD with momentum/weight decay, and a finite-difference
//!   gradient checker. Networks are a shared trunk with named heads.
//! - [`strategies`] wires the training strategies (baseline, oversampling,
//!   class-balanced loss, two adversarial variants, domain-discriminative and
//!   domain-independent heads) onto the engine.
//! - [`inference`] holds everything applied at test time: prior shift,
//!   the per-layout decision rules, and the corpus-level constrained solver
//!   with its brute-force oracle.
//! - [`metrics`] scores predictions: mean per-class per-domain accuracy, bias
//!   amplification (single- and multi-label), weighted mAP, F-score
//!   thresholds, dataset skew, and a linear domain-leakage probe.
//!
//! Everything is seeded and deterministic: the same inputs and seed produce
//! bit-identical datasets, parameters, scores, and metric values.

pub mod datagen;
pub mod inference;
pub mod mat;
pub mod metrics;
pub mod nncore;
pub mod seeding;
pub mod strategies;
