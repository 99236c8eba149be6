//! Evaluation metrics (placeholder while the engine stabilizes).
