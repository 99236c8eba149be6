//! Training strategies (placeholder while the engine stabilizes).
