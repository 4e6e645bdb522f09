//! Process-wide numerical tolerances.

use std::sync::RwLock;

/// Default cap on total Hilbert-space dimension, overridable through
/// `WAYLAB_MAX_DIM`.
pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Used when checking invariants of inputs (self-adjointness, unitarity,
    /// POVM positivity and normalisation).
    pub validation: f64,
    /// Used for objects this crate constructs itself (state norms, traces).
    pub construction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validation: 1e-10,
            construction: 1e-12,
        }
    }
}

static GLOBAL: RwLock<Tolerances> = RwLock::new(Tolerances {
    validation: 1e-10,
    construction: 1e-12,
});

pub fn get() -> Tolerances {
    *GLOBAL.read().unwrap_or_else(|e| e.into_inner())
}

pub fn set(t: Tolerances) {
    *GLOBAL.write().unwrap_or_else(|e| e.into_inner()) = t;
}

pub fn validation() -> f64 {
    get().validation
}

pub fn construction() -> f64 {
    get().construction
}

/// Maximum total Hilbert dimension, read from `WAYLAB_MAX_DIM`.
pub fn max_dim() -> usize {
    std::env::var("WAYLAB_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&d: &usize| d > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}
