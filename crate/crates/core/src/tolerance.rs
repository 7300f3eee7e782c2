use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the oracle, the formula engine and the reports.
///
/// All values are relative; each check states the scale it divides by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Single-product residuals: axioms, hypotheses accepted without warning.
    pub res: f64,
    /// Formula-versus-oracle comparisons.
    pub acc: f64,
    /// Jacobson-radical membership.
    pub rad: f64,
    /// Structural pattern of a context.
    pub pattern: f64,
    /// Hypothesis residuals at or above this are rejected outright.
    pub reject: f64,
    /// Singular-value threshold per unit of representation dimension.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            res: 1e-9,
            acc: 1e-8,
            rad: 1e-9,
            pattern: 1e-9,
            reject: 1e-4,
            rank: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn with_acc(mut self, acc: f64) -> Self {
        self.acc = acc;
        self
    }

    /// Relative rank threshold for a representation of size `rep_dim`.
    pub fn rank_threshold(&self, rep_dim: usize) -> f64 {
        self.rank * rep_dim.max(1) as f64
    }
}

/// `residual / max(1, scale)`, the relative measure used throughout.
pub fn relative(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}
