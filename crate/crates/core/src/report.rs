use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Residuals of one identity check, each paired with the tolerance it was
/// judged against, so that pass/fail can be re-derived offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub hypothesis_residuals: BTreeMap<String, f64>,
    /// Largest entry of `formula_residuals` (0 when there are none).
    pub formula_residual: f64,
    pub formula_residuals: BTreeMap<String, f64>,
    pub axiom_residuals: BTreeMap<String, f64>,
    pub series_terms: BTreeMap<String, usize>,
    /// Boolean claims (for example an "only if" direction).
    pub claims: BTreeMap<String, bool>,
    /// Values recorded for documentation; they never affect `pass`.
    pub informational: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub tolerances_used: BTreeMap<String, f64>,
    pub pass: bool,
}

pub const HYPOTHESIS_KEY: &str = "hypothesis";
pub const FORMULA_KEY: &str = "formula";
pub const SERIES_KEY: &str = "series.max_terms";

impl VerificationReport {
    pub fn new(identity: impl Into<String>) -> Self {
        Self {
            identity: identity.into(),
            hypothesis_residuals: BTreeMap::new(),
            formula_residual: 0.0,
            formula_residuals: BTreeMap::new(),
            axiom_residuals: BTreeMap::new(),
            series_terms: BTreeMap::new(),
            claims: BTreeMap::new(),
            informational: BTreeMap::new(),
            warnings: Vec::new(),
            tolerances_used: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn hypothesis(&mut self, name: impl Into<String>, residual: f64, reject: f64) -> &mut Self {
        self.hypothesis_residuals.insert(name.into(), residual);
        self.tolerances_used.insert(HYPOTHESIS_KEY.into(), reject);
        self
    }

    pub fn formula(&mut self, name: impl Into<String>, residual: f64, tol: f64) -> &mut Self {
        self.formula_residuals.insert(name.into(), residual);
        self.tolerances_used.insert(FORMULA_KEY.into(), tol);
        self
    }

    pub fn axiom(&mut self, name: impl Into<String>, residual: f64, tol: f64) -> &mut Self {
        let name = name.into();
        self.tolerances_used.insert(format!("axiom.{name}"), tol);
        self.axiom_residuals.insert(name, residual);
        self
    }

    pub fn series(&mut self, name: impl Into<String>, terms: usize, max_terms: usize) -> &mut Self {
        self.series_terms.insert(name.into(), terms);
        self.tolerances_used
            .insert(SERIES_KEY.into(), max_terms as f64);
        self
    }

    pub fn claim(&mut self, name: impl Into<String>, holds: bool) -> &mut Self {
        self.claims.insert(name.into(), holds);
        self
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.informational.insert(name.into(), value);
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    /// Copies every entry of `other`, prefixing names with `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: &VerificationReport) -> &mut Self {
        let key = |k: &String| format!("{prefix}.{k}");
        for (k, v) in &other.hypothesis_residuals {
            self.hypothesis_residuals.insert(key(k), *v);
        }
        for (k, v) in &other.formula_residuals {
            self.formula_residuals.insert(key(k), *v);
        }
        for (k, v) in &other.axiom_residuals {
            self.axiom_residuals.insert(key(k), *v);
            if let Some(t) = other.tolerances_used.get(&format!("axiom.{k}")) {
                self.tolerances_used.insert(format!("axiom.{}", key(k)), *t);
            }
        }
        for (k, v) in &other.series_terms {
            self.series_terms.insert(key(k), *v);
        }
        for (k, v) in &other.claims {
            self.claims.insert(key(k), *v);
        }
        for (k, v) in &other.informational {
            self.informational.insert(key(k), *v);
        }
        for (k, v) in &other.tolerances_used {
            if !k.starts_with("axiom.") {
                self.tolerances_used.entry(k.clone()).or_insert(*v);
            }
        }
        self.warnings
            .extend(other.warnings.iter().map(|w| format!("{prefix}: {w}")));
        self
    }

    /// Recomputes `formula_residual` and `pass` from the recorded entries.
    pub fn finalize(&mut self) -> &mut Self {
        self.formula_residual = self.formula_residuals.values().copied().fold(0.0, f64::max);
        if self.formula_residuals.values().any(|v| v.is_nan()) {
            self.formula_residual = f64::NAN;
        }
        self.pass = self.recompute_pass();
        self
    }

    pub fn finished(mut self) -> Self {
        self.finalize();
        self
    }

    /// Pass/fail re-derived from residuals and `tolerances_used` alone.
    pub fn recompute_pass(&self) -> bool {
        let within = |v: f64, t: Option<&f64>| t.is_some_and(|t| v <= *t);
        let hyp = self.tolerances_used.get(HYPOTHESIS_KEY);
        let formula = self.tolerances_used.get(FORMULA_KEY);
        let series = self.tolerances_used.get(SERIES_KEY);
        self.hypothesis_residuals
            .values()
            .all(|&v| within(v, hyp) && v < *hyp.unwrap_or(&0.0))
            && self.formula_residuals.values().all(|&v| within(v, formula))
            && self
                .axiom_residuals
                .iter()
                .all(|(k, &v)| within(v, self.tolerances_used.get(&format!("axiom.{k}"))))
            && self
                .series_terms
                .values()
                .all(|&n| within(n as f64, series))
            && self.claims.values().all(|&c| c)
    }
}
