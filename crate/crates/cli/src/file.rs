//! JSON instance files.
//!
//! ```json
//! {
//!   "context": {"kind": "FullMatrix", "dim": 2},
//!   "elements": {"a": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]},
//!   "lambda": [2.0, 0.0],
//!   "policy": {"max_terms": 3},
//!   "tolerances": {"acc": 1e-8}
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use pdrazin_core::{
    AlgebraContext, AlgebraElement, Complex64, ComplexMatrix, ContextKind, Instance, SeriesPolicy,
    Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `[re, im]`.
pub type Scalar = [f64; 2];

/// Row-major rows of `[re, im]` entries.
pub type MatrixRows = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub kind: String,
    /// Matrix size or truncation order; the representation size for a direct sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summands: Vec<ContextSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub res: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reject: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub context: ContextSpec,
    pub elements: BTreeMap<String, MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl ContextSpec {
    pub fn to_context(&self) -> Result<AlgebraContext, CliError> {
        let kind: ContextKind = self.kind.parse().map_err(CliError::input)?;
        let ctx = match kind {
            ContextKind::DirectSum => {
                let parts = self
                    .summands
                    .iter()
                    .map(ContextSpec::to_context)
                    .collect::<Result<Vec<_>, _>>()?;
                let ctx = AlgebraContext::direct_sum(parts).map_err(CliError::input)?;
                if let Some(d) = self.dim {
                    if d != ctx.rep_dim() {
                        return Err(CliError::Input(format!(
                            "direct sum dim {d} does not match summand sizes ({})",
                            ctx.rep_dim()
                        )));
                    }
                }
                ctx
            }
            _ => {
                if !self.summands.is_empty() {
                    return Err(CliError::Input(format!("{} takes no summands", self.kind)));
                }
                let dim = self
                    .dim
                    .ok_or_else(|| CliError::Input(format!("context {} needs dim", self.kind)))?;
                match kind {
                    ContextKind::FullMatrix => AlgebraContext::full(dim),
                    ContextKind::UpperTriangular => AlgebraContext::upper(dim),
                    _ => AlgebraContext::polynomial(dim),
                }
                .map_err(CliError::input)?
            }
        };
        Ok(ctx)
    }

    pub fn from_context(ctx: &AlgebraContext) -> Self {
        let summands = match ctx {
            AlgebraContext::DirectSum(s) => s.iter().map(ContextSpec::from_context).collect(),
            _ => Vec::new(),
        };
        Self {
            kind: ctx.kind().as_str().into(),
            dim: Some(ctx.rep_dim()),
            summands,
        }
    }
}

impl PolicyOverrides {
    fn apply(&self, mut p: SeriesPolicy) -> SeriesPolicy {
        if let Some(v) = self.max_terms {
            p.max_terms = v;
        }
        if let Some(v) = self.term_tol {
            p.term_tol = v;
        }
        p
    }

    pub fn full(p: &SeriesPolicy) -> Self {
        Self {
            max_terms: Some(p.max_terms),
            term_tol: Some(p.term_tol),
        }
    }
}

impl ToleranceOverrides {
    fn apply(&self, mut t: Tolerances) -> Tolerances {
        let fields = [
            (self.res, &mut t.res),
            (self.acc, &mut t.acc),
            (self.rad, &mut t.rad),
            (self.pattern, &mut t.pattern),
            (self.reject, &mut t.reject),
            (self.rank, &mut t.rank),
        ];
        for (v, slot) in fields {
            if let Some(v) = v {
                *slot = v;
            }
        }
        t
    }

    pub fn full(t: &Tolerances) -> Self {
        Self {
            res: Some(t.res),
            acc: Some(t.acc),
            rad: Some(t.rad),
            pattern: Some(t.pattern),
            reject: Some(t.reject),
            rank: Some(t.rank),
        }
    }
}

fn check_tolerances(t: &Tolerances) -> Result<(), CliError> {
    let all = [t.res, t.acc, t.rad, t.pattern, t.reject, t.rank];
    if all.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "tolerances must be positive and finite: {t:?}"
        )))
    }
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input(
            "matrix must be square and non-empty".into(),
        ));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

pub fn rows_from_matrix(m: &ComplexMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

impl InstanceFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("malformed instance {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("instance files always serialise");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }

    /// Builds the instance; `base` holds the tolerances before file overrides.
    pub fn to_instance(&self, base: Tolerances) -> Result<Instance, CliError> {
        let ctx = self.context.to_context()?;
        let mut inst = Instance::new(ctx);
        if let Some(t) = &self.tolerances {
            inst.tolerances = t.apply(base);
        } else {
            inst.tolerances = base;
        }
        check_tolerances(&inst.tolerances)?;
        if let Some(p) = &self.policy {
            inst.policy = p.apply(inst.policy).validated().map_err(CliError::input)?;
        }
        if let Some([re, im]) = self.lambda {
            let l = Complex64::new(re, im);
            if !l.is_finite() || l == Complex64::new(0.0, 0.0) {
                return Err(CliError::Input(format!(
                    "lambda must be finite and nonzero, got {l}"
                )));
            }
            inst.lambda = Some(l);
        }
        let ctx = Arc::clone(&inst.context);
        for (name, rows) in &self.elements {
            let m = matrix_from_rows(rows)?;
            let x = AlgebraElement::with_tolerance(Arc::clone(&ctx), m, inst.tolerances.pattern)
                .map_err(|e| CliError::Input(format!("element '{name}': {e}")))?;
            inst.elements.insert(name.clone(), x);
        }
        Ok(inst)
    }

    /// Serialises `inst`; with `settings`, its policy and tolerances are
    /// spelled out in full so the file replays independently of the environment.
    pub fn from_instance(inst: &Instance, settings: bool) -> Self {
        Self {
            context: ContextSpec::from_context(&inst.context),
            elements: inst
                .elements
                .iter()
                .map(|(k, v)| (k.clone(), rows_from_matrix(v.matrix())))
                .collect(),
            lambda: inst.lambda.map(|l| [l.re, l.im]),
            policy: settings.then(|| PolicyOverrides::full(&inst.policy)),
            tolerances: settings.then(|| ToleranceOverrides::full(&inst.tolerances)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_sum_context_round_trips() {
        let json = r#"{"kind": "DirectSum", "summands": [
            {"kind": "FullMatrix", "dim": 2}, {"kind": "TruncatedPolynomial", "dim": 3}]}"#;
        let spec: ContextSpec = serde_json::from_str(json).unwrap();
        let ctx = spec.to_context().unwrap();
        assert_eq!(ctx.rep_dim(), 5);
        assert_eq!(ContextSpec::from_context(&ctx).to_context().unwrap(), ctx);
    }

    #[test]
    fn bad_inputs_are_input_errors() {
        let no_dim: ContextSpec = serde_json::from_str(r#"{"kind": "FullMatrix"}"#).unwrap();
        assert!(matches!(no_dim.to_context(), Err(CliError::Input(_))));
        let ragged = vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]];
        assert!(matrix_from_rows(&ragged).is_err());
        assert!(serde_json::from_str::<InstanceFile>(r#"{"context": 1}"#).is_err());
    }

    #[test]
    fn pattern_violation_is_rejected() {
        let json = r#"{"context": {"kind": "UpperTriangular", "dim": 2},
            "elements": {"a": [[[1,0],[0,0]],[[1,0],[1,0]]]}}"#;
        let f: InstanceFile = serde_json::from_str(json).unwrap();
        assert!(f.to_instance(Tolerances::default()).is_err());
    }

    #[test]
    fn file_tolerances_override_the_base() {
        let json = r#"{"context": {"kind": "FullMatrix", "dim": 1},
            "elements": {"a": [[[2,0]]]}, "tolerances": {"acc": 1e-3}}"#;
        let f: InstanceFile = serde_json::from_str(json).unwrap();
        let inst = f.to_instance(Tolerances::default().with_acc(1e-5)).unwrap();
        assert_eq!(inst.tolerances.acc, 1e-3);
        assert_eq!(inst.tolerances.res, 1e-9);
    }
}
