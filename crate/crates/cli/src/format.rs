//! Human-readable rendering: six significant digits, `%g` style.

use std::fmt::Write as _;

use pdrazin_core::{Complex64, ComplexMatrix, VerificationReport};

const DIGITS: i32 = 6;

/// `x` to six significant digits, trailing zeros dropped.
pub fn g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => g(z.re),
        (true, false) => format!("{}i", g(z.im)),
        _ if z.im < 0.0 => format!("{}-{}i", g(z.re), g(-z.im)),
        _ => format!("{}+{}i", g(z.re), g(z.im)),
    }
}

/// Right-aligned columns, one row per line, indented by `indent`.
pub fn matrix(m: &ComplexMatrix, indent: &str) -> String {
    let cells: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex(m[(i, j)])).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        out.push_str(indent);
        out.push('[');
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&padded.join("  "));
        out.push_str("]\n");
    }
    out
}

fn section<V>(out: &mut String, title: &str, entries: impl IntoIterator<Item = (String, V)>)
where
    V: std::fmt::Display,
{
    let entries: Vec<_> = entries.into_iter().collect();
    if entries.is_empty() {
        return;
    }
    let _ = writeln!(out, "{title}");
    let width = entries
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in entries {
        let pad = width - k.chars().count();
        let _ = writeln!(out, "  {k}{}  {v}", " ".repeat(pad));
    }
}

pub fn report(r: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "identity: {}", r.identity);
    let _ = writeln!(out, "result:   {}", if r.pass { "PASS" } else { "FAIL" });
    let _ = writeln!(out, "formula residual (max): {}", g(r.formula_residual));
    let tol = |key: &str| {
        r.tolerances_used
            .get(key)
            .map(|t| g(*t))
            .unwrap_or_default()
    };
    section(
        &mut out,
        &format!("hypotheses (reject at {})", tol("hypothesis")),
        r.hypothesis_residuals
            .iter()
            .map(|(k, v)| (k.clone(), g(*v))),
    );
    section(
        &mut out,
        &format!("formula residuals (tol {})", tol("formula")),
        r.formula_residuals.iter().map(|(k, v)| (k.clone(), g(*v))),
    );
    section(
        &mut out,
        "axiom residuals",
        r.axiom_residuals.iter().map(|(k, v)| {
            let t = r.tolerances_used.get(&format!("axiom.{k}")).copied();
            (
                k.clone(),
                format!("{}  (tol {})", g(*v), t.map(g).unwrap_or_default()),
            )
        }),
    );
    section(
        &mut out,
        &format!("series terms (max {})", tol("series.max_terms")),
        r.series_terms
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string())),
    );
    section(
        &mut out,
        "claims",
        r.claims.iter().map(|(k, v)| (k.clone(), v.to_string())),
    );
    section(
        &mut out,
        "informational",
        r.informational.iter().map(|(k, v)| (k.clone(), g(*v))),
    );
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
