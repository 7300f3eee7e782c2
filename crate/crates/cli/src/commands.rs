use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pdrazin_core::generators::{achievable_indices, gen_with_index, RandomSpec};
use pdrazin_core::{
    check_pdrazin_axioms, generate, is_quasinilpotent, pdrazin, verify, AlgebraContext, Complex64,
    ContextKind, Identity, Instance, Tolerances, VerificationReport,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::file::{rows_from_matrix, ContextSpec, InstanceFile, MatrixRows, ToleranceOverrides};
use crate::format;
use crate::{core_exit, CliError, Exit, Outcome};

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialise") + "\n"
}

fn run(f: impl FnOnce() -> Result<Outcome, CliError>) -> Outcome {
    f().unwrap_or_else(|e| Outcome::from_error(&e))
}

// ---------------------------------------------------------------------------
// compute

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub element: String,
    pub context: ContextSpec,
    pub drazin_index: usize,
    pub radical_index: usize,
    pub inverse: MatrixRows,
    pub spectral_idempotent: MatrixRows,
    /// Whether `a a^Π` is quasinilpotent.
    pub nilpotent_part_quasinilpotent: bool,
    /// `||(a a^Π)^n||^(1/n)` for `n = 1..rep_dim`.
    pub nilpotent_part_root_norms: Vec<f64>,
    pub axiom_residuals: BTreeMap<String, f64>,
    pub tolerances_used: BTreeMap<String, f64>,
    pub pass: bool,
}

pub fn compute(path: &Path, name: &str, as_json: bool, base: Tolerances) -> Outcome {
    run(|| {
        let inst = InstanceFile::read(path)?.to_instance(base)?;
        let a = inst.element(name).map_err(CliError::input)?;
        let tol = &inst.tolerances;
        let r = pdrazin(a, tol)?;
        let axioms = check_pdrazin_axioms(a, &r.inverse, r.radical_index, tol);
        let nil = is_quasinilpotent(&(a * &r.spectral_idempotent), tol);
        let report = ComputeReport {
            element: name.into(),
            context: ContextSpec::from_context(&inst.context),
            drazin_index: r.drazin_index,
            radical_index: r.radical_index,
            inverse: rows_from_matrix(r.inverse.matrix()),
            spectral_idempotent: rows_from_matrix(r.spectral_idempotent.matrix()),
            nilpotent_part_quasinilpotent: nil.quasinilpotent,
            nilpotent_part_root_norms: nil.root_norms.clone(),
            axiom_residuals: axioms.axiom_residuals.clone(),
            tolerances_used: axioms.tolerances_used.clone(),
            pass: axioms.pass,
        };
        let exit = if report.pass {
            Exit::Pass
        } else {
            Exit::Breakdown
        };
        if as_json {
            return Ok(Outcome::new(json(&report), exit));
        }
        let mut out = String::new();
        let _ = writeln!(out, "element:       {name} in {}", inst.context);
        let _ = writeln!(out, "drazin index:  {}", r.drazin_index);
        let _ = writeln!(out, "radical index: {}", r.radical_index);
        let _ = writeln!(out, "inverse:");
        out.push_str(&format::matrix(r.inverse.matrix(), "  "));
        let _ = writeln!(out, "spectral idempotent 1 - aa^‡:");
        out.push_str(&format::matrix(r.spectral_idempotent.matrix(), "  "));
        let norms: Vec<String> = nil.root_norms.iter().map(|v| format::g(*v)).collect();
        let _ = writeln!(
            out,
            "a(1 - aa^‡) quasinilpotent: {} (||x^n||^(1/n): {})",
            nil.quasinilpotent,
            norms.join(", ")
        );
        let _ = writeln!(out, "axiom residuals:");
        for (k, v) in &axioms.axiom_residuals {
            let _ = writeln!(out, "  {k}: {}", format::g(*v));
        }
        Ok(Outcome::new(out, exit))
    })
}

// ---------------------------------------------------------------------------
// verify

fn verify_instance(identity: Identity, inst: &Instance) -> Result<VerificationReport, CliError> {
    Ok(verify(identity, inst)?)
}

fn report_outcome(report: &VerificationReport, as_json: bool) -> Outcome {
    let exit = if report.pass {
        Exit::Pass
    } else {
        Exit::IdentityFailure
    };
    let text = if as_json {
        json(report)
    } else {
        format::report(report)
    };
    Outcome::new(text, exit)
}

pub fn verify_file(path: &Path, identity: &str, as_json: bool, base: Tolerances) -> Outcome {
    run(|| {
        let identity: Identity = identity.parse().map_err(CliError::input)?;
        let inst = InstanceFile::read(path)?.to_instance(base)?;
        if identity.needs_lambda() && inst.lambda.is_none() {
            return Err(CliError::Input(format!(
                "{identity} needs lambda in the instance file"
            )));
        }
        let report = verify_instance(identity, &inst)?;
        Ok(report_outcome(&report, as_json))
    })
}

// ---------------------------------------------------------------------------
// fuzz

#[derive(Debug, Clone)]
pub struct FuzzArgs {
    pub identity: String,
    pub count: usize,
    pub seed: u64,
    pub dims: (usize, usize),
    pub context: ContextKind,
    pub lambda: Option<Complex64>,
    /// Directory for counterexample files; created on first use.
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzRecord {
    pub ordinal: usize,
    pub seed: u64,
    pub dim: usize,
    pub target_index: usize,
    /// `pass`, `fail`, `hypothesis`, `breakdown` or `input`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    /// Full report of a failing instance, as `verify` reproduces it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub identity: String,
    pub context: String,
    pub dims: [usize; 2],
    pub seed: u64,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    pub tolerances: ToleranceOverrides,
    pub passed: usize,
    pub failed: usize,
    pub hypothesis_rejections: usize,
    pub breakdowns: usize,
    pub input_errors: usize,
    pub max_formula_residual: f64,
    pub median_formula_residual: f64,
    pub pass: bool,
    pub instances: Vec<FuzzRecord>,
}

/// Seed of the `ordinal`-th instance of a run seeded with `seed`.
pub fn instance_seed(seed: u64, ordinal: u64) -> u64 {
    splitmix64(seed ^ splitmix64(ordinal.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Trial {
    record: FuzzRecord,
    instance: Option<Instance>,
}

fn trial(identity: Identity, args: &FuzzArgs, tol: Tolerances, ordinal: usize) -> Trial {
    let seed = instance_seed(args.seed, ordinal as u64);
    let (lo, hi) = args.dims;
    let dim = lo + (seed % (hi - lo + 1) as u64) as usize;
    let target_index = ((seed >> 32) % (dim as u64 + 1)) as usize;
    let mut record = FuzzRecord {
        ordinal,
        seed,
        dim,
        target_index,
        outcome: "pass".into(),
        formula_residual: None,
        error: None,
        counterexample: None,
        report: None,
    };
    let instance = AlgebraContext::of_kind(args.context, dim).and_then(|ctx| {
        let mut spec = RandomSpec::new(seed, ctx).with_index(target_index);
        if let Some(l) = args.lambda {
            spec = spec.with_lambda(l);
        }
        let mut inst = generate(identity, &spec)?;
        inst.tolerances = tol;
        Ok(inst)
    });
    let instance = match instance {
        Ok(inst) => inst,
        Err(e) => {
            record.outcome = outcome_name(core_exit(&e)).into();
            record.error = Some(format!("generation: {e}"));
            return Trial {
                record,
                instance: None,
            };
        }
    };
    match verify(identity, &instance) {
        Ok(report) => {
            record.formula_residual = Some(report.formula_residual);
            if !report.pass {
                record.outcome = "fail".into();
                record.report = Some(report);
            }
        }
        Err(e) => {
            record.outcome = outcome_name(core_exit(&e)).into();
            record.error = Some(e.to_string());
        }
    }
    Trial {
        record,
        instance: Some(instance),
    }
}

fn outcome_name(exit: Exit) -> &'static str {
    match exit {
        Exit::Pass => "pass",
        Exit::IdentityFailure => "fail",
        Exit::Input => "input",
        Exit::Breakdown => "breakdown",
        Exit::Hypothesis => "hypothesis",
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn check_fuzz_args(identity: Identity, args: &FuzzArgs) -> Result<(), CliError> {
    let (lo, hi) = args.dims;
    if args.count == 0 {
        return Err(CliError::Input("--count must be at least 1".into()));
    }
    let min_dim = if args.context == ContextKind::DirectSum {
        2
    } else {
        1
    };
    if lo < min_dim || lo > hi {
        return Err(CliError::Input(format!(
            "--dims {lo}..{hi} is not a valid range for {} (smallest size {min_dim})",
            args.context.as_str()
        )));
    }
    if identity.needs_lambda() && args.lambda.is_none() {
        return Err(CliError::Input(format!("{identity} needs --lambda")));
    }
    if let Some(l) = args.lambda {
        if !l.is_finite() || l == Complex64::new(0.0, 0.0) {
            return Err(CliError::Input(format!(
                "--lambda must be finite and nonzero, got {l}"
            )));
        }
    }
    Ok(())
}

pub fn fuzz(args: &FuzzArgs, as_json: bool, base: Tolerances) -> Outcome {
    run(|| {
        let identity: Identity = args.identity.parse().map_err(CliError::input)?;
        check_fuzz_args(identity, args)?;
        let trials: Vec<Trial> = (0..args.count)
            .into_par_iter()
            .map(|i| trial(identity, args, base, i))
            .collect();

        let mut records = Vec::with_capacity(trials.len());
        for t in trials {
            let mut record = t.record;
            if record.outcome != "pass" {
                if let Some(inst) = &t.instance {
                    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
                        CliError::Input(format!("cannot create {}: {e}", args.out_dir.display()))
                    })?;
                    let path = args.out_dir.join(format!(
                        "{}-seed{}-{}.json",
                        identity.tag(),
                        args.seed,
                        record.ordinal
                    ));
                    InstanceFile::from_instance(inst, true).write(&path)?;
                    record.counterexample = Some(path.display().to_string());
                }
            }
            records.push(record);
        }

        let count = |name: &str| records.iter().filter(|r| r.outcome == name).count();
        let residuals: Vec<f64> = records.iter().filter_map(|r| r.formula_residual).collect();
        let summary = FuzzSummary {
            identity: identity.tag(),
            context: args.context.as_str().into(),
            dims: [args.dims.0, args.dims.1],
            seed: args.seed,
            count: args.count,
            lambda: args.lambda.map(|l| [l.re, l.im]),
            tolerances: ToleranceOverrides::full(&base),
            passed: count("pass"),
            failed: count("fail"),
            hypothesis_rejections: count("hypothesis"),
            breakdowns: count("breakdown"),
            input_errors: count("input"),
            max_formula_residual: residuals.iter().copied().fold(0.0, f64::max),
            median_formula_residual: median(residuals),
            pass: count("pass") == records.len(),
            instances: records,
        };
        let exit = if summary.pass {
            Exit::Pass
        } else if summary.failed > 0 {
            Exit::IdentityFailure
        } else if summary.breakdowns > 0 {
            Exit::Breakdown
        } else if summary.hypothesis_rejections > 0 {
            Exit::Hypothesis
        } else {
            Exit::Input
        };
        let text = if as_json {
            json(&summary)
        } else {
            render_fuzz(&summary)
        };
        Ok(Outcome::new(text, exit))
    })
}

fn render_fuzz(s: &FuzzSummary) -> String {
    let mut out = String::new();
    let lambda = s
        .lambda
        .map(|[re, im]| format!(", lambda {}", format::complex(Complex64::new(re, im))))
        .unwrap_or_default();
    let _ = writeln!(
        out,
        "fuzz {} on {} dims {}..{}, seed {}, {} instances{lambda}",
        s.identity, s.context, s.dims[0], s.dims[1], s.seed, s.count
    );
    let _ = writeln!(
        out,
        "passed {}  failed {}  hypothesis {}  breakdown {}  input {}",
        s.passed, s.failed, s.hypothesis_rejections, s.breakdowns, s.input_errors
    );
    let _ = writeln!(
        out,
        "formula residual: max {}  median {}  (tol {})",
        format::g(s.max_formula_residual),
        format::g(s.median_formula_residual),
        format::g(s.tolerances.acc.unwrap_or(f64::NAN))
    );
    for r in s.instances.iter().filter(|r| r.outcome != "pass") {
        let _ = write!(
            out,
            "  #{} seed {} dim {}: {}",
            r.ordinal, r.seed, r.dim, r.outcome
        );
        if let Some(e) = &r.error {
            let _ = write!(out, " ({e})");
        }
        if let Some(p) = &r.counterexample {
            let _ = write!(out, " -> {p}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "result: {}", if s.pass { "PASS" } else { "FAIL" });
    out
}

// ---------------------------------------------------------------------------
// gen

#[derive(Debug, Clone)]
pub struct GenArgs {
    /// `index`, `commuting`, `orthogonal`, `family`, `radical`, `lambda`, or an identity tag.
    pub kind: String,
    pub context: ContextKind,
    pub dim: usize,
    pub seed: u64,
    pub target: Option<usize>,
    pub lambda: Option<Complex64>,
    pub out: PathBuf,
}

fn instance_for_kind(args: &GenArgs) -> Result<Instance, CliError> {
    let ctx = AlgebraContext::of_kind(args.context, args.dim).map_err(CliError::input)?;
    let mut spec = RandomSpec::new(args.seed, ctx.clone());
    if let Some(t) = args.target {
        if t > ctx.rep_dim() {
            return Err(CliError::Input(format!(
                "--target {t} exceeds representation size {}",
                ctx.rep_dim()
            )));
        }
        spec = spec.with_index(t);
    }
    if let Some(l) = args.lambda {
        if !l.is_finite() || l == Complex64::new(0.0, 0.0) {
            return Err(CliError::Input(format!(
                "--lambda must be finite and nonzero, got {l}"
            )));
        }
        spec = spec.with_lambda(l);
    }
    let via = |identity: Identity| generate(identity, &spec).map_err(CliError::input);
    match args.kind.as_str() {
        "index" => {
            let t = args.target.unwrap_or(0);
            if !achievable_indices(&ctx).contains(&t) {
                return Err(CliError::Input(format!(
                    "index {t} is not attainable in {ctx}"
                )));
            }
            let a = gen_with_index(&spec.with_index(t)).map_err(CliError::input)?;
            Ok(Instance::new(ctx).with("a", a))
        }
        "commuting" => via(Identity::Thm27),
        "orthogonal" => via(Identity::Thm25),
        "family" => via(Identity::Cor26),
        "radical" => via(Identity::Lem22),
        "lambda" => {
            if args.lambda.is_none() {
                return Err(CliError::Input("--kind lambda needs --lambda".into()));
            }
            via(Identity::Thm35)
        }
        other => {
            let identity: Identity = other.parse().map_err(|_| {
                CliError::Input(format!(
                    "unknown kind '{other}' (index, commuting, orthogonal, family, radical, lambda, or an identity tag)"
                ))
            })?;
            if identity.needs_lambda() && args.lambda.is_none() {
                return Err(CliError::Input(format!("{identity} needs --lambda")));
            }
            via(identity)
        }
    }
}

pub fn gen(args: &GenArgs) -> Outcome {
    run(|| {
        let inst = instance_for_kind(args)?;
        InstanceFile::from_instance(&inst, false).write(&args.out)?;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "wrote {} ({} in {})",
            args.out.display(),
            args.kind,
            inst.context
        );
        for (name, x) in &inst.elements {
            let _ = writeln!(out, "  {name}: norm {}", format::g(x.norm()));
        }
        if let (Ok(a), Ok(b)) = (inst.element("a"), inst.element("b")) {
            let _ = writeln!(
                out,
                "  commutation residual: {}",
                format::g(a.commutation_residual(b))
            );
            if let Some(l) = inst.lambda {
                let r = pdrazin_core::identities::lambda::lambda_residual(a, b, l);
                let _ = writeln!(out, "  lambda residual: {}", format::g(r));
            }
        }
        Ok(Outcome::new(out, Exit::Pass))
    })
}

/// Parses `LO..HI` (or a single size).
pub fn parse_dims(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Input(format!("cannot parse dims '{s}' (expected LO..HI)"));
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            Ok((num(lo)?, num(hi)?))
        }
        None => {
            let n = num(s)?;
            Ok((n, n))
        }
    }
}
