//! One verification routine per identity, each comparing the constructive
//! formula against the oracle and recording every residual it used.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::context::AlgebraContext;
use crate::drazin::{check_pdrazin_axioms, pdrazin};
use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::generators::{self, achievable_indices, PairShape, RandomSpec};
use crate::identities::commuting::case_residual;
use crate::identities::{self, gate, GroupCase, HypothesisCheck, LambdaPair};
use crate::linalg::c;
use crate::report::VerificationReport;
use crate::series::SeriesPolicy;
use crate::tolerance::{relative, Tolerances};

/// Identities the verifier knows, by lowercase tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `(ab)^‡ = a^‡ b^‡` for commuting `a`, `b`.
    Lem21,
    /// Radical ideal and sum-power properties.
    Lem22,
    /// Powers and iterated inverses of `a^‡`.
    Thm23,
    /// `(a^‡)^‡ = a` iff `a` is group invertible.
    Cor24,
    /// Sum of two mutually annihilating elements.
    Thm25,
    /// Sum of `n` pairwise annihilating elements.
    Cor26,
    /// Sum of commuting elements, and `(1 + a^‡ b)^‡` from `(a + b)^‡`.
    Thm27,
    /// Specialisations of the commuting sum; `None` picks the case from `a`.
    Cor28(Option<GroupCase>),
    /// Power identities under `ab = λ ba`.
    Lem31,
    /// Spectral idempotents commute with the other element.
    Lem32,
    /// Swap relations and `(ab)^‡ = b^‡ a^‡ = λ^-1 a^‡ b^‡`.
    Thm33,
    /// Power identities for `(a^‡, b)` and `(a, b^‡)`.
    Cor34,
    /// Difference formula under `ab = λ ba`.
    Thm35,
    /// Finite-sum difference formula.
    Cor36,
}

impl Identity {
    pub const ALL: [Identity; 17] = [
        Identity::Lem21,
        Identity::Lem22,
        Identity::Thm23,
        Identity::Cor24,
        Identity::Thm25,
        Identity::Cor26,
        Identity::Thm27,
        Identity::Cor28(None),
        Identity::Cor28(Some(GroupCase::Nilpotent)),
        Identity::Cor28(Some(GroupCase::Invertible)),
        Identity::Cor28(Some(GroupCase::Group)),
        Identity::Lem31,
        Identity::Lem32,
        Identity::Thm33,
        Identity::Cor34,
        Identity::Thm35,
        Identity::Cor36,
    ];

    pub fn tag(self) -> String {
        match self {
            Identity::Lem21 => "lem2.1".into(),
            Identity::Lem22 => "lem2.2".into(),
            Identity::Thm23 => "thm2.3".into(),
            Identity::Cor24 => "cor2.4".into(),
            Identity::Thm25 => "thm2.5".into(),
            Identity::Cor26 => "cor2.6".into(),
            Identity::Thm27 => "thm2.7".into(),
            Identity::Cor28(None) => "cor2.8".into(),
            Identity::Cor28(Some(case)) => format!("cor2.8-{}", case.as_str()),
            Identity::Lem31 => "lem3.1".into(),
            Identity::Lem32 => "lem3.2".into(),
            Identity::Thm33 => "thm3.3".into(),
            Identity::Cor34 => "cor3.4".into(),
            Identity::Thm35 => "thm3.5".into(),
            Identity::Cor36 => "cor3.6".into(),
        }
    }

    /// Whether the identity concerns a pair with `ab = λ ba`.
    pub fn needs_lambda(self) -> bool {
        matches!(
            self,
            Identity::Lem31
                | Identity::Lem32
                | Identity::Thm33
                | Identity::Cor34
                | Identity::Thm35
                | Identity::Cor36
        )
    }

    /// Element names an instance must provide.
    pub fn required_elements(self) -> &'static [&'static str] {
        match self {
            Identity::Thm23 | Identity::Cor24 => &["a"],
            Identity::Cor26 => &["a1"],
            _ => &["a", "b"],
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Identity::ALL
            .into_iter()
            .find(|i| i.tag() == t)
            .ok_or_else(|| {
                let known: Vec<String> = Identity::ALL.iter().map(|i| i.tag()).collect();
                Error::InvalidSpec(format!(
                    "unknown identity '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Named elements of one context, with the settings a verification uses.
#[derive(Debug, Clone)]
pub struct Instance {
    pub context: Arc<AlgebraContext>,
    pub elements: BTreeMap<String, AlgebraElement>,
    pub lambda: Option<Complex64>,
    pub policy: SeriesPolicy,
    pub tolerances: Tolerances,
}

impl Instance {
    pub fn new(context: AlgebraContext) -> Self {
        let n = context.rep_dim();
        Self {
            context: Arc::new(context),
            elements: BTreeMap::new(),
            lambda: None,
            policy: SeriesPolicy::for_dim(n),
            tolerances: Tolerances::default(),
        }
    }

    pub fn with(mut self, name: &str, x: AlgebraElement) -> Self {
        self.elements.insert(name.into(), x);
        self
    }

    pub fn element(&self, name: &str) -> Result<&AlgebraElement> {
        self.elements
            .get(name)
            .ok_or_else(|| Error::InvalidSpec(format!("instance has no element '{name}'")))
    }

    /// `a1, a2, ...` up to the first missing index.
    pub fn family(&self) -> Result<Vec<AlgebraElement>> {
        let v: Vec<AlgebraElement> = (1..)
            .map_while(|i| self.elements.get(&format!("a{i}")).cloned())
            .collect();
        if v.is_empty() {
            return Err(Error::InvalidSpec("instance has no element 'a1'".into()));
        }
        Ok(v)
    }

    fn pair(&self) -> Result<(&AlgebraElement, &AlgebraElement)> {
        Ok((self.element("a")?, self.element("b")?))
    }

    fn lambda_pair(&self) -> Result<LambdaPair> {
        let lambda = self
            .lambda
            .ok_or_else(|| Error::InvalidSpec("identity needs lambda".into()))?;
        let (a, b) = self.pair()?;
        LambdaPair::new(a.clone(), b.clone(), lambda, &self.tolerances)
    }
}

fn record(report: &mut VerificationReport, h: &HypothesisCheck, tol: &Tolerances) {
    report.hypothesis(&h.name, h.residual, tol.reject);
    if h.marginal {
        report.warn(format!(
            "marginal hypothesis '{}': residual {:.3e} exceeds {:.0e}",
            h.name, h.residual, tol.res
        ));
    }
}

/// Axiom check of `candidate` as the inverse of `x`, at `x`'s radical index,
/// judged at formula accuracy.
fn closure(
    report: &mut VerificationReport,
    x: &AlgebraElement,
    candidate: &AlgebraElement,
    tol: &Tolerances,
) -> Result<()> {
    let k = pdrazin(x, tol)?.radical_index;
    let loose = Tolerances {
        res: tol.acc,
        rad: tol.acc.max(tol.rad),
        ..*tol
    };
    report.absorb("closure", &check_pdrazin_axioms(x, candidate, k, &loose));
    Ok(())
}

fn oracle(x: &AlgebraElement, tol: &Tolerances) -> Result<AlgebraElement> {
    Ok(pdrazin(x, tol)?.inverse)
}

/// Runs `identity` on `inst`.
///
/// Hypothesis rejections, malformed instances and numerical breakdowns are
/// errors; a formula that disagrees with the oracle is a failing report.
pub fn verify(identity: Identity, inst: &Instance) -> Result<VerificationReport> {
    let tol = &inst.tolerances;
    for name in identity.required_elements() {
        inst.element(name)?;
    }
    let mut report = VerificationReport::new(identity.tag());
    match identity {
        Identity::Lem21 => {
            let (a, b) = inst.pair()?;
            record(
                &mut report,
                &identities::commuting_hypothesis(a, b, tol)?,
                tol,
            );
            let formula = identities::product_commuting(a, b, tol)?;
            let ab = a * b;
            report.formula(
                "(ab)^‡ = a^‡b^‡",
                formula.relative_distance(&oracle(&ab, tol)?),
                tol.acc,
            );
            let ai = oracle(a, tol)?;
            report.formula(
                "(a^2)^‡ = (a^‡)^2",
                ai.pow(2).relative_distance(&oracle(&a.pow(2), tol)?),
                tol.acc,
            );
            closure(&mut report, &ab, &formula, tol)?;
        }
        Identity::Lem22 => {
            let (a, b) = inst.pair()?;
            identities::same_context(a, b)?;
            let h = gate("a ∈ J", relative(a.radical_distance(), a.norm()), tol)?;
            record(&mut report, &h, tol);
            let member = |x: &AlgebraElement| relative(x.radical_distance(), x.norm());
            let scale = a.norm().max(1.0) * b.norm().max(1.0);
            report.axiom("ab ∈ J", (a * b).radical_distance() / scale, tol.rad);
            report.axiom("ba ∈ J", (b * a).radical_distance() / scale, tol.rad);
            let b_member = member(b);
            report.info("b radical residual", b_member);
            if b_member <= tol.rad {
                let sum = a + b;
                let mut power = sum.one();
                for k in 1..=a.rep_dim() {
                    power = &power * &sum;
                    report.axiom(format!("(a+b)^{k} ∈ J"), member(&power), tol.rad);
                }
            }
        }
        Identity::Thm23 => {
            let a = inst.element("a")?;
            let ai = oracle(a, tol)?;
            for n in 1..=5 {
                let lhs = oracle(&a.pow(n), tol)?;
                report.formula(
                    format!("(1) (a^{n})^‡ = (a^‡)^{n}"),
                    ai.pow(n).relative_distance(&lhs),
                    tol.acc,
                );
            }
            let aii = oracle(&ai, tol)?;
            let a2ai = &a.pow(2) * &ai;
            report.formula(
                "(2) (a^‡)^‡ = a^2a^‡",
                a2ai.relative_distance(&aii),
                tol.acc,
            );
            report.formula(
                "(3) ((a^‡)^‡)^‡ = a^‡",
                ai.relative_distance(&oracle(&aii, tol)?),
                tol.acc,
            );
            report.formula(
                "(4) a^‡(a^‡)^‡ = aa^‡",
                (&ai * &aii).relative_distance(&(a * &ai)),
                tol.acc,
            );
            closure(&mut report, &ai, &a2ai, tol)?;
        }
        Identity::Cor24 => {
            let a = inst.element("a")?;
            let r = pdrazin(a, tol)?;
            let aii = oracle(&r.inverse, tol)?;
            let residual = aii.relative_distance(a);
            let group = r.drazin_index <= 1;
            report.info("(a^‡)^‡ - a", residual);
            report.info("drazin_index", r.drazin_index as f64);
            report.claim(
                "(a^‡)^‡ = a iff a is group invertible",
                (residual <= tol.acc) == group,
            );
            report.tolerances_used.insert("equality".into(), tol.acc);
        }
        Identity::Thm25 => {
            let (a, b) = inst.pair()?;
            record(
                &mut report,
                &identities::orthogonal_hypothesis(a, b, tol)?,
                tol,
            );
            let formula = identities::add_orthogonal(a, b, tol)?;
            let sum = a + b;
            report.formula(
                "(a+b)^‡ = a^‡ + b^‡",
                formula.relative_distance(&oracle(&sum, tol)?),
                tol.acc,
            );
            closure(&mut report, &sum, &formula, tol)?;
        }
        Identity::Cor26 => {
            let family = inst.family()?;
            for (i, x) in family.iter().enumerate() {
                for (j, y) in family.iter().enumerate().skip(i + 1) {
                    let name = format!("a{}a{} = a{}a{} = 0", i + 1, j + 1, j + 1, i + 1);
                    identities::same_context(x, y)?;
                    let h = gate(&name, identities::orthogonality_residual(x, y), tol)?;
                    record(&mut report, &h, tol);
                }
            }
            let formula = identities::add_orthogonal_n(&family, tol)?;
            let sum = family
                .iter()
                .skip(1)
                .fold(family[0].clone(), |acc, x| &acc + x);
            report.formula(
                "(a1+...+an)^‡ = a1^‡+...+an^‡",
                formula.relative_distance(&oracle(&sum, tol)?),
                tol.acc,
            );
            closure(&mut report, &sum, &formula, tol)?;
        }
        Identity::Thm27 => {
            let (a, b) = inst.pair()?;
            record(
                &mut report,
                &identities::commuting_hypothesis(a, b, tol)?,
                tol,
            );
            let trace = identities::add_commuting(a, b, &inst.policy, tol)?;
            let sum = a + b;
            let sum_inv = oracle(&sum, tol)?;
            report.formula("(a+b)^‡", trace.result.relative_distance(&sum_inv), tol.acc);
            report.series(
                "sum_i (-b^‡aa^Π)^i a^Π",
                trace.series_terms,
                inst.policy.max_terms,
            );
            let ai = oracle(a, tol)?;
            let one_plus = &a.one() + &(&ai * b);
            let from_sum = identities::one_plus_from_sum(a, b, &sum_inv, tol)?;
            report.formula(
                "(1+a^‡b)^‡ = a^Π + a^2a^‡(a+b)^‡",
                from_sum.relative_distance(&oracle(&one_plus, tol)?),
                tol.acc,
            );
            closure(&mut report, &sum, &trace.result, tol)?;
        }
        Identity::Cor28(case) => {
            let (a, b) = inst.pair()?;
            let case = match case {
                Some(c) => c,
                None => classify(a, tol)?,
            };
            report.identity = Identity::Cor28(Some(case)).tag();
            record(
                &mut report,
                &identities::commuting_hypothesis(a, b, tol)?,
                tol,
            );
            let h = gate(
                &format!("a is {}", case.as_str()),
                case_residual(a, case, tol)?,
                tol,
            )?;
            record(&mut report, &h, tol);
            let spec = identities::specialize_2_8(a, b, case, &inst.policy, tol)?;
            let sum = a + b;
            let sum_inv = oracle(&sum, tol)?;
            report.formula(
                "corrected specialization",
                spec.corrected.relative_distance(&sum_inv),
                tol.acc,
            );
            report.info(
                "printed_formula_residual",
                spec.printed.relative_distance(&sum_inv),
            );
            report.info(
                "printed_formula_abs_difference",
                (&spec.printed - &sum_inv).norm(),
            );
            if case == GroupCase::Nilpotent {
                report.series("sum_i (-b^‡a)^i", spec.series_terms, inst.policy.max_terms);
            }
            closure(&mut report, &sum, &spec.corrected, tol)?;
        }
        Identity::Lem31 | Identity::Cor34 => {
            let pair = inst.lambda_pair()?;
            record(&mut report, &pair.hypothesis, tol);
            let prefix = if identity == Identity::Lem31 {
                "lem3.1"
            } else {
                "cor3.4"
            };
            for n in 1..=4 {
                let sub = identities::lambda_power_identities(&pair, n, tol)?;
                for (k, v) in sub
                    .formula_residuals
                    .iter()
                    .filter(|(k, _)| k.starts_with(prefix))
                {
                    report.formula(k.trim_start_matches(prefix).trim_start(), *v, tol.acc);
                }
            }
        }
        Identity::Lem32 | Identity::Thm33 => {
            let pair = inst.lambda_pair()?;
            record(&mut report, &pair.hypothesis, tol);
            let prefix = if identity == Identity::Lem32 {
                "lem3.2"
            } else {
                "thm3.3"
            };
            let sub = identities::lambda_swap_relations(&pair, tol)?;
            for (k, v) in sub
                .formula_residuals
                .iter()
                .filter(|(k, _)| k.starts_with(prefix))
            {
                report.formula(k.trim_start_matches(prefix).trim_start(), *v, tol.acc);
            }
            if identity == Identity::Thm33 {
                let (a, b) = (&pair.a, &pair.b);
                let formula = identities::product_lambda(&pair, tol)?;
                let ab = a * b;
                report.formula(
                    "(3) (ab)^‡ = b^‡a^‡",
                    formula.relative_distance(&oracle(&ab, tol)?),
                    tol.acc,
                );
                let alt = (&oracle(a, tol)? * &oracle(b, tol)?).scale(pair.lambda.inv());
                report.formula(
                    "(3) b^‡a^‡ = λ^-1 a^‡b^‡",
                    formula.relative_distance(&alt),
                    tol.acc,
                );
                closure(&mut report, &ab, &formula, tol)?;
            }
        }
        Identity::Thm35 => {
            let pair = inst.lambda_pair()?;
            record(&mut report, &pair.hypothesis, tol);
            let trace = identities::sub_lambda(&pair, &inst.policy, tol)?;
            let (a, b) = (&pair.a, &pair.b);
            let diff = a - b;
            let diff_inv = oracle(&diff, tol)?;
            report.formula(
                "(a-b)^‡",
                trace.result.relative_distance(&diff_inv),
                tol.acc,
            );
            report.series(
                "sum_i (ba^‡)^i b^Π",
                trace.series_left_terms,
                inst.policy.max_terms,
            );
            report.series(
                "sum_i (b^‡a)^i a^Πb^‡",
                trace.series_right_terms,
                inst.policy.max_terms,
            );
            let (ai, bi) = (oracle(a, tol)?, oracle(b, tol)?);
            let bbi = b * &bi;
            let roundtrip = &(&(a * &ai) * &diff_inv) * &bbi;
            report.formula(
                "w^‡ = aa^‡(a-b)^‡bb^‡",
                trace.w_inverse.relative_distance(&roundtrip),
                tol.acc,
            );
            let printed = &(&ai * &diff_inv) * &bbi;
            report.info(
                "w^‡ = a^‡(a-b)^‡bb^‡ residual",
                trace.w_inverse.relative_distance(&printed),
            );
            closure(&mut report, &diff, &trace.result, tol)?;
        }
        Identity::Cor36 => {
            let pair = inst.lambda_pair()?;
            record(&mut report, &pair.hypothesis, tol);
            let finite = identities::sub_lambda_finite(&pair, tol)?;
            let diff = &pair.a - &pair.b;
            report.formula(
                "(a-b)^D",
                finite.relative_distance(&oracle(&diff, tol)?),
                tol.acc,
            );
            let series = identities::sub_lambda(&pair, &inst.policy, tol)?;
            report.formula(
                "finite sum = series form",
                finite.relative_distance(&series.result),
                tol.acc,
            );
            closure(&mut report, &diff, &finite, tol)?;
        }
    }
    Ok(report.finished())
}

/// The most specific case of the commuting-sum specialisation `a` satisfies.
pub fn classify(a: &AlgebraElement, tol: &Tolerances) -> Result<GroupCase> {
    for case in [
        GroupCase::Invertible,
        GroupCase::Nilpotent,
        GroupCase::Group,
    ] {
        if case_residual(a, case, tol)? <= tol.res {
            return Ok(case);
        }
    }
    Err(Error::Hypothesis {
        name: "a is nilpotent, invertible or group invertible".into(),
        residual: case_residual(a, GroupCase::Group, tol)?,
        threshold: tol.res,
    })
}

/// Random instance satisfying the hypotheses of `identity`.
///
/// Single-element identities use `spec.target_index` when it is attainable
/// and a seeded choice among attainable indices otherwise.
pub fn generate(identity: Identity, spec: &RandomSpec) -> Result<Instance> {
    let mut inst = Instance::new(spec.context.clone());
    match identity {
        Identity::Lem21 | Identity::Thm27 => {
            let (a, b) = generators::gen_commuting_pair(spec)?;
            inst = inst.with("a", a).with("b", b);
        }
        Identity::Cor28(case) => {
            let shape = match case {
                Some(c) => PairShape::Case(c),
                None => PairShape::Case(GroupCase::ALL[(spec.seed % 3) as usize]),
            };
            let (a, b) = generators::gen_commuting_pair_shaped(spec, shape)?;
            inst = inst.with("a", a).with("b", b);
        }
        Identity::Lem22 => {
            let (a, b) = generators::gen_radical_pair(spec)?;
            inst = inst.with("a", a).with("b", b);
        }
        Identity::Thm23 | Identity::Cor24 => {
            let mut spec = spec.clone();
            let options = achievable_indices(&spec.context);
            if !options.contains(&spec.target_index) {
                spec.target_index = options[(spec.seed % options.len() as u64) as usize];
            }
            inst = inst.with("a", generators::gen_with_index(&spec)?);
        }
        Identity::Thm25 => {
            let (a, b) = generators::gen_orthogonal_pair(spec)?;
            inst = inst.with("a", a).with("b", b);
        }
        Identity::Cor26 => {
            for (i, x) in generators::gen_orthogonal_family(spec, 3)?
                .into_iter()
                .enumerate()
            {
                inst = inst.with(&format!("a{}", i + 1), x);
            }
        }
        _ => {
            let pair = generators::gen_lambda_pair(spec)?;
            inst.lambda = Some(pair.lambda);
            inst = inst.with("a", pair.a).with("b", pair.b);
        }
    }
    Ok(inst)
}

/// `λ` parsed from `re`, `re,im` or `i`.
pub fn parse_scalar(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let bad = || Error::InvalidSpec(format!("cannot parse scalar '{s}' (expected RE or RE,IM)"));
    if t == "i" {
        return Ok(c(0.0, 1.0));
    }
    let parts: Vec<&str> = t.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(c(num(re)?, 0.0)),
        [re, im] => Ok(c(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}
