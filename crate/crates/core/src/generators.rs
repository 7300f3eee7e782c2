//! Seeded random instances that satisfy each formula's hypotheses.
//!
//! Elements are assembled from Jordan-type blocks with known spectra, mixed
//! by a pattern-preserving similarity of bounded condition number, and
//! normalised to unit Frobenius norm. Draws whose derived elements would have
//! an ill-conditioned inverse are rejected and redrawn from the same stream,
//! so a spec always maps to the same instance.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::context::AlgebraContext;
use crate::drazin::{is_numerically_zero, pdrazin};
use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::identities::commuting::GroupCase;
use crate::identities::LambdaPair;
use crate::linalg::{block_diagonal, c, condition_number, kronecker, ComplexMatrix};
use crate::series::{terminating_series, SeriesPolicy};
use crate::tolerance::Tolerances;

/// Upper bound on the condition number of any mixing similarity.
pub const MAX_SIMILARITY_CONDITION: f64 = 100.0;
/// Upper bound on `||x|| ||x^D||` for every element a generated instance feeds
/// to the oracle.
pub const MAX_INVERSE_CONDITION: f64 = 1e3;
/// Upper bound on `||step||^(terms - 1) ||tail||` for every series a
/// generated instance feeds to a formula; rounding in `step^i` grows with it.
pub const MAX_SERIES_GROWTH: f64 = 1e6;
const MAX_ATTEMPTS: usize = 200;

/// Parameters of a random draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    pub context: AlgebraContext,
    pub target_index: usize,
    pub lambda: Option<Complex64>,
}

impl RandomSpec {
    pub fn new(seed: u64, context: AlgebraContext) -> Self {
        Self {
            seed,
            context,
            target_index: 0,
            lambda: None,
        }
    }

    pub fn with_index(mut self, target_index: usize) -> Self {
        self.target_index = target_index;
        self
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    fn validate(&self) -> Result<()> {
        self.context.clone().validated()?;
        if self.target_index > self.context.rep_dim() {
            return Err(Error::InvalidSpec(format!(
                "target index {} exceeds representation size {}",
                self.target_index,
                self.context.rep_dim()
            )));
        }
        if let Some(l) = self.lambda {
            if l == c(0.0, 0.0) || !l.is_finite() {
                return Err(Error::InvalidSpec(
                    "lambda must be finite and nonzero".into(),
                ));
            }
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

// ---------------------------------------------------------------------------
// sampling primitives

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    let s = scale / std::f64::consts::SQRT_2;
    c(normal(rng) * s, normal(rng) * s)
}

/// Modulus uniform in `[lo, hi]`, uniformly distributed phase.
fn annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..=hi);
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, t)
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng, 1.0));
    g.qr().q()
}

/// A similarity `(S, S^-1)` preserving the pattern of `ctx` (not a direct sum).
fn similarity(ctx: &AlgebraContext, rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
    let n = ctx.rep_dim();
    match ctx {
        AlgebraContext::FullMatrix(_) => loop {
            let u = random_unitary(rng, n);
            let v = random_unitary(rng, n);
            let s: Vec<f64> = (0..n).map(|_| 5f64.powf(rng.random::<f64>())).collect();
            let d = DMatrix::from_fn(n, n, |i, j| if i == j { c(s[i], 0.0) } else { c(0.0, 0.0) });
            let dinv = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c(1.0 / s[i], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            });
            let sm = &u * d * &v;
            if condition_number(&sm) <= MAX_SIMILARITY_CONDITION {
                return (sm, v.adjoint() * dinv * u.adjoint());
            }
        },
        AlgebraContext::UpperTriangular(_) => loop {
            let sm = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => annulus(rng, 1.0, 2.0),
                std::cmp::Ordering::Less => gaussian(rng, 0.4),
                std::cmp::Ordering::Greater => c(0.0, 0.0),
            });
            if condition_number(&sm) <= MAX_SIMILARITY_CONDITION {
                let inv = sm
                    .solve_upper_triangular(&DMatrix::identity(n, n))
                    .expect("nonzero diagonal");
                // the inverse of an upper-triangular matrix is upper triangular
                let inv =
                    DMatrix::from_fn(n, n, |i, j| if j >= i { inv[(i, j)] } else { c(0.0, 0.0) });
                return (sm, inv);
            }
        },
        _ => (DMatrix::identity(n, n), DMatrix::identity(n, n)),
    }
}

fn conjugate(m: &ComplexMatrix, s: &(ComplexMatrix, ComplexMatrix)) -> ComplexMatrix {
    &s.0 * m * &s.1
}

/// Jordan block `mu I + N` with random nonzero superdiagonal weights.
fn jordan_block(mu: Complex64, size: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = DMatrix::identity(size, size) * mu;
    for i in 0..size.saturating_sub(1) {
        m[(i, i + 1)] = annulus(rng, 0.5, 1.0);
    }
    m
}

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

fn normalized(m: ComplexMatrix) -> ComplexMatrix {
    let n = crate::linalg::frobenius(&m);
    if n > 0.0 {
        m / c(n, 0.0)
    } else {
        m
    }
}

fn element(ctx: &Arc<AlgebraContext>, m: &ComplexMatrix) -> AlgebraElement {
    AlgebraElement::projected(Arc::clone(ctx), m)
}

/// Smallest norm a nonzero derived element may have; anything between this
/// and the oracle's zero threshold is indistinguishable from rounding noise.
pub const MIN_NONZERO_NORM: f64 = 1e-3;

/// Whether `x` is numerically zero, or the oracle inverse of `x` exists with
/// `||x|| >= MIN_NONZERO_NORM` and `||x|| ||x^D||` below
/// [`MAX_INVERSE_CONDITION`].
pub fn well_posed(x: &AlgebraElement, tol: &Tolerances) -> bool {
    if is_numerically_zero(x, tol) {
        return true;
    }
    if x.norm() < MIN_NONZERO_NORM {
        return false;
    }
    match pdrazin(x, tol) {
        Ok(r) => r.inverse.norm() * x.norm() <= MAX_INVERSE_CONDITION,
        Err(_) => false,
    }
}

fn all_well_posed(xs: &[&AlgebraElement], tol: &Tolerances) -> bool {
    xs.iter().all(|x| well_posed(x, tol))
}

/// Whether `sum_i step^i tail` terminates with growth at most
/// [`MAX_SERIES_GROWTH`].
pub fn series_well_posed(step: &AlgebraElement, tail: &AlgebraElement) -> bool {
    let policy = SeriesPolicy::for_dim(step.rep_dim());
    match terminating_series(step, tail, &policy) {
        Ok(sum) => {
            let k = sum.terms.saturating_sub(1) as i32;
            step.norm().powi(k) * tail.norm() <= MAX_SERIES_GROWTH
        }
        Err(_) => false,
    }
}

// ---------------------------------------------------------------------------
// prescribed index

/// Drazin indices reachable by an element of `ctx`.
pub fn achievable_indices(ctx: &AlgebraContext) -> Vec<usize> {
    match ctx {
        AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => (0..=*n).collect(),
        AlgebraContext::TruncatedPolynomial(m) => {
            let mut out = vec![0, 1];
            out.extend((1..*m).map(|v| m.div_ceil(v)));
            out.sort_unstable();
            out.dedup();
            out
        }
        AlgebraContext::DirectSum(s) => {
            let mut out: Vec<usize> = s.iter().flat_map(achievable_indices).collect();
            out.sort_unstable();
            out.dedup();
            out
        }
    }
}

/// Distinct eigenvalues of a generated element with the size of their
/// largest Jordan block.
type Spectrum = Vec<(Complex64, usize)>;

fn merge_spectrum(into: &mut Spectrum, mu: Complex64, block: usize) {
    match into.iter_mut().find(|(m, _)| *m == mu) {
        Some(entry) => entry.1 = entry.1.max(block),
        None => into.push((mu, block)),
    }
}

/// Truncated polynomial `mu + x^v * (unit)`, with `v = None` meaning no
/// nilpotent part.
fn poly_with_valuation(
    m: usize,
    mu: Complex64,
    valuation: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> ComplexMatrix {
    let mut coeffs = vec![c(0.0, 0.0); m];
    coeffs[0] = mu;
    if let Some(v) = valuation.filter(|&v| v < m) {
        coeffs[v] = annulus(rng, 0.5, 1.0);
        for cf in coeffs.iter_mut().skip(v + 1) {
            *cf = gaussian(rng, 0.4);
        }
    }
    toeplitz(&coeffs)
}

fn toeplitz(coeffs: &[Complex64]) -> ComplexMatrix {
    let m = coeffs.len();
    DMatrix::from_fn(
        m,
        m,
        |i, j| if j >= i { coeffs[j - i] } else { c(0.0, 0.0) },
    )
}

/// Unnormalised element of `ctx` with Drazin index exactly `target`.
fn raw_with_index(
    ctx: &AlgebraContext,
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(ComplexMatrix, Spectrum)> {
    match ctx {
        AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => {
            let n = *n;
            if target > n {
                return Err(Error::InvalidSpec(format!(
                    "index {target} exceeds dimension {n}"
                )));
            }
            let core = if target == 0 {
                n
            } else {
                rng.random_range(0..=n - target)
            };
            let mut blocks: Vec<ComplexMatrix> = Vec::new();
            let mut spectrum = Spectrum::new();
            if core > 0 {
                let eig: Vec<Complex64> = (0..core).map(|_| annulus(rng, 0.6, 1.2)).collect();
                let t = DMatrix::from_fn(core, core, |i, j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => eig[i],
                    std::cmp::Ordering::Less => gaussian(rng, 0.25),
                    std::cmp::Ordering::Greater => c(0.0, 0.0),
                });
                eig.iter()
                    .for_each(|&e| merge_spectrum(&mut spectrum, e, 1));
                blocks.push(t);
            }
            if target > 0 {
                blocks.push(jordan_block(c(0.0, 0.0), target, rng));
                let mut rest = n - core - target;
                while rest > 0 {
                    let size = rng.random_range(1..=rest.min(target));
                    blocks.push(jordan_block(c(0.0, 0.0), size, rng));
                    rest -= size;
                }
                merge_spectrum(&mut spectrum, c(0.0, 0.0), target);
            }
            shuffle(&mut blocks, rng);
            let s = similarity(ctx, rng);
            Ok((conjugate(&block_diagonal(&blocks), &s), spectrum))
        }
        AlgebraContext::TruncatedPolynomial(m) => {
            let m = *m;
            if target == 0 {
                let mu = annulus(rng, 0.6, 1.2);
                let v = rng.random_range(1..=m);
                return Ok((poly_with_valuation(m, mu, Some(v), rng), vec![(mu, 1)]));
            }
            let valuations: Vec<usize> = (1..m).filter(|&v| m.div_ceil(v) == target).collect();
            if valuations.is_empty() {
                if target == 1 {
                    return Ok((DMatrix::zeros(m, m), vec![(c(0.0, 0.0), 1)]));
                }
                return Err(Error::InvalidSpec(format!(
                    "index {target} is not attainable in TruncatedPolynomial({m})"
                )));
            }
            let v = valuations[rng.random_range(0..valuations.len())];
            Ok((
                poly_with_valuation(m, c(0.0, 0.0), Some(v), rng),
                vec![(c(0.0, 0.0), target)],
            ))
        }
        AlgebraContext::DirectSum(summands) => {
            let carriers: Vec<usize> = (0..summands.len())
                .filter(|&i| achievable_indices(&summands[i]).contains(&target))
                .collect();
            if carriers.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "index {target} is not attainable in {ctx}"
                )));
            }
            let carrier = carriers[rng.random_range(0..carriers.len())];
            let mut blocks = Vec::new();
            let mut spectrum = Spectrum::new();
            for (i, s) in summands.iter().enumerate() {
                let idx = if i == carrier {
                    target
                } else {
                    let options: Vec<usize> = achievable_indices(s)
                        .into_iter()
                        .filter(|&k| k <= target)
                        .collect();
                    options[rng.random_range(0..options.len())]
                };
                let (m, sp) = raw_with_index(s, idx, rng)?;
                blocks.push(m);
                sp.into_iter()
                    .for_each(|(mu, b)| merge_spectrum(&mut spectrum, mu, b));
            }
            Ok((block_diagonal(&blocks), spectrum))
        }
    }
}

/// Random element of the spec's context whose Drazin index is exactly
/// `spec.target_index`, normalised to unit norm.
pub fn gen_with_index(spec: &RandomSpec) -> Result<AlgebraElement> {
    spec.validate()?;
    if !achievable_indices(&spec.context).contains(&spec.target_index) {
        return Err(Error::InvalidSpec(format!(
            "index {} is not attainable in {}",
            spec.target_index, spec.context
        )));
    }
    let ctx = Arc::new(spec.context.clone());
    let mut rng = spec.rng();
    let (m, _) = raw_with_index(&spec.context, spec.target_index, &mut rng)?;
    Ok(element(&ctx, &normalized(m)))
}

fn random_achievable(ctx: &AlgebraContext, rng: &mut ChaCha8Rng) -> usize {
    let options = achievable_indices(ctx);
    options[rng.random_range(0..options.len())]
}

// ---------------------------------------------------------------------------
// commuting pairs

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<Complex64>);

impl Polynomial {
    pub fn from_roots(scale: Complex64, roots: &[Complex64]) -> Self {
        let mut coeffs = vec![scale];
        for &r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &cf) in coeffs.iter().enumerate() {
                next[i + 1] += cf;
                next[i] -= cf * r;
            }
            coeffs = next;
        }
        Self(coeffs)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(c(0.0, 0.0), |acc, &cf| acc * x + cf)
    }

    /// Horner evaluation on an algebra element.
    pub fn eval_element(&self, m: &AlgebraElement) -> AlgebraElement {
        self.0
            .iter()
            .rev()
            .fold(m.zero_like(), |acc, &cf| &(&acc * m) + &m.one().scale(cf))
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self(
            (0..n)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or_default()
                        - other.0.get(i).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
}

/// `(p(m), q(m))`, which commute exactly in exact arithmetic.
pub fn commuting_pair_from_polynomials(
    m: &AlgebraElement,
    p: &Polynomial,
    q: &Polynomial,
) -> (AlgebraElement, AlgebraElement) {
    (p.eval_element(m), q.eval_element(m))
}

/// Shape of the first element of a generated commuting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairShape {
    Any,
    Case(GroupCase),
}

/// Base element with eigenvalues drawn from `palette`.
fn raw_with_palette(
    ctx: &AlgebraContext,
    palette: &[Complex64],
    zero_block: usize,
    rng: &mut ChaCha8Rng,
) -> (ComplexMatrix, Spectrum) {
    match ctx {
        AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => {
            let mut rest = *n;
            let mut blocks = Vec::new();
            let mut spectrum = Spectrum::new();
            let zero_in_palette = palette.iter().any(|z| z.norm() == 0.0);
            if zero_in_palette && zero_block > 0 {
                let size = zero_block.min(rest);
                blocks.push(jordan_block(c(0.0, 0.0), size, rng));
                merge_spectrum(&mut spectrum, c(0.0, 0.0), size);
                rest -= size;
            }
            while rest > 0 {
                let mu = palette[rng.random_range(0..palette.len())];
                let size = if rng.random_bool(0.6) {
                    1
                } else {
                    rng.random_range(1..=rest.min(3))
                };
                blocks.push(jordan_block(mu, size, rng));
                merge_spectrum(&mut spectrum, mu, size);
                rest -= size;
            }
            shuffle(&mut blocks, rng);
            let s = similarity(ctx, rng);
            (conjugate(&block_diagonal(&blocks), &s), spectrum)
        }
        AlgebraContext::TruncatedPolynomial(m) => {
            let mu = palette[rng.random_range(0..palette.len())];
            let valuation = if rng.random_bool(0.25) {
                None
            } else {
                Some(rng.random_range(1..=*m))
            };
            let block = match valuation {
                Some(v) if v < *m => m.div_ceil(v),
                _ => 1,
            };
            (
                poly_with_valuation(*m, mu, valuation, rng),
                vec![(mu, block)],
            )
        }
        AlgebraContext::DirectSum(summands) => {
            let mut blocks = Vec::new();
            let mut spectrum = Spectrum::new();
            for s in summands {
                let (m, sp) = raw_with_palette(s, palette, zero_block, rng);
                blocks.push(m);
                sp.into_iter()
                    .for_each(|(mu, b)| merge_spectrum(&mut spectrum, mu, b));
            }
            (block_diagonal(&blocks), spectrum)
        }
    }
}

fn random_palette(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let count = rng.random_range(1..=3);
        let mut palette = Vec::with_capacity(count);
        if rng.random_bool(0.5) {
            palette.push(c(0.0, 0.0));
        }
        while palette.len() < count {
            palette.push(annulus(rng, 0.6, 1.2));
        }
        let separated = palette
            .iter()
            .enumerate()
            .all(|(i, x)| palette.iter().skip(i + 1).all(|y| (x - y).norm() >= 0.35));
        if separated {
            return palette;
        }
    }
}

/// Extra root kept at least 0.3 away from every palette value.
fn far_root(palette: &[Complex64], rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let r = annulus(rng, 0.2, 1.6);
        if palette.iter().all(|p| (p - r).norm() >= 0.3) {
            return r;
        }
    }
}

fn random_subset(items: &[Complex64], max: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v = items.to_vec();
    shuffle(&mut v, rng);
    let k = rng.random_range(0..=max.min(v.len()));
    v.truncate(k);
    v
}

fn random_poly(roots: Vec<Complex64>, palette: &[Complex64], rng: &mut ChaCha8Rng) -> Polynomial {
    let mut roots = roots;
    if roots.len() < 3 && rng.random_bool(0.5) {
        roots.push(far_root(palette, rng));
    }
    Polynomial::from_roots(annulus(rng, 0.5, 1.5), &roots)
}

/// Each of `p(mu)`, `q(mu)`, `p(mu) + q(mu)` is either a designed zero or at
/// least `0.08` of the largest such value.
fn separated_values(spectrum: &Spectrum, p: &Polynomial, q: &Polynomial) -> bool {
    let values: Vec<Complex64> = spectrum
        .iter()
        .flat_map(|&(mu, _)| {
            let (x, y) = (p.eval(mu), q.eval(mu));
            [x, y, x + y]
        })
        .collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    values
        .iter()
        .all(|v| v.norm() <= 1e-12 * scale.max(1.0) || v.norm() >= 0.08 * scale)
}

fn commuting_raw(
    ctx: &Arc<AlgebraContext>,
    target: usize,
    shape: PairShape,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    check: bool,
) -> Result<(AlgebraElement, AlgebraElement)> {
    for _ in 0..MAX_ATTEMPTS {
        let mut palette = random_palette(rng);
        if matches!(shape, PairShape::Case(GroupCase::Nilpotent)) && palette.len() == 3 {
            palette.truncate(2);
        }
        let (m, spectrum) = raw_with_palette(ctx, &palette, target, rng);
        let used: Vec<Complex64> = spectrum.iter().map(|s| s.0).collect();
        let p_roots = match shape {
            PairShape::Any => random_subset(&used, 2, rng),
            PairShape::Case(GroupCase::Nilpotent) => used.clone(),
            PairShape::Case(GroupCase::Invertible) => Vec::new(),
            PairShape::Case(GroupCase::Group) => {
                let simple: Vec<Complex64> =
                    spectrum.iter().filter(|s| s.1 == 1).map(|s| s.0).collect();
                random_subset(&simple, 2, rng)
            }
        };
        let p = match shape {
            PairShape::Case(GroupCase::Nilpotent) => {
                Polynomial::from_roots(annulus(rng, 0.5, 1.5), &p_roots)
            }
            _ => random_poly(p_roots, &used, rng),
        };
        let q = if rng.random_bool(0.35) {
            // q = t - p with designed zeros of p + q
            let t = random_poly(random_subset(&used, 2, rng), &used, rng);
            t.sub(&p)
        } else {
            random_poly(random_subset(&used, 2, rng), &used, rng)
        };
        if !separated_values(&spectrum, &p, &q) {
            continue;
        }
        let base = element(ctx, &m);
        let (a, b) = commuting_pair_from_polynomials(&base, &p, &q);
        // both sides vanishing on the whole spectrum leaves only rounding noise
        let scale = a.norm().max(b.norm());
        if scale < MIN_NONZERO_NORM {
            continue;
        }
        let snap = |x: AlgebraElement| {
            if x.norm() < 1e-10 * scale {
                x.zero_like()
            } else {
                x.scale(c(1.0 / scale, 0.0))
            }
        };
        let (a, b) = (snap(a), snap(b));
        if check {
            let Ok(ra) = pdrazin(&a, tol) else { continue };
            let sum = &a + &b;
            let prod = &a * &b;
            let square = a.pow(2);
            let one_plus = &a.one() + &(&ra.inverse * &b);
            if !all_well_posed(&[&a, &b, &sum, &prod, &square, &one_plus], tol) {
                continue;
            }
            let Ok(rb) = pdrazin(&b, tol) else { continue };
            let a_pi = &ra.spectral_idempotent;
            let step = -(&(&rb.inverse * &a) * a_pi);
            if !series_well_posed(&step, a_pi) || !series_well_posed(&-(&rb.inverse * &a), &a.one())
            {
                continue;
            }
        }
        return Ok((a, b));
    }
    Err(Error::InvalidSpec(format!(
        "no well-conditioned commuting pair found in {ctx}"
    )))
}

/// Commuting pair `(p(m), q(m))` for random polynomials of degree <= 3 in a
/// random base element `m`, jointly normalised.
pub fn gen_commuting_pair(spec: &RandomSpec) -> Result<(AlgebraElement, AlgebraElement)> {
    gen_commuting_pair_shaped(spec, PairShape::Any)
}

/// As [`gen_commuting_pair`], with the first element forced to be nilpotent,
/// invertible or group invertible.
pub fn gen_commuting_pair_shaped(
    spec: &RandomSpec,
    shape: PairShape,
) -> Result<(AlgebraElement, AlgebraElement)> {
    spec.validate()?;
    let ctx = Arc::new(spec.context.clone());
    let mut rng = spec.rng();
    commuting_raw(
        &ctx,
        spec.target_index,
        shape,
        &Tolerances::default(),
        &mut rng,
        true,
    )
}

// ---------------------------------------------------------------------------
// orthogonal families

fn embed(n: usize, coords: &[usize], block: &ComplexMatrix) -> ComplexMatrix {
    let mut out = DMatrix::zeros(n, n);
    for (i, &ci) in coords.iter().enumerate() {
        for (j, &cj) in coords.iter().enumerate() {
            out[(ci, cj)] = block[(i, j)];
        }
    }
    out
}

fn orthogonal_raw(
    ctx: &AlgebraContext,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ComplexMatrix>> {
    match ctx {
        AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => {
            let n = *n;
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); count];
            for i in 0..n {
                groups[rng.random_range(0..count)].push(i);
            }
            groups
                .iter()
                .map(|coords| {
                    if coords.is_empty() {
                        return Ok(DMatrix::zeros(n, n));
                    }
                    let sub = match ctx {
                        AlgebraContext::FullMatrix(_) => AlgebraContext::FullMatrix(coords.len()),
                        _ => AlgebraContext::UpperTriangular(coords.len()),
                    };
                    let idx = random_achievable(&sub, rng);
                    let (block, _) = raw_with_index(&sub, idx, rng)?;
                    Ok(embed(n, coords, &normalized(block)))
                })
                .collect()
        }
        AlgebraContext::TruncatedPolynomial(m) => {
            let m = *m;
            // pairwise valuation sums must reach m
            let valuations: Vec<Option<usize>> = if count == 2 {
                let i = rng.random_range(0..=m);
                let j = rng.random_range(m.saturating_sub(i)..=m);
                vec![Some(i), Some(j)]
            } else {
                let half = m.div_ceil(2);
                (0..count)
                    .map(|_| Some(rng.random_range(half..=m)))
                    .collect()
            };
            Ok(valuations
                .into_iter()
                .map(|v| match v {
                    Some(0) => poly_with_valuation(m, annulus(rng, 0.6, 1.2), Some(1), rng),
                    Some(v) if v < m => poly_with_valuation(m, c(0.0, 0.0), Some(v), rng),
                    _ => DMatrix::zeros(m, m),
                })
                .map(normalized)
                .collect())
        }
        AlgebraContext::DirectSum(summands) => {
            let parts: Vec<Vec<ComplexMatrix>> = summands
                .iter()
                .map(|s| orthogonal_raw(s, count, rng))
                .collect::<Result<_>>()?;
            Ok((0..count)
                .map(|k| block_diagonal(&parts.iter().map(|p| p[k].clone()).collect::<Vec<_>>()))
                .collect())
        }
    }
}

/// `count` elements with `a_i a_j = 0` for `i != j`, exactly.
pub fn gen_orthogonal_family(spec: &RandomSpec, count: usize) -> Result<Vec<AlgebraElement>> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::InvalidSpec(
            "orthogonal family needs at least one element".into(),
        ));
    }
    let ctx = Arc::new(spec.context.clone());
    let mut rng = spec.rng();
    Ok(orthogonal_raw(&spec.context, count, &mut rng)?
        .into_iter()
        .map(|m| AlgebraElement::projected(Arc::clone(&ctx), &normalized(m)))
        .collect())
}

/// Pair with `ab = ba = 0` built from complementary coordinate projections.
pub fn gen_orthogonal_pair(spec: &RandomSpec) -> Result<(AlgebraElement, AlgebraElement)> {
    if spec.context.rep_dim() < 2 {
        return Err(Error::InvalidSpec(
            "orthogonal pair needs representation size >= 2".into(),
        ));
    }
    let mut v = gen_orthogonal_family(spec, 2)?;
    let b = v.pop().expect("two elements");
    let a = v.pop().expect("two elements");
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// lambda-commuting pairs

/// `diag(λ^(d-1), ..., λ, 1)`.
pub fn weight_diagonal(lambda: Complex64, d: usize) -> ComplexMatrix {
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            lambda.powu((d - 1 - i) as u32)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Upper shift of size `d`.
pub fn upper_shift(d: usize) -> ComplexMatrix {
    DMatrix::from_fn(
        d,
        d,
        |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) },
    )
}

/// `(diag(λ^(d-1), ..., 1), upper shift)`, satisfying `ab = λ ba` exactly.
pub fn weighted_shift_pair(lambda: Complex64, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    (weight_diagonal(lambda, d), upper_shift(d))
}

/// Clock-and-shift pair `(diag(1, λ, ..., λ^(d-1)), cyclic shift)` with
/// `ab = λ ba`; both invertible, requires `λ^d = 1`.
pub fn weyl_pair(lambda: Complex64, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let a = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            lambda.powu(i as u32)
        } else {
            c(0.0, 0.0)
        }
    });
    let b = DMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    (a, b)
}

/// Smallest `d` in `2..=max` with `λ^d = 1`.
pub fn root_of_unity_order(lambda: Complex64, max: usize) -> Option<usize> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return None;
    }
    (2..=max).find(|&d| (lambda.powu(d as u32) - c(1.0, 0.0)).norm() < 1e-12)
}

/// Largest weighted-shift block keeping `|λ|^(±(d-1)) <= 4`.
fn max_shift_block(lambda: Complex64, remaining: usize) -> usize {
    let l = lambda.norm().ln().abs();
    if l < 1e-12 {
        remaining
    } else {
        ((4f64.ln() / l).floor() as usize + 1).clamp(1, remaining)
    }
}

fn small_commuting(
    ctx: &AlgebraContext,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if ctx.rep_dim() == 1 {
        return Ok((
            toeplitz(&[annulus(rng, 0.6, 1.2)]),
            toeplitz(&[annulus(rng, 0.6, 1.2)]),
        ));
    }
    let arc = Arc::new(ctx.clone());
    let (a, b) = commuting_raw(
        &arc,
        rng.random_range(0..=ctx.rep_dim()),
        PairShape::Any,
        tol,
        rng,
        false,
    )?;
    Ok((a.into_matrix(), b.into_matrix()))
}

fn lambda_raw(
    ctx: &AlgebraContext,
    lambda: Complex64,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    match ctx {
        AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => {
            let n = *n;
            let full = matches!(ctx, AlgebraContext::FullMatrix(_));
            let sub = |k: usize| {
                if full {
                    AlgebraContext::FullMatrix(k)
                } else {
                    AlgebraContext::UpperTriangular(k)
                }
            };
            let mut a_blocks = Vec::new();
            let mut b_blocks = Vec::new();
            let mut rest = n;
            while rest > 0 {
                let weyl = if full {
                    root_of_unity_order(lambda, rest)
                } else {
                    None
                };
                let dmax = max_shift_block(lambda, rest);
                let roll = rng.random_range(0..10);
                if let (Some(d), true) = (weyl, roll < 4) {
                    let k = rng.random_range(1..=rest / d);
                    let (z, x) = weyl_pair(lambda, d);
                    let (p, q) = small_commuting(&sub(k), tol, rng)?;
                    a_blocks.push(kronecker(&z, &p));
                    b_blocks.push(kronecker(&x, &q));
                    rest -= d * k;
                } else if dmax >= 2 && roll < 8 {
                    let d = rng.random_range(2..=dmax);
                    let k = rng.random_range(1..=rest / d);
                    let (p, q) = small_commuting(&sub(k), tol, rng)?;
                    let scale = annulus(rng, 0.6, 1.2);
                    if rng.random_bool(0.5) {
                        a_blocks.push(kronecker(&(weight_diagonal(lambda, d) * scale), &p));
                        b_blocks.push(kronecker(&upper_shift(d), &q));
                    } else {
                        a_blocks.push(kronecker(&upper_shift(d), &p));
                        b_blocks.push(kronecker(&(weight_diagonal(lambda.inv(), d) * scale), &q));
                    }
                    rest -= d * k;
                } else {
                    let k = rng.random_range(1..=rest.min(3));
                    let s = sub(k);
                    let idx = random_achievable(&s, rng);
                    let (x, _) = raw_with_index(&s, idx, rng)?;
                    let zero = DMatrix::zeros(k, k);
                    if rng.random_bool(0.5) {
                        a_blocks.push(x);
                        b_blocks.push(zero);
                    } else {
                        a_blocks.push(zero);
                        b_blocks.push(x);
                    }
                    rest -= k;
                }
            }
            let s = similarity(ctx, rng);
            Ok((
                conjugate(&block_diagonal(&a_blocks), &s),
                conjugate(&block_diagonal(&b_blocks), &s),
            ))
        }
        AlgebraContext::TruncatedPolynomial(m) => {
            let m = *m;
            if (lambda - c(1.0, 0.0)).norm() < 1e-15 {
                let (p, q) = small_commuting(ctx, tol, rng)?;
                return Ok((p, q));
            }
            // a commutative algebra only admits ab = λba with ab = 0
            let roll = rng.random_range(0..3);
            let idx = random_achievable(ctx, rng);
            let (x, _) = raw_with_index(ctx, idx, rng)?;
            let zero = DMatrix::zeros(m, m);
            Ok(match roll {
                0 if m >= 2 => {
                    let i = rng.random_range(1..m);
                    let j = rng.random_range(m - i..=m);
                    (
                        poly_with_valuation(m, c(0.0, 0.0), Some(i), rng),
                        poly_with_valuation(m, c(0.0, 0.0), Some(j), rng),
                    )
                }
                1 => (zero, x),
                _ => (x, zero),
            })
        }
        AlgebraContext::DirectSum(summands) => {
            let parts: Vec<(ComplexMatrix, ComplexMatrix)> = summands
                .iter()
                .map(|s| lambda_raw(s, lambda, tol, rng))
                .collect::<Result<_>>()?;
            let a: Vec<_> = parts.iter().map(|p| p.0.clone()).collect();
            let b: Vec<_> = parts.iter().map(|p| p.1.clone()).collect();
            Ok((block_diagonal(&a), block_diagonal(&b)))
        }
    }
}

/// Pair with `ab = λ ba` assembled from weighted-shift blocks, Weyl blocks
/// (when `λ` is a root of unity) and one-sided blocks, mixed by a common
/// similarity; `a` and `b` are normalised separately.
pub fn gen_lambda_pair(spec: &RandomSpec) -> Result<LambdaPair> {
    spec.validate()?;
    let lambda = spec
        .lambda
        .ok_or_else(|| Error::InvalidSpec("lambda pair needs a lambda".into()))?;
    let tol = Tolerances::default();
    let ctx = Arc::new(spec.context.clone());
    let mut rng = spec.rng();
    for _ in 0..MAX_ATTEMPTS {
        let (a, b) = lambda_raw(&spec.context, lambda, &tol, &mut rng)?;
        let a = element(&ctx, &normalized(a));
        let b = element(&ctx, &normalized(b));
        let Ok(pair) = LambdaPair::new(a, b, lambda, &tol) else {
            continue;
        };
        if pair.hypothesis.marginal {
            continue;
        }
        let (Ok(ra), Ok(rb)) = (pdrazin(&pair.a, &tol), pdrazin(&pair.b, &tol)) else {
            continue;
        };
        let w = &(&(&pair.a * &ra.inverse) * &(&pair.a - &pair.b)) * &(&pair.b * &rb.inverse);
        let diff = &pair.a - &pair.b;
        let prod = &pair.a * &pair.b;
        if !all_well_posed(&[&pair.a, &pair.b, &diff, &prod, &w], &tol) {
            continue;
        }
        let left = series_well_posed(&(&pair.b * &ra.inverse), &rb.spectral_idempotent);
        let right_tail = &ra.spectral_idempotent * &rb.inverse;
        if left && series_well_posed(&(&rb.inverse * &pair.a), &right_tail) {
            return Ok(pair);
        }
    }
    Err(Error::InvalidSpec(format!(
        "no well-conditioned lambda pair found in {}",
        spec.context
    )))
}

// ---------------------------------------------------------------------------
// radical pairs

fn radical_raw(ctx: &AlgebraContext, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    match ctx {
        AlgebraContext::FullMatrix(n) => DMatrix::zeros(*n, *n),
        AlgebraContext::UpperTriangular(n) => DMatrix::from_fn(*n, *n, |i, j| {
            if j > i {
                gaussian(rng, 1.0)
            } else {
                c(0.0, 0.0)
            }
        }),
        AlgebraContext::TruncatedPolynomial(m) => {
            let v = rng.random_range(1..=*m);
            poly_with_valuation(*m, c(0.0, 0.0), Some(v), rng)
        }
        AlgebraContext::DirectSum(s) => {
            block_diagonal(&s.iter().map(|x| radical_raw(x, rng)).collect::<Vec<_>>())
        }
    }
}

/// `(a, b)` with `a` in the Jacobson radical (exactly, by pattern) and `b`
/// either a second radical element or an arbitrary element.
pub fn gen_radical_pair(spec: &RandomSpec) -> Result<(AlgebraElement, AlgebraElement)> {
    spec.validate()?;
    let ctx = Arc::new(spec.context.clone());
    let mut rng = spec.rng();
    let a = normalized(radical_raw(&spec.context, &mut rng));
    let b = if rng.random_bool(0.5) {
        radical_raw(&spec.context, &mut rng)
    } else {
        let idx = random_achievable(&spec.context, &mut rng);
        raw_with_index(&spec.context, idx, &mut rng)?.0
    };
    Ok((element(&ctx, &a), element(&ctx, &normalized(b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drazin::drazin_index;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn index_zero_is_invertible_and_full_index_is_nilpotent() {
        let spec = RandomSpec::new(3, AlgebraContext::FullMatrix(4));
        let a = gen_with_index(&spec).unwrap();
        assert_eq!(drazin_index(&a, &tol()), 0);
        let n = gen_with_index(&spec.clone().with_index(4)).unwrap();
        assert_eq!(drazin_index(&n, &tol()), 4);
        assert!(pdrazin(&n, &tol()).unwrap().inverse.norm() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = RandomSpec::new(11, AlgebraContext::UpperTriangular(5)).with_index(2);
        assert_eq!(
            gen_with_index(&spec).unwrap(),
            gen_with_index(&spec).unwrap()
        );
    }

    #[test]
    fn unreachable_index_is_rejected() {
        let spec = RandomSpec::new(1, AlgebraContext::TruncatedPolynomial(5)).with_index(4);
        assert!(matches!(gen_with_index(&spec), Err(Error::InvalidSpec(_))));
        let spec = RandomSpec::new(1, AlgebraContext::FullMatrix(3)).with_index(4);
        assert!(gen_with_index(&spec).is_err());
    }

    #[test]
    fn truncated_polynomial_indices() {
        assert_eq!(
            achievable_indices(&AlgebraContext::TruncatedPolynomial(5)),
            vec![0, 1, 2, 3, 5]
        );
        assert_eq!(
            achievable_indices(&AlgebraContext::TruncatedPolynomial(1)),
            vec![0, 1]
        );
    }

    #[test]
    fn polynomial_identity_coefficients_return_base() {
        let ctx = Arc::new(AlgebraContext::FullMatrix(3));
        let m = gen_with_index(&RandomSpec::new(2, (*ctx).clone()).with_index(2)).unwrap();
        let x = Polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let (a, b) = commuting_pair_from_polynomials(&m, &x, &x);
        assert!(a.relative_distance(&m) < 1e-15);
        assert_eq!(a, b);
    }

    #[test]
    fn commuting_pair_residual_is_tiny() {
        let spec = RandomSpec::new(7, AlgebraContext::FullMatrix(6)).with_index(2);
        let (a, b) = gen_commuting_pair(&spec).unwrap();
        assert!(a.commutation_residual(&b) <= 1e-12);
    }

    #[test]
    fn orthogonal_pair_is_exact() {
        let spec = RandomSpec::new(5, AlgebraContext::FullMatrix(6));
        let (a, b) = gen_orthogonal_pair(&spec).unwrap();
        assert_eq!((&a * &b).norm(), 0.0);
        assert_eq!((&b * &a).norm(), 0.0);
    }

    #[test]
    fn weighted_shift_and_weyl_pairs() {
        let (a, b) = weighted_shift_pair(c(2.0, 0.0), 2);
        assert_eq!(a, crate::linalg::real_matrix(&[&[2.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(b, crate::linalg::real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert_eq!(&a * &b, &b * &a * c(2.0, 0.0));
        let (a, b) = weyl_pair(c(-1.0, 0.0), 2);
        assert_eq!(a, crate::linalg::real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]]));
        assert_eq!(b, crate::linalg::real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert_eq!(&a * &b, -(&b * &a));
        assert_eq!(root_of_unity_order(c(0.0, 1.0), 8), Some(4));
        assert_eq!(root_of_unity_order(c(2.0, 0.0), 8), None);
    }

    #[test]
    fn lambda_pair_requires_lambda() {
        let spec = RandomSpec::new(0, AlgebraContext::FullMatrix(3));
        assert!(gen_lambda_pair(&spec).is_err());
        assert!(gen_lambda_pair(&spec.with_lambda(c(0.0, 0.0))).is_err());
    }

    #[test]
    fn radical_pair_first_element_in_radical() {
        let spec = RandomSpec::new(9, AlgebraContext::UpperTriangular(4));
        let (a, _) = gen_radical_pair(&spec).unwrap();
        assert_eq!(a.radical_distance(), 0.0);
    }
}
