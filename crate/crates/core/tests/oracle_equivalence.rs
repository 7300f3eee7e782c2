//! Every identity against the oracle: 200 seeded instances per identity,
//! context kind, dimension 2..8 and (for λ-identities) each λ.

use std::thread;

use pdrazin_core::generators::RandomSpec;
use pdrazin_core::{generate, verify, AlgebraContext, Complex64, ContextKind, Identity};

const PER_CELL: u64 = 200;

const KINDS: [ContextKind; 4] = [
    ContextKind::FullMatrix,
    ContextKind::UpperTriangular,
    ContextKind::TruncatedPolynomial,
    ContextKind::DirectSum,
];

const LAMBDAS: [(f64, f64); 5] = [(2.0, 0.0), (0.5, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.3, 0.4)];

fn failures(id: Identity) -> Vec<String> {
    let lambdas: Vec<Option<Complex64>> = if id.needs_lambda() {
        LAMBDAS
            .iter()
            .map(|&(re, im)| Some(Complex64::new(re, im)))
            .collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for kind in KINDS {
        for n in 2..=8 {
            let ctx = AlgebraContext::of_kind(kind, n).unwrap();
            for lambda in &lambdas {
                for s in 0..PER_CELL {
                    let mut spec = RandomSpec::new(s * 1000 + n as u64, ctx.clone())
                        .with_index(s as usize % (n + 1));
                    if let Some(l) = lambda {
                        spec = spec.with_lambda(*l);
                    }
                    let outcome = generate(id, &spec).and_then(|inst| verify(id, &inst));
                    match outcome {
                        Ok(r) if r.pass => {}
                        Ok(r) => out.push(format!(
                            "{id} {ctx} seed {} λ {lambda:?}: formula {:?} axioms {:?} claims {:?}",
                            spec.seed, r.formula_residuals, r.axiom_residuals, r.claims
                        )),
                        Err(e) => {
                            out.push(format!("{id} {ctx} seed {} λ {lambda:?}: {e}", spec.seed))
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn every_identity_matches_the_oracle() {
    let all: Vec<String> = thread::scope(|scope| {
        let handles: Vec<_> = Identity::ALL
            .iter()
            .map(|&id| scope.spawn(move || failures(id)))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });
    assert!(
        all.is_empty(),
        "{} failures:\n{}",
        all.len(),
        all.join("\n")
    );
}
