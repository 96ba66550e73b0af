//! Randomised mod-k PBESs: the reduced pipeline, the explicit oracle and a
//! direct fixpoint evaluation over the finite domain must agree.

mod common;

use common::{domain, random_mod_pbes, session, solve_finite};
use epbes_core::explicit::{self, Bounds, ExplicitVerdict};
use epbes_core::game::{Analysis, Verdict};
use epbes_core::normal::to_clause_form;
use epbes_core::parse::parse_pbes;
use epbes_core::Signature;

#[test]
fn generator_stays_in_the_domain() {
    for seed in 0..200 {
        let (text, k) = random_mod_pbes(seed);
        let p = parse_pbes(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        // Panics if a call leaves 0..k.
        solve_finite(&p, k);
    }
}

#[test]
fn explicit_oracle_matches_finite_semantics() {
    for seed in 0..60 {
        let (text, k) = random_mod_pbes(seed);
        let p = parse_pbes(&text).unwrap();
        let c = to_clause_form(&p).unwrap();
        let truth = solve_finite(&p, k);
        let bounds = Bounds { value_cap: k, witness_cap: k, vertex_cap: 10_000 };
        for (i, eq) in p.equations.iter().enumerate() {
            for t in domain(eq.params.len(), k) {
                let sig = Signature::nat(&eq.name, &t);
                let (v, g) = explicit::solve(&c, &sig, bounds).unwrap();
                assert!(g.closed, "seed {seed}: {sig} did not close");
                let expected = if truth.holds(i, &t) { ExplicitVerdict::True } else { ExplicitVerdict::False };
                assert_eq!(v, expected, "seed {seed}: {sig}\n{text}");
            }
        }
    }
}

#[test]
fn reduced_pipeline_matches_finite_semantics() {
    let mut solver = session();
    for seed in 0..8 {
        let (text, k) = random_mod_pbes(seed);
        let p = parse_pbes(&text).unwrap();
        let truth = solve_finite(&p, k);
        let a = Analysis::run(&p, 40, &mut solver).unwrap();
        assert!(a.saturation.is_saturated(), "seed {seed} diverged\n{text}");
        for (i, eq) in p.equations.iter().enumerate() {
            for t in domain(eq.params.len(), k) {
                let sig = Signature::nat(&eq.name, &t);
                let expected = if truth.holds(i, &t) { Verdict::True } else { Verdict::False };
                assert_eq!(a.membership(&sig, &mut solver).unwrap(), expected, "seed {seed}: {sig}\n{text}");
            }
        }
    }
}
