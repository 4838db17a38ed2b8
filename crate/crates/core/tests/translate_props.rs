mod common;

use std::time::Duration;

use alciota::semantics::models_ontology;
use alciota::syntax::{Inclusion, Ontology};
use alciota::tableau::{prove, verify_model, ProverConfig, Verdict};
use alciota::translate::{
    counter_concept, internalize_tbox, local_to_global_exp, local_to_global_poly_with, standard_translation,
    Internalization, TranslateError, Var,
};
use alciota::Concept;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ATOMS: &[&str] = &["A", "B", "C"];
const ROLES: &[&str] = &["r", "s"];

fn cfg() -> ProverConfig {
    ProverConfig { timeout: Some(Duration::from_secs(30)), ..ProverConfig::default() }
}

#[test]
fn exponential_translation_preserves_extensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..600 {
        let c = common::random_concept(&mut rng, 4, ATOMS, ROLES, common::ALCIL);
        let out = local_to_global_exp(&c).unwrap();
        assert!(!out.concept.has_local_dd());
        let n = rng.gen_range(1..=6);
        let i = common::random_interpretation(&mut rng, n, ATOMS, ROLES, 0.3);
        assert_eq!(i.eval(&c), i.eval(&out.concept), "{c} vs {}", out.concept);
    }
}

#[test]
fn exponential_translation_rejects_global_input() {
    let c = Concept::global(Concept::atom("A"), Concept::Top);
    assert_eq!(local_to_global_exp(&c).unwrap_err(), TranslateError::ContainsGlobal);
}

#[test]
fn polynomial_translation_preserves_satisfiability() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut sat, mut unsat) = (0, 0);
    for k in 0..150 {
        let mut c = common::random_concept(&mut rng, 4, ATOMS, ROLES, common::ALCIL);
        if k % 3 == 0 {
            // two distinct A-elements cannot both be the unique one
            c = Concept::and(
                c,
                Concept::and(
                    Concept::local(Concept::atom("A")),
                    Concept::exists(
                        "r",
                        Concept::and(
                            Concept::local(Concept::atom("A")),
                            Concept::not(Concept::exists("r", Concept::Top)),
                        ),
                    ),
                ),
            );
            c = Concept::and(c, Concept::exists("r", Concept::Top));
        }
        let (t, o, fresh) = local_to_global_poly_with(&c, &Ontology::default()).unwrap();
        assert!(!t.has_local_dd() && o.tbox.iter().all(|ax| !ax.lhs.has_local_dd() && !ax.rhs.has_local_dd()));
        assert!(fresh.iter().all(|f| !c.atoms().contains(f)));
        let before = prove(&c, None, &cfg()).unwrap();
        let after = prove(&t, Some(&o), &cfg()).unwrap();
        assert_eq!(before.verdict, after.verdict, "{c} became {t} with {o}");
        if after.verdict == Verdict::Sat {
            let m = after.model.as_ref().unwrap();
            assert!(models_ontology(m, &o).unwrap());
            // the original concept holds at the same point of the translated model
            assert!(m.eval(&c).contains(after.root_element.unwrap()), "{c}");
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 10 && unsat > 10, "sat {sat} unsat {unsat}");
}

#[test]
fn polynomial_translation_shares_names() {
    let body = Concept::atom("A");
    let c = Concept::and(Concept::local(body.clone()), Concept::exists("r", Concept::local(body)));
    let (_, o, fresh) = local_to_global_poly_with(&c, &Ontology::default()).unwrap();
    assert_eq!(fresh.len(), 1);
    assert_eq!(o.tbox.len(), 2);
}

fn random_alc_tbox<R: Rng>(rng: &mut R) -> Vec<Inclusion> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            Inclusion::new(
                common::random_concept(rng, 2, ATOMS, ROLES, common::ALC),
                common::random_concept(rng, 2, ATOMS, ROLES, common::ALC),
            )
        })
        .collect()
}

fn check_internalization(target: Internalization, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..120 {
        let c = common::random_concept(&mut rng, 3, ATOMS, ROLES, common::ALC);
        let tbox = random_alc_tbox(&mut rng);
        let out = internalize_tbox(&c, &tbox, target).unwrap();
        assert_eq!(out.fresh_names.len(), tbox.len());
        let o = Ontology::new(tbox.clone(), vec![]);
        let reference = prove(&c, Some(&o), &cfg()).unwrap();
        let r = prove(&out.concept, None, &cfg()).unwrap();
        assert_eq!(reference.verdict, r.verdict, "{c} under {o}");
        if r.verdict == Verdict::Sat {
            assert!(verify_model(&out.concept, None, &r));
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 10 && unsat > 10, "sat {sat} unsat {unsat}");
}

#[test]
fn local_internalization_matches_tbox_reasoning() {
    check_internalization(Internalization::Local, 13);
}

#[test]
fn global_internalization_matches_tbox_reasoning() {
    check_internalization(Internalization::Global, 14);
}

#[test]
fn internalization_needs_alc_input() {
    let c = Concept::local(Concept::atom("A"));
    assert_eq!(internalize_tbox(&c, &[], Internalization::Local).unwrap_err(), TranslateError::NotAlc);
}

#[test]
fn fresh_names_avoid_the_signature() {
    let c = Concept::atom("Ax__0");
    let tbox = vec![Inclusion::new(Concept::atom("Ax__1"), Concept::atom("B"))];
    let out = internalize_tbox(&c, &tbox, Internalization::Local).unwrap();
    assert_eq!(out.fresh_names, vec!["Ax__2".to_string()]);
}

#[test]
fn standard_translation_agrees_with_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for k in 0..500 {
        let c = common::random_concept(&mut rng, 3, ATOMS, ROLES, common::ALCI);
        let n = rng.gen_range(1..=4);
        let i = common::random_interpretation(&mut rng, n, ATOMS, ROLES, 0.35);
        let var = if k % 2 == 0 { Var::X } else { Var::Y };
        let text = standard_translation(&c, var);
        let f = common::fo::parse(&text);
        let ext = i.eval(&c);
        for d in 0..n {
            let mut env = [0usize; 2];
            env[var as usize] = d;
            assert_eq!(common::fo::eval(&i, &f, &mut env), ext.contains(d), "{c} at {d}: {text}");
        }
    }
}

#[test]
fn standard_translation_shapes() {
    assert_eq!(standard_translation(&Concept::atom("A"), Var::X), "A(x)");
    assert_eq!(standard_translation(&Concept::local(Concept::atom("A")), Var::X), "A(x) & forall y (A(y) -> x = y)");
    assert_eq!(standard_translation(&Concept::exists("r", Concept::atom("A")), Var::X), "exists y (r(x,y) & A(y))");
}

#[test]
fn counter_models_contain_long_paths() {
    for n in 1..=3 {
        let c = counter_concept(n).unwrap();
        let r = prove(&c, None, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        assert!(verify_model(&c, None, &r));
        let path = common::longest_simple_path(r.model.as_ref().unwrap(), "r");
        assert!(path >= 1 << n, "n={n}: longest path {path}");
    }
    assert_eq!(counter_concept(0).unwrap_err(), TranslateError::ZeroWidth);
}
