//! Random ontologies shared by the integration tests.
#![allow(dead_code)]

use dlprov::model::{check_profile, Profile};
use dlprov::model::{AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, RightSide, Role};
use dlprov::normalize::normalize;
use dlprov::saturate::is_satisfiable;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
pub const ROLES: [&str; 2] = ["R", "S"];
pub const INDS: [&str; 2] = ["a", "b"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn name(r: &mut StdRng) -> Concept {
    Concept::name(*CONCEPTS.choose(r).unwrap())
}

fn role(r: &mut StdRng) -> Role {
    let base = *ROLES.choose(r).unwrap();
    if r.gen_bool(0.3) {
        Role::inverse_of(base)
    } else {
        Role::new(base)
    }
}

fn rhs(r: &mut StdRng, bot: bool) -> RightSide {
    if bot && r.gen_bool(0.1) {
        RightSide::Bot
    } else {
        RightSide::Name((*CONCEPTS.choose(r).unwrap()).into())
    }
}

/// One normal-form axiom.
pub fn normal_axiom(r: &mut StdRng, bot: bool) -> Axiom {
    let ind = |r: &mut StdRng| INDS.choose(r).unwrap().to_string();
    match r.gen_range(0..10) {
        0 | 1 => Axiom::concept_assertion(*CONCEPTS.choose(r).unwrap(), ind(r).as_str()),
        2 => Axiom::role_assertion(*ROLES.choose(r).unwrap(), ind(r).as_str(), ind(r).as_str()),
        3 => {
            let lhs = if r.gen_bool(0.15) {
                Concept::Top
            } else {
                name(r)
            };
            Axiom::Gci(lhs, rhs(r, bot))
        }
        4 => Axiom::Gci(Concept::and([name(r), name(r)]), rhs(r, bot)),
        5 => {
            let lhs = if r.gen_bool(0.15) {
                Concept::Top
            } else {
                name(r)
            };
            Axiom::Gci(lhs, RightSide::ExistsTop(role(r)))
        }
        6 | 7 => {
            let filler = if r.gen_bool(0.2) {
                Concept::Top
            } else {
                name(r)
            };
            Axiom::Gci(Concept::exists(role(r), filler), rhs(r, bot))
        }
        8 => Axiom::Ri(role(r), role(r)),
        _ => {
            if bot && r.gen_bool(0.3) {
                Axiom::neg_ri(role(r), role(r))
            } else {
                Axiom::Gci(name(r), rhs(r, bot))
            }
        }
    }
}

fn annotate(axioms: Vec<Axiom>) -> AnnotatedOntology {
    let mut o = AnnotatedOntology::new();
    for a in axioms {
        let v = format!("x{}", o.len());
        o.push(AnnotatedAxiom::var(a, v.as_str()));
    }
    o
}

/// A normal-form ontology of at most `max` axioms, duplicates dropped.
pub fn normal_ontology(r: &mut StdRng, max: usize, bot: bool) -> AnnotatedOntology {
    let n = r.gen_range(1..=max);
    let mut axioms: Vec<Axiom> = Vec::new();
    for _ in 0..n {
        let a = normal_axiom(r, bot);
        if !axioms.contains(&a) {
            axioms.push(a);
        }
    }
    annotate(axioms)
}

/// A satisfiable normal-form ontology with at least one assertion.
pub fn satisfiable_ontology(r: &mut StdRng, max: usize) -> AnnotatedOntology {
    loop {
        let o = normal_ontology(r, max, true);
        if o.iter().any(|a| a.axiom.is_assertion()) && is_satisfiable(&o).unwrap() {
            return o;
        }
    }
}

/// A satisfiable ontology in the restricted profile with an assertion.
pub fn restricted_ontology(r: &mut StdRng, max: usize) -> AnnotatedOntology {
    loop {
        let o = normal_ontology(r, max, true);
        if check_profile(&o) == Profile::ELHIrestr
            && o.iter().any(|a| a.axiom.is_assertion())
            && is_satisfiable(&o).unwrap()
        {
            return o;
        }
    }
}

fn concept(r: &mut StdRng, depth: usize) -> Concept {
    if depth == 0 {
        return if r.gen_bool(0.1) {
            Concept::Top
        } else {
            name(r)
        };
    }
    match r.gen_range(0..3) {
        0 => name(r),
        1 => Concept::exists(role(r), concept(r, depth - 1)),
        _ => Concept::and([concept(r, depth - 1), concept(r, depth - 1)]),
    }
}

/// An ontology whose GCIs may have nested left-hand sides.
pub fn general_ontology(r: &mut StdRng, max: usize) -> AnnotatedOntology {
    let n = r.gen_range(2..=max);
    let mut axioms: Vec<Axiom> = vec![Axiom::Gci(concept(r, 3), rhs(r, false))];
    for _ in 1..n {
        let a = if r.gen_bool(0.4) {
            let rs = if r.gen_bool(0.2) {
                RightSide::ExistsTop(role(r))
            } else {
                rhs(r, false)
            };
            Axiom::Gci(concept(r, 2), rs)
        } else {
            normal_axiom(r, false)
        };
        if !axioms.contains(&a) {
            axioms.push(a);
        }
    }
    annotate(axioms)
}

/// Every assertion over the vocabulary of `o` that `o` entails classically.
pub fn entailed_assertions(o: &AnnotatedOntology) -> Vec<Axiom> {
    let on = normalize(o);
    let mut out: Vec<Axiom> = dlprov::saturate::classical_saturate(&on)
        .unwrap()
        .into_iter()
        .filter(|k| k.is_assertion())
        .filter_map(|k| k.to_axiom())
        .filter(|a| match a {
            Axiom::ConceptAssertion(Atomic::Name(n), _) => !n.as_str().starts_with('_'),
            Axiom::ConceptAssertion(..) => false,
            _ => true,
        })
        .collect();
    out.sort();
    out
}

/// Up to `k` entries of `v` picked at random.
pub fn sample<T: Clone>(r: &mut StdRng, v: &[T], k: usize) -> Vec<T> {
    v.choose_multiple(r, k.min(v.len())).cloned().collect()
}

/// A small connected query over the shared vocabulary with `arity` answer
/// variables.
pub fn query(r: &mut StdRng, arity: usize) -> dlprov::query::ConjunctiveQuery {
    use dlprov::query::{ConjunctiveQuery, QueryAtom, Term};
    use dlprov::Variable;
    let nvars = r.gen_range(1..=3usize).max(arity);
    let vars: Vec<Variable> = (0..nvars).map(|i| Variable::new(format!("v{i}"))).collect();
    let mut atoms = std::collections::BTreeSet::new();
    for i in 1..nvars {
        let j = r.gen_range(0..i);
        let (s, t) = if r.gen_bool(0.5) { (i, j) } else { (j, i) };
        atoms.insert(QueryAtom::Role(
            Role::new(*ROLES.choose(r).unwrap()),
            Term::Var(vars[s].clone()),
            Term::Var(vars[t].clone()),
        ));
    }
    for _ in 0..r.gen_range(0..=2) {
        let v = vars.choose(r).unwrap().clone();
        atoms.insert(QueryAtom::Concept(
            (*CONCEPTS.choose(r).unwrap()).into(),
            Term::Var(v),
        ));
    }
    if atoms.is_empty() {
        atoms.insert(QueryAtom::Concept(
            (*CONCEPTS.choose(r).unwrap()).into(),
            Term::Var(vars[0].clone()),
        ));
    }
    ConjunctiveQuery::new(vars[..arity].to_vec(), atoms)
}
