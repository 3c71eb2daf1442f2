//! Annotated entailment and Why-provenance of arbitrary axioms.
//!
//! Assertions are read off the saturation. GCIs and role inclusions are
//! reduced to assertions over fresh individuals, with fresh variables on the
//! introduced assertions that are divided out afterwards.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::model::{
    check_profile, AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, ConceptName,
    Individual, Profile, RightSide,
};
use crate::normalize::normalize;
use crate::saturate::{
    classical_saturate, is_satisfiable, saturate, saturate_k, DerivedAxiom, SaturateError,
};
use crate::semiring::{Monomial, Variable, WhyPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EntailError {
    #[error(transparent)]
    Saturate(#[from] SaturateError),
    #[error("`{0}` is not an assertion")]
    NotAnAssertion(String),
    #[error("`{0}` cannot be reduced to an assertion")]
    UnsupportedAxiom(String),
}

/// `o` plus `⊤(a) @ 1` for each individual in `inds` that `o` does not
/// mention, so that what holds of every element also reaches them.
pub fn with_individuals<'a>(
    o: &AnnotatedOntology,
    inds: impl IntoIterator<Item = &'a Individual>,
) -> AnnotatedOntology {
    let known = o.vocabulary().individuals;
    let mut out = o.clone();
    for a in inds {
        if !known.contains(a) {
            out.push(AnnotatedAxiom::unit(Axiom::ConceptAssertion(
                Atomic::Top,
                a.clone(),
            )));
        }
    }
    out
}

pub(crate) fn individuals_of(alpha: &Axiom) -> Vec<Individual> {
    match alpha {
        Axiom::ConceptAssertion(_, a) => vec![a.clone()],
        Axiom::RoleAssertion(_, a, b) => vec![a.clone(), b.clone()],
        _ => Vec::new(),
    }
}

/// Provenance of an assertion in a normal-form ontology.
pub fn assertion_provenance(
    o: &AnnotatedOntology,
    alpha: &Axiom,
) -> Result<WhyPolynomial, EntailError> {
    if !alpha.is_assertion() {
        return Err(EntailError::NotAnAssertion(alpha.to_string()));
    }
    if !is_satisfiable(o)? {
        return Ok(WhyPolynomial::Top);
    }
    let sat = saturate(&with_individuals(o, &individuals_of(alpha)))?;
    let key = DerivedAxiom::from_axiom(alpha).expect("assertions are normal");
    Ok(WhyPolynomial::from_monomials(
        sat.get(&key).into_iter().flatten().cloned(),
    ))
}

/// An assertion-entailment problem equivalent to a GCI or RI one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub ontology: AnnotatedOntology,
    pub target: Axiom,
    pub fresh_vars: BTreeSet<Variable>,
    pub carrier: Monomial,
}

struct Fresh {
    taken: HashSet<String>,
    vars: usize,
    inds: usize,
}

impl Fresh {
    fn new(o: &AnnotatedOntology) -> Self {
        let v = o.vocabulary();
        let mut taken = v.all_names();
        taken.extend(v.variables.iter().map(|x| x.to_string()));
        Fresh {
            taken,
            vars: 0,
            inds: 0,
        }
    }

    fn pick(&mut self, stem: &str, counter: usize) -> (String, usize) {
        let mut i = counter;
        loop {
            let n = format!("{stem}{i}");
            i += 1;
            if self.taken.insert(n.clone()) {
                return (n, i);
            }
        }
    }

    fn var(&mut self) -> Variable {
        let (n, next) = self.pick("_v", self.vars);
        self.vars = next;
        Variable::new(n)
    }

    fn ind(&mut self, stem: &str) -> Individual {
        let (n, next) = self.pick(stem, self.inds);
        self.inds = next;
        Individual::new(n)
    }

    fn concept(&mut self, stem: &str) -> ConceptName {
        if self.taken.insert(stem.to_string()) {
            return ConceptName::new(stem);
        }
        ConceptName::new(self.pick(stem, 0).0)
    }
}

/// Assertions describing an instance `a` of `c`; every introduced assertion
/// gets its own fresh variable.
fn instance_of(
    c: &Concept,
    a: &Individual,
    fresh: &mut Fresh,
    out: &mut Vec<AnnotatedAxiom>,
    vars: &mut Vec<Variable>,
) {
    match c {
        Concept::Top => {}
        Concept::Bot => unreachable!("unsatisfiable left sides are handled before"),
        Concept::Name(n) => {
            let v = fresh.var();
            out.push(AnnotatedAxiom::var(
                Axiom::ConceptAssertion(Atomic::Name(n.clone()), a.clone()),
                v.clone(),
            ));
            vars.push(v);
        }
        Concept::Exists(p, f) => {
            let v = fresh.var();
            let b = fresh.ind("_b");
            out.push(AnnotatedAxiom::var(
                Axiom::role_fact(p, a.clone(), b.clone()),
                v.clone(),
            ));
            vars.push(v);
            instance_of(f, &b, fresh, out, vars);
        }
        Concept::And(parts) => {
            for p in parts {
                instance_of(p, a, fresh, out, vars);
            }
        }
    }
}

/// The reduction of a GCI or a positive RI to an assertion.
pub fn reduce_to_assertion(o: &AnnotatedOntology, alpha: &Axiom) -> Result<Reduction, EntailError> {
    let mut fresh = Fresh::new(o);
    let mut ontology = o.clone();
    match alpha {
        Axiom::Gci(lhs, rhs) => {
            if lhs.contains_bot() {
                return Err(EntailError::UnsupportedAxiom(alpha.to_string()));
            }
            let a0 = fresh.ind("_a");
            let target = match rhs {
                RightSide::Bot => Axiom::ConceptAssertion(Atomic::Bot, a0.clone()),
                _ => {
                    let e = fresh.concept("_nfE");
                    ontology.push(AnnotatedAxiom::unit(Axiom::Gci(
                        rhs.to_concept(),
                        RightSide::Name(e.clone()),
                    )));
                    Axiom::ConceptAssertion(Atomic::Name(e), a0.clone())
                }
            };
            let mut extra = Vec::new();
            let mut vars = Vec::new();
            instance_of(lhs, &a0, &mut fresh, &mut extra, &mut vars);
            if extra.is_empty() {
                ontology.push(AnnotatedAxiom::unit(Axiom::ConceptAssertion(
                    Atomic::Top,
                    a0,
                )));
            }
            ontology.extend(extra);
            Ok(Reduction {
                ontology,
                target,
                carrier: Monomial::from_vars(vars.iter().cloned()),
                fresh_vars: vars.into_iter().collect(),
            })
        }
        Axiom::Ri(p1, p2) => {
            let a0 = fresh.ind("_a");
            let b0 = fresh.ind("_b");
            ontology.push(AnnotatedAxiom::unit(Axiom::role_fact(
                p1,
                a0.clone(),
                b0.clone(),
            )));
            Ok(Reduction {
                ontology,
                target: Axiom::role_fact(p2, a0, b0),
                fresh_vars: BTreeSet::new(),
                carrier: Monomial::unit(),
            })
        }
        _ => Err(EntailError::UnsupportedAxiom(alpha.to_string())),
    }
}

/// The ontology with the left side of a GCI or RI instantiated at fresh
/// individuals under unit annotations; unsatisfiable iff the left side is.
fn lhs_instance(o: &AnnotatedOntology, alpha: &Axiom) -> AnnotatedOntology {
    let mut fresh = Fresh::new(o);
    let mut ext = o.clone();
    let a0 = fresh.ind("_a");
    match alpha {
        Axiom::Gci(lhs, _) => {
            let mut extra = Vec::new();
            instance_of(lhs, &a0, &mut fresh, &mut extra, &mut Vec::new());
            ext.push(AnnotatedAxiom::unit(Axiom::ConceptAssertion(
                Atomic::Top,
                a0,
            )));
            ext.extend(extra.into_iter().map(|a| AnnotatedAxiom::unit(a.axiom)));
        }
        Axiom::Ri(p, _) => {
            let b0 = fresh.ind("_b");
            ext.push(AnnotatedAxiom::unit(Axiom::role_fact(p, a0, b0)));
        }
        _ => {}
    }
    normalize(&ext)
}

/// Whether the left side of a GCI or RI is unsatisfiable w.r.t. `o`.
pub fn lhs_unsatisfiable(o: &AnnotatedOntology, alpha: &Axiom) -> Result<bool, EntailError> {
    if let Axiom::Gci(lhs, _) = alpha {
        if lhs.contains_bot() {
            return Ok(true);
        }
    }
    Ok(!is_satisfiable(&lhs_instance(&normalize(o), alpha))?)
}

/// Why-provenance of any axiom. Normalizes internally.
pub fn axiom_provenance(
    o: &AnnotatedOntology,
    alpha: &Axiom,
) -> Result<WhyPolynomial, EntailError> {
    let on = normalize(o);
    if !is_satisfiable(&on)? {
        return Ok(WhyPolynomial::Top);
    }
    match alpha {
        Axiom::ConceptAssertion(..) | Axiom::RoleAssertion(..) => assertion_provenance(&on, alpha),
        Axiom::NegRi(p, q) => {
            let mut fresh = Fresh::new(&on);
            let (a, b) = (fresh.ind("_a"), fresh.ind("_b"));
            let mut ext = on.clone();
            ext.push(AnnotatedAxiom::unit(Axiom::role_fact(
                p,
                a.clone(),
                b.clone(),
            )));
            ext.push(AnnotatedAxiom::unit(Axiom::role_fact(q, a, b)));
            Ok(if is_satisfiable(&ext)? {
                WhyPolynomial::zero()
            } else {
                WhyPolynomial::Top
            })
        }
        Axiom::Gci(..) | Axiom::Ri(..) => {
            if lhs_unsatisfiable(&on, alpha)? {
                return Ok(WhyPolynomial::Top);
            }
            if matches!(alpha, Axiom::Gci(_, RightSide::Bot)) {
                return Ok(WhyPolynomial::zero());
            }
            let red = reduce_to_assertion(&on, alpha)?;
            let ext = normalize(&red.ontology);
            let sat = saturate(&ext)?;
            let key = DerivedAxiom::from_axiom(&red.target).expect("assertion");
            let vars = on.variables();
            let ms = sat
                .get(&key)
                .into_iter()
                .flatten()
                .filter(|m| red.carrier.is_subset(m))
                .map(|m| m.erase(&red.fresh_vars))
                .filter(|m| m.vars().is_subset(&vars));
            Ok(WhyPolynomial::from_monomials(ms))
        }
    }
}

/// Whether `(alpha, m)` is entailed, i.e. `m` is a monomial of the provenance.
pub fn entails_annotated(
    o: &AnnotatedOntology,
    alpha: &Axiom,
    m: &Monomial,
) -> Result<bool, EntailError> {
    let on = normalize(o);
    if alpha.is_assertion() && check_profile(&on) == Profile::ELHIrestr {
        if !is_satisfiable(&on)? {
            return Ok(true);
        }
        let sat = saturate_k(&with_individuals(&on, &individuals_of(alpha)), m.len())?;
        let key = DerivedAxiom::from_axiom(alpha).expect("assertion");
        return Ok(sat.contains(&key, m));
    }
    Ok(axiom_provenance(o, alpha)?.contains(m))
}

/// Classical entailment, ignoring annotations.
pub fn entails(o: &AnnotatedOntology, alpha: &Axiom) -> Result<bool, EntailError> {
    let on = normalize(o);
    if !is_satisfiable(&on)? {
        return Ok(true);
    }
    match alpha {
        Axiom::ConceptAssertion(..) | Axiom::RoleAssertion(..) => {
            let key = DerivedAxiom::from_axiom(alpha).expect("assertion");
            Ok(classical_saturate(&with_individuals(&on, &individuals_of(alpha)))?.contains(&key))
        }
        _ => Ok(!axiom_provenance(&on, alpha)?.is_zero()),
    }
}
