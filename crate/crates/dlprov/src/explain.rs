//! Justifications, lineage and fuzzy cuts.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::entail::{
    axiom_provenance, individuals_of, lhs_unsatisfiable, with_individuals, EntailError,
};
use crate::model::{check_profile, AnnotatedAxiom, AnnotatedOntology, Axiom, Individual, Profile};
use crate::normalize::normalize;
use crate::query::{cq_provenance, ConjunctiveQuery, QueryError};
use crate::saturate::{
    is_satisfiable, lin_saturate, DerivedAxiom, LinSaturation, Ruleset, SaturateError,
};
use crate::semiring::{
    flatten, minimize, Lineage, Monomial, Valuation, Value, Variable, WhyPolynomial,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExplainError {
    #[error("the ontology is unsatisfiable")]
    UnsatisfiableOntology,
    #[error("the left-hand side of `{0}` is unsatisfiable")]
    UnsatisfiableLhs(String),
    #[error("no value for variable `{0}`")]
    MissingValuation(Variable),
    #[error("value `{1}` of `{0}` is not a degree in [0, 1]")]
    NotADegree(Variable, Value),
    #[error(transparent)]
    Saturate(#[from] SaturateError),
    #[error(transparent)]
    Entail(#[from] EntailError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Something whose provenance can be asked for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Axiom(Axiom),
    /// A query together with an answer tuple.
    Query(ConjunctiveQuery, Vec<Individual>),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Axiom(a) => write!(f, "{a}"),
            Target::Query(q, t) => {
                write!(f, "{q} @ (")?;
                for (i, a) in t.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl From<Axiom> for Target {
    fn from(a: Axiom) -> Self {
        Target::Axiom(a)
    }
}

/// Why-provenance of a target. `Top` when the ontology is unsatisfiable.
pub fn why(o: &AnnotatedOntology, t: &Target) -> Result<WhyPolynomial, ExplainError> {
    Ok(match t {
        Target::Axiom(a) => axiom_provenance(o, a)?,
        Target::Query(q, tuple) => cq_provenance(o, q, tuple)?,
    })
}

fn require_satisfiable(on: &AnnotatedOntology) -> Result<(), ExplainError> {
    if is_satisfiable(on)? {
        Ok(())
    } else {
        Err(ExplainError::UnsatisfiableOntology)
    }
}

/// The axioms of `o` whose annotation variables all occur in `m`. Unit
/// annotated axioms are left out.
pub fn axioms_of(o: &AnnotatedOntology, m: &Monomial) -> BTreeSet<AnnotatedAxiom> {
    o.iter()
        .filter(|a| !a.annotation.is_unit() && a.annotation.is_subset(m))
        .cloned()
        .collect()
}

/// All minimal axiom sets entailing the target, with the axioms labelled by
/// `static_vars` taken for granted (left out of every set).
pub fn justifications(
    o: &AnnotatedOntology,
    t: &Target,
    static_vars: &BTreeSet<Variable>,
) -> Result<BTreeSet<BTreeSet<AnnotatedAxiom>>, ExplainError> {
    let on = normalize(o);
    require_satisfiable(&on)?;
    if let Target::Axiom(a @ (Axiom::Gci(..) | Axiom::Ri(..))) = t {
        if lhs_unsatisfiable(&on, a)? {
            return Err(ExplainError::UnsatisfiableLhs(a.to_string()));
        }
    }
    let p = why(o, t)?;
    let Some(ms) = p.monomials() else {
        // only a disjointness whose roles can never hold together
        return Err(ExplainError::UnsatisfiableLhs(t.to_string()));
    };
    let erased = WhyPolynomial::from_monomials(ms.iter().map(|m| m.erase(static_vars)));
    let min = minimize(&erased);
    Ok(min
        .monomials()
        .into_iter()
        .flatten()
        .map(|m| axioms_of(o, m))
        .collect())
}

fn restricted_if_possible(on: &AnnotatedOntology) -> Ruleset {
    if check_profile(on) == Profile::ELHIrestr {
        Ruleset::Restricted
    } else {
        Ruleset::Full
    }
}

/// Saturation where every entry keeps the union of the variables of all its
/// derivations.
pub fn linsat(o: &AnnotatedOntology) -> Result<LinSaturation, ExplainError> {
    let on = normalize(o);
    require_satisfiable(&on)?;
    Ok(lin_saturate(&on, restricted_if_possible(&on))?)
}

/// Variables of all axioms used in some derivation of `alpha`.
pub fn lineage(o: &AnnotatedOntology, alpha: &Axiom) -> Result<Lineage, ExplainError> {
    let on = normalize(o);
    require_satisfiable(&on)?;
    if alpha.is_assertion() {
        let on = with_individuals(&on, &individuals_of(alpha));
        let lin = lin_saturate(&on, restricted_if_possible(&on))?;
        let key = DerivedAxiom::from_axiom(alpha).expect("assertions are normal");
        return Ok(match lin.get(&key) {
            Some(m) => Lineage::Vars(m.vars().clone()),
            None => Lineage::Zero,
        });
    }
    Ok(flatten(&axiom_provenance(&on, alpha)?))
}

pub fn is_relevant(
    o: &AnnotatedOntology,
    alpha: &Axiom,
    v: &Variable,
) -> Result<bool, ExplainError> {
    Ok(lineage(o, alpha)?.contains(v))
}

/// Fuzzy degree of an annotation: the minimum over its variables.
fn degree(m: &Monomial, val: &Valuation) -> Result<f64, ExplainError> {
    let mut d = 1.0f64;
    for v in m.vars() {
        let value = val
            .get(v)
            .ok_or_else(|| ExplainError::MissingValuation(v.clone()))?;
        match value.as_real() {
            Some(x) if (0.0..=1.0).contains(&x) => d = d.min(x),
            _ => return Err(ExplainError::NotADegree(v.clone(), *value)),
        }
    }
    Ok(d)
}

/// The axioms whose degree under `val` is at least `n`.
pub fn ncut(
    o: &AnnotatedOntology,
    n: f64,
    val: &Valuation,
) -> Result<AnnotatedOntology, ExplainError> {
    let mut out = AnnotatedOntology::new();
    for a in o {
        if degree(&a.annotation, val)? >= n {
            out.push(a.clone());
        }
    }
    Ok(out)
}
