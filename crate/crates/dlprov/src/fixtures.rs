//! Small ontologies used by the examples, tests and documentation.

use crate::model::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, Individual, RightSide};
use crate::query::ConjunctiveQuery;
use crate::semiring::Valuation;
use crate::textio::{parse_ontology, parse_query, parse_query_in, parse_valuation};

pub const DIONYSUS: &str = include_str!("../fixtures/dionysus.onto");
pub const DIONYSUS_TROPICAL: &str = include_str!("../fixtures/dionysus_tropical.val");
pub const DIONYSUS_FUZZY: &str = include_str!("../fixtures/dionysus_fuzzy.val");
pub const DIONYSUS_QUERY: &str = include_str!("../fixtures/dionysus.cq");
pub const CYCLIC: &str = include_str!("../fixtures/cyclic.onto");
pub const IDEMPOTENT: &str = include_str!("../fixtures/idempotent.onto");
pub const UNSAT: &str = include_str!("../fixtures/unsat.onto");
pub const STANDARD_RULES: &str = include_str!("../fixtures/standard_rules.onto");
pub const STANDARD_RULES_QUERY: &str = include_str!("../fixtures/standard_rules.cq");

fn load(text: &str) -> AnnotatedOntology {
    parse_ontology(text).expect("bundled fixture parses")
}

/// Deities, parents and the inheritance of divinity.
pub fn dionysus() -> AnnotatedOntology {
    load(DIONYSUS)
}

pub fn dionysus_tropical() -> Valuation {
    parse_valuation(DIONYSUS_TROPICAL).expect("bundled valuation parses")
}

pub fn dionysus_fuzzy() -> Valuation {
    parse_valuation(DIONYSUS_FUZZY).expect("bundled valuation parses")
}

/// `q(x) :- Deity(x), parent(x,y)`.
pub fn dionysus_query() -> ConjunctiveQuery {
    parse_query(DIONYSUS_QUERY).expect("bundled query parses")
}

pub fn dionysus_individual() -> Individual {
    Individual::new("dionysus")
}

/// `A ⊑ B`, `B ⊑ A`.
pub fn cyclic() -> AnnotatedOntology {
    load(CYCLIC)
}

/// `A ⊑ B1`, `A ⊑ B2`, `B1 ⊓ B2 ⊑ C`.
pub fn idempotent() -> AnnotatedOntology {
    load(IDEMPOTENT)
}

/// `A(a)`, `A ⊑ B`, `A ⊓ B ⊑ ⊥`.
pub fn unsat() -> AnnotatedOntology {
    load(UNSAT)
}

/// Global ⊤-axioms next to an existential; see the `C(a)` regression.
pub fn standard_rules() -> AnnotatedOntology {
    load(STANDARD_RULES)
}

pub fn standard_rules_query() -> ConjunctiveQuery {
    let inds = standard_rules().vocabulary().individuals;
    parse_query_in(STANDARD_RULES_QUERY, &inds).expect("bundled query parses")
}

/// `A ⊑ A_i @ v_i`, `A_i ⊑ B @ u_i` for `1 ≤ i ≤ n`, and `B ⊑ A @ u`:
/// `B ⊑ A` has `2^n` derivations.
pub fn exponential(n: usize) -> AnnotatedOntology {
    let gci = |l: &str, r: &str| Axiom::Gci(Concept::name(l), RightSide::Name(r.into()));
    let mut o = AnnotatedOntology::new();
    for i in 1..=n {
        o.push(AnnotatedAxiom::var(
            gci("A", &format!("A{i}")),
            format!("v{i}").as_str(),
        ));
        o.push(AnnotatedAxiom::var(
            gci(&format!("A{i}"), "B"),
            format!("u{i}").as_str(),
        ));
    }
    o.push(AnnotatedAxiom::var(gci("B", "A"), "u"));
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(dionysus().len(), 9);
        assert_eq!(dionysus_fuzzy().len(), 9);
        assert_eq!(dionysus_tropical().len(), 9);
        assert_eq!(exponential(3).len(), 7);
        assert_eq!(unsat().len(), 3);
        assert_eq!(standard_rules().len(), 5);
        assert_eq!(standard_rules_query().atoms.len(), 1);
        assert_eq!(dionysus_query().answer_vars.len(), 1);
    }
}
