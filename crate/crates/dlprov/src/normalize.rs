//! Rewriting GCIs into the six normal shapes.
//!
//! Complex subconcepts are named bottom-up: the innermost offending subterm
//! gets the smallest `_nfK` index, and its defining axiom `(Ĉ ⊑ _nfK, 1)` is
//! emitted before the axioms that use it.

use std::collections::HashSet;

use crate::model::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, RightSide};
use crate::semiring::Monomial;
use crate::textio::{parse_ontology_with, ParseError, ParseOptions};

struct Normalizer {
    next: usize,
    taken: HashSet<String>,
    out: AnnotatedOntology,
}

impl Normalizer {
    fn fresh(&mut self) -> ConceptName {
        loop {
            let n = format!("_nf{}", self.next);
            self.next += 1;
            if self.taken.insert(n.clone()) {
                return ConceptName::new(n);
            }
        }
    }

    fn emit(&mut self, lhs: Concept, rhs: RightSide, ann: Monomial) {
        self.out
            .push(AnnotatedAxiom::new(Axiom::Gci(lhs, rhs), ann));
    }

    /// A name (or ⊤) standing for `c`.
    fn atom(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Name(_) | Concept::Top => c.clone(),
            _ => {
                let lhs = self.lhs(c);
                let f = self.fresh();
                self.emit(lhs, RightSide::Name(f.clone()), Monomial::unit());
                Concept::Name(f)
            }
        }
    }

    /// A normal left-hand side equivalent to `c` given the emitted axioms.
    fn lhs(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Name(_) | Concept::Top | Concept::Bot => c.clone(),
            Concept::Exists(p, f) => Concept::exists(p.clone(), self.atom(f)),
            Concept::And(parts) => {
                let names: Vec<Concept> = parts.iter().map(|x| self.atom(x)).collect();
                let mut conj = Concept::and(names);
                loop {
                    match conj {
                        Concept::And(ref v) if v.len() > 2 => {
                            let (head, last) = v.split_at(v.len() - 1);
                            let first = self.atom(&Concept::And(head.to_vec()));
                            conj = Concept::and([first, last[0].clone()]);
                        }
                        _ => return conj,
                    }
                }
            }
        }
    }

    fn axiom(&mut self, a: &AnnotatedAxiom) {
        match &a.axiom {
            Axiom::Gci(lhs, rhs @ RightSide::ExistsTop(_)) => {
                let l = self.atom(lhs);
                self.emit(l, rhs.clone(), a.annotation.clone());
            }
            Axiom::Gci(lhs, rhs) => {
                let l = self.lhs(lhs);
                self.emit(l, rhs.clone(), a.annotation.clone());
            }
            _ => {
                self.out.push(a.clone());
            }
        }
    }
}

/// Exhaustive application of the three naming rules; the result satisfies
/// [`AnnotatedOntology::is_normal_form`]. Introduced axioms carry the unit.
pub fn normalize(o: &AnnotatedOntology) -> AnnotatedOntology {
    let mut n = Normalizer {
        next: 0,
        taken: o.vocabulary().all_names(),
        out: AnnotatedOntology::new(),
    };
    for a in o {
        if a.axiom.is_normal() {
            n.out.push(a.clone());
        } else {
            n.axiom(a);
        }
    }
    n.out
}

/// Parses text whose GCIs may have conjunctions or qualified existentials on
/// the right. `C ⊑ C1 ⊓ C2` is split keeping the annotation on both parts;
/// `C ⊑ ∃P.D` becomes `(C ⊑ ∃S, κ)`, `(S ⊑ P, 1)`, `(∃S⁻ ⊑ D, 1)` for fresh `S`.
pub fn desugar_rhs(text: &str) -> Result<AnnotatedOntology, ParseError> {
    parse_ontology_with(
        text,
        ParseOptions {
            desugar: true,
            allow_reserved: false,
        },
    )
}
