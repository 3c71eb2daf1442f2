//! Provenance for annotated ELHI⊥ ontologies.
//!
//! Every axiom of an ontology carries a variable; the library computes, for
//! an entailed axiom or an answer to a conjunctive query, the set of variable
//! sets (a Why[X] polynomial) of axiom combinations that derive it, and
//! evaluates that polynomial in concrete semirings such as fuzzy degrees,
//! costs or access levels.
//!
//! ```
//! use dlprov::{entail, fixtures, model::Axiom};
//!
//! let o = fixtures::dionysus();
//! let p = entail::axiom_provenance(&o, &Axiom::concept_assertion("Deity", "dionysus")).unwrap();
//! assert_eq!(p.to_string(), "x1 + x3*x4*y1*y2 + x5*x6*y1*y3");
//! ```

pub mod cli;
pub mod entail;
pub mod explain;
pub mod fixtures;
pub mod model;
pub mod names;
pub mod normalize;
pub mod oracle;
pub mod query;
pub mod saturate;
pub mod semiring;
pub mod textio;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] textio::ParseError),
    #[error(transparent)]
    Semiring(#[from] semiring::SemiringError),
    #[error(transparent)]
    Saturate(#[from] saturate::SaturateError),
    #[error(transparent)]
    Entail(#[from] entail::EntailError),
    #[error(transparent)]
    Query(#[from] query::QueryError),
    #[error(transparent)]
    Explain(#[from] explain::ExplainError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
}

pub use model::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, Individual, Role};
pub use semiring::{Monomial, Valuation, Value, Variable, WhyPolynomial};
