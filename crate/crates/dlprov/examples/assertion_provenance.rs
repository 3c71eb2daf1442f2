//! Why-provenance of an assertion and its value in two semirings.

use dlprov::semiring::{builtin_semiring, evaluate};
use dlprov::{entail, fixtures, Axiom};

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let alpha = Axiom::concept_assertion("Deity", "dionysus");
    let p = entail::axiom_provenance(&o, &alpha).expect("fixture is satisfiable");
    let cost = evaluate(
        &p,
        &builtin_semiring("tropical").unwrap(),
        &fixtures::dionysus_tropical(),
    )
    .unwrap();
    let trust = evaluate(
        &p,
        &builtin_semiring("fuzzy").unwrap(),
        &fixtures::dionysus_fuzzy(),
    )
    .unwrap();
    format!("{alpha}\n  why:      {p}\n  tropical: {cost}\n  fuzzy:    {trust}\n")
}

fn main() {
    print!("{}", run_example());
}
