//! An unsatisfiable ontology entails everything; its provenance is TOP.

use dlprov::saturate::unsat_witness;
use dlprov::semiring::{builtin_semiring, evaluate, Valuation};
use dlprov::{entail, fixtures, Axiom};

pub fn run_example() -> String {
    let o = fixtures::unsat();
    let witness = unsat_witness(&o).unwrap();
    let p = entail::axiom_provenance(&o, &Axiom::concept_assertion("B", "a")).unwrap();
    let mut out = format!("witness: {witness:?}\nB(a): {p}\n");
    for s in ["fuzzy", "tropical", "viterbi"] {
        let v = evaluate(&p, &builtin_semiring(s).unwrap(), &Valuation::new()).unwrap();
        out += &format!("  {s}: {v}\n");
    }
    out
}

fn main() {
    print!("{}", run_example());
}
