//! Fuzzy degrees: an answer has degree at least n exactly when the axioms of
//! degree at least n entail it classically.

use dlprov::explain::{ncut, why, Target};
use dlprov::oracle::brute_classical_entails;
use dlprov::semiring::{builtin_semiring, evaluate};
use dlprov::{fixtures, Axiom};

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let val = fixtures::dionysus_fuzzy();
    let fuzzy = builtin_semiring("fuzzy").unwrap();
    let t = Target::Axiom(Axiom::concept_assertion("Deity", "dionysus"));
    let degree = evaluate(&why(&o, &t).unwrap(), &fuzzy, &val).unwrap();
    let mut out = format!("degree of {t}: {degree}\n");
    for n in [0.5, 0.9, 0.95] {
        let cut = ncut(&o, n, &val).unwrap();
        let entailed = brute_classical_entails(&cut, &t).unwrap();
        out += &format!("  cut at {n}: {} axioms, entails: {entailed}\n", cut.len());
    }
    out
}

fn main() {
    print!("{}", run_example());
}
