//! Cross-checking computed justifications with the subset-enumerating
//! reasoner.

use std::collections::BTreeSet;

use dlprov::explain::{justifications, Target};
use dlprov::oracle::brute_justifications;
use dlprov::{fixtures, Axiom};

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let mut out = String::new();
    let targets = [
        Target::Axiom(Axiom::concept_assertion("Deity", "dionysus")),
        Target::Axiom(Axiom::role_assertion("parent", "dionysus", "zeus")),
        Target::Query(
            fixtures::dionysus_query(),
            vec![fixtures::dionysus_individual()],
        ),
    ];
    for t in targets {
        let fast = justifications(&o, &t, &BTreeSet::new()).unwrap();
        let slow = brute_justifications(&o, &t).unwrap();
        let verdict = if fast == slow { "agree" } else { "DISAGREE" };
        out += &format!("{t}: {} justifications, {verdict}\n", fast.len());
    }
    out
}

fn main() {
    print!("{}", run_example());
}
