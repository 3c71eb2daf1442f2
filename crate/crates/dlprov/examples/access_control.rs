//! Access levels: the clearance needed to see a consequence is the lowest
//! over derivations of the highest level among the axioms used.

use dlprov::semiring::{builtin_semiring, evaluate};
use dlprov::textio::parse_valuation;
use dlprov::{entail, fixtures, Axiom};

const LEVELS: &str = "\
x1 = T
x2 = P
x3 = C
x4 = P
x5 = S
x6 = P
y1 = P
y2 = P
y3 = P
";

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let access = builtin_semiring("access").unwrap();
    let val = parse_valuation(LEVELS).unwrap();
    let mut out = String::new();
    for (c, a) in [
        ("Deity", "dionysus"),
        ("Deity", "zeus"),
        ("Deity", "semele"),
    ] {
        let alpha = Axiom::concept_assertion(c, a);
        let p = entail::axiom_provenance(&o, &alpha).unwrap();
        out += &format!("{alpha}: {}\n", evaluate(&p, &access, &val).unwrap());
    }
    out
}

fn main() {
    print!("{}", run_example());
}
