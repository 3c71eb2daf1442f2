//! Lineage: which axioms take part in some derivation, computed without
//! enumerating the derivations.

use dlprov::explain::{is_relevant, lineage};
use dlprov::textio::parse_ontology;
use dlprov::{Axiom, Variable};

const ONTO: &str = "\
Employee(carla) @ e1
Employee <= Person @ e2
Manager <= Employee @ e3
Person <= Agent @ e4
Robot <= Agent @ e5
";

pub fn run_example() -> String {
    let o = parse_ontology(ONTO).unwrap();
    let alpha = Axiom::concept_assertion("Agent", "carla");
    let lin = lineage(&o, &alpha).unwrap();
    let mut out = format!("lineage of {alpha}: {lin}\n");
    for v in ["e1", "e3", "e5"] {
        let r = is_relevant(&o, &alpha, &Variable::new(v)).unwrap();
        out += &format!("  {v} relevant: {r}\n");
    }
    out
}

fn main() {
    print!("{}", run_example());
}
