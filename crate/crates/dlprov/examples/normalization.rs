//! Normal form: nested concepts get fresh names annotated with the unit,
//! so provenance over the original names is unchanged.

use dlprov::entail::axiom_provenance;
use dlprov::normalize::normalize;
use dlprov::textio::{parse_ontology, render_ontology};
use dlprov::Axiom;

const ONTO: &str = "\
exists hasChild . (Doctor and exists worksAt . Hospital) <= ProudParent @ x1
Surgeon <= Doctor @ x2
hasChild(ann, bob) @ x3
Surgeon(bob) @ x4
worksAt(bob, stmary) @ x5
Hospital(stmary) @ x6
";

pub fn run_example() -> String {
    let o = parse_ontology(ONTO).unwrap();
    let n = normalize(&o);
    let alpha = Axiom::concept_assertion("ProudParent", "ann");
    let before = axiom_provenance(&o, &alpha).unwrap();
    let after = axiom_provenance(&n, &alpha).unwrap();
    format!(
        "normal form:\n{}\n{alpha}\n  input:       {before}\n  normal form: {after}\n",
        render_ontology(&n)
    )
}

fn main() {
    print!("{}", run_example());
}
