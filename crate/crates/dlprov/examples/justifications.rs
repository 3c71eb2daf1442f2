//! Minimal axiom sets behind an entailment, optionally treating some axioms
//! as fixed background knowledge.

use std::collections::BTreeSet;

use dlprov::explain::{justifications, Target};
use dlprov::textio::render_axiom_sets;
use dlprov::{fixtures, Axiom, Variable};

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let t = Target::Axiom(Axiom::concept_assertion("Deity", "dionysus"));
    let all = justifications(&o, &t, &BTreeSet::new()).unwrap();
    let rules: BTreeSet<Variable> = ["y1", "y2", "y3"].into_iter().map(Variable::new).collect();
    let facts_only = justifications(&o, &t, &rules).unwrap();

    let q = Target::Query(
        fixtures::dionysus_query(),
        vec![fixtures::dionysus_individual()],
    );
    let for_query = justifications(&o, &q, &BTreeSet::new()).unwrap();
    format!(
        "{t}: {} justifications\n{}\nwith the rules fixed:\n{}\n{q}: {} justifications\n",
        all.len(),
        render_axiom_sets(&o, &all),
        render_axiom_sets(&o, &facts_only),
        for_query.len()
    )
}

fn main() {
    print!("{}", run_example());
}
