//! The completion rules keep every derivation: `B ⊑ A` in the exponential
//! family has one monomial per subset of the middle layer.

use dlprov::fixtures::exponential;
use dlprov::model::RightSide;
use dlprov::saturate::{lin_saturate, saturate, DerivedAxiom, Ruleset};
use dlprov::{Axiom, Concept};

pub fn run_example() -> String {
    let key =
        DerivedAxiom::from_axiom(&Axiom::Gci(Concept::name("B"), RightSide::Name("A".into())))
            .unwrap();
    let mut out = String::new();
    for n in 1..=4 {
        let o = exponential(n);
        let sat = saturate(&o).unwrap();
        let ms = sat.get(&key).map_or(0, |m| m.len());
        let lin = lin_saturate(&o, Ruleset::Full).unwrap();
        out += &format!(
            "n = {n}: {} derived axioms, {} pairs, B <= A has {ms} monomials, lineage {}\n",
            sat.len(),
            sat.pair_count(),
            lin.get(&key).unwrap()
        );
    }
    out += "\nn = 2 in full:\n";
    out += &saturate(&exponential(2)).unwrap().render();
    out
}

fn main() {
    print!("{}", run_example());
}
