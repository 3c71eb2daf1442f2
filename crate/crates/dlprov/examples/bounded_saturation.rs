//! In the restricted profile, monomials above a size bound can be dropped
//! during saturation without losing the small ones.

use dlprov::model::{check_profile, Profile};
use dlprov::saturate::{saturate, saturate_k, DerivedAxiom};
use dlprov::textio::parse_ontology;
use dlprov::Axiom;

const ONTO: &str = "\
A(a) @ x1
A <= B @ x2
B <= C @ x3
A <= C @ x4
C <= D @ x5
B <= D @ x6
";

pub fn run_example() -> String {
    let o = parse_ontology(ONTO).unwrap();
    assert_eq!(check_profile(&o), Profile::ELHIrestr);
    let key = DerivedAxiom::from_axiom(&Axiom::concept_assertion("D", "a")).unwrap();
    let show = |s: &dlprov::saturate::SaturationSet| {
        s.get(&key)
            .map(|ms| {
                ms.iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(" + ")
            })
            .unwrap_or_default()
    };
    let mut out = format!(
        "profile: {:?}\nfull:  D(a) @ {}\n",
        check_profile(&o),
        show(&saturate(&o).unwrap())
    );
    for k in 1..=4 {
        out += &format!("k = {k}: D(a) @ {}\n", show(&saturate_k(&o, k).unwrap()));
    }
    out
}

fn main() {
    print!("{}", run_example());
}
