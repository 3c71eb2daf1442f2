//! Provenance of concept and role inclusions.

use dlprov::entail::axiom_provenance;
use dlprov::textio::{parse_axiom, parse_ontology, NameKinds};

const ONTO: &str = "\
Professor <= exists teaches @ p1
exists teaches . top <= Teacher @ p2
Teacher <= Staff @ p3
Professor <= Staff @ p4
headOf <= memberOf @ r1
memberOf <= affiliatedWith @ r2
";

pub fn run_example() -> String {
    let o = parse_ontology(ONTO).unwrap();
    let kinds = NameKinds::from_ontology(&o);
    let mut out = String::new();
    for text in [
        "Professor <= Staff",
        "Professor <= Teacher",
        "headOf <= affiliatedWith",
        "Staff <= Professor",
    ] {
        let alpha = parse_axiom(text, &kinds).unwrap();
        out += &format!("{alpha:<28} {}\n", axiom_provenance(&o, &alpha).unwrap());
    }
    out
}

fn main() {
    print!("{}", run_example());
}
