//! Provenance of a conjunctive query answer, with the rewritings behind it.

use dlprov::fixtures;
use dlprov::query::{cq_provenance, rewrite};
use dlprov::saturate::saturate;
use dlprov::semiring::{builtin_semiring, evaluate};

pub fn run_example() -> String {
    let o = fixtures::dionysus();
    let q = fixtures::dionysus_query();
    let who = fixtures::dionysus_individual();
    let p = cq_provenance(&o, &q, std::slice::from_ref(&who)).unwrap();

    let mut out = format!("{q} for x = {who}\n  why: {p}\n");
    let cost = evaluate(
        &p,
        &builtin_semiring("tropical").unwrap(),
        &fixtures::dionysus_tropical(),
    )
    .unwrap();
    out += &format!("  cheapest derivation: {cost}\n");

    let sat = saturate(&o).unwrap();
    let bound = q.bind(&[who]).unwrap();
    out += "  rewritings:\n";
    for r in rewrite(&bound, &sat, &o) {
        out += &format!("    {} @ {}\n", r.query, r.monomial);
    }
    out
}

fn main() {
    print!("{}", run_example());
}
