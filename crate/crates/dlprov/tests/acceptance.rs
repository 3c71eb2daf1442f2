//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use dlprov::explain::{justifications, lineage, linsat, ncut, why, Target};
use dlprov::model::{AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, RightSide, Role};
use dlprov::oracle::{brute_classical_entails, brute_justifications_many, DEFAULT_BOUND};
use dlprov::saturate::{saturate, saturate_k, DerivedAxiom};
use dlprov::semiring::{
    builtin_semiring, evaluate, flatten, minimize, poly_plus, poly_times, AccessLevel, Lineage,
    SemiringSpec, Valuation, Value,
};
use dlprov::{entail, fixtures, query, Individual, Monomial, Variable, WhyPolynomial};

type Outcome = Result<String, String>;
type Criterion = Box<dyn Fn() -> Outcome>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(text: &str) -> WhyPolynomial {
    WhyPolynomial::from_monomials(text.split(" + ").map(|m| Monomial::from_vars(m.split('*'))))
}

fn real(v: &Value) -> f64 {
    v.as_real().expect("real value")
}

fn gci(l: &str, r: &str) -> Axiom {
    Axiom::Gci(Concept::name(l), RightSide::Name(r.into()))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["dlprov"];
    argv.extend_from_slice(args);
    let code = dlprov::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn fixture_path(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn subset(o: &AnnotatedOntology, m: &Monomial) -> AnnotatedOntology {
    o.filter(|a| a.annotation.is_subset(m))
}

/// Every concept-name inclusion between distinct names that `o` entails.
fn entailed_name_gcis(o: &AnnotatedOntology) -> Vec<Axiom> {
    let names: Vec<String> = o
        .vocabulary()
        .concepts
        .iter()
        .map(|c| c.to_string())
        .collect();
    let mut out = Vec::new();
    for l in &names {
        for r in &names {
            let a = gci(l, r);
            if l != r && entail::entails(o, &a).unwrap() {
                out.push(a);
            }
        }
    }
    out
}

/// The three bundled satisfiable fixtures followed by 200 random ontologies.
fn corpus() -> Vec<AnnotatedOntology> {
    let mut r = common::rng(2024);
    let mut v = vec![
        fixtures::dionysus(),
        fixtures::cyclic(),
        fixtures::idempotent(),
    ];
    v.extend((0..200).map(|_| common::satisfiable_ontology(&mut r, 8)));
    v
}

fn c1() -> Outcome {
    let start = Instant::now();
    let (code, out, err) = run_cli(&[
        "provenance",
        &fixture_path("dionysus.onto"),
        "--axiom",
        "Deity(dionysus)",
    ]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let want = "x1 + x3*x4*y1*y2 + x5*x6*y1*y3";
    ensure(out.trim_end() == want, || format!("printed {out:?}"))?;
    let p = entail::axiom_provenance(
        &fixtures::dionysus(),
        &Axiom::concept_assertion("Deity", "dionysus"),
    )
    .unwrap();
    ensure(p.to_string() == want, || format!("library gave {p}"))?;
    let trop = evaluate(
        &p,
        &builtin_semiring("tropical").unwrap(),
        &fixtures::dionysus_tropical(),
    )
    .unwrap();
    let fuzzy = evaluate(
        &p,
        &builtin_semiring("fuzzy").unwrap(),
        &fixtures::dionysus_fuzzy(),
    )
    .unwrap();
    ensure(real(&trop) == 1.0, || format!("tropical {trop}"))?;
    ensure((real(&fuzzy) - 0.9).abs() <= 1e-12, || {
        format!("fuzzy {fuzzy}")
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("tropical 1, fuzzy 0.9, {elapsed:.2?}"))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let o = fixtures::dionysus();
    let p = query::cq_provenance(
        &o,
        &fixtures::dionysus_query(),
        &[fixtures::dionysus_individual()],
    )
    .unwrap();
    let elapsed = start.elapsed();
    let want = poly(
        "x1*x2*y2 + x1*x3*y2 + x1*x5*y3 + x2*x3*x4*y1*y2 + x3*x4*y1*y2 + x3*x4*x5*y1*y2*y3 \
         + x2*x5*x6*y1*y2*y3 + x3*x5*x6*y1*y2*y3 + x5*x6*y1*y3",
    );
    ensure(p == want, || format!("got {p}"))?;
    let trop = evaluate(
        &p,
        &builtin_semiring("tropical").unwrap(),
        &fixtures::dionysus_tropical(),
    )
    .unwrap();
    let fuzzy = evaluate(
        &p,
        &builtin_semiring("fuzzy").unwrap(),
        &fixtures::dionysus_fuzzy(),
    )
    .unwrap();
    ensure(real(&trop) == 4.0, || format!("tropical {trop}"))?;
    ensure((real(&fuzzy) - 0.9).abs() <= 1e-12, || {
        format!("fuzzy {fuzzy}")
    })?;
    ensure(elapsed < Duration::from_secs(2), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("9 monomials, tropical 4, fuzzy 0.9, {elapsed:.2?}"))
}

fn c3() -> Outcome {
    for n in [2usize, 3] {
        let o = fixtures::exponential(n);
        let key = DerivedAxiom::from_axiom(&gci("B", "A")).unwrap();
        let sat = saturate(&o).unwrap();
        let got: BTreeSet<Monomial> = sat.get(&key).cloned().unwrap_or_default();
        let mut want = BTreeSet::new();
        for s in 0..(1u32 << n) {
            let mut vars = vec!["u".to_string()];
            for i in 0..n {
                if s & (1 << i) != 0 {
                    vars.push(format!("u{}", i + 1));
                    vars.push(format!("v{}", i + 1));
                }
            }
            want.insert(Monomial::from_vars(vars.iter().map(String::as_str)));
        }
        ensure(want.len() == 1 << n && got == want, || {
            format!("n = {n}: {} monomials, {got:?}", got.len())
        })?;
        let all: BTreeSet<Variable> = o.variables();
        ensure(all.len() == 2 * n + 1, || {
            format!("n = {n}: fixture has {} variables", all.len())
        })?;
        let lin = linsat(&o).unwrap();
        let entry = lin.get(&key).map(|m| m.vars().clone());
        ensure(entry.as_ref() == Some(&all), || {
            format!("n = {n}: linsat {entry:?}")
        })?;
        let l = lineage(&o, &gci("B", "A")).unwrap();
        ensure(l == Lineage::Vars(all.clone()), || {
            format!("n = {n}: lineage {l}")
        })?;
    }
    Ok("4 and 8 monomials, lineage 5 and 7 variables".into())
}

fn c4() -> Outcome {
    let mut r = common::rng(404);
    let mut checked = 0;
    for (i, o) in corpus().into_iter().enumerate() {
        let mut targets = common::sample(&mut r, &common::entailed_assertions(&o), 3);
        if i < 3 && targets.is_empty() {
            targets = entailed_name_gcis(&o);
        }
        let targets: Vec<Target> = targets.into_iter().map(Target::Axiom).collect();
        let brute =
            brute_justifications_many(&o, &targets, DEFAULT_BOUND).map_err(|e| e.to_string())?;
        for (t, b) in targets.iter().zip(brute) {
            let mine = justifications(&o, t, &BTreeSet::new()).map_err(|e| e.to_string())?;
            ensure(mine == b, || {
                format!("ontology {i}, {t}: {mine:?} vs {b:?}\n{o}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} targets, 0 mismatches"))
}

fn c5() -> Outcome {
    let mut checked = 0;
    for (i, o) in corpus().into_iter().enumerate() {
        let lin = linsat(&o).map_err(|e| e.to_string())?;
        for a in common::entailed_assertions(&o) {
            let p = entail::axiom_provenance(&o, &a).map_err(|e| e.to_string())?;
            let key = DerivedAxiom::from_axiom(&a).unwrap();
            let got = lin
                .get(&key)
                .map(|m| Lineage::Vars(m.vars().clone()))
                .unwrap_or(Lineage::Zero);
            ensure(got == flatten(&p), || {
                format!("ontology {i}, {a}: {got} vs {}", flatten(&p))
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} assertions, 0 mismatches"))
}

const VARS: [&str; 6] = ["x0", "x1", "x2", "x3", "x4", "x5"];

fn random_poly(r: &mut StdRng, vars: &[&str]) -> WhyPolynomial {
    let n = r.gen_range(0..=4);
    WhyPolynomial::from_monomials((0..n).map(|_| {
        let k = r.gen_range(0..=3);
        Monomial::from_vars(vars.choose_multiple(r, k).copied())
    }))
}

fn random_value(r: &mut StdRng, s: &str) -> Value {
    match s {
        "fuzzy" | "viterbi" => Value::Real(r.gen_range(0.01..=1.0)),
        "tropical" => Value::Real(r.gen_range(0..20) as f64),
        _ => Value::Level(
            *[
                AccessLevel::Public,
                AccessLevel::Confidential,
                AccessLevel::Secret,
                AccessLevel::TopSecret,
            ]
            .choose(r)
            .unwrap(),
        ),
    }
}

fn same(s: &SemiringSpec, a: &Value, b: &Value) -> bool {
    if s.name == "viterbi" {
        a.approx_eq(b, 1e-9)
    } else {
        a == b
    }
}

fn c6() -> Outcome {
    let mut r = common::rng(606);
    let ys: Vec<String> = VARS.iter().map(|v| v.replace('x', "y")).collect();
    let ys: Vec<&str> = ys.iter().map(String::as_str).collect();
    let mut laws = 0;
    for name in ["fuzzy", "tropical", "viterbi", "access"] {
        let s = builtin_semiring(name).unwrap();
        let times_idem = s.flags.times_idempotent;
        for i in 0..1000 {
            let mut val = Valuation::new();
            for v in VARS.iter().chain(&ys) {
                val.insert(*v, random_value(&mut r, name));
            }
            let ev = |p: &WhyPolynomial| evaluate(p, &s, &val).unwrap();
            let p = random_poly(&mut r, &VARS);
            let q = random_poly(&mut r, &VARS);
            let q_apart = random_poly(&mut r, &ys);
            let sum = ev(&poly_plus(&p, &q));
            ensure(same(&s, &sum, &s.plus(&ev(&p), &ev(&q))), || {
                format!("{name} #{i}: plus law on {p} and {q}")
            })?;
            let prod = ev(&poly_times(&p, &q_apart));
            let want = s.times(&ev(&p), &ev(&q_apart));
            ensure(same(&s, &prod, &want), || {
                format!("{name} #{i}: times law on {p} and {q_apart}")
            })?;
            if times_idem {
                let prod = ev(&poly_times(&p, &q));
                ensure(same(&s, &prod, &s.times(&ev(&p), &ev(&q))), || {
                    format!("{name} #{i}: times law on {p} and {q}")
                })?;
            }
            let m = ev(&minimize(&p));
            ensure(same(&s, &m, &ev(&p)), || {
                format!("{name} #{i}: minimize changes the value of {p}")
            })?;
            laws += if times_idem { 4 } else { 3 };
        }
    }
    Ok(format!("{laws} law instances over 4000 random polynomials"))
}

fn c7() -> Outcome {
    let o = fixtures::dionysus();
    let val = fixtures::dionysus_fuzzy();
    let fuzzy = builtin_semiring("fuzzy").unwrap();
    let mut targets: Vec<Target> = Vec::new();
    let voc = o.vocabulary();
    for c in &voc.concepts {
        for a in &voc.individuals {
            targets.push(Target::Axiom(Axiom::ConceptAssertion(
                Atomic::Name(c.clone()),
                a.clone(),
            )));
        }
    }
    for a in common::entailed_assertions(&o) {
        if !targets.contains(&Target::Axiom(a.clone())) {
            targets.push(Target::Axiom(a));
        }
    }
    targets.push(Target::Query(
        fixtures::dionysus_query(),
        vec![fixtures::dionysus_individual()],
    ));
    let degrees: Vec<f64> = targets
        .iter()
        .map(|t| real(&evaluate(&why(&o, t).unwrap(), &fuzzy, &val).unwrap()))
        .collect();
    let mut checks = 0;
    for k in 1..=10 {
        let n = k as f64 / 10.0;
        let cut = ncut(&o, n, &val).map_err(|e| e.to_string())?;
        for (t, d) in targets.iter().zip(&degrees) {
            let classical = brute_classical_entails(&cut, t).map_err(|e| e.to_string())?;
            ensure((*d >= n) == classical, || {
                format!("n = {n}, {t}: degree {d}, cut entails {classical}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks over {} targets", targets.len()))
}

/// Names every complex subconcept of a left-hand side with its own fresh
/// name, including the whole left-hand side.
struct Namer {
    next: usize,
    out: AnnotatedOntology,
}

impl Namer {
    fn fresh(&mut self) -> Concept {
        self.next += 1;
        Concept::name(format!("_m{}", self.next).as_str())
    }

    fn define(&mut self, lhs: Concept) -> Concept {
        if lhs.is_atomic() {
            return lhs;
        }
        let x = self.fresh();
        let rhs = RightSide::Name(match x.as_atomic() {
            Some(Atomic::Name(n)) => n,
            _ => unreachable!(),
        });
        self.out.push(AnnotatedAxiom::unit(Axiom::Gci(lhs, rhs)));
        x
    }

    fn name(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Exists(p, f) => {
                let f = self.name(f);
                self.define(Concept::exists(p.clone(), f))
            }
            Concept::And(_) => {
                let mut parts = c
                    .conjuncts()
                    .into_iter()
                    .map(|p| self.name(p))
                    .collect::<Vec<_>>()
                    .into_iter();
                let mut acc = parts.next().unwrap_or(Concept::Top);
                for p in parts {
                    acc = self.define(Concept::and([acc, p]));
                }
                acc
            }
            other => other.clone(),
        }
    }
}

fn independent_normalize(o: &AnnotatedOntology) -> AnnotatedOntology {
    let mut n = Namer {
        next: 0,
        out: AnnotatedOntology::new(),
    };
    for a in o.iter() {
        let axiom = match &a.axiom {
            Axiom::Gci(l, r) if !a.axiom.is_normal() => Axiom::Gci(n.name(l), r.clone()),
            other => other.clone(),
        };
        n.out.push(AnnotatedAxiom::new(axiom, a.annotation.clone()));
    }
    n.out
}

fn c8() -> Outcome {
    let mut r = common::rng(808);
    let mut made = 0;
    let mut checked = 0;
    while made < 100 {
        let o = common::general_ontology(&mut r, 7);
        if o.is_normal_form() {
            continue;
        }
        made += 1;
        let ours = dlprov::normalize::normalize(&o);
        let theirs = independent_normalize(&o);
        ensure(ours.is_normal_form() && theirs.is_normal_form(), || {
            format!("not normal:\n{ours}\n{theirs}")
        })?;
        let a_ind: Individual = "a".into();
        let theirs_sat =
            saturate(&entail::with_individuals(&theirs, [&a_ind])).map_err(|e| e.to_string())?;
        let mut targets = common::entailed_assertions(&o);
        for c in &o.vocabulary().concepts {
            targets.push(Axiom::ConceptAssertion(
                Atomic::Name(c.clone()),
                a_ind.clone(),
            ));
        }
        for a in targets {
            let before = entail::axiom_provenance(&o, &a).map_err(|e| e.to_string())?;
            let after = entail::assertion_provenance(&ours, &a).map_err(|e| e.to_string())?;
            let key = DerivedAxiom::from_axiom(&a).unwrap();
            let other =
                WhyPolynomial::from_monomials(theirs_sat.get(&key).cloned().unwrap_or_default());
            ensure(before == after && after == other, || {
                format!("{a}: {before} / {after} / {other}\n{o}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} assertions over {made} ontologies"))
}

fn c9() -> Outcome {
    let mut r = common::rng(909);
    let mut checked = 0;
    for _ in 0..50 {
        let o = common::restricted_ontology(&mut r, 8);
        let full = saturate(&o).unwrap();
        for k in 1..=3 {
            let bounded = saturate_k(&o, k).map_err(|e| e.to_string())?;
            for (key, ms) in full.iter().filter(|(key, _)| key.is_assertion()) {
                let want: BTreeSet<_> = ms.iter().filter(|m| m.len() <= k).cloned().collect();
                let got: BTreeSet<_> = bounded.get(key).cloned().unwrap_or_default();
                ensure(got == want, || format!("k = {k}, {key}\n{o}"))?;
                checked += 1;
            }
            for (key, _) in bounded.iter().filter(|(key, _)| key.is_assertion()) {
                ensure(full.get(key).is_some(), || {
                    format!("k = {k}: extra {key}\n{o}")
                })?;
            }
        }
    }
    Ok(format!("{checked} assertion entries"))
}

fn sound(o: &AnnotatedOntology, t: &Target) -> Result<usize, String> {
    let p = why(o, t).map_err(|e| e.to_string())?;
    let mut n = 0;
    for m in p.monomials().into_iter().flatten() {
        let ok = brute_classical_entails(&subset(o, m), t).map_err(|e| e.to_string())?;
        ensure(ok, || {
            format!("{t} @ {m} is not entailed by its axioms\n{o}")
        })?;
        n += 1;
    }
    Ok(n)
}

fn c10() -> Outcome {
    let o = fixtures::standard_rules();
    let good = Monomial::from_vars(["v", "v1", "u", "w"]);
    let bad = Monomial::from_vars(["v", "v1", "v2", "u", "w"]);
    let ca = Axiom::concept_assertion("C", "a");
    let pa = entail::axiom_provenance(&o, &ca).unwrap();
    let pq = query::cq_provenance(&o, &fixtures::standard_rules_query(), &[]).unwrap();
    for (what, p) in [("axiom", &pa), ("query", &pq)] {
        ensure(p.contains(&good) && !p.contains(&bad), || {
            format!("{what} provenance of C(a) is {p}")
        })?;
    }

    let mut monos = 0;
    let dio = fixtures::dionysus();
    for a in common::entailed_assertions(&dio) {
        monos += sound(&dio, &Target::Axiom(a))?;
    }
    monos += sound(
        &dio,
        &Target::Query(
            fixtures::dionysus_query(),
            vec![fixtures::dionysus_individual()],
        ),
    )?;
    monos += sound(&o, &Target::Axiom(ca))?;
    monos += sound(&o, &Target::Query(fixtures::standard_rules_query(), vec![]))?;

    let mut r = common::rng(1010);
    for i in 0..80 {
        let o = if i % 4 == 3 {
            common::general_ontology(&mut r, 6)
        } else {
            common::satisfiable_ontology(&mut r, 7)
        };
        if !dlprov::saturate::is_satisfiable(&dlprov::normalize::normalize(&o)).unwrap() {
            continue;
        }
        for a in common::entailed_assertions(&o) {
            monos += sound(&o, &Target::Axiom(a))?;
        }
        for l in common::CONCEPTS {
            for b in common::CONCEPTS {
                monos += sound(&o, &Target::Axiom(gci(l, b)))?;
            }
        }
        monos += sound(
            &o,
            &Target::Axiom(Axiom::Gci(Concept::Top, RightSide::Name("A".into()))),
        )?;
        monos += sound(
            &o,
            &Target::Axiom(Axiom::Ri(Role::new("R"), Role::new("S"))),
        )?;
        let arity = i % 2;
        let q = common::query(&mut r, arity);
        let tuple: Vec<Individual> = if arity == 0 { vec![] } else { vec!["a".into()] };
        monos += sound(&o, &Target::Query(q, tuple))?;
    }
    Ok(format!("regression holds, {monos} monomials confirmed"))
}

fn c11() -> Outcome {
    let o = fixtures::unsat();
    let axioms = [
        Axiom::concept_assertion("A", "a"),
        Axiom::concept_assertion("B", "a"),
        gci("A", "B"),
        gci("B", "A"),
        Axiom::Gci(
            Concept::and([Concept::name("A"), Concept::name("B")]),
            RightSide::Bot,
        ),
    ];
    for a in &axioms {
        let p = entail::axiom_provenance(&o, a).map_err(|e| e.to_string())?;
        ensure(p.is_top(), || format!("{a}: {p}"))?;
    }
    let q = dlprov::textio::parse_query("q(x) :- A(x).").unwrap();
    let p = query::cq_provenance(&o, &q, &["a".into()]).map_err(|e| e.to_string())?;
    ensure(p.is_top(), || format!("query: {p}"))?;
    let (code, _, err) = run_cli(&["check", &fixture_path("unsat.onto")]);
    ensure(code == 3, || format!("check exited {code}: {err}"))?;
    let top = WhyPolynomial::Top;
    let f = evaluate(&top, &builtin_semiring("fuzzy").unwrap(), &Valuation::new()).unwrap();
    let t = evaluate(
        &top,
        &builtin_semiring("tropical").unwrap(),
        &Valuation::new(),
    )
    .unwrap();
    ensure(real(&f) == 1.0 && real(&t) == 0.0, || {
        format!("fuzzy {f}, tropical {t}")
    })?;
    Ok(format!(
        "{} targets give TOP, check exits 3",
        axioms.len() + 1
    ))
}

fn c12(suite_start: Instant) -> Outcome {
    let start = Instant::now();
    let sat = saturate(&fixtures::exponential(10)).unwrap();
    let elapsed = start.elapsed();
    let key = DerivedAxiom::from_axiom(&gci("B", "A")).unwrap();
    let n = sat.get(&key).map_or(0, |m| m.len());
    ensure(n == 1024, || format!("B <= A has {n} monomials"))?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("O_exp(10) took {elapsed:?}")
    })?;
    let total = suite_start.elapsed();
    ensure(total < Duration::from_secs(60), || {
        format!("suite took {total:?}")
    })?;
    Ok(format!("O_exp(10) in {elapsed:.2?}, whole run {total:.2?}"))
}

fn main() {
    let suite_start = Instant::now();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("dionysus assertion provenance", Box::new(c1)),
        ("dionysus query provenance", Box::new(c2)),
        ("exponential fixture", Box::new(c3)),
        ("justification equality", Box::new(c4)),
        ("lineage is flattened why", Box::new(c5)),
        ("homomorphism laws", Box::new(c6)),
        ("n-cut correspondence", Box::new(c7)),
        ("normal-form preservation", Box::new(c8)),
        ("bounded saturation fidelity", Box::new(c9)),
        ("soundness of monomials", Box::new(c10)),
        ("unsatisfiable handling", Box::new(c11)),
        ("performance budget", Box::new(move || c12(suite_start))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.1?}]", i + 1, t0.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
