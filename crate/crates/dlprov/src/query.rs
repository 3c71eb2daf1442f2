//! Conjunctive queries: annotated rewriting against the saturation and
//! matching over the saturated assertions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::entail::{axiom_provenance, with_individuals, EntailError};
use crate::model::{
    AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, ConceptName, Individual, RightSide,
    Role,
};
use crate::normalize::normalize;
use crate::saturate::{is_satisfiable, saturate, DerivedAxiom, SaturateError, SaturationSet};
use crate::semiring::{poly_plus, poly_times, Monomial, Variable, WhyPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("the query has {expected} answer variables but {got} individuals were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("the query is not rooted tree-shaped: {0}")]
    NotTreeShaped(String),
    #[error(transparent)]
    Saturate(#[from] SaturateError),
    #[error(transparent)]
    Entail(#[from] EntailError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Variable),
    Ind(Individual),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Ind(a) => write!(f, "\"{a}\""),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryAtom {
    Concept(ConceptName, Term),
    Role(Role, Term, Term),
}

impl QueryAtom {
    fn terms(&self) -> Vec<&Term> {
        match self {
            QueryAtom::Concept(_, t) => vec![t],
            QueryAtom::Role(_, s, t) => vec![s, t],
        }
    }

    fn map(&self, f: &impl Fn(&Term) -> Term) -> QueryAtom {
        match self {
            QueryAtom::Concept(c, t) => QueryAtom::Concept(c.clone(), f(t)),
            QueryAtom::Role(r, s, t) => QueryAtom::Role(r.clone(), f(s), f(t)),
        }
    }
}

impl fmt::Display for QueryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAtom::Concept(c, t) => write!(f, "{c}({t})"),
            QueryAtom::Role(r, s, t) => write!(f, "{r}({s},{t})"),
        }
    }
}

impl fmt::Debug for QueryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjunctiveQuery {
    pub answer_vars: Vec<Variable>,
    pub atoms: BTreeSet<QueryAtom>,
}

impl ConjunctiveQuery {
    pub fn new(answer_vars: Vec<Variable>, atoms: BTreeSet<QueryAtom>) -> Self {
        ConjunctiveQuery { answer_vars, atoms }
    }

    /// All variables occurring in atoms.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for a in &self.atoms {
            for t in a.terms() {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            }
        }
        out
    }

    pub fn existentials(&self) -> BTreeSet<Variable> {
        let mut v = self.variables();
        for a in &self.answer_vars {
            v.remove(a);
        }
        v
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }

    fn substitute(&self, f: impl Fn(&Term) -> Term) -> BTreeSet<QueryAtom> {
        self.atoms.iter().map(|a| a.map(&f)).collect()
    }

    /// The Boolean query with answer variables replaced by `tuple`.
    pub fn bind(&self, tuple: &[Individual]) -> Result<ConjunctiveQuery, QueryError> {
        if tuple.len() != self.answer_vars.len() {
            return Err(QueryError::ArityMismatch {
                expected: self.answer_vars.len(),
                got: tuple.len(),
            });
        }
        let map: HashMap<&Variable, &Individual> = self.answer_vars.iter().zip(tuple).collect();
        let atoms = self.substitute(|t| match t {
            Term::Var(v) => map
                .get(v)
                .map(|a| Term::Ind((*a).clone()))
                .unwrap_or_else(|| t.clone()),
            _ => t.clone(),
        });
        Ok(ConjunctiveQuery::new(Vec::new(), atoms))
    }

    /// The same query with existential variables renamed `_x0, _x1, ...` so
    /// that isomorphic queries coincide. Exact up to six existentials.
    pub fn canonical(&self) -> ConjunctiveQuery {
        let ex: Vec<Variable> = self.existentials().into_iter().collect();
        let names: Vec<Variable> = (0..ex.len())
            .map(|i| Variable::new(format!("_x{i}")))
            .collect();
        let rename = |perm: &[usize]| -> BTreeSet<QueryAtom> {
            let map: HashMap<&Variable, &Variable> = ex
                .iter()
                .enumerate()
                .map(|(i, v)| (v, &names[perm[i]]))
                .collect();
            self.substitute(|t| match t {
                Term::Var(v) => Term::Var(
                    map.get(v)
                        .map(|x| (*x).clone())
                        .unwrap_or_else(|| v.clone()),
                ),
                _ => t.clone(),
            })
        };
        let ident: Vec<usize> = (0..ex.len()).collect();
        let atoms = if ex.len() <= 6 {
            let mut best: Option<BTreeSet<QueryAtom>> = None;
            for perm in permutations(&ident) {
                let cand = rename(&perm);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            best.unwrap_or_default()
        } else {
            rename(&ident)
        };
        ConjunctiveQuery::new(self.answer_vars.clone(), atoms)
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.answer_vars.iter().map(|v| v.to_string()).collect();
        let body: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "q({}) :- {}.", head.join(","), body.join(", "))
    }
}

impl fmt::Debug for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rewriting of a query with the monomial of the axioms it used.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RewrittenQuery {
    pub query: ConjunctiveQuery,
    pub monomial: Monomial,
}

/// Lookup tables over the saturation and the input axioms.
struct Tables {
    ris: HashMap<Role, Vec<(Role, Monomial)>>,
    subs: HashMap<ConceptName, Vec<(Vec<Atomic>, Monomial)>>,
    tops: HashMap<Atomic, Vec<Monomial>>,
    exs: Vec<(Atomic, Role, Monomial)>,
    res: HashMap<(Role, Atomic), Vec<(Atomic, Monomial)>>,
}

impl Tables {
    fn new(sat: &SaturationSet, o: &AnnotatedOntology) -> Self {
        let mut t = Tables {
            ris: HashMap::new(),
            subs: HashMap::new(),
            tops: HashMap::new(),
            exs: Vec::new(),
            res: HashMap::new(),
        };
        for (k, ms) in sat.iter() {
            match k {
                DerivedAxiom::Ri(p, q) => {
                    t.ris
                        .entry(p.clone())
                        .or_default()
                        .extend(ms.iter().map(|m| (q.clone(), m.clone())));
                }
                DerivedAxiom::Sub(l, b) => {
                    if l.is_empty() {
                        t.tops
                            .entry(b.clone())
                            .or_default()
                            .extend(ms.iter().cloned());
                    }
                    if let Atomic::Name(c) = b {
                        let l: Vec<Atomic> = l.iter().cloned().collect();
                        t.subs
                            .entry(c.clone())
                            .or_default()
                            .extend(ms.iter().map(|m| (l.clone(), m.clone())));
                    }
                }
                _ => {}
            }
        }
        for a in o {
            match &a.axiom {
                Axiom::Gci(lhs, RightSide::ExistsTop(p)) => {
                    if let Some(at) = lhs.as_atomic() {
                        t.exs.push((at, p.clone(), a.annotation.clone()));
                    }
                }
                Axiom::Gci(Concept::Exists(p, f), rhs) => {
                    let b = match rhs {
                        RightSide::Name(n) => Atomic::Name(n.clone()),
                        RightSide::Bot => Atomic::Bot,
                        RightSide::ExistsTop(_) => continue,
                    };
                    if let Some(fa) = f.as_atomic() {
                        t.res
                            .entry((p.clone(), b))
                            .or_default()
                            .push((fa, a.annotation.clone()));
                    }
                }
                _ => {}
            }
        }
        t
    }

    /// Ways a `p`-successor is forced into `b`: atoms required at the source
    /// (⊤ for none) with their monomials.
    fn covers(&self, p: &Role, b: &Atomic) -> Vec<(Atomic, Monomial)> {
        let mut out = Vec::new();
        for (pi, mi) in self.ris.get(p).into_iter().flatten() {
            for (ai, vi) in self.res.get(&(pi.inv(), b.clone())).into_iter().flatten() {
                out.push((ai.clone(), mi.times(vi)));
            }
        }
        for o in self.tops.get(b).into_iter().flatten() {
            out.push((Atomic::Top, o.clone()));
        }
        out
    }
}

/// Cartesian products of per-position choices, accumulating atoms and monomials.
fn combine(lists: Vec<Vec<(BTreeSet<Atomic>, Monomial)>>) -> Vec<(BTreeSet<Atomic>, Monomial)> {
    let mut acc = vec![(BTreeSet::new(), Monomial::unit())];
    for l in lists {
        let mut next = Vec::new();
        for (a, m) in &acc {
            for (b, n) in &l {
                let mut s = a.clone();
                s.extend(b.iter().cloned());
                next.push((s, m.times(n)));
            }
        }
        next.sort();
        next.dedup();
        acc = next;
    }
    acc
}

/// One rewriting step eliminating the existential `x0`.
fn step(
    q: &ConjunctiveQuery,
    m: &Monomial,
    x0: &Variable,
    t: &Tables,
    out: &mut Vec<(ConjunctiveQuery, Monomial)>,
) {
    let x = Term::Var(x0.clone());
    let mut incoming: Vec<(Role, Term)> = Vec::new();
    let mut concepts: Vec<ConceptName> = Vec::new();
    for a in &q.atoms {
        match a {
            QueryAtom::Role(r, s, o) if *s == x && *o == x => return,
            QueryAtom::Role(r, s, o) if *o == x => incoming.push((r.clone(), s.clone())),
            QueryAtom::Role(r, s, o) if *s == x => incoming.push((r.inv(), o.clone())),
            QueryAtom::Concept(c, s) if *s == x => concepts.push(c.clone()),
            _ => {}
        }
    }
    let answer: HashSet<&Variable> = q.answer_vars.iter().collect();
    let vp: BTreeSet<Term> = incoming.iter().map(|(_, y)| y.clone()).collect();
    let inds: Vec<&Individual> = vp
        .iter()
        .filter_map(|t| if let Term::Ind(a) = t { Some(a) } else { None })
        .collect();
    let ans_in: Vec<&Variable> = vp
        .iter()
        .filter_map(|t| match t {
            Term::Var(v) if answer.contains(v) => Some(v),
            _ => None,
        })
        .collect();
    let y0: Term = if vp.is_empty() {
        let used: HashSet<String> = q.variables().iter().map(|v| v.to_string()).collect();
        let n = (0..)
            .map(|i| format!("_y{i}"))
            .find(|n| !used.contains(n))
            .unwrap();
        Term::Var(Variable::new(n))
    } else if inds.len() > 1 || (inds.len() == 1 && !ans_in.is_empty()) || ans_in.len() > 1 {
        return;
    } else if let Some(a) = inds.first() {
        Term::Ind((*a).clone())
    } else if let Some(v) = ans_in.first() {
        Term::Var((*v).clone())
    } else {
        vp.iter().next().unwrap().clone()
    };

    for (a, p, v) in &t.exs {
        let mut lists: Vec<Vec<(BTreeSet<Atomic>, Monomial)>> = Vec::new();
        for (qj, _) in &incoming {
            let opts: Vec<(BTreeSet<Atomic>, Monomial)> = t
                .ris
                .get(p)
                .into_iter()
                .flatten()
                .filter(|(r, _)| r == qj)
                .map(|(_, mm)| (BTreeSet::new(), mm.clone()))
                .collect();
            lists.push(opts);
        }
        for c in &concepts {
            let mut opts = Vec::new();
            for (l, n) in t.subs.get(c).into_iter().flatten() {
                let per_b: Vec<Vec<(BTreeSet<Atomic>, Monomial)>> = l
                    .iter()
                    .map(|b| {
                        t.covers(p, b)
                            .into_iter()
                            .map(|(ai, mm)| (BTreeSet::from([ai]), mm))
                            .collect()
                    })
                    .collect();
                for (atoms, mm) in combine(per_b) {
                    opts.push((atoms, mm.times(n)));
                }
            }
            lists.push(opts);
        }
        for (at, mm) in combine(lists) {
            if at.contains(&Atomic::Bot) {
                continue;
            }
            let mut atoms = q.substitute(|term| {
                if vp.contains(term) && matches!(term, Term::Var(_)) {
                    y0.clone()
                } else {
                    term.clone()
                }
            });
            atoms.retain(|atom| !atom.terms().contains(&&x));
            for c in at.iter().chain([a]) {
                if let Atomic::Name(n) = c {
                    atoms.insert(QueryAtom::Concept(n.clone(), y0.clone()));
                }
            }
            let nq = ConjunctiveQuery::new(q.answer_vars.clone(), atoms);
            out.push((nq, m.times(v).times(&mm)));
        }
    }
}

/// All rewritings of `q` reachable from `(q, 1)`, breadth first. The first
/// element is `(q, 1)` itself; the others are in canonical form.
pub fn rewrite(
    q: &ConjunctiveQuery,
    sat: &SaturationSet,
    o: &AnnotatedOntology,
) -> Vec<RewrittenQuery> {
    let t = Tables::new(sat, o);
    let mut visited: HashSet<(ConjunctiveQuery, Monomial)> = HashSet::new();
    let mut out = vec![RewrittenQuery {
        query: q.clone(),
        monomial: Monomial::unit(),
    }];
    visited.insert((q.canonical(), Monomial::unit()));
    let mut frontier: VecDeque<(ConjunctiveQuery, Monomial)> =
        VecDeque::from([(q.clone(), Monomial::unit())]);
    while let Some((cur, m)) = frontier.pop_front() {
        let mut next = Vec::new();
        for x0 in cur.existentials() {
            step(&cur, &m, &x0, &t, &mut next);
        }
        for (nq, nm) in next {
            let key = (nq.canonical(), nm);
            if visited.insert(key.clone()) {
                out.push(RewrittenQuery {
                    query: key.0.clone(),
                    monomial: key.1.clone(),
                });
                frontier.push_back(key);
            }
        }
    }
    out
}

/// Assertions of a saturation, indexed for matching.
struct Facts<'a> {
    concepts: BTreeMap<&'a ConceptName, Vec<(&'a Individual, Ms<'a>)>>,
    roles: BTreeMap<&'a str, Vec<(&'a Individual, &'a Individual, Ms<'a>)>>,
}

type Ms<'a> = &'a BTreeSet<Monomial>;

impl<'a> Facts<'a> {
    fn new(sat: &'a SaturationSet) -> Self {
        let mut f = Facts {
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
        };
        for (k, ms) in sat.iter() {
            match k {
                DerivedAxiom::Concept(Atomic::Name(c), a) => {
                    f.concepts.entry(c).or_default().push((a, ms))
                }
                DerivedAxiom::Role(r, a, b) => {
                    f.roles.entry(r.as_str()).or_default().push((a, b, ms))
                }
                _ => {}
            }
        }
        f
    }
}

fn poly(ms: &BTreeSet<Monomial>) -> WhyPolynomial {
    WhyPolynomial::Finite(ms.clone())
}

fn resolve(t: &Term, env: &HashMap<Variable, Individual>) -> Option<Individual> {
    match t {
        Term::Ind(a) => Some(a.clone()),
        Term::Var(v) => env.get(v).cloned(),
    }
}

fn bind_term(
    t: &Term,
    a: &Individual,
    env: &mut HashMap<Variable, Individual>,
    bound: &mut Vec<Variable>,
) -> bool {
    match t {
        Term::Ind(b) => b == a,
        Term::Var(v) => match env.get(v) {
            Some(b) => b == a,
            None => {
                env.insert(v.clone(), a.clone());
                bound.push(v.clone());
                true
            }
        },
    }
}

fn search(
    atoms: &[QueryAtom],
    i: usize,
    facts: &Facts,
    env: &mut HashMap<Variable, Individual>,
    acc: WhyPolynomial,
    out: &mut WhyPolynomial,
) {
    if acc.is_zero() {
        return;
    }
    if i == atoms.len() {
        *out = poly_plus(out, &acc);
        return;
    }
    match &atoms[i] {
        QueryAtom::Concept(c, t) => {
            for (a, ms) in facts.concepts.get(c).into_iter().flatten() {
                let mut bound = Vec::new();
                if bind_term(t, a, env, &mut bound) {
                    search(atoms, i + 1, facts, env, poly_times(&acc, &poly(ms)), out);
                }
                for v in bound {
                    env.remove(&v);
                }
            }
        }
        QueryAtom::Role(r, s, t) => {
            let (s, t) = if r.inverted { (t, s) } else { (s, t) };
            let (fs, ft) = (resolve(s, env), resolve(t, env));
            for (a, b, ms) in facts.roles.get(r.base.as_str()).into_iter().flatten() {
                if fs.as_ref().is_some_and(|x| x != *a) || ft.as_ref().is_some_and(|x| x != *b) {
                    continue;
                }
                let mut bound = Vec::new();
                if bind_term(s, a, env, &mut bound) && bind_term(t, b, env, &mut bound) {
                    search(atoms, i + 1, facts, env, poly_times(&acc, &poly(ms)), out);
                }
                for v in bound {
                    env.remove(&v);
                }
            }
        }
    }
}

/// Sum over matches of `q(tuple)` into the assertions of `sat` of the
/// product of the matched assertions' provenance.
pub fn match_provenance(
    q: &ConjunctiveQuery,
    tuple: &[Individual],
    sat: &SaturationSet,
) -> Result<WhyPolynomial, QueryError> {
    let qb = q.bind(tuple)?;
    let facts = Facts::new(sat);
    // Atoms sharing variables with earlier ones first, so joins stay selective.
    let mut order: Vec<QueryAtom> = Vec::new();
    let mut rest: Vec<QueryAtom> = qb.atoms.iter().cloned().collect();
    let mut seen: HashSet<Variable> = HashSet::new();
    while !rest.is_empty() {
        let score = |a: &QueryAtom| {
            a.terms()
                .iter()
                .filter(|t| match t {
                    Term::Ind(_) => true,
                    Term::Var(v) => seen.contains(v),
                })
                .count()
        };
        let best = (0..rest.len())
            .max_by_key(|&i| (score(&rest[i]), usize::MAX - i))
            .unwrap();
        let a = rest.remove(best);
        for t in a.terms() {
            if let Term::Var(v) = t {
                seen.insert(v.clone());
            }
        }
        order.push(a);
    }
    let mut out = WhyPolynomial::zero();
    search(
        &order,
        0,
        &facts,
        &mut HashMap::new(),
        WhyPolynomial::one(),
        &mut out,
    );
    Ok(out)
}

/// Provenance of the answer `tuple` to `q`. Normalizes internally.
pub fn cq_provenance(
    o: &AnnotatedOntology,
    q: &ConjunctiveQuery,
    tuple: &[Individual],
) -> Result<WhyPolynomial, QueryError> {
    let qb = q.bind(tuple)?;
    let on = normalize(o);
    if !is_satisfiable(&on)? {
        return Ok(WhyPolynomial::Top);
    }
    let mut named: Vec<Individual> = qb
        .atoms
        .iter()
        .flat_map(|a| a.terms())
        .filter_map(|t| match t {
            Term::Ind(a) => Some(a.clone()),
            Term::Var(_) => None,
        })
        .collect();
    let vocab = on.vocabulary();
    if named.is_empty() && vocab.individuals.is_empty() {
        // the domain is never empty; stand in for one of its elements
        let taken = vocab.all_names();
        let fresh = (0..)
            .map(|i| format!("_d{i}"))
            .find(|n| !taken.contains(n))
            .expect("unbounded");
        named.push(Individual::new(fresh));
    }
    let on = with_individuals(&on, &named);
    let sat = saturate(&on)?;
    let mut out = WhyPolynomial::zero();
    for r in rewrite(&qb, &sat, &on) {
        let matched = match_provenance(&r.query, &[], &sat)?;
        out = poly_plus(
            &out,
            &poly_times(&WhyPolynomial::from_monomials([r.monomial]), &matched),
        );
    }
    Ok(out)
}

/// The concept `C_q` of a rooted tree-shaped query with one answer
/// variable, and a fresh concept name to define it.
pub fn tree_cq_reduction(q: &ConjunctiveQuery) -> Result<(Concept, ConceptName), QueryError> {
    let bad = |m: &str| Err(QueryError::NotTreeShaped(m.to_string()));
    if q.answer_vars.len() != 1 {
        return bad("exactly one answer variable is required");
    }
    let mut edges: Vec<(Variable, Role, Variable)> = Vec::new();
    let mut labels: HashMap<Variable, Vec<ConceptName>> = HashMap::new();
    for a in &q.atoms {
        match a {
            QueryAtom::Concept(c, Term::Var(v)) => {
                labels.entry(v.clone()).or_default().push(c.clone())
            }
            QueryAtom::Role(r, Term::Var(s), Term::Var(t)) => {
                if s == t {
                    return bad("self-loop");
                }
                edges.push((s.clone(), r.clone(), t.clone()));
            }
            _ => return bad("individuals are not allowed"),
        }
    }
    let vars = q.variables();
    if edges.len() + 1 != vars.len() {
        return bad("the role atoms do not form a tree");
    }
    let root = q.answer_vars[0].clone();
    let mut visited = HashSet::from([root.clone()]);
    let c = tree_concept(&root, &edges, &labels, &mut visited);
    if visited.len() != vars.len() {
        return bad("the query is not connected");
    }
    let taken: HashSet<String> = q
        .atoms
        .iter()
        .filter_map(|a| match a {
            QueryAtom::Concept(c, _) => Some(c.to_string()),
            _ => None,
        })
        .collect();
    let fresh = (0..)
        .map(|i| format!("_q{i}"))
        .find(|n| !taken.contains(n))
        .unwrap();
    Ok((c, ConceptName::new(fresh)))
}

fn tree_concept(
    v: &Variable,
    edges: &[(Variable, Role, Variable)],
    labels: &HashMap<Variable, Vec<ConceptName>>,
    visited: &mut HashSet<Variable>,
) -> Concept {
    let mut parts: Vec<Concept> = labels
        .get(v)
        .into_iter()
        .flatten()
        .map(|c| Concept::Name(c.clone()))
        .collect();
    for (s, r, t) in edges {
        let (role, next) = if s == v {
            (r.clone(), t)
        } else if t == v {
            (r.inv(), s)
        } else {
            continue;
        };
        if visited.insert(next.clone()) {
            let filler = tree_concept(next, edges, labels, visited);
            parts.push(Concept::exists(role, filler));
        }
    }
    Concept::and(parts)
}

/// Provenance of `q(a)` for a tree-shaped `q` via a fresh concept name.
pub fn tree_cq_provenance(
    o: &AnnotatedOntology,
    q: &ConjunctiveQuery,
    a: &Individual,
) -> Result<WhyPolynomial, QueryError> {
    let (c, mut name) = tree_cq_reduction(q)?;
    let taken = o.vocabulary().all_names();
    let mut i = 0;
    while taken.contains(name.as_str()) {
        name = ConceptName::new(format!("_q{i}"));
        i += 1;
    }
    let mut ext = o.clone();
    ext.push(AnnotatedAxiom::unit(Axiom::Gci(
        c,
        RightSide::Name(name.clone()),
    )));
    Ok(axiom_provenance(
        &ext,
        &Axiom::ConceptAssertion(Atomic::Name(name), a.clone()),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::textio::{parse_ontology, parse_query, parse_query_in};

    fn ind(s: &str) -> Individual {
        Individual::new(s)
    }

    const DIO_CQ: &str =
        "x1*x2*y2 + x1*x3*y2 + x1*x5*y3 + x2*x3*x4*y1*y2 + x3*x4*y1*y2 + x3*x4*x5*y1*y2*y3 \
                          + x2*x5*x6*y1*y2*y3 + x3*x5*x6*y1*y2*y3 + x5*x6*y1*y3";

    #[test]
    fn dionysus_query() {
        let p = cq_provenance(
            &fixtures::dionysus(),
            &fixtures::dionysus_query(),
            &[ind("dionysus")],
        )
        .unwrap();
        let got: BTreeSet<String> = p
            .monomials()
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect();
        let want: BTreeSet<String> = DIO_CQ.split(" + ").map(|s| s.trim().to_string()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn identity_rewriting_first() {
        let o = fixtures::dionysus();
        let q = fixtures::dionysus_query().bind(&[ind("dionysus")]).unwrap();
        let r = rewrite(&q, &saturate(&o).unwrap(), &o);
        assert_eq!(
            r[0],
            RewrittenQuery {
                query: q,
                monomial: Monomial::unit()
            }
        );
    }

    #[test]
    fn one_step_rewriting() {
        let o = parse_ontology("B <= exists R @ v").unwrap();
        let q = parse_query("q(x) :- A(x), R(x,y).").unwrap();
        let r = rewrite(&q, &saturate(&o).unwrap(), &o);
        let want = parse_query("q(x) :- A(x), B(x).").unwrap();
        assert!(
            r.contains(&RewrittenQuery {
                query: want,
                monomial: Monomial::var("v")
            }),
            "{r:?}"
        );
    }

    #[test]
    fn rewriting_uses_inverse_covers() {
        let o = parse_ontology("A <= exists R @ x1\nexists R- . A <= B @ x2\nA(a) @ x3\n").unwrap();
        let q = parse_query_in("q() :- R(a,y), B(y).", &BTreeSet::from([ind("a")])).unwrap();
        let p = cq_provenance(&o, &q, &[]).unwrap();
        assert_eq!(p.to_string(), "x1*x2*x3");
    }

    #[test]
    fn standard_rules_regression() {
        let o = fixtures::standard_rules();
        let p = cq_provenance(&o, &fixtures::standard_rules_query(), &[]).unwrap();
        assert!(p.contains(&Monomial::from_vars(["v", "v1", "u", "w"])));
        assert!(!p.contains(&Monomial::from_vars(["v", "v1", "v2", "u", "w"])));
    }

    #[test]
    fn matching_collapses_repeated_atoms() {
        let o = parse_ontology("R(a,b) @ x1\nR(a,c) @ x2\n").unwrap();
        let sat = saturate(&o).unwrap();
        let q = parse_query_in("q() :- R(a,y), R(a,z).", &BTreeSet::from([ind("a")])).unwrap();
        assert_eq!(
            match_provenance(&q, &[], &sat).unwrap().to_string(),
            "x1 + x1*x2 + x2"
        );
        let q = parse_query_in("q() :- R(a,b).", &BTreeSet::from([ind("a"), ind("b")])).unwrap();
        assert_eq!(match_provenance(&q, &[], &sat).unwrap().to_string(), "x1");
        let q = parse_query_in("q() :- R(b,a).", &BTreeSet::from([ind("a"), ind("b")])).unwrap();
        assert!(match_provenance(&q, &[], &sat).unwrap().is_zero());
        assert!(matches!(
            match_provenance(&q, &[ind("a")], &sat),
            Err(QueryError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn tree_reduction() {
        let (c, n) = tree_cq_reduction(&parse_query("q(x) :- Deity(x).").unwrap()).unwrap();
        assert_eq!(c.to_string(), "Deity");
        assert_eq!(n.as_str(), "_q0");
        let (c, _) = tree_cq_reduction(&fixtures::dionysus_query()).unwrap();
        assert_eq!(
            c,
            Concept::and([
                Concept::name("Deity"),
                Concept::exists(Role::new("parent"), Concept::Top)
            ])
        );
        let (c, _) = tree_cq_reduction(&parse_query("q(x) :- R(y,x).").unwrap()).unwrap();
        assert_eq!(c, Concept::exists(Role::inverse_of("R"), Concept::Top));
        assert!(tree_cq_reduction(&parse_query("q(x) :- R(x,y), S(y,x).").unwrap()).is_err());
        assert!(tree_cq_reduction(&parse_query("q(x,y) :- R(x,y).").unwrap()).is_err());
    }

    #[test]
    fn tree_path_agrees() {
        let o = fixtures::dionysus();
        let q = fixtures::dionysus_query();
        let a = fixtures::dionysus_individual();
        assert_eq!(
            tree_cq_provenance(&o, &q, &a).unwrap(),
            cq_provenance(&o, &q, &[a]).unwrap()
        );
    }

    #[test]
    fn canonical_renaming() {
        let q1 = parse_query("q(x) :- R(x,y), S(y,z).").unwrap();
        let q2 = parse_query("q(x) :- R(x,b), S(b,a).").unwrap();
        assert_eq!(q1.canonical(), q2.canonical());
        assert_eq!(q1.canonical().to_string(), "q(x) :- R(x,_x0), S(_x0,_x1).");
    }

    #[test]
    fn unsatisfiable_is_top() {
        let q = parse_query("q() :- A(y).").unwrap();
        assert!(cq_provenance(&fixtures::unsat(), &q, &[]).unwrap().is_top());
    }

    #[test]
    fn empty_abox_still_has_an_element() {
        let o = parse_ontology("top <= A @ x0\n").unwrap();
        let q = parse_query("q() :- A(v).").unwrap();
        assert_eq!(cq_provenance(&o, &q, &[]).unwrap().to_string(), "x0");
        let q = parse_query("q(v) :- A(v).").unwrap();
        assert_eq!(
            cq_provenance(&o, &q, &[Individual::new("c")])
                .unwrap()
                .to_string(),
            "x0"
        );
    }
}
