//! Brute-force reference reasoner used to cross-check provenance results.
//!
//! Classical entailment is decided on a canonical model built from element
//! types: each anonymous element is described by the set of concept names it
//! must satisfy, computed as a least fixpoint together with the types of its
//! parent and children. Nothing here touches monomials. Justifications are
//! found by trying subsets in order of size.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::explain::Target;
use crate::model::{
    AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, Individual, RightSide, Role,
};
use crate::normalize::normalize;
use crate::query::{ConjunctiveQuery, QueryAtom, QueryError, Term};

pub const DEFAULT_BOUND: usize = 12;

/// Nodes allowed in an unfolded model before a query check gives up.
const NODE_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{size} axioms exceed the oracle bound of {bound}")]
    BoundExceeded { size: usize, bound: usize },
    #[error("the unfolded model needs more than {0} elements")]
    ModelTooLarge(usize),
    #[error(transparent)]
    Query(#[from] QueryError),
}

type Type = BTreeSet<Atomic>;

fn top_type() -> Type {
    BTreeSet::from([Atomic::Top])
}

#[derive(Default)]
struct Tbox {
    sub: Vec<(Vec<Atomic>, Atomic)>,
    /// `∃P.A ⊑ B`
    res: Vec<(Role, Atomic, Atomic)>,
    /// `A ⊑ ∃P`
    ex: Vec<(Atomic, Role)>,
    /// Reflexive-transitive role hierarchy, closed under inverses.
    sup: BTreeMap<Role, BTreeSet<Role>>,
    neg: HashSet<(Role, Role)>,
}

impl Tbox {
    fn supers(&self, r: &Role) -> BTreeSet<Role> {
        self.sup
            .get(r)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([r.clone()]))
    }

    fn clashes(&self, roles: &BTreeSet<Role>) -> bool {
        roles.iter().any(|p| {
            roles
                .iter()
                .any(|q| self.neg.contains(&(p.clone(), q.clone())))
        })
    }

    /// Starting type of a `q`-child of an element of type `parent`.
    fn child_seed(&self, parent: &Type, q: &Role) -> Type {
        let mut t = top_type();
        for q2 in self.supers(q) {
            let back = q2.inv();
            for (p, a, b) in &self.res {
                if *p == back && parent.contains(a) {
                    t.insert(b.clone());
                }
            }
        }
        t
    }

    fn children(&self, t: &Type) -> Vec<Role> {
        let mut out: Vec<Role> = self
            .ex
            .iter()
            .filter(|(a, _)| t.contains(a))
            .map(|(_, q)| q.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Applies the local rules to `t` given its neighbours (role from the
    /// element to the neighbour, the neighbour's type).
    fn close(&self, t: &mut Type, neighbours: &[(BTreeSet<Role>, &Type)]) {
        loop {
            let before = t.len();
            for (l, b) in &self.sub {
                if l.iter().all(|x| t.contains(x)) {
                    t.insert(b.clone());
                }
            }
            for (roles, nt) in neighbours {
                if nt.contains(&Atomic::Bot) || self.clashes(roles) {
                    t.insert(Atomic::Bot);
                }
                for (p, a, b) in &self.res {
                    if roles.contains(p) && nt.contains(a) {
                        t.insert(b.clone());
                    }
                }
            }
            if t.len() == before {
                return;
            }
        }
    }
}

type ConceptFacts = Vec<(Individual, Atomic)>;
type RoleFacts = Vec<(Individual, Role, Individual)>;

fn build_tbox(axioms: &[Axiom]) -> (Tbox, ConceptFacts, RoleFacts) {
    let mut tb = Tbox::default();
    let mut ca = Vec::new();
    let mut ra = Vec::new();
    let mut ris = Vec::new();
    let mut roles = BTreeSet::new();
    let atom = |c: &Concept| c.as_atomic().expect("normal form");
    for a in axioms {
        match a {
            Axiom::ConceptAssertion(c, i) => ca.push((i.clone(), c.clone())),
            Axiom::RoleAssertion(r, x, y) => {
                let r = Role::new(r.clone());
                roles.insert(r.clone());
                ra.push((x.clone(), r, y.clone()));
            }
            Axiom::Gci(lhs, RightSide::ExistsTop(p)) => {
                roles.insert(p.clone());
                tb.ex.push((atom(lhs), p.clone()));
            }
            Axiom::Gci(lhs, rhs) => {
                let b = match rhs {
                    RightSide::Name(n) => Atomic::Name(n.clone()),
                    _ => Atomic::Bot,
                };
                match lhs {
                    Concept::Exists(p, f) => {
                        roles.insert(p.clone());
                        tb.res.push((p.clone(), atom(f), b));
                    }
                    Concept::And(parts) => tb.sub.push((parts.iter().map(atom).collect(), b)),
                    c => tb.sub.push((vec![atom(c)], b)),
                }
            }
            Axiom::Ri(p, q) => {
                roles.insert(p.clone());
                roles.insert(q.clone());
                ris.push((p.clone(), q.clone()));
                ris.push((p.inv(), q.inv()));
            }
            Axiom::NegRi(p, q) => {
                for (x, y) in [(p.clone(), q.clone()), (p.inv(), q.inv())] {
                    tb.neg.insert((x.clone(), y.clone()));
                    tb.neg.insert((y, x));
                }
            }
        }
    }
    let all: BTreeSet<Role> = roles.iter().flat_map(|r| [r.clone(), r.inv()]).collect();
    for r in &all {
        tb.sup.insert(r.clone(), BTreeSet::from([r.clone()]));
    }
    loop {
        let mut changed = false;
        for (p, q) in &ris {
            let above = tb.sup[q].clone();
            for s in tb.sup.values_mut() {
                if s.contains(p) && !above.is_subset(s) {
                    s.extend(above.iter().cloned());
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (tb, ca, ra)
}

/// The canonical model of a classical normal-form ontology, folded into types.
struct Model {
    tb: Tbox,
    /// Seed type of an anonymous element to its full type.
    table: BTreeMap<Type, Type>,
    inds: BTreeMap<Individual, Type>,
    /// Roles linking two individuals, sup-closed, in both directions.
    links: BTreeMap<(Individual, Individual), BTreeSet<Role>>,
}

impl Model {
    fn build(axioms: &[Axiom], extra: &BTreeSet<Individual>) -> Model {
        let (tb, ca, ra) = build_tbox(axioms);
        let mut inds: BTreeMap<Individual, Type> =
            extra.iter().map(|i| (i.clone(), top_type())).collect();
        let mut links: BTreeMap<(Individual, Individual), BTreeSet<Role>> = BTreeMap::new();
        for (i, c) in ca {
            inds.entry(i).or_insert_with(top_type).insert(c);
        }
        for (x, r, y) in ra {
            inds.entry(x.clone()).or_insert_with(top_type);
            inds.entry(y.clone()).or_insert_with(top_type);
            for p in tb.supers(&r) {
                links
                    .entry((y.clone(), x.clone()))
                    .or_default()
                    .insert(p.inv());
                links.entry((x.clone(), y.clone())).or_default().insert(p);
            }
        }
        let mut m = Model {
            tb,
            table: BTreeMap::from([(top_type(), top_type())]),
            inds,
            links,
        };
        m.fixpoint();
        m
    }

    fn child_types(&self, t: &Type) -> Vec<(BTreeSet<Role>, Type)> {
        self.tb
            .children(t)
            .into_iter()
            .map(|q| {
                let seed = self.tb.child_seed(t, &q);
                let ty = self.table.get(&seed).cloned().unwrap_or(seed);
                (self.tb.supers(&q), ty)
            })
            .collect()
    }

    fn fixpoint(&mut self) {
        loop {
            let mut changed = false;
            let parents: Vec<Type> = self
                .table
                .values()
                .chain(self.inds.values())
                .cloned()
                .collect();
            for t in &parents {
                for q in self.tb.children(t) {
                    let seed = self.tb.child_seed(t, &q);
                    if !self.table.contains_key(&seed) {
                        self.table.insert(seed.clone(), seed);
                        changed = true;
                    }
                }
            }
            let seeds: Vec<Type> = self.table.keys().cloned().collect();
            for s in seeds {
                let mut t = self.table[&s].clone();
                let kids = self.child_types(&t);
                let nb: Vec<(BTreeSet<Role>, &Type)> =
                    kids.iter().map(|(r, k)| (r.clone(), k)).collect();
                self.tb.close(&mut t, &nb);
                if t != self.table[&s] {
                    self.table.insert(s, t);
                    changed = true;
                }
            }
            let names: Vec<Individual> = self.inds.keys().cloned().collect();
            for a in names {
                let mut t = self.inds[&a].clone();
                let kids = self.child_types(&t);
                let mut nb: Vec<(BTreeSet<Role>, &Type)> =
                    kids.iter().map(|(r, k)| (r.clone(), k)).collect();
                for ((x, y), roles) in &self.links {
                    if *x == a {
                        nb.push((roles.clone(), &self.inds[y]));
                    }
                }
                self.tb.close(&mut t, &nb);
                if t != self.inds[&a] {
                    self.inds.insert(a, t);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn consistent(&self) -> bool {
        !self.table[&top_type()].contains(&Atomic::Bot)
            && self.inds.values().all(|t| !t.contains(&Atomic::Bot))
    }

    fn has_successor(&self, a: &Individual, p: &Role) -> bool {
        let t = &self.inds[a];
        self.links
            .iter()
            .any(|((x, _), rs)| x == a && rs.contains(p))
            || self
                .tb
                .children(t)
                .iter()
                .any(|q| self.tb.supers(q).contains(p))
    }

    fn entails_assertion(&self, alpha: &Axiom) -> bool {
        match alpha {
            Axiom::ConceptAssertion(c, a) => match self.inds.get(a) {
                Some(t) => t.contains(c),
                None => *c == Atomic::Top || self.table[&top_type()].contains(c),
            },
            Axiom::RoleAssertion(r, a, b) => self
                .links
                .get(&(a.clone(), b.clone()))
                .is_some_and(|rs| rs.contains(&Role::new(r.clone()))),
            _ => false,
        }
    }

    /// Whether the Boolean query holds, by matching it into the model unfolded
    /// as deep as the query has variables.
    fn matches(&self, q: &ConjunctiveQuery) -> Result<bool, OracleError> {
        let depth = q.variables().len();
        let mut types: Vec<Type> = Vec::new();
        let mut index: BTreeMap<Individual, usize> = BTreeMap::new();
        let mut edges: HashSet<(usize, Role, usize)> = HashSet::new();
        for (a, t) in &self.inds {
            index.insert(a.clone(), types.len());
            types.push(t.clone());
        }
        for ((x, y), rs) in &self.links {
            for r in rs {
                edges.insert((index[x], r.clone(), index[y]));
            }
        }
        // an anonymous element stands for the non-empty domain
        types.push(self.table[&top_type()].clone());
        let mut frontier: Vec<usize> = (0..types.len()).collect();
        for _ in 0..depth {
            let mut next = Vec::new();
            for n in frontier {
                for q in self.tb.children(&types[n].clone()) {
                    let seed = self.tb.child_seed(&types[n], &q);
                    let c = types.len();
                    types.push(self.table.get(&seed).cloned().unwrap_or(seed));
                    for p in self.tb.supers(&q) {
                        edges.insert((c, p.inv(), n));
                        edges.insert((n, p, c));
                    }
                    next.push(c);
                }
                if types.len() > NODE_LIMIT {
                    return Err(OracleError::ModelTooLarge(NODE_LIMIT));
                }
            }
            frontier = next;
        }
        let atoms: Vec<&QueryAtom> = q.atoms.iter().collect();
        let vars: Vec<_> = q.variables().into_iter().collect();
        let mut assign: BTreeMap<_, usize> = BTreeMap::new();
        let node = |t: &Term, assign: &BTreeMap<_, usize>| match t {
            Term::Ind(a) => index.get(a).copied(),
            Term::Var(v) => assign.get(v).copied(),
        };
        let holds = |at: &QueryAtom, assign: &BTreeMap<_, usize>| -> Option<bool> {
            match at {
                QueryAtom::Concept(c, t) => {
                    let n = node(t, assign)?;
                    Some(types[n].contains(&Atomic::Name(c.clone())))
                }
                QueryAtom::Role(r, s, t) => {
                    let (x, y) = (node(s, assign)?, node(t, assign)?);
                    Some(edges.contains(&(x, r.clone(), y)))
                }
            }
        };
        // an individual of the query unknown to the model has only top
        for at in &atoms {
            if let QueryAtom::Concept(_, Term::Ind(a))
            | QueryAtom::Role(_, Term::Ind(a), _)
            | QueryAtom::Role(_, _, Term::Ind(a)) = at
            {
                if !index.contains_key(a) {
                    return Ok(false);
                }
            }
        }
        fn search<V: Ord + Clone>(
            i: usize,
            vars: &[V],
            n: usize,
            assign: &mut BTreeMap<V, usize>,
            ok: &dyn Fn(&BTreeMap<V, usize>) -> bool,
        ) -> bool {
            if !ok(assign) {
                return false;
            }
            if i == vars.len() {
                return true;
            }
            for node in 0..n {
                assign.insert(vars[i].clone(), node);
                if search(i + 1, vars, n, assign, ok) {
                    return true;
                }
            }
            assign.remove(&vars[i]);
            false
        }
        let ok = |a: &BTreeMap<_, usize>| atoms.iter().all(|at| holds(at, a) != Some(false));
        Ok(search(0, &vars, types.len(), &mut assign, &ok))
    }
}

struct FreshInds {
    taken: HashSet<String>,
    next: usize,
}

impl FreshInds {
    fn get(&mut self) -> Individual {
        loop {
            let n = format!("_o{}", self.next);
            self.next += 1;
            if self.taken.insert(n.clone()) {
                return Individual::new(n);
            }
        }
    }
}

fn instance(c: &Concept, a: &Individual, fresh: &mut FreshInds, out: &mut Vec<Axiom>) {
    match c {
        Concept::Top | Concept::Bot => out.push(Axiom::ConceptAssertion(
            c.as_atomic().expect("atomic"),
            a.clone(),
        )),
        Concept::Name(n) => out.push(Axiom::ConceptAssertion(Atomic::Name(n.clone()), a.clone())),
        Concept::Exists(p, f) => {
            let b = fresh.get();
            out.push(Axiom::role_fact(p, a.clone(), b.clone()));
            instance(f, &b, fresh, out);
        }
        Concept::And(parts) => {
            for p in parts {
                instance(p, a, fresh, out);
            }
        }
    }
}

fn classical_axioms(s: &AnnotatedOntology) -> Vec<Axiom> {
    normalize(s).iter().map(|a| a.axiom.clone()).collect()
}

/// Classical entailment over a normalized axiom list.
fn entails_in(base: &[Axiom], names: HashSet<String>, t: &Target) -> Result<bool, OracleError> {
    match t {
        Target::Axiom(alpha) if alpha.is_assertion() => {
            let m = Model::build(base, &BTreeSet::new());
            Ok(!m.consistent() || m.entails_assertion(alpha))
        }
        Target::Axiom(alpha) => {
            let mut fresh = FreshInds {
                taken: names,
                next: 0,
            };
            let (a, b) = (fresh.get(), fresh.get());
            let mut ext = base.to_vec();
            match alpha {
                Axiom::Gci(lhs, _) => {
                    let mut inst = Vec::new();
                    instance(lhs, &a, &mut fresh, &mut inst);
                    let lhs_o: AnnotatedOntology =
                        inst.into_iter().map(AnnotatedAxiom::unit).collect();
                    ext.extend(classical_axioms(&lhs_o));
                }
                Axiom::Ri(p, _) => ext.push(Axiom::role_fact(p, a.clone(), b.clone())),
                Axiom::NegRi(p, q) => {
                    ext.push(Axiom::role_fact(p, a.clone(), b.clone()));
                    ext.push(Axiom::role_fact(q, a.clone(), b.clone()));
                }
                _ => unreachable!("assertions handled above"),
            }
            let m = Model::build(&ext, &BTreeSet::from([a.clone()]));
            if !m.consistent() {
                return Ok(true);
            }
            Ok(match alpha {
                Axiom::Gci(_, RightSide::Name(n)) => {
                    m.entails_assertion(&Axiom::ConceptAssertion(Atomic::Name(n.clone()), a))
                }
                Axiom::Gci(_, RightSide::ExistsTop(p)) => m.has_successor(&a, p),
                Axiom::Ri(_, q) => m.entails_assertion(&Axiom::role_fact(q, a, b)),
                _ => false,
            })
        }
        Target::Query(q, tuple) => {
            let bq = q.bind(tuple)?;
            let inds: BTreeSet<Individual> = bq
                .atoms
                .iter()
                .flat_map(|at| match at {
                    QueryAtom::Concept(_, t) => vec![t.clone()],
                    QueryAtom::Role(_, s, t) => vec![s.clone(), t.clone()],
                })
                .filter_map(|t| match t {
                    Term::Ind(a) => Some(a),
                    Term::Var(_) => None,
                })
                .collect();
            let m = Model::build(base, &inds);
            if !m.consistent() {
                return Ok(true);
            }
            m.matches(&bq)
        }
    }
}

fn names_of(o: &AnnotatedOntology, t: &Target) -> HashSet<String> {
    let mut names = o.vocabulary().all_names();
    if let Target::Axiom(a) = t {
        let mut v = crate::model::Vocabulary::default();
        a.collect_vocabulary(&mut v);
        names.extend(v.all_names());
    }
    names
}

fn check_bound(size: usize, bound: usize) -> Result<(), OracleError> {
    if size > bound {
        Err(OracleError::BoundExceeded { size, bound })
    } else {
        Ok(())
    }
}

/// Classical entailment of the target by `s`, annotations ignored.
pub fn brute_classical_entails(s: &AnnotatedOntology, t: &Target) -> Result<bool, OracleError> {
    brute_classical_entails_with(s, t, DEFAULT_BOUND)
}

pub fn brute_classical_entails_with(
    s: &AnnotatedOntology,
    t: &Target,
    bound: usize,
) -> Result<bool, OracleError> {
    check_bound(s.len(), bound)?;
    entails_in(&classical_axioms(s), names_of(s, t), t)
}

/// All minimal subsets of `o` classically entailing the target.
pub fn brute_justifications(
    o: &AnnotatedOntology,
    t: &Target,
) -> Result<BTreeSet<BTreeSet<AnnotatedAxiom>>, OracleError> {
    Ok(
        brute_justifications_many(o, std::slice::from_ref(t), DEFAULT_BOUND)?
            .pop()
            .expect("one target"),
    )
}

/// Justifications for several targets, visiting every subset once.
pub fn brute_justifications_many(
    o: &AnnotatedOntology,
    targets: &[Target],
    bound: usize,
) -> Result<Vec<BTreeSet<BTreeSet<AnnotatedAxiom>>>, OracleError> {
    check_bound(o.len(), bound)?;
    let n = o.len();
    let mut found: Vec<Vec<u32>> = vec![Vec::new(); targets.len()];
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let open: Vec<usize> = (0..targets.len())
            .filter(|&i| found[i].iter().all(|&f| f & !mask != 0))
            .collect();
        if open.is_empty() {
            continue;
        }
        let sub: AnnotatedOntology = o
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect();
        let base = classical_axioms(&sub);
        let model = Model::build(&base, &BTreeSet::new());
        for i in open {
            let hit = match &targets[i] {
                Target::Axiom(a) if a.is_assertion() => {
                    !model.consistent() || model.entails_assertion(a)
                }
                t => entails_in(&base, names_of(o, t), t)?,
            };
            if hit {
                found[i].push(mask);
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|ms| {
            ms.into_iter()
                .map(|m| {
                    o.iter()
                        .enumerate()
                        .filter(|(i, _)| m >> i & 1 == 1)
                        .map(|(_, a)| a.clone())
                        .collect()
                })
                .collect()
        })
        .collect())
}
