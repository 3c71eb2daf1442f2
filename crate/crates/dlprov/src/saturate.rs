//! Annotated completion: the initial set, the completion rules over
//! assertions and TBox axioms, the bounded variant for the restricted
//! profile, and a monomial-free classical mode.
//!
//! The engine interns every symbol, stores monomials as bitsets and runs a
//! semi-naive FIFO worklist. Each new (axiom, monomial) pair is joined
//! against facts already stored; a join with several premises is found
//! when its last premise is processed.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::model::{
    check_profile, AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, ConceptName,
    Individual, Profile, RightSide, Role, RoleName,
};
use crate::semiring::{Monomial, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SaturateError {
    #[error("axiom `{0}` is not in normal form (normalize first)")]
    NotNormalForm(String),
    #[error("the ontology is not in the restricted profile; bounded saturation is unavailable")]
    NotELHIrestr,
}

/// A consequence stored in a saturation set. Subsumptions carry a set of
/// atomic concepts on the left (empty means ⊤).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedAxiom {
    Concept(Atomic, Individual),
    Role(RoleName, Individual, Individual),
    Sub(BTreeSet<Atomic>, Atomic),
    Exists(Atomic, Role),
    Restriction(Role, Atomic, Atomic),
    Ri(Role, Role),
    NegRi(Role, Role),
}

impl DerivedAxiom {
    /// The stored form of a normal axiom; `None` for a non-normal GCI.
    pub fn from_axiom(a: &Axiom) -> Option<DerivedAxiom> {
        let atomic_lhs = |c: &Concept| -> Option<BTreeSet<Atomic>> {
            Some(match c {
                Concept::Top => BTreeSet::new(),
                Concept::Name(n) => BTreeSet::from([Atomic::Name(n.clone())]),
                Concept::And(v) => v.iter().map(|x| x.as_atomic()).collect::<Option<_>>()?,
                _ => return None,
            })
        };
        Some(match a {
            Axiom::ConceptAssertion(c, i) => DerivedAxiom::Concept(c.clone(), i.clone()),
            Axiom::RoleAssertion(r, a, b) => DerivedAxiom::Role(r.clone(), a.clone(), b.clone()),
            Axiom::Ri(p, q) => DerivedAxiom::Ri(p.clone(), q.clone()),
            Axiom::NegRi(p, q) => DerivedAxiom::NegRi(p.clone(), q.clone()),
            Axiom::Gci(lhs, RightSide::ExistsTop(p)) => {
                let a = match lhs {
                    Concept::Top => Atomic::Top,
                    Concept::Name(n) => Atomic::Name(n.clone()),
                    _ => return None,
                };
                DerivedAxiom::Exists(a, p.clone())
            }
            Axiom::Gci(lhs, rhs) => {
                let b = match rhs {
                    RightSide::Name(n) => Atomic::Name(n.clone()),
                    RightSide::Bot => Atomic::Bot,
                    RightSide::ExistsTop(_) => unreachable!(),
                };
                match lhs {
                    Concept::Exists(p, f) => {
                        DerivedAxiom::Restriction(p.clone(), f.as_atomic()?, b)
                    }
                    other => DerivedAxiom::Sub(atomic_lhs(other)?, b),
                }
            }
        })
    }

    /// Back to an [`Axiom`] when the shape is expressible (⊤/⊥ inside a
    /// left-hand conjunction or on the right of `⊑` is not).
    pub fn to_axiom(&self) -> Option<Axiom> {
        let rhs = |b: &Atomic| match b {
            Atomic::Name(n) => Some(RightSide::Name(n.clone())),
            Atomic::Bot => Some(RightSide::Bot),
            Atomic::Top => None,
        };
        Some(match self {
            DerivedAxiom::Concept(c, a) => Axiom::ConceptAssertion(c.clone(), a.clone()),
            DerivedAxiom::Role(r, a, b) => Axiom::RoleAssertion(r.clone(), a.clone(), b.clone()),
            DerivedAxiom::Sub(l, b) => {
                if l.contains(&Atomic::Bot) {
                    return None;
                }
                Axiom::Gci(Concept::and(l.iter().map(Atomic::to_concept)), rhs(b)?)
            }
            DerivedAxiom::Exists(a, p) => {
                Axiom::Gci(a.to_concept(), RightSide::ExistsTop(p.clone()))
            }
            DerivedAxiom::Restriction(p, f, b) => {
                Axiom::Gci(Concept::exists(p.clone(), f.to_concept()), rhs(b)?)
            }
            DerivedAxiom::Ri(p, q) => Axiom::Ri(p.clone(), q.clone()),
            DerivedAxiom::NegRi(p, q) => Axiom::NegRi(p.clone(), q.clone()),
        })
    }

    pub fn is_assertion(&self) -> bool {
        matches!(self, DerivedAxiom::Concept(..) | DerivedAxiom::Role(..))
    }
}

impl fmt::Display for DerivedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivedAxiom::Concept(c, a) => write!(f, "{c}({a})"),
            DerivedAxiom::Role(r, a, b) => write!(f, "{r}({a},{b})"),
            DerivedAxiom::Sub(l, b) => {
                if l.is_empty() {
                    f.write_str("top")?;
                }
                for (i, c) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, " <= {b}")
            }
            DerivedAxiom::Exists(a, p) => write!(f, "{a} <= exists {p}"),
            DerivedAxiom::Restriction(p, Atomic::Top, b) => write!(f, "exists {p} <= {b}"),
            DerivedAxiom::Restriction(p, a, b) => write!(f, "exists {p} . {a} <= {b}"),
            DerivedAxiom::Ri(p, q) => write!(f, "{p} <= {q}"),
            DerivedAxiom::NegRi(p, q) => write!(f, "{p} and {q} <= bot"),
        }
    }
}

impl fmt::Debug for DerivedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Derived axioms with all their monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SaturationSet {
    entries: BTreeMap<DerivedAxiom, BTreeSet<Monomial>>,
}

impl SaturationSet {
    pub fn get(&self, a: &DerivedAxiom) -> Option<&BTreeSet<Monomial>> {
        self.entries.get(a)
    }

    pub fn contains(&self, a: &DerivedAxiom, m: &Monomial) -> bool {
        self.entries.get(a).is_some_and(|s| s.contains(m))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DerivedAxiom, &BTreeSet<Monomial>)> {
        self.entries.iter()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &DerivedAxiom> {
        self.entries.keys()
    }

    /// Number of distinct derived axioms.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of (axiom, monomial) pairs.
    pub fn pair_count(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    /// An individual `a` with `⊥(a)` derived, if any.
    pub fn bot_witness(&self) -> Option<&Individual> {
        self.entries.keys().find_map(|k| match k {
            DerivedAxiom::Concept(Atomic::Bot, a) => Some(a),
            _ => None,
        })
    }

    /// `⊤ ⊑ ⊥` derived or some `⊥(a)` derived.
    pub fn is_inconsistent(&self) -> bool {
        self.bot_witness().is_some()
            || self
                .entries
                .contains_key(&DerivedAxiom::Sub(BTreeSet::new(), Atomic::Bot))
    }

    /// Keeps the entries selected by the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&DerivedAxiom, &Monomial) -> bool) -> SaturationSet {
        let mut entries = BTreeMap::new();
        for (k, ms) in &self.entries {
            let kept: BTreeSet<Monomial> = ms.iter().filter(|m| keep(k, m)).cloned().collect();
            if !kept.is_empty() {
                entries.insert(k.clone(), kept);
            }
        }
        SaturationSet { entries }
    }

    /// `axiom @ m1 | m2 | ...`, one line per entry.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, ms) in &self.entries {
            let ms: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
            out.push_str(&format!("{k} @ {}\n", ms.join(" | ")));
        }
        out
    }
}

/// One merged monomial per derived axiom.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinSaturation {
    entries: BTreeMap<DerivedAxiom, Monomial>,
}

impl LinSaturation {
    pub fn get(&self, a: &DerivedAxiom) -> Option<&Monomial> {
        self.entries.get(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DerivedAxiom, &Monomial)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, m)| format!("{k} @ {m}\n"))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ruleset {
    /// Every completion rule.
    Full,
    /// The variant for the restricted profile (binary chaining, ⊤-fillers
    /// only in the existential rule, plus its two extra rules).
    Restricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Merge {
    /// Keep every monomial (Why[X]).
    Collect,
    /// Union into one monomial per axiom (Lin[X]).
    Union,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturationOptions {
    pub ruleset: Ruleset,
    pub merge: Merge,
    /// Discard monomials with more variables than this.
    pub bound: Option<usize>,
    /// Skip chaining joins whose result another join order also produces.
    /// The output is the same either way.
    pub regroup_chains: bool,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions {
            ruleset: Ruleset::Full,
            merge: Merge::Collect,
            bound: None,
            regroup_chains: true,
        }
    }
}

fn require_normal(o: &AnnotatedOntology) -> Result<(), SaturateError> {
    match o.iter().find(|a| !a.axiom.is_normal()) {
        Some(a) => Err(SaturateError::NotNormalForm(a.axiom.to_string())),
        None => Ok(()),
    }
}

/// The input axioms plus the trivially entailed ones the rules start from.
pub fn init_set(o: &AnnotatedOntology) -> Result<SaturationSet, SaturateError> {
    require_normal(o)?;
    let mut entries: BTreeMap<DerivedAxiom, BTreeSet<Monomial>> = BTreeMap::new();
    for (k, m) in initial_facts(o) {
        entries.entry(k).or_default().insert(m);
    }
    Ok(SaturationSet { entries })
}

fn initial_facts(o: &AnnotatedOntology) -> Vec<(DerivedAxiom, Monomial)> {
    let v = o.vocabulary();
    let one = Monomial::unit;
    let mut out = Vec::new();
    for a in o {
        let d = DerivedAxiom::from_axiom(&a.axiom).expect("normal form checked");
        match &a.axiom {
            Axiom::Ri(p, q) => out.push((DerivedAxiom::Ri(p.inv(), q.inv()), a.annotation.clone())),
            Axiom::NegRi(p, q) => {
                if let Axiom::NegRi(x, y) = Axiom::neg_ri(p.inv(), q.inv()) {
                    out.push((DerivedAxiom::NegRi(x, y), a.annotation.clone()));
                }
            }
            _ => {}
        }
        out.push((d, a.annotation.clone()));
    }
    for i in &v.individuals {
        out.push((DerivedAxiom::Concept(Atomic::Top, i.clone()), one()));
    }
    let mut atoms: Vec<Atomic> = vec![Atomic::Top, Atomic::Bot];
    atoms.extend(v.concepts.iter().cloned().map(Atomic::Name));
    for a in atoms {
        let lhs = if a == Atomic::Top {
            BTreeSet::new()
        } else {
            BTreeSet::from([a.clone()])
        };
        out.push((DerivedAxiom::Sub(lhs, a), one()));
    }
    for r in &v.roles {
        let p = Role::new(r.clone());
        out.push((DerivedAxiom::Ri(p.clone(), p.clone()), one()));
        out.push((DerivedAxiom::Ri(p.inv(), p.inv()), one()));
        out.push((
            DerivedAxiom::Restriction(p.clone(), Atomic::Bot, Atomic::Bot),
            one(),
        ));
        out.push((
            DerivedAxiom::Restriction(p.inv(), Atomic::Bot, Atomic::Bot),
            one(),
        ));
    }
    out
}

pub fn saturate(o: &AnnotatedOntology) -> Result<SaturationSet, SaturateError> {
    saturate_with(o, SaturationOptions::default())
}

/// Restricted-profile saturation keeping monomials with at most `k` variables.
pub fn saturate_k(o: &AnnotatedOntology, k: usize) -> Result<SaturationSet, SaturateError> {
    require_normal(o)?;
    if check_profile(o) != Profile::ELHIrestr {
        return Err(SaturateError::NotELHIrestr);
    }
    saturate_with(
        o,
        SaturationOptions {
            ruleset: Ruleset::Restricted,
            bound: Some(k),
            ..Default::default()
        },
    )
}

pub fn saturate_with(
    o: &AnnotatedOntology,
    opts: SaturationOptions,
) -> Result<SaturationSet, SaturateError> {
    require_normal(o)?;
    let entries = run(o, opts, false);
    Ok(SaturationSet { entries })
}

/// Lin[X] saturation: the rules' outputs are merged by union.
pub fn lin_saturate(
    o: &AnnotatedOntology,
    ruleset: Ruleset,
) -> Result<LinSaturation, SaturateError> {
    require_normal(o)?;
    let opts = SaturationOptions {
        ruleset,
        merge: Merge::Union,
        ..Default::default()
    };
    let entries = run(o, opts, false)
        .into_iter()
        .map(|(k, mut v)| {
            let m = v.pop_first().expect("merged entries hold one monomial");
            (k, m)
        })
        .collect();
    Ok(LinSaturation { entries })
}

fn classical_ruleset(o: &AnnotatedOntology) -> Ruleset {
    if check_profile(o) == Profile::ELHIrestr {
        Ruleset::Restricted
    } else {
        Ruleset::Full
    }
}

/// The same rules with monomials ignored.
pub fn classical_saturate(o: &AnnotatedOntology) -> Result<BTreeSet<DerivedAxiom>, SaturateError> {
    require_normal(o)?;
    Ok(classical_with(o, classical_ruleset(o)))
}

fn classical_with(o: &AnnotatedOntology, ruleset: Ruleset) -> BTreeSet<DerivedAxiom> {
    let opts = SaturationOptions {
        ruleset,
        ..Default::default()
    };
    run(o, opts, true).into_keys().collect()
}

pub fn is_satisfiable(o: &AnnotatedOntology) -> Result<bool, SaturateError> {
    Ok(unsat_witness(o)?.is_none())
}

/// Why the ontology is unsatisfiable: `Some(Some(a))` for a derived `⊥(a)`,
/// `Some(None)` for a derived `⊤ ⊑ ⊥`.
pub fn unsat_witness(o: &AnnotatedOntology) -> Result<Option<Option<Individual>>, SaturateError> {
    let sat = classical_saturate(o)?;
    Ok(inconsistency(&sat))
}

fn inconsistency(sat: &BTreeSet<DerivedAxiom>) -> Option<Option<Individual>> {
    for k in sat {
        if let DerivedAxiom::Concept(Atomic::Bot, a) = k {
            return Some(Some(a.clone()));
        }
    }
    if sat.contains(&DerivedAxiom::Sub(BTreeSet::new(), Atomic::Bot)) {
        return Some(None);
    }
    None
}

/// Roles `P` such that some concept name `C` has `O ⊨ C ⊑ ∃P`. Every
/// concept name gets a fresh individual, plus one for an arbitrary concept.
pub(crate) fn roles_with_entailed_successors(o: &AnnotatedOntology) -> HashSet<Role> {
    let v = o.vocabulary();
    let all_roles = || -> HashSet<Role> {
        v.roles
            .iter()
            .flat_map(|r| [Role::new(r.clone()), Role::inverse_of(r.clone())])
            .collect()
    };
    let mut taken = v.all_names();
    let mut counter = 0usize;
    let mut fresh = || loop {
        let n = format!("_i{counter}");
        counter += 1;
        if taken.insert(n.clone()) {
            return Individual::new(n);
        }
    };
    let mut ext = o.clone();
    let mut probes = Vec::new();
    for c in v
        .concepts
        .iter()
        .map(|c| Atomic::Name(c.clone()))
        .chain([Atomic::Top])
    {
        let i = fresh();
        ext.push(AnnotatedAxiom::unit(Axiom::ConceptAssertion(c, i.clone())));
        probes.push(i);
    }
    let sat = classical_with(&ext, Ruleset::Full);
    let has = |k: DerivedAxiom| sat.contains(&k);
    if has(DerivedAxiom::Sub(BTreeSet::new(), Atomic::Bot))
        || v.individuals
            .iter()
            .any(|a| has(DerivedAxiom::Concept(Atomic::Bot, a.clone())))
    {
        return all_roles();
    }
    let mut required = HashSet::new();
    for i in &probes {
        if has(DerivedAxiom::Concept(Atomic::Bot, i.clone())) {
            return all_roles();
        }
        for k in &sat {
            let DerivedAxiom::Exists(a, q) = k else {
                continue;
            };
            if !has(DerivedAxiom::Concept(a.clone(), i.clone())) {
                continue;
            }
            for k2 in &sat {
                if let DerivedAxiom::Ri(q2, p) = k2 {
                    if q2 == q {
                        required.insert(p.clone());
                    }
                }
            }
        }
    }
    required
}

// ---------------------------------------------------------------------------
// Engine

const TOP: u32 = 0;
const BOT: u32 = 1;

fn inv(p: u32) -> u32 {
    p ^ 1
}

fn base(p: u32) -> u32 {
    p >> 1
}

fn is_inv(p: u32) -> bool {
    p & 1 == 1
}

fn role_id(base: u32, inverted: bool) -> u32 {
    base * 2 + inverted as u32
}

trait Mono: Clone + Eq + Hash + fmt::Debug {
    fn unit(words: usize) -> Self;
    fn set(&mut self, bit: usize);
    fn union(&self, o: &Self) -> Self;
    fn count(&self) -> usize;
    fn bits(&self) -> Vec<usize>;
}

impl Mono for () {
    fn unit(_: usize) {}
    fn set(&mut self, _: usize) {}
    fn union(&self, _: &Self) {}
    fn count(&self) -> usize {
        0
    }
    fn bits(&self) -> Vec<usize> {
        Vec::new()
    }
}

impl Mono for u64 {
    fn unit(_: usize) -> Self {
        0
    }
    fn set(&mut self, bit: usize) {
        *self |= 1 << bit;
    }
    fn union(&self, o: &Self) -> Self {
        self | o
    }
    fn count(&self) -> usize {
        self.count_ones() as usize
    }
    fn bits(&self) -> Vec<usize> {
        (0..64).filter(|b| self >> b & 1 == 1).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Wide(Box<[u64]>);

impl Mono for Wide {
    fn unit(words: usize) -> Self {
        Wide(vec![0; words].into_boxed_slice())
    }
    fn set(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }
    fn union(&self, o: &Self) -> Self {
        Wide(self.0.iter().zip(o.0.iter()).map(|(a, b)| a | b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn bits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, w) in self.0.iter().enumerate() {
            for b in 0..64 {
                if w >> b & 1 == 1 {
                    out.push(i * 64 + b);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Key {
    Ca(u32, u32),
    Ra(u32, u32, u32),
    Sub(u32, u32),
    Ex(u32, u32),
    Res(u32, u32, u32),
    Ri(u32, u32),
    Neg(u32, u32),
}

#[derive(Default)]
struct Symbols {
    concepts: Vec<Atomic>,
    concept_ids: FxHashMap<ConceptName, u32>,
    roles: Vec<RoleName>,
    role_ids: FxHashMap<RoleName, u32>,
    inds: Vec<Individual>,
    ind_ids: FxHashMap<Individual, u32>,
    vars: Vec<Variable>,
    var_ids: FxHashMap<Variable, usize>,
}

impl Symbols {
    fn new(o: &AnnotatedOntology) -> Self {
        let v = o.vocabulary();
        let mut s = Symbols {
            concepts: vec![Atomic::Top, Atomic::Bot],
            ..Default::default()
        };
        for c in v.concepts {
            s.concept_ids.insert(c.clone(), s.concepts.len() as u32);
            s.concepts.push(Atomic::Name(c));
        }
        for r in v.roles {
            s.role_ids.insert(r.clone(), s.roles.len() as u32);
            s.roles.push(r);
        }
        for i in v.individuals {
            s.ind_ids.insert(i.clone(), s.inds.len() as u32);
            s.inds.push(i);
        }
        for x in v.variables {
            s.var_ids.insert(x.clone(), s.vars.len());
            s.vars.push(x);
        }
        s
    }

    fn concept(&self, a: &Atomic) -> u32 {
        match a {
            Atomic::Top => TOP,
            Atomic::Bot => BOT,
            Atomic::Name(n) => self.concept_ids[n],
        }
    }

    fn role(&self, p: &Role) -> u32 {
        role_id(self.role_ids[&p.base], p.inverted)
    }

    fn role_back(&self, p: u32) -> Role {
        Role {
            base: self.roles[base(p) as usize].clone(),
            inverted: is_inv(p),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pin {
    Ex(u32),
    Qp(u32),
    Top(u32),
    Conj(u32),
    CoverRi(u32),
    CoverRes(u32),
    CoverTop(u32),
}

struct Engine<M: Mono> {
    restricted: bool,
    merge: bool,
    regroup: bool,
    classical: bool,
    bound: Option<usize>,
    words: usize,
    n_roles: u32,

    keys: Vec<Key>,
    key_ids: FxHashMap<Key, u32>,
    monos: Vec<Vec<M>>,
    /// Monomials of each entry that have a derivation not ending in the
    /// chaining rule.
    base: Vec<Vec<M>>,
    seen: FxHashMap<(u32, M), bool>,
    queue: VecDeque<(u32, M, bool)>,

    lhs_sets: Vec<Vec<u32>>,
    lhs_ids: FxHashMap<Vec<u32>, u32>,
    buf: Vec<u32>,
    joins: FxHashMap<(u32, u32, u32), u32>,

    ca_by_concept: FxHashMap<u32, Vec<u32>>,
    ra_by_subj: FxHashMap<(u32, u32), Vec<u32>>,
    ra_by_obj: FxHashMap<(u32, u32), Vec<u32>>,
    ra_by_role: FxHashMap<u32, Vec<u32>>,
    sub_by_member: FxHashMap<u32, Vec<u32>>,
    sub_by_rhs: FxHashMap<u32, Vec<u32>>,
    sub_empty: Vec<u32>,
    ex_by_role: FxHashMap<u32, Vec<u32>>,
    ex_roles: Vec<u32>,
    res_by_role: FxHashMap<u32, Vec<u32>>,
    res_by_filler: FxHashMap<u32, Vec<u32>>,
    res_by_role_rhs: FxHashMap<(u32, u32), Vec<u32>>,
    ri_by_lhs: FxHashMap<u32, Vec<u32>>,
    ri_by_rhs: FxHashMap<u32, Vec<u32>>,
    neg_by_base: FxHashMap<u32, Vec<u32>>,
}

fn push_idx<K: Hash + Eq>(m: &mut FxHashMap<K, Vec<u32>>, k: K, e: u32) {
    m.entry(k).or_default().push(e);
}

fn idx<K: Hash + Eq>(m: &FxHashMap<K, Vec<u32>>, k: &K) -> Vec<u32> {
    m.get(k).cloned().unwrap_or_default()
}

impl<M: Mono> Engine<M> {
    fn new(opts: SaturationOptions, classical: bool, words: usize, n_roles: u32) -> Self {
        Engine {
            restricted: opts.ruleset == Ruleset::Restricted,
            merge: opts.merge == Merge::Union,
            regroup: opts.regroup_chains && opts.merge == Merge::Collect,
            classical,
            bound: opts.bound,
            words,
            n_roles,
            keys: Vec::new(),
            key_ids: FxHashMap::default(),
            monos: Vec::new(),
            base: Vec::new(),
            seen: FxHashMap::default(),
            queue: VecDeque::new(),
            lhs_sets: Vec::new(),
            lhs_ids: FxHashMap::default(),
            buf: Vec::new(),
            joins: FxHashMap::default(),
            ca_by_concept: FxHashMap::default(),
            ra_by_subj: FxHashMap::default(),
            ra_by_obj: FxHashMap::default(),
            ra_by_role: FxHashMap::default(),
            sub_by_member: FxHashMap::default(),
            sub_by_rhs: FxHashMap::default(),
            sub_empty: Vec::new(),
            ex_by_role: FxHashMap::default(),
            ex_roles: Vec::new(),
            res_by_role: FxHashMap::default(),
            res_by_filler: FxHashMap::default(),
            res_by_role_rhs: FxHashMap::default(),
            ri_by_lhs: FxHashMap::default(),
            ri_by_rhs: FxHashMap::default(),
            neg_by_base: FxHashMap::default(),
        }
    }

    fn lhs_id(&mut self, mut set: Vec<u32>) -> u32 {
        set.retain(|&c| c != TOP);
        set.sort_unstable();
        set.dedup();
        if let Some(&id) = self.lhs_ids.get(&set) {
            return id;
        }
        let id = self.lhs_sets.len() as u32;
        self.lhs_sets.push(set.clone());
        self.lhs_ids.insert(set, id);
        id
    }

    /// Left side `M ⊓ (N \ {a})` for left sides `M` and `N`.
    fn join(&mut self, m: u32, n: u32, a: u32) -> u32 {
        if let Some(&id) = self.joins.get(&(m, n, a)) {
            return id;
        }
        let mut buf = std::mem::take(&mut self.buf);
        buf.clear();
        let (x, y) = (&self.lhs_sets[m as usize], &self.lhs_sets[n as usize]);
        let (mut i, mut j) = (0, 0);
        loop {
            let next = match (x.get(i), y.get(j)) {
                (Some(&p), Some(&q)) if p < q => {
                    i += 1;
                    p
                }
                (Some(&p), Some(&q)) if q < p => {
                    j += 1;
                    if q == a {
                        continue;
                    }
                    q
                }
                (Some(&p), Some(_)) => {
                    i += 1;
                    j += 1;
                    p
                }
                (Some(&p), None) => {
                    i += 1;
                    p
                }
                (None, Some(&q)) => {
                    j += 1;
                    if q == a {
                        continue;
                    }
                    q
                }
                (None, None) => break,
            };
            buf.push(next);
        }
        let id = match self.lhs_ids.get(buf.as_slice()) {
            Some(&id) => id,
            None => self.lhs_id(buf.clone()),
        };
        self.buf = buf;
        self.joins.insert((m, n, a), id);
        id
    }

    fn entry(&mut self, key: Key) -> u32 {
        if let Some(&e) = self.key_ids.get(&key) {
            return e;
        }
        let e = self.keys.len() as u32;
        self.keys.push(key);
        self.key_ids.insert(key, e);
        self.monos.push(Vec::new());
        self.base.push(Vec::new());
        match key {
            Key::Ca(c, _) => push_idx(&mut self.ca_by_concept, c, e),
            Key::Ra(r, a, b) => {
                push_idx(&mut self.ra_by_subj, (r, a), e);
                push_idx(&mut self.ra_by_obj, (r, b), e);
                push_idx(&mut self.ra_by_role, r, e);
            }
            Key::Sub(l, c) => {
                let set = self.lhs_sets[l as usize].clone();
                if set.is_empty() {
                    self.sub_empty.push(e);
                }
                for x in set {
                    push_idx(&mut self.sub_by_member, x, e);
                }
                push_idx(&mut self.sub_by_rhs, c, e);
            }
            Key::Ex(_, p) => {
                if !self.ex_by_role.contains_key(&p) {
                    self.ex_roles.push(p);
                }
                push_idx(&mut self.ex_by_role, p, e);
            }
            Key::Res(p, f, b) => {
                push_idx(&mut self.res_by_role, p, e);
                push_idx(&mut self.res_by_filler, f, e);
                push_idx(&mut self.res_by_role_rhs, (p, b), e);
            }
            Key::Ri(p, q) => {
                push_idx(&mut self.ri_by_lhs, p, e);
                push_idx(&mut self.ri_by_rhs, q, e);
            }
            Key::Neg(p, q) => {
                push_idx(&mut self.neg_by_base, base(p), e);
                if base(q) != base(p) {
                    push_idx(&mut self.neg_by_base, base(q), e);
                }
            }
        }
        e
    }

    fn add(&mut self, key: Key, m: M, is_base: bool) {
        if let Some(k) = self.bound {
            if m.count() > k {
                return;
            }
        }
        let e = self.entry(key);
        let eu = e as usize;
        if self.merge {
            if self.monos[eu].is_empty() {
                self.monos[eu].push(m.clone());
                self.queue.push_back((e, m, false));
            } else {
                let u = self.monos[eu][0].union(&m);
                if u != self.monos[eu][0] {
                    self.monos[eu][0] = u.clone();
                    self.queue.push_back((e, u, false));
                }
            }
            return;
        }
        match self.seen.get_mut(&(e, m.clone())) {
            None => {
                self.seen.insert((e, m.clone()), is_base);
                self.monos[eu].push(m.clone());
                if is_base {
                    self.base[eu].push(m.clone());
                }
                self.queue.push_back((e, m, false));
            }
            Some(b) if !*b && is_base => {
                *b = true;
                self.base[eu].push(m.clone());
                self.queue.push_back((e, m, true));
            }
            Some(_) => {}
        }
    }

    fn lookup(&self, key: &Key) -> Option<u32> {
        self.key_ids.get(key).copied()
    }

    /// Current monomials of an entry (a snapshot).
    fn ms(&self, e: u32) -> Vec<M> {
        self.monos[e as usize].clone()
    }

    fn ms_of(&self, key: &Key) -> Vec<M> {
        self.lookup(key).map(|e| self.ms(e)).unwrap_or_default()
    }

    fn run(&mut self) {
        while let Some((e, m, upgrade)) = self.queue.pop_front() {
            if self.merge && self.monos[e as usize][0] != m {
                continue; // superseded by a larger union
            }
            let key = self.keys[e as usize];
            if upgrade {
                if let Key::Sub(l, c) = key {
                    self.chain_as_left(e, l, c, &m, true);
                }
                continue;
            }
            match key {
                Key::Ca(c, a) => self.on_ca(c, a, &m),
                Key::Ra(r, a, b) => self.on_ra(r, a, b, &m),
                Key::Sub(l, c) => self.on_sub(e, l, c, &m),
                Key::Ex(a, q) => self.on_ex(e, a, q),
                Key::Res(p, f, b) => self.on_res(e, p, f, b, &m),
                Key::Ri(p, q) => self.on_ri(e, p, q, &m),
                Key::Neg(p, q) => self.on_neg(p, q, &m),
            }
        }
    }

    // -- assertions ---------------------------------------------------------

    fn on_ca(&mut self, c: u32, a: u32, m: &M) {
        // Conjunctions over assertions.
        let subs = if c == TOP {
            self.sub_empty.clone()
        } else {
            idx(&self.sub_by_member, &c)
        };
        for s in subs {
            let Key::Sub(l, b) = self.keys[s as usize] else {
                unreachable!()
            };
            let set = self.lhs_sets[l as usize].clone();
            let mut lists = vec![vec![m.clone()]];
            for &x in set.iter().filter(|&&x| x != c) {
                lists.push(self.ms_of(&Key::Ca(x, a)));
            }
            lists.push(self.ms(s));
            for prod in self.products(&lists) {
                self.add(Key::Ca(b, a), prod, true);
            }
        }
        // Existential restrictions with this filler.
        for r in idx(&self.res_by_filler, &c) {
            let Key::Res(p, _, d) = self.keys[r as usize] else {
                unreachable!()
            };
            let rel = if is_inv(p) {
                idx(&self.ra_by_subj, &(base(p), a))
            } else {
                idx(&self.ra_by_obj, &(base(p), a))
            };
            for ra in rel {
                let Key::Ra(_, x, y) = self.keys[ra as usize] else {
                    unreachable!()
                };
                let target = if is_inv(p) { y } else { x };
                let lists = vec![vec![m.clone()], self.ms(ra), self.ms(r)];
                for prod in self.products(&lists) {
                    self.add(Key::Ca(d, target), prod, true);
                }
            }
        }
    }

    fn on_ra(&mut self, r: u32, a: u32, b: u32, m: &M) {
        for (p, subj, obj) in [(role_id(r, false), a, b), (role_id(r, true), b, a)] {
            // ∃P.X ⊑ D with X(obj) gives D(subj).
            for res in idx(&self.res_by_role, &p) {
                let Key::Res(_, f, d) = self.keys[res as usize] else {
                    unreachable!()
                };
                let lists = vec![vec![m.clone()], self.ms_of(&Key::Ca(f, obj)), self.ms(res)];
                for prod in self.products(&lists) {
                    self.add(Key::Ca(d, subj), prod, true);
                }
            }
        }
        // Role inclusions from the base role.
        for ri in idx(&self.ri_by_lhs, &role_id(r, false)) {
            let Key::Ri(_, s) = self.keys[ri as usize] else {
                unreachable!()
            };
            let key = if is_inv(s) {
                Key::Ra(base(s), b, a)
            } else {
                Key::Ra(base(s), a, b)
            };
            for m2 in self.ms(ri) {
                self.add(key, m.union(&m2), true);
            }
        }
        // Disjointness.
        for n in idx(&self.neg_by_base, &r) {
            let Key::Neg(p1, p2) = self.keys[n as usize] else {
                unreachable!()
            };
            for (first, second) in [(p1, p2), (p2, p1)] {
                if is_inv(first) {
                    continue;
                }
                let mut pairs = Vec::new();
                if base(first) == r {
                    pairs.push((a, b));
                }
                if base(second) == r {
                    pairs.push(if is_inv(second) { (b, a) } else { (a, b) });
                }
                for (x, y) in pairs {
                    self.disjoint_at(first, second, x, y, n);
                }
            }
        }
    }

    /// `first(x,y)`, `second(x,y)` and the disjointness give `⊥(x)`.
    fn disjoint_at(&mut self, first: u32, second: u32, x: u32, y: u32, neg: u32) {
        let f = self.ms_of(&Key::Ra(base(first), x, y));
        let skey = if is_inv(second) {
            Key::Ra(base(second), y, x)
        } else {
            Key::Ra(base(second), x, y)
        };
        let s = self.ms_of(&skey);
        let lists = vec![f, s, self.ms(neg)];
        for prod in self.products(&lists) {
            self.add(Key::Ca(BOT, x), prod, true);
        }
    }

    fn on_neg(&mut self, p1: u32, p2: u32, m: &M) {
        let _ = m;
        let n = self.lookup(&Key::Neg(p1, p2)).unwrap();
        for (first, second) in [(p1, p2), (p2, p1)] {
            if is_inv(first) {
                continue;
            }
            for ra in idx(&self.ra_by_role, &base(first)) {
                let Key::Ra(_, x, y) = self.keys[ra as usize] else {
                    unreachable!()
                };
                self.disjoint_at(first, second, x, y, n);
            }
        }
        self.cr0_roles(self.ri_sources(&[p1, p2]));
    }

    // -- subsumptions -------------------------------------------------------

    fn on_sub(&mut self, e: u32, l: u32, c: u32, m: &M) {
        let set = self.lhs_sets[l as usize].clone();
        // Conjunctions over assertions.
        let first = set.first().copied().unwrap_or(TOP);
        for ca in idx(&self.ca_by_concept, &first) {
            let Key::Ca(_, a) = self.keys[ca as usize] else {
                unreachable!()
            };
            let mut lists = vec![vec![m.clone()], self.ms(ca)];
            for &x in set.iter().skip(1) {
                lists.push(self.ms_of(&Key::Ca(x, a)));
            }
            for prod in self.products(&lists) {
                self.add(Key::Ca(c, a), prod, true);
            }
        }
        let is_base = self.merge || self.seen.get(&(e, m.clone())).copied().unwrap_or(true);
        self.chain_as_left(e, l, c, m, is_base);
        self.chain_as_right(l, c, m);

        // Existential rules with this conjunction as the filler premise.
        let qs = self.roles_reaching_filler(c);
        if !self.restricted || set.len() <= 2 {
            for q in qs {
                self.cr3(q, Pin::Conj(e), m);
            }
        }
        if self.restricted && set.len() <= 2 {
            for p in 0..self.n_roles * 2 {
                self.cr4(p, Pin::Conj(e), m);
            }
            self.cr5_conj(e, &set, c, m);
        }
        if set.is_empty() {
            for q in self.ex_roles.clone() {
                self.cr3(q, Pin::CoverTop(e), m);
            }
            if self.restricted {
                for p in 0..self.n_roles * 2 {
                    self.cr4(p, Pin::CoverTop(e), m);
                }
                self.cr5_top(c, m);
            }
        }
    }

    /// `(M ⊑ A)` joined with `(A ⊓ N ⊑ C)` partners. A partner with a
    /// single-atom left side is only joined with base monomials here;
    /// regrouping the chain shows no pair is lost.
    fn chain_as_left(&mut self, _e: u32, l: u32, a: u32, m: &M, is_base: bool) {
        if self.restricted && self.lhs_sets[l as usize].len() > 2 {
            return;
        }
        for r in idx(&self.sub_by_member, &a) {
            let Key::Sub(rl, c) = self.keys[r as usize] else {
                unreachable!()
            };
            let singleton = self.lhs_sets[rl as usize].len() == 1;
            if self.restricted && !singleton {
                continue;
            }
            if singleton && !is_base && self.regroup {
                continue;
            }
            let lid = self.join(l, rl, a);
            for i in 0..self.monos[r as usize].len() {
                let u = m.union(&self.monos[r as usize][i]);
                self.add(Key::Sub(lid, c), u, false);
            }
        }
    }

    fn chain_as_right(&mut self, l: u32, c: u32, m: &M) {
        let set = self.lhs_sets[l as usize].clone();
        if self.restricted && set.len() != 1 {
            return;
        }
        for &a in &set {
            for left in idx(&self.sub_by_rhs, &a) {
                let Key::Sub(ml, _) = self.keys[left as usize] else {
                    unreachable!()
                };
                if self.restricted && self.lhs_sets[ml as usize].len() > 2 {
                    continue;
                }
                let lid = self.join(ml, l, a);
                let partners = if set.len() == 1 && self.regroup {
                    self.base[left as usize].clone()
                } else {
                    self.ms(left)
                };
                for m2 in partners {
                    self.add(Key::Sub(lid, c), m.union(&m2), false);
                }
            }
        }
    }

    fn on_ex(&mut self, e: u32, _a: u32, q: u32) {
        for m in self.ms(e) {
            self.cr3(q, Pin::Ex(e), &m);
        }
        self.cr0_roles(vec![q]);
    }

    fn on_res(&mut self, e: u32, p: u32, f: u32, d: u32, m: &M) {
        // Assertion rules with this axiom as the premise.
        for ca in idx(&self.ca_by_concept, &f) {
            let Key::Ca(_, y) = self.keys[ca as usize] else {
                unreachable!()
            };
            let rel = if is_inv(p) {
                idx(&self.ra_by_subj, &(base(p), y))
            } else {
                idx(&self.ra_by_obj, &(base(p), y))
            };
            for ra in rel {
                let Key::Ra(_, s, o) = self.keys[ra as usize] else {
                    unreachable!()
                };
                let target = if is_inv(p) { o } else { s };
                let lists = vec![vec![m.clone()], self.ms(ra), self.ms(ca)];
                for prod in self.products(&lists) {
                    self.add(Key::Ca(d, target), prod, true);
                }
            }
        }
        for q in self.ri_sources(&[p]) {
            self.cr3(q, Pin::Top(e), m);
        }
        for q in self.ri_sources(&[inv(p)]) {
            self.cr3(q, Pin::CoverRes(e), m);
        }
        if self.restricted && f == TOP {
            for q in self.ri_sources(&[p]) {
                self.cr4(q, Pin::CoverRes(e), m);
            }
        }
    }

    fn on_ri(&mut self, e: u32, p: u32, q: u32, m: &M) {
        for next in idx(&self.ri_by_lhs, &q) {
            let Key::Ri(_, r) = self.keys[next as usize] else {
                unreachable!()
            };
            for m2 in self.ms(next) {
                self.add(Key::Ri(p, r), m.union(&m2), true);
            }
        }
        for prev in idx(&self.ri_by_rhs, &p) {
            let Key::Ri(o, _) = self.keys[prev as usize] else {
                unreachable!()
            };
            for m2 in self.ms(prev) {
                self.add(Key::Ri(o, q), m.union(&m2), true);
            }
        }
        if !is_inv(p) {
            for ra in idx(&self.ra_by_role, &base(p)) {
                let Key::Ra(_, a, b) = self.keys[ra as usize] else {
                    unreachable!()
                };
                let key = if is_inv(q) {
                    Key::Ra(base(q), b, a)
                } else {
                    Key::Ra(base(q), a, b)
                };
                for m2 in self.ms(ra) {
                    self.add(key, m.union(&m2), true);
                }
            }
        }
        self.cr0_roles(vec![p]);
        self.cr3(p, Pin::Qp(e), m);
        self.cr3(p, Pin::CoverRi(e), m);
        if self.restricted {
            self.cr4(p, Pin::CoverRi(e), m);
        }
    }

    /// Roles `Q` with `Q ⊑ P` stored for one of the given `P`.
    fn ri_sources(&self, ps: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for p in ps {
            for ri in self.ri_by_rhs.get(p).into_iter().flatten() {
                let Key::Ri(q, _) = self.keys[*ri as usize] else {
                    unreachable!()
                };
                out.push(q);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Roles `Q` with `Q ⊑ P` and `∃P.C ⊑ D` stored.
    fn roles_reaching_filler(&self, c: u32) -> Vec<u32> {
        let mut ps = Vec::new();
        for r in self.res_by_filler.get(&c).into_iter().flatten() {
            let Key::Res(p, _, _) = self.keys[*r as usize] else {
                unreachable!()
            };
            ps.push(p);
        }
        ps.sort_unstable();
        ps.dedup();
        let mut qs = self.ri_sources(&ps);
        qs.retain(|q| self.ex_by_role.contains_key(q));
        qs
    }

    // -- existential rules --------------------------------------------------

    /// Unsatisfiable role combinations: `A ⊑ ∃P`, `P ⊑ P1`, `P ⊑ P2`,
    /// `P1 ⊓ P2 ⊑ ⊥` give `A ⊑ ⊥`. Re-enumerated for the affected roles.
    fn cr0_roles(&mut self, ps: Vec<u32>) {
        for p in ps {
            let exs = idx(&self.ex_by_role, &p);
            if exs.is_empty() {
                continue;
            }
            let ris = idx(&self.ri_by_lhs, &p);
            for (i, &r1) in ris.iter().enumerate() {
                for &r2 in &ris[i..] {
                    let Key::Ri(_, p1) = self.keys[r1 as usize] else {
                        unreachable!()
                    };
                    let Key::Ri(_, p2) = self.keys[r2 as usize] else {
                        unreachable!()
                    };
                    let nk = if p1 <= p2 {
                        Key::Neg(p1, p2)
                    } else {
                        Key::Neg(p2, p1)
                    };
                    let Some(n) = self.lookup(&nk) else { continue };
                    for &ex in &exs {
                        let Key::Ex(a, _) = self.keys[ex as usize] else {
                            unreachable!()
                        };
                        let lists = vec![self.ms(ex), self.ms(r1), self.ms(r2), self.ms(n)];
                        let lid = self.lhs_id(vec![a]);
                        for prod in self.products(&lists) {
                            self.add(Key::Sub(lid, BOT), prod, true);
                        }
                    }
                }
            }
        }
    }

    /// Ways to derive that a `Q`-successor of an instance is in `b`: either
    /// `Q ⊑ Pi` with `∃inv(Pi).Ai ⊑ b` (the successor then needs `Ai` at
    /// the source, returned as the atom) or `⊤ ⊑ b` (atom ⊤). With
    /// `only_pinned`, only covers using the pinned fact are returned.
    fn covers(
        &self,
        q: u32,
        b: u32,
        forward: bool,
        pin: Pin,
        pinned: &M,
        only_pinned: bool,
    ) -> Vec<(u32, bool, M)> {
        let mut out = Vec::new();
        for ri in self.ri_by_lhs.get(&q).into_iter().flatten().copied() {
            let Key::Ri(_, pi) = self.keys[ri as usize] else {
                unreachable!()
            };
            let rrole = if forward { pi } else { inv(pi) };
            let ri_ms = if pin == Pin::CoverRi(ri) {
                vec![pinned.clone()]
            } else {
                self.ms(ri)
            };
            for res in self
                .res_by_role_rhs
                .get(&(rrole, b))
                .into_iter()
                .flatten()
                .copied()
            {
                if only_pinned && pin != Pin::CoverRi(ri) && pin != Pin::CoverRes(res) {
                    continue;
                }
                let Key::Res(_, ai, _) = self.keys[res as usize] else {
                    unreachable!()
                };
                if (self.restricted || forward) && ai != TOP {
                    continue;
                }
                let res_ms = if pin == Pin::CoverRes(res) {
                    vec![pinned.clone()]
                } else {
                    self.ms(res)
                };
                for x in &ri_ms {
                    for y in &res_ms {
                        out.push((ai, true, x.union(y)));
                    }
                }
            }
        }
        let empty = self.lhs_ids.get(&Vec::new()).copied();
        if let Some(t) = empty.and_then(|l| self.lookup(&Key::Sub(l, b))) {
            if !only_pinned || pin == Pin::CoverTop(t) {
                let ms = if pin == Pin::CoverTop(t) {
                    vec![pinned.clone()]
                } else {
                    self.ms(t)
                };
                for m in ms {
                    out.push((TOP, false, m));
                }
            }
        }
        out
    }

    /// Products of the cover choices for each element of `set`; with a
    /// cover pin, one position at a time is restricted to the pinned fact.
    /// The flag tells whether some element is covered through a role.
    fn cover_products(
        &self,
        q: u32,
        set: &[u32],
        forward: bool,
        pin: Pin,
        pinned: &M,
    ) -> Vec<(Vec<u32>, bool, M)> {
        let cover_pin = matches!(pin, Pin::CoverRi(_) | Pin::CoverRes(_) | Pin::CoverTop(_));
        let all: Vec<Vec<(u32, bool, M)>> = set
            .iter()
            .map(|&b| self.covers(q, b, forward, pin, pinned, false))
            .collect();
        if all.iter().any(Vec::is_empty) {
            return Vec::new();
        }
        let mut out = Vec::new();
        if !cover_pin {
            self.cover_rec(&all, 0, Vec::new(), false, M::unit(self.words), &mut out);
            return out;
        }
        for j in 0..set.len() {
            let pinned_list = self.covers(q, set[j], forward, pin, pinned, true);
            if pinned_list.is_empty() {
                continue;
            }
            let mut lists = all.clone();
            lists[j] = pinned_list;
            self.cover_rec(&lists, 0, Vec::new(), false, M::unit(self.words), &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn cover_rec(
        &self,
        lists: &[Vec<(u32, bool, M)>],
        i: usize,
        atoms: Vec<u32>,
        via_role: bool,
        m: M,
        out: &mut Vec<(Vec<u32>, bool, M)>,
    ) {
        if i == lists.len() {
            out.push((atoms, via_role, m));
            return;
        }
        for (a, r, m2) in &lists[i] {
            let u = m.union(m2);
            if self.bound.is_some_and(|k| u.count() > k) {
                continue;
            }
            let mut next = atoms.clone();
            next.push(*a);
            self.cover_rec(lists, i + 1, next, via_role || *r, u, out);
        }
    }

    /// The existential rule for role `Q`, with one premise pinned.
    fn cr3(&mut self, q: u32, pin: Pin, pinned: &M) {
        let exs: Vec<(u32, M)> = match pin {
            Pin::Ex(e) => {
                let Key::Ex(a, _) = self.keys[e as usize] else {
                    unreachable!()
                };
                vec![(a, pinned.clone())]
            }
            _ => {
                let mut v = Vec::new();
                for ex in idx(&self.ex_by_role, &q) {
                    let Key::Ex(a, _) = self.keys[ex as usize] else {
                        unreachable!()
                    };
                    v.extend(self.ms(ex).into_iter().map(|m| (a, m)));
                }
                v
            }
        };
        if exs.is_empty() {
            return;
        }
        let mut out: Vec<(Vec<u32>, u32, M)> = Vec::new();
        for qp in idx(&self.ri_by_lhs, &q) {
            if let Pin::Qp(e) = pin {
                if e != qp {
                    continue;
                }
            }
            let Key::Ri(_, p) = self.keys[qp as usize] else {
                unreachable!()
            };
            let qp_ms = if pin == Pin::Qp(qp) {
                vec![pinned.clone()]
            } else {
                self.ms(qp)
            };
            for top in idx(&self.res_by_role, &p) {
                if let Pin::Top(e) = pin {
                    if e != top {
                        continue;
                    }
                }
                let Key::Res(_, c, d) = self.keys[top as usize] else {
                    unreachable!()
                };
                let top_ms = if pin == Pin::Top(top) {
                    vec![pinned.clone()]
                } else {
                    self.ms(top)
                };
                for conj in idx(&self.sub_by_rhs, &c) {
                    if let Pin::Conj(e) = pin {
                        if e != conj {
                            continue;
                        }
                    }
                    let Key::Sub(l, _) = self.keys[conj as usize] else {
                        unreachable!()
                    };
                    let set = self.lhs_sets[l as usize].clone();
                    if self.restricted && set.len() > 2 {
                        continue;
                    }
                    let conj_ms = if pin == Pin::Conj(conj) {
                        vec![pinned.clone()]
                    } else {
                        self.ms(conj)
                    };
                    let covers = self.cover_products(q, &set, false, pin, pinned);
                    for (atoms, _, cm) in &covers {
                        for m1 in &qp_ms {
                            for m2 in &top_ms {
                                for m3 in &conj_ms {
                                    let prem = cm.union(m1).union(m2).union(m3);
                                    for (a, m0) in &exs {
                                        let mut lhs = atoms.clone();
                                        lhs.push(*a);
                                        out.push((lhs, d, prem.union(m0)));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for (lhs, d, m) in out {
            let lid = self.lhs_id(lhs);
            self.add(Key::Sub(lid, d), m, true);
        }
    }

    /// Restricted profile: `P ⊑ Pi`, `∃Pi.⊤ ⊑ Bi`, `⊤ ⊑ B'i` and a conjunction
    /// of at most two of them below `C` give `∃P.⊤ ⊑ C`.
    fn cr4(&mut self, p: u32, pin: Pin, pinned: &M) {
        let mut out = Vec::new();
        let conjs: Vec<u32> = match pin {
            Pin::Conj(e) => vec![e],
            _ => {
                let mut v: Vec<u32> = self.sub_by_rhs.values().flatten().copied().collect();
                v.sort_unstable();
                v
            }
        };
        for conj in conjs {
            let Key::Sub(l, c) = self.keys[conj as usize] else {
                unreachable!()
            };
            if c == TOP {
                continue;
            }
            let set = self.lhs_sets[l as usize].clone();
            if set.len() > 2 {
                continue;
            }
            let conj_ms = if pin == Pin::Conj(conj) {
                vec![pinned.clone()]
            } else {
                self.ms(conj)
            };
            // without a role premise the conclusion would not carry the
            // monomial of the edge, so such instances are skipped
            for (_, via_role, cm) in self.cover_products(p, &set, true, pin, pinned) {
                if !via_role {
                    continue;
                }
                for n in &conj_ms {
                    out.push((c, cm.union(n)));
                }
            }
        }
        for (c, m) in out {
            self.add(Key::Res(p, TOP, c), m, true);
        }
    }

    /// Restricted profile: `⊤ ⊑ A1`, `⊤ ⊑ A2`, `A1 ⊓ A2 ⊑ B` give `⊤ ⊑ B`;
    /// here the conjunction is the new fact.
    fn cr5_conj(&mut self, e: u32, set: &[u32], b: u32, m: &M) {
        let _ = e;
        if set.is_empty() {
            return;
        }
        let empty = self.lhs_id(Vec::new());
        let mut lists = vec![vec![m.clone()]];
        for &x in set {
            lists.push(self.ms_of(&Key::Sub(empty, x)));
        }
        for prod in self.products(&lists) {
            self.add(Key::Sub(empty, b), prod, true);
        }
    }

    /// The same rule with the new fact `⊤ ⊑ a`.
    fn cr5_top(&mut self, a: u32, m: &M) {
        let empty = self.lhs_id(Vec::new());
        for s in idx(&self.sub_by_member, &a) {
            let Key::Sub(l, b) = self.keys[s as usize] else {
                unreachable!()
            };
            let set = self.lhs_sets[l as usize].clone();
            if set.len() > 2 {
                continue;
            }
            for j in 0..set.len() {
                if set[j] != a {
                    continue;
                }
                let mut lists = vec![self.ms(s)];
                for (i, &x) in set.iter().enumerate() {
                    lists.push(if i == j {
                        vec![m.clone()]
                    } else {
                        self.ms_of(&Key::Sub(empty, x))
                    });
                }
                for prod in self.products(&lists) {
                    self.add(Key::Sub(empty, b), prod, true);
                }
            }
        }
    }

    /// Unions over the cartesian product of the lists.
    fn products(&self, lists: &[Vec<M>]) -> Vec<M> {
        let mut acc = vec![M::unit(self.words)];
        for l in lists {
            if l.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * l.len());
            for a in &acc {
                for b in l {
                    let u = a.union(b);
                    if self.bound.is_some_and(|k| u.count() > k) {
                        continue;
                    }
                    next.push(u);
                }
            }
            if self.classical || self.merge {
                next.dedup();
            }
            acc = next;
        }
        acc
    }
}

fn run(
    o: &AnnotatedOntology,
    opts: SaturationOptions,
    classical: bool,
) -> BTreeMap<DerivedAxiom, BTreeSet<Monomial>> {
    let nvars = o.variables().len();
    if classical {
        run_typed::<()>(o, opts, true, 0)
    } else if nvars <= 64 {
        run_typed::<u64>(o, opts, false, 1)
    } else {
        run_typed::<Wide>(o, opts, false, nvars.div_ceil(64))
    }
}

fn run_typed<M: Mono>(
    o: &AnnotatedOntology,
    opts: SaturationOptions,
    classical: bool,
    words: usize,
) -> BTreeMap<DerivedAxiom, BTreeSet<Monomial>> {
    let sym = Symbols::new(o);
    let mut eng: Engine<M> = Engine::new(opts, classical, words, sym.roles.len() as u32);
    let to_m = |m: &Monomial| -> M {
        let mut x = M::unit(words);
        for v in m.vars() {
            x.set(sym.var_ids[v]);
        }
        x
    };
    for (d, m) in initial_facts(o) {
        let key = match &d {
            DerivedAxiom::Concept(c, a) => Key::Ca(sym.concept(c), sym.ind_ids[a]),
            DerivedAxiom::Role(r, a, b) => Key::Ra(sym.role_ids[r], sym.ind_ids[a], sym.ind_ids[b]),
            DerivedAxiom::Sub(l, c) => {
                let lid = eng.lhs_id(l.iter().map(|x| sym.concept(x)).collect());
                Key::Sub(lid, sym.concept(c))
            }
            DerivedAxiom::Exists(a, p) => Key::Ex(sym.concept(a), sym.role(p)),
            DerivedAxiom::Restriction(p, f, b) => {
                Key::Res(sym.role(p), sym.concept(f), sym.concept(b))
            }
            DerivedAxiom::Ri(p, q) => Key::Ri(sym.role(p), sym.role(q)),
            DerivedAxiom::NegRi(p, q) => {
                let (x, y) = (sym.role(p), sym.role(q));
                Key::Neg(x.min(y), x.max(y))
            }
        };
        eng.add(key, to_m(&m), true);
    }
    eng.run();

    let concept = |c: u32| sym.concepts[c as usize].clone();
    let ind = |a: u32| sym.inds[a as usize].clone();
    let mut out: BTreeMap<DerivedAxiom, BTreeSet<Monomial>> = BTreeMap::new();
    let mut cache: FxHashMap<M, Monomial> = FxHashMap::default();
    for (e, key) in eng.keys.iter().enumerate() {
        if eng.monos[e].is_empty() {
            continue;
        }
        let d = match *key {
            Key::Ca(c, a) => DerivedAxiom::Concept(concept(c), ind(a)),
            Key::Ra(r, a, b) => DerivedAxiom::Role(sym.roles[r as usize].clone(), ind(a), ind(b)),
            Key::Sub(l, c) => DerivedAxiom::Sub(
                eng.lhs_sets[l as usize]
                    .iter()
                    .map(|&x| concept(x))
                    .collect(),
                concept(c),
            ),
            Key::Ex(a, p) => DerivedAxiom::Exists(concept(a), sym.role_back(p)),
            Key::Res(p, f, b) => {
                DerivedAxiom::Restriction(sym.role_back(p), concept(f), concept(b))
            }
            Key::Ri(p, q) => DerivedAxiom::Ri(sym.role_back(p), sym.role_back(q)),
            Key::Neg(p, q) => DerivedAxiom::NegRi(sym.role_back(p), sym.role_back(q)),
        };
        let set: BTreeSet<Monomial> = eng.monos[e]
            .iter()
            .map(|m| {
                cache
                    .entry(m.clone())
                    .or_insert_with(|| {
                        Monomial::from_vars(m.bits().into_iter().map(|b| sym.vars[b].clone()))
                    })
                    .clone()
            })
            .collect();
        out.insert(d, set);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::textio::parse_ontology;

    fn m(vars: &[&str]) -> Monomial {
        Monomial::from_vars(vars.iter().copied())
    }

    fn sub(l: &[&str], r: &str) -> DerivedAxiom {
        DerivedAxiom::Sub(
            l.iter().map(|x| Atomic::name(*x)).collect(),
            Atomic::name(r),
        )
    }

    fn ca(c: &str, a: &str) -> DerivedAxiom {
        DerivedAxiom::Concept(Atomic::name(c), Individual::new(a))
    }

    #[test]
    fn init_cyclic() {
        let s = init_set(&fixtures::cyclic()).unwrap();
        assert!(s.contains(&sub(&["A"], "A"), &Monomial::unit()));
        assert!(s.contains(&sub(&["B"], "B"), &Monomial::unit()));
        assert!(s.contains(
            &DerivedAxiom::Sub(BTreeSet::new(), Atomic::Top),
            &Monomial::unit()
        ));
        assert!(s.contains(
            &DerivedAxiom::Sub(BTreeSet::from([Atomic::Bot]), Atomic::Bot),
            &Monomial::unit()
        ));
        assert!(s.contains(&sub(&["A"], "B"), &m(&["x1"])));
        assert!(s.contains(&sub(&["B"], "A"), &m(&["x2"])));
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn init_roles() {
        let o =
            parse_ontology("R(a,b) @ x\nP(a,b) @ x2\nQ(b,a) @ x3\nP and Q <= bot @ y\n").unwrap();
        let s = init_set(&o).unwrap();
        let one = Monomial::unit();
        let r = Role::new("R");
        assert!(s.contains(&DerivedAxiom::Concept(Atomic::Top, "a".into()), &one));
        assert!(s.contains(&DerivedAxiom::Concept(Atomic::Top, "b".into()), &one));
        assert!(s.contains(&DerivedAxiom::Ri(r.clone(), r.clone()), &one));
        assert!(s.contains(&DerivedAxiom::Ri(r.inv(), r.inv()), &one));
        assert!(s.contains(
            &DerivedAxiom::Restriction(r.clone(), Atomic::Bot, Atomic::Bot),
            &one
        ));
        assert!(s.contains(
            &DerivedAxiom::Restriction(r.inv(), Atomic::Bot, Atomic::Bot),
            &one
        ));
        assert!(s.contains(
            &DerivedAxiom::NegRi(Role::inverse_of("P"), Role::inverse_of("Q")),
            &m(&["y"])
        ));
        assert!(s
            .iter()
            .all(|(k, _)| !matches!(k, DerivedAxiom::Sub(l, Atomic::Top) if !l.is_empty())));
    }

    #[test]
    fn rejects_non_normal() {
        let o = parse_ontology("exists R . (A and B) <= C @ x").unwrap();
        assert!(matches!(saturate(&o), Err(SaturateError::NotNormalForm(_))));
    }

    #[test]
    fn cyclic_entries() {
        let s = saturate(&fixtures::cyclic()).unwrap();
        assert_eq!(
            s.get(&sub(&["A"], "B")).unwrap(),
            &BTreeSet::from([m(&["x1"]), m(&["x1", "x2"])])
        );
    }

    #[test]
    fn idempotent_entries() {
        let s = saturate(&fixtures::idempotent()).unwrap();
        assert_eq!(
            s.get(&sub(&["A"], "C")).unwrap(),
            &BTreeSet::from([m(&["x1", "x2", "x3"])])
        );
    }

    fn exp_expected(n: usize) -> BTreeSet<Monomial> {
        (0..1u32 << n)
            .map(|mask| {
                let mut vars = vec!["u".to_string()];
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        vars.push(format!("u{}", i + 1));
                        vars.push(format!("v{}", i + 1));
                    }
                }
                Monomial::from_vars(vars.iter().map(String::as_str))
            })
            .collect()
    }

    #[test]
    fn exponential_entries() {
        for n in [1, 2, 3, 4] {
            let s = saturate(&fixtures::exponential(n)).unwrap();
            assert_eq!(
                s.get(&sub(&["B"], "A")).unwrap(),
                &exp_expected(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn dionysus_assertion() {
        let s = saturate(&fixtures::dionysus()).unwrap();
        let got: Vec<String> = s
            .get(&ca("Deity", "dionysus"))
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect();
        assert_eq!(got, ["x1", "x3*x4*y1*y2", "x5*x6*y1*y3"]);
        assert!(s.get(&ca("Deity", "semele")).is_none());
    }

    #[test]
    fn bounded_variant() {
        let s = saturate_k(&fixtures::cyclic(), 1).unwrap();
        assert_eq!(
            s.get(&sub(&["A"], "B")).unwrap(),
            &BTreeSet::from([m(&["x1"])])
        );
        // Binary chaining only: the conjunction is resolved on instances.
        let mut o = fixtures::idempotent();
        o.push(AnnotatedAxiom::var(Axiom::concept_assertion("A", "a"), "w"));
        let s = saturate_k(&o, 4).unwrap();
        assert!(s.get(&sub(&["A"], "C")).is_none());
        assert_eq!(
            s.get(&ca("C", "a")).unwrap(),
            &BTreeSet::from([m(&["w", "x1", "x2", "x3"])])
        );
        assert!(saturate_k(&o, 3).unwrap().get(&ca("C", "a")).is_none());
        let full = saturate(&fixtures::exponential(2)).unwrap();
        let k5 = saturate_k(&fixtures::exponential(2), 5).unwrap();
        assert_eq!(
            full.filter(|k, m| !k.is_assertion() && m.len() <= 5),
            k5.filter(|k, _| !k.is_assertion())
        );
        let o = parse_ontology("exists R- . A <= B @ x1\nC <= exists R @ x2\n").unwrap();
        assert_eq!(saturate_k(&o, 2), Err(SaturateError::NotELHIrestr));
    }

    #[test]
    fn satisfiability() {
        assert!(!is_satisfiable(&fixtures::unsat()).unwrap());
        assert_eq!(
            unsat_witness(&fixtures::unsat()).unwrap(),
            Some(Some(Individual::new("a")))
        );
        assert!(is_satisfiable(&fixtures::dionysus()).unwrap());
        assert!(is_satisfiable(&AnnotatedOntology::new()).unwrap());
        let o = parse_ontology("top <= bot @ x").unwrap();
        assert!(!is_satisfiable(&o).unwrap());
    }

    #[test]
    fn role_disjointness() {
        let o = parse_ontology("R(a,b) @ x1\nS(b,a) @ x2\nR and S- <= bot @ x3\n").unwrap();
        let s = saturate(&o).unwrap();
        assert!(s.contains(
            &DerivedAxiom::Concept(Atomic::Bot, "a".into()),
            &m(&["x1", "x2", "x3"])
        ));
        let o =
            parse_ontology("A <= exists R @ x1\nR <= S @ x2\nR <= T @ x3\nS and T <= bot @ x4\n")
                .unwrap();
        let s = saturate(&o).unwrap();
        assert!(s.contains(
            &DerivedAxiom::Sub(BTreeSet::from([Atomic::name("A")]), Atomic::Bot),
            &m(&["x1", "x2", "x3", "x4"])
        ));
    }

    #[test]
    fn inverse_existential() {
        // A ⊑ ∃R, ∃R⁻.⊤ ⊑ B... and back: ∃R.B ⊑ C gives A ⊑ C.
        let o = parse_ontology(
            "A <= exists R @ x1\nexists R- <= B @ x2\nexists R . B <= C @ x3\nA(a) @ x4\n",
        )
        .unwrap();
        let s = saturate(&o).unwrap();
        assert!(s.contains(&sub(&["A"], "C"), &m(&["x1", "x2", "x3"])));
        assert!(s.contains(&ca("C", "a"), &m(&["x1", "x2", "x3", "x4"])));
    }

    #[test]
    fn conjunctive_cover_keeps_atoms() {
        // ∃R⁻.D ⊑ B: a successor is in B when its source is in D.
        let o =
            parse_ontology("A <= exists R @ x1\nexists R- . D <= B @ x2\nexists R . B <= C @ x3\n")
                .unwrap();
        let s = saturate(&o).unwrap();
        assert!(s.contains(&sub(&["A", "D"], "C"), &m(&["x1", "x2", "x3"])));
        assert!(s.get(&sub(&["A"], "C")).is_none());
    }

    #[test]
    fn standard_rules_monomials() {
        let s = saturate(&fixtures::standard_rules()).unwrap();
        let got = s.get(&ca("C", "a")).unwrap();
        assert!(got.contains(&m(&["v", "v1", "u", "w"])));
        assert!(!got.contains(&m(&["v", "v1", "v2", "u", "w"])));
    }

    #[test]
    fn lin_matches_flattened_why() {
        for o in [
            fixtures::dionysus(),
            fixtures::cyclic(),
            fixtures::exponential(3),
            fixtures::standard_rules(),
        ] {
            let why = saturate(&o).unwrap();
            let lin = lin_saturate(&o, Ruleset::Full).unwrap();
            for (k, ms) in why.iter() {
                let flat = ms.iter().fold(Monomial::unit(), |a, b| a.times(b));
                assert_eq!(lin.get(k), Some(&flat), "{k}");
            }
            assert_eq!(lin.len(), why.len());
        }
    }

    #[test]
    fn wide_monomials() {
        let mut text = String::new();
        for i in 0..70 {
            text.push_str(&format!("C{i} <= C{} @ x{i}\n", i + 1));
        }
        text.push_str("C0(a) @ y\n");
        let s = saturate(&parse_ontology(&text).unwrap()).unwrap();
        let got = s.get(&ca("C70", "a")).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got.iter().next().unwrap().len(), 71);
    }

    #[test]
    fn restricted_profile_detection() {
        assert!(roles_with_entailed_successors(&fixtures::idempotent()).is_empty());
        let o = parse_ontology("C <= exists R @ x\nR <= S @ y\n").unwrap();
        let req = roles_with_entailed_successors(&o);
        assert!(req.contains(&Role::new("R")) && req.contains(&Role::new("S")));
        assert!(!req.contains(&Role::inverse_of("R")));
    }

    #[test]
    fn regrouping_is_lossless() {
        let plain = SaturationOptions {
            regroup_chains: false,
            ..Default::default()
        };
        let chain = "A <= B @ a\nB <= C @ b\nC and D <= E @ c\nB <= D @ d\nD <= E @ e\nA(i) @ f\n";
        let mut cases = vec![
            fixtures::dionysus(),
            fixtures::cyclic(),
            fixtures::idempotent(),
            fixtures::standard_rules(),
            fixtures::exponential(3),
        ];
        cases.push(parse_ontology(chain).unwrap());
        for o in cases {
            let fast = saturate(&o).unwrap();
            let slow = saturate_with(&o, plain).unwrap();
            assert_eq!(fast.render(), slow.render());
        }
    }
}
