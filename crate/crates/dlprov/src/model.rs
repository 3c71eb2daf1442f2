//! Concepts, roles, axioms and annotated ontologies.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

pub use crate::names::{ConceptName, Individual, RoleName, Variable};
use crate::semiring::Monomial;

/// A role name or its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub base: RoleName,
    pub inverted: bool,
}

impl Role {
    pub fn new(base: impl Into<RoleName>) -> Self {
        Role {
            base: base.into(),
            inverted: false,
        }
    }

    pub fn inverse_of(base: impl Into<RoleName>) -> Self {
        Role {
            base: base.into(),
            inverted: true,
        }
    }

    pub fn inv(&self) -> Role {
        Role {
            base: self.base.clone(),
            inverted: !self.inverted,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.as_str())?;
        if self.inverted {
            f.write_str("-")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// ⊤, ⊥ or a concept name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atomic {
    Top,
    Bot,
    Name(ConceptName),
}

impl Atomic {
    pub fn name(s: impl Into<ConceptName>) -> Self {
        Atomic::Name(s.into())
    }

    pub fn to_concept(&self) -> Concept {
        match self {
            Atomic::Top => Concept::Top,
            Atomic::Bot => Concept::Bot,
            Atomic::Name(n) => Concept::Name(n.clone()),
        }
    }
}

impl fmt::Display for Atomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atomic::Top => f.write_str("top"),
            Atomic::Bot => f.write_str("bot"),
            Atomic::Name(n) => f.write_str(n.as_str()),
        }
    }
}

impl fmt::Debug for Atomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// ELHI⊥ concept. Build conjunctions with [`Concept::and`] so the
/// canonical-set invariant holds.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Concept {
    Top,
    Bot,
    Name(ConceptName),
    Exists(Role, Box<Concept>),
    And(Vec<Concept>),
}

impl Concept {
    pub fn name(s: impl Into<ConceptName>) -> Self {
        Concept::Name(s.into())
    }

    pub fn exists(role: Role, filler: Concept) -> Self {
        Concept::Exists(role, Box::new(filler))
    }

    /// Flattens, drops ⊤ and duplicates, sorts. Zero conjuncts give ⊤ and a
    /// single conjunct is returned as is.
    pub fn and(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut flat = BTreeSet::new();
        for c in parts {
            match c {
                Concept::And(inner) => flat.extend(inner),
                Concept::Top => {}
                other => {
                    flat.insert(other);
                }
            }
        }
        let mut v: Vec<Concept> = flat.into_iter().collect();
        match v.len() {
            0 => Concept::Top,
            1 => v.pop().unwrap(),
            _ => Concept::And(v),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Concept::Top | Concept::Bot | Concept::Name(_))
    }

    pub fn as_atomic(&self) -> Option<Atomic> {
        match self {
            Concept::Top => Some(Atomic::Top),
            Concept::Bot => Some(Atomic::Bot),
            Concept::Name(n) => Some(Atomic::Name(n.clone())),
            _ => None,
        }
    }

    /// Conjuncts of a conjunction, or the concept itself.
    pub fn conjuncts(&self) -> Vec<&Concept> {
        match self {
            Concept::And(v) => v.iter().collect(),
            other => vec![other],
        }
    }

    pub fn contains_bot(&self) -> bool {
        match self {
            Concept::Bot => true,
            Concept::Exists(_, c) => c.contains_bot(),
            Concept::And(v) => v.iter().any(Concept::contains_bot),
            _ => false,
        }
    }

    fn collect(&self, concepts: &mut BTreeSet<ConceptName>, roles: &mut BTreeSet<RoleName>) {
        match self {
            Concept::Name(n) => {
                concepts.insert(n.clone());
            }
            Concept::Exists(r, c) => {
                roles.insert(r.base.clone());
                c.collect(concepts, roles);
            }
            Concept::And(v) => v.iter().for_each(|c| c.collect(concepts, roles)),
            Concept::Top | Concept::Bot => {}
        }
    }
}

impl Ord for Concept {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Concept {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top"),
            Concept::Bot => f.write_str("bot"),
            Concept::Name(n) => f.write_str(n.as_str()),
            Concept::Exists(r, c) => match c.as_ref() {
                Concept::Top => write!(f, "exists {r}"),
                Concept::And(_) => write!(f, "exists {r} . ({c})"),
                _ => write!(f, "exists {r} . {c}"),
            },
            Concept::And(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Right-hand side of a GCI: `A`, `∃P.⊤` or `⊥`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RightSide {
    Name(ConceptName),
    ExistsTop(Role),
    Bot,
}

impl RightSide {
    pub fn to_concept(&self) -> Concept {
        match self {
            RightSide::Name(n) => Concept::Name(n.clone()),
            RightSide::ExistsTop(r) => Concept::exists(r.clone(), Concept::Top),
            RightSide::Bot => Concept::Bot,
        }
    }
}

impl fmt::Display for RightSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_concept())
    }
}

impl fmt::Debug for RightSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    ConceptAssertion(Atomic, Individual),
    RoleAssertion(RoleName, Individual, Individual),
    Gci(Concept, RightSide),
    Ri(Role, Role),
    /// Stored with the two roles in ascending order.
    NegRi(Role, Role),
}

impl Axiom {
    pub fn concept_assertion(c: impl Into<ConceptName>, a: impl Into<Individual>) -> Self {
        Axiom::ConceptAssertion(Atomic::Name(c.into()), a.into())
    }

    pub fn role_assertion(
        r: impl Into<RoleName>,
        a: impl Into<Individual>,
        b: impl Into<Individual>,
    ) -> Self {
        Axiom::RoleAssertion(r.into(), a.into(), b.into())
    }

    /// Assertion of a possibly inverted role, oriented onto its base name.
    pub fn role_fact(p: &Role, a: Individual, b: Individual) -> Self {
        if p.inverted {
            Axiom::RoleAssertion(p.base.clone(), b, a)
        } else {
            Axiom::RoleAssertion(p.base.clone(), a, b)
        }
    }

    pub fn neg_ri(p: Role, q: Role) -> Self {
        if p <= q {
            Axiom::NegRi(p, q)
        } else {
            Axiom::NegRi(q, p)
        }
    }

    pub fn is_assertion(&self) -> bool {
        matches!(self, Axiom::ConceptAssertion(..) | Axiom::RoleAssertion(..))
    }

    pub fn collect_vocabulary(&self, v: &mut Vocabulary) {
        match self {
            Axiom::ConceptAssertion(c, a) => {
                if let Atomic::Name(n) = c {
                    v.concepts.insert(n.clone());
                }
                v.individuals.insert(a.clone());
            }
            Axiom::RoleAssertion(r, a, b) => {
                v.roles.insert(r.clone());
                v.individuals.insert(a.clone());
                v.individuals.insert(b.clone());
            }
            Axiom::Gci(l, r) => {
                l.collect(&mut v.concepts, &mut v.roles);
                r.to_concept().collect(&mut v.concepts, &mut v.roles);
            }
            Axiom::Ri(p, q) | Axiom::NegRi(p, q) => {
                v.roles.insert(p.base.clone());
                v.roles.insert(q.base.clone());
            }
        }
    }

    /// Whether a GCI has one of the six normal shapes; non-GCIs are normal.
    pub fn is_normal(&self) -> bool {
        let Axiom::Gci(lhs, rhs) = self else {
            return true;
        };
        let name_or_top = |c: &Concept| matches!(c, Concept::Name(_) | Concept::Top);
        match rhs {
            RightSide::ExistsTop(_) => name_or_top(lhs),
            RightSide::Name(_) | RightSide::Bot => match lhs {
                Concept::Name(_) | Concept::Top => true,
                Concept::And(v) => v.len() == 2 && v.iter().all(|c| matches!(c, Concept::Name(_))),
                Concept::Exists(_, f) => name_or_top(f),
                Concept::Bot => false,
            },
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::ConceptAssertion(c, a) => write!(f, "{c}({a})"),
            Axiom::RoleAssertion(r, a, b) => write!(f, "{r}({a},{b})"),
            Axiom::Gci(l, r) => write!(f, "{l} <= {r}"),
            Axiom::Ri(p, q) => write!(f, "{p} <= {q}"),
            Axiom::NegRi(p, q) => write!(f, "{p} and {q} <= bot"),
        }
    }
}

impl fmt::Debug for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedAxiom {
    pub axiom: Axiom,
    pub annotation: Monomial,
}

impl AnnotatedAxiom {
    pub fn new(axiom: Axiom, annotation: Monomial) -> Self {
        AnnotatedAxiom { axiom, annotation }
    }

    pub fn var(axiom: Axiom, v: impl Into<Variable>) -> Self {
        AnnotatedAxiom {
            axiom,
            annotation: Monomial::var(v),
        }
    }

    pub fn unit(axiom: Axiom) -> Self {
        AnnotatedAxiom {
            axiom,
            annotation: Monomial::unit(),
        }
    }
}

impl fmt::Display for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.axiom, self.annotation)
    }
}

impl fmt::Debug for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub concepts: BTreeSet<ConceptName>,
    pub roles: BTreeSet<RoleName>,
    pub individuals: BTreeSet<Individual>,
    pub variables: BTreeSet<Variable>,
}

impl Vocabulary {
    /// Every identifier in use, for picking fresh names.
    pub fn all_names(&self) -> HashSet<String> {
        let mut s = HashSet::new();
        s.extend(self.concepts.iter().map(|x| x.to_string()));
        s.extend(self.roles.iter().map(|x| x.to_string()));
        s.extend(self.individuals.iter().map(|x| x.to_string()));
        s.extend(self.variables.iter().map(|x| x.to_string()));
        s
    }
}

/// Ordered, duplicate-free list of annotated axioms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct AnnotatedOntology {
    axioms: Vec<AnnotatedAxiom>,
    seen: HashSet<Axiom>,
}

impl AnnotatedOntology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends unless the axiom is already present; returns whether it was added.
    pub fn push(&mut self, a: AnnotatedAxiom) -> bool {
        if self.seen.contains(&a.axiom) {
            return false;
        }
        self.seen.insert(a.axiom.clone());
        self.axioms.push(a);
        true
    }

    pub fn contains_axiom(&self, a: &Axiom) -> bool {
        self.seen.contains(a)
    }

    pub fn axioms(&self) -> &[AnnotatedAxiom] {
        &self.axioms
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AnnotatedAxiom> {
        self.axioms.iter()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        vocabulary(self)
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.axioms
            .iter()
            .flat_map(|a| a.annotation.vars().iter().cloned())
            .collect()
    }

    /// The axiom annotated with exactly this single variable.
    pub fn axiom_for_var(&self, v: &Variable) -> Option<&AnnotatedAxiom> {
        self.axioms
            .iter()
            .find(|a| a.annotation.len() == 1 && a.annotation.contains(v))
    }

    pub fn is_normal_form(&self) -> bool {
        self.axioms.iter().all(|a| a.axiom.is_normal())
    }

    /// Keeps the axioms satisfying the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&AnnotatedAxiom) -> bool) -> AnnotatedOntology {
        self.axioms.iter().filter(|a| keep(a)).cloned().collect()
    }
}

impl FromIterator<AnnotatedAxiom> for AnnotatedOntology {
    fn from_iter<T: IntoIterator<Item = AnnotatedAxiom>>(iter: T) -> Self {
        let mut o = AnnotatedOntology::new();
        for a in iter {
            o.push(a);
        }
        o
    }
}

impl Extend<AnnotatedAxiom> for AnnotatedOntology {
    fn extend<T: IntoIterator<Item = AnnotatedAxiom>>(&mut self, iter: T) {
        for a in iter {
            self.push(a);
        }
    }
}

impl<'a> IntoIterator for &'a AnnotatedOntology {
    type Item = &'a AnnotatedAxiom;
    type IntoIter = std::slice::Iter<'a, AnnotatedAxiom>;
    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

impl fmt::Display for AnnotatedOntology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axioms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AnnotatedOntology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.axioms.iter()).finish()
    }
}

pub fn vocabulary(o: &AnnotatedOntology) -> Vocabulary {
    let mut v = Vocabulary::default();
    for a in o {
        a.axiom.collect_vocabulary(&mut v);
        v.variables.extend(a.annotation.vars().iter().cloned());
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Profile {
    General,
    NormalForm,
    ELHIrestr,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::General => "general",
            Profile::NormalForm => "normal-form",
            Profile::ELHIrestr => "ELHI-restricted",
        })
    }
}

/// Normal form, then the restriction on `∃inv(P).A ⊑ B` for every role `P`
/// that some concept name is entailed to have a `P`-successor.
pub fn check_profile(o: &AnnotatedOntology) -> Profile {
    if !o.is_normal_form() {
        return Profile::General;
    }
    let required = crate::saturate::roles_with_entailed_successors(o);
    let violates = o.iter().any(|a| match &a.axiom {
        Axiom::Gci(Concept::Exists(p, filler), _) => {
            **filler != Concept::Top && required.contains(&p.inv())
        }
        _ => false,
    });
    if violates {
        Profile::NormalForm
    } else {
        Profile::ELHIrestr
    }
}
