//! Why[X] provenance polynomials, their PosBool and Lin images, and evaluation
//! into concrete commutative semirings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use crate::names::Variable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiringError {
    #[error("semiring `{semiring}` is not {flag}; evaluation would not commute with provenance")]
    FlagViolation {
        semiring: String,
        flag: &'static str,
    },
    #[error("variable `{0}` has no value in the valuation")]
    MissingValuation(Variable),
    #[error("variable `{0}` is mapped to the zero of `{1}`; annotations must be nonzero")]
    ZeroValuation(Variable, String),
    #[error("value `{value}` of variable `{var}` is outside the carrier of `{semiring}`")]
    NotInCarrier {
        var: Variable,
        value: String,
        semiring: String,
    },
    #[error("TOP has no image in `{0}` (no sum over the whole carrier)")]
    TopUndefined(String),
    #[error("unknown semiring `{0}` (expected fuzzy, viterbi, tropical, access or boolean)")]
    UnknownSemiring(String),
}

/// A set of variables; the empty set is the unit `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(BTreeSet<Variable>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(BTreeSet::new())
    }

    pub fn var(v: impl Into<Variable>) -> Self {
        Monomial(BTreeSet::from([v.into()]))
    }

    pub fn from_vars<I, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Variable>,
    {
        Monomial(vars.into_iter().map(Into::into).collect())
    }

    pub fn vars(&self) -> &BTreeSet<Variable> {
        &self.0
    }

    pub fn into_vars(self) -> BTreeSet<Variable> {
        self.0
    }

    /// Number of variables. The empty monomial is the unit.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.0.contains(v)
    }

    pub fn is_subset(&self, other: &Monomial) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        mono_times(self, other)
    }

    /// Drops the given variables (maps them to the unit).
    pub fn erase(&self, vars: &BTreeSet<Variable>) -> Monomial {
        Monomial(self.0.difference(vars).cloned().collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            f.write_str(v.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn mono_times(m1: &Monomial, m2: &Monomial) -> Monomial {
    Monomial(m1.0.union(&m2.0).cloned().collect())
}

/// An element of Why[X]: a finite set of monomials, or the sum of everything.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum WhyPolynomial {
    Finite(BTreeSet<Monomial>),
    Top,
}

impl WhyPolynomial {
    pub fn zero() -> Self {
        WhyPolynomial::Finite(BTreeSet::new())
    }

    pub fn one() -> Self {
        WhyPolynomial::Finite(BTreeSet::from([Monomial::unit()]))
    }

    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        WhyPolynomial::Finite(ms.into_iter().collect())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WhyPolynomial::Finite(s) if s.is_empty())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, WhyPolynomial::Top)
    }

    /// `None` for TOP.
    pub fn monomials(&self) -> Option<&BTreeSet<Monomial>> {
        match self {
            WhyPolynomial::Finite(s) => Some(s),
            WhyPolynomial::Top => None,
        }
    }

    /// TOP contains every monomial.
    pub fn contains(&self, m: &Monomial) -> bool {
        match self {
            WhyPolynomial::Finite(s) => s.contains(m),
            WhyPolynomial::Top => true,
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        match self {
            WhyPolynomial::Finite(s) => s.iter().flat_map(|m| m.vars().iter().cloned()).collect(),
            WhyPolynomial::Top => BTreeSet::new(),
        }
    }
}

impl fmt::Display for WhyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhyPolynomial::Top => f.write_str("TOP"),
            WhyPolynomial::Finite(s) if s.is_empty() => f.write_str("0"),
            WhyPolynomial::Finite(s) => {
                for (i, m) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{m}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for WhyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn poly_plus(p1: &WhyPolynomial, p2: &WhyPolynomial) -> WhyPolynomial {
    match (p1, p2) {
        (WhyPolynomial::Finite(a), WhyPolynomial::Finite(b)) => {
            WhyPolynomial::Finite(a.union(b).cloned().collect())
        }
        _ => WhyPolynomial::Top,
    }
}

pub fn poly_times(p1: &WhyPolynomial, p2: &WhyPolynomial) -> WhyPolynomial {
    if p1.is_zero() || p2.is_zero() {
        return WhyPolynomial::zero();
    }
    match (p1, p2) {
        (WhyPolynomial::Finite(a), WhyPolynomial::Finite(b)) => {
            let mut out = BTreeSet::new();
            for x in a {
                for y in b {
                    out.insert(mono_times(x, y));
                }
            }
            WhyPolynomial::Finite(out)
        }
        _ => WhyPolynomial::Top,
    }
}

/// Keeps the subset-minimal monomials.
pub fn minimize(p: &WhyPolynomial) -> WhyPolynomial {
    let WhyPolynomial::Finite(s) = p else {
        return WhyPolynomial::Top;
    };
    let mut by_size: Vec<&Monomial> = s.iter().collect();
    by_size.sort_by_key(|m| m.len());
    let mut kept: Vec<&Monomial> = Vec::new();
    for m in by_size {
        if !kept.iter().any(|k| k.is_subset(m)) {
            kept.push(m);
        }
    }
    WhyPolynomial::Finite(kept.into_iter().cloned().collect())
}

/// An element of Lin[X].
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Lineage {
    Zero,
    Top,
    Vars(BTreeSet<Variable>),
}

impl Lineage {
    pub fn vars(&self) -> Option<&BTreeSet<Variable>> {
        match self {
            Lineage::Vars(v) => Some(v),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Variable) -> bool {
        match self {
            Lineage::Vars(s) => s.contains(v),
            Lineage::Top => true,
            Lineage::Zero => false,
        }
    }
}

impl fmt::Display for Lineage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lineage::Zero => f.write_str("0"),
            Lineage::Top => f.write_str("TOP"),
            Lineage::Vars(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(v.as_str())?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for Lineage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn flatten(p: &WhyPolynomial) -> Lineage {
    match p {
        WhyPolynomial::Top => Lineage::Top,
        WhyPolynomial::Finite(s) if s.is_empty() => Lineage::Zero,
        WhyPolynomial::Finite(_) => Lineage::Vars(p.variables()),
    }
}

/// Security clearance levels, ordered from most public to the access zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessLevel {
    Public,
    Confidential,
    Secret,
    TopSecret,
    Nobody,
}

impl AccessLevel {
    pub fn token(self) -> &'static str {
        match self {
            AccessLevel::Public => "P",
            AccessLevel::Confidential => "C",
            AccessLevel::Secret => "S",
            AccessLevel::TopSecret => "T",
            AccessLevel::Nobody => "0",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Some(match s {
            "P" => AccessLevel::Public,
            "C" => AccessLevel::Confidential,
            "S" => AccessLevel::Secret,
            "T" => AccessLevel::TopSecret,
            _ => return None,
        })
    }
}

/// A carrier value of one of the supported semirings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Level(AccessLevel),
    Bool(bool),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    /// Equality with a tolerance on reals.
    pub fn approx_eq(&self, other: &Value, eps: f64) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => {
                a == b || (a - b).abs() <= eps * (1.0_f64).max(a.abs().max(b.abs()))
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(x) if x.is_infinite() => f.write_str("inf"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Level(l) => f.write_str(l.token()),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub plus_idempotent: bool,
    pub times_idempotent: bool,
    pub absorptive: bool,
    pub positive: bool,
}

pub type BinOp = fn(&Value, &Value) -> Value;

/// A commutative semiring given by its operations. The operations of the
/// builtins expect operands from their own carrier and panic otherwise;
/// [`evaluate`] checks membership before calling them.
#[derive(Clone)]
pub struct SemiringSpec {
    pub name: String,
    pub carrier: String,
    pub plus: BinOp,
    pub times: BinOp,
    pub zero: Value,
    pub one: Value,
    pub flags: Flags,
    pub sum_of_all: Option<Value>,
    pub member: fn(&Value) -> bool,
}

impl fmt::Debug for SemiringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiringSpec")
            .field("name", &self.name)
            .field("carrier", &self.carrier)
            .field("flags", &self.flags)
            .finish()
    }
}

impl SemiringSpec {
    pub fn plus(&self, a: &Value, b: &Value) -> Value {
        (self.plus)(a, b)
    }

    pub fn times(&self, a: &Value, b: &Value) -> Value {
        (self.times)(a, b)
    }

    pub fn contains(&self, v: &Value) -> bool {
        (self.member)(v)
    }
}

fn real(v: &Value) -> f64 {
    match v {
        Value::Real(x) => *x,
        other => panic!("expected a real carrier value, got {other}"),
    }
}

fn level(v: &Value) -> AccessLevel {
    match v {
        Value::Level(l) => *l,
        other => panic!("expected an access level, got {other}"),
    }
}

fn boolean(v: &Value) -> bool {
    match v {
        Value::Bool(b) => *b,
        other => panic!("expected a boolean, got {other}"),
    }
}

fn unit_interval(v: &Value) -> bool {
    matches!(v, Value::Real(x) if (0.0..=1.0).contains(x))
}

pub const BUILTIN_SEMIRINGS: [&str; 5] = ["fuzzy", "viterbi", "tropical", "access", "boolean"];

pub fn builtin_semiring(name: &str) -> Result<SemiringSpec, SemiringError> {
    let idem = |times_idempotent| Flags {
        plus_idempotent: true,
        times_idempotent,
        absorptive: true,
        positive: true,
    };
    let spec = match name {
        "fuzzy" => SemiringSpec {
            name: name.into(),
            carrier: "[0,1]".into(),
            plus: |a, b| Value::Real(real(a).max(real(b))),
            times: |a, b| Value::Real(real(a).min(real(b))),
            zero: Value::Real(0.0),
            one: Value::Real(1.0),
            flags: idem(true),
            sum_of_all: Some(Value::Real(1.0)),
            member: unit_interval,
        },
        "viterbi" => SemiringSpec {
            name: name.into(),
            carrier: "[0,1]".into(),
            plus: |a, b| Value::Real(real(a).max(real(b))),
            times: |a, b| Value::Real(real(a) * real(b)),
            zero: Value::Real(0.0),
            one: Value::Real(1.0),
            flags: idem(false),
            sum_of_all: Some(Value::Real(1.0)),
            member: unit_interval,
        },
        "tropical" => SemiringSpec {
            name: name.into(),
            carrier: "nonnegative reals with infinity".into(),
            plus: |a, b| Value::Real(real(a).min(real(b))),
            times: |a, b| Value::Real(real(a) + real(b)),
            zero: Value::Real(f64::INFINITY),
            one: Value::Real(0.0),
            flags: idem(false),
            sum_of_all: Some(Value::Real(0.0)),
            member: |v| matches!(v, Value::Real(x) if *x >= 0.0),
        },
        "access" => SemiringSpec {
            name: name.into(),
            carrier: "P < C < S < T < 0".into(),
            plus: |a, b| Value::Level(level(a).min(level(b))),
            times: |a, b| Value::Level(level(a).max(level(b))),
            zero: Value::Level(AccessLevel::Nobody),
            one: Value::Level(AccessLevel::Public),
            flags: idem(true),
            sum_of_all: Some(Value::Level(AccessLevel::Public)),
            member: |v| matches!(v, Value::Level(_)),
        },
        "boolean" => SemiringSpec {
            name: name.into(),
            carrier: "{false, true}".into(),
            plus: |a, b| Value::Bool(boolean(a) || boolean(b)),
            times: |a, b| Value::Bool(boolean(a) && boolean(b)),
            zero: Value::Bool(false),
            one: Value::Bool(true),
            flags: idem(true),
            sum_of_all: Some(Value::Bool(true)),
            member: |v| matches!(v, Value::Bool(_)),
        },
        other => return Err(SemiringError::UnknownSemiring(other.to_string())),
    };
    Ok(spec)
}

/// Assignment of variables to carrier values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Valuation(pub BTreeMap<Variable, Value>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: impl Into<Variable>, value: Value) -> Option<Value> {
        self.0.insert(v.into(), value)
    }

    pub fn get(&self, v: &Variable) -> Option<&Value> {
        self.0.get(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<V: Into<Variable>> FromIterator<(V, Value)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (V, Value)>>(iter: T) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Image of `p` under the homomorphism induced by `v`.
///
/// Requires a ⊕-idempotent target. ⊗-idempotency is not required: monomials
/// are sets, so every variable is multiplied in once.
pub fn evaluate(
    p: &WhyPolynomial,
    s: &SemiringSpec,
    v: &Valuation,
) -> Result<Value, SemiringError> {
    if !s.flags.plus_idempotent {
        return Err(SemiringError::FlagViolation {
            semiring: s.name.clone(),
            flag: "plus-idempotent",
        });
    }
    let monos = match p {
        WhyPolynomial::Top => {
            return s
                .sum_of_all
                .ok_or_else(|| SemiringError::TopUndefined(s.name.clone()))
        }
        WhyPolynomial::Finite(m) => m,
    };
    let mut acc = s.zero;
    for m in monos {
        let mut prod = s.one;
        for x in m.vars() {
            let val = v
                .get(x)
                .ok_or_else(|| SemiringError::MissingValuation(x.clone()))?;
            if !s.contains(val) {
                return Err(SemiringError::NotInCarrier {
                    var: x.clone(),
                    value: val.to_string(),
                    semiring: s.name.clone(),
                });
            }
            if *val == s.zero {
                return Err(SemiringError::ZeroValuation(x.clone(), s.name.clone()));
            }
            prod = s.times(&prod, val);
        }
        acc = s.plus(&acc, &prod);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(vars: &[&str]) -> Monomial {
        Monomial::from_vars(vars.iter().copied())
    }

    fn p(monos: &[&[&str]]) -> WhyPolynomial {
        WhyPolynomial::from_monomials(monos.iter().map(|x| m(x)))
    }

    fn dio_poly() -> WhyPolynomial {
        p(&[
            &["x1"],
            &["x3", "x4", "y1", "y2"],
            &["x5", "x6", "y1", "y3"],
        ])
    }

    #[test]
    fn mono_times_examples() {
        assert_eq!(mono_times(&m(&[]), &m(&["x1"])), m(&["x1"]));
        assert_eq!(
            mono_times(&m(&["x1", "y2"]), &m(&["x1", "y1"])),
            m(&["x1", "y1", "y2"])
        );
        assert_eq!(
            mono_times(&m(&["x3", "x4"]), &m(&["y1", "y2"])).to_string(),
            "x3*x4*y1*y2"
        );
    }

    #[test]
    fn plus_examples() {
        assert_eq!(
            poly_plus(&WhyPolynomial::zero(), &p(&[&["x1"]])),
            p(&[&["x1"]])
        );
        assert_eq!(poly_plus(&p(&[&["x1"]]), &p(&[&["x1"]])), p(&[&["x1"]]));
        assert!(poly_plus(&WhyPolynomial::Top, &p(&[&["x1"]])).is_top());
    }

    #[test]
    fn times_examples() {
        let r = poly_times(&p(&[&["x1"], &["y1"]]), &p(&[&["x2"]]));
        assert_eq!(r.to_string(), "x1*x2 + x2*y1");
        assert!(poly_times(&WhyPolynomial::zero(), &WhyPolynomial::Top).is_zero());
        assert!(poly_times(&WhyPolynomial::Top, &p(&[&["x"]])).is_top());
        let r = poly_times(&p(&[&["x1"], &["x2"]]), &p(&[&["x1"]]));
        assert_eq!(r.to_string(), "x1 + x1*x2");
    }

    #[test]
    fn minimize_examples() {
        assert_eq!(minimize(&p(&[&["x1"], &["x1", "x2"]])), p(&[&["x1"]]));
        assert_eq!(minimize(&dio_poly()), dio_poly());
        assert!(minimize(&WhyPolynomial::zero()).is_zero());
        assert!(minimize(&WhyPolynomial::Top).is_top());
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(
            flatten(&dio_poly()).to_string(),
            "{x1, x3, x4, x5, x6, y1, y2, y3}"
        );
        assert_eq!(flatten(&WhyPolynomial::zero()), Lineage::Zero);
        assert_eq!(
            flatten(&WhyPolynomial::one()),
            Lineage::Vars(BTreeSet::new())
        );
        assert_eq!(flatten(&WhyPolynomial::Top), Lineage::Top);
    }

    #[test]
    fn rendering() {
        assert_eq!(dio_poly().to_string(), "x1 + x3*x4*y1*y2 + x5*x6*y1*y3");
        assert_eq!(WhyPolynomial::zero().to_string(), "0");
        assert_eq!(WhyPolynomial::one().to_string(), "1");
        assert_eq!(WhyPolynomial::Top.to_string(), "TOP");
        assert_eq!(p(&[&["x10"], &["x1", "y"]]).to_string(), "x1*y + x10");
    }

    fn dio_valuation(pairs: &[(&str, f64)]) -> Valuation {
        pairs.iter().map(|(k, v)| (*k, Value::Real(*v))).collect()
    }

    #[test]
    fn evaluate_dionysus() {
        let tropical = builtin_semiring("tropical").unwrap();
        let lt = dio_valuation(&[
            ("x1", 1.0),
            ("x2", 5.0),
            ("x3", 8.0),
            ("x4", 1.0),
            ("x5", 2.0),
            ("x6", 1.0),
            ("y1", 2.0),
            ("y2", 1.0),
            ("y3", 1.0),
        ]);
        assert_eq!(
            evaluate(&dio_poly(), &tropical, &lt).unwrap(),
            Value::Real(1.0)
        );
        let fuzzy = builtin_semiring("fuzzy").unwrap();
        let lf = dio_valuation(&[
            ("x1", 0.9),
            ("x2", 0.8),
            ("x3", 0.2),
            ("x4", 0.9),
            ("x5", 0.9),
            ("x6", 1.0),
            ("y1", 0.5),
            ("y2", 1.0),
            ("y3", 1.0),
        ]);
        assert_eq!(
            evaluate(&dio_poly(), &fuzzy, &lf).unwrap(),
            Value::Real(0.9)
        );
        assert_eq!(
            evaluate(&WhyPolynomial::zero(), &fuzzy, &Valuation::new()).unwrap(),
            Value::Real(0.0)
        );
    }

    #[test]
    fn evaluate_top_and_errors() {
        let fuzzy = builtin_semiring("fuzzy").unwrap();
        let tropical = builtin_semiring("tropical").unwrap();
        let empty = Valuation::new();
        assert_eq!(
            evaluate(&WhyPolynomial::Top, &fuzzy, &empty).unwrap(),
            Value::Real(1.0)
        );
        assert_eq!(
            evaluate(&WhyPolynomial::Top, &tropical, &empty).unwrap(),
            Value::Real(0.0)
        );
        assert_eq!(
            evaluate(&p(&[&["x1"]]), &fuzzy, &empty),
            Err(SemiringError::MissingValuation("x1".into()))
        );
        let zero: Valuation = [("x1", Value::Real(0.0))].into_iter().collect();
        assert!(matches!(
            evaluate(&p(&[&["x1"]]), &fuzzy, &zero),
            Err(SemiringError::ZeroValuation(..))
        ));
        let wrong: Valuation = [("x1", Value::Bool(true))].into_iter().collect();
        assert!(matches!(
            evaluate(&p(&[&["x1"]]), &fuzzy, &wrong),
            Err(SemiringError::NotInCarrier { .. })
        ));
        let mut counting = fuzzy.clone();
        counting.name = "counting".into();
        counting.flags.plus_idempotent = false;
        counting.sum_of_all = None;
        assert!(matches!(
            evaluate(&WhyPolynomial::one(), &counting, &empty),
            Err(SemiringError::FlagViolation { .. })
        ));
        let mut no_top = fuzzy.clone();
        no_top.sum_of_all = None;
        assert!(matches!(
            evaluate(&WhyPolynomial::Top, &no_top, &empty),
            Err(SemiringError::TopUndefined(_))
        ));
    }

    #[test]
    fn builtin_operations() {
        let fuzzy = builtin_semiring("fuzzy").unwrap();
        assert_eq!(
            fuzzy.times(&Value::Real(0.9), &Value::Real(0.2)),
            Value::Real(0.2)
        );
        let tropical = builtin_semiring("tropical").unwrap();
        assert_eq!(
            tropical.plus(&Value::Real(6.0), &Value::Real(12.0)),
            Value::Real(6.0)
        );
        let access = builtin_semiring("access").unwrap();
        assert_eq!(
            access.times(
                &Value::Level(AccessLevel::Public),
                &Value::Level(AccessLevel::Secret)
            ),
            Value::Level(AccessLevel::Secret)
        );
        assert!(matches!(
            builtin_semiring("counting"),
            Err(SemiringError::UnknownSemiring(_))
        ));
        for name in BUILTIN_SEMIRINGS {
            let s = builtin_semiring(name).unwrap();
            assert!(s.flags.plus_idempotent);
            assert_eq!(
                s.flags.times_idempotent,
                matches!(name, "fuzzy" | "access" | "boolean")
            );
        }
    }

    fn samples(name: &str) -> Vec<Value> {
        match name {
            "fuzzy" | "viterbi" => [0.0, 0.1, 0.25, 0.5, 0.75, 1.0].map(Value::Real).to_vec(),
            "tropical" => [0.0, 1.0, 2.5, 7.0, f64::INFINITY]
                .map(Value::Real)
                .to_vec(),
            "access" => [
                AccessLevel::Public,
                AccessLevel::Confidential,
                AccessLevel::Secret,
                AccessLevel::TopSecret,
                AccessLevel::Nobody,
            ]
            .map(Value::Level)
            .to_vec(),
            _ => vec![Value::Bool(false), Value::Bool(true)],
        }
    }

    #[test]
    fn semiring_laws_on_samples() {
        for name in BUILTIN_SEMIRINGS {
            let s = builtin_semiring(name).unwrap();
            let xs = samples(name);
            let eq = |a: Value, b: Value| assert!(a.approx_eq(&b, 1e-12), "{name}: {a} != {b}");
            for a in &xs {
                eq(s.plus(a, &s.zero), *a);
                eq(s.times(a, &s.one), *a);
                eq(s.times(a, &s.zero), s.zero);
                eq(s.plus(a, a), *a);
                for b in &xs {
                    eq(s.plus(a, b), s.plus(b, a));
                    eq(s.times(a, b), s.times(b, a));
                    // absorption
                    eq(s.plus(&s.times(a, b), a), *a);
                    for c in &xs {
                        eq(s.plus(&s.plus(a, b), c), s.plus(a, &s.plus(b, c)));
                        eq(s.times(&s.times(a, b), c), s.times(a, &s.times(b, c)));
                        eq(
                            s.times(a, &s.plus(b, c)),
                            s.plus(&s.times(a, b), &s.times(a, c)),
                        );
                    }
                }
            }
            if let Some(top) = s.sum_of_all {
                for a in &xs {
                    eq(s.plus(a, &top), top);
                }
            }
        }
    }

    #[test]
    fn overlapping_times_breaks_commutation_without_times_idempotency() {
        // x1 * x1 = x1 in Why[X], but 2 + 2 != 2 in the tropical semiring.
        let tropical = builtin_semiring("tropical").unwrap();
        let v: Valuation = [("x1", Value::Real(2.0))].into_iter().collect();
        let x = p(&[&["x1"]]);
        let lhs = evaluate(&poly_times(&x, &x), &tropical, &v).unwrap();
        let rhs = tropical.times(
            &evaluate(&x, &tropical, &v).unwrap(),
            &evaluate(&x, &tropical, &v).unwrap(),
        );
        assert_ne!(lhs, rhs);
    }

    fn arb_poly() -> impl Strategy<Value = WhyPolynomial> {
        let var = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
        let mono = prop::collection::btree_set(var, 0..4).prop_map(Monomial::from_vars);
        prop::collection::btree_set(mono, 0..5).prop_map(WhyPolynomial::Finite)
    }

    proptest! {
        #[test]
        fn plus_times_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(poly_plus(&a, &b), poly_plus(&b, &a));
            prop_assert_eq!(poly_times(&a, &b), poly_times(&b, &a));
            prop_assert_eq!(poly_plus(&poly_plus(&a, &b), &c), poly_plus(&a, &poly_plus(&b, &c)));
            prop_assert_eq!(poly_times(&poly_times(&a, &b), &c), poly_times(&a, &poly_times(&b, &c)));
            prop_assert_eq!(
                poly_times(&a, &poly_plus(&b, &c)),
                poly_plus(&poly_times(&a, &b), &poly_times(&a, &c))
            );
        }

        #[test]
        fn minimize_laws(a in arb_poly()) {
            let m = minimize(&a);
            prop_assert_eq!(minimize(&m), m.clone());
            prop_assert!(m.monomials().unwrap().is_subset(a.monomials().unwrap()));
        }

        #[test]
        fn flatten_laws(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let union = |x: Lineage, y: Lineage| -> BTreeSet<Variable> {
                x.vars().unwrap().union(y.vars().unwrap()).cloned().collect()
            };
            let expected = union(flatten(&a), flatten(&b));
            prop_assert_eq!(flatten(&poly_plus(&a, &b)), Lineage::Vars(expected.clone()));
            prop_assert_eq!(flatten(&poly_times(&a, &b)), Lineage::Vars(expected));
        }

        #[test]
        fn unit_and_idempotent_monomials(vars in prop::collection::btree_set("[a-e]", 0..5)) {
            let m = Monomial::from_vars(vars.iter().map(String::as_str));
            prop_assert_eq!(mono_times(&m, &Monomial::unit()), m.clone());
            prop_assert_eq!(mono_times(&m, &m), m);
        }
    }
}
