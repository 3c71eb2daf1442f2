//! Line-oriented text format for ontologies, axioms, queries and valuations.
//!
//! ```text
//! # comment
//! Deity(dionysus) @ x1
//! mother(dionysus,semele) @ x2
//! exists parent . Deity <= Deity @ y1
//! mother <= parent @ y2
//! R and S- <= bot @ z
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::model::{
    AnnotatedAxiom, AnnotatedOntology, Atomic, Axiom, Concept, Individual, RightSide, Role,
    RoleName,
};
use crate::names::is_identifier;
use crate::query::{ConjunctiveQuery, QueryAtom, Term};
use crate::semiring::{AccessLevel, Monomial, Valuation, Value, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("variable `{0}` annotates more than one axiom")]
    DuplicateAnnotation(String),
    #[error("axiom `{0}` occurs more than once")]
    DuplicateAxiom(String),
    #[error("identifier `{0}` is reserved (leading `_`)")]
    ReservedIdentifier(String),
    #[error("right-hand side `{0}` is not a name, `exists P` or `bot` (use --desugar)")]
    IllegalRightSide(String),
    #[error("answer variable `{0}` does not occur in the query body")]
    UnsafeQuery(String),
    #[error("variable `{0}` is assigned twice")]
    DuplicateVariable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

fn err<T>(kind: ParseErrorKind, line: usize, column: usize) -> Result<T, ParseError> {
    Err(ParseError {
        kind,
        span: SourceSpan { line, column },
    })
}

fn syntax<T>(msg: impl Into<String>, line: usize, column: usize) -> Result<T, ParseError> {
    err(ParseErrorKind::Syntax(msg.into()), line, column)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Split conjunctive and qualified-existential right-hand sides.
    pub desugar: bool,
    /// Accept `_`-prefixed identifiers and `@ 1` (machine-generated text).
    pub allow_reserved: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Le,
    At,
    Minus,
    Neck,
    Colon,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Quoted(w) => write!(f, "`\"{w}\"`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::At => f.write_str("`@`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Colon => f.write_str("`:`"),
        }
    }
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), col));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '@' => (Tok::At, 1),
            '-' => (Tok::Minus, 1),
            '<' if two == "<=" => (Tok::Le, 2),
            ':' if two == ":-" => (Tok::Neck, 2),
            ':' => (Tok::Colon, 1),
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    return syntax("unterminated quote", lineno, col);
                }
                out.push((Tok::Quoted(chars[start..j].iter().collect()), col));
                i = j + 1;
                continue;
            }
            other => return syntax(format!("unexpected character `{other}`"), lineno, col),
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    allow_reserved: bool,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        syntax(msg, self.line, self.col())
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.fail(format!("expected {want}, found {t}")),
            None => self.fail(format!("expected {want}, found end of line")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Identifier (not a keyword), checked for the reserved prefix.
    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Word(w)) if is_identifier(&w) => {
                if matches!(w.as_str(), "top" | "bot" | "exists" | "and") {
                    return syntax(format!("keyword `{w}` used as {what}"), self.line, col);
                }
                if w.starts_with('_') && !self.allow_reserved {
                    return err(ParseErrorKind::ReservedIdentifier(w), self.line, col);
                }
                Ok(w)
            }
            Some(t) => syntax(format!("expected {what}, found {t}"), self.line, col),
            None => syntax(
                format!("expected {what}, found end of line"),
                self.line,
                col,
            ),
        }
    }
}

/// Concept or role expression before the concept/role decision is made.
#[derive(Clone, Debug)]
enum Raw {
    Top,
    Bot,
    Word {
        name: String,
        minus: bool,
        col: usize,
    },
    Exists {
        role: String,
        minus: bool,
        filler: Box<Raw>,
    },
    And(Vec<Raw>),
}

fn parse_expr(c: &mut Cursor) -> Result<Raw, ParseError> {
    let mut parts = vec![parse_prim(c)?];
    while matches!(c.peek(), Some(Tok::Word(w)) if w == "and") {
        c.next();
        parts.push(parse_prim(c)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Raw::And(parts)
    })
}

fn parse_prim(c: &mut Cursor) -> Result<Raw, ParseError> {
    let col = c.col();
    match c.peek().cloned() {
        Some(Tok::LParen) => {
            c.next();
            let e = parse_expr(c)?;
            c.expect(Tok::RParen)?;
            Ok(e)
        }
        Some(Tok::Word(w)) if w == "top" => {
            c.next();
            Ok(Raw::Top)
        }
        Some(Tok::Word(w)) if w == "bot" => {
            c.next();
            Ok(Raw::Bot)
        }
        Some(Tok::Word(w)) if w == "exists" => {
            c.next();
            let role = c.ident("role name")?;
            let minus = eat_minus(c);
            let filler = if c.peek() == Some(&Tok::Dot) {
                c.next();
                parse_prim(c)?
            } else {
                Raw::Top
            };
            Ok(Raw::Exists {
                role,
                minus,
                filler: Box::new(filler),
            })
        }
        Some(Tok::Word(_)) => {
            let name = c.ident("name")?;
            let minus = eat_minus(c);
            Ok(Raw::Word { name, minus, col })
        }
        Some(t) => c.fail(format!("expected a concept, found {t}")),
        None => c.fail("expected a concept, found end of line"),
    }
}

fn eat_minus(c: &mut Cursor) -> bool {
    if c.peek() == Some(&Tok::Minus) {
        c.next();
        true
    } else {
        false
    }
}

fn raw_to_concept(r: &Raw, line: usize) -> Result<Concept, ParseError> {
    Ok(match r {
        Raw::Top => Concept::Top,
        Raw::Bot => Concept::Bot,
        Raw::Word {
            name, minus: false, ..
        } => Concept::name(name.as_str()),
        Raw::Word {
            name,
            minus: true,
            col,
        } => {
            return syntax(
                format!("inverse role `{name}-` where a concept is expected"),
                line,
                *col,
            )
        }
        Raw::Exists {
            role,
            minus,
            filler,
        } => Concept::exists(
            Role {
                base: RoleName::new(role),
                inverted: *minus,
            },
            raw_to_concept(filler, line)?,
        ),
        Raw::And(v) => Concept::and(
            v.iter()
                .map(|x| raw_to_concept(x, line))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    })
}

/// Names known to be roles or concepts, used to tell `X <= Y` GCIs from RIs.
#[derive(Default, Clone, Debug)]
pub struct NameKinds {
    pub roles: HashSet<String>,
    pub concepts: HashSet<String>,
}

impl NameKinds {
    pub fn from_ontology(o: &AnnotatedOntology) -> Self {
        let v = o.vocabulary();
        NameKinds {
            roles: v.roles.iter().map(|r| r.to_string()).collect(),
            concepts: v.concepts.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn scan(&mut self, r: &Raw, top_level: bool) {
        match r {
            Raw::Word {
                name, minus: true, ..
            } => {
                self.roles.insert(name.clone());
            }
            Raw::Word {
                name, minus: false, ..
            } if !top_level => {
                self.concepts.insert(name.clone());
            }
            Raw::Exists { role, filler, .. } => {
                self.roles.insert(role.clone());
                self.scan(filler, false);
            }
            Raw::And(v) if v.len() != 2 || v.iter().any(|x| !matches!(x, Raw::Word { .. })) => {
                v.iter().for_each(|x| self.scan(x, false));
            }
            _ => {}
        }
    }
}

impl NameKinds {
    /// Names sharing an RI-shaped line with a known role become roles.
    fn propagate(&mut self, parsed: &[ParsedLine]) {
        loop {
            let mut changed = false;
            for p in parsed {
                let Line::Inclusion { lhs, rhs } = &p.line else {
                    continue;
                };
                let words: Vec<&Raw> = match (lhs, rhs) {
                    (Raw::Word { .. }, Raw::Word { .. }) => vec![lhs, rhs],
                    (Raw::And(v), Raw::Bot)
                        if v.len() == 2 && v.iter().all(|x| matches!(x, Raw::Word { .. })) =>
                    {
                        v.iter().collect()
                    }
                    _ => continue,
                };
                if !is_role_line(&words, self) {
                    continue;
                }
                for w in words {
                    if let Raw::Word { name, .. } = w {
                        changed |= self.roles.insert(name.clone());
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }
}

enum Line {
    Assertion {
        pred: String,
        pred_minus: bool,
        args: Vec<(String, usize)>,
        col: usize,
    },
    Inclusion {
        lhs: Raw,
        rhs: Raw,
    },
}

struct ParsedLine {
    line: Line,
    annotation: Option<(Monomial, usize)>,
    lineno: usize,
}

fn parse_line(
    toks: &[(Tok, usize)],
    lineno: usize,
    end_col: usize,
    opts: ParseOptions,
    annotated: bool,
) -> Result<ParsedLine, ParseError> {
    let mut c = Cursor {
        toks,
        pos: 0,
        line: lineno,
        end_col,
        allow_reserved: opts.allow_reserved,
    };
    let is_assertion = matches!(c.peek(), Some(Tok::Word(w)) if !matches!(w.as_str(), "top" | "bot" | "exists"))
        && (c.peek_at(1) == Some(&Tok::LParen)
            || (c.peek_at(1) == Some(&Tok::Minus) && c.peek_at(2) == Some(&Tok::LParen)));
    let line = if is_assertion {
        let col = c.col();
        let pred = c.ident("predicate")?;
        let pred_minus = eat_minus(&mut c);
        c.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            let acol = c.col();
            args.push((c.ident("individual")?, acol));
            match c.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => return syntax("expected `,` or `)` in assertion", lineno, acol),
            }
        }
        if args.len() > 2 {
            return syntax("assertions take one or two individuals", lineno, col);
        }
        if pred_minus && args.len() == 1 {
            return syntax("inverse role in a concept assertion", lineno, col);
        }
        Line::Assertion {
            pred,
            pred_minus,
            args,
            col,
        }
    } else {
        let lhs = parse_expr(&mut c)?;
        c.expect(Tok::Le)?;
        let rhs = parse_expr(&mut c)?;
        Line::Inclusion { lhs, rhs }
    };
    let annotation = if annotated {
        c.expect(Tok::At)?;
        let col = c.col();
        match c.next() {
            Some(Tok::Word(w)) if w == "1" && opts.allow_reserved => Some((Monomial::unit(), col)),
            Some(Tok::Word(w)) if is_identifier(&w) => {
                if w.starts_with('_') && !opts.allow_reserved {
                    return err(ParseErrorKind::ReservedIdentifier(w), lineno, col);
                }
                Some((Monomial::var(w.as_str()), col))
            }
            _ => return syntax("expected an annotation variable after `@`", lineno, col),
        }
    } else {
        None
    };
    if !c.at_end() {
        return c.fail(format!("unexpected {}", c.peek().unwrap()));
    }
    Ok(ParsedLine {
        line,
        annotation,
        lineno,
    })
}

fn is_role_line(words: &[&Raw], kinds: &NameKinds) -> bool {
    let names: Vec<(&String, bool)> = words
        .iter()
        .filter_map(|w| match w {
            Raw::Word { name, minus, .. } => Some((name, *minus)),
            _ => None,
        })
        .collect();
    if names.iter().any(|(_, m)| *m) {
        return true;
    }
    names.iter().any(|(n, _)| kinds.roles.contains(*n))
        && !names.iter().any(|(n, _)| kinds.concepts.contains(*n))
}

/// Resolves one parsed line into axioms (several when desugaring).
fn resolve(
    p: &ParsedLine,
    kinds: &NameKinds,
    opts: ParseOptions,
    fresh: &mut FreshRoles,
) -> Result<Vec<(Axiom, bool)>, ParseError> {
    let lineno = p.lineno;
    match &p.line {
        Line::Assertion {
            pred,
            pred_minus,
            args,
            col,
        } => {
            if args.len() == 1 {
                if matches!(pred.as_str(), "top" | "bot") {
                    return syntax("`top`/`bot` assertions are not allowed", lineno, *col);
                }
                Ok(vec![(
                    Axiom::concept_assertion(pred.as_str(), args[0].0.as_str()),
                    true,
                )])
            } else {
                let role = Role {
                    base: RoleName::new(pred),
                    inverted: *pred_minus,
                };
                Ok(vec![(
                    Axiom::role_fact(
                        &role,
                        Individual::new(&args[0].0),
                        Individual::new(&args[1].0),
                    ),
                    true,
                )])
            }
        }
        Line::Inclusion { lhs, rhs } => {
            // RI and NegRI candidates.
            let role_of = |r: &Raw| match r {
                Raw::Word { name, minus, .. } => Some(Role {
                    base: RoleName::new(name),
                    inverted: *minus,
                }),
                _ => None,
            };
            if let (Raw::Word { .. }, Raw::Word { .. }) = (lhs, rhs) {
                if is_role_line(&[lhs, rhs], kinds) {
                    return Ok(vec![(
                        Axiom::Ri(role_of(lhs).unwrap(), role_of(rhs).unwrap()),
                        true,
                    )]);
                }
            }
            if let (Raw::And(v), Raw::Bot) = (lhs, rhs) {
                if v.len() == 2 && v.iter().all(|x| matches!(x, Raw::Word { .. })) {
                    let refs: Vec<&Raw> = v.iter().collect();
                    if is_role_line(&refs, kinds) {
                        return Ok(vec![(
                            Axiom::neg_ri(role_of(&v[0]).unwrap(), role_of(&v[1]).unwrap()),
                            true,
                        )]);
                    }
                }
            }
            let l = raw_to_concept(lhs, lineno)?;
            if l.contains_bot() {
                return syntax("`bot` is not allowed on a left-hand side", lineno, 1);
            }
            let r = raw_to_concept(rhs, lineno)?;
            if let Some(rs) = right_side(&r) {
                return Ok(vec![(Axiom::Gci(l, rs), true)]);
            }
            if !opts.desugar {
                return err(ParseErrorKind::IllegalRightSide(r.to_string()), lineno, 1);
            }
            let mut out = Vec::new();
            desugar(l, r, true, fresh, &mut out);
            Ok(out)
        }
    }
}

fn right_side(c: &Concept) -> Option<RightSide> {
    match c {
        Concept::Name(n) => Some(RightSide::Name(n.clone())),
        Concept::Bot => Some(RightSide::Bot),
        Concept::Exists(p, f) if **f == Concept::Top => Some(RightSide::ExistsTop(p.clone())),
        _ => None,
    }
}

/// Fresh `_nfSK` role names, skipping ones already in use.
pub(crate) struct FreshRoles {
    next: usize,
    taken: HashSet<String>,
}

impl FreshRoles {
    pub(crate) fn new(taken: HashSet<String>) -> Self {
        FreshRoles { next: 0, taken }
    }

    fn fresh(&mut self) -> Role {
        loop {
            let n = format!("_nfS{}", self.next);
            self.next += 1;
            if self.taken.insert(n.clone()) {
                return Role::new(n.as_str());
            }
        }
    }
}

/// Splits `lhs ⊑ rhs` into axioms with grammatical right-hand sides. The flag
/// says whether the axiom carries the original annotation (else the unit).
pub(crate) fn desugar(
    lhs: Concept,
    rhs: Concept,
    original: bool,
    fresh: &mut FreshRoles,
    out: &mut Vec<(Axiom, bool)>,
) {
    if let Some(rs) = right_side(&rhs) {
        out.push((Axiom::Gci(lhs, rs), original));
        return;
    }
    match rhs {
        Concept::Top => {}
        Concept::And(parts) => {
            for p in parts {
                desugar(lhs.clone(), p, original, fresh, out);
            }
        }
        Concept::Exists(p, filler) => {
            let s = fresh.fresh();
            out.push((Axiom::Gci(lhs, RightSide::ExistsTop(s.clone())), original));
            out.push((Axiom::Ri(s.clone(), p), false));
            desugar(
                Concept::exists(s.inv(), Concept::Top),
                *filler,
                false,
                fresh,
                out,
            );
        }
        Concept::Name(_) | Concept::Bot => unreachable!("handled by right_side"),
    }
}

fn logical_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

pub fn parse_ontology(text: &str) -> Result<AnnotatedOntology, ParseError> {
    parse_ontology_with(text, ParseOptions::default())
}

pub fn parse_ontology_with(
    text: &str,
    opts: ParseOptions,
) -> Result<AnnotatedOntology, ParseError> {
    let mut parsed = Vec::new();
    for (lineno, line) in logical_lines(text) {
        let toks = tokenize(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        parsed.push(parse_line(&toks, lineno, line.len() + 1, opts, true)?);
    }
    let mut kinds = NameKinds::default();
    for p in &parsed {
        match &p.line {
            Line::Assertion { pred, args, .. } => {
                if args.len() == 1 {
                    kinds.concepts.insert(pred.clone());
                } else {
                    kinds.roles.insert(pred.clone());
                }
            }
            Line::Inclusion { lhs, rhs } => {
                kinds.scan(lhs, true);
                kinds.scan(rhs, true);
            }
        }
    }
    kinds.propagate(&parsed);
    let mut taken: HashSet<String> = kinds
        .roles
        .iter()
        .chain(kinds.concepts.iter())
        .cloned()
        .collect();
    for p in &parsed {
        if let Some((m, _)) = &p.annotation {
            taken.extend(m.vars().iter().map(|v| v.to_string()));
        }
    }
    let mut fresh = FreshRoles::new(taken);
    let mut onto = AnnotatedOntology::new();
    let mut used_vars: BTreeMap<Variable, usize> = BTreeMap::new();
    for p in &parsed {
        let (ann, acol) = p.annotation.clone().expect("ontology lines are annotated");
        for v in ann.vars() {
            if used_vars.insert(v.clone(), p.lineno).is_some() {
                return err(
                    ParseErrorKind::DuplicateAnnotation(v.to_string()),
                    p.lineno,
                    acol,
                );
            }
        }
        for (ax, original) in resolve(p, &kinds, opts, &mut fresh)? {
            let a = if original {
                AnnotatedAxiom::new(ax, ann.clone())
            } else {
                AnnotatedAxiom::unit(ax)
            };
            let shown = a.axiom.to_string();
            if !onto.push(a) {
                return err(ParseErrorKind::DuplicateAxiom(shown), p.lineno, 1);
            }
        }
    }
    Ok(onto)
}

/// One unannotated axiom, e.g. a command-line query. Reserved names are
/// accepted; `kinds` disambiguates `X <= Y`.
pub fn parse_axiom(text: &str, kinds: &NameKinds) -> Result<Axiom, ParseError> {
    let toks = tokenize(text, 1)?;
    if toks.is_empty() {
        return syntax("empty axiom", 1, 1);
    }
    let opts = ParseOptions {
        desugar: false,
        allow_reserved: true,
    };
    let p = parse_line(&toks, 1, text.len() + 1, opts, false)?;
    let mut kinds = kinds.clone();
    if let Line::Inclusion { lhs, rhs } = &p.line {
        kinds.scan(lhs, true);
        kinds.scan(rhs, true);
    }
    let mut fresh = FreshRoles::new(HashSet::new());
    let mut v = resolve(&p, &kinds, opts, &mut fresh)?;
    Ok(v.remove(0).0)
}

/// Parses a query; bare identifiers not declared in the head are existential
/// variables, and `"a"` or `ind:a` denote individuals.
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery, ParseError> {
    parse_query_in(text, &BTreeSet::new())
}

/// Like [`parse_query`], but bare identifiers naming one of `individuals`
/// (and not declared in the head) are individuals.
pub fn parse_query_in(
    text: &str,
    individuals: &BTreeSet<Individual>,
) -> Result<ConjunctiveQuery, ParseError> {
    let mut toks = Vec::new();
    let mut first_line = 1;
    let mut found = false;
    for (lineno, line) in logical_lines(text) {
        let t = tokenize(line, lineno)?;
        if !t.is_empty() && !found {
            first_line = lineno;
            found = true;
        }
        toks.extend(t.into_iter().map(|(t, c)| (t, c, lineno)));
    }
    if toks.is_empty() {
        return syntax("empty query", 1, 1);
    }
    let flat: Vec<(Tok, usize)> = toks.iter().map(|(t, c, _)| (t.clone(), *c)).collect();
    let lines: Vec<usize> = toks.iter().map(|t| t.2).collect();
    let mut c = Cursor {
        toks: &flat,
        pos: 0,
        line: first_line,
        end_col: 1,
        allow_reserved: false,
    };
    let sync = |c: &mut Cursor| {
        if let Some(l) = lines.get(c.pos) {
            c.line = *l;
        }
    };
    c.ident("query name")?;
    c.expect(Tok::LParen)?;
    let mut answer: Vec<(String, usize, usize)> = Vec::new();
    if c.peek() != Some(&Tok::RParen) {
        loop {
            sync(&mut c);
            let col = c.col();
            let v = c.ident("answer variable")?;
            if answer.iter().any(|(a, ..)| *a == v) {
                return syntax(format!("answer variable `{v}` repeated"), c.line, col);
            }
            answer.push((v, c.line, col));
            match c.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => return c.fail("expected `,` or `)` in the query head"),
            }
        }
    } else {
        c.next();
    }
    sync(&mut c);
    c.expect(Tok::Neck)?;
    let head: HashSet<&str> = answer.iter().map(|(a, ..)| a.as_str()).collect();
    let mut atoms = BTreeSet::new();
    loop {
        sync(&mut c);
        let col = c.col();
        let pred = c.ident("predicate")?;
        if c.peek() == Some(&Tok::Minus) {
            return c.fail("inverse roles are not allowed in queries");
        }
        c.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            sync(&mut c);
            args.push(parse_term(&mut c, &head, individuals)?);
            match c.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => return c.fail("expected `,` or `)` in atom"),
            }
        }
        let atom = match args.len() {
            1 => QueryAtom::Concept(pred.as_str().into(), args.pop().unwrap()),
            2 => {
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                QueryAtom::Role(Role::new(pred.as_str()), a, b)
            }
            _ => return syntax("atoms take one or two terms", c.line, col),
        };
        atoms.insert(atom);
        match c.peek() {
            Some(Tok::Comma) => {
                c.next();
            }
            Some(Tok::Dot) => {
                c.next();
                if !c.at_end() {
                    sync(&mut c);
                    return c.fail("unexpected text after `.`");
                }
                break;
            }
            None => break,
            Some(t) => {
                let msg = format!("expected `,` or `.`, found {t}");
                sync(&mut c);
                return c.fail(msg);
            }
        }
    }
    let q = ConjunctiveQuery::new(
        answer.iter().map(|(a, ..)| Variable::new(a)).collect(),
        atoms,
    );
    let used = q.variables();
    for (a, line, col) in &answer {
        if !used.contains(&Variable::new(a)) {
            return err(ParseErrorKind::UnsafeQuery(a.clone()), *line, *col);
        }
    }
    Ok(q)
}

fn parse_term(
    c: &mut Cursor,
    head: &HashSet<&str>,
    individuals: &BTreeSet<Individual>,
) -> Result<Term, ParseError> {
    let col = c.col();
    match c.peek().cloned() {
        Some(Tok::Quoted(s)) => {
            c.next();
            if !is_identifier(&s) {
                return syntax(format!("`{s}` is not a valid individual name"), c.line, col);
            }
            Ok(Term::Ind(Individual::new(s)))
        }
        Some(Tok::Word(w)) if w == "ind" && c.peek_at(1) == Some(&Tok::Colon) => {
            c.next();
            c.next();
            Ok(Term::Ind(Individual::new(c.ident("individual")?)))
        }
        _ => {
            let w = c.ident("term")?;
            if !head.contains(w.as_str()) && individuals.contains(&Individual::new(&w)) {
                Ok(Term::Ind(Individual::new(w)))
            } else {
                Ok(Term::Var(Variable::new(w)))
            }
        }
    }
}

pub fn parse_value(s: &str) -> Option<Value> {
    let s = s.trim();
    if let Some(l) = AccessLevel::from_token(s) {
        return Some(Value::Level(l));
    }
    match s {
        "true" => return Some(Value::Bool(true)),
        "false" => return Some(Value::Bool(false)),
        "inf" | "infinity" | "∞" => return Some(Value::Real(f64::INFINITY)),
        _ => {}
    }
    s.parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .map(Value::Real)
}

pub fn parse_valuation(text: &str) -> Result<Valuation, ParseError> {
    let mut val = Valuation::new();
    for (lineno, line) in logical_lines(text) {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let col = content.len() - content.trim_start().len() + 1;
        let Some((var, value)) = content.split_once('=') else {
            return syntax("expected `variable = value`", lineno, col);
        };
        let var = var.trim();
        if !is_identifier(var) {
            return syntax(format!("`{var}` is not a variable name"), lineno, col);
        }
        let vcol = content.find('=').unwrap() + 2;
        let Some(v) = parse_value(value) else {
            return syntax(format!("`{}` is not a value", value.trim()), lineno, vcol);
        };
        if val.insert(var, v).is_some() {
            return err(
                ParseErrorKind::DuplicateVariable(var.to_string()),
                lineno,
                col,
            );
        }
    }
    Ok(val)
}

pub fn render_ontology(o: &AnnotatedOntology) -> String {
    o.to_string()
}

pub fn render_valuation(v: &Valuation) -> String {
    v.0.iter().map(|(k, x)| format!("{k} = {x}\n")).collect()
}

/// One `{...}` per axiom set, members in ontology order, sets ordered by the
/// positions of their members.
pub fn render_axiom_sets(
    o: &AnnotatedOntology,
    sets: &BTreeSet<BTreeSet<AnnotatedAxiom>>,
) -> String {
    let pos = |a: &AnnotatedAxiom| o.iter().position(|b| b == a).unwrap_or(usize::MAX);
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut by_row: Vec<Vec<&AnnotatedAxiom>> = Vec::new();
    let mut keyed: Vec<(Vec<usize>, Vec<&AnnotatedAxiom>)> = sets
        .iter()
        .map(|s| {
            let mut members: Vec<&AnnotatedAxiom> = s.iter().collect();
            members.sort_by_key(|a| (pos(a), a.to_string()));
            (members.iter().map(|a| pos(a)).collect(), members)
        })
        .collect();
    keyed.sort();
    for (k, m) in keyed {
        rows.push(k);
        by_row.push(m);
    }
    let mut out = String::new();
    for members in by_row {
        out.push('{');
        out.push_str(
            &members
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        );
        out.push_str("}\n");
    }
    out
}

/// Atomic concept from its text form.
pub fn parse_atomic(s: &str) -> Option<Atomic> {
    match s {
        "top" => Some(Atomic::Top),
        "bot" => Some(Atomic::Bot),
        s if is_identifier(s) => Some(Atomic::name(s)),
        _ => None,
    }
}
