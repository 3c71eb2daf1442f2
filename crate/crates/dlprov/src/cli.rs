//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 usage, 2 unreadable input, 3 unsatisfiable input where a
//! satisfiable one is required, 4 oracle disagreement.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::entail::axiom_provenance;
use crate::explain::{self, ExplainError, Target};
use crate::model::{check_profile, AnnotatedAxiom, AnnotatedOntology, Axiom, Individual};
use crate::normalize::normalize;
use crate::oracle;
use crate::query::{cq_provenance, rewrite};
use crate::saturate::{classical_saturate, saturate, saturate_k, unsat_witness, SaturateError};
use crate::semiring::{builtin_semiring, evaluate, minimize, Variable, WhyPolynomial};
use crate::textio::{
    parse_axiom, parse_ontology_with, parse_query_in, parse_valuation, render_axiom_sets,
    render_ontology, NameKinds, ParseOptions,
};
use crate::Error;

#[derive(Parser)]
#[command(
    name = "dlprov",
    version,
    about = "Provenance of entailments in annotated ELHI-bottom ontologies"
)]
struct Cli {
    /// Accept conjunctions and qualified existentials on right-hand sides.
    #[arg(long, global = true)]
    desugar: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Eval {
    /// Evaluate in a builtin semiring: fuzzy, viterbi, tropical, access or boolean.
    #[arg(long, requires = "valuation")]
    semiring: Option<String>,
    /// File of `variable = value` lines.
    #[arg(long, requires = "semiring")]
    valuation: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, report the profile and decide satisfiability.
    Check { onto: PathBuf },
    /// Print the normal form.
    Normalize { onto: PathBuf },
    /// Print the saturation.
    Saturate {
        onto: PathBuf,
        /// Restricted rules, keeping monomials of at most N variables.
        #[arg(long, conflicts_with = "classical")]
        k: Option<usize>,
        /// Drop annotations and print the derived axioms only.
        #[arg(long)]
        classical: bool,
    },
    /// Provenance of an axiom.
    Provenance {
        onto: PathBuf,
        #[arg(long)]
        axiom: String,
        #[command(flatten)]
        eval: Eval,
        /// Cross-check against the brute-force reasoner.
        #[arg(long)]
        oracle: bool,
    },
    /// Provenance of a query answer.
    Query {
        onto: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Comma separated answer tuple; repeat for several tuples.
        #[arg(long)]
        tuple: Vec<String>,
        /// Also print the rewritings with their monomials.
        #[arg(long)]
        rewritings: bool,
        #[command(flatten)]
        eval: Eval,
    },
    /// Minimal axiom sets entailing an axiom.
    Justify {
        onto: PathBuf,
        #[arg(long)]
        axiom: String,
        /// Variables of axioms to take for granted.
        #[arg(long, value_delimiter = ',')]
        r#static: Vec<String>,
        #[arg(long)]
        oracle: bool,
    },
    /// Variables of every axiom used in some derivation.
    Lineage {
        onto: PathBuf,
        #[arg(long)]
        axiom: String,
    },
    /// Axioms whose fuzzy degree reaches a threshold.
    Ncut {
        onto: PathBuf,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        n: f64,
    },
}

/// A failure together with its exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => 2,
            Error::Semiring(_) => 2,
            Error::Saturate(SaturateError::NotELHIrestr) => 1,
            Error::Explain(
                ExplainError::UnsatisfiableOntology | ExplainError::UnsatisfiableLhs(_),
            ) => 3,
            Error::Explain(ExplainError::MissingValuation(_) | ExplainError::NotADegree(..)) => 2,
            Error::Oracle(oracle::OracleError::BoundExceeded { .. }) => 1,
            _ => 2,
        };
        Exit(code, e.to_string())
    }
}

macro_rules! from_via_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Exit {
            fn from(e: $t) -> Self {
                Exit::from(Error::from(e))
            }
        }
    )*};
}

from_via_error!(
    crate::textio::ParseError,
    crate::semiring::SemiringError,
    SaturateError,
    crate::entail::EntailError,
    crate::query::QueryError,
    ExplainError,
    oracle::OracleError
);

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit(2, format!("{}: {e}", path.display())))
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    desugar: bool,
}

impl Ctx<'_> {
    fn say(&mut self, s: impl AsRef<str>) {
        let _ = self.out.write_all(s.as_ref().as_bytes());
    }

    fn warn(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", s.as_ref());
    }

    fn ontology(&self, path: &Path) -> Result<AnnotatedOntology, Exit> {
        let text = read(path)?;
        parse_ontology_with(
            &text,
            ParseOptions {
                desugar: self.desugar,
                allow_reserved: false,
            },
        )
        .map_err(|e| Exit(2, format!("{}: {e}", path.display())))
    }

    fn axiom(&mut self, o: &AnnotatedOntology, text: &str) -> Result<Axiom, Exit> {
        let a = parse_axiom(text, &NameKinds::from_ontology(o))?;
        let mut v = crate::model::Vocabulary::default();
        a.collect_vocabulary(&mut v);
        if v.concepts.iter().any(|c| c.as_str().starts_with("_nf")) {
            self.warn("the axiom mentions normalization names; their provenance is not preserved");
        }
        Ok(a)
    }

    fn evaluate(&mut self, p: &WhyPolynomial, eval: &Eval) -> Result<(), Exit> {
        match (&eval.semiring, &eval.valuation) {
            (Some(name), Some(file)) => {
                let s = builtin_semiring(name).map_err(|e| Exit(1, e.to_string()))?;
                let val = parse_valuation(&read(file)?)?;
                let v = evaluate(p, &s, &val)?;
                self.say(format!("{v}\n"));
            }
            _ => self.say(format!("{p}\n")),
        }
        Ok(())
    }
}

/// Sets of annotation variables, for comparing justifications.
fn var_sets(sets: &BTreeSet<BTreeSet<AnnotatedAxiom>>) -> BTreeSet<BTreeSet<Variable>> {
    sets.iter()
        .map(|s| {
            s.iter()
                .flat_map(|a| a.annotation.vars().iter().cloned())
                .collect()
        })
        .collect()
}

fn without_static(
    sets: BTreeSet<BTreeSet<AnnotatedAxiom>>,
    static_vars: &BTreeSet<Variable>,
) -> BTreeSet<BTreeSet<AnnotatedAxiom>> {
    let stripped: BTreeSet<BTreeSet<AnnotatedAxiom>> = sets
        .into_iter()
        .map(|s| {
            s.into_iter()
                .filter(|a| !a.annotation.vars().iter().any(|v| static_vars.contains(v)))
                .collect()
        })
        .collect();
    stripped
        .iter()
        .filter(|s| !stripped.iter().any(|t| t != *s && t.is_subset(s)))
        .cloned()
        .collect()
}

fn subset_for(o: &AnnotatedOntology, vars: &BTreeSet<Variable>) -> AnnotatedOntology {
    o.filter(|a| !a.annotation.is_unit() && a.annotation.vars().is_subset(vars))
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<i32, Exit> {
    match cmd {
        Command::Check { onto } => {
            let o = ctx.ontology(&onto)?;
            let profile = check_profile(&o);
            let on = normalize(&o);
            match unsat_witness(&on)? {
                None => {
                    ctx.say(format!("satisfiable\nprofile: {profile}\n"));
                    Ok(0)
                }
                Some(w) => {
                    let why = match w {
                        Some(a) => format!("bot({a}) is derived"),
                        None => "top <= bot is derived".to_string(),
                    };
                    ctx.say(format!("unsatisfiable\nprofile: {profile}\n"));
                    Err(Exit(3, format!("unsatisfiable: {why}")))
                }
            }
        }
        Command::Normalize { onto } => {
            let o = ctx.ontology(&onto)?;
            ctx.say(render_ontology(&normalize(&o)));
            Ok(0)
        }
        Command::Saturate { onto, k, classical } => {
            let on = normalize(&ctx.ontology(&onto)?);
            if classical {
                for a in classical_saturate(&on)? {
                    ctx.say(format!("{a}\n"));
                }
            } else if let Some(k) = k {
                ctx.say(saturate_k(&on, k)?.render());
            } else {
                ctx.say(saturate(&on)?.render());
            }
            Ok(0)
        }
        Command::Provenance {
            onto,
            axiom,
            eval,
            oracle: check,
        } => {
            let o = ctx.ontology(&onto)?;
            let alpha = ctx.axiom(&o, &axiom)?;
            let p = axiom_provenance(&o, &alpha)?;
            ctx.evaluate(&p, &eval)?;
            if check {
                return cross_check_provenance(ctx, &o, &Target::Axiom(alpha), &p);
            }
            Ok(0)
        }
        Command::Query {
            onto,
            query,
            tuple,
            rewritings,
            eval,
        } => {
            let o = ctx.ontology(&onto)?;
            let q = parse_query_in(&read(&query)?, &o.vocabulary().individuals)?;
            let tuples: Vec<Vec<Individual>> = if tuple.is_empty() {
                vec![Vec::new()]
            } else {
                tuple
                    .iter()
                    .map(|t| {
                        t.split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(Individual::new)
                            .collect()
                    })
                    .collect()
            };
            for t in &tuples {
                let p = cq_provenance(&o, &q, t)?;
                if tuples.len() > 1 {
                    ctx.say(format!(
                        "({}) ",
                        t.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(",")
                    ));
                }
                ctx.evaluate(&p, &eval)?;
                if rewritings {
                    let on = normalize(&o);
                    let sat = saturate(&on)?;
                    for r in rewrite(&q.bind(t)?, &sat, &on) {
                        ctx.say(format!("  {} @ {}\n", r.query, r.monomial));
                    }
                }
            }
            Ok(0)
        }
        Command::Justify {
            onto,
            axiom,
            r#static,
            oracle: check,
        } => {
            let o = ctx.ontology(&onto)?;
            let alpha = ctx.axiom(&o, &axiom)?;
            let static_vars: BTreeSet<Variable> =
                r#static.iter().map(|s| Variable::new(s.trim())).collect();
            let t = Target::Axiom(alpha);
            let js = explain::justifications(&o, &t, &static_vars)?;
            ctx.say(render_axiom_sets(&o, &js));
            if check {
                let brute = without_static(oracle::brute_justifications(&o, &t)?, &static_vars);
                if brute != js {
                    let _ = writeln!(
                        ctx.err,
                        "oracle mismatch; the brute-force justifications are:"
                    );
                    let _ = ctx.err.write_all(render_axiom_sets(&o, &brute).as_bytes());
                    return Ok(4);
                }
            }
            Ok(0)
        }
        Command::Lineage { onto, axiom } => {
            let o = ctx.ontology(&onto)?;
            let alpha = ctx.axiom(&o, &axiom)?;
            let l = explain::lineage(&o, &alpha)?;
            ctx.say(format!("{l}\n"));
            Ok(0)
        }
        Command::Ncut { onto, valuation, n } => {
            let o = ctx.ontology(&onto)?;
            let val = parse_valuation(&read(&valuation)?)?;
            ctx.say(render_ontology(&explain::ncut(&o, n, &val)?));
            Ok(0)
        }
    }
}

/// Every monomial must name an entailing subset; for assertions the minimal
/// monomials must be exactly the justifications.
fn cross_check_provenance(
    ctx: &mut Ctx,
    o: &AnnotatedOntology,
    t: &Target,
    p: &WhyPolynomial,
) -> Result<i32, Exit> {
    let Some(ms) = p.monomials() else {
        return Ok(0);
    };
    let mut bad = false;
    for m in ms {
        if !oracle::brute_classical_entails(&subset_for(o, m.vars()), t)? {
            let _ = writeln!(
                ctx.err,
                "oracle mismatch: {m} does not name an entailing subset"
            );
            bad = true;
        }
    }
    if matches!(t, Target::Axiom(a) if a.is_assertion()) {
        let mine: BTreeSet<BTreeSet<Variable>> = minimize(p)
            .monomials()
            .into_iter()
            .flatten()
            .map(|m| m.vars().clone())
            .collect();
        let brute = var_sets(&oracle::brute_justifications(o, t)?);
        if mine != brute {
            let _ = writeln!(
                ctx.err,
                "oracle mismatch: minimal monomials differ from the brute-force justifications"
            );
            bad = true;
        }
    }
    Ok(if bad { 4 } else { 0 })
}

/// Runs the tool on `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        out,
        err,
        desugar: cli.desugar,
    };
    match execute(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            code
        }
    }
}
