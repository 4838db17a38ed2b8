//! Translations between the description logics, TBox internalization,
//! the two-variable first-order standard translation, and the binary
//! counter concept.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Assertion, Concept, Inclusion, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("input contains a global description; only local ones can be translated")]
    ContainsGlobal,
    #[error("input must be plain ALC (no descriptions)")]
    NotAlc,
    #[error("counter width must be at least 1")]
    ZeroWidth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationOutput {
    pub concept: Concept,
    pub extra_axioms: Vec<Inclusion>,
    /// Atoms introduced by the translation, none of which occur in the input.
    pub fresh_names: Vec<String>,
}

/// Generates atom names of the form `{stem}__{k}` that avoid a signature.
struct FreshNames {
    stem: &'static str,
    taken: BTreeSet<String>,
    next: usize,
}

impl FreshNames {
    fn new(stem: &'static str, taken: BTreeSet<String>) -> Self {
        FreshNames { stem, taken, next: 0 }
    }

    fn fresh(&mut self) -> String {
        loop {
            let name = format!("{}__{}", self.stem, self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Replaces every `{ιC}` by `C ⊓ ιC.⊤`, innermost first. The result is
/// equivalent to the input on every interpretation.
pub fn local_to_global_exp(c: &Concept) -> Result<TranslationOutput, TranslateError> {
    if c.has_global_dd() {
        return Err(TranslateError::ContainsGlobal);
    }
    Ok(TranslationOutput { concept: exp_rewrite(c), extra_axioms: vec![], fresh_names: vec![] })
}

fn exp_rewrite(c: &Concept) -> Concept {
    match c {
        Concept::Atom(_) | Concept::Top | Concept::Bot => c.clone(),
        Concept::Not(x) => Concept::not(exp_rewrite(x)),
        Concept::And(l, r) => Concept::and(exp_rewrite(l), exp_rewrite(r)),
        Concept::Or(l, r) => Concept::or(exp_rewrite(l), exp_rewrite(r)),
        Concept::Exists(role, x) => Concept::exists(role.clone(), exp_rewrite(x)),
        Concept::Forall(role, x) => Concept::forall(role.clone(), exp_rewrite(x)),
        Concept::LocalDD(x) => {
            let body = exp_rewrite(x);
            Concept::and(body.clone(), Concept::global(body, Concept::Top))
        }
        Concept::GlobalDD(x, d) => Concept::global(exp_rewrite(x), exp_rewrite(d)),
    }
}

/// Polynomial translation state: one fresh atom per distinct description
/// body, shared across every concept translated with the same instance.
pub struct PolyTranslator {
    names: FreshNames,
    atoms: HashMap<Concept, String>,
    axioms: Vec<Inclusion>,
    fresh: Vec<String>,
}

impl PolyTranslator {
    /// `signature` lists the atoms the fresh names must avoid.
    pub fn new(signature: BTreeSet<String>) -> Self {
        PolyTranslator {
            names: FreshNames::new("Dd", signature),
            atoms: HashMap::new(),
            axioms: Vec::new(),
            fresh: Vec::new(),
        }
    }

    /// Replaces every `{ιC}` by `A_C ⊓ ιA_C.⊤` and records `A_C ⊑ C`, `C ⊑ A_C`.
    pub fn translate(&mut self, c: &Concept) -> Result<Concept, TranslateError> {
        if c.has_global_dd() {
            return Err(TranslateError::ContainsGlobal);
        }
        Ok(self.rewrite(c))
    }

    fn rewrite(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Atom(_) | Concept::Top | Concept::Bot => c.clone(),
            Concept::Not(x) => Concept::not(self.rewrite(x)),
            Concept::And(l, r) => Concept::and(self.rewrite(l), self.rewrite(r)),
            Concept::Or(l, r) => Concept::or(self.rewrite(l), self.rewrite(r)),
            Concept::Exists(role, x) => Concept::exists(role.clone(), self.rewrite(x)),
            Concept::Forall(role, x) => Concept::forall(role.clone(), self.rewrite(x)),
            Concept::LocalDD(x) => {
                let body = self.rewrite(x);
                let name = match self.atoms.get(x.as_ref()) {
                    Some(n) => n.clone(),
                    None => {
                        let n = self.names.fresh();
                        let a = Concept::atom(n.clone());
                        self.axioms.push(Inclusion::new(a.clone(), body.clone()));
                        self.axioms.push(Inclusion::new(body, a));
                        self.atoms.insert(x.as_ref().clone(), n.clone());
                        self.fresh.push(n.clone());
                        n
                    }
                };
                let a = Concept::atom(name);
                Concept::and(a.clone(), Concept::global(a, Concept::Top))
            }
            Concept::GlobalDD(x, d) => Concept::global(self.rewrite(x), self.rewrite(d)),
        }
    }

    pub fn axioms(&self) -> &[Inclusion] {
        &self.axioms
    }

    pub fn fresh_names(&self) -> &[String] {
        &self.fresh
    }

    pub fn into_output(self, concept: Concept) -> TranslationOutput {
        TranslationOutput { concept, extra_axioms: self.axioms, fresh_names: self.fresh }
    }
}

/// Translates every axiom of `o`; the definitional axioms for the fresh
/// atoms follow the translated TBox.
pub fn local_to_global_poly(o: &Ontology) -> Result<Ontology, TranslateError> {
    let mut tr = PolyTranslator::new(o.atoms());
    let (tbox, abox) = translate_ontology_with(&mut tr, o)?;
    let mut tbox = tbox;
    tbox.extend(tr.axioms.iter().cloned());
    Ok(Ontology::new(tbox, abox))
}

/// Translates a concept together with an ontology, sharing fresh atoms.
pub fn local_to_global_poly_with(
    c: &Concept,
    o: &Ontology,
) -> Result<(Concept, Ontology, Vec<String>), TranslateError> {
    let mut sig = o.atoms();
    sig.extend(c.atoms());
    let mut tr = PolyTranslator::new(sig);
    let concept = tr.translate(c)?;
    let (mut tbox, abox) = translate_ontology_with(&mut tr, o)?;
    tbox.extend(tr.axioms.iter().cloned());
    Ok((concept, Ontology::new(tbox, abox), tr.fresh))
}

fn translate_ontology_with(
    tr: &mut PolyTranslator,
    o: &Ontology,
) -> Result<(Vec<Inclusion>, Vec<Assertion>), TranslateError> {
    let mut tbox = Vec::new();
    for ax in &o.tbox {
        tbox.push(Inclusion::new(tr.translate(&ax.lhs)?, tr.translate(&ax.rhs)?));
    }
    let mut abox = Vec::new();
    for ax in &o.abox {
        abox.push(match ax {
            Assertion::Instance { individual, concept } => {
                Assertion::Instance { individual: individual.clone(), concept: tr.translate(concept)? }
            }
            other => other.clone(),
        });
    }
    Ok((tbox, abox))
}

/// Which description form the internalization uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Internalization {
    /// `C ⊓ ⊓ ((¬D ⊔ E) ⊓ {ι(¬(¬D ⊔ E) ⊔ A)})`
    Local,
    /// `C ⊓ ⊓ ((¬D ⊔ E) ⊓ A ⊓ ι(¬(¬D ⊔ E) ⊔ A).⊤)`
    Global,
}

/// Encodes an ALC TBox into a single concept that is satisfiable exactly
/// when `c` is satisfiable with respect to `tbox`.
pub fn internalize_tbox(
    c: &Concept,
    tbox: &[Inclusion],
    target: Internalization,
) -> Result<TranslationOutput, TranslateError> {
    if !c.is_alc() || tbox.iter().any(|ax| !ax.lhs.is_alc() || !ax.rhs.is_alc()) {
        return Err(TranslateError::NotAlc);
    }
    let mut sig = c.atoms();
    for ax in tbox {
        sig.extend(ax.lhs.atoms());
        sig.extend(ax.rhs.atoms());
    }
    let mut names = FreshNames::new("Ax", sig);
    let mut fresh = Vec::new();
    let mut out = c.clone();
    for ax in tbox {
        let name = names.fresh();
        fresh.push(name.clone());
        let a = Concept::atom(name);
        let holds = Concept::or(Concept::not(ax.lhs.clone()), ax.rhs.clone());
        let body = Concept::or(Concept::not(holds.clone()), a.clone());
        let part = match target {
            Internalization::Local => Concept::and(holds, Concept::local(body)),
            Internalization::Global => Concept::and(holds, Concept::and(a, Concept::global(body, Concept::Top))),
        };
        out = Concept::and(out, part);
    }
    Ok(TranslationOutput { concept: out, extra_axioms: vec![], fresh_names: fresh })
}

/// One of the two first-order variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::Y => "y",
        })
    }
}

impl std::str::FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" => Ok(Var::X),
            "y" => Ok(Var::Y),
            other => Err(format!("variable must be x or y, got '{other}'")),
        }
    }
}

/// Two-variable first-order formula with equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Unary(String, Var),
    Binary(String, Var, Var),
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Unary(p, v) => write!(f, "{p}({v})"),
            Formula::Binary(p, a, b) => write!(f, "{p}({a},{b})"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(x) => {
                write!(f, "~")?;
                x.fmt_at(f, 4)
            }
            Formula::And(l, r) => {
                l.fmt_at(f, 3)?;
                write!(f, " & ")?;
                r.fmt_at(f, 3)
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " | ")?;
                r.fmt_at(f, 2)
            }
            Formula::Implies(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                r.fmt_at(f, 2)
            }
            Formula::Exists(v, body) => {
                write!(f, "exists {v} (")?;
                body.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Formula::Forall(v, body) => {
                write!(f, "forall {v} (")?;
                body.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

/// ASCII rendering: `~`, `&`, `|`, `->`, `=`, `exists v (...)`,
/// `forall v (...)`, `true`, `false`. `~` binds tightest, then `&`, `|`
/// and `->`; parentheses appear only where precedence needs them.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn b(f: Formula) -> Box<Formula> {
    Box::new(f)
}

/// The standard translation `ST_v(c)`, using only the variables x and y.
pub fn standard_translation_formula(c: &Concept, v: Var) -> Formula {
    let w = v.other();
    match c {
        Concept::Atom(a) => Formula::Unary(a.clone(), v),
        Concept::Top => Formula::True,
        Concept::Bot => Formula::False,
        Concept::Not(x) => Formula::Not(b(standard_translation_formula(x, v))),
        Concept::And(l, r) => {
            Formula::And(b(standard_translation_formula(l, v)), b(standard_translation_formula(r, v)))
        }
        Concept::Or(l, r) => Formula::Or(b(standard_translation_formula(l, v)), b(standard_translation_formula(r, v))),
        Concept::Exists(role, x) => Formula::Exists(
            w,
            b(Formula::And(b(Formula::Binary(role.clone(), v, w)), b(standard_translation_formula(x, w)))),
        ),
        Concept::Forall(role, x) => Formula::Forall(
            w,
            b(Formula::Implies(b(Formula::Binary(role.clone(), v, w)), b(standard_translation_formula(x, w)))),
        ),
        Concept::LocalDD(x) => Formula::And(
            b(standard_translation_formula(x, v)),
            b(Formula::Forall(w, b(Formula::Implies(b(standard_translation_formula(x, w)), b(Formula::Eq(v, w)))))),
        ),
        Concept::GlobalDD(x, d) => Formula::Exists(
            w,
            b(Formula::And(
                b(Formula::And(
                    b(standard_translation_formula(x, w)),
                    b(Formula::Forall(
                        v,
                        b(Formula::Implies(b(standard_translation_formula(x, v)), b(Formula::Eq(v, w)))),
                    )),
                )),
                b(standard_translation_formula(d, w)),
            )),
        ),
    }
}

pub fn standard_translation(c: &Concept, v: Var) -> String {
    standard_translation_formula(c, v).to_string()
}

/// Atom `A_i` of the counter.
pub fn counter_bit(i: usize) -> String {
    format!("A_{i}")
}

/// A satisfiable concept all of whose models contain an r-path through
/// `2^n` elements: a binary counter over bits `A_1..A_n`, least
/// significant first.
///
/// `D_i` says: if bit `i` is the lowest zero, every r-successor sets bit
/// `i`, clears the lower bits and copies the higher ones. `D` conjoins
/// all `D_i` with `∃r.⊤`. The concept requires a unique element outside
/// `D`, carrying all ones, and a unique all-zero element.
pub fn counter_concept(n: usize) -> Result<Concept, TranslateError> {
    if n == 0 {
        return Err(TranslateError::ZeroWidth);
    }
    let a = |i: usize| Concept::atom(counter_bit(i));
    let r = "r";
    let mut ds = Vec::new();
    for i in 1..=n {
        let trigger = Concept::and_all(std::iter::once(Concept::not(a(i))).chain((1..i).map(a)).collect::<Vec<_>>());
        let next =
            Concept::and_all(std::iter::once(a(i)).chain((1..i).map(|j| Concept::not(a(j)))).collect::<Vec<_>>());
        let keep: Vec<Concept> = ((i + 1)..=n)
            .map(|j| {
                Concept::and(
                    Concept::or(Concept::not(a(j)), Concept::forall(r, a(j))),
                    Concept::or(a(j), Concept::forall(r, Concept::not(a(j)))),
                )
            })
            .collect();
        let effect = Concept::and_all(std::iter::once(Concept::forall(r, next)).chain(keep).collect::<Vec<_>>());
        ds.push(Concept::or(Concept::not(trigger), effect));
    }
    ds.push(Concept::exists(r, Concept::Top));
    let d = Concept::and_all(ds);
    let ones = Concept::and_all((1..=n).map(a).collect::<Vec<_>>());
    let zeros = Concept::and_all((1..=n).map(|i| Concept::not(a(i))).collect::<Vec<_>>());
    Ok(Concept::and(Concept::global(Concept::not(d), ones), Concept::global(zeros, Concept::Top)))
}
