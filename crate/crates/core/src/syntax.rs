//! Concepts, axioms and ontologies, with the s-expression front end.
//!
//! Concrete syntax is fully parenthesised prefix notation:
//!
//! ```text
//! concept := ATOM | top | bot
//!          | (not C) | (and C C) | (or C C)
//!          | (some ROLE C) | (all ROLE C)
//!          | (the C)            local description {ιC}
//!          | (that C C)         global description ιC.D
//! ```
//!
//! Atoms start with an uppercase letter, roles and individuals with a
//! lowercase one. Ontology files hold one directive per line:
//! `sub (C) (D)`, `inst a (C)`, `rel r a b`; `#` starts a comment.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An ALCι concept.
///
/// `Top`, `Bot`, `Or` and `All` are abbreviations; [`Concept::desugar`]
/// rewrites them into the core connectives (`Top` is kept as a constant).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Concept {
    Atom(String),
    Top,
    Bot,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
    /// `{ιC}`: the singleton holding the unique instance of `C`, if any.
    LocalDD(Box<Concept>),
    /// `ιC.D`: everything, provided `C` has exactly one instance and it is in `D`.
    GlobalDD(Box<Concept>, Box<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Self {
        Concept::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(l: Concept, r: Concept) -> Self {
        Concept::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Concept, r: Concept) -> Self {
        Concept::Or(Box::new(l), Box::new(r))
    }

    pub fn exists(role: impl Into<String>, c: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: Concept) -> Self {
        Concept::Forall(role.into(), Box::new(c))
    }

    pub fn local(c: Concept) -> Self {
        Concept::LocalDD(Box::new(c))
    }

    pub fn global(c: Concept, d: Concept) -> Self {
        Concept::GlobalDD(Box::new(c), Box::new(d))
    }

    /// Right-nested conjunction of `parts`; `Top` when empty.
    pub fn and_all<I>(parts: I) -> Self
    where
        I: IntoIterator<Item = Concept>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Concept::Top,
            Some(last) => it.fold(last, |acc, c| Concept::and(c, acc)),
        }
    }

    /// Symbol count excluding parentheses. Every operator, atom and role
    /// counts one; both description forms count one for the operator.
    pub fn size(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => 1,
            Concept::Not(c) | Concept::LocalDD(c) => 1 + c.size(),
            Concept::And(l, r) | Concept::Or(l, r) | Concept::GlobalDD(l, r) => 1 + l.size() + r.size(),
            Concept::Exists(_, c) | Concept::Forall(_, c) => 2 + c.size(),
        }
    }

    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => vec![],
            Concept::Not(c) | Concept::LocalDD(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => {
                vec![c]
            }
            Concept::And(l, r) | Concept::Or(l, r) | Concept::GlobalDD(l, r) => vec![l, r],
        }
    }

    /// All subterms, including `self`.
    pub fn subconcepts(&self) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        self.collect_subconcepts(&mut out);
        out
    }

    fn collect_subconcepts(&self, out: &mut BTreeSet<Concept>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_subconcepts(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            if let Concept::Atom(a) = c {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn roles(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            if let Concept::Exists(r, _) | Concept::Forall(r, _) = c {
                out.insert(r.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<F: FnMut(&Concept)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn has_local_dd(&self) -> bool {
        let mut found = false;
        self.walk(&mut |c| found |= matches!(c, Concept::LocalDD(_)));
        found
    }

    pub fn has_global_dd(&self) -> bool {
        let mut found = false;
        self.walk(&mut |c| found |= matches!(c, Concept::GlobalDD(..)));
        found
    }

    pub fn is_alc(&self) -> bool {
        !self.has_local_dd() && !self.has_global_dd()
    }

    /// Nesting depth of role restrictions.
    pub fn modal_depth(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bot => 0,
            Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.modal_depth(),
            _ => self.children().iter().map(|c| c.modal_depth()).max().unwrap_or(0),
        }
    }

    /// Rewrites `Bot`, `Or` and `All` into `Top`, `Not`, `And` and `Exists`.
    pub fn desugar(&self) -> Concept {
        match self {
            Concept::Atom(_) | Concept::Top => self.clone(),
            Concept::Bot => Concept::not(Concept::Top),
            Concept::Not(c) => Concept::not(c.desugar()),
            Concept::And(l, r) => Concept::and(l.desugar(), r.desugar()),
            Concept::Or(l, r) => Concept::not(Concept::and(Concept::not(l.desugar()), Concept::not(r.desugar()))),
            Concept::Exists(role, c) => Concept::exists(role.clone(), c.desugar()),
            Concept::Forall(role, c) => Concept::not(Concept::exists(role.clone(), Concept::not(c.desugar()))),
            Concept::LocalDD(c) => Concept::local(c.desugar()),
            Concept::GlobalDD(c, d) => Concept::global(c.desugar(), d.desugar()),
        }
    }

    /// True when only core connectives occur.
    pub fn is_core(&self) -> bool {
        let mut core = true;
        self.walk(&mut |c| core &= !matches!(c, Concept::Bot | Concept::Or(..) | Concept::Forall(..)));
        core
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atom(a) => write!(f, "{a}"),
            Concept::Top => write!(f, "top"),
            Concept::Bot => write!(f, "bot"),
            Concept::Not(c) => write!(f, "(not {c})"),
            Concept::And(l, r) => write!(f, "(and {l} {r})"),
            Concept::Or(l, r) => write!(f, "(or {l} {r})"),
            Concept::Exists(role, c) => write!(f, "(some {role} {c})"),
            Concept::Forall(role, c) => write!(f, "(all {role} {c})"),
            Concept::LocalDD(c) => write!(f, "(the {c})"),
            Concept::GlobalDD(c, d) => write!(f, "(that {c} {d})"),
        }
    }
}

/// Canonical text of a concept.
pub fn print_concept(c: &Concept) -> String {
    c.to_string()
}

/// `lhs ⊑ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Inclusion {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Inclusion {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        Inclusion { lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Assertion {
    /// `a : C`
    Instance { individual: String, concept: Concept },
    /// `r : (a1, a2)`
    Role { role: String, from: String, to: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ontology {
    pub tbox: Vec<Inclusion>,
    pub abox: Vec<Assertion>,
}

impl Ontology {
    pub fn new(tbox: Vec<Inclusion>, abox: Vec<Assertion>) -> Self {
        let mut o = Ontology { tbox, abox };
        o.dedup();
        o
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty() && self.abox.is_empty()
    }

    /// Drops repeated axioms, keeping first occurrences in order.
    pub fn dedup(&mut self) {
        let mut seen = HashSet::new();
        self.tbox.retain(|ax| seen.insert(ax.clone()));
        let mut seen = HashSet::new();
        self.abox.retain(|ax| seen.insert(ax.clone()));
    }

    /// Every concept occurring in an axiom.
    pub fn concepts(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        for ax in &self.tbox {
            out.push(&ax.lhs);
            out.push(&ax.rhs);
        }
        for ax in &self.abox {
            if let Assertion::Instance { concept, .. } = ax {
                out.push(concept);
            }
        }
        out
    }

    /// Individual names in ABox order of first appearance.
    pub fn individuals(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |n: &String| {
            if !out.contains(n) {
                out.push(n.clone());
            }
        };
        for ax in &self.abox {
            match ax {
                Assertion::Instance { individual, .. } => push(individual),
                Assertion::Role { from, to, .. } => {
                    push(from);
                    push(to);
                }
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.concepts().into_iter().flat_map(|c| c.atoms()).collect()
    }

    pub fn roles(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.concepts().into_iter().flat_map(|c| c.roles()).collect();
        for ax in &self.abox {
            if let Assertion::Role { role, .. } = ax {
                out.insert(role.clone());
            }
        }
        out
    }

    /// Total symbol count: concept sizes plus one per name token in assertions.
    pub fn size(&self) -> usize {
        let t: usize = self.tbox.iter().map(|ax| ax.lhs.size() + ax.rhs.size()).sum();
        let a: usize = self
            .abox
            .iter()
            .map(|ax| match ax {
                Assertion::Instance { concept, .. } => 1 + concept.size(),
                Assertion::Role { .. } => 3,
            })
            .sum();
        t + a
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.tbox {
            writeln!(f, "sub ({}) ({})", ax.lhs, ax.rhs)?;
        }
        for ax in &self.abox {
            match ax {
                Assertion::Instance { individual, concept } => writeln!(f, "inst {individual} ({concept})")?,
                Assertion::Role { role, from, to } => writeln!(f, "rel {role} {from} {to}")?,
            }
        }
        Ok(())
    }
}

pub fn print_ontology(o: &Ontology) -> String {
    o.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => write!(f, "'('"),
            Tok::Close => write!(f, "')'"),
            Tok::Word(w) => write!(f, "'{w}'"),
        }
    }
}

fn tokenize(text: &str, line_offset: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1 + line_offset;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch.is_whitespace() {
                i += 1;
            } else if ch == '(' {
                out.push(Token { tok: Tok::Open, line: line_no, column });
                i += 1;
            } else if ch == ')' {
                out.push(Token { tok: Tok::Close, line: line_no, column });
                i += 1;
            } else if ch.is_ascii_alphanumeric() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Word(word), line: line_no, column });
            } else {
                return Err(ParseError {
                    line: line_no,
                    column,
                    expected: vec!["'('".into(), "')'".into(), "identifier".into()],
                    found: format!("'{ch}'"),
                });
            }
        }
    }
    Ok(out)
}

pub fn is_atom_name(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_uppercase()) && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Role and individual names share the lowercase-initial lexical class.
pub fn is_lower_name(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_lowercase()) && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(toks: Vec<Token>, end: (usize, usize)) -> Self {
        Parser { toks, pos: 0, end }
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (line, column, found) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.column, t.tok.to_string()),
            None => (self.end.0, self.end.1, "end of input".to_string()),
        };
        ParseError { line, column, expected: expected.iter().map(|s| s.to_string()).collect(), found }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&["'('"])),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&["')'"])),
        }
    }

    fn lower_name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if is_lower_name(w) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(&[what])),
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        const START: &[&str] = &["ATOM", "'top'", "'bot'", "'('"];
        match self.peek() {
            Some(Tok::Word(w)) => {
                let c = match w.as_str() {
                    "top" => Concept::Top,
                    "bot" => Concept::Bot,
                    w if is_atom_name(w) => Concept::Atom(w.to_string()),
                    _ => return Err(self.err(START)),
                };
                self.pos += 1;
                Ok(c)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                const OPS: &[&str] = &["'not'", "'and'", "'or'", "'some'", "'all'", "'the'", "'that'"];
                let op = match self.peek() {
                    Some(Tok::Word(w)) => w.clone(),
                    _ => return Err(self.err(OPS)),
                };
                let c = match op.as_str() {
                    "not" => {
                        self.pos += 1;
                        Concept::not(self.concept()?)
                    }
                    "and" | "or" | "that" => {
                        self.pos += 1;
                        let l = self.concept()?;
                        let r = self.concept()?;
                        match op.as_str() {
                            "and" => Concept::and(l, r),
                            "or" => Concept::or(l, r),
                            _ => Concept::global(l, r),
                        }
                    }
                    "some" | "all" => {
                        self.pos += 1;
                        let role = self.lower_name("ROLE")?;
                        let c = self.concept()?;
                        if op == "some" {
                            Concept::exists(role, c)
                        } else {
                            Concept::forall(role, c)
                        }
                    }
                    "the" => {
                        self.pos += 1;
                        Concept::local(self.concept()?)
                    }
                    _ => return Err(self.err(OPS)),
                };
                self.expect_close()?;
                Ok(c)
            }
            _ => Err(self.err(START)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err(&["end of input"]))
        }
    }
}

fn end_position(text: &str, line_offset: usize) -> (usize, usize) {
    let last = text.lines().last().unwrap_or("");
    (text.lines().count().max(1) + line_offset, last.chars().count() + 1)
}

/// Parses one concept; surrounding whitespace is ignored.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut p = Parser::new(tokenize(text, 0)?, end_position(text, 0));
    let c = p.concept()?;
    p.finish()?;
    Ok(c)
}

/// Parses an ontology file. Duplicate axioms are dropped.
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let mut tbox = Vec::new();
    let mut abox = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let mut p = Parser::new(tokenize(line, li)?, end_position(line, li));
        let directive = match p.peek() {
            Some(Tok::Word(w)) => w.clone(),
            _ => return Err(p.err(&["'sub'", "'inst'", "'rel'"])),
        };
        p.pos += 1;
        match directive.as_str() {
            "sub" => {
                p.expect_open()?;
                let lhs = p.concept()?;
                p.expect_close()?;
                p.expect_open()?;
                let rhs = p.concept()?;
                p.expect_close()?;
                tbox.push(Inclusion { lhs, rhs });
            }
            "inst" => {
                let individual = p.lower_name("IND")?;
                p.expect_open()?;
                let concept = p.concept()?;
                p.expect_close()?;
                abox.push(Assertion::Instance { individual, concept });
            }
            "rel" => {
                let role = p.lower_name("ROLE")?;
                let from = p.lower_name("IND")?;
                let to = p.lower_name("IND")?;
                abox.push(Assertion::Role { role, from, to });
            }
            _ => {
                p.pos -= 1;
                return Err(p.err(&["'sub'", "'inst'", "'rel'"]));
            }
        }
        p.finish()?;
    }
    Ok(Ontology::new(tbox, abox))
}

/// The three logics of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Logic {
    /// Local descriptions only.
    Alcil,
    /// Global descriptions only.
    Alcig,
    /// Both.
    Alci,
}

impl Logic {
    pub fn allows_local(self) -> bool {
        matches!(self, Logic::Alcil | Logic::Alci)
    }

    pub fn allows_global(self) -> bool {
        matches!(self, Logic::Alcig | Logic::Alci)
    }

    pub fn admits(self, c: &Concept) -> bool {
        (self.allows_local() || !c.has_local_dd()) && (self.allows_global() || !c.has_global_dd())
    }
}

impl std::str::FromStr for Logic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alcil" => Ok(Logic::Alcil),
            "alcig" => Ok(Logic::Alcig),
            "alci" => Ok(Logic::Alci),
            other => Err(format!("unknown logic '{other}' (expected alcil, alcig or alci)")),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Alcil => "alcil",
            Logic::Alcig => "alcig",
            Logic::Alci => "alci",
        })
    }
}
