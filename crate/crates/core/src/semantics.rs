//! Finite interpretations and concept evaluation.
//!
//! Interpretation files are line oriented:
//!
//! ```text
//! domain c d e
//! concept A e
//! role r (c,d) (d,e)
//! ind a e
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::syntax::{Assertion, Concept, Inclusion, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown element '{0}'")]
    UnknownElement(String),
    #[error("individual '{0}' is not mapped by the interpretation")]
    UnknownIndividual(String),
    #[error("the domain must be non-empty")]
    EmptyDomain,
    #[error("duplicate element '{0}'")]
    DuplicateElement(String),
}

/// A finite interpretation. Elements are interned as indices `0..len()`;
/// index order is the total order used for every deterministic output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    concepts: BTreeMap<String, BTreeSet<usize>>,
    roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    individuals: BTreeMap<String, usize>,
}

/// A set of domain elements of one interpretation.
pub type Extension = FixedBitSet;

impl Interpretation {
    pub fn new<I, S>(elements: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut interp = Interpretation {
            elements: Vec::new(),
            index: HashMap::new(),
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            individuals: BTreeMap::new(),
        };
        for e in elements {
            let e = e.into();
            if interp.index.contains_key(&e) {
                return Err(SemanticsError::DuplicateElement(e));
            }
            interp.index.insert(e.clone(), interp.elements.len());
            interp.elements.push(e);
        }
        if interp.elements.is_empty() {
            return Err(SemanticsError::EmptyDomain);
        }
        Ok(interp)
    }

    /// Domain `{d0, ..., d(n-1)}`.
    pub fn with_size(n: usize) -> Result<Self, SemanticsError> {
        Self::new((0..n).map(|i| format!("d{i}")))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, d: usize) -> &str {
        &self.elements[d]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn check(&self, d: usize) -> Result<(), SemanticsError> {
        if d < self.elements.len() {
            Ok(())
        } else {
            Err(SemanticsError::UnknownElement(format!("#{d}")))
        }
    }

    pub fn add_concept_member(&mut self, atom: &str, d: usize) -> Result<(), SemanticsError> {
        self.check(d)?;
        self.concepts.entry(atom.to_string()).or_default().insert(d);
        Ok(())
    }

    /// Registers `atom` with an empty extension if it is not yet present.
    pub fn declare_concept(&mut self, atom: &str) {
        self.concepts.entry(atom.to_string()).or_default();
    }

    pub fn add_role_edge(&mut self, role: &str, d: usize, e: usize) -> Result<(), SemanticsError> {
        self.check(d)?;
        self.check(e)?;
        self.roles.entry(role.to_string()).or_default().insert((d, e));
        Ok(())
    }

    pub fn declare_role(&mut self, role: &str) {
        self.roles.entry(role.to_string()).or_default();
    }

    pub fn set_individual(&mut self, name: &str, d: usize) -> Result<(), SemanticsError> {
        self.check(d)?;
        self.individuals.insert(name.to_string(), d);
        Ok(())
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &str> {
        self.concepts.keys().map(String::as_str)
    }

    pub fn role_names(&self) -> impl Iterator<Item = &str> {
        self.roles.keys().map(String::as_str)
    }

    pub fn concept_extension(&self, atom: &str) -> BTreeSet<usize> {
        self.concepts.get(atom).cloned().unwrap_or_default()
    }

    pub fn in_concept(&self, atom: &str, d: usize) -> bool {
        self.concepts.get(atom).is_some_and(|s| s.contains(&d))
    }

    pub fn role_edges(&self, role: &str) -> BTreeSet<(usize, usize)> {
        self.roles.get(role).cloned().unwrap_or_default()
    }

    pub fn individuals(&self) -> &BTreeMap<String, usize> {
        &self.individuals
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.individuals.get(name).copied()
    }

    /// Successor lists of `role`, indexed by element.
    pub fn successors(&self, role: &str) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        if let Some(edges) = self.roles.get(role) {
            for &(d, e) in edges {
                out[d].push(e);
            }
        }
        out
    }

    /// Extension of `c`, following the ι-semantics for both descriptions.
    pub fn eval(&self, c: &Concept) -> Extension {
        Evaluator::new(self).eval(c)
    }

    pub fn satisfies(&self, c: &Concept, d: usize) -> bool {
        self.eval(c).contains(d)
    }

    pub fn parse(text: &str) -> Result<Self, SemanticsError> {
        parse_interpretation(text)
    }
}

/// Memoizing evaluator bound to one interpretation.
pub struct Evaluator<'i> {
    interp: &'i Interpretation,
    successors: HashMap<String, Vec<Vec<usize>>>,
    memo: HashMap<Concept, Extension>,
}

impl<'i> Evaluator<'i> {
    pub fn new(interp: &'i Interpretation) -> Self {
        Evaluator { interp, successors: HashMap::new(), memo: HashMap::new() }
    }

    fn full(&self) -> Extension {
        let mut s = FixedBitSet::with_capacity(self.interp.len());
        s.insert_range(..);
        s
    }

    fn empty(&self) -> Extension {
        FixedBitSet::with_capacity(self.interp.len())
    }

    pub fn eval(&mut self, c: &Concept) -> Extension {
        if let Some(ext) = self.memo.get(c) {
            return ext.clone();
        }
        let ext = match c {
            Concept::Top => self.full(),
            Concept::Bot => self.empty(),
            Concept::Atom(a) => {
                let mut s = self.empty();
                if let Some(members) = self.interp.concepts.get(a) {
                    for &d in members {
                        s.insert(d);
                    }
                }
                s
            }
            Concept::Not(inner) => {
                let mut s = self.eval(inner);
                s.toggle_range(..);
                s
            }
            Concept::And(l, r) => {
                let mut s = self.eval(l);
                s.intersect_with(&self.eval(r));
                s
            }
            Concept::Or(l, r) => {
                let mut s = self.eval(l);
                s.union_with(&self.eval(r));
                s
            }
            Concept::Exists(role, inner) => {
                let target = self.eval(inner);
                self.diamond(role, &target)
            }
            Concept::Forall(role, inner) => {
                let mut target = self.eval(inner);
                target.toggle_range(..);
                let mut s = self.diamond(role, &target);
                s.toggle_range(..);
                s
            }
            Concept::LocalDD(inner) => {
                let body = self.eval(inner);
                let mut s = self.empty();
                if body.count_ones(..) == 1 {
                    s = body;
                }
                s
            }
            Concept::GlobalDD(body, scope) => {
                let b = self.eval(body);
                let d = self.eval(scope);
                if b.count_ones(..) == 1 && b.is_subset(&d) {
                    self.full()
                } else {
                    self.empty()
                }
            }
        };
        self.memo.insert(c.clone(), ext.clone());
        ext
    }

    fn diamond(&mut self, role: &str, target: &Extension) -> Extension {
        let interp = self.interp;
        let succ = self.successors.entry(role.to_string()).or_insert_with(|| interp.successors(role));
        let mut s = FixedBitSet::with_capacity(interp.len());
        for (d, next) in succ.iter().enumerate() {
            if next.iter().any(|&e| target.contains(e)) {
                s.insert(d);
            }
        }
        s
    }
}

/// `C^I ⊆ D^I`.
pub fn models_inclusion(interp: &Interpretation, ax: &Inclusion) -> bool {
    let mut ev = Evaluator::new(interp);
    let l = ev.eval(&ax.lhs);
    let r = ev.eval(&ax.rhs);
    l.is_subset(&r)
}

pub fn models_assertion(interp: &Interpretation, ax: &Assertion) -> Result<bool, SemanticsError> {
    let lookup = |n: &str| interp.individual(n).ok_or_else(|| SemanticsError::UnknownIndividual(n.to_string()));
    match ax {
        Assertion::Instance { individual, concept } => {
            let d = lookup(individual)?;
            Ok(interp.eval(concept).contains(d))
        }
        Assertion::Role { role, from, to } => {
            let d = lookup(from)?;
            let e = lookup(to)?;
            Ok(interp.roles.get(role).is_some_and(|s| s.contains(&(d, e))))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Axiom<'a> {
    Inclusion(&'a Inclusion),
    Assertion(&'a Assertion),
}

pub fn models_axiom(interp: &Interpretation, ax: Axiom<'_>) -> Result<bool, SemanticsError> {
    match ax {
        Axiom::Inclusion(i) => Ok(models_inclusion(interp, i)),
        Axiom::Assertion(a) => models_assertion(interp, a),
    }
}

pub fn models_ontology(interp: &Interpretation, o: &Ontology) -> Result<bool, SemanticsError> {
    let mut ok = true;
    for ax in &o.tbox {
        ok &= models_inclusion(interp, ax);
    }
    for ax in &o.abox {
        ok &= models_assertion(interp, ax)?;
    }
    Ok(ok)
}

fn is_element_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '#')
}

fn parse_pairs(rest: &str, line: usize) -> Result<Vec<(String, String)>, SemanticsError> {
    let err = |m: &str| SemanticsError::Parse { line, message: m.to_string() };
    let compact: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut s = compact.as_str();
    while !s.is_empty() {
        let body = s.strip_prefix('(').ok_or_else(|| err("expected '(' to open a pair"))?;
        let close = body.find(')').ok_or_else(|| err("unterminated pair"))?;
        let (inside, after) = body.split_at(close);
        let (a, b) = inside.split_once(',').ok_or_else(|| err("pair needs a comma"))?;
        if a.is_empty() || b.is_empty() || !a.chars().chain(b.chars()).all(is_element_char) {
            return Err(err("malformed pair"));
        }
        out.push((a.to_string(), b.to_string()));
        s = &after[1..];
    }
    Ok(out)
}

pub fn parse_interpretation(text: &str) -> Result<Interpretation, SemanticsError> {
    let mut interp: Option<Interpretation> = None;
    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| SemanticsError::Parse { line: line_no, message: m };
        let (directive, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if directive == "domain" {
            if interp.is_some() {
                return Err(err("duplicate 'domain' line".into()));
            }
            let elems: Vec<&str> = rest.split_whitespace().collect();
            if let Some(bad) = elems.iter().find(|e| !e.chars().all(is_element_char)) {
                return Err(err(format!("bad element name '{bad}'")));
            }
            interp = Some(Interpretation::new(elems).map_err(|e| err(e.to_string()))?);
            continue;
        }
        let it = interp.as_mut().ok_or_else(|| err("'domain' must come before other directives".into()))?;
        let elem = |it: &Interpretation, n: &str| it.element(n).ok_or_else(|| err(format!("unknown element '{n}'")));
        let mut words = rest.split_whitespace();
        match directive {
            "concept" => {
                let name = words.next().ok_or_else(|| err("missing concept name".into()))?;
                it.declare_concept(name);
                for w in words {
                    let d = elem(it, w)?;
                    it.add_concept_member(name, d).map_err(|e| err(e.to_string()))?;
                }
            }
            "role" => {
                let trimmed = rest.trim_start();
                let (name, pairs) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
                if name.is_empty() {
                    return Err(err("missing role name".into()));
                }
                it.declare_role(name);
                for (a, b) in parse_pairs(pairs, line_no)? {
                    let (d, e) = (elem(it, &a)?, elem(it, &b)?);
                    it.add_role_edge(name, d, e).map_err(|e| err(e.to_string()))?;
                }
            }
            "ind" => {
                let (Some(name), Some(e), None) = (words.next(), words.next(), words.next()) else {
                    return Err(err("expected 'ind NAME ELEMENT'".into()));
                };
                let d = elem(it, e)?;
                it.set_individual(name, d).map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown directive '{other}'"))),
        }
    }
    interp.ok_or(SemanticsError::Parse { line: 0, message: "missing 'domain' line".into() })
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain {}", self.elements.join(" "))?;
        for (name, members) in &self.concepts {
            write!(f, "concept {name}")?;
            for &d in members {
                write!(f, " {}", self.elements[d])?;
            }
            writeln!(f)?;
        }
        for (name, edges) in &self.roles {
            write!(f, "role {name}")?;
            for &(d, e) in edges {
                write!(f, " ({},{})", self.elements[d], self.elements[e])?;
            }
            writeln!(f)?;
        }
        for (name, &d) in &self.individuals {
            writeln!(f, "ind {name} {}", self.elements[d])?;
        }
        Ok(())
    }
}

pub fn print_interpretation(interp: &Interpretation) -> String {
    interp.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_concept;

    fn fig1() -> (Interpretation, Interpretation) {
        let i = parse_interpretation("domain a b\nconcept A\n").unwrap();
        let j = parse_interpretation("domain c d e\nconcept A e\n").unwrap();
        (i, j)
    }

    fn names(i: &Interpretation, ext: &Extension) -> Vec<String> {
        ext.ones().map(|d| i.element_name(d).to_string()).collect()
    }

    #[test]
    fn local_description_on_singleton() {
        let (_, j) = fig1();
        let ext = j.eval(&parse_concept("(the A)").unwrap());
        assert_eq!(names(&j, &ext), vec!["e"]);
    }

    #[test]
    fn global_description_all_or_nothing() {
        let (i, j) = fig1();
        let c = parse_concept("(that A top)").unwrap();
        assert_eq!(i.eval(&c).count_ones(..), 0);
        assert_eq!(names(&j, &j.eval(&c)), vec!["c", "d", "e"]);
    }

    #[test]
    fn local_description_on_non_singleton() {
        let i = parse_interpretation("domain a b\nconcept A a b").unwrap();
        assert_eq!(i.eval(&parse_concept("(the A)").unwrap()).count_ones(..), 0);
    }

    #[test]
    fn axioms() {
        let (i, mut j) = fig1();
        let a = Concept::atom("A");
        assert!(models_inclusion(&i, &Inclusion::new(a.clone(), a.clone())));
        j.set_individual("a", j.element("e").unwrap()).unwrap();
        let ax = Assertion::Instance { individual: "a".into(), concept: Concept::local(a.clone()) };
        assert_eq!(models_assertion(&j, &ax), Ok(true));
        let mut k = parse_interpretation("domain x y\nind a x\nind b y\nrole r (y,x)").unwrap();
        let rel = Assertion::Role { role: "r".into(), from: "a".into(), to: "b".into() };
        assert_eq!(models_assertion(&k, &rel), Ok(false));
        let unknown = Assertion::Instance { individual: "zz".into(), concept: a.clone() };
        assert_eq!(models_assertion(&k, &unknown), Err(SemanticsError::UnknownIndividual("zz".into())));
        assert_eq!(models_ontology(&k, &Ontology::default()), Ok(true));
        k.add_concept_member("A", 0).unwrap();
        let o = Ontology::new(vec![Inclusion::new(a, Concept::Bot)], vec![]);
        assert_eq!(models_ontology(&k, &o), Ok(false));
    }

    #[test]
    fn file_roundtrip() {
        let text = "domain c d e\nconcept A e\nconcept B\nrole r (c,d) (d,e)\nind a e\n";
        let i = parse_interpretation(text).unwrap();
        assert_eq!(print_interpretation(&i), text);
        let j =
            parse_interpretation("# x\ndomain c d e\nrole r ( c , d )(d,e)\nconcept A e\nconcept B\nind a e").unwrap();
        assert_eq!(i, j);
    }

    #[test]
    fn file_errors() {
        assert!(parse_interpretation("concept A e").is_err());
        assert!(parse_interpretation("domain").is_err());
        assert!(parse_interpretation("domain a a").is_err());
        assert!(parse_interpretation("domain a\nconcept A b").is_err());
        assert!(parse_interpretation("domain a\nrole r (a a)").is_err());
        assert!(parse_interpretation("domain a\nfrob").is_err());
        assert!(parse_interpretation("").is_err());
    }

    #[test]
    fn quantifiers() {
        let i = parse_interpretation("domain a b c\nconcept A b\nrole r (a,b) (b,c)").unwrap();
        let some = i.eval(&parse_concept("(some r A)").unwrap());
        assert_eq!(names(&i, &some), vec!["a"]);
        let all = i.eval(&parse_concept("(all r A)").unwrap());
        assert_eq!(names(&i, &all), vec!["a", "c"]);
    }
}
