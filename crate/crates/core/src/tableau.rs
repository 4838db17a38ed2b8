//! Tableau decision procedure for ALC with local and global definite
//! descriptions.
//!
//! Concepts are desugared and interned into a [`ConceptTable`] that is
//! closed under subconcepts and single negation before the search starts,
//! so every assertion a rule can produce has an id up front.
//!
//! The engine applies deterministic rules eagerly through a work queue,
//! then picks the highest-priority branching or individual-creating rule
//! and explores its conclusions depth first. [`applicable_rules`] is an
//! independent full scan of a branch used to cross-check the engine.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::semantics::Interpretation;
use crate::syntax::{Assertion, Concept, Logic, Ontology};

/// Prefix of atoms introduced by the calculus. User atoms cannot start
/// with an underscore, so these never collide with the input signature.
pub const FRESH_PREFIX: &str = "__";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("timed out after {0:?}")]
    Timeout(Duration),
    #[error("individual cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("input uses {construct}, which {logic} does not allow")]
    Unsupported { logic: Logic, construct: &'static str },
    #[error("branch is not saturated")]
    NotSaturated,
    #[error("branch is closed")]
    Closed,
    #[error("unknown individual '{0}' in role assertion")]
    UnknownIndividual(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProverConfig {
    pub logic: Logic,
    pub enable_cut: bool,
    /// Maximum individuals per branch; `None` uses the theoretical bound
    /// `2^(4(|C|+|O|)) + k`.
    pub individual_cap: Option<usize>,
    pub timeout: Option<Duration>,
    /// Randomizes the choice among rule instances of equal priority.
    pub tie_break_seed: Option<u64>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig { logic: Logic::Alci, enable_cut: true, individual_cap: None, timeout: None, tie_break_seed: None }
    }
}

impl ProverConfig {
    pub fn with_logic(logic: Logic) -> Self {
        ProverConfig { logic, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    Clash,
    AboxInstance,
    AboxRole,
    NegNeg,
    And,
    TBox,
    Iota1Local,
    Iota2Local,
    Iota2Global,
    NegExists,
    NegAnd,
    CutLocal,
    CutGlobal,
    NegIotaLocal,
    NegIotaGlobal,
    Iota1Global,
    Exists,
}

impl RuleId {
    /// Lower is applied first. Rules sharing a number are interchangeable.
    pub fn priority(self) -> u8 {
        match self {
            RuleId::Clash => 0,
            RuleId::AboxInstance | RuleId::AboxRole => 1,
            RuleId::NegNeg => 2,
            RuleId::And => 3,
            RuleId::TBox => 4,
            RuleId::Iota1Local => 5,
            RuleId::Iota2Local | RuleId::Iota2Global => 6,
            RuleId::NegExists => 7,
            RuleId::NegAnd => 8,
            RuleId::CutLocal | RuleId::CutGlobal => 9,
            RuleId::NegIotaLocal => 10,
            RuleId::NegIotaGlobal => 11,
            RuleId::Iota1Global => 12,
            RuleId::Exists => 13,
        }
    }

    pub fn is_branching(self) -> bool {
        matches!(
            self,
            RuleId::NegAnd | RuleId::CutLocal | RuleId::CutGlobal | RuleId::NegIotaLocal | RuleId::NegIotaGlobal
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Clash => "clash",
            RuleId::AboxInstance => "abox_i",
            RuleId::AboxRole => "abox_r",
            RuleId::NegNeg => "neg_neg",
            RuleId::And => "and",
            RuleId::TBox => "tbox",
            RuleId::Iota1Local => "iota1_local",
            RuleId::Iota2Local => "iota2_local",
            RuleId::Iota2Global => "iota2_global",
            RuleId::NegExists => "neg_exists",
            RuleId::NegAnd => "neg_and",
            RuleId::CutLocal => "cut_local",
            RuleId::CutGlobal => "cut_global",
            RuleId::NegIotaLocal => "neg_iota_local",
            RuleId::NegIotaGlobal => "neg_iota_global",
            RuleId::Iota1Global => "iota1_global",
            RuleId::Exists => "exists",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Exists(usize, usize),
    Local(usize),
    Global(usize, usize),
}

/// Interned concept closure of one proof problem.
#[derive(Debug)]
pub struct ConceptTable {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
    neg: Vec<Option<usize>>,
    atoms: Vec<String>,
    atom_fresh: Vec<bool>,
    atom_ids: HashMap<String, usize>,
    roles: Vec<String>,
    role_ids: HashMap<String, usize>,
    /// body id -> (A_C, ¬A_C) for local descriptions
    local_fresh: HashMap<usize, (usize, usize)>,
    /// body id -> (A^g_C, ¬A^g_C) for global descriptions
    global_fresh: HashMap<usize, (usize, usize)>,
    is_body: Vec<bool>,
    top: usize,
}

impl ConceptTable {
    fn new() -> Self {
        let mut t = ConceptTable {
            nodes: Vec::new(),
            ids: HashMap::new(),
            neg: Vec::new(),
            atoms: Vec::new(),
            atom_fresh: Vec::new(),
            atom_ids: HashMap::new(),
            roles: Vec::new(),
            role_ids: HashMap::new(),
            local_fresh: HashMap::new(),
            global_fresh: HashMap::new(),
            is_body: Vec::new(),
            top: 0,
        };
        t.top = t.node(Node::Top);
        t
    }

    fn node(&mut self, n: Node) -> usize {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n);
        self.ids.insert(n, id);
        self.neg.push(None);
        self.is_body.push(false);
        if let Node::Not(x) = n {
            self.neg[x] = Some(id);
        }
        id
    }

    fn atom_id(&mut self, name: &str, fresh: bool) -> usize {
        if let Some(&a) = self.atom_ids.get(name) {
            return a;
        }
        let a = self.atoms.len();
        self.atoms.push(name.to_string());
        self.atom_fresh.push(fresh);
        self.atom_ids.insert(name.to_string(), a);
        a
    }

    fn role_id(&mut self, name: &str) -> usize {
        if let Some(&r) = self.role_ids.get(name) {
            return r;
        }
        let r = self.roles.len();
        self.roles.push(name.to_string());
        self.role_ids.insert(name.to_string(), r);
        r
    }

    /// Interns a core (desugared) concept and all its subterms.
    fn intern(&mut self, c: &Concept) -> usize {
        let n = match c {
            Concept::Top => Node::Top,
            Concept::Atom(a) => Node::Atom(self.atom_id(a, false)),
            Concept::Not(x) => Node::Not(self.intern(x)),
            Concept::And(l, r) => {
                let l = self.intern(l);
                let r = self.intern(r);
                Node::And(l, r)
            }
            Concept::Exists(role, x) => {
                let r = self.role_id(role);
                Node::Exists(r, self.intern(x))
            }
            Concept::LocalDD(x) => Node::Local(self.intern(x)),
            Concept::GlobalDD(x, d) => {
                let x = self.intern(x);
                let d = self.intern(d);
                Node::Global(x, d)
            }
            Concept::Bot | Concept::Or(..) | Concept::Forall(..) => {
                return self.intern(&c.desugar());
            }
        };
        self.node(n)
    }

    /// Adds negations of every interned concept plus the fresh atoms that
    /// descriptions need.
    fn close(&mut self) {
        let base = self.nodes.len();
        for id in 0..base {
            match self.nodes[id] {
                Node::Local(x) => {
                    self.is_body[x] = true;
                    if !self.local_fresh.contains_key(&x) {
                        let name = format!("{FRESH_PREFIX}l_{}", self.to_concept(x));
                        let a = self.atom_id(&name, true);
                        let pos = self.node(Node::Atom(a));
                        let neg = self.node(Node::Not(pos));
                        self.local_fresh.insert(x, (pos, neg));
                    }
                }
                Node::Global(x, _) => {
                    self.is_body[x] = true;
                    if !self.global_fresh.contains_key(&x) {
                        let name = format!("{FRESH_PREFIX}g_{}", self.to_concept(x));
                        let a = self.atom_id(&name, true);
                        let pos = self.node(Node::Atom(a));
                        let neg = self.node(Node::Not(pos));
                        self.global_fresh.insert(x, (pos, neg));
                    }
                }
                _ => {}
            }
        }
        let upto = self.nodes.len();
        for id in 0..upto {
            if self.neg[id].is_none() {
                self.node(Node::Not(id));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Looks up a concept already in the closure.
    pub fn id_of(&self, c: &Concept) -> Option<usize> {
        let n = match c {
            Concept::Top => Node::Top,
            Concept::Atom(a) => Node::Atom(*self.atom_ids.get(a)?),
            Concept::Not(x) => Node::Not(self.id_of(x)?),
            Concept::And(l, r) => Node::And(self.id_of(l)?, self.id_of(r)?),
            Concept::Exists(role, x) => Node::Exists(*self.role_ids.get(role)?, self.id_of(x)?),
            Concept::LocalDD(x) => Node::Local(self.id_of(x)?),
            Concept::GlobalDD(x, d) => Node::Global(self.id_of(x)?, self.id_of(d)?),
            Concept::Bot | Concept::Or(..) | Concept::Forall(..) => return self.id_of(&c.desugar()),
        };
        self.ids.get(&n).copied()
    }

    pub fn to_concept(&self, id: usize) -> Concept {
        match self.nodes[id] {
            Node::Top => Concept::Top,
            Node::Atom(a) => Concept::Atom(self.atoms[a].clone()),
            Node::Not(x) => Concept::not(self.to_concept(x)),
            Node::And(l, r) => Concept::and(self.to_concept(l), self.to_concept(r)),
            Node::Exists(r, x) => Concept::exists(self.roles[r].clone(), self.to_concept(x)),
            Node::Local(x) => Concept::local(self.to_concept(x)),
            Node::Global(x, d) => Concept::global(self.to_concept(x), self.to_concept(d)),
        }
    }

    fn negation(&self, id: usize) -> usize {
        self.neg[id].expect("closure contains the negation of every base concept")
    }

    /// The id `c'` such that `a:c` and `a:c'` clash, when it exists.
    fn complement(&self, id: usize) -> Option<usize> {
        match self.nodes[id] {
            Node::Not(x) => Some(x),
            _ => self.neg[id],
        }
    }
}

#[derive(Debug)]
struct Shared {
    table: ConceptTable,
    tbox_forms: Vec<usize>,
    enable_cut: bool,
    cap: usize,
}

/// How an individual entered the branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Root,
    Abox,
    Exists,
    Iota1Global,
    NegIotaGlobal,
    NegIotaLocal,
}

#[derive(Debug, Clone)]
struct Individual {
    theory: FixedBitSet,
    concepts: Vec<usize>,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
    origin: Origin,
    neg_exists_version: u64,
}

#[derive(Debug, Clone)]
struct ExistsEntry {
    ind: usize,
    concept: usize,
    witness: Option<usize>,
    version: u64,
}

/// Open, closed, or open with no applicable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchStatus {
    Open,
    Closed,
    Saturated,
}

/// A tableau branch. Assertions are never removed.
#[derive(Debug, Clone)]
pub struct Branch {
    shared: Arc<Shared>,
    inds: Vec<Individual>,
    class_root: Vec<usize>,
    members: Vec<Vec<usize>>,
    holders: HashMap<usize, Vec<usize>>,
    unique_local: FixedBitSet,
    unique_global: FixedBitSet,
    unique_list: Vec<usize>,
    neg_globals: Vec<usize>,
    iota1_seen: FixedBitSet,
    pending: VecDeque<(usize, usize)>,
    neg_and: Vec<(usize, usize)>,
    cut: Vec<(usize, usize)>,
    neg_local: Vec<(usize, usize)>,
    neg_global: Vec<(usize, usize)>,
    iota1: Vec<usize>,
    exists: Vec<ExistsEntry>,
    clash: Option<(usize, usize)>,
    applied: BTreeMap<RuleId, u64>,
}

/// One applicable rule together with its premise.
///
/// `individual` and `concept` identify the main premise `a:C` (for cut
/// rules `concept` is the description body being decided). `other` is a
/// second individual where the rule has one: the role successor for
/// `NegExists`, the source of the copied assertion for `Iota2*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub individual: usize,
    pub concept: usize,
    pub other: Option<usize>,
}

impl RuleInstance {
    pub fn describe(&self, b: &Branch) -> String {
        let c = b.table().to_concept(self.concept);
        match self.other {
            Some(o) => format!("{} on {}:{} with {}", self.rule, b.ind_label(self.individual), c, b.ind_label(o)),
            None => format!("{} on {}:{}", self.rule, b.ind_label(self.individual), c),
        }
    }
}

impl Branch {
    fn empty(shared: Arc<Shared>) -> Self {
        let n = shared.table.len();
        Branch {
            shared,
            inds: Vec::new(),
            class_root: Vec::new(),
            members: Vec::new(),
            holders: HashMap::new(),
            unique_local: FixedBitSet::with_capacity(n),
            unique_global: FixedBitSet::with_capacity(n),
            unique_list: Vec::new(),
            neg_globals: Vec::new(),
            iota1_seen: FixedBitSet::with_capacity(n),
            pending: VecDeque::new(),
            neg_and: Vec::new(),
            cut: Vec::new(),
            neg_local: Vec::new(),
            neg_global: Vec::new(),
            iota1: Vec::new(),
            exists: Vec::new(),
            clash: None,
            applied: BTreeMap::new(),
        }
    }

    /// Builds a branch holding exactly the given assertions, each
    /// individual also labelled `⊤`. No rule has been applied yet.
    pub fn from_assertions(
        concepts: &[(&str, Concept)],
        roles: &[(&str, &str, &str)],
        tbox: &[crate::syntax::Inclusion],
        cfg: &ProverConfig,
    ) -> Result<Branch, ProverError> {
        let mut all: Vec<Concept> = concepts.iter().map(|(_, c)| c.clone()).collect();
        all.push(Concept::Top);
        let shared = build_shared(&all, tbox, &roles.iter().map(|r| r.0.to_string()).collect::<Vec<_>>(), cfg, 0);
        let mut b = Branch::empty(Arc::new(shared));
        let mut names: Vec<String> = Vec::new();
        for n in concepts.iter().map(|c| c.0).chain(roles.iter().flat_map(|r| [r.1, r.2])) {
            if !names.iter().any(|x| x == n) {
                names.push(n.to_string());
            }
        }
        for n in &names {
            let i = b.push_individual(Some(n.clone()), Origin::Abox);
            let top = b.table().top;
            b.add(i, top);
        }
        let idx = |n: &str| names.iter().position(|x| x == n).expect("collected above");
        for (n, c) in concepts {
            let id = b.table().id_of(c).expect("interned above");
            b.add(idx(n), id);
        }
        for (r, x, y) in roles {
            let role = b.table().role_ids[*r];
            b.inds[idx(x)].edges.push((role, idx(y)));
        }
        Ok(b)
    }

    pub fn table(&self) -> &ConceptTable {
        &self.shared.table
    }

    pub fn individual_count(&self) -> usize {
        self.inds.len()
    }

    pub fn is_closed(&self) -> bool {
        self.clash.is_some()
    }

    pub fn status(&self) -> BranchStatus {
        if self.is_closed() {
            BranchStatus::Closed
        } else if applicable_rules(self).is_empty() {
            BranchStatus::Saturated
        } else {
            BranchStatus::Open
        }
    }

    pub fn individual_name(&self, i: usize) -> Option<&str> {
        self.inds[i].name.as_deref()
    }

    pub fn origin(&self, i: usize) -> Origin {
        self.inds[i].origin
    }

    fn ind_label(&self, i: usize) -> String {
        match &self.inds[i].name {
            Some(n) => n.clone(),
            None => format!("#{i}"),
        }
    }

    /// `th(a)` in insertion order.
    pub fn theory(&self, i: usize) -> Vec<Concept> {
        self.inds[i].concepts.iter().map(|&c| self.table().to_concept(c)).collect()
    }

    pub fn has(&self, i: usize, c: &Concept) -> bool {
        self.table().id_of(c).is_some_and(|id| self.inds[i].theory.contains(id))
    }

    /// Role edges `(role, target)` leaving `i`.
    pub fn edges(&self, i: usize) -> Vec<(String, usize)> {
        self.inds[i].edges.iter().map(|&(r, t)| (self.table().roles[r].clone(), t)).collect()
    }

    /// Total number of concept assertions on the branch.
    pub fn assertion_count(&self) -> usize {
        self.inds.iter().map(|i| i.concepts.len()).sum::<usize>()
            + self.inds.iter().map(|i| i.edges.len()).sum::<usize>()
    }

    /// Rule application counts accumulated along this branch.
    pub fn applied(&self) -> &BTreeMap<RuleId, u64> {
        &self.applied
    }

    fn count(&mut self, r: RuleId) {
        *self.applied.entry(r).or_default() += 1;
    }

    fn push_individual(&mut self, name: Option<String>, origin: Origin) -> usize {
        let i = self.inds.len();
        self.inds.push(Individual {
            theory: FixedBitSet::with_capacity(self.shared.table.len()),
            concepts: Vec::new(),
            edges: Vec::new(),
            name,
            origin,
            neg_exists_version: 0,
        });
        self.class_root.push(i);
        self.members.push(vec![i]);
        i
    }

    /// Creates an individual labelled with `⊤` and every TBox form, and
    /// registers the cut and negated-global obligations it inherits.
    fn new_individual(&mut self, name: Option<String>, origin: Origin) -> Result<usize, ProverError> {
        if self.inds.len() >= self.shared.cap {
            return Err(ProverError::CapExceeded { cap: self.shared.cap });
        }
        let i = self.push_individual(name, origin);
        let shared = Arc::clone(&self.shared);
        self.add(i, shared.table.top);
        for &f in &shared.tbox_forms {
            self.count(RuleId::TBox);
            self.add(i, f);
        }
        if shared.enable_cut {
            for k in 0..self.unique_list.len() {
                let body = self.unique_list[k];
                self.cut.push((i, body));
            }
        }
        for k in 0..self.neg_globals.len() {
            let c = self.neg_globals[k];
            self.neg_global.push((i, c));
        }
        Ok(i)
    }

    fn root(&self, i: usize) -> usize {
        self.class_root[i]
    }

    /// Adds `c` to `i` and to every individual whose theory is tied to `i`.
    fn add(&mut self, i: usize, c: usize) {
        let r = self.root(i);
        for k in 0..self.members[r].len() {
            let m = self.members[r][k];
            if self.inds[m].theory.contains(c) {
                continue;
            }
            self.inds[m].theory.insert(c);
            self.inds[m].concepts.push(c);
            if let Some(comp) = self.shared.table.complement(c) {
                if self.clash.is_none() && self.inds[m].theory.contains(comp) {
                    self.clash = Some((m, c));
                }
            }
            if self.shared.table.is_body[c] {
                self.holders.entry(c).or_default().push(m);
            }
            self.pending.push_back((m, c));
        }
    }

    fn add_edge(&mut self, from: usize, role: usize, to: usize) {
        self.inds[from].edges.push((role, to));
        let table = &self.shared.table;
        let mut conclusions = Vec::new();
        for &c in &self.inds[from].concepts {
            if let Node::Not(x) = table.nodes[c] {
                if let Node::Exists(r, y) = table.nodes[x] {
                    if r == role {
                        conclusions.push(table.negation(y));
                    }
                }
            }
        }
        for c in conclusions {
            if !self.inds[to].theory.contains(c) {
                self.count(RuleId::NegExists);
                self.add(to, c);
            }
        }
    }

    /// Ties the theories of `a` and `b` together (both directions).
    fn merge(&mut self, a: usize, b: usize, rule: RuleId) {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return;
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        let moved = std::mem::take(&mut self.members[gone]);
        for &m in &moved {
            self.class_root[m] = keep;
        }
        let keep_concepts = self.inds[keep].concepts.clone();
        let gone_concepts = self.inds[gone].concepts.clone();
        self.members[keep].extend(moved);
        for c in gone_concepts.into_iter().chain(keep_concepts) {
            let missing = self.members[keep].iter().any(|&m| !self.inds[m].theory.contains(c));
            if missing {
                self.count(rule);
                self.add(keep, c);
            }
        }
    }

    fn make_unique(&mut self, body: usize, global: bool) {
        let fresh = !self.unique_local.contains(body) && !self.unique_global.contains(body);
        if global {
            self.unique_global.insert(body);
        } else {
            self.unique_local.insert(body);
        }
        if fresh {
            self.unique_list.push(body);
            if self.shared.enable_cut {
                for i in 0..self.inds.len() {
                    self.cut.push((i, body));
                }
            }
        }
        let rule = if global { RuleId::Iota2Global } else { RuleId::Iota2Local };
        let hs = self.holders.get(&body).cloned().unwrap_or_default();
        if let Some((&first, rest)) = hs.split_first() {
            for &h in rest {
                self.merge(first, h, rule);
            }
        }
    }

    /// Applies every deterministic consequence of one newly added assertion.
    fn process(&mut self, m: usize, c: usize) {
        let shared = Arc::clone(&self.shared);
        let t = &shared.table;
        match t.nodes[c] {
            Node::Not(x) => match t.nodes[x] {
                Node::Not(y) => {
                    self.count(RuleId::NegNeg);
                    self.add(m, y);
                }
                Node::And(..) => self.neg_and.push((m, c)),
                Node::Exists(role, y) => {
                    self.inds[m].neg_exists_version += 1;
                    let ny = t.negation(y);
                    let targets: Vec<usize> = self.inds[m].edges.iter().filter(|e| e.0 == role).map(|e| e.1).collect();
                    for to in targets {
                        if !self.inds[to].theory.contains(ny) {
                            self.count(RuleId::NegExists);
                            self.add(to, ny);
                        }
                    }
                }
                Node::Local(_) => self.neg_local.push((m, c)),
                Node::Global(..) => {
                    if !self.neg_globals.contains(&c) {
                        self.neg_globals.push(c);
                        for i in 0..self.inds.len() {
                            self.neg_global.push((i, c));
                        }
                    }
                }
                Node::Top | Node::Atom(_) => {}
            },
            Node::And(l, r) => {
                self.count(RuleId::And);
                self.add(m, l);
                self.add(m, r);
            }
            Node::Exists(..) => self.exists.push(ExistsEntry { ind: m, concept: c, witness: None, version: u64::MAX }),
            Node::Local(x) => {
                if !self.inds[m].theory.contains(x) {
                    self.count(RuleId::Iota1Local);
                    self.add(m, x);
                }
                self.make_unique(x, false);
            }
            Node::Global(x, _) => {
                if !self.iota1_seen.contains(c) {
                    self.iota1_seen.insert(c);
                    self.iota1.push(c);
                }
                self.make_unique(x, true);
            }
            Node::Top | Node::Atom(_) => {}
        }
        if t.is_body[c] && (self.unique_local.contains(c) || self.unique_global.contains(c)) {
            let rule = if self.unique_global.contains(c) { RuleId::Iota2Global } else { RuleId::Iota2Local };
            if let Some(&first) = self.holders.get(&c).and_then(|h| h.first()) {
                self.merge(first, m, rule);
            }
        }
    }

    /// Runs the work queue to a fixpoint or until a clash appears.
    fn saturate_deterministic(&mut self, deadline: Option<Instant>, start: Instant) -> Result<(), ProverError> {
        while let Some((m, c)) = self.pending.pop_front() {
            if self.clash.is_some() {
                self.pending.clear();
                return Ok(());
            }
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return Err(ProverError::Timeout(start.elapsed()));
                }
            }
            self.process(m, c);
        }
        Ok(())
    }

    fn holds(&self, i: usize, c: usize) -> bool {
        self.inds[i].theory.contains(c)
    }

    fn someone_has(&self, a: usize, b: usize) -> bool {
        self.inds.iter().any(|ind| ind.theory.contains(a) && ind.theory.contains(b))
    }

    fn neg_and_done(&self, m: usize, c: usize) -> bool {
        let t = self.table();
        let Node::Not(x) = t.nodes[c] else { unreachable!() };
        let Node::And(l, r) = t.nodes[x] else { unreachable!() };
        self.holds(m, t.negation(l)) || self.holds(m, t.negation(r))
    }

    fn cut_done(&self, i: usize, body: usize) -> bool {
        self.holds(i, body) || self.holds(i, self.table().negation(body))
    }

    fn neg_local_done(&self, a: usize, c: usize) -> bool {
        let t = self.table();
        let Node::Not(x) = t.nodes[c] else { unreachable!() };
        let Node::Local(y) = t.nodes[x] else { unreachable!() };
        let (pa, na) = t.local_fresh[&y];
        self.holds(a, t.negation(y))
            || (self.holds(a, y) && self.holds(a, na) && self.someone_has(y, pa))
            || (self.holds(a, y) && self.holds(a, pa) && self.someone_has(y, na))
    }

    fn neg_global_done(&self, a: usize, c: usize) -> bool {
        let t = self.table();
        let Node::Not(x) = t.nodes[c] else { unreachable!() };
        let Node::Global(y, d) = t.nodes[x] else { unreachable!() };
        let (pg, ng) = t.global_fresh[&y];
        self.holds(a, t.negation(y))
            || self.holds(a, t.negation(d))
            || (self.someone_has(y, pg) && self.someone_has(y, ng))
    }

    fn body_holders(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.inds.len()).filter(move |&i| self.holds(i, y))
    }

    fn iota1_done(&self, c: usize) -> bool {
        let Node::Global(y, d) = self.table().nodes[c] else { unreachable!() };
        self.body_holders(y).next().is_some_and(|h| self.holds(h, d))
    }

    fn exists_satisfied(&self, a: usize, c: usize) -> bool {
        let Node::Exists(role, y) = self.table().nodes[c] else { unreachable!() };
        self.inds[a].edges.iter().any(|&(r, t)| r == role && self.holds(t, y))
    }

    /// Concepts a proxy successor for `a:∃r.C` must carry.
    fn block_pattern(&self, a: usize, c: usize) -> Vec<usize> {
        let t = self.table();
        let Node::Exists(role, y) = t.nodes[c] else { unreachable!() };
        let mut req = vec![y];
        for &k in &self.inds[a].concepts {
            if let Node::Not(x) = t.nodes[k] {
                if let Node::Exists(r, z) = t.nodes[x] {
                    if r == role {
                        req.push(t.negation(z));
                    }
                }
            }
        }
        req
    }

    fn block_witness(&self, a: usize, c: usize) -> Option<usize> {
        let req = self.block_pattern(a, c);
        (0..self.inds.len()).find(|&i| req.iter().all(|&k| self.holds(i, k)))
    }

    fn least_with(&self, c: usize) -> Option<usize> {
        (0..self.inds.len()).find(|&i| self.holds(i, c))
    }

    /// Engine-side selection: prunes satisfied agenda entries and returns
    /// an instance from the highest non-empty priority class.
    fn choose(&mut self, rng: &mut Option<ChaCha8Rng>) -> Option<RuleInstance> {
        fn pick<T>(items: &[T], rng: &mut Option<ChaCha8Rng>) -> Option<usize> {
            match (items.len(), rng) {
                (0, _) => None,
                (_, None) => Some(0),
                (n, Some(r)) => Some(r.gen_range(0..n)),
            }
        }

        let mut agenda = std::mem::take(&mut self.neg_and);
        agenda.retain(|&(m, c)| !self.neg_and_done(m, c));
        self.neg_and = agenda;
        if let Some(k) = pick(&self.neg_and, rng) {
            let (m, c) = self.neg_and[k];
            return Some(RuleInstance { rule: RuleId::NegAnd, individual: m, concept: c, other: None });
        }

        let mut agenda = std::mem::take(&mut self.cut);
        agenda.retain(|&(i, y)| !self.cut_done(i, y));
        self.cut = agenda;
        if let Some(k) = pick(&self.cut, rng) {
            let (i, y) = self.cut[k];
            let rule = if self.unique_global.contains(y) { RuleId::CutGlobal } else { RuleId::CutLocal };
            return Some(RuleInstance { rule, individual: i, concept: y, other: None });
        }

        let mut agenda = std::mem::take(&mut self.neg_local);
        agenda.retain(|&(a, c)| !self.neg_local_done(a, c));
        self.neg_local = agenda;
        if let Some(k) = pick(&self.neg_local, rng) {
            let (a, c) = self.neg_local[k];
            return Some(RuleInstance { rule: RuleId::NegIotaLocal, individual: a, concept: c, other: None });
        }

        let mut agenda = std::mem::take(&mut self.neg_global);
        agenda.retain(|&(a, c)| !self.neg_global_done(a, c));
        self.neg_global = agenda;
        if let Some(k) = pick(&self.neg_global, rng) {
            let (a, c) = self.neg_global[k];
            return Some(RuleInstance { rule: RuleId::NegIotaGlobal, individual: a, concept: c, other: None });
        }

        let mut agenda = std::mem::take(&mut self.iota1);
        agenda.retain(|&c| !self.iota1_done(c));
        self.iota1 = agenda;
        if let Some(k) = pick(&self.iota1, rng) {
            let c = self.iota1[k];
            let a = self.least_with(c).expect("a description on the agenda is asserted somewhere");
            return Some(RuleInstance { rule: RuleId::Iota1Global, individual: a, concept: c, other: None });
        }

        let mut entries = std::mem::take(&mut self.exists);
        entries.retain(|e| !self.exists_satisfied(e.ind, e.concept));
        let mut open = Vec::new();
        for (k, e) in entries.iter_mut().enumerate() {
            let version = self.inds[e.ind].neg_exists_version;
            if e.witness.is_some() && e.version == version {
                continue;
            }
            let still = e.witness.filter(|&w| self.block_pattern(e.ind, e.concept).iter().all(|&x| self.holds(w, x)));
            e.witness = still.or_else(|| self.block_witness(e.ind, e.concept));
            e.version = version;
            if e.witness.is_none() {
                open.push(k);
            }
        }
        self.exists = entries;
        if let Some(k) = pick(&open, rng) {
            let e = &self.exists[open[k]];
            return Some(RuleInstance { rule: RuleId::Exists, individual: e.ind, concept: e.concept, other: None });
        }
        None
    }
}

/// Every applicable rule instance, found by scanning the branch
/// assertions directly, sorted by priority. A closed branch yields just
/// the clash. Empty on a saturated branch.
pub fn applicable_rules(b: &Branch) -> Vec<RuleInstance> {
    let t = b.table();
    let inst = |rule, individual, concept, other| RuleInstance { rule, individual, concept, other };
    for (i, ind) in b.inds.iter().enumerate() {
        for &c in &ind.concepts {
            if let Some(comp) = t.complement(c) {
                if ind.theory.contains(comp) {
                    return vec![inst(RuleId::Clash, i, c, None)];
                }
            }
        }
    }

    let mut local_bodies = BTreeSet::new();
    let mut global_bodies = BTreeSet::new();
    for ind in &b.inds {
        for &c in &ind.concepts {
            match t.nodes[c] {
                Node::Local(x) => {
                    local_bodies.insert(x);
                }
                Node::Global(x, _) => {
                    global_bodies.insert(x);
                }
                _ => {}
            }
        }
    }

    let mut out = Vec::new();
    let mut iota1_seen = BTreeSet::new();
    for (i, ind) in b.inds.iter().enumerate() {
        for &f in &b.shared.tbox_forms {
            if !ind.theory.contains(f) {
                out.push(inst(RuleId::TBox, i, f, None));
            }
        }
        for &c in &ind.concepts {
            match t.nodes[c] {
                Node::And(l, r) => {
                    if !b.holds(i, l) || !b.holds(i, r) {
                        out.push(inst(RuleId::And, i, c, None));
                    }
                }
                Node::Local(x) => {
                    if !b.holds(i, x) {
                        out.push(inst(RuleId::Iota1Local, i, c, None));
                    }
                }
                Node::Global(..) => {
                    if iota1_seen.insert(c) && !b.iota1_done(c) {
                        out.push(inst(RuleId::Iota1Global, i, c, None));
                    }
                }
                Node::Exists(..) => {
                    if !b.exists_satisfied(i, c) && b.block_witness(i, c).is_none() {
                        out.push(inst(RuleId::Exists, i, c, None));
                    }
                }
                Node::Not(x) => match t.nodes[x] {
                    Node::Not(y) => {
                        if !b.holds(i, y) {
                            out.push(inst(RuleId::NegNeg, i, c, None));
                        }
                    }
                    Node::And(..) => {
                        if !b.neg_and_done(i, c) {
                            out.push(inst(RuleId::NegAnd, i, c, None));
                        }
                    }
                    Node::Exists(role, y) => {
                        let ny = t.negation(y);
                        for &(r, to) in &ind.edges {
                            if r == role && !b.holds(to, ny) {
                                out.push(inst(RuleId::NegExists, i, c, Some(to)));
                            }
                        }
                    }
                    Node::Local(_) => {
                        if !b.neg_local_done(i, c) {
                            out.push(inst(RuleId::NegIotaLocal, i, c, None));
                        }
                    }
                    Node::Global(..) => {
                        for a in 0..b.inds.len() {
                            if !b.neg_global_done(a, c) {
                                out.push(inst(RuleId::NegIotaGlobal, a, c, None));
                            }
                        }
                    }
                    Node::Top | Node::Atom(_) => {}
                },
                Node::Top | Node::Atom(_) => {}
            }
        }
    }

    for &y in local_bodies.union(&global_bodies) {
        let rule2 = if global_bodies.contains(&y) { RuleId::Iota2Global } else { RuleId::Iota2Local };
        let holders: Vec<usize> = b.body_holders(y).collect();
        for &h1 in &holders {
            for &h2 in &holders {
                if h1 == h2 {
                    continue;
                }
                if let Some(&e) = b.inds[h1].concepts.iter().find(|&&e| !b.holds(h2, e)) {
                    out.push(inst(rule2, h2, e, Some(h1)));
                }
            }
        }
        if b.shared.enable_cut {
            let cut = if global_bodies.contains(&y) { RuleId::CutGlobal } else { RuleId::CutLocal };
            for i in 0..b.inds.len() {
                if !b.cut_done(i, y) {
                    out.push(inst(cut, i, y, None));
                }
            }
        }
    }

    let mut seen = std::collections::HashSet::new();
    out.retain(|x| seen.insert(*x));
    out.sort_by_key(|x| x.rule.priority());
    out
}

/// Applies `inst` to a copy of `b`, one copy per conclusion, in the
/// left-to-right order of the rule schema.
pub fn expand(b: &Branch, inst: &RuleInstance) -> Result<Vec<Branch>, ProverError> {
    if b.is_closed() {
        return Err(ProverError::Closed);
    }
    let shared = Arc::clone(&b.shared);
    let t = &shared.table;
    let (i, c) = (inst.individual, inst.concept);
    let single = |f: &dyn Fn(&mut Branch) -> Result<(), ProverError>| -> Result<Vec<Branch>, ProverError> {
        let mut nb = b.clone();
        nb.count(inst.rule);
        f(&mut nb)?;
        Ok(vec![nb])
    };
    match inst.rule {
        RuleId::Clash | RuleId::AboxInstance | RuleId::AboxRole => Ok(vec![]),
        RuleId::NegNeg => {
            let Node::Not(x) = t.nodes[c] else { unreachable!() };
            let Node::Not(y) = t.nodes[x] else { unreachable!() };
            single(&|nb| {
                nb.add(i, y);
                Ok(())
            })
        }
        RuleId::And => {
            let Node::And(l, r) = t.nodes[c] else { unreachable!() };
            single(&|nb| {
                nb.add(i, l);
                nb.add(i, r);
                Ok(())
            })
        }
        RuleId::TBox => single(&|nb| {
            nb.add(i, c);
            Ok(())
        }),
        RuleId::Iota1Local => {
            let Node::Local(x) = t.nodes[c] else { unreachable!() };
            single(&|nb| {
                nb.add(i, x);
                Ok(())
            })
        }
        RuleId::Iota2Local | RuleId::Iota2Global => single(&|nb| {
            nb.add(i, c);
            Ok(())
        }),
        RuleId::NegExists => {
            let Node::Not(x) = t.nodes[c] else { unreachable!() };
            let Node::Exists(_, y) = t.nodes[x] else { unreachable!() };
            let to = inst.other.expect("neg_exists names the successor");
            single(&|nb| {
                nb.add(to, t.negation(y));
                Ok(())
            })
        }
        RuleId::NegAnd => {
            let Node::Not(x) = t.nodes[c] else { unreachable!() };
            let Node::And(l, r) = t.nodes[x] else { unreachable!() };
            let mut out = Vec::new();
            for k in [l, r] {
                let mut nb = b.clone();
                nb.count(inst.rule);
                nb.add(i, t.negation(k));
                out.push(nb);
            }
            Ok(out)
        }
        RuleId::CutLocal | RuleId::CutGlobal => {
            let mut out = Vec::new();
            for k in [c, t.negation(c)] {
                let mut nb = b.clone();
                nb.count(inst.rule);
                nb.add(i, k);
                out.push(nb);
            }
            Ok(out)
        }
        RuleId::NegIotaLocal => {
            let Node::Not(x) = t.nodes[c] else { unreachable!() };
            let Node::Local(y) = t.nodes[x] else { unreachable!() };
            let (pa, na) = t.local_fresh[&y];
            let mut first = b.clone();
            first.count(inst.rule);
            first.add(i, t.negation(y));
            let mut out = vec![first];
            for (mine, theirs) in [(na, pa), (pa, na)] {
                let mut nb = b.clone();
                nb.count(inst.rule);
                nb.add(i, y);
                nb.add(i, mine);
                if !nb.someone_has(y, theirs) {
                    let w = nb.new_individual(None, Origin::NegIotaLocal)?;
                    nb.add(w, y);
                    nb.add(w, theirs);
                }
                out.push(nb);
            }
            Ok(out)
        }
        RuleId::NegIotaGlobal => {
            let Node::Not(x) = t.nodes[c] else { unreachable!() };
            let Node::Global(y, d) = t.nodes[x] else { unreachable!() };
            let (pg, ng) = t.global_fresh[&y];
            let mut out = Vec::new();
            for k in [t.negation(y), t.negation(d)] {
                let mut nb = b.clone();
                nb.count(inst.rule);
                nb.add(i, k);
                out.push(nb);
            }
            let mut nb = b.clone();
            nb.count(inst.rule);
            let w1 = nb.new_individual(None, Origin::NegIotaGlobal)?;
            nb.add(w1, y);
            nb.add(w1, pg);
            let w2 = nb.new_individual(None, Origin::NegIotaGlobal)?;
            nb.add(w2, y);
            nb.add(w2, ng);
            out.push(nb);
            Ok(out)
        }
        RuleId::Iota1Global => {
            let Node::Global(y, d) = t.nodes[c] else { unreachable!() };
            single(&|nb| {
                match nb.least_with(y) {
                    Some(h) => nb.add(h, d),
                    None => {
                        let w = nb.new_individual(None, Origin::Iota1Global)?;
                        nb.add(w, y);
                        nb.add(w, d);
                    }
                }
                Ok(())
            })
        }
        RuleId::Exists => {
            let Node::Exists(role, y) = t.nodes[c] else { unreachable!() };
            single(&|nb| {
                let w = nb.new_individual(None, Origin::Exists)?;
                nb.add(w, y);
                nb.add_edge(i, role, w);
                Ok(())
            })
        }
    }
}

/// Representative of each individual: the least individual sharing a
/// description body with it, or itself.
fn representatives(b: &Branch) -> Vec<usize> {
    let t = b.table();
    let n = b.inds.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut bodies = BTreeSet::new();
    for ind in &b.inds {
        for &c in &ind.concepts {
            match t.nodes[c] {
                Node::Local(x) | Node::Global(x, _) => {
                    bodies.insert(x);
                }
                _ => {}
            }
        }
    }
    for y in bodies {
        let hs: Vec<usize> = b.body_holders(y).collect();
        for w in hs.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// The interpretation read off a saturated open branch, plus the element
/// that represents each branch individual.
pub fn extract_model(b: &Branch) -> Result<(Interpretation, Vec<usize>), ProverError> {
    if b.is_closed() {
        return Err(ProverError::Closed);
    }
    if !applicable_rules(b).is_empty() {
        return Err(ProverError::NotSaturated);
    }
    Ok(build_model(b))
}

fn build_model(b: &Branch) -> (Interpretation, Vec<usize>) {
    let t = b.table();
    let rep = representatives(b);
    let reps: Vec<usize> = (0..b.inds.len()).filter(|&i| rep[i] == i).collect();
    let element: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let mut model =
        Interpretation::new(reps.iter().map(|r| format!("d{r}"))).expect("a branch always has its root individual");
    for (a, fresh) in t.atoms.iter().zip(&t.atom_fresh) {
        if !fresh {
            model.declare_concept(a);
        }
    }
    for r in &t.roles {
        model.declare_role(r);
    }
    let of = |i: usize| element[&rep[i]];
    for (i, ind) in b.inds.iter().enumerate() {
        for &c in &ind.concepts {
            if let Node::Atom(a) = t.nodes[c] {
                if !t.atom_fresh[a] {
                    model.add_concept_member(&t.atoms[a], of(i)).expect("element exists");
                }
            }
        }
        for &(r, to) in &ind.edges {
            model.add_role_edge(&t.roles[r], of(i), of(to)).expect("element exists");
        }
        for &c in &ind.concepts {
            if let Node::Exists(r, _) = t.nodes[c] {
                if b.exists_satisfied(i, c) {
                    continue;
                }
                let req = b.block_pattern(i, c);
                for p in 0..b.inds.len() {
                    if req.iter().all(|&k| b.holds(p, k)) {
                        model.add_role_edge(&t.roles[r], of(i), of(p)).expect("element exists");
                    }
                }
            }
        }
        if let Some(name) = &ind.name {
            model.set_individual(name, of(i)).expect("element exists");
        }
    }
    let map = (0..b.inds.len()).map(of).collect();
    (model, map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
        })
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ProofStats {
    pub rule_applications: BTreeMap<RuleId, u64>,
    pub branches: u64,
    pub closed_branches: u64,
    pub max_individuals: usize,
    pub wall_time: Duration,
    pub individual_cap: usize,
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    pub verdict: Verdict,
    /// Present iff the verdict is sat.
    pub model: Option<Interpretation>,
    /// Model element interpreting the root individual that carries the input concept.
    pub root_element: Option<usize>,
    pub stats: ProofStats,
}

/// `2^(4n) + k`, saturating.
pub fn individual_bound(symbols: usize, abox_individuals: usize) -> usize {
    let exp = symbols.saturating_mul(4);
    if exp >= usize::BITS as usize {
        usize::MAX
    } else {
        (1usize << exp).saturating_add(abox_individuals)
    }
}

fn build_shared(
    concepts: &[Concept],
    tbox: &[crate::syntax::Inclusion],
    roles: &[String],
    cfg: &ProverConfig,
    abox_inds: usize,
) -> Shared {
    let mut table = ConceptTable::new();
    let mut symbols = 0;
    for c in concepts {
        symbols += c.size();
        table.intern(c);
    }
    let mut forms = Vec::new();
    for ax in tbox {
        symbols += ax.lhs.size() + ax.rhs.size();
        let form = Concept::not(Concept::and(ax.lhs.desugar(), Concept::not(ax.rhs.desugar())));
        forms.push(table.intern(&form));
    }
    for r in roles {
        table.role_id(r);
    }
    table.close();
    let mut seen = BTreeSet::new();
    forms.retain(|f| seen.insert(*f));
    Shared {
        table,
        tbox_forms: forms,
        enable_cut: cfg.enable_cut,
        cap: cfg.individual_cap.unwrap_or_else(|| individual_bound(symbols, abox_inds)).max(1),
    }
}

fn check_logic(logic: Logic, concepts: &[&Concept]) -> Result<(), ProverError> {
    for c in concepts {
        if !logic.allows_local() && c.has_local_dd() {
            return Err(ProverError::Unsupported { logic, construct: "a local description" });
        }
        if !logic.allows_global() && c.has_global_dd() {
            return Err(ProverError::Unsupported { logic, construct: "a global description" });
        }
    }
    Ok(())
}

/// A prepared proof problem.
pub struct Prover {
    shared: Arc<Shared>,
    cfg: ProverConfig,
    root_concept: usize,
    abox: Vec<Assertion>,
    abox_names: Vec<String>,
}

impl Prover {
    pub fn new(c: &Concept, o: Option<&Ontology>, cfg: &ProverConfig) -> Result<Self, ProverError> {
        let empty = Ontology::default();
        let o = o.unwrap_or(&empty);
        let mut all: Vec<&Concept> = vec![c];
        all.extend(o.concepts());
        check_logic(cfg.logic, &all)?;
        let mut inputs: Vec<Concept> = vec![c.clone(), Concept::Top];
        for ax in &o.abox {
            if let Assertion::Instance { concept, .. } = ax {
                inputs.push(concept.clone());
            }
        }
        let abox_names = o.individuals();
        let roles: Vec<String> = o.roles().into_iter().collect();
        let shared = build_shared(&inputs, &o.tbox, &roles, cfg, abox_names.len());
        let root_concept = shared.table.id_of(c).expect("interned");
        Ok(Prover { shared: Arc::new(shared), cfg: cfg.clone(), root_concept, abox: o.abox.clone(), abox_names })
    }

    pub fn table(&self) -> &ConceptTable {
        &self.shared.table
    }

    pub fn individual_cap(&self) -> usize {
        self.shared.cap
    }

    /// The root branch: a fresh individual labelled with the input concept,
    /// plus the ABox. Deterministic rules have not run yet.
    pub fn initial_branch(&self) -> Result<Branch, ProverError> {
        let mut b = Branch::empty(Arc::clone(&self.shared));
        let root = b.new_individual(None, Origin::Root)?;
        let mut index = HashMap::new();
        for n in &self.abox_names {
            let i = b.new_individual(Some(n.clone()), Origin::Abox)?;
            index.insert(n.clone(), i);
        }
        for ax in &self.abox {
            match ax {
                Assertion::Instance { individual, concept } => {
                    let id = self.shared.table.id_of(concept).expect("interned");
                    b.count(RuleId::AboxInstance);
                    b.add(index[individual], id);
                }
                Assertion::Role { role, from, to } => {
                    let r = self.shared.table.role_ids[role];
                    b.count(RuleId::AboxRole);
                    b.add_edge(index[from], r, index[to]);
                }
            }
        }
        b.add(root, self.root_concept);
        Ok(b)
    }

    pub fn run(&self) -> Result<ProofResult, ProverError> {
        let start = Instant::now();
        let deadline = self.cfg.timeout.map(|t| start + t);
        let mut rng = self.cfg.tie_break_seed.map(ChaCha8Rng::seed_from_u64);
        let mut stats = ProofStats { individual_cap: self.shared.cap, ..ProofStats::default() };
        let mut stack = vec![self.initial_branch()?];
        let merge_counts = |stats: &mut ProofStats, b: &Branch| {
            for (r, n) in &b.applied {
                *stats.rule_applications.entry(*r).or_default() += n;
            }
        };
        while let Some(mut b) = stack.pop() {
            stats.branches += 1;
            b.applied.clear();
            loop {
                b.saturate_deterministic(deadline, start)?;
                stats.max_individuals = stats.max_individuals.max(b.inds.len());
                if b.is_closed() {
                    b.count(RuleId::Clash);
                    stats.closed_branches += 1;
                    merge_counts(&mut stats, &b);
                    break;
                }
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(ProverError::Timeout(start.elapsed()));
                    }
                }
                match b.choose(&mut rng) {
                    None => {
                        merge_counts(&mut stats, &b);
                        let (model, map) = build_model(&b);
                        stats.wall_time = start.elapsed();
                        return Ok(ProofResult {
                            verdict: Verdict::Sat,
                            model: Some(model),
                            root_element: Some(map[0]),
                            stats,
                        });
                    }
                    Some(inst) => {
                        let mut children = expand(&b, &inst)?;
                        for child in &children {
                            stats.max_individuals = stats.max_individuals.max(child.inds.len());
                        }
                        if children.len() == 1 {
                            let counts = std::mem::take(&mut b.applied);
                            b = children.pop().expect("one child");
                            b.applied = counts;
                            b.count(inst.rule);
                        } else {
                            b.count(inst.rule);
                            merge_counts(&mut stats, &b);
                            for mut child in children.into_iter().rev() {
                                child.applied.clear();
                                stack.push(child);
                            }
                            break;
                        }
                    }
                }
            }
        }
        stats.wall_time = start.elapsed();
        Ok(ProofResult { verdict: Verdict::Unsat, model: None, root_element: None, stats })
    }

    /// Drives one branch through deterministic saturation and returns the
    /// instance the engine would pick next, without expanding it.
    pub fn next_choice(&self, b: &mut Branch) -> Result<Option<RuleInstance>, ProverError> {
        b.saturate_deterministic(None, Instant::now())?;
        if b.is_closed() {
            return Ok(None);
        }
        let mut rng = self.cfg.tie_break_seed.map(ChaCha8Rng::seed_from_u64);
        Ok(b.choose(&mut rng))
    }
}

/// Decides satisfiability of `c` (with respect to `o`, if given).
pub fn prove(c: &Concept, o: Option<&Ontology>, cfg: &ProverConfig) -> Result<ProofResult, ProverError> {
    Prover::new(c, o, cfg)?.run()
}

/// Checks a sat result against its own model: the root element satisfies
/// `c` and the model satisfies every axiom of `o`.
pub fn verify_model(c: &Concept, o: Option<&Ontology>, result: &ProofResult) -> bool {
    let (Some(model), Some(root)) = (&result.model, result.root_element) else {
        return false;
    };
    if !model.eval(c).contains(root) {
        return false;
    }
    match o {
        Some(o) => crate::semantics::models_ontology(model, o).unwrap_or(false),
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_concept;

    fn p(s: &str) -> Concept {
        parse_concept(s).unwrap()
    }

    fn verdict(s: &str) -> Verdict {
        let c = p(s);
        let r = prove(&c, None, &ProverConfig::default()).unwrap();
        if r.verdict == Verdict::Sat {
            assert!(verify_model(&c, None, &r), "model check failed for {s}");
        }
        r.verdict
    }

    #[test]
    fn propositional() {
        assert_eq!(verdict("(and A (not A))"), Verdict::Unsat);
        assert_eq!(verdict("(or A (not A))"), Verdict::Sat);
        assert_eq!(verdict("bot"), Verdict::Unsat);
        assert_eq!(verdict("(and (or A B) (and (not A) (not B)))"), Verdict::Unsat);
    }

    #[test]
    fn roles() {
        assert_eq!(verdict("(and (some r A) (all r (not A)))"), Verdict::Unsat);
        assert_eq!(verdict("(some r (some r A))"), Verdict::Sat);
        assert_eq!(verdict("(and (some r A) (some r (not A)))"), Verdict::Sat);
    }

    #[test]
    fn descriptions() {
        assert_eq!(verdict("(the A)"), Verdict::Sat);
        assert_eq!(verdict("(and (the A) (not A))"), Verdict::Unsat);
        assert_eq!(verdict("(and (that A B) (that A (not B)))"), Verdict::Unsat);
        assert_eq!(verdict("(and (that A top) (and (not A) (some r A)))"), Verdict::Sat);
        assert_eq!(verdict("(and (that A top) (and A (some r (and A (not B)))))"), Verdict::Sat);
        assert_eq!(verdict("(and (that A B) (and A (some r (and A (not B)))))"), Verdict::Unsat);
        assert_eq!(verdict("(and A (not (the A)))"), Verdict::Sat);
        assert_eq!(verdict("(and (the A) (not (the A)))"), Verdict::Unsat);
        assert_eq!(verdict("(and (not (that A top)) (that A top))"), Verdict::Unsat);
        assert_eq!(verdict("(not (that A top))"), Verdict::Sat);
    }

    #[test]
    fn cut_matters() {
        let c = p("(and (that (not (and C D)) top) (and (that C (not D)) (that D (not C))))");
        assert_eq!(prove(&c, None, &ProverConfig::default()).unwrap().verdict, Verdict::Unsat);
        let no_cut = ProverConfig { enable_cut: false, ..ProverConfig::default() };
        assert_eq!(prove(&c, None, &no_cut).unwrap().verdict, Verdict::Sat);
    }

    #[test]
    fn shared_fresh_atom_case() {
        // Two C-instances that both lack uniqueness must not clash on the
        // fresh atom chosen for C.
        assert_eq!(
            verdict("(and C (and (not (the C)) (and (that (and C A) top) (that (and C (not A)) (not (the C))))))"),
            Verdict::Sat
        );
    }

    #[test]
    fn ontology_reasoning() {
        let o = crate::syntax::parse_ontology("sub (A) (B)\ninst a (A)\nrel r a b\ninst b ((not B))").unwrap();
        let r = prove(&Concept::Top, Some(&o), &ProverConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        assert!(verify_model(&Concept::Top, Some(&o), &r));
        let o2 = crate::syntax::parse_ontology("sub (A) (B)\ninst a ((and A (not B)))").unwrap();
        assert_eq!(prove(&Concept::Top, Some(&o2), &ProverConfig::default()).unwrap().verdict, Verdict::Unsat);
        let o3 = crate::syntax::parse_ontology("sub (top) ((some r top))").unwrap();
        let r = prove(&p("A"), Some(&o3), &ProverConfig::default()).unwrap();
        assert!(verify_model(&p("A"), Some(&o3), &r));
    }

    #[test]
    fn logic_restriction() {
        let cfg = ProverConfig::with_logic(Logic::Alcil);
        assert!(matches!(prove(&p("(that A top)"), None, &cfg), Err(ProverError::Unsupported { .. })));
        let cfg = ProverConfig::with_logic(Logic::Alcig);
        assert!(matches!(prove(&p("(the A)"), None, &cfg), Err(ProverError::Unsupported { .. })));
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = ProverConfig { individual_cap: Some(2), ..ProverConfig::default() };
        let r = prove(&p("(some r (some r (some r A)))"), None, &cfg);
        assert_eq!(r.unwrap_err(), ProverError::CapExceeded { cap: 2 });
        assert_eq!(individual_bound(1, 0), 16);
        assert_eq!(individual_bound(100, 3), usize::MAX);
    }

    #[test]
    fn timeout_reported() {
        let cfg = ProverConfig { timeout: Some(Duration::ZERO), ..ProverConfig::default() };
        assert!(matches!(prove(&p("(some r A)"), None, &cfg), Err(ProverError::Timeout(_))));
    }

    #[test]
    fn scan_on_hand_built_branches() {
        let cfg = ProverConfig::default();
        let b = Branch::from_assertions(&[("a", p("(and C D)"))], &[], &[], &cfg).unwrap();
        let rules = applicable_rules(&b);
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].rule, RuleId::And);
        let b = Branch::from_assertions(&[("a", p("A")), ("a", p("(not A)")), ("a", p("(and E F)"))], &[], &[], &cfg)
            .unwrap();
        let rules = applicable_rules(&b);
        assert_eq!(rules.iter().map(|r| r.rule).collect::<Vec<_>>(), vec![RuleId::Clash]);
        let b = Branch::from_assertions(&[("a", p("(some r C)")), ("b", p("C"))], &[], &[], &cfg).unwrap();
        assert!(applicable_rules(&b).is_empty());
        assert_eq!(b.status(), BranchStatus::Saturated);
    }

    #[test]
    fn expand_schemas() {
        let cfg = ProverConfig::default();
        let b = Branch::from_assertions(&[("a", p("(not (not C))"))], &[], &[], &cfg).unwrap();
        let inst = applicable_rules(&b)[0];
        assert_eq!(inst.rule, RuleId::NegNeg);
        let out = expand(&b, &inst).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].has(0, &p("C")));

        let b = Branch::from_assertions(&[("a", p("(not (and C D))"))], &[], &[], &cfg).unwrap();
        let inst = applicable_rules(&b)[0];
        let out = expand(&b, &inst).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].has(0, &p("(not C)")));
        assert!(out[1].has(0, &p("(not D)")));

        let b = Branch::from_assertions(&[("a", p("(that C D)")), ("b", p("C"))], &[], &[], &cfg).unwrap();
        let inst = applicable_rules(&b).into_iter().find(|r| r.rule == RuleId::Iota1Global).unwrap();
        let out = expand(&b, &inst).unwrap();
        assert_eq!(out[0].individual_count(), 2);
        assert!(out[0].has(1, &p("D")));
    }

    #[test]
    fn extracted_models() {
        let cfg = ProverConfig::default();
        let b = Branch::from_assertions(&[("a", p("A"))], &[], &[], &cfg).unwrap();
        let (m, _) = extract_model(&b).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.concept_extension("A").len(), 1);

        let c = p("(some r (some r A))");
        let r = prove(&c, None, &cfg).unwrap();
        assert!(verify_model(&c, None, &r));

        let b = Branch::from_assertions(&[("a", p("(the C)")), ("a", p("C")), ("b", p("C"))], &[], &[], &cfg).unwrap();
        assert!(matches!(extract_model(&b), Err(ProverError::NotSaturated)));
    }
}
