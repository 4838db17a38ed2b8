//! Oracles and generators shared by the integration tests. Nothing here
//! calls the prover; the checks are written against the semantics only.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use alciota::semantics::Interpretation;
use alciota::Concept;
use rand::seq::SliceRandom;
use rand::Rng;
use varisat::{ExtendFormula, Lit, Solver};

/// Which constructors a random concept may use.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub local: bool,
    pub global: bool,
    pub sugar: bool,
}

pub const ALCI: Shape = Shape { local: true, global: true, sugar: true };
pub const ALCIL: Shape = Shape { local: true, global: false, sugar: true };
pub const ALCIG: Shape = Shape { local: false, global: true, sugar: true };
pub const ALC: Shape = Shape { local: false, global: false, sugar: true };

pub fn random_concept<R: Rng>(rng: &mut R, depth: usize, atoms: &[&str], roles: &[&str], shape: Shape) -> Concept {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 if shape.sugar => Concept::Bot,
            _ => Concept::atom(*atoms.choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    let sub = |rng: &mut R| random_concept(rng, d, atoms, roles, shape);
    loop {
        let c = match rng.gen_range(0..8) {
            0 => Concept::not(sub(rng)),
            1 => Concept::and(sub(rng), sub(rng)),
            2 if shape.sugar => Concept::or(sub(rng), sub(rng)),
            3 => Concept::exists(*roles.choose(rng).unwrap(), sub(rng)),
            4 if shape.sugar => Concept::forall(*roles.choose(rng).unwrap(), sub(rng)),
            5 | 6 if shape.local => Concept::local(sub(rng)),
            7 if shape.global => Concept::global(sub(rng), sub(rng)),
            _ => continue,
        };
        return c;
    }
}

pub fn random_interpretation<R: Rng>(
    rng: &mut R,
    n: usize,
    atoms: &[&str],
    roles: &[&str],
    density: f64,
) -> Interpretation {
    let mut i = Interpretation::with_size(n).unwrap();
    for a in atoms {
        i.declare_concept(a);
        for d in 0..n {
            if rng.gen_bool(0.5) {
                i.add_concept_member(a, d).unwrap();
            }
        }
    }
    for r in roles {
        i.declare_role(r);
        for d in 0..n {
            for e in 0..n {
                if rng.gen_bool(density) {
                    i.add_role_edge(r, d, e).unwrap();
                }
            }
        }
    }
    i
}

/// Copy of `i` with elements renamed by a random permutation.
pub fn permuted<R: Rng>(rng: &mut R, i: &Interpretation) -> (Interpretation, Vec<usize>) {
    let n = i.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut j = Interpretation::new((0..n).map(|k| format!("p{k}"))).unwrap();
    for a in i.concept_names().map(str::to_string).collect::<Vec<_>>() {
        j.declare_concept(&a);
        for d in i.concept_extension(&a) {
            j.add_concept_member(&a, perm[d]).unwrap();
        }
    }
    for r in i.role_names().map(str::to_string).collect::<Vec<_>>() {
        j.declare_role(&r);
        for (d, e) in i.role_edges(&r) {
            j.add_role_edge(&r, perm[d], perm[e]).unwrap();
        }
    }
    (j, perm)
}

/// Direct recursive evaluation of a concept at one element.
pub fn holds(i: &Interpretation, c: &Concept, d: usize) -> bool {
    let n = i.len();
    let unique = |x: &Concept| -> Option<usize> {
        let ext: Vec<usize> = (0..n).filter(|&e| holds(i, x, e)).collect();
        (ext.len() == 1).then(|| ext[0])
    };
    match c {
        Concept::Atom(a) => i.in_concept(a, d),
        Concept::Top => true,
        Concept::Bot => false,
        Concept::Not(x) => !holds(i, x, d),
        Concept::And(l, r) => holds(i, l, d) && holds(i, r, d),
        Concept::Or(l, r) => holds(i, l, d) || holds(i, r, d),
        Concept::Exists(r, x) => i.role_edges(r).iter().any(|&(a, b)| a == d && holds(i, x, b)),
        Concept::Forall(r, x) => i.role_edges(r).iter().all(|&(a, b)| a != d || holds(i, x, b)),
        Concept::LocalDD(x) => unique(x) == Some(d),
        Concept::GlobalDD(x, y) => unique(x).is_some_and(|e| holds(i, y, e)),
    }
}

/// Greatest fixpoint of the Atom, Forth and Back conditions, computed by
/// deleting violating pairs until nothing changes.
pub fn naive_bisim(i: &Interpretation, j: &Interpretation) -> BTreeSet<(usize, usize)> {
    let atoms: BTreeSet<String> = i.concept_names().chain(j.concept_names()).map(str::to_string).collect();
    let roles: BTreeSet<String> = i.role_names().chain(j.role_names()).map(str::to_string).collect();
    let mut z: BTreeSet<(usize, usize)> = BTreeSet::new();
    for d in 0..i.len() {
        for e in 0..j.len() {
            if atoms.iter().all(|a| i.in_concept(a, d) == j.in_concept(a, e)) {
                z.insert((d, e));
            }
        }
    }
    let succ_i: Vec<Vec<Vec<usize>>> = roles.iter().map(|r| i.successors(r)).collect();
    let succ_j: Vec<Vec<Vec<usize>>> = roles.iter().map(|r| j.successors(r)).collect();
    loop {
        let bad: Vec<(usize, usize)> = z
            .iter()
            .copied()
            .filter(|&(d, e)| {
                (0..roles.len()).any(|k| {
                    let forth = succ_i[k][d].iter().all(|&d2| succ_j[k][e].iter().any(|&e2| z.contains(&(d2, e2))));
                    let back = succ_j[k][e].iter().all(|&e2| succ_i[k][d].iter().any(|&d2| z.contains(&(d2, e2))));
                    !forth || !back
                })
            })
            .collect();
        if bad.is_empty() {
            return z;
        }
        for p in bad {
            z.remove(&p);
        }
    }
}

pub fn naive_names(i: &Interpretation) -> BTreeSet<usize> {
    let z = naive_bisim(i, i);
    (0..i.len()).filter(|&d| (0..i.len()).all(|e| e == d || !z.contains(&(d, e)))).collect()
}

/// The filtering step written out from its description: returns z, or
/// the empty relation, depending on how z treats named elements.
pub fn naive_filter(
    i: &Interpretation,
    j: &Interpretation,
    z: &BTreeSet<(usize, usize)>,
    restrict: bool,
) -> BTreeSet<(usize, usize)> {
    let dom: BTreeSet<usize> = z.iter().map(|p| p.0).collect();
    let rng: BTreeSet<usize> = z.iter().map(|p| p.1).collect();
    let mut ni = naive_names(i);
    let mut nj = naive_names(j);
    if restrict {
        ni.retain(|d| dom.contains(d));
        nj.retain(|e| rng.contains(e));
    }
    if ni.is_empty() && nj.is_empty() {
        return z.clone();
    }
    if ni.is_empty() || nj.is_empty() {
        return BTreeSet::new();
    }
    let total = |l: &BTreeSet<usize>, r: &BTreeSet<usize>| {
        l.iter().all(|d| r.iter().any(|e| z.contains(&(*d, *e))))
            && r.iter().all(|e| l.iter().any(|d| z.contains(&(*d, *e))))
    };
    let all_i: BTreeSet<usize> = (0..i.len()).collect();
    let all_j: BTreeSet<usize> = (0..j.len()).collect();
    if total(&all_i, &all_j) && total(&ni, &nj) {
        z.clone()
    } else {
        BTreeSet::new()
    }
}

/// Searches for a model with at most `max` elements whose element 0
/// satisfies `c`, by encoding the question as propositional satisfiability.
pub fn small_model(c: &Concept, max: usize) -> Option<Interpretation> {
    let mut enc = Encoder::new(max);
    let root = enc.encode(c);
    enc.solver.add_clause(&[root[0]]);
    if !enc.solver.solve().unwrap() {
        return None;
    }
    let model: BTreeSet<Lit> = enc.solver.model().unwrap().into_iter().collect();
    let on = |l: Lit| model.contains(&l);
    let size = (0..max).filter(|&x| on(enc.active[x])).count();
    let mut i = Interpretation::with_size(size).unwrap();
    for (a, lits) in &enc.atoms {
        i.declare_concept(a);
        for (x, &lit) in lits.iter().enumerate().take(size) {
            if on(lit) {
                i.add_concept_member(a, x).unwrap();
            }
        }
    }
    for (r, lits) in &enc.roles {
        i.declare_role(r);
        for x in 0..size {
            for y in 0..size {
                if on(lits[x * max + y]) {
                    i.add_role_edge(r, x, y).unwrap();
                }
            }
        }
    }
    Some(i)
}

struct Encoder {
    n: usize,
    solver: Solver<'static>,
    active: Vec<Lit>,
    atoms: BTreeMap<String, Vec<Lit>>,
    roles: BTreeMap<String, Vec<Lit>>,
    memo: HashMap<Concept, Vec<Lit>>,
    truth: Lit,
}

impl Encoder {
    fn new(n: usize) -> Self {
        let mut solver = Solver::new();
        let truth = solver.new_lit();
        solver.add_clause(&[truth]);
        let active: Vec<Lit> = (0..n).map(|_| solver.new_lit()).collect();
        solver.add_clause(&[active[0]]);
        for x in 1..n {
            solver.add_clause(&[!active[x], active[x - 1]]);
        }
        Encoder { n, solver, active, atoms: BTreeMap::new(), roles: BTreeMap::new(), memo: HashMap::new(), truth }
    }

    /// `v ↔ ⋀ lits`
    fn and(&mut self, lits: &[Lit]) -> Lit {
        let v = self.solver.new_lit();
        for &l in lits {
            self.solver.add_clause(&[!v, l]);
        }
        let mut big: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        big.push(v);
        self.solver.add_clause(&big);
        v
    }

    fn or(&mut self, lits: &[Lit]) -> Lit {
        let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and(&neg)
    }

    fn role(&mut self, r: &str) -> Vec<Lit> {
        if !self.roles.contains_key(r) {
            let lits = (0..self.n * self.n).map(|_| self.solver.new_lit()).collect();
            self.roles.insert(r.to_string(), lits);
        }
        self.roles[r].clone()
    }

    /// Membership literals of `c`, one per element. Only active elements
    /// count as witnesses or competitors.
    fn encode(&mut self, c: &Concept) -> Vec<Lit> {
        if let Some(v) = self.memo.get(c) {
            return v.clone();
        }
        let n = self.n;
        let out: Vec<Lit> = match c {
            Concept::Atom(a) => {
                if !self.atoms.contains_key(a) {
                    let lits = (0..n).map(|_| self.solver.new_lit()).collect();
                    self.atoms.insert(a.clone(), lits);
                }
                self.atoms[a].clone()
            }
            Concept::Top => vec![self.truth; n],
            Concept::Bot => vec![!self.truth; n],
            Concept::Not(x) => self.encode(x).into_iter().map(|l| !l).collect(),
            Concept::And(l, r) => {
                let (a, b) = (self.encode(l), self.encode(r));
                (0..n).map(|x| self.and(&[a[x], b[x]])).collect()
            }
            Concept::Or(l, r) => {
                let (a, b) = (self.encode(l), self.encode(r));
                (0..n).map(|x| self.or(&[a[x], b[x]])).collect()
            }
            Concept::Exists(r, y) | Concept::Forall(r, y) => {
                let forall = matches!(c, Concept::Forall(..));
                let mut inner = self.encode(y);
                if forall {
                    inner = inner.into_iter().map(|l| !l).collect();
                }
                let edges = self.role(r);
                let res: Vec<Lit> = (0..n)
                    .map(|x| {
                        let steps: Vec<Lit> =
                            (0..n).map(|z| self.and(&[self.active[z], edges[x * n + z], inner[z]])).collect();
                        self.or(&steps)
                    })
                    .collect();
                if forall {
                    res.into_iter().map(|l| !l).collect()
                } else {
                    res
                }
            }
            Concept::LocalDD(y) => {
                let inner = self.encode(y);
                let present: Vec<Lit> = (0..n).map(|z| self.and(&[self.active[z], inner[z]])).collect();
                (0..n)
                    .map(|x| {
                        let mut parts = vec![inner[x]];
                        parts.extend((0..n).filter(|&z| z != x).map(|z| !present[z]));
                        self.and(&parts)
                    })
                    .collect()
            }
            Concept::GlobalDD(y, d) => {
                let inner = self.encode(y);
                let body = self.encode(d);
                let present: Vec<Lit> = (0..n).map(|z| self.and(&[self.active[z], inner[z]])).collect();
                let cands: Vec<Lit> = (0..n)
                    .map(|x| {
                        let mut parts = vec![present[x], body[x]];
                        parts.extend((0..n).filter(|&z| z != x).map(|z| !present[z]));
                        self.and(&parts)
                    })
                    .collect();
                let g = self.or(&cands);
                vec![g; n]
            }
        };
        self.memo.insert(c.clone(), out.clone());
        out
    }
}

/// All concepts over the given leaves and role up to `max` symbols, built
/// from ¬, ⊓, ∃, local and global descriptions. Indexed by size.
pub fn enumerate_core(max: usize, leaves: &[Concept], role: &str) -> Vec<Vec<Concept>> {
    let mut by: Vec<Vec<Concept>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by[1] = leaves.to_vec();
    }
    for s in 2..=max {
        let mut out = Vec::new();
        for c in &by[s - 1] {
            out.push(Concept::not(c.clone()));
            out.push(Concept::local(c.clone()));
        }
        if s >= 3 {
            for c in &by[s - 2] {
                out.push(Concept::exists(role, c.clone()));
            }
        }
        for l in 1..s - 1 {
            let r = s - 1 - l;
            for a in &by[l] {
                for b in &by[r] {
                    out.push(Concept::and(a.clone(), b.clone()));
                    out.push(Concept::global(a.clone(), b.clone()));
                }
            }
        }
        by[s] = out;
    }
    by
}

/// Number of nodes on the longest simple path along `role`.
pub fn longest_simple_path(i: &Interpretation, role: &str) -> usize {
    let succ = i.successors(role);
    fn dfs(x: usize, succ: &[Vec<usize>], seen: &mut Vec<bool>) -> usize {
        seen[x] = true;
        let mut best = 1;
        for &y in &succ[x] {
            if !seen[y] {
                best = best.max(1 + dfs(y, succ, seen));
            }
        }
        seen[x] = false;
        best
    }
    let mut seen = vec![false; i.len()];
    (0..i.len()).map(|x| dfs(x, &succ, &mut seen)).max().unwrap_or(0)
}

/// First-order formulas as printed by the standard translation, parsed
/// and evaluated independently of the library's formula type.
pub mod fo {
    use alciota::semantics::Interpretation;

    #[derive(Debug, Clone)]
    #[allow(clippy::enum_variant_names)]
    pub enum F {
        T,
        F,
        P(String, usize),
        R(String, usize, usize),
        Eq(usize, usize),
        Not(Box<F>),
        And(Box<F>, Box<F>),
        Or(Box<F>, Box<F>),
        Imp(Box<F>, Box<F>),
        Ex(usize, Box<F>),
        All(usize, Box<F>),
    }

    fn tokens(s: &str) -> Vec<String> {
        let mut out = Vec::new();
        let cs: Vec<char> = s.chars().collect();
        let mut k = 0;
        while k < cs.len() {
            let c = cs[k];
            if c.is_whitespace() {
                k += 1;
            } else if c == '-' {
                assert_eq!(cs[k + 1], '>');
                out.push("->".into());
                k += 2;
            } else if "~&|=(),".contains(c) {
                out.push(c.to_string());
                k += 1;
            } else {
                let start = k;
                while k < cs.len() && (cs[k].is_alphanumeric() || cs[k] == '_') {
                    k += 1;
                }
                assert!(k > start, "bad character {c:?}");
                out.push(cs[start..k].iter().collect());
            }
        }
        out
    }

    struct P {
        t: Vec<String>,
        k: usize,
    }

    fn var(s: &str) -> usize {
        match s {
            "x" => 0,
            "y" => 1,
            other => panic!("not a variable: {other}"),
        }
    }

    impl P {
        fn peek(&self) -> Option<&str> {
            self.t.get(self.k).map(String::as_str)
        }
        fn eat(&mut self, s: &str) {
            assert_eq!(self.peek(), Some(s), "at token {}", self.k);
            self.k += 1;
        }
        fn next(&mut self) -> String {
            self.k += 1;
            self.t[self.k - 1].clone()
        }
        fn imp(&mut self) -> F {
            let l = self.or();
            if self.peek() == Some("->") {
                self.k += 1;
                let r = self.or();
                return F::Imp(Box::new(l), Box::new(r));
            }
            l
        }
        fn or(&mut self) -> F {
            let mut l = self.and();
            while self.peek() == Some("|") {
                self.k += 1;
                l = F::Or(Box::new(l), Box::new(self.and()));
            }
            l
        }
        fn and(&mut self) -> F {
            let mut l = self.unary();
            while self.peek() == Some("&") {
                self.k += 1;
                l = F::And(Box::new(l), Box::new(self.unary()));
            }
            l
        }
        fn unary(&mut self) -> F {
            let t = self.next();
            match t.as_str() {
                "~" => F::Not(Box::new(self.unary())),
                "(" => {
                    let f = self.imp();
                    self.eat(")");
                    f
                }
                "true" => F::T,
                "false" => F::F,
                "exists" | "forall" => {
                    let v = var(&self.next());
                    self.eat("(");
                    let body = self.imp();
                    self.eat(")");
                    if t == "exists" {
                        F::Ex(v, Box::new(body))
                    } else {
                        F::All(v, Box::new(body))
                    }
                }
                "x" | "y" => {
                    self.eat("=");
                    F::Eq(var(&t), var(&self.next()))
                }
                name => {
                    self.eat("(");
                    let a = var(&self.next());
                    if self.peek() == Some(",") {
                        self.k += 1;
                        let b = var(&self.next());
                        self.eat(")");
                        F::R(name.to_string(), a, b)
                    } else {
                        self.eat(")");
                        F::P(name.to_string(), a)
                    }
                }
            }
        }
    }

    pub fn parse(s: &str) -> F {
        let mut p = P { t: tokens(s), k: 0 };
        let f = p.imp();
        assert_eq!(p.k, p.t.len(), "trailing input in {s}");
        f
    }

    pub fn eval(i: &Interpretation, f: &F, env: &mut [usize; 2]) -> bool {
        match f {
            F::T => true,
            F::F => false,
            F::P(a, v) => i.in_concept(a, env[*v]),
            F::R(r, a, b) => i.role_edges(r).contains(&(env[*a], env[*b])),
            F::Eq(a, b) => env[*a] == env[*b],
            F::Not(x) => !eval(i, x, env),
            F::And(l, r) => eval(i, l, env) && eval(i, r, env),
            F::Or(l, r) => eval(i, l, env) || eval(i, r, env),
            F::Imp(l, r) => !eval(i, l, env) || eval(i, r, env),
            F::Ex(v, b) | F::All(v, b) => {
                let saved = env[*v];
                let want = matches!(f, F::Ex(..));
                let mut found = !want;
                for d in 0..i.len() {
                    env[*v] = d;
                    if eval(i, b, env) == want {
                        found = want;
                        break;
                    }
                }
                env[*v] = saved;
                found
            }
        }
    }
}

/// Interpretation pairs for bisimulation tests: unrelated random pairs,
/// isomorphic copies, and copies with extra elements attached.
pub fn bisim_pair<R: Rng>(rng: &mut R, atoms: &[&str], roles: &[&str], max: usize) -> (Interpretation, Interpretation) {
    let n = rng.gen_range(1..=max);
    let i = random_interpretation(rng, n, atoms, roles, 0.3);
    match rng.gen_range(0..3) {
        0 => {
            let m = rng.gen_range(1..=max);
            (i, random_interpretation(rng, m, atoms, roles, 0.3))
        }
        1 => {
            let (j, _) = permuted(rng, &i);
            (i, j)
        }
        _ => {
            // Disjoint union of i with a random part, plus edges into i.
            let m = rng.gen_range(1..=max.saturating_sub(n).max(1));
            let extra = random_interpretation(rng, m, atoms, roles, 0.3);
            let mut j = Interpretation::with_size(n + m).unwrap();
            for a in atoms {
                j.declare_concept(a);
                for d in i.concept_extension(a) {
                    j.add_concept_member(a, d).unwrap();
                }
                for d in extra.concept_extension(a) {
                    j.add_concept_member(a, n + d).unwrap();
                }
            }
            for r in roles {
                j.declare_role(r);
                for (d, e) in i.role_edges(r) {
                    j.add_role_edge(r, d, e).unwrap();
                }
                for (d, e) in extra.role_edges(r) {
                    j.add_role_edge(r, n + d, n + e).unwrap();
                }
                if rng.gen_bool(0.5) {
                    let (d, e) = (n + rng.gen_range(0..m), rng.gen_range(0..n));
                    j.add_role_edge(r, d, e).unwrap();
                }
            }
            (i, j)
        }
    }
}
