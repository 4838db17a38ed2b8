//! Seeded random concept generator for benchmark datasets.
//!
//! A random binary skeleton with `m` atom leaves has `k = m - 1` inner
//! nodes. A quota of inner nodes becomes global descriptions, the rest are
//! conjunctions or disjunctions. Local descriptions, existential
//! restrictions and negations wrap nodes of the skeleton.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{print_concept, Concept};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("manifest error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Inclusive range for the number of atom occurrences (leaves).
    pub atom_occurrences: (usize, usize),
    pub distinct_atom_fraction: f64,
    /// Fraction of all skeleton nodes wrapped in `∃r.`.
    pub exists_fraction: f64,
    /// Fraction of the `k` inner nodes turned into global descriptions.
    pub gd_fraction: f64,
    /// Number of local descriptions is `round(ld_fraction · k)`.
    pub ld_fraction: f64,
    pub negation_probability: f64,
    pub role: String,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            atom_occurrences: (10, 200),
            distinct_atom_fraction: 0.5,
            exists_fraction: 0.3,
            gd_fraction: 0.0,
            ld_fraction: 0.0,
            negation_probability: 0.5,
            role: "r".to_string(),
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let (lo, hi) = self.atom_occurrences;
        if lo == 0 || lo > hi {
            return Err(GenError::Params(format!("atom range {lo}..{hi} must be non-empty and start at 1 or more")));
        }
        for (name, v) in [
            ("distinct_atom_fraction", self.distinct_atom_fraction),
            ("exists_fraction", self.exists_fraction),
            ("gd_fraction", self.gd_fraction),
            ("ld_fraction", self.ld_fraction),
            ("negation_probability", self.negation_probability),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(GenError::Params(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if !crate::syntax::is_lower_name(&self.role) {
            return Err(GenError::Params(format!("'{}' is not a role name", self.role)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenReport {
    pub concept: Concept,
    pub seed: u64,
    pub size: usize,
    /// Atom occurrences.
    pub atoms: usize,
    pub distinct_atoms: usize,
    /// Inner nodes of the skeleton.
    pub k: usize,
    pub gds: usize,
    pub lds: usize,
    pub exists: usize,
    pub negations: usize,
}

/// `round(fraction · n)` with halves rounded away from zero.
pub fn quota(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

enum Node {
    Leaf,
    Inner(usize, usize),
}

fn skeleton(rng: &mut ChaCha8Rng, leaves: usize, nodes: &mut Vec<Node>) -> usize {
    if leaves == 1 {
        nodes.push(Node::Leaf);
        return nodes.len() - 1;
    }
    let left = rng.gen_range(1..leaves);
    let l = skeleton(rng, left, nodes);
    let r = skeleton(rng, leaves - left, nodes);
    nodes.push(Node::Inner(l, r));
    nodes.len() - 1
}

pub fn generate(p: &GenParams) -> Result<GenReport, GenError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let m = rng.gen_range(p.atom_occurrences.0..=p.atom_occurrences.1);
    let k = m - 1;
    let total = 2 * m - 1;
    let gds = quota(p.gd_fraction, k);
    let lds = quota(p.ld_fraction, k);
    let exists = quota(p.exists_fraction, total);
    if gds > k {
        return Err(GenError::Params(format!("{gds} global descriptions exceed {k} inner nodes")));
    }
    if lds > total - gds {
        return Err(GenError::Params(format!(
            "{lds} local descriptions exceed the {} nodes that are not global descriptions",
            total - gds
        )));
    }

    let mut nodes = Vec::with_capacity(total);
    let root = skeleton(&mut rng, m, &mut nodes);
    let inner: Vec<usize> = (0..total).filter(|&i| matches!(nodes[i], Node::Inner(..))).collect();
    let mut is_gd = vec![false; total];
    for i in sample(&mut rng, k, gds).into_iter() {
        is_gd[inner[i]] = true;
    }
    let non_gd: Vec<usize> = (0..total).filter(|&i| !is_gd[i]).collect();
    let mut is_ld = vec![false; total];
    for i in sample(&mut rng, non_gd.len(), lds).into_iter() {
        is_ld[non_gd[i]] = true;
    }
    let mut is_ex = vec![false; total];
    for i in sample(&mut rng, total, exists).into_iter() {
        is_ex[i] = true;
    }

    let names = ((p.distinct_atom_fraction * m as f64).ceil() as usize).max(1);
    let mut built: Vec<Option<Concept>> = (0..total).map(|_| None).collect();
    let mut negations = 0;
    // Children always precede their parent in `nodes`.
    for i in 0..total {
        let mut c = match nodes[i] {
            Node::Leaf => Concept::atom(format!("A{}", rng.gen_range(0..names))),
            Node::Inner(l, r) => {
                let l = built[l].take().expect("child built");
                let r = built[r].take().expect("child built");
                if is_gd[i] {
                    Concept::global(l, r)
                } else if rng.gen_bool(0.5) {
                    Concept::and(l, r)
                } else {
                    Concept::or(l, r)
                }
            }
        };
        if is_ld[i] {
            c = Concept::local(c);
        }
        if is_ex[i] {
            c = Concept::exists(p.role.clone(), c);
        }
        if rng.gen_bool(p.negation_probability) {
            c = Concept::not(c);
            negations += 1;
        }
        built[i] = Some(c);
    }
    let concept = built[root].take().expect("root built");
    let distinct_atoms = concept.atoms().len();
    Ok(GenReport {
        size: concept.size(),
        concept,
        seed: p.seed,
        atoms: m,
        distinct_atoms,
        k,
        gds,
        lds,
        exists,
        negations,
    })
}

/// One manifest row; rows appear in concept id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub seed: u64,
    pub size: usize,
    pub atoms: usize,
    pub k: usize,
    pub gds: usize,
    pub lds: usize,
    pub exists: usize,
}

impl From<&GenReport> for ManifestRow {
    fn from(r: &GenReport) -> Self {
        ManifestRow { seed: r.seed, size: r.size, atoms: r.atoms, k: r.k, gds: r.gds, lds: r.lds, exists: r.exists }
    }
}

pub const MANIFEST: &str = "manifest.csv";

pub fn concept_file_name(id: usize) -> String {
    format!("concept_{id:04}.txt")
}

/// Draws `n` concepts with seeds `base_seed + i`.
pub fn generate_many(template: &GenParams, n: usize, base_seed: u64) -> Result<Vec<GenReport>, GenError> {
    (0..n)
        .map(|i| {
            let p = GenParams { seed: base_seed.wrapping_add(i as u64), ..template.clone() };
            generate(&p)
        })
        .collect()
}

/// Writes one concept file per draw and a manifest into `dir`.
pub fn generate_dataset(
    template: &GenParams,
    n: usize,
    base_seed: u64,
    dir: &Path,
) -> Result<Vec<GenReport>, GenError> {
    let reports = generate_many(template, n, base_seed)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GenError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (id, r) in reports.iter().enumerate() {
        let path = dir.join(concept_file_name(id));
        fs::write(&path, format!("{}\n", print_concept(&r.concept))).map_err(io_err(&path))?;
    }
    let path = dir.join(MANIFEST);
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(["seed", "size", "atoms", "k", "gds", "lds", "exists"])?;
    for r in &reports {
        w.serialize(ManifestRow::from(r))?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(reports)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRow>, GenError> {
    let path = dir.join(MANIFEST);
    let file = fs::File::open(&path).map_err(|source| GenError::Io { path: path.clone(), source })?;
    let mut r = csv::Reader::from_reader(file);
    let rows = r.deserialize().collect::<Result<Vec<ManifestRow>, _>>()?;
    Ok(rows)
}

/// Counts recomputed from the concept itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Recount {
    pub atoms: usize,
    pub distinct_atoms: usize,
    pub binary: usize,
    pub gds: usize,
    pub lds: usize,
    pub exists: usize,
    pub negations: usize,
}

pub fn recount(c: &Concept) -> Recount {
    let mut r = Recount::default();
    let mut names = BTreeSet::new();
    c.walk(&mut |x| match x {
        Concept::Atom(a) => {
            r.atoms += 1;
            names.insert(a.clone());
        }
        Concept::And(..) | Concept::Or(..) => r.binary += 1,
        Concept::GlobalDD(..) => {
            r.binary += 1;
            r.gds += 1;
        }
        Concept::LocalDD(_) => r.lds += 1,
        Concept::Exists(..) => r.exists += 1,
        Concept::Not(_) => r.negations += 1,
        _ => {}
    });
    r.distinct_atoms = names.len();
    r
}
