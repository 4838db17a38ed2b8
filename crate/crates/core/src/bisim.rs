//! Maximal bisimulations between finite interpretations.
//!
//! The plain ALC relation comes from partition refinement on the disjoint
//! union of both interpretations. The description-aware variants filter it
//! through the named-individual totality test.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::semantics::Interpretation;

/// A relation between the domain of a left and a right interpretation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BisimRelation {
    pairs: BTreeSet<(usize, usize)>,
    dom: BTreeSet<usize>,
    rng: BTreeSet<usize>,
}

impl BisimRelation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        let dom = pairs.iter().map(|p| p.0).collect();
        let rng = pairs.iter().map(|p| p.1).collect();
        BisimRelation { pairs, dom, rng }
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn dom(&self) -> &BTreeSet<usize> {
        &self.dom
    }

    pub fn rng(&self) -> &BTreeSet<usize> {
        &self.rng
    }

    pub fn contains(&self, d: usize, e: usize) -> bool {
        self.pairs.contains(&(d, e))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Pairs rendered with element names.
    pub fn named_pairs(&self, left: &Interpretation, right: &Interpretation) -> Vec<(String, String)> {
        self.pairs.iter().map(|&(d, e)| (left.element_name(d).to_string(), right.element_name(e).to_string())).collect()
    }

    /// Left- and right-total with respect to the given carrier sets.
    pub fn is_total_over(&self, left: &BTreeSet<usize>, right: &BTreeSet<usize>) -> bool {
        let restricted: Vec<&(usize, usize)> =
            self.pairs.iter().filter(|(d, e)| left.contains(d) && right.contains(e)).collect();
        left.iter().all(|d| restricted.iter().any(|p| p.0 == *d))
            && right.iter().all(|e| restricted.iter().any(|p| p.1 == *e))
    }
}

/// Which family of bisimulation to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisimLogic {
    Alc,
    Alcil,
    /// Serves both global descriptions alone and the full logic.
    Alci,
}

impl std::str::FromStr for BisimLogic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alc" => Ok(BisimLogic::Alc),
            "alcil" => Ok(BisimLogic::Alcil),
            "alci" | "alcig" => Ok(BisimLogic::Alci),
            other => Err(format!("unknown logic '{other}' (expected alc, alcil or alci)")),
        }
    }
}

fn signature(i: &Interpretation, j: &Interpretation) -> (Vec<String>, Vec<String>) {
    let atoms: BTreeSet<String> = i.concept_names().chain(j.concept_names()).map(str::to_string).collect();
    let roles: BTreeSet<String> = i.role_names().chain(j.role_names()).map(str::to_string).collect();
    (atoms.into_iter().collect(), roles.into_iter().collect())
}

/// Coarsest stable partition of the disjoint union; element `d` of `j`
/// is numbered `i.len() + d`.
fn refine(i: &Interpretation, j: &Interpretation) -> Vec<usize> {
    let (atoms, roles) = signature(i, j);
    let n = i.len() + j.len();
    let off = i.len();

    let mut succ: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); roles.len()]; n];
    for (ri, r) in roles.iter().enumerate() {
        for (d, e) in i.role_edges(r) {
            succ[d][ri].push(e);
        }
        for (d, e) in j.role_edges(r) {
            succ[off + d][ri].push(off + e);
        }
    }

    let atom_key = |x: usize| -> Vec<bool> {
        atoms.iter().map(|a| if x < off { i.in_concept(a, x) } else { j.in_concept(a, x - off) }).collect()
    };
    let mut block = renumber((0..n).map(atom_key).collect());
    let mut count = block.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let keys: Vec<(usize, Vec<BTreeSet<usize>>)> = (0..n)
            .map(|x| {
                let sig = succ[x].iter().map(|targets| targets.iter().map(|&y| block[y]).collect()).collect();
                (block[x], sig)
            })
            .collect();
        let next = renumber(keys);
        let next_count = next.iter().copied().max().map_or(0, |m| m + 1);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

fn renumber<K: Ord + Clone>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let next = ids.len();
        out.push(*ids.entry(k).or_insert(next));
    }
    out
}

/// The largest relation satisfying Atom, Forth and Back.
pub fn max_bisim_alc(i: &Interpretation, j: &Interpretation) -> BisimRelation {
    let block = refine(i, j);
    let off = i.len();
    let mut by_block: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in 0..j.len() {
        by_block.entry(block[off + e]).or_default().push(e);
    }
    let mut pairs = Vec::new();
    for (d, b) in block[..i.len()].iter().enumerate() {
        if let Some(es) = by_block.get(b) {
            pairs.extend(es.iter().map(|&e| (d, e)));
        }
    }
    BisimRelation::from_pairs(pairs)
}

/// Elements not ALC-bisimilar to any other element of the same interpretation.
pub fn named_individuals(i: &Interpretation) -> BTreeSet<usize> {
    let z = max_bisim_alc(i, i);
    (0..i.len()).filter(|&d| !z.pairs().iter().any(|&(x, e)| x == d && e != d)).collect()
}

fn with_names_check(i: &Interpretation, j: &Interpretation, restrict_to_z: bool) -> BisimRelation {
    let z = max_bisim_alc(i, j);
    let n_i = named_individuals(i);
    let n_j = named_individuals(j);
    let (nz_i, nz_j): (BTreeSet<usize>, BTreeSet<usize>) = if restrict_to_z {
        (n_i.intersection(z.dom()).copied().collect(), n_j.intersection(z.rng()).copied().collect())
    } else {
        (n_i, n_j)
    };
    match (nz_i.is_empty(), nz_j.is_empty()) {
        (true, true) => return z,
        (true, false) | (false, true) => return BisimRelation::empty(),
        (false, false) => {}
    }
    let all_i: BTreeSet<usize> = (0..i.len()).collect();
    let all_j: BTreeSet<usize> = (0..j.len()).collect();
    if z.is_total_over(&all_i, &all_j) && z.is_total_over(&nz_i, &nz_j) {
        z
    } else {
        BisimRelation::empty()
    }
}

/// Maximal bisimulation for local descriptions.
pub fn max_bisim_alcil(i: &Interpretation, j: &Interpretation) -> BisimRelation {
    with_names_check(i, j, true)
}

/// Maximal bisimulation for global descriptions, and for both kinds together.
pub fn max_bisim_alci(i: &Interpretation, j: &Interpretation) -> BisimRelation {
    with_names_check(i, j, false)
}

pub fn max_bisim(logic: BisimLogic, i: &Interpretation, j: &Interpretation) -> BisimRelation {
    match logic {
        BisimLogic::Alc => max_bisim_alc(i, j),
        BisimLogic::Alcil => max_bisim_alcil(i, j),
        BisimLogic::Alci => max_bisim_alci(i, j),
    }
}

/// Direct scan of the Atom, Forth and Back conditions over the joint signature.
pub fn is_alc_bisimulation(i: &Interpretation, j: &Interpretation, z: &BisimRelation) -> bool {
    let (atoms, roles) = signature(i, j);
    for &(d, e) in z.pairs() {
        if atoms.iter().any(|a| i.in_concept(a, d) != j.in_concept(a, e)) {
            return false;
        }
    }
    for r in &roles {
        let si = i.successors(r);
        let sj = j.successors(r);
        for &(d, e) in z.pairs() {
            let forth = si[d].iter().all(|&d2| sj[e].iter().any(|&e2| z.contains(d2, e2)));
            let back = sj[e].iter().all(|&e2| si[d].iter().any(|&d2| z.contains(d2, e2)));
            if !forth || !back {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::parse_interpretation;

    fn fig1() -> (Interpretation, Interpretation) {
        (
            parse_interpretation("domain a b\nconcept A").unwrap(),
            parse_interpretation("domain c d e\nconcept A e").unwrap(),
        )
    }

    #[test]
    fn two_small_models() {
        let (i, j) = fig1();
        let expect = BisimRelation::from_pairs([(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(max_bisim_alc(&i, &j), expect);
        assert_eq!(max_bisim_alcil(&i, &j), expect);
        assert!(max_bisim_alci(&i, &j).is_empty());
        assert!(named_individuals(&i).is_empty());
        assert_eq!(named_individuals(&j), BTreeSet::from([2]));
    }

    #[test]
    fn single_points() {
        let p = parse_interpretation("domain x").unwrap();
        assert_eq!(max_bisim_alc(&p, &p), BisimRelation::from_pairs([(0, 0)]));
        let q = parse_interpretation("domain x\nconcept A x").unwrap();
        assert!(max_bisim_alcil(&q, &p).is_empty());
        assert!(max_bisim_alc(&q, &p).is_empty());
    }

    #[test]
    fn atom_mismatch_excluded() {
        let i = parse_interpretation("domain x y\nconcept A x").unwrap();
        let j = parse_interpretation("domain u v").unwrap();
        let z = max_bisim_alc(&i, &j);
        assert_eq!(z, BisimRelation::from_pairs([(1, 0), (1, 1)]));
        assert!(is_alc_bisimulation(&i, &j, &z));
    }

    #[test]
    fn roles_refine() {
        let i = parse_interpretation("domain a b c\nconcept A c\nrole r (a,b) (b,c)").unwrap();
        let z = max_bisim_alc(&i, &i);
        assert_eq!(z, BisimRelation::from_pairs([(0, 0), (1, 1), (2, 2)]));
        assert_eq!(named_individuals(&i).len(), 3);
        let cyc = parse_interpretation("domain a b\nrole r (a,b) (b,a)").unwrap();
        assert_eq!(max_bisim_alc(&cyc, &cyc).len(), 4);
    }

    #[test]
    fn identity_contained() {
        let i = parse_interpretation("domain a b c\nconcept A a\nrole r (a,b) (c,c)").unwrap();
        for z in [max_bisim_alcil(&i, &i), max_bisim_alci(&i, &i)] {
            for d in 0..3 {
                assert!(z.contains(d, d));
            }
        }
    }
}
