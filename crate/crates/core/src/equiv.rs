//! Permutation actions on words and the equivalences `E_{H,M}`, `E_M` and
//! `≡_α`.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::space::{rank_word, support_form, Word};

/// A permutation of `{0, .., m-1}`, written as its one-line array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            match seen.get_mut(x) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::InvalidPermutation(format!(
                        "{images:?} is not a bijection of 0..{}",
                        images.len()
                    )))
                }
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(m: usize) -> Self {
        Perm((0..m).collect())
    }

    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..m).collect();
        p.swap(a, b);
        Perm(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, a: usize) -> usize {
        self.0[a]
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

/// A subgroup `H ≤ Sym(m)` given by generators, or the full symmetric group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroup {
    pub ground_length: usize,
    pub generators: Vec<Perm>,
    #[serde(default)]
    pub full: bool,
}

impl PermGroup {
    /// `Sym(m)`, generated by the adjacent transpositions.
    pub fn full(m: usize) -> Self {
        PermGroup {
            ground_length: m,
            generators: (1..m).map(|a| Perm::transposition(m, a - 1, a)).collect(),
            full: true,
        }
    }

    pub fn generated(m: usize, generators: Vec<Perm>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != m) {
            return Err(Error::InvalidPermutation(format!(
                "generator of length {} in a group on {m} points",
                g.len()
            )));
        }
        Ok(PermGroup {
            ground_length: m,
            generators,
            full: false,
        })
    }
}

/// Which equivalence relation on `U_{N,Λ}` a partition property refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquivKind {
    /// `E_N`: equal letter multisets.
    FullSym,
    /// `E_{H,N}` for a subgroup given by generators.
    Subgroup { group: PermGroup },
    /// `≡_α`.
    AlphaIso { base: usize },
}

/// `π̂(w) = w ∘ π`.
pub fn apply_perm(w: &Word, pi: &Perm) -> Word {
    Word::new((0..w.len()).map(|a| w[pi.image(a)]).collect())
}

/// The `E_{H,M}`-class of `w`, in rank order.
pub fn orbit_of(w: &Word, group: &PermGroup, alphabet: usize) -> Vec<Word> {
    let mut seen: HashSet<usize> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut orbit = Vec::new();
    seen.insert(rank_word(w, alphabet));
    queue.push_back(w.clone());
    while let Some(x) = queue.pop_front() {
        for g in &group.generators {
            let y = apply_perm(&x, g);
            if seen.insert(rank_word(&y, alphabet)) {
                queue.push_back(y);
            }
        }
        orbit.push(x);
    }
    orbit.sort_by_key(|x| rank_word(x, alphabet));
    orbit
}

/// The unique word with the same letter counts as `w` whose letters are
/// non-decreasing.
pub fn canonical_sorted(w: &Word) -> Word {
    let mut letters = w.letters().to_vec();
    letters.sort_unstable();
    Word::new(letters)
}

/// Letter multiset of a word, as a sorted vector.
fn multiset(w: &Word) -> Vec<usize> {
    canonical_sorted(w).into_letters()
}

/// The `(|u|, β̄)` invariant deciding `≡_α`.
fn alpha_key(w: &Word, base: usize) -> Vec<usize> {
    support_form(w, base).values
}

pub fn related(w1: &Word, w2: &Word, kind: &EquivKind, alphabet: usize) -> Result<bool> {
    if w1.len() != w2.len() {
        return Err(Error::GroundMismatch {
            left: w1.len(),
            right: w2.len(),
        });
    }
    Ok(match kind {
        EquivKind::FullSym => multiset(w1) == multiset(w2),
        EquivKind::Subgroup { group } => {
            if group.ground_length != w1.len() {
                return Err(Error::GroundMismatch {
                    left: w1.len(),
                    right: group.ground_length,
                });
            }
            if group.full {
                multiset(w1) == multiset(w2)
            } else {
                orbit_of(w1, group, alphabet).contains(w2)
            }
        }
        EquivKind::AlphaIso { base } => alpha_key(w1, *base) == alpha_key(w2, *base),
    })
}

/// Class labels for every word of `U_{m,k}` (indexed by rank) under `kind`.
/// Two words share a label iff they are related.
pub fn class_labels(length: usize, alphabet: usize, kind: &EquivKind) -> Result<Vec<usize>> {
    let space = crate::space::Space::new(length, alphabet)?;
    let size = space.size()?;
    match kind {
        EquivKind::FullSym => Ok(label_by_key(space.words(), multiset)),
        EquivKind::AlphaIso { base } => Ok(label_by_key(space.words(), |w| alpha_key(w, *base))),
        EquivKind::Subgroup { group } => {
            if group.ground_length != length {
                return Err(Error::GroundMismatch {
                    left: length,
                    right: group.ground_length,
                });
            }
            let mut parent: Vec<usize> = (0..size).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for (r, w) in space.words().enumerate() {
                for g in &group.generators {
                    let s = rank_word(&apply_perm(&w, g), alphabet);
                    let (a, b) = (find(&mut parent, r), find(&mut parent, s));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
            Ok((0..size).map(|r| find(&mut parent, r)).collect())
        }
    }
}

fn label_by_key<K: std::hash::Hash + Eq>(
    words: impl Iterator<Item = Word>,
    key: impl Fn(&Word) -> K,
) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    words
        .map(|w| {
            let next = ids.len();
            *ids.entry(key(&w)).or_insert(next)
        })
        .collect()
}

/// `Ok` if the coloring is constant on every class of `kind`; otherwise the
/// first violating pair `(a, b)` in rank order, where `a` is the least word of
/// its class and `b` the least word of that class with a different color.
pub fn invariant_check(c: &Coloring, kind: &EquivKind) -> Result<Option<(Word, Word)>> {
    let space = c.space();
    let labels = class_labels(space.length, space.alphabet, kind)?;
    let mut first: HashMap<usize, usize> = HashMap::new();
    for (r, &label) in labels.iter().enumerate() {
        let rep = *first.entry(label).or_insert(r);
        if c.color_at(rep) != c.color_at(r) {
            return Ok(Some((space.unrank(rep)?, space.unrank(r)?)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{make_coloring, Family};
    use crate::space::Space;

    fn w(v: &[usize]) -> Word {
        Word::new(v.to_vec())
    }

    #[test]
    fn apply_perm_examples() {
        assert_eq!(
            apply_perm(&w(&[0, 1, 2]), &Perm::transposition(3, 0, 2)),
            w(&[2, 1, 0])
        );
        assert_eq!(apply_perm(&w(&[1, 1]), &Perm::identity(2)), w(&[1, 1]));
        let cycle = Perm::new(vec![1, 2, 0]).unwrap();
        assert_eq!(apply_perm(&w(&[0, 1, 0]), &cycle), w(&[1, 0, 0]));
    }

    #[test]
    fn perm_rejects_non_bijections() {
        assert!(Perm::new(vec![0, 0]).is_err());
        assert!(Perm::new(vec![0, 2]).is_err());
    }

    #[test]
    fn orbit_examples() {
        let h = PermGroup::generated(3, vec![Perm::transposition(3, 0, 1)]).unwrap();
        let mut got = orbit_of(&w(&[0, 1, 1]), &h, 2);
        got.sort();
        assert_eq!(got, vec![w(&[0, 1, 1]), w(&[1, 0, 1])]);
        assert_eq!(orbit_of(&w(&[0, 0]), &PermGroup::full(2), 2), vec![w(&[0, 0])]);
        let mut got = orbit_of(&w(&[0, 1, 1]), &PermGroup::full(3), 2);
        got.sort();
        assert_eq!(got, vec![w(&[0, 1, 1]), w(&[1, 0, 1]), w(&[1, 1, 0])]);
    }

    #[test]
    fn related_examples() {
        assert!(related(&w(&[0, 1, 1]), &w(&[1, 1, 0]), &EquivKind::FullSym, 2).unwrap());
        let alpha0 = EquivKind::AlphaIso { base: 0 };
        assert!(related(&w(&[1, 0, 0]), &w(&[0, 0, 1]), &alpha0, 2).unwrap());
        assert!(!related(&w(&[1, 0]), &w(&[1, 1]), &alpha0, 2).unwrap());
        assert!(matches!(
            related(&w(&[1, 0]), &w(&[1]), &alpha0, 2),
            Err(Error::GroundMismatch { .. })
        ));
    }

    #[test]
    fn canonical_sorted_examples() {
        assert_eq!(canonical_sorted(&w(&[1, 0, 1, 0])), w(&[0, 0, 1, 1]));
        assert_eq!(canonical_sorted(&w(&[2, 2, 2])), w(&[2, 2, 2]));
        assert_eq!(canonical_sorted(&w(&[2, 0, 1])), w(&[0, 1, 2]));
    }

    fn kinds(m: usize, k: usize) -> Vec<EquivKind> {
        let mut out = vec![EquivKind::FullSym];
        out.extend((0..k).map(|base| EquivKind::AlphaIso { base }));
        if m >= 2 {
            out.push(EquivKind::Subgroup {
                group: PermGroup::generated(m, vec![Perm::transposition(m, 0, m - 1)]).unwrap(),
            });
        }
        out
    }

    #[test]
    fn relations_are_equivalences() {
        for k in 1..=3 {
            for m in 0..=4 {
                let words: Vec<Word> = Space::new(m, k).unwrap().words().collect();
                for kind in kinds(m, k) {
                    let rel = |a: &Word, b: &Word| related(a, b, &kind, k).unwrap();
                    for a in &words {
                        assert!(rel(a, a));
                        for b in &words {
                            assert_eq!(rel(a, b), rel(b, a));
                            if !rel(a, b) {
                                continue;
                            }
                            for c in &words {
                                if rel(b, c) {
                                    assert!(rel(a, c), "{kind:?}: {a} {b} {c}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn full_sym_matches_adjacent_transposition_orbits() {
        for k in 1..=3 {
            for m in 1..=4 {
                let gens = (1..m).map(|a| Perm::transposition(m, a - 1, a)).collect();
                let sub = EquivKind::Subgroup {
                    group: PermGroup::generated(m, gens).unwrap(),
                };
                let words: Vec<Word> = Space::new(m, k).unwrap().words().collect();
                for a in &words {
                    for b in &words {
                        assert_eq!(
                            related(a, b, &EquivKind::FullSym, k).unwrap(),
                            related(a, b, &sub, k).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_sizes_divide_group_order() {
        let fact = |m: usize| (1..=m).product::<usize>();
        for m in 1..=4 {
            let groups = [
                PermGroup::full(m),
                PermGroup::generated(m, vec![Perm::new((0..m).map(|a| (a + 1) % m).collect()).unwrap()])
                    .unwrap(),
            ];
            for g in &groups {
                for word in Space::new(m, 3).unwrap().words() {
                    assert_eq!(fact(m) % orbit_of(&word, g, 3).len(), 0);
                }
            }
        }
    }

    #[test]
    fn canonical_sorted_is_idempotent_and_orbit_constant() {
        for word in Space::new(4, 3).unwrap().words() {
            let c = canonical_sorted(&word);
            assert_eq!(canonical_sorted(&c), c);
            for other in orbit_of(&word, &PermGroup::full(4), 3) {
                assert_eq!(canonical_sorted(&other), c);
            }
        }
    }

    #[test]
    fn alpha_iso_preserves_support_and_letters() {
        for k in 2..=3 {
            let words: Vec<Word> = Space::new(4, k).unwrap().words().collect();
            for base in 0..k {
                let kind = EquivKind::AlphaIso { base };
                for a in &words {
                    for b in &words {
                        if related(a, b, &kind, k).unwrap() {
                            assert_eq!(a.count(base), b.count(base));
                            let strip = |x: &Word| {
                                let mut v: Vec<usize> =
                                    x.letters().iter().copied().filter(|&y| y != base).collect();
                                v.sort();
                                v
                            };
                            assert_eq!(strip(a), strip(b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_check_examples() {
        for k in 2..=3 {
            for m in 0..=4 {
                let space = Space::new(m, k).unwrap();
                let parity = make_coloring(space, 2, Family::Parity { base: 0 }).unwrap();
                assert_eq!(invariant_check(&parity, &EquivKind::FullSym).unwrap(), None);
                let constant = make_coloring(space, 3, Family::Constant { value: 1 }).unwrap();
                for kind in kinds(m, k) {
                    assert_eq!(invariant_check(&constant, &kind).unwrap(), None);
                }
            }
        }
        let space = Space::new(2, 2).unwrap();
        let table = (0..4).map(|r| (r % 2) as u32).collect();
        let c = Coloring::from_table(space, 2, table).unwrap();
        let (a, b) = invariant_check(&c, &EquivKind::FullSym).unwrap().unwrap();
        let mut pair = vec![a, b];
        pair.sort();
        assert_eq!(pair, vec![w(&[0, 1]), w(&[1, 0])]);
    }
}
