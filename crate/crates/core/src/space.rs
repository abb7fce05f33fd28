//! The combinatorial space `U_{M,Λ}` of words over a finite alphabet, its
//! lines and convex subspaces.
//!
//! Grounds are canonicalized to `{0, .., m-1}` with the natural order and
//! letters to `{0, .., k-1}`. Words are ranked little-endian: position 0 is
//! the least significant digit, so `rank(w) = Σ w[a]·k^a`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite alphabet `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::BadParams("alphabet must be non-empty".into()));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

/// The product space `U_{m,k}`: all words of length `m` over `k` letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub length: usize,
    pub alphabet: usize,
}

impl Space {
    pub fn new(length: usize, alphabet: usize) -> Result<Self> {
        Alphabet::new(alphabet)?;
        let space = Space { length, alphabet };
        space.size()?;
        Ok(space)
    }

    /// Number of words, `k^m`.
    pub fn size(&self) -> Result<usize> {
        (self.alphabet)
            .checked_pow(self.length as u32)
            .filter(|_| self.length <= u32::MAX as usize)
            .ok_or(Error::SpaceTooLarge {
                length: self.length,
                alphabet: self.alphabet,
            })
    }

    /// Size of a space already validated by [`Space::new`].
    pub(crate) fn len_unchecked(&self) -> usize {
        self.alphabet.pow(self.length as u32)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.length && w.letters().iter().all(|&x| x < self.alphabet)
    }

    pub fn rank(&self, w: &Word) -> usize {
        rank_word(w, self.alphabet)
    }

    pub fn unrank(&self, r: usize) -> Result<Word> {
        unrank_word(r, self.length, self.alphabet)
    }

    /// All words in rank order.
    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.len_unchecked()).map(move |r| unrank_unchecked(r, self.length, self.alphabet))
    }
}

/// A word `η: M → Λ`, stored as one letter index per ground position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// A word checked against an alphabet.
    pub fn over(letters: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&x| x >= alphabet) {
            return Err(Error::InvalidWord(format!(
                "letter {bad} outside alphabet of size {alphabet}"
            )));
        }
        Ok(Word(letters))
    }

    pub fn constant(length: usize, letter: usize) -> Self {
        Word(vec![letter; length])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<usize> {
        self.0
    }

    /// `|η^{-1}{letter}|`.
    pub fn count(&self, letter: usize) -> usize {
        self.0.iter().filter(|&&x| x == letter).count()
    }
}

impl std::ops::Index<usize> for Word {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

/// `Σ w[a]·k^a`, position 0 least significant.
pub fn rank_word(w: &Word, alphabet: usize) -> usize {
    w.0.iter().rev().fold(0, |acc, &x| acc * alphabet + x)
}

pub fn unrank_word(r: usize, length: usize, alphabet: usize) -> Result<Word> {
    let size = Space::new(length, alphabet)?.size()?;
    if r >= size {
        return Err(Error::RankOutOfRange { rank: r, size });
    }
    Ok(unrank_unchecked(r, length, alphabet))
}

pub(crate) fn unrank_unchecked(mut r: usize, length: usize, alphabet: usize) -> Word {
    let mut letters = Vec::with_capacity(length);
    for _ in 0..length {
        letters.push(r % alphabet);
        r /= alphabet;
    }
    Word(letters)
}

/// A word defined on a subset of the ground, e.g. the fixed part of a
/// subspace or the fill of a partition witness.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialWord(BTreeMap<usize, usize>);

impl PartialWord {
    pub fn new() -> Self {
        PartialWord(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        PartialWord(pairs.into_iter().collect())
    }

    /// The constant function `letter` on `positions`.
    pub fn constant(positions: impl IntoIterator<Item = usize>, letter: usize) -> Self {
        PartialWord(positions.into_iter().map(|a| (a, letter)).collect())
    }

    pub fn get(&self, a: usize) -> Option<usize> {
        self.0.get(&a).copied()
    }

    pub fn insert(&mut self, a: usize, letter: usize) -> Option<usize> {
        self.0.insert(a, letter)
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.contains_key(&a)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&a, &x)| (a, x))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of two partial words with disjoint domains.
    pub fn union(&self, other: &PartialWord) -> Result<PartialWord> {
        let mut out = self.0.clone();
        for (a, x) in other.iter() {
            if out.insert(a, x).is_some() {
                return Err(Error::DomainMismatch(format!(
                    "position {a} defined on both sides of a union"
                )));
            }
        }
        Ok(PartialWord(out))
    }

    /// Rank of the fixed letters read in increasing position order.
    pub fn rank(&self, alphabet: usize) -> usize {
        self.0.values().rev().fold(0, |acc, &x| acc * alphabet + x)
    }
}

/// `(u, β̄)` with `η = η_{α,β̄,u}`: the positions where a word differs from
/// the base letter and the letters found there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportForm {
    pub base: usize,
    pub support: Vec<usize>,
    pub values: Vec<usize>,
}

impl SupportForm {
    /// `η_{base,values,support}` over a ground of the given length.
    pub fn to_word(&self, length: usize) -> Word {
        let mut letters = vec![self.base; length];
        for (&a, &x) in self.support.iter().zip(&self.values) {
            letters[a] = x;
        }
        Word(letters)
    }
}

pub fn support_form(w: &Word, base: usize) -> SupportForm {
    let (support, values) = w
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != base)
        .map(|(a, &x)| (a, x))
        .unzip();
    SupportForm {
        base,
        support,
        values,
    }
}

/// `(inner ∘ injection^{-1}) ∪ fill` as a word on a ground of `length`
/// positions. `injection[i]` is the image of position `i` of the inner word.
pub fn assemble_word(
    inner: &Word,
    injection: &[usize],
    fill: &PartialWord,
    length: usize,
) -> Result<Word> {
    if inner.len() != injection.len() {
        return Err(Error::DomainMismatch(format!(
            "inner word has {} letters but the injection has {} points",
            inner.len(),
            injection.len()
        )));
    }
    let mut out: Vec<Option<usize>> = vec![None; length];
    for (&a, &x) in injection.iter().zip(inner.letters()) {
        match out.get_mut(a) {
            Some(slot @ None) => *slot = Some(x),
            Some(Some(_)) => {
                return Err(Error::DomainMismatch(format!(
                    "injection is not one-to-one at {a}"
                )))
            }
            None => {
                return Err(Error::DomainMismatch(format!(
                    "position {a} outside a ground of length {length}"
                )))
            }
        }
    }
    for (a, x) in fill.iter() {
        match out.get_mut(a) {
            Some(slot @ None) => *slot = Some(x),
            Some(Some(_)) => {
                return Err(Error::DomainMismatch(format!(
                    "fill overlaps the injection range at {a}"
                )))
            }
            None => {
                return Err(Error::DomainMismatch(format!(
                    "fill position {a} outside a ground of length {length}"
                )))
            }
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(a, x)| {
            x.ok_or_else(|| Error::DomainMismatch(format!("position {a} left undefined")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

/// A line: the moving positions take one common letter, the rest is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub length: usize,
    pub moving: Vec<usize>,
    pub fixed: PartialWord,
}

impl Line {
    pub fn to_subspace(&self) -> Subspace {
        Subspace {
            length: self.length,
            blocks: vec![self.moving.clone()],
            fixed: self.fixed.clone(),
        }
    }

    pub fn words(&self, alphabet: usize) -> Vec<Word> {
        (0..alphabet)
            .map(|x| {
                let mut letters = vec![0; self.length];
                for (a, y) in self.fixed.iter() {
                    letters[a] = y;
                }
                for &a in &self.moving {
                    letters[a] = x;
                }
                Word(letters)
            })
            .collect()
    }
}

/// An m-dimensional subspace: blocks `M_0, .., M_{m-1}` each carrying one
/// letter, and a fixed part on the complement.
///
/// The type does not enforce convexity; [`validate_subspace`] reports
/// whether the blocks are ordered as a convex subspace requires.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub length: usize,
    pub blocks: Vec<Vec<usize>>,
    pub fixed: PartialWord,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    /// The map `f: ∪M_l → m`, `f(j) = l` iff `j ∈ M_l`.
    pub fn block_index(&self) -> BTreeMap<usize, usize> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(l, b)| b.iter().map(move |&j| (j, l)))
            .collect()
    }

    /// The word in the subspace selected by `ϱ ∈ U_{m,Λ}`.
    pub fn word_for(&self, varrho: &Word) -> Word {
        let mut letters = vec![0; self.length];
        for (a, x) in self.fixed.iter() {
            letters[a] = x;
        }
        for (block, &x) in self.blocks.iter().zip(varrho.letters()) {
            for &a in block {
                letters[a] = x;
            }
        }
        Word(letters)
    }
}

/// Which clause of the subspace definition a candidate violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum SubspaceViolation {
    /// A block is empty.
    EmptyBlock { block: usize },
    /// A position outside the ground.
    OutOfRange { position: usize },
    /// Two blocks share a position.
    Overlap { position: usize },
    /// Blocks are not ordered `M_{l0} < M_{l1}` for `l0 < l1`.
    BlockOrder { block: usize },
    /// The fixed part is defined on a block position.
    FixedOverlap { position: usize },
    /// A position is neither in a block nor fixed.
    Uncovered { position: usize },
}

impl fmt::Display for SubspaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceViolation::EmptyBlock { block } => write!(f, "block {block} is empty"),
            SubspaceViolation::OutOfRange { position } => {
                write!(f, "position {position} outside the ground")
            }
            SubspaceViolation::Overlap { position } => {
                write!(f, "blocks are not pairwise disjoint (position {position})")
            }
            SubspaceViolation::BlockOrder { block } => write!(
                f,
                "block order violated: block {block} does not lie entirely before block {}",
                block + 1
            ),
            SubspaceViolation::FixedOverlap { position } => {
                write!(f, "fixed part defined on block position {position}")
            }
            SubspaceViolation::Uncovered { position } => {
                write!(f, "position {position} is neither moving nor fixed")
            }
        }
    }
}

/// Checks the structural clauses of a convex subspace: disjoint non-empty
/// blocks, strictly ordered block to block, fixed part on the complement.
pub fn validate_subspace(s: &Subspace) -> std::result::Result<(), SubspaceViolation> {
    let mut owner: Vec<Option<usize>> = vec![None; s.length];
    for (l, block) in s.blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(SubspaceViolation::EmptyBlock { block: l });
        }
        for &j in block {
            match owner.get_mut(j) {
                None => return Err(SubspaceViolation::OutOfRange { position: j }),
                Some(Some(_)) => return Err(SubspaceViolation::Overlap { position: j }),
                Some(slot) => *slot = Some(l),
            }
        }
    }
    for (l, pair) in s.blocks.windows(2).enumerate() {
        let max0 = pair[0].iter().max().copied().unwrap_or(0);
        let min1 = pair[1].iter().min().copied().unwrap_or(0);
        if max0 >= min1 {
            return Err(SubspaceViolation::BlockOrder { block: l });
        }
    }
    for a in s.fixed.domain() {
        match owner.get(a) {
            None => return Err(SubspaceViolation::OutOfRange { position: a }),
            Some(Some(_)) => return Err(SubspaceViolation::FixedOverlap { position: a }),
            Some(None) => {}
        }
    }
    for (a, o) in owner.iter().enumerate() {
        if o.is_none() && !s.fixed.contains(a) {
            return Err(SubspaceViolation::Uncovered { position: a });
        }
    }
    Ok(())
}

/// All `k^m` words of the subspace, ordered by the rank of the block
/// assignment `ϱ`.
pub fn enumerate_subspace(s: &Subspace, alphabet: usize) -> Vec<Word> {
    let m = s.dim();
    let count = alphabet.pow(m as u32);
    (0..count)
        .map(|r| s.word_for(&unrank_unchecked(r, m, alphabet)))
        .collect()
}

/// How strictly a grid pattern must fit inside `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridBound {
    /// Every grid point lies below `n`: `m_e + d·(side-1) < n`.
    #[default]
    Span,
    /// The stronger `m_e + d·side < n`.
    Strict,
}

/// A homothetic grid `{⟨m_e + d·i_e | e < h⟩ | i_e < side}` in `U_{h,n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPattern {
    pub difference: usize,
    pub offsets: Vec<usize>,
    pub side: usize,
}

impl GridPattern {
    /// Largest coordinate the pattern touches under the given bound,
    /// i.e. `max_e m_e + d·(side-1)` or `max_e m_e + d·side`.
    pub fn reach(&self, bound: GridBound) -> usize {
        let steps = match bound {
            GridBound::Span => self.side.saturating_sub(1),
            GridBound::Strict => self.side,
        };
        self.offsets.iter().max().copied().unwrap_or(0) + self.difference * steps
    }

    pub fn fits(&self, n: usize, bound: GridBound) -> bool {
        self.difference > 0 && self.reach(bound) < n
    }

    /// All grid points as words of `U_{h,n}`, in rank order of `⟨i_e⟩`.
    pub fn points(&self) -> Vec<Word> {
        let h = self.offsets.len();
        let count = self.side.pow(h as u32);
        (0..count)
            .map(|r| {
                let idx = unrank_unchecked(r, h, self.side.max(1));
                Word(
                    self.offsets
                        .iter()
                        .zip(idx.letters())
                        .map(|(&m, &i)| m + self.difference * i)
                        .collect(),
                )
            })
            .collect()
    }
}
