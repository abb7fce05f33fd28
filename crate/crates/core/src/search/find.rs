//! Witness finders and their validators.
//!
//! Every finder returns the first witness in a fixed enumeration order, so
//! identical inputs always produce identical witnesses. The validators
//! re-check a witness by plain enumeration and share no code with the
//! finders beyond the basic space types.

use serde::{Deserialize, Serialize};

use crate::coloring::{make_coloring, Coloring, Family};
use crate::equiv::{class_labels, related, EquivKind};
use crate::error::{Error, Result};
use crate::space::{
    assemble_word, enumerate_subspace, unrank_unchecked, validate_subspace, GridBound,
    GridPattern, PartialWord, Space, Subspace, Word,
};
use crate::subsets::{combinations, SubsetColoring};

/// Block sequences `⟨M_0, .., M_{dim-1}⟩` of convex `dim`-dimensional
/// subspaces of a ground of length `n`, in lexicographic order.
pub fn convex_block_sequences(n: usize, dim: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(
        start: usize,
        remaining: usize,
        n: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        if start + remaining > n {
            return;
        }
        let width = n - start;
        for mask in 1u64..(1u64 << width) {
            let block: Vec<usize> = (0..width)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| start + i)
                .collect();
            let last = *block.last().unwrap();
            if last + remaining > n {
                continue;
            }
            current.push(block);
            rec(last + 1, remaining - 1, n, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if dim > 0 && n < 64 {
        rec(0, dim, n, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// Visits every convex `dim`-dimensional subspace in canonical order:
/// block sequences lexicographically, then the fixed part by rank. Stops at
/// the first subspace for which `visit` returns `true`.
pub(crate) fn for_each_convex_subspace(
    n: usize,
    alphabet: usize,
    dim: usize,
    mut visit: impl FnMut(&Subspace) -> bool,
) -> Option<Subspace> {
    for blocks in convex_block_sequences(n, dim) {
        let mut used = vec![false; n];
        for &a in blocks.iter().flatten() {
            used[a] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&a| !used[a]).collect();
        let count = alphabet.pow(rest.len() as u32);
        for r in 0..count {
            let fixed_letters = unrank_unchecked(r, rest.len(), alphabet);
            let s = Subspace {
                length: n,
                blocks: blocks.clone(),
                fixed: PartialWord::from_pairs(
                    rest.iter().copied().zip(fixed_letters.into_letters()),
                ),
            };
            if visit(&s) {
                return Some(s);
            }
        }
    }
    None
}

/// Ranks of the words of a subspace, computed arithmetically.
pub(crate) fn subspace_ranks(s: &Subspace, alphabet: usize) -> Vec<usize> {
    let pow: Vec<usize> = (0..s.length).map(|a| alphabet.pow(a as u32)).collect();
    let base: usize = s.fixed.iter().map(|(a, x)| x * pow[a]).sum();
    let weights: Vec<usize> = s
        .blocks
        .iter()
        .map(|b| b.iter().map(|&a| pow[a]).sum())
        .collect();
    let m = s.dim();
    (0..alphabet.pow(m as u32))
        .map(|r| {
            let varrho = unrank_unchecked(r, m, alphabet);
            base + varrho
                .letters()
                .iter()
                .zip(&weights)
                .map(|(x, w)| x * w)
                .sum::<usize>()
        })
        .collect()
}

/// First monochromatic convex `dim`-dimensional subspace, if any.
pub fn find_mono_subspace(c: &Coloring, dim: usize) -> Option<Subspace> {
    let space = c.space();
    for_each_convex_subspace(space.length, space.alphabet, dim, |s| {
        let mut ranks = subspace_ranks(s, space.alphabet).into_iter();
        let first = c.color_at(ranks.next().unwrap());
        ranks.all(|r| c.color_at(r) == first)
    })
}

/// A convex subspace of `c`'s space on which `c` is constant.
pub fn is_mono_subspace(c: &Coloring, s: &Subspace) -> bool {
    if s.length != c.space().length || validate_subspace(s).is_err() {
        return false;
    }
    if s.fixed.iter().any(|(_, x)| x >= c.space().alphabet) {
        return false;
    }
    let words = enumerate_subspace(s, c.space().alphabet);
    let first = c.color(&words[0]);
    words.iter().all(|w| c.color(w) == first)
}

/// First grid pattern `(d, ⟨m_e⟩)` of side `side` on which `c` is constant.
/// `c` colors `U_{h,n}`: its alphabet plays the role of the segment `n`.
/// Candidates are ordered by `d`, then by offsets lexicographically.
pub fn find_grid_pattern(c: &Coloring, side: usize, bound: GridBound) -> Option<GridPattern> {
    let h = c.space().length;
    let n = c.space().alphabet;
    if side == 0 {
        return None;
    }
    let steps = match bound {
        GridBound::Span => side - 1,
        GridBound::Strict => side,
    };
    for d in 1..n.max(2) {
        if d * steps >= n {
            break;
        }
        let top = n - d * steps; // offsets range over 0..top
        let mut offsets = vec![0usize; h];
        loop {
            let g = GridPattern {
                difference: d,
                offsets: offsets.clone(),
                side,
            };
            let mut pts = g.points().into_iter();
            let first = c.color(&pts.next().unwrap());
            if pts.all(|p| c.color(&p) == first) {
                return Some(g);
            }
            // Next offset vector, offsets[0] most significant.
            let mut exhausted = true;
            let mut e = h;
            while e > 0 {
                e -= 1;
                offsets[e] += 1;
                if offsets[e] < top {
                    exhausted = false;
                    break;
                }
                offsets[e] = 0;
            }
            if exhausted {
                break;
            }
        }
    }
    None
}

pub fn is_mono_grid(c: &Coloring, g: &GridPattern, bound: GridBound) -> bool {
    if g.offsets.len() != c.space().length || !g.fits(c.space().alphabet, bound) || g.side == 0 {
        return false;
    }
    let pts = g.points();
    let first = c.color(&pts[0]);
    pts.iter().all(|p| c.color(p) == first)
}

/// Depth-first search for the lexicographically first `target`-subset whose
/// `r`-subsets are constant for every level `r` of `c` (constants may differ
/// between levels).
fn first_level_homogeneous(c: &SubsetColoring, target: usize) -> Option<Vec<usize>> {
    fn extend(
        c: &SubsetColoring,
        target: usize,
        chosen: &mut Vec<usize>,
        level_color: &mut Vec<Option<u32>>,
    ) -> bool {
        if chosen.len() == target {
            return true;
        }
        let start = chosen.last().map_or(0, |&x| x + 1);
        let need = target - chosen.len();
        for x in start..c.n {
            if c.n - x < need {
                break;
            }
            let saved = level_color.clone();
            let mut ok = true;
            'levels: for (li, &r) in c.levels.iter().enumerate() {
                if r == 0 || r > chosen.len() + 1 {
                    continue;
                }
                for mut u in combinations(chosen.len(), r - 1)
                    .map(|idx| idx.into_iter().map(|i| chosen[i]).collect::<Vec<_>>())
                {
                    u.push(x);
                    let col = c.tables[li][crate::subsets::colex_rank(&u)];
                    match level_color[li] {
                        None => level_color[li] = Some(col),
                        Some(y) if y != col => {
                            ok = false;
                            break 'levels;
                        }
                        _ => {}
                    }
                }
            }
            if ok {
                chosen.push(x);
                if extend(c, target, chosen, level_color) {
                    return true;
                }
                chosen.pop();
            }
            *level_color = saved;
        }
        false
    }
    if target > c.n {
        return None;
    }
    let mut chosen = Vec::with_capacity(target);
    let mut level_color = vec![None; c.levels.len()];
    extend(c, target, &mut chosen, &mut level_color).then_some(chosen)
}

/// First `A ∈ [n]^target` (lexicographic) homogeneous for a coloring of
/// `[n]^l`.
pub fn find_homogeneous(c: &SubsetColoring, target: usize) -> Result<Option<Vec<usize>>> {
    if c.levels.len() != 1 {
        return Err(Error::BadParams(
            "homogeneous-set search needs a coloring of a single level [n]^l".into(),
        ));
    }
    Ok(first_level_homogeneous(c, target))
}

/// First `B ∈ [n]^target` constant on each level of a coloring of `[n]^{<l}`.
pub fn find_ram_homogeneous(f: &SubsetColoring, target: usize) -> Option<Vec<usize>> {
    first_level_homogeneous(f, target)
}

/// `c` is constant on `[set]^r` for each level `r` separately.
pub fn is_level_homogeneous(c: &SubsetColoring, set: &[usize]) -> bool {
    if set.windows(2).any(|p| p[0] >= p[1]) || set.iter().any(|&x| x >= c.n) {
        return false;
    }
    c.levels.iter().all(|&r| {
        let mut colors = combinations(set.len(), r)
            .map(|idx| c.color(&idx.into_iter().map(|i| set[i]).collect::<Vec<_>>()));
        match colors.next() {
            None => true,
            Some(first) => colors.all(|x| x == first),
        }
    })
}

/// Which injections `f: N → M` a partition-witness search considers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectionScope {
    /// Increasing maps, i.e. subsets `N ⊆ M` with the identity embedding.
    #[default]
    OrderPreserving,
    /// Every one-to-one map.
    All,
}

/// `(N, f, ϱ)`: the injection `f` (as the list `f(0), .., f(m-1)`) and the
/// fill `ϱ` on the rest of the ground.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParWitness {
    pub ground: usize,
    pub injection: Vec<usize>,
    pub fill: PartialWord,
    pub kind: EquivKind,
}

impl ParWitness {
    /// `range(f)` in increasing order; equals `N` when `f` is the identity.
    pub fn subset(&self) -> Vec<usize> {
        let mut s = self.injection.clone();
        s.sort_unstable();
        s
    }
}

fn injections(n: usize, m: usize, scope: InjectionScope) -> Vec<Vec<usize>> {
    match scope {
        InjectionScope::OrderPreserving => combinations(n, m).collect(),
        InjectionScope::All => {
            let mut out = Vec::new();
            fn rec(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
                if cur.len() == m {
                    out.push(cur.clone());
                    return;
                }
                for a in 0..n {
                    if !used[a] {
                        used[a] = true;
                        cur.push(a);
                        rec(n, m, cur, used, out);
                        cur.pop();
                        used[a] = false;
                    }
                }
            }
            rec(n, m, &mut Vec::new(), &mut vec![false; n], &mut out);
            out
        }
    }
}

/// First partition witness for `c` with `|N| = size`.
///
/// For `≡_α` the fill is the constant `α` and only the injection varies.
/// For `E_N` and `E_{H,N}` candidates are ordered by injection, then by the
/// rank of the fill.
pub fn find_par_witness(
    c: &Coloring,
    size: usize,
    kind: &EquivKind,
    scope: InjectionScope,
) -> Result<Option<ParWitness>> {
    let space = c.space();
    let (n, k) = (space.length, space.alphabet);
    if size > n {
        return Err(Error::BadParams(format!(
            "witness size {size} exceeds ground {n}"
        )));
    }
    let labels = class_labels(size, k, kind)?;
    let inner = Space::new(size, k)?.size()?;
    let pow: Vec<usize> = (0..n).map(|a| k.pow(a as u32)).collect();
    let mut seen = vec![u32::MAX; inner];
    for inj in injections(n, size, scope) {
        let mut in_range = vec![false; n];
        for &a in &inj {
            in_range[a] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&a| !in_range[a]).collect();
        let fills: Box<dyn Iterator<Item = Word>> = match kind {
            EquivKind::AlphaIso { base } => Box::new(std::iter::once(Word::constant(rest.len(), *base))),
            _ => Box::new(Space::new(rest.len(), k)?.words().collect::<Vec<_>>().into_iter()),
        };
        for fill in fills {
            let base: usize = rest
                .iter()
                .zip(fill.letters())
                .map(|(&a, &x)| x * pow[a])
                .sum();
            seen.iter_mut().for_each(|s| *s = u32::MAX);
            let mut ok = true;
            for (r, &label) in labels.iter().enumerate() {
                let eta = unrank_unchecked(r, size, k);
                let rank = base
                    + inj
                        .iter()
                        .zip(eta.letters())
                        .map(|(&a, &x)| x * pow[a])
                        .sum::<usize>();
                let col = c.color_at(rank);
                if seen[label] == u32::MAX {
                    seen[label] = col;
                } else if seen[label] != col {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(ParWitness {
                    ground: n,
                    injection: inj.clone(),
                    fill: PartialWord::from_pairs(rest.iter().copied().zip(fill.into_letters())),
                    kind: kind.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Re-checks a partition witness over every related pair of words on `N`.
/// Returns the first failing pair.
pub fn check_par_witness(c: &Coloring, w: &ParWitness) -> Result<Option<(Word, Word)>> {
    let k = c.space().alphabet;
    let m = w.injection.len();
    let words: Vec<Word> = Space::new(m, k)?.words().collect();
    let full: Vec<Word> = words
        .iter()
        .map(|eta| assemble_word(eta, &w.injection, &w.fill, c.space().length))
        .collect::<Result<_>>()?;
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate().skip(i + 1) {
            if related(a, b, &w.kind, k)? && c.color(&full[i]) != c.color(&full[j]) {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

/// Searches for an all-singleton-block subspace of dimension at least one
/// that is monochromatic under the parity coloring `|η^{-1}{base}| mod 2`.
/// `None` means no such subspace exists.
pub fn singleton_counterexample_check(
    m: usize,
    alphabet: usize,
    base: usize,
) -> Result<Option<Subspace>> {
    if m == 0 || alphabet < 2 || base >= alphabet {
        return Err(Error::BadParams(
            "need m ≥ 1, at least two letters and a base letter in the alphabet".into(),
        ));
    }
    let space = Space::new(m, alphabet)?;
    let parity = make_coloring(space, 2, Family::Parity { base })?;
    for mask in 1usize..(1 << m) {
        let blocks: Vec<Vec<usize>> = (0..m).filter(|a| mask >> a & 1 == 1).map(|a| vec![a]).collect();
        let rest: Vec<usize> = (0..m).filter(|a| mask >> a & 1 == 0).collect();
        for fill in Space::new(rest.len(), alphabet)?.words() {
            let s = Subspace {
                length: m,
                blocks: blocks.clone(),
                fixed: PartialWord::from_pairs(rest.iter().copied().zip(fill.into_letters())),
            };
            if is_mono_subspace(&parity, &s) {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}
