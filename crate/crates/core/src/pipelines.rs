//! Extraction procedures that follow the constructive proofs step by step.
//!
//! Each pipeline runs in attempt mode: at desk-scale grounds a stage may
//! find nothing, which is reported as [`Error::StageFailed`] (or `None` for
//! the single-stage procedures) rather than treated as a bug. Every pipeline
//! can record a [`Trace`] of its stages.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coloring::{induced_coloring, Coloring};
use crate::equiv::{canonical_sorted, invariant_check, EquivKind};
use crate::error::{Error, Result};
use crate::search::find::{
    find_grid_pattern, find_homogeneous, find_mono_subspace, find_ram_homogeneous,
    is_level_homogeneous, is_mono_subspace, ParWitness,
};
use crate::space::{
    unrank_unchecked, validate_subspace, GridBound, GridPattern, PartialWord, Space, Subspace, Word,
};
use crate::subsets::{combinations, SubsetColoring};

pub const TRACE_FORMAT: &str = "parworks/trace/1";

/// Above this many words on `N` the count-vector well-definedness check is
/// skipped (and recorded as skipped in the trace).
pub const WELL_DEFINED_LIMIT: usize = 1 << 18;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub format: String,
    pub pipeline: String,
    pub stages: Vec<StageTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: String,
    pub input: Value,
    pub output: Value,
    pub verdict: String,
}

impl Trace {
    pub fn new(pipeline: &str) -> Self {
        Trace {
            format: TRACE_FORMAT.into(),
            pipeline: pipeline.into(),
            stages: Vec::new(),
        }
    }

    fn push(&mut self, stage: impl Into<String>, input: Value, output: Value, verdict: &str) {
        self.stages.push(StageTrace {
            stage: stage.into(),
            input,
            output,
            verdict: verdict.into(),
        });
    }
}

fn failed(stage: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::StageFailed {
        stage: stage.into(),
        reason: reason.into(),
    }
}

/// From a coloring `f` of `[n]^{<l+1}`, colors `[n]^l` by the tuple
/// `⟨f(u↾k) | 1 ≤ k ≤ l⟩`, takes a homogeneous `A ∈ [n]^{2l}` and returns
/// the first `l+1` elements of `A`.
pub fn ram_from_ramsey(f: &SubsetColoring, l: usize) -> Result<Option<Vec<usize>>> {
    if l == 0 || f.levels != (1..=l).collect::<Vec<_>>() {
        return Err(Error::BadParams(format!(
            "expected a coloring of every level 1..={l}, found levels {:?}",
            f.levels
        )));
    }
    if f.n < 2 * l {
        return Err(Error::BadParams(format!("need n ≥ 2l = {}, found {}", 2 * l, f.n)));
    }
    let colors = (0..l)
        .try_fold(1usize, |acc, _| acc.checked_mul(f.colors_n))
        .filter(|&c| c <= u32::MAX as usize)
        .ok_or_else(|| Error::BadParams("tuple color set too large".into()))?;
    let d = SubsetColoring::uniform(f.n, l, colors, |u| {
        (1..=l)
            .rev()
            .fold(0u32, |acc, k| acc * f.colors_n as u32 + f.color(&u[..k]))
    })?;
    Ok(find_homogeneous(&d, 2 * l)?.map(|a| a[..=l].to_vec()))
}

/// The classifying coloring of `[n]^{<m}`: `u` is colored by the table
/// `β̄ ↦ c(η_{α,β̄,u})` over all `β̄ ∈ U_{|u|,Λ}`. Distinct tables get
/// consecutive ids per level in order of first appearance.
pub fn classifying_coloring(c: &Coloring, alpha: usize, m: usize) -> Result<SubsetColoring> {
    let space = c.space();
    let (n, k) = (space.length, space.alphabet);
    if alpha >= k {
        return Err(Error::BadParams(format!("letter {alpha} outside alphabet of size {k}")));
    }
    let pow: Vec<usize> = (0..n).map(|a| k.pow(a as u32)).collect();
    let base: usize = pow.iter().map(|p| alpha * p).sum();
    let levels: Vec<usize> = (1..m).collect();
    let mut ids: Vec<HashMap<Vec<u32>, u32>> = vec![HashMap::new(); levels.len()];
    let mut tables = Vec::with_capacity(levels.len());
    for &r in &levels {
        let mut table = vec![0; crate::subsets::binomial(n, r)];
        let betas = k.pow(r as u32);
        for u in combinations(n, r) {
            let key: Vec<u32> = (0..betas)
                .map(|b| {
                    let beta = unrank_unchecked(b, r, k);
                    let rank = u
                        .iter()
                        .zip(beta.letters())
                        .fold(base, |acc, (&a, &x)| acc - alpha * pow[a] + x * pow[a]);
                    c.color_at(rank)
                })
                .collect();
            let level_ids = &mut ids[r - 1];
            let next = level_ids.len() as u32;
            table[crate::subsets::colex_rank(&u)] = *level_ids.entry(key).or_insert(next);
        }
        tables.push(table);
    }
    let colors_n = ids.iter().map(|m| m.len()).max().unwrap_or(0).max(1);
    Ok(SubsetColoring {
        n,
        levels,
        colors_n,
        tables,
    })
}

/// `N ∈ [n]^m` level-homogeneous for the classifying coloring, returned as
/// the `≡_α` witness with identity injection and constant-`α` fill.
pub fn par_alpha_extract(c: &Coloring, alpha: usize, m: usize) -> Result<Option<ParWitness>> {
    let n = c.space().length;
    if m > n {
        return Err(Error::BadParams(format!("witness size {m} exceeds ground {n}")));
    }
    let f = classifying_coloring(c, alpha, m)?;
    Ok(find_ram_homogeneous(&f, m).map(|set| {
        let fill = PartialWord::constant((0..n).filter(|a| !set.contains(a)), alpha);
        ParWitness {
            ground: n,
            injection: set,
            fill,
            kind: EquivKind::AlphaIso { base: alpha },
        }
    }))
}

/// One pair `(N_l, ρ_l)` of the downward chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub level: usize,
    pub subset: Vec<usize>,
    pub fill: PartialWord,
}

/// Links ordered by level `0..=k`; link `k` is `(M, ∅)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParChain {
    pub links: Vec<ChainLink>,
}

impl ParChain {
    pub fn bottom(&self) -> &ChainLink {
        &self.links[0]
    }

    /// The `E_N` witness `(N_0, id, ρ_0)`.
    pub fn witness(&self, ground: usize) -> ParWitness {
        let b = self.bottom();
        ParWitness {
            ground,
            injection: b.subset.clone(),
            fill: b.fill.clone(),
            kind: EquivKind::FullSym,
        }
    }
}

/// Stage sizes `m_0 ≤ .. ≤ m_{k-1}` interpolated linearly between `m0` and
/// the ground size.
pub fn default_chain_sizes(ground: usize, m0: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|l| m0 + (ground.saturating_sub(m0)) * l / k)
        .collect()
}

/// Builds the chain `(N_l, ρ_l)` for `l = k-1` down to `0` without checking
/// the final witness. `sizes[l]` is `m_l`.
pub fn par_full_chain(c: &Coloring, sizes: &[usize], trace: Option<&mut Trace>) -> Result<ParChain> {
    let space = c.space();
    let (ground, k) = (space.length, space.alphabet);
    if sizes.len() != k {
        return Err(Error::BadParams(format!("need {k} stage sizes, found {}", sizes.len())));
    }
    if sizes.windows(2).any(|p| p[0] > p[1]) || sizes.last().is_some_and(|&s| s > ground) {
        return Err(Error::BadParams(format!(
            "stage sizes {sizes:?} must be non-decreasing and at most {ground}"
        )));
    }
    let mut local = Trace::new("par_full");
    let mut links = vec![ChainLink {
        level: k,
        subset: (0..ground).collect(),
        fill: PartialWord::new(),
    }];
    for l in (0..k).rev() {
        let upper = links.last().unwrap().clone();
        let induced = induced_coloring(c, &upper.fill)?;
        let stage = format!("alpha_{l}");
        let input = json!({ "alpha": l, "ground": upper.subset, "size": sizes[l] });
        let Some(w) = par_alpha_extract(&induced, l, sizes[l])? else {
            local.push(stage.clone(), input, Value::Null, "no homogeneous set");
            if let Some(t) = trace {
                t.stages.extend(local.stages);
            }
            return Err(failed(stage, format!("no ≡_{l}-homogeneous set of size {}", sizes[l])));
        };
        let subset: Vec<usize> = w.injection.iter().map(|&i| upper.subset[i]).collect();
        let mut fill = upper.fill.clone();
        for &a in &upper.subset {
            if !subset.contains(&a) {
                fill.insert(a, l);
            }
        }
        local.push(stage, input, json!({ "subset": subset }), "ok");
        links.push(ChainLink { level: l, subset, fill });
    }
    links.reverse();
    if let Some(t) = trace {
        t.stages.extend(local.stages);
    }
    Ok(ParChain { links })
}

/// First word `η` on `N_0` whose color under the `ρ_0` fill differs from
/// that of its sorted rearrangement, together with that rearrangement.
pub fn canonical_chain_violation(c: &Coloring, chain: &ParChain) -> Result<Option<(Word, Word)>> {
    let induced = induced_coloring(c, &chain.bottom().fill)?;
    for eta in induced.space().words() {
        let nu = canonical_sorted(&eta);
        if induced.color(&eta) != induced.color(&nu) {
            return Ok(Some((eta, nu)));
        }
    }
    Ok(None)
}

/// The result of [`par_full_extract`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParFull {
    pub chain: ParChain,
    pub witness: ParWitness,
}

/// [`par_full_chain`] followed by verification of the `E_{N_0}` witness:
/// invariance of the induced coloring and agreement with the sorted
/// representative of every class.
pub fn par_full_extract(c: &Coloring, sizes: &[usize], mut trace: Option<&mut Trace>) -> Result<ParFull> {
    let chain = par_full_chain(c, sizes, trace.as_deref_mut())?;
    let induced = induced_coloring(c, &chain.bottom().fill)?;
    let pair = invariant_check(&induced, &EquivKind::FullSym)?;
    let canon = canonical_chain_violation(c, &chain)?;
    let verdict = if pair.is_none() && canon.is_none() { "ok" } else { "violation" };
    if let Some(t) = trace {
        t.push(
            "verify",
            json!({ "subset": chain.bottom().subset }),
            json!({ "invariance": pair, "canonical": canon }),
            verdict,
        );
    }
    if let Some((a, b)) = pair.or(canon) {
        return Err(Error::ChainViolation(format!(
            "{a} and {b} are E_N-equivalent on N_0 = {:?} but colored differently",
            chain.bottom().subset
        )));
    }
    let witness = chain.witness(c.space().length);
    Ok(ParFull { chain, witness })
}

/// Sizes for [`hj_extract`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HjParams {
    /// Side of the count-vector space; the count coloring lives on
    /// `U_{k-1, n1}`.
    pub n1: usize,
    /// Stage sizes for the chain; `chain_sizes[0]` must be `k·n1`.
    /// Defaults to an interpolation from `k·n1` to the ground size.
    pub chain_sizes: Option<Vec<usize>>,
}

/// Output of [`hj_extract`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HjExtraction {
    pub subspace: Subspace,
    pub grid: GridPattern,
    pub par: ParFull,
    pub color: u32,
}

/// The word on `N` (indexed `0..|N|`) with `counts[e]` copies of letter `e`
/// for `e < h`, laid out in that order, and letter `h` elsewhere.
pub fn realizing_word(counts: &[usize], len: usize) -> Result<Word> {
    let h = counts.len();
    let total: usize = counts.iter().sum();
    if total > len {
        return Err(Error::BadParams(format!(
            "counts {counts:?} need {total} positions, only {len} available"
        )));
    }
    let mut letters = Vec::with_capacity(len);
    for (e, &n) in counts.iter().enumerate() {
        letters.extend(std::iter::repeat_n(e, n));
    }
    letters.resize(len, h);
    Ok(Word::new(letters))
}

/// A monochromatic convex `dim`-dimensional subspace built from a partition
/// witness and a monochromatic grid of count vectors.
pub fn hj_extract(
    c: &Coloring,
    dim: usize,
    params: &HjParams,
    mut trace: Option<&mut Trace>,
) -> Result<HjExtraction> {
    let space = c.space();
    let (n3, k) = (space.length, space.alphabet);
    if k < 2 || dim == 0 || params.n1 == 0 {
        return Err(Error::BadParams("hj_extract needs |Λ| ≥ 2, dim ≥ 1 and n1 ≥ 1".into()));
    }
    let h = k - 1;
    let n1 = params.n1;
    let n2 = k * n1;
    if n2 > n3 {
        return Err(Error::BadParams(format!("k·n1 = {n2} exceeds the ground {n3}")));
    }
    let sizes = params
        .chain_sizes
        .clone()
        .unwrap_or_else(|| default_chain_sizes(n3, n2, k));
    if sizes.first() != Some(&n2) {
        return Err(Error::BadParams(format!("chain_sizes[0] must equal k·n1 = {n2}")));
    }

    // Stage 1.
    let par = par_full_extract(c, &sizes, trace.as_deref_mut())?;
    let big_n = par.chain.bottom().subset.clone();
    let rho_star = par.chain.bottom().fill.clone();
    let on_n = induced_coloring(c, &rho_star)?;

    // Stage 2.
    let count_space = Space::new(h, n1)?;
    let c1 = Coloring::from_fn(count_space, c.colors(), |eta| {
        on_n.color(&realizing_word(eta.letters(), n2).expect("h·(n1-1) < k·n1"))
    })?;
    let words_on_n = on_n.space().size().unwrap_or(usize::MAX);
    let checked = words_on_n <= WELL_DEFINED_LIMIT;
    if checked {
        for rho in on_n.space().words() {
            let counts: Vec<usize> = (0..h).map(|e| rho.count(e)).collect();
            if counts.iter().all(|&x| x < n1) {
                let eta = Word::new(counts);
                if on_n.color(&rho) != c1.color(&eta) {
                    return Err(Error::WellDefinedness(format!(
                        "{rho} has count vector {eta} but its color differs from the class representative"
                    )));
                }
            }
        }
    }
    let side = dim + 1;
    let grid = find_grid_pattern(&c1, side, GridBound::Span);
    if let Some(t) = trace.as_deref_mut() {
        t.push(
            "count_grid",
            json!({ "dims": h, "n1": n1, "side": side, "well_defined_checked": checked }),
            json!({ "grid": grid }),
            if grid.is_some() { "ok" } else { "no grid" },
        );
    }
    let grid = grid.ok_or_else(|| failed("count_grid", format!("no monochromatic grid of side {side}")))?;
    let color = c1.color(&Word::new(grid.offsets.clone()));

    // Stage 3.
    let d = grid.difference;
    let mut fixed = rho_star.clone();
    let mut cursor = 0;
    for (e, &m_e) in grid.offsets.iter().enumerate() {
        for &a in &big_n[cursor..cursor + m_e] {
            fixed.insert(a, e);
        }
        cursor += m_e;
    }
    let mut blocks = Vec::with_capacity(dim);
    for _ in 0..dim {
        blocks.push(big_n[cursor..cursor + d].to_vec());
        cursor += d;
    }
    for &a in &big_n[cursor..] {
        fixed.insert(a, h);
    }
    let subspace = Subspace {
        length: n3,
        blocks,
        fixed,
    };
    let convex = validate_subspace(&subspace);
    let mono = is_mono_subspace(c, &subspace);
    if let Some(t) = trace {
        t.push(
            "assemble",
            json!({ "difference": d, "offsets": grid.offsets }),
            json!({ "subspace": subspace }),
            if convex.is_ok() && mono { "ok" } else { "invalid" },
        );
    }
    if let Err(v) = convex {
        return Err(failed("assemble", format!("layout is not a convex subspace: {v}")));
    }
    if !mono {
        return Err(failed("assemble", "assembled subspace is not monochromatic"));
    }
    Ok(HjExtraction {
        subspace,
        grid,
        par,
        color,
    })
}

/// A `dim`-dimensional subspace obtained through the packed alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReduction {
    pub subspace: Subspace,
    /// Whether the classes happen to be ordered as a convex subspace needs.
    pub convex: bool,
}

/// Reads `U_{m·n', Λ}` as `U_{n', Λ^m}` (position `b·m + j` is digit `j`
/// of packed letter `b`), finds a monochromatic line there and unpacks it:
/// class `j` collects digit `j` of every moving block.
pub fn hj_dim_reduce(c: &Coloring, m: usize) -> Result<DimReduction> {
    let space = c.space();
    let (len, k) = (space.length, space.alphabet);
    if m == 0 || len % m != 0 {
        return Err(Error::BadParams(format!("ground {len} is not a multiple of {m}")));
    }
    let packed_len = len / m;
    let packed_k = k
        .checked_pow(m as u32)
        .ok_or(Error::SpaceTooLarge { length: m, alphabet: k })?;
    // Little-endian ranks coincide, so the table carries over unchanged.
    let packed = Coloring::from_table(Space::new(packed_len, packed_k)?, c.colors(), c.table().to_vec())?;
    let line = find_mono_subspace(&packed, 1).ok_or_else(|| failed("packed_line", "no monochromatic line"))?;
    let moving = &line.blocks[0];
    let blocks: Vec<Vec<usize>> = (0..m).map(|j| moving.iter().map(|&b| b * m + j).collect()).collect();
    let mut fixed = PartialWord::new();
    for (b, letter) in line.fixed.iter() {
        for (j, &x) in unrank_unchecked(letter, m, k).letters().iter().enumerate() {
            fixed.insert(b * m + j, x);
        }
    }
    let subspace = Subspace { length: len, blocks, fixed };
    let convex = validate_subspace(&subspace).is_ok();
    Ok(DimReduction { subspace, convex })
}

/// `B` from [`ram_from_ramsey`] passes the level-homogeneity validator.
pub fn check_ram_output(f: &SubsetColoring, b: &[usize]) -> bool {
    is_level_homogeneous(f, b)
}
