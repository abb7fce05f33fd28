//! Finite "witness families" for each partition number.
//!
//! At a given size `n` every number kind becomes a set of points to color
//! and a list of witnesses. A witness is a list of groups; a coloring admits
//! the witness when every group is monochromatic. A coloring admitting no
//! witness is *bad* and certifies that the number exceeds `n`.

use serde::{Deserialize, Serialize};

use crate::coloring::{Coloring, ColoringFile};
use crate::equiv::{class_labels, EquivKind};
use crate::error::{Error, Result};
use crate::search::find::{
    find_grid_pattern, find_homogeneous, find_mono_subspace, find_par_witness,
    find_ram_homogeneous, for_each_convex_subspace, subspace_ranks, InjectionScope,
};
use crate::space::{unrank_unchecked, GridBound, GridPattern, Space};
use crate::subsets::{binomial, colex_rank, combinations, SubsetColoring, SubsetColoringFile};

/// The partition numbers `exact_number` can compute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NumberKind {
    /// `W_C(h, m)`: least `n` such that every coloring of `U_{h,n}` has a
    /// monochromatic grid of side `m` (grid points inside `{0..n-1}`).
    Vdw { dims: usize, side: usize, colors: usize },
    /// `R(m, l, C)`: homogeneous `m`-sets for colorings of `[n]^l`.
    Ramsey { target: usize, tuple: usize, colors: usize },
    /// `RAM(m, <l, C)`: `m`-sets constant on each level of `[n]^{<l}`.
    Ram { target: usize, below: usize, colors: usize },
    /// `HJ_C(dim, Λ)`: monochromatic convex `dim`-dimensional subspaces.
    Hj { dim: usize, alphabet: usize, colors: usize },
    /// `f13_{Λ,α}(m, C)`.
    F13Alpha { size: usize, alphabet: usize, base: usize, colors: usize },
    /// `f13_Λ(m, C)` with order-preserving injections.
    F13 { size: usize, alphabet: usize, colors: usize },
}

impl NumberKind {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadParams(msg.into()));
        match *self {
            NumberKind::Vdw { dims, side, colors } if dims == 0 || side == 0 || colors == 0 => {
                bad("W_C needs h, m, |C| ≥ 1")
            }
            NumberKind::Ramsey { target, tuple, colors } if tuple == 0 || target < tuple || colors == 0 => {
                bad("R needs m ≥ l ≥ 1 and |C| ≥ 1")
            }
            NumberKind::Ram { target, below, colors } if target == 0 || below == 0 || colors == 0 => {
                bad("RAM needs m, l, |C| ≥ 1")
            }
            NumberKind::Hj { dim, alphabet, colors } if dim == 0 || alphabet == 0 || colors == 0 => {
                bad("HJ needs dim, |Λ|, |C| ≥ 1")
            }
            NumberKind::F13Alpha { size, alphabet, base, colors }
                if size == 0 || alphabet == 0 || colors == 0 || base >= alphabet =>
            {
                bad("f13_α needs m, |Λ|, |C| ≥ 1 and α ∈ Λ")
            }
            NumberKind::F13 { size, alphabet, colors } if size == 0 || alphabet == 0 || colors == 0 => {
                bad("f13 needs m, |Λ|, |C| ≥ 1")
            }
            _ if self.colors() > 64 => bad("at most 64 colors are supported"),
            _ => Ok(()),
        }
    }

    pub fn colors(&self) -> usize {
        match *self {
            NumberKind::Vdw { colors, .. }
            | NumberKind::Ramsey { colors, .. }
            | NumberKind::Ram { colors, .. }
            | NumberKind::Hj { colors, .. }
            | NumberKind::F13Alpha { colors, .. }
            | NumberKind::F13 { colors, .. } => colors,
        }
    }

    /// Smallest size the search starts from.
    pub fn floor(&self) -> usize {
        match *self {
            NumberKind::Vdw { side, .. } => side,
            NumberKind::Ramsey { target, .. } | NumberKind::Ram { target, .. } => target,
            NumberKind::Hj { dim, .. } => dim,
            NumberKind::F13Alpha { size, .. } | NumberKind::F13 { size, .. } => size,
        }
    }

    /// Whether the witness family is invariant under permuting letters.
    /// Only color permutations are exploited by the search; this records
    /// which kinds would also admit alphabet symmetry reduction.
    pub fn alphabet_symmetric(&self) -> bool {
        !matches!(self, NumberKind::F13Alpha { .. })
    }

    pub fn instance(&self, n: usize) -> Result<Instance> {
        self.validate()?;
        let colors = self.colors();
        let mut witnesses = Vec::new();
        let points = match *self {
            NumberKind::Vdw { dims, side, .. } => {
                let space = Space::new(dims, n)?;
                let size = space.size()?;
                for d in 1..n.max(2) {
                    if d * (side - 1) >= n {
                        break;
                    }
                    let top = n - d * (side - 1);
                    for r in 0..top.pow(dims as u32) {
                        let g = GridPattern {
                            difference: d,
                            offsets: unrank_unchecked(r, dims, top).into_letters(),
                            side,
                        };
                        let group = g.points().iter().map(|p| space.rank(p) as u32).collect();
                        witnesses.push(vec![group]);
                    }
                    if side == 1 {
                        break;
                    }
                }
                size
            }
            NumberKind::Ramsey { target, tuple, .. } => {
                for a in combinations(n, target) {
                    let group = combinations(target, tuple)
                        .map(|idx| colex_rank(&idx.iter().map(|&i| a[i]).collect::<Vec<_>>()) as u32)
                        .collect();
                    witnesses.push(vec![group]);
                }
                binomial(n, tuple)
            }
            NumberKind::Ram { target, below, .. } => {
                let offsets = level_offsets(n, below);
                for b in combinations(n, target) {
                    let groups = (1..below)
                        .filter(|&r| r <= target)
                        .map(|r| {
                            combinations(target, r)
                                .map(|idx| {
                                    let u: Vec<usize> = idx.iter().map(|&i| b[i]).collect();
                                    (offsets[r - 1] + colex_rank(&u)) as u32
                                })
                                .collect()
                        })
                        .collect();
                    witnesses.push(groups);
                }
                offsets.last().copied().unwrap_or(0)
            }
            NumberKind::Hj { dim, alphabet, .. } => {
                let size = Space::new(n, alphabet)?.size()?;
                for_each_convex_subspace(n, alphabet, dim, |s| {
                    witnesses.push(vec![subspace_ranks(s, alphabet)
                        .into_iter()
                        .map(|r| r as u32)
                        .collect()]);
                    false
                });
                size
            }
            NumberKind::F13Alpha { size, alphabet, base, .. } => {
                let total = Space::new(n, alphabet)?.size()?;
                let labels = class_labels(size, alphabet, &EquivKind::AlphaIso { base })?;
                for inj in combinations(n, size) {
                    let rest: Vec<usize> = (0..n).filter(|a| !inj.contains(a)).collect();
                    let fill: Vec<(usize, usize)> = rest.iter().map(|&a| (a, base)).collect();
                    witnesses.push(par_groups(&labels, &inj, &fill, size, alphabet));
                }
                total
            }
            NumberKind::F13 { size, alphabet, .. } => {
                let total = Space::new(n, alphabet)?.size()?;
                let labels = class_labels(size, alphabet, &EquivKind::FullSym)?;
                for inj in combinations(n, size) {
                    let rest: Vec<usize> = (0..n).filter(|a| !inj.contains(a)).collect();
                    for fill in Space::new(rest.len(), alphabet)?.words() {
                        let fill: Vec<(usize, usize)> =
                            rest.iter().copied().zip(fill.into_letters()).collect();
                        witnesses.push(par_groups(&labels, &inj, &fill, size, alphabet));
                    }
                }
                total
            }
        };
        Ok(Instance {
            points,
            colors,
            witnesses,
        })
    }

    /// Turns a point coloring of the size-`n` instance into the coloring
    /// object it stands for.
    pub fn decode(&self, n: usize, table: &[u32]) -> Result<CertColoring> {
        let colors = self.colors();
        Ok(match *self {
            NumberKind::Vdw { dims, .. } => {
                CertColoring::Words(Coloring::from_table(Space::new(dims, n)?, colors, table.to_vec())?.to_file())
            }
            NumberKind::Ramsey { tuple, .. } => CertColoring::Subsets(
                SubsetColoring {
                    n,
                    levels: vec![tuple],
                    colors_n: colors,
                    tables: vec![table.to_vec()],
                }
                .to_file(),
            ),
            NumberKind::Ram { below, .. } => {
                let tables = level_offsets(n, below)
                    .windows(2)
                    .map(|w| table[w[0]..w[1]].to_vec())
                    .collect();
                CertColoring::Subsets(
                    SubsetColoring {
                        n,
                        levels: (1..below).collect(),
                        colors_n: colors,
                        tables,
                    }
                    .to_file(),
                )
            }
            NumberKind::Hj { alphabet, .. }
            | NumberKind::F13Alpha { alphabet, .. }
            | NumberKind::F13 { alphabet, .. } => CertColoring::Words(
                Coloring::from_table(Space::new(n, alphabet)?, colors, table.to_vec())?.to_file(),
            ),
        })
    }

    /// Independent check, through the witness finders, that a coloring of
    /// the size-`n` instance admits no witness.
    pub fn verify_bad(&self, coloring: &CertColoring) -> Result<bool> {
        Ok(match (self, coloring) {
            (NumberKind::Vdw { side, .. }, CertColoring::Words(f)) => {
                find_grid_pattern(&f.clone().into_coloring()?, *side, GridBound::Span).is_none()
            }
            (NumberKind::Ramsey { target, .. }, CertColoring::Subsets(f)) => {
                find_homogeneous(&f.clone().into_coloring()?, *target)?.is_none()
            }
            (NumberKind::Ram { target, .. }, CertColoring::Subsets(f)) => {
                find_ram_homogeneous(&f.clone().into_coloring()?, *target).is_none()
            }
            (NumberKind::Hj { dim, .. }, CertColoring::Words(f)) => {
                find_mono_subspace(&f.clone().into_coloring()?, *dim).is_none()
            }
            (NumberKind::F13Alpha { size, base, .. }, CertColoring::Words(f)) => find_par_witness(
                &f.clone().into_coloring()?,
                *size,
                &EquivKind::AlphaIso { base: *base },
                InjectionScope::OrderPreserving,
            )?
            .is_none(),
            (NumberKind::F13 { size, .. }, CertColoring::Words(f)) => find_par_witness(
                &f.clone().into_coloring()?,
                *size,
                &EquivKind::FullSym,
                InjectionScope::OrderPreserving,
            )?
            .is_none(),
            _ => false,
        })
    }
}

/// Start offsets of the levels `1..below` in a concatenated table, followed
/// by the total length.
fn level_offsets(n: usize, below: usize) -> Vec<usize> {
    let mut out = vec![0];
    for r in 1..below {
        out.push(out[r - 1] + binomial(n, r));
    }
    out
}

fn par_groups(
    labels: &[usize],
    inj: &[usize],
    fill: &[(usize, usize)],
    size: usize,
    alphabet: usize,
) -> Vec<Vec<u32>> {
    let pow = |a: usize| alphabet.pow(a as u32);
    let base: usize = fill.iter().map(|&(a, x)| x * pow(a)).sum();
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); classes];
    for (r, &label) in labels.iter().enumerate() {
        let eta = unrank_unchecked(r, size, alphabet);
        let rank = base
            + inj
                .iter()
                .zip(eta.letters())
                .map(|(&a, &x)| x * pow(a))
                .sum::<usize>();
        groups[label].push(rank as u32);
    }
    groups.retain(|g| g.len() > 1);
    groups
}

/// A point-coloring problem: `points` points, `colors` colors, and the
/// witness family.
#[derive(Clone, Debug)]
pub struct Instance {
    pub points: usize,
    pub colors: usize,
    pub witnesses: Vec<Vec<Vec<u32>>>,
}

/// The coloring carried by a certificate, in its natural file form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertColoring {
    Words(ColoringFile),
    Subsets(SubsetColoringFile),
}
