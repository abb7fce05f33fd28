//! Finite subsets `[n]^r`, `[n]^{<l}` and colorings of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUBSET_COLORING_FORMAT: &str = "parworks/subset-coloring/1";

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank `Σ_i C(u_i, i+1)` of an increasing sequence.
pub fn colex_rank(u: &[usize]) -> usize {
    u.iter().enumerate().map(|(i, &x)| binomial(x, i + 1)).sum()
}

/// All `r`-subsets of `{0, .., n-1}` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Combinations {
    Combinations {
        n,
        current: if r <= n { Some((0..r).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let r = out.len();
        let mut next = out.clone();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - (r - i) {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

/// A coloring of the subsets of `{0, .., n-1}` whose sizes are listed in
/// `levels` (ascending). `tables[i][colex_rank(u)]` colors `u` with
/// `|u| = levels[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetColoring {
    pub n: usize,
    pub levels: Vec<usize>,
    pub colors_n: usize,
    pub tables: Vec<Vec<u32>>,
}

impl SubsetColoring {
    pub fn from_fn(
        n: usize,
        levels: Vec<usize>,
        colors: usize,
        mut f: impl FnMut(&[usize]) -> u32,
    ) -> Result<Self> {
        if colors == 0 {
            return Err(Error::BadParams("color set must be non-empty".into()));
        }
        if levels.windows(2).any(|p| p[0] >= p[1]) || levels.first() == Some(&0) {
            return Err(Error::BadParams(format!(
                "levels {levels:?} must be positive and strictly increasing"
            )));
        }
        let mut tables = Vec::with_capacity(levels.len());
        for &r in &levels {
            let mut table = vec![0; binomial(n, r)];
            for u in combinations(n, r) {
                let x = f(&u);
                if x as usize >= colors {
                    return Err(Error::BadParams(format!("color {x} outside {colors} colors")));
                }
                table[colex_rank(&u)] = x;
            }
            tables.push(table);
        }
        Ok(SubsetColoring {
            n,
            levels,
            colors_n: colors,
            tables,
        })
    }

    /// A coloring of `[n]^l`.
    pub fn uniform(n: usize, l: usize, colors: usize, f: impl FnMut(&[usize]) -> u32) -> Result<Self> {
        SubsetColoring::from_fn(n, vec![l], colors, f)
    }

    /// A coloring of `[n]^{<l}`, i.e. of every size `1..l`.
    pub fn below(n: usize, l: usize, colors: usize, f: impl FnMut(&[usize]) -> u32) -> Result<Self> {
        SubsetColoring::from_fn(n, (1..l).collect(), colors, f)
    }

    /// Seeded pseudorandom coloring using the same SplitMix64 stream as
    /// word colorings, enumerated level by level in colex order.
    pub fn random(n: usize, levels: Vec<usize>, colors: usize, seed: u64) -> Result<Self> {
        let offsets: Vec<usize> = levels
            .iter()
            .scan(0, |acc, &r| {
                let o = *acc;
                *acc += binomial(n, r);
                Some(o)
            })
            .collect();
        let lv = levels.clone();
        SubsetColoring::from_fn(n, levels, colors, move |u| {
            let level = lv.iter().position(|&r| r == u.len()).unwrap();
            let idx = offsets[level] + colex_rank(u);
            (crate::coloring::splitmix64(seed, idx as u64) % colors as u64) as u32
        })
    }

    pub fn color(&self, u: &[usize]) -> u32 {
        let level = self
            .levels
            .iter()
            .position(|&r| r == u.len())
            .expect("subset size not among the coloring's levels");
        self.tables[level][colex_rank(u)]
    }

    pub fn has_level(&self, r: usize) -> bool {
        self.levels.contains(&r)
    }

    pub fn to_file(&self) -> SubsetColoringFile {
        SubsetColoringFile {
            format: SUBSET_COLORING_FORMAT.into(),
            coloring: self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetColoringFile {
    pub format: String,
    #[serde(flatten)]
    pub coloring: SubsetColoring,
}

impl SubsetColoringFile {
    pub fn into_coloring(self) -> Result<SubsetColoring> {
        if self.format != SUBSET_COLORING_FORMAT {
            return Err(Error::BadParams(format!(
                "expected format {SUBSET_COLORING_FORMAT}, found {}",
                self.format
            )));
        }
        let c = self.coloring;
        let tables = c.tables.clone();
        let rebuilt = SubsetColoring::from_fn(c.n, c.levels.clone(), c.colors_n, |_| 0)?;
        if rebuilt
            .tables
            .iter()
            .zip(&tables)
            .any(|(a, b)| a.len() != b.len())
            || tables.len() != rebuilt.tables.len()
        {
            return Err(Error::BadParams("subset coloring tables have the wrong sizes".into()));
        }
        if tables.iter().flatten().any(|&x| x as usize >= c.colors_n) {
            return Err(Error::BadParams("subset coloring uses an undeclared color".into()));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_lex_and_colex_bijective() {
        for n in 0..7 {
            for r in 0..=n + 1 {
                let all: Vec<_> = combinations(n, r).collect();
                assert_eq!(all.len(), binomial(n, r));
                let mut sorted = all.clone();
                sorted.sort();
                assert_eq!(all, sorted);
                let mut ranks: Vec<_> = all.iter().map(|u| colex_rank(u)).collect();
                ranks.sort();
                assert_eq!(ranks, (0..binomial(n, r)).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn subset_coloring_lookup() {
        let c = SubsetColoring::below(5, 3, 3, |u| (u.iter().sum::<usize>() % 3) as u32).unwrap();
        assert_eq!(c.levels, vec![1, 2]);
        assert_eq!(c.color(&[4]), 1);
        assert_eq!(c.color(&[1, 3]), 1);
        let r1 = SubsetColoring::random(6, vec![2], 2, 7).unwrap();
        let r2 = SubsetColoring::random(6, vec![2], 2, 7).unwrap();
        assert_eq!(r1, r2);
        let json = serde_json::to_string(&r1.to_file()).unwrap();
        let back: SubsetColoringFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_coloring().unwrap(), r1);
    }
}
