//! C-colorings of `U_{M,Λ}`.
//!
//! A [`Coloring`] is always materialized as a dense table indexed by word
//! rank. Colorings built from a generator family remember it so they can be
//! written back out in generator form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{PartialWord, Space, Word};

pub const COLORING_FORMAT: &str = "parworks/coloring/1";

/// A generator family of colorings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    /// Every word gets `value`.
    Constant { value: u32 },
    /// `|η^{-1}{base}| mod 2`.
    Parity { base: usize },
    /// Word of rank `r` gets `splitmix64(seed, r) mod |C|`.
    Random { seed: u64 },
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The `index`-th output of a SplitMix64 stream started at `seed`.
///
/// This is the file-format generator for [`Family::Random`]: state
/// `seed + (index+1)·0x9E3779B97F4A7C15`, followed by the standard
/// SplitMix64 finalizer.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Family {
    fn check(&self, space: Space, colors: usize) -> Result<()> {
        match *self {
            Family::Constant { value } if value as usize >= colors => Err(Error::BadParams(
                format!("constant color {value} outside {colors} colors"),
            )),
            Family::Parity { .. } if colors < 2 => {
                Err(Error::BadParams("parity needs at least two colors".into()))
            }
            Family::Parity { base } if base >= space.alphabet => Err(Error::BadParams(format!(
                "base letter {base} outside alphabet of size {}",
                space.alphabet
            ))),
            _ => Ok(()),
        }
    }

    /// Color of one word, evaluated directly from the generator.
    pub fn eval(&self, w: &Word, rank: usize, colors: usize) -> u32 {
        match *self {
            Family::Constant { value } => value,
            Family::Parity { base } => (w.count(base) % 2) as u32,
            Family::Random { seed } => (splitmix64(seed, rank as u64) % colors as u64) as u32,
        }
    }
}

/// A total map `U_{m,k} → {0, .., |C|-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    space: Space,
    colors: usize,
    table: Vec<u32>,
    family: Option<Family>,
}

impl Coloring {
    pub fn from_table(space: Space, colors: usize, table: Vec<u32>) -> Result<Self> {
        if colors == 0 {
            return Err(Error::BadParams("color set must be non-empty".into()));
        }
        let size = space.size()?;
        if table.len() != size {
            return Err(Error::BadParams(format!(
                "table has {} entries, space has {size} words",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x as usize >= colors) {
            return Err(Error::BadParams(format!("color {bad} outside {colors} colors")));
        }
        Ok(Coloring {
            space,
            colors,
            table,
            family: None,
        })
    }

    pub fn from_fn(space: Space, colors: usize, f: impl Fn(&Word) -> u32) -> Result<Self> {
        let table = space.words().map(|w| f(&w)).collect();
        Coloring::from_table(space, colors, table)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn color(&self, w: &Word) -> u32 {
        self.table[self.space.rank(w)]
    }

    pub fn color_at(&self, rank: usize) -> u32 {
        self.table[rank]
    }

    pub fn to_file(&self) -> ColoringFile {
        let (table, family) = match &self.family {
            Some(f) => (None, Some(f.clone())),
            None => (Some(self.table.clone()), None),
        };
        ColoringFile {
            format: COLORING_FORMAT.into(),
            alphabet: self.space.alphabet,
            length: self.space.length,
            colors_n: self.colors,
            table,
            family,
        }
    }
}

pub fn make_coloring(space: Space, colors: usize, family: Family) -> Result<Coloring> {
    if colors == 0 {
        return Err(Error::BadParams("color set must be non-empty".into()));
    }
    family.check(space, colors)?;
    let table = space
        .words()
        .enumerate()
        .map(|(r, w)| family.eval(&w, r, colors))
        .collect();
    let mut c = Coloring::from_table(space, colors, table)?;
    c.family = Some(family);
    Ok(c)
}

/// Packs several colorings of one space into a single coloring with values
/// in the product color set, little-endian mixed radix (first coloring least
/// significant).
pub fn tuple_coloring(cs: &[Coloring]) -> Result<Coloring> {
    let first = cs
        .first()
        .ok_or_else(|| Error::BadParams("tuple of zero colorings".into()))?;
    if cs.iter().any(|c| c.space != first.space) {
        return Err(Error::SpaceMismatch);
    }
    let colors = cs
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.colors))
        .filter(|&n| n <= u32::MAX as usize)
        .ok_or_else(|| Error::BadParams("product color set too large".into()))?;
    let table = (0..first.table.len())
        .map(|r| {
            cs.iter()
                .rev()
                .fold(0u32, |acc, c| acc * c.colors as u32 + c.table[r])
        })
        .collect();
    Coloring::from_table(first.space, colors, table)
}

/// Inverse of the packing used by [`tuple_coloring`].
pub fn unpack_tuple(mut value: u32, radices: &[usize]) -> Vec<u32> {
    radices
        .iter()
        .map(|&r| {
            let digit = value % r as u32;
            value /= r as u32;
            digit
        })
        .collect()
}

/// `c_N(η) = c(η ∪ fill)`, where `N` is the complement of `fill`'s domain
/// listed in increasing order.
pub fn induced_coloring(c: &Coloring, fill: &PartialWord) -> Result<Coloring> {
    let m = c.space.length;
    if let Some(a) = fill.domain().find(|&a| a >= m) {
        return Err(Error::DomainMismatch(format!(
            "fill position {a} outside a ground of length {m}"
        )));
    }
    let free: Vec<usize> = (0..m).filter(|&a| !fill.contains(a)).collect();
    let sub = Space::new(free.len(), c.space.alphabet)?;
    let mut base = vec![0; m];
    for (a, x) in fill.iter() {
        base[a] = x;
    }
    let table = sub
        .words()
        .map(|eta| {
            let mut letters = base.clone();
            for (&a, &x) in free.iter().zip(eta.letters()) {
                letters[a] = x;
            }
            c.color(&Word::new(letters))
        })
        .collect();
    Coloring::from_table(sub, c.colors, table)
}

/// On-disk form of a coloring: either a dense table or a generator family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFile {
    pub format: String,
    pub alphabet: usize,
    pub length: usize,
    pub colors_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<u32>>,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

impl ColoringFile {
    pub fn into_coloring(self) -> Result<Coloring> {
        if self.format != COLORING_FORMAT {
            return Err(Error::BadParams(format!(
                "expected format {COLORING_FORMAT}, found {}",
                self.format
            )));
        }
        let space = Space::new(self.length, self.alphabet)?;
        match (self.table, self.family) {
            (Some(table), None) => Coloring::from_table(space, self.colors_n, table),
            (None, Some(family)) => make_coloring(space, self.colors_n, family),
            _ => Err(Error::BadParams(
                "coloring file needs exactly one of `table` or `family`".into(),
            )),
        }
    }
}
