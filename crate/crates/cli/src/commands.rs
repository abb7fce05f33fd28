use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use parworks::bounds::{
    f13_alpha_bound, f13_bound, gowers_w_bound, grzegorczyk_e, hj_bound, hj_bound_reduced, ram_bound,
    ramsey_r_bound, BigBound, BoundConfig, WValue,
};
use parworks::coloring::COLORING_FORMAT;
use parworks::equiv::invariant_check;
use parworks::pipelines::{
    hj_dim_reduce, hj_extract, par_alpha_extract, par_full_extract, ram_from_ramsey, HjParams, ParChain, Trace,
};
use parworks::search::find::{
    check_par_witness, find_grid_pattern, find_homogeneous, find_mono_subspace, find_par_witness,
    find_ram_homogeneous, is_level_homogeneous, is_mono_grid, singleton_counterexample_check, InjectionScope,
    ParWitness,
};
use parworks::space::enumerate_subspace;
use parworks::subsets::{SubsetColoringFile, SUBSET_COLORING_FORMAT};
use parworks::{
    exact_number, make_coloring, Coloring, ColoringFile, EquivKind, Error, Family, GridBound, GridPattern,
    NumberKind, SearchOptions, Space, SubsetColoring, Subspace,
};

use crate::args::{
    BoundArgs, BoundKind, CheckArgs, Cli, Command, EquivName, ExactArgs, ExactKind, FamilyName, Finder, GenArgs,
    Generator, WitnessArgs,
};
use crate::{BUDGET, NONE, OK, USAGE};

pub const WITNESS_FORMAT: &str = "parworks/witness/1";
pub const BOUND_FORMAT: &str = "parworks/bound/1";

/// Prints a line to stdout. A closed pipe (`parworks ... | head`) is not an
/// error worth reporting.
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($t)*);
    }};
}

pub fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Witness(a) => witness(a),
        Command::Exact(a) => exact(a),
        Command::Bound(a) => bound(a),
        Command::Check(a) => check(a),
    }
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => BUDGET,
        Some(Error::StageFailed { .. } | Error::WellDefinedness(_) | Error::ChainViolation(_)) => NONE,
        _ => USAGE,
    }
}

fn emit(json: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(json)?;
    match output {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            say!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn family(g: &Generator) -> Result<Family> {
    Ok(match g.family.ok_or_else(|| anyhow!("--family is required without --input"))? {
        FamilyName::Constant => Family::Constant { value: g.value },
        FamilyName::Parity => Family::Parity { base: g.base },
        FamilyName::Random => Family::Random { seed: g.seed },
    })
}

fn generated(g: &Generator) -> Result<Coloring> {
    let length = g.length.ok_or_else(|| anyhow!("--length is required without --input"))?;
    Ok(make_coloring(Space::new(length, g.alphabet)?, g.colors, family(g)?)?)
}

enum Input {
    Words(Coloring),
    Subsets(SubsetColoring),
}

fn load(path: &Path) -> Result<Input> {
    let v = read_json(path)?;
    match v.get("format").and_then(Value::as_str) {
        Some(COLORING_FORMAT) => Ok(Input::Words(serde_json::from_value::<ColoringFile>(v)?.into_coloring()?)),
        Some(SUBSET_COLORING_FORMAT) => {
            Ok(Input::Subsets(serde_json::from_value::<SubsetColoringFile>(v)?.into_coloring()?))
        }
        other => bail!("{}: unknown format {other:?}", path.display()),
    }
}

fn load_words(path: &Path) -> Result<Coloring> {
    match load(path)? {
        Input::Words(c) => Ok(c),
        Input::Subsets(_) => bail!("{}: expected a word coloring", path.display()),
    }
}

fn load_subsets(path: &Path) -> Result<SubsetColoring> {
    match load(path)? {
        Input::Subsets(c) => Ok(c),
        Input::Words(_) => bail!("{}: expected a subset coloring", path.display()),
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    if let Some(levels) = a.subset_levels {
        let n = a.n.ok_or_else(|| anyhow!("--n is required with --subset-levels"))?;
        let c = SubsetColoring::random(n, levels, a.source.colors, a.source.seed)?;
        emit(&c.to_file(), a.output.as_deref())?;
        return Ok(OK);
    }
    let c = generated(&a.source)?;
    let mut file = c.to_file();
    if a.dense {
        file.family = None;
        file.table = Some(c.table().to_vec());
    }
    emit(&file, a.output.as_deref())?;
    Ok(OK)
}

/// What a witness file holds; exactly one of the witness fields is set when
/// `found` is true.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct WitnessFile {
    pub format: String,
    pub finder: String,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Subspace>,
    /// False for interleaved subspaces from the packed-alphabet reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convex: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridPattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<GridBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par: Option<ParWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ParChain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn finder_name(f: Finder) -> &'static str {
    match f {
        Finder::Subspace => "subspace",
        Finder::Grid => "grid",
        Finder::Par => "par",
        Finder::Homogeneous => "homogeneous",
        Finder::RamHomogeneous => "ram_homogeneous",
        Finder::RamFromRamsey => "ram_from_ramsey",
        Finder::ParAlpha => "par_alpha",
        Finder::ParFull => "par_full",
        Finder::Hj => "hj",
        Finder::DimReduce => "dim_reduce",
    }
}

fn equiv_kind(e: EquivName, base: usize) -> EquivKind {
    match e {
        EquivName::Full => EquivKind::FullSym,
        EquivName::Alpha => EquivKind::AlphaIso { base },
    }
}

fn witness(a: WitnessArgs) -> Result<u8> {
    let mut out = WitnessFile {
        format: WITNESS_FORMAT.into(),
        finder: finder_name(a.find).into(),
        ..Default::default()
    };
    let words = || match &a.input {
        Some(p) => load_words(p),
        None => generated(&a.source),
    };
    let subsets = || {
        a.input
            .as_deref()
            .ok_or_else(|| anyhow!("--input with a subset coloring is required"))
            .and_then(load_subsets)
    };
    let mut trace: Option<Trace> = None;
    match a.find {
        Finder::Subspace => out.subspace = find_mono_subspace(&words()?, a.dim),
        Finder::Grid => {
            let bound = if a.strict { GridBound::Strict } else { GridBound::Span };
            out.grid = find_grid_pattern(&words()?, a.side, bound);
            out.bound = Some(bound);
        }
        Finder::Par => {
            let scope = if a.all_injections { InjectionScope::All } else { InjectionScope::OrderPreserving };
            out.par = find_par_witness(&words()?, a.size, &equiv_kind(a.equiv, a.alpha), scope)?;
        }
        Finder::Homogeneous => out.set = find_homogeneous(&subsets()?, a.target)?,
        Finder::RamHomogeneous => out.set = find_ram_homogeneous(&subsets()?, a.target),
        Finder::RamFromRamsey => out.set = ram_from_ramsey(&subsets()?, a.l)?,
        Finder::ParAlpha => out.par = par_alpha_extract(&words()?, a.alpha, a.size)?,
        Finder::ParFull => {
            let c = words()?;
            let sizes = a.sizes.clone().ok_or_else(|| anyhow!("--sizes is required for par-full"))?;
            let mut t = Trace::new("par_full");
            match par_full_extract(&c, &sizes, Some(&mut t)) {
                Ok(p) => {
                    out.par = Some(p.witness);
                    out.chain = Some(p.chain);
                }
                Err(e @ Error::StageFailed { .. }) => out.reason = Some(e.to_string()),
                Err(e) => return Err(e.into()),
            }
            trace = Some(t);
        }
        Finder::Hj => {
            let c = words()?;
            let params = HjParams { n1: a.n1, chain_sizes: a.sizes.clone() };
            let mut t = Trace::new("hj");
            match hj_extract(&c, a.dim, &params, Some(&mut t)) {
                Ok(x) => {
                    out.subspace = Some(x.subspace);
                    out.convex = Some(true);
                }
                Err(e @ Error::StageFailed { .. }) => out.reason = Some(e.to_string()),
                Err(e) => return Err(e.into()),
            }
            trace = Some(t);
        }
        Finder::DimReduce => match hj_dim_reduce(&words()?, a.dim) {
            Ok(r) => {
                out.subspace = Some(r.subspace);
                out.convex = Some(r.convex);
            }
            Err(e @ Error::StageFailed { .. }) => out.reason = Some(e.to_string()),
            Err(e) => return Err(e.into()),
        },
    }
    out.found = out.subspace.is_some() || out.grid.is_some() || out.par.is_some() || out.set.is_some();
    if let (Some(path), Some(t)) = (&a.trace, &trace) {
        emit(t, Some(path))?;
    }
    emit(&out, a.output.as_deref())?;
    Ok(if out.found { OK } else { NONE })
}

fn number_kind(a: &ExactArgs) -> NumberKind {
    match a.kind {
        ExactKind::Hj => NumberKind::Hj { dim: a.dim, alphabet: a.alphabet, colors: a.colors },
        ExactKind::Vdw => NumberKind::Vdw { dims: a.dim, side: a.side, colors: a.colors },
        ExactKind::Ramsey => NumberKind::Ramsey { target: a.target, tuple: a.tuple, colors: a.colors },
        ExactKind::Ram => NumberKind::Ram { target: a.target, below: a.below, colors: a.colors },
        ExactKind::F13Alpha => NumberKind::F13Alpha {
            size: a.target,
            alphabet: a.alphabet,
            base: a.base,
            colors: a.colors,
        },
        ExactKind::F13 => NumberKind::F13 { size: a.target, alphabet: a.alphabet, colors: a.colors },
    }
}

fn exact(a: ExactArgs) -> Result<u8> {
    if a.workers == 0 {
        bail!("--workers must be positive");
    }
    if a.node_budget == Some(0) || a.time_budget.is_some_and(|t| t <= 0.0) {
        bail!("budgets must be positive");
    }
    if a.checkpoint.is_some() && a.checkpoint == a.output {
        bail!("--checkpoint and --output must differ");
    }
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    // A second handler cannot be installed in the same process; ignore that.
    let _ = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst));
    let opts = SearchOptions {
        workers: a.workers,
        prefix_depth: a.prefix_depth,
        node_budget: a.node_budget,
        time_budget: a.time_budget.map(Duration::from_secs_f64),
        max_size: a.max_size,
        checkpoint: a.checkpoint.clone(),
        stop: Some(stop),
    };
    let kind = number_kind(&a);
    match exact_number(&kind, &opts) {
        Ok(cert) => {
            say!("{}", cert.value);
            if let Some(path) = &a.output {
                emit(&cert, Some(path))?;
            } else {
                emit(&cert, None)?;
            }
            Ok(OK)
        }
        Err(e @ Error::BudgetExceeded { .. }) => {
            eprintln!("{e}");
            if let Some(p) = &a.checkpoint {
                eprintln!("progress kept in {}; rerun with the same flags to resume", p.display());
            }
            Ok(BUDGET)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct BoundOutput<'a> {
    format: &'a str,
    kind: String,
    rendered: String,
    bound: &'a BigBound,
}

fn bound(a: BoundArgs) -> Result<u8> {
    let cfg = BoundConfig { digit_budget: a.digit_budget, ..BoundConfig::default() };
    let w = match (&a.w, &a.w_atom, a.w_gowers) {
        (Some(v), _, _) => Some(WValue::Exact(*v)),
        (_, Some(name), _) => Some(WValue::Atom(name.clone())),
        (_, _, true) => Some(WValue::Gowers),
        _ => None,
    };
    let b = match a.kind {
        BoundKind::E => {
            let args = a
                .x
                .iter()
                .map(|s| BigUint::from_str(s).map_err(|e| anyhow!("bad argument {s:?}: {e}")))
                .collect::<Result<Vec<_>>>()?;
            grzegorczyk_e(a.n, &args, &cfg)?
        }
        BoundKind::Gowers => gowers_w_bound(a.r, a.m)?,
        BoundKind::R => ramsey_r_bound(a.m, a.l, a.colors, &cfg)?,
        BoundKind::Ram => ram_bound(a.l, a.colors, &cfg)?,
        BoundKind::F13Alpha => f13_alpha_bound(a.m, a.alphabet, a.colors, &cfg)?,
        BoundKind::F13 => f13_bound(a.m, a.alphabet, a.colors, &cfg)?,
        BoundKind::Hj => hj_bound(a.dim, a.alphabet, a.colors, w, &cfg)?,
        BoundKind::HjReduced => hj_bound_reduced(a.dim, a.alphabet, a.colors, w, &cfg)?,
    };
    if a.json {
        let out = BoundOutput {
            format: BOUND_FORMAT,
            kind: format!("{:?}", a.kind).to_lowercase(),
            rendered: b.to_string(),
            bound: &b,
        };
        emit(&out, None)?;
    } else {
        say!("{b}");
    }
    Ok(OK)
}

fn check(a: CheckArgs) -> Result<u8> {
    if a.counterexample {
        return Ok(match singleton_counterexample_check(a.m, a.alphabet, a.base)? {
            None => {
                say!("no singleton-block subspace monochromatic");
                OK
            }
            Some(s) => {
                say!("monochromatic singleton-block subspace: {}", serde_json::to_string(&s)?);
                NONE
            }
        });
    }
    let coloring = a.coloring.as_deref().ok_or_else(|| anyhow!("--coloring is required"))?;
    if a.invariant {
        let c = load_words(coloring)?;
        return Ok(match invariant_check(&c, &equiv_kind(a.equiv, a.base))? {
            None => {
                say!("invariant");
                OK
            }
            Some((x, y)) => {
                say!("not invariant: {x} and {y} are related but colored differently");
                NONE
            }
        });
    }
    let path = a.witness.as_deref().ok_or_else(|| anyhow!("one of --counterexample, --invariant or --witness is required"))?;
    let w: WitnessFile = serde_json::from_value(read_json(path)?)?;
    if w.format != WITNESS_FORMAT {
        bail!("{}: expected format {WITNESS_FORMAT}", path.display());
    }
    let verdict: std::result::Result<(), String> = if let Some(s) = &w.subspace {
        let c = load_words(coloring)?;
        let in_range = s.blocks.iter().flatten().all(|&a| a < s.length) && s.fixed.iter().all(|(a, _)| a < s.length);
        let structure = match w.convex {
            Some(false) => Ok(()),
            _ => parworks::space::validate_subspace(s),
        };
        let colors = || -> Vec<u32> {
            enumerate_subspace(s, c.space().alphabet).iter().map(|x| c.color(x)).collect()
        };
        if s.length != c.space().length || !in_range {
            Err("subspace and coloring have different grounds".into())
        } else if let Err(e) = structure {
            Err(format!("not a convex subspace: {e}"))
        } else if colors().windows(2).any(|p| p[0] != p[1]) {
            Err("subspace is not monochromatic".into())
        } else {
            Ok(())
        }
    } else if let Some(g) = &w.grid {
        let c = load_words(coloring)?;
        is_mono_grid(&c, g, w.bound.unwrap_or_default())
            .then_some(())
            .ok_or_else(|| "grid is not monochromatic".into())
    } else if let Some(p) = &w.par {
        let c = load_words(coloring)?;
        match check_par_witness(&c, p)? {
            None => Ok(()),
            Some((x, y)) => Err(format!("{x} and {y} are related but colored differently")),
        }
    } else if let Some(set) = &w.set {
        let f = load_subsets(coloring)?;
        is_level_homogeneous(&f, set)
            .then_some(())
            .ok_or_else(|| "set is not homogeneous".into())
    } else {
        Err("the witness file records no witness".into())
    };
    Ok(match verdict {
        Ok(()) => {
            say!("valid");
            OK
        }
        Err(why) => {
            say!("invalid: {why}");
            NONE
        }
    })
}
