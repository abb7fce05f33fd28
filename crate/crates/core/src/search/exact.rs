//! Exact partition numbers by adversarial backtracking.
//!
//! For each size `n` from the kind's floor upward, the engine searches for a
//! bad coloring (one admitting no witness). Points are colored in rank
//! order, colors are introduced in increasing order (quotienting by color
//! permutations), and a witness with exactly one uncolored point forbids the
//! color that would complete it.
//!
//! The tree is cut into prefix tasks at a fixed depth. Workers pull tasks
//! from a shared counter; the reported bad coloring is the one found under
//! the smallest prefix index, so results do not depend on the worker count.

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::instance::{CertColoring, Instance, NumberKind};

pub const CERTIFICATE_FORMAT: &str = "parworks/certificate/1";
pub const JOURNAL_FORMAT: &str = "parworks/journal/1";

const UNSET: u32 = u32::MAX;
const CHECK_EVERY: u64 = 4096;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub workers: usize,
    /// Number of leading points whose colors define one task.
    pub prefix_depth: usize,
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Give up (with `BudgetExceeded`) past this size.
    pub max_size: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub stop: Option<Arc<AtomicBool>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: 1,
            prefix_depth: 8,
            node_budget: None,
            time_budget: None,
            max_size: None,
            checkpoint: None,
            stop: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    pub tasks: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeOutcome {
    BadColoring,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub n: usize,
    pub outcome: SizeOutcome,
    #[serde(flatten)]
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub kind: NumberKind,
    pub value: usize,
    /// A coloring of the size `value - 1` instance admitting no witness.
    pub bad_coloring: Option<CertColoring>,
    /// Whether `bad_coloring` passed the independent witness finders.
    pub verified: bool,
    /// Search statistics at size `value`.
    pub exhaustion: SearchStats,
    pub sizes: Vec<SizeRecord>,
}

/// Result of searching one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeResult {
    pub n: usize,
    pub bad: Option<Vec<u32>>,
    pub stats: SearchStats,
}

pub fn exact_number(kind: &NumberKind, opts: &SearchOptions) -> Result<Certificate> {
    kind.validate()?;
    let control = Control::new(opts);
    let mut journal = match &opts.checkpoint {
        Some(path) => Some(Journal::open(path, kind, opts.prefix_depth)?),
        None => None,
    };
    let mut sizes = Vec::new();
    let mut last_bad: Option<(usize, Vec<u32>)> = None;
    let mut n = kind.floor();
    loop {
        if opts.max_size.is_some_and(|m| n > m) {
            return Err(Error::BudgetExceeded { at: n, lower: n, upper: None });
        }
        let res = search_size(kind, n, opts, &control, journal.as_mut())?;
        match res.bad {
            Some(table) => {
                sizes.push(SizeRecord { n, outcome: SizeOutcome::BadColoring, stats: res.stats });
                last_bad = Some((n, table));
                n += 1;
            }
            None => {
                sizes.push(SizeRecord { n, outcome: SizeOutcome::Exhausted, stats: res.stats });
                let (bad_coloring, verified) = match last_bad {
                    Some((m, table)) => {
                        let c = kind.decode(m, &table)?;
                        let ok = kind.verify_bad(&c)?;
                        (Some(c), ok)
                    }
                    None => (None, true),
                };
                return Ok(Certificate {
                    format: CERTIFICATE_FORMAT.into(),
                    kind: kind.clone(),
                    value: n,
                    bad_coloring,
                    verified,
                    exhaustion: res.stats,
                    sizes,
                });
            }
        }
    }
}

/// Searches the size-`n` instance for a bad coloring.
pub fn exact_size(kind: &NumberKind, n: usize, opts: &SearchOptions) -> Result<SizeResult> {
    kind.validate()?;
    let control = Control::new(opts);
    let mut journal = match &opts.checkpoint {
        Some(path) => Some(Journal::open(path, kind, opts.prefix_depth)?),
        None => None,
    };
    search_size(kind, n, opts, &control, journal.as_mut())
}

struct Control {
    nodes: AtomicU64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    stop: Option<Arc<AtomicBool>>,
}

impl Control {
    fn new(opts: &SearchOptions) -> Self {
        Control {
            nodes: AtomicU64::new(0),
            node_budget: opts.node_budget,
            deadline: opts.time_budget.map(|d| Instant::now() + d),
            stop: opts.stop.clone(),
        }
    }

    fn exceeded(&self, fresh: u64) -> bool {
        let total = self.nodes.fetch_add(fresh, Ordering::Relaxed) + fresh;
        self.node_budget.is_some_and(|b| total > b)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
    }
}

struct Compiled {
    points: usize,
    colors: usize,
    full: u64,
    witnesses: Vec<Vec<Vec<u32>>>,
    by_point: Vec<Vec<u32>>,
    /// Some witness is admitted by every coloring.
    trivial: bool,
}

impl Compiled {
    fn new(inst: Instance) -> Self {
        let witnesses: Vec<Vec<Vec<u32>>> = inst
            .witnesses
            .into_iter()
            .map(|w| w.into_iter().filter(|g| g.len() > 1).collect())
            .collect();
        let trivial = witnesses.iter().any(|w| w.is_empty());
        let mut by_point = vec![Vec::new(); inst.points];
        for (i, w) in witnesses.iter().enumerate() {
            let mut pts: Vec<u32> = w.iter().flatten().copied().collect();
            pts.sort_unstable();
            pts.dedup();
            for p in pts {
                by_point[p as usize].push(i as u32);
            }
        }
        let full = if inst.colors >= 64 { u64::MAX } else { (1u64 << inst.colors) - 1 };
        Compiled {
            points: inst.points,
            colors: inst.colors,
            full,
            witnesses,
            by_point,
            trivial,
        }
    }

    /// Canonical color sequences for the first `depth` points, in lex order.
    fn prefixes(&self, depth: usize) -> Vec<Vec<u32>> {
        fn go(colors: usize, depth: usize, used: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == depth {
                out.push(cur.clone());
                return;
            }
            for x in 0..colors.min(used + 1) {
                cur.push(x as u32);
                go(colors, depth, used.max(x + 1), cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(self.colors, depth.min(self.points), 0, &mut Vec::new(), &mut out);
        out
    }
}

enum Status {
    Open,
    Conflict,
    Force(u32, u32),
}

enum TaskEnd {
    Found(Vec<u32>),
    NotFound,
    Superseded,
    Aborted,
}

struct Solver<'a> {
    inst: &'a Compiled,
    control: &'a Control,
    best: &'a AtomicUsize,
    task: usize,
    color: Vec<u32>,
    forbid: Vec<u64>,
    trail: Vec<(u32, u64)>,
    nodes: u64,
    prunes: u64,
    pending: u64,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a Compiled, control: &'a Control, best: &'a AtomicUsize, task: usize) -> Self {
        Solver {
            inst,
            control,
            best,
            task,
            color: vec![UNSET; inst.points],
            forbid: vec![0; inst.points],
            trail: Vec::new(),
            nodes: 0,
            prunes: 0,
            pending: 0,
        }
    }

    fn eval(&self, w: usize) -> Status {
        let mut free = 0;
        let mut forced = (0, UNSET);
        for g in &self.inst.witnesses[w] {
            let mut gc = UNSET;
            let mut open = None;
            for &p in g {
                let c = self.color[p as usize];
                if c == UNSET {
                    free += 1;
                    open = Some(p);
                } else if gc == UNSET {
                    gc = c;
                } else if gc != c {
                    return Status::Open;
                }
            }
            if let Some(p) = open {
                forced = (p, gc);
            }
        }
        match free {
            0 => Status::Conflict,
            1 if forced.1 != UNSET => Status::Force(forced.0, forced.1),
            _ => Status::Open,
        }
    }

    fn assign(&mut self, p: usize, x: u32) -> bool {
        self.color[p] = x;
        for &w in &self.inst.by_point[p] {
            match self.eval(w as usize) {
                Status::Open => {}
                Status::Conflict => return false,
                Status::Force(q, y) => {
                    let q = q as usize;
                    let bit = 1u64 << y;
                    if self.forbid[q] & bit == 0 {
                        self.trail.push((q as u32, self.forbid[q]));
                        self.forbid[q] |= bit;
                        if self.forbid[q] & self.inst.full == self.inst.full {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize, p: usize) {
        while self.trail.len() > mark {
            let (q, old) = self.trail.pop().unwrap();
            self.forbid[q as usize] = old;
        }
        self.color[p] = UNSET;
    }

    fn tick(&mut self) -> Option<TaskEnd> {
        self.nodes += 1;
        self.pending += 1;
        if self.pending >= CHECK_EVERY {
            let fresh = std::mem::take(&mut self.pending);
            if self.control.exceeded(fresh) {
                return Some(TaskEnd::Aborted);
            }
            if self.best.load(Ordering::Relaxed) < self.task {
                return Some(TaskEnd::Superseded);
            }
        }
        None
    }

    fn run(&mut self, prefix: &[u32]) -> TaskEnd {
        let mut used = 0;
        for (i, &x) in prefix.iter().enumerate() {
            if self.forbid[i] & (1 << x) != 0 {
                self.prunes += 1;
                return TaskEnd::NotFound;
            }
            if let Some(end) = self.tick() {
                return end;
            }
            if !self.assign(i, x) {
                self.prunes += 1;
                return TaskEnd::NotFound;
            }
            used = used.max(x as usize + 1);
        }
        let end = self.dfs(prefix.len(), used);
        self.control.nodes.fetch_add(std::mem::take(&mut self.pending), Ordering::Relaxed);
        end
    }

    fn dfs(&mut self, i: usize, used: usize) -> TaskEnd {
        if i == self.inst.points {
            return TaskEnd::Found(self.color.clone());
        }
        for x in 0..self.inst.colors.min(used + 1) {
            if self.forbid[i] & (1 << x) != 0 {
                continue;
            }
            if let Some(end) = self.tick() {
                return end;
            }
            let mark = self.trail.len();
            if self.assign(i, x as u32) {
                match self.dfs(i + 1, used.max(x + 1)) {
                    TaskEnd::NotFound => {}
                    end => return end,
                }
            } else {
                self.prunes += 1;
            }
            self.undo(mark, i);
        }
        TaskEnd::NotFound
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct TaskRecord {
    n: usize,
    prefix: usize,
    nodes: u64,
    prunes: u64,
    found: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct JournalHeader {
    format: String,
    kind: NumberKind,
    prefix_depth: usize,
}

struct Journal {
    path: PathBuf,
    lines: Vec<String>,
    done: HashMap<(usize, usize), TaskRecord>,
}

impl Journal {
    fn open(path: &Path, kind: &NumberKind, prefix_depth: usize) -> Result<Self> {
        let header = JournalHeader {
            format: JOURNAL_FORMAT.into(),
            kind: kind.clone(),
            prefix_depth,
        };
        if !path.exists() {
            let journal = Journal {
                path: path.to_path_buf(),
                lines: vec![serde_json::to_string(&header)?],
                done: HashMap::new(),
            };
            journal.flush()?;
            return Ok(journal);
        }
        let text = fs::read_to_string(path)?;
        let mut lines: Vec<String> = text.lines().filter(|l| !l.trim().is_empty()).map(String::from).collect();
        let first = lines
            .first()
            .ok_or_else(|| Error::Checkpoint(format!("{} has no header", path.display())))?;
        let found: JournalHeader = serde_json::from_str(first)
            .map_err(|e| Error::Checkpoint(format!("bad header in {}: {e}", path.display())))?;
        if found.format != JOURNAL_FORMAT || found.kind != *kind || found.prefix_depth != prefix_depth {
            return Err(Error::Checkpoint(format!(
                "{} belongs to a different run (kind, parameters or prefix depth differ)",
                path.display()
            )));
        }
        let mut done = HashMap::new();
        let mut keep = 1;
        for line in &lines[1..] {
            match serde_json::from_str::<TaskRecord>(line) {
                Ok(rec) => {
                    done.insert((rec.n, rec.prefix), rec);
                    keep += 1;
                }
                // A torn final line from an interrupted write is dropped.
                Err(_) => break,
            }
        }
        lines.truncate(keep);
        Ok(Journal {
            path: path.to_path_buf(),
            lines,
            done,
        })
    }

    fn record(&mut self, rec: TaskRecord) -> Result<()> {
        self.lines.push(serde_json::to_string(&rec)?);
        self.done.insert((rec.n, rec.prefix), rec);
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        let mut tmp = self.path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let mut f = fs::File::create(&tmp)?;
            for line in &self.lines {
                writeln!(f, "{line}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

fn search_size(
    kind: &NumberKind,
    n: usize,
    opts: &SearchOptions,
    control: &Control,
    journal: Option<&mut Journal>,
) -> Result<SizeResult> {
    let inst = Compiled::new(kind.instance(n)?);
    if inst.trivial {
        return Ok(SizeResult { n, bad: None, stats: SearchStats::default() });
    }
    let prefixes = inst.prefixes(opts.prefix_depth);
    let mut results: Vec<Option<TaskRecord>> = vec![None; prefixes.len()];
    let best = AtomicUsize::new(usize::MAX);
    if let Some(j) = &journal {
        for (i, slot) in results.iter_mut().enumerate() {
            if let Some(rec) = j.done.get(&(n, i)) {
                if rec.found.is_some() {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                *slot = Some(rec.clone());
            }
        }
    }

    let journal = Mutex::new(journal);
    let slots = Mutex::new(results);
    let next = AtomicUsize::new(0);
    let aborted = AtomicBool::new(false);
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let workers = opts.workers.max(1);

    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= prefixes.len() || aborted.load(Ordering::Relaxed) {
                    break;
                }
                if slots.lock().unwrap()[i].is_some() || best.load(Ordering::Relaxed) < i {
                    continue;
                }
                if control.exceeded(0) {
                    aborted.store(true, Ordering::Relaxed);
                    break;
                }
                let mut solver = Solver::new(&inst, control, &best, i);
                let found = match solver.run(&prefixes[i]) {
                    TaskEnd::Found(t) => {
                        best.fetch_min(i, Ordering::Relaxed);
                        Some(t)
                    }
                    TaskEnd::NotFound => None,
                    TaskEnd::Superseded => continue,
                    TaskEnd::Aborted => {
                        aborted.store(true, Ordering::Relaxed);
                        break;
                    }
                };
                let rec = TaskRecord {
                    n,
                    prefix: i,
                    nodes: solver.nodes,
                    prunes: solver.prunes,
                    found,
                };
                if let Some(j) = journal.lock().unwrap().as_mut() {
                    if let Err(e) = j.record(rec.clone()) {
                        failure.lock().unwrap().get_or_insert(e);
                        aborted.store(true, Ordering::Relaxed);
                    }
                }
                slots.lock().unwrap()[i] = Some(rec);
            });
        }
    });

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let results = slots.into_inner().unwrap();
    let mut stats = SearchStats::default();
    for slot in &results {
        let Some(rec) = slot else {
            return Err(Error::BudgetExceeded { at: n, lower: n, upper: None });
        };
        stats.nodes += rec.nodes;
        stats.prunes += rec.prunes;
        stats.tasks += 1;
        if let Some(t) = &rec.found {
            return Ok(SizeResult { n, bad: Some(t.clone()), stats });
        }
    }
    if aborted.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { at: n, lower: n, upper: None });
    }
    Ok(SizeResult { n, bad: None, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(workers: usize) -> SearchOptions {
        SearchOptions { workers, ..SearchOptions::default() }
    }

    #[test]
    fn small_values() {
        let hj = exact_number(&NumberKind::Hj { dim: 1, alphabet: 2, colors: 2 }, &opts(1)).unwrap();
        assert_eq!(hj.value, 2);
        assert!(hj.verified && hj.bad_coloring.is_some());
        let ram = exact_number(&NumberKind::Ram { target: 2, below: 2, colors: 2 }, &opts(1)).unwrap();
        assert_eq!(ram.value, 3);
        let one = exact_number(&NumberKind::Hj { dim: 1, alphabet: 2, colors: 1 }, &opts(1)).unwrap();
        assert_eq!((one.value, one.bad_coloring), (1, None));
    }

    #[test]
    fn ramsey_and_vdw() {
        let r = exact_number(&NumberKind::Ramsey { target: 3, tuple: 2, colors: 2 }, &opts(2)).unwrap();
        assert_eq!(r.value, 6);
        assert!(r.verified);
        let w = exact_number(&NumberKind::Vdw { dims: 1, side: 3, colors: 2 }, &opts(2)).unwrap();
        assert_eq!(w.value, 9);
        assert!(w.verified);
    }

    #[test]
    fn worker_count_does_not_change_certificate() {
        let kind = NumberKind::Ramsey { target: 3, tuple: 2, colors: 2 };
        let a = exact_number(&kind, &SearchOptions { prefix_depth: 4, ..opts(1) }).unwrap();
        let b = exact_number(&kind, &SearchOptions { prefix_depth: 4, ..opts(8) }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn node_budget_reports_bracket() {
        let kind = NumberKind::Vdw { dims: 1, side: 4, colors: 2 };
        let o = SearchOptions { node_budget: Some(1000), ..opts(1) };
        match exact_number(&kind, &o) {
            Err(Error::BudgetExceeded { lower, .. }) => assert!(lower >= 4),
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn journal_rejects_other_runs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let a = NumberKind::Hj { dim: 1, alphabet: 2, colors: 2 };
        let o = SearchOptions { checkpoint: Some(path.clone()), ..opts(1) };
        exact_number(&a, &o).unwrap();
        let b = NumberKind::Hj { dim: 1, alphabet: 3, colors: 2 };
        assert!(matches!(exact_number(&b, &o), Err(Error::Checkpoint(_))));
        // Resuming a finished run replays it from the journal alone.
        let again = exact_number(&a, &o).unwrap();
        assert_eq!(again.value, 2);
    }
}
