//! Upper bounds for the partition numbers, evaluated exactly while they fit
//! in a digit budget and kept as expression trees beyond that.
//!
//! The Ramsey bound uses the end-homogeneous recurrence
//! `R(m, l, c) ≤ t·c^C(t-1, l-1)` with `t = R(m-1, l-1, c) + 1`, bottoming
//! out at `R(m, 1, c) = c(m-1) + 1`, `R(l, l, c) = l` and `R(m, l, 1) = m`.
//! Exact values can be plugged in through [`BoundConfig::ramsey`].

pub mod expr;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use expr::{atom, Comparison, Expr, Func, Lower};
use expr::{add, binom, call, e_exact, eval_exact, lower, mul, num, pow};

/// Past this many remaining iterations an unevaluated `E_n` is printed as a
/// single call rather than a nest.
const E_NEST_LIMIT: u64 = 16;

/// Largest `m` for which `RAM(<m, X)` is expanded through the Ramsey
/// recurrence.
const RAM_EXPAND_LIMIT: u64 = 7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownRamsey {
    pub m: u64,
    pub l: u64,
    pub c: u64,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundConfig {
    /// Exact values are kept up to this many decimal digits.
    pub digit_budget: usize,
    /// Exact Ramsey values used in place of the recurrence.
    pub ramsey: Vec<KnownRamsey>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            digit_budget: 1_000_000,
            ramsey: Vec::new(),
        }
    }
}

impl BoundConfig {
    pub fn max_bits(&self) -> u64 {
        (self.digit_budget as f64 * std::f64::consts::LOG2_10).ceil() as u64
    }

    /// Bit cap for lower-bound evaluation during comparisons.
    pub fn cap(&self) -> u64 {
        self.max_bits() + 64
    }

    fn known_ramsey(&self, m: u64, l: u64, c: u64) -> Option<u64> {
        self.ramsey
            .iter()
            .find(|r| (r.m, r.l, r.c) == (m, l, c))
            .map(|r| r.value)
    }
}

/// A bound that is either an exact integer or an unevaluated expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BigBound {
    Exact {
        #[serde(with = "expr::decimal")]
        value: BigUint,
    },
    Tower {
        expr: Expr,
        /// Estimated number of decimal digits, when it fits in an `f64`.
        digits: Option<f64>,
    },
}

impl BigBound {
    /// Folds `e` to an exact value when it fits the budget.
    pub fn from_expr(e: Expr, cfg: &BoundConfig) -> Self {
        let e = normalize(e, cfg.max_bits());
        match eval_exact(&e, cfg.max_bits()) {
            Some(value) => BigBound::Exact { value },
            None => Self::tower(e),
        }
    }

    /// Keeps `e` as written.
    pub fn tower(e: Expr) -> Self {
        let digits = expr::log10_estimate(&e).map(|d| d.floor() + 1.0);
        BigBound::Tower { expr: e, digits }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BigBound::Exact { value } => Some(value),
            BigBound::Tower { .. } => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            BigBound::Exact { value } => Expr::Num(value.clone()),
            BigBound::Tower { expr, .. } => expr.clone(),
        }
    }

    pub fn compare(&self, other: &BigBound, cfg: &BoundConfig) -> Comparison {
        expr::compare(&self.to_expr(), &other.to_expr(), cfg.cap())
    }

    /// Whether the bound is provably at least `v`.
    pub fn at_least(&self, v: impl Into<BigUint>, cfg: &BoundConfig) -> bool {
        *lower(&self.to_expr(), cfg.cap()).value() >= v.into()
    }
}

impl fmt::Display for BigBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigBound::Exact { value } => write!(f, "{value}"),
            BigBound::Tower { expr, .. } => write!(f, "{expr}"),
        }
    }
}

/// Folds every subtree whose operands are literals and whose value fits in
/// `max_bits`.
pub fn normalize(e: Expr, max_bits: u64) -> Expr {
    let folded = match e {
        Expr::Num(_) | Expr::Atom(_) => return e,
        Expr::Add(a, b) => add(normalize(*a, max_bits), normalize(*b, max_bits)),
        Expr::Mul(a, b) => mul(normalize(*a, max_bits), normalize(*b, max_bits)),
        Expr::Pow(a, b) => pow(normalize(*a, max_bits), normalize(*b, max_bits)),
        Expr::Binom(n, k) => binom(normalize(*n, max_bits), normalize(*k, max_bits)),
        Expr::Call(f, args) => call(f, args.into_iter().map(|a| normalize(a, max_bits)).collect()),
    };
    let literal_args = match &folded {
        Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Pow(a, b) | Expr::Binom(a, b) => {
            matches!(**a, Expr::Num(_)) && matches!(**b, Expr::Num(_))
        }
        Expr::Call(Func::E(_), args) => args.iter().all(|a| matches!(a, Expr::Num(_))),
        _ => false,
    };
    if literal_args {
        if let Some(v) = eval_exact(&folded, max_bits) {
            return Expr::Num(v);
        }
    }
    folded
}

fn big(v: u64) -> Expr {
    num(v)
}

fn as_u64(e: &Expr) -> Option<u64> {
    match e {
        Expr::Num(v) => v.to_u64(),
        _ => None,
    }
}

/// Grzegorczyk `E_n`: `E_0(x, y) = x + y`, `E_1(x) = x² + 2`,
/// `E_{n+2}(0) = 2` and `E_{n+2}(x+1) = E_{n+1}(E_{n+2}(x))`.
pub fn grzegorczyk_e(n: usize, args: &[BigUint], cfg: &BoundConfig) -> Result<BigBound> {
    let arity = if n == 0 { 2 } else { 1 };
    if args.len() != arity {
        return Err(Error::BadParams(format!("E_{n} takes {arity} argument(s), got {}", args.len())));
    }
    let max_bits = cfg.max_bits();
    if let Some(value) = e_exact(n, args, max_bits) {
        return Ok(BigBound::Exact { value });
    }
    let lit = |v: &BigUint| Expr::Num(v.clone());
    let e = match n {
        0 => add(lit(&args[0]), lit(&args[1])),
        1 => add(pow(lit(&args[0]), big(2)), big(2)),
        _ => {
            let steps = args[0].to_u64();
            let mut v = BigUint::from(2u32);
            let mut done = 0u64;
            if let Some(steps) = steps {
                while done < steps {
                    match e_exact(n - 1, &[v.clone()], max_bits) {
                        Some(next) => {
                            v = next;
                            done += 1;
                        }
                        None => break,
                    }
                }
            }
            match steps.map(|s| s - done) {
                Some(rest) if rest <= E_NEST_LIMIT => {
                    (0..rest).fold(lit(&v), |inner, _| call(Func::E(n - 1), vec![inner]))
                }
                _ => call(Func::E(n), vec![lit(&args[0])]),
            }
        }
    };
    Ok(BigBound::tower(e))
}

/// The five-level tower `2^(2^(r^(2^(2^(m+9)))))`, always kept symbolic.
pub fn gowers_w_bound(r: u64, m: u64) -> Result<BigBound> {
    if r == 0 || m == 0 {
        return Err(Error::BadParams("gowers bound needs r, m ≥ 1".into()));
    }
    Ok(BigBound::tower(gowers_expr(big(r), m)))
}

fn gowers_expr(r: Expr, m: u64) -> Expr {
    pow(big(2), pow(big(2), pow(r, pow(big(2), pow(big(2), big(m + 9))))))
}

fn pow_u(x: Expr, l: u64) -> Expr {
    if l == 1 {
        x
    } else {
        pow(x, big(l))
    }
}

fn ramsey_expr(m: u64, l: u64, c: &Expr, cfg: &BoundConfig) -> Expr {
    if let Some(cv) = as_u64(c) {
        if let Some(v) = cfg.known_ramsey(m, l, cv) {
            return big(v);
        }
        if cv == 1 {
            return big(m);
        }
    }
    if l == 1 {
        return add(mul(c.clone(), big(m - 1)), big(1));
    }
    if m == l {
        return big(l);
    }
    if l > RAM_EXPAND_LIMIT - 1 {
        return call(Func::R, vec![big(m), big(l), c.clone()]);
    }
    let t = normalize(add(ramsey_expr(m - 1, l - 1, c, cfg), big(1)), cfg.max_bits());
    let t_minus = normalize(ramsey_expr(m - 1, l - 1, c, cfg), cfg.max_bits());
    mul(t, pow(c.clone(), binom(t_minus, big(l - 1))))
}

fn check_ramsey(m: u64, l: u64, c: u64) -> Result<()> {
    if l == 0 || m < l || c == 0 {
        return Err(Error::BadParams(format!("R({m}, {l}, {c}) needs m ≥ l ≥ 1 and c ≥ 1")));
    }
    Ok(())
}

/// Upper bound for `R(m, l, c)`: the least `n` such that every `c`-coloring
/// of the `l`-subsets of an `n`-set has a homogeneous `m`-set.
pub fn ramsey_r_bound(m: u64, l: u64, c: u64, cfg: &BoundConfig) -> Result<BigBound> {
    check_ramsey(m, l, c)?;
    Ok(BigBound::from_expr(ramsey_expr(m, l, &big(c), cfg), cfg))
}

/// `RAM(<m, X)` through `R(2(m-1), m-1, X^(m-1))`, with `RAM(<1, X) = 1`.
fn ram_lt_expr(m: &Expr, x: &Expr, cfg: &BoundConfig) -> Expr {
    match as_u64(m) {
        Some(0 | 1) => big(1),
        Some(m) if m <= RAM_EXPAND_LIMIT => {
            let l = m - 1;
            let colors = normalize(pow_u(x.clone(), l), cfg.max_bits());
            ramsey_expr(2 * l, l, &colors, cfg)
        }
        _ => call(Func::Ram, vec![m.clone(), x.clone()]),
    }
}

/// `RAM(<l+1, C) ≤ R(2l, l, C^l)`.
pub fn ram_bound(l: u64, colors: u64, cfg: &BoundConfig) -> Result<BigBound> {
    if l == 0 || colors == 0 {
        return Err(Error::BadParams("ram bound needs l, |C| ≥ 1".into()));
    }
    Ok(BigBound::from_expr(ram_lt_expr(&big(l + 1), &big(colors), cfg), cfg))
}

/// `RAM(<m, m·|C|^(k^m))`; `m = 1` gives the trivial value 1.
pub fn f13_alpha_bound(m: u64, alphabet: u64, colors: u64, cfg: &BoundConfig) -> Result<BigBound> {
    if m == 0 || alphabet == 0 || colors == 0 {
        return Err(Error::BadParams("f13 alpha bound needs m, k, |C| ≥ 1".into()));
    }
    let x = mul(big(m), pow(big(colors), pow(big(alphabet), big(m))));
    let x = normalize(x, cfg.max_bits());
    Ok(BigBound::from_expr(ram_lt_expr(&big(m), &x, cfg), cfg))
}

/// Runs `m_{l+1} = RAM(<m_l, |C|^(k^m_l))` for `k` steps from `start`.
fn f13_recursion(start: Expr, alphabet: u64, colors: u64, cfg: &BoundConfig) -> Expr {
    let mut m = start;
    for _ in 0..alphabet {
        let x = normalize(pow(big(colors), pow(big(alphabet), m.clone())), cfg.max_bits());
        m = normalize(ram_lt_expr(&m, &x, cfg), cfg.max_bits());
    }
    m
}

pub fn f13_bound(m: u64, alphabet: u64, colors: u64, cfg: &BoundConfig) -> Result<BigBound> {
    if m == 0 || alphabet == 0 || colors == 0 {
        return Err(Error::BadParams("f13 bound needs m, k, |C| ≥ 1".into()));
    }
    Ok(BigBound::from_expr(f13_recursion(big(m), alphabet, colors, cfg), cfg))
}

/// The value used for `W_C(k-1, dim+1)` in [`hj_bound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", content = "value", rename_all = "snake_case")]
pub enum WValue {
    Exact(u64),
    Atom(String),
    /// The tower bound on `W(|C|, dim+1)`; only for a binary alphabet.
    Gowers,
    Expr(Expr),
}

fn w_expr(w: Option<WValue>, dim: u64, alphabet: u64, colors: u64) -> Result<Expr> {
    let dims = alphabet as usize - 1;
    let side = dim as usize + 1;
    match w {
        Some(WValue::Exact(v)) => Ok(big(v)),
        Some(WValue::Atom(name)) => Ok(atom(&name)),
        Some(WValue::Expr(e)) => Ok(e),
        Some(WValue::Gowers) | None if dims == 1 => Ok(gowers_expr(big(colors), dim + 1)),
        Some(WValue::Gowers) => Err(Error::BadParams(format!(
            "the tower bound covers one-dimensional grids only, here W_C({dims}, {side})"
        ))),
        None => Err(Error::MissingWValue { dims, side }),
    }
}

/// `HJ(dim, k, |C|) ≤ f13(k·W, k, |C|)` with `W = W_C(k-1, dim+1)`.
pub fn hj_bound(dim: u64, alphabet: u64, colors: u64, w: Option<WValue>, cfg: &BoundConfig) -> Result<BigBound> {
    if dim == 0 || alphabet < 2 || colors == 0 {
        return Err(Error::BadParams("hj bound needs dim ≥ 1, k ≥ 2, |C| ≥ 1".into()));
    }
    let m0 = normalize(mul(big(alphabet), w_expr(w, dim, alphabet, colors)?), cfg.max_bits());
    Ok(BigBound::from_expr(f13_recursion(m0, alphabet, colors, cfg), cfg))
}

/// `HJ(dim, k, |C|) ≤ dim·HJ(1, k^dim, |C|)`. With `inner` the one-dimensional
/// number is bounded by [`hj_bound`], otherwise it stays a named call.
pub fn hj_bound_reduced(
    dim: u64,
    alphabet: u64,
    colors: u64,
    inner: Option<WValue>,
    cfg: &BoundConfig,
) -> Result<BigBound> {
    if dim == 0 || alphabet < 2 || colors == 0 {
        return Err(Error::BadParams("hj bound needs dim ≥ 1, k ≥ 2, |C| ≥ 1".into()));
    }
    let big_alphabet = u32::try_from(dim)
        .ok()
        .and_then(|d| alphabet.checked_pow(d))
        .ok_or_else(|| Error::BadParams("alphabet power overflows".into()))?;
    let one_dim = match inner {
        Some(w) => hj_bound(1, big_alphabet, colors, Some(w), cfg)?.to_expr(),
        None => call(Func::Hj, vec![big(1), big(big_alphabet), big(colors)]),
    };
    Ok(BigBound::from_expr(mul(big(dim), one_dim), cfg))
}

/// Exact value of an expression under `cfg`, for callers that want to
/// re-evaluate a folded tower.
pub fn evaluate(e: &Expr, cfg: &BoundConfig) -> Option<BigUint> {
    eval_exact(e, cfg.max_bits())
}

/// `1` as a bound, the value of every number at its trivial parameters.
pub fn one() -> BigBound {
    BigBound::Exact { value: BigUint::one() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> BoundConfig {
        BoundConfig::default()
    }

    fn exact(b: &BigBound) -> u64 {
        b.exact().and_then(|v| v.to_u64()).expect("exact value")
    }

    fn e(n: usize, x: u64) -> BigBound {
        grzegorczyk_e(n, &[BigUint::from(x)], &cfg()).unwrap()
    }

    #[test]
    fn grzegorczyk_values() {
        assert_eq!(exact(&e(1, 3)), 11);
        let chain: Vec<u64> = (0..4).map(|x| exact(&e(2, x))).collect();
        assert_eq!(chain, [2, 6, 38, 1446]);
        let sum = grzegorczyk_e(0, &[BigUint::from(4u32), BigUint::from(5u32)], &cfg()).unwrap();
        assert_eq!(exact(&sum), 9);
        assert_eq!(e(3, 1), BigBound::Exact { value: BigUint::from(38u32) });
        let big = e(3, 2);
        assert_eq!(big.to_string(), "E_2(38)");
        assert!(big.exact().is_none());
        assert!(grzegorczyk_e(1, &[], &cfg()).is_err());
    }

    #[test]
    fn chain_identity() {
        for n in 0..3 {
            for x in 0..4u64 {
                let lhs = e(n + 2, x + 1);
                let Some(inner) = e(n + 2, x).exact().cloned() else { continue };
                let rhs = grzegorczyk_e(n + 1, &[inner], &cfg()).unwrap();
                if lhs.exact().is_some() || rhs.exact().is_some() {
                    assert_eq!(lhs, rhs, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn gowers_rendering() {
        let b = gowers_w_bound(2, 3).unwrap();
        assert_eq!(b.to_string(), "2^(2^(2^(2^(2^12))))");
        let small = gowers_w_bound(1, 1).unwrap();
        assert!(small.to_string().ends_with("(2^(2^10))))"));
        assert_eq!(
            gowers_w_bound(2, 3).unwrap().compare(&gowers_w_bound(3, 3).unwrap(), &cfg()),
            Comparison::AtMost
        );
    }

    #[test]
    fn ramsey_values() {
        assert_eq!(exact(&ramsey_r_bound(3, 1, 2, &cfg()).unwrap()), 5);
        assert_eq!(exact(&ramsey_r_bound(2, 2, 7, &cfg()).unwrap()), 2);
        assert_eq!(exact(&ramsey_r_bound(3, 2, 2, &cfg()).unwrap()), 32);
        let plugged = BoundConfig {
            ramsey: vec![KnownRamsey { m: 3, l: 2, c: 2, value: 6 }],
            ..cfg()
        };
        assert_eq!(exact(&ramsey_r_bound(3, 2, 2, &plugged).unwrap()), 6);
        assert!(ramsey_r_bound(2, 3, 2, &cfg()).is_err());
    }

    #[test]
    fn ram_and_f13() {
        assert_eq!(exact(&ram_bound(1, 2, &cfg()).unwrap()), 3);
        assert_eq!(exact(&f13_alpha_bound(2, 2, 2, &cfg()).unwrap()), 33);
        assert_eq!(exact(&f13_alpha_bound(1, 2, 2, &cfg()).unwrap()), 1);
        assert_eq!(exact(&f13_bound(2, 2, 1, &cfg()).unwrap()), 2);
        assert_eq!(exact(&f13_bound(2, 1, 2, &cfg()).unwrap()), 3);
        assert!(f13_bound(2, 2, 2, &cfg()).unwrap().at_least(1000u32, &cfg()));
    }

    #[test]
    fn hj_values() {
        let b = hj_bound(1, 2, 2, Some(WValue::Exact(3)), &cfg()).unwrap();
        assert!(b.at_least(2u32, &cfg()));
        let sym = hj_bound(1, 2, 2, Some(WValue::Atom("W".into())), &cfg()).unwrap();
        assert!(sym.to_string().contains('W'));
        assert!(matches!(
            hj_bound(1, 3, 2, None, &cfg()),
            Err(Error::MissingWValue { dims: 2, side: 2 })
        ));
        assert!(hj_bound(1, 2, 2, None, &cfg()).is_ok());
        let reduced = hj_bound_reduced(2, 2, 2, None, &cfg()).unwrap();
        assert_eq!(reduced.to_string(), "2·HJ(1, 4, 2)");
    }

    #[test]
    fn folding_matches_direct_evaluation() {
        let e = mul(add(big(3), atom("x")), pow(big(2), big(5)));
        assert_eq!(normalize(e, 64), mul(add(big(3), atom("x")), big(32)));
        let e = mul(add(big(3), big(4)), pow(big(2), big(5)));
        assert_eq!(normalize(e.clone(), 64), big(224));
        assert_eq!(eval_exact(&e, 64), Some(BigUint::from(224u32)));
    }

    #[test]
    fn json_shape() {
        let b = gowers_w_bound(2, 3).unwrap();
        let json = serde_json::to_value(&b).unwrap();
        assert_eq!(json["form"], "tower");
        let back: BigBound = serde_json::from_value(json).unwrap();
        assert_eq!(back, b);
        let json = serde_json::to_value(ram_bound(1, 2, &cfg()).unwrap()).unwrap();
        assert_eq!(json, serde_json::json!({"form": "exact", "value": "3"}));
    }
}
