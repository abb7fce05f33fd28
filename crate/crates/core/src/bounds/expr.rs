//! Expression trees for bounds too large to write out.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Named functions that may stay unevaluated inside an expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", content = "index", rename_all = "snake_case")]
pub enum Func {
    /// Grzegorczyk `E_n`.
    E(usize),
    /// `R(m, l, c)`.
    R,
    /// `RAM(<m, X)`.
    Ram,
    /// `W_C(h, m)` or `W(r, m)`.
    W,
    /// `HJ(dim, k, c)`.
    Hj,
    /// `f13(m, k, c)`.
    F13,
}

impl Func {
    /// Argument positions in which the function is non-decreasing. Other
    /// positions must agree for a structural comparison.
    fn monotone(&self, arity: usize) -> Vec<bool> {
        match self {
            Func::R => vec![true, false, true],
            _ => vec![true; arity],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum Expr {
    Num(#[serde(with = "decimal")] BigUint),
    Atom(String),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Binom(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

pub(crate) mod decimal {
    use std::str::FromStr;

    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::from_str(&text).map_err(serde::de::Error::custom)
    }
}

pub fn num(v: impl Into<BigUint>) -> Expr {
    Expr::Num(v.into())
}

pub fn atom(name: &str) -> Expr {
    Expr::Atom(name.into())
}

/// Sum, folding two literals.
pub fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

/// Product, folding two literals and the identities `0·x`, `1·x`.
pub fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (Expr::Num(x), b) if x.is_one() => b,
        (a, Expr::Num(y)) if y.is_one() => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

/// Power; never folded here so printed towers keep their shape.
pub fn pow(a: Expr, b: Expr) -> Expr {
    Expr::Pow(Box::new(a), Box::new(b))
}

/// Binomial coefficient, folding small literals.
pub fn binom(n: Expr, k: Expr) -> Expr {
    if let (Expr::Num(n), Expr::Num(k)) = (&n, &k) {
        if let Some(v) = binom_exact(n, k, 1 << 20) {
            return Expr::Num(v);
        }
    }
    Expr::Binom(Box::new(n), Box::new(k))
}

pub fn call(f: Func, args: Vec<Expr>) -> Expr {
    Expr::Call(f, args)
}

fn binom_exact(n: &BigUint, k: &BigUint, max_bits: u64) -> Option<BigUint> {
    if k > n {
        return Some(BigUint::zero());
    }
    let j = std::cmp::min(k.clone(), n - k).to_u64()?;
    if j > 100_000 {
        return None;
    }
    let mut acc = BigUint::one();
    for i in 0..j {
        acc = acc * (n - i) / (i + 1);
        if acc.bits() > max_bits {
            return None;
        }
    }
    Some(acc)
}

fn two_pow(bits: u64) -> BigUint {
    BigUint::one() << bits
}

/// Grzegorczyk `E_n` evaluated exactly, or `None` once any intermediate
/// value would exceed `max_bits`.
pub fn e_exact(n: usize, args: &[BigUint], max_bits: u64) -> Option<BigUint> {
    match n {
        0 => Some(&args[0] + &args[1]),
        1 => {
            let x = &args[0];
            if x.bits() > max_bits {
                return None;
            }
            Some(x * x + 2u32).filter(|v| v.bits() <= max_bits)
        }
        _ => {
            let steps = args[0].to_u64()?;
            let mut v = BigUint::from(2u32);
            for _ in 0..steps {
                v = e_exact(n - 1, &[v], max_bits)?;
            }
            Some(v)
        }
    }
}

/// Exact value of `e`, or `None` if it contains atoms or unevaluated calls
/// or exceeds `max_bits` along the way.
pub fn eval_exact(e: &Expr, max_bits: u64) -> Option<BigUint> {
    let v = match e {
        Expr::Num(v) => v.clone(),
        Expr::Atom(_) => return None,
        Expr::Add(a, b) => eval_exact(a, max_bits)? + eval_exact(b, max_bits)?,
        Expr::Mul(a, b) => {
            let (x, y) = (eval_exact(a, max_bits)?, eval_exact(b, max_bits)?);
            if x.is_zero() || y.is_zero() {
                return Some(BigUint::zero());
            }
            if x.bits() + y.bits() > max_bits + 1 {
                return None;
            }
            x * y
        }
        Expr::Pow(a, b) => {
            let x = eval_exact(a, max_bits)?;
            let y = eval_exact(b, max_bits)?;
            if y.is_zero() || x.is_one() {
                return Some(BigUint::one());
            }
            if x.is_zero() {
                return Some(BigUint::zero());
            }
            let y = y.to_u64()?;
            if (x.bits() - 1).saturating_mul(y) > max_bits {
                return None;
            }
            x.pow(u32::try_from(y).ok()?)
        }
        Expr::Binom(n, k) => binom_exact(&eval_exact(n, max_bits)?, &eval_exact(k, max_bits)?, max_bits)?,
        Expr::Call(Func::E(n), args) => {
            let args: Vec<BigUint> = args.iter().map(|a| eval_exact(a, max_bits)).collect::<Option<_>>()?;
            e_exact(*n, &args, max_bits)?
        }
        Expr::Call(..) => return None,
    };
    (v.bits() <= max_bits).then_some(v)
}

/// A value known exactly, or only from below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lower {
    Exact(BigUint),
    AtLeast(BigUint),
}

impl Lower {
    pub fn value(&self) -> &BigUint {
        match self {
            Lower::Exact(v) | Lower::AtLeast(v) => v,
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Lower::Exact(_))
    }
}

/// A lower bound for `e`, exact when everything is evaluable within `cap`
/// bits. Values that would exceed the cap saturate at `2^cap`.
pub fn lower(e: &Expr, cap: u64) -> Lower {
    let sat = || Lower::AtLeast(two_pow(cap));
    let both = |a: &Lower, b: &Lower, v: BigUint| {
        if a.is_exact() && b.is_exact() {
            Lower::Exact(v)
        } else {
            Lower::AtLeast(v)
        }
    };
    match e {
        Expr::Num(v) => Lower::Exact(v.clone()),
        Expr::Atom(_) => Lower::AtLeast(BigUint::zero()),
        Expr::Add(a, b) => {
            let (x, y) = (lower(a, cap), lower(b, cap));
            let v = x.value() + y.value();
            both(&x, &y, v)
        }
        Expr::Mul(a, b) => {
            let (x, y) = (lower(a, cap), lower(b, cap));
            if x.value().is_zero() || y.value().is_zero() {
                return both(&x, &y, BigUint::zero());
            }
            if x.value().bits() + y.value().bits() > cap + 1 {
                return sat();
            }
            let v = x.value() * y.value();
            both(&x, &y, v)
        }
        Expr::Pow(a, b) => {
            let (x, y) = (lower(a, cap), lower(b, cap));
            let (bv, ev) = (x.value(), y.value());
            if ev.is_zero() {
                // x^0 = 1, and x^y ≥ 1 whenever x ≥ 1.
                return if y.is_exact() || !bv.is_zero() {
                    both(&x, &y, BigUint::one())
                } else {
                    Lower::AtLeast(BigUint::zero())
                };
            }
            if bv.is_zero() || bv.is_one() {
                return both(&x, &y, bv.clone());
            }
            match ev.to_u64() {
                Some(ev) if (bv.bits() - 1).saturating_mul(ev) <= cap => {
                    let v = bv.pow(ev as u32);
                    if v.bits() > cap {
                        sat()
                    } else {
                        both(&x, &y, v)
                    }
                }
                _ => sat(),
            }
        }
        Expr::Binom(n, k) => {
            let (x, y) = (lower(n, cap), lower(k, cap));
            if !y.is_exact() {
                return Lower::AtLeast(BigUint::zero());
            }
            match binom_exact(x.value(), y.value(), cap) {
                Some(v) => both(&x, &y, v),
                // C(n, j) ≥ n for 1 ≤ j < n.
                None => Lower::AtLeast(x.value().clone().min(two_pow(cap))),
            }
        }
        Expr::Call(f, args) => {
            let lows: Vec<Lower> = args.iter().map(|a| lower(a, cap)).collect();
            if let Func::E(n) = f {
                if lows.iter().all(Lower::is_exact) {
                    let vals: Vec<BigUint> = lows.iter().map(|l| l.value().clone()).collect();
                    if let Some(v) = e_exact(*n, &vals, cap) {
                        return Lower::Exact(v);
                    }
                    return sat();
                }
            }
            Lower::AtLeast(call_floor(f, &lows))
        }
    }
}

/// Trivial lower bounds for the named functions from lower bounds of their
/// arguments.
fn call_floor(f: &Func, args: &[Lower]) -> BigUint {
    let arg = |i: usize| args.get(i).map(|l| l.value().clone()).unwrap_or_default();
    match f {
        // E_0(x, y) = x + y; E_1(x) > x; E_{n+2}(x) ≥ x + 2.
        Func::E(0) => arg(0) + arg(1),
        Func::E(_) => arg(0) + 1u32,
        // RAM(<m, X) ≥ RAM(<2, X) = X + 1 for m ≥ 2, and ≥ m.
        Func::Ram => {
            let m = arg(0);
            if m >= BigUint::from(2u32) {
                m.max(arg(1) + 1u32)
            } else {
                m
            }
        }
        Func::R | Func::W | Func::Hj | Func::F13 => arg(0),
    }
}

/// Outcome of comparing two expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    /// Provably `≤`, strictness undecided.
    AtMost,
    /// Provably `≥`, strictness undecided.
    AtLeast,
    Unknown,
}

pub fn compare(a: &Expr, b: &Expr, cap: u64) -> Comparison {
    let (la, lb) = (lower(a, cap), lower(b, cap));
    if let (Lower::Exact(x), Lower::Exact(y)) = (&la, &lb) {
        return match x.cmp(y) {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        };
    }
    if let (Lower::Exact(x), Lower::AtLeast(y)) = (&la, &lb) {
        if x < y {
            return Comparison::Less;
        }
    }
    if let (Lower::AtLeast(x), Lower::Exact(y)) = (&la, &lb) {
        if y < x {
            return Comparison::Greater;
        }
    }
    match (le(a, b, cap), le(b, a, cap)) {
        (true, true) => Comparison::Equal,
        (true, false) => Comparison::AtMost,
        (false, true) => Comparison::AtLeast,
        (false, false) => Comparison::Unknown,
    }
}

fn at_least(e: &Expr, v: u32, cap: u64) -> bool {
    *lower(e, cap).value() >= BigUint::from(v)
}

/// Provable `a ≤ b` over the naturals.
pub fn le(a: &Expr, b: &Expr, cap: u64) -> bool {
    if a == b {
        return true;
    }
    let (la, lb) = (lower(a, cap), lower(b, cap));
    if let Lower::Exact(x) = &la {
        if x <= lb.value() {
            return true;
        }
        if lb.is_exact() {
            return false;
        }
    }
    let same_shape = match (a, b) {
        (Expr::Add(a1, a2), Expr::Add(b1, b2)) | (Expr::Mul(a1, a2), Expr::Mul(b1, b2)) => {
            (le(a1, b1, cap) && le(a2, b2, cap)) || (le(a1, b2, cap) && le(a2, b1, cap))
        }
        (Expr::Pow(a1, a2), Expr::Pow(b1, b2)) => at_least(a1, 1, cap) && le(a1, b1, cap) && le(a2, b2, cap),
        (Expr::Binom(n1, k1), Expr::Binom(n2, k2)) => {
            le(n1, n2, cap)
                && (k1 == k2 || {
                    // C(n, ·) increases up to n/2.
                    match (eval_exact(k1, 64), eval_exact(k2, 64)) {
                        (Some(x), Some(y)) => x <= y && le(&mul(num(2u32), (**k2).clone()), n2, cap),
                        _ => false,
                    }
                })
        }
        (Expr::Call(f, xs), Expr::Call(g, ys)) if f == g && xs.len() == ys.len() => f
            .monotone(xs.len())
            .iter()
            .zip(xs.iter().zip(ys))
            .all(|(&mono, (x, y))| if mono { le(x, y, cap) } else { x == y }),
        _ => false,
    };
    if same_shape {
        return true;
    }
    // `b` dominates one of its own parts.
    match b {
        Expr::Add(b1, b2) => le(a, b1, cap) || le(a, b2, cap),
        Expr::Mul(b1, b2) => {
            (at_least(b2, 1, cap) && le(a, b1, cap)) || (at_least(b1, 1, cap) && le(a, b2, cap))
        }
        Expr::Pow(b1, b2) => {
            (at_least(b2, 1, cap) && le(a, b1, cap)) || (at_least(b1, 2, cap) && le(a, b2, cap))
        }
        Expr::Call(Func::E(0), args) => args.iter().any(|x| le(a, x, cap)),
        Expr::Call(Func::Ram, args) => {
            le(a, &args[0], cap) || (at_least(&args[0], 2, cap) && le(a, &add(args[1].clone(), num(1u32)), cap))
        }
        Expr::Call(_, args) => args.first().is_some_and(|x| le(a, x, cap)),
        _ => false,
    }
}

/// Rough base-10 logarithm, `None` when it overflows `f64`.
pub fn log10_estimate(e: &Expr) -> Option<f64> {
    let v = match e {
        Expr::Num(v) => {
            if v.is_zero() {
                return Some(f64::NEG_INFINITY);
            }
            let bits = v.bits();
            let shift = bits.saturating_sub(60);
            let top = (v >> shift).to_f64()?;
            top.log10() + shift as f64 * std::f64::consts::LOG10_2
        }
        Expr::Atom(_) | Expr::Call(..) => return None,
        Expr::Add(a, b) => {
            let (x, y) = (log10_estimate(a)?, log10_estimate(b)?);
            let (hi, lo) = if x > y { (x, y) } else { (y, x) };
            hi + (1.0 + 10f64.powf(lo - hi)).log10()
        }
        Expr::Mul(a, b) => log10_estimate(a)? + log10_estimate(b)?,
        Expr::Pow(a, b) => {
            let base = log10_estimate(a)?;
            let exp = 10f64.powf(log10_estimate(b)?);
            base * exp
        }
        Expr::Binom(n, k) => {
            let n = 10f64.powf(log10_estimate(n)?);
            let k = 10f64.powf(log10_estimate(k)?).round();
            let k = k.min(n - k);
            (0..k as u64).map(|i| ((n - i as f64) / (i as f64 + 1.0)).log10()).sum()
        }
    };
    v.is_finite().then_some(v)
}

const LITERAL_DIGITS: usize = 40;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                let s = v.to_str_radix(10);
                if s.len() <= LITERAL_DIGITS {
                    write!(f, "{s}")
                } else {
                    write!(f, "[{}...{} ({} digits)]", &s[..8], &s[s.len() - 8..], s.len())
                }
            }
            Expr::Atom(name) => write!(f, "{name}"),
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "·")?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, 4)?;
                write!(f, "^")?;
                write_child(f, b, 4)
            }
            Expr::Binom(n, k) => write!(f, "C({n}, {k})"),
            Expr::Call(func, args) => {
                let list = |args: &[Expr]| args.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
                match func {
                    Func::E(n) => write!(f, "E_{n}({})", list(args)),
                    Func::R => write!(f, "R({})", list(args)),
                    Func::Ram => write!(f, "RAM(<{})", list(args)),
                    Func::W => write!(f, "W({})", list(args)),
                    Func::Hj => write!(f, "HJ({})", list(args)),
                    Func::F13 => write!(f, "f13({})", list(args)),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u64 = 1 << 16;

    fn n(v: u64) -> Expr {
        num(v)
    }

    #[test]
    fn rendering() {
        let tower = pow(n(2), pow(n(2), pow(n(2), pow(n(2), pow(n(2), n(12))))));
        assert_eq!(tower.to_string(), "2^(2^(2^(2^(2^12))))");
        assert_eq!(add(mul(atom("W"), n(2)), n(1)).to_string(), "W·2 + 1");
        assert_eq!(mul(add(atom("x"), n(1)), n(3)).to_string(), "(x + 1)·3");
        assert_eq!(call(Func::Ram, vec![n(3), atom("X")]).to_string(), "RAM(<3, X)");
        assert_eq!(call(Func::E(2), vec![n(38)]).to_string(), "E_2(38)");
    }

    #[test]
    fn folding_and_eval() {
        assert_eq!(add(n(2), n(3)), n(5));
        assert_eq!(binom(n(6), n(2)), n(15));
        assert_eq!(eval_exact(&pow(n(2), n(10)), 64), Some(BigUint::from(1024u32)));
        assert_eq!(eval_exact(&pow(n(2), n(100)), 64), None);
        assert_eq!(eval_exact(&call(Func::E(2), vec![n(3)]), 64), Some(BigUint::from(1446u32)));
    }

    #[test]
    fn lower_bounds_saturate() {
        let big = pow(n(2), pow(n(2), n(40)));
        assert_eq!(lower(&big, CAP), Lower::AtLeast(two_pow(CAP)));
        assert_eq!(compare(&n(9), &big, CAP), Comparison::Less);
        assert_eq!(compare(&big, &big, CAP), Comparison::Equal);
    }

    #[test]
    fn structural_comparison() {
        let a = pow(n(2), pow(n(2), pow(n(2), n(40))));
        let b = pow(n(2), pow(n(3), pow(n(2), n(40))));
        assert_eq!(compare(&a, &b, CAP), Comparison::AtMost);
        assert_eq!(compare(&b, &a, CAP), Comparison::AtLeast);
        let r1 = call(Func::R, vec![n(5), n(3), a.clone()]);
        let r2 = call(Func::R, vec![n(6), n(3), b.clone()]);
        assert_eq!(compare(&r1, &r2, CAP), Comparison::AtMost);
        let r3 = call(Func::R, vec![n(6), n(4), b]);
        assert_eq!(compare(&r1, &r3, CAP), Comparison::Unknown);
        // Binomials grow in k up to n/2.
        assert!(le(&binom(a.clone(), n(2)), &binom(a, n(3)), CAP));
    }

    #[test]
    fn json_round_trip() {
        let e = add(pow(n(2), atom("W")), call(Func::E(3), vec![n(2)]));
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"op\":\"add\""));
        let back: Expr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
