use num_bigint::BigUint;
use proptest::prelude::*;

use parworks::bounds::expr::{add, binom, compare, eval_exact, mul, num, pow, Comparison, Expr};
use parworks::bounds::{grzegorczyk_e, normalize, BoundConfig};
use parworks::pipelines::{
    hj_extract, ram_from_ramsey, realizing_word, HjParams,
};
use parworks::search::find::{
    find_grid_pattern, find_homogeneous, find_mono_subspace, find_par_witness, InjectionScope,
};
use parworks::space::{rank_word, unrank_word};
use parworks::{Coloring, EquivKind, GridBound, PartialWord, Space, SubsetColoring, Subspace, Word};

fn coloring_strategy(max_len: usize, max_k: usize) -> impl Strategy<Value = Coloring> {
    (1..=max_len, 2..=max_k, 1usize..=3).prop_flat_map(|(m, k, colors)| {
        let size = k.pow(m as u32);
        prop::collection::vec(0..colors as u32, size).prop_map(move |table| {
            Coloring::from_table(Space::new(m, k).unwrap(), colors, table).unwrap()
        })
    })
}

fn words(len: usize, k: usize) -> Vec<Word> {
    Space::new(len, k).unwrap().words().collect()
}

/// Every convex subspace of dimension `dim`, by brute force over block
/// labellings of the positions.
fn all_convex(n: usize, k: usize, dim: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    // Label each position with a block index or "fixed" (= dim).
    for labels in words(n, dim + 1) {
        let blocks: Vec<Vec<usize>> = (0..dim)
            .map(|b| (0..n).filter(|&a| labels[a] == b).collect())
            .collect();
        if blocks.iter().any(Vec::is_empty) {
            continue;
        }
        if blocks.windows(2).any(|p| p[0].last() >= p[1].first()) {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|&a| labels[a] == dim).collect();
        for fill in words(rest.len(), k) {
            out.push(Subspace {
                length: n,
                blocks: blocks.clone(),
                fixed: PartialWord::from_pairs(rest.iter().copied().zip(fill.into_letters())),
            });
        }
    }
    out
}

fn subspace_colors(c: &Coloring, s: &Subspace) -> Vec<u32> {
    words(s.blocks.len(), c.space().alphabet)
        .iter()
        .map(|rho| c.color(&s.word_for(rho)))
        .collect()
}

fn mono(colors: &[u32]) -> bool {
    colors.iter().all(|&x| x == colors[0])
}

fn small_expr() -> impl Strategy<Value = Expr> {
    let leaf = (0u64..6).prop_map(num);
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| pow(a, b)),
            (inner.clone(), 0u64..4).prop_map(|(a, k)| binom(a, num(k))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_round_trip(m in 0usize..8, k in 1usize..5, seed in any::<u64>()) {
        let size = k.pow(m as u32);
        let r = (seed % size as u64) as usize;
        let w = unrank_word(r, m, k).unwrap();
        prop_assert_eq!(rank_word(&w, k), r);
        prop_assert_eq!(unrank_word(rank_word(&w, k), m, k).unwrap(), w);
    }

    #[test]
    fn mono_subspace_sound_and_complete(c in coloring_strategy(3, 3), dim in 1usize..=2) {
        let n = c.space().length;
        let k = c.space().alphabet;
        prop_assume!(dim <= n);
        let brute = all_convex(n, k, dim).into_iter().find(|s| mono(&subspace_colors(&c, s)));
        match find_mono_subspace(&c, dim) {
            Some(s) => {
                prop_assert!(mono(&subspace_colors(&c, &s)));
                prop_assert_eq!(s.blocks.len(), dim);
                prop_assert!(brute.is_some());
            }
            None => prop_assert!(brute.is_none()),
        }
    }

    #[test]
    fn par_witness_sound_and_complete(c in coloring_strategy(4, 3), size in 1usize..=2, alpha in 0usize..2) {
        let n = c.space().length;
        let k = c.space().alphabet;
        prop_assume!(size <= n);
        for kind in [EquivKind::FullSym, EquivKind::AlphaIso { base: alpha }] {
            let key = |w: &Word| -> Vec<usize> {
                match kind {
                    EquivKind::FullSym => { let mut v = w.letters().to_vec(); v.sort(); v }
                    _ => w.letters().iter().copied().filter(|&x| x != alpha).collect(),
                }
            };
            let inner = words(size, k);
            let found = find_par_witness(&c, size, &kind, InjectionScope::OrderPreserving).unwrap();
            // Brute force over increasing injections and every admissible fill.
            let mut brute = false;
            for mask in 0usize..1 << n {
                if mask.count_ones() as usize != size { continue; }
                let pos: Vec<usize> = (0..n).filter(|a| mask >> a & 1 == 1).collect();
                let rest: Vec<usize> = (0..n).filter(|a| mask >> a & 1 == 0).collect();
                let fills: Vec<Word> = match kind {
                    EquivKind::AlphaIso { .. } => vec![Word::constant(rest.len(), alpha)],
                    _ => words(rest.len(), k),
                };
                for fill in fills {
                    let full = |eta: &Word| {
                        let mut l = vec![0; n];
                        for (&a, &x) in rest.iter().zip(fill.letters()) { l[a] = x; }
                        for (&a, &x) in pos.iter().zip(eta.letters()) { l[a] = x; }
                        c.color(&Word::new(l))
                    };
                    let ok = inner.iter().all(|a| inner.iter().all(|b| key(a) != key(b) || full(a) == full(b)));
                    if ok { brute = true; }
                    if let Some(w) = &found {
                        if w.injection == pos && w.fill.iter().map(|(_, x)| x).eq(fill.letters().iter().copied()) {
                            prop_assert!(ok, "returned witness is not valid");
                        }
                    }
                }
            }
            prop_assert_eq!(found.is_some(), brute);
        }
    }

    #[test]
    fn grid_pattern_sound(n in 2usize..10, side in 2usize..4, seed in any::<u64>()) {
        let space = Space::new(1, n).unwrap();
        let table: Vec<u32> = (0..n as u64).map(|i| (parworks::coloring::splitmix64(seed, i) % 2) as u32).collect();
        let c = Coloring::from_table(space, 2, table).unwrap();
        let brute = (1..n).any(|d| (0..n).any(|a| {
            a + d * (side - 1) < n && (0..side).all(|i| c.color_at(a + i * d) == c.color_at(a))
        }));
        match find_grid_pattern(&c, side, GridBound::Span) {
            Some(g) => {
                let pts: Vec<usize> = (0..side).map(|i| g.offsets[0] + i * g.difference).collect();
                prop_assert!(pts.iter().all(|&p| p < n && c.color_at(p) == c.color_at(pts[0])));
            }
            None => prop_assert!(!brute),
        }
    }

    #[test]
    fn homogeneous_sets_are_homogeneous(n in 3usize..8, l in 1usize..3, target in 2usize..5, seed in any::<u64>()) {
        prop_assume!(target >= l && target <= n);
        let f = SubsetColoring::random(n, vec![l], 2, seed).unwrap();
        if let Some(a) = find_homogeneous(&f, target).unwrap() {
            prop_assert_eq!(a.len(), target);
            prop_assert!(a.windows(2).all(|p| p[0] < p[1]));
            let mut colors = Vec::new();
            for mask in 0usize..1 << target {
                if mask.count_ones() as usize == l {
                    let u: Vec<usize> = (0..target).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
                    colors.push(f.color(&u));
                }
            }
            prop_assert!(mono(&colors));
        }
    }

    #[test]
    fn ram_from_ramsey_is_level_homogeneous(n in 4usize..9, l in 1usize..3, seed in any::<u64>()) {
        prop_assume!(n >= 2 * l);
        let f = SubsetColoring::random(n, (1..=l).collect(), 2, seed).unwrap();
        if let Some(b) = ram_from_ramsey(&f, l).unwrap() {
            prop_assert_eq!(b.len(), l + 1);
            for r in 1..=l {
                let mut colors = Vec::new();
                for mask in 0usize..1 << b.len() {
                    if mask.count_ones() as usize == r {
                        let u: Vec<usize> = (0..b.len()).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).collect();
                        colors.push(f.color(&u));
                    }
                }
                prop_assert!(mono(&colors), "level {} not constant on {:?}", r, b);
            }
        }
    }

    #[test]
    fn realizing_words_exist(h in 1usize..4, n1 in 1usize..5, seed in any::<u64>()) {
        let k = h + 1;
        let n2 = k * n1;
        let counts: Vec<usize> = (0..h).map(|e| (seed >> (8 * e)) as usize % n1).collect();
        prop_assert!(h * (n1 - 1) < n2);
        let w = realizing_word(&counts, n2).unwrap();
        prop_assert_eq!(w.len(), n2);
        for (e, &x) in counts.iter().enumerate() {
            prop_assert_eq!(w.count(e), x);
        }
    }

    #[test]
    fn hj_extract_and_finder_agree_on_validity(seed in any::<u64>(), noisy in any::<bool>()) {
        let space = Space::new(7, 2).unwrap();
        let c = Coloring::from_fn(space, 2, |w| {
            let r = space.rank(w) as u64;
            if noisy && parworks::coloring::splitmix64(seed ^ 1, r).is_multiple_of(64) {
                (parworks::coloring::splitmix64(seed, r) % 2) as u32
            } else {
                (parworks::coloring::splitmix64(seed, w.count(0) as u64) % 2) as u32
            }
        }).unwrap();
        let params = HjParams { n1: 3, chain_sizes: Some(vec![6, 7]) };
        if let Ok(ex) = hj_extract(&c, 1, &params, None) {
            prop_assert!(mono(&subspace_colors(&c, &ex.subspace)));
            let first = find_mono_subspace(&c, 1).expect("a monochromatic line exists");
            prop_assert!(mono(&subspace_colors(&c, &first)));
        }
    }

    #[test]
    fn folding_matches_evaluation(e in small_expr()) {
        let direct = eval_exact(&e, 4096);
        let folded = normalize(e.clone(), 4096);
        prop_assert_eq!(eval_exact(&folded, 4096), direct);
    }

    #[test]
    fn comparison_claims_are_true(a in small_expr(), b in small_expr()) {
        let (Some(x), Some(y)) = (eval_exact(&a, 1 << 14), eval_exact(&b, 1 << 14)) else {
            return Ok(());
        };
        // A small cap forces the symbolic rules to do the work.
        let claim = compare(&a, &b, 8);
        let holds = match claim {
            Comparison::Less => x < y,
            Comparison::AtMost => x <= y,
            Comparison::Equal => x == y,
            Comparison::AtLeast => x >= y,
            Comparison::Greater => x > y,
            Comparison::Unknown => true,
        };
        prop_assert!(holds, "{} vs {} claimed {:?} but values are {} and {}", a, b, claim, x, y);
    }

    #[test]
    fn grzegorczyk_chain_identity(n in 0usize..3, x in 0u32..4) {
        let cfg = BoundConfig { digit_budget: 2000, ..BoundConfig::default() };
        let e = |n: usize, v: BigUint| grzegorczyk_e(n, &[v], &cfg).unwrap();
        if let (Some(inner), Some(outer)) = (e(n + 2, x.into()).exact().cloned(), e(n + 2, (x + 1).into()).exact().cloned()) {
            prop_assert_eq!(e(n + 1, inner).exact().cloned(), Some(outer));
        }
    }
}
