mod support;

use proptest::prelude::*;

use support::*;
use thincomb_core::area::{verify_filling, AreaSolver, Loop};
use thincomb_core::combing::farb_reduce;
use thincomb_core::complex::CellComplex;
use thincomb_core::graph::{fineness_scan, DistanceMatrix, Graph};
use thincomb_core::path::{concat_edge, quasigeodesy_constant, Path};
use thincomb_core::word::Word;
use thincomb_core::GroupSpec;

fn word(rank: i32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..max_len)
        .prop_map(|v| Word(v.into_iter().map(|(l, s)| if s { l } else { -l }).collect()))
}

fn specs() -> Vec<GroupSpec> {
    vec![f2(), z2(), amalgam("a", "c"), amalgam("a b a^-1 b^-1", "c d c^-1 d^-1")]
}

/// Independent count of simple loops of length ≤ `max_len` through `{u, v}`.
fn loops_through(g: &Graph, u: usize, v: usize, max_len: usize) -> u64 {
    fn go(g: &Graph, path: &mut Vec<usize>, u: usize, max_len: usize) -> u64 {
        let x = *path.last().unwrap();
        let mut n = 0;
        for w in g.neighbors(x) {
            if w == u && path.len() >= 2 && path.len() < max_len {
                n += 1;
            } else if w != u && !path.contains(&w) && path.len() + 2 <= max_len {
                path.push(w);
                n += go(g, path, u, max_len);
                path.pop();
            }
        }
        n
    }
    go(g, &mut vec![v], u, max_len)
}

fn closed_walk(g: &Graph, start: usize, steps: &[usize]) -> Vec<usize> {
    let m = DistanceMatrix::new(g);
    let mut w = vec![start];
    for &s in steps {
        let nb: Vec<usize> = g.neighbors(*w.last().unwrap()).collect();
        w.push(nb[s % nb.len()]);
    }
    let back = m.geodesic(g, *w.last().unwrap(), start);
    w.extend_from_slice(&back.vertices()[1..]);
    w.pop();
    w
}

fn area(cx: &CellComplex, l: &[usize]) -> u32 {
    let a = AreaSolver::new(cx).with_budget(24).area(&Loop(l.to_vec())).unwrap();
    assert!(a.is_exact());
    a.value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(w in word(4, 12), i in 0usize..4) {
        let s = &specs()[i];
        let w = Word(w.0.into_iter().filter(|l| l.unsigned_abs() as usize <= s.alphabet().len()).collect());
        let c = s.canonicalize(&w).unwrap();
        prop_assert_eq!(s.canonicalize(&c.word).unwrap(), c);
    }

    #[test]
    fn product_with_inverse_is_identity(w in word(4, 12), i in 0usize..4) {
        let s = &specs()[i];
        let w = Word(w.0.into_iter().filter(|l| l.unsigned_abs() as usize <= s.alphabet().len()).collect());
        let g = s.canonicalize(&w).unwrap();
        let inv = s.inverse(&g).unwrap();
        prop_assert_eq!(s.multiply(&g, &inv).unwrap(), s.identity());
    }

    #[test]
    fn amalgam_over_a_generator_is_free(w1 in word(4, 10), w2 in word(4, 10)) {
        // F₂ *_{a = c} F₂ ≅ F(a, b, d)
        let s = amalgam("a", "c");
        let phi = |w: &Word| Word(w.0.iter().map(|&l| match l.abs() { 3 => l.signum(), 4 => 3 * l.signum(), _ => l }).collect()).free_reduce();
        prop_assert_eq!(s.equal_words(&w1, &w2), phi(&w1) == phi(&w2));
    }

    #[test]
    fn cosets_partition_the_ball(r in 1u32..4, z in any::<bool>()) {
        let c = cone_a(&if z { z2() } else { f2() }, r);
        let n = c.vertex_count() - c.cones().len();
        for v in 0..n {
            prop_assert_eq!(c.cones_of(v).len(), 1);
        }
        let members: usize = c.cones().iter().map(|k| c.graph().degree(k.vertex)).sum();
        prop_assert_eq!(members, n);
    }

    #[test]
    fn concatenation_triples_at_most(start in 0usize..200, steps in prop::collection::vec(0usize..8, 1..9), z in any::<bool>()) {
        let b = ball(&if z { z2() } else { f2() }, 4);
        let m = DistanceMatrix::new(&b.graph);
        let mut p = vec![start % b.vertex_count()];
        for s in steps {
            let nb: Vec<usize> = b.graph.neighbors(*p.last().unwrap()).filter(|w| !p.contains(w)).collect();
            if nb.is_empty() { break; }
            p.push(nb[s % nb.len()]);
        }
        let (last, rest) = p.split_last().unwrap();
        prop_assume!(!rest.is_empty());
        let head = Path(rest.to_vec());
        let lam = quasigeodesy_constant(&head, &m);
        let out = quasigeodesy_constant(&concat_edge(&head, *last, &b.graph).unwrap(), &m);
        prop_assert!(out <= lam.scale(3));
    }

    #[test]
    fn farb_reduction_is_idempotent(x in 0usize..161, y in 0usize..161) {
        let c = cone_a(&f2(), 4);
        let m = DistanceMatrix::new(&c.base_graph);
        let g = m.geodesic(&c.base_graph, x, y);
        let once = farb_reduce(&g, &c);
        prop_assert_eq!(farb_reduce(&once, &c), once);
    }

    #[test]
    fn area_is_subadditive(v in 0usize..25, s1 in prop::collection::vec(0usize..12, 1..4), s2 in prop::collection::vec(0usize..12, 1..4)) {
        let b = ball(&z2(), 3);
        let (_, cx) = rips(&b.graph, 2);
        let l1 = closed_walk(&cx.skeleton, v, &s1);
        let l2 = closed_walk(&cx.skeleton, v, &s2);
        let both: Vec<usize> = l1.iter().chain(&l2).copied().collect();
        prop_assert!(area(&cx, &both) <= area(&cx, &l1) + area(&cx, &l2));
    }

    #[test]
    fn area_never_grows_with_more_cells(v in 0usize..25, s in prop::collection::vec(0usize..12, 1..5)) {
        let b = ball(&z2(), 3);
        let (_, cx) = rips(&b.graph, 2);
        let mut more = cx.clone();
        more.add_word_cells(&b, &[z2().element("a b a^-1 b^-1").unwrap().word]).unwrap();
        let l = closed_walk(&cx.skeleton, v, &s);
        prop_assert!(area(&more, &l) <= area(&cx, &l));
    }

    #[test]
    fn reversed_loop_has_the_same_area(v in 0usize..25, s in prop::collection::vec(0usize..12, 1..5)) {
        let b = ball(&z2(), 3);
        let (_, cx) = rips(&b.graph, 2);
        let l = Loop(closed_walk(&cx.skeleton, v, &s));
        let mut r = l.clone();
        r.0.reverse();
        let mut solver = AreaSolver::new(&cx).with_budget(24);
        let (fl, fr) = (solver.fill(&l).unwrap(), solver.fill(&r).unwrap());
        prop_assert_eq!(fl.area(), fr.area());
        prop_assert!(verify_filling(&cx, &l, fl.filling().unwrap()));
        prop_assert!(verify_filling(&cx, &r, fr.filling().unwrap()));
    }
}

#[test]
fn fineness_scan_matches_brute_force() {
    for (spec, r) in [(f2(), 3), (z2(), 3), (z2(), 4)] {
        let c = cone_a(&spec, r);
        let g = c.graph();
        for v in 0..g.vertex_count() {
            for u in g.neighbors(v).filter(|&u| u < v) {
                let fast = fineness_scan(g, u, v, 6, 1 << 24).unwrap();
                assert_eq!(fast, loops_through(g, u, v, 6), "edge ({u}, {v})");
            }
        }
    }
}
