//! Randomized invariants.

mod common;

use common::{deg_plus_one_lists, random_lists};
use listcolor::coloring::{ColorSpace, ListAssignment};
use listcolor::degplus1::deg_plus_one_list_color;
use listcolor::graph::{line_graph, orient_by_degeneracy, Graph};
use listcolor::hpartition::generalized_h_partition;
use listcolor::listreduce::oriented_reduction;
use listcolor::oracle::{
    degeneracy, exact_list_color, verify_h_partition, verify_list_respecting, verify_oriented_reduction,
    verify_proper, verify_total, EXACT_CAP,
};
use listcolor::primitives::{defective_with_buckets, linial_coloring};
use listcolor::{Exact, Executor};
use num_rational::Ratio;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::build(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graphs_are_simple_and_symmetric(g in graph_strategy(30)) {
        prop_assert!(g.check_invariants());
        let text = g.to_edge_list();
        prop_assert_eq!(Graph::from_edge_list(&text).unwrap(), g.clone());
        let lg = line_graph(&g);
        for (i, &(a, b)) in lg.edge_of_node.iter().enumerate() {
            for (j, &(c, d)) in lg.edge_of_node.iter().enumerate() {
                let share = i != j && (a == c || a == d || b == c || b == d);
                prop_assert_eq!(lg.line_graph.has_edge(i, j), share);
            }
        }
    }

    #[test]
    fn linial_and_defective_bounds(g in graph_strategy(40), k in 1usize..6) {
        let exec = Executor::local();
        let (base, _) = linial_coloring(&exec, &g).unwrap();
        let c: Vec<_> = base.color.iter().map(|&x| Some(x as u32)).collect();
        prop_assert!(verify_proper(&g, &c).passed());
        let (b, _) = defective_with_buckets(&exec, &g, k, &base).unwrap();
        for v in 0..g.n() {
            let same = g.neighbors(v).iter().filter(|&&u| b[u] == b[v]).count();
            prop_assert!(same * k <= g.degree(v));
        }
    }

    #[test]
    fn h_partition_valid_in_float_and_rational(g in graph_strategy(40), e in 1i64..5) {
        let exec = Executor::local();
        let (o, d) = orient_by_degeneracy(&g);
        prop_assert_eq!(d, degeneracy(&g));
        let eps: Exact = Ratio::new(e, 4);
        let (pr, _) = generalized_h_partition(&exec, &g, &o, eps).unwrap();
        let (pf, _) = generalized_h_partition(&exec, &g, &o, e as f64 / 4.0).unwrap();
        prop_assert_eq!(&pr.level, &pf.level);
        prop_assert!(verify_h_partition(&g, o.out_degrees(), &pr.level, Ratio::from_integer(2) + eps).passed());
    }

    #[test]
    fn oriented_reduction_valid(g in graph_strategy(30), eta in 1usize..9, seed in 0u64..1000) {
        let (o, _) = orient_by_degeneracy(&g);
        let sizes: Vec<usize> = (0..g.n()).map(|v| 1 + (v * 5 + seed as usize) % 32).collect();
        let lists = random_lists(32, &sizes, seed);
        let (out, _) = oriented_reduction(&Executor::local(), &g, &o, &lists, eta, 1.0).unwrap();
        prop_assert!(verify_oriented_reduction(&g, &o, &lists, &out, eta as f64, 3.0).passed());
    }

    #[test]
    fn deg_plus_one_total_and_satisfiable(g in graph_strategy(14), seed in 0u64..1000) {
        let lists = deg_plus_one_lists(&g, seed);
        let (out, _) = deg_plus_one_list_color(&Executor::local(), &g, &lists).unwrap();
        prop_assert!(verify_total(&out.coloring).passed());
        prop_assert!(verify_proper(&g, &out.coloring).passed());
        prop_assert!(verify_list_respecting(&lists, &out.coloring).passed());
        prop_assert!(exact_list_color(&g, &lists, EXACT_CAP).unwrap().is_some());
    }

    #[test]
    fn exact_solver_matches_brute_force(g in graph_strategy(7), k in 1u32..4) {
        let lists = ListAssignment::full(g.n(), ColorSpace::first(k as usize));
        let found = exact_list_color(&g, &lists, EXACT_CAP).unwrap();
        let mut any = false;
        let total = (k as u64).pow(g.n() as u32);
        for code in 0..total {
            let mut x = code;
            let c: Vec<Option<u32>> = (0..g.n()).map(|_| { let d = (x % k as u64) as u32; x /= k as u64; Some(d) }).collect();
            if verify_proper(&g, &c).passed() {
                any = true;
                break;
            }
        }
        prop_assert_eq!(found.is_some(), any);
        if let Some(c) = found {
            let c: Vec<Option<u32>> = c.into_iter().map(Some).collect();
            prop_assert!(verify_proper(&g, &c).passed());
        }
    }
}
