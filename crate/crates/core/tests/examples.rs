//! Worked instances checked end to end against the independent validators.

mod common;

use common::{deg_plus_one_lists, gnp, is_total, kind, random_lists};
use listcolor::bni::{bni_deg_plus_one, bni_recursive_list_color, per_class_neighborhood_bound, weak_reduction};
use listcolor::coloring::{ColorSpace, ListAssignment, PartialColoring};
use listcolor::degplus1::{arboricity_list_color, deg_plus_one_list_color, half_degree_step, FrameworkParams};
use listcolor::graph::{line_graph, orient_by_degeneracy, Graph, GraphKind, Orientation};
use listcolor::hpartition::{generalized_h_partition, h_partition_fixed_bound};
use listcolor::listreduce::{oriented_reduction, recursive_list_color};
use listcolor::oracle::{
    degeneracy, exact_list_color, neighborhood_independence, verify_h_partition, verify_list_respecting,
    verify_oriented_reduction, verify_proper, verify_weak_reduction, EXACT_CAP,
};
use listcolor::primitives::{defective_with_buckets, linial_coloring};
use listcolor::Executor;

fn valid(g: &Graph, lists: &ListAssignment, c: &PartialColoring) -> bool {
    verify_proper(g, c).passed() && verify_list_respecting(lists, c).passed()
}

#[test]
fn gnp_replays_and_degeneracy_orientation_is_tight() {
    let a = gnp(50, 0.1, 7);
    assert_eq!(a, gnp(50, 0.1, 7));
    let (o, d) = orient_by_degeneracy(&a);
    assert_eq!(o.out_degrees().iter().copied().max().unwrap(), degeneracy(&a));
    assert_eq!(d, degeneracy(&a));
}

#[test]
fn h_partition_examples_recheck() {
    let exec = Executor::local();
    let ring = kind(GraphKind::Ring, 9);
    let cyclic = Orientation::from_fn(&ring, |u, v| !(u == 0 && v == 8));
    let (p, _) = generalized_h_partition(&exec, &ring, &cyclic, 0.5).unwrap();
    assert!(verify_h_partition(&ring, cyclic.out_degrees(), &p.level, 2.5).passed());

    let k8 = kind(GraphKind::Complete, 8);
    let by_id = Orientation::by_id(&k8);
    let (p, _) = generalized_h_partition(&exec, &k8, &by_id, 1.0).unwrap();
    assert!(verify_h_partition(&k8, by_id.out_degrees(), &p.level, 3.0).passed());

    let g = gnp(200, 0.03, 1);
    let a = degeneracy(&g);
    let (p, _) = h_partition_fixed_bound(&exec, &g, a, 1.0).unwrap();
    assert!(verify_h_partition(&g, &vec![a; 200], &p.level, 3.0).passed());
}

#[test]
fn reduction_examples_recheck() {
    let exec = Executor::local();
    let edge = kind(GraphKind::Path, 2);
    let o = Orientation::by_id(&edge);
    let lists = ListAssignment::full(2, ColorSpace::first(4));
    let (out, _) = oriented_reduction(&exec, &edge, &o, &lists, 2, 1.0).unwrap();
    assert!(verify_oriented_reduction(&edge, &o, &lists, &out, 2.0, 3.0).passed());

    let k5 = kind(GraphKind::Complete, 5);
    let o = Orientation::by_id(&k5);
    let lists = ListAssignment::full(5, ColorSpace::first(25));
    let (out, _) = oriented_reduction(&exec, &k5, &o, &lists, 5, 1.0).unwrap();
    assert!(verify_oriented_reduction(&k5, &o, &lists, &out, 5.0, 3.0).passed());
    assert!((0..5).all(|v| out.new_lists.list(v).len() == 5));
    // A γ below the achieved ratio is rejected.
    assert!(!verify_oriented_reduction(&k5, &o, &lists, &out, 5.0, 0.1).passed());
}

#[test]
fn recursive_on_gnp_colors_everything() {
    let g = gnp(100, 0.05, 2);
    let (o, _) = orient_by_degeneracy(&g);
    let d = g.max_degree();
    let sizes: Vec<usize> = (0..100).map(|v| 27 * o.out_degree(v) + 1).collect();
    let lists = random_lists(d * d * d, &sizes, 2);
    let (c, _) = recursive_list_color(&Executor::local(), &g, &o, &lists, 1.0, 3).unwrap();
    assert!(is_total(&c));
    assert!(valid(&g, &lists, &c));
}

#[test]
fn path_guarantee_is_partial() {
    // β = 1 for the first two nodes; 9 colors do not exceed 27·β, so only
    // the sink is guaranteed a color.
    let p3 = kind(GraphKind::Path, 3);
    let o = Orientation::by_id(&p3);
    let lists = random_lists(27, &[9, 9, 9], 11);
    let (c, _) = recursive_list_color(&Executor::local(), &p3, &o, &lists, 1.0, 3).unwrap();
    assert!(c[2].is_some());
    assert!(valid(&p3, &lists, &c));
}

#[test]
fn half_step_on_gnp() {
    let exec = Executor::local();
    let g = gnp(150, 0.05, 4);
    let lists = deg_plus_one_lists(&g, 4);
    let (base, _) = linial_coloring(&exec, &g).unwrap();
    let params = FrameworkParams::<f64>::for_degree(g.max_degree());
    let (s, _) = half_degree_step(&exec, &g, &lists, &params, &base).unwrap();
    assert!(valid(&g, &lists, &s.coloring));
    assert!(s.bot_max_degree <= g.max_degree() / 2);
}

#[test]
fn deg_plus_one_over_seeds() {
    let exec = Executor::local();
    for seed in 0..25 {
        let g = gnp(200, 0.05, seed);
        let lists = deg_plus_one_lists(&g, seed);
        let (out, _) = deg_plus_one_list_color(&exec, &g, &lists).unwrap();
        assert!(is_total(&out.coloring), "seed {seed}");
        assert!(valid(&g, &lists, &out.coloring), "seed {seed}");
    }
}

#[test]
fn deg_plus_one_instances_are_satisfiable() {
    for seed in 0..10 {
        let g = gnp(16, 0.4, seed);
        let lists = deg_plus_one_lists(&g, seed);
        assert!(exact_list_color(&g, &lists, EXACT_CAP).unwrap().is_some());
    }
}

#[test]
fn arboricity_on_sparse_gnp() {
    let exec = Executor::local();
    let g = gnp(150, 0.04, 3);
    let a = degeneracy(&g).max(1);
    assert!(a <= 5);
    let need = (2.5 * a as f64).floor() as usize + 1;
    let lists = random_lists(40, &vec![need; 150], 3);
    let (out, _) = arboricity_list_color(&exec, &g, a, 0.5, &lists).unwrap();
    assert!(is_total(&out.coloring));
    assert!(valid(&g, &lists, &out.coloring));
}

#[test]
fn weak_reduction_on_line_graph() {
    let lg = line_graph(&gnp(60, 0.1, 6)).line_graph;
    let lists = ListAssignment::full(lg.n(), ColorSpace::first(64));
    let (w, _) = weak_reduction(&Executor::local(), &lg, 2, &lists, 4.0).unwrap();
    assert!(verify_weak_reduction(&lg, &lists, &w.partition, &w.subspace_index, 4.0, 6.0, 16.0).passed());
    assert!(w.assignment_bound_violations(&lg, 2).is_empty());
    // Unassigning a high-degree node is caught.
    let v = (0..lg.n()).find(|&v| lg.degree(v) > 16 && w.subspace_index[v].is_some());
    if let Some(v) = v {
        let mut bad = w.subspace_index.clone();
        bad[v] = None;
        assert!(!verify_weak_reduction(&lg, &lists, &w.partition, &bad, 4.0, 6.0, 16.0).passed());
    }
}

#[test]
fn bni_interval_guaranteed_set() {
    let exec = Executor::local();
    let g = kind(GraphKind::Interval { seed: 1 }, 80);
    let theta = neighborhood_independence(&g, 32).unwrap();
    let r = ((g.max_degree() as f64).log2().sqrt().ceil() as u32).max(1);
    let slack = (3 * theta).pow(r - 1);
    let sizes: Vec<usize> = (0..80).map(|v| slack * g.degree(v) + 1).collect();
    let lists = random_lists(sizes.iter().copied().max().unwrap() + 1, &sizes, 5);
    let (base, _) = linial_coloring(&exec, &g).unwrap();
    let (c, _) = bni_recursive_list_color(&exec, &g, theta, &lists, r, &base).unwrap();
    assert!(is_total(&c));
    assert!(valid(&g, &lists, &c));
}

#[test]
fn bni_line_graphs_over_seeds() {
    let exec = Executor::local();
    for seed in 0..10 {
        let lg = line_graph(&gnp(80, 0.08, 8 + seed)).line_graph;
        let lists = deg_plus_one_lists(&lg, seed);
        let (out, _) = bni_deg_plus_one(&exec, &lg, 2, &lists).unwrap();
        assert!(is_total(&out.coloring));
        assert!(valid(&lg, &lists, &out.coloring));
    }
    let p4 = line_graph(&kind(GraphKind::Path, 4)).line_graph;
    let lists = ListAssignment::full(3, ColorSpace::first(3));
    let (out, _) = bni_deg_plus_one(&exec, &p4, 2, &lists).unwrap();
    assert!(valid(&p4, &lists, &out.coloring) && is_total(&out.coloring));
}

#[test]
fn neighborhood_bound_on_intervals() {
    let exec = Executor::local();
    for seed in 0..5 {
        let g = kind(GraphKind::Interval { seed }, 60);
        let theta = neighborhood_independence(&g, 32).unwrap();
        let (base, _) = linial_coloring(&exec, &g).unwrap();
        for p in [2, 3, 4] {
            let (b, _) = defective_with_buckets(&exec, &g, 3 * p, &base).unwrap();
            let r = per_class_neighborhood_bound(&g, theta, &b, p);
            assert!(r.defect_bound_holds);
            assert!(r.relative_bound_holds, "seed {seed} p {p}: {:?}", r.witnesses);
        }
    }
}

#[test]
fn modes_agree_on_deg_plus_one() {
    let g = gnp(100, 0.05, 3);
    let lists = deg_plus_one_lists(&g, 3);
    let a = deg_plus_one_list_color(&Executor::local(), &g, &lists).unwrap();
    let b = deg_plus_one_list_color(&Executor::local().emulated(true), &g, &lists).unwrap();
    assert_eq!(a, b);
}
