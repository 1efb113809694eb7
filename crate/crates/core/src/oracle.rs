//! Independent validators and brute-force solvers used as ground truth.
//!
//! Nothing here runs on the simulator or reuses algorithm code; validators
//! recompute every quantity from the graph.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ColorSpacePartition, ListAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Orientation};
use crate::listreduce::ReductionOutcome;
use crate::scalar::Scalar;

pub const EXACT_CAP: usize = 24;
pub const INDEPENDENCE_CAP: usize = 16;
const MAX_WITNESSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Conflict { u: NodeId, v: NodeId, color: Color },
    OffList { v: NodeId, color: Color },
    Uncolored { v: NodeId },
    LengthMismatch { expected: usize, found: usize },
    /// More later neighbors than the level allows.
    LevelOverload { v: NodeId, later: usize },
    MissingLevel { v: NodeId },
    OversizedPart { part: usize, size: usize },
    WrongList { v: NodeId },
    WrongOrientation,
    /// Reported or recomputed degree bound broken.
    RatioBroken { v: NodeId, new_degree: usize },
    Unassigned { v: NodeId },
}

/// Validator verdict: violation count and the first few witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: usize,
    pub witnesses: Vec<Witness>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn add(&mut self, w: Witness) {
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }
}

/// No edge has both endpoints colored alike. ⊥ never conflicts.
pub fn verify_proper(g: &Graph, coloring: &[Option<Color>]) -> Report {
    let mut r = Report::default();
    if coloring.len() != g.n() {
        r.add(Witness::LengthMismatch {
            expected: g.n(),
            found: coloring.len(),
        });
        return r;
    }
    for &(u, v) in g.edges() {
        if let (Some(a), Some(b)) = (coloring[u], coloring[v]) {
            if a == b {
                r.add(Witness::Conflict { u, v, color: a });
            }
        }
    }
    r
}

/// Every colored node uses a color of its list.
pub fn verify_list_respecting(lists: &ListAssignment, coloring: &[Option<Color>]) -> Report {
    let mut r = Report::default();
    if coloring.len() != lists.len() {
        r.add(Witness::LengthMismatch {
            expected: lists.len(),
            found: coloring.len(),
        });
        return r;
    }
    for (v, c) in coloring.iter().enumerate() {
        if let Some(c) = *c {
            if !lists.list(v).contains(&c) {
                r.add(Witness::OffList { v, color: c });
            }
        }
    }
    r
}

/// No node is ⊥.
pub fn verify_total(coloring: &[Option<Color>]) -> Report {
    let mut r = Report::default();
    for (v, c) in coloring.iter().enumerate() {
        if c.is_none() {
            r.add(Witness::Uncolored { v });
        }
    }
    r
}

/// Every node has at most `α·β(v)` neighbors on its own or a higher level.
pub fn verify_h_partition<T: Scalar>(g: &Graph, beta: &[usize], level: &[usize], alpha: T) -> Report {
    let mut r = Report::default();
    if level.len() != g.n() || beta.len() != g.n() {
        r.add(Witness::LengthMismatch {
            expected: g.n(),
            found: level.len().min(beta.len()),
        });
        return r;
    }
    for v in 0..g.n() {
        if level[v] == 0 {
            r.add(Witness::MissingLevel { v });
            continue;
        }
        let later = g.neighbors(v).iter().filter(|&&u| level[u] >= level[v]).count();
        if T::from_count(later) > alpha * T::from_count(beta[v]) {
            r.add(Witness::LevelOverload { v, later });
        }
    }
    r
}

fn part_sizes_ok(r: &mut Report, partition: &ColorSpacePartition, eta: f64) {
    let c = partition.space.size() as f64;
    for i in 0..partition.parts {
        let size = partition.part(i).size();
        if size as f64 * eta > c * (1.0 + 1e-12) {
            r.add(Witness::OversizedPart { part: i, size });
        }
    }
}

/// Oriented `(η, γ)` reduction: parts of at most `C/η` colors and
/// `β'(v)·|L_v| ≤ γ·|L'_v|·β(v)` with `β'` recounted from the new lists and
/// orientation.
pub fn verify_oriented_reduction(
    g: &Graph,
    o: &Orientation,
    lists: &ListAssignment,
    outcome: &ReductionOutcome,
    eta: f64,
    gamma: f64,
) -> Report {
    let mut r = Report::default();
    let n = g.n();
    if outcome.subspace_index.len() != n || outcome.new_lists.len() != n {
        r.add(Witness::LengthMismatch {
            expected: n,
            found: outcome.subspace_index.len(),
        });
        return r;
    }
    let p = &outcome.partition;
    part_sizes_ok(&mut r, p, eta);
    let mut new_lists: Vec<Vec<Color>> = Vec::with_capacity(n);
    for v in 0..n {
        let x = outcome.subspace_index[v];
        if x >= p.parts {
            r.add(Witness::WrongList { v });
            return r;
        }
        let part = p.part(x);
        let l: Vec<Color> = lists.list(v).iter().copied().filter(|&c| part.contains(c)).collect();
        if l != outcome.new_lists.list(v) {
            r.add(Witness::WrongList { v });
        }
        new_lists.push(l);
    }
    let no = &outcome.new_orientation;
    if no.edge_count() != g.edge_count() {
        r.add(Witness::WrongOrientation);
        return r;
    }
    let mut beta_new = vec![0usize; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let tail = no.tail(g, e);
        let head = if tail == u { v } else { u };
        if new_lists[tail].iter().any(|c| new_lists[head].binary_search(c).is_ok()) {
            beta_new[tail] += 1;
        }
    }
    for v in 0..n {
        let lhs = (beta_new[v] * lists.list(v).len()) as f64;
        let rhs = gamma * (new_lists[v].len() * o.out_degree(v)) as f64;
        if lhs > rhs * (1.0 + 1e-12) {
            r.add(Witness::RatioBroken {
                v,
                new_degree: beta_new[v],
            });
        }
    }
    r
}

/// Weak `(η, γ, D)` reduction: parts of at most `C/η` colors, every node of
/// degree above `D` assigned, and `deg'(v)·|L_v| ≤ γ·|L'_v|·deg(v)` for every
/// assigned node, with `deg'` recounted.
pub fn verify_weak_reduction(
    g: &Graph,
    lists: &ListAssignment,
    partition: &ColorSpacePartition,
    subspace_index: &[Option<usize>],
    eta: f64,
    gamma: f64,
    d: f64,
) -> Report {
    let mut r = Report::default();
    let n = g.n();
    if subspace_index.len() != n {
        r.add(Witness::LengthMismatch {
            expected: n,
            found: subspace_index.len(),
        });
        return r;
    }
    part_sizes_ok(&mut r, partition, eta);
    for v in 0..n {
        match subspace_index[v] {
            None if g.degree(v) as f64 > d => r.add(Witness::Unassigned { v }),
            None => {}
            Some(i) => {
                let part = partition.part(i);
                let l = lists.list(v).iter().filter(|&&c| part.contains(c)).count();
                let deg_new = g.neighbors(v).iter().filter(|&&u| subspace_index[u] == Some(i)).count();
                if (deg_new * lists.list(v).len()) as f64 > gamma * (l * g.degree(v)) as f64 * (1.0 + 1e-12) {
                    r.add(Witness::RatioBroken { v, new_degree: deg_new });
                }
            }
        }
    }
    r
}

/// Backtracking list coloring: most constrained node first (ties to the
/// lowest id), colors in ascending order, forward checking on neighbors.
/// `Ok(None)` certifies that no proper list coloring exists.
pub fn exact_list_color(g: &Graph, lists: &ListAssignment, cap: usize) -> Result<Option<Vec<Color>>> {
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    let mut domains: Vec<Vec<Color>> = lists.lists().to_vec();
    let mut color = vec![None; g.n()];
    if search(g, &mut domains, &mut color) {
        Ok(Some(color.into_iter().map(|c| c.expect("search colors every node")).collect()))
    } else {
        Ok(None)
    }
}

fn search(g: &Graph, domains: &mut [Vec<Color>], color: &mut [Option<Color>]) -> bool {
    let next = (0..g.n())
        .filter(|&v| color[v].is_none())
        .min_by_key(|&v| (domains[v].len(), v));
    let Some(v) = next else {
        return true;
    };
    for c in domains[v].clone() {
        let mut pruned = Vec::new();
        let mut wiped = false;
        for &u in g.neighbors(v) {
            if color[u].is_none() {
                if let Some(i) = domains[u].iter().position(|&x| x == c) {
                    domains[u].remove(i);
                    pruned.push(u);
                    wiped |= domains[u].is_empty();
                }
            }
        }
        color[v] = Some(c);
        if !wiped && search(g, domains, color) {
            return true;
        }
        color[v] = None;
        for u in pruned {
            let i = domains[u].partition_point(|&x| x < c);
            domains[u].insert(i, c);
        }
    }
    false
}

/// Largest independent set inside any neighborhood, by exhaustive search.
pub fn neighborhood_independence(g: &Graph, cap: usize) -> Result<usize> {
    if g.max_degree() > cap {
        return Err(Error::CapExceeded { n: g.max_degree(), cap });
    }
    let mut best = 0;
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        let adj: Vec<u32> = nb
            .iter()
            .map(|&a| {
                nb.iter()
                    .enumerate()
                    .filter(|&(_, &b)| g.has_edge(a, b))
                    .fold(0u32, |m, (j, _)| m | (1 << j))
            })
            .collect();
        let all = if nb.len() == 32 { u32::MAX } else { (1u32 << nb.len()) - 1 };
        best = best.max(max_independent(&adj, all));
    }
    Ok(best)
}

fn max_independent(adj: &[u32], mask: u32) -> usize {
    if mask == 0 {
        return 0;
    }
    let i = mask.trailing_zeros() as usize;
    let without = max_independent(adj, mask & !(1 << i));
    let with = 1 + max_independent(adj, mask & !(1 << i) & !adj[i]);
    without.max(with)
}

/// Largest minimum degree seen while repeatedly deleting a minimum-degree node.
pub fn degeneracy(g: &Graph) -> usize {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg = g.degrees();
    let mut best = 0;
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| deg[v]).unwrap();
        best = best.max(deg[v]);
        alive[v] = false;
        for &u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ColorSpace;
    use crate::graph::{generate, line_graph, GraphKind};

    #[test]
    fn proper_and_lists() {
        let g = generate(GraphKind::Path, 3).unwrap();
        assert!(verify_proper(&g, &[Some(1), Some(2), Some(1)]).passed());
        assert!(verify_proper(&g, &[None, None, None]).passed());
        let r = verify_proper(&g, &[Some(1), Some(1), None]);
        assert_eq!(r.witnesses, vec![Witness::Conflict { u: 0, v: 1, color: 1 }]);
        let lists = ListAssignment::new(ColorSpace::first(4), vec![vec![1], vec![2], vec![3]]).unwrap();
        assert!(verify_list_respecting(&lists, &[Some(1), None, Some(3)]).passed());
        assert!(!verify_list_respecting(&lists, &[Some(1), Some(3), Some(3)]).passed());
        assert!(!verify_total(&[Some(1), None]).passed());
    }

    #[test]
    fn witness_cap() {
        let g = generate(GraphKind::Complete, 8).unwrap();
        let r = verify_proper(&g, &[Some(0); 8]);
        assert_eq!(r.violations, 28);
        assert_eq!(r.witnesses.len(), 10);
    }

    #[test]
    fn h_partition_checks() {
        let star = generate(GraphKind::Star, 6).unwrap();
        let beta = [0, 1, 1, 1, 1, 1];
        assert!(verify_h_partition(&star, &beta, &[2, 1, 1, 1, 1, 1], 2.5).passed());
        assert!(!verify_h_partition(&star, &beta, &[1, 1, 1, 1, 1, 1], 2.5).passed());
        assert!(verify_h_partition(&Graph::empty(0), &[], &[], 2.5).passed());
    }

    #[test]
    fn exact_solver() {
        let k3 = generate(GraphKind::Complete, 3).unwrap();
        let two = ListAssignment::new(ColorSpace::first(3), vec![vec![1, 2]; 3]).unwrap();
        assert_eq!(exact_list_color(&k3, &two, EXACT_CAP).unwrap(), None);
        let c5 = generate(GraphKind::Ring, 5).unwrap();
        let two = ListAssignment::new(ColorSpace::first(3), vec![vec![1, 2]; 5]).unwrap();
        assert_eq!(exact_list_color(&c5, &two, EXACT_CAP).unwrap(), None);
        let c6 = generate(GraphKind::Ring, 6).unwrap();
        let two = ListAssignment::new(ColorSpace::first(3), vec![vec![1, 2]; 6]).unwrap();
        let c = exact_list_color(&c6, &two, EXACT_CAP).unwrap().unwrap();
        assert_eq!(c, vec![1, 2, 1, 2, 1, 2]);
        assert!(exact_list_color(&Graph::empty(30), &ListAssignment::full(30, ColorSpace::first(1)), EXACT_CAP).is_err());
    }

    #[test]
    fn independence_and_degeneracy() {
        let k5 = generate(GraphKind::Complete, 5).unwrap();
        assert_eq!(neighborhood_independence(&k5, INDEPENDENCE_CAP).unwrap(), 1);
        assert_eq!(degeneracy(&k5), 4);
        let star = generate(GraphKind::Star, 7).unwrap();
        assert_eq!(neighborhood_independence(&star, INDEPENDENCE_CAP).unwrap(), 6);
        let tree = generate(GraphKind::Tree { seed: 2 }, 30).unwrap();
        assert_eq!(degeneracy(&tree), 1);
        assert_eq!(degeneracy(&generate(GraphKind::Ring, 9).unwrap()), 2);
        let g = generate(GraphKind::Gnp { p: 0.15, seed: 1 }, 25).unwrap();
        assert!(neighborhood_independence(&line_graph(&g).line_graph, INDEPENDENCE_CAP).unwrap() <= 2);
    }
}
