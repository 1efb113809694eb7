#![allow(dead_code)]

use listcolor::coloring::{Color, ColorSpace, ListAssignment};
use listcolor::graph::{generate, DrawStream, Graph, GraphKind};

/// Uniform `size`-subset of `[0, c)`: rejection sampling for sparse
/// subsets, a partial Fisher-Yates shuffle otherwise.
pub fn random_subset(stream: &mut DrawStream, c: usize, size: usize) -> Vec<Color> {
    if size * 4 < c {
        let mut picked = std::collections::BTreeSet::new();
        while picked.len() < size {
            picked.insert(stream.below(c) as Color);
        }
        return picked.into_iter().collect();
    }
    let mut pool: Vec<Color> = (0..c as Color).collect();
    let size = size.min(c);
    for i in 0..size {
        let j = i + stream.below(c - i);
        pool.swap(i, j);
    }
    pool.truncate(size);
    pool
}

/// Random lists of the given sizes drawn from `[0, c)`.
pub fn random_lists(c: usize, sizes: &[usize], seed: u64) -> ListAssignment {
    let mut s = DrawStream::new(seed);
    let lists = sizes.iter().map(|&k| random_subset(&mut s, c, k)).collect();
    ListAssignment::new(ColorSpace::first(c), lists).unwrap()
}

/// Lists of size `deg(v) + 1` from a space of `max(Δ³, Δ + 1)` colors.
pub fn deg_plus_one_lists(g: &Graph, seed: u64) -> ListAssignment {
    let d = g.max_degree();
    let c = (d * d * d).max(d + 1);
    let sizes: Vec<usize> = g.degrees().iter().map(|&k| k + 1).collect();
    random_lists(c, &sizes, seed)
}

pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    generate(GraphKind::Gnp { p, seed }, n).unwrap()
}

pub fn kind(k: GraphKind, n: usize) -> Graph {
    generate(k, n).unwrap()
}

pub fn is_total(c: &[Option<Color>]) -> bool {
    c.iter().all(Option::is_some)
}
