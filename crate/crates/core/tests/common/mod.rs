//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use coarse_lab::{FiniteMetricSpace, Graph, PointSet, ProbMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `n` vertices: a random spanning tree plus extra edges
/// with probability `p`.
pub fn random_connected(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges_dedup(n, edges)
}

/// Random tree on `n` vertices (uniform attachment).
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Graph {
    random_connected(rng, n, 0.0)
}

/// Random graph or path, for the families that mix both.
pub fn graph_or_path(rng: &mut impl Rng, max_n: usize) -> FiniteMetricSpace {
    let n = rng.gen_range(4..=max_n);
    let g = if rng.gen_bool(0.5) {
        Graph::path(n)
    } else {
        random_connected(rng, n, 1.5 / n as f64)
    };
    FiniteMetricSpace::from_graph(&g)
}

/// Random probability measure; each point is dropped from the support with
/// probability `drop` (at least one point survives).
pub fn random_measure(rng: &mut impl Rng, n: usize, drop: f64) -> ProbMeasure {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(drop) { 0.0 } else { rng.gen_range(0.1..1.0) })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    ProbMeasure::normalized(w).expect("positive total")
}

pub fn random_subset(rng: &mut impl Rng, n: usize, p: f64) -> PointSet {
    let mut mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
    if !mask.iter().any(|&b| b) {
        mask[rng.gen_range(0..n)] = true;
    }
    PointSet::from_mask(&mask)
}

/// `∂_R E` by direct scan, independent of the library's neighbourhoods.
pub fn boundary(space: &FiniteMetricSpace, e: &PointSet, r: u32) -> Vec<usize> {
    (0..space.len())
        .filter(|&y| !e.contains(y) && e.iter().any(|x| space.d(x, y) <= r))
        .collect()
}

pub fn mass(mu: &ProbMeasure, pts: impl IntoIterator<Item = usize>) -> f64 {
    pts.into_iter().map(|x| mu.weight(x)).sum()
}
