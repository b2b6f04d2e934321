//! The isodiametric function of a cycle and layer selection inside a
//! neighbourhood of bounded growth.

use coarse_lab::amenability::{isodiametric, layered_folner, DEFAULT_BALL_CAP};
use coarse_lab::{FiniteMetricSpace, Graph, PointSet};

fn main() -> coarse_lab::Result<()> {
    let c = FiniteMetricSpace::from_graph(&Graph::cycle(100));
    for n in 1..=5 {
        let iso = isodiametric(&c, n, 0, DEFAULT_BALL_CAP)?;
        println!("A(C100, {n}) = {} via {} points", iso.value, iso.witness.len());
    }
    let p = FiniteMetricSpace::from_graph(&Graph::path(1000));
    for r in 1..=4 {
        let layer = layered_folner(&p, &PointSet::range(400, 420), r, 0.5)?;
        println!(
            "R = {r}: layer m = {} grows by {:.4} ≤ {:.4}",
            layer.m, layer.growth, layer.bound
        );
    }
    Ok(())
}
