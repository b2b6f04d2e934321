//! Moving between functions with small variation and sets with small
//! boundary, in both directions, and extracting such a function from a
//! field of probability measures.

use coarse_lab::amenability::{
    property_a_defect, property_a_to_folner, set_to_variational, variational_ratio, variational_to_set, PropAField,
};
use coarse_lab::{FiniteMetricSpace, Graph, PointSet, ProbMeasure};

fn main() -> coarse_lab::Result<()> {
    let p = FiniteMetricSpace::from_graph(&Graph::path(60));
    let mu = ProbMeasure::uniform(60)?;

    // a tent function: its best superlevel set is an interval
    let phi: Vec<f64> = (0..60).map(|x| (20.0 - (x as f64 - 30.0).abs()).max(0.0)).collect();
    let (lhs, rhs) = variational_ratio(&p, &mu, &phi, 1);
    let layer = variational_to_set(&p, &mu, &phi, 1)?;
    println!("tent: ratio {:.4}; best layer {} points, ratio {:.4}", lhs / rhs, layer.set.len(), layer.ratio);

    let e = PointSet::range(10, 50);
    let w = set_to_variational(&p, &mu, &e, 1, 0.5)?;
    println!("blow-up of a 40-point interval: ratio {:.4}", w.ratio);

    for s in [2, 8, 16] {
        let xi = PropAField::uniform_balls(&p, s);
        let defect = property_a_defect(&p, &xi, 1)?;
        let ex = property_a_to_folner(&p, &xi, &mu, 1)?;
        println!(
            "uniform balls of radius {s}: defect {:.4}, extracted ratio {:.4} (bound {:.4})",
            defect.defect, ex.witness.ratio, ex.bound
        );
    }
    Ok(())
}
