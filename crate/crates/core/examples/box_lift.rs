//! Lifting arcs of the cycles ℤ/2^kℤ to intervals of ℤ, and the guard that
//! names the first level where a set can be lifted.

use coarse_lab::certificates::{box_lift, injectivity_radius};
use coarse_lab::generators::BoxSpaceSpec;
use coarse_lab::PointSet;

fn main() -> coarse_lab::Result<()> {
    let tower = BoxSpaceSpec::dyadic_integers(3..=7);
    for level in 0..tower.levels() {
        println!("level {level}: injectivity radius {}", injectivity_radius(&tower, level)?);
    }
    let arc = PointSet::new((120..128).chain(0..4).collect());
    let rep = box_lift(&tower, 4, &arc, 0.25)?;
    let xs: Vec<i64> = rep.lifted.iter().map(|v| v[0]).collect();
    println!("arc lifts to {xs:?}: ratio {} in both, preserved {}", rep.ratio_lift, rep.preserved);

    match box_lift(&tower, 0, &PointSet::range(0, 5), 1.0) {
        Err(e) => println!("too wide for C8: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
