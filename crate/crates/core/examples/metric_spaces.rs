//! Graph metrics, neighbourhoods and growth, and a disjoint union of
//! graphs chained at growing distances.

use coarse_lab::generators::{Component, GraphFamily};
use coarse_lab::{FiniteMetricSpace, Graph, PointSet};

fn main() -> coarse_lab::Result<()> {
    let tree = FiniteMetricSpace::from_graph(&Graph::regular_tree(3, 5));
    let root = PointSet::singleton(0);
    println!("3-regular tree of depth 5: {} points", tree.len());
    for r in 0..=3 {
        println!("  |∂_{r}(root)| = {}", tree.boundary(&root, r)?.len());
    }
    let growth = tree.growth_profile(5);
    println!("  largest ball at radius 0..5: {:?}", growth.table);

    let fam = GraphFamily::chain(vec![
        Component::new("C6", Graph::cycle(6)),
        Component::new("C12", Graph::cycle(12)),
        Component::new("C24", Graph::cycle(24)),
    ])?;
    for i in 0..fam.member_count() {
        println!(
            "member {i}: {} points at offset {}, separation to the next {}",
            fam.member(i).len(),
            fam.offset(i),
            fam.separation(i)
        );
    }
    Ok(())
}
