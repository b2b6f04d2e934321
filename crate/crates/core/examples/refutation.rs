//! Negative certificates: expanders, large-girth graphs and Hamming cubes.

use coarse_lab::amenability::SearchOptions;
use coarse_lab::certificates::{cube_refute, expander_refute, girth_refute, vertex_cheeger, DegreePolicy};
use coarse_lab::generators::{girth_filtered_family, Component, GraphFamily};
use coarse_lab::Graph;

fn main() -> coarse_lab::Result<()> {
    let sizes = [16, 20, 24];
    let graphs = girth_filtered_family(&sizes, 3, 0, 1)?;
    for (n, g) in sizes.iter().zip(&graphs) {
        let ch = vertex_cheeger(g);
        println!("n = {n}: ε₀ = {:.4} (exact: {})", ch.epsilon, ch.exact);
    }
    let fam = GraphFamily::chain(
        graphs.into_iter().zip(sizes).map(|(g, n)| Component::new(format!("RR{n}"), g)).collect(),
    )?;
    let rep = expander_refute(&fam, 1, SearchOptions::exact())?;
    println!("expanders at S = 1: {:?}, min ratio {:?}", rep.status, rep.min_ratio());

    let tree = GraphFamily::single(Component::new("T3-4", Graph::regular_tree(3, 4)))?;
    let rep = girth_refute(&tree, 4, DegreePolicy::FullDegreeOnly, SearchOptions::exact())?;
    println!("tree at S = 4: {:?}, min ratio {:?}", rep.status, rep.min_ratio());

    let cubes = cube_refute(2, &[2, 4, 6, 8], 1, 0.5, 1 << 10, SearchOptions::exact())?;
    print!("{}", cubes.to_csv());
    Ok(())
}
