//! Boundary profiles f(R, S) on cycles and on a truncated tree, with the
//! exponential fit and a sampled growth comparison.

use coarse_lab::certificates::{growth_compare, neg_ula_profile, ProfileOptions};
use coarse_lab::generators::{Component, GraphFamily};
use coarse_lab::Graph;

fn main() -> coarse_lab::Result<()> {
    let cycles = GraphFamily::chain(
        [25, 50, 100, 200].iter().map(|&n| Component::new(format!("C{n}"), Graph::cycle(n))).collect(),
    )?;
    let rep = neg_ula_profile(&cycles, &[1, 2], &[4, 16, 64], ProfileOptions::default())?;
    print!("{}", rep.to_csv());

    let tree = GraphFamily::single(Component::new("T3-8", Graph::regular_tree(3, 8)))?;
    let rep = neg_ula_profile(&tree, &[1, 2, 3, 4], &[8], ProfileOptions::default())?;
    for p in &rep.profile {
        println!("tree R = {}: f = {:.4}", p.r, p.f);
    }
    if let Some(fit) = &rep.fit {
        println!("fitted base {:.3}", fit.base);
    }
    if let Some(rel) = &rep.linear_lower {
        println!("R ⪯ f(R): {:?}", rel.verdict);
    }
    let f: Vec<f64> = (1..=10).map(|n| 2f64.powi(n)).collect();
    let g: Vec<f64> = (1..=10).map(f64::from).collect();
    let grid = [1.0, 2.0, 4.0, 8.0, 16.0];
    println!("2^n ⪯ n: {:?}", growth_compare(&f, &g, &grid, &grid)?.verdict);
    Ok(())
}
