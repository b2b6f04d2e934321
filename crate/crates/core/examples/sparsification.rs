//! Greedy sparsification of a measure, the Følner piece it contains, and a
//! two-colour interval cover turned into a weak sparsification.

use coarse_lab::amenability::SearchOptions;
use coarse_lab::sparsification::{
    accounting_total, decomposition_to_folner, fad_to_wmsp, greedy_sparsify, verify_fad, verify_msp, AsdimDecomposition,
};
use coarse_lab::{FiniteMetricSpace, Graph, PointSet, ProbMeasure};

fn main() -> coarse_lab::Result<()> {
    let p = FiniteMetricSpace::from_graph(&Graph::path(50));
    let mu = ProbMeasure::uniform(50)?;
    let eps = 1.0;
    let d = greedy_sparsify(&p, &mu, 2, eps, 6, SearchOptions::exact())?;
    let c = 1.0 / (1.0 + eps);
    let report = verify_msp(&p, &mu, &d.pieces, 2, 6, c);
    println!(
        "{} pieces carrying mass {:.3} (valid at c = {c}: {}), accounting {:.12}",
        d.pieces.len(),
        d.mass,
        report.valid(),
        accounting_total(&d)
    );
    let w = decomposition_to_folner(&p, &mu, &d, 1, c)?;
    println!("Følner piece {:?}, ratio {:.3}", w.set.as_slice(), w.ratio);

    let p100 = FiniteMetricSpace::from_graph(&Graph::path(100));
    let cover = AsdimDecomposition::alternating_intervals(100, 5, 2);
    println!("interval cover valid: {}", verify_fad(&p100, &cover, 2).valid());
    let f = PointSet::new((0..100).filter(|x| x % 3 == 0).collect());
    let weak = fad_to_wmsp(&p100, &cover, &f)?;
    println!("captured {:.3} of F with {} pieces", weak.mass, weak.pieces.len());
    Ok(())
}
