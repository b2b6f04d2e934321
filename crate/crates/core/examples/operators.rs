//! Laplacians, their norms, polynomial square roots and the extraction of a
//! function with small ℓ¹ variation from a localized vector.

use coarse_lab::operator::{make_laplacian, onl_to_ula, op_norm, sqrt_calculus};
use coarse_lab::{FiniteMetricSpace, Graph};

fn main() -> coarse_lab::Result<()> {
    for n in [3, 4, 5, 6] {
        let c = FiniteMetricSpace::from_graph(&Graph::cycle(n));
        let lap = make_laplacian(&c, &c.all_points(), 1)?;
        println!("‖Δ₁‖ on C{n} = {:.6}", lap.norm);
    }

    let p = FiniteMetricSpace::from_graph(&Graph::path(30));
    let lap = make_laplacian(&p, &p.all_points(), 1)?;
    for degree in [4, 8, 16] {
        let root = sqrt_calculus(&lap.a, lap.norm * 1.001, degree)?;
        println!(
            "degree {degree}: sup error {:.4}, propagation ≤ {}, ‖p(A)‖ = {:.4}",
            root.sup_error,
            root.propagation_bound,
            op_norm(&root.op, 1e-9)
        );
    }

    let p = FiniteMetricSpace::from_graph(&Graph::path(200));
    let rep = onl_to_ula(&p, &p.all_points(), 1, 40, 12, 0.9)?;
    println!(
        "P200: c = {:.4}, Σ|φx−φy| / Σφ = {:.4} ≤ {:.4} (slack {:.4})",
        rep.c_measured, rep.ratio, rep.corrected_constant, rep.corrected_slack
    );
    Ok(())
}
