//! Random regular graphs, girth filtering, lattice quotients and Hamming
//! powers, with their spectral gaps.

use coarse_lab::generators::{
    cayley_quotient, hamming_power, random_regular, random_regular_with_girth, spectral_gap, BoxSpaceSpec, HAMMING_CAP,
};

fn main() -> coarse_lab::Result<()> {
    for seed in 0..3 {
        let g = random_regular(64, 3, seed)?;
        let gap = spectral_gap(&g, 1e-9);
        println!("random 3-regular, n = 64, seed {seed}: girth {:?}, λ₂ = {:.4}", g.girth(), gap.lambda2);
    }
    let g = random_regular_with_girth(128, 3, 6, 7, 1000)?;
    println!("girth-filtered 3-regular, n = 128: girth {:?}", g.girth());

    let tower = BoxSpaceSpec::dyadic_integers(3..=6);
    for level in 0..tower.levels() {
        let c = cayley_quotient(&tower, level)?;
        println!("ℤ quotient level {level}: {} vertices, girth {:?}", c.len(), c.girth());
    }
    let torus = BoxSpaceSpec::Lattice { dim: 2, moduli: vec![8] };
    println!("ℤ²/8ℤ²: {} vertices", cayley_quotient(&torus, 0)?.len());
    let cube = hamming_power(2, 6, HAMMING_CAP)?;
    println!("Hamming cube 2^6: {} vertices, degree {:?}", cube.len(), cube.regular_degree());
    Ok(())
}
