//! From norm localisation of `A_R = ‖Δ_R‖·I − Δ_R` to a function with
//! small `ℓ¹` variation.

use serde::{Deserialize, Serialize};

use crate::amenability::VariationalWitness;
use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, PointSet, ProbMeasure};

use super::{make_laplacian, quadratic_form_identity, quadratic_localization, NORM_TOL};

/// Every intermediate quantity of the pipeline with its measured slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnlReport {
    /// `φ = |ψ|²` with `μ` uniform on `F`.
    pub witness: VariationalWitness,
    /// `ψ` indexed by global point id (zero off `F`).
    pub psi: Vec<f64>,
    pub support_diameter: u32,
    pub ball_radius: u32,
    pub degree: usize,
    pub c_target: f64,
    /// `⟨ψ, A_R ψ⟩ / ‖A_R‖`.
    pub c_measured: f64,
    pub delta_norm: f64,
    pub n_r: usize,
    /// `⟨ψ, Δ_R ψ⟩`.
    pub quad_form: f64,
    /// `½ Σ_{d(x,y) ≤ R} |ψ(x) − ψ(y)|²`.
    pub quad_half_sum: f64,
    pub identity_residual: f64,
    /// `Σ_{x ∈ F} Σ_{y ∈ F, d(x,y) ≤ R} |φ(x) − φ(y)|`, by direct summation.
    pub variation: f64,
    /// `Σ_x |φ(x)|`.
    pub mass: f64,
    /// `variation / mass`.
    pub ratio: f64,
    /// `2√N_R·√(1−c)`.
    pub stated_constant: f64,
    /// `stated_constant·mass − variation`; may be negative.
    pub stated_slack: f64,
    /// `2√N_R·√(2‖Δ_R‖(1−c))`, which the Cauchy–Schwarz step actually
    /// yields.
    pub corrected_constant: f64,
    pub corrected_slack: f64,
    /// `2√N_R·√(2⟨ψ,Δ_Rψ⟩)`, the Cauchy–Schwarz bound before inserting `c`.
    pub cauchy_schwarz: f64,
    pub cauchy_schwarz_slack: f64,
    /// `√⟨ψ,Aψ⟩ − (‖p_n(A)ψ‖ − ε)` from the square-root step.
    pub chain_slack: f64,
    pub sup_error: f64,
    /// True when `Δ_R = 0` and `φ` is a point mass.
    pub degenerate: bool,
}

/// Builds `Δ_R` and `A_R` on `F`, localizes `A_R` at ball radius `S` with a
/// degree-`n` square root, and returns `φ = |ψ|²` with every inequality of
/// the chain re-measured.
pub fn onl_to_ula(
    space: &FiniteMetricSpace,
    f: &PointSet,
    r: u32,
    s: u32,
    degree: usize,
    c: f64,
) -> Result<OnlReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::input("c must lie in (0, 1)"));
    }
    let lap = make_laplacian(space, f, r)?;
    let n = space.len();
    let mu = ProbMeasure::uniform_on(n, f)?;
    let root_n = (lap.n_r as f64).sqrt();
    let stated = 2.0 * root_n * (1.0 - c).sqrt();

    if lap.delta.is_zero() {
        let x = f.min().expect("F is nonempty");
        let mut phi = vec![0.0; n];
        phi[x] = 1.0;
        let witness = VariationalWitness::from_phi(space, &mu, phi.clone(), r, Some(stated));
        return Ok(OnlReport {
            witness,
            psi: phi,
            support_diameter: 0,
            ball_radius: s,
            degree,
            c_target: c,
            c_measured: 1.0,
            delta_norm: 0.0,
            n_r: lap.n_r,
            quad_form: 0.0,
            quad_half_sum: 0.0,
            identity_residual: 0.0,
            variation: 0.0,
            mass: 1.0,
            ratio: 0.0,
            stated_constant: 0.0,
            stated_slack: 0.0,
            corrected_constant: 0.0,
            corrected_slack: 0.0,
            cauchy_schwarz: 0.0,
            cauchy_schwarz_slack: 0.0,
            chain_slack: 0.0,
            sup_error: 0.0,
            degenerate: true,
        });
    }

    let q = quadratic_localization(&lap.a, s, degree, NORM_TOL)?;
    if q.ratio < c {
        return Err(Error::NotAchieved(format!(
            "⟨ψ, A_R ψ⟩/‖A_R‖ = {:.6} < c = {c} at ball radius {s}",
            q.ratio
        )));
    }
    let psi_local = &q.vector.phi;
    let (quad_form, quad_half_sum) = quadratic_form_identity(&lap, psi_local);

    let ids = f.as_slice();
    let mut psi = vec![0.0; n];
    let mut phi = vec![0.0; n];
    for (i, &x) in ids.iter().enumerate() {
        psi[x] = psi_local[i];
        phi[x] = psi_local[i] * psi_local[i];
    }
    let mut variation = 0.0;
    for &x in ids {
        let row = space.row(x);
        for &y in ids {
            if row[y] <= r {
                variation += (phi[x] - phi[y]).abs();
            }
        }
    }
    let mass: f64 = ids.iter().map(|&x| phi[x].abs()).sum();
    let c_measured = q.ratio.min(1.0);
    let corrected = 2.0 * root_n * (2.0 * lap.norm * (1.0 - c_measured)).max(0.0).sqrt();
    let stated = 2.0 * root_n * (1.0 - c_measured).sqrt();
    let cs = 2.0 * root_n * (2.0 * quad_form).max(0.0).sqrt();
    let witness = VariationalWitness::from_phi(space, &mu, phi, r, Some(corrected));
    Ok(OnlReport {
        support_diameter: witness.support_diameter,
        witness,
        psi,
        ball_radius: s,
        degree,
        c_target: c,
        c_measured,
        delta_norm: lap.norm,
        n_r: lap.n_r,
        quad_form,
        quad_half_sum,
        identity_residual: (quad_form - quad_half_sum).abs(),
        variation,
        mass,
        ratio: variation / mass,
        stated_constant: stated,
        stated_slack: stated * mass - variation,
        corrected_constant: corrected,
        corrected_slack: corrected * mass - variation,
        cauchy_schwarz: cs,
        cauchy_schwarz_slack: cs * mass - variation,
        chain_slack: q.chain_slack,
        sup_error: q.sup_error,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn single_point_is_degenerate() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(5));
        let rep = onl_to_ula(&p, &PointSet::singleton(3), 1, 2, 8, 0.5).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.ratio, 0.0);
        assert_eq!(rep.witness.support(), PointSet::singleton(3));
    }

    #[test]
    fn path_pipeline() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(200));
        let rep = onl_to_ula(&p, &p.all_points(), 1, 40, 12, 0.9).unwrap();
        assert!(rep.identity_residual <= 1e-9);
        assert!(rep.corrected_slack >= 0.0);
        assert!(rep.cauchy_schwarz_slack >= 0.0);
        assert!((rep.mass - 1.0).abs() < 1e-9);
        assert!((rep.witness.ratio - rep.ratio).abs() < 1e-9);
    }

    #[test]
    fn unreachable_target() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(50));
        assert!(matches!(
            onl_to_ula(&p, &p.all_points(), 1, 0, 8, 0.999),
            Err(Error::NotAchieved(_))
        ));
    }
}
