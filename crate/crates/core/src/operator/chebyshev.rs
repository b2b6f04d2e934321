//! Chebyshev approximation of `√t` on `[0, M]` and its application to
//! positive operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{min_eigenvalue, op_norm, BandOperator, DENSE_NORM, NORM_TOL};

/// Uniform grid size used to measure the approximation error.
pub const GRID: usize = 10_000;
/// Relative positivity tolerance: `λ_min(A) ≥ −POSITIVITY_TOL·max(M, 1)`.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// `p(t) = Σ' c_j T_j(2t/M − 1)` (first coefficient halved).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chebyshev {
    pub m: f64,
    pub coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolant of `√t` at the `degree + 1` Chebyshev nodes of `[0, M]`.
    pub fn sqrt_on(m: f64, degree: usize) -> Self {
        let n = degree + 1;
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .map(|k| {
                        let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                        let t = 0.5 * m * (1.0 + theta.cos());
                        t.max(0.0).sqrt() * (j as f64 * theta).cos()
                    })
                    .sum();
                2.0 * s / n as f64
            })
            .collect();
        Chebyshev { m, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let u = 2.0 * t / self.m - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        0.5 * self.coeffs[0] + u * b1 - b2
    }

    /// `max |p(t) − √t|` over a uniform grid of [`GRID`] points on `[0, M]`
    /// plus a geometric refinement towards 0, where `√` is steepest.
    pub fn sup_error(&self) -> f64 {
        let uniform = (0..=GRID).map(|i| self.m * i as f64 / GRID as f64);
        let near_zero = (1..=160).map(|j| self.m * 10f64.powf(-(j as f64) / 10.0));
        uniform
            .chain(near_zero)
            .map(|t| (self.eval(t) - t.sqrt()).abs())
            .fold(0.0, f64::max)
    }

    /// `p(A)` by the matrix Clenshaw recurrence.
    pub fn apply_to(&self, a: &BandOperator) -> Result<BandOperator> {
        let id = a.eye();
        let b = a.combine(2.0 / self.m, -1.0, &id)?;
        let zero = a.scale(0.0);
        let (mut b1, mut b2) = (zero.clone(), zero);
        for &c in self.coeffs.iter().skip(1).rev() {
            let bb1 = b.compose(&b1)?;
            let b0 = bb1.combine(2.0, -1.0, &b2)?.combine(1.0, c, &id)?;
            b2 = b1;
            b1 = b0;
        }
        b.compose(&b1)?.combine(1.0, -1.0, &b2)?.combine(1.0, 0.5 * self.coeffs[0], &id)
    }
}

/// `p_n(A)` together with the measured scalar error, which bounds
/// `‖p_n(A) − √A‖` when the spectrum of `A` lies in `[0, M]`.
#[derive(Clone, Debug)]
pub struct SqrtApprox {
    pub op: BandOperator,
    pub poly: Chebyshev,
    pub sup_error: f64,
    /// `n·R`, with `R` the propagation of `A`.
    pub propagation_bound: u32,
    pub min_eigenvalue: f64,
}

/// Degree-`n` Chebyshev square root of a positive operator with `‖A‖ ≤ M`.
pub fn sqrt_calculus(a: &BandOperator, m: f64, degree: usize) -> Result<SqrtApprox> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::input("M must be positive"));
    }
    if degree == 0 {
        return Err(Error::input("degree must be at least 1"));
    }
    let scale = m.max(1.0);
    let asym = a.asymmetry();
    if asym > POSITIVITY_TOL * scale {
        return Err(Error::pre(format!("A is not self-adjoint (|A − A*| = {asym:e})")));
    }
    let lambda = if a.is_zero() { 0.0 } else { min_eigenvalue(a, DENSE_NORM) };
    if lambda < -POSITIVITY_TOL * scale {
        return Err(Error::pre(format!("A is not positive (λ_min = {lambda:e})")));
    }
    let norm = op_norm(a, NORM_TOL);
    if norm > m * (1.0 + NORM_TOL) {
        return Err(Error::pre(format!("‖A‖ = {norm} exceeds M = {m}")));
    }
    let poly = Chebyshev::sqrt_on(m, degree);
    let op = poly.apply_to(a)?;
    debug_assert!(op.propagation() <= degree as u32 * a.propagation());
    Ok(SqrtApprox {
        sup_error: poly.sup_error(),
        propagation_bound: degree as u32 * a.propagation(),
        op,
        poly,
        min_eigenvalue: lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operator::make_laplacian;
    use crate::space::FiniteMetricSpace;

    #[test]
    fn scalar_error_decreases_with_degree() {
        let errs: Vec<f64> = [4, 8, 16, 32].iter().map(|&n| Chebyshev::sqrt_on(4.0, n).sup_error()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        let p = Chebyshev::sqrt_on(9.0, 20);
        assert!((p.eval(4.0) - 2.0).abs() <= p.sup_error());
    }

    #[test]
    fn identity_and_diagonal() {
        let s = FiniteMetricSpace::from_graph(&Graph::path(2));
        let all = s.all_points();
        let id = crate::operator::BandOperator::identity(&s, &all, vec![1.0; 2]).unwrap();
        let r = sqrt_calculus(&id, 1.0, 8).unwrap();
        let v = r.op.get(0, 0).unwrap()[0];
        assert!((v - r.poly.eval(1.0)).abs() < 1e-12);
        assert!((v - 1.0).abs() <= r.sup_error);
        assert_eq!(r.op.propagation(), 0);

        let d = crate::operator::BandOperator::diagonal(&s, &all, vec![1.0; 2], &[0.0, 5.0]).unwrap();
        let r = sqrt_calculus(&d, 5.0, 10).unwrap();
        assert!(r.op.get(0, 0).map_or(0.0, |v| v[0]).abs() <= r.sup_error);
        assert!((r.op.get(1, 1).unwrap()[0] - 5f64.sqrt()).abs() <= r.sup_error);
    }

    #[test]
    fn square_of_root_on_cycle() {
        let c = FiniteMetricSpace::from_graph(&Graph::cycle(6));
        let lap = make_laplacian(&c, &c.all_points(), 1).unwrap();
        let m = lap.norm;
        let r = sqrt_calculus(&lap.a, m, 12).unwrap();
        assert!(r.op.propagation() <= r.propagation_bound);
        let diff = r.op.compose(&r.op).unwrap().combine(1.0, -1.0, &lap.a).unwrap();
        let err = op_norm(&diff, 1e-10);
        assert!(err <= (2.0 * m.sqrt() + r.sup_error) * r.sup_error, "{err}");
    }

    #[test]
    fn rejects_non_positive() {
        let s = FiniteMetricSpace::from_graph(&Graph::path(2));
        let all = s.all_points();
        let d = crate::operator::BandOperator::diagonal(&s, &all, vec![1.0; 2], &[-1.0, 1.0]).unwrap();
        assert!(matches!(sqrt_calculus(&d, 1.0, 4), Err(Error::Precondition(_))));
    }
}
