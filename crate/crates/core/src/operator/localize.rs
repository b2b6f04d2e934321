//! Localized norms: the best unit vector supported in a ball of radius `S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{PointId, PointSet};

use super::{op_norm, sqrt_calculus, BandOperator, MAX_ITER, NORM_TOL};

/// Above this Gram dimension the per-ball eigenproblem uses power iteration
/// instead of Jacobi.
const DENSE_GRAM: usize = 200;

/// A unit vector of bounded support and the value it attains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizedVector {
    /// Coordinates over the operator's support (local order, `block` values
    /// per point).
    pub phi: Vec<f64>,
    /// Global ids where `φ` is nonzero.
    pub support: PointSet,
    pub support_diameter: u32,
    /// Radius of the ball searched; `support_diameter ≤ 2·ball_radius`.
    pub ball_radius: u32,
    pub centre: PointId,
    /// `‖Tφ‖` (or `⟨φ, Aφ⟩` for quadratic localization).
    pub value: f64,
    /// `‖φ‖_{ℓ²(μ)}`, equal to 1 up to rounding.
    pub norm: f64,
}

impl LocalizedVector {
    fn new(t: &BandOperator, phi: Vec<f64>, ball_radius: u32, centre: usize, value: f64) -> Self {
        let k = t.block();
        let local: Vec<usize> = (0..t.len())
            .filter(|&p| phi[p * k..(p + 1) * k].iter().any(|&v| v != 0.0))
            .collect();
        let support_diameter = t.local_space().diameter(&PointSet::new(local.clone()));
        LocalizedVector {
            norm: t.vector_norm(&phi),
            support: PointSet::new(local.iter().map(|&p| t.points()[p]).collect()),
            support_diameter,
            ball_radius,
            centre: t.points()[centre],
            value,
            phi,
        }
    }
}

/// Top singular pair of `T` restricted to columns in `ball`, returned as
/// (measured `‖Tφ‖`, unit `φ`).
fn ball_top(t: &BandOperator, columns: &[Vec<(usize, usize)>], sw: &[f64], ball: &[usize], tol: f64) -> (f64, Vec<f64>) {
    let k = t.block();
    let kk = k * k;
    let g = ball.len() * k;
    let mut row_slot = std::collections::HashMap::new();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(g);
    for &p in ball {
        for a in 0..k {
            let mut col = Vec::new();
            for &(q, e) in &columns[p] {
                let b = &t.vals[e * kk..(e + 1) * kk];
                for r in 0..k {
                    let v = b[r * k + a];
                    if v != 0.0 {
                        let next = row_slot.len();
                        let slot = *row_slot.entry(q * k + r).or_insert(next);
                        col.push((slot, sw[q * k + r] / sw[p * k + a] * v));
                    }
                }
            }
            cols.push(col);
        }
    }
    let rows = row_slot.len();
    let mut dense = vec![0.0; rows * g];
    for (c, col) in cols.iter().enumerate() {
        for &(r, v) in col {
            dense[r * g + c] = v;
        }
    }
    let mut gram = vec![0.0; g * g];
    for r in 0..rows {
        let row = &dense[r * g..(r + 1) * g];
        for i in 0..g {
            if row[i] == 0.0 {
                continue;
            }
            for j in i..g {
                gram[i * g + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..g {
        for j in 0..i {
            gram[i * g + j] = gram[j * g + i];
        }
    }
    let v = if g <= DENSE_GRAM {
        let (_, vecs) = linalg::sym_eigen(&gram, g);
        vecs.into_iter().last().expect("nonempty ball")
    } else {
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..g {
                out[i] = linalg::dot(&gram[i * g..(i + 1) * g], x);
            }
        };
        linalg::power_psd(g, &apply, None, 0xBA11, 3, tol, MAX_ITER).vector
    };
    let mut phi = vec![0.0; t.dim()];
    for (idx, &p) in ball.iter().enumerate() {
        for a in 0..k {
            phi[p * k + a] = v[idx * k + a] / sw[p * k + a];
        }
    }
    let mut out = vec![0.0; t.dim()];
    t.apply(&phi, &mut out);
    (t.vector_norm(&out) / t.vector_norm(&phi), phi)
}

/// Searches every ball `B(x; S)` of the support for the unit vector
/// maximising `‖Tφ‖`. The result is a certified lower bound on the
/// localized norm at support diameter `support_diameter`.
pub fn localized_norm(t: &BandOperator, s: u32, tol: f64) -> LocalizedVector {
    let k = t.block();
    let n = t.len();
    if t.is_zero() {
        let mut phi = vec![0.0; t.dim()];
        phi[0] = 1.0 / t.weights()[0].sqrt();
        return LocalizedVector::new(t, phi, s, 0, 0.0);
    }
    let mut columns: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for i in 0..n {
        for e in t.row_ptr[i]..t.row_ptr[i + 1] {
            columns[t.cols[e]].push((i, e));
        }
    }
    let sw: Vec<f64> = (0..t.dim()).map(|c| t.weights()[c / k].sqrt()).collect();
    let tol = if tol > 0.0 { tol } else { NORM_TOL };
    let best = (0..n)
        .into_par_iter()
        .map(|x| {
            let ball = t.local_space().ball(x, s);
            let (value, phi) = ball_top(t, &columns, &sw, ball.as_slice(), tol);
            (value, x, phi)
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("nonempty support");
    let (value, centre, mut phi) = best;
    let norm = t.vector_norm(&phi);
    phi.iter_mut().for_each(|v| *v /= norm);
    LocalizedVector::new(t, phi, s, centre, value)
}

/// Localization of the quadratic form of a positive operator through its
/// polynomial square root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLocalization {
    /// `ψ`, with `value = ⟨ψ, Aψ⟩`.
    pub vector: LocalizedVector,
    pub norm_a: f64,
    /// `⟨ψ, Aψ⟩ / ‖A‖`.
    pub ratio: f64,
    pub degree: usize,
    pub sup_error: f64,
    /// `n·R`.
    pub propagation_bound: u32,
    /// `‖p_n(A)‖`.
    pub poly_norm: f64,
    /// `‖p_n(A)ψ‖`.
    pub poly_value: f64,
    /// `‖p_n(A)ψ‖ / ‖p_n(A)‖`.
    pub c_poly: f64,
    /// `c·√‖A‖ − ε(1 + c)` with `c = c_poly`, `ε = sup_error`.
    pub lemma_bound: f64,
    /// `√⟨ψ,Aψ⟩ − (‖p_n(A)ψ‖ − ε)`; nonnegative when the spectral bound holds.
    pub chain_slack: f64,
}

/// Runs [`localized_norm`] on `p_n(A)` and reports `⟨ψ, Aψ⟩` for the vector
/// found.
pub fn quadratic_localization(a: &BandOperator, s: u32, degree: usize, tol: f64) -> Result<QuadraticLocalization> {
    let norm_a = op_norm(a, NORM_TOL);
    if norm_a <= 0.0 {
        return Err(Error::input("A = 0: nothing to localize"));
    }
    let root = sqrt_calculus(a, norm_a * (1.0 + NORM_TOL), degree)?;
    let mut vector = localized_norm(&root.op, s, tol);
    let mut out = vec![0.0; a.dim()];
    a.apply(&vector.phi, &mut out);
    let quad = a.inner(&vector.phi, &out);
    let poly_norm = op_norm(&root.op, NORM_TOL);
    let poly_value = vector.value;
    let eps = root.sup_error;
    let c_poly = if poly_norm > 0.0 { poly_value / poly_norm } else { 0.0 };
    vector.value = quad;
    Ok(QuadraticLocalization {
        ratio: quad / norm_a,
        norm_a,
        degree,
        sup_error: eps,
        propagation_bound: root.propagation_bound,
        poly_norm,
        poly_value,
        c_poly,
        lemma_bound: c_poly * norm_a.sqrt() - eps * (1.0 + c_poly),
        chain_slack: quad.max(0.0).sqrt() - (poly_value - eps),
        vector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operator::make_laplacian;
    use crate::space::FiniteMetricSpace;

    #[test]
    fn identity_localizes_to_a_point() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(5));
        let id = BandOperator::identity(&p, &p.all_points(), vec![0.5, 1.0, 2.0, 1.0, 1.0]).unwrap();
        let v = localized_norm(&id, 0, NORM_TOL);
        assert!((v.value - 1.0).abs() < 1e-12);
        assert_eq!(v.support.len(), 1);
        assert!((v.norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cycle_window() {
        let c = FiniteMetricSpace::from_graph(&Graph::cycle(100));
        let lap = make_laplacian(&c, &c.all_points(), 1).unwrap();
        let v = localized_norm(&lap.delta, 20, NORM_TOL);
        assert!(v.value >= 3.9, "{}", v.value);
        assert!(v.value <= lap.norm + 1e-8);
        assert!(v.support_diameter <= 40);
    }

    #[test]
    fn two_far_blocks() {
        // rank one: T = u uᵀ with u = ½(δ₀ + δ₁ + δ₁₈ + δ₁₉) on P₂₀
        let s = FiniteMetricSpace::from_graph(&Graph::path(20));
        let ends = [0, 1, 18, 19];
        let entries = ends.iter().flat_map(|&x| ends.iter().map(move |&y| (x, y, 0.25)));
        let t = BandOperator::scalar(&s, &s.all_points(), vec![1.0; 20], entries).unwrap();
        let full = op_norm(&t, NORM_TOL);
        let loc = localized_norm(&t, 1, NORM_TOL);
        assert!((full - 1.0).abs() < 1e-8);
        assert!((loc.value - 0.5f64.sqrt()).abs() < 1e-9, "{}", loc.value);
        assert!(localized_norm(&t, 19, NORM_TOL).value > 1.0 - 1e-9);
    }

    #[test]
    fn quadratic_on_path() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(200));
        let lap = make_laplacian(&p, &p.all_points(), 1).unwrap();
        let q = quadratic_localization(&lap.a, 40, 12, NORM_TOL).unwrap();
        assert!(q.ratio >= 0.9, "{}", q.ratio);
        assert!(q.chain_slack >= -1e-9);
        assert!(q.vector.value.sqrt() >= q.lemma_bound - 1e-9);
    }

    #[test]
    fn zero_is_rejected() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(3));
        let z = BandOperator::identity(&p, &p.all_points(), vec![1.0; 3]).unwrap().scale(0.0);
        assert!(quadratic_localization(&z, 1, 4, NORM_TOL).is_err());
    }
}
