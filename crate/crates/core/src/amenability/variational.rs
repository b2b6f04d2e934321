//! Passing between functions with small variation and sets with small
//! boundary (both directions), for a probability measure `μ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{measure_lt, FiniteMetricSpace, PointSet, ProbMeasure};

/// A function `φ` together with its measured variation ratio
/// `Σ_x μ(x) Σ_{d(x,y)≤R} |φ(x)−φ(y)| / Σ_x μ(x)|φ(x)|`, sums over `supp μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalWitness {
    pub phi: Vec<f64>,
    #[serde(rename = "R")]
    pub r: u32,
    pub eps: Option<f64>,
    pub support_diameter: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl VariationalWitness {
    pub fn from_phi(space: &FiniteMetricSpace, mu: &ProbMeasure, phi: Vec<f64>, r: u32, eps: Option<f64>) -> Self {
        let (lhs, rhs) = variational_ratio(space, mu, &phi, r);
        let support = PointSet::from_mask(&phi.iter().map(|&v| v != 0.0).collect::<Vec<_>>());
        VariationalWitness {
            support_diameter: space.diameter(&support),
            phi,
            r,
            eps,
            lhs,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
        }
    }

    pub fn support(&self) -> PointSet {
        PointSet::from_mask(&self.phi.iter().map(|&v| v != 0.0).collect::<Vec<_>>())
    }

    /// `lhs < ε·rhs` with measure slack.
    pub fn satisfies(&self, eps: f64) -> bool {
        self.rhs > 0.0 && measure_lt(self.lhs, eps * self.rhs)
    }
}

/// Left and right sides of the variational inequality.
pub fn variational_ratio(space: &FiniteMetricSpace, mu: &ProbMeasure, phi: &[f64], r: u32) -> (f64, f64) {
    let supp = mu.support();
    let ids = supp.as_slice();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for &x in ids {
        let w = mu.weight(x);
        rhs += w * phi[x].abs();
        let row = space.row(x);
        let inner: f64 = ids
            .iter()
            .filter(|&&y| row[y] <= r)
            .map(|&y| (phi[x] - phi[y]).abs())
            .sum();
        lhs += w * inner;
    }
    (lhs, rhs)
}

/// The superlevel set chosen from a function, with its measured ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerChoice {
    #[serde(rename = "E")]
    pub set: PointSet,
    /// `μ(∂_R E ∩ supp μ) / μ(E)`.
    pub ratio: f64,
    pub boundary: f64,
    pub mass: f64,
    pub diameter: u32,
    pub layers: usize,
}

/// Layer-cake extraction: `|φ|` restricted to `supp μ` is a positive
/// combination of indicators of its superlevel sets; returns the superlevel
/// set with the smallest boundary ratio.
pub fn variational_to_set(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    phi: &[f64],
    r: u32,
) -> Result<LayerChoice> {
    if phi.len() != space.len() || mu.len() != space.len() {
        return Err(Error::input("φ and μ must be defined on every point"));
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("φ has non-finite values"));
    }
    let supp = mu.support();
    let vals: Vec<f64> = (0..space.len())
        .map(|x| if supp.contains(x) { phi[x].abs() } else { 0.0 })
        .collect();
    let mut levels: Vec<f64> = vals.iter().copied().filter(|&v| v > 0.0).collect();
    if levels.is_empty() {
        return Err(Error::input("φ vanishes on the support of μ"));
    }
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();

    let mut best: Option<LayerChoice> = None;
    for &t in &levels {
        let layer = PointSet::from_mask(&vals.iter().map(|&v| v >= t).collect::<Vec<_>>());
        let boundary = mu.mass(&space.boundary(&layer, r)?.intersection(&supp));
        let mass = mu.mass(&layer);
        let ratio = boundary / mass;
        let diameter = space.diameter(&layer);
        let better = match &best {
            None => true,
            Some(b) => ratio
                .total_cmp(&b.ratio)
                .then_with(|| layer.cmp(&b.set))
                .then(diameter.cmp(&b.diameter))
                .is_lt(),
        };
        if better {
            best = Some(LayerChoice {
                set: layer,
                ratio,
                boundary,
                mass,
                diameter,
                layers: levels.len(),
            });
        }
    }
    Ok(best.expect("at least one level"))
}

/// The converse blow-up: from `E′` with `μ(∂_{2R}E′) < (ε/N_R) μ(E′)`,
/// `φ = χ_{N_R(E′)}` satisfies the variational inequality at `(R, ε)`.
pub fn set_to_variational(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    e_prime: &PointSet,
    r: u32,
    eps: f64,
) -> Result<VariationalWitness> {
    space.check_set(e_prime)?;
    if e_prime.is_empty() {
        return Err(Error::input("E′ is empty"));
    }
    let n_r = space.max_ball_size(r) as f64;
    let b2 = mu.mass(&space.boundary(e_prime, 2 * r)?);
    let m = mu.mass(e_prime);
    if !(m > 0.0 && measure_lt(b2, eps / n_r * m)) {
        return Err(Error::pre(format!(
            "μ(∂_{{2R}} E′) = {b2} is not < (ε/N_R)·μ(E′) = {} (N_R = {n_r})",
            eps / n_r * m
        )));
    }
    let e = space.neighborhood(e_prime, r)?;
    let mut phi = vec![0.0; space.len()];
    for x in e.iter() {
        phi[x] = 1.0;
    }
    Ok(VariationalWitness::from_phi(space, mu, phi, r, Some(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn characteristic_function_returns_its_set() {
        let s = FiniteMetricSpace::from_graph(&Graph::path(10));
        let mu = ProbMeasure::uniform(10).unwrap();
        let mut phi = vec![0.0; 10];
        (2..6).for_each(|i| phi[i] = 1.0);
        let c = variational_to_set(&s, &mu, &phi, 1).unwrap();
        assert_eq!(c.set, PointSet::range(2, 6));
        assert_eq!(c.layers, 1);
    }

    #[test]
    fn picks_the_better_of_two_layers() {
        let s = FiniteMetricSpace::from_graph(&Graph::path(10));
        let mu = ProbMeasure::uniform(10).unwrap();
        let mut phi = vec![0.0; 10];
        (1..9).for_each(|i| phi[i] = 1.0);
        (4..6).for_each(|i| phi[i] = 2.0);
        let c = variational_to_set(&s, &mu, &phi, 1).unwrap();
        // outer layer: boundary {0, 9} over 8 points; inner: {3, 6} over 2
        assert_eq!(c.set, PointSet::range(1, 9));
        assert!((c.ratio - 0.25).abs() < 1e-12);
    }

    #[test]
    fn negative_values_use_absolute_value_and_zero_is_rejected() {
        let s = FiniteMetricSpace::from_graph(&Graph::cycle(8));
        let mu = ProbMeasure::uniform(8).unwrap();
        let phi = vec![0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(variational_to_set(&s, &mu, &phi, 1).unwrap().set, PointSet::new(vec![1, 2]));
        assert!(variational_to_set(&s, &mu, &[0.0; 8], 1).is_err());
    }

    #[test]
    fn whole_support_has_zero_variation() {
        let s = FiniteMetricSpace::from_graph(&Graph::path(12));
        let mu = ProbMeasure::uniform_on(12, &PointSet::range(0, 6)).unwrap();
        let w = set_to_variational(&s, &mu, &PointSet::range(0, 6), 1, 0.5).unwrap();
        assert_eq!(w.lhs, 0.0);
        assert!(w.satisfies(0.5));
    }

    #[test]
    fn singleton_in_cycle() {
        let s = FiniteMetricSpace::from_graph(&Graph::cycle(100));
        let mu = ProbMeasure::uniform(100).unwrap();
        // μ(∂_2 {x}) = 4/100 < (ε/3)/100 needs ε > 12
        assert!(set_to_variational(&s, &mu, &PointSet::singleton(0), 1, 11.9).is_err());
        let w = set_to_variational(&s, &mu, &PointSet::singleton(0), 1, 12.5).unwrap();
        assert_eq!(w.support().len(), 3);
        assert!(w.satisfies(12.5));
    }
}
