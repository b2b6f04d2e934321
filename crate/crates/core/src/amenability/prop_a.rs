//! Fields of probability measures `x ↦ ξ_x` and the extraction of a
//! function with small variation from one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, PointId, PointSet, ProbMeasure};

use super::variational::VariationalWitness;

/// `x ↦ ξ_x`, each `ξ_x` a finitely supported probability measure stored
/// as sorted `(point, weight)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropAField {
    fields: Vec<Vec<(PointId, f64)>>,
}

impl PropAField {
    pub fn new(mut fields: Vec<Vec<(PointId, f64)>>) -> Result<Self> {
        let n = fields.len();
        for (x, f) in fields.iter_mut().enumerate() {
            f.retain(|&(_, w)| w != 0.0);
            f.sort_by_key(|&(z, _)| z);
            if f.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::input(format!("ξ_{x} repeats a point")));
            }
            if let Some(&(z, _)) = f.iter().find(|&&(z, _)| z >= n) {
                return Err(Error::InvalidPoint { id: z, len: n });
            }
            if f.iter().any(|&(_, w)| w < 0.0 || !w.is_finite()) {
                return Err(Error::input(format!("ξ_{x} has a negative weight")));
            }
            let total: f64 = f.iter().map(|&(_, w)| w).sum();
            if (total - 1.0).abs() > ProbMeasure::SUM_TOLERANCE {
                return Err(Error::input(format!("ξ_{x} has total mass {total}")));
            }
        }
        Ok(PropAField { fields })
    }

    /// `ξ_x = δ_x`.
    pub fn dirac(n: usize) -> Self {
        PropAField {
            fields: (0..n).map(|x| vec![(x, 1.0)]).collect(),
        }
    }

    /// `ξ_x` uniform on `B(x; s)`.
    pub fn uniform_balls(space: &FiniteMetricSpace, s: u32) -> Self {
        let fields = (0..space.len())
            .map(|x| {
                let ball = space.ball(x, s);
                let w = 1.0 / ball.len() as f64;
                ball.iter().map(|z| (z, w)).collect()
            })
            .collect();
        PropAField { fields }
    }

    /// Every `ξ_x` uniform on the same set.
    pub fn constant_uniform(n: usize, on: &PointSet) -> Self {
        let w = 1.0 / on.len() as f64;
        let f: Vec<(PointId, f64)> = on.iter().map(|z| (z, w)).collect();
        PropAField {
            fields: vec![f; n],
        }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn at(&self, x: PointId) -> &[(PointId, f64)] {
        &self.fields[x]
    }

    /// `ξ_x(z)`.
    pub fn value(&self, x: PointId, z: PointId) -> f64 {
        match self.fields[x].binary_search_by_key(&z, |&(p, _)| p) {
            Ok(i) => self.fields[x][i].1,
            Err(_) => 0.0,
        }
    }

    /// Restricts every `ξ_x` to `f` and renormalises. Returns the new field
    /// and whether anything changed. Points whose measure misses `f`
    /// entirely get `δ_x`.
    pub fn restrict(&self, f: &PointSet) -> (PropAField, bool) {
        let mut changed = false;
        let fields = self
            .fields
            .iter()
            .enumerate()
            .map(|(x, fx)| {
                let kept: Vec<(PointId, f64)> = fx.iter().copied().filter(|&(z, _)| f.contains(z)).collect();
                if kept.len() == fx.len() {
                    return kept;
                }
                changed = true;
                let total: f64 = kept.iter().map(|&(_, w)| w).sum();
                if total > 0.0 {
                    kept.into_iter().map(|(z, w)| (z, w / total)).collect()
                } else {
                    vec![(x, 1.0)]
                }
            })
            .collect();
        (PropAField { fields }, changed)
    }
}

fn l1_distance(a: &[(PointId, f64)], b: &[(PointId, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(za, wa)), Some(&(zb, wb))) if za == zb => {
                acc += (wa - wb).abs();
                i += 1;
                j += 1;
            }
            (Some(&(za, wa)), Some(&(zb, _))) if za < zb => {
                acc += wa;
                i += 1;
            }
            (Some(_), Some(&(_, wb))) => {
                acc += wb;
                j += 1;
            }
            (Some(&(_, wa)), None) => {
                acc += wa;
                i += 1;
            }
            (None, Some(&(_, wb))) => {
                acc += wb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropADefect {
    /// `max_{d(x,y)≤R} ‖ξ_x − ξ_y‖₁`.
    pub defect: f64,
    pub pair: Option<(PointId, PointId)>,
    /// `max_x max_{z ∈ supp ξ_x} d(x, z)`.
    pub support_radius: u32,
}

/// Exact defect over all pairs at distance at most `R` (within `among`, or
/// the whole space).
pub fn property_a_defect(space: &FiniteMetricSpace, xi: &PropAField, r: u32) -> Result<PropADefect> {
    defect_among(space, xi, r, &space.all_points())
}

fn defect_among(space: &FiniteMetricSpace, xi: &PropAField, r: u32, among: &PointSet) -> Result<PropADefect> {
    if xi.len() != space.len() {
        return Err(Error::input("field must be defined on every point"));
    }
    let mut defect = 0.0;
    let mut pair = None;
    let ids = among.as_slice();
    for (i, &x) in ids.iter().enumerate() {
        for &y in &ids[i + 1..] {
            if space.d(x, y) <= r {
                let d = l1_distance(xi.at(x), xi.at(y));
                if d > defect {
                    defect = d;
                    pair = Some((x, y));
                }
            }
        }
    }
    let support_radius = ids
        .iter()
        .flat_map(|&x| xi.at(x).iter().map(move |&(z, _)| space.d(x, z)))
        .max()
        .unwrap_or(0);
    Ok(PropADefect {
        defect,
        pair,
        support_radius,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropAExtraction {
    pub witness: VariationalWitness,
    pub z0: PointId,
    /// Defect of the (restricted) field over pairs in `supp μ`.
    pub defect: f64,
    /// Largest ball size at radius `R`.
    pub n_r: usize,
    /// `(N_R − 1)·defect`, which the averaging argument guarantees.
    pub bound: f64,
    /// True if `ξ` had to be restricted to `supp μ`.
    pub restricted: bool,
}

/// `φ(x) = ξ_x(z₀)` for the `z₀ ∈ supp μ` giving the smallest variation
/// ratio.
pub fn property_a_to_folner(
    space: &FiniteMetricSpace,
    xi: &PropAField,
    mu: &ProbMeasure,
    r: u32,
) -> Result<PropAExtraction> {
    if xi.len() != space.len() || mu.len() != space.len() {
        return Err(Error::input("field and measure must be defined on every point"));
    }
    let f = mu.support();
    let (field, restricted) = xi.restrict(&f);
    let d = defect_among(space, &field, r, &f)?;
    let n = space.len();
    let mut best: Option<(f64, PointId, VariationalWitness)> = None;
    for z0 in f.iter() {
        let mut phi = vec![0.0; n];
        for x in f.iter() {
            phi[x] = field.value(x, z0);
        }
        let w = VariationalWitness::from_phi(space, mu, phi, r, None);
        if w.rhs <= 0.0 {
            continue;
        }
        if best.as_ref().is_none_or(|(ratio, _, _)| w.ratio < *ratio) {
            best = Some((w.ratio, z0, w));
        }
    }
    let (_, z0, witness) = best.ok_or_else(|| Error::input("no z₀ gives a nonzero function"))?;
    let n_r = space.max_ball_size(r);
    Ok(PropAExtraction {
        witness,
        z0,
        defect: d.defect,
        n_r,
        bound: (n_r.saturating_sub(1)) as f64 * d.defect,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn defect_examples() {
        let c12 = FiniteMetricSpace::from_graph(&Graph::cycle(12));
        let d = property_a_defect(&c12, &PropAField::dirac(12), 1).unwrap();
        assert_eq!(d.defect, 2.0);
        let all = c12.all_points();
        let d = property_a_defect(&c12, &PropAField::constant_uniform(12, &all), 3).unwrap();
        assert_eq!(d.defect, 0.0);
        let d = property_a_defect(&c12, &PropAField::uniform_balls(&c12, 2), 1).unwrap();
        assert!((d.defect - 0.4).abs() < 1e-12);
        assert_eq!(d.support_radius, 2);
    }

    #[test]
    fn dirac_field_extraction() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(10));
        let mu = ProbMeasure::uniform(10).unwrap();
        let e = property_a_to_folner(&p, &PropAField::dirac(10), &mu, 1).unwrap();
        // φ = χ_{z0}: lhs = μ(z0)·deg + Σ_{neighbours} μ = 2·deg/10, rhs = 1/10
        assert_eq!(e.z0, 0);
        assert!((e.witness.ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_gives_zero() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(10));
        let mu = ProbMeasure::uniform(10).unwrap();
        let xi = PropAField::constant_uniform(10, &p.all_points());
        let e = property_a_to_folner(&p, &xi, &mu, 1).unwrap();
        assert_eq!(e.witness.lhs, 0.0);
    }

    #[test]
    fn averaging_bound_on_path() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(50));
        let mu = ProbMeasure::uniform(50).unwrap();
        let xi = PropAField::uniform_balls(&p, 3);
        let e = property_a_to_folner(&p, &xi, &mu, 1).unwrap();
        assert!(e.witness.ratio < e.n_r as f64 * e.defect);
        assert!(e.witness.ratio <= e.bound + 1e-12);
    }
}
