//! Isodiametric function, layered Følner sets, and the growth bound for
//! pieces of a weak sparsification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, PointSet, MEASURE_SLACK, SEPARATED};

use super::search::{self, Admissible, Problem};
use super::SearchOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isodiametric {
    pub n: u32,
    /// `A_X(n)`, the smallest diameter achieved.
    pub value: u32,
    #[serde(rename = "A")]
    pub witness: PointSet,
    /// `|∂₁A|` counted under the margin policy.
    pub boundary: usize,
    /// False when some diameter below `value` was only searched
    /// heuristically, making `value` an upper bound.
    pub exact: bool,
}

/// `A_X(n) = min{diam A : n·|∂₁A| ≤ |A|}`.
///
/// Boundary points within `margin` of the frontier (points of less than
/// maximal degree) are not counted when `margin > 0`. Diameters whose balls
/// exceed the cap are searched heuristically.
pub fn isodiametric(space: &FiniteMetricSpace, n: u32, margin: u32, cap: usize) -> Result<Isodiametric> {
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    if space.is_empty() {
        return Err(Error::input("empty space"));
    }
    let len = space.len();
    let boundary_weights: Vec<f64> = if margin > 0 {
        let frontier = space.frontier();
        (0..len)
            .map(|y| if space.dist_to_set(y, &frontier) <= margin { 0.0 } else { 1.0 })
            .collect()
    } else {
        vec![1.0; len]
    };
    let max_d = space.max_finite_distance();
    let mut exact = true;
    for d in 0..=max_d {
        let base = Problem {
            space,
            allowed: vec![true; len],
            mass_weights: vec![1.0; len],
            boundary_weights: boundary_weights.clone(),
            r: 1,
            admissible: Admissible::Diameter(d),
            mode: search::SearchMode::Exact,
            cap,
        };
        let found = match search::minimize_ratio(&base) {
            Ok(c) => c,
            Err(Error::Capacity { .. }) => {
                exact = false;
                let opts = SearchOptions::heuristic();
                search::minimize_ratio(&base.clone().with_mode(opts.mode, cap))?
            }
            Err(e) => return Err(e),
        };
        if let Some(c) = found {
            if n as f64 * c.boundary <= c.mass {
                return Ok(Isodiametric {
                    n,
                    value: c.diameter,
                    witness: c.set,
                    boundary: c.boundary as usize,
                    exact,
                });
            }
        }
    }
    Err(Error::NoWitness(format!(
        "no set with n·|∂₁A| <= |A| for n = {n} (space too small)"
    )))
}

/// One layer `A = N_m(E)` of a telescoping product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub m: u32,
    #[serde(rename = "A")]
    pub set: PointSet,
    /// `|N₁(A)| / |A|`.
    pub growth: f64,
    /// `(2/c)^{1/R}`.
    pub bound: f64,
    pub diameter: u32,
    /// All layer growths `|N_{m+1}E| / |N_m E|`, `m = 0..R`.
    pub profile: Vec<f64>,
}

/// First `m < R` with `|N₁(N_m E)| / |N_m E| ≤ (2/c)^{1/R}`, given
/// `|N_R E| ≤ (2/c)|E|`.
pub fn layered_folner(space: &FiniteMetricSpace, e: &PointSet, r: u32, c: f64) -> Result<Layer> {
    if r == 0 {
        return Err(Error::input("R must be at least 1"));
    }
    if e.is_empty() {
        return Err(Error::input("E is empty"));
    }
    if !(c > 0.0) {
        return Err(Error::input("c must be positive"));
    }
    let growth_total = space.neighborhood(e, r)?.len() as f64;
    if growth_total > 2.0 / c * e.len() as f64 + MEASURE_SLACK {
        return Err(Error::pre(format!(
            "|N_R(E)| = {growth_total} exceeds (2/c)|E| = {}",
            2.0 / c * e.len() as f64
        )));
    }
    let bound = (2.0 / c).powf(1.0 / r as f64);
    let mut layers = vec![e.clone()];
    for m in 1..=r {
        layers.push(space.neighborhood(&layers[m as usize - 1], 1)?);
    }
    let profile: Vec<f64> = (0..r as usize)
        .map(|m| layers[m + 1].len() as f64 / layers[m].len() as f64)
        .collect();
    let m = profile
        .iter()
        .position(|&g| g <= bound + MEASURE_SLACK)
        .ok_or_else(|| Error::NotAchieved("no layer met the bound (metric not geodesic?)".into()))?;
    let set = layers.swap_remove(m);
    Ok(Layer {
        m: m as u32,
        diameter: space.diameter(&set),
        set,
        growth: profile[m],
        bound,
        profile,
    })
}

/// The piece `Ω_i` minimising `|N_R(Ω_i)| / |Ω_i|`, for pieces of a weak
/// sparsification of `F` at scale `2R` with capture `c`.
pub fn wmsp_growth(
    space: &FiniteMetricSpace,
    f: &PointSet,
    pieces: &[PointSet],
    r: u32,
    c: f64,
) -> Result<(PointSet, f64)> {
    space.check_set(f)?;
    let bf = space.boundary(f, r)?.len();
    if bf >= f.len() {
        return Err(Error::pre(format!("|∂_R F| = {bf} is not < |F| = {}", f.len())));
    }
    let pieces: Vec<&PointSet> = pieces.iter().filter(|p| !p.is_empty()).collect();
    if pieces.is_empty() {
        return Err(Error::pre("decomposition has no nonempty pieces"));
    }
    let mut captured = 0;
    for (i, p) in pieces.iter().enumerate() {
        space.check_set(p)?;
        if !p.is_subset(f) {
            return Err(Error::pre(format!("piece {i} is not contained in F")));
        }
        captured += p.len();
        for (j, q) in pieces.iter().enumerate().skip(i + 1) {
            let d = space.set_distance(p, q);
            if d != SEPARATED && d <= 2 * r {
                return Err(Error::pre(format!("pieces {i} and {j} are {d} <= 2R apart")));
            }
        }
    }
    if (captured as f64) < c * f.len() as f64 {
        return Err(Error::pre(format!(
            "captured {captured} < c·|F| = {}",
            c * f.len() as f64
        )));
    }
    let mut best: Option<(f64, &PointSet)> = None;
    for p in &pieces {
        let g = space.neighborhood(p, r)?.len() as f64 / p.len() as f64;
        if best.is_none_or(|(b, bp)| g < b || (g == b && p.as_slice() < bp.as_slice())) {
            best = Some((g, p));
        }
    }
    let (g, p) = best.expect("nonempty");
    if g > 2.0 / c + MEASURE_SLACK {
        return Err(Error::NotAchieved(format!("best growth {g} exceeds 2/c")));
    }
    Ok((p.clone(), g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn cycle_values() {
        let c = FiniteMetricSpace::from_graph(&Graph::cycle(100));
        assert_eq!(isodiametric(&c, 1, 0, 20).unwrap().value, 1);
        let a2 = isodiametric(&c, 2, 0, 20).unwrap();
        assert_eq!(a2.value, 3);
        assert!(a2.exact);
    }

    #[test]
    fn complete_graphs() {
        for m in 3..7 {
            let k = FiniteMetricSpace::from_graph(&Graph::complete(m));
            assert_eq!(isodiametric(&k, 2, 0, 20).unwrap().value, 1);
        }
    }

    #[test]
    fn margin_discounts_path_ends() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(12));
        let plain = isodiametric(&p, 3, 0, 20).unwrap();
        let with_margin = isodiametric(&p, 3, 1, 20).unwrap();
        assert!(with_margin.value <= plain.value);
    }

    #[test]
    fn layered_interval() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(1000));
        let e = PointSet::range(400, 410);
        let l = layered_folner(&p, &e, 4, 1.0).unwrap();
        assert!(l.growth <= 2f64.powf(0.25));
        let l1 = layered_folner(&p, &PointSet::range(400, 402), 1, 1.0).unwrap();
        assert_eq!(l1.m, 0);
        let whole = layered_folner(&p, &p.all_points(), 3, 1.0).unwrap();
        assert_eq!(whole.growth, 1.0);
        assert!(layered_folner(&p, &PointSet::singleton(5), 4, 1.0).is_err());
    }

    #[test]
    fn wmsp_pieces_of_a_path() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(200));
        let f = p.all_points();
        let pieces: Vec<PointSet> = (0..10).map(|i| PointSet::range(20 * i, 20 * i + 15)).collect();
        let (e, g) = wmsp_growth(&p, &f, &pieces, 2, 0.5).unwrap();
        assert!(g <= 4.0);
        assert_eq!(e, pieces[0]);
        let single = wmsp_growth(&p, &f, std::slice::from_ref(&f), 2, 1.0).unwrap();
        assert_eq!(single.1, 1.0);
    }
}
