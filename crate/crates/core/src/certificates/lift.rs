//! Lifting a Følner set of a lattice quotient `ℤ^d / kℤ^d` to `ℤ^d`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{cayley_quotient, lattice_coords, BoxSpaceSpec};
use crate::graph::Graph;
use crate::space::{PointId, PointSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub level: usize,
    pub modulus: u64,
    pub injectivity_radius: u32,
    pub diameter: u32,
    /// The point lifted to its own coordinates; every other point is lifted
    /// to the nearest preimage of its offset from `base`.
    pub base: PointId,
    pub lifted: Vec<Vec<i64>>,
    pub size: usize,
    pub boundary_quotient: usize,
    pub boundary_lift: usize,
    pub ratio_quotient: f64,
    pub ratio_lift: f64,
    /// Distances on `E ∪ ∂₁E` agree with their lifts.
    pub isometric: bool,
    /// `|E|` and `|∂₁E|` agree with their lifts.
    pub preserved: bool,
    pub eps: f64,
    /// `|∂₁Ẽ| < ε|Ẽ|` in `ℤ^d`.
    pub folner: bool,
}

/// Radius below which the covering `ℤ^d → ℤ^d/kℤ^d` is isometric on balls:
/// `⌊(k − 1)/2⌋`. For `d = 1` this is `⌊(girth − 1)/2⌋` of the cycle.
pub fn injectivity_radius(spec: &BoxSpaceSpec, level: usize) -> Result<u32> {
    match spec {
        BoxSpaceSpec::Lattice { moduli, .. } => moduli
            .get(level)
            .map(|&k| ((k.saturating_sub(1)) / 2).min(u32::MAX as u64) as u32)
            .ok_or_else(|| Error::input(format!("level {level} out of range"))),
        BoxSpaceSpec::Tables { .. } => Err(Error::input(
            "lifting needs a lattice tower: explicit tables carry no ambient group",
        )),
    }
}

/// Distances from `x` in a connected graph.
fn bfs_from(g: &Graph, x: usize) -> Vec<u32> {
    g.bfs(x).into_iter().map(|d| d.unwrap_or(u32::MAX)).collect()
}

/// Lifts `E ⊆ X_level` through the symmetric fundamental domain around its
/// smallest point and checks that size, boundary and distances survive.
pub fn box_lift(spec: &BoxSpaceSpec, level: usize, e: &PointSet, eps: f64) -> Result<LiftReport> {
    let rho = injectivity_radius(spec, level)?;
    let BoxSpaceSpec::Lattice { dim, moduli } = spec else {
        unreachable!("injectivity_radius rejects table towers")
    };
    let (dim, k) = (*dim, moduli[level]);
    let g = cayley_quotient(spec, level)?;
    if e.is_empty() {
        return Err(Error::input("E is empty"));
    }
    if let Some(bad) = e.iter().find(|&x| x >= g.len()) {
        return Err(Error::InvalidPoint { id: bad, len: g.len() });
    }
    let ids = e.as_slice();
    let rows: HashMap<usize, Vec<u32>> = ids.iter().map(|&x| (x, bfs_from(&g, x))).collect();
    let diameter = ids
        .iter()
        .flat_map(|x| ids.iter().map(|&y| rows[x][y]))
        .max()
        .unwrap_or(0);
    if diameter as u64 + 2 >= rho as u64 {
        let suggestion = (level..moduli.len())
            .find(|&l| ((moduli[l] - 1) / 2) > diameter as u64 + 2)
            .map_or_else(
                || "none in this tower".to_string(),
                |l| format!("level {l} (modulus {})", moduli[l]),
            );
        return Err(Error::Injectivity {
            radius: rho,
            needed: diameter + 2,
            suggestion,
        });
    }
    let in_e = e.mask(g.len());
    let boundary: Vec<usize> = {
        let mut b: Vec<usize> = ids
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|&y| !in_e[y])
            .collect();
        b.sort_unstable();
        b.dedup();
        b
    };
    if !((boundary.len() as f64) < eps * ids.len() as f64) {
        return Err(Error::pre(format!(
            "|∂₁E| = {} is not below ε|E| = {}",
            boundary.len(),
            eps * ids.len() as f64
        )));
    }

    let base = ids[0];
    let origin = lattice_coords(base, dim, k);
    let ki = k as i64;
    let lift = |x: usize| -> Vec<i64> {
        lattice_coords(x, dim, k)
            .iter()
            .zip(&origin)
            .map(|(&c, &o)| {
                let mut delta = (c as i64 - o as i64).rem_euclid(ki);
                if delta > ki / 2 {
                    delta -= ki;
                }
                o as i64 + delta
            })
            .collect()
    };
    let l1 = |a: &[i64], b: &[i64]| -> u64 { a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum() };

    // isometry on E ∪ ∂₁E
    let hood: Vec<usize> = ids.iter().copied().chain(boundary.iter().copied()).collect();
    let hood_lifts: Vec<Vec<i64>> = hood.iter().map(|&x| lift(x)).collect();
    let hood_rows: Vec<Vec<u32>> = hood.iter().map(|&x| bfs_from(&g, x)).collect();
    let mut isometric = true;
    for i in 0..hood.len() {
        for j in 0..hood.len() {
            if l1(&hood_lifts[i], &hood_lifts[j]) != hood_rows[i][hood[j]] as u64 {
                isometric = false;
            }
        }
    }

    let lifted: Vec<Vec<i64>> = hood_lifts[..ids.len()].to_vec();
    let lifted_set: HashSet<&Vec<i64>> = lifted.iter().collect();
    let mut lift_boundary: HashSet<Vec<i64>> = HashSet::new();
    for p in &lifted {
        for i in 0..dim {
            for step in [-1i64, 1] {
                let mut q = p.clone();
                q[i] += step;
                if !lifted_set.contains(&q) {
                    lift_boundary.insert(q);
                }
            }
        }
    }
    let size = lifted_set.len();
    let ratio_lift = lift_boundary.len() as f64 / size as f64;
    Ok(LiftReport {
        level,
        modulus: k,
        injectivity_radius: rho,
        diameter,
        base,
        size,
        boundary_quotient: boundary.len(),
        boundary_lift: lift_boundary.len(),
        ratio_quotient: boundary.len() as f64 / ids.len() as f64,
        ratio_lift,
        isometric,
        preserved: size == ids.len() && lift_boundary.len() == boundary.len(),
        eps,
        folner: ratio_lift < eps,
        lifted,
    })
}
