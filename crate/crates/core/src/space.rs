//! Finite metric spaces with integer distances, and the basic coarse
//! geometry on them: balls, neighbourhoods, boundaries, growth, measures and
//! coarse maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type PointId = usize;

/// Distance between points that are not connected by any finite chain
/// (different components of a disjoint union). Larger than any radius a
/// caller can ask about.
pub const SEPARATED: u32 = u32::MAX;

/// Slack used when comparing floating-point measures against strict bounds.
pub const MEASURE_SLACK: f64 = 1e-12;

/// `a < b` for measure-valued quantities, tolerating rounding noise.
pub fn measure_lt(a: f64, b: f64) -> bool {
    a < b + MEASURE_SLACK
}

/// `a <= b` for measure-valued quantities, tolerating rounding noise.
pub fn measure_le(a: f64, b: f64) -> bool {
    a <= b + MEASURE_SLACK
}

/// A finite set of points with an integer-valued metric stored as a dense
/// all-pairs matrix.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<u32>,
}

impl FiniteMetricSpace {
    /// The path metric of a graph; pairs in different components are
    /// [`SEPARATED`].
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.len();
        let mut dist = vec![SEPARATED; n * n];
        for x in 0..n {
            for (y, d) in graph.bfs(x).into_iter().enumerate() {
                if let Some(d) = d {
                    dist[x * n + y] = d;
                }
            }
        }
        FiniteMetricSpace { n, dist }
    }

    /// Builds a space from an explicit matrix (`None` = separated) and checks
    /// the metric axioms.
    pub fn from_matrix(rows: &[Vec<Option<u32>>]) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend(row.iter().map(|d| d.unwrap_or(SEPARATED)));
        }
        let space = FiniteMetricSpace { n, dist };
        space.check_metric()?;
        Ok(space)
    }

    pub(crate) fn from_raw(n: usize, dist: Vec<u32>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        FiniteMetricSpace { n, dist }
    }

    /// Verifies zero diagonal, symmetry and the triangle inequality on all
    /// finite triples.
    pub fn check_metric(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            if self.d(x, x) != 0 {
                return Err(Error::input(format!("d({x},{x}) != 0")));
            }
            for y in 0..n {
                if self.d(x, y) != self.d(y, x) {
                    return Err(Error::input(format!("d({x},{y}) is not symmetric")));
                }
                if x != y && self.d(x, y) == 0 {
                    return Err(Error::input(format!("distinct points {x},{y} at distance 0")));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let dxy = self.d(x, y) as u64;
                for z in 0..n {
                    let (a, b) = (self.d(x, z), self.d(z, y));
                    if a == SEPARATED || b == SEPARATED {
                        continue;
                    }
                    if dxy > a as u64 + b as u64 {
                        return Err(Error::input(format!(
                            "triangle inequality fails at ({x},{y}) via {z}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, x: PointId, y: PointId) -> u32 {
        self.dist[x * self.n + y]
    }

    pub fn row(&self, x: PointId) -> &[u32] {
        &self.dist[x * self.n..(x + 1) * self.n]
    }

    pub fn check_id(&self, id: PointId) -> Result<()> {
        if id < self.n {
            Ok(())
        } else {
            Err(Error::InvalidPoint { id, len: self.n })
        }
    }

    pub fn check_set(&self, set: &PointSet) -> Result<()> {
        set.iter().try_for_each(|id| self.check_id(id))
    }

    /// Largest finite distance in the space.
    pub fn max_finite_distance(&self) -> u32 {
        self.dist.iter().copied().filter(|&d| d != SEPARATED).max().unwrap_or(0)
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::from_sorted_unchecked((0..self.n).collect())
    }

    /// `B(x; r)` in increasing id order.
    pub fn ball(&self, x: PointId, r: u32) -> PointSet {
        let ids = self
            .row(x)
            .iter()
            .enumerate()
            .filter_map(|(y, &d)| (d <= r).then_some(y))
            .collect();
        PointSet::from_sorted_unchecked(ids)
    }

    /// `d(y, E)`; `SEPARATED` when `E` is empty or out of reach.
    pub fn dist_to_set(&self, y: PointId, set: &PointSet) -> u32 {
        set.iter().map(|e| self.d(y, e)).min().unwrap_or(SEPARATED)
    }

    /// `d(A, B)` = min pairwise distance.
    pub fn set_distance(&self, a: &PointSet, b: &PointSet) -> u32 {
        a.iter()
            .flat_map(|x| b.iter().map(move |y| (x, y)))
            .map(|(x, y)| self.d(x, y))
            .min()
            .unwrap_or(SEPARATED)
    }

    /// Maximum pairwise distance; 0 for sets with fewer than two points.
    pub fn diameter(&self, set: &PointSet) -> u32 {
        let ids = set.as_slice();
        let mut best = 0;
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                best = best.max(self.d(x, y));
            }
        }
        best
    }

    /// `N_R(E) = {y : d(y, E) <= R}`.
    pub fn neighborhood(&self, set: &PointSet, r: u32) -> Result<PointSet> {
        self.check_set(set)?;
        let mut mark = vec![false; self.n];
        for e in set.iter() {
            for (y, &d) in self.row(e).iter().enumerate() {
                if d <= r {
                    mark[y] = true;
                }
            }
        }
        Ok(PointSet::from_mask(&mark))
    }

    /// `∂_R E = N_R(E) \ E`.
    pub fn boundary(&self, set: &PointSet, r: u32) -> Result<PointSet> {
        let nbhd = self.neighborhood(set, r)?;
        Ok(nbhd.difference(set))
    }

    pub fn growth_profile(&self, r_max: u32) -> GrowthProfile {
        let mut table = vec![0usize; r_max as usize + 1];
        for x in 0..self.n {
            let mut counts = vec![0usize; r_max as usize + 1];
            for &d in self.row(x) {
                if d <= r_max {
                    counts[d as usize] += 1;
                }
            }
            let mut acc = 0;
            for (r, c) in counts.into_iter().enumerate() {
                acc += c;
                table[r] = table[r].max(acc);
            }
        }
        GrowthProfile { table }
    }

    /// Maximum ball size at radius `r`.
    pub fn max_ball_size(&self, r: u32) -> usize {
        (0..self.n)
            .map(|x| self.row(x).iter().filter(|&&d| d <= r).count())
            .max()
            .unwrap_or(0)
    }

    /// The graph whose edges are the pairs at distance exactly 1.
    pub fn unit_graph(&self) -> Graph {
        let n = self.n;
        let edges = (0..n).flat_map(|x| ((x + 1)..n).map(move |y| (x, y)));
        Graph::from_edges_dedup(n, edges.filter(|&(x, y)| self.d(x, y) == 1).collect::<Vec<_>>())
    }

    /// True iff every pair at finite distance `n` is joined by a chain of
    /// `n` unit steps, i.e. the metric agrees with the unit-graph path metric.
    pub fn is_coarsely_geodesic(&self) -> bool {
        let unit = self.unit_graph();
        (0..self.n).all(|x| {
            unit.bfs(x).iter().enumerate().all(|(y, chain)| match chain {
                Some(steps) => *steps == self.d(x, y),
                None => self.d(x, y) == SEPARATED,
            })
        })
    }

    /// Points whose unit-graph degree is below the maximum degree: the cut
    /// frontier of a truncated space (path ends, tree leaves).
    pub fn frontier(&self) -> PointSet {
        let unit = self.unit_graph();
        let max = unit.max_degree();
        let mask: Vec<bool> = (0..self.n).map(|x| unit.degree(x) < max).collect();
        PointSet::from_mask(&mask)
    }

    /// Restriction of the metric to `points` (relabelled in order).
    pub fn restrict(&self, points: &PointSet) -> FiniteMetricSpace {
        let ids = points.as_slice();
        let m = ids.len();
        let mut dist = Vec::with_capacity(m * m);
        for &x in ids {
            for &y in ids {
                dist.push(self.d(x, y));
            }
        }
        FiniteMetricSpace { n: m, dist }
    }
}

/// A subset of a space, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet(Vec<PointId>);

impl PointSet {
    pub fn new(mut ids: Vec<PointId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        PointSet(ids)
    }

    pub(crate) fn from_sorted_unchecked(ids: Vec<PointId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        PointSet(ids)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        PointSet(mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i)).collect())
    }

    pub fn singleton(id: PointId) -> Self {
        PointSet(vec![id])
    }

    pub fn range(start: PointId, end: PointId) -> Self {
        PointSet((start..end).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<PointId> {
        self.0
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn min(&self) -> Option<PointId> {
        self.0.first().copied()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for id in self.iter() {
            m[id] = true;
        }
        m
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PointSet::new(v)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.iter().all(|x| !other.contains(x))
    }
}

impl FromIterator<PointId> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// A probability measure on the points of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbMeasure {
    weights: Vec<f64>,
}

impl ProbMeasure {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::input(format!("weight at {i} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::input(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbMeasure { weights })
    }

    /// Normalises arbitrary nonnegative weights.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::input("weights must be nonnegative with positive total"));
        }
        Ok(ProbMeasure {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform_on(n: usize, set: &PointSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::input("uniform measure on an empty set"));
        }
        let mut weights = vec![0.0; n];
        let w = 1.0 / set.len() as f64;
        for id in set.iter() {
            if id >= n {
                return Err(Error::InvalidPoint { id, len: n });
            }
            weights[id] = w;
        }
        Ok(ProbMeasure { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        ProbMeasure::uniform_on(n, &PointSet::range(0, n))
    }

    pub fn point_mass(n: usize, at: PointId) -> Result<Self> {
        ProbMeasure::uniform_on(n, &PointSet::singleton(at))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: PointId) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> PointSet {
        PointSet(
            self.weights
                .iter()
                .enumerate()
                .filter_map(|(i, &w)| (w > 0.0).then_some(i))
                .collect(),
        )
    }

    pub fn mass(&self, set: &PointSet) -> f64 {
        set.iter().map(|x| self.weights[x]).sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `f_*μ(y) = Σ_{f(x)=y} μ(x)`.
    pub fn pushforward(&self, f: &CoarseMap) -> Result<ProbMeasure> {
        if f.domain_len() != self.len() {
            return Err(Error::input("map domain does not match the measure's space"));
        }
        let mut out = vec![0.0; f.codomain_len()];
        for (x, &w) in self.weights.iter().enumerate() {
            out[f.apply(x)] += w;
        }
        Ok(ProbMeasure { weights: out })
    }
}

impl TryFrom<Vec<f64>> for ProbMeasure {
    type Error = Error;
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        ProbMeasure::new(weights)
    }
}

impl From<ProbMeasure> for Vec<f64> {
    fn from(m: ProbMeasure) -> Vec<f64> {
        m.weights
    }
}

/// `R ↦ N_R = max_x |B(x; R)|` for `R = 0..=R_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub table: Vec<usize>,
}

impl GrowthProfile {
    pub fn at(&self, r: u32) -> usize {
        self.table[(r as usize).min(self.table.len() - 1)]
    }
}

/// A total map between finite spaces together with sampled distortion
/// tables `ρ₋ ≤ d_Y(f x, f x') ≤ ρ₊` indexed by `d_X(x, x')`.
#[derive(Clone, Debug)]
pub struct CoarseMap {
    map: Vec<PointId>,
    codomain: usize,
    rho_minus: Vec<u32>,
    rho_plus: Vec<u32>,
    fiber_bound: usize,
}

impl CoarseMap {
    /// Computes the tightest nondecreasing distortion tables for `map`.
    pub fn new(x: &FiniteMetricSpace, y: &FiniteMetricSpace, map: Vec<PointId>) -> Result<Self> {
        if map.len() != x.len() {
            return Err(Error::input(format!(
                "map has {} entries, domain has {} points",
                map.len(),
                x.len()
            )));
        }
        for &fx in &map {
            y.check_id(fx)?;
        }
        let t_max = x.max_finite_distance() as usize;
        // rho_plus(t) = max d_Y over pairs with d_X <= t
        let mut plus = vec![0u32; t_max + 1];
        // at(t) = min d_Y over pairs with d_X == t (or separated), later suffix-min'd
        let mut minus_at = vec![SEPARATED; t_max + 2];
        for a in 0..x.len() {
            for b in 0..x.len() {
                let dx = x.d(a, b);
                let dy = y.d(map[a], map[b]);
                if dx == SEPARATED {
                    minus_at[t_max + 1] = minus_at[t_max + 1].min(dy);
                    continue;
                }
                let t = dx as usize;
                plus[t] = plus[t].max(dy);
                minus_at[t] = minus_at[t].min(dy);
            }
        }
        for t in 1..plus.len() {
            plus[t] = plus[t].max(plus[t - 1]);
        }
        for t in (0..=t_max).rev() {
            minus_at[t] = minus_at[t].min(minus_at[t + 1]);
        }
        minus_at.truncate(t_max + 1);
        let mut fibers = vec![0usize; y.len()];
        for &fx in &map {
            fibers[fx] += 1;
        }
        Ok(CoarseMap {
            map,
            codomain: y.len(),
            rho_minus: minus_at,
            rho_plus: plus,
            fiber_bound: fibers.into_iter().max().unwrap_or(0).max(1),
        })
    }

    pub fn identity(x: &FiniteMetricSpace) -> Self {
        CoarseMap::new(x, x, (0..x.len()).collect()).expect("identity is a valid map")
    }

    pub fn apply(&self, x: PointId) -> PointId {
        self.map[x]
    }

    pub fn image(&self, set: &PointSet) -> PointSet {
        set.iter().map(|x| self.map[x]).collect()
    }

    /// `f⁻¹(E′) ∩ F`.
    pub fn preimage_within(&self, target: &PointSet, within: &PointSet) -> PointSet {
        within.iter().filter(|&x| target.contains(self.map[x])).collect()
    }

    pub fn domain_len(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_len(&self) -> usize {
        self.codomain
    }

    pub fn fiber_bound(&self) -> usize {
        self.fiber_bound
    }

    pub fn rho_plus(&self, t: u32) -> u32 {
        let i = (t as usize).min(self.rho_plus.len() - 1);
        self.rho_plus[i]
    }

    pub fn rho_minus(&self, t: u32) -> u32 {
        match self.rho_minus.get(t as usize) {
            Some(&v) => v,
            None => SEPARATED,
        }
    }

    /// Largest sampled `t` with `ρ₋(t) ≤ s`; bounds `d_X` of pairs whose
    /// images are at most `s` apart.
    pub fn rho_minus_inverse(&self, s: u32) -> u32 {
        self.rho_minus
            .iter()
            .rposition(|&v| v <= s)
            .map(|t| t as u32)
            .unwrap_or(0)
    }

    /// Re-checks `ρ₋(d_X) ≤ d_Y ≤ ρ₊(d_X)` on every pair.
    pub fn verify(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
        (0..x.len()).all(|a| {
            (0..x.len()).all(|b| {
                let dx = x.d(a, b);
                let dy = y.d(self.map[a], self.map[b]);
                if dx == SEPARATED {
                    return true;
                }
                self.rho_minus(dx) <= dy && dy <= self.rho_plus(dx)
            })
        })
    }
}
