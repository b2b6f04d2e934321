//! Example families: spaces of graphs, random regular graphs with girth
//! filtering, Cayley graphs of finite quotients, Hamming powers, and a
//! spectral-gap estimate for certifying expansion.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::space::{FiniteMetricSpace, PointSet, SEPARATED};

/// One named member of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub graph: Graph,
}

impl Component {
    pub fn new(name: impl Into<String>, graph: Graph) -> Self {
        Component {
            name: name.into(),
            graph,
        }
    }
}

/// A disjoint union of connected graphs with the basepoint-chain metric
/// `d(x, y) = d(x, b_m) + p_m + p_n + d(b_n, y)` between members `m ≠ n`.
#[derive(Clone, Debug)]
pub struct GraphFamily {
    components: Vec<Component>,
    basepoints: Vec<usize>,
    pads: Vec<u32>,
    offsets: Vec<usize>,
    space: FiniteMetricSpace,
}

/// Builds a family. `basepoints` defaults to vertex 0 of every member.
pub fn assemble_family(
    components: Vec<Component>,
    basepoints: Option<Vec<usize>>,
    pads: Vec<u32>,
) -> Result<GraphFamily> {
    let k = components.len();
    if k == 0 {
        return Err(Error::input("a family needs at least one component"));
    }
    if pads.len() != k {
        return Err(Error::input(format!("{} pads for {k} components", pads.len())));
    }
    if pads[0] == 0 || pads.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("pads must be strictly increasing positive integers"));
    }
    let basepoints = basepoints.unwrap_or_else(|| vec![0; k]);
    if basepoints.len() != k {
        return Err(Error::input("one basepoint per component is required"));
    }
    for (c, &b) in components.iter().zip(&basepoints) {
        if c.graph.is_empty() {
            return Err(Error::input(format!("component {} is empty", c.name)));
        }
        if b >= c.graph.len() {
            return Err(Error::InvalidPoint {
                id: b,
                len: c.graph.len(),
            });
        }
        if !c.graph.is_connected() {
            return Err(Error::Disconnected(format!("component {}", c.name)));
        }
    }

    let mut offsets = Vec::with_capacity(k + 1);
    let mut total = 0;
    for c in &components {
        offsets.push(total);
        total += c.graph.len();
    }
    offsets.push(total);

    let locals: Vec<FiniteMetricSpace> = components
        .par_iter()
        .map(|c| FiniteMetricSpace::from_graph(&c.graph))
        .collect();

    let mut dist = vec![SEPARATED; total * total];
    for m in 0..k {
        for n in 0..k {
            let (om, on) = (offsets[m], offsets[n]);
            for x in 0..components[m].graph.len() {
                for y in 0..components[n].graph.len() {
                    let d = if m == n {
                        locals[m].d(x, y)
                    } else {
                        locals[m].d(x, basepoints[m])
                            + pads[m]
                            + pads[n]
                            + locals[n].d(basepoints[n], y)
                    };
                    dist[(om + x) * total + on + y] = d;
                }
            }
        }
    }

    Ok(GraphFamily {
        components,
        basepoints,
        pads,
        offsets,
        space: FiniteMetricSpace::from_raw(total, dist),
    })
}

impl GraphFamily {
    /// A family with a single member (no separation data needed).
    pub fn single(component: Component) -> Result<Self> {
        assemble_family(vec![component], None, vec![1])
    }

    /// Members with default basepoints and pads `1, 2, 3, ...`.
    pub fn chain(components: Vec<Component>) -> Result<Self> {
        let pads = (1..=components.len() as u32).collect();
        assemble_family(components, None, pads)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn basepoints(&self) -> &[usize] {
        &self.basepoints
    }

    pub fn pads(&self) -> &[u32] {
        &self.pads
    }

    pub fn member_count(&self) -> usize {
        self.components.len()
    }

    /// Global ids of member `i`.
    pub fn member(&self, i: usize) -> PointSet {
        PointSet::range(self.offsets[i], self.offsets[i + 1])
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Index of the member containing global id `x`.
    pub fn member_of(&self, x: usize) -> usize {
        self.offsets.partition_point(|&o| o <= x) - 1
    }

    /// `d(X_i, X_iᶜ)`; `SEPARATED` for a single-member family.
    pub fn separation(&self, i: usize) -> u32 {
        let own = self.member(i);
        let rest = self.space.all_points().difference(&own);
        self.space.set_distance(&own, &rest)
    }
}

/// A uniformly random simple `d`-regular graph on `n` vertices (pairing
/// model, rejecting loops and multi-edges). Deterministic per seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_regular_with(n, d, &mut rng, 100_000)
}

fn check_regular_params(n: usize, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::input(format!("degree {d} < 3")));
    }
    if n <= d {
        return Err(Error::input(format!("no {d}-regular graph on {n} <= {d} vertices")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(Error::input(format!("n·d = {} is odd", n * d)));
    }
    Ok(())
}

fn random_regular_with(n: usize, d: usize, rng: &mut ChaCha8Rng, attempts: usize) -> Result<Graph> {
    check_regular_params(n, d)?;
    let mut points: Vec<usize> = (0..n * d).map(|i| i / d).collect();
    'attempt: for _ in 0..attempts {
        points.shuffle(rng);
        let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        for pair in points.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || adj[a].contains(&b) {
                continue 'attempt;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| adj[a].iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        return Graph::from_edges(n, &edges);
    }
    Err(Error::GenerationFailed {
        attempts,
        reason: format!("no simple pairing found for n={n}, d={d}"),
    })
}

/// A random `d`-regular graph with girth at least `min_girth`, by rejection.
pub fn random_regular_with_girth(
    n: usize,
    d: usize,
    min_girth: usize,
    seed: u64,
    attempts: usize,
) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let g = random_regular_with(n, d, &mut rng, 1_000)?;
        if g.girth().is_none_or(|girth| girth >= min_girth) {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        attempts,
        reason: format!("no {d}-regular graph on {n} vertices with girth >= {min_girth}"),
    })
}

/// Girth-filtered random regular members, one per size, generated in
/// parallel from seeds derived from `seed`.
pub fn girth_filtered_family(
    sizes: &[usize],
    d: usize,
    min_girth: usize,
    seed: u64,
) -> Result<Vec<Graph>> {
    sizes
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let member_seed = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            random_regular_with_girth(n, d, min_girth, member_seed, 10_000)
        })
        .collect()
}

/// Group data for one level of a quotient tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub label: String,
    /// `mult[a][b] = a·b`.
    pub mult: Vec<Vec<usize>>,
    pub identity: usize,
    pub generators: Vec<usize>,
}

/// A tower of finite quotients `Γ/Γ_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoxSpaceSpec {
    /// `ℤ^dim / k ℤ^dim` for each modulus `k` in the tower, generated by the
    /// standard basis and its negatives. Each modulus divides the next.
    Lattice { dim: usize, moduli: Vec<u64> },
    /// Explicit multiplication tables, one per level.
    Tables { levels: Vec<GroupTable> },
}

impl BoxSpaceSpec {
    /// The box space of `ℤ` with quotients `ℤ/2^k ℤ` for `k` in `levels`.
    pub fn dyadic_integers(levels: std::ops::RangeInclusive<u32>) -> Self {
        BoxSpaceSpec::Lattice {
            dim: 1,
            moduli: levels.map(|k| 1u64 << k).collect(),
        }
    }

    pub fn levels(&self) -> usize {
        match self {
            BoxSpaceSpec::Lattice { moduli, .. } => moduli.len(),
            BoxSpaceSpec::Tables { levels } => levels.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BoxSpaceSpec::Lattice { dim, moduli } => {
                if *dim == 0 {
                    return Err(Error::input("lattice dimension must be positive"));
                }
                if moduli.contains(&0) {
                    return Err(Error::input("moduli must be positive"));
                }
                if moduli.windows(2).any(|w| w[1] % w[0] != 0 || w[1] == w[0]) {
                    return Err(Error::input(
                        "each modulus must properly divide the next (decreasing kernels)",
                    ));
                }
                Ok(())
            }
            BoxSpaceSpec::Tables { levels } => {
                for t in levels {
                    validate_table(t)?;
                }
                if levels.windows(2).any(|w| w[0].mult.len() > w[1].mult.len()) {
                    return Err(Error::input("quotient orders must be nondecreasing along the tower"));
                }
                Ok(())
            }
        }
    }
}

fn validate_table(t: &GroupTable) -> Result<()> {
    let n = t.mult.len();
    if n == 0 || t.identity >= n {
        return Err(Error::input(format!("level {}: bad order or identity", t.label)));
    }
    for (a, row) in t.mult.iter().enumerate() {
        if row.len() != n || row.iter().any(|&c| c >= n) {
            return Err(Error::input(format!("level {}: row {a} is not closed", t.label)));
        }
        if row[t.identity] != a || t.mult[t.identity][a] != a {
            return Err(Error::input(format!("level {}: identity fails at {a}", t.label)));
        }
    }
    for &s in &t.generators {
        if s >= n {
            return Err(Error::InvalidPoint { id: s, len: n });
        }
        let has_inverse = t
            .generators
            .iter()
            .any(|&u| t.mult[s][u] == t.identity);
        if !has_inverse {
            return Err(Error::input(format!(
                "level {}: generating set is not symmetric at {s}",
                t.label
            )));
        }
    }
    Ok(())
}

/// Coordinates of a lattice-quotient vertex (coordinate 0 least significant).
pub fn lattice_coords(id: usize, dim: usize, k: u64) -> Vec<u64> {
    let mut rest = id as u64;
    (0..dim)
        .map(|_| {
            let c = rest % k;
            rest /= k;
            c
        })
        .collect()
}

pub fn lattice_id(coords: &[u64], k: u64) -> usize {
    coords.iter().rev().fold(0u64, |acc, &c| acc * k + c % k) as usize
}

/// The Cayley graph of `Γ/Γ_level` with edges `{g, gs}`.
pub fn cayley_quotient(spec: &BoxSpaceSpec, level: usize) -> Result<Graph> {
    spec.validate()?;
    if level >= spec.levels() {
        return Err(Error::input(format!(
            "level {level} out of range (tower has {} levels)",
            spec.levels()
        )));
    }
    let g = match spec {
        BoxSpaceSpec::Lattice { dim, moduli } => {
            let k = moduli[level];
            let dim = *dim;
            let order = (k as usize)
                .checked_pow(dim as u32)
                .ok_or(Error::Capacity {
                    what: "quotient order",
                    needed: usize::MAX,
                    cap: usize::MAX,
                })?;
            let mut edges = Vec::with_capacity(order * dim);
            for v in 0..order {
                let c = lattice_coords(v, dim, k);
                for i in 0..dim {
                    let mut up = c.clone();
                    up[i] = (up[i] + 1) % k;
                    edges.push((v, lattice_id(&up, k)));
                }
            }
            Graph::from_edges_dedup(order, edges)
        }
        BoxSpaceSpec::Tables { levels } => {
            let t = &levels[level];
            let n = t.mult.len();
            let edges = (0..n).flat_map(|a| t.generators.iter().map(move |&s| (a, t.mult[a][s])));
            Graph::from_edges_dedup(n, edges.collect::<Vec<_>>())
        }
    };
    if !g.is_connected() {
        return Err(Error::Disconnected(format!(
            "generators do not generate the quotient at level {level}"
        )));
    }
    Ok(g)
}

/// Default cap on the number of vertices of a Hamming power.
pub const HAMMING_CAP: usize = 1 << 16;

/// `(ℤ/qℤ)^n` with cyclic unit steps in one coordinate as edges.
pub fn hamming_power(q: usize, n: usize, cap: usize) -> Result<Graph> {
    if q < 2 || n < 1 {
        return Err(Error::input("need q >= 2 and n >= 1"));
    }
    let order = q.checked_pow(n as u32).filter(|&o| o <= cap).ok_or(Error::Capacity {
        what: "hamming power order",
        needed: q.saturating_pow(n as u32),
        cap,
    })?;
    let spec = BoxSpaceSpec::Lattice {
        dim: n,
        moduli: vec![q as u64],
    };
    debug_assert!(order > 0);
    cayley_quotient(&spec, 0)
}

/// Second-smallest Laplacian eigenvalue with regularity and connectivity
/// flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    pub lambda2: f64,
    pub regular_degree: Option<usize>,
    pub connected: bool,
    /// Power-iteration steps; 0 when solved densely.
    pub iterations: usize,
    pub converged: bool,
}

/// Largest graph solved by a dense eigendecomposition.
pub const DENSE_SPECTRUM: usize = 512;

/// `λ₂(L)`: dense eigendecomposition up to [`DENSE_SPECTRUM`] vertices,
/// otherwise power iteration on `2·d_max·I − L` with the constant vector
/// projected out.
pub fn spectral_gap(graph: &Graph, tol: f64) -> SpectralGap {
    let n = graph.len();
    let connected = graph.is_connected();
    let regular_degree = graph.regular_degree();
    if n < 2 {
        return SpectralGap {
            lambda2: 0.0,
            regular_degree,
            connected,
            iterations: 0,
            converged: true,
        };
    }
    if n <= DENSE_SPECTRUM {
        let mut lap = vec![0.0; n * n];
        for x in 0..n {
            for &y in graph.neighbors(x) {
                lap[x * n + y] -= 1.0;
                lap[x * n + x] += 1.0;
            }
        }
        let lambda2 = linalg::sym_eigen(&lap, n).0[1].max(0.0);
        return SpectralGap {
            lambda2: if lambda2 < tol { 0.0 } else { lambda2 },
            regular_degree,
            connected,
            iterations: 0,
            converged: true,
        };
    }
    let shift = 2.0 * graph.max_degree().max(1) as f64;
    let apply = |v: &[f64], out: &mut [f64]| {
        for x in 0..n {
            let nb = graph.neighbors(x);
            let lap = nb.len() as f64 * v[x] - nb.iter().map(|&y| v[y]).sum::<f64>();
            out[x] = shift * v[x] - lap;
        }
    };
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
    };
    let r = linalg::power_psd(n, &apply, Some(&project), 0x5EED, 3, tol, 100_000);
    let lambda2 = (shift - r.value).max(0.0);
    SpectralGap {
        lambda2: if lambda2 < tol { 0.0 } else { lambda2 },
        regular_degree,
        connected,
        iterations: r.iterations,
        converged: r.converged,
    }
}
